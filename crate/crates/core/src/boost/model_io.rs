//! Line-oriented text model files.
//!
//! ```text
//! transboost-model 1
//! n_features 2
//! feature 0 age
//! feature 1 income
//! config n_rounds=40
//! ...
//! base_main -4.0546510810816438e-1
//! base_anc 0.0000000000000000e0
//! eta 2.9999999999999999e-1
//! trees 1
//! tree 0
//! node 0 feat=1 cut=5.0000000000000000e-1 default=L left=1 right=2
//! stat 0 gain=1.2500000000000000e0
//! leaf 1 wt=1.0000000000000000e-1 ws=2.0000000000000001e-1
//! stat 1 count=10
//! leaf 2 wt=-1.0000000000000000e-1 ws=0.0000000000000000e0
//! stat 2 count=7
//! end
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{TransBoostConfig, TransBoostModel};
use crate::error::{Error, Result};
use crate::tree::{Direction, DualTree, Leaf, Node};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "transboost-model";

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

impl TransBoostModel {
    /// Serialises the model. Equal models give equal bytes.
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "{MAGIC} {MODEL_FORMAT_VERSION}");
        let _ = writeln!(w, "n_features {}", self.n_features);
        for (i, name) in self.feature_names.iter().enumerate() {
            if name.contains(['\n', '\r']) {
                return Err(Error::Config(format!("feature name {name:?} contains a line break")));
            }
            let _ = writeln!(w, "feature {i} {name}");
        }
        for (k, v) in self.config.entries() {
            let _ = writeln!(w, "config {k}={v}");
        }
        let _ = writeln!(w, "base_main {}", real(self.base_score_main));
        let _ = writeln!(w, "base_anc {}", real(self.base_score_anc));
        let _ = writeln!(w, "eta {}", real(self.eta));
        let _ = writeln!(w, "trees {}", self.trees.len());
        for (t, tree) in self.trees.iter().enumerate() {
            let _ = writeln!(w, "tree {t}");
            let mut leaf_node = vec![0usize; tree.n_leaves()];
            for (id, node) in tree.nodes().iter().enumerate() {
                match *node {
                    Node::Split {
                        feature,
                        cut,
                        default,
                        left,
                        right,
                        gain,
                    } => {
                        let d = match default {
                            Direction::Left => 'L',
                            Direction::Right => 'R',
                        };
                        let _ = writeln!(
                            w,
                            "node {id} feat={feature} cut={} default={d} left={left} right={right}",
                            real(cut)
                        );
                        let _ = writeln!(w, "stat {id} gain={}", real(gain));
                    }
                    Node::Leaf { leaf } => leaf_node[leaf] = id,
                }
            }
            for (leaf, &id) in tree.leaves().iter().zip(&leaf_node) {
                let _ = writeln!(w, "leaf {id} wt={} ws={}", real(leaf.main), real(leaf.ancillary));
                let _ = writeln!(w, "stat {id} count={}", leaf.count);
            }
        }
        let _ = writeln!(w, "end");
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Parser::new(text).model()
    }
}

pub fn write_model(model: &TransBoostModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model.to_text()?).map_err(|e| Error::io(path, e))
}

pub fn read_model(path: impl AsRef<Path>) -> Result<TransBoostModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TransBoostModel::from_text(&text)
}

struct Parser<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    line_no: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            lines: text.lines().enumerate().peekable(),
            line_no: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::ModelFormat {
            line: self.line_no,
            message: message.into(),
        }
    }

    fn next_line(&mut self) -> Result<&'a str> {
        match self.lines.next() {
            Some((i, l)) => {
                self.line_no = i + 1;
                Ok(l)
            }
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn peek_keyword(&mut self) -> Option<&'a str> {
        self.lines
            .peek()
            .map(|(_, l)| l.split_whitespace().next().unwrap_or(""))
    }

    /// Reads `keyword rest` and returns `rest`.
    fn expect(&mut self, keyword: &str) -> Result<&'a str> {
        let line = self.next_line()?;
        match line.split_once(' ') {
            Some((k, rest)) if k == keyword => Ok(rest),
            _ => Err(self.err(format!("expected {keyword:?}"))),
        }
    }

    fn parse<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.trim()
            .parse()
            .map_err(|_| self.err(format!("cannot parse {s:?}")))
    }

    /// Splits `a=1 b=2` into values in the given key order.
    fn fields(&self, rest: &'a str, keys: &[&str]) -> Result<Vec<&'a str>> {
        let parts: Vec<&str> = rest.split_whitespace().collect();
        if parts.len() != keys.len() + 1 {
            return Err(self.err("wrong number of fields"));
        }
        keys.iter()
            .zip(&parts[1..])
            .map(|(k, p)| match p.split_once('=') {
                Some((pk, v)) if pk == *k => Ok(v),
                _ => Err(self.err(format!("expected {k}=..."))),
            })
            .collect()
    }

    fn model(mut self) -> Result<TransBoostModel> {
        let version: u32 = {
            let v = self.expect(MAGIC)?;
            self.parse(v)?
        };
        if version != MODEL_FORMAT_VERSION {
            return Err(self.err(format!("unsupported version {version}")));
        }
        let n_features: usize = {
            let v = self.expect("n_features")?;
            self.parse(v)?
        };
        let mut feature_names = Vec::with_capacity(n_features);
        for i in 0..n_features {
            let rest = self.expect("feature")?;
            let (idx, name) = rest.split_once(' ').unwrap_or((rest, ""));
            if self.parse::<usize>(idx)? != i {
                return Err(self.err("feature lines out of order"));
            }
            feature_names.push(name.to_string());
        }
        let mut config = TransBoostConfig::default();
        while self.peek_keyword() == Some("config") {
            let rest = self.expect("config")?;
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| self.err("expected key=value"))?;
            config.set(k, v).map_err(|e| self.err(e.to_string()))?;
        }
        let base_main: f64 = {
            let v = self.expect("base_main")?;
            self.parse(v)?
        };
        let base_anc: f64 = {
            let v = self.expect("base_anc")?;
            self.parse(v)?
        };
        let eta: f64 = {
            let v = self.expect("eta")?;
            self.parse(v)?
        };
        let n_trees: usize = {
            let v = self.expect("trees")?;
            self.parse(v)?
        };
        let mut trees = Vec::with_capacity(n_trees);
        for t in 0..n_trees {
            let v = self.expect("tree")?;
            if self.parse::<usize>(v)? != t {
                return Err(self.err("tree blocks out of order"));
            }
            trees.push(self.tree(n_features)?);
        }
        self.expect_end()?;
        Ok(TransBoostModel {
            trees,
            base_score_main: base_main,
            base_score_anc: base_anc,
            eta,
            n_features,
            feature_names,
            config,
        })
    }

    fn expect_end(&mut self) -> Result<()> {
        let line = self.next_line()?;
        if line.trim() != "end" {
            return Err(self.err("expected end"));
        }
        if self.lines.any(|(_, l)| !l.trim().is_empty()) {
            return Err(self.err("content after end"));
        }
        Ok(())
    }

    fn tree(&mut self, n_features: usize) -> Result<DualTree> {
        let mut nodes: HashMap<usize, Node> = HashMap::new();
        let mut leaves: Vec<Leaf> = Vec::new();
        let mut leaf_of_node: HashMap<usize, usize> = HashMap::new();
        loop {
            match self.peek_keyword() {
                Some("node") => {
                    let rest = self.expect("node")?;
                    let f = self.fields(rest, &["feat", "cut", "default", "left", "right"])?;
                    let id: usize = self.parse(rest.split_whitespace().next().unwrap_or(""))?;
                    let feature: usize = self.parse(f[0])?;
                    if feature >= n_features {
                        return Err(self.err("split feature out of range"));
                    }
                    let default = match f[2] {
                        "L" => Direction::Left,
                        "R" => Direction::Right,
                        _ => return Err(self.err("default must be L or R")),
                    };
                    let node = Node::Split {
                        feature,
                        cut: self.parse(f[1])?,
                        default,
                        left: self.parse(f[3])?,
                        right: self.parse(f[4])?,
                        gain: 0.0,
                    };
                    if nodes.insert(id, node).is_some() {
                        return Err(self.err("duplicate node id"));
                    }
                }
                Some("leaf") => {
                    let rest = self.expect("leaf")?;
                    let f = self.fields(rest, &["wt", "ws"])?;
                    let id: usize = self.parse(rest.split_whitespace().next().unwrap_or(""))?;
                    let leaf = leaves.len();
                    leaves.push(Leaf {
                        main: self.parse(f[0])?,
                        ancillary: self.parse(f[1])?,
                        count: 0,
                    });
                    leaf_of_node.insert(id, leaf);
                    if nodes.insert(id, Node::Leaf { leaf }).is_some() {
                        return Err(self.err("duplicate node id"));
                    }
                }
                Some("stat") => {
                    let rest = self.expect("stat")?;
                    let mut parts = rest.split_whitespace();
                    let id: usize = self.parse(parts.next().unwrap_or(""))?;
                    let (k, v) = parts
                        .next()
                        .and_then(|p| p.split_once('='))
                        .ok_or_else(|| self.err("expected key=value"))?;
                    match (k, nodes.get_mut(&id)) {
                        ("gain", Some(Node::Split { gain, .. })) => *gain = self.parse(v)?,
                        ("count", Some(Node::Leaf { .. })) => {
                            leaves[leaf_of_node[&id]].count = self.parse(v)?;
                        }
                        _ => return Err(self.err("stat does not match a preceding node")),
                    }
                }
                _ => break,
            }
        }
        let n = nodes.len();
        let mut ordered = Vec::with_capacity(n);
        for id in 0..n {
            match nodes.remove(&id) {
                Some(node) => ordered.push(node),
                None => return Err(self.err(format!("node ids are not dense; missing {id}"))),
            }
        }
        DualTree::from_parts(ordered, leaves).map_err(|e| self.err(e.to_string()))
    }
}
