use super::Dataset;

pub const DEFAULT_MAX_BINS: usize = 256;

/// Per-feature cut points for histogram split finding.
///
/// With cuts `c_0 < c_1 < … < c_{k-1}` a present value `v` falls in bin
/// `#{j : c_j <= v}`, so bin `b` covers `[c_{b-1}, c_b)`. Missing cells go to
/// bin `k + 1`, which no present value can reach.
#[derive(Debug, Clone, PartialEq)]
pub struct BinMap {
    cuts: Vec<Vec<f64>>,
}

impl BinMap {
    pub fn cuts(&self, feature: usize) -> &[f64] {
        &self.cuts[feature]
    }

    pub fn n_features(&self) -> usize {
        self.cuts.len()
    }

    /// Number of bins holding present values.
    pub fn n_value_bins(&self, feature: usize) -> usize {
        self.cuts[feature].len() + 1
    }

    pub fn missing_bin(&self, feature: usize) -> u16 {
        self.n_value_bins(feature) as u16
    }

    pub fn bin_of(&self, feature: usize, value: Option<f64>) -> u16 {
        match value {
            None => self.missing_bin(feature),
            Some(v) => self.cuts[feature].partition_point(|&c| c <= v) as u16,
        }
    }

    pub fn bin_dataset(&self, ds: &Dataset) -> BinnedMatrix {
        let bins = (0..ds.n_cols())
            .map(|f| ds.column(f).iter().map(|&v| self.bin_of(f, v)).collect())
            .collect();
        BinnedMatrix { bins }
    }
}

/// Bin ids of a dataset, column-major.
#[derive(Debug, Clone)]
pub struct BinnedMatrix {
    bins: Vec<Vec<u16>>,
}

impl BinnedMatrix {
    pub fn column(&self, feature: usize) -> &[u16] {
        &self.bins[feature]
    }
}

/// Quantile cut points over the present values of each feature.
///
/// A feature with `k <= max_bins` distinct values gets a cut halfway between
/// each neighbouring pair, i.e. exactly `k` bins. Otherwise cut `j` sits just
/// below the value at sorted position `floor(j·n / max_bins)`, halfway to the
/// next smaller distinct value; duplicate cuts collapse.
pub fn build_bins(ds: &Dataset, max_bins: usize) -> BinMap {
    assert!(
        (2..=u16::MAX as usize - 1).contains(&max_bins),
        "max_bins must be in 2..65535"
    );
    let cuts = (0..ds.n_cols())
        .map(|f| feature_cuts(ds.column(f), max_bins))
        .collect();
    BinMap { cuts }
}

fn feature_cuts(column: &[Option<f64>], max_bins: usize) -> Vec<f64> {
    let mut values: Vec<f64> = column.iter().flatten().copied().collect();
    if values.is_empty() {
        return Vec::new();
    }
    values.sort_by(f64::total_cmp);
    let mut distinct = values.clone();
    distinct.dedup();
    let midpoint = |i: usize| distinct[i - 1] + (distinct[i] - distinct[i - 1]) / 2.0;
    if distinct.len() <= max_bins {
        return (1..distinct.len()).map(midpoint).collect();
    }
    let n = values.len();
    let mut cuts: Vec<f64> = Vec::with_capacity(max_bins - 1);
    let mut last_idx = 0;
    for j in 1..max_bins {
        let v = values[j * n / max_bins];
        let idx = distinct.partition_point(|&d| d < v);
        if idx == 0 || idx == last_idx {
            continue;
        }
        last_idx = idx;
        cuts.push(midpoint(idx));
    }
    cuts
}
