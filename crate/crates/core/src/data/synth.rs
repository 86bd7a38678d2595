//! Seeded synthetic source/target data with covariate and concept shift.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Dataset, Domain};
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSpec {
    pub n_source: usize,
    pub n_target: usize,
    pub n_features: usize,
    /// Mean offset of the source features on the first half of the columns.
    pub covariate_shift: f64,
    /// Weight of a source-only term in the source labelling function.
    pub concept_shift: f64,
    /// Probability that a cell is missing.
    pub missing_rate: f64,
}

impl Default for ShiftSpec {
    fn default() -> Self {
        ShiftSpec {
            n_source: 2000,
            n_target: 500,
            n_features: 8,
            covariate_shift: 0.7,
            concept_shift: 0.8,
            missing_rate: 0.0,
        }
    }
}

/// Source rows first, then target rows.
///
/// Both domains share the logit `1.2·x0 − x1 + 0.8·x2·x3 + sin(2·x4)` (terms
/// whose column does not exist are dropped); the source logit adds
/// `concept_shift · x1`, and source features on the first half of the columns
/// are shifted by `covariate_shift`.
pub fn shifted_domains(spec: &ShiftSpec, seed: u64) -> Dataset {
    let mut rng = seed::child_rng(seed, "synthetic", 0);
    let n = spec.n_source + spec.n_target;
    let d = spec.n_features.max(1);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut domains = Vec::with_capacity(n);
    for i in 0..n {
        let domain = if i < spec.n_source {
            Domain::Source
        } else {
            Domain::Target
        };
        let x: Vec<f64> = (0..d)
            .map(|j| {
                let z: f64 = StandardNormal.sample(&mut rng);
                if domain == Domain::Source && j < d.div_ceil(2) {
                    z + spec.covariate_shift
                } else {
                    z
                }
            })
            .collect();
        let at = |j: usize| x.get(j).copied().unwrap_or(0.0);
        let mut logit = 1.2 * at(0) - at(1) + 0.8 * at(2) * at(3) + (2.0 * at(4)).sin();
        if domain == Domain::Source {
            logit += spec.concept_shift * at(1);
        }
        let p = 1.0 / (1.0 + (-logit).exp());
        labels.push(u8::from(rng.gen::<f64>() < p));
        rows.push(
            x.into_iter()
                .map(|v| (rng.gen::<f64>() >= spec.missing_rate).then_some(v))
                .collect::<Vec<_>>(),
        );
        domains.push(domain);
    }
    Dataset::from_rows(&rows, labels, domains).expect("generated data is consistent")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_determinism() {
        let spec = ShiftSpec {
            n_source: 30,
            n_target: 20,
            n_features: 3,
            ..Default::default()
        };
        let a = shifted_domains(&spec, 1);
        assert_eq!(a.n_rows(), 50);
        assert_eq!(a.n_cols(), 3);
        assert_eq!(a.count(Domain::Source), 30);
        assert_eq!(a, shifted_domains(&spec, 1));
        assert_ne!(a, shifted_domains(&spec, 2));
    }
}
