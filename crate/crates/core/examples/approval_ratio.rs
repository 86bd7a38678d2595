//! Share of applicants that can be approved while keeping the default rate
//! under a threshold, for each learner.

use transboost::boost::TransBoostConfig;
use transboost::data::split_target;
use transboost::data::synth::{shifted_domains, ShiftSpec};
use transboost::eval::{train_algorithm, Algorithm, InclusionReport};

fn main() -> transboost::Result<()> {
    let ds = shifted_domains(
        &ShiftSpec {
            n_source: 2000,
            n_target: 400,
            ..Default::default()
        },
        8,
    );
    let (train, test) = split_target(&ds, 200, 8)?;
    let config = TransBoostConfig {
        n_rounds: 25,
        ..Default::default()
    };

    // Scores are probabilities of the positive (default) class.
    let mut scored = Vec::new();
    for algorithm in Algorithm::ALL {
        let model = train_algorithm(&train, algorithm, &config)?;
        scored.push((algorithm.to_string(), model.predict(&test)?));
    }
    let report = InclusionReport::build(test.labels(), &scored, &[0.1, 0.2, 0.3]);
    print!("{}", report.to_csv());
    Ok(())
}
