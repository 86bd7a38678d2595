//! Save a model, load it back and rank features by total split gain.

use transboost::boost::{read_model, train, write_model, TransBoostConfig};
use transboost::data::synth::{shifted_domains, ShiftSpec};

fn main() -> transboost::Result<()> {
    let ds = shifted_domains(
        &ShiftSpec {
            n_source: 1000,
            n_target: 300,
            ..Default::default()
        },
        4,
    );
    let model = train(
        &ds,
        &TransBoostConfig {
            n_rounds: 15,
            ..Default::default()
        },
    )?;

    let dir = std::env::temp_dir().join(format!("transboost-importance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join("model.txt");
    write_model(&model, &path)?;
    let loaded = read_model(&path)?;
    assert_eq!(loaded.predict(&ds)?, model.predict(&ds)?);

    for (feature, gain) in loaded.feature_importance() {
        println!("{:<6} {gain:.3}", loaded.feature_names[feature]);
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
