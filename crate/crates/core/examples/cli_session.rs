//! Drive the command-line front end in-process: train, predict, importance.

use transboost::cli::run;
use transboost::data::synth::{shifted_domains, ShiftSpec};
use transboost::data::write_csv;

fn main() {
    let dir = std::env::temp_dir().join(format!("transboost-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let data = dir.join("data.csv");
    let model = dir.join("model.txt");
    let ds = shifted_domains(
        &ShiftSpec {
            n_source: 600,
            n_target: 200,
            ..Default::default()
        },
        1,
    );
    write_csv(&ds, &data).unwrap();

    let sessions: [&[&str]; 3] = [
        &["train", "--rounds", "10", "--depth", "3"],
        &["predict"],
        &["importance"],
    ];
    for args in sessions {
        let mut argv = vec!["transboost".to_string()];
        argv.extend(args.iter().map(|s| s.to_string()));
        argv.extend(["--data".into(), data.display().to_string()]);
        argv.extend(["--model".into(), model.display().to_string()]);
        argv.extend(["--model-out".into(), model.display().to_string()]);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&argv, &mut out, &mut err);
        let text = String::from_utf8_lossy(&out);
        println!("$ transboost {} -> exit {code}", args.join(" "));
        for line in text.lines().take(4) {
            println!("  {line}");
        }
        if !err.is_empty() {
            println!("  stderr: {}", String::from_utf8_lossy(&err).trim());
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
}
