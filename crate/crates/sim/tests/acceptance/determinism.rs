//! Every experiment on every bundled scenario, run through the command line
//! twice in parallel and once serially; all written files must be identical.

use std::collections::BTreeMap;
use std::path::Path;

use clap::Parser;
use hts_sim::cli::{execute, Cli};
use hts_sim::error::exit;
use hts_sim::{load_scenario, Experiment};

use crate::{scenario_path, Checks, Outcome};

fn run_cli(scenario: &Path, experiment: Experiment, workers: usize, out: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let name = clap::ValueEnum::to_possible_value(&experiment).expect("named variant").get_name().to_string();
    let args = [
        "hts-sim".to_string(),
        "run".into(),
        "--scenario".into(),
        scenario.display().to_string(),
        "--experiment".into(),
        name,
        "--workers".into(),
        workers.to_string(),
        "--out".into(),
        out.display().to_string(),
    ];
    let cli = Cli::try_parse_from(args).map_err(|e| e.to_string())?;
    let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
    let code = execute(cli, &mut stdout, &mut stderr);
    if code != exit::OK {
        return Err(format!("exit {code}: {}", String::from_utf8_lossy(&stderr).trim()));
    }
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(out).map_err(|e| e.to_string())? {
        let p = entry.map_err(|e| e.to_string())?.path();
        files.insert(p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).map_err(|e| e.to_string())?);
    }
    Ok(files)
}

pub fn run() -> Outcome {
    let mut checks = Checks::default();
    let mut runs = 0;
    let tmp = tempfile::tempdir().expect("temporary directory");
    for scenario in ["demo.toml", "minimal.toml", "leo.toml"] {
        let path = scenario_path(scenario);
        let loaded = match load_scenario(&path) {
            Ok(l) => l,
            Err(e) => {
                checks.check(false, || format!("{scenario}: {e}"));
                continue;
            }
        };
        for exp in Experiment::ALL {
            if exp.check_sections(&loaded.scenario).is_err() {
                checks.check(scenario != "demo.toml", || format!("demo scenario lacks what {} needs", exp.name()));
                continue;
            }
            let dir = tmp.path().join(scenario).join(exp.name());
            let outputs: Vec<_> = [("parallel", 4), ("parallel again", 4), ("serial", 1)]
                .iter()
                .map(|(label, w)| (*label, run_cli(&path, exp, *w, &dir.join(label.replace(' ', "_")))))
                .collect();
            let reference = match &outputs[0].1 {
                Ok(files) => files,
                Err(e) => {
                    checks.check(false, || format!("{scenario} {}: {e}", exp.name()));
                    continue;
                }
            };
            runs += 1;
            for (label, out) in &outputs[1..] {
                match out {
                    Ok(files) => checks.check(files == reference, || {
                        let differing: Vec<&String> = reference.keys().filter(|k| files.get(*k) != reference.get(*k)).collect();
                        format!("{scenario} {} ({label}): files differ: {differing:?}", exp.name())
                    }),
                    Err(e) => checks.check(false, || format!("{scenario} {} ({label}): {e}", exp.name())),
                }
            }
        }
    }
    checks.finish(|_| format!("{runs} scenario/experiment pairs byte-identical across 3 runs"))
}
