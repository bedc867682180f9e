// Copyright 2026 The tgrb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use tgrb_core::config::parse_config;
use tgrb_core::engine::{run_experiment, run_experiment_with_workers, ExperimentConfig, SequenceKind};
use tgrb_core::gates::GateSet;
use tgrb_core::noise::NoiseModel;
use tgrb_core::records::{parse_csv, survival_points};
use tgrb_core::runner::{execute, output_files, parse_manifest, run_from_config};
use tgrb_core::scenario::{run_scenario, Scenario, ScenarioOptions};

fn strip_wall_time(json: &[u8]) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(json).unwrap();
    if let Some(o) = v.as_object_mut() {
        o.remove("wall_time_s");
    }
    v
}

#[test]
fn depolarizing_mean_matches_closed_form() {
    let p = 0.02;
    let mut cfg = ExperimentConfig::new(99, 100_000, NoiseModel::Depolarizing { p_dep: p }, NoiseModel::None);
    cfg.lengths = vec![10];
    cfg.kinds = vec![SequenceKind::Reference];
    let recs = run_experiment(&cfg, GateSet::shared()).unwrap();
    let pt = survival_points(&recs, SequenceKind::Reference)[0];
    let want = 0.5 * (1.0 + (1.0 - p).powi(21));
    assert!((pt.mean - want).abs() < 3.0 * pt.stderr, "{} vs {want} ± {}", pt.mean, pt.stderr);
    let exact: f64 = recs.iter().map(|r| r.survival_prob.unwrap()).sum::<f64>() / recs.len() as f64;
    assert!((exact - want).abs() < 1e-12);
}

#[test]
fn records_independent_of_worker_count() {
    let mut cfg = ExperimentConfig::new(5, 50, NoiseModel::rotation_x(0.1), NoiseModel::Gad { p: 0.9, gamma: 0.1 });
    cfg.kinds = SequenceKind::ALL.to_vec();
    cfg.shots_per_sequence = 3;
    let gs = GateSet::shared();
    let one = run_experiment_with_workers(&cfg, gs, 1).unwrap();
    let eight = run_experiment_with_workers(&cfg, gs, 8).unwrap();
    assert_eq!(one, eight);
}

#[test]
fn zero_noise_run_is_flat_with_unit_estimate() {
    let mut cfg = ExperimentConfig::new(1, 20, NoiseModel::None, NoiseModel::None);
    cfg.bootstrap_replicates = 5;
    let out = execute(&cfg, GateSet::shared(), 1.0, Vec::new()).unwrap();
    let a = &out.manifest.analysis;
    assert!(a.fits.values().all(|f| !f.p_identifiable && f.p == 1.0));
    assert_eq!(a.estimate.unwrap().f_t, 1.0);
}

#[test]
fn decay_csv_rows_match_fit() {
    let mut cfg = ExperimentConfig::new(3, 100, NoiseModel::rotation_x(0.1), NoiseModel::rotation_x(0.3));
    cfg.bootstrap_replicates = 0;
    let out = execute(&cfg, GateSet::shared(), 1.0, Vec::new()).unwrap();
    let files = output_files(&out);
    for kind in ["reference", "interleaved"] {
        let fit = out.manifest.analysis.fits[&kind.parse::<SequenceKind>().unwrap()];
        let text = String::from_utf8(files[&format!("decay_{kind}.csv")].clone()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n,mean,stderr,fit"));
        for line in lines {
            let cols: Vec<&str> = line.split(',').collect();
            let n: i32 = cols[0].parse().unwrap();
            let v: f64 = cols[3].parse().unwrap();
            assert!((v - fit.a * fit.p.powi(n) - fit.b).abs() < 1e-12);
        }
    }
    let shots = parse_csv(&files["shots.csv"]).unwrap();
    assert_eq!(shots.len(), out.records.len());
}

#[test]
fn run_from_config_writes_reproducible_outputs() {
    let dir = std::env::temp_dir().join(format!("tgrb-pipeline-{}", std::process::id()));
    let cfg_path = dir.join("run.toml");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(
        &cfg_path,
        r#"
master_seed = 8
sequences_per_length = 40
lengths = [1, 5, 9, 13, 17]
bootstrap_replicates = 10

[clifford_noise]
kind = "rotation"
axis = "x"
theta = 0.05

[t_noise]
kind = "gad"
p = 0.9
gamma = 0.05
"#,
    )
    .unwrap();
    let (a, b) = (dir.join("a"), dir.join("b"));
    let m1 = run_from_config(&cfg_path, &a).unwrap();
    run_from_config(&cfg_path, &b).unwrap();
    for f in ["shots.csv", "decay_reference.csv", "decay_interleaved.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let ja = std::fs::read(a.join("manifest.json")).unwrap();
    assert_eq!(strip_wall_time(&ja), strip_wall_time(&std::fs::read(b.join("manifest.json")).unwrap()));
    let parsed = parse_manifest(std::str::from_utf8(&ja).unwrap()).unwrap();
    assert_eq!(parsed.config, m1.config);
    assert_eq!(parsed.analysis, m1.analysis);
    // The manifest alone reproduces the run.
    let again = execute(&parsed.config, GateSet::shared(), 1.0, Vec::new()).unwrap();
    assert_eq!(again.manifest.analysis, m1.analysis);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_errors_carry_field_paths() {
    let err = parse_config("master_seed = 1\nsequences_per_length = 10\n[t_noise]\nkind = \"gad\"\np = 2.0\ngamma = 0.1\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains("t_noise.p"), "{err}");
    assert!(parse_config("master_seed = 1\nsequences_per_length = 0\n").is_err());
}

#[test]
fn sweep_cell_reproduces_fig1a() {
    let gs = GateSet::shared();
    let opts = ScenarioOptions { scale: 0.02, seed: 77 };
    let fig1a = run_scenario(Scenario::Fig1a, &opts, gs).unwrap();
    let sweep = run_scenario(Scenario::SweepRotation, &opts, gs).unwrap();
    let want = fig1a.summary["estimate"]["f_t"].as_f64().unwrap();
    let cell = sweep.summary.as_array().unwrap().iter()
        .find(|c| c["clifford_param"] == 0.02 && c["t_param"] == 0.12)
        .unwrap();
    assert_eq!(cell["f_t_estimate"].as_f64().unwrap(), want);
}

#[test]
fn unknown_scenario_rejected() {
    assert!("fig9".parse::<Scenario>().is_err());
    for s in Scenario::ALL {
        assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
    }
}
