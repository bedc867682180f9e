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

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::Oracle;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tgrb_core::channel::{ptm_from_kraus, KrausChannel, PauliTransferMatrix};
use tgrb_core::engine::{sample_sequence, with_workers, GateNoise, RealizedSpam, SequenceKind, Simulator};
use tgrb_core::estimation::{fit_decay, median, std_dev, DecayPoint};
use tgrb_core::fidelity::avg_fidelity;
use tgrb_core::gates::{frame_potential, GateSet};
use tgrb_core::matrix::ComplexMatrix2;
use tgrb_core::noise::{NoiseModel, RandomUnitalParams};
use tgrb_core::scenario::{
    fig1_config, repeat_estimates, run_ensemble, run_scenario, Scenario, ScenarioOptions, DEFAULT_SEED,
    ENSEMBLE_SEQUENCES,
};
use tgrb_core::twirl::{clifford_pauli_twirl, clifford_twirl};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Random CPTP map from a Haar-ish isometry C² → C⁶ split into three Kraus operators.
fn random_cptp(rng: &mut ChaCha8Rng) -> PauliTransferMatrix {
    let g = DMatrix::<Complex64>::from_fn(6, 2, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let q = g.qr().q();
    let ops = (0..3)
        .map(|k| {
            ComplexMatrix2::new([
                [q[(2 * k, 0)], q[(2 * k, 1)]],
                [q[(2 * k + 1, 0)], q[(2 * k + 1, 1)]],
            ])
        })
        .collect();
    ptm_from_kraus(&KrausChannel::new(ops).unwrap())
}

fn criterion_1(gs: &GateSet) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_shape, mut worst_fid, mut worst_cp) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..500 {
        let e = random_cptp(&mut rng);
        assert!(e.is_trace_preserving());
        let tw = clifford_twirl(&e, gs);
        let dep = PauliTransferMatrix::depolarizing_contraction(tw.get(1, 1));
        worst_shape = worst_shape.max(tw.max_abs_diff(&dep));
        worst_fid = worst_fid.max((avg_fidelity(&tw).unwrap() - avg_fidelity(&e).unwrap()).abs());
        let [sx, sy, sz] = e.unital_diagonal();
        let want = (sx * sx + sy * sy + sz * sz) / 3.0;
        let cp = clifford_pauli_twirl(&e, gs);
        worst_cp = worst_cp.max((1..4).map(|i| (cp.get(i, i) - want).abs()).fold(0.0, f64::max));
    }
    check(
        worst_shape < 1e-12 && worst_fid < 1e-12 && worst_cp < 1e-10,
        format!("500 channels: depolarizing shape {worst_shape:.1e}, fidelity {worst_fid:.1e}, Clifford-Pauli diagonal {worst_cp:.1e}"),
    )
}

fn criterion_2(gs: &GateSet) -> Outcome {
    let cliffords = gs.clifford_unitaries();
    let t = gs.t_gate.unitary;
    let tc: Vec<_> = cliffords.iter().map(|c| t * *c).collect();
    let (fc, ftc, fp) = (frame_potential(&cliffords), frame_potential(&tc), frame_potential(&gs.pauli_unitaries()));
    check(
        (fc - 2.0).abs() < 1e-9 && (ftc - 2.0).abs() < 1e-9 && (fp - 4.0).abs() < 1e-9,
        format!("Clifford {fc:.9}, T·C {ftc:.9}, Pauli {fp:.9}"),
    )
}

fn criterion_3(gs: &GateSet) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let (c, t) = if i % 2 == 0 {
            (
                NoiseModel::RandomUnital(RandomUnitalParams::clifford_ensemble(rng.random())),
                NoiseModel::RandomUnital(RandomUnitalParams::t_ensemble(rng.random())),
            )
        } else {
            (
                NoiseModel::Gad { p: rng.random(), gamma: rng.random_range(0.0..0.2) },
                NoiseModel::Gad { p: rng.random(), gamma: rng.random_range(0.0..0.2) },
            )
        };
        let noise = GateNoise::new(c.realize().unwrap(), t.realize().unwrap());
        let sim = Simulator::new(&noise, &RealizedSpam::default(), gs);
        let kind = [SequenceKind::Reference, SequenceKind::Interleaved][(i / 2) % 2];
        let seq = sample_sequence(kind, rng.random_range(1..=5), gs, &mut rng);
        worst = worst.max((sim.survival(&seq) - Oracle::new(&c, &t).survival(&seq, gs)).abs());
    }
    check(worst < 1e-12, format!("1000 sequences, max deviation {worst:.1e}"))
}

fn summary_value(out: &serde_json::Value, section: &str, key: &str) -> f64 {
    out[section][key].as_f64().unwrap_or_else(|| panic!("{section}.{key} missing"))
}

fn criterion_4(gs: &GateSet) -> Outcome {
    let fig1a = &run_scenario(Scenario::Fig1a, &ScenarioOptions::default(), gs).map_err(|e| e.to_string())?.summary;
    let est = summary_value(fig1a, "estimate", "f_t");
    let bound = summary_value(fig1a, "estimate", "bound");
    let actual = summary_value(fig1a, "actual", "f_t");
    let err = (est - actual).abs();
    check(
        (actual - 0.99760).abs() < 5e-6 && err <= 0.0015 && err <= bound,
        format!("estimate {est:.5}, actual {actual:.5}, |error| {err:.5}, bound {bound:.5}"),
    )
}

fn criterion_5(gs: &GateSet) -> Outcome {
    let opts = ScenarioOptions::default();
    let c = run_scenario(Scenario::Fig1c, &opts, gs).map_err(|e| e.to_string())?.summary;
    let b = run_scenario(Scenario::Fig1b, &opts, gs).map_err(|e| e.to_string())?.summary;
    let (c_fc, c_ft) = (summary_value(&c, "estimate", "f_clifford"), summary_value(&c, "estimate", "f_t"));
    let (c_ac, c_at) = (summary_value(&c, "actual", "f_clifford"), summary_value(&c, "actual", "f_t"));
    let (b_ft, b_at) = (summary_value(&b, "estimate", "f_t"), summary_value(&b, "actual", "f_t"));
    let ok = (c_ac - 0.99666).abs() < 5e-6
        && (c_at - 0.98660).abs() < 5e-6
        && (c_fc - c_ac).abs() <= 0.001
        && (c_ft - c_at).abs() <= 0.003
        && (b_ft - b_at).abs() <= 0.003;
    check(
        ok,
        format!(
            "fig1c Clifford {c_fc:.5} vs {c_ac:.5}, T {c_ft:.5} vs {c_at:.5}; fig1b T {b_ft:.5} vs {b_at:.5}"
        ),
    )
}

fn criterion_6(gs: &GateSet) -> Outcome {
    let cfg = fig1_config(Scenario::Fig1a, &ScenarioOptions::default()).map_err(|e| e.to_string())?;
    let est: Vec<f64> = repeat_estimates(&cfg, 100, gs)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|e| e.f_t)
        .collect();
    let (sd, med) = (std_dev(&est), median(&est));
    check(
        sd <= 0.0005 && (med - 0.9972).abs() <= 0.001,
        format!("100 repetitions: std {sd:.5}, median {med:.5}"),
    )
}

fn criterion_7(gs: &GateSet) -> Outcome {
    let (_, s) = run_ensemble(DEFAULT_SEED, 100, ENSEMBLE_SEQUENCES, gs).map_err(|e| e.to_string())?;
    check(
        s.fraction_within_bound >= 0.95 && s.indistinguishable(),
        format!(
            "within bound {:.2}, median difference {:.2e} vs 2·SE {:.2e}",
            s.fraction_within_bound,
            s.median_difference,
            2.0 * s.median_difference_stderr
        ),
    )
}

fn criterion_8() -> Outcome {
    let (a, p, b): (f64, f64, f64) = (0.43, 0.987, 0.51);
    let points: Vec<DecayPoint> = (0..25)
        .map(|i| {
            let n = 1 + 2 * i;
            DecayPoint::new(n, a * p.powi(n as i32) + b, 100)
        })
        .collect();
    let fit = fit_decay(&points).map_err(|e| e.to_string())?;
    let worst = [(fit.a - a).abs(), (fit.p - p).abs(), (fit.b - b).abs()].into_iter().fold(0.0, f64::max);
    let flat: Vec<DecayPoint> = points.iter().map(|pt| DecayPoint::new(pt.n, 0.93, 100)).collect();
    let degenerate = fit_decay(&flat).map_err(|e| e.to_string())?;
    check(
        worst < 1e-8 && fit.p_identifiable && !degenerate.p_identifiable,
        format!(
            "max parameter error {worst:.1e}; flat input p_identifiable = {}",
            degenerate.p_identifiable
        ),
    )
}

fn without_wall_time(files: &BTreeMap<String, Vec<u8>>) -> BTreeMap<String, Vec<u8>> {
    files
        .iter()
        .map(|(name, bytes)| {
            let mut v: serde_json::Value = if name.ends_with(".json") {
                serde_json::from_slice(bytes).unwrap()
            } else {
                return (name.clone(), bytes.clone());
            };
            v.as_object_mut().unwrap().remove("wall_time_s");
            (name.clone(), serde_json::to_vec(&v).unwrap())
        })
        .collect()
}

fn criterion_9(gs: &GateSet) -> Outcome {
    let cases = [
        (Scenario::Fig1a, ScenarioOptions::default()),
        (Scenario::SweepGad, ScenarioOptions { scale: 0.05, seed: 11 }),
        (Scenario::RandomEnsemble, ScenarioOptions { scale: 0.005, seed: 12 }),
    ];
    for (s, opts) in cases {
        let one = with_workers(1, || run_scenario(s, &opts, gs)).unwrap();
        let eight = with_workers(8, || run_scenario(s, &opts, gs)).unwrap();
        if without_wall_time(&one.files) != without_wall_time(&eight.files) {
            return Err(format!("{} differs between 1 and 8 workers", s.name()));
        }
    }
    Ok("fig1a, sweep-gad and random-ensemble outputs identical at 1 and 8 workers (wall time excluded)".into())
}

fn run(n: usize, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    match &outcome {
        Ok(d) => println!("PASS criterion {n}: {d} [{secs:.1}s]"),
        Err(d) => println!("FAIL criterion {n}: {d} [{secs:.1}s]"),
    }
    outcome.is_ok()
}

fn main() {
    let gs = GateSet::shared();
    let ok = [
        run(1, || criterion_1(gs)),
        run(2, || criterion_2(gs)),
        run(3, || criterion_3(gs)),
        run(4, || criterion_4(gs)),
        run(5, || criterion_5(gs)),
        run(6, || criterion_6(gs)),
        run(7, || criterion_7(gs)),
        run(8, criterion_8),
        run(9, || criterion_9(gs)),
    ];
    let passed = ok.iter().filter(|&&x| x).count();
    println!("acceptance: {passed}/{} criteria passed", ok.len());
    if passed != ok.len() {
        std::process::exit(1);
    }
}
