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

//! Named experiment presets and their aggregate outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{ExperimentConfig, SequenceKind};
use crate::error::{Error, Result};
use crate::estimation::{interleaved_bound, median, tukey_summary, std_dev, FidelityEstimate, TukeySummary};
use crate::fidelity::avg_fidelity;
use crate::gates::GateSet;
use crate::noise::{NoiseModel, RandomUnitalParams};
use crate::runner::{execute, output_files, ActualValues, TOOLKIT_VERSION};

pub const DEFAULT_SEED: u64 = 2026;
pub const FIG2_REPETITIONS: usize = 100;
pub const ENSEMBLE_CHANNELS: usize = 1000;
pub const ENSEMBLE_SEQUENCES: usize = 4000;
/// Replicates for the standard error of the ensemble median difference.
pub const ENSEMBLE_BOOTSTRAP: usize = 1000;
const ENSEMBLE_DOMAIN: u64 = 0xe45e_4b1e_0000_0001;

pub const ROTATION_GRID_CLIFFORD: [f64; 4] = [0.01, 0.02, 0.04, 0.08];
pub const ROTATION_GRID_T: [f64; 4] = [0.06, 0.12, 0.18, 0.24];
pub const GAD_GRID_CLIFFORD: [f64; 4] = [0.005, 0.01, 0.02, 0.04];
pub const GAD_GRID_T: [f64; 4] = [0.02, 0.04, 0.08, 0.12];
pub const GAD_P_CLIFFORD: f64 = 0.995;
pub const GAD_P_T: f64 = 0.99;

const LENGTH_NOTE: &str = "lengths: n = 2..98 step 4 Clifford-Pauli pairs (default grid)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig2,
    SweepRotation,
    SweepGad,
    RandomEnsemble,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Fig1a,
        Scenario::Fig1b,
        Scenario::Fig1c,
        Scenario::Fig2,
        Scenario::SweepRotation,
        Scenario::SweepGad,
        Scenario::RandomEnsemble,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig1a => "fig1a",
            Scenario::Fig1b => "fig1b",
            Scenario::Fig1c => "fig1c",
            Scenario::Fig2 => "fig2",
            Scenario::SweepRotation => "sweep-rotation",
            Scenario::SweepGad => "sweep-gad",
            Scenario::RandomEnsemble => "random-ensemble",
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioOptions {
    /// Multiplies sequence counts; for random-ensemble it multiplies the
    /// channel count instead.
    pub scale: f64,
    pub seed: u64,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            scale: 1.0,
            seed: DEFAULT_SEED,
        }
    }
}

impl ScenarioOptions {
    fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::invalid("scale", "must be a positive finite number"));
        }
        Ok(())
    }

    fn scaled(&self, count: usize) -> usize {
        ((count as f64 * self.scale).round() as usize).max(1)
    }
}

/// In-memory scenario artifacts keyed by file name.
#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub scenario: Scenario,
    pub files: BTreeMap<String, Vec<u8>>,
    pub summary: serde_json::Value,
}

#[derive(Debug, Serialize)]
struct ScenarioManifest<'a> {
    scenario: &'a str,
    toolkit_version: &'a str,
    master_seed: u64,
    scale: f64,
    notes: Vec<String>,
    summary: &'a serde_json::Value,
}

/// Clifford and T noise of a fig1 preset.
pub fn fig1_noise(s: Scenario) -> Option<(NoiseModel, NoiseModel)> {
    match s {
        Scenario::Fig1a => Some((NoiseModel::rotation_x(0.02), NoiseModel::rotation_x(0.12))),
        Scenario::Fig1b => Some((
            NoiseModel::depolarizing_then_rotation(0.01, 0.01),
            NoiseModel::depolarizing_then_rotation(0.02, 0.05),
        )),
        Scenario::Fig1c => Some((
            NoiseModel::Gad { p: GAD_P_CLIFFORD, gamma: 0.01 },
            NoiseModel::Gad { p: GAD_P_T, gamma: 0.04 },
        )),
        _ => None,
    }
}

fn fig1_sequences(s: Scenario) -> usize {
    if s == Scenario::Fig1a {
        2000
    } else {
        1000
    }
}

/// Config of a fig1 preset at the given seed and scale.
pub fn fig1_config(s: Scenario, opts: &ScenarioOptions) -> Result<ExperimentConfig> {
    let (c, t) = fig1_noise(s).ok_or_else(|| Error::invalid("scenario", format!("{} is not a fig1 panel", s.name())))?;
    Ok(ExperimentConfig::new(opts.seed, opts.scaled(fig1_sequences(s)), c, t))
}

fn fig1_notes(s: Scenario) -> Vec<String> {
    let mut notes = vec![LENGTH_NOTE.to_string()];
    if s == Scenario::Fig1b {
        notes.push(
            "depolarizing strength follows rho -> (1-p) rho + p I/2, applied before the half-angle rotation; \
             actual fidelities are computed from these channels"
                .to_string(),
        );
    }
    notes
}

/// Repeats a config `reps` times with seeds seed, seed+1, …; returns the
/// interleaved estimates. Bootstrapping is skipped.
pub fn repeat_estimates(base: &ExperimentConfig, reps: usize, gs: &GateSet) -> Result<Vec<FidelityEstimate>> {
    (0..reps as u64)
        .map(|r| {
            let mut cfg = base.clone();
            cfg.master_seed = base.master_seed.wrapping_add(r);
            cfg.bootstrap_replicates = 0;
            let out = execute(&cfg, gs, 1.0, Vec::new())?;
            out.manifest
                .analysis
                .estimate
                .ok_or_else(|| Error::invalid("kinds", "reference and interleaved are both required"))
        })
        .collect()
}

pub fn run_scenario(s: Scenario, opts: &ScenarioOptions, gs: &GateSet) -> Result<ScenarioOutput> {
    opts.validate()?;
    match s {
        Scenario::Fig1a | Scenario::Fig1b | Scenario::Fig1c => {
            let mut cfg = fig1_config(s, opts)?;
            cfg.bootstrap_replicates = 200;
            let out = execute(&cfg, gs, opts.scale, fig1_notes(s))?;
            let summary = serde_json::json!({
                "estimate": out.manifest.analysis.estimate,
                "actual": out.manifest.actual,
            });
            Ok(ScenarioOutput {
                scenario: s,
                files: output_files(&out),
                summary,
            })
        }
        Scenario::Fig2 => fig2(opts, gs),
        Scenario::SweepRotation => sweep(s, opts, gs),
        Scenario::SweepGad => sweep(s, opts, gs),
        Scenario::RandomEnsemble => random_ensemble(opts, gs),
    }
}

fn finish(s: Scenario, opts: &ScenarioOptions, notes: Vec<String>, summary: serde_json::Value, mut files: BTreeMap<String, Vec<u8>>) -> ScenarioOutput {
    let manifest = ScenarioManifest {
        scenario: s.name(),
        toolkit_version: TOOLKIT_VERSION,
        master_seed: opts.seed,
        scale: opts.scale,
        notes,
        summary: &summary,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    files.insert("manifest.json".to_string(), json.into_bytes());
    ScenarioOutput {
        scenario: s,
        files,
        summary,
    }
}

#[derive(Debug, Clone, Serialize)]
struct Fig2Panel {
    actual_f_t: f64,
    actual_f_clifford: f64,
    f_t: TukeySummary,
    f_t_std: f64,
    f_clifford: TukeySummary,
    f_clifford_std: f64,
}

fn fig2(opts: &ScenarioOptions, gs: &GateSet) -> Result<ScenarioOutput> {
    let mut csv = String::from("scenario,repetition,master_seed,p_ref,p_T,f_t,bound,f_clifford\n");
    let mut panels = BTreeMap::new();
    for panel in [Scenario::Fig1a, Scenario::Fig1b, Scenario::Fig1c] {
        let cfg = fig1_config(panel, opts)?;
        let est = repeat_estimates(&cfg, FIG2_REPETITIONS, gs)?;
        for (r, e) in est.iter().enumerate() {
            writeln!(
                csv,
                "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                panel.name(),
                r,
                cfg.master_seed.wrapping_add(r as u64),
                e.p_ref,
                e.p_t,
                e.f_t,
                e.bound,
                e.f_clifford
            )
            .unwrap();
        }
        let actual = ActualValues::compute(&cfg, gs)?;
        let f_t: Vec<f64> = est.iter().map(|e| e.f_t).collect();
        let f_c: Vec<f64> = est.iter().map(|e| e.f_clifford).collect();
        panels.insert(
            panel.name(),
            Fig2Panel {
                actual_f_t: actual.f_t,
                actual_f_clifford: actual.f_clifford,
                f_t: tukey_summary(&f_t),
                f_t_std: std_dev(&f_t),
                f_clifford: tukey_summary(&f_c),
                f_clifford_std: std_dev(&f_c),
            },
        );
    }
    let summary = serde_json::to_value(&panels)?;
    let mut files = BTreeMap::new();
    files.insert("fig2_estimates.csv".to_string(), csv.into_bytes());
    let notes = vec![
        LENGTH_NOTE.to_string(),
        format!("{FIG2_REPETITIONS} repetitions per panel with seeds master_seed + r"),
    ];
    Ok(finish(Scenario::Fig2, opts, notes, summary, files))
}

fn sweep(s: Scenario, opts: &ScenarioOptions, gs: &GateSet) -> Result<ScenarioOutput> {
    let (grid_c, grid_t, sequences): (&[f64], &[f64], usize) = match s {
        Scenario::SweepRotation => (&ROTATION_GRID_CLIFFORD, &ROTATION_GRID_T, 2000),
        _ => (&GAD_GRID_CLIFFORD, &GAD_GRID_T, 1000),
    };
    let model = |clifford: bool, x: f64| match s {
        Scenario::SweepRotation => NoiseModel::rotation_x(x),
        _ => NoiseModel::Gad {
            p: if clifford { GAD_P_CLIFFORD } else { GAD_P_T },
            gamma: x,
        },
    };
    let mut csv = String::from(
        "clifford_param,t_param,f_clifford_actual,f_t_actual,f_clifford_estimate,f_t_estimate,error,bound,bound_actual,within_bound\n",
    );
    let mut cells = Vec::new();
    for &c in grid_c {
        for &t in grid_t {
            let mut cfg = ExperimentConfig::new(opts.seed, opts.scaled(sequences), model(true, c), model(false, t));
            cfg.bootstrap_replicates = 0;
            let out = execute(&cfg, gs, opts.scale, Vec::new())?;
            let e = out.manifest.analysis.estimate.expect("reference and interleaved configured");
            let actual = &out.manifest.actual;
            let error = e.f_t - actual.f_t;
            let bound_actual = interleaved_bound(actual.f_clifford, actual.f_t, 2);
            writeln!(
                csv,
                "{c},{t},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                actual.f_clifford,
                actual.f_t,
                e.f_clifford,
                e.f_t,
                error,
                e.bound,
                bound_actual,
                error.abs() <= e.bound
            )
            .unwrap();
            cells.push(serde_json::json!({
                "clifford_param": c, "t_param": t, "f_t_actual": actual.f_t,
                "f_t_estimate": e.f_t, "error": error, "bound": e.bound, "bound_actual": bound_actual,
            }));
        }
    }
    let name = if s == Scenario::SweepRotation { "sweep_rotation.csv" } else { "sweep_gad.csv" };
    let mut files = BTreeMap::new();
    files.insert(name.to_string(), csv.into_bytes());
    let mut notes = vec![LENGTH_NOTE.to_string()];
    if s == Scenario::SweepGad {
        notes.push(format!("GAD populations fixed at p = {GAD_P_CLIFFORD} (Clifford) and {GAD_P_T} (T); gamma varied"));
    } else {
        notes.push("x-axis over-rotation angles in radians".to_string());
    }
    Ok(finish(s, opts, notes, serde_json::Value::Array(cells), files))
}

/// Per-channel outcome of the random-channel ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRow {
    pub channel: usize,
    pub f_clifford_actual: f64,
    pub f_t_actual: f64,
    pub standard_f_clifford: f64,
    pub reference_f_clifford: f64,
    pub f_t: f64,
    pub bound: f64,
}

impl EnsembleRow {
    pub fn rel_error_standard(&self) -> f64 {
        (self.standard_f_clifford - self.f_clifford_actual) / self.f_clifford_actual
    }

    pub fn rel_error_reference(&self) -> f64 {
        (self.reference_f_clifford - self.f_clifford_actual) / self.f_clifford_actual
    }

    pub fn rel_error_t(&self) -> f64 {
        (self.f_t - self.f_t_actual) / self.f_t_actual
    }

    pub fn within_bound(&self) -> bool {
        (self.f_t - self.f_t_actual).abs() <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub channels: usize,
    pub rel_error_standard: TukeySummary,
    pub rel_error_reference: TukeySummary,
    pub rel_error_t: TukeySummary,
    pub fraction_within_bound: f64,
    /// median(standard) − median(reference) relative errors.
    pub median_difference: f64,
    pub median_difference_stderr: f64,
}

impl EnsembleSummary {
    pub fn indistinguishable(&self) -> bool {
        self.median_difference.abs() < 2.0 * self.median_difference_stderr
    }
}

/// Config for channel `i` of the random ensemble.
pub fn ensemble_config(seed: u64, channel: usize, sequences: usize) -> ExperimentConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ENSEMBLE_DOMAIN);
    rng.set_stream(channel as u64);
    let c = NoiseModel::RandomUnital(RandomUnitalParams::clifford_ensemble(rng.next_u64()));
    let t = NoiseModel::RandomUnital(RandomUnitalParams::t_ensemble(rng.next_u64()));
    let mut cfg = ExperimentConfig::new(rng.next_u64(), sequences, c, t);
    cfg.kinds = SequenceKind::ALL.to_vec();
    cfg.bootstrap_replicates = 0;
    cfg
}

pub fn ensemble_row(channel: usize, cfg: &ExperimentConfig, gs: &GateSet) -> Result<EnsembleRow> {
    let out = execute(cfg, gs, 1.0, Vec::new())?;
    let a = &out.manifest.analysis;
    let e = a.estimate.expect("reference and interleaved configured");
    let noise = cfg.gate_noise()?;
    Ok(EnsembleRow {
        channel,
        f_clifford_actual: avg_fidelity(&noise.clifford)?,
        f_t_actual: avg_fidelity(&noise.t)?,
        standard_f_clifford: a.standard_f_clifford.expect("standard configured"),
        reference_f_clifford: e.f_clifford,
        f_t: e.f_t,
        bound: e.bound,
    })
}

pub fn summarize_ensemble(rows: &[EnsembleRow], seed: u64) -> EnsembleSummary {
    let std: Vec<f64> = rows.iter().map(EnsembleRow::rel_error_standard).collect();
    let cp: Vec<f64> = rows.iter().map(EnsembleRow::rel_error_reference).collect();
    let t: Vec<f64> = rows.iter().map(EnsembleRow::rel_error_t).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ENSEMBLE_DOMAIN);
    rng.set_stream(u64::MAX);
    let draw = |v: &[f64], rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..v.len()).map(|_| v[rand::Rng::random_range(rng, 0..v.len())]).collect()
    };
    let diffs: Vec<f64> = (0..ENSEMBLE_BOOTSTRAP)
        .map(|_| {
            let a = draw(&std, &mut rng);
            let b = draw(&cp, &mut rng);
            median(&a) - median(&b)
        })
        .collect();
    EnsembleSummary {
        channels: rows.len(),
        rel_error_standard: tukey_summary(&std),
        rel_error_reference: tukey_summary(&cp),
        rel_error_t: tukey_summary(&t),
        fraction_within_bound: rows.iter().filter(|r| r.within_bound()).count() as f64 / rows.len() as f64,
        median_difference: median(&std) - median(&cp),
        median_difference_stderr: std_dev(&diffs),
    }
}

/// Random-channel ensemble with `channels` channel pairs.
pub fn run_ensemble(seed: u64, channels: usize, sequences: usize, gs: &GateSet) -> Result<(Vec<EnsembleRow>, EnsembleSummary)> {
    let rows = (0..channels)
        .map(|i| ensemble_row(i, &ensemble_config(seed, i, sequences), gs))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize_ensemble(&rows, seed);
    Ok((rows, summary))
}

fn random_ensemble(opts: &ScenarioOptions, gs: &GateSet) -> Result<ScenarioOutput> {
    let channels = opts.scaled(ENSEMBLE_CHANNELS);
    let (rows, summary) = run_ensemble(opts.seed, channels, ENSEMBLE_SEQUENCES, gs)?;
    let mut csv = String::from(
        "channel,f_clifford_actual,f_t_actual,standard_f_clifford,reference_f_clifford,f_t,bound,rel_error_standard,rel_error_reference,rel_error_t\n",
    );
    for r in &rows {
        writeln!(
            csv,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.channel,
            r.f_clifford_actual,
            r.f_t_actual,
            r.standard_f_clifford,
            r.reference_f_clifford,
            r.f_t,
            r.bound,
            r.rel_error_standard(),
            r.rel_error_reference(),
            r.rel_error_t()
        )
        .unwrap();
    }
    let mut files = BTreeMap::new();
    files.insert("ensemble.csv".to_string(), csv.into_bytes());
    let notes = vec![
        LENGTH_NOTE.to_string(),
        format!("{channels} channel pairs, {ENSEMBLE_SEQUENCES} sequences per length; scale multiplies the channel count"),
    ];
    Ok(finish(Scenario::RandomEnsemble, opts, notes, serde_json::to_value(&summary)?, files))
}
