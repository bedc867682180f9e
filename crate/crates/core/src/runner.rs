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

//! Fits, bootstrap errors and the run manifest for one experiment.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{analytic_decay, run_experiment, ExperimentConfig, SequenceKind, ShotRecord};
use crate::error::{Error, Result};
use crate::estimation::{
    decay_points, estimate_t_fidelity, fit_decay, fit_decays_shared_asymptote, resample, std_dev, DecayFit,
    DecayPoint, FidelityEstimate, LengthSamples,
};
use crate::fidelity::{avg_fidelity, fidelity_from_contraction};
use crate::gates::GateSet;
use crate::records::{length_samples, to_csv_string};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
const DIM: usize = 2;
/// Keeps bootstrap streams apart from the sequence streams of the same seed.
const BOOTSTRAP_DOMAIN: u64 = 0xb007_57a9_0000_0001;

/// Ground truth computed from the configured channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActualValues {
    pub f_clifford: f64,
    pub f_t: f64,
    /// Exact per-pair decay of each configured sequence kind.
    pub decay: BTreeMap<SequenceKind, f64>,
}

impl ActualValues {
    pub fn compute(cfg: &ExperimentConfig, gs: &GateSet) -> Result<Self> {
        let noise = cfg.gate_noise()?;
        Ok(Self {
            f_clifford: avg_fidelity(&noise.clifford)?,
            f_t: avg_fidelity(&noise.t)?,
            decay: cfg.kinds.iter().map(|&k| (k, analytic_decay(k, &noise, gs))).collect(),
        })
    }
}

/// Standard errors from resampling sequences within each length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub replicates: usize,
    pub failed: usize,
    pub p_stderr: BTreeMap<SequenceKind, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_t_stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub survival_means: BTreeMap<SequenceKind, Vec<DecayPoint>>,
    /// Joint fits sharing one asymptote B; these feed every estimate.
    pub fits: BTreeMap<SequenceKind, DecayFit>,
    /// Each kind fitted on its own, for comparison.
    pub independent_fits: BTreeMap<SequenceKind, DecayFit>,
    /// Interleaved estimate; present when both reference and interleaved ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<FidelityEstimate>,
    /// Clifford fidelity from conventional RB; present when standard ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standard_f_clifford: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub toolkit_version: String,
    pub master_seed: u64,
    pub scale: f64,
    pub config: ExperimentConfig,
    #[serde(flatten)]
    pub analysis: Analysis,
    pub actual: ActualValues,
    pub notes: Vec<String>,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }
}

fn estimates_from(fits: &BTreeMap<SequenceKind, DecayFit>) -> (Option<FidelityEstimate>, Option<f64>) {
    let estimate = match (fits.get(&SequenceKind::Reference), fits.get(&SequenceKind::Interleaved)) {
        (Some(r), Some(t)) => Some(estimate_t_fidelity(r.per_gate_p, t.per_gate_p, DIM)),
        _ => None,
    };
    let standard = fits
        .get(&SequenceKind::Standard)
        .map(|s| fidelity_from_contraction(s.per_gate_p, DIM));
    (estimate, standard)
}

/// Joint fit of every kind with a shared asymptote.
fn fit_all(samples: &BTreeMap<SequenceKind, Vec<LengthSamples>>) -> Result<BTreeMap<SequenceKind, DecayFit>> {
    let points: Vec<Vec<DecayPoint>> = samples.values().map(|s| decay_points(s)).collect();
    let sets: Vec<&[DecayPoint]> = points.iter().map(Vec::as_slice).collect();
    let fits = fit_decays_shared_asymptote(&sets)?;
    Ok(samples.keys().copied().zip(fits).collect())
}

/// Fits every configured kind and, if requested, bootstraps standard errors.
pub fn analyze(cfg: &ExperimentConfig, records: &[ShotRecord]) -> Result<Analysis> {
    let samples: BTreeMap<SequenceKind, Vec<LengthSamples>> =
        cfg.kinds.iter().map(|&k| (k, length_samples(records, k))).collect();
    let survival_means: BTreeMap<SequenceKind, Vec<DecayPoint>> =
        samples.iter().map(|(&k, s)| (k, decay_points(s))).collect();
    let fits = fit_all(&samples)?;
    let independent_fits = survival_means
        .iter()
        .map(|(&k, pts)| Ok((k, fit_decay(pts)?)))
        .collect::<Result<_>>()?;
    let (estimate, standard_f_clifford) = estimates_from(&fits);
    let bootstrap = (cfg.bootstrap_replicates > 0).then(|| bootstrap(cfg, &samples));
    Ok(Analysis {
        survival_means,
        fits,
        independent_fits,
        estimate,
        standard_f_clifford,
        bootstrap,
    })
}

fn bootstrap(cfg: &ExperimentConfig, samples: &BTreeMap<SequenceKind, Vec<LengthSamples>>) -> BootstrapSummary {
    let reps: Vec<Option<BTreeMap<SequenceKind, DecayFit>>> = (0..cfg.bootstrap_replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed ^ BOOTSTRAP_DOMAIN);
            rng.set_stream(r);
            let drawn: BTreeMap<SequenceKind, Vec<LengthSamples>> =
                samples.iter().map(|(&k, s)| (k, resample(s, &mut rng))).collect();
            fit_all(&drawn).ok()
        })
        .collect();
    let ok: Vec<&BTreeMap<SequenceKind, DecayFit>> = reps.iter().flatten().collect();
    let p_stderr = samples
        .keys()
        .map(|k| (*k, std_dev(&ok.iter().map(|f| f[k].p).collect::<Vec<_>>())))
        .collect();
    let f_ts: Vec<f64> = ok.iter().filter_map(|f| estimates_from(f).0).map(|e| e.f_t).collect();
    BootstrapSummary {
        replicates: cfg.bootstrap_replicates,
        failed: reps.len() - ok.len(),
        p_stderr,
        f_t_stderr: (!f_ts.is_empty()).then(|| std_dev(&f_ts)),
    }
}

/// Everything a run produces, held in memory.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub manifest: RunManifest,
    pub records: Vec<ShotRecord>,
}

/// Runs, fits and assembles the manifest for one configuration.
pub fn execute(cfg: &ExperimentConfig, gs: &GateSet, scale: f64, notes: Vec<String>) -> Result<RunOutput> {
    let start = Instant::now();
    let records = run_experiment(cfg, gs)?;
    let analysis = analyze(cfg, &records)?;
    let actual = ActualValues::compute(cfg, gs)?;
    let manifest = RunManifest {
        toolkit_version: TOOLKIT_VERSION.to_string(),
        master_seed: cfg.master_seed,
        scale,
        config: cfg.clone(),
        analysis,
        actual,
        notes,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(RunOutput { manifest, records })
}

/// Decay-curve CSV: n, mean, stderr, fitted value; 17 significant digits.
pub fn decay_csv(points: &[DecayPoint], fit: &DecayFit) -> String {
    let mut s = String::from("n,mean,stderr,fit\n");
    for p in points {
        writeln!(s, "{},{:.16e},{:.16e},{:.16e}", p.n, p.mean, p.stderr, fit.value_at(p.n)).unwrap();
    }
    s
}

/// File name to contents for every artifact of a run.
pub fn output_files(out: &RunOutput) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    files.insert("shots.csv".to_string(), to_csv_string(&out.records).into_bytes());
    let a = &out.manifest.analysis;
    for (kind, fit) in &a.fits {
        files.insert(format!("decay_{kind}.csv"), decay_csv(&a.survival_means[kind], fit).into_bytes());
    }
    files.insert("manifest.json".to_string(), out.manifest.to_json().into_bytes());
    files
}

pub fn write_files(dir: &Path, files: &BTreeMap<String, Vec<u8>>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, bytes) in files {
        std::fs::write(dir.join(name), bytes)?;
    }
    Ok(())
}

/// Loads a config file, runs it and writes shots, decay curves and manifest
/// into `out_dir`.
pub fn run_from_config(path: &Path, out_dir: &Path) -> Result<RunManifest> {
    let cfg = crate::config::load_config(path)?;
    let out = execute(&cfg, GateSet::shared(), 1.0, Vec::new())?;
    write_files(out_dir, &output_files(&out))?;
    Ok(out.manifest)
}

/// Parses a manifest JSON document.
pub fn parse_manifest(text: &str) -> Result<RunManifest> {
    let m: RunManifest = serde_json::from_str(text)?;
    m.config.validate().map_err(|e| Error::Records(format!("manifest config: {e}")))?;
    Ok(m)
}
