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

//! Benchmarking sequences, their noisy execution, and the seeded experiment
//! runner.
//!
//! Every gate is executed as noise-then-ideal-gate. A reference block is
//! (Pauli, Clifford); an interleaved block is (T, Pauli, T, Clifford); a
//! standard-RB block is two independent Cliffords. The final inverting gate
//! carries Clifford noise like any other gate.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{PauliStateVector, PauliTransferMatrix};
use crate::error::{Error, Result};
use crate::gates::{GateSet, CLIFFORD_IDENTITY, NUM_CLIFFORDS, NUM_PAULIS};
use crate::noise::NoiseModel;
use crate::twirl::pauli_twirl;

/// Largest admissible pair count; keeps stream identifiers collision free.
pub const MAX_PAIRS: usize = (1 << 30) - 1;

/// Tolerance for clamping survival probabilities into [0, 1].
pub const SURVIVAL_CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    /// Clifford⊕Pauli reference sequence.
    Reference,
    /// Reference sequence with T gates interleaved around each Pauli.
    Interleaved,
    /// Conventional Clifford-only randomized benchmarking (two Cliffords per block).
    Standard,
}

impl SequenceKind {
    pub const ALL: [SequenceKind; 3] = [SequenceKind::Reference, SequenceKind::Interleaved, SequenceKind::Standard];

    pub fn as_str(self) -> &'static str {
        match self {
            SequenceKind::Reference => "reference",
            SequenceKind::Interleaved => "interleaved",
            SequenceKind::Standard => "standard",
        }
    }

    fn code(self) -> u64 {
        match self {
            SequenceKind::Reference => 0,
            SequenceKind::Interleaved => 1,
            SequenceKind::Standard => 2,
        }
    }
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SequenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference" => Ok(SequenceKind::Reference),
            "interleaved" => Ok(SequenceKind::Interleaved),
            "standard" => Ok(SequenceKind::Standard),
            other => Err(Error::invalid("kind", format!("unknown sequence kind `{other}`"))),
        }
    }
}

/// A sampled benchmarking word plus the Clifford that inverts it.
///
/// For `Reference`/`Interleaved`, `j` and `p` both have `n` entries and block
/// k applies Pauli `p[k]` (wrapped in T gates when interleaved) and then
/// Clifford `j[k]`. For `Standard`, `j` holds `2n` Cliffords and `p` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    pub n: usize,
    pub j: Vec<u8>,
    pub p: Vec<u8>,
    pub inverse: u8,
}

impl SequenceSpec {
    /// Builds a spec from explicit draws and synthesizes its inverse.
    pub fn from_draws(kind: SequenceKind, j: Vec<u8>, p: Vec<u8>, gs: &GateSet) -> Result<Self> {
        let n = match kind {
            SequenceKind::Standard => {
                if !j.len().is_multiple_of(2) || !p.is_empty() {
                    return Err(Error::invalid("sequence", "standard words need 2n Cliffords and no Paulis"));
                }
                j.len() / 2
            }
            _ => {
                if j.len() != p.len() {
                    return Err(Error::invalid("sequence", "j and p must have equal length"));
                }
                j.len()
            }
        };
        if j.iter().any(|&c| c as usize >= NUM_CLIFFORDS) || p.iter().any(|&q| q as usize >= NUM_PAULIS) {
            return Err(Error::invalid("sequence", "gate index out of range"));
        }
        let mut spec = Self {
            kind,
            n,
            j,
            p,
            inverse: 0,
        };
        spec.inverse = gs.inv(ideal_word_index(&spec, gs)) as u8;
        Ok(spec)
    }
}

/// Clifford index of the ideal word (without the inverse), by table folding.
pub fn ideal_word_index(seq: &SequenceSpec, gs: &GateSet) -> usize {
    match seq.kind {
        SequenceKind::Reference => seq.j.iter().zip(&seq.p).fold(CLIFFORD_IDENTITY, |acc, (&j, &p)| {
            gs.mul(j as usize, gs.mul(gs.pauli_embed[p as usize], acc))
        }),
        SequenceKind::Interleaved => reduce_interleaved_word(seq, gs),
        SequenceKind::Standard => seq.j.iter().fold(CLIFFORD_IDENTITY, |acc, &j| gs.mul(j as usize, acc)),
    }
}

/// Clifford index of U_n·T·P_n·T ⋯ U_1·T·P_1·T, using T·P·T = C_t[P]·S so the
/// whole word is evaluated with table lookups only.
pub fn reduce_interleaved_word(seq: &SequenceSpec, gs: &GateSet) -> usize {
    seq.j.iter().zip(&seq.p).fold(CLIFFORD_IDENTITY, |acc, (&j, &p)| {
        gs.mul(j as usize, gs.mul(gs.interleaved_block(p as usize), acc))
    })
}

pub fn sample_sequence<R: Rng + ?Sized>(kind: SequenceKind, n: usize, gs: &GateSet, rng: &mut R) -> SequenceSpec {
    assert!(n >= 1, "sequences need at least one block");
    let (j, p): (Vec<u8>, Vec<u8>) = match kind {
        SequenceKind::Standard => ((0..2 * n).map(|_| rng.random_range(0..NUM_CLIFFORDS as u8)).collect(), Vec::new()),
        _ => (0..n)
            .map(|_| {
                (
                    rng.random_range(0..NUM_CLIFFORDS as u8),
                    rng.random_range(0..NUM_PAULIS as u8),
                )
            })
            .unzip(),
    };
    SequenceSpec::from_draws(kind, j, p, gs).expect("sampled indices are in range")
}

/// Noise channels attached to each gate class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateNoise {
    pub clifford: PauliTransferMatrix,
    pub pauli: PauliTransferMatrix,
    pub t: PauliTransferMatrix,
}

impl GateNoise {
    /// Paulis share the Clifford noise.
    pub fn new(clifford: PauliTransferMatrix, t: PauliTransferMatrix) -> Self {
        Self {
            clifford,
            pauli: clifford,
            t,
        }
    }

    pub fn noiseless() -> Self {
        Self::new(PauliTransferMatrix::identity(), PauliTransferMatrix::identity())
    }
}

/// State preparation and measurement description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpamSpec {
    #[serde(default = "PauliStateVector::zero_state")]
    pub initial_state: PauliStateVector,
    /// The POVM effect E in the same basis; survival is (E|ρ).
    #[serde(default = "PauliStateVector::zero_state")]
    pub povm_effect: PauliStateVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prep_noise: Option<NoiseModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meas_noise: Option<NoiseModel>,
}

impl Default for SpamSpec {
    fn default() -> Self {
        Self {
            initial_state: PauliStateVector::zero_state(),
            povm_effect: PauliStateVector::zero_state(),
            prep_noise: None,
            meas_noise: None,
        }
    }
}

impl SpamSpec {
    pub fn validate_at(&self, path: &str) -> Result<()> {
        let rho = &self.initial_state;
        if rho.0.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("{path}.initial_state"), "entries must be finite"));
        }
        if (rho.0[0] - std::f64::consts::FRAC_1_SQRT_2).abs() > 1e-9 {
            return Err(Error::invalid(format!("{path}.initial_state"), "must have unit trace (r0 = 1/√2)"));
        }
        let len = rho.bloch_length();
        if len > std::f64::consts::FRAC_1_SQRT_2 + 1e-9 {
            return Err(Error::invalid(format!("{path}.initial_state"), "Bloch vector longer than 1"));
        }
        if len < 1e-9 {
            return Err(Error::invalid(format!("{path}.initial_state"), "must not be maximally mixed"));
        }
        let e = &self.povm_effect;
        if e.0.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("{path}.povm_effect"), "entries must be finite"));
        }
        // Eigenvalues of (e0·𝟙 + e·σ)/√2.
        let lo = (e.0[0] - e.bloch_length()) * std::f64::consts::FRAC_1_SQRT_2;
        let hi = (e.0[0] + e.bloch_length()) * std::f64::consts::FRAC_1_SQRT_2;
        if lo < -1e-9 || hi > 1.0 + 1e-9 {
            return Err(Error::invalid(format!("{path}.povm_effect"), "eigenvalues must lie in [0, 1]"));
        }
        if let Some(m) = &self.prep_noise {
            m.validate_at(&format!("{path}.prep_noise"))?;
        }
        if let Some(m) = &self.meas_noise {
            m.validate_at(&format!("{path}.meas_noise"))?;
        }
        Ok(())
    }

    pub fn realize(&self) -> Result<RealizedSpam> {
        self.validate_at("spam")?;
        let prep = match &self.prep_noise {
            Some(m) => m.realize()?,
            None => PauliTransferMatrix::identity(),
        };
        let meas = match &self.meas_noise {
            Some(m) => m.realize()?,
            None => PauliTransferMatrix::identity(),
        };
        Ok(RealizedSpam {
            initial_state: prep.apply(&self.initial_state),
            effect: meas.transpose().apply(&self.povm_effect),
        })
    }
}

/// SPAM with preparation noise folded into the state and measurement noise
/// folded into the effect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizedSpam {
    pub initial_state: PauliStateVector,
    pub effect: PauliStateVector,
}

impl Default for RealizedSpam {
    fn default() -> Self {
        Self {
            initial_state: PauliStateVector::zero_state(),
            effect: PauliStateVector::zero_state(),
        }
    }
}

type Mat4 = [[f64; 4]; 4];

#[inline(always)]
fn matvec(m: &Mat4, v: &[f64; 4]) -> [f64; 4] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2] + m[0][3] * v[3],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2] + m[1][3] * v[3],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2] + m[2][3] * v[3],
        m[3][0] * v[0] + m[3][1] * v[1] + m[3][2] * v[2] + m[3][3] * v[3],
    ]
}

/// Precomputed noisy gate superoperators (ideal gate ∘ noise) for fast
/// propagation.
#[derive(Debug, Clone)]
pub struct Simulator<'g> {
    gs: &'g GateSet,
    cliffords: Vec<Mat4>,
    paulis: Vec<Mat4>,
    t: Mat4,
    spam: RealizedSpam,
}

impl<'g> Simulator<'g> {
    pub fn new(noise: &GateNoise, spam: &RealizedSpam, gs: &'g GateSet) -> Self {
        Self {
            gs,
            cliffords: gs.cliffords.iter().map(|c| c.ptm.compose(&noise.clifford).0).collect(),
            paulis: gs.paulis.iter().map(|p| p.ptm.compose(&noise.pauli).0).collect(),
            t: gs.t_gate.ptm.compose(&noise.t).0,
            spam: *spam,
        }
    }

    pub fn gate_set(&self) -> &'g GateSet {
        self.gs
    }

    /// Final state before measurement.
    pub fn final_state(&self, seq: &SequenceSpec) -> PauliStateVector {
        let mut r = self.spam.initial_state.0;
        match seq.kind {
            SequenceKind::Reference => {
                for (&j, &p) in seq.j.iter().zip(&seq.p) {
                    r = matvec(&self.paulis[p as usize], &r);
                    r = matvec(&self.cliffords[j as usize], &r);
                }
            }
            SequenceKind::Interleaved => {
                for (&j, &p) in seq.j.iter().zip(&seq.p) {
                    r = matvec(&self.t, &r);
                    r = matvec(&self.paulis[p as usize], &r);
                    r = matvec(&self.t, &r);
                    r = matvec(&self.cliffords[j as usize], &r);
                }
            }
            SequenceKind::Standard => {
                for &j in &seq.j {
                    r = matvec(&self.cliffords[j as usize], &r);
                }
            }
        }
        PauliStateVector(matvec(&self.cliffords[seq.inverse as usize], &r))
    }

    /// Survival probability (E|ρ_final), clamped into [0, 1].
    pub fn survival(&self, seq: &SequenceSpec) -> f64 {
        let q = self.spam.effect.dot(&self.final_state(seq));
        debug_assert!(
            (-SURVIVAL_CLAMP_TOL..=1.0 + SURVIVAL_CLAMP_TOL).contains(&q) || !q.is_finite(),
            "survival {q} outside [0,1]"
        );
        q.clamp(0.0, 1.0)
    }
}

pub fn simulate_survival(seq: &SequenceSpec, noise: &GateNoise, spam: &RealizedSpam, gs: &GateSet) -> f64 {
    Simulator::new(noise, spam, gs).survival(seq)
}

/// Exact per-block decay base of the sequence-averaged survival curve.
///
/// Reference: Tr_u(PauliTwirl(ℰ_C)·ℰ_P)/3. Interleaved: with
/// K_X = T†ℰ_X T·ℰ_t, Tr_u(T†·PauliTwirl(K_C)·T·K_P)/3. Standard: (Tr_u ℰ_C/3)².
pub fn analytic_decay(kind: SequenceKind, noise: &GateNoise, gs: &GateSet) -> f64 {
    let unital_trace = |m: &PauliTransferMatrix| m.trace() - m.get(0, 0);
    match kind {
        SequenceKind::Reference => unital_trace(&pauli_twirl(&noise.clifford, gs).compose(&noise.pauli)) / 3.0,
        SequenceKind::Interleaved => {
            let t = &gs.t_gate.ptm;
            let t_dag = t.transpose();
            let k_c = t_dag.compose(&noise.clifford).compose(t).compose(&noise.t);
            let k_p = t_dag.compose(&noise.pauli).compose(t).compose(&noise.t);
            let block = t_dag.compose(&pauli_twirl(&k_c, gs)).compose(t).compose(&k_p);
            unital_trace(&block) / 3.0
        }
        SequenceKind::Standard => (unital_trace(&noise.clifford) / 3.0).powi(2),
    }
}

fn default_lengths() -> Vec<usize> {
    default_length_grid()
}

/// Pair counts n = 2, 6, …, 98.
pub fn default_length_grid() -> Vec<usize> {
    (2..=100).step_by(4).collect()
}

fn default_shots() -> usize {
    1
}

fn default_kinds() -> Vec<SequenceKind> {
    vec![SequenceKind::Reference, SequenceKind::Interleaved]
}

fn default_bootstrap() -> usize {
    200
}

/// A complete description of one benchmarking experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    /// Pair counts n (each sequence has m = 2n gates before inversion).
    #[serde(default = "default_lengths")]
    pub lengths: Vec<usize>,
    pub sequences_per_length: usize,
    #[serde(default = "default_shots")]
    pub shots_per_sequence: usize,
    #[serde(default = "default_kinds")]
    pub kinds: Vec<SequenceKind>,
    #[serde(default)]
    pub clifford_noise: NoiseModel,
    #[serde(default)]
    pub t_noise: NoiseModel,
    /// Overrides the Pauli-gate noise, which otherwise equals `clifford_noise`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pauli_noise: Option<NoiseModel>,
    #[serde(default)]
    pub spam: SpamSpec,
    #[serde(default = "default_bootstrap")]
    pub bootstrap_replicates: usize,
}

impl ExperimentConfig {
    pub fn new(master_seed: u64, sequences_per_length: usize, clifford_noise: NoiseModel, t_noise: NoiseModel) -> Self {
        Self {
            master_seed,
            lengths: default_length_grid(),
            sequences_per_length,
            shots_per_sequence: 1,
            kinds: default_kinds(),
            clifford_noise,
            t_noise,
            pauli_noise: None,
            spam: SpamSpec::default(),
            bootstrap_replicates: default_bootstrap(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengths.is_empty() {
            return Err(Error::invalid("lengths", "must not be empty"));
        }
        if let Some((i, &n)) = self.lengths.iter().enumerate().find(|(_, &n)| n == 0 || n > MAX_PAIRS) {
            return Err(Error::invalid(format!("lengths[{i}]"), format!("must lie in 1..={MAX_PAIRS}, got {n}")));
        }
        if self.sequences_per_length == 0 || self.sequences_per_length > u32::MAX as usize {
            return Err(Error::invalid("sequences_per_length", "must be positive and below 2^32"));
        }
        if self.shots_per_sequence == 0 {
            return Err(Error::invalid("shots_per_sequence", "must be positive"));
        }
        if self.kinds.is_empty() {
            return Err(Error::invalid("kinds", "must not be empty"));
        }
        self.clifford_noise.validate_at("clifford_noise")?;
        self.t_noise.validate_at("t_noise")?;
        if let Some(p) = &self.pauli_noise {
            p.validate_at("pauli_noise")?;
        }
        self.spam.validate_at("spam")
    }

    pub fn gate_noise(&self) -> Result<GateNoise> {
        let clifford = self.clifford_noise.realize()?;
        let pauli = match &self.pauli_noise {
            Some(m) => m.realize()?,
            None => clifford,
        };
        Ok(GateNoise {
            clifford,
            pauli,
            t: self.t_noise.realize()?,
        })
    }
}

/// One single-shot measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub kind: SequenceKind,
    pub n: usize,
    pub ordinal: u32,
    /// ChaCha stream the sequence and its shots were drawn from.
    #[serde(skip)]
    pub sequence_seed: u64,
    pub outcome: u8,
    /// Exact survival probability; only available for freshly simulated records.
    #[serde(skip)]
    pub survival_prob: Option<f64>,
}

/// Stream identifier for the (kind, n, ordinal) work item.
pub fn stream_id(kind: SequenceKind, n: usize, ordinal: u32) -> u64 {
    (kind.code() << 62) | ((n as u64 & MAX_PAIRS as u64) << 32) | ordinal as u64
}

/// Deterministic RNG for one work item: the master seed keys ChaCha8 and the
/// item selects the stream.
pub fn item_rng(master_seed: u64, kind: SequenceKind, n: usize, ordinal: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id(kind, n, ordinal));
    rng
}

fn run_item(
    sim: &Simulator<'_>,
    cfg: &ExperimentConfig,
    kind: SequenceKind,
    n: usize,
    ordinal: u32,
) -> impl Iterator<Item = ShotRecord> {
    let mut rng = item_rng(cfg.master_seed, kind, n, ordinal);
    let seq = sample_sequence(kind, n, sim.gate_set(), &mut rng);
    let q = sim.survival(&seq);
    let sequence_seed = stream_id(kind, n, ordinal);
    let outcomes: Vec<u8> = (0..cfg.shots_per_sequence)
        .map(|_| u8::from(rng.random::<f64>() < q))
        .collect();
    outcomes.into_iter().map(move |outcome| ShotRecord {
        kind,
        n,
        ordinal,
        sequence_seed,
        outcome,
        survival_prob: Some(q),
    })
}

/// Runs every (kind, n, ordinal) item on the current rayon pool. Output order
/// is kinds × lengths × ordinals × shots regardless of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig, gs: &GateSet) -> Result<Vec<ShotRecord>> {
    cfg.validate()?;
    let noise = cfg.gate_noise()?;
    let spam = cfg.spam.realize()?;
    let sim = Simulator::new(&noise, &spam, gs);
    let items: Vec<(SequenceKind, usize, u32)> = cfg
        .kinds
        .iter()
        .flat_map(|&kind| {
            cfg.lengths.iter().flat_map(move |&n| {
                (0..cfg.sequences_per_length as u32).map(move |ordinal| (kind, n, ordinal))
            })
        })
        .collect();
    let chunks: Vec<Vec<ShotRecord>> = items
        .par_iter()
        .map(|&(kind, n, ordinal)| run_item(&sim, cfg, kind, n, ordinal).collect())
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// Runs `f` on a dedicated pool with `workers` threads (0 = rayon default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(f)
}

pub fn run_experiment_with_workers(cfg: &ExperimentConfig, gs: &GateSet, workers: usize) -> Result<Vec<ShotRecord>> {
    with_workers(workers, || run_experiment(cfg, gs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix2;

    fn gs() -> &'static GateSet {
        GateSet::shared()
    }

    fn unitary_of(seq: &SequenceSpec, gs: &GateSet) -> ComplexMatrix2 {
        let t = ComplexMatrix2::t_gate();
        let mut u = ComplexMatrix2::identity();
        match seq.kind {
            SequenceKind::Standard => {
                for &j in &seq.j {
                    u = gs.cliffords[j as usize].unitary * u;
                }
            }
            _ => {
                for (&j, &p) in seq.j.iter().zip(&seq.p) {
                    let pauli = ComplexMatrix2::pauli(p as usize);
                    let block = if seq.kind == SequenceKind::Interleaved { t * pauli * t } else { pauli };
                    u = gs.cliffords[j as usize].unitary * block * u;
                }
            }
        }
        u
    }

    #[test]
    fn trivial_reference_inverse_is_identity() {
        let s = SequenceSpec::from_draws(SequenceKind::Reference, vec![0], vec![0], gs()).unwrap();
        assert_eq!(s.inverse as usize, CLIFFORD_IDENTITY);
    }

    #[test]
    fn trivial_interleaved_inverse_is_phase_dagger() {
        let s = SequenceSpec::from_draws(SequenceKind::Interleaved, vec![0], vec![0], gs()).unwrap();
        let s_dag = gs().clifford_index(&ComplexMatrix2::phase().adjoint()).unwrap();
        assert_eq!(s.inverse as usize, s_dag);
    }

    #[test]
    fn interleaved_z_block_reduces_to_phase_dagger() {
        // T·Z·T = diag(1, -i) = S†.
        let s = SequenceSpec::from_draws(SequenceKind::Interleaved, vec![0], vec![3], gs()).unwrap();
        let word = reduce_interleaved_word(&s, gs());
        let t = ComplexMatrix2::t_gate();
        let direct = t * ComplexMatrix2::pauli_z() * t;
        assert!(gs().cliffords[word].unitary.equal_up_to_phase(&direct));
        assert!(direct.equal_up_to_phase(&ComplexMatrix2::phase().adjoint()));
    }

    #[test]
    fn identity_blocks_reduce_to_phase_powers() {
        for n in 1..6 {
            let s = SequenceSpec::from_draws(SequenceKind::Interleaved, vec![0; n], vec![0; n], gs()).unwrap();
            let mut want = ComplexMatrix2::identity();
            for _ in 0..n {
                want = ComplexMatrix2::phase() * want;
            }
            assert!(gs().cliffords[reduce_interleaved_word(&s, gs())].unitary.equal_up_to_phase(&want));
        }
    }

    #[test]
    fn sampled_inverses_match_matrix_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kind in SequenceKind::ALL {
            for n in [1usize, 2, 5, 10, 20] {
                let s = sample_sequence(kind, n, gs(), &mut rng);
                let total = gs().cliffords[s.inverse as usize].unitary * unitary_of(&s, gs());
                assert!(total.equal_up_to_phase(&ComplexMatrix2::identity()), "{kind} n={n}");
                let via_search = crate::gates::find_inverse_up_to_phase(&unitary_of(&s, gs()), gs()).unwrap();
                assert_eq!(via_search, s.inverse as usize);
            }
        }
    }

    #[test]
    fn noiseless_survival_is_one() {
        let sim = Simulator::new(&GateNoise::noiseless(), &RealizedSpam::default(), gs());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for kind in SequenceKind::ALL {
            let s = sample_sequence(kind, 7, gs(), &mut rng);
            assert!((sim.survival(&s) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn depolarizing_reference_closed_form() {
        let p = 0.02;
        let lambda = 1.0 - p;
        let noise = GateNoise::new(
            PauliTransferMatrix::depolarizing_contraction(lambda),
            PauliTransferMatrix::identity(),
        );
        let sim = Simulator::new(&noise, &RealizedSpam::default(), gs());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [1usize, 3, 10] {
            let s = sample_sequence(SequenceKind::Reference, n, gs(), &mut rng);
            let want = 0.5 * (1.0 + lambda.powi(2 * n as i32 + 1));
            assert!((sim.survival(&s) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn bad_draws_rejected() {
        assert!(SequenceSpec::from_draws(SequenceKind::Reference, vec![24], vec![0], gs()).is_err());
        assert!(SequenceSpec::from_draws(SequenceKind::Reference, vec![0, 1], vec![0], gs()).is_err());
        assert!(SequenceSpec::from_draws(SequenceKind::Standard, vec![0], vec![], gs()).is_err());
    }

    #[test]
    fn default_grid_is_pairs_for_lengths_2_to_98() {
        let g = default_length_grid();
        assert_eq!(g.len(), 25);
        assert_eq!(g[0], 2);
        assert_eq!(*g.last().unwrap(), 98);
    }

    #[test]
    fn spam_validation() {
        let mut spam = SpamSpec::default();
        assert!(spam.validate_at("spam").is_ok());
        spam.initial_state = PauliStateVector::from_bloch([0.0; 3]);
        assert!(spam.validate_at("spam").unwrap_err().to_string().contains("maximally mixed"));
        let spam = SpamSpec {
            povm_effect: PauliStateVector([1.0, 0.0, 0.0, 1.0]),
            ..Default::default()
        };
        assert!(spam.validate_at("spam").is_err());
    }

    #[test]
    fn zero_noise_experiment_always_survives() {
        let mut cfg = ExperimentConfig::new(3, 5, NoiseModel::None, NoiseModel::None);
        cfg.lengths = vec![1, 4];
        cfg.shots_per_sequence = 2;
        let recs = run_experiment(&cfg, gs()).unwrap();
        assert_eq!(recs.len(), 2 * 2 * 5 * 2);
        assert!(recs.iter().all(|r| r.outcome == 1));
    }
}
