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

//! Noise channels used by the simulations, and the seeded random unital
//! channel ensemble.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::channel::{cptp_check, ptm_from_kraus, KrausChannel, PauliTransferMatrix};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix2;

/// Maximum number of diagonal redraws before the sampler gives up.
pub const RESAMPLE_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli_index(self) -> usize {
        match self {
            Axis::X => 1,
            Axis::Y => 2,
            Axis::Z => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomUnitalParams {
    /// Standard deviation (radians) of each of the three rotation angles in U and in V.
    pub rot_sigma: f64,
    pub diag_mu: f64,
    pub diag_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

impl RandomUnitalParams {
    /// Ensemble used for Clifford noise in the random-channel study.
    pub fn clifford_ensemble(seed: u64) -> Self {
        Self {
            rot_sigma: 0.02,
            diag_mu: 0.98,
            diag_sigma: 0.01,
            seed,
        }
    }

    /// Ensemble used for T-gate noise in the random-channel study.
    pub fn t_ensemble(seed: u64) -> Self {
        Self {
            rot_sigma: 0.1,
            diag_mu: 0.95,
            diag_sigma: 0.1,
            seed,
        }
    }

    fn validate_at(&self, path: &str) -> Result<()> {
        for (name, v) in [
            ("rot_sigma", self.rot_sigma),
            ("diag_mu", self.diag_mu),
            ("diag_sigma", self.diag_sigma),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{path}.{name}"), "must be finite"));
            }
        }
        if self.rot_sigma < 0.0 {
            return Err(Error::invalid(format!("{path}.rot_sigma"), "must be non-negative"));
        }
        if self.diag_sigma < 0.0 {
            return Err(Error::invalid(format!("{path}.diag_sigma"), "must be non-negative"));
        }
        Ok(())
    }
}

/// A noise channel description. Every variant realizes to a CPTP transfer matrix.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseModel {
    #[default]
    None,
    /// exp(-i·A·θ/2)
    Rotation { axis: Axis, theta: f64 },
    /// ρ ↦ (1-p)ρ + p·𝟙/2
    Depolarizing { p_dep: f64 },
    /// Generalized amplitude damping.
    Gad { p: f64, gamma: f64 },
    RandomUnital(RandomUnitalParams),
    Explicit { ptm: [[f64; 4]; 4] },
    /// Applied in list order: the first model acts first.
    Composed { models: Vec<NoiseModel> },
}


fn check_unit_interval(path: &str, name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
        return Err(Error::invalid(format!("{path}.{name}"), format!("must lie in [0, 1], got {v}")));
    }
    Ok(())
}

impl NoiseModel {
    pub fn rotation_x(theta: f64) -> Self {
        NoiseModel::Rotation { axis: Axis::X, theta }
    }

    /// Depolarizing followed by an x over-rotation.
    pub fn depolarizing_then_rotation(p_dep: f64, theta: f64) -> Self {
        NoiseModel::Composed {
            models: vec![NoiseModel::Depolarizing { p_dep }, NoiseModel::rotation_x(theta)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at("noise")
    }

    /// Range checks, with errors reported against `path`.
    pub fn validate_at(&self, path: &str) -> Result<()> {
        match self {
            NoiseModel::None => Ok(()),
            NoiseModel::Rotation { theta, .. } => {
                if theta.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("{path}.theta"), "must be finite"))
                }
            }
            NoiseModel::Depolarizing { p_dep } => {
                if p_dep.is_finite() && (0.0..=4.0 / 3.0).contains(p_dep) {
                    Ok(())
                } else {
                    Err(Error::invalid(
                        format!("{path}.p_dep"),
                        format!("must lie in [0, 4/3] for complete positivity, got {p_dep}"),
                    ))
                }
            }
            NoiseModel::Gad { p, gamma } => {
                check_unit_interval(path, "p", *p)?;
                check_unit_interval(path, "gamma", *gamma)
            }
            NoiseModel::RandomUnital(params) => params.validate_at(path),
            NoiseModel::Explicit { ptm } => {
                if ptm.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::invalid(format!("{path}.ptm"), "entries must be finite"));
                }
                let report = cptp_check(&PauliTransferMatrix(*ptm));
                if !report.trace_preserving {
                    return Err(Error::invalid(format!("{path}.ptm"), "not trace preserving"));
                }
                if !report.completely_positive {
                    return Err(Error::invalid(
                        format!("{path}.ptm"),
                        format!("not completely positive (min Choi eigenvalue {:e})", report.min_choi_eigenvalue),
                    ));
                }
                Ok(())
            }
            NoiseModel::Composed { models } => models
                .iter()
                .enumerate()
                .try_for_each(|(i, m)| m.validate_at(&format!("{path}.models[{i}]"))),
        }
    }

    /// The exact transfer matrix of this channel.
    pub fn realize(&self) -> Result<PauliTransferMatrix> {
        self.validate()?;
        self.realize_unchecked()
    }

    fn realize_unchecked(&self) -> Result<PauliTransferMatrix> {
        Ok(match self {
            NoiseModel::None => PauliTransferMatrix::identity(),
            NoiseModel::Rotation { axis, theta } => {
                PauliTransferMatrix::from_unitary(&ComplexMatrix2::rotation(axis.pauli_index(), *theta))
            }
            NoiseModel::Depolarizing { p_dep } => ptm_from_kraus(&depolarizing_kraus(*p_dep)),
            NoiseModel::Gad { p, gamma } => ptm_from_kraus(&gad_kraus(*p, *gamma)),
            NoiseModel::RandomUnital(params) => {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
                sample_random_unital(params, &mut rng)?
            }
            NoiseModel::Explicit { ptm } => PauliTransferMatrix(*ptm),
            NoiseModel::Composed { models } => {
                let mut acc = PauliTransferMatrix::identity();
                for m in models {
                    acc = m.realize_unchecked()?.compose(&acc);
                }
                acc
            }
        })
    }

    /// Kraus operators, when the model has a closed-form Kraus description
    /// (all variants except `Explicit`).
    pub fn kraus(&self) -> Result<Option<KrausChannel>> {
        self.validate()?;
        Ok(match self {
            NoiseModel::None => Some(KrausChannel::identity()),
            NoiseModel::Rotation { axis, theta } => Some(KrausChannel::unitary(ComplexMatrix2::rotation(
                axis.pauli_index(),
                *theta,
            ))),
            NoiseModel::Depolarizing { p_dep } => Some(depolarizing_kraus(*p_dep)),
            NoiseModel::Gad { p, gamma } => Some(gad_kraus(*p, *gamma)),
            NoiseModel::RandomUnital(params) => {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
                Some(sample_random_unital_draw(params, &mut rng)?.kraus())
            }
            NoiseModel::Explicit { .. } => None,
            NoiseModel::Composed { models } => {
                let mut acc = KrausChannel::identity();
                for m in models {
                    match m.kraus()? {
                        Some(k) => acc = k.compose(&acc),
                        None => return Ok(None),
                    }
                }
                Some(acc)
            }
        })
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Kraus form of ρ ↦ (1-p)ρ + p·𝟙/2.
pub fn depolarizing_kraus(p_dep: f64) -> KrausChannel {
    let mut ops = vec![ComplexMatrix2::identity().scale(real((1.0 - 0.75 * p_dep).sqrt()))];
    ops.extend((1..4).map(|k| ComplexMatrix2::pauli(k).scale(real((p_dep / 4.0).sqrt()))));
    KrausChannel::new(ops).expect("nonempty")
}

/// Generalized amplitude damping with population `p` and damping `gamma`.
pub fn gad_kraus(p: f64, gamma: f64) -> KrausChannel {
    let a = p.sqrt();
    let b = (1.0 - p).sqrt();
    let damp = (1.0 - gamma).sqrt();
    let jump = gamma.sqrt();
    KrausChannel::new(vec![
        ComplexMatrix2::from_real([[a, 0.0], [0.0, a * damp]]),
        ComplexMatrix2::from_real([[0.0, a * jump], [0.0, 0.0]]),
        ComplexMatrix2::from_real([[b * damp, 0.0], [0.0, b]]),
        ComplexMatrix2::from_real([[0.0, 0.0], [b * jump, 0.0]]),
    ])
    .expect("nonempty")
}

/// Bloch-sphere rotation matrix for exp(-i·θ·A/2).
fn bloch_rotation(axis: usize, theta: f64) -> [[f64; 3]; 3] {
    let (s, c) = theta.sin_cos();
    match axis {
        1 => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
        2 => [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
        3 => [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
        _ => unreachable!("axis index"),
    }
}

fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Rotation angles about x, y, x (applied right to left in that product order).
const ROTATION_AXES: [usize; 3] = [1, 2, 1];

/// One accepted draw from the random unital ensemble: unital block
/// R(u_angles) · diag(lambdas) · R(v_angles).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomUnitalDraw {
    pub u_angles: [f64; 3],
    pub v_angles: [f64; 3],
    pub lambdas: [f64; 3],
}

impl RandomUnitalDraw {
    fn rotation_block(angles: &[f64; 3]) -> [[f64; 3]; 3] {
        ROTATION_AXES
            .iter()
            .zip(angles)
            .fold(identity3(), |acc, (&axis, &theta)| mat3_mul(&acc, &bloch_rotation(axis, theta)))
    }

    fn rotation_unitary(angles: &[f64; 3]) -> ComplexMatrix2 {
        ROTATION_AXES
            .iter()
            .zip(angles)
            .fold(ComplexMatrix2::identity(), |acc, (&axis, &theta)| {
                acc * ComplexMatrix2::rotation(axis, theta)
            })
    }

    pub fn ptm(&self) -> PauliTransferMatrix {
        let diag = [
            [self.lambdas[0], 0.0, 0.0],
            [0.0, self.lambdas[1], 0.0],
            [0.0, 0.0, self.lambdas[2]],
        ];
        let block = mat3_mul(
            &mat3_mul(&Self::rotation_block(&self.u_angles), &diag),
            &Self::rotation_block(&self.v_angles),
        );
        PauliTransferMatrix::from_blocks(block, [0.0; 3])
    }

    /// U ∘ (Pauli channel with contractions λ) ∘ V in Kraus form.
    pub fn kraus(&self) -> KrausChannel {
        let [l1, l2, l3] = self.lambdas;
        let weights = [
            (1.0 + l1 + l2 + l3) / 4.0,
            (1.0 + l1 - l2 - l3) / 4.0,
            (1.0 - l1 + l2 - l3) / 4.0,
            (1.0 - l1 - l2 + l3) / 4.0,
        ];
        let u = Self::rotation_unitary(&self.u_angles);
        let v = Self::rotation_unitary(&self.v_angles);
        let ops = weights
            .iter()
            .enumerate()
            .map(|(k, w)| (u * ComplexMatrix2::pauli(k) * v).scale(real(w.max(0.0).sqrt())))
            .collect();
        KrausChannel::new(ops).expect("nonempty")
    }
}

fn identity3() -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

/// Complete-positivity condition |λ₁ ± λ₂| ≤ |1 ± λ₃| together with |λᵢ| ≤ 1.
pub fn unital_diagonal_is_cp(l: &[f64; 3]) -> bool {
    l.iter().all(|x| x.abs() <= 1.0)
        && (l[0] + l[1]).abs() <= (1.0 + l[2]).abs()
        && (l[0] - l[1]).abs() <= (1.0 - l[2]).abs()
}

pub fn sample_random_unital_draw<R: Rng + ?Sized>(
    params: &RandomUnitalParams,
    rng: &mut R,
) -> Result<RandomUnitalDraw> {
    params.validate_at("random_unital")?;
    let rot = Normal::new(0.0, params.rot_sigma).map_err(|e| Error::invalid("rot_sigma", e.to_string()))?;
    let diag =
        Normal::new(params.diag_mu, params.diag_sigma).map_err(|e| Error::invalid("diag_sigma", e.to_string()))?;
    let mut u_angles = [0.0; 3];
    let mut v_angles = [0.0; 3];
    u_angles.iter_mut().for_each(|a| *a = rot.sample(rng));
    v_angles.iter_mut().for_each(|a| *a = rot.sample(rng));
    // Only the diagonal is redrawn on rejection.
    for _ in 0..RESAMPLE_CAP {
        let lambdas = [diag.sample(rng), diag.sample(rng), diag.sample(rng)];
        if unital_diagonal_is_cp(&lambdas) {
            return Ok(RandomUnitalDraw {
                u_angles,
                v_angles,
                lambdas,
            });
        }
    }
    Err(Error::ResampleCapExceeded {
        attempts: RESAMPLE_CAP,
    })
}

/// Random unital CPTP channel near the identity (nonunital column zero).
pub fn sample_random_unital<R: Rng + ?Sized>(
    params: &RandomUnitalParams,
    rng: &mut R,
) -> Result<PauliTransferMatrix> {
    Ok(sample_random_unital_draw(params, rng)?.ptm())
}

/// Per-pair decay (σx²+σy²+σz²)/3 of a Pauli-then-Clifford reference sequence.
pub fn analytic_reference_prediction(noise: &PauliTransferMatrix) -> f64 {
    let [sx, sy, sz] = noise.unital_diagonal();
    (sx * sx + sy * sy + sz * sz) / 3.0
}
