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

//! Channel representations in the normalized Pauli basis (I, X, Y, Z)/√2.
//!
//! A [`PauliTransferMatrix`] acts on [`PauliStateVector`]s by matrix-vector
//! multiplication. Composition follows operator order: `a.compose(&b)` applies
//! `b` first, then `a`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix2;

/// Qubit dimension.
pub const DIM: usize = 2;

/// Tolerance on the first PTM row for the trace-preservation test.
pub const TP_TOL: f64 = 1e-10;

/// Minimum admissible Choi eigenvalue.
pub const CP_TOL: f64 = -1e-10;

/// Components r_j = Tr(P_j ρ)/√2 of a qubit operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PauliStateVector(pub [f64; 4]);

impl PauliStateVector {
    /// |0⟩⟨0|
    pub fn zero_state() -> Self {
        Self([FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2])
    }

    /// State with the given Bloch vector (unit trace).
    pub fn from_bloch(bloch: [f64; 3]) -> Self {
        Self([
            FRAC_1_SQRT_2,
            bloch[0] * FRAC_1_SQRT_2,
            bloch[1] * FRAC_1_SQRT_2,
            bloch[2] * FRAC_1_SQRT_2,
        ])
    }

    /// Length of the traceless part; at most 1/√2 for a physical state.
    pub fn bloch_length(&self) -> f64 {
        let r = &self.0;
        (r[1] * r[1] + r[2] * r[2] + r[3] * r[3]).sqrt()
    }

    /// Hilbert–Schmidt inner product with another operator in the same basis.
    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn from_operator(op: &ComplexMatrix2) -> Self {
        let mut r = [0.0; 4];
        for (j, slot) in r.iter_mut().enumerate() {
            *slot = (ComplexMatrix2::pauli(j) * *op).trace().re * FRAC_1_SQRT_2;
        }
        Self(r)
    }

    pub fn to_operator(&self) -> ComplexMatrix2 {
        (0..4).fold(ComplexMatrix2::zero(), |acc, j| {
            acc + ComplexMatrix2::pauli(j).scale(Complex64::new(self.0[j] * FRAC_1_SQRT_2, 0.0))
        })
    }
}

/// Real 4×4 superoperator in the normalized Pauli basis.
///
/// Block layout:
///
/// ```text
/// [ S      | sdl ]
/// [ n (α)  | u   ]
/// ```
///
/// where `u` is the 3×3 unital block whose diagonal holds (σx, σy, σz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PauliTransferMatrix(pub [[f64; 4]; 4]);

impl Default for PauliTransferMatrix {
    fn default() -> Self {
        Self::identity()
    }
}

impl PauliTransferMatrix {
    pub const fn identity() -> Self {
        Self([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
    }

    pub fn zero() -> Self {
        Self([[0.0; 4]; 4])
    }

    /// Trace-preserving unital channel with the given unital diagonal.
    pub fn diagonal(sigma: [f64; 3]) -> Self {
        let mut m = Self::identity();
        for (k, s) in sigma.into_iter().enumerate() {
            m.0[k + 1][k + 1] = s;
        }
        m
    }

    /// Depolarizing channel with contraction `lambda` on the Bloch components.
    pub fn depolarizing_contraction(lambda: f64) -> Self {
        Self::diagonal([lambda; 3])
    }

    /// Trace-preserving channel assembled from a unital block and a nonunital column.
    pub fn from_blocks(unital: [[f64; 3]; 3], nonunital: [f64; 3]) -> Self {
        let mut m = Self::identity();
        for (i, row) in unital.iter().enumerate() {
            m.0[i + 1][0] = nonunital[i];
            m.0[i + 1][1..].copy_from_slice(row);
        }
        m
    }

    /// PTM of the unitary channel ρ ↦ UρU†.
    pub fn from_unitary(u: &ComplexMatrix2) -> Self {
        ptm_from_kraus(&KrausChannel::unitary(*u))
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    /// Applies `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = (0..4).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Self(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = self.0[j][i];
            }
        }
        Self(out)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.0;
        out.iter_mut().flatten().for_each(|x| *x *= factor);
        Self(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.0;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x += other.0[i][j];
            }
        }
        Self(out)
    }

    pub fn apply(&self, state: &PauliStateVector) -> PauliStateVector {
        let mut out = [0.0; 4];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = (0..4).map(|k| self.0[i][k] * state.0[k]).sum();
        }
        PauliStateVector(out)
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|k| self.0[k][k]).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Top-left element S(ℰ).
    pub fn trace_scalar(&self) -> f64 {
        self.0[0][0]
    }

    /// State-dependent leakage row; zero for trace-preserving maps.
    pub fn sdl(&self) -> [f64; 3] {
        [self.0[0][1], self.0[0][2], self.0[0][3]]
    }

    /// Nonunital column (α₁, α₂, α₃).
    pub fn nonunital(&self) -> [f64; 3] {
        [self.0[1][0], self.0[2][0], self.0[3][0]]
    }

    pub fn unital_block(&self) -> [[f64; 3]; 3] {
        let mut u = [[0.0; 3]; 3];
        for (i, row) in u.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = self.0[i + 1][j + 1];
            }
        }
        u
    }

    /// (σx, σy, σz)
    pub fn unital_diagonal(&self) -> [f64; 3] {
        [self.0[1][1], self.0[2][2], self.0[3][3]]
    }

    /// Largest deviation of the first row from (1, 0, 0, 0).
    pub fn tp_deviation(&self) -> f64 {
        let r = &self.0[0];
        (r[0] - 1.0)
            .abs()
            .max(r[1].abs())
            .max(r[2].abs())
            .max(r[3].abs())
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.tp_deviation() <= TP_TOL
    }

    pub fn require_trace_preserving(&self) -> Result<()> {
        let deviation = self.tp_deviation();
        if deviation <= TP_TOL {
            Ok(())
        } else {
            Err(Error::NotTracePreserving { deviation })
        }
    }

    /// Normalized (unit-trace for TP maps) Choi operator
    /// J = ½ Σ_{ab} |a⟩⟨b| ⊗ ℰ(|a⟩⟨b|).
    pub fn choi(&self) -> Matrix4<Complex64> {
        let mut j = Matrix4::<Complex64>::zeros();
        for a in 0..2 {
            for b in 0..2 {
                let mut unit = ComplexMatrix2::zero();
                unit.entries[a][b] = Complex64::new(1.0, 0.0);
                let image = self.apply_operator(&unit);
                for r in 0..2 {
                    for c in 0..2 {
                        j[(2 * a + r, 2 * b + c)] = image.get(r, c) * 0.5;
                    }
                }
            }
        }
        j
    }

    /// Applies the channel to an arbitrary (not necessarily Hermitian) operator.
    pub fn apply_operator(&self, op: &ComplexMatrix2) -> ComplexMatrix2 {
        // Expand over the Pauli basis with complex coefficients.
        let coeffs: Vec<Complex64> = (0..4)
            .map(|j| (ComplexMatrix2::pauli(j) * *op).trace() * FRAC_1_SQRT_2)
            .collect();
        (0..4).fold(ComplexMatrix2::zero(), |acc, i| {
            let c: Complex64 = (0..4).map(|j| coeffs[j] * self.0[i][j]).sum();
            acc + ComplexMatrix2::pauli(i).scale(c * FRAC_1_SQRT_2)
        })
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        let j = self.choi();
        // Symmetrize against roundoff before the Hermitian solve.
        let h = (j + j.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Kraus representation ρ ↦ Σ_k E_k ρ E_k†.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix2>,
}

impl KrausChannel {
    pub fn new(operators: Vec<ComplexMatrix2>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::invalid("kraus", "at least one operator is required"));
        }
        Ok(Self { operators })
    }

    pub fn unitary(u: ComplexMatrix2) -> Self {
        Self { operators: vec![u] }
    }

    pub fn identity() -> Self {
        Self::unitary(ComplexMatrix2::identity())
    }

    pub fn operators(&self) -> &[ComplexMatrix2] {
        &self.operators
    }

    /// max-abs deviation of Σ E_k†E_k from I.
    pub fn completeness_deviation(&self) -> f64 {
        self.operators
            .iter()
            .fold(ComplexMatrix2::zero(), |acc, e| acc + e.adjoint() * *e)
            .max_abs_diff(&ComplexMatrix2::identity())
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.completeness_deviation() <= 1e-12
    }

    /// Kraus-level composition: applies `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let operators = self
            .operators
            .iter()
            .flat_map(|a| other.operators.iter().map(move |b| *a * *b))
            .collect();
        Self { operators }
    }

    pub fn apply(&self, rho: &ComplexMatrix2) -> ComplexMatrix2 {
        self.operators
            .iter()
            .fold(ComplexMatrix2::zero(), |acc, e| acc + *e * *rho * e.adjoint())
    }
}

/// Entry (i, j) = ½ Σ_k Tr(P_i E_k P_j E_k†).
pub fn ptm_from_kraus(k: &KrausChannel) -> PauliTransferMatrix {
    let paulis: Vec<ComplexMatrix2> = (0..4).map(ComplexMatrix2::pauli).collect();
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let total: Complex64 = k
                .operators
                .iter()
                .map(|e| (paulis[i] * *e * paulis[j] * e.adjoint()).trace())
                .sum();
            *slot = total.re / DIM as f64;
        }
    }
    PauliTransferMatrix(out)
}

/// Applies `b` first, then `a`.
pub fn compose(a: &PauliTransferMatrix, b: &PauliTransferMatrix) -> PauliTransferMatrix {
    a.compose(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CptpReport {
    pub trace_preserving: bool,
    pub min_choi_eigenvalue: f64,
    pub completely_positive: bool,
}

impl CptpReport {
    pub fn is_cptp(&self) -> bool {
        self.trace_preserving && self.completely_positive
    }
}

pub fn cptp_check(ptm: &PauliTransferMatrix) -> CptpReport {
    let min_choi_eigenvalue = ptm.min_choi_eigenvalue();
    CptpReport {
        trace_preserving: ptm.is_trace_preserving(),
        min_choi_eigenvalue,
        completely_positive: min_choi_eigenvalue >= CP_TOL,
    }
}
