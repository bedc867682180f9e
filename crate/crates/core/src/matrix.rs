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

//! Dense 2×2 complex matrices and the single-qubit Pauli operators.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance used when deciding whether two unitaries agree up to a global phase.
pub const PHASE_MATCH_TOL: f64 = 1e-9;

/// A 2×2 complex matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix2 {
    pub entries: [[Complex64; 2]; 2],
}

impl ComplexMatrix2 {
    pub const fn new(entries: [[Complex64; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn from_real(rows: [[f64; 2]; 2]) -> Self {
        Self::new([
            [Complex64::new(rows[0][0], 0.0), Complex64::new(rows[0][1], 0.0)],
            [Complex64::new(rows[1][0], 0.0), Complex64::new(rows[1][1], 0.0)],
        ])
    }

    pub const fn identity() -> Self {
        Self::new([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn zero() -> Self {
        Self::new([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn pauli_x() -> Self {
        Self::new([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        Self::new([[ZERO, -I], [I, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, -1.0]])
    }

    /// Pauli operator by index in the fixed order (I, X, Y, Z).
    pub fn pauli(index: usize) -> Self {
        match index {
            0 => Self::identity(),
            1 => Self::pauli_x(),
            2 => Self::pauli_y(),
            3 => Self::pauli_z(),
            _ => panic!("Pauli index {index} out of range"),
        }
    }

    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real([[s, s], [s, -s]])
    }

    /// The phase gate diag(1, i).
    pub fn phase() -> Self {
        Self::new([[ONE, ZERO], [ZERO, I]])
    }

    /// The π/8 gate diag(1, e^{iπ/4}).
    pub fn t_gate() -> Self {
        Self::new([
            [ONE, ZERO],
            [ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        ])
    }

    /// exp(-i θ A / 2) for a Pauli A given by index 1..=3.
    pub fn rotation(pauli_index: usize, theta: f64) -> Self {
        let half = theta / 2.0;
        Self::identity().scale(Complex64::new(half.cos(), 0.0))
            + Self::pauli(pauli_index).scale(Complex64::new(0.0, -half.sin()))
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let e = &self.entries;
        Self::new([
            [e[0][0] * factor, e[0][1] * factor],
            [e[1][0] * factor, e[1][1] * factor],
        ])
    }

    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self::new([
            [e[0][0].conj(), e[1][0].conj()],
            [e[0][1].conj(), e[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.entries[r][c] - other.entries[r][c]).norm());
            }
        }
        worst
    }

    /// U†U = I to within `tol`, entrywise.
    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Self::identity()) <= tol
    }

    /// |Tr(U† V)|, which equals 2 exactly when the unitaries agree up to phase.
    pub fn phase_overlap(&self, other: &Self) -> f64 {
        (self.adjoint() * *other).trace().norm()
    }

    pub fn equal_up_to_phase(&self, other: &Self) -> bool {
        (self.phase_overlap(other) - 2.0).abs() <= PHASE_MATCH_TOL
    }

    /// Removes the global phase so that the first nonzero entry (row-major) is
    /// real and positive.
    pub fn canonicalize_phase(&self) -> Self {
        let pivot = self
            .entries
            .iter()
            .flatten()
            .copied()
            .find(|z| z.norm() > 1e-9);
        match pivot {
            Some(z) => self.scale(z.conj() / z.norm()),
            None => *self,
        }
    }
}

impl Mul for ComplexMatrix2 {
    type Output = ComplexMatrix2;

    fn mul(self, rhs: Self) -> Self {
        let a = &self.entries;
        let b = &rhs.entries;
        Self::new([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Add for ComplexMatrix2 {
    type Output = ComplexMatrix2;

    fn add(self, rhs: Self) -> Self {
        let a = &self.entries;
        let b = &rhs.entries;
        Self::new([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}
