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

//! Brute-force density-matrix simulator used as an independent oracle.

#![allow(dead_code)]

use nalgebra::Matrix2;
use num_complex::Complex64;
use tgrb_core::engine::{SequenceKind, SequenceSpec};
use tgrb_core::gates::GateSet;
use tgrb_core::noise::NoiseModel;

pub type M2 = Matrix2<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(k: usize) -> M2 {
    match k {
        0 => M2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
        1 => M2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        2 => M2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        3 => M2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
        _ => panic!("pauli index"),
    }
}

pub fn t_gate() -> M2 {
    let w = std::f64::consts::FRAC_PI_4;
    M2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(w.cos(), w.sin()))
}

pub fn clifford(gs: &GateSet, j: usize) -> M2 {
    let e = gs.cliffords[j].unitary.entries;
    M2::new(e[0][0], e[0][1], e[1][0], e[1][1])
}

/// Kraus operators of a model, converted to nalgebra matrices.
pub fn kraus(model: &NoiseModel) -> Vec<M2> {
    model
        .kraus()
        .unwrap()
        .expect("model has a Kraus form")
        .operators()
        .iter()
        .map(|k| M2::new(k.entries[0][0], k.entries[0][1], k.entries[1][0], k.entries[1][1]))
        .collect()
}

fn channel(ops: &[M2], rho: &M2) -> M2 {
    ops.iter().map(|k| k * rho * k.adjoint()).sum()
}

fn gate(u: &M2, rho: &M2) -> M2 {
    u * rho * u.adjoint()
}

pub struct Oracle {
    pub clifford_noise: Vec<M2>,
    pub t_noise: Vec<M2>,
}

impl Oracle {
    pub fn new(clifford_noise: &NoiseModel, t_noise: &NoiseModel) -> Self {
        Self {
            clifford_noise: kraus(clifford_noise),
            t_noise: kraus(t_noise),
        }
    }

    fn noisy(&self, u: &M2, noise: &[M2], rho: &M2) -> M2 {
        gate(u, &channel(noise, rho))
    }

    /// ⟨0|ρ_final|0⟩ starting from |0⟩⟨0| with ideal SPAM.
    pub fn survival(&self, seq: &SequenceSpec, gs: &GateSet) -> f64 {
        let mut rho = M2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let cn = &self.clifford_noise;
        let t = t_gate();
        match seq.kind {
            SequenceKind::Standard => {
                for &j in &seq.j {
                    rho = self.noisy(&clifford(gs, j as usize), cn, &rho);
                }
            }
            kind => {
                for (&j, &p) in seq.j.iter().zip(&seq.p) {
                    if kind == SequenceKind::Interleaved {
                        rho = self.noisy(&t, &self.t_noise, &rho);
                    }
                    rho = self.noisy(&pauli(p as usize), cn, &rho);
                    if kind == SequenceKind::Interleaved {
                        rho = self.noisy(&t, &self.t_noise, &rho);
                    }
                    rho = self.noisy(&clifford(gs, j as usize), cn, &rho);
                }
            }
        }
        rho = self.noisy(&clifford(gs, seq.inverse as usize), cn, &rho);
        rho[(0, 0)].re
    }
}
