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

//! Scalar fidelity relations: average fidelity, depolarizing strength,
//! decay contraction and the χ₀₀ process-matrix entry.

use serde::{Deserialize, Serialize};

use crate::channel::{PauliTransferMatrix, DIM};
use crate::error::Result;

/// Haar-averaged fidelity (Tr R + d)/(d² + d) of a trace-preserving channel.
pub fn avg_fidelity(ptm: &PauliTransferMatrix) -> Result<f64> {
    ptm.require_trace_preserving()?;
    let d = DIM as f64;
    Ok((ptm.trace() + d) / (d * d + d))
}

/// The interchangeable scalar summaries of a channel's distance from identity,
/// for a system of dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityScalars {
    pub dim: usize,
    pub avg_fidelity: f64,
    /// p in ρ ↦ (1-p)ρ + p·𝟙/d
    pub depolarizing_strength: f64,
    /// Bloch-space contraction of the equivalent depolarizing channel (1 - p).
    pub contraction: f64,
    pub chi00: f64,
}

impl FidelityScalars {
    pub fn from_avg_fidelity(avg_fidelity: f64, dim: usize) -> Self {
        let d = dim as f64;
        let depolarizing_strength = d / (d - 1.0) * (1.0 - avg_fidelity);
        Self {
            dim,
            avg_fidelity,
            depolarizing_strength,
            contraction: 1.0 - depolarizing_strength,
            chi00: chi00_from_fidelity(avg_fidelity, dim),
        }
    }

    pub fn from_depolarizing_strength(p: f64, dim: usize) -> Self {
        let d = dim as f64;
        Self::from_avg_fidelity(1.0 - p * (d - 1.0) / d, dim)
    }

    pub fn from_contraction(contraction: f64, dim: usize) -> Self {
        Self::from_depolarizing_strength(1.0 - contraction, dim)
    }

    pub fn from_chi00(chi00: f64, dim: usize) -> Self {
        Self::from_avg_fidelity(fidelity_from_chi00(chi00, dim), dim)
    }
}

/// χ₀₀ = ((d+1)F - 1)/d; (3F - 1)/2 for a qubit.
pub fn chi00_from_fidelity(avg_fidelity: f64, dim: usize) -> f64 {
    let d = dim as f64;
    ((d + 1.0) * avg_fidelity - 1.0) / d
}

pub fn fidelity_from_chi00(chi00: f64, dim: usize) -> f64 {
    let d = dim as f64;
    (d * chi00 + 1.0) / (d + 1.0)
}

/// Average fidelity of a depolarizing channel with Bloch contraction `p`.
pub fn fidelity_from_contraction(p: f64, dim: usize) -> f64 {
    let d = dim as f64;
    ((d - 1.0) * p + 1.0) / d
}

/// Decomposition of the unital diagonal as σx = σ, σy = σ(1+εy), σz = σ(1+εz),
/// with the two decay parameters a Clifford–Clifford and a Clifford–Pauli
/// experiment would observe per gate pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyReport {
    pub sigma: f64,
    pub eps_y: f64,
    pub eps_z: f64,
    /// ((σx+σy+σz)/3)²
    pub cc_param: f64,
    /// (σx²+σy²+σz²)/3
    pub cp_param: f64,
    /// cp_param - cc_param, the population variance of the diagonal.
    pub gap: f64,
}

pub fn anisotropy_report(ptm: &PauliTransferMatrix) -> AnisotropyReport {
    let [sx, sy, sz] = ptm.unital_diagonal();
    let mean = (sx + sy + sz) / 3.0;
    let cc_param = mean * mean;
    let cp_param = (sx * sx + sy * sy + sz * sz) / 3.0;
    // Computed as a variance directly; cp - cc cancels catastrophically near 1.
    let gap = ((sx - mean).powi(2) + (sy - mean).powi(2) + (sz - mean).powi(2)) / 3.0;
    AnisotropyReport {
        sigma: sx,
        eps_y: sy / sx - 1.0,
        eps_z: sz / sx - 1.0,
        cc_param,
        cp_param,
        gap,
    }
}
