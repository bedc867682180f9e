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

//! Group averages g† ℰ g over the Clifford and Pauli groups.

use crate::channel::PauliTransferMatrix;
use crate::gates::GateSet;

fn group_average<'a>(
    ptm: &PauliTransferMatrix,
    group: impl ExactSizeIterator<Item = &'a PauliTransferMatrix>,
) -> PauliTransferMatrix {
    let n = group.len() as f64;
    group
        .fold(PauliTransferMatrix::zero(), |acc, g| {
            // PTMs of unitaries are orthogonal, so g† is the transpose.
            acc.add(&g.transpose().compose(ptm).compose(g))
        })
        .scale(1.0 / n)
}

/// Average over the 24 Cliffords; always a depolarizing channel for
/// trace-preserving input.
pub fn clifford_twirl(ptm: &PauliTransferMatrix, gs: &GateSet) -> PauliTransferMatrix {
    group_average(ptm, gs.cliffords.iter().map(|c| &c.ptm))
}

/// Average over the four Paulis: diagonalizes the unital block and cancels the
/// nonunital column.
pub fn pauli_twirl(ptm: &PauliTransferMatrix, gs: &GateSet) -> PauliTransferMatrix {
    group_average(ptm, gs.paulis.iter().map(|p| &p.ptm))
}

/// Clifford twirl of ℰ·(Pauli twirl of ℰ): the effective noise of one
/// Pauli-then-Clifford pair. Its unital diagonal is (σx²+σy²+σz²)/3.
pub fn clifford_pauli_twirl(ptm: &PauliTransferMatrix, gs: &GateSet) -> PauliTransferMatrix {
    clifford_twirl(&ptm.compose(&pauli_twirl(ptm, gs)), gs)
}
