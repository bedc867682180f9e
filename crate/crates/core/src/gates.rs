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

//! Single-qubit Pauli and Clifford groups, the T gate, and the table
//! machinery used to invert benchmarking words.

use std::collections::VecDeque;
use std::sync::OnceLock;

use serde::Serialize;

use crate::channel::PauliTransferMatrix;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix2;

pub const NUM_CLIFFORDS: usize = 24;
pub const NUM_PAULIS: usize = 4;

/// Index of the identity in the Clifford table (the BFS root).
pub const CLIFFORD_IDENTITY: usize = 0;

#[derive(Debug, Clone, Serialize)]
pub struct GateElement {
    pub index: usize,
    pub unitary: ComplexMatrix2,
    pub ptm: PauliTransferMatrix,
}

impl GateElement {
    fn new(index: usize, unitary: ComplexMatrix2) -> Self {
        let unitary = unitary.canonicalize_phase();
        Self {
            index,
            ptm: PauliTransferMatrix::from_unitary(&unitary),
            unitary,
        }
    }
}

/// The Pauli group, the 24 Cliffords, T, and the tables that relate them.
///
/// `mult_table[a][b]` is the index of `cliffords[a] · cliffords[b]` (b applied
/// first). `c_t[p]` is the Clifford equal to T·P·T† up to phase.
#[derive(Debug, Clone, Serialize)]
pub struct GateSet {
    pub paulis: Vec<GateElement>,
    pub cliffords: Vec<GateElement>,
    pub t_gate: GateElement,
    pub phase_gate_index: usize,
    pub c_t: [usize; NUM_PAULIS],
    pub mult_table: Vec<[usize; NUM_CLIFFORDS]>,
    pub inv_table: [usize; NUM_CLIFFORDS],
    pub pauli_embed: [usize; NUM_PAULIS],
}

static SHARED: OnceLock<GateSet> = OnceLock::new();

impl GateSet {
    /// Process-wide immutable instance.
    pub fn shared() -> &'static GateSet {
        SHARED.get_or_init(|| build_gate_set().expect("Clifford closure is fixed"))
    }

    /// Index of the Clifford equal to `u` up to global phase.
    pub fn clifford_index(&self, u: &ComplexMatrix2) -> Option<usize> {
        self.cliffords
            .iter()
            .position(|c| c.unitary.equal_up_to_phase(u))
    }

    pub fn is_clifford(&self, u: &ComplexMatrix2) -> bool {
        self.clifford_index(u).is_some()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult_table[a][b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv_table[a]
    }

    /// Clifford index of the ideal interleaved block T·P·T = C_t[P]·S.
    #[inline]
    pub fn interleaved_block(&self, pauli: usize) -> usize {
        self.mul(self.c_t[pauli], self.phase_gate_index)
    }

    pub fn clifford_unitaries(&self) -> Vec<ComplexMatrix2> {
        self.cliffords.iter().map(|c| c.unitary).collect()
    }

    pub fn pauli_unitaries(&self) -> Vec<ComplexMatrix2> {
        self.paulis.iter().map(|p| p.unitary).collect()
    }
}

fn find_in(list: &[ComplexMatrix2], u: &ComplexMatrix2) -> Option<usize> {
    list.iter().position(|c| c.equal_up_to_phase(u))
}

/// Builds the Clifford group by breadth-first closure of {H, S} starting from
/// the identity. The visit order is deterministic, so indices are stable.
pub fn build_gate_set() -> Result<GateSet> {
    let generators = [ComplexMatrix2::hadamard(), ComplexMatrix2::phase()];
    let mut elements = vec![ComplexMatrix2::identity()];
    let mut queue = VecDeque::from([ComplexMatrix2::identity()]);
    while let Some(g) = queue.pop_front() {
        for gen in &generators {
            let h = (*gen * g).canonicalize_phase();
            if find_in(&elements, &h).is_none() {
                elements.push(h);
                queue.push_back(h);
            }
            if elements.len() > NUM_CLIFFORDS {
                return Err(Error::ClosureSize {
                    found: elements.len(),
                    expected: NUM_CLIFFORDS,
                });
            }
        }
    }
    if elements.len() != NUM_CLIFFORDS {
        return Err(Error::ClosureSize {
            found: elements.len(),
            expected: NUM_CLIFFORDS,
        });
    }

    let lookup = |u: &ComplexMatrix2| -> Result<usize> {
        find_in(&elements, u).ok_or(Error::NotClifford {
            best_overlap: elements
                .iter()
                .map(|c| c.phase_overlap(u))
                .fold(0.0, f64::max),
        })
    };

    let mut mult_table = vec![[0usize; NUM_CLIFFORDS]; NUM_CLIFFORDS];
    for a in 0..NUM_CLIFFORDS {
        for b in 0..NUM_CLIFFORDS {
            mult_table[a][b] = lookup(&(elements[a] * elements[b]))?;
        }
    }
    let mut inv_table = [0usize; NUM_CLIFFORDS];
    for (a, slot) in inv_table.iter_mut().enumerate() {
        *slot = lookup(&elements[a].adjoint())?;
    }

    let t = ComplexMatrix2::t_gate();
    let mut c_t = [0usize; NUM_PAULIS];
    let mut pauli_embed = [0usize; NUM_PAULIS];
    for p in 0..NUM_PAULIS {
        let pauli = ComplexMatrix2::pauli(p);
        c_t[p] = lookup(&(t * pauli * t.adjoint()))?;
        pauli_embed[p] = lookup(&pauli)?;
    }
    let phase_gate_index = lookup(&ComplexMatrix2::phase())?;

    Ok(GateSet {
        paulis: (0..NUM_PAULIS)
            .map(|p| GateElement::new(p, ComplexMatrix2::pauli(p)))
            .collect(),
        cliffords: elements
            .iter()
            .enumerate()
            .map(|(i, u)| GateElement::new(i, *u))
            .collect(),
        t_gate: GateElement::new(0, t),
        phase_gate_index,
        c_t,
        mult_table,
        inv_table,
        pauli_embed,
    })
}

/// Index g such that cliffords[g]·u ∝ I.
pub fn find_inverse_up_to_phase(u: &ComplexMatrix2, gs: &GateSet) -> Result<usize> {
    let mut best_overlap: f64 = 0.0;
    for c in &gs.cliffords {
        let overlap = (c.unitary * *u).trace().norm();
        if (overlap - 2.0).abs() <= crate::matrix::PHASE_MATCH_TOL {
            return Ok(c.index);
        }
        best_overlap = best_overlap.max(overlap);
    }
    Err(Error::NotClifford { best_overlap })
}

/// (1/N²) Σ_{U,V} |Tr(U†V)|⁴
pub fn frame_potential(elements: &[ComplexMatrix2]) -> f64 {
    assert!(!elements.is_empty(), "frame potential of an empty set");
    let n = elements.len() as f64;
    let total: f64 = elements
        .iter()
        .flat_map(|u| elements.iter().map(move |v| u.phase_overlap(v).powi(4)))
        .sum();
    total / (n * n)
}

/// True when A² and every A·P·A† are Cliffords (up to phase), i.e. A can
/// stand in for T in the interleaved protocol.
pub fn check_generalized_gate(a: &ComplexMatrix2, gs: &GateSet) -> bool {
    if !gs.is_clifford(&(*a * *a)) {
        return false;
    }
    (0..NUM_PAULIS).all(|p| gs.is_clifford(&(*a * ComplexMatrix2::pauli(p) * a.adjoint())))
}

#[derive(Debug, Serialize)]
struct TablesDump<'a> {
    cliffords: Vec<ElementDump>,
    paulis: Vec<ElementDump>,
    t_gate: ElementDump,
    phase_gate_index: usize,
    c_t: [usize; NUM_PAULIS],
    pauli_embed: [usize; NUM_PAULIS],
    inv_table: [usize; NUM_CLIFFORDS],
    mult_table: &'a [[usize; NUM_CLIFFORDS]],
}

#[derive(Debug, Serialize)]
struct ElementDump {
    index: usize,
    /// Row-major [re, im] pairs.
    unitary: [[[f64; 2]; 2]; 2],
    ptm: [[f64; 4]; 4],
}

impl From<&GateElement> for ElementDump {
    fn from(g: &GateElement) -> Self {
        let unitary = g.unitary.entries.map(|row| row.map(|z| [z.re, z.im]));
        Self {
            index: g.index,
            unitary,
            ptm: g.ptm.0,
        }
    }
}

/// Pretty-printed JSON dump of the group tables, for inspection.
pub fn tables_json(gs: &GateSet) -> String {
    let dump = TablesDump {
        cliffords: gs.cliffords.iter().map(ElementDump::from).collect(),
        paulis: gs.paulis.iter().map(ElementDump::from).collect(),
        t_gate: ElementDump::from(&gs.t_gate),
        phase_gate_index: gs.phase_gate_index,
        c_t: gs.c_t,
        pauli_embed: gs.pauli_embed,
        inv_table: gs.inv_table,
        mult_table: &gs.mult_table,
    };
    serde_json::to_string_pretty(&dump).expect("tables serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs() -> &'static GateSet {
        GateSet::shared()
    }

    #[test]
    fn closure_has_24_elements_with_identity_first() {
        let g = gs();
        assert_eq!(g.cliffords.len(), 24);
        assert_eq!(g.paulis.len(), 4);
        assert!(g.cliffords[CLIFFORD_IDENTITY]
            .unitary
            .equal_up_to_phase(&ComplexMatrix2::identity()));
    }

    #[test]
    fn elements_are_canonical_and_unitary() {
        for c in &gs().cliffords {
            assert!(c.unitary.is_unitary(1e-12));
            let pivot = c.unitary.entries.iter().flatten().find(|z| z.norm() > 1e-9).unwrap();
            assert!(pivot.im.abs() < 1e-12 && pivot.re > 0.0);
            let direct = PauliTransferMatrix::from_unitary(&c.unitary);
            assert!(direct.max_abs_diff(&c.ptm) < 1e-15);
        }
    }

    #[test]
    fn indices_are_stable_across_builds() {
        let fresh = build_gate_set().unwrap();
        for (a, b) in fresh.cliffords.iter().zip(&gs().cliffords) {
            assert_eq!(a.unitary, b.unitary);
        }
        assert_eq!(fresh.mult_table, gs().mult_table);
    }

    #[test]
    fn group_axioms_hold_exhaustively() {
        let g = gs();
        for a in 0..24 {
            assert_eq!(g.mul(a, g.inv(a)), CLIFFORD_IDENTITY);
            assert_eq!(g.mul(g.inv(a), a), CLIFFORD_IDENTITY);
            assert_eq!(g.mul(CLIFFORD_IDENTITY, a), a);
            for b in 0..24 {
                for c in 0..24 {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn cliffords_map_paulis_to_signed_paulis() {
        for c in &gs().cliffords {
            for p in 1..4 {
                let image = c.unitary * ComplexMatrix2::pauli(p) * c.unitary.adjoint();
                let hits = (1..4)
                    .filter(|&q| image.equal_up_to_phase(&ComplexMatrix2::pauli(q)))
                    .count();
                assert_eq!(hits, 1);
                // Hermitian, so the phase is ±1.
                assert!(image.max_abs_diff(&image.adjoint()) < 1e-12);
            }
        }
    }

    #[test]
    fn phase_equivalence_is_symmetric_and_transitive() {
        let us = gs().clifford_unitaries();
        for a in &us {
            for b in &us {
                assert_eq!(a.equal_up_to_phase(b), b.equal_up_to_phase(a));
                for c in &us {
                    if a.equal_up_to_phase(b) && b.equal_up_to_phase(c) {
                        assert!(a.equal_up_to_phase(c));
                    }
                }
            }
        }
    }

    #[test]
    fn t_conjugates_paulis_into_cliffords() {
        let g = gs();
        let t = ComplexMatrix2::t_gate();
        for p in 0..4 {
            let conj = t * ComplexMatrix2::pauli(p) * t.adjoint();
            assert!(g.cliffords[g.c_t[p]].unitary.equal_up_to_phase(&conj));
        }
        // T is diagonal, so Z is fixed.
        assert_eq!(g.c_t[3], g.pauli_embed[3]);
        assert_eq!(g.c_t[0], CLIFFORD_IDENTITY);
    }

    #[test]
    fn t_conjugated_x_acts_as_expected_on_bloch_sphere() {
        // T X T† = (X + Y)/√2, and the Clifford rotates X → (X+Y)/√2 image.
        let g = gs();
        let c = &g.cliffords[g.c_t[1]];
        let direct = ComplexMatrix2::t_gate() * ComplexMatrix2::pauli_x() * ComplexMatrix2::t_gate().adjoint();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((direct.get(0, 1).re - s).abs() < 1e-15 && (direct.get(0, 1).im + s).abs() < 1e-15);
        assert!(c.unitary.equal_up_to_phase(&direct));
        // As a channel it maps X→X, Y→-Y, Z→-Z conjugated by the T rotation.
        let t = PauliTransferMatrix::from_unitary(&ComplexMatrix2::t_gate());
        let x = PauliTransferMatrix::from_unitary(&ComplexMatrix2::pauli_x());
        assert!(c.ptm.max_abs_diff(&t.compose(&x).compose(&t.transpose())) < 1e-14);
    }

    #[test]
    fn t_squared_is_phase_gate_index() {
        let g = gs();
        let t = ComplexMatrix2::t_gate();
        assert_eq!(g.clifford_index(&(t * t)), Some(g.phase_gate_index));
    }

    #[test]
    fn inverse_of_hadamard_is_itself() {
        let g = gs();
        let h = g.clifford_index(&ComplexMatrix2::hadamard()).unwrap();
        assert_eq!(find_inverse_up_to_phase(&ComplexMatrix2::hadamard(), g).unwrap(), h);
    }

    #[test]
    fn inverse_of_phase_is_phase_dagger() {
        let g = gs();
        let s_dag = g.clifford_index(&ComplexMatrix2::phase().adjoint()).unwrap();
        assert_eq!(find_inverse_up_to_phase(&ComplexMatrix2::phase(), g).unwrap(), s_dag);
        assert_eq!(g.inv(g.phase_gate_index), s_dag);
    }

    #[test]
    fn inverse_of_non_clifford_is_rejected() {
        let err = find_inverse_up_to_phase(&ComplexMatrix2::t_gate(), gs()).unwrap_err();
        assert!(matches!(err, Error::NotClifford { .. }));
    }

    #[test]
    fn frame_potentials() {
        let g = gs();
        assert!((frame_potential(&g.clifford_unitaries()) - 2.0).abs() < 1e-9);
        assert!((frame_potential(&g.pauli_unitaries()) - 4.0).abs() < 1e-9);
        let tc: Vec<_> = g.cliffords.iter().map(|c| ComplexMatrix2::t_gate() * c.unitary).collect();
        assert!((frame_potential(&tc) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn generalized_gate_condition() {
        let g = gs();
        assert!(check_generalized_gate(&ComplexMatrix2::t_gate(), g));
        assert!(check_generalized_gate(&ComplexMatrix2::hadamard(), g));
        assert!(!check_generalized_gate(&ComplexMatrix2::rotation(1, 0.3), g));
        // √X is a square root of a Clifford whose conjugation stays Clifford.
        assert!(check_generalized_gate(&ComplexMatrix2::rotation(1, std::f64::consts::FRAC_PI_4), g));
    }

    #[test]
    fn tables_dump_is_valid_json() {
        let v: serde_json::Value = serde_json::from_str(&tables_json(gs())).unwrap();
        assert_eq!(v["cliffords"].as_array().unwrap().len(), 24);
        assert_eq!(v["mult_table"].as_array().unwrap().len(), 24);
    }
}
