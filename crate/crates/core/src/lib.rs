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

//! Single-qubit randomized benchmarking with Clifford⊕Pauli reference
//! sequences and interleaved T gates.

pub mod channel;
pub mod config;
pub mod engine;
pub mod error;
pub mod estimation;
pub mod fidelity;
pub mod gates;
pub mod matrix;
pub mod noise;
pub mod records;
pub mod runner;
pub mod scenario;
pub mod twirl;

pub use channel::{cptp_check, ptm_from_kraus, KrausChannel, PauliStateVector, PauliTransferMatrix};
pub use engine::{run_experiment, sample_sequence, ExperimentConfig, SequenceKind, SequenceSpec, ShotRecord};
pub use error::{Error, Result};
pub use estimation::{estimate_t_fidelity, fit_decay, DecayFit, DecayPoint, FidelityEstimate, TukeySummary};
pub use gates::GateSet;
pub use matrix::ComplexMatrix2;
pub use noise::NoiseModel;
