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

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("channel is not trace preserving (first PTM row deviates by {deviation:e})")]
    NotTracePreserving { deviation: f64 },

    #[error("unitary is not proportional to any Clifford element (best |Tr| = {best_overlap})")]
    NotClifford { best_overlap: f64 },

    #[error("group closure produced {found} elements, expected {expected}")]
    ClosureSize { found: usize, expected: usize },

    #[error("{field}: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("random unital sampling gave up after {attempts} attempts; parameters look infeasible")]
    ResampleCapExceeded { attempts: usize },

    #[error("decay fit failed")]
    Fit(#[from] crate::estimation::FitError),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("malformed shot records: {0}")]
    Records(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
