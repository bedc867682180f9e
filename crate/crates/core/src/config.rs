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

//! TOML experiment configuration.

use std::path::Path;

use crate::engine::ExperimentConfig;
use crate::error::{Error, Result};

/// Parses and validates a TOML config. Errors carry the dotted field path.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = toml::Deserializer::parse(text).map_err(|e| Error::Config {
        path: ".".into(),
        message: e.message().to_string(),
    })?;
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
        path: e.path().to_string(),
        message: e.inner().message().to_string(),
    })?;
    cfg.validate().map_err(|e| match e {
        Error::InvalidParameter { field, reason } => Error::Config {
            path: field,
            message: reason,
        },
        other => other,
    })?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

pub fn to_toml(cfg: &ExperimentConfig) -> String {
    toml::to_string(cfg).expect("config serializes to TOML")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{Axis, NoiseModel};

    const FIG1A: &str = r#"
master_seed = 11
sequences_per_length = 20
lengths = [1, 3, 5]

[clifford_noise]
kind = "rotation"
axis = "x"
theta = 0.02

[t_noise]
kind = "composed"
models = [
  { kind = "depolarizing", p_dep = 0.02 },
  { kind = "rotation", axis = "x", theta = 0.05 },
]
"#;

    #[test]
    fn parses_nested_models() {
        let cfg = parse_config(FIG1A).unwrap();
        assert_eq!(cfg.clifford_noise, NoiseModel::Rotation { axis: Axis::X, theta: 0.02 });
        assert_eq!(cfg.shots_per_sequence, 1);
        assert_eq!(cfg.bootstrap_replicates, 200);
        match &cfg.t_noise {
            NoiseModel::Composed { models } => assert_eq!(models.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = parse_config(FIG1A).unwrap();
        assert_eq!(parse_config(&to_toml(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn reports_field_paths() {
        let bad = FIG1A.replace("p_dep = 0.02", "p_dep = 2.0");
        let err = parse_config(&bad).unwrap_err().to_string();
        assert!(err.contains("t_noise.models[0].p_dep"), "{err}");

        let bad = FIG1A.replace("theta = 0.02", "theta = \"big\"");
        let err = parse_config(&bad).unwrap_err().to_string();
        assert!(err.contains("clifford_noise"), "{err}");

        let bad = format!("{FIG1A}\n[spam]\nbogus = 1\n");
        assert!(parse_config(&bad).is_err());

        let bad = FIG1A.replace("lengths = [1, 3, 5]", "lengths = [1, 0]");
        let err = parse_config(&bad).unwrap_err().to_string();
        assert!(err.contains("lengths[1]"), "{err}");
    }

    #[test]
    fn missing_required_field() {
        let err = parse_config("master_seed = 1\n").unwrap_err().to_string();
        assert!(err.contains("sequences_per_length"), "{err}");
    }
}
