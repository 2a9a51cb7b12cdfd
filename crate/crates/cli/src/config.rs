use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    #[serde(alias = "uncertainty_sweep")]
    Sweep,
    #[serde(alias = "ratio_scan")]
    Ratio,
    Ensemble,
    #[serde(alias = "decoherence_fit")]
    FitGamma,
    #[serde(alias = "partial_correlation")]
    Partial,
    #[serde(alias = "field_sensing")]
    Field,
    OracleCheck,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sweep => "sweep",
            Self::Ratio => "ratio",
            Self::Ensemble => "ensemble",
            Self::FitGamma => "fit_gamma",
            Self::Partial => "partial",
            Self::Field => "field",
            Self::OracleCheck => "oracle_check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyUnit {
    /// Cyclic frequency; multiplied by 2π on input.
    #[default]
    Hz,
    RadPerS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub frequency: FrequencyUnit,
}

impl Units {
    /// Angular frequency in rad/s.
    pub fn angular(&self, value: f64) -> f64 {
        match self.frequency {
            FrequencyUnit::Hz => TAU * value,
            FrequencyUnit::RadPerS => value,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Experiment,
    #[serde(default)]
    seed: Option<u64>,
    units: Units,
    #[serde(default)]
    parameters: Option<Value>,
    #[serde(default)]
    output: Option<PathBuf>,
}

/// A run after merging the config file with command-line overrides.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: Option<u64>,
    pub units: Units,
    pub parameters: Value,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        Self {
            experiment,
            seed: None,
            units: Units::default(),
            parameters: Value::Object(Default::default()),
            output: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("{path}: {}", e.into_inner()))
        })?;
        let parameters = raw.parameters.unwrap_or_else(|| Value::Object(Default::default()));
        if !parameters.is_object() {
            return Err(CliError::Config("parameters: expected an object".into()));
        }
        Ok(Self { experiment: raw.experiment, seed: raw.seed, units: raw.units, parameters, output: raw.output })
    }

    /// Typed experiment parameters; errors name the offending field.
    pub fn parameters<P: DeserializeOwned>(&self) -> Result<P, CliError> {
        serde_path_to_error::deserialize(self.parameters.clone()).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("parameters.{path}: {}", e.into_inner()))
        })
    }

    /// Sets `parameters.<key>` unless the experiment has no such field.
    pub fn override_parameter(&mut self, key: &str, value: Value) {
        if let Value::Object(map) = &mut self.parameters {
            map.insert(key.to_owned(), value);
        }
    }
}

/// Fails with a field-level diagnostic unless `ok`.
pub fn require(ok: bool, field: &str, msg: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("parameters.{field}: {msg}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct P {
        #[allow(dead_code)]
        n: usize,
    }

    #[test]
    fn parse_reports_field_paths() {
        let err = RunConfig::parse(r#"{"experiment": "sweep", "units": {"frequency": "mhz"}}"#).unwrap_err();
        assert!(err.to_string().contains("units.frequency"), "{err}");
        let err = RunConfig::parse(r#"{"experiment": "sweep"}"#).unwrap_err();
        assert!(err.to_string().contains("units"), "{err}");
        let err = RunConfig::parse(r#"{"experiment": "nope", "units": {"frequency": "hz"}}"#).unwrap_err();
        assert!(err.to_string().contains("experiment"), "{err}");

        let cfg =
            RunConfig::parse(r#"{"experiment": "ratio_scan", "units": {"frequency": "hz"}, "parameters": {"n": -1}}"#)
                .unwrap();
        assert_eq!(cfg.experiment, Experiment::Ratio);
        let err = cfg.parameters::<P>().unwrap_err();
        assert!(err.to_string().contains(": parameters.n: invalid value"), "{err}");
    }

    #[test]
    fn units_convert_to_angular() {
        let hz = Units { frequency: FrequencyUnit::Hz };
        assert!((hz.angular(5.0) - TAU * 5.0).abs() < 1e-15);
        assert_eq!(Units { frequency: FrequencyUnit::RadPerS }.angular(3.0), 3.0);
    }
}
