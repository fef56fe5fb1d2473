//! Scenario configuration: one JSON document per experiment.

use lohe_core::{Method, StepperConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MethodName {
    #[serde(rename = "CF2")]
    Cf2,
    LieEuler,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Self {
        match m {
            MethodName::Cf2 => Method::Cf2,
            MethodName::LieEuler => Method::LieEuler,
        }
    }
}

/// How the frequency generators `A_j` are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum HamiltonianMode {
    /// `A_j = 0`.
    Zero,
    /// One Gaussian draw with unit scale, shared by every oscillator.
    Identical,
    /// Independent Gaussian draws.
    Gaussian { sigma: f64 },
}

/// How the initial states `U_j(0)` are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InitMode {
    Haar,
    /// `U_j = exp(r·ξ_j·B_j/‖B_j‖₂)·U_c` with `U_c` Haar from `center_seed`.
    Cluster { center_seed: u64, radius: f64 },
}

fn default_method() -> MethodName {
    MethodName::Cf2
}

fn default_record_every() -> usize {
    10
}

fn default_repetitions() -> usize {
    1
}

fn default_hamiltonian() -> HamiltonianMode {
    HamiltonianMode::Zero
}

fn default_init() -> InitMode {
    InitMode::Haar
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub d: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_reference: Option<usize>,
    pub kappa: f64,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default = "default_method")]
    pub method: MethodName,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default = "default_hamiltonian")]
    pub hamiltonian_mode: HamiltonianMode,
    #[serde(default = "default_init")]
    pub init_mode: InitMode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Particle counts for `converge` and `field-fluctuation`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    /// Coupling strengths for `practical-sync`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_list: Option<Vec<f64>>,
    /// Rescale independent generators so their spread equals this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Monte-Carlo sample count for `field-fluctuation` (default 1000).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retract_every: Option<usize>,
}

fn range_error(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {msg}"))
}

fn positive(key: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(range_error(key, format!("must be a positive finite number, got {x}")))
    }
}

fn at_least_one(key: &str, x: usize) -> Result<(), CliError> {
    if x >= 1 {
        Ok(())
    } else {
        Err(range_error(key, "must be at least 1"))
    }
}

/// Parses and validates a scenario document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            CliError::Config(e.inner().to_string())
        } else {
            CliError::Config(format!("{path}: {}", e.inner()))
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        at_least_one("d", self.d)?;
        at_least_one("n", self.n)?;
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(range_error("kappa", format!("must be nonnegative, got {}", self.kappa)));
        }
        positive("t_end", self.t_end)?;
        positive("dt", self.dt)?;
        at_least_one("record_every", self.record_every)?;
        at_least_one("repetitions", self.repetitions)?;
        if let Some(p) = self.p_reference {
            at_least_one("p_reference", p)?;
        }
        if let Some(r) = self.retract_every {
            at_least_one("retract_every", r)?;
        }
        if let Some(s) = self.samples {
            if s < 2 {
                return Err(range_error("samples", "must be at least 2"));
            }
        }
        if let HamiltonianMode::Gaussian { sigma } = self.hamiltonian_mode {
            positive("hamiltonian_mode.gaussian.sigma", sigma)?;
        }
        if let InitMode::Cluster { radius, .. } = self.init_mode {
            positive("init_mode.cluster.radius", radius)?;
        }
        if let Some(alpha) = self.alpha {
            positive("alpha", alpha)?;
            if !matches!(self.hamiltonian_mode, HamiltonianMode::Gaussian { .. }) {
                return Err(range_error(
                    "alpha",
                    "a frequency spread can only be imposed on gaussian generators",
                ));
            }
        }
        if let Some(list) = &self.n_list {
            if list.is_empty() {
                return Err(range_error("n_list", "must not be empty"));
            }
            for (i, &n) in list.iter().enumerate() {
                at_least_one(&format!("n_list[{i}]"), n)?;
            }
            if list.windows(2).any(|w| w[1] <= w[0]) {
                return Err(range_error("n_list", "must be strictly increasing"));
            }
        }
        if let Some(list) = &self.kappa_list {
            if list.is_empty() {
                return Err(range_error("kappa_list", "must not be empty"));
            }
            for (i, &k) in list.iter().enumerate() {
                positive(&format!("kappa_list[{i}]"), k)?;
            }
        }
        self.stepper(self.t_end)
            .map_err(|e| range_error("t_end", e))?;
        Ok(())
    }

    /// Integrator settings over `[0, t_end]`.
    pub fn stepper(&self, t_end: f64) -> lohe_core::Result<StepperConfig<f64>> {
        let cfg = StepperConfig::new(self.method.into(), self.dt, t_end, self.record_every)?;
        match self.retract_every {
            Some(r) => cfg.with_retract_every(r),
            None => Ok(cfg),
        }
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(1000)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"d":2,"n":16,"kappa":1.0,"t_end":1.0,"dt":0.001}"#;

    #[test]
    fn defaults_applied() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.method, MethodName::Cf2);
        assert_eq!(cfg.record_every, 10);
        assert_eq!(cfg.repetitions, 1);
        assert_eq!(cfg.hamiltonian_mode, HamiltonianMode::Zero);
        assert_eq!(cfg.init_mode, InitMode::Haar);
    }

    #[test]
    fn negative_dt_names_key() {
        let err = parse_config(r#"{"d":2,"n":16,"kappa":1.0,"t_end":1.0,"dt":-1}"#).unwrap_err();
        assert!(err.to_string().contains("dt"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config(r#"{"d":2,"n":16,"kappa":1.0,"t_end":1.0,"dt":0.001,"dtt":1}"#)
            .unwrap_err();
        assert!(err.to_string().contains("dtt"), "{err}");
        let err = parse_config(
            r#"{"d":2,"n":16,"kappa":1.0,"t_end":1.0,"dt":0.001,
                "init_mode":{"cluster":{"center_seed":1,"radius":0.5,"r":1}}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("init_mode"), "{err}");
    }

    #[test]
    fn modes_parse() {
        let cfg = parse_config(
            r#"{"d":2,"n":16,"kappa":1.0,"t_end":1.0,"dt":0.001,
                "hamiltonian_mode":{"gaussian":{"sigma":0.5}},
                "init_mode":{"cluster":{"center_seed":3,"radius":0.4}},
                "method":"LieEuler"}"#,
        )
        .unwrap();
        assert_eq!(cfg.hamiltonian_mode, HamiltonianMode::Gaussian { sigma: 0.5 });
        assert_eq!(
            cfg.init_mode,
            InitMode::Cluster {
                center_seed: 3,
                radius: 0.4
            }
        );
        assert_eq!(cfg.method, MethodName::LieEuler);
        let cfg = parse_config(
            r#"{"d":2,"n":16,"kappa":1.0,"t_end":1.0,"dt":0.001,"hamiltonian_mode":"identical"}"#,
        )
        .unwrap();
        assert_eq!(cfg.hamiltonian_mode, HamiltonianMode::Identical);
    }

    #[test]
    fn list_validation() {
        let base = r#""d":2,"n":16,"kappa":1.0,"t_end":1.0,"dt":0.001"#;
        assert!(parse_config(&format!("{{{base},\"n_list\":[8,8]}}")).is_err());
        assert!(parse_config(&format!("{{{base},\"kappa_list\":[1.0,-2.0]}}")).is_err());
        let misaligned = r#"{"d":2,"n":16,"kappa":1.0,"t_end":1.0005,"dt":0.001}"#;
        assert!(parse_config(misaligned).unwrap_err().to_string().contains("t_end"));
    }
}
