//! Run configuration: JSON schema, preset expansion, validation.
//!
//! A config is a JSON object with sections `domain`, `params`, `initial`,
//! `stepper`, `run`, an optional `stability` section, and an optional
//! `preset` name. When `preset` is given, its sections are the defaults and
//! any section present in the text replaces the preset's section wholesale.
//! Unknown keys are rejected with a path-qualified message.

use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::dynamics::{InitialSpec, PhysParams, StepperConfig};
use crate::error::{Result, SimError};
use crate::presets;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub t_end: f64,
    /// Time-series CSV destination; default `run.csv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<String>,
    /// Summary JSON destination; default `summary.json`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary_path: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    /// Perturbation sizes for the continuous-dependence table.
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub domain: DomainSpec,
    pub params: PhysParams,
    pub initial: InitialSpec,
    pub stepper: StepperConfig,
    pub run: RunSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilitySection>,
}

/// The raw shape of a config file: everything optional so presets can fill
/// the gaps.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    preset: Option<String>,
    domain: Option<DomainSpec>,
    params: Option<PhysParams>,
    initial: Option<InitialSpec>,
    stepper: Option<StepperConfig>,
    run: Option<RunSection>,
    stability: Option<StabilitySection>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.domain
            .validate()
            .map_err(|e| SimError::Config(format!("domain: {e}")))?;
        self.params
            .validate()
            .map_err(|e| SimError::Config(format!("params: {e}")))?;
        self.stepper
            .validate()
            .map_err(|e| SimError::Config(format!("stepper: {e}")))?;
        if !(self.run.t_end > 0.0 && self.run.t_end.is_finite()) {
            return Err(SimError::Config(format!(
                "run.t_end must be positive and finite, got {}",
                self.run.t_end
            )));
        }
        if let Some(st) = &self.stability {
            if st.deltas.is_empty() {
                return Err(SimError::Config(
                    "stability.deltas must not be empty".to_string(),
                ));
            }
            for &d in &st.deltas {
                if !(d > 0.0 && d.is_finite()) {
                    return Err(SimError::Config(format!(
                        "stability.deltas entries must be positive, got {d}"
                    )));
                }
            }
        }
        for m in &self.initial.theta_modes {
            if m.k > self.domain.cutoff || m.l > self.domain.cutoff {
                return Err(SimError::Config(format!(
                    "initial.theta_modes: mode ({}, {}) exceeds cutoff {}",
                    m.k, m.l, self.domain.cutoff
                )));
            }
        }
        Ok(())
    }
}

/// Parses and validates a config, expanding the preset first when named.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut de = serde_json::Deserializer::from_str(text);
    let partial: PartialConfig = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| SimError::Config(format!("at {}: {}", e.path(), e.inner())))?;

    let base = match &partial.preset {
        Some(name) => Some(presets::expand(name)?),
        None => None,
    };
    fn take<T>(own: Option<T>, from_base: Option<T>, field: &str) -> Result<T> {
        own.or(from_base).ok_or_else(|| {
            SimError::Config(format!("missing section `{field}` (no preset supplies it)"))
        })
    }
    let config = RunConfig {
        preset: partial.preset.clone(),
        domain: take(partial.domain, base.as_ref().map(|b| b.domain), "domain")?,
        params: take(partial.params, base.as_ref().map(|b| b.params), "params")?,
        initial: take(
            partial.initial,
            base.as_ref().map(|b| b.initial.clone()),
            "initial",
        )?,
        stepper: take(partial.stepper, base.as_ref().map(|b| b.stepper), "stepper")?,
        run: take(partial.run, base.as_ref().map(|b| b.run.clone()), "run")?,
        stability: partial
            .stability
            .or_else(|| base.as_ref().and_then(|b| b.stability.clone())),
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn minimal_preset_config_gets_documented_defaults() {
        let cfg = parse_config(r#"{"preset": "small_data"}"#).unwrap();
        assert_eq!(cfg.domain.lx, PI);
        assert_eq!(cfg.domain.ly, PI);
        assert_eq!(cfg.domain.cutoff, 16);
        assert_eq!(cfg.domain.grid_n, 48);
        assert_eq!(cfg.params.mu, 1.0);
        assert_eq!(cfg.params.lambda, 1.0);
        assert_eq!(cfg.params.nu, 0.5);
        assert_eq!(cfg.stepper.dt, 1e-3);
        assert_eq!(cfg.run.t_end, 50.0);
    }

    #[test]
    fn preset_sections_can_be_overridden() {
        let cfg = parse_config(
            r#"{"preset": "small_data", "run": {"t_end": 2.5, "csv_path": "x.csv"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.run.t_end, 2.5);
        assert_eq!(cfg.domain.cutoff, 16);
    }

    #[test]
    fn invalid_lame_moduli_are_named() {
        let text = r#"{
            "preset": "small_data",
            "params": {"mu": -1.0, "lambda": 1.0, "nu": 0.5}
        }"#;
        let err = parse_config(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("mu > 0"), "message was: {msg}");
        assert!(msg.contains("2*mu + 2*lambda > 0"), "message was: {msg}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let err = parse_config(r#"{"preset": "small_data", "extra": 1}"#).unwrap_err();
        assert!(matches!(err, SimError::Config(_)));
        let err =
            parse_config(r#"{"preset": "small_data", "stepper": {"dt": 1e-3, "bogus": 2}}"#)
                .unwrap_err();
        assert!(err.to_string().contains("stepper"), "{err}");
    }

    #[test]
    fn missing_sections_without_preset_fail() {
        let err = parse_config(r#"{"run": {"t_end": 1.0}}"#).unwrap_err();
        assert!(err.to_string().contains("domain"), "{err}");
    }

    #[test]
    fn unknown_preset_fails() {
        assert!(parse_config(r#"{"preset": "nope"}"#).is_err());
    }

    #[test]
    fn full_explicit_config_parses() {
        let text = r#"{
            "domain": {"lx": 3.141592653589793, "ly": 3.141592653589793, "cutoff": 4, "grid_n": 12},
            "params": {"mu": 1.0, "lambda": 0.5, "nu": 0.2},
            "initial": {
                "u_modes": [{"kind": "gradient", "k": 1, "l": 0, "amplitude": 0.1}],
                "v_modes": [],
                "theta_base": 1.0,
                "theta_modes": [{"k": 1, "l": 1, "amplitude": 0.05}]
            },
            "stepper": {"dt": 0.001, "scheme": "strang_exact", "sample_every": 5},
            "run": {"t_end": 1.0}
        }"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.initial.u_modes.len(), 1);
        assert!(cfg.stability.is_none());
    }
}
