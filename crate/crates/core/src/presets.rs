//! Scenario presets. Each expands to a full `RunConfig`; a user config can
//! override any section afterwards.

use std::f64::consts::PI;

use crate::config::{RunConfig, RunSection, StabilitySection};
use crate::domain::{DomainSpec, VectorKind};
use crate::dynamics::{InitialSpec, PhysParams, ScalarAmplitude, Scheme, StepperConfig, VectorAmplitude};
use crate::error::{Result, SimError};

pub const PRESETS: [(&str, &str); 7] = [
    (
        "equilibrium",
        "u = v = 0, theta = 1: an exact stationary state; every sampled row is constant",
    ),
    (
        "decoupled_wave",
        "nu = 0 with divergence-free data only: pure wave dynamics, integrated exactly",
    ),
    (
        "pure_heat",
        "nu = 0, u = v = 0, perturbed temperature: pure diffusion with entropy production",
    ),
    (
        "small_data",
        "coupled run in the regime where the Fisher functional is non-increasing",
    ),
    (
        "gamma_oscillation",
        "coupled run dominated by rotational modes; traces follow the closed-form oscillators",
    ),
    (
        "stability_pair",
        "base problem plus perturbed reruns for the continuous-dependence ratio table",
    ),
    (
        "theta_limit",
        "long horizon: curl-free displacement decays and the temperature approaches its limit",
    ),
];

/// Names and one-line descriptions of the built-in presets.
pub fn list_presets() -> &'static [(&'static str, &'static str)] {
    &PRESETS
}

fn domain(cutoff: usize, grid_n: usize) -> DomainSpec {
    DomainSpec {
        lx: PI,
        ly: PI,
        cutoff,
        grid_n,
    }
}

fn params(nu: f64) -> PhysParams {
    PhysParams {
        mu: 1.0,
        lambda: 1.0,
        nu,
    }
}

fn stepper(dt: f64, sample_every: usize) -> StepperConfig {
    StepperConfig {
        dt,
        scheme: Scheme::StrangExact,
        sample_every,
    }
}

fn run(t_end: f64) -> RunSection {
    RunSection {
        t_end,
        csv_path: None,
        summary_path: None,
    }
}

fn grad(k: usize, l: usize, amplitude: f64) -> VectorAmplitude {
    VectorAmplitude {
        kind: VectorKind::Gradient,
        k,
        l,
        amplitude,
    }
}

fn rot(k: usize, l: usize, amplitude: f64) -> VectorAmplitude {
    VectorAmplitude {
        kind: VectorKind::Rotational,
        k,
        l,
        amplitude,
    }
}

fn theta(k: usize, l: usize, amplitude: f64) -> ScalarAmplitude {
    ScalarAmplitude { k, l, amplitude }
}

/// Expands a preset name into a full configuration.
pub fn expand(name: &str) -> Result<RunConfig> {
    let cfg = match name {
        "equilibrium" => RunConfig {
            preset: Some(name.to_string()),
            domain: domain(4, 12),
            params: params(0.5),
            initial: InitialSpec {
                u_modes: vec![],
                v_modes: vec![],
                theta_base: 1.0,
                theta_modes: vec![],
            },
            stepper: stepper(1e-3, 10),
            run: run(1.0),
            stability: None,
        },
        "decoupled_wave" => RunConfig {
            preset: Some(name.to_string()),
            domain: domain(4, 12),
            params: params(0.0),
            initial: InitialSpec {
                u_modes: vec![rot(1, 1, 0.5)],
                v_modes: vec![rot(1, 2, 0.2)],
                theta_base: 1.0,
                theta_modes: vec![],
            },
            stepper: stepper(1e-3, 10),
            run: run(10.0),
            stability: None,
        },
        "pure_heat" => RunConfig {
            preset: Some(name.to_string()),
            domain: domain(4, 12),
            params: params(0.0),
            initial: InitialSpec {
                u_modes: vec![],
                v_modes: vec![],
                theta_base: 1.0,
                theta_modes: vec![theta(1, 0, 0.5)],
            },
            stepper: stepper(1e-3, 10),
            run: run(5.0),
            stability: None,
        },
        "small_data" => RunConfig {
            preset: Some(name.to_string()),
            domain: domain(16, 48),
            params: params(0.5),
            initial: InitialSpec {
                u_modes: vec![grad(1, 0, 0.04), grad(1, 1, 0.02), rot(1, 1, 0.06)],
                v_modes: vec![grad(0, 1, 0.03), rot(2, 1, 0.02)],
                theta_base: 1.0,
                theta_modes: vec![theta(1, 0, 0.04), theta(0, 1, 0.02)],
            },
            stepper: stepper(1e-3, 10),
            run: run(50.0),
            stability: None,
        },
        "gamma_oscillation" => RunConfig {
            preset: Some(name.to_string()),
            domain: domain(8, 24),
            params: params(0.5),
            initial: InitialSpec {
                u_modes: vec![rot(1, 1, 0.8), grad(1, 0, 0.05)],
                v_modes: vec![rot(2, 2, 0.3)],
                theta_base: 1.0,
                theta_modes: vec![theta(1, 1, 0.03)],
            },
            stepper: stepper(1e-3, 10),
            run: run(50.0),
            stability: None,
        },
        "stability_pair" => RunConfig {
            preset: Some(name.to_string()),
            domain: domain(8, 24),
            params: params(0.5),
            initial: InitialSpec {
                u_modes: vec![grad(1, 0, 0.05), rot(1, 1, 0.05)],
                v_modes: vec![grad(1, 1, 0.03)],
                theta_base: 1.0,
                theta_modes: vec![theta(1, 0, 0.04)],
            },
            stepper: stepper(1e-3, 10),
            run: run(5.0),
            stability: Some(StabilitySection {
                deltas: vec![1e-2, 1e-3, 1e-4],
            }),
        },
        "theta_limit" => RunConfig {
            preset: Some(name.to_string()),
            domain: domain(8, 24),
            params: params(0.5),
            initial: InitialSpec {
                u_modes: vec![grad(1, 0, 0.08), grad(0, 1, 0.05)],
                v_modes: vec![grad(1, 0, 0.05)],
                theta_base: 1.0,
                theta_modes: vec![theta(1, 0, 0.05)],
            },
            stepper: stepper(1e-3, 50),
            run: run(200.0),
            stability: None,
        },
        other => {
            return Err(SimError::Config(format!(
                "unknown preset `{other}`; available: {}",
                PRESETS
                    .iter()
                    .map(|(n, _)| *n)
                    .collect::<Vec<_>>()
                    .join(", ")
            )))
        }
    };
    Ok(cfg)
}
