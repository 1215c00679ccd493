//! Time integration of the semi-discrete coupled wave-heat system.
//!
//! In coefficient space the system splits into
//!
//! * a linear part that is diagonal per mode: each vector mode is a harmonic
//!   oscillator with frequency `sqrt(c * xi)` (`c = 2 mu + lambda` for
//!   gradient modes, `c = mu` for rotational modes) and each temperature
//!   mode decays like `exp(-xi t)`;
//! * the bilinear coupling `v_t = -nu grad(theta)`,
//!   `theta_t = -nu theta div(v)`.
//!
//! The default `StrangExact` scheme composes exact linear half-steps with an
//! explicit midpoint step on the coupling, so it is second order overall,
//! has no linear stability limit, and reproduces the decoupled dynamics to
//! roundoff. `Rk4Reference` is classical RK4 on the full right-hand side and
//! exists as an independent route for convergence checks; being explicit on
//! the stiff heat term it needs `dt` well under `2.78 / max(xi)`.
//!
//! The temperature is kept strictly positive on the collocation grid; a
//! violation aborts the step with an error rather than being repaired.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::basis::{div, grad, Basis};
use crate::domain::VectorKind;
use crate::error::{Result, SimError};
use crate::field::{ScalarField, VectorField};

/// Lame moduli and coupling constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysParams {
    pub mu: f64,
    pub lambda: f64,
    pub nu: f64,
}

impl PhysParams {
    pub fn validate(&self) -> Result<()> {
        // d = 2 instance of "mu > 0 and 2 mu + d lambda > 0".
        if !(self.mu > 0.0 && self.mu.is_finite()) || 2.0 * self.mu + 2.0 * self.lambda <= 0.0 {
            return Err(SimError::InvalidParameter(format!(
                "Lame moduli must satisfy mu > 0 and 2*mu + 2*lambda > 0 (d = 2), got mu = {}, lambda = {}",
                self.mu, self.lambda
            )));
        }
        if !self.lambda.is_finite() || !self.nu.is_finite() {
            return Err(SimError::InvalidParameter(
                "lambda and nu must be finite".to_string(),
            ));
        }
        Ok(())
    }

    /// Wave speed coefficient for gradient modes.
    pub fn c_gradient(&self) -> f64 {
        2.0 * self.mu + self.lambda
    }

    /// Wave speed coefficient for rotational modes.
    pub fn c_rotational(&self) -> f64 {
        self.mu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    StrangExact,
    Rk4Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperConfig {
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
}

fn default_sample_every() -> usize {
    1
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimError::InvalidParameter(format!(
                "dt must be positive and finite, got {}",
                self.dt
            )));
        }
        if self.sample_every < 1 {
            return Err(SimError::InvalidParameter(
                "sample_every must be >= 1".to_string(),
            ));
        }
        Ok(())
    }

    /// Advisory wave-CFL check for the RK4 reference scheme. StrangExact has
    /// no linear stability limit.
    pub fn rk4_wave_cfl_ok(&self, max_xi: f64, params: &PhysParams) -> bool {
        self.dt * (max_xi * params.c_gradient()).sqrt() < 2.0
    }
}

/// The full discrete state: time plus the coefficients of displacement,
/// velocity, and temperature. All three fields share one domain, and the
/// temperature is strictly positive on the grid at every accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub u: VectorField,
    pub v: VectorField,
    pub theta: ScalarField,
}

/// Initial data as mode-amplitude lists.
///
/// `u_modes` / `v_modes` amplitudes are coefficients on the orthonormalized
/// vector modes. `theta_modes` amplitudes multiply the raw cosine profile
/// `cos(k pi x / lx) cos(l pi y / ly)` (peak value = amplitude), on top of
/// the constant `theta_base`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default)]
    pub u_modes: Vec<VectorAmplitude>,
    #[serde(default)]
    pub v_modes: Vec<VectorAmplitude>,
    pub theta_base: f64,
    #[serde(default)]
    pub theta_modes: Vec<ScalarAmplitude>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorAmplitude {
    pub kind: VectorKind,
    pub k: usize,
    pub l: usize,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarAmplitude {
    pub k: usize,
    pub l: usize,
    pub amplitude: f64,
}

/// Assembles a `SimState` at `t = 0`, rejecting unknown modes and any
/// temperature whose grid minimum is not strictly positive.
pub fn make_initial(basis: &Basis, spec: &InitialSpec) -> Result<SimState> {
    let d = basis.domain();
    let mut u = VectorField::zeros(d);
    for m in &spec.u_modes {
        // Read-then-set so repeated entries accumulate.
        let prev = checked_get(&u, m)?;
        u.set(m.kind, m.k, m.l, prev + m.amplitude)?;
    }
    let mut v = VectorField::zeros(d);
    for m in &spec.v_modes {
        let prev = checked_get(&v, m)?;
        v.set(m.kind, m.k, m.l, prev + m.amplitude)?;
    }

    let mut theta = ScalarField::zeros(d);
    theta.set(0, 0, spec.theta_base * d.area().sqrt());
    for m in &spec.theta_modes {
        if m.k == 0 && m.l == 0 {
            return Err(SimError::UnknownMode {
                detail: "theta perturbation on (0, 0); fold it into theta_base".to_string(),
            });
        }
        if m.k > d.cutoff || m.l > d.cutoff {
            return Err(SimError::UnknownMode {
                detail: format!("theta mode ({}, {}) with cutoff {}", m.k, m.l, d.cutoff),
            });
        }
        let coeff = m.amplitude * d.cos_norm_x(m.k) * d.cos_norm_y(m.l);
        theta.set(m.k, m.l, theta.get(m.k, m.l) + coeff);
    }

    let min_theta = grid_min(&basis.samples(&theta));
    if min_theta <= 0.0 {
        return Err(SimError::NonPositiveTemperature {
            t: 0.0,
            min_theta,
        });
    }
    Ok(SimState {
        t: 0.0,
        u,
        v,
        theta,
    })
}

fn checked_get(f: &VectorField, m: &VectorAmplitude) -> Result<f64> {
    let k_max = f.domain().cutoff;
    let valid = match m.kind {
        VectorKind::Gradient => m.k <= k_max && m.l <= k_max && m.k + m.l >= 1,
        VectorKind::Rotational => (1..=k_max).contains(&m.k) && (1..=k_max).contains(&m.l),
    };
    if !valid {
        return Err(SimError::UnknownMode {
            detail: format!("{:?} ({}, {}) with cutoff {}", m.kind, m.k, m.l, k_max),
        });
    }
    Ok(f.get(m.kind, m.k, m.l))
}

fn grid_min(samples: &Array2<f64>) -> f64 {
    samples.iter().fold(f64::INFINITY, |m, &v| m.min(v))
}

/// Exact propagator of the linear part over a fixed interval, cached as
/// per-mode tables so repeated steps cost one multiply-add per coefficient.
#[derive(Debug, Clone)]
struct LinearPropagator {
    h: f64,
    cos_g: Array2<f64>,
    sinc_g: Array2<f64>,
    wsin_g: Array2<f64>,
    cos_r: Array2<f64>,
    sinc_r: Array2<f64>,
    wsin_r: Array2<f64>,
    decay: Array2<f64>,
}

impl LinearPropagator {
    fn new(basis: &Basis, params: &PhysParams, h: f64) -> Self {
        let d = basis.domain();
        let m = d.cutoff + 1;
        let mut tables = LinearPropagator {
            h,
            cos_g: Array2::zeros((m, m)),
            sinc_g: Array2::zeros((m, m)),
            wsin_g: Array2::zeros((m, m)),
            cos_r: Array2::zeros((m, m)),
            sinc_r: Array2::zeros((m, m)),
            wsin_r: Array2::zeros((m, m)),
            decay: Array2::zeros((m, m)),
        };
        for k in 0..m {
            for l in 0..m {
                let xi = d.xi(k, l);
                let fill = |c: f64| -> (f64, f64, f64) {
                    let w = (c * xi).sqrt();
                    if w == 0.0 {
                        // Frequency-zero modes translate: d -> d + h d'.
                        (1.0, h, 0.0)
                    } else {
                        let (s, cos) = (w * h).sin_cos();
                        (cos, s / w, w * s)
                    }
                };
                let (c, s, ws) = fill(params.c_gradient());
                tables.cos_g[[k, l]] = c;
                tables.sinc_g[[k, l]] = s;
                tables.wsin_g[[k, l]] = ws;
                let (c, s, ws) = fill(params.c_rotational());
                tables.cos_r[[k, l]] = c;
                tables.sinc_r[[k, l]] = s;
                tables.wsin_r[[k, l]] = ws;
                tables.decay[[k, l]] = (-xi * h).exp();
            }
        }
        tables
    }

    fn apply(&self, s: &SimState) -> SimState {
        let mut u = s.u.clone();
        let mut v = s.v.clone();
        let mut theta = s.theta.clone();
        rotate(
            u.grad_coeffs_mut(),
            v.grad_coeffs_mut(),
            &self.cos_g,
            &self.sinc_g,
            &self.wsin_g,
        );
        rotate(
            u.rot_coeffs_mut(),
            v.rot_coeffs_mut(),
            &self.cos_r,
            &self.sinc_r,
            &self.wsin_r,
        );
        {
            let th = theta.coeffs_mut().as_slice_mut().expect("standard layout");
            let dec = self.decay.as_slice().expect("standard layout");
            for i in 0..th.len() {
                th[i] *= dec[i];
            }
        }
        SimState {
            t: s.t + self.h,
            u,
            v,
            theta,
        }
    }
}

fn rotate(
    u: &mut Array2<f64>,
    v: &mut Array2<f64>,
    cos: &Array2<f64>,
    sinc: &Array2<f64>,
    wsin: &Array2<f64>,
) {
    let u = u.as_slice_mut().expect("standard layout");
    let v = v.as_slice_mut().expect("standard layout");
    let c = cos.as_slice().expect("standard layout");
    let s = sinc.as_slice().expect("standard layout");
    let ws = wsin.as_slice().expect("standard layout");
    for i in 0..u.len() {
        let (d, dp) = (u[i], v[i]);
        u[i] = d * c[i] + dp * s[i];
        v[i] = -d * ws[i] + dp * c[i];
    }
}

/// Exact update of the linear part over an interval `h`; the coupling is
/// untouched. Per vector mode this is the closed-form harmonic oscillator,
/// per temperature mode the exact exponential decay.
pub fn linear_substep(basis: &Basis, s: &SimState, params: &PhysParams, h: f64) -> SimState {
    LinearPropagator::new(basis, params, h).apply(s)
}

/// The bilinear coupling right-hand side.
///
/// `dv = -nu grad(theta)` is an exact coefficient map onto gradient modes.
/// `dtheta` is the projection of `-nu theta div(v)`: both factors are
/// sampled on the collocation grid, multiplied pointwise, and projected
/// back; with `grid_n >= 2 cutoff + 1` the retained coefficients are exact
/// (no aliasing).
pub fn coupling_rhs(basis: &Basis, s: &SimState, params: &PhysParams) -> (VectorField, ScalarField) {
    let nu = params.nu;
    let mut dv = grad(&s.theta);
    dv.scale(-nu);

    let theta_samples = basis.samples(&s.theta);
    let div_v_samples = basis.samples(&div(&s.v));
    let mut prod = theta_samples;
    {
        let p = prod.as_slice_mut().expect("standard layout");
        let dvs = div_v_samples.as_slice().expect("standard layout");
        for i in 0..p.len() {
            p[i] = -nu * p[i] * dvs[i];
        }
    }
    let dtheta = basis
        .forward(&prod)
        .expect("samples produced on the basis grid");
    (dv, dtheta)
}

fn check_state(basis: &Basis, s: &SimState) -> Result<()> {
    if !(s.u.is_finite() && s.v.is_finite() && s.theta.is_finite()) {
        return Err(SimError::NumericalBlowup { t: s.t });
    }
    let min_theta = grid_min(&basis.samples(&s.theta));
    if min_theta <= 0.0 {
        return Err(SimError::NonPositiveTemperature { t: s.t, min_theta });
    }
    Ok(())
}

fn strang_step(
    basis: &Basis,
    s: &SimState,
    params: &PhysParams,
    dt: f64,
    half: &LinearPropagator,
) -> Result<SimState> {
    let s1 = half.apply(s);

    // Explicit midpoint on the coupling; u is frozen in this substep.
    let (k1v, k1t) = coupling_rhs(basis, &s1, params);
    let mut mid = s1.clone();
    mid.v.axpy(0.5 * dt, &k1v);
    mid.theta.axpy(0.5 * dt, &k1t);
    let (k2v, k2t) = coupling_rhs(basis, &mid, params);

    let mut s2 = s1;
    s2.v.axpy(dt, &k2v);
    s2.theta.axpy(dt, &k2t);

    let out = half.apply(&s2);
    check_state(basis, &out)?;
    Ok(out)
}

struct Deriv {
    du: VectorField,
    dv: VectorField,
    dtheta: ScalarField,
}

fn full_rhs(basis: &Basis, s: &SimState, params: &PhysParams) -> Deriv {
    let d = basis.domain();
    let m = d.cutoff + 1;
    let (mut dv, mut dtheta) = coupling_rhs(basis, s, params);
    for k in 0..m {
        for l in 0..m {
            let xi = d.xi(k, l);
            dv.grad_coeffs_mut()[[k, l]] -= params.c_gradient() * xi * s.u.grad_coeffs()[[k, l]];
            dv.rot_coeffs_mut()[[k, l]] -= params.c_rotational() * xi * s.u.rot_coeffs()[[k, l]];
            let c = dtheta.get(k, l);
            dtheta.set(k, l, c - xi * s.theta.get(k, l));
        }
    }
    Deriv {
        du: s.v.clone(),
        dv,
        dtheta,
    }
}

fn state_plus(s: &SimState, k: &Deriv, a: f64) -> SimState {
    let mut out = s.clone();
    out.u.axpy(a, &k.du);
    out.v.axpy(a, &k.dv);
    out.theta.axpy(a, &k.dtheta);
    out
}

fn rk4_step(basis: &Basis, s: &SimState, params: &PhysParams, dt: f64) -> Result<SimState> {
    let k1 = full_rhs(basis, s, params);
    let k2 = full_rhs(basis, &state_plus(s, &k1, 0.5 * dt), params);
    let k3 = full_rhs(basis, &state_plus(s, &k2, 0.5 * dt), params);
    let k4 = full_rhs(basis, &state_plus(s, &k3, dt), params);
    let mut out = s.clone();
    let w = dt / 6.0;
    out.u.axpy(w, &k1.du);
    out.u.axpy(2.0 * w, &k2.du);
    out.u.axpy(2.0 * w, &k3.du);
    out.u.axpy(w, &k4.du);
    out.v.axpy(w, &k1.dv);
    out.v.axpy(2.0 * w, &k2.dv);
    out.v.axpy(2.0 * w, &k3.dv);
    out.v.axpy(w, &k4.dv);
    out.theta.axpy(w, &k1.dtheta);
    out.theta.axpy(2.0 * w, &k2.dtheta);
    out.theta.axpy(2.0 * w, &k3.dtheta);
    out.theta.axpy(w, &k4.dtheta);
    out.t = s.t + dt;
    check_state(basis, &out)?;
    Ok(out)
}

/// Advances one step with the configured scheme.
pub fn step(basis: &Basis, s: &SimState, params: &PhysParams, cfg: &StepperConfig) -> Result<SimState> {
    cfg.validate()?;
    match cfg.scheme {
        Scheme::StrangExact => {
            let half = LinearPropagator::new(basis, params, 0.5 * cfg.dt);
            strang_step(basis, s, params, cfg.dt, &half)
        }
        Scheme::Rk4Reference => rk4_step(basis, s, params, cfg.dt),
    }
}

/// Repeated stepping to `t_end` with a sample callback.
///
/// Emits the initial state, then every `sample_every`-th state, then the
/// final state. Sample times are assigned as `t0 + i * dt` so they do not
/// accumulate rounding. Deterministic for fixed inputs.
pub fn simulate(
    basis: &Basis,
    initial: &SimState,
    params: &PhysParams,
    cfg: &StepperConfig,
    t_end: f64,
    mut on_sample: impl FnMut(&SimState),
) -> Result<SimState> {
    params.validate()?;
    cfg.validate()?;
    if t_end < initial.t {
        return Err(SimError::InvalidParameter(format!(
            "t_end = {} is before the initial time {}",
            t_end, initial.t
        )));
    }
    check_state(basis, initial)?;
    on_sample(initial);
    if t_end == initial.t {
        return Ok(initial.clone());
    }
    let n_steps = ((t_end - initial.t) / cfg.dt - 1e-9).ceil().max(1.0) as usize;
    let half = match cfg.scheme {
        Scheme::StrangExact => Some(LinearPropagator::new(basis, params, 0.5 * cfg.dt)),
        Scheme::Rk4Reference => None,
    };
    let mut state = initial.clone();
    for i in 1..=n_steps {
        state = match &half {
            Some(h) => strang_step(basis, &state, params, cfg.dt, h)?,
            None => rk4_step(basis, &state, params, cfg.dt)?,
        };
        state.t = initial.t + i as f64 * cfg.dt;
        if i % cfg.sample_every == 0 || i == n_steps {
            on_sample(&state);
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use std::f64::consts::PI;

    fn setup(cutoff: usize) -> (Basis, PhysParams) {
        let d = DomainSpec::square(cutoff).unwrap();
        (
            Basis::new(&d),
            PhysParams {
                mu: 1.0,
                lambda: 1.0,
                nu: 0.5,
            },
        )
    }

    fn equilibrium(basis: &Basis, theta: f64) -> SimState {
        make_initial(
            basis,
            &InitialSpec {
                u_modes: vec![],
                v_modes: vec![],
                theta_base: theta,
                theta_modes: vec![],
            },
        )
        .unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(PhysParams {
            mu: -1.0,
            lambda: 1.0,
            nu: 0.0
        }
        .validate()
        .is_err());
        assert!(PhysParams {
            mu: 1.0,
            lambda: -1.5,
            nu: 0.0
        }
        .validate()
        .is_err());
        assert!(PhysParams {
            mu: 1.0,
            lambda: -0.5,
            nu: 2.0
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn linear_substep_half_period_oscillator() {
        // Gradient mode xi = 1, mu = lambda = 1 gives omega = sqrt(3);
        // after h = pi / sqrt(3) a (1, 0) unit displacement flips sign.
        let (basis, params) = setup(2);
        let mut s = equilibrium(&basis, 1.0);
        s.u.set(VectorKind::Gradient, 1, 0, 1.0).unwrap();
        let h = PI / 3.0f64.sqrt();
        let out = linear_substep(&basis, &s, &params, h);
        assert!((out.u.get(VectorKind::Gradient, 1, 0) + 1.0).abs() < 1e-12);
        assert!(out.v.get(VectorKind::Gradient, 1, 0).abs() < 1e-12);
    }

    #[test]
    fn linear_substep_theta_decay() {
        let (basis, params) = setup(2);
        let mut s = equilibrium(&basis, 1.0);
        s.theta.set(1, 1, 1.0); // xi = 2
        let out = linear_substep(&basis, &s, &params, 0.5);
        assert!((out.theta.get(1, 1) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn linear_substep_zero_interval_is_identity() {
        let (basis, params) = setup(2);
        let mut s = equilibrium(&basis, 2.0);
        s.u.set(VectorKind::Rotational, 1, 1, 0.7).unwrap();
        s.v.set(VectorKind::Gradient, 1, 1, -0.3).unwrap();
        let out = linear_substep(&basis, &s, &params, 0.0);
        assert_eq!(out, s);
    }

    #[test]
    fn coupling_vanishes_without_nu() {
        let (basis, _) = setup(2);
        let params = PhysParams {
            mu: 1.0,
            lambda: 1.0,
            nu: 0.0,
        };
        let mut s = equilibrium(&basis, 1.0);
        s.v.set(VectorKind::Gradient, 1, 1, 0.5).unwrap();
        s.theta.set(1, 0, 0.2);
        let (dv, dtheta) = coupling_rhs(&basis, &s, &params);
        assert_eq!(dv.l2_norm(), 0.0);
        assert_eq!(dtheta.l2_norm(), 0.0);
    }

    #[test]
    fn coupling_with_constant_theta_is_scaled_divergence() {
        let (basis, params) = setup(3);
        let mut s = equilibrium(&basis, 2.0);
        s.v.set(VectorKind::Gradient, 1, 0, 0.4).unwrap();
        s.v.set(VectorKind::Gradient, 2, 1, -0.3).unwrap();
        let (_, dtheta) = coupling_rhs(&basis, &s, &params);
        let mut expected = div(&s.v);
        expected.scale(-params.nu * 2.0);
        let err = dtheta.sub(&expected).unwrap().l2_norm();
        assert!(err <= 1e-13 * expected.l2_norm());
    }

    #[test]
    fn coupling_gradient_matches_quadrature_oracle() {
        // theta = cos x, v = 0: dv = -nu grad(theta) has only the
        // Gradient(1, 0) component. Oracle: midpoint quadrature of
        // (-nu grad cos x) . Gradient(1,0) with hand-written formulas.
        let (basis, params) = setup(2);
        let d = *basis.domain();
        let mut s = equilibrium(&basis, 1.0);
        let cosx_coeff = (PI * PI / 2.0).sqrt();
        s.theta.set(1, 0, cosx_coeff);
        let (dv, _) = coupling_rhs(&basis, &s, &params);

        let mode_norm = (PI * PI / 2.0).sqrt();
        let mut oracle = 0.0;
        let w = (d.lx / d.grid_n as f64) * (d.ly / d.grid_n as f64);
        for &x in &d.grid_x() {
            for _ in &d.grid_y() {
                // -nu * d/dx cos x = nu sin x; Gradient(1,0) x-component
                // is -sin x / mode_norm.
                oracle += (params.nu * x.sin()) * (-x.sin() / mode_norm) * w;
            }
        }
        assert!((dv.get(VectorKind::Gradient, 1, 0) - oracle).abs() < 1e-12);
        assert!((oracle - (-params.nu * cosx_coeff)).abs() < 1e-12);
        // Nothing elsewhere.
        let mut rest = dv.clone();
        rest.set(VectorKind::Gradient, 1, 0, 0.0).unwrap();
        assert!(rest.l2_norm() < 1e-13);
    }

    #[test]
    fn decoupled_run_is_exact_per_mode() {
        let (basis, _) = setup(2);
        let params = PhysParams {
            mu: 1.0,
            lambda: 1.0,
            nu: 0.0,
        };
        let mut s0 = equilibrium(&basis, 1.0);
        s0.u.set(VectorKind::Gradient, 1, 1, 0.8).unwrap();
        s0.v.set(VectorKind::Rotational, 1, 1, -0.5).unwrap();
        s0.theta.set(1, 0, 0.2 * (PI / 2.0f64).sqrt() * PI.sqrt());
        let cfg = StepperConfig {
            dt: 0.01,
            scheme: Scheme::StrangExact,
            sample_every: 1000,
        };
        let end = simulate(&basis, &s0, &params, &cfg, 10.0, |_| {}).unwrap();

        let t = 10.0;
        let d = basis.domain();
        // Gradient (1,1): omega = sqrt(3 * 2).
        let w = (params.c_gradient() * d.xi(1, 1)).sqrt();
        let expect_u = 0.8 * (w * t).cos();
        assert!((end.u.get(VectorKind::Gradient, 1, 1) - expect_u).abs() <= 1e-12);
        // Rotational (1,1): omega = sqrt(1 * 2), started from velocity.
        let w = (params.c_rotational() * d.xi(1, 1)).sqrt();
        let expect_u = -0.5 * (w * t).sin() / w;
        let expect_v = -0.5 * (w * t).cos();
        assert!((end.u.get(VectorKind::Rotational, 1, 1) - expect_u).abs() <= 1e-12);
        assert!((end.v.get(VectorKind::Rotational, 1, 1) - expect_v).abs() <= 1e-12);
        // Heat mode decays exactly.
        let expect_theta = s0.theta.get(1, 0) * (-d.xi(1, 0) * t).exp();
        assert!((end.theta.get(1, 0) - expect_theta).abs() <= 1e-12);
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let (basis, params) = setup(2);
        let s0 = equilibrium(&basis, 1.0);
        let cfg = StepperConfig {
            dt: 0.01,
            scheme: Scheme::StrangExact,
            sample_every: 1,
        };
        let mut s = s0.clone();
        for _ in 0..25 {
            s = step(&basis, &s, &params, &cfg).unwrap();
        }
        assert_eq!(s.u, s0.u);
        assert_eq!(s.v, s0.v);
        assert_eq!(s.theta, s0.theta);
    }

    #[test]
    fn strang_local_error_is_third_order() {
        let (basis, params) = setup(3);
        let mut s0 = equilibrium(&basis, 1.0);
        s0.u.set(VectorKind::Gradient, 1, 0, 0.1).unwrap();
        s0.v.set(VectorKind::Gradient, 1, 1, 0.05).unwrap();
        s0.theta.set(1, 0, 0.05 * (PI / 2.0f64).sqrt() * PI.sqrt());

        let one_step_err = |dt: f64| -> f64 {
            let cfg = StepperConfig {
                dt,
                scheme: Scheme::StrangExact,
                sample_every: 1,
            };
            let coarse = step(&basis, &s0, &params, &cfg).unwrap();
            let fine_cfg = StepperConfig {
                dt: dt / 64.0,
                scheme: Scheme::Rk4Reference,
                sample_every: 1000,
            };
            let reference = simulate(&basis, &s0, &params, &fine_cfg, dt, |_| {}).unwrap();
            let du = coarse.u.sub(&reference.u).unwrap().l2_norm_sq();
            let dv = coarse.v.sub(&reference.v).unwrap().l2_norm_sq();
            let dth = coarse.theta.sub(&reference.theta).unwrap().l2_norm_sq();
            (du + dv + dth).sqrt()
        };
        let e1 = one_step_err(2e-3);
        let e2 = one_step_err(1e-3);
        let ratio = e1 / e2;
        assert!(
            (5.0..=12.0).contains(&ratio),
            "local error ratio {ratio} (e1 = {e1:e}, e2 = {e2:e})"
        );
    }

    #[test]
    fn negative_theta_is_a_hard_error() {
        let (basis, params) = setup(2);
        let bad = InitialSpec {
            u_modes: vec![],
            v_modes: vec![],
            theta_base: 1.0,
            theta_modes: vec![ScalarAmplitude {
                k: 1,
                l: 0,
                amplitude: 1.5,
            }],
        };
        assert!(matches!(
            make_initial(&basis, &bad),
            Err(SimError::NonPositiveTemperature { .. })
        ));

        // A state driven negative by hand fails inside step().
        let mut s = equilibrium(&basis, 1.0);
        s.theta.set(0, 0, -PI);
        let cfg = StepperConfig {
            dt: 1e-3,
            scheme: Scheme::StrangExact,
            sample_every: 1,
        };
        assert!(matches!(
            step(&basis, &s, &params, &cfg),
            Err(SimError::NonPositiveTemperature { .. })
        ));
    }

    #[test]
    fn make_initial_examples() {
        let (basis, _) = setup(2);
        let s = make_initial(
            &basis,
            &InitialSpec {
                u_modes: vec![],
                v_modes: vec![],
                theta_base: 2.0,
                theta_modes: vec![],
            },
        )
        .unwrap();
        let min = basis
            .samples(&s.theta)
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v));
        assert!((min - 2.0).abs() < 1e-12);

        // h_norm of a single gradient amplitude a is a sqrt(xi).
        let a = 0.3;
        let s = make_initial(
            &basis,
            &InitialSpec {
                u_modes: vec![VectorAmplitude {
                    kind: VectorKind::Gradient,
                    k: 1,
                    l: 1,
                    amplitude: a,
                }],
                v_modes: vec![],
                theta_base: 1.0,
                theta_modes: vec![],
            },
        )
        .unwrap();
        assert!((s.u.h_norm() - a * 2.0f64.sqrt()).abs() < 1e-14);

        // Unknown modes are rejected.
        assert!(make_initial(
            &basis,
            &InitialSpec {
                u_modes: vec![VectorAmplitude {
                    kind: VectorKind::Rotational,
                    k: 0,
                    l: 1,
                    amplitude: 1.0
                }],
                v_modes: vec![],
                theta_base: 1.0,
                theta_modes: vec![],
            }
        )
        .is_err());
    }

    #[test]
    fn simulate_zero_horizon_emits_one_sample() {
        let (basis, params) = setup(2);
        let s0 = equilibrium(&basis, 1.0);
        let cfg = StepperConfig {
            dt: 1e-2,
            scheme: Scheme::StrangExact,
            sample_every: 1,
        };
        let mut count = 0;
        let end = simulate(&basis, &s0, &params, &cfg, s0.t, |_| count += 1).unwrap();
        assert_eq!(count, 1);
        assert_eq!(end, s0);
    }

    #[test]
    fn simulate_is_deterministic() {
        let (basis, params) = setup(2);
        let mut s0 = equilibrium(&basis, 1.0);
        s0.u.set(VectorKind::Gradient, 1, 0, 0.1).unwrap();
        s0.theta.set(1, 1, 0.05);
        let cfg = StepperConfig {
            dt: 1e-2,
            scheme: Scheme::StrangExact,
            sample_every: 7,
        };
        let a = simulate(&basis, &s0, &params, &cfg, 1.0, |_| {}).unwrap();
        let b = simulate(&basis, &s0, &params, &cfg, 1.0, |_| {}).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rotational_sector_ignores_coupling() {
        // Thm-5.1-style decoupling: the rotational coefficients of a coupled
        // run coincide bit-for-bit with a nu = 0 run from the same data.
        let (basis, params) = setup(2);
        let mut s0 = equilibrium(&basis, 1.0);
        s0.u.set(VectorKind::Rotational, 1, 1, 0.6).unwrap();
        s0.u.set(VectorKind::Gradient, 1, 0, 0.1).unwrap();
        s0.theta.set(1, 0, 0.1);
        let decoupled = PhysParams {
            nu: 0.0,
            ..params
        };
        let cfg = StepperConfig {
            dt: 1e-2,
            scheme: Scheme::StrangExact,
            sample_every: 100,
        };
        let a = simulate(&basis, &s0, &params, &cfg, 2.0, |_| {}).unwrap();
        let b = simulate(&basis, &s0, &decoupled, &cfg, 2.0, |_| {}).unwrap();
        assert_eq!(a.u.rot_coeffs(), b.u.rot_coeffs());
        assert_eq!(a.v.rot_coeffs(), b.v.rot_coeffs());
    }

    #[test]
    fn mass_ledger_midpoint_consistency() {
        // The step change of integral(theta) equals dt times the coupling
        // integrand at midpoint up to O(dt^3).
        let (basis, params) = setup(3);
        let mut s0 = equilibrium(&basis, 1.0);
        s0.v.set(VectorKind::Gradient, 1, 0, 0.3).unwrap();
        s0.theta.set(1, 0, 0.3);
        let err_at = |dt: f64| -> f64 {
            let cfg = StepperConfig {
                dt,
                scheme: Scheme::StrangExact,
                sample_every: 1,
            };
            let s1 = step(&basis, &s0, &params, &cfg).unwrap();
            let half_cfg = StepperConfig {
                dt: dt / 2.0,
                ..cfg
            };
            let mid = step(&basis, &s0, &params, &half_cfg).unwrap();
            let (_, dtheta_mid) = coupling_rhs(&basis, &mid, &params);
            let change = s1.theta.integral() - s0.theta.integral();
            (change - dt * dtheta_mid.integral()).abs()
        };
        let e1 = err_at(2e-3);
        let e2 = err_at(1e-3);
        assert!(e1 < 1e-9, "ledger error too large: {e1:e}");
        let ratio = e1 / e2;
        assert!(
            (5.0..=12.0).contains(&ratio),
            "ledger error ratio {ratio} not ~ dt^3"
        );
    }
}
