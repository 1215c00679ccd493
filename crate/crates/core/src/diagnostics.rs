//! The monitored functionals: energy ledger, entropy and its production,
//! the Fisher-information functional, decomposed energies, temperature
//! extrema, and the dissipation/inequality checks.
//!
//! Everything diagonal in the eigenbasis (energies, H-norms, Hessian
//! L2 norms) is an exact coefficient sum. Integrals involving `log theta`
//! or quotients are midpoint quadrature on the collocation grid, with
//! derivatives taken spectrally on the cutoff-truncated expansion.

use ndarray::Array2;

use crate::basis::{div, grad, Basis};
use crate::dynamics::{PhysParams, SimState};
use crate::error::{Result, SimError};
use crate::field::ScalarField;

/// One sampled row of every monitored functional. Field order is the CSV
/// column order.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub energy_total: f64,
    pub energy_kinetic: f64,
    pub energy_div: f64,
    pub energy_curl: f64,
    pub theta_mass: f64,
    pub entropy: f64,
    pub entropy_production: f64,
    pub fisher_f: f64,
    pub min_theta: f64,
    pub max_theta: f64,
    pub gamma_energy: f64,
    pub chi_kinetic: f64,
    pub chi_potential: f64,
    pub chi_h_norm: f64,
    pub chi_t_l2: f64,
    pub theta_l2_dist_to_mean: f64,
}

pub const CSV_COLUMNS: [&str; 17] = [
    "t",
    "energy_total",
    "energy_kinetic",
    "energy_div",
    "energy_curl",
    "theta_mass",
    "entropy",
    "entropy_production",
    "fisher_F",
    "min_theta",
    "max_theta",
    "gamma_energy",
    "chi_kinetic",
    "chi_potential",
    "chi_h_norm",
    "chi_t_l2",
    "theta_l2_dist_to_mean",
];

impl DiagnosticsRecord {
    pub fn values(&self) -> [f64; 17] {
        [
            self.t,
            self.energy_total,
            self.energy_kinetic,
            self.energy_div,
            self.energy_curl,
            self.theta_mass,
            self.entropy,
            self.entropy_production,
            self.fisher_f,
            self.min_theta,
            self.max_theta,
            self.gamma_energy,
            self.chi_kinetic,
            self.chi_potential,
            self.chi_h_norm,
            self.chi_t_l2,
            self.theta_l2_dist_to_mean,
        ]
    }

    pub fn compute(basis: &Basis, s: &SimState, params: &PhysParams) -> Result<Self> {
        let theta_samples = basis.samples(&s.theta);
        let (min_theta, max_theta) = sample_extrema(&theta_samples);
        if min_theta <= 0.0 {
            return Err(SimError::NonPositiveTemperature {
                t: s.t,
                min_theta,
            });
        }
        let en = energy(s, params);
        let (entropy, production) = entropy_and_production_from(basis, s, &theta_samples)?;
        let fisher_f = fisher_from(basis, s, params, &theta_samples)?;

        let sums = family_sums(s, params);
        Ok(DiagnosticsRecord {
            t: s.t,
            energy_total: en.total,
            energy_kinetic: en.kinetic,
            energy_div: en.div_part,
            energy_curl: en.curl_part,
            theta_mass: en.theta_mass,
            entropy,
            entropy_production: production,
            fisher_f,
            min_theta,
            max_theta,
            gamma_energy: sums.gamma_energy,
            chi_kinetic: sums.chi_kinetic,
            chi_potential: sums.chi_potential,
            chi_h_norm: sums.chi_h_norm,
            chi_t_l2: sums.chi_t_l2,
            theta_l2_dist_to_mean: s.theta.l2_dist_to_mean_sq().max(0.0).sqrt(),
        })
    }
}

/// Terms of the conserved energy balance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub total: f64,
    pub kinetic: f64,
    pub div_part: f64,
    pub curl_part: f64,
    pub theta_mass: f64,
}

/// `1/2 |u_t|^2 + (2 mu + lambda)/2 |div u|^2 + mu/2 |curl u|^2 + int theta`.
pub fn energy(s: &SimState, params: &PhysParams) -> EnergyBreakdown {
    let d = s.u.domain();
    let m = d.cutoff + 1;
    let mut div_sq = 0.0;
    let mut curl_sq = 0.0;
    for k in 0..m {
        for l in 0..m {
            let xi = d.xi(k, l);
            let g = s.u.grad_coeffs()[[k, l]];
            let r = s.u.rot_coeffs()[[k, l]];
            div_sq += xi * g * g;
            curl_sq += xi * r * r;
        }
    }
    let kinetic = 0.5 * s.v.l2_norm_sq();
    let div_part = 0.5 * params.c_gradient() * div_sq;
    let curl_part = 0.5 * params.mu * curl_sq;
    let theta_mass = s.theta.integral();
    EnergyBreakdown {
        total: kinetic + div_part + curl_part + theta_mass,
        kinetic,
        div_part,
        curl_part,
        theta_mass,
    }
}

fn sample_extrema(samples: &Array2<f64>) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in samples.iter() {
        min = min.min(v);
        max = max.max(v);
    }
    (min, max)
}

/// `(int log theta, int |grad log theta|^2)` by collocation quadrature.
pub fn entropy_and_production(basis: &Basis, s: &SimState) -> Result<(f64, f64)> {
    let theta_samples = basis.samples(&s.theta);
    let (min_theta, _) = sample_extrema(&theta_samples);
    if min_theta <= 0.0 {
        return Err(SimError::NonPositiveTemperature {
            t: s.t,
            min_theta,
        });
    }
    entropy_and_production_from(basis, s, &theta_samples)
}

fn entropy_and_production_from(
    basis: &Basis,
    s: &SimState,
    theta_samples: &Array2<f64>,
) -> Result<(f64, f64)> {
    let log_theta = theta_samples.mapv(f64::ln);
    let entropy = basis.quadrature(&log_theta);

    let (gx, gy) = basis.vector_samples(&grad(&s.theta));
    let n = theta_samples.dim();
    let mut integrand = Array2::zeros(n);
    for ((idx, v), (&g1, &g2)) in integrand
        .indexed_iter_mut()
        .zip(gx.iter().zip(gy.iter()))
    {
        let th = theta_samples[idx];
        *v = (g1 * g1 + g2 * g2) / (th * th);
    }
    let production = basis.quadrature(&integrand);
    Ok((entropy, production))
}

/// The Fisher functional
/// `1/2 (|div u_t|^2 + |curl u_t|^2 + (2 mu + lambda) |grad div u|^2
///       + mu |curl curl u|^2 + int |grad theta|^2 / theta)`.
pub fn fisher_functional(basis: &Basis, s: &SimState, params: &PhysParams) -> Result<f64> {
    let theta_samples = basis.samples(&s.theta);
    let (min_theta, _) = sample_extrema(&theta_samples);
    if min_theta <= 0.0 {
        return Err(SimError::NonPositiveTemperature {
            t: s.t,
            min_theta,
        });
    }
    fisher_from(basis, s, params, &theta_samples)
}

fn fisher_from(
    basis: &Basis,
    s: &SimState,
    params: &PhysParams,
    theta_samples: &Array2<f64>,
) -> Result<f64> {
    let d = s.u.domain();
    let m = d.cutoff + 1;
    let mut mech = 0.0;
    for k in 0..m {
        for l in 0..m {
            let xi = d.xi(k, l);
            let vg = s.v.grad_coeffs()[[k, l]];
            let vr = s.v.rot_coeffs()[[k, l]];
            let ug = s.u.grad_coeffs()[[k, l]];
            let ur = s.u.rot_coeffs()[[k, l]];
            // |div u_t|^2 + |curl u_t|^2, then the second-derivative terms:
            // grad div and curl curl are diagonal with weight xi^2.
            mech += xi * (vg * vg + vr * vr);
            mech += params.c_gradient() * xi * xi * ug * ug;
            mech += params.mu * xi * xi * ur * ur;
        }
    }
    let (gx, gy) = basis.vector_samples(&grad(&s.theta));
    let mut integrand = Array2::zeros(theta_samples.dim());
    for ((idx, v), (&g1, &g2)) in integrand
        .indexed_iter_mut()
        .zip(gx.iter().zip(gy.iter()))
    {
        *v = (g1 * g1 + g2 * g2) / theta_samples[idx];
    }
    let fisher_term = basis.quadrature(&integrand);
    Ok(0.5 * (mech + fisher_term))
}

struct FamilySums {
    gamma_energy: f64,
    chi_kinetic: f64,
    chi_potential: f64,
    chi_h_norm: f64,
    chi_t_l2: f64,
}

fn family_sums(s: &SimState, params: &PhysParams) -> FamilySums {
    let d = s.u.domain();
    let m = d.cutoff + 1;
    let mut rot_v_sq = 0.0;
    let mut rot_u_h = 0.0;
    let mut grad_v_sq = 0.0;
    let mut grad_u_h = 0.0;
    for k in 0..m {
        for l in 0..m {
            let xi = d.xi(k, l);
            let vg = s.v.grad_coeffs()[[k, l]];
            let vr = s.v.rot_coeffs()[[k, l]];
            let ug = s.u.grad_coeffs()[[k, l]];
            let ur = s.u.rot_coeffs()[[k, l]];
            rot_v_sq += vr * vr;
            grad_v_sq += vg * vg;
            rot_u_h += xi * ur * ur;
            grad_u_h += xi * ug * ug;
        }
    }
    FamilySums {
        gamma_energy: 0.5 * rot_v_sq + 0.5 * params.mu * rot_u_h,
        chi_kinetic: 0.5 * grad_v_sq,
        chi_potential: 0.5 * params.c_gradient() * grad_u_h,
        chi_h_norm: grad_u_h.sqrt(),
        chi_t_l2: grad_v_sq.sqrt(),
    }
}

/// Energies of the two Helmholtz sectors plus the heat content:
/// `(gamma_energy, chi_energy_mech, theta_mass)`.
pub fn decomposed_energies(s: &SimState, params: &PhysParams) -> (f64, f64, f64) {
    let sums = family_sums(s, params);
    (
        sums.gamma_energy,
        sums.chi_kinetic + sums.chi_potential,
        s.theta.integral(),
    )
}

/// One interior sample of the dissipation check.
#[derive(Debug, Clone, Copy)]
pub struct FisherResidualRow {
    pub t: f64,
    /// Centered difference of F in time.
    pub dfdt: f64,
    /// `-int theta |hess log theta|^2 - nu/2 int (|grad theta|^2/theta) div u_t`.
    pub rhs: f64,
    /// `dfdt - rhs`; the dissipation inequality requires this <= tol.
    pub residual: f64,
    pub tol: f64,
}

// Tolerance model for the dissipation residual,
// tol = C_TIME * spacing^2 * (1 + F(0)) + C_TAIL * tail,
// where tail is the high-band Hessian content of log theta (the part of the
// integrand the cutoff cannot represent). Calibrated once against the
// dt-refined small-data run (measured residual/spacing^2/(1+F0) = 3.6e-3,
// scaling cleanly as spacing^2) and frozen with a ~25x margin.
const FISHER_TOL_C_TIME: f64 = 0.1;
const FISHER_TOL_C_TAIL: f64 = 10.0;

/// Checks Lemma-style dissipation of F on a uniformly spaced state series:
/// centered difference of F against the dissipation right-hand side at each
/// interior sample.
pub fn fisher_dissipation_residual(
    basis: &Basis,
    states: &[SimState],
    params: &PhysParams,
) -> Result<Vec<FisherResidualRow>> {
    if states.len() < 3 {
        return Err(SimError::InsufficientSamples {
            needed: ">= 3 uniformly spaced states".to_string(),
            got: states.len(),
        });
    }
    let spacing = states[1].t - states[0].t;
    for w in states.windows(2) {
        let dt = w[1].t - w[0].t;
        if (dt - spacing).abs() > 1e-9 * spacing.abs().max(1e-300) {
            return Err(SimError::InvalidParameter(
                "fisher_dissipation_residual requires uniform sample spacing".to_string(),
            ));
        }
    }
    let f_values: Vec<f64> = states
        .iter()
        .map(|s| fisher_functional(basis, s, params))
        .collect::<Result<_>>()?;
    let f0 = f_values[0];

    let mut rows = Vec::with_capacity(states.len().saturating_sub(2));
    for i in 1..states.len() - 1 {
        let s = &states[i];
        let dfdt = (f_values[i + 1] - f_values[i - 1]) / (2.0 * spacing);
        let (rhs, tail) = dissipation_rhs(basis, s, params)?;
        let tol = FISHER_TOL_C_TIME * spacing * spacing * (1.0 + f0) + FISHER_TOL_C_TAIL * tail;
        rows.push(FisherResidualRow {
            t: s.t,
            dfdt,
            rhs,
            residual: dfdt - rhs,
            tol,
        });
    }
    Ok(rows)
}

/// Evaluates the dissipation right-hand side and the spectral-tail measure
/// of `log theta` used in the tolerance.
fn dissipation_rhs(basis: &Basis, s: &SimState, params: &PhysParams) -> Result<(f64, f64)> {
    let d = s.u.domain();
    let theta_samples = basis.samples(&s.theta);
    let (min_theta, _) = sample_extrema(&theta_samples);
    if min_theta <= 0.0 {
        return Err(SimError::NonPositiveTemperature {
            t: s.t,
            min_theta,
        });
    }
    let tau = basis.forward(&theta_samples.mapv(f64::ln))?;
    let (txx, txy, tyy) = hessian_samples(basis, &tau);
    let mut integrand = Array2::zeros(theta_samples.dim());
    for (idx, v) in integrand.indexed_iter_mut() {
        let h2 = txx[idx] * txx[idx] + 2.0 * txy[idx] * txy[idx] + tyy[idx] * tyy[idx];
        *v = theta_samples[idx] * h2;
    }
    let term1 = -basis.quadrature(&integrand);

    let (gx, gy) = basis.vector_samples(&grad(&s.theta));
    let divv_samples = basis.samples(&div(&s.v));
    let mut integrand = Array2::zeros(theta_samples.dim());
    for (idx, v) in integrand.indexed_iter_mut() {
        let g2 = gx[idx] * gx[idx] + gy[idx] * gy[idx];
        *v = g2 / theta_samples[idx] * divv_samples[idx];
    }
    let term2 = -0.5 * params.nu * basis.quadrature(&integrand);

    // High-band Hessian content of log theta: sum of xi^2 c^2 over modes
    // with max(k, l) above half the cutoff.
    let m = d.cutoff + 1;
    let half = d.cutoff / 2;
    let mut tail = 0.0;
    for k in 0..m {
        for l in 0..m {
            if k.max(l) > half {
                let xi = d.xi(k, l);
                let c = tau.get(k, l);
                tail += xi * xi * c * c;
            }
        }
    }
    Ok((term1 + term2, tail))
}

/// Hessian component samples of a scalar expansion: second derivatives stay
/// in the cosine basis, the mixed derivative lands in the sine basis.
fn hessian_samples(
    basis: &Basis,
    f: &ScalarField,
) -> (Array2<f64>, Array2<f64>, Array2<f64>) {
    let d = f.domain();
    let m = d.cutoff + 1;
    let mut cxx = ScalarField::zeros(d);
    let mut cyy = ScalarField::zeros(d);
    let mut cxy = Array2::zeros((m, m));
    for k in 0..m {
        for l in 0..m {
            let c = f.get(k, l);
            let kx = d.kx(k);
            let ky = d.ky(l);
            cxx.set(k, l, -kx * kx * c);
            cyy.set(k, l, -ky * ky * c);
            cxy[[k, l]] = kx * ky * c;
        }
    }
    (
        basis.samples(&cxx),
        basis.sin_sin_samples(&cxy),
        basis.samples(&cyy),
    )
}

/// Report of the two Neumann-field inequalities.
#[derive(Debug, Clone, Copy)]
pub struct InequalityReport {
    /// `xi_min |grad v|^2 / |lap v|^2`, must be <= 1 on the eigenbasis.
    pub gradient_vs_laplacian_ratio: f64,
    /// `int |hess sqrt(w)|^2 / int w |hess log w|^2`, bounded by
    /// `1 + sqrt(2)/2 + 1/4` in two dimensions.
    pub sqrt_hessian_ratio: f64,
    pub sqrt_hessian_bound: f64,
}

/// Bound constant of the sqrt-Hessian inequality for d = 2.
pub const SQRT_HESSIAN_BOUND_2D: f64 = 1.0 + std::f64::consts::FRAC_1_SQRT_2 + 0.25;

/// `|grad v|^2 <= (1 / xi_min) |lap v|^2` as an exact coefficient statement;
/// returns the ratio normalized to be <= 1. Zero for constant fields.
pub fn gradient_laplacian_ratio(v: &ScalarField) -> f64 {
    let d = v.domain();
    let m = d.cutoff + 1;
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..m {
        for l in 0..m {
            let xi = d.xi(k, l);
            let c = v.get(k, l);
            num += xi * c * c;
            den += xi * xi * c * c;
        }
    }
    if den == 0.0 {
        0.0
    } else {
        d.xi_min_nonzero() * num / den
    }
}

/// Ratio of `int |hess sqrt(w)|^2` to `int w |hess log w|^2` for a strictly
/// positive field; zero when both sides vanish (constant w).
pub fn sqrt_hessian_ratio(basis: &Basis, w: &ScalarField) -> Result<f64> {
    let samples = basis.samples(w);
    let (min, _) = sample_extrema(&samples);
    if min <= 0.0 {
        return Err(SimError::NonPositiveTemperature {
            t: f64::NAN,
            min_theta: min,
        });
    }
    let root = basis.forward(&samples.mapv(f64::sqrt))?;
    let d = w.domain();
    let m = d.cutoff + 1;
    // int |hess r|^2 is the coefficient sum of xi^2 c^2: the Hessian
    // families are orthonormal and xi^2 = kx^4 + 2 kx^2 ky^2 + ky^4.
    let mut lhs = 0.0;
    for k in 0..m {
        for l in 0..m {
            let xi = d.xi(k, l);
            let c = root.get(k, l);
            lhs += xi * xi * c * c;
        }
    }
    let tau = basis.forward(&samples.mapv(f64::ln))?;
    let (txx, txy, tyy) = hessian_samples(basis, &tau);
    let mut integrand = Array2::zeros(samples.dim());
    for (idx, v) in integrand.indexed_iter_mut() {
        let h2 = txx[idx] * txx[idx] + 2.0 * txy[idx] * txy[idx] + tyy[idx] * tyy[idx];
        *v = samples[idx] * h2;
    }
    let rhs = basis.quadrature(&integrand);
    // Constant fields leave only transform roundoff on both sides; the
    // quotient of two noise terms is meaningless, so report 0 there.
    let noise = f64::EPSILON * root.l2_norm() * d.xi(m - 1, m - 1);
    let floor = noise * noise * (m * m) as f64;
    if rhs <= floor && lhs <= floor {
        return Ok(0.0);
    }
    Ok(lhs / rhs)
}

/// Both inequality checks on one field.
pub fn inequality_checks(basis: &Basis, w: &ScalarField) -> Result<InequalityReport> {
    Ok(InequalityReport {
        gradient_vs_laplacian_ratio: gradient_laplacian_ratio(w),
        sqrt_hessian_ratio: sqrt_hessian_ratio(basis, w)?,
        sqrt_hessian_bound: SQRT_HESSIAN_BOUND_2D,
    })
}

/// Running extrema of the grid temperature over a record series.
pub fn temperature_bounds(records: &[DiagnosticsRecord]) -> Result<(f64, f64)> {
    if records.is_empty() {
        return Err(SimError::InsufficientSamples {
            needed: ">= 1 record".to_string(),
            got: 0,
        });
    }
    let inf = records.iter().fold(f64::INFINITY, |m, r| m.min(r.min_theta));
    let sup = records
        .iter()
        .fold(f64::NEG_INFINITY, |m, r| m.max(r.max_theta));
    Ok((inf, sup))
}
