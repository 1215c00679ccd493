//! Spectral coefficient fields.
//!
//! A `ScalarField` is an expansion in the L2-orthonormalized scalar Neumann
//! modes, a `VectorField` in the orthonormalized vector modes (gradient and
//! rotational families). Coefficients are stored as dense `(cutoff + 1)^2`
//! blocks indexed by `(k, l)`; entries that do not correspond to a valid
//! mode (`(0, 0)` for the gradient family, `k = 0` or `l = 0` for the
//! rotational family) are kept at exactly zero.
//!
//! Because the modes are orthonormal, Parseval holds by construction: the
//! sum of squared coefficients is the squared L2 norm of the field.

use ndarray::Array2;

use crate::domain::{DomainSpec, ScalarMode, VectorKind, VectorMode};
use crate::error::{Result, SimError};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    domain: DomainSpec,
    coeffs: Array2<f64>,
}

impl ScalarField {
    pub fn zeros(domain: &DomainSpec) -> Self {
        let n = domain.cutoff + 1;
        ScalarField {
            domain: *domain,
            coeffs: Array2::zeros((n, n)),
        }
    }

    pub fn from_coeffs(domain: &DomainSpec, coeffs: Array2<f64>) -> Result<Self> {
        let n = domain.cutoff + 1;
        if coeffs.dim() != (n, n) {
            return Err(SimError::DimensionMismatch {
                expected: (n, n),
                got: coeffs.dim(),
            });
        }
        Ok(ScalarField {
            domain: *domain,
            coeffs,
        })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn coeffs(&self) -> &Array2<f64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<f64> {
        &mut self.coeffs
    }

    pub fn coeff(&self, mode: &ScalarMode) -> f64 {
        self.coeffs[[mode.k, mode.l]]
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.coeffs[[k, l]]
    }

    pub fn set(&mut self, k: usize, l: usize, value: f64) {
        self.coeffs[[k, l]] = value;
    }

    /// Coefficient inner product = L2 inner product of the fields.
    pub fn l2_inner(&self, other: &ScalarField) -> Result<f64> {
        self.domain.same_as(&other.domain, "scalar l2_inner")?;
        let a = self.coeffs.as_slice().expect("standard layout");
        let b = other.coeffs.as_slice().expect("standard layout");
        let mut acc = 0.0;
        for i in 0..a.len() {
            acc += a[i] * b[i];
        }
        Ok(acc)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        let a = self.coeffs.as_slice().expect("standard layout");
        let mut acc = 0.0;
        for &c in a {
            acc += c * c;
        }
        acc
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Mean value over the domain, `integral(f) / |Omega|`.
    pub fn mean(&self) -> f64 {
        self.coeffs[[0, 0]] / self.domain.area().sqrt()
    }

    /// `integral(f) dx`, read off the constant-mode coefficient.
    pub fn integral(&self) -> f64 {
        self.coeffs[[0, 0]] * self.domain.area().sqrt()
    }

    /// Squared L2 distance to the mean: sum over non-constant modes.
    pub fn l2_dist_to_mean_sq(&self) -> f64 {
        self.l2_norm_sq() - self.coeffs[[0, 0]] * self.coeffs[[0, 0]]
    }

    pub fn scale(&mut self, a: f64) {
        for c in self.coeffs.iter_mut() {
            *c *= a;
        }
    }

    /// `self += a * other`. Domains must match (callers are internal).
    pub fn axpy(&mut self, a: f64, other: &ScalarField) {
        debug_assert_eq!(self.domain, other.domain);
        let s = self.coeffs.as_slice_mut().expect("standard layout");
        let o = other.coeffs.as_slice().expect("standard layout");
        for i in 0..s.len() {
            s[i] += a * o[i];
        }
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.domain.same_as(&other.domain, "scalar sub")?;
        let mut out = self.clone();
        out.axpy(-1.0, other);
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    domain: DomainSpec,
    grad: Array2<f64>,
    rot: Array2<f64>,
}

impl VectorField {
    pub fn zeros(domain: &DomainSpec) -> Self {
        let n = domain.cutoff + 1;
        VectorField {
            domain: *domain,
            grad: Array2::zeros((n, n)),
            rot: Array2::zeros((n, n)),
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn grad_coeffs(&self) -> &Array2<f64> {
        &self.grad
    }

    pub fn rot_coeffs(&self) -> &Array2<f64> {
        &self.rot
    }

    pub fn coeff(&self, mode: &VectorMode) -> f64 {
        match mode.kind {
            VectorKind::Gradient => self.grad[[mode.k, mode.l]],
            VectorKind::Rotational => self.rot[[mode.k, mode.l]],
        }
    }

    pub fn get(&self, kind: VectorKind, k: usize, l: usize) -> f64 {
        match kind {
            VectorKind::Gradient => self.grad[[k, l]],
            VectorKind::Rotational => self.rot[[k, l]],
        }
    }

    /// Sets a coefficient, rejecting slots that are not valid modes.
    pub fn set(&mut self, kind: VectorKind, k: usize, l: usize, value: f64) -> Result<()> {
        let k_max = self.domain.cutoff;
        let valid = match kind {
            VectorKind::Gradient => k <= k_max && l <= k_max && k + l >= 1,
            VectorKind::Rotational => (1..=k_max).contains(&k) && (1..=k_max).contains(&l),
        };
        if !valid {
            return Err(SimError::UnknownMode {
                detail: format!("{kind:?} ({k}, {l}) with cutoff {k_max}"),
            });
        }
        match kind {
            VectorKind::Gradient => self.grad[[k, l]] = value,
            VectorKind::Rotational => self.rot[[k, l]] = value,
        }
        Ok(())
    }

    pub fn l2_inner(&self, other: &VectorField) -> Result<f64> {
        self.domain.same_as(&other.domain, "vector l2_inner")?;
        let mut acc = 0.0;
        let (a, b) = (
            self.grad.as_slice().expect("standard layout"),
            other.grad.as_slice().expect("standard layout"),
        );
        for i in 0..a.len() {
            acc += a[i] * b[i];
        }
        let (a, b) = (
            self.rot.as_slice().expect("standard layout"),
            other.rot.as_slice().expect("standard layout"),
        );
        for i in 0..a.len() {
            acc += a[i] * b[i];
        }
        Ok(acc)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        let mut acc = 0.0;
        for &c in self.grad.as_slice().expect("standard layout") {
            acc += c * c;
        }
        for &c in self.rot.as_slice().expect("standard layout") {
            acc += c * c;
        }
        acc
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Squared H-norm, `|div w|^2 + |curl w|^2 = sum xi c^2` over all modes.
    pub fn h_norm_sq(&self) -> f64 {
        let k_max = self.domain.cutoff;
        let mut acc = 0.0;
        for k in 0..=k_max {
            for l in 0..=k_max {
                let xi = self.domain.xi(k, l);
                let g = self.grad[[k, l]];
                let r = self.rot[[k, l]];
                acc += xi * (g * g + r * r);
            }
        }
        acc
    }

    pub fn h_norm(&self) -> f64 {
        self.h_norm_sq().sqrt()
    }

    pub fn scale(&mut self, a: f64) {
        for c in self.grad.iter_mut() {
            *c *= a;
        }
        for c in self.rot.iter_mut() {
            *c *= a;
        }
    }

    /// `self += a * other`. Domains must match (callers are internal).
    pub fn axpy(&mut self, a: f64, other: &VectorField) {
        debug_assert_eq!(self.domain, other.domain);
        let s = self.grad.as_slice_mut().expect("standard layout");
        let o = other.grad.as_slice().expect("standard layout");
        for i in 0..s.len() {
            s[i] += a * o[i];
        }
        let s = self.rot.as_slice_mut().expect("standard layout");
        let o = other.rot.as_slice().expect("standard layout");
        for i in 0..s.len() {
            s[i] += a * o[i];
        }
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        self.domain.same_as(&other.domain, "vector sub")?;
        let mut out = self.clone();
        out.axpy(-1.0, other);
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.grad.iter().all(|c| c.is_finite()) && self.rot.iter().all(|c| c.is_finite())
    }

    /// Largest rotational coefficient in absolute value.
    pub fn max_abs_rotational(&self) -> f64 {
        self.rot.iter().fold(0.0f64, |m, &c| m.max(c.abs()))
    }

    pub(crate) fn grad_coeffs_mut(&mut self) -> &mut Array2<f64> {
        &mut self.grad
    }

    pub(crate) fn rot_coeffs_mut(&mut self) -> &mut Array2<f64> {
        &mut self.rot
    }

    pub(crate) fn from_parts(domain: &DomainSpec, grad: Array2<f64>, rot: Array2<f64>) -> Self {
        let n = domain.cutoff + 1;
        debug_assert_eq!(grad.dim(), (n, n));
        debug_assert_eq!(rot.dim(), (n, n));
        VectorField {
            domain: *domain,
            grad,
            rot,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;

    #[test]
    fn parseval_is_structural() {
        let d = DomainSpec::square(2).unwrap();
        let mut f = ScalarField::zeros(&d);
        f.set(0, 0, 1.5);
        f.set(1, 2, -0.5);
        assert_eq!(f.l2_norm_sq(), 1.5 * 1.5 + 0.25);
    }

    #[test]
    fn h_norm_single_gradient_mode() {
        let d = DomainSpec::square(2).unwrap();
        let mut v = VectorField::zeros(&d);
        v.set(VectorKind::Gradient, 1, 1, 1.0).unwrap(); // xi = 2
        assert!((v.h_norm() - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn h_norm_zero_field() {
        let d = DomainSpec::square(2).unwrap();
        assert_eq!(VectorField::zeros(&d).h_norm(), 0.0);
    }

    #[test]
    fn invalid_mode_slots_rejected() {
        let d = DomainSpec::square(2).unwrap();
        let mut v = VectorField::zeros(&d);
        assert!(v.set(VectorKind::Gradient, 0, 0, 1.0).is_err());
        assert!(v.set(VectorKind::Rotational, 0, 1, 1.0).is_err());
        assert!(v.set(VectorKind::Rotational, 1, 3, 1.0).is_err());
        assert!(v.set(VectorKind::Gradient, 2, 1, 1.0).is_ok());
    }

    #[test]
    fn inner_product_of_distinct_modes_is_zero() {
        let d = DomainSpec::square(2).unwrap();
        let mut a = VectorField::zeros(&d);
        let mut b = VectorField::zeros(&d);
        a.set(VectorKind::Gradient, 1, 0, 1.0).unwrap();
        b.set(VectorKind::Rotational, 1, 1, 1.0).unwrap();
        assert_eq!(a.l2_inner(&b).unwrap(), 0.0);
    }

    #[test]
    fn domain_mismatch_detected() {
        let d2 = DomainSpec::square(2).unwrap();
        let d3 = DomainSpec::square(3).unwrap();
        let a = ScalarField::zeros(&d2);
        let b = ScalarField::zeros(&d3);
        assert!(matches!(
            a.l2_inner(&b),
            Err(SimError::DomainMismatch { .. })
        ));
    }
}
