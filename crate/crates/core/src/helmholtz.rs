//! Helmholtz decomposition by coefficient partition.
//!
//! The vector basis diagonalizes the decomposition: rotational modes are
//! divergence-free, gradient modes are curl-free, and the two families are
//! L2-orthogonal. Splitting a field is therefore a partition of its
//! coefficients, and the split is exact rather than the output of a Poisson
//! solve.

use crate::error::{Result, SimError};
use crate::field::{ScalarField, VectorField};

/// Rejection threshold for rotational content in [`potential`].
const CURL_FREE_TOL: f64 = 1e-12;

/// The two orthogonal parts of a vector field.
#[derive(Debug, Clone)]
pub struct HelmholtzPair {
    /// Divergence-free part (rotational modes only).
    pub gamma: VectorField,
    /// Curl-free part (gradient modes only).
    pub chi: VectorField,
}

/// Splits `v` into its divergence-free and curl-free parts.
pub fn project(v: &VectorField) -> HelmholtzPair {
    let d = v.domain();
    let mut gamma = VectorField::zeros(d);
    let mut chi = VectorField::zeros(d);
    gamma.rot_coeffs_mut().assign(v.rot_coeffs());
    chi.grad_coeffs_mut().assign(v.grad_coeffs());
    HelmholtzPair { gamma, chi }
}

/// Scalar potential of a curl-free field: `grad(phi) = chi` with zero mean.
///
/// Rejects inputs whose rotational coefficients exceed `1e-12` in absolute
/// value; no gradient can reproduce those.
pub fn potential(chi: &VectorField) -> Result<ScalarField> {
    let max_rot = chi.max_abs_rotational();
    if max_rot > CURL_FREE_TOL {
        return Err(SimError::NotCurlFree {
            max_rotational_coeff: max_rot,
        });
    }
    let d = chi.domain();
    let m = d.cutoff + 1;
    let mut phi = ScalarField::zeros(d);
    for k in 0..m {
        for l in 0..m {
            let xi = d.xi(k, l);
            if xi > 0.0 {
                phi.set(k, l, chi.grad_coeffs()[[k, l]] / xi.sqrt());
            }
        }
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::grad;
    use crate::domain::{DomainSpec, VectorKind};

    #[test]
    fn single_gradient_mode_goes_to_chi() {
        let d = DomainSpec::square(2).unwrap();
        let mut v = VectorField::zeros(&d);
        v.set(VectorKind::Gradient, 1, 0, 1.0).unwrap();
        let pair = project(&v);
        assert_eq!(pair.gamma.l2_norm(), 0.0);
        assert_eq!(pair.chi.get(VectorKind::Gradient, 1, 0), 1.0);
    }

    #[test]
    fn single_rotational_mode_goes_to_gamma() {
        let d = DomainSpec::square(2).unwrap();
        let mut v = VectorField::zeros(&d);
        v.set(VectorKind::Rotational, 1, 1, -0.4).unwrap();
        let pair = project(&v);
        assert_eq!(pair.chi.l2_norm(), 0.0);
        assert_eq!(pair.gamma.get(VectorKind::Rotational, 1, 1), -0.4);
    }

    #[test]
    fn pythagoras_and_orthogonality() {
        let d = DomainSpec::square(3).unwrap();
        let mut v = VectorField::zeros(&d);
        v.set(VectorKind::Gradient, 1, 2, 0.7).unwrap();
        v.set(VectorKind::Gradient, 0, 1, -0.2).unwrap();
        v.set(VectorKind::Rotational, 2, 2, 1.1).unwrap();
        let pair = project(&v);
        let lhs = pair.gamma.l2_norm_sq() + pair.chi.l2_norm_sq();
        assert!((lhs - v.l2_norm_sq()).abs() <= 1e-12 * v.l2_norm_sq());
        assert!(pair.gamma.l2_inner(&pair.chi).unwrap().abs() <= 1e-12);
        // Reconstruction is a coefficient partition, hence exact.
        let mut rec = pair.gamma.clone();
        rec.axpy(1.0, &pair.chi);
        assert_eq!(rec, v);
    }

    #[test]
    fn projection_is_idempotent() {
        let d = DomainSpec::square(2).unwrap();
        let mut v = VectorField::zeros(&d);
        v.set(VectorKind::Gradient, 1, 1, 0.5).unwrap();
        v.set(VectorKind::Rotational, 1, 1, 0.3).unwrap();
        let pair = project(&v);
        let again = project(&pair.gamma);
        assert_eq!(again.gamma, pair.gamma);
        assert_eq!(again.chi.l2_norm(), 0.0);
        let again = project(&pair.chi);
        assert_eq!(again.chi, pair.chi);
        assert_eq!(again.gamma.l2_norm(), 0.0);
    }

    #[test]
    fn potential_zero_field() {
        let d = DomainSpec::square(2).unwrap();
        let chi = VectorField::zeros(&d);
        let phi = potential(&chi).unwrap();
        assert_eq!(phi.l2_norm(), 0.0);
    }

    #[test]
    fn potential_of_unit_gradient_mode() {
        // chi = Gradient(1,0) on [0,pi]^2 has potential cos x / sqrt(xi)
        // relative to the orthonormal scalar mode, xi = 1.
        let d = DomainSpec::square(2).unwrap();
        let mut chi = VectorField::zeros(&d);
        chi.set(VectorKind::Gradient, 1, 0, 1.0).unwrap();
        let phi = potential(&chi).unwrap();
        assert!((phi.get(1, 0) - 1.0).abs() < 1e-15);
        assert_eq!(phi.get(0, 0), 0.0); // zero mean
        let g = grad(&phi);
        let err = g.sub(&chi).unwrap().l2_norm();
        assert!(err <= 1e-12);
    }

    #[test]
    fn potential_rejects_rotational_content() {
        let d = DomainSpec::square(2).unwrap();
        let mut chi = VectorField::zeros(&d);
        chi.set(VectorKind::Gradient, 1, 0, 1.0).unwrap();
        chi.set(VectorKind::Rotational, 1, 1, 1e-6).unwrap();
        assert!(matches!(
            potential(&chi),
            Err(SimError::NotCurlFree { .. })
        ));
    }

    #[test]
    fn grad_potential_round_trip() {
        let d = DomainSpec::square(3).unwrap();
        let mut chi = VectorField::zeros(&d);
        chi.set(VectorKind::Gradient, 1, 0, 0.3).unwrap();
        chi.set(VectorKind::Gradient, 2, 3, -0.9).unwrap();
        chi.set(VectorKind::Gradient, 0, 2, 0.11).unwrap();
        let phi = potential(&chi).unwrap();
        let err = grad(&phi).sub(&chi).unwrap().l2_norm();
        assert!(err <= 1e-12 * chi.l2_norm());
    }
}
