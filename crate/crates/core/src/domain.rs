//! Rectangle geometry and the eigenmode catalogue.
//!
//! The domain is a rectangle `[0, lx] x [0, ly]`. Both the scalar Neumann
//! Laplacian and the vector Laplacian under the slip/no-rotation boundary
//! conditions (`u.n = 0`, `curl u = 0` on the boundary) have closed-form
//! eigenbases here:
//!
//! * scalar modes `cos(k pi x / lx) cos(l pi y / ly)` with eigenvalue
//!   `xi = (k pi / lx)^2 + (l pi / ly)^2`,
//! * gradient-type vector modes (gradients of the scalar modes, `k + l >= 1`),
//! * rotational-type vector modes (perpendicular gradients of
//!   `sin(k pi x / lx) sin(l pi y / ly)`, `k, l >= 1`).
//!
//! All modes are stored L2-orthonormalized.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Result, SimError};

/// Rectangle geometry plus discretization parameters.
///
/// `grid_n >= 2 * cutoff + 1` guarantees that midpoint-rule quadrature of a
/// product of two fields bandlimited to `cutoff` is exact (no aliasing onto
/// retained modes), which is what the dealiased coupling term relies on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub lx: f64,
    pub ly: f64,
    /// Max mode index per dimension.
    pub cutoff: usize,
    /// Collocation points per dimension (midpoint grid).
    pub grid_n: usize,
}

impl DomainSpec {
    pub fn new(lx: f64, ly: f64, cutoff: usize, grid_n: usize) -> Result<Self> {
        let spec = DomainSpec {
            lx,
            ly,
            cutoff,
            grid_n,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Square domain `[0, pi]^2` with the minimal dealiasing grid.
    pub fn square(cutoff: usize) -> Result<Self> {
        Self::new(PI, PI, cutoff, 2 * cutoff + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lx > 0.0 && self.lx.is_finite()) || !(self.ly > 0.0 && self.ly.is_finite()) {
            return Err(SimError::InvalidParameter(format!(
                "domain lengths must be positive and finite, got lx = {}, ly = {}",
                self.lx, self.ly
            )));
        }
        if self.cutoff < 1 {
            return Err(SimError::InvalidParameter(
                "cutoff must be >= 1".to_string(),
            ));
        }
        if self.grid_n < 2 * self.cutoff + 1 {
            return Err(SimError::InvalidParameter(format!(
                "grid_n must be >= 2 * cutoff + 1 = {} for exact dealiasing, got {}",
                2 * self.cutoff + 1,
                self.grid_n
            )));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// Wavenumber `k pi / lx`.
    pub fn kx(&self, k: usize) -> f64 {
        k as f64 * PI / self.lx
    }

    /// Wavenumber `l pi / ly`.
    pub fn ky(&self, l: usize) -> f64 {
        l as f64 * PI / self.ly
    }

    /// Laplacian eigenvalue for the `(k, l)` tensor mode.
    pub fn xi(&self, k: usize, l: usize) -> f64 {
        let kx = self.kx(k);
        let ky = self.ky(l);
        kx * kx + ky * ky
    }

    /// Smallest nonzero scalar eigenvalue on this domain.
    pub fn xi_min_nonzero(&self) -> f64 {
        self.xi(1, 0).min(self.xi(0, 1))
    }

    /// L2 norm of `cos(k pi x / lx)` over `[0, lx]`.
    pub fn cos_norm_x(&self, k: usize) -> f64 {
        if k == 0 {
            self.lx.sqrt()
        } else {
            (self.lx / 2.0).sqrt()
        }
    }

    /// L2 norm of `cos(l pi y / ly)` over `[0, ly]`.
    pub fn cos_norm_y(&self, l: usize) -> f64 {
        if l == 0 {
            self.ly.sqrt()
        } else {
            (self.ly / 2.0).sqrt()
        }
    }

    /// Midpoint collocation abscissae `x_j = (j + 1/2) lx / grid_n`.
    pub fn grid_x(&self) -> Vec<f64> {
        (0..self.grid_n)
            .map(|j| (j as f64 + 0.5) * self.lx / self.grid_n as f64)
            .collect()
    }

    pub fn grid_y(&self) -> Vec<f64> {
        (0..self.grid_n)
            .map(|j| (j as f64 + 0.5) * self.ly / self.grid_n as f64)
            .collect()
    }

    pub fn same_as(&self, other: &DomainSpec, context: &'static str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(SimError::DomainMismatch { context })
        }
    }
}

/// One eigenmode of the scalar Neumann Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarMode {
    pub k: usize,
    pub l: usize,
    pub xi: f64,
}

/// Family of a vector eigenmode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorKind {
    /// Gradient of a scalar Neumann mode; curl-free. Requires `k + l >= 1`.
    Gradient,
    /// Perpendicular gradient of a Dirichlet stream mode; divergence-free.
    /// Requires `k >= 1` and `l >= 1`.
    Rotational,
}

/// One eigenmode of the vector Laplacian under `u.n = 0`, `curl u = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VectorMode {
    pub kind: VectorKind,
    pub k: usize,
    pub l: usize,
    pub xi: f64,
}

/// All scalar modes of a domain, sorted by `(xi, k, l)`.
#[derive(Debug, Clone)]
pub struct ModeSet {
    pub domain: DomainSpec,
    pub modes: Vec<ScalarMode>,
}

/// All vector modes of a domain, sorted by `(xi, kind, k, l)` with
/// gradient modes first among equal eigenvalues.
#[derive(Debug, Clone)]
pub struct VectorModeSet {
    pub domain: DomainSpec,
    pub modes: Vec<VectorMode>,
}

/// Every scalar mode with `0 <= k, l <= cutoff`, including the constant
/// mode `(0, 0)`.
pub fn enumerate_scalar_modes(domain: &DomainSpec) -> ModeSet {
    let k_max = domain.cutoff;
    let mut modes = Vec::with_capacity((k_max + 1) * (k_max + 1));
    for k in 0..=k_max {
        for l in 0..=k_max {
            modes.push(ScalarMode {
                k,
                l,
                xi: domain.xi(k, l),
            });
        }
    }
    modes.sort_by(|a, b| {
        a.xi.partial_cmp(&b.xi)
            .expect("finite eigenvalues")
            .then(a.k.cmp(&b.k))
            .then(a.l.cmp(&b.l))
    });
    ModeSet {
        domain: *domain,
        modes,
    }
}

/// Gradient modes for `k + l >= 1` and rotational modes for `k, l >= 1`,
/// all with indices `<= cutoff`.
pub fn enumerate_vector_modes(domain: &DomainSpec) -> VectorModeSet {
    let k_max = domain.cutoff;
    let mut modes = Vec::new();
    for k in 0..=k_max {
        for l in 0..=k_max {
            if k + l >= 1 {
                modes.push(VectorMode {
                    kind: VectorKind::Gradient,
                    k,
                    l,
                    xi: domain.xi(k, l),
                });
            }
            if k >= 1 && l >= 1 {
                modes.push(VectorMode {
                    kind: VectorKind::Rotational,
                    k,
                    l,
                    xi: domain.xi(k, l),
                });
            }
        }
    }
    modes.sort_by(|a, b| {
        let kind_rank = |m: &VectorMode| match m.kind {
            VectorKind::Gradient => 0u8,
            VectorKind::Rotational => 1u8,
        };
        a.xi.partial_cmp(&b.xi)
            .expect("finite eigenvalues")
            .then(kind_rank(a).cmp(&kind_rank(b)))
            .then(a.k.cmp(&b.k))
            .then(a.l.cmp(&b.l))
    });
    VectorModeSet {
        domain: *domain,
        modes,
    }
}
