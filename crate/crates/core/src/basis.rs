//! Transforms and spectral calculus on the rectangle eigenbasis.
//!
//! `Basis` precomputes the 1-D evaluation/projection tables for the midpoint
//! collocation grid; everything else is separable matrix products with a
//! fixed summation order, so repeated runs are bit-identical. Transforms are
//! direct summation, O(cutoff * grid_n) per dimension.
//!
//! Grid conventions: sample arrays are `grid_n x grid_n`, row index = x,
//! column index = y. Coefficient blocks are `(cutoff + 1)^2` indexed by
//! `(k, l)`; the sine family uses the same shape with row/column 0 fixed at
//! zero.

use ndarray::Array2;

use crate::domain::DomainSpec;
use crate::error::{Result, SimError};
use crate::field::{ScalarField, VectorField};

/// Precomputed transform tables for one domain.
#[derive(Debug, Clone)]
pub struct Basis {
    domain: DomainSpec,
    // Evaluation tables, grid_n x (cutoff + 1). Sine tables keep column 0
    // at zero so both families share one coefficient shape.
    cos_eval_x: Array2<f64>,
    cos_eval_y: Array2<f64>,
    sin_eval_x: Array2<f64>,
    sin_eval_y: Array2<f64>,
    // Projection tables, (cutoff + 1) x grid_n: evaluation transposed and
    // scaled by the quadrature weight.
    cos_proj_x: Array2<f64>,
    cos_proj_y: Array2<f64>,
    sin_proj_x: Array2<f64>,
    sin_proj_y: Array2<f64>,
    wx: f64,
    wy: f64,
}

impl Basis {
    pub fn new(domain: &DomainSpec) -> Self {
        let n = domain.grid_n;
        let m = domain.cutoff + 1;
        let wx = domain.lx / n as f64;
        let wy = domain.ly / n as f64;
        let xs = domain.grid_x();
        let ys = domain.grid_y();

        let mut cos_eval_x = Array2::zeros((n, m));
        let mut sin_eval_x = Array2::zeros((n, m));
        let sin_norm_x = (domain.lx / 2.0).sqrt();
        for (j, &x) in xs.iter().enumerate() {
            for k in 0..m {
                let arg = domain.kx(k) * x;
                cos_eval_x[[j, k]] = arg.cos() / domain.cos_norm_x(k);
                if k >= 1 {
                    sin_eval_x[[j, k]] = arg.sin() / sin_norm_x;
                }
            }
        }
        let mut cos_eval_y = Array2::zeros((n, m));
        let mut sin_eval_y = Array2::zeros((n, m));
        let sin_norm_y = (domain.ly / 2.0).sqrt();
        for (j, &y) in ys.iter().enumerate() {
            for l in 0..m {
                let arg = domain.ky(l) * y;
                cos_eval_y[[j, l]] = arg.cos() / domain.cos_norm_y(l);
                if l >= 1 {
                    sin_eval_y[[j, l]] = arg.sin() / sin_norm_y;
                }
            }
        }

        let scaled_t = |eval: &Array2<f64>, w: f64| {
            let mut out = Array2::zeros((m, n));
            for j in 0..n {
                for k in 0..m {
                    out[[k, j]] = eval[[j, k]] * w;
                }
            }
            out
        };

        Basis {
            domain: *domain,
            cos_proj_x: scaled_t(&cos_eval_x, wx),
            cos_proj_y: scaled_t(&cos_eval_y, wy),
            sin_proj_x: scaled_t(&sin_eval_x, wx),
            sin_proj_y: scaled_t(&sin_eval_y, wy),
            cos_eval_x,
            cos_eval_y,
            sin_eval_x,
            sin_eval_y,
            wx,
            wy,
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    fn check_dims(&self, samples: &Array2<f64>) -> Result<()> {
        let n = self.domain.grid_n;
        if samples.dim() != (n, n) {
            return Err(SimError::DimensionMismatch {
                expected: (n, n),
                got: samples.dim(),
            });
        }
        Ok(())
    }

    /// L2 projection of grid samples onto the scalar Neumann modes.
    ///
    /// Exact (to roundoff) for inputs bandlimited to the cutoff; for a
    /// product of two bandlimited fields the midpoint rule dealiases the
    /// retained coefficients exactly because `grid_n >= 2 * cutoff + 1`.
    pub fn forward(&self, samples: &Array2<f64>) -> Result<ScalarField> {
        self.check_dims(samples)?;
        let t = mat_mul(&self.cos_proj_x, samples);
        let coeffs = mat_mul_bt(&t, &self.cos_proj_y);
        ScalarField::from_coeffs(&self.domain, coeffs)
    }

    /// Grid samples of a scalar field (the inverse transform).
    pub fn samples(&self, f: &ScalarField) -> Array2<f64> {
        let t = mat_mul(&self.cos_eval_x, f.coeffs());
        mat_mul_bt(&t, &self.cos_eval_y)
    }

    /// Grid samples of both components of a vector field.
    pub fn vector_samples(&self, v: &VectorField) -> (Array2<f64>, Array2<f64>) {
        let (px, py) = self.component_coeffs(v);
        let ux = mat_mul_bt(&mat_mul(&self.sin_eval_x, &px), &self.cos_eval_y);
        let uy = mat_mul_bt(&mat_mul(&self.cos_eval_x, &py), &self.sin_eval_y);
        (ux, uy)
    }

    /// L2 projection of vector samples onto the vector modes.
    pub fn forward_vector(&self, ux: &Array2<f64>, uy: &Array2<f64>) -> Result<VectorField> {
        self.check_dims(ux)?;
        self.check_dims(uy)?;
        let px = mat_mul_bt(&mat_mul(&self.sin_proj_x, ux), &self.cos_proj_y);
        let py = mat_mul_bt(&mat_mul(&self.cos_proj_x, uy), &self.sin_proj_y);

        let d = &self.domain;
        let m = d.cutoff + 1;
        let mut grad = Array2::zeros((m, m));
        let mut rot = Array2::zeros((m, m));
        for k in 0..m {
            for l in 0..m {
                let xi = d.xi(k, l);
                if xi == 0.0 {
                    continue;
                }
                let sq = xi.sqrt();
                let (kx, ky) = (d.kx(k), d.ky(l));
                // The per-(k, l) map between component coefficients and
                // (gradient, rotational) coefficients is orthogonal, so the
                // inverse is the transpose. Row/column-0 zeros in the sine
                // tables keep invalid slots at exactly zero.
                grad[[k, l]] = (-kx / sq) * px[[k, l]] + (-ky / sq) * py[[k, l]];
                rot[[k, l]] = (ky / sq) * px[[k, l]] + (-kx / sq) * py[[k, l]];
            }
        }
        Ok(VectorField::from_parts(d, grad, rot))
    }

    /// Component coefficients of a vector field in the sin x cos / cos x sin
    /// tensor bases.
    fn component_coeffs(&self, v: &VectorField) -> (Array2<f64>, Array2<f64>) {
        let d = &self.domain;
        let m = d.cutoff + 1;
        let mut px = Array2::zeros((m, m));
        let mut py = Array2::zeros((m, m));
        let g = v.grad_coeffs();
        let r = v.rot_coeffs();
        for k in 0..m {
            for l in 0..m {
                let xi = d.xi(k, l);
                if xi == 0.0 {
                    continue;
                }
                let sq = xi.sqrt();
                let (kx, ky) = (d.kx(k), d.ky(l));
                px[[k, l]] = (-kx / sq) * g[[k, l]] + (ky / sq) * r[[k, l]];
                py[[k, l]] = (-ky / sq) * g[[k, l]] + (-kx / sq) * r[[k, l]];
            }
        }
        (px, py)
    }

    /// Grid samples of `curl v`. The curl of a rotational mode is `sqrt(xi)`
    /// times a Dirichlet (sine x sine) stream mode, which has no Neumann
    /// expansion, so the result is returned in sample space.
    pub fn curl_samples(&self, v: &VectorField) -> Array2<f64> {
        let d = &self.domain;
        let m = d.cutoff + 1;
        let mut cs = Array2::zeros((m, m));
        let r = v.rot_coeffs();
        for k in 1..m {
            for l in 1..m {
                cs[[k, l]] = d.xi(k, l).sqrt() * r[[k, l]];
            }
        }
        self.sin_sin_samples(&cs)
    }

    /// Inverse transform in the sine x sine tensor basis (row/col 0 ignored).
    pub(crate) fn sin_sin_samples(&self, coeffs: &Array2<f64>) -> Array2<f64> {
        mat_mul_bt(&mat_mul(&self.sin_eval_x, coeffs), &self.sin_eval_y)
    }

    /// Midpoint quadrature of grid samples over the domain.
    pub fn quadrature(&self, samples: &Array2<f64>) -> f64 {
        let s = samples.as_slice().expect("standard layout");
        let mut acc = 0.0;
        for &v in s {
            acc += v;
        }
        acc * self.wx * self.wy
    }

    /// Pointwise evaluation of a scalar field by direct summation.
    pub fn eval_scalar(&self, f: &ScalarField, x: f64, y: f64) -> f64 {
        let d = &self.domain;
        let m = d.cutoff + 1;
        let cx: Vec<f64> = (0..m)
            .map(|k| (d.kx(k) * x).cos() / d.cos_norm_x(k))
            .collect();
        let cy: Vec<f64> = (0..m)
            .map(|l| (d.ky(l) * y).cos() / d.cos_norm_y(l))
            .collect();
        let mut acc = 0.0;
        for k in 0..m {
            for l in 0..m {
                acc += f.coeffs()[[k, l]] * cx[k] * cy[l];
            }
        }
        acc
    }

    /// Max residuals of the boundary conditions `v.n = 0`, `curl v = 0`,
    /// `grad s . n = 0`, evaluated analytically from the expansions at
    /// `8 * cutoff` points per edge. Any field expanded in the basis
    /// satisfies all three up to roundoff.
    pub fn boundary_residual(&self, v: &VectorField, s: &ScalarField) -> Result<(f64, f64, f64)> {
        self.domain.same_as(v.domain(), "boundary_residual")?;
        self.domain.same_as(s.domain(), "boundary_residual")?;
        let d = &self.domain;
        let m = d.cutoff + 1;
        let n_pts = 8 * d.cutoff;
        let (px, py) = self.component_coeffs(v);

        let sin_norm_x = (d.lx / 2.0).sqrt();
        let sin_norm_y = (d.ly / 2.0).sqrt();
        let sx = |k: usize, x: f64| (d.kx(k) * x).sin() / sin_norm_x;
        let cx = |k: usize, x: f64| (d.kx(k) * x).cos() / d.cos_norm_x(k);
        let sy = |l: usize, y: f64| (d.ky(l) * y).sin() / sin_norm_y;
        let cy = |l: usize, y: f64| (d.ky(l) * y).cos() / d.cos_norm_y(l);

        let mut r_vn = 0.0f64;
        let mut r_curl = 0.0f64;
        let mut r_grad = 0.0f64;

        // Edges x = 0 and x = lx: normal is +-e_x.
        for &x_edge in &[0.0, d.lx] {
            let sxv: Vec<f64> = (0..m).map(|k| sx(k, x_edge)).collect();
            for i in 0..n_pts {
                let y = i as f64 * d.ly / (n_pts - 1) as f64;
                let cyv: Vec<f64> = (0..m).map(|l| cy(l, y)).collect();
                let syv: Vec<f64> = (0..m).map(|l| sy(l, y)).collect();
                let mut un = 0.0;
                let mut curl = 0.0;
                let mut gn = 0.0;
                for k in 0..m {
                    for l in 0..m {
                        un += px[[k, l]] * sxv[k] * cyv[l];
                        curl += d.xi(k, l).sqrt() * v.rot_coeffs()[[k, l]] * sxv[k] * syv[l];
                        gn += s.coeffs()[[k, l]] * (-d.kx(k)) * sxv[k] * cyv[l];
                    }
                }
                r_vn = r_vn.max(un.abs());
                r_curl = r_curl.max(curl.abs());
                r_grad = r_grad.max(gn.abs());
            }
        }
        // Edges y = 0 and y = ly: normal is +-e_y.
        for &y_edge in &[0.0, d.ly] {
            let syv: Vec<f64> = (0..m).map(|l| sy(l, y_edge)).collect();
            for i in 0..n_pts {
                let x = i as f64 * d.lx / (n_pts - 1) as f64;
                let cxv: Vec<f64> = (0..m).map(|k| cx(k, x)).collect();
                let sxv: Vec<f64> = (0..m).map(|k| sx(k, x)).collect();
                let mut un = 0.0;
                let mut curl = 0.0;
                let mut gn = 0.0;
                for k in 0..m {
                    for l in 0..m {
                        un += py[[k, l]] * cxv[k] * syv[l];
                        curl += d.xi(k, l).sqrt() * v.rot_coeffs()[[k, l]] * sxv[k] * syv[l];
                        gn += s.coeffs()[[k, l]] * (-d.ky(l)) * cxv[k] * syv[l];
                    }
                }
                r_vn = r_vn.max(un.abs());
                r_curl = r_curl.max(curl.abs());
                r_grad = r_grad.max(gn.abs());
            }
        }
        Ok((r_vn, r_curl, r_grad))
    }
}

/// Gradient of a scalar field: scalar mode `(k, l)` maps onto the gradient
/// mode `(k, l)` scaled by `sqrt(xi)`. The constant mode drops out.
pub fn grad(s: &ScalarField) -> VectorField {
    let d = s.domain();
    let m = d.cutoff + 1;
    let mut out = VectorField::zeros(d);
    for k in 0..m {
        for l in 0..m {
            let xi = d.xi(k, l);
            if xi > 0.0 {
                out.grad_coeffs_mut()[[k, l]] = xi.sqrt() * s.coeffs()[[k, l]];
            }
        }
    }
    out
}

/// Divergence of a vector field: `div(Gradient(k, l)) = -sqrt(xi)` times the
/// scalar mode `(k, l)`; rotational modes are divergence-free.
pub fn div(v: &VectorField) -> ScalarField {
    let d = v.domain();
    let m = d.cutoff + 1;
    let mut out = ScalarField::zeros(d);
    for k in 0..m {
        for l in 0..m {
            let xi = d.xi(k, l);
            if xi > 0.0 {
                out.set(k, l, -xi.sqrt() * v.grad_coeffs()[[k, l]]);
            }
        }
    }
    out
}

/// Solution of `-Laplace(w) = f` in the vector basis: every vector mode has
/// `xi > 0`, so the solve is the diagonal division `c / xi`.
pub fn solve_vector_poisson(f: &VectorField) -> VectorField {
    let d = f.domain();
    let m = d.cutoff + 1;
    let mut out = VectorField::zeros(d);
    for k in 0..m {
        for l in 0..m {
            let xi = d.xi(k, l);
            if xi > 0.0 {
                out.grad_coeffs_mut()[[k, l]] = f.grad_coeffs()[[k, l]] / xi;
                out.rot_coeffs_mut()[[k, l]] = f.rot_coeffs()[[k, l]] / xi;
            }
        }
    }
    out
}

/// Applies `-Laplace` mode-wise (used to check Poisson residuals).
pub fn neg_laplacian(v: &VectorField) -> VectorField {
    let d = v.domain();
    let m = d.cutoff + 1;
    let mut out = VectorField::zeros(d);
    for k in 0..m {
        for l in 0..m {
            let xi = d.xi(k, l);
            out.grad_coeffs_mut()[[k, l]] = xi * v.grad_coeffs()[[k, l]];
            out.rot_coeffs_mut()[[k, l]] = xi * v.rot_coeffs()[[k, l]];
        }
    }
    out
}

/// Detector for Neumann boundary-condition violations in raw grid samples.
///
/// Estimates `max |grad s . n|` on the boundary with a one-sided cubic
/// finite-difference stencil on the first four sample layers of each edge.
/// A basis expansion satisfies the condition identically, so use
/// [`Basis::boundary_residual`] for those; this detector exists to catch
/// sample data that was never a legal expansion (the FD estimate itself
/// carries O(h^3) error).
pub fn boundary_residual_of_samples(domain: &DomainSpec, samples: &Array2<f64>) -> Result<f64> {
    let n = domain.grid_n;
    if samples.dim() != (n, n) {
        return Err(SimError::DimensionMismatch {
            expected: (n, n),
            got: samples.dim(),
        });
    }
    if n < 4 {
        return Err(SimError::InvalidParameter(
            "boundary detector needs grid_n >= 4".to_string(),
        ));
    }
    // Derivative at the wall from midpoint nodes at (1/2, 3/2, 5/2, 7/2) h.
    const W: [f64; 4] = [-71.0 / 24.0, 47.0 / 8.0, -31.0 / 8.0, 23.0 / 24.0];
    let hx = domain.lx / n as f64;
    let hy = domain.ly / n as f64;
    let mut worst = 0.0f64;
    for j in 0..n {
        let d_x0 = (0..4).map(|i| W[i] * samples[[i, j]]).sum::<f64>() / hx;
        let d_x1 = (0..4).map(|i| W[i] * samples[[n - 1 - i, j]]).sum::<f64>() / hx;
        worst = worst.max(d_x0.abs()).max(d_x1.abs());
    }
    for i in 0..n {
        let d_y0 = (0..4).map(|j| W[j] * samples[[i, j]]).sum::<f64>() / hy;
        let d_y1 = (0..4).map(|j| W[j] * samples[[i, n - 1 - j]]).sum::<f64>() / hy;
        worst = worst.max(d_y0.abs()).max(d_y1.abs());
    }
    Ok(worst)
}

/// `a (m x p) * b (p x n)`, fixed i-k-j summation order.
fn mat_mul(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (m, p) = a.dim();
    let (p2, n) = b.dim();
    debug_assert_eq!(p, p2);
    let mut out = Array2::zeros((m, n));
    let a_s = a.as_slice().expect("standard layout");
    let b_s = b.as_slice().expect("standard layout");
    let o_s = out.as_slice_mut().expect("standard layout");
    for i in 0..m {
        let row_out = &mut o_s[i * n..(i + 1) * n];
        for k in 0..p {
            let aik = a_s[i * p + k];
            if aik == 0.0 {
                continue;
            }
            let row_b = &b_s[k * n..(k + 1) * n];
            for j in 0..n {
                row_out[j] += aik * row_b[j];
            }
        }
    }
    out
}

/// `a (m x p) * transpose(bt)` where `bt` is `n x p`.
fn mat_mul_bt(a: &Array2<f64>, bt: &Array2<f64>) -> Array2<f64> {
    let (m, p) = a.dim();
    let (n, p2) = bt.dim();
    debug_assert_eq!(p, p2);
    let mut out = Array2::zeros((m, n));
    let a_s = a.as_slice().expect("standard layout");
    let b_s = bt.as_slice().expect("standard layout");
    for i in 0..m {
        let row_a = &a_s[i * p..(i + 1) * p];
        for j in 0..n {
            let row_b = &b_s[j * p..(j + 1) * p];
            let mut acc = 0.0;
            for k in 0..p {
                acc += row_a[k] * row_b[k];
            }
            out[[i, j]] = acc;
        }
    }
    out
}
