//! Fourier transforms and multiplier operators on the periodic box.
//!
//! The forward transform approximates `u_hat(xi) = integral exp(-i x.xi) u dx`
//! (discrete sum scaled by `dx^2`), so physical constants in the equations
//! carry over literally. The inverse recovers samples to machine precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::field::{Axis, ComplexField, RealField};
use crate::grid::Grid2D;

/// Complex Fourier coefficients indexed by the dual lattice, row-major with
/// FFT bin ordering along each axis.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub(crate) grid: Grid2D,
    pub(crate) coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn from_parts(grid: Grid2D, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.points());
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at signed frequency indices `(j1, j2)`.
    pub fn at(&self, j1: i64, j2: i64) -> Complex64 {
        let n = self.grid.n() as i64;
        let i1 = j1.rem_euclid(n) as usize;
        let i2 = j2.rem_euclid(n) as usize;
        self.coeffs[i2 * self.grid.n() + i1]
    }

    /// Parseval sum `(k0/2pi)^2 * sum |coeffs|^2`, equal to `||u||_L2^2`.
    pub fn l2_norm_sqr(&self) -> f64 {
        let w = (self.grid.k0() / (2.0 * std::f64::consts::PI)).powi(2);
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>() * w
    }
}

struct PlanPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<PlanPair> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<PlanPair>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(PlanPair {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn transpose(data: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in (r + 1)..n {
            data.swap(r * n + c, c * n + r);
        }
    }
}

fn fft2_in_place(data: &mut [Complex64], n: usize, inverse: bool) {
    let plans = plans(n);
    let fft = if inverse { &plans.inverse } else { &plans.forward };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose(data, n);
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose(data, n);
}

/// Forward transform with the integral normalisation.
pub fn to_spectral(u: &ComplexField) -> SpectralField {
    let grid = u.grid;
    let mut coeffs = u.data.clone();
    fft2_in_place(&mut coeffs, grid.n(), false);
    let scale = grid.cell_area();
    for z in &mut coeffs {
        *z *= scale;
    }
    SpectralField { grid, coeffs }
}

/// Inverse transform; `to_physical(to_spectral(u)) == u` to machine precision.
pub fn to_physical(u_hat: &SpectralField) -> ComplexField {
    let grid = u_hat.grid;
    let mut data = u_hat.coeffs.clone();
    fft2_in_place(&mut data, grid.n(), true);
    let scale = 1.0 / (grid.len_side() * grid.len_side());
    for z in &mut data {
        *z *= scale;
    }
    ComplexField { grid, data }
}

/// Apply a scalar multiplier `m(j1, j2)` in Fourier space.
pub fn apply_multiplier(
    u_hat: &SpectralField,
    mut m: impl FnMut(i64, i64) -> Complex64,
) -> SpectralField {
    let grid = u_hat.grid;
    let n = grid.n();
    let mut coeffs = Vec::with_capacity(u_hat.coeffs.len());
    for r in 0..n {
        let j2 = grid.signed_index(r);
        for c in 0..n {
            let j1 = grid.signed_index(c);
            coeffs.push(u_hat.coeffs[r * n + c] * m(j1, j2));
        }
    }
    SpectralField { grid, coeffs }
}

fn multiplier_op(u: &ComplexField, m: impl FnMut(i64, i64) -> Complex64) -> ComplexField {
    to_physical(&apply_multiplier(&to_spectral(u), m))
}

/// Spectral derivative along `axis`; the unpaired Nyquist mode is zeroed so
/// real inputs stay real.
pub fn derivative(u: &ComplexField, axis: Axis) -> ComplexField {
    let k0 = u.grid.k0();
    let half = (u.grid.n() / 2) as i64;
    multiplier_op(u, |j1, j2| {
        let j = match axis {
            Axis::X1 => j1,
            Axis::X2 => j2,
        };
        if j == -half {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, k0 * j as f64)
        }
    })
}

pub fn derivative_real(u: &RealField, axis: Axis) -> RealField {
    derivative(&u.as_complex(), axis).re_part()
}

/// Gradient `(d1 u, d2 u)` sharing one forward transform.
pub fn gradient(u: &ComplexField) -> (ComplexField, ComplexField) {
    let u_hat = to_spectral(u);
    let k0 = u.grid.k0();
    let half = (u.grid.n() / 2) as i64;
    let d = |sel: Axis| {
        to_physical(&apply_multiplier(&u_hat, |j1, j2| {
            let j = match sel {
                Axis::X1 => j1,
                Axis::X2 => j2,
            };
            if j == -half {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k0 * j as f64)
            }
        }))
    };
    (d(Axis::X1), d(Axis::X2))
}

/// Riesz transform `d_axis / |grad|`; the zero mode maps to zero.
pub fn riesz(u: &ComplexField, axis: Axis) -> ComplexField {
    let k0 = u.grid.k0();
    multiplier_op(u, |j1, j2| {
        if j1 == 0 && j2 == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let xi = (
            k0 * j1 as f64,
            k0 * j2 as f64,
        );
        let norm = (xi.0 * xi.0 + xi.1 * xi.1).sqrt();
        let component = match axis {
            Axis::X1 => xi.0,
            Axis::X2 => xi.1,
        };
        Complex64::new(0.0, component / norm)
    })
}

/// Tolerance gate for the inverse-Laplacian mean flag.
const INV_LAPLACIAN_MEAN_TOL: f64 = 1e-8;

/// `(-Laplacian)^(-1)` with the zero mode of the output set to zero.
///
/// Returns the solution of the mean-projected problem together with a flag
/// raised when `|mean(f)| * L^2` exceeds `1e-8 * ||f||_L2`.
pub fn inv_laplacian(f: &ComplexField) -> (ComplexField, bool) {
    let grid = f.grid;
    let k0 = grid.k0();
    let f_hat = to_spectral(f);
    let zero_coeff = f_hat.at(0, 0).norm();
    let flagged = zero_coeff > INV_LAPLACIAN_MEAN_TOL * f.l2_norm().max(f64::MIN_POSITIVE);
    let out = to_physical(&apply_multiplier(&f_hat, |j1, j2| {
        if j1 == 0 && j2 == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            let xi_sq = k0 * k0 * (j1 * j1 + j2 * j2) as f64;
            Complex64::new(1.0 / xi_sq, 0.0)
        }
    }));
    (out, flagged)
}

/// `d_axis / (-Laplacian)`: multiplier `i xi_axis / |xi|^2`, zero at the zero
/// mode. The differentiated source is mean-free, so the inverse-Laplacian
/// mean flag cannot raise and is omitted. Inherits the derivative's Nyquist
/// convention.
pub fn grad_inv_laplacian(f: &ComplexField, axis: Axis) -> ComplexField {
    let k0 = f.grid.k0();
    let half = (f.grid.n() / 2) as i64;
    multiplier_op(f, |j1, j2| {
        if j1 == 0 && j2 == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let j = match axis {
            Axis::X1 => j1,
            Axis::X2 => j2,
        };
        if j == -half {
            return Complex64::new(0.0, 0.0);
        }
        let xi_sq = k0 * k0 * (j1 * j1 + j2 * j2) as f64;
        Complex64::new(0.0, k0 * j as f64 / xi_sq)
    })
}

/// Zero all coefficients with `max(|j1|, |j2|) > n/3` (2/3 rule).
pub fn dealias_spectral(u_hat: &SpectralField) -> SpectralField {
    let cutoff = u_hat.grid.dealias_cutoff();
    apply_multiplier(u_hat, |j1, j2| {
        if j1.abs().max(j2.abs()) > cutoff {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

/// Dealias a physical-space field through one transform round trip.
pub fn dealias(u: &ComplexField) -> ComplexField {
    to_physical(&dealias_spectral(&to_spectral(u)))
}

pub fn dealias_real(u: &RealField) -> RealField {
    dealias(&u.as_complex()).re_part()
}

/// Pointwise product followed by the 2/3-rule projection.
pub fn mul_dealiased(a: &ComplexField, b: &ComplexField) -> Result<ComplexField> {
    Ok(dealias(&a.mul_raw(b)?))
}

pub fn mul_real_dealiased(a: &ComplexField, b: &RealField) -> Result<ComplexField> {
    Ok(dealias(&a.mul_real_raw(b)?))
}

/// Transfer a field to an `m x m` grid on the same box by spectral padding
/// or truncation. Exact for band-limited fields.
pub fn resample(u: &ComplexField, m: usize) -> Result<ComplexField> {
    let src = u.grid;
    let dst = Grid2D::new(m, src.len_side())?;
    let u_hat = to_spectral(u);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); dst.points()];
    let keep = (src.n().min(m) / 2) as i64;
    let md = m as i64;
    for j2 in -keep..keep {
        for j1 in -keep..keep {
            let v = u_hat.at(j1, j2);
            let i1 = j1.rem_euclid(md) as usize;
            let i2 = j2.rem_euclid(md) as usize;
            coeffs[i2 * m + i1] = v;
        }
    }
    Ok(to_physical(&SpectralField { grid: dst, coeffs }))
}
