//! Initial-data families: Gaussian bumps, grid-commensurate plane waves,
//! and seeded random fields with prescribed Sobolev size.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{hs_norm, DyadicLadder};
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid2D;
use crate::spectral::{dealias, to_physical, SpectralField};

/// Supported initial-data families.
#[derive(Debug, Clone, PartialEq)]
pub enum DataKind {
    /// `a exp(-|x - x0|^2 / w^2)` centred at `x0` (box centre by default).
    Gaussian {
        amplitude: f64,
        width: f64,
        center: Option<(f64, f64)>,
    },
    /// `a exp(i k . x)` with `k` on the dual lattice.
    PlaneWave {
        amplitude: f64,
        wavevector: (f64, f64),
    },
    /// Seeded random coefficients with magnitudes `(1 + |xi|)^(-slope)`,
    /// rescaled so the `H^s` norm equals `norm`.
    RandomHs {
        norm: f64,
        s: f64,
        slope: Option<f64>,
        seed: u64,
    },
}

/// Build (dealiased) initial data on the grid.
pub fn make_initial_data(grid: Grid2D, kind: &DataKind) -> Result<ComplexField> {
    match kind {
        DataKind::Gaussian {
            amplitude,
            width,
            center,
        } => {
            if !width.is_finite() || *width <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "gaussian width {width} must be positive"
                )));
            }
            let (c1, c2) =
                center.unwrap_or((grid.len_side() / 2.0, grid.len_side() / 2.0));
            let a = *amplitude;
            let w2 = width * width;
            Ok(dealias(&ComplexField::from_fn(grid, |x1, x2| {
                let r2 = (x1 - c1).powi(2) + (x2 - c2).powi(2);
                Complex64::new(a * (-r2 / w2).exp(), 0.0)
            })))
        }
        DataKind::PlaneWave {
            amplitude,
            wavevector,
        } => {
            let k0 = grid.k0();
            let j1 = wavevector.0 / k0;
            let j2 = wavevector.1 / k0;
            let near = |x: f64| (x - x.round()).abs() <= 1e-9 * x.abs().max(1.0);
            if !near(j1) || !near(j2) {
                return Err(Error::IncommensurateWavevector(
                    wavevector.0,
                    wavevector.1,
                ));
            }
            let cutoff = grid.dealias_cutoff();
            if j1.round().abs() as i64 > cutoff || j2.round().abs() as i64 > cutoff {
                return Err(Error::InvalidConfig(format!(
                    "wavevector ({}, {}) lies outside the dealiased band",
                    wavevector.0, wavevector.1
                )));
            }
            let (k1, k2) = (k0 * j1.round(), k0 * j2.round());
            let a = *amplitude;
            Ok(ComplexField::from_fn(grid, |x1, x2| {
                Complex64::from_polar(a, k1 * x1 + k2 * x2)
            }))
        }
        DataKind::RandomHs {
            norm,
            s,
            slope,
            seed,
        } => {
            let slope = slope.unwrap_or(s + 1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let n = grid.n();
            let k0 = grid.k0();
            let cutoff = grid.dealias_cutoff();
            let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.points()];
            for r in 0..n {
                let j2 = grid.signed_index(r);
                for c in 0..n {
                    let j1 = grid.signed_index(c);
                    // Consume the generator in a fixed order so the draw is
                    // independent of which modes get kept.
                    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                    let jitter = rng.gen_range(0.5..1.0);
                    if j1.abs().max(j2.abs()) > cutoff {
                        continue;
                    }
                    let xi = k0 * (((j1 * j1 + j2 * j2) as f64).sqrt());
                    let mag = jitter * (1.0 + xi).powf(-slope);
                    coeffs[r * n + c] = Complex64::from_polar(mag, phase);
                }
            }
            let raw = to_physical(&SpectralField::from_parts(grid, coeffs));
            if *norm == 0.0 {
                return Ok(ComplexField::zeros(grid));
            }
            let ladder = DyadicLadder::new(grid);
            let current = hs_norm(&ladder, &raw, *s)?;
            if current == 0.0 {
                return Err(Error::InvalidConfig(
                    "random field degenerated to zero".into(),
                ));
            }
            Ok(raw.scaled(Complex64::new(norm / current, 0.0)))
        }
    }
}
