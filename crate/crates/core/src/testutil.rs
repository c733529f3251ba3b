//! Seeded field generators shared by the unit tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{ComplexField, RealField, RealVectorField};
use crate::grid::Grid2D;
use crate::spectral::{derivative_real, to_physical, SpectralField};

/// Uniform random complex samples in `[-1,1] + i[-1,1]`.
pub fn rand_field(grid: Grid2D, seed: u64) -> ComplexField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..grid.points())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ComplexField::from_data(grid, data).unwrap()
}

/// Random field with spectrum confined to `max(|j1|,|j2|) <= cutoff` and a
/// mildly decaying coefficient profile.
pub fn rand_band_limited(grid: Grid2D, seed: u64, amp: f64, cutoff: i64) -> ComplexField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.points()];
    for r in 0..n {
        let j2 = grid.signed_index(r);
        for c in 0..n {
            let j1 = grid.signed_index(c);
            if j1.abs().max(j2.abs()) > cutoff {
                continue;
            }
            let decay = 1.0 / (1.0 + ((j1 * j1 + j2 * j2) as f64)).sqrt();
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let mag = rng.gen_range(0.0..1.0) * decay;
            coeffs[r * n + c] = Complex64::from_polar(mag, phase);
        }
    }
    let field = to_physical(&SpectralField { grid, coeffs });
    let scale = amp / field.linf_norm().max(f64::MIN_POSITIVE);
    field.scaled(Complex64::new(scale, 0.0))
}

/// Real band-limited random field (real part of a band-limited draw).
pub fn rand_real_band_limited(grid: Grid2D, seed: u64, amp: f64, cutoff: i64) -> RealField {
    let f = rand_band_limited(grid, seed, 1.0, cutoff).re_part();
    let scale = amp / f.linf_norm().max(f64::MIN_POSITIVE);
    f.scaled(scale)
}

/// Divergence-free random form built as the perp gradient of a stream field.
pub fn rand_divfree_form(grid: Grid2D, seed: u64, amp: f64, cutoff: i64) -> RealVectorField {
    let stream = rand_real_band_limited(grid, seed, 1.0, cutoff);
    let b1 = derivative_real(&stream, crate::field::Axis::X2);
    let b2 = derivative_real(&stream, crate::field::Axis::X1).scaled(-1.0);
    let form = RealVectorField::new(b1, b2).unwrap();
    let scale = amp / form.linf_norm().max(f64::MIN_POSITIVE);
    form.scaled(scale)
}
