//! Shared generators for the kernel benchmarks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use css2d_core::{to_physical, Axis, ComplexField, Grid2D, RealVectorField, SpectralField};

/// Random field with spectrum in the dealiased band.
pub fn band_limited_field(grid: Grid2D, seed: u64) -> ComplexField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n();
    let cutoff = grid.dealias_cutoff();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.points()];
    for r in 0..n {
        let j2 = grid.signed_index(r);
        for c in 0..n {
            let j1 = grid.signed_index(c);
            if j1.abs().max(j2.abs()) > cutoff {
                continue;
            }
            let decay = 1.0 / (1.0 + (j1 * j1 + j2 * j2) as f64).sqrt();
            coeffs[r * n + c] =
                Complex64::from_polar(
                    rng.gen_range(0.0..decay),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                );
        }
    }
    to_physical(&SpectralField::from_parts(grid, coeffs))
}

/// Divergence-free low-band form for the paraproduct benchmarks.
pub fn divfree_form(grid: Grid2D, seed: u64) -> RealVectorField {
    let stream = band_limited_field(grid, seed).re_part();
    RealVectorField::new(
        css2d_core::derivative(&stream.as_complex(), Axis::X2).re_part(),
        css2d_core::derivative(&stream.as_complex(), Axis::X1)
            .re_part()
            .scaled(-1.0),
    )
    .unwrap()
}
