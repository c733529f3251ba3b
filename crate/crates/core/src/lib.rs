//! Pseudo-spectral solver for the Chern-Simons-Schrodinger system in the
//! Coulomb gauge on a 2D periodic box.
//!
//! The gauge potentials are slaved to the matter field through spectral
//! Poisson inversion, the derivative nonlinearity is split into principal
//! and perturbative paraproduct parts with exact `2^(+-5)` band cutoffs,
//! and the outer Picard iteration freezes the principal form at the
//! previous iterate. Diagnostics track the conservation laws, constraint
//! residuals, and admissible-form certificates the scheme relies on.

pub mod data;
pub mod diagnostics;
pub mod dyadic;
pub mod error;
pub mod evolution;
pub mod field;
pub mod gauge;
pub mod grid;
pub mod io;
pub mod iteration;
pub mod paradiff;
pub mod spectral;

#[cfg(test)]
pub(crate) mod testutil;

pub use data::{make_initial_data, DataKind};
pub use diagnostics::{
    covariant_grad, covariant_residual, energy, energy_space_bound, gauge_current, lr_norm, mass,
    strichartz_accumulate, validate_strichartz_pair, ConservedSeries,
};
pub use dyadic::{
    build_compactness_weight, hs_norm, phi1, phi_band, sobolev_norm, DyadicLadder, SobolevWeight,
};
pub use error::{Error, Result};
pub use evolution::{
    css_rhs, css_step, evolve, evolve_principal, linear_propagate, principal_step, RhsMode,
    RunOptions, Scheme, StepperConfig, Trajectory,
};
pub use field::{Axis, ComplexField, RealField, RealVectorField};
pub use gauge::{
    certify, compute_a0, compute_ax, grad_sup, n20, n2x, n4t, n4x, rot, AdmissibleFormCert,
    AnalyticForm, CertAccumulator, GaugePotential, SampledForm, TimeForm,
};
pub use grid::Grid2D;
pub use iteration::{
    existence_time, norm_growth_probe, picard_run, weak_lipschitz_probe, PicardConfig,
    PicardReport,
};
pub use paradiff::ParaproductPlan;
pub use spectral::{
    dealias, derivative, grad_inv_laplacian, inv_laplacian, mul_dealiased, resample, riesz,
    to_physical, to_spectral, SpectralField,
};

/// Size constant of the recovered form: `||N2x[u1, u2]||_inf <= (K1/2)
/// ||u1||_H1 ||u2||_H1`. Measured max ratio on the randomized H1 family in
/// the gauge tests is 0.142; frozen here with a 3.5x margin.
pub const DEFAULT_K1: f64 = 0.5;
