//! Gauge-field recovery in the Coulomb gauge and the bilinear/quadrilinear
//! source maps built from `grad/(-Laplacian)` compositions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Axis, ComplexField, RealField, RealVectorField};
use crate::grid::Grid2D;
use crate::spectral::{
    dealias, dealias_real, derivative_real, grad_inv_laplacian, gradient, inv_laplacian,
};

/// Slaved gauge pair `(A0, A_x)` with the mean charge recorded at
/// construction (the curl constraint on a periodic box only holds modulo
/// the mean of `|phi|^2`).
#[derive(Debug, Clone)]
pub struct GaugePotential {
    pub ax: RealVectorField,
    pub a0: RealField,
    pub mean_charge: f64,
}

impl GaugePotential {
    /// Recover both potentials from the matter field.
    pub fn slave(phi: &ComplexField) -> Result<Self> {
        let ax = compute_ax(phi)?;
        let a0 = compute_a0(phi, &ax)?;
        let mean_charge = phi.abs_sqr().mean();
        Ok(Self {
            ax,
            a0,
            mean_charge,
        })
    }

    /// `||div A_x||_inf` (spectral construction keeps this at rounding).
    pub fn div_residual(&self) -> f64 {
        div_linf(&self.ax)
    }

    /// `||d1 A2 - d2 A1 + (|phi|^2 - mean)/2||_inf`, the torus curl defect.
    pub fn curl_residual(&self, phi: &ComplexField) -> f64 {
        let rho = dealias_real(&phi.abs_sqr());
        let curl = rot(&self.ax);
        let mean = rho.mean();
        curl.samples()
            .iter()
            .zip(rho.samples())
            .map(|(c, r)| (c + 0.5 * (r - mean)).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn div_linf(v: &RealVectorField) -> f64 {
    let d1 = derivative_real(&v.v1, Axis::X1);
    let d2 = derivative_real(&v.v2, Axis::X2);
    d1.samples()
        .iter()
        .zip(d2.samples())
        .map(|(a, b)| (a + b).abs())
        .fold(0.0, f64::max)
}

/// Scalar curl `rot v = d1 v2 - d2 v1`.
pub fn rot(v: &RealVectorField) -> RealField {
    let d1 = derivative_real(&v.v2, Axis::X1);
    let d2 = derivative_real(&v.v1, Axis::X2);
    d1.sub(&d2).expect("components share a grid")
}

/// `A_i = -1/2 eps_ij d_j/(-Lap) (|phi|^2)`; divergence-free by construction.
pub fn compute_ax(phi: &ComplexField) -> Result<RealVectorField> {
    phi.check_finite("compute_ax input")?;
    let rho = dealias(&phi.abs_sqr().as_complex());
    // eps_12 = 1, eps_21 = -1.
    let a1 = grad_inv_laplacian(&rho, Axis::X2).scaled(Complex64::new(-0.5, 0.0));
    let a2 = grad_inv_laplacian(&rho, Axis::X1).scaled(Complex64::new(0.5, 0.0));
    debug_assert!(a1.max_imag() <= 1e-12 * a1.linf_norm().max(1e-300));
    RealVectorField::new(a1.re_part(), a2.re_part())
}

/// `A0 = (-Lap)^(-1) [ -Im(grad conj(phi) ^ grad phi) - rot(A_x |phi|^2) ]`
/// with zero mean. Both source pieces are exact derivatives; their means are
/// verified before inversion.
pub fn compute_a0(phi: &ComplexField, ax: &RealVectorField) -> Result<RealField> {
    phi.grid().check_same(ax.grid())?;
    let (d1, d2) = gradient(phi);
    // Im(grad conj(phi) ^ grad phi) = Im(d1 conj(phi) * d2 phi - d2 conj(phi) * d1 phi)
    let grid = *phi.grid();
    let wedge_im: Vec<f64> = d1
        .samples()
        .iter()
        .zip(d2.samples())
        .map(|(g1, g2)| (g1.conj() * g2 - g2.conj() * g1).im)
        .collect();
    let wedge = dealias_real(&RealField {
        grid,
        data: wedge_im,
    });

    let rho = dealias_real(&phi.abs_sqr());
    let a_rho = RealVectorField::new(
        dealias_real(&ax.v1.mul_raw(&rho)?),
        dealias_real(&ax.v2.mul_raw(&rho)?),
    )?;
    let rot_term = rot(&a_rho);

    let source = wedge.scaled(-1.0).sub(&rot_term)?;
    let scale = source.linf_norm().max(f64::MIN_POSITIVE);
    let mean = source.mean().abs();
    // Relative gate with a rounding floor: the wedge assembles from
    // gradient products that may cancel to machine noise, in which case a
    // tiny absolute mean is not an inconsistency.
    let floor = 1e-13 * (d1.linf_norm() * d2.linf_norm() + rot_term.linf_norm());
    if mean > 1e-8 * scale && mean > floor {
        return Err(Error::MeanResidual {
            mean,
            tol: (1e-8 * scale).max(floor),
        });
    }
    let (a0, _) = inv_laplacian(&source.as_complex());
    Ok(a0.re_part())
}

/// `N2_i[u1, u2] = eps_ij (d_j/(-Lap))(u1 u2)` as a complex pair
/// (real-valued when `u1 u2` is real). Symmetric in its arguments.
pub fn n2x(u1: &ComplexField, u2: &ComplexField) -> Result<(ComplexField, ComplexField)> {
    let prod = crate::spectral::mul_dealiased(u1, u2)?;
    let c1 = grad_inv_laplacian(&prod, Axis::X2);
    let c2 = grad_inv_laplacian(&prod, Axis::X1).scaled(Complex64::new(-1.0, 0.0));
    Ok((c1, c2))
}

/// `N2_0[u1, u2] = (-Lap)^(-1)(grad u1 ^ grad u2)`; antisymmetric.
pub fn n20(u1: &ComplexField, u2: &ComplexField) -> Result<ComplexField> {
    u1.grid().check_same(u2.grid())?;
    let (a1, a2) = gradient(u1);
    let (b1, b2) = gradient(u2);
    let grid = *u1.grid();
    let wedge: Vec<Complex64> = a1
        .samples()
        .iter()
        .zip(a2.samples())
        .zip(b1.samples().iter().zip(b2.samples()))
        .map(|((x1, x2), (y1, y2))| x1 * y2 - x2 * y1)
        .collect();
    let wedge = dealias(&ComplexField::from_data(grid, wedge)?);
    Ok(inv_laplacian(&wedge).0)
}

/// `N4_t[u1..u4] = (rot/(-Lap))(N2_x[u1, u2] u3 u4)`.
pub fn n4t(
    u1: &ComplexField,
    u2: &ComplexField,
    u3: &ComplexField,
    u4: &ComplexField,
) -> Result<ComplexField> {
    let (v1, v2) = n2x(u1, u2)?;
    let w = crate::spectral::mul_dealiased(u3, u4)?;
    let f1 = crate::spectral::mul_dealiased(&v1, &w)?;
    let f2 = crate::spectral::mul_dealiased(&v2, &w)?;
    // rot/( -Lap ): d1/(-Lap) f2 - d2/(-Lap) f1
    let out = grad_inv_laplacian(&f2, Axis::X1).sub(&grad_inv_laplacian(&f1, Axis::X2))?;
    Ok(out)
}

/// `N4_x[u1..u4] = -i N2_x[u1, u2] . N2_x[u3, u4]`.
pub fn n4x(
    u1: &ComplexField,
    u2: &ComplexField,
    u3: &ComplexField,
    u4: &ComplexField,
) -> Result<ComplexField> {
    let (a1, a2) = n2x(u1, u2)?;
    let (b1, b2) = n2x(u3, u4)?;
    let dot = dealias(&a1.mul_raw(&b1)?.add(&a2.mul_raw(&b2)?)?);
    Ok(dot.scaled(Complex64::new(0.0, -1.0)))
}

/// Running certificate for the admissible-form hypotheses: sup-in-time
/// `L^inf` size, time-integrated gradient sup norm, and divergence residual.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdmissibleFormCert {
    pub sup_norm: f64,
    pub grad_l1linf: f64,
    pub div_residual: f64,
}

impl AdmissibleFormCert {
    /// Gradient-integrability hypothesis: `int ||grad B||_inf dt <= 1`.
    pub fn hypothesis_ii_ok(&self) -> bool {
        self.grad_l1linf <= 1.0
    }

    /// Size hypothesis `||B||_inf <= K1 M^2`.
    pub fn size_ok(&self, k1: f64, m: f64) -> bool {
        self.sup_norm <= k1 * m * m
    }
}

/// Accumulates a certificate over a time series by trapezoidal quadrature.
#[derive(Debug, Clone, Default)]
pub struct CertAccumulator {
    cert: AdmissibleFormCert,
    last: Option<(f64, f64)>,
}

impl CertAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, t: f64, form: &RealVectorField) {
        let grad_linf = grad_sup(form);
        self.cert.sup_norm = self.cert.sup_norm.max(form.linf_norm());
        self.cert.div_residual = self.cert.div_residual.max(div_linf(form));
        if let Some((t_prev, g_prev)) = self.last {
            self.cert.grad_l1linf += 0.5 * (g_prev + grad_linf) * (t - t_prev);
        }
        self.last = Some((t, grad_linf));
    }

    pub fn cert(&self) -> &AdmissibleFormCert {
        &self.cert
    }

    pub fn into_cert(self) -> AdmissibleFormCert {
        self.cert
    }
}

/// `||grad B(t)||_inf`: max over the grid of the Frobenius magnitude of the
/// Jacobian.
pub fn grad_sup(form: &RealVectorField) -> f64 {
    let d11 = derivative_real(&form.v1, Axis::X1);
    let d12 = derivative_real(&form.v1, Axis::X2);
    let d21 = derivative_real(&form.v2, Axis::X1);
    let d22 = derivative_real(&form.v2, Axis::X2);
    let mut worst: f64 = 0.0;
    for i in 0..d11.samples().len() {
        let s = d11.samples()[i].powi(2)
            + d12.samples()[i].powi(2)
            + d21.samples()[i].powi(2)
            + d22.samples()[i].powi(2);
        worst = worst.max(s.sqrt());
    }
    worst
}

/// Certificate of a sampled form series with uniform spacing.
pub fn certify(series: &[(f64, RealVectorField)]) -> AdmissibleFormCert {
    let mut acc = CertAccumulator::new();
    for (t, form) in series {
        acc.observe(*t, form);
    }
    acc.into_cert()
}

/// Time-dependent spatial 1-form used by the principal evolution.
pub trait TimeForm {
    fn at(&self, t: f64) -> RealVectorField;
    fn grid(&self) -> Grid2D;
}

/// Form stored at uniformly spaced sample times, linearly interpolated.
#[derive(Debug, Clone)]
pub struct SampledForm {
    times: Vec<f64>,
    forms: Vec<RealVectorField>,
}

impl SampledForm {
    pub fn new(times: Vec<f64>, forms: Vec<RealVectorField>) -> Result<Self> {
        if times.len() != forms.len() || times.is_empty() {
            return Err(Error::InvalidConfig(
                "sampled form needs matching, nonempty time and form lists".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(
                "sampled form times must be strictly increasing".into(),
            ));
        }
        Ok(Self { times, forms })
    }

    pub fn zero(grid: Grid2D, t_end: f64) -> Self {
        Self {
            times: vec![0.0, t_end.max(f64::MIN_POSITIVE)],
            forms: vec![RealVectorField::zeros(grid), RealVectorField::zeros(grid)],
        }
    }
}

impl TimeForm for SampledForm {
    fn at(&self, t: f64) -> RealVectorField {
        let times = &self.times;
        if t <= times[0] {
            return self.forms[0].clone();
        }
        if t >= *times.last().unwrap() {
            return self.forms.last().unwrap().clone();
        }
        let k = times.partition_point(|&tk| tk <= t) - 1;
        let (t0, t1) = (times[k], times[k + 1]);
        let w = (t - t0) / (t1 - t0);
        self.forms[k]
            .scaled(1.0 - w)
            .add(&self.forms[k + 1].scaled(w))
            .expect("sampled forms share a grid")
    }

    fn grid(&self) -> Grid2D {
        *self.forms[0].grid()
    }
}

/// Form given by a closure of time.
pub struct AnalyticForm<F: Fn(f64) -> RealVectorField> {
    grid: Grid2D,
    f: F,
}

impl<F: Fn(f64) -> RealVectorField> AnalyticForm<F> {
    pub fn new(grid: Grid2D, f: F) -> Self {
        Self { grid, f }
    }
}

impl<F: Fn(f64) -> RealVectorField> TimeForm for AnalyticForm<F> {
    fn at(&self, t: f64) -> RealVectorField {
        (self.f)(t)
    }

    fn grid(&self) -> Grid2D {
        self.grid
    }
}
