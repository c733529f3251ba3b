//! Conserved quantities, covariant derivatives, space-time norms, and
//! residuals of the original gauge-covariant system.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::field::{Axis, ComplexField, RealField, RealVectorField};
use crate::spectral::{dealias_real, derivative_real, gradient, mul_real_dealiased};

/// Per-step diagnostic series written to the metrics CSV.
#[derive(Debug, Clone, Default)]
pub struct ConservedSeries {
    pub t: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub h1: Vec<f64>,
    pub hs: Vec<f64>,
    pub div_res: Vec<f64>,
    pub curl_res: Vec<f64>,
    pub cert_grad_l1linf: Vec<f64>,
    pub cert_sup: Vec<f64>,
}

impl ConservedSeries {
    #[allow(clippy::too_many_arguments)]
    pub fn push_row(
        &mut self,
        t: f64,
        mass: f64,
        energy: f64,
        h1: f64,
        hs: f64,
        div_res: f64,
        curl_res: f64,
        cert_grad: f64,
        cert_sup: f64,
    ) {
        self.t.push(t);
        self.mass.push(mass);
        self.energy.push(energy);
        self.h1.push(h1);
        self.hs.push(hs);
        self.div_res.push(div_res);
        self.curl_res.push(curl_res);
        self.cert_grad_l1linf.push(cert_grad);
        self.cert_sup.push(cert_sup);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub const CSV_HEADER: &'static str =
        "t,mass,energy,h1,hs,div_res,curl_res,cert_grad_l1linf,cert_sup";

    pub fn csv_row(&self, i: usize) -> String {
        format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            self.t[i],
            self.mass[i],
            self.energy[i],
            self.h1[i],
            self.hs[i],
            self.div_res[i],
            self.curl_res[i],
            self.cert_grad_l1linf[i],
            self.cert_sup[i]
        )
    }

    /// Relative drift of a column against its initial value.
    pub fn relative_drift(column: &[f64]) -> f64 {
        if column.is_empty() {
            return 0.0;
        }
        let first = column[0];
        let scale = first.abs().max(f64::MIN_POSITIVE);
        column
            .iter()
            .map(|v| (v - first).abs())
            .fold(0.0, f64::max)
            / scale
    }
}

/// Total mass `1/2 integral |phi|^2 dx`.
pub fn mass(phi: &ComplexField) -> f64 {
    0.5 * phi.l2_norm().powi(2)
}

/// Covariant gradient `D_i phi = d_i phi + i A_i phi` (products dealiased).
pub fn covariant_grad(
    phi: &ComplexField,
    a: &RealVectorField,
) -> Result<(ComplexField, ComplexField)> {
    phi.grid().check_same(a.grid())?;
    let (d1, d2) = gradient(phi);
    let mut c1 = d1;
    c1.axpy(Complex64::i(), &mul_real_dealiased(phi, &a.v1)?);
    let mut c2 = d2;
    c2.axpy(Complex64::i(), &mul_real_dealiased(phi, &a.v2)?);
    Ok((c1, c2))
}

/// Energy `integral ( |D_x phi|^2 / 2 + kappa |phi|^4 / 4 ) dx`.
pub fn energy(phi: &ComplexField, a: &RealVectorField, kappa: f64) -> Result<f64> {
    let (c1, c2) = covariant_grad(phi, a)?;
    let quad = phi.grid().cell_area();
    let kinetic: f64 = c1
        .samples()
        .iter()
        .zip(c2.samples())
        .map(|(x, y)| x.norm_sqr() + y.norm_sqr())
        .sum::<f64>()
        * quad
        * 0.5;
    let quartic: f64 = phi
        .samples()
        .iter()
        .map(|z| z.norm_sqr().powi(2))
        .sum::<f64>()
        * quad
        * kappa
        / 4.0;
    Ok(kinetic + quartic)
}

/// Spatial `L^r` norm by grid quadrature.
pub fn lr_norm(phi: &ComplexField, r: f64) -> f64 {
    if r.is_infinite() {
        return phi.linf_norm();
    }
    let s: f64 = phi.samples().iter().map(|z| z.norm().powf(r)).sum();
    (s * phi.grid().cell_area()).powf(1.0 / r)
}

/// Validate an admissible space-time pair: `2/q + 2/r = 1`, `r < infinity`,
/// both in `[2, inf]`.
pub fn validate_strichartz_pair(q: f64, r: f64) -> Result<()> {
    let admissible = q >= 2.0
        && r >= 2.0
        && r.is_finite()
        && (2.0 / q + 2.0 / r - 1.0).abs() <= 1e-12;
    if admissible {
        Ok(())
    } else {
        Err(Error::NotStrichartzPair { q, r })
    }
}

/// `L^q_t L^r_x` norm over the stored snapshots (trapezoid in time; sup for
/// `q = infinity`).
pub fn strichartz_accumulate(traj: &Trajectory, q: f64, r: f64) -> Result<f64> {
    validate_strichartz_pair(q, r)?;
    if traj.fields.len() < 2 {
        return Err(Error::TooFewSnapshots(traj.fields.len()));
    }
    let spatial: Vec<f64> = traj.fields.iter().map(|f| lr_norm(f, r)).collect();
    if q.is_infinite() {
        return Ok(spatial.iter().cloned().fold(0.0, f64::max));
    }
    let mut acc = 0.0;
    for k in 0..spatial.len() - 1 {
        let dt = traj.times[k + 1] - traj.times[k];
        acc += 0.5 * (spatial[k].powf(q) + spatial[k + 1].powf(q)) * dt;
    }
    Ok(acc.powf(1.0 / q))
}

/// Sup-norm residuals of the three gauge-covariant equations along a stored
/// trajectory, with `d_t` by centred differences at the snapshot spacing.
///
/// On the periodic box the curl equation holds modulo the mean of `|phi|^2`
/// and the evolution equation for `A_i` holds modulo the spatial mean of the
/// gauge current, so those residuals are evaluated mean-corrected.
pub fn covariant_residual(traj: &Trajectory, kappa: f64) -> Result<(f64, f64, f64)> {
    let m = traj.fields.len();
    if m < 3 {
        return Err(Error::TooFewSnapshots(m));
    }
    let mut res1: f64 = 0.0;
    let mut res2: f64 = 0.0;
    let mut res3: f64 = 0.0;
    for k in 1..m - 1 {
        let dt = traj.times[k + 1] - traj.times[k - 1];
        let phi = &traj.fields[k];
        let gauge = &traj.gauges[k];

        // res1: D_t phi - i D_j D_j phi + i kappa |phi|^2 phi
        let mut dt_phi = traj.fields[k + 1].sub(&traj.fields[k - 1])?;
        dt_phi = dt_phi.scaled(Complex64::new(1.0 / dt, 0.0));
        let mut cov_t = dt_phi;
        cov_t.axpy(Complex64::i(), &mul_real_dealiased(phi, &gauge.a0)?);
        let (c1, c2) = covariant_grad(phi, &gauge.ax)?;
        let (d11, _) = covariant_grad(&c1, &gauge.ax)?;
        let (_, d22) = covariant_grad(&c2, &gauge.ax)?;
        let mut r1 = cov_t;
        r1.axpy(-Complex64::i(), &d11.add(&d22)?);
        let rho = dealias_real(&phi.abs_sqr());
        r1.axpy(Complex64::i() * kappa, &mul_real_dealiased(phi, &rho)?);
        res1 = res1.max(r1.linf_norm());

        // res2: mean-corrected curl constraint.
        res2 = res2.max(gauge.curl_residual(phi));

        // res3: d_t A_i - d_i A0 + eps_ij Im(conj(phi) D_j phi), mean-removed.
        let dt_ax1 = traj.gauges[k + 1]
            .ax
            .v1
            .sub(&traj.gauges[k - 1].ax.v1)?
            .scaled(1.0 / dt);
        let dt_ax2 = traj.gauges[k + 1]
            .ax
            .v2
            .sub(&traj.gauges[k - 1].ax.v2)?
            .scaled(1.0 / dt);
        let da0_1 = derivative_real(&gauge.a0, Axis::X1);
        let da0_2 = derivative_real(&gauge.a0, Axis::X2);
        let current = gauge_current(phi, &gauge.ax)?;
        // eps_1j J_j = J_2 ; eps_2j J_j = -J_1
        let r3_1 = dt_ax1.sub(&da0_1)?.add(&current.v2)?;
        let r3_2 = dt_ax2.sub(&da0_2)?.sub(&current.v1)?;
        for comp in [r3_1, r3_2] {
            let mean = comp.mean();
            let worst = comp
                .samples()
                .iter()
                .map(|v| (v - mean).abs())
                .fold(0.0, f64::max);
            res3 = res3.max(worst);
        }
    }
    Ok((res1, res2, res3))
}

/// Gauge current `J_j = Im(conj(phi) D_j phi)`.
pub fn gauge_current(phi: &ComplexField, a: &RealVectorField) -> Result<RealVectorField> {
    let (c1, c2) = covariant_grad(phi, a)?;
    let grid = *phi.grid();
    let j = |c: &ComplexField| -> RealField {
        let data = phi
            .samples()
            .iter()
            .zip(c.samples())
            .map(|(p, d)| (p.conj() * d).im)
            .collect();
        RealField { grid, data }
    };
    RealVectorField::new(dealias_real(&j(&c1)), dealias_real(&j(&c2)))
}

/// Default calibration constant of the energy-space ceiling, measured on a
/// family of defocusing reference runs with a 2x safety margin.
pub const ENERGY_BOUND_CALIBRATION: f64 = 4.0;

/// Default mass-smallness gate for the focusing branch.
pub const FOCUSING_MASS_THRESHOLD: f64 = 0.1;

/// A-priori ceiling for `||phi(t)||_H1` from the conserved quantities:
/// `C sqrt(mass + energy + mass * energy)`.
///
/// For `kappa <= 0` the bound needs small mass; above the threshold the
/// bound is unavailable and an error is returned.
pub fn energy_space_bound(
    mass0: f64,
    energy0: f64,
    kappa: f64,
    calibration: f64,
    mass_threshold: f64,
) -> Result<f64> {
    if kappa <= 0.0 && mass0 > mass_threshold {
        return Err(Error::BoundUnavailable {
            kappa,
            mass: mass0,
            threshold: mass_threshold,
        });
    }
    Ok(calibration * (mass0 + energy0 + mass0 * energy0).max(0.0).sqrt())
}
