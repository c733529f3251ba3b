//! Inhomogeneous Littlewood-Paley ladder, generalised Sobolev weights, and
//! the compactness-weight construction.

use std::collections::BTreeMap;


use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid2D;
use crate::spectral::{to_physical, to_spectral, SpectralField};

fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth radial cutoff profile: 1 on `|xi| <= 1`, 0 on `|xi| >= 2`, and the
/// standard exp-based partition bump in between. Frozen for reproducibility.
pub fn phi1(radius: f64) -> f64 {
    let rho = radius.abs();
    if rho <= 1.0 {
        1.0
    } else if rho >= 2.0 {
        0.0
    } else {
        let t = rho - 1.0;
        bump(1.0 - t) / (bump(t) + bump(1.0 - t))
    }
}

/// Band multiplier `phi_lambda(xi)`; `lambda = 1` is the full low-frequency
/// projection `phi1`.
pub fn phi_band(lambda: u32, radius: f64) -> f64 {
    if lambda == 1 {
        phi1(radius)
    } else {
        let l = lambda as f64;
        phi1(radius / l) - phi1(2.0 * radius / l)
    }
}

/// Dyadic ladder over a grid, with cached band and cumulative multipliers.
#[derive(Debug, Clone)]
pub struct DyadicLadder {
    grid: Grid2D,
    bands: Vec<u32>,
    band_mult: Vec<Vec<f64>>,
    cum_mult: Vec<Vec<f64>>,
}

impl DyadicLadder {
    pub fn new(grid: Grid2D) -> Self {
        let lambda_max = grid.lambda_max();
        let mut bands = Vec::new();
        let mut lambda = 1u32;
        while lambda <= lambda_max {
            bands.push(lambda);
            lambda *= 2;
        }
        let n = grid.n();
        let mut radii = Vec::with_capacity(grid.points());
        for r in 0..n {
            let xi2 = grid.xi(r);
            for c in 0..n {
                let xi1 = grid.xi(c);
                radii.push((xi1 * xi1 + xi2 * xi2).sqrt());
            }
        }
        let band_mult: Vec<Vec<f64>> = bands
            .iter()
            .map(|&l| radii.iter().map(|&rho| phi_band(l, rho)).collect())
            .collect();
        // Cumulative multipliers as running sums; telescoping makes these
        // equal phi1(xi/lambda) exactly.
        let mut cum_mult = Vec::with_capacity(bands.len());
        let mut acc = vec![0.0f64; grid.points()];
        for bm in &band_mult {
            for (a, b) in acc.iter_mut().zip(bm) {
                *a += b;
            }
            cum_mult.push(acc.clone());
        }
        Self {
            grid,
            bands,
            band_mult,
            cum_mult,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn bands(&self) -> &[u32] {
        &self.bands
    }

    pub fn lambda_max(&self) -> u32 {
        *self.bands.last().unwrap()
    }

    fn band_index(&self, lambda: u32) -> Result<usize> {
        self.bands
            .binary_search(&lambda)
            .map_err(|_| Error::UnknownBand(lambda))
    }

    pub fn band_multiplier(&self, lambda: u32) -> Result<&[f64]> {
        Ok(&self.band_mult[self.band_index(lambda)?])
    }

    /// Cached cumulative multiplier array for `P_{<=lambda}`.
    pub fn cumulative_multiplier(&self, lambda: u32) -> Result<&[f64]> {
        Ok(&self.cum_mult[self.band_index(lambda)?])
    }

    fn apply_array(&self, u: &ComplexField, m: &[f64]) -> ComplexField {
        let u_hat = to_spectral(u);
        let coeffs = u_hat
            .coeffs()
            .iter()
            .zip(m)
            .map(|(z, w)| z * w)
            .collect();
        to_physical(&SpectralField {
            grid: self.grid,
            coeffs,
        })
    }

    pub(crate) fn apply_array_spectral(&self, u_hat: &SpectralField, m: &[f64]) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: u_hat
                .coeffs()
                .iter()
                .zip(m)
                .map(|(z, w)| z * w)
                .collect(),
        }
    }

    /// `P_lambda u`.
    pub fn band_project(&self, u: &ComplexField, lambda: u32) -> Result<ComplexField> {
        self.grid.check_same(u.grid())?;
        Ok(self.apply_array(u, self.band_multiplier(lambda)?))
    }

    /// `P_{<=lambda} u` for any dyadic `lambda >= 1` (identity above the
    /// ladder top, direct `phi1(xi/lambda)` multiplier in general).
    pub fn project_leq(&self, u: &ComplexField, lambda: u32) -> Result<ComplexField> {
        self.grid.check_same(u.grid())?;
        let m = self.leq_multiplier(lambda);
        Ok(self.apply_array(u, &m))
    }

    /// `P_{<lambda} = P_{<=lambda/2}`; `P_{<1}` is the zero operator.
    pub fn project_lt(&self, u: &ComplexField, lambda: u32) -> Result<ComplexField> {
        self.grid.check_same(u.grid())?;
        if lambda <= 1 {
            return Ok(ComplexField::zeros(self.grid));
        }
        self.project_leq(u, lambda / 2)
    }

    /// Multiplier array of `P_{<=lambda}` computed directly from the profile.
    pub fn leq_multiplier(&self, lambda: u32) -> Vec<f64> {
        let n = self.grid.n();
        let l = lambda as f64;
        let mut m = Vec::with_capacity(self.grid.points());
        for r in 0..n {
            let xi2 = self.grid.xi(r);
            for c in 0..n {
                let xi1 = self.grid.xi(c);
                let rho = (xi1 * xi1 + xi2 * xi2).sqrt();
                m.push(phi1(rho / l));
            }
        }
        m
    }

    /// Per-band `L^2` norms `||P_lambda u||`, sharing one transform.
    pub fn band_l2_norms(&self, u: &ComplexField) -> Result<Vec<f64>> {
        self.grid.check_same(u.grid())?;
        let u_hat = to_spectral(u);
        let w = (self.grid.k0() / (2.0 * std::f64::consts::PI)).powi(2);
        Ok(self
            .band_mult
            .iter()
            .map(|m| {
                let s: f64 = u_hat
                    .coeffs()
                    .iter()
                    .zip(m)
                    .map(|(z, phi)| phi * phi * z.norm_sqr())
                    .sum();
                (s * w).sqrt()
            })
            .collect())
    }
}

/// Dyadic weight `m: bands -> (0, inf)` with `m(1) = 1`, defining the
/// generalised Sobolev norm `||u||^2 = sum m(lambda)^2 ||P_lambda u||^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevWeight {
    values: BTreeMap<u32, f64>,
}

impl SobolevWeight {
    pub fn from_table(values: BTreeMap<u32, f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig("empty weight table".into()));
        }
        match values.get(&1) {
            Some(v) if (*v - 1.0).abs() <= 1e-12 => {}
            _ => {
                return Err(Error::InvalidConfig(
                    "Sobolev weight must satisfy m(1) = 1".into(),
                ))
            }
        }
        for (l, v) in &values {
            if !l.is_power_of_two() {
                return Err(Error::InvalidConfig(format!("band {l} is not dyadic")));
            }
            if !v.is_finite() || *v <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "weight m({l}) = {v} must be positive and finite"
                )));
            }
        }
        Ok(Self { values })
    }

    /// Power weight `m(lambda) = lambda^s` over the ladder bands.
    pub fn power(ladder: &DyadicLadder, s: f64) -> Self {
        let values = ladder
            .bands()
            .iter()
            .map(|&l| (l, (l as f64).powf(s)))
            .collect();
        Self { values }
    }

    pub fn value(&self, lambda: u32) -> Result<f64> {
        self.values
            .get(&lambda)
            .copied()
            .ok_or(Error::MissingBand(lambda))
    }

    pub fn bands(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.values.iter().map(|(l, v)| (*l, *v))
    }

    /// Characteristics `([m]_star, [m]^star, [m])` from the stored ratios.
    pub fn characteristics(&self) -> Result<(f64, f64, f64)> {
        if self.values.len() < 2 {
            return Err(Error::InvalidConfig(
                "need at least two bands for weight characteristics".into(),
            ));
        }
        let entries: Vec<(u32, f64)> = self.values.iter().map(|(l, v)| (*l, *v)).collect();
        let mut m_star = f64::INFINITY;
        let mut m_upper = f64::NEG_INFINITY;
        for pair in entries.windows(2) {
            let (l0, v0) = pair[0];
            let (l1, v1) = pair[1];
            debug_assert_eq!(l1, 2 * l0);
            let ratio = (v1 / v0).log2();
            m_star = m_star.min(ratio);
            m_upper = m_upper.max(ratio);
        }
        let m_char = (-m_star).max(m_upper).max(0.0);
        Ok((m_star, m_upper, m_char))
    }

    /// Two-column text serialisation `lambda m(lambda)`.
    pub fn to_table_string(&self) -> String {
        let mut s = String::new();
        for (l, v) in &self.values {
            s.push_str(&format!("{l} {v:.17e}\n"));
        }
        s
    }

    pub fn from_table_str(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let l: u32 = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::MalformedTable(format!("line {}", ln + 1)))?;
            let v: f64 = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::MalformedTable(format!("line {}", ln + 1)))?;
            values.insert(l, v);
        }
        Self::from_table(values)
    }
}

/// `H^m` norm `(sum_lambda m(lambda)^2 ||P_lambda u||^2)^(1/2)`.
pub fn sobolev_norm(ladder: &DyadicLadder, u: &ComplexField, weight: &SobolevWeight) -> Result<f64> {
    let norms = ladder.band_l2_norms(u)?;
    let mut acc = 0.0;
    for (&lambda, norm) in ladder.bands().iter().zip(&norms) {
        let w = weight.value(lambda)?;
        acc += w * w * norm * norm;
    }
    Ok(acc.sqrt())
}

/// `H^s` norm with the power weight `lambda^s`.
pub fn hs_norm(ladder: &DyadicLadder, u: &ComplexField, s: f64) -> Result<f64> {
    sobolev_norm(ladder, u, &SobolevWeight::power(ladder, s))
}

/// Compactness weight for a family: normalises the family to unit sup `H^s`
/// norm, finds the dyadic tail thresholds `nu_m` where the sup tail norm
/// drops below `2^-m`, and returns the staircase `m(lambda) = 2^(m/8) *
/// lambda^s` on `[nu_m, nu_(m+1))`. The result satisfies the band-ratio
/// bounds `[2^s, 2^(s+1/8)]` and `||w||_{H^m} <= 2 sup ||w||_{H^s}`.
pub fn build_compactness_weight(
    ladder: &DyadicLadder,
    family: &[ComplexField],
    s: f64,
) -> Result<SobolevWeight> {
    if family.is_empty() {
        return Err(Error::ZeroFamily);
    }
    for f in family {
        f.check_finite("compactness-weight family")?;
    }
    let mut band_norms = Vec::with_capacity(family.len());
    let mut sup_hs: f64 = 0.0;
    for f in family {
        let norms = ladder.band_l2_norms(f)?;
        let hs: f64 = ladder
            .bands()
            .iter()
            .zip(&norms)
            .map(|(&l, n)| ((l as f64).powf(s) * n).powi(2))
            .sum::<f64>()
            .sqrt();
        sup_hs = sup_hs.max(hs);
        band_norms.push(norms);
    }
    if sup_hs <= 0.0 {
        return Err(Error::ZeroFamily);
    }

    // Sup-over-family tail norm starting at each ladder band, after
    // normalising to sup H^s = 1.
    let bands = ladder.bands();
    let tail_at = |start: usize| -> f64 {
        band_norms
            .iter()
            .map(|norms| {
                bands[start..]
                    .iter()
                    .zip(&norms[start..])
                    .map(|(&l, n)| ((l as f64).powf(s) * n / sup_hs).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    };

    // nu_0 = 1; nu_m = smallest dyadic strictly above nu_(m-1) with tail
    // <= 2^-m. Band-limited grid data has vanishing tails, so past the
    // spectrum edge the thresholds advance one octave per level and the
    // weight keeps growing superlinearly within the grid range.
    let mut thresholds = vec![0usize];
    loop {
        let m = thresholds.len() as i32;
        let mut idx = thresholds.last().unwrap() + 1;
        while idx < bands.len() && tail_at(idx) > 0.5f64.powi(m) {
            idx += 1;
        }
        if idx >= bands.len() {
            break;
        }
        thresholds.push(idx);
    }
    let mut values = BTreeMap::new();
    for (idx, &lambda) in bands.iter().enumerate() {
        let level = (thresholds.iter().filter(|&&t| t <= idx).count() - 1) as f64;
        values.insert(lambda, 2f64.powf(level / 8.0) * (lambda as f64).powf(s));
    }
    SobolevWeight::from_table(values)
}
