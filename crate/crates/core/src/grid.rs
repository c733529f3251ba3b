use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Square periodic box `[0, L)^2` sampled on an `n x n` grid.
///
/// Frequencies live on the dual lattice `xi = k0 * (j1, j2)` with
/// `k0 = 2*pi/L` and integer indices `j in [-n/2, n/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    n: usize,
    length: f64,
}

impl Grid2D {
    /// `n` must be a power of two with `n >= 8`; `length > 0`.
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be a power of two with n >= 8"
            )));
        }
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::InvalidGrid(format!("box length {length} must be positive")));
        }
        Ok(Self { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len_side(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Fundamental wavenumber `2*pi/L`.
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn points(&self) -> usize {
        self.n * self.n
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dx()
    }

    /// Signed frequency index for FFT bin `i`: `0,1,..,n/2-1,-n/2,..,-1`.
    pub fn signed_index(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Wavenumber component for FFT bin `i`.
    pub fn xi(&self, i: usize) -> f64 {
        self.k0() * self.signed_index(i) as f64
    }

    /// Corner radius of the frequency grid, `sqrt(2) * k0 * n/2`.
    pub fn nyquist_radius(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.k0() * self.n as f64 / 2.0
    }

    /// Smallest dyadic `>= nyquist_radius`; top band of the ladder.
    pub fn lambda_max(&self) -> u32 {
        let target = self.nyquist_radius();
        let mut lambda = 1u32;
        while (lambda as f64) < target {
            lambda *= 2;
        }
        lambda
    }

    /// Physical coordinate of sample index along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    /// Largest retained index under the 2/3 dealiasing rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    pub(crate) fn check_same(&self, other: &Grid2D) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: format!("(n = {}, L = {})", self.n, self.length),
                right: format!("(n = {}, L = {})", other.n, other.length),
            })
        }
    }
}
