use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid2D;

/// Complex scalar field sampled in physical space, row-major `n x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub(crate) grid: Grid2D,
    pub(crate) data: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            data: vec![Complex64::new(0.0, 0.0); grid.points()],
        }
    }

    /// Sample `f(x1, x2)` at the grid points.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let n = grid.n();
        let mut data = Vec::with_capacity(grid.points());
        for r in 0..n {
            let x2 = grid.coord(r);
            for c in 0..n {
                let x1 = grid.coord(c);
                data.push(f(x1, x2));
            }
        }
        Self { grid, data }
    }

    pub fn from_data(grid: Grid2D, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.points() {
            return Err(Error::InvalidGrid(format!(
                "sample count {} does not match {}^2",
                data.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.data
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn check_finite(&self, context: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(context.to_string()))
        }
    }

    /// `L^2` norm by the grid quadrature `(sum |u|^2 dx^2)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.data.iter().map(|z| z.norm_sqr()).sum();
        (s * self.grid.cell_area()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Mean value over the box.
    pub fn mean(&self) -> Complex64 {
        let s: Complex64 = self.data.iter().sum();
        s / self.data.len() as f64
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// `self += c * other`; panics on grid mismatch (internal stepping use).
    pub fn axpy(&mut self, c: Complex64, other: &ComplexField) {
        assert_eq!(self.grid, other.grid, "axpy on mismatched grids");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn add(&self, other: &ComplexField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), other);
        Ok(out)
    }

    pub fn sub(&self, other: &ComplexField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other);
        Ok(out)
    }

    /// Raw pointwise product, no dealiasing.
    pub fn mul_raw(&self, other: &ComplexField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Raw pointwise product with a real field, no dealiasing.
    pub fn mul_real_raw(&self, other: &RealField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// `|u|^2` as a real field (pointwise; callers dealias as needed).
    pub fn abs_sqr(&self) -> RealField {
        RealField {
            grid: self.grid,
            data: self.data.iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    /// Real part, dropping the imaginary residue.
    pub fn re_part(&self) -> RealField {
        RealField {
            grid: self.grid,
            data: self.data.iter().map(|z| z.re).collect(),
        }
    }
}

/// Real scalar field sampled in physical space.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    pub(crate) grid: Grid2D,
    pub(crate) data: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            data: vec![0.0; grid.points()],
        }
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut data = Vec::with_capacity(grid.points());
        for r in 0..n {
            let x2 = grid.coord(r);
            for c in 0..n {
                data.push(f(grid.coord(c), x2));
            }
        }
        Self { grid, data }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.data
    }

    pub fn linf_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.data.iter().map(|v| v * v).sum();
        (s * self.grid.cell_area()).sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &RealField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &RealField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn mul_raw(&self, other: &RealField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn as_complex(&self) -> ComplexField {
        ComplexField {
            grid: self.grid,
            data: self.data.iter().map(|v| Complex64::new(*v, 0.0)).collect(),
        }
    }
}

/// Real 2-vector field `(v1, v2)`; houses gauge potentials and test forms.
#[derive(Debug, Clone, PartialEq)]
pub struct RealVectorField {
    pub v1: RealField,
    pub v2: RealField,
}

impl RealVectorField {
    pub fn new(v1: RealField, v2: RealField) -> Result<Self> {
        v1.grid.check_same(&v2.grid)?;
        Ok(Self { v1, v2 })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            v1: RealField::zeros(grid),
            v2: RealField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        self.v1.grid()
    }

    pub fn component(&self, axis: Axis) -> &RealField {
        match axis {
            Axis::X1 => &self.v1,
            Axis::X2 => &self.v2,
        }
    }

    pub fn linf_norm(&self) -> f64 {
        // Pointwise Euclidean magnitude, maximised over the grid.
        self.v1
            .data
            .iter()
            .zip(&self.v2.data)
            .map(|(a, b)| (a * a + b * b).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.v1.is_finite() && self.v2.is_finite()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            v1: self.v1.scaled(c),
            v2: self.v2.scaled(c),
        }
    }

    pub fn add(&self, other: &RealVectorField) -> Result<Self> {
        Ok(Self {
            v1: self.v1.add(&other.v1)?,
            v2: self.v2.add(&other.v2)?,
        })
    }

    pub fn sub(&self, other: &RealVectorField) -> Result<Self> {
        Ok(Self {
            v1: self.v1.sub(&other.v1)?,
            v2: self.v2.sub(&other.v2)?,
        })
    }

    /// `|v|^2` pointwise.
    pub fn magnitude_sqr(&self) -> RealField {
        RealField {
            grid: *self.grid(),
            data: self
                .v1
                .data
                .iter()
                .zip(&self.v2.data)
                .map(|(a, b)| a * a + b * b)
                .collect(),
        }
    }
}

/// Spatial axis label; `X1` is the fastest-varying (column) direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X1, Axis::X2];
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quadrature_of_constant() {
        let g = Grid2D::new(16, 2.0 * PI).unwrap();
        let u = ComplexField::from_fn(g, |_, _| Complex64::new(3.0, 0.0));
        let expected = 3.0 * g.len_side();
        assert!((u.l2_norm() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let a = ComplexField::zeros(Grid2D::new(16, 1.0).unwrap());
        let b = ComplexField::zeros(Grid2D::new(32, 1.0).unwrap());
        assert!(a.add(&b).is_err());
        assert!(a.mul_raw(&b).is_err());
    }
}
