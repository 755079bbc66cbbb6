//! Uniform cell partition of a truncated half-line and cell-averaged
//! density fields.

use crate::boundary_motion::ScalingMap;
use crate::error::{CoreError, Result};

/// Uniform grid of `n >= 16` cells on `[0, length]`; cell `i` is
/// `[i h, (i+1) h]` with center `(i + 1/2) h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
    h: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 16 {
            return Err(CoreError::invalid("n", format!("need n >= 16, got {n}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(CoreError::invalid(
                "length",
                format!("must be > 0, got {length}"),
            ));
        }
        Ok(Self {
            n,
            length,
            h: length / n as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Cell width.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    pub fn face(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.center(i))
    }
}

/// Cell-averaged nonnegative density with bookkept total mass
/// `h * sum(w_i)`.
#[derive(Debug, Clone)]
pub struct DensityField {
    grid: Grid,
    values: Vec<f64>,
    mass: f64,
}

impl DensityField {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(CoreError::GridMismatch(format!(
                "{} values on a {}-cell grid",
                values.len(),
                grid.n()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(CoreError::NegativeDensity(format!(
                "cell average {bad} is negative or non-finite"
            )));
        }
        let mass = grid.h() * values.iter().sum::<f64>();
        if !(mass > 0.0) {
            return Err(CoreError::invalid(
                "values",
                "total mass must be positive",
            ));
        }
        Ok(Self { grid, values, mass })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Bookkept mass (set at construction / maintained by the solver).
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `h * sum(w_i)` recomputed from the cell averages.
    pub fn recompute_mass(&self) -> f64 {
        self.grid.h() * self.values.iter().sum::<f64>()
    }

    /// Mass in the trailing `fraction` of the domain (used to monitor how
    /// much of the density presses against the truncation boundary).
    pub fn tail_mass(&self, fraction: f64) -> f64 {
        let k = ((self.grid.n() as f64) * fraction).ceil() as usize;
        let start = self.grid.n().saturating_sub(k.max(1));
        self.grid.h() * self.values[start..].iter().sum::<f64>()
    }

    /// Transform a physical-frame field into the rescaled frame
    /// `w(y) = v(x)/f` with `y = f x`; exactly mass-preserving (cells map
    /// onto cells under the uniform dilation).
    pub fn to_rescaled(&self, map: &ScalingMap, t: f64) -> DensityField {
        let f = map.amplitude(t);
        let grid = Grid {
            n: self.grid.n,
            length: self.grid.length * f,
            h: self.grid.h * f,
        };
        let values: Vec<f64> = self.values.iter().map(|v| v / f).collect();
        let mass = self.mass;
        DensityField { grid, values, mass }
    }

    /// Inverse of [`Self::to_rescaled`].
    pub fn to_physical(&self, map: &ScalingMap, t: f64) -> DensityField {
        let f = map.amplitude(t);
        let grid = Grid {
            n: self.grid.n,
            length: self.grid.length / f,
            h: self.grid.h / f,
        };
        let values: Vec<f64> = self.values.iter().map(|v| v * f).collect();
        let mass = self.mass;
        DensityField { grid, values, mass }
    }
}
