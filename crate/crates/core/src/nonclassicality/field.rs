use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

use super::WignerMixture;
use crate::error::{Error, Result};
use crate::scenario::csv_number;

/// Default points per axis of the automatic grid.
pub const AUTO_POINTS: usize = 201;
/// Default half-width of the automatic grid, in marginal standard deviations.
pub const AUTO_SPAN_SD: f64 = 6.0;

/// Rectangular phase-space lattice in amplitude coordinates `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub center: [f64; 2],
    pub half_width: [f64; 2],
    /// Points per axis; odd, for Simpson's rule.
    pub points: [usize; 2],
}

impl Grid {
    pub fn square(half_width: f64, points: usize) -> Self {
        Self {
            center: [0.0, 0.0],
            half_width: [half_width; 2],
            points: [points; 2],
        }
    }

    /// Centered square grid spanning ±6 of the largest marginal standard
    /// deviation among the mixture's components.
    pub fn auto(mix: &WignerMixture) -> Self {
        Self::square(AUTO_SPAN_SD * mix.max_marginal_sd(), AUTO_POINTS)
    }

    pub fn validate(&self) -> Result<()> {
        for k in 0..2 {
            let n = self.points[k];
            if n < 3 || n % 2 == 0 {
                return Err(Error::domain(format!(
                    "grid needs an odd number of points ≥ 3 per axis, got {n}"
                )));
            }
            if !(self.half_width[k] > 0.0 && self.half_width[k].is_finite()) {
                return Err(Error::domain("grid half-width must be positive and finite"));
            }
            if !self.center[k].is_finite() {
                return Err(Error::domain("grid center must be finite"));
            }
        }
        Ok(())
    }

    pub fn step(&self, axis: usize) -> f64 {
        2.0 * self.half_width[axis] / (self.points[axis] - 1) as f64
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        self.center[axis] - self.half_width[axis] + i as f64 * self.step(axis)
    }
}

/// Composite Simpson weights (without the step factor) for `n` odd points.
pub fn simpson_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                1.0 / 3.0
            } else if i % 2 == 1 {
                4.0 / 3.0
            } else {
                2.0 / 3.0
            }
        })
        .collect()
}

/// Samples on a [`Grid`], x-major: `values[i·n_y + j]` sits at `(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl WignerField {
    pub fn from_fn<F>(grid: Grid, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        grid.validate()?;
        let [nx, ny] = grid.points;
        let values: Vec<f64> = (0..nx)
            .into_par_iter()
            .flat_map_iter(|i| {
                let x = grid.coordinate(0, i);
                let f = &f;
                (0..ny).map(move |j| f(x, grid.coordinate(1, j)))
            })
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("Wigner field has non-finite samples".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.points[1] + j]
    }

    /// Simpson-weighted sum of `g(value)` over the grid.
    fn weighted_sum(&self, g: impl Fn(f64) -> f64) -> f64 {
        let [nx, ny] = self.grid.points;
        let (wx, wy) = (simpson_weights(nx), simpson_weights(ny));
        let cell = self.grid.step(0) * self.grid.step(1);
        let mut acc = 0.0;
        for i in 0..nx {
            let mut row = 0.0;
            for j in 0..ny {
                row += wy[j] * g(self.value(i, j));
            }
            acc += wx[i] * row;
        }
        acc * cell
    }

    pub fn integral(&self) -> f64 {
        self.weighted_sum(|v| v)
    }

    /// `−∫ W` over the region where `W < 0`.
    pub fn negativity_volume(&self) -> f64 {
        self.weighted_sum(|v| if v < 0.0 { -v } else { 0.0 })
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `x,y,value` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,y,value")?;
        let [nx, ny] = self.grid.points;
        for i in 0..nx {
            let x = self.grid.coordinate(0, i);
            for j in 0..ny {
                writeln!(
                    w,
                    "{},{},{}",
                    csv_number(x),
                    csv_number(self.grid.coordinate(1, j)),
                    csv_number(self.value(i, j))
                )?;
            }
        }
        Ok(())
    }
}

pub fn evaluate_field(mix: &WignerMixture, grid: &Grid) -> Result<WignerField> {
    let ev = mix.evaluator()?;
    WignerField::from_fn(*grid, |x, y| ev.eval(x, y))
}

pub fn negativity_volume(mix: &WignerMixture, grid: &Grid) -> Result<f64> {
    Ok(evaluate_field(mix, grid)?.negativity_volume())
}
