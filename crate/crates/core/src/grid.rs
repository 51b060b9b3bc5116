//! Uniform one-dimensional grid with one ghost cell per side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Ghost cells copy the adjacent interior cell.
    #[default]
    NeumannOutflow,
    Periodic,
}

impl Boundary {
    pub fn as_str(&self) -> &'static str {
        match self {
            Boundary::NeumannOutflow => "neumann-outflow",
            Boundary::Periodic => "periodic",
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neumann-outflow" | "neumann" => Ok(Boundary::NeumannOutflow),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::Config(format!(
                "boundary: unknown policy '{other}' (expected neumann-outflow or periodic)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub cells: usize,
    pub dx: f64,
    pub x0: f64,
    pub boundary: Boundary,
}

impl Grid1D {
    pub fn new(cells: usize, dx: f64, x0: f64, boundary: Boundary) -> Result<Self> {
        if cells < 3 {
            return Err(Error::Config(format!("cells: need at least 3, got {cells}")));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::Config(format!("dx: must be positive, got {dx}")));
        }
        if !x0.is_finite() {
            return Err(Error::Config(format!("x0: must be finite, got {x0}")));
        }
        Ok(Grid1D { cells, dx, x0, boundary })
    }

    /// Grid with `cells` cells covering `[a, b]`.
    pub fn covering(a: f64, b: f64, cells: usize, boundary: Boundary) -> Result<Self> {
        Grid1D::new(cells, (b - a) / cells as f64, a, boundary)
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x0 + (i as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells).map(|i| self.center(i)).collect()
    }

    pub fn length(&self) -> f64 {
        self.cells as f64 * self.dx
    }

    /// Edges of cell `i`.
    pub fn cell_bounds(&self, i: usize) -> (f64, f64) {
        let a = self.x0 + i as f64 * self.dx;
        (a, a + self.dx)
    }

    /// The same domain with `factor` times as many cells.
    pub fn refine(&self, factor: usize) -> Grid1D {
        Grid1D { cells: self.cells * factor, dx: self.dx / factor as f64, ..*self }
    }

    /// Copies `values` into a vector with one ghost cell on each side.
    pub fn with_ghosts<T: Copy>(&self, values: &[T]) -> Vec<T> {
        let mut ext = Vec::with_capacity(values.len() + 2);
        self.fill_with_ghosts(values, &mut ext);
        ext
    }

    /// As [`Self::with_ghosts`], reusing the buffer `ext`.
    pub fn fill_with_ghosts<T: Copy>(&self, values: &[T], ext: &mut Vec<T>) {
        debug_assert_eq!(values.len(), self.cells);
        let last = values.len() - 1;
        let (left, right) = match self.boundary {
            Boundary::NeumannOutflow => (values[0], values[last]),
            Boundary::Periodic => (values[last], values[0]),
        };
        ext.clear();
        ext.push(left);
        ext.extend_from_slice(values);
        ext.push(right);
    }

    /// Checks that `other` covers the same interval with an integer
    /// multiple of this grid's cell count; returns the multiple.
    pub fn refinement_factor(&self, other: &Grid1D) -> Result<usize> {
        if !other.cells.is_multiple_of(self.cells) {
            return Err(Error::GridMismatch(format!(
                "{} cells is not an integer refinement of {} cells",
                other.cells, self.cells
            )));
        }
        let tol = 1e-9 * self.length().abs().max(1.0);
        if (self.x0 - other.x0).abs() > tol || (self.length() - other.length()).abs() > tol {
            return Err(Error::GridMismatch(format!(
                "domains differ: [{}, {}] vs [{}, {}]",
                self.x0,
                self.x0 + self.length(),
                other.x0,
                other.x0 + other.length()
            )));
        }
        Ok(other.cells / self.cells)
    }
}
