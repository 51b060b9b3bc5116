//! Entropy and momentum monitors, and norm-based comparison of series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::series::SnapshotSeries;
use crate::smallmat::Vector;
use crate::system::RelaxationSystem;

/// `Σ_i Φ(U_i) Δx`.
pub fn total_entropy<S: RelaxationSystem + ?Sized>(sys: &S, cells: &[Vector], dx: f64) -> Result<f64> {
    let mut sum = 0.0;
    for c in cells {
        sum += sys.entropy(c).ok_or(Error::NotAvailable("entropy"))?;
    }
    Ok(sum * dx)
}

/// `max_i ‖U_i − E(QU_i)‖`: distance of the field from the equilibrium
/// manifold, which reduces to the largest momentum for the Euler models.
pub fn momentum_max<S: RelaxationSystem + ?Sized>(sys: &S, cells: &[Vector]) -> Result<f64> {
    let mut worst = 0.0f64;
    for c in cells {
        let eq = sys.equilibrium(&sys.reduce(c))?;
        worst = worst.max((*c - eq).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EntropyTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl EntropyTrace {
    pub fn push(&mut self, t: f64, s: f64) {
        self.times.push(t);
        self.values.push(s);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The first index `k` with `S_k > S_{k-1} + rel_tol |S_{k-1}|`, if any,
    /// together with the size of the increase.
    pub fn first_increase(&self, rel_tol: f64) -> Option<(usize, f64)> {
        self.values.windows(2).enumerate().find_map(|(k, w)| {
            let inc = w[1] - w[0];
            (inc > rel_tol * w[0].abs()).then_some((k + 1, inc))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentError {
    pub name: String,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// L1 norm of the reference (second) field.
    pub reference_l1: f64,
    /// `l1 / reference_l1`.
    pub relative_l1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub time: f64,
    pub cells: usize,
    pub dx: f64,
    pub components: Vec<ComponentError>,
}

/// Cell averages of `values` over groups of `factor` consecutive cells.
pub fn restrict(values: &[Vector], factor: usize) -> Vec<Vector> {
    assert!(factor > 0 && values.len().is_multiple_of(factor));
    values
        .chunks(factor)
        .map(|chunk| {
            let mut acc = Vector::zeros(chunk[0].len());
            for v in chunk {
                acc += *v;
            }
            acc.scale(1.0 / factor as f64)
        })
        .collect()
}

/// Norms of `a − b` per component, after restricting the finer of the two
/// fields onto the coarser grid.
pub fn compare_fields(
    a: &[Vector],
    grid_a: &Grid1D,
    b: &[Vector],
    grid_b: &Grid1D,
    names: &[String],
) -> Result<(Grid1D, Vec<ComponentError>)> {
    let (grid, a, b) = if grid_a.cells <= grid_b.cells {
        let f = grid_a.refinement_factor(grid_b)?;
        (*grid_a, a.to_vec(), restrict(b, f))
    } else {
        let f = grid_b.refinement_factor(grid_a)?;
        (*grid_b, restrict(a, f), b.to_vec())
    };
    let width = a.first().map_or(0, |v| v.len());
    if b.first().map_or(0, |v| v.len()) != width {
        return Err(Error::GridMismatch("component counts differ".into()));
    }
    let mut out = Vec::with_capacity(width);
    for k in 0..width {
        let (mut l1, mut l2, mut linf, mut r1) = (0.0, 0.0, 0.0f64, 0.0);
        for (x, y) in a.iter().zip(&b) {
            let d = (x[k] - y[k]).abs();
            l1 += d;
            l2 += d * d;
            linf = linf.max(d);
            r1 += y[k].abs();
        }
        let (l1, r1) = (l1 * grid.dx, r1 * grid.dx);
        out.push(ComponentError {
            name: names.get(k).cloned().unwrap_or_else(|| format!("comp_{k}")),
            l1,
            l2: (l2 * grid.dx).sqrt(),
            linf,
            reference_l1: r1,
            relative_l1: if r1 > 0.0 { l1 / r1 } else if l1 == 0.0 { 0.0 } else { f64::INFINITY },
        });
    }
    Ok((grid, out))
}

/// Compares two series of equilibrium variables at matching times.
pub fn compare(a: &SnapshotSeries, b: &SnapshotSeries) -> Result<Vec<ErrorReport>> {
    if a.labels.len() != b.labels.len() {
        return Err(Error::GridMismatch(format!(
            "{} components vs {} components",
            a.labels.len(),
            b.labels.len()
        )));
    }
    let mut reports = Vec::new();
    for sa in &a.snapshots {
        let tol = 1e-9 * sa.time.abs().max(1.0);
        let Some(sb) = b.at_time(sa.time, tol) else { continue };
        let (grid, components) = compare_fields(&sa.values, &a.grid, &sb.values, &b.grid, &a.labels)?;
        reports.push(ErrorReport { time: sa.time, cells: grid.cells, dx: grid.dx, components });
    }
    if reports.is_empty() {
        return Err(Error::GridMismatch("no snapshot times in common".into()));
    }
    Ok(reports)
}
