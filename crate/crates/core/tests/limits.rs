use std::f64::consts::PI;

use relaxsim::limits::{diffusion_reference_step, DiffusionField, LimitRunner, LimitSolver};
use relaxsim::models::{CoupledEulerM1, CoupledParams, EulerFriction, EulerFrictionParams};
use relaxsim::scheme::RunControl;
use relaxsim::smallmat::Vector;
use relaxsim::{Boundary, Error, Grid1D};

/// Periodic heat equation `∂t e = D ∂x² e` on `[0, 1)` from the cell
/// averages of a top hat, solved by Fourier series; returns cell averages.
fn heat_top_hat(grid: &Grid1D, d: f64, t: f64, lo: f64, hi: f64, inside: f64, outside: f64) -> Vec<f64> {
    let jump = inside - outside;
    let mean = outside + jump * (hi - lo);
    (0..grid.cells)
        .map(|i| {
            let (a, b) = grid.cell_bounds(i);
            let mut v = mean;
            for k in 1..4000 {
                let w = 2.0 * PI * k as f64;
                let decay = (-d * w * w * t).exp();
                if decay < 1e-18 {
                    break;
                }
                // Coefficients of the top hat, then averaged over [a, b].
                let ck = jump * ((w * hi).sin() - (w * lo).sin()) / (PI * k as f64);
                let sk = jump * ((w * lo).cos() - (w * hi).cos()) / (PI * k as f64);
                let cos_avg = ((w * b).sin() - (w * a).sin()) / (w * (b - a));
                let sin_avg = ((w * a).cos() - (w * b).cos()) / (w * (b - a));
                v += decay * (ck * cos_avg + sk * sin_avg);
            }
            v
        })
        .collect()
}

#[test]
fn coupled_energy_matches_heat_kernel() {
    let sys = CoupledEulerM1::new(CoupledParams::default()).unwrap();
    let grid = Grid1D::new(128, 1.0 / 128.0, 0.0, Boundary::Periodic).unwrap();
    let init: Vec<Vector> = (0..128)
        .map(|i| {
            let (a, b) = grid.cell_bounds(i);
            let inside = (b.min(0.55) - a.max(0.45)).max(0.0) / (b - a);
            Vector::from_slice(&[0.2, 1.0 + 0.5 * inside])
        })
        .collect();
    let runner = LimitRunner::new(&sys, grid, LimitSolver::Reference, 0.9).unwrap();
    let out = runner.run(init, &RunControl::new(0.05)).unwrap();
    let exact = heat_top_hat(&grid, 1.0 / 3.0, 0.05, 0.45, 0.55, 1.5, 1.0);
    let last = &out.last().unwrap().values;
    let (mut err, mut norm) = (0.0, 0.0);
    for (v, e) in last.iter().zip(&exact) {
        err += (v[1] - e).abs();
        norm += e.abs();
    }
    assert!(err / norm < 0.01, "relative L1 error {}", err / norm);
}

#[test]
fn euler_reference_conserves_mass() {
    let sys = EulerFriction::new(EulerFrictionParams::default()).unwrap();
    let grid = Grid1D::new(300, 0.01, 0.0, Boundary::NeumannOutflow).unwrap();
    let init: Vec<Vector> = (0..300)
        .map(|i| Vector::from_slice(&[if (1.2..=1.8).contains(&grid.center(i)) { 2.0 } else { 1.0 }]))
        .collect();
    let m0: f64 = init.iter().map(|v| v[0]).sum::<f64>() * grid.dx;
    let runner = LimitRunner::new(&sys, grid, LimitSolver::Reference, 0.9).unwrap();
    let out = runner.run(init, &RunControl::new(0.05)).unwrap();
    let last = &out.last().unwrap().values;
    let m1: f64 = last.iter().map(|v| v[0]).sum::<f64>() * grid.dx;
    assert!((m1 - m0).abs() < 1e-10);
    assert!(last.iter().all(|v| v[0] > 1.0 - 1e-12 && v[0] < 2.0 + 1e-12));
}

#[test]
fn constant_fields_are_steady_for_both_solvers() {
    let sys = CoupledEulerM1::new(CoupledParams::default()).unwrap();
    let grid = Grid1D::new(16, 0.05, 0.0, Boundary::NeumannOutflow).unwrap();
    let c = Vector::from_slice(&[0.3, 1.2]);
    for solver in [LimitSolver::Reference, LimitSolver::DiscreteAp { safety: 1.0 }] {
        let runner = LimitRunner::new(&sys, grid, solver, 0.9).unwrap();
        let out = runner.run(vec![c; 16], &RunControl::new(0.01)).unwrap();
        assert!(out.last().unwrap().values.iter().all(|v| (*v - c).norm_inf() < 1e-14));
    }
}

#[test]
fn unstable_step_is_refused() {
    let sys = EulerFriction::new(EulerFrictionParams::default()).unwrap();
    let grid = Grid1D::new(4, 0.1, 0.0, Boundary::NeumannOutflow).unwrap();
    let field = DiffusionField { values: vec![Vector::from_slice(&[1.0]); 4], time: 0.0 };
    // D = p'(1) = 2, so the bound is Δx²/4.
    assert!(diffusion_reference_step(&sys, &grid, &field, 0.0025).is_ok());
    assert!(matches!(diffusion_reference_step(&sys, &grid, &field, 0.003), Err(Error::Stability { .. })));
}
