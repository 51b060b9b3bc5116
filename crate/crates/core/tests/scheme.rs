use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use relaxsim::models::{EulerFriction, EulerFrictionParams, M1Params, M1};
use relaxsim::scheme::{
    hll_intermediate, interface_states, ApScheme, Homogeneous, RunControl, SchemeOptions, SchemeState,
};
use relaxsim::smallmat::Vector;
use relaxsim::{Boundary, Error, Grid1D, RelaxationSystem};

fn euler() -> EulerFriction {
    EulerFriction::new(EulerFrictionParams::default()).unwrap()
}

fn mass(cells: &[Vector], dx: f64) -> f64 {
    cells.iter().map(|c| c[0]).sum::<f64>() * dx
}

/// Three cells, hand-assembled with `p = ρ²`, `b = 4`, `ε = 1/10`, `Δx = 1`
/// and copied ghosts. Every interface has the scalar `σ = b²/secant − 1`, so
/// the update is written out component by component.
#[test]
fn three_cell_step_by_hand() {
    let sys = euler();
    let grid = Grid1D::new(3, 1.0, 0.0, Boundary::NeumannOutflow).unwrap();
    let eps = 0.1;
    let cells = vec![Vector::from_slice(&[1.0, 0.0]), Vector::from_slice(&[2.0, 0.0]), Vector::from_slice(&[1.0, 0.0])];
    let scheme = ApScheme::new(&sys, grid, eps, SchemeOptions::default()).unwrap();
    let mut interfaces = scheme.prepare(&cells).unwrap();
    let b = 4.0;
    let ext = [1.0, 1.0, 2.0, 1.0, 1.0];
    let dt = 0.5 * eps * grid.dx / b;
    let mut expected = [[0.0; 2]; 3];
    for i in 0..3 {
        let rho = ext[i + 1];
        let mut out = [rho, 0.0];
        for (side, j) in [(1.0, i + 1), (-1.0, i)] {
            let (rl, rr) = (ext[j], ext[j + 1]);
            // Momentum flux ρ², mass flux 0, HLL flux with speed b.
            let f_mass = -0.5 * b * (rr - rl);
            let f_mom = 0.5 * (rl * rl + rr * rr);
            let secant = if rl == rr { 2.0 * rl } else { (rr * rr - rl * rl) / (rr - rl) };
            let sigma = b * b / secant - 1.0;
            let a = 1.0 / (eps + grid.dx / (2.0 * b) * (1.0 + sigma));
            out[0] -= side * dt / grid.dx * a * f_mass;
            out[1] -= side * dt / grid.dx * a * (f_mom - rho * rho);
        }
        expected[i] = out;
    }
    // Interface data rebuilt at b = 4 from the public pieces.
    let ghosts = grid.with_ghosts(&cells);
    for (j, d) in interfaces.iter_mut().enumerate() {
        d.b = b;
        d.sigma = sys.sigma(&ghosts[j], &ghosts[j + 1], b, grid.dx).unwrap();
        d.alpha_eps = relaxsim::scheme::alpha_matrix(&d.sigma, grid.dx, eps, b, sys.stiffness()).unwrap().alpha_eps;
        d.flux = relaxsim::scheme::hll_flux(&sys, &ghosts[j], &ghosts[j + 1], b);
    }
    let mut state = SchemeState::new(cells);
    scheme.step_prepared(&mut state, interfaces, dt).unwrap();
    for i in 0..3 {
        for k in 0..2 {
            assert!((state.cells[i][k] - expected[i][k]).abs() < 1e-13, "cell {i} comp {k}");
        }
    }
}

#[test]
fn homogeneous_periodic_runs_conserve_every_component() {
    let base = euler();
    let sys = Homogeneous(&base);
    let grid = Grid1D::new(80, 1.0 / 80.0, 0.0, Boundary::Periodic).unwrap();
    let cells: Vec<Vector> = (0..80)
        .map(|i| {
            let x = grid.center(i);
            let rho = 1.5 + 0.5 * (2.0 * std::f64::consts::PI * x).sin();
            Vector::from_slice(&[rho, 0.2 * rho])
        })
        .collect();
    let before = (mass(&cells, grid.dx), cells.iter().map(|c| c[1]).sum::<f64>());
    let scheme = ApScheme::new(&sys, grid, 1.0, SchemeOptions::default()).unwrap();
    let out = scheme.run(cells, &RunControl::new(0.2)).unwrap();
    let last = &out.last().unwrap().values;
    let after = (mass(last, grid.dx), last.iter().map(|c| c[1]).sum::<f64>());
    assert!((before.0 - after.0).abs() < 1e-13);
    assert!((before.1 - after.1).abs() < 1e-12);
}

#[test]
fn cfl_contract_is_enforced() {
    let sys = euler();
    let grid = Grid1D::new(10, 0.1, 0.0, Boundary::NeumannOutflow).unwrap();
    let cells = vec![Vector::from_slice(&[1.0, 0.0]); 10];
    let scheme = ApScheme::new(&sys, grid, 1e-2, SchemeOptions::default()).unwrap();
    let interfaces = scheme.prepare(&cells).unwrap();
    let b = interfaces.iter().map(|d| d.b).fold(0.0, f64::max);
    let mut state = SchemeState::new(cells);
    let too_big = 0.51 * 1e-2 * 0.1 / b;
    assert!(matches!(scheme.step(&mut state, too_big), Err(Error::CflViolation { .. })));
    assert_eq!(state.step, 0);
}

#[test]
fn snapshot_times_are_hit_exactly() {
    let sys = M1::new(M1Params {});
    let grid = Grid1D::new(20, 0.05, 0.0, Boundary::NeumannOutflow).unwrap();
    let cells: Vec<Vector> = (0..20)
        .map(|i| sys.equilibrium(&Vector::from_slice(&[1.0 + 0.5 * (i as f64 / 20.0)])).unwrap())
        .collect();
    let scheme = ApScheme::new(&sys, grid, 1e-2, SchemeOptions::default()).unwrap();
    let control = RunControl { t_final: 0.004, snapshot_times: vec![0.001, 0.0025], diagnostics_every: 5 };
    let out = scheme.run(cells, &control).unwrap();
    let times: Vec<f64> = out.snapshots.iter().map(|s| s.time).collect();
    assert_eq!(times, vec![0.0, 0.001, 0.0025, 0.004]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Under the CFL contract, one step stays admissible whenever every
    /// intermediate state of the modified Riemann solver is admissible, and
    /// agrees with the integral form when `b` is uniform.
    #[test]
    fn one_step_keeps_states_admissible(seed in any::<u64>(), eps in 1e-4f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let systems: Vec<Box<dyn RelaxationSystem>> = vec![Box::new(euler()), Box::new(M1::new(M1Params {}))];
        for sys in systems {
            let grid = Grid1D::new(12, 0.05, 0.0, Boundary::Periodic).unwrap();
            let cells: Vec<Vector> = (0..12).map(|_| sys.sample_state(&mut rng)).collect();
            let opts = SchemeOptions { uniform_speed: true, ..Default::default() };
            let scheme = ApScheme::new(sys.as_ref(), grid, eps, opts).unwrap();
            let interfaces = scheme.prepare(&cells).unwrap();
            let dt = scheme.stable_dt(&interfaces);
            let ext = grid.with_ghosts(&cells);
            let stars_ok = interfaces.iter().enumerate().all(|(j, d)| {
                let (ul, ur) = (&ext[j], &ext[j + 1]);
                let tilde = hll_intermediate(sys.as_ref(), ul, ur, d.b);
                let alpha = d.alpha_eps.scale(eps);
                let scale = 1.0 / sys.stiffness();
                let (l, r) = interface_states(sys.as_ref(), ul, ur, &tilde, &alpha, &d.sigma, scale).unwrap();
                sys.admissible(&l) && sys.admissible(&r)
            });
            let mut a = SchemeState::new(cells.clone());
            let mut b = SchemeState::new(cells);
            let ra = scheme.step(&mut a, dt);
            let rb = scheme.step_integral_form(&mut b, dt);
            if stars_ok {
                prop_assert!(ra.is_ok() && rb.is_ok(), "{ra:?} {rb:?}");
            }
            if ra.is_ok() && rb.is_ok() {
                for (x, y) in a.cells.iter().zip(&b.cells) {
                    prop_assert!((*x - *y).norm_inf() <= 1e-12 * x.norm_inf().max(1.0));
                }
            } else {
                prop_assert!(matches!(ra, Err(Error::Admissibility { .. })), "{ra:?}");
            }
        }
    }

    /// Equilibrium constants are steady.
    #[test]
    fn constant_equilibria_are_steady(rho in 0.1f64..5.0) {
        let sys = euler();
        let grid = Grid1D::new(8, 0.1, 0.0, Boundary::NeumannOutflow).unwrap();
        let c = sys.equilibrium(&Vector::from_slice(&[rho])).unwrap();
        let scheme = ApScheme::new(&sys, grid, 1e-3, SchemeOptions::default()).unwrap();
        let out = scheme.run(vec![c; 8], &RunControl::new(1e-4)).unwrap();
        for v in &out.last().unwrap().values {
            prop_assert!((*v - c).norm_inf() <= 1e-14 * rho.max(1.0));
        }
    }
}
