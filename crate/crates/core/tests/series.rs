use proptest::prelude::*;

use relaxsim::diagnostics::compare;
use relaxsim::presets::preset;
use relaxsim::scheme::ApScheme;
use relaxsim::series::{SeriesKind, Snapshot, SnapshotSeries};
use relaxsim::smallmat::Vector;
use relaxsim::{Boundary, Grid1D};

fn run_csv() -> Vec<u8> {
    let p = preset("euler-friction-desk").unwrap();
    let sys = p.config.model.build().unwrap();
    let grid = p.config.grid().unwrap();
    let init = p.config.initial_data().cells(sys.as_ref(), &grid).unwrap();
    let scheme = ApScheme::new(sys.as_ref(), grid, p.config.epsilon, p.config.scheme_options()).unwrap();
    let mut control = p.config.run_control();
    control.t_final = 0.002;
    let out = scheme.run(init, &control).unwrap();
    let mut buf = Vec::new();
    out.write_csv(&mut buf).unwrap();
    buf
}

#[test]
fn identical_runs_give_identical_bytes() {
    assert_eq!(run_csv(), run_csv());
}

#[test]
fn refined_linear_profile_compares_to_zero() {
    let coarse = Grid1D::new(10, 0.1, 0.0, Boundary::NeumannOutflow).unwrap();
    let fine = coarse.refine(2);
    let field = |g: &Grid1D| -> Vec<Vector> {
        (0..g.cells).map(|i| Vector::from_slice(&[1.0 + 3.0 * g.center(i)])).collect()
    };
    let mk = |g: Grid1D| {
        let mut s = SnapshotSeries::new("euler-friction", SeriesKind::Reduced, g, vec!["rho".into()]);
        s.snapshots.push(Snapshot { time: 0.0, values: field(&g) });
        s
    };
    let r = compare(&mk(coarse), &mk(fine)).unwrap();
    assert!(r[0].components[0].linf < 1e-14);
}

#[test]
fn constant_offset_gives_exact_norms() {
    let g = Grid1D::new(20, 0.05, 0.0, Boundary::NeumannOutflow).unwrap();
    let mk = |c: f64| {
        let mut s = SnapshotSeries::new("m1", SeriesKind::Reduced, g, vec!["u".into()]);
        s.snapshots.push(Snapshot { time: 0.5, values: vec![Vector::from_slice(&[c]); 20] });
        s
    };
    let r = compare(&mk(2.25), &mk(2.0)).unwrap();
    let e = &r[0].components[0];
    assert!((e.linf - 0.25).abs() < 1e-15);
    assert!((e.l1 - 0.25 * g.length()).abs() < 1e-14);
    let back = compare(&mk(2.0), &mk(2.25)).unwrap();
    assert_eq!(back[0].components[0].linf, e.linf);
}

proptest! {
    #[test]
    fn csv_round_trip_is_bit_exact(values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 6)) {
        let g = Grid1D::new(3, 0.25, -1.0, Boundary::Periodic).unwrap();
        let mut s = SnapshotSeries::new("euler-friction", SeriesKind::State, g, vec!["rho".into(), "m".into()]);
        let cells = values.chunks(2).map(Vector::from_slice).collect();
        s.snapshots.push(Snapshot { time: 0.125, values: cells });
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = SnapshotSeries::read_csv(buf.as_slice()).unwrap();
        for (a, b) in s.snapshots[0].values.iter().zip(&back.snapshots[0].values) {
            for k in 0..2 {
                prop_assert_eq!(a[k].to_bits(), b[k].to_bits());
            }
        }
        prop_assert_eq!(back.grid, g);
    }
}
