use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use relaxsim::models::{ModelSpec, MODEL_NAMES};
use relaxsim::smallmat::{Matrix, Vector};
use relaxsim::system::{jac_flux_fd, validate_descriptor, validate_with_projector, DEFAULT_FD_STEP};
use relaxsim::RelaxationSystem;

fn all_models() -> Vec<Box<dyn RelaxationSystem>> {
    MODEL_NAMES.iter().map(|n| ModelSpec::from_name(n).unwrap().build().unwrap()).collect()
}

fn samples(sys: &dyn RelaxationSystem, n: usize, seed: u64) -> (Vec<Vector>, Vec<Vector>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reduced = (0..n).map(|_| sys.sample_reduced(&mut rng)).collect();
    let states = (0..n).map(|_| sys.sample_state(&mut rng)).collect();
    (reduced, states)
}

#[test]
fn descriptors_hold_on_samples() {
    for sys in all_models() {
        let (reduced, states) = samples(sys.as_ref(), 1000, 1);
        let report = validate_descriptor(sys.as_ref(), &reduced, &states);
        assert!(report.passes(), "{}: {report:?}", sys.name());
    }
}

#[test]
fn corrupted_projector_is_caught() {
    for sys in all_models() {
        let (reduced, states) = samples(sys.as_ref(), 200, 2);
        let mut q = sys.projector();
        q[(0, sys.dim() - 1)] += 0.5;
        let report = validate_with_projector(sys.as_ref(), &q, &reduced, &states);
        assert!(!report.passes(), "{}: corrupted Q accepted", sys.name());
    }
}

#[test]
fn rank_deficient_projector_is_caught() {
    let sys = ModelSpec::from_name("coupled-euler-m1").unwrap().build().unwrap();
    let (reduced, states) = samples(sys.as_ref(), 10, 3);
    let q = Matrix::from_rows(&[[1.0, 0.0, 0.0, 0.0], [2.0, 0.0, 0.0, 0.0]]);
    assert!(!validate_with_projector(sys.as_ref(), &q, &reduced, &states).full_rank);
}

#[test]
fn analytic_jacobians_match_differences() {
    for sys in all_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let s = sys.sample_state(&mut rng);
            let a = sys.jac_flux(&s).unwrap();
            let fd = jac_flux_fd(sys.as_ref(), &s, DEFAULT_FD_STEP).unwrap();
            let scale = a.max_abs().max(1.0);
            for i in 0..sys.dim() {
                for j in 0..sys.dim() {
                    assert!((a[(i, j)] - fd[(i, j)]).abs() <= 1e-5 * scale, "{} at {s:?}", sys.name());
                }
            }
        }
    }
}

#[test]
fn relax_jacobian_matches_differences_at_equilibrium() {
    for sys in all_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let u = sys.sample_reduced(&mut rng);
            let eq = sys.equilibrium(&u).unwrap();
            let b = sys.jac_relax_at_equilibrium(&u).unwrap();
            let fd = relaxsim::system::central_jacobian(&eq, 1e-6, |s| sys.relax(s));
            for i in 0..sys.dim() {
                for j in 0..sys.dim() {
                    assert!((b[(i, j)] - fd[(i, j)]).abs() <= 1e-5 * b.max_abs().max(1.0), "{}", sys.name());
                }
            }
        }
    }
}

#[test]
fn entropy_hessians_are_positive_definite() {
    for sys in all_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let u = sys.sample_reduced(&mut rng);
            let eq = sys.equilibrium(&u).unwrap();
            let Some(h) = sys.entropy_hessian(&eq) else { continue };
            for k in 0..sys.dim() {
                let e = Vector::unit(sys.dim(), k);
                assert!(e.dot(&h.mul_vec(&e)) > 0.0, "{}", sys.name());
            }
        }
    }
}

#[test]
fn unknown_model_lists_names() {
    let msg = ModelSpec::from_name("navier-stokes").unwrap_err().to_string();
    for n in MODEL_NAMES {
        assert!(msg.contains(n));
    }
}

proptest! {
    #[test]
    fn equilibria_are_fixed_by_projection(seed in any::<u64>()) {
        for sys in all_models() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = sys.sample_reduced(&mut rng);
            let eq = sys.equilibrium(&u).unwrap();
            prop_assert!(sys.admissible(&eq));
            prop_assert!((sys.reduce(&eq) - u).norm_inf() <= 1e-12 * u.norm_inf().max(1.0));
            prop_assert!(sys.relax(&eq).norm_inf() <= 1e-12 * eq.norm_inf().max(1.0));
        }
    }

    #[test]
    fn sigma_is_symmetric_in_its_arguments_for_euler(rl in 0.1f64..5.0, rr in 0.1f64..5.0, b in 1.0f64..10.0) {
        let sys = ModelSpec::from_name("euler-friction").unwrap().build().unwrap();
        let l = sys.equilibrium(&Vector::from_slice(&[rl])).unwrap();
        let r = sys.equilibrium(&Vector::from_slice(&[rr])).unwrap();
        let a = sys.sigma(&l, &r, b, 0.01).unwrap();
        let c = sys.sigma(&r, &l, b, 0.01).unwrap();
        prop_assert!((a[(1, 1)] - c[(1, 1)]).abs() <= 1e-12 * a[(1, 1)].abs().max(1.0));
    }
}
