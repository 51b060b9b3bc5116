//! The structural description of a relaxation system.
//!
//! A model supplies the flux `F`, the relaxation term `R`, the projector `Q`
//! onto the conserved (equilibrium) variables `u = QU`, the equilibrium map
//! `E`, and the hooks the scheme and the limit solvers need. The structural
//! assumptions are `QR(U) = 0`, `QE(u) = u`, `R(E(u)) = 0` and
//! `QF(E(u)) = 0`; [`validate_descriptor`] measures how far a model is from
//! satisfying them.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::smallmat::{Matrix, Vector};

/// Relative finite-difference step used by the default Jacobian hooks.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Threshold below which [`DescriptorReport::passes`] accepts a violation.
pub const DESCRIPTOR_TOL: f64 = 1e-10;

pub trait RelaxationSystem: Send + Sync {
    /// Registry name of the model.
    fn name(&self) -> &'static str;

    /// State dimension `N`.
    fn dim(&self) -> usize;

    /// Number of equilibrium variables `n < N`.
    fn eq_dim(&self) -> usize;

    /// Exponent `m` of the relaxation scaling.
    fn relaxation_exponent(&self) -> u32 {
        1
    }

    /// Labels of the state components, used as CSV column names.
    fn component_names(&self) -> Vec<&'static str>;

    /// Labels of the equilibrium variables.
    fn reduced_names(&self) -> Vec<&'static str>;

    fn flux(&self, state: &Vector) -> Vector;

    fn relax(&self, state: &Vector) -> Vector;

    /// The `n x N` matrix `Q`.
    fn projector(&self) -> Matrix;

    /// `E(u)`, the unique equilibrium state with `QE(u) = u`.
    fn equilibrium(&self, u: &Vector) -> Result<Vector>;

    /// `A(U) = D_U F(U)`. Defaults to central differences.
    fn jac_flux(&self, state: &Vector) -> Result<Matrix> {
        jac_flux_fd(self, state, DEFAULT_FD_STEP)
    }

    /// `B(E(u)) = D_U R(E(u))`. Defaults to central differences.
    fn jac_relax_at_equilibrium(&self, u: &Vector) -> Result<Matrix> {
        let eq = self.equilibrium(u)?;
        Ok(central_jacobian(&eq, DEFAULT_FD_STEP, |s| self.relax(s)))
    }

    /// Mathematical entropy `Φ(U)`, when the model has one.
    fn entropy(&self, _state: &Vector) -> Option<f64> {
        None
    }

    /// Entropy flux `Ψ(U)`.
    fn entropy_flux(&self, _state: &Vector) -> Option<f64> {
        None
    }

    /// `D²Φ(U)`. Defaults to second differences of [`Self::entropy`].
    fn entropy_hessian(&self, state: &Vector) -> Option<Matrix> {
        self.entropy(state)?;
        Some(hessian_fd(state, 1e-4, |s| self.entropy(s).unwrap_or(f64::NAN)))
    }

    /// The ε-free stiffness `γ̂ = εγ` used in the scheme. The default
    /// corresponds to `γ = 1/ε`.
    fn stiffness(&self) -> f64 {
        1.0
    }

    /// Correction matrix `σ` at the interface between `left` and `right`.
    fn sigma(&self, left: &Vector, right: &Vector, b: f64, dx: f64) -> Result<Matrix>;

    /// Membership of a state in the admissible set `Ω`.
    fn admissible(&self, state: &Vector) -> bool;

    /// Membership of equilibrium variables in `ω = QΩ`.
    fn reduced_admissible(&self, u: &Vector) -> bool;

    /// Lower bound imposed on the interface wave speed.
    fn wave_speed_floor(&self) -> f64 {
        0.0
    }

    /// Analytic first corrector for models whose relaxation is not
    /// linearisable at equilibrium (`m > 1`).
    fn nonlinear_corrector(&self, _u: &Vector, _grad_flux: &Vector) -> Option<Result<Vector>> {
        None
    }

    /// Interface diffusion matrix of the limit equation.
    fn interface_diffusivity(&self, left: &Vector, right: &Vector, dx: f64) -> Result<Matrix>;

    /// A random admissible state.
    fn sample_state(&self, rng: &mut dyn RngCore) -> Vector;

    /// A random point of `ω`.
    fn sample_reduced(&self, rng: &mut dyn RngCore) -> Vector;

    /// `u = QU`.
    fn reduce(&self, state: &Vector) -> Vector {
        self.projector().mul_vec(state)
    }
}

/// Central finite-difference Jacobian with per-component step
/// `h * max(1, |x_k|)`.
pub fn central_jacobian<F: Fn(&Vector) -> Vector>(x: &Vector, h: f64, f: F) -> Matrix {
    let n = x.len();
    let m = f(x).len();
    let mut jac = Matrix::zeros(m, n);
    for k in 0..n {
        let step = h * x[k].abs().max(1.0);
        let mut plus = *x;
        let mut minus = *x;
        plus[k] += step;
        minus[k] -= step;
        let d = (f(&plus) - f(&minus)).scale(0.5 / step);
        for i in 0..m {
            jac[(i, k)] = d[i];
        }
    }
    jac
}

fn hessian_fd<F: Fn(&Vector) -> f64>(x: &Vector, h: f64, f: F) -> Matrix {
    let n = x.len();
    let steps: Vec<f64> = (0..n).map(|k| h * x[k].abs().max(1.0)).collect();
    let mut hess = Matrix::zeros(n, n);
    let f0 = f(x);
    for i in 0..n {
        let mut p = *x;
        let mut q = *x;
        p[i] += steps[i];
        q[i] -= steps[i];
        hess[(i, i)] = (f(&p) - 2.0 * f0 + f(&q)) / (steps[i] * steps[i]);
        for j in 0..i {
            let eval = |si: f64, sj: f64| {
                let mut y = *x;
                y[i] += si * steps[i];
                y[j] += sj * steps[j];
                f(&y)
            };
            let v = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0))
                / (4.0 * steps[i] * steps[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// Central finite-difference Jacobian of the flux.
///
/// Every perturbed state `U ± h_k e_k` must stay admissible; otherwise an
/// [`Error::Admissibility`] is returned.
pub fn jac_flux_fd<S: RelaxationSystem + ?Sized>(sys: &S, state: &Vector, h: f64) -> Result<Matrix> {
    for k in 0..state.len() {
        let step = h * state[k].abs().max(1.0);
        for sign in [1.0, -1.0] {
            let mut p = *state;
            p[k] += sign * step;
            if !sys.admissible(&p) {
                return Err(Error::Admissibility {
                    cell: None,
                    detail: format!("finite-difference probe {p:?} leaves the admissible set"),
                });
            }
        }
    }
    Ok(central_jacobian(state, h, |s| sys.flux(s)))
}

/// Maximum violation of each structural assumption over a sample set.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DescriptorReport {
    /// `max |Q R(U)|` over state samples.
    pub q_relax: f64,
    /// `max |Q E(u) - u|` over equilibrium samples.
    pub q_equilibrium: f64,
    /// `max |R(E(u))|`.
    pub relax_equilibrium: f64,
    /// `max |Q F(E(u))|`.
    pub q_flux_equilibrium: f64,
    /// False when `Q Q^T` is singular, i.e. `Q` is rank deficient.
    pub full_rank: bool,
}

impl DescriptorReport {
    pub fn max_violation(&self) -> f64 {
        self.q_relax
            .max(self.q_equilibrium)
            .max(self.relax_equilibrium)
            .max(self.q_flux_equilibrium)
    }

    pub fn passes(&self) -> bool {
        self.full_rank && self.max_violation() <= DESCRIPTOR_TOL
    }
}

/// Evaluates the structural assumptions of `sys` on the given samples.
pub fn validate_descriptor<S: RelaxationSystem + ?Sized>(
    sys: &S,
    reduced: &[Vector],
    states: &[Vector],
) -> DescriptorReport {
    validate_with_projector(sys, &sys.projector(), reduced, states)
}

/// As [`validate_descriptor`] with an explicit `Q`, which allows checking a
/// model against a deliberately wrong projector.
pub fn validate_with_projector<S: RelaxationSystem + ?Sized>(
    sys: &S,
    q: &Matrix,
    reduced: &[Vector],
    states: &[Vector],
) -> DescriptorReport {
    let full_rank = q.mul_mat(&q.transpose()).inverse().is_ok();
    let mut report = DescriptorReport { full_rank, ..Default::default() };
    let bad = f64::INFINITY;
    for s in states {
        let r = q.mul_vec(&sys.relax(s)).norm_inf();
        report.q_relax = report.q_relax.max(if r.is_finite() { r } else { bad });
    }
    for u in reduced {
        match sys.equilibrium(u) {
            Ok(eq) => {
                let a = (q.mul_vec(&eq) - *u).norm_inf();
                let b = sys.relax(&eq).norm_inf();
                let c = q.mul_vec(&sys.flux(&eq)).norm_inf();
                report.q_equilibrium = report.q_equilibrium.max(a);
                report.relax_equilibrium = report.relax_equilibrium.max(b);
                report.q_flux_equilibrium = report.q_flux_equilibrium.max(c);
            }
            Err(_) => report.q_equilibrium = bad,
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_jacobian_is_exact_for_linear_maps() {
        let a = Matrix::from_rows(&[[1.0, -2.0, 0.5], [3.0, 0.0, 4.0], [0.0, 1.0, -1.0]]);
        for h in [1e-2, 1e-5] {
            let x = Vector::from_slice(&[0.3, -1.0, 2.0]);
            let j = central_jacobian(&x, h, |s| a.mul_vec(s));
            for i in 0..3 {
                for k in 0..3 {
                    assert!((j[(i, k)] - a[(i, k)]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn hessian_of_quadratic() {
        let x = Vector::from_slice(&[0.5, 2.0]);
        let h = hessian_fd(&x, 1e-4, |s| 3.0 * s[0] * s[0] + s[0] * s[1] - 2.0 * s[1] * s[1]);
        assert!((h[(0, 0)] - 6.0).abs() < 1e-5);
        assert!((h[(0, 1)] - 1.0).abs() < 1e-5);
        assert!((h[(1, 1)] + 4.0).abs() < 1e-5);
    }
}
