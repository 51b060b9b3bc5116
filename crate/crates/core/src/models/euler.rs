//! Isentropic Euler equations with friction:
//! `ε∂tρ + ∂x(ρv) = 0`, `ε∂t(ρv) + ∂x(ρv² + p(ρ)) = −ρv/ε`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{domain_error, uniform, PressureLaw};
use crate::error::Result;
use crate::smallmat::{Matrix, Vector};
use crate::system::RelaxationSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EulerFrictionParams {
    /// Pressure exponent `η > 1`.
    pub eta: f64,
    /// Pressure coefficient `C_p > 0`.
    pub c_p: f64,
}

impl Default for EulerFrictionParams {
    fn default() -> Self {
        EulerFrictionParams { eta: 2.0, c_p: 1.0 }
    }
}

impl EulerFrictionParams {
    pub fn law(&self) -> PressureLaw {
        PressureLaw { c_p: self.c_p, eta: self.eta }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EulerFriction {
    pub params: EulerFrictionParams,
    law: PressureLaw,
}

impl EulerFriction {
    pub fn new(params: EulerFrictionParams) -> Result<Self> {
        let law = params.law();
        law.validate("model.")?;
        Ok(EulerFriction { params, law })
    }

    pub fn law(&self) -> &PressureLaw {
        &self.law
    }
}

/// Scalar correction `σ = b² Δρ/Δp − 1` (with `b²/p'(ρ) − 1` for equal
/// densities), returned as `σ I_2`.
pub fn euler_sigma(rho_l: f64, rho_r: f64, b: f64, params: &EulerFrictionParams) -> Matrix {
    let s = b * b / params.law().secant(rho_l, rho_r) - 1.0;
    Matrix::scalar(2, s)
}

impl RelaxationSystem for EulerFriction {
    fn name(&self) -> &'static str {
        "euler-friction"
    }

    fn dim(&self) -> usize {
        2
    }

    fn eq_dim(&self) -> usize {
        1
    }

    fn component_names(&self) -> Vec<&'static str> {
        vec!["rho", "q"]
    }

    fn reduced_names(&self) -> Vec<&'static str> {
        vec!["rho"]
    }

    fn flux(&self, s: &Vector) -> Vector {
        let (rho, q) = (s[0], s[1]);
        Vector::from_slice(&[q, q * q / rho + self.law.pressure(rho)])
    }

    fn relax(&self, s: &Vector) -> Vector {
        Vector::from_slice(&[0.0, s[1]])
    }

    fn projector(&self) -> Matrix {
        Matrix::from_rows(&[[1.0, 0.0]])
    }

    fn equilibrium(&self, u: &Vector) -> Result<Vector> {
        if !self.reduced_admissible(u) {
            return domain_error("density", u);
        }
        Ok(Vector::from_slice(&[u[0], 0.0]))
    }

    fn jac_flux(&self, s: &Vector) -> Result<Matrix> {
        let v = s[1] / s[0];
        Ok(Matrix::from_rows(&[[0.0, 1.0], [self.law.dpressure(s[0]) - v * v, 2.0 * v]]))
    }

    fn jac_relax_at_equilibrium(&self, _u: &Vector) -> Result<Matrix> {
        Ok(Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0]]))
    }

    fn entropy(&self, s: &Vector) -> Option<f64> {
        Some(0.5 * s[1] * s[1] / s[0] + self.law.internal_energy(s[0]))
    }

    fn entropy_flux(&self, s: &Vector) -> Option<f64> {
        let v = s[1] / s[0];
        Some((self.entropy(s)? + self.law.pressure(s[0])) * v)
    }

    fn entropy_hessian(&self, s: &Vector) -> Option<Matrix> {
        let (rho, q) = (s[0], s[1]);
        Some(Matrix::from_rows(&[
            [q * q / rho.powi(3) + self.law.dpressure(rho) / rho, -q / (rho * rho)],
            [-q / (rho * rho), 1.0 / rho],
        ]))
    }

    fn sigma(&self, left: &Vector, right: &Vector, b: f64, _dx: f64) -> Result<Matrix> {
        Ok(euler_sigma(left[0], right[0], b, &self.params))
    }

    fn admissible(&self, s: &Vector) -> bool {
        s[0] > 0.0 && s.is_finite()
    }

    fn reduced_admissible(&self, u: &Vector) -> bool {
        u[0] > 0.0 && u[0].is_finite()
    }

    fn interface_diffusivity(&self, left: &Vector, right: &Vector, _dx: f64) -> Result<Matrix> {
        if !self.reduced_admissible(left) {
            return domain_error("density", left);
        }
        if !self.reduced_admissible(right) {
            return domain_error("density", right);
        }
        Ok(Matrix::scalar(1, self.law.secant(left[0], right[0])))
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> Vector {
        let rho = uniform(rng, 0.1, 5.0);
        let v = uniform(rng, -2.0, 2.0);
        Vector::from_slice(&[rho, rho * v])
    }

    fn sample_reduced(&self, rng: &mut dyn RngCore) -> Vector {
        Vector::from_slice(&[uniform(rng, 0.1, 5.0)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> EulerFriction {
        EulerFriction::new(EulerFrictionParams::default()).unwrap()
    }

    #[test]
    fn sigma_examples() {
        let p = EulerFrictionParams::default();
        assert!((euler_sigma(1.0, 2.0, 2.0, &p)[(0, 0)] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(euler_sigma(1.0, 1.0, 2.0, &p)[(1, 1)], 1.0);
        assert!(euler_sigma(1.0, 1.0, 2f64.sqrt(), &p)[(0, 0)].abs() < 1e-15);
    }

    #[test]
    fn diffusivity_at_equal_states() {
        let m = model();
        let u = Vector::from_slice(&[1.0]);
        assert_eq!(m.interface_diffusivity(&u, &u, 0.1).unwrap()[(0, 0)], 2.0);
        assert!(m.interface_diffusivity(&Vector::from_slice(&[-1.0]), &u, 0.1).is_err());
    }

    #[test]
    fn entropy_is_rho_squared_at_rest() {
        let m = model();
        assert_eq!(m.entropy(&Vector::from_slice(&[1.0, 0.0])), Some(1.0));
        assert_eq!(m.entropy(&Vector::from_slice(&[3.0, 0.0])), Some(9.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(EulerFriction::new(EulerFrictionParams { eta: 1.0, c_p: 1.0 }).is_err());
        assert!(EulerFriction::new(EulerFrictionParams { eta: 2.0, c_p: 0.0 }).is_err());
    }
}
