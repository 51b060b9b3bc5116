//! Shallow water with strong friction, `κ(h) = κ0 / h`, in the `m = 2`
//! scaling. The limit is a regularised p-Laplacian for the height.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{domain_error, uniform};
use crate::error::{Error, Result};
use crate::smallmat::{Matrix, Vector};
use crate::system::RelaxationSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShallowWaterParams {
    pub g: f64,
    pub kappa0: f64,
    /// Floor on `|∂x h|` inside the square root of the limit diffusivity.
    pub delta: f64,
}

impl Default for ShallowWaterParams {
    fn default() -> Self {
        ShallowWaterParams { g: 1.0, kappa0: 1.0, delta: 1e-8 }
    }
}

impl ShallowWaterParams {
    pub fn kappa(&self, h: f64) -> f64 {
        self.kappa0 / h
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ShallowWater {
    pub params: ShallowWaterParams,
}

impl ShallowWater {
    pub fn new(params: ShallowWaterParams) -> Result<Self> {
        for (name, v) in [("g", params.g), ("kappa0", params.kappa0), ("delta", params.delta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("model.{name}: must be positive, got {v}")));
            }
        }
        Ok(ShallowWater { params })
    }
}

/// First corrector `(0, β)` with
/// `β = −√h ∂x h / (κ(h) √max(|∂x h|, δ))`.
pub fn sw_corrector(h: f64, grad_h: f64, params: &ShallowWaterParams) -> Vector {
    let beta = -h.sqrt() * grad_h / (params.kappa(h) * grad_h.abs().max(params.delta).sqrt());
    Vector::from_slice(&[0.0, beta])
}

/// `√h / (κ(h) √max(|∂x h|, δ))`.
pub fn sw_diffusivity(h: f64, grad_abs: f64, params: &ShallowWaterParams) -> f64 {
    h.sqrt() / (params.kappa(h) * grad_abs.max(params.delta).sqrt())
}

impl RelaxationSystem for ShallowWater {
    fn name(&self) -> &'static str {
        "shallow-water"
    }

    fn dim(&self) -> usize {
        2
    }

    fn eq_dim(&self) -> usize {
        1
    }

    fn relaxation_exponent(&self) -> u32 {
        2
    }

    fn component_names(&self) -> Vec<&'static str> {
        vec!["h", "q"]
    }

    fn reduced_names(&self) -> Vec<&'static str> {
        vec!["h"]
    }

    fn flux(&self, s: &Vector) -> Vector {
        let (h, q) = (s[0], s[1]);
        Vector::from_slice(&[q, q * q / h + 0.5 * self.params.g * h * h])
    }

    fn relax(&self, s: &Vector) -> Vector {
        let k = self.params.kappa(s[0]);
        Vector::from_slice(&[0.0, k * k * self.params.g * s[1] * s[1].abs()])
    }

    fn projector(&self) -> Matrix {
        Matrix::from_rows(&[[1.0, 0.0]])
    }

    fn equilibrium(&self, u: &Vector) -> Result<Vector> {
        if !self.reduced_admissible(u) {
            return domain_error("height", u);
        }
        Ok(Vector::from_slice(&[u[0], 0.0]))
    }

    fn jac_flux(&self, s: &Vector) -> Result<Matrix> {
        let v = s[1] / s[0];
        Ok(Matrix::from_rows(&[[0.0, 1.0], [self.params.g * s[0] - v * v, 2.0 * v]]))
    }

    fn jac_relax_at_equilibrium(&self, _u: &Vector) -> Result<Matrix> {
        Ok(Matrix::zeros(2, 2))
    }

    fn entropy(&self, s: &Vector) -> Option<f64> {
        Some(0.5 * s[1] * s[1] / s[0] + 0.5 * self.params.g * s[0] * s[0])
    }

    fn entropy_flux(&self, s: &Vector) -> Option<f64> {
        let (h, q) = (s[0], s[1]);
        Some((0.5 * q * q / h + self.params.g * h * h) * q / h)
    }

    fn entropy_hessian(&self, s: &Vector) -> Option<Matrix> {
        let (h, q) = (s[0], s[1]);
        Some(Matrix::from_rows(&[
            [q * q / h.powi(3) + self.params.g, -q / (h * h)],
            [-q / (h * h), 1.0 / h],
        ]))
    }

    fn sigma(&self, left: &Vector, right: &Vector, b: f64, dx: f64) -> Result<Matrix> {
        let d = self.interface_diffusivity(&self.reduce(left), &self.reduce(right), dx)?[(0, 0)];
        Ok(Matrix::scalar(2, b * b / d - 1.0))
    }

    fn admissible(&self, s: &Vector) -> bool {
        s[0] > 0.0 && s.is_finite()
    }

    fn reduced_admissible(&self, u: &Vector) -> bool {
        u[0] > 0.0 && u[0].is_finite()
    }

    fn nonlinear_corrector(&self, u: &Vector, grad_flux: &Vector) -> Option<Result<Vector>> {
        if !self.reduced_admissible(u) {
            return Some(domain_error("height", u));
        }
        let h = u[0];
        let grad_h = grad_flux[1] / (self.params.g * h);
        Some(Ok(sw_corrector(h, grad_h, &self.params)))
    }

    fn interface_diffusivity(&self, left: &Vector, right: &Vector, dx: f64) -> Result<Matrix> {
        if !self.reduced_admissible(left) {
            return domain_error("height", left);
        }
        if !self.reduced_admissible(right) {
            return domain_error("height", right);
        }
        let h = 0.5 * (left[0] + right[0]);
        let grad = (right[0] - left[0]).abs() / dx;
        Ok(Matrix::scalar(1, sw_diffusivity(h, grad, &self.params)))
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> Vector {
        let h = uniform(rng, 0.1, 5.0);
        let v = uniform(rng, -2.0, 2.0);
        Vector::from_slice(&[h, h * v])
    }

    fn sample_reduced(&self, rng: &mut dyn RngCore) -> Vector {
        Vector::from_slice(&[uniform(rng, 0.1, 5.0)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrector_examples() {
        let p = ShallowWaterParams::default();
        assert_eq!(sw_corrector(1.0, 0.0, &p)[1], 0.0);
        assert!((sw_corrector(1.0, 1.0, &p)[1] + 1.0).abs() < 1e-15);
        for g in [-3.0, -1e-3, 1e-10, 2.0] {
            assert_eq!(sw_corrector(1.7, g, &p)[1].signum(), -g.signum());
        }
    }

    #[test]
    fn corrector_balances_friction() {
        // κ² g β|β| = −∂x p with ∂x p = g h ∂x h.
        let p = ShallowWaterParams { g: 9.81, kappa0: 0.3, delta: 1e-12 };
        for (h, gh) in [(1.0, 0.5), (2.5, -0.2), (0.3, 3.0)] {
            let beta = sw_corrector(h, gh, &p)[1];
            let k = p.kappa(h);
            assert!((k * k * p.g * beta * beta.abs() + p.g * h * gh).abs() < 1e-12);
        }
    }
}
