//! Isentropic Euler with friction coupled to M1 radiation through the
//! radiative force `σ f`.
//!
//! State `(ρ, ρv, e, f)`, equilibrium variables `(ρ, e)`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{domain_error, uniform, PressureLaw};
use crate::error::{Error, Result};
use crate::smallmat::{Matrix, Vector};
use crate::system::RelaxationSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoupledParams {
    /// Friction coefficient `κ`.
    pub kappa: f64,
    /// Opacity `σ_c`.
    pub sigma_c: f64,
    pub c_p: f64,
    pub eta: f64,
    /// Weight `W` of the radiative part `W(e²/2 + 3f²/2)` of the entropy.
    pub entropy_weight: f64,
}

impl Default for CoupledParams {
    fn default() -> Self {
        CoupledParams { kappa: 2.0, sigma_c: 1.0, c_p: 1e-3, eta: 2.0, entropy_weight: 1.0 }
    }
}

impl CoupledParams {
    pub fn law(&self) -> PressureLaw {
        PressureLaw { c_p: self.c_p, eta: self.eta }
    }

    /// `γ̂ = max(κ, σ_c)`.
    pub fn stiffness(&self) -> f64 {
        self.kappa.max(self.sigma_c)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CoupledEulerM1 {
    pub params: CoupledParams,
    law: PressureLaw,
}

impl CoupledEulerM1 {
    pub fn new(params: CoupledParams) -> Result<Self> {
        let law = params.law();
        law.validate("model.")?;
        for (name, v) in [
            ("kappa", params.kappa),
            ("sigma_c", params.sigma_c),
            ("entropy_weight", params.entropy_weight),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("model.{name}: must be positive, got {v}")));
            }
        }
        Ok(CoupledEulerM1 { params, law })
    }
}

/// The 4×4 correction matrix with `σ1` at (1,1), `−σ2` at (1,3) and `σ3`
/// at (3,3) (1-based, zeros elsewhere):
///
/// `σ1 = b²(κ/γ̂)Δρ/Δp − 1`, `σ2 = b²(σ_c/γ̂)Δρ/Δp`, `σ3 = 3b²σ_c/γ̂ − 1`.
pub fn coupled_sigma(left: &Vector, right: &Vector, b: f64, params: &CoupledParams) -> Matrix {
    let r = 1.0 / params.law().secant(left[0], right[0]);
    let g = params.stiffness();
    let b2 = b * b;
    let mut s = Matrix::zeros(4, 4);
    s[(0, 0)] = b2 * params.kappa / g * r - 1.0;
    s[(0, 2)] = -(b2 * params.sigma_c / g * r);
    s[(2, 2)] = 3.0 * b2 * params.sigma_c / g - 1.0;
    s
}

fn chi(xi: f64) -> f64 {
    super::eddington_chi(xi.clamp(-1.0, 1.0)).unwrap_or(1.0)
}

impl RelaxationSystem for CoupledEulerM1 {
    fn name(&self) -> &'static str {
        "coupled-euler-m1"
    }

    fn dim(&self) -> usize {
        4
    }

    fn eq_dim(&self) -> usize {
        2
    }

    fn component_names(&self) -> Vec<&'static str> {
        vec!["rho", "q", "e", "f"]
    }

    fn reduced_names(&self) -> Vec<&'static str> {
        vec!["rho", "e"]
    }

    fn flux(&self, s: &Vector) -> Vector {
        let (rho, q, e, f) = (s[0], s[1], s[2], s[3]);
        Vector::from_slice(&[q, q * q / rho + self.law.pressure(rho), f, chi(f / e) * e])
    }

    fn relax(&self, s: &Vector) -> Vector {
        let p = &self.params;
        Vector::from_slice(&[0.0, p.kappa * s[1] - p.sigma_c * s[3], 0.0, p.sigma_c * s[3]])
    }

    fn projector(&self) -> Matrix {
        Matrix::from_rows(&[[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
    }

    fn equilibrium(&self, u: &Vector) -> Result<Vector> {
        if !self.reduced_admissible(u) {
            return domain_error("density and radiative energy", u);
        }
        Ok(Vector::from_slice(&[u[0], 0.0, u[1], 0.0]))
    }

    fn jac_flux(&self, s: &Vector) -> Result<Matrix> {
        let v = s[1] / s[0];
        let xi = (s[3] / s[2]).clamp(-1.0, 1.0);
        let c = chi(xi);
        let dc = super::eddington_chi_prime(xi)?;
        Ok(Matrix::from_rows(&[
            [0.0, 1.0, 0.0, 0.0],
            [self.law.dpressure(s[0]) - v * v, 2.0 * v, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, c - xi * dc, dc],
        ]))
    }

    fn jac_relax_at_equilibrium(&self, _u: &Vector) -> Result<Matrix> {
        let p = &self.params;
        Ok(Matrix::from_rows(&[
            [0.0, 0.0, 0.0, 0.0],
            [0.0, p.kappa, 0.0, -p.sigma_c],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, p.sigma_c],
        ]))
    }

    fn entropy(&self, s: &Vector) -> Option<f64> {
        let w = self.params.entropy_weight;
        let (rho, q, e, f) = (s[0], s[1], s[2], s[3]);
        Some(0.5 * q * q / rho + self.law.internal_energy(rho) + w * (0.5 * e * e + 1.5 * f * f))
    }

    fn entropy_hessian(&self, s: &Vector) -> Option<Matrix> {
        let w = self.params.entropy_weight;
        let (rho, q) = (s[0], s[1]);
        let mut h = Matrix::zeros(4, 4);
        h[(0, 0)] = q * q / rho.powi(3) + self.law.dpressure(rho) / rho;
        h[(0, 1)] = -q / (rho * rho);
        h[(1, 0)] = h[(0, 1)];
        h[(1, 1)] = 1.0 / rho;
        h[(2, 2)] = w;
        h[(3, 3)] = 3.0 * w;
        Some(h)
    }

    fn stiffness(&self) -> f64 {
        self.params.stiffness()
    }

    fn sigma(&self, left: &Vector, right: &Vector, b: f64, _dx: f64) -> Result<Matrix> {
        Ok(coupled_sigma(left, right, b, &self.params))
    }

    fn admissible(&self, s: &Vector) -> bool {
        s.is_finite() && s[0] > 0.0 && s[2] > 0.0 && s[3].abs() <= s[2]
    }

    fn reduced_admissible(&self, u: &Vector) -> bool {
        u.is_finite() && u[0] > 0.0 && u[1] > 0.0
    }

    fn wave_speed_floor(&self) -> f64 {
        1.0
    }

    fn interface_diffusivity(&self, left: &Vector, right: &Vector, _dx: f64) -> Result<Matrix> {
        if !self.reduced_admissible(left) {
            return domain_error("density and radiative energy", left);
        }
        if !self.reduced_admissible(right) {
            return domain_error("density and radiative energy", right);
        }
        let p = &self.params;
        let secant = self.law.secant(left[0], right[0]);
        Ok(Matrix::from_rows(&[
            [secant / p.kappa, 1.0 / (3.0 * p.kappa)],
            [0.0, 1.0 / (3.0 * p.sigma_c)],
        ]))
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> Vector {
        let rho = uniform(rng, 0.1, 5.0);
        let v = uniform(rng, -2.0, 2.0);
        let e = uniform(rng, 0.1, 5.0);
        let xi = uniform(rng, -0.99, 0.99);
        Vector::from_slice(&[rho, rho * v, e, xi * e])
    }

    fn sample_reduced(&self, rng: &mut dyn RngCore) -> Vector {
        Vector::from_slice(&[uniform(rng, 0.1, 5.0), uniform(rng, 0.1, 5.0)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::sigma_diffusivity;

    #[test]
    fn sigma_examples() {
        let p = CoupledParams::default();
        let u = Vector::from_slice(&[0.2, 0.0, 1.0, 0.0]);
        let s = coupled_sigma(&u, &u, 1.0, &p);
        assert!((s[(2, 2)] - 0.5).abs() < 1e-15);
        assert!((s[(0, 0)] - 2499.0).abs() < 1e-9);
        assert!((s[(0, 2)] + 1250.0).abs() < 1e-9);
        let q = CoupledParams { kappa: 1.5, sigma_c: 1.5, ..p };
        let r = 1.0 / q.law().secant(0.2, 0.2);
        let s = coupled_sigma(&u, &u, 1.0, &q);
        assert!((s[(0, 0)] - (r - 1.0)).abs() < 1e-9);
        assert!((s[(0, 2)] + r).abs() < 1e-9);
    }

    #[test]
    fn sigma_reproduces_target_diffusivity() {
        let sys = CoupledEulerM1::new(CoupledParams::default()).unwrap();
        let l = Vector::from_slice(&[0.2, 0.0, 1.0, 0.0]);
        let r = Vector::from_slice(&[0.3, 0.0, 1.5, 0.0]);
        for b in [0.7, 1.0, 2.5] {
            let s = sys.sigma(&l, &r, b, 0.01).unwrap();
            let m = sigma_diffusivity(&sys.projector(), &s, b, sys.stiffness()).unwrap();
            let target = sys.interface_diffusivity(&sys.reduce(&l), &sys.reduce(&r), 0.01).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!((m[(i, j)] - target[(i, j)]).abs() < 1e-12, "b = {b} ({i},{j})");
                }
            }
        }
    }
}
