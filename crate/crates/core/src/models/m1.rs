//! M1 moment model of radiative transfer coupled to a material temperature.
//!
//! State `(e, f, τ)`: radiative energy, radiative flux and temperature.
//! The equilibrium variable is `u = e + τ`, equal to `τ + τ⁴` at equilibrium.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::uniform;
use crate::error::{Error, Result};
use crate::smallmat::{Matrix, Vector};
use crate::system::RelaxationSystem;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct M1Params {}

#[derive(Debug, Clone, Copy, Default)]
pub struct M1 {
    pub params: M1Params,
}

impl M1 {
    pub fn new(params: M1Params) -> Self {
        M1 { params }
    }
}

/// Eddington factor `χ(ξ) = (3 + 4ξ²) / (5 + 2√(4 − 3ξ²))`.
pub fn eddington_chi(xi: f64) -> Result<f64> {
    if !(xi.abs() <= 1.0) {
        return Err(Error::Domain(format!("Eddington factor needs |ξ| ≤ 1, got {xi}")));
    }
    Ok(chi(xi))
}

/// `χ'(ξ)`.
pub fn eddington_chi_prime(xi: f64) -> Result<f64> {
    if !(xi.abs() <= 1.0) {
        return Err(Error::Domain(format!("Eddington factor needs |ξ| ≤ 1, got {xi}")));
    }
    Ok(chi_prime(xi))
}

fn chi(xi: f64) -> f64 {
    let xi2 = xi * xi;
    (3.0 + 4.0 * xi2) / (5.0 + 2.0 * (4.0 - 3.0 * xi2).sqrt())
}

fn chi_prime(xi: f64) -> f64 {
    let xi2 = xi * xi;
    let r = (4.0 - 3.0 * xi2).sqrt();
    let num = 3.0 + 4.0 * xi2;
    let den = 5.0 + 2.0 * r;
    (8.0 * xi * den + num * 6.0 * xi / r) / (den * den)
}

/// Solves `τ + τ⁴ = u` for `τ > 0`.
///
/// Newton's method on a convex increasing function, started to the right
/// of the root, converges monotonically.
pub fn temperature_from_u(u: f64) -> Result<f64> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::Domain(format!("τ + τ⁴ = u needs u > 0, got {u}")));
    }
    let mut tau = u.min(u.powf(0.25));
    for _ in 0..100 {
        let t3 = tau * tau * tau;
        let g = tau + t3 * tau - u;
        let next = tau - g / (1.0 + 4.0 * t3);
        if !(next > 0.0) {
            break;
        }
        let done = (tau - next).abs() <= 4.0 * f64::EPSILON * next;
        tau = next;
        if done {
            break;
        }
    }
    Ok(tau)
}

/// Diffusivity of the limit equation in the variable `u = τ + τ⁴`:
/// `(4/3)τ³ / (1 + 4τ³)`.
pub fn m1_diffusivity(tau: f64) -> f64 {
    let t3 = tau * tau * tau;
    (4.0 / 3.0) * t3 / (1.0 + 4.0 * t3)
}

impl RelaxationSystem for M1 {
    fn name(&self) -> &'static str {
        "m1"
    }

    fn dim(&self) -> usize {
        3
    }

    fn eq_dim(&self) -> usize {
        1
    }

    fn component_names(&self) -> Vec<&'static str> {
        vec!["e", "f", "tau"]
    }

    fn reduced_names(&self) -> Vec<&'static str> {
        vec!["u"]
    }

    fn flux(&self, s: &Vector) -> Vector {
        let (e, f) = (s[0], s[1]);
        let xi = (f / e).clamp(-1.0, 1.0);
        Vector::from_slice(&[f, chi(xi) * e, 0.0])
    }

    fn relax(&self, s: &Vector) -> Vector {
        let t4 = s[2].powi(4);
        Vector::from_slice(&[s[0] - t4, s[1], t4 - s[0]])
    }

    fn projector(&self) -> Matrix {
        Matrix::from_rows(&[[1.0, 0.0, 1.0]])
    }

    fn equilibrium(&self, u: &Vector) -> Result<Vector> {
        let tau = temperature_from_u(u[0])?;
        Ok(Vector::from_slice(&[tau.powi(4), 0.0, tau]))
    }

    fn jac_flux(&self, s: &Vector) -> Result<Matrix> {
        let xi = (s[1] / s[0]).clamp(-1.0, 1.0);
        let (c, dc) = (chi(xi), chi_prime(xi));
        Ok(Matrix::from_rows(&[[0.0, 1.0, 0.0], [c - xi * dc, dc, 0.0], [0.0, 0.0, 0.0]]))
    }

    fn jac_relax_at_equilibrium(&self, u: &Vector) -> Result<Matrix> {
        let tau = temperature_from_u(u[0])?;
        let d = 4.0 * tau.powi(3);
        Ok(Matrix::from_rows(&[[1.0, 0.0, -d], [0.0, 1.0, 0.0], [-1.0, 0.0, d]]))
    }

    fn sigma(&self, left: &Vector, right: &Vector, b: f64, dx: f64) -> Result<Matrix> {
        let d = self.interface_diffusivity(&self.reduce(left), &self.reduce(right), dx)?[(0, 0)];
        Ok(Matrix::scalar(3, b * b / d - 1.0))
    }

    fn admissible(&self, s: &Vector) -> bool {
        s.is_finite() && s[0] > 0.0 && s[2] > 0.0 && s[1].abs() <= s[0]
    }

    fn reduced_admissible(&self, u: &Vector) -> bool {
        u[0] > 0.0 && u[0].is_finite()
    }

    fn wave_speed_floor(&self) -> f64 {
        1.0
    }

    fn interface_diffusivity(&self, left: &Vector, right: &Vector, _dx: f64) -> Result<Matrix> {
        let tl = temperature_from_u(left[0])?;
        let tr = temperature_from_u(right[0])?;
        Ok(Matrix::scalar(1, m1_diffusivity(0.5 * (tl + tr))))
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> Vector {
        let e = uniform(rng, 0.1, 5.0);
        let xi = uniform(rng, -0.99, 0.99);
        let tau = uniform(rng, 0.1, 2.0);
        Vector::from_slice(&[e, xi * e, tau])
    }

    fn sample_reduced(&self, rng: &mut dyn RngCore) -> Vector {
        Vector::from_slice(&[uniform(rng, 0.1, 20.0)])
    }
}
