//! The four shipped relaxation systems and the model registry.

mod coupled;
mod euler;
mod m1;
mod shallow_water;

pub use coupled::{coupled_sigma, CoupledEulerM1, CoupledParams};
pub use euler::{euler_sigma, EulerFriction, EulerFrictionParams};
pub use m1::{eddington_chi, eddington_chi_prime, m1_diffusivity, temperature_from_u, M1Params, M1};
pub use shallow_water::{sw_corrector, sw_diffusivity, ShallowWater, ShallowWaterParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smallmat::{Matrix, Vector};
use crate::system::RelaxationSystem;

/// Registry names, in display order.
pub const MODEL_NAMES: [&str; 4] = ["euler-friction", "m1", "coupled-euler-m1", "shallow-water"];

/// A model name together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum ModelSpec {
    EulerFriction(EulerFrictionParams),
    M1(M1Params),
    CoupledEulerM1(CoupledParams),
    ShallowWater(ShallowWaterParams),
}

impl ModelSpec {
    /// The model registered under `name`, with default parameters.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "euler-friction" => Ok(ModelSpec::EulerFriction(Default::default())),
            "m1" => Ok(ModelSpec::M1(Default::default())),
            "coupled-euler-m1" => Ok(ModelSpec::CoupledEulerM1(Default::default())),
            "shallow-water" => Ok(ModelSpec::ShallowWater(Default::default())),
            other => Err(Error::Config(format!(
                "model: unknown model '{other}' (expected one of {})",
                MODEL_NAMES.join(", ")
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::EulerFriction(_) => "euler-friction",
            ModelSpec::M1(_) => "m1",
            ModelSpec::CoupledEulerM1(_) => "coupled-euler-m1",
            ModelSpec::ShallowWater(_) => "shallow-water",
        }
    }

    /// Checks the parameters and instantiates the model.
    pub fn build(&self) -> Result<Box<dyn RelaxationSystem>> {
        Ok(match self {
            ModelSpec::EulerFriction(p) => Box::new(EulerFriction::new(*p)?),
            ModelSpec::M1(p) => Box::new(M1::new(*p)),
            ModelSpec::CoupledEulerM1(p) => Box::new(CoupledEulerM1::new(*p)?),
            ModelSpec::ShallowWater(p) => Box::new(ShallowWater::new(*p)?),
        })
    }
}

/// `p(ρ) = C_p ρ^η` with `η > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureLaw {
    pub c_p: f64,
    pub eta: f64,
}

impl PressureLaw {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        if !(self.c_p > 0.0 && self.c_p.is_finite()) {
            return Err(Error::Config(format!("{prefix}c_p: must be positive, got {}", self.c_p)));
        }
        if !(self.eta > 1.0 && self.eta.is_finite()) {
            return Err(Error::Config(format!("{prefix}eta: must exceed 1, got {}", self.eta)));
        }
        Ok(())
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        self.c_p * rho.powf(self.eta)
    }

    pub fn dpressure(&self, rho: f64) -> f64 {
        self.c_p * self.eta * rho.powf(self.eta - 1.0)
    }

    /// `ρ e(ρ)` with `e' = p / ρ²`.
    pub fn internal_energy(&self, rho: f64) -> f64 {
        self.pressure(rho) / (self.eta - 1.0)
    }

    /// `(p(ρ_R) - p(ρ_L)) / (ρ_R - ρ_L)`, or `p'` at the mean for
    /// (near-)equal densities.
    pub fn secant(&self, rho_l: f64, rho_r: f64) -> f64 {
        let scale = rho_l.abs().max(rho_r.abs());
        if (rho_r - rho_l).abs() <= 1e-7 * scale {
            self.dpressure(0.5 * (rho_l + rho_r))
        } else {
            (self.pressure(rho_r) - self.pressure(rho_l)) / (rho_r - rho_l)
        }
    }
}

pub(crate) fn uniform(rng: &mut dyn rand::RngCore, lo: f64, hi: f64) -> f64 {
    use rand::Rng;
    rng.random_range(lo..hi)
}

pub(crate) fn domain_error<T>(what: &str, u: &Vector) -> Result<T> {
    Err(Error::Domain(format!("{what}: {u:?} is outside the admissible set")))
}

/// `Q (I + σ)^{-1} Q^+` scaled by `b² / γ̂`: the interface diffusivity that
/// a correction matrix `σ` induces in the small-ε limit of the scheme.
pub fn sigma_diffusivity(q: &Matrix, sigma: &Matrix, b: f64, stiffness: f64) -> Result<Matrix> {
    let n = sigma.rows();
    let inv = (Matrix::identity(n) + *sigma).inverse()?;
    let qt = q.transpose();
    let pinv = qt.mul_mat(&q.mul_mat(&qt).inverse()?);
    Ok(q.mul_mat(&inv).mul_mat(&pinv).scale(b * b / stiffness))
}
