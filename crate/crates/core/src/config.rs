//! Run configuration and initial data.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid1D};
use crate::models::{temperature_from_u, ModelSpec};
use crate::scheme::{RunControl, SchemeOptions};
use crate::smallmat::Vector;
use crate::system::RelaxationSystem;

/// A scalar profile on the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Profile {
    Constant { value: f64 },
    /// `inside` on `[lo, hi]`, `outside` elsewhere.
    Step { lo: f64, hi: f64, inside: f64, outside: f64 },
    /// `base + amplitude · exp(−((x − center)/width)²)`.
    Gaussian { center: f64, width: f64, base: f64, amplitude: f64 },
}

// Three-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
const QUAD_PANELS: usize = 8;

/// Average of `f` over `[a, b]` by composite Gauss-Legendre quadrature.
fn average<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    let h = (b - a) / QUAD_PANELS as f64;
    let mut sum = 0.0;
    for p in 0..QUAD_PANELS {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            sum += w * f(mid + 0.5 * h * x);
        }
    }
    sum / (2.0 * QUAD_PANELS as f64)
}

impl Profile {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Profile::Constant { value } => value,
            Profile::Step { lo, hi, inside, outside } => {
                if (lo..=hi).contains(&x) {
                    inside
                } else {
                    outside
                }
            }
            Profile::Gaussian { center, width, base, amplitude } => {
                base + amplitude * (-((x - center) / width).powi(2)).exp()
            }
        }
    }

    /// Mean over `[a, b]`: exact for constants and steps, quadrature for
    /// Gaussians.
    pub fn cell_average(&self, a: f64, b: f64) -> f64 {
        match *self {
            Profile::Constant { value } => value,
            Profile::Step { lo, hi, inside, outside } => {
                let overlap = (b.min(hi) - a.max(lo)).max(0.0);
                let frac = overlap / (b - a);
                frac * inside + (1.0 - frac) * outside
            }
            Profile::Gaussian { .. } => average(a, b, |x| self.value(x)),
        }
    }

    fn validate(&self, field: &str) -> Result<()> {
        let finite = match *self {
            Profile::Constant { value } => value.is_finite(),
            Profile::Step { lo, hi, inside, outside } => {
                if !(lo <= hi) {
                    return Err(Error::Config(format!("{field}: step needs lo <= hi")));
                }
                [lo, hi, inside, outside].iter().all(|v| v.is_finite())
            }
            Profile::Gaussian { center, width, base, amplitude } => {
                if !(width > 0.0) {
                    return Err(Error::Config(format!("{field}: gaussian width must be positive")));
                }
                [center, width, base, amplitude].iter().all(|v| v.is_finite())
            }
        };
        if finite {
            Ok(())
        } else {
            Err(Error::Config(format!("{field}: profile parameters must be finite")))
        }
    }
}

/// Initial data as cell averages of per-component profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    /// Profiles of the equilibrium variables; cells start at `E(u)`.
    Equilibrium { components: Vec<Profile> },
    /// Profiles of every state component.
    State { components: Vec<Profile> },
    /// M1 only: a temperature profile at radiative equilibrium. Cell values
    /// are `E(ū)` with `ū` the cell average of `τ + τ⁴`.
    M1Temperature { tau: Profile },
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        match self {
            InitialData::Equilibrium { components } | InitialData::State { components } => {
                for (k, p) in components.iter().enumerate() {
                    p.validate(&format!("initial.components[{k}]"))?;
                }
                Ok(())
            }
            InitialData::M1Temperature { tau } => tau.validate("initial.tau"),
        }
    }

    /// Cell states on `grid`.
    pub fn cells<S: RelaxationSystem + ?Sized>(&self, sys: &S, grid: &Grid1D) -> Result<Vec<Vector>> {
        let bounds: Vec<(f64, f64)> = (0..grid.cells).map(|i| grid.cell_bounds(i)).collect();
        let avg = |ps: &[Profile], a: f64, b: f64| {
            Vector::from_slice(&ps.iter().map(|p| p.cell_average(a, b)).collect::<Vec<_>>())
        };
        let cells = match self {
            InitialData::Equilibrium { components } => {
                if components.len() != sys.eq_dim() {
                    return Err(Error::Config(format!(
                        "initial.components: {} profiles given, model has {} equilibrium variables",
                        components.len(),
                        sys.eq_dim()
                    )));
                }
                bounds.iter().map(|&(a, b)| sys.equilibrium(&avg(components, a, b))).collect::<Result<Vec<_>>>()?
            }
            InitialData::State { components } => {
                if components.len() != sys.dim() {
                    return Err(Error::Config(format!(
                        "initial.components: {} profiles given, model has {} state components",
                        components.len(),
                        sys.dim()
                    )));
                }
                bounds.iter().map(|&(a, b)| avg(components, a, b)).collect()
            }
            InitialData::M1Temperature { tau } => {
                if sys.name() != "m1" {
                    return Err(Error::Config("initial.kind: m1-temperature needs the m1 model".into()));
                }
                bounds
                    .iter()
                    .map(|&(a, b)| {
                        let u = average(a, b, |x| {
                            let t = tau.value(x);
                            t + t.powi(4)
                        });
                        sys.equilibrium(&Vector::from_slice(&[u]))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        if let Some(i) = cells.iter().position(|c| !sys.admissible(c)) {
            return Err(Error::Config(format!("initial: cell {i} is not admissible: {:?}", cells[i])));
        }
        Ok(cells)
    }
}

/// Temperature of an M1 equilibrium variable, re-exported for front ends.
pub fn m1_temperature(u: f64) -> Result<f64> {
    temperature_from_u(u)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub epsilon: f64,
    pub cells: usize,
    pub dx: f64,
    pub x0: f64,
    pub boundary: Boundary,
    pub cfl: f64,
    pub safety: f64,
    pub t_final: f64,
    pub snapshot_times: Vec<f64>,
    pub output: Option<PathBuf>,
    pub seed: u64,
    /// Initial data; the model's default preset data when absent.
    pub initial: Option<InitialData>,
    pub diagnostics_every: usize,
    pub uniform_speed: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelSpec::EulerFriction(Default::default()),
            epsilon: 1e-3,
            cells: 100,
            dx: 0.03,
            x0: 0.0,
            boundary: Boundary::NeumannOutflow,
            cfl: 0.9,
            safety: 1.0,
            t_final: 0.02,
            snapshot_times: Vec::new(),
            output: None,
            seed: 0,
            initial: None,
            diagnostics_every: 1,
            uniform_speed: false,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon: must be positive, got {}", self.epsilon)));
        }
        if self.cells < 3 {
            return Err(Error::Config(format!("cells: need at least 3, got {}", self.cells)));
        }
        if !(self.dx > 0.0 && self.dx.is_finite()) {
            return Err(Error::Config(format!("dx: must be positive, got {}", self.dx)));
        }
        if !self.x0.is_finite() {
            return Err(Error::Config(format!("x0: must be finite, got {}", self.x0)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl: must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.safety >= 1.0 && self.safety.is_finite()) {
            return Err(Error::Config(format!("safety: must be at least 1, got {}", self.safety)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("t_final: must be non-negative, got {}", self.t_final)));
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::Config(format!("snapshot_times: invalid time {t}")));
        }
        if let Some(init) = &self.initial {
            init.validate()?;
        }
        self.model.build()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.cells, self.dx, self.x0, self.boundary)
    }

    pub fn scheme_options(&self) -> SchemeOptions {
        SchemeOptions { safety: self.safety, cfl: self.cfl, uniform_speed: self.uniform_speed }
    }

    pub fn run_control(&self) -> RunControl {
        RunControl {
            t_final: self.t_final,
            snapshot_times: self.snapshot_times.clone(),
            diagnostics_every: self.diagnostics_every.max(1),
        }
    }

    /// The configured initial data, or the default data for the model.
    pub fn initial_data(&self) -> InitialData {
        self.initial.clone().unwrap_or_else(|| crate::presets::default_initial_data(&self.model))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_averages_are_exact() {
        let p = Profile::Step { lo: 1.2, hi: 1.8, inside: 2.0, outside: 1.0 };
        assert_eq!(p.cell_average(0.0, 1.0), 1.0);
        assert_eq!(p.cell_average(1.3, 1.4), 2.0);
        assert!((p.cell_average(1.1, 1.3) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn gaussian_average_converges() {
        let p = Profile::Gaussian { center: 0.5, width: 0.1, base: 0.5, amplitude: 0.4 };
        // ∫ exp(-(x/w)²) over R is w√π.
        let total: f64 = (0..1000).map(|i| p.cell_average(i as f64 * 1e-3, (i + 1) as f64 * 1e-3)).sum::<f64>() * 1e-3;
        assert!((total - (0.5 + 0.4 * 0.1 * std::f64::consts::PI.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn validation_names_the_field() {
        let c = RunConfig { epsilon: 0.0, ..Default::default() };
        assert!(c.validate().unwrap_err().to_string().contains("epsilon"));
        let c = RunConfig { cells: 2, ..Default::default() };
        assert!(c.validate().unwrap_err().to_string().contains("cells"));
        let c = RunConfig { cfl: 1.5, ..Default::default() };
        assert!(c.validate().unwrap_err().to_string().contains("cfl"));
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn json_round_trip() {
        let c = RunConfig { t_final: 0.5, snapshot_times: vec![0.1], ..Default::default() };
        let text = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), c);
        let partial = RunConfig::from_json(r#"{"model": {"name": "m1"}, "epsilon": 0.01}"#).unwrap();
        assert_eq!(partial.model.name(), "m1");
        assert_eq!(partial.cells, 100);
        assert!(RunConfig::from_json(r#"{"epsilonn": 1}"#).is_err());
    }
}
