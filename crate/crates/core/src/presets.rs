//! Named experiments: a run configuration plus the grid refinement of the
//! accompanying limit-equation reference run.

use crate::config::{InitialData, Profile, RunConfig};
use crate::error::{Error, Result};
use crate::models::{CoupledParams, EulerFrictionParams, M1Params, ModelSpec, ShallowWaterParams};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPreset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: RunConfig,
    /// The reference run uses `config.cells * reference_refinement` cells.
    pub reference_refinement: usize,
}

fn euler_double_step() -> InitialData {
    InitialData::Equilibrium {
        components: vec![Profile::Step { lo: 1.2, hi: 1.8, inside: 2.0, outside: 1.0 }],
    }
}

fn coupled_bump() -> InitialData {
    InitialData::Equilibrium {
        components: vec![
            Profile::Constant { value: 0.2 },
            Profile::Step { lo: 0.45, hi: 0.55, inside: 1.5, outside: 1.0 },
        ],
    }
}

fn m1_gaussian() -> InitialData {
    InitialData::M1Temperature { tau: Profile::Gaussian { center: 0.5, width: 0.1, base: 0.5, amplitude: 0.4 } }
}

fn water_step() -> InitialData {
    InitialData::Equilibrium {
        components: vec![Profile::Step { lo: f64::MIN, hi: 0.5, inside: 2.0, outside: 1.0 }],
    }
}

/// Initial data used when a configuration does not specify any.
pub fn default_initial_data(model: &ModelSpec) -> InitialData {
    match model {
        ModelSpec::EulerFriction(_) => euler_double_step(),
        ModelSpec::M1(_) => m1_gaussian(),
        ModelSpec::CoupledEulerM1(_) => coupled_bump(),
        ModelSpec::ShallowWater(_) => water_step(),
    }
}

/// All presets, in display order.
pub fn presets() -> Vec<ExperimentPreset> {
    let euler = ModelSpec::EulerFriction(EulerFrictionParams { eta: 2.0, c_p: 1.0 });
    vec![
        ExperimentPreset {
            name: "euler-friction-paper",
            description: "Euler with friction, p = ρ², double step on [1.2, 1.8]; 300 cells, Δx = 0.01",
            config: RunConfig {
                model: euler.clone(),
                epsilon: 1e-3,
                cells: 300,
                dx: 0.01,
                t_final: 0.02,
                initial: Some(euler_double_step()),
                ..Default::default()
            },
            reference_refinement: 2,
        },
        ExperimentPreset {
            name: "euler-friction-desk",
            description: "Euler with friction, p = ρ², double step on [1.2, 1.8]; 100 cells on [0, 3]",
            config: RunConfig {
                model: euler,
                epsilon: 1e-3,
                cells: 100,
                dx: 0.03,
                t_final: 0.02,
                initial: Some(euler_double_step()),
                ..Default::default()
            },
            reference_refinement: 2,
        },
        ExperimentPreset {
            name: "coupled-paper",
            description: "Euler/M1 coupling, ρ = 0.2, e = 1.5 on [0.45, 0.55] else 1; κ = 2, σ = 1, p = 1e-3 ρ²",
            config: RunConfig {
                model: ModelSpec::CoupledEulerM1(CoupledParams::default()),
                epsilon: 1e-3,
                cells: 100,
                dx: 0.01,
                t_final: 0.02,
                initial: Some(coupled_bump()),
                ..Default::default()
            },
            reference_refinement: 2,
        },
        ExperimentPreset {
            name: "m1-gaussian",
            description: "M1 radiative transfer, Gaussian temperature bump at equilibrium",
            config: RunConfig {
                model: ModelSpec::M1(M1Params {}),
                epsilon: 1e-4,
                cells: 100,
                dx: 0.01,
                t_final: 0.01,
                initial: Some(m1_gaussian()),
                ..Default::default()
            },
            reference_refinement: 2,
        },
        ExperimentPreset {
            name: "shallow-water-step",
            description: "Shallow water with strong friction, h = 2 left of 0.5 and 1 right of it",
            config: RunConfig {
                model: ModelSpec::ShallowWater(ShallowWaterParams { g: 1.0, kappa0: 1.0, delta: 1e-3 }),
                epsilon: 1e-3,
                cells: 100,
                dx: 0.01,
                t_final: 0.01,
                initial: Some(water_step()),
                ..Default::default()
            },
            reference_refinement: 2,
        },
    ]
}

pub fn preset_names() -> Vec<&'static str> {
    presets().iter().map(|p| p.name).collect()
}

pub fn preset(name: &str) -> Result<ExperimentPreset> {
    presets().into_iter().find(|p| p.name == name).ok_or_else(|| {
        Error::Config(format!("preset: unknown preset '{name}' (available: {})", preset_names().join(", ")))
    })
}
