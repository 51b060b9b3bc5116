//! The diffusion side: first corrector, effective diffusion matrix, and
//! explicit solvers for the limit equations `∂t u = ∂x(M(u) ∂x u)`.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::models::sigma_diffusivity;
use crate::scheme::{par_map, wave_speed, RunControl};
use crate::series::{SeriesKind, Snapshot, SnapshotSeries};
use crate::smallmat::{constrained_solve, constrained_solve_with_left_null, spectral_radius_bound, Matrix, Vector};
use crate::system::{central_jacobian, RelaxationSystem};

/// Step used for `D_u E` by central differences.
pub const EQUILIBRIUM_FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectorResult {
    /// First corrector `U1`.
    pub u1: Vector,
    /// Effective flux `d = −Q A(E(u)) U1`, so that `∂t u = ∂x d`.
    pub effective_flux: Vector,
}

/// Solves for the first corrector given `grad_flux = ∂x F(E(u))`:
/// `B(E(u)) U1 = −grad_flux`, `Q U1 = 0` when `m = 1`, or the model's
/// analytic corrector otherwise.
pub fn corrector<S: RelaxationSystem + ?Sized>(sys: &S, u: &Vector, grad_flux: &Vector) -> Result<CorrectorResult> {
    let q = sys.projector();
    let u1 = match sys.nonlinear_corrector(u, grad_flux) {
        Some(r) => r?,
        None if sys.relaxation_exponent() > 1 => return Err(Error::NotImplemented("nonlinear corrector")),
        None => {
            let b = sys.jac_relax_at_equilibrium(u)?;
            constrained_solve(&b, &q, &(-*grad_flux))?
        }
    };
    let a = sys.jac_flux(&sys.equilibrium(u)?)?;
    let effective_flux = -q.mul_mat(&a).mul_vec(&u1);
    Ok(CorrectorResult { u1, effective_flux })
}

/// `D_u E(u)` by central differences.
pub fn equilibrium_jacobian<S: RelaxationSystem + ?Sized>(sys: &S, u: &Vector, h: f64) -> Result<Matrix> {
    for k in 0..u.len() {
        let step = h * u[k].abs().max(1.0);
        for s in [1.0, -1.0] {
            let mut p = *u;
            p[k] += s * step;
            sys.equilibrium(&p)?;
        }
    }
    Ok(central_jacobian(u, h, |v| sys.equilibrium(v).expect("checked above")))
}

/// `M(u) = Q A L^{-1} D²Φ A D_uE` with `L = D²Φ B`, all evaluated at
/// `E(u)`. Columns of `L^{-1}(·)` come from constrained solves whose left
/// null space is spanned by `Q (D²Φ)^{-1}`.
pub fn effective_diffusion_matrix<S: RelaxationSystem + ?Sized>(sys: &S, u: &Vector, h: f64) -> Result<Matrix> {
    if sys.relaxation_exponent() != 1 {
        return Err(Error::NotImplemented("effective diffusion matrix for m > 1"));
    }
    let eq = sys.equilibrium(u)?;
    let hess = sys.entropy_hessian(&eq).ok_or(Error::NotAvailable("entropy"))?;
    let q = sys.projector();
    let a = sys.jac_flux(&eq)?;
    let b = sys.jac_relax_at_equilibrium(u)?;
    let l = hess.mul_mat(&b);
    let left_null = q.mul_mat(&hess.inverse()?);
    let due = equilibrium_jacobian(sys, u, h)?;
    let rhs = hess.mul_mat(&a).mul_mat(&due);
    let s = q.mul_mat(&a);
    let mut cols = Vec::with_capacity(u.len());
    for k in 0..u.len() {
        cols.push(constrained_solve_with_left_null(&l, &left_null, &q, &rhs.column(k))?);
    }
    Ok(s.mul_mat(&Matrix::from_columns(&cols)))
}

/// The quadratic form `v^T S L^{-1} S^T v` (with `S = Q A(E(u))`), written
/// as `−v^T S U1` where `U1` is the corrector driven by
/// `grad_flux = (D²Φ)^{-1} S^T v`. For `m > 1` the model's nonlinear
/// corrector is used.
pub fn dissipativity_check<S: RelaxationSystem + ?Sized>(sys: &S, u: &Vector, v: &Vector) -> Result<f64> {
    let eq = sys.equilibrium(u)?;
    let hess = sys.entropy_hessian(&eq).ok_or(Error::NotAvailable("entropy"))?;
    let s = sys.projector().mul_mat(&sys.jac_flux(&eq)?);
    let g = hess.inverse()?.mul_vec(&s.transpose().mul_vec(v));
    let c = corrector(sys, u, &g)?;
    Ok(-v.dot(&s.mul_vec(&c.u1)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionField {
    pub values: Vec<Vector>,
    pub time: f64,
}

/// How interface diffusivities are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitSolver {
    /// The analytic limit diffusivity of the model.
    Reference,
    /// The diffusivity implied by the scheme's `σ` at equilibrium states;
    /// this is the exact small-ε limit of the scheme. `safety` is passed
    /// to the wave-speed estimate.
    DiscreteAp { safety: f64 },
}

fn interface_matrices<S: RelaxationSystem + ?Sized>(
    sys: &S,
    grid: &Grid1D,
    values: &[Vector],
    solver: LimitSolver,
) -> Result<Vec<Matrix>> {
    for (i, u) in values.iter().enumerate() {
        if !sys.reduced_admissible(u) {
            return Err(Error::Domain(format!("cell {i}: {u:?} is outside the admissible set")));
        }
    }
    let ext = grid.with_ghosts(values);
    match solver {
        LimitSolver::Reference => par_map(ext.len() - 1, |j| sys.interface_diffusivity(&ext[j], &ext[j + 1], grid.dx)),
        LimitSolver::DiscreteAp { safety } => {
            let eqs = ext.iter().map(|u| sys.equilibrium(u)).collect::<Result<Vec<_>>>()?;
            let q = sys.projector();
            par_map(ext.len() - 1, |j| {
                let (l, r) = (&eqs[j], &eqs[j + 1]);
                let b = wave_speed(sys, l, r, safety)?;
                let sigma = sys.sigma(l, r, b, grid.dx)?;
                sigma_diffusivity(&q, &sigma, b, sys.stiffness())
            })
        }
    }
}

fn max_stable_dt(dx: f64, ms: &[Matrix]) -> f64 {
    let d = ms.iter().map(spectral_radius_bound).fold(0.0, f64::max);
    if d > 0.0 {
        dx * dx / (2.0 * d)
    } else {
        f64::INFINITY
    }
}

fn conservative_step<S: RelaxationSystem + ?Sized>(
    sys: &S,
    grid: &Grid1D,
    field: &DiffusionField,
    ms: &[Matrix],
    dt: f64,
) -> Result<DiffusionField> {
    let bound = max_stable_dt(grid.dx, ms);
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::Stability { dt, bound });
    }
    let ext = grid.with_ghosts(&field.values);
    let lam = dt / (grid.dx * grid.dx);
    let values: Vec<Vector> = (0..field.values.len())
        .map(|i| {
            let u = ext[i + 1];
            let up = ms[i + 1].mul_vec(&(ext[i + 2] - u));
            let down = ms[i].mul_vec(&(u - ext[i]));
            u + (up - down).scale(lam)
        })
        .collect();
    if let Some(i) = values.iter().position(|u| !sys.reduced_admissible(u)) {
        return Err(Error::Domain(format!("cell {i} left the admissible set: {:?}", values[i])));
    }
    Ok(DiffusionField { values, time: field.time + dt })
}

/// One explicit step
/// `u_i += Δt/Δx² [M₊(u_{i+1} − u_i) − M₋(u_i − u_{i−1})]` with the
/// model's limit diffusivity.
pub fn diffusion_reference_step<S: RelaxationSystem + ?Sized>(
    sys: &S,
    grid: &Grid1D,
    field: &DiffusionField,
    dt: f64,
) -> Result<DiffusionField> {
    let ms = interface_matrices(sys, grid, &field.values, LimitSolver::Reference)?;
    conservative_step(sys, grid, field, &ms, dt)
}

/// One step of the small-ε limit of the scheme, with `M_{i+½}` read off
/// the scheme's `σ` through `Q(I+σ)^{-1} = (γ̂/b²) M Q`.
pub fn discrete_ap_limit_step<S: RelaxationSystem + ?Sized>(
    sys: &S,
    grid: &Grid1D,
    field: &DiffusionField,
    dt: f64,
    safety: f64,
) -> Result<DiffusionField> {
    let ms = interface_matrices(sys, grid, &field.values, LimitSolver::DiscreteAp { safety })?;
    conservative_step(sys, grid, field, &ms, dt)
}

/// Explicit integrator for a limit equation.
pub struct LimitRunner<'a, S: RelaxationSystem + ?Sized> {
    pub sys: &'a S,
    pub grid: Grid1D,
    pub solver: LimitSolver,
    /// Fraction of the parabolic bound used for `Δt`.
    pub cfl: f64,
}

impl<'a, S: RelaxationSystem + ?Sized> LimitRunner<'a, S> {
    pub fn new(sys: &'a S, grid: Grid1D, solver: LimitSolver, cfl: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(Error::Config(format!("cfl: must lie in (0, 1], got {cfl}")));
        }
        Ok(LimitRunner { sys, grid, solver, cfl })
    }

    /// Advances by exactly `dt`.
    pub fn step(&self, field: &DiffusionField, dt: f64) -> Result<DiffusionField> {
        let ms = interface_matrices(self.sys, &self.grid, &field.values, self.solver)?;
        conservative_step(self.sys, &self.grid, field, &ms, dt)
    }

    /// Advances `initial` (equilibrium variables) to `control.t_final`.
    pub fn run(&self, initial: Vec<Vector>, control: &RunControl) -> Result<SnapshotSeries> {
        if initial.len() != self.grid.cells {
            return Err(Error::GridMismatch(format!("{} values on a {}-cell grid", initial.len(), self.grid.cells)));
        }
        let labels = self.sys.reduced_names().iter().map(|s| s.to_string()).collect();
        let mut series = SnapshotSeries::new(self.sys.name(), SeriesKind::Reduced, self.grid, labels);
        series.meta.insert("solver".into(), match self.solver {
            LimitSolver::Reference => "reference".into(),
            LimitSolver::DiscreteAp { .. } => "discrete-ap-limit".into(),
        });
        let mut field = DiffusionField { values: initial, time: 0.0 };
        interface_matrices(self.sys, &self.grid, &field.values, self.solver)?;
        series.snapshots.push(Snapshot { time: 0.0, values: field.values.clone() });
        let mut step = 0usize;
        for target in control.targets() {
            while field.time < target {
                let wrap = |e: Error, t: f64| Error::Step { step: step + 1, time: t, source: Box::new(e) };
                let ms = interface_matrices(self.sys, &self.grid, &field.values, self.solver)
                    .map_err(|e| wrap(e, field.time))?;
                let remaining = target - field.time;
                let dt = (self.cfl * max_stable_dt(self.grid.dx, &ms)).min(remaining);
                let mut next = conservative_step(self.sys, &self.grid, &field, &ms, dt).map_err(|e| wrap(e, field.time))?;
                if dt >= remaining {
                    next.time = target;
                }
                field = next;
                step += 1;
            }
            series.snapshots.push(Snapshot { time: target, values: field.values.clone() });
        }
        Ok(series)
    }
}
