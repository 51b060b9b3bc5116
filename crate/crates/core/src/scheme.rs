//! HLL solver and the asymptotic-preserving Godunov-type scheme.
//!
//! Time is the physical time `t` of `ε∂tU + ∂xF(U) = −R(U)/ε^m`. With
//! `α^ε = (εI + (γ̂Δx/2b)(I+σ))^{-1}` at each interface, one step reads
//!
//! ```text
//! U_i ← U_i − (Δt/Δx)(α^ε₊(F₊ − F_i) − α^ε₋(F₋ − F_i)) − (Δt/2ε^m)(α^ε₊ + α^ε₋)R(U_i)
//! ```
//!
//! where `F±` are HLL fluxes with speed `b`. The CFL contract is
//! `bΔt/(εΔx) ≤ 1/2`.

use crate::diagnostics::{momentum_max, total_entropy};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::series::{SeriesKind, Snapshot, SnapshotSeries, StepRecord};
use crate::smallmat::{spectral_radius_bound, Matrix, Vector};
use crate::system::RelaxationSystem;

/// Smallest admissible wave speed.
pub const B_MIN: f64 = 1e-8;

/// Doublings of `b` attempted to keep `U ± F(U)/b` admissible.
pub const MAX_DOUBLINGS: usize = 10;

/// Relative slack on the CFL contract, absorbing rounding in `Δt`.
const CFL_SLACK: f64 = 1e-12;

/// Cell count above which a step is spread over worker threads.
#[cfg(feature = "parallel")]
const PARALLEL_THRESHOLD: usize = 4096;

/// `Ũ* = ½(U_L + U_R) − (F(U_R) − F(U_L))/(2b)`.
pub fn hll_intermediate<S: RelaxationSystem + ?Sized>(sys: &S, ul: &Vector, ur: &Vector, b: f64) -> Vector {
    hll_intermediate_with(ul, ur, &sys.flux(ul), &sys.flux(ur), b)
}

fn hll_intermediate_with(ul: &Vector, ur: &Vector, fl: &Vector, fr: &Vector, b: f64) -> Vector {
    (*ul + *ur).scale(0.5) - (*fr - *fl).scale(0.5 / b)
}

/// `F^HLL = ½(F(U_L) + F(U_R)) − (b/2)(U_R − U_L)`.
pub fn hll_flux<S: RelaxationSystem + ?Sized>(sys: &S, ul: &Vector, ur: &Vector, b: f64) -> Vector {
    hll_flux_with(ul, ur, &sys.flux(ul), &sys.flux(ur), b)
}

fn hll_flux_with(ul: &Vector, ur: &Vector, fl: &Vector, fr: &Vector, b: f64) -> Vector {
    (*fl + *fr).scale(0.5) - (*ur - *ul).scale(0.5 * b)
}

/// `safety · ρ(A(U))`, floored by the model's minimum speed.
fn cell_speed<S: RelaxationSystem + ?Sized>(sys: &S, u: &Vector, safety: f64) -> Result<f64> {
    let a = sys.jac_flux(u)?;
    Ok((safety * spectral_radius_bound(&a)).max(sys.wave_speed_floor()).max(B_MIN))
}

/// Doubles `b` until `U ± F(U)/b` is admissible for every given state.
fn widen_speed<S: RelaxationSystem + ?Sized>(sys: &S, states: &[(&Vector, &Vector)], mut b: f64) -> Result<f64> {
    for _ in 0..=MAX_DOUBLINGS {
        let ok = states.iter().all(|(u, f)| {
            let d = f.scale(1.0 / b);
            sys.admissible(&(**u + d)) && sys.admissible(&(**u - d))
        });
        if ok {
            return Ok(b);
        }
        b *= 2.0;
    }
    Err(Error::Admissibility {
        cell: None,
        detail: format!("U ± F(U)/b stays inadmissible after {MAX_DOUBLINGS} doublings of b"),
    })
}

/// Interface speed `b` for the pair `(U_L, U_R)`.
pub fn wave_speed<S: RelaxationSystem + ?Sized>(sys: &S, ul: &Vector, ur: &Vector, safety: f64) -> Result<f64> {
    let b = cell_speed(sys, ul, safety)?.max(cell_speed(sys, ur, safety)?);
    let (fl, fr) = (sys.flux(ul), sys.flux(ur));
    widen_speed(sys, &[(ul, &fl), (ur, &fr)], b)
}

/// `α` and `α^ε = α/ε` at one interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha {
    pub alpha: Matrix,
    pub alpha_eps: Matrix,
}

/// `α^ε = (εI + (γ̂Δx/2b)(I+σ))^{-1}` and `α = εα^ε`.
pub fn alpha_matrix(sigma: &Matrix, dx: f64, eps: f64, b: f64, stiffness: f64) -> Result<Alpha> {
    let n = sigma.rows();
    let c = stiffness * dx / (2.0 * b);
    let m = Matrix::scalar(n, eps) + (Matrix::identity(n) + *sigma).scale(c);
    let alpha_eps = m.inverse()?;
    Ok(Alpha { alpha: alpha_eps.scale(eps), alpha_eps })
}

/// Intermediate states of the modified Riemann solver:
/// `U*_L = αŨ* + (I−α)(U_L − R̄(U_L))`, `U*_R = αŨ* + (I−α)(U_R − R̄(U_R))`
/// with `R̄ = s (I+σ)^{-1} R` and `s` the source scale.
pub fn interface_states<S: RelaxationSystem + ?Sized>(
    sys: &S,
    ul: &Vector,
    ur: &Vector,
    u_tilde: &Vector,
    alpha: &Matrix,
    sigma: &Matrix,
    source_scale: f64,
) -> Result<(Vector, Vector)> {
    let n = sigma.rows();
    let inv = (Matrix::identity(n) + *sigma).inverse()?;
    let rbar = |u: &Vector| {
        if source_scale == 0.0 {
            Vector::zeros(n)
        } else {
            inv.mul_vec(&sys.relax(u)).scale(source_scale)
        }
    };
    let rest = Matrix::identity(n) - *alpha;
    let core = alpha.mul_vec(u_tilde);
    let left = core + rest.mul_vec(&(*ul - rbar(ul)));
    let right = core + rest.mul_vec(&(*ur - rbar(ur)));
    Ok((left, right))
}

/// `cfl · min(εΔx/(2 b_max), Δx²/(2 D_max))`; the parabolic branch is
/// skipped when `D_max = 0`.
pub fn dt_bound(eps: f64, dx: f64, b_max: f64, d_max: f64, cfl: f64) -> f64 {
    let hyperbolic = eps * dx / (2.0 * b_max);
    let parabolic = if d_max > 0.0 { dx * dx / (2.0 * d_max) } else { f64::INFINITY };
    cfl * hyperbolic.min(parabolic)
}

/// Cached data at interface `j`, between cells `j − 1` and `j` (with ghost
/// cells at `−1` and `I`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceData {
    pub b: f64,
    pub sigma: Matrix,
    pub alpha_eps: Matrix,
    pub flux: Vector,
    /// Spectral bound of the diffusivity induced by `σ` in the small-ε
    /// limit; zero for systems without relaxation.
    pub diffusivity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeState {
    pub cells: Vec<Vector>,
    pub time: f64,
    pub step: usize,
    pub dt: f64,
    pub interfaces: Vec<InterfaceData>,
}

impl SchemeState {
    pub fn new(cells: Vec<Vector>) -> Self {
        SchemeState { cells, time: 0.0, step: 0, dt: 0.0, interfaces: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeOptions {
    /// Multiplier `≥ 1` on the spectral bound when choosing `b`.
    pub safety: f64,
    /// `Δt` as a fraction of the admissible bound, in `(0, 1]`.
    pub cfl: f64,
    /// Use a single `b` (the maximum over interfaces) for the whole step.
    pub uniform_speed: bool,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        SchemeOptions { safety: 1.0, cfl: 0.9, uniform_speed: false }
    }
}

/// Time loop control for [`ApScheme::run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunControl {
    pub t_final: f64,
    /// Extra snapshot times; `0` and `t_final` are always included.
    pub snapshot_times: Vec<f64>,
    /// Record entropy and momentum every this many steps (and at the end).
    pub diagnostics_every: usize,
}

impl RunControl {
    pub fn new(t_final: f64) -> Self {
        RunControl { t_final, snapshot_times: Vec::new(), diagnostics_every: 1 }
    }

    /// Sorted, deduplicated snapshot times in `(0, t_final]`.
    pub(crate) fn targets(&self) -> Vec<f64> {
        let mut t: Vec<f64> =
            self.snapshot_times.iter().copied().filter(|&s| s > 0.0 && s < self.t_final).collect();
        if self.t_final > 0.0 {
            t.push(self.t_final);
        }
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }
}

/// The scheme bound to a model, a grid and a value of `ε`.
pub struct ApScheme<'a, S: RelaxationSystem + ?Sized> {
    pub sys: &'a S,
    pub grid: Grid1D,
    pub eps: f64,
    pub options: SchemeOptions,
    q: Matrix,
    q_pinv: Matrix,
    eps_m: f64,
}

impl<'a, S: RelaxationSystem + ?Sized> ApScheme<'a, S> {
    pub fn new(sys: &'a S, grid: Grid1D, eps: f64, options: SchemeOptions) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Config(format!("epsilon: must be positive, got {eps}")));
        }
        if !(options.cfl > 0.0 && options.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl: must lie in (0, 1], got {}", options.cfl)));
        }
        if !(options.safety >= 1.0 && options.safety.is_finite()) {
            return Err(Error::Config(format!("safety: must be at least 1, got {}", options.safety)));
        }
        let q = sys.projector();
        let qt = q.transpose();
        let q_pinv = qt.mul_mat(&q.mul_mat(&qt).inverse()?);
        let eps_m = eps.powi(sys.relaxation_exponent() as i32);
        Ok(ApScheme { sys, grid, eps, options, q, q_pinv, eps_m })
    }

    /// Checks admissibility, then assembles `b`, `σ`, `α^ε`, the HLL flux
    /// and the induced diffusivity at every interface.
    pub fn prepare(&self, cells: &[Vector]) -> Result<Vec<InterfaceData>> {
        if cells.len() != self.grid.cells {
            return Err(Error::GridMismatch(format!("{} cells on a {}-cell grid", cells.len(), self.grid.cells)));
        }
        for (i, c) in cells.iter().enumerate() {
            if !self.sys.admissible(c) {
                return Err(Error::Admissibility { cell: Some(i), detail: format!("{c:?}") });
            }
        }
        let ext = self.grid.with_ghosts(cells);
        let fluxes: Vec<Vector> = ext.iter().map(|u| self.sys.flux(u)).collect();
        let speeds = par_map(ext.len(), |k| cell_speed(self.sys, &ext[k], self.options.safety))?;
        let mut b: Vec<f64> = par_map(ext.len() - 1, |j| {
            widen_speed(
                self.sys,
                &[(&ext[j], &fluxes[j]), (&ext[j + 1], &fluxes[j + 1])],
                speeds[j].max(speeds[j + 1]),
            )
        })?;
        if self.options.uniform_speed {
            let bmax = b.iter().copied().fold(0.0, f64::max);
            b.iter_mut().for_each(|x| *x = bmax);
        }
        let stiffness = self.sys.stiffness();
        par_map(ext.len() - 1, |j| {
            let (ul, ur) = (&ext[j], &ext[j + 1]);
            let sigma = self.sys.sigma(ul, ur, b[j], self.grid.dx)?;
            let a = alpha_matrix(&sigma, self.grid.dx, self.eps, b[j], stiffness)?;
            let diffusivity = if stiffness > 0.0 {
                let n = sigma.rows();
                let inv = (Matrix::identity(n) + sigma).inverse()?;
                let m = self.q.mul_mat(&inv).mul_mat(&self.q_pinv).scale(b[j] * b[j] / stiffness);
                spectral_radius_bound(&m)
            } else {
                0.0
            };
            Ok(InterfaceData {
                b: b[j],
                sigma,
                alpha_eps: a.alpha_eps,
                flux: hll_flux_with(ul, ur, &fluxes[j], &fluxes[j + 1], b[j]),
                diffusivity,
            })
        })
    }

    /// Largest `Δt` allowed by the hyperbolic and parabolic bounds.
    pub fn stable_dt(&self, interfaces: &[InterfaceData]) -> f64 {
        let b_max = interfaces.iter().map(|d| d.b).fold(0.0, f64::max);
        let d_max = interfaces.iter().map(|d| d.diffusivity).fold(0.0, f64::max);
        dt_bound(self.eps, self.grid.dx, b_max, d_max, self.options.cfl)
    }

    /// [`Self::stable_dt`] clamped to the remaining time.
    pub fn compute_dt(&self, interfaces: &[InterfaceData], remaining: f64) -> f64 {
        self.stable_dt(interfaces).min(remaining)
    }

    fn check_cfl(&self, interfaces: &[InterfaceData], dt: f64) -> Result<()> {
        let b_max = interfaces.iter().map(|d| d.b).fold(0.0, f64::max);
        let bound = self.eps * self.grid.dx / (2.0 * b_max);
        if !(dt > 0.0) || dt > bound * (1.0 + CFL_SLACK) {
            return Err(Error::CflViolation { dt, bound });
        }
        Ok(())
    }

    fn finish(&self, state: &mut SchemeState, next: Vec<Vector>, interfaces: Vec<InterfaceData>, dt: f64) -> Result<()> {
        if let Some(i) = next.iter().position(|c| !self.sys.admissible(c)) {
            return Err(Error::Admissibility { cell: Some(i), detail: format!("{:?} after update", next[i]) });
        }
        state.cells = next;
        state.interfaces = interfaces;
        state.time += dt;
        state.step += 1;
        state.dt = dt;
        Ok(())
    }

    /// One step of the flux form.
    pub fn step(&self, state: &mut SchemeState, dt: f64) -> Result<()> {
        let interfaces = self.prepare(&state.cells)?;
        self.step_prepared(state, interfaces, dt)
    }

    /// As [`Self::step`] with interface data from [`Self::prepare`].
    pub fn step_prepared(&self, state: &mut SchemeState, interfaces: Vec<InterfaceData>, dt: f64) -> Result<()> {
        self.check_cfl(&interfaces, dt)?;
        let lam = dt / self.grid.dx;
        let src = dt / (2.0 * self.eps_m);
        let cells = &state.cells;
        let next = par_map(cells.len(), |i| {
            let u = cells[i];
            let (lo, hi) = (&interfaces[i], &interfaces[i + 1]);
            let f = self.sys.flux(&u);
            let transport = hi.alpha_eps.mul_vec(&(hi.flux - f)) - lo.alpha_eps.mul_vec(&(lo.flux - f));
            let mut out = u - transport.scale(lam);
            if self.sys.stiffness() > 0.0 {
                let r = self.sys.relax(&u);
                out -= (hi.alpha_eps + lo.alpha_eps).mul_vec(&r).scale(src);
            }
            Ok(out)
        })?;
        self.finish(state, next, interfaces, dt)
    }

    /// One step written as the cell average of juxtaposed Riemann
    /// solutions,
    /// `U_i ← λ₋U*_R(i−½) + (1 − λ₋ − λ₊)U_i + λ₊U*_L(i+½)` with
    /// `λ = bΔt/(εΔx)`, where `U*_R(i−½)` is the right intermediate state of
    /// the left interface.
    pub fn step_integral_form(&self, state: &mut SchemeState, dt: f64) -> Result<()> {
        let interfaces = self.prepare(&state.cells)?;
        self.check_cfl(&interfaces, dt)?;
        let ext = self.grid.with_ghosts(&state.cells);
        let stiffness = self.sys.stiffness();
        let scale = if stiffness > 0.0 { 1.0 / (stiffness * self.eps_m / self.eps) } else { 0.0 };
        let stars = par_map(interfaces.len(), |j| {
            let d = &interfaces[j];
            let (ul, ur) = (&ext[j], &ext[j + 1]);
            let tilde = hll_intermediate(self.sys, ul, ur, d.b);
            let alpha = d.alpha_eps.scale(self.eps);
            interface_states(self.sys, ul, ur, &tilde, &alpha, &d.sigma, scale)
        })?;
        let next: Vec<Vector> = (0..state.cells.len())
            .map(|i| {
                let lm = interfaces[i].b * dt / (self.eps * self.grid.dx);
                let lp = interfaces[i + 1].b * dt / (self.eps * self.grid.dx);
                stars[i].1.scale(lm) + state.cells[i].scale(1.0 - lm - lp) + stars[i + 1].0.scale(lp)
            })
            .collect();
        self.finish(state, next, interfaces, dt)
    }

    fn record(&self, state: &SchemeState) -> StepRecord {
        StepRecord {
            step: state.step,
            time: state.time,
            dt: state.dt,
            entropy: total_entropy(self.sys, &state.cells, self.grid.dx).ok(),
            momentum_max: momentum_max(self.sys, &state.cells).ok(),
        }
    }

    /// Advances `initial` to `control.t_final`.
    pub fn run(&self, initial: Vec<Vector>, control: &RunControl) -> Result<SnapshotSeries> {
        self.run_with(initial, control, |_| {})
    }

    /// As [`Self::run`], calling `observe` after every step.
    pub fn run_with<F: FnMut(&SchemeState)>(
        &self,
        initial: Vec<Vector>,
        control: &RunControl,
        mut observe: F,
    ) -> Result<SnapshotSeries> {
        if !(control.t_final >= 0.0 && control.t_final.is_finite()) {
            return Err(Error::Config(format!("t_final: must be non-negative, got {}", control.t_final)));
        }
        let labels = self.sys.component_names().iter().map(|s| s.to_string()).collect();
        let mut series = SnapshotSeries::new(self.sys.name(), SeriesKind::State, self.grid, labels);
        series.meta.insert("epsilon".into(), crate::series::fmt_num(self.eps));
        series.meta.insert("cfl".into(), crate::series::fmt_num(self.options.cfl));
        series.meta.insert("safety".into(), crate::series::fmt_num(self.options.safety));
        let mut state = SchemeState::new(initial);
        state.interfaces = self.prepare(&state.cells)?;
        series.snapshots.push(Snapshot { time: 0.0, values: state.cells.clone() });
        series.steps.push(self.record(&state));
        let every = control.diagnostics_every.max(1);
        for target in control.targets() {
            while state.time < target {
                let wrap = |e: Error, st: &SchemeState| Error::Step { step: st.step + 1, time: st.time, source: Box::new(e) };
                let interfaces = std::mem::take(&mut state.interfaces);
                let interfaces = if interfaces.is_empty() { self.prepare(&state.cells) } else { Ok(interfaces) }
                    .map_err(|e| wrap(e, &state))?;
                let remaining = target - state.time;
                let dt = self.compute_dt(&interfaces, remaining);
                let hits = dt >= remaining;
                self.step_prepared(&mut state, interfaces, dt).map_err(|e| wrap(e, &state))?;
                if hits {
                    state.time = target;
                }
                state.interfaces = if state.time < control.t_final {
                    self.prepare(&state.cells).map_err(|e| wrap(e, &state))?
                } else {
                    Vec::new()
                };
                if state.step.is_multiple_of(every) || state.time >= control.t_final {
                    series.steps.push(self.record(&state));
                }
                observe(&state);
            }
            series.snapshots.push(Snapshot { time: target, values: state.cells.clone() });
        }
        Ok(series)
    }
}

/// Wraps a model with its relaxation switched off: `R ≡ 0`, `σ ≡ 0` and
/// `γ̂ = 0`, under which the scheme is the plain HLL scheme.
pub struct Homogeneous<'a, S: RelaxationSystem + ?Sized>(pub &'a S);

impl<S: RelaxationSystem + ?Sized> RelaxationSystem for Homogeneous<'_, S> {
    fn name(&self) -> &'static str {
        self.0.name()
    }
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eq_dim(&self) -> usize {
        self.0.eq_dim()
    }
    fn component_names(&self) -> Vec<&'static str> {
        self.0.component_names()
    }
    fn reduced_names(&self) -> Vec<&'static str> {
        self.0.reduced_names()
    }
    fn flux(&self, state: &Vector) -> Vector {
        self.0.flux(state)
    }
    fn relax(&self, state: &Vector) -> Vector {
        Vector::zeros(state.len())
    }
    fn projector(&self) -> Matrix {
        self.0.projector()
    }
    fn equilibrium(&self, u: &Vector) -> Result<Vector> {
        self.0.equilibrium(u)
    }
    fn jac_flux(&self, state: &Vector) -> Result<Matrix> {
        self.0.jac_flux(state)
    }
    fn entropy(&self, state: &Vector) -> Option<f64> {
        self.0.entropy(state)
    }
    fn stiffness(&self) -> f64 {
        0.0
    }
    fn sigma(&self, left: &Vector, _right: &Vector, _b: f64, _dx: f64) -> Result<Matrix> {
        Ok(Matrix::zeros(left.len(), left.len()))
    }
    fn admissible(&self, state: &Vector) -> bool {
        self.0.admissible(state)
    }
    fn reduced_admissible(&self, u: &Vector) -> bool {
        self.0.reduced_admissible(u)
    }
    fn wave_speed_floor(&self) -> f64 {
        self.0.wave_speed_floor()
    }
    fn interface_diffusivity(&self, left: &Vector, right: &Vector, dx: f64) -> Result<Matrix> {
        self.0.interface_diffusivity(left, right, dx)
    }
    fn sample_state(&self, rng: &mut dyn rand::RngCore) -> Vector {
        self.0.sample_state(rng)
    }
    fn sample_reduced(&self, rng: &mut dyn rand::RngCore) -> Vector {
        self.0.sample_reduced(rng)
    }
}

/// Maps `f` over `0..n`, in parallel for large `n` when the `parallel`
/// feature is enabled. The first error in index order is returned.
pub(crate) fn par_map<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if n >= PARALLEL_THRESHOLD {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}
