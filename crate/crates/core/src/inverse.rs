//! Inverse-problem machinery: stability ratios for the source and potential
//! problems, the observation-misfit functional with its exact
//! discretise-then-optimise adjoint gradient, projected-gradient recovery of
//! the potential under a box constraint, and the data filtering check.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::carleman::{WeightMode, WeightParams};
use crate::error::{Error, Result};
use crate::fmath;
use crate::grid::{Domain, Grid1D, LpNorm, NodeFn};
use crate::stencil;
use crate::time::{self, TimeAxis};
use crate::wave::{self, ObservationPair, ProblemData, Trajectory, WaveProblem};

/// Source-problem setup: unknown spatial factor `f`, known time-space factor
/// `r_field` and potential `q`. The constructor measures and records the
/// bounds the stability theory consumes.
#[derive(Debug, Clone)]
pub struct SourceSetup {
    grid: Grid1D,
    axis: TimeAxis,
    f: NodeFn,
    r_field: Vec<NodeFn>,
    q: NodeFn,
    /// H1-in-time, sup-in-space size of `r_field`.
    k_bound: f64,
    /// Positivity floor `inf_j |R_j(0)|`.
    r_floor: f64,
    /// Box bound satisfied by the potential.
    m_bound: f64,
}

impl SourceSetup {
    pub fn new(
        grid: Grid1D,
        axis: TimeAxis,
        f: NodeFn,
        r_field: Vec<NodeFn>,
        q: NodeFn,
        m_bound: f64,
    ) -> Result<Self> {
        if r_field.len() != axis.num_points() {
            return Err(Error::Dimension(format!(
                "time factor needs {} slices, got {}",
                axis.num_points(),
                r_field.len()
            )));
        }
        let q_norm = q.norm(LpNorm::Infinity, Domain::Open);
        if q_norm > m_bound {
            return Err(Error::Parameter(format!(
                "||q||_inf = {q_norm} exceeds the box bound m = {m_bound}"
            )));
        }
        let r_floor = (1..=grid.n())
            .map(|j| r_field[0].at(j).abs())
            .fold(f64::MAX, f64::min);
        if !(r_floor > 0.0) {
            return Err(Error::Parameter(
                "positivity floor inf_j |R_j(0)| must be strictly positive".into(),
            ));
        }
        // H1(0,T; sup_j) norm of the time factor, trapezoid in time
        let sup_series: Vec<f64> = r_field
            .iter()
            .map(|s| s.norm(LpNorm::Infinity, Domain::Open))
            .collect();
        let per_node_dt: Vec<Vec<f64>> = (1..=grid.n())
            .map(|j| {
                let series: Vec<f64> = r_field.iter().map(|s| s.at(j)).collect();
                time::d_dt(axis.dt(), &series)
            })
            .collect();
        let sup_dt_series: Vec<f64> = (0..axis.num_points())
            .map(|n| {
                per_node_dt
                    .iter()
                    .map(|s| s[n].abs())
                    .fold(0.0f64, f64::max)
            })
            .collect();
        let k_bound = {
            let a = time::l2_norm_time(axis.dt(), &sup_series);
            let b = time::l2_norm_time(axis.dt(), &sup_dt_series);
            fmath::sqrt(a * a + b * b)
        };
        Ok(Self {
            grid,
            axis,
            f,
            r_field,
            q,
            k_bound,
            r_floor,
            m_bound,
        })
    }

    pub fn f(&self) -> &NodeFn {
        &self.f
    }

    pub fn k_bound(&self) -> f64 {
        self.k_bound
    }

    pub fn r_floor(&self) -> f64 {
        self.r_floor
    }

    pub fn m_bound(&self) -> f64 {
        self.m_bound
    }
}

/// Solve the source problem: zero initial and boundary data, right-hand side
/// `f(x) R(t,x)`.
pub fn solve_source_problem(setup: &SourceSetup) -> Result<Trajectory> {
    let source: Vec<NodeFn> = setup.r_field.iter().map(|r| r.mul(&setup.f)).collect();
    let problem = WaveProblem::homogeneous(
        setup.grid,
        setup.axis,
        setup.q.clone(),
        NodeFn::zeros(setup.grid),
        NodeFn::zeros(setup.grid),
        Some(source),
    )?;
    wave::solve(&problem)
}

/// Two-sided stability evaluation: the unknown's norm against the two
/// observation components.
#[derive(Debug, Clone, Copy)]
pub struct StabilityReport {
    pub n: usize,
    pub h: f64,
    /// L2 norm of the unknown (`f`, or `q - p`).
    pub lhs: f64,
    pub flux_term: f64,
    pub tych_term: f64,
    pub degenerate: bool,
}

impl StabilityReport {
    /// Observation over unknown.
    pub fn ratio_direct(&self) -> Option<f64> {
        if self.degenerate {
            None
        } else {
            Some((self.flux_term + self.tych_term) / self.lhs)
        }
    }

    /// Unknown over observation, the stability constant being probed.
    pub fn ratio_inverse(&self) -> Option<f64> {
        if self.degenerate {
            None
        } else {
            Some(self.lhs / (self.flux_term + self.tych_term))
        }
    }

    /// Unknown over the flux alone (the filtered-regime diagnostic).
    pub fn ratio_inverse_flux_only(&self) -> Option<f64> {
        if self.degenerate || self.flux_term == 0.0 {
            None
        } else {
            Some(self.lhs / self.flux_term)
        }
    }
}

fn require_inverse_mode(params: &WeightParams) -> Result<()> {
    if params.mode() != WeightMode::Inverse {
        return Err(Error::Precondition(
            "stability experiments need inverse-mode weight parameters (T > 1 + |x0|)".into(),
        ));
    }
    Ok(())
}

/// Stability ratios of the inverse source problem.
pub fn source_stability(setup: &SourceSetup, params: &WeightParams) -> Result<StabilityReport> {
    require_inverse_mode(params)?;
    let lhs = setup.f.norm_l2(Domain::Open);
    let traj = solve_source_problem(setup)?;
    let obs = wave::observe(&traj)?;
    let flux_term = obs.flux_l2();
    let tych_term = obs.tych_l2();
    Ok(StabilityReport {
        n: setup.grid.n(),
        h: setup.grid.h(),
        lhs,
        flux_term,
        tych_term,
        degenerate: lhs == 0.0 || flux_term + tych_term == 0.0,
    })
}

/// Stability ratios for a potential pair sharing the same data: forms the
/// difference of the two trajectories and reports `||q - p||` against the
/// observation difference.
#[allow(clippy::too_many_arguments)]
pub fn potential_stability(
    p: &NodeFn,
    q: &NodeFn,
    data: &impl ProblemData,
    grid: Grid1D,
    axis: TimeAxis,
    params: &WeightParams,
    m_bound: f64,
    r_floor: f64,
) -> Result<StabilityReport> {
    require_inverse_mode(params)?;
    for (name, pot) in [("p", p), ("q", q)] {
        let norm = pot.norm(LpNorm::Infinity, Domain::Open);
        if norm > m_bound {
            return Err(Error::Precondition(format!(
                "||{name}||_inf = {norm} exceeds the box bound m = {m_bound}"
            )));
        }
    }
    let y0 = NodeFn::sample(grid, |x| data.y0(x));
    let floor = (1..=grid.n())
        .map(|j| y0.at(j).abs())
        .fold(f64::MAX, f64::min);
    if floor < r_floor {
        return Err(Error::Precondition(format!(
            "positivity fails: inf_j |y0_j| = {floor} < r = {r_floor}"
        )));
    }
    let traj_p = wave::solve(&WaveProblem::sample(grid, axis, p.clone(), data))?;
    let traj_q = wave::solve(&WaveProblem::sample(grid, axis, q.clone(), data))?;
    let obs_p = wave::observe(&traj_p)?;
    let obs_q = wave::observe(&traj_q)?;
    let diff = obs_q.sub(&obs_p)?;
    let lhs = q.sub(p).norm_l2(Domain::Open);
    let flux_term = diff.flux_l2();
    let tych_term = diff.tych_l2();
    Ok(StabilityReport {
        n: grid.n(),
        h: grid.h(),
        lhs,
        flux_term,
        tych_term,
        degenerate: lhs == 0.0 || flux_term + tych_term == 0.0,
    })
}

/// Optimiser and misfit settings for the reconstruction.
#[derive(Debug, Clone)]
pub struct ReconConfig {
    /// Box bound on the potential.
    pub m: f64,
    /// Weight of the regularisation component inside the misfit.
    pub tych_weight: f64,
    pub max_iter: usize,
    pub step_init: f64,
    pub armijo_c: f64,
    pub armijo_shrink: f64,
    pub max_backtracks: usize,
    pub grad_tol: f64,
    /// Truncate the iterates' sine expansion at mode `delta/(2h)` when set.
    pub filtering_delta: Option<f64>,
}

impl Default for ReconConfig {
    fn default() -> Self {
        Self {
            m: 5.0,
            tych_weight: 1.0,
            max_iter: 300,
            step_init: 1.0,
            armijo_c: 1e-4,
            armijo_shrink: 0.5,
            max_backtracks: 40,
            grad_tol: 1e-10,
            filtering_delta: None,
        }
    }
}

impl ReconConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0) {
            return Err(Error::Parameter("box bound m must be positive".into()));
        }
        if !(self.step_init > 0.0)
            || !(self.armijo_c > 0.0)
            || !(self.armijo_shrink > 0.0 && self.armijo_shrink < 1.0)
        {
            return Err(Error::Parameter(
                "step parameters must be positive (shrink in (0,1))".into(),
            ));
        }
        if !(self.tych_weight >= 0.0) {
            return Err(Error::Parameter(
                "regularisation weight must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// One reconstruction instance: fixed data, grid and axis; the potential is
/// the only unknown.
pub struct InverseInstance<'a, D: ProblemData> {
    pub data: &'a D,
    pub grid: Grid1D,
    pub axis: TimeAxis,
}

impl<'a, D: ProblemData> InverseInstance<'a, D> {
    pub fn new(data: &'a D, grid: Grid1D, axis: TimeAxis) -> Self {
        Self { data, grid, axis }
    }

    pub fn observe_for(&self, q: &NodeFn) -> Result<ObservationPair> {
        let traj = wave::solve(&WaveProblem::sample(self.grid, self.axis, q.clone(), self.data))?;
        wave::observe(&traj)
    }

    fn solve_for(&self, q: &NodeFn) -> Result<Trajectory> {
        wave::solve(&WaveProblem::sample(self.grid, self.axis, q.clone(), self.data))
    }
}

/// Misfit between the observation of `q` and a target pair:
/// `||flux - flux*||^2 + w ||tych - tych*||^2`.
pub fn misfit<D: ProblemData>(
    inst: &InverseInstance<'_, D>,
    q: &NodeFn,
    target: &ObservationPair,
    cfg: &ReconConfig,
) -> Result<f64> {
    let obs = inst.observe_for(q)?;
    let diff = obs.sub(target)?;
    let flux = diff.flux_l2();
    let tych = diff.tych_l2();
    Ok(flux * flux + cfg.tych_weight * tych * tych)
}

/// Misfit and its exact gradient with respect to the interior potential
/// values, by one backward (adjoint) sweep of the leapfrog recursion.
/// Boundary slots of the gradient are zero.
pub fn misfit_gradient<D: ProblemData>(
    inst: &InverseInstance<'_, D>,
    q: &NodeFn,
    target: &ObservationPair,
    cfg: &ReconConfig,
) -> Result<(f64, NodeFn)> {
    let grid = inst.grid;
    let axis = inst.axis;
    let (h, dt) = (grid.h(), axis.dt());
    let steps = axis.steps();
    let pts = axis.num_points();
    let nn = grid.n();

    let traj = inst.solve_for(q)?;
    let obs = wave::observe(&traj)?;
    let dflux: Vec<f64> = obs
        .flux_dt()
        .iter()
        .zip(target.flux_dt())
        .map(|(a, b)| a - b)
        .collect();
    let j_flux = {
        let v = time::l2_norm_time(dt, &dflux);
        v * v
    };
    let mut j_tych = 0.0;
    {
        let series: Vec<f64> = obs
            .tych()
            .iter()
            .zip(target.tych())
            .map(|(a, b)| {
                let d = a.sub(b).norm_l2();
                d * d
            })
            .collect();
        j_tych = time::integrate_trapezoid(dt, &series).max(j_tych);
    }
    let j_val = j_flux + cfg.tych_weight * j_tych;

    // sensitivities with respect to the flux-derivative and the tych faces
    let r_d: Vec<f64> = (0..pts)
        .map(|m| 2.0 * time::trapezoid_weight(m, steps) * dt * dflux[m])
        .collect();
    // back through the time derivative onto the trace, then onto node N
    let r_b = time::d_dt_transpose(dt, &r_d);

    // phi[n][j] = dJ/dy^n_j coming directly from the observation terms
    let mut phi = vec![NodeFn::zeros(grid); pts];
    for m in 0..pts {
        // trace b^m = (g1^m - y^m_N)/h
        phi[m].vals_mut()[nn] += -r_b[m] / h;
    }
    if cfg.tych_weight > 0.0 {
        // residual against the target per face, with trapezoid and h weights
        let mut r_c = vec![vec![0.0; pts]; nn + 1]; // dJ/dc^m_j for interior j (index j-1 unused trick avoided)
        for m in 0..pts {
            let wm = 2.0 * cfg.tych_weight * time::trapezoid_weight(m, steps) * dt * h;
            let tych_m = &obs.tych()[m];
            let tgt_m = &target.tych()[m];
            // tau_k = c_{k+1} - c_k, so dJ/dc_j = r_tau[j-1] - r_tau[j]
            for j in 1..=nn {
                let r_tau_left = wm * (tych_m.at(j - 1) - tgt_m.at(j - 1));
                let r_tau_right = wm * (tych_m.at(j) - tgt_m.at(j));
                r_c[j][m] = r_tau_left - r_tau_right;
            }
        }
        // back through the second time derivative, node by node
        for j in 1..=nn {
            let contrib = time::d2_dt2_transpose(dt, &r_c[j]);
            for m in 0..pts {
                phi[m].vals_mut()[j] += contrib[m];
            }
        }
    }

    // adjoint sweep of y^{n+1} = 2 y^n - y^{n-1} + dt^2 (lap - q) y^n,
    // startup y^1 = y^0 + dt y1 + (dt^2/2) (lap - q) y^0 (+ data terms)
    let q_fn = traj.problem().q().clone();
    let apply_b = |u: &NodeFn| -> NodeFn {
        let lu = stencil::laplace_dirichlet_minus_q(u, &q_fn);
        let mut out = NodeFn::zeros(grid);
        for j in 1..=nn {
            out.vals_mut()[j] = 2.0 * u.at(j) + dt * dt * lu.at(j);
        }
        out
    };
    let mut lambda = vec![NodeFn::zeros(grid); pts];
    lambda[steps] = phi[steps].clone();
    if steps >= 1 {
        let mut l = phi[steps - 1].clone();
        if steps >= 2 {
            l = l.add(&apply_b(&lambda[steps]));
        }
        lambda[steps - 1] = l;
    }
    for m in (1..steps.saturating_sub(1)).rev() {
        let mut l = phi[m].add(&apply_b(&lambda[m + 1]));
        l = l.sub(&lambda[m + 2]);
        lambda[m] = l;
    }
    if steps >= 1 {
        // y^0 enters y^1 with I + (dt^2/2)(lap - q) and y^2 with -I
        let l1 = &lambda[1];
        let half = stencil::laplace_dirichlet_minus_q(l1, &q_fn);
        let mut l0 = phi[0].clone();
        for j in 1..=nn {
            l0.vals_mut()[j] += l1.at(j) + 0.5 * dt * dt * half.at(j);
        }
        if steps >= 2 {
            l0 = l0.sub(&lambda[2]);
        }
        lambda[0] = l0;
    }

    // assemble dJ/dq_j: q enters every recursion through -dt^2 q y^n and the
    // startup through -(dt^2/2) q y^0
    let mut grad = NodeFn::zeros(grid);
    for m in 1..steps {
        let y_m = traj.state(m);
        let l_next = &lambda[m + 1];
        for j in 1..=nn {
            grad.vals_mut()[j] += -dt * dt * l_next.at(j) * y_m.at(j);
        }
    }
    if steps >= 1 {
        let y0 = traj.state(0);
        for j in 1..=nn {
            grad.vals_mut()[j] += -0.5 * dt * dt * lambda[1].at(j) * y0.at(j);
        }
    }
    Ok((j_val, grad))
}

/// Interior sine-expansion coefficients `c_k`, `k = 1..=N`.
fn sine_coeffs(f: &NodeFn) -> Vec<f64> {
    let grid = f.grid();
    let n = grid.n();
    let pi = core::f64::consts::PI;
    let scale = 2.0 / (n + 1) as f64;
    (1..=n)
        .map(|k| {
            let mut acc = 0.0;
            for j in 1..=n {
                acc += f.at(j) * fmath::sin(k as f64 * pi * grid.node(j));
            }
            scale * acc
        })
        .collect()
}

/// Truncate the interior sine expansion at `k_max`, keeping boundary slots.
fn sine_truncate(f: &NodeFn, k_max: usize) -> NodeFn {
    let grid = f.grid();
    let n = grid.n();
    let pi = core::f64::consts::PI;
    let coeffs = sine_coeffs(f);
    let mut out = f.clone();
    for j in 1..=n {
        let mut acc = 0.0;
        for (k, c) in coeffs.iter().enumerate().take(k_max.min(n)) {
            acc += c * fmath::sin((k + 1) as f64 * pi * grid.node(j));
        }
        out.vals_mut()[j] = acc;
    }
    out
}

fn clamp_box(f: &mut NodeFn, m: f64) {
    for v in f.vals_mut() {
        *v = v.clamp(-m, m);
    }
}

/// Result of one projected-gradient run.
#[derive(Debug, Clone)]
pub struct ReconResult {
    pub q_rec: NodeFn,
    pub misfit_history: Vec<f64>,
    pub grad_norm_history: Vec<f64>,
    pub stagnated: bool,
    pub l2_error_vs_truth: Option<f64>,
}

/// Projected gradient descent with Armijo backtracking on the box
/// `||q||_inf <= m` (component-wise clamp), optional low-mode sine
/// projection, monotone misfit by construction. Exhausted backtracking ends
/// the run with a stagnation flag rather than an error.
pub fn reconstruct<D: ProblemData>(
    inst: &InverseInstance<'_, D>,
    target: &ObservationPair,
    cfg: &ReconConfig,
    q_init: &NodeFn,
    q_true: Option<&NodeFn>,
) -> Result<ReconResult> {
    cfg.validate()?;
    if q_init.norm(LpNorm::Infinity, Domain::Open) > cfg.m {
        return Err(Error::Parameter(
            "initial potential lies outside the box".into(),
        ));
    }
    let h = inst.grid.h();
    let k_filter = cfg
        .filtering_delta
        .map(|delta| fmath::floor(delta / (2.0 * h)) as usize);

    let project = |f: &NodeFn| -> NodeFn {
        let mut out = f.clone();
        if let Some(k) = k_filter {
            out = sine_truncate(&out, k);
        }
        clamp_box(&mut out, cfg.m);
        out
    };

    let mut q = project(q_init);
    let (mut j_cur, mut grad) = misfit_gradient(inst, &q, target, cfg)?;
    let mut misfit_history = vec![j_cur];
    let mut grad_norm_history = vec![grad.norm_l2(Domain::Open)];
    let mut step = cfg.step_init;
    let mut stagnated = false;

    for _ in 0..cfg.max_iter {
        let gnorm = grad.norm_l2(Domain::Open);
        if gnorm <= cfg.grad_tol {
            break;
        }
        // L2-representative of the raw partials keeps the step scale
        // mesh-independent
        let direction = grad.scale(1.0 / h);
        let mut accepted = false;
        let mut alpha = step;
        for _ in 0..cfg.max_backtracks {
            let candidate = project(&q.sub(&direction.scale(alpha)));
            let decrease_ref: f64 = (1..=inst.grid.n())
                .map(|j| grad.at(j) * (q.at(j) - candidate.at(j)))
                .sum();
            let j_new = misfit(inst, &candidate, target, cfg)?;
            if j_new <= j_cur - cfg.armijo_c * decrease_ref.max(0.0) && j_new < j_cur {
                let (j_ref, g_new) = misfit_gradient(inst, &candidate, target, cfg)?;
                q = candidate;
                j_cur = j_ref;
                grad = g_new;
                accepted = true;
                break;
            }
            alpha *= cfg.armijo_shrink;
        }
        if !accepted {
            stagnated = true;
            break;
        }
        step = (alpha / cfg.armijo_shrink).min(cfg.step_init * 1e3);
        misfit_history.push(j_cur);
        grad_norm_history.push(grad.norm_l2(Domain::Open));
    }

    let l2_error_vs_truth = q_true.map(|t| q.sub(t).norm_l2(Domain::Open));
    Ok(ReconResult {
        q_rec: q,
        misfit_history,
        grad_norm_history,
        stagnated,
        l2_error_vs_truth,
    })
}

/// Measured sides of the two filtering inequalities.
#[derive(Debug, Clone, Copy)]
pub struct FilteringReport {
    /// W(2,1)-in-time, L2-in-space size of the time factor plus the sup
    /// bounds of its first two layers at t = 0.
    pub data_size: f64,
    /// Admissible bound `delta / h` for the data size.
    pub data_limit: f64,
    /// Rayleigh ratio `int |d+ f|^2 / int |f|^2` of the unknown.
    pub grad_ratio: f64,
    /// Admissible bound `delta^2 / h^2` for the ratio.
    pub grad_limit: f64,
    pub data_ok: bool,
    pub grad_ok: bool,
    pub degenerate: bool,
}

/// Evaluate both filtering inequalities for a spatial unknown `f` and a
/// time factor sampled on the axis.
pub fn filtering_check(
    f: &NodeFn,
    r_field: &[NodeFn],
    axis: TimeAxis,
    delta: f64,
) -> Result<FilteringReport> {
    if r_field.len() != axis.num_points() {
        return Err(Error::Dimension(format!(
            "time factor needs {} slices, got {}",
            axis.num_points(),
            r_field.len()
        )));
    }
    let grid = f.grid();
    let dt = axis.dt();
    let pts = axis.num_points();

    // W(2,1)(0,T; L2) = sum of L1-in-time norms of the first three layers
    let l2_series: Vec<f64> = r_field.iter().map(|s| s.norm_l2(Domain::Open)).collect();
    let per_node: Vec<Vec<f64>> = (0..grid.num_nodes())
        .map(|j| r_field.iter().map(|s| s.at(j)).collect())
        .collect();
    let d1: Vec<Vec<f64>> = per_node.iter().map(|s| time::d_dt(dt, s)).collect();
    let d2: Vec<Vec<f64>> = per_node.iter().map(|s| time::d2_dt2(dt, s)).collect();
    let layer_norm = |layers: &[Vec<f64>]| -> Vec<f64> {
        (0..pts)
            .map(|m| {
                let mut acc = 0.0;
                for j in 1..=grid.n() {
                    acc += layers[j][m] * layers[j][m];
                }
                fmath::sqrt(grid.h() * acc)
            })
            .collect()
    };
    let d1_series = layer_norm(&d1);
    let d2_series = layer_norm(&d2);
    let w21 = time::integrate_trapezoid(dt, &l2_series)
        + time::integrate_trapezoid(dt, &d1_series)
        + time::integrate_trapezoid(dt, &d2_series);
    let sup0 = (1..=grid.n())
        .map(|j| per_node[j][0].abs())
        .fold(0.0f64, f64::max);
    let sup0_dt = (1..=grid.n())
        .map(|j| d1[j][0].abs())
        .fold(0.0f64, f64::max);
    let data_size = w21 + sup0 + sup0_dt;
    let data_limit = delta / grid.h();

    let dpf = stencil::diff_plus(f);
    let num = dpf.norm_l2();
    let num = num * num;
    let den = f.norm_l2(Domain::Open);
    let den = den * den;
    let degenerate = den == 0.0;
    let grad_ratio = if degenerate { 0.0 } else { num / den };
    let grad_limit = delta * delta / (grid.h() * grid.h());
    Ok(FilteringReport {
        data_size,
        data_limit,
        grad_ratio,
        grad_limit,
        data_ok: data_size <= data_limit,
        grad_ok: degenerate || grad_ratio <= grad_limit,
        degenerate,
    })
}
