//! Explicit leapfrog solver for the semi-discrete wave equation with
//! potential, its energy and boundary-trace diagnostics, and the
//! boundary-flux observation operator with its fine-grid reference surrogate.
//!
//! Interior recursion:
//! `y^{n+1} = 2 y^n - y^{n-1} + dt^2 (lap y^n - q y^n + g^n)`,
//! startup by a second-order Taylor step, Dirichlet slots filled from the
//! sampled boundary series. The scheme is globally second order and, for the
//! homogeneous problem, conserves the half-step quadratic form
//! `||(y^{n+1}-y^n)/dt||^2 + a(y^n, y^{n+1})` to roundoff.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::grid::{Domain, FaceFn, Grid1D, LpNorm, NodeFn};
use crate::stencil;
use crate::time::{self, TimeAxis};

/// Tolerance for initial/boundary compatibility of directly supplied data.
const COMPAT_TOL: f64 = 1e-10;

/// Continuous problem data, sampled onto any grid/axis pair. Defaults give
/// homogeneous source and constant Dirichlet data compatible with `y0`.
pub trait ProblemData {
    fn y0(&self, x: f64) -> f64;
    fn y1(&self, x: f64) -> f64;
    fn g0(&self, _t: f64) -> f64 {
        self.y0(0.0)
    }
    fn g1(&self, _t: f64) -> f64 {
        self.y0(1.0)
    }
    fn source(&self, _t: f64, _x: f64) -> f64 {
        0.0
    }
    fn has_source(&self) -> bool {
        false
    }
}

/// Sampled data and potential for one fully discrete run.
#[derive(Debug, Clone)]
pub struct WaveProblem {
    grid: Grid1D,
    axis: TimeAxis,
    q: NodeFn,
    y0: NodeFn,
    y1: NodeFn,
    g0: Vec<f64>,
    g1: Vec<f64>,
    source: Option<Vec<NodeFn>>,
}

impl WaveProblem {
    /// Sample continuous data at the nodes and time points. Boundary
    /// compatibility is enforced by overwriting the boundary slots of `y0`.
    pub fn sample(grid: Grid1D, axis: TimeAxis, q: NodeFn, data: &impl ProblemData) -> Self {
        let mut y0 = NodeFn::sample(grid, |x| data.y0(x));
        let y1 = NodeFn::sample(grid, |x| data.y1(x));
        let g0: Vec<f64> = (0..axis.num_points()).map(|n| data.g0(axis.t(n))).collect();
        let g1: Vec<f64> = (0..axis.num_points()).map(|n| data.g1(axis.t(n))).collect();
        y0.vals_mut()[0] = g0[0];
        let last = grid.num_nodes() - 1;
        y0.vals_mut()[last] = g1[0];
        let source = if data.has_source() {
            Some(
                (0..axis.num_points())
                    .map(|n| NodeFn::sample(grid, |x| data.source(axis.t(n), x)))
                    .collect(),
            )
        } else {
            None
        };
        Self {
            grid,
            axis,
            q,
            y0,
            y1,
            g0,
            g1,
            source,
        }
    }

    /// Assemble from already-sampled pieces; rejects incompatible boundary
    /// data and mismatched lengths.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        grid: Grid1D,
        axis: TimeAxis,
        q: NodeFn,
        y0: NodeFn,
        y1: NodeFn,
        g0: Vec<f64>,
        g1: Vec<f64>,
        source: Option<Vec<NodeFn>>,
    ) -> Result<Self> {
        let pts = axis.num_points();
        if g0.len() != pts || g1.len() != pts {
            return Err(Error::Dimension(format!(
                "boundary series need {pts} samples, got {} and {}",
                g0.len(),
                g1.len()
            )));
        }
        if let Some(src) = &source {
            if src.len() != pts {
                return Err(Error::Dimension(format!(
                    "source needs {pts} time slices, got {}",
                    src.len()
                )));
            }
        }
        let last = grid.num_nodes() - 1;
        if (y0.at(0) - g0[0]).abs() > COMPAT_TOL || (y0.at(last) - g1[0]).abs() > COMPAT_TOL {
            return Err(Error::RejectedInput(format!(
                "initial position incompatible with boundary data: |y0(0)-g0(0)| = {:e}, |y0(1)-g1(0)| = {:e}",
                (y0.at(0) - g0[0]).abs(),
                (y0.at(last) - g1[0]).abs()
            )));
        }
        Ok(Self {
            grid,
            axis,
            q,
            y0,
            y1,
            g0,
            g1,
            source,
        })
    }

    /// Homogeneous Dirichlet problem with optional source slices.
    pub fn homogeneous(
        grid: Grid1D,
        axis: TimeAxis,
        q: NodeFn,
        y0: NodeFn,
        y1: NodeFn,
        source: Option<Vec<NodeFn>>,
    ) -> Result<Self> {
        let pts = axis.num_points();
        Self::from_parts(grid, axis, q, y0, y1, vec![0.0; pts], vec![0.0; pts], source)
    }

    /// Enforce the potential box bound.
    pub fn check_potential_bound(&self, m: f64) -> Result<()> {
        let norm = self.q.norm(LpNorm::Infinity, Domain::Open);
        if norm > m {
            return Err(Error::Parameter(format!(
                "potential violates the box: ||q||_inf = {norm} > m = {m}"
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn axis(&self) -> TimeAxis {
        self.axis
    }

    pub fn q(&self) -> &NodeFn {
        &self.q
    }

    pub fn y0(&self) -> &NodeFn {
        &self.y0
    }

    pub fn boundary_series(&self) -> (&[f64], &[f64]) {
        (&self.g0, &self.g1)
    }

    fn accel(&self, y: &NodeFn, n: usize) -> NodeFn {
        let mut a = stencil::laplace(y);
        for j in 1..=self.grid.n() {
            let mut v = a.at(j) - self.q.at(j) * y.at(j);
            if let Some(src) = &self.source {
                v += src[n].at(j);
            }
            a.vals_mut()[j] = v;
        }
        a
    }
}

/// Fully discrete solution: one node function per time level.
#[derive(Debug, Clone)]
pub struct Trajectory {
    problem: WaveProblem,
    states: Vec<NodeFn>,
}

impl Trajectory {
    pub fn problem(&self) -> &WaveProblem {
        &self.problem
    }

    pub fn grid(&self) -> Grid1D {
        self.problem.grid
    }

    pub fn axis(&self) -> TimeAxis {
        self.problem.axis
    }

    pub fn state(&self, n: usize) -> &NodeFn {
        &self.states[n]
    }

    pub fn states(&self) -> &[NodeFn] {
        &self.states
    }

    pub fn is_homogeneous(&self) -> bool {
        let scale = self
            .states
            .iter()
            .fold(0.0f64, |m, s| m.max(s.norm(LpNorm::Infinity, Domain::Open)));
        let tol = 1e-12 * scale.max(1.0);
        self.problem.g0.iter().all(|v| v.abs() <= tol)
            && self.problem.g1.iter().all(|v| v.abs() <= tol)
    }

    /// Difference of two trajectories on the same grid and axis.
    pub fn sub(&self, other: &Trajectory) -> Result<Vec<NodeFn>> {
        if self.grid() != other.grid() || self.axis() != other.axis() {
            return Err(Error::Dimension(
                "trajectories live on different discretisations".into(),
            ));
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.sub(b))
            .collect())
    }
}

/// Leapfrog time stepping. Fails loudly on CFL violation or non-finite
/// values (naming the offending step).
pub fn solve(problem: &WaveProblem) -> Result<Trajectory> {
    let grid = problem.grid;
    let axis = problem.axis;
    if axis.cfl(grid) > time::CFL_MAX + 1e-12 {
        return Err(Error::Parameter(format!(
            "time step violates the CFL bound: dt/h = {} > {}",
            axis.cfl(grid),
            time::CFL_MAX
        )));
    }
    let dt = axis.dt();
    let n = grid.n();
    let last = grid.num_nodes() - 1;
    let steps = axis.steps();

    let mut states = Vec::with_capacity(steps + 1);
    states.push(problem.y0.clone());

    // second-order Taylor startup
    let a0 = problem.accel(&states[0], 0);
    let mut y1 = NodeFn::zeros(grid);
    for j in 1..=n {
        y1.vals_mut()[j] =
            states[0].at(j) + dt * problem.y1.at(j) + 0.5 * dt * dt * a0.at(j);
    }
    y1.vals_mut()[0] = problem.g0[1.min(steps)];
    y1.vals_mut()[last] = problem.g1[1.min(steps)];
    check_finite(&y1, 1)?;
    if steps >= 1 {
        states.push(y1);
    }

    for step in 2..=steps {
        let an = problem.accel(&states[step - 1], step - 1);
        let mut next = NodeFn::zeros(grid);
        for j in 1..=n {
            next.vals_mut()[j] = 2.0 * states[step - 1].at(j) - states[step - 2].at(j)
                + dt * dt * an.at(j);
        }
        next.vals_mut()[0] = problem.g0[step];
        next.vals_mut()[last] = problem.g1[step];
        check_finite(&next, step)?;
        states.push(next);
    }

    Ok(Trajectory {
        problem: problem.clone(),
        states,
    })
}

fn check_finite(y: &NodeFn, step: usize) -> Result<()> {
    if y.vals().iter().any(|v| !v.is_finite()) {
        Err(Error::Diverged { step })
    } else {
        Ok(())
    }
}

/// Gronwall-type discrete energy at time level `n`:
/// `||d+ y||^2 + ||dy/dt||^2 + ||y||^2` with the time derivative by centered
/// differences (one-sided second order at the endpoints). This quantity is
/// the one the a-priori bounds control; it is *not* a conserved invariant
/// (its zero-order term oscillates even for the free wave).
pub fn energy(traj: &Trajectory, n: usize) -> f64 {
    let dty = velocity(traj, n);
    let y = traj.state(n);
    let dpy = stencil::diff_plus(y);
    let g = dpy.norm_l2();
    let v = dty.norm_l2(Domain::Open);
    let z = y.norm_l2(Domain::Open);
    g * g + v * v + z * z
}

/// Centered-difference velocity at level `n` (one-sided at the ends).
pub fn velocity(traj: &Trajectory, n: usize) -> NodeFn {
    let dt = traj.axis().dt();
    let s = traj.states();
    let last = s.len() - 1;
    let mut out = NodeFn::zeros(traj.grid());
    let two_dt = 2.0 * dt;
    for j in 0..traj.grid().num_nodes() {
        out.vals_mut()[j] = if last == 1 {
            (s[1].at(j) - s[0].at(j)) / dt
        } else if n == 0 {
            (-3.0 * s[0].at(j) + 4.0 * s[1].at(j) - s[2].at(j)) / two_dt
        } else if n == last {
            (3.0 * s[last].at(j) - 4.0 * s[last - 1].at(j) + s[last - 2].at(j)) / two_dt
        } else {
            (s[n + 1].at(j) - s[n - 1].at(j)) / two_dt
        };
    }
    out
}

/// Exactly conserved leapfrog invariant at half level `n + 1/2` for the
/// homogeneous problem: `||(y^{n+1}-y^n)/dt||^2 + a(y^n, y^{n+1})` with
/// `a(u,v) = int d+u d+v + int q u v`.
pub fn conserved_energy(traj: &Trajectory, n: usize) -> f64 {
    let dt = traj.axis().dt();
    let grid = traj.grid();
    let h = grid.h();
    let q = traj.problem().q();
    let a = traj.state(n);
    let b = traj.state(n + 1);
    let mut kinetic = 0.0;
    let mut coupling = 0.0;
    for j in 1..=grid.n() {
        let d = (b.at(j) - a.at(j)) / dt;
        kinetic += d * d;
        coupling += q.at(j) * a.at(j) * b.at(j);
    }
    // boundary slots contribute to the face sum only
    let dpa = stencil::diff_plus(a);
    let dpb = stencil::diff_plus(b);
    let mut faces = 0.0;
    for k in 0..grid.num_faces() {
        faces += dpa.at(k) * dpb.at(k);
    }
    h * kinetic + h * faces + h * coupling
}

/// Worst relative drift of the conserved half-step invariant.
pub fn energy_drift(traj: &Trajectory) -> f64 {
    let steps = traj.axis().steps();
    if steps == 0 {
        return 0.0;
    }
    let e0 = conserved_energy(traj, 0);
    if e0 == 0.0 {
        return (0..steps)
            .map(|n| conserved_energy(traj, n).abs())
            .fold(0.0, f64::max);
    }
    (0..steps)
        .map(|n| ((conserved_energy(traj, n) - e0) / e0).abs())
        .fold(0.0, f64::max)
}

/// Boundary normal-derivative trace `(d- y)_{N+1}` per time level.
pub fn hidden_reg_trace(traj: &Trajectory) -> Vec<f64> {
    traj.states().iter().map(|y| y.boundary_flux()).collect()
}

/// Relative residual of the discrete multiplier identity for the free
/// homogeneous wave (time integrals by trapezoid, time derivatives by the
/// shared centered stencils). Small for trajectories of `dtt y = lap y`
/// with zero Dirichlet data; decays at second order in `dt`.
pub fn multiplier_residual(traj: &Trajectory) -> Result<f64> {
    if !traj.is_homogeneous() {
        return Err(Error::Precondition(
            "multiplier residual requires homogeneous Dirichlet data".into(),
        ));
    }
    let grid = traj.grid();
    let axis = traj.axis();
    let (n, h, dt) = (grid.n(), grid.h(), axis.dt());
    let pts = axis.num_points();

    // node-wise time derivatives
    let dty = time_derivative_fields(traj, 1);
    let dtty = time_derivative_fields(traj, 2);

    let mut s_bflux = vec![0.0; pts]; // |(d- dt y)_{N+1}|^2
    let mut s_tych = vec![0.0; pts]; // int_[0,1) |d+ dtt y|^2
    let mut s_dtt = vec![0.0; pts]; // int_(0,1) |dtt y|^2
    let mut s_grad = vec![0.0; pts]; // int_[0,1) |d+ dt y|^2
    let mut x_end = [0.0; 2]; // int x dtt y d(dt y) at t = 0, T
    for m in 0..pts {
        let b = dty[m].boundary_flux();
        s_bflux[m] = b * b;
        let dp_tt = stencil::diff_plus(&dtty[m]);
        for k in 0..grid.num_faces() {
            s_tych[m] += h * dp_tt.at(k) * dp_tt.at(k);
        }
        let dp_t = stencil::diff_plus(&dty[m]);
        for k in 0..grid.num_faces() {
            s_grad[m] += h * dp_t.at(k) * dp_t.at(k);
        }
        for j in 1..=n {
            s_dtt[m] += h * dtty[m].at(j) * dtty[m].at(j);
        }
        if m == 0 || m == pts - 1 {
            let dc = stencil::diff_centered(&dty[m]);
            let mut acc = 0.0;
            for j in 1..=n {
                acc += h * dtty[m].at(j) * grid.node(j) * dc.at(j);
            }
            x_end[if m == 0 { 0 } else { 1 }] = acc;
        }
    }

    let lhs = 0.5 * time::integrate_trapezoid(dt, &s_bflux)
        + 0.25 * h * h * time::integrate_trapezoid(dt, &s_tych);
    let rhs = (x_end[1] - x_end[0])
        + 0.5 * time::integrate_trapezoid(dt, &s_dtt)
        + 0.5 * time::integrate_trapezoid(dt, &s_grad);
    Ok((lhs - rhs).abs() / (lhs.abs() + rhs.abs() + 1e-300))
}

fn time_derivative_fields(traj: &Trajectory, order: usize) -> Vec<NodeFn> {
    let grid = traj.grid();
    let dt = traj.axis().dt();
    let pts = traj.axis().num_points();
    let width = grid.num_nodes();
    let mut out = vec![NodeFn::zeros(grid); pts];
    for j in 0..width {
        let series: Vec<f64> = traj.states().iter().map(|s| s.at(j)).collect();
        let d = match order {
            1 => time::d_dt(dt, &series),
            _ => time::d2_dt2(dt, &series),
        };
        for m in 0..pts {
            out[m].vals_mut()[j] = d[m];
        }
    }
    out
}

/// The two observation components: time derivative of the boundary flux and
/// the `h`-scaled forward difference of the second time derivative.
#[derive(Debug, Clone)]
pub struct ObservationPair {
    axis: TimeAxis,
    flux_dt: Vec<f64>,
    tych: Vec<FaceFn>,
}

impl ObservationPair {
    pub fn axis(&self) -> TimeAxis {
        self.axis
    }

    pub fn flux_dt(&self) -> &[f64] {
        &self.flux_dt
    }

    pub fn flux_dt_mut(&mut self) -> &mut [f64] {
        &mut self.flux_dt
    }

    pub fn tych(&self) -> &[FaceFn] {
        &self.tych
    }

    pub fn tych_mut(&mut self) -> &mut [FaceFn] {
        &mut self.tych
    }

    /// L2(0,T) norm of the flux component.
    pub fn flux_l2(&self) -> f64 {
        time::l2_norm_time(self.axis.dt(), &self.flux_dt)
    }

    /// L2(0,T; L2_h[0,1)) norm of the regularisation component.
    pub fn tych_l2(&self) -> f64 {
        let series: Vec<f64> = self
            .tych
            .iter()
            .map(|f| {
                let s = f.norm_l2();
                s * s
            })
            .collect();
        crate::fmath::sqrt(time::integrate_trapezoid(self.axis.dt(), &series).max(0.0))
    }

    pub fn sub(&self, other: &ObservationPair) -> Result<ObservationPair> {
        if self.axis != other.axis || self.flux_dt.len() != other.flux_dt.len() {
            return Err(Error::Dimension(
                "observations live on different time axes".into(),
            ));
        }
        Ok(ObservationPair {
            axis: self.axis,
            flux_dt: self
                .flux_dt
                .iter()
                .zip(&other.flux_dt)
                .map(|(a, b)| a - b)
                .collect(),
            tych: self
                .tych
                .iter()
                .zip(&other.tych)
                .map(|(a, b)| a.sub(b))
                .collect(),
        })
    }

    /// Zero observation on a grid/axis pair (the continuous surrogate's
    /// regularisation component).
    pub fn zeros(grid: Grid1D, axis: TimeAxis) -> Self {
        ObservationPair {
            axis,
            flux_dt: vec![0.0; axis.num_points()],
            tych: vec![FaceFn::zeros(grid); axis.num_points()],
        }
    }
}

/// Observation operator applied to a computed trajectory.
pub fn observe(traj: &Trajectory) -> Result<ObservationPair> {
    let axis = traj.axis();
    if axis.steps() < 2 {
        return Err(Error::Precondition(
            "observation needs at least two time steps".into(),
        ));
    }
    let trace = hidden_reg_trace(traj);
    let flux_dt = time::d_dt(axis.dt(), &trace);
    let dtty = time_derivative_fields(traj, 2);
    let h = traj.grid().h();
    let tych = dtty
        .iter()
        .map(|c| {
            let dp = stencil::diff_plus(c);
            let mut f = FaceFn::zeros(traj.grid());
            for k in 0..traj.grid().num_faces() {
                f.vals_mut()[k] = h * dp.at(k);
            }
            f
        })
        .collect();
    Ok(ObservationPair {
        axis,
        flux_dt,
        tych,
    })
}

/// Fine-grid surrogate for the continuous observation: solve with `n_ref`
/// interior nodes, resample the flux derivative onto the experiment axis by
/// linear interpolation, and return a zero regularisation component.
pub fn reference_observation(
    p: impl Fn(f64) -> f64,
    data: &impl ProblemData,
    grid: Grid1D,
    axis: TimeAxis,
    n_ref: usize,
) -> Result<ObservationPair> {
    if n_ref < 8 * grid.n() {
        return Err(Error::Config(format!(
            "reference resolution too small: n_ref = {n_ref} < 8 * {}",
            grid.n()
        )));
    }
    let grid_ref = Grid1D::new(n_ref)?;
    let axis_ref = TimeAxis::for_wave(grid_ref, axis.t_final(), 0.5)?;
    let q_ref = NodeFn::sample(grid_ref, &p);
    let problem = WaveProblem::sample(grid_ref, axis_ref, q_ref, data);
    let traj = solve(&problem)?;
    let trace = hidden_reg_trace(&traj);
    let flux_ref = time::d_dt(axis_ref.dt(), &trace);
    let flux_dt = (0..axis.num_points())
        .map(|n| time::resample_linear(axis_ref, &flux_ref, axis.t(n)))
        .collect();
    Ok(ObservationPair {
        axis,
        flux_dt,
        tych: vec![FaceFn::zeros(grid); axis.num_points()],
    })
}
