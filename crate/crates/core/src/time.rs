//! Uniform time axes, trapezoid integration, and the sampled-series time
//! derivatives used throughout (centered inside, one-sided second order at
//! the ends).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Largest admissible `dt/h` for the explicit leapfrog scheme. The pure
/// three-point scheme is stable up to 1; the factor 1/2 leaves margin for
/// the potential term.
pub const CFL_MAX: f64 = 0.5;

/// Uniform axis: `steps` intervals of width `dt` starting at `t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeAxis {
    t0: f64,
    dt: f64,
    steps: usize,
}

impl TimeAxis {
    pub fn new(t0: f64, dt: f64, steps: usize) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
        }
        if steps == 0 {
            return Err(Error::Parameter("steps must be at least 1".into()));
        }
        Ok(Self { t0, dt, steps })
    }

    /// Axis on `[0, t_final]` with `dt <= cfl * h` and `steps * dt == t_final`.
    pub fn for_wave(grid: Grid1D, t_final: f64, cfl: f64) -> Result<Self> {
        if !(t_final > 0.0) {
            return Err(Error::Parameter(format!(
                "t_final must be positive, got {t_final}"
            )));
        }
        if !(cfl > 0.0 && cfl <= CFL_MAX) {
            return Err(Error::Parameter(format!(
                "cfl must lie in (0, {CFL_MAX}], got {cfl}"
            )));
        }
        let target = cfl * grid.h();
        let steps = crate::fmath::ceil(t_final / target) as usize;
        let steps = steps.max(1);
        Ok(Self {
            t0: 0.0,
            dt: t_final / steps as f64,
            steps,
        })
    }

    /// Symmetric axis on `[-t_half, t_half]` with an even number of steps.
    pub fn symmetric(t_half: f64, dt_target: f64) -> Result<Self> {
        if !(t_half > 0.0 && dt_target > 0.0) {
            return Err(Error::Parameter(
                "symmetric axis needs positive half-width and dt".into(),
            ));
        }
        let half_steps = crate::fmath::ceil(t_half / dt_target).max(1.0) as usize;
        Ok(Self {
            t0: -t_half,
            dt: t_half / half_steps as f64,
            steps: 2 * half_steps,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of sample points, `steps + 1`.
    pub fn num_points(&self) -> usize {
        self.steps + 1
    }

    pub fn t(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }

    pub fn t_final(&self) -> f64 {
        self.t(self.steps)
    }

    pub fn cfl(&self, grid: Grid1D) -> f64 {
        self.dt / grid.h()
    }
}

/// Composite trapezoid integral of a sampled series.
pub fn integrate_trapezoid(dt: f64, series: &[f64]) -> f64 {
    if series.len() < 2 {
        return 0.0;
    }
    let inner: f64 = series[1..series.len() - 1].iter().sum();
    dt * (0.5 * series[0] + inner + 0.5 * series[series.len() - 1])
}

/// Trapezoid weight of sample `n` (to be multiplied by `dt`).
pub fn trapezoid_weight(n: usize, steps: usize) -> f64 {
    if n == 0 || n == steps {
        0.5
    } else {
        1.0
    }
}

/// L2-in-time norm of a sampled series by the trapezoid rule.
pub fn l2_norm_time(dt: f64, series: &[f64]) -> f64 {
    let sq: Vec<f64> = series.iter().map(|v| v * v).collect();
    crate::fmath::sqrt(integrate_trapezoid(dt, &sq).max(0.0))
}

/// First time derivative of a sampled series. Centered in the interior,
/// one-sided second order at the ends (first order if only two samples).
pub fn d_dt(dt: f64, f: &[f64]) -> Vec<f64> {
    let m = f.len();
    let mut out = vec![0.0; m];
    if m < 2 {
        return out;
    }
    if m == 2 {
        let d = (f[1] - f[0]) / dt;
        out[0] = d;
        out[1] = d;
        return out;
    }
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt);
    for n in 1..m - 1 {
        out[n] = (f[n + 1] - f[n - 1]) / (2.0 * dt);
    }
    out[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * dt);
    out
}

/// Second time derivative of a sampled series. Centered in the interior,
/// one-sided second order at the ends when four samples exist.
pub fn d2_dt2(dt: f64, f: &[f64]) -> Vec<f64> {
    let m = f.len();
    let mut out = vec![0.0; m];
    if m < 3 {
        return out;
    }
    let dt2 = dt * dt;
    for n in 1..m - 1 {
        out[n] = (f[n + 1] - 2.0 * f[n] + f[n - 1]) / dt2;
    }
    if m >= 4 {
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / dt2;
        out[m - 1] = (2.0 * f[m - 1] - 5.0 * f[m - 2] + 4.0 * f[m - 3] - f[m - 4]) / dt2;
    } else {
        out[0] = out[1];
        out[m - 1] = out[1];
    }
    out
}

/// Transpose of [`d_dt`] as a linear map on series: returns `D1^T r`.
pub fn d_dt_transpose(dt: f64, r: &[f64]) -> Vec<f64> {
    let m = r.len();
    let mut out = vec![0.0; m];
    if m < 2 {
        return out;
    }
    if m == 2 {
        out[0] = -(r[0] + r[1]) / dt;
        out[1] = (r[0] + r[1]) / dt;
        return out;
    }
    let c = 1.0 / (2.0 * dt);
    out[0] += -3.0 * c * r[0];
    out[1] += 4.0 * c * r[0];
    out[2] += -c * r[0];
    for n in 1..m - 1 {
        out[n + 1] += c * r[n];
        out[n - 1] -= c * r[n];
    }
    out[m - 1] += 3.0 * c * r[m - 1];
    out[m - 2] += -4.0 * c * r[m - 1];
    out[m - 3] += c * r[m - 1];
    out
}

/// Transpose of [`d2_dt2`] as a linear map on series: returns `D2^T r`.
pub fn d2_dt2_transpose(dt: f64, r: &[f64]) -> Vec<f64> {
    let m = r.len();
    let mut out = vec![0.0; m];
    if m < 3 {
        return out;
    }
    let c = 1.0 / (dt * dt);
    for n in 1..m - 1 {
        out[n + 1] += c * r[n];
        out[n] += -2.0 * c * r[n];
        out[n - 1] += c * r[n];
    }
    if m >= 4 {
        out[0] += 2.0 * c * r[0];
        out[1] += -5.0 * c * r[0];
        out[2] += 4.0 * c * r[0];
        out[3] += -c * r[0];
        out[m - 1] += 2.0 * c * r[m - 1];
        out[m - 2] += -5.0 * c * r[m - 1];
        out[m - 3] += 4.0 * c * r[m - 1];
        out[m - 4] += -c * r[m - 1];
    } else {
        out[2] += c * (r[0] + r[m - 1]);
        out[1] += -2.0 * c * (r[0] + r[m - 1]);
        out[0] += c * (r[0] + r[m - 1]);
    }
    out
}

/// Linear interpolation of a sampled series at time `t` (clamped to the axis).
pub fn resample_linear(axis: TimeAxis, series: &[f64], t: f64) -> f64 {
    let s = (t - axis.t0()) / axis.dt();
    if s <= 0.0 {
        return series[0];
    }
    let last = series.len() - 1;
    if s >= last as f64 {
        return series[last];
    }
    let k = s as usize;
    let w = s - k as f64;
    (1.0 - w) * series[k] + w * series[k + 1]
}
