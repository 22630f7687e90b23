//! Tabulated weight fields on the space-time box.

use alloc::format;

use crate::carleman::WeightParams;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::spacetime::SpaceTimeFn;
use crate::time::TimeAxis;

/// Largest exponent fed to `exp` when tabulating `phi = exp(lambda psi)`.
const EXP_GUARD: f64 = 700.0;

/// `psi`, `phi`, `rho` tabulated on a symmetric time axis times the grid.
#[derive(Debug, Clone)]
pub struct WeightFields {
    params: WeightParams,
    psi: SpaceTimeFn,
    phi: SpaceTimeFn,
    rho: SpaceTimeFn,
    phi_max: f64,
}

impl WeightFields {
    pub fn params(&self) -> &WeightParams {
        &self.params
    }

    pub fn psi(&self) -> &SpaceTimeFn {
        &self.psi
    }

    pub fn phi(&self) -> &SpaceTimeFn {
        &self.phi
    }

    pub fn rho(&self) -> &SpaceTimeFn {
        &self.rho
    }

    /// Largest tabulated `phi`; weighted evaluators factor their exponentials
    /// by `exp(2 s phi_max)` so only non-positive exponents are ever taken.
    pub fn phi_max(&self) -> f64 {
        self.phi_max
    }

    pub fn grid(&self) -> Grid1D {
        self.phi.grid()
    }

    pub fn axis(&self) -> TimeAxis {
        self.phi.axis()
    }

    /// Change of variables into the conjugated frame: `v = exp(s phi) w`.
    /// Refused when the exponent would overflow once squared in the
    /// inequality terms.
    pub fn conjugate(&self, w: &SpaceTimeFn) -> Result<SpaceTimeFn> {
        w.same_shape(&self.phi)?;
        let s = self.params.s();
        if s * self.phi_max > 300.0 {
            return Err(Error::Parameter(format!(
                "s phi_max = {} too large to conjugate without overflow",
                s * self.phi_max
            )));
        }
        let grid = self.grid();
        let axis = self.axis();
        let mut v = SpaceTimeFn::zeros(grid, axis);
        for n in 0..axis.num_points() {
            for j in 0..grid.num_nodes() {
                v.set(n, j, crate::fmath::exp(s * self.phi.at(n, j)) * w.at(n, j));
            }
        }
        Ok(v)
    }
}

/// Tabulate the weight fields. The axis must span `[-T, T]`; the exponent
/// `lambda psi` is refused beyond the overflow guard.
pub fn eval_weights(params: &WeightParams, grid: Grid1D, axis: TimeAxis) -> Result<WeightFields> {
    if !(params.s() > 0.0) {
        return Err(Error::Parameter(
            "weight tabulation needs s > 0; call with_s first".into(),
        ));
    }
    let t = params.t_half();
    if (axis.t0() + t).abs() > 1e-12 || (axis.t_final() - t).abs() > 1e-12 {
        return Err(Error::Dimension(format!(
            "weight axis must span [-T, T] = [{}, {}], got [{}, {}]",
            -t,
            t,
            axis.t0(),
            axis.t_final()
        )));
    }
    // psi is largest at t = 0, x = 1
    let psi_max = params.psi(0.0, 1.0);
    if params.lambda() * psi_max > EXP_GUARD {
        return Err(Error::Parameter(format!(
            "lambda psi_max = {} overflows exp; lower lambda or rescale psi",
            params.lambda() * psi_max
        )));
    }
    let psi = SpaceTimeFn::from_fn(grid, axis, |tt, x| params.psi(tt, x));
    let phi = SpaceTimeFn::from_fn(grid, axis, |tt, x| params.phi(tt, x));
    let rho = SpaceTimeFn::from_fn(grid, axis, |tt, x| params.rho(tt, x));
    let mut phi_max = 0.0f64;
    for n in 0..axis.num_points() {
        for j in 0..grid.num_nodes() {
            phi_max = phi_max.max(phi.at(n, j));
        }
    }
    Ok(WeightFields {
        params: *params,
        psi,
        phi,
        rho,
        phi_max,
    })
}
