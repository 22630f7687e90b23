//! The conjugated wave operator and its self/skew splitting, assembled from
//! the tabulated coefficient fields. Time derivatives use the shared centered
//! stencils; spatial operators act slice by slice on interior nodes.

use crate::carleman::{ConjCoeffs, WeightParams};
use crate::error::{Error, Result};
use crate::spacetime::SpaceTimeFn;
use crate::time;

/// Time derivative of a space-time field, node by node.
pub(crate) fn dt_field(v: &SpaceTimeFn, order: usize) -> SpaceTimeFn {
    let grid = v.grid();
    let axis = v.axis();
    let mut out = SpaceTimeFn::zeros(grid, axis);
    for j in 0..grid.num_nodes() {
        let series = v.node_series(j);
        let d = match order {
            1 => time::d_dt(axis.dt(), &series),
            _ => time::d2_dt2(axis.dt(), &series),
        };
        for (n, val) in d.iter().enumerate() {
            out.set(n, j, *val);
        }
    }
    out
}

/// Slice-wise interior Laplacian of a space-time field.
pub(crate) fn laplace_field(v: &SpaceTimeFn) -> SpaceTimeFn {
    let grid = v.grid();
    let axis = v.axis();
    let h2 = grid.h() * grid.h();
    let mut out = SpaceTimeFn::zeros(grid, axis);
    for n in 0..axis.num_points() {
        let row = v.slice(n);
        for j in 1..=grid.n() {
            out.set(n, j, (row[j + 1] - 2.0 * row[j] + row[j - 1]) / h2);
        }
    }
    out
}

/// Slice-wise interior centered difference of a space-time field.
pub(crate) fn diff_centered_field(v: &SpaceTimeFn) -> SpaceTimeFn {
    let grid = v.grid();
    let axis = v.axis();
    let two_h = 2.0 * grid.h();
    let mut out = SpaceTimeFn::zeros(grid, axis);
    for n in 0..axis.num_points() {
        let row = v.slice(n);
        for j in 1..=grid.n() {
            out.set(n, j, (row[j + 1] - row[j - 1]) / two_h);
        }
    }
    out
}

fn check_shapes(v: &SpaceTimeFn, coeffs: &ConjCoeffs) -> Result<()> {
    v.same_shape(coeffs.a1())
}

/// Apply the conjugated operator to a field with zero spatial boundary.
pub fn conjugate_apply(
    v: &SpaceTimeFn,
    params: &WeightParams,
    coeffs: &ConjCoeffs,
) -> Result<SpaceTimeFn> {
    check_shapes(v, coeffs)?;
    let grid = v.grid();
    let axis = v.axis();
    let (s, l) = (params.s(), params.lambda());
    let dtv = dt_field(v, 1);
    let dttv = dt_field(v, 2);
    let lap = laplace_field(v);
    let dc = diff_centered_field(v);
    let mut out = SpaceTimeFn::zeros(grid, axis);
    for n in 0..axis.num_points() {
        let t = axis.t(n);
        let pt = params.dpsi_dt(t);
        let ptt = params.d2psi_dt2();
        for j in 1..=grid.n() {
            let x = grid.node(j);
            let phi = params.phi(t, x);
            let time_coeff =
                s * s * l * l * phi * phi * pt * pt - s * l * l * phi * pt * pt - s * l * phi * ptt;
            let space_coeff = s * s * l * l * coeffs.a2().at(n, j)
                - s * l * l * coeffs.a3().at(n, j)
                - s * l * coeffs.a4().at(n, j);
            let val = dttv.at(n, j) - 2.0 * s * l * phi * pt * dtv.at(n, j)
                + time_coeff * v.at(n, j)
                - (1.0 + coeffs.a0().at(n, j)) * lap.at(n, j)
                + 2.0 * s * l * coeffs.a1().at(n, j) * dc.at(n, j)
                - space_coeff * v.at(n, j);
            out.set(n, j, val);
        }
    }
    Ok(out)
}

/// The two operator halves and the remainder of the splitting
/// `p1 + p2 = conjugated + r`.
#[derive(Debug, Clone)]
pub struct SplitFields {
    pub p1: SpaceTimeFn,
    pub p2: SpaceTimeFn,
    pub r: SpaceTimeFn,
}

pub fn split(v: &SpaceTimeFn, params: &WeightParams, coeffs: &ConjCoeffs) -> Result<SplitFields> {
    check_shapes(v, coeffs)?;
    let grid = v.grid();
    let axis = v.axis();
    let (s, l) = (params.s(), params.lambda());
    let dtv = dt_field(v, 1);
    let dttv = dt_field(v, 2);
    let lap = laplace_field(v);
    let dc = diff_centered_field(v);
    let mut p1 = SpaceTimeFn::zeros(grid, axis);
    let mut p2 = SpaceTimeFn::zeros(grid, axis);
    let mut r = SpaceTimeFn::zeros(grid, axis);
    for n in 0..axis.num_points() {
        let t = axis.t(n);
        let pt = params.dpsi_dt(t);
        let ptt = params.d2psi_dt2();
        for j in 1..=grid.n() {
            let x = grid.node(j);
            let phi = params.phi(t, x);
            let vv = v.at(n, j);
            p1.set(
                n,
                j,
                dttv.at(n, j) - (1.0 + coeffs.a0().at(n, j)) * lap.at(n, j)
                    + s * s * l * l * (phi * phi * pt * pt - coeffs.a2().at(n, j)) * vv,
            );
            p2.set(
                n,
                j,
                -s * l * l * (phi * pt * pt - coeffs.a3().at(n, j)) * vv
                    - 2.0 * s * l * (phi * pt * dtv.at(n, j) - coeffs.a1().at(n, j) * dc.at(n, j)),
            );
            r.set(n, j, s * l * (phi * ptt - coeffs.a4().at(n, j)) * vv);
        }
    }
    Ok(SplitFields { p1, p2, r })
}

/// Relative residual of the splitting identity
/// `p1 + p2 - (conjugated + r)`, normalised by the size of the summands.
pub fn split_residual(
    v: &SpaceTimeFn,
    params: &WeightParams,
    coeffs: &ConjCoeffs,
) -> Result<f64> {
    let parts = split(v, params, coeffs)?;
    let ph = conjugate_apply(v, params, coeffs)?;
    let grid = v.grid();
    let axis = v.axis();
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for n in 0..axis.num_points() {
        for j in 1..=grid.n() {
            let lhs = parts.p1.at(n, j) + parts.p2.at(n, j);
            let rhs = ph.at(n, j) + parts.r.at(n, j);
            num = num.max((lhs - rhs).abs());
            den = den.max(
                parts.p1.at(n, j).abs()
                    + parts.p2.at(n, j).abs()
                    + ph.at(n, j).abs()
                    + parts.r.at(n, j).abs(),
            );
        }
    }
    Ok(num / (den + f64::MIN_POSITIVE))
}

/// Splitting-consistency gate used by evaluators: fails when the identity
/// residual exceeds the stated tolerance.
pub fn check_split_identity(
    v: &SpaceTimeFn,
    params: &WeightParams,
    coeffs: &ConjCoeffs,
) -> Result<()> {
    let res = split_residual(v, params, coeffs)?;
    if res > 1e-10 {
        return Err(Error::Internal(alloc::format!(
            "splitting identity residual {res:e} exceeds 1e-10"
        )));
    }
    Ok(())
}
