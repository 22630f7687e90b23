//! Coefficient tables of the conjugated operator.
//!
//! The first-order coefficient and the cell-size correction come from exact
//! grid ratios of `rho` (the integral representations collapse to them by
//! the fundamental theorem of calculus and the Taylor remainder formula):
//!
//! * `a1 = -(rho_{j+1} - rho_{j-1}) / (2 h s lambda rho_j)`
//! * `a0 = (h^2/2) (rho_{j+1} - 2 rho_j + rho_{j-1}) / (h^2 rho_j)`
//!
//! The three averaged coefficients are genuine integrals in the stencil
//! offset and are tabulated by Gauss-Legendre quadrature split at the kink
//! of the hat weight `1 - |sigma|`. A residual gate checks the exact
//! combination `s^2 l^2 a2 - s l^2 a3 - s l a4 = (lap rho)/rho` afterwards
//! and rejects under-resolved orders.

use alloc::format;

use crate::carleman::{WeightFields, WeightParams};
use crate::error::{Error, Result};
use crate::fmath;
use crate::quad::GaussLegendre;
use crate::spacetime::SpaceTimeFn;

/// Relative tolerance of the combination-identity residual gate.
const COMBO_TOL: f64 = 1e-8;

/// Tabulated `a0..a4` on interior nodes (boundary slots zero).
#[derive(Debug, Clone)]
pub struct ConjCoeffs {
    a0: SpaceTimeFn,
    a1: SpaceTimeFn,
    a2: SpaceTimeFn,
    a3: SpaceTimeFn,
    a4: SpaceTimeFn,
    quad_order: usize,
    combo_residual: f64,
}

impl ConjCoeffs {
    pub fn a0(&self) -> &SpaceTimeFn {
        &self.a0
    }

    pub fn a1(&self) -> &SpaceTimeFn {
        &self.a1
    }

    pub fn a2(&self) -> &SpaceTimeFn {
        &self.a2
    }

    pub fn a3(&self) -> &SpaceTimeFn {
        &self.a3
    }

    pub fn a4(&self) -> &SpaceTimeFn {
        &self.a4
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    /// Worst relative deviation of the quadrature combination from the exact
    /// grid ratio `(lap rho)/rho`.
    pub fn combo_residual(&self) -> f64 {
        self.combo_residual
    }
}

/// Tabulate the coefficient fields from the weight tables.
pub fn coeffs(
    params: &WeightParams,
    fields: &WeightFields,
    quad_order: usize,
) -> Result<ConjCoeffs> {
    if quad_order < 8 {
        return Err(Error::Parameter(format!(
            "quadrature order >= 8 required, got {quad_order}"
        )));
    }
    let grid = fields.grid();
    let axis = fields.axis();
    let h = grid.h();
    let s = params.s();
    let lambda = params.lambda();
    let rho = fields.rho();
    let rule = GaussLegendre::new(quad_order);

    let mut a0 = SpaceTimeFn::zeros(grid, axis);
    let mut a1 = SpaceTimeFn::zeros(grid, axis);
    let mut a2 = SpaceTimeFn::zeros(grid, axis);
    let mut a3 = SpaceTimeFn::zeros(grid, axis);
    let mut a4 = SpaceTimeFn::zeros(grid, axis);

    // the combination cancels three terms down to the exact grid ratio, so
    // the residual is normalised by the term magnitudes it cancels
    let mut worst = 0.0f64;
    let mut term_scale = 0.0f64;
    for n in 0..axis.num_points() {
        let t = axis.t(n);
        for j in 1..=grid.n() {
            let x = grid.node(j);
            let r = rho.at(n, j);
            let lap_ratio = (rho.at(n, j + 1) - 2.0 * r + rho.at(n, j - 1)) / (h * h * r);
            let dh_ratio = (rho.at(n, j + 1) - rho.at(n, j - 1)) / (2.0 * h * r);
            a0.set(n, j, 0.5 * h * h * lap_ratio);
            a1.set(n, j, -dh_ratio / (s * lambda));

            let phi_x = params.phi(t, x);
            // exp(-s (phi(x + sigma h) - phi(x))) stays representable because
            // the integrand is sampled within one cell of x
            let ratio = |sig: f64| fmath::exp(-s * (params.phi(t, x + sig * h) - phi_x));
            let f2 = |sig: f64| {
                let xx = x + sig * h;
                let p = params.phi(t, xx) * params.dpsi_dx(xx);
                p * p
            };
            let f3 = |sig: f64| {
                let xx = x + sig * h;
                let d = params.dpsi_dx(xx);
                params.phi(t, xx) * d * d
            };
            let f4 = |sig: f64| params.phi(t, x + sig * h) * params.d2psi_dx2();
            let hat = |sig: f64| 1.0 - sig.abs();
            let halves = |f: &dyn Fn(f64) -> f64| {
                rule.integrate(-1.0, 0.0, |sig| hat(sig) * f(sig) * ratio(sig))
                    + rule.integrate(0.0, 1.0, |sig| hat(sig) * f(sig) * ratio(sig))
            };
            let v2 = halves(&f2);
            let v3 = halves(&f3);
            let v4 = halves(&f4);
            a2.set(n, j, v2);
            a3.set(n, j, v3);
            a4.set(n, j, v4);

            let combo = s * s * lambda * lambda * v2 - s * lambda * lambda * v3 - s * lambda * v4;
            worst = worst.max((combo - lap_ratio).abs());
            term_scale = term_scale.max(
                (s * s * lambda * lambda * v2).abs()
                    + (s * lambda * lambda * v3).abs()
                    + (s * lambda * v4).abs(),
            );
        }
    }
    // the exact reference is itself a second difference of O(rho) values and
    // carries roundoff of order eps/h^2; deviations below that bound are
    // measurement noise, not quadrature error
    let roundoff_bound = 64.0 * f64::EPSILON / (h * h);
    let combo_residual = (worst - roundoff_bound).max(0.0) / (term_scale + f64::MIN_POSITIVE);
    if combo_residual > COMBO_TOL {
        return Err(Error::QuadratureOrder {
            residual: combo_residual,
            tolerance: COMBO_TOL,
        });
    }
    Ok(ConjCoeffs {
        a0,
        a1,
        a2,
        a3,
        a4,
        quad_order,
        combo_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carleman::{eval_weights, WeightMode};
    use crate::grid::Grid1D;
    use crate::time::TimeAxis;
    use approx::assert_relative_eq;

    // compact weight geometry: the exponent variation per cell stays within
    // what the default quadrature order resolves
    fn setup(n: usize, s: f64, lambda: f64) -> (WeightParams, WeightFields) {
        let params = WeightParams::new(-0.2, 0.1, lambda, 0.5, 0.05, WeightMode::Carleman)
            .unwrap()
            .with_s(s)
            .unwrap();
        let grid = Grid1D::new(n).unwrap();
        let axis = TimeAxis::symmetric(0.5, 0.5 * grid.h()).unwrap();
        let fields = eval_weights(&params, grid, axis).unwrap();
        (params, fields)
    }

    #[test]
    fn first_order_coefficient_matches_the_grid_ratio() {
        // independent oracle: evaluate rho directly at the three nodes
        let (params, fields) = setup(16, 0.8, 1.0);
        let c = coeffs(&params, &fields, 16).unwrap();
        let grid = fields.grid();
        let axis = fields.axis();
        let (s, l, h) = (params.s(), params.lambda(), grid.h());
        for n in (0..axis.num_points()).step_by(7) {
            let t = axis.t(n);
            for j in 1..=grid.n() {
                let x = grid.node(j);
                let oracle = (params.rho(t, x + h) - params.rho(t, x - h))
                    / (2.0 * h * params.rho(t, x));
                assert_relative_eq!(-s * l * c.a1().at(n, j), oracle, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn combination_identity_holds_at_quadrature_tolerance() {
        let (params, fields) = setup(16, 1.2, 1.0);
        let c = coeffs(&params, &fields, 16).unwrap();
        assert!(c.combo_residual() <= 1e-8);
        // direct re-check against rho second differences
        let grid = fields.grid();
        let axis = fields.axis();
        let (s, l, h) = (params.s(), params.lambda(), grid.h());
        let mut worst: f64 = 0.0;
        for n in (0..axis.num_points()).step_by(11) {
            let t = axis.t(n);
            for j in 1..=grid.n() {
                let x = grid.node(j);
                let lap = (params.rho(t, x + h) - 2.0 * params.rho(t, x) + params.rho(t, x - h))
                    / (h * h * params.rho(t, x));
                let combo = s * s * l * l * c.a2().at(n, j)
                    - s * l * l * c.a3().at(n, j)
                    - s * l * c.a4().at(n, j);
                worst = worst.max((combo - lap).abs() / lap.abs().max(1.0));
            }
        }
        assert!(worst <= 1e-8, "combination residual {worst}");
    }

    #[test]
    fn vanishing_s_reduces_a2_to_the_hat_average() {
        // s -> 0+ turns the rho-ratio into 1; the remaining integral is the
        // hat average of f2, i.e. f2 + (h^2/12) f2'' + O(h^4)
        let (params, fields) = setup(64, 1e-10, 1.0);
        let c = coeffs(&params, &fields, 16).unwrap();
        let grid = fields.grid();
        let h = grid.h();
        let axis = fields.axis();
        let n_mid = axis.num_points() / 2;
        let t = axis.t(n_mid);
        let f2 = |x: f64| {
            let p = params.phi(t, x) * params.dpsi_dx(x);
            p * p
        };
        for j in (1..=grid.n()).step_by(5) {
            let x = grid.node(j);
            // second derivative of f2 by central differences (test oracle)
            let d = 1e-4;
            let f2pp = (f2(x + d) - 2.0 * f2(x) + f2(x - d)) / (d * d);
            let expect = f2(x) + h * h * f2pp / 12.0;
            assert_relative_eq!(c.a2().at(n_mid, j), expect, max_relative = 1e-5);
        }
    }

    #[test]
    fn residual_against_smooth_limits_scales_with_sh() {
        // || a_j - f_j ||_inf / (s h) stays put when h halves at fixed s h.
        // A gentle weight (large |x0| keeps the lambda floor tiny) puts the
        // coarse grids already inside the asymptotic regime.
        let lambda = 0.05;
        let sh = 1.0;
        let mut normalised = alloc::vec::Vec::new();
        for n in [16usize, 32, 64, 128] {
            let grid = Grid1D::new(n).unwrap();
            let s = sh / grid.h();
            let params = WeightParams::new(-1.0, 0.1, lambda, 0.5, 0.05, WeightMode::Carleman)
                .unwrap()
                .with_s(s)
                .unwrap();
            let axis = TimeAxis::symmetric(0.5, 0.5 * grid.h()).unwrap();
            let fields = eval_weights(&params, grid, axis).unwrap();
            let c = coeffs(&params, &fields, 16).unwrap();
            let mid = axis.num_points() / 2;
            let t = axis.t(mid);
            let mut worst: f64 = 0.0;
            for j in 1..=grid.n() {
                let x = grid.node(j);
                let f1 = params.phi(t, x) * params.dpsi_dx(x);
                worst = worst.max((c.a1().at(mid, j) - f1).abs());
            }
            normalised.push(worst / sh);
        }
        let max = normalised.iter().cloned().fold(f64::MIN, f64::max);
        let min = normalised.iter().cloned().fold(f64::MAX, f64::min);
        assert!(
            max / min < 2.0,
            "normalised residuals spread too far: {normalised:?}"
        );
    }

    #[test]
    fn low_order_is_refused() {
        let (params, fields) = setup(8, 1.0, 1.0);
        assert!(matches!(
            coeffs(&params, &fields, 4),
            Err(Error::Parameter(_))
        ));
    }
}
