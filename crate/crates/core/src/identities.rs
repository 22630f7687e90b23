//! Machine-checkable identity suite for the stencil calculus: operator
//! algebra, discrete product rules, summation by parts with boundary terms,
//! the discrete Poincare bound, and the norm compatibility of the
//! piecewise-constant extension.
//!
//! Every evaluator computes both sides from the library operators and
//! returns the worst relative deviation, normalised by the magnitude of the
//! participating terms so the check stays meaningful when the operands carry
//! `1/h^2` scales.

use alloc::vec::Vec;


use crate::grid::{Domain, NodeFn};
use crate::stencil;

/// Identity selector. `f` and `g` are free node functions; `v` must vanish
/// at both boundary nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// m+ = I + (h/2) d+
    MeanPlusShift,
    /// m = I + (h^2/4) lap
    MeanLaplace,
    /// m = m+ m-
    MeanFactorisation,
    /// d = (d+ + d-)/2
    CenteredAverage,
    /// d = d- m+ = m- d+
    CenteredFactorisation,
    /// lap = d- d+
    LaplaceFactorisation,
    /// m+(fg) = (m+f)(m+g) + (h^2/4)(d+f)(d+g)
    ProductMeanPlus,
    /// d+(fg) = (d+f)(m+g) + (m+f)(d+g)
    ProductDiffPlus,
    /// d-(fg) = (d-f)(m-g) + (m-f)(d-g), read in the shifted view
    ProductDiffMinus,
    /// lap(fg) = (lap f)(m g) + 2 (d f)(d g) + (m f)(lap g)
    ProductLaplace,
    /// sum g d+f = -sum (d-g) f + boundary terms
    SbpShift,
    /// sum g df = sum (m+g)(d+f) - (h/2) g_0 (d+f)_0 - (h/2) g_{N+1} (d-f)_{N+1}
    SbpCentered,
    /// 2 sum g v dv = -sum v^2 dg + (h^2/2) sum (d+v)^2 d+g
    SbpWeightedZero,
    /// sum g lap v = -sum (d+v)(d+g) - (d+v)_0 g_0 + (d-v)_{N+1} g_{N+1}
    SbpLaplace,
    /// sum g v lap v = -sum (d+v)^2 m+g + (1/2) sum v^2 lap g
    SbpLaplaceQuadratic,
    /// sum g (lap v)(dv) = -(1/2) sum (d+v)^2 d+g + boundary halves
    SbpLaplaceGradient,
    /// L2 norm of the piecewise-constant extension equals the discrete norm
    ExtensionNorm,
}

pub const ALL: [Identity; 17] = [
    Identity::MeanPlusShift,
    Identity::MeanLaplace,
    Identity::MeanFactorisation,
    Identity::CenteredAverage,
    Identity::CenteredFactorisation,
    Identity::LaplaceFactorisation,
    Identity::ProductMeanPlus,
    Identity::ProductDiffPlus,
    Identity::ProductDiffMinus,
    Identity::ProductLaplace,
    Identity::SbpShift,
    Identity::SbpCentered,
    Identity::SbpWeightedZero,
    Identity::SbpLaplace,
    Identity::SbpLaplaceQuadratic,
    Identity::SbpLaplaceGradient,
    Identity::ExtensionNorm,
];

impl Identity {
    pub fn name(self) -> &'static str {
        match self {
            Identity::MeanPlusShift => "mean_plus_shift",
            Identity::MeanLaplace => "mean_laplace",
            Identity::MeanFactorisation => "mean_factorisation",
            Identity::CenteredAverage => "centered_average",
            Identity::CenteredFactorisation => "centered_factorisation",
            Identity::LaplaceFactorisation => "laplace_factorisation",
            Identity::ProductMeanPlus => "product_mean_plus",
            Identity::ProductDiffPlus => "product_diff_plus",
            Identity::ProductDiffMinus => "product_diff_minus",
            Identity::ProductLaplace => "product_laplace",
            Identity::SbpShift => "sbp_shift",
            Identity::SbpCentered => "sbp_centered",
            Identity::SbpWeightedZero => "sbp_weighted_zero",
            Identity::SbpLaplace => "sbp_laplace",
            Identity::SbpLaplaceQuadratic => "sbp_laplace_quadratic",
            Identity::SbpLaplaceGradient => "sbp_laplace_gradient",
            Identity::ExtensionNorm => "extension_norm",
        }
    }
}

fn rel(diffs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    // max_j |L_j - R_j| / (max_j (|L_j| + |R_j|) + tiny)
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for (l, r) in diffs {
        num = num.max((l - r).abs());
        den = den.max(l.abs() + r.abs());
    }
    num / (den + f64::MIN_POSITIVE)
}

fn rel_scalar(lhs: f64, rhs: f64, scale: f64) -> f64 {
    (lhs - rhs).abs() / (scale + f64::MIN_POSITIVE)
}

/// Evaluate one identity; returns the relative error. `v` is assumed to have
/// zero boundary slots (the SBP variants need it).
pub fn eval(which: Identity, f: &NodeFn, g: &NodeFn, v: &NodeFn) -> f64 {
    let grid = f.grid();
    let n = grid.n();
    let h = grid.h();
    match which {
        Identity::MeanPlusShift => {
            let mp = stencil::mean_plus(f);
            let dp = stencil::diff_plus(f);
            rel((0..=n).map(|k| (mp.at(k), f.at(k) + 0.5 * h * dp.at(k))))
        }
        Identity::MeanLaplace => {
            let m = stencil::mean(f);
            let l = stencil::laplace(f);
            rel((1..=n).map(|j| (m.at(j), f.at(j) + 0.25 * h * h * l.at(j))))
        }
        Identity::MeanFactorisation => {
            let m = stencil::mean(f);
            let mm = stencil::mean_minus(f); // value at node k+1 in slot k
            rel((1..=n).map(|j| {
                // forward mean of the node function m-f: average of its
                // values at nodes j and j+1
                let mf_j = mm.at_right_node(j);
                let mf_j1 = mm.at_right_node(j + 1);
                (m.at(j), 0.5 * (mf_j + mf_j1))
            }))
        }
        Identity::CenteredAverage => {
            let d = stencil::diff_centered(f);
            let dp = stencil::diff_plus(f);
            let dm = stencil::diff_minus(f);
            rel((1..=n).map(|j| (d.at(j), 0.5 * (dp.at(j) + dm.at_right_node(j)))))
        }
        Identity::CenteredFactorisation => {
            let d = stencil::diff_centered(f);
            let mp = stencil::mean_plus(f);
            let dp = stencil::diff_plus(f);
            let mut worst: f64 = 0.0;
            // d = d- (m+ f): backward difference of the face-attached means
            worst = worst.max(rel(
                (1..=n).map(|j| (d.at(j), (mp.at(j) - mp.at(j - 1)) / h)),
            ));
            // d = m- (d+ f): backward mean of the face-attached differences
            worst = worst.max(rel(
                (1..=n).map(|j| (d.at(j), 0.5 * (dp.at(j) + dp.at(j - 1)))),
            ));
            worst
        }
        Identity::LaplaceFactorisation => {
            let l = stencil::laplace(f);
            let dp = stencil::diff_plus(f);
            rel((1..=n).map(|j| (l.at(j), (dp.at(j) - dp.at(j - 1)) / h)))
        }
        Identity::ProductMeanPlus => {
            let fg = f.mul(g);
            let lhs = stencil::mean_plus(&fg);
            let mf = stencil::mean_plus(f);
            let mg = stencil::mean_plus(g);
            let df = stencil::diff_plus(f);
            let dg = stencil::diff_plus(g);
            rel((0..=n).map(|k| {
                (
                    lhs.at(k),
                    mf.at(k) * mg.at(k) + 0.25 * h * h * df.at(k) * dg.at(k),
                )
            }))
        }
        Identity::ProductDiffPlus => {
            let fg = f.mul(g);
            let lhs = stencil::diff_plus(&fg);
            let mf = stencil::mean_plus(f);
            let mg = stencil::mean_plus(g);
            let df = stencil::diff_plus(f);
            let dg = stencil::diff_plus(g);
            rel((0..=n).map(|k| (lhs.at(k), df.at(k) * mg.at(k) + mf.at(k) * dg.at(k))))
        }
        Identity::ProductDiffMinus => {
            let fg = f.mul(g);
            let lhs = stencil::diff_minus(&fg);
            let mf = stencil::mean_minus(f);
            let mg = stencil::mean_minus(g);
            let df = stencil::diff_minus(f);
            let dg = stencil::diff_minus(g);
            rel((1..=n + 1).map(|j| {
                (
                    lhs.at_right_node(j),
                    df.at_right_node(j) * mg.at_right_node(j)
                        + mf.at_right_node(j) * dg.at_right_node(j),
                )
            }))
        }
        Identity::ProductLaplace => {
            let fg = f.mul(g);
            let lhs = stencil::laplace(&fg);
            let lf = stencil::laplace(f);
            let lg = stencil::laplace(g);
            let mf = stencil::mean(f);
            let mg = stencil::mean(g);
            let df = stencil::diff_centered(f);
            let dg = stencil::diff_centered(g);
            rel((1..=n).map(|j| {
                (
                    lhs.at(j),
                    lf.at(j) * mg.at(j) + 2.0 * df.at(j) * dg.at(j) + mf.at(j) * lg.at(j),
                )
            }))
        }
        Identity::SbpShift => {
            // sum_[0,1) g d+f = -sum_(0,1] (d-g) f + g_{N+1} f_{N+1} - g_0 f_0
            let dpf = stencil::diff_plus(f);
            let dmg = stencil::diff_minus(g);
            let mut lhs = 0.0;
            for k in 0..=n {
                lhs += g.at(k) * dpf.at(k);
            }
            lhs *= h;
            let mut shifted = 0.0;
            for j in 1..=n + 1 {
                shifted += dmg.at_right_node(j) * f.at(j);
            }
            let b1 = g.at(n + 1) * f.at(n + 1);
            let b0 = g.at(0) * f.at(0);
            let rhs = -h * shifted + b1 - b0;
            rel_scalar(lhs, rhs, lhs.abs() + (h * shifted).abs() + b1.abs() + b0.abs())
        }
        Identity::SbpCentered => {
            let df = stencil::diff_centered(f);
            let dpf = stencil::diff_plus(f);
            let mpg = stencil::mean_plus(g);
            let mut lhs = 0.0;
            for j in 1..=n {
                lhs += g.at(j) * df.at(j);
            }
            lhs *= h;
            let mut face = 0.0;
            for k in 0..=n {
                face += mpg.at(k) * dpf.at(k);
            }
            let t1 = 0.5 * h * g.at(0) * dpf.at(0);
            let t2 = 0.5 * h * g.at(n + 1) * stencil::diff_minus(f).at_right_node(n + 1);
            let rhs = h * face - t1 - t2;
            rel_scalar(lhs, rhs, lhs.abs() + (h * face).abs() + t1.abs() + t2.abs())
        }
        Identity::SbpWeightedZero => {
            let dv = stencil::diff_centered(v);
            let dg = stencil::diff_centered(g);
            let dpv = stencil::diff_plus(v);
            let dpg = stencil::diff_plus(g);
            let mut lhs = 0.0;
            for j in 1..=n {
                lhs += g.at(j) * v.at(j) * dv.at(j);
            }
            lhs *= 2.0 * h;
            let mut a = 0.0;
            for j in 1..=n {
                a += v.at(j) * v.at(j) * dg.at(j);
            }
            a *= h;
            let mut b = 0.0;
            for k in 0..=n {
                b += dpv.at(k) * dpv.at(k) * dpg.at(k);
            }
            b *= 0.5 * h * h * h;
            let rhs = -a + b;
            rel_scalar(lhs, rhs, lhs.abs() + a.abs() + b.abs())
        }
        Identity::SbpLaplace => {
            let lv = stencil::laplace(v);
            let dpv = stencil::diff_plus(v);
            let dpg = stencil::diff_plus(g);
            let mut lhs = 0.0;
            for j in 1..=n {
                lhs += g.at(j) * lv.at(j);
            }
            lhs *= h;
            let mut face = 0.0;
            for k in 0..=n {
                face += dpv.at(k) * dpg.at(k);
            }
            face *= h;
            let b0 = dpv.at(0) * g.at(0);
            let b1 = stencil::diff_minus(v).at_right_node(n + 1) * g.at(n + 1);
            let rhs = -face - b0 + b1;
            rel_scalar(lhs, rhs, lhs.abs() + face.abs() + b0.abs() + b1.abs())
        }
        Identity::SbpLaplaceQuadratic => {
            let lv = stencil::laplace(v);
            let lg = stencil::laplace(g);
            let dpv = stencil::diff_plus(v);
            let mpg = stencil::mean_plus(g);
            let mut lhs = 0.0;
            for j in 1..=n {
                lhs += g.at(j) * v.at(j) * lv.at(j);
            }
            lhs *= h;
            let mut a = 0.0;
            for k in 0..=n {
                a += dpv.at(k) * dpv.at(k) * mpg.at(k);
            }
            a *= h;
            let mut b = 0.0;
            for j in 1..=n {
                b += v.at(j) * v.at(j) * lg.at(j);
            }
            b *= 0.5 * h;
            let rhs = -a + b;
            rel_scalar(lhs, rhs, lhs.abs() + a.abs() + b.abs())
        }
        Identity::SbpLaplaceGradient => {
            let lv = stencil::laplace(v);
            let dv = stencil::diff_centered(v);
            let dpv = stencil::diff_plus(v);
            let dpg = stencil::diff_plus(g);
            let mut lhs = 0.0;
            for j in 1..=n {
                lhs += g.at(j) * lv.at(j) * dv.at(j);
            }
            lhs *= h;
            let mut a = 0.0;
            for k in 0..=n {
                a += dpv.at(k) * dpv.at(k) * dpg.at(k);
            }
            a *= 0.5 * h;
            let bflux = stencil::diff_minus(v).at_right_node(n + 1);
            let b1 = 0.5 * bflux * bflux * g.at(n + 1);
            let b0 = 0.5 * dpv.at(0) * dpv.at(0) * g.at(0);
            let rhs = -a + b1 - b0;
            rel_scalar(lhs, rhs, lhs.abs() + a.abs() + b1.abs() + b0.abs())
        }
        Identity::ExtensionNorm => {
            let via_ext = f.extend_const().l2_norm();
            let direct = f.norm_l2(Domain::Open);
            rel_scalar(via_ext, direct, via_ext.abs() + direct.abs())
        }
    }
}

/// Worst relative error of every identity for one `(f, g, v)` triple.
pub fn eval_all(f: &NodeFn, g: &NodeFn, v: &NodeFn) -> Vec<(Identity, f64)> {
    ALL.iter().map(|&id| (id, eval(id, f, g, v))).collect()
}

/// Discrete Poincare ratio `int |v|^2 / int |d+ v|^2` for a zero-boundary
/// function; `None` when the gradient vanishes.
pub fn poincare_ratio(v: &NodeFn) -> Option<f64> {
    let dpv = stencil::diff_plus(v);
    let num = v.l2_sq_open();
    let den = dpv.l2_sq_faces();
    if den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

impl NodeFn {
    fn l2_sq_open(&self) -> f64 {
        let s = self.norm_l2(Domain::Open);
        s * s
    }
}

impl crate::grid::FaceFn {
    fn l2_sq_faces(&self) -> f64 {
        let s = self.norm_l2();
        s * s
    }
}
