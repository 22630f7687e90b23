//! Carleman weights for the discrete wave operator, the conjugated-operator
//! coefficient tables, the self/skew splitting, and numerical evaluators for
//! the unweighted and weighted inequality forms.
//!
//! The weight is built from `psi(t,x) = |x - x0|^2 - beta t^2 + C0` with
//! `C0 = 1 + beta T^2` (so `psi >= 1` on the whole space-time box),
//! `phi = exp(lambda psi)` and `rho = exp(-s phi)` on `[-T,T] x [0,1]`.

mod checks;
mod coeffs;
mod operator;
mod weights;

pub use checks::{
    carleman_w_check, cutoff_chi, decompo_check, test_function, RatioReport, TestFunctionKind,
};
pub use coeffs::{coeffs, ConjCoeffs};
pub use operator::{check_split_identity, conjugate_apply, split, split_residual, SplitFields};
pub use weights::{eval_weights, WeightFields};

use alloc::format;

use crate::error::{Error, Result};
use crate::fmath;

/// How strictly the parameter set is validated: the plain estimate holds for
/// any horizon, the inverse-problem application needs `T > 1 + |x0|` and a
/// matching cutoff margin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    Carleman,
    Inverse,
}

/// Validated weight parameters. `s` starts at zero and is set per sweep cell
/// through [`WeightParams::with_s`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    x0: f64,
    beta: f64,
    lambda: f64,
    s: f64,
    c0: f64,
    t_half: f64,
    eps: f64,
    eta: f64,
    mode: WeightMode,
}

/// Smallest `lambda` that makes the zero-order quadratic lower bound of the
/// cross-product positive: `(3 beta + 1)^2 / (2 c)` with
/// `c = 16 (1 - beta) x0^2` (the infimum of `|x - x0|^2` over `(0,1)` sits
/// at `x = 0` since `x0 < 0`).
pub fn lambda_min(beta: f64, x0: f64) -> f64 {
    let c = 16.0 * (1.0 - beta) * x0 * x0;
    let b = 3.0 * beta + 1.0;
    b * b / (2.0 * c)
}

impl WeightParams {
    /// Validate ranges and fix the experiment's `lambda` at
    /// `max(lambda, lambda_min)`. In inverse mode the cutoff margin
    /// `eta = T - (1 + |x0|)/sqrt(beta)` must be positive; in plain mode it
    /// defaults to `T/4`.
    pub fn new(
        x0: f64,
        beta: f64,
        lambda: f64,
        t_half: f64,
        eps: f64,
        mode: WeightMode,
    ) -> Result<Self> {
        if !(x0 < 0.0) {
            return Err(Error::Parameter(format!("x0 < 0 fails: x0 = {x0}")));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Parameter(format!(
                "beta in (0,1) fails: beta = {beta}"
            )));
        }
        if !(lambda > 0.0) {
            return Err(Error::Parameter(format!(
                "lambda > 0 fails: lambda = {lambda}"
            )));
        }
        if !(t_half > 0.0) {
            return Err(Error::Parameter(format!("T > 0 fails: T = {t_half}")));
        }
        if !(eps > 0.0) {
            return Err(Error::Parameter(format!("eps > 0 fails: eps = {eps}")));
        }
        let c0 = 1.0 + beta * t_half * t_half;
        let eta = match mode {
            WeightMode::Carleman => 0.25 * t_half,
            WeightMode::Inverse => {
                let reach = 1.0 + x0.abs();
                if !(t_half > reach) {
                    return Err(Error::Parameter(format!(
                        "T > 1 + |x0| fails: T = {t_half}, 1 + |x0| = {reach}"
                    )));
                }
                let eta = t_half - reach / fmath::sqrt(beta);
                if !(eta > 0.0) {
                    return Err(Error::Parameter(format!(
                        "beta >= ((1 + |x0|)/T)^2 fails: eta = {eta}"
                    )));
                }
                eta
            }
        };
        Ok(Self {
            x0,
            beta,
            lambda: lambda.max(lambda_min(beta, x0)),
            s: 0.0,
            c0,
            t_half,
            eps,
            eta,
            mode,
        })
    }

    pub fn with_s(mut self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::Parameter(format!("s > 0 fails: s = {s}")));
        }
        self.s = s;
        Ok(self)
    }

    /// Override the cutoff margin (plain mode experimentation).
    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < self.t_half) {
            return Err(Error::Parameter(format!(
                "0 < eta < T fails: eta = {eta}, T = {}",
                self.t_half
            )));
        }
        self.eta = eta;
        Ok(self)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn t_half(&self) -> f64 {
        self.t_half
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    /// Whether `s h <= eps` holds on the given spacing (the theory's range).
    pub fn in_theory(&self, h: f64) -> bool {
        self.s * h <= self.eps + 1e-15
    }

    pub fn psi(&self, t: f64, x: f64) -> f64 {
        let d = x - self.x0;
        d * d - self.beta * t * t + self.c0
    }

    pub fn phi(&self, t: f64, x: f64) -> f64 {
        fmath::exp(self.lambda * self.psi(t, x))
    }

    pub fn rho(&self, t: f64, x: f64) -> f64 {
        fmath::exp(-self.s * self.phi(t, x))
    }

    pub fn dpsi_dx(&self, x: f64) -> f64 {
        2.0 * (x - self.x0)
    }

    pub fn d2psi_dx2(&self) -> f64 {
        2.0
    }

    pub fn dpsi_dt(&self, t: f64) -> f64 {
        -2.0 * self.beta * t
    }

    pub fn d2psi_dt2(&self) -> f64 {
        -2.0 * self.beta
    }
}
