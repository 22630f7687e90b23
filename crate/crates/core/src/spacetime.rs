//! Scalar fields sampled on a time axis times a node grid.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{Domain, Grid1D, NodeFn};
use crate::time::{self, TimeAxis};

/// Row-major space-time sample array: entry `(n, j)` is the value at time
/// `t_n` and node `x_j` (boundary slots included).
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeFn {
    grid: Grid1D,
    axis: TimeAxis,
    vals: Vec<f64>,
}

impl SpaceTimeFn {
    pub fn zeros(grid: Grid1D, axis: TimeAxis) -> Self {
        Self {
            grid,
            axis,
            vals: vec![0.0; axis.num_points() * grid.num_nodes()],
        }
    }

    pub fn from_fn(grid: Grid1D, axis: TimeAxis, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(grid, axis);
        for n in 0..axis.num_points() {
            let t = axis.t(n);
            for j in 0..grid.num_nodes() {
                let x = grid.node(j);
                out.vals[n * grid.num_nodes() + j] = f(t, x);
            }
        }
        out
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn axis(&self) -> TimeAxis {
        self.axis
    }

    #[inline]
    pub fn at(&self, n: usize, j: usize) -> f64 {
        self.vals[n * self.grid.num_nodes() + j]
    }

    #[inline]
    pub fn set(&mut self, n: usize, j: usize, v: f64) {
        self.vals[n * self.grid.num_nodes() + j] = v;
    }

    /// Values at time level `n`.
    pub fn slice(&self, n: usize) -> &[f64] {
        let w = self.grid.num_nodes();
        &self.vals[n * w..(n + 1) * w]
    }

    pub fn node_fn(&self, n: usize) -> NodeFn {
        NodeFn::from_values(self.grid, self.slice(n).to_vec()).expect("slice length matches grid")
    }

    /// Time series of the values at one node.
    pub fn node_series(&self, j: usize) -> Vec<f64> {
        (0..self.axis.num_points()).map(|n| self.at(n, j)).collect()
    }

    pub fn same_shape(&self, other: &SpaceTimeFn) -> Result<()> {
        if self.grid != other.grid || self.axis != other.axis {
            return Err(Error::Dimension(format!(
                "space-time shapes differ: ({}, {}) vs ({}, {})",
                self.axis.num_points(),
                self.grid.num_nodes(),
                other.axis.num_points(),
                other.grid.num_nodes()
            )));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Space-time integral of `w(self)` over nodes in `domain` and the whole
    /// axis: trapezoid in time, `h`-weighted sum in space.
    pub fn integrate_map(&self, domain: Domain, w: impl Fn(f64) -> f64) -> f64 {
        let h = self.grid.h();
        let (lo, hi) = match domain {
            Domain::Open => (1, self.grid.n()),
            Domain::LeftClosed => (0, self.grid.n()),
            Domain::RightClosed => (1, self.grid.n() + 1),
        };
        let series: Vec<f64> = (0..self.axis.num_points())
            .map(|n| {
                let row = self.slice(n);
                let mut acc = 0.0;
                for j in lo..=hi {
                    acc += w(row[j]);
                }
                h * acc
            })
            .collect();
        time::integrate_trapezoid(self.axis.dt(), &series)
    }

    /// Space-time L2 norm squared over the given node domain.
    pub fn l2_sq(&self, domain: Domain) -> f64 {
        self.integrate_map(domain, |v| v * v)
    }
}
