//! Uniform 1-d mesh on [0,1] and the discrete function types living on it.
//!
//! A grid with `n` interior nodes has spacing `h = 1/(n+1)` and nodes
//! `x_j = j*h` for `j` in `0..=n+1`, boundary included. Node functions store
//! all `n+2` slots so Dirichlet data and the outgoing flux need no side
//! channel. Face functions store `n+1` values; face `k` sits between nodes
//! `k` and `k+1`, so the same array serves both the `[0,1)` view (value
//! attached to node `k`) and the shifted `(0,1]` view (value attached to
//! node `k+1`).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};

/// Uniform mesh: `n` interior nodes, spacing `h = 1/(n+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n: usize,
    h: f64,
}

impl Grid1D {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Parameter(format!(
                "interior node count must satisfy n >= 1, got {n}"
            )));
        }
        Ok(Self {
            n,
            h: 1.0 / (n + 1) as f64,
        })
    }

    /// Interior node count N.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Node coordinate `x_j = j*h`, `j` in `0..=n+1`.
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    /// Total node slots including both boundaries.
    pub fn num_nodes(&self) -> usize {
        self.n + 2
    }

    /// Number of faces (cells), i.e. `n+1`.
    pub fn num_faces(&self) -> usize {
        self.n + 1
    }
}

/// Index set of a discrete node integral: `h * sum` over the interior `(0,1)`,
/// over `[0,1)` (left boundary node included) or over `(0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Open,
    LeftClosed,
    RightClosed,
}

impl Domain {
    fn range(self, n: usize) -> core::ops::RangeInclusive<usize> {
        match self {
            Domain::Open => 1..=n,
            Domain::LeftClosed => 0..=n,
            Domain::RightClosed => 1..=n + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpNorm {
    One,
    Two,
    Infinity,
}

/// Real-valued function on the nodes of a [`Grid1D`], boundary slots included.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeFn {
    grid: Grid1D,
    vals: Vec<f64>,
}

impl NodeFn {
    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            vals: vec![0.0; grid.num_nodes()],
        }
    }

    pub fn from_values(grid: Grid1D, vals: Vec<f64>) -> Result<Self> {
        if vals.len() != grid.num_nodes() {
            return Err(Error::Dimension(format!(
                "node function needs {} values, got {}",
                grid.num_nodes(),
                vals.len()
            )));
        }
        Ok(Self { grid, vals })
    }

    /// Sample a function of `x` at every node.
    pub fn sample(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let vals = (0..grid.num_nodes()).map(|j| f(grid.node(j))).collect();
        Self { grid, vals }
    }

    /// Constant value at every node.
    pub fn constant(grid: Grid1D, c: f64) -> Self {
        Self {
            grid,
            vals: vec![c; grid.num_nodes()],
        }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    pub fn vals_mut(&mut self) -> &mut [f64] {
        &mut self.vals
    }

    pub fn at(&self, j: usize) -> f64 {
        self.vals[j]
    }

    /// `h * sum` of the values over the indicated index set.
    pub fn integral(&self, domain: Domain) -> f64 {
        let mut acc = 0.0;
        for j in domain.range(self.grid.n) {
            acc += self.vals[j];
        }
        self.grid.h * acc
    }

    pub fn norm(&self, p: LpNorm, domain: Domain) -> f64 {
        match p {
            LpNorm::One => {
                let mut acc = 0.0;
                for j in domain.range(self.grid.n) {
                    acc += self.vals[j].abs();
                }
                self.grid.h * acc
            }
            LpNorm::Two => {
                let mut acc = 0.0;
                for j in domain.range(self.grid.n) {
                    acc += self.vals[j] * self.vals[j];
                }
                crate::fmath::sqrt(self.grid.h * acc)
            }
            LpNorm::Infinity => {
                let mut acc: f64 = 0.0;
                for j in domain.range(self.grid.n) {
                    acc = acc.max(self.vals[j].abs());
                }
                acc
            }
        }
    }

    pub fn norm_l2(&self, domain: Domain) -> f64 {
        self.norm(LpNorm::Two, domain)
    }

    /// Discrete outgoing flux at `x = 1`: `(f_{N+1} - f_N)/h`.
    pub fn boundary_flux(&self) -> f64 {
        let m = self.vals.len();
        (self.vals[m - 1] - self.vals[m - 2]) / self.grid.h
    }

    pub fn has_zero_boundary(&self) -> bool {
        self.vals[0] == 0.0 && self.vals[self.vals.len() - 1] == 0.0
    }

    /// Continuous piecewise-affine extension to [0,1].
    pub fn extend_affine(&self) -> AffineExtension<'_> {
        AffineExtension { f: self }
    }

    /// Piecewise-constant extension: `f_j` on the cell centred at `x_j`,
    /// zero on the two half-cells hugging the boundary.
    pub fn extend_const(&self) -> ConstExtension<'_> {
        ConstExtension { f: self }
    }

    fn check_same_grid(&self, other: &NodeFn) {
        assert_eq!(
            self.grid, other.grid,
            "node functions live on different grids"
        );
    }

    /// Pointwise product (same grid required).
    pub fn mul(&self, other: &NodeFn) -> NodeFn {
        self.check_same_grid(other);
        let vals = self
            .vals
            .iter()
            .zip(&other.vals)
            .map(|(a, b)| a * b)
            .collect();
        NodeFn {
            grid: self.grid,
            vals,
        }
    }

    pub fn add(&self, other: &NodeFn) -> NodeFn {
        self.check_same_grid(other);
        let vals = self
            .vals
            .iter()
            .zip(&other.vals)
            .map(|(a, b)| a + b)
            .collect();
        NodeFn {
            grid: self.grid,
            vals,
        }
    }

    pub fn sub(&self, other: &NodeFn) -> NodeFn {
        self.check_same_grid(other);
        let vals = self
            .vals
            .iter()
            .zip(&other.vals)
            .map(|(a, b)| a - b)
            .collect();
        NodeFn {
            grid: self.grid,
            vals,
        }
    }

    pub fn scale(&self, c: f64) -> NodeFn {
        NodeFn {
            grid: self.grid,
            vals: self.vals.iter().map(|a| c * a).collect(),
        }
    }
}

/// Real-valued function on the faces of a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct FaceFn {
    grid: Grid1D,
    vals: Vec<f64>,
}

impl FaceFn {
    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            vals: vec![0.0; grid.num_faces()],
        }
    }

    pub fn from_values(grid: Grid1D, vals: Vec<f64>) -> Result<Self> {
        if vals.len() != grid.num_faces() {
            return Err(Error::Dimension(format!(
                "face function needs {} values, got {}",
                grid.num_faces(),
                vals.len()
            )));
        }
        Ok(Self { grid, vals })
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    pub fn vals_mut(&mut self) -> &mut [f64] {
        &mut self.vals
    }

    /// Value attached to the left node of face `k` (the `[0,1)` view).
    pub fn at(&self, k: usize) -> f64 {
        self.vals[k]
    }

    /// Same array read in the shifted `(0,1]` view: value at node `j`,
    /// `j` in `1..=n+1`.
    pub fn at_right_node(&self, j: usize) -> f64 {
        self.vals[j - 1]
    }

    /// `h * sum` over all faces; this is both the `[0,1)` and the `(0,1]`
    /// integral of the stored values.
    pub fn integral(&self) -> f64 {
        self.grid.h * self.vals.iter().sum::<f64>()
    }

    pub fn norm(&self, p: LpNorm) -> f64 {
        match p {
            LpNorm::One => self.grid.h * self.vals.iter().map(|v| v.abs()).sum::<f64>(),
            LpNorm::Two => {
                crate::fmath::sqrt(self.grid.h * self.vals.iter().map(|v| v * v).sum::<f64>())
            }
            LpNorm::Infinity => self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm(LpNorm::Two)
    }

    pub fn sub(&self, other: &FaceFn) -> FaceFn {
        assert_eq!(
            self.grid, other.grid,
            "face functions live on different grids"
        );
        FaceFn {
            grid: self.grid,
            vals: self
                .vals
                .iter()
                .zip(&other.vals)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Continuous piecewise-affine extension of a node function.
pub struct AffineExtension<'a> {
    f: &'a NodeFn,
}

impl AffineExtension<'_> {
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0,1]")));
        }
        let grid = self.f.grid;
        let h = grid.h();
        let mut j = (x / h) as usize;
        if j > grid.n() {
            j = grid.n(); // x == 1 falls into the last cell
        }
        let fj = self.f.at(j);
        let slope = (self.f.at(j + 1) - fj) / h;
        Ok(fj + slope * (x - grid.node(j)))
    }
}

/// Piecewise-constant extension of a node function (interior cells only).
pub struct ConstExtension<'a> {
    f: &'a NodeFn,
}

impl ConstExtension<'_> {
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0,1]")));
        }
        let grid = self.f.grid;
        let h = grid.h();
        let n = grid.n();
        if x < 0.5 * h || x >= (n as f64 + 0.5) * h {
            return Ok(0.0);
        }
        let j = (x / h + 0.5) as usize;
        Ok(self.f.at(j))
    }

    /// Exact L2(0,1) norm of the extension; every interior cell has width `h`,
    /// so this equals the discrete L2 norm over `(0,1)`.
    pub fn l2_norm(&self) -> f64 {
        self.f.norm_l2(Domain::Open)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_spacing_is_one_over_n_plus_one() {
        let g = Grid1D::new(3).unwrap();
        assert_relative_eq!(g.h(), 0.25);
        assert_relative_eq!(g.h() * (g.n() + 1) as f64, 1.0, max_relative = 1e-15);
        assert_eq!(g.num_nodes(), 5);
        assert!(Grid1D::new(0).is_err());
    }

    #[test]
    fn integral_examples_on_n3() {
        let g = Grid1D::new(3).unwrap();
        let one = NodeFn::constant(g, 1.0);
        assert_relative_eq!(one.integral(Domain::Open), 0.75);
        let x = NodeFn::sample(g, |x| x);
        // h^2 * (1 + 2 + 3)
        assert_relative_eq!(x.integral(Domain::Open), 0.375);
        let z = NodeFn::zeros(g);
        assert_eq!(z.integral(Domain::Open), 0.0);
        assert_eq!(z.integral(Domain::LeftClosed), 0.0);
        assert_eq!(z.integral(Domain::RightClosed), 0.0);
    }

    #[test]
    fn norm_examples() {
        let g = Grid1D::new(3).unwrap();
        let c = NodeFn::constant(g, -2.5);
        assert_relative_eq!(c.norm(LpNorm::Infinity, Domain::Open), 2.5);
        let one = NodeFn::constant(g, 1.0);
        assert_relative_eq!(one.norm_l2(Domain::Open), 0.75f64.sqrt());
        assert_eq!(NodeFn::zeros(g).norm_l2(Domain::Open), 0.0);
    }

    #[test]
    fn boundary_flux_examples() {
        let g = Grid1D::new(7).unwrap();
        let h = g.h();
        let mut f = NodeFn::zeros(g);
        f.vals_mut()[7] = 3.0; // f_N = a, f_{N+1} = 0
        assert_relative_eq!(f.boundary_flux(), -3.0 / h);
        let x = NodeFn::sample(g, |x| x);
        assert_relative_eq!(x.boundary_flux(), 1.0, max_relative = 1e-12);
        let x2 = NodeFn::sample(g, |x| x * x);
        assert_relative_eq!(x2.boundary_flux(), 2.0 - h, max_relative = 1e-12);
    }

    #[test]
    fn affine_extension_interpolates() {
        let g = Grid1D::new(5).unwrap();
        let f = NodeFn::sample(g, |x| x);
        let e = f.extend_affine();
        for j in 0..g.num_nodes() {
            assert_relative_eq!(e.eval(g.node(j)).unwrap(), g.node(j), epsilon = 1e-15);
        }
        assert_relative_eq!(e.eval(0.37).unwrap(), 0.37, epsilon = 1e-15);
        assert!(e.eval(-0.1).is_err());
        assert!(e.eval(1.1).is_err());

        // midpoint value is the two-node mean
        let f = NodeFn::sample(g, |x| (3.1 * x).sin());
        let e = f.extend_affine();
        for j in 0..=g.n() {
            let mid = (g.node(j) + g.node(j + 1)) / 2.0;
            assert_relative_eq!(
                e.eval(mid).unwrap(),
                0.5 * (f.at(j) + f.at(j + 1)),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn const_extension_norm_matches_discrete_norm() {
        // brute-force cell integration oracle for a few random-ish values
        let g = Grid1D::new(9).unwrap();
        let f = NodeFn::sample(g, |x| (7.0 * x).sin() + 0.3);
        let e = f.extend_const();
        // integrate |e|^2 over [0,1] by midpoint on a fine subgrid of each cell
        let mut acc = 0.0;
        let m = 2000usize;
        let dx = 1.0 / m as f64;
        for i in 0..m {
            let x = (i as f64 + 0.5) * dx;
            let v = e.eval(x).unwrap();
            acc += v * v * dx;
        }
        assert_relative_eq!(acc.sqrt(), e.l2_norm(), max_relative = 1e-3);
        // and the exact closed-form cell sum
        let h = g.h();
        let exact: f64 = (1..=g.n()).map(|j| f.at(j) * f.at(j) * h).sum();
        assert_relative_eq!(exact.sqrt(), e.l2_norm(), max_relative = 1e-14);
    }

    #[test]
    fn const_extension_of_one_is_inner_indicator() {
        let g = Grid1D::new(3).unwrap();
        let one = NodeFn::constant(g, 1.0);
        let e = one.extend_const();
        let h = g.h();
        assert_eq!(e.eval(0.25 * h).unwrap(), 0.0);
        assert_eq!(e.eval(0.75 * h).unwrap(), 1.0);
        assert_eq!(e.eval(1.0 - 0.25 * h).unwrap(), 0.0);
        assert_eq!(NodeFn::zeros(g).extend_const().eval(0.5).unwrap(), 0.0);
    }
}
