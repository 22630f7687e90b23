//! The seven finite-difference stencils on a uniform mesh.
//!
//! Node-valued results (`mean`, `diff_centered`, `laplace`) are defined on the
//! interior `1..=n` with boundary slots zero-filled; consumers must not read
//! them. Face-valued results use the shared face storage of [`FaceFn`]: the
//! forward operators attach face `k` to node `k`, the backward operators
//! attach the same entry to node `k+1`, which makes the arrays identical and
//! only the index view differ.

use crate::grid::{FaceFn, NodeFn};

/// Three-point mean `(f_{j+1} + 2 f_j + f_{j-1})/4` on interior nodes.
pub fn mean(f: &NodeFn) -> NodeFn {
    let g = f.grid();
    let v = f.vals();
    let mut out = NodeFn::zeros(g);
    for j in 1..=g.n() {
        out.vals_mut()[j] = 0.25 * (v[j + 1] + 2.0 * v[j] + v[j - 1]);
    }
    out
}

/// Forward two-point mean `(f_{k+1} + f_k)/2` on faces.
pub fn mean_plus(f: &NodeFn) -> FaceFn {
    let g = f.grid();
    let v = f.vals();
    let mut out = FaceFn::zeros(g);
    for k in 0..g.num_faces() {
        out.vals_mut()[k] = 0.5 * (v[k + 1] + v[k]);
    }
    out
}

/// Backward two-point mean; entry `k` holds the value at node `k+1`, so the
/// array coincides with [`mean_plus`] and is read through
/// [`FaceFn::at_right_node`].
pub fn mean_minus(f: &NodeFn) -> FaceFn {
    mean_plus(f)
}

/// Centered difference `(f_{j+1} - f_{j-1})/(2h)` on interior nodes.
pub fn diff_centered(f: &NodeFn) -> NodeFn {
    let g = f.grid();
    let v = f.vals();
    let two_h = 2.0 * g.h();
    let mut out = NodeFn::zeros(g);
    for j in 1..=g.n() {
        out.vals_mut()[j] = (v[j + 1] - v[j - 1]) / two_h;
    }
    out
}

/// Forward difference `(f_{k+1} - f_k)/h` on faces.
pub fn diff_plus(f: &NodeFn) -> FaceFn {
    let g = f.grid();
    let v = f.vals();
    let h = g.h();
    let mut out = FaceFn::zeros(g);
    for k in 0..g.num_faces() {
        out.vals_mut()[k] = (v[k + 1] - v[k]) / h;
    }
    out
}

/// Backward difference; entry `k` holds the value at node `k+1` (same array
/// as [`diff_plus`], shifted view).
pub fn diff_minus(f: &NodeFn) -> FaceFn {
    diff_plus(f)
}

/// Three-point Laplacian `(f_{j+1} - 2 f_j + f_{j-1})/h^2` on interior nodes.
pub fn laplace(f: &NodeFn) -> NodeFn {
    let g = f.grid();
    let v = f.vals();
    let h2 = g.h() * g.h();
    let mut out = NodeFn::zeros(g);
    for j in 1..=g.n() {
        out.vals_mut()[j] = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / h2;
    }
    out
}

/// Laplacian restricted to interior unknowns with zero Dirichlet boundary,
/// minus a potential term: `(lap u)_j - q_j u_j`. Boundary slots of `u` are
/// ignored and treated as zero. Used by the solver adjoint.
pub fn laplace_dirichlet_minus_q(u: &NodeFn, q: &NodeFn) -> NodeFn {
    let g = u.grid();
    let n = g.n();
    let h2 = g.h() * g.h();
    let v = u.vals();
    let mut out = NodeFn::zeros(g);
    for j in 1..=n {
        let left = if j > 1 { v[j - 1] } else { 0.0 };
        let right = if j < n { v[j + 1] } else { 0.0 };
        out.vals_mut()[j] = (right - 2.0 * v[j] + left) / h2 - q.at(j) * v[j];
    }
    out
}

/// Stencil selector for table-driven checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    Mean,
    MeanPlus,
    MeanMinus,
    DiffCentered,
    DiffPlus,
    DiffMinus,
    Laplace,
}

pub enum StencilOut {
    Node(NodeFn),
    Face(FaceFn),
}

pub fn apply(op: Stencil, f: &NodeFn) -> StencilOut {
    match op {
        Stencil::Mean => StencilOut::Node(mean(f)),
        Stencil::MeanPlus => StencilOut::Face(mean_plus(f)),
        Stencil::MeanMinus => StencilOut::Face(mean_minus(f)),
        Stencil::DiffCentered => StencilOut::Node(diff_centered(f)),
        Stencil::DiffPlus => StencilOut::Face(diff_plus(f)),
        Stencil::DiffMinus => StencilOut::Face(diff_minus(f)),
        Stencil::Laplace => StencilOut::Node(laplace(f)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use approx::assert_relative_eq;

    #[test]
    fn laplacian_of_quadratic_is_two() {
        for n in [2usize, 5, 33] {
            let g = Grid1D::new(n).unwrap();
            let f = NodeFn::sample(g, |x| x * x);
            let lf = laplace(&f);
            for j in 1..=n {
                assert_relative_eq!(lf.at(j), 2.0, epsilon = 1e-9);
            }
            assert_eq!(lf.at(0), 0.0);
            assert_eq!(lf.at(n + 1), 0.0);
        }
    }

    #[test]
    fn forward_difference_of_affine_is_slope() {
        let g = Grid1D::new(6).unwrap();
        let f = NodeFn::sample(g, |x| x);
        let df = diff_plus(&f);
        for k in 0..g.num_faces() {
            assert_relative_eq!(df.at(k), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn laplacian_factors_through_one_sided_differences() {
        // independent double-loop oracle on raw values
        let g = Grid1D::new(17).unwrap();
        let f = NodeFn::sample(g, |x| (5.0 * x).sin() * (1.0 + x));
        let h = g.h();
        let lf = laplace(&f);
        let dp = diff_plus(&f);
        for j in 1..=g.n() {
            // backward difference of the forward differences, taken by hand
            let oracle = (dp.at(j) - dp.at(j - 1)) / h;
            assert_relative_eq!(lf.at(j), oracle, max_relative = 1e-12);
        }
    }

    #[test]
    fn dispatch_returns_the_expected_shapes() {
        let g = Grid1D::new(5).unwrap();
        let f = NodeFn::sample(g, |x| x * x);
        for (op, node_valued) in [
            (Stencil::Mean, true),
            (Stencil::MeanPlus, false),
            (Stencil::MeanMinus, false),
            (Stencil::DiffCentered, true),
            (Stencil::DiffPlus, false),
            (Stencil::DiffMinus, false),
            (Stencil::Laplace, true),
        ] {
            match apply(op, &f) {
                StencilOut::Node(out) => {
                    assert!(node_valued, "{op:?} should be face-valued");
                    assert_eq!(out.vals().len(), g.num_nodes());
                    assert_eq!(out.at(0), 0.0);
                    assert_eq!(out.at(g.n() + 1), 0.0);
                }
                StencilOut::Face(out) => {
                    assert!(!node_valued, "{op:?} should be node-valued");
                    assert_eq!(out.vals().len(), g.num_faces());
                }
            }
        }
    }

    #[test]
    fn affine_extension_slope_matches_forward_difference() {
        let g = Grid1D::new(8).unwrap();
        let f = NodeFn::sample(g, |x| (2.0 * x).cos());
        let dp = diff_plus(&f);
        let e = f.extend_affine();
        let h = g.h();
        for k in 0..=g.n() {
            let xa = g.node(k) + 0.25 * h;
            let xb = g.node(k) + 0.75 * h;
            let slope = (e.eval(xb).unwrap() - e.eval(xa).unwrap()) / (0.5 * h);
            assert_relative_eq!(slope, dp.at(k), max_relative = 1e-10);
        }
    }
}
