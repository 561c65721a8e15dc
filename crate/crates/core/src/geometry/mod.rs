//! Exact rational linear programming and polytope computations.

pub mod lp;
pub mod polytope;

pub use lp::{form_range, lp_feasible, lp_minimize, minimize_form, Feasibility, LpSolution, RationalLp, Q};
pub use polytope::{
    affine_dimension, count_integral_points, enumerate_integral_points, enumerate_vertices, fiber_witness,
    for_each_integral_point, for_each_projected_lattice_point, minimal_dilation, FiberPolytope, Generator, VertexSet,
};
