//! Mixed unit interval graphs and their bubble models.
//!
//! A mixed unit interval graph is the intersection graph of unit-length
//! intervals on the line where each end may independently be open or closed.
//! This crate builds the canonical bubble model of such a graph from an
//! interval representation in one left-to-right pass, goes back from a model
//! to a representation, and runs the combinatorial algorithms that the model
//! enables: exact MaxCut (brute force, the subexponential heavy/light column
//! DP, and the bounded-column-count variant), maximum clique, independence
//! number bounds, and two clique-width expression builders.

pub mod build;
pub mod cliquewidth;
pub mod gen;
pub mod graph;
pub mod interval;
pub mod maxcut;
pub mod model;
pub mod oracle;
pub mod rational;

pub use build::{build_model, build_model_checked, build_model_per_component, PropertyViolation};
pub use build::{column_alpha_bounds, compute_alpha, max_clique, model_to_intervals};
pub use cliquewidth::{
    build_expr_columns, build_expr_groups, cwd_upper_bounds, eval_expression, group_structure,
    parse_sexpr, BoundsReport, CwdEvalError, CwdExpression, CwdParseError, GroupStructure,
};
pub use graph::{cut_size, Cut, Graph, VertexId};
pub use interval::{graph_of_representation, IntervalKind, Representation, UnitInterval};
pub use model::{graph_of_model, validate_model, Bubble, ModelViolation, UBubbleModel};
pub use rational::Rational;
