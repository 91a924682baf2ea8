#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod clock;
pub mod linalg;
pub mod measure;
pub mod partition;
pub mod polytope;
pub mod recourse;
pub mod solver;
