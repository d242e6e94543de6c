//! Exact decision procedures and constructors for perfect matchings under
//! vertex-color constraints on graphs with bi-colored edges.
//!
//! The crate provides:
//! - the bi-colored multigraph model with inherited colorings ([`graph`]);
//! - symmetric count constraints and ordered multivalued decision diagrams
//!   ([`constraint`], [`dd`]);
//! - an exhaustive oracle for desk-size instances ([`oracle`]);
//! - randomized algebraic solvers over an adapted Tutte matrix with exact
//!   fraction-free determinants, isolating-lemma extraction, and a
//!   deterministic planar variant via Pfaffian orientation ([`matrix`],
//!   [`pit`], [`extract`], [`planar`]);
//! - a dynamic program over nice tree decompositions ([`treewidth`], [`dp`]);
//! - hardness reductions and a quantum optical circuit frontend
//!   ([`reduce`], [`circuit`]).
//!
//! With the default `parallel` feature the independent randomized trials
//! and per-edge minor determinants fan out over rayon; disabling it yields
//! a fully sequential build with identical results.

pub mod circuit;
pub mod constraint;
pub mod dd;
pub mod dp;
mod exec;
pub mod extract;
pub mod graph;
pub mod matching;
pub mod matrix;
pub mod oracle;
pub mod pit;
pub mod planar;
pub mod reduce;
pub mod poly;
pub mod treewidth;
