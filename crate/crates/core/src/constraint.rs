//! Symmetric vertex-color constraints: a count-atom DSL with boolean
//! combinators, materialization of legal count vectors, and the legal
//! monomial set consumed by the algebraic solvers.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::Monomial;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("invalid constraint JSON: {0}")]
    Json(String),
    #[error("atom references color {color}, but d = {d}")]
    ColorOutOfRange { color: u32, d: u32 },
    #[error("'not' takes exactly one argument, got {0}")]
    NotArity(usize),
    #[error("count vector has {got} entries, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
}

/// Per-color occurrence counts of a coloring; component `i` counts color
/// `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountVector(pub Vec<u32>);

impl CountVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// A predicate over count vectors. Legality of a coloring under a symmetric
/// system depends only on its count vector, so this closed DSL is enough to
/// materialize the legal set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SymmetricConstraint {
    CountEq { color: u32, k: u32 },
    CountGe { color: u32, k: u32 },
    CountLe { color: u32, k: u32 },
    And { args: Vec<SymmetricConstraint> },
    Or { args: Vec<SymmetricConstraint> },
    Not { args: Vec<SymmetricConstraint> },
}

impl SymmetricConstraint {
    pub fn parse(text: &[u8]) -> Result<Self, ConstraintError> {
        serde_json::from_slice(text).map_err(|e| ConstraintError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("constraint serialization cannot fail")
    }

    /// Checks atom colors against `d` and `not` arity, recursively.
    pub fn validate(&self, d: u32) -> Result<(), ConstraintError> {
        match self {
            SymmetricConstraint::CountEq { color, .. }
            | SymmetricConstraint::CountGe { color, .. }
            | SymmetricConstraint::CountLe { color, .. } => {
                if *color == 0 || *color > d {
                    return Err(ConstraintError::ColorOutOfRange { color: *color, d });
                }
                Ok(())
            }
            SymmetricConstraint::And { args } | SymmetricConstraint::Or { args } => {
                args.iter().try_for_each(|a| a.validate(d))
            }
            SymmetricConstraint::Not { args } => {
                if args.len() != 1 {
                    return Err(ConstraintError::NotArity(args.len()));
                }
                args[0].validate(d)
            }
        }
    }
}

/// Standard boolean semantics over the count atoms.
pub fn sym_eval(
    constraint: &SymmetricConstraint,
    counts: &CountVector,
) -> Result<bool, ConstraintError> {
    let d = counts.dim() as u32;
    let at = |color: u32| -> Result<u32, ConstraintError> {
        if color == 0 || color > d {
            return Err(ConstraintError::ColorOutOfRange { color, d });
        }
        Ok(counts.0[(color - 1) as usize])
    };
    match constraint {
        SymmetricConstraint::CountEq { color, k } => Ok(at(*color)? == *k),
        SymmetricConstraint::CountGe { color, k } => Ok(at(*color)? >= *k),
        SymmetricConstraint::CountLe { color, k } => Ok(at(*color)? <= *k),
        SymmetricConstraint::And { args } => {
            for a in args {
                if !sym_eval(a, counts)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        SymmetricConstraint::Or { args } => {
            for a in args {
                if sym_eval(a, counts)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        SymmetricConstraint::Not { args } => {
            if args.len() != 1 {
                return Err(ConstraintError::NotArity(args.len()));
            }
            Ok(!sym_eval(&args[0], counts)?)
        }
    }
}

/// All length-`d` count vectors summing to `n` that satisfy the constraint,
/// in ascending lexicographic order. At most C(n+d-1, d-1) candidates exist.
pub fn legal_count_vectors(
    constraint: &SymmetricConstraint,
    n: u32,
    d: u32,
) -> Result<Vec<CountVector>, ConstraintError> {
    constraint.validate(d)?;
    if d == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; d as usize];
    fill_compositions(constraint, n, 0, &mut current, &mut out)?;
    Ok(out)
}

fn fill_compositions(
    constraint: &SymmetricConstraint,
    remaining: u32,
    pos: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<CountVector>,
) -> Result<(), ConstraintError> {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        let v = CountVector(current.clone());
        if sym_eval(constraint, &v)? {
            out.push(v);
        }
        return Ok(());
    }
    for value in 0..=remaining {
        current[pos] = value;
        fill_compositions(constraint, remaining - value, pos + 1, current, out)?;
    }
    Ok(())
}

/// Maps each legal count vector `(k_1..k_d)` to the monomial with exponents
/// `(2k_1..2k_d)`; these are the determinant terms that witness legality.
pub fn legal_terms(vectors: &[CountVector]) -> BTreeSet<Monomial> {
    vectors
        .iter()
        .map(|v| Monomial(v.0.iter().map(|k| 2 * k).collect()))
        .collect()
}

/// A constraint that every count vector satisfies.
pub fn trivially_true() -> SymmetricConstraint {
    SymmetricConstraint::CountGe { color: 1, k: 0 }
}
