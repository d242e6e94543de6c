//! Quantum optical circuit frontend: optical paths become vertices,
//! nonlinear crystals become edges, photon modes become endpoint colors.
//! Amplitudes are carried through untouched; only existence questions are
//! answered here, so they are never multiplied or summed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraint::SymmetricConstraint;
use crate::graph::{BiColoredEdge, ColorId, Graph, GraphError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("invalid circuit JSON: {0}")]
    Json(String),
    #[error("crystal {index}: path {path} out of range 1..={paths}")]
    PathOutOfRange {
        index: usize,
        path: usize,
        paths: usize,
    },
    #[error("crystal {index}: mode {mode} out of range 1..={modes}")]
    ModeOutOfRange { index: usize, mode: u32, modes: u32 },
    #[error("crystal {index}: both ends on path {path}")]
    SelfPair { index: usize, path: usize },
    #[error("state parameters out of range: {0}")]
    BadStateParams(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One nonlinear crystal: it can emit a photon pair onto paths `a` and `b`
/// with modes `ma` and `mb`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crystal {
    pub a: usize,
    pub b: usize,
    pub ma: u32,
    pub mb: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub paths: usize,
    pub modes: u32,
    pub crystals: Vec<Crystal>,
}

impl CircuitSpec {
    pub fn parse(text: &[u8]) -> Result<Self, CircuitError> {
        let spec: CircuitSpec =
            serde_json::from_slice(text).map_err(|e| CircuitError::Json(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serialization cannot fail")
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for (index, c) in self.crystals.iter().enumerate() {
            for path in [c.a, c.b] {
                if path == 0 || path > self.paths {
                    return Err(CircuitError::PathOutOfRange {
                        index,
                        path,
                        paths: self.paths,
                    });
                }
            }
            if c.a == c.b {
                return Err(CircuitError::SelfPair {
                    index,
                    path: c.a,
                });
            }
            for mode in [c.ma, c.mb] {
                if mode == 0 || mode > self.modes {
                    return Err(CircuitError::ModeOutOfRange {
                        index,
                        mode,
                        modes: self.modes,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Translates a circuit into the matching instance: perfect matchings of
/// the result are exactly the crystal activation sets that put one photon
/// on every path (the coincidences).
pub fn circuit_to_graph(spec: &CircuitSpec) -> Result<Graph, CircuitError> {
    spec.validate()?;
    let edges = spec
        .crystals
        .iter()
        .map(|c| BiColoredEdge {
            u: c.a,
            v: c.b,
            color_at_u: ColorId(c.ma),
            color_at_v: ColorId(c.mb),
        })
        .collect();
    Ok(Graph::new(spec.paths, spec.modes.max(1), edges)?)
}

/// Families of target quantum states with symmetric color constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateKind {
    Ghz,
    Dicke(u32),
    W,
    GeneralDicke(Vec<u32>),
}

/// The vertex-color constraint characterizing coincidences of the given
/// state family on `n` paths with `d` modes.
pub fn state_constraint(
    kind: &StateKind,
    n: u32,
    d: u32,
) -> Result<SymmetricConstraint, CircuitError> {
    let bad = |msg: String| Err(CircuitError::BadStateParams(msg));
    match kind {
        StateKind::Ghz => {
            if d == 0 {
                return bad("GHZ needs at least one mode".into());
            }
            Ok(SymmetricConstraint::Or {
                args: (1..=d)
                    .map(|color| SymmetricConstraint::CountEq { color, k: n })
                    .collect(),
            })
        }
        StateKind::Dicke(k) => {
            if *k > n {
                return bad(format!("Dicke excitation {k} exceeds path count {n}"));
            }
            Ok(SymmetricConstraint::CountEq { color: 1, k: n - k })
        }
        StateKind::W => {
            if n == 0 {
                return bad("W state needs at least one path".into());
            }
            Ok(SymmetricConstraint::CountEq { color: 1, k: n - 1 })
        }
        StateKind::GeneralDicke(ks) => {
            if ks.len() != d as usize {
                return bad(format!("expected {d} mode counts, got {}", ks.len()));
            }
            if ks.iter().sum::<u32>() != n {
                return bad(format!("mode counts must sum to {n}"));
            }
            Ok(SymmetricConstraint::And {
                args: ks
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| SymmetricConstraint::CountEq {
                        color: i as u32 + 1,
                        k,
                    })
                    .collect(),
            })
        }
    }
}

/// Seven-crystal circuit on four paths whose coincidences are exactly the
/// activation sets {I,II}, {I,III}, {IV,VI}, {V,VII}.
pub fn seven_crystal_fixture() -> CircuitSpec {
    let c = |a, b, ma, mb| Crystal {
        a,
        b,
        ma,
        mb,
        amp: Some(1.0),
    };
    CircuitSpec {
        paths: 4,
        modes: 2,
        crystals: vec![
            c(1, 2, 1, 1), // I
            c(3, 4, 1, 1), // II
            c(3, 4, 2, 2), // III
            c(1, 3, 1, 1), // IV
            c(1, 4, 2, 2), // V
            c(2, 4, 1, 1), // VI
            c(2, 3, 2, 2), // VII
        ],
    }
}
