//! Randomized decision procedure: sample integer values for the pair
//! symbols, compute the exact determinant of the adapted Tutte matrix, and
//! look for a legal monomial with nonzero coefficient.
//!
//! Raw monomial detection is one-sided only in the No direction: cross
//! terms of distinct matchings can produce a legal monomial with no legal
//! matching behind it (the alternating 4-cycle is the canonical case), so
//! candidate-yes answers are verified by extraction before being trusted.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::constraint::{legal_count_vectors, legal_terms, ConstraintError, SymmetricConstraint};
use crate::exec;
use crate::extract::{extract_pm_sym_with, DEFAULT_EXTRACT_ROUNDS};
use crate::graph::{Graph, PerfectMatching};
use crate::matrix::{bareiss_det, build_adapted_tutte, XAssignment};
use crate::poly::Monomial;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("epsilon must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("sample bound must be at least 2, got {0}")]
    BadSampleBound(u64),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

/// Answer of the randomized and planar deciders. A bare candidate-yes is
/// never upgraded: `YesVerified` always carries a checked certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriStateAnswer {
    No,
    YesVerified(PerfectMatching),
    YesUnverified,
}

/// Parameters of the randomized decision procedure.
#[derive(Debug, Clone, Copy)]
pub struct PitConfig {
    /// Failure bound: a No answer is wrong with probability at most epsilon
    /// when a legal matching exists.
    pub epsilon: f64,
    /// Root seed; every trial derives its own stream from it.
    pub seed: u64,
    /// Size of the integer sample set for the pair symbols.
    pub sample_bound: u64,
    /// Whether candidate-yes answers are confirmed by extraction.
    pub verify: bool,
}

impl PitConfig {
    /// Sample bound `max(2|E|, 2n, 2)`: the coefficient of a fixed legal
    /// monomial has total degree at most n in the pair symbols, so this
    /// keeps the per-trial miss probability at 1/2 or below even on very
    /// sparse graphs.
    pub fn for_graph(g: &Graph, epsilon: f64, seed: u64) -> Self {
        let bound = (2 * g.num_edges()).max(2 * g.n()).max(2) as u64;
        PitConfig {
            epsilon,
            seed,
            sample_bound: bound,
            verify: true,
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(SolveError::BadEpsilon(self.epsilon));
        }
        if self.sample_bound < 2 {
            return Err(SolveError::BadSampleBound(self.sample_bound));
        }
        Ok(())
    }

    /// Number of independent trials needed for the failure bound.
    pub fn trials(&self) -> usize {
        ((1.0 / self.epsilon).log2().ceil() as usize).max(1)
    }
}

/// One raw trial: x sampled from trial stream `trial`, determinant taken
/// exactly, then scanned for legal monomials. Exposed so the per-trial
/// detection rate can be measured directly.
pub fn pit_single_trial(
    g: &Graph,
    terms: &std::collections::BTreeSet<Monomial>,
    cfg: &PitConfig,
    trial: u64,
) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial + 1);
    let mut x = XAssignment::default();
    for (u, v) in g.edge_pairs() {
        x.insert(u, v, rng.gen_range(1..=cfg.sample_bound) as i64);
    }
    let matrix = build_adapted_tutte(g, &x).expect("x covers every edge-bearing pair");
    let det = bareiss_det(&matrix).expect("fraction-free elimination is exact");
    terms.iter().any(|m| !det.coeff(m).is_zero())
}

/// Materializes the legal monomial set for `constraint` on `g`.
pub fn legal_monomials(
    g: &Graph,
    constraint: &SymmetricConstraint,
) -> Result<std::collections::BTreeSet<Monomial>, SolveError> {
    constraint.validate(g.d())?;
    let vectors = legal_count_vectors(constraint, g.n() as u32, g.d())?;
    Ok(legal_terms(&vectors))
}

fn decide<R>(g: &Graph, constraint: &SymmetricConstraint, cfg: &PitConfig, run: R) -> Result<TriStateAnswer, SolveError>
where
    R: FnOnce(usize) -> bool,
{
    cfg.validate()?;
    let terms = legal_monomials(g, constraint)?;
    if terms.is_empty() {
        return Ok(TriStateAnswer::No);
    }
    if !run(cfg.trials()) {
        return Ok(TriStateAnswer::No);
    }
    if !cfg.verify {
        return Ok(TriStateAnswer::YesUnverified);
    }
    let found = extract_pm_sym_with(
        g,
        constraint,
        extraction_seed(cfg.seed),
        DEFAULT_EXTRACT_ROUNDS,
        true,
    )?;
    Ok(match found {
        Some(pm) => TriStateAnswer::YesVerified(pm),
        None => TriStateAnswer::YesUnverified,
    })
}

/// Decouples the extraction streams from the trial streams.
pub(crate) fn extraction_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// Randomized decision with verification. Soundness: No is wrong with
/// probability at most epsilon when a legal matching exists; YesVerified is
/// always correct. Trials run in parallel under the `parallel` feature.
pub fn pit_decide_sym(
    g: &Graph,
    constraint: &SymmetricConstraint,
    cfg: &PitConfig,
) -> Result<TriStateAnswer, SolveError> {
    let terms = legal_monomials(g, constraint)?;
    decide(g, constraint, cfg, |trials| {
        exec::any_indexed(trials, |t| pit_single_trial(g, &terms, cfg, t as u64))
    })
}

/// Sequential twin of [`pit_decide_sym`]; same answers, used by the bench
/// suite and as the body of the non-parallel build.
pub fn pit_decide_sym_seq(
    g: &Graph,
    constraint: &SymmetricConstraint,
    cfg: &PitConfig,
) -> Result<TriStateAnswer, SolveError> {
    let terms = legal_monomials(g, constraint)?;
    decide(g, constraint, cfg, |trials| {
        (0..trials).any(|t| pit_single_trial(g, &terms, cfg, t as u64))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use crate::oracle::oracle_sym;

    fn g(text: &str) -> Graph {
        parse_graph(text.as_bytes()).unwrap()
    }

    fn eq2(color: u32, k: u32) -> SymmetricConstraint {
        SymmetricConstraint::CountEq { color, k }
    }

    #[test]
    fn k2_yes_is_verified() {
        let k2 = g(r#"{"n":2,"d":2,"edges":[[1,2,1,1]]}"#);
        let cfg = PitConfig::for_graph(&k2, 2f64.powi(-20), 7);
        let answer = pit_decide_sym(&k2, &eq2(1, 2), &cfg).unwrap();
        assert_eq!(
            answer,
            TriStateAnswer::YesVerified(PerfectMatching::new(vec![0]))
        );
    }

    #[test]
    fn odd_vertex_count_is_no() {
        let tri = g(r#"{"n":3,"d":2,"edges":[[1,2,1,1],[2,3,1,1],[1,3,1,1]]}"#);
        let cfg = PitConfig::for_graph(&tri, 2f64.powi(-10), 1);
        for c in [eq2(1, 2), eq2(2, 2), crate::constraint::trivially_true()] {
            assert_eq!(pit_decide_sym(&tri, &c, &cfg).unwrap(), TriStateAnswer::No);
        }
    }

    /// The alternating 4-cycle: the determinant carries the cross monomial
    /// y1^4 y2^4 with coefficient 2 although no matching has profile (2,2).
    #[test]
    fn cross_term_candidate_never_verifies() {
        let c4 = g(
            r#"{"n":4,"d":2,"edges":[[1,2,1,1],[2,3,2,2],[3,4,1,1],[4,1,2,2]]}"#,
        );
        let mixed = eq2(1, 2);
        assert!(!oracle_sym(&c4, &mixed).unwrap().satisfiable);
        let terms = legal_monomials(&c4, &mixed).unwrap();
        let cfg = PitConfig::for_graph(&c4, 2f64.powi(-20), 3);
        // Raw detection fires: every sampled x keeps the cross coefficient
        // 2 * x12 * x23 * x34 * x41 nonzero since samples are positive.
        assert!(pit_single_trial(&c4, &terms, &cfg, 0));
        for seed in 0..5 {
            let cfg = PitConfig::for_graph(&c4, 2f64.powi(-20), seed);
            let answer = pit_decide_sym(&c4, &mixed, &cfg).unwrap();
            assert_eq!(answer, TriStateAnswer::YesUnverified);
        }
    }

    #[test]
    fn no_verify_reports_unverified() {
        let k2 = g(r#"{"n":2,"d":2,"edges":[[1,2,1,1]]}"#);
        let mut cfg = PitConfig::for_graph(&k2, 0.25, 11);
        cfg.verify = false;
        assert_eq!(
            pit_decide_sym(&k2, &eq2(1, 2), &cfg).unwrap(),
            TriStateAnswer::YesUnverified
        );
    }

    #[test]
    fn seq_and_parallel_agree() {
        let c4 = g(
            r#"{"n":4,"d":2,"edges":[[1,2,1,1],[2,3,2,2],[3,4,1,1],[4,1,2,2]]}"#,
        );
        for seed in 0..4 {
            for constraint in [eq2(1, 4), eq2(1, 2), eq2(2, 4), eq2(1, 1)] {
                let cfg = PitConfig::for_graph(&c4, 2f64.powi(-12), seed);
                assert_eq!(
                    pit_decide_sym(&c4, &constraint, &cfg).unwrap(),
                    pit_decide_sym_seq(&c4, &constraint, &cfg).unwrap()
                );
            }
        }
    }

    #[test]
    fn config_validation() {
        let k2 = g(r#"{"n":2,"d":2,"edges":[[1,2,1,1]]}"#);
        let mut cfg = PitConfig::for_graph(&k2, 0.5, 0);
        cfg.epsilon = 1.5;
        assert!(matches!(
            pit_decide_sym(&k2, &eq2(1, 2), &cfg),
            Err(SolveError::BadEpsilon(_))
        ));
        let mut cfg = PitConfig::for_graph(&k2, 0.5, 0);
        cfg.sample_bound = 1;
        assert!(matches!(
            pit_decide_sym(&k2, &eq2(1, 2), &cfg),
            Err(SolveError::BadSampleBound(1))
        ));
        assert_eq!(PitConfig::for_graph(&k2, 2f64.powi(-20), 0).trials(), 20);
    }
}
