//! Witness extraction via the isolating lemma: random edge weights make the
//! minimum-weight legal matching unique with probability at least 1/2, the
//! weighted determinant then pins its weight through the largest power of
//! two dividing a legal coefficient, and per-edge membership falls out of a
//! parity test on minor determinants. Every candidate is re-verified, so a
//! returned matching is always correct; failed rounds just retry.

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraint::{sym_eval, CountVector, SymmetricConstraint};
use crate::exec;
use crate::graph::{check_perfect_matching, inherited_coloring, Graph, PerfectMatching};
use crate::matrix::{bareiss_det, PolyMatrix};
use crate::pit::{legal_monomials, SolveError};
use crate::poly::{two_adic_valuation, Monomial, Polynomial};

/// Round budget used by the deciders when confirming a candidate-yes.
pub const DEFAULT_EXTRACT_ROUNDS: usize = 20;

/// Integer weights on edge ids, each in `1..=bound`.
#[derive(Debug, Clone)]
pub struct EdgeWeights {
    pub values: Vec<u64>,
    pub bound: u64,
}

impl EdgeWeights {
    /// Uniform weights from `{1, ..., 2|E|}`.
    pub fn sample(g: &Graph, rng: &mut impl Rng) -> Self {
        let bound = (2 * g.num_edges()).max(1) as u64;
        let values = (0..g.num_edges())
            .map(|_| rng.gen_range(1..=bound))
            .collect();
        EdgeWeights { values, bound }
    }
}

/// The weighted variant of the adapted Tutte matrix: the pair symbols are
/// replaced by per-edge powers of two, entry (u, v) with u > v being
/// `sum over parallel edges of y_{color at u} * y_{color at v} * 2^{w_e}`.
pub fn build_weighted_matrix(g: &Graph, w: &EdgeWeights) -> PolyMatrix {
    let d = g.d() as usize;
    let mut sums: std::collections::BTreeMap<(usize, usize), Polynomial> =
        std::collections::BTreeMap::new();
    for (id, e) in g.edges().iter().enumerate() {
        let (a, b) = (e.u.min(e.v), e.u.max(e.v));
        let mono = Monomial::single(d, e.color_at_u.index() + 1, 1)
            .mul(&Monomial::single(d, e.color_at_v.index() + 1, 1));
        sums.entry((a, b))
            .or_insert_with(|| Polynomial::zero(d))
            .add_term(mono, BigInt::one() << w.values[id]);
    }
    let mut matrix = PolyMatrix::zero(g.n(), d);
    for ((a, b), sum) in sums {
        matrix.set(b - 1, a - 1, sum.clone());
        matrix.set(a - 1, b - 1, sum.neg());
    }
    matrix
}

fn round_candidate(
    g: &Graph,
    constraint: &SymmetricConstraint,
    terms: &std::collections::BTreeSet<Monomial>,
    seed: u64,
    round: u64,
    parallel: bool,
) -> Option<PerfectMatching> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round + 1);
    let weights = EdgeWeights::sample(g, &mut rng);
    let matrix = build_weighted_matrix(g, &weights);
    let det = bareiss_det(&matrix).expect("fraction-free elimination is exact");

    // Lowest 2-adic valuation among legal coefficients pins 2W, the weight
    // signature of the isolated minimum-weight legal matching.
    let picked = terms
        .iter()
        .filter_map(|m| {
            let coeff = det.coeff(m);
            two_adic_valuation(&coeff).map(|val| (val, m.clone()))
        })
        .min()?;
    let (two_w, monomial) = picked;

    let d = g.d() as usize;
    let membership = |id: usize| -> bool {
        let e = &g.edges()[id];
        let edge_mono = Monomial::single(d, e.color_at_u.index() + 1, 1)
            .mul(&Monomial::single(d, e.color_at_v.index() + 1, 1));
        let Some(reduced) = monomial.div(&edge_mono) else {
            return false;
        };
        let minor = matrix.minor(e.u - 1, e.v - 1);
        let minor_det = bareiss_det(&minor).expect("fraction-free elimination is exact");
        let coeff = minor_det.coeff(&reduced);
        // Parity test: e is in iff coeff * 2^{w_e} / 2^{2W} is odd.
        match two_adic_valuation(&coeff) {
            Some(val) => val + weights.values[id] == two_w,
            None => false,
        }
    };
    let flags: Vec<bool> = if parallel {
        exec::map_indexed(g.num_edges(), membership)
    } else {
        (0..g.num_edges()).map(membership).collect()
    };

    let ids: Vec<usize> = flags
        .iter()
        .enumerate()
        .filter_map(|(id, &keep)| keep.then_some(id))
        .collect();
    let pm = PerfectMatching::new(ids);
    if !check_perfect_matching(g, pm.edge_ids()).unwrap_or(false) {
        return None;
    }
    let coloring = inherited_coloring(g, &pm).ok()?;
    let counts = CountVector(coloring.counts(g.d()));
    sym_eval(constraint, &counts).ok()?.then_some(pm)
}

pub(crate) fn extract_pm_sym_with(
    g: &Graph,
    constraint: &SymmetricConstraint,
    seed: u64,
    max_rounds: usize,
    parallel: bool,
) -> Result<Option<PerfectMatching>, SolveError> {
    let terms = legal_monomials(g, constraint)?;
    if terms.is_empty() {
        return Ok(None);
    }
    for round in 0..max_rounds {
        if let Some(pm) = round_candidate(g, constraint, &terms, seed, round as u64, parallel) {
            return Ok(Some(pm));
        }
    }
    Ok(None)
}

/// Isolating-lemma extraction. Returns a matching that has passed the full
/// certificate check, or `None` after `max_rounds` unlucky rounds. The
/// per-edge minor determinants run in parallel under the `parallel` feature.
pub fn extract_pm_sym(
    g: &Graph,
    constraint: &SymmetricConstraint,
    seed: u64,
    max_rounds: usize,
) -> Result<Option<PerfectMatching>, SolveError> {
    extract_pm_sym_with(g, constraint, seed, max_rounds, true)
}

/// Sequential twin of [`extract_pm_sym`] for the bench suite.
pub fn extract_pm_sym_seq(
    g: &Graph,
    constraint: &SymmetricConstraint,
    seed: u64,
    max_rounds: usize,
) -> Result<Option<PerfectMatching>, SolveError> {
    extract_pm_sym_with(g, constraint, seed, max_rounds, false)
}
