//! Skew-symmetric symbolic matrices over the color symbols, and exact
//! determinants by fraction-free Gaussian elimination.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::graph::Graph;
use crate::poly::{poly_div_exact, poly_mul, Monomial, PolyError, Polynomial};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("no x value assigned to the pair {{{0}, {1}}}")]
    MissingX(usize, usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Dense n-by-n matrix of polynomials sharing one symbol count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    n: usize,
    d: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zero(n: usize, d: usize) -> Self {
        PolyMatrix {
            n,
            d,
            entries: vec![Polynomial::zero(d); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, row: usize, col: usize) -> &Polynomial {
        &self.entries[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Polynomial) {
        self.entries[row * self.n + col] = value;
    }

    pub fn is_skew_symmetric(&self) -> bool {
        (0..self.n).all(|i| {
            self.get(i, i).is_zero()
                && (0..i).all(|j| *self.get(i, j) == self.get(j, i).neg())
        })
    }

    /// Copy with `row` and `col` removed; used by the extraction minors.
    pub fn minor(&self, row: usize, col: usize) -> PolyMatrix {
        let mut out = PolyMatrix::zero(self.n - 1, self.d);
        let mut r_out = 0;
        for r in 0..self.n {
            if r == row {
                continue;
            }
            let mut c_out = 0;
            for c in 0..self.n {
                if c == col {
                    continue;
                }
                out.set(r_out, c_out, self.get(r, c).clone());
                c_out += 1;
            }
            r_out += 1;
        }
        out
    }
}

/// Integer values standing in for the pair symbols `x_{uv}`, keyed by the
/// unordered endpoint pair (1-based, min first).
#[derive(Debug, Clone, Default)]
pub struct XAssignment(pub BTreeMap<(usize, usize), i64>);

impl XAssignment {
    pub fn get(&self, u: usize, v: usize) -> Option<i64> {
        self.0.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn insert(&mut self, u: usize, v: usize, value: i64) {
        self.0.insert((u.min(v), u.max(v)), value);
    }

    /// Every edge-bearing pair set to the same value.
    pub fn uniform(g: &Graph, value: i64) -> Self {
        let mut x = XAssignment::default();
        for (u, v) in g.edge_pairs() {
            x.insert(u, v, value);
        }
        x
    }
}

/// Builds the adapted Tutte matrix: entry (u, v) with u > v is
/// `x_uv * sum over parallel edges of y_{color at u} * y_{color at v}`,
/// negated on the transpose, zero on the diagonal.
pub fn build_adapted_tutte(g: &Graph, x: &XAssignment) -> Result<PolyMatrix, AlgebraError> {
    let d = g.d() as usize;
    let mut sums: BTreeMap<(usize, usize), Polynomial> = BTreeMap::new();
    for e in g.edges() {
        let (a, b) = (e.u.min(e.v), e.u.max(e.v));
        let m = Monomial::single(d, e.color_at_u.index() + 1, 1)
            .mul(&Monomial::single(d, e.color_at_v.index() + 1, 1));
        sums.entry((a, b))
            .or_insert_with(|| Polynomial::zero(d))
            .add_term(m, BigInt::from(1));
    }
    let mut matrix = PolyMatrix::zero(g.n(), d);
    for ((a, b), sum) in sums {
        let xv = x.get(a, b).ok_or(AlgebraError::MissingX(a, b))?;
        let scaled = sum.scale(&BigInt::from(xv));
        // Row b, column a has b > a, so it takes the positive sign.
        matrix.set(b - 1, a - 1, scaled.clone());
        matrix.set(a - 1, b - 1, scaled.neg());
    }
    Ok(matrix)
}

/// Exact determinant by Bareiss elimination with row pivoting. Every
/// interior division is exact; an inexact one is reported as a bug signal.
pub fn bareiss_det(m: &PolyMatrix) -> Result<Polynomial, AlgebraError> {
    bareiss_det_observed(m, |_, _| ())
}

/// Like [`bareiss_det`], reporting every freshly computed entry together
/// with its stage: stage-s entries are determinants of s-by-s minors, so
/// with degree-2 homogeneous input they are homogeneous of degree 2s.
pub fn bareiss_det_observed<F>(m: &PolyMatrix, mut observe: F) -> Result<Polynomial, AlgebraError>
where
    F: FnMut(usize, &Polynomial),
{
    let n = m.n();
    if n == 0 {
        return Ok(Polynomial::one(m.d()));
    }
    let mut a = m.clone();
    let mut prev = Polynomial::one(m.d());
    let mut negate = false;
    let homogeneous_input = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .all(|(i, j)| a.get(i, j).is_zero() || a.get(i, j).is_homogeneous_of(2));

    for k in 0..n - 1 {
        if a.get(k, k).is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !a.get(r, k).is_zero()) else {
                // Column k is dead below the pivot: the matrix is singular.
                return Ok(Polynomial::zero(m.d()));
            };
            for c in 0..n {
                let tmp = a.get(k, c).clone();
                a.set(k, c, a.get(swap, c).clone());
                a.set(swap, c, tmp);
            }
            negate = !negate;
        }
        let pivot = a.get(k, k).clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let num = poly_mul(&pivot, a.get(i, j)).sub(&poly_mul(a.get(i, k), a.get(k, j)));
                let entry = poly_div_exact(&num, &prev).map_err(AlgebraError::Poly)?;
                if homogeneous_input {
                    debug_assert!(
                        entry.is_zero() || entry.is_homogeneous_of(2 * (k as u32 + 2)),
                        "stage {} entry is not homogeneous of degree {}",
                        k + 2,
                        2 * (k + 2),
                    );
                }
                observe(k + 2, &entry);
                a.set(i, j, entry);
            }
            a.set(i, k, Polynomial::zero(m.d()));
        }
        prev = pivot;
    }
    let det = a.get(n - 1, n - 1).clone();
    Ok(if negate { det.neg() } else { det })
}
