//! Exact elimination over coalition indicator vectors: rank, span
//! membership with coefficients, and Carathéodory support reduction.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::game::Coalition;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("vector has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("weights must be strictly positive")]
    NonPositiveWeight,
    #[error("weighted combination does not reproduce the fixed part")]
    Recombination,
}

#[derive(Debug, Clone)]
struct BasisRow {
    pivot: usize,
    values: Vec<Rational>,
    /// Expresses `values` over `SpanBasis::sources`.
    combo: Vec<Rational>,
}

/// Row space of the coalitions inserted so far, in reduced row-echelon form.
///
/// Only coalitions that raised the rank are kept as sources; membership
/// coefficients are expressed over those.
#[derive(Debug, Clone)]
pub struct SpanBasis {
    dim: usize,
    rows: Vec<BasisRow>,
    sources: Vec<Coalition>,
}

impl SpanBasis {
    pub fn new(dim: usize) -> Self {
        SpanBasis {
            dim,
            rows: Vec::new(),
            sources: Vec::new(),
        }
    }

    pub fn from_coalitions<'a>(dim: usize, coalitions: impl IntoIterator<Item = &'a Coalition>) -> Self {
        let mut basis = SpanBasis::new(dim);
        for &s in coalitions {
            basis.insert(s);
        }
        basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Coalitions whose indicators form the basis, in insertion order.
    pub fn sources(&self) -> &[Coalition] {
        &self.sources
    }

    /// Inserts `e(s)`; returns whether the rank grew.
    pub fn insert(&mut self, s: Coalition) -> bool {
        let (residual, coeffs) = self.reduce(s.indicator(self.dim));
        let Some(pivot) = residual.iter().position(|v| !v.is_zero()) else {
            return false;
        };
        let scale = residual[pivot].clone();
        let values: Vec<Rational> = residual.into_iter().map(|v| v / &scale).collect();
        // combo of the new row: (e_new - Σ c_r combo_r) / scale
        let new_index = self.sources.len();
        let mut combo = vec![rational::zero(); new_index + 1];
        combo[new_index] = rational::one();
        for (row, c) in self.rows.iter().zip(&coeffs) {
            if c.is_zero() {
                continue;
            }
            for (dst, src) in combo.iter_mut().zip(&row.combo) {
                *dst -= c * src;
            }
        }
        for v in combo.iter_mut() {
            *v /= &scale;
        }
        for row in self.rows.iter_mut() {
            row.combo.push(rational::zero());
            let factor = row.values[pivot].clone();
            if factor.is_zero() {
                continue;
            }
            for (dst, src) in row.values.iter_mut().zip(&values) {
                *dst -= &factor * src;
            }
            for (dst, src) in row.combo.iter_mut().zip(&combo) {
                *dst -= &factor * src;
            }
        }
        self.rows.push(BasisRow {
            pivot,
            values,
            combo,
        });
        self.sources.push(s);
        true
    }

    pub fn contains(&self, s: Coalition) -> bool {
        let (residual, _) = self.reduce(s.indicator(self.dim));
        residual.iter().all(Zero::is_zero)
    }

    /// Coefficients `β` with `e(s) = Σ β_j e(sources_j)`, if `e(s)` lies in the span.
    pub fn coefficients(&self, s: Coalition) -> Option<Vec<(Coalition, Rational)>> {
        let (residual, coeffs) = self.reduce(s.indicator(self.dim));
        if !residual.iter().all(Zero::is_zero) {
            return None;
        }
        let mut beta = vec![rational::zero(); self.sources.len()];
        for (row, c) in self.rows.iter().zip(&coeffs) {
            if c.is_zero() {
                continue;
            }
            for (dst, src) in beta.iter_mut().zip(&row.combo) {
                *dst += c * src;
            }
        }
        debug_assert_eq!(
            combine(
                &self.sources.iter().map(|b| b.indicator(self.dim)).collect::<Vec<_>>(),
                &beta,
                self.dim
            ),
            s.indicator(self.dim),
            "span coefficients do not recombine"
        );
        Some(self.sources.iter().copied().zip(beta).collect())
    }

    /// Returns the residual of `v` against the basis and the per-row coefficients.
    fn reduce(&self, mut v: Vec<Rational>) -> (Vec<Rational>, Vec<Rational>) {
        let coeffs: Vec<Rational> = self.rows.iter().map(|row| v[row.pivot].clone()).collect();
        for (row, c) in self.rows.iter().zip(&coeffs) {
            if c.is_zero() {
                continue;
            }
            for (dst, src) in v.iter_mut().zip(&row.values) {
                if !src.is_zero() {
                    *dst -= c * src;
                }
            }
        }
        (v, coeffs)
    }
}

/// Rank of `{e(S)}` over the rationals.
pub fn rank(coalitions: &[Coalition], n: usize) -> usize {
    SpanBasis::from_coalitions(n, coalitions).rank()
}

/// A nonzero `λ` with `Σ λ_j vectors_j = 0`, or `None` when the vectors are
/// linearly independent. The free variable chosen is the lowest-index
/// non-pivot column, with `λ_free = 1`.
pub fn null_combination(vectors: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    let k = vectors.len();
    if k == 0 {
        return None;
    }
    let dim = vectors[0].len();
    // matrix with the vectors as columns: dim x k
    let mut m: Vec<Vec<Rational>> = (0..dim)
        .map(|i| vectors.iter().map(|v| v[i].clone()).collect())
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..k {
        if row == dim {
            break;
        }
        let Some(p) = (row..dim).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[row].clone();
        for (r, line) in m.iter_mut().enumerate() {
            if r == row || line[col].is_zero() {
                continue;
            }
            let f = line[col].clone();
            for (dst, src) in line.iter_mut().zip(&pivot_row) {
                if !src.is_zero() {
                    *dst -= &f * src;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let free = (0..k).find(|c| !pivot_cols.contains(c))?;
    let mut lambda = vec![rational::zero(); k];
    lambda[free] = rational::one();
    for (r, &pc) in pivot_cols.iter().enumerate() {
        lambda[pc] = -m[r][free].clone();
    }
    Some(lambda)
}

/// Shrinks the support of a positive combination `Σ w_j v_j = fixed_part` to
/// a linearly independent subset, keeping every surviving weight positive.
///
/// Returns the surviving indices (ascending) and their new weights.
pub fn caratheodory_reduce(
    vectors: &[Vec<Rational>],
    weights: &[Rational],
    fixed_part: &[Rational],
) -> Result<(Vec<usize>, Vec<Rational>), LinalgError> {
    let dim = fixed_part.len();
    if weights.len() != vectors.len() {
        return Err(LinalgError::Dimension {
            expected: vectors.len(),
            got: weights.len(),
        });
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(LinalgError::Dimension {
            expected: dim,
            got: v.len(),
        });
    }
    if weights.iter().any(|w| !rational::is_positive(w)) {
        return Err(LinalgError::NonPositiveWeight);
    }
    if combine(vectors, weights, dim) != fixed_part {
        return Err(LinalgError::Recombination);
    }

    let mut support: Vec<usize> = (0..vectors.len()).collect();
    let mut w: Vec<Rational> = weights.to_vec();
    loop {
        let active: Vec<Vec<Rational>> = support.iter().map(|&j| vectors[j].clone()).collect();
        let Some(mut lambda) = null_combination(&active) else {
            break;
        };
        if !lambda.iter().any(rational::is_positive) {
            lambda.iter_mut().for_each(|l| *l = -l.clone());
        }
        // largest step keeping all weights >= 0; first minimiser wins ties
        let mut step: Option<Rational> = None;
        for (pos, l) in lambda.iter().enumerate() {
            if rational::is_positive(l) {
                let ratio = &w[pos] / l;
                if step.as_ref().is_none_or(|s| ratio < *s) {
                    step = Some(ratio);
                }
            }
        }
        let step = step.expect("null combination has a positive entry");
        for (wj, l) in w.iter_mut().zip(&lambda) {
            *wj -= &step * l;
        }
        let (kept_support, kept_w): (Vec<usize>, Vec<Rational>) = support
            .into_iter()
            .zip(w)
            .filter(|(_, wj)| !wj.is_zero())
            .unzip();
        support = kept_support;
        w = kept_w;
    }
    let chosen: Vec<Vec<Rational>> = support.iter().map(|&j| vectors[j].clone()).collect();
    if combine(&chosen, &w, dim) != fixed_part || w.iter().any(|x| !rational::is_positive(x)) {
        return Err(LinalgError::Recombination);
    }
    Ok((support, w))
}

pub(crate) fn combine(vectors: &[Vec<Rational>], weights: &[Rational], dim: usize) -> Vec<Rational> {
    let mut acc = vec![rational::zero(); dim];
    for (v, w) in vectors.iter().zip(weights) {
        for (a, x) in acc.iter_mut().zip(v) {
            if !x.is_zero() {
                *a += if x.is_one() { w.clone() } else { w * x };
            }
        }
    }
    acc
}
