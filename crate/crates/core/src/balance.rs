//! Deciding `T0`-balancedness of a collection of coalitions.
//!
//! A collection `T` is `T0`-balanced when there are weights `γ ≥ 0` on `T0`
//! and `ω > 0` on `T` with
//!
//! ```text
//! Σ_{S∈T0} γ_S e(S) + Σ_{S∈T} ω_S e(S) = e(N).
//! ```
//!
//! Four independent deciders are provided. Each one returns either a
//! [`BalancednessCertificate`] (the weights) or an [`ImbalanceWitness`]
//! (a direction `y` with `y(S) ≥ 0` on `T0 ∪ T`, `y(N) = 0` and `y(S') > 0`
//! for some `S' ∈ T`), and every returned object is re-verified by direct
//! arithmetic.
//!
//! * [`check_fast`] grows a spanned subcollection `U` of `T` using at most
//!   `rank(T)` LPs.
//! * [`check_minweight`] maximises the smallest weight in a single LP.
//! * [`check_percoalition`] maximises each `ω_C` separately.
//! * [`check_homogeneous`] tests unboundedness of the homogenised system
//!   `Σ γ e(S) + Σ ω e(S) − α e(N) = 0` for each `C ∈ T`.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::game::Coalition;
use crate::linalg::{self, SpanBasis};
use crate::lp::{self, EqualityLp, LpError, LpOutcome};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BalanceError {
    #[error("coalition mask {mask} is out of range for {n} players")]
    OutOfRange { mask: u32, n: usize },
    #[error("collection T is empty")]
    EmptyCollection,
    #[error("player count {0} is not supported")]
    PlayerCount(usize),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("internal balancedness error: {0}")]
    Internal(String),
}

/// The query `(T0, T)` over `n` players. Both collections are stored
/// without `∅`, sorted by mask and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectionPair {
    n: usize,
    t0: Vec<Coalition>,
    t: Vec<Coalition>,
}

fn normalize(n: usize, coalitions: &[Coalition]) -> Result<Vec<Coalition>, BalanceError> {
    if let Some(bad) = coalitions.iter().find(|s| !s.is_valid_for(n)) {
        return Err(BalanceError::OutOfRange {
            mask: bad.mask(),
            n,
        });
    }
    let mut out: Vec<Coalition> = coalitions.iter().copied().filter(|s| !s.is_empty()).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

impl CollectionPair {
    pub fn new(n: usize, t0: &[Coalition], t: &[Coalition]) -> Result<Self, BalanceError> {
        if n == 0 || n > crate::game::MAX_PLAYERS {
            return Err(BalanceError::PlayerCount(n));
        }
        let t0 = normalize(n, t0)?;
        let t = normalize(n, t)?;
        if t.is_empty() {
            return Err(BalanceError::EmptyCollection);
        }
        Ok(CollectionPair { n, t0, t })
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn t0(&self) -> &[Coalition] {
        &self.t0
    }

    pub fn t(&self) -> &[Coalition] {
        &self.t
    }

    /// Recombination LP: columns are `γ` over `T0` followed by `ω` over `T`.
    fn recombination_lp(&self, objective: Vec<Rational>) -> EqualityLp {
        let columns: Vec<Coalition> = self.t0.iter().chain(&self.t).copied().collect();
        let constraints = (0..self.n)
            .map(|i| {
                columns
                    .iter()
                    .map(|s| if s.contains_index(i) { rational::one() } else { rational::zero() })
                    .collect()
            })
            .collect();
        EqualityLp {
            objective,
            constraints,
            rhs: vec![rational::one(); self.n],
        }
    }

    fn columns(&self) -> usize {
        self.t0.len() + self.t.len()
    }

    fn unit_objective(&self, t_index: usize) -> Vec<Rational> {
        let mut c = vec![rational::zero(); self.columns()];
        c[self.t0.len() + t_index] = rational::one();
        c
    }

    fn certificate_from(&self, z: &[Rational]) -> BalancednessCertificate {
        let (g, w) = z.split_at(self.t0.len());
        BalancednessCertificate {
            gamma: self.t0.iter().copied().zip(g.iter().cloned()).collect(),
            omega: self.t.iter().copied().zip(w.iter().take(self.t.len()).cloned()).collect(),
        }
    }

    /// Witness from a Farkas vector `f` of the recombination system
    /// (`f(S) ≤ 0` on every column, `f(N) > 0`): `y = f(N)/n · 1 − f`.
    fn witness_from_farkas(&self, f: &[Rational]) -> Result<ImbalanceWitness, BalanceError> {
        let shift = f.iter().fold(rational::zero(), |a, b| a + b) / rational::int(self.n as i64);
        let y: Vec<Rational> = f.iter().map(|fi| &shift - fi).collect();
        self.witness_with_first_strict(y)
    }

    /// Shifts `y` along `1` so that `y(N) = 0`; requires `y(N) ≤ 0` so that
    /// no `y(S)` decreases.
    fn witness_from_subzero(&self, y: Vec<Rational>, strict_at: Coalition) -> Result<ImbalanceWitness, BalanceError> {
        let total = Coalition::grand(self.n).sum_of(&y);
        if total.is_positive() {
            return Err(BalanceError::Internal("dual has y(N) > 0".into()));
        }
        let shift = total / rational::int(self.n as i64);
        let y = y.into_iter().map(|v| v - &shift).collect();
        let w = ImbalanceWitness { y, strict_at };
        self.checked_witness(w)
    }

    fn witness_with_first_strict(&self, y: Vec<Rational>) -> Result<ImbalanceWitness, BalanceError> {
        let strict_at = self
            .t
            .iter()
            .copied()
            .find(|s| s.sum_of(&y).is_positive())
            .ok_or_else(|| BalanceError::Internal("dual vector is not strict anywhere on T".into()))?;
        self.checked_witness(ImbalanceWitness { y, strict_at })
    }

    fn checked_witness(&self, w: ImbalanceWitness) -> Result<ImbalanceWitness, BalanceError> {
        if w.verify(self) {
            Ok(w)
        } else {
            Err(BalanceError::Internal(format!(
                "imbalance witness failed verification: y = {}",
                rational::format_rational_list(&w.y)
            )))
        }
    }

    fn checked_certificate(&self, c: BalancednessCertificate) -> Result<BalancednessCertificate, BalanceError> {
        if c.verify(self) {
            Ok(c)
        } else {
            Err(BalanceError::Internal("balancing certificate failed verification".into()))
        }
    }
}

/// Weights `γ ≥ 0` over `T0` and `ω > 0` over `T` recombining to `e(N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancednessCertificate {
    pub gamma: Vec<(Coalition, Rational)>,
    pub omega: Vec<(Coalition, Rational)>,
}

impl BalancednessCertificate {
    pub fn verify(&self, pair: &CollectionPair) -> bool {
        let keys_match = self.gamma.iter().map(|(s, _)| *s).eq(pair.t0.iter().copied())
            && self.omega.iter().map(|(s, _)| *s).eq(pair.t.iter().copied());
        if !keys_match
            || self.gamma.iter().any(|(_, g)| g.is_negative())
            || self.omega.iter().any(|(_, w)| !w.is_positive())
        {
            return false;
        }
        let mut sum = vec![rational::zero(); pair.n];
        for (s, w) in self.gamma.iter().chain(&self.omega) {
            for (i, acc) in sum.iter_mut().enumerate() {
                if s.contains_index(i) {
                    *acc += w;
                }
            }
        }
        sum.iter().all(|v| v == &rational::one())
    }

    pub fn min_omega(&self) -> Rational {
        self.omega
            .iter()
            .map(|(_, w)| w.clone())
            .min()
            .unwrap_or_else(rational::zero)
    }

    pub fn omega_of(&self, s: Coalition) -> Option<&Rational> {
        self.omega.iter().find(|(c, _)| *c == s).map(|(_, w)| w)
    }
}

/// `y ∈ Y(T0 ∪ T)` with `y(strict_at) > 0`, which rules out balancedness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImbalanceWitness {
    pub y: Vec<Rational>,
    pub strict_at: Coalition,
}

impl ImbalanceWitness {
    pub fn verify(&self, pair: &CollectionPair) -> bool {
        self.y.len() == pair.n
            && pair.t0.iter().chain(&pair.t).all(|s| !s.sum_of(&self.y).is_negative())
            && Coalition::grand(pair.n).sum_of(&self.y).is_zero()
            && pair.t.contains(&self.strict_at)
            && self.strict_at.sum_of(&self.y).is_positive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Balancedness {
    Balanced(BalancednessCertificate),
    NotBalanced(ImbalanceWitness),
}

impl Balancedness {
    pub fn is_balanced(&self) -> bool {
        matches!(self, Balancedness::Balanced(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceCheck {
    pub outcome: Balancedness,
    pub lp_solves: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Checker {
    Fast,
    MinWeight,
    PerCoalition,
    Homogeneous,
}

impl Checker {
    pub const ALL: [Checker; 4] = [
        Checker::Fast,
        Checker::MinWeight,
        Checker::PerCoalition,
        Checker::Homogeneous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Checker::Fast => "fast",
            Checker::MinWeight => "minweight",
            Checker::PerCoalition => "percoalition",
            Checker::Homogeneous => "homogeneous",
        }
    }
}

impl fmt::Display for Checker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Checker {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Checker::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown checker {s:?}"))
    }
}

pub fn check(pair: &CollectionPair, checker: Checker) -> Result<BalanceCheck, BalanceError> {
    match checker {
        Checker::Fast => check_fast(pair),
        Checker::MinWeight => check_minweight(pair),
        Checker::PerCoalition => check_percoalition(pair),
        Checker::Homogeneous => check_homogeneous(pair),
    }
}

/// Runs all four deciders and fails if their verdicts differ.
pub fn check_unanimous(pair: &CollectionPair) -> Result<Vec<(Checker, BalanceCheck)>, BalanceError> {
    let results = Checker::ALL
        .into_iter()
        .map(|c| check(pair, c).map(|r| (c, r)))
        .collect::<Result<Vec<_>, _>>()?;
    let verdict = results[0].1.outcome.is_balanced();
    if let Some((c, _)) = results.iter().find(|(_, r)| r.outcome.is_balanced() != verdict) {
        return Err(BalanceError::Internal(format!(
            "checkers disagree: {} says {}, {} says {}",
            results[0].0,
            verdict,
            c,
            !verdict
        )));
    }
    Ok(results)
}

/// Spanned-subcollection growth: each LP maximises the total weight on
/// `T \ U`, and `U` becomes `span(U ∪ {S : ω*_S > 0}) ∩ T`. Stops balanced
/// when `rank(U) = rank(T)`, unbalanced when the LP optimum is zero.
pub fn check_fast(pair: &CollectionPair) -> Result<BalanceCheck, BalanceError> {
    let t = &pair.t;
    let offset = pair.t0.len();
    let target_rank = linalg::rank(t, pair.n);
    let mut in_u = vec![false; t.len()];
    let mut basis = SpanBasis::new(pair.n);
    let mut solutions: Vec<Vec<Rational>> = Vec::new();
    let mut lp_solves = 0;

    while basis.rank() < target_rank {
        let mut objective = vec![rational::zero(); pair.columns()];
        for (j, covered) in in_u.iter().enumerate() {
            if !covered {
                objective[offset + j] = rational::one();
            }
        }
        lp_solves += 1;
        match lp::solve(&pair.recombination_lp(objective))? {
            LpOutcome::Infeasible { farkas } => {
                let w = pair.witness_from_farkas(&farkas)?;
                return Ok(BalanceCheck {
                    outcome: Balancedness::NotBalanced(w),
                    lp_solves,
                });
            }
            LpOutcome::Optimal(sol) if sol.value.is_zero() => {
                // y(S) ≥ 1 on T \ U and y(N) = yᵀb = 0
                let w = pair.witness_with_first_strict(sol.duals)?;
                return Ok(BalanceCheck {
                    outcome: Balancedness::NotBalanced(w),
                    lp_solves,
                });
            }
            LpOutcome::Optimal(sol) => {
                for (j, s) in t.iter().enumerate() {
                    if sol.point[offset + j].is_positive() {
                        basis.insert(*s);
                    }
                }
                for (j, s) in t.iter().enumerate() {
                    in_u[j] = basis.contains(*s);
                }
                solutions.push(sol.point);
            }
            LpOutcome::Unbounded { .. } => {
                return Err(BalanceError::Internal("recombination LP unbounded".into()));
            }
        }
    }

    let cert = spread_over_span(pair, &solutions, &basis)?;
    Ok(BalanceCheck {
        outcome: Balancedness::Balanced(pair.checked_certificate(cert)?),
        lp_solves,
    })
}

/// Averages the LP solutions, then gives every zero-weight member of `T`
/// positive weight by moving along `e(S) − Σ β_j e(source_j)`, which lies in
/// the kernel of the recombination map.
fn spread_over_span(
    pair: &CollectionPair,
    solutions: &[Vec<Rational>],
    basis: &SpanBasis,
) -> Result<BalancednessCertificate, BalanceError> {
    let mut z = average(solutions, pair.columns());
    let offset = pair.t0.len();
    let index_of = |s: Coalition| pair.t.binary_search(&s).ok().map(|j| offset + j);
    for (j, &s) in pair.t.iter().enumerate() {
        if z[offset + j].is_positive() {
            continue;
        }
        let beta = basis
            .coefficients(s)
            .ok_or_else(|| BalanceError::Internal(format!("{s} is outside the spanned part of T")))?;
        let mut step: Option<Rational> = None;
        for (src, b) in &beta {
            if b.is_positive() {
                let col = index_of(*src).expect("basis sources come from T");
                let ratio = &z[col] / b;
                if step.as_ref().is_none_or(|cur| ratio < *cur) {
                    step = Some(ratio);
                }
            }
        }
        let step = step.map_or_else(rational::one, |s| s / rational::int(2));
        for (src, b) in &beta {
            let col = index_of(*src).expect("basis sources come from T");
            z[col] -= &step * b;
        }
        z[offset + j] += step;
    }
    Ok(pair.certificate_from(&z))
}

fn average(solutions: &[Vec<Rational>], len: usize) -> Vec<Rational> {
    let mut acc = vec![rational::zero(); len];
    for z in solutions {
        for (a, v) in acc.iter_mut().zip(z) {
            *a += v;
        }
    }
    let count = rational::int(solutions.len().max(1) as i64);
    acc.into_iter().map(|v| v / &count).collect()
}

/// Single LP: `max τ` subject to `ω_S − τ − s_S = 0` for all `S ∈ T` and
/// the recombination rows. Balanced iff `τ* > 0`; the certificate then has
/// `min ω = τ*`.
pub fn check_minweight(pair: &CollectionPair) -> Result<BalanceCheck, BalanceError> {
    let (with_tau, _) = minweight_solve(pair)?;
    Ok(with_tau)
}

/// Returns the check plus `τ*` when balanced.
pub fn minweight_solve(pair: &CollectionPair) -> Result<(BalanceCheck, Option<Rational>), BalanceError> {
    let n = pair.n;
    let g = pair.t0.len();
    let k = pair.t.len();
    // columns: γ (g), ω (k), τ (1), slack (k)
    let width = g + 2 * k + 1;
    let tau_col = g + k;
    let base = pair.recombination_lp(vec![rational::zero(); g + k]);
    let mut constraints: Vec<Vec<Rational>> = base
        .constraints
        .into_iter()
        .map(|mut row| {
            row.resize(width, rational::zero());
            row
        })
        .collect();
    for j in 0..k {
        let mut row = vec![rational::zero(); width];
        row[g + j] = rational::one();
        row[tau_col] = rational::int(-1);
        row[tau_col + 1 + j] = rational::int(-1);
        constraints.push(row);
    }
    let mut rhs = vec![rational::one(); n];
    rhs.extend((0..k).map(|_| rational::zero()));
    let mut objective = vec![rational::zero(); width];
    objective[tau_col] = rational::one();
    let lp = EqualityLp {
        objective,
        constraints,
        rhs,
    };

    match lp::solve(&lp)? {
        LpOutcome::Infeasible { farkas } => {
            // the first n multipliers already certify the recombination rows
            let w = pair.witness_from_farkas(&farkas[..n])?;
            Ok((
                BalanceCheck {
                    outcome: Balancedness::NotBalanced(w),
                    lp_solves: 1,
                },
                None,
            ))
        }
        LpOutcome::Optimal(sol) if sol.value.is_zero() => {
            // y_rec(S) ≥ −y_T[S] ≥ 0 and Σ y_T ≤ −1
            let w = pair.witness_with_first_strict(sol.duals[..n].to_vec())?;
            Ok((
                BalanceCheck {
                    outcome: Balancedness::NotBalanced(w),
                    lp_solves: 1,
                },
                None,
            ))
        }
        LpOutcome::Optimal(sol) => {
            let cert = pair.checked_certificate(pair.certificate_from(&sol.point[..g + k]))?;
            if cert.min_omega() != sol.value {
                return Err(BalanceError::Internal("min weight differs from LP optimum".into()));
            }
            Ok((
                BalanceCheck {
                    outcome: Balancedness::Balanced(cert),
                    lp_solves: 1,
                },
                Some(sol.value),
            ))
        }
        LpOutcome::Unbounded { .. } => Err(BalanceError::Internal("min-weight LP unbounded".into())),
    }
}

/// `q*_C = max ω_C` for each `C ∈ T`; balanced iff every `q*_C > 0`, with
/// the average of the optimal solutions as certificate.
pub fn check_percoalition(pair: &CollectionPair) -> Result<BalanceCheck, BalanceError> {
    let mut solutions = Vec::with_capacity(pair.t.len());
    let mut lp_solves = 0;
    for (j, &c) in pair.t.iter().enumerate() {
        lp_solves += 1;
        match lp::solve(&pair.recombination_lp(pair.unit_objective(j)))? {
            LpOutcome::Infeasible { farkas } => {
                let w = pair.witness_from_farkas(&farkas)?;
                return Ok(BalanceCheck {
                    outcome: Balancedness::NotBalanced(w),
                    lp_solves,
                });
            }
            LpOutcome::Optimal(sol) if sol.value.is_zero() => {
                // y(C) ≥ 1, y ≥ 0 on every other column, y(N) = 0
                let w = pair.checked_witness(ImbalanceWitness {
                    y: sol.duals,
                    strict_at: c,
                })?;
                return Ok(BalanceCheck {
                    outcome: Balancedness::NotBalanced(w),
                    lp_solves,
                });
            }
            LpOutcome::Optimal(sol) => solutions.push(sol.point),
            LpOutcome::Unbounded { .. } => {
                return Err(BalanceError::Internal("recombination LP unbounded".into()));
            }
        }
    }
    let cert = pair.certificate_from(&average(&solutions, pair.columns()));
    Ok(BalanceCheck {
        outcome: Balancedness::Balanced(pair.checked_certificate(cert)?),
        lp_solves,
    })
}

/// Homogenised test: for each `C ∈ T`, `max ω_C` subject to
/// `Σ γ e(S) + Σ ω e(S) − α e(N) = 0` with all variables nonnegative.
/// Balanced iff every such LP is unbounded.
pub fn check_homogeneous(pair: &CollectionPair) -> Result<BalanceCheck, BalanceError> {
    let cols = pair.columns();
    let mut solutions = Vec::with_capacity(pair.t.len());
    let mut lp_solves = 0;
    for (j, &c) in pair.t.iter().enumerate() {
        let lp = homogeneous_lp(pair, j);
        lp_solves += 1;
        match lp::solve(&lp)? {
            LpOutcome::Unbounded { ray, .. } => {
                let alpha = ray[cols].clone();
                if !alpha.is_positive() {
                    return Err(BalanceError::Internal("homogeneous ray with α = 0".into()));
                }
                solutions.push(ray[..cols].iter().map(|v| v / &alpha).collect());
            }
            LpOutcome::Optimal(sol) => {
                let w = pair.witness_from_subzero(sol.duals, c)?;
                return Ok(BalanceCheck {
                    outcome: Balancedness::NotBalanced(w),
                    lp_solves,
                });
            }
            LpOutcome::Infeasible { .. } => {
                return Err(BalanceError::Internal("homogeneous LP infeasible".into()));
            }
        }
    }
    let cert = pair.certificate_from(&average(&solutions, cols));
    Ok(BalanceCheck {
        outcome: Balancedness::Balanced(pair.checked_certificate(cert)?),
        lp_solves,
    })
}

/// `P(C)` for the `index`-th member of `T`; the last column is `α`.
pub fn homogeneous_lp(pair: &CollectionPair, index: usize) -> EqualityLp {
    let mut objective = pair.unit_objective(index);
    objective.push(rational::zero());
    let mut lp = pair.recombination_lp(objective);
    for row in lp.constraints.iter_mut() {
        row.push(rational::int(-1));
    }
    lp.rhs = vec![rational::zero(); pair.n];
    lp
}
