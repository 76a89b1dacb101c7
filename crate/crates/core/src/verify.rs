//! Kohlberg-style verification that a payoff vector is the (pre)nucleolus.
//!
//! Three variants share one driver:
//!
//! * [`Variant::Original`] forms tight sets over coalitions not yet *in*
//!   `H` and stops when `H` covers all `2^n` coalitions.
//! * [`Variant::Simplified`] forms tight sets over coalitions outside
//!   `span(H)` and stops when `rank(H) = n`, so it runs at most `n − 1`
//!   iterations.
//! * [`Variant::Improved`] additionally stores only a linearly independent
//!   representative of each tight set, keeping at most `n(n − 1)` stored
//!   coalitions.
//!
//! A rejection always comes with an imbalance witness `y` and a step `δ`
//! such that `x + δy` has a lexicographically smaller sorted excess vector,
//! which is checked by enumeration before the report is returned.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use thiserror::Error;

use crate::balance::{
    self, BalanceError, Balancedness, BalancednessCertificate, Checker, CollectionPair,
    ImbalanceWitness,
};
use crate::game::{lex_compare, Coalition, Game, GameError, ImputationStatus, Payoff};
use crate::linalg::{self, LinalgError, SpanBasis};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Balance(#[from] BalanceError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("internal verification error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Original,
    Simplified,
    Improved,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Original, Variant::Simplified, Variant::Improved];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Original => "original",
            Variant::Simplified => "simplified",
            Variant::Improved => "improved",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

/// Nucleolus (imputation set, tight singletons form `T0`) or prenucleolus
/// (efficient vectors, `T0 = ∅`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Nucleolus,
    Prenucleolus,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Nucleolus => "nucleolus",
            Mode::Prenucleolus => "prenucleolus",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Coalitions sharing the largest excess among those not yet excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightSet {
    pub epsilon: Rational,
    /// Ascending by mask.
    pub members: Vec<Coalition>,
}

/// Which coalitions `tight_set_next` skips.
pub enum Exclusion<'a> {
    /// `included[mask]` marks membership in `H`.
    ByMembership(&'a [bool]),
    BySpan(&'a SpanBasis),
}

impl Exclusion<'_> {
    fn excludes(&self, s: Coalition) -> bool {
        match self {
            Exclusion::ByMembership(included) => included[s.mask() as usize],
            Exclusion::BySpan(basis) => basis.contains(s),
        }
    }
}

/// Largest excess over the non-excluded coalitions and every coalition
/// attaining it; `None` when nothing is left. `∅` and `N` are always skipped.
pub fn tight_set_next(game: &Game, x: &Payoff, exclusion: &Exclusion<'_>) -> Result<Option<TightSet>, GameError> {
    game.check_payoff(x)?;
    let grand = game.grand();
    let mut best: Option<TightSet> = None;
    for s in game.coalitions() {
        if s.is_empty() || s == grand {
            continue;
        }
        let d = game.excess_unchecked(s, x);
        let ord = best.as_ref().map(|b| d.cmp(&b.epsilon));
        if ord == Some(Ordering::Less) || exclusion.excludes(s) {
            continue;
        }
        match ord {
            Some(Ordering::Equal) => best.as_mut().expect("set").members.push(s),
            _ => {
                best = Some(TightSet {
                    epsilon: d,
                    members: vec![s],
                })
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Run all four balancedness deciders at every iteration and require agreement.
    pub paranoid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    pub k: usize,
    pub tight: TightSet,
    /// The collection whose `T0`-balancedness was decided in this iteration.
    pub checked: Vec<Coalition>,
    pub balanced: bool,
    /// Improved variant only: the representative stored in place of the tight set.
    pub representative: Option<Vec<Coalition>>,
    pub h_rank_after: usize,
    pub certificate: Option<BalancednessCertificate>,
    pub lp_solves: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub k: usize,
    pub witness: ImbalanceWitness,
    pub delta: Rational,
    pub better: Payoff,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    IsNucleolus,
    NotNucleolus,
    NotImputation(ImputationStatus),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::IsNucleolus => "IsNucleolus",
            Verdict::NotNucleolus => "NotNucleolus",
            Verdict::NotImputation(_) => "NotImputation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub n: usize,
    pub verdict: Verdict,
    pub mode: Mode,
    pub variant: Variant,
    pub t0: Vec<Coalition>,
    pub iterations: Vec<IterationRecord>,
    pub rejection: Option<Rejection>,
    /// Coalitions added to `H` beyond `{∅, N}` (representatives for Improved).
    pub stored_coalitions_total: usize,
    pub lp_solves: usize,
}

impl VerificationReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::IsNucleolus
    }

    /// Iterations that passed the balancedness test plus the failing one, if any.
    pub fn iteration_count(&self) -> usize {
        self.iterations.len()
    }

    /// Violations of the iteration, storage and representative-rank bounds;
    /// empty for a sound run.
    pub fn bound_violations(&self) -> Vec<String> {
        let n = self.n;
        let mut out = Vec::new();
        let span_based = self.variant != Variant::Original;
        if span_based && self.iterations.len() > n.saturating_sub(1) {
            out.push(format!(
                "{} iterations exceed n - 1 = {}",
                self.iterations.len(),
                n.saturating_sub(1)
            ));
        }
        if self.variant == Variant::Improved && self.stored_coalitions_total > n * n.saturating_sub(1) {
            out.push(format!(
                "stored {} coalitions, bound n(n-1) = {}",
                self.stored_coalitions_total,
                n * n.saturating_sub(1)
            ));
        }
        let mut prev_rank = 1;
        for it in self.iterations.iter().filter(|it| it.balanced) {
            if span_based && it.h_rank_after <= prev_rank {
                out.push(format!("rank of H did not grow at k = {}", it.k));
            }
            prev_rank = it.h_rank_after;
            if let Some(rep) = &it.representative {
                let r = linalg::rank(rep, n);
                if rep.is_empty() || r != rep.len() {
                    out.push(format!(
                        "representative at k = {} has size {} but rank {}",
                        it.k,
                        rep.len(),
                        r
                    ));
                }
            }
        }
        out
    }

    /// Consecutive iterations whose tight-set levels fail to strictly decrease.
    pub fn epsilon_violations(&self) -> Vec<String> {
        self.iterations
            .windows(2)
            .filter(|pair| pair[1].tight.epsilon >= pair[0].tight.epsilon)
            .map(|pair| {
                format!(
                    "epsilon not strictly decreasing at k = {}: {} then {}",
                    pair[1].k, pair[0].tight.epsilon, pair[1].tight.epsilon
                )
            })
            .collect()
    }
}

pub fn verify(game: &Game, x: &Payoff, variant: Variant, mode: Mode) -> Result<VerificationReport, VerifyError> {
    verify_with(game, x, variant, mode, &VerifyOptions::default())
}

pub fn verify_with(
    game: &Game,
    x: &Payoff,
    variant: Variant,
    mode: Mode,
    options: &VerifyOptions,
) -> Result<VerificationReport, VerifyError> {
    game.check_payoff(x)?;
    let n = game.players();
    let mut report = VerificationReport {
        n,
        verdict: Verdict::IsNucleolus,
        mode,
        variant,
        t0: Vec::new(),
        iterations: Vec::new(),
        rejection: None,
        stored_coalitions_total: 0,
        lp_solves: 0,
    };

    let status = match mode {
        Mode::Nucleolus => game.imputation_status(x)?,
        Mode::Prenucleolus => match game.imputation_status(x)? {
            ImputationStatus::NotIndividuallyRational { .. } => ImputationStatus::Imputation,
            other => other,
        },
    };
    if !status.is_imputation() {
        report.verdict = Verdict::NotImputation(status);
        return Ok(report);
    }
    report.t0 = match mode {
        Mode::Nucleolus => game.t0_set(x)?,
        Mode::Prenucleolus => Vec::new(),
    };

    let grand = game.grand();
    let total = 1usize << n;
    let mut included = vec![false; total];
    included[0] = true;
    included[grand.mask() as usize] = true;
    let mut included_count = 2usize.min(total);
    let mut basis = SpanBasis::new(n);
    basis.insert(grand);
    let mut stored: Vec<Coalition> = Vec::new();
    let mut union: Vec<Coalition> = Vec::new();

    for k in 1.. {
        let more = match variant {
            Variant::Original => included_count < total,
            Variant::Simplified | Variant::Improved => basis.rank() < n,
        };
        if !more {
            break;
        }
        let exclusion = match variant {
            Variant::Original => Exclusion::ByMembership(&included),
            _ => Exclusion::BySpan(&basis),
        };
        let tight = tight_set_next(game, x, &exclusion)?
            .ok_or_else(|| VerifyError::Internal("no coalition left while H is incomplete".into()))?;

        let mut checked: Vec<Coalition> = match variant {
            Variant::Original | Variant::Simplified => union.clone(),
            Variant::Improved => stored.clone(),
        };
        checked.extend(&tight.members);
        checked.sort();
        let pair = CollectionPair::new(n, &report.t0, &checked)?;
        let check = if options.paranoid {
            let all = balance::check_unanimous(&pair)?;
            report.lp_solves += all.iter().skip(1).map(|(_, r)| r.lp_solves).sum::<usize>();
            all.into_iter().next().expect("four results").1
        } else {
            balance::check(&pair, Checker::Fast)?
        };
        report.lp_solves += check.lp_solves;
        if check.lp_solves > linalg::rank(pair.t(), n) {
            return Err(VerifyError::Internal(format!(
                "balancedness check used {} LPs for a collection of rank {}",
                check.lp_solves,
                linalg::rank(pair.t(), n)
            )));
        }

        match check.outcome {
            Balancedness::Balanced(cert) => {
                let rank_before = basis.rank();
                let representative = match variant {
                    Variant::Improved => Some(representative_subset(&tight.members, &stored, &report.t0, n)?),
                    _ => None,
                };
                let added = representative.as_deref().unwrap_or(&tight.members);
                for &s in added {
                    basis.insert(s);
                    stored.push(s);
                }
                report.stored_coalitions_total += added.len();
                for &s in &tight.members {
                    if !included[s.mask() as usize] {
                        included[s.mask() as usize] = true;
                        included_count += 1;
                    }
                }
                union.extend(&tight.members);
                if variant != Variant::Original && basis.rank() <= rank_before {
                    return Err(VerifyError::Internal(format!("rank of H did not grow at k = {k}")));
                }
                report.iterations.push(IterationRecord {
                    k,
                    tight,
                    checked,
                    balanced: true,
                    representative,
                    h_rank_after: basis.rank(),
                    certificate: Some(cert),
                    lp_solves: check.lp_solves,
                });
            }
            Balancedness::NotBalanced(witness) => {
                let protected: Vec<Coalition> = game
                    .coalitions()
                    .filter(|s| basis.contains(*s) || tight.members.binary_search(s).is_ok())
                    .collect();
                let (delta, better) =
                    improving_direction(game, x, &witness, &tight.epsilon, &protected, mode)?;
                report.iterations.push(IterationRecord {
                    k,
                    tight,
                    checked,
                    balanced: false,
                    representative: None,
                    h_rank_after: basis.rank(),
                    certificate: None,
                    lp_solves: check.lp_solves,
                });
                report.verdict = Verdict::NotNucleolus;
                report.rejection = Some(Rejection {
                    k,
                    witness,
                    delta,
                    better,
                });
                break;
            }
        }
    }
    Ok(report)
}

/// Picks a linearly independent `R ⊆ q` such that `R ∪ p` stays
/// `T0`-balanced.
///
/// Strictly positive weights on `p ∪ q` come from the min-weight LP; the
/// `q` part is then shrunk by Carathéodory reduction with everything else
/// held fixed. Members of `q` that also belong to `p` are treated as part of `p`.
pub fn representative_subset(
    q: &[Coalition],
    p: &[Coalition],
    t0: &[Coalition],
    n: usize,
) -> Result<Vec<Coalition>, VerifyError> {
    let mut q: Vec<Coalition> = q.iter().copied().filter(|s| !s.is_empty() && !p.contains(s)).collect();
    q.sort();
    q.dedup();
    if q.is_empty() {
        return Err(VerifyError::Internal("representative of an empty collection".into()));
    }
    let union: Vec<Coalition> = p.iter().chain(&q).copied().collect();
    let pair = CollectionPair::new(n, t0, &union)?;
    let Balancedness::Balanced(cert) = balance::check_minweight(&pair)?.outcome else {
        return Err(VerifyError::Internal("representative requested for an unbalanced collection".into()));
    };
    let weight = |s: Coalition| cert.omega_of(s).cloned().expect("member weight");
    let vectors: Vec<Vec<Rational>> = q.iter().map(|s| s.indicator(n)).collect();
    let weights: Vec<Rational> = q.iter().map(|&s| weight(s)).collect();
    let fixed = linalg::combine(&vectors, &weights, n);
    let (indices, new_weights) = linalg::caratheodory_reduce(&vectors, &weights, &fixed)?;
    let representative: Vec<Coalition> = indices.iter().map(|&j| q[j]).collect();

    // the reduced weights together with the untouched γ and p-weights still recombine to e(N)
    let check_pair = CollectionPair::new(n, t0, &p.iter().chain(&representative).copied().collect::<Vec<_>>())?;
    let mut omega: Vec<(Coalition, Rational)> = p
        .iter()
        .filter(|s| !s.is_empty())
        .map(|&s| (s, weight(s)))
        .chain(representative.iter().copied().zip(new_weights))
        .collect();
    omega.sort_by_key(|(s, _)| *s);
    omega.dedup_by_key(|(s, _)| *s);
    let reduced = BalancednessCertificate {
        gamma: cert.gamma.clone(),
        omega,
    };
    if !reduced.verify(&check_pair) || linalg::rank(&representative, n) != representative.len() {
        return Err(VerifyError::Internal("representative subset failed its self-check".into()));
    }
    Ok(representative)
}

/// Step `δ > 0` along the witness direction such that `x + δy` is
/// lexicographically better than `x`.
///
/// `δ` is half the largest step that keeps every unprotected coalition's
/// excess below `ε_k` (and, in nucleolus mode, every share individually
/// rational); `δ = 1` when nothing limits the step.
pub fn improving_direction(
    game: &Game,
    x: &Payoff,
    witness: &ImbalanceWitness,
    epsilon_k: &Rational,
    protected: &[Coalition],
    mode: Mode,
) -> Result<(Rational, Payoff), VerifyError> {
    game.check_payoff(x)?;
    let y = &witness.y;
    if y.len() != game.players() {
        return Err(VerifyError::Internal("witness has the wrong dimension".into()));
    }
    let mut limit: Option<Rational> = None;
    let mut tighten = |bound: Rational| {
        if limit.as_ref().is_none_or(|l| bound < *l) {
            limit = Some(bound);
        }
    };
    for s in game.coalitions() {
        if protected.binary_search(&s).is_ok() {
            continue;
        }
        let ys = s.sum_of(y);
        if !ys.is_negative() {
            continue;
        }
        let gap = epsilon_k - game.excess_unchecked(s, x);
        if !gap.is_positive() {
            return Err(VerifyError::Internal(format!(
                "unprotected coalition {s} already has excess >= epsilon"
            )));
        }
        tighten(gap / -ys);
    }
    if mode == Mode::Nucleolus {
        for (i, yi) in y.iter().enumerate() {
            if !yi.is_negative() {
                continue;
            }
            let slack = &x.shares()[i] - game.value(Coalition::singleton(i + 1));
            if !slack.is_positive() {
                return Err(VerifyError::Internal("witness lowers a tight singleton".into()));
            }
            tighten(slack / -yi);
        }
    }
    let delta = limit.map_or_else(rational::one, |l| l / rational::int(2));
    let better = x.shifted(y, &delta);
    if lex_compare(&game.theta(&better)?, &game.theta(x)?)? != Ordering::Less {
        return Err(VerifyError::Internal(format!(
            "step {delta} along {} does not improve the excess vector",
            rational::format_rational_list(y)
        )));
    }
    if mode == Mode::Nucleolus && !game.imputation_status(&better)?.is_imputation() {
        return Err(VerifyError::Internal("improved point left the imputation set".into()));
    }
    Ok((delta, better))
}
