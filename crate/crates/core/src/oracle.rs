//! Independent (pre)nucleolus computation by a sequence of exact LPs, plus
//! seeded game generators used for cross-checking the verifier.
//!
//! Stage `r` minimizes the largest excess `ε` over the coalitions whose
//! excess is not yet fixed, with fixed coalitions held at their recorded
//! excess. A coalition is then fixed iff its excess equals the optimum `ε*`
//! on the whole optimal face, which is decided by maximizing `x(S)` over
//! that face. The loop ends once the fixed coalitions together with `N`
//! have rank `n`, which determines the point.
//!
//! Coalition rows are generated lazily. The singletons and their complements
//! are always present (they keep every LP bounded); any other coalition is
//! added once an LP optimum violates it. Rows for coalitions already in the
//! span of the fixed ones are implied and dropped.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{Coalition, Game, GameError, Payoff};
use crate::linalg::SpanBasis;
use crate::lp::{self, EqualityLp, LpError, LpOutcome};
use crate::rational::{self, Rational};
use crate::verify::Mode;

pub const ORACLE_MAX_PLAYERS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the oracle supports at most {ORACLE_MAX_PLAYERS} players, got {0}")]
    TooManyPlayers(usize),
    #[error("the imputation set is empty: singleton values sum to {singletons}, v(N) = {grand}")]
    EmptyImputationSet { singletons: Rational, grand: Rational },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("oracle failure: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub epsilon: Rational,
    /// Coalitions whose excess is `epsilon` on the whole optimal face, ascending.
    pub fixed: Vec<Coalition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub point: Payoff,
    pub mode: Mode,
    /// Strictly decreasing in `epsilon`.
    pub stages: Vec<Stage>,
    pub lp_solves: usize,
}

struct Layout {
    n: usize,
    mode: Mode,
    /// Player values `v({i})` shifted out in nucleolus mode, zeros otherwise.
    offset: Vec<Rational>,
}

impl Layout {
    fn base_columns(&self) -> usize {
        match self.mode {
            Mode::Nucleolus => self.n,
            Mode::Prenucleolus => 2 * self.n,
        }
    }

    /// Coefficients of `x(S)` over the base columns plus the constant part.
    fn coalition_row(&self, s: Coalition, width: usize) -> (Vec<Rational>, Rational) {
        let mut row = vec![rational::zero(); width];
        for i in s.players() {
            row[i - 1] = rational::one();
            if self.mode == Mode::Prenucleolus {
                row[self.n + i - 1] = rational::int(-1);
            }
        }
        (row, s.sum_of(&self.offset))
    }

    fn point(&self, z: &[Rational]) -> Payoff {
        Payoff::new(
            (0..self.n)
                .map(|i| match self.mode {
                    Mode::Nucleolus => &self.offset[i] + &z[i],
                    Mode::Prenucleolus => &z[i] - &z[self.n + i],
                })
                .collect(),
        )
    }
}

enum Goal {
    MinimizeEpsilon,
    /// Maximize `x(S)` with `ε` held at the given level.
    MaximizeOnFace(Coalition, Rational),
}

struct Solved {
    point: Payoff,
    epsilon: Rational,
    value: Rational,
    /// Duals of the active rows.
    duals: Vec<Rational>,
}

struct Sequence<'a> {
    game: &'a Game,
    layout: Layout,
    basis: SpanBasis,
    fixed: Vec<(Coalition, Rational)>,
    active: Vec<Coalition>,
    lp_solves: usize,
}

impl Sequence<'_> {
    /// Solves with lazily added rows until no coalition outside the active
    /// set has excess above the optimum's `ε`.
    fn solve(&mut self, goal: &Goal) -> Result<Solved, OracleError> {
        loop {
            let solved = self.solve_active(goal)?;
            self.lp_solves += 1;
            let violated: Vec<Coalition> = self
                .game
                .coalitions()
                .filter(|s| !s.is_empty() && !self.basis.contains(*s) && !self.active.contains(s))
                .filter(|&s| self.game.excess_unchecked(s, &solved.point) > solved.epsilon)
                .collect();
            if violated.is_empty() {
                return Ok(solved);
            }
            self.active.extend(violated);
        }
    }

    fn solve_active(&self, goal: &Goal) -> Result<Solved, OracleError> {
        let game = self.game;
        let layout = &self.layout;
        let base = layout.base_columns();
        let eps_plus = base;
        let eps_minus = base + 1;
        let width = base + 2 + self.active.len();
        let mut constraints = Vec::new();
        let mut rhs = Vec::new();

        let grand = game.grand();
        let (row, constant) = layout.coalition_row(grand, width);
        constraints.push(row);
        rhs.push(game.value(grand) - constant);
        for (s, level) in &self.fixed {
            let (row, constant) = layout.coalition_row(*s, width);
            constraints.push(row);
            rhs.push(game.value(*s) - level - constant);
        }
        let first_active = constraints.len();
        for (j, &s) in self.active.iter().enumerate() {
            let (mut row, constant) = layout.coalition_row(s, width);
            row[eps_plus] = rational::one();
            row[eps_minus] = rational::int(-1);
            row[base + 2 + j] = rational::int(-1);
            constraints.push(row);
            rhs.push(game.value(s) - constant);
        }
        let mut objective = vec![rational::zero(); width];
        let mut constant = rational::zero();
        match goal {
            Goal::MinimizeEpsilon => {
                objective[eps_plus] = rational::int(-1);
                objective[eps_minus] = rational::one();
            }
            Goal::MaximizeOnFace(s, level) => {
                let (row, c) = layout.coalition_row(*s, width);
                objective = row;
                constant = c;
                let mut eps_row = vec![rational::zero(); width];
                eps_row[eps_plus] = rational::one();
                eps_row[eps_minus] = rational::int(-1);
                constraints.push(eps_row);
                rhs.push(level.clone());
            }
        }

        let lp = EqualityLp::new(objective, constraints, rhs)?;
        match lp::solve(&lp)? {
            LpOutcome::Optimal(sol) => Ok(Solved {
                point: layout.point(&sol.point),
                epsilon: &sol.point[eps_plus] - &sol.point[eps_minus],
                value: sol.value + constant,
                duals: sol.duals[first_active..first_active + self.active.len()].to_vec(),
            }),
            LpOutcome::Infeasible { .. } => Err(OracleError::Internal("LP infeasible".into())),
            LpOutcome::Unbounded { .. } => Err(OracleError::Internal("LP unbounded".into())),
        }
    }
}

pub fn compute(game: &Game, mode: Mode) -> Result<OracleResult, OracleError> {
    let n = game.players();
    if n > ORACLE_MAX_PLAYERS {
        return Err(OracleError::TooManyPlayers(n));
    }
    let grand = game.grand();
    let singletons = game.singleton_total();
    if mode == Mode::Nucleolus && &singletons > game.value(grand) {
        return Err(OracleError::EmptyImputationSet {
            singletons,
            grand: game.value(grand).clone(),
        });
    }
    if n == 1 {
        return Ok(OracleResult {
            point: Payoff::new(vec![game.value(grand).clone()]),
            mode,
            stages: Vec::new(),
            lp_solves: 0,
        });
    }

    let mut active: Vec<Coalition> = Vec::new();
    for i in 1..=n {
        for s in [Coalition::singleton(i), Coalition::from_mask(grand.mask() & !(1 << (i - 1)))] {
            if !active.contains(&s) {
                active.push(s);
            }
        }
    }
    let mut seq = Sequence {
        game,
        layout: Layout {
            n,
            mode,
            offset: match mode {
                Mode::Nucleolus => (1..=n).map(|i| game.value(Coalition::singleton(i)).clone()).collect(),
                Mode::Prenucleolus => vec![rational::zero(); n],
            },
        },
        basis: SpanBasis::from_coalitions(n, &[grand]),
        fixed: Vec::new(),
        active,
        lp_solves: 0,
    };
    let mut stages: Vec<Stage> = Vec::new();
    let mut point = None;

    while seq.basis.rank() < n {
        let basis = &seq.basis;
        seq.active.retain(|s| !basis.contains(*s));
        let optimum = seq.solve(&Goal::MinimizeEpsilon)?;
        let epsilon = optimum.epsilon.clone();
        if stages.last().is_some_and(|prev| prev.epsilon <= epsilon) {
            return Err(OracleError::Internal("stage levels did not strictly decrease".into()));
        }
        let dual_tight: Vec<Coalition> = seq
            .active
            .iter()
            .zip(&optimum.duals)
            .filter(|(_, y)| !y.is_zero())
            .map(|(s, _)| *s)
            .collect();
        let candidates: Vec<Coalition> = seq
            .active
            .iter()
            .copied()
            .filter(|&s| game.excess_unchecked(s, &optimum.point) == epsilon)
            .collect();

        let mut newly = Vec::new();
        for s in candidates {
            let face = seq.solve(&Goal::MaximizeOnFace(s, epsilon.clone()))?;
            if game.value(s) - &face.value == epsilon {
                newly.push(s);
            } else if dual_tight.contains(&s) {
                return Err(OracleError::Internal(format!(
                    "{s} has a nonzero dual but its excess varies on the optimal face"
                )));
            }
        }
        if newly.is_empty() {
            return Err(OracleError::Internal("no coalition is constant on the optimal face".into()));
        }
        newly.sort();
        for &s in &newly {
            seq.basis.insert(s);
            seq.fixed.push((s, epsilon.clone()));
        }
        stages.push(Stage { epsilon, fixed: newly });
        point = Some(optimum.point);
    }

    let point = point.expect("at least one stage for n >= 2");
    if !game.is_efficient(&point).map_err(internal)? {
        return Err(OracleError::Internal("result is not efficient".into()));
    }
    if mode == Mode::Nucleolus && !game.imputation_status(&point).map_err(internal)?.is_imputation() {
        return Err(OracleError::Internal("result is not an imputation".into()));
    }
    Ok(OracleResult {
        point,
        mode,
        stages,
        lp_solves: seq.lp_solves,
    })
}

fn internal(e: GameError) -> OracleError {
    OracleError::Internal(e.to_string())
}

/// Game with integer values drawn uniformly from `0..=range` (and `v(∅) = 0`).
pub fn random_game(n: usize, seed: u64, range: i64) -> Game {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0i64; 1 << n];
    for v in values.iter_mut().skip(1) {
        *v = rng.random_range(0..=range);
    }
    Game::from_integers(n, &values).expect("generated game is valid")
}

/// Raises `v(N)` to at least `margin` above the sum of the singleton
/// values. Any `margin ≥ 0` makes the imputation set nonempty; a positive
/// margin makes it full-dimensional, so imputations can be perturbed.
pub fn with_imputations(game: &Game, margin: i64) -> Game {
    let grand = game.grand();
    let floor = game.singleton_total() + rational::int(margin);
    if &floor <= game.value(grand) {
        return game.clone();
    }
    let mut values = game.values().to_vec();
    values[grand.mask() as usize] = floor;
    Game::new(game.players(), values).expect("only v(N) changed")
}

/// A nearby payoff in the same domain (imputations or efficient vectors)
/// that differs from `x`, or `None` when the imputation set is the single
/// point `x`.
///
/// Shares move in opposite pairs by random integer amounts; in nucleolus
/// mode only players strictly above their singleton value give up payoff,
/// and the step is halved until every share stays individually rational.
pub fn perturb(game: &Game, x: &Payoff, mode: Mode, rng: &mut impl Rng) -> Option<Payoff> {
    let n = game.players();
    if n < 2 {
        return None;
    }
    let floor = |i: usize| game.value(Coalition::singleton(i + 1));
    let donors: Vec<usize> = match mode {
        Mode::Nucleolus => (0..n).filter(|&i| &x.shares()[i] > floor(i)).collect(),
        Mode::Prenucleolus => (0..n).collect(),
    };
    if donors.is_empty() {
        return None;
    }
    let mut direction = vec![rational::zero(); n];
    for _ in 0..rng.random_range(1..=2) {
        let from = donors[rng.random_range(0..donors.len())];
        let mut to = rng.random_range(0..n - 1);
        if to >= from {
            to += 1;
        }
        let amount = rational::int(rng.random_range(1..=3));
        direction[from] -= &amount;
        direction[to] += amount;
    }
    if direction.iter().all(Zero::is_zero) {
        let from = donors[0];
        let to = (from + 1) % n;
        direction[from] = rational::int(-1);
        direction[to] = rational::one();
    }
    let mut step = rational::one();
    loop {
        let y = x.shifted(&direction, &step);
        let ok = mode == Mode::Prenucleolus
            || y.shares().iter().enumerate().all(|(i, yi)| !(yi - floor(i)).is_negative());
        if ok {
            return Some(y);
        }
        step /= rational::int(2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn reference_game_nucleolus() {
        let g = Game::from_integers(3, &[0, 1, 1, 7, 1, 4, 5, 12]).unwrap();
        let r = compute(&g, Mode::Nucleolus).unwrap();
        assert_eq!(r.point, Payoff::from_integers(&[4, 5, 3]));
        assert_eq!(r.stages[0].epsilon, rational::int(-2));
        assert_eq!(r.stages[0].fixed, vec![Coalition::from_mask(3), Coalition::from_mask(4)]);
        let pre = compute(&g, Mode::Prenucleolus).unwrap();
        assert_eq!(pre.point, Payoff::from_integers(&[4, 5, 3]));
    }

    #[test]
    fn symmetric_two_player_split() {
        let g = Game::from_integers(2, &[0, 1, 3, 10]).unwrap();
        let r = compute(&g, Mode::Nucleolus).unwrap();
        assert_eq!(r.point, Payoff::from_integers(&[4, 6]));
        assert_eq!(r.stages.len(), 1);
    }

    #[test]
    fn trivial_cases() {
        let g = Game::from_integers(2, &[0, 0, 0, 1]).unwrap();
        for mode in [Mode::Nucleolus, Mode::Prenucleolus] {
            assert_eq!(compute(&g, mode).unwrap().point, Payoff::new(vec![ratio(1, 2), ratio(1, 2)]));
        }
        // additive game: every excess is zero at c
        let c = [3i64, -1, 4];
        let values: Vec<i64> = (0..8u32)
            .map(|m| (0..3).filter(|i| m >> i & 1 == 1).map(|i| c[i]).sum())
            .collect();
        let g = Game::from_integers(3, &values).unwrap();
        assert_eq!(compute(&g, Mode::Prenucleolus).unwrap().point, Payoff::from_integers(&c));
        assert_eq!(compute(&g, Mode::Nucleolus).unwrap().point, Payoff::from_integers(&c));
        let single = Game::from_integers(1, &[0, 7]).unwrap();
        assert_eq!(compute(&single, Mode::Nucleolus).unwrap().point, Payoff::from_integers(&[7]));
    }

    #[test]
    fn prenucleolus_can_leave_the_imputation_set() {
        let g = Game::from_integers(3, &[0, 1, 0, 0, 0, 0, 1, 1]).unwrap();
        let nu = compute(&g, Mode::Nucleolus).unwrap();
        assert_eq!(nu.point, Payoff::from_integers(&[1, 0, 0]));
        let pre = compute(&g, Mode::Prenucleolus).unwrap();
        assert_eq!(pre.point, Payoff::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]));
    }

    #[test]
    fn empty_imputation_set_is_an_error() {
        let g = Game::from_integers(2, &[0, 3, 3, 4]).unwrap();
        assert!(matches!(compute(&g, Mode::Nucleolus), Err(OracleError::EmptyImputationSet { .. })));
        assert_eq!(with_imputations(&g, 0).value(g.grand()), &rational::int(6));
        assert_eq!(with_imputations(&g, 5).value(g.grand()), &rational::int(11));
        assert!(compute(&g, Mode::Prenucleolus).is_ok());
    }

    #[test]
    fn generator_is_deterministic() {
        assert_eq!(random_game(4, 7, 100), random_game(4, 7, 100));
        assert_ne!(random_game(4, 7, 100), random_game(4, 8, 100));
    }

    #[test]
    fn perturbation_stays_in_domain() {
        let g = with_imputations(&random_game(4, 3, 50), 50);
        let x = compute(&g, Mode::Nucleolus).unwrap().point;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let y = perturb(&g, &x, Mode::Nucleolus, &mut rng).unwrap();
            assert_ne!(y, x);
            assert!(g.imputation_status(&y).unwrap().is_imputation());
        }
    }
}
