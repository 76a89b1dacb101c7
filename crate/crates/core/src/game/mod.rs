//! Games with transferable utility, payoff vectors and excess values.

mod file;

pub use file::{parse_game, serialize_game};

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::rational::{self, ParseRationalError, Rational};

/// Largest supported player count; verification enumerates all `2^n` coalitions.
pub const MAX_PLAYERS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("player count {0} out of range (1..={MAX_PLAYERS})")]
    PlayerCount(usize),
    #[error("characteristic function has {got} entries, expected 2^{n} = {expected}")]
    WrongLength { n: usize, expected: usize, got: usize },
    #[error("empty coalition value must be 0")]
    NonzeroEmpty,
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error("game file is not valid JSON for the game format: {0}")]
    Json(String),
    #[error("payoff has {got} entries but the game has {expected} players")]
    PayoffLength { expected: usize, got: usize },
    #[error("coalition mask {mask} is out of range for {n} players")]
    CoalitionOutOfRange { mask: u32, n: usize },
    #[error("theta vectors differ in length ({0} vs {1})")]
    ThetaLength(usize, usize),
}

/// Subset of players as a bitmask: bit `i - 1` is set iff player `i` belongs to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub const fn from_mask(mask: u32) -> Self {
        Coalition(mask)
    }

    pub fn grand(n: usize) -> Self {
        Coalition(full_mask(n))
    }

    /// Coalition `{player}` with 1-based player numbering.
    pub fn singleton(player: usize) -> Self {
        debug_assert!(player >= 1);
        Coalition(1 << (player - 1))
    }

    /// Builds a coalition from 1-based player numbers.
    pub fn of_players(players: &[usize]) -> Self {
        players
            .iter()
            .fold(Coalition::EMPTY, |acc, &p| Coalition(acc.0 | Coalition::singleton(p).0))
    }

    pub const fn mask(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Membership test with 0-based player index.
    pub fn contains_index(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    pub fn is_valid_for(self, n: usize) -> bool {
        self.0 <= full_mask(n)
    }

    pub fn is_singleton(self) -> bool {
        self.0.count_ones() == 1
    }

    /// 1-based player numbers in ascending order.
    pub fn players(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains_index(i)).map(|i| i + 1)
    }

    /// Indicator vector `e(S)` in `R^n`.
    pub fn indicator(self, n: usize) -> Vec<Rational> {
        (0..n)
            .map(|i| {
                if self.contains_index(i) {
                    rational::one()
                } else {
                    rational::zero()
                }
            })
            .collect()
    }

    /// Inner product `y(S) = Σ_{i∈S} y_i`.
    pub fn sum_of(self, values: &[Rational]) -> Rational {
        values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.contains_index(*i))
            .fold(Rational::zero(), |acc, (_, v)| acc + v)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, p) in self.players().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// All coalitions of an `n`-player game, ascending by mask (∅ first, N last).
pub fn all_coalitions(n: usize) -> impl Iterator<Item = Coalition> {
    (0..=full_mask(n)).map(Coalition)
}

/// Payoff distribution `x`, player 1 first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Payoff(Vec<Rational>);

impl Payoff {
    pub fn new(shares: Vec<Rational>) -> Self {
        Payoff(shares)
    }

    pub fn from_integers(shares: &[i64]) -> Self {
        Payoff(shares.iter().map(|&s| rational::int(s)).collect())
    }

    /// Comma-separated rationals, e.g. `9/2,9/2,3`.
    pub fn parse_csv(text: &str) -> Result<Self, ParseRationalError> {
        rational::parse_rational_list(text).map(Payoff)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn shares(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_shares(self) -> Vec<Rational> {
        self.0
    }

    /// `x(S)`.
    pub fn total(&self, s: Coalition) -> Rational {
        s.sum_of(&self.0)
    }

    /// `x + step * direction`.
    pub fn shifted(&self, direction: &[Rational], step: &Rational) -> Payoff {
        Payoff(
            self.0
                .iter()
                .zip(direction)
                .map(|(x, y)| x + step * y)
                .collect(),
        )
    }
}

impl fmt::Display for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::format_rational_list(&self.0))
    }
}

/// Outcome of the imputation test; efficiency is checked first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImputationStatus {
    Imputation,
    NotEfficient { total: Rational, grand_value: Rational },
    /// `player` is 1-based.
    NotIndividuallyRational { player: usize },
}

impl ImputationStatus {
    pub fn is_imputation(&self) -> bool {
        matches!(self, ImputationStatus::Imputation)
    }
}

impl fmt::Display for ImputationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImputationStatus::Imputation => write!(f, "imputation"),
            ImputationStatus::NotEfficient { total, grand_value } => {
                write!(f, "not efficient: x(N) = {total} but v(N) = {grand_value}")
            }
            ImputationStatus::NotIndividuallyRational { player } => {
                write!(f, "not individually rational for player {player}")
            }
        }
    }
}

/// All `2^n` excess values sorted non-increasingly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theta(Vec<Rational>);

impl Theta {
    pub fn from_unsorted(mut values: Vec<Rational>) -> Self {
        values.sort_by(|a, b| b.cmp(a));
        Theta(values)
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }
}

/// Lexicographic comparison of two sorted excess vectors of equal length.
pub fn lex_compare(a: &Theta, b: &Theta) -> Result<Ordering, GameError> {
    if a.0.len() != b.0.len() {
        return Err(GameError::ThetaLength(a.0.len(), b.0.len()));
    }
    Ok(a.0.iter().cmp(b.0.iter()))
}

/// Cooperative game `(N, v)` in characteristic-function form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    n: usize,
    values: Vec<Rational>,
}

impl Game {
    /// `values[m]` is `v(S)` for the coalition with mask `m`.
    pub fn new(n: usize, values: Vec<Rational>) -> Result<Self, GameError> {
        if n == 0 || n > MAX_PLAYERS {
            return Err(GameError::PlayerCount(n));
        }
        let expected = 1usize << n;
        if values.len() != expected {
            return Err(GameError::WrongLength {
                n,
                expected,
                got: values.len(),
            });
        }
        if !values[0].is_zero() {
            return Err(GameError::NonzeroEmpty);
        }
        Ok(Game { n, values })
    }

    pub fn from_integers(n: usize, values: &[i64]) -> Result<Self, GameError> {
        Game::new(n, values.iter().map(|&v| rational::int(v)).collect())
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, s: Coalition) -> &Rational {
        &self.values[s.mask() as usize]
    }

    pub fn grand(&self) -> Coalition {
        Coalition::grand(self.n)
    }

    pub fn coalitions(&self) -> impl Iterator<Item = Coalition> {
        all_coalitions(self.n)
    }

    pub fn check_payoff(&self, x: &Payoff) -> Result<(), GameError> {
        if x.len() != self.n {
            return Err(GameError::PayoffLength {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn check_coalition(&self, s: Coalition) -> Result<(), GameError> {
        if !s.is_valid_for(self.n) {
            return Err(GameError::CoalitionOutOfRange {
                mask: s.mask(),
                n: self.n,
            });
        }
        Ok(())
    }

    /// `d(S, x) = v(S) − x(S)`.
    pub fn excess(&self, s: Coalition, x: &Payoff) -> Result<Rational, GameError> {
        self.check_coalition(s)?;
        self.check_payoff(x)?;
        Ok(self.excess_unchecked(s, x))
    }

    pub(crate) fn excess_unchecked(&self, s: Coalition, x: &Payoff) -> Rational {
        self.value(s) - x.total(s)
    }

    pub fn is_efficient(&self, x: &Payoff) -> Result<bool, GameError> {
        self.check_payoff(x)?;
        Ok(&x.total(self.grand()) == self.value(self.grand()))
    }

    pub fn imputation_status(&self, x: &Payoff) -> Result<ImputationStatus, GameError> {
        self.check_payoff(x)?;
        let total = x.total(self.grand());
        let grand_value = self.value(self.grand());
        if &total != grand_value {
            return Ok(ImputationStatus::NotEfficient {
                total,
                grand_value: grand_value.clone(),
            });
        }
        for (i, share) in x.shares().iter().enumerate() {
            if share < self.value(Coalition::singleton(i + 1)) {
                return Ok(ImputationStatus::NotIndividuallyRational { player: i + 1 });
            }
        }
        Ok(ImputationStatus::Imputation)
    }

    /// Singletons whose individual-rationality constraint is tight at `x`.
    pub fn t0_set(&self, x: &Payoff) -> Result<Vec<Coalition>, GameError> {
        self.check_payoff(x)?;
        Ok((1..=self.n)
            .map(Coalition::singleton)
            .filter(|&s| &x.total(s) == self.value(s))
            .collect())
    }

    pub fn theta(&self, x: &Payoff) -> Result<Theta, GameError> {
        self.check_payoff(x)?;
        Ok(Theta::from_unsorted(
            self.coalitions()
                .map(|s| self.excess_unchecked(s, x))
                .collect(),
        ))
    }

    /// Sum of singleton values; the imputation set is nonempty iff this is at most `v(N)`.
    pub fn singleton_total(&self) -> Rational {
        (1..=self.n)
            .map(|p| self.value(Coalition::singleton(p)).clone())
            .fold(Rational::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn reference_game() -> Game {
        // v(1)=1 v(2)=1 v(12)=7 v(3)=1 v(13)=4 v(23)=5 v(N)=12
        Game::from_integers(3, &[0, 1, 1, 7, 1, 4, 5, 12]).unwrap()
    }

    fn c(players: &[usize]) -> Coalition {
        Coalition::of_players(players)
    }

    #[test]
    fn excess_values() {
        let g = reference_game();
        let nu = Payoff::from_integers(&[4, 5, 3]);
        assert_eq!(g.excess(c(&[1, 2]), &nu).unwrap(), int(-2));
        assert_eq!(g.excess(c(&[1, 3]), &nu).unwrap(), int(-3));
        assert_eq!(g.excess(g.grand(), &nu).unwrap(), int(0));
        assert_eq!(g.excess(Coalition::EMPTY, &nu).unwrap(), int(0));
    }

    #[test]
    fn excess_rejects_bad_dimensions() {
        let g = reference_game();
        assert!(matches!(
            g.excess(c(&[1]), &Payoff::from_integers(&[1, 2])),
            Err(GameError::PayoffLength { .. })
        ));
        assert!(matches!(
            g.excess(Coalition::from_mask(8), &Payoff::from_integers(&[1, 2, 3])),
            Err(GameError::CoalitionOutOfRange { .. })
        ));
    }

    #[test]
    fn imputation_checks() {
        let g = reference_game();
        assert!(g
            .imputation_status(&Payoff::from_integers(&[4, 5, 3]))
            .unwrap()
            .is_imputation());
        assert_eq!(
            g.imputation_status(&Payoff::from_integers(&[13, -1, 0])).unwrap(),
            ImputationStatus::NotIndividuallyRational { player: 2 }
        );
        assert!(matches!(
            g.imputation_status(&Payoff::from_integers(&[4, 4, 3])).unwrap(),
            ImputationStatus::NotEfficient { .. }
        ));
        // efficiency is reported before individual rationality
        assert!(matches!(
            g.imputation_status(&Payoff::from_integers(&[0, 0, 0])).unwrap(),
            ImputationStatus::NotEfficient { .. }
        ));
    }

    #[test]
    fn tight_singletons() {
        let g = reference_game();
        assert!(g.t0_set(&Payoff::from_integers(&[4, 5, 3])).unwrap().is_empty());
        assert_eq!(
            g.t0_set(&Payoff::from_integers(&[1, 8, 3])).unwrap(),
            vec![c(&[1])]
        );
        assert_eq!(
            g.t0_set(&Payoff::from_integers(&[1, 1, 10])).unwrap(),
            vec![c(&[1]), c(&[2])]
        );
    }

    #[test]
    fn theta_enumeration() {
        let g = reference_game();
        let expect = |xs: &[i64]| xs.iter().map(|&v| int(v)).collect::<Vec<_>>();
        assert_eq!(
            g.theta(&Payoff::from_integers(&[4, 5, 3])).unwrap().values(),
            expect(&[0, 0, -2, -2, -3, -3, -3, -4]).as_slice()
        );
        assert_eq!(
            g.theta(&Payoff::from_integers(&[5, 4, 3])).unwrap().values(),
            expect(&[0, 0, -2, -2, -2, -3, -4, -4]).as_slice()
        );
        let single = Game::new(1, vec![int(0), ratio(7, 3)]).unwrap();
        let theta = single.theta(&Payoff::new(vec![ratio(7, 3)])).unwrap();
        assert_eq!(theta.values(), &[int(0), int(0)]);
    }

    #[test]
    fn lexicographic_order() {
        let g = reference_game();
        let nu = g.theta(&Payoff::from_integers(&[4, 5, 3])).unwrap();
        let other = g.theta(&Payoff::from_integers(&[5, 4, 3])).unwrap();
        assert_eq!(lex_compare(&nu, &other).unwrap(), Ordering::Less);
        assert_eq!(lex_compare(&nu, &nu).unwrap(), Ordering::Equal);
        let a = Theta::from_unsorted(vec![int(0), int(-1)]);
        let b = Theta::from_unsorted(vec![int(0), int(-2)]);
        assert_eq!(lex_compare(&a, &b).unwrap(), Ordering::Greater);
        let short = Theta::from_unsorted(vec![int(0)]);
        assert!(lex_compare(&a, &short).is_err());
    }

    #[test]
    fn game_construction_errors() {
        assert_eq!(Game::from_integers(0, &[0]), Err(GameError::PlayerCount(0)));
        assert!(matches!(
            Game::from_integers(2, &[0, 1, 2]),
            Err(GameError::WrongLength { expected: 4, got: 3, .. })
        ));
        assert_eq!(
            Game::from_integers(1, &[1, 1]),
            Err(GameError::NonzeroEmpty)
        );
    }

    #[test]
    fn coalition_display_and_members() {
        assert_eq!(c(&[1, 3]).to_string(), "{1,3}");
        assert_eq!(Coalition::EMPTY.to_string(), "{}");
        assert_eq!(c(&[2, 3]).mask(), 6);
        assert_eq!(c(&[2, 3]).players().collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(Coalition::grand(3).mask(), 7);
    }
}
