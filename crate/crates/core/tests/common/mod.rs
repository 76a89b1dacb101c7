#![allow(dead_code)]

use std::cmp::Ordering;
use std::path::PathBuf;

use kohlberg::game::{Coalition, Game, Payoff};
use kohlberg::rational::Rational;

pub fn reference_game() -> Game {
    Game::from_integers(3, &[0, 1, 1, 7, 1, 4, 5, 12]).unwrap()
}

pub fn c(players: &[usize]) -> Coalition {
    Coalition::of_players(players)
}

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// Excess vector recomputed with plain loops over masks, sorted descending.
pub fn brute_theta(game: &Game, x: &Payoff) -> Vec<Rational> {
    let n = game.players();
    let mut out: Vec<Rational> = (0..1u32 << n)
        .map(|m| {
            let mut paid = Rational::from_integer(0.into());
            for i in 0..n {
                if m >> i & 1 == 1 {
                    paid += &x.shares()[i];
                }
            }
            &game.values()[m as usize] - paid
        })
        .collect();
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// First differing entry decides.
pub fn brute_lex(a: &[Rational], b: &[Rational]) -> Ordering {
    for (p, q) in a.iter().zip(b) {
        match p.cmp(q) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// `Σ_{S∈T0} γ_S e(S) + Σ_{S∈T} ω_S e(S)` over `n` coordinates.
pub fn recombine(n: usize, weights: &[(Coalition, Rational)]) -> Vec<Rational> {
    let mut out = vec![Rational::from_integer(0.into()); n];
    for (s, w) in weights {
        for i in 0..n {
            if s.mask() >> i & 1 == 1 {
                out[i] += w;
            }
        }
    }
    out
}
