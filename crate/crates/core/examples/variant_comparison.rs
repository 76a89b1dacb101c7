//! Iteration counts of the three verifier variants on a game family whose
//! tight sets come in exponentially many distinct excess levels.
//!
//! Players `1..=n-3` are "loners" worth `k + 3` alone (`k = 2^(n-3) - (n-2)`);
//! the larger loner coalitions get the distinct values `1..=k`, ordered by
//! size; every nonempty subset of the last three players is worth
//! `k + |S|`; `v(N) = n - 2`. The point `(1, …, 1, 1/3, 1/3, 1/3)` is its
//! prenucleolus (the loners make the imputation set empty).
//!
//! Run with `cargo run --example variant_comparison -- 8`.

use kohlberg::game::{Coalition, Game, Payoff};
use kohlberg::rational::{int, ratio, Rational};
use kohlberg::verify::{verify, Mode, Variant};

fn levels_game(n: usize) -> Game {
    assert!(n >= 4, "the family needs at least four players");
    let loners = n - 3;
    let loner_mask = (1u32 << loners) - 1;
    let k = (1i64 << loners) - (loners as i64 + 1);
    let mut big: Vec<u32> = (1..=loner_mask).filter(|m| m.count_ones() >= 2).collect();
    big.sort_by_key(|m| (m.count_ones(), *m));
    let mut values = vec![int(0); 1 << n];
    for (rank, m) in big.iter().enumerate() {
        values[*m as usize] = int(rank as i64 + 1);
    }
    for i in 0..loners {
        values[1 << i] = int(k + 3);
    }
    for tail in 1..8u32 {
        values[(tail << loners) as usize] = int(k + tail.count_ones() as i64);
    }
    values[(1 << n) - 1] = int(n as i64 - 2);
    Game::new(n, values).expect("valid game")
}

fn main() {
    let n: usize = std::env::args().nth(1).map_or(7, |a| a.parse().expect("player count"));
    let game = levels_game(n);
    let mut shares: Vec<Rational> = vec![int(1); n - 3];
    shares.extend([ratio(1, 3), ratio(1, 3), ratio(1, 3)]);
    let x = Payoff::new(shares);

    println!("n = {n}, x = ({x})");
    for variant in Variant::ALL {
        let report = verify(&game, &x, variant, Mode::Prenucleolus).expect("verification runs");
        let levels: Vec<String> = report
            .iterations
            .iter()
            .take(4)
            .map(|it| it.tight.epsilon.to_string())
            .collect();
        println!(
            "{:<10} verdict={:<12} iterations={:<4} lp_solves={:<4} stored={:<4} first levels: {}",
            variant.name(),
            report.verdict.name(),
            report.iteration_count(),
            report.lp_solves,
            report.stored_coalitions_total,
            levels.join(", ")
        );
    }
    let loners = Coalition::from_mask((1 << (n - 3)) - 1);
    println!("v({loners}) = {}", game.value(loners));
}
