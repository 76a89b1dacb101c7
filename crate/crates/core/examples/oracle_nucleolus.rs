//! Compute the nucleolus and prenucleolus of seeded random games with the
//! sequential-LP oracle and confirm both with the verifier.
//!
//! Run with `cargo run --example oracle_nucleolus -- <n> <seed>`.

use kohlberg::oracle::{compute, random_game, with_imputations};
use kohlberg::verify::{verify, Mode, Variant};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(4, |a| a.parse().unwrap());
    let seed: u64 = args.next().map_or(1, |a| a.parse().unwrap());
    let game = with_imputations(&random_game(n, seed, 100), 100);
    println!("v = {:?}", game.values().iter().map(|v| v.to_string()).collect::<Vec<_>>());

    for mode in [Mode::Nucleolus, Mode::Prenucleolus] {
        let result = compute(&game, mode).unwrap();
        println!("{mode}: ({}) after {} LPs", result.point, result.lp_solves);
        for (r, stage) in result.stages.iter().enumerate() {
            let fixed: Vec<String> = stage.fixed.iter().map(|s| s.to_string()).collect();
            println!("  stage {} eps={} fixed {}", r + 1, stage.epsilon, fixed.join(" "));
        }
        for variant in Variant::ALL {
            let report = verify(&game, &result.point, variant, mode).unwrap();
            println!("  {:<10} {}", variant.name(), report.verdict.name());
        }
    }
}
