mod common;

use std::cmp::Ordering;

use kohlberg::game::{parse_game, serialize_game, Game, Payoff};
use kohlberg::oracle::{compute, perturb, random_game, with_imputations, OracleError};
use kohlberg::rational::{int, ratio};
use kohlberg::verify::{verify, Mode, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_lex, brute_theta, data, reference_game};

#[test]
fn reference_points() {
    assert_eq!(compute(&reference_game(), Mode::Nucleolus).unwrap().point, Payoff::from_integers(&[4, 5, 3]));
    let sym = parse_game(&std::fs::read(data("symmetric2.json")).unwrap()).unwrap();
    assert_eq!(compute(&sym, Mode::Nucleolus).unwrap().point, Payoff::new(vec![ratio(1, 2), ratio(1, 2)]));
}

#[test]
fn shipped_random_fixtures_match_the_generator() {
    for seed in [1u64, 2] {
        let shipped = std::fs::read(data(&format!("random_n3_seed{seed}.json"))).unwrap();
        assert_eq!(serialize_game(&random_game(3, seed, 100)), shipped);
        assert_eq!(serialize_game(&random_game(3, seed, 100)), serialize_game(&random_game(3, seed, 100)));
    }
    assert_ne!(
        std::fs::read(data("random_n3_seed1.json")).unwrap(),
        std::fs::read(data("random_n3_seed2.json")).unwrap()
    );
    let g = random_game(5, 9, 10);
    assert_eq!(g.values().len(), 32);
    assert_eq!(g.values()[0], int(0));
}

#[test]
fn stages_decrease_and_open_at_the_first_tight_level() {
    for seed in 0..20 {
        let g = with_imputations(&random_game(4, seed, 60), 60);
        for mode in [Mode::Nucleolus, Mode::Prenucleolus] {
            let result = compute(&g, mode).unwrap();
            assert!(result.stages.windows(2).all(|w| w[0].epsilon > w[1].epsilon));
            let report = verify(&g, &result.point, Variant::Simplified, mode).unwrap();
            assert!(report.accepted());
            assert_eq!(report.iterations[0].tight.epsilon, result.stages[0].epsilon);
        }
    }
}

#[test]
fn perturbed_points_are_lexicographically_worse() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..20 {
        let g = with_imputations(&random_game(3, seed, 40), 40);
        for mode in [Mode::Nucleolus, Mode::Prenucleolus] {
            let x = compute(&g, mode).unwrap().point;
            for _ in 0..5 {
                let y = perturb(&g, &x, mode, &mut rng).unwrap();
                assert_eq!(brute_lex(&brute_theta(&g, &x), &brute_theta(&g, &y)), Ordering::Less);
            }
        }
    }
}

#[test]
fn input_limits() {
    let big = Game::new(13, vec![int(0); 1 << 13]).unwrap();
    assert_eq!(compute(&big, Mode::Nucleolus), Err(OracleError::TooManyPlayers(13)));
    let crowded = Game::from_integers(2, &[0, 2, 2, 3]).unwrap();
    assert!(matches!(compute(&crowded, Mode::Nucleolus), Err(OracleError::EmptyImputationSet { .. })));
}
