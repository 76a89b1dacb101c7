//! The exact simplex on three small problems, one per outcome, with each
//! certificate re-checked by plain arithmetic.

use kohlberg::lp::{solve, EqualityLp, LpOutcome};
use kohlberg::rational::{int, Rational};

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

fn main() {
    let problems = [
        // max x + y  s.t.  x + 2y + s1 = 4,  3x + y + s2 = 6
        ("optimal", EqualityLp::new(ints(&[1, 1, 0, 0]), vec![ints(&[1, 2, 1, 0]), ints(&[3, 1, 0, 1])], ints(&[4, 6]))),
        // x + y = 1 and x + y = 2
        ("infeasible", EqualityLp::new(ints(&[0, 0]), vec![ints(&[1, 1]), ints(&[1, 1])], ints(&[1, 2]))),
        // max x  s.t.  x - y = 1
        ("unbounded", EqualityLp::new(ints(&[1, 0]), vec![ints(&[1, -1])], ints(&[1]))),
    ];
    for (name, lp) in problems {
        let lp = lp.unwrap();
        let outcome = solve(&lp).unwrap();
        lp.verify(&outcome).unwrap();
        let show = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        match &outcome {
            LpOutcome::Optimal(sol) => println!(
                "{name}: value {} at ({}), duals ({})",
                sol.value,
                show(&sol.point),
                show(&sol.duals)
            ),
            LpOutcome::Infeasible { farkas } => println!("{name}: Farkas vector ({})", show(farkas)),
            LpOutcome::Unbounded { point, ray } => {
                println!("{name}: from ({}) along ray ({})", show(point), show(ray))
            }
        }
    }
}
