//! Accept the nucleolus of a three-player game and reject two nearby
//! payoffs, printing the tight sets, balancing weights and the improving step.

use kohlberg::game::{Game, Payoff};
use kohlberg::verify::{verify, Mode, Variant};

fn main() {
    let game = Game::from_integers(3, &[0, 1, 1, 7, 1, 4, 5, 12]).unwrap();

    for payoff in ["4,5,3", "9/2,9/2,3", "5,4,3"] {
        let x = Payoff::parse_csv(payoff).unwrap();
        let report = verify(&game, &x, Variant::Improved, Mode::Nucleolus).unwrap();
        println!("x = ({x}): {}", report.verdict.name());
        for it in &report.iterations {
            let tight: Vec<String> = it.tight.members.iter().map(|s| s.to_string()).collect();
            println!(
                "  k={} eps={} T={} {}",
                it.k,
                it.tight.epsilon,
                tight.join(" "),
                if it.balanced { "balanced" } else { "not balanced" }
            );
            if let Some(cert) = &it.certificate {
                let w: Vec<String> = cert.omega.iter().map(|(s, w)| format!("{s}:{w}")).collect();
                println!("      weights {}", w.join(" "));
            }
        }
        if let Some(rej) = &report.rejection {
            let y: Vec<String> = rej.witness.y.iter().map(|v| v.to_string()).collect();
            println!("  move along y = ({}) by {} to ({})", y.join(","), rej.delta, rej.better);
        }
    }
}
