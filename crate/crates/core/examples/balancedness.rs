//! The four balancedness deciders on a few collections, with the
//! certificates and witnesses they return.

use kohlberg::balance::{check, Balancedness, Checker, CollectionPair};
use kohlberg::game::Coalition;

fn show(n: usize, t0: &[u32], t: &[u32]) {
    let to = |ms: &[u32]| ms.iter().map(|&m| Coalition::from_mask(m)).collect::<Vec<_>>();
    let pair = CollectionPair::new(n, &to(t0), &to(t)).unwrap();
    let names: Vec<String> = pair.t().iter().map(|s| s.to_string()).collect();
    println!("T0 = {:?}, T = {}", t0, names.join(" "));
    for checker in Checker::ALL {
        let result = check(&pair, checker).unwrap();
        let detail = match &result.outcome {
            Balancedness::Balanced(cert) => {
                assert!(cert.verify(&pair));
                let w: Vec<String> = cert.omega.iter().map(|(s, w)| format!("{s}:{w}")).collect();
                format!("balanced, weights {}", w.join(" "))
            }
            Balancedness::NotBalanced(wit) => {
                assert!(wit.verify(&pair));
                let y: Vec<String> = wit.y.iter().map(|v| v.to_string()).collect();
                format!("not balanced, y = ({}) strict at {}", y.join(","), wit.strict_at)
            }
        };
        println!("  {:<13} {:>2} LPs  {detail}", checker.name(), result.lp_solves);
    }
}

fn main() {
    show(3, &[], &[3, 4]);
    show(3, &[], &[3, 4, 6]);
    show(3, &[], &[1, 3, 4, 5, 6]);
    show(3, &[1], &[6]);
    show(4, &[], &[3, 5, 6, 8, 9, 10, 12]);
}
