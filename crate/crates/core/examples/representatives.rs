//! Span bookkeeping and representative subsets: a balanced tight set is
//! replaced by a linearly independent part that keeps the union balanced.

use kohlberg::game::Coalition;
use kohlberg::linalg::{caratheodory_reduce, rank, SpanBasis};
use kohlberg::rational::ratio;
use kohlberg::verify::representative_subset;

fn c(players: &[usize]) -> Coalition {
    Coalition::of_players(players)
}

fn main() {
    let mut basis = SpanBasis::new(3);
    for s in [c(&[1, 2, 3]), c(&[1, 2]), c(&[3])] {
        basis.insert(s);
    }
    println!("rank of H = {}", basis.rank());
    for s in [c(&[1]), c(&[2, 3])] {
        match basis.coefficients(s) {
            Some(coef) => {
                let terms: Vec<String> = coef.iter().map(|(b, w)| format!("{w}*{b}")).collect();
                println!("{s} = {}", terms.join(" + "));
            }
            None => println!("{s} is outside span(H)"),
        }
    }

    // e1 + e2 and e12 both carry weight 1/2 towards e(N) = (1,1)
    let vectors = vec![c(&[1]).indicator(2), c(&[2]).indicator(2), c(&[1, 2]).indicator(2)];
    let weights = vec![ratio(1, 2), ratio(1, 2), ratio(1, 2)];
    let target = c(&[1, 2]).indicator(2);
    let (kept, w) = caratheodory_reduce(&vectors, &weights, &target).unwrap();
    let w: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    println!("kept columns {kept:?} with weights {}", w.join(", "));

    let t2 = [c(&[1]), c(&[1, 3]), c(&[2, 3])];
    let h1 = [c(&[1, 2]), c(&[3])];
    let r = representative_subset(&t2, &h1, &[], 3).unwrap();
    let names: Vec<String> = r.iter().map(|s| s.to_string()).collect();
    println!("rep(T2; H1) = {} (rank {})", names.join(" "), rank(&r, 3));
}
