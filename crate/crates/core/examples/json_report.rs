//! Build the JSON report for a rejected payoff, read it back, and render
//! the same document as text.

use kohlberg::game::{parse_game, Payoff};
use kohlberg::report::{render_text, InputEcho, ReportDocument};
use kohlberg::verify::{verify, Mode, Variant};

fn main() {
    let game = parse_game(include_bytes!("../data/reference3.json")).unwrap();
    let x = Payoff::parse_csv("9/2,9/2,3").unwrap();
    let report = verify(&game, &x, Variant::Simplified, Mode::Nucleolus).unwrap();

    let mut doc = ReportDocument::new(
        "verify",
        InputEcho {
            n: Some(game.players()),
            payoff: Some(x.shares().iter().map(|v| v.to_string()).collect()),
            algorithm: Some(Variant::Simplified.name().into()),
            ..Default::default()
        },
    );
    doc.record_verification(&report);
    let json = doc.to_json();
    print!("{json}");
    assert_eq!(ReportDocument::from_json(&json).unwrap(), doc);
    print!("{}", render_text(&doc));
}
