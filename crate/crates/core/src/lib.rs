//! Exact verification that a payoff vector is the nucleolus (or
//! prenucleolus) of a transferable-utility game.
//!
//! The verifier walks the tight sets of the payoff and decides
//! `T0`-balancedness of their unions with exact rational LPs. Every answer
//! carries a certificate: balancing weights when the payoff is accepted, an
//! imbalance witness and a strictly improving payoff when it is rejected.
//!
//! ```
//! use kohlberg::game::{Game, Payoff};
//! use kohlberg::verify::{verify, Mode, Variant};
//!
//! let game = Game::from_integers(3, &[0, 1, 1, 7, 1, 4, 5, 12]).unwrap();
//! let report = verify(&game, &Payoff::from_integers(&[4, 5, 3]), Variant::Improved, Mode::Nucleolus).unwrap();
//! assert!(report.accepted());
//! ```

pub mod balance;
pub mod cli;
pub mod game;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod rational;
pub mod report;
pub mod verify;
