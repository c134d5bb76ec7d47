//! Exploiting fictitious-play opponents in finite normal-form games.
//!
//! An intelligent player (IP, player 0) faces opponents who best-respond to
//! the empirical frequencies of past play. This crate simulates that
//! dynamic exactly, computes the IP's best convergence-based mixed strategy
//! by linear programming, and turns it into a finite action schedule whose
//! running frequencies keep every opponent locked on the target profile.

pub mod cli;
pub mod error;
pub mod fictitious_play;
pub mod fixtures;
pub mod game;
pub mod gamefile;
pub mod lp;
pub mod oracle;
pub mod rational;
pub mod synthesis;
pub mod trajectory;
pub mod validate;

pub use error::{Error, Result};
pub use game::{ActionProfile, Game, MixedStrategy, Player, Subgame, TieRule};
pub use rational::Rational;
