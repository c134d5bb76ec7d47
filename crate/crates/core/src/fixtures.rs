//! The bundled example games.

use crate::game::Game;
use crate::gamefile::GameFile;

pub const TABLE1: &str = include_str!("../games/table1.toml");
pub const TABLE2: &str = include_str!("../games/table2.toml");
pub const TABLE3: &str = include_str!("../games/table3.toml");

/// Two-player 2x3 game.
pub fn table1() -> Game {
    GameFile::parse(TABLE1).expect("bundled game parses").game
}

/// Three-player game whose all-FP play absorbs at (B,D,L).
pub fn table2() -> Game {
    GameFile::parse(TABLE2).expect("bundled game parses").game
}

/// Three-player game whose all-FP play never absorbs.
pub fn table3() -> Game {
    GameFile::parse(TABLE3).expect("bundled game parses").game
}
