//! Build a game in code, write it as TOML, read it back.

use ipfp::gamefile::{serialize, GameFile, Metadata};
use ipfp::rational::frac;
use ipfp::{Game, Player};

fn main() {
    let players = vec![Player::new("Leader", &["hi", "lo"]), Player::new("Follower", &["in", "out"])];
    let game = Game::from_fn(players, |p| match (p[0], p[1]) {
        (0, 0) => vec![frac(3, 1), frac(1, 2)],
        (0, 1) => vec![frac(0, 1), frac(1, 1)],
        (1, 0) => vec![frac(5, 2), frac(2, 1)],
        _ => vec![frac(1, 1), frac(0, 1)],
    })
    .unwrap();
    let meta = Metadata { title: Some("entry deterrence".into()), source: None };
    let text = serialize(&game, &meta);
    print!("{text}");
    let back = GameFile::parse(&text).unwrap();
    println!("round trip equal: {}", back.game == game && back.metadata == meta);

    let broken = text.replace("\"5/2\"", "\"2.5\"");
    match GameFile::parse(&broken) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("edited file: {e}"),
    }
}
