//! Structural checks: the bundled tables pass, a matching-pennies block
//! between the opponents fails with a better-response cycle.

use ipfp::fixtures;
use ipfp::rational::int;
use ipfp::validate::{check_all_subgames, check_nondegenerate, ValidationReport};
use ipfp::{Game, Player};

fn report(name: &str, game: &Game) {
    let r = ValidationReport::merge([check_nondegenerate(game), check_all_subgames(game)]);
    println!("== {name}");
    print!("{r}");
}

fn main() {
    report("table 1", &fixtures::table1());
    report("table 2", &fixtures::table2());
    report("table 3", &fixtures::table3());

    let players = vec![Player::new("IP", &["x"]), Player::new("P1", &["H", "T"]), Player::new("P2", &["H", "T"])];
    let pennies = Game::from_fn(players, |p| {
        let same = p[1] == p[2];
        vec![int(0), int(if same { 2 } else { 1 }), int(if same { 1 } else { 2 })]
    })
    .unwrap();
    report("matching pennies between the opponents", &pennies);
}
