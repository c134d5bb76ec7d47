//! Three players: one LP per IP action, solved exactly.

use ipfp::fixtures;
use ipfp::rational::to_decimal;
use ipfp::synthesis::synthesize_n_player;
use ipfp::Game;

fn show(name: &str, game: &Game) {
    let s = synthesize_n_player(game).unwrap();
    println!("== {name}");
    for c in &s.per_candidate {
        let (z, v) = c.solution.as_ref().unwrap();
        println!(
            "  G({}) nash {}: z = {z}, value {v}",
            game.action_label(0, c.anchor),
            game.labels_from(1, &c.target)
        );
    }
    let lp = &s.lp;
    println!("  chosen LP: maximize {:?}", lp.objective.iter().map(|v| v.to_string()).collect::<Vec<_>>());
    for (row, label) in lp.rows.iter().zip(&lp.labels) {
        println!(
            "    {:?} <= 0   ({} -> {})",
            row.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            game.players()[label.opponent].name,
            game.action_label(label.opponent, label.deviation)
        );
    }
    println!(
        "  y0* = {}, z = {}, value {} ≈ {} (pure baseline {})",
        game.action_label(0, s.chosen_y0.unwrap()),
        s.mix,
        s.value,
        to_decimal(&s.value, 4),
        s.baseline_pure.1
    );
}

fn main() {
    show("table 2", &fixtures::table2());
    show("table 3", &fixtures::table3());
}
