//! One opponent. Repeating D earns 7; committing to U one time in six
//! keeps the opponent on B and earns 85/6.

use ipfp::fictitious_play::{simulate, IpPolicy};
use ipfp::fixtures;
use ipfp::oracle::lp_vertex_oracle;
use ipfp::rational::to_decimal;
use ipfp::synthesis::synthesize_two_player;
use ipfp::{ActionProfile, TieRule};

fn main() {
    let game = fixtures::table1();
    let s = synthesize_two_player(&game).unwrap();
    for c in &s.per_candidate {
        let col = game.action_label(1, c.anchor);
        let (_, vertices) = lp_vertex_oracle(&c.lp).unwrap();
        let ps: Vec<String> = vertices.iter().map(|v| v.q.prob(0).to_string()).collect();
        match &c.solution {
            Some((z, v)) => println!("column {col}: p(U) in [{}], best z = {z}, value {v}", ps.join(", ")),
            None => println!("column {col}: infeasible"),
        }
    }
    println!(
        "opponent held at {}, z = {}, value {} ≈ {}",
        game.action_label(1, s.target_profile[0]),
        s.mix,
        s.value,
        to_decimal(&s.value, 4)
    );
    println!("best pure repetition: {} → {}", game.action_label(0, s.baseline_pure.0), s.baseline_pure.1);

    let init = ActionProfile::new(&game, vec![0, 0]).unwrap();
    let fixed = simulate(&game, &IpPolicy::FixedAction(1), 600, TieRule::LowestIndex, &init).unwrap();
    let mixed = IpPolicy::ScriptedSequence { warmup: vec![], repeat: vec![0, 1, 1, 1, 1, 1] };
    let mixed = simulate(&game, &mixed, 600, TieRule::LowestIndex, &init).unwrap();
    println!("600 stages, fixed D: {}", to_decimal(fixed.final_average(), 6));
    println!("600 stages, (U, D×5) repeated: {}", to_decimal(mixed.final_average(), 6));
}
