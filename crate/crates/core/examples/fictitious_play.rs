//! Everyone plays fictitious play, including the IP.
//!
//! Tables 1 and 2 absorb in a pure profile; Table 3 keeps cycling and the
//! IP's average settles near 3.9.

use ipfp::fictitious_play::{detect_absorption, simulate, IpPolicy};
use ipfp::fixtures;
use ipfp::rational::to_decimal;
use ipfp::{ActionProfile, Game, TieRule};

fn run(name: &str, game: &Game, init: Vec<usize>, horizon: usize) {
    let tie = TieRule::default_for(game);
    let init = ActionProfile::new(game, init).unwrap();
    let trace = simulate(game, &IpPolicy::FictitiousPlay, horizon, tie, &init).unwrap();
    print!("{name}: {horizon} stages, ties {tie}, ");
    match detect_absorption(&trace, horizon / 2) {
        Some((p, from)) => println!(
            "absorbed at {} from t = {from}, IP payoff there {}",
            game.profile_label(&p),
            game.utility(0, &p)
        ),
        None => println!("no absorption"),
    }
    println!("  final IP average {}", to_decimal(trace.final_average(), 6));
    let st = &trace.final_state;
    for i in 0..game.player_count() {
        println!("  {} frequencies {}", game.players()[i].name, st.marginal(i).unwrap());
    }
}

fn main() {
    let horizon: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    run("table 1", &fixtures::table1(), vec![0, 0], 1000);
    run("table 2", &fixtures::table2(), vec![0, 0, 0], 1000);
    run("table 3 from (C,D,L)", &fixtures::table3(), vec![2, 2, 0], horizon);
}
