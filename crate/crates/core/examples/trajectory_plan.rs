//! Compile the synthesized mixes into warm-up + block schedules and run
//! them against fictitious-play opponents.

use ipfp::fixtures;
use ipfp::rational::to_decimal;
use ipfp::synthesis::synthesize;
use ipfp::trajectory::{build_plan, verify_plan};
use ipfp::{ActionProfile, Game, TieRule};

fn labels(game: &Game, seq: &[usize]) -> String {
    seq.iter().map(|&a| game.action_label(0, a)).collect::<Vec<_>>().join(" ")
}

fn main() {
    for (name, game) in [("table 1", fixtures::table1()), ("table 2", fixtures::table2()), ("table 3", fixtures::table3())] {
        let tie = TieRule::default_for(&game);
        let s = synthesize(&game).unwrap();
        let plan = build_plan(&game, &s, tie).unwrap();
        println!("== {name} ({tie} ties)");
        println!("  X' = [{}]", labels(&game, &plan.warmup));
        println!("  X* = [{}]", labels(&game, &plan.block));
        println!("  τ* = {}, τ0 = {}, τ' = {}", plan.tau_star, plan.tau_zero, plan.tau_prime);

        let init = ActionProfile::new(&game, vec![0; game.player_count()]).unwrap();
        let r = verify_plan(&game, &plan, 50, tie, &init).unwrap();
        println!(
            "  held {}, locked from t = {:?}, monitor violations {}",
            r.held, r.absorption_time, r.monitor.violations
        );
        for p in [1, 10, 50] {
            println!("  after {p:>2} blocks: {}", to_decimal(&r.payoff_after[p - 1], 6));
        }
        println!("  target {} ≈ {}", s.value, to_decimal(&s.value, 6));
    }
}
