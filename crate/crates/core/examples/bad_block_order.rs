//! The right counts in the wrong order: playing A first inside the block
//! lets the opponents drift off the target equilibrium.

use ipfp::fictitious_play::simulate;
use ipfp::fixtures;
use ipfp::rational::to_decimal;
use ipfp::synthesis::synthesize_n_player;
use ipfp::trajectory::{monitor_constraints, verify_plan, Constraint, TrajectoryPlan};
use ipfp::{ActionProfile, TieRule};

fn main() {
    let game = fixtures::table2();
    let synth = synthesize_n_player(&game).unwrap();
    let (a, b, c) = (0, 1, 2);
    let block = vec![a, b, b, b, c, c, c, c, c];
    let plan = TrajectoryPlan::with_sequences(synth.clone(), vec![c; 3], block, 4).unwrap();

    let monitor = monitor_constraints(&plan, 3);
    println!("monitor: {} violations in {} stages", monitor.violations, monitor.steps);
    for v in [&monitor.first_violation, &monitor.first_row_violation].into_iter().flatten() {
        let what = match &v.constraint {
            Constraint::FrequencyFloor { action } => format!("floor on {}", game.action_label(0, *action)),
            Constraint::FrequencyCap { action } => format!("cap on {}", game.action_label(0, *action)),
            Constraint::Row { index, label } => format!(
                "row {} ({} -> {})",
                index + 1,
                game.players()[label.opponent].name,
                game.action_label(label.opponent, label.deviation)
            ),
        };
        println!("  t = {:>2}: {what}, value {}", v.t, v.value);
    }

    let init = ActionProfile::new(&game, vec![c, 0, 2]).unwrap();
    let report = verify_plan(&game, &plan, 2000, TieRule::Inertia, &init).unwrap();
    println!("held: {}", report.held);
    if let Some(d) = &report.first_violation {
        println!(
            "first deviation at t = {}: {} plays {}",
            d.t,
            game.players()[d.opponent].name,
            game.action_label(d.opponent, d.played)
        );
    }
    println!("average after {} stages: {}", report.horizon, to_decimal(&report.final_average, 5));
    println!("LP value: {} = {}", synth.value, to_decimal(&synth.value, 5));

    let trace = simulate(&game, &plan.policy(), 60, TieRule::Inertia, &init).unwrap();
    let tail: Vec<String> = trace.steps[45..].iter().map(|s| game.profile_label(&s.profile)).collect();
    println!("stages 46..60: {}", tail.join(" "));
}
