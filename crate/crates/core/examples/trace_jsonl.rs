//! Line-delimited trace of a scripted IP against fictitious play.

use ipfp::cli::{parse_policy, trace_lines};
use ipfp::fictitious_play::simulate;
use ipfp::fixtures;
use ipfp::{ActionProfile, TieRule};

fn main() {
    let game = fixtures::table2();
    let policy = parse_policy(&game, "script:C,C,C,C,C,C,C,C,C/C,C,C,C,C,A,B,B,B").unwrap();
    let init = ActionProfile::new(&game, vec![0, 0, 0]).unwrap();
    let trace = simulate(&game, &policy, 27, TieRule::Inertia, &init).unwrap();
    print!("{}", trace_lines(&game, &trace, 5));
}
