//! Optimal IP strategies against fictitious-play opponents.
//!
//! For `n >= 2` opponents the IP picks one subgame `G(y0)`, keeps the
//! opponents at that subgame's unique pure equilibrium, and mixes over its
//! own actions as long as no opponent gains by deviating. Each candidate
//! `y0` is one linear program; the best one wins. With a single opponent the
//! target can be any opponent column, not only a subgame equilibrium.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fictitious_play::{detect_absorption, simulate, IpPolicy};
use crate::game::{ActionProfile, Game, MixedStrategy, Subgame, TieRule};
use crate::lp::{self, LinearProgram, Outcome, RowLabel};
use crate::rational::Rational;
use crate::validate::check_ordinal_potential;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthesisKind {
    /// One opponent; the target is any opponent column.
    TwoPlayer,
    /// Targets are pure equilibria of the IP-restricted subgames.
    Convergence,
}

/// One LP solved during synthesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    /// `y0` for subgame candidates, the opponent column for two-player ones.
    pub anchor: usize,
    pub target: Vec<usize>,
    pub lp: LinearProgram,
    /// `None` when the LP is infeasible (a dominated opponent column).
    pub solution: Option<(MixedStrategy, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisResult {
    pub kind: SynthesisKind,
    /// The chosen subgame action `y0*`; `None` in two-player mode.
    pub chosen_y0: Option<usize>,
    /// Opponents' pure actions at the target.
    pub target_profile: Vec<usize>,
    pub mix: MixedStrategy,
    pub value: Rational,
    /// The LP whose optimum is `mix`.
    pub lp: LinearProgram,
    pub per_candidate: Vec<Candidate>,
    pub baseline_pure: (usize, Rational),
    /// IP payoff at the profile where all-FP play absorbs, when known.
    pub nash_fp_payoff: Option<Rational>,
}

impl SynthesisResult {
    /// Index of the winning candidate in `per_candidate`.
    pub fn anchor(&self) -> usize {
        match self.kind {
            SynthesisKind::Convergence => self.chosen_y0.expect("set in convergence mode"),
            SynthesisKind::TwoPlayer => self.target_profile[0],
        }
    }
}

/// Deviation-incentive rows for holding the opponents at `target`, before
/// any equilibrium check.
pub(crate) fn lp_for_target(game: &Game, target: &[usize]) -> LinearProgram {
    let ip_actions = game.action_count(0);
    let full = |k: usize, opp: &[usize]| {
        let mut p = Vec::with_capacity(opp.len() + 1);
        p.push(k);
        p.extend_from_slice(opp);
        p
    };
    let objective = (0..ip_actions)
        .map(|k| game.utility(0, &full(k, target)).clone())
        .collect();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for j in 1..game.player_count() {
        for d in 0..game.action_count(j) {
            if d == target[j - 1] {
                continue;
            }
            let mut alt = target.to_vec();
            alt[j - 1] = d;
            let row = (0..ip_actions)
                .map(|k| game.utility(j, &full(k, &alt)) - game.utility(j, &full(k, target)))
                .collect();
            rows.push(row);
            labels.push(RowLabel { opponent: j, deviation: d });
        }
    }
    LinearProgram { objective, rows, labels }
}

/// The LP that keeps every opponent at `nash` inside subgame `sub`.
pub fn build_lp(sub: &Subgame<'_>, nash: &[usize]) -> Result<LinearProgram> {
    let game = sub.base();
    if nash.len() != game.opponent_count() {
        return Err(Error::Dimension(format!(
            "target has {} actions, game has {} opponents",
            nash.len(),
            game.opponent_count()
        )));
    }
    game.check_profile(&sub.full_profile(nash))?;
    if !sub.improvement_moves(nash).is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} is not a pure equilibrium of {}",
            sub.opponent_label(nash),
            sub.label()
        )));
    }
    Ok(lp_for_target(game, nash))
}

/// Optimal mix and value, or `None` if the LP is infeasible.
pub fn try_solve_lp(lp: &LinearProgram) -> Option<(MixedStrategy, Rational)> {
    let mut problem = lp.to_problem();
    let value = match lp::maximize(&problem) {
        Outcome::Optimal { value, .. } => value,
        Outcome::Infeasible => return None,
        Outcome::Unbounded => unreachable!("the probability simplex is bounded"),
    };

    // Pin the optimal face, then take the lexicographically smallest point
    // on it one coordinate at a time.
    let m = lp.columns();
    problem.a_eq.push(lp.objective.clone());
    problem.b_eq.push(value.clone());
    let mut q = Vec::with_capacity(m);
    for k in 0..m {
        let mut minimize_k = vec![Rational::zero(); m];
        minimize_k[k] = -Rational::one();
        problem.objective = minimize_k;
        let qk = match lp::maximize(&problem) {
            Outcome::Optimal { x, .. } => x[k].clone(),
            other => unreachable!("optimal face is non-empty, got {other:?}"),
        };
        let mut pin = vec![Rational::zero(); m];
        pin[k] = Rational::one();
        problem.a_eq.push(pin);
        problem.b_eq.push(qk.clone());
        q.push(qk);
    }
    debug_assert!(lp.is_feasible(&q));
    let mix = MixedStrategy::new(0, q).expect("LP solution is a distribution");
    Some((mix, value))
}

/// Exact optimum of `lp`; the lexicographically smallest optimal vertex.
pub fn solve_lp(lp: &LinearProgram) -> Result<(MixedStrategy, Rational)> {
    try_solve_lp(lp).ok_or_else(|| Error::Internal("LP is infeasible".into()))
}

fn unique_nash(sub: &Subgame<'_>) -> Result<Vec<usize>> {
    let report = check_ordinal_potential(sub);
    if !report.passed {
        let reason = report
            .failures()
            .map(|f| f.message.clone())
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::Validation {
            subject: sub.label(),
            reason,
        });
    }
    Ok(sub.pure_nash().remove(0))
}

/// Best single repeated IP action: argmax over `y0` of the IP payoff at the
/// opponents' response, ties to the lowest index.
pub fn pure_baseline(game: &Game) -> Result<(usize, Rational)> {
    let mut best: Option<(usize, Rational)> = None;
    for y0 in 0..game.action_count(0) {
        let opponents = if game.player_count() == 2 {
            let point = MixedStrategy::pure(0, game.action_count(0), y0);
            vec![game.best_response(1, &[point], TieRule::LowestIndex, None)?]
        } else {
            unique_nash(&game.subgame(y0)?)?
        };
        let mut p = vec![y0];
        p.extend(opponents);
        let v = game.utility(0, &p).clone();
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((y0, v));
        }
    }
    Ok(best.expect("IP has at least one action"))
}

/// Convergence-based synthesis: one LP per IP action, best value wins.
pub fn synthesize_n_player(game: &Game) -> Result<SynthesisResult> {
    let mut candidates = Vec::with_capacity(game.action_count(0));
    for y0 in 0..game.action_count(0) {
        let sub = game.subgame(y0)?;
        let nash = unique_nash(&sub)?;
        let lp = build_lp(&sub, &nash)?;
        // The point mass on y0 is feasible because nash is an equilibrium
        // of G(y0); the column of y0 is therefore entrywise <= 0.
        if lp.column(y0).iter().any(|v| v.is_positive()) {
            return Err(Error::Internal(format!("{}: point mass on y0 infeasible", sub.label())));
        }
        let solution = try_solve_lp(&lp);
        if solution.is_none() {
            return Err(Error::Internal(format!("{}: LP infeasible", sub.label())));
        }
        candidates.push(Candidate {
            anchor: y0,
            target: nash,
            lp,
            solution,
        });
    }
    let best = pick_best(&candidates).expect("every candidate is feasible");
    let baseline = pure_baseline(game)?;
    finish(SynthesisKind::Convergence, Some(best), candidates, baseline)
}

/// Two-player synthesis: one LP per opponent column; infeasible columns are
/// dominated and skipped.
pub fn synthesize_two_player(game: &Game) -> Result<SynthesisResult> {
    if game.player_count() != 2 {
        return Err(Error::InvalidInput(format!(
            "two-player synthesis needs 2 players, game has {}",
            game.player_count()
        )));
    }
    let candidates: Vec<Candidate> = (0..game.action_count(1))
        .map(|j| {
            let lp = lp_for_target(game, &[j]);
            let solution = try_solve_lp(&lp);
            Candidate {
                anchor: j,
                target: vec![j],
                lp,
                solution,
            }
        })
        .collect();
    let best = pick_best(&candidates)
        .ok_or_else(|| Error::Internal("every opponent column is infeasible".into()))?;
    let baseline = pure_baseline(game)?;
    finish(SynthesisKind::TwoPlayer, Some(best), candidates, baseline)
}

/// Routes two-player games to [`synthesize_two_player`], others to
/// [`synthesize_n_player`].
pub fn synthesize(game: &Game) -> Result<SynthesisResult> {
    if game.player_count() == 2 {
        synthesize_two_player(game)
    } else {
        synthesize_n_player(game)
    }
}

fn pick_best(candidates: &[Candidate]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in candidates.iter().enumerate() {
        let Some((_, v)) = &c.solution else { continue };
        let better = match best {
            None => true,
            Some(b) => *v > candidates[b].solution.as_ref().unwrap().1,
        };
        if better {
            best = Some(i);
        }
    }
    best
}

fn finish(
    kind: SynthesisKind,
    best: Option<usize>,
    candidates: Vec<Candidate>,
    baseline: (usize, Rational),
) -> Result<SynthesisResult> {
    let best = best.expect("caller checked");
    let chosen = &candidates[best];
    let (mix, value) = chosen.solution.clone().expect("feasible");
    if value < baseline.1 {
        return Err(Error::Internal(format!(
            "LP value {value} below pure baseline {}",
            baseline.1
        )));
    }
    Ok(SynthesisResult {
        kind,
        chosen_y0: (kind == SynthesisKind::Convergence).then_some(chosen.anchor),
        target_profile: chosen.target.clone(),
        mix,
        value,
        lp: chosen.lp.clone(),
        baseline_pure: baseline,
        per_candidate: candidates,
        nash_fp_payoff: None,
    })
}

/// IP payoff at the profile where all-FP play absorbs within `horizon`
/// stages (held for at least the second half of the run), if it does.
pub fn fp_reference_payoff(
    game: &Game,
    horizon: usize,
    tie_rule: TieRule,
    initial: &ActionProfile,
) -> Result<Option<Rational>> {
    let trace = simulate(game, &IpPolicy::FictitiousPlay, horizon, tie_rule, initial)?;
    Ok(detect_absorption(&trace, horizon.div_ceil(2)).map(|(p, _)| game.utility(0, &p).clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::Player;
    use crate::rational::{frac, int};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn table2_subgame_c_lp_matches_printed_program() {
        let t2 = fixtures::table2();
        let sub = t2.subgame(2).unwrap();
        let lp = build_lp(&sub, &[0, 2]).unwrap();
        assert_eq!(lp.objective, ints(&[6, 7, 5]));
        assert_eq!(
            lp.rows,
            vec![ints(&[-1, 2, -1]), ints(&[1, 3, -2]), ints(&[-1, -7, -2]), ints(&[1, -6, -1])]
        );
        assert_eq!(lp.labels[0], RowLabel { opponent: 1, deviation: 1 });
        assert_eq!(lp.labels[3], RowLabel { opponent: 2, deviation: 1 });
    }

    #[test]
    fn build_lp_rejects_non_equilibrium() {
        let t2 = fixtures::table2();
        let sub = t2.subgame(2).unwrap();
        assert!(matches!(build_lp(&sub, &[1, 1]), Err(Error::InvalidInput(_))));
        assert!(build_lp(&sub, &[0]).is_err());
    }

    #[test]
    fn dominant_target_gives_nonpositive_rows() {
        let players = vec![Player::new("ip", &["a", "b"]), Player::new("p1", &["x", "y"]), Player::new("p2", &["u", "v"])];
        let g = Game::from_fn(players, |p| {
            vec![int(p[0] as i64), int(if p[1] == 0 { 5 } else { p[0] as i64 }), int(if p[2] == 0 { 3 } else { 1 })]
        })
        .unwrap();
        for y0 in 0..2 {
            let lp = build_lp(&g.subgame(y0).unwrap(), &[0, 0]).unwrap();
            assert!(lp.rows.iter().flatten().all(|v| !v.is_positive()));
        }
    }

    #[test]
    fn table1_column_b_lp_interval() {
        // Rows in terms of p = prob(U): 10p - 7 <= 0 and 1 - 6p <= 0.
        let t1 = fixtures::table1();
        let lp = lp_for_target(&t1, &[1]);
        assert_eq!(lp.rows, vec![ints(&[3, -7]), ints(&[-5, 1])]);
        let at = |p: Rational| vec![p.clone(), int(1) - p];
        assert!(lp.is_feasible(&at(frac(1, 6))));
        assert!(lp.is_feasible(&at(frac(7, 10))));
        assert!(!lp.is_feasible(&at(frac(1, 7))));
        assert!(!lp.is_feasible(&at(frac(71, 100))));
    }

    #[test]
    fn solve_printed_lp() {
        let t2 = fixtures::table2();
        let lp = build_lp(&t2.subgame(2).unwrap(), &[0, 2]).unwrap();
        let (q, v) = solve_lp(&lp).unwrap();
        assert_eq!(q.probs(), &[frac(1, 9), frac(1, 3), frac(5, 9)]);
        assert_eq!(v, frac(52, 9));
    }

    #[test]
    fn flat_objective_picks_lexicographically_smallest_vertex() {
        let lp = LinearProgram {
            objective: ints(&[4, 4, 4]),
            rows: vec![ints(&[-1, 0, 0])],
            labels: vec![RowLabel { opponent: 1, deviation: 0 }],
        };
        let (q, v) = solve_lp(&lp).unwrap();
        assert_eq!(v, int(4));
        assert_eq!(q.probs(), &ints(&[0, 0, 1])[..]);
    }

    #[test]
    fn infeasible_lp_is_internal_error() {
        let lp = LinearProgram {
            objective: ints(&[1, 1]),
            rows: vec![ints(&[1, 1])],
            labels: vec![RowLabel { opponent: 1, deviation: 0 }],
        };
        assert!(try_solve_lp(&lp).is_none());
        assert!(matches!(solve_lp(&lp), Err(Error::Internal(_))));
    }

    #[test]
    fn table2_synthesis() {
        let r = synthesize_n_player(&fixtures::table2()).unwrap();
        assert_eq!(r.chosen_y0, Some(2));
        assert_eq!(r.target_profile, vec![0, 2]);
        assert_eq!(r.mix.probs(), &[frac(1, 9), frac(1, 3), frac(5, 9)]);
        assert_eq!(r.value, frac(52, 9));
        assert_eq!(r.baseline_pure, (2, int(5)));
        let values: Vec<_> = r.per_candidate.iter().map(|c| c.solution.clone().unwrap().1).collect();
        assert!(values.iter().all(|v| *v <= r.value));
    }

    #[test]
    fn table3_synthesis() {
        let t3 = fixtures::table3();
        let r = synthesize_n_player(&t3).unwrap();
        assert_eq!(r.chosen_y0, Some(0));
        assert_eq!(r.target_profile, vec![0, 2]);
        assert_eq!(r.mix.probs(), &[int(0), frac(1, 7), frac(6, 7)]);
        assert_eq!(r.value, frac(60, 7));
        assert_eq!(pure_baseline(&t3).unwrap(), (0, int(5)));
        assert_eq!(t3.expected_ip_utility(&r.mix, &r.target_profile).unwrap(), r.value);
    }

    #[test]
    fn vacuous_rows_give_point_mass() {
        // Opponent payoffs do not depend on the IP, and the equilibrium
        // under every IP action already pays the IP its global maximum.
        let players = vec![Player::new("ip", &["a", "b"]), Player::new("p1", &["x", "y"]), Player::new("p2", &["u", "v"])];
        let g = Game::from_fn(players, |p| {
            let ip = if p[1] == 0 && p[2] == 0 { 3 + p[0] as i64 } else { 1 };
            vec![int(ip), int(if p[1] == 0 { 2 } else { 1 }), int(if p[2] == 0 { 2 } else { 1 })]
        })
        .unwrap();
        let r = synthesize_n_player(&g).unwrap();
        assert_eq!(r.mix.is_pure(), Some(1));
        assert_eq!(r.value, int(4));
        assert_eq!(r.baseline_pure, (1, int(4)));
    }

    #[test]
    fn table1_two_player() {
        let t1 = fixtures::table1();
        let r = synthesize_two_player(&t1).unwrap();
        assert_eq!(r.kind, SynthesisKind::TwoPlayer);
        assert_eq!(r.target_profile, vec![1]);
        assert_eq!(r.mix.probs(), &[frac(1, 6), frac(5, 6)]);
        assert_eq!(r.value, frac(85, 6));
        assert_eq!(r.baseline_pure, (1, int(7)));
        let col_l = r.per_candidate[0].solution.clone().unwrap();
        assert_eq!(col_l.0.probs(), &ints(&[1, 0])[..]);
        assert_eq!(col_l.1, int(6));
    }

    #[test]
    fn single_opponent_action_is_unconstrained() {
        let players = vec![Player::new("ip", &["a", "b", "c"]), Player::new("op", &["x"])];
        let g = Game::from_fn(players, |p| vec![int([2, 9, 4][p[0]]), int(0)]).unwrap();
        let r = synthesize_two_player(&g).unwrap();
        assert!(r.lp.rows.is_empty());
        assert_eq!(r.value, int(9));
        assert_eq!(r.mix.is_pure(), Some(1));
    }

    #[test]
    fn dominated_column_is_skipped() {
        // Column z is strictly dominated for the opponent.
        let players = vec![Player::new("ip", &["a", "b"]), Player::new("op", &["x", "y", "z"])];
        let g = Game::from_fn(players, |p| {
            let op = [[3, 1, 0], [1, 3, 0]][p[0]][p[1]];
            vec![int(if p[1] == 2 { 100 } else { 1 }), int(op)]
        })
        .unwrap();
        let r = synthesize_two_player(&g).unwrap();
        assert!(r.per_candidate[2].solution.is_none());
        assert_ne!(r.target_profile, vec![2]);
    }

    #[test]
    fn invalid_subgame_is_named() {
        let players = vec![Player::new("ip", &["a"]), Player::new("p1", &["h", "t"]), Player::new("p2", &["h", "t"])];
        let g = Game::from_fn(players, |p| {
            let same = p[1] == p[2];
            vec![int(0), int(if same { 2 } else { 1 }), int(if same { 1 } else { 2 })]
        })
        .unwrap();
        match synthesize_n_player(&g) {
            Err(Error::Validation { subject, .. }) => assert_eq!(subject, "G(a)"),
            other => panic!("{other:?}"),
        }
        assert!(synthesize_two_player(&g).is_err());
    }

    #[test]
    fn fp_reference_table2() {
        let t2 = fixtures::table2();
        let init = ActionProfile::new(&t2, vec![0, 0, 0]).unwrap();
        assert_eq!(fp_reference_payoff(&t2, 2000, TieRule::Inertia, &init).unwrap(), Some(int(3)));
    }
}
