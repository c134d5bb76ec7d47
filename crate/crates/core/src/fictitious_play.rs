//! Alternating fictitious play.
//!
//! In every stage the IP moves first, then opponents `1..n` move in index
//! order. Opponent `j` best-responds to the empirical marginals of players
//! `0..j` including their current-stage actions and of players `j+1..n`
//! through the previous stage. Beliefs about different players are treated
//! as independent.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ActionProfile, Game, MixedStrategy, TieRule};
use crate::rational::Rational;

/// Per-player action counts, i.e. the empirical frequencies of play.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalState {
    counts: Vec<Vec<u64>>,
    steps_counted: Vec<u64>,
    last_actions: Vec<usize>,
}

impl EmpiricalState {
    /// State after observing one stage played at `initial`.
    pub fn new(game: &Game, initial: &ActionProfile) -> Self {
        let mut counts: Vec<Vec<u64>> = game.action_counts().into_iter().map(|n| vec![0; n]).collect();
        for (i, &a) in initial.as_slice().iter().enumerate() {
            counts[i][a] = 1;
        }
        EmpiricalState {
            counts,
            steps_counted: vec![1; game.player_count()],
            last_actions: initial.as_slice().to_vec(),
        }
    }

    pub fn counts(&self, player: usize) -> &[u64] {
        &self.counts[player]
    }

    pub fn steps_counted(&self, player: usize) -> u64 {
        self.steps_counted[player]
    }

    pub fn last_actions(&self) -> &[usize] {
        &self.last_actions
    }

    pub fn marginal(&self, player: usize) -> Option<MixedStrategy> {
        MixedStrategy::from_counts(player, &self.counts[player])
    }

    fn record(&mut self, player: usize, action: usize) {
        self.counts[player][action] += 1;
        self.steps_counted[player] += 1;
        self.last_actions[player] = action;
    }

    /// Plays one stage in place and returns the realised profile.
    pub(crate) fn advance(&mut self, game: &Game, ip_action: usize, tie_rule: TieRule) -> Vec<usize> {
        self.record(0, ip_action);
        for j in 1..game.player_count() {
            let values = game.weighted_action_values(j, &self.counts);
            let action = tie_rule.select(&values, Some(self.last_actions[j]));
            self.record(j, action);
        }
        self.last_actions.clone()
    }

    /// The IP's own fictitious-play response to the opponents' marginals.
    pub fn ip_best_response(&self, game: &Game, tie_rule: TieRule) -> usize {
        let values = game.weighted_action_values(0, &self.counts);
        tie_rule.select(&values, Some(self.last_actions[0]))
    }
}

pub fn init_state(game: &Game, initial: &ActionProfile) -> Result<EmpiricalState> {
    game.check_profile(initial.as_slice())?;
    Ok(EmpiricalState::new(game, initial))
}

/// One stage of alternating play with the IP committed to `ip_action`.
pub fn alternating_step(
    game: &Game,
    state: &EmpiricalState,
    ip_action: usize,
    tie_rule: TieRule,
) -> Result<(ActionProfile, EmpiricalState)> {
    if ip_action >= game.action_count(0) {
        return Err(Error::Dimension(format!("IP action {ip_action} out of range")));
    }
    if state.counts.len() != game.player_count() || state.steps_counted.contains(&0) {
        return Err(Error::InvalidInput("state does not belong to this game or is empty".into()));
    }
    let mut next = state.clone();
    let profile = next.advance(game, ip_action, tie_rule);
    Ok((ActionProfile::new(game, profile)?, next))
}

/// How the IP chooses its action each stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IpPolicy {
    /// The IP also plays fictitious play.
    FictitiousPlay,
    /// The IP repeats one action, including at the first stage.
    FixedAction(usize),
    /// `warmup` once, then `repeat` cycled forever, starting at the first stage.
    ScriptedSequence { warmup: Vec<usize>, repeat: Vec<usize> },
}

impl IpPolicy {
    fn validate(&self, game: &Game) -> Result<()> {
        let n = game.action_count(0);
        let check = |a: usize| {
            if a < n {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("policy uses IP action {a}, IP has {n}")))
            }
        };
        match self {
            IpPolicy::FictitiousPlay => Ok(()),
            IpPolicy::FixedAction(a) => check(*a),
            IpPolicy::ScriptedSequence { warmup, repeat } => {
                if repeat.is_empty() {
                    return Err(Error::InvalidInput("scripted policy needs a non-empty repeat block".into()));
                }
                warmup.iter().chain(repeat).try_for_each(|&a| check(a))
            }
        }
    }

    /// Scripted action at stage `t` (1-based), if the policy is not reactive.
    pub fn scripted_action(&self, t: usize) -> Option<usize> {
        match self {
            IpPolicy::FictitiousPlay => None,
            IpPolicy::FixedAction(a) => Some(*a),
            IpPolicy::ScriptedSequence { warmup, repeat } => {
                let i = t - 1;
                if i < warmup.len() {
                    Some(warmup[i])
                } else {
                    Some(repeat[(i - warmup.len()) % repeat.len()])
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub t: usize,
    pub profile: Vec<usize>,
    pub payoffs: Vec<Rational>,
    /// Exact mean of the IP's payoffs over stages `1..=t`.
    pub ip_average: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationTrace {
    pub steps: Vec<StepRecord>,
    pub final_state: EmpiricalState,
}

impl SimulationTrace {
    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    pub fn final_average(&self) -> &Rational {
        &self.steps.last().expect("non-empty trace").ip_average
    }

    /// Earliest stage from which the opponents' actions equal `target`
    /// through the end of the trace.
    pub fn opponents_locked_from(&self, target: &[usize]) -> Option<usize> {
        let mut first = None;
        for s in self.steps.iter().rev() {
            if &s.profile[1..] == target {
                first = Some(s.t);
            } else {
                break;
            }
        }
        first
    }
}

/// Runs `horizon` stages. Stage 1 is `initial_actions`, except that a
/// scripted or fixed IP policy overrides the IP's entry.
pub fn simulate(
    game: &Game,
    policy: &IpPolicy,
    horizon: usize,
    tie_rule: TieRule,
    initial_actions: &ActionProfile,
) -> Result<SimulationTrace> {
    if horizon < 1 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    game.check_profile(initial_actions.as_slice())?;
    policy.validate(game)?;

    let mut first = initial_actions.as_slice().to_vec();
    if let Some(a) = policy.scripted_action(1) {
        first[0] = a;
    }
    let first = ActionProfile::new(game, first)?;
    let mut state = EmpiricalState::new(game, &first);

    let mut steps = Vec::with_capacity(horizon);
    let mut total = Rational::zero();
    let mut push = |t: usize, profile: Vec<usize>, steps: &mut Vec<StepRecord>| {
        let payoffs = game.payoff_at(&profile).to_vec();
        total += &payoffs[0];
        let ip_average = &total / Rational::from_integer(t.into());
        steps.push(StepRecord {
            t,
            profile,
            payoffs,
            ip_average,
        });
    };
    push(1, first.into_vec(), &mut steps);

    for t in 2..=horizon {
        let ip_action = match policy.scripted_action(t) {
            Some(a) => a,
            None => state.ip_best_response(game, tie_rule),
        };
        let profile = state.advance(game, ip_action, tie_rule);
        push(t, profile, &mut steps);
    }
    Ok(SimulationTrace {
        steps,
        final_state: state,
    })
}

/// The profile that the trace ends in and the earliest stage from which it
/// is played constantly, provided that run lasts at least `window` stages.
pub fn detect_absorption(trace: &SimulationTrace, window: usize) -> Option<(Vec<usize>, usize)> {
    let window = window.max(1);
    let last = trace.steps.last()?;
    let mut first = last.t;
    for s in trace.steps.iter().rev() {
        if s.profile != last.profile {
            break;
        }
        first = s.t;
    }
    let run = last.t - first + 1;
    (run >= window).then(|| (last.profile.clone(), first))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::Player;
    use crate::rational::int;

    fn labels(game: &Game, l: &[&str]) -> ActionProfile {
        let v = l.iter().enumerate().map(|(i, s)| game.action_index(i, s).unwrap()).collect();
        ActionProfile::new(game, v).unwrap()
    }

    #[test]
    fn init_records_one_observation() {
        let t1 = fixtures::table1();
        let s = init_state(&t1, &labels(&t1, &["U", "L"])).unwrap();
        assert_eq!(s.counts(0), &[1, 0]);
        assert_eq!(s.counts(1), &[1, 0, 0]);
        assert_eq!(s.steps_counted(1), 1);

        let t3 = fixtures::table3();
        let s = init_state(&t3, &labels(&t3, &["A", "U", "L"])).unwrap();
        for p in 0..3 {
            assert_eq!(s.counts(p), &[1, 0, 0]);
        }
    }

    #[test]
    fn first_alternating_step_table2() {
        // After (C,D,L) with the IP playing C again, P1 faces the point
        // masses C and L: its payoffs in column (C,.,L) are U=1, M=2, D=3.
        // P2 then sees P1 at {D: 2/2} and the IP at C: row D payoffs
        // L=4, N=5, R=6.
        let t2 = fixtures::table2();
        let s = init_state(&t2, &labels(&t2, &["C", "D", "L"])).unwrap();
        let (p, next) = alternating_step(&t2, &s, 2, TieRule::Inertia).unwrap();
        assert_eq!(t2.profile_label(p.as_slice()), "(C,D,R)");
        assert_eq!(next.counts(2), &[1, 0, 1]);
        assert_eq!(next.steps_counted(0), 2);
    }

    #[test]
    fn forced_opponents_follow() {
        let players = vec![Player::new("ip", &["a", "b"]), Player::new("op", &["only"])];
        let g = Game::from_fn(players, |p| vec![int(p[0] as i64), int(0)]).unwrap();
        let s = init_state(&g, &ActionProfile::new(&g, vec![0, 0]).unwrap()).unwrap();
        let (p, _) = alternating_step(&g, &s, 1, TieRule::LowestIndex).unwrap();
        assert_eq!(p.as_slice(), &[1, 0]);
    }

    #[test]
    fn table1_opponent_locks_on_b_under_mix() {
        // IP history U once then D five times: marginal (1/6, 5/6).
        let t1 = fixtures::table1();
        let mut s = init_state(&t1, &labels(&t1, &["U", "L"])).unwrap();
        for _ in 0..4 {
            s.advance(&t1, 1, TieRule::LowestIndex);
        }
        let (p, next) = alternating_step(&t1, &s, 1, TieRule::LowestIndex).unwrap();
        assert_eq!(next.counts(0), &[1, 5]);
        assert_eq!(t1.action_label(1, p[1]), "B");
    }

    #[test]
    fn table1_all_fp_absorbs_at_ul() {
        let t1 = fixtures::table1();
        let tr = simulate(&t1, &IpPolicy::FictitiousPlay, 200, TieRule::LowestIndex, &labels(&t1, &["U", "L"])).unwrap();
        let (p, first) = detect_absorption(&tr, 10).unwrap();
        assert_eq!(t1.profile_label(&p), "(U,L)");
        assert_eq!(first, 1);
        assert_eq!(tr.final_average(), &int(6));
    }

    #[test]
    fn table1_fixed_d_shifts_to_dr() {
        let t1 = fixtures::table1();
        let tr = simulate(&t1, &IpPolicy::FixedAction(1), 100, TieRule::LowestIndex, &labels(&t1, &["U", "L"])).unwrap();
        let (p, first) = detect_absorption(&tr, 10).unwrap();
        assert_eq!(t1.profile_label(&p), "(D,R)");
        assert_eq!(first, 2);
        // (5 + 7 * 99) / 100
        assert_eq!(tr.final_average(), &Rational::new(698.into(), 100.into()));
    }

    #[test]
    fn table2_all_fp_absorbs_at_bdl() {
        let t2 = fixtures::table2();
        let tr = simulate(&t2, &IpPolicy::FictitiousPlay, 2000, TieRule::Inertia, &labels(&t2, &["A", "U", "L"])).unwrap();
        let (p, first) = detect_absorption(&tr, 100).unwrap();
        assert_eq!(t2.profile_label(&p), "(B,D,L)");
        assert!(first < 1000);
        assert_eq!(t2.utility(0, &p), &int(3));
    }

    #[test]
    fn constant_trace_absorbs_at_one() {
        let players = vec![Player::new("ip", &["a"]), Player::new("op", &["x"])];
        let g = Game::from_fn(players, |_| vec![int(1), int(1)]).unwrap();
        let tr = simulate(&g, &IpPolicy::FixedAction(0), 5, TieRule::Inertia, &ActionProfile::new(&g, vec![0, 0]).unwrap()).unwrap();
        assert_eq!(detect_absorption(&tr, 5), Some((vec![0, 0], 1)));
        assert_eq!(detect_absorption(&tr, 6), None);
    }

    #[test]
    fn scripted_policy_cycles_after_warmup() {
        let p = IpPolicy::ScriptedSequence { warmup: vec![2, 2], repeat: vec![0, 1] };
        let got: Vec<usize> = (1..=7).map(|t| p.scripted_action(t).unwrap()).collect();
        assert_eq!(got, vec![2, 2, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn invalid_inputs() {
        let t1 = fixtures::table1();
        let init = labels(&t1, &["U", "L"]);
        assert!(simulate(&t1, &IpPolicy::FictitiousPlay, 0, TieRule::Inertia, &init).is_err());
        assert!(simulate(&t1, &IpPolicy::FixedAction(5), 3, TieRule::Inertia, &init).is_err());
        let empty = IpPolicy::ScriptedSequence { warmup: vec![0], repeat: vec![] };
        assert!(simulate(&t1, &empty, 3, TieRule::Inertia, &init).is_err());
        let s = init_state(&t1, &init).unwrap();
        assert!(alternating_step(&t1, &s, 2, TieRule::Inertia).is_err());
    }
}
