//! From a synthesized mix to a concrete IP action schedule.
//!
//! The schedule is a warm-up `X'` (the subgame action `y0*` repeated `τ'`
//! times, long enough to absorb the opponents at the target) followed by a
//! block `X*` of length `τ*` whose action counts are exactly `τ*·z0*`,
//! repeated forever. [`monitor_constraints`] checks the IP's running
//! frequencies against the LP at every stage; [`verify_plan`] runs the
//! closed loop against fictitious-play opponents.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fictitious_play::{simulate, IpPolicy};
use crate::game::{ActionProfile, Game, MixedStrategy, Subgame, TieRule};
use crate::lp::RowLabel;
use crate::rational::{self, Rational};
use crate::synthesis::{SynthesisKind, SynthesisResult};

/// Least common multiple of the denominators of the nonzero entries.
pub fn tau_star(mix: &MixedStrategy) -> usize {
    let l = rational::denominator_lcm(mix.probs().iter().filter(|p| !p.is_zero()));
    l.to_usize().expect("block length fits in usize")
}

/// `τ*·z` as integer counts.
pub fn block_counts(mix: &MixedStrategy, tau_star: usize) -> Vec<usize> {
    let scale = Rational::from_integer(BigInt::from(tau_star));
    mix.probs()
        .iter()
        .map(|p| {
            let c = p * &scale;
            assert!(c.is_integer(), "τ* does not clear the denominator of {p}");
            c.to_integer().to_usize().expect("count fits in usize")
        })
        .collect()
}

/// Worst case, over every initial opponent profile, of the first stage from
/// which the opponents play `target` for good while the IP repeats `y0`.
pub fn tau_zero(sub: &Subgame<'_>, target: &[usize], tie_rule: TieRule) -> Result<usize> {
    let game = sub.base();
    game.check_profile(&sub.full_profile(target))?;
    if !sub.improvement_moves(target).is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} is not a pure equilibrium of {}",
            sub.opponent_label(target),
            sub.label()
        )));
    }
    let cap = 10 * sub.opponent_profile_count();
    let policy = IpPolicy::FixedAction(sub.fixed_ip_action());
    let mut worst = 0;
    for opp in sub.opponent_profiles() {
        let initial = ActionProfile::new(game, sub.full_profile(&opp))?;
        let trace = simulate(game, &policy, cap, tie_rule, &initial)?;
        match trace.opponents_locked_from(target) {
            Some(t) => worst = worst.max(t),
            None => return Err(Error::NonConvergence { initial: opp, cap }),
        }
    }
    Ok(worst)
}

/// A block position where greedy repair replaced the planned action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repair {
    /// 1-based position inside the block.
    pub position: usize,
    pub planned: usize,
    pub chosen: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrajectoryPlan {
    pub warmup: Vec<usize>,
    pub block: Vec<usize>,
    pub tau_star: usize,
    pub tau_zero: usize,
    pub tau_prime: usize,
    /// `τ' - τ*`.
    pub epsilon: i64,
    pub repairs: Vec<Repair>,
    pub source: SynthesisResult,
}

impl TrajectoryPlan {
    /// A plan with caller-chosen sequences, e.g. to study bad orderings.
    /// No ordering or length invariant is enforced beyond a non-empty block
    /// of valid IP actions.
    pub fn with_sequences(
        source: SynthesisResult,
        warmup: Vec<usize>,
        block: Vec<usize>,
        tau_zero: usize,
    ) -> Result<Self> {
        let m = source.mix.len();
        if block.is_empty() {
            return Err(Error::InvalidInput("block must not be empty".into()));
        }
        if let Some(a) = warmup.iter().chain(&block).find(|&&a| a >= m) {
            return Err(Error::InvalidInput(format!("IP action {a} out of range ({m} actions)")));
        }
        Ok(TrajectoryPlan {
            tau_prime: warmup.len(),
            tau_star: block.len(),
            epsilon: warmup.len() as i64 - block.len() as i64,
            warmup,
            block,
            tau_zero,
            repairs: Vec::new(),
            source,
        })
    }

    pub fn target(&self) -> &[usize] {
        &self.source.target_profile
    }

    pub fn anchor_action(&self) -> Option<usize> {
        self.source.chosen_y0
    }

    /// IP action at stage `t` (1-based).
    pub fn action_at(&self, t: usize) -> usize {
        let i = t - 1;
        if i < self.warmup.len() {
            self.warmup[i]
        } else {
            self.block[(i - self.warmup.len()) % self.block.len()]
        }
    }

    pub fn policy(&self) -> IpPolicy {
        IpPolicy::ScriptedSequence {
            warmup: self.warmup.clone(),
            repeat: self.block.clone(),
        }
    }

    /// Stages covered by the warm-up and `reps` blocks.
    pub fn horizon(&self, reps: usize) -> usize {
        self.tau_prime + reps * self.tau_star
    }

    fn is_two_player(&self) -> bool {
        self.source.kind == SynthesisKind::TwoPlayer
    }
}

/// Which check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    /// Frequency of `y0*` fell below its target probability.
    FrequencyFloor { action: usize },
    /// Frequency of another action rose above its target probability.
    FrequencyCap { action: usize },
    /// An LP row became positive.
    Row { index: usize, label: RowLabel },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorViolation {
    pub t: usize,
    pub constraint: Constraint,
    /// The offending frequency, or the row value at the IP's frequencies.
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorReport {
    pub steps: usize,
    pub violations: usize,
    pub first_violation: Option<MonitorViolation>,
    pub first_row_violation: Option<MonitorViolation>,
    /// Largest LP row value seen at any checked stage.
    pub max_row_value: Option<Rational>,
    /// Frequency of `y0*` after the warm-up and after each block.
    pub anchor_frequency_at_boundaries: Vec<Rational>,
    /// Whether the measured frequency of `y0*` equals the closed form at
    /// every block boundary and inside every leading `y0*` run.
    pub closed_form_matches: Option<bool>,
}

impl MonitorReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// `(τ' + p·τ*·q + t) / (τ' + p·τ* + t)`: frequency of `y0*` after the
/// warm-up, `p` full blocks and `t` more `y0*` stages.
pub fn anchor_frequency_closed_form(
    tau_prime: usize,
    tau_star: usize,
    q: &Rational,
    p: usize,
    t: usize,
) -> Rational {
    let r = |v: usize| Rational::from_integer(BigInt::from(v));
    (r(tau_prime) + r(p * tau_star) * q + r(t)) / r(tau_prime + p * tau_star + t)
}

fn first_failure(plan: &TrajectoryPlan, counts: &[u64], total: u64) -> Vec<(Constraint, Rational)> {
    let lp = &plan.source.lp;
    let mix = &plan.source.mix;
    let n = Rational::from_integer(BigInt::from(total));
    let q: Vec<Rational> = counts.iter().map(|&c| Rational::from_integer(BigInt::from(c)) / &n).collect();
    let mut out = Vec::new();
    if let Some(y0) = plan.anchor_action() {
        if q[y0] < *mix.prob(y0) {
            out.push((Constraint::FrequencyFloor { action: y0 }, q[y0].clone()));
        }
        for (a, qa) in q.iter().enumerate() {
            if a != y0 && qa > mix.prob(a) {
                out.push((Constraint::FrequencyCap { action: a }, qa.clone()));
            }
        }
    }
    for (i, v) in lp.row_values(&q).into_iter().enumerate() {
        if v.is_positive() {
            out.push((Constraint::Row { index: i, label: lp.labels[i] }, v));
        }
    }
    out
}

fn max_row(plan: &TrajectoryPlan, counts: &[u64], total: u64) -> Option<Rational> {
    let n = Rational::from_integer(BigInt::from(total));
    let q: Vec<Rational> = counts.iter().map(|&c| Rational::from_integer(BigInt::from(c)) / &n).collect();
    plan.source.lp.row_values(&q).into_iter().max()
}

/// Walks the warm-up and `reps` blocks, checking the IP's exact running
/// frequencies at every stage. In two-player plans the first stage is not
/// checked (the opponent is still on its initial action) and there are no
/// frequency bounds, only LP rows.
pub fn monitor_constraints(plan: &TrajectoryPlan, reps: usize) -> MonitorReport {
    let m = plan.source.mix.len();
    let mut counts = vec![0u64; m];
    let horizon = plan.horizon(reps);
    let mut report = MonitorReport {
        steps: horizon,
        violations: 0,
        first_violation: None,
        first_row_violation: None,
        max_row_value: None,
        anchor_frequency_at_boundaries: Vec::new(),
        closed_form_matches: plan.anchor_action().map(|_| true),
    };
    let lead = plan
        .anchor_action()
        .map_or(0, |y0| plan.block.iter().take_while(|&&a| a == y0).count());
    let boundary = |t: usize| t >= plan.tau_prime && (t - plan.tau_prime).is_multiple_of(plan.tau_star);

    for t in 1..=horizon {
        counts[plan.action_at(t)] += 1;
        let total = t as u64;
        if !(plan.is_two_player() && t == 1) {
            let failures = first_failure(plan, &counts, total);
            if !failures.is_empty() {
                report.violations += 1;
                let (c, v) = failures[0].clone();
                report.first_violation.get_or_insert(MonitorViolation { t, constraint: c, value: v });
                if report.first_row_violation.is_none() {
                    if let Some((c, v)) = failures.into_iter().find(|(c, _)| matches!(c, Constraint::Row { .. })) {
                        report.first_row_violation = Some(MonitorViolation { t, constraint: c, value: v });
                    }
                }
            }
            let mr = max_row(plan, &counts, total);
            if let Some(mr) = mr {
                if report.max_row_value.as_ref().is_none_or(|cur| mr > *cur) {
                    report.max_row_value = Some(mr);
                }
            }
        }
        if let Some(y0) = plan.anchor_action() {
            let freq = Rational::new(BigInt::from(counts[y0]), BigInt::from(total));
            if t >= plan.tau_prime {
                let k = t - plan.tau_prime;
                let (p, within) = (k / plan.tau_star, k % plan.tau_star);
                if within <= lead {
                    let expected = anchor_frequency_closed_form(
                        plan.tau_prime,
                        plan.tau_star,
                        plan.source.mix.prob(y0),
                        p,
                        within,
                    );
                    if expected != freq {
                        report.closed_form_matches = Some(false);
                    }
                }
            }
            if boundary(t) {
                report.anchor_frequency_at_boundaries.push(freq);
            }
        }
    }
    report
}

/// Canonical block: `y0*` first, then the other support actions in
/// ascending index order, each repeated its `τ*·z` count.
fn canonical_block(counts: &[usize], anchor: Option<usize>) -> Vec<usize> {
    let mut block = Vec::with_capacity(counts.iter().sum());
    if let Some(y0) = anchor {
        block.extend(std::iter::repeat_n(y0, counts[y0]));
    }
    for (a, &c) in counts.iter().enumerate() {
        if Some(a) != anchor {
            block.extend(std::iter::repeat_n(a, c));
        }
    }
    block
}

/// Builds the greedy order: at each position, the lowest-index action with
/// quota left that keeps every constraint satisfied.
fn greedy_block(plan: &TrajectoryPlan, counts: &[usize]) -> Result<Vec<usize>> {
    let m = counts.len();
    let mut used = vec![0u64; m];
    for &a in &plan.warmup {
        used[a] += 1;
    }
    let mut quota = counts.to_vec();
    let mut block = Vec::with_capacity(plan.tau_star);
    for pos in 0..plan.tau_star {
        let total = (plan.tau_prime + pos + 1) as u64;
        let skip_check = plan.is_two_player() && total == 1;
        let pick = (0..m).filter(|&a| quota[a] > 0).find(|&a| {
            used[a] += 1;
            let ok = skip_check || first_failure(plan, &used, total).is_empty();
            used[a] -= 1;
            ok
        });
        let Some(a) = pick else {
            return Err(Error::Planning(format!(
                "no action keeps the constraints at block position {}",
                pos + 1
            )));
        };
        used[a] += 1;
        quota[a] -= 1;
        block.push(a);
    }
    Ok(block)
}

/// Compiles a synthesis result into a verified-by-monitor schedule.
///
/// Constraint values are linear in the IP's action counts and one full
/// block adds `τ*·z0*`, which keeps every constraint at or below zero, so
/// monitoring the warm-up and a single block covers every later repetition.
pub fn build_plan(game: &Game, synth: &SynthesisResult, tie_rule: TieRule) -> Result<TrajectoryPlan> {
    let ts = tau_star(&synth.mix);
    let counts = block_counts(&synth.mix, ts);
    let (warmup, tau_zero) = match synth.kind {
        SynthesisKind::Convergence => {
            let y0 = synth.chosen_y0.expect("convergence result has y0*");
            let t0 = tau_zero(&game.subgame(y0)?, &synth.target_profile, tie_rule)?;
            (vec![y0; t0.max(ts)], t0)
        }
        SynthesisKind::TwoPlayer => (Vec::new(), 0),
    };
    let block = canonical_block(&counts, synth.chosen_y0);
    let mut plan = TrajectoryPlan::with_sequences(synth.clone(), warmup, block, tau_zero)?;

    if !monitor_constraints(&plan, 1).passed() {
        let repaired = greedy_block(&plan, &counts)?;
        plan.repairs = plan
            .block
            .iter()
            .zip(&repaired)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, (&planned, &chosen))| Repair { position: i + 1, planned, chosen })
            .collect();
        plan.block = repaired;
        let report = monitor_constraints(&plan, 1);
        if let Some(v) = report.first_violation {
            return Err(Error::Planning(format!(
                "repaired block still violates {:?} at stage {}",
                v.constraint, v.t
            )));
        }
    }

    if synth.kind == SynthesisKind::TwoPlayer {
        plan.tau_zero = two_player_absorption(game, &plan, tie_rule)?;
    }
    Ok(plan)
}

fn two_player_absorption(game: &Game, plan: &TrajectoryPlan, tie_rule: TieRule) -> Result<usize> {
    let cap = 10 * game.action_count(1) * plan.tau_star;
    let policy = plan.policy();
    let mut worst = 0;
    for j in 0..game.action_count(1) {
        let initial = ActionProfile::new(game, vec![plan.action_at(1), j])?;
        let trace = simulate(game, &policy, cap, tie_rule, &initial)?;
        match trace.opponents_locked_from(plan.target()) {
            Some(t) => worst = worst.max(t),
            None => return Err(Error::NonConvergence { initial: vec![j], cap }),
        }
    }
    Ok(worst)
}

/// An opponent off the target after the plan's absorption bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpponentDeviation {
    pub t: usize,
    /// Full-game player index.
    pub opponent: usize,
    pub played: usize,
    pub expected: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    /// Opponents locked on the target by `τ0` and the running payoff follows
    /// the closed form at every block boundary.
    pub held: bool,
    pub horizon: usize,
    pub absorption_time: Option<usize>,
    pub first_violation: Option<OpponentDeviation>,
    pub monitor: MonitorReport,
    /// Exact running average after each block.
    pub payoff_after: Vec<Rational>,
    pub closed_form_holds: bool,
    /// `C` in `|avg(T) - value| <= C/T` at block boundaries.
    pub rate_constant: Rational,
    pub rate_bound_holds: bool,
    pub final_average: Rational,
    pub limit_gap: Rational,
}

/// Runs the plan for its warm-up and `reps` blocks against fictitious-play
/// opponents and checks lock-in, the closed-form average and the `C/T` rate.
pub fn verify_plan(
    game: &Game,
    plan: &TrajectoryPlan,
    reps: usize,
    tie_rule: TieRule,
    initial: &ActionProfile,
) -> Result<VerificationReport> {
    if reps < 1 {
        return Err(Error::InvalidInput("reps must be at least 1".into()));
    }
    let horizon = plan.horizon(reps);
    let trace = simulate(game, &plan.policy(), horizon, tie_rule, initial)?;
    let target = plan.target();
    let value = &plan.source.value;

    let absorption_time = trace.opponents_locked_from(target);
    let first_violation = trace
        .steps
        .iter()
        .filter(|s| s.t > plan.tau_zero)
        .find_map(|s| {
            (0..target.len()).find(|&i| s.profile[i + 1] != target[i]).map(|i| OpponentDeviation {
                t: s.t,
                opponent: i + 1,
                played: s.profile[i + 1],
                expected: target[i],
            })
        });

    let on_target = |x: usize| {
        let mut p = vec![x];
        p.extend_from_slice(target);
        game.utility(0, &p).clone()
    };
    let lock = absorption_time.unwrap_or(horizon + 1);
    let warm_sum: Rational = trace.steps[..plan.tau_prime].iter().map(|s| s.payoffs[0].clone()).sum();
    let transient: Rational = trace
        .steps
        .iter()
        .filter(|s| s.t > plan.tau_prime && s.t < lock)
        .map(|s| &s.payoffs[0] - on_target(s.profile[0]))
        .sum();
    let block_sum: Rational = plan.block.iter().map(|&a| on_target(a)).sum();

    let ip_payoffs = game.profiles().map(|p| game.utility(0, &p).clone());
    let (lo, hi) = ip_payoffs.fold((None::<Rational>, None::<Rational>), |(lo, hi), v| {
        (
            Some(lo.map_or(v.clone(), |l| l.min(v.clone()))),
            Some(hi.map_or(v.clone(), |h| h.max(v))),
        )
    });
    let spread = hi.unwrap() - lo.unwrap();
    let settle = plan.tau_prime.max(lock.saturating_sub(1));
    let rate_constant = Rational::from_integer(BigInt::from(settle)) * &spread;

    let mut payoff_after = Vec::with_capacity(reps);
    let mut closed_form_holds = absorption_time.is_some();
    let mut rate_bound_holds = true;
    for p in 1..=reps {
        let t = plan.horizon(p);
        let avg = trace.steps[t - 1].ip_average.clone();
        let tr = Rational::from_integer(BigInt::from(t));
        let expected = (&warm_sum + &transient + Rational::from_integer(BigInt::from(p)) * &block_sum) / &tr;
        if avg != expected {
            closed_form_holds = false;
        }
        if rational::abs(&(&avg - value)) * &tr > rate_constant {
            rate_bound_holds = false;
        }
        payoff_after.push(avg);
    }
    let final_average = trace.final_average().clone();
    let limit_gap = rational::abs(&(&final_average - value));

    Ok(VerificationReport {
        held: first_violation.is_none() && absorption_time.is_some() && closed_form_holds,
        horizon,
        absorption_time,
        first_violation,
        monitor: monitor_constraints(plan, reps),
        payoff_after,
        closed_form_holds,
        rate_constant,
        rate_bound_holds,
        final_average,
        limit_gap,
    })
}
