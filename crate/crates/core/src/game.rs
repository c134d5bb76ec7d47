//! Finite normal-form games with exact payoffs.
//!
//! Player 0 is the informed player (IP); players `1..n` are the opponents
//! who follow fictitious play. Payoffs are stored densely in row-major order
//! over joint profiles, player 0 most significant.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Player {
    pub name: String,
    pub actions: Vec<String>,
}

impl Player {
    pub fn new(name: impl Into<String>, actions: &[&str]) -> Self {
        Player {
            name: name.into(),
            actions: actions.iter().map(|a| a.to_string()).collect(),
        }
    }
}

/// How a player picks among equally good actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieRule {
    /// Smallest action index in the argmax set.
    #[serde(rename = "lowest")]
    LowestIndex,
    /// Keep the current action if it is still optimal, otherwise lowest index.
    Inertia,
}

impl TieRule {
    /// Lowest-index ties for two-player games, inertia otherwise.
    pub fn default_for(game: &Game) -> TieRule {
        if game.player_count() == 2 {
            TieRule::LowestIndex
        } else {
            TieRule::Inertia
        }
    }

    /// Picks an index from `values` according to the rule.
    pub fn select<T: Ord>(self, values: &[T], current: Option<usize>) -> usize {
        let best = values.iter().max().expect("at least one action");
        if let (TieRule::Inertia, Some(c)) = (self, current) {
            if values.get(c) == Some(best) {
                return c;
            }
        }
        values.iter().position(|v| v == best).unwrap()
    }
}

impl FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lowest" | "lowest-index" | "lowestindex" => Ok(TieRule::LowestIndex),
            "inertia" => Ok(TieRule::Inertia),
            other => Err(Error::InvalidInput(format!(
                "unknown tie rule '{other}' (expected 'inertia' or 'lowest')"
            ))),
        }
    }
}

impl fmt::Display for TieRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TieRule::LowestIndex => f.write_str("lowest"),
            TieRule::Inertia => f.write_str("inertia"),
        }
    }
}

/// A joint pure action, one index per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionProfile(Vec<usize>);

impl ActionProfile {
    pub fn new(game: &Game, actions: Vec<usize>) -> Result<Self> {
        game.check_profile(&actions)?;
        Ok(ActionProfile(actions))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Actions of players `1..n`.
    pub fn opponents(&self) -> &[usize] {
        &self.0[1..]
    }
}

impl std::ops::Index<usize> for ActionProfile {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

/// A probability vector over one player's actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedStrategy {
    owner: usize,
    probs: Vec<Rational>,
}

impl MixedStrategy {
    pub fn new(owner: usize, probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidInput("empty mixed strategy".into()));
        }
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::InvalidInput(format!(
                "negative probability in strategy of player {owner}"
            )));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidInput(format!(
                "probabilities of player {owner} sum to {total}, not 1"
            )));
        }
        Ok(MixedStrategy { owner, probs })
    }

    pub fn pure(owner: usize, action_count: usize, action: usize) -> Self {
        let mut probs = vec![Rational::zero(); action_count];
        probs[action] = Rational::one();
        MixedStrategy { owner, probs }
    }

    /// Empirical frequencies from action counts; `None` if nothing was observed.
    pub fn from_counts(owner: usize, counts: &[u64]) -> Option<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return None;
        }
        let total = BigInt::from(total);
        let probs = counts
            .iter()
            .map(|&c| Rational::new(BigInt::from(c), total.clone()))
            .collect();
        Some(MixedStrategy { owner, probs })
    }

    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn prob(&self, action: usize) -> &Rational {
        &self.probs[action]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Actions with nonzero probability, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.probs.len())
            .filter(|&k| !self.probs[k].is_zero())
            .collect()
    }

    pub fn is_pure(&self) -> Option<usize> {
        self.probs.iter().position(|p| p.is_one())
    }
}

impl fmt::Display for MixedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.probs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// A finite game with `player_count` players and exact payoffs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    players: Vec<Player>,
    strides: Vec<usize>,
    payoffs: Vec<Vec<Rational>>,
    // Per player, payoffs multiplied by the lcm of that player's
    // denominators. Best responses compare these with integer weights.
    scaled: Vec<Vec<BigInt>>,
}

impl Game {
    /// Builds a game from a dense payoff list indexed in row-major profile
    /// order (player 0 most significant).
    pub fn new(players: Vec<Player>, payoffs: Vec<Vec<Rational>>) -> Result<Self> {
        if players.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a game needs at least 2 players, got {}",
                players.len()
            )));
        }
        for (i, p) in players.iter().enumerate() {
            if p.actions.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "player {i} ({}) has no actions",
                    p.name
                )));
            }
        }
        let n = players.len();
        let mut strides = vec![1usize; n];
        for i in (0..n - 1).rev() {
            strides[i] = strides[i + 1] * players[i + 1].actions.len();
        }
        let total = strides[0] * players[0].actions.len();
        if payoffs.len() != total {
            return Err(Error::Dimension(format!(
                "expected {total} payoff entries, got {}",
                payoffs.len()
            )));
        }
        if let Some(idx) = payoffs.iter().position(|v| v.len() != n) {
            return Err(Error::Dimension(format!(
                "payoff entry {idx} has {} values, expected {n}",
                payoffs[idx].len()
            )));
        }
        let scaled = (0..n)
            .map(|i| {
                let lcm = rational::denominator_lcm(payoffs.iter().map(|v| &v[i]));
                payoffs
                    .iter()
                    .map(|v| (&v[i] * Rational::from_integer(lcm.clone())).to_integer())
                    .collect()
            })
            .collect();
        Ok(Game {
            players,
            strides,
            payoffs,
            scaled,
        })
    }

    /// Builds a game by evaluating `f` on every profile.
    pub fn from_fn(players: Vec<Player>, mut f: impl FnMut(&[usize]) -> Vec<Rational>) -> Result<Self> {
        let counts: Vec<usize> = players.iter().map(|p| p.actions.len()).collect();
        let payoffs = ProfileIter::new(&counts).map(|p| f(&p)).collect();
        Game::new(players, payoffs)
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn opponent_count(&self) -> usize {
        self.players.len() - 1
    }

    pub fn action_count(&self, player: usize) -> usize {
        self.players[player].actions.len()
    }

    pub fn action_counts(&self) -> Vec<usize> {
        self.players.iter().map(|p| p.actions.len()).collect()
    }

    pub fn profile_count(&self) -> usize {
        self.payoffs.len()
    }

    pub fn profiles(&self) -> ProfileIter {
        ProfileIter::new(&self.action_counts())
    }

    pub fn action_label(&self, player: usize, action: usize) -> &str {
        &self.players[player].actions[action]
    }

    pub fn action_index(&self, player: usize, label: &str) -> Option<usize> {
        self.players
            .get(player)?
            .actions
            .iter()
            .position(|a| a == label)
    }

    /// `"(A,U,R)"` style rendering of a full profile.
    pub fn profile_label(&self, profile: &[usize]) -> String {
        self.labels_from(0, profile)
    }

    /// Renders actions of consecutive players starting at `first_player`.
    pub fn labels_from(&self, first_player: usize, actions: &[usize]) -> String {
        let parts: Vec<&str> = actions
            .iter()
            .enumerate()
            .map(|(k, &a)| self.action_label(first_player + k, a))
            .collect();
        format!("({})", parts.join(","))
    }

    pub fn check_profile(&self, profile: &[usize]) -> Result<()> {
        if profile.len() != self.player_count() {
            return Err(Error::Dimension(format!(
                "profile has {} entries, game has {} players",
                profile.len(),
                self.player_count()
            )));
        }
        for (i, &a) in profile.iter().enumerate() {
            if a >= self.action_count(i) {
                return Err(Error::Dimension(format!(
                    "action {a} out of range for player {i} ({} actions)",
                    self.action_count(i)
                )));
            }
        }
        Ok(())
    }

    pub fn profile_index(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    /// The stored payoff vector at `profile`.
    pub fn payoff(&self, profile: &ActionProfile) -> Result<&[Rational]> {
        self.check_profile(profile.as_slice())?;
        Ok(self.payoff_at(profile.as_slice()))
    }

    /// Unchecked lookup; panics on an out-of-range profile.
    pub fn payoff_at(&self, profile: &[usize]) -> &[Rational] {
        &self.payoffs[self.profile_index(profile)]
    }

    pub fn utility(&self, player: usize, profile: &[usize]) -> &Rational {
        &self.payoff_at(profile)[player]
    }

    pub(crate) fn scaled_utility(&self, player: usize, profile: &[usize]) -> &BigInt {
        &self.scaled[player][self.profile_index(profile)]
    }

    /// Count-weighted (unnormalised) expected utility of every action of
    /// `player` when each other player `k` is believed to play action `a`
    /// with weight `counts[k][a]`. Entry `counts[player]` is ignored.
    ///
    /// Values are positive multiples of the true expected utilities, so they
    /// order actions exactly.
    pub(crate) fn weighted_action_values(&self, player: usize, counts: &[Vec<u64>]) -> Vec<BigInt> {
        let n = self.player_count();
        let mut dims = self.action_counts();
        dims[player] = 1;
        let mut values = vec![BigInt::zero(); self.action_count(player)];
        for mut profile in ProfileIter::new(&dims) {
            let mut weight = BigInt::one();
            for k in (0..n).filter(|&k| k != player) {
                let c = counts[k][profile[k]];
                if c == 0 {
                    weight = BigInt::zero();
                    break;
                }
                weight *= c;
            }
            if weight.is_zero() {
                continue;
            }
            for (a, value) in values.iter_mut().enumerate() {
                profile[player] = a;
                *value += &weight * self.scaled_utility(player, &profile);
            }
        }
        values
    }

    fn check_others(&self, player: usize, others: &[MixedStrategy]) -> Result<()> {
        if player >= self.player_count() {
            return Err(Error::Dimension(format!("no player {player}")));
        }
        if others.len() != self.player_count() - 1 {
            return Err(Error::Dimension(format!(
                "expected {} strategies for the other players, got {}",
                self.player_count() - 1,
                others.len()
            )));
        }
        let expected = (0..self.player_count()).filter(|&k| k != player);
        for (s, k) in others.iter().zip(expected) {
            if s.owner() != k || s.len() != self.action_count(k) {
                return Err(Error::Dimension(format!(
                    "strategy for player {k} has owner {} and {} entries (expected {})",
                    s.owner(),
                    s.len(),
                    self.action_count(k)
                )));
            }
        }
        Ok(())
    }

    /// Expected utility of every action of `player` against independent
    /// mixed strategies of everyone else.
    pub fn action_values(&self, player: usize, others: &[MixedStrategy]) -> Result<Vec<Rational>> {
        self.check_others(player, others)?;
        let mut dims = self.action_counts();
        dims[player] = 1;
        let mut values = vec![Rational::zero(); self.action_count(player)];
        for mut profile in ProfileIter::new(&dims) {
            let mut weight = Rational::one();
            for s in others {
                weight *= s.prob(profile[s.owner()]);
                if weight.is_zero() {
                    break;
                }
            }
            if weight.is_zero() {
                continue;
            }
            for (a, value) in values.iter_mut().enumerate() {
                profile[player] = a;
                *value += &weight * self.utility(player, &profile);
            }
        }
        Ok(values)
    }

    /// Expected utility of `own_action` for `player` against the product of
    /// the other players' mixed strategies (`others` in player order,
    /// skipping `player`).
    pub fn expected_utility_vs_mix(
        &self,
        player: usize,
        own_action: usize,
        others: &[MixedStrategy],
    ) -> Result<Rational> {
        if player < self.player_count() && own_action >= self.action_count(player) {
            return Err(Error::Dimension(format!(
                "action {own_action} out of range for player {player}"
            )));
        }
        Ok(self.action_values(player, others)?.swap_remove(own_action))
    }

    /// `Σ_k ip_mix[k] · U₀(k, opponents)` with opponents fixed to pure actions.
    pub fn expected_ip_utility(&self, ip_mix: &MixedStrategy, opponents: &[usize]) -> Result<Rational> {
        if ip_mix.owner() != 0 || ip_mix.len() != self.action_count(0) {
            return Err(Error::Dimension(format!(
                "IP strategy has owner {} and {} entries",
                ip_mix.owner(),
                ip_mix.len()
            )));
        }
        let mut profile = Vec::with_capacity(self.player_count());
        profile.push(0);
        profile.extend_from_slice(opponents);
        self.check_profile(&profile)?;
        let mut total = Rational::zero();
        for (k, p) in ip_mix.probs().iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            profile[0] = k;
            total += p * self.utility(0, &profile);
        }
        Ok(total)
    }

    /// A best response of `player`, ties resolved by `tie_rule`.
    pub fn best_response(
        &self,
        player: usize,
        others: &[MixedStrategy],
        tie_rule: TieRule,
        current: Option<usize>,
    ) -> Result<usize> {
        let values = self.action_values(player, others)?;
        Ok(tie_rule.select(&values, current))
    }

    pub fn subgame(&self, y0: usize) -> Result<Subgame<'_>> {
        Subgame::new(self, y0)
    }
}

/// The opponents' game induced by freezing the IP at action `y0`.
#[derive(Debug, Clone, Copy)]
pub struct Subgame<'a> {
    base: &'a Game,
    y0: usize,
}

impl<'a> Subgame<'a> {
    pub fn new(base: &'a Game, y0: usize) -> Result<Self> {
        if y0 >= base.action_count(0) {
            return Err(Error::Dimension(format!(
                "IP action {y0} out of range ({} actions)",
                base.action_count(0)
            )));
        }
        Ok(Subgame { base, y0 })
    }

    pub fn base(&self) -> &'a Game {
        self.base
    }

    pub fn fixed_ip_action(&self) -> usize {
        self.y0
    }

    pub fn opponent_count(&self) -> usize {
        self.base.opponent_count()
    }

    pub fn opponent_action_counts(&self) -> Vec<usize> {
        self.base.action_counts()[1..].to_vec()
    }

    /// All opponent profiles, row-major.
    pub fn opponent_profiles(&self) -> ProfileIter {
        ProfileIter::new(&self.opponent_action_counts())
    }

    pub fn opponent_profile_count(&self) -> usize {
        self.opponent_action_counts().iter().product()
    }

    pub fn full_profile(&self, opponents: &[usize]) -> Vec<usize> {
        let mut p = Vec::with_capacity(opponents.len() + 1);
        p.push(self.y0);
        p.extend_from_slice(opponents);
        p
    }

    /// `U_player(y0, opponents)`; `player` is a full-game index in `1..=n`.
    pub fn utility(&self, player: usize, opponents: &[usize]) -> &'a Rational {
        let base = self.base;
        &base.payoffs[base.profile_index(&self.full_profile(opponents))][player]
    }

    pub fn ip_utility(&self, opponents: &[usize]) -> &'a Rational {
        self.utility(0, opponents)
    }

    pub fn label(&self) -> String {
        format!("G({})", self.base.action_label(0, self.y0))
    }

    pub fn opponent_label(&self, opponents: &[usize]) -> String {
        self.base.labels_from(1, opponents)
    }

    /// Whether opponent `j` (full-game index) strictly gains by switching to
    /// `deviation` from `opponents`.
    fn improves(&self, j: usize, opponents: &[usize], deviation: usize) -> bool {
        let mut alt = opponents.to_vec();
        alt[j - 1] = deviation;
        self.utility(j, &alt) > self.utility(j, opponents)
    }

    /// Opponent profiles where no opponent has a strictly better unilateral
    /// deviation.
    pub fn pure_nash(&self) -> Vec<Vec<usize>> {
        let counts = self.opponent_action_counts();
        self.opponent_profiles()
            .filter(|p| {
                (1..=self.opponent_count())
                    .all(|j| (0..counts[j - 1]).all(|d| !self.improves(j, p, d)))
            })
            .collect()
    }

    /// Strict better-response edges out of `opponents`: `(opponent, new profile)`.
    pub fn improvement_moves(&self, opponents: &[usize]) -> Vec<(usize, Vec<usize>)> {
        let counts = self.opponent_action_counts();
        let mut moves = Vec::new();
        for j in 1..=self.opponent_count() {
            for d in 0..counts[j - 1] {
                if d != opponents[j - 1] && self.improves(j, opponents, d) {
                    let mut alt = opponents.to_vec();
                    alt[j - 1] = d;
                    moves.push((j, alt));
                }
            }
        }
        moves
    }

    /// A cycle in the strict better-response graph, if any.
    pub fn find_improvement_cycle(&self) -> Option<Vec<Vec<usize>>> {
        let nodes: Vec<Vec<usize>> = self.opponent_profiles().collect();
        let index = |p: &[usize]| -> usize {
            let counts = self.opponent_action_counts();
            p.iter().zip(&counts).fold(0, |acc, (a, c)| acc * c + a)
        };
        let succ: Vec<Vec<usize>> = nodes
            .iter()
            .map(|p| {
                self.improvement_moves(p)
                    .into_iter()
                    .map(|(_, q)| index(&q))
                    .collect()
            })
            .collect();

        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; nodes.len()];
        let mut parent = vec![usize::MAX; nodes.len()];
        for root in 0..nodes.len() {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if *next < succ[node].len() {
                    let child = succ[node][*next];
                    *next += 1;
                    match state[child] {
                        0 => {
                            state[child] = 1;
                            parent[child] = node;
                            stack.push((child, 0));
                        }
                        1 => {
                            let mut cycle = vec![nodes[child].clone()];
                            let mut cur = node;
                            let mut path = vec![nodes[cur].clone()];
                            while cur != child {
                                cur = parent[cur];
                                path.push(nodes[cur].clone());
                            }
                            path.pop();
                            path.reverse();
                            cycle.extend(path);
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    state[node] = 2;
                    stack.pop();
                }
            }
        }
        None
    }
}

/// Odometer over all index vectors with the given per-position bounds,
/// last position fastest.
#[derive(Debug, Clone)]
pub struct ProfileIter {
    dims: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl ProfileIter {
    pub fn new(dims: &[usize]) -> Self {
        let next = if dims.iter().all(|&d| d > 0) {
            Some(vec![0; dims.len()])
        } else {
            None
        };
        ProfileIter {
            dims: dims.to_vec(),
            next,
        }
    }
}

impl Iterator for ProfileIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.dims[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}
