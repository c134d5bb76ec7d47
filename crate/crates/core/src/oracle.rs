//! Deliberately naive reference implementations for tests and `verify`.
//!
//! Nothing here shares code with the simplex, the best-response scan or
//! the synthesis path beyond reading payoffs out of [`Game`].

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{Game, MixedStrategy, Player};
use crate::lp::{LinearProgram, RowLabel};
use crate::rational::{int, Rational};
use crate::synthesis::{Candidate, SynthesisKind, SynthesisResult};
use crate::validate::check_all_subgames;

pub const MAX_VERTEX_COLUMNS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSolution {
    pub q: MixedStrategy,
    pub value: Rational,
    /// Rows of the LP that hold with equality at `q`.
    pub active_rows: Vec<usize>,
}

/// Solves the square system `a·x = b`, or `None` if it is singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let d = &f * &a[col][c];
                    a[r][c] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Every vertex of the LP's feasible region, in lexicographic order of `q`.
pub fn all_vertices(lp: &LinearProgram) -> Result<Vec<VertexSolution>> {
    let m = lp.objective.len();
    if m == 0 || m > MAX_VERTEX_COLUMNS {
        return Err(Error::Size(format!(
            "vertex enumeration supports 1..={MAX_VERTEX_COLUMNS} columns, LP has {m}"
        )));
    }
    let r = lp.rows.len();
    // Candidate tight constraints: LP rows, then the bounds q_k >= 0.
    let constraint = |i: usize| -> Vec<Rational> {
        if i < r {
            lp.rows[i].clone()
        } else {
            let mut e = vec![Rational::zero(); m];
            e[i - r] = Rational::one();
            e
        }
    };
    let mut points: Vec<Vec<Rational>> = Vec::new();
    for subset in combinations(r + m, m - 1) {
        let mut a = vec![vec![Rational::one(); m]];
        let mut b = vec![Rational::one()];
        for &i in &subset {
            a.push(constraint(i));
            b.push(Rational::zero());
        }
        let Some(q) = solve_square(a, b) else { continue };
        let feasible = q.iter().all(|x| !x.is_negative())
            && lp.rows.iter().all(|row| !row.iter().zip(&q).map(|(x, y)| x * y).sum::<Rational>().is_positive());
        if feasible && !points.contains(&q) {
            points.push(q);
        }
    }
    points.sort();
    Ok(points
        .into_iter()
        .map(|q| {
            let value: Rational = lp.objective.iter().zip(&q).map(|(c, x)| c * x).sum();
            let active_rows = (0..r)
                .filter(|&i| lp.rows[i].iter().zip(&q).map(|(x, y)| x * y).sum::<Rational>().is_zero())
                .collect();
            VertexSolution {
                q: MixedStrategy::new(0, q).expect("vertex lies on the simplex"),
                value,
                active_rows,
            }
        })
        .collect())
}

/// Vertices attaining the maximum value.
pub fn optimal_vertices(vertices: &[VertexSolution]) -> Vec<&VertexSolution> {
    let Some(best) = vertices.iter().map(|v| &v.value).max() else {
        return Vec::new();
    };
    vertices.iter().filter(|v| v.value == *best).collect()
}

/// Best vertex (ties to the lexicographically smallest `q`) and the full
/// vertex list; `None` when the LP is infeasible.
pub fn lp_vertex_oracle(lp: &LinearProgram) -> Result<(Option<VertexSolution>, Vec<VertexSolution>)> {
    let vertices = all_vertices(lp)?;
    let best = optimal_vertices(&vertices).first().map(|v| (*v).clone());
    Ok((best, vertices))
}

/// Every action of `player` maximizing expected payoff against independent
/// `others` (one strategy per other player, in player order).
pub fn best_response_oracle(game: &Game, player: usize, others: &[MixedStrategy]) -> Vec<usize> {
    assert_eq!(others.len(), game.player_count() - 1, "one strategy per other player");
    let mut values = vec![Rational::zero(); game.action_count(player)];
    for profile in game.profiles() {
        let mut w = Rational::one();
        for (i, &a) in profile.iter().enumerate() {
            if i != player {
                let s = &others[if i < player { i } else { i - 1 }];
                w *= s.prob(a);
            }
        }
        if !w.is_zero() {
            values[profile[player]] += w * game.utility(player, &profile);
        }
    }
    let best = values.iter().max().expect("at least one action").clone();
    (0..values.len()).filter(|&a| values[a] == best).collect()
}

pub const MAX_ORACLE_ACTIONS: usize = 4;
pub const MAX_ORACLE_OPPONENTS: usize = 3;

fn with_ip(y0: usize, opp: &[usize]) -> Vec<usize> {
    let mut p = vec![y0];
    p.extend_from_slice(opp);
    p
}

/// Pure equilibria of the opponents' game with the IP frozen at `y0`, by
/// checking every unilateral deviation of every opponent profile.
pub fn brute_force_nash(game: &Game, y0: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for p in game.profiles().filter(|p| p[0] == y0) {
        let stable = (1..game.player_count()).all(|j| {
            (0..game.action_count(j)).all(|d| {
                let mut q = p.clone();
                q[j] = d;
                game.utility(j, &q) <= game.utility(j, &p)
            })
        });
        if stable {
            out.push(p[1..].to_vec());
        }
    }
    out
}

/// Convergence-based synthesis by enumeration: pure equilibria by brute
/// force, each subgame LP assembled from scratch and solved by vertex
/// enumeration.
pub fn exhaustive_synthesis_oracle(game: &Game) -> Result<SynthesisResult> {
    let counts = game.action_counts();
    if game.opponent_count() > MAX_ORACLE_OPPONENTS || counts.iter().any(|&c| c > MAX_ORACLE_ACTIONS) {
        return Err(Error::Size(format!(
            "oracle supports at most {MAX_ORACLE_OPPONENTS} opponents with {MAX_ORACLE_ACTIONS} actions each, got {counts:?}"
        )));
    }
    let m = counts[0];
    let mut candidates = Vec::with_capacity(m);
    let mut baseline: Option<(usize, Rational)> = None;
    for y0 in 0..m {
        let nash = brute_force_nash(game, y0);
        if nash.len() != 1 {
            return Err(Error::Validation {
                subject: format!("G({})", game.action_label(0, y0)),
                reason: format!("{} pure equilibria", nash.len()),
            });
        }
        let target = nash.into_iter().next().unwrap();
        let pure = game.utility(0, &with_ip(y0, &target)).clone();
        if baseline.as_ref().is_none_or(|(_, b)| pure > *b) {
            baseline = Some((y0, pure));
        }
        let objective = (0..m).map(|k| game.utility(0, &with_ip(k, &target)).clone()).collect();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for j in 1..game.player_count() {
            for d in (0..counts[j]).filter(|&d| d != target[j - 1]) {
                let mut dev = target.clone();
                dev[j - 1] = d;
                rows.push(
                    (0..m)
                        .map(|k| game.utility(j, &with_ip(k, &dev)) - game.utility(j, &with_ip(k, &target)))
                        .collect(),
                );
                labels.push(RowLabel { opponent: j, deviation: d });
            }
        }
        let lp = LinearProgram { objective, rows, labels };
        let (best, _) = lp_vertex_oracle(&lp)?;
        candidates.push(Candidate {
            anchor: y0,
            target,
            lp,
            solution: best.map(|v| (v.q, v.value)),
        });
    }
    let mut chosen = 0;
    for (i, c) in candidates.iter().enumerate() {
        let v = &c.solution.as_ref().ok_or_else(|| Error::Internal("subgame LP infeasible".into()))?.1;
        if *v > candidates[chosen].solution.as_ref().unwrap().1 {
            chosen = i;
        }
    }
    let c = &candidates[chosen];
    let (mix, value) = c.solution.clone().unwrap();
    Ok(SynthesisResult {
        kind: SynthesisKind::Convergence,
        chosen_y0: Some(chosen),
        target_profile: c.target.clone(),
        mix,
        value,
        lp: c.lp.clone(),
        baseline_pure: baseline.unwrap(),
        per_candidate: candidates,
        nash_fp_payoff: None,
    })
}

/// A seeded random three-player game (IP plus two opponents, 2 or 3
/// actions each) with integer payoffs in `[1, 9]`, redrawn until every
/// subgame passes the ordinal-potential check.
pub fn random_validated_game(seed: u64) -> Game {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = ["IP", "P1", "P2"];
    let labels = ["a", "b", "c"];
    loop {
        let players: Vec<Player> = names
            .iter()
            .map(|n| Player::new(*n, &labels[..rng.gen_range(2..=3)]))
            .collect();
        let game = Game::from_fn(players, |_| (0..3).map(|_| int(rng.gen_range(1..=9))).collect())
            .expect("dimensions are consistent");
        if check_all_subgames(&game).passed {
            return game;
        }
    }
}
