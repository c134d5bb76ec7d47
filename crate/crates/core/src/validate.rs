//! Structural checks on games: literal non-degeneracy (warnings) and the
//! per-subgame ordinal-potential gate used by synthesis.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::game::{Game, Subgame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Failure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub check: String,
    pub location: String,
    pub message: String,
    pub severity: Severity,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    fn from_findings(findings: Vec<Finding>) -> Self {
        let passed = findings.iter().all(|f| f.severity != Severity::Failure);
        ValidationReport { passed, findings }
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Warning)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Failure)
    }

    /// Concatenates reports; the result passes iff all inputs pass.
    pub fn merge(reports: impl IntoIterator<Item = ValidationReport>) -> Self {
        let findings = reports.into_iter().flat_map(|r| r.findings).collect();
        ValidationReport::from_findings(findings)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "passed: {}", self.passed)?;
        for x in &self.findings {
            let sev = match x.severity {
                Severity::Warning => "warning",
                Severity::Failure => "FAILURE",
            };
            writeln!(f, "  [{sev}] {} @ {}: {}", x.check, x.location, x.message)?;
        }
        Ok(())
    }
}

/// Reports every pair of distinct opponent profiles that give some opponent
/// the same payoff within one subgame. Findings are warnings only.
pub fn check_nondegenerate(game: &Game) -> ValidationReport {
    let mut findings = Vec::new();
    for y0 in 0..game.action_count(0) {
        let sub = Subgame::new(game, y0).expect("in range");
        let profiles: Vec<Vec<usize>> = sub.opponent_profiles().collect();
        for j in 1..game.player_count() {
            let mut by_value: BTreeMap<_, Vec<&Vec<usize>>> = BTreeMap::new();
            for p in &profiles {
                by_value.entry(sub.utility(j, p)).or_default().push(p);
            }
            for (value, group) in by_value {
                for (a, first) in group.iter().enumerate() {
                    for second in &group[a + 1..] {
                        findings.push(Finding {
                            check: "nondegenerate".into(),
                            location: format!("{} player {}", sub.label(), game.players()[j].name),
                            message: format!(
                                "equal payoff {value} at {} and {}",
                                sub.opponent_label(first),
                                sub.opponent_label(second)
                            ),
                            severity: Severity::Warning,
                        });
                    }
                }
            }
        }
    }
    ValidationReport::from_findings(findings)
}

/// Passes iff the strict better-response graph over opponent profiles is
/// acyclic and the subgame has exactly one pure Nash equilibrium.
pub fn check_ordinal_potential(sub: &Subgame<'_>) -> ValidationReport {
    let mut findings = Vec::new();
    let location = sub.label();
    if let Some(cycle) = sub.find_improvement_cycle() {
        let path: Vec<String> = cycle.iter().map(|p| sub.opponent_label(p)).collect();
        findings.push(Finding {
            check: "ordinal-potential".into(),
            location: location.clone(),
            message: format!("better-response cycle {} -> {}", path.join(" -> "), path[0]),
            severity: Severity::Failure,
        });
    }
    let nash = sub.pure_nash();
    if nash.len() != 1 {
        let labels: Vec<String> = nash.iter().map(|p| sub.opponent_label(p)).collect();
        findings.push(Finding {
            check: "unique-pure-nash".into(),
            location,
            message: format!(
                "expected exactly one pure Nash equilibrium, found {} [{}]",
                nash.len(),
                labels.join(", ")
            ),
            severity: Severity::Failure,
        });
    }
    ValidationReport::from_findings(findings)
}

/// `check_ordinal_potential` on every subgame.
pub fn check_all_subgames(game: &Game) -> ValidationReport {
    ValidationReport::merge(
        (0..game.action_count(0)).map(|y0| check_ordinal_potential(&Subgame::new(game, y0).unwrap())),
    )
}
