//! TOML game files.
//!
//! ```toml
//! players = [
//!   { name = "IP", actions = ["U", "D"] },
//!   { name = "Opponent", actions = ["L", "R"] },
//! ]
//! payoffs = [
//!   { profile = ["U", "L"], values = ["6", "10"] },
//!   ...
//! ]
//!
//! [metadata]
//! title = "optional"
//! source = "optional"
//! ```
//!
//! Every joint profile must appear exactly once. Values are `"int"` or
//! `"int/int"` strings (bare TOML integers are accepted too), listed in
//! player order with the IP first.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{Error, Result};
use crate::game::{Game, Player};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameFile {
    pub game: Game,
    pub metadata: Metadata,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    players: Vec<Spanned<RawPlayer>>,
    payoffs: Vec<Spanned<RawEntry>>,
    #[serde(default)]
    metadata: Metadata,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlayer {
    name: String,
    actions: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    profile: Spanned<Vec<String>>,
    values: Spanned<Vec<RawValue>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawValue {
    Int(i64),
    Text(String),
}

fn line_of(text: &str, span: Range<usize>) -> usize {
    text[..span.start.min(text.len())].matches('\n').count() + 1
}

fn parse_error(text: &str, span: Range<usize>, message: String) -> Error {
    Error::Parse {
        line: Some(line_of(text, span)),
        message,
    }
}

impl GameFile {
    pub fn parse(text: &str) -> Result<GameFile> {
        let raw: RawFile = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map(|s| line_of(text, s)),
            message: e.message().to_string(),
        })?;

        let mut players = Vec::with_capacity(raw.players.len());
        for p in &raw.players {
            let span = p.span();
            let p = p.get_ref();
            if p.actions.is_empty() {
                return Err(parse_error(text, span, format!("player '{}' has no actions", p.name)));
            }
            let mut seen = std::collections::HashSet::new();
            if let Some(dup) = p.actions.iter().find(|a| !seen.insert(a.as_str())) {
                return Err(parse_error(
                    text,
                    span,
                    format!("player '{}' lists action '{dup}' twice", p.name),
                ));
            }
            players.push(Player {
                name: p.name.clone(),
                actions: p.actions.clone(),
            });
        }
        if players.len() < 2 {
            return Err(Error::Parse {
                line: None,
                message: format!("players: need at least 2 players, got {}", players.len()),
            });
        }

        let index: Vec<HashMap<&str, usize>> = players
            .iter()
            .map(|p| p.actions.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect())
            .collect();
        let dims: Vec<usize> = players.iter().map(|p| p.actions.len()).collect();
        let total: usize = dims.iter().product();
        let mut slots: Vec<Option<Vec<Rational>>> = vec![None; total];

        for entry in &raw.payoffs {
            let entry = entry.get_ref();
            let profile = entry.profile.get_ref();
            let pspan = entry.profile.span();
            if profile.len() != players.len() {
                return Err(parse_error(
                    text,
                    pspan,
                    format!("profile has {} labels, expected {}", profile.len(), players.len()),
                ));
            }
            let mut flat = 0usize;
            for (i, label) in profile.iter().enumerate() {
                let a = *index[i].get(label.as_str()).ok_or_else(|| {
                    parse_error(
                        text,
                        pspan.clone(),
                        format!("unknown action '{label}' for player '{}'", players[i].name),
                    )
                })?;
                flat = flat * dims[i] + a;
            }
            if slots[flat].is_some() {
                return Err(parse_error(
                    text,
                    pspan,
                    format!("duplicate payoff entry for profile ({})", profile.join(",")),
                ));
            }
            let vspan = entry.values.span();
            let values = entry.values.get_ref();
            if values.len() != players.len() {
                return Err(parse_error(
                    text,
                    vspan,
                    format!("values has {} entries, expected {}", values.len(), players.len()),
                ));
            }
            let mut parsed = Vec::with_capacity(values.len());
            for v in values {
                let r = match v {
                    RawValue::Int(i) => Some(rational::int(*i)),
                    RawValue::Text(s) => rational::parse(s),
                };
                let r = r.ok_or_else(|| {
                    let shown = match v {
                        RawValue::Int(i) => i.to_string(),
                        RawValue::Text(s) => s.clone(),
                    };
                    parse_error(
                        text,
                        vspan.clone(),
                        format!("values: '{shown}' is not an integer or fraction"),
                    )
                })?;
                parsed.push(r);
            }
            slots[flat] = Some(parsed);
        }

        let mut payoffs = Vec::with_capacity(total);
        let mut missing = Vec::new();
        for (flat, slot) in slots.into_iter().enumerate() {
            match slot {
                Some(v) => payoffs.push(v),
                None => {
                    let mut rem = flat;
                    let mut labels = vec![String::new(); dims.len()];
                    for i in (0..dims.len()).rev() {
                        labels[i] = players[i].actions[rem % dims[i]].clone();
                        rem /= dims[i];
                    }
                    missing.push(format!("({})", labels.join(",")));
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::Parse {
                line: None,
                message: format!("payoffs: missing profile(s) {}", missing.join(" ")),
            });
        }

        let game = Game::new(players, payoffs)?;
        Ok(GameFile {
            game,
            metadata: raw.metadata,
        })
    }

    pub fn read(path: &std::path::Path) -> Result<GameFile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        GameFile::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        serialize(&self.game, &self.metadata)
    }
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

/// Writes `game` in the game-file format.
pub fn serialize(game: &Game, metadata: &Metadata) -> String {
    let mut out = String::from("players = [\n");
    for p in game.players() {
        let actions: Vec<String> = p.actions.iter().map(|a| quote(a)).collect();
        let _ = writeln!(out, "  {{ name = {}, actions = [{}] }},", quote(&p.name), actions.join(", "));
    }
    out.push_str("]\n\npayoffs = [\n");
    for profile in game.profiles() {
        let labels: Vec<String> = profile
            .iter()
            .enumerate()
            .map(|(i, &a)| quote(game.action_label(i, a)))
            .collect();
        let values: Vec<String> = game
            .payoff_at(&profile)
            .iter()
            .map(|v| quote(&v.to_string()))
            .collect();
        let _ = writeln!(
            out,
            "  {{ profile = [{}], values = [{}] }},",
            labels.join(", "),
            values.join(", ")
        );
    }
    out.push_str("]\n");
    if metadata.title.is_some() || metadata.source.is_some() {
        out.push_str("\n[metadata]\n");
        if let Some(t) = &metadata.title {
            let _ = writeln!(out, "title = {}", quote(t));
        }
        if let Some(s) = &metadata.source {
            let _ = writeln!(out, "source = {}", quote(s));
        }
    }
    out
}
