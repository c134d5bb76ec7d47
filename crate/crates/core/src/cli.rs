//! Command-line front end. Every command returns a [`CmdOutput`] instead of
//! exiting, so the binary stays a thin wrapper and tests can drive commands
//! in-process.
//!
//! Exit codes: 0 ok, 1 parse or configuration error, 2 validation failure,
//! 3 planning failure, 4 oracle mismatch.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::Error;
use crate::fictitious_play::{detect_absorption, simulate, IpPolicy, SimulationTrace};
use crate::game::{ActionProfile, Game, MixedStrategy, TieRule};
use crate::gamefile::GameFile;
use crate::lp::LinearProgram;
use crate::oracle;
use crate::rational::{to_decimal, Rational};
use crate::synthesis::{self, SynthesisKind, SynthesisResult};
use crate::trajectory::{self, Constraint, MonitorViolation, TrajectoryPlan, VerificationReport};
use crate::validate::{check_all_subgames, check_nondegenerate, ValidationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_PLANNING: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

const MACHINE_MARKER: &str = "--- machine-readable ---";

#[derive(Debug, Parser)]
#[command(name = "ipfp", version, about = "Fictitious play with an informed player")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check non-degeneracy and the per-subgame ordinal-potential gate.
    Validate(GameArgs),
    /// Run fictitious play and write one JSON record per stage.
    Simulate {
        #[command(flatten)]
        game: GameArgs,
        /// `fp`, `fixed:<label>` or `script:<w1,w2,..>/<r1,r2,..>`.
        #[arg(long, default_value = "fp")]
        policy: String,
    },
    /// Compute the IP's optimal convergence-based mix.
    Synthesize(GameArgs),
    /// Synthesize, compile to an action schedule and verify it.
    Plan(GameArgs),
    /// Cross-check the fast paths against brute-force oracles.
    Verify(GameArgs),
}

#[derive(Debug, Args)]
pub struct GameArgs {
    /// Game file (TOML).
    pub file: PathBuf,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Tie rule for best responses; defaults to `lowest` for two-player
    /// games and `inertia` otherwise.
    #[arg(long)]
    pub tie_rule: Option<TieRule>,
    /// Initial action labels, comma separated, IP first; defaults to every
    /// player's first action.
    #[arg(long, value_delimiter = ',')]
    pub init: Option<Vec<String>>,
    /// Stages to simulate.
    #[arg(long, default_value_t = 1000)]
    pub horizon: usize,
    /// Block repetitions to verify after the warm-up.
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    /// Write the trace or document here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Significant digits in decimal renderings.
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tie_rule: None,
            init: None,
            horizon: 1000,
            reps: 10,
            out: None,
            precision: 6,
        }
    }
}

impl RunConfig {
    pub fn tie_rule_for(&self, game: &Game) -> TieRule {
        self.tie_rule.unwrap_or_else(|| TieRule::default_for(game))
    }

    pub fn initial_for(&self, game: &Game) -> Result<ActionProfile, Error> {
        let Some(labels) = &self.init else {
            return ActionProfile::new(game, vec![0; game.player_count()]);
        };
        if labels.len() != game.player_count() {
            return Err(Error::InvalidInput(format!(
                "--init needs {} labels, got {}",
                game.player_count(),
                labels.len()
            )));
        }
        let actions = labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                game.action_index(i, l.trim()).ok_or_else(|| {
                    Error::InvalidInput(format!("unknown action '{l}' for player '{}'", game.players()[i].name))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        ActionProfile::new(game, actions)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CmdOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CmdOutput {
    fn ok(stdout: String) -> Self {
        CmdOutput { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: String) -> Self {
        CmdOutput { code, stdout: String::new(), stderr }
    }

    fn from_error(e: &Error) -> Self {
        CmdOutput::fail(exit_code(e), format!("error: {e}\n"))
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Dimension(_) | Error::InvalidInput(_) | Error::Size(_) => EXIT_PARSE,
        Error::Validation { .. } => EXIT_VALIDATION,
        Error::NonConvergence { .. } | Error::Planning(_) | Error::Internal(_) => EXIT_PLANNING,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CmdOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli.command),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                CmdOutput::ok(text)
            } else {
                CmdOutput::fail(code, text)
            }
        }
    }
}

pub fn dispatch(command: Command) -> CmdOutput {
    match command {
        Command::Validate(a) => cmd_validate(&a.file, &a.config),
        Command::Simulate { game, policy } => cmd_simulate(&game.file, &policy, &game.config),
        Command::Synthesize(a) => cmd_synthesize(&a.file, &a.config),
        Command::Plan(a) => cmd_plan(&a.file, &a.config),
        Command::Verify(a) => cmd_verify(&a.file, &a.config),
    }
}

fn load(path: &Path) -> Result<GameFile, CmdOutput> {
    GameFile::read(path).map_err(|e| CmdOutput::from_error(&e))
}

/// Sends a document to `--out` (reporting the path on stdout) or stdout.
fn emit(config: &RunConfig, code: i32, text: String) -> CmdOutput {
    match &config.out {
        None => CmdOutput { code, stdout: text, stderr: String::new() },
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => CmdOutput { code, stdout: format!("wrote {}\n", path.display()), stderr: String::new() },
            Err(e) => CmdOutput::fail(EXIT_PARSE, format!("error: cannot write {}: {e}\n", path.display())),
        },
    }
}

fn document(human: String, machine: Value) -> String {
    let mut out = human;
    if !out.ends_with('\n') {
        out.push('\n');
    }
    let _ = writeln!(out, "{MACHINE_MARKER}");
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&machine).expect("json"));
    out
}

/// The JSON value following the machine-readable marker of a document.
pub fn machine_section(doc: &str) -> Option<Value> {
    let (_, json) = doc.split_once(MACHINE_MARKER)?;
    serde_json::from_str(json.trim()).ok()
}

fn num(v: &Rational, precision: usize) -> Value {
    json!({ "exact": v.to_string(), "decimal": to_decimal(v, precision) })
}

fn show(v: &Rational, precision: usize) -> String {
    let d = to_decimal(v, precision);
    if v.is_integer() {
        v.to_string()
    } else {
        format!("{v} ≈ {d}")
    }
}

fn mix_exact(m: &MixedStrategy) -> Vec<String> {
    m.probs().iter().map(|p| p.to_string()).collect()
}

fn title(file: &GameFile, path: &Path) -> String {
    file.metadata.title.clone().unwrap_or_else(|| path.display().to_string())
}

fn labels(game: &Game, player: usize, actions: &[usize]) -> Vec<String> {
    actions.iter().map(|&a| game.action_label(player, a).to_string()).collect()
}

fn report_json(r: &ValidationReport) -> Value {
    serde_json::to_value(r).expect("json")
}

pub fn cmd_validate(path: &Path, config: &RunConfig) -> CmdOutput {
    let file = match load(path) {
        Ok(f) => f,
        Err(out) => return out,
    };
    let game = &file.game;
    let nondegenerate = check_nondegenerate(game);
    let potential = if game.player_count() > 2 {
        check_all_subgames(game)
    } else {
        ValidationReport { passed: true, findings: Vec::new() }
    };
    let merged = ValidationReport::merge([nondegenerate, potential]);
    let mut human = String::new();
    let _ = writeln!(human, "game: {}", title(&file, path));
    let _ = writeln!(
        human,
        "players: {}",
        game.players().iter().map(|p| format!("{} {:?}", p.name, p.actions)).collect::<Vec<_>>().join(", ")
    );
    let _ = writeln!(human, "warnings: {}", merged.warnings().count());
    let _ = writeln!(human, "failures: {}", merged.failures().count());
    let _ = write!(human, "{merged}");
    let code = if merged.passed { EXIT_OK } else { EXIT_VALIDATION };
    emit(config, code, document(human, json!({ "command": "validate", "report": report_json(&merged) })))
}

/// Parses a policy spec against the game's IP labels.
pub fn parse_policy(game: &Game, spec: &str) -> Result<IpPolicy, Error> {
    let ip = |l: &str| {
        game.action_index(0, l.trim())
            .ok_or_else(|| Error::InvalidInput(format!("unknown IP action '{l}' in policy '{spec}'")))
    };
    let list = |s: &str| -> Result<Vec<usize>, Error> {
        s.split(',').filter(|x| !x.trim().is_empty()).map(ip).collect()
    };
    match spec.split_once(':') {
        None if spec == "fp" => Ok(IpPolicy::FictitiousPlay),
        Some(("fixed", label)) => Ok(IpPolicy::FixedAction(ip(label)?)),
        Some(("script", body)) => {
            let (w, r) = body.split_once('/').unwrap_or(("", body));
            let repeat = list(r)?;
            if repeat.is_empty() {
                return Err(Error::InvalidInput(format!("policy '{spec}' has an empty repeat block")));
            }
            Ok(IpPolicy::ScriptedSequence { warmup: list(w)?, repeat })
        }
        _ => Err(Error::InvalidInput(format!(
            "unknown policy '{spec}' (expected fp, fixed:<label> or script:<warmup>/<repeat>)"
        ))),
    }
}

/// One JSON line per stage.
pub fn trace_lines(game: &Game, trace: &SimulationTrace, precision: usize) -> String {
    let mut out = String::new();
    for s in &trace.steps {
        let record = json!({
            "t": s.t,
            "actions": s.profile.iter().enumerate().map(|(i, &a)| game.action_label(i, a)).collect::<Vec<_>>(),
            "payoffs": s.payoffs.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "ip_average": s.ip_average.to_string(),
            "ip_average_decimal": to_decimal(&s.ip_average, precision),
        });
        let _ = writeln!(out, "{record}");
    }
    out
}

pub fn cmd_simulate(path: &Path, policy: &str, config: &RunConfig) -> CmdOutput {
    let file = match load(path) {
        Ok(f) => f,
        Err(out) => return out,
    };
    let game = &file.game;
    let run = || -> Result<(SimulationTrace, TieRule), Error> {
        let policy = parse_policy(game, policy)?;
        let tie = config.tie_rule_for(game);
        let initial = config.initial_for(game)?;
        Ok((simulate(game, &policy, config.horizon, tie, &initial)?, tie))
    };
    let (trace, tie) = match run() {
        Ok(t) => t,
        Err(e) => return CmdOutput::from_error(&e),
    };
    let avg = trace.final_average();
    let mut summary = format!(
        "{} stages, policy {policy}, tie rule {tie}\n",
        trace.horizon()
    );
    match detect_absorption(&trace, config.horizon.div_ceil(2)) {
        Some((profile, from)) => {
            let _ = writeln!(
                summary,
                "absorbed at {} from t = {from}, IP avg → {}",
                game.profile_label(&profile),
                show(game.utility(0, &profile), config.precision)
            );
        }
        None => {
            let _ = writeln!(summary, "no pure absorption within the horizon");
        }
    }
    let _ = writeln!(summary, "final IP average {}", to_decimal(avg, config.precision));
    let trace_text = trace_lines(game, &trace, config.precision);
    match &config.out {
        Some(p) => match std::fs::write(p, trace_text) {
            Ok(()) => CmdOutput::ok(format!("{summary}trace written to {}\n", p.display())),
            Err(e) => CmdOutput::fail(EXIT_PARSE, format!("error: cannot write {}: {e}\n", p.display())),
        },
        None => CmdOutput { code: EXIT_OK, stdout: trace_text, stderr: summary },
    }
}

/// Validates as synthesis requires: subgame gate for three or more players.
fn gate(game: &Game) -> Result<(), CmdOutput> {
    if game.player_count() > 2 {
        let r = check_all_subgames(game);
        if !r.passed {
            return Err(CmdOutput::fail(EXIT_VALIDATION, format!("validation failed\n{r}")));
        }
    }
    Ok(())
}

fn lp_json(lp: &LinearProgram) -> Value {
    json!({
        "objective": lp.objective.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "rows": lp.rows.iter().zip(&lp.labels).map(|(r, l)| json!({
            "opponent": l.opponent,
            "deviation": l.deviation,
            "coefficients": r.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn synthesis_text(game: &Game, s: &SynthesisResult, precision: usize) -> String {
    let mut out = String::new();
    let mix_labels = |m: &MixedStrategy| {
        m.probs()
            .iter()
            .enumerate()
            .map(|(k, p)| format!("{}: {p}", game.action_label(0, k)))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let target = game.labels_from(1, &s.target_profile);
    match s.kind {
        SynthesisKind::TwoPlayer => {
            let _ = writeln!(out, "mode: two-player");
            let _ = writeln!(out, "j* = {}", game.action_label(1, s.target_profile[0]));
        }
        SynthesisKind::Convergence => {
            let _ = writeln!(out, "mode: convergence-based");
            let y0 = s.chosen_y0.unwrap();
            let _ = writeln!(out, "y0* = {}", game.action_label(0, y0));
            let _ = writeln!(out, "target equilibrium: {target}");
        }
    }
    let _ = writeln!(out, "z = {} [{}]", s.mix, mix_labels(&s.mix));
    let _ = writeln!(out, "value = {}", show(&s.value, precision));
    let _ = writeln!(out, "candidates:");
    for c in &s.per_candidate {
        let name = match s.kind {
            SynthesisKind::TwoPlayer => format!("column {}", game.action_label(1, c.anchor)),
            SynthesisKind::Convergence => format!(
                "G({}) at {}",
                game.action_label(0, c.anchor),
                game.labels_from(1, &c.target)
            ),
        };
        match &c.solution {
            Some((m, v)) => {
                let _ = writeln!(out, "  {name}: value {}, z = {m}", show(v, precision));
            }
            None => {
                let _ = writeln!(out, "  {name}: infeasible");
            }
        }
    }
    let (b, bv) = &s.baseline_pure;
    let _ = writeln!(
        out,
        "pure baseline: repeat {} → {}",
        game.action_label(0, *b),
        show(bv, precision)
    );
    match &s.nash_fp_payoff {
        Some(v) => {
            let _ = writeln!(out, "all-FP absorbed payoff: {}", show(v, precision));
        }
        None => {
            let _ = writeln!(out, "all-FP absorbed payoff: none (no absorption within the horizon)");
        }
    }
    out
}

fn synthesis_json(game: &Game, s: &SynthesisResult, precision: usize) -> Value {
    json!({
        "kind": s.kind,
        "chosen_y0": s.chosen_y0.map(|y| game.action_label(0, y)),
        "target": s.target_profile.iter().enumerate().map(|(i, &a)| game.action_label(i + 1, a)).collect::<Vec<_>>(),
        "mix": mix_exact(&s.mix),
        "value": num(&s.value, precision),
        "baseline_pure": { "action": game.action_label(0, s.baseline_pure.0), "value": num(&s.baseline_pure.1, precision) },
        "fp_absorbed_payoff": s.nash_fp_payoff.as_ref().map(|v| num(v, precision)),
        "lp": lp_json(&s.lp),
        "candidates": s.per_candidate.iter().map(|c| json!({
            "anchor": c.anchor,
            "target": c.target,
            "value": c.solution.as_ref().map(|(_, v)| v.to_string()),
            "mix": c.solution.as_ref().map(|(m, _)| mix_exact(m)),
        })).collect::<Vec<_>>(),
    })
}

fn synthesize_with_reference(game: &Game, config: &RunConfig) -> Result<SynthesisResult, Error> {
    let mut s = synthesis::synthesize(game)?;
    let initial = config.initial_for(game)?;
    s.nash_fp_payoff =
        synthesis::fp_reference_payoff(game, config.horizon.max(1), config.tie_rule_for(game), &initial)?;
    Ok(s)
}

pub fn cmd_synthesize(path: &Path, config: &RunConfig) -> CmdOutput {
    let file = match load(path) {
        Ok(f) => f,
        Err(out) => return out,
    };
    let game = &file.game;
    if let Err(out) = gate(game) {
        return out;
    }
    let s = match synthesize_with_reference(game, config) {
        Ok(s) => s,
        Err(e) => return CmdOutput::from_error(&e),
    };
    let mut human = format!("game: {}\n", title(&file, path));
    human.push_str(&synthesis_text(game, &s, config.precision));
    let machine = json!({ "command": "synthesize", "synthesis": synthesis_json(game, &s, config.precision) });
    emit(config, EXIT_OK, document(human, machine))
}

fn run_length(game: &Game, seq: &[usize]) -> String {
    let mut parts: Vec<(usize, usize)> = Vec::new();
    for &a in seq {
        match parts.last_mut() {
            Some((b, n)) if *b == a => *n += 1,
            _ => parts.push((a, 1)),
        }
    }
    let body = parts
        .iter()
        .map(|&(a, n)| {
            let l = game.action_label(0, a);
            if n == 1 { l.to_string() } else { format!("{l}×{n}") }
        })
        .collect::<Vec<_>>()
        .join(", ");
    format!("({body})")
}

fn violation_text(game: &Game, v: &MonitorViolation) -> String {
    let what = match &v.constraint {
        Constraint::FrequencyFloor { action } => format!("frequency of {} below target", game.action_label(0, *action)),
        Constraint::FrequencyCap { action } => format!("frequency of {} above target", game.action_label(0, *action)),
        Constraint::Row { index, label } => format!(
            "row {} ({} deviating to {}) positive",
            index + 1,
            game.players()[label.opponent].name,
            game.action_label(label.opponent, label.deviation)
        ),
    };
    format!("t = {}: {what} ({})", v.t, v.value)
}

fn plan_text(game: &Game, plan: &TrajectoryPlan, report: &VerificationReport, precision: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "X' = {} (τ' = {})", run_length(game, &plan.warmup), plan.tau_prime);
    let _ = writeln!(out, "X* = {} (τ* = {})", run_length(game, &plan.block), plan.tau_star);
    let _ = writeln!(out, "τ0 = {}, ε = {}", plan.tau_zero, plan.epsilon);
    if plan.source.kind == SynthesisKind::TwoPlayer {
        let mut first: Vec<usize> = plan.warmup.clone();
        first.extend(&plan.block);
        let _ = writeln!(out, "realization: {}", run_length(game, &first));
    }
    for r in &plan.repairs {
        let _ = writeln!(
            out,
            "reordered block position {}: {} → {}",
            r.position,
            game.action_label(0, r.planned),
            game.action_label(0, r.chosen)
        );
    }
    let _ = writeln!(out, "verification over {} stages:", report.horizon);
    let _ = writeln!(out, "  held = {}", report.held);
    match report.absorption_time {
        Some(t) => {
            let _ = writeln!(out, "  opponents locked at {} from t = {t}", game.labels_from(1, plan.target()));
        }
        None => {
            let _ = writeln!(out, "  opponents not locked at {}", game.labels_from(1, plan.target()));
        }
    }
    if let Some(d) = &report.first_violation {
        let _ = writeln!(
            out,
            "  first deviation: t = {}, {} played {}",
            d.t,
            game.players()[d.opponent].name,
            game.action_label(d.opponent, d.played)
        );
    }
    let m = &report.monitor;
    let _ = writeln!(out, "  monitor: {} stages, {} violations", m.steps, m.violations);
    if let Some(v) = &m.first_violation {
        let _ = writeln!(out, "  first violation: {}", violation_text(game, v));
    }
    let _ = writeln!(out, "  closed form holds = {}", report.closed_form_holds);
    let _ = writeln!(out, "  final average = {}", to_decimal(&report.final_average, precision));
    let _ = writeln!(out, "  limit → {}", show(&plan.source.value, precision));
    let _ = writeln!(
        out,
        "  gap = {} (bound C/T with C = {})",
        to_decimal(&report.limit_gap, precision),
        report.rate_constant
    );
    out
}

fn violation_json(v: &MonitorViolation) -> Value {
    let (kind, detail) = match &v.constraint {
        Constraint::FrequencyFloor { action } => ("frequency-floor", json!({ "action": action })),
        Constraint::FrequencyCap { action } => ("frequency-cap", json!({ "action": action })),
        Constraint::Row { index, label } => (
            "row",
            json!({ "row": index, "opponent": label.opponent, "deviation": label.deviation }),
        ),
    };
    json!({ "t": v.t, "kind": kind, "detail": detail, "value": v.value.to_string() })
}

fn plan_json(game: &Game, plan: &TrajectoryPlan, report: &VerificationReport, precision: usize) -> Value {
    json!({
        "warmup": labels(game, 0, &plan.warmup),
        "block": labels(game, 0, &plan.block),
        "tau_star": plan.tau_star,
        "tau_zero": plan.tau_zero,
        "tau_prime": plan.tau_prime,
        "epsilon": plan.epsilon,
        "repairs": plan.repairs.iter().map(|r| json!({ "position": r.position, "planned": r.planned, "chosen": r.chosen })).collect::<Vec<_>>(),
        "verification": {
            "held": report.held,
            "horizon": report.horizon,
            "absorption_time": report.absorption_time,
            "first_deviation": report.first_violation.as_ref().map(|d| json!({ "t": d.t, "opponent": d.opponent, "played": d.played })),
            "monitor_violations": report.monitor.violations,
            "first_monitor_violation": report.monitor.first_violation.as_ref().map(violation_json),
            "closed_form_holds": report.closed_form_holds,
            "rate_bound_holds": report.rate_bound_holds,
            "payoff_after": report.payoff_after.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "final_average": num(&report.final_average, precision),
            "limit_gap": num(&report.limit_gap, precision),
        }
    })
}

pub fn cmd_plan(path: &Path, config: &RunConfig) -> CmdOutput {
    let file = match load(path) {
        Ok(f) => f,
        Err(out) => return out,
    };
    let game = &file.game;
    if let Err(out) = gate(game) {
        return out;
    }
    let tie = config.tie_rule_for(game);
    let run = || -> Result<(SynthesisResult, TrajectoryPlan, VerificationReport), Error> {
        let initial = config.initial_for(game)?;
        let s = synthesize_with_reference(game, config)?;
        let plan = trajectory::build_plan(game, &s, tie)?;
        let report = trajectory::verify_plan(game, &plan, config.reps.max(1), tie, &initial)?;
        Ok((s, plan, report))
    };
    let (s, plan, report) = match run() {
        Ok(r) => r,
        Err(e) => return CmdOutput::from_error(&e),
    };
    let mut human = format!("game: {}\ntie rule: {tie}\n", title(&file, path));
    human.push_str(&synthesis_text(game, &s, config.precision));
    human.push_str(&plan_text(game, &plan, &report, config.precision));
    let machine = json!({
        "command": "plan",
        "synthesis": synthesis_json(game, &s, config.precision),
        "plan": plan_json(game, &plan, &report, config.precision),
    });
    let code = if report.held && report.monitor.passed() { EXIT_OK } else { EXIT_PLANNING };
    emit(config, code, document(human, machine))
}

struct Check {
    name: String,
    fast: String,
    oracle: String,
}

impl Check {
    fn agrees(&self) -> bool {
        self.fast == self.oracle
    }
}

fn opt_value(v: Option<&Rational>) -> String {
    v.map_or_else(|| "infeasible".to_string(), |v| v.to_string())
}

/// Strategies used to probe best responses: every point mass and uniform.
fn probe_strategies(game: &Game, player: usize) -> Vec<MixedStrategy> {
    let n = game.action_count(player);
    let mut out: Vec<MixedStrategy> = (0..n).map(|a| MixedStrategy::pure(player, n, a)).collect();
    out.push(MixedStrategy::new(player, vec![Rational::new(1.into(), (n as i64).into()); n]).unwrap());
    out
}

fn oracle_checks(game: &Game) -> Result<Vec<Check>, Error> {
    let mut checks = Vec::new();
    let s = synthesis::synthesize(game)?;
    for c in &s.per_candidate {
        let (best, _) = oracle::lp_vertex_oracle(&c.lp)?;
        checks.push(Check {
            name: format!("LP value, candidate {}", c.anchor),
            fast: opt_value(c.solution.as_ref().map(|(_, v)| v)),
            oracle: opt_value(best.as_ref().map(|b| &b.value)),
        });
    }
    if s.kind == SynthesisKind::Convergence {
        let o = oracle::exhaustive_synthesis_oracle(game)?;
        checks.push(Check {
            name: "chosen y0*".into(),
            fast: format!("{:?}", s.chosen_y0),
            oracle: format!("{:?}", o.chosen_y0),
        });
        checks.push(Check { name: "synthesis value".into(), fast: s.value.to_string(), oracle: o.value.to_string() });
        for y0 in 0..game.action_count(0) {
            checks.push(Check {
                name: format!("pure equilibria of G({})", game.action_label(0, y0)),
                fast: format!("{:?}", game.subgame(y0)?.pure_nash()),
                oracle: format!("{:?}", oracle::brute_force_nash(game, y0)),
            });
        }
    }
    // Best responses against every combination of probe strategies.
    for player in 0..game.player_count() {
        let others: Vec<usize> = (0..game.player_count()).filter(|&i| i != player).collect();
        let mut combos: Vec<Vec<MixedStrategy>> = vec![Vec::new()];
        for &i in &others {
            let probes = probe_strategies(game, i);
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    probes.iter().map(move |p| {
                        let mut c = c.clone();
                        c.push(p.clone());
                        c
                    })
                })
                .collect();
        }
        let mut bad = 0;
        for combo in &combos {
            let set = oracle::best_response_oracle(game, player, combo);
            for tie in [TieRule::LowestIndex, TieRule::Inertia] {
                for cur in 0..game.action_count(player) {
                    if !set.contains(&game.best_response(player, combo, tie, Some(cur))?) {
                        bad += 1;
                    }
                }
            }
        }
        checks.push(Check {
            name: format!("best responses of {} ({} probes)", game.players()[player].name, combos.len()),
            fast: format!("{bad} outside argmax"),
            oracle: "0 outside argmax".into(),
        });
    }
    Ok(checks)
}

pub fn cmd_verify(path: &Path, config: &RunConfig) -> CmdOutput {
    let file = match load(path) {
        Ok(f) => f,
        Err(out) => return out,
    };
    let game = &file.game;
    if let Err(out) = gate(game) {
        return out;
    }
    let checks = match oracle_checks(game) {
        Ok(c) => c,
        Err(e) => return CmdOutput::from_error(&e),
    };
    let all = checks.iter().all(Check::agrees);
    let mut human = format!("game: {}\n", title(&file, path));
    for c in &checks {
        let tag = if c.agrees() { "agree" } else { "MISMATCH" };
        let _ = writeln!(human, "[{tag}] {}: fast {} / oracle {}", c.name, c.fast, c.oracle);
    }
    let _ = writeln!(human, "{}", if all { "all checks agree" } else { "oracle mismatch" });
    let machine = json!({
        "command": "verify",
        "agree": all,
        "checks": checks.iter().map(|c| json!({ "name": c.name, "fast": c.fast, "oracle": c.oracle, "agree": c.agrees() })).collect::<Vec<_>>(),
    });
    emit(config, if all { EXIT_OK } else { EXIT_MISMATCH }, document(human, machine))
}
