//! The `pcg` command line: validate, solve, verify, reduce and generate
//! instances.
//!
//! Exit codes: 0 on success, 1 on invalid input or a profile that is not an
//! equilibrium, 2 when a solver step cap or the enumeration budget runs out.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pcg::congestion::{is_pure_nash, CongestionModel};
use pcg::dynamics::{initial_profile, run_dynamics, solve_consistent_layered, solve_insertion, MoveTrace, Policy, Status};
use pcg::generate::{generate_random_instance, GenParams, PriorityStyle, SpaceKind};
use pcg::io::{parse_instance, parse_profile, read_trace, write_trace, Instance, InstanceFile, ModelKind};
use pcg::oracle::{brute_force_pne, certify_trace, EnumerationBudget, DEFAULT_BUDGET};
use pcg::reductions::{
    reduce_affine_to_priority, reduce_classic_to_priority, reduce_market_to_playerspecific, reduce_priority_to_market,
};
use pcg::{Error, Game, PlayerId, Profile, Rational, ResourceId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;

/// Environment variable overriding the brute-force enumeration budget.
pub const BUDGET_ENV: &str = "PCG_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "pcg", version, about = "Priority-based congestion games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate an instance file.
    Validate { file: PathBuf },
    /// Compute an equilibrium.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, default_value = "roundrobin")]
        policy: Policy,
        /// Step cap for better-response dynamics.
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
        /// Write the move trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Also print floating-point approximations of costs.
        #[arg(long)]
        approx: bool,
    },
    /// Check a profile for equilibrium, or replay and certify a trace.
    Verify {
        file: PathBuf,
        /// JSON object from player id to resource ids joined by `+`, e.g. {"1":"a","2":"b+c"}.
        #[arg(long, conflicts_with = "trace", required_unless_present = "trace")]
        profile: Option<String>,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Translate an instance into another model.
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        players: usize,
        #[arg(long, default_value_t = 3)]
        resources: usize,
        #[arg(long, value_enum, default_value = "priority")]
        model: GenModel,
        #[arg(long, value_enum, default_value = "singleton")]
        space: GenSpace,
        #[arg(long, default_value_t = 6)]
        max_delay: u32,
        /// Number of priority (or market cost) levels.
        #[arg(long, default_value_t = 2)]
        levels: u32,
        /// One priority per player across all resources.
        #[arg(long)]
        consistent: bool,
        /// Separate delay tables per player (priority model).
        #[arg(long)]
        player_specific: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Layered,
    Insertion,
    Br,
    Brute,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Priority,
    Market,
    Playerspecific,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenModel {
    Priority,
    Market,
    Classic,
    Affine,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenSpace {
    Singleton,
    Explicit,
    Uniform,
    Partition,
    Graphic,
    Matroid,
    Mixed,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let code = match e.downcast_ref::<Error>() {
                Some(Error::BudgetExceeded { .. } | Error::LayerCapExhausted { .. } | Error::InsertionCapExhausted { .. }) => {
                    EXIT_EXHAUSTED
                }
                _ => EXIT_INVALID,
            };
            let _ = writeln!(err, "error: {e:#}");
            code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> anyhow::Result<i32> {
    match cmd {
        Command::Validate { file } => {
            let instance = load(&file)?;
            let (n, m) = dims(&instance);
            writeln!(out, "valid {} instance: {n} players, {m} resources", model_name(instance.kind()))?;
            Ok(EXIT_OK)
        }
        Command::Solve { file, method, policy, max_steps, trace, json, approx } => {
            let instance = load(&file)?;
            let opts = SolveOpts { method, policy, max_steps, trace, json, approx };
            match &instance {
                Instance::Market(mk) if matches!(method, Method::Br | Method::Brute) => solve_with(mk, None, &opts, out),
                Instance::Classic(c) if matches!(method, Method::Br | Method::Brute) => solve_with(c, None, &opts, out),
                Instance::Affine(a) if matches!(method, Method::Br | Method::Brute) => solve_with(a, None, &opts, out),
                _ => {
                    let game = as_priority(&instance)?;
                    solve_with(&game, Some(&game), &opts, out)
                }
            }
        }
        Command::Verify { file, profile, trace, json } => {
            let instance = load(&file)?;
            match (profile, trace) {
                (Some(text), _) => match &instance {
                    Instance::Priority(g) => verify_profile(g, &text, json, out),
                    Instance::Market(mk) => verify_profile(mk, &text, json, out),
                    Instance::Classic(c) => verify_profile(c, &text, json, out),
                    Instance::Affine(a) => verify_profile(a, &text, json, out),
                },
                (None, Some(path)) => {
                    let names = resource_names(&instance);
                    let file = fs::File::open(&path).with_context(|| format!("cannot open {}", path.display()))?;
                    let trace: MoveTrace<Rational> = read_trace(file, &names)?;
                    match (&instance, trace.solver) {
                        (Instance::Market(mk), pcg::dynamics::SolverKind::Dynamics) => verify_trace(mk, &trace, json, out),
                        (Instance::Classic(c), pcg::dynamics::SolverKind::Dynamics) => verify_trace(c, &trace, json, out),
                        (Instance::Affine(a), pcg::dynamics::SolverKind::Dynamics) => verify_trace(a, &trace, json, out),
                        _ => verify_trace(&as_priority(&instance)?, &trace, json, out),
                    }
                }
                (None, None) => bail!("give --profile or --trace"),
            }
        }
        Command::Reduce { file, to, output } => {
            let instance = load(&file)?;
            let reduced = match (to, &instance) {
                (Target::Priority, Instance::Market(_)) => {
                    bail!("market instances reduce to player-specific priority games: use --to playerspecific")
                }
                (Target::Priority, _) => Instance::Priority(as_priority(&instance)?),
                (Target::Market, Instance::Market(mk)) => Instance::Market(mk.clone()),
                (Target::Market, _) => Instance::Market(reduce_priority_to_market(&as_priority(&instance)?)?),
                (Target::Playerspecific, Instance::Market(mk)) => Instance::Priority(reduce_market_to_playerspecific(mk)?),
                (Target::Playerspecific, _) => {
                    bail!("only market instances reduce to player-specific priority games")
                }
            };
            emit(&InstanceFile::from_instance(&reduced).to_json(), output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Gen { seed, players, resources, model, space, max_delay, levels, consistent, player_specific, output } => {
            let params = GenParams {
                players,
                resources,
                model: match model {
                    GenModel::Priority => ModelKind::Priority,
                    GenModel::Market => ModelKind::Market,
                    GenModel::Classic => ModelKind::Classic,
                    GenModel::Affine => ModelKind::Affine,
                },
                space_kind: match space {
                    GenSpace::Singleton => SpaceKind::Singleton,
                    GenSpace::Explicit => SpaceKind::Explicit,
                    GenSpace::Uniform => SpaceKind::Uniform,
                    GenSpace::Partition => SpaceKind::Partition,
                    GenSpace::Graphic => SpaceKind::Graphic,
                    GenSpace::Matroid => SpaceKind::Matroid,
                    GenSpace::Mixed => SpaceKind::Mixed,
                },
                max_delay,
                levels,
                priorities: if consistent { PriorityStyle::Consistent } else { PriorityStyle::PerResource },
                player_specific,
                inf_rate: 0.0,
            };
            if players == 0 || resources == 0 {
                bail!("need at least one player and one resource");
            }
            if player_specific && params.model != ModelKind::Priority {
                bail!("--player-specific applies to the priority model only");
            }
            emit(&generate_random_instance(&params, seed).to_json(), output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
    }
}

fn load(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_instance(&text).map_err(|e| anyhow!(e).context(format!("{} is not a valid instance", path.display())))
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => out.write_all(text.as_bytes()).map_err(Into::into),
    }
}

fn model_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Priority => "priority",
        ModelKind::Market => "market",
        ModelKind::Classic => "classic",
        ModelKind::Affine => "affine",
    }
}

fn dims(instance: &Instance) -> (usize, usize) {
    match instance {
        Instance::Priority(g) => (g.n_players(), g.n_resources()),
        Instance::Market(mk) => (mk.n_players(), mk.n_resources()),
        Instance::Classic(c) => (CongestionModel::n_players(c), CongestionModel::n_resources(c)),
        Instance::Affine(a) => (CongestionModel::n_players(a), CongestionModel::n_resources(a)),
    }
}

fn resource_names(instance: &Instance) -> Vec<String> {
    match instance {
        Instance::Priority(g) => g.resource_names().to_vec(),
        Instance::Market(mk) => mk.resource_names().to_vec(),
        Instance::Classic(c) => c.resources.clone(),
        Instance::Affine(a) => a.resources.clone(),
    }
}

/// The priority game an instance denotes (markets through their
/// player-specific embedding).
fn as_priority(instance: &Instance) -> anyhow::Result<Game> {
    Ok(match instance {
        Instance::Priority(g) => g.clone(),
        Instance::Classic(c) => reduce_classic_to_priority(c)?,
        Instance::Affine(a) => reduce_affine_to_priority(a)?,
        Instance::Market(mk) => reduce_market_to_playerspecific(mk)?,
    })
}

fn budget() -> anyhow::Result<EnumerationBudget> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => Ok(EnumerationBudget::new(
            v.trim().parse().with_context(|| format!("{BUDGET_ENV} must be a nonnegative integer, got {v:?}"))?,
        )),
        Err(_) => Ok(EnumerationBudget::new(DEFAULT_BUDGET)),
    }
}

fn profile_tokens<M: CongestionModel<Rational>>(model: &M, profile: &Profile) -> BTreeMap<String, String> {
    profile
        .0
        .iter()
        .enumerate()
        .map(|(p, s)| {
            let names: Vec<&str> = s.iter().map(|r| model.resource_name(r)).collect();
            ((p + 1).to_string(), names.join("+"))
        })
        .collect()
}

fn profile_line(tokens: &BTreeMap<String, String>) -> String {
    let mut entries: Vec<(usize, &String)> = tokens.iter().map(|(k, v)| (k.parse().unwrap_or(0), v)).collect();
    entries.sort();
    entries.iter().map(|(p, s)| format!("{p}={s}")).collect::<Vec<_>>().join(" ")
}

struct SolveOpts {
    method: Method,
    policy: Policy,
    max_steps: usize,
    trace: Option<PathBuf>,
    json: bool,
    approx: bool,
}

struct Outcome {
    profile: Profile,
    trace: Option<MoveTrace<Rational>>,
    capped: bool,
    equilibria: Option<usize>,
}

fn solve_with<M: CongestionModel<Rational>>(
    model: &M,
    game: Option<&Game>,
    opts: &SolveOpts,
    out: &mut dyn Write,
) -> anyhow::Result<i32> {
    let outcome = match opts.method {
        Method::Layered => {
            let (profile, trace) = solve_consistent_layered(game.expect("priority game for layered"))?;
            Outcome { profile, trace: Some(trace), capped: false, equilibria: None }
        }
        Method::Insertion => {
            let run = solve_insertion(game.expect("priority game for insertion"))?;
            Outcome { profile: run.profile, trace: Some(run.trace), capped: false, equilibria: None }
        }
        Method::Br => {
            let start = initial_profile(model);
            let (profile, trace) = run_dynamics(model, &start, opts.policy, opts.max_steps)?;
            let capped = trace.status == Status::CapReached;
            Outcome { profile, trace: Some(trace), capped, equilibria: None }
        }
        Method::Brute => {
            let mut budget = budget()?;
            let all = brute_force_pne(model, &mut budget)?;
            let Some(first) = all.first().cloned() else {
                if opts.json {
                    writeln!(out, "{}", json!({"status": "no-equilibrium", "pne": false, "equilibria": 0}))?;
                } else {
                    writeln!(out, "no pure Nash equilibrium")?;
                }
                return Ok(EXIT_INVALID);
            };
            Outcome { profile: first, trace: None, capped: false, equilibria: Some(all.len()) }
        }
    };

    if let (Some(path), Some(trace)) = (&opts.trace, &outcome.trace) {
        let names: Vec<String> = (0..model.n_resources()).map(|r| model.resource_name(ResourceId(r)).to_owned()).collect();
        let file = fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
        write_trace(trace, &names, file)?;
    }

    let pne = is_pure_nash(model, &outcome.profile)?;
    let tokens = profile_tokens(model, &outcome.profile);
    let mut costs = BTreeMap::new();
    let mut approx = BTreeMap::new();
    for p in model.players() {
        let c = model.player_cost(&outcome.profile, p)?;
        approx.insert(p.to_string(), c.approx());
        costs.insert(p.to_string(), c.canonical());
    }
    let steps = outcome.trace.as_ref().map(|t| t.steps.len());
    let status = if outcome.capped { "cap-reached" } else { "converged" };
    if opts.json {
        let mut v = json!({
            "status": status,
            "profile": tokens,
            "costs": costs,
            "pne": pne,
        });
        if let Some(s) = steps {
            v["steps"] = json!(s);
        }
        if let Some(k) = outcome.equilibria {
            v["equilibria"] = json!(k);
        }
        if opts.approx {
            v["costs_approx"] = json!(approx);
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    } else {
        writeln!(out, "status: {status}")?;
        writeln!(out, "profile: {}", profile_line(&tokens))?;
        for p in model.players() {
            let key = p.to_string();
            if opts.approx {
                writeln!(out, "cost {key}: {} (~{})", costs[&key], approx[&key])?;
            } else {
                writeln!(out, "cost {key}: {}", costs[&key])?;
            }
        }
        if let Some(s) = steps {
            writeln!(out, "steps: {s}")?;
        }
        if let Some(k) = outcome.equilibria {
            writeln!(out, "equilibria: {k}")?;
        }
        writeln!(out, "PNE: {pne}")?;
    }
    Ok(if outcome.capped {
        EXIT_EXHAUSTED
    } else if pne {
        EXIT_OK
    } else {
        EXIT_INVALID
    })
}

fn verify_profile<M: CongestionModel<Rational>>(
    model: &M,
    text: &str,
    json: bool,
    out: &mut dyn Write,
) -> anyhow::Result<i32> {
    let names: Vec<String> = (0..model.n_resources()).map(|r| model.resource_name(ResourceId(r)).to_owned()).collect();
    let profile = parse_profile(text, &names, model.n_players())?;
    model.check_profile(&profile)?;
    let mut improvers = Vec::new();
    for p in model.players() {
        if pcg::congestion::has_better_response(model, &profile, p)? {
            improvers.push(p);
        }
    }
    let pne = improvers.is_empty();
    if json {
        let ids: Vec<String> = improvers.iter().map(PlayerId::to_string).collect();
        writeln!(out, "{}", json!({"pne": pne, "improvers": ids}))?;
    } else {
        writeln!(out, "PNE: {pne}")?;
        for p in &improvers {
            writeln!(out, "player {p} has a better response")?;
        }
    }
    Ok(if pne { EXIT_OK } else { EXIT_INVALID })
}

fn verify_trace<M: CongestionModel<Rational>>(
    model: &M,
    trace: &MoveTrace<Rational>,
    json: bool,
    out: &mut dyn Write,
) -> anyhow::Result<i32> {
    let report = certify_trace(model, trace)?;
    let clean = report.is_clean();
    if json {
        let violations: Vec<Value> =
            report.violations.iter().map(|v| json!({"step": v.step, "message": v.message})).collect();
        writeln!(
            out,
            "{}",
            json!({"clean": clean, "steps": trace.steps.len(), "pne": report.final_is_pne, "violations": violations})
        )?;
    } else {
        writeln!(out, "steps replayed: {}", trace.steps.len())?;
        for v in &report.violations {
            writeln!(out, "step {}: {}", v.step, v.message)?;
        }
        match report.final_is_pne {
            Some(pne) => writeln!(out, "PNE: {pne}")?,
            None => writeln!(out, "PNE: false (players left unplaced)")?,
        }
        writeln!(out, "trace: {}", if clean { "certified" } else { "rejected" })?;
    }
    Ok(if clean { EXIT_OK } else { EXIT_INVALID })
}
