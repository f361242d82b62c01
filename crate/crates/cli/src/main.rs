//! `lig`: file-based workflows over linear influence games.
//!
//! Every command writes a run manifest next to its primary output.
//! Exit codes: 0 success, 1 other failure, 2 infeasible, 3 budget exhausted,
//! 4 input validation.

mod bench;
mod manifest;

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lig::genlearn::{
    court_code_map, generate, learn_lig, psne_representation_rate, read_votes_csv, GenConfig, GenFamily, LearnConfig,
};
use lig::influence::{
    exact_most_influential, greedy_most_influential, CandidatePositions, GoalSpec, GreedyConfig, PsneListCounter,
    SearchCounter, SetPreference,
};
use lig::io::{game_to_json, psne_to_string, read_game, read_psne};
use lig::scenarios::{cloture_preventers, diffusion_filibuster, filibuster_breakers, stable_cloture_set, ClotureSpec};
use lig::solvers::{
    count_psne_extensions, enumerate_psne, is_forest, solve_divide_conquer, solve_supermodular, solve_tree, Extreme,
};
use lig::{Error, InfluenceGame, JointAction, PartialAssignment, SearchConfig};
use serde::Serialize;
use serde_json::json;

use manifest::{Artifacts, RunManifest};

#[derive(Debug)]
pub enum CliError {
    Lig(Error),
    Io(std::io::Error),
    Usage(String),
    Replay(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lig(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Lig(Error::Csv(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Lig(Error::Json(e))
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lig(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Replay(m) => write!(f, "replay mismatch: {m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lig(Error::Infeasible(_)) => 2,
            CliError::Lig(Error::BudgetExhausted(_)) => 3,
            CliError::Lig(Error::Io(_) | Error::RoundLimit(_)) => 1,
            CliError::Lig(_) | CliError::Usage(_) => 4,
            CliError::Io(_) | CliError::Replay(_) => 1,
        }
    }
}

type Res<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "lig", version, about = "Linear influence games: equilibria, influence, coalitions")]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Manifest path; defaults to `<out>.manifest.json`.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random game.
    Generate(GenerateArgs),
    /// Compute PSNE.
    Solve(SolveArgs),
    /// Find a most-influential set.
    Influential(InfluentialArgs),
    /// Filibuster, cloture and diffusion analyses.
    Scenario(ScenarioArgs),
    /// Learn a game from a votes CSV.
    Learn(LearnArgs),
    /// Run a benchmark sweep.
    Bench(BenchArgs),
    /// Re-run a manifest and check its outputs match.
    Replay {
        #[arg(value_name = "MANIFEST")]
        path: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    ErdosRenyi,
    UniformRandom,
    PrefAttach,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    edge_p: f64,
    #[arg(long, default_value_t = 0.5)]
    arc_p: f64,
    #[arg(long, default_value_t = 0.0)]
    flip_p: f64,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Auto,
    Backtrack,
    Tree,
    Supermodular,
    Dnc,
}

#[derive(Args, Debug)]
struct SolveArgs {
    game: PathBuf,
    #[arg(long, value_enum, default_value = "backtrack")]
    method: Method,
    /// Write only a count JSON.
    #[arg(long)]
    count_only: bool,
    /// Node budget for the backtracking search.
    #[arg(long)]
    budget: Option<u64>,
    /// Cut edges ignored by divide-and-conquer.
    #[arg(long, default_value_t = 0)]
    anytime_drop: usize,
    #[arg(long)]
    no_propagation: bool,
    #[arg(long)]
    parallel: bool,
    /// Stats JSON path; defaults to `<out>.stats.json`.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CounterKind {
    List,
    Search,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Candidates {
    All,
    Adopters,
}

#[derive(Args, Debug)]
struct InfluentialArgs {
    game: PathBuf,
    /// PSNE file; computed by backtracking when absent.
    #[arg(long)]
    psne: Option<PathBuf>,
    /// `target=<psne file>`, `max-adopters` or `weighted=<json array>`.
    #[arg(long, default_value = "max-adopters")]
    goal: String,
    /// `min-card` or `weighted=<json array>`.
    #[arg(long, default_value = "min-card")]
    pref: String,
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    explore_ties: bool,
    #[arg(long, value_enum, default_value = "all")]
    candidates: Candidates,
    #[arg(long, value_enum, default_value = "list")]
    counter: CounterKind,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Break,
    Prevent,
    Diffusion,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    game: PathBuf,
    #[arg(long)]
    psne: Option<PathBuf>,
    #[arg(long)]
    quota: usize,
    /// JSON array of player indices or labels.
    #[arg(long)]
    party: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "break")]
    mode: Mode,
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 3)]
    k_max: usize,
    #[arg(long)]
    subset_cap: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct LearnArgs {
    votes: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    /// Report JSON path; defaults to `<out>.report.json`.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(value_enum)]
    suite: bench::Suite,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 25)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [20, 25, 30, 35])]
    sizes: Vec<usize>,
    /// Defaults to 0, 0.125, ..., 1 (uniform suites) or 1 (pref-attach).
    #[arg(long, value_delimiter = ',')]
    flip_ps: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    arc_p: f64,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// What a command reports for its manifest.
struct Outcome {
    out: PathBuf,
    config: serde_json::Value,
}

fn pretty<T: Serialize>(v: &T) -> Res<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn unreadable(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

fn load_game(path: &Path, art: &mut Artifacts) -> Res<InfluenceGame> {
    art.input(path);
    read_game(path).map_err(|e| unreadable(path, e))
}

fn load_psne(path: &Path, art: &mut Artifacts) -> Res<Vec<JointAction>> {
    art.input(path);
    let f = fs::File::open(path).map_err(|e| unreadable(path, e))?;
    read_psne(BufReader::new(f)).map_err(|e| unreadable(path, e))
}

fn game_psne(game: &InfluenceGame, file: Option<&Path>, art: &mut Artifacts) -> Res<Vec<JointAction>> {
    match file {
        Some(p) => {
            let psne = load_psne(p, art)?;
            if let Some(x) = psne.iter().find(|x| x.len() != game.n() || !game.is_psne(x)) {
                return Err(CliError::Usage(format!("{}: {} is not a PSNE of the game", p.display(), x.to_line())));
            }
            Ok(psne)
        }
        None => Ok(enumerate_psne(game, &SearchConfig::default())?.0),
    }
}

fn load_vector(path: &Path, art: &mut Artifacts) -> Res<Vec<f64>> {
    art.input(path);
    let text = fs::read_to_string(path).map_err(|e| unreadable(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: expected a JSON array of numbers: {e}", path.display())))
}

fn names(game: &InfluenceGame, set: &[usize]) -> Vec<String> {
    set.iter().map(|&i| game.label(i)).collect()
}

fn cmd_generate(a: &GenerateArgs, art: &mut Artifacts) -> Res<Outcome> {
    let family = match a.family {
        Family::ErdosRenyi => GenFamily::ErdosRenyi { edge_p: a.edge_p },
        Family::UniformRandom => GenFamily::UniformRandom { arc_p: a.arc_p, flip_p: a.flip_p },
        Family::PrefAttach => GenFamily::PrefAttach { m: a.m, flip_p: a.flip_p },
    };
    let cfg = GenConfig { family, n: a.n, seed: a.seed };
    let game = generate(&cfg)?;
    art.seeds.push(a.seed);
    art.write(&a.out, game_to_json(&game))?;
    Ok(Outcome { out: a.out.clone(), config: serde_json::to_value(cfg)? })
}

fn resolve_method(game: &InfluenceGame, a: &SolveArgs) -> Method {
    match a.method {
        Method::Auto if a.count_only => Method::Backtrack,
        Method::Auto if is_forest(game) => Method::Tree,
        Method::Auto if game.all_weights_nonnegative() => Method::Supermodular,
        Method::Auto => Method::Backtrack,
        m => m,
    }
}

fn cmd_solve(a: &SolveArgs, art: &mut Artifacts) -> Res<Outcome> {
    let game = load_game(&a.game, art)?;
    let method = resolve_method(&game, a);
    let mut cfg = SearchConfig::default().with_propagation(!a.no_propagation).with_parallel(a.parallel);
    if let Some(b) = a.budget {
        cfg = cfg.with_budget(b);
    }
    let config = json!({
        "game": a.game, "method": a.method, "resolved_method": method, "count_only": a.count_only,
        "budget": a.budget, "anytime_drop": a.anytime_drop, "propagation": !a.no_propagation,
    });
    let stats_path = a.stats.clone().unwrap_or_else(|| manifest::sibling(&a.out, ".stats.json"));
    let outcome = Outcome { out: a.out.clone(), config };
    if a.count_only {
        let count = match method {
            Method::Backtrack => {
                count_psne_extensions(&game, &PartialAssignment::new(), &SearchConfig { count_only: true, ..cfg })
            }
            Method::Dnc => solve_divide_conquer(&game, &cfg, a.anytime_drop).map(|(p, _)| p.len() as u64),
            m => Err(Error::NotApplicable(format!("{m:?} does not count equilibria"))),
        };
        let count = match count {
            Err(Error::BudgetExhausted(p)) => {
                art.write(&a.out, pretty(&json!({ "count": p.count, "exhausted": true, "budget": p.budget }))?)?;
                return Err(Error::BudgetExhausted(p).into());
            }
            c => c?,
        };
        art.write(&a.out, pretty(&json!({ "count": count }))?)?;
        return Ok(outcome);
    }
    let mut stats = json!({ "method": method });
    let psne = match method {
        Method::Backtrack => match enumerate_psne(&game, &cfg) {
            Ok((psne, s)) => {
                stats["nodes_visited"] = s.nodes_visited.into();
                psne
            }
            Err(Error::BudgetExhausted(p)) => {
                stats["nodes_visited"] = p.stats.nodes_visited.into();
                stats["psne_found"] = p.psne.len().into();
                stats["exhausted"] = true.into();
                art.write(&a.out, psne_to_string(&p.psne))?;
                art.write(&stats_path, pretty(&stats)?)?;
                return Err(Error::BudgetExhausted(p).into());
            }
            Err(e) => return Err(e.into()),
        },
        Method::Tree => solve_tree(&game)?.into_iter().collect(),
        Method::Supermodular => {
            let lo = solve_supermodular(&game, Extreme::AllMinusOne)?;
            let hi = solve_supermodular(&game, Extreme::AllPlusOne)?;
            if lo == hi {
                vec![lo]
            } else {
                vec![lo, hi]
            }
        }
        Method::Dnc => {
            let (psne, exact) = solve_divide_conquer(&game, &cfg, a.anytime_drop)?;
            stats["exact"] = exact.into();
            psne
        }
        Method::Auto => unreachable!("resolved above"),
    };
    stats["psne_found"] = psne.len().into();
    art.write(&a.out, psne_to_string(&psne))?;
    art.write(&stats_path, pretty(&stats)?)?;
    Ok(outcome)
}

fn parse_goal(spec: &str, n: usize, art: &mut Artifacts) -> Res<GoalSpec> {
    match spec.split_once('=') {
        None if spec == "max-adopters" => Ok(GoalSpec::MaxAdopters),
        Some(("target", file)) => {
            let mut v = load_psne(Path::new(file), art)?;
            if v.len() != 1 {
                return Err(CliError::Usage(format!("{file}: expected exactly one joint action, got {}", v.len())));
            }
            let x = v.remove(0);
            if x.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: x.len() }.into());
            }
            Ok(GoalSpec::TargetPsne(x))
        }
        Some(("weighted", file)) => Ok(GoalSpec::WeightedAdopters(load_vector(Path::new(file), art)?)),
        _ => Err(CliError::Usage(format!("unknown goal {spec:?}"))),
    }
}

fn parse_pref(spec: &str, art: &mut Artifacts) -> Res<SetPreference> {
    match spec.split_once('=') {
        None if spec == "min-card" => Ok(SetPreference::MinCardinality),
        Some(("weighted", file)) => Ok(SetPreference::WeightedNodes(load_vector(Path::new(file), art)?)),
        _ => Err(CliError::Usage(format!("unknown set preference {spec:?}"))),
    }
}

fn cmd_influential(a: &InfluentialArgs, art: &mut Artifacts) -> Res<Outcome> {
    let game = load_game(&a.game, art)?;
    let psne = game_psne(&game, a.psne.as_deref(), art)?;
    let goal = parse_goal(&a.goal, game.n(), art)?;
    let pref = parse_pref(&a.pref, art)?;
    let config = json!({
        "game": a.game, "psne": a.psne, "goal": a.goal, "pref": a.pref, "exact": a.exact,
        "explore_ties": a.explore_ties, "candidates": format!("{:?}", a.candidates), "counter": format!("{:?}", a.counter),
    });
    let report = if a.exact {
        let r = exact_most_influential(&game, &psne, &goal, &pref, None)?;
        json!({ "method": "exact", "labels": names(&game, &r.best), "psne_count": psne.len(), "result": r })
    } else {
        let cfg = GreedyConfig {
            candidates: match a.candidates {
                Candidates::All => CandidatePositions::All,
                Candidates::Adopters => CandidatePositions::Adopters,
            },
            explore_ties: a.explore_ties,
            ..GreedyConfig::default()
        };
        let r = match a.counter {
            CounterKind::List => greedy_most_influential(&game, &psne, &goal, &pref, &PsneListCounter(&psne), &cfg)?,
            CounterKind::Search => {
                let counter = SearchCounter { game: &game, config: SearchConfig::counting() };
                greedy_most_influential(&game, &psne, &goal, &pref, &counter, &cfg)?
            }
        };
        json!({ "method": "greedy", "labels": names(&game, &r.selected), "psne_count": psne.len(), "result": r })
    };
    art.write(&a.out, pretty(&report)?)?;
    Ok(Outcome { out: a.out.clone(), config })
}

fn load_party(path: &Path, game: &InfluenceGame, art: &mut Artifacts) -> Res<Vec<usize>> {
    art.input(path);
    let text = fs::read_to_string(path).map_err(|e| unreadable(path, e))?;
    let v: Vec<serde_json::Value> = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: expected a JSON array: {e}", path.display())))?;
    v.iter()
        .map(|e| match e {
            serde_json::Value::Number(k) => k.as_u64().map(|k| k as usize),
            serde_json::Value::String(s) => game.index_of(s),
            _ => None,
        })
        .map(|i| i.ok_or_else(|| CliError::Usage(format!("{}: unknown party member", path.display()))))
        .collect()
}

fn cmd_scenario(a: &ScenarioArgs, art: &mut Artifacts) -> Res<Outcome> {
    let game = load_game(&a.game, art)?;
    let party = a.party.as_deref().map(|p| load_party(p, &game, art)).transpose()?;
    let spec = ClotureSpec::new(a.quota, party, game.n())?;
    let config = json!({
        "game": a.game, "psne": a.psne, "quota": a.quota, "party": spec.party, "mode": a.mode,
        "exact": a.exact, "k_max": a.k_max, "subset_cap": a.subset_cap,
    });
    let report = match a.mode {
        Mode::Diffusion => {
            let hits = diffusion_filibuster(&game, &spec, a.k_max, a.subset_cap)?;
            let stable = hits.iter().filter(|h| h.outcome.stable).count();
            json!({ "mode": a.mode, "hits": hits.len(), "stable_hits": stable, "result": hits })
        }
        mode => {
            let psne = game_psne(&game, a.psne.as_deref(), art)?;
            let target = stable_cloture_set(&psne, &spec);
            let r = if mode == Mode::Break {
                filibuster_breakers(&game, &psne, &target, a.exact)?
            } else {
                cloture_preventers(&game, &psne, &target, a.exact)?
            };
            json!({
                "mode": mode, "psne_count": psne.len(), "stable_cloture": target.len(),
                "labels": names(&game, &r.players), "result": r,
            })
        }
    };
    art.write(&a.out, pretty(&report)?)?;
    Ok(Outcome { out: a.out.clone(), config })
}

fn cmd_learn(a: &LearnArgs, art: &mut Artifacts) -> Res<Outcome> {
    art.input(&a.votes);
    let f = fs::File::open(&a.votes).map_err(|e| unreadable(&a.votes, e))?;
    let (votes, ingest) = read_votes_csv(f, &court_code_map())?;
    let cfg = LearnConfig { l2_lambda: a.lambda, max_iters: a.max_iters, ..LearnConfig::default() };
    let (game, report) = learn_lig(&votes, &cfg)?;
    let rate = psne_representation_rate(&game, &votes)?;
    let summary = json!({
        "instances": votes.instances.len(), "representation_rate": rate, "converged": report.converged(),
        "max_grad_norm": report.max_grad_norm(), "ingest": ingest,
        "iterations": report.players.iter().map(|p| p.iterations).collect::<Vec<_>>(),
    });
    art.write(&a.out, game_to_json(&game))?;
    let report_path = a.report.clone().unwrap_or_else(|| manifest::sibling(&a.out, ".report.json"));
    art.write(&report_path, pretty(&summary)?)?;
    Ok(Outcome { out: a.out.clone(), config: json!({ "votes": a.votes, "learn": cfg }) })
}

fn cmd_bench(a: &BenchArgs, art: &mut Artifacts) -> Res<Outcome> {
    let flip_ps = if !a.flip_ps.is_empty() {
        a.flip_ps.clone()
    } else if a.suite == bench::Suite::PrefAttach {
        vec![1.0]
    } else {
        (0..=8).map(|k| k as f64 / 8.0).collect()
    };
    let trials = a.trials.unwrap_or(if a.suite == bench::Suite::PrefAttach { 20 } else { 100 });
    let cfg = bench::BenchConfig {
        suite: a.suite,
        trials,
        n: a.n,
        sizes: a.sizes.clone(),
        flip_ps,
        arc_p: a.arc_p,
        m: a.m,
        seed: a.seed,
    };
    let csv = bench::run(&cfg)?;
    art.seeds.push(a.seed);
    art.write(&a.out, csv)?;
    Ok(Outcome { out: a.out.clone(), config: serde_json::to_value(&cfg)? })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Generate(_) => "generate",
        Command::Solve(_) => "solve",
        Command::Influential(_) => "influential",
        Command::Scenario(_) => "scenario",
        Command::Learn(_) => "learn",
        Command::Bench(_) => "bench",
        Command::Replay { .. } => "replay",
    }
}

fn dispatch(c: &Command, art: &mut Artifacts) -> Res<Outcome> {
    match c {
        Command::Generate(a) => cmd_generate(a, art),
        Command::Solve(a) => cmd_solve(a, art),
        Command::Influential(a) => cmd_influential(a, art),
        Command::Scenario(a) => cmd_scenario(a, art),
        Command::Learn(a) => cmd_learn(a, art),
        Command::Bench(a) => cmd_bench(a, art),
        Command::Replay { .. } => Err(CliError::Usage("a manifest cannot replay another replay".into())),
    }
}

/// Runs a command and records its manifest, also when it fails after
/// writing outputs.
fn run_recorded(cli: &Cli, args: &[String]) -> Res<RunManifest> {
    let start = Instant::now();
    let mut art = Artifacts::default();
    let (result, out) = match dispatch(&cli.command, &mut art) {
        Ok(o) => (Ok(()), Some((o.out, o.config))),
        Err(e) => (Err(e), None),
    };
    let (main_out, config) = match out {
        Some(o) => o,
        None if !art.outputs.is_empty() => (art.outputs[0].clone(), serde_json::Value::Null),
        None => return Err(result.expect_err("no outcome without an error")),
    };
    let m = RunManifest {
        command: command_name(&cli.command).into(),
        args: args.to_vec(),
        cwd: std::env::current_dir()?,
        config,
        seeds: art.seeds.clone(),
        inputs: Artifacts::hashes(&art.inputs)?,
        outputs: Artifacts::hashes(&art.outputs)?,
        wall_time_ms: start.elapsed().as_millis() as u64,
        version: env!("CARGO_PKG_VERSION").into(),
    };
    let path = cli.manifest.clone().unwrap_or_else(|| manifest::default_path(&main_out));
    fs::write(&path, pretty(&m)?)?;
    result.map(|_| m)
}

fn replay(path: &Path) -> Res<()> {
    let recorded = manifest::read(path)?;
    std::env::set_current_dir(&recorded.cwd)?;
    let cli = parse(&recorded.args)?;
    let mut art = Artifacts::default();
    dispatch(&cli.command, &mut art)?;
    let inputs = Artifacts::hashes(&art.inputs)?;
    let outputs = Artifacts::hashes(&art.outputs)?;
    if inputs != recorded.inputs {
        return Err(CliError::Replay("inputs changed since the recorded run".into()));
    }
    if outputs != recorded.outputs {
        let diff: Vec<&String> =
            recorded.outputs.keys().filter(|k| outputs.get(*k) != recorded.outputs.get(*k)).collect();
        return Err(CliError::Replay(format!("outputs differ: {diff:?}")));
    }
    println!("{}", json!({ "replayed": recorded.command, "outputs": outputs.len(), "identical": true }));
    Ok(())
}

fn parse(args: &[String]) -> Res<Cli> {
    Cli::try_parse_from(std::iter::once("lig".to_string()).chain(args.iter().cloned()))
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse_from(std::env::args()) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(4);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    }
    let result = match &cli.command {
        Command::Replay { path } => replay(path),
        _ => run_recorded(&cli, &args).map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
