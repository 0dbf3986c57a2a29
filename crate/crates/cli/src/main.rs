use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use darkgo::gtp::{serve, Engine, EngineConfig};
use darkgo::harness::{self, make_evaluator, EngineSpec, MatchConfig};
use darkgo::mcts::SearchConfig;
use darkgo::playout::PlayoutConfig;
use darkgo::sgf;

#[derive(Parser)]
#[command(name = "darkgo", version, about = "Go engine: policy-guided Monte Carlo tree search")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Speak GTP on stdin/stdout.
    Gtp(GtpArgs),
    /// Play a match between two engines.
    Match(MatchArgs),
    /// Measure rollouts per second.
    Bench(BenchArgs),
    /// Write quick self-play games as SGF files.
    Selfplay(SelfplayArgs),
}

#[derive(Parser)]
struct GtpArgs {
    #[arg(long, default_value_t = 1000)]
    rollouts: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    /// Maximum children per expanded node.
    #[arg(long, default_value_t = 3)]
    topk: usize,
    #[arg(long, default_value_t = 1)]
    min_moves: usize,
    /// Cumulative policy probability covered by an expansion.
    #[arg(long, default_value_t = 0.8)]
    threshold: f64,
    #[arg(long, default_value_t = 7.5)]
    komi: f32,
    /// `builtin` or `tcp://host:port`.
    #[arg(long, default_value = "builtin")]
    evaluator: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    ponder: bool,
    /// Feature planes requested from a remote evaluator.
    #[arg(long, default_value = "extended")]
    feature_set: darkgo::features::FeatureSet,
    /// Append one JSON line per search to this file.
    #[arg(long)]
    log_search: Option<PathBuf>,
    #[arg(long, default_value_t = 19)]
    size: usize,
    /// Disable ladder reading in the tree.
    #[arg(long)]
    no_ladder: bool,
    #[arg(long)]
    virtual_loss: bool,
    /// Dead-stone trials for resignation, passing and final_score.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
}

#[derive(Parser)]
struct MatchArgs {
    /// Engine A: TOML file or inline `key=value,...`.
    #[arg(long)]
    a: String,
    /// Engine B: TOML file or inline `key=value,...`.
    #[arg(long)]
    b: String,
    #[arg(long, default_value_t = 1)]
    groups: usize,
    #[arg(long, default_value_t = 10)]
    games: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 9)]
    size: usize,
    #[arg(long, default_value_t = 7.5)]
    komi: f32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Concurrent games (0 = one per core).
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    #[arg(long, default_value_t = 100)]
    score_trials: usize,
    #[arg(long, default_value_t = 2)]
    opening_samples: usize,
    /// Keep colours fixed (A always Black).
    #[arg(long)]
    no_alternate: bool,
}

#[derive(Parser)]
struct BenchArgs {
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 5.0)]
    seconds: f64,
    #[arg(long, default_value_t = 19)]
    size: usize,
    #[arg(long, default_value_t = 3)]
    topk: usize,
    #[arg(long)]
    no_ladder: bool,
}

#[derive(Parser)]
struct SelfplayArgs {
    #[arg(long, default_value_t = 100)]
    games: usize,
    #[arg(long, default_value_t = 9)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Reads an engine spec from a TOML file, or parses `key=value,...`.
fn engine_spec(text: &str) -> Result<EngineSpec> {
    let path = Path::new(text);
    if path.is_file() {
        let body = std::fs::read_to_string(path).with_context(|| format!("reading {text}"))?;
        return toml::from_str(&body).with_context(|| format!("parsing {text}"));
    }
    let mut table = toml::Table::new();
    for pair in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let Some((key, value)) = pair.split_once('=') else {
            bail!("expected key=value, got {pair:?}");
        };
        let (key, value) = (key.trim(), value.trim());
        let parsed = if key == "command" {
            toml::Value::Array(value.split_whitespace().map(|s| toml::Value::String(s.into())).collect())
        } else if let Ok(i) = value.parse::<i64>() {
            toml::Value::Integer(i)
        } else if let Ok(f) = value.parse::<f64>() {
            toml::Value::Float(f)
        } else if let Ok(b) = value.parse::<bool>() {
            toml::Value::Boolean(b)
        } else {
            toml::Value::String(value.into())
        };
        table.insert(key.into(), parsed);
    }
    toml::Value::Table(table).try_into().with_context(|| format!("invalid engine spec {text:?}"))
}

fn run_gtp(args: GtpArgs) -> Result<()> {
    let mut search = SearchConfig {
        rollouts: args.rollouts,
        threads: args.threads,
        sigma: args.sigma,
        max_children: args.topk,
        min_children: args.min_moves,
        cumulative_threshold: args.threshold,
        komi: args.komi,
        pondering: args.ponder,
        ladder: !args.no_ladder,
        virtual_loss: args.virtual_loss,
        playout: PlayoutConfig { komi: args.komi, ..Default::default() },
        ..Default::default()
    };
    search.resign.trials = args.trials;
    search.validate().map_err(anyhow::Error::msg)?;
    let evaluator = if args.evaluator == "builtin" {
        make_evaluator("builtin")?
    } else {
        let cfg = darkgo::policy::ClientConfig { feature_set: args.feature_set, ..Default::default() };
        Arc::new(darkgo::policy::TcpEvaluator::connect(&args.evaluator, cfg)?)
    };
    let cfg = EngineConfig { search, seed: args.seed, board_size: args.size, log_search: args.log_search };
    let mut engine = Engine::new(cfg, evaluator)?;
    let stdin = io::stdin();
    serve(&mut engine, stdin.lock(), BufWriter::new(io::stdout().lock()))?;
    Ok(())
}

fn run_match(args: MatchArgs) -> Result<()> {
    let cfg = MatchConfig {
        a: engine_spec(&args.a)?,
        b: engine_spec(&args.b)?,
        groups: args.groups,
        games_per_group: args.games,
        board_size: args.size,
        komi: args.komi,
        alternate_colors: !args.no_alternate,
        seed: args.seed,
        opening_samples: args.opening_samples,
        score_trials: args.score_trials,
        parallel: args.parallel,
        ..Default::default()
    };
    let report = harness::run_match(&cfg);
    for (i, g) in report.groups.iter().enumerate() {
        println!("group {i}: {}/{} ({:.3})", g.a_wins, g.games, g.mean);
    }
    println!(
        "{} vs {}: {:.3} +- {:.3} over {} games ({:.1}s)",
        report.a_name,
        report.b_name,
        report.mean,
        report.std,
        report.total_games(),
        report.elapsed_secs
    );
    let forfeits = report.games.iter().filter(|g| g.forfeit.is_some()).count();
    if forfeits > 0 {
        println!("{forfeits} games forfeited");
    }
    if let Some(dir) = args.out {
        report.write_to(&dir).with_context(|| format!("writing {}", dir.display()))?;
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<()> {
    let cfg = SearchConfig { threads: args.threads, max_children: args.topk, ladder: !args.no_ladder, ..Default::default() };
    cfg.validate().map_err(anyhow::Error::msg)?;
    let r = harness::bench_search(&cfg, args.seconds, args.size);
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(())
}

fn run_selfplay(args: SelfplayArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    for (i, rec) in harness::selfplay_corpus(args.games, args.size, args.seed).iter().enumerate() {
        std::fs::write(args.out.join(format!("game-{i:03}.sgf")), sgf::serialize(rec))?;
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Cmd::Gtp(a) => run_gtp(a),
        Cmd::Match(a) => run_match(a),
        Cmd::Bench(a) => run_bench(a),
        Cmd::Selfplay(a) => run_selfplay(a),
    }
}
