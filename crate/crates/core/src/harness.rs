//! Engine-vs-engine matches and rollout throughput measurement.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Move, Player, Position};
use crate::gtp::{format_vertex, parse_vertex, Engine, EngineConfig};
use crate::mcts::{Budget, SearchConfig, SearchTree, StopFlag};
use crate::playout::{self, derive_seed, estimate_dead_and_score, PlayoutConfig};
use crate::policy::{BuiltinEvaluator, ClientConfig, EvalError, Evaluator, PolicyResult, TcpEvaluator};
use crate::sgf::{self, GameRecord};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("engine failed: {0}")]
    Failed(String),
    #[error("engine returned an illegal move: {0}")]
    IllegalMove(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A player the harness can drive.
pub trait GameEngine: Send {
    fn name(&self) -> String;
    fn reset(&mut self, size: usize, komi: f32) -> Result<(), EngineError>;
    fn play(&mut self, color: Player, mv: Move) -> Result<(), EngineError>;
    /// Chooses a move for `color` and records it. `Move::Resign` gives up.
    fn genmove(&mut self, color: Player) -> Result<Move, EngineError>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    #[default]
    Mcts,
    Raw,
    Random,
    Gtp,
}

/// Engine description used by matches and the command line. Unset search
/// fields keep the search defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct EngineSpec {
    pub kind: EngineKind,
    pub name: Option<String>,
    pub rollouts: Option<usize>,
    pub threads: Option<usize>,
    pub sigma: Option<f64>,
    pub exploration: Option<f64>,
    pub topk: Option<usize>,
    pub min_moves: Option<usize>,
    pub threshold: Option<f64>,
    pub ladder: Option<bool>,
    pub virtual_loss: Option<bool>,
    pub tree_reuse: Option<bool>,
    pub resign_trials: Option<usize>,
    /// `builtin` or `tcp://host:port`.
    pub evaluator: Option<String>,
    /// Program and arguments for `kind = "gtp"`.
    pub command: Option<Vec<String>>,
}

impl EngineSpec {
    pub fn mcts(rollouts: usize) -> EngineSpec {
        EngineSpec { kind: EngineKind::Mcts, rollouts: Some(rollouts), ..Default::default() }
    }

    pub fn raw() -> EngineSpec {
        EngineSpec { kind: EngineKind::Raw, ..Default::default() }
    }

    pub fn random() -> EngineSpec {
        EngineSpec { kind: EngineKind::Random, ..Default::default() }
    }

    pub fn display_name(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        match self.kind {
            EngineKind::Mcts => format!(
                "mcts-{}rl-top{}",
                self.rollouts.unwrap_or(SearchConfig::default().rollouts),
                self.topk.unwrap_or(SearchConfig::default().max_children)
            ),
            EngineKind::Raw => "raw-policy".into(),
            EngineKind::Random => "random".into(),
            EngineKind::Gtp => self.command.as_ref().and_then(|c| c.first().cloned()).unwrap_or_else(|| "gtp".into()),
        }
    }

    /// Search configuration with the overrides applied.
    pub fn search_config(&self, komi: f32) -> SearchConfig {
        let d = SearchConfig::default();
        let mut cfg = SearchConfig {
            rollouts: self.rollouts.unwrap_or(d.rollouts),
            threads: self.threads.unwrap_or(d.threads),
            sigma: self.sigma.unwrap_or(d.sigma),
            exploration: self.exploration.unwrap_or(d.exploration),
            cumulative_threshold: self.threshold.unwrap_or(d.cumulative_threshold),
            max_children: self.topk.unwrap_or(d.max_children),
            min_children: self.min_moves.unwrap_or(d.min_children),
            komi,
            ladder: self.ladder.unwrap_or(d.ladder),
            virtual_loss: self.virtual_loss.unwrap_or(d.virtual_loss),
            tree_reuse: self.tree_reuse.unwrap_or(d.tree_reuse),
            ..d
        };
        if let Some(t) = self.resign_trials {
            cfg.resign.trials = t;
        }
        cfg
    }

    fn evaluator(&self) -> Result<Arc<dyn Evaluator>, EngineError> {
        make_evaluator(self.evaluator.as_deref().unwrap_or("builtin"))
    }

    /// Builds the engine; `seed` drives every random choice it makes.
    pub fn build(&self, seed: u64) -> Result<Box<dyn GameEngine>, EngineError> {
        Ok(match self.kind {
            EngineKind::Mcts => {
                let cfg = EngineConfig { search: self.search_config(7.5), seed, ..Default::default() };
                cfg.search.validate().map_err(EngineError::Failed)?;
                Box::new(MctsEngine { name: self.display_name(), engine: Engine::new(cfg, self.evaluator()?)? })
            }
            EngineKind::Raw => Box::new(RawPolicyEngine::new(self.evaluator()?)),
            EngineKind::Random => Box::new(RandomEngine::new(seed)),
            EngineKind::Gtp => {
                let cmd = self.command.clone().unwrap_or_default();
                Box::new(GtpProcess::spawn(&cmd)?)
            }
        })
    }
}

/// `builtin` or `tcp://host:port`.
pub fn make_evaluator(spec: &str) -> Result<Arc<dyn Evaluator>, EngineError> {
    if spec == "builtin" {
        return Ok(Arc::new(BuiltinEvaluator));
    }
    if spec.starts_with("tcp://") {
        return Ok(Arc::new(TcpEvaluator::connect(spec, ClientConfig::default())?));
    }
    Err(EngineError::Failed(format!("unknown evaluator {spec:?}")))
}

struct MctsEngine {
    name: String,
    engine: Engine,
}

impl GameEngine for MctsEngine {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn reset(&mut self, size: usize, komi: f32) -> Result<(), EngineError> {
        self.engine.clear(size);
        self.engine.set_komi(komi);
        Ok(())
    }

    fn play(&mut self, color: Player, mv: Move) -> Result<(), EngineError> {
        self.engine.play(color, mv).map_err(EngineError::IllegalMove)
    }

    fn genmove(&mut self, color: Player) -> Result<Move, EngineError> {
        self.engine.genmove(color).map_err(|e| EngineError::Failed(e.to_string()))
    }
}

/// Highest-probability policy move that does not fill one of our own eyes;
/// `Pass` if there is none.
pub fn raw_policy_move(pos: &Position, policy: &PolicyResult) -> Move {
    let me = pos.to_move();
    policy
        .moves()
        .find(|&mv| match mv {
            Move::Place(c) => !pos.is_true_eye(c, me) && pos.is_legal(mv),
            _ => false,
        })
        .unwrap_or(Move::Pass)
}

/// Plays the evaluator's top move without search.
pub struct RawPolicyEngine {
    evaluator: Arc<dyn Evaluator>,
    pos: Position,
}

impl RawPolicyEngine {
    pub fn new(evaluator: Arc<dyn Evaluator>) -> RawPolicyEngine {
        RawPolicyEngine { evaluator, pos: Position::new(19) }
    }
}

fn apply(pos: &mut Position, color: Player, mv: Move) -> Result<(), EngineError> {
    if pos.to_move() != color {
        pos.set_to_move(color);
    }
    pos.play_mut(mv).map_err(|e| EngineError::IllegalMove(format!("{mv:?}: {e}")))
}

impl GameEngine for RawPolicyEngine {
    fn name(&self) -> String {
        "raw-policy".into()
    }

    fn reset(&mut self, size: usize, _komi: f32) -> Result<(), EngineError> {
        self.pos = Position::new(size);
        Ok(())
    }

    fn play(&mut self, color: Player, mv: Move) -> Result<(), EngineError> {
        apply(&mut self.pos, color, mv)
    }

    fn genmove(&mut self, color: Player) -> Result<Move, EngineError> {
        if self.pos.to_move() != color {
            self.pos.set_to_move(color);
        }
        let policy = self.evaluator.evaluate(&self.pos, 0)?;
        let mv = raw_policy_move(&self.pos, &policy);
        apply(&mut self.pos, color, mv)?;
        Ok(mv)
    }
}

/// Uniformly random legal moves that do not fill own eyes.
pub struct RandomEngine {
    pos: Position,
    rng: ChaCha8Rng,
    cfg: PlayoutConfig,
}

impl RandomEngine {
    pub fn new(seed: u64) -> RandomEngine {
        let cfg = PlayoutConfig { patterns: false, atari: false, nakade: false, avoid_self_atari: false, ..Default::default() };
        RandomEngine { pos: Position::new(19), rng: ChaCha8Rng::seed_from_u64(seed), cfg }
    }
}

impl GameEngine for RandomEngine {
    fn name(&self) -> String {
        "random".into()
    }

    fn reset(&mut self, size: usize, _komi: f32) -> Result<(), EngineError> {
        self.pos = Position::new(size);
        Ok(())
    }

    fn play(&mut self, color: Player, mv: Move) -> Result<(), EngineError> {
        apply(&mut self.pos, color, mv)
    }

    fn genmove(&mut self, color: Player) -> Result<Move, EngineError> {
        if self.pos.to_move() != color {
            self.pos.set_to_move(color);
        }
        let mv = playout::default_policy_move(&self.pos, &self.cfg, &mut self.rng);
        apply(&mut self.pos, color, mv)?;
        Ok(mv)
    }
}

/// External engine speaking GTP on stdin/stdout.
pub struct GtpProcess {
    name: String,
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
    size: usize,
}

impl GtpProcess {
    pub fn spawn(command: &[String]) -> Result<GtpProcess, EngineError> {
        let (program, args) = command.split_first().ok_or_else(|| EngineError::Failed("empty GTP command".into()))?;
        let mut child = Command::new(program).args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        let mut p = GtpProcess { name: program.clone(), child, stdin, stdout, size: 19 };
        if let Ok(name) = p.send("name") {
            p.name = name;
        }
        Ok(p)
    }

    /// Sends one command and returns the response text.
    pub fn send(&mut self, command: &str) -> Result<String, EngineError> {
        writeln!(self.stdin, "{command}")?;
        self.stdin.flush()?;
        let mut response = String::new();
        loop {
            let mut line = String::new();
            if self.stdout.read_line(&mut line)? == 0 {
                return Err(EngineError::Failed(format!("engine exited during {command:?}")));
            }
            if line.trim().is_empty() {
                if response.is_empty() {
                    continue;
                }
                break;
            }
            response.push_str(&line);
        }
        let response = response.trim_end().to_string();
        if let Some(rest) = response.strip_prefix('=') {
            Ok(rest.trim_start_matches(|c: char| c.is_ascii_digit()).trim().to_string())
        } else {
            Err(EngineError::Failed(format!("{command:?} -> {response}")))
        }
    }
}

impl Drop for GtpProcess {
    fn drop(&mut self) {
        let _ = writeln!(self.stdin, "quit");
        let _ = self.stdin.flush();
        let deadline = Instant::now() + Duration::from_secs(2);
        while Instant::now() < deadline {
            if let Ok(Some(_)) = self.child.try_wait() {
                return;
            }
            std::thread::sleep(Duration::from_millis(10));
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn color_name(p: Player) -> &'static str {
    match p {
        Player::Black => "b",
        Player::White => "w",
    }
}

impl GameEngine for GtpProcess {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn reset(&mut self, size: usize, komi: f32) -> Result<(), EngineError> {
        self.size = size;
        self.send(&format!("boardsize {size}"))?;
        self.send("clear_board")?;
        self.send(&format!("komi {komi}"))?;
        Ok(())
    }

    fn play(&mut self, color: Player, mv: Move) -> Result<(), EngineError> {
        self.send(&format!("play {} {}", color_name(color), format_vertex(mv, self.size))).map(|_| ())
    }

    fn genmove(&mut self, color: Player) -> Result<Move, EngineError> {
        let reply = self.send(&format!("genmove {}", color_name(color)))?;
        parse_vertex(&reply, self.size).ok_or(EngineError::IllegalMove(reply))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub a: EngineSpec,
    pub b: EngineSpec,
    pub groups: usize,
    pub games_per_group: usize,
    pub board_size: usize,
    pub komi: f32,
    pub alternate_colors: bool,
    pub seed: u64,
    /// Plies sampled from the builtin policy softmax at the start of every
    /// game (one per side by default) so deterministic engines vary.
    pub opening_samples: usize,
    /// Games stop and are scored after this many moves.
    pub max_moves: usize,
    /// Playouts used to settle dead stones when scoring.
    pub score_trials: usize,
    /// Games played concurrently (0 = one per available core).
    pub parallel: usize,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            a: EngineSpec::mcts(1000),
            b: EngineSpec::raw(),
            groups: 1,
            games_per_group: 10,
            board_size: 9,
            komi: 7.5,
            alternate_colors: true,
            seed: 0,
            opening_samples: 2,
            max_moves: 0,
            score_trials: 100,
            parallel: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub index: usize,
    pub group: usize,
    pub seed: u64,
    /// `"a"` or `"b"`.
    pub black: String,
    pub winner: String,
    pub result: String,
    /// Black minus White (komi included) after dead-stone removal; absent on resignation or forfeit.
    pub margin: Option<f32>,
    pub moves: usize,
    pub forfeit: Option<String>,
    pub sgf: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub games: usize,
    pub a_wins: usize,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub a_name: String,
    pub b_name: String,
    pub config: MatchConfig,
    pub groups: Vec<GroupReport>,
    /// Win rate of engine A over all games.
    pub mean: f64,
    /// Standard deviation of the group means.
    pub std: f64,
    pub games: Vec<GameReport>,
    pub elapsed_secs: f64,
}

impl MatchReport {
    pub fn a_wins(&self) -> usize {
        self.groups.iter().map(|g| g.a_wins).sum()
    }

    pub fn total_games(&self) -> usize {
        self.groups.iter().map(|g| g.games).sum()
    }

    /// Writes `report.json` and one SGF per game into `dir`.
    pub fn write_to(&self, dir: &std::path::Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir.join("sgf"))?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(self).map_err(std::io::Error::other)?)?;
        for g in &self.games {
            std::fs::write(dir.join("sgf").join(format!("game-{:04}.sgf", g.index)), &g.sgf)?;
        }
        Ok(())
    }
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    (mean, var.sqrt())
}

/// Samples a move from the builtin policy softmax restricted to its top 300
/// entries, skipping own-eye fills.
pub fn sample_opening_move<R: Rng>(pos: &Position, rng: &mut R) -> Move {
    let policy = crate::policy::baseline_policy(pos);
    let me = pos.to_move();
    let support: Vec<(Move, f32)> = policy
        .entries()
        .iter()
        .take(300)
        .copied()
        .filter(|&(m, _)| m.coord().map_or(false, |c| !pos.is_true_eye(c, me)))
        .collect();
    let total: f64 = support.iter().map(|e| e.1 as f64).sum();
    if support.is_empty() || total <= 0.0 {
        return Move::Pass;
    }
    let mut x = rng.gen::<f64>() * total;
    for &(m, p) in &support {
        x -= p as f64;
        if x <= 0.0 {
            return m;
        }
    }
    support[support.len() - 1].0
}

struct Outcome {
    winner: Player,
    result: String,
    margin: Option<f32>,
    forfeit: Option<String>,
}

fn play_game(cfg: &MatchConfig, index: usize) -> GameReport {
    let group = index / cfg.games_per_group.max(1);
    let seed = derive_seed(cfg.seed, index as u64);
    let a_black = !cfg.alternate_colors || index % 2 == 0;
    let (black_spec, white_spec) = if a_black { (&cfg.a, &cfg.b) } else { (&cfg.b, &cfg.a) };
    let side = |black: bool| if black == a_black { "a" } else { "b" }.to_string();

    let mut record = GameRecord::new(cfg.board_size, cfg.komi);
    record.black_name = Some(black_spec.display_name());
    record.white_name = Some(white_spec.display_name());
    let mut pos = Position::new(cfg.board_size);
    let max_moves = if cfg.max_moves == 0 { 3 * pos.area() } else { cfg.max_moves };

    let finish = |record: &mut GameRecord, o: Outcome, moves: usize| -> GameReport {
        record.result = Some(o.result.clone());
        GameReport {
            index,
            group,
            seed,
            black: side(true),
            winner: side(o.winner == Player::Black),
            result: o.result,
            margin: o.margin,
            moves,
            forfeit: o.forfeit,
            sgf: sgf::serialize(record),
        }
    };
    let forfeit = |loser: Player, why: String| Outcome {
        winner: loser.opponent(),
        result: format!("{}+F", if loser == Player::Black { "W" } else { "B" }),
        margin: None,
        forfeit: Some(why),
    };

    let build = |spec: &EngineSpec, salt: u64| -> Result<Box<dyn GameEngine>, EngineError> {
        let mut e = spec.build(derive_seed(seed, salt))?;
        e.reset(cfg.board_size, cfg.komi)?;
        Ok(e)
    };
    let mut black = match build(black_spec, 1) {
        Ok(e) => e,
        Err(e) => return finish(&mut record, forfeit(Player::Black, e.to_string()), 0),
    };
    let mut white = match build(white_spec, 2) {
        Ok(e) => e,
        Err(e) => return finish(&mut record, forfeit(Player::White, e.to_string()), 0),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 3));
    let mut moves = 0;
    while moves < max_moves && !pos.is_game_over() {
        let color = pos.to_move();
        let (mover, other) = if color == Player::Black { (&mut black, &mut white) } else { (&mut white, &mut black) };
        let mv = if moves < cfg.opening_samples {
            let mv = sample_opening_move(&pos, &mut rng);
            if let Err(e) = mover.play(color, mv) {
                return finish(&mut record, forfeit(color, e.to_string()), moves);
            }
            mv
        } else {
            match mover.genmove(color) {
                Ok(mv) => mv,
                Err(e) => return finish(&mut record, forfeit(color, e.to_string()), moves),
            }
        };
        if mv == Move::Resign {
            let result = format!("{}+R", if color == Player::Black { "W" } else { "B" });
            return finish(
                &mut record,
                Outcome { winner: color.opponent(), result, margin: None, forfeit: None },
                moves,
            );
        }
        if let Err(e) = pos.play_mut(mv) {
            return finish(&mut record, forfeit(color, format!("illegal {mv:?}: {e}")), moves);
        }
        if let Err(e) = other.play(color, mv) {
            return finish(&mut record, forfeit(color.opponent(), e.to_string()), moves);
        }
        record.moves.push((color, mv));
        moves += 1;
    }
    let pcfg = PlayoutConfig { komi: cfg.komi, seed: derive_seed(seed, 4), ..Default::default() };
    let margin = estimate_dead_and_score(&pos, cfg.score_trials.max(1), &pcfg).score.margin;
    let winner = if margin > 0.0 { Player::Black } else { Player::White };
    let result = crate::gtp::format_score(margin);
    finish(&mut record, Outcome { winner, result, margin: Some(margin), forfeit: None }, moves)
}

/// Plays `groups x games_per_group` games between A and B, alternating
/// colours, and reports A's win rate per group with the spread of the group
/// means.
pub fn run_match(cfg: &MatchConfig) -> MatchReport {
    let start = Instant::now();
    let total = cfg.groups * cfg.games_per_group;
    let play_all = || (0..total).into_par_iter().map(|i| play_game(cfg, i)).collect::<Vec<_>>();
    let games = if cfg.parallel == 0 {
        play_all()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallel)
            .build()
            .map(|pool| pool.install(play_all))
            .unwrap_or_else(|_| play_all())
    };
    let groups: Vec<GroupReport> = (0..cfg.groups)
        .map(|g| {
            let in_group: Vec<&GameReport> = games.iter().filter(|r| r.group == g).collect();
            let a_wins = in_group.iter().filter(|r| r.winner == "a").count();
            GroupReport { games: in_group.len(), a_wins, mean: a_wins as f64 / in_group.len().max(1) as f64 }
        })
        .collect();
    let (_, std) = mean_std(&groups.iter().map(|g| g.mean).collect::<Vec<_>>());
    let a_wins: usize = groups.iter().map(|g| g.a_wins).sum();
    MatchReport {
        a_name: cfg.a.display_name(),
        b_name: cfg.b.display_name(),
        config: cfg.clone(),
        mean: a_wins as f64 / total.max(1) as f64,
        std,
        groups,
        games,
        elapsed_secs: start.elapsed().as_secs_f64(),
    }
}

/// Plays `games` quick self-play games with the default playout policy plus
/// policy-sampled openings and returns them as SGF records.
pub fn selfplay_corpus(games: usize, size: usize, seed: u64) -> Vec<GameRecord> {
    (0..games)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            let mut pos = Position::new(size);
            let mut record = GameRecord::new(size, 7.5);
            record.black_name = Some("darkgo-selfplay".into());
            record.white_name = Some("darkgo-selfplay".into());
            let cfg = PlayoutConfig::default();
            let openings = rng.gen_range(2..8);
            while !pos.is_game_over() && record.moves.len() < 3 * pos.area() {
                let mv = if record.moves.len() < openings {
                    sample_opening_move(&pos, &mut rng)
                } else {
                    playout::default_policy_move(&pos, &cfg, &mut rng)
                };
                record.moves.push((pos.to_move(), mv));
                pos.play_mut(mv).expect("generated moves are legal");
            }
            record.result = Some(crate::gtp::format_score(pos.tromp_taylor_score(7.5).margin));
            record
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub board_size: usize,
    pub threads: usize,
    pub seconds: f64,
    pub rollouts: usize,
    pub rollouts_per_sec: f64,
    /// Playouts per second on one thread without tree or evaluator.
    pub playouts_per_sec: f64,
    pub available_parallelism: usize,
}

/// A reproducible middle-game position: `moves` default-policy moves from an
/// empty board.
pub fn midgame_position(size: usize, moves: usize, seed: u64) -> Position {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos = Position::new(size);
    let cfg = PlayoutConfig::default();
    for _ in 0..moves {
        let mv = playout::default_policy_move(&pos, &cfg, &mut rng);
        pos.play_mut(mv).expect("default policy plays legal moves");
    }
    pos
}

/// Full select/expand/playout/backup cycles per second with the builtin
/// evaluator, from a reproducible middle-game position.
pub fn bench_rollouts(threads: usize, seconds: f64, size: usize) -> BenchReport {
    bench_search(&SearchConfig { threads: threads.max(1), ..Default::default() }, seconds, size)
}

/// [`bench_rollouts`] with an explicit search configuration.
pub fn bench_search(cfg: &SearchConfig, seconds: f64, size: usize) -> BenchReport {
    let pos = midgame_position(size, size * size / 4, 11);
    let tree = SearchTree::new(pos.clone());
    let stop = StopFlag::new();
    let duration = Duration::from_secs_f64(seconds);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let start = Instant::now();
    let outcome = std::thread::scope(|s| {
        s.spawn(|| {
            std::thread::sleep(duration);
            stop.stop();
        });
        tree.search(cfg, &BuiltinEvaluator, &mut rng, Budget::UntilStopped(&stop))
    })
    .expect("builtin evaluator never fails");
    let elapsed = start.elapsed().as_secs_f64();

    let pcfg = PlayoutConfig { komi: cfg.komi, ..Default::default() };
    let mut prng = ChaCha8Rng::seed_from_u64(6);
    let pstart = Instant::now();
    let mut playouts = 0usize;
    while pstart.elapsed() < duration.min(Duration::from_secs(1)) {
        playout::run_playout(&pos, &pcfg, &mut prng);
        playouts += 1;
    }
    BenchReport {
        board_size: size,
        threads: cfg.threads,
        seconds: elapsed,
        rollouts: outcome.rollouts,
        rollouts_per_sec: outcome.rollouts as f64 / elapsed,
        playouts_per_sec: playouts as f64 / pstart.elapsed().as_secs_f64(),
        available_parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
    }
}
