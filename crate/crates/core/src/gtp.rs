//! GTP version 2 front end.

use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;
use std::thread::JoinHandle;

use serde::Serialize;

use crate::board::{Coord, Move, Player, Position, MAX_SIZE};
use crate::mcts::{
    decide_resign_or_pass, needs_dead_stone_check, search_rng, Budget, Decision, SearchConfig, SearchError, SearchSummary,
    SearchTree, StopFlag,
};
use crate::playout::{derive_seed, estimate_dead_and_score, PlayoutConfig};
use crate::policy::Evaluator;

const COLUMNS: &[u8] = b"ABCDEFGHJKLMNOPQRSTUVWXYZ";

const COMMANDS: &[&str] = &[
    "protocol_version",
    "name",
    "version",
    "known_command",
    "list_commands",
    "boardsize",
    "clear_board",
    "komi",
    "play",
    "genmove",
    "final_score",
    "undo",
    "showboard",
    "time_settings",
    "time_left",
    "kgs-time_settings",
    "quit",
];

/// GTP vertex for `mv` (`pass`, `resign`, or letter + row with I skipped).
pub fn format_vertex(mv: Move, size: usize) -> String {
    match mv {
        Move::Pass => "pass".to_string(),
        Move::Resign => "resign".to_string(),
        Move::Place(c) => format!("{}{}", COLUMNS[c.col as usize] as char, size - c.row as usize),
    }
}

pub fn parse_vertex(text: &str, size: usize) -> Option<Move> {
    let t = text.to_ascii_uppercase();
    match t.as_str() {
        "PASS" => return Some(Move::Pass),
        "RESIGN" => return Some(Move::Resign),
        _ => {}
    }
    let mut chars = t.chars();
    let letter = chars.next()? as u8;
    let col = COLUMNS.iter().position(|&l| l == letter)?;
    let number: usize = chars.as_str().parse().ok()?;
    if col >= size || number == 0 || number > size {
        return None;
    }
    Some(Move::Place(Coord::new(col as u8, (size - number) as u8)))
}

pub fn parse_color(text: &str) -> Option<Player> {
    match text.to_ascii_lowercase().as_str() {
        "b" | "black" => Some(Player::Black),
        "w" | "white" => Some(Player::White),
        _ => None,
    }
}

/// `B+3.5`, `W+12` or `0` for a Black-minus-White margin.
pub fn format_score(margin: f32) -> String {
    if margin > 0.0 {
        format!("B+{margin}")
    } else if margin < 0.0 {
        format!("W+{}", -margin)
    } else {
        "0".to_string()
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub search: SearchConfig,
    pub seed: u64,
    pub board_size: usize,
    pub log_search: Option<PathBuf>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { search: SearchConfig::default(), seed: 0, board_size: 19, log_search: None }
    }
}

#[derive(Serialize)]
struct SearchLogRecord<'a> {
    search: u64,
    best: String,
    decision: &'a str,
    win_rate: f64,
    rollouts: usize,
    elapsed_ms: f64,
    #[serde(flatten)]
    summary: &'a SearchSummary,
}

struct Ponder {
    stop: Arc<StopFlag>,
    handle: JoinHandle<Option<SearchTree>>,
}

/// Game state plus search, driven by GTP commands or directly.
pub struct Engine {
    cfg: EngineConfig,
    evaluator: Arc<dyn Evaluator>,
    komi: f32,
    history: Vec<Position>,
    tree: Option<SearchTree>,
    searches: u64,
    log: Option<BufWriter<File>>,
    ponder: Option<Ponder>,
    last_summary: Option<SearchSummary>,
}

impl Engine {
    pub fn new(cfg: EngineConfig, evaluator: Arc<dyn Evaluator>) -> io::Result<Engine> {
        let log = match &cfg.log_search {
            Some(path) => Some(BufWriter::new(File::create(path)?)),
            None => None,
        };
        let size = cfg.board_size;
        let komi = cfg.search.komi;
        Ok(Engine {
            cfg,
            evaluator,
            komi,
            history: vec![Position::new(size)],
            tree: None,
            searches: 0,
            log,
            ponder: None,
            last_summary: None,
        })
    }

    pub fn position(&self) -> &Position {
        self.history.last().expect("history is never empty")
    }

    pub fn komi(&self) -> f32 {
        self.komi
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn last_summary(&self) -> Option<&SearchSummary> {
        self.last_summary.as_ref()
    }

    pub fn set_komi(&mut self, komi: f32) {
        self.komi = komi;
        self.cfg.search.komi = komi;
        self.tree = None;
    }

    pub fn clear(&mut self, size: usize) {
        self.cfg.board_size = size;
        self.history = vec![Position::new(size)];
        self.tree = None;
    }

    /// Plays `mv` for `color`; a move out of turn switches the side to move.
    pub fn play(&mut self, color: Player, mv: Move) -> Result<(), String> {
        if mv == Move::Resign {
            return Err("cannot play resign".into());
        }
        let mut pos = self.position().clone();
        if pos.to_move() != color {
            pos.set_to_move(color);
            self.tree = None;
        }
        pos.play_mut(mv).map_err(|e| format!("illegal move ({e})"))?;
        self.history.push(pos);
        Ok(())
    }

    pub fn undo(&mut self) -> Result<(), String> {
        if self.history.len() <= 1 {
            return Err("cannot undo".into());
        }
        self.history.pop();
        self.tree = None;
        Ok(())
    }

    /// Tree rooted at the current position, reusing the previous search when
    /// the current position lies below its root.
    fn take_tree(&mut self) -> SearchTree {
        let pos = self.position().clone();
        let Some(mut tree) = self.tree.take().filter(|_| self.cfg.search.tree_reuse) else {
            return SearchTree::new(pos);
        };
        let start = tree.root_position().move_number() as usize;
        let target = pos.move_number() as usize;
        if target < start || target - start >= self.history.len() {
            return SearchTree::new(pos);
        }
        let first = self.history.len() - 1 - (target - start);
        if self.history[first].hash() != tree.root_position().hash() {
            return SearchTree::new(pos);
        }
        for p in &self.history[first + 1..] {
            let Some(mv) = p.last_move() else { return SearchTree::new(pos) };
            tree = match tree.advance_root(mv) {
                Ok(t) => t,
                Err(_) => return SearchTree::new(pos),
            };
        }
        if tree.root_position().hash() == pos.hash() {
            tree
        } else {
            SearchTree::new(pos)
        }
    }

    /// Searches, decides between the best move, pass and resignation, and
    /// plays the result (unless resigning).
    pub fn genmove(&mut self, color: Player) -> Result<Move, SearchError> {
        if self.position().to_move() != color {
            let mut pos = self.position().clone();
            pos.set_to_move(color);
            self.history.push(pos);
            self.tree = None;
        }
        let pos = self.position().clone();
        let index = self.searches;
        self.searches += 1;
        let tree = self.take_tree();
        let scfg = &self.cfg.search;
        let mut rng = search_rng(self.cfg.seed, index as u32);
        let outcome = tree.search(scfg, &*self.evaluator, &mut rng, Budget::Rollouts(scfg.rollouts))?;
        let opponent_passed = pos.last_move() == Some(Move::Pass);
        let report = needs_dead_stone_check(&outcome, opponent_passed, &scfg.resign).then(|| {
            let pcfg = PlayoutConfig { komi: self.komi, seed: derive_seed(self.cfg.seed, index), ..scfg.playout.clone() };
            estimate_dead_and_score(&pos, scfg.resign.trials.max(1), &pcfg)
        });
        let decision = decide_resign_or_pass(&outcome, report.as_ref(), color, opponent_passed, &scfg.resign);
        let mv = match decision {
            Decision::PlayBest => outcome.best,
            Decision::Pass => Move::Pass,
            Decision::Resign => Move::Resign,
        };
        if let Some(log) = &mut self.log {
            let record = SearchLogRecord {
                search: index,
                best: format_vertex(mv, pos.size()),
                decision: match decision {
                    Decision::PlayBest => "play",
                    Decision::Pass => "pass",
                    Decision::Resign => "resign",
                },
                win_rate: outcome.win_rate,
                rollouts: outcome.rollouts,
                elapsed_ms: outcome.elapsed.as_secs_f64() * 1000.0,
                summary: &outcome.summary,
            };
            if let Ok(line) = serde_json::to_string(&record) {
                let _ = writeln!(log, "{line}");
                let _ = log.flush();
            }
        }
        self.last_summary = Some(outcome.summary);
        if mv != Move::Resign {
            let next = pos.play(mv).unwrap_or_else(|_| pos.play(Move::Pass).expect("pass is always legal"));
            let played = next.last_move().unwrap_or(Move::Pass);
            self.history.push(next);
            self.tree = tree.advance_root(played).ok();
            return Ok(played);
        }
        self.tree = Some(tree);
        Ok(mv)
    }

    /// Dead-stone-adjusted Tromp-Taylor margin of the current position.
    pub fn final_score(&self) -> f32 {
        let pcfg = PlayoutConfig { komi: self.komi, seed: self.cfg.seed, ..self.cfg.search.playout.clone() };
        estimate_dead_and_score(self.position(), self.cfg.search.resign.trials.max(1), &pcfg).score.margin
    }

    fn start_pondering(&mut self) {
        if !self.cfg.search.pondering || self.ponder.is_some() || self.position().is_game_over() {
            return;
        }
        let tree = self.take_tree();
        let stop = Arc::new(StopFlag::new());
        let flag = stop.clone();
        let evaluator = self.evaluator.clone();
        let cfg = self.cfg.search.clone();
        let mut rng = search_rng(self.cfg.seed ^ 0x5eed, self.searches as u32);
        let handle = std::thread::spawn(move || {
            let result = tree.search(&cfg, &*evaluator, &mut rng, Budget::UntilStopped(&*flag));
            result.ok().map(|_| tree)
        });
        self.ponder = Some(Ponder { stop, handle });
    }

    fn stop_pondering(&mut self) {
        if let Some(p) = self.ponder.take() {
            p.stop.stop();
            self.tree = p.handle.join().ok().flatten();
        }
    }
}

impl Drop for Engine {
    fn drop(&mut self) {
        self.stop_pondering();
    }
}

enum Reply {
    Ok(String),
    Err(String),
    Quit,
}

fn handle(engine: &mut Engine, command: &str, args: &[&str]) -> Reply {
    let size = engine.position().size();
    match command {
        "protocol_version" => Reply::Ok("2".into()),
        "name" => Reply::Ok("darkgo".into()),
        "version" => Reply::Ok(env!("CARGO_PKG_VERSION").into()),
        "known_command" => Reply::Ok(args.first().map_or(false, |c| COMMANDS.contains(c)).to_string()),
        "list_commands" => Reply::Ok(COMMANDS.join("\n")),
        "boardsize" => match args.first().and_then(|a| a.parse::<usize>().ok()) {
            Some(n) if (2..=MAX_SIZE).contains(&n) => {
                engine.clear(n);
                Reply::Ok(String::new())
            }
            Some(_) => Reply::Err("unacceptable size".into()),
            None => Reply::Err("syntax error".into()),
        },
        "clear_board" => {
            engine.clear(size);
            Reply::Ok(String::new())
        }
        "komi" => match args.first().and_then(|a| a.parse::<f32>().ok()) {
            Some(k) if k.is_finite() => {
                engine.set_komi(k);
                Reply::Ok(String::new())
            }
            _ => Reply::Err("syntax error".into()),
        },
        "play" => {
            let (Some(color), Some(mv)) = (
                args.first().and_then(|a| parse_color(a)),
                args.get(1).and_then(|a| parse_vertex(a, size)),
            ) else {
                return Reply::Err("invalid color or coordinate".into());
            };
            match engine.play(color, mv) {
                Ok(()) => Reply::Ok(String::new()),
                Err(_) => Reply::Err("illegal move".into()),
            }
        }
        "genmove" => {
            let Some(color) = args.first().and_then(|a| parse_color(a)) else {
                return Reply::Err("invalid color".into());
            };
            match engine.genmove(color) {
                Ok(mv) => Reply::Ok(format_vertex(mv, size)),
                Err(e) => Reply::Err(format!("search failed: {e}")),
            }
        }
        "final_score" => Reply::Ok(format_score(engine.final_score())),
        "undo" => match engine.undo() {
            Ok(()) => Reply::Ok(String::new()),
            Err(e) => Reply::Err(e),
        },
        "showboard" => Reply::Ok(format!("\n{}", engine.position().to_ascii().trim_end())),
        "time_settings" | "time_left" | "kgs-time_settings" => Reply::Ok(String::new()),
        "quit" => Reply::Quit,
        _ => Reply::Err("unknown command".into()),
    }
}

/// Strips comments and control characters as GTP requires.
fn clean_line(raw: &str) -> String {
    let without_comment = raw.split('#').next().unwrap_or("");
    without_comment
        .chars()
        .filter_map(|c| match c {
            '\t' => Some(' '),
            c if c.is_control() => None,
            c => Some(c),
        })
        .collect::<String>()
        .trim()
        .to_string()
}

/// Reads commands from `input` until `quit` or end of input.
pub fn serve<R: BufRead, W: Write>(engine: &mut Engine, input: R, mut output: W) -> io::Result<()> {
    let mut lines = input.lines();
    loop {
        engine.start_pondering();
        let next = lines.next();
        engine.stop_pondering();
        let Some(line) = next else { break };
        let line = clean_line(&line?);
        if line.is_empty() {
            continue;
        }
        let mut tokens: Vec<&str> = line.split_whitespace().collect();
        let id = tokens[0].parse::<u64>().ok().map(|id| {
            tokens.remove(0);
            id.to_string()
        });
        let id = id.unwrap_or_default();
        let Some((&command, args)) = tokens.split_first() else {
            write!(output, "?{id} syntax error\n\n")?;
            output.flush()?;
            continue;
        };
        match handle(engine, command, args) {
            Reply::Ok(text) => write!(output, "={id} {text}\n\n")?,
            Reply::Err(text) => write!(output, "?{id} {text}\n\n")?,
            Reply::Quit => {
                write!(output, "={id} \n\n")?;
                output.flush()?;
                break;
            }
        }
        output.flush()?;
    }
    Ok(())
}
