//! Shared-tree Monte Carlo search. Leaves are expanded with the top moves of
//! an [`Evaluator`], selection is UCT with uniform noise on the win rate, and
//! each rollout ends with one default-policy playout whose result is backed up
//! along the path.
//!
//! Statistics convention: a node's wins `m` count playouts won by the player
//! who made the move leading to the node, so a parent reads `m/n` of its
//! children directly from its own side's point of view. The rollout that
//! expands a node is counted in that node's visits, giving `n = 1 + sum(child n)`
//! for every expanded node.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicU32, AtomicU8, AtomicUsize, Ordering};
use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::board::{IllegalMove, Move, Player, Position};
use crate::ladder;
use crate::playout::{self, derive_seed, DeadStoneReport, PlayoutConfig};
use crate::policy::{select_expansion_set, EvalError, Evaluator, PolicyResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error(transparent)]
    Evaluator(#[from] EvalError),
    #[error("move {0:?} is not legal at the root")]
    IllegalRootMove(Move, IllegalMove),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResignConfig {
    /// Dead-stone trials run when the search looks lost or the opponent passed.
    pub trials: usize,
    /// Resign when every trial loses by at least this many points ...
    pub margin: f32,
    /// ... and the search win rate is below this.
    pub max_win_rate: f64,
}

impl Default for ResignConfig {
    fn default() -> Self {
        ResignConfig { trials: 1000, margin: 10.0, max_win_rate: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub rollouts: usize,
    pub threads: usize,
    /// Width of the uniform noise added to child win rates.
    pub sigma: f64,
    /// UCT exploration constant.
    pub exploration: f64,
    pub cumulative_threshold: f64,
    pub max_children: usize,
    pub min_children: usize,
    pub komi: f32,
    /// `(move_number, k)`: use `k` children once the game is past that move.
    pub move_switch: Option<(u32, usize)>,
    pub virtual_loss: bool,
    /// Force-include ladder captures and drop extensions into a lost ladder.
    pub ladder: bool,
    pub tree_reuse: bool,
    pub pondering: bool,
    pub resign: ResignConfig,
    pub playout: PlayoutConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            rollouts: 1000,
            threads: 1,
            sigma: 0.05,
            exploration: 1.0,
            cumulative_threshold: 0.8,
            max_children: 3,
            min_children: 1,
            komi: 7.5,
            move_switch: None,
            virtual_loss: false,
            ladder: true,
            tree_reuse: true,
            pondering: false,
            resign: ResignConfig::default(),
            playout: PlayoutConfig::default(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.rollouts == 0 {
            return Err("rollouts must be positive".into());
        }
        if self.threads == 0 {
            return Err("threads must be positive".into());
        }
        if !(0.0..1.0).contains(&self.sigma) {
            return Err("sigma must be in [0, 1)".into());
        }
        if !(self.cumulative_threshold > 0.0 && self.cumulative_threshold <= 1.0) {
            return Err("cumulative threshold must be in (0, 1]".into());
        }
        if self.min_children == 0 || self.max_children < self.min_children {
            return Err("need 1 <= min_children <= max_children".into());
        }
        if let Some((_, k)) = self.move_switch {
            if k < self.min_children {
                return Err("move switch width below min_children".into());
            }
        }
        Ok(())
    }

    fn children_at(&self, pos: &Position) -> usize {
        match self.move_switch {
            Some((after, k)) if pos.move_number() > after => k,
            _ => self.max_children,
        }
    }

    fn playout_config(&self) -> PlayoutConfig {
        PlayoutConfig { komi: self.komi, ..self.playout.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExpansionState {
    Unexpanded,
    PendingEvaluation,
    Expanded,
    /// Game over (two passes); visits accumulate without children.
    Terminal,
}

const UNEXPANDED: u8 = 0;
const PENDING: u8 = 1;
const EXPANDED: u8 = 2;
const TERMINAL: u8 = 3;

pub struct SearchNode {
    mv: Move,
    to_move: Player,
    rank: u16,
    prior: f32,
    visits: AtomicU32,
    wins: AtomicU32,
    virtual_loss: AtomicU32,
    state: AtomicU8,
    children: OnceLock<Box<[SearchNode]>>,
}

impl SearchNode {
    fn new(mv: Move, to_move: Player, rank: u16, prior: f32) -> SearchNode {
        SearchNode {
            mv,
            to_move,
            rank,
            prior,
            visits: AtomicU32::new(0),
            wins: AtomicU32::new(0),
            virtual_loss: AtomicU32::new(0),
            state: AtomicU8::new(UNEXPANDED),
            children: OnceLock::new(),
        }
    }

    /// The move leading to this node (`Pass` for a fresh root).
    pub fn mv(&self) -> Move {
        self.mv
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    /// Position of this child in its parent's policy order.
    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    pub fn prior(&self) -> f32 {
        self.prior
    }

    pub fn visits(&self) -> u32 {
        self.visits.load(Ordering::Acquire)
    }

    /// Playouts won by the player who moved into this node.
    pub fn wins(&self) -> u32 {
        self.wins.load(Ordering::Acquire)
    }

    pub fn win_rate(&self) -> f64 {
        let n = self.visits();
        if n == 0 {
            0.0
        } else {
            self.wins() as f64 / n as f64
        }
    }

    pub fn state(&self) -> ExpansionState {
        match self.state.load(Ordering::Acquire) {
            UNEXPANDED => ExpansionState::Unexpanded,
            PENDING => ExpansionState::PendingEvaluation,
            EXPANDED => ExpansionState::Expanded,
            _ => ExpansionState::Terminal,
        }
    }

    pub fn children(&self) -> &[SearchNode] {
        self.children.get().map_or(&[], |c| &c[..])
    }

    pub fn child(&self, mv: Move) -> Option<&SearchNode> {
        self.children().iter().find(|c| c.mv == mv)
    }

    /// Child with the most visits; ties go to the better policy rank.
    pub fn most_visited(&self) -> Option<&SearchNode> {
        let mut best: Option<&SearchNode> = None;
        for c in self.children() {
            if best.map_or(true, |b| c.visits() > b.visits()) {
                best = Some(c);
            }
        }
        best
    }
}

/// UCT choice among the children of an expanded node: unvisited children
/// first in policy order, otherwise the argmax of
/// `m/n + U[0, sigma] + c * sqrt(ln N / n)`, ties to the lower index.
pub fn uct_select<R: Rng>(node: &SearchNode, exploration: f64, sigma: f64, rng: &mut R) -> usize {
    select_child(node, exploration, sigma, false, rng)
}

fn select_child<R: Rng>(node: &SearchNode, c: f64, sigma: f64, virtual_loss: bool, rng: &mut R) -> usize {
    let children = node.children();
    debug_assert!(!children.is_empty());
    let vl = |ch: &SearchNode| if virtual_loss { ch.virtual_loss.load(Ordering::Relaxed) } else { 0 };
    let mut parent_n = node.visits() as u64;
    for (i, ch) in children.iter().enumerate() {
        let pending = vl(ch);
        if ch.visits() + pending == 0 {
            return i;
        }
        parent_n += pending as u64;
    }
    let log_n = (parent_n.max(1) as f64).ln();
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, ch) in children.iter().enumerate() {
        let n = (ch.visits() + vl(ch)) as f64;
        let mut score = ch.wins() as f64 / n + c * (log_n / n).sqrt();
        if sigma > 0.0 {
            score += rng.gen::<f64>() * sigma;
        }
        if score > best_score {
            best_score = score;
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChildStats {
    #[serde(rename = "move")]
    pub mv: String,
    pub rank: usize,
    pub prior: f32,
    pub visits: u32,
    pub wins: u32,
    pub win_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchSummary {
    pub move_number: u32,
    pub to_move: String,
    pub root_visits: u32,
    pub nodes: usize,
    pub children: Vec<ChildStats>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub best: Move,
    /// `m/n` of the chosen child from the searching side's point of view.
    pub win_rate: f64,
    pub rollouts: usize,
    pub elapsed: Duration,
    pub summary: SearchSummary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    PlayBest,
    Pass,
    Resign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditError {
    pub path: Vec<Move>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub nodes: usize,
    pub expanded: usize,
    pub terminal: usize,
    pub max_depth: usize,
}

/// Stops a pondering search from another thread.
#[derive(Debug, Default)]
pub struct StopFlag(AtomicBool);

impl StopFlag {
    pub fn new() -> StopFlag {
        StopFlag(AtomicBool::new(false))
    }

    pub fn stop(&self) {
        self.0.store(true, Ordering::Release);
    }

    pub fn is_stopped(&self) -> bool {
        self.0.load(Ordering::Acquire)
    }
}

#[derive(Clone, Copy)]
pub enum Budget<'a> {
    Rollouts(usize),
    UntilStopped(&'a StopFlag),
}

pub struct SearchTree {
    root_pos: Position,
    root: SearchNode,
}

impl SearchTree {
    pub fn new(pos: Position) -> SearchTree {
        let root = SearchNode::new(Move::Pass, pos.to_move(), 0, 1.0);
        SearchTree { root_pos: pos, root }
    }

    pub fn root(&self) -> &SearchNode {
        &self.root
    }

    pub fn root_position(&self) -> &Position {
        &self.root_pos
    }

    /// Makes the subtree under `played` the new root, keeping its statistics,
    /// or starts an empty tree if `played` was never expanded here.
    pub fn advance_root(mut self, played: Move) -> Result<SearchTree, SearchError> {
        let pos = self.root_pos.play(played).map_err(|e| SearchError::IllegalRootMove(played, e))?;
        let kept = self.root.children.take().and_then(|kids| {
            let mut kids = kids.into_vec();
            let i = kids.iter().position(|c| c.mv == played)?;
            Some(kids.swap_remove(i))
        });
        Ok(match kept {
            Some(node) if node.visits() > 0 => SearchTree { root_pos: pos, root: node },
            _ => SearchTree::new(pos),
        })
    }

    /// Runs rollouts on this tree with `cfg.threads` workers. Worker seeds
    /// are drawn from `rng`, so a single-threaded search with a fixed seed
    /// always builds the same tree.
    pub fn search<R: Rng>(
        &self,
        cfg: &SearchConfig,
        evaluator: &dyn Evaluator,
        rng: &mut R,
        budget: Budget<'_>,
    ) -> Result<SearchOutcome, SearchError> {
        debug_assert!(cfg.validate().is_ok(), "{:?}", cfg.validate());
        let start = Instant::now();
        let pcfg = cfg.playout_config();
        let shared = Shared {
            tree: self,
            cfg,
            pcfg: &pcfg,
            evaluator,
            claimed: AtomicUsize::new(0),
            completed: AtomicUsize::new(0),
            abort: AtomicBool::new(false),
            error: Mutex::new(None),
            budget,
        };
        let seeds: Vec<u64> = (0..cfg.threads.max(1)).map(|_| rng.gen()).collect();
        if !self.root_pos.is_game_over() {
            if seeds.len() == 1 {
                shared.worker(seeds[0]);
            } else {
                std::thread::scope(|s| {
                    for &seed in &seeds {
                        let shared = &shared;
                        s.spawn(move || shared.worker(seed));
                    }
                });
            }
        }
        if let Some(e) = shared.error.into_inner().expect("error slot poisoned") {
            return Err(e);
        }
        let best = self.root.most_visited();
        Ok(SearchOutcome {
            best: best.map_or(Move::Pass, |b| b.mv),
            win_rate: best.map_or(0.0, |b| b.win_rate()),
            rollouts: shared.completed.load(Ordering::Acquire),
            elapsed: start.elapsed(),
            summary: self.summary(),
        })
    }

    pub fn summary(&self) -> SearchSummary {
        let size = self.root_pos.size();
        SearchSummary {
            move_number: self.root_pos.move_number(),
            to_move: self.root_pos.to_move().to_string(),
            root_visits: self.root.visits(),
            nodes: self.node_count(),
            children: self
                .root
                .children()
                .iter()
                .map(|c| ChildStats {
                    mv: crate::gtp::format_vertex(c.mv, size),
                    rank: c.rank(),
                    prior: c.prior,
                    visits: c.visits(),
                    wins: c.wins(),
                    win_rate: c.win_rate(),
                })
                .collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        fn count(n: &SearchNode) -> usize {
            1 + n.children().iter().map(count).sum::<usize>()
        }
        count(&self.root)
    }

    /// Checks every node: `0 <= m <= n`, `n = 1 + sum(child n)` when
    /// expanded, child count within `[min_children, max]` and children legal.
    pub fn audit(&self, min_children: usize, max_children: usize) -> Result<AuditReport, AuditError> {
        let mut report = AuditReport::default();
        let mut path = Vec::new();
        audit_node(&self.root, &self.root_pos, min_children, max_children, 0, &mut path, &mut report)?;
        Ok(report)
    }

    /// Preorder dump of every node's move and statistics, for exact
    /// comparisons between runs.
    pub fn fingerprint(&self) -> String {
        fn walk(n: &SearchNode, depth: usize, size: usize, out: &mut String) {
            let _ = writeln!(
                out,
                "{} {} {} {} {:?}",
                depth,
                crate::gtp::format_vertex(n.mv, size),
                n.visits(),
                n.wins(),
                n.state()
            );
            for c in n.children() {
                walk(c, depth + 1, size, out);
            }
        }
        let mut out = String::new();
        walk(&self.root, 0, self.root_pos.size(), &mut out);
        out
    }
}

fn audit_node(
    node: &SearchNode,
    pos: &Position,
    min: usize,
    max: usize,
    depth: usize,
    path: &mut Vec<Move>,
    report: &mut AuditReport,
) -> Result<(), AuditError> {
    let fail = |path: &Vec<Move>, message: String| Err(AuditError { path: path.clone(), message });
    report.nodes += 1;
    report.max_depth = report.max_depth.max(depth);
    let (n, m) = (node.visits(), node.wins());
    if m > n {
        return fail(path, format!("wins {m} exceed visits {n}"));
    }
    if node.to_move != pos.to_move() {
        return fail(path, "side to move disagrees with the position".into());
    }
    match node.state() {
        ExpansionState::Expanded => {
            report.expanded += 1;
            let kids = node.children();
            let sum: u64 = kids.iter().map(|c| c.visits() as u64).sum();
            if n as u64 != 1 + sum {
                return fail(path, format!("visits {n} != 1 + {sum}"));
            }
            let only_pass = kids.len() == 1 && kids[0].mv == Move::Pass;
            if !only_pass && (kids.len() < min || kids.len() > max) {
                return fail(path, format!("{} children outside [{min}, {max}]", kids.len()));
            }
            for c in kids {
                let next = match pos.play(c.mv) {
                    Ok(p) => p,
                    Err(e) => return fail(path, format!("illegal child {:?}: {e}", c.mv)),
                };
                path.push(c.mv);
                audit_node(c, &next, min, max, depth + 1, path, report)?;
                path.pop();
            }
        }
        ExpansionState::Terminal => {
            report.terminal += 1;
            if !pos.is_game_over() {
                return fail(path, "terminal node in a live position".into());
            }
        }
        ExpansionState::Unexpanded => {
            if n != 0 {
                return fail(path, format!("unexpanded node has {n} visits"));
            }
        }
        ExpansionState::PendingEvaluation => return fail(path, "node left pending".into()),
    }
    Ok(())
}

struct Shared<'a> {
    tree: &'a SearchTree,
    cfg: &'a SearchConfig,
    pcfg: &'a PlayoutConfig,
    evaluator: &'a dyn Evaluator,
    claimed: AtomicUsize,
    completed: AtomicUsize,
    abort: AtomicBool,
    error: Mutex<Option<SearchError>>,
    budget: Budget<'a>,
}

impl Shared<'_> {
    fn claim(&self) -> bool {
        if self.abort.load(Ordering::Acquire) {
            return false;
        }
        match self.budget {
            Budget::Rollouts(n) => self.claimed.fetch_add(1, Ordering::AcqRel) < n,
            Budget::UntilStopped(flag) => !flag.is_stopped(),
        }
    }

    fn fail(&self, e: SearchError) {
        self.abort.store(true, Ordering::Release);
        let mut slot = self.error.lock().expect("error slot poisoned");
        slot.get_or_insert(e);
    }

    fn worker(&self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut path: Vec<&SearchNode> = Vec::with_capacity(64);
        while self.claim() {
            path.clear();
            match self.rollout(&mut rng, &mut path) {
                Ok(()) => {
                    self.completed.fetch_add(1, Ordering::AcqRel);
                }
                Err(e) => {
                    for n in &path {
                        if self.cfg.virtual_loss {
                            n.virtual_loss.fetch_sub(1, Ordering::AcqRel);
                        }
                    }
                    self.fail(e);
                    return;
                }
            }
        }
    }

    fn rollout<'t>(&'t self, rng: &mut ChaCha8Rng, path: &mut Vec<&'t SearchNode>) -> Result<(), SearchError> {
        let cfg = self.cfg;
        let mut pos = self.tree.root_pos.clone();
        let mut node = &self.tree.root;
        path.push(node);
        if cfg.virtual_loss {
            node.virtual_loss.fetch_add(1, Ordering::AcqRel);
        }
        loop {
            match node.state.load(Ordering::Acquire) {
                EXPANDED => {
                    let i = select_child(node, cfg.exploration, cfg.sigma, cfg.virtual_loss, rng);
                    let child = &node.children()[i];
                    match child.mv {
                        Move::Place(c) => pos.apply_place(c.point()),
                        _ => pos.apply_pass(),
                    }
                    if cfg.virtual_loss {
                        child.virtual_loss.fetch_add(1, Ordering::AcqRel);
                    }
                    path.push(child);
                    node = child;
                }
                TERMINAL => break,
                UNEXPANDED => {
                    if node
                        .state
                        .compare_exchange(UNEXPANDED, PENDING, Ordering::AcqRel, Ordering::Acquire)
                        .is_ok()
                    {
                        if pos.is_game_over() {
                            node.state.store(TERMINAL, Ordering::Release);
                        } else {
                            match self.expand(node, &pos) {
                                Ok(()) => node.state.store(EXPANDED, Ordering::Release),
                                Err(e) => {
                                    node.state.store(UNEXPANDED, Ordering::Release);
                                    return Err(e);
                                }
                            }
                        }
                        break;
                    }
                }
                _ => {
                    if self.abort.load(Ordering::Acquire) {
                        return Err(self.error.lock().expect("error slot poisoned").clone().unwrap_or(
                            SearchError::Evaluator(EvalError::Unavailable("search aborted".into())),
                        ));
                    }
                    std::thread::yield_now();
                }
            }
        }

        if !pos.is_game_over() {
            playout::play_out(&mut pos, self.pcfg, rng);
        }
        let black_wins = pos.tromp_taylor_score(cfg.komi).margin > 0.0;
        for n in path.iter() {
            // n.to_move is the side to move at n; the mover into n is the other one
            let mover_is_black = n.to_move == Player::White;
            n.visits.fetch_add(1, Ordering::AcqRel);
            if mover_is_black == black_wins {
                n.wins.fetch_add(1, Ordering::AcqRel);
            }
            if cfg.virtual_loss {
                n.virtual_loss.fetch_sub(1, Ordering::AcqRel);
            }
        }
        Ok(())
    }

    fn expand(&self, node: &SearchNode, pos: &Position) -> Result<(), SearchError> {
        let policy = self.evaluator.evaluate(pos, 0)?;
        let moves = expansion_moves(pos, &policy, self.cfg);
        let next = pos.to_move().opponent();
        let kids: Vec<SearchNode> = moves
            .into_iter()
            .map(|(mv, rank, prior)| SearchNode::new(mv, next, rank as u16, prior))
            .collect();
        node.children.set(kids.into_boxed_slice()).map_err(|_| {
            SearchError::Evaluator(EvalError::Protocol("node expanded twice".into()))
        })?;
        Ok(())
    }
}

/// Children for a leaf: the shortest policy prefix reaching the cumulative
/// threshold (clipped to the configured width) after dropping own-eye fills
/// and, with ladder reading on, extensions into a lost ladder. Ladder
/// captures are then forced in. `Pass` alone when nothing remains.
/// Returns `(move, policy rank, prior)`.
pub fn expansion_moves(pos: &Position, policy: &PolicyResult, cfg: &SearchConfig) -> Vec<(Move, usize, f32)> {
    let me = pos.to_move();
    let demoted = if cfg.ladder { ladder::losing_ladder_escapes(pos) } else { Vec::new() };
    let kept: Vec<(Move, f32)> = policy
        .entries()
        .iter()
        .copied()
        .filter(|&(mv, _)| match mv {
            Move::Place(c) => !pos.is_true_eye(c, me) && !demoted.contains(&mv),
            _ => false,
        })
        .collect();
    if kept.is_empty() {
        return vec![(Move::Pass, 0, 1.0)];
    }
    let max = cfg.children_at(pos).max(cfg.min_children);
    let filtered = PolicyResult::new(kept, pos.size());
    let mut set = select_expansion_set(&filtered, cfg.cumulative_threshold, max, cfg.min_children);
    if cfg.ladder {
        for cap in ladder::ladder_captures(pos) {
            if set.contains(&cap) || !filtered.moves().any(|m| m == cap) {
                continue;
            }
            if set.len() >= max {
                set.pop();
            }
            set.push(cap);
        }
    }
    let rank = |mv: Move| policy.moves().position(|m| m == mv).unwrap_or(usize::MAX);
    let mut out: Vec<(Move, usize, f32)> =
        set.into_iter().map(|mv| (mv, rank(mv), policy.probability(mv).unwrap_or(0.0))).collect();
    out.sort_by_key(|e| e.1);
    out
}

/// Fresh-tree search from `root_pos` for `cfg.rollouts` rollouts.
pub fn run_search<R: Rng>(
    root_pos: &Position,
    cfg: &SearchConfig,
    evaluator: &dyn Evaluator,
    rng: &mut R,
) -> Result<SearchOutcome, SearchError> {
    SearchTree::new(root_pos.clone()).search(cfg, evaluator, rng, Budget::Rollouts(cfg.rollouts))
}

/// Whether the dead-stone estimate should run after a search.
pub fn needs_dead_stone_check(outcome: &SearchOutcome, opponent_passed: bool, cfg: &ResignConfig) -> bool {
    opponent_passed || outcome.win_rate < cfg.max_win_rate
}

/// Resign when every trial loses by the resign margin and the search agrees
/// the game is lost; pass when the opponent passed and the cleaned-board
/// score is a win for `me`; otherwise play the search's move.
pub fn decide_resign_or_pass(
    outcome: &SearchOutcome,
    report: Option<&DeadStoneReport>,
    me: Player,
    opponent_passed: bool,
    cfg: &ResignConfig,
) -> Decision {
    let Some(report) = report else { return Decision::PlayBest };
    if outcome.win_rate < cfg.max_win_rate && report.all_trials_lose_by(me, cfg.margin) {
        return Decision::Resign;
    }
    if opponent_passed && report.margin_for(me) > 0.0 {
        return Decision::Pass;
    }
    Decision::PlayBest
}

/// Rollouts per worker index derived from a master seed, for callers that
/// want per-search reproducibility without threading an rng through.
pub fn search_rng(seed: u64, move_number: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, move_number as u64))
}
