//! Oracle suites shared by the per-module integration tests and the
//! acceptance runner. Each returns a one-line summary or the first mismatch.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use darkgo::features::{extract, transform_position, FeatureSet, Symmetry, EXTENDED_PLANES};
use darkgo::gtp::{serve, Engine, EngineConfig};
use darkgo::harness::{midgame_position, raw_policy_move};
use darkgo::ladder::{read_ladder, LadderResult};
use darkgo::mcts::{run_search, Budget, SearchConfig, SearchTree};
use darkgo::playout::PlayoutConfig;
use darkgo::policy::{baseline_policy, BuiltinEvaluator};
use darkgo::{sgf, Coord, IllegalMove, Move, Player, Position};
use rand::seq::SliceRandom;
use rand::Rng;

use super::tactics::{self, Kind};
use super::{ladder_oracle, ladder_problem, random_pair, reference_features, rng, LadderVerdict, RefBoard, RefIllegal};

pub type SuiteResult = Result<String, String>;

const SIZES: [usize; 5] = [5, 7, 9, 13, 19];

/// Compares one position against the reference board: stones, ko point,
/// every group's liberties and size, per-point legality and area score.
fn compare_position(pos: &Position, board: &RefBoard) -> Result<(), String> {
    let n = board.n;
    if pos.stones() != board.cells {
        return Err(format!("stones differ\n{}", pos.to_ascii()));
    }
    if pos.ko_point().map(|c| c.index(n)) != board.ko {
        return Err(format!("ko point {:?} vs reference {:?}\n{}", pos.ko_point(), board.ko, pos.to_ascii()));
    }
    for i in 0..n * n {
        let c = Coord::from_index(i, n);
        if board.cells[i].is_some() {
            let (stones, libs) = board.group(i);
            if pos.group_liberties(c) != Some(libs.len()) || pos.group_size(c) != Some(stones.len()) {
                return Err(format!(
                    "group at {c:?}: libs {:?}/{} size {:?}/{}\n{}",
                    pos.group_liberties(c),
                    libs.len(),
                    pos.group_size(c),
                    stones.len(),
                    pos.to_ascii()
                ));
            }
        }
        let engine = pos.check_move(Move::Place(c));
        let reference = board.check(i);
        let agree = match (engine, reference) {
            (Ok(()), Ok(())) => true,
            // positional superko is stricter than the reference's simple ko
            (Err(IllegalMove::Superko), Ok(())) => true,
            (Err(IllegalMove::Occupied), Err(RefIllegal::Occupied)) => true,
            (Err(IllegalMove::Suicide), Err(RefIllegal::Suicide)) => true,
            (Err(IllegalMove::Ko), Err(RefIllegal::Ko)) => true,
            _ => false,
        };
        if !agree {
            return Err(format!("legality at {c:?}: {engine:?} vs reference {reference:?}\n{}", pos.to_ascii()));
        }
    }
    let score = pos.tromp_taylor_score(7.5);
    let (b, w) = board.area();
    if (score.black_points as usize, score.white_points as usize) != (b, w) {
        return Err(format!("score {}/{} vs reference {b}/{w}\n{}", score.black_points, score.white_points, pos.to_ascii()));
    }
    let expected = b as f32 - w as f32 - 7.5;
    if score.margin != expected {
        return Err(format!("margin {} vs reference {expected}", score.margin));
    }
    Ok(())
}

/// Random games on several board sizes, played in lockstep with the
/// reference board. Every move's captures are compared; `positions` sampled
/// positions get the full comparison.
pub fn rules_oracle(positions: usize, seed: u64) -> SuiteResult {
    let mut r = rng(seed);
    let (mut checked, mut games, mut moves, mut captures) = (0, 0, 0, 0);
    while checked < positions {
        let n = *SIZES.choose(&mut r).unwrap();
        let mut pos = Position::new(n);
        let mut board = RefBoard::new(n);
        let sample_every = (n * n / 8).max(3);
        games += 1;
        while !pos.is_game_over() && pos.move_number() < 3 * (n * n) as u32 && checked < positions {
            let me = pos.to_move();
            let cands: Vec<Move> = pos
                .legal_moves()
                .into_iter()
                .filter(|&m| matches!(m, Move::Place(c) if !pos.is_true_eye(c, me)))
                .collect();
            let mv = cands.choose(&mut r).copied().unwrap_or(Move::Pass);
            let before = pos.stone_count();
            pos.play_mut(mv).map_err(|e| format!("engine rejected its own legal move {mv:?}: {e}"))?;
            let caught = match mv {
                Move::Place(c) => board.play(c.index(n)).map_err(|e| format!("reference rejects {c:?}: {e:?}"))?,
                _ => {
                    board.pass();
                    0
                }
            };
            let engine_caught = before + usize::from(mv != Move::Pass) - pos.stone_count();
            if engine_caught != caught {
                return Err(format!("{mv:?} captured {engine_caught}, reference {caught}\n{}", pos.to_ascii()));
            }
            if pos.stones() != board.cells {
                return Err(format!("boards diverge after {mv:?}\n{}", pos.to_ascii()));
            }
            captures += caught;
            moves += 1;
            if r.gen_range(0..sample_every) == 0 {
                compare_position(&pos, &board)?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} positions from {games} games ({moves} moves, {captures} stones captured) match"))
}

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/corpus")
}

/// Replays every SGF in `dir` on the engine and on the reference board.
pub fn corpus_replay(dir: &Path) -> SuiteResult {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "sgf"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(format!("no SGF files in {}", dir.display()));
    }
    let mut total = 0;
    for f in &files {
        let text = std::fs::read_to_string(f).map_err(|e| format!("{}: {e}", f.display()))?;
        let rec = sgf::parse(&text).map_err(|e| format!("{}: {e}", f.display()))?;
        let end = rec.replay().map_err(|e| format!("{}: {e}", f.display()))?;
        let mut board = RefBoard::new(rec.size);
        for (k, &(player, mv)) in rec.moves.iter().enumerate() {
            if board.to_move != player {
                board.to_move = player;
                board.ko = None;
            }
            match mv {
                Move::Place(c) => {
                    board.play(c.index(rec.size)).map_err(|e| format!("{} move {k}: reference says {e:?}", f.display()))?;
                }
                Move::Pass => board.pass(),
                Move::Resign => break,
            }
            total += 1;
        }
        if end.stones() != board.cells {
            return Err(format!("{}: final boards differ", f.display()));
        }
    }
    Ok(format!("{} games, {total} moves, 0 illegal", files.len()))
}

/// All 25 planes against the brute-force extractor, plus exact equivariance
/// under the eight symmetries.
pub fn feature_oracle(positions: usize, seed: u64) -> SuiteResult {
    let mut r = rng(seed);
    let (mut with_ko, mut compared) = (0, 0);
    for k in 0..positions {
        let n = [7, 9, 13, 19][k % 4];
        let (len, stop_at_ko) = if k % 3 == 0 { (4 * n * n, true) } else { (r.gen_range(0..2 * n * n), false) };
        let (pos, board) = random_pair(n, len, stop_at_ko, &mut r);
        if board.ko.is_some() {
            with_ko += 1;
        }
        let rank = r.gen_range(0..=9u8);
        for perspective in [Player::Black, Player::White] {
            let got = extract(&pos, perspective, rank, FeatureSet::Extended);
            let want = reference_features(&pos, &board, perspective, rank, FeatureSet::Extended);
            if got.data().len() != want.len() || want.len() != EXTENDED_PLANES * n * n {
                return Err(format!("plane count mismatch on position {k}"));
            }
            for (i, (&g, &w)) in got.data().iter().zip(&want).enumerate() {
                if g != w {
                    let a = n * n;
                    return Err(format!(
                        "position {k}, plane {}, point {:?}: {g} vs reference {w}\n{}",
                        i / a,
                        Coord::from_index(i % a, n),
                        pos.to_ascii()
                    ));
                }
                compared += 1;
            }
            let standard = extract(&pos, perspective, rank, FeatureSet::Standard);
            if standard.data() != &got.data()[..standard.data().len()] {
                return Err(format!("standard set is not a prefix of extended on position {k}"));
            }
        }
        let base = extract(&pos, pos.to_move(), rank, FeatureSet::Extended);
        for s in Symmetry::ALL {
            let moved = extract(&transform_position(&pos, s), pos.to_move(), rank, FeatureSet::Extended);
            if moved != base.transform(s) {
                return Err(format!("equivariance fails for {s:?} on position {k}\n{}", pos.to_ascii()));
            }
        }
    }
    Ok(format!("{positions} positions ({with_ko} with ko), {compared} values exact, 8 symmetries exact"))
}

fn ladder_case(k: u64) -> (Position, Coord) {
    let mut r = rng(0x1add_e700 + k);
    loop {
        let n = [9, 13, 19][r.gen_range(0..3)];
        if let Some(case) = ladder_problem(n, &mut r) {
            return case;
        }
    }
}

/// Generated chases, read by the engine and by the reference search.
pub fn ladder_suite(cases: usize) -> SuiteResult {
    let (mut captured, mut escapes, mut agree) = (0, 0, 0);
    for k in 0..cases {
        let (pos, target) = ladder_case(k as u64);
        let board = RefBoard::from_position(&pos);
        let want = ladder_oracle(&board, target.index(pos.size()), darkgo::ladder::DEFAULT_DEPTH_CAP);
        let got = match read_ladder(&pos, target) {
            LadderResult::CapturedByLadder => LadderVerdict::Captured,
            LadderResult::Escapes => LadderVerdict::Escapes,
            LadderResult::NotALadder => LadderVerdict::NotALadder,
        };
        if got != want {
            return Err(format!("case {k} at {target:?}: {got:?} vs reference {want:?}\n{}", pos.to_ascii()));
        }
        agree += 1;
        match want {
            LadderVerdict::Captured => captured += 1,
            LadderVerdict::Escapes => escapes += 1,
            LadderVerdict::NotALadder => {}
        }
    }
    if captured < cases / 5 || escapes < cases / 5 {
        return Err(format!("unbalanced suite: {captured} captured, {escapes} escapes"));
    }
    Ok(format!("{agree}/{cases} agree ({captured} captured, {escapes} escape)"))
}

fn invariant_search(threads: usize, virtual_loss: bool, rollouts: usize, seed: u64) -> Result<SearchTree, String> {
    let pos = midgame_position(19, 60, 3);
    let cfg = SearchConfig { threads, virtual_loss, rollouts, ..Default::default() };
    let tree = SearchTree::new(pos);
    let outcome = tree
        .search(&cfg, &BuiltinEvaluator, &mut rng(seed), Budget::Rollouts(rollouts))
        .map_err(|e| e.to_string())?;
    if outcome.rollouts != rollouts {
        return Err(format!("{} rollouts completed, wanted {rollouts}", outcome.rollouts));
    }
    if tree.root().visits() as usize != rollouts {
        return Err(format!("root visits {} after {rollouts} rollouts", tree.root().visits()));
    }
    tree.audit(cfg.min_children, cfg.max_children).map_err(|e| format!("{e:?}"))?;
    Ok(tree)
}

/// Full-tree audits after single- and multi-threaded searches, and byte
/// equality of two single-threaded trees grown from the same seed.
pub fn mcts_invariants(rollouts: usize) -> SuiteResult {
    let a = invariant_search(1, false, rollouts, 17)?;
    let b = invariant_search(1, false, rollouts, 17)?;
    let (fa, fb) = (a.fingerprint(), b.fingerprint());
    if fa != fb {
        return Err("single-threaded trees differ between runs".into());
    }
    let multi = invariant_search(4, false, rollouts, 18)?;
    let vl = invariant_search(4, true, rollouts, 19)?;
    Ok(format!(
        "conservation holds at {rollouts} rollouts (1 thread: {} nodes, 4 threads: {} nodes, 4 threads + virtual loss: {} nodes); determinism {} bytes identical",
        a.node_count(),
        multi.node_count(),
        vl.node_count(),
        fa.len()
    ))
}

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

/// The engine behind `darkgo gtp --size 9 --rollouts 200 --seed 7 --trials 100`.
pub fn golden_engine() -> Engine {
    let mut search = SearchConfig { rollouts: 200, komi: 7.5, playout: PlayoutConfig { komi: 7.5, ..Default::default() }, ..Default::default() };
    search.resign.trials = 100;
    let cfg = EngineConfig { search, seed: 7, board_size: 9, log_search: None };
    Engine::new(cfg, Arc::new(BuiltinEvaluator)).expect("engine")
}

/// Replays the golden script in-process and compares the transcript byte for byte.
pub fn gtp_golden() -> SuiteResult {
    let dir = data_dir();
    let script = std::fs::read(dir.join("golden.gtp")).map_err(|e| e.to_string())?;
    let want = std::fs::read(dir.join("golden.out")).map_err(|e| e.to_string())?;
    let mut got = Vec::new();
    serve(&mut golden_engine(), &script[..], &mut got).map_err(|e| e.to_string())?;
    if got != want {
        let at = got.iter().zip(&want).position(|(a, b)| a != b).unwrap_or(got.len().min(want.len()));
        return Err(format!("transcript differs at byte {at}:\n{}", String::from_utf8_lossy(&got)));
    }
    let commands = script.split(|&b| b == b'\n').filter(|l| !l.is_empty()).count();
    Ok(format!("{commands} commands, {} bytes identical", want.len()))
}

#[derive(Debug, Default)]
pub struct TacticalScore {
    pub mcts: usize,
    pub raw: usize,
    pub total: usize,
    /// (kind, mcts solved, raw solved, count)
    pub by_kind: Vec<(Kind, usize, usize, usize)>,
}

impl TacticalScore {
    pub fn line(&self) -> String {
        let kinds: Vec<String> = self.by_kind.iter().map(|(k, m, r, n)| format!("{k} {m}/{r}/{n}")).collect();
        format!("search {}/{}, raw policy {}/{} (search/raw/count: {})", self.mcts, self.total, self.raw, self.total, kinds.join(", "))
    }
}

/// Search and the raw policy on the constructed problem set.
pub fn tactical_score(rollouts: usize) -> TacticalScore {
    let cfg = SearchConfig { rollouts, ..Default::default() };
    let mut score = TacticalScore::default();
    for (k, p) in tactics::suite().iter().enumerate() {
        let best = run_search(&p.position, &cfg, &BuiltinEvaluator, &mut rng(0x5ea4c4 + k as u64)).expect("search").best;
        let raw = raw_policy_move(&p.position, &baseline_policy(&p.position));
        let (m, r) = (usize::from(p.solved_by(best)), usize::from(p.solved_by(raw)));
        score.mcts += m;
        score.raw += r;
        score.total += 1;
        match score.by_kind.iter_mut().find(|e| e.0 == p.kind) {
            Some(e) => {
                e.1 += m;
                e.2 += r;
                e.3 += 1;
            }
            None => score.by_kind.push((p.kind, m, r, 1)),
        }
    }
    score
}
