//! Rule-based default policy for rollouts, playout scoring and trial-based
//! dead stone estimation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::board::{step, Coord, Move, Player, Position, ScoreResult, DIAG, EMPTY, N4, OFF};
use crate::ladder;
use crate::patterns::PatternTable;

#[derive(Clone, Debug, PartialEq)]
pub struct PlayoutConfig {
    /// Hard cap on moves per playout; `None` means three times the board area.
    pub max_moves: Option<usize>,
    pub komi: f32,
    pub seed: u64,
    pub patterns: bool,
    pub atari: bool,
    pub nakade: bool,
    pub avoid_self_atari: bool,
    /// Skip atari escapes that run into a working ladder. Costly on 19x19.
    pub ladder_escapes: bool,
}

impl Default for PlayoutConfig {
    fn default() -> Self {
        PlayoutConfig {
            max_moves: None,
            komi: 7.5,
            seed: 0,
            patterns: true,
            atari: true,
            nakade: true,
            avoid_self_atari: true,
            ladder_escapes: false,
        }
    }
}

impl PlayoutConfig {
    pub fn move_cap(&self, pos: &Position) -> usize {
        self.max_moves.unwrap_or(3 * pos.area()).max(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlayoutOutcome {
    /// Black wins on a positive margin; a zero margin goes to White.
    pub winner: Player,
    pub margin: f32,
    pub length: usize,
}

/// Seed for worker or trial `index` derived from a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Whether the side to move may play at `p` in a playout: legal, not one of
/// its own true eyes, and (optionally) not a self-atari of more than one stone.
#[inline]
fn acceptable(pos: &Position, p: usize, color: u8, cfg: &PlayoutConfig) -> bool {
    if pos.is_eye_at(p, color) || pos.check_place(p, color).is_err() {
        return false;
    }
    if cfg.avoid_self_atari {
        // a lone new stone may self-atari; only larger groups are rejected
        let (mut own, mut empty) = (false, 0);
        for d in N4 {
            match pos.cell(step(p, d)) {
                EMPTY => empty += 1,
                c if c == color => own = true,
                _ => {}
            }
        }
        if own && empty < 2 {
            let info = pos.place_info(p, color, 2);
            if info.libs <= 1 && info.group_stones > 1 {
                return false;
            }
        }
    }
    true
}

/// Small candidate list kept on the stack; extra points past the capacity
/// are dropped.
struct Cands {
    buf: [usize; 32],
    len: usize,
}

impl Cands {
    fn new() -> Self {
        Cands { buf: [0; 32], len: 0 }
    }

    fn as_slice(&self) -> &[usize] {
        &self.buf[..self.len]
    }

    fn push(&mut self, p: usize) {
        if self.len < self.buf.len() && !self.as_slice().contains(&p) {
            self.buf[self.len] = p;
            self.len += 1;
        }
    }

    fn pick<R: Rng>(&self, rng: &mut R) -> Option<usize> {
        match self.len {
            0 => None,
            1 => Some(self.buf[0]),
            n => Some(self.buf[rng.gen_range(0..n)]),
        }
    }
}

/// Picks the next playout move for the side to move. Priority: capture a
/// group in atari near the last move, escape our own atari, play the vital
/// point of a small enclosed eyespace, answer with a 3x3 shape, then a
/// uniformly random acceptable move. `Pass` when nothing is acceptable.
pub fn default_policy_move<R: Rng>(pos: &Position, cfg: &PlayoutConfig, rng: &mut R) -> Move {
    match choose_point(pos, cfg, rng) {
        Some(p) => Move::Place(Coord::from_point(p)),
        None => Move::Pass,
    }
}

fn choose_point<R: Rng>(pos: &Position, cfg: &PlayoutConfig, rng: &mut R) -> Option<usize> {
    let me = pos.to_move().cell();
    let them = me ^ 3;
    if let Some(Move::Place(c)) = pos.last_move() {
        let last = c.point();
        let mut cands = Cands::new();
        if cfg.atari {
            // (1) capture
            let check = |q: usize, cands: &mut Cands| {
                if pos.cell(q) == them {
                    if let Some(l) = pos.atari_liberty(q) {
                        if acceptable(pos, l, me, cfg) {
                            cands.push(l);
                        }
                    }
                }
            };
            check(last, &mut cands);
            for d in N4.iter().chain(DIAG.iter()) {
                check(step(last, *d), &mut cands);
            }
            if let Some(p) = cands.pick(rng) {
                return Some(p);
            }
            // (2) escape
            for d in N4 {
                let q = step(last, d);
                if pos.cell(q) == me && pos.libs_of(q) == 1 {
                    escape_moves(pos, q, me, cfg, &mut cands);
                }
            }
            if let Some(p) = cands.pick(rng) {
                return Some(p);
            }
        }
        if cfg.nakade {
            // neighbours already reached by an earlier search share its answer
            let mut seen = [0usize; 28];
            let mut n_seen = 0;
            for d in N4 {
                let q = step(last, d);
                if pos.cell(q) == EMPTY && !seen[..n_seen].contains(&q) {
                    let (vital, region, len) = nakade_point(pos, q, them);
                    if let Some(v) = vital {
                        if acceptable(pos, v, me, cfg) {
                            cands.push(v);
                        }
                    }
                    seen[n_seen..n_seen + len].copy_from_slice(&region[..len]);
                    n_seen += len;
                }
            }
            if let Some(p) = cands.pick(rng) {
                return Some(p);
            }
        }
        if cfg.patterns {
            let table = PatternTable::builtin();
            for d in N4.iter().chain(DIAG.iter()) {
                let q = step(last, *d);
                if pos.cell(q) == EMPTY && table.weight_at(pos, q) > 0 && acceptable(pos, q, me, cfg) {
                    cands.push(q);
                }
            }
            if let Some(p) = cands.pick(rng) {
                return Some(p);
            }
        }
    }
    random_point(pos, me, cfg, rng)
}

fn escape_moves(pos: &Position, q: usize, me: u8, cfg: &PlayoutConfig, out: &mut Cands) {
    let Some(lib) = pos.atari_liberty(q) else { return };
    // capture a neighbour in atari
    let them = me ^ 3;
    pos.for_each_stone(pos.head_of(q), |s| {
        for d in N4 {
            let r = step(s, d);
            if pos.cell(r) == them {
                if let Some(l) = pos.atari_liberty(r) {
                    if acceptable(pos, l, me, cfg) {
                        out.push(l);
                    }
                }
            }
        }
    });
    // extend
    if pos.check_place(lib, me).is_ok() {
        let info = pos.place_info(lib, me, 3);
        if info.libs >= 2 && !pos.is_eye_at(lib, me) {
            if cfg.ladder_escapes && info.libs == 2 {
                if let Ok(next) = pos.play(Move::Place(Coord::from_point(lib))) {
                    if ladder::read_ladder(&next, Coord::from_point(lib)) == ladder::LadderResult::CapturedByLadder {
                        return;
                    }
                }
            }
            out.push(lib);
        }
    }
}

/// Vital point of the empty region containing `start` when that region is a
/// killable eyespace (3 to 6 points) enclosed by `owner` stones, with the
/// points explored on the way.
fn nakade_point(pos: &Position, start: usize, owner: u8) -> (Option<usize>, [usize; 7], usize) {
    let mut region = [0usize; 7];
    let mut len = 1;
    region[0] = start;
    let mut i = 0;
    while i < len {
        let p = region[i];
        for d in N4 {
            let q = step(p, d);
            match pos.cell(q) {
                EMPTY => {
                    if !region[..len].contains(&q) {
                        if len == 7 {
                            return (None, region, len);
                        }
                        region[len] = q;
                        len += 1;
                    }
                }
                OFF => {}
                c if c == owner => {}
                _ => return (None, region, len),
            }
        }
        i += 1;
    }
    if !(3..=6).contains(&len) {
        return (None, region, len);
    }
    let all = region;
    let region = &region[..len];
    let mut degrees = [0usize; 6];
    let (mut max, mut vital, mut ties) = (0, 0, 0);
    for (i, &p) in region.iter().enumerate() {
        let d = N4.iter().filter(|&&d| region.contains(&step(p, d))).count();
        degrees[i] = d;
        if d > max {
            (max, vital, ties) = (d, p, 1);
        } else if d == max {
            ties += 1;
        }
    }
    let degrees = &mut degrees[..len];
    degrees.sort_unstable();
    let killable = matches!(
        &*degrees,
        [1, 1, 2] | [1, 1, 1, 3] | [1, 2, 2, 2, 3] | [1, 1, 2, 2, 2, 4]
    );
    ((killable && ties == 1).then_some(vital), all, len)
}

fn random_point<R: Rng>(pos: &Position, me: u8, cfg: &PlayoutConfig, rng: &mut R) -> Option<usize> {
    // a few uniform probes, then sampling without replacement; both are
    // uniform over the acceptable points
    let empties = pos.empty_points();
    if empties.is_empty() {
        return None;
    }
    for _ in 0..4 {
        let p = empties[rng.gen_range(0..empties.len())] as usize;
        if acceptable(pos, p, me, cfg) {
            return Some(p);
        }
    }
    let mut pool = [0u16; crate::board::MAX_SIZE * crate::board::MAX_SIZE];
    let mut len = empties.len();
    pool[..len].copy_from_slice(empties);
    while len > 0 {
        let i = rng.gen_range(0..len);
        let p = pool[i] as usize;
        if acceptable(pos, p, me, cfg) {
            return Some(p);
        }
        len -= 1;
        pool[i] = pool[len];
    }
    None
}

/// Plays default-policy moves in place until two consecutive passes or the
/// move cap. Returns the number of moves played.
pub fn play_out<R: Rng>(pos: &mut Position, cfg: &PlayoutConfig, rng: &mut R) -> usize {
    let cap = cfg.move_cap(pos);
    let mut played = 0;
    while played < cap && !pos.is_game_over() {
        match choose_point(pos, cfg, rng) {
            Some(p) => pos.apply_place(p),
            None => pos.apply_pass(),
        }
        played += 1;
    }
    played
}

pub fn run_playout<R: Rng>(pos: &Position, cfg: &PlayoutConfig, rng: &mut R) -> PlayoutOutcome {
    let mut work = pos.clone();
    let length = play_out(&mut work, cfg, rng);
    let score = work.tromp_taylor_score(cfg.komi);
    PlayoutOutcome {
        winner: if score.margin > 0.0 { Player::Black } else { Player::White },
        margin: score.margin,
        length,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupStatus {
    pub player: Player,
    pub stones: Vec<Coord>,
    /// Fraction of trials in which the group's point ended as its own.
    pub alive_probability: f64,
}

impl GroupStatus {
    pub fn is_dead(&self) -> bool {
        self.alive_probability < 0.5
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeadStoneReport {
    pub trials: usize,
    pub groups: Vec<GroupStatus>,
    /// Final margin (Black - White - komi) of every trial.
    pub margins: Vec<f32>,
    /// Tromp-Taylor score after removing dead groups.
    pub score: ScoreResult,
}

impl DeadStoneReport {
    pub fn dead_stones(&self) -> Vec<Coord> {
        self.groups.iter().filter(|g| g.is_dead()).flat_map(|g| g.stones.iter().copied()).collect()
    }

    /// Every trial ended with `player` behind by at least `points`.
    pub fn all_trials_lose_by(&self, player: Player, points: f32) -> bool {
        !self.margins.is_empty()
            && self.margins.iter().all(|&m| match player {
                Player::Black => m <= -points,
                Player::White => m >= points,
            })
    }

    /// Fraction of trials won by `player`.
    pub fn win_fraction(&self, player: Player) -> f64 {
        if self.margins.is_empty() {
            return 0.0;
        }
        let wins = self
            .margins
            .iter()
            .filter(|&&m| match player {
                Player::Black => m > 0.0,
                Player::White => m <= 0.0,
            })
            .count();
        wins as f64 / self.margins.len() as f64
    }

    /// Cleaned-board margin from `player`'s point of view.
    pub fn margin_for(&self, player: Player) -> f32 {
        match player {
            Player::Black => self.score.margin,
            Player::White => -self.score.margin,
        }
    }
}

/// Runs `trials` default-policy playouts from `pos`; groups whose stones end
/// up owned by the opponent in more than half the trials are dead and removed
/// before the final Tromp-Taylor count.
pub fn estimate_dead_and_score(pos: &Position, trials: usize, cfg: &PlayoutConfig) -> DeadStoneReport {
    assert!(trials >= 1, "at least one trial");
    let results: Vec<(Vec<Option<Player>>, f32)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, i as u64));
            let mut work = pos.clone();
            play_out(&mut work, cfg, &mut rng);
            (work.ownership(), work.tromp_taylor_score(cfg.komi).margin)
        })
        .collect();

    let n = pos.size();
    let groups: Vec<GroupStatus> = pos
        .groups()
        .into_iter()
        .map(|rep| {
            let player = pos.stone_at(rep).expect("group representative is a stone");
            let alive = results.iter().filter(|(own, _)| own[rep.index(n)] == Some(player)).count();
            GroupStatus { player, stones: pos.group_stones(rep), alive_probability: alive as f64 / trials as f64 }
        })
        .collect();

    let mut stones = pos.stones();
    for g in groups.iter().filter(|g| g.is_dead()) {
        for c in &g.stones {
            stones[c.index(n)] = None;
        }
    }
    let cleaned = Position::from_stones(n, &stones, pos.to_move()).expect("removing groups keeps the board valid");
    DeadStoneReport {
        trials,
        groups,
        margins: results.into_iter().map(|r| r.1).collect(),
        score: cleaned.tromp_taylor_score(cfg.komi),
    }
}
