//! Independent reference implementations used as oracles by the integration
//! tests. Everything here works on a plain row-major grid and recomputes
//! groups by flood fill; nothing is shared with the engine's board.

#![allow(dead_code)]

pub mod suites;
pub mod tactics;

use darkgo::features::{FeatureSet, EXTENDED_PLANES, STANDARD_PLANES};
use darkgo::{Coord, Move, Player, Position};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefBoard {
    pub n: usize,
    pub cells: Vec<Option<Player>>,
    pub to_move: Player,
    /// Simple-ko point forbidden to `to_move`.
    pub ko: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefIllegal {
    Occupied,
    Suicide,
    Ko,
}

impl RefBoard {
    pub fn new(n: usize) -> RefBoard {
        RefBoard { n, cells: vec![None; n * n], to_move: Player::Black, ko: None }
    }

    pub fn from_position(pos: &Position) -> RefBoard {
        let n = pos.size();
        RefBoard { n, cells: pos.stones(), to_move: pos.to_move(), ko: pos.ko_point().map(|c| c.index(n)) }
    }

    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        let (x, y, n) = (i % self.n, i / self.n, self.n);
        let mut out = Vec::with_capacity(4);
        if x > 0 {
            out.push(i - 1);
        }
        if x + 1 < n {
            out.push(i + 1);
        }
        if y > 0 {
            out.push(i - n);
        }
        if y + 1 < n {
            out.push(i + n);
        }
        out
    }

    /// Stones of the group at `i` and its liberties, both sorted.
    pub fn group(&self, i: usize) -> (Vec<usize>, Vec<usize>) {
        let color = self.cells[i].expect("group of an empty point");
        let mut seen = vec![false; self.cells.len()];
        let mut stack = vec![i];
        seen[i] = true;
        let mut stones = Vec::new();
        let mut libs = Vec::new();
        while let Some(p) = stack.pop() {
            stones.push(p);
            for q in self.neighbours(p) {
                match self.cells[q] {
                    None => {
                        if !libs.contains(&q) {
                            libs.push(q);
                        }
                    }
                    Some(c) if c == color && !seen[q] => {
                        seen[q] = true;
                        stack.push(q);
                    }
                    _ => {}
                }
            }
        }
        stones.sort_unstable();
        libs.sort_unstable();
        (stones, libs)
    }

    pub fn liberties(&self, i: usize) -> usize {
        self.group(i).1.len()
    }

    pub fn check(&self, i: usize) -> Result<(), RefIllegal> {
        self.clone().play(i).map(|_| ())
    }

    /// Plays for the side to move. Returns the number of captured stones.
    pub fn play(&mut self, i: usize) -> Result<usize, RefIllegal> {
        if self.cells[i].is_some() {
            return Err(RefIllegal::Occupied);
        }
        if self.ko == Some(i) {
            return Err(RefIllegal::Ko);
        }
        let me = self.to_move;
        let mut next = self.clone();
        next.cells[i] = Some(me);
        let mut captured = Vec::new();
        for q in next.neighbours(i) {
            if next.cells[q] == Some(me.opponent()) {
                let (stones, libs) = next.group(q);
                if libs.is_empty() {
                    for s in stones {
                        next.cells[s] = None;
                        captured.push(s);
                    }
                }
            }
        }
        let (own, own_libs) = next.group(i);
        if own_libs.is_empty() {
            return Err(RefIllegal::Suicide);
        }
        next.ko = (captured.len() == 1 && own.len() == 1 && own_libs.len() == 1).then(|| captured[0]);
        next.to_move = me.opponent();
        *self = next;
        Ok(captured.len())
    }

    pub fn pass(&mut self) {
        self.ko = None;
        self.to_move = self.to_move.opponent();
    }

    /// Area score: (black points, white points).
    pub fn area(&self) -> (usize, usize) {
        let (mut b, mut w) = (0, 0);
        let mut seen = vec![false; self.cells.len()];
        for i in 0..self.cells.len() {
            match self.cells[i] {
                Some(Player::Black) => b += 1,
                Some(Player::White) => w += 1,
                None if !seen[i] => {
                    let mut region = Vec::new();
                    let (mut touches_b, mut touches_w) = (false, false);
                    let mut stack = vec![i];
                    seen[i] = true;
                    while let Some(p) = stack.pop() {
                        region.push(p);
                        for q in self.neighbours(p) {
                            match self.cells[q] {
                                None if !seen[q] => {
                                    seen[q] = true;
                                    stack.push(q);
                                }
                                Some(Player::Black) => touches_b = true,
                                Some(Player::White) => touches_w = true,
                                _ => {}
                            }
                        }
                    }
                    match (touches_b, touches_w) {
                        (true, false) => b += region.len(),
                        (false, true) => w += region.len(),
                        _ => {}
                    }
                }
                None => {}
            }
        }
        (b, w)
    }

    pub fn stone_count(&self, p: Player) -> usize {
        self.cells.iter().filter(|&&c| c == Some(p)).count()
    }
}

/// A position reached by `moves` uniformly random legal moves that never
/// fill the mover's own eye, with the reference board replayed alongside.
/// With `stop_at_ko` the game ends early at the first ko capture.
pub fn random_pair<R: Rng>(n: usize, moves: usize, stop_at_ko: bool, rng: &mut R) -> (Position, RefBoard) {
    let mut pos = Position::new(n);
    let mut board = RefBoard::new(n);
    for _ in 0..moves {
        let me = pos.to_move();
        let cands: Vec<Move> = pos
            .legal_moves()
            .into_iter()
            .filter(|&m| matches!(m, Move::Place(c) if !pos.is_true_eye(c, me)))
            .collect();
        let mv = cands.choose(rng).copied().unwrap_or(Move::Pass);
        pos.play_mut(mv).unwrap();
        match mv {
            Move::Place(c) => {
                board.play(c.index(n)).unwrap();
            }
            _ => board.pass(),
        }
        if pos.is_game_over() || stop_at_ko && board.ko.is_some() {
            break;
        }
    }
    (pos, board)
}

// ---------------------------------------------------------------- ladders

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderVerdict {
    Captured,
    Escapes,
    NotALadder,
}

/// Exhaustive alternating search on the reference board. With one liberty
/// the defender moves; with two the attacker moves and must atari. The
/// defender may extend on a liberty or capture an adjacent attacker group in
/// atari; three liberties or `cap` plies count as an escape.
pub fn ladder_oracle(board: &RefBoard, target: usize, cap: usize) -> LadderVerdict {
    let Some(defender) = board.cells[target] else { return LadderVerdict::NotALadder };
    let mut b = board.clone();
    let captured = match b.liberties(target) {
        1 => {
            if b.to_move != defender {
                b.to_move = defender;
                b.ko = None;
            }
            !oracle_defends(&b, target, defender, 0, cap)
        }
        2 => {
            if b.to_move == defender {
                b.to_move = defender.opponent();
                b.ko = None;
            }
            oracle_attacks(&b, target, defender, 0, cap)
        }
        _ => return LadderVerdict::NotALadder,
    };
    if captured {
        LadderVerdict::Captured
    } else {
        LadderVerdict::Escapes
    }
}

fn oracle_attacks(b: &RefBoard, t: usize, defender: Player, depth: usize, cap: usize) -> bool {
    if b.cells[t] != Some(defender) {
        return true;
    }
    let (_, libs) = b.group(t);
    if libs.len() == 1 {
        return b.check(libs[0]).is_ok();
    }
    if libs.len() >= 3 || depth >= cap {
        return false;
    }
    for l in libs {
        let mut next = b.clone();
        if next.play(l).is_err() {
            continue;
        }
        if next.cells[t] != Some(defender) {
            return true;
        }
        if next.liberties(t) == 1 && !oracle_defends(&next, t, defender, depth + 1, cap) {
            return true;
        }
    }
    false
}

fn oracle_defends(b: &RefBoard, t: usize, defender: Player, depth: usize, cap: usize) -> bool {
    if b.cells[t] != Some(defender) {
        return false;
    }
    let (stones, libs) = b.group(t);
    if libs.len() >= 3 || depth >= cap {
        return true;
    }
    let mut moves = libs.clone();
    for s in stones {
        for q in b.neighbours(s) {
            if b.cells[q] == Some(defender.opponent()) {
                let (_, l) = b.group(q);
                if l.len() == 1 {
                    moves.push(l[0]);
                }
            }
        }
    }
    moves.sort_unstable();
    moves.dedup();
    moves.retain(|&m| b.check(m).is_ok());
    if moves.is_empty() {
        let mut next = b.clone();
        next.pass();
        return !oracle_attacks(&next, t, defender, depth + 1, cap);
    }
    moves.into_iter().any(|m| {
        let mut next = b.clone();
        next.play(m).unwrap();
        !oracle_attacks(&next, t, defender, depth + 1, cap)
    })
}

/// A chase set up on an `n`x`n` board: the defender stone, the attacker to
/// move, plus random extra stones of both colours that may break the ladder.
/// Returns the position and the defender's coordinate, or `None` when the
/// random clutter spoilt the setup.
pub fn ladder_problem<R: Rng>(n: usize, rng: &mut R) -> Option<(Position, Coord)> {
    let mut cells: Vec<Option<Player>> = vec![None; n * n];
    let at = |x: i32, y: i32| -> Option<usize> {
        (x >= 0 && y >= 0 && (x as usize) < n && (y as usize) < n).then(|| y as usize * n + x as usize)
    };
    let (dx, dy) = (if rng.gen() { 1 } else { -1 }, if rng.gen() { 1 } else { -1 });
    let x = rng.gen_range(2..n as i32 - 2);
    let y = rng.gen_range(2..n as i32 - 2);
    let defender = if rng.gen() { Player::Black } else { Player::White };
    let attacker = defender.opponent();
    cells[at(x, y)?] = Some(defender);
    // the classic shape: attackers behind the stone, open diagonal ahead
    cells[at(x, y - dy)?] = Some(attacker);
    cells[at(x - dx, y)?] = Some(attacker);
    cells[at(x + dx, y + dy)?] = Some(attacker);
    if rng.gen_bool(0.3) {
        // start one ply later, defender in atari
        cells[at(x + dx, y)?] = Some(attacker);
    }
    let clutter = rng.gen_range(0..=n / 2);
    for _ in 0..clutter {
        let (cx, cy) = (rng.gen_range(0..n as i32), rng.gen_range(0..n as i32));
        if (cx - x).abs() <= 1 && (cy - y).abs() <= 1 {
            continue;
        }
        let i = at(cx, cy)?;
        if cells[i].is_none() {
            cells[i] = Some(if rng.gen_bool(0.6) { defender } else { attacker });
        }
    }
    // candidate breakers on the two diagonals the chase can run along
    let reach = |v: i32, d: i32| if d > 0 { n as i32 - 1 - v } else { v };
    for (ex, ey) in [(dx, -dy), (-dx, dy)] {
        let dist = reach(x, ex).min(reach(y, ey));
        if dist >= 2 && rng.gen_bool(0.6) {
            let k = rng.gen_range(2..=dist);
            let jitter = if rng.gen() { (0, 0) } else { (rng.gen_range(-1..=1), rng.gen_range(-1..=1)) };
            if let Some(i) = at(x + k * ex + jitter.0, y + k * ey + jitter.1) {
                if cells[i].is_none() {
                    cells[i] = Some(defender);
                }
            }
        }
    }
    let libs_first = {
        let b = RefBoard { n, cells: cells.clone(), to_move: attacker, ko: None };
        if b.cells.iter().enumerate().any(|(i, c)| c.is_some() && b.liberties(i) == 0) {
            return None;
        }
        b.liberties(at(x, y)?)
    };
    let to_move = if libs_first == 1 { defender } else { attacker };
    let pos = Position::from_stones(n, &cells, to_move).ok()?;
    Some((pos, Coord::new(x as u8, y as u8)))
}

// --------------------------------------------------------------- features

/// Brute-force feature planes from the reference board (stones, ko point)
/// and the placement ages recorded in `pos`.
pub fn reference_features(pos: &Position, board: &RefBoard, perspective: Player, rank: u8, set: FeatureSet) -> Vec<f32> {
    let n = board.n;
    let a = n * n;
    let planes = match set {
        FeatureSet::Standard => STANDARD_PLANES,
        FeatureSet::Extended => EXTENDED_PLANES,
    };
    let mut out = vec![0.0f32; planes * a];
    let mut set_at = |plane: usize, i: usize, v: f32| out[plane * a + i] = v;
    for i in 0..a {
        match board.cells[i] {
            None => set_at(9, i, 1.0),
            Some(owner) => {
                let ours = owner == perspective;
                let libs = board.liberties(i);
                let base = if ours { 0 } else { 3 };
                let k = if libs >= 3 { 2 } else { libs - 1 };
                set_at(base + k, i, 1.0);
                set_at(if ours { 7 } else { 8 }, i, 1.0);
                let age = pos.age_at(Coord::from_index(i, n)).unwrap();
                let t = pos.move_number() - age;
                set_at(if ours { 10 } else { 11 }, i, (-(t as f32) * 0.1).exp());
            }
        }
    }
    if let Some(k) = board.ko {
        set_at(6, k, 1.0);
    }
    for r in 0..rank.min(9) as usize {
        for i in 0..a {
            set_at(12 + r, i, 1.0);
        }
    }
    if set == FeatureSet::Extended {
        let centre = (n as f32 - 1.0) / 2.0;
        let stones_of = |p: Player| -> Vec<(i32, i32)> {
            (0..a).filter(|&i| board.cells[i] == Some(p)).map(|i| ((i % n) as i32, (i / n) as i32)).collect()
        };
        let ours = stones_of(perspective);
        let theirs = stones_of(perspective.opponent());
        let nearest = |s: &[(i32, i32)], x: i32, y: i32| s.iter().map(|&(sx, sy)| (sx - x).abs() + (sy - y).abs()).min();
        for i in 0..a {
            let (x, y) = ((i % n) as i32, (i / n) as i32);
            if x == 0 || y == 0 || x == n as i32 - 1 || y == n as i32 - 1 {
                set_at(21, i, 1.0);
            }
            let d2 = (x as f32 - centre).powi(2) + (y as f32 - centre).powi(2);
            set_at(22, i, (-0.5 * d2).exp());
            match (nearest(&ours, x, y), nearest(&theirs, x, y)) {
                (Some(o), Some(t)) if o < t => set_at(23, i, 1.0),
                (Some(o), Some(t)) if t < o => set_at(24, i, 1.0),
                (Some(_), None) => set_at(23, i, 1.0),
                (None, Some(_)) => set_at(24, i, 1.0),
                _ => {}
            }
        }
    }
    out
}

// ---------------------------------------------------------------- minimax

/// Stones captured by `us` minus stones captured by the opponent along the
/// best line of `depth` plies, full width over every legal placement (and
/// pass). The side to move on `b` is `us` when `maximising`.
pub fn material_minimax(b: &RefBoard, depth: usize, us: Player) -> i32 {
    if depth == 0 {
        return 0;
    }
    let maximising = b.to_move == us;
    let mut best: Option<i32> = None;
    let mut consider = |v: i32| {
        best = Some(match best {
            None => v,
            Some(x) if maximising => x.max(v),
            Some(x) => x.min(v),
        });
    };
    for i in 0..b.cells.len() {
        if b.cells[i].is_some() {
            continue;
        }
        let mut next = b.clone();
        if let Ok(caps) = next.play(i) {
            let gain = if maximising { caps as i32 } else { -(caps as i32) };
            consider(gain + material_minimax(&next, depth - 1, us));
        }
    }
    let mut passed = b.clone();
    passed.pass();
    consider(material_minimax(&passed, depth - 1, us));
    best.unwrap()
}

/// Value of each legal first move under [`material_minimax`].
pub fn root_values(b: &RefBoard, depth: usize) -> Vec<(usize, i32)> {
    let us = b.to_move;
    let mut out = Vec::new();
    for i in 0..b.cells.len() {
        let mut next = b.clone();
        if let Ok(caps) = next.play(i) {
            out.push((i, caps as i32 + material_minimax(&next, depth - 1, us)));
        }
    }
    out
}
