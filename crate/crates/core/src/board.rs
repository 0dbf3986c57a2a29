//! Go rules kernel.
//!
//! The board is stored on a padded grid with a fixed stride of 21 so that
//! every on-board point has four neighbours without bounds checks. Groups are
//! circular linked lists of stones with a representative ("head") that caches
//! the exact liberty count and the stone count.

use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

/// Largest supported board size.
pub const MAX_SIZE: usize = 19;

pub(crate) const STRIDE: usize = MAX_SIZE + 2;
pub(crate) const GRID: usize = STRIDE * STRIDE;
const MAX_AREA: usize = MAX_SIZE * MAX_SIZE;
const BLOOM_BITS: u64 = 4096;
const BLOOM_WORDS: usize = BLOOM_BITS as usize / 64;

pub(crate) const EMPTY: u8 = 0;
pub(crate) const BLACK: u8 = 1;
pub(crate) const WHITE: u8 = 2;
pub(crate) const OFF: u8 = 3;

pub(crate) const N4: [isize; 4] = [-(STRIDE as isize), -1, 1, STRIDE as isize];
pub(crate) const DIAG: [isize; 4] = [
    -(STRIDE as isize) - 1,
    -(STRIDE as isize) + 1,
    STRIDE as isize - 1,
    STRIDE as isize + 1,
];

#[inline(always)]
pub(crate) fn step(p: usize, d: isize) -> usize {
    (p as isize + d) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Black,
    White,
}

impl Player {
    #[inline]
    pub fn opponent(self) -> Player {
        match self {
            Player::Black => Player::White,
            Player::White => Player::Black,
        }
    }

    #[inline]
    pub(crate) fn cell(self) -> u8 {
        match self {
            Player::Black => BLACK,
            Player::White => WHITE,
        }
    }

    #[inline]
    pub(crate) fn from_cell(c: u8) -> Option<Player> {
        match c {
            BLACK => Some(Player::Black),
            WHITE => Some(Player::White),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Black => "B",
            Player::White => "W",
        })
    }
}

/// An intersection. `row` 0 is the top edge (SGF convention).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub col: u8,
    pub row: u8,
}

impl Coord {
    pub const fn new(col: u8, row: u8) -> Coord {
        Coord { col, row }
    }

    /// Row-major index on a board of the given size.
    #[inline]
    pub fn index(self, size: usize) -> usize {
        self.row as usize * size + self.col as usize
    }

    #[inline]
    pub fn from_index(index: usize, size: usize) -> Coord {
        Coord::new((index % size) as u8, (index / size) as u8)
    }

    #[inline]
    pub fn in_bounds(self, size: usize) -> bool {
        (self.col as usize) < size && (self.row as usize) < size
    }

    #[inline]
    pub(crate) fn point(self) -> usize {
        (self.row as usize + 1) * STRIDE + self.col as usize + 1
    }

    #[inline]
    pub(crate) fn from_point(p: usize) -> Coord {
        Coord::new((p % STRIDE - 1) as u8, (p / STRIDE - 1) as u8)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Place(Coord),
    Pass,
    Resign,
}

impl Move {
    pub fn coord(self) -> Option<Coord> {
        match self {
            Move::Place(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum IllegalMove {
    #[error("intersection is off the board")]
    OutOfBounds,
    #[error("intersection is occupied")]
    Occupied,
    #[error("suicide")]
    Suicide,
    #[error("ko recapture")]
    Ko,
    #[error("positional superko")]
    Superko,
    #[error("move cannot be played on the board")]
    NotPlayable,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreResult {
    pub black_points: u32,
    pub white_points: u32,
    pub neutral_points: u32,
    pub komi: f32,
    /// Black minus White minus komi.
    pub margin: f32,
}

impl ScoreResult {
    pub fn winner(&self) -> Option<Player> {
        if self.margin > 0.0 {
            Some(Player::Black)
        } else if self.margin < 0.0 {
            Some(Player::White)
        } else {
            None
        }
    }
}

struct Zobrist {
    stones: [[u64; 2]; GRID],
    white_to_move: u64,
}

fn zobrist() -> &'static Zobrist {
    static TABLE: OnceLock<Zobrist> = OnceLock::new();
    TABLE.get_or_init(|| {
        // splitmix64, fixed seed so hashes are stable across runs
        let mut state: u64 = 0x6a09_e667_f3bc_c908;
        let mut next = || {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^ (z >> 31)
        };
        let mut stones = [[0u64; 2]; GRID];
        for entry in stones.iter_mut() {
            entry[0] = next();
            entry[1] = next();
        }
        Zobrist { stones, white_to_move: next() }
    })
}

#[inline(always)]
pub(crate) fn stone_key(p: usize, cell: u8) -> u64 {
    zobrist().stones[p][(cell - 1) as usize]
}

/// Hash of a stone configuration given as row-major cells, computed from
/// scratch. Equal to [`Position::grid_hash`] for the same stones.
pub fn grid_hash_of(size: usize, stones: &[Option<Player>]) -> u64 {
    assert_eq!(stones.len(), size * size);
    let mut h = 0;
    for (i, s) in stones.iter().enumerate() {
        if let Some(p) = s {
            h ^= stone_key(Coord::from_index(i, size).point(), p.cell());
        }
    }
    h
}

/// Hash of (stones, player to move) computed from scratch.
pub fn position_hash_of(size: usize, stones: &[Option<Player>], to_move: Player) -> u64 {
    let mut h = grid_hash_of(size, stones);
    if to_move == Player::White {
        h ^= zobrist().white_to_move;
    }
    h
}

#[derive(Clone, Copy, Default)]
pub(crate) struct PointSet([u64; GRID.div_ceil(64)]);

impl PointSet {
    #[inline(always)]
    pub(crate) fn insert(&mut self, p: usize) -> bool {
        let (w, b) = (p >> 6, 1u64 << (p & 63));
        let fresh = self.0[w] & b == 0;
        self.0[w] |= b;
        fresh
    }
}

/// Outcome of a hypothetical placement, computed without mutating.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct PlaceInfo {
    pub captured: u32,
    /// Liberties of the placed stone's group, capped at `cap`.
    pub libs: u32,
    pub group_stones: u32,
}

/// Full game state.
#[derive(Clone)]
pub struct Position {
    size: u8,
    to_move: Player,
    move_number: u16,
    passes: u8,
    ko: Option<u16>,
    last_move: Option<Move>,
    prev_move: Option<Move>,
    hash: u64,
    stone_count: u16,

    cells: [u8; GRID],
    head: [u16; GRID],
    next: [u16; GRID],
    libs: [u16; GRID],
    stones: [u16; GRID],
    age: [u16; GRID],

    empties: [u16; MAX_AREA],
    empty_at: [u16; GRID],
    n_empty: u16,

    history: Vec<u64>,
    seen_counts: [u16; MAX_AREA + 1],
    /// Two-probe Bloom filter over `history`, so most superko checks skip the scan.
    bloom: [u64; BLOOM_WORDS],
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Position({}x{}, {} to move, move {})", self.size, self.size, self.to_move, self.move_number)?;
        f.write_str(&self.to_ascii())
    }
}

impl PartialEq for Position {
    fn eq(&self, other: &Position) -> bool {
        self.size == other.size
            && self.to_move == other.to_move
            && self.ko == other.ko
            && self.move_number == other.move_number
            && self.cells == other.cells
            && self.age == other.age
    }
}

impl Position {
    pub fn new(size: usize) -> Position {
        assert!((2..=MAX_SIZE).contains(&size), "unsupported board size {size}");
        let mut pos = Position {
            size: size as u8,
            to_move: Player::Black,
            move_number: 0,
            passes: 0,
            ko: None,
            last_move: None,
            prev_move: None,
            hash: 0,
            stone_count: 0,
            cells: [OFF; GRID],
            head: [0; GRID],
            next: [0; GRID],
            libs: [0; GRID],
            stones: [0; GRID],
            age: [0; GRID],
            empties: [0; MAX_AREA],
            empty_at: [u16::MAX; GRID],
            n_empty: 0,
            history: vec![0],
            seen_counts: [0; MAX_AREA + 1],
            bloom: [0; BLOOM_WORDS],
        };
        for row in 0..size {
            for col in 0..size {
                let p = Coord::new(col as u8, row as u8).point();
                pos.cells[p] = EMPTY;
                pos.push_empty(p);
            }
        }
        pos.seen_counts[0] = 1;
        pos.bloom_insert(0);
        pos
    }

    /// Parses an ASCII diagram: `X`/`B` black, `O`/`W` white, `.`/`+` empty.
    /// Whitespace between points is ignored; one row per line.
    pub fn from_ascii(diagram: &str, to_move: Player) -> Result<Position, IllegalMove> {
        let rows: Vec<Vec<Option<Player>>> = diagram
            .lines()
            .map(|l| {
                l.chars()
                    .filter_map(|c| match c {
                        'X' | 'B' | 'x' => Some(Some(Player::Black)),
                        'O' | 'W' | 'o' => Some(Some(Player::White)),
                        '.' | '+' => Some(None),
                        _ => None,
                    })
                    .collect::<Vec<_>>()
            })
            .filter(|r| !r.is_empty())
            .collect();
        let size = rows.len();
        if size < 2 || size > MAX_SIZE || rows.iter().any(|r| r.len() != size) {
            return Err(IllegalMove::OutOfBounds);
        }
        let mut pos = Position::new(size);
        for (row, line) in rows.iter().enumerate() {
            for (col, s) in line.iter().enumerate() {
                if let Some(p) = s {
                    pos.put_stone(Coord::new(col as u8, row as u8).point(), p.cell(), 0);
                }
            }
        }
        pos.rebuild_groups();
        if pos.any_dead_group() {
            return Err(IllegalMove::Suicide);
        }
        pos.to_move = to_move;
        pos.reset_history();
        Ok(pos)
    }

    /// Builds a position from row-major stones. Groups without liberties
    /// are rejected.
    pub fn from_stones(size: usize, stones: &[Option<Player>], to_move: Player) -> Result<Position, IllegalMove> {
        if stones.len() != size * size {
            return Err(IllegalMove::OutOfBounds);
        }
        let mut pos = Position::new(size);
        for (i, s) in stones.iter().enumerate() {
            if let Some(p) = s {
                pos.put_stone(Coord::from_index(i, size).point(), p.cell(), 0);
            }
        }
        pos.rebuild_groups();
        if pos.any_dead_group() {
            return Err(IllegalMove::Suicide);
        }
        pos.to_move = to_move;
        pos.reset_history();
        Ok(pos)
    }

    pub fn to_ascii(&self) -> String {
        let n = self.size();
        let mut out = String::with_capacity(n * (2 * n + 1));
        for row in 0..n {
            for col in 0..n {
                if col > 0 {
                    out.push(' ');
                }
                out.push(match self.stone_at(Coord::new(col as u8, row as u8)) {
                    Some(Player::Black) => 'X',
                    Some(Player::White) => 'O',
                    None => '.',
                });
            }
            out.push('\n');
        }
        out
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size as usize
    }

    #[inline]
    pub fn area(&self) -> usize {
        self.size() * self.size()
    }

    #[inline]
    pub fn to_move(&self) -> Player {
        self.to_move
    }

    /// Number of moves (including passes) played since the start.
    #[inline]
    pub fn move_number(&self) -> u32 {
        self.move_number as u32
    }

    #[inline]
    pub fn ko_point(&self) -> Option<Coord> {
        self.ko.map(|p| Coord::from_point(p as usize))
    }

    #[inline]
    pub fn last_move(&self) -> Option<Move> {
        self.last_move
    }

    /// The move before the last one, i.e. the side to move's own last move.
    #[inline]
    pub fn previous_move(&self) -> Option<Move> {
        self.prev_move
    }

    #[inline]
    pub fn consecutive_passes(&self) -> u32 {
        self.passes as u32
    }

    #[inline]
    pub fn is_game_over(&self) -> bool {
        self.passes >= 2
    }

    #[inline]
    pub fn stone_count(&self) -> usize {
        self.stone_count as usize
    }

    /// Hash of (stones, player to move).
    #[inline]
    pub fn hash(&self) -> u64 {
        if self.to_move == Player::White {
            self.hash ^ zobrist().white_to_move
        } else {
            self.hash
        }
    }

    /// Hash of the stone configuration alone.
    #[inline]
    pub fn grid_hash(&self) -> u64 {
        self.hash
    }

    /// Grid hashes of every earlier board, including the current one.
    pub fn hash_history(&self) -> &[u64] {
        &self.history
    }

    pub fn stone_at(&self, c: Coord) -> Option<Player> {
        if !c.in_bounds(self.size()) {
            return None;
        }
        Player::from_cell(self.cells[c.point()])
    }

    /// Move number at which the stone on `c` was placed (0 for setup stones).
    pub fn age_at(&self, c: Coord) -> Option<u32> {
        self.stone_at(c).map(|_| self.age[c.point()] as u32)
    }

    /// All stones in row-major order.
    pub fn stones(&self) -> Vec<Option<Player>> {
        (0..self.area()).map(|i| self.stone_at(Coord::from_index(i, self.size()))).collect()
    }

    pub fn group_liberties(&self, c: Coord) -> Option<usize> {
        self.stone_at(c)?;
        Some(self.libs[self.head[c.point()] as usize] as usize)
    }

    pub fn group_size(&self, c: Coord) -> Option<usize> {
        self.stone_at(c)?;
        Some(self.stones[self.head[c.point()] as usize] as usize)
    }

    pub fn group_stones(&self, c: Coord) -> Vec<Coord> {
        if self.stone_at(c).is_none() {
            return Vec::new();
        }
        let mut out = Vec::new();
        self.for_each_stone(c.point(), |s| out.push(Coord::from_point(s)));
        out.sort();
        out
    }

    pub fn group_liberty_points(&self, c: Coord) -> Vec<Coord> {
        if self.stone_at(c).is_none() {
            return Vec::new();
        }
        let mut out = Vec::new();
        self.lib_points(self.head[c.point()] as usize, usize::MAX, |l| out.push(Coord::from_point(l)));
        out.sort();
        out
    }

    /// One representative coordinate per group currently on the board.
    pub fn groups(&self) -> Vec<Coord> {
        let mut seen = PointSet::default();
        let mut out = Vec::new();
        for p in self.board_points() {
            if self.cells[p] == BLACK || self.cells[p] == WHITE {
                let h = self.head[p] as usize;
                if seen.insert(h) {
                    out.push(Coord::from_point(p));
                }
            }
        }
        out
    }

    pub fn is_legal(&self, mv: Move) -> bool {
        self.check_move(mv).is_ok()
    }

    pub fn check_move(&self, mv: Move) -> Result<(), IllegalMove> {
        match mv {
            Move::Pass => Ok(()),
            Move::Resign => Err(IllegalMove::NotPlayable),
            Move::Place(c) => {
                if !c.in_bounds(self.size()) {
                    return Err(IllegalMove::OutOfBounds);
                }
                self.check_place(c.point(), self.to_move.cell())
            }
        }
    }

    /// Every legal placement in row-major order, followed by `Pass`.
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut out: Vec<Move> = (0..self.area())
            .map(|i| Coord::from_index(i, self.size()))
            .filter(|&c| self.check_place(c.point(), self.to_move.cell()).is_ok())
            .map(Move::Place)
            .collect();
        out.push(Move::Pass);
        out
    }

    /// Successor position; `self` is left untouched.
    pub fn play(&self, mv: Move) -> Result<Position, IllegalMove> {
        let mut next = self.clone();
        next.play_mut(mv)?;
        Ok(next)
    }

    pub fn play_mut(&mut self, mv: Move) -> Result<(), IllegalMove> {
        match mv {
            Move::Pass => {
                self.apply_pass();
                Ok(())
            }
            Move::Resign => Err(IllegalMove::NotPlayable),
            Move::Place(c) => {
                if !c.in_bounds(self.size()) {
                    return Err(IllegalMove::OutOfBounds);
                }
                let p = c.point();
                self.check_place(p, self.to_move.cell())?;
                self.apply_place(p);
                Ok(())
            }
        }
    }

    /// Places a stone outside the turn order (handicap or setup). Clears the
    /// superko history; intended to be used before any move is played.
    pub fn setup_stone(&mut self, c: Coord, player: Player) -> Result<(), IllegalMove> {
        if !c.in_bounds(self.size()) {
            return Err(IllegalMove::OutOfBounds);
        }
        let p = c.point();
        if self.cells[p] != EMPTY {
            return Err(IllegalMove::Occupied);
        }
        let mut trial = self.clone();
        trial.put_stone(p, player.cell(), self.move_number);
        trial.rebuild_groups();
        if trial.any_dead_group() {
            return Err(IllegalMove::Suicide);
        }
        trial.ko = None;
        trial.reset_history();
        *self = trial;
        Ok(())
    }

    /// Sets the player to move without playing a move.
    pub fn set_to_move(&mut self, player: Player) {
        self.to_move = player;
        self.ko = None;
    }

    /// Empty point whose four neighbours are `player`'s stones (or the edge),
    /// with at most one opponent diagonal in the open and none on the edge.
    pub fn is_true_eye(&self, c: Coord, player: Player) -> bool {
        c.in_bounds(self.size()) && self.is_eye_at(c.point(), player.cell())
    }

    /// Area score: stones plus empty regions that reach only one colour.
    pub fn tromp_taylor_score(&self, komi: f32) -> ScoreResult {
        let own = self.ownership();
        let (mut b, mut w, mut n) = (0u32, 0u32, 0u32);
        for o in own {
            match o {
                Some(Player::Black) => b += 1,
                Some(Player::White) => w += 1,
                None => n += 1,
            }
        }
        ScoreResult {
            black_points: b,
            white_points: w,
            neutral_points: n,
            komi,
            margin: b as f32 - w as f32 - komi,
        }
    }

    /// Tromp-Taylor owner of every intersection, row-major.
    pub fn ownership(&self) -> Vec<Option<Player>> {
        let mut owner = [0u8; GRID];
        let mut visited = PointSet::default();
        let mut stack: Vec<usize> = Vec::with_capacity(64);
        let mut region: Vec<usize> = Vec::with_capacity(64);
        for p in self.board_points() {
            let c = self.cells[p];
            if c != EMPTY {
                owner[p] = c;
                continue;
            }
            if !visited.insert(p) {
                continue;
            }
            let mut reach = 0u8;
            stack.push(p);
            region.clear();
            while let Some(q) = stack.pop() {
                region.push(q);
                for d in N4 {
                    let r = step(q, d);
                    match self.cells[r] {
                        EMPTY => {
                            if visited.insert(r) {
                                stack.push(r);
                            }
                        }
                        BLACK => reach |= 1,
                        WHITE => reach |= 2,
                        _ => {}
                    }
                }
            }
            let o = match reach {
                1 => BLACK,
                2 => WHITE,
                _ => EMPTY,
            };
            for &q in &region {
                owner[q] = o;
            }
        }
        (0..self.area())
            .map(|i| Player::from_cell(owner[Coord::from_index(i, self.size()).point()]))
            .collect()
    }

    /// Rebuilds the position with every stone moved by `map`. Ages, ko point,
    /// move counters and the side to move are carried over; superko history
    /// restarts from the mapped board.
    pub fn remapped(&self, map: impl Fn(Coord) -> Coord) -> Position {
        let mut out = Position::new(self.size());
        for p in self.board_points() {
            let c = self.cells[p];
            if c == BLACK || c == WHITE {
                let q = map(Coord::from_point(p)).point();
                out.put_stone(q, c, self.age[p]);
            }
        }
        out.rebuild_groups();
        out.to_move = self.to_move;
        out.move_number = self.move_number;
        out.passes = self.passes;
        out.ko = self.ko.map(|k| map(Coord::from_point(k as usize)).point() as u16);
        let map_move = |m: Move| match m {
            Move::Place(c) => Move::Place(map(c)),
            other => other,
        };
        out.last_move = self.last_move.map(map_move);
        out.prev_move = self.prev_move.map(map_move);
        out.reset_history();
        out
    }

    /// Same board with stone colours and the side to move exchanged.
    pub fn color_swapped(&self) -> Position {
        let mut out = Position::new(self.size());
        for p in self.board_points() {
            let c = self.cells[p];
            if c == BLACK || c == WHITE {
                out.put_stone(p, c ^ 3, self.age[p]);
            }
        }
        out.rebuild_groups();
        out.to_move = self.to_move.opponent();
        out.move_number = self.move_number;
        out.passes = self.passes;
        out.ko = self.ko;
        out.last_move = self.last_move;
        out.prev_move = self.prev_move;
        out.reset_history();
        out
    }

    // ---- crate-internal fast paths ----

    #[inline(always)]
    pub(crate) fn cell(&self, p: usize) -> u8 {
        self.cells[p]
    }

    #[inline(always)]
    pub(crate) fn head_of(&self, p: usize) -> usize {
        self.head[p] as usize
    }

    #[inline(always)]
    pub(crate) fn libs_of(&self, p: usize) -> u32 {
        self.libs[self.head[p] as usize] as u32
    }

    #[inline(always)]
    pub(crate) fn empty_points(&self) -> &[u16] {
        &self.empties[..self.n_empty as usize]
    }

    pub(crate) fn board_points(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.size();
        (0..n * n).map(move |i| (i / n + 1) * STRIDE + i % n + 1)
    }

    pub(crate) fn for_each_stone(&self, p: usize, mut f: impl FnMut(usize)) {
        let start = p;
        let mut s = p;
        loop {
            f(s);
            s = self.next[s] as usize;
            if s == start {
                break;
            }
        }
    }

    /// Calls `f` on distinct liberties of the group with head `h`, stopping
    /// after `limit` of them.
    pub(crate) fn lib_points(&self, h: usize, limit: usize, mut f: impl FnMut(usize)) {
        let mut seen = PointSet::default();
        let mut found = 0;
        let mut s = h;
        loop {
            for d in N4 {
                let q = step(s, d);
                if self.cells[q] == EMPTY && seen.insert(q) {
                    f(q);
                    found += 1;
                    if found >= limit {
                        return;
                    }
                }
            }
            s = self.next[s] as usize;
            if s == h {
                break;
            }
        }
    }

    pub(crate) fn is_eye_at(&self, p: usize, color: u8) -> bool {
        if self.cells[p] != EMPTY {
            return false;
        }
        for d in N4 {
            let c = self.cells[step(p, d)];
            if c != color && c != OFF {
                return false;
            }
        }
        let (mut bad, mut edge) = (0, false);
        for d in DIAG {
            match self.cells[step(p, d)] {
                OFF => edge = true,
                c if c == color ^ 3 => bad += 1,
                _ => {}
            }
        }
        if edge {
            bad == 0
        } else {
            bad <= 1
        }
    }

    /// The single liberty of a group in atari.
    pub(crate) fn atari_liberty(&self, p: usize) -> Option<usize> {
        let h = self.head[p] as usize;
        if self.libs[h] != 1 {
            return None;
        }
        let mut out = None;
        self.lib_points(h, 1, |l| out = Some(l));
        out
    }

    /// Legality for `color` at padded point `p`.
    pub(crate) fn check_place(&self, p: usize, color: u8) -> Result<(), IllegalMove> {
        if self.cells[p] != EMPTY {
            return Err(if self.cells[p] == OFF { IllegalMove::OutOfBounds } else { IllegalMove::Occupied });
        }
        if self.ko == Some(p as u16) && color == self.to_move.cell() {
            return Err(IllegalMove::Ko);
        }
        let opp = color ^ 3;
        let mut has_lib = false;
        let mut cap_heads = [0usize; 4];
        let mut n_cap = 0;
        let mut captured = 0u32;
        for d in N4 {
            let q = step(p, d);
            match self.cells[q] {
                EMPTY => has_lib = true,
                c if c == color => {
                    if self.libs[self.head[q] as usize] > 1 {
                        has_lib = true;
                    }
                }
                c if c == opp => {
                    let h = self.head[q] as usize;
                    if self.libs[h] == 1 && !cap_heads[..n_cap].contains(&h) {
                        cap_heads[n_cap] = h;
                        n_cap += 1;
                        captured += self.stones[h] as u32;
                    }
                }
                _ => {}
            }
        }
        if !has_lib && n_cap == 0 {
            return Err(IllegalMove::Suicide);
        }
        let new_count = self.stone_count as usize + 1 - captured as usize;
        if self.seen_counts[new_count] == 0 {
            return Ok(());
        }
        let mut h = self.hash ^ stone_key(p, color);
        for &g in &cap_heads[..n_cap] {
            self.for_each_stone(g, |s| h ^= stone_key(s, opp));
        }
        if self.bloom_may_contain(h) && self.history.contains(&h) {
            return Err(IllegalMove::Superko);
        }
        Ok(())
    }

    /// Captures and resulting liberties (counted up to `cap`) if `color`
    /// played at empty point `p`. Legality is not checked.
    pub(crate) fn place_info(&self, p: usize, color: u8, cap: u32) -> PlaceInfo {
        let opp = color ^ 3;
        let mut libs = PointSet::default();
        let mut n_libs = 0u32;
        let mut own_heads = [0usize; 4];
        let mut n_own = 0;
        let mut cap_heads = [0usize; 4];
        let mut n_cap = 0;
        let mut info = PlaceInfo { group_stones: 1, ..Default::default() };
        for d in N4 {
            let q = step(p, d);
            match self.cells[q] {
                EMPTY => {
                    if libs.insert(q) {
                        n_libs += 1;
                    }
                }
                c if c == color => {
                    let h = self.head[q] as usize;
                    if !own_heads[..n_own].contains(&h) {
                        own_heads[n_own] = h;
                        n_own += 1;
                        info.group_stones += self.stones[h] as u32;
                    }
                }
                c if c == opp => {
                    let h = self.head[q] as usize;
                    if self.libs[h] == 1 && !cap_heads[..n_cap].contains(&h) {
                        cap_heads[n_cap] = h;
                        n_cap += 1;
                        info.captured += self.stones[h] as u32;
                    }
                }
                _ => {}
            }
        }
        if n_cap == 0 {
            // each adjacent own group keeps all its liberties but `p`
            let bound = own_heads[..n_own]
                .iter()
                .map(|&h| self.libs[h] as u32 - 1)
                .max()
                .unwrap_or(0)
                .max(n_libs);
            if bound >= cap {
                info.libs = cap;
                return info;
            }
        }
        libs.insert(p);
        if n_cap > 0 {
            // captured stones adjacent to the new group become liberties
            for d in N4 {
                let q = step(p, d);
                if self.cells[q] == opp && cap_heads[..n_cap].contains(&(self.head[q] as usize)) && libs.insert(q) {
                    n_libs += 1;
                }
            }
            if n_libs < cap && n_own > 0 {
                for &g in &cap_heads[..n_cap] {
                    self.for_each_stone(g, |s| {
                        for d in N4 {
                            let r = step(s, d);
                            if self.cells[r] == color
                                && own_heads[..n_own].contains(&(self.head[r] as usize))
                                && libs.insert(s)
                            {
                                n_libs += 1;
                            }
                        }
                    });
                }
            }
        }
        for &g in &own_heads[..n_own] {
            if n_libs >= cap {
                break;
            }
            self.lib_points(g, usize::MAX, |l| {
                if libs.insert(l) {
                    n_libs += 1;
                }
            });
        }
        info.libs = n_libs.min(cap);
        info
    }

    pub(crate) fn apply_pass(&mut self) {
        self.ko = None;
        self.passes = self.passes.saturating_add(1);
        self.move_number += 1;
        self.prev_move = self.last_move;
        self.last_move = Some(Move::Pass);
        self.to_move = self.to_move.opponent();
    }

    /// Plays at `p` for the side to move. The move must be legal.
    pub(crate) fn apply_place(&mut self, p: usize) {
        let color = self.to_move.cell();
        let opp = color ^ 3;
        self.move_number += 1;
        self.put_stone(p, color, self.move_number);

        let mut adj = [usize::MAX; 4];
        for (i, d) in N4.into_iter().enumerate() {
            let q = step(p, d);
            let c = self.cells[q];
            if c == BLACK || c == WHITE {
                let h = self.head[q] as usize;
                if !adj.contains(&h) {
                    adj[i] = h;
                    self.libs[h] -= 1;
                }
            }
        }

        let mut captured = 0u32;
        let mut captured_at = 0usize;
        for d in N4 {
            let q = step(p, d);
            if self.cells[q] == opp && self.libs[self.head[q] as usize] == 0 {
                captured_at = q;
                captured += self.remove_group(self.head[q] as usize);
            }
        }

        self.libs[p] = N4.iter().filter(|&&d| self.cells[step(p, d)] == EMPTY).count() as u16;
        for d in N4 {
            let q = step(p, d);
            let (a, b) = (self.head[p] as usize, self.head[q] as usize);
            if self.cells[q] == color && a != b {
                let total = self.libs[a] + self.libs[b] - self.shared_libs(a, b);
                let keep = self.merge(a, b);
                self.libs[keep] = total;
            }
        }
        let h = self.head[p] as usize;

        self.ko = if captured == 1 && self.stones[h] == 1 && self.libs[h] == 1 {
            Some(captured_at as u16)
        } else {
            None
        };
        self.passes = 0;
        self.prev_move = self.last_move;
        self.last_move = Some(Move::Place(Coord::from_point(p)));
        self.to_move = self.to_move.opponent();
        self.history.push(self.hash);
        self.seen_counts[self.stone_count as usize] += 1;
        self.bloom_insert(self.hash);
    }

    fn put_stone(&mut self, p: usize, color: u8, age: u16) {
        self.cells[p] = color;
        self.head[p] = p as u16;
        self.next[p] = p as u16;
        self.stones[p] = 1;
        self.libs[p] = 0;
        self.age[p] = age;
        self.hash ^= stone_key(p, color);
        self.stone_count += 1;
        self.remove_empty(p);
    }

    fn remove_group(&mut self, h: usize) -> u32 {
        let color = self.cells[h];
        let mut count = 0;
        let mut s = h;
        loop {
            self.cells[s] = EMPTY;
            self.hash ^= stone_key(s, color);
            count += 1;
            s = self.next[s] as usize;
            if s == h {
                break;
            }
        }
        let mut s = h;
        loop {
            let mut bumped = [usize::MAX; 4];
            for (i, d) in N4.into_iter().enumerate() {
                let q = step(s, d);
                let c = self.cells[q];
                if c == BLACK || c == WHITE {
                    let g = self.head[q] as usize;
                    if !bumped.contains(&g) {
                        bumped[i] = g;
                        self.libs[g] += 1;
                    }
                }
            }
            let n = self.next[s] as usize;
            self.push_empty(s);
            self.age[s] = 0;
            s = n;
            if s == h {
                break;
            }
        }
        self.stone_count -= count as u16;
        count
    }

    /// Empty points adjacent to both groups (heads `a` and `b`).
    fn shared_libs(&self, a: usize, b: usize) -> u16 {
        let (small, other) = if self.stones[a] <= self.stones[b] { (a, b) } else { (b, a) };
        let mut seen = PointSet::default();
        let mut shared = 0;
        self.for_each_stone(small, |s| {
            for d in N4 {
                let e = step(s, d);
                if self.cells[e] == EMPTY
                    && seen.insert(e)
                    && N4.iter().any(|&d2| {
                        let r = step(e, d2);
                        self.cells[r] != EMPTY && self.cells[r] != OFF && self.head[r] as usize == other
                    })
                {
                    shared += 1;
                }
            }
        });
        shared
    }

    /// Joins two groups and returns the surviving head.
    fn merge(&mut self, a: usize, b: usize) -> usize {
        let (keep, gone) = if self.stones[a] >= self.stones[b] { (a, b) } else { (b, a) };
        let mut s = gone;
        loop {
            self.head[s] = keep as u16;
            s = self.next[s] as usize;
            if s == gone {
                break;
            }
        }
        self.next.swap(keep, gone);
        self.stones[keep] += self.stones[gone];
        keep
    }

    fn count_libs(&self, h: usize) -> u16 {
        let mut n = 0;
        self.lib_points(h, usize::MAX, |_| n += 1);
        n
    }

    fn push_empty(&mut self, p: usize) {
        self.empty_at[p] = self.n_empty;
        self.empties[self.n_empty as usize] = p as u16;
        self.n_empty += 1;
    }

    fn remove_empty(&mut self, p: usize) {
        let i = self.empty_at[p] as usize;
        let last = self.empties[self.n_empty as usize - 1];
        self.empties[i] = last;
        self.empty_at[last as usize] = i as u16;
        self.empty_at[p] = u16::MAX;
        self.n_empty -= 1;
    }

    fn rebuild_groups(&mut self) {
        let mut visited = PointSet::default();
        let points: Vec<usize> = self.board_points().collect();
        for &p in &points {
            let c = self.cells[p];
            if (c != BLACK && c != WHITE) || !visited.insert(p) {
                continue;
            }
            let mut members = vec![p];
            let mut i = 0;
            while i < members.len() {
                let s = members[i];
                for d in N4 {
                    let q = step(s, d);
                    if self.cells[q] == c && visited.insert(q) {
                        members.push(q);
                    }
                }
                i += 1;
            }
            for (k, &s) in members.iter().enumerate() {
                self.head[s] = p as u16;
                self.next[s] = members[(k + 1) % members.len()] as u16;
            }
            self.stones[p] = members.len() as u16;
            self.libs[p] = self.count_libs(p);
        }
    }

    fn any_dead_group(&self) -> bool {
        self.board_points()
            .any(|p| (self.cells[p] == BLACK || self.cells[p] == WHITE) && self.libs[self.head[p] as usize] == 0)
    }

    #[inline]
    fn bloom_bits(h: u64) -> [usize; 2] {
        [(h & (BLOOM_BITS - 1)) as usize, ((h >> 32) & (BLOOM_BITS - 1)) as usize]
    }

    #[inline]
    fn bloom_insert(&mut self, h: u64) {
        for b in Self::bloom_bits(h) {
            self.bloom[b / 64] |= 1 << (b % 64);
        }
    }

    #[inline]
    fn bloom_may_contain(&self, h: u64) -> bool {
        Self::bloom_bits(h).iter().all(|&b| self.bloom[b / 64] & (1 << (b % 64)) != 0)
    }

    fn reset_history(&mut self) {
        self.history.clear();
        self.history.push(self.hash);
        self.seen_counts = [0; MAX_AREA + 1];
        self.seen_counts[self.stone_count as usize] = 1;
        self.bloom = [0; BLOOM_WORDS];
        self.bloom_insert(self.hash);
    }
}
