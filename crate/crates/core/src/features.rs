//! Input planes for move prediction, encoded from the perspective of one
//! player ("our" = `perspective`).
//!
//! Plane order (fixed, shared with the evaluator wire protocol):
//!
//! | index | plane |
//! |-------|-------|
//! | 0..3  | our groups with 1, 2, >=3 liberties |
//! | 3..6  | opponent groups with 1, 2, >=3 liberties |
//! | 6     | ko point |
//! | 7     | our stones |
//! | 8     | opponent stones |
//! | 9     | empty |
//! | 10    | our history, `exp(-0.1 * t)` with `t` plies since placement |
//! | 11    | opponent history |
//! | 12..21| opponent rank, plane `i` all-1 when `i < rank` |
//! | 21    | border (extended only) |
//! | 22    | position mask `exp(-0.5 * d^2)`, `d` distance to the centre |
//! | 23    | our territory (strictly closer to our stones) |
//! | 24    | opponent territory |

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::board::{Coord, Move, Player, Position};

pub const STANDARD_PLANES: usize = 21;
pub const EXTENDED_PLANES: usize = 25;

pub const PLANE_OUR_LIBS: usize = 0;
pub const PLANE_OPP_LIBS: usize = 3;
pub const PLANE_KO: usize = 6;
pub const PLANE_OUR_STONES: usize = 7;
pub const PLANE_OPP_STONES: usize = 8;
pub const PLANE_EMPTY: usize = 9;
pub const PLANE_OUR_HISTORY: usize = 10;
pub const PLANE_OPP_HISTORY: usize = 11;
pub const PLANE_RANK: usize = 12;
pub const PLANE_BORDER: usize = 21;
pub const PLANE_POSITION_MASK: usize = 22;
pub const PLANE_OUR_TERRITORY: usize = 23;
pub const PLANE_OPP_TERRITORY: usize = 24;

const HISTORY_DECAY: f32 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    Standard,
    Extended,
}

impl FeatureSet {
    pub fn planes(self) -> usize {
        match self {
            FeatureSet::Standard => STANDARD_PLANES,
            FeatureSet::Extended => EXTENDED_PLANES,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureSet::Standard => "standard",
            FeatureSet::Extended => "extended",
        }
    }
}

impl std::str::FromStr for FeatureSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(FeatureSet::Standard),
            "extended" => Ok(FeatureSet::Extended),
            other => Err(format!("unknown feature set '{other}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTensor {
    size: usize,
    set: FeatureSet,
    perspective: Player,
    /// Plane-major, row-major.
    data: Vec<f32>,
}

impl FeatureTensor {
    pub fn zeros(size: usize, set: FeatureSet, perspective: Player) -> FeatureTensor {
        FeatureTensor { size, set, perspective, data: vec![0.0; set.planes() * size * size] }
    }

    pub fn from_data(size: usize, set: FeatureSet, perspective: Player, data: Vec<f32>) -> Option<FeatureTensor> {
        (data.len() == set.planes() * size * size).then_some(FeatureTensor { size, set, perspective, data })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn set(&self) -> FeatureSet {
        self.set
    }

    pub fn perspective(&self) -> Player {
        self.perspective
    }

    pub fn num_planes(&self) -> usize {
        self.set.planes()
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn plane(&self, i: usize) -> &[f32] {
        let a = self.size * self.size;
        &self.data[i * a..(i + 1) * a]
    }

    #[inline]
    pub fn get(&self, plane: usize, c: Coord) -> f32 {
        self.data[plane * self.size * self.size + c.index(self.size)]
    }

    #[inline]
    fn set_at(&mut self, plane: usize, c: Coord, v: f32) {
        let a = self.size * self.size;
        self.data[plane * a + c.index(self.size)] = v;
    }

    /// Spatially permutes every plane by `sym`.
    pub fn transform(&self, sym: Symmetry) -> FeatureTensor {
        let n = self.size;
        let a = n * n;
        let mut out = FeatureTensor::zeros(n, self.set, self.perspective);
        for i in 0..a {
            let j = sym.apply(Coord::from_index(i, n), n).index(n);
            for plane in 0..self.num_planes() {
                out.data[plane * a + j] = self.data[plane * a + i];
            }
        }
        out
    }

    /// Little-endian float32 bytes, plane-major, row-major.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        self.data.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    pub fn from_le_bytes(size: usize, set: FeatureSet, perspective: Player, bytes: &[u8]) -> Option<FeatureTensor> {
        if bytes.len() % 4 != 0 {
            return None;
        }
        let data = bytes.chunks_exact(4).map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])).collect();
        FeatureTensor::from_data(size, set, perspective, data)
    }
}

/// Encodes `pos` from `perspective`. `opponent_rank` is 0 for kyu or unknown
/// players, 1..=9 for 1d..9d (9 also for professionals).
pub fn extract(pos: &Position, perspective: Player, opponent_rank: u8, set: FeatureSet) -> FeatureTensor {
    let n = pos.size();
    let mut t = FeatureTensor::zeros(n, set, perspective);
    let now = pos.move_number();
    for i in 0..n * n {
        let c = Coord::from_index(i, n);
        match pos.stone_at(c) {
            None => t.set_at(PLANE_EMPTY, c, 1.0),
            Some(owner) => {
                let ours = owner == perspective;
                let libs = pos.group_liberties(c).unwrap_or(0);
                let lib_plane = if ours { PLANE_OUR_LIBS } else { PLANE_OPP_LIBS } + libs.clamp(1, 3) - 1;
                t.set_at(lib_plane, c, 1.0);
                t.set_at(if ours { PLANE_OUR_STONES } else { PLANE_OPP_STONES }, c, 1.0);
                let age = now.saturating_sub(pos.age_at(c).unwrap_or(0));
                let hist = (-(age as f32) * HISTORY_DECAY).exp();
                t.set_at(if ours { PLANE_OUR_HISTORY } else { PLANE_OPP_HISTORY }, c, hist);
            }
        }
    }
    if let Some(k) = pos.ko_point() {
        t.set_at(PLANE_KO, k, 1.0);
    }
    let a = n * n;
    let rank = opponent_rank.min(9) as usize;
    for plane in PLANE_RANK..PLANE_RANK + rank {
        t.data[plane * a..(plane + 1) * a].fill(1.0);
    }
    if set == FeatureSet::Extended {
        let centre = (n as f32 - 1.0) / 2.0;
        for i in 0..a {
            let c = Coord::from_index(i, n);
            let (x, y) = (c.col as usize, c.row as usize);
            if x == 0 || y == 0 || x == n - 1 || y == n - 1 {
                t.set_at(PLANE_BORDER, c, 1.0);
            }
            let d2 = (x as f32 - centre).powi(2) + (y as f32 - centre).powi(2);
            t.set_at(PLANE_POSITION_MASK, c, (-0.5 * d2).exp());
        }
        let ours = stone_distances(pos, perspective);
        let theirs = stone_distances(pos, perspective.opponent());
        for i in 0..a {
            let c = Coord::from_index(i, n);
            if ours[i] < theirs[i] {
                t.set_at(PLANE_OUR_TERRITORY, c, 1.0);
            } else if theirs[i] < ours[i] {
                t.set_at(PLANE_OPP_TERRITORY, c, 1.0);
            }
        }
    }
    t
}

/// Multi-source BFS distance over the grid from every stone of `player`;
/// `u32::MAX` where no such stone exists.
fn stone_distances(pos: &Position, player: Player) -> Vec<u32> {
    let n = pos.size();
    let mut dist = vec![u32::MAX; n * n];
    let mut queue = VecDeque::new();
    for (i, s) in pos.stones().into_iter().enumerate() {
        if s == Some(player) {
            dist[i] = 0;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = (i % n, i / n);
        let mut visit = |j: usize| {
            if dist[j] == u32::MAX {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        };
        if x > 0 {
            visit(i - 1);
        }
        if x + 1 < n {
            visit(i + 1);
        }
        if y > 0 {
            visit(i - n);
        }
        if y + 1 < n {
            visit(i + n);
        }
    }
    dist
}

/// The eight dihedral symmetries of the square board.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Identity,
    Rot90,
    Rot180,
    Rot270,
    FlipHorizontal,
    FlipVertical,
    Transpose,
    AntiTranspose,
}

impl Symmetry {
    pub const ALL: [Symmetry; 8] = [
        Symmetry::Identity,
        Symmetry::Rot90,
        Symmetry::Rot180,
        Symmetry::Rot270,
        Symmetry::FlipHorizontal,
        Symmetry::FlipVertical,
        Symmetry::Transpose,
        Symmetry::AntiTranspose,
    ];

    pub fn apply(self, c: Coord, size: usize) -> Coord {
        let m = size as u8 - 1;
        let (x, y) = (c.col, c.row);
        let (nx, ny) = match self {
            Symmetry::Identity => (x, y),
            Symmetry::Rot90 => (m - y, x),
            Symmetry::Rot180 => (m - x, m - y),
            Symmetry::Rot270 => (y, m - x),
            Symmetry::FlipHorizontal => (m - x, y),
            Symmetry::FlipVertical => (x, m - y),
            Symmetry::Transpose => (y, x),
            Symmetry::AntiTranspose => (m - y, m - x),
        };
        Coord::new(nx, ny)
    }

    pub fn inverse(self) -> Symmetry {
        match self {
            Symmetry::Rot90 => Symmetry::Rot270,
            Symmetry::Rot270 => Symmetry::Rot90,
            other => other,
        }
    }

    /// `self` applied after `first`.
    pub fn after(self, first: Symmetry) -> Symmetry {
        // resolve by probing a 3x3 board, where the images of two corners
        // determine the transform
        let probe = |s: Symmetry| (s.apply(Coord::new(0, 0), 3), s.apply(Coord::new(2, 0), 3));
        let target = (
            self.apply(first.apply(Coord::new(0, 0), 3), 3),
            self.apply(first.apply(Coord::new(2, 0), 3), 3),
        );
        Symmetry::ALL.into_iter().find(|&s| probe(s) == target).expect("dihedral group is closed")
    }
}

pub fn transform_move(mv: Move, sym: Symmetry, size: usize) -> Move {
    match mv {
        Move::Place(c) => Move::Place(sym.apply(c, size)),
        other => other,
    }
}

/// `pos` with every stone, the ko point and the last moves mapped by `sym`.
pub fn transform_position(pos: &Position, sym: Symmetry) -> Position {
    let n = pos.size();
    pos.remapped(|c| sym.apply(c, n))
}
