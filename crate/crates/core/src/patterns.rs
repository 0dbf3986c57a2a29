//! 3x3 shape patterns used by the playout policy and the baseline evaluator.
//!
//! File format: one pattern per line, eight neighbour characters in the
//! order NW N NE W E SW S SE over `B`, `W`, `.` (empty) and `#` (off board),
//! then a weight. Lines starting with `;` and blank lines are ignored. Every
//! pattern also matches its rotations, reflections and colour swap.

use std::sync::OnceLock;

use thiserror::Error;

use crate::board::{Coord, Position, STRIDE};

const BUILTIN: &str = include_str!("../data/pat3.txt");

/// Neighbour offsets in file order: NW N NE W E SW S SE.
const RING: [isize; 8] = [
    -(STRIDE as isize) - 1,
    -(STRIDE as isize),
    -(STRIDE as isize) + 1,
    -1,
    1,
    STRIDE as isize - 1,
    STRIDE as isize,
    STRIDE as isize + 1,
];

#[derive(Debug, Error, PartialEq)]
pub enum PatternError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Clone)]
pub struct PatternTable {
    weights: Vec<u16>,
    len: usize,
}

fn cell_code(ch: char) -> Option<u16> {
    match ch {
        '.' => Some(0),
        'B' => Some(1),
        'W' => Some(2),
        '#' => Some(3),
        _ => None,
    }
}

fn encode(cells: &[u16; 8]) -> usize {
    cells.iter().enumerate().fold(0, |acc, (i, &c)| acc | ((c as usize) << (2 * i)))
}

/// Cell layout as a 3x3 grid (centre omitted): index -> (x, y).
const GRID_POS: [(i32, i32); 8] = [(0, 0), (1, 0), (2, 0), (0, 1), (2, 1), (0, 2), (1, 2), (2, 2)];

fn ring_index(x: i32, y: i32) -> usize {
    GRID_POS.iter().position(|&p| p == (x, y)).expect("not a ring cell")
}

fn variants(cells: [u16; 8]) -> Vec<[u16; 8]> {
    let mut out = Vec::with_capacity(16);
    for sym in 0..8 {
        let mut t = [0u16; 8];
        for (i, &(x, y)) in GRID_POS.iter().enumerate() {
            let (mut nx, mut ny) = (x, y);
            if sym & 4 != 0 {
                std::mem::swap(&mut nx, &mut ny);
            }
            if sym & 1 != 0 {
                nx = 2 - nx;
            }
            if sym & 2 != 0 {
                ny = 2 - ny;
            }
            t[ring_index(nx, ny)] = cells[i];
        }
        out.push(t);
        out.push(t.map(|c| match c {
            1 => 2,
            2 => 1,
            other => other,
        }));
    }
    out
}

impl PatternTable {
    pub fn parse(text: &str) -> Result<PatternTable, PatternError> {
        let mut weights = vec![0u16; 1 << 16];
        let mut len = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with(';') {
                continue;
            }
            let err = |message: &str| PatternError::Syntax { line: i + 1, message: message.to_string() };
            let mut parts = line.split_whitespace();
            let shape = parts.next().ok_or_else(|| err("missing shape"))?;
            let weight: u16 = parts
                .next()
                .ok_or_else(|| err("missing weight"))?
                .parse()
                .map_err(|_| err("weight is not an integer"))?;
            if weight == 0 {
                return Err(err("weight must be positive"));
            }
            let chars: Vec<char> = shape.chars().collect();
            if chars.len() != 8 {
                return Err(err("shape must have 8 characters"));
            }
            let mut cells = [0u16; 8];
            for (k, &ch) in chars.iter().enumerate() {
                cells[k] = cell_code(ch).ok_or_else(|| err("shape characters must be B, W, . or #"))?;
            }
            for v in variants(cells) {
                let code = encode(&v);
                weights[code] = weights[code].max(weight);
            }
            len += 1;
        }
        Ok(PatternTable { weights, len })
    }

    /// The pattern set shipped in `data/pat3.txt`.
    pub fn builtin() -> &'static PatternTable {
        static TABLE: OnceLock<PatternTable> = OnceLock::new();
        TABLE.get_or_init(|| PatternTable::parse(BUILTIN).expect("builtin pattern table is valid"))
    }

    /// Number of source patterns (before symmetry expansion).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Weight of the pattern around empty point `c`, 0 if none matches.
    pub fn weight(&self, pos: &Position, c: Coord) -> u16 {
        if !c.in_bounds(pos.size()) || pos.stone_at(c).is_some() {
            return 0;
        }
        self.weight_at(pos, c.point())
    }

    pub fn matches(&self, pos: &Position, c: Coord) -> bool {
        self.weight(pos, c) > 0
    }

    #[inline]
    pub(crate) fn weight_at(&self, pos: &Position, p: usize) -> u16 {
        let mut code = 0usize;
        for (i, d) in RING.into_iter().enumerate() {
            code |= (pos.cell(crate::board::step(p, d)) as usize) << (2 * i);
        }
        self.weights[code]
    }
}
