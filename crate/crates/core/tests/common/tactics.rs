//! Constructed 9x9 tactical problems with verified answer sets.
//!
//! Capture, escape and capture-choice problems are small diagrams placed at a
//! random spot under a random symmetry, with a little distant clutter. Their
//! answers are every move that reaches the best material balance under
//! full-width minimax. Ladder problems come from the chase generator and are
//! answered by the exhaustive ladder search.

use std::fmt;

use darkgo::{Coord, Move, Player, Position};
use rand::Rng;

use super::{ladder_oracle, ladder_problem, root_values, RefBoard, LadderVerdict};

pub const SIZE: usize = 9;
pub const MINIMAX_DEPTH: usize = 3;
pub const MAX_ANSWERS: usize = 3;
const LADDER_CAP: usize = darkgo::ladder::DEFAULT_DEPTH_CAP;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Capture,
    Escape,
    CaptureChoice,
    LadderCapture,
    LadderEscape,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Capture => "capture",
            Kind::Escape => "escape",
            Kind::CaptureChoice => "capture-choice",
            Kind::LadderCapture => "ladder-capture",
            Kind::LadderEscape => "ladder-escape",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub kind: Kind,
    pub position: Position,
    pub answers: Vec<Move>,
}

impl Problem {
    pub fn solved_by(&self, mv: Move) -> bool {
        self.answers.contains(&mv)
    }
}

// X = side to move, O = opponent, * = intended answer, . = must stay empty.
const CAPTURES: [&str; 3] = [
    ".X.
     XO*
     .X.",
    ".XX.
     XOO*
     .XX.",
    ".XX.
     XOOX
     .XO*
     ..X.",
];

const ESCAPES: [&str; 3] = [
    ".O.
     OX*
     .O.",
    ".OO.
     OXX*
     .OO.",
    ".OOO.
     OXXX*
     .OOO.",
];

// Three stones in atari next to a cutting stone that is itself in atari.
const CHOICE: &str = ".OOOX.
                      .XXXO*
                      .OOOX.";

// Two opponent stones in atari elsewhere: the greedy capture.
const BAIT: &str = ".XX.
                    XOO.
                    .XX.";

struct Template {
    w: usize,
    h: usize,
    cells: Vec<(usize, usize, char)>,
}

fn parse(diagram: &str) -> Template {
    let rows: Vec<Vec<char>> = diagram.lines().map(|l| l.trim().chars().collect()).filter(|r: &Vec<char>| !r.is_empty()).collect();
    let h = rows.len();
    let w = rows[0].len();
    assert!(rows.iter().all(|r| r.len() == w), "ragged diagram");
    let cells = rows.iter().enumerate().flat_map(|(y, r)| r.iter().enumerate().map(move |(x, &c)| (x, y, c))).collect();
    Template { w, h, cells }
}

/// Places a template under one of the eight symmetries at a random offset
/// that leaves a one-point margin; returns board cells with their marks.
fn place<R: Rng>(t: &Template, rng: &mut R) -> Option<Vec<(usize, char)>> {
    let sym = rng.gen_range(0..8);
    let map = |x: usize, y: usize| -> (usize, usize) {
        let (x, y) = if sym & 4 != 0 { (y, x) } else { (x, y) };
        let (w, h) = if sym & 4 != 0 { (t.h, t.w) } else { (t.w, t.h) };
        let x = if sym & 1 != 0 { w - 1 - x } else { x };
        let y = if sym & 2 != 0 { h - 1 - y } else { y };
        (x, y)
    };
    let (w, h) = if sym & 4 != 0 { (t.h, t.w) } else { (t.w, t.h) };
    if w + 2 > SIZE || h + 2 > SIZE {
        return None;
    }
    let ox = rng.gen_range(1..=SIZE - 1 - w);
    let oy = rng.gen_range(1..=SIZE - 1 - h);
    Some(
        t.cells
            .iter()
            .map(|&(x, y, c)| {
                let (x, y) = map(x, y);
                ((oy + y) * SIZE + ox + x, c)
            })
            .collect(),
    )
}

fn chebyshev(a: usize, b: usize) -> usize {
    let (ax, ay, bx, by) = (a % SIZE, a / SIZE, b % SIZE, b / SIZE);
    ax.abs_diff(bx).max(ay.abs_diff(by))
}

/// Builds the board from placed templates plus up to six clutter stones at
/// least two points from every template cell, each with three liberties.
fn assemble<R: Rng>(parts: &[Vec<(usize, char)>], me: Player, rng: &mut R) -> Option<(RefBoard, Vec<usize>)> {
    let mut b = RefBoard::new(SIZE);
    b.to_move = me;
    let mut marked = Vec::new();
    let mut used = Vec::new();
    for part in parts {
        if part.iter().any(|&(i, _)| used.iter().any(|&u| chebyshev(u, i) < 2)) {
            return None;
        }
        for &(i, c) in part {
            used.push(i);
            match c {
                'X' => b.cells[i] = Some(me),
                'O' => b.cells[i] = Some(me.opponent()),
                '*' => marked.push(i),
                _ => {}
            }
        }
    }
    let clutter = rng.gen_range(0..=6);
    for _ in 0..clutter {
        let i = rng.gen_range(0..SIZE * SIZE);
        if b.cells[i].is_some() || used.iter().any(|&u| chebyshev(u, i) < 2) {
            continue;
        }
        b.cells[i] = Some(if rng.gen() { me } else { me.opponent() });
        if b.liberties(i) < 3 {
            b.cells[i] = None;
        }
    }
    if (0..SIZE * SIZE).any(|i| b.cells[i].is_some() && b.liberties(i) == 0) {
        return None;
    }
    Some((b, marked))
}

/// Moves reaching the best minimax value, if the intended moves are among
/// them and there are few of them.
fn minimax_answers(b: &RefBoard, intended: &[usize]) -> Option<Vec<usize>> {
    let values = root_values(b, MINIMAX_DEPTH);
    let best = values.iter().map(|v| v.1).max()?;
    let answers: Vec<usize> = values.iter().filter(|v| v.1 == best).map(|v| v.0).collect();
    (best > values.iter().map(|v| v.1).min()? && answers.len() <= MAX_ANSWERS && intended.iter().all(|i| answers.contains(i))).then_some(answers)
}

fn to_position(b: &RefBoard) -> Option<Position> {
    Position::from_stones(SIZE, &b.cells, b.to_move).ok()
}

fn moves_of(answers: &[usize]) -> Vec<Move> {
    answers.iter().map(|&i| Move::Place(Coord::from_index(i, SIZE))).collect()
}

fn template_problem<R: Rng>(kind: Kind, variant: usize, rng: &mut R) -> Option<Problem> {
    let me = if rng.gen() { Player::Black } else { Player::White };
    let parts = match kind {
        Kind::Capture => vec![place(&parse(CAPTURES[variant % CAPTURES.len()]), rng)?],
        Kind::Escape => vec![place(&parse(ESCAPES[variant % ESCAPES.len()]), rng)?],
        Kind::CaptureChoice => vec![place(&parse(CHOICE), rng)?, place(&parse(BAIT), rng)?],
        _ => unreachable!(),
    };
    let (b, intended) = assemble(&parts, me, rng)?;
    let answers = minimax_answers(&b, &intended)?;
    Some(Problem { kind, position: to_position(&b)?, answers: moves_of(&answers) })
}

/// Every group other than the chased one has at least two liberties.
fn quiet_apart_from(b: &RefBoard, target: usize) -> bool {
    let (chased, _) = b.group(target);
    (0..SIZE * SIZE).all(|i| b.cells[i].is_none() || chased.contains(&i) || b.liberties(i) >= 2)
}

fn ladder_kind_problem<R: Rng>(kind: Kind, rng: &mut R) -> Option<Problem> {
    let (pos, target) = ladder_problem(SIZE, rng)?;
    let t = target.index(SIZE);
    let b = RefBoard::from_position(&pos);
    if !quiet_apart_from(&b, t) {
        return None;
    }
    let defender = b.cells[t]?;
    let libs = b.liberties(t);
    let answers: Vec<usize> = match kind {
        Kind::LadderCapture if libs == 2 && b.to_move != defender => {
            if ladder_oracle(&b, t, LADDER_CAP) != LadderVerdict::Captured {
                return None;
            }
            b.group(t)
                .1
                .into_iter()
                .filter(|&l| {
                    let mut next = b.clone();
                    next.play(l).is_ok() && next.liberties(t) == 1 && ladder_oracle(&next, t, LADDER_CAP) == LadderVerdict::Captured
                })
                .collect()
        }
        Kind::LadderEscape if libs == 1 && b.to_move == defender => {
            if ladder_oracle(&b, t, LADDER_CAP) != LadderVerdict::Escapes {
                return None;
            }
            (0..SIZE * SIZE)
                .filter(|&m| {
                    let mut next = b.clone();
                    if next.play(m).is_err() || next.cells[t] != Some(defender) {
                        return false;
                    }
                    match next.liberties(t) {
                        1 => false,
                        2 => ladder_oracle(&next, t, LADDER_CAP) == LadderVerdict::Escapes,
                        _ => true,
                    }
                })
                .collect()
        }
        _ => return None,
    };
    if answers.is_empty() || answers.len() > MAX_ANSWERS {
        return None;
    }
    // the answers must also hold up under short full-width reading
    let values = root_values(&b, 2);
    let best = values.iter().map(|v| v.1).max()?;
    if !answers.iter().all(|a| values.iter().any(|v| v.0 == *a && v.1 == best)) {
        return None;
    }
    Some(Problem { kind, position: pos, answers: moves_of(&answers) })
}

pub const MIX: [(Kind, usize); 5] = [
    (Kind::Capture, 10),
    (Kind::Escape, 10),
    (Kind::CaptureChoice, 10),
    (Kind::LadderCapture, 10),
    (Kind::LadderEscape, 10),
];

pub fn problem(kind: Kind, k: usize) -> Problem {
    let mut r = super::rng(0x7ac7_1c00 ^ (kind as u64) << 32 ^ k as u64);
    loop {
        let p = match kind {
            Kind::Capture | Kind::Escape | Kind::CaptureChoice => template_problem(kind, k, &mut r),
            _ => ladder_kind_problem(kind, &mut r),
        };
        if let Some(p) = p {
            return p;
        }
    }
}

/// The fixed 50-problem suite; repeated diagrams are skipped.
pub fn suite() -> Vec<Problem> {
    let mut out: Vec<Problem> = Vec::new();
    for &(kind, count) in MIX.iter() {
        let mut k = 0;
        let mut found = 0;
        while found < count {
            let p = problem(kind, k);
            k += 1;
            if out.iter().all(|q| q.position.stones() != p.position.stones()) {
                out.push(p);
                found += 1;
            }
        }
    }
    out
}
