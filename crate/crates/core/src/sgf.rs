//! Minimal SGF (FF[4]) reader and writer. Only the main line of a single game
//! is kept; variations, comments and markup are skipped.

use std::fmt::Write as _;

use thiserror::Error;

use crate::board::{Coord, IllegalMove, Move, Player, Position};

#[derive(Debug, Error, PartialEq)]
pub enum SgfError {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("illegal move {index} in record: {reason}")]
    IllegalMoveInRecord { index: usize, reason: IllegalMove },
}

fn parse_err(offset: usize, message: impl Into<String>) -> SgfError {
    SgfError::Parse { offset, message: message.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameRecord {
    pub size: usize,
    pub komi: f32,
    pub handicap: u32,
    /// Setup stones (AB/AW), in file order.
    pub setup: Vec<(Player, Coord)>,
    pub result: Option<String>,
    pub moves: Vec<(Player, Move)>,
    pub black_name: Option<String>,
    pub white_name: Option<String>,
    pub black_rank: Option<String>,
    pub white_rank: Option<String>,
}

impl GameRecord {
    pub fn new(size: usize, komi: f32) -> GameRecord {
        GameRecord {
            size,
            komi,
            handicap: 0,
            setup: Vec::new(),
            result: None,
            moves: Vec::new(),
            black_name: None,
            white_name: None,
            black_rank: None,
            white_rank: None,
        }
    }

    /// Position after setup stones, before any move.
    pub fn initial_position(&self) -> Result<Position, SgfError> {
        let mut pos = Position::new(self.size);
        for &(player, c) in &self.setup {
            pos.setup_stone(c, player).map_err(|reason| SgfError::IllegalMoveInRecord { index: 0, reason })?;
        }
        if self.setup.iter().any(|&(p, _)| p == Player::Black) && !self.setup.iter().any(|&(p, _)| p == Player::White) {
            pos.set_to_move(Player::White);
        }
        if let Some(&(first, _)) = self.moves.first() {
            pos.set_to_move(first);
        }
        Ok(pos)
    }

    /// Replays every move, returning the final position.
    pub fn replay(&self) -> Result<Position, SgfError> {
        let mut pos = self.initial_position()?;
        for (index, &(player, mv)) in self.moves.iter().enumerate() {
            if player != pos.to_move() {
                pos.set_to_move(player);
            }
            if mv == Move::Resign {
                break;
            }
            pos.play_mut(mv).map_err(|reason| SgfError::IllegalMoveInRecord { index, reason })?;
        }
        Ok(pos)
    }
}

/// Rank string to the 0..=9 level used by the rank planes: kyu or unknown is
/// 0, `Nd` is N (capped at 9), professionals are 9.
pub fn rank_level(rank: &str) -> u8 {
    let r = rank.trim().trim_end_matches('?').trim_end_matches('*').to_ascii_lowercase();
    if r.ends_with('p') {
        return 9;
    }
    if let Some(d) = r.strip_suffix('d') {
        return d.parse::<u8>().map(|v| v.min(9)).unwrap_or(0);
    }
    0
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

type Node = Vec<(String, Vec<String>)>;

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<(), SgfError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(parse_err(self.pos, format!("expected '{}'", b as char)))
        }
    }

    /// Parses a game tree, appending the main line's nodes to `out`.
    fn game_tree(&mut self, out: &mut Vec<Node>, main: bool) -> Result<(), SgfError> {
        self.expect(b'(')?;
        let mut sequence_seen = false;
        let mut first_child = true;
        loop {
            match self.peek() {
                Some(b';') => {
                    if !first_child {
                        return Err(parse_err(self.pos, "node after variation"));
                    }
                    self.pos += 1;
                    let node = self.node()?;
                    if main {
                        out.push(node);
                    }
                    sequence_seen = true;
                }
                Some(b'(') => {
                    let keep = main && first_child;
                    first_child = false;
                    self.game_tree(out, keep)?;
                }
                Some(b')') => {
                    self.pos += 1;
                    if !sequence_seen {
                        return Err(parse_err(self.pos - 1, "empty game tree"));
                    }
                    return Ok(());
                }
                Some(_) => return Err(parse_err(self.pos, "unexpected character")),
                None => return Err(parse_err(self.pos, "unterminated game tree")),
            }
        }
    }

    fn node(&mut self) -> Result<Node, SgfError> {
        let mut props = Vec::new();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_uppercase() => {
                    let start = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                        self.pos += 1;
                    }
                    let ident: String = std::str::from_utf8(&self.src[start..self.pos])
                        .unwrap_or_default()
                        .chars()
                        .filter(|c| c.is_ascii_uppercase())
                        .collect();
                    let mut values = Vec::new();
                    while self.peek() == Some(b'[') {
                        values.push(self.value()?);
                    }
                    if values.is_empty() {
                        return Err(parse_err(self.pos, format!("property {ident} has no value")));
                    }
                    props.push((ident, values));
                }
                _ => return Ok(props),
            }
        }
    }

    fn value(&mut self) -> Result<String, SgfError> {
        let start = self.pos;
        self.expect(b'[')?;
        let mut bytes = Vec::new();
        loop {
            match self.src.get(self.pos) {
                None => return Err(parse_err(start, "unterminated property value")),
                Some(b'\\') => {
                    if let Some(&b) = self.src.get(self.pos + 1) {
                        bytes.push(b);
                    }
                    self.pos += 2;
                }
                Some(b']') => {
                    self.pos += 1;
                    return Ok(String::from_utf8_lossy(&bytes).into_owned());
                }
                Some(&b) => {
                    bytes.push(b);
                    self.pos += 1;
                }
            }
        }
    }
}

fn parse_point(v: &str, size: usize, offset: usize) -> Result<Option<Coord>, SgfError> {
    let b = v.as_bytes();
    if b.is_empty() || (v == "tt" && size <= 19) {
        return Ok(None);
    }
    if b.len() != 2 || !b[0].is_ascii_lowercase() || !b[1].is_ascii_lowercase() {
        return Err(parse_err(offset, format!("bad point '{v}'")));
    }
    let c = Coord::new(b[0] - b'a', b[1] - b'a');
    if !c.in_bounds(size) {
        return Err(parse_err(offset, format!("point '{v}' outside {size}x{size} board")));
    }
    Ok(Some(c))
}

pub fn parse(text: &str) -> Result<GameRecord, SgfError> {
    let mut parser = Parser { src: text.as_bytes(), pos: 0 };
    let mut nodes = Vec::new();
    parser.game_tree(&mut nodes, true)?;
    let end = parser.pos;

    let mut record = GameRecord::new(19, 0.0);
    for (ident, values) in nodes.iter().flatten() {
        if ident == "SZ" {
            let v = values[0].split(':').next().unwrap_or("");
            record.size = v.trim().parse().map_err(|_| parse_err(end, format!("bad SZ '{v}'")))?;
            if !(2..=crate::board::MAX_SIZE).contains(&record.size) {
                return Err(parse_err(end, format!("unsupported board size {}", record.size)));
            }
        }
    }
    for (ident, values) in nodes.iter().flatten() {
        let first = values[0].trim();
        match ident.as_str() {
            "KM" => record.komi = first.parse().map_err(|_| parse_err(end, format!("bad KM '{first}'")))?,
            "HA" => record.handicap = first.parse().map_err(|_| parse_err(end, format!("bad HA '{first}'")))?,
            "RE" => record.result = Some(first.to_string()),
            "PB" => record.black_name = Some(first.to_string()),
            "PW" => record.white_name = Some(first.to_string()),
            "BR" => record.black_rank = Some(first.to_string()),
            "WR" => record.white_rank = Some(first.to_string()),
            "AB" | "AW" => {
                let player = if ident == "AB" { Player::Black } else { Player::White };
                for v in values {
                    if let Some(c) = parse_point(v, record.size, end)? {
                        record.setup.push((player, c));
                    }
                }
            }
            "B" | "W" => {
                let player = if ident == "B" { Player::Black } else { Player::White };
                let mv = match parse_point(first, record.size, end)? {
                    Some(c) => Move::Place(c),
                    None => Move::Pass,
                };
                record.moves.push((player, mv));
            }
            _ => {}
        }
    }
    Ok(record)
}

fn escape(v: &str) -> String {
    v.replace('\\', "\\\\").replace(']', "\\]")
}

fn point_str(c: Coord) -> String {
    format!("{}{}", (b'a' + c.col) as char, (b'a' + c.row) as char)
}

pub fn serialize(record: &GameRecord) -> String {
    let mut out = String::new();
    write!(out, "(;FF[4]GM[1]SZ[{}]KM[{}]", record.size, record.komi).unwrap();
    if record.handicap > 0 {
        write!(out, "HA[{}]", record.handicap).unwrap();
    }
    for (ident, v) in [
        ("PB", &record.black_name),
        ("PW", &record.white_name),
        ("BR", &record.black_rank),
        ("WR", &record.white_rank),
        ("RE", &record.result),
    ] {
        if let Some(v) = v {
            write!(out, "{ident}[{}]", escape(v)).unwrap();
        }
    }
    for (player, ident) in [(Player::Black, "AB"), (Player::White, "AW")] {
        let points: Vec<_> = record.setup.iter().filter(|(p, _)| *p == player).collect();
        if !points.is_empty() {
            out.push_str(ident);
            for (_, c) in points {
                write!(out, "[{}]", point_str(*c)).unwrap();
            }
        }
    }
    for (i, (player, mv)) in record.moves.iter().enumerate() {
        if i % 10 == 0 {
            out.push('\n');
        }
        let v = match mv {
            Move::Place(c) => point_str(*c),
            _ => String::new(),
        };
        write!(out, ";{player}[{v}]").unwrap();
    }
    out.push_str(")\n");
    out
}
