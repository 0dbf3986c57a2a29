//! Ladder reading: does chasing a group with repeated ataris capture it?

use crate::board::{step, Coord, Move, Player, Position, BLACK, N4, WHITE};

/// Plies read before giving up and calling the ladder broken.
pub const DEFAULT_DEPTH_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderResult {
    CapturedByLadder,
    Escapes,
    /// Target is empty or has more than two liberties.
    NotALadder,
}

/// Reads the ladder on the group at `target`. With one liberty the defender
/// moves first (it is in atari); with two the attacker moves first and may
/// only play ataris. The defender may extend or capture an adjacent attacker
/// group in atari. Reaching three liberties, or the depth cap, is an escape.
pub fn read_ladder(pos: &Position, target: Coord) -> LadderResult {
    read_ladder_with_cap(pos, target, DEFAULT_DEPTH_CAP)
}

pub fn read_ladder_with_cap(pos: &Position, target: Coord, depth_cap: usize) -> LadderResult {
    let Some(defender) = pos.stone_at(target) else {
        return LadderResult::NotALadder;
    };
    let libs = pos.group_liberties(target).unwrap_or(0);
    let mut work = pos.clone();
    let captured = match libs {
        1 => {
            if work.to_move() != defender {
                work.set_to_move(defender);
            }
            !defender_escapes(&mut work, target.point(), 0, depth_cap)
        }
        2 => {
            if work.to_move() == defender {
                work.set_to_move(defender.opponent());
            }
            attacker_captures(&mut work, target.point(), 0, depth_cap)
        }
        _ => return LadderResult::NotALadder,
    };
    if captured {
        LadderResult::CapturedByLadder
    } else {
        LadderResult::Escapes
    }
}

fn attacker_captures(pos: &mut Position, t: usize, depth: usize, cap: usize) -> bool {
    let defender = pos.cell(t);
    if defender != BLACK && defender != WHITE {
        return true;
    }
    let libs = pos.libs_of(t);
    if libs == 1 {
        let l = pos.atari_liberty(t).expect("one liberty");
        if pos.check_place(l, defender ^ 3).is_ok() {
            return true;
        }
        return false;
    }
    if libs >= 3 || depth >= cap {
        return false;
    }
    let mut points = Vec::with_capacity(2);
    pos.lib_points(pos.head_of(t), 2, |l| points.push(l));
    points.sort_unstable();
    let attacker = defender ^ 3;
    for l in points {
        if pos.check_place(l, attacker).is_err() {
            continue;
        }
        let mut next = pos.clone();
        next.apply_place(l);
        if next.cell(t) != defender || next.libs_of(t) == 1 && !defender_escapes(&mut next, t, depth + 1, cap) {
            return true;
        }
    }
    false
}

fn defender_escapes(pos: &mut Position, t: usize, depth: usize, cap: usize) -> bool {
    let defender = pos.cell(t);
    if defender != BLACK && defender != WHITE {
        return false;
    }
    let libs = pos.libs_of(t);
    if libs >= 3 || depth >= cap {
        return true;
    }
    let mut moves = Vec::new();
    defender_moves(pos, t, &mut moves);
    if moves.is_empty() {
        pos.apply_pass();
        return !attacker_captures(pos, t, depth + 1, cap);
    }
    for m in moves {
        let mut next = pos.clone();
        next.apply_place(m);
        if !attacker_captures(&mut next, t, depth + 1, cap) {
            return true;
        }
    }
    false
}

fn defender_moves(pos: &Position, t: usize, out: &mut Vec<usize>) {
    let defender = pos.cell(t);
    let attacker = defender ^ 3;
    pos.lib_points(pos.head_of(t), 4, |l| out.push(l));
    pos.for_each_stone(pos.head_of(t), |s| {
        for d in N4 {
            let q = step(s, d);
            if pos.cell(q) == attacker {
                if let Some(l) = pos.atari_liberty(q) {
                    out.push(l);
                }
            }
        }
    });
    out.sort_unstable();
    out.dedup();
    out.retain(|&m| pos.check_place(m, defender).is_ok());
}

/// Moves for the side to move that start a working ladder on an opponent
/// group with two liberties.
pub fn ladder_captures(pos: &Position) -> Vec<Move> {
    let me = pos.to_move();
    let mut out = Vec::new();
    for rep in pos.groups() {
        if pos.stone_at(rep) != Some(me.opponent()) || pos.group_liberties(rep) != Some(2) {
            continue;
        }
        for l in pos.group_liberty_points(rep) {
            let mv = Move::Place(l);
            if out.contains(&mv) {
                continue;
            }
            let Ok(next) = pos.play(mv) else { continue };
            if next.stone_at(rep) == Some(me.opponent())
                && next.group_liberties(rep) == Some(1)
                && read_ladder(&next, rep) == LadderResult::CapturedByLadder
            {
                out.push(mv);
            }
        }
    }
    out
}

/// Extensions by the side to move out of atari that run into a working ladder.
pub fn losing_ladder_escapes(pos: &Position) -> Vec<Move> {
    let me = pos.to_move();
    let mut out = Vec::new();
    for rep in pos.groups() {
        if pos.stone_at(rep) != Some(me) || pos.group_liberties(rep) != Some(1) {
            continue;
        }
        for l in pos.group_liberty_points(rep) {
            let mv = Move::Place(l);
            if out.contains(&mv) {
                continue;
            }
            let Ok(next) = pos.play(mv) else { continue };
            if next.stone_at(rep) == Some(me)
                && next.group_liberties(rep) == Some(2)
                && read_ladder(&next, rep) == LadderResult::CapturedByLadder
            {
                out.push(mv);
            }
        }
    }
    out
}

/// True when `player`'s group at `c` is in atari or two liberties and the
/// ladder works against it.
pub fn is_ladder_captured(pos: &Position, c: Coord, player: Player) -> bool {
    pos.stone_at(c) == Some(player) && read_ladder(pos, c) == LadderResult::CapturedByLadder
}
