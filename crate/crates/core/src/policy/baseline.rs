use crate::board::{Coord, Move, Position, BLACK, DIAG, N4, WHITE};
use crate::patterns::PatternTable;

use super::{EvalError, Evaluator, EvaluatorRequest, EvaluatorResponse, PolicyResult};

const CAPTURE: f32 = 10.0;
const CAPTURE_PER_STONE: f32 = 0.5;
const ESCAPE: f32 = 8.0;
const PATTERN: f32 = 3.0;
const NEAR_OWN: f32 = 2.0;
const SELF_ATARI: f32 = -12.0;
const EYE_FILL: f32 = -12.0;

/// Prior by distance to the nearest edge (0 = first line).
fn line_prior(line: usize) -> f32 {
    match line {
        0 => -1.5,
        1 => -0.5,
        2 => 0.6,
        3 => 0.4,
        _ => 0.0,
    }
}

/// Heuristic move distribution for `pos.to_move()`: captures of groups in
/// atari first, then atari escapes, 3x3 shape replies to the last move, and
/// a prior toward our own previous move and the third/fourth lines.
/// Self-atari and own-eye fills score lowest. Softmax at temperature 1.
pub fn baseline_policy(pos: &Position) -> PolicyResult {
    let n = pos.size();
    let color = pos.to_move().cell();
    let patterns = PatternTable::builtin();
    let last = pos.last_move().and_then(Move::coord).map(|c| c.point());
    let own_prev = pos.previous_move().and_then(Move::coord);

    let mut scores = Vec::with_capacity(pos.empty_points().len());
    for &e in pos.empty_points() {
        let p = e as usize;
        if pos.check_place(p, color).is_err() {
            continue;
        }
        let c = Coord::from_point(p);
        let (x, y) = (c.col as usize, c.row as usize);
        let mut score = line_prior(x.min(y).min(n - 1 - x).min(n - 1 - y));

        let mut crowded = false;
        let mut own_in_atari = false;
        for d in N4 {
            let q = crate::board::step(p, d);
            match pos.cell(q) {
                BLACK | WHITE => {
                    crowded = true;
                    if pos.cell(q) == color && pos.libs_of(q) == 1 {
                        own_in_atari = true;
                    }
                }
                _ => {}
            }
        }
        if crowded {
            let info = pos.place_info(p, color, 3);
            if info.captured > 0 {
                score += CAPTURE + CAPTURE_PER_STONE * info.captured.min(8) as f32;
            } else if info.libs <= 1 {
                score += SELF_ATARI;
            }
            if own_in_atari && info.libs >= 2 {
                score += ESCAPE;
            }
            if pos.is_eye_at(p, color) {
                score += EYE_FILL;
            }
        }
        if let Some(l) = last {
            if DIAG.iter().chain(N4.iter()).any(|&d| crate::board::step(l, d) == p) && patterns.weight_at(pos, p) > 0 {
                score += PATTERN;
            }
        }
        if let Some(o) = own_prev {
            let d2 = (o.col as f32 - x as f32).powi(2) + (o.row as f32 - y as f32).powi(2);
            score += NEAR_OWN * (-d2 / 8.0).exp();
        }
        scores.push((Move::Place(c), score));
    }
    PolicyResult::from_logits(scores, n)
}

/// In-process evaluator backed by [`baseline_policy`].
#[derive(Clone, Copy, Debug, Default)]
pub struct BuiltinEvaluator;

impl Evaluator for BuiltinEvaluator {
    fn evaluate_batch(&self, requests: &[EvaluatorRequest<'_>]) -> Result<Vec<EvaluatorResponse>, EvalError> {
        Ok(requests
            .iter()
            .map(|r| {
                let mut policy = baseline_policy(r.position);
                if r.max_moves > 0 {
                    policy.truncate(r.max_moves as usize);
                }
                EvaluatorResponse { id: r.id, policy }
            })
            .collect())
    }
}
