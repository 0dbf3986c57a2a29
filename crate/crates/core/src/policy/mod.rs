//! Move prediction as consumed by the search: a ranked distribution over
//! legal moves, produced either by the builtin heuristic evaluator or by a
//! remote neural service over the wire protocol.

mod baseline;
pub mod wire;

use std::cmp::Ordering;

use thiserror::Error;

use crate::board::{Move, Position};

pub use baseline::{baseline_policy, BuiltinEvaluator};
pub use wire::{ClientConfig, TcpEvaluator};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("evaluator unavailable: {0}")]
    Unavailable(String),
    #[error("evaluator protocol error: {0}")]
    Protocol(String),
    #[error("evaluator rejected request {id}: {message}")]
    Remote { id: u64, message: String },
}

/// `(move, probability)` pairs sorted by descending probability, ties broken
/// by ascending move index. Never contains `Pass` or `Resign`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PolicyResult {
    entries: Vec<(Move, f32)>,
}

fn move_key(mv: Move, size: usize) -> usize {
    mv.coord().map_or(usize::MAX, |c| c.index(size))
}

impl PolicyResult {
    /// Sorts `entries` into policy order. Probabilities are taken as given.
    pub fn new(mut entries: Vec<(Move, f32)>, size: usize) -> PolicyResult {
        entries.sort_by(|a, b| match b.1.total_cmp(&a.1) {
            Ordering::Equal => move_key(a.0, size).cmp(&move_key(b.0, size)),
            o => o,
        });
        PolicyResult { entries }
    }

    /// Softmax over `scores` (temperature 1), in policy order.
    pub fn from_logits(scores: Vec<(Move, f32)>, size: usize) -> PolicyResult {
        let max = scores.iter().map(|s| s.1).fold(f32::NEG_INFINITY, f32::max);
        let mut total = 0.0f64;
        let mut entries: Vec<(Move, f32)> = scores
            .into_iter()
            .map(|(m, s)| {
                let e = (s - max).exp();
                total += e as f64;
                (m, e)
            })
            .collect();
        for e in &mut entries {
            e.1 = (e.1 as f64 / total) as f32;
        }
        PolicyResult::new(entries, size)
    }

    /// Keeps only entries legal in `pos` and renormalises them to sum to 1.
    pub fn masked(self, pos: &Position) -> PolicyResult {
        let mut entries: Vec<(Move, f32)> =
            self.entries.into_iter().filter(|&(m, p)| p >= 0.0 && matches!(m, Move::Place(_)) && pos.is_legal(m)).collect();
        let total: f64 = entries.iter().map(|e| e.1 as f64).sum();
        if total > 0.0 {
            for e in &mut entries {
                e.1 = (e.1 as f64 / total) as f32;
            }
        }
        PolicyResult::new(entries, pos.size())
    }

    pub fn entries(&self) -> &[(Move, f32)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn moves(&self) -> impl Iterator<Item = Move> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn probability(&self, mv: Move) -> Option<f32> {
        self.entries.iter().find(|e| e.0 == mv).map(|e| e.1)
    }

    pub fn truncate(&mut self, n: usize) {
        self.entries.truncate(n);
    }

    pub fn top(&self) -> Option<Move> {
        self.entries.first().map(|e| e.0)
    }
}

/// Shortest prefix of `pr` whose cumulative probability reaches
/// `cumulative_threshold` (boundary included), clipped to
/// `[min_moves, max_moves]`.
pub fn select_expansion_set(pr: &PolicyResult, cumulative_threshold: f64, max_moves: usize, min_moves: usize) -> Vec<Move> {
    debug_assert!(cumulative_threshold > 0.0 && cumulative_threshold <= 1.0);
    debug_assert!(max_moves >= min_moves && min_moves >= 1);
    let mut acc = 0.0f64;
    let mut k = pr.len();
    for (i, &(_, p)) in pr.entries().iter().enumerate() {
        acc += p as f64;
        if acc + 1e-6 >= cumulative_threshold {
            k = i + 1;
            break;
        }
    }
    let k = k.clamp(min_moves, max_moves).min(pr.len());
    pr.entries()[..k].iter().map(|e| e.0).collect()
}

pub struct EvaluatorRequest<'a> {
    pub id: u64,
    pub position: &'a Position,
    pub max_moves: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluatorResponse {
    pub id: u64,
    pub policy: PolicyResult,
}

/// Something that ranks moves. Calls block until the result is available.
pub trait Evaluator: Send + Sync {
    /// One response per request, matched by id.
    fn evaluate_batch(&self, requests: &[EvaluatorRequest<'_>]) -> Result<Vec<EvaluatorResponse>, EvalError>;

    fn evaluate(&self, position: &Position, max_moves: usize) -> Result<PolicyResult, EvalError> {
        let request = EvaluatorRequest { id: 0, position, max_moves: max_moves as u32 };
        self.evaluate_batch(std::slice::from_ref(&request))?
            .pop()
            .map(|r| r.policy)
            .ok_or_else(|| EvalError::Protocol("empty batch response".into()))
    }
}
