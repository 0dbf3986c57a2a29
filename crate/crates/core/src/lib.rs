//! Go engine built around a policy-guided, synchronized Monte Carlo tree
//! search.

pub mod board;
pub mod features;
pub mod gtp;
pub mod harness;
pub mod ladder;
pub mod mcts;
pub mod patterns;
pub mod playout;
pub mod policy;
pub mod sgf;

pub use board::{Coord, IllegalMove, Move, Player, Position, ScoreResult};
