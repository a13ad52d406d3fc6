//! Psyche-modulated move selection.
//!
//! A bounded psyche scalar tracks how the game is going for the agent; a
//! personality preset maps that scalar onto a chain of probability
//! transforms applied to any move policy.

pub mod board;
pub mod chain;
pub mod cognition;
pub mod distribution;
pub mod engine;
pub mod pgn;
pub mod policy;
pub mod psyche;

pub use board::{BoardState, GamePhase, GameStatus, MoveId, Side, StatusTag};
pub use chain::{apply_chain, apply_chain_traced, ChainTrace, PersonalityPreset, StageMask};
pub use distribution::MoveDistribution;
pub use policy::{entropy_confidence, HeuristicPolicy, PolicySource, PolicyTable};
pub use psyche::{PsycheParams, PsycheState, PsycheZone};
pub use engine::{play_game, Agent, AgentConfig, GameRecord, MoveTrace};
