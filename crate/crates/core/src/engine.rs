//! Move selection for one agent and the game loop for a pair of them.

use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{BoardError, BoardState, GameStatus, MoveId, Side};
use crate::chain::{apply_chain, load_preset, ChainTrace, PersonalityPreset, PresetError, StageMask};
use crate::cognition::{
    check_plan, maybe_generate_plan, DisruptionParams, PlanBuffer, PlanOutcome, DEFAULT_LOOKAHEAD,
};
use crate::policy::{
    entropy_confidence, HeuristicPolicy, PolicySource, PolicyTable, TableError, UniformPolicy,
};
use crate::psyche::{ParamsError, PsycheParams, PsycheState, PSYCHE_MAX, PSYCHE_MIN};

pub const RECORD_SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_TEMPERATURE: f64 = 1.0;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Preset(#[from] PresetError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Board(#[from] BoardError),
    #[error("invalid agent config: {0}")]
    Config(String),
    #[error("record: {0}")]
    Record(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConfidenceMode {
    /// EQ mix follows the entropy confidence of the raw policy.
    EntropyOnly,
    /// EQ always fully wet.
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// Inverse-CDF draw from the shaped distribution.
    Chain,
    /// Most probable move of the shaped distribution.
    Argmax,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolicySpec {
    Heuristic { temperature: f64 },
    Uniform,
    Table { path: PathBuf },
    /// Table contents carried in the config itself.
    InlineTable { text: String },
}

impl Default for PolicySpec {
    fn default() -> Self {
        PolicySpec::Heuristic {
            temperature: DEFAULT_TEMPERATURE,
        }
    }
}

impl PolicySpec {
    pub fn build(&self) -> Result<Arc<dyn PolicySource>, EngineError> {
        Ok(match self {
            PolicySpec::Heuristic { temperature } => {
                if !(temperature.is_finite() && *temperature > 0.0) {
                    return Err(EngineError::Config("temperature must be positive".into()));
                }
                Arc::new(HeuristicPolicy::new(*temperature))
            }
            PolicySpec::Uniform => Arc::new(UniformPolicy),
            PolicySpec::Table { path } => Arc::new(PolicyTable::load(path)?),
            PolicySpec::InlineTable { text } => Arc::new(PolicyTable::parse(text)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    /// Built-in preset name or path to a preset file.
    pub preset: String,
    pub initial_psyche: f64,
    pub confidence: ConfidenceMode,
    pub mask: StageMask,
    pub thinking: bool,
    pub depth: usize,
    pub sampling: Sampling,
    pub policy: PolicySpec,
    pub psyche: PsycheParams,
    pub disruption: DisruptionParams,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            preset: "human".into(),
            initial_psyche: 0.0,
            confidence: ConfidenceMode::EntropyOnly,
            mask: StageMask::FULL,
            thinking: false,
            depth: DEFAULT_LOOKAHEAD,
            sampling: Sampling::Chain,
            policy: PolicySpec::default(),
            psyche: PsycheParams::default(),
            disruption: DisruptionParams::default(),
        }
    }
}

impl AgentConfig {
    /// Plain policy player: no shaping, always the top move.
    pub fn vanilla(policy: PolicySpec) -> AgentConfig {
        AgentConfig {
            preset: "flat".into(),
            mask: StageMask::NONE,
            sampling: Sampling::Argmax,
            policy,
            ..AgentConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if !(PSYCHE_MIN..=PSYCHE_MAX).contains(&self.initial_psyche) {
            return Err(EngineError::Config(format!(
                "initial psyche {} outside [-100, 100]",
                self.initial_psyche
            )));
        }
        if self.thinking && self.depth == 0 {
            return Err(EngineError::Config("lookahead depth must be positive".into()));
        }
        self.psyche.validate()?;
        self.disruption.validate().map_err(EngineError::Config)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanEvent {
    None,
    Generated,
    Executed,
    Mismatch,
    Disrupted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveTrace {
    pub ply: u32,
    pub side: Side,
    /// Before selection.
    pub psyche: f64,
    pub entropy: f64,
    /// Entropy confidence of the raw policy.
    pub confidence: f64,
    /// Confidence actually fed to the EQ stage.
    pub chain_confidence: f64,
    pub legal_moves: usize,
    /// Raw policy argmax.
    pub argmax: MoveId,
    pub argmax_prob: f64,
    /// Shaped probability of the raw argmax.
    pub argmax_shaped_prob: f64,
    pub selected: MoveId,
    pub selected_shaped_prob: f64,
    pub agreement: bool,
    pub chain: ChainTrace,
    pub plan_event: PlanEvent,
    /// A new plan was stored after this move.
    pub plan_stored: bool,
}

/// Uniform draws consumed by one decision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Draws {
    pub disruption: f64,
    pub sample: f64,
}

impl Draws {
    pub fn from_rng(rng: &mut impl Rng) -> Draws {
        Draws {
            disruption: rng.gen(),
            sample: rng.gen(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub psyche: PsycheState,
    pub plan: PlanBuffer,
}

/// A configured player. Owns its psyche and plan buffer for one game.
#[derive(Clone)]
pub struct Agent {
    config: AgentConfig,
    preset: PersonalityPreset,
    policy: Arc<dyn PolicySource>,
    state: AgentState,
}

impl std::fmt::Debug for Agent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Agent")
            .field("config", &self.config)
            .field("state", &self.state)
            .finish_non_exhaustive()
    }
}

impl Agent {
    pub fn new(config: AgentConfig) -> Result<Agent, EngineError> {
        let policy = config.policy.build()?;
        Agent::with_policy(config, policy)
    }

    /// Uses an already-built policy instead of the one named in `config`.
    pub fn with_policy(
        config: AgentConfig,
        policy: Arc<dyn PolicySource>,
    ) -> Result<Agent, EngineError> {
        config.validate()?;
        let preset = load_preset(&config.preset)?;
        Ok(Agent {
            state: AgentState {
                psyche: PsycheState::new(config.initial_psyche),
                plan: PlanBuffer::new(),
            },
            config,
            preset,
            policy,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn preset(&self) -> &PersonalityPreset {
        &self.preset
    }

    pub fn policy(&self) -> &Arc<dyn PolicySource> {
        &self.policy
    }

    pub fn state(&self) -> &AgentState {
        &self.state
    }

    pub fn psyche(&self) -> f64 {
        self.state.psyche.value()
    }

    /// Chooses a move at `b`, which must be ongoing. `reply` is the move the
    /// opponent just made, if any; it is checked against a stored plan.
    pub fn select_move(
        &mut self,
        b: &BoardState,
        reply: Option<MoveId>,
        draws: Draws,
    ) -> (MoveId, MoveTrace) {
        let psyche = self.psyche();
        let raw = self.policy.distribution(b);
        let entropy = raw.entropy();
        let confidence = entropy_confidence(&raw);
        let chain_confidence = match self.config.confidence {
            ConfidenceMode::EntropyOnly => confidence,
            ConfidenceMode::Fixed => 1.0,
        };
        let argmax = raw.argmax();

        let mut plan_event = PlanEvent::None;
        let mut planned = None;
        if self.config.thinking {
            if let Some(reply) = reply {
                match check_plan(
                    &mut self.state.plan,
                    reply,
                    psyche,
                    &self.config.disruption,
                    draws.disruption,
                ) {
                    PlanOutcome::NoPlan => {}
                    PlanOutcome::MismatchDiscard => plan_event = PlanEvent::Mismatch,
                    PlanOutcome::DisruptedDiscard => plan_event = PlanEvent::Disrupted,
                    PlanOutcome::Execute(m) if b.is_legal(m) => {
                        plan_event = PlanEvent::Executed;
                        planned = Some(m);
                    }
                    PlanOutcome::Execute(_) => self.state.plan.clear(),
                }
            }
        }

        let (shaped, chain) =
            apply_chain(&raw, psyche, &self.preset, chain_confidence, self.config.mask);
        let selected = planned.unwrap_or_else(|| match self.config.sampling {
            Sampling::Chain => shaped.sample(draws.sample),
            Sampling::Argmax => shaped.argmax(),
        });

        let mut plan_stored = false;
        if self.config.thinking && self.state.plan.is_empty() {
            if let Some(plan) = maybe_generate_plan(b, self.policy.as_ref(), confidence, self.config.depth)
            {
                if plan.moves()[0] == selected {
                    self.state.plan.store(plan);
                    plan_stored = true;
                    if plan_event == PlanEvent::None {
                        plan_event = PlanEvent::Generated;
                    }
                }
            }
        }

        let trace = MoveTrace {
            ply: b.ply(),
            side: b.side_to_move(),
            psyche,
            entropy,
            confidence,
            chain_confidence,
            legal_moves: raw.len(),
            argmax,
            argmax_prob: raw.max_prob(),
            argmax_shaped_prob: shaped.prob_of(argmax),
            selected,
            selected_shaped_prob: shaped.prob_of(selected),
            agreement: selected == argmax,
            chain,
            plan_event,
            plan_stored,
        };
        (selected, trace)
    }

    /// Psyche update after any ply, from `b_after`'s side to move.
    pub fn update_psyche_after_ply(&mut self, b_after: &BoardState) -> f64 {
        self.state.psyche.observe(b_after, &self.config.psyche)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub schema: u32,
    pub seed: u64,
    /// Experiment condition label, when played under a harness.
    #[serde(default)]
    pub condition: Option<String>,
    /// The psyche-modulated side, when one is singled out.
    #[serde(default)]
    pub agent_side: Option<Side>,
    pub white: AgentConfig,
    pub black: AgentConfig,
    pub start_fen: String,
    pub moves: Vec<MoveId>,
    /// One per ply, both sides.
    pub traces: Vec<MoveTrace>,
    pub status: GameStatus,
    /// ψ of each agent before the first ply and after every ply.
    pub psyche_white: Vec<f64>,
    pub psyche_black: Vec<f64>,
}

impl GameRecord {
    pub fn plies(&self) -> usize {
        self.moves.len()
    }

    pub fn trajectory(&self, side: Side) -> &[f64] {
        match side {
            Side::White => &self.psyche_white,
            Side::Black => &self.psyche_black,
        }
    }

    pub fn config(&self, side: Side) -> &AgentConfig {
        match side {
            Side::White => &self.white,
            Side::Black => &self.black,
        }
    }

    pub fn traces_for(&self, side: Side) -> impl Iterator<Item = &MoveTrace> {
        self.traces.iter().filter(move |t| t.side == side)
    }

    /// 1, ½ or 0 from `side`'s point of view.
    pub fn score_for(&self, side: Side) -> f64 {
        match self.status.winner {
            Some(w) if w == side => 1.0,
            Some(_) => 0.0,
            None => 0.5,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_json_line(line: &str) -> Result<GameRecord, EngineError> {
        let r: GameRecord = serde_json::from_str(line)?;
        if r.schema != RECORD_SCHEMA_VERSION {
            return Err(EngineError::Config(format!(
                "record schema {} is not {}",
                r.schema, RECORD_SCHEMA_VERSION
            )));
        }
        Ok(r)
    }
}

/// Plays a full game from the initial position.
pub fn play_game(white: &AgentConfig, black: &AgentConfig, seed: u64) -> Result<GameRecord, EngineError> {
    let mut w = Agent::new(white.clone())?;
    let mut b = Agent::new(black.clone())?;
    Ok(play_agents(&mut w, &mut b, BoardState::initial(), seed))
}

/// Plays prepared agents from `start` to the end of the game.
pub fn play_agents(white: &mut Agent, black: &mut Agent, start: BoardState, seed: u64) -> GameRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start_fen = start.to_fen();
    let mut b = start;
    let mut moves = Vec::new();
    let mut traces = Vec::new();
    let mut psyche_white = vec![white.psyche()];
    let mut psyche_black = vec![black.psyche()];
    let mut reply = None;
    while !b.status().is_over() {
        let draws = Draws::from_rng(&mut rng);
        let mover = match b.side_to_move() {
            Side::White => &mut *white,
            Side::Black => &mut *black,
        };
        let (m, trace) = mover.select_move(&b, reply, draws);
        b = b.apply_unchecked(m);
        psyche_white.push(white.update_psyche_after_ply(&b));
        psyche_black.push(black.update_psyche_after_ply(&b));
        moves.push(m);
        traces.push(trace);
        reply = Some(m);
    }
    GameRecord {
        schema: RECORD_SCHEMA_VERSION,
        seed,
        condition: None,
        agent_side: None,
        white: white.config.clone(),
        black: black.config.clone(),
        start_fen,
        moves,
        traces,
        status: b.status(),
        psyche_white,
        psyche_black,
    }
}

/// Recomputes both psyche trajectories from a move list.
pub fn replay_psyche(
    start: &BoardState,
    moves: &[MoveId],
    initial: [f64; 2],
    params: &PsycheParams,
) -> Result<[Vec<f64>; 2], EngineError> {
    let mut w = PsycheState::new(initial[0]);
    let mut k = PsycheState::new(initial[1]);
    let mut out = [vec![w.value()], vec![k.value()]];
    let mut b = start.clone();
    for &m in moves {
        b = b.apply_move(m)?;
        out[0].push(w.observe(&b, params));
        out[1].push(k.observe(&b, params));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::StatusTag;
    use crate::chain::apply_chain;
    use crate::distribution::MoveDistribution;

    fn mv(s: &str) -> MoveId {
        s.parse().unwrap()
    }

    fn fools_mate_table() -> String {
        "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - f2f3:1\n\
         rnbqkbnr/pppppppp/8/8/8/5P2/PPPPP1PP/RNBQKBNR b KQkq - e7e5:1\n\
         rnbqkbnr/pppp1ppp/8/4p3/8/5P2/PPPPP1PP/RNBQKBNR w KQkq - g2g4:1\n\
         rnbqkbnr/pppp1ppp/8/4p3/6P1/5P2/PPPPP2P/RNBQKBNR b KQkq - d8h4:1\n"
            .to_string()
    }

    fn scripted(text: String) -> AgentConfig {
        AgentConfig {
            preset: "flat".into(),
            policy: PolicySpec::InlineTable { text },
            ..AgentConfig::default()
        }
    }

    #[test]
    fn flat_one_hot_always_agrees() {
        let cfg = scripted(fools_mate_table());
        let mut a = Agent::new(cfg).unwrap();
        let b = BoardState::initial();
        for draw in [0.0, 0.3, 0.999] {
            let (m, t) = a.select_move(&b, None, Draws { disruption: 0.0, sample: draw });
            assert_eq!(m, mv("f2f3"));
            assert!(t.agreement);
            assert_eq!(t.plan_event, PlanEvent::None);
        }
    }

    #[test]
    fn fools_mate_script() {
        let cfg = scripted(fools_mate_table());
        let r = play_game(&cfg, &cfg, 1).unwrap();
        assert_eq!(r.plies(), 4);
        assert_eq!(r.status.tag, StatusTag::Checkmate);
        assert_eq!(r.status.winner, Some(Side::Black));
        assert_eq!(r.psyche_white.len(), 5);
        assert_eq!(r.psyche_black.len(), 5);
    }

    #[test]
    fn knight_shuffle_is_threefold() {
        let text = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - g1f3:1\n\
            rnbqkbnr/pppppppp/8/8/8/5N2/PPPPPPPP/RNBQKB1R b KQkq - g8f6:1\n\
            rnbqkb1r/pppppppp/5n2/8/8/5N2/PPPPPPPP/RNBQKB1R w KQkq - f3g1:1\n\
            rnbqkb1r/pppppppp/5n2/8/8/8/PPPPPPPP/RNBQKBNR b KQkq - f6g8:1\n";
        let cfg = scripted(text.into());
        let r = play_game(&cfg, &cfg, 9).unwrap();
        assert_eq!(r.status.tag, StatusTag::ThreefoldRepetition);
        assert_eq!(r.plies(), 8);
    }

    #[test]
    fn same_seed_same_record() {
        let agent = AgentConfig {
            initial_psyche: -80.0,
            thinking: true,
            ..AgentConfig::default()
        };
        let opp = AgentConfig::vanilla(PolicySpec::default());
        let a = play_game(&agent, &opp, 42).unwrap();
        let b = play_game(&agent, &opp, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json_line(), b.to_json_line());
        let back = GameRecord::from_json_line(&a.to_json_line()).unwrap();
        assert_eq!(back, a);
        assert!(a.plies() <= 400);
        assert_eq!(a.psyche_white.len(), a.plies() + 1);
        assert!(a.psyche_white.iter().chain(&a.psyche_black).all(|p| p.abs() <= 100.0));
    }

    #[test]
    fn peaked_overconfident_follows_chain_oracle() {
        let b = BoardState::from_fen("4k3/8/8/3q4/8/2N5/8/4K3 w - - 0 30").unwrap();
        let cfg = AgentConfig {
            initial_psyche: 100.0,
            confidence: ConfidenceMode::Fixed,
            policy: PolicySpec::Heuristic { temperature: 0.5 },
            ..AgentConfig::default()
        };
        let mut a = Agent::new(cfg).unwrap();
        let raw = HeuristicPolicy::new(0.5).distribution(&b);
        let (shaped, _) = apply_chain(&raw, 100.0, &PersonalityPreset::human(), 1.0, StageMask::FULL);
        for draw in [0.0, 0.25, 0.5, 0.75, 0.99] {
            let (m, t) = a.select_move(&b, None, Draws { disruption: 0.0, sample: draw });
            assert_eq!(m, shaped.sample(draw));
            assert_eq!(t.agreement, m == raw.argmax());
            assert_eq!(t.argmax_shaped_prob, shaped.prob_of(raw.argmax()));
        }
        assert_eq!(raw.argmax(), mv("c3d5"));
        assert!(shaped.prob_of(mv("c3d5")) >= shaped.max_prob() - 1e-15);
    }

    #[test]
    fn executed_plan_bypasses_chain() {
        let b = BoardState::initial();
        let table = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - e2e4:1\n\
            rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq - e7e5:1\n\
            rnbqkbnr/pppp1ppp/8/4p3/4P3/8/PPPP1PPP/RNBQKBNR w KQkq - g1f3:0.9 a2a3:0.1\n";
        let cfg = AgentConfig {
            preset: "human".into(),
            initial_psyche: -100.0,
            thinking: true,
            policy: PolicySpec::InlineTable { text: table.into() },
            ..AgentConfig::default()
        };
        let mut a = Agent::new(cfg).unwrap();
        let (m, t) = a.select_move(&b, None, Draws { disruption: 0.0, sample: 0.0 });
        assert_eq!(m, mv("e2e4"));
        assert!(t.plan_stored);
        assert_eq!(t.plan_event, PlanEvent::Generated);

        let b = b.apply_move(mv("e2e4")).unwrap().apply_move(mv("e7e5")).unwrap();
        // Draw 0 would sample a2a3 through the chain; the plan wins anyway.
        let (m, t) = a.select_move(&b, Some(mv("e7e5")), Draws { disruption: 0.9, sample: 0.0 });
        assert_eq!(m, mv("g1f3"));
        assert_eq!(t.plan_event, PlanEvent::Executed);
    }

    #[test]
    fn disrupted_plan_falls_back_to_chain() {
        let b = BoardState::initial();
        let table = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - e2e4:1\n\
            rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq - e7e5:1\n";
        let cfg = AgentConfig {
            initial_psyche: -100.0,
            thinking: true,
            policy: PolicySpec::InlineTable { text: table.into() },
            ..AgentConfig::default()
        };
        let mut a = Agent::new(cfg).unwrap();
        a.select_move(&b, None, Draws { disruption: 0.0, sample: 0.0 });
        let b = b.apply_move(mv("e2e4")).unwrap().apply_move(mv("e7e5")).unwrap();
        let (_, t) = a.select_move(&b, Some(mv("e7e5")), Draws { disruption: 0.5, sample: 0.0 });
        assert_eq!(t.plan_event, PlanEvent::Disrupted);

        let mut a = Agent::new(a.config().clone()).unwrap();
        let b0 = BoardState::initial();
        a.select_move(&b0, None, Draws { disruption: 0.0, sample: 0.0 });
        let b = b0.apply_move(mv("e2e4")).unwrap().apply_move(mv("c7c5")).unwrap();
        let (_, t) = a.select_move(&b, Some(mv("c7c5")), Draws { disruption: 0.99, sample: 0.0 });
        assert_eq!(t.plan_event, PlanEvent::Mismatch);
    }

    #[test]
    fn opening_step_is_small() {
        let cfg = AgentConfig::default();
        let mut a = Agent::new(cfg).unwrap();
        let b = BoardState::initial().apply_move(mv("e2e4")).unwrap();
        let before = a.psyche();
        let after = a.update_psyche_after_ply(&b);
        assert!((after - before).abs() <= 0.3 * 0.15 * 0.6 * 200.0);
    }

    #[test]
    fn queen_loss_pulls_negative() {
        // Midgame, white to move and a queen down.
        let b = BoardState::from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNB1KBNR w KQkq - 0 12")
            .unwrap();
        let mut a = Agent::new(AgentConfig::default()).unwrap();
        assert!(a.update_psyche_after_ply(&b) < 0.0);
    }

    #[test]
    fn replay_matches_played_trajectory() {
        let agent = AgentConfig {
            initial_psyche: 80.0,
            ..AgentConfig::default()
        };
        let opp = AgentConfig::vanilla(PolicySpec::default());
        let r = play_game(&agent, &opp, 3).unwrap();
        let start = BoardState::from_fen(&r.start_fen).unwrap();
        let [w, b] = replay_psyche(&start, &r.moves, [80.0, 0.0], &PsycheParams::default()).unwrap();
        assert_eq!(w, r.psyche_white);
        assert_eq!(b, r.psyche_black);
    }

    #[test]
    fn single_legal_move_is_returned() {
        let b = BoardState::from_fen("k7/8/1K6/8/8/8/8/7R b - - 0 40").unwrap();
        assert_eq!(b.legal_move_count(), 1);
        let mut a = Agent::new(AgentConfig::default()).unwrap();
        let (m, t) = a.select_move(&b, None, Draws { disruption: 0.5, sample: 0.5 });
        assert_eq!(m, b.legal_moves()[0]);
        assert_eq!(t.confidence, 1.0);
        assert!(t.agreement);
    }

    #[test]
    fn config_validation() {
        let bad = AgentConfig {
            initial_psyche: 150.0,
            ..AgentConfig::default()
        };
        assert!(Agent::new(bad).is_err());
        let unknown = AgentConfig {
            preset: "polka".into(),
            ..AgentConfig::default()
        };
        assert!(matches!(Agent::new(unknown), Err(EngineError::Preset(_))));
        let toml_text = "preset = \"metal\"\ninitial_psyche = -80.0\n[policy]\nkind = \"uniform\"\n";
        let cfg: AgentConfig = toml::from_str(toml_text).unwrap();
        assert_eq!(cfg.policy, PolicySpec::Uniform);
        assert_eq!(cfg.mask, StageMask::FULL);
    }

    #[test]
    fn uniform_distribution_helper_is_used() {
        let b = BoardState::initial();
        let d = UniformPolicy.distribution(&b);
        assert_eq!(d, MoveDistribution::uniform(b.legal_moves()).unwrap());
    }
}
