use std::str::FromStr;

use psychess_core::board::{BoardState, GameStatus, MoveId, Side};
use psychess_core::chain::BUILTIN_NAMES;
use psychess_core::engine::{
    Agent, AgentConfig, Draws, GameRecord, MoveTrace, PolicySpec, RECORD_SCHEMA_VERSION,
};
use psychess_core::pgn::write_game;
use psychess_core::psyche::psyche_zone;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::ServiceError;
use crate::protocol::{NewGameRequest, Snapshot, TraceView, PROTOCOL_VERSION};

/// One live game. Every method either succeeds or leaves the session as it
/// was.
pub struct Session {
    id: u64,
    request: NewGameRequest,
    human: Side,
    agent: Agent,
    /// Tracks the human side's psyche so finished games form full records.
    shadow: Agent,
    start: BoardState,
    board: BoardState,
    moves: Vec<MoveId>,
    traces: Vec<MoveTrace>,
    /// SAN of each agent move, parallel to `traces`.
    sans: Vec<String>,
    psyche: [Vec<f64>; 2],
    rng: ChaCha8Rng,
    resigned: Option<Side>,
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Session")
            .field("id", &self.id)
            .field("fen", &self.board.to_fen())
            .finish_non_exhaustive()
    }
}

fn agent_config(req: &NewGameRequest) -> Result<AgentConfig, ServiceError> {
    if !BUILTIN_NAMES.contains(&req.preset.as_str()) {
        return Err(ServiceError::UnknownPreset(req.preset.clone()));
    }
    if !req.psyche0.is_finite() || !(-100.0..=100.0).contains(&req.psyche0) {
        return Err(ServiceError::InvalidPsyche(req.psyche0));
    }
    Ok(AgentConfig {
        preset: req.preset.clone(),
        initial_psyche: req.psyche0,
        thinking: req.thinking,
        ..AgentConfig::default()
    })
}

fn human_config() -> AgentConfig {
    AgentConfig::vanilla(PolicySpec::Uniform)
}

impl Session {
    /// Starts a game. If the human is not on move the agent plays first.
    pub fn new(id: u64, request: NewGameRequest) -> Result<Session, ServiceError> {
        let config = agent_config(&request)?;
        let agent = Agent::new(config).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
        let shadow = Agent::new(human_config()).expect("vanilla config is valid");
        let start = match &request.start_fen {
            Some(fen) => BoardState::from_fen(fen).map_err(|e| ServiceError::BadRequest(e.to_string()))?,
            None => BoardState::initial(),
        };
        let mut s = Session {
            id,
            human: request.human_color,
            rng: ChaCha8Rng::seed_from_u64(request.seed),
            request,
            psyche: [vec![agent.psyche()], vec![shadow.psyche()]],
            agent,
            shadow,
            board: start.clone(),
            start,
            moves: Vec::new(),
            traces: Vec::new(),
            sans: Vec::new(),
            resigned: None,
        };
        if s.board.side_to_move() != s.human && !s.status().is_over() {
            s.agent_reply();
        }
        Ok(s)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn status(&self) -> GameStatus {
        match self.resigned {
            Some(loser) => GameStatus::resignation(loser),
            None => self.board.status(),
        }
    }

    fn push(&mut self, m: MoveId) {
        self.board = self.board.apply_move(m).expect("move checked legal");
        self.psyche[0].push(self.agent.update_psyche_after_ply(&self.board));
        self.psyche[1].push(self.shadow.update_psyche_after_ply(&self.board));
        self.moves.push(m);
    }

    fn agent_reply(&mut self) {
        let draws = Draws::from_rng(&mut self.rng);
        let (m, trace) = self.agent.select_move(&self.board, self.moves.last().copied(), draws);
        self.sans.push(self.board.san(m).expect("agent move is legal"));
        self.traces.push(trace);
        self.push(m);
    }

    /// Applies the human's move, then the agent's reply if the game goes on.
    pub fn submit(&mut self, uci: &str) -> Result<(), ServiceError> {
        if self.status().is_over() {
            return Err(ServiceError::GameOver);
        }
        if self.board.side_to_move() != self.human {
            return Err(ServiceError::NotYourTurn);
        }
        let m = MoveId::from_str(uci.trim()).map_err(|_| ServiceError::MalformedMove(uci.to_string()))?;
        if !self.board.is_legal(m) {
            return Err(ServiceError::IllegalMove(uci.to_string()));
        }
        self.push(m);
        if !self.status().is_over() {
            self.agent_reply();
        }
        Ok(())
    }

    pub fn resign(&mut self) -> Result<(), ServiceError> {
        if self.status().is_over() {
            return Err(ServiceError::GameOver);
        }
        self.resigned = Some(self.human);
        Ok(())
    }

    pub fn snapshot(&self) -> Snapshot {
        let status = self.status();
        let trace = self
            .traces
            .last()
            .zip(self.sans.last())
            .map(|(t, san)| TraceView::new(t, san.clone()));
        let legal_moves = if status.is_over() {
            Vec::new()
        } else {
            self.board.legal_moves().iter().map(ToString::to_string).collect()
        };
        Snapshot {
            protocol_version: PROTOCOL_VERSION,
            session_id: self.id,
            preset: self.request.preset.clone(),
            human_color: self.human,
            side_to_move: self.board.side_to_move(),
            fen: self.board.to_fen(),
            psyche: self.agent.psyche(),
            zone: psyche_zone(self.agent.psyche()),
            psyche_history: self.psyche[0].clone(),
            legal_moves,
            move_history: self.moves.iter().map(ToString::to_string).collect(),
            status: status.into(),
            trace,
        }
    }

    fn names(&self) -> (String, String) {
        let agent = format!("psychess {} ({:+.0})", self.request.preset, self.request.psyche0);
        match self.human {
            Side::White => ("Human".into(), agent),
            Side::Black => (agent, "Human".into()),
        }
    }

    pub fn pgn(&self) -> String {
        let (white, black) = self.names();
        let status = self.status();
        let result = status.result_token();
        let round = self.id.to_string();
        let seed = self.request.seed.to_string();
        write_game(
            &self.start,
            &self.moves,
            result,
            ["Live game", "local", "????.??.??", &round, &white, &black, result],
            &[("Seed", seed)],
        )
        .expect("history is legal")
    }

    /// The game in harness record form, with the human filed as a vanilla
    /// uniform player.
    pub fn record(&self) -> GameRecord {
        let agent = self.agent.config().clone();
        let (white, black, psyche_white, psyche_black) = match self.human {
            Side::White => (human_config(), agent, self.psyche[1].clone(), self.psyche[0].clone()),
            Side::Black => (agent, human_config(), self.psyche[0].clone(), self.psyche[1].clone()),
        };
        GameRecord {
            schema: RECORD_SCHEMA_VERSION,
            seed: self.request.seed,
            condition: Some("live".into()),
            agent_side: Some(self.human.opponent()),
            white,
            black,
            start_fen: self.start.to_fen(),
            moves: self.moves.clone(),
            traces: self.traces.clone(),
            status: self.status(),
            psyche_white,
            psyche_black,
        }
    }
}
