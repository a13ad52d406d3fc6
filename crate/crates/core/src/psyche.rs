//! Positional factors and the bounded psyche scalar.

use std::path::Path;

use chess::{
    get_bishop_moves, get_king_moves, get_knight_moves, get_pawn_attacks, get_rook_moves,
    BitBoard, Board, Color, MoveGen, Piece, Square, EMPTY,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{piece_value, BoardState, GamePhase};

pub const PSYCHE_MIN: f64 = -100.0;
pub const PSYCHE_MAX: f64 = 100.0;

/// Zone boundary; values at exactly ±33 are neutral.
pub const ZONE_BOUNDARY: f64 = 33.0;

pub const CHECK_PENALTY: i32 = -50;

/// Five positional factors plus the check indicator, all from the side to
/// move's point of view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FactorVector {
    pub material: i32,
    pub king_safety: i32,
    pub mobility: i32,
    pub center_control: i32,
    /// Always ≤ 0.
    pub vulnerability: i32,
    /// −50 when in check, otherwise 0.
    pub check: i32,
}

impl FactorVector {
    pub fn factors(&self) -> [i32; 5] {
        [
            self.material,
            self.king_safety,
            self.mobility,
            self.center_control,
            self.vulnerability,
        ]
    }
}

/// Squares attacked by the piece on `sq` given the board occupancy.
fn attacks_from(board: &Board, sq: Square, piece: Piece, color: Color) -> BitBoard {
    let occupied = *board.combined();
    match piece {
        Piece::Pawn => get_pawn_attacks(sq, color, !EMPTY),
        Piece::Knight => get_knight_moves(sq),
        Piece::Bishop => get_bishop_moves(sq, occupied),
        Piece::Rook => get_rook_moves(sq, occupied),
        Piece::Queen => get_bishop_moves(sq, occupied) | get_rook_moves(sq, occupied),
        Piece::King => get_king_moves(sq),
    }
}

/// Every (square, attack set) pair for one side's pieces.
fn attack_sets(board: &Board, color: Color) -> Vec<BitBoard> {
    let mut sets = Vec::with_capacity(16);
    for sq in *board.color_combined(color) {
        let piece = board.piece_on(sq).expect("occupied square");
        sets.push(attacks_from(board, sq, piece, color));
    }
    sets
}

fn material_of(board: &Board, color: Color) -> i32 {
    let own = *board.color_combined(color);
    [
        Piece::Pawn,
        Piece::Knight,
        Piece::Bishop,
        Piece::Rook,
        Piece::Queen,
    ]
    .iter()
    .map(|&p| (*board.pieces(p) & own).popcnt() as i32 * piece_value(p))
    .sum()
}

const CENTER: u64 = (1 << 27) | (1 << 28) | (1 << 35) | (1 << 36);

pub fn factor_vector(b: &BoardState) -> FactorVector {
    let board = b.raw();
    let us = board.side_to_move();
    let them = !us;
    let our_attacks = attack_sets(board, us);
    let their_attacks = attack_sets(board, them);
    let in_check = b.in_check();

    let material = material_of(board, us) - material_of(board, them);

    let king_sq = board.king_square(us);
    let block = get_king_moves(king_sq) | BitBoard::from_square(king_sq);
    let shield = (block & *board.pieces(Piece::Pawn) & *board.color_combined(us)).popcnt() as i32;
    let intruders = their_attacks.iter().filter(|a| (**a & block) != EMPTY).count() as i32;
    let king_safety = shield - intruders;

    let own_moves = MoveGen::new_legal(board).len() as i32;
    let mobility = if in_check {
        own_moves
    } else {
        let passed = b.null_move_board().expect("null move is legal when not in check");
        own_moves - MoveGen::new_legal(&passed).len() as i32
    };

    let center = BitBoard::new(CENTER);
    let count_center = |sets: &[BitBoard]| -> i32 {
        sets.iter().map(|a| (*a & center).popcnt() as i32).sum()
    };
    let center_control = count_center(&our_attacks) - count_center(&their_attacks);

    let enemy_reach = their_attacks.iter().fold(EMPTY, |acc, a| acc | *a);
    let own_men = *board.color_combined(us) & !BitBoard::from_square(king_sq);
    let vulnerability = -((own_men & enemy_reach).popcnt() as i32);

    FactorVector {
        material,
        king_safety,
        mobility,
        center_control,
        vulnerability,
        check: if in_check { CHECK_PENALTY } else { 0 },
    }
}

#[derive(Debug, Error)]
pub enum ParamsError {
    #[error("invalid psyche parameter: {0}")]
    Invalid(String),
    #[error("psyche config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("psyche config io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseMultipliers {
    pub opening: f64,
    pub midgame: f64,
    pub endgame: f64,
}

impl Default for PhaseMultipliers {
    fn default() -> Self {
        PhaseMultipliers {
            opening: GamePhase::Opening.multiplier(),
            midgame: GamePhase::Midgame.multiplier(),
            endgame: GamePhase::Endgame.multiplier(),
        }
    }
}

impl PhaseMultipliers {
    pub fn get(&self, phase: GamePhase) -> f64 {
        match phase {
            GamePhase::Opening => self.opening,
            GamePhase::Midgame => self.midgame,
            GamePhase::Endgame => self.endgame,
        }
    }
}

/// Psyche update parameters. Loadable from a TOML file; missing keys take
/// the experiment defaults.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsycheParams {
    pub weights: [f64; 5],
    pub scale: f64,
    pub reactivity: f64,
    pub resilience: f64,
    pub decay: f64,
    pub phase: PhaseMultipliers,
}

impl Default for PsycheParams {
    fn default() -> Self {
        PsycheParams {
            weights: [10.0, 5.0, 1.0, 2.0, 3.0],
            scale: 50.0,
            reactivity: 0.3,
            resilience: 0.4,
            decay: 0.20,
            phase: PhaseMultipliers::default(),
        }
    }
}

impl PsycheParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(ParamsError::Invalid("weights must be non-negative".into()));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(ParamsError::Invalid("scale must be positive".into()));
        }
        for (name, v) in [
            ("reactivity", self.reactivity),
            ("resilience", self.resilience),
            ("decay", self.decay),
        ] {
            if !unit(v) {
                return Err(ParamsError::Invalid(format!("{name} must lie in [0, 1]")));
            }
        }
        let p = self.phase;
        if [p.opening, p.midgame, p.endgame].iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(ParamsError::Invalid("phase multipliers must be non-negative".into()));
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<PsycheParams, ParamsError> {
        let params: PsycheParams = toml::from_str(s)?;
        params.validate()?;
        Ok(params)
    }

    pub fn load(path: &Path) -> Result<PsycheParams, ParamsError> {
        PsycheParams::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Effective per-ply blend rate for a phase.
    pub fn blend_rate(&self, phase: GamePhase) -> f64 {
        self.reactivity * self.phase.get(phase) * (1.0 - self.resilience)
    }
}

pub fn raw_eval(f: &FactorVector, p: &PsycheParams) -> f64 {
    f.factors()
        .iter()
        .zip(p.weights.iter())
        .map(|(&fi, &wi)| wi * f64::from(fi))
        .sum::<f64>()
        + f64::from(f.check)
}

/// Position-implied psyche in the open interval (−100, 100).
pub fn psyche_target(eval: f64, scale: f64) -> f64 {
    (eval / scale).tanh() * 100.0
}

pub fn psyche_step(psyche: f64, target: f64, phase: GamePhase, p: &PsycheParams) -> f64 {
    let rate = p.blend_rate(phase);
    (psyche + rate * (target - psyche)).clamp(PSYCHE_MIN, PSYCHE_MAX)
}

pub fn overnight_decay(psyche: f64, decay: f64, nights: u32) -> f64 {
    let mut v = psyche;
    for _ in 0..nights {
        v *= 1.0 - decay;
    }
    v
}

/// Nights of rest until |ψ| first falls to half its value or below.
pub fn half_life_nights(decay: f64) -> Option<u32> {
    if decay <= 0.0 {
        return None;
    }
    if decay >= 1.0 {
        return Some(1);
    }
    Some((0.5f64.ln() / (1.0 - decay).ln()).ceil() as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsycheZone {
    Stress,
    Neutral,
    Overconfident,
}

pub fn psyche_zone(psyche: f64) -> PsycheZone {
    if psyche < -ZONE_BOUNDARY {
        PsycheZone::Stress
    } else if psyche > ZONE_BOUNDARY {
        PsycheZone::Overconfident
    } else {
        PsycheZone::Neutral
    }
}

/// Psyche value owned by one agent, with its per-move deltas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsycheState {
    value: f64,
    deltas: Vec<f64>,
    session: u32,
}

impl PsycheState {
    pub fn new(initial: f64) -> PsycheState {
        PsycheState {
            value: initial.clamp(PSYCHE_MIN, PSYCHE_MAX),
            deltas: Vec::new(),
            session: 0,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn session(&self) -> u32 {
        self.session
    }

    /// Advances toward the psyche implied by `b`, seen from its side to move.
    pub fn observe(&mut self, b: &BoardState, p: &PsycheParams) -> f64 {
        let target = psyche_target(raw_eval(&factor_vector(b), p), p.scale);
        let next = psyche_step(self.value, target, b.phase(), p);
        self.deltas.push(next - self.value);
        self.value = next;
        next
    }

    /// Overnight rest between sessions.
    pub fn rest(&mut self, nights: u32, p: &PsycheParams) {
        self.value = overnight_decay(self.value, p.decay, nights);
        self.session += nights;
        self.deltas.clear();
    }
}
