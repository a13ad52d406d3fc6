//! Chess rules kernel: position state, legal moves, termination and phase.
//!
//! Move generation is delegated to the `chess` crate. Everything the rest of
//! the system depends on (canonical move order, clocks, repetition history,
//! FEN, SAN, phase classification) is defined here.

use std::fmt;
use std::str::FromStr;

use chess::{BitBoard, Board, ChessMove, Color, MoveGen, Piece, Square, EMPTY};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Plies after which a game is adjudicated drawn.
pub const PLY_CAP: u32 = 400;

/// Last ply (inclusive) classified as opening.
pub const OPENING_PLIES: u32 = 20;

pub const INITIAL_FEN: &str = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoardError {
    #[error("invalid FEN `{0}`")]
    InvalidFen(String),
    #[error("malformed move `{0}`")]
    MalformedMove(String),
    #[error("illegal move {mv} in position {fen}")]
    IllegalMove { mv: String, fen: String },
    #[error("unrecognised SAN `{0}`")]
    UnknownSan(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    White,
    Black,
}

impl Side {
    pub fn opponent(self) -> Side {
        match self {
            Side::White => Side::Black,
            Side::Black => Side::White,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::White => 0,
            Side::Black => 1,
        }
    }

    pub(crate) fn color(self) -> Color {
        match self {
            Side::White => Color::White,
            Side::Black => Color::Black,
        }
    }

    pub(crate) fn from_color(c: Color) -> Side {
        match c {
            Color::White => Side::White,
            Color::Black => Side::Black,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::White => "white",
            Side::Black => "black",
        })
    }
}

/// Promotion piece. Declaration order is the canonical tie-break order q<r<b<n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Promotion {
    Queen,
    Rook,
    Bishop,
    Knight,
}

impl Promotion {
    fn to_char(self) -> char {
        match self {
            Promotion::Queen => 'q',
            Promotion::Rook => 'r',
            Promotion::Bishop => 'b',
            Promotion::Knight => 'n',
        }
    }

    fn from_char(c: char) -> Option<Promotion> {
        match c {
            'q' => Some(Promotion::Queen),
            'r' => Some(Promotion::Rook),
            'b' => Some(Promotion::Bishop),
            'n' => Some(Promotion::Knight),
            _ => None,
        }
    }

    fn piece(self) -> Piece {
        match self {
            Promotion::Queen => Piece::Queen,
            Promotion::Rook => Piece::Rook,
            Promotion::Bishop => Piece::Bishop,
            Promotion::Knight => Piece::Knight,
        }
    }

    fn from_piece(p: Piece) -> Option<Promotion> {
        match p {
            Piece::Queen => Some(Promotion::Queen),
            Piece::Rook => Some(Promotion::Rook),
            Piece::Bishop => Some(Promotion::Bishop),
            Piece::Knight => Some(Promotion::Knight),
            _ => None,
        }
    }
}

/// A UCI move: source, destination and optional promotion piece.
///
/// Squares are indexed a1 = 0 .. h8 = 63. The derived `Ord` (source, then
/// destination, then promotion) is the canonical move order used everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoveId {
    from: u8,
    to: u8,
    promotion: Option<Promotion>,
}

impl MoveId {
    pub fn new(from: u8, to: u8, promotion: Option<Promotion>) -> MoveId {
        assert!(from < 64 && to < 64, "square index out of range");
        MoveId { from, to, promotion }
    }

    pub fn from_sq(&self) -> u8 {
        self.from
    }

    pub fn to_sq(&self) -> u8 {
        self.to
    }

    pub fn promotion(&self) -> Option<Promotion> {
        self.promotion
    }

    fn to_chess(self) -> ChessMove {
        ChessMove::new(
            chess::ALL_SQUARES[self.from as usize],
            chess::ALL_SQUARES[self.to as usize],
            self.promotion.map(Promotion::piece),
        )
    }

    fn from_chess(m: ChessMove) -> MoveId {
        MoveId {
            from: m.get_source().to_index() as u8,
            to: m.get_dest().to_index() as u8,
            promotion: m.get_promotion().and_then(Promotion::from_piece),
        }
    }
}

fn square_name(idx: u8) -> String {
    let file = (b'a' + idx % 8) as char;
    let rank = (b'1' + idx / 8) as char;
    format!("{file}{rank}")
}

fn parse_square(s: &[u8]) -> Option<u8> {
    match s {
        [f @ b'a'..=b'h', r @ b'1'..=b'8'] => Some((r - b'1') * 8 + (f - b'a')),
        _ => None,
    }
}

impl fmt::Display for MoveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", square_name(self.from), square_name(self.to))?;
        if let Some(p) = self.promotion {
            write!(f, "{}", p.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for MoveId {
    type Err = BoardError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let bad = || BoardError::MalformedMove(s.to_string());
        if bytes.len() != 4 && bytes.len() != 5 {
            return Err(bad());
        }
        let from = parse_square(&bytes[0..2]).ok_or_else(bad)?;
        let to = parse_square(&bytes[2..4]).ok_or_else(bad)?;
        let promotion = match bytes.get(4) {
            None => None,
            Some(&c) => Some(Promotion::from_char(c as char).ok_or_else(bad)?),
        };
        if from == to {
            return Err(bad());
        }
        Ok(MoveId { from, to, promotion })
    }
}

impl Serialize for MoveId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MoveId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatusTag {
    Ongoing,
    Checkmate,
    Stalemate,
    ThreefoldRepetition,
    FiftyMove,
    InsufficientMaterial,
    PlyCap,
    /// Never produced by the rules; set when a player concedes.
    Resignation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameStatus {
    pub tag: StatusTag,
    pub winner: Option<Side>,
}

impl GameStatus {
    pub const ONGOING: GameStatus = GameStatus {
        tag: StatusTag::Ongoing,
        winner: None,
    };

    pub fn resignation(loser: Side) -> GameStatus {
        GameStatus {
            tag: StatusTag::Resignation,
            winner: Some(loser.opponent()),
        }
    }

    fn draw(tag: StatusTag) -> GameStatus {
        GameStatus { tag, winner: None }
    }

    pub fn is_over(&self) -> bool {
        self.tag != StatusTag::Ongoing
    }

    /// PGN result token.
    pub fn result_token(&self) -> &'static str {
        match (self.tag, self.winner) {
            (StatusTag::Ongoing, _) => "*",
            (_, Some(Side::White)) => "1-0",
            (_, Some(Side::Black)) => "0-1",
            (_, None) => "1/2-1/2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GamePhase {
    Opening,
    Midgame,
    Endgame,
}

impl GamePhase {
    /// Reactivity multiplier for the phase.
    pub fn multiplier(self) -> f64 {
        match self {
            GamePhase::Opening => 0.15,
            GamePhase::Midgame => 1.0,
            GamePhase::Endgame => 0.1,
        }
    }
}

/// Material value on the (1, 3, 3, 5, 9) scale; kings count zero.
pub(crate) fn piece_value(p: Piece) -> i32 {
    match p {
        Piece::Pawn => 1,
        Piece::Knight | Piece::Bishop => 3,
        Piece::Rook => 5,
        Piece::Queen => 9,
        Piece::King => 0,
    }
}

/// Immutable chess position plus the history needed for draw rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoardState {
    board: Board,
    halfmove_clock: u32,
    fullmove_number: u32,
    ply: u32,
    /// Zobrist hashes of every position reached, current one last.
    history: Vec<u64>,
    last_move: Option<MoveId>,
}

impl Default for BoardState {
    fn default() -> Self {
        BoardState::initial()
    }
}

impl BoardState {
    pub fn initial() -> BoardState {
        let board = Board::default();
        BoardState {
            history: vec![board.get_hash()],
            board,
            halfmove_clock: 0,
            fullmove_number: 1,
            ply: 0,
            last_move: None,
        }
    }

    /// Parses a FEN. Clock fields are optional and default to `0 1`. The ply
    /// counter is derived from the fullmove number.
    pub fn from_fen(fen: &str) -> Result<BoardState, BoardError> {
        let bad = || BoardError::InvalidFen(fen.to_string());
        let fields: Vec<&str> = fen.split_whitespace().collect();
        if fields.len() != 4 && fields.len() != 6 {
            return Err(bad());
        }
        if !placement_is_sane(fields[0]) {
            return Err(bad());
        }
        let (halfmove_clock, fullmove_number) = if fields.len() == 6 {
            let h: u32 = fields[4].parse().map_err(|_| bad())?;
            let f: u32 = fields[5].parse().map_err(|_| bad())?;
            (h, f.max(1))
        } else {
            (0, 1)
        };
        let core = fields[..4].join(" ");
        let board = Board::from_str(&core).map_err(|_| bad())?;
        let black = board.side_to_move() == Color::Black;
        let ply = 2 * (fullmove_number - 1) + u32::from(black);
        Ok(BoardState {
            history: vec![board.get_hash()],
            board,
            halfmove_clock,
            fullmove_number,
            ply,
            last_move: None,
        })
    }

    pub(crate) fn raw(&self) -> &Board {
        &self.board
    }

    pub fn side_to_move(&self) -> Side {
        Side::from_color(self.board.side_to_move())
    }

    pub fn halfmove_clock(&self) -> u32 {
        self.halfmove_clock
    }

    pub fn fullmove_number(&self) -> u32 {
        self.fullmove_number
    }

    pub fn ply(&self) -> u32 {
        self.ply
    }

    pub fn last_move(&self) -> Option<MoveId> {
        self.last_move
    }

    pub fn hash(&self) -> u64 {
        self.board.get_hash()
    }

    pub fn in_check(&self) -> bool {
        *self.board.checkers() != EMPTY
    }

    /// Number of times the current position has occurred, including now.
    pub fn repetitions(&self) -> usize {
        let current = self.board.get_hash();
        self.history.iter().filter(|&&h| h == current).count()
    }

    /// Legal moves in canonical order.
    pub fn legal_moves(&self) -> Vec<MoveId> {
        let mut moves: Vec<MoveId> = MoveGen::new_legal(&self.board)
            .map(MoveId::from_chess)
            .collect();
        moves.sort_unstable();
        moves
    }

    pub fn legal_move_count(&self) -> usize {
        MoveGen::new_legal(&self.board).len()
    }

    pub fn is_legal(&self, m: MoveId) -> bool {
        MoveGen::new_legal(&self.board).any(|c| MoveId::from_chess(c) == m)
    }

    pub fn apply_move(&self, m: MoveId) -> Result<BoardState, BoardError> {
        if !self.is_legal(m) {
            return Err(BoardError::IllegalMove {
                mv: m.to_string(),
                fen: self.to_fen(),
            });
        }
        Ok(self.apply_unchecked(m))
    }

    /// Applies a move already known to be legal.
    pub(crate) fn apply_unchecked(&self, m: MoveId) -> BoardState {
        let cm = m.to_chess();
        let pawn_move = self.board.piece_on(cm.get_source()) == Some(Piece::Pawn);
        let capture = self.board.piece_on(cm.get_dest()).is_some();
        let board = self.board.make_move_new(cm);
        let halfmove_clock = if pawn_move || capture {
            0
        } else {
            self.halfmove_clock + 1
        };
        let fullmove_number = if self.board.side_to_move() == Color::Black {
            self.fullmove_number + 1
        } else {
            self.fullmove_number
        };
        let mut history = Vec::with_capacity(self.history.len() + 1);
        // Irreversible moves make every earlier position unreachable.
        if halfmove_clock > 0 {
            history.extend_from_slice(&self.history);
        }
        history.push(board.get_hash());
        BoardState {
            board,
            halfmove_clock,
            fullmove_number,
            ply: self.ply + 1,
            history,
            last_move: Some(m),
        }
    }

    /// Position with the side to move passed; `None` when in check.
    pub(crate) fn null_move_board(&self) -> Option<Board> {
        self.board.null_move()
    }

    pub fn status(&self) -> GameStatus {
        if self.legal_move_count() == 0 {
            return if self.in_check() {
                GameStatus {
                    tag: StatusTag::Checkmate,
                    winner: Some(self.side_to_move().opponent()),
                }
            } else {
                GameStatus::draw(StatusTag::Stalemate)
            };
        }
        if self.insufficient_material() {
            return GameStatus::draw(StatusTag::InsufficientMaterial);
        }
        if self.halfmove_clock >= 100 {
            return GameStatus::draw(StatusTag::FiftyMove);
        }
        if self.repetitions() >= 3 {
            return GameStatus::draw(StatusTag::ThreefoldRepetition);
        }
        if self.ply >= PLY_CAP {
            return GameStatus::draw(StatusTag::PlyCap);
        }
        GameStatus::ONGOING
    }

    /// Neither side can deliver mate: bare kings, a single minor piece, or
    /// bishops that all stand on one square colour.
    pub fn insufficient_material(&self) -> bool {
        let b = &self.board;
        let heavy = *b.pieces(Piece::Pawn) | *b.pieces(Piece::Rook) | *b.pieces(Piece::Queen);
        if heavy != EMPTY {
            return false;
        }
        let knights = *b.pieces(Piece::Knight);
        let bishops = *b.pieces(Piece::Bishop);
        if (knights | bishops).popcnt() <= 1 {
            return true;
        }
        if knights != EMPTY {
            return false;
        }
        const DARK: u64 = 0xAA55_AA55_AA55_AA55;
        let on_dark = (bishops & BitBoard::new(DARK)).popcnt();
        on_dark == 0 || on_dark == bishops.popcnt()
    }

    /// Non-pawn, non-king material of one side.
    pub fn piece_material(&self, side: Side) -> i32 {
        let own = *self.board.color_combined(side.color());
        [Piece::Knight, Piece::Bishop, Piece::Rook, Piece::Queen]
            .iter()
            .map(|&p| (*self.board.pieces(p) & own).popcnt() as i32 * piece_value(p))
            .sum()
    }

    pub fn phase(&self) -> GamePhase {
        if self.ply <= OPENING_PLIES {
            return GamePhase::Opening;
        }
        let white = self.piece_material(Side::White);
        let black = self.piece_material(Side::Black);
        let no_queens = *self.board.pieces(Piece::Queen) == EMPTY;
        if (white <= 6 && black <= 6) || (no_queens && white + black <= 13) {
            GamePhase::Endgame
        } else {
            GamePhase::Midgame
        }
    }

    pub fn to_fen(&self) -> String {
        format!(
            "{} {} {}",
            self.position_key(),
            self.halfmove_clock,
            self.fullmove_number
        )
    }

    /// FEN without the two clock fields.
    pub fn position_key(&self) -> String {
        let b = &self.board;
        let mut placement = String::new();
        for rank in (0..8).rev() {
            let mut empty = 0;
            for file in 0..8 {
                let sq = chess::ALL_SQUARES[rank * 8 + file];
                match b.piece_on(sq) {
                    None => empty += 1,
                    Some(p) => {
                        if empty > 0 {
                            placement.push(char::from(b'0' + empty));
                            empty = 0;
                        }
                        let c = p.to_string(Color::White);
                        let c = if b.color_on(sq) == Some(Color::White) {
                            c.to_uppercase()
                        } else {
                            c.to_lowercase()
                        };
                        placement.push_str(&c);
                    }
                }
            }
            if empty > 0 {
                placement.push(char::from(b'0' + empty));
            }
            if rank > 0 {
                placement.push('/');
            }
        }
        let side = if b.side_to_move() == Color::White {
            "w"
        } else {
            "b"
        };
        let mut castling = String::new();
        for (color, k, q) in [(Color::White, 'K', 'Q'), (Color::Black, 'k', 'q')] {
            let rights = b.castle_rights(color);
            if rights.has_kingside() {
                castling.push(k);
            }
            if rights.has_queenside() {
                castling.push(q);
            }
        }
        if castling.is_empty() {
            castling.push('-');
        }
        // The crate stores the double-pushed pawn; FEN wants the square behind it.
        let ep = match b.en_passant() {
            Some(sq) => {
                let target = if b.side_to_move() == Color::White {
                    sq.to_index() + 8
                } else {
                    sq.to_index() - 8
                };
                square_name(target as u8)
            }
            None => "-".to_string(),
        };
        format!("{placement} {side} {castling} {ep}")
    }

    /// Standard algebraic notation for a legal move.
    pub fn san(&self, m: MoveId) -> Result<String, BoardError> {
        if !self.is_legal(m) {
            return Err(BoardError::IllegalMove {
                mv: m.to_string(),
                fen: self.to_fen(),
            });
        }
        let mut san = self.san_body(m);
        let after = self.apply_unchecked(m);
        if after.in_check() {
            san.push(if after.legal_move_count() == 0 { '#' } else { '+' });
        }
        Ok(san)
    }

    fn san_body(&self, m: MoveId) -> String {
        let b = &self.board;
        let src = chess::ALL_SQUARES[m.from as usize];
        let dst = chess::ALL_SQUARES[m.to as usize];
        let piece = b.piece_on(src).expect("legal move has a mover");
        if piece == Piece::King && (i32::from(m.from % 8) - i32::from(m.to % 8)).abs() == 2 {
            return if m.to % 8 == 6 { "O-O".into() } else { "O-O-O".into() };
        }
        let capture = b.piece_on(dst).is_some()
            || (piece == Piece::Pawn && m.from % 8 != m.to % 8);
        let mut san = String::new();
        if piece == Piece::Pawn {
            if capture {
                san.push((b'a' + m.from % 8) as char);
            }
        } else {
            san.push_str(&piece.to_string(Color::White).to_uppercase());
            let rivals: Vec<MoveId> = self
                .legal_moves()
                .into_iter()
                .filter(|o| {
                    o.to == m.to
                        && o.from != m.from
                        && b.piece_on(chess::ALL_SQUARES[o.from as usize]) == Some(piece)
                })
                .collect();
            if !rivals.is_empty() {
                let same_file = rivals.iter().any(|o| o.from % 8 == m.from % 8);
                let same_rank = rivals.iter().any(|o| o.from / 8 == m.from / 8);
                let name = square_name(m.from);
                if !same_file {
                    san.push_str(&name[..1]);
                } else if !same_rank {
                    san.push_str(&name[1..]);
                } else {
                    san.push_str(&name);
                }
            }
        }
        if capture {
            san.push('x');
        }
        san.push_str(&square_name(m.to));
        if let Some(p) = m.promotion {
            san.push('=');
            san.push(p.to_char().to_ascii_uppercase());
        }
        san
    }

    /// Resolves a SAN token against the legal moves of this position.
    pub fn parse_san(&self, san: &str) -> Result<MoveId, BoardError> {
        let clean: String = san
            .trim_end_matches(['+', '#', '!', '?'])
            .replace('0', "O");
        self.legal_moves()
            .into_iter()
            .find(|&m| self.san_body(m) == clean)
            .ok_or_else(|| BoardError::UnknownSan(san.to_string()))
    }

    /// Piece and colour on a square, as a FEN letter.
    pub fn piece_char(&self, sq: u8) -> Option<char> {
        let s: Square = chess::ALL_SQUARES[sq as usize];
        let p = self.board.piece_on(s)?;
        let c = p.to_string(Color::White);
        let c = if self.board.color_on(s) == Some(Color::White) {
            c.to_uppercase()
        } else {
            c.to_lowercase()
        };
        c.chars().next()
    }
}

/// Eight ranks of eight files, one king per side, no pawns on the back
/// ranks. The move generator assumes all of these.
fn placement_is_sane(placement: &str) -> bool {
    let ranks: Vec<&str> = placement.split('/').collect();
    if ranks.len() != 8 {
        return false;
    }
    let mut kings = [0u32; 2];
    for (i, rank) in ranks.iter().enumerate() {
        let mut files = 0u32;
        for ch in rank.chars() {
            match ch {
                '1'..='8' => files += ch.to_digit(10).unwrap_or(0),
                'K' | 'k' => {
                    kings[usize::from(ch == 'k')] += 1;
                    files += 1;
                }
                'P' | 'p' if i == 0 || i == 7 => return false,
                'P' | 'N' | 'B' | 'R' | 'Q' | 'p' | 'n' | 'b' | 'r' | 'q' => files += 1,
                _ => return false,
            }
        }
        if files != 8 {
            return false;
        }
    }
    kings == [1, 1]
}

/// Counts leaf nodes of the legal move tree to the given depth.
pub fn perft(b: &BoardState, depth: u32) -> u64 {
    fn go(board: &Board, depth: u32) -> u64 {
        let moves = MoveGen::new_legal(board);
        if depth == 1 {
            return moves.len() as u64;
        }
        moves.map(|m| go(&board.make_move_new(m), depth - 1)).sum()
    }
    if depth == 0 {
        return 1;
    }
    go(&b.board, depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(s: &str) -> MoveId {
        s.parse().unwrap()
    }

    fn play(moves: &[&str]) -> BoardState {
        moves
            .iter()
            .fold(BoardState::initial(), |b, m| b.apply_move(mv(m)).unwrap())
    }

    #[test]
    fn initial_move_count() {
        let b = BoardState::initial();
        assert_eq!(b.legal_moves().len(), 20);
        assert_eq!(perft(&b, 2), 400);
    }

    #[test]
    fn canonical_order_is_sorted() {
        let b = play(&["e2e4", "d7d5", "e4d5", "g8f6"]);
        let moves = b.legal_moves();
        let mut sorted = moves.clone();
        sorted.sort();
        assert_eq!(moves, sorted);
    }

    #[test]
    fn promotion_order_q_r_b_n() {
        let b = BoardState::from_fen("8/4P3/8/8/8/k7/8/K7 w - - 0 1").unwrap();
        let promos: Vec<String> = b
            .legal_moves()
            .into_iter()
            .filter(|m| m.promotion().is_some())
            .map(|m| m.to_string())
            .collect();
        assert_eq!(promos, ["e7e8q", "e7e8r", "e7e8b", "e7e8n"]);
    }

    #[test]
    fn e2e4_from_start() {
        let b = BoardState::initial().apply_move(mv("e2e4")).unwrap();
        assert_eq!(b.piece_char(28), Some('P'));
        assert_eq!(b.side_to_move(), Side::Black);
        assert_eq!(b.ply(), 1);
        assert_eq!(b.halfmove_clock(), 0);
    }

    #[test]
    fn quiet_knight_move_ticks_clock() {
        let b = BoardState::from_fen("4k3/8/8/8/8/8/8/1N2K3 w - - 7 20").unwrap();
        let after = b.apply_move(mv("b1c3")).unwrap();
        assert_eq!(after.halfmove_clock(), 8);
    }

    #[test]
    fn promotion_places_queen() {
        let b = BoardState::from_fen("8/4P3/8/8/8/k7/8/K7 w - - 0 1").unwrap();
        let after = b.apply_move(mv("e7e8q")).unwrap();
        assert_eq!(after.piece_char(60), Some('Q'));
    }

    #[test]
    fn illegal_move_rejected() {
        let err = BoardState::initial().apply_move(mv("e2e5")).unwrap_err();
        assert!(matches!(err, BoardError::IllegalMove { .. }));
    }

    #[test]
    fn fools_mate() {
        let b = play(&["f2f3", "e7e5", "g2g4", "d8h4"]);
        assert!(b.legal_moves().is_empty());
        assert_eq!(
            b.status(),
            GameStatus {
                tag: StatusTag::Checkmate,
                winner: Some(Side::Black)
            }
        );
    }

    #[test]
    fn bare_kings_are_insufficient() {
        let b = BoardState::from_fen("4k3/8/8/8/8/8/8/4K3 w - - 0 1").unwrap();
        assert_eq!(b.status().tag, StatusTag::InsufficientMaterial);
        let kb = BoardState::from_fen("4k3/8/8/8/8/8/8/2B1K3 w - - 0 1").unwrap();
        assert!(kb.insufficient_material());
        let kr = BoardState::from_fen("4k3/8/8/8/8/8/8/R3K3 w - - 0 1").unwrap();
        assert!(!kr.insufficient_material());
        let same_colour = BoardState::from_fen("4kb2/8/8/8/8/8/8/2B1K3 w - - 0 1").unwrap();
        assert!(same_colour.insufficient_material());
        let opposite = BoardState::from_fen("4k1b1/8/8/8/8/8/8/2B1K3 w - - 0 1").unwrap();
        assert!(!opposite.insufficient_material());
    }

    #[test]
    fn threefold_repetition() {
        let shuffle = ["g1f3", "g8f6", "f3g1", "f6g8"];
        let mut seq = shuffle.to_vec();
        seq.extend_from_slice(&shuffle);
        let b = play(&seq);
        assert_eq!(b.repetitions(), 3);
        assert_eq!(b.status().tag, StatusTag::ThreefoldRepetition);
        // One cycle short is still ongoing.
        let b = play(&seq[..7]);
        assert_eq!(b.status().tag, StatusTag::Ongoing);
    }

    #[test]
    fn fifty_move_rule() {
        let b = BoardState::from_fen("4k3/8/8/8/8/8/8/R3K3 w - - 100 80").unwrap();
        assert_eq!(b.status().tag, StatusTag::FiftyMove);
    }

    #[test]
    fn ply_cap_draw() {
        // fullmove 201 with white to move is ply 400.
        let b = BoardState::from_fen("4k3/8/8/8/8/8/8/R3K3 w - - 0 201").unwrap();
        assert_eq!(b.ply(), 400);
        assert_eq!(
            b.status(),
            GameStatus {
                tag: StatusTag::PlyCap,
                winner: None
            }
        );
    }

    #[test]
    fn stalemate() {
        let b = BoardState::from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 60").unwrap();
        assert_eq!(b.status().tag, StatusTag::Stalemate);
    }

    #[test]
    fn phases() {
        let b = BoardState::initial();
        assert_eq!(b.phase(), GamePhase::Opening);
        assert_eq!(b.phase().multiplier(), 0.15);
        let mid = BoardState::from_fen(
            "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 16",
        )
        .unwrap();
        assert_eq!(mid.ply(), 30);
        assert_eq!(mid.phase(), GamePhase::Midgame);
        let rook_ending = BoardState::from_fen("r3k3/8/8/8/8/8/8/R3K3 w - - 0 40").unwrap();
        assert_eq!(rook_ending.phase(), GamePhase::Endgame);
        assert_eq!(rook_ending.phase().multiplier(), 0.1);
        // Queenless, 13 points in total.
        let queenless = BoardState::from_fen("r1b1k3/8/8/8/8/8/8/R3K3 w - - 0 40").unwrap();
        assert_eq!(queenless.phase(), GamePhase::Endgame);
        // Queens on and one side above 6.
        let queens = BoardState::from_fen("3qk3/8/8/8/8/8/8/3QK2R w - - 0 40").unwrap();
        assert_eq!(queens.phase(), GamePhase::Midgame);
    }

    #[test]
    fn fen_round_trip() {
        let b = play(&["e2e4", "c7c5", "g1f3"]);
        let fen = b.to_fen();
        assert_eq!(fen, "rnbqkbnr/pp1ppppp/8/2p5/4P3/5N2/PPPP1PPP/RNBQKB1R b KQkq - 1 2");
        let back = BoardState::from_fen(&fen).unwrap();
        assert_eq!(back.to_fen(), fen);
        assert_eq!(BoardState::initial().to_fen(), INITIAL_FEN);
    }

    #[test]
    fn fen_en_passant_square() {
        let b = play(&["e2e4", "a7a6", "e4e5", "d7d5"]);
        assert!(b.to_fen().contains(" d6 "));
        let ep = b.apply_move(mv("e5d6")).unwrap();
        assert_eq!(ep.piece_char(35), None);
    }

    #[test]
    fn fen_rejects_garbage() {
        assert!(BoardState::from_fen("not a fen").is_err());
        assert!(BoardState::from_fen("8/8/8/8/8/8/8/8 w - - 0 1").is_err());
        assert!(BoardState::from_fen("4k3/8/8/8/8/8/8/4K2 w - - 0 1").is_err());
        assert!(BoardState::from_fen("P3k3/8/8/8/8/8/8/4K3 w - - 0 1").is_err());
        assert!(BoardState::from_fen("4k3/8/8/8/8/8/8/3KK3 w - - 0 1").is_err());
    }

    #[test]
    fn san_rendering() {
        let b = BoardState::initial();
        assert_eq!(b.san(mv("g1f3")).unwrap(), "Nf3");
        assert_eq!(b.san(mv("e2e4")).unwrap(), "e4");
        let mate = play(&["f2f3", "e7e5", "g2g4"]);
        assert_eq!(mate.san(mv("d8h4")).unwrap(), "Qh4#");
        let castle = BoardState::from_fen("4k3/8/8/8/8/8/8/R3K2R w KQ - 0 1").unwrap();
        assert_eq!(castle.san(mv("e1g1")).unwrap(), "O-O");
        assert_eq!(castle.san(mv("e1c1")).unwrap(), "O-O-O");
        let twins = BoardState::from_fen("4k3/8/8/8/8/8/4K3/R6R w - - 0 1").unwrap();
        assert_eq!(twins.san(mv("a1d1")).unwrap(), "Rad1");
        assert_eq!(twins.parse_san("Rhf1").unwrap(), mv("h1f1"));
        assert_eq!(twins.san(mv("a1a8")).unwrap(), "Ra8+");
        let promo = BoardState::from_fen("8/4P3/8/8/8/k7/8/K7 w - - 0 1").unwrap();
        assert_eq!(promo.san(mv("e7e8n")).unwrap(), "e8=N");
    }
}
