//! PGN export and a tolerant reader for the subset needed to replay games.

use thiserror::Error;

use crate::board::{BoardError, BoardState, MoveId, INITIAL_FEN};
use crate::engine::GameRecord;

#[derive(Debug, Error)]
pub enum PgnError {
    #[error("game {game}: {source}")]
    Move { game: usize, source: BoardError },
    #[error("game {game}: bad FEN tag")]
    Fen { game: usize },
    #[error("unterminated {0}")]
    Unterminated(&'static str),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PgnGame {
    pub tags: Vec<(String, String)>,
    pub start: BoardState,
    pub moves: Vec<MoveId>,
    pub result: String,
}

impl PgnGame {
    pub fn tag(&self, name: &str) -> Option<&str> {
        self.tags
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }
}

const LINE_WIDTH: usize = 79;

/// SAN movetext with move numbers, wrapped, ending in the result token.
pub fn movetext(start: &BoardState, moves: &[MoveId], result: &str) -> Result<String, BoardError> {
    let mut tokens = Vec::with_capacity(moves.len() * 2);
    let mut b = start.clone();
    for (i, &m) in moves.iter().enumerate() {
        let number = b.fullmove_number();
        match b.side_to_move() {
            crate::board::Side::White => tokens.push(format!("{number}.")),
            crate::board::Side::Black if i == 0 => tokens.push(format!("{number}...")),
            crate::board::Side::Black => {}
        }
        tokens.push(b.san(m)?);
        b = b.apply_move(m)?;
    }
    tokens.push(result.to_string());

    let mut out = String::new();
    let mut width = 0;
    for t in tokens {
        if width > 0 && width + 1 + t.len() > LINE_WIDTH {
            out.push('\n');
            width = 0;
        } else if width > 0 {
            out.push(' ');
            width += 1;
        }
        width += t.len();
        out.push_str(&t);
    }
    out.push('\n');
    Ok(out)
}

fn escape(v: &str) -> String {
    v.replace('\\', "\\\\").replace('"', "\\\"")
}

/// One PGN game. `extra` tags follow the seven-tag roster.
pub fn write_game(
    start: &BoardState,
    moves: &[MoveId],
    result: &str,
    roster: [&str; 7],
    extra: &[(&str, String)],
) -> Result<String, BoardError> {
    let names = ["Event", "Site", "Date", "Round", "White", "Black", "Result"];
    let mut out = String::new();
    for (k, v) in names.iter().zip(roster) {
        out.push_str(&format!("[{k} \"{}\"]\n", escape(v)));
    }
    let fen = start.to_fen();
    if fen != INITIAL_FEN {
        out.push_str("[SetUp \"1\"]\n");
        out.push_str(&format!("[FEN \"{fen}\"]\n"));
    }
    for (k, v) in extra {
        out.push_str(&format!("[{k} \"{}\"]\n", escape(v)));
    }
    out.push('\n');
    out.push_str(&movetext(start, moves, result)?);
    Ok(out)
}

/// PGN for a played record. `round` numbers games within a bundle.
pub fn record_to_pgn(r: &GameRecord, event: &str, round: usize) -> String {
    let start = BoardState::from_fen(&r.start_fen).expect("record start FEN is valid");
    let white = format!("{} (psyche {})", r.white.preset, r.white.initial_psyche);
    let black = format!("{} (psyche {})", r.black.preset, r.black.initial_psyche);
    let round = round.to_string();
    let result = r.status.result_token();
    let mut extra = vec![("Seed", r.seed.to_string())];
    if let Some(c) = &r.condition {
        extra.push(("Condition", c.clone()));
    }
    let term = serde_json::to_value(r.status.tag)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    extra.push(("Termination", term));
    write_game(
        &start,
        &r.moves,
        result,
        [event, "local", "????.??.??", &round, &white, &black, result],
        &extra,
    )
    .expect("recorded moves are legal")
}

fn unquote(v: &str) -> String {
    let inner = v.strip_prefix('"').and_then(|r| r.strip_suffix('"')).unwrap_or(v);
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            out.extend(chars.next());
        } else {
            out.push(c);
        }
    }
    out
}

/// Reads every game in `text`. Comments, variations and NAGs are skipped.
pub fn parse_pgn(text: &str) -> Result<Vec<PgnGame>, PgnError> {
    let mut games = Vec::new();
    let mut tags: Vec<(String, String)> = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut in_moves = false;

    let finish = |tags: &mut Vec<(String, String)>,
                      tokens: &mut Vec<String>,
                      games: &mut Vec<PgnGame>|
     -> Result<(), PgnError> {
        if tags.is_empty() && tokens.is_empty() {
            return Ok(());
        }
        let game = games.len() + 1;
        let start = match tags.iter().find(|(k, _)| k == "FEN") {
            Some((_, fen)) => BoardState::from_fen(fen).map_err(|_| PgnError::Fen { game })?,
            None => BoardState::initial(),
        };
        let mut b = start.clone();
        let mut moves = Vec::new();
        let mut result = "*".to_string();
        for t in tokens.drain(..) {
            if matches!(t.as_str(), "1-0" | "0-1" | "1/2-1/2" | "*") {
                result = t;
                continue;
            }
            let san = t.trim_end_matches(['!', '?']);
            let m = b
                .parse_san(san)
                .map_err(|source| PgnError::Move { game, source })?;
            b = b.apply_unchecked(m);
            moves.push(m);
        }
        games.push(PgnGame {
            tags: std::mem::take(tags),
            start,
            moves,
            result,
        });
        Ok(())
    };

    let mut chars = text.chars();
    let mut word = String::new();
    let flush_word = |word: &mut String, tokens: &mut Vec<String>| {
        if word.is_empty() {
            return;
        }
        let w = std::mem::take(word);
        // Move numbers: "12." or "12..." possibly glued to the move.
        let trimmed = w.trim_start_matches(|c: char| c.is_ascii_digit() || c == '.');
        let is_number = trimmed.is_empty() && w.starts_with(|c: char| c.is_ascii_digit()) && w.contains('.');
        if is_number || w.starts_with('$') {
            return;
        }
        if matches!(w.as_str(), "1-0" | "0-1" | "1/2-1/2" | "*") {
            tokens.push(w);
        } else if w.contains('.') {
            tokens.push(trimmed.to_string());
        } else {
            tokens.push(w);
        }
    };

    while let Some(c) = chars.next() {
        match c {
            '[' if !in_moves || word.is_empty() => {
                if in_moves {
                    flush_word(&mut word, &mut tokens);
                    finish(&mut tags, &mut tokens, &mut games)?;
                    in_moves = false;
                }
                let mut inner = String::new();
                let mut quoted = false;
                let mut escaped = false;
                loop {
                    let Some(ch) = chars.next() else {
                        return Err(PgnError::Unterminated("tag"));
                    };
                    match ch {
                        ']' if !quoted => break,
                        '"' if !escaped => quoted = !quoted,
                        _ => {}
                    }
                    escaped = ch == '\\' && !escaped;
                    inner.push(ch);
                }
                if let Some((k, v)) = inner.trim().split_once(' ') {
                    tags.push((k.to_string(), unquote(v.trim())));
                }
            }
            '{' => {
                flush_word(&mut word, &mut tokens);
                loop {
                    match chars.next() {
                        Some('}') => break,
                        Some(_) => {}
                        None => return Err(PgnError::Unterminated("comment")),
                    }
                }
            }
            ';' => {
                flush_word(&mut word, &mut tokens);
                for ch in chars.by_ref() {
                    if ch == '\n' {
                        break;
                    }
                }
            }
            '(' => {
                flush_word(&mut word, &mut tokens);
                let mut depth = 1;
                while depth > 0 {
                    match chars.next() {
                        Some('(') => depth += 1,
                        Some(')') => depth -= 1,
                        Some(_) => {}
                        None => return Err(PgnError::Unterminated("variation")),
                    }
                }
            }
            c if c.is_whitespace() => {
                flush_word(&mut word, &mut tokens);
                if let Some(last) = tokens.last() {
                    if matches!(last.as_str(), "1-0" | "0-1" | "1/2-1/2" | "*") {
                        finish(&mut tags, &mut tokens, &mut games)?;
                        in_moves = false;
                    }
                }
            }
            c => {
                in_moves = true;
                word.push(c);
            }
        }
    }
    flush_word(&mut word, &mut tokens);
    finish(&mut tags, &mut tokens, &mut games)?;
    Ok(games)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(s: &str) -> MoveId {
        s.parse().unwrap()
    }

    #[test]
    fn writes_numbered_movetext() {
        let b = BoardState::initial();
        let moves = [mv("f2f3"), mv("e7e5"), mv("g2g4"), mv("d8h4")];
        assert_eq!(movetext(&b, &moves, "0-1").unwrap(), "1. f3 e5 2. g4 Qh4# 0-1\n");
    }

    #[test]
    fn black_to_move_start() {
        let b = BoardState::initial().apply_move(mv("e2e4")).unwrap();
        assert_eq!(movetext(&b, &[mv("e7e5")], "*").unwrap(), "1... e5 *\n");
    }

    #[test]
    fn round_trips_through_reader() {
        let b = BoardState::from_fen("4k3/8/8/8/8/8/4K3/R6R w - - 0 1").unwrap();
        let moves = [mv("a1d1"), mv("e8f7"), mv("h1h7"), mv("f7e6")];
        let text = write_game(
            &b,
            &moves,
            "*",
            ["t", "?", "????.??.??", "1", "a \"quoted\"", "b", "*"],
            &[("Seed", "5".into())],
        )
        .unwrap();
        let games = parse_pgn(&format!("{text}\n{text}")).unwrap();
        assert_eq!(games.len(), 2);
        assert_eq!(games[0].moves, moves);
        assert_eq!(games[0].start, b);
        assert_eq!(games[0].tag("White"), Some("a \"quoted\""));
        assert_eq!(games[1].tag("Seed"), Some("5"));
    }

    #[test]
    fn skips_annotations() {
        let text = "[Event \"x\"]\n\n1. e4 {best by test} e5 (1... c5 2. Nf3) 2. Nf3 $1 Nc6?! ; aside\n3.Bb5 a6 1/2-1/2\n";
        let games = parse_pgn(text).unwrap();
        assert_eq!(games.len(), 1);
        assert_eq!(games[0].moves.len(), 6);
        assert_eq!(games[0].moves[4], mv("f1b5"));
        assert_eq!(games[0].result, "1/2-1/2");
    }

    #[test]
    fn reports_bad_move() {
        assert!(matches!(
            parse_pgn("1. e5 *"),
            Err(PgnError::Move { game: 1, .. })
        ));
    }
}
