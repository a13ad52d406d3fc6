//! Move-probability sources and entropy confidence.

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::board::{BoardState, MoveId};
use crate::distribution::MoveDistribution;
use crate::psyche::factor_vector;

/// Anything that maps a position to a distribution over its legal moves.
pub trait PolicySource: Send + Sync {
    /// `b` must have at least one legal move.
    fn distribution(&self, b: &BoardState) -> MoveDistribution;
}

/// Weight on mobility relative to material in the heuristic score.
pub const MOBILITY_WEIGHT: f64 = 0.1;

/// One-ply heuristic: softmax over material and mobility after each move.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeuristicPolicy {
    temperature: f64,
}

impl HeuristicPolicy {
    pub fn new(temperature: f64) -> HeuristicPolicy {
        assert!(
            temperature.is_finite() && temperature > 0.0,
            "temperature must be positive"
        );
        HeuristicPolicy { temperature }
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Score of each legal move from the mover's point of view.
    pub fn scores(b: &BoardState) -> (Vec<MoveId>, Vec<f64>) {
        let moves = b.legal_moves();
        let scores = moves
            .iter()
            .map(|&m| {
                // Factors of the reply position are the opponent's view.
                let f = factor_vector(&b.apply_unchecked(m));
                -(f64::from(f.material) + MOBILITY_WEIGHT * f64::from(f.mobility))
            })
            .collect();
        (moves, scores)
    }
}

impl PolicySource for HeuristicPolicy {
    fn distribution(&self, b: &BoardState) -> MoveDistribution {
        let (moves, scores) = Self::scores(b);
        let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights = scores
            .iter()
            .map(|s| ((s - top) / self.temperature).exp())
            .collect();
        MoveDistribution::from_weights(moves, weights).expect("position has legal moves")
    }
}

/// Uniform over legal moves.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformPolicy;

impl PolicySource for UniformPolicy {
    fn distribution(&self, b: &BoardState) -> MoveDistribution {
        MoveDistribution::uniform(b.legal_moves()).expect("position has legal moves")
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("policy table io: {0}")]
    Io(#[from] std::io::Error),
}

/// Externally supplied probabilities keyed by position (FEN without clocks).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolicyTable {
    entries: HashMap<String, Vec<(MoveId, f64)>>,
}

impl PolicyTable {
    pub fn new() -> PolicyTable {
        PolicyTable::default()
    }

    /// Adds an entry after checking legality; weights are normalized.
    pub fn insert(
        &mut self,
        b: &BoardState,
        weights: &[(MoveId, f64)],
    ) -> Result<(), String> {
        if weights.is_empty() {
            return Err("entry lists no moves".into());
        }
        let mut seen = std::collections::HashSet::new();
        for &(m, p) in weights {
            if !b.is_legal(m) {
                return Err(format!("{m} is not legal in this position"));
            }
            if !(p.is_finite() && p >= 0.0) {
                return Err(format!("bad probability {p} for {m}"));
            }
            if !seen.insert(m) {
                return Err(format!("{m} listed twice"));
            }
        }
        let total: f64 = weights.iter().map(|w| w.1).sum();
        if total <= 0.0 {
            return Err("probabilities sum to zero".into());
        }
        let mut normalized: Vec<(MoveId, f64)> =
            weights.iter().map(|&(m, p)| (m, p / total)).collect();
        normalized.sort_by_key(|e| e.0);
        let key = b.position_key();
        if self.entries.contains_key(&key) {
            return Err(format!("duplicate position {key}"));
        }
        self.entries.insert(key, normalized);
        Ok(())
    }

    /// Parses the line format: a FEN (4 or 6 fields) followed by
    /// `move:probability` pairs. `#` starts a comment.
    pub fn parse(text: &str) -> Result<PolicyTable, TableError> {
        let mut table = PolicyTable::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| TableError::Line {
                line: line_no,
                reason,
            };
            let (fen_tokens, pairs): (Vec<&str>, Vec<&str>) =
                line.split_whitespace().partition(|t| !t.contains(':'));
            let b = BoardState::from_fen(&fen_tokens.join(" ")).map_err(|e| err(e.to_string()))?;
            let mut weights = Vec::with_capacity(pairs.len());
            for pair in pairs {
                let (m, p) = pair.split_once(':').expect("partitioned on ':'");
                let m: MoveId = m.parse().map_err(|e: crate::board::BoardError| err(e.to_string()))?;
                let p: f64 = p
                    .parse()
                    .map_err(|_| err(format!("bad probability `{p}`")))?;
                weights.push((m, p));
            }
            table.insert(&b, &weights).map_err(err)?;
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<PolicyTable, TableError> {
        PolicyTable::parse(&std::fs::read_to_string(path)?)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, b: &BoardState) -> Option<&[(MoveId, f64)]> {
        self.entries.get(&b.position_key()).map(Vec::as_slice)
    }

    /// Listed probabilities on listed moves, zero elsewhere; uniform when the
    /// position is missing.
    pub fn lookup(&self, b: &BoardState) -> MoveDistribution {
        let moves = b.legal_moves();
        match self.get(b) {
            None => MoveDistribution::uniform(moves).expect("position has legal moves"),
            Some(entry) => {
                let weights = moves
                    .iter()
                    .map(|m| {
                        entry
                            .binary_search_by_key(m, |e| e.0)
                            .map(|i| entry[i].1)
                            .unwrap_or(0.0)
                    })
                    .collect();
                MoveDistribution::from_weights(moves, weights).expect("position has legal moves")
            }
        }
    }
}

impl PolicySource for PolicyTable {
    fn distribution(&self, b: &BoardState) -> MoveDistribution {
        self.lookup(b)
    }
}

/// Certainty 1 − H/ln N in [0, 1]; a single legal move is fully certain.
pub fn entropy_confidence(d: &MoveDistribution) -> f64 {
    let n = d.len();
    if n <= 1 {
        return 1.0;
    }
    (1.0 - d.entropy() / (n as f64).ln()).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mv(s: &str) -> MoveId {
        s.parse().unwrap()
    }

    #[test]
    fn heuristic_grabs_hanging_queen() {
        // Black queen on d5 hangs to the knight on c3; nothing else captures.
        let b = BoardState::from_fen("4k3/8/8/3q4/8/2N5/8/4K3 w - - 0 30").unwrap();
        let d = HeuristicPolicy::new(0.1).distribution(&b);
        assert_eq!(d.argmax(), mv("c3d5"));
    }

    #[test]
    fn heuristic_hot_limit_is_uniform() {
        let b = BoardState::initial();
        let d = HeuristicPolicy::new(1e6).distribution(&b);
        let u = UniformPolicy.distribution(&b);
        assert!(d.sup_distance(&u) <= 1e-6);
    }

    #[test]
    fn heuristic_mirror_moves_tie() {
        let b = BoardState::initial();
        for t in [0.3, 1.0, 5.0] {
            let d = HeuristicPolicy::new(t).distribution(&b);
            assert_eq!(d.prob_of(mv("a2a3")), d.prob_of(mv("h2h3")));
            assert_eq!(d.prob_of(mv("a2a4")), d.prob_of(mv("h2h4")));
        }
    }

    #[test]
    fn heuristic_is_bit_deterministic() {
        let b = BoardState::initial().apply_move(mv("e2e4")).unwrap();
        let p = HeuristicPolicy::new(0.7);
        assert_eq!(p.distribution(&b), p.distribution(&b));
    }

    #[test]
    fn table_lookup_and_fallback() {
        let text = "# opening book\n\
            rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1 e2e4:0.7 d2d4:0.3\n";
        let t = PolicyTable::parse(text).unwrap();
        let b = BoardState::initial();
        let d = t.distribution(&b);
        assert_eq!(d.len(), 20);
        assert!((d.prob_of(mv("e2e4")) - 0.7).abs() < 1e-15);
        assert!((d.prob_of(mv("d2d4")) - 0.3).abs() < 1e-15);
        assert_eq!(d.probs().iter().filter(|&&p| p > 0.0).count(), 2);

        let after = b.apply_move(mv("e2e4")).unwrap();
        let d = t.distribution(&after);
        assert!(d.probs().iter().all(|&p| (p - 0.05).abs() < 1e-15));
    }

    #[test]
    fn table_normalizes_at_load() {
        let t = PolicyTable::parse(
            "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - e2e4:0.25 g1f3:0.25",
        )
        .unwrap();
        let entry = t.get(&BoardState::initial()).unwrap();
        assert_eq!(entry.iter().map(|e| e.1).sum::<f64>(), 1.0);
    }

    #[test]
    fn table_rejects_bad_lines_with_numbers() {
        let text = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1 e2e4:1\n\
            \n\
            rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq - 0 1 e2e4:1\n";
        match PolicyTable::parse(text) {
            Err(TableError::Line { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected line error, got {other:?}"),
        }
        assert!(matches!(
            PolicyTable::parse("garbage e2e4:1"),
            Err(TableError::Line { line: 1, .. })
        ));
        assert!(matches!(
            PolicyTable::parse(&format!("{} e2e4:x", crate::board::INITIAL_FEN)),
            Err(TableError::Line { line: 1, .. })
        ));
    }

    #[test]
    fn confidence_examples() {
        let moves = BoardState::initial().legal_moves();
        let u = MoveDistribution::uniform(moves[..4].to_vec()).unwrap();
        assert!(entropy_confidence(&u).abs() < 1e-12);
        let one_hot = MoveDistribution::point_mass(moves[..4].to_vec(), 2).unwrap();
        assert_eq!(entropy_confidence(&one_hot), 1.0);
        let d = MoveDistribution::new(moves[..3].to_vec(), vec![0.7, 0.2, 0.1]).unwrap();
        let h = -(0.7f64 * 0.7f64.ln() + 0.2 * 0.2f64.ln() + 0.1 * 0.1f64.ln());
        assert!((d.entropy() - 0.801_818_3).abs() < 1e-6);
        assert!((entropy_confidence(&d) - (1.0 - h / 3f64.ln())).abs() < 1e-12);
        assert!((entropy_confidence(&d) - 0.270_15).abs() < 1e-5);
        let single = MoveDistribution::uniform(moves[..1].to_vec()).unwrap();
        assert_eq!(entropy_confidence(&single), 1.0);
    }

    proptest! {
        #[test]
        fn confidence_in_unit_interval(w in prop::collection::vec(0.0f64..1.0, 2..20)) {
            prop_assume!(w.iter().sum::<f64>() > 1e-6);
            let moves = BoardState::initial().legal_moves()[..w.len()].to_vec();
            let d = MoveDistribution::from_weights(moves, w).unwrap();
            let c = entropy_confidence(&d);
            prop_assert!((0.0..=1.0).contains(&c));
        }
    }
}
