//! Post-game study of lost games, degraded by the psyche the loss left
//! behind.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::board::{BoardState, MoveId};
use crate::chain::{apply_chain, PersonalityPreset, StageMask};
use crate::policy::{entropy_confidence, PolicySource};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyParams {
    pub turning_points: usize,
    pub alternatives: usize,
    pub depth: usize,
    pub skip_threshold: f64,
    pub skip_rate: f64,
    /// Minutes.
    pub base_duration: f64,
}

impl Default for StudyParams {
    fn default() -> Self {
        StudyParams {
            turning_points: 5,
            alternatives: 5,
            depth: 10,
            skip_threshold: 60.0,
            skip_rate: 0.70,
            base_duration: 60.0,
        }
    }
}

impl StudyParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.turning_points == 0 || self.alternatives == 0 || self.depth == 0 {
            return Err("study counts must be positive".into());
        }
        if !(0.0..100.0).contains(&self.skip_threshold) {
            return Err("skip threshold must lie in [0, 100)".into());
        }
        if !(0.0..=1.0).contains(&self.skip_rate) {
            return Err("skip rate must lie in [0, 1]".into());
        }
        if !(self.base_duration.is_finite() && self.base_duration > 0.0) {
            return Err("base duration must be positive".into());
        }
        Ok(())
    }
}

/// Indices `t` of the `k` most negative `ψ[t+1] − ψ[t]`, ascending. Ties go
/// to the earlier index; non-negative deltas never qualify.
pub fn detect_turning_points(trajectory: &[f64], k: usize) -> Vec<usize> {
    let mut drops: Vec<(usize, f64)> = trajectory
        .windows(2)
        .map(|w| w[1] - w[0])
        .enumerate()
        .filter(|&(_, d)| d < 0.0)
        .collect();
    drops.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut picked: Vec<usize> = drops.into_iter().take(k).map(|(t, _)| t).collect();
    picked.sort_unstable();
    picked
}

pub fn skip_probability(psyche: f64, p: &StudyParams) -> f64 {
    let magnitude = psyche.abs().min(100.0);
    if magnitude <= p.skip_threshold {
        return 0.0;
    }
    (magnitude - p.skip_threshold) / (100.0 - p.skip_threshold) * p.skip_rate
}

/// Minutes of study available; halves linearly toward either pole.
pub fn effective_duration(psyche: f64, base: f64) -> f64 {
    base * (1.0 - psyche.abs().min(100.0) / 200.0)
}

/// How many turning points fit into the shortened session.
pub fn study_budget(psyche: f64, p: &StudyParams) -> usize {
    let share = effective_duration(psyche, p.base_duration) / p.base_duration;
    (p.turning_points as f64 * share).ceil() as usize
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExploredLine {
    pub fen: String,
    pub first_move: MoveId,
    /// Starts with `first_move`.
    pub line: Vec<MoveId>,
    /// Entropy confidence of the raw policy at the last decision reached.
    pub terminal_confidence: f64,
    pub original: bool,
    pub kept: bool,
}

/// Plays out the move actually chosen at `b` and up to `alternatives`
/// other high-probability first moves. Each line samples `depth` further
/// plies through the chain at `psyche`. An alternative is kept when its
/// line ends more certain than the original.
pub fn explore_lines(
    b: &BoardState,
    played: MoveId,
    policy: &dyn PolicySource,
    psyche: f64,
    preset: &PersonalityPreset,
    params: &StudyParams,
    seed: u64,
) -> Vec<ExploredLine> {
    let raw = policy.distribution(b);
    let mut ranked: Vec<(MoveId, f64)> = raw.iter().filter(|&(m, _)| m != played).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let firsts = std::iter::once(played)
        .chain(ranked.into_iter().take(params.alternatives).map(|e| e.0));

    let fen = b.to_fen();
    let mut lines: Vec<ExploredLine> = firsts
        .enumerate()
        .map(|(i, first)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (line, terminal_confidence) =
                rollout(b, first, policy, psyche, preset, params.depth, &mut rng);
            ExploredLine {
                fen: fen.clone(),
                first_move: first,
                line,
                terminal_confidence,
                original: i == 0,
                kept: false,
            }
        })
        .collect();
    let baseline = lines[0].terminal_confidence;
    for l in lines.iter_mut().skip(1) {
        l.kept = l.terminal_confidence > baseline;
    }
    lines
}

fn rollout(
    b: &BoardState,
    first: MoveId,
    policy: &dyn PolicySource,
    psyche: f64,
    preset: &PersonalityPreset,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<MoveId>, f64) {
    let mut line = vec![first];
    let mut confidence = entropy_confidence(&policy.distribution(b));
    let mut pos = b.apply_unchecked(first);
    for _ in 0..depth {
        if pos.status().is_over() {
            break;
        }
        let raw = policy.distribution(&pos);
        let c = entropy_confidence(&raw);
        confidence = c;
        let (shaped, _) = apply_chain(&raw, psyche, preset, c, StageMask::FULL);
        let m = shaped.sample(rng.gen::<f64>());
        line.push(m);
        pos = pos.apply_unchecked(m);
    }
    if !pos.status().is_over() {
        confidence = entropy_confidence(&policy.distribution(&pos));
    }
    (line, confidence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::{HeuristicPolicy, PolicyTable};
    use proptest::prelude::*;

    fn mv(s: &str) -> MoveId {
        s.parse().unwrap()
    }

    #[test]
    fn turning_point_examples() {
        assert_eq!(detect_turning_points(&[0.0, -10.0, -40.0, -35.0, -80.0], 2), vec![1, 3]);
        assert!(detect_turning_points(&[0.0, 1.0, 5.0, 9.0], 3).is_empty());
        assert_eq!(detect_turning_points(&[0.0, -5.0, -10.0], 5), vec![0, 1]);
        assert_eq!(detect_turning_points(&[0.0, -5.0, 0.0, -5.0], 1), vec![0]);
    }

    #[test]
    fn skip_and_duration_examples() {
        let p = StudyParams::default();
        assert!((skip_probability(-80.0, &p) - 0.35).abs() < 1e-12);
        assert_eq!(skip_probability(40.0, &p), 0.0);
        assert_eq!(skip_probability(60.0, &p), 0.0);
        assert!((skip_probability(100.0, &p) - 0.70).abs() < 1e-12);
        assert!((skip_probability(-100.0, &p) - 0.70).abs() < 1e-12);
        assert_eq!(effective_duration(0.0, 60.0), 60.0);
        assert!((effective_duration(-80.0, 60.0) - 36.0).abs() < 1e-12);
        assert_eq!(effective_duration(100.0, 60.0), 30.0);
        assert_eq!(effective_duration(-100.0, 60.0), 30.0);
    }

    #[test]
    fn budget_shrinks_with_duration() {
        let p = StudyParams::default();
        assert_eq!(study_budget(0.0, &p), 5);
        assert_eq!(study_budget(-80.0, &p), 3);
        assert_eq!(study_budget(100.0, &p), 3);
    }

    #[test]
    fn explores_every_move_when_few_exist() {
        // Cornered king with fewer legal moves than requested alternatives.
        let b = BoardState::from_fen("k7/8/1K6/8/8/8/8/7R b - - 0 40").unwrap();
        let n = b.legal_move_count();
        let played = b.legal_moves()[0];
        let p = StudyParams {
            alternatives: 10,
            depth: 4,
            ..StudyParams::default()
        };
        let lines = explore_lines(
            &b,
            played,
            &HeuristicPolicy::new(1.0),
            0.0,
            &PersonalityPreset::human(),
            &p,
            3,
        );
        assert_eq!(lines.len(), n);
        assert!(lines[0].original && !lines[0].kept);
        let mut firsts: Vec<MoveId> = lines.iter().map(|l| l.first_move).collect();
        firsts.sort();
        assert_eq!(firsts, b.legal_moves());
    }

    #[test]
    fn seeded_rollouts_repeat() {
        let b = BoardState::initial();
        let run = |seed| {
            explore_lines(
                &b,
                mv("e2e4"),
                &HeuristicPolicy::new(1.0),
                100.0,
                &PersonalityPreset::human(),
                &StudyParams::default(),
                seed,
            )
        };
        let a = run(11);
        assert_eq!(a, run(11));
        assert_eq!(a.len(), 6);
        assert!(a.iter().all(|l| l.line.len() == 11));
    }

    #[test]
    fn line_stops_at_mate() {
        let table = PolicyTable::parse(
            "rnbqkbnr/pppp1ppp/8/4p3/6P1/8/PPPPPP1P/RNBQKBNR w KQkq - f2f3:1\n\
             rnbqkbnr/pppp1ppp/8/4p3/6P1/5P2/PPPPP2P/RNBQKBNR b KQkq - d8h4:1\n",
        )
        .unwrap();
        let b = BoardState::initial()
            .apply_move(mv("g2g4"))
            .unwrap()
            .apply_move(mv("e7e5"))
            .unwrap();
        let before_mate = b.apply_unchecked(mv("f2f3"));
        let lines = explore_lines(
            &b,
            mv("f2f3"),
            &table,
            0.0,
            &PersonalityPreset::flat(),
            &StudyParams::default(),
            0,
        );
        let original = &lines[0];
        assert_eq!(original.line, vec![mv("f2f3"), mv("d8h4")]);
        // The one-hot table makes black's final decision fully certain.
        assert_eq!(
            original.terminal_confidence,
            entropy_confidence(&table.distribution(&before_mate))
        );
        assert_eq!(original.terminal_confidence, 1.0);
    }

    fn brute_force(traj: &[f64], k: usize) -> Vec<usize> {
        let mut all: Vec<(f64, usize)> = (0..traj.len() - 1)
            .map(|t| (traj[t + 1] - traj[t], t))
            .filter(|e| e.0 < 0.0)
            .collect();
        // Lexicographic (delta, index) gives the earlier index on ties.
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out: Vec<usize> = all.iter().take(k).map(|e| e.1).collect();
        out.sort();
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn turning_points_match_brute_force(
            traj in prop::collection::vec((-10i32..=10).prop_map(|v| f64::from(v) * 10.0), 2..40),
            k in 1usize..8,
        ) {
            prop_assert_eq!(detect_turning_points(&traj, k), brute_force(&traj, k));
        }

        #[test]
        fn duration_even_and_linear(m in 0.0f64..=100.0) {
            let d = effective_duration(m, 60.0);
            prop_assert_eq!(d, effective_duration(-m, 60.0));
            prop_assert!((d - (60.0 - 0.3 * m)).abs() < 1e-12);
        }

        #[test]
        fn skip_bounded(psi in -100.0f64..=100.0) {
            let s = skip_probability(psi, &StudyParams::default());
            prop_assert!((0.0..=0.70 + 1e-15).contains(&s));
        }
    }
}
