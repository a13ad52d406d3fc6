//! Per-condition metrics and the summary statistics built on them.

use psychess_core::board::Side;
use psychess_core::engine::{GameRecord, MoveTrace};
use psychess_core::psyche::{psyche_zone, PsycheZone};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no games to measure")]
    Empty,
    #[error("no {0} condition among the metrics")]
    MissingCondition(&'static str),
    #[error("contingency table has an empty row or column")]
    DegenerateTable,
    #[error("pooled standard deviation is zero")]
    ZeroSpread,
}

/// Traces of the psyche-modulated side. Records that do not single one out
/// contribute both sides.
pub fn agent_traces(r: &GameRecord) -> impl Iterator<Item = &MoveTrace> {
    r.traces
        .iter()
        .filter(move |t| r.agent_side.is_none_or(|s| s == t.side))
}

fn agreement_counts(r: &GameRecord) -> (u64, u64) {
    agent_traces(r).fold((0, 0), |(a, n), t| (a + u64::from(t.agreement), n + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    /// Pooled over all agent moves.
    pub percent: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Move-weighted agreement with a percentile bootstrap over games.
pub fn top_move_agreement(
    records: &[GameRecord],
    resamples: usize,
    seed: u64,
) -> Result<Agreement, MetricsError> {
    let counts: Vec<(u64, u64)> = records.iter().map(agreement_counts).collect();
    let pooled = |idx: &mut dyn Iterator<Item = usize>| {
        let (a, n) = idx.fold((0u64, 0u64), |(a, n), i| (a + counts[i].0, n + counts[i].1));
        if n == 0 {
            0.0
        } else {
            100.0 * a as f64 / n as f64
        }
    };
    let total_moves: u64 = counts.iter().map(|c| c.1).sum();
    if records.is_empty() || total_moves == 0 {
        return Err(MetricsError::Empty);
    }
    let percent = pooled(&mut (0..counts.len()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = counts.len();
    let mut stats: Vec<f64> = (0..resamples)
        .map(|_| pooled(&mut (0..n).map(|_| rng.gen_range(0..n))))
        .collect();
    stats.sort_by(f64::total_cmp);
    let (lo, hi) = if stats.is_empty() {
        (percent, percent)
    } else {
        (quantile(&stats, 0.025), quantile(&stats, 0.975))
    };
    Ok(Agreement {
        percent,
        // A skewed resample cloud can leave the estimate just outside its
        // percentile interval; widen to contain it.
        ci_low: lo.min(percent),
        ci_high: hi.max(percent),
    })
}

/// Linear interpolation between order statistics of sorted `xs`.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let pos = q * (xs.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    match xs.get(i + 1) {
        Some(next) => xs[i] + (next - xs[i]) * frac,
        None => xs[i],
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; zero for fewer than two values.
pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneMetrics {
    pub config: String,
    pub condition: String,
    pub psyche0: f64,
    pub games: usize,
    pub wins: usize,
    pub draws: usize,
    pub losses: usize,
    pub score: f64,
    pub mean_ply: f64,
    pub agent_moves: u64,
    pub mean_entropy: f64,
    pub mean_confidence: f64,
    pub agreement: f64,
    pub agreement_ci_low: f64,
    pub agreement_ci_high: f64,
    /// Mean and spread of per-game agreement percentages.
    pub agreement_game_mean: f64,
    pub agreement_game_sd: f64,
    pub confidence_game_mean: f64,
    pub mean_final_psyche: f64,
}

impl ZoneMetrics {
    pub fn zone(&self) -> PsycheZone {
        psyche_zone(self.psyche0)
    }
}

fn agent_side(r: &GameRecord) -> Side {
    r.agent_side.unwrap_or(Side::White)
}

pub fn zone_metrics(
    config: &str,
    condition: &str,
    psyche0: f64,
    records: &[GameRecord],
    resamples: usize,
    seed: u64,
) -> Result<ZoneMetrics, MetricsError> {
    let agreement = top_move_agreement(records, resamples, seed)?;
    let games = records.len();
    let (mut wins, mut draws, mut losses) = (0, 0, 0);
    let mut entropy = 0.0;
    let mut confidence = 0.0;
    let mut moves = 0u64;
    let mut per_game_agree = Vec::with_capacity(games);
    let mut per_game_conf = Vec::with_capacity(games);
    let mut final_psyche = Vec::with_capacity(games);
    for r in records {
        let side = agent_side(r);
        match r.status.winner {
            Some(w) if w == side => wins += 1,
            Some(_) => losses += 1,
            None => draws += 1,
        }
        let (mut a, mut n, mut c) = (0u64, 0u64, 0.0);
        for t in agent_traces(r) {
            entropy += t.entropy;
            confidence += t.confidence;
            c += t.confidence;
            a += u64::from(t.agreement);
            n += 1;
        }
        moves += n;
        if n > 0 {
            per_game_agree.push(100.0 * a as f64 / n as f64);
            per_game_conf.push(c / n as f64);
        }
        final_psyche.push(*r.trajectory(side).last().expect("trajectory has ψ₀"));
    }
    Ok(ZoneMetrics {
        config: config.into(),
        condition: condition.into(),
        psyche0,
        games,
        wins,
        draws,
        losses,
        score: (wins as f64 + 0.5 * draws as f64) / games as f64,
        mean_ply: records.iter().map(|r| r.plies() as f64).sum::<f64>() / games as f64,
        agent_moves: moves,
        mean_entropy: entropy / moves as f64,
        mean_confidence: confidence / moves as f64,
        agreement: agreement.percent,
        agreement_ci_low: agreement.ci_low,
        agreement_ci_high: agreement.ci_high,
        agreement_game_mean: mean(&per_game_agree),
        agreement_game_sd: sample_sd(&per_game_agree),
        confidence_game_mean: mean(&per_game_conf),
        mean_final_psyche: mean(&final_psyche),
    })
}

fn find_zone(metrics: &[ZoneMetrics], zone: PsycheZone, name: &'static str) -> Result<f64, MetricsError> {
    metrics
        .iter()
        .find(|m| m.zone() == zone)
        .map(|m| m.agreement)
        .ok_or(MetricsError::MissingCondition(name))
}

/// Overconfident minus stress agreement, in percentage points.
pub fn zone_spread(metrics: &[ZoneMetrics]) -> Result<f64, MetricsError> {
    Ok(find_zone(metrics, PsycheZone::Overconfident, "overconfident")?
        - find_zone(metrics, PsycheZone::Stress, "stress")?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub cramers_v: f64,
}

/// Pearson test of independence over an r×c table of counts.
pub fn chi_square(table: &[Vec<u64>]) -> Result<ChiSquare, MetricsError> {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    if rows < 2 || cols < 2 || table.iter().any(|r| r.len() != cols) {
        return Err(MetricsError::DegenerateTable);
    }
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..cols)
        .map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    if row_sums.iter().chain(&col_sums).any(|&s| s == 0.0) {
        return Err(MetricsError::DegenerateTable);
    }
    let n: f64 = row_sums.iter().sum();
    let mut statistic = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let expected = row_sums[i] * col_sums[j] / n;
            statistic += (obs as f64 - expected).powi(2) / expected;
        }
    }
    let k = rows.min(cols) - 1;
    Ok(ChiSquare {
        statistic,
        dof: (rows - 1) * (cols - 1),
        cramers_v: (statistic / (n * k as f64)).sqrt(),
    })
}

/// W/D/L rows, one per condition, from the agent's point of view.
pub fn wdl_table(metrics: &[ZoneMetrics]) -> Vec<Vec<u64>> {
    metrics
        .iter()
        .map(|m| vec![m.wins as u64, m.draws as u64, m.losses as u64])
        .collect()
}

pub fn chi_square_wdl(metrics: &[ZoneMetrics]) -> Result<ChiSquare, MetricsError> {
    chi_square(&wdl_table(metrics))
}

/// `(μa − μb) / σp` with `σp = √((σa² + σb²) / 2)`.
pub fn cohens_d_from_stats(mean_a: f64, sd_a: f64, mean_b: f64, sd_b: f64) -> Result<f64, MetricsError> {
    let pooled = ((sd_a * sd_a + sd_b * sd_b) / 2.0).sqrt();
    if pooled == 0.0 || !pooled.is_finite() {
        return Err(MetricsError::ZeroSpread);
    }
    Ok((mean_a - mean_b) / pooled)
}

pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricsError::Empty);
    }
    cohens_d_from_stats(mean(a), sample_sd(a), mean(b), sample_sd(b))
}

/// Per-game agreement percentages of the agent side.
pub fn per_game_agreement(records: &[GameRecord]) -> Vec<f64> {
    records
        .iter()
        .filter_map(|r| {
            let (a, n) = agreement_counts(r);
            (n > 0).then(|| 100.0 * a as f64 / n as f64)
        })
        .collect()
}
