//! Bit-flip and segment-scramble perturbations with reproducible randomness.
//!
//! Every trial draws from its own ChaCha8 stream seeded by
//! [`mix_seed`]`(master_seed, stream, trial)`, so results do not depend on the
//! order or the number of threads that run the trials.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitSignal;
use crate::complexity::{bdm_1d, deflate_b64_len, lzw_dict_len, shannon_entropy, Metric};
use crate::ctm::CtmTable;
use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function applied to `x + GOLDEN_GAMMA`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed: `splitmix64(splitmix64(splitmix64(master) ^ stream) ^ trial)`.
///
/// For flip experiments `stream` is the flip count `k`; scramble experiments
/// use [`SCRAMBLE_STREAM`].
pub fn mix_seed(master: u64, stream: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ stream) ^ trial)
}

pub const SCRAMBLE_STREAM: u64 = u64::MAX;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `k` distinct positions in `0..len`, sampled without replacement, sorted.
pub fn flip_positions(len: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k > len {
        return Err(Error::FlipCount { k, len });
    }
    let mut positions = rand::seq::index::sample(&mut rng(seed), len, k).into_vec();
    positions.sort_unstable();
    Ok(positions)
}

/// Complements the given positions.
pub fn apply_flips(x: &BitSignal, positions: &[usize]) -> Result<BitSignal> {
    let mut bits = x.as_slice().to_vec();
    for &p in positions {
        let b = bits.get_mut(p).ok_or(Error::FlipCount {
            k: p + 1,
            len: x.len(),
        })?;
        *b ^= 1;
    }
    BitSignal::from_bits(bits)
}

pub fn flip_bits(x: &BitSignal, k: usize, trial_seed: u64) -> Result<BitSignal> {
    apply_flips(x, &flip_positions(x.len(), k, trial_seed)?)
}

/// Bits needed to write any integer in `0..=max`.
pub fn bits_for(max: u64) -> u64 {
    (u64::BITS - max.leading_zeros()).max(1) as u64
}

/// Exact size of a perturbation's explicit description.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptionLength {
    /// Counts and lengths: O(log s).
    pub header_bits: u64,
    /// The flip positions or the segment permutation.
    pub index_bits: u64,
}

impl DescriptionLength {
    pub fn total(&self) -> u64 {
        self.header_bits + self.index_bits
    }
}

/// A flip of `k` positions in an `s`-bit signal: `k` in `bits_for(s)` bits,
/// then each position in `bits_for(s - 1)` bits.
pub fn flip_description(s: usize, k: usize) -> DescriptionLength {
    DescriptionLength {
        header_bits: bits_for(s as u64),
        index_bits: k as u64 * bits_for(s.saturating_sub(1) as u64),
    }
}

/// A scramble of `segments` segments: the segment count and each inner
/// boundary in `bits_for(s)` bits, then each permutation entry in
/// `bits_for(segments - 1)` bits.
pub fn scramble_description(s: usize, segments: usize) -> DescriptionLength {
    let w = bits_for(s as u64);
    DescriptionLength {
        header_bits: w + segments.saturating_sub(1) as u64 * w,
        index_bits: segments as u64 * bits_for(segments.saturating_sub(1) as u64),
    }
}

/// Order statistics of one metric over a batch of trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Linearly interpolated quantile of sorted data (inclusive method).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

impl Stats {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("summary statistics"));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
        Ok(Self {
            min: sorted[0],
            q1: quantile_sorted(&sorted, 0.25),
            median: quantile_sorted(&sorted, 0.5),
            q3: quantile_sorted(&sorted, 0.75),
            max: sorted[sorted.len() - 1],
            mean,
        })
    }
}

/// Metric evaluation settings shared by the experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub bdm_block: usize,
    pub bdm_stride: usize,
}

impl Default for MetricParams {
    fn default() -> Self {
        Self {
            bdm_block: 8,
            bdm_stride: 8,
        }
    }
}

pub fn metric_value(
    x: &BitSignal,
    metric: Metric,
    table: Option<&CtmTable>,
    params: &MetricParams,
) -> Result<f64> {
    Ok(match metric {
        Metric::Entropy => shannon_entropy(x)?,
        Metric::Lzw => lzw_dict_len(x) as f64,
        Metric::Deflate => deflate_b64_len(x) as f64,
        Metric::Bdm => {
            let table =
                table.ok_or_else(|| Error::Parameter("BDM requested without a table".into()))?;
            bdm_1d(x, table, params.bdm_block, params.bdm_stride)?.bits
        }
        Metric::BlockEntropy => {
            return Err(Error::Parameter(
                "block entropy is a structural-sweep metric".into(),
            ))
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlipExperimentPlan {
    pub schedule: Vec<usize>,
    pub trials_per_k: usize,
    pub master_seed: u64,
    pub metrics: Vec<Metric>,
    #[serde(default)]
    pub metric_params: MetricParams,
}

impl FlipExperimentPlan {
    pub const DEFAULT_TRIALS: usize = 1024;

    pub fn new(schedule: Vec<usize>, master_seed: u64) -> Self {
        Self {
            schedule,
            trials_per_k: Self::DEFAULT_TRIALS,
            master_seed,
            metrics: vec![Metric::Entropy, Metric::Lzw, Metric::Bdm, Metric::Deflate],
            metric_params: MetricParams::default(),
        }
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        if self.trials_per_k == 0 {
            return Err(Error::Plan("trials_per_k must be positive".into()));
        }
        if self.schedule.is_empty() {
            return Err(Error::Plan("schedule is empty".into()));
        }
        if self.metrics.is_empty() {
            return Err(Error::Plan("no metrics requested".into()));
        }
        if let Some(m) = self.metrics.iter().find(|m| **m == Metric::BlockEntropy) {
            return Err(Error::Plan(format!("metric `{}` is not a flip metric", m.name())));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &k in &self.schedule {
            if k > len {
                return Err(Error::Plan(format!("flip count {k} exceeds signal length {len}")));
            }
            if !seen.insert(k) {
                return Err(Error::Plan(format!("flip count {k} repeated")));
            }
        }
        Ok(())
    }
}

/// `points` flip counts spread evenly over `0..=len`, both ends included.
pub fn even_schedule(len: usize, points: usize) -> Vec<usize> {
    if points <= 1 || len == 0 {
        return vec![0];
    }
    let mut ks: Vec<usize> = (0..points)
        .map(|i| ((i as f64) * len as f64 / (points - 1) as f64).round() as usize)
        .collect();
    ks.dedup();
    ks
}

/// Parses `start:end:step` (inclusive of `end` when it lands on the grid;
/// `end` itself is always appended).
pub fn parse_schedule(spec: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums: Vec<usize> = parts
        .iter()
        .map(|p| {
            p.parse()
                .map_err(|_| Error::Plan(format!("bad schedule `{spec}`")))
        })
        .collect::<Result<_>>()?;
    match nums.as_slice() {
        [start, end, step] if *step > 0 && start <= end => {
            let mut ks: Vec<usize> = (*start..=*end).step_by(*step).collect();
            if ks.last() != Some(end) {
                ks.push(*end);
            }
            Ok(ks)
        }
        _ => Err(Error::Plan(format!(
            "schedule `{spec}` must be start:end:step with step > 0"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub k: usize,
    pub stats: BTreeMap<Metric, Stats>,
}

impl TrialSummary {
    pub const CSV_HEADER: &'static str = "k,metric,min,q1,median,q3,max,mean";

    pub fn csv_rows(&self) -> Vec<String> {
        self.stats
            .iter()
            .map(|(m, s)| {
                format!(
                    "{},{},{},{},{},{},{},{}",
                    self.k,
                    m.name(),
                    s.min,
                    s.q1,
                    s.median,
                    s.q3,
                    s.max,
                    s.mean
                )
            })
            .collect()
    }
}

pub fn run_flip_experiment(
    x: &BitSignal,
    plan: &FlipExperimentPlan,
    table: Option<&CtmTable>,
) -> Result<Vec<TrialSummary>> {
    plan.validate(x.len())?;
    plan.schedule
        .iter()
        .map(|&k| {
            let samples: Vec<Vec<f64>> = (0..plan.trials_per_k as u64)
                .into_par_iter()
                .map(|trial| {
                    let seed = mix_seed(plan.master_seed, k as u64, trial);
                    let flipped = flip_bits(x, k, seed)?;
                    plan.metrics
                        .iter()
                        .map(|&m| metric_value(&flipped, m, table, &plan.metric_params))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<_>>()?;
            let mut stats = BTreeMap::new();
            for (i, &m) in plan.metrics.iter().enumerate() {
                let column: Vec<f64> = samples.iter().map(|row| row[i]).collect();
                stats.insert(m, Stats::from_samples(&column)?);
            }
            Ok(TrialSummary { k, stats })
        })
        .collect()
}

/// Segment cut points: `0`, the given boundaries, and `len`.
fn segment_cuts(len: usize, boundaries: &[usize]) -> Result<Vec<usize>> {
    let mut cuts = vec![0];
    for &b in boundaries {
        if b > len {
            return Err(Error::Boundaries(format!("boundary {b} beyond length {len}")));
        }
        let last = *cuts.last().expect("non-empty");
        if b < last || (b == last && !(b == 0 && cuts.len() == 1)) {
            return Err(Error::Boundaries(format!(
                "boundaries must be strictly increasing (saw {b} after {last})"
            )));
        }
        if b > last {
            cuts.push(b);
        }
    }
    if *cuts.last().expect("non-empty") != len {
        cuts.push(len);
    }
    Ok(cuts)
}

/// A uniformly random permutation of `0..n`.
pub fn segment_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng(seed));
    order
}

/// Reorders the segments delimited by `boundaries` (cut points; 0 and the
/// signal length are implied) with a seeded uniform permutation.
pub fn scramble(x: &BitSignal, boundaries: &[usize], trial_seed: u64) -> Result<BitSignal> {
    let cuts = segment_cuts(x.len(), boundaries)?;
    let segments: Vec<&[u8]> = cuts.windows(2).map(|w| &x.as_slice()[w[0]..w[1]]).collect();
    let order = segment_permutation(segments.len(), trial_seed);
    let mut bits = Vec::with_capacity(x.len());
    for i in order {
        bits.extend_from_slice(segments[i]);
    }
    BitSignal::from_bits(bits)
}

/// Boundaries every `width` bits.
pub fn fixed_boundaries(len: usize, width: usize) -> Vec<usize> {
    if width == 0 {
        return Vec::new();
    }
    (1..)
        .map(|i| i * width)
        .take_while(|&b| b < len)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

pub fn histogram(values: &[f64], bins: usize) -> Vec<HistogramBin> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return vec![HistogramBin {
            lo,
            hi,
            count: values.len(),
        }];
    }
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin {
            lo: lo + width * i as f64,
            hi: if i + 1 == bins { hi } else { lo + width * (i + 1) as f64 },
            count: 0,
        })
        .collect();
    for &v in values {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        out[i].count += 1;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScrambleSummary {
    pub metric: Metric,
    pub original: f64,
    pub trials: usize,
    pub stats: Stats,
    pub histogram: Vec<HistogramBin>,
    /// Fraction of trials with a value at or below the original.
    pub fraction_at_or_below: f64,
    /// Mid-rank percentile of the original: ties count half.
    pub percentile: f64,
    pub values: Vec<f64>,
}

pub const HISTOGRAM_BINS: usize = 20;

pub fn scramble_experiment(
    x: &BitSignal,
    boundaries: &[usize],
    trials: usize,
    master_seed: u64,
    metric: Metric,
    table: Option<&CtmTable>,
    params: &MetricParams,
) -> Result<ScrambleSummary> {
    if trials == 0 {
        return Err(Error::Plan("scramble experiment needs at least one trial".into()));
    }
    segment_cuts(x.len(), boundaries)?;
    let original = metric_value(x, metric, table, params)?;
    let values: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let y = scramble(x, boundaries, mix_seed(master_seed, SCRAMBLE_STREAM, t))?;
            metric_value(&y, metric, table, params)
        })
        .collect::<Result<_>>()?;
    let below = values.iter().filter(|&&v| v < original).count();
    let equal = values.iter().filter(|&&v| v == original).count();
    Ok(ScrambleSummary {
        metric,
        original,
        trials,
        stats: Stats::from_samples(&values)?,
        histogram: histogram(&values, HISTOGRAM_BINS),
        fraction_at_or_below: (below + equal) as f64 / trials as f64,
        percentile: (below as f64 + 0.5 * equal as f64) / trials as f64,
        values,
    })
}
