//! Partition sweeps, complexity landscapes, downward-spike detection and
//! dimension inference.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{BitSignal, Grid, Shape};
use crate::complexity::{bdm_2d, bdm_3d, block_entropy, deflate_b64_len, normalize_deflate, Bdm, Metric};
use crate::ctm::CtmTable;
use crate::error::{Error, Result};

pub const DEFAULT_LOSS: f64 = 0.01;
pub const DEFAULT_WINDOW: usize = 9;
pub const DEFAULT_THRESHOLD: f64 = 2.5;
pub const DEFAULT_MIN_RELATIVE_DEPTH: f64 = 0.05;
pub const MIN_SWEEP_BITS: usize = 16;
pub const MIN_3D_BITS: usize = 64;
const MIN_STAGE2_ROWS: usize = 16;

/// Consistency constant turning a MAD into a normal standard deviation.
const MAD_SCALE: f64 = 1.4826;
/// Same, for the mean absolute deviation (sqrt(pi / 2)).
const MEAN_AD_SCALE: f64 = 1.253_314;

/// A candidate shape imposed on the first `kept_bits` bits of a signal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub shape: Shape,
    pub kept_bits: usize,
    pub loss_fraction: f64,
}

impl Partition {
    pub fn new(shape: Shape, signal_len: usize) -> Result<Self> {
        shape.validate()?;
        let kept_bits = shape.volume();
        if kept_bits > signal_len || signal_len == 0 {
            return Err(Error::InvalidShape(format!(
                "{shape} needs {kept_bits} bits but the signal has {signal_len}"
            )));
        }
        Ok(Self {
            shape,
            kept_bits,
            loss_fraction: 1.0 - kept_bits as f64 / signal_len as f64,
        })
    }
}

fn check_loss(loss_budget: f64) -> Result<()> {
    if !(0.0..1.0).contains(&loss_budget) {
        return Err(Error::Parameter(format!(
            "loss budget {loss_budget} outside [0, 1)"
        )));
    }
    Ok(())
}

fn keeps_enough(kept: usize, s: usize, loss_budget: f64) -> bool {
    kept as f64 >= (1.0 - loss_budget) * s as f64
}

/// Every `(m, floor(s/m))` for `m` in `1..=s` losing at most `loss_budget`
/// of the signal, in ascending `m`.
pub fn partition_candidates_2d(s: usize, loss_budget: f64) -> Vec<Partition> {
    (1..=s)
        .filter_map(|m| {
            let n = s / m;
            (keeps_enough(m * n, s, loss_budget))
                .then(|| Partition::new(Shape::d2(m, n), s).ok())
                .flatten()
        })
        .collect()
}

/// `(v - min) / (max - min)`; all zeros when every value is equal.
pub fn minmax_scale(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("min-max scaling"));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return Ok(vec![0.0; values.len()]);
    }
    Ok(values.iter().map(|v| (v - lo) / (hi - lo)).collect())
}

fn median_of(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn check_window(window: usize, len: usize) -> Result<()> {
    if window < 3 || window % 2 == 0 || window > len {
        return Err(Error::SpikeWindow { window, len });
    }
    Ok(())
}

/// Robust z-score of each value against a centred rolling window (truncated
/// at the ends). The scale is `1.4826 * MAD`, or `1.2533 * mean absolute
/// deviation` when the MAD is zero; `None` when both are zero.
pub fn robust_z(values: &[f64], window: usize) -> Result<Vec<Option<f64>>> {
    check_window(window, values.len())?;
    let half = window / 2;
    Ok((0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            let mut w = values[lo..hi].to_vec();
            let med = median_of(&mut w);
            let mut dev: Vec<f64> = w.iter().map(|v| (v - med).abs()).collect();
            let mean_ad = dev.iter().sum::<f64>() / dev.len() as f64;
            let mad = median_of(&mut dev);
            let scale = if mad > 0.0 {
                MAD_SCALE * mad
            } else if mean_ad > 0.0 {
                MEAN_AD_SCALE * mean_ad
            } else {
                return None;
            };
            Some((values[i] - med) / scale)
        })
        .collect())
}

/// Spike detector settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpikeParams {
    /// Odd rolling-window length, at least 3.
    pub window: usize,
    /// A spike needs a robust z of at most `-threshold`.
    pub threshold: f64,
    /// A spike's raw value must also sit this fraction below the raw series
    /// median. Zero disables the check.
    pub min_relative_depth: f64,
}

impl Default for SpikeParams {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            threshold: DEFAULT_THRESHOLD,
            min_relative_depth: DEFAULT_MIN_RELATIVE_DEPTH,
        }
    }
}

impl SpikeParams {
    pub fn unguarded(window: usize, threshold: f64) -> Self {
        Self {
            window,
            threshold,
            min_relative_depth: 0.0,
        }
    }
}

/// Indices whose robust z is at most `-threshold`, whose value is strictly
/// below the series median, and whose raw value (when given) is at least
/// `min_relative_depth` below the raw median. Ordered by ascending value,
/// then index.
pub fn find_spikes(
    values: &[f64],
    raw: Option<&[f64]>,
    params: &SpikeParams,
) -> Result<Vec<(usize, f64)>> {
    let threshold = params.threshold;
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::Parameter(format!("spike threshold {threshold} must be positive")));
    }
    if !(0.0..1.0).contains(&params.min_relative_depth) {
        return Err(Error::Parameter(format!(
            "relative depth {} outside [0, 1)",
            params.min_relative_depth
        )));
    }
    let raw = raw.unwrap_or(values);
    if raw.len() != values.len() {
        return Err(Error::Parameter("raw and scaled series differ in length".into()));
    }
    let z = robust_z(values, params.window)?;
    let global = median_of(&mut values.to_vec());
    let raw_median = median_of(&mut raw.to_vec());
    let deep_enough = |i: usize| raw_median - raw[i] >= params.min_relative_depth * raw_median.abs();
    let mut hits: Vec<(usize, f64)> = z
        .iter()
        .enumerate()
        .filter_map(|(i, z)| {
            z.filter(|z| *z <= -threshold && values[i] < global && deep_enough(i))
                .map(|z| (i, z))
        })
        .collect();
    hits.sort_by(|a, b| values[a.0].total_cmp(&values[b.0]).then(a.0.cmp(&b.0)));
    Ok(hits)
}

/// [`find_spikes`] without the relative-depth check.
pub fn spike_indices(values: &[f64], window: usize, threshold: f64) -> Result<Vec<(usize, f64)>> {
    find_spikes(values, None, &SpikeParams::unguarded(window, threshold))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapePoint {
    pub partition: Partition,
    pub bdm: Option<Bdm>,
    /// BDM divided by the number of stride-1 windows.
    pub bdm_norm: Option<f64>,
    pub block_entropy: Option<f64>,
    pub deflate_norm: Option<f64>,
    pub bdm_scaled: Option<f64>,
    pub entropy_scaled: Option<f64>,
    pub deflate_scaled: Option<f64>,
    /// Robust z of the scaled BDM; `None` when BDM is absent or the window is flat.
    pub spike_z: Option<f64>,
}

impl LandscapePoint {
    pub fn scaled(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Bdm => self.bdm_scaled,
            Metric::BlockEntropy => self.entropy_scaled,
            Metric::Deflate => self.deflate_scaled,
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub signal_bits: usize,
    pub loss_budget: f64,
    pub metrics: Vec<Metric>,
    pub points: Vec<LandscapePoint>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl Landscape {
    pub const CSV_HEADER: &'static str = "m,n,p,kept_bits,loss,bdm,bdm_norm,block_entropy,deflate_norm,bdm_scaled,entropy_scaled,deflate_scaled,spike_z";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for pt in &self.points {
            let s = pt.partition.shape;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                s.rows,
                s.cols,
                s.plane_count(),
                pt.partition.kept_bits,
                pt.partition.loss_fraction,
                opt(pt.bdm.map(|b| b.bits)),
                opt(pt.bdm_norm),
                opt(pt.block_entropy),
                opt(pt.deflate_norm),
                opt(pt.bdm_scaled),
                opt(pt.entropy_scaled),
                opt(pt.deflate_scaled),
                opt(pt.spike_z),
            ));
        }
        out
    }

    /// Indices and scaled values of the points carrying `metric`.
    fn series(&self, metric: Metric) -> (Vec<usize>, Vec<f64>) {
        self.points
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.scaled(metric).map(|v| (i, v)))
            .unzip()
    }

    fn raw_series(&self, metric: Metric) -> Vec<f64> {
        self.points
            .iter()
            .filter_map(|p| match metric {
                Metric::Bdm => p.bdm_norm,
                Metric::BlockEntropy => p.block_entropy,
                Metric::Deflate => p.deflate_norm,
                _ => None,
            })
            .collect()
    }
}

fn check_sweep_metrics(metrics: &[Metric], table: Option<&CtmTable>) -> Result<()> {
    if metrics.is_empty() {
        return Err(Error::Parameter("no sweep metrics requested".into()));
    }
    for m in metrics {
        match m {
            Metric::Bdm => {
                let t = table.ok_or_else(|| Error::Parameter("BDM requested without a table".into()))?;
                if t.dims() != 2 {
                    return Err(Error::DimensionMismatch {
                        table: t.dims(),
                        pattern: 2,
                    });
                }
            }
            Metric::BlockEntropy | Metric::Deflate => {}
            other => {
                return Err(Error::Parameter(format!(
                    "`{}` is not a sweep metric",
                    other.name()
                )))
            }
        }
    }
    Ok(())
}

fn scale_column(
    points: &mut [LandscapePoint],
    get: impl Fn(&LandscapePoint) -> Option<f64>,
    set: impl Fn(&mut LandscapePoint, f64),
) -> Result<()> {
    let (idx, raw): (Vec<usize>, Vec<f64>) = points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| get(p).map(|v| (i, v)))
        .unzip();
    if raw.is_empty() {
        return Ok(());
    }
    for (i, v) in idx.into_iter().zip(minmax_scale(&raw)?) {
        set(&mut points[i], v);
    }
    Ok(())
}

/// Evaluates and scales a landscape over the given partitions. `score`
/// computes the raw BDM and its window count for partitions it accepts.
fn assemble(
    x: &BitSignal,
    partitions: Vec<Partition>,
    loss_budget: f64,
    metrics: &[Metric],
    score: impl Fn(&Grid) -> Result<Option<(Bdm, usize)>> + Sync,
) -> Result<Landscape> {
    let want = |m| metrics.contains(&m);
    let mut points: Vec<LandscapePoint> = partitions
        .into_par_iter()
        .map(|partition| {
            let kept = x.prefix(partition.kept_bits);
            let grid = Grid::new(partition.shape, kept.as_slice().to_vec())?;
            let (bdm, bdm_norm) = if want(Metric::Bdm) {
                match score(&grid)? {
                    Some((b, windows)) => (Some(b), Some(b.bits / windows as f64)),
                    None => (None, None),
                }
            } else {
                (None, None)
            };
            let block_entropy = if want(Metric::BlockEntropy) {
                Some(block_entropy(&kept, partition.shape.cols)?)
            } else {
                None
            };
            let deflate_norm = want(Metric::Deflate)
                .then(|| normalize_deflate(deflate_b64_len(&kept), partition.kept_bits, x.len()));
            Ok(LandscapePoint {
                partition,
                bdm,
                bdm_norm,
                block_entropy,
                deflate_norm,
                bdm_scaled: None,
                entropy_scaled: None,
                deflate_scaled: None,
                spike_z: None,
            })
        })
        .collect::<Result<_>>()?;
    points.sort_by(|a, b| a.partition.shape.cmp(&b.partition.shape));

    scale_column(&mut points, |p| p.bdm_norm, |p, v| p.bdm_scaled = Some(v))?;
    scale_column(&mut points, |p| p.block_entropy, |p, v| p.entropy_scaled = Some(v))?;
    scale_column(&mut points, |p| p.deflate_norm, |p, v| p.deflate_scaled = Some(v))?;

    let mut landscape = Landscape {
        signal_bits: x.len(),
        loss_budget,
        metrics: metrics.to_vec(),
        points,
    };
    let (idx, values) = landscape.series(Metric::Bdm);
    if values.len() >= DEFAULT_WINDOW {
        for (i, z) in idx.into_iter().zip(robust_z(&values, DEFAULT_WINDOW)?) {
            landscape.points[i].spike_z = z;
        }
    }
    Ok(landscape)
}

/// The 2D structural sweep: every candidate `m x n` reshaping scored by
/// stride-1 BDM per window, block entropy at block size `n`, and deflate
/// length per kept fraction, each min-max scaled across the landscape.
/// Shapes narrower than 4 on either axis carry no BDM.
pub fn structural_sweep(
    x: &BitSignal,
    loss_budget: f64,
    metrics: &[Metric],
    table: Option<&CtmTable>,
) -> Result<Landscape> {
    check_loss(loss_budget)?;
    check_sweep_metrics(metrics, table)?;
    if x.len() < MIN_SWEEP_BITS {
        return Err(Error::EmptyInput("a structural sweep needs at least 16 bits"));
    }
    assemble(
        x,
        partition_candidates_2d(x.len(), loss_budget),
        loss_budget,
        metrics,
        |g| {
            if g.rows() < 4 || g.cols() < 4 {
                return Ok(None);
            }
            let table = table.expect("checked above");
            let windows = (g.rows() - 3) * (g.cols() - 3);
            Ok(Some((bdm_2d(g, table, 1)?, windows)))
        },
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpikeCandidate {
    pub partition: Partition,
    pub metric: Metric,
    pub scaled_value: f64,
    /// Robust z-score; at most `-threshold` for real spikes, possibly
    /// `None` for fallback candidates.
    pub depth: Option<f64>,
    /// 1-based.
    pub rank: usize,
}

pub fn detect_spikes(
    landscape: &Landscape,
    metric: Metric,
    params: &SpikeParams,
) -> Result<Vec<SpikeCandidate>> {
    let (idx, values) = landscape.series(metric);
    let raw = landscape.raw_series(metric);
    Ok(find_spikes(&values, Some(&raw), params)?
        .into_iter()
        .enumerate()
        .map(|(r, (i, z))| SpikeCandidate {
            partition: landscape.points[idx[i]].partition,
            metric,
            scaled_value: values[i],
            depth: Some(z),
            rank: r + 1,
        })
        .collect())
}

/// The lowest-valued points of `metric`, for use when no spike clears the threshold.
fn lowest(landscape: &Landscape, metric: Metric, k: usize) -> Vec<SpikeCandidate> {
    let mut pts: Vec<&LandscapePoint> = landscape
        .points
        .iter()
        .filter(|p| p.scaled(metric).is_some())
        .collect();
    pts.sort_by(|a, b| {
        a.scaled(metric)
            .unwrap()
            .total_cmp(&b.scaled(metric).unwrap())
            .then(a.partition.shape.cmp(&b.partition.shape))
    });
    pts.into_iter()
        .take(k)
        .enumerate()
        .map(|(r, p)| SpikeCandidate {
            partition: p.partition,
            metric,
            scaled_value: p.scaled(metric).unwrap(),
            depth: if metric == Metric::Bdm { p.spike_z } else { None },
            rank: r + 1,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inference2d {
    pub landscape: Landscape,
    /// Every spike, ranked, before truncation to `top_k`.
    pub spikes: Vec<SpikeCandidate>,
    pub candidates: Vec<SpikeCandidate>,
    /// No spike cleared the threshold; `candidates` are the lowest points.
    pub weak: bool,
}

pub fn infer_dims_2d(
    x: &BitSignal,
    loss_budget: f64,
    table: &CtmTable,
    top_k: usize,
    params: &SpikeParams,
) -> Result<Inference2d> {
    if top_k == 0 {
        return Err(Error::Parameter("top_k must be positive".into()));
    }
    let landscape = structural_sweep(x, loss_budget, &[Metric::Bdm], Some(table))?;
    let spikes = detect_spikes(&landscape, Metric::Bdm, params)?;
    let weak = spikes.is_empty();
    let candidates = if weak {
        lowest(&landscape, Metric::Bdm, top_k)
    } else {
        spikes.iter().take(top_k).cloned().collect()
    };
    Ok(Inference2d {
        landscape,
        spikes,
        candidates,
        weak,
    })
}

/// Groups spike positions into families: a position joins the family of the
/// smallest other spike that divides it. Families keep the order of first
/// appearance in `ranked`.
pub fn group_multiples(ranked: &[usize]) -> Vec<(usize, Vec<usize>)> {
    let spikes: std::collections::BTreeSet<usize> = ranked.iter().copied().collect();
    let head_of = |x: usize| {
        spikes
            .range(..x)
            .find(|&&d| d > 0 && x % d == 0)
            .copied()
            .unwrap_or(x)
    };
    let mut families: Vec<(usize, Vec<usize>)> = Vec::new();
    for &x in ranked {
        let h = head_of(x);
        match families.iter_mut().find(|(head, _)| *head == h) {
            Some((_, members)) => {
                if !members.contains(&x) {
                    members.push(x)
                }
            }
            None => families.push((h, vec![x])),
        }
    }
    for (_, members) in &mut families {
        members.sort_unstable();
    }
    families
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Family {
    /// Row length (stage 1) or rows per plane (stage 2) of the family head.
    pub head: usize,
    pub members: Vec<usize>,
    /// Best (lowest) scaled BDM among members.
    pub scaled_value: f64,
    pub depth: Option<f64>,
}

fn families_of(candidates: &[SpikeCandidate], position: impl Fn(&Shape) -> usize) -> Vec<Family> {
    let ranked: Vec<usize> = candidates.iter().map(|c| position(&c.partition.shape)).collect();
    group_multiples(&ranked)
        .into_iter()
        .map(|(head, members)| {
            let best = candidates
                .iter()
                .find(|c| members.contains(&position(&c.partition.shape)))
                .expect("every family has a ranked member");
            Family {
                head,
                members,
                scaled_value: best.scaled_value,
                depth: best.depth,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage2 {
    pub row_length: usize,
    pub rows: usize,
    pub landscape: Landscape,
    pub spikes: Vec<SpikeCandidate>,
    pub families: Vec<Family>,
    pub weak: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleCandidate {
    pub partition: Partition,
    pub stage1_scaled: f64,
    pub stage1_rank: usize,
    pub stage2_scaled: f64,
    pub stage2_rank: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inference3d {
    pub stage1: Inference2d,
    /// Stage-1 families keyed by row length.
    pub stage1_families: Vec<Family>,
    pub stage2: Vec<Stage2>,
    pub triples: Vec<TripleCandidate>,
}

/// Sweeps `rows` rows of length `row_length` into `a x row_length x p`
/// volumes and scores each with slice-wise BDM per window.
fn stage2_sweep(
    x: &BitSignal,
    row_length: usize,
    rows: usize,
    loss_budget: f64,
    table: &CtmTable,
) -> Result<Landscape> {
    let partitions = partition_candidates_2d(rows, loss_budget)
        .into_iter()
        .filter_map(|p| {
            let (a, planes) = (p.shape.rows, p.shape.cols);
            Partition::new(Shape::d3(a, row_length, planes), x.len()).ok()
        })
        .collect();
    assemble(x, partitions, loss_budget, &[Metric::Bdm], |g| {
        if g.rows() < 4 || g.cols() < 4 {
            return Ok(None);
        }
        let bdm = bdm_3d(g, table)?;
        Ok(Some((bdm, bdm.windows)))
    })
}

/// Two-stage greedy inference of `rows x cols x planes` shapes.
///
/// Stage 1 is the 2D inference; its candidates are grouped by row length
/// into families of multiples. For each family head with at least 16 rows,
/// stage 2 splits the rows into planes. Triples are ranked by stage-2 rank,
/// then stage-1 rank.
pub fn infer_dims_3d(
    x: &BitSignal,
    loss_budget: f64,
    table: &CtmTable,
    top_k: usize,
    params: &SpikeParams,
) -> Result<Inference3d> {
    if x.len() < MIN_3D_BITS {
        return Err(Error::EmptyInput("3D inference needs at least 64 bits"));
    }
    let mut stage1 = infer_dims_2d(x, loss_budget, table, top_k, params)?;
    let pool = if stage1.weak {
        lowest(&stage1.landscape, Metric::Bdm, top_k)
    } else {
        stage1.spikes.clone()
    };
    let stage1_families = families_of(&pool, |s| s.cols);
    stage1.candidates = pool.iter().take(top_k).cloned().collect();

    let mut stage2 = Vec::new();
    let mut triples = Vec::new();
    for (r1, fam) in stage1_families.iter().enumerate() {
        let row_length = fam.head;
        let rows = x.len() / row_length;
        if rows < MIN_STAGE2_ROWS {
            continue;
        }
        let landscape = stage2_sweep(x, row_length, rows, loss_budget, table)?;
        let (_, values) = landscape.series(Metric::Bdm);
        if values.len() < params.window {
            let only = lowest(&landscape, Metric::Bdm, 1);
            stage2.push(Stage2 {
                row_length,
                rows,
                families: families_of(&only, |s| s.rows),
                spikes: Vec::new(),
                landscape,
                weak: true,
            });
        } else {
            let spikes = detect_spikes(&landscape, Metric::Bdm, params)?;
            let weak = spikes.is_empty();
            let pool2 = if weak {
                lowest(&landscape, Metric::Bdm, top_k)
            } else {
                spikes.clone()
            };
            stage2.push(Stage2 {
                row_length,
                rows,
                families: families_of(&pool2, |s| s.rows),
                spikes,
                landscape,
                weak,
            });
        }
        let st = stage2.last().expect("just pushed");
        for (r2, f2) in st.families.iter().enumerate() {
            let a = f2.head;
            let partition = Partition::new(Shape::d3(a, row_length, rows / a), x.len())?;
            triples.push(TripleCandidate {
                partition,
                stage1_scaled: fam.scaled_value,
                stage1_rank: r1 + 1,
                stage2_scaled: f2.scaled_value,
                stage2_rank: r2 + 1,
                rank: 0,
            });
        }
    }
    triples.sort_by_key(|t| (t.stage2_rank, t.stage1_rank));
    triples.truncate(top_k);
    for (i, t) in triples.iter_mut().enumerate() {
        t.rank = i + 1;
    }
    Ok(Inference3d {
        stage1,
        stage1_families,
        stage2,
        triples,
    })
}

/// Family heads and members, keyed by head, for reporting.
pub fn family_map(families: &[Family]) -> BTreeMap<usize, Vec<usize>> {
    families.iter().map(|f| (f.head, f.members.clone())).collect()
}
