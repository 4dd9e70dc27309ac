//! Materialising partitions as grids and ranking their mirror orientations.

use serde::{Deserialize, Serialize};

use crate::bits::{BitSignal, Grid, Shape};
use crate::complexity::{bdm_2d, bdm_3d};
use crate::ctm::CtmTable;
use crate::error::{Error, Result};
use crate::landscape::Partition;

/// Row-major (then plane-major) fill of the first `kept_bits` bits.
pub fn reshape(x: &BitSignal, p: &Partition) -> Result<Grid> {
    if p.kept_bits > x.len() || p.kept_bits != p.shape.volume() {
        return Err(Error::InvalidShape(format!(
            "{} keeps {} bits of a {}-bit signal",
            p.shape,
            p.kept_bits,
            x.len()
        )));
    }
    Grid::new(p.shape, x.as_slice()[..p.kept_bits].to_vec())
}

/// Mirrors the grid along each axis whose flag is set. Flags are ordered
/// (rows, cols, planes); a missing plane flag means no plane flip.
pub fn flip(g: &Grid, flips: &[bool]) -> Result<Grid> {
    let shape = g.shape();
    if flips.len() != shape.ndims() {
        return Err(Error::InvalidShape(format!(
            "{} flip flags for a {}D grid",
            flips.len(),
            shape.ndims()
        )));
    }
    let (rows, cols, planes) = (g.rows(), g.cols(), g.planes());
    let fr = flips[0];
    let fc = flips[1];
    let fp = flips.get(2).copied().unwrap_or(false);
    Grid::from_fn(shape, |p, r, c| {
        let sp = if fp { planes - 1 - p } else { p };
        let sr = if fr { rows - 1 - r } else { r };
        let sc = if fc { cols - 1 - c } else { c };
        g.get(sp, sr, sc) == 1
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientationVariant {
    /// Per axis, in (rows, cols, planes) order.
    pub flips: Vec<bool>,
    #[serde(skip)]
    pub grid: Option<Grid>,
    /// Stride-1 BDM per window.
    pub score: f64,
}

impl OrientationVariant {
    pub fn flip_count(&self) -> usize {
        self.flips.iter().filter(|&&f| f).count()
    }
}

fn all_flips(ndims: usize) -> Vec<Vec<bool>> {
    (0..1u32 << ndims)
        .map(|mask| (0..ndims).map(|axis| mask >> (ndims - 1 - axis) & 1 == 1).collect())
        .collect()
}

pub fn orientation_score(g: &Grid, table: &CtmTable) -> Result<f64> {
    let bdm = match g.shape().ndims() {
        2 => bdm_2d(g, table, 1)?,
        _ => bdm_3d(g, table)?,
    };
    Ok(bdm.normalized())
}

/// Every per-axis mirror of `g` (4 in 2D, 8 in 3D), ascending by score,
/// then by number of flipped axes, then by flag pattern.
pub fn orientation_candidates(g: &Grid, table: &CtmTable) -> Result<Vec<OrientationVariant>> {
    if g.rows() < 4 || g.cols() < 4 {
        return Err(Error::GridTooSmall {
            rows: g.rows(),
            cols: g.cols(),
        });
    }
    let mut variants = all_flips(g.shape().ndims())
        .into_iter()
        .map(|flips| {
            let grid = flip(g, &flips)?;
            let score = orientation_score(&grid, table)?;
            Ok(OrientationVariant {
                flips,
                grid: Some(grid),
                score,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    variants.sort_by(|a, b| {
        a.score
            .total_cmp(&b.score)
            .then(a.flip_count().cmp(&b.flip_count()))
            .then(a.flips.cmp(&b.flips))
    });
    Ok(variants)
}

/// Plain PBM bitmap (`P1`) of one plane: 1 is black.
pub fn to_pbm(g: &Grid, plane: usize) -> String {
    let (rows, cols) = (g.rows(), g.cols());
    let mut out = format!("P1\n{cols} {rows}\n");
    for r in 0..rows {
        let line: Vec<&str> = (0..cols)
            .map(|c| if g.get(plane, r, c) == 1 { "1" } else { "0" })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn flip_label(flips: &[bool]) -> String {
    flips.iter().map(|&f| if f { '1' } else { '0' }).collect()
}

/// Listing of exported variants written next to the bitmaps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionManifest {
    pub shape: Shape,
    pub kept_bits: usize,
    pub signal_bits: usize,
    pub variants: Vec<ManifestVariant>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestVariant {
    pub rank: usize,
    pub flips: Vec<bool>,
    pub score: f64,
    pub files: Vec<String>,
}

/// Bitmap files for every variant (one per plane) and their manifest.
pub fn export(
    x: &BitSignal,
    partition: &Partition,
    variants: &[OrientationVariant],
) -> Result<(Vec<(String, String)>, ReconstructionManifest)> {
    let mut files = Vec::new();
    let mut listed = Vec::new();
    for (i, v) in variants.iter().enumerate() {
        let grid = match &v.grid {
            Some(g) => g.clone(),
            None => flip(&reshape(x, partition)?, &v.flips)?,
        };
        let label = flip_label(&v.flips);
        let mut names = Vec::new();
        for p in 0..grid.planes() {
            let name = if grid.shape().ndims() == 2 {
                format!("variant_{label}.pbm")
            } else {
                format!("variant_{label}_plane{p:03}.pbm")
            };
            files.push((name.clone(), to_pbm(&grid, p)));
            names.push(name);
        }
        listed.push(ManifestVariant {
            rank: i + 1,
            flips: v.flips.clone(),
            score: v.score,
            files: names,
        });
    }
    Ok((
        files,
        ReconstructionManifest {
            shape: partition.shape,
            kept_bits: partition.kept_bits,
            signal_bits: x.len(),
            variants: listed,
        },
    ))
}
