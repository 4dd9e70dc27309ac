//! Information-content measures: Shannon and block entropy, LZW dictionary
//! size, DEFLATE+Base64 length, and the Block Decomposition Method (BDM).

use std::collections::HashMap;
use std::io::Write;

use base64::Engine;
use flate2::write::ZlibEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};

use crate::bits::{BitSignal, Grid};
use crate::ctm::{CtmTable, Pattern};
use crate::error::{Error, Result};

/// Shannon entropy of the empirical 0/1 distribution, in bits per symbol.
pub fn shannon_entropy(x: &BitSignal) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptySignal);
    }
    let n = x.len();
    let ones = x.ones();
    Ok(entropy_of_counts([ones, n - ones].into_iter(), n))
}

fn entropy_of_counts(counts: impl Iterator<Item = usize>, total: usize) -> f64 {
    let total = total as f64;
    let mut terms: Vec<f64> = counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .collect();
    // Order-independent summation.
    terms.sort_by(f64::total_cmp);
    terms.iter().sum::<f64>().max(0.0)
}

/// Entropy of the distribution of consecutive non-overlapping blocks.
pub fn block_entropy(x: &BitSignal, block_len: usize) -> Result<f64> {
    if block_len == 0 || block_len > x.len() {
        return Err(Error::BlockLength {
            block_len,
            len: x.len(),
        });
    }
    let mut tally: HashMap<&[u8], usize> = HashMap::new();
    let mut blocks = 0;
    for chunk in x.as_slice().chunks_exact(block_len) {
        *tally.entry(chunk).or_default() += 1;
        blocks += 1;
    }
    Ok(entropy_of_counts(tally.into_values(), blocks))
}

/// Final dictionary size of textbook LZW over the alphabet {0, 1}.
///
/// The dictionary starts as {"0", "1"}; each miss emits the current match and
/// adds the match extended by the next bit. The count includes both initial
/// entries.
pub fn lzw_dict_len(x: &BitSignal) -> usize {
    // Trie edges: (code, next bit) -> code.
    let mut edges: HashMap<(u32, u8), u32> = HashMap::new();
    let mut size: u32 = 2;
    let mut bits = x.as_slice().iter();
    let Some(&first) = bits.next() else {
        return size as usize;
    };
    let mut current = first as u32;
    for &b in bits {
        match edges.get(&(current, b)) {
            Some(&code) => current = code,
            None => {
                edges.insert((current, b), size);
                size += 1;
                current = b as u32;
            }
        }
    }
    size as usize
}

/// Length of Base64(zlib(packed bits)) in characters.
///
/// Bits are packed MSB-first with a zero-padded final byte; the stream uses
/// zlib framing at the default compression level.
pub fn deflate_b64_len(x: &BitSignal) -> usize {
    let mut enc = ZlibEncoder::new(Vec::new(), Compression::default());
    enc.write_all(&x.to_bytes())
        .expect("writing into a Vec cannot fail");
    let compressed = enc.finish().expect("writing into a Vec cannot fail");
    base64::engine::general_purpose::STANDARD
        .encode(compressed)
        .len()
}

/// A BDM estimate together with its window accounting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bdm {
    pub bits: f64,
    /// Windows visited, with multiplicity.
    pub windows: usize,
    /// Windows whose content was absent from the table.
    pub fallback_windows: usize,
}

impl Bdm {
    /// Bits per window; zero when there are no windows.
    pub fn normalized(&self) -> f64 {
        if self.windows == 0 {
            0.0
        } else {
            self.bits / self.windows as f64
        }
    }

    pub fn fallback_fraction(&self) -> f64 {
        if self.windows == 0 {
            0.0
        } else {
            self.fallback_windows as f64 / self.windows as f64
        }
    }
}

/// Accumulates `CTM(w) + log2(multiplicity)` over distinct window contents.
///
/// Terms are summed in sorted order so the result depends only on the
/// multiset of terms, which makes complement and plane-order invariance exact.
#[derive(Default)]
struct BdmAccumulator {
    terms: Vec<f64>,
    windows: usize,
    fallback_windows: usize,
}

impl BdmAccumulator {
    fn add_windows(&mut self, table: &CtmTable, keys: &mut [Pattern]) {
        keys.sort_unstable();
        let mut i = 0;
        while i < keys.len() {
            let mut j = i + 1;
            while j < keys.len() && keys[j] == keys[i] {
                j += 1;
            }
            let multiplicity = j - i;
            let hit = table.lookup_unchecked(&keys[i]);
            if hit.fallback {
                self.fallback_windows += multiplicity;
            }
            self.terms.push(hit.bits + (multiplicity as f64).log2());
            self.windows += multiplicity;
            i = j;
        }
    }

    fn finish(mut self) -> Bdm {
        self.terms.sort_by(f64::total_cmp);
        Bdm {
            bits: self.terms.iter().sum(),
            windows: self.windows,
            fallback_windows: self.fallback_windows,
        }
    }
}

fn require_dims(table: &CtmTable, dims: u8) -> Result<()> {
    if table.dims() != dims {
        return Err(Error::DimensionMismatch {
            table: table.dims(),
            pattern: dims,
        });
    }
    Ok(())
}

/// 1D BDM over windows of `block_len` bits taken every `stride` bits.
pub fn bdm_1d(x: &BitSignal, table: &CtmTable, block_len: usize, stride: usize) -> Result<Bdm> {
    require_dims(table, 1)?;
    if block_len == 0 || block_len > Pattern::MAX_LINE {
        return Err(Error::Coverage(format!(
            "block length {block_len} outside the 1..=16 bits a 1D table covers"
        )));
    }
    if stride == 0 {
        return Err(Error::Parameter("stride must be at least 1".into()));
    }
    let bits = x.as_slice();
    let mut keys = Vec::new();
    let mut start = 0;
    while start + block_len <= bits.len() {
        let packed = bits[start..start + block_len]
            .iter()
            .fold(0u16, |acc, &b| (acc << 1) | b as u16);
        keys.push(Pattern::Line {
            len: block_len as u8,
            bits: packed,
        });
        start += stride;
    }
    let mut acc = BdmAccumulator::default();
    acc.add_windows(table, &mut keys);
    Ok(acc.finish())
}

fn plane_windows(g: &Grid, plane: usize, stride: usize, keys: &mut Vec<Pattern>) {
    let (rows, cols) = (g.rows(), g.cols());
    let cells = &g.cells()[plane * rows * cols..(plane + 1) * rows * cols];
    let mut r = 0;
    while r + 4 <= rows {
        let mut c = 0;
        while c + 4 <= cols {
            let mut packed = 0u16;
            for dr in 0..4 {
                let row = &cells[(r + dr) * cols + c..(r + dr) * cols + c + 4];
                for &b in row {
                    packed = (packed << 1) | b as u16;
                }
            }
            keys.push(Pattern::Block(packed));
            c += stride;
        }
        r += stride;
    }
}

fn check_plane(g: &Grid) -> Result<()> {
    if g.rows() < 4 || g.cols() < 4 {
        return Err(Error::GridTooSmall {
            rows: g.rows(),
            cols: g.cols(),
        });
    }
    Ok(())
}

/// 2D BDM over 4x4 windows at the given stride. With stride 1 the window
/// count is `(rows - 3)(cols - 3)`.
pub fn bdm_2d(g: &Grid, table: &CtmTable, stride: usize) -> Result<Bdm> {
    require_dims(table, 2)?;
    if g.shape().ndims() != 2 {
        return Err(Error::InvalidShape(format!("bdm_2d needs a 2D grid, got {}", g.shape())));
    }
    check_plane(g)?;
    if stride == 0 {
        return Err(Error::Parameter("stride must be at least 1".into()));
    }
    let mut keys = Vec::new();
    plane_windows(g, 0, stride, &mut keys);
    let mut acc = BdmAccumulator::default();
    acc.add_windows(table, &mut keys);
    Ok(acc.finish())
}

/// Slice-wise 3D BDM: the stride-1 2D BDM of every (rows x cols) plane,
/// summed. This approximates, and is not, a native 3D estimate.
pub fn bdm_3d(v: &Grid, table: &CtmTable) -> Result<Bdm> {
    require_dims(table, 2)?;
    check_plane(v)?;
    let mut acc = BdmAccumulator::default();
    let mut keys = Vec::new();
    for p in 0..v.planes() {
        keys.clear();
        plane_windows(v, p, 1, &mut keys);
        acc.add_windows(table, &mut keys);
    }
    Ok(acc.finish())
}

/// The measures a report or experiment can request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Entropy,
    BlockEntropy,
    Lzw,
    Deflate,
    Bdm,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Entropy,
        Metric::BlockEntropy,
        Metric::Lzw,
        Metric::Deflate,
        Metric::Bdm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Entropy => "entropy",
            Metric::BlockEntropy => "block_entropy",
            Metric::Lzw => "lzw",
            Metric::Deflate => "deflate",
            Metric::Bdm => "bdm",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == name)
            .ok_or_else(|| Error::Parameter(format!("unknown metric `{name}`")))
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Parameters for [`report`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub metrics: Vec<Metric>,
    /// Block length for block entropy; `None` uses the grid width (or 8 for
    /// a flat signal).
    pub entropy_block: Option<usize>,
    pub bdm_block: usize,
    pub bdm_stride: usize,
    /// Length of the signal before any truncation; `None` means nothing was
    /// dropped.
    pub original_bits: Option<usize>,
}

impl Default for ReportParams {
    fn default() -> Self {
        Self {
            metrics: Metric::ALL.to_vec(),
            entropy_block: None,
            bdm_block: 8,
            bdm_stride: 8,
            original_bits: None,
        }
    }
}

/// All requested measures for one signal or grid. Absent fields were not
/// requested (or, for BDM, not computable).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub bits: usize,
    pub entropy: Option<f64>,
    pub block_entropy: Option<f64>,
    pub block_len: Option<usize>,
    pub lzw_dict_len: Option<usize>,
    pub deflate_b64_len: Option<usize>,
    pub bdm: Option<f64>,
    pub bdm_windows: Option<usize>,
    pub normalized_bdm: Option<f64>,
    pub normalized_deflate: Option<f64>,
    pub fallback_fraction: Option<f64>,
}

impl ComplexityReport {
    pub const CSV_HEADER: &'static str = "bits,entropy,block_entropy,block_len,lzw_dict_len,deflate_b64_len,bdm,bdm_windows,normalized_bdm,normalized_deflate,fallback_fraction";

    /// One CSV row in [`Self::CSV_HEADER`] order; absent values are empty.
    pub fn csv_row(&self) -> String {
        fn f(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        fn u(v: Option<usize>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        [
            self.bits.to_string(),
            f(self.entropy),
            f(self.block_entropy),
            u(self.block_len),
            u(self.lzw_dict_len),
            u(self.deflate_b64_len),
            f(self.bdm),
            u(self.bdm_windows),
            f(self.normalized_bdm),
            f(self.normalized_deflate),
            f(self.fallback_fraction),
        ]
        .join(",")
    }
}

/// What a report is computed over.
#[derive(Clone, Copy, Debug)]
pub enum ReportInput<'a> {
    Signal(&'a BitSignal),
    Grid(&'a Grid),
}

/// `deflate_len` divided by the fraction of bits kept.
pub fn normalize_deflate(deflate_len: usize, kept_bits: usize, original_bits: usize) -> f64 {
    if kept_bits == 0 || original_bits == 0 {
        return deflate_len as f64;
    }
    deflate_len as f64 / (kept_bits as f64 / original_bits as f64)
}

pub fn report(
    input: ReportInput<'_>,
    table: Option<&CtmTable>,
    params: &ReportParams,
) -> Result<ComplexityReport> {
    let flat = match input {
        ReportInput::Signal(x) => x.clone(),
        ReportInput::Grid(g) => g.flatten(),
    };
    let wants = |m: Metric| params.metrics.contains(&m);
    let mut out = ComplexityReport {
        bits: flat.len(),
        ..Default::default()
    };
    if wants(Metric::Entropy) {
        out.entropy = Some(shannon_entropy(&flat)?);
    }
    if wants(Metric::BlockEntropy) {
        let block = params.entropy_block.unwrap_or(match input {
            ReportInput::Signal(_) => 8,
            ReportInput::Grid(g) => g.cols(),
        });
        out.block_entropy = Some(block_entropy(&flat, block)?);
        out.block_len = Some(block);
    }
    if wants(Metric::Lzw) {
        out.lzw_dict_len = Some(lzw_dict_len(&flat));
    }
    if wants(Metric::Deflate) {
        let len = deflate_b64_len(&flat);
        out.deflate_b64_len = Some(len);
        out.normalized_deflate = Some(normalize_deflate(
            len,
            flat.len(),
            params.original_bits.unwrap_or(flat.len()),
        ));
    }
    if wants(Metric::Bdm) {
        let table = table.ok_or_else(|| Error::Parameter("BDM requested without a table".into()))?;
        let bdm = match input {
            ReportInput::Signal(x) => bdm_1d(x, table, params.bdm_block, params.bdm_stride)?,
            ReportInput::Grid(g) if g.shape().ndims() == 2 => bdm_2d(g, table, params.bdm_stride)?,
            ReportInput::Grid(g) => bdm_3d(g, table)?,
        };
        out.bdm = Some(bdm.bits);
        out.bdm_windows = Some(bdm.windows);
        out.normalized_bdm = Some(bdm.normalized());
        out.fallback_fraction = Some(bdm.fallback_fraction());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Shape;
    use crate::ctm::{build_table, MachineSpace};

    fn sig(s: &str) -> BitSignal {
        s.parse().unwrap()
    }

    #[test]
    fn entropy_examples() {
        let balanced = BitSignal::from_bools((0..402).map(|i| i % 2 == 0));
        assert_eq!(shannon_entropy(&balanced).unwrap(), 1.0);
        assert_eq!(shannon_entropy(&BitSignal::zeros(77)).unwrap(), 0.0);
        let quarter = sig("0001000100010001");
        assert!((shannon_entropy(&quarter).unwrap() - 0.811278).abs() < 1e-6);
        assert!(matches!(shannon_entropy(&BitSignal::default()), Err(Error::EmptySignal)));
    }

    #[test]
    fn block_entropy_examples() {
        assert_eq!(block_entropy(&sig("01010101"), 2).unwrap(), 0.0);
        assert_eq!(block_entropy(&sig("0011"), 2).unwrap(), 1.0);
        assert!((block_entropy(&sig("010011"), 2).unwrap() - 3f64.log2()).abs() < 1e-12);
        // Trailing remainder is dropped.
        assert_eq!(block_entropy(&sig("00111"), 2).unwrap(), 1.0);
        assert!(block_entropy(&sig("01"), 3).is_err());
        assert!(block_entropy(&sig("01"), 0).is_err());
    }

    #[test]
    fn lzw_examples() {
        assert_eq!(lzw_dict_len(&BitSignal::default()), 2);
        assert_eq!(lzw_dict_len(&sig("01")), 3);
        assert_eq!(lzw_dict_len(&sig("0000")), 4);
    }

    #[test]
    fn deflate_length_is_base64_padded_and_ordered() {
        let zeros = BitSignal::zeros(4096);
        let mut state = 0x9E3779B97F4A7C15u64;
        let noisy = BitSignal::from_bools((0..4096).map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state & 1 == 1
        }));
        let (a, b) = (deflate_b64_len(&zeros), deflate_b64_len(&noisy));
        assert_eq!(a % 4, 0);
        assert_eq!(b % 4, 0);
        assert!(a < b);
        assert_eq!(deflate_b64_len(&noisy), b);
    }

    #[test]
    fn bdm_1d_single_and_repeated_block() {
        let t = build_table(MachineSpace::new(1, 2, 50).unwrap()).unwrap();
        let block = sig("0110");
        let one = bdm_1d(&block, &t, 4, 4).unwrap();
        let ctm = t.lookup(&Pattern::line(block.as_slice()).unwrap()).unwrap().bits;
        assert_eq!(one.bits, ctm);
        let five = sig("01100110011001100110");
        assert_eq!(bdm_1d(&five, &t, 4, 4).unwrap().bits, ctm + 5f64.log2());
        assert!(bdm_1d(&five, &t, 17, 1).is_err());
        assert!(bdm_1d(&five, &t, 4, 0).is_err());
    }

    #[test]
    fn bdm_2d_window_counts() {
        let t = build_table(MachineSpace::new(2, 1, 20).unwrap()).unwrap();
        let zero_block = t.lookup(&Pattern::block(&[0; 16]).unwrap()).unwrap().bits;
        let g4 = Grid::zeros(Shape::d2(4, 4)).unwrap();
        let b = bdm_2d(&g4, &t, 1).unwrap();
        assert_eq!((b.bits, b.windows), (zero_block, 1));
        let g8 = Grid::zeros(Shape::d2(8, 8)).unwrap();
        let b = bdm_2d(&g8, &t, 1).unwrap();
        assert_eq!(b.windows, 25);
        assert_eq!(b.bits, zero_block + 25f64.log2());
        assert!(matches!(
            bdm_2d(&Grid::zeros(Shape::d2(3, 8)).unwrap(), &t, 1),
            Err(Error::GridTooSmall { .. })
        ));
        let v = Grid::zeros(Shape::d3(8, 8, 2)).unwrap();
        let b3 = bdm_3d(&v, &t).unwrap();
        assert_eq!(b3.windows, 50);
        assert_eq!(b3.bits, 2.0 * (zero_block + 25f64.log2()));
    }

    #[test]
    fn report_normalizes_deflate_by_kept_ratio() {
        let x = sig("0110100110010110");
        let full = report(ReportInput::Signal(&x), None, &ReportParams {
            metrics: vec![Metric::Deflate],
            ..Default::default()
        })
        .unwrap();
        assert_eq!(full.normalized_deflate, full.deflate_b64_len.map(|d| d as f64));
        let x99 = BitSignal::zeros(99);
        let r = report(ReportInput::Signal(&x99), None, &ReportParams {
            metrics: vec![Metric::Deflate],
            original_bits: Some(100),
            ..Default::default()
        })
        .unwrap();
        let d = r.deflate_b64_len.unwrap() as f64;
        assert!((r.normalized_deflate.unwrap() - d / 0.99).abs() < 1e-9);
        assert!(report(ReportInput::Signal(&x), None, &ReportParams::default()).is_err());
    }
}
