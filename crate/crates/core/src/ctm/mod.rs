//! Coding-theorem tables: output frequencies of exhaustively enumerated small
//! machines, converted to complexity estimates `-log2(count / total)`.
//!
//! Every machine is also counted under the symbol relabeling 0 <-> 1, i.e. as
//! its twin running on a blank-1 tape. The twin of a machine that outputs `x`
//! outputs `!x`, so each built table is closed under bitwise complement with
//! identical counts, and `total_machines`/`total_halting` count both runs.

mod io;
mod machine;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

pub use io::{load_table, parse_table, render_table, save_table};
pub use machine::{run_machine, Enumeration, RunOutcome};

use crate::error::{Error, Result};

/// Which machines to enumerate and for how long to run them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MachineSpace {
    pub dims: u8,
    pub states: u8,
    pub max_steps: u32,
}

impl MachineSpace {
    pub const SYMBOLS: u8 = 2;

    pub fn new(dims: u8, states: u8, max_steps: u32) -> Result<Self> {
        if dims != 1 && dims != 2 {
            return Err(Error::InvalidSpace(format!("dims must be 1 or 2, got {dims}")));
        }
        if states == 0 {
            return Err(Error::InvalidSpace("state count must be at least 1".into()));
        }
        if max_steps == 0 {
            return Err(Error::InvalidSpace("max_steps must be at least 1".into()));
        }
        let space = Self {
            dims,
            states,
            max_steps,
        };
        if space.checked_machine_count().is_none() {
            return Err(Error::InvalidSpace(format!(
                "{states}-state {dims}D space is too large to enumerate"
            )));
        }
        Ok(space)
    }

    /// Default 1D space: 3 states, 200 steps.
    pub fn default_1d() -> Self {
        Self::new(1, 3, 200).expect("valid default")
    }

    /// Default 2D space: 2 states, 200 steps.
    pub fn default_2d() -> Self {
        Self::new(2, 2, 200).expect("valid default")
    }

    /// Choices per transition: `4n + 2` in 1D, `8(n + 1)` in 2D.
    pub fn radix(&self) -> u64 {
        let n = self.states as u64;
        if self.dims == 1 {
            4 * n + 2
        } else {
            8 * (n + 1)
        }
    }

    fn checked_machine_count(&self) -> Option<u64> {
        self.radix().checked_pow(2 * self.states as u32)
    }

    /// Number of distinct transition tables, known before enumeration.
    pub fn machine_count(&self) -> u64 {
        self.checked_machine_count().expect("validated on construction")
    }
}

/// A small binary pattern: a 1D string of up to 16 bits or a 4x4 block.
///
/// Bits are stored MSB-first: the first character of the textual form is the
/// highest stored bit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    Line { len: u8, bits: u16 },
    Block(u16),
}

impl Pattern {
    pub const MAX_LINE: usize = 16;
    pub const BLOCK_SIDE: usize = 4;

    pub fn line(bits: &[u8]) -> Result<Self> {
        if bits.is_empty() || bits.len() > Self::MAX_LINE {
            return Err(Error::InvalidPattern(format!(
                "1D pattern length {} outside 1..=16",
                bits.len()
            )));
        }
        let mut packed = 0u16;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidPattern("pattern cell is not a bit".into()));
            }
            packed = (packed << 1) | b as u16;
        }
        Ok(Pattern::Line {
            len: bits.len() as u8,
            bits: packed,
        })
    }

    /// A full 4x4 block from 16 row-major cells.
    pub fn block(cells: &[u8]) -> Result<Self> {
        Self::block_padded(Self::BLOCK_SIDE, Self::BLOCK_SIDE, cells)
    }

    /// A `rows x cols` matrix (both at most 4) anchored top-left in a 4x4
    /// block of background zeros.
    pub fn block_padded(rows: usize, cols: usize, cells: &[u8]) -> Result<Self> {
        if rows == 0 || cols == 0 || rows > Self::BLOCK_SIDE || cols > Self::BLOCK_SIDE {
            return Err(Error::InvalidPattern(format!(
                "2D pattern {rows}x{cols} outside 1..=4 per side"
            )));
        }
        if cells.len() != rows * cols {
            return Err(Error::InvalidPattern(format!(
                "{rows}x{cols} pattern needs {} cells, got {}",
                rows * cols,
                cells.len()
            )));
        }
        let mut packed = 0u16;
        for r in 0..rows {
            for c in 0..cols {
                let b = cells[r * cols + c];
                if b > 1 {
                    return Err(Error::InvalidPattern("pattern cell is not a bit".into()));
                }
                packed |= (b as u16) << (15 - (r * 4 + c));
            }
        }
        Ok(Pattern::Block(packed))
    }

    /// Parses the textual form used in table files.
    pub fn parse(dims: u8, text: &str) -> Result<Self> {
        let bits: Vec<u8> = text
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidPattern(format!("bad pattern character {c:?}"))),
            })
            .collect::<Result<_>>()?;
        match dims {
            1 => Self::line(&bits),
            2 if bits.len() == 16 => Self::block(&bits),
            2 => Err(Error::InvalidPattern(format!(
                "2D pattern needs 16 cells, got {}",
                bits.len()
            ))),
            d => Err(Error::InvalidPattern(format!("unsupported dimensionality {d}"))),
        }
    }

    pub fn dims(&self) -> u8 {
        match self {
            Pattern::Line { .. } => 1,
            Pattern::Block(_) => 2,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Pattern::Line { len, .. } => *len as usize,
            Pattern::Block(_) => 16,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn complement(&self) -> Self {
        match *self {
            Pattern::Line { len, bits } => Pattern::Line {
                len,
                bits: !bits & line_mask(len as usize),
            },
            Pattern::Block(bits) => Pattern::Block(!bits),
        }
    }

    pub fn bits(&self) -> Vec<u8> {
        let (len, packed) = match *self {
            Pattern::Line { len, bits } => (len as usize, bits),
            Pattern::Block(bits) => (16, bits),
        };
        (0..len).map(|i| ((packed >> (len - 1 - i)) & 1) as u8).collect()
    }

    /// Index into the dense lookup cache.
    fn slot(&self) -> usize {
        match *self {
            Pattern::Line { len, bits } => (1usize << len) + bits as usize,
            Pattern::Block(bits) => bits as usize,
        }
    }
}

fn line_mask(len: usize) -> u16 {
    if len >= 16 {
        u16::MAX
    } else {
        (1u16 << len) - 1
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern{}D({self})", self.dims())
    }
}

/// Result of a table lookup.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lookup {
    pub bits: f64,
    /// The pattern was absent and `max_entry + 1` was substituted.
    pub fallback: bool,
}

/// Output tallies of a machine space and the complexities they imply.
#[derive(Clone)]
pub struct CtmTable {
    space: MachineSpace,
    counts: BTreeMap<Pattern, u64>,
    total_machines: u64,
    total_halting: u64,
    max_entry: f64,
    dense: Vec<f64>,
}

impl CtmTable {
    /// Assembles a table from raw counts, checking the count invariants.
    pub fn from_counts(
        space: MachineSpace,
        counts: BTreeMap<Pattern, u64>,
        total_machines: u64,
        total_halting: u64,
    ) -> Result<Self> {
        if total_halting == 0 {
            return Err(Error::DegenerateSpace);
        }
        if total_halting > total_machines {
            return Err(Error::MalformedTable(format!(
                "total_halting {total_halting} exceeds total_machines {total_machines}"
            )));
        }
        let mut sum = 0u64;
        for (p, &c) in &counts {
            if p.dims() != space.dims {
                return Err(Error::DimensionMismatch {
                    table: space.dims,
                    pattern: p.dims(),
                });
            }
            if c == 0 {
                return Err(Error::MalformedTable(format!("zero count for {p}")));
            }
            sum = sum
                .checked_add(c)
                .ok_or_else(|| Error::MalformedTable("count overflow".into()))?;
        }
        if sum != total_halting {
            return Err(Error::MalformedTable(format!(
                "counts sum to {sum}, header says total_halting={total_halting}"
            )));
        }
        let dense_len = if space.dims == 1 { 1 << 17 } else { 1 << 16 };
        let mut dense = vec![f64::NAN; dense_len];
        let mut max_entry = 0.0f64;
        for (p, &c) in &counts {
            let k = complexity_of(c, total_halting);
            dense[p.slot()] = k;
            max_entry = max_entry.max(k);
        }
        Ok(Self {
            space,
            counts,
            total_machines,
            total_halting,
            max_entry,
            dense,
        })
    }

    pub fn space(&self) -> MachineSpace {
        self.space
    }

    pub fn dims(&self) -> u8 {
        self.space.dims
    }

    pub fn total_machines(&self) -> u64 {
        self.total_machines
    }

    pub fn total_halting(&self) -> u64 {
        self.total_halting
    }

    pub fn max_entry(&self) -> f64 {
        self.max_entry
    }

    pub fn fallback_value(&self) -> f64 {
        self.max_entry + 1.0
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, p: &Pattern) -> Option<u64> {
        self.counts.get(p).copied()
    }

    pub fn counts(&self) -> &BTreeMap<Pattern, u64> {
        &self.counts
    }

    /// `(pattern, complexity bits)` for every entry.
    pub fn entries(&self) -> impl Iterator<Item = (Pattern, f64)> + '_ {
        self.counts
            .iter()
            .map(|(p, &c)| (*p, complexity_of(c, self.total_halting)))
    }

    /// Stored complexity, or `max_entry + 1` flagged as a fallback.
    pub fn lookup(&self, p: &Pattern) -> Result<Lookup> {
        if p.dims() != self.space.dims {
            return Err(Error::DimensionMismatch {
                table: self.space.dims,
                pattern: p.dims(),
            });
        }
        Ok(self.lookup_unchecked(p))
    }

    #[inline]
    pub(crate) fn lookup_unchecked(&self, p: &Pattern) -> Lookup {
        let k = self.dense[p.slot()];
        if k.is_nan() {
            Lookup {
                bits: self.fallback_value(),
                fallback: true,
            }
        } else {
            Lookup {
                bits: k,
                fallback: false,
            }
        }
    }
}

impl PartialEq for CtmTable {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.total_machines == other.total_machines
            && self.total_halting == other.total_halting
            && self.counts == other.counts
    }
}

impl fmt::Debug for CtmTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CtmTable")
            .field("space", &self.space)
            .field("entries", &self.counts.len())
            .field("total_machines", &self.total_machines)
            .field("total_halting", &self.total_halting)
            .field("max_entry", &self.max_entry)
            .finish()
    }
}

/// `-log2(count / total)`.
pub fn complexity_of(count: u64, total: u64) -> f64 {
    -(count as f64 / total as f64).log2()
}

/// Streams every 1D machine of the space with its outcome.
pub fn enumerate_1d(space: MachineSpace) -> Result<Enumeration> {
    if space.dims != 1 {
        return Err(Error::InvalidSpace("enumerate_1d needs a 1D space".into()));
    }
    Ok(Enumeration::new(space))
}

/// Streams every 2D turmite of the space with its outcome.
pub fn enumerate_2d(space: MachineSpace) -> Result<Enumeration> {
    if space.dims != 2 {
        return Err(Error::InvalidSpace("enumerate_2d needs a 2D space".into()));
    }
    Ok(Enumeration::new(space))
}

const CHUNK: u64 = 1 << 14;

/// Tallies halting outputs (and their relabeled twins) over the whole space.
///
/// Work is split into fixed id ranges; per-range tallies are merged by
/// addition, so the result is independent of scheduling.
pub fn build_table(space: MachineSpace) -> Result<CtmTable> {
    let total = space.machine_count();
    let chunks = total.div_ceil(CHUNK);
    let (counts, halting) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut sim = machine::Simulator::new(space);
            let mut local: BTreeMap<Pattern, u64> = BTreeMap::new();
            let mut halting = 0u64;
            let end = ((chunk + 1) * CHUNK).min(total);
            for id in chunk * CHUNK..end {
                if let Some(p) = sim.run(id).pattern() {
                    *local.entry(p).or_default() += 1;
                    *local.entry(p.complement()).or_default() += 1;
                    halting += 2;
                }
            }
            (local, halting)
        })
        .reduce(
            || (BTreeMap::new(), 0),
            |(mut a, ha), (b, hb)| {
                for (p, c) in b {
                    *a.entry(p).or_default() += c;
                }
                (a, ha + hb)
            },
        );
    CtmTable::from_counts(space, counts, 2 * total, halting)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_validation() {
        assert!(MachineSpace::new(1, 0, 10).is_err());
        assert!(MachineSpace::new(1, 1, 0).is_err());
        assert!(MachineSpace::new(3, 1, 10).is_err());
        assert!(MachineSpace::new(1, 40, 10).is_err());
        assert_eq!(MachineSpace::new(1, 3, 200).unwrap().machine_count(), 14u64.pow(6));
        assert_eq!(MachineSpace::new(2, 2, 200).unwrap().machine_count(), 24u64.pow(4));
    }

    #[test]
    fn pattern_text_roundtrip_and_complement() {
        let p = Pattern::parse(1, "0010").unwrap();
        assert_eq!(p.to_string(), "0010");
        assert_eq!(p.complement().to_string(), "1101");
        let b = Pattern::block_padded(2, 1, &[1, 1]).unwrap();
        assert_eq!(b.to_string(), "1000100000000000");
        assert_eq!(b.complement().complement(), b);
        assert!(Pattern::parse(2, "0101").is_err());
        assert!(Pattern::line(&[]).is_err());
        assert!(Pattern::line(&[0; 17]).is_err());
    }

    #[test]
    fn lookup_fallback_and_dimension_check() {
        let t = build_table(MachineSpace::new(1, 1, 10).unwrap()).unwrap();
        let one = Pattern::parse(1, "1").unwrap();
        assert_eq!(t.lookup(&one).unwrap(), Lookup { bits: 1.0, fallback: false });
        let absent = Pattern::parse(1, "0110").unwrap();
        let l = t.lookup(&absent).unwrap();
        assert!(l.fallback);
        assert_eq!(l.bits, t.max_entry() + 1.0);
        assert_eq!(t.lookup(&absent.complement()).unwrap(), l);
        let block = Pattern::block(&[0; 16]).unwrap();
        assert!(matches!(t.lookup(&block), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn degenerate_space_is_an_error() {
        // Within a single step only machines whose first transition halts
        // produce output; with counts forced empty the table is degenerate.
        let err = CtmTable::from_counts(
            MachineSpace::new(1, 1, 1).unwrap(),
            BTreeMap::new(),
            36,
            0,
        );
        assert!(matches!(err, Err(Error::DegenerateSpace)));
    }
}
