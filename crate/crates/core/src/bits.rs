//! Flat bit signals and the 2D/3D grids they can be folded into.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered sequence of bits. Every stored byte is either 0 or 1.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitSignal {
    bits: Vec<u8>,
}

impl BitSignal {
    /// Builds a signal from values that must all be 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(i) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidPattern(format!(
                "value {} at index {i} is not a bit",
                bits[i]
            )));
        }
        Ok(Self { bits })
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().map(u8::from).collect(),
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![0; len] }
    }

    /// Expands bytes MSB-first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut bits = Vec::with_capacity(bytes.len() * 8);
        for &byte in bytes {
            for shift in (0..8).rev() {
                bits.push((byte >> shift) & 1);
            }
        }
        Self { bits }
    }

    /// Parses ASCII `0`/`1`, ignoring whitespace.
    pub fn parse_01(text: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(text.len());
        for (i, ch) in text.chars().enumerate() {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                c if c.is_whitespace() => {}
                c => {
                    return Err(Error::InvalidPattern(format!(
                        "unexpected character {c:?} at offset {i}"
                    )))
                }
            }
        }
        Ok(Self { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.bits
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.bits.get(i).copied()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn ones_fraction(&self) -> f64 {
        if self.bits.is_empty() {
            0.0
        } else {
            self.ones() as f64 / self.bits.len() as f64
        }
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| b ^ 1).collect(),
        }
    }

    /// The first `len` bits (or the whole signal when shorter).
    pub fn prefix(&self, len: usize) -> Self {
        Self {
            bits: self.bits[..len.min(self.bits.len())].to_vec(),
        }
    }

    pub fn concat(&self, other: &BitSignal) -> Self {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }

    /// Packs MSB-first; the final byte is zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | (b << (7 - i)))
            })
            .collect()
    }

    pub fn to_01_string(&self) -> String {
        self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for BitSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_01_string())
    }
}

impl fmt::Debug for BitSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.len() <= 64 {
            write!(f, "BitSignal({})", self.to_01_string())
        } else {
            write!(f, "BitSignal({} bits, {} ones)", self.len(), self.ones())
        }
    }
}

impl FromStr for BitSignal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_01(s)
    }
}

/// Dimension lengths of a 2D (`planes == None`) or 3D shape.
///
/// Cells are laid out row-major within a plane, planes one after another.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Shape {
    pub rows: usize,
    pub cols: usize,
    pub planes: Option<usize>,
}

impl Shape {
    pub fn d2(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            planes: None,
        }
    }

    pub fn d3(rows: usize, cols: usize, planes: usize) -> Self {
        Self {
            rows,
            cols,
            planes: Some(planes),
        }
    }

    pub fn ndims(&self) -> usize {
        if self.planes.is_some() {
            3
        } else {
            2
        }
    }

    pub fn plane_count(&self) -> usize {
        self.planes.unwrap_or(1)
    }

    pub fn volume(&self) -> usize {
        self.rows * self.cols * self.plane_count()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 || self.planes == Some(0) {
            return Err(Error::InvalidShape(format!("{self} has a zero dimension")));
        }
        Ok(())
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.planes {
            Some(p) => write!(f, "{}x{}x{}", self.rows, self.cols, p),
            None => write!(f, "{}x{}", self.rows, self.cols),
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    /// `RxC` or `RxCxP`.
    fn from_str(s: &str) -> Result<Self> {
        let dims: Vec<usize> = s
            .split('x')
            .map(|d| d.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidShape(format!("cannot parse shape `{s}`")))?;
        let shape = match dims.as_slice() {
            [r, c] => Shape::d2(*r, *c),
            [r, c, p] => Shape::d3(*r, *c, *p),
            _ => return Err(Error::InvalidShape(format!("cannot parse shape `{s}`"))),
        };
        shape.validate()?;
        Ok(shape)
    }
}

/// A binary grid, 2D or 3D.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    shape: Shape,
    cells: Vec<u8>,
}

impl Grid {
    pub fn new(shape: Shape, cells: Vec<u8>) -> Result<Self> {
        shape.validate()?;
        if cells.len() != shape.volume() {
            return Err(Error::InvalidShape(format!(
                "{shape} needs {} cells, got {}",
                shape.volume(),
                cells.len()
            )));
        }
        if cells.iter().any(|&b| b > 1) {
            return Err(Error::InvalidPattern("grid cell is not a bit".into()));
        }
        Ok(Self { shape, cells })
    }

    pub fn zeros(shape: Shape) -> Result<Self> {
        shape.validate()?;
        Ok(Self {
            shape,
            cells: vec![0; shape.volume()],
        })
    }

    /// Builds a grid by evaluating `f(plane, row, col)` for every cell.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(usize, usize, usize) -> bool) -> Result<Self> {
        shape.validate()?;
        let mut cells = Vec::with_capacity(shape.volume());
        for p in 0..shape.plane_count() {
            for r in 0..shape.rows {
                for c in 0..shape.cols {
                    cells.push(u8::from(f(p, r, c)));
                }
            }
        }
        Ok(Self { shape, cells })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn rows(&self) -> usize {
        self.shape.rows
    }

    pub fn cols(&self) -> usize {
        self.shape.cols
    }

    pub fn planes(&self) -> usize {
        self.shape.plane_count()
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn get(&self, plane: usize, row: usize, col: usize) -> u8 {
        self.cells[(plane * self.shape.rows + row) * self.shape.cols + col]
    }

    /// One (rows x cols) plane as its own 2D grid.
    pub fn plane(&self, plane: usize) -> Grid {
        let size = self.shape.rows * self.shape.cols;
        Grid {
            shape: Shape::d2(self.shape.rows, self.shape.cols),
            cells: self.cells[plane * size..(plane + 1) * size].to_vec(),
        }
    }

    pub fn complement(&self) -> Grid {
        Grid {
            shape: self.shape,
            cells: self.cells.iter().map(|b| b ^ 1).collect(),
        }
    }

    pub fn flatten(&self) -> BitSignal {
        BitSignal {
            bits: self.cells.clone(),
        }
    }

    pub fn ones(&self) -> usize {
        self.cells.iter().filter(|&&b| b == 1).count()
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid({}, {} ones)", self.shape, self.ones())
    }
}
