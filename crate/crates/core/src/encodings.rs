//! Text binarizers: 8-bit, balanced 16-bit, and per-character indicators.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::bits::BitSignal;
use crate::error::{Error, Result};

pub const VOWELS: &str = "AaEeIiOoUu";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EncodingScheme {
    /// One byte per character, MSB-first.
    Utf8,
    /// The byte followed by its bitwise complement: 16 bits, always half ones.
    Balanced,
    /// One bit per character: 1 iff the character is in the set.
    Indicator(BTreeSet<char>),
}

impl EncodingScheme {
    pub fn indicator(chars: &str) -> Result<Self> {
        let set: BTreeSet<char> = chars.chars().collect();
        if set.is_empty() {
            return Err(Error::InvalidScheme("indicator set is empty".into()));
        }
        Ok(Self::Indicator(set))
    }

    pub fn vowel() -> Self {
        Self::indicator(VOWELS).expect("non-empty")
    }

    pub fn space() -> Self {
        Self::indicator(" ").expect("non-empty")
    }
}

impl FromStr for EncodingScheme {
    type Err = Error;

    /// `utf8 | balanced | vowel | space | set:<chars>`
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "utf8" => Ok(Self::Utf8),
            "balanced" => Ok(Self::Balanced),
            "vowel" => Ok(Self::vowel()),
            "space" => Ok(Self::space()),
            other => match other.strip_prefix("set:") {
                Some(chars) => Self::indicator(chars),
                None => Err(Error::InvalidScheme(format!("unknown scheme `{other}`"))),
            },
        }
    }
}

impl fmt::Display for EncodingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Utf8 => f.write_str("utf8"),
            Self::Balanced => f.write_str("balanced"),
            Self::Indicator(set) => {
                let chars: String = set.iter().collect();
                if chars == " " {
                    f.write_str("space")
                } else if *set == VOWELS.chars().collect::<BTreeSet<_>>() {
                    f.write_str("vowel")
                } else {
                    write!(f, "set:{chars}")
                }
            }
        }
    }
}

fn single_byte(ch: char, index: usize) -> Result<u8> {
    if ch.is_ascii() {
        Ok(ch as u8)
    } else {
        Err(Error::MultiByte { ch, index })
    }
}

fn push_byte(bits: &mut Vec<u8>, byte: u8) {
    for shift in (0..8).rev() {
        bits.push((byte >> shift) & 1);
    }
}

pub fn encode(text: &str, scheme: &EncodingScheme) -> Result<BitSignal> {
    let mut bits = Vec::new();
    for (i, ch) in text.chars().enumerate() {
        match scheme {
            EncodingScheme::Utf8 => push_byte(&mut bits, single_byte(ch, i)?),
            EncodingScheme::Balanced => {
                let b = single_byte(ch, i)?;
                push_byte(&mut bits, b);
                push_byte(&mut bits, !b);
            }
            EncodingScheme::Indicator(set) => bits.push(u8::from(set.contains(&ch))),
        }
    }
    BitSignal::from_bits(bits)
}

pub fn decode(x: &BitSignal, scheme: &EncodingScheme) -> Result<String> {
    let unit = match scheme {
        EncodingScheme::Utf8 => 8,
        EncodingScheme::Balanced => 16,
        EncodingScheme::Indicator(_) => return Err(Error::NonInvertible),
    };
    if x.len() % unit != 0 {
        return Err(Error::Misaligned { len: x.len(), unit });
    }
    let bytes = x.to_bytes();
    let mut text = String::with_capacity(x.len() / unit);
    for (i, chunk) in bytes.chunks(unit / 8).enumerate() {
        if unit == 16 && chunk[1] != !chunk[0] {
            return Err(Error::BalancedIntegrity(i));
        }
        if !chunk[0].is_ascii() {
            return Err(Error::InvalidScheme(format!(
                "byte {:#04x} at character index {i} is not a single-byte character",
                chunk[0]
            )));
        }
        text.push(chunk[0] as char);
    }
    Ok(text)
}
