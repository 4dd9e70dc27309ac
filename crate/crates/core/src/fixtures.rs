//! Bundled reference inputs, default tables and synthetic generators.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{BitSignal, Grid, Shape};
use crate::ctm::{parse_table, CtmTable};

/// 402 random bits, 201 of them ones.
pub const RANDOM_BINARY: &str = include_str!("../fixtures/random_binary.bits");
/// A string of characters sampled at random from the printable ASCII range.
pub const RANDOM_CHARS: &str = include_str!("../fixtures/random_chars.txt");
/// 402 characters of English prose.
pub const DARWIN: &str = include_str!("../fixtures/darwin.txt");
/// The 32x64 stripe image, row-major.
pub const STRIPE_BITS: &str = include_str!("../fixtures/stripe_32x64.bits");

pub const TABLE_1D_TEXT: &str = include_str!("../data/ctm_1d_3state.ctm");
pub const TABLE_2D_TEXT: &str = include_str!("../data/ctm_2d_2state.ctm");

/// The bundled 3-state 1D table (200-step budget).
pub fn table_1d() -> &'static CtmTable {
    static T: OnceLock<CtmTable> = OnceLock::new();
    T.get_or_init(|| parse_table(TABLE_1D_TEXT).expect("bundled 1D table is valid"))
}

/// The bundled 2-state 2D table (200-step budget).
pub fn table_2d() -> &'static CtmTable {
    static T: OnceLock<CtmTable> = OnceLock::new();
    T.get_or_init(|| parse_table(TABLE_2D_TEXT).expect("bundled 2D table is valid"))
}

pub fn random_binary() -> BitSignal {
    BitSignal::parse_01(RANDOM_BINARY).expect("fixture is 0/1 text")
}

pub const STRIPE_ROWS: usize = 32;
pub const STRIPE_COLS: usize = 64;

/// Widths of the alternating on/off stripes, left to right.
pub const STRIPE_WIDTHS: [usize; 12] = [4, 6, 4, 8, 5, 4, 7, 4, 5, 6, 4, 7];

/// Vertical stripes of uneven width (starting with an "on" stripe), inverted
/// on rows 10 to 17.
pub fn stripe_image() -> Grid {
    let mut profile = Vec::with_capacity(STRIPE_COLS);
    for (i, &w) in STRIPE_WIDTHS.iter().enumerate() {
        profile.extend(std::iter::repeat(i % 2 == 0).take(w));
    }
    Grid::from_fn(Shape::d2(STRIPE_ROWS, STRIPE_COLS), |_, r, c| {
        profile[c] ^ (10..18).contains(&r)
    })
    .expect("valid shape")
}

pub const VOLUME_SIDE: usize = 16;

/// A solid axis-aligned ellipsoid with semi-axes 6 (cols), 5 (rows) and 7
/// (planes) centred in a 16x16x16 volume.
pub fn ellipsoid_volume() -> Grid {
    let c0 = (VOLUME_SIDE as f64 - 1.0) / 2.0;
    let side = VOLUME_SIDE;
    Grid::from_fn(Shape::d3(side, side, side), |p, r, c| {
        let dx = (c as f64 - c0) / 6.0;
        let dy = (r as f64 - c0) / 5.0;
        let dz = (p as f64 - c0) / 7.0;
        dx * dx + dy * dy + dz * dz <= 1.0
    })
    .expect("valid shape")
}

/// Uniform random bits from a ChaCha8 stream.
pub fn random_signal(len: usize, seed: u64) -> BitSignal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BitSignal::from_bools((0..len).map(|_| rng.gen::<bool>()))
}

/// A short phrase repeated until `min_bits` is reached, 8 bits per character.
pub fn repetitive_text(min_bits: usize) -> String {
    const PHRASE: &str = "the quick brown fox jumps over the lazy dog. ";
    PHRASE.chars().cycle().take(min_bits.div_ceil(8)).collect()
}
