use std::collections::HashMap;

use dimsig_core::complexity::{
    bdm_1d, bdm_2d, bdm_3d, block_entropy, deflate_b64_len, lzw_dict_len, report, shannon_entropy,
    Metric, ReportInput, ReportParams,
};
use dimsig_core::{fixtures, BitSignal, Grid, Pattern, Shape};
use proptest::prelude::*;

/// String-keyed LZW trace: the dictionary grows by `w + c` on every miss.
fn lzw_trace(bits: &str) -> usize {
    let mut dict: HashMap<String, usize> = HashMap::new();
    dict.insert("0".into(), 0);
    dict.insert("1".into(), 1);
    let mut w = String::new();
    for c in bits.chars() {
        let wc = format!("{w}{c}");
        if dict.contains_key(&wc) {
            w = wc;
        } else {
            let next = dict.len();
            dict.insert(wc, next);
            w = c.to_string();
        }
    }
    dict.len()
}

fn signal(len: usize, v: u32) -> BitSignal {
    BitSignal::from_bools((0..len).rev().map(|i| v >> i & 1 == 1))
}

#[test]
fn lzw_matches_trace_for_every_short_signal() {
    assert_eq!(lzw_dict_len(&BitSignal::zeros(0)), 2);
    for len in 1..=16 {
        for v in 0..1u32 << len {
            let x = signal(len, v);
            assert_eq!(lzw_dict_len(&x), lzw_trace(&x.to_01_string()), "{x}");
        }
    }
}

#[test]
fn lzw_hand_traces() {
    assert_eq!(lzw_trace("01"), 3);
    assert_eq!(lzw_trace("0000"), 4);
}

#[test]
fn entropy_examples() {
    assert_eq!(shannon_entropy(&fixtures::random_binary()).unwrap(), 1.0);
    assert_eq!(shannon_entropy(&BitSignal::zeros(77)).unwrap(), 0.0);
    let quarter: BitSignal = "0001".repeat(10).parse().unwrap();
    let direct = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
    assert!((shannon_entropy(&quarter).unwrap() - direct).abs() < 1e-12);
    assert!((direct - 0.811278).abs() < 1e-6);
    assert!(shannon_entropy(&BitSignal::zeros(0)).is_err());
}

#[test]
fn block_entropy_examples() {
    let be = |s: &str, b| block_entropy(&s.parse().unwrap(), b).unwrap();
    assert_eq!(be("01010101", 2), 0.0);
    assert_eq!(be("0011", 2), 1.0);
    assert!((be("010011", 2) - 3f64.log2()).abs() < 1e-12);
    assert!(block_entropy(&"01".parse().unwrap(), 3).is_err());
}

#[test]
fn bdm_repeated_block_identity_is_exact() {
    let t = fixtures::table_1d();
    for (p, k) in t.entries().filter(|(p, _)| p.len() >= 3).take(40) {
        let block = p.bits();
        for reps in [1usize, 2, 3, 5, 8, 13] {
            let bits: Vec<u8> = block.iter().copied().cycle().take(block.len() * reps).collect();
            let x = BitSignal::from_bits(bits).unwrap();
            let b = bdm_1d(&x, t, block.len(), block.len()).unwrap();
            assert_eq!(b.bits, k + (reps as f64).log2(), "{p} x{reps}");
            assert_eq!(b.windows, reps);
            assert_eq!(b.fallback_windows, 0);
        }
    }
}

#[test]
fn bdm_trailing_remainder_is_discarded() {
    let t = fixtures::table_1d();
    let x: BitSignal = "0110100".parse().unwrap();
    let b = bdm_1d(&x, t, 3, 3).unwrap();
    assert_eq!(b.windows, 2);
    let b = bdm_1d(&x, t, 3, 1).unwrap();
    assert_eq!(b.windows, 5);
    assert!(bdm_1d(&x, t, 17, 1).is_err());
}

#[test]
fn bdm_2d_and_3d_examples() {
    let t = fixtures::table_2d();
    let zero_block = t.lookup(&Pattern::Block(0)).unwrap().bits;
    let g = Grid::zeros(Shape::d2(8, 8)).unwrap();
    let b = bdm_2d(&g, t, 1).unwrap();
    assert_eq!(b.windows, 25);
    assert_eq!(b.bits, zero_block + 25f64.log2());

    let small = Grid::from_fn(Shape::d2(4, 4), |_, r, c| r == c).unwrap();
    let b = bdm_2d(&small, t, 1).unwrap();
    let cells: Vec<u8> = small.cells().to_vec();
    assert_eq!(b.windows, 1);
    assert_eq!(b.bits, t.lookup(&Pattern::block(&cells).unwrap()).unwrap().bits);

    let v = Grid::zeros(Shape::d3(8, 8, 2)).unwrap();
    let b = bdm_3d(&v, t).unwrap();
    assert_eq!(b.windows, 50);
    assert_eq!(b.bits, 2.0 * (zero_block + 25f64.log2()));

    let g = fixtures::stripe_image();
    let flat = Grid::new(Shape::d3(32, 64, 1), g.cells().to_vec()).unwrap();
    assert_eq!(bdm_3d(&flat, t).unwrap(), bdm_2d(&g, t, 1).unwrap());
    assert!(bdm_2d(&Grid::zeros(Shape::d2(3, 9)).unwrap(), t, 1).is_err());
}

#[test]
fn bdm_3d_ignores_plane_order() {
    let t = fixtures::table_2d();
    let v = fixtures::ellipsoid_volume();
    let p = v.planes();
    let reversed = Grid::from_fn(v.shape(), |pl, r, c| v.get(p - 1 - pl, r, c) == 1).unwrap();
    assert_eq!(bdm_3d(&v, t).unwrap(), bdm_3d(&reversed, t).unwrap());
}

#[test]
fn deflate_orders_structure_below_noise() {
    let zeros = BitSignal::zeros(4096);
    let noise = fixtures::random_signal(4096, 7);
    assert!(deflate_b64_len(&zeros) < deflate_b64_len(&noise));
    assert_eq!(deflate_b64_len(&noise), deflate_b64_len(&noise));
}

#[test]
fn lzw_and_bdm_are_not_permutation_invariant() {
    let t = fixtures::table_1d();
    let sorted: BitSignal = format!("{}{}", "0".repeat(64), "1".repeat(64)).parse().unwrap();
    let mixed: BitSignal = "01".repeat(64).parse().unwrap();
    assert_eq!(shannon_entropy(&sorted).unwrap(), shannon_entropy(&mixed).unwrap());
    let shuffled = fixtures::random_signal(128, 3);
    let ones = shuffled.ones();
    let packed = BitSignal::from_bools((0..128).map(|i| i < ones));
    assert_ne!(lzw_dict_len(&shuffled), lzw_dict_len(&packed));
    assert_ne!(
        bdm_1d(&shuffled, t, 8, 8).unwrap().bits,
        bdm_1d(&packed, t, 8, 8).unwrap().bits
    );
}

#[test]
fn report_normalises_deflate_by_kept_ratio() {
    let x = fixtures::random_signal(4096, 1);
    let r = report(ReportInput::Signal(&x), Some(fixtures::table_1d()), &ReportParams::default())
        .unwrap();
    assert!(r.entropy.is_some() && r.lzw_dict_len.is_some() && r.bdm.is_some());
    assert_eq!(r.normalized_deflate, r.deflate_b64_len.map(|d| d as f64));
    let params = ReportParams {
        metrics: vec![Metric::Deflate],
        original_bits: Some(4096),
        ..ReportParams::default()
    };
    let kept = x.prefix(4055);
    let r = report(ReportInput::Signal(&kept), None, &params).unwrap();
    let d = r.deflate_b64_len.unwrap() as f64;
    assert_eq!(r.normalized_deflate.unwrap(), d / (4055.0 / 4096.0));
}

fn bits(max: usize) -> impl Strategy<Value = BitSignal> {
    prop::collection::vec(any::<bool>(), 1..max).prop_map(BitSignal::from_bools)
}

proptest! {
    #[test]
    fn entropy_bounded_and_complement_invariant(x in bits(300)) {
        let h = shannon_entropy(&x).unwrap();
        prop_assert!((0.0..=1.0).contains(&h));
        prop_assert_eq!(h, shannon_entropy(&x.complement()).unwrap());
        prop_assert_eq!(h == 1.0, 2 * x.ones() == x.len());
    }

    #[test]
    fn bdm_1d_complement_invariant(x in bits(400), block in 1usize..=12, stride in 1usize..=12) {
        let t = fixtures::table_1d();
        prop_assume!(x.len() >= block);
        prop_assert_eq!(bdm_1d(&x, t, block, stride).unwrap(), bdm_1d(&x.complement(), t, block, stride).unwrap());
    }

    #[test]
    fn bdm_2d_complement_invariant(rows in 4usize..12, cols in 4usize..12, seed in any::<u64>()) {
        let t = fixtures::table_2d();
        let x = fixtures::random_signal(rows * cols, seed);
        let g = Grid::new(Shape::d2(rows, cols), x.as_slice().to_vec()).unwrap();
        prop_assert_eq!(bdm_2d(&g, t, 1).unwrap(), bdm_2d(&g.complement(), t, 1).unwrap());
        prop_assert_eq!(bdm_2d(&g, t, 1).unwrap().windows, (rows - 3) * (cols - 3));
    }

    #[test]
    fn repeated_block_has_zero_block_entropy(block in bits(10), reps in 1usize..20) {
        let b = block.len();
        let bits: Vec<u8> = block.as_slice().iter().copied().cycle().take(b * reps).collect();
        prop_assert_eq!(block_entropy(&BitSignal::from_bits(bits).unwrap(), b).unwrap(), 0.0);
    }

    #[test]
    fn deflate_length_is_padded_base64(x in bits(2000)) {
        prop_assert_eq!(deflate_b64_len(&x) % 4, 0);
    }
}
