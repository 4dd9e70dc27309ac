//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use dimsig_core::complexity::{bdm_1d, lzw_dict_len, Metric};
use dimsig_core::ctm::enumerate_1d;
use dimsig_core::encodings::{encode, EncodingScheme};
use dimsig_core::landscape::{infer_dims_2d, infer_dims_3d, SpikeParams, DEFAULT_LOSS};
use dimsig_core::perturbation::{
    apply_flips, even_schedule, fixed_boundaries, quantile_sorted, run_flip_experiment,
    scramble_experiment, FlipExperimentPlan, MetricParams,
};
use dimsig_core::{build_table, fixtures, BitSignal, CtmTable, MachineSpace};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within_pp(fraction: f64, target_percent: f64) -> bool {
    (fraction * 100.0 - target_percent).abs() <= 0.01 + 1e-9
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let chars = fixtures::RANDOM_CHARS;
    let vowel = encode(chars, &EncodingScheme::vowel()).unwrap().ones_fraction();
    let space = encode(chars, &EncodingScheme::space()).unwrap().ones_fraction();
    let darwin = encode(fixtures::DARWIN, &EncodingScheme::Utf8).unwrap();
    let balanced = [chars, fixtures::DARWIN]
        .iter()
        .all(|t| encode(t, &EncodingScheme::Balanced).unwrap().ones_fraction() == 0.5);
    let elapsed = start.elapsed();
    let checks = [
        ("vowel 12.19%", within_pp(vowel, 12.19)),
        ("space 1.49%", within_pp(space, 1.49)),
        ("darwin 3216 bits", darwin.len() == 3216),
        ("darwin 45.55%", within_pp(darwin.ones_fraction(), 45.55)),
        ("balanced 50%", balanced),
        ("< 1 s", elapsed < Duration::from_secs(1)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        failed.is_empty(),
        format!(
            "vowel {:.4}% ({} chars), space {:.4}%, darwin {} bits {:.4}% ones, balanced {balanced}; failed: {failed:?}",
            vowel * 100.0,
            chars.chars().count(),
            space * 100.0,
            darwin.len(),
            darwin.ones_fraction() * 100.0
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let x = fixtures::random_binary();
    let mut plan = FlipExperimentPlan::new(even_schedule(x.len(), 32), 0);
    plan.metrics = vec![Metric::Entropy];
    let rows = run_flip_experiment(&x, &plan, None).unwrap();
    let at_zero = rows.iter().find(|r| r.k == 0).unwrap().stats[&Metric::Entropy];
    let worst = rows
        .iter()
        .map(|r| r.stats[&Metric::Entropy].median)
        .fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    let pass = x.ones() * 2 == x.len()
        && at_zero.min == 1.0
        && at_zero.max == 1.0
        && worst >= 0.99
        && elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!("{} bits, entropy at k=0 {}, lowest median {worst:.5}, {elapsed:.2?}", x.len(), at_zero.median),
    )
}

/// Sign-change violations around the maximum of `v`.
fn unimodality_violations(v: &[f64]) -> usize {
    let peak = (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    v.windows(2)
        .enumerate()
        .filter(|(i, w)| if *i < peak { w[1] < w[0] } else { w[1] > w[0] })
        .count()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let table = fixtures::table_1d();
    let mut details = Vec::new();
    let mut pass = true;
    for scheme in [EncodingScheme::Utf8, EncodingScheme::Balanced] {
        let x = encode(fixtures::DARWIN, &scheme).unwrap();
        let s = x.len();
        let mut schedule = even_schedule(s, 32);
        if !schedule.contains(&(s / 2)) {
            schedule.push(s / 2);
            schedule.sort_unstable();
        }
        let mut plan = FlipExperimentPlan::new(schedule, 0);
        plan.metrics = vec![Metric::Bdm];
        let rows = run_flip_experiment(&x, &plan, Some(table)).unwrap();
        let median = |k: usize| rows.iter().find(|r| r.k == k).unwrap().stats[&Metric::Bdm].median;
        let curve: Vec<f64> = rows
            .iter()
            .filter(|r| r.k != s / 2 || even_schedule(s, 32).contains(&r.k))
            .map(|r| r.stats[&Metric::Bdm].median)
            .collect();
        let violations = unimodality_violations(&curve);
        let rises = median(s / 2) > median(0);
        pass &= rises && violations <= 2;
        details.push(format!(
            "{scheme}: BDM k=0 {:.1} k=s/2 {:.1}, {violations} violations",
            median(0),
            median(s / 2)
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(300);
    outcome(pass, format!("{}; {elapsed:.2?}", details.join("; ")))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let params = MetricParams::default();
    let text = fixtures::repetitive_text(4096);
    let x = encode(&text, &EncodingScheme::Utf8).unwrap();
    let cuts = fixed_boundaries(x.len(), 64);
    let s = scramble_experiment(&x, &cuts, 200, 0, Metric::Deflate, None, &params).unwrap();
    let mut sorted = s.values.clone();
    sorted.sort_by(f64::total_cmp);
    let p5 = quantile_sorted(&sorted, 0.05);
    let structured = x.len() >= 4096 && s.original < p5;
    let mid = (0..10u64)
        .filter(|&seed| {
            let r = fixtures::random_signal(4096, seed);
            let cuts = fixed_boundaries(r.len(), 64);
            let s = scramble_experiment(&r, &cuts, 200, seed, Metric::Deflate, None, &params).unwrap();
            (0.05..=0.95).contains(&s.percentile)
        })
        .count();
    let elapsed = start.elapsed();
    outcome(
        structured && mid >= 8 && elapsed < Duration::from_secs(60),
        format!(
            "repetitive {} bits: original {} vs 5th percentile {p5}; random seeds within [0.05, 0.95]: {mid}/10; {elapsed:.2?}",
            x.len(),
            s.original
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let table = fixtures::table_2d();
    let params = SpikeParams::default();
    let x = fixtures::stripe_image().flatten();
    let inf = infer_dims_2d(&x, DEFAULT_LOSS, table, 3, &params).unwrap();
    let top: Vec<String> = inf.candidates.iter().map(|c| c.partition.shape.to_string()).collect();
    let found = top.iter().any(|s| s == "32x64");
    let weak = (0..10u64)
        .filter(|&seed| {
            let r = fixtures::random_signal(x.len(), seed);
            infer_dims_2d(&r, DEFAULT_LOSS, table, 3, &params).unwrap().weak
        })
        .count();
    let elapsed = start.elapsed();
    outcome(
        found && weak >= 8 && elapsed < Duration::from_secs(120),
        format!("stripe top-3 {top:?}; weak on random {weak}/10; {elapsed:.2?}"),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let v = fixtures::ellipsoid_volume();
    let x = v.flatten();
    let inf = infer_dims_3d(&x, DEFAULT_LOSS, fixtures::table_2d(), 3, &SpikeParams::default()).unwrap();
    let triples: Vec<String> = inf.triples.iter().map(|t| t.partition.shape.to_string()).collect();
    let found = triples.iter().any(|s| s == "16x16x16");
    let spikes: Vec<String> = inf.stage1.spikes.iter().map(|c| c.partition.shape.to_string()).collect();
    let multiples = !inf.stage1.spikes.is_empty()
        && inf.stage1.spikes.iter().all(|c| c.partition.shape.cols % 16 == 0);
    let elapsed = start.elapsed();
    outcome(
        found && multiples && elapsed < Duration::from_secs(600),
        format!("top-3 triples {triples:?}; stage-1 spikes {spikes:?}; {elapsed:.2?}"),
    )
}

fn sum_and_symmetry(t: &CtmTable) -> (f64, bool) {
    let sum: f64 = t.entries().map(|(_, k)| 2f64.powf(-k)).sum();
    let symmetric = t.entries().all(|(p, k)| {
        let twin = t.lookup(&p.complement()).unwrap();
        !twin.fallback && twin.bits == k
    });
    (sum, symmetric)
}

fn criterion_7() -> Outcome {
    // 36 machines of one state: 6 halt on "0" and 6 on "1", the rest run away.
    // Symbol relabelling contributes a twin for each.
    let one = build_table(MachineSpace::new(1, 1, 200).unwrap()).unwrap();
    let counts: BTreeMap<String, u64> = one.counts().iter().map(|(p, &c)| (p.to_string(), c)).collect();
    let hand: BTreeMap<String, u64> = [("0".to_string(), 12), ("1".to_string(), 12)].into();
    let hand_ok = counts == hand && one.total_halting() == 24;
    let visited = enumerate_1d(MachineSpace::new(1, 3, 200).unwrap())
        .unwrap()
        .fold(0u64, |n, _| n + 1);
    let (sum1, sym1) = sum_and_symmetry(fixtures::table_1d());
    let (sum2, sym2) = sum_and_symmetry(fixtures::table_2d());
    let pass = hand_ok
        && visited == 14u64.pow(6)
        && (sum1 - 1.0).abs() < 1e-9
        && (sum2 - 1.0).abs() < 1e-9
        && sym1
        && sym2;
    outcome(
        pass,
        format!(
            "1-state table {counts:?}; (3,2) machines visited {visited}; sums {sum1} / {sum2}; complement symmetric {sym1} / {sym2}"
        ),
    )
}

fn lzw_trace(bits: &str) -> usize {
    let mut dict: HashMap<String, ()> = [("0".to_string(), ()), ("1".to_string(), ())].into();
    let mut w = String::new();
    for c in bits.chars() {
        let wc = format!("{w}{c}");
        if dict.contains_key(&wc) {
            w = wc;
        } else {
            dict.insert(wc, ());
            w = c.to_string();
        }
    }
    dict.len()
}

fn criterion_8() -> Outcome {
    let mut lzw_checked = 0u64;
    let mut lzw_ok = lzw_dict_len(&BitSignal::zeros(0)) == 2;
    for len in 1..=16usize {
        for v in 0u32..1 << len {
            let x = BitSignal::from_bools((0..len).rev().map(|i| v >> i & 1 == 1));
            lzw_ok &= lzw_dict_len(&x) == lzw_trace(&x.to_01_string());
            lzw_checked += 1;
        }
    }

    let t = fixtures::table_1d();
    let mut bdm_ok = true;
    for (p, k) in t.entries() {
        let block = p.bits();
        for reps in 1..=12usize {
            let bits: Vec<u8> = block.iter().copied().cycle().take(block.len() * reps).collect();
            let b = bdm_1d(&BitSignal::from_bits(bits).unwrap(), t, block.len(), block.len()).unwrap();
            bdm_ok &= b.bits == k + (reps as f64).log2();
        }
    }

    let mut flip_sets = 0u64;
    let mut flips_ok = true;
    for v in 0u32..256 {
        let x = BitSignal::from_bools((0..8).rev().map(|i| v >> i & 1 == 1));
        for mask in 0u32..256 {
            let set: Vec<usize> = (0..8).filter(|&i| mask >> i & 1 == 1).collect();
            let y = apply_flips(&x, &set).unwrap();
            let zeros = set.iter().filter(|&&i| x.as_slice()[i] == 0).count() as i64;
            let ones = set.len() as i64 - zeros;
            flips_ok &= y.ones() as i64 - x.ones() as i64 == zeros - ones;
            flip_sets += 1;
        }
    }
    outcome(
        lzw_ok && bdm_ok && flips_ok,
        format!(
            "LZW {lzw_checked} signals {lzw_ok}; repeated-block identity over {} entries {bdm_ok}; {flip_sets} flip sets {flips_ok}",
            t.len()
        ),
    )
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn run(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dimsig"))
        .args(args)
        .env_remove("DIMSIG_TABLE")
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

/// CSV/JSON outputs (and table files) in `dir`, excluding manifests.
fn tabular_outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            let name = p.file_name()?.to_str()?.to_string();
            let keep = (name.ends_with(".csv") || name.ends_with(".json") || name.ends_with(".ctm"))
                && !name.ends_with("manifest.json");
            keep.then(|| (name, std::fs::read(&p).unwrap()))
        })
        .collect()
}

fn criterion_9() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let bits = fixture("random_binary.bits");
    let stripe = fixture("stripe_32x64.bits");
    let darwin = fixture("darwin.txt");
    let (b, st, dw) = (bits.to_str().unwrap(), stripe.to_str().unwrap(), darwin.to_str().unwrap());
    let table = root.join("gen").join("t.ctm");
    let commands: Vec<(&str, Vec<String>)> = vec![
        ("ctm gen", vec!["ctm", "gen", "--dims", "2", "--states", "1", "--max-steps", "50", "--out"].into_iter().map(String::from).chain([table.to_str().unwrap().to_string()]).collect()),
        ("encode", ["encode", "--input", dw, "--scheme", "vowel"].map(String::from).to_vec()),
        ("analyze", ["analyze", "--input", st, "--shape", "32x64"].map(String::from).to_vec()),
        ("perturb", ["perturb", "--input", b, "--trials", "64", "--points", "8"].map(String::from).to_vec()),
        ("scramble", ["scramble", "--input", dw, "--trials", "50"].map(String::from).to_vec()),
        ("sweep", ["sweep", "--input", st, "--radar"].map(String::from).to_vec()),
        ("infer 2d", ["infer", "--input", st].map(String::from).to_vec()),
        ("infer 3d", ["infer", "--ndims", "3", "--input", st].map(String::from).to_vec()),
        ("reconstruct", ["reconstruct", "--input", st, "--shape", "32x64"].map(String::from).to_vec()),
    ];
    let mut failures = Vec::new();
    let mut compared = 0;
    for (i, (name, args)) in commands.iter().enumerate() {
        let first = root.join(format!("c{i}_first"));
        let again = root.join(format!("c{i}_again"));
        let mut argv: Vec<&str> = vec!["--threads", "1"];
        argv.extend(args.iter().map(String::as_str));
        let (first_dir, manifest) = if *name == "ctm gen" {
            std::fs::create_dir_all(table.parent().unwrap()).unwrap();
            (table.parent().unwrap().to_path_buf(), PathBuf::from(format!("{}.manifest.json", table.display())))
        } else {
            argv.extend(["--out-dir", first.to_str().unwrap()]);
            (first.clone(), first.join("manifest.json"))
        };
        if let Err(e) = run(&argv) {
            failures.push(e);
            continue;
        }
        if let Err(e) = run(&["--threads", "4", "rerun", "--manifest", manifest.to_str().unwrap(), "--out-dir", again.to_str().unwrap()]) {
            failures.push(e);
            continue;
        }
        let a = tabular_outputs(&first_dir);
        let b = tabular_outputs(&again);
        if a.is_empty() || a != b {
            failures.push(format!("{name}: outputs differ ({:?} vs {:?})", a.keys(), b.keys()));
        }
        compared += a.len();
    }
    outcome(
        failures.is_empty(),
        format!("{} commands, {compared} files compared between 1 and 4 threads; failures: {failures:?}", commands.len()),
    )
}

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("encoding fidelity", criterion_1),
        ("maximal-entropy stability", criterion_2),
        ("concavity of structured inputs", criterion_3),
        ("scramble dominance", criterion_4),
        ("2D inference", criterion_5),
        ("3D inference", criterion_6),
        ("CTM oracle equivalence", criterion_7),
        ("metric oracles", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let label = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let o = check();
        println!("{} {label} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
