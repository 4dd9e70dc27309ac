use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use dimsig_core::complexity::{report, ComplexityReport, Metric, ReportInput, ReportParams};
use dimsig_core::ctm::{load_table, render_table, save_table};
use dimsig_core::encodings::{encode, EncodingScheme};
use dimsig_core::landscape::{
    detect_spikes, family_map, infer_dims_2d, infer_dims_3d, structural_sweep, Landscape,
    Partition, SpikeCandidate, SpikeParams,
};
use dimsig_core::perturbation::{
    even_schedule, fixed_boundaries, flip_description, parse_schedule, run_flip_experiment,
    scramble_description, scramble_experiment, FlipExperimentPlan, MetricParams, TrialSummary,
};
use dimsig_core::reconstruct::{export, orientation_candidates, reshape};
use dimsig_core::{build_table, fixtures, BitSignal, CtmTable, Error, MachineSpace};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::args::*;
use crate::svg;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_)
            | Error::Plan(_)
            | Error::InvalidScheme(_)
            | Error::Boundaries(_)
            | Error::FlipCount { .. }
            | Error::SpikeWindow { .. }
            | Error::InvalidSpace(_)
            | Error::InvalidShape(_)
            | Error::BlockLength { .. }
            | Error::Coverage(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputRecord {
    pub source: String,
    pub bits: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRecord {
    pub source: String,
    pub dims: u8,
    pub states: u8,
    pub max_steps: u32,
    pub entries: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Everything needed to repeat a run. `command` holds the effective value of
/// every parameter, with defaults resolved.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub threads: Option<usize>,
    pub command: Command,
    pub input: Option<InputRecord>,
    pub table: Option<TableRecord>,
    pub outputs: Vec<OutputRecord>,
}

struct Outputs {
    dir: PathBuf,
    records: Vec<OutputRecord>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            records: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let bytes = contents.as_ref();
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
        self.records.push(OutputRecord {
            file: name.to_string(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Data(format!("serialising {name}: {e}")))?;
        text.push('\n');
        self.write(name, text)
    }
}

struct Context {
    threads: Option<usize>,
    input: Option<InputRecord>,
    table: Option<TableRecord>,
}

impl Context {
    fn finish(self, command: Command, outputs: Outputs, manifest_path: PathBuf) -> Result<()> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads: self.threads,
            command,
            input: self.input,
            table: self.table,
            outputs: outputs.records,
        };
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Data(format!("serialising manifest: {e}")))?;
        text.push('\n');
        fs::write(&manifest_path, text).map_err(|e| io_err(&manifest_path, e))
    }
}

pub fn execute(command: Command, threads: Option<usize>) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(command, threads))
}

fn dispatch(command: Command, threads: Option<usize>) -> Result<()> {
    let mut ctx = Context {
        threads,
        input: None,
        table: None,
    };
    match command {
        Command::Ctm(CtmCommand::Gen(a)) => ctm_gen(a, ctx),
        Command::Encode(a) => cmd_encode(a, ctx),
        Command::Analyze(a) => analyze(a, &mut ctx).and_then(|(c, o)| finish(ctx, c, o)),
        Command::Perturb(a) => perturb(a, &mut ctx).and_then(|(c, o)| finish(ctx, c, o)),
        Command::Scramble(a) => scramble(a, &mut ctx).and_then(|(c, o)| finish(ctx, c, o)),
        Command::Sweep(a) => sweep(a, &mut ctx).and_then(|(c, o)| finish(ctx, c, o)),
        Command::Infer(a) => infer(a, &mut ctx).and_then(|(c, o)| finish(ctx, c, o)),
        Command::Reconstruct(a) => {
            reconstruct(a, &mut ctx).and_then(|(c, o)| finish(ctx, c, o))
        }
        Command::Rerun(a) => rerun(a, threads),
    }
}

fn finish(ctx: Context, command: Command, outputs: Outputs) -> Result<()> {
    let path = outputs.dir.join("manifest.json");
    ctx.finish(command, outputs, path)
}

fn rerun(a: RerunArgs, threads: Option<usize>) -> Result<()> {
    let text = fs::read_to_string(&a.manifest).map_err(|e| io_err(&a.manifest, e))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", a.manifest.display())))?;
    let mut command = manifest.command;
    match &mut command {
        Command::Ctm(CtmCommand::Gen(g)) => {
            let name = g
                .out
                .file_name()
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("table.ctm"));
            g.out = a.out_dir.join(name);
        }
        Command::Encode(c) => c.out_dir = a.out_dir.clone(),
        Command::Analyze(c) => c.out_dir = a.out_dir.clone(),
        Command::Perturb(c) => c.output.out_dir = a.out_dir.clone(),
        Command::Scramble(c) => c.output.out_dir = a.out_dir.clone(),
        Command::Sweep(c) => c.output.out_dir = a.out_dir.clone(),
        Command::Infer(c) => c.output.out_dir = a.out_dir.clone(),
        Command::Reconstruct(c) => c.out_dir = a.out_dir.clone(),
        Command::Rerun(_) => return Err(CliError::Data("a manifest cannot record a rerun".into())),
    }
    dispatch(command, threads)
}

fn absolute(path: &Path) -> Result<PathBuf> {
    fs::canonicalize(path).map_err(|e| io_err(path, e))
}

/// Reads the input and pins its path and format to concrete values.
fn load_input(a: &mut InputArgs, ctx: &mut Context) -> Result<BitSignal> {
    let (bytes, source) = match (&a.input, &a.text) {
        (Some(path), _) => {
            let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
            let abs = absolute(path)?;
            a.input = Some(abs.clone());
            (bytes, abs.display().to_string())
        }
        (None, Some(text)) => {
            if a.format == InputFormat::Auto {
                a.format = InputFormat::Text;
            }
            (text.as_bytes().to_vec(), "inline".to_string())
        }
        (None, None) => return Err(CliError::Usage("give --input or --text".into())),
    };
    if a.format == InputFormat::Auto {
        let ext = a
            .input
            .as_deref()
            .and_then(Path::extension)
            .and_then(|e| e.to_str())
            .unwrap_or_default()
            .to_ascii_lowercase();
        a.format = match ext.as_str() {
            "bits" => InputFormat::Bits,
            "txt" => InputFormat::Text,
            _ => InputFormat::Raw,
        };
    }
    let as_text = |bytes: &[u8]| {
        String::from_utf8(bytes.to_vec())
            .map_err(|_| CliError::Data(format!("{source} is not valid UTF-8 text")))
    };
    let signal = match a.format {
        InputFormat::Bits => BitSignal::parse_01(&as_text(&bytes)?)?,
        InputFormat::Raw => BitSignal::from_bytes(&bytes),
        InputFormat::Text => {
            let scheme: EncodingScheme = a.scheme.parse()?;
            encode(&as_text(&bytes)?, &scheme)?
        }
        InputFormat::Auto => unreachable!("resolved above"),
    };
    if signal.is_empty() {
        return Err(CliError::Data(format!("{source} holds no bits")));
    }
    ctx.input = Some(InputRecord {
        source,
        bits: signal.len(),
        sha256: sha256_hex(&bytes),
    });
    Ok(signal)
}

/// Loads `--table` (or `DIMSIG_TABLE`), falling back to the bundled table
/// for `dims`. The resolved path is written back into `t`.
fn load_table_for(t: &mut TableArgs, dims: u8, ctx: &mut Context) -> Result<CtmTable> {
    let (table, source) = match &t.table {
        Some(path) => {
            if !path.exists() {
                return Err(CliError::Data(format!(
                    "CTM table {} not found",
                    path.display()
                )));
            }
            let abs = absolute(path)?;
            let table = load_table(&abs)?;
            t.table = Some(abs.clone());
            (table, abs.display().to_string())
        }
        None => {
            let table = if dims == 1 {
                fixtures::table_1d()
            } else {
                fixtures::table_2d()
            };
            (table.clone(), format!("bundled:{dims}d"))
        }
    };
    if table.dims() != dims {
        return Err(CliError::Data(format!(
            "table {source} is {}D but this command needs a {dims}D table",
            table.dims()
        )));
    }
    let space = table.space();
    ctx.table = Some(TableRecord {
        source,
        dims: space.dims,
        states: space.states,
        max_steps: space.max_steps,
        entries: table.len(),
        sha256: sha256_hex(render_table(&table).as_bytes()),
    });
    Ok(table)
}

fn ctm_gen(mut a: CtmGenArgs, ctx: Context) -> Result<()> {
    let space = MachineSpace::new(a.dims, a.states, a.max_steps)?;
    let table = build_table(space)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    save_table(&table, &a.out)?;
    a.out = absolute(&a.out)?;
    let text = render_table(&table);
    println!(
        "machines={} halting={} halting_fraction={:.6} entries={}",
        table.total_machines(),
        table.total_halting(),
        table.total_halting() as f64 / table.total_machines() as f64,
        table.len()
    );
    let file = a
        .out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let outputs = Outputs {
        dir: a.out.parent().map(Path::to_path_buf).unwrap_or_default(),
        records: vec![OutputRecord {
            file,
            bytes: text.len(),
            sha256: sha256_hex(text.as_bytes()),
        }],
    };
    let manifest_path = PathBuf::from(format!("{}.manifest.json", a.out.display()));
    ctx.finish(Command::Ctm(CtmCommand::Gen(a)), outputs, manifest_path)
}

fn cmd_encode(mut a: EncodeArgs, mut ctx: Context) -> Result<()> {
    match a.input.format {
        InputFormat::Auto | InputFormat::Text => a.input.format = InputFormat::Text,
        other => {
            return Err(CliError::Usage(format!(
                "encode reads text, not {other:?} input"
            )))
        }
    }
    let x = load_input(&mut a.input, &mut ctx)?;
    let scheme: EncodingScheme = a.input.scheme.parse()?;
    let mut out = Outputs::new(&a.out_dir)?;
    let mut bits = String::with_capacity(x.len() + x.len() / 64 + 1);
    for chunk in x.as_slice().chunks(64) {
        bits.extend(chunk.iter().map(|&b| if b == 1 { '1' } else { '0' }));
        bits.push('\n');
    }
    out.write("signal.bits", bits)?;
    out.json(
        "encoding.json",
        &json!({
            "scheme": scheme.to_string(),
            "bits": x.len(),
            "ones": x.ones(),
            "ones_fraction": x.ones_fraction(),
        }),
    )?;
    println!(
        "scheme={scheme} bits={} ones={} ones_fraction={:.6}",
        x.len(),
        x.ones(),
        x.ones_fraction()
    );
    finish(ctx, Command::Encode(a), out)
}

fn analyze(mut a: AnalyzeArgs, ctx: &mut Context) -> Result<(Command, Outputs)> {
    let x = load_input(&mut a.input, ctx)?;
    let grid = match a.shape {
        Some(shape) => Some(reshape(&x, &Partition::new(shape, x.len())?)?),
        None => None,
    };
    let table = if a.metrics.contains(&Metric::Bdm) {
        Some(load_table_for(&mut a.table, if grid.is_some() { 2 } else { 1 }, ctx)?)
    } else {
        None
    };
    let entropy_block = a.entropy_block.unwrap_or(match &grid {
        Some(g) => g.cols(),
        None => 8,
    });
    a.entropy_block = Some(entropy_block);
    let stride = *a.bdm_stride.get_or_insert(if grid.is_some() { 1 } else { 8 });
    let params = ReportParams {
        metrics: a.metrics.clone(),
        entropy_block: Some(entropy_block),
        bdm_block: a.bdm_block,
        bdm_stride: stride,
        original_bits: Some(x.len()),
    };
    let input = match &grid {
        Some(g) => ReportInput::Grid(g),
        None => ReportInput::Signal(&x),
    };
    let r: ComplexityReport = report(input, table.as_ref(), &params)?;
    let mut out = Outputs::new(&a.out_dir)?;
    out.write(
        "report.csv",
        format!("{}\n{}\n", ComplexityReport::CSV_HEADER, r.csv_row()),
    )?;
    out.json("report.json", &json!({ "params": params, "report": r }))?;
    println!("{}\n{}", ComplexityReport::CSV_HEADER, r.csv_row());
    Ok((Command::Analyze(a), out))
}

fn resolve_schedule(spec: Option<&str>, len: usize, points: usize) -> Result<Vec<usize>> {
    match spec {
        None => Ok(even_schedule(len, points)),
        Some(s) if s.contains(':') => Ok(parse_schedule(s)?),
        Some(s) => s
            .split(',')
            .map(|k| {
                k.trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad flip count `{k}` in schedule")))
            })
            .collect(),
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn perturb(mut a: PerturbArgs, ctx: &mut Context) -> Result<(Command, Outputs)> {
    let x = load_input(&mut a.input, ctx)?;
    let schedule = resolve_schedule(a.schedule.as_deref(), x.len(), a.points)?;
    a.schedule = Some(join(&schedule));
    let table = if a.metrics.contains(&Metric::Bdm) {
        Some(load_table_for(&mut a.table, 1, ctx)?)
    } else {
        None
    };
    let plan = FlipExperimentPlan {
        schedule: schedule.clone(),
        trials_per_k: a.trials,
        master_seed: a.seed,
        metrics: a.metrics.clone(),
        metric_params: MetricParams {
            bdm_block: a.bdm_block,
            bdm_stride: a.bdm_stride,
        },
    };
    let summaries = run_flip_experiment(&x, &plan, table.as_ref())?;
    let mut out = Outputs::new(&a.output.out_dir)?;
    let mut csv = format!("{}\n", TrialSummary::CSV_HEADER);
    for s in &summaries {
        for row in s.csv_rows() {
            csv.push_str(&row);
            csv.push('\n');
        }
    }
    out.write("perturb.csv", csv)?;
    let descriptions: Vec<_> = schedule
        .iter()
        .map(|&k| {
            let d = flip_description(x.len(), k);
            json!({ "k": k, "header_bits": d.header_bits, "index_bits": d.index_bits, "total_bits": d.total() })
        })
        .collect();
    out.json(
        "perturb.json",
        &json!({
            "signal_bits": x.len(),
            "ones_fraction": x.ones_fraction(),
            "plan": plan,
            "summaries": summaries,
            "description_lengths": descriptions,
        }),
    )?;
    if a.output.plot {
        for &m in &a.metrics {
            let rows: Vec<_> = summaries.iter().map(|s| (s.k, s.stats[&m])).collect();
            out.write(
                &format!("perturb_{}.svg", m.name()),
                svg::box_plot(&format!("{} under bit flips", m.name()), m.name(), &rows),
            )?;
        }
    }
    Ok((Command::Perturb(a), out))
}

fn scramble(mut a: ScrambleArgs, ctx: &mut Context) -> Result<(Command, Outputs)> {
    let x = load_input(&mut a.input, ctx)?;
    let boundaries = match &a.boundaries {
        Some(b) => b.clone(),
        None => fixed_boundaries(x.len(), a.segment_width),
    };
    a.boundaries = Some(boundaries.clone());
    let table = if a.metric == Metric::Bdm {
        Some(load_table_for(&mut a.table, 1, ctx)?)
    } else {
        None
    };
    let params = MetricParams {
        bdm_block: a.bdm_block,
        bdm_stride: a.bdm_stride,
    };
    let summary = scramble_experiment(
        &x,
        &boundaries,
        a.trials,
        a.seed,
        a.metric,
        table.as_ref(),
        &params,
    )?;
    let segments = boundaries.iter().filter(|&&b| b > 0 && b < x.len()).count() + 1;
    let d = scramble_description(x.len(), segments);
    let mut out = Outputs::new(&a.output.out_dir)?;
    let mut csv = String::from("trial,value\n");
    for (i, v) in summary.values.iter().enumerate() {
        csv.push_str(&format!("{i},{v}\n"));
    }
    out.write("scramble.csv", csv)?;
    out.json(
        "scramble.json",
        &json!({
            "signal_bits": x.len(),
            "segments": segments,
            "metric": summary.metric,
            "original": summary.original,
            "trials": summary.trials,
            "stats": summary.stats,
            "histogram": summary.histogram,
            "fraction_at_or_below": summary.fraction_at_or_below,
            "percentile": summary.percentile,
            "description_length": { "header_bits": d.header_bits, "index_bits": d.index_bits, "total_bits": d.total() },
        }),
    )?;
    println!(
        "original={} median={} percentile={}",
        summary.original, summary.stats.median, summary.percentile
    );
    if a.output.plot {
        out.write(
            "scramble.svg",
            svg::histogram(
                &format!("{} over {} scrambles", a.metric.name(), a.trials),
                a.metric.name(),
                &summary.histogram,
                summary.original,
            ),
        )?;
    }
    Ok((Command::Scramble(a), out))
}

fn spike_params(s: &SpikeArgs) -> SpikeParams {
    SpikeParams {
        window: s.window,
        threshold: s.threshold,
        min_relative_depth: s.min_depth,
    }
}

fn candidate_json(c: &SpikeCandidate) -> serde_json::Value {
    let s = c.partition.shape;
    json!({
        "rank": c.rank,
        "shape": s.to_string(),
        "m": s.rows,
        "n": s.cols,
        "p": s.plane_count(),
        "kept_bits": c.partition.kept_bits,
        "loss": c.partition.loss_fraction,
        "scaled_value": c.scaled_value,
        "depth": c.depth,
    })
}

fn landscape_plot(l: &Landscape, title: &str) -> String {
    let series: Vec<svg::Series> = [Metric::Bdm, Metric::BlockEntropy, Metric::Deflate]
        .into_iter()
        .filter(|m| l.metrics.contains(m))
        .map(|m| svg::Series {
            name: m.name().to_string(),
            points: l
                .points
                .iter()
                .filter_map(|p| p.scaled(m).map(|v| (p.partition.shape.rows as f64, v)))
                .collect(),
        })
        .collect();
    svg::line_plot(title, "rows (m)", "scaled value", &series)
}

fn radar_plot(l: &Landscape, max_points: usize) -> String {
    let metrics: Vec<Metric> = [Metric::Bdm, Metric::BlockEntropy, Metric::Deflate]
        .into_iter()
        .filter(|m| l.metrics.contains(m))
        .collect();
    let full: Vec<_> = l
        .points
        .iter()
        .filter(|p| metrics.iter().all(|&m| p.scaled(m).is_some()))
        .collect();
    let step = full.len().div_ceil(max_points.max(1)).max(1);
    let shown: Vec<_> = full.iter().step_by(step).collect();
    let labels: Vec<String> = shown.iter().map(|p| p.partition.shape.to_string()).collect();
    let series: Vec<(String, Vec<f64>)> = metrics
        .iter()
        .map(|&m| {
            (
                m.name().to_string(),
                shown.iter().map(|p| p.scaled(m).unwrap_or(0.0)).collect(),
            )
        })
        .collect();
    svg::radar("scaled complexity by partition", &labels, &series)
}

fn sweep(mut a: SweepArgs, ctx: &mut Context) -> Result<(Command, Outputs)> {
    let x = load_input(&mut a.input, ctx)?;
    let table = if a.metrics.contains(&Metric::Bdm) {
        Some(load_table_for(&mut a.table, 2, ctx)?)
    } else {
        None
    };
    let l = structural_sweep(&x, a.loss, &a.metrics, table.as_ref())?;
    let params = spike_params(&a.spikes);
    let mut spikes = BTreeMap::new();
    for &m in &a.metrics {
        let n = l.points.iter().filter(|p| p.scaled(m).is_some()).count();
        let found = if n >= params.window {
            detect_spikes(&l, m, &params)?
        } else {
            Vec::new()
        };
        spikes.insert(m.name(), found.iter().map(candidate_json).collect::<Vec<_>>());
    }
    let mut out = Outputs::new(&a.output.out_dir)?;
    out.write("landscape.csv", l.to_csv())?;
    out.json(
        "sweep.json",
        &json!({
            "signal_bits": x.len(),
            "loss_budget": a.loss,
            "metrics": a.metrics,
            "points": l.points.len(),
            "spike_params": params,
            "spikes": spikes,
        }),
    )?;
    if a.output.plot || a.radar {
        out.write("landscape.svg", landscape_plot(&l, "structural sweep"))?;
    }
    if a.radar {
        out.write("radar.svg", radar_plot(&l, a.radar_points))?;
    }
    Ok((Command::Sweep(a), out))
}

fn infer(mut a: InferArgs, ctx: &mut Context) -> Result<(Command, Outputs)> {
    let x = load_input(&mut a.input, ctx)?;
    let table = load_table_for(&mut a.table, 2, ctx)?;
    let params = spike_params(&a.spikes);
    let mut out = Outputs::new(&a.output.out_dir)?;
    if a.ndims == 2 {
        let inf = infer_dims_2d(&x, a.loss, &table, a.top_k, &params)?;
        out.write("landscape.csv", inf.landscape.to_csv())?;
        out.json(
            "inference.json",
            &json!({
                "ndims": 2,
                "signal_bits": x.len(),
                "weak": inf.weak,
                "candidates": inf.candidates.iter().map(candidate_json).collect::<Vec<_>>(),
                "spikes": inf.spikes.iter().map(candidate_json).collect::<Vec<_>>(),
            }),
        )?;
        for c in &inf.candidates {
            println!("{} {}", c.rank, c.partition.shape);
        }
        if a.output.plot {
            out.write("landscape.svg", landscape_plot(&inf.landscape, "2D inference"))?;
        }
    } else {
        let inf = infer_dims_3d(&x, a.loss, &table, a.top_k, &params)?;
        out.write("landscape.csv", inf.stage1.landscape.to_csv())?;
        let mut stage2 = Vec::new();
        for st in &inf.stage2 {
            out.write(&format!("stage2_n{}.csv", st.row_length), st.landscape.to_csv())?;
            stage2.push(json!({
                "row_length": st.row_length,
                "rows": st.rows,
                "weak": st.weak,
                "families": family_map(&st.families),
                "spikes": st.spikes.iter().map(candidate_json).collect::<Vec<_>>(),
            }));
        }
        let triples: Vec<_> = inf
            .triples
            .iter()
            .map(|t| {
                let s = t.partition.shape;
                json!({
                    "rank": t.rank,
                    "shape": s.to_string(),
                    "m": s.rows,
                    "n": s.cols,
                    "p": s.plane_count(),
                    "kept_bits": t.partition.kept_bits,
                    "stage1_rank": t.stage1_rank,
                    "stage1_scaled": t.stage1_scaled,
                    "stage2_rank": t.stage2_rank,
                    "stage2_scaled": t.stage2_scaled,
                })
            })
            .collect();
        out.json(
            "inference.json",
            &json!({
                "ndims": 3,
                "signal_bits": x.len(),
                "stage1": {
                    "weak": inf.stage1.weak,
                    "spikes": inf.stage1.spikes.iter().map(candidate_json).collect::<Vec<_>>(),
                    "families": family_map(&inf.stage1_families),
                },
                "stage2": stage2,
                "triples": triples,
            }),
        )?;
        for t in &inf.triples {
            println!("{} {}", t.rank, t.partition.shape);
        }
        if a.output.plot {
            out.write(
                "landscape.svg",
                landscape_plot(&inf.stage1.landscape, "3D inference, first stage"),
            )?;
        }
    }
    Ok((Command::Infer(a), out))
}

fn reconstruct(mut a: ReconstructArgs, ctx: &mut Context) -> Result<(Command, Outputs)> {
    let x = load_input(&mut a.input, ctx)?;
    let table = load_table_for(&mut a.table, 2, ctx)?;
    let partition = Partition::new(a.shape, x.len())?;
    let grid = reshape(&x, &partition)?;
    let variants = orientation_candidates(&grid, &table)?;
    let (files, listing) = export(&x, &partition, &variants)?;
    let mut out = Outputs::new(&a.out_dir)?;
    for (name, body) in files {
        out.write(&name, body)?;
    }
    out.json("reconstruction.json", &listing)?;
    for v in &listing.variants {
        println!("{} flips={:?} score={}", v.rank, v.flips, v.score);
    }
    Ok((Command::Reconstruct(a), out))
}
