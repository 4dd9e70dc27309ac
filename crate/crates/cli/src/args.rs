use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dimsig_core::complexity::Metric;
use dimsig_core::Shape;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "dimsig", version, about = "Complexity landscapes and shape inference for flat bit streams")]
pub struct Cli {
    /// Worker threads (defaults to the number of CPUs). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// CTM table tools.
    #[command(subcommand)]
    Ctm(CtmCommand),
    /// Binarise text with one of the encoding schemes.
    Encode(EncodeArgs),
    /// Compute the complexity report of a signal.
    Analyze(AnalyzeArgs),
    /// Bit-flip perturbation experiment.
    Perturb(PerturbArgs),
    /// Segment-scramble experiment.
    Scramble(ScrambleArgs),
    /// Structural sweep over 2D partitions.
    Sweep(SweepArgs),
    /// Infer 2D or 3D dimensions.
    Infer(InferArgs),
    /// Reshape into a given shape and rank its mirror orientations.
    Reconstruct(ReconstructArgs),
    /// Repeat a run from its manifest into a new output directory.
    Rerun(RerunArgs),
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CtmCommand {
    /// Enumerate a machine space and write its table.
    Gen(CtmGenArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CtmGenArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub dims: u8,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..))]
    pub states: u8,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_steps: u32,
    /// Table file to write; its manifest goes to `<out>.manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    /// `.bits` is 0/1 text, `.txt` is encoded text, anything else raw bytes.
    Auto,
    Bits,
    Raw,
    Text,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct InputArgs {
    /// Input file.
    #[arg(long, required_unless_present = "text", conflicts_with = "text")]
    pub input: Option<PathBuf>,
    /// Inline text, encoded with `--scheme`.
    #[arg(long)]
    pub text: Option<String>,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,
    /// utf8 | balanced | vowel | space | set:<chars>
    #[arg(long, default_value = "utf8")]
    pub scheme: String,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct TableArgs {
    /// CTM table file; the bundled table for the needed dimension otherwise.
    #[arg(long, env = "DIMSIG_TABLE")]
    pub table: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct OutputArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Also write SVG plots.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub table: TableArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [Metric::Entropy, Metric::BlockEntropy, Metric::Lzw, Metric::Deflate, Metric::Bdm])]
    pub metrics: Vec<Metric>,
    /// Block entropy block length (default: 8, or the grid width).
    #[arg(long)]
    pub entropy_block: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub bdm_block: usize,
    /// BDM window stride (default: 8, or 1 for grids).
    #[arg(long)]
    pub bdm_stride: Option<usize>,
    /// Analyse as a grid of this shape (`RxC` or `RxCxP`) with 2D BDM.
    #[arg(long)]
    pub shape: Option<Shape>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PerturbArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub table: TableArgs,
    /// `start:end:step`; 32 evenly spaced counts over 0..=s otherwise.
    #[arg(long)]
    pub schedule: Option<String>,
    #[arg(long, default_value_t = 32)]
    pub points: usize,
    #[arg(long, default_value_t = 1024)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [Metric::Entropy, Metric::Lzw, Metric::Bdm, Metric::Deflate])]
    pub metrics: Vec<Metric>,
    #[arg(long, default_value_t = 8)]
    pub bdm_block: usize,
    #[arg(long, default_value_t = 8)]
    pub bdm_stride: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ScrambleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub table: TableArgs,
    /// Comma-separated cut points.
    #[arg(long, value_delimiter = ',', conflicts_with = "segment_width")]
    pub boundaries: Option<Vec<usize>>,
    /// Cut every this many bits when no boundaries are given.
    #[arg(long, default_value_t = 64)]
    pub segment_width: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = Metric::Deflate)]
    pub metric: Metric,
    #[arg(long, default_value_t = 8)]
    pub bdm_block: usize,
    #[arg(long, default_value_t = 8)]
    pub bdm_stride: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SpikeArgs {
    #[arg(long, default_value_t = dimsig_core::landscape::DEFAULT_WINDOW)]
    pub window: usize,
    #[arg(long, default_value_t = dimsig_core::landscape::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Minimum dip below the raw landscape median, as a fraction of it.
    #[arg(long, default_value_t = dimsig_core::landscape::DEFAULT_MIN_RELATIVE_DEPTH)]
    pub min_depth: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub table: TableArgs,
    #[arg(long, default_value_t = dimsig_core::landscape::DEFAULT_LOSS)]
    pub loss: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [Metric::Bdm, Metric::BlockEntropy, Metric::Deflate])]
    pub metrics: Vec<Metric>,
    #[command(flatten)]
    pub spikes: SpikeArgs,
    /// Also write a radar plot (implies plotting).
    #[arg(long)]
    pub radar: bool,
    /// Most partitions shown on the radar plot; evenly subsampled.
    #[arg(long, default_value_t = 48)]
    pub radar_points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct InferArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub table: TableArgs,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub ndims: u8,
    #[arg(long, default_value_t = dimsig_core::landscape::DEFAULT_LOSS)]
    pub loss: f64,
    #[arg(long, default_value_t = 3)]
    pub top_k: usize,
    #[command(flatten)]
    pub spikes: SpikeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub table: TableArgs,
    /// `RxC` or `RxCxP`.
    #[arg(long)]
    pub shape: Shape,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct RerunArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}
