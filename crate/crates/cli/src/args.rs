use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use dsntt::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Random vectors through the pipeline, checked against the naive transform.
    Verify,
    /// One seeded transform with the full cycle report.
    Bench,
    /// Total cycles across digit sizes at a fixed input bandwidth.
    Sweep,
    /// Cyclic convolution through forward, pointwise and inverse passes.
    Convolve,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Verify => "verify",
            Mode::Bench => "bench",
            Mode::Sweep => "sweep",
            Mode::Convolve => "convolve",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Cycle-accurate digit-serial NTT pipeline simulator.
///
/// Exit status: 0 on success, 1 when a result disagrees with its oracle,
/// 2 on configuration or I/O errors.
#[derive(Debug, Clone, Parser)]
#[command(name = "dsntt", version = env!("DSNTT_VERSION"))]
pub struct Args {
    #[arg(long, value_enum, default_value_t = Mode::Verify)]
    pub mode: Mode,

    /// Transform length (power of two). Defaults to the input file length, else 128.
    #[arg(long)]
    pub n: Option<usize>,

    /// Modulus as a decimal integer; must be prime with n | q - 1.
    #[arg(long, conflicts_with = "q_bits")]
    pub q: Option<String>,

    /// Bit length of the smallest NTT-friendly prime to use when --q is absent.
    #[arg(long, default_value_t = 253)]
    pub q_bits: u32,

    /// Digit size in bits.
    #[arg(long, default_value_t = 32)]
    pub d: u32,

    /// Parallel delay-feedback paths (power of two). Ignored by sweep.
    #[arg(long, default_value_t = 8)]
    pub paths: usize,

    #[arg(long, default_value_t = Direction::Forward)]
    pub direction: Direction,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Random vectors for verify.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Require d * paths to equal this many bits per cycle. Sweep defaults to 256.
    #[arg(long)]
    pub bandwidth: Option<u64>,

    /// Digit sizes for sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [16u32, 32, 64, 128])]
    pub digits: Vec<u32>,

    /// Coefficient vector document {"q", "n", "values"} for convolve.
    #[arg(long, requires = "input_b")]
    pub input_a: Option<PathBuf>,

    #[arg(long, requires = "input_a")]
    pub input_b: Option<PathBuf>,

    /// Cycles per processing element of each multiplier.
    #[arg(long, default_value_t = 4)]
    pub pe_latency: u32,

    /// Emit outputs in natural order instead of bit-reversed order.
    #[arg(long)]
    pub reorder_output: bool,

    /// Write a per-cycle trace of the bench run (CSV, or JSON lines for a .jsonl path).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}
