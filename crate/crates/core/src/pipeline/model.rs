use serde::Serialize;

use crate::params::Direction;
use crate::word::Word;

use super::PipelineConfig;

/// Closed-form cycle count, itemized.
///
/// Cycle 0 carries the first input digit. With `n_local = n / paths`,
/// `nd` digits per word and multiplier latency `L`:
///
/// * input streaming: `n_local * nd`
/// * delay-feedback fill: stage `s` emits its first digit
///   `B_s * nd + 1 + L` cycles after receiving its first, `B_s = n_local / 2^(s+1)`;
///   summed, `(n_local - 1) * nd + log2(n_local) * (1 + L)`
/// * merge: `log2(paths) * (1 + L)`
/// * exit: `L` for the by-one multiplier plus `nd` for the corrector
///
/// The last output digit leaves `n_local * nd - 1` cycles after the first,
/// so `total = 2 * n_local * nd + log2(n) * (1 + L) + L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CyclePrediction {
    pub streaming: u64,
    pub sdf_fill: u64,
    pub merge: u64,
    pub exit: u64,
    /// Cycle of the first output digit.
    pub first_output: u64,
    pub total: u64,
}

pub fn cycle_model<W: Word>(cfg: &PipelineConfig<W>) -> CyclePrediction {
    let n = cfg.domain.n() as u64;
    let paths = cfg.paths as u64;
    let n_local = n / paths;
    let nd = cfg.domain.ctx().num_digits() as u64;
    let l = u64::from(cfg.pe_latency) * nd;
    let sdf_stages = u64::from(n_local.trailing_zeros());
    let merge_layers = u64::from(paths.trailing_zeros());

    let streaming = n_local * nd;
    let sdf_fill = (n_local - 1) * nd + sdf_stages * (1 + l);
    let merge = merge_layers * (1 + l);
    let exit = l + nd;
    let first_output = sdf_fill + merge + exit;
    CyclePrediction {
        streaming,
        sdf_fill,
        merge,
        exit,
        first_output,
        total: first_output + streaming,
    }
}

/// Activity of one delay-feedback stage over a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageStats {
    pub path: usize,
    pub stage: usize,
    /// Cycles in which the stage multiplier accepted a digit.
    pub busy_cycles: u64,
    pub busy_fraction: f64,
    pub max_buffer_occupancy: usize,
    pub buffer_capacity: usize,
    /// First cycle spent in the compute phase.
    pub first_compute_cycle: Option<u64>,
}

/// Activity of one merge layer over a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeStats {
    pub layer: usize,
    pub busy_cycles: u64,
    pub busy_fraction: f64,
}

/// Configuration echoed into every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub q: String,
    pub q_bits: u32,
    pub d: u32,
    pub r_exp: u32,
    pub num_digits: usize,
    pub paths: usize,
    pub direction: Direction,
    pub pe_latency: u32,
    pub reorder_output: bool,
    pub bandwidth_bits: u64,
    pub word: &'static str,
}

/// Measurements of one simulated transform.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    /// Cycle 0 through the cycle of the last output digit, inclusive.
    pub total_cycles: u64,
    pub predicted: CyclePrediction,
    /// Cycle of the first output digit.
    pub fill_latency: u64,
    /// Cycles after the last input digit until the run ends.
    pub drain_latency: u64,
    /// Montgomery entry is done when the input is loaded; it costs no cycles.
    pub entry_cycles: u64,
    /// By-one multiplier plus corrector.
    pub exit_cycles: u64,
    pub multiplier_latency: u64,
    pub input_window_cycles: u64,
    pub input_bits: u64,
    pub steady_input_bits_per_cycle: f64,
    pub min_input_digits_per_cycle: usize,
    pub max_input_digits_per_cycle: usize,
    pub stages: Vec<StageStats>,
    pub merge: Vec<MergeStats>,
    pub links_checked: u64,
    pub range_violations: u64,
    pub multiplier_contract_violations: u64,
    pub trace_digest: Option<String>,
    pub config: ConfigEcho,
}

impl CycleReport {
    /// Busy fraction of each stage index, averaged over paths.
    pub fn per_stage_busy_fraction(&self) -> Vec<f64> {
        let count = self.stages.iter().map(|s| s.stage + 1).max().unwrap_or(0);
        (0..count)
            .map(|i| {
                let v: Vec<f64> = self
                    .stages
                    .iter()
                    .filter(|s| s.stage == i)
                    .map(|s| s.busy_fraction)
                    .collect();
                v.iter().sum::<f64>() / v.len() as f64
            })
            .collect()
    }
}
