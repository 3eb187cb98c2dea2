use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use dsntt::params::{build_domain, find_ntt_prime, NttDomain};
use dsntt::pipeline::{build_pipeline, convolve, PipelineConfig};
use dsntt::reference::{
    bit_reverse_permute, cyclic_convolve, naive_intt, naive_ntt, VectorDocument,
};
use dsntt::word::{convert, random_below, Word};
use dsntt::{BigUint, Direction, U1024, U256, U512};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{Args, Mode};

pub const PRNG: &str = "chacha8/v1";
pub const DEFAULT_N: usize = 128;
pub const DEFAULT_SWEEP_BANDWIDTH: u64 = 256;

#[derive(Debug)]
pub struct CliError(pub String);

impl From<dsntt::Error> for CliError {
    fn from(e: dsntt::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Rows for CSV output.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Result of one command before the common report fields are attached.
#[derive(Debug)]
pub struct Outcome {
    pub passed: bool,
    pub report: Value,
    pub table: Table,
}

struct Setup {
    n: usize,
    q: BigUint,
    inputs: Option<(VectorDocument, VectorDocument)>,
}

fn read_document(path: &Path) -> CliResult<VectorDocument> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn resolve(args: &Args) -> CliResult<Setup> {
    let inputs = match (&args.input_a, &args.input_b) {
        (Some(a), Some(b)) => Some((read_document(a)?, read_document(b)?)),
        _ => None,
    };
    let n = args
        .n
        .or(inputs.as_ref().map(|(a, _)| a.n))
        .unwrap_or(DEFAULT_N);
    let q = match (&args.q, &inputs) {
        (Some(q), _) => dsntt::word::parse_decimal::<BigUint>(q)?,
        (None, Some((a, _))) => dsntt::word::parse_decimal::<BigUint>(&a.q)?,
        (None, None) => find_ntt_prime::<BigUint>(args.q_bits, n)?,
    };
    Ok(Setup { n, q, inputs })
}

/// Bits needed for `2q * R`, the widest intermediate of the arithmetic.
fn required_bits(q: &BigUint, d: u32) -> u64 {
    if d == 0 {
        return 0;
    }
    let w = q.bits() as u32;
    let r_exp = (w + 3).div_ceil(d) * d;
    ((q * 2u32) << r_exp as usize).bits()
}

fn digit_sizes(args: &Args) -> Vec<u32> {
    match args.mode {
        Mode::Sweep => args.digits.clone(),
        _ => vec![args.d],
    }
}

/// Runs the selected command on the narrowest word type that fits.
pub fn execute(args: &Args) -> CliResult<Outcome> {
    let setup = resolve(args)?;
    let need = digit_sizes(args)
        .iter()
        .map(|&d| required_bits(&setup.q, d))
        .max()
        .unwrap_or(0);
    match need {
        0..=64 => execute_with::<u64>(args, &setup),
        65..=256 => execute_with::<U256>(args, &setup),
        257..=512 => execute_with::<U512>(args, &setup),
        513..=1024 => execute_with::<U1024>(args, &setup),
        _ => execute_with::<BigUint>(args, &setup),
    }
}

fn execute_with<W: Word>(args: &Args, setup: &Setup) -> CliResult<Outcome> {
    let q: W = convert(&setup.q)?;
    match args.mode {
        Mode::Verify => verify(args, &q, setup.n),
        Mode::Bench => bench(args, &q, setup.n),
        Mode::Sweep => sweep(args, &q, setup.n),
        Mode::Convolve => convolve_cmd(args, &q, setup),
    }
}

fn check_bandwidth(bits: u64, pinned: Option<u64>) -> CliResult<()> {
    match pinned {
        Some(p) if p != bits => Err(CliError(format!(
            "d * paths = {bits} bits per cycle but the bandwidth is pinned to {p}"
        ))),
        _ => Ok(()),
    }
}

fn pipeline_config<W: Word>(args: &Args, domain: NttDomain<W>, paths: usize) -> PipelineConfig<W> {
    PipelineConfig::new(domain, paths)
        .reorder_output(args.reorder_output)
        .pe_latency(args.pe_latency)
}

fn random_vector<W: Word>(rng: &mut ChaCha8Rng, q: &W, n: usize) -> Vec<W> {
    (0..n).map(|_| random_below(rng, q)).collect()
}

/// Expected pipeline output for `a`, in the order the pipeline emits it.
fn oracle<W: Word>(a: &[W], domain: &NttDomain<W>, reorder: bool) -> CliResult<Vec<W>> {
    let natural = match domain.direction() {
        Direction::Forward => naive_ntt(a, domain)?,
        Direction::Inverse => naive_intt(a, domain)?,
    };
    Ok(if reorder {
        natural
    } else {
        bit_reverse_permute(&natural)
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn verify<W: Word>(args: &Args, q: &W, n: usize) -> CliResult<Outcome> {
    let domain = build_domain(q, n, args.d, args.direction)?;
    let cfg = pipeline_config(args, domain.clone(), args.paths);
    check_bandwidth(cfg.bandwidth_bits(), args.bandwidth)?;
    let echo = cfg.echo();
    let mut pipe = build_pipeline(cfg)?;
    let predicted = pipe.prediction();

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut failures = Vec::new();
    let mut range_violations = 0;
    let mut contract_violations = 0;
    let mut model_mismatches = 0;
    let mut first_report = None;
    for trial in 0..args.trials {
        let a = random_vector(&mut rng, q, n);
        let (out, report) = pipe.run(&a)?;
        if out != oracle(&a, &domain, args.reorder_output)? {
            failures.push(trial);
        }
        range_violations += report.range_violations;
        contract_violations += report.multiplier_contract_violations;
        if report.total_cycles != report.predicted.total {
            model_mismatches += 1;
        }
        first_report.get_or_insert(report);
    }

    let passed = failures.is_empty()
        && range_violations == 0
        && contract_violations == 0
        && model_mismatches == 0;
    let total = first_report.as_ref().map(|r| r.total_cycles);
    let table = Table {
        header: vec![
            "trials",
            "passed_trials",
            "failures",
            "range_violations",
            "contract_violations",
            "model_mismatches",
            "total_cycles",
            "predicted_total",
        ],
        rows: vec![vec![
            args.trials.to_string(),
            (args.trials - failures.len()).to_string(),
            failures.len().to_string(),
            range_violations.to_string(),
            contract_violations.to_string(),
            model_mismatches.to_string(),
            total.map(|t| t.to_string()).unwrap_or_default(),
            predicted.total.to_string(),
        ]],
    };
    let report = json!({
        "config": to_value(&echo),
        "trials": args.trials,
        "passed_trials": args.trials - failures.len(),
        "failures": failures,
        "range_violations": range_violations,
        "contract_violations": contract_violations,
        "model_mismatches": model_mismatches,
        "predicted": to_value(&predicted),
        "cycles": first_report.as_ref().map(to_value),
    });
    Ok(Outcome {
        passed,
        report,
        table,
    })
}

fn write_trace(path: &Path, trace: &dsntt::pipeline::Trace) -> CliResult<()> {
    let file = BufWriter::new(
        File::create(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?,
    );
    if path.extension().is_some_and(|e| e == "jsonl") {
        trace.write_jsonl(file)?;
    } else {
        trace.write_csv(file)?;
    }
    Ok(())
}

fn bench<W: Word>(args: &Args, q: &W, n: usize) -> CliResult<Outcome> {
    let domain = build_domain(q, n, args.d, args.direction)?;
    let cfg = pipeline_config(args, domain.clone(), args.paths).trace(args.trace.is_some());
    check_bandwidth(cfg.bandwidth_bits(), args.bandwidth)?;
    let mut pipe = build_pipeline(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let a = random_vector(&mut rng, q, n);
    let (out, report) = pipe.run(&a)?;
    if let (Some(path), Some(trace)) = (&args.trace, pipe.trace()) {
        write_trace(path, trace)?;
    }
    let verified = out == oracle(&a, &domain, args.reorder_output)?;
    let passed =
        verified && report.range_violations == 0 && report.total_cycles == report.predicted.total;

    let c = &report.config;
    let table = Table {
        header: vec![
            "n",
            "q_bits",
            "d",
            "paths",
            "num_digits",
            "direction",
            "total_cycles",
            "predicted_total",
            "fill_latency",
            "drain_latency",
            "exit_cycles",
            "multiplier_latency",
            "bandwidth_bits",
            "steady_input_bits_per_cycle",
            "verified",
        ],
        rows: vec![vec![
            c.n.to_string(),
            c.q_bits.to_string(),
            c.d.to_string(),
            c.paths.to_string(),
            c.num_digits.to_string(),
            c.direction.to_string(),
            report.total_cycles.to_string(),
            report.predicted.total.to_string(),
            report.fill_latency.to_string(),
            report.drain_latency.to_string(),
            report.exit_cycles.to_string(),
            report.multiplier_latency.to_string(),
            c.bandwidth_bits.to_string(),
            report.steady_input_bits_per_cycle.to_string(),
            verified.to_string(),
        ]],
    };
    let report = json!({
        "config": to_value(&report.config),
        "cycles": to_value(&report),
        "structure": to_value(&pipe.structure()),
        "verified": verified,
    });
    Ok(Outcome {
        passed,
        report,
        table,
    })
}

fn sweep<W: Word>(args: &Args, q: &W, n: usize) -> CliResult<Outcome> {
    let bandwidth = args.bandwidth.unwrap_or(DEFAULT_SWEEP_BANDWIDTH);
    if args.digits.is_empty() {
        return Err(CliError("sweep needs at least one digit size".into()));
    }
    let mut configs = Vec::new();
    for &d in &args.digits {
        let d64 = u64::from(d);
        if d == 0 || !bandwidth.is_multiple_of(d64) || !(bandwidth / d64).is_power_of_two() {
            return Err(CliError(format!(
                "digit size {d} does not give a power-of-two path count at {bandwidth} bits per cycle"
            )));
        }
        let paths = (bandwidth / d64) as usize;
        let domain = build_domain(q, n, d, args.direction)?;
        let cfg = pipeline_config(args, domain.clone(), paths);
        check_bandwidth(cfg.bandwidth_bits(), Some(bandwidth))?;
        configs.push((domain, build_pipeline(cfg)?));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let a = random_vector(&mut rng, q, n);
    let mut rows = Vec::new();
    let mut table = Table {
        header: vec![
            "d",
            "paths",
            "num_digits",
            "r_exp",
            "total_cycles",
            "predicted_total",
            "bandwidth_bits",
            "pe_per_multiplier",
            "multipliers",
            "buffer_slots",
            "verified",
        ],
        rows: Vec::new(),
    };
    let mut passed = true;
    for (domain, pipe) in &mut configs {
        let (out, report) = pipe.run(&a)?;
        let verified = out == oracle(&a, domain, args.reorder_output)?;
        passed &= verified && report.total_cycles == report.predicted.total;
        let s = pipe.structure();
        let c = &report.config;
        let buffer_slots: usize = s.buffer_capacities.iter().sum::<usize>() * s.paths;
        table.rows.push(vec![
            c.d.to_string(),
            c.paths.to_string(),
            c.num_digits.to_string(),
            c.r_exp.to_string(),
            report.total_cycles.to_string(),
            report.predicted.total.to_string(),
            c.bandwidth_bits.to_string(),
            c.num_digits.to_string(),
            s.multipliers().to_string(),
            buffer_slots.to_string(),
            verified.to_string(),
        ]);
        rows.push(json!({
            "d": c.d,
            "paths": c.paths,
            "num_digits": c.num_digits,
            "r_exp": c.r_exp,
            "total_cycles": report.total_cycles,
            "predicted_total": report.predicted.total,
            "bandwidth_bits": c.bandwidth_bits,
            "pe_per_multiplier": c.num_digits,
            "multipliers": s.multipliers(),
            "buffer_slots": buffer_slots,
            "verified": verified,
        }));
    }
    let totals: Vec<u64> = rows
        .iter()
        .map(|r| r["total_cycles"].as_u64().unwrap_or(0))
        .collect();
    let max = *totals.iter().max().expect("at least one row");
    let min = *totals.iter().min().expect("at least one row");
    let echo = configs[0].1.config().echo();
    let report = json!({
        "config": {
            "n": n,
            "q": echo.q,
            "q_bits": echo.q_bits,
            "direction": echo.direction,
            "pe_latency": echo.pe_latency,
            "reorder_output": echo.reorder_output,
            "bandwidth_bits": bandwidth,
            "digits": args.digits,
            "word": echo.word,
        },
        "rows": rows,
        "max_total_cycles": max,
        "min_total_cycles": min,
        "max_min_ratio": max as f64 / min as f64,
    });
    Ok(Outcome {
        passed,
        report,
        table,
    })
}

fn convolve_cmd<W: Word>(args: &Args, q: &W, setup: &Setup) -> CliResult<Outcome> {
    if args.direction != Direction::Forward {
        return Err(CliError(
            "convolve runs its own inverse pass; use --direction forward".into(),
        ));
    }
    let n = setup.n;
    let domain = build_domain(q, n, args.d, Direction::Forward)?;
    let cfg = pipeline_config(args, domain.clone(), args.paths);
    check_bandwidth(cfg.bandwidth_bits(), args.bandwidth)?;
    let mut echo = cfg.echo();
    echo.reorder_output = true;
    build_pipeline(cfg)?;

    let (a, b) = match &setup.inputs {
        Some((da, db)) => (
            da.clone().into_vector(&domain)?.into_values(),
            db.clone().into_vector(&domain)?.into_values(),
        ),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let a = random_vector(&mut rng, q, n);
            let b = random_vector(&mut rng, q, n);
            (a, b)
        }
    };
    let result = convolve(&a, &b, &domain, args.paths, args.pe_latency)?;
    let expected = cyclic_convolve(&a, &b, &domain)?;
    let matches = result.values == expected;
    let violations: u64 = result
        .forward
        .iter()
        .chain(std::iter::once(&result.inverse))
        .map(|r| r.range_violations)
        .sum();

    let values: Vec<String> = result.values.iter().map(|v| v.to_string()).collect();
    let table = Table {
        header: vec!["index", "value"],
        rows: values
            .iter()
            .enumerate()
            .map(|(i, v)| vec![i.to_string(), v.clone()])
            .collect(),
    };
    let report = json!({
        "config": to_value(&echo),
        "values": values,
        "matches_oracle": matches,
        "range_violations": violations,
        "forward_cycles": result.forward.iter().map(|r| r.total_cycles).collect::<Vec<_>>(),
        "inverse_cycles": result.inverse.total_cycles,
    });
    Ok(Outcome {
        passed: matches && violations == 0,
        report,
        table,
    })
}
