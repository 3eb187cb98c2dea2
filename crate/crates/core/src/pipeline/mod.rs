//! Cycle-accurate simulator of the digit-serial pipelined transform.
//!
//! # Dataflow
//!
//! `paths` identical delay-feedback pipelines run in lock step. Element
//! `j` of the input goes to path `j mod paths` at word slot `j / paths`, so
//! every path sees a stride-decimated subsequence and computes an
//! `n_local = n / paths` point transform with root `omega^paths`. Path `p`
//! stage `s` therefore uses the domain's twiddle table for stage
//! `s + log2(paths)`.
//!
//! A path emits its sub-transform in bit-reversed order. Before the merge,
//! output slot `o` of path `p` must be rotated by `omega^(p * bitrev(o))`;
//! that factor is folded into the last delay-feedback stage, whose own
//! twiddles are all one. The merge is a fully parallel `paths`-point
//! decimation-in-frequency network with root `omega^n_local` and a
//! multiplier on every lane of every layer. Inverse transforms fold `n^-1`
//! into the last multiplier layer (the last merge layer, or the last
//! delay-feedback stage when there is a single path).
//!
//! Every lane then passes the exit unit. Reading the exit lanes time-major,
//! lane-minor (`t * paths + lane`) gives the full transform in bit-reversed
//! order; `reorder_output` permutes it back to natural order on the host.
//!
//! Stages start their schedules when their first digit arrives, so no
//! alignment buffers are needed between paths and the merge: all paths are
//! identical and stay aligned.

mod exit;
mod model;
mod parallel;
mod stage;
mod trace;

use crate::digitflow::{join, split};
use crate::error::{Error, Result};
use crate::montcore::{finalize, mont_mul_lazy, to_montgomery, RedundantResidue};
use crate::params::{build_domain, Direction, MontgomeryContext, NttDomain};
use crate::reference::{bit_reverse_index, bit_reverse_permute, check_vector};
use crate::word::Word;
use serde::Serialize;

use exit::ExitUnit;
use parallel::ParallelLayer;
use stage::{SdfStage, TwiddleSchedule};

pub use model::{cycle_model, ConfigEcho, CyclePrediction, CycleReport, MergeStats, StageStats};
pub use stage::Phase;
pub use trace::{Trace, TraceRecord};

/// Multiplier latency per processing element unless configured otherwise.
pub const DEFAULT_PE_LATENCY: u32 = 4;

/// What to build: the domain fixes `n`, `q`, `d` and the direction.
#[derive(Debug, Clone)]
pub struct PipelineConfig<W: Word> {
    pub domain: NttDomain<W>,
    pub paths: usize,
    pub reorder_output: bool,
    pub pe_latency: u32,
    /// Record a per-cycle trace and its digest.
    pub trace: bool,
}

impl<W: Word> PipelineConfig<W> {
    pub fn new(domain: NttDomain<W>, paths: usize) -> Self {
        Self {
            domain,
            paths,
            reorder_output: false,
            pe_latency: DEFAULT_PE_LATENCY,
            trace: false,
        }
    }

    pub fn reorder_output(mut self, on: bool) -> Self {
        self.reorder_output = on;
        self
    }

    pub fn pe_latency(mut self, cycles: u32) -> Self {
        self.pe_latency = cycles;
        self
    }

    pub fn trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    pub fn n(&self) -> usize {
        self.domain.n()
    }

    pub fn d(&self) -> u32 {
        self.domain.ctx().d()
    }

    pub fn direction(&self) -> Direction {
        self.domain.direction()
    }

    pub fn n_local(&self) -> usize {
        self.n() / self.paths
    }

    /// Input bits consumed per cycle, `d * paths`.
    pub fn bandwidth_bits(&self) -> u64 {
        u64::from(self.d()) * self.paths as u64
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.paths == 0 || !self.paths.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "paths = {} must be a power of two",
                self.paths
            )));
        }
        if self.paths > n || n / self.paths < 2 {
            return Err(Error::InvalidConfig(format!(
                "n / paths must be at least 2 (n = {n}, paths = {})",
                self.paths
            )));
        }
        if self.pe_latency == 0 {
            return Err(Error::InvalidConfig(
                "pe_latency must be at least one cycle".into(),
            ));
        }
        Ok(())
    }

    pub fn echo(&self) -> ConfigEcho {
        let ctx = self.domain.ctx();
        ConfigEcho {
            n: self.n(),
            q: ctx.q().to_string(),
            q_bits: ctx.w(),
            d: ctx.d(),
            r_exp: ctx.r_exp(),
            num_digits: ctx.num_digits(),
            paths: self.paths,
            direction: self.direction(),
            pe_latency: self.pe_latency,
            reorder_output: self.reorder_output,
            bandwidth_bits: self.bandwidth_bits(),
            word: W::NAME,
        }
    }
}

/// Unit counts of a built pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineStructure {
    pub paths: usize,
    pub stages_per_path: usize,
    pub merge_layers: usize,
    pub exit_units: usize,
    /// Processing elements of every multiplier, delay-feedback stages first,
    /// then merge lanes, then exit units.
    pub pe_counts: Vec<usize>,
    /// Feedback buffer capacity in digit slots for each stage index.
    pub buffer_capacities: Vec<usize>,
}

impl PipelineStructure {
    pub fn multipliers(&self) -> usize {
        self.pe_counts.len()
    }
}

/// State of one delay-feedback stage in one cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageObservation<W: Word> {
    pub path: usize,
    pub stage: usize,
    pub phase: Phase,
    pub buffer_occupancy: usize,
    /// Digit leaving the stage multiplier.
    pub output: Option<W>,
}

/// Everything visible on the links in one cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepObservation<W: Word> {
    pub cycle: u64,
    /// The run has finished; nothing moved.
    pub idle: bool,
    pub inputs: Vec<Option<W>>,
    pub stages: Vec<StageObservation<W>>,
    /// Per merge layer, the digit leaving each lane's multiplier.
    pub merge_outputs: Vec<Vec<Option<W>>>,
    /// Corrected output digits per lane.
    pub outputs: Vec<Option<W>>,
}

/// Reassembles words on a link and checks them against a bound.
#[derive(Debug, Clone)]
struct LinkMonitor<W: Word> {
    bound: W,
    held: Vec<W>,
    checked: u64,
    violations: u64,
}

impl<W: Word> LinkMonitor<W> {
    fn new(bound: W, nd: usize) -> Self {
        Self {
            bound,
            held: Vec::with_capacity(nd),
            checked: 0,
            violations: 0,
        }
    }

    fn observe(&mut self, digit: Option<&W>, d: u32, nd: usize) {
        if let Some(x) = digit {
            self.held.push(x.clone());
            if self.held.len() == nd {
                if join(&self.held, d) >= self.bound {
                    self.violations += 1;
                }
                self.checked += 1;
                self.held.clear();
            }
        }
    }
}

#[derive(Debug, Clone)]
struct RunState<W: Word> {
    lanes_in: Vec<Vec<W>>,
    cycle: u64,
    outputs: Vec<Vec<W>>,
    monitors: Vec<LinkMonitor<W>>,
    min_in: usize,
    max_in: usize,
    last_input_cycle: u64,
    first_output_cycle: Option<u64>,
    last_output_cycle: u64,
    trace: Option<Trace>,
    done: bool,
}

/// A built pipeline. Load an input, then [`step`](Self::step) it or
/// [`run`](Self::run) it to completion.
#[derive(Debug, Clone)]
pub struct Pipeline<W: Word> {
    cfg: PipelineConfig<W>,
    template: Units<W>,
    paths: Vec<Vec<SdfStage<W>>>,
    merge: Vec<ParallelLayer<W>>,
    exit: Vec<ExitUnit<W>>,
    state: Option<RunState<W>>,
    lane_buf: Vec<Option<W>>,
    merge_buf: Vec<Option<W>>,
}

pub fn build_pipeline<W: Word>(cfg: PipelineConfig<W>) -> Result<Pipeline<W>> {
    cfg.validate()?;
    let template = build_units(&cfg)?;
    let (paths, merge, exit) = template.clone();
    let lanes = cfg.paths;
    Ok(Pipeline {
        cfg,
        template,
        paths,
        merge,
        exit,
        state: None,
        lane_buf: Vec::with_capacity(lanes),
        merge_buf: Vec::with_capacity(lanes),
    })
}

type Units<W> = (
    Vec<Vec<SdfStage<W>>>,
    Vec<ParallelLayer<W>>,
    Vec<ExitUnit<W>>,
);

fn build_units<W: Word>(cfg: &PipelineConfig<W>) -> Result<Units<W>> {
    let dom = &cfg.domain;
    let ctx = dom.ctx();
    let p_count = cfg.paths;
    let log_p = p_count.trailing_zeros() as usize;
    let n_local = cfg.n_local();
    let stages = n_local.trailing_zeros() as usize;
    let inverse = cfg.direction() == Direction::Inverse;
    let scale = inverse.then(|| dom.n_inv().clone());
    let one = dom.mont_one().clone();
    let n = cfg.n();
    let powers = dom.mont_root_powers(None);
    let scaled_powers = scale.as_ref().map(|s| dom.mont_root_powers(Some(s)));
    let power = |e: usize, scaled: bool| -> RedundantResidue<W> {
        match (&scaled_powers, scaled) {
            (Some(p), true) => p[e % n].clone(),
            _ => powers[e % n].clone(),
        }
    };

    let mut paths = Vec::with_capacity(p_count);
    for p in 0..p_count {
        let mut row = Vec::with_capacity(stages);
        for s in 0..stages {
            let block = n_local >> (s + 1);
            let words: Vec<RedundantResidue<W>> = if s + 1 == stages {
                // Inter-path rotation, and n^-1 when no merge follows.
                let scaled = p_count == 1 && inverse;
                (0..n_local)
                    .map(|o| {
                        let e = p * bit_reverse_index(o, stages as u32);
                        if e == 0 && !scaled {
                            one.clone()
                        } else {
                            power(e, scaled)
                        }
                    })
                    .collect()
            } else {
                let table = dom.twiddles(s + log_p);
                (0..n_local)
                    .map(|o| {
                        let r = o % (2 * block);
                        if r < block {
                            one.clone()
                        } else {
                            table[r - block].clone()
                        }
                    })
                    .collect()
            };
            let schedule = TwiddleSchedule::per_word(&words, ctx);
            row.push(SdfStage::new(p, s, n_local, ctx, cfg.pe_latency, schedule)?);
        }
        paths.push(row);
    }

    let mut merge = Vec::with_capacity(log_p);
    for l in 0..log_p {
        let half = p_count >> (l + 1);
        let scaled = l + 1 == log_p && inverse;
        let schedules = (0..p_count)
            .map(|lane| {
                let r = lane % (2 * half);
                let e = if r < half {
                    0
                } else {
                    (r - half) << (l + stages)
                };
                let w = if e == 0 && !scaled {
                    one.clone()
                } else {
                    power(e, scaled)
                };
                TwiddleSchedule::constant(w.value(), ctx)
            })
            .collect();
        merge.push(ParallelLayer::new(
            l,
            p_count,
            ctx,
            cfg.pe_latency,
            schedules,
        )?);
    }

    let exit = (0..p_count)
        .map(|_| ExitUnit::new(ctx, cfg.pe_latency))
        .collect::<Result<Vec<_>>>()?;
    Ok((paths, merge, exit))
}

impl<W: Word> Pipeline<W> {
    pub fn config(&self) -> &PipelineConfig<W> {
        &self.cfg
    }

    fn ctx(&self) -> &MontgomeryContext<W> {
        self.cfg.domain.ctx()
    }

    pub fn structure(&self) -> PipelineStructure {
        let mut pe_counts = Vec::new();
        for row in &self.paths {
            pe_counts.extend(row.iter().map(|s| s.mult.pe_count()));
        }
        for layer in &self.merge {
            pe_counts.extend(layer.mults.iter().map(|m| m.pe_count()));
        }
        pe_counts.extend(self.exit.iter().map(|e| e.mult.pe_count()));
        PipelineStructure {
            paths: self.paths.len(),
            stages_per_path: self.paths[0].len(),
            merge_layers: self.merge.len(),
            exit_units: self.exit.len(),
            pe_counts,
            buffer_capacities: self.paths[0].iter().map(|s| s.capacity()).collect(),
        }
    }

    /// Distinct twiddle constants streamed into each stage of path 0.
    pub fn distinct_twiddles_per_stage(&self) -> Vec<usize> {
        self.paths[0]
            .iter()
            .map(|s| s.distinct_twiddles())
            .collect()
    }

    pub fn prediction(&self) -> CyclePrediction {
        cycle_model(&self.cfg)
    }

    /// Resets every unit and loads `input` (plain residues, natural order).
    pub fn load(&mut self, input: &[W]) -> Result<()> {
        check_vector(input, &self.cfg.domain)?;
        let (paths, merge, exit) = self.template.clone();
        self.paths = paths;
        self.merge = merge;
        self.exit = exit;

        let ctx = self.ctx().clone();
        let p_count = self.cfg.paths;
        let mut lanes_in = vec![Vec::with_capacity(self.cfg.n_local() * ctx.num_digits()); p_count];
        for (j, a) in input.iter().enumerate() {
            let m = to_montgomery(a, &ctx)?;
            lanes_in[j % p_count]
                .extend_from_slice(split(m.value(), ctx.d(), ctx.num_digits()).digits());
        }

        let two_q = ctx.two_q().clone();
        let links = p_count * self.paths[0].len() + p_count * self.merge.len() + p_count;
        let mut monitors: Vec<_> = (0..links)
            .map(|_| LinkMonitor::new(two_q.clone(), ctx.num_digits()))
            .collect();
        monitors.extend((0..p_count).map(|_| LinkMonitor::new(ctx.q().clone(), ctx.num_digits())));

        self.state = Some(RunState {
            lanes_in,
            cycle: 0,
            outputs: vec![Vec::new(); p_count],
            monitors,
            min_in: usize::MAX,
            max_in: 0,
            last_input_cycle: 0,
            first_output_cycle: None,
            last_output_cycle: 0,
            trace: self.cfg.trace.then(Trace::default),
            done: false,
        });
        Ok(())
    }

    pub fn is_done(&self) -> bool {
        self.state.as_ref().is_some_and(|s| s.done)
    }

    /// Advances one clock cycle and reports what every link carried.
    pub fn step(&mut self) -> Result<StepObservation<W>> {
        let mut obs = StepObservation {
            cycle: 0,
            idle: false,
            inputs: Vec::new(),
            stages: Vec::new(),
            merge_outputs: Vec::new(),
            outputs: Vec::new(),
        };
        self.advance(Some(&mut obs))?;
        Ok(obs)
    }

    /// Loads `input`, runs to completion and returns the output with its report.
    pub fn run(&mut self, input: &[W]) -> Result<(Vec<W>, CycleReport)> {
        self.load(input)?;
        let guard = 2 * self.prediction().total + 64;
        while !self.is_done() {
            let cycle = self.state.as_ref().map_or(0, |s| s.cycle);
            if cycle > guard {
                return Err(Error::Stalled(guard));
            }
            self.advance(None)?;
        }
        Ok((self.output()?, self.report()?))
    }

    fn advance(&mut self, mut obs: Option<&mut StepObservation<W>>) -> Result<()> {
        let nd = self.ctx().num_digits();
        let d = self.ctx().d();
        let p_count = self.cfg.paths;
        let n_local = self.cfg.n_local();
        let state = self.state.as_mut().ok_or(Error::NotLoaded)?;
        let t = state.cycle;
        if let Some(o) = obs.as_deref_mut() {
            o.cycle = t;
        }
        if state.done {
            if let Some(o) = obs {
                o.idle = true;
            }
            return Ok(());
        }

        // input distributor: one digit per lane per cycle
        let window = (n_local * nd) as u64;
        self.lane_buf.clear();
        for lane in &state.lanes_in {
            self.lane_buf
                .push((t < window).then(|| lane[t as usize].clone()));
        }
        if t < window {
            state.min_in = state.min_in.min(p_count);
            state.max_in = state.max_in.max(p_count);
            state.last_input_cycle = t;
        }
        if let Some(o) = obs.as_deref_mut() {
            o.inputs = self.lane_buf.clone();
        }
        if let Some(tr) = state.trace.as_mut() {
            for (lane, x) in self.lane_buf.iter().enumerate() {
                if let Some(x) = x {
                    tr.push(TraceRecord {
                        cycle: t,
                        stage: format!("in.l{lane}"),
                        phase: Phase::Move,
                        link: "in",
                        digit: Some(x.to_string()),
                    });
                }
            }
        }

        let mut link = 0;
        for (p, row) in self.paths.iter_mut().enumerate() {
            let mut x = self.lane_buf[p].take();
            for st in row.iter_mut() {
                x = st.tick(t, x.as_ref())?;
                state.monitors[link].observe(x.as_ref(), d, nd);
                link += 1;
                if let Some(o) = obs.as_deref_mut() {
                    o.stages.push(StageObservation {
                        path: p,
                        stage: st.index,
                        phase: st.phase,
                        buffer_occupancy: st.occupancy(),
                        output: x.clone(),
                    });
                }
                if let Some(tr) = state.trace.as_mut() {
                    if st.phase != Phase::Idle || x.is_some() {
                        tr.push(TraceRecord {
                            cycle: t,
                            stage: format!("p{p}.s{}", st.index),
                            phase: st.phase,
                            link: "out",
                            digit: x.as_ref().map(|v| v.to_string()),
                        });
                    }
                }
            }
            self.lane_buf[p] = x;
        }

        for layer in self.merge.iter_mut() {
            layer.tick(&self.lane_buf, &mut self.merge_buf)?;
            std::mem::swap(&mut self.lane_buf, &mut self.merge_buf);
            for (lane, x) in self.lane_buf.iter().enumerate() {
                state.monitors[link].observe(x.as_ref(), d, nd);
                link += 1;
                if let (Some(tr), Some(v)) = (state.trace.as_mut(), x) {
                    tr.push(TraceRecord {
                        cycle: t,
                        stage: format!("m{}.l{lane}", layer.index),
                        phase: Phase::Compute,
                        link: "out",
                        digit: Some(v.to_string()),
                    });
                }
            }
            if let Some(o) = obs.as_deref_mut() {
                o.merge_outputs.push(self.lane_buf.clone());
            }
        }

        let final_links = link + p_count;
        for (lane, unit) in self.exit.iter_mut().enumerate() {
            let (reduced, out) = unit.tick(t, self.lane_buf[lane].as_ref())?;
            state.monitors[link].observe(reduced.as_ref(), d, nd);
            link += 1;
            state.monitors[final_links + lane].observe(out.as_ref(), d, nd);
            if let Some(v) = &out {
                state.outputs[lane].push(v.clone());
                state.first_output_cycle.get_or_insert(t);
                state.last_output_cycle = t;
                if let Some(tr) = state.trace.as_mut() {
                    tr.push(TraceRecord {
                        cycle: t,
                        stage: format!("exit.l{lane}"),
                        phase: Phase::Move,
                        link: "out",
                        digit: Some(v.to_string()),
                    });
                }
            }
            if let Some(o) = obs.as_deref_mut() {
                o.outputs.push(out);
            }
        }

        state.cycle += 1;
        state.done = state.outputs.iter().all(|o| o.len() == n_local * nd);
        Ok(())
    }

    /// The transform result once the run has finished.
    pub fn output(&self) -> Result<Vec<W>> {
        let state = self.state.as_ref().ok_or(Error::NotLoaded)?;
        if !state.done {
            return Err(Error::NotLoaded);
        }
        let ctx = self.ctx();
        let (d, nd) = (ctx.d(), ctx.num_digits());
        let n_local = self.cfg.n_local();
        let mut out = Vec::with_capacity(self.cfg.n());
        for t in 0..n_local {
            for lane in &state.outputs {
                out.push(join(&lane[t * nd..(t + 1) * nd], d));
            }
        }
        Ok(if self.cfg.reorder_output {
            bit_reverse_permute(&out)
        } else {
            out
        })
    }

    /// Measurements of the finished run.
    pub fn report(&self) -> Result<CycleReport> {
        let state = self.state.as_ref().ok_or(Error::NotLoaded)?;
        let ctx = self.ctx();
        let total = state.last_output_cycle + 1;
        let window = state.last_input_cycle + 1;
        let nd = ctx.num_digits() as u64;
        let input_bits = window * self.cfg.paths as u64 * u64::from(ctx.d());
        let frac = |busy: u64| busy as f64 / total as f64;
        let stages = self
            .paths
            .iter()
            .flatten()
            .map(|s| StageStats {
                path: s.path,
                stage: s.index,
                busy_cycles: s.busy_cycles,
                busy_fraction: frac(s.busy_cycles),
                max_buffer_occupancy: s.max_occupancy,
                buffer_capacity: s.capacity(),
                first_compute_cycle: s.compute_entered_at,
            })
            .collect();
        let merge = self
            .merge
            .iter()
            .map(|l| MergeStats {
                layer: l.index,
                busy_cycles: l.busy_cycles,
                busy_fraction: frac(l.busy_cycles),
            })
            .collect();
        let mut contract = self
            .exit
            .iter()
            .map(|e| e.mult.range_violations())
            .sum::<u64>();
        contract += self
            .paths
            .iter()
            .flatten()
            .map(|s| s.mult.range_violations())
            .sum::<u64>();
        contract += self
            .merge
            .iter()
            .flat_map(|l| l.mults.iter())
            .map(|m| m.range_violations())
            .sum::<u64>();
        let latency = u64::from(self.cfg.pe_latency) * nd;
        Ok(CycleReport {
            total_cycles: total,
            predicted: self.prediction(),
            fill_latency: state.first_output_cycle.unwrap_or(0),
            drain_latency: total - window,
            entry_cycles: 0,
            exit_cycles: latency + nd,
            multiplier_latency: latency,
            input_window_cycles: window,
            input_bits,
            steady_input_bits_per_cycle: input_bits as f64 / window as f64,
            min_input_digits_per_cycle: state.min_in,
            max_input_digits_per_cycle: state.max_in,
            stages,
            merge,
            links_checked: state.monitors.iter().map(|m| m.checked).sum(),
            range_violations: state.monitors.iter().map(|m| m.violations).sum(),
            multiplier_contract_violations: contract,
            trace_digest: state.trace.as_ref().map(Trace::digest),
            config: self.cfg.echo(),
        })
    }

    /// The recorded trace, when tracing is on.
    pub fn trace(&self) -> Option<&Trace> {
        self.state.as_ref().and_then(|s| s.trace.as_ref())
    }
}

/// Builds a pipeline and runs one input through it.
pub fn run<W: Word>(cfg: PipelineConfig<W>, input: &[W]) -> Result<(Vec<W>, CycleReport)> {
    build_pipeline(cfg)?.run(input)
}

/// Cyclic convolution through the pipeline: two forward transforms, a
/// pointwise Montgomery product on the host, one inverse transform.
#[derive(Debug, Clone)]
pub struct Convolution<W: Word> {
    pub values: Vec<W>,
    pub forward: [CycleReport; 2],
    pub inverse: CycleReport,
}

pub fn convolve<W: Word>(
    a: &[W],
    b: &[W],
    forward: &NttDomain<W>,
    paths: usize,
    pe_latency: u32,
) -> Result<Convolution<W>> {
    if forward.direction() != Direction::Forward {
        return Err(Error::InvalidConfig(
            "convolution needs a forward domain".into(),
        ));
    }
    let ctx = forward.ctx();
    let inverse = build_domain(forward.q(), forward.n(), ctx.d(), Direction::Inverse)?;
    let fwd_cfg = PipelineConfig::new(forward.clone(), paths)
        .reorder_output(true)
        .pe_latency(pe_latency);
    let mut fwd = build_pipeline(fwd_cfg)?;
    let (fa, ra) = fwd.run(a)?;
    let (fb, rb) = fwd.run(b)?;
    let product = fa
        .iter()
        .zip(&fb)
        .map(|(x, y)| {
            let m = mont_mul_lazy(&to_montgomery(x, ctx)?, &to_montgomery(y, ctx)?, ctx)?;
            finalize(&m, ctx)
        })
        .collect::<Result<Vec<W>>>()?;
    let inv_cfg = PipelineConfig::new(inverse, paths)
        .reorder_output(true)
        .pe_latency(pe_latency);
    let (values, ri) = run(inv_cfg, &product)?;
    Ok(Convolution {
        values,
        forward: [ra, rb],
        inverse: ri,
    })
}
