use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::digitflow::{split, DigitSerialButterfly, SystolicMultiplier};
use crate::error::{Error, Result};
use crate::montcore::RedundantResidue;
use crate::params::MontgomeryContext;
use crate::word::Word;

/// Stage state for one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Idle,
    Move,
    Compute,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Idle => "idle",
            Phase::Move => "move",
            Phase::Compute => "compute",
        }
    }
}

/// Twiddle operands for a multiplier, as digit streams indexed by the
/// output word they multiply.
#[derive(Debug, Clone)]
pub(crate) struct TwiddleSchedule<W: Word> {
    streams: Vec<Vec<W>>,
    index: Vec<usize>,
}

impl<W: Word> TwiddleSchedule<W> {
    /// One twiddle per output word; equal values share a stream.
    pub(crate) fn per_word(values: &[RedundantResidue<W>], ctx: &MontgomeryContext<W>) -> Self {
        let mut streams: Vec<Vec<W>> = Vec::new();
        let mut seen: Vec<&W> = Vec::new();
        let mut index = Vec::with_capacity(values.len());
        for v in values {
            let id = match seen.iter().position(|s| *s == v.value()) {
                Some(id) => id,
                None => {
                    seen.push(v.value());
                    streams.push(
                        split(v.value(), ctx.d(), ctx.num_digits())
                            .digits()
                            .to_vec(),
                    );
                    streams.len() - 1
                }
            };
            index.push(id);
        }
        Self { streams, index }
    }

    /// The same twiddle for every word.
    pub(crate) fn constant(value: &W, ctx: &MontgomeryContext<W>) -> Self {
        Self {
            streams: vec![split(value, ctx.d(), ctx.num_digits()).digits().to_vec()],
            index: Vec::new(),
        }
    }

    pub(crate) fn digit(&self, word: usize, digit: usize) -> &W {
        let id = if self.index.is_empty() {
            0
        } else {
            self.index[word]
        };
        &self.streams[id][digit]
    }

    pub(crate) fn distinct(&self) -> usize {
        self.streams.len()
    }
}

/// One single-path delay-feedback stage: feedback buffer, digit-serial
/// butterfly, output register and systolic multiplier.
///
/// With block size `B = n_local / 2^(s+1)` words, word-times alternate
/// between `B` move word-times (incoming words enter the buffer, buffered
/// differences leave) and `B` compute word-times (the buffered word meets
/// the incoming one; the sum leaves, the difference `a - b + 2q` enters the
/// buffer). After the last input word the stage drains for `B` more
/// word-times. Both outputs pass through the multiplier, so every element
/// sees one REDC per stage.
#[derive(Debug, Clone)]
pub(crate) struct SdfStage<W: Word> {
    pub(crate) path: usize,
    pub(crate) index: usize,
    n_local: usize,
    block: usize,
    nd: usize,
    started_at: Option<u64>,
    buffer: VecDeque<W>,
    pub(crate) max_occupancy: usize,
    bfu: DigitSerialButterfly<W>,
    out_reg: Option<(W, usize, usize)>,
    pub(crate) mult: SystolicMultiplier<W>,
    twiddles: TwiddleSchedule<W>,
    pub(crate) busy_cycles: u64,
    pub(crate) phase: Phase,
    pub(crate) compute_entered_at: Option<u64>,
}

impl<W: Word> SdfStage<W> {
    pub(crate) fn new(
        path: usize,
        index: usize,
        n_local: usize,
        ctx: &MontgomeryContext<W>,
        pe_latency: u32,
        twiddles: TwiddleSchedule<W>,
    ) -> Result<Self> {
        let block = n_local >> (index + 1);
        let nd = ctx.num_digits();
        let four_q = ctx.two_q().clone() + ctx.two_q().clone();
        Ok(Self {
            path,
            index,
            n_local,
            block,
            nd,
            started_at: None,
            buffer: VecDeque::with_capacity(block * nd),
            max_occupancy: 0,
            bfu: DigitSerialButterfly::new(ctx),
            out_reg: None,
            mult: SystolicMultiplier::with_lhs_bound(ctx, pe_latency, four_q)?,
            twiddles,
            busy_cycles: 0,
            phase: Phase::Idle,
            compute_entered_at: None,
        })
    }

    /// Feedback buffer size in digit slots.
    pub(crate) fn capacity(&self) -> usize {
        self.block * self.nd
    }

    pub(crate) fn occupancy(&self) -> usize {
        self.buffer.len()
    }

    pub(crate) fn distinct_twiddles(&self) -> usize {
        self.twiddles.distinct()
    }

    pub(crate) fn tick(&mut self, cycle: u64, input: Option<&W>) -> Result<Option<W>> {
        // The multiplier sees what the butterfly registered last cycle.
        let out = match self.out_reg.take() {
            Some((v, word, digit)) => {
                self.busy_cycles += 1;
                let tw = self.twiddles.digit(word, digit);
                self.mult.tick(Some(&v), Some(tw))?
            }
            None => self.mult.tick(None, None)?,
        };

        if self.started_at.is_none() && input.is_some() {
            self.started_at = Some(cycle);
        }
        self.phase = Phase::Idle;
        let Some(t0) = self.started_at else {
            return Ok(out);
        };
        let local = (cycle - t0) as usize;
        let k = local / self.nd;
        let c = local % self.nd;
        let b = self.block;

        if k < self.n_local {
            let x = input.ok_or(Error::StreamBubble)?;
            if k % (2 * b) < b {
                self.phase = Phase::Move;
                if k >= b {
                    let y = self.pop()?;
                    self.out_reg = Some((y, k - b, c));
                }
                self.buffer.push_back(x.clone());
            } else {
                self.phase = Phase::Compute;
                self.compute_entered_at.get_or_insert(cycle);
                let y = self.pop()?;
                let (sum, diff) = self.bfu.tick(&y, x)?;
                self.out_reg = Some((sum, k - b, c));
                self.buffer.push_back(diff);
            }
        } else if input.is_some() {
            return Err(Error::LengthMismatch {
                expected: self.n_local,
                got: self.n_local + 1,
            });
        } else if k < self.n_local + b {
            self.phase = Phase::Move;
            let y = self.pop()?;
            self.out_reg = Some((y, k - b, c));
        }
        self.max_occupancy = self.max_occupancy.max(self.buffer.len());
        Ok(out)
    }

    fn pop(&mut self) -> Result<W> {
        self.buffer.pop_front().ok_or(Error::StreamBubble)
    }
}
