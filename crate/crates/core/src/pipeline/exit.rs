use std::collections::VecDeque;

use crate::digitflow::{join, split, SystolicMultiplier};
use crate::error::Result;
use crate::montcore::correct;
use crate::params::MontgomeryContext;
use crate::word::{from_u64, Word};

/// Leaves the Montgomery domain: a multiplier by plain 1 (one REDC, result
/// at most `q`) followed by a corrector that holds one full word, subtracts
/// `q` if needed and re-emits it. The corrector adds `num_digits` cycles.
#[derive(Debug, Clone)]
pub(crate) struct ExitUnit<W: Word> {
    pub(crate) mult: SystolicMultiplier<W>,
    one: Vec<W>,
    q: W,
    d: u32,
    nd: usize,
    pos: usize,
    held: Vec<W>,
    pending: VecDeque<(u64, W)>,
}

impl<W: Word> ExitUnit<W> {
    pub(crate) fn new(ctx: &MontgomeryContext<W>, pe_latency: u32) -> Result<Self> {
        Ok(Self {
            mult: SystolicMultiplier::new(ctx, pe_latency)?,
            one: split(&from_u64::<W>(1), ctx.d(), ctx.num_digits())
                .digits()
                .to_vec(),
            q: ctx.q().clone(),
            d: ctx.d(),
            nd: ctx.num_digits(),
            pos: 0,
            held: Vec::with_capacity(ctx.num_digits()),
            pending: VecDeque::new(),
        })
    }

    /// Returns `(multiplier output, corrected output)` digits for this cycle.
    pub(crate) fn tick(&mut self, cycle: u64, input: Option<&W>) -> Result<(Option<W>, Option<W>)> {
        let reduced = match input {
            Some(x) => {
                let one = &self.one[self.pos];
                self.pos = (self.pos + 1) % self.nd;
                self.mult.tick(Some(x), Some(one))?
            }
            None => self.mult.tick(None, None)?,
        };
        if let Some(digit) = &reduced {
            self.held.push(digit.clone());
            if self.held.len() == self.nd {
                let word = correct(join(&self.held, self.d), &self.q);
                self.held.clear();
                for (k, v) in split(&word, self.d, self.nd).digits().iter().enumerate() {
                    self.pending.push_back((cycle + 1 + k as u64, v.clone()));
                }
            }
        }
        let out = match self.pending.front() {
            Some((at, _)) if *at == cycle => self.pending.pop_front().map(|(_, v)| v),
            _ => None,
        };
        Ok((reduced, out))
    }
}
