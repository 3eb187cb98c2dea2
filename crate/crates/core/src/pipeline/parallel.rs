use crate::digitflow::{DigitSerialButterfly, SystolicMultiplier};
use crate::error::{Error, Result};
use crate::params::MontgomeryContext;
use crate::word::Word;

use super::stage::TwiddleSchedule;

/// One layer of the fully parallel `paths`-point merge transform.
///
/// Lanes `i` and `i + half` (within blocks of `2 * half` lanes) feed one
/// digit-serial butterfly each cycle; the sum goes to lane `i`, the
/// difference to lane `i + half`, each through an output register and its
/// own multiplier. Lanes that need no rotation multiply by Montgomery one.
#[derive(Debug, Clone)]
pub(crate) struct ParallelLayer<W: Word> {
    pub(crate) index: usize,
    half: usize,
    nd: usize,
    bfus: Vec<DigitSerialButterfly<W>>,
    out_regs: Vec<Option<(W, usize)>>,
    pub(crate) mults: Vec<SystolicMultiplier<W>>,
    twiddles: Vec<TwiddleSchedule<W>>,
    pos: usize,
    pub(crate) busy_cycles: u64,
}

impl<W: Word> ParallelLayer<W> {
    pub(crate) fn new(
        index: usize,
        lanes: usize,
        ctx: &MontgomeryContext<W>,
        pe_latency: u32,
        twiddles: Vec<TwiddleSchedule<W>>,
    ) -> Result<Self> {
        let four_q = ctx.two_q().clone() + ctx.two_q().clone();
        let mults = (0..lanes)
            .map(|_| SystolicMultiplier::with_lhs_bound(ctx, pe_latency, four_q.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            index,
            half: lanes >> (index + 1),
            nd: ctx.num_digits(),
            bfus: (0..lanes / 2)
                .map(|_| DigitSerialButterfly::new(ctx))
                .collect(),
            out_regs: vec![None; lanes],
            mults,
            twiddles,
            pos: 0,
            busy_cycles: 0,
        })
    }

    pub(crate) fn tick(
        &mut self,
        inputs: &[Option<W>],
        outputs: &mut Vec<Option<W>>,
    ) -> Result<()> {
        outputs.clear();
        let mut any = false;
        for (lane, mult) in self.mults.iter_mut().enumerate() {
            let out = match self.out_regs[lane].take() {
                Some((v, digit)) => {
                    any = true;
                    let tw = self.twiddles[lane].digit(0, digit);
                    mult.tick(Some(&v), Some(tw))?
                }
                None => mult.tick(None, None)?,
            };
            outputs.push(out);
        }
        if any {
            self.busy_cycles += 1;
        }

        let present = inputs.iter().filter(|x| x.is_some()).count();
        if present == 0 {
            return Ok(());
        }
        if present != inputs.len() {
            return Err(Error::StreamBubble);
        }
        let digit = self.pos;
        let mut unit = 0;
        for block in (0..inputs.len()).step_by(2 * self.half) {
            for top in block..block + self.half {
                let bottom = top + self.half;
                let a = inputs[top].as_ref().expect("checked above");
                let b = inputs[bottom].as_ref().expect("checked above");
                let (sum, diff) = self.bfus[unit].tick(a, b)?;
                self.out_regs[top] = Some((sum, digit));
                self.out_regs[bottom] = Some((diff, digit));
                unit += 1;
            }
        }
        self.pos = (self.pos + 1) % self.nd;
        Ok(())
    }
}
