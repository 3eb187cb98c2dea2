//! Digit-serial transport and arithmetic units.
//!
//! Words travel least-significant digit first, one `d`-bit digit per cycle,
//! `num_digits = r_exp / d` digits per word. Every value the datapath
//! produces (redundant residues below `2q`, butterfly sums and differences
//! below `4q`) is smaller than `R / 2`, so a word always fits in exactly
//! `num_digits` digits and no widening digit is ever needed.
//!
//! # Systolic multiplier
//!
//! The array has one processing element per digit of the multiplier
//! operand. PE `i` holds the running value `S` and performs
//!
//! ```text
//! S   = S + a * b_i                            (first multiply-add)
//! m_i = (S mod 2^d) * (-q^-1 mod 2^d) mod 2^d
//! S   = (S + m_i * q) / 2^d                    (second multiply-add, drop a digit)
//! ```
//!
//! After the last PE, `sum m_i 2^(d i) = (a b (-q^-1)) mod R`, so the result
//! is exactly `(a b + q [a b (-q^-1)]_R) / R`, the word-level REDC. The
//! model below is clocked at digit granularity but evaluates each operation
//! with the word-level formula once all operand digits have arrived, then
//! re-serialises the result; [`digit_recurrence_mont_mul`] evaluates the
//! recurrence itself so the two can be compared.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::montcore::{mont_mul_lazy, redc_raw, RedundantResidue};
use crate::params::MontgomeryContext;
use crate::word::{from_u64, low_bits, pow2, Word};

/// A word as `num_digits` digits of `d` bits, least significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitStream<W: Word> {
    d: u32,
    digits: Vec<W>,
}

impl<W: Word> DigitStream<W> {
    /// Wraps raw digits after checking each is below `2^d`.
    pub fn from_digits(digits: Vec<W>, d: u32) -> Result<Self> {
        let limit = pow2::<W>(d);
        if let Some(bad) = digits.iter().find(|x| **x >= limit) {
            return Err(Error::OutOfRange {
                what: "digit",
                value: bad.to_string(),
                bound: limit.to_string(),
            });
        }
        Ok(Self { d, digits })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn digits(&self) -> &[W] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digit(&self, i: usize) -> &W {
        &self.digits[i]
    }
}

/// Splits `x < R` into `num_digits` digits.
pub fn decompose<W: Word>(x: &W, ctx: &MontgomeryContext<W>) -> Result<DigitStream<W>> {
    if x >= ctx.radix() {
        return Err(Error::OutOfRange {
            what: "word",
            value: x.to_string(),
            bound: ctx.radix().to_string(),
        });
    }
    Ok(split(x, ctx.d(), ctx.num_digits()))
}

pub(crate) fn split<W: Word>(x: &W, d: u32, count: usize) -> DigitStream<W> {
    let mask = pow2::<W>(d) - W::one();
    let mut rest = x.clone();
    let mut digits = Vec::with_capacity(count);
    for _ in 0..count {
        digits.push(rest.clone() & mask.clone());
        rest = rest >> d as usize;
    }
    DigitStream { d, digits }
}

/// `sum digits[i] 2^(d i)`.
pub fn recompose<W: Word>(s: &DigitStream<W>, ctx: &MontgomeryContext<W>) -> Result<W> {
    if s.len() != ctx.num_digits() {
        return Err(Error::StreamLength {
            expected: ctx.num_digits(),
            got: s.len(),
        });
    }
    if s.d != ctx.d() {
        return Err(Error::InvalidConfig(format!(
            "stream has {}-bit digits, context uses {}",
            s.d,
            ctx.d()
        )));
    }
    Ok(join(&s.digits, ctx.d()))
}

pub(crate) fn join<W: Word>(digits: &[W], d: u32) -> W {
    digits
        .iter()
        .rev()
        .fold(W::zero(), |acc, x| (acc << d as usize) | x.clone())
}

/// Evaluates the per-PE digit recurrence described in the module docs.
pub fn digit_recurrence_mont_mul<W: Word>(a: &W, b: &W, ctx: &MontgomeryContext<W>) -> W {
    let d = ctx.d();
    let q_prime = low_bits(ctx.neg_q_inv().clone(), d);
    let b_digits = split(b, d, ctx.num_digits());
    let mut s = W::zero();
    for b_i in b_digits.digits() {
        s = s + a.clone() * b_i.clone();
        let m_i = low_bits(s.clone(), d).mul_low(&q_prime, d);
        s = (s + m_i * ctx.q().clone()) >> d as usize;
    }
    s
}

/// Clocked model of the digit-serial systolic Montgomery multiplier.
///
/// Call [`tick`](Self::tick) once per cycle with the digit pair present on
/// the input links (or `None` when idle). An operation occupies
/// `num_digits` consecutive cycles; its result leaves one digit per cycle,
/// the first `pe_latency * pe_count` cycles after its first input digit.
#[derive(Debug, Clone)]
pub struct SystolicMultiplier<W: Word> {
    ctx: MontgomeryContext<W>,
    pe_latency: u32,
    lhs_bound: W,
    rhs_bound: W,
    digit_limit: W,
    cycle: u64,
    lhs: Vec<W>,
    rhs: Vec<W>,
    op_start: u64,
    pending: VecDeque<(u64, W)>,
    ops_completed: u64,
    range_violations: u64,
}

impl<W: Word> SystolicMultiplier<W> {
    /// Multiplier for redundant operands (both below `2q`).
    pub fn new(ctx: &MontgomeryContext<W>, pe_latency: u32) -> Result<Self> {
        Self::with_lhs_bound(ctx, pe_latency, ctx.two_q().clone())
    }

    /// Multiplier whose data operand may reach `lhs_bound` (the butterfly
    /// feeds sums and differences below `4q`). The twiddle operand stays
    /// below `2q`. `lhs_bound * 2q` must not exceed `qR`.
    pub fn with_lhs_bound(
        ctx: &MontgomeryContext<W>,
        pe_latency: u32,
        lhs_bound: W,
    ) -> Result<Self> {
        if pe_latency == 0 {
            return Err(Error::InvalidConfig(
                "pe_latency must be at least one cycle".into(),
            ));
        }
        if lhs_bound.clone() * ctx.two_q().clone() > ctx.redc_limit() {
            return Err(Error::InvalidConfig(format!(
                "operand bound {lhs_bound} can overflow the REDC contract"
            )));
        }
        Ok(Self {
            ctx: ctx.clone(),
            pe_latency,
            lhs_bound,
            rhs_bound: ctx.two_q().clone(),
            digit_limit: pow2(ctx.d()),
            cycle: 0,
            lhs: Vec::with_capacity(ctx.num_digits()),
            rhs: Vec::with_capacity(ctx.num_digits()),
            op_start: 0,
            pending: VecDeque::new(),
            ops_completed: 0,
            range_violations: 0,
        })
    }

    /// Number of processing elements, one per digit.
    pub fn pe_count(&self) -> usize {
        self.ctx.num_digits()
    }

    pub fn pe_latency(&self) -> u32 {
        self.pe_latency
    }

    /// Cycles from an operation's first input digit to its first output digit.
    pub fn latency(&self) -> u64 {
        u64::from(self.pe_latency) * self.pe_count() as u64
    }

    /// Cycles ticked so far.
    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn ops_completed(&self) -> u64 {
        self.ops_completed
    }

    /// Operations whose operands exceeded the declared bounds.
    pub fn range_violations(&self) -> u64 {
        self.range_violations
    }

    /// Whether an operation is partially loaded or results are still draining.
    pub fn is_busy(&self) -> bool {
        !self.lhs.is_empty() || !self.pending.is_empty()
    }

    /// Advances one cycle. Returns the output digit for this cycle, if any.
    pub fn tick(&mut self, lhs: Option<&W>, rhs: Option<&W>) -> Result<Option<W>> {
        match (lhs, rhs) {
            (Some(a), Some(b)) => {
                if *a >= self.digit_limit || *b >= self.digit_limit {
                    return Err(Error::DigitOverflow {
                        unit: "systolic multiplier input",
                    });
                }
                if self.lhs.is_empty() {
                    self.op_start = self.cycle;
                }
                self.lhs.push(a.clone());
                self.rhs.push(b.clone());
                if self.lhs.len() == self.ctx.num_digits() {
                    self.complete_operation();
                }
            }
            (None, None) => {
                if !self.lhs.is_empty() {
                    return Err(Error::StreamBubble);
                }
            }
            _ => return Err(Error::StreamBubble),
        }
        let out = match self.pending.front() {
            Some((at, _)) if *at == self.cycle => self.pending.pop_front().map(|(_, x)| x),
            _ => None,
        };
        self.cycle += 1;
        Ok(out)
    }

    fn complete_operation(&mut self) {
        let d = self.ctx.d();
        let a = join(&self.lhs, d);
        let b = join(&self.rhs, d);
        self.lhs.clear();
        self.rhs.clear();
        let result = if a < self.lhs_bound && b < self.rhs_bound {
            redc_raw(&(a * b), &self.ctx)
        } else {
            // Out-of-contract operands: evaluate without overflow, keep the
            // digits that fit the link and count the event.
            self.range_violations += 1;
            let ctx = &self.ctx;
            let p = a.to_biguint() * b.to_biguint();
            let r_exp = ctx.r_exp() as usize;
            let mask = (num_bigint::BigUint::from(1u8) << r_exp) - 1u8;
            let m = ((&p & &mask) * ctx.neg_q_inv().to_biguint()) & &mask;
            let v = ((p + ctx.q().to_biguint() * m) >> r_exp) & mask;
            W::from_biguint(&v).expect("masked to the radix width")
        };
        let first = self.op_start + self.latency();
        for (k, digit) in split(&result, d, self.ctx.num_digits())
            .digits
            .into_iter()
            .enumerate()
        {
            self.pending.push_back((first + k as u64, digit));
        }
        self.ops_completed += 1;
    }
}

/// Streams one multiplication through a fresh cycle of `mult`.
///
/// Returns the product stream and the cycles from the first input digit to
/// the first output digit.
pub fn systolic_mont_mul<W: Word>(
    a: &DigitStream<W>,
    b: &DigitStream<W>,
    mult: &mut SystolicMultiplier<W>,
) -> Result<(DigitStream<W>, u64)> {
    let (mut out, timing) =
        stream_products(std::slice::from_ref(a), std::slice::from_ref(b), mult)?;
    Ok((out.pop().expect("one product"), timing.first_output))
}

/// Cycle offsets of a back-to-back run, relative to the first input digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamTiming {
    /// First output digit of the first operation.
    pub first_output: u64,
    /// First output digit of the last operation; equals
    /// `latency + (k - 1) * num_digits` when there are no bubbles.
    pub last_output_start: u64,
    /// One past the last output digit.
    pub finished: u64,
}

/// Feeds `k` operations back to back, one digit pair per cycle without gaps,
/// and collects the `k` results.
pub fn stream_products<W: Word>(
    a: &[DigitStream<W>],
    b: &[DigitStream<W>],
    mult: &mut SystolicMultiplier<W>,
) -> Result<(Vec<DigitStream<W>>, StreamTiming)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let ctx = mult.ctx.clone();
    for (x, y) in a.iter().zip(b) {
        let xv = recompose(x, &ctx)?;
        let yv = recompose(y, &ctx)?;
        for (v, bound, what) in [
            (&xv, &mult.lhs_bound, "multiplicand"),
            (&yv, &mult.rhs_bound, "multiplier"),
        ] {
            if v >= bound {
                return Err(Error::OutOfRange {
                    what,
                    value: v.to_string(),
                    bound: bound.to_string(),
                });
            }
        }
    }
    let nd = ctx.num_digits();
    let start = mult.cycle();
    let inputs = a
        .iter()
        .zip(b)
        .flat_map(|(x, y)| x.digits.iter().zip(&y.digits));
    let mut emitted: Vec<(u64, W)> = Vec::with_capacity(a.len() * nd);
    for (x, y) in inputs {
        let at = mult.cycle();
        if let Some(v) = mult.tick(Some(x), Some(y))? {
            emitted.push((at - start, v));
        }
    }
    while emitted.len() < a.len() * nd {
        let at = mult.cycle();
        if let Some(v) = mult.tick(None, None)? {
            emitted.push((at - start, v));
        }
    }
    let timing = StreamTiming {
        first_output: emitted.first().map_or(0, |e| e.0),
        last_output_start: emitted
            .get(emitted.len().saturating_sub(nd))
            .map_or(0, |e| e.0),
        finished: emitted.last().map_or(0, |e| e.0 + 1),
    };
    let products = emitted
        .chunks(nd)
        .map(|c| DigitStream {
            d: ctx.d(),
            digits: c.iter().map(|e| e.1.clone()).collect(),
        })
        .collect();
    Ok((products, timing))
}

/// Digit-serial adder and `+2q` subtractor sharing one input pair.
///
/// One digit of each operand per cycle; carries ripple to the next cycle.
/// The difference carry lies in `{-1, 0, 1}` because the `2q` offset digit
/// is added in the same slot as the subtraction.
#[derive(Debug, Clone)]
pub struct DigitSerialButterfly<W: Word> {
    d: u32,
    two_q: Vec<W>,
    base: W,
    mask: W,
    sum_carry: W,
    diff_carry: i8,
    pos: usize,
}

impl<W: Word> DigitSerialButterfly<W> {
    pub fn new(ctx: &MontgomeryContext<W>) -> Self {
        Self {
            d: ctx.d(),
            two_q: split(ctx.two_q(), ctx.d(), ctx.num_digits()).digits,
            base: pow2(ctx.d()),
            mask: pow2::<W>(ctx.d()) - W::one(),
            sum_carry: W::zero(),
            diff_carry: 0,
            pos: 0,
        }
    }

    /// Consumes digit `pos` of both operands, returns the matching digits
    /// of `a + b` and `a - b + 2q`.
    pub fn tick(&mut self, a: &W, b: &W) -> Result<(W, W)> {
        if *a >= self.base || *b >= self.base {
            return Err(Error::DigitOverflow {
                unit: "butterfly input",
            });
        }
        let s = a.clone() + b.clone() + self.sum_carry.clone();
        let sum_digit = s.clone() & self.mask.clone();
        self.sum_carry = s >> self.d as usize;

        // v = a + 2q_k + 2^d - b + carry, always in [0, 3 * 2^d)
        let mut v = a.clone() + self.two_q[self.pos].clone() + self.base.clone() - b.clone();
        match self.diff_carry {
            1 => v = v + W::one(),
            -1 => v = v - W::one(),
            _ => {}
        }
        let diff_digit = v.clone() & self.mask.clone();
        let hi = (v >> self.d as usize).to_u8().expect("carry is at most 2");
        self.diff_carry = hi as i8 - 1;

        self.pos += 1;
        if self.pos == self.two_q.len() {
            if !self.sum_carry.is_zero() || self.diff_carry != 0 {
                return Err(Error::DigitOverflow {
                    unit: "butterfly word boundary",
                });
            }
            self.pos = 0;
        }
        Ok((sum_digit, diff_digit))
    }

    /// Whether the unit sits on a word boundary with no carry in flight.
    pub fn is_aligned(&self) -> bool {
        self.pos == 0 && self.sum_carry.is_zero() && self.diff_carry == 0
    }
}

/// Digit-serial `a + b` and `a - b + 2q` for operands below `2q`.
pub fn digit_serial_addsub<W: Word>(
    a: &DigitStream<W>,
    b: &DigitStream<W>,
    ctx: &MontgomeryContext<W>,
) -> Result<(DigitStream<W>, DigitStream<W>)> {
    for s in [a, b] {
        RedundantResidue::new(recompose(s, ctx)?, ctx)?;
    }
    let mut unit = DigitSerialButterfly::new(ctx);
    let mut sum = Vec::with_capacity(a.len());
    let mut diff = Vec::with_capacity(a.len());
    for (x, y) in a.digits.iter().zip(&b.digits) {
        let (s, t) = unit.tick(x, y)?;
        sum.push(s);
        diff.push(t);
    }
    Ok((
        DigitStream {
            d: ctx.d(),
            digits: sum,
        },
        DigitStream {
            d: ctx.d(),
            digits: diff,
        },
    ))
}

/// Word-level reference for a single multiplication, used to cross-check the
/// clocked model.
pub fn word_mont_mul<W: Word>(a: &W, b: &W, ctx: &MontgomeryContext<W>) -> Result<W> {
    let a = RedundantResidue::new(a.clone(), ctx)?;
    let b = RedundantResidue::new(b.clone(), ctx)?;
    Ok(mont_mul_lazy(&a, &b, ctx)?.into_value())
}

/// Digit stream of the small constant `v`.
pub fn constant_stream<W: Word>(v: u64, ctx: &MontgomeryContext<W>) -> Result<DigitStream<W>> {
    decompose(&from_u64(v), ctx)
}
