//! Word-level lazy Montgomery arithmetic.
//!
//! Values live in the redundant range `[0, 2q)`. With `R > 8q` the butterfly
//! operands stay below `4q` and twiddles below `2q`, so every product is
//! below `8q^2 < qR` and REDC returns a value below `2q` again. No
//! conditional subtraction is needed until [`finalize`].

use crate::error::{Error, Result};
use crate::params::MontgomeryContext;
use crate::word::Word;

/// An integer in `[0, 2q)` standing for a residue modulo `q`.
///
/// Every residue `v < q` has two encodings, `v` and `v + q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RedundantResidue<W: Word> {
    value: W,
}

impl<W: Word> RedundantResidue<W> {
    /// Checked constructor: `value < 2q`.
    pub fn new(value: W, ctx: &MontgomeryContext<W>) -> Result<Self> {
        check_below(&value, ctx.two_q(), "redundant residue")?;
        Ok(Self { value })
    }

    pub(crate) fn from_raw(value: W) -> Self {
        Self { value }
    }

    pub fn value(&self) -> &W {
        &self.value
    }

    pub fn into_value(self) -> W {
        self.value
    }
}

fn check_below<W: Word>(value: &W, bound: &W, what: &'static str) -> Result<()> {
    if value >= bound {
        return Err(Error::OutOfRange {
            what,
            value: value.to_string(),
            bound: bound.to_string(),
        });
    }
    Ok(())
}

/// `a R mod q` for a plain residue `a < q`.
pub fn to_montgomery<W: Word>(a: &W, ctx: &MontgomeryContext<W>) -> Result<RedundantResidue<W>> {
    check_below(a, ctx.q(), "plain residue")?;
    let v = (a.clone() << ctx.r_exp() as usize) % ctx.q().clone();
    Ok(RedundantResidue::from_raw(v))
}

/// `(p + q * [p * (-q^-1)]_R) / R` with no range check on `p`.
///
/// Exact for any `p`; the `< 2q` output bound only holds for `p < qR`.
/// Exposed so experiments can evaluate the formula outside its contract.
pub fn redc_raw<W: Word>(p: &W, ctx: &MontgomeryContext<W>) -> W {
    let k = ctx.r_exp();
    let m = crate::word::low_bits(p.clone(), k).mul_low(ctx.neg_q_inv(), k);
    (p.clone() + ctx.q().clone() * m) >> k as usize
}

/// Montgomery reduction for `p < qR`.
pub fn redc<W: Word>(p: &W, ctx: &MontgomeryContext<W>) -> Result<RedundantResidue<W>> {
    if *p >= ctx.redc_limit() {
        return Err(Error::RedcContract {
            value: p.to_string(),
            limit: ctx.redc_limit().to_string(),
        });
    }
    Ok(RedundantResidue::from_raw(redc_raw(p, ctx)))
}

/// `a b R^-1 mod q` for redundant operands.
pub fn mont_mul_lazy<W: Word>(
    a: &RedundantResidue<W>,
    b: &RedundantResidue<W>,
    ctx: &MontgomeryContext<W>,
) -> Result<RedundantResidue<W>> {
    check_below(&a.value, ctx.two_q(), "multiplicand")?;
    check_below(&b.value, ctx.two_q(), "multiplier")?;
    redc(&(a.value.clone() * b.value.clone()), ctx)
}

/// One butterfly: `redc((a_i + a_j) w_add)` and `redc((a_i - a_j + 2q) w_sub)`.
///
/// Requires a context satisfying `R > 8q`; undersized contexts are refused.
pub fn butterfly_lazy<W: Word>(
    a_i: &RedundantResidue<W>,
    a_j: &RedundantResidue<W>,
    w_add: &RedundantResidue<W>,
    w_sub: &RedundantResidue<W>,
    ctx: &MontgomeryContext<W>,
) -> Result<(RedundantResidue<W>, RedundantResidue<W>)> {
    if !ctx.satisfies_radix_rule() {
        return Err(Error::InvalidRadix {
            q: ctx.q().to_string(),
            r_exp: ctx.r_exp(),
            reason: "lazy butterfly needs R > 8q",
        });
    }
    let two_q = ctx.two_q();
    check_below(&a_i.value, two_q, "butterfly input a_i")?;
    check_below(&a_j.value, two_q, "butterfly input a_j")?;
    check_below(&w_add.value, two_q, "twiddle w_add")?;
    check_below(&w_sub.value, two_q, "twiddle w_sub")?;
    let sum = a_i.value.clone() + a_j.value.clone();
    let diff = a_i.value.clone() + two_q.clone() - a_j.value.clone();
    let t_add = redc(&(sum * w_add.value.clone()), ctx)?;
    let t_sub = redc(&(diff * w_sub.value.clone()), ctx)?;
    Ok((t_add, t_sub))
}

/// Leaves the Montgomery domain and applies the single deferred correction.
pub fn finalize<W: Word>(a: &RedundantResidue<W>, ctx: &MontgomeryContext<W>) -> Result<W> {
    check_below(&a.value, ctx.two_q(), "redundant residue")?;
    let r = redc_raw(&a.value, ctx);
    Ok(correct(r, ctx.q()))
}

/// Subtracts `q` once if `v >= q`.
pub(crate) fn correct<W: Word>(v: W, q: &W) -> W {
    if &v >= q {
        v - q.clone()
    } else {
        v
    }
}
