//! NTT-friendly primes, roots of unity, Montgomery contexts and twiddle
//! schedules.
//!
//! All search procedures are deterministic (they return the smallest
//! qualifying value) so fixtures stay stable. Number-theoretic work is done
//! in arbitrary precision and converted into the context's word type once.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_prime::nt_funcs::is_prime;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montcore::{to_montgomery, RedundantResidue};
use crate::word::{convert, from_u64, holds_bits, Word};

/// Transform direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Inverse => "inverse",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "inverse" => Ok(Direction::Inverse),
            other => Err(Error::InvalidConfig(format!("unknown direction {other:?}"))),
        }
    }
}

/// Modulus, radix and digit geometry shared by every arithmetic unit.
///
/// `R = 2^r_exp` is the smallest power of two above `8q` whose exponent is a
/// whole number of `d`-bit digits, so a word in the redundant range and the
/// sums formed from it always travel as exactly `num_digits` digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MontgomeryContext<W: Word> {
    q: W,
    w: u32,
    d: u32,
    r_exp: u32,
    num_digits: usize,
    neg_q_inv: W,
    two_q: W,
    radix: W,
    mont_one: W,
}

impl<W: Word> MontgomeryContext<W> {
    /// Builds a context with an explicit radix exponent.
    ///
    /// Unlike [`build_context`] this accepts radices that violate `R > 8q`
    /// (only `R > q` is required), which is how the margin experiments
    /// construct undersized contexts. Such contexts report
    /// `satisfies_radix_rule() == false` and the lazy butterfly refuses them.
    pub fn with_radix_exponent(q: &W, d: u32, r_exp: u32) -> Result<Self> {
        let q_big = q.to_biguint();
        if q_big.is_even() || q_big < BigUint::from(3u8) {
            return Err(Error::InvalidModulus(q.to_string()));
        }
        if d == 0 {
            return Err(Error::ZeroDigitSize);
        }
        if !r_exp.is_multiple_of(d) {
            return Err(Error::InvalidRadix {
                q: q.to_string(),
                r_exp,
                reason: "exponent is not a whole number of digits",
            });
        }
        let radix = BigUint::one() << r_exp as usize;
        if radix <= q_big {
            return Err(Error::InvalidRadix {
                q: q.to_string(),
                r_exp,
                reason: "radix must exceed the modulus",
            });
        }

        // Largest intermediate: REDC numerator < 2qR, or the raw products
        // 8q^2 formed by undersized-radix experiments.
        let span = (&radix).max(&(&q_big * 8u32)).clone();
        let required = (&q_big * &span * 2u32).bits() as u32;
        if !holds_bits::<W>(required) {
            return Err(Error::WordTooNarrow {
                word: W::NAME,
                capacity: W::CAPACITY_BITS.unwrap_or(u32::MAX),
                required,
            });
        }

        let q_inv = mod_inverse(&q_big, &radix).expect("odd modulus is a unit mod 2^k");
        let neg_q_inv = &radix - q_inv;
        let mont_one = &radix % &q_big;

        Ok(Self {
            q: q.clone(),
            w: q_big.bits() as u32,
            d,
            r_exp,
            num_digits: (r_exp / d) as usize,
            neg_q_inv: convert(&neg_q_inv)?,
            two_q: convert(&(&q_big * 2u32))?,
            radix: convert(&radix)?,
            mont_one: convert(&mont_one)?,
        })
    }

    pub fn q(&self) -> &W {
        &self.q
    }

    /// Bit width `ceil(log2 q)`.
    pub fn w(&self) -> u32 {
        self.w
    }

    /// Digit size in bits.
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn r_exp(&self) -> u32 {
        self.r_exp
    }

    /// Digits per transported word, `r_exp / d`.
    pub fn num_digits(&self) -> usize {
        self.num_digits
    }

    /// `(-q^-1) mod R`.
    pub fn neg_q_inv(&self) -> &W {
        &self.neg_q_inv
    }

    pub fn two_q(&self) -> &W {
        &self.two_q
    }

    /// `R = 2^r_exp`.
    pub fn radix(&self) -> &W {
        &self.radix
    }

    /// `R mod q`, the Montgomery form of one.
    pub fn mont_one(&self) -> &W {
        &self.mont_one
    }

    /// `2^r_exp > 8q`.
    pub fn satisfies_radix_rule(&self) -> bool {
        self.radix > self.q.clone() * from_u64::<W>(8)
    }

    /// `q * R`, the exclusive upper bound on REDC inputs.
    pub fn redc_limit(&self) -> W {
        self.q.clone() * self.radix.clone()
    }
}

/// Smallest prime `q` with `2^(bits-1) <= q < 2^bits` and `q = 1 (mod n)`.
pub fn find_ntt_prime<W: Word>(bits: u32, n: usize) -> Result<W> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if bits < 2 {
        return Err(Error::NoPrimeFound { bits, n });
    }
    let lo = BigUint::one() << (bits - 1) as usize;
    let hi = BigUint::one() << bits as usize;
    let step = BigUint::from(n);
    // smallest candidate >= lo with candidate = 1 (mod n)
    let rem = &lo % &step;
    let mut c = &lo + ((&step + 1u32 - rem) % &step);
    let three = BigUint::from(3u8);
    while c < hi {
        if c >= three && c.is_odd() && is_prime(&c, None).probably() {
            return convert(&c);
        }
        c += &step;
    }
    Err(Error::NoPrimeFound { bits, n })
}

/// Smallest primitive `n`-th root of unity modulo the prime `q`
/// (1 when `n == 1`).
pub fn find_primitive_root<W: Word>(q: &W, n: usize) -> Result<W> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let q_big = q.to_biguint();
    let q_minus_1 = &q_big - 1u32;
    if q_big < BigUint::from(3u8) || !(&q_minus_1 % n).is_zero() {
        return Err(Error::NoRootOfUnity {
            q: q.to_string(),
            n,
        });
    }
    if n == 1 {
        return Ok(W::one());
    }
    if !is_prime(&q_big, None).probably() {
        return Err(Error::NotPrime(q.to_string()));
    }
    // For a power-of-two n, w is a primitive n-th root iff w^(n/2) = -1.
    let exp = &q_minus_1 / n;
    let half = BigUint::from(n / 2);
    let seed = (2u32..)
        .map(|g| BigUint::from(g).modpow(&exp, &q_big))
        .find(|c| c.modpow(&half, &q_big) == q_minus_1)
        .expect("a prime field has a generator");
    // The primitive n-th roots are exactly seed^k for odd k.
    let seed_sq = &seed * &seed % &q_big;
    let mut best = seed.clone();
    let mut cur = seed;
    for _ in 1..n / 2 {
        cur = &cur * &seed_sq % &q_big;
        if cur < best {
            best = cur.clone();
        }
    }
    convert(&best)
}

/// Context for `q` with the smallest digit-aligned radix satisfying `R > 8q`.
pub fn build_context<W: Word>(q: &W, d: u32) -> Result<MontgomeryContext<W>> {
    if d == 0 {
        return Err(Error::ZeroDigitSize);
    }
    let w = q.bit_length();
    // 8q < 2^(w+3) and 8q > 2^(w+2), so w+3 is the smallest admissible exponent.
    let r_exp = (w + 3).div_ceil(d) * d;
    MontgomeryContext::with_radix_exponent(q, d, r_exp)
}

/// Transform size, roots and per-stage Montgomery twiddles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NttDomain<W: Word> {
    n: usize,
    ctx: MontgomeryContext<W>,
    direction: Direction,
    omega: W,
    omega_inv: W,
    n_inv: W,
    mont_one: RedundantResidue<W>,
    scaling: Option<RedundantResidue<W>>,
    twiddles: Vec<Vec<RedundantResidue<W>>>,
}

/// Builds the domain for an `n`-point transform over `q` with `d`-bit digits.
///
/// Stage `s` (0-based, decimation in frequency, natural-order input) uses
/// `root^(k * 2^s)` for `k < n / 2^(s+1)`, where `root` is `omega` for the
/// forward transform and `omega^-1` for the inverse. Inverse domains also
/// carry `n^-1` in Montgomery form as the final scaling constant. A
/// one-point domain has a single pass-through table holding Montgomery one.
pub fn build_domain<W: Word>(
    q: &W,
    n: usize,
    d: u32,
    direction: Direction,
) -> Result<NttDomain<W>> {
    let ctx = build_context(q, d)?;
    let omega = find_primitive_root(q, n)?;
    let q_big = q.to_biguint();
    let omega_big = omega.to_biguint();
    let omega_inv = mod_inverse(&omega_big, &q_big).expect("root of unity is a unit");
    let n_inv = mod_inverse(&BigUint::from(n), &q_big).expect("n divides q - 1");
    let root = match direction {
        Direction::Forward => omega_big.clone(),
        Direction::Inverse => omega_inv.clone(),
    };

    let mont = |v: &BigUint| -> Result<RedundantResidue<W>> { to_montgomery(&convert(v)?, &ctx) };
    let mont_one = RedundantResidue::from_raw(ctx.mont_one().clone());

    let twiddles = if n == 1 {
        vec![vec![mont_one.clone()]]
    } else {
        let log_n = n.trailing_zeros();
        (0..log_n)
            .map(|s| {
                let step = root.modpow(&BigUint::from(1u64 << s), &q_big);
                let mut cur = BigUint::one();
                let mut table = Vec::with_capacity(n >> (s + 1));
                for _ in 0..(n >> (s + 1)) {
                    table.push(mont(&cur)?);
                    cur = cur * &step % &q_big;
                }
                Ok(table)
            })
            .collect::<Result<Vec<_>>>()?
    };

    let scaling = match direction {
        Direction::Forward => None,
        Direction::Inverse => Some(mont(&n_inv)?),
    };

    Ok(NttDomain {
        n,
        direction,
        omega: convert(&omega_big)?,
        omega_inv: convert(&omega_inv)?,
        n_inv: convert(&n_inv)?,
        mont_one,
        scaling,
        twiddles,
        ctx,
    })
}

impl<W: Word> NttDomain<W> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn log_n(&self) -> u32 {
        self.n.trailing_zeros()
    }

    pub fn ctx(&self) -> &MontgomeryContext<W> {
        &self.ctx
    }

    pub fn q(&self) -> &W {
        self.ctx.q()
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn omega(&self) -> &W {
        &self.omega
    }

    pub fn omega_inv(&self) -> &W {
        &self.omega_inv
    }

    pub fn n_inv(&self) -> &W {
        &self.n_inv
    }

    /// The root this domain's twiddles are powers of.
    pub fn root(&self) -> &W {
        match self.direction {
            Direction::Forward => &self.omega,
            Direction::Inverse => &self.omega_inv,
        }
    }

    pub fn mont_one(&self) -> &RedundantResidue<W> {
        &self.mont_one
    }

    /// `n^-1` in Montgomery form for inverse domains.
    pub fn scaling(&self) -> Option<&RedundantResidue<W>> {
        self.scaling.as_ref()
    }

    pub fn twiddle_tables(&self) -> &[Vec<RedundantResidue<W>>] {
        &self.twiddles
    }

    pub fn twiddles(&self, stage: usize) -> &[RedundantResidue<W>] {
        &self.twiddles[stage]
    }

    /// `root^e mod q` in plain arithmetic.
    pub fn root_power(&self, e: u64) -> W {
        let q = self.q().to_biguint();
        let v = self.root().to_biguint().modpow(&BigUint::from(e), &q);
        convert(&v).expect("residue fits the context word")
    }

    /// Montgomery form of `root^e * scale`, `scale` in plain arithmetic.
    pub fn mont_root_power(&self, e: u64, scale: Option<&W>) -> RedundantResidue<W> {
        let q = self.q().to_biguint();
        let mut v = self.root().to_biguint().modpow(&BigUint::from(e), &q);
        if let Some(s) = scale {
            v = v * s.to_biguint() % &q;
        }
        let v: W = convert(&v).expect("residue fits the context word");
        to_montgomery(&v, &self.ctx).expect("reduced residue")
    }

    /// Montgomery forms of `root^e * scale` for `e < n`, by repeated
    /// multiplication.
    pub fn mont_root_powers(&self, scale: Option<&W>) -> Vec<RedundantResidue<W>> {
        let q = self.q();
        let root = self.root();
        let mut cur = scale.cloned().unwrap_or_else(W::one) % q.clone();
        let mut out = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            out.push(to_montgomery(&cur, &self.ctx).expect("reduced residue"));
            cur = cur * root.clone() % q.clone();
        }
        out
    }

    pub fn to_document(&self) -> DomainDocument {
        let s = |v: &W| v.to_string();
        DomainDocument {
            word: W::NAME.to_string(),
            q: s(self.q()),
            n: self.n,
            d: self.ctx.d,
            r_exp: self.ctx.r_exp,
            num_digits: self.ctx.num_digits,
            neg_q_inv: s(&self.ctx.neg_q_inv),
            direction: self.direction,
            omega: s(&self.omega),
            omega_inv: s(&self.omega_inv),
            n_inv: s(&self.n_inv),
            mont_one: s(self.mont_one.value()),
            scaling: self.scaling.as_ref().map(|r| s(r.value())),
            twiddles: self
                .twiddles
                .iter()
                .map(|t| t.iter().map(|r| s(r.value())).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }

    /// Rebuilds a domain from its JSON document, rejecting documents that do
    /// not match what [`build_domain`] derives from `(q, n, d, direction)`.
    pub fn from_json(json: &str) -> Result<Self> {
        let doc: DomainDocument = serde_json::from_str(json)?;
        let q: W = crate::word::parse_decimal(&doc.q)?;
        let domain = build_domain(&q, doc.n, doc.d, doc.direction)?;
        let mut rebuilt = domain.to_document();
        rebuilt.word = doc.word.clone();
        if rebuilt != doc {
            return Err(Error::Document(
                "domain document is inconsistent with its parameters".into(),
            ));
        }
        Ok(domain)
    }
}

/// JSON form of an [`NttDomain`]; integers are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainDocument {
    pub word: String,
    pub q: String,
    pub n: usize,
    pub d: u32,
    pub r_exp: u32,
    pub num_digits: usize,
    pub neg_q_inv: String,
    pub direction: Direction,
    pub omega: String,
    pub omega_inv: String,
    pub n_inv: String,
    pub mont_one: String,
    pub scaling: Option<String>,
    pub twiddles: Vec<Vec<String>>,
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub(crate) fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let a = BigInt::from_biguint(Sign::Plus, a.clone());
    let m = BigInt::from_biguint(Sign::Plus, m.clone());
    let egcd = a.extended_gcd(&m);
    if !egcd.gcd.is_one() {
        return None;
    }
    egcd.x.mod_floor(&m).to_biguint()
}
