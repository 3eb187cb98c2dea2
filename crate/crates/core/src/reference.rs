//! Plain-arithmetic transform oracles.
//!
//! Nothing here touches Montgomery form; these are the ground truth the
//! simulator is compared against. They favour directness over speed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::NttDomain;
use crate::word::{parse_decimal, Word};

/// `n` plain residues in `[0, q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientVector<W: Word> {
    q: W,
    values: Vec<W>,
}

impl<W: Word> CoefficientVector<W> {
    pub fn new(values: Vec<W>, domain: &NttDomain<W>) -> Result<Self> {
        check_vector(&values, domain)?;
        Ok(Self {
            q: domain.q().clone(),
            values,
        })
    }

    pub fn q(&self) -> &W {
        &self.q
    }

    pub fn values(&self) -> &[W] {
        &self.values
    }

    pub fn into_values(self) -> Vec<W> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_document(&self) -> VectorDocument {
        VectorDocument {
            q: self.q.to_string(),
            n: self.values.len(),
            values: self.values.iter().map(|v| v.to_string()).collect(),
        }
    }

    /// Reads a `{"q", "n", "values"}` document and checks it against `domain`.
    pub fn from_json(json: &str, domain: &NttDomain<W>) -> Result<Self> {
        let doc: VectorDocument = serde_json::from_str(json)?;
        doc.into_vector(domain)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("document serializes")
    }
}

/// JSON form of a coefficient vector; integers are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorDocument {
    pub q: String,
    pub n: usize,
    pub values: Vec<String>,
}

impl VectorDocument {
    pub fn into_vector<W: Word>(self, domain: &NttDomain<W>) -> Result<CoefficientVector<W>> {
        let q: W = parse_decimal(&self.q)?;
        if &q != domain.q() {
            return Err(Error::Document(format!(
                "vector modulus {} does not match domain modulus {}",
                self.q,
                domain.q()
            )));
        }
        if self.n != self.values.len() {
            return Err(Error::Document(format!(
                "n = {} but {} values given",
                self.n,
                self.values.len()
            )));
        }
        let values = self
            .values
            .iter()
            .map(|s| parse_decimal(s))
            .collect::<Result<Vec<W>>>()?;
        CoefficientVector::new(values, domain)
    }
}

pub(crate) fn check_vector<W: Word>(values: &[W], domain: &NttDomain<W>) -> Result<()> {
    if values.len() != domain.n() {
        return Err(Error::LengthMismatch {
            expected: domain.n(),
            got: values.len(),
        });
    }
    if let Some(bad) = values.iter().find(|v| *v >= domain.q()) {
        return Err(Error::OutOfRange {
            what: "coefficient",
            value: bad.to_string(),
            bound: domain.q().to_string(),
        });
    }
    Ok(())
}

/// Reverses the low `bits` bits of `i`.
pub fn bit_reverse_index(i: usize, bits: u32) -> usize {
    if bits == 0 {
        return 0;
    }
    i.reverse_bits() >> (usize::BITS - bits)
}

/// `out[i] = v[bitrev(i)]`; an involution for power-of-two lengths.
pub fn bit_reverse_permute<T: Clone>(v: &[T]) -> Vec<T> {
    assert!(v.len().is_power_of_two(), "length must be a power of two");
    let bits = v.len().trailing_zeros();
    (0..v.len())
        .map(|i| v[bit_reverse_index(i, bits)].clone())
        .collect()
}

fn mul_mod<W: Word>(a: &W, b: &W, q: &W) -> W {
    a.clone() * b.clone() % q.clone()
}

fn add_mod<W: Word>(a: &W, b: &W, q: &W) -> W {
    (a.clone() + b.clone()) % q.clone()
}

fn pow_mod<W: Word>(base: &W, mut e: u64, q: &W) -> W {
    let mut acc = W::one() % q.clone();
    let mut b = base.clone() % q.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &b, q);
        }
        b = mul_mod(&b, &b, q);
        e >>= 1;
    }
    acc
}

fn direct_transform<W: Word>(a: &[W], root: &W, q: &W) -> Vec<W> {
    let n = a.len();
    (0..n)
        .map(|k| {
            let step = pow_mod(root, k as u64, q);
            let mut w = W::one();
            let mut acc = W::zero();
            for x in a {
                acc = add_mod(&acc, &mul_mod(x, &w, q), q);
                w = mul_mod(&w, &step, q);
            }
            acc
        })
        .collect()
}

/// `A_k = sum_j a_j omega^(jk) mod q`, natural order, by the double loop.
pub fn naive_ntt<W: Word>(a: &[W], domain: &NttDomain<W>) -> Result<Vec<W>> {
    check_vector(a, domain)?;
    Ok(direct_transform(a, domain.omega(), domain.q()))
}

/// `a_j = n^-1 sum_k A_k omega^(-jk) mod q`, natural order.
pub fn naive_intt<W: Word>(a: &[W], domain: &NttDomain<W>) -> Result<Vec<W>> {
    check_vector(a, domain)?;
    let q = domain.q();
    Ok(direct_transform(a, domain.omega_inv(), q)
        .iter()
        .map(|v| mul_mod(v, domain.n_inv(), q))
        .collect())
}

/// Radix-2 decimation-in-frequency forward transform; output in
/// bit-reversed order.
///
/// Stage `s` pairs elements `half = n / 2^(s+1)` apart and multiplies the
/// difference by `omega^(k 2^s)`, `k` the offset within the block.
pub fn iterative_ntt<W: Word>(a: &[W], domain: &NttDomain<W>) -> Result<Vec<W>> {
    check_vector(a, domain)?;
    let q = domain.q();
    let n = a.len();
    let mut v = a.to_vec();
    for s in 0..domain.log_n() {
        let half = n >> (s + 1);
        let step = pow_mod(domain.omega(), 1u64 << s, q);
        for block in (0..n).step_by(2 * half) {
            let mut w = W::one();
            for j in block..block + half {
                let (u, t) = (v[j].clone(), v[j + half].clone());
                v[j] = add_mod(&u, &t, q);
                v[j + half] = mul_mod(&add_mod(&u, &(q.clone() - t), q), &w, q);
                w = mul_mod(&w, &step, q);
            }
        }
    }
    Ok(v)
}

/// `c_k = sum_{i + j = k mod n} a_i b_j mod q`, schoolbook.
pub fn cyclic_convolve<W: Word>(a: &[W], b: &[W], domain: &NttDomain<W>) -> Result<Vec<W>> {
    check_vector(a, domain)?;
    check_vector(b, domain)?;
    let q = domain.q();
    let n = a.len();
    let mut c = vec![W::zero(); n];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let k = (i + j) % n;
            c[k] = add_mod(&c[k], &mul_mod(x, y, q), q);
        }
    }
    Ok(c)
}

/// Element-wise product mod `q`.
pub fn pointwise_mul<W: Word>(a: &[W], b: &[W], q: &W) -> Vec<W> {
    a.iter().zip(b).map(|(x, y)| mul_mod(x, y, q)).collect()
}
