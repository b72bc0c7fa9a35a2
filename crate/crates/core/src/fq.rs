//! The finite field F_q with q = p^e.
//!
//! Elements are plain `u64` handles interpreted through an [`Fq`] context:
//! for e = 1 the handle is the residue mod p, for e > 1 it packs the
//! coordinate vector over F_p (base-p digits, digit i = coefficient of u^i)
//! with respect to an explicit irreducible modulus in F_p[u].

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Hard cap on the characteristic so digit convolutions cannot overflow u64.
const MAX_P: u64 = 1 << 20;
/// Hard cap on the extension degree.
const MAX_E: u32 = 16;

#[derive(Debug)]
struct FqRepr {
    p: u64,
    e: u32,
    q: u64,
    /// Modulus coefficients over F_p, ascending, length e+1, monic.
    /// Empty for e == 1 (no modulus needed).
    modulus: Vec<u64>,
}

/// Context for arithmetic in F_q. Cheap to clone (shared representation).
#[derive(Clone, Debug)]
pub struct Fq(Arc<FqRepr>);

/// An element of F_q, valid only together with its [`Fq`] context.
///
/// The raw value is always in `[0, q)`; for e > 1 it is the base-p packing
/// of the coordinate vector, so the map index -> element is a bijection
/// from `[0, q)` onto F_q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElem(pub(crate) u64);

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus)
    }
}
impl Eq for Fq {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Fq {
    /// The prime field F_p.
    pub fn prime_field(p: u64) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if p > MAX_P {
            return Err(Error::InvalidInput(format!("characteristic {p} too large")));
        }
        Ok(Fq(Arc::new(FqRepr { p, e: 1, q: p, modulus: Vec::new() })))
    }

    /// The extension field F_{p^e} given a monic irreducible modulus over F_p
    /// (coefficients ascending, length e+1).
    pub fn extension_field(p: u64, modulus: Vec<u64>) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if p > MAX_P {
            return Err(Error::InvalidInput(format!("characteristic {p} too large")));
        }
        let e = (modulus.len() as u32).saturating_sub(1);
        if e < 2 || e > MAX_E {
            return Err(Error::InvalidInput(format!(
                "modulus must have degree in 2..={MAX_E}, got {e}"
            )));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidInput("modulus coefficients must lie in [0, p)".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidInput("modulus must be monic".into()));
        }
        let q = p.checked_pow(e).ok_or_else(|| {
            Error::InvalidInput(format!("q = {p}^{e} does not fit in u64"))
        })?;
        let fq = Fq(Arc::new(FqRepr { p, e, q, modulus }));
        if !fq.modulus_is_irreducible() {
            return Err(Error::InvalidInput("modulus is reducible over F_p".into()));
        }
        Ok(fq)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn e(&self) -> u32 {
        self.0.e
    }
    pub fn q(&self) -> u64 {
        self.0.q
    }

    pub fn zero(&self) -> FqElem {
        FqElem(0)
    }
    pub fn one(&self) -> FqElem {
        FqElem(1)
    }

    /// The residue class of an integer (prime-subfield element).
    pub fn from_integer(&self, n: u64) -> FqElem {
        FqElem(n % self.0.p)
    }

    /// The generator u of the extension (only meaningful for e > 1).
    pub fn gen_u(&self) -> Result<FqElem> {
        if self.0.e == 1 {
            return Err(Error::InvalidInput("no generator u in a prime field".into()));
        }
        Ok(FqElem(self.0.p))
    }

    /// The element with the given index in `[0, q)`; the canonical bijection
    /// used by deterministic enumeration.
    pub fn elem_from_index(&self, idx: u64) -> FqElem {
        debug_assert!(idx < self.0.q);
        FqElem(idx)
    }

    pub fn is_zero(&self, a: FqElem) -> bool {
        a.0 == 0
    }

    fn unpack(&self, a: FqElem) -> [u64; MAX_E as usize] {
        let mut digits = [0u64; MAX_E as usize];
        let mut v = a.0;
        let p = self.0.p;
        let mut i = 0;
        while v != 0 {
            digits[i] = v % p;
            v /= p;
            i += 1;
        }
        digits
    }

    fn pack(&self, digits: &[u64]) -> FqElem {
        let p = self.0.p;
        let mut v = 0u64;
        for &d in digits.iter().rev() {
            v = v * p + d % p;
        }
        FqElem(v)
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        let p = self.0.p;
        if self.0.e == 1 {
            return FqElem((a.0 + b.0) % p);
        }
        let da = self.unpack(a);
        let db = self.unpack(b);
        let mut out = [0u64; MAX_E as usize];
        for i in 0..self.0.e as usize {
            out[i] = (da[i] + db[i]) % p;
        }
        self.pack(&out[..self.0.e as usize])
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        let p = self.0.p;
        if self.0.e == 1 {
            return FqElem((p - a.0) % p);
        }
        let da = self.unpack(a);
        let mut out = [0u64; MAX_E as usize];
        for i in 0..self.0.e as usize {
            out[i] = (p - da[i]) % p;
        }
        self.pack(&out[..self.0.e as usize])
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        let p = self.0.p;
        if self.0.e == 1 {
            return FqElem(a.0 * b.0 % p);
        }
        if a.0 == 0 || b.0 == 0 {
            return FqElem(0);
        }
        let e = self.0.e as usize;
        let da = self.unpack(a);
        let db = self.unpack(b);
        // Convolve, then reduce by the monic modulus.
        let mut prod = [0u64; 2 * MAX_E as usize];
        for i in 0..e {
            if da[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] += da[i] * db[j];
            }
        }
        for k in (e..2 * e - 1).rev() {
            let c = prod[k] % p;
            if c == 0 {
                continue;
            }
            // prod -= c * u^(k-e) * modulus
            for (j, &m) in self.0.modulus.iter().enumerate() {
                if m != 0 {
                    let idx = k - e + j;
                    let sub = c * m % p;
                    prod[idx] = (prod[idx] % p + p - sub) % p;
                }
            }
            prod[k] = 0;
        }
        let mut out = [0u64; MAX_E as usize];
        for i in 0..e {
            out[i] = prod[i] % p;
        }
        self.pack(&out[..e])
    }

    pub fn pow(&self, a: FqElem, mut n: u64) -> FqElem {
        let mut base = a;
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// a^q. Equals a for every element (Frobenius fixes F_q); computed honestly.
    pub fn pow_q(&self, a: FqElem) -> FqElem {
        self.pow(a, self.0.q)
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.0.q - 2))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Check irreducibility of the stored modulus by exhausting proper factors.
    /// The modulus degree is tiny, so trial multiplication is enough: f of
    /// degree e is reducible iff it has a monic factor of degree 1..=e/2.
    fn modulus_is_irreducible(&self) -> bool {
        // Evaluate-and-divide over F_p[u] with schoolbook polynomial division.
        let p = self.0.p;
        let e = self.0.e as usize;
        let m = &self.0.modulus;
        for deg in 1..=e / 2 {
            let count = p.pow(deg as u32);
            for idx in 0..count {
                // candidate monic divisor of degree `deg`
                let mut cand = vec![0u64; deg + 1];
                let mut v = idx;
                for c in cand.iter_mut().take(deg) {
                    *c = v % p;
                    v /= p;
                }
                cand[deg] = 1;
                if poly_divides_fp(p, &cand, m) {
                    return false;
                }
            }
        }
        true
    }

    /// Render an element as a string: a decimal for prime fields, a
    /// "u"-expression for extensions (descending powers of u).
    pub fn elem_to_string(&self, a: FqElem) -> String {
        if self.0.e == 1 {
            return a.0.to_string();
        }
        let digits = self.unpack(a);
        let e = self.0.e as usize;
        let mut parts: Vec<String> = Vec::new();
        for k in (0..e).rev() {
            let c = digits[k];
            if c == 0 {
                continue;
            }
            let part = match (k, c) {
                (0, c) => c.to_string(),
                (1, 1) => "u".to_string(),
                (1, c) => format!("{c}*u"),
                (k, 1) => format!("u^{k}"),
                (k, c) => format!("{c}*u^{k}"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }
}

/// Does `divisor` divide `f` in F_p[u]? Both dense ascending, divisor monic.
fn poly_divides_fp(p: u64, divisor: &[u64], f: &[u64]) -> bool {
    let mut rem: Vec<u64> = f.to_vec();
    let dd = divisor.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap() % p;
        let shift = rem.len() - 1 - dd;
        if lead != 0 {
            for (j, &c) in divisor.iter().enumerate() {
                let idx = shift + j;
                rem[idx] = (rem[idx] % p + p - lead * c % p) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c % p == 0)
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Context-free display: the raw handle. Use Fq::elem_to_string for
        // the canonical text form.
        write!(f, "{}", self.0)
    }
}
