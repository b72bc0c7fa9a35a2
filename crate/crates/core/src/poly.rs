//! Dense univariate polynomials over F_q: the ring A = F_q[t].
//!
//! Coefficients are stored ascending; the vector is empty for the zero
//! polynomial and its last entry is nonzero otherwise.

use crate::error::{Error, Result};
use crate::fq::{Fq, FqElem};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug)]
pub struct Poly {
    fq: Fq,
    coeffs: Vec<FqElem>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.fq == other.fq && self.coeffs == other.coeffs
    }
}
impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.fq.q().hash(state);
        self.coeffs.hash(state);
    }
}

impl Poly {
    fn normalize(&mut self) {
        while self.coeffs.last().map_or(false, |c| self.fq.is_zero(*c)) {
            self.coeffs.pop();
        }
    }

    pub fn from_coeffs(fq: &Fq, coeffs: Vec<FqElem>) -> Poly {
        let mut p = Poly { fq: fq.clone(), coeffs };
        p.normalize();
        p
    }

    /// Coefficients given as integers (reduced mod p), ascending.
    pub fn from_integers(fq: &Fq, coeffs: &[u64]) -> Poly {
        let v = coeffs.iter().map(|&c| fq.from_integer(c)).collect();
        Poly::from_coeffs(fq, v)
    }

    pub fn zero(fq: &Fq) -> Poly {
        Poly { fq: fq.clone(), coeffs: Vec::new() }
    }

    pub fn one(fq: &Fq) -> Poly {
        Poly { fq: fq.clone(), coeffs: vec![fq.one()] }
    }

    pub fn constant(fq: &Fq, c: FqElem) -> Poly {
        Poly::from_coeffs(fq, vec![c])
    }

    /// The variable t.
    pub fn t(fq: &Fq) -> Poly {
        Poly { fq: fq.clone(), coeffs: vec![fq.zero(), fq.one()] }
    }

    /// c * t^k.
    pub fn monomial(fq: &Fq, c: FqElem, k: usize) -> Poly {
        if fq.is_zero(c) {
            return Poly::zero(fq);
        }
        let mut coeffs = vec![fq.zero(); k + 1];
        coeffs[k] = c;
        Poly { fq: fq.clone(), coeffs }
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Degree as an i64 with deg 0 = -1 sentinel; convenient for reports.
    pub fn degree_i64(&self) -> i64 {
        self.degree().map_or(-1, |d| d as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.fq.one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coeff(&self) -> Option<FqElem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff() == Some(self.fq.one())
    }

    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs.get(i).copied().unwrap_or(self.fq.zero())
    }

    fn assert_same_field(&self, other: &Poly) {
        assert!(self.fq == other.fq, "mixed finite fields in polynomial arithmetic");
    }

    pub fn add_ref(&self, other: &Poly) -> Poly {
        self.assert_same_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.fq.add(self.coeff(i), other.coeff(i)));
        }
        Poly::from_coeffs(&self.fq, out)
    }

    pub fn sub_ref(&self, other: &Poly) -> Poly {
        self.assert_same_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.fq.sub(self.coeff(i), other.coeff(i)));
        }
        Poly::from_coeffs(&self.fq, out)
    }

    pub fn neg_ref(&self) -> Poly {
        let out = self.coeffs.iter().map(|&c| self.fq.neg(c)).collect();
        Poly::from_coeffs(&self.fq, out)
    }

    pub fn mul_ref(&self, other: &Poly) -> Poly {
        self.assert_same_field(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.fq);
        }
        let fq = &self.fq;
        let (a, b) = (&self.coeffs, &other.coeffs);
        let n = a.len() + b.len() - 1;
        if fq.e() == 1 {
            // Raw u64 accumulation with a single reduction pass. Products of
            // residues < p <= 2^20 summed over < 2^20 terms stay below 2^63.
            let p = fq.p();
            let mut acc = vec![0u64; n];
            for (i, &ai) in a.iter().enumerate() {
                let av = ai.0;
                if av == 0 {
                    continue;
                }
                for (j, &bj) in b.iter().enumerate() {
                    if bj.0 != 0 {
                        acc[i + j] += av * bj.0;
                    }
                }
            }
            let out = acc.into_iter().map(|v| FqElem(v % p)).collect();
            return Poly::from_coeffs(fq, out);
        }
        let mut out = vec![fq.zero(); n];
        for (i, &ai) in a.iter().enumerate() {
            if fq.is_zero(ai) {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if !fq.is_zero(bj) {
                    out[i + j] = fq.add(out[i + j], fq.mul(ai, bj));
                }
            }
        }
        Poly::from_coeffs(fq, out)
    }

    pub fn scale(&self, c: FqElem) -> Poly {
        if self.fq.is_zero(c) {
            return Poly::zero(&self.fq);
        }
        let out = self.coeffs.iter().map(|&a| self.fq.mul(a, c)).collect();
        Poly::from_coeffs(&self.fq, out)
    }

    /// Quotient and remainder: self = g*quot + rem with deg rem < deg g.
    pub fn divrem(&self, g: &Poly) -> Result<(Poly, Poly)> {
        self.assert_same_field(g);
        if g.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let fq = &self.fq;
        let dg = g.degree().unwrap();
        if self.degree().map_or(true, |df| df < dg) {
            return Ok((Poly::zero(fq), self.clone()));
        }
        let df = self.degree().unwrap();
        let lead_inv = fq.inv(g.leading_coeff().unwrap())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![fq.zero(); df - dg + 1];
        for k in (dg..=df).rev() {
            let c = rem[k];
            if fq.is_zero(c) {
                continue;
            }
            let qc = fq.mul(c, lead_inv);
            quot[k - dg] = qc;
            for (j, &gc) in g.coeffs.iter().enumerate() {
                let idx = k - dg + j;
                rem[idx] = fq.sub(rem[idx], fq.mul(qc, gc));
            }
        }
        rem.truncate(dg);
        Ok((Poly::from_coeffs(fq, quot), Poly::from_coeffs(fq, rem)))
    }

    pub fn divides(&self, f: &Poly) -> bool {
        match f.divrem(self) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// Monic greatest common divisor; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Divide by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading_coeff() {
            None => self.clone(),
            Some(lc) => {
                if lc == self.fq.one() {
                    self.clone()
                } else {
                    let inv = self.fq.inv(lc).expect("nonzero leading coefficient");
                    self.scale(inv)
                }
            }
        }
    }

    /// self^(q^k): coefficient spreading, using that Frobenius fixes F_q.
    pub fn pow_q(&self, k: u32) -> Poly {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let stride = (self.fq.q() as u128).pow(k);
        let stride = usize::try_from(stride).expect("q^k exceeds addressable degree");
        let deg = self.coeffs.len() - 1;
        let mut out = vec![self.fq.zero(); deg * stride + 1];
        for (j, &c) in self.coeffs.iter().enumerate() {
            if !self.fq.is_zero(c) {
                out[j * stride] = c;
            }
        }
        Poly { fq: self.fq.clone(), coeffs: out }
    }

    pub fn pow(&self, mut n: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.fq);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// t^(q^i) mod f, by repeated q-power spreading and reduction.
    fn t_power_q_mod(&self, i: u32) -> Poly {
        let fq = &self.fq;
        let mut x = Poly::t(fq);
        for _ in 0..i {
            // x -> x^q mod self. Spreading then reducing keeps degrees <= q * deg f.
            let (_, r) = x.pow_q(1).divrem(self).expect("nonzero modulus");
            x = r;
        }
        x
    }

    /// Irreducibility over F_q: f of degree n >= 1 is irreducible iff
    /// gcd(f, t^(q^i) - t) = 1 for i = 1..=n/2 (no factor of degree <= n/2).
    pub fn is_irreducible(&self) -> Result<bool> {
        let n = match self.degree() {
            None | Some(0) => return Err(Error::ConstantPolynomial),
            Some(n) => n,
        };
        if n == 1 {
            return Ok(true);
        }
        let t = Poly::t(&self.fq);
        for i in 1..=(n / 2) as u32 {
            let tq = self.t_power_q_mod(i);
            let g = self.gcd(&tq.sub_ref(&t));
            if !g.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Multiplicity of the (nonzero, nonconstant) divisor `p` in self.
    pub fn multiplicity_of(&self, p: &Poly) -> usize {
        if self.is_zero() {
            return 0;
        }
        let mut f = self.clone();
        let mut m = 0;
        loop {
            match f.divrem(p) {
                Ok((q, r)) if r.is_zero() => {
                    m += 1;
                    f = q;
                }
                _ => return m,
            }
        }
    }

    /// Factor against a fixed basis of pairwise distinct monic irreducibles:
    /// returns (unit, exponents, monic cofactor) with
    /// self = unit * prod(basis[i]^exp[i]) * cofactor and the cofactor
    /// coprime to every basis element.
    pub fn factor_with_basis(&self, basis: &[Poly]) -> Result<(FqElem, Vec<usize>, Poly)> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let unit = self.leading_coeff().unwrap();
        let mut cof = self.monic();
        let mut exps = Vec::with_capacity(basis.len());
        for p in basis {
            let mut m = 0;
            loop {
                match cof.divrem(p) {
                    Ok((q, r)) if r.is_zero() => {
                        m += 1;
                        cof = q;
                    }
                    _ => break,
                }
            }
            exps.push(m);
        }
        Ok((unit, exps, cof))
    }

    /// Full factorization into monic irreducibles with multiplicities, plus
    /// the unit (leading coefficient). Trial division by irreducibles of
    /// increasing degree, with an irreducibility check to stop early.
    pub fn factor(&self) -> Result<(FqElem, Vec<(Poly, usize)>)> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let unit = self.leading_coeff().unwrap();
        let mut cof = self.monic();
        let mut out: Vec<(Poly, usize)> = Vec::new();
        let mut deg = 1usize;
        while !cof.is_constant() {
            if cof.is_irreducible()? {
                out.push((cof.clone(), 1));
                break;
            }
            let remaining = cof.degree().unwrap();
            if deg > remaining / 2 {
                // No proper factor of degree <= remaining/2 exists, yet the
                // cofactor is reducible: impossible, so this is unreachable;
                // guard against an infinite loop anyway.
                out.push((cof.clone(), 1));
                break;
            }
            for cand in enumerate_monic_of_degree(&self.fq, deg) {
                if deg > 1 && !cand.is_irreducible()? {
                    continue;
                }
                let m = cof.multiplicity_of(&cand);
                if m > 0 {
                    for _ in 0..m {
                        let (q, _) = cof.divrem(&cand)?;
                        cof = q;
                    }
                    out.push((cand, m));
                    if cof.is_constant() {
                        break;
                    }
                }
            }
            if cof.is_constant() {
                break;
            }
            deg += 1;
        }
        Ok((unit, out))
    }

    /// Evaluate at an element of F_q.
    pub fn eval_fq(&self, x: FqElem) -> FqElem {
        let fq = &self.fq;
        let mut acc = fq.zero();
        for &c in self.coeffs.iter().rev() {
            acc = fq.add(fq.mul(acc, x), c);
        }
        acc
    }

    /// Deterministic enumeration index: the base-q value of the coefficient
    /// vector. Inverse of `poly_from_index`.
    pub fn enum_index(&self) -> u128 {
        let q = self.fq.q() as u128;
        let mut v: u128 = 0;
        for &c in self.coeffs.iter().rev() {
            v = v * q + c.0 as u128;
        }
        v
    }
}

/// The polynomial with the given enumeration index (base-q digits ascending).
pub fn poly_from_index(fq: &Fq, mut idx: u128) -> Poly {
    let q = fq.q() as u128;
    let mut coeffs = Vec::new();
    while idx != 0 {
        coeffs.push(fq.elem_from_index((idx % q) as u64));
        idx /= q;
    }
    Poly::from_coeffs(fq, coeffs)
}

/// All polynomials of degree <= max_deg (including zero), or all monic ones
/// of degree 0..=max_deg (excluding zero), in degree-lexicographic order:
/// exactly the enumeration-index order.
pub fn enumerate_polys(fq: &Fq, max_deg: usize, monic_only: bool) -> Vec<Poly> {
    let q = fq.q() as u128;
    if monic_only {
        let mut out = Vec::new();
        for deg in 0..=max_deg {
            let count = q.pow(deg as u32);
            for idx in 0..count {
                let mut p = poly_from_index(fq, idx);
                let mut coeffs = p.coeffs().to_vec();
                coeffs.resize(deg + 1, fq.zero());
                coeffs[deg] = fq.one();
                p = Poly::from_coeffs(fq, coeffs);
                out.push(p);
            }
        }
        out
    } else {
        let count = q.pow(max_deg as u32 + 1);
        (0..count).map(|idx| poly_from_index(fq, idx)).collect()
    }
}

/// All monic polynomials of exactly the given degree, enumeration order.
pub fn enumerate_monic_of_degree(fq: &Fq, deg: usize) -> Vec<Poly> {
    let q = fq.q() as u128;
    let count = q.pow(deg as u32);
    let mut out = Vec::with_capacity(count as usize);
    for idx in 0..count {
        let p = poly_from_index(fq, idx);
        let mut coeffs = p.coeffs().to_vec();
        coeffs.resize(deg + 1, fq.zero());
        coeffs[deg] = fq.one();
        out.push(Poly::from_coeffs(fq, coeffs));
    }
    out
}

/// All monic irreducibles of degree <= max_deg, in enumeration order.
pub fn enumerate_irreducibles(fq: &Fq, max_deg: usize) -> Vec<Poly> {
    let mut out = Vec::new();
    for deg in 1..=max_deg {
        for p in enumerate_monic_of_degree(fq, deg) {
            if p.is_irreducible().unwrap() {
                out.push(p);
            }
        }
    }
    out
}

/// Total order used for deterministic containers: by degree, then by
/// enumeration index.
impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.coeffs.len(), self.enum_index()).cmp(&(other.coeffs.len(), other.enum_index()))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.add_ref(rhs)
    }
}
impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.sub_ref(rhs)
    }
}
impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_ref(rhs)
    }
}
impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_ref()
    }
}

// ---- text form ----

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let fq = &self.fq;
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = self.coeffs[k];
            if fq.is_zero(c) {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let cs = fq.elem_to_string(c);
            let coeff_is_one = c == fq.one();
            match k {
                0 => write!(f, "{cs}")?,
                _ => {
                    if !coeff_is_one {
                        if cs.contains('+') || cs.contains('-') {
                            write!(f, "({cs})*")?;
                        } else {
                            write!(f, "{cs}*")?;
                        }
                    }
                    if k == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

// Recursive-descent parser for polynomial expressions in `t` (and `u` for
// extension coefficients). Grammar:
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := INT | 't' ['^' INT] | 'u' ['^' INT] | '(' expr ')'
struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    fq: Fq,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str, fq: &Fq) -> Parser<'a> {
        Parser { bytes: s.as_bytes(), pos: 0, fq: fq.clone() }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("at byte {}: {msg}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn parse_uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| self.err("integer out of range"))
    }

    fn parse_expr(&mut self) -> Result<Poly> {
        let mut acc;
        if self.peek() == Some(b'-') {
            self.bump();
            acc = self.parse_term()?.neg_ref();
        } else {
            acc = self.parse_term()?;
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = acc.add_ref(&self.parse_term()?);
                }
                Some(b'-') => {
                    self.bump();
                    acc = acc.sub_ref(&self.parse_term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Poly> {
        let mut acc = self.parse_factor()?;
        while self.peek() == Some(b'*') {
            self.bump();
            acc = acc.mul_ref(&self.parse_factor()?);
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let inner = self.parse_expr()?;
                if self.bump() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            Some(b't') => {
                self.bump();
                let k = self.parse_opt_power()?;
                Ok(Poly::monomial(&self.fq, self.fq.one(), k as usize))
            }
            Some(b'u') => {
                self.bump();
                let k = self.parse_opt_power()?;
                let u = self
                    .fq
                    .gen_u()
                    .map_err(|_| self.err("'u' is only valid for extension fields (e > 1)"))?;
                Ok(Poly::constant(&self.fq, self.fq.pow(u, k)))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.parse_uint()?;
                Ok(Poly::constant(&self.fq, self.fq.from_integer(n)))
            }
            _ => Err(self.err("expected a factor")),
        }
    }

    fn parse_opt_power(&mut self) -> Result<u64> {
        if self.peek() == Some(b'^') {
            self.bump();
            self.parse_uint()
        } else {
            Ok(1)
        }
    }
}

impl Poly {
    /// Parse a polynomial expression such as `t^3+2*t+1` or, over an
    /// extension field, `(u+1)*t^2+u`.
    pub fn parse(fq: &Fq, s: &str) -> Result<Poly> {
        let mut p = Parser::new(s, fq);
        let poly = p.parse_expr()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.err("trailing input"));
        }
        Ok(poly)
    }
}
