//! The twisted polynomial ring K{tau}.
//!
//! Elements are sums c_0 + c_1 tau + ... + c_n tau^n with c_i in K, where
//! tau acts as the q-power Frobenius. Addition is coefficientwise; the ring
//! product is composition of the induced additive maps, governed by the
//! commutation rule tau * c = c^q * tau.

use crate::fq::Fq;
use crate::rat::Rat;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedPoly {
    fq: Fq,
    coeffs: Vec<Rat>,
}

impl TwistedPoly {
    fn normalize(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Coefficients ascending in tau.
    pub fn from_coeffs(fq: &Fq, coeffs: Vec<Rat>) -> TwistedPoly {
        let mut f = TwistedPoly { fq: fq.clone(), coeffs };
        f.normalize();
        f
    }

    pub fn zero(fq: &Fq) -> TwistedPoly {
        TwistedPoly { fq: fq.clone(), coeffs: Vec::new() }
    }

    /// The multiplicative identity tau^0.
    pub fn one(fq: &Fq) -> TwistedPoly {
        TwistedPoly { fq: fq.clone(), coeffs: vec![Rat::one(fq)] }
    }

    /// The constant map x -> c x.
    pub fn scalar(fq: &Fq, c: Rat) -> TwistedPoly {
        TwistedPoly::from_coeffs(fq, vec![c])
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Rat::zero(&self.fq))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in tau, or None for the zero element.
    pub fn tau_degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    fn assert_same_field(&self, other: &TwistedPoly) {
        assert!(self.fq == other.fq, "mixed fields in twisted-polynomial arithmetic");
    }

    pub fn add_ref(&self, other: &TwistedPoly) -> TwistedPoly {
        self.assert_same_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add_ref(&other.coeff(i)));
        }
        TwistedPoly::from_coeffs(&self.fq, out)
    }

    pub fn sub_ref(&self, other: &TwistedPoly) -> TwistedPoly {
        self.assert_same_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).sub_ref(&other.coeff(i)));
        }
        TwistedPoly::from_coeffs(&self.fq, out)
    }

    /// Ring product f * g = f after g (composition of the additive maps):
    /// the tau^(i+j) coefficient picks up c_i * d_j^(q^i).
    pub fn compose(&self, other: &TwistedPoly) -> TwistedPoly {
        self.assert_same_field(other);
        if self.is_zero() || other.is_zero() {
            return TwistedPoly::zero(&self.fq);
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut out = vec![Rat::zero(&self.fq); n];
        for (i, ci) in self.coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, dj) in other.coeffs.iter().enumerate() {
                if dj.is_zero() {
                    continue;
                }
                let term = ci.mul_ref(&dj.pow_q(i as u32));
                out[i + j] = out[i + j].add_ref(&term);
            }
        }
        TwistedPoly::from_coeffs(&self.fq, out)
    }

    /// Left-multiply by a constant: c * f.
    pub fn scale(&self, c: &Rat) -> TwistedPoly {
        if c.is_zero() {
            return TwistedPoly::zero(&self.fq);
        }
        let out = self.coeffs.iter().map(|a| a.mul_ref(c)).collect();
        TwistedPoly::from_coeffs(&self.fq, out)
    }

    /// Evaluate the induced additive map: sum of c_i * x^(q^i).
    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero(&self.fq);
        if x.is_zero() {
            return acc;
        }
        for (i, ci) in self.coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            acc = acc.add_ref(&ci.mul_ref(&x.pow_q(i as u32)));
        }
        acc
    }
}

impl fmt::Display for TwistedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*tau")?,
                _ => write!(f, "({c})*tau^{i}")?,
            }
        }
        Ok(())
    }
}
