//! The rational function field K = F_q(t).
//!
//! Values are stored in reduced normal form: monic denominator, coprime to
//! the numerator. Equality and hashing are componentwise on that form.

use crate::error::{Error, Result};
use crate::fq::{Fq, FqElem};
use crate::poly::Poly;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rat {
    num: Poly,
    den: Poly,
}

impl Rat {
    /// Build and reduce. Errors on a zero denominator.
    pub fn new(num: Poly, den: Poly) -> Result<Rat> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut num = num;
        let mut den = den;
        if num.is_zero() {
            return Ok(Rat { den: Poly::one(num.field()), num });
        }
        let g = num.gcd(&den);
        if !g.is_one() {
            num = num.divrem(&g).unwrap().0;
            den = den.divrem(&g).unwrap().0;
        }
        let lc = den.leading_coeff().unwrap();
        if lc != den.field().one() {
            let inv = den.field().inv(lc).unwrap();
            num = num.scale(inv);
            den = den.scale(inv);
        }
        Ok(Rat { num, den })
    }

    pub fn from_poly(p: Poly) -> Rat {
        let one = Poly::one(p.field());
        Rat { num: p, den: one }
    }

    pub fn zero(fq: &Fq) -> Rat {
        Rat::from_poly(Poly::zero(fq))
    }

    pub fn one(fq: &Fq) -> Rat {
        Rat::from_poly(Poly::one(fq))
    }

    pub fn t(fq: &Fq) -> Rat {
        Rat::from_poly(Poly::t(fq))
    }

    pub fn constant(fq: &Fq, c: FqElem) -> Rat {
        Rat::from_poly(Poly::constant(fq, c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }
    pub fn den(&self) -> &Poly {
        &self.den
    }
    pub fn field(&self) -> &Fq {
        self.num.field()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn add_ref(&self, other: &Rat) -> Rat {
        // lcm-based addition: keeps intermediate degrees near the result's.
        let g = self.den.gcd(&other.den);
        let (db, _) = other.den.divrem(&g).unwrap();
        let (da, _) = self.den.divrem(&g).unwrap();
        let num = &(&self.num * &db) + &(&other.num * &da);
        let den = &self.den * &db;
        Rat::new(num, den).unwrap()
    }

    pub fn sub_ref(&self, other: &Rat) -> Rat {
        self.add_ref(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> Rat {
        Rat { num: self.num.neg_ref(), den: self.den.clone() }
    }

    pub fn mul_ref(&self, other: &Rat) -> Rat {
        // Cross-cancel before multiplying.
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let n1 = if g1.is_one() { self.num.clone() } else { self.num.divrem(&g1).unwrap().0 };
        let d2 = if g1.is_one() { other.den.clone() } else { other.den.divrem(&g1).unwrap().0 };
        let n2 = if g2.is_one() { other.num.clone() } else { other.num.divrem(&g2).unwrap().0 };
        let d1 = if g2.is_one() { self.den.clone() } else { self.den.divrem(&g2).unwrap().0 };
        Rat::new(&n1 * &n2, &d1 * &d2).unwrap()
    }

    pub fn inv(&self) -> Result<Rat> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Rat::new(self.den.clone(), self.num.clone())
    }

    pub fn div_ref(&self, other: &Rat) -> Result<Rat> {
        Ok(self.mul_ref(&other.inv()?))
    }

    pub fn scale(&self, c: FqElem) -> Rat {
        if self.field().is_zero(c) {
            return Rat::zero(self.field());
        }
        Rat { num: self.num.scale(c), den: self.den.clone() }
    }

    /// self^(q^k). Stays reduced: spreading preserves coprimality.
    pub fn pow_q(&self, k: u32) -> Rat {
        Rat { num: self.num.pow_q(k), den: self.den.pow_q(k) }
    }

    /// Parse a rational function: either a polynomial expression or
    /// `num/den` where each side may be parenthesized.
    pub fn parse(fq: &Fq, s: &str) -> Result<Rat> {
        // Split at the first '/' that is at paren depth 0.
        let mut depth = 0i32;
        let mut split = None;
        for (i, b) in s.bytes().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'/' if depth == 0 => {
                    split = Some(i);
                    break;
                }
                _ => {}
            }
        }
        match split {
            None => Ok(Rat::from_poly(Poly::parse(fq, s)?)),
            Some(i) => {
                let num = Poly::parse(fq, &s[..i])?;
                let den = Poly::parse(fq, &s[i + 1..])?;
                Rat::new(num, den)
            }
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Add for &Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        self.add_ref(rhs)
    }
}
impl Sub for &Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        self.sub_ref(rhs)
    }
}
impl Mul for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        self.mul_ref(rhs)
    }
}
impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        self.neg_ref()
    }
}
impl Div for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        self.div_ref(rhs).expect("division by zero")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Fq {
        Fq::prime_field(2).unwrap()
    }
    fn f3() -> Fq {
        Fq::prime_field(3).unwrap()
    }

    fn r(fq: &Fq, s: &str) -> Rat {
        Rat::parse(fq, s).unwrap()
    }

    #[test]
    fn add_t_plus_inverse() {
        let fq = f3();
        let x = &r(&fq, "t") + &r(&fq, "1/t");
        assert_eq!(x, r(&fq, "(t^2+1)/t"));
    }

    #[test]
    fn reduction_on_construction_char_2() {
        let fq = f2();
        let x = r(&fq, "(t^2+1)/(t+1)");
        assert_eq!(x, r(&fq, "t+1"));
        assert!(x.is_poly());
    }

    #[test]
    fn inverse_pair() {
        let fq = f3();
        let x = &r(&fq, "1/t") * &r(&fq, "t");
        assert_eq!(x, Rat::one(&fq));
    }

    #[test]
    fn division_by_zero() {
        let fq = f3();
        assert_eq!(r(&fq, "t").div_ref(&Rat::zero(&fq)), Err(Error::DivisionByZero));
        assert!(Rat::new(Poly::one(&fq), Poly::zero(&fq)).is_err());
    }

    #[test]
    fn normal_form_invariants() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        let fq = f3();
        for _ in 0..300 {
            let rand_poly = |rng: &mut StdRng, lo: usize, hi: usize| {
                let deg = rng.gen_range(lo..=hi);
                let coeffs: Vec<_> =
                    (0..=deg).map(|_| fq.elem_from_index(rng.gen_range(0..3))).collect();
                Poly::from_coeffs(&fq, coeffs)
            };
            let num = rand_poly(&mut rng, 0, 6);
            let mut den = rand_poly(&mut rng, 0, 6);
            if den.is_zero() {
                den = Poly::one(&fq);
            }
            let x = Rat::new(num, den).unwrap();
            assert!(x.den().is_monic());
            if !x.is_zero() {
                assert!(x.num().gcd(x.den()).is_one());
            } else {
                assert!(x.den().is_one());
            }
            // field ops preserve the invariant
            let y = r(&fq, "(t+1)/(t^2+t+2)");
            for z in [x.add_ref(&y), x.mul_ref(&y), x.sub_ref(&y)] {
                assert!(z.den().is_monic());
                if !z.is_zero() {
                    assert!(z.num().gcd(z.den()).is_one());
                }
            }
        }
    }

    #[test]
    fn pow_q_spreads() {
        let fq = f3();
        let x = r(&fq, "(t+1)/t");
        let cubed = &(&x * &x) * &x;
        assert_eq!(x.pow_q(1), cubed);
    }

    #[test]
    fn display_round_trip() {
        let fq = f3();
        for s in ["0", "t", "(t^2+1)/(t)", "(2*t+1)/(t^2+t+2)", "2"] {
            let x = r(&fq, s);
            let printed = x.to_string();
            assert_eq!(r(&fq, &printed), x);
            assert_eq!(r(&fq, &printed).to_string(), printed);
        }
    }
}
