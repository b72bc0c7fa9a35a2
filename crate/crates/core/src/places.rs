//! Places of F_q(t), normalized logarithmic absolute values, and the
//! product formula.
//!
//! The set M_K consists of the infinite place (degree valuation) and one
//! finite place per monic irreducible of F_q[t]. Absolute values are kept in
//! logarithmic form: log|x|_v = -v(x) * deg(v), an integer for nonzero x, so
//! every later height computation stays in exact rational arithmetic.

use crate::error::{Error, Result};
use crate::fq::Fq;
use crate::poly::{enumerate_irreducibles, Poly};
use crate::rat::Rat;
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Infinite,
    Finite(Poly),
}

impl Place {
    /// A finite place from a monic irreducible.
    pub fn finite(prime: Poly) -> Result<Place> {
        if !prime.is_monic() {
            return Err(Error::InvalidPlace(format!("{prime} is not monic")));
        }
        match prime.is_irreducible() {
            Ok(true) => Ok(Place::Finite(prime)),
            Ok(false) => Err(Error::InvalidPlace(format!("{prime} is reducible"))),
            Err(_) => Err(Error::InvalidPlace(format!("{prime} is constant"))),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinite)
    }

    pub fn prime(&self) -> Option<&Poly> {
        match self {
            Place::Infinite => None,
            Place::Finite(p) => Some(p),
        }
    }

    /// Residue degree: 1 for the infinite place, deg(prime) otherwise.
    pub fn degree(&self) -> usize {
        match self {
            Place::Infinite => 1,
            Place::Finite(p) => p.degree().expect("place prime is nonconstant"),
        }
    }

    /// v(x), or None for x = 0 (valuation +infinity).
    pub fn valuation(&self, x: &Rat) -> Option<i64> {
        if x.is_zero() {
            return None;
        }
        match self {
            Place::Infinite => {
                let dn = x.num().degree().unwrap() as i64;
                let dd = x.den().degree().unwrap() as i64;
                Some(dd - dn)
            }
            Place::Finite(p) => {
                let mn = x.num().multiplicity_of(p) as i64;
                let md = x.den().multiplicity_of(p) as i64;
                Some(mn - md)
            }
        }
    }

    /// log|x|_v = -v(x) * deg(v); NegInfinity for x = 0.
    pub fn log_abs(&self, x: &Rat) -> LogAbs {
        match self.valuation(x) {
            None => LogAbs::NegInfinity,
            Some(v) => LogAbs::Finite(-v * self.degree() as i64),
        }
    }

    pub fn parse(fq: &Fq, s: &str) -> Result<Place> {
        if s.trim() == "inf" {
            return Ok(Place::Infinite);
        }
        Place::finite(Poly::parse(fq, s)?)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Infinite place first, then finite places by (degree, enumeration index).
impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Infinite, Place::Infinite) => Ordering::Equal,
            (Place::Infinite, Place::Finite(_)) => Ordering::Less,
            (Place::Finite(_), Place::Infinite) => Ordering::Greater,
            (Place::Finite(a), Place::Finite(b)) => a.cmp(b),
        }
    }
}

/// The value log|x|_v with a distinguished -infinity for x = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogAbs {
    NegInfinity,
    Finite(i64),
}

impl LogAbs {
    pub fn finite(self) -> Option<i64> {
        match self {
            LogAbs::NegInfinity => None,
            LogAbs::Finite(v) => Some(v),
        }
    }

    /// max(log|x|_v, 0), the local Weil contribution.
    pub fn log_plus(self) -> i64 {
        match self {
            LogAbs::NegInfinity => 0,
            LogAbs::Finite(v) => v.max(0),
        }
    }
}

impl PartialOrd for LogAbs {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for LogAbs {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (LogAbs::NegInfinity, LogAbs::NegInfinity) => Ordering::Equal,
            (LogAbs::NegInfinity, _) => Ordering::Less,
            (_, LogAbs::NegInfinity) => Ordering::Greater,
            (LogAbs::Finite(a), LogAbs::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for LogAbs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogAbs::NegInfinity => write!(f, "-inf"),
            LogAbs::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// The complete list of places with nonzero valuation, each with its
/// valuation: numerator primes, then denominator primes, then the infinite
/// place when deg num != deg den.
pub fn support(x: &Rat) -> Result<Vec<(Place, i64)>> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut out = Vec::new();
    if !x.num().is_constant() {
        let (_, factors) = x.num().factor()?;
        for (p, m) in factors {
            out.push((Place::Finite(p), m as i64));
        }
    }
    if !x.den().is_constant() {
        let (_, factors) = x.den().factor()?;
        for (p, m) in factors {
            out.push((Place::Finite(p), -(m as i64)));
        }
    }
    let vinf = Place::Infinite.valuation(x).unwrap();
    if vinf != 0 {
        out.push((Place::Infinite, vinf));
    }
    Ok(out)
}

/// Sum of log|x|_v over the support. The product formula says this is zero;
/// the sum is returned so callers can assert it.
pub fn product_formula_check(x: &Rat) -> Result<i64> {
    let sup = support(x)?;
    Ok(sup
        .iter()
        .map(|(v, val)| -val * v.degree() as i64)
        .sum())
}

/// All finite places of degree <= max_deg in deterministic order, preceded
/// by the infinite place when requested.
pub fn enumerate_places(fq: &Fq, max_deg: usize, include_infinite: bool) -> Vec<Place> {
    let mut out = Vec::new();
    if include_infinite {
        out.push(Place::Infinite);
    }
    for p in enumerate_irreducibles(fq, max_deg) {
        out.push(Place::Finite(p));
    }
    out
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
    fn place(fq: &Fq, s: &str) -> Place {
        Place::parse(fq, s).unwrap()
    }

    #[test]
    fn valuation_at_infinity() {
        let fq = f3();
        assert_eq!(Place::Infinite.valuation(&r(&fq, "t")), Some(-1));
        assert_eq!(Place::Infinite.valuation(&Rat::one(&fq)), Some(0));
        assert_eq!(Place::Infinite.valuation(&Rat::zero(&fq)), None);
    }

    #[test]
    fn valuation_at_finite_place() {
        let fq = f3();
        let x = r(&fq, "(t^2+2)/t"); // (t-1)(t+1)/t
        assert_eq!(place(&fq, "t+2").valuation(&x), Some(1));
        assert_eq!(place(&fq, "t").valuation(&x), Some(-1));
    }

    #[test]
    fn log_abs_examples() {
        let fq = f2();
        assert_eq!(Place::Infinite.log_abs(&r(&fq, "t")), LogAbs::Finite(1));
        assert_eq!(place(&fq, "t").log_abs(&r(&fq, "1/t")), LogAbs::Finite(1));
        let p = place(&fq, "t^2+t+1");
        assert_eq!(p.log_abs(&r(&fq, "t^2+t+1")), LogAbs::Finite(-2));
        assert_eq!(p.log_abs(&Rat::zero(&fq)), LogAbs::NegInfinity);
    }

    #[test]
    fn product_formula_examples() {
        let f3 = f3();
        assert_eq!(product_formula_check(&r(&f3, "t")).unwrap(), 0);
        let f7 = Fq::prime_field(7).unwrap();
        assert_eq!(product_formula_check(&r(&f7, "5")).unwrap(), 0);
        assert_eq!(product_formula_check(&r(&f3, "(t^2+2)/t")).unwrap(), 0);
        assert_eq!(product_formula_check(&Rat::zero(&f3)), Err(Error::ZeroInput));
    }

    #[test]
    fn support_examples() {
        let fq = f2();
        let sup = support(&r(&fq, "t")).unwrap();
        assert_eq!(sup, vec![(place(&fq, "t"), 1), (Place::Infinite, -1)]);

        assert!(support(&Rat::one(&fq)).unwrap().is_empty());

        let x = r(&fq, "(t^2+1)/t"); // (t+1)^2 / t
        let sup = support(&x).unwrap();
        assert_eq!(
            sup,
            vec![(place(&fq, "t+1"), 2), (place(&fq, "t"), -1), (Place::Infinite, -1)]
        );
    }

    #[test]
    fn support_matches_log_abs() {
        let fq = f3();
        let x = r(&fq, "(2*t^3+2*t^2)/(t^2+1)");
        let sup = support(&x).unwrap();
        for (v, val) in &sup {
            assert_eq!(v.valuation(&x), Some(*val));
            assert_ne!(v.log_abs(&x), LogAbs::Finite(0));
        }
        // places not in the support have log_abs zero
        for v in enumerate_places(&fq, 2, true) {
            if !sup.iter().any(|(w, _)| *w == v) {
                assert_eq!(v.log_abs(&x), LogAbs::Finite(0));
            }
        }
    }

    #[test]
    fn enumerate_places_examples() {
        let fq = f2();
        let pl = enumerate_places(&fq, 1, true);
        assert_eq!(pl, vec![Place::Infinite, place(&fq, "t"), place(&fq, "t+1")]);

        let pl2 = enumerate_places(&fq, 2, false);
        assert_eq!(pl2, vec![place(&fq, "t"), place(&fq, "t+1"), place(&fq, "t^2+t+1")]);

        let f3 = f3();
        let pl3 = enumerate_places(&f3, 1, true);
        assert_eq!(
            pl3,
            vec![Place::Infinite, place(&f3, "t"), place(&f3, "t+1"), place(&f3, "t+2")]
        );
    }

    #[test]
    fn invalid_places_rejected() {
        let fq = f2();
        assert!(Place::parse(&fq, "t^2+1").is_err()); // reducible
        assert!(Place::parse(&fq, "1").is_err()); // constant
        let f3 = f3();
        assert!(Place::parse(&f3, "2*t").is_err()); // not monic
    }

    #[test]
    fn ultrametric_and_multiplicativity() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let fq = f3();
        let mut rng = StdRng::seed_from_u64(11);
        let probe = enumerate_places(&fq, 2, true);
        for _ in 0..200 {
            let rand_rat = |rng: &mut StdRng| {
                let deg_n = rng.gen_range(0..=5);
                let deg_d = rng.gen_range(0..=5);
                let num = Poly::from_coeffs(
                    &fq,
                    (0..=deg_n).map(|_| fq.elem_from_index(rng.gen_range(0..3))).collect(),
                );
                let mut den = Poly::from_coeffs(
                    &fq,
                    (0..=deg_d).map(|_| fq.elem_from_index(rng.gen_range(0..3))).collect(),
                );
                if den.is_zero() {
                    den = Poly::one(&fq);
                }
                Rat::new(num, den).unwrap()
            };
            let x = rand_rat(&mut rng);
            let y = rand_rat(&mut rng);
            for v in &probe {
                let lx = v.log_abs(&x);
                let ly = v.log_abs(&y);
                let lsum = v.log_abs(&x.add_ref(&y));
                assert!(lsum <= lx.max(ly), "ultrametric violated at {v}");
                if lx != ly {
                    assert_eq!(lsum, lx.max(ly), "ultrametric equality violated at {v}");
                }
                if !x.is_zero() && !y.is_zero() {
                    let lprod = v.log_abs(&x.mul_ref(&y));
                    assert_eq!(
                        lprod,
                        LogAbs::Finite(lx.finite().unwrap() + ly.finite().unwrap())
                    );
                }
            }
        }
    }
}
