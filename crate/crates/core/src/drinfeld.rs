//! Drinfeld modules over F_q(t): ring morphisms phi: A -> K{tau} with
//! phi_t = t + a_1 tau + ... + a_d tau^d, d >= 1.
//!
//! The struct caches the images phi_{t^k} and phi_Q; the cache is shared
//! across clones and filled idempotently, so clones are cheap and concurrent
//! use is safe.

use crate::error::{Error, Result};
use crate::fq::Fq;
use crate::places::Place;
use crate::poly::Poly;
use crate::rat::Rat;
use crate::twisted::TwistedPoly;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionType {
    Good,
    Bad,
}

#[derive(Debug)]
struct Inner {
    fq: Fq,
    phi_t: TwistedPoly,
    /// phi_{t^k} for k = 0, 1, ...; powers[k] is filled lazily.
    powers: Mutex<Vec<TwistedPoly>>,
    phi_cache: Mutex<HashMap<Poly, Arc<TwistedPoly>>>,
    bad_places: OnceLock<Vec<Place>>,
}

#[derive(Clone, Debug)]
pub struct DrinfeldModule {
    inner: Arc<Inner>,
}

impl PartialEq for DrinfeldModule {
    fn eq(&self, other: &Self) -> bool {
        self.inner.fq == other.inner.fq && self.inner.phi_t == other.inner.phi_t
    }
}
impl Eq for DrinfeldModule {}

impl DrinfeldModule {
    /// Build from the coefficients of phi_t (ascending in tau). Requires the
    /// tau^0 coefficient to be exactly t and tau-degree d >= 1.
    pub fn new(fq: &Fq, coeffs: Vec<Rat>) -> Result<DrinfeldModule> {
        let phi_t = TwistedPoly::from_coeffs(fq, coeffs);
        match phi_t.tau_degree() {
            None | Some(0) => {
                return Err(Error::InvalidModule(
                    "phi_t must have tau-degree at least 1".into(),
                ))
            }
            Some(_) => {}
        }
        if phi_t.coeff(0) != Rat::t(fq) {
            return Err(Error::InvalidModule(
                "the tau^0 coefficient of phi_t must be t".into(),
            ));
        }
        Ok(DrinfeldModule {
            inner: Arc::new(Inner {
                fq: fq.clone(),
                powers: Mutex::new(vec![TwistedPoly::one(fq)]),
                phi_cache: Mutex::new(HashMap::new()),
                bad_places: OnceLock::new(),
                phi_t,
            }),
        })
    }

    /// Parse coefficient strings, e.g. `["t", "0", "1"]` for t + tau^2.
    pub fn from_strings(fq: &Fq, coeffs: &[String]) -> Result<DrinfeldModule> {
        let parsed: Result<Vec<Rat>> = coeffs.iter().map(|s| Rat::parse(fq, s)).collect();
        DrinfeldModule::new(fq, parsed?)
    }

    pub fn field(&self) -> &Fq {
        &self.inner.fq
    }

    pub fn q(&self) -> u64 {
        self.inner.fq.q()
    }

    pub fn phi_t(&self) -> &TwistedPoly {
        &self.inner.phi_t
    }

    /// The rank d: the tau-degree of phi_t.
    pub fn rank(&self) -> usize {
        self.inner.phi_t.tau_degree().unwrap()
    }

    /// Coefficient a_i of phi_t.
    pub fn coefficient(&self, i: usize) -> Rat {
        self.inner.phi_t.coeff(i)
    }

    /// phi_{t^k}, memoized.
    pub fn phi_t_power(&self, k: usize) -> TwistedPoly {
        let mut powers = self.inner.powers.lock().unwrap();
        while powers.len() <= k {
            let next = powers.last().unwrap().compose(&self.inner.phi_t);
            powers.push(next);
        }
        powers[k].clone()
    }

    /// The image phi_Q: the unique F_q-algebra morphism value, computed as
    /// sum over the coefficients of Q of c_k * phi_{t^k} (memoized powers,
    /// composed iteratively), and cached per Q.
    pub fn phi_of(&self, q_poly: &Poly) -> TwistedPoly {
        assert!(
            *q_poly.field() == self.inner.fq,
            "polynomial field does not match the module"
        );
        if let Some(hit) = self.inner.phi_cache.lock().unwrap().get(q_poly) {
            return (**hit).clone();
        }
        let fq = &self.inner.fq;
        let mut acc = TwistedPoly::zero(fq);
        for (k, &c) in q_poly.coeffs().iter().enumerate() {
            if fq.is_zero(c) {
                continue;
            }
            let term = self.phi_t_power(k).scale(&Rat::constant(fq, c));
            acc = acc.add_ref(&term);
        }
        self.inner
            .phi_cache
            .lock()
            .unwrap()
            .entry(q_poly.clone())
            .or_insert_with(|| Arc::new(acc.clone()));
        acc
    }

    /// Evaluate phi_t at a point.
    pub fn eval_phi_t(&self, x: &Rat) -> Rat {
        self.inner.phi_t.eval(x)
    }

    /// phi_Q(x) without materializing phi_Q: runs the orbit
    /// y_k = phi_{t^k}(x) and combines with the coefficients of Q.
    /// Equal to `self.phi_of(q).eval(x)`.
    pub fn apply(&self, q_poly: &Poly, x: &Rat) -> Rat {
        let fq = &self.inner.fq;
        let mut acc = Rat::zero(fq);
        let mut y = x.clone();
        for (k, &c) in q_poly.coeffs().iter().enumerate() {
            if k > 0 {
                y = self.eval_phi_t(&y);
            }
            if !fq.is_zero(c) {
                acc = acc.add_ref(&y.scale(c));
            }
        }
        acc
    }

    /// Finite places where reduction fails: primes dividing a coefficient
    /// denominator, plus primes at which the leading coefficient is not a
    /// unit. Cached.
    pub fn bad_places(&self) -> &[Place] {
        self.inner.bad_places.get_or_init(|| {
            let d = self.rank();
            let mut set = std::collections::BTreeSet::new();
            for i in 0..=d {
                let a = self.coefficient(i);
                if a.is_zero() {
                    continue;
                }
                if !a.den().is_constant() {
                    let (_, factors) = a.den().factor().expect("nonzero denominator");
                    for (p, _) in factors {
                        set.insert(Place::Finite(p));
                    }
                }
            }
            let lead = self.coefficient(d);
            if !lead.num().is_constant() {
                let (_, factors) = lead.num().factor().expect("nonzero leading coefficient");
                for (p, _) in factors {
                    set.insert(Place::Finite(p));
                }
            }
            set.into_iter().collect()
        })
    }

    /// Good reduction at a finite place: every coefficient integral and the
    /// leading coefficient a unit.
    pub fn reduction_type(&self, v: &Place) -> Result<ReductionType> {
        if v.is_infinite() {
            return Err(Error::InfinitePlace);
        }
        let d = self.rank();
        for i in 0..=d {
            let a = self.coefficient(i);
            if a.is_zero() {
                continue;
            }
            match v.valuation(&a) {
                Some(val) if val < 0 => return Ok(ReductionType::Bad),
                _ => {}
            }
        }
        if v.valuation(&self.coefficient(d)) != Some(0) {
            return Ok(ReductionType::Bad);
        }
        Ok(ReductionType::Good)
    }

    /// Conjugate into an everywhere-integral model: returns (psi, gamma)
    /// with psi_t = gamma^{-1} phi_t gamma, every coefficient of psi_t
    /// integral at all finite places, and gamma the smallest power of the
    /// product of offending primes that works. Already-integral modules come
    /// back unchanged with gamma = 1.
    pub fn integralize(&self) -> (DrinfeldModule, Rat) {
        let fq = &self.inner.fq;
        let d = self.rank();
        let mut primes = std::collections::BTreeSet::new();
        for i in 1..=d {
            let a = self.coefficient(i);
            if a.is_zero() || a.den().is_constant() {
                continue;
            }
            let (_, factors) = a.den().factor().expect("nonzero denominator");
            for (p, _) in factors {
                primes.insert(p);
            }
        }
        if primes.is_empty() {
            return (self.clone(), Rat::one(fq));
        }
        let mut b = Poly::one(fq);
        for p in &primes {
            b = &b * p;
        }
        // smallest k with den(a_i) | B^(k*(q^i - 1)) for all i
        let q = fq.q();
        'outer: for k in 1u32.. {
            let gamma = Rat::from_poly(b.pow(k as u64));
            let mut coeffs = Vec::with_capacity(d + 1);
            for i in 0..=d {
                let a = self.coefficient(i);
                if a.is_zero() {
                    coeffs.push(a);
                    continue;
                }
                // a_i * gamma^(q^i - 1)
                let exp = q.checked_pow(i as u32).expect("q^i overflow") - 1;
                let scaled = a.mul_ref(&Rat::from_poly(b.pow(k as u64 * exp)));
                if !scaled.den().is_constant() {
                    continue 'outer;
                }
                coeffs.push(scaled);
            }
            let psi = DrinfeldModule::new(fq, coeffs).expect("conjugation preserves the module shape");
            return (psi, gamma);
        }
        unreachable!("a sufficiently large power of B always clears the denominators")
    }

    /// The order of beta: the monic Q of minimal degree with phi_Q(beta) = 0
    /// and deg Q <= deg_cap, if one exists. Searches for an F_q-linear
    /// dependence among the orbit values phi_{t^k}(beta) instead of
    /// enumerating all Q. Convention: beta = 0 has order 1.
    pub fn torsion_annihilator(&self, beta: &Rat, deg_cap: usize) -> Option<Poly> {
        let fq = &self.inner.fq;
        if beta.is_zero() {
            return Some(Poly::one(fq));
        }
        // Orbit values, kept over a common denominator as coefficient
        // vectors over F_q; Gaussian elimination with combination tracking.
        let mut orbit: Vec<Rat> = vec![beta.clone()];
        for _ in 0..deg_cap {
            let next = self.eval_phi_t(orbit.last().unwrap());
            orbit.push(next);
        }
        let mut common_den = Poly::one(fq);
        for y in &orbit {
            let g = common_den.gcd(y.den());
            common_den = &common_den * &y.den().divrem(&g).unwrap().0;
        }
        let vectors: Vec<Poly> = orbit
            .iter()
            .map(|y| {
                let (cof, _) = common_den.divrem(y.den()).unwrap();
                y.num() * &cof
            })
            .collect();
        let width = vectors.iter().map(|v| v.coeffs().len()).max().unwrap_or(0);

        // Reduced rows with their expressing combinations over the orbit.
        let mut basis: Vec<(Vec<crate::fq::FqElem>, Vec<crate::fq::FqElem>)> = Vec::new();
        for (n, vec_poly) in vectors.iter().enumerate() {
            let mut row: Vec<crate::fq::FqElem> = (0..width).map(|i| vec_poly.coeff(i)).collect();
            let mut combo = vec![fq.zero(); deg_cap + 1];
            combo[n] = fq.one();
            for (brow, bcombo) in &basis {
                let pivot = brow.iter().position(|c| !fq.is_zero(*c)).unwrap();
                if fq.is_zero(row[pivot]) {
                    continue;
                }
                let factor = fq.div(row[pivot], brow[pivot]).unwrap();
                for i in 0..width {
                    row[i] = fq.sub(row[i], fq.mul(factor, brow[i]));
                }
                for i in 0..combo.len() {
                    combo[i] = fq.sub(combo[i], fq.mul(factor, bcombo[i]));
                }
            }
            if row.iter().all(|c| fq.is_zero(*c)) {
                // Dependence found: combo expresses 0 = sum combo[i] phi_{t^i}(beta),
                // with combo[n] != 0; normalize to a monic annihilator of degree n.
                let lead_inv = fq.inv(combo[n]).unwrap();
                let coeffs: Vec<_> =
                    combo[..=n].iter().map(|&c| fq.mul(c, lead_inv)).collect();
                let q_poly = Poly::from_coeffs(fq, coeffs);
                debug_assert!(self.apply(&q_poly, beta).is_zero());
                return Some(q_poly);
            }
            basis.push((row, combo));
        }
        None
    }
}
