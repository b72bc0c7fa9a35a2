//! S-integrality decisions and the finiteness experiments.
//!
//! The S-integrality test is factorization-free: the enumerated points have
//! numerators of degree about q^(d deg Q), so the test strips the finitely
//! many known primes (S and the poles of alpha) and inspects the cofactor
//! instead of factoring.

use crate::drinfeld::DrinfeldModule;
use crate::error::{Error, Result};
use crate::fq::Fq;
use crate::places::{LogAbs, Place};
use crate::poly::{poly_from_index, Poly};
use crate::rat::Rat;
use crate::report::{ExperimentReport, ExperimentRow, RatioCell, RatioStats};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::Zero;
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap, HashSet};

/// An ordered, duplicate-free set of places.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlaceSet(BTreeSet<Place>);

impl PlaceSet {
    pub fn new() -> PlaceSet {
        PlaceSet(BTreeSet::new())
    }

    pub fn from_places<I: IntoIterator<Item = Place>>(places: I) -> PlaceSet {
        PlaceSet(places.into_iter().collect())
    }

    pub fn insert(&mut self, v: Place) {
        self.0.insert(v);
    }

    pub fn contains(&self, v: &Place) -> bool {
        self.0.contains(v)
    }

    pub fn contains_infinite(&self) -> bool {
        self.0.contains(&Place::Infinite)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Place> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn finite_primes(&self) -> Vec<Poly> {
        self.0.iter().filter_map(|v| v.prime().cloned()).collect()
    }

    pub fn union(&self, other: &PlaceSet) -> PlaceSet {
        PlaceSet(self.0.union(&other.0).cloned().collect())
    }
}

impl std::fmt::Display for PlaceSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Precomputed data for testing S-integrality of many points against the
/// same (alpha, S).
pub struct SIntegralContext {
    alpha: Rat,
    /// Finite primes to strip from numerators: finite S-primes and poles of alpha.
    strip_basis: Vec<Poly>,
    /// Poles of alpha outside S, where |beta|_v <= 1 must hold.
    alpha_poles_outside_s: Vec<Poly>,
    inf_in_s: bool,
    alpha_large_at_inf: bool,
}

impl SIntegralContext {
    pub fn new(alpha: &Rat, s: &PlaceSet) -> SIntegralContext {
        let mut strip: BTreeSet<Poly> = s.finite_primes().into_iter().collect();
        let mut poles = Vec::new();
        if !alpha.den().is_constant() {
            let (_, factors) = alpha.den().factor().expect("nonzero denominator");
            for (p, _) in factors {
                if !strip.contains(&p) {
                    poles.push(p.clone());
                }
                strip.insert(p);
            }
        }
        let alpha_large_at_inf = matches!(
            Place::Infinite.log_abs(alpha),
            LogAbs::Finite(l) if l > 0
        );
        SIntegralContext {
            alpha: alpha.clone(),
            strip_basis: strip.into_iter().collect(),
            alpha_poles_outside_s: poles,
            inf_in_s: s.contains_infinite(),
            alpha_large_at_inf,
        }
    }

    /// Is beta S-integral with respect to alpha?
    pub fn test(&self, beta: &Rat) -> bool {
        let diff = beta.sub_ref(&self.alpha);
        if diff.is_zero() {
            // |beta - alpha|_v = 0 < 1 at the infinitely many places where
            // |alpha|_v <= 1, only finitely many of which can lie in S.
            return false;
        }
        // Finite v outside S with |alpha|_v <= 1: need |beta - alpha|_v >= 1,
        // i.e. no prime outside the strip basis divides the numerator.
        let (_, _, cofactor) = diff
            .num()
            .factor_with_basis(&self.strip_basis)
            .expect("nonzero numerator");
        if !cofactor.is_constant() {
            return false;
        }
        // Poles of alpha outside S: need |beta|_v <= 1.
        for p in &self.alpha_poles_outside_s {
            if p.divides(beta.den()) {
                return false;
            }
        }
        // The infinite place, when not excluded by S.
        if !self.inf_in_s {
            if self.alpha_large_at_inf {
                if matches!(Place::Infinite.log_abs(beta), LogAbs::Finite(l) if l > 0) {
                    return false;
                }
            } else if matches!(Place::Infinite.log_abs(&diff), LogAbs::Finite(l) if l < 0) {
                return false;
            }
        }
        true
    }
}

/// Is beta S-integral with respect to alpha? Both clauses of the definition,
/// at every place outside S, without factoring the (large) numerator.
pub fn s_integral(beta: &Rat, alpha: &Rat, s: &PlaceSet) -> bool {
    SIntegralContext::new(alpha, s).test(beta)
}

/// A finitely generated phi-submodule, given by its generators.
#[derive(Clone, Debug)]
pub struct SubmoduleSpec {
    pub module: DrinfeldModule,
    pub generators: Vec<Rat>,
}

impl SubmoduleSpec {
    pub fn new(module: DrinfeldModule, generators: Vec<Rat>) -> Result<SubmoduleSpec> {
        if generators.is_empty() {
            return Err(Error::InvalidInput("at least one generator required".into()));
        }
        if generators.iter().any(|g| g.is_zero()) {
            return Err(Error::InvalidInput("generators must be nonzero".into()));
        }
        Ok(SubmoduleSpec { module, generators })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Torsion generators found up to the degree cap, as warning strings.
    /// Torsion generators are legal (the finiteness statements reduce to the
    /// free part), so this warns rather than rejects.
    pub fn torsion_warnings(&self, deg_cap: usize) -> Vec<String> {
        let mut out = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            if let Some(order) = self.module.torsion_annihilator(g, deg_cap) {
                out.push(format!("generator {} ({}) is torsion with order {}", i + 1, g, order));
            }
        }
        out
    }
}

/// Resource guards for the enumeration experiments.
#[derive(Clone, Copy, Debug)]
pub struct ResourceLimits {
    pub max_rows: u64,
    pub max_point_degree: usize,
}

impl Default for ResourceLimits {
    fn default() -> Self {
        ResourceLimits { max_rows: 1 << 20, max_point_degree: 1 << 16 }
    }
}

fn check_degree(x: &Rat, limits: &ResourceLimits, what: &str) -> Result<()> {
    let deg = x.num().degree().unwrap_or(0).max(x.den().degree().unwrap_or(0));
    if deg > limits.max_point_degree {
        return Err(Error::ResourceBound(format!(
            "{what} has degree {deg} > {}",
            limits.max_point_degree
        )));
    }
    Ok(())
}

/// phi_P(gamma) from the precomputed orbit gamma, phi_t(gamma), ...
fn apply_with_orbit(fq: &Fq, orbit: &[Rat], p: &Poly) -> Rat {
    let mut acc = Rat::zero(fq);
    for (k, &c) in p.coeffs().iter().enumerate() {
        if !fq.is_zero(c) {
            acc = acc.add_ref(&orbit[k].scale(c));
        }
    }
    acc
}

/// All q^(r (deg_cap + 1)) tuples (P_1, ..., P_r) with deg P_i <= deg_cap in
/// lexicographic enumeration order, with the exact points
/// sum_i phi_{P_i}(gamma_i).
pub fn enumerate_submodule(
    spec: &SubmoduleSpec,
    deg_cap: usize,
    limits: &ResourceLimits,
) -> Result<Vec<(Vec<Poly>, Rat)>> {
    let fq = spec.module.field();
    let r = spec.rank();
    let q = fq.q() as u128;
    let per_gen = q
        .checked_pow(deg_cap as u32 + 1)
        .ok_or_else(|| Error::ResourceBound("q^(deg_cap+1) overflows".into()))?;
    let count = per_gen
        .checked_pow(r as u32)
        .ok_or_else(|| Error::ResourceBound("tuple count overflows".into()))?;
    if count > limits.max_rows as u128 {
        return Err(Error::ResourceBound(format!(
            "{count} tuples exceed the row bound {}",
            limits.max_rows
        )));
    }

    // Orbits gamma_i, phi_t(gamma_i), ..., phi_{t^deg_cap}(gamma_i).
    let mut orbits: Vec<Vec<Rat>> = Vec::with_capacity(r);
    for (i, g) in spec.generators.iter().enumerate() {
        let mut orbit = vec![g.clone()];
        for _ in 0..deg_cap {
            let next = spec.module.eval_phi_t(orbit.last().unwrap());
            check_degree(&next, limits, &format!("orbit of generator {}", i + 1))?;
            orbit.push(next);
        }
        orbits.push(orbit);
    }

    let rows: Result<Vec<(Vec<Poly>, Rat)>> = (0..count as u64)
        .into_par_iter()
        .map(|flat| {
            let mut idx = flat as u128;
            // digit for the last generator varies fastest
            let mut tuple = vec![Poly::zero(fq); r];
            for i in (0..r).rev() {
                tuple[i] = poly_from_index(fq, idx % per_gen);
                idx /= per_gen;
            }
            let mut point = Rat::zero(fq);
            for i in 0..r {
                point = point.add_ref(&apply_with_orbit(fq, &orbits[i], &tuple[i]));
            }
            check_degree(&point, limits, &format!("point of tuple {flat}"))?;
            Ok((tuple, point))
        })
        .collect();
    rows
}

/// The enlarged finite place set outside of which nothing can happen: S, the
/// infinite place, the bad-reduction places, and the supports of alpha and
/// of every generator.
pub fn default_probe_set(spec: &SubmoduleSpec, alpha: &Rat, s: &PlaceSet) -> PlaceSet {
    let mut out = s.clone();
    out.insert(Place::Infinite);
    for v in spec.module.bad_places() {
        out.insert(v.clone());
    }
    let mut add_support = |x: &Rat| {
        if !x.is_zero() {
            for (v, _) in crate::places::support(x).expect("nonzero") {
                out.insert(v);
            }
        }
    };
    add_support(alpha);
    for g in &spec.generators {
        add_support(g);
    }
    out
}

/// The shared engine: evaluate rows, sort, count, and chart ratios.
fn build_report(
    spec: &SubmoduleSpec,
    alpha: &Rat,
    s: &PlaceSet,
    probe: &PlaceSet,
    tuples_and_points: Vec<(Vec<Poly>, Rat)>,
    caps: Vec<u64>,
    warnings: Vec<String>,
) -> ExperimentReport {
    let d = spec.module.rank() as u32;
    let q = spec.module.q();
    let probe_places: Vec<Place> = probe.iter().cloned().collect();
    let sctx = SIntegralContext::new(alpha, s);

    let mut rows: Vec<ExperimentRow> = tuples_and_points
        .into_par_iter()
        .map(|(tuple, point)| {
            let s_int = sctx.test(&point);
            let diff = point.sub_ref(alpha);
            // denominator sum_i q^(d deg P_i), with zero entries contributing
            // nothing; the all-zero tuple leaves it zero (flagged).
            let mut denom = BigInt::zero();
            for p in &tuple {
                if let Some(deg) = p.degree() {
                    denom += BigInt::from(q).pow(d * deg as u32);
                }
            }
            let ratios: Vec<RatioCell> = probe_places
                .iter()
                .map(|v| {
                    if diff.is_zero() || denom.is_zero() {
                        RatioCell::Exceptional
                    } else {
                        let l = v.log_abs(&diff).finite().unwrap();
                        RatioCell::Value(BigRational::new(BigInt::from(l), denom.clone()))
                    }
                })
                .collect();
            ExperimentRow { tuple, point, s_integral: s_int, ratios }
        })
        .collect();
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));

    let mut distinct_counts = Vec::with_capacity(caps.len());
    let mut row_counts = Vec::with_capacity(caps.len());
    for &cap in &caps {
        let mut distinct: HashSet<&Rat> = HashSet::new();
        let mut n_rows = 0u64;
        for row in rows.iter().filter(|r| r.max_deg() <= cap as i64 && r.s_integral) {
            distinct.insert(&row.point);
            n_rows += 1;
        }
        distinct_counts.push(distinct.len() as u64);
        row_counts.push(n_rows);
    }
    let stabilized = match caps.len() {
        0 | 1 => true,
        n => distinct_counts[n - 1] == distinct_counts[n - 2],
    };

    let mut point_multiplicity: HashMap<&Rat, u64> = HashMap::new();
    for row in &rows {
        *point_multiplicity.entry(&row.point).or_insert(0) += 1;
    }
    let collisions = rows.len() as u64 - point_multiplicity.len() as u64;

    let exceptional_rows = rows
        .iter()
        .filter(|r| r.ratios.first().map_or(false, |c| *c == RatioCell::Exceptional))
        .count() as u64;

    let ratio_stats: Vec<RatioStats> = (0..probe_places.len())
        .map(|j| {
            let mut stats = RatioStats::default();
            for row in &rows {
                if let RatioCell::Value(r) = &row.ratios[j] {
                    stats.rows_used += 1;
                    stats.running_min = Some(match stats.running_min.take() {
                        None => r.clone(),
                        Some(m) => m.min(r.clone()),
                    });
                    stats.running_max = Some(match stats.running_max.take() {
                        None => r.clone(),
                        Some(m) => m.max(r.clone()),
                    });
                }
            }
            stats
        })
        .collect();

    ExperimentReport {
        probe_places,
        rows,
        caps,
        distinct_integral_points: distinct_counts,
        integral_rows: row_counts,
        stabilized,
        collisions,
        exceptional_rows,
        warnings,
        ratio_stats,
    }
}

/// Count the S-integral points of the submodule over a ladder of degree
/// caps; the distinct-point counts stabilizing is the empirical finiteness
/// signature.
pub fn siegel_experiment(
    spec: &SubmoduleSpec,
    alpha: &Rat,
    s: &PlaceSet,
    deg_caps: &[u64],
    probe: Option<&PlaceSet>,
    limits: &ResourceLimits,
) -> Result<ExperimentReport> {
    if deg_caps.is_empty() {
        return Err(Error::InvalidInput("at least one degree cap required".into()));
    }
    let mut caps = deg_caps.to_vec();
    caps.sort_unstable();
    let max_cap = *caps.last().unwrap() as usize;
    let rows = enumerate_submodule(spec, max_cap, limits)?;
    let default_probe;
    let probe = match probe {
        Some(p) => p,
        None => {
            default_probe = default_probe_set(spec, alpha, s);
            &default_probe
        }
    };
    let warnings = spec.torsion_warnings(max_cap.max(4));
    Ok(build_report(spec, alpha, s, probe, rows, caps, warnings))
}

/// For every Q of degree <= deg_cap, decide whether phi_Q(beta) is
/// S-integral with respect to alpha. The theorem counts polynomials, so the
/// per-cap row counts are the quantity of interest here.
pub fn silverman_experiment(
    m: &DrinfeldModule,
    beta: &Rat,
    alpha: &Rat,
    s: &PlaceSet,
    deg_cap: u64,
    iter_cap: u64,
    probe: Option<&PlaceSet>,
    limits: &ResourceLimits,
) -> Result<ExperimentReport> {
    let spec = SubmoduleSpec::new(m.clone(), vec![beta.clone()])?;
    let rows = enumerate_submodule(&spec, deg_cap as usize, limits)?;
    let default_probe;
    let probe = match probe {
        Some(p) => p,
        None => {
            default_probe = default_probe_set(&spec, alpha, s);
            &default_probe
        }
    };
    let mut warnings = Vec::new();
    let (h, cert) = crate::heights::canonical_height(m, beta, iter_cap);
    if h.is_zero() && cert == crate::heights::Certainty::Exact {
        warnings.push(format!("beta ({beta}) is torsion; the finiteness statement assumes a nontorsion point"));
    }
    let caps: Vec<u64> = (0..=deg_cap).collect();
    Ok(build_report(&spec, alpha, s, probe, rows, caps, warnings))
}

/// Exact ratio sequences over an explicit family of tuples.
#[derive(Clone, Debug)]
pub struct RatioSeries {
    pub report: ExperimentReport,
}

impl RatioSeries {
    /// The ratio sequence at a probe place, in row order.
    pub fn series(&self, v: &Place) -> Option<Vec<RatioCell>> {
        let j = self.report.probe_places.iter().position(|w| w == v)?;
        Some(self.report.rows.iter().map(|r| r.ratios[j].clone()).collect())
    }

    pub fn running_min(&self, v: &Place) -> Option<&BigRational> {
        let j = self.report.probe_places.iter().position(|w| w == v)?;
        self.report.ratio_stats[j].running_min.as_ref()
    }

    pub fn running_max(&self, v: &Place) -> Option<&BigRational> {
        let j = self.report.probe_places.iter().position(|w| w == v)?;
        self.report.ratio_stats[j].running_max.as_ref()
    }
}

/// The log-distance ratios of sum_i phi_{P_i}(gamma_i) - alpha at each probe
/// place, for an explicit list of pairwise distinct tuples. Exceptional rows
/// (value alpha, or the all-zero tuple) are flagged and excluded from the
/// running statistics.
pub fn ratio_series(
    spec: &SubmoduleSpec,
    alpha: &Rat,
    probe: &PlaceSet,
    tuples: &[Vec<Poly>],
    s: &PlaceSet,
    limits: &ResourceLimits,
) -> Result<RatioSeries> {
    let r = spec.rank();
    let mut seen: HashSet<Vec<u128>> = HashSet::new();
    for tuple in tuples {
        if tuple.len() != r {
            return Err(Error::InvalidInput(format!(
                "tuple length {} does not match the {} generators",
                tuple.len(),
                r
            )));
        }
        let key: Vec<u128> = tuple.iter().map(|p| p.enum_index()).collect();
        if !seen.insert(key) {
            return Err(Error::InvalidInput("tuples must be pairwise distinct".into()));
        }
    }
    if tuples.len() as u64 > limits.max_rows {
        return Err(Error::ResourceBound(format!(
            "{} tuples exceed the row bound {}",
            tuples.len(),
            limits.max_rows
        )));
    }
    let fq = spec.module.field();
    let max_deg = tuples
        .iter()
        .flat_map(|t| t.iter().map(|p| p.degree().unwrap_or(0)))
        .max()
        .unwrap_or(0);
    let mut orbits: Vec<Vec<Rat>> = Vec::with_capacity(r);
    for (i, g) in spec.generators.iter().enumerate() {
        let mut orbit = vec![g.clone()];
        for _ in 0..max_deg {
            let next = spec.module.eval_phi_t(orbit.last().unwrap());
            check_degree(&next, limits, &format!("orbit of generator {}", i + 1))?;
            orbit.push(next);
        }
        orbits.push(orbit);
    }
    let rows: Result<Vec<(Vec<Poly>, Rat)>> = tuples
        .par_iter()
        .map(|tuple| {
            let mut point = Rat::zero(fq);
            for i in 0..r {
                point = point.add_ref(&apply_with_orbit(fq, &orbits[i], &tuple[i]));
            }
            check_degree(&point, limits, "ratio-series point")?;
            Ok((tuple.clone(), point))
        })
        .collect();
    let caps: Vec<u64> = Vec::new();
    let report = build_report(spec, alpha, s, probe, rows?, caps, Vec::new());
    Ok(RatioSeries { report })
}
