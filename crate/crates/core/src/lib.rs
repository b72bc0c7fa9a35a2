//! Exact arithmetic for Drinfeld modules over the rational function field
//! F_q(t): twisted polynomials, normalized valuations, Weil and canonical
//! heights as exact rationals, torsion testing, S-integrality decisions, and
//! the experiment harness behind the `drinfeld` command-line tool.
//!
//! Everything is computed in exact arithmetic: finite-field elements,
//! polynomials over F_q, rational functions in reduced normal form, and
//! heights as arbitrary-precision rationals in log_q units. No floating
//! point is used anywhere.

pub mod error;
pub mod fq;
pub mod poly;
pub mod rat;

pub mod places;

pub mod drinfeld;
pub mod twisted;

pub mod heights;

pub mod integrality;
pub mod report;

pub use error::{Error, Result};
pub use fq::{Fq, FqElem};
pub use poly::{enumerate_irreducibles, enumerate_polys, Poly};
pub use rat::Rat;

pub use places::{enumerate_places, product_formula_check, support, LogAbs, Place};

pub use drinfeld::{DrinfeldModule, ReductionType};
pub use twisted::TwistedPoly;

pub use heights::{
    canonical_height, denominator_bound_check, in_filled_julia, local_canonical_height,
    local_canonical_height_with, log_distance_ratio, naive_height_estimate, thresholds,
    weil_height, weil_height_via_places, Certainty, JuliaStatus, LocalHeightResult,
    LocalHeightStatus, Thresholds, DEFAULT_ANNULUS_CAP,
};

pub use integrality::{
    default_probe_set, enumerate_submodule, ratio_series, s_integral, siegel_experiment,
    silverman_experiment, PlaceSet, RatioSeries, ResourceLimits, SubmoduleSpec,
};
pub use report::{ExperimentReport, ExperimentRow, RatioCell};
