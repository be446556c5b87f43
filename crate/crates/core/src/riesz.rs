//! Riesz characteristic p_M = sup{p : I − p P_e ∈ M for all unit e} of a
//! convex cone subequation, and the inclusion law 𝒫(p) ⊂ M ⟺ p ≤ p_M.
//!
//! The supremum is taken over a finite direction sample, so for cones that
//! are not orthogonally invariant the result is an upper estimate.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::make_pcone;
use crate::checks::sample_where;
use crate::error::{Error, Result};
use crate::linalg::{Jet, SymMatrix};
use crate::sampling::{self, SampleBox};
use crate::subequation::Subequation;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_DIRECTIONS: usize = 64;
pub const MAX_DEPTH: usize = 60;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszResult {
    pub p_m: f64,
    pub directions_tested: usize,
    pub bracket: (f64, f64),
}

fn probe(m: &Subequation, p: f64, e: &[f64]) -> bool {
    let a = SymMatrix::identity(e.len()).sub(&SymMatrix::line_projection(e).scale(p));
    m.member(None, &Jet::hessian(a)).is_member()
}

fn validate(m: &Subequation, tol: f64) -> Result<()> {
    if !m.flags().cone {
        return Err(Error::InvalidParameter(format!(
            "{} is not a cone",
            m.label()
        )));
    }
    if m.flags().x_dependent {
        return Err(Error::InvalidParameter(format!(
            "{} depends on x",
            m.label()
        )));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Bisects `pred` (true at `lo`, false at `hi`) down to width `tol`.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, pred: impl Fn(f64) -> bool) -> (f64, f64) {
    for _ in 0..MAX_DEPTH {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// p_M by bisection over [0, n + 1] on the predicate "I − p P_e ∈ M for all
/// sampled e", with `dirs` sphere points plus the coordinate axes.
pub fn riesz_characteristic(m: &Subequation, tol: f64, dirs: usize) -> Result<RieszResult> {
    validate(m, tol)?;
    let n = m.n();
    let directions = sampling::probe_directions(n, dirs);
    let all = |p: f64| directions.par_iter().all(|e| probe(m, p, e));
    if !all(0.0) {
        return Err(Error::InvalidParameter(format!(
            "I is not in {}",
            m.label()
        )));
    }
    let top = (n + 1) as f64;
    if all(top) {
        return Err(Error::Unbounded(format!(
            "I − {top}·P_e ∈ {} for every sampled e",
            m.label()
        )));
    }
    let (lo, hi) = bisect(0.0, top, tol, all);
    Ok(RieszResult {
        p_m: 0.5 * (lo + hi),
        directions_tested: directions.len(),
        bracket: (lo, hi),
    })
}

/// The threshold sup{p : I − p P_e ∈ M} for each sampled direction e, in the
/// order of [`sampling::probe_directions`]. Directions still inside at
/// p = n + 1 report +∞.
pub fn direction_thresholds(m: &Subequation, tol: f64, dirs: usize) -> Result<Vec<f64>> {
    validate(m, tol)?;
    let n = m.n();
    let top = (n + 1) as f64;
    let directions = sampling::probe_directions(n, dirs);
    Ok(directions
        .par_iter()
        .map(|e| {
            if !probe(m, 0.0, e) {
                f64::NAN
            } else if probe(m, top, e) {
                f64::INFINITY
            } else {
                let (lo, hi) = bisect(0.0, top, tol, |p| probe(m, p, e));
                0.5 * (lo + hi)
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub label: String,
    pub p: f64,
    pub p_m: f64,
    pub trials: usize,
    pub violations: usize,
    /// p ≤ p_M within tolerance.
    pub expected_inclusion: bool,
    /// The sampled verdict matches the sign of p − p_M, or p is within
    /// `tol` of p_M.
    pub consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SymMatrix>,
}

/// Samples members of 𝒫(p) and tests them for membership in M. Every tenth
/// sample is a boundary point t(I − p P_e) with random e and t > 0, the rest
/// are random members.
pub fn pcone_inclusion_check(
    m: &Subequation,
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<InclusionReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
    }
    let n = m.n();
    let riesz = riesz_characteristic(m, DEFAULT_TOL, DEFAULT_DIRECTIONS)?;
    let pc = make_pcone(p, n)?;
    let b = SampleBox::default();
    let mut rng = sampling::rng(seed);
    let mut violations = 0;
    let mut witness = None;
    for i in 0..trials {
        let a = if i % 10 == 9 {
            let e = sampling::random_unit(n, &mut rng);
            let t = rng.random_range(0.1..5.0);
            SymMatrix::identity(n)
                .sub(&SymMatrix::line_projection(&e).scale(p))
                .scale(t)
        } else {
            sample_where(&pc, &b, &mut rng, |v| v >= 0.0)?.1.a
        };
        if !m.member(None, &Jet::hessian(a.clone())).is_member() {
            violations += 1;
            witness.get_or_insert(a);
        }
    }
    let expected_inclusion = p <= riesz.p_m + DEFAULT_TOL;
    let near = (p - riesz.p_m).abs() <= 10.0 * DEFAULT_TOL;
    Ok(InclusionReport {
        label: m.label().to_string(),
        p,
        p_m: riesz.p_m,
        trials,
        violations,
        expected_inclusion,
        consistent: near || (violations == 0) == expected_inclusion,
        witness,
    })
}
