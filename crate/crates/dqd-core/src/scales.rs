//! Analytic energy scales of the dot pair coupled to leads, and a numeric
//! locator for the critical exchange where concurrence switches on.
//!
//! The analytic estimates are leading-order: a Kondo temperature in the
//! Haldane form, a two-stage screening scale with tunable prefactor and
//! exponent constants, and an RKKY magnitude whose prefactor follows from
//! fourth-order perturbation theory in the dot-lead coupling.

use crate::error::{Error, Result};
use crate::model::{ModelSpec, Topology};
use crate::pipeline::{solve, SolveOptions};

/// `64 / pi^2`, the RKKY prefactor at half bandwidth filling.
pub const RKKY_PREFACTOR: f64 = 64.0 / (std::f64::consts::PI * std::f64::consts::PI);

/// Critical exchange in the series geometry sits at this multiple of the
/// Kondo temperature.
pub const SERIES_JC_OVER_TK: f64 = 2.5;

/// Order-one constants of the analytic estimates, adjustable because the
/// underlying formulas are asymptotic.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ScaleConstants {
    /// Prefactor of the two-stage screening scale.
    pub d1: f64,
    /// Exponent coefficient of the two-stage screening scale.
    pub d2: f64,
    /// Overall factor on the RKKY magnitude.
    pub c: f64,
}

impl Default for ScaleConstants {
    fn default() -> Self {
        ScaleConstants {
            d1: 1.0,
            d2: -1.0,
            c: 1.0,
        }
    }
}

impl ScaleConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.d1 > 0.0) {
            return Err(Error::InvalidParameter(format!("d1 = {} must be > 0", self.d1)));
        }
        if !(self.c > 0.0) {
            return Err(Error::InvalidParameter(format!("c = {} must be > 0", self.c)));
        }
        if !self.d2.is_finite() {
            return Err(Error::InvalidParameter("d2 must be finite".into()));
        }
        Ok(())
    }
}

/// Kondo temperature in the Haldane form,
/// `T_K = sqrt(U Gamma / 2) exp(-pi U / (8 Gamma))`.
pub fn haldane_tk(u: f64, gamma: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::InvalidParameter(format!("u = {u} must be > 0")));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be > 0")));
    }
    Ok((0.5 * u * gamma).sqrt() * (-std::f64::consts::PI * u / (8.0 * gamma)).exp())
}

/// Second-stage screening temperature,
/// `T_K2 = d1 T_K1 exp(d2 J / T_K1)`.
pub fn two_stage_tk2(j: f64, tk1: f64, k: &ScaleConstants) -> Result<f64> {
    k.validate()?;
    if !(tk1 > 0.0) {
        return Err(Error::InvalidParameter(format!("tk1 = {tk1} must be > 0")));
    }
    if !j.is_finite() || j < 0.0 {
        return Err(Error::InvalidParameter(format!("j = {j} must be >= 0")));
    }
    Ok(k.d1 * tk1 * (k.d2 * j / tk1).exp())
}

/// Magnitude of the lead-mediated RKKY exchange,
/// `|J_RKKY| = c (64 / pi^2) Gamma^2 / U`. Ferromagnetic in the parallel
/// geometry.
pub fn rkky_estimate(gamma: f64, u: f64, k: &ScaleConstants) -> Result<f64> {
    k.validate()?;
    if !(u > 0.0) {
        return Err(Error::InvalidParameter(format!("u = {u} must be > 0")));
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be >= 0")));
    }
    Ok(k.c * RKKY_PREFACTOR * gamma * gamma / u)
}

/// How a critical-coupling figure was obtained.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CriticalBasis {
    Analytic,
    NumericBisection,
}

/// A critical interdot exchange, analytic or located numerically.
#[derive(Copy, Clone, Debug)]
pub struct CriticalEstimate {
    pub topology: Topology,
    pub basis: CriticalBasis,
    /// Critical exchange `J_c`.
    pub j_c: f64,
    /// Interdot hopping reproducing `J_c` through `J = 4 t^2 / U`.
    pub t_c: f64,
    pub u: f64,
    pub gamma: f64,
    pub temperature: f64,
    pub b_field: f64,
}

/// Analytic critical exchange for the named geometries: `2.5 T_K` in
/// series, `T_K` side-coupled (two-stage onset), `|J_RKKY|` in parallel
/// (ferromagnetic competition). `gamma` is the width quoted for the
/// geometry, passed explicitly.
pub fn critical_j_analytic(
    topology: Topology,
    u: f64,
    gamma: f64,
    k: &ScaleConstants,
) -> Result<CriticalEstimate> {
    let j_c = match topology {
        Topology::Series => SERIES_JC_OVER_TK * haldane_tk(u, gamma)?,
        Topology::SideCoupled => haldane_tk(u, gamma)?,
        Topology::Parallel => rkky_estimate(gamma, u, k)?,
        Topology::Custom { .. } => {
            return Err(Error::InvalidParameter(
                "no analytic critical-coupling rule for a custom geometry".into(),
            ))
        }
    };
    Ok(CriticalEstimate {
        topology,
        basis: CriticalBasis::Analytic,
        j_c,
        t_c: 0.5 * (j_c * u).sqrt(),
        u,
        gamma,
        temperature: 0.0,
        b_field: 0.0,
    })
}

/// Result of a numeric search for the concurrence onset.
#[derive(Clone, Debug)]
pub enum JcOutcome {
    Crossing(CriticalEstimate),
    /// Concurrence does not straddle the threshold inside the bracket.
    NoCrossing { c_lo: f64, c_hi: f64 },
}

/// Threshold treated as "concurrence has switched on" by the locator.
pub const ONSET_THRESHOLD: f64 = 1e-6;

/// Locate the interdot hopping where the concurrence of `template` crosses
/// `threshold`, by bisection on `t` inside `bracket`. The bracket shrinks
/// until its relative width is below 1e-3; the concurrence values sampled
/// along the way must be monotone in `t` (to 1e-9), otherwise the crossing
/// is rejected as unreliable.
pub fn find_jc_numeric(
    template: &ModelSpec,
    bracket: (f64, f64),
    threshold: f64,
    opts: &SolveOptions,
) -> Result<JcOutcome> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0) || !(hi > lo) {
        return Err(Error::InvalidParameter(format!(
            "bracket ({lo}, {hi}) must satisfy 0 < lo < hi"
        )));
    }
    if !(template.u > 0.0) {
        return Err(Error::InvalidParameter(
            "critical exchange needs u > 0".into(),
        ));
    }
    let c_at = |t: f64| -> Result<f64> {
        let spec = ModelSpec { t, ..*template };
        Ok(solve(&spec, opts)?.report.concurrence)
    };

    let mut samples: Vec<(f64, f64)> = Vec::new();
    let c_lo = c_at(lo)?;
    let c_hi = c_at(hi)?;
    samples.push((lo, c_lo));
    samples.push((hi, c_hi));
    if (c_lo > threshold) == (c_hi > threshold) {
        return Ok(JcOutcome::NoCrossing { c_lo, c_hi });
    }
    let rising = c_hi > c_lo;

    while (hi - lo) > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        let c_mid = c_at(mid)?;
        samples.push((mid, c_mid));
        let above = c_mid > threshold;
        if above == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for w in samples.windows(2) {
        let increasing_ok = w[1].1 >= w[0].1 - 1e-9;
        let decreasing_ok = w[1].1 <= w[0].1 + 1e-9;
        if (rising && !increasing_ok) || (!rising && !decreasing_ok) {
            return Err(Error::NonMonotonicCrossing { t: w[1].0 });
        }
    }

    let t_c = 0.5 * (lo + hi);
    Ok(JcOutcome::Crossing(CriticalEstimate {
        topology: template.topology,
        basis: CriticalBasis::NumericBisection,
        j_c: 4.0 * t_c * t_c / template.u,
        t_c,
        u: template.u,
        gamma: crate::model::hybridization_width(template)?.value(),
        temperature: template.temperature,
        b_field: template.b_field,
    }))
}
