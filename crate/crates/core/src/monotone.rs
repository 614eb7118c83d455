//! Generalized monotonicity: `f*(t) <= C \bar f(t)` for interval averages.
//!
//! A finite window cannot prove the inequality for all `t`, so the constant is
//! computed over a range of thresholds and again over half that range; it is
//! called stable when the two agree to 5%.

use serde::Serialize;

use crate::bounds::{hoermander_upper_fun, hoermander_upper_seq, necessary_lower_fun, necessary_lower_seq, FunOptions};
use crate::error::{Error, Result};
use crate::netspace::{averaged_profile_fun, averaged_profile_seq, GridOptions, IntervalFamily};
use crate::rearrange::{rearrangement_fun, rearrangement_seq};
use crate::symbols::{ExponentTriple, FunSymbol, Interval, SeqSymbol, Symbol};

/// Relative change allowed between the half-range and full-range constants.
pub const STABILITY_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneCertificate {
    /// Largest observed `f*(t) / \bar f(t)` (`0/0` counts as 1). Thresholds
    /// where only the denominator vanishes are skipped and set `violated`.
    pub constant_c: f64,
    /// Same maximum over the lower half of the threshold range.
    pub constant_c_half: f64,
    pub checked_thresholds: Vec<f64>,
    pub violated: bool,
    /// Threshold where the ratio is largest.
    pub witness: f64,
    pub stable: bool,
}

impl MonotoneCertificate {
    fn from_ratios(ts: Vec<f64>, star: &[f64], avg: &[f64]) -> Self {
        let mut violated = false;
        let ratios: Vec<f64> = star
            .iter()
            .zip(avg)
            .map(|(&s, &b)| match (s > 0.0, b > 0.0) {
                (false, false) => 1.0,
                (true, false) => {
                    violated = true;
                    f64::NAN
                }
                _ => s / b,
            })
            .collect();
        let top = ts.last().copied().unwrap_or(0.0);
        let mut c = 0.0;
        let mut c_half = 0.0;
        let mut witness = ts.first().copied().unwrap_or(0.0);
        for (&t, &q) in ts.iter().zip(&ratios) {
            if q.is_nan() {
                continue;
            }
            if q > c {
                c = q;
                witness = t;
            }
            if t <= 0.5 * top {
                c_half = f64::max(c_half, q);
            }
        }
        let stable = !violated && (c - c_half).abs() <= STABILITY_TOLERANCE * c;
        MonotoneCertificate {
            constant_c: c,
            constant_c_half: c_half,
            checked_thresholds: ts,
            violated,
            witness,
            stable,
        }
    }

    pub fn is_conclusive(&self) -> bool {
        self.stable && !self.violated
    }
}

/// `max_{1 <= k <= kmax} a*_k / \bar a_k(W)` with `W` all intervals in the window.
pub fn monotone_constant_seq(a: &SeqSymbol, kmax: Option<usize>) -> Result<MonotoneCertificate> {
    let kmax = kmax.unwrap_or(a.len());
    if kmax < 2 {
        return Err(Error::InvalidParameter(format!("kmax = {kmax} leaves no range to double")));
    }
    let star = rearrangement_seq(a);
    let prof = averaged_profile_seq(a, &IntervalFamily::All);
    let ts: Vec<f64> = (1..=kmax).map(|k| k as f64).collect();
    let s: Vec<f64> = (1..=kmax).map(|k| star.get(k - 1).copied().unwrap_or(0.0)).collect();
    let b: Vec<f64> = ts.iter().map(|&t| prof.at(t)).collect();
    Ok(MonotoneCertificate::from_ratios(ts, &s, &b))
}

/// Thresholds `T 2^{-j}` from the domain length `T` down to the grid spacing.
pub fn default_tgrid(domain: Interval, grid: &GridOptions) -> Vec<f64> {
    let top = domain.len();
    let floor = grid.mesh.max(top / grid.max_cells as f64);
    let mut ts = vec![top];
    while *ts.last().unwrap() * 0.5 >= floor {
        let t = ts.last().unwrap() * 0.5;
        ts.push(t);
    }
    ts.reverse();
    ts
}

/// `max_t f*(t) / \bar f(t)` over `tgrid`, intervals and rearrangement taken
/// inside `domain`.
pub fn monotone_constant_fun(
    f: &FunSymbol,
    domain: Interval,
    tgrid: Option<Vec<f64>>,
    grid: GridOptions,
    mesh: f64,
) -> Result<MonotoneCertificate> {
    let mut ts = tgrid.unwrap_or_else(|| default_tgrid(domain, &grid));
    ts.sort_by(f64::total_cmp);
    if ts.is_empty() || !(ts[0] > 0.0) {
        return Err(Error::InvalidParameter("thresholds must be positive".into()));
    }
    let star = rearrangement_fun(f, domain, mesh)?;
    let fam = IntervalFamily::Span {
        lo: domain.lo,
        hi: domain.hi,
    };
    let prof = averaged_profile_fun(f, &fam, grid)?;
    let s: Vec<f64> = ts.iter().map(|&t| star.eval(t)).collect();
    let b: Vec<f64> = ts.iter().map(|&t| prof.at(t)).collect();
    Ok(MonotoneCertificate::from_ratios(ts, &s, &b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    Unbounded,
    Inapplicable,
}

/// For generalized-monotone symbols boundedness is equivalent to finiteness of
/// the necessary lower bound; otherwise nothing is concluded. On a finite
/// window the two sides are only growth evidence, so a finite lower bound next
/// to a divergent block upper bound means the certificate did not capture the
/// symbol, and the verdict is inapplicable.
pub fn criteria_verdict(
    lambda: &Symbol,
    e: &ExponentTriple,
    cert: &MonotoneCertificate,
    opts: &FunOptions,
) -> Result<Verdict> {
    if !cert.is_conclusive() {
        return Ok(Verdict::Inapplicable);
    }
    let lower = match lambda {
        Symbol::Seq(a) => necessary_lower_seq(a, e)?,
        Symbol::Fun(f) => necessary_lower_fun(f, e, opts)?,
    };
    if lower.divergent {
        return Ok(Verdict::Unbounded);
    }
    let upper = match lambda {
        Symbol::Seq(a) => hoermander_upper_seq(a, e)?,
        Symbol::Fun(f) => hoermander_upper_fun(f, e, opts)?,
    };
    Ok(if upper.quantity.divergent {
        Verdict::Inapplicable
    } else {
        Verdict::Bounded
    })
}
