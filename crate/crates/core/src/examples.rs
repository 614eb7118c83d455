//! The named example symbols and the values they are known to produce.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    hoermander_classic, hoermander_upper_fun, hoermander_upper_seq, lizorkin_classic, lizorkin_upper_fun,
    lizorkin_upper_seq, marcinkiewicz_variation, tau_to_tau_upper, FunOptions,
};
use crate::divergence::Quantity;
use crate::error::{Error, Result};
use crate::symbols::{make_exponents, pow2, ExponentTriple, FunSymbol, Mode, SeqSymbol, Singularity, Symbol};

/// Range of `k` for which singular points of the function examples are declared.
const HINT_KS: std::ops::RangeInclusive<i32> = -40..=40;

/// Quantities an expectation can refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    HoermanderBlock,
    HoermanderClassic,
    LizorkinDyadic,
    LizorkinClassic,
    TauToTauBlock,
    MarcinkiewiczVariation,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Measure::HoermanderBlock => "hoermander_block",
            Measure::HoermanderClassic => "hoermander_classic",
            Measure::LizorkinDyadic => "lizorkin_dyadic",
            Measure::LizorkinClassic => "lizorkin_classic",
            Measure::TauToTauBlock => "tau_to_tau_block",
            Measure::MarcinkiewiczVariation => "marcinkiewicz_variation",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Target {
    Equals(f64),
    AtMost(f64),
    Divergent,
    Finite,
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Stated in the literature for this example.
    Stated,
    /// Worked out independently from the definition.
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expectation {
    pub measure: Measure,
    pub target: Target,
    /// Exact rows compare to 1e-12; the others use the caller's tolerance.
    pub exact: bool,
    pub basis: Basis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Parameters {
    pub r: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    pub depth: Option<i32>,
}

impl Parameters {
    fn none() -> Self {
        Parameters {
            r: None,
            alpha: None,
            gamma: None,
            tau: None,
            depth: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NamedExample {
    pub name: &'static str,
    pub parameters: Parameters,
    pub symbol: Symbol,
    /// Exponents the bounds are evaluated with.
    pub exponents: ExponentTriple,
    pub fun_options: FunOptions,
    pub expected: Vec<Expectation>,
}

/// Exponents with `1/p - 1/q = 1/r` placed symmetrically around `1/2`.
pub fn symmetric_exponents(r: f64, mode: Mode) -> Result<ExponentTriple> {
    if !(r > 1.0) {
        return Err(Error::InvalidParameter(format!("r = {r} must exceed 1")));
    }
    let h = 0.5 / r;
    make_exponents(1.0 / (0.5 + h), 1.0 / (0.5 - h), mode)
}

fn expect(measure: Measure, target: Target, exact: bool, basis: Basis) -> Expectation {
    Expectation {
        measure,
        target,
        exact,
        basis,
    }
}

/// Even, `(|xi| - 2^k)^{-1/r}` on `2^k < |xi| < 2^{k+1}` for every integer `k`.
pub fn exm_h1(r: f64) -> Result<NamedExample> {
    let e = symmetric_exponents(r, Mode::Hoermander)?;
    let inv_r = 1.0 / r;
    let f = FunSymbol::real(move |x: f64| {
        let a = x.abs();
        if a == 0.0 || !a.is_finite() {
            return 0.0;
        }
        let base = pow2(a.log2().floor() as i32);
        (a - base).powf(-inv_r)
    });
    let hints = HINT_KS
        .flat_map(|k| [-pow2(k), pow2(k)])
        .map(|location| Singularity {
            location,
            exponent: -inv_r,
        })
        .collect();
    Ok(NamedExample {
        name: "exmH1",
        parameters: Parameters {
            r: Some(r),
            ..Parameters::none()
        },
        symbol: Symbol::Fun(f.with_singularities(hints)?),
        exponents: e,
        fun_options: FunOptions {
            krange: (-5, 10),
            ..FunOptions::default()
        },
        expected: vec![
            expect(Measure::HoermanderBlock, Target::Equals(1.0), false, Basis::Stated),
            // Delta_k has two halves, each with distribution sigma^{-r}.
            expect(Measure::HoermanderBlock, Target::Equals(2f64.powf(1.0 / r)), false, Basis::Derived),
            expect(Measure::HoermanderClassic, Target::Divergent, false, Basis::Stated),
        ],
    })
}

/// `lambda_j = (j + 1 - 2^k)^{-1/r}` for `2^k <= j < 2^{k+1}`, `k = 0..=depth`;
/// zero for `j <= 0`. The window is `[0, 2^{depth+1} - 1]`.
pub fn exam_h2(r: f64, depth: i32) -> Result<NamedExample> {
    let e = symmetric_exponents(r, Mode::Hoermander)?;
    check_depth(depth)?;
    let hi = (1i64 << (depth + 1)) - 1;
    let inv_r = 1.0 / r;
    let a = SeqSymbol::from_fn(0, hi, false, |j| {
        if j <= 0 {
            return Complex64::new(0.0, 0.0);
        }
        let base = 1i64 << (63 - j.leading_zeros());
        Complex64::new(((j + 1 - base) as f64).powf(-inv_r), 0.0)
    })?;
    let ones = (depth + 1) as f64;
    Ok(NamedExample {
        name: "examH2",
        parameters: Parameters {
            r: Some(r),
            depth: Some(depth),
            ..Parameters::none()
        },
        symbol: Symbol::Seq(a),
        exponents: e,
        fun_options: FunOptions::default(),
        expected: vec![
            expect(Measure::HoermanderBlock, Target::Equals(1.0), true, Basis::Stated),
            expect(Measure::HoermanderClassic, Target::Divergent, true, Basis::Stated),
            expect(Measure::HoermanderClassic, Target::Equals(ones.powf(inv_r)), true, Basis::Derived),
        ],
    })
}

fn check_depth(depth: i32) -> Result<()> {
    if (1..=24).contains(&depth) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("depth {depth} outside 1..=24")))
    }
}

/// Even, `(2 - |x|)^alpha` for `|x| <= 2`, zero beyond.
pub fn exam_l1(alpha: f64, r: f64) -> Result<NamedExample> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0, 1)")));
    }
    let e = symmetric_exponents(r, Mode::Lizorkin)?;
    let f = FunSymbol::real(move |x: f64| if x.abs() <= 2.0 { (2.0 - x.abs()).powf(alpha) } else { 0.0 })
        .with_derivative(move |x: f64| {
            if x.abs() < 2.0 {
                -x.signum() * alpha * (2.0 - x.abs()).powf(alpha - 1.0)
            } else {
                0.0
            }
        })?
        .with_singularities(
            [-2.0, 2.0]
                .into_iter()
                .map(|location| Singularity {
                    location,
                    exponent: alpha - 1.0,
                })
                .collect(),
        )?
        .with_breakpoints(vec![0.0])
        .with_vanishing(true);
    Ok(NamedExample {
        name: "examL1",
        parameters: Parameters {
            r: Some(r),
            alpha: Some(alpha),
            ..Parameters::none()
        },
        symbol: Symbol::Fun(f),
        exponents: e,
        fun_options: FunOptions::default(),
        expected: vec![
            expect(Measure::LizorkinDyadic, Target::Finite, false, Basis::Stated),
            expect(Measure::LizorkinDyadic, Target::Equals(2.0), false, Basis::Derived),
            expect(Measure::LizorkinClassic, Target::Divergent, false, Basis::Stated),
        ],
    })
}

/// `sum_{j >= 0} 2^{-j/r}`.
pub fn geometric_gamma(r: f64) -> f64 {
    1.0 / (1.0 - 2f64.powf(-1.0 / r))
}

/// Even sequence with `lambda_0 = gamma` that drops by `2^{-k/r}` at `2^k` and is
/// constant on `[2^k, 2^{k+1})`; the level on that range is the geometric tail
/// `gamma 2^{-(k+1)/r}`.
pub fn exam_l2(r: f64, depth: i32) -> Result<NamedExample> {
    let e = symmetric_exponents(r, Mode::Lizorkin)?;
    check_depth(depth)?;
    let hi = (1i64 << (depth + 1)) - 1;
    let gamma = geometric_gamma(r);
    let a = SeqSymbol::from_fn(-hi, hi, true, |j| Complex64::new(exam_l2_value(r, gamma, j), 0.0))?;
    Ok(NamedExample {
        name: "examL2",
        parameters: Parameters {
            r: Some(r),
            depth: Some(depth),
            ..Parameters::none()
        },
        symbol: Symbol::Seq(a),
        exponents: e,
        fun_options: FunOptions::default(),
        expected: vec![
            expect(Measure::LizorkinDyadic, Target::Equals(1.0), true, Basis::Stated),
            // Both half-lines jump by 2^{-k/r} at |m| = 2^k.
            expect(Measure::LizorkinDyadic, Target::Equals(2.0), true, Basis::Derived),
            expect(Measure::LizorkinClassic, Target::Divergent, true, Basis::Stated),
        ],
    })
}

fn exam_l2_value(r: f64, gamma: f64, j: i64) -> f64 {
    let m = j.unsigned_abs();
    if m == 0 {
        return gamma;
    }
    let k = 63 - m.leading_zeros() as i32;
    gamma * 2f64.powf(-((k + 1) as f64) / r)
}

/// Tents `2^{-k/r} (2 - |2^k + 2 - x|)^gamma` on `[2^k, 2^k + 4]`, `k >= 2`.
pub fn laz1(r: f64, gamma: f64) -> Result<NamedExample> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} outside (0, 1)")));
    }
    let e = symmetric_exponents(r, Mode::Lizorkin)?;
    let inv_r = 1.0 / r;
    let tent = move |x: f64| -> Option<(f64, f64)> {
        if !(x >= 4.0 && x.is_finite()) {
            return None;
        }
        let k = x.log2().floor() as i32;
        let base = pow2(k);
        if x > base + 4.0 {
            return None;
        }
        Some((base + 2.0, pow2(k).powf(-inv_r)))
    };
    let f = FunSymbol::real(move |x| match tent(x) {
        Some((c, s)) => s * (2.0 - (c - x).abs()).powf(gamma),
        None => 0.0,
    })
    .with_derivative(move |x| match tent(x) {
        Some((c, s)) => s * gamma * (2.0 - (c - x).abs()).powf(gamma - 1.0) * (c - x).signum(),
        None => 0.0,
    })?;
    let ks = 2..=*HINT_KS.end();
    let hints = ks
        .clone()
        .flat_map(|k| [pow2(k), pow2(k) + 4.0])
        .map(|location| Singularity {
            location,
            exponent: gamma - 1.0,
        })
        .collect();
    let f = f
        .with_singularities(hints)?
        .with_breakpoints(ks.map(|k| pow2(k) + 2.0).collect())
        .with_vanishing(true);
    Ok(NamedExample {
        name: "Laz1",
        parameters: Parameters {
            r: Some(r),
            gamma: Some(gamma),
            ..Parameters::none()
        },
        symbol: Symbol::Fun(f),
        exponents: e,
        fun_options: FunOptions::default(),
        expected: vec![
            expect(Measure::LizorkinDyadic, Target::Finite, false, Basis::Stated),
            expect(Measure::LizorkinDyadic, Target::Equals(2f64.powf(gamma + 1.0)), false, Basis::Derived),
        ],
    })
}

/// `lambda_m = 2^{-k/r}` at `m = 2^k + 1`, `k >= 2`, zero elsewhere.
pub fn laz2(r: f64, depth: i32) -> Result<NamedExample> {
    let e = symmetric_exponents(r, Mode::Lizorkin)?;
    check_depth(depth)?;
    let hi = (1i64 << (depth + 1)) - 1;
    let a = SeqSymbol::from_fn(0, hi, true, |m| {
        let v = (2..=depth)
            .find(|&k| m == (1i64 << k) + 1)
            .map_or(0.0, |k| 2f64.powf(-(k as f64) / r));
        Complex64::new(v, 0.0)
    })?;
    Ok(NamedExample {
        name: "Laz2",
        parameters: Parameters {
            r: Some(r),
            depth: Some(depth),
            ..Parameters::none()
        },
        symbol: Symbol::Seq(a),
        exponents: e,
        fun_options: FunOptions::default(),
        expected: vec![expect(Measure::LizorkinDyadic, Target::Equals(2.0), true, Basis::Stated)],
    })
}

/// `lambda_0 = 0`, `lambda_{+-k} = (-1)^k k^{-|tau - 2| / (2 tau)}`.
pub fn osc(tau: f64, depth: i32) -> Result<NamedExample> {
    if !(tau > 1.0 && tau.is_finite()) || tau == 2.0 {
        return Err(Error::InvalidParameter(format!("tau = {tau} must lie in (1, inf) without 2")));
    }
    check_depth(depth)?;
    let hi = (1i64 << (depth + 1)) - 1;
    let s = (tau - 2.0).abs() / (2.0 * tau);
    let a = SeqSymbol::from_fn(-hi, hi, true, |j| {
        let m = j.unsigned_abs();
        let v = if m == 0 {
            0.0
        } else {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * (m as f64).powf(-s)
        };
        Complex64::new(v, 0.0)
    })?;
    // (p, q) = (2, tau) or (tau, 2), as in the tau-to-tau reduction.
    let (p, q) = if tau > 2.0 { (2.0, tau) } else { (tau, 2.0) };
    Ok(NamedExample {
        name: "osc",
        parameters: Parameters {
            tau: Some(tau),
            depth: Some(depth),
            ..Parameters::none()
        },
        symbol: Symbol::Seq(a),
        exponents: make_exponents(p, q, Mode::Hoermander)?,
        fun_options: FunOptions::default(),
        expected: vec![
            expect(Measure::TauToTauBlock, Target::AtMost(1.0), true, Basis::Stated),
            expect(Measure::MarcinkiewiczVariation, Target::Divergent, true, Basis::Stated),
        ],
    })
}

pub const EXAMPLE_NAMES: [&str; 7] = ["exmH1", "examH2", "examL1", "examL2", "Laz1", "Laz2", "osc"];

/// The examples at their default parameters.
pub fn default_examples() -> Result<Vec<NamedExample>> {
    EXAMPLE_NAMES.iter().map(|n| by_name(n, &ExampleArgs::default())).collect()
}

/// Optional parameter overrides when building an example by name.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ExampleArgs {
    pub r: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    pub depth: Option<i32>,
}

pub fn by_name(name: &str, args: &ExampleArgs) -> Result<NamedExample> {
    let r = args.r.unwrap_or(2.0);
    let depth = args.depth.unwrap_or(12);
    match name {
        "exmH1" => exm_h1(r),
        "examH2" => exam_h2(r, depth),
        "examL1" => exam_l1(args.alpha.unwrap_or(0.5), r),
        "examL2" => exam_l2(r, depth),
        "Laz1" => laz1(r, args.gamma.unwrap_or(0.5)),
        "Laz2" => laz2(r, depth),
        "osc" => osc(args.tau.unwrap_or(3.0), args.depth.unwrap_or(13)),
        _ => Err(Error::InvalidParameter(format!(
            "unknown example {name:?}; known: {}",
            EXAMPLE_NAMES.join(", ")
        ))),
    }
}

/// One validated expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub example: String,
    pub measure: Measure,
    pub target: Target,
    pub exact: bool,
    pub basis: Basis,
    pub got: Quantity,
    pub pass: bool,
}

/// Absolute tolerance standing in for equality of sequence quantities.
pub const EXACT_TOLERANCE: f64 = 1e-12;

impl NamedExample {
    pub fn measure(&self, m: Measure) -> Result<Quantity> {
        let e = &self.exponents;
        let liz = ExponentTriple {
            mode: Mode::Lizorkin,
            ..*e
        };
        let o = &self.fun_options;
        match (m, &self.symbol) {
            (Measure::HoermanderBlock, Symbol::Seq(a)) => Ok(hoermander_upper_seq(a, e)?.quantity),
            (Measure::HoermanderBlock, Symbol::Fun(f)) => Ok(hoermander_upper_fun(f, e, o)?.quantity),
            (Measure::HoermanderClassic, s) => hoermander_classic(s, e, o),
            (Measure::LizorkinDyadic, Symbol::Seq(a)) => Ok(lizorkin_upper_seq(a, &liz, None)?.quantity),
            (Measure::LizorkinDyadic, Symbol::Fun(f)) => Ok(lizorkin_upper_fun(f, &liz, o)?.quantity),
            (Measure::LizorkinClassic, s) => lizorkin_classic(s, &liz, o),
            (Measure::TauToTauBlock, Symbol::Seq(a)) => {
                let tau = self.parameters.tau.ok_or_else(|| Error::InvalidParameter("tau not set".into()))?;
                Ok(tau_to_tau_upper(a, tau)?.quantity)
            }
            (Measure::MarcinkiewiczVariation, Symbol::Seq(a)) => Ok(marcinkiewicz_variation(a)),
            (m, Symbol::Fun(_)) => Err(Error::InvalidParameter(format!("{m} needs a sequence symbol"))),
        }
    }

    /// Runs every expectation; `tolerance` is relative and applies to non-exact rows.
    pub fn validate(&self, tolerance: f64) -> Result<Vec<CheckRow>> {
        self.expected
            .iter()
            .map(|x| {
                let got = self.measure(x.measure)?;
                let tol = |want: f64| {
                    if x.exact {
                        EXACT_TOLERANCE
                    } else {
                        tolerance * want.abs()
                    }
                };
                let pass = match x.target {
                    Target::Equals(v) => (got.value - v).abs() <= tol(v),
                    Target::AtMost(v) => !got.divergent && got.value <= v + tol(v),
                    Target::Divergent => got.divergent,
                    Target::Finite => !got.divergent && got.value.is_finite(),
                };
                Ok(CheckRow {
                    example: self.name.to_string(),
                    measure: x.measure,
                    target: x.target,
                    exact: x.exact,
                    basis: x.basis,
                    got,
                    pass,
                })
            })
            .collect()
    }
}
