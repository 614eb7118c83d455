//! Adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Integrands may blow up at interval endpoints as long as the blow-up is
//! integrable; the rules never evaluate at the endpoints. [`integrate_hinted`]
//! splits the domain at declared singular points and integrates the last
//! `w = 1e-10 * max(1, |s|)` next to each of them analytically from the
//! declared power law `f(x) ~ C |x - s|^beta`, since floating point cannot
//! resolve the blow-up much closer than that away from the origin.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::symbols::Singularity;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    // Nodes may round onto a singular endpoint once pieces are a few ulps wide.
    let f = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            y
        } else {
            0.0
        }
    };
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kronrod * h;
    let err = ((kronrod - gauss) * h).abs();
    (value, err)
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]` by bisecting the piece with the largest error.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let (v, e) = gk15(&f, lo, hi);
    let mut heap = BinaryHeap::new();
    heap.push(Piece {
        a: lo,
        b: hi,
        value: v,
        error: e,
    });
    let mut total = v;
    let mut total_err = e;
    // Pieces too narrow to bisect meaningfully in floating point.
    let mut frozen: Vec<Piece> = Vec::new();
    let min_width = 64.0 * f64::EPSILON * lo.abs().max(hi.abs());
    while total_err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if heap.len() + frozen.len() >= opts.max_intervals {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if worst.b - worst.a <= min_width {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed the drift of the running updates.
    let value: f64 = heap.iter().chain(&frozen).map(|p| p.value).sum();
    let error: f64 = heap.iter().chain(&frozen).map(|p| p.error).sum();
    if !value.is_finite() {
        return Err(Error::Quadrature {
            a,
            b,
            reason: "non-finite integrand value".into(),
        });
    }
    Ok(QuadResult {
        value: sign * value,
        error,
        intervals: heap.len() + frozen.len(),
    })
}

/// Like [`integrate`] but first splits `[a, b]` at the given interior points.
pub fn integrate_split(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    cuts: &[f64],
    opts: QuadOptions,
) -> Result<QuadResult> {
    let mut pts = vec![a];
    pts.extend(cuts.iter().copied().filter(|&x| a < x && x < b));
    pts.push(b);
    let mut out = QuadResult {
        value: 0.0,
        error: 0.0,
        intervals: 0,
    };
    for w in pts.windows(2) {
        let r = integrate(&f, w[0], w[1], opts)?;
        out.value += r.value;
        out.error += r.error;
        out.intervals += r.intervals;
    }
    Ok(out)
}

/// Integral of `f` over `[a, b]` with integrable power-law singularities at the
/// hinted locations (inside or at the ends of `[a, b]`).
pub fn integrate_hinted(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    hints: &[Singularity],
    opts: QuadOptions,
) -> Result<QuadResult> {
    if a > b {
        let r = integrate_hinted(f, b, a, hints, opts)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    let exponent_at = |x: f64| hints.iter().find(|s| s.location == x).map(|s| s.exponent);
    let mut pts = vec![a];
    pts.extend(
        hints
            .iter()
            .map(|s| s.location)
            .filter(|&x| a < x && x < b),
    );
    pts.push(b);
    pts.dedup();
    let mut out = QuadResult {
        value: 0.0,
        error: 0.0,
        intervals: 0,
    };
    for seg in pts.windows(2) {
        let (mut u, mut v) = (seg[0], seg[1]);
        let len = v - u;
        if let Some(beta) = exponent_at(u) {
            let w = tail_width(u, len);
            out.value += power_tail(&f, u, w, beta, 1.0);
            u += w;
        }
        if let Some(beta) = exponent_at(v) {
            let w = tail_width(v, len);
            out.value += power_tail(&f, v, w, beta, -1.0);
            v -= w;
        }
        let r = integrate(&f, u, v, opts)?;
        out.value += r.value;
        out.error += r.error;
        out.intervals += r.intervals;
    }
    Ok(out)
}

fn tail_width(s: f64, len: f64) -> f64 {
    (1e-10 * s.abs().max(1.0)).min(len * 1e-3)
}

/// `int_0^w f(s + dir * t) dt` assuming `f(s + dir * t) = C t^beta` near `t = 0`.
fn power_tail(f: &impl Fn(f64) -> f64, s: f64, w: f64, beta: f64, dir: f64) -> f64 {
    let fw = f(s + dir * w);
    if !fw.is_finite() {
        return 0.0;
    }
    fw * w / (1.0 + beta)
}
