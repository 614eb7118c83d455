//! Interval-averaged sums and integrals and the net-space functionals built on them.
//!
//! Everything is derived from one table: for each interval length `L`, the
//! largest `|sum_e a|` (or `|int_e f|`) over family members of that length.
//! `\bar a(t) = sup_{L >= t} m_L / L`, and the `p`-weighted sup of the profile
//! coincides with `sup_e |e|^{-1/p'} |sum_e a|` term by term, so both forms are
//! evaluated with the same floating-point expression `L^{1/p} * (m_L / L)`.
//!
//! Continuous families restrict endpoints to a grid. Interval sums are running
//! sums from each left endpoint, so they agree bit-for-bit with a naive loop.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::divergence::Quantity;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_hinted, QuadOptions};
use crate::symbols::{pow2, FunSymbol, SeqSymbol};

/// Which intervals enter a supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalFamily {
    /// Every interval inside the symbol window (sequences only).
    All,
    /// Intervals inside one half-line of the `k`-th dyadic block.
    WithinBlock(i32),
    /// Intervals inside `[lo, hi]`; for sequences the integer points in it.
    Span { lo: f64, hi: f64 },
}

impl IntervalFamily {
    /// Contiguous index pools of a sequence family, clipped to the window.
    pub fn index_pools(&self, a: &SeqSymbol) -> Vec<(i64, i64)> {
        let (wlo, whi) = (a.window_lo(), a.window_hi());
        let raw = match *self {
            IntervalFamily::All => vec![(wlo, whi)],
            IntervalFamily::WithinBlock(k) => block_index_pools(k),
            IntervalFamily::Span { lo, hi } => vec![(lo.ceil() as i64, hi.floor() as i64)],
        };
        raw.into_iter()
            .map(|(lo, hi)| (lo.max(wlo), hi.min(whi)))
            .filter(|(lo, hi)| lo <= hi)
            .collect()
    }

    /// Real pools of a function family.
    pub fn real_pools(&self) -> Result<Vec<(f64, f64)>> {
        match *self {
            IntervalFamily::All => Err(Error::InvalidParameter(
                "the all-intervals family on the line needs a finite span".into(),
            )),
            IntervalFamily::WithinBlock(k) => {
                let lo = pow2(k);
                Ok(vec![(-2.0 * lo, -lo), (lo, 2.0 * lo)])
            }
            IntervalFamily::Span { lo, hi } => {
                if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                    return Err(Error::InvalidParameter(format!("span [{lo}, {hi}]")));
                }
                Ok(vec![(lo, hi)])
            }
        }
    }
}

/// `delta_0 = {-1, 0, 1}` is itself an interval; other blocks split in two.
fn block_index_pools(k: i32) -> Vec<(i64, i64)> {
    if k == 0 {
        vec![(-1, 1)]
    } else {
        let lo = 1i64 << k;
        vec![(-2 * lo + 1, -lo), (lo, 2 * lo - 1)]
    }
}

/// `\bar f(t)` tabulated at increasing thresholds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragedProfile {
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
}

impl AveragedProfile {
    /// Builds the profile from `(length, average)` pairs; `values[i]` is the best
    /// average over lengths `>= thresholds[i]`.
    fn from_lengths(mut pairs: Vec<(f64, f64)>) -> Self {
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut thresholds: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut best: Vec<f64> = Vec::with_capacity(pairs.len());
        for (len, avg) in pairs {
            if thresholds.last() == Some(&len) {
                let b = best.last_mut().unwrap();
                *b = b.max(avg);
            } else {
                thresholds.push(len);
                best.push(avg);
            }
        }
        for i in (0..best.len().saturating_sub(1)).rev() {
            best[i] = best[i].max(best[i + 1]);
        }
        AveragedProfile {
            thresholds,
            values: best,
        }
    }

    /// `\bar f(t)`, zero past the longest member.
    pub fn at(&self, t: f64) -> f64 {
        let i = self.thresholds.partition_point(|&s| s < t);
        self.values.get(i).copied().unwrap_or(0.0)
    }

    /// `sup_t t^{1/p} \bar f(t)`; the sup is attained at a tabulated threshold.
    pub fn weighted_sup(&self, p: f64) -> f64 {
        let inv_p = 1.0 / p;
        self.thresholds
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| weight(t, inv_p) * v)
            .fold(0.0, f64::max)
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("threshold,value\n");
        for (t, v) in self.thresholds.iter().zip(&self.values) {
            let _ = writeln!(s, "{t},{v}");
        }
        s
    }
}

fn weight(len: f64, inv_p: f64) -> f64 {
    len.powf(inv_p)
}

/// `m_L`: the largest `|sum_e a|` over members of length `L` (index `L - 1`).
fn max_abs_sum_by_length(a: &SeqSymbol, family: &IntervalFamily) -> Vec<f64> {
    let mut best: Vec<f64> = Vec::new();
    for (lo, hi) in family.index_pools(a) {
        let vals: Vec<Complex64> = (lo..=hi).map(|k| a.get(k)).collect();
        let n = vals.len();
        let pool_best = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut row = vec![0.0; n - i];
                for (j, v) in vals[i..].iter().enumerate() {
                    acc += v;
                    row[j] = acc.norm();
                }
                row
            })
            .reduce(Vec::new, merge_max);
        best = merge_max(best, pool_best);
    }
    best
}

fn merge_max(mut x: Vec<f64>, y: Vec<f64>) -> Vec<f64> {
    if x.len() < y.len() {
        return merge_max(y, x);
    }
    for (a, b) in x.iter_mut().zip(y) {
        *a = a.max(b);
    }
    x
}

/// Profile `\bar a_t(W)` for every integer threshold `t = 1..=longest member`.
pub fn averaged_profile_seq(a: &SeqSymbol, family: &IntervalFamily) -> AveragedProfile {
    let m = max_abs_sum_by_length(a, family);
    let pairs = m
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let len = (i + 1) as f64;
            (len, s / len)
        })
        .collect();
    AveragedProfile::from_lengths(pairs)
}

/// `\bar a_t(W) = sup_{|e| >= t} |sum_e a| / |e|`; flagged "vacuous" (value 0)
/// when no member is that long.
pub fn interval_avg_sup_seq(a: &SeqSymbol, t: usize, family: &IntervalFamily) -> Result<Quantity> {
    if t == 0 {
        return Err(Error::InvalidParameter("threshold must be at least 1".into()));
    }
    let prof = averaged_profile_seq(a, family);
    let longest = prof.thresholds.last().copied().unwrap_or(0.0);
    if (t as f64) > longest {
        return Ok(Quantity::finite(0.0).with_flag("vacuous"));
    }
    Ok(Quantity::finite(prof.at(t as f64)))
}

/// `sup_{e in W} |e|^{-1/p'} |sum_e a|`.
pub fn net_norm_seq(a: &SeqSymbol, p: f64, family: &IntervalFamily) -> Result<f64> {
    check_p(p)?;
    let inv_p = 1.0 / p;
    let m = max_abs_sum_by_length(a, family);
    Ok(m.iter()
        .enumerate()
        .map(|(i, &s)| {
            let len = (i + 1) as f64;
            weight(len, inv_p) * (s / len)
        })
        .fold(0.0, f64::max))
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("net index p = {p}")))
    }
}

/// Grid used for continuous families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridOptions {
    /// Spacing of the uniform part of the grid.
    pub mesh: f64,
    /// Cap on uniform cells per pool; the spacing widens past it.
    pub max_cells: usize,
    /// Geometric refinement levels next to singular points.
    pub singular_levels: u32,
}

impl GridOptions {
    pub fn new(mesh: f64) -> Self {
        GridOptions {
            mesh,
            max_cells: 512,
            singular_levels: 24,
        }
    }
}

/// Value of a grid-restricted functional together with the grid it used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridValue {
    pub value: f64,
    /// Largest uniform spacing over the pools.
    pub mesh: f64,
    pub points: usize,
}

/// Grid endpoints for one pool and the integrals of `f` between neighbours.
struct PoolGrid {
    xs: Vec<f64>,
    /// `prefix[i] = int_{xs[0]}^{xs[i]} f`.
    prefix: Vec<Complex64>,
    mesh: f64,
}

fn pool_grid(f: &FunSymbol, lo: f64, hi: f64, opts: GridOptions) -> Result<PoolGrid> {
    if !(opts.mesh > 0.0) || opts.max_cells == 0 {
        return Err(Error::InvalidParameter(format!("grid mesh {}", opts.mesh)));
    }
    let len = hi - lo;
    let n = (len / opts.mesh).ceil().clamp(1.0, opts.max_cells as f64) as usize;
    let h = len / n as f64;
    let mut xs: Vec<f64> = (0..=n).map(|i| lo + h * i as f64).collect();
    xs[n] = hi;
    xs.extend(f.cut_points_in(lo, hi));
    for s in f.singular_points_in(lo, hi) {
        for j in 1..=opts.singular_levels {
            let d = h * 0.5f64.powi(j as i32);
            for x in [s - d, s + d] {
                if lo < x && x < hi {
                    xs.push(x);
                }
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let quad = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-11,
        max_intervals: 2000,
    };
    let hints = f.singularities();
    let pieces = xs
        .par_windows(2)
        .map(|w| {
            let re = integrate_hinted(|x| f.eval(x).re, w[0], w[1], hints, quad)?.value;
            let im = if f.is_real() {
                0.0
            } else {
                integrate_hinted(|x| f.eval(x).im, w[0], w[1], hints, quad)?.value
            };
            Ok(Complex64::new(re, im))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut prefix = Vec::with_capacity(xs.len());
    let mut acc = Complex64::new(0.0, 0.0);
    prefix.push(acc);
    for v in pieces {
        acc += v;
        prefix.push(acc);
    }
    Ok(PoolGrid { xs, prefix, mesh: h })
}

fn fun_pairs(f: &FunSymbol, family: &IntervalFamily, opts: GridOptions) -> Result<(Vec<(f64, f64)>, f64, usize)> {
    let mut pairs = Vec::new();
    let mut mesh: f64 = 0.0;
    let mut points = 0;
    for (lo, hi) in family.real_pools()? {
        let g = pool_grid(f, lo, hi, opts)?;
        mesh = mesh.max(g.mesh);
        points += g.xs.len();
        let n = g.xs.len();
        let part: Vec<(f64, f64)> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let g = &g;
                (i + 1..n).map(move |j| {
                    let len = g.xs[j] - g.xs[i];
                    (len, (g.prefix[j] - g.prefix[i]).norm() / len)
                })
            })
            .collect();
        pairs.extend(part);
    }
    Ok((pairs, mesh, points))
}

/// `sup_{e in M} |e|^{-1/p'} |int_e f|` over grid-endpoint intervals.
pub fn net_norm_fun(f: &FunSymbol, p: f64, family: &IntervalFamily, opts: GridOptions) -> Result<GridValue> {
    check_p(p)?;
    let inv_p = 1.0 / p;
    let (pairs, mesh, points) = fun_pairs(f, family, opts)?;
    let value = pairs
        .iter()
        .map(|&(len, avg)| weight(len, inv_p) * avg)
        .fold(0.0, f64::max);
    Ok(GridValue { value, mesh, points })
}

/// `\bar f(t, M)` at every grid interval length.
pub fn averaged_profile_fun(f: &FunSymbol, family: &IntervalFamily, opts: GridOptions) -> Result<AveragedProfile> {
    let (pairs, _, _) = fun_pairs(f, family, opts)?;
    Ok(AveragedProfile::from_lengths(pairs))
}

/// Input to [`dyadic_profile`].
#[derive(Debug, Clone, Copy)]
pub enum Averaged<'a> {
    Seq(&'a SeqSymbol),
    Fun(&'a FunSymbol, GridOptions),
}

/// Dyadic form `(sum_k (2^{k/p} \bar f(2^k))^q)^{1/q}` (sup when `q = inf`).
///
/// Sequences use `k >= 0`; functions use every `k` with `2^k` between the grid
/// spacing and the longest member.
pub fn dyadic_profile(x: Averaged<'_>, p: f64, q: f64, family: &IntervalFamily) -> Result<f64> {
    check_p(p)?;
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("q = {q}")));
    }
    let (prof, kmin) = match x {
        Averaged::Seq(a) => (averaged_profile_seq(a, family), 0),
        Averaged::Fun(f, opts) => {
            let prof = averaged_profile_fun(f, family, opts)?;
            let shortest = prof.thresholds.first().copied().unwrap_or(1.0);
            (prof, shortest.log2().ceil() as i32)
        }
    };
    let Some(&longest) = prof.thresholds.last() else {
        return Ok(0.0);
    };
    let inv_p = 1.0 / p;
    let terms = (kmin..)
        .map(pow2)
        .take_while(|&t| t <= longest)
        .map(|t| weight(t, inv_p) * prof.at(t));
    Ok(if q.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q)
    })
}
