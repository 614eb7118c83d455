//! Distribution functions, non-increasing rearrangements and Lorentz quasi-norms.
//!
//! Sequences are handled exactly. Functions are replaced by a piecewise-constant
//! approximant of `|f|` on a mesh; near a declared singularity the mesh is graded
//! geometrically so that cells keep a fixed relative width, and the innermost
//! cell takes the value at its outer endpoint (the function is unbounded on it).

use serde::Serialize;

use crate::divergence::{nested_depths, Quantity};
use crate::error::{Error, Result};
use crate::symbols::{DyadicBlock, FunSymbol, Interval, SeqSymbol};

/// Counting-measure distribution `#{k : |a_k| >= sigma}`.
pub fn distribution_seq(a: &SeqSymbol, sigma: f64) -> usize {
    a.values().iter().filter(|v| v.norm() >= sigma).count()
}

/// `|a|` sorted non-increasingly (zeros included, length = window size).
pub fn rearrangement_seq(a: &SeqSymbol) -> Vec<f64> {
    let mut v: Vec<f64> = a.values().iter().map(|x| x.norm()).collect();
    sort_desc(&mut v);
    v
}

pub(crate) fn sort_desc(v: &mut [f64]) {
    v.sort_unstable_by(|x, y| y.total_cmp(x));
}

/// Which indices of a sequence to keep before taking a norm.
#[derive(Debug, Clone, PartialEq)]
pub enum IndexSet {
    All,
    Block(DyadicBlock),
    Indices(Vec<i64>),
}

impl IndexSet {
    fn restrict(&self, a: &SeqSymbol) -> Vec<f64> {
        match self {
            IndexSet::All => a.values().iter().map(|v| v.norm()).collect(),
            IndexSet::Block(b) => a.block_values(*b).iter().map(|v| v.norm()).collect(),
            IndexSet::Indices(ix) => {
                let mut ix = ix.clone();
                ix.sort_unstable();
                ix.dedup();
                ix.iter().map(|&k| a.get(k).norm()).collect()
            }
        }
    }
}

/// Lorentz quasi-norm of an already sorted (non-increasing, non-negative) sequence.
///
/// `q = inf`: `sup_k k^{1/p} a*_k`; `q < inf`: `(sum_k (k^{1/p} a*_k)^q / k)^{1/q}`.
/// `p = inf` is only meaningful with `q = inf` and gives `a*_1`.
pub fn lorentz_sorted(sorted: &[f64], p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0) || !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("Lorentz indices p = {p}, q = {q}")));
    }
    if p.is_infinite() {
        if q.is_finite() {
            return Err(Error::InvalidParameter("p = inf requires q = inf".into()));
        }
        return Ok(sorted.first().copied().unwrap_or(0.0));
    }
    let inv_p = 1.0 / p;
    if q.is_infinite() {
        Ok(sorted
            .iter()
            .enumerate()
            .take_while(|(_, &v)| v > 0.0)
            .map(|(i, &v)| ((i + 1) as f64).powf(inv_p) * v)
            .fold(0.0, f64::max))
    } else {
        let s: f64 = sorted
            .iter()
            .enumerate()
            .take_while(|(_, &v)| v > 0.0)
            .map(|(i, &v)| {
                let k = (i + 1) as f64;
                (k.powf(inv_p) * v).powf(q) / k
            })
            .sum();
        Ok(s.powf(1.0 / q))
    }
}

/// `||a||_{l_{p,q}(B)}` of the zero-extension of `a` restricted to `B`.
pub fn lorentz_seq_norm(a: &SeqSymbol, p: f64, q: f64, set: &IndexSet) -> Result<f64> {
    let mut v = set.restrict(a);
    sort_desc(&mut v);
    lorentz_sorted(&v, p, q)
}

/// Global Lorentz norm evaluated on nested windows `|k| <= 2^d - 1` with doubling
/// depth `d`, flagged divergent per the growth policy.
pub fn lorentz_seq_growth(a: &SeqSymbol, p: f64, q: f64) -> Result<Quantity> {
    let growth = nested_windows(a)
        .iter()
        .map(|w| lorentz_seq_norm(w, p, q, &IndexSet::All))
        .collect::<Result<Vec<_>>>()?;
    Ok(Quantity::from_growth(growth, p))
}

/// Nested truncations of `a` whose dyadic depth doubles, the last one being `a`.
pub fn nested_windows(a: &SeqSymbol) -> Vec<SeqSymbol> {
    let reach = a.window_hi().max(-a.window_lo());
    let depth = window_depth(reach);
    let ds = nested_depths(depth);
    let mut out: Vec<SeqSymbol> = ds[..ds.len() - 1]
        .iter()
        .map(|&d| {
            let m = (1i64 << d) - 1;
            a.truncate(-m, m)
        })
        .collect();
    out.push(a.clone());
    out
}

/// Smallest `d >= 1` with `2^d - 1 >= reach`.
pub(crate) fn window_depth(reach: i64) -> i32 {
    let mut d = 1;
    while (1i64 << d) - 1 < reach {
        d += 1;
    }
    d
}

/// One cell of the piecewise-constant approximant of `|f|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
}

impl Cell {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    /// Maximal cell width away from singularities.
    pub mesh: f64,
    /// Relative tolerance steering the geometric grading near singularities.
    pub rel_tol: f64,
}

impl MeshOptions {
    pub fn new(mesh: f64) -> Self {
        MeshOptions { mesh, rel_tol: 1e-3 }
    }

    fn grading(&self) -> f64 {
        2.0 * self.rel_tol
    }
}

/// Piecewise-constant approximant of `|f|` over a union of intervals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepApproximant {
    pub cells: Vec<Cell>,
}

impl StepApproximant {
    pub fn build(f: &FunSymbol, domains: &[Interval], opts: MeshOptions) -> Result<Self> {
        if !(opts.mesh > 0.0) || !(opts.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("mesh {} / tolerance {}", opts.mesh, opts.rel_tol)));
        }
        let mut cells = Vec::new();
        for d in domains {
            if d.is_empty() {
                continue;
            }
            let mut pts = vec![d.lo];
            pts.extend(f.cut_points_in(d.lo, d.hi));
            pts.push(d.hi);
            for w in pts.windows(2) {
                push_cells(f, w[0], w[1], opts, &mut cells);
            }
        }
        Ok(StepApproximant { cells })
    }

    pub fn measure(&self) -> f64 {
        self.cells.iter().map(Cell::width).sum()
    }

    /// Measure of `{|f| >= sigma}` on the approximant.
    pub fn distribution(&self, sigma: f64) -> f64 {
        self.cells
            .iter()
            .filter(|c| c.level >= sigma)
            .map(Cell::width)
            .sum()
    }

    pub fn rearrangement(&self) -> StepRearrangement {
        StepRearrangement::from_cells(&self.cells)
    }
}

fn push_cells(f: &FunSymbol, u: f64, v: f64, opts: MeshOptions, out: &mut Vec<Cell>) {
    let len = v - u;
    if !(len > 0.0) {
        return;
    }
    let su = f.is_singular_at(u);
    let sv = f.is_singular_at(v);
    match (su, sv) {
        (false, false) => {
            let n = (len / opts.mesh).ceil().max(1.0) as usize;
            let h = len / n as f64;
            for i in 0..n {
                let lo = u + h * i as f64;
                let hi = if i + 1 == n { v } else { lo + h };
                out.push(Cell {
                    lo,
                    hi,
                    level: f.abs(0.5 * (lo + hi)),
                });
            }
        }
        (true, true) => {
            let m = 0.5 * (u + v);
            graded(f, u, m, true, opts, out);
            graded(f, m, v, false, opts, out);
        }
        (true, false) => graded(f, u, v, true, opts, out),
        (false, true) => graded(f, u, v, false, opts, out),
    }
}

/// Cells on `[u, v]` graded towards the singular end (`u` if `at_lo`).
fn graded(f: &FunSymbol, u: f64, v: f64, at_lo: bool, opts: MeshOptions, out: &mut Vec<Cell>) {
    let len = v - u;
    let h = opts.mesh.min(len);
    let g = opts.grading();
    let delta = h * 1e-9;
    let mut dists = vec![0.0, delta.min(len)];
    let mut d = delta;
    while d < len {
        d = (d + h.min(g * d)).min(len);
        dists.push(d);
    }
    let at = |d: f64| if at_lo { u + d } else { v - d };
    for (i, w) in dists.windows(2).enumerate() {
        let (a, b) = (at(w[0]), at(w[1]));
        let (lo, hi) = if at_lo { (a, b) } else { (b, a) };
        let level = if i == 0 {
            f.abs(at(w[1]))
        } else {
            f.abs(0.5 * (lo + hi))
        };
        out.push(Cell { lo, hi, level });
    }
}

/// Non-increasing step function: `levels[i]` on `[breakpoints[i], breakpoints[i+1])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRearrangement {
    pub breakpoints: Vec<f64>,
    pub levels: Vec<f64>,
    /// Positive-measure set where the approximant vanishes (after the last level).
    pub tail_zero: bool,
}

impl StepRearrangement {
    pub fn from_cells(cells: &[Cell]) -> Self {
        let mut sorted: Vec<&Cell> = cells.iter().filter(|c| c.width() > 0.0).collect();
        sorted.sort_by(|a, b| b.level.total_cmp(&a.level));
        let mut breakpoints = vec![0.0];
        let mut levels: Vec<f64> = Vec::new();
        let mut t = 0.0;
        let mut tail_zero = false;
        for c in sorted {
            if c.level <= 0.0 {
                tail_zero = true;
                continue;
            }
            t += c.width();
            if levels.last() == Some(&c.level) {
                *breakpoints.last_mut().unwrap() = t;
            } else {
                levels.push(c.level);
                breakpoints.push(t);
            }
        }
        StepRearrangement {
            breakpoints,
            levels,
            tail_zero,
        }
    }

    /// Right-continuous evaluation of `f*(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.levels.first().copied().unwrap_or(0.0);
        }
        // first breakpoint strictly greater than t
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        if idx == 0 || idx > self.levels.len() {
            0.0
        } else {
            self.levels[idx - 1]
        }
    }

    pub fn distribution(&self, sigma: f64) -> f64 {
        let n = self.levels.iter().take_while(|&&l| l >= sigma).count();
        self.breakpoints[n]
    }

    pub fn total_measure(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// `sup_t t^{1/p} f*(t)`, attained at right endpoints of the steps.
    pub fn lorentz_sup(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.levels.first().copied().unwrap_or(0.0);
        }
        let inv_p = 1.0 / p;
        self.levels
            .iter()
            .zip(&self.breakpoints[1..])
            .map(|(&l, &t)| t.powf(inv_p) * l)
            .fold(0.0, f64::max)
    }
}

pub fn rearrangement_fun(f: &FunSymbol, domain: Interval, mesh: f64) -> Result<StepRearrangement> {
    Ok(StepApproximant::build(f, &[domain], MeshOptions::new(mesh))?.rearrangement())
}

/// `||f||_{L_{p,inf}(B)}` for `B` a union of intervals, on the mesh approximant.
pub fn lorentz_fun_norm(f: &FunSymbol, p: f64, set: &[Interval], mesh: f64) -> Result<f64> {
    lorentz_fun_norm_with(f, p, set, MeshOptions::new(mesh))
}

pub fn lorentz_fun_norm_with(f: &FunSymbol, p: f64, set: &[Interval], opts: MeshOptions) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("Lorentz index p = {p}")));
    }
    Ok(StepApproximant::build(f, set, opts)?.rearrangement().lorentz_sup(p))
}
