//! Upper and lower bounds for `||T_lambda||_{L_p -> L_q}` and the sandwich report.
//!
//! Block quantities come with a per-block table. Quantities that may be infinite
//! carry their values on nested windows (`Quantity::growth`); a finite window
//! never reports a bare infinity.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::divergence::{nested_depths, Quantity};
use crate::error::{Error, Result};
use crate::netspace::{net_norm_fun, net_norm_seq, GridOptions, IntervalFamily};
use crate::quadrature::{integrate_hinted, QuadOptions};
use crate::rearrange::{
    lorentz_fun_norm_with, lorentz_seq_growth, lorentz_seq_norm, nested_windows, Cell, IndexSet, MeshOptions,
    StepApproximant, StepRearrangement,
};
use crate::symbols::{pow2, ExponentTriple, FunSymbol, Interval, Mode, SeqSymbol, Symbol};

/// One row of a per-block table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockRow {
    pub k: i32,
    pub value: f64,
    /// The block is cut by the window or lies at the edge of the k-range.
    pub partial: bool,
}

/// Supremum over dyadic blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSup {
    pub quantity: Quantity,
    pub rows: Vec<BlockRow>,
}

impl BlockSup {
    pub fn value(&self) -> f64 {
        self.quantity.value
    }

    /// Growth over nested block ranges `|k| < d`, so blow-up at either end shows.
    fn from_rows(rows: Vec<BlockRow>, r: f64) -> Self {
        let reach = rows.iter().map(|b| b.k.abs() + 1).max().unwrap_or(0);
        let growth = if reach == 0 {
            vec![0.0]
        } else {
            nested_depths(reach)
                .into_iter()
                .map(|d| {
                    rows.iter()
                        .filter(|b| b.k.abs() < d)
                        .map(|b| b.value)
                        .fold(0.0, f64::max)
                })
                .collect()
        };
        BlockSup {
            quantity: Quantity::from_growth(growth, r),
            rows,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,value,partial\n");
        for b in &self.rows {
            let _ = writeln!(s, "{},{},{}", b.k, b.value, b.partial);
        }
        s
    }
}

/// Tuning shared by the function-symbol bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunOptions {
    /// Blocks `Delta_k`, `k` in this inclusive range.
    pub krange: (i32, i32),
    /// Mesh width relative to the block scale `2^k`.
    pub rel_mesh: f64,
    /// Grid for the interval functionals (absolute spacing).
    pub grid: GridOptions,
}

impl Default for FunOptions {
    fn default() -> Self {
        FunOptions {
            krange: (-8, 12),
            rel_mesh: 1.0 / 256.0,
            grid: GridOptions::new(1.0 / 64.0),
        }
    }
}

impl FunOptions {
    fn check(&self) -> Result<()> {
        if self.krange.0 > self.krange.1 || !(self.rel_mesh > 0.0 && self.rel_mesh <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "k-range {:?}, relative mesh {}",
                self.krange, self.rel_mesh
            )));
        }
        Ok(())
    }

    fn blocks(&self) -> impl Iterator<Item = i32> {
        self.krange.0..=self.krange.1
    }

    fn is_edge(&self, k: i32) -> bool {
        k == self.krange.0 || k == self.krange.1
    }
}

fn halves(k: i32) -> [Interval; 2] {
    let lo = pow2(k);
    [Interval::new(-2.0 * lo, -lo), Interval::new(lo, 2.0 * lo)]
}

fn require_mode(e: &ExponentTriple, mode: Mode) -> Result<()> {
    if e.mode == mode {
        Ok(())
    } else {
        Err(Error::InvalidExponents(format!(
            "operation needs {mode:?} exponents, got {:?}",
            e.mode
        )))
    }
}

/// `sup_k ||lambda||_{l_{r,inf}(delta_k)}` over the blocks meeting the window.
pub fn hoermander_upper_seq(lambda: &SeqSymbol, e: &ExponentTriple) -> Result<BlockSup> {
    require_mode(e, Mode::Hoermander)?;
    block_lorentz_seq(lambda, e.r)
}

fn block_lorentz_seq(lambda: &SeqSymbol, s: f64) -> Result<BlockSup> {
    let rows = lambda
        .blocks()
        .into_iter()
        .map(|(b, partial)| {
            Ok(BlockRow {
                k: b.k,
                value: lorentz_seq_norm(lambda, s, f64::INFINITY, &IndexSet::Block(b))?,
                partial,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockSup::from_rows(rows, s))
}

/// `sup_k ||lambda||_{L_{r,inf}(Delta_k)}` over `k` in the configured range.
pub fn hoermander_upper_fun(lambda: &FunSymbol, e: &ExponentTriple, opts: &FunOptions) -> Result<BlockSup> {
    require_mode(e, Mode::Hoermander)?;
    opts.check()?;
    let ks: Vec<i32> = opts.blocks().collect();
    let rows = ks
        .par_iter()
        .map(|&k| {
            let mesh = MeshOptions::new(opts.rel_mesh * pow2(k));
            Ok(BlockRow {
                k,
                value: lorentz_fun_norm_with(lambda, e.r, &halves(k), mesh)?,
                partial: opts.is_edge(k),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockSup::from_rows(rows, e.r))
}

/// Global `||lambda||_{L_{r,inf}}` (or `l_{r,inf}`), evaluated on nested
/// windows and flagged divergent when it keeps growing.
pub fn hoermander_classic(lambda: &Symbol, e: &ExponentTriple, opts: &FunOptions) -> Result<Quantity> {
    require_mode(e, Mode::Hoermander)?;
    match lambda {
        Symbol::Seq(a) => lorentz_seq_growth(a, e.r, f64::INFINITY),
        Symbol::Fun(f) => {
            opts.check()?;
            let n = opts.krange.1 - opts.krange.0 + 1;
            // Cells are built block by block so each block keeps its relative resolution.
            let cells: Vec<Vec<Cell>> = (opts.krange.0..=opts.krange.1)
                .collect::<Vec<_>>()
                .par_iter()
                .map(|&k| {
                    let mesh = MeshOptions::new(opts.rel_mesh * pow2(k));
                    Ok(StepApproximant::build(f, &halves(k), mesh)?.cells)
                })
                .collect::<Result<_>>()?;
            let growth = nested_depths(n)
                .into_iter()
                .map(|d| {
                    let upto: Vec<Cell> = cells[..d as usize].iter().flatten().copied().collect();
                    StepRearrangement::from_cells(&upto).lorentz_sup(e.r)
                })
                .collect();
            Ok(Quantity::from_growth(growth, e.r))
        }
    }
}

fn require_lizorkin_seq(lambda: &SeqSymbol) -> Result<()> {
    if !lambda.is_real() {
        return Err(Error::NonReal);
    }
    if !lambda.decay_declared() {
        return Err(Error::DecayNotDeclared);
    }
    Ok(())
}

fn lizorkin_mode(e: &ExponentTriple) -> Result<()> {
    if e.p < e.q {
        Ok(())
    } else {
        Err(Error::InvalidExponents(format!(
            "Lizorkin bounds need p < q, got p = {}, q = {}",
            e.p, e.q
        )))
    }
}

/// `sup_{k <= kmax} 2^{k/r} sum_{m=2^k}^{2^{k+1}-1} (|l_{-m} - l_{-m+1}| + |l_m - l_{m-1}|)`,
/// zero-extended outside the window.
pub fn lizorkin_upper_seq(lambda: &SeqSymbol, e: &ExponentTriple, kmax: Option<i32>) -> Result<BlockSup> {
    lizorkin_mode(e)?;
    require_lizorkin_seq(lambda)?;
    let reach = lambda.window_hi().max(-lambda.window_lo());
    let kmax = kmax.unwrap_or_else(|| full_blocks(reach));
    let x = |m: i64| lambda.get(m).re;
    let rows = (0..=kmax)
        .map(|k| {
            let lo = 1i64 << k;
            let sum: f64 = (lo..2 * lo)
                .map(|m| (x(-m) - x(-m + 1)).abs() + (x(m) - x(m - 1)).abs())
                .sum();
            BlockRow {
                k,
                value: pow2(k).powf(e.inv_r()) * sum,
                partial: 2 * lo - 1 > reach,
            }
        })
        .collect();
    Ok(BlockSup::from_rows(rows, e.r))
}

/// Largest `k` with `2^{k+1} - 1 <= reach`.
fn full_blocks(reach: i64) -> i32 {
    let mut k = 0;
    while (1i64 << (k + 2)) - 1 <= reach {
        k += 1;
    }
    k
}

fn lizorkin_quad() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-10,
        max_intervals: 4000,
    }
}

/// `sup_k 2^{k/r} int_{Delta_k} |lambda'|`.
pub fn lizorkin_upper_fun(lambda: &FunSymbol, e: &ExponentTriple, opts: &FunOptions) -> Result<BlockSup> {
    lizorkin_mode(e)?;
    opts.check()?;
    let d = lambda.derivative().ok_or(Error::MissingDerivative)?.clone();
    if !lambda.vanishes_at_infinity() {
        return Err(Error::DecayNotDeclared);
    }
    let ks: Vec<i32> = opts.blocks().collect();
    let rows = ks
        .par_iter()
        .map(|&k| {
            let mut total = 0.0;
            for h in halves(k) {
                let mut pts = vec![h.lo];
                pts.extend(lambda.cut_points_in(h.lo, h.hi));
                pts.push(h.hi);
                for w in pts.windows(2) {
                    total += integrate_hinted(|x| d(x).abs(), w[0], w[1], lambda.singularities(), lizorkin_quad())?
                        .value;
                }
            }
            Ok(BlockRow {
                k,
                value: pow2(k).powf(e.inv_r()) * total,
                partial: opts.is_edge(k),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockSup::from_rows(rows, e.r))
}

/// Per-index terms of the classical sequence condition:
/// `(k, |k|^{1/r} |l_k|, |k|^{1/r+1} |l_k - l_{k+1}|)` for `k, k+1` in the window.
pub fn lizorkin_classic_terms(lambda: &SeqSymbol, e: &ExponentTriple) -> Vec<(i64, f64, f64)> {
    let inv_r = e.inv_r();
    (lambda.window_lo()..lambda.window_hi())
        .map(|k| {
            let m = (k.unsigned_abs()) as f64;
            let a = lambda.get(k);
            let b = lambda.get(k + 1);
            (k, m.powf(inv_r) * a.norm(), m.powf(inv_r + 1.0) * (a - b).norm())
        })
        .collect()
}

fn classic_seq_sup(lambda: &SeqSymbol, e: &ExponentTriple) -> f64 {
    lizorkin_classic_terms(lambda, e)
        .into_iter()
        .map(|(_, s, d)| s + d)
        .fold(0.0, f64::max)
}

/// `sup_xi (|xi|^{1/r} |lambda| + |xi|^{1/r+1} |lambda'|)` (or its sequence
/// analogue) on nested windows; near declared singularities the grid is
/// refined geometrically, deeper for larger windows.
pub fn lizorkin_classic(lambda: &Symbol, e: &ExponentTriple, opts: &FunOptions) -> Result<Quantity> {
    lizorkin_mode(e)?;
    match lambda {
        Symbol::Seq(a) => {
            require_lizorkin_seq(a)?;
            let growth = nested_windows(a).iter().map(|w| classic_seq_sup(w, e)).collect();
            Ok(Quantity::from_growth(growth, e.r))
        }
        Symbol::Fun(f) => {
            opts.check()?;
            let d = f.derivative().ok_or(Error::MissingDerivative)?.clone();
            let inv_r = e.inv_r();
            let g = |x: f64| {
                let a = x.abs();
                let v = a.powf(inv_r) * f.abs(x) + a.powf(inv_r + 1.0) * d(x).abs();
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            };
            let sup_over = |top: i32, levels: u32| {
                (opts.krange.0..=top)
                    .flat_map(halves)
                    .map(|h| grid_sup(&g, f, h, opts.rel_mesh, levels))
                    .fold(0.0, f64::max)
            };
            // Blow-up at infinity shows on growing domains, blow-up at a
            // singular point under deeper refinement next to it.
            let n = opts.krange.1 - opts.krange.0 + 1;
            let by_domain: Vec<f64> = nested_depths(n)
                .into_iter()
                .map(|d| sup_over(opts.krange.0 + d - 1, MAX_LEVELS))
                .collect();
            let by_level: Vec<f64> = [5, 10, 20, MAX_LEVELS]
                .into_iter()
                .map(|l| sup_over(opts.krange.1, l))
                .collect();
            let dom = Quantity::from_growth(by_domain, e.r);
            if dom.divergent || f.singularities().is_empty() {
                return Ok(dom);
            }
            let lvl = Quantity::from_growth(by_level, e.r);
            Ok(if lvl.divergent { lvl.with_flag("refinement") } else { dom })
        }
    }
}

/// Deepest geometric refinement next to a singular point, in halvings of the mesh.
const MAX_LEVELS: u32 = 40;

/// Sup of `g` on a uniform grid over `h` plus geometric points next to
/// singularities, polished by golden-section search around the best point.
fn grid_sup(g: &impl Fn(f64) -> f64, f: &FunSymbol, h: Interval, rel_mesh: f64, levels: u32) -> f64 {
    let n = (1.0 / rel_mesh).ceil() as usize;
    let step = h.len() / n as f64;
    let mut xs: Vec<f64> = (0..=n).map(|i| h.lo + step * i as f64).collect();
    for s in f.singular_points_in(h.lo, h.hi) {
        for j in 1..=levels {
            let dd = step * 0.5f64.powi(j as i32);
            xs.extend([s - dd, s + dd].into_iter().filter(|&x| h.lo <= x && x <= h.hi && x != s));
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for (i, &x) in xs.iter().enumerate() {
        let v = g(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = xs[best_i.saturating_sub(1)];
    let hi = xs[(best_i + 1).min(xs.len() - 1)];
    // Polishing next to a singular point would just chase the blow-up.
    if f.singular_points_in(lo, hi).is_empty() {
        best.max(golden_max(g, lo, hi))
    } else {
        best
    }
}

fn golden_max(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    gc.max(gd)
}

/// `sup_e |e|^{-1/r'} |sum_e lambda|` over all intervals, on nested windows.
pub fn necessary_lower_seq(lambda: &SeqSymbol, e: &ExponentTriple) -> Result<Quantity> {
    require_mode(e, Mode::Hoermander)?;
    let growth = nested_windows(lambda)
        .iter()
        .map(|w| net_norm_seq(w, e.r, &IntervalFamily::All))
        .collect::<Result<Vec<_>>>()?;
    Ok(Quantity::from_growth(growth, e.r))
}

/// `sup_e |e|^{-1/r'} |int_e lambda|` over grid intervals in nested symmetric
/// domains `[-2^{j+1}, 2^{j+1}]`, `j` the top block of each nested range.
pub fn necessary_lower_fun(lambda: &FunSymbol, e: &ExponentTriple, opts: &FunOptions) -> Result<Quantity> {
    require_mode(e, Mode::Hoermander)?;
    opts.check()?;
    let n = opts.krange.1 - opts.krange.0 + 1;
    let growth = nested_depths(n)
        .into_iter()
        .map(|d| {
            let h = pow2(opts.krange.0 + d);
            let fam = IntervalFamily::Span { lo: -h, hi: h };
            Ok(net_norm_fun(lambda, e.r, &fam, opts.grid)?.value)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Quantity::from_growth(growth, e.r))
}

/// `sup_k ||lambda||_{l_{2 tau/|2 - tau|, inf}(delta_k)}`.
pub fn tau_to_tau_upper(lambda: &SeqSymbol, tau: f64) -> Result<BlockSup> {
    if tau == 2.0 {
        return Err(Error::TauIsTwo);
    }
    if !(tau > 1.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must lie in (1, inf)")));
    }
    block_lorentz_seq(lambda, 2.0 * tau / (2.0 - tau).abs())
}

/// `sum_{k=2^n}^{2^{n+1}-1} |l_k - l_{k-1}|` for every `n` whose range lies in the window.
pub fn dyadic_variation(lambda: &SeqSymbol) -> Vec<(i32, f64)> {
    let hi = lambda.window_hi();
    (0..)
        .take_while(|&n| (1i64 << (n + 1)) - 1 <= hi)
        .map(|n| {
            let lo = 1i64 << n;
            let s = (lo..2 * lo).map(|k| (lambda.get(k) - lambda.get(k - 1)).norm()).sum();
            (n, s)
        })
        .collect()
}

/// `sup_n` of [`dyadic_variation`], with growth over nested ranges of `n`.
pub fn marcinkiewicz_variation(lambda: &SeqSymbol) -> Quantity {
    let rows = dyadic_variation(lambda);
    let Some(&(last, _)) = rows.last() else {
        return Quantity::finite(0.0);
    };
    let growth = nested_depths(last + 1)
        .into_iter()
        .map(|d| rows.iter().filter(|r| r.0 < d).map(|r| r.1).fold(0.0, f64::max))
        .collect();
    // Bounded variation on blocks is an r = inf type condition.
    Quantity::from_growth(growth, f64::INFINITY)
}

/// Every applicable bound for one symbol.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub exponents: ExponentTriple,
    pub lower_necessary: Quantity,
    pub upper_hoermander_block: Quantity,
    pub upper_hoermander_classic: Quantity,
    pub upper_lizorkin_dyadic: Option<Quantity>,
    pub upper_lizorkin_classic: Option<Quantity>,
    pub empirical_opnorm: Option<f64>,
    /// `lower_necessary / upper_hoermander_block`, when the latter is positive.
    pub lower_to_upper_ratio: Option<f64>,
    pub per_block_table: Vec<BlockRow>,
}

impl SandwichReport {
    pub fn per_block_csv(&self) -> String {
        BlockSup {
            quantity: self.upper_hoermander_block.clone(),
            rows: self.per_block_table.clone(),
        }
        .to_csv()
    }
}

/// Lower and upper bounds for `lambda`; Lizorkin entries are filled when the
/// symbol carries the data they need (real, decaying, derivative) and `p < q`.
pub fn sandwich(lambda: &Symbol, e: &ExponentTriple, opts: &FunOptions) -> Result<SandwichReport> {
    require_mode(e, Mode::Hoermander)?;
    let (lower, block, classic) = match lambda {
        Symbol::Seq(a) => (
            necessary_lower_seq(a, e)?,
            hoermander_upper_seq(a, e)?,
            hoermander_classic(lambda, e, opts)?,
        ),
        Symbol::Fun(f) => (
            necessary_lower_fun(f, e, opts)?,
            hoermander_upper_fun(f, e, opts)?,
            hoermander_classic(lambda, e, opts)?,
        ),
    };
    let liz_ok = e.p < e.q
        && match lambda {
            Symbol::Seq(a) => a.is_real() && a.decay_declared(),
            Symbol::Fun(f) => f.derivative().is_some() && f.vanishes_at_infinity(),
        };
    let liz_exponents = ExponentTriple {
        mode: Mode::Lizorkin,
        ..*e
    };
    let (liz_dyadic, liz_classic) = if liz_ok {
        let dyadic = match lambda {
            Symbol::Seq(a) => lizorkin_upper_seq(a, &liz_exponents, None)?,
            Symbol::Fun(f) => lizorkin_upper_fun(f, &liz_exponents, opts)?,
        };
        (
            Some(dyadic.quantity),
            Some(lizorkin_classic(lambda, &liz_exponents, opts)?),
        )
    } else {
        (None, None)
    };
    let mut upper_block = block.quantity;
    if !classic.divergent && upper_block.value > classic.value * (1.0 + 1e-9) {
        upper_block = upper_block.with_flag("exceeds_classic");
    }
    let ratio = (upper_block.value > 0.0).then(|| lower.value / upper_block.value);
    Ok(SandwichReport {
        exponents: *e,
        lower_necessary: lower,
        upper_hoermander_block: upper_block,
        upper_hoermander_classic: classic,
        upper_lizorkin_dyadic: liz_dyadic,
        upper_lizorkin_classic: liz_classic,
        empirical_opnorm: None,
        lower_to_upper_ratio: ratio,
        per_block_table: block.rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{make_exponents, Singularity};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hoer() -> ExponentTriple {
        make_exponents(4.0 / 3.0, 4.0, Mode::Hoermander).unwrap()
    }

    fn liz() -> ExponentTriple {
        make_exponents(4.0 / 3.0, 4.0, Mode::Lizorkin).unwrap()
    }

    fn unit(lo: i64, hi: i64, at: i64) -> SeqSymbol {
        SeqSymbol::from_fn(lo, hi, true, |k| Complex64::new((k == at) as u8 as f64, 0.0)).unwrap()
    }

    #[test]
    fn unit_vector_bounds() {
        let e0 = unit(-16, 16, 0);
        let e = hoer();
        assert_eq!(hoermander_upper_seq(&e0, &e).unwrap().value(), 1.0);
        let c = hoermander_classic(&Symbol::Seq(e0.clone()), &e, &FunOptions::default()).unwrap();
        assert_eq!(c.value, 1.0);
        assert!(!c.divergent);
        let l = necessary_lower_seq(&e0, &e).unwrap();
        assert_eq!(l.value, 1.0);
        assert!(!l.divergent);
        assert_eq!(tau_to_tau_upper(&e0, 3.0).unwrap().value(), 1.0);
    }

    #[test]
    fn constant_symbol_lower_bound_diverges() {
        let n = 200;
        let ones = SeqSymbol::from_fn(-n, n, false, |_| Complex64::new(1.0, 0.0)).unwrap();
        let e = hoer();
        let l = necessary_lower_seq(&ones, &e).unwrap();
        assert!((l.value - ((2 * n + 1) as f64).powf(1.0 / e.r)).abs() < 1e-12);
        assert!(l.divergent);
    }

    #[test]
    fn lizorkin_preconditions() {
        let e = liz();
        let c = SeqSymbol::from_fn(-8, 8, false, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(lizorkin_upper_seq(&c, &e, None), Err(Error::DecayNotDeclared)));
        let z = SeqSymbol::from_fn(-8, 8, true, |_| Complex64::new(0.0, 1.0)).unwrap();
        assert!(matches!(lizorkin_upper_seq(&z, &e, None), Err(Error::NonReal)));
        let f = FunSymbol::real(|x| (-x * x).exp()).with_vanishing(true);
        assert!(matches!(
            lizorkin_upper_fun(&f, &e, &FunOptions::default()),
            Err(Error::MissingDerivative)
        ));
        assert!(matches!(tau_to_tau_upper(&c, 2.0), Err(Error::TauIsTwo)));
    }

    #[test]
    fn zero_symbols() {
        let e = hoer();
        let opts = FunOptions {
            krange: (-2, 3),
            ..FunOptions::default()
        };
        let z = FunSymbol::zero();
        assert_eq!(hoermander_upper_fun(&z, &e, &opts).unwrap().value(), 0.0);
        let z = z.with_derivative(|_| 0.0).unwrap();
        assert_eq!(lizorkin_upper_fun(&z, &liz(), &opts).unwrap().value(), 0.0);
        let rep = sandwich(&Symbol::Fun(z), &e, &opts).unwrap();
        assert_eq!(rep.lower_necessary.value, 0.0);
        assert_eq!(rep.upper_hoermander_block.value, 0.0);
        assert_eq!(rep.upper_hoermander_classic.value, 0.0);
        assert_eq!(rep.upper_lizorkin_dyadic.unwrap().value, 0.0);
        assert_eq!(rep.lower_to_upper_ratio, None);
    }

    #[test]
    fn indicator_block_values() {
        let f = FunSymbol::piecewise_constant(vec![(1.0, 2.0, 1.0)]).unwrap();
        let opts = FunOptions {
            krange: (-2, 3),
            ..FunOptions::default()
        };
        let b = hoermander_upper_fun(&f, &hoer(), &opts).unwrap();
        assert!((b.value() - 1.0).abs() < 1e-12);
        assert!(b.rows.iter().filter(|r| r.k != 0).all(|r| r.value == 0.0));
        let l = necessary_lower_fun(&FunSymbol::piecewise_constant(vec![(0.0, 1.0, 1.0)]).unwrap(), &hoer(), &opts)
            .unwrap();
        assert!((l.value - 1.0).abs() < 1e-9, "{}", l.value);
    }

    #[test]
    fn lizorkin_fun_endpoint_singularity() {
        // (2 - |x|)^a on [-2, 2]: each half of Delta_0 carries total variation 1.
        let a = 0.4;
        let f = FunSymbol::real(move |x: f64| if x.abs() < 2.0 { (2.0 - x.abs()).powf(a) } else { 0.0 })
            .with_derivative(move |x: f64| {
                if x.abs() < 2.0 {
                    -x.signum() * a * (2.0 - x.abs()).powf(a - 1.0)
                } else {
                    0.0
                }
            })
            .unwrap()
            .with_singularities(vec![
                Singularity {
                    location: -2.0,
                    exponent: a - 1.0,
                },
                Singularity {
                    location: 2.0,
                    exponent: a - 1.0,
                },
            ])
            .unwrap()
            .with_vanishing(true);
        let opts = FunOptions {
            krange: (-4, 3),
            ..FunOptions::default()
        };
        let b = lizorkin_upper_fun(&f, &liz(), &opts).unwrap();
        let row0 = b.rows.iter().find(|r| r.k == 0).unwrap();
        assert!((row0.value - 2.0).abs() < 1e-8, "{}", row0.value);
        let c = lizorkin_classic(&Symbol::Fun(f), &liz(), &opts).unwrap();
        assert!(c.divergent, "{:?}", c.growth);
    }

    #[test]
    fn variation_blocks() {
        let v: Vec<f64> = (0..32).map(|k| if k == 5 { 1.0 } else { 0.0 }).collect();
        let a = SeqSymbol::from_real(0, &v, true).unwrap();
        let rows = dyadic_variation(&a);
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[2], (2, 2.0));
        assert_eq!(marcinkiewicz_variation(&a).value, 2.0);
    }

    #[test]
    fn homogeneity_and_triangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = hoer();
        let le = liz();
        for _ in 0..20 {
            let mk = |rng: &mut ChaCha8Rng| {
                let v: Vec<f64> = (0..65).map(|_| rng.gen_range(-1.0..1.0)).collect();
                SeqSymbol::from_real(-32, &v, true).unwrap()
            };
            let (a, b) = (mk(&mut rng), mk(&mut rng));
            let ab = a.add(&b);
            let bounds = |x: &SeqSymbol| {
                [
                    hoermander_upper_seq(x, &e).unwrap().value(),
                    necessary_lower_seq(x, &e).unwrap().value,
                    lizorkin_upper_seq(x, &le, None).unwrap().value(),
                    lizorkin_classic(&Symbol::Seq(x.clone()), &le, &FunOptions::default()).unwrap().value,
                    tau_to_tau_upper(x, 3.0).unwrap().value(),
                ]
            };
            let (ba, bb, bab) = (bounds(&a), bounds(&b), bounds(&ab));
            let scaled = bounds(&a.scale(Complex64::new(-4.0, 0.0)));
            for i in 0..5 {
                assert_eq!(scaled[i], 4.0 * ba[i]);
            }
            // Lorentz quasi-norms with r > 1 are not subadditive; the rest are seminorms.
            for i in [1, 2, 3] {
                assert!(bab[i] <= (ba[i] + bb[i]) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn block_not_above_classic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let e = hoer();
        for _ in 0..30 {
            let v: Vec<f64> = (0..129).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let a = SeqSymbol::from_real(-64, &v, false).unwrap();
            let rep = sandwich(&Symbol::Seq(a), &e, &FunOptions::default()).unwrap();
            assert!(rep.upper_hoermander_block.value <= rep.upper_hoermander_classic.value);
            assert!(!rep.upper_hoermander_block.has_flag("exceeds_classic"));
        }
    }

    #[test]
    fn lower_bound_grows_with_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let v: Vec<f64> = (0..257).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = SeqSymbol::from_real(-128, &v, false).unwrap();
        let l = necessary_lower_seq(&a, &hoer()).unwrap();
        assert!(l.growth.windows(2).all(|w| w[0] <= w[1]));
    }
}
