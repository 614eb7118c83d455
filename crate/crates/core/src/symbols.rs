//! Multiplier symbols on `Z` and `R`, dyadic blocks and exponent triples.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Which family of theorems an exponent pair is meant for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `1 < p <= 2 <= q < inf`.
    Hoermander,
    /// `1 < p < q < inf`.
    Lizorkin,
}

/// `(p, q)` together with `1/r = 1/p - 1/q` and the conjugate `r'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentTriple {
    pub p: f64,
    pub q: f64,
    /// `+inf` when `p == q`.
    pub r: f64,
    pub r_conj: f64,
    pub mode: Mode,
}

impl ExponentTriple {
    /// `1/r`, computed directly from `p` and `q` (exactly zero when `p == q`).
    pub fn inv_r(&self) -> f64 {
        1.0 / self.p - 1.0 / self.q
    }

    /// `1/r'`.
    pub fn inv_r_conj(&self) -> f64 {
        1.0 - self.inv_r()
    }
}

pub fn make_exponents(p: f64, q: f64, mode: Mode) -> Result<ExponentTriple> {
    if !(p.is_finite() && q.is_finite()) || p <= 1.0 || q <= 1.0 {
        return Err(Error::InvalidExponents(format!(
            "p = {p}, q = {q}: both must be finite and > 1"
        )));
    }
    match mode {
        Mode::Hoermander if !(p <= 2.0 && 2.0 <= q) => {
            return Err(Error::InvalidExponents(format!(
                "p = {p}, q = {q}: Hoermander mode needs 1 < p <= 2 <= q"
            )))
        }
        Mode::Lizorkin if p >= q => {
            return Err(Error::InvalidExponents(format!(
                "p = {p}, q = {q}: Lizorkin mode needs 1 < p < q"
            )))
        }
        _ => {}
    }
    let inv_r = 1.0 / p - 1.0 / q;
    let (r, r_conj) = if inv_r == 0.0 {
        (f64::INFINITY, 1.0)
    } else {
        (1.0 / inv_r, 1.0 / (1.0 - inv_r))
    };
    Ok(ExponentTriple {
        p,
        q,
        r,
        r_conj,
        mode,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Continuous,
    Discrete,
}

/// `Delta_k = (-2^{k+1}, -2^k] u [2^k, 2^{k+1})` or its discrete analogue
/// `delta_k` (with `delta_0 = {-1, 0, 1}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DyadicBlock {
    pub k: i32,
    pub kind: BlockKind,
}

/// A half-line piece of a continuous block, as `[lo, hi]` up to endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlockMembers {
    /// Negative half first.
    Intervals([Interval; 2]),
    Indices(Vec<i64>),
}

impl DyadicBlock {
    pub fn continuous(k: i32) -> Self {
        DyadicBlock {
            k,
            kind: BlockKind::Continuous,
        }
    }

    pub fn discrete(k: i32) -> Self {
        assert!(k >= 0, "discrete blocks are indexed by k >= 0");
        DyadicBlock {
            k,
            kind: BlockKind::Discrete,
        }
    }

    pub fn members(&self) -> BlockMembers {
        match self.kind {
            BlockKind::Continuous => {
                let lo = pow2(self.k);
                let hi = 2.0 * lo;
                BlockMembers::Intervals([Interval::new(-hi, -lo), Interval::new(lo, hi)])
            }
            BlockKind::Discrete => BlockMembers::Indices(self.indices()),
        }
    }

    /// Index range `(lo, hi)` (inclusive) of the non-negative half of a discrete block.
    pub fn positive_range(&self) -> (i64, i64) {
        if self.k == 0 {
            (0, 1)
        } else {
            let lo = 1i64 << self.k;
            (lo, 2 * lo - 1)
        }
    }

    /// Index range of the negative half of a discrete block.
    pub fn negative_range(&self) -> (i64, i64) {
        if self.k == 0 {
            (-1, -1)
        } else {
            let lo = 1i64 << self.k;
            (-2 * lo + 1, -lo)
        }
    }

    fn indices(&self) -> Vec<i64> {
        let (nlo, nhi) = self.negative_range();
        let (plo, phi) = self.positive_range();
        (nlo..=nhi).chain(plo..=phi).collect()
    }

    pub fn contains_index(&self, j: i64) -> bool {
        let (nlo, nhi) = self.negative_range();
        let (plo, phi) = self.positive_range();
        (nlo..=nhi).contains(&j) || (plo..=phi).contains(&j)
    }

    pub fn contains_point(&self, x: f64) -> bool {
        let lo = pow2(self.k);
        let a = x.abs();
        lo <= a && a < 2.0 * lo
    }

    /// Largest `|j|` in a discrete block.
    pub fn extent(&self) -> i64 {
        match self.k {
            0 => 1,
            k => (1i64 << (k + 1)) - 1,
        }
    }
}

pub fn block_members(b: DyadicBlock) -> BlockMembers {
    b.members()
}

pub(crate) fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

/// A finitely supported sequence `{lambda_k}` on the window `[lo, hi]`.
///
/// Values outside the window are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqSymbol {
    window_lo: i64,
    values: Vec<Complex64>,
    decay_declared: bool,
}

impl SeqSymbol {
    pub fn new(window_lo: i64, values: Vec<Complex64>, decay_declared: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSymbol("empty window".into()));
        }
        let window_hi = window_lo + values.len() as i64 - 1;
        if window_lo > 0 || window_hi < 0 {
            return Err(Error::InvalidSymbol(format!(
                "window [{window_lo}, {window_hi}] must contain 0"
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidSymbol(format!(
                "non-finite value at index {}",
                window_lo + i as i64
            )));
        }
        Ok(SeqSymbol {
            window_lo,
            values,
            decay_declared,
        })
    }

    pub fn from_real(window_lo: i64, values: &[f64], decay_declared: bool) -> Result<Self> {
        Self::new(
            window_lo,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            decay_declared,
        )
    }

    /// Builds the window `[lo, hi]` from a closure over indices.
    pub fn from_fn(lo: i64, hi: i64, decay_declared: bool, f: impl Fn(i64) -> Complex64) -> Result<Self> {
        Self::new(lo, (lo..=hi).map(f).collect(), decay_declared)
    }

    pub fn zero(lo: i64, hi: i64) -> Self {
        Self::from_fn(lo, hi, true, |_| Complex64::new(0.0, 0.0)).expect("valid window")
    }

    pub fn window_lo(&self) -> i64 {
        self.window_lo
    }

    pub fn window_hi(&self) -> i64 {
        self.window_lo + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn decay_declared(&self) -> bool {
        self.decay_declared
    }

    pub fn with_decay(mut self, decay: bool) -> Self {
        self.decay_declared = decay;
        self
    }

    pub fn get(&self, k: i64) -> Complex64 {
        if k < self.window_lo || k > self.window_hi() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[(k - self.window_lo) as usize]
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.window_lo..=self.window_hi()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_index(&self) -> i64 {
        let mut best = (0.0, 0i64);
        for (i, v) in self.values.iter().enumerate() {
            if v.norm() > best.0 {
                best = (v.norm(), self.window_lo + i as i64);
            }
        }
        best.1
    }

    pub fn scale(&self, c: Complex64) -> Self {
        SeqSymbol {
            window_lo: self.window_lo,
            values: self.values.iter().map(|v| v * c).collect(),
            decay_declared: self.decay_declared,
        }
    }

    pub fn add(&self, other: &SeqSymbol) -> Self {
        let lo = self.window_lo.min(other.window_lo);
        let hi = self.window_hi().max(other.window_hi());
        Self::from_fn(lo, hi, self.decay_declared && other.decay_declared, |k| {
            self.get(k) + other.get(k)
        })
        .expect("union of valid windows")
    }

    /// Same window, values zeroed outside `keep`.
    pub fn restrict(&self, keep: impl Fn(i64) -> bool) -> Self {
        let values = self
            .indices()
            .zip(&self.values)
            .map(|(k, &v)| if keep(k) { v } else { Complex64::new(0.0, 0.0) })
            .collect();
        SeqSymbol {
            window_lo: self.window_lo,
            values,
            decay_declared: self.decay_declared,
        }
    }

    pub fn restrict_to_block(&self, b: DyadicBlock) -> Self {
        assert_eq!(b.kind, BlockKind::Discrete, "sequence symbols use discrete blocks");
        self.restrict(|k| b.contains_index(k))
    }

    /// Same symbol on a narrower window `[lo, hi]` (clipped to the current one).
    pub fn truncate(&self, lo: i64, hi: i64) -> Self {
        let lo = lo.max(self.window_lo).min(0);
        let hi = hi.min(self.window_hi()).max(0);
        Self::from_fn(lo, hi, self.decay_declared, |k| self.get(k)).expect("window contains 0")
    }

    /// Values of the block restricted to its support, in index order.
    pub fn block_values(&self, b: DyadicBlock) -> Vec<Complex64> {
        let (nlo, nhi) = b.negative_range();
        let (plo, phi) = b.positive_range();
        (nlo..=nhi).chain(plo..=phi).map(|k| self.get(k)).collect()
    }

    /// Discrete blocks that intersect the window, with a flag telling whether the
    /// window boundary cuts the block.
    pub fn blocks(&self) -> Vec<(DyadicBlock, bool)> {
        let reach = self.window_hi().max(-self.window_lo);
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            let b = DyadicBlock::discrete(k);
            let (nlo, _) = b.negative_range();
            let (plo, phi) = b.positive_range();
            if plo > reach && -b.negative_range().1 > reach {
                break;
            }
            let truncated = phi > self.window_hi() || nlo < self.window_lo;
            out.push((b, truncated));
            k += 1;
        }
        out
    }

    /// Largest `k` such that every block `delta_0..delta_k` lies in the window
    /// on the side(s) the window extends to.
    pub fn default_kmax(&self) -> i32 {
        let reach = self.window_hi().max(-self.window_lo);
        let mut k = 0;
        while (1i64 << (k + 2)) - 1 <= reach {
            k += 1;
        }
        k
    }
}

/// A point where the symbol (or its derivative) blows up like `|x - location|^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Singularity {
    pub location: f64,
    /// In `(-1, 0)` for integrable blow-ups.
    pub exponent: f64,
}

/// A symbol on `R` given by an evaluator.
#[derive(Clone)]
pub struct FunSymbol {
    evaluator: ComplexFn,
    derivative: Option<RealFn>,
    singularities: Vec<Singularity>,
    breakpoints: Vec<f64>,
    real_valued: bool,
    vanishes_at_infinity: bool,
}

impl fmt::Debug for FunSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunSymbol")
            .field("has_derivative", &self.derivative.is_some())
            .field("singularities", &self.singularities.len())
            .field("breakpoints", &self.breakpoints.len())
            .field("real_valued", &self.real_valued)
            .field("vanishes_at_infinity", &self.vanishes_at_infinity)
            .finish()
    }
}

impl FunSymbol {
    pub fn real(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        FunSymbol {
            evaluator: Arc::new(move |x| Complex64::new(f(x), 0.0)),
            derivative: None,
            singularities: Vec::new(),
            breakpoints: Vec::new(),
            real_valued: true,
            vanishes_at_infinity: false,
        }
    }

    pub fn complex(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        FunSymbol {
            evaluator: Arc::new(f),
            derivative: None,
            singularities: Vec::new(),
            breakpoints: Vec::new(),
            real_valued: false,
            vanishes_at_infinity: false,
        }
    }

    pub fn zero() -> Self {
        Self::real(|_| 0.0).with_vanishing(true)
    }

    /// Piecewise-constant symbol from `(a, b, value)` steps; zero elsewhere.
    pub fn piecewise_constant(steps: Vec<(f64, f64, f64)>) -> Result<Self> {
        for &(a, b, v) in &steps {
            if !(a < b && a.is_finite() && b.is_finite() && v.is_finite()) {
                return Err(Error::InvalidSymbol(format!("bad step ({a}, {b}, {v})")));
            }
        }
        let mut bps: Vec<f64> = steps.iter().flat_map(|&(a, b, _)| [a, b]).collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let steps = Arc::new(steps);
        let f = FunSymbol::real(move |x| {
            steps
                .iter()
                .find(|&&(a, b, _)| a <= x && x < b)
                .map_or(0.0, |s| s.2)
        });
        // Derivative is zero almost everywhere; the jumps are not absolutely continuous.
        Ok(f.with_breakpoints(bps).with_vanishing(true))
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if !self.real_valued {
            return Err(Error::NonReal);
        }
        self.derivative = Some(Arc::new(d));
        Ok(self)
    }

    pub fn with_singularities(mut self, sing: Vec<Singularity>) -> Result<Self> {
        for s in &sing {
            if !(s.exponent > -1.0 && s.exponent < 0.0) || !s.location.is_finite() {
                return Err(Error::NonIntegrable {
                    location: s.location,
                    exponent: s.exponent,
                });
            }
        }
        self.singularities = sing;
        self.singularities
            .sort_by(|a, b| a.location.total_cmp(&b.location));
        Ok(self)
    }

    pub fn with_breakpoints(mut self, mut bps: Vec<f64>) -> Self {
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        self.breakpoints = bps;
        self
    }

    pub fn with_vanishing(mut self, v: bool) -> Self {
        self.vanishes_at_infinity = v;
        self
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        (self.evaluator)(x)
    }

    pub fn abs(&self, x: f64) -> f64 {
        self.eval(x).norm()
    }

    pub fn derivative(&self) -> Option<&RealFn> {
        self.derivative.as_ref()
    }

    pub fn singularities(&self) -> &[Singularity] {
        &self.singularities
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn is_real(&self) -> bool {
        self.real_valued
    }

    pub fn vanishes_at_infinity(&self) -> bool {
        self.vanishes_at_infinity
    }

    /// Singular points strictly inside `(a, b)` or at its endpoints.
    pub fn singular_points_in(&self, a: f64, b: f64) -> Vec<f64> {
        self.singularities
            .iter()
            .map(|s| s.location)
            .filter(|&x| a <= x && x <= b)
            .collect()
    }

    /// Cut points (singularities and declared breakpoints) strictly inside `(a, b)`.
    pub fn cut_points_in(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .singularities
            .iter()
            .map(|s| s.location)
            .chain(self.breakpoints.iter().copied())
            .filter(|&x| a < x && x < b)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    pub fn is_singular_at(&self, x: f64) -> bool {
        self.singularities.iter().any(|s| s.location == x)
    }

    /// `c * lambda` for real `c`.
    pub fn scale(&self, c: f64) -> Self {
        let ev = self.evaluator.clone();
        let mut out = self.clone();
        out.evaluator = Arc::new(move |x| ev(x) * c);
        if let Some(d) = self.derivative.clone() {
            out.derivative = Some(Arc::new(move |x| c * d(x)));
        }
        out
    }

    pub fn add(&self, other: &FunSymbol) -> Self {
        let (f, g) = (self.evaluator.clone(), other.evaluator.clone());
        let mut sing = self.singularities.clone();
        sing.extend(other.singularities.iter().copied());
        sing.sort_by(|a, b| a.location.total_cmp(&b.location));
        let mut bps = self.breakpoints.clone();
        bps.extend(other.breakpoints.iter().copied());
        let derivative = match (self.derivative.clone(), other.derivative.clone()) {
            (Some(d1), Some(d2)) => Some(Arc::new(move |x| d1(x) + d2(x)) as RealFn),
            _ => None,
        };
        FunSymbol {
            evaluator: Arc::new(move |x| f(x) + g(x)),
            derivative,
            singularities: sing,
            breakpoints: bps,
            real_valued: self.real_valued && other.real_valued,
            vanishes_at_infinity: self.vanishes_at_infinity && other.vanishes_at_infinity,
        }
        .with_breakpoints_sorted()
    }

    fn with_breakpoints_sorted(mut self) -> Self {
        self.breakpoints.sort_by(f64::total_cmp);
        self.breakpoints.dedup();
        self
    }

    /// Zero outside the indicator `keep`.
    pub fn restrict(&self, keep: impl Fn(f64) -> bool + Send + Sync + Clone + 'static) -> Self {
        let ev = self.evaluator.clone();
        let k1 = keep.clone();
        let mut out = self.clone();
        out.evaluator = Arc::new(move |x| if k1(x) { ev(x) } else { Complex64::new(0.0, 0.0) });
        if let Some(d) = self.derivative.clone() {
            out.derivative = Some(Arc::new(move |x| if keep(x) { d(x) } else { 0.0 }));
        }
        out
    }

    pub fn restrict_to_block(&self, b: DyadicBlock) -> Self {
        assert_eq!(b.kind, BlockKind::Continuous, "function symbols use continuous blocks");
        let mut out = self.restrict(move |x| b.contains_point(x));
        let lo = pow2(b.k);
        out.breakpoints.extend([-2.0 * lo, -lo, lo, 2.0 * lo]);
        out.with_breakpoints_sorted()
    }
}

/// Either kind of symbol, for code paths that accept both.
#[derive(Debug, Clone)]
pub enum Symbol {
    Seq(SeqSymbol),
    Fun(FunSymbol),
}

impl Symbol {
    pub fn restrict_to_block(&self, b: DyadicBlock) -> Symbol {
        match self {
            Symbol::Seq(s) => Symbol::Seq(s.restrict_to_block(b)),
            Symbol::Fun(f) => Symbol::Fun(f.restrict_to_block(b)),
        }
    }
}

pub fn restrict_to_block(s: &Symbol, b: DyadicBlock) -> Result<Symbol> {
    match (s, b.kind) {
        (Symbol::Seq(_), BlockKind::Discrete) | (Symbol::Fun(_), BlockKind::Continuous) => {
            Ok(s.restrict_to_block(b))
        }
        _ => Err(Error::InvalidParameter(
            "block kind does not match symbol kind".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn exponents_examples() {
        let e = make_exponents(4.0 / 3.0, 4.0, Mode::Hoermander).unwrap();
        assert!((e.r - 2.0).abs() < 1e-12 && (e.r_conj - 2.0).abs() < 1e-12);

        let e = make_exponents(2.0, 2.0, Mode::Hoermander).unwrap();
        assert_eq!(e.r, f64::INFINITY);
        assert_eq!(e.r_conj, 1.0);

        let e = make_exponents(2.0, 3.0, Mode::Lizorkin).unwrap();
        assert!((e.r - 6.0).abs() < 1e-12);
        assert!((e.r_conj - 1.2).abs() < 1e-12);
    }

    #[test]
    fn exponents_rejected() {
        assert!(make_exponents(3.0, 4.0, Mode::Hoermander).is_err());
        assert!(make_exponents(4.0 / 3.0, 1.5, Mode::Hoermander).is_err());
        assert!(make_exponents(3.0, 3.0, Mode::Lizorkin).is_err());
        assert!(make_exponents(1.0, 3.0, Mode::Lizorkin).is_err());
        assert!(make_exponents(f64::INFINITY, 3.0, Mode::Lizorkin).is_err());
    }

    #[test]
    fn exponent_identity_on_rational_grid() {
        for pn in 1..=10 {
            for qn in 0..=20 {
                let p = 1.0 + pn as f64 / 10.0;
                let q = 2.0 + qn as f64 / 4.0;
                let e = make_exponents(p, q, Mode::Hoermander).unwrap();
                let lhs = e.inv_r() + 1.0 / e.q;
                assert!((lhs - 1.0 / p).abs() <= 4.0 * f64::EPSILON, "{p} {q}");
                if e.r.is_finite() {
                    assert!((1.0 / e.r - e.inv_r()).abs() <= 4.0 * f64::EPSILON);
                    assert!((1.0 / e.r + 1.0 / e.r_conj - 1.0).abs() <= 4.0 * f64::EPSILON);
                }
            }
        }
    }

    #[test]
    fn block_members_examples() {
        assert_eq!(
            DyadicBlock::discrete(0).members(),
            BlockMembers::Indices(vec![-1, 0, 1])
        );
        assert_eq!(
            DyadicBlock::discrete(1).members(),
            BlockMembers::Indices(vec![-3, -2, 2, 3])
        );
        match DyadicBlock::continuous(2).members() {
            BlockMembers::Intervals([neg, pos]) => {
                assert_eq!((neg.lo, neg.hi), (-8.0, -4.0));
                assert_eq!((pos.lo, pos.hi), (4.0, 8.0));
            }
            _ => unreachable!(),
        }
        for k in 1..8 {
            match DyadicBlock::discrete(k).members() {
                BlockMembers::Indices(v) => assert_eq!(v.len(), 2usize << k),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn discrete_blocks_cover_and_are_disjoint() {
        let kk = 9;
        let mut owner = std::collections::HashMap::new();
        for k in 0..=kk {
            if let BlockMembers::Indices(v) = DyadicBlock::discrete(k).members() {
                for j in v {
                    assert!(owner.insert(j, k).is_none(), "index {j} in two blocks");
                }
            }
        }
        for j in -(1i64 << kk)..=(1i64 << kk) {
            assert!(owner.contains_key(&j), "{j} not covered");
        }
    }

    #[test]
    fn continuous_blocks_partition_punctured_line() {
        let xs = [1e-3, -1e-3, 0.75, -0.75, 1.0, -1.0, 2.0, -2.0, 3.9, -4.0, 1234.5, -0.5];
        for x in xs {
            let hits = (-20..20)
                .filter(|&k| DyadicBlock::continuous(k).contains_point(x))
                .count();
            assert_eq!(hits, 1, "x = {x}");
        }
        assert!(!(-20..20).any(|k| DyadicBlock::continuous(k).contains_point(0.0)));
        // 2^k and -2^k belong to Delta_k; -2^{k+1} does not.
        assert!(DyadicBlock::continuous(1).contains_point(2.0));
        assert!(DyadicBlock::continuous(1).contains_point(-2.0));
        assert!(!DyadicBlock::continuous(1).contains_point(-4.0));
        assert!(!DyadicBlock::continuous(1).contains_point(4.0));
    }

    #[test]
    fn restrict_constant_sequence() {
        let s = SeqSymbol::from_real(-3, &[1.0; 7], true).unwrap();
        let r = s.restrict_to_block(DyadicBlock::discrete(1));
        let got: Vec<f64> = r.values().iter().map(|v| v.re).collect();
        assert_eq!(got, vec![1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        let z = SeqSymbol::zero(-5, 5).restrict_to_block(DyadicBlock::discrete(2));
        assert!(z.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn restrict_is_idempotent_and_linear() {
        let a = SeqSymbol::from_fn(-20, 20, true, |k| Complex64::new(k as f64, (k * k) as f64)).unwrap();
        let b = SeqSymbol::from_fn(-20, 20, true, |k| c((k as f64).sin())).unwrap();
        for k in 0..4 {
            let blk = DyadicBlock::discrete(k);
            let ra = a.restrict_to_block(blk);
            assert_eq!(ra.restrict_to_block(blk), ra);
            let lhs = a.scale(c(2.0)).add(&b).restrict_to_block(blk);
            let rhs = ra.scale(c(2.0)).add(&b.restrict_to_block(blk));
            assert_eq!(lhs, rhs);
        }
        let f = FunSymbol::real(|x| x * x);
        let blk = DyadicBlock::continuous(1);
        let rf = f.restrict_to_block(blk);
        let rrf = rf.restrict_to_block(blk);
        for x in [-3.5, -1.0, 0.5, 2.0, 3.0, 4.0, 7.0] {
            assert_eq!(rf.eval(x), rrf.eval(x));
        }
        assert_eq!(rf.eval(3.0).re, 9.0);
        assert_eq!(rf.eval(4.0).re, 0.0);
    }

    #[test]
    fn seq_invariants_enforced() {
        assert!(SeqSymbol::from_real(1, &[1.0, 2.0], true).is_err());
        assert!(SeqSymbol::from_real(-3, &[1.0, 2.0], true).is_err());
        assert!(SeqSymbol::from_real(0, &[f64::NAN], true).is_err());
        assert!(SeqSymbol::from_real(0, &[], true).is_err());
    }

    #[test]
    fn derivative_needs_real_symbol() {
        let f = FunSymbol::complex(|x| Complex64::new(x, x));
        assert!(matches!(f.with_derivative(|_| 1.0), Err(Error::NonReal)));
        let bad = FunSymbol::real(|x| x).with_singularities(vec![Singularity {
            location: 0.0,
            exponent: -1.0,
        }]);
        assert!(matches!(bad, Err(Error::NonIntegrable { .. })));
    }

    #[test]
    fn mismatched_block_kind_rejected() {
        let s = Symbol::Seq(SeqSymbol::zero(-2, 2));
        assert!(restrict_to_block(&s, DyadicBlock::continuous(0)).is_err());
        assert!(restrict_to_block(&s, DyadicBlock::discrete(0)).is_ok());
    }
}
