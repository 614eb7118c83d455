//! Discretized multiplier operators and an empirical lower estimate of their
//! `L_p -> L_q` norm.
//!
//! Both models act on `N` equispaced samples through the FFT. The periodic
//! model works on `(0, 1)` with normalized measure, so the forward transform
//! returns the coefficients `c_k = (1/N) sum_j f_j e^{-2 pi i j k / N}` of the
//! trigonometric interpolant and a pure mode is an exact eigenvector. The line
//! model samples `[-L/2, L/2)`; frequency `j` stands for `xi = 2 pi j / L`, so
//! the spacing is `2 pi / L` and the Nyquist frequency is `pi N / L`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbols::{FunSymbol, SeqSymbol};

pub const DEFAULT_ITERS: usize = 200;
pub const DEFAULT_RESTARTS: usize = 16;
/// A restart stops once the ratio changes by less than this, relatively.
pub const STAGNATION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ModelKind {
    Periodic,
    Line { length: f64 },
}

#[derive(Clone)]
pub struct DiscreteMultiplier {
    n: usize,
    kind: ModelKind,
    /// Multiplier values in FFT order: bin `j` is frequency `j` for `j < N/2`
    /// and `j - N` above.
    spectrum: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for DiscreteMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteMultiplier")
            .field("n", &self.n)
            .field("kind", &self.kind)
            .field("max_abs", &self.max_abs())
            .finish()
    }
}

fn check_size(n: usize) -> Result<()> {
    if n >= 4 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("N = {n} must be a power of two >= 4")))
    }
}

/// Signed frequency of FFT bin `j`.
fn frequency(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

fn bin(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

impl DiscreteMultiplier {
    fn with_spectrum(n: usize, kind: ModelKind, spectrum: Vec<Complex64>) -> Self {
        let mut planner = FftPlanner::new();
        DiscreteMultiplier {
            n,
            kind,
            spectrum,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Periodic model of a sequence symbol; indices outside its window act as 0.
    pub fn periodic(a: &SeqSymbol, n: usize) -> Result<Self> {
        check_size(n)?;
        let reach = a.window_lo().abs().max(a.window_hi().abs());
        if reach > (n / 4) as i64 {
            return Err(Error::Aliasing(format!(
                "symbol window reaches |k| = {reach}, N = {n} allows at most {}",
                n / 4
            )));
        }
        let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
        for (k, v) in a.indices().zip(a.values()) {
            spectrum[bin(k, n)] = *v;
        }
        Ok(Self::with_spectrum(n, ModelKind::Periodic, spectrum))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn max_abs(&self) -> f64 {
        self.spectrum.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Bin holding the largest multiplier value (lowest frequency on ties).
    fn peak_bin(&self) -> usize {
        let mut best = 0;
        for (j, v) in self.spectrum.iter().enumerate() {
            let (a, b) = (v.norm(), self.spectrum[best].norm());
            if a > b || (a == b && frequency(j, self.n).abs() < frequency(best, self.n).abs()) {
                best = j;
            }
        }
        best
    }

    /// Total measure of the sample domain: 1 for the periodic model, `L` on the line.
    fn measure(&self) -> f64 {
        match self.kind {
            ModelKind::Periodic => 1.0,
            ModelKind::Line { length } => length,
        }
    }

    fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for v in &mut out.spectrum {
            *v = v.conj();
        }
        out
    }

    /// Norm of `g` in the model's own `L_p`.
    pub fn lp_norm(&self, g: &[Complex64], p: f64) -> f64 {
        let base = lp_norm_periodic(g, p);
        if p.is_infinite() {
            base
        } else {
            base * self.measure().powf(1.0 / p)
        }
    }

    /// `||T f||_q / ||f||_p`, or 0 when `f` vanishes.
    pub fn ratio(&self, f: &[Complex64], p: f64, q: f64) -> Result<f64> {
        let tf = apply_multiplier(self, f)?;
        let den = self.lp_norm(f, p);
        Ok(if den > 0.0 { self.lp_norm(&tf, q) / den } else { 0.0 })
    }
}

/// Line model of `lambda` sampled at `xi_j = 2 pi j / L`, `|j| <= N/2`. A
/// frequency that lands on a declared singularity is moved half a step to
/// the right. The two Nyquist samples share one bin and are averaged.
pub fn make_line_multiplier(lambda: &FunSymbol, n: usize, length: f64) -> Result<DiscreteMultiplier> {
    check_size(n)?;
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidParameter(format!("domain length {length} must be positive")));
    }
    let step = 2.0 * std::f64::consts::PI / length;
    let sample = |j: i64| {
        let xi = step * j as f64;
        let xi = if lambda.is_singular_at(xi) {
            xi + 0.5 * step
        } else {
            xi
        };
        lambda.eval(xi)
    };
    let half = (n / 2) as i64;
    let mut spectrum: Vec<Complex64> = (0..n).map(|j| sample(frequency(j, n))).collect();
    spectrum[n / 2] = 0.5 * (sample(half) + sample(-half));
    Ok(DiscreteMultiplier::with_spectrum(n, ModelKind::Line { length }, spectrum))
}

/// Inverse transform of the spectrum times the normalized forward transform.
pub fn apply_multiplier(t: &DiscreteMultiplier, f: &[Complex64]) -> Result<Vec<Complex64>> {
    if f.len() != t.n {
        return Err(Error::LengthMismatch {
            expected: t.n,
            got: f.len(),
        });
    }
    let mut buf = f.to_vec();
    t.forward.process(&mut buf);
    let scale = 1.0 / t.n as f64;
    for (v, m) in buf.iter_mut().zip(&t.spectrum) {
        *v *= m * scale;
    }
    t.inverse.process(&mut buf);
    Ok(buf)
}

/// `((1/N) sum |f_j|^p)^{1/p}`; `p = inf` gives the maximum.
pub fn lp_norm_periodic(f: &[Complex64], p: f64) -> f64 {
    if f.is_empty() {
        return 0.0;
    }
    let top = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if p.is_infinite() || top == 0.0 {
        return top;
    }
    // Scaled by the maximum to keep large p from overflowing.
    let s: f64 = f.iter().map(|v| (v.norm() / top).powf(p)).sum();
    top * (s / f.len() as f64).powf(1.0 / p)
}

/// `|g|^{s-1} phase(g)`, computed on `g / max|g|`.
fn dual_map(g: &[Complex64], s: f64) -> Vec<Complex64> {
    let top = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return g.to_vec();
    }
    g.iter()
        .map(|v| {
            let m = v.norm();
            if m == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                v / m * (m / top).powf(s - 1.0)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpNormEstimate {
    /// Largest `||Tf||_q / ||f||_p` seen over every evaluated `f`.
    pub value: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Running best ratio of each start, one entry per evaluated iterate.
    /// Start 0 is the pure mode at the spectral peak; the rest are random.
    pub trajectory: Vec<Vec<f64>>,
}

impl OpNormEstimate {
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("restart,iteration,ratio\n");
        for (i, run) in self.trajectory.iter().enumerate() {
            for (j, r) in run.iter().enumerate() {
                out.push_str(&format!("{i},{j},{r:e}\n"));
            }
        }
        out
    }
}

fn ascend(t: &DiscreteMultiplier, adj: &DiscreteMultiplier, mut f: Vec<Complex64>, p: f64, q: f64, iters: usize) -> Result<Vec<f64>> {
    let p_conj = p / (p - 1.0);
    let mut best = t.ratio(&f, p, q)?;
    let mut run = vec![best];
    let mut last = best;
    for _ in 0..iters {
        let tf = apply_multiplier(t, &f)?;
        let back = apply_multiplier(adj, &dual_map(&tf, q))?;
        let next = dual_map(&back, p_conj);
        let norm = t.lp_norm(&next, p);
        if !(norm > 0.0) {
            break;
        }
        f = next.into_iter().map(|v| v / norm).collect();
        let r = t.ratio(&f, p, q)?;
        best = best.max(r);
        run.push(best);
        if (r - last).abs() <= STAGNATION * last.abs() {
            break;
        }
        last = r;
    }
    Ok(run)
}

/// Lower estimate of the discretized `L_p -> L_q` norm by generalized power
/// iteration `f <- normalize_p(dual_{p'}(T*(dual_q(T f))))`.
///
/// Start 0 is the Fourier mode at the spectral peak, which already realizes
/// `max |lambda|`; starts `1..=restarts` use random complex data from ChaCha8
/// stream `i` of `seed`, so adding starts or iterations never lowers the value.
pub fn estimate_opnorm(
    t: &DiscreteMultiplier,
    p: f64,
    q: f64,
    iters: usize,
    restarts: usize,
    seed: u64,
) -> Result<OpNormEstimate> {
    for (name, s) in [("p", p), ("q", q)] {
        if !(s > 1.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} = {s} must lie in (1, inf)")));
        }
    }
    let n = t.n;
    let adj = t.adjoint();
    let peak = frequency(t.peak_bin(), n);
    let starts: Vec<Vec<Complex64>> = (0..=restarts)
        .map(|i| {
            if i == 0 {
                return (0..n)
                    .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (peak * j as i64) as f64 / n as f64))
                    .collect();
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    let trajectory = starts
        .into_par_iter()
        .map(|f| ascend(t, &adj, f, p, q, iters))
        .collect::<Result<Vec<_>>>()?;
    let value = trajectory
        .iter()
        .filter_map(|run| run.last().copied())
        .fold(0.0, f64::max);
    Ok(OpNormEstimate {
        value,
        iterations: iters,
        restarts,
        seed,
        trajectory,
    })
}

/// `||T f||_q / ||f||_p` in the periodic model for `f` with Fourier
/// coefficients `1` on `e0 = [lo, hi]` and `0` elsewhere.
pub fn witness_ratio(lambda: &SeqSymbol, e0: (i64, i64), p: f64, q: f64, n: usize) -> Result<f64> {
    check_size(n)?;
    let (lo, hi) = e0;
    if lo > hi || lo < lambda.window_lo() || hi > lambda.window_hi() {
        return Err(Error::InvalidParameter(format!(
            "interval [{lo}, {hi}] not inside window [{}, {}]",
            lambda.window_lo(),
            lambda.window_hi()
        )));
    }
    let reach = lo.abs().max(hi.abs());
    if (n as i64) < 8 * reach {
        return Err(Error::Aliasing(format!("N = {n} below 8 * {reach}")));
    }
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for k in lo..=hi {
        spectrum[bin(k, n)] = lambda.get(k);
        coeffs[bin(k, n)] = Complex64::new(1.0, 0.0);
    }
    let t = DiscreteMultiplier::with_spectrum(n, ModelKind::Periodic, spectrum);
    let mut f = coeffs;
    t.inverse.process(&mut f);
    t.ratio(&f, p, q)
}
