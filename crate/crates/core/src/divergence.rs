//! Finite-data evidence for divergent quantities.
//!
//! A quantity computed on nested windows `W_1 ⊂ W_2 ⊂ ...` carries the whole
//! growth sequence. It is flagged divergent when the last two consecutive
//! ratios both reach `2^{1/(2r)}`. The nested windows double the dyadic
//! depth (number of dyadic blocks), so logarithmic and power-type blow-ups
//! are both visible.

use serde::Serialize;

/// Growth threshold used when `r = inf`.
const SUP_NORM_THRESHOLD: f64 = 1.090_507_732_665_257_7; // 2^{1/8}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    /// Value at the largest window.
    pub value: f64,
    pub divergent: bool,
    /// Values on the nested windows, smallest first.
    pub growth: Vec<f64>,
    pub flags: Vec<String>,
}

impl Quantity {
    pub fn finite(value: f64) -> Self {
        Quantity {
            value,
            divergent: false,
            growth: Vec::new(),
            flags: Vec::new(),
        }
    }

    /// Value at the last window, divergence decided from the sequence.
    pub fn from_growth(growth: Vec<f64>, r: f64) -> Self {
        let value = growth.last().copied().unwrap_or(0.0);
        Quantity {
            value,
            divergent: is_divergent(&growth, r),
            growth,
            flags: Vec::new(),
        }
    }

    pub fn with_flag(mut self, flag: impl Into<String>) -> Self {
        let flag = flag.into();
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
        }
        self
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }
}

pub fn growth_threshold(r: f64) -> f64 {
    if r.is_finite() {
        2f64.powf(1.0 / (2.0 * r))
    } else {
        SUP_NORM_THRESHOLD
    }
}

pub fn is_divergent(growth: &[f64], r: f64) -> bool {
    let n = growth.len();
    if n < 3 {
        return false;
    }
    let t = growth_threshold(r);
    let grows = |a: f64, b: f64| b > 0.0 && (a == 0.0 || b >= t * a);
    grows(growth[n - 3], growth[n - 2]) && grows(growth[n - 2], growth[n - 1])
}

/// Nested dyadic depths `..., d/4, d/2, d` ending at `depth` (at least 3 when
/// `depth >= 3`).
pub fn nested_depths(depth: i32) -> Vec<i32> {
    let mut ds = vec![depth];
    let mut d = depth;
    while d > 1 && ds.len() < 4 {
        d = (d + 1) / 2;
        if d == *ds.last().unwrap() {
            break;
        }
        ds.push(d);
    }
    ds.reverse();
    ds
}
