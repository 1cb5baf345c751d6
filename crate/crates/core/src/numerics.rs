//! Fixed-order composite Simpson 3/8 quadrature and bracketed scalar root
//! finding.
//!
//! Everything here is deterministic: sample points are visited left to
//! right and accumulated in that order, so identical inputs give
//! bit-identical outputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed scan interval for one solver's free constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRange {
    pub lo: f64,
    pub hi: f64,
}

impl ScanRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }
}

/// Bracket scan ranges for the four closing conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRanges {
    /// Z2 half-length `R`, scanned linearly.
    pub r: ScanRange,
    /// `kappa0` of the Wang-Wang and quasi-Einstein families, scanned
    /// geometrically.
    pub kappa0: ScanRange,
    /// Soliton `kappa1`, scanned linearly on both sides of zero.
    pub kappa1: ScanRange,
    /// Half-width of the excluded neighbourhood of `kappa1 = 0`.
    pub kappa1_exclusion: f64,
}

impl Default for ScanRanges {
    fn default() -> Self {
        Self {
            r: ScanRange::new(0.05, 3.95),
            kappa0: ScanRange::new(1e-3, 1e3),
            kappa1: ScanRange::new(-8.0, 8.0),
            kappa1_exclusion: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericsConfig {
    /// Composite Simpson 3/8 sub-intervals; a positive multiple of 3.
    pub steps: usize,
    /// Final bracket width for the root finder.
    pub root_tol: f64,
    /// Bound on `|g(root)|`.
    pub residual_tol: f64,
    pub max_iter: usize,
    /// Number of grid points used for bracket discovery.
    pub scan_grid: usize,
    pub scan: ScanRanges,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            steps: 1500,
            root_tol: 1e-12,
            residual_tol: 1e-10,
            max_iter: 200,
            scan_grid: 512,
            scan: ScanRanges::default(),
        }
    }
}

impl NumericsConfig {
    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_steps(self.steps)?;
        if !(self.root_tol > 0.0) || !(self.residual_tol > 0.0) {
            return Err(Error::Config("root_tol and residual_tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        if self.scan_grid < 2 {
            return Err(Error::Config("scan_grid must be at least 2".into()));
        }
        let s = &self.scan;
        if !(s.r.lo < s.r.hi) || !(s.kappa1.lo < s.kappa1.hi) {
            return Err(Error::Config("scan ranges must satisfy lo < hi".into()));
        }
        if !(0.0 < s.kappa0.lo && s.kappa0.lo < s.kappa0.hi) {
            return Err(Error::Config("kappa0 scan range must satisfy 0 < lo < hi".into()));
        }
        Ok(())
    }
}

fn check_steps(steps: usize) -> Result<()> {
    if steps < 3 || !steps.is_multiple_of(3) {
        return Err(Error::Config(format!("quadrature steps must be a positive multiple of 3, got {steps}")));
    }
    Ok(())
}

/// Composite Simpson 3/8 rule on `[a, b]` with `steps` sub-intervals.
pub fn integrate_simpson38<F>(f: F, a: f64, b: f64, steps: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    check_steps(steps)?;
    if !(a <= b) {
        return Err(Error::Config(format!("integration bounds out of order: [{a}, {b}]")));
    }
    let h = (b - a) / steps as f64;
    let mut sum = 0.0;
    for i in 0..=steps {
        let x = if i == steps { b } else { a + i as f64 * h };
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::Numerical { abscissa: x });
        }
        let w = if i == 0 || i == steps {
            1.0
        } else if i % 3 == 0 {
            2.0
        } else {
            3.0
        };
        sum += w * fx;
    }
    Ok(sum * 3.0 * h / 8.0)
}

/// Simpson 3/8 value of `∫f` together with `∫|f|`, used to put closing
/// conditions on a scale-free footing.
pub(crate) fn integrate_with_magnitude<F>(f: F, a: f64, b: f64, steps: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    check_steps(steps)?;
    let h = (b - a) / steps as f64;
    let (mut sum, mut abs) = (0.0, 0.0);
    for i in 0..=steps {
        let x = if i == steps { b } else { a + i as f64 * h };
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::Numerical { abscissa: x });
        }
        let w = if i == 0 || i == steps {
            1.0
        } else if i % 3 == 0 {
            2.0
        } else {
            3.0
        };
        sum += w * fx;
        abs += w * fx.abs();
    }
    let scale = 3.0 * h / 8.0;
    Ok((sum * scale, abs * scale))
}

/// Running Simpson 3/8 integral of `f` from `a`, reported at every panel
/// boundary `a + 3k h`, `k = 0..=steps/3`.
pub(crate) fn cumulative_simpson38<F>(f: F, a: f64, b: f64, steps: usize) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> f64,
{
    check_steps(steps)?;
    let h = (b - a) / steps as f64;
    let node = |i: usize| if i == steps { b } else { a + i as f64 * h };
    let eval = |x: f64| {
        let fx = f(x);
        if fx.is_finite() {
            Ok(fx)
        } else {
            Err(Error::Numerical { abscissa: x })
        }
    };
    let mut out = Vec::with_capacity(steps / 3 + 1);
    let mut acc = 0.0;
    let mut left = eval(a)?;
    out.push((a, 0.0));
    for panel in 0..steps / 3 {
        let i = 3 * panel;
        let f1 = eval(node(i + 1))?;
        let f2 = eval(node(i + 2))?;
        let f3 = eval(node(i + 3))?;
        acc += 3.0 * h / 8.0 * (left + 3.0 * f1 + 3.0 * f2 + f3);
        out.push((node(i + 3), acc));
        left = f3;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanScale {
    Linear,
    Geometric,
}

/// Every adjacent pair of grid points on which `g` changes sign, in
/// ascending order. Non-finite samples never form a bracket.
pub fn scan_bracket<G>(g: G, lo: f64, hi: f64, grid: usize, scale: ScanScale) -> Vec<(f64, f64)>
where
    G: Fn(f64) -> f64,
{
    if !(lo < hi) || grid < 2 || (scale == ScanScale::Geometric && !(lo > 0.0)) {
        return Vec::new();
    }
    let last = grid - 1;
    let point = |i: usize| -> f64 {
        if i == 0 {
            return lo;
        }
        if i == last {
            return hi;
        }
        let t = i as f64 / last as f64;
        match scale {
            ScanScale::Linear => lo + t * (hi - lo),
            ScanScale::Geometric => lo * (hi / lo).powf(t),
        }
    };

    let mut brackets = Vec::new();
    let mut prev_x = point(0);
    let mut prev_g = g(prev_x);
    if prev_g == 0.0 {
        brackets.push((prev_x, prev_x));
    }
    for i in 1..grid {
        let x = point(i);
        let gx = g(x);
        if prev_g.is_finite() && gx.is_finite() && prev_g != 0.0 && (gx == 0.0 || (prev_g < 0.0) != (gx < 0.0)) {
            brackets.push((prev_x, x));
        }
        prev_x = x;
        prev_g = gx;
    }
    brackets
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// `g(x)` at the returned point.
    pub residual: f64,
    /// Width of the final bracket.
    pub width: f64,
    pub iterations: usize,
}

/// Bisection with safeguarded secant steps. Every iterate stays inside the
/// current bracket; a secant step that fails to halve the bracket is
/// followed by a plain bisection.
pub fn find_root_bracketed<G>(g: G, lo: f64, hi: f64, cfg: &NumericsConfig) -> Result<Root>
where
    G: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut ga = g(a);
    let mut gb = g(b);
    if !ga.is_finite() {
        return Err(Error::Numerical { abscissa: a });
    }
    if !gb.is_finite() {
        return Err(Error::Numerical { abscissa: b });
    }
    if ga == 0.0 {
        return Ok(Root { x: a, residual: 0.0, width: 0.0, iterations: 0 });
    }
    if gb == 0.0 {
        return Ok(Root { x: b, residual: 0.0, width: 0.0, iterations: 0 });
    }
    if (ga < 0.0) == (gb < 0.0) {
        return Err(Error::NoSignChange { lo: a, hi: b, g_lo: ga, g_hi: gb });
    }

    let mut force_bisect = false;
    for iter in 1..=cfg.max_iter {
        let width = b - a;
        let mid = a + 0.5 * width;
        let x = if force_bisect {
            mid
        } else {
            let s = b - gb * (b - a) / (gb - ga);
            // keep secant iterates strictly inside, away from the ends
            let margin = 0.01 * width;
            if s.is_finite() && s > a + margin && s < b - margin {
                s
            } else {
                mid
            }
        };
        if x <= a || x >= b {
            // bracket exhausted at floating-point resolution
            return finish(a, ga, b, gb, iter, cfg);
        }
        let gx = g(x);
        if !gx.is_finite() {
            return Err(Error::Numerical { abscissa: x });
        }
        if gx == 0.0 {
            return Ok(Root { x, residual: 0.0, width: 0.0, iterations: iter });
        }
        if (gx < 0.0) == (ga < 0.0) {
            a = x;
            ga = gx;
        } else {
            b = x;
            gb = gx;
        }
        force_bisect = (b - a) > 0.5 * width;
        if b - a <= cfg.root_tol {
            return finish(a, ga, b, gb, iter, cfg);
        }
    }
    Err(Error::NoConvergence { reason: format!("{} iterations exhausted", cfg.max_iter), lo: a, hi: b })
}

fn finish(a: f64, ga: f64, b: f64, gb: f64, iterations: usize, cfg: &NumericsConfig) -> Result<Root> {
    let (x, gx) = if ga.abs() <= gb.abs() { (a, ga) } else { (b, gb) };
    if gx.abs() > cfg.residual_tol {
        return Err(Error::NoConvergence { reason: format!("bracket collapsed with residual {gx:e}"), lo: a, hi: b });
    }
    Ok(Root { x, residual: gx, width: b - a, iterations })
}
