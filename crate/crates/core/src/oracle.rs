//! Brute-force reference implementations.
//!
//! Everything here is deliberately naive and independent of the exact
//! engine: direct evaluation of the sup-inf definition, layer-cake
//! reconstruction from symmetrized superlevel sets, `O(N M)` conjugates and
//! adaptive quadrature. Only compiled with the `oracle` feature.

use rayon::prelude::*;

use crate::convex1d::PlConvex1D;
use crate::error::{Error, Result};
use crate::gridnd::Direction;
use crate::quad;

/// Samples on a uniform grid of the line.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn1D {
    pub xs: Vec<f64>,
    pub vals: Vec<f64>,
}

impl SampledFn1D {
    /// `n` samples of `f` on `[lo, hi]`.
    pub fn new<F: Fn(f64) -> f64>(lo: f64, hi: f64, n: usize, f: F) -> Result<Self> {
        if n < 2 || !(lo < hi) {
            return Err(Error::Argument(format!("bad sampling [{lo}, {hi}] with {n} points")));
        }
        let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let vals = xs.iter().map(|&x| f(x)).collect();
        Self::from_values(xs, vals)
    }

    pub fn from_values(xs: Vec<f64>, vals: Vec<f64>) -> Result<Self> {
        if xs.len() != vals.len() || xs.len() < 2 {
            return Err(Error::Malformed("need at least two abscissae, one value each".into()));
        }
        let h = xs[1] - xs[0];
        if !(h > 0.0) || xs.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
            return Err(Error::Malformed("abscissae are not uniformly increasing".into()));
        }
        if vals.iter().filter(|v| v.is_finite()).count() < 2 || vals.iter().any(|v| v.is_nan()) {
            return Err(Error::Malformed("need at least two finite values and no NaN".into()));
        }
        Ok(SampledFn1D { xs, vals })
    }

    pub fn step(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    /// Linear interpolation; `+inf` outside the grid or next to `+inf`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let r = (x - self.xs[0]) / self.step();
        if !(r >= 0.0 && r <= (n - 1) as f64) {
            return f64::INFINITY;
        }
        let i = (r.floor() as usize).min(n - 2);
        let t = r - i as f64;
        lerp(self.vals[i], self.vals[i + 1], t)
    }
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t == 0.0 {
        a
    } else if t == 1.0 {
        b
    } else if a.is_finite() && b.is_finite() {
        a + t * (b - a)
    } else {
        f64::INFINITY
    }
}

/// Samples on a uniform tensor grid of the plane, row-major (`y` fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn2D {
    pub origin: [f64; 2],
    pub spacing: [f64; 2],
    pub shape: [usize; 2],
    pub vals: Vec<f64>,
}

impl SampledFn2D {
    pub fn new<F: Fn(f64, f64) -> f64 + Sync>(
        origin: [f64; 2],
        spacing: [f64; 2],
        shape: [usize; 2],
        f: F,
    ) -> Result<Self> {
        if spacing.iter().any(|h| !(*h > 0.0)) || shape.iter().any(|&n| n < 2) {
            return Err(Error::Argument("bad 2-D sampling grid".into()));
        }
        let vals: Vec<f64> = (0..shape[0] * shape[1])
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / shape[1], k % shape[1]);
                f(origin[0] + i as f64 * spacing[0], origin[1] + j as f64 * spacing[1])
            })
            .collect();
        if !vals.iter().any(|v| v.is_finite()) || vals.iter().any(|v| v.is_nan()) {
            return Err(Error::Malformed("need a finite value and no NaN".into()));
        }
        Ok(SampledFn2D { origin, spacing, shape, vals })
    }

    pub fn point(&self, k: usize) -> [f64; 2] {
        let (i, j) = (k / self.shape[1], k % self.shape[1]);
        [self.origin[0] + i as f64 * self.spacing[0], self.origin[1] + j as f64 * self.spacing[1]]
    }

    /// Bilinear interpolation; `+inf` outside the grid or next to `+inf`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let loc = |v: f64, a: usize| -> Option<(usize, f64)> {
            let n = self.shape[a];
            let r = (v - self.origin[a]) / self.spacing[a];
            if !(r >= 0.0 && r <= (n - 1) as f64) {
                return None;
            }
            let i = (r.floor() as usize).min(n - 2);
            Some((i, r - i as f64))
        };
        let (Some((i, s)), Some((j, t))) = (loc(x, 0), loc(y, 1)) else { return f64::INFINITY };
        let g = |a: usize, b: usize| self.vals[(i + a) * self.shape[1] + j + b];
        lerp(lerp(g(0, 0), g(0, 1), t), lerp(g(1, 0), g(1, 1), t), s)
    }
}

/// How the layer-cake thresholds are spread over `(0, max F]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Thresholds {
    /// Equal steps in value.
    Uniform,
    /// Equal steps in `log F` from `floor * max F` up to `max F`, plus one
    /// bottom layer `(0, floor * max F]`.
    Log { floor: f64 },
}

/// Layer `(weight, threshold)` pairs: `Σ weight * 1[F > threshold]` rebuilds `F`
/// to within half a layer.
fn layers(max: f64, levels: usize, kind: Thresholds) -> Vec<(f64, f64)> {
    match kind {
        Thresholds::Uniform => {
            let d = max / levels as f64;
            (0..levels).map(|j| (d, (j as f64 + 0.5) * d)).collect()
        }
        Thresholds::Log { floor } => {
            let mut edges = vec![0.0];
            for j in 0..levels {
                edges.push(max * floor.powf((levels - 1 - j) as f64 / (levels - 1).max(1) as f64));
            }
            edges.windows(2).map(|w| (w[1] - w[0], 0.5 * (w[0] + w[1]))).collect()
        }
    }
}

/// Length of `{s : F(s) > t}` for the linear interpolant of samples spaced `h`.
fn superlevel_length(vals: &[f64], h: f64, t: f64) -> f64 {
    let mut total = 0.0;
    for w in vals.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if lo > t {
            total += h;
        } else if hi > t {
            total += h * (hi - t) / (hi - lo);
        }
    }
    total
}

/// Measure of `{F > t}` for the linear interpolant of `f`.
pub fn superlevel_measure(f: &SampledFn1D, t: f64) -> f64 {
    superlevel_length(&f.vals, f.step(), t)
}

fn check_nonnegative(vals: &[f64]) -> Result<f64> {
    if vals.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Argument("layer-cake input must be finite and nonnegative".into()));
    }
    Ok(vals.iter().copied().fold(0.0, f64::max))
}

/// Level-set symmetrization on the line: every superlevel set `{F > t}` is
/// replaced by the interval centred at 0 of the same length and `F` is
/// rebuilt layer by layer. The output is sampled on the input abscissae.
pub fn levelset_symmetrize_1d(f: &SampledFn1D, levels: usize, kind: Thresholds) -> Result<SampledFn1D> {
    if levels < 2 {
        return Err(Error::Argument("need at least 2 levels".into()));
    }
    let max = check_nonnegative(&f.vals)?;
    let lay = layers(max, levels, kind);
    let slack = 1e-12 * (f.xs[f.xs.len() - 1] - f.xs[0]);
    let half: Vec<f64> = lay.iter().map(|&(_, t)| 0.5 * superlevel_measure(f, t) + slack).collect();
    let vals = f
        .xs
        .iter()
        .map(|&x| lay.iter().zip(&half).filter(|(_, &r)| x.abs() <= r && r > slack).map(|(&(w, _), _)| w).sum())
        .collect();
    SampledFn1D::from_values(f.xs.clone(), vals)
}

/// Level-set symmetrization in the plane about `u⊥`, sampled on the input grid.
///
/// For each node the line through it parallel to `u` is sampled with spacing
/// `line_step` and the superlevel lengths along it are measured directly.
pub fn levelset_symmetrize_2d(
    f: &SampledFn2D,
    u: &Direction,
    levels: usize,
    line_step: f64,
) -> Result<SampledFn2D> {
    if levels < 2 || !(line_step > 0.0) || u.dim() != 2 {
        return Err(Error::Argument("need 2-D direction, levels >= 2, positive step".into()));
    }
    let max = check_nonnegative(&f.vals)?;
    let lay = layers(max, levels, Thresholds::Uniform);
    let [ux, uy] = [u.components()[0], u.components()[1]];
    let ends = [
        f.origin,
        [f.origin[0] + (f.shape[0] - 1) as f64 * f.spacing[0], f.origin[1] + (f.shape[1] - 1) as f64 * f.spacing[1]],
    ];
    let reach = ends.iter().flat_map(|a| ends.iter().map(move |b| (a[0], b[1]))).map(|(x, y)| x.hypot(y)).fold(0.0, f64::max);
    let m = (reach / line_step).ceil() as usize;
    let vals: Vec<f64> = (0..f.vals.len())
        .into_par_iter()
        .map(|k| {
            let p = f.point(k);
            let a = p[0] * ux + p[1] * uy;
            let x0 = [p[0] - a * ux, p[1] - a * uy];
            let line: Vec<f64> = (0..=2 * m)
                .map(|i| {
                    let s = (i as f64 - m as f64) * line_step;
                    let v = f.eval(x0[0] + s * ux, x0[1] + s * uy);
                    if v.is_finite() { v } else { 0.0 }
                })
                .collect();
            // number of layers whose symmetrized superlevel set contains p
            let inside = |j: usize| superlevel_length(&line, line_step, lay[j].1) > 2.0 * a.abs();
            let (mut lo, mut hi) = (0usize, lay.len());
            while lo < hi {
                let mid = (lo + hi) / 2;
                if inside(mid) { lo = mid + 1 } else { hi = mid }
            }
            lay[..lo].iter().map(|&(w, _)| w).sum()
        })
        .collect();
    Ok(SampledFn2D { origin: f.origin, spacing: f.spacing, shape: f.shape, vals })
}

/// `Lf(p) = max_i (p x_i - f(x_i))` on `n` uniform points of `[p_lo, p_hi]`.
pub fn legendre_direct(f: &SampledFn1D, p_lo: f64, p_hi: f64, n: usize) -> Result<SampledFn1D> {
    SampledFn1D::new(p_lo, p_hi, n, |p| {
        f.xs.iter()
            .zip(&f.vals)
            .filter(|(_, v)| v.is_finite())
            .map(|(x, v)| p * x - v)
            .fold(f64::NEG_INFINITY, f64::max)
    })
}

/// Brute-force 2-D discrete conjugate over all finite samples.
pub fn legendre_direct_2d(
    f: &SampledFn2D,
    origin: [f64; 2],
    spacing: [f64; 2],
    shape: [usize; 2],
) -> Result<SampledFn2D> {
    let pts: Vec<([f64; 2], f64)> = (0..f.vals.len())
        .filter(|&k| f.vals[k].is_finite())
        .map(|k| (f.point(k), f.vals[k]))
        .collect();
    SampledFn2D::new(origin, spacing, shape, |p, q| {
        pts.iter().map(|(x, v)| p * x[0] + q * x[1] - v).fold(f64::NEG_INFINITY, f64::max)
    })
}

/// `∫ exp(-f)` over `window` by adaptive Simpson.
pub fn quad_exp_integral<F: Fn(f64) -> f64>(f: F, window: (f64, f64), tol: f64) -> Result<f64> {
    quad::adaptive_simpson(|x| (-f(x)).exp(), window.0, window.1, tol)
}

/// Direct evaluation of `sup_λ inf_y [λ f(y) + (1 - λ) f(y - 2x)]` with `λ` on a
/// uniform grid of `[0, 1]` (then refined by golden section around the best
/// grid point) and `y` on `t_grid` points spanning
/// `c + x ± t_span`, where `c` is the midpoint of the minimizer interval.
///
/// With an odd `t_grid`, `x = 0` samples `y = c` and returns `min f` exactly.
pub fn supinf_oracle(f: &PlConvex1D, x: f64, lambda_grid: usize, t_grid: usize, t_span: f64) -> Result<f64> {
    if lambda_grid < 2 || t_grid < 2 || !(t_span > 0.0) {
        return Err(Error::Argument("need lambda_grid >= 2, t_grid >= 2, t_span > 0".into()));
    }
    let am = f.argmin_interval()?;
    let c = 0.5 * (am.mu + am.nu) + x;
    let mid = (t_grid - 1) as f64 / 2.0;
    let ys: Vec<f64> = (0..t_grid).map(|k| c + t_span * (k as f64 - mid) / mid).collect();
    let a: Vec<f64> = ys.iter().map(|&y| f.eval(y)).collect();
    let b: Vec<f64> = ys.iter().map(|&y| f.eval(y - 2.0 * x)).collect();
    // inner infimum; concave in λ as a minimum of affine functions
    let inner = |lam: f64| -> f64 {
        a.iter()
            .zip(&b)
            .map(|(&fa, &fb)| if fa.is_finite() && fb.is_finite() { fa + (1.0 - lam) * (fb - fa) } else { f64::INFINITY })
            .fold(f64::INFINITY, f64::min)
    };
    let step = 1.0 / (lambda_grid - 1) as f64;
    let coarse: Vec<f64> = (0..lambda_grid).into_par_iter().map(|i| inner(i as f64 * step)).collect();
    let best = (0..lambda_grid).max_by(|&i, &j| coarse[i].total_cmp(&coarse[j])).unwrap_or(0);
    let (mut lo, mut hi) = ((best as f64 - 1.0).max(0.0) * step, ((best + 1) as f64 * step).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut top = coarse[best];
    for _ in 0..60 {
        let (c, d) = (hi - g * (hi - lo), lo + g * (hi - lo));
        let (fc, fd) = (inner(c), inner(d));
        top = top.max(fc).max(fd);
        if fc >= fd { hi = d } else { lo = c }
    }
    Ok(top)
}

/// `min_y ½ f(y) + ½ f(y - 2x)` over `n` uniform `y` in `window`.
pub fn amk_direct(f: &PlConvex1D, x: f64, window: (f64, f64), n: usize) -> f64 {
    grid_min(window, n, |y| 0.5 * f.eval(y) + 0.5 * f.eval(y - 2.0 * x))
}

/// `min_y f(y) + g(x - y)` over `n` uniform `y` in `window`.
pub fn inf_convolve_direct(f: &PlConvex1D, g: &PlConvex1D, x: f64, window: (f64, f64), n: usize) -> f64 {
    grid_min(window, n, |y| f.eval(y) + g.eval(x - y))
}

fn grid_min<F: Fn(f64) -> f64>(window: (f64, f64), n: usize, h: F) -> f64 {
    let (lo, hi) = window;
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n.max(2) - 1) as f64)
        .map(h)
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex1d::Tail;

    #[test]
    fn layer_cake_of_symmetric_function_is_itself() {
        let f = SampledFn1D::new(-8.0, 8.0, 1601, |x: f64| (-x.abs()).exp()).unwrap();
        let s = levelset_symmetrize_1d(&f, 512, Thresholds::Uniform).unwrap();
        let err = f.vals.iter().zip(&s.vals).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1.0 / 512.0, "{err}");
        let g = levelset_symmetrize_1d(&f, 256, Thresholds::Log { floor: 1e-6 }).unwrap();
        let rel = f.vals.iter().zip(&g.vals).map(|(a, b)| (a - b).abs() / (a + 1e-6)).fold(0.0, f64::max);
        assert!(rel < 0.06, "{rel}");
    }

    #[test]
    fn two_slope_layer_cake() {
        let f = SampledFn1D::new(-8.0, 8.0, 4097, |x: f64| (-(-2.0 * x).max(x)).exp()).unwrap();
        let s = levelset_symmetrize_1d(&f, 512, Thresholds::Uniform).unwrap();
        for (x, v) in s.xs.iter().zip(&s.vals) {
            assert!((v - (-4.0 * x.abs() / 3.0).exp()).abs() < 3e-3);
        }
    }

    #[test]
    fn conjugates() {
        let f = SampledFn1D::new(-5.0, 5.0, 2001, |x| 0.5 * x * x).unwrap();
        let lf = legendre_direct(&f, -3.0, 3.0, 61).unwrap();
        for (p, v) in lf.xs.iter().zip(&lf.vals) {
            assert!((v - 0.5 * p * p).abs() <= f.step() * f.step());
        }
        let ind = SampledFn1D::new(-1.0, 1.0, 201, |_| 0.0).unwrap();
        let l = legendre_direct(&ind, -2.0, 2.0, 41).unwrap();
        assert!(l.xs.iter().zip(&l.vals).all(|(p, v)| (v - p.abs()).abs() < 1e-12));
    }

    #[test]
    fn quadrature() {
        let g = quad_exp_integral(|x| 0.5 * x * x, (-40.0, 40.0), 1e-10).unwrap();
        assert!((g - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn supinf_examples() {
        let two = PlConvex1D::new(vec![0.0], vec![0.0], Tail::Slope(-2.0), Tail::Slope(1.0)).unwrap();
        let v = supinf_oracle(&two, 1.0, 601, 2001, 4.0).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 3.0 * 8.0 / 2000.0);
        let shifted = two.translate(0.37, 0.25);
        assert_eq!(supinf_oracle(&shifted, 0.0, 11, 101, 2.0).unwrap(), 0.25);
    }
}
