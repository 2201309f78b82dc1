//! Adaptive piecewise-linear interpolation of convex functions given as closures.

use super::{PlConvex1D, Tail};
use crate::error::{Error, Result};

/// Controls for [`sample_convex`].
#[derive(Debug, Clone)]
pub struct SampleOptions {
    /// Sup-norm target for the interpolation error on the window.
    pub tol: f64,
    /// Abscissae that must be breakpoints (kinks, curvature jumps).
    pub anchors: Vec<f64>,
    /// Uniform subdivisions before refinement starts.
    pub initial: usize,
    /// Hard cap on the number of breakpoints.
    pub max_points: usize,
    /// Walls at the window ends instead of tangent tails.
    pub walls: bool,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { tol: 1e-6, anchors: Vec::new(), initial: 16, max_points: 1 << 20, walls: false }
    }
}

/// Interpolates `f` on `[lo, hi]`, bisecting any cell whose midpoint misses the
/// chord by more than half the tolerance. Outside the window the result is
/// continued by tangent lines (or walls).
pub fn sample_convex<F: Fn(f64) -> f64>(
    f: F,
    window: (f64, f64),
    opts: &SampleOptions,
) -> Result<PlConvex1D> {
    let (lo, hi) = window;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::Argument(format!("bad sampling window [{lo}, {hi}]")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Argument("sampling tolerance must be positive".into()));
    }
    let n0 = opts.initial.max(1);
    let mut xs: Vec<f64> = (0..=n0).map(|i| lo + (hi - lo) * i as f64 / n0 as f64).collect();
    xs.extend(opts.anchors.iter().copied().filter(|&a| a > lo && a < hi));
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Argument(format!("function is not finite at {x}")))
        }
    };
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(xs.len());
    for &x in &xs {
        pts.push((x, eval(x)?));
    }
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len() * 4);
    // Depth-first refinement keeps the output sorted.
    for w in pts.windows(2) {
        let mut stack = vec![(w[0], w[1])];
        while let Some((a, b)) = stack.pop() {
            let xm = 0.5 * (a.0 + b.0);
            let ym = eval(xm)?;
            let gap = 0.5 * (a.1 + b.1) - ym;
            if gap.abs() > 0.5 * opts.tol && xm > a.0 && xm < b.0 {
                if out.len() + stack.len() > opts.max_points {
                    return Err(Error::Argument(format!(
                        "sampling needs more than {} points",
                        opts.max_points
                    )));
                }
                stack.push(((xm, ym), b));
                stack.push((a, (xm, ym)));
            } else {
                out.push(a);
            }
        }
    }
    out.push(*pts.last().unwrap());

    let (left, right) = if opts.walls {
        (Tail::Wall, Tail::Wall)
    } else {
        let d = 1e-6 * (hi - lo);
        let k = out.len();
        let first = (out[1].1 - out[0].1) / (out[1].0 - out[0].0);
        let last = (out[k - 1].1 - out[k - 2].1) / (out[k - 1].0 - out[k - 2].0);
        let ml = ((eval(lo + d)? - eval(lo - d)?) / (2.0 * d)).min(first);
        let mr = ((eval(hi + d)? - eval(hi - d)?) / (2.0 * d)).max(last);
        (Tail::Slope(ml), Tail::Slope(mr))
    };
    PlConvex1D::from_points(&out, left, right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_meets_tolerance() {
        let opts = SampleOptions { tol: 1e-6, ..Default::default() };
        let p = sample_convex(|x| 0.5 * x * x, (-6.0, 6.0), &opts).unwrap();
        assert!(p.is_valid());
        let worst = (0..=12_000)
            .map(|i| -6.0 + i as f64 * 1e-3)
            .map(|x| (p.eval(x) - 0.5 * x * x).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-6, "{worst}");
        assert!(matches!(p.left(), Tail::Slope(m) if (m + 6.0).abs() < 1e-6));
    }

    #[test]
    fn anchors_become_breakpoints() {
        let opts = SampleOptions { anchors: vec![0.3], ..Default::default() };
        let p = sample_convex(|x| (x - 0.3).abs(), (-1.0, 1.0), &opts).unwrap();
        assert_eq!(p.eval(0.3), 0.0);
        assert!(p.breakpoints().contains(&0.3));
        assert!(matches!(p.right(), Tail::Slope(m) if (m - 1.0).abs() < 1e-8));
    }

    #[test]
    fn bad_window() {
        assert!(sample_convex(|x| x, (1.0, 1.0), &SampleOptions::default()).is_err());
    }
}
