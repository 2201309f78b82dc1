//! One-dimensional sections `t -> F(x' + t u)` and their convex fits.

use super::{Direction, GridFn, Interp};
use crate::convex1d::{PlConvex1D, Tail};
use crate::error::{Error, Result};

/// Uniform parameter grid `start + k * step`, `k < count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TGrid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl TGrid {
    /// `2m + 1` points symmetric about 0.
    pub fn symmetric(half: f64, step: f64) -> Self {
        let m = (half / step).ceil() as usize;
        TGrid { start: -(m as f64) * step, step, count: 2 * m + 1 }
    }

    pub fn at(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }
}

/// Samples of `F` along the line through `offset` in direction `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSection {
    pub offset: Vec<f64>,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

/// Tolerance for replacing a nearly convex section by its convex envelope:
/// the envelope may sit below the samples by at most
/// `abs + rel * max(range, scale)`, where `range` is the spread of finite
/// sample values. Runs of at most
/// `max_gap` infinite samples between finite ones are bridged by the
/// envelope; they appear where a line runs almost parallel to the staircase
/// edge of a rasterized domain. Samples above `ceiling` enter the envelope
/// but are not checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepairTol {
    pub abs: f64,
    pub rel: f64,
    pub max_gap: usize,
    pub ceiling: f64,
    pub scale: f64,
}

impl Default for RepairTol {
    fn default() -> Self {
        RepairTol { abs: 1e-6, rel: 1e-4, max_gap: 0, ceiling: f64::INFINITY, scale: 0.0 }
    }
}

/// Section by multilinear interpolation.
pub fn extract_line(f: &GridFn, u: &Direction, x_prime: &[f64], t: TGrid) -> Result<LineSection> {
    extract_line_with(f, u, x_prime, t, Interp::Linear)
}

pub fn extract_line_with(
    f: &GridFn,
    u: &Direction,
    x_prime: &[f64],
    t: TGrid,
    interp: Interp,
) -> Result<LineSection> {
    let d = f.dim();
    if u.dim() != d || x_prime.len() != d {
        return Err(Error::Argument(format!(
            "direction/offset dimension does not match the {d}-D grid"
        )));
    }
    let uc = u.components();
    let dot: f64 = uc.iter().zip(x_prime).map(|(a, b)| a * b).sum();
    let scale = 1f64.max(x_prime.iter().map(|x| x.abs()).fold(0.0, f64::max));
    if dot.abs() > 1e-9 * scale {
        return Err(Error::Argument(format!("offset is not orthogonal to u (dot {dot:.3e})")));
    }
    Ok(sample_line(f, uc, x_prime, t, interp))
}

pub(crate) fn sample_line(f: &GridFn, u: &[f64], x0: &[f64], t: TGrid, interp: Interp) -> LineSection {
    let d = u.len();
    let mut p = vec![0.0; d];
    let mut ts = Vec::with_capacity(t.count);
    let mut vals = Vec::with_capacity(t.count);
    for k in 0..t.count {
        let tk = t.at(k);
        for a in 0..d {
            p[a] = x0[a] + tk * u[a];
        }
        ts.push(tk);
        vals.push(f.eval(&p, interp));
    }
    LineSection { offset: x0.to_vec(), t: ts, values: vals }
}

impl LineSection {
    /// Exact PL fit: the lower convex envelope of the finite samples, with
    /// walls beyond the first and last finite sample. `None` when the line
    /// misses the finite region.
    pub fn fit(&self, tol: RepairTol) -> Result<Option<PlConvex1D>> {
        let label = self.offset.iter().map(|x| x * x).sum::<f64>().sqrt();
        let Some(first) = self.values.iter().position(|v| v.is_finite()) else {
            return Ok(None);
        };
        let last = self.values.iter().rposition(|v| v.is_finite()).unwrap();
        let mut hole = 0;
        for v in &self.values[first..=last] {
            if v.is_finite() {
                hole = 0;
            } else {
                hole += 1;
                if hole > tol.max_gap {
                    return Err(Error::NonConvexSection { offset: label, gap: f64::INFINITY, allowed: 0.0 });
                }
            }
        }
        let (ts, vs): (Vec<f64>, Vec<f64>) = self.t[first..=last]
            .iter()
            .zip(&self.values[first..=last])
            .filter(|(_, v)| v.is_finite())
            .map(|(t, v)| (*t, *v))
            .unzip();
        let (ts, vs) = (&ts[..], &vs[..]);
        let hull = lower_hull(ts, vs);
        let (lo, hi) = vs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let allowed = tol.abs + tol.rel * (hi - lo).max(tol.scale);
        let mut gap: f64 = 0.0;
        let mut seg = 0;
        for (k, (&t, &v)) in ts.iter().zip(vs).enumerate() {
            while seg + 1 < hull.len() && hull[seg + 1] < k {
                seg += 1;
            }
            if seg + 1 < hull.len() && v <= tol.ceiling {
                let (a, b) = (hull[seg], hull[seg + 1]);
                let r = (t - ts[a]) / (ts[b] - ts[a]);
                gap = gap.max(v - (vs[a] + r * (vs[b] - vs[a])));
            }
        }
        if gap > allowed {
            return Err(Error::NonConvexSection { offset: label, gap, allowed });
        }
        let pts: Vec<(f64, f64)> = hull.iter().map(|&k| (ts[k], vs[k])).collect();
        Ok(Some(PlConvex1D::from_points(&pts, Tail::Wall, Tail::Wall)?))
    }
}

/// Indices of the lower convex hull of points sorted by abscissa.
fn lower_hull(ts: &[f64], vs: &[f64]) -> Vec<usize> {
    let mut h: Vec<usize> = Vec::with_capacity(ts.len());
    for k in 0..ts.len() {
        while h.len() >= 2 {
            let (a, b) = (h[h.len() - 2], h[h.len() - 1]);
            let cross = (ts[b] - ts[a]) * (vs[k] - vs[a]) - (vs[b] - vs[a]) * (ts[k] - ts[a]);
            if cross <= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(k);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridnd::GridSpec;

    fn quad() -> GridFn {
        GridFn::from_fn(GridSpec::square(2, 4.0, 81).unwrap(), |p| 0.5 * (p[0] * p[0] + p[1] * p[1]))
            .unwrap()
    }

    #[test]
    fn axis_sections() {
        let g = quad();
        let t = TGrid::symmetric(2.0, 0.05);
        let s = extract_line(&g, &Direction::axis(2, 0).unwrap(), &[0.0, 1.0], t).unwrap();
        for (tk, v) in s.t.iter().zip(&s.values) {
            assert!((v - (0.5 * tk * tk + 0.5)).abs() < 2e-3);
        }
        let s = extract_line(&g, &Direction::axis(2, 1).unwrap(), &[2.0, 0.0], t).unwrap();
        for (tk, v) in s.t.iter().zip(&s.values) {
            assert!((v - (0.5 * tk * tk + 2.0)).abs() < 2e-3);
        }
        assert!(extract_line(&g, &Direction::axis(2, 1).unwrap(), &[2.0, 1.0], t).is_err());
    }

    #[test]
    fn masked_line_is_all_infinite() {
        let g = GridFn::from_fn(GridSpec::square(2, 2.0, 21).unwrap(), |p| {
            if p[1] > 0.5 { f64::INFINITY } else { p[0].abs() }
        })
        .unwrap();
        let s = extract_line(&g, &Direction::axis(2, 0).unwrap(), &[0.0, 1.0], TGrid::symmetric(1.0, 0.1))
            .unwrap();
        assert!(s.values.iter().all(|v| v.is_infinite()));
        assert_eq!(s.fit(RepairTol::default()).unwrap(), None);
    }

    #[test]
    fn fit_repairs_small_and_rejects_large() {
        let t: Vec<f64> = (0..5).map(|k| k as f64).collect();
        let mut sec = LineSection { offset: vec![0.0], t, values: vec![4.0, 1.0, 0.0, 1.0, 4.0] };
        let fit = sec.fit(RepairTol::default()).unwrap().unwrap();
        assert_eq!(fit.breakpoints(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
        sec.values[2] = 1.0 + 1e-7;
        let fit = sec.fit(RepairTol::default()).unwrap().unwrap();
        assert_eq!(fit.len(), 4);
        sec.values[2] += 0.5;
        assert!(matches!(sec.fit(RepairTol::default()), Err(Error::NonConvexSection { .. })));
        sec.values = vec![4.0, f64::INFINITY, 0.0, 1.0, 4.0];
        assert!(sec.fit(RepairTol::default()).is_err());
        let bridged = sec.fit(RepairTol { max_gap: 1, ..Default::default() }).unwrap().unwrap();
        assert_eq!(bridged.eval(1.0), 2.0);
    }
}
