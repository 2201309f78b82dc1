//! Infimal convolution and the symmetrization built on it.

use super::{slopes_equal, PlConvex1D, Tail};
use crate::error::{Error, Result};

fn tail_slope(t: Tail, wall: f64) -> f64 {
    match t {
        Tail::Slope(m) => m,
        Tail::Wall => wall,
    }
}

/// Leftmost breakpoint whose right slope is at least `sigma`; `f(x) - sigma x`
/// is minimized there.
fn anchor(f: &PlConvex1D, sigma: f64) -> usize {
    (0..f.len()).find(|&i| f.slope_after(i) >= sigma).unwrap_or(f.len() - 1)
}

/// Finite edges `(dx, dy)` of `f` on one side of breakpoint `i`.
fn edges_right(f: &PlConvex1D, i: usize) -> Vec<(f64, f64, f64)> {
    (i..f.len() - 1)
        .map(|j| {
            let dx = f.breakpoints[j + 1] - f.breakpoints[j];
            (f.chord_slope(j), dx, f.values[j + 1] - f.values[j])
        })
        .collect()
}

fn edges_left(f: &PlConvex1D, i: usize) -> Vec<(f64, f64, f64)> {
    (0..i)
        .rev()
        .map(|j| {
            let dx = f.breakpoints[j + 1] - f.breakpoints[j];
            (f.chord_slope(j), dx, f.values[j + 1] - f.values[j])
        })
        .collect()
}

/// Exact `(f □ g)(x) = inf_y f(y) + g(x - y)` for convex PL inputs.
///
/// The epigraph of the result is the Minkowski sum of the two epigraphs, so
/// the edges of both functions are merged by slope. Edges steeper than the
/// shallowest affine tail on their side are swallowed by that tail.
pub fn inf_convolve(f: &PlConvex1D, g: &PlConvex1D) -> Result<PlConvex1D> {
    f.ensure_valid()?;
    g.ensure_valid()?;
    let a = tail_slope(f.left, f64::NEG_INFINITY).max(tail_slope(g.left, f64::NEG_INFINITY));
    let b = tail_slope(f.right, f64::INFINITY).min(tail_slope(g.right, f64::INFINITY));
    if a > b {
        return Err(Error::Argument(format!(
            "infimal convolution is -inf: left slope {a} exceeds right slope {b}"
        )));
    }
    let sigma = 0f64.clamp(a, b);
    let (i, j) = (anchor(f, sigma), anchor(g, sigma));
    let x0 = f.breakpoints[i] + g.breakpoints[j];
    let v0 = f.values[i] + g.values[j];

    let mut right = edges_right(f, i);
    right.extend(edges_right(g, j));
    right.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut left = edges_left(f, i);
    left.extend(edges_left(g, j));
    left.sort_by(|p, q| q.0.total_cmp(&p.0));

    let mut pts = vec![(x0, v0)];
    let (mut x, mut v) = (x0, v0);
    for &(m, dx, dy) in &left {
        if m <= a || slopes_equal(m, a) {
            break;
        }
        x -= dx;
        v -= dy;
        pts.push((x, v));
    }
    pts.reverse();
    let (mut x, mut v) = (x0, v0);
    for &(m, dx, dy) in &right {
        if m >= b || slopes_equal(m, b) {
            break;
        }
        x += dx;
        v += dy;
        pts.push((x, v));
    }
    let tail = |s: f64| if s.is_finite() { Tail::Slope(s) } else { Tail::Wall };
    let out = PlConvex1D::from_points(&pts, tail(a), tail(b))?;
    Ok(out.simplify())
}

impl PlConvex1D {
    /// `x -> ½ (f □ f̌)(2x)` where `f̌(y) = f(-y)`.
    pub fn symmetrize_amk(&self) -> Result<PlConvex1D> {
        let h = inf_convolve(self, &self.reflect())?;
        Ok(PlConvex1D {
            breakpoints: h.breakpoints.iter().map(|x| 0.5 * x).collect(),
            values: h.values.iter().map(|v| 0.5 * v).collect(),
            left: h.left,
            right: h.right,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(f: &PlConvex1D, g: &PlConvex1D, x: f64) -> f64 {
        (0..=200_000)
            .map(|k| -10.0 + k as f64 * 1e-4)
            .map(|y| f.eval(y) + g.eval(x - y))
            .fold(f64::INFINITY, f64::min)
    }

    fn pl(bp: f64, l: f64, r: f64) -> PlConvex1D {
        PlConvex1D::new(vec![bp], vec![0.0], Tail::Slope(l), Tail::Slope(r)).unwrap()
    }

    #[test]
    fn abs_is_idempotent() {
        let a = PlConvex1D::abs(0.0, 1.0);
        assert_eq!(inf_convolve(&a, &a).unwrap(), a);
    }

    #[test]
    fn distance_to_interval() {
        let a = PlConvex1D::abs(0.0, 1.0);
        let ind = PlConvex1D::indicator(-1.0, 1.0).unwrap();
        let h = inf_convolve(&a, &ind).unwrap();
        for x in [-3.0, -1.0, -0.3, 0.0, 0.8, 2.5] {
            assert_eq!(h.eval(x), (x.abs() - 1.0).max(0.0));
        }
    }

    #[test]
    fn two_slope_pair_matches_brute_force() {
        let f = pl(0.0, -1.0, 2.0);
        let g = pl(0.0, -3.0, 1.0);
        let h = inf_convolve(&f, &g).unwrap();
        assert_eq!(h.eval(0.0), 0.0);
        for x in [-2.0, -0.5, 0.5, 1.7] {
            assert!((h.eval(x) - brute(&f, &g, x)).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn walls_and_edges() {
        let f = PlConvex1D::new(
            vec![-1.0, 0.0, 2.0],
            vec![1.0, 0.0, 1.0],
            Tail::Wall,
            Tail::Slope(3.0),
        )
        .unwrap();
        let g = PlConvex1D::new(vec![0.0, 1.0], vec![0.5, 0.0], Tail::Slope(-2.0), Tail::Wall).unwrap();
        let h = inf_convolve(&f, &g).unwrap();
        assert!(h.is_valid());
        for x in [-4.0, -1.2, 0.0, 0.9, 2.2, 4.0] {
            assert!((h.eval(x) - brute(&f, &g, x)).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn amk_examples() {
        assert_eq!(PlConvex1D::abs(0.0, 1.0).symmetrize_amk().unwrap(), PlConvex1D::abs(0.0, 1.0));
        let two = pl(0.0, -2.0, 1.0);
        let shifted = pl(1.0, -2.0, 1.0);
        for f in [two, shifted] {
            let s = f.symmetrize_amk().unwrap();
            for x in [-2.0, -0.5, 0.0, 1.0, 3.0] {
                let direct = (0..=100_000)
                    .map(|k| -10.0 + k as f64 * 2e-4)
                    .map(|y| 0.5 * f.eval(y) + 0.5 * f.eval(y - 2.0 * x))
                    .fold(f64::INFINITY, f64::min);
                assert!((s.eval(x) - direct).abs() < 1e-9);
                assert!((s.eval(x) - x.abs()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_invalid() {
        let bad = PlConvex1D::new(vec![0.0], vec![0.0], Tail::Slope(0.0), Tail::Slope(1.0)).unwrap();
        assert!(inf_convolve(&bad, &PlConvex1D::abs(0.0, 1.0)).is_err());
    }

    #[test]
    fn flat_edges_next_to_walls_survive() {
        let ind = PlConvex1D::indicator(0.0, 1.5).unwrap();
        let s = ind.symmetrize_amk().unwrap();
        assert_eq!(s, PlConvex1D::indicator(-0.75, 0.75).unwrap());
        let h = inf_convolve(&ind, &PlConvex1D::indicator(-1.0, 0.0).unwrap()).unwrap();
        assert_eq!(h.domain(), (-1.0, 1.5));
    }
}
