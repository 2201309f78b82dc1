//! Exact convex conjugate `Lf(p) = sup_x (p x - f(x))`.
//!
//! Breakpoints of `Lf` are the slopes of `f` and vice versa; an affine tail of
//! `f` becomes a wall of `Lf` and a wall becomes an affine tail.

use super::{slopes_equal, PlConvex1D, Tail};

impl PlConvex1D {
    /// Legendre transform about the origin.
    ///
    /// The input must be convex (not necessarily coercive). The output may
    /// fail the coercivity check, e.g. when `0` is on the boundary of the
    /// domain of `f`.
    pub fn legendre(&self) -> PlConvex1D {
        let bp = &self.breakpoints;
        let v = &self.values;
        let n = bp.len();
        let mut ps: Vec<f64> = Vec::with_capacity(n + 1);
        let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
        let mut push = |p: f64, val: f64| {
            if let Some(&last) = ps.last() {
                if slopes_equal(last, p) {
                    return;
                }
            }
            ps.push(p);
            vals.push(val);
        };
        if let Tail::Slope(a) = self.left {
            push(a, a * bp[0] - v[0]);
        }
        for j in 0..n - 1 {
            let m = self.chord_slope(j);
            push(m, m * bp[j] - v[j]);
        }
        if let Tail::Slope(b) = self.right {
            push(b, b * bp[n - 1] - v[n - 1]);
        }
        let left = match self.left {
            Tail::Wall => Tail::Slope(bp[0]),
            Tail::Slope(_) => Tail::Wall,
        };
        let right = match self.right {
            Tail::Wall => Tail::Slope(bp[n - 1]),
            Tail::Slope(_) => Tail::Wall,
        };
        if ps.is_empty() {
            // single point domain: Lf is affine with slope bp[0]
            return PlConvex1D { breakpoints: vec![0.0], values: vec![-v[0]], left, right };
        }
        PlConvex1D { breakpoints: ps, values: vals, left, right }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_and_indicator_are_dual() {
        let abs = PlConvex1D::abs(0.0, 1.0);
        let ind = PlConvex1D::indicator(-1.0, 1.0).unwrap();
        assert_eq!(abs.legendre(), ind);
        assert_eq!(ind.legendre(), abs);
    }

    #[test]
    fn three_piece() {
        // max(-x - 1, 0, 2x - 4), breakpoints at -1 and 2
        let f = PlConvex1D::new(vec![-1.0, 2.0], vec![0.0, 0.0], Tail::Slope(-1.0), Tail::Slope(2.0))
            .unwrap();
        let lf = f.legendre();
        assert_eq!(lf.breakpoints(), &[-1.0, 0.0, 2.0]);
        assert_eq!(lf.values(), &[1.0, 0.0, 4.0]);
        assert_eq!((lf.left(), lf.right()), (Tail::Wall, Tail::Wall));
        // brute-force sup over a fine grid
        for p in [-1.0, -0.5, 0.0, 0.7, 1.3, 2.0] {
            let brute = (0..=40_000)
                .map(|i| -10.0 + i as f64 * 5e-4)
                .map(|x| p * x - f.eval(x))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((brute - lf.eval(p)).abs() < 1e-9, "p={p}");
        }
        assert_eq!(lf.legendre(), f);
    }

    #[test]
    fn point_domain() {
        let f = PlConvex1D::new(vec![2.0], vec![1.0], Tail::Wall, Tail::Wall).unwrap();
        let lf = f.legendre();
        assert_eq!(lf.eval(3.0), 3.0 * 2.0 - 1.0);
        assert_eq!(lf.legendre().eval(2.0), 1.0);
        assert_eq!(lf.legendre().eval(2.5), f64::INFINITY);
    }
}
