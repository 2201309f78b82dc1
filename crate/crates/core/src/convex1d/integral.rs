//! Closed-form `∫ exp(-f)` for piecewise-linear `f`.

use super::{PlConvex1D, Tail};

/// `(1 - e^{-z}) / z`, continuous at 0.
fn phi(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - 0.5 * z
    } else {
        -f64::exp_m1(-z) / z
    }
}

impl PlConvex1D {
    /// Exact `∫_R exp(-f(x)) dx`, summed segment by segment.
    ///
    /// Convexity is not required. A tail that does not increase makes the
    /// integral diverge and yields `+inf`.
    pub fn exp_integral(&self) -> f64 {
        let bp = &self.breakpoints;
        let v = &self.values;
        let n = bp.len();
        let mut total = 0.0;
        if let Tail::Slope(m) = self.left {
            if m >= 0.0 {
                return f64::INFINITY;
            }
            total += (-v[0]).exp() / -m;
        }
        for i in 0..n - 1 {
            let len = bp[i + 1] - bp[i];
            let rise = v[i + 1] - v[i];
            total += (-v[i]).exp() * len * phi(rise);
        }
        if let Tail::Slope(m) = self.right {
            if m <= 0.0 {
                return f64::INFINITY;
            }
            total += (-v[n - 1]).exp() / m;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert!((PlConvex1D::abs(0.0, 1.0).exp_integral() - 2.0).abs() < 1e-15);
        let ramp = PlConvex1D::new(vec![0.0, 1.0], vec![0.0, 1.0], Tail::Wall, Tail::Wall).unwrap();
        assert!((ramp.exp_integral() - 0.632_120_558_8).abs() < 1e-10);
        let plateau =
            PlConvex1D::new(vec![-1.0, 1.0], vec![0.0, 0.0], Tail::Slope(-1.0), Tail::Slope(1.0)).unwrap();
        assert!((plateau.exp_integral() - 4.0).abs() < 1e-15);
        let flat = PlConvex1D::new(vec![0.0], vec![0.0], Tail::Slope(0.0), Tail::Slope(1.0)).unwrap();
        assert_eq!(flat.exp_integral(), f64::INFINITY);
    }

    #[test]
    fn tiny_rise_is_stable() {
        let f = PlConvex1D::new(vec![0.0, 1.0], vec![0.0, 1e-14], Tail::Wall, Tail::Wall).unwrap();
        assert!((f.exp_integral() - 1.0).abs() < 1e-13);
    }
}
