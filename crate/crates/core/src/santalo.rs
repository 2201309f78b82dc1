//! Functional Blaschke-Santaló experiments.
//!
//! `∫e^{-f} ∫e^{-Lf} ≤ (2π)^n` for even convex `f`, the growth of the dual
//! integral under symmetrization, the radial case, and iterated random
//! symmetrizations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::convex1d::PlConvex1D;
use crate::error::{Error, Result};
use crate::gridnd::{llt_legendre, Interp, steiner_symmetrize, Direction, GridFn, GridSpec, DEFAULT_LEVEL_CAP};
use crate::quad;

/// Largest `sup |f(x) - f(-x)|` accepted as even.
pub const EVEN_TOL: f64 = 1e-6;

/// Gradients bounding the dual grid are taken over `{f ≤ min f + GRADIENT_LEVEL}`.
pub const GRADIENT_LEVEL: f64 = 30.0;

/// Relative slack allowed when comparing dual integrals before and after a step.
pub const DUAL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub step: usize,
    /// Angle of the direction used for this step; `None` for the initial state.
    pub angle: Option<f64>,
    pub integral: f64,
    pub dual_integral: f64,
    pub product: f64,
    pub radial_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SantaloReport {
    pub id: String,
    pub dim: usize,
    pub integral: f64,
    pub dual_integral: f64,
    pub product: f64,
    pub bound: f64,
    pub slack: f64,
    pub asymmetry: f64,
    pub seed: Option<u64>,
    pub trace: Vec<TraceStep>,
}

impl SantaloReport {
    fn new(id: &str, dim: usize, integral: f64, dual_integral: f64, asymmetry: f64) -> Self {
        let bound = (2.0 * PI).powi(dim as i32);
        let product = integral * dual_integral;
        SantaloReport {
            id: id.to_string(),
            dim,
            integral,
            dual_integral,
            product,
            bound,
            slack: bound - product,
            asymmetry,
            seed: None,
            trace: Vec::new(),
        }
    }

    /// `product ≤ bound (1 + rel)`.
    pub fn within_bound(&self, rel: f64) -> bool {
        self.product <= self.bound * (1.0 + rel)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `sup |f(x) - f(-x)|` for a PL function; infinite if the tails differ.
pub fn asymmetry_pl(f: &PlConvex1D) -> f64 {
    let r = f.reflect();
    if f.left() != r.left() || f.right() != r.right() {
        let close = |a: crate::Tail, b: crate::Tail| match (a, b) {
            (crate::Tail::Slope(x), crate::Tail::Slope(y)) => (x - y).abs() <= 1e-12 * x.abs().max(1.0),
            _ => a == b,
        };
        if !close(f.left(), r.left()) || !close(f.right(), r.right()) {
            return f64::INFINITY;
        }
    }
    f.breakpoints()
        .iter()
        .chain(r.breakpoints())
        .map(|&x| {
            let (a, b) = (f.eval(x), f.eval(-x));
            if a == b { 0.0 } else { (a - b).abs() }
        })
        .fold(0.0, f64::max)
}

/// Exact route: both integrals in closed form on the PL function.
pub fn santalo_product_pl(f: &PlConvex1D, id: &str) -> Result<SantaloReport> {
    f.ensure_valid()?;
    let asym = asymmetry_pl(f);
    if !(asym <= EVEN_TOL) {
        return Err(Error::NotEven(asym));
    }
    let integral = f.exp_integral();
    if !(integral > 0.0 && integral.is_finite()) {
        return Err(Error::Divergent(integral));
    }
    Ok(SantaloReport::new(id, 1, integral, f.legendre().exp_integral(), asym))
}

/// Grid route: conjugate by the linear-time transform, integrals on the grid.
pub fn santalo_product_grid(f: &GridFn, id: &str) -> Result<SantaloReport> {
    let (asym, mismatches) = f.asymmetry()?;
    if !(asym <= EVEN_TOL) || mismatches > 0 {
        return Err(Error::NotEven(if mismatches > 0 { f64::INFINITY } else { asym }));
    }
    let (integral, dual) = product_parts(f)?;
    Ok(SantaloReport::new(id, f.dim(), integral, dual, asym))
}

fn product_parts(f: &GridFn) -> Result<(f64, f64)> {
    Ok((f.exp_integral()?, dual_integral(f)?))
}

/// Symmetric dual grid covering the gradients of `f` on its low sublevel set,
/// with the primal shape.
pub fn dual_grid(f: &GridFn) -> Result<GridSpec> {
    let spec = f.spec();
    let cut = f.min_value() + GRADIENT_LEVEL;
    let ok = |v: f64| v.is_finite() && v <= cut;
    let mut reach = vec![0.0f64; spec.dim()];
    let vals = f.values();
    if spec.dim() == 1 {
        for w in vals.windows(2) {
            if ok(w[0]) && ok(w[1]) {
                reach[0] = reach[0].max((w[1] - w[0]).abs() / spec.spacing[0]);
            }
        }
    } else {
        let (nx, ny) = (spec.shape[0], spec.shape[1]);
        for i in 0..nx {
            for j in 0..ny {
                let v = f.get(i, j);
                if !ok(v) {
                    continue;
                }
                if i + 1 < nx && ok(f.get(i + 1, j)) {
                    reach[0] = reach[0].max((f.get(i + 1, j) - v).abs() / spec.spacing[0]);
                }
                if j + 1 < ny && ok(f.get(i, j + 1)) {
                    reach[1] = reach[1].max((f.get(i, j + 1) - v).abs() / spec.spacing[1]);
                }
            }
        }
    }
    if reach.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Argument("function is flat along an axis; dual grid undefined".into()));
    }
    GridSpec::centered(&reach, &spec.shape)
}

/// Primal refinement factor per axis before the discrete conjugate. A sampled
/// conjugate undershoots by up to `f'' h² / 8`; refining cuts that by `DUAL_REFINE²`.
pub const DUAL_REFINE: usize = 4;

/// `∫ e^{-Lf}` over [`dual_grid`].
pub fn dual_integral(f: &GridFn) -> Result<f64> {
    let dual = dual_grid(f)?;
    llt_legendre(&refine(f, DUAL_REFINE)?, &dual)?.exp_integral_unchecked()
}

/// Resamples `f` on a grid `k` times finer with the cubic rule.
fn refine(f: &GridFn, k: usize) -> Result<GridFn> {
    let spec = f.spec();
    let shape: Vec<usize> = spec.shape.iter().map(|n| (n - 1) * k + 1).collect();
    let spacing: Vec<f64> = spec.spacing.iter().map(|h| h / k as f64).collect();
    let fine = GridSpec::new(spec.origin.clone(), spacing, shape)?;
    GridFn::from_fn(fine, |p| f.eval(p, Interp::Cubic))
}

fn cap(f: &GridFn, level: f64) -> Result<GridFn> {
    let top = f.min_value() + level;
    f.map(|v| if v > top { f64::INFINITY } else { v })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualMonotonicity {
    pub before: f64,
    pub after: f64,
    pub integral_before: f64,
    pub integral_after: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl DualMonotonicity {
    /// `(after - before) / before`.
    pub fn relative_change(&self) -> f64 {
        (self.after - self.before) / self.before
    }
}

/// Compares `∫e^{-Lf}` with `∫e^{-L(S_u f)}`.
///
/// `f` is first cut to `{f ≤ min f + cap}` so both sides see the same
/// truncation (the cut commutes with symmetrization).
pub fn dual_monotonicity_check(f: &GridFn, u: &Direction) -> Result<DualMonotonicity> {
    let f = cap(f, DEFAULT_LEVEL_CAP)?;
    let s = steiner_symmetrize(&f, u)?;
    let before = dual_integral(&f)?;
    let after = dual_integral(&s)?;
    Ok(DualMonotonicity {
        before,
        after,
        integral_before: f.exp_integral()?,
        integral_after: s.exp_integral()?,
        tolerance: DUAL_TOL,
        passed: after >= before * (1.0 - DUAL_TOL),
    })
}

/// `Γ(m / 2)` for a positive integer `m`.
fn gamma_half(m: usize) -> f64 {
    match m {
        0 => f64::INFINITY,
        1 => PI.sqrt(),
        2 => 1.0,
        _ => (m as f64 / 2.0 - 1.0) * gamma_half(m - 2),
    }
}

/// Surface area of the unit sphere in `R^n`: `n π^{n/2} / Γ(1 + n/2)`.
pub fn omega(n: usize) -> f64 {
    n as f64 * PI.powf(n as f64 / 2.0) / gamma_half(n + 2)
}

/// `sup_{t ≥ 0} (r t - h(t))` by bracketing and golden-section search.
fn radial_conjugate<H: Fn(f64) -> f64>(h: &H, r: f64) -> f64 {
    let phi = |t: f64| r * t - h(t);
    let mut hi = 1.0;
    while phi(2.0 * hi) > phi(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    let (mut a, mut b) = (0.0, 2.0 * hi);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 0..200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = phi(d);
        }
        if b - a <= 1e-15 * b.max(1.0) {
            break;
        }
    }
    phi(0.0).max(fc).max(fd).max(phi(a)).max(phi(b))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialReport {
    pub n: usize,
    pub omega: f64,
    /// `∫_0^∞ e^{-h(r)} r^{n-1} dr`
    pub primal: f64,
    /// `∫_0^∞ e^{-h*(r)} r^{n-1} dr` with `h*(r) = sup_{t≥0}(rt - h(t))`
    pub dual: f64,
    pub product: f64,
    pub bound: f64,
    pub slack: f64,
    /// `(∫_0^∞ e^{-r²/2} r^{n-1} dr)²`
    pub scalar_bound: f64,
    pub holds: bool,
}

/// Quadrature tolerance for [`radial_bound_check`].
pub const RADIAL_QUAD_TOL: f64 = 1e-11;

/// Checks `∫e^{-h(|x|)} ∫e^{-L(h(|·|))} ≤ (2π)^n` for increasing convex `h` on
/// `[0, ∞)` in dimension `n`, together with the scalar inequality
/// `primal · dual ≤ scalar_bound` it reduces to.
pub fn radial_bound_check<H: Fn(f64) -> f64>(h: H, n: usize) -> Result<RadialReport> {
    if n == 0 || n > 32 {
        return Err(Error::Argument(format!("dimension {n} out of range")));
    }
    let pw = |r: f64| if n == 1 { 1.0 } else { r.powi(n as i32 - 1) };
    let primal = quad::integrate_to_infinity(|r| (-h(r)).exp() * pw(r), 0.0, RADIAL_QUAD_TOL)
        .map_err(|_| Error::Divergent(f64::INFINITY))?;
    if !(primal > 0.0) {
        return Err(Error::Argument("exp(-h) has zero integral".into()));
    }
    let dual = quad::integrate_to_infinity(|r| (-radial_conjugate(&h, r)).exp() * pw(r), 0.0, RADIAL_QUAD_TOL)?;
    let w = omega(n);
    let gauss = 2f64.powf(n as f64 / 2.0 - 1.0) * gamma_half(n);
    let bound = (2.0 * PI).powi(n as i32);
    let product = w * w * primal * dual;
    let scalar_bound = gauss * gauss;
    Ok(RadialReport {
        n,
        omega: w,
        primal,
        dual,
        product,
        bound,
        slack: bound - product,
        scalar_bound,
        holds: primal * dual <= scalar_bound * (1.0 + 1e-7) && product <= bound * (1.0 + 1e-7),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    pub seed: u64,
    pub steps: Vec<TraceStep>,
}

impl ConvergenceTrace {
    pub fn initial_deviation(&self) -> f64 {
        self.steps[0].radial_deviation
    }

    pub fn final_deviation(&self) -> f64 {
        self.steps[self.steps.len() - 1].radial_deviation
    }

    /// `|I_last - I_0| / I_0` for `I = ∫e^{-f}`.
    pub fn integral_drift(&self) -> f64 {
        let i0 = self.steps[0].integral;
        (self.steps[self.steps.len() - 1].integral - i0).abs() / i0
    }

    /// Largest relative decrease of the product between consecutive steps.
    pub fn worst_product_drop(&self) -> f64 {
        self.steps
            .windows(2)
            .map(|w| (w[0].product - w[1].product) / w[0].product)
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "step,angle,integral,dual_integral,product,radial_deviation")?;
        for s in &self.steps {
            writeln!(
                w,
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.step,
                s.angle.map_or(String::new(), |a| format!("{a:.16e}")),
                s.integral,
                s.dual_integral,
                s.product,
                s.radial_deviation
            )?;
        }
        Ok(())
    }
}

/// Symmetrizes `steps` times along directions drawn uniformly from the circle
/// by a ChaCha8 generator seeded with `seed`, recording the state after each
/// step. Returns the trace and the final function.
pub fn convergence_experiment(f: &GridFn, steps: usize, seed: u64) -> Result<(ConvergenceTrace, GridFn)> {
    if f.dim() != 2 {
        return Err(Error::Argument("convergence experiment needs a 2-D grid".into()));
    }
    let (asym, mismatches) = f.asymmetry()?;
    if !(asym <= EVEN_TOL) || mismatches > 0 {
        return Err(Error::NotEven(asym));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = cap(f, DEFAULT_LEVEL_CAP)?;
    let record = |g: &GridFn, step: usize, angle: Option<f64>| -> Result<TraceStep> {
        let (integral, dual_integral) = product_parts(g)?;
        Ok(TraceStep { step, angle, integral, dual_integral, product: integral * dual_integral, radial_deviation: g.radial_deviation() })
    };
    let mut trace = vec![record(&cur, 0, None)?];
    for k in 1..=steps {
        let theta = rng.random_range(0.0..PI);
        cur = steiner_symmetrize(&cur, &Direction::from_angle(theta))?;
        trace.push(record(&cur, k, Some(theta))?);
    }
    Ok((ConvergenceTrace { seed, steps: trace }, cur))
}
