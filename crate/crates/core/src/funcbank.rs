//! Named test functions with ground-truth facts.
//!
//! One-dimensional entries are either exact PL functions or analytic functions
//! with a recommended sampling window and fit tolerance. Two-dimensional
//! entries are analytic and sampled on a centred square grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::f64::consts::PI;

use crate::convex1d::{sample_convex, PlConvex1D, SampleOptions, Tail};
use crate::error::{Error, Result};
use crate::gridnd::{GridFn, GridSpec};

/// How a fact's expected value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Immediate from the definition (fixed points, elementary integrals).
    Elementary,
    /// Closed form worked out by hand for this function.
    ClosedForm,
    /// Value computed independently by brute force or quadrature.
    BruteForce,
}

/// What a fact asserts; every variant is checked against the main pipeline.
#[derive(Debug, Clone)]
pub enum Check {
    /// `Sf(x)` equals `expect(x)` at the listed points.
    Symmetral { expect: fn(f64) -> f64, at: Vec<f64> },
    /// The λ = ½ variant equals `expect(x)` at the listed points.
    Amk { expect: fn(f64) -> f64, at: Vec<f64> },
    /// `Lf(p)` equals `expect(p)` at the listed points.
    Legendre { expect: fn(f64) -> f64, at: Vec<f64> },
    /// `∫ e^{-f}` equals the value (1-D exact route or 2-D grid route).
    ExpIntegral(f64),
    /// `Sf ≥ S̃f` at every point, strictly away from the origin.
    DominatesAmk { at: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct Fact {
    pub claim: &'static str,
    pub tolerance: f64,
    pub basis: Basis,
    pub check: Check,
}

/// Result of checking one fact.
#[derive(Debug, Clone, PartialEq)]
pub struct FactOutcome {
    pub claim: &'static str,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub enum Body {
    Pl(PlConvex1D),
    Analytic1D { eval: fn(f64) -> f64, window: (f64, f64), tol: f64, anchors: Vec<f64> },
    Analytic2D { eval: fn(f64, f64) -> f64, half: f64, points: usize },
}

#[derive(Debug, Clone)]
pub struct NamedFunction {
    pub id: &'static str,
    pub description: &'static str,
    pub even: bool,
    pub body: Body,
    pub facts: Vec<Fact>,
}

impl NamedFunction {
    pub fn dim(&self) -> usize {
        match self.body {
            Body::Analytic2D { .. } => 2,
            _ => 1,
        }
    }

    /// The exact or fitted PL function of a 1-D entry.
    pub fn pl(&self) -> Result<PlConvex1D> {
        match &self.body {
            Body::Pl(f) => Ok(f.clone()),
            Body::Analytic1D { eval, window, tol, anchors } => {
                let opts = SampleOptions { tol: *tol, anchors: anchors.clone(), ..Default::default() };
                sample_convex(eval, *window, &opts)
            }
            Body::Analytic2D { .. } => Err(Error::Argument(format!("{} is two-dimensional", self.id))),
        }
    }

    /// The entry sampled on its recommended grid, or with `points` per axis.
    pub fn grid(&self, points: Option<usize>) -> Result<GridFn> {
        match &self.body {
            Body::Analytic2D { eval, half, points: p } => {
                let spec = GridSpec::square(2, *half, points.unwrap_or(*p))?;
                GridFn::from_fn(spec, |x| eval(x[0], x[1]))
            }
            _ => Err(Error::Argument(format!("{} is one-dimensional", self.id))),
        }
    }

    /// Pointwise value of the underlying function (not the PL fit).
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.body {
            Body::Pl(f) => f.eval(x[0]),
            Body::Analytic1D { eval, .. } => eval(x[0]),
            Body::Analytic2D { eval, .. } => eval(x[0], x[1]),
        }
    }

    /// Checks every attached fact against the main pipeline.
    pub fn verify(&self) -> Result<Vec<FactOutcome>> {
        let pl = if self.dim() == 1 { Some(self.pl()?) } else { None };
        let mut out = Vec::with_capacity(self.facts.len());
        for fact in &self.facts {
            let error = match (&fact.check, &pl) {
                (Check::Symmetral { expect, at }, Some(f)) => max_err(&f.symmetrize()?, *expect, at),
                (Check::Amk { expect, at }, Some(f)) => max_err(&f.symmetrize_amk()?, *expect, at),
                (Check::Legendre { expect, at }, Some(f)) => max_err(&f.legendre(), *expect, at),
                (Check::ExpIntegral(v), Some(f)) => (f.exp_integral() - v).abs() / v,
                (Check::ExpIntegral(v), None) => (self.grid(None)?.exp_integral()? - v).abs() / v,
                (Check::DominatesAmk { at }, Some(f)) => {
                    let (s, a) = (f.symmetrize()?, f.symmetrize_amk()?);
                    // worst violation of Sf ≥ S̃f, with strictness required off 0
                    at.iter()
                        .map(|&x| {
                            let d = s.eval(x) - a.eval(x);
                            if x != 0.0 && d <= 0.0 { f64::INFINITY } else { (-d).max(0.0) }
                        })
                        .fold(0.0, f64::max)
                }
                (_, None) => return Err(Error::Argument(format!("fact '{}' needs a 1-D function", fact.claim))),
            };
            out.push(FactOutcome { claim: fact.claim, error, tolerance: fact.tolerance, passed: error <= fact.tolerance });
        }
        Ok(out)
    }

    /// Catalog entry as JSON; 1-D entries embed their PL function spec.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let mut v = json!({
            "id": self.id,
            "dim": self.dim(),
            "even": self.even,
            "description": self.description,
            "facts": self.facts.iter().map(|f| json!({"claim": f.claim, "tolerance": f.tolerance})).collect::<Vec<_>>(),
        });
        match &self.body {
            Body::Analytic2D { half, points, .. } => {
                v["grid"] = json!({"half": half, "points": points});
            }
            _ => v["function"] = serde_json::from_str(&self.pl()?.to_json()?)?,
        }
        Ok(v)
    }
}

fn max_err(f: &PlConvex1D, expect: fn(f64) -> f64, at: &[f64]) -> f64 {
    at.iter()
        .map(|&x| {
            let (a, b) = (f.eval(x), expect(x));
            if a == b { 0.0 } else { (a - b).abs() }
        })
        .fold(0.0, f64::max)
}

/// `g(s) = ½(∛s + √s)`: half-width of `{f ≤ s}` for the cubic-quadratic example.
pub fn example31_half_width(s: f64) -> f64 {
    0.5 * (s.cbrt() + s.sqrt())
}

/// `Sf(x) = g⁻¹(|x|)` for the cubic-quadratic example.
pub fn example31_symmetral(x: f64) -> f64 {
    let target = x.abs();
    if target == 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while example31_half_width(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if example31_half_width(mid) < target { lo = mid } else { hi = mid }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// λ = ½ variant of the cubic-quadratic example in closed form.
pub fn example31_amk(x: f64) -> f64 {
    let x = x.abs();
    let r = (1.0 + 12.0 * x).sqrt();
    ((-12.0 * x - 1.0) * r + 18.0 * x + 1.0) / 27.0 + 2.0 * x * x
}

fn example31_eval(x: f64) -> f64 {
    if x >= 0.0 { x * x * x } else { x * x }
}

/// `∫ e^{-x²}` over the negative axis plus `∫ e^{-x³}` over the positive axis.
pub const EXAMPLE31_INTEGRAL: f64 = 0.886_226_925_452_758 + 0.892_979_511_569_249_2;

fn pl(breaks: &[f64], values: &[f64], left: Tail, right: Tail) -> PlConvex1D {
    PlConvex1D::new(breaks.to_vec(), values.to_vec(), left, right).expect("catalog entry is valid")
}

fn pts(v: &[f64]) -> Vec<f64> {
    v.to_vec()
}

const PTS: [f64; 9] = [-2.0, -1.0, -0.6, -0.25, 0.0, 0.1, 0.5, 1.2, 3.0];

fn fact(claim: &'static str, tolerance: f64, basis: Basis, check: Check) -> Fact {
    Fact { claim, tolerance, basis, check }
}

pub fn example31() -> NamedFunction {
    let at = pts(&[0.0, 0.25, 0.5, 1.0, 2.0, -0.75, -1.5]);
    NamedFunction {
        id: "example31",
        description: "x^3 for x >= 0, x^2 for x <= 0",
        even: false,
        body: Body::Analytic1D { eval: example31_eval, window: (-4.0, 2.5), tol: 1e-8, anchors: vec![-1.0, 0.0, 1.0] },
        facts: vec![
            fact("Sf = g^-1(|x|) with g(s) = (cbrt(s) + sqrt(s))/2", 1e-5, Basis::ClosedForm, Check::Symmetral { expect: example31_symmetral, at: at.clone() }),
            fact("lambda = 1/2 variant matches its closed form", 1e-5, Basis::ClosedForm, Check::Amk { expect: example31_amk, at: at.clone() }),
            fact("Sf >= lambda = 1/2 variant, strictly off 0", 0.0, Basis::BruteForce, Check::DominatesAmk { at }),
            fact("Sf(1) = 1", 1e-9, Basis::ClosedForm, Check::Symmetral { expect: |_| 1.0, at: vec![1.0, -1.0] }),
            fact("integral of exp(-f) = sqrt(pi)/2 + Gamma(4/3)", 1e-6, Basis::ClosedForm, Check::ExpIntegral(EXAMPLE31_INTEGRAL)),
        ],
    }
}

pub fn gaussian() -> NamedFunction {
    NamedFunction {
        id: "gaussian",
        description: "x^2/2",
        even: true,
        body: Body::Analytic1D { eval: |x| 0.5 * x * x, window: (-12.0, 12.0), tol: 1e-7, anchors: vec![0.0] },
        facts: vec![
            fact("Sf = f", 1e-7, Basis::Elementary, Check::Symmetral { expect: |x| 0.5 * x * x, at: pts(&PTS) }),
            fact("lambda = 1/2 variant = f", 1e-7, Basis::Elementary, Check::Amk { expect: |x| 0.5 * x * x, at: pts(&PTS) }),
            fact("Lf = f", 1e-6, Basis::Elementary, Check::Legendre { expect: |p| 0.5 * p * p, at: pts(&PTS) }),
            fact("integral of exp(-f) = sqrt(2 pi)", 1e-6, Basis::Elementary, Check::ExpIntegral((2.0 * PI).sqrt())),
        ],
    }
}

pub fn abs() -> NamedFunction {
    NamedFunction {
        id: "abs",
        description: "|x|",
        even: true,
        body: Body::Pl(PlConvex1D::abs(0.0, 1.0)),
        facts: vec![
            fact("Sf = |x|", 1e-12, Basis::Elementary, Check::Symmetral { expect: f64::abs, at: pts(&PTS) }),
            fact("Lf = indicator of [-1, 1]", 0.0, Basis::Elementary, Check::Legendre { expect: |p| if p.abs() <= 1.0 { 0.0 } else { f64::INFINITY }, at: pts(&PTS) }),
            fact("integral of exp(-f) = 2", 1e-12, Basis::Elementary, Check::ExpIntegral(2.0)),
        ],
    }
}

pub fn plateau() -> NamedFunction {
    let expect = |x: f64| (x.abs() - 1.0).max(0.0);
    NamedFunction {
        id: "plateau",
        description: "max(0, |x| - 1)",
        even: true,
        body: Body::Pl(pl(&[-1.0, 1.0], &[0.0, 0.0], Tail::Slope(-1.0), Tail::Slope(1.0))),
        facts: vec![
            fact("Sf = f", 1e-12, Basis::Elementary, Check::Symmetral { expect, at: pts(&PTS) }),
            fact("Lf = |p| on [-1, 1]", 1e-12, Basis::Elementary, Check::Legendre { expect: |p| if p.abs() <= 1.0 { p.abs() } else { f64::INFINITY }, at: pts(&PTS) }),
            fact("integral of exp(-f) = 4", 1e-12, Basis::Elementary, Check::ExpIntegral(4.0)),
        ],
    }
}

pub fn two_slope() -> NamedFunction {
    NamedFunction {
        id: "two_slope",
        description: "max(-2x, x)",
        even: false,
        body: Body::Pl(pl(&[0.0], &[0.0], Tail::Slope(-2.0), Tail::Slope(1.0))),
        facts: vec![
            fact("Sf = 4|x|/3", 1e-12, Basis::ClosedForm, Check::Symmetral { expect: |x| 4.0 * x.abs() / 3.0, at: pts(&PTS) }),
            fact("lambda = 1/2 variant = |x|", 1e-12, Basis::BruteForce, Check::Amk { expect: f64::abs, at: pts(&PTS) }),
            fact("integral of exp(-f) = 3/2", 1e-12, Basis::Elementary, Check::ExpIntegral(1.5)),
        ],
    }
}

pub fn shifted_abs() -> NamedFunction {
    NamedFunction {
        id: "shifted_abs",
        description: "|x - 1| + 1/2",
        even: false,
        body: Body::Pl(pl(&[1.0], &[0.5], Tail::Slope(-1.0), Tail::Slope(1.0))),
        facts: vec![fact("Sf = |x| + 1/2", 1e-12, Basis::Elementary, Check::Symmetral { expect: |x| x.abs() + 0.5, at: pts(&PTS) })],
    }
}

pub fn shifted_two_slope() -> NamedFunction {
    NamedFunction {
        id: "shifted_two_slope",
        description: "max(-2(x - 1/2), x - 1/2) + 1",
        even: false,
        body: Body::Pl(pl(&[0.5], &[1.0], Tail::Slope(-2.0), Tail::Slope(1.0))),
        facts: vec![
            fact("Sf = 4|x|/3 + 1", 1e-12, Basis::ClosedForm, Check::Symmetral { expect: |x| 4.0 * x.abs() / 3.0 + 1.0, at: pts(&PTS) }),
            fact("integral of exp(-f) = 3/(2e)", 1e-12, Basis::Elementary, Check::ExpIntegral(1.5 / std::f64::consts::E)),
        ],
    }
}

fn within(x: f64, r: f64, v: f64) -> f64 {
    if x.abs() <= r { v } else { f64::INFINITY }
}

pub fn wall_ramp() -> NamedFunction {
    NamedFunction {
        id: "wall_ramp",
        description: "x on [0, 1], +inf elsewhere",
        even: false,
        body: Body::Pl(pl(&[0.0, 1.0], &[0.0, 1.0], Tail::Wall, Tail::Wall)),
        facts: vec![
            fact("Sf(x) = f(2|x|) on [-1/2, 1/2]", 1e-12, Basis::ClosedForm, Check::Symmetral { expect: |x| within(x, 0.5, 2.0 * x.abs()), at: pts(&[-0.6, -0.5, -0.2, 0.0, 0.3, 0.49, 0.5, 0.51]) }),
            fact("integral of exp(-f) = 1 - 1/e", 1e-12, Basis::Elementary, Check::ExpIntegral(1.0 - (-1.0f64).exp())),
        ],
    }
}

pub fn wall_ramp_down() -> NamedFunction {
    NamedFunction {
        id: "wall_ramp_down",
        description: "1 - x on [0, 1], +inf elsewhere",
        even: false,
        body: Body::Pl(pl(&[0.0, 1.0], &[1.0, 0.0], Tail::Wall, Tail::Wall)),
        facts: vec![fact("Sf(x) = f(1 - 2|x|) on [-1/2, 1/2]", 1e-12, Basis::ClosedForm, Check::Symmetral { expect: |x| within(x, 0.5, 2.0 * x.abs()), at: pts(&[-0.7, -0.5, -0.1, 0.0, 0.25, 0.5, 0.6]) })],
    }
}

pub fn wall_two_slope() -> NamedFunction {
    // {f <= s} = [-s, s/2] until the right wall at 1 binds (s = 2), then [-s, 1]
    let expect = |x: f64| within(x, 2.0, if x.abs() <= 1.5 { 4.0 * x.abs() / 3.0 } else { 2.0 * x.abs() - 1.0 });
    NamedFunction {
        id: "wall_two_slope",
        description: "max(-x, 2x) on [-3, 1], +inf elsewhere",
        even: false,
        body: Body::Pl(pl(&[-3.0, 0.0, 1.0], &[3.0, 0.0, 2.0], Tail::Wall, Tail::Wall)),
        facts: vec![fact("Sf = 4|x|/3 for |x| <= 3/2 and f(1 - 2|x|) up to |x| = 2", 1e-12, Basis::ClosedForm, Check::Symmetral { expect, at: pts(&[-2.5, -2.0, -1.7, -1.5, -0.3, 0.0, 0.9, 1.5, 1.8, 2.0]) })],
    }
}

pub fn wall_interval() -> NamedFunction {
    NamedFunction {
        id: "wall_interval",
        description: "indicator of [-1, 2]",
        even: false,
        body: Body::Pl(PlConvex1D::indicator(-1.0, 2.0).expect("valid interval")),
        facts: vec![
            fact("Sf = indicator of [-3/2, 3/2]", 0.0, Basis::Elementary, Check::Symmetral { expect: |x| within(x, 1.5, 0.0), at: pts(&[-2.0, -1.5, 0.0, 1.0, 1.5, 1.6]) }),
            fact("Lf = max(-p, 2p)", 1e-12, Basis::Elementary, Check::Legendre { expect: |p| (-p).max(2.0 * p), at: pts(&PTS) }),
            fact("integral of exp(-f) = 3", 1e-12, Basis::Elementary, Check::ExpIntegral(3.0)),
        ],
    }
}

pub fn three_piece() -> NamedFunction {
    NamedFunction {
        id: "three_piece",
        description: "PL with slopes -3, -1, 2 and kinks at -1, 1/2",
        even: false,
        body: Body::Pl(pl(&[-1.0, 0.5], &[2.0, 0.5], Tail::Slope(-3.0), Tail::Slope(2.0))),
        facts: vec![
            fact("Sf(0) = min f", 0.0, Basis::Elementary, Check::Symmetral { expect: |_| 0.5, at: vec![0.0] }),
            fact("Sf matches the width profile closed form", 1e-12, Basis::ClosedForm, Check::Symmetral { expect: three_piece_symmetral, at: pts(&PTS) }),
            fact("integral of exp(-f) matches the closed form", 1e-12, Basis::ClosedForm, Check::ExpIntegral(three_piece_integral())),
        ],
    }
}

/// Width of `{f ≤ s}` is `(s - ½)(1 + ½) = 1.5(s - ½)` for `s ≤ 2` and
/// `(s - 2)/3 + 1.5 + 1.5/2 + (s - 2)/2` beyond.
fn three_piece_symmetral(x: f64) -> f64 {
    let w = 2.0 * x.abs();
    if w <= 2.25 {
        0.5 + w / 1.5
    } else {
        2.0 + (w - 2.25) / (1.0 / 3.0 + 0.5)
    }
}

fn three_piece_integral() -> f64 {
    // left tail from -1 (value 2, slope -3), middle slope -1 on [-1, 1/2], right slope 2
    let left = (-2.0f64).exp() / 3.0;
    let middle = (-0.5f64).exp() - (-2.0f64).exp();
    let right = (-0.5f64).exp() / 2.0;
    left + middle + right
}

fn gauss2d() -> NamedFunction {
    NamedFunction {
        id: "gauss2d",
        description: "(x^2 + y^2)/2 on [-7, 7]^2",
        even: true,
        body: Body::Analytic2D { eval: |x, y| 0.5 * (x * x + y * y), half: 7.0, points: 141 },
        facts: vec![fact("integral of exp(-f) = 2 pi", 1e-3, Basis::Elementary, Check::ExpIntegral(2.0 * PI))],
    }
}

fn l1_norm() -> NamedFunction {
    NamedFunction {
        id: "l1_norm",
        description: "|x| + |y| on [-12, 12]^2",
        even: true,
        body: Body::Analytic2D { eval: |x, y| x.abs() + y.abs(), half: 12.0, points: 481 },
        facts: vec![fact("integral of exp(-f) = 4", 1e-3, Basis::Elementary, Check::ExpIntegral(4.0))],
    }
}

fn aniso_quad() -> NamedFunction {
    NamedFunction {
        id: "aniso_quad",
        description: "x^2 + 4y^2 on [-6, 6]^2",
        even: true,
        body: Body::Analytic2D { eval: |x, y| x * x + 4.0 * y * y, half: 6.0, points: 241 },
        facts: vec![fact("integral of exp(-f) = pi/2", 1e-3, Basis::Elementary, Check::ExpIntegral(0.5 * PI))],
    }
}

fn shifted_quad() -> NamedFunction {
    NamedFunction {
        id: "shifted_quad",
        description: "(x - 1/2)^2/2 + (y + 3/10)^2 on [-7, 7]^2",
        even: false,
        body: Body::Analytic2D { eval: |x, y| 0.5 * (x - 0.5).powi(2) + (y + 0.3).powi(2), half: 7.0, points: 141 },
        facts: vec![fact("integral of exp(-f) = pi sqrt(2)", 1e-3, Basis::Elementary, Check::ExpIntegral(PI * 2f64.sqrt()))],
    }
}

fn ex31_plus_y2() -> NamedFunction {
    NamedFunction {
        id: "ex31_plus_y2",
        description: "cubic-quadratic example in x plus y^2 on [-5, 5]^2",
        even: false,
        body: Body::Analytic2D { eval: |x, y| example31_eval(x) + y * y, half: 5.0, points: 201 },
        facts: vec![fact("integral of exp(-f) = sqrt(pi) times the 1-D value", 1e-3, Basis::ClosedForm, Check::ExpIntegral(PI.sqrt() * EXAMPLE31_INTEGRAL))],
    }
}

/// Every named function, 1-D entries first.
pub fn catalog() -> Vec<NamedFunction> {
    vec![
        gaussian(),
        abs(),
        plateau(),
        two_slope(),
        shifted_abs(),
        shifted_two_slope(),
        wall_ramp(),
        wall_ramp_down(),
        wall_two_slope(),
        wall_interval(),
        three_piece(),
        example31(),
        gauss2d(),
        l1_norm(),
        aniso_quad(),
        shifted_quad(),
        ex31_plus_y2(),
    ]
}

pub fn lookup(id: &str) -> Result<NamedFunction> {
    catalog()
        .into_iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::Argument(format!("unknown function '{id}'")))
}

/// Seeded coercive PL functions with two or three slopes.
pub fn random_pl_family(seed: u64, count: usize) -> Vec<PlConvex1D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let left = -rng.random_range(0.2..3.0);
            let right = rng.random_range(0.2..3.0);
            let x0: f64 = rng.random_range(-2.0..2.0);
            let v0: f64 = rng.random_range(-1.0..1.0);
            if rng.random_bool(0.5) {
                pl(&[x0], &[v0], Tail::Slope(left), Tail::Slope(right))
            } else {
                let mid = rng.random_range(left..right);
                let len = rng.random_range(0.1..2.0);
                pl(&[x0, x0 + len], &[v0, v0 + mid * len], Tail::Slope(left), Tail::Slope(right))
            }
        })
        .collect()
}
