//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steiner_core::funcbank::{self, example31_amk, example31_symmetral, random_pl_family, NamedFunction};
use steiner_core::gridnd::{llt_legendre, steiner_symmetrize};
use steiner_core::oracle::{self, SampledFn1D, SampledFn2D, Thresholds};
use steiner_core::santalo::{self, convergence_experiment, dual_monotonicity_check, radial_bound_check};
use steiner_core::{Direction, GridFn, GridSpec, PlConvex1D, Result};

type Check = Result<(bool, String)>;

fn one_d() -> Vec<NamedFunction> {
    funcbank::catalog().into_iter().filter(|f| f.dim() == 1).collect()
}

fn two_d() -> Vec<NamedFunction> {
    funcbank::catalog().into_iter().filter(|f| f.dim() == 2).collect()
}

fn family() -> Vec<PlConvex1D> {
    random_pl_family(2024, 50)
}

/// All 1-D test functions: catalog entries (fitted where analytic) and the seeded family.
fn all_1d() -> Result<Vec<(String, PlConvex1D)>> {
    let mut out = Vec::new();
    for f in one_d() {
        out.push((f.id.to_string(), f.pl()?));
    }
    for (k, f) in family().into_iter().enumerate() {
        out.push((format!("family[{k}]"), f));
    }
    Ok(out)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b { 0.0 } else { (a - b).abs() / b.abs().max(1.0) }
}

fn criterion_1() -> Check {
    let ex = funcbank::example31();
    let f = ex.pl()?;
    let s = f.symmetrize()?;
    let a = f.symmetrize_amk()?;
    let mut err_s = 0.0f64;
    let mut err_a = 0.0f64;
    for x in [0.0, 0.25, 0.5, 1.0, 2.0] {
        err_s = err_s.max((s.eval(x) - example31_symmetral(x)).abs());
        err_a = err_a.max((a.eval(x) - example31_amk(x)).abs());
    }
    let at_one = (s.eval(1.0) - 1.0).abs();
    let mut dominated = true;
    for k in 0..=400 {
        let x = -2.0 + k as f64 * 0.01;
        let d = s.eval(x) - a.eval(x);
        dominated &= d >= 0.0 && (x == 0.0 || d > 0.0);
    }
    Ok((
        err_s <= 1e-5 && err_a <= 1e-5 && at_one <= 1e-9 && dominated,
        format!("|Sf-g^-1| {err_s:.2e}, |amk-closed| {err_a:.2e}, |Sf(1)-1| {at_one:.1e}, Sf>=amk: {dominated}"),
    ))
}

fn criterion_2() -> Check {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (_, f) in all_1d()? {
        let s = f.symmetrize()?;
        let m = f.argmin_interval()?.level;
        let (lo, hi) = f.domain();
        let top = if lo.is_finite() && hi.is_finite() { f.eval(lo).max(f.eval(hi)) - m } else { 10.0 };
        for k in 0..100 {
            let level = m + top * (k as f64 + 0.5) / 100.0;
            worst = worst.max(rel(s.width_at(level), f.width_at(level)));
            count += 1;
        }
    }
    Ok((worst <= 1e-9, format!("{count} levels, worst relative width gap {worst:.2e}")))
}

fn criterion_3() -> Check {
    let mut worst_1d = 0.0f64;
    for (_, f) in all_1d()? {
        let i = f.exp_integral();
        worst_1d = worst_1d.max((f.symmetrize()?.exp_integral() - i).abs() / i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_2d = 0.0f64;
    let entries = two_d();
    let per = 20usize.div_ceil(entries.len());
    let mut runs = 0;
    for e in &entries {
        let g = e.grid(None)?;
        let i = g.exp_integral()?;
        for _ in 0..per {
            let u = Direction::from_angle(rng.random_range(0.0..PI));
            worst_2d = worst_2d.max((steiner_symmetrize(&g, &u)?.exp_integral()? - i).abs() / i);
            runs += 1;
        }
    }
    Ok((
        worst_1d <= 1e-9 && worst_2d <= 1e-3,
        format!("1-D drift {worst_1d:.2e}, 2-D drift {worst_2d:.2e} over {runs} random directions"),
    ))
}

fn criterion_4() -> Check {
    let mut worst = 0.0f64;
    let mut worst_id = String::new();
    for e in one_d() {
        let f = e.pl()?;
        let s = f.symmetrize()?;
        let m = f.argmin_interval()?.level;
        let (a, b) = f.sublevel_interval(m + 8.0).expect("level above the minimum");
        let mut w = 4.0f64;
        while w < a.abs().max(b.abs()) {
            w *= 2.0;
        }
        let big = SampledFn1D::new(-w, w, 4097, |x| (-f.eval(x)).exp())?;
        let sym = oracle::levelset_symmetrize_1d(&big, 512, Thresholds::Uniform)?;
        let gap = sym.xs.iter().zip(&sym.vals).map(|(&x, v)| (v - (-s.eval(x)).exp()).abs()).fold(0.0, f64::max);
        if gap > worst {
            worst = gap;
            worst_id = e.id.to_string();
        }
    }
    Ok((worst <= 5e-3, format!("worst sup gap {worst:.2e} ({worst_id}), 4096 cells, 512 levels")))
}

fn criterion_5() -> Check {
    let (t_grid, t_span) = (4001usize, 10.0);
    let step = 2.0 * t_span / (t_grid - 1) as f64;
    let mut worst = 0.0f64;
    for f in family() {
        let s = f.symmetrize()?;
        for k in 0..25 {
            let x = -3.0 + 6.0 * k as f64 / 24.0;
            let o = oracle::supinf_oracle(&f, x, 201, t_grid, t_span)?;
            worst = worst.max((o - s.eval(x)).abs());
        }
    }
    Ok((worst <= 3.0 * step, format!("worst gap {worst:.2e} vs 3 t-steps = {:.2e}", 3.0 * step)))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let fam = random_pl_family(66, 100);
    let xs: Vec<f64> = (0..41).map(|k| -4.0 + 0.2 * k as f64).collect();
    let mut mono = 0;
    let mut even = 0;
    for f1 in &fam {
        let bump = PlConvex1D::abs(rng.random_range(-2.0..2.0), rng.random_range(0.0..1.5)).translate(0.0, rng.random_range(0.0..0.5));
        let f2 = f1.sum(&bump)?;
        let (s1, s2) = (f1.symmetrize()?, f2.symmetrize()?);
        let shift = rng.random_range(-3.0..3.0);
        let st = f1.translate(shift, 0.0).symmetrize()?;
        for &x in &xs {
            if s1.eval(x) > s2.eval(x) + 1e-9 * s2.eval(x).abs().max(1.0) {
                mono += 1;
            }
            if rel(s1.eval(-x), s1.eval(x)) > 1e-9 || rel(st.eval(x), s1.eval(x)) > 1e-9 {
                even += 1;
            }
        }
    }
    Ok((mono == 0 && even == 0, format!("100 pairs x 41 points: {mono} order violations, {even} evenness/translation violations")))
}

fn criterion_7() -> Check {
    let mut worst = 0.0f64;
    for (_, f) in all_1d()? {
        let ff = f.legendre().legendre();
        let mut pts: Vec<f64> = f.breakpoints().to_vec();
        let (lo, hi) = (pts[0] - 1.0, pts[pts.len() - 1] + 1.0);
        pts.extend((0..=20).map(|k| lo + (hi - lo) * k as f64 / 20.0));
        for x in pts {
            worst = worst.max(rel(ff.eval(x), f.eval(x)));
        }
    }
    // grid conjugate against the brute-force conjugate on 2-D quadratics
    let mut grid_gap = 0.0f64;
    let mut analytic_gap = 0.0f64;
    let mut cell_bound = 0.0f64;
    for (a, b) in [(0.5, 0.5), (1.0, 4.0), (2.0, 0.7)] {
        let spec = GridSpec::square(2, 3.0, 61)?;
        let f = GridFn::from_fn(spec, |x| a * x[0] * x[0] + b * x[1] * x[1])?;
        let dual = GridSpec::square(2, 2.0, 41)?;
        let lf = llt_legendre(&f, &dual)?;
        let s = SampledFn2D::new([-3.0, -3.0], [0.1, 0.1], [61, 61], |x, y| a * x * x + b * y * y)?;
        let direct = oracle::legendre_direct_2d(&s, [-2.0, -2.0], [0.1, 0.1], [41, 41])?;
        for (k, v) in lf.values().iter().enumerate() {
            grid_gap = grid_gap.max((v - direct.vals[k]).abs());
            let p = dual.point(k);
            analytic_gap = analytic_gap.max((v - (p[0] * p[0] / (4.0 * a) + p[1] * p[1] / (4.0 * b))).abs());
        }
        // one primal cell: the sampled maximizer is within h/2 of the true one
        cell_bound = f64::max(cell_bound, (a + b) * 0.1 * 0.1 / 4.0);
    }
    Ok((
        worst <= 1e-12 && grid_gap <= 1e-9 && analytic_gap <= cell_bound * (1.0 + 1e-9),
        format!("biconjugate gap {worst:.1e}; LLT vs direct {grid_gap:.1e}; vs exact {analytic_gap:.1e} (cell bound {cell_bound:.1e})"),
    ))
}

fn criterion_8() -> Check {
    let mut ok = true;
    let mut lines = Vec::new();
    for e in one_d().iter().filter(|e| e.even) {
        let r = santalo::santalo_product_pl(&e.pl()?, e.id)?;
        ok &= r.product <= r.bound;
        if e.id == "gaussian" {
            ok &= r.slack <= 1e-3;
            lines.push(format!("gaussian slack {:.1e}", r.slack));
        }
    }
    for e in two_d().iter().filter(|e| e.even) {
        let r = santalo::santalo_product_grid(&e.grid(None)?, e.id)?;
        ok &= r.product <= r.bound;
        if e.id == "gauss2d" {
            ok &= r.slack / r.bound <= 2e-2;
            lines.push(format!("gauss2d rel slack {:.1e}", r.slack / r.bound));
        }
    }
    let cases = [
        ("aniso_quad", Direction::from_angle(PI / 4.0)),
        ("l1_norm", Direction::from_angle(PI / 4.0)),
        ("gauss2d", Direction::from_angle(0.3)),
        ("ex31_plus_y2", Direction::axis(2, 0)?),
    ];
    let mut worst: f64 = f64::INFINITY;
    for (id, u) in cases {
        let d = dual_monotonicity_check(&funcbank::lookup(id)?.grid(None)?, &u)?;
        ok &= d.passed;
        worst = worst.min(d.relative_change());
    }
    lines.push(format!("dual integral change >= {worst:.1e} (tol -{:.0e})", santalo::DUAL_TOL));
    Ok((ok, format!("all even products <= bound; {}", lines.join("; "))))
}

fn criterion_9() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [1, 2] {
        let g = radial_bound_check(|t| 0.5 * t * t, n)?;
        ok &= (g.product - g.bound).abs() / g.bound <= 1e-4 && g.holds;
        parts.push(format!("t^2/2 n={n}: rel gap {:.1e}", (g.product - g.bound).abs() / g.bound));
        for (name, h) in [("t", (|t: f64| t) as fn(f64) -> f64), ("t^4", |t: f64| t.powi(4))] {
            let r = radial_bound_check(h, n)?;
            ok &= r.holds && r.slack > 1e-4 * r.bound;
            parts.push(format!("{name} n={n}: {:.4}", r.product));
        }
    }
    Ok((ok, parts.join(", ")))
}

fn criterion_10() -> Check {
    let f = funcbank::lookup("aniso_quad")?.grid(None)?;
    let (trace, _) = convergence_experiment(&f, 50, 7)?;
    let ratio = trace.final_deviation() / trace.initial_deviation();
    let drift = trace.integral_drift();
    Ok((
        ratio < 0.05 && drift < 0.01,
        format!("deviation {:.3e} -> {:.3e} (ratio {ratio:.2e}), integral drift {drift:.2e}", trace.initial_deviation(), trace.final_deviation()),
    ))
}

fn main() {
    let criteria: [(&str, Option<u64>, fn() -> Check); 10] = [
        ("cubic-quadratic example", Some(1), criterion_1),
        ("width preservation", Some(5), criterion_2),
        ("integral invariance", Some(30), criterion_3),
        ("definition equivalence", Some(30), criterion_4),
        ("sup-inf oracle consistency", Some(60), criterion_5),
        ("monotonicity and evenness", None, criterion_6),
        ("Legendre correctness", None, criterion_7),
        ("Blaschke-Santalo", Some(120), criterion_8),
        ("radial bound", Some(5), criterion_9),
        ("convergence experiment", None, criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = run();
        let dt = t.elapsed();
        let in_time = limit.is_none_or(|s| dt < Duration::from_secs(s));
        let (pass, detail) = match res {
            Ok((p, d)) => (p && in_time, d),
            Err(e) => (false, format!("error: {e}")),
        };
        let budget = limit.map_or(String::new(), |s| format!(" / {s} s"));
        println!(
            "{} criterion {:>2}: {name}: {detail} [{:.2} s{budget}]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            dt.as_secs_f64()
        );
        if !pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
