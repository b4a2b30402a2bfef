//! Acceptance suite. Every criterion prints one PASS or FAIL line; the
//! process fails if any criterion fails.
//!
//! Root oracles are computed here in `f64` (closed forms, a sign-change
//! scan along the unit circle, Newton refinement) without calling the
//! solver.

use std::process::ExitCode;
use std::time::Instant;

use certiroot::diagnostics::{depth_for_width, run_trials};
use certiroot::predicates::preconditioned_on_face;
use certiroot::{
    box_faces, build_preconditioner, depth_soft_check, dilate_box, estimate_exclusion_margin, isolate, mean_value,
    sure_success_check, test_c0, test_jc, test_mk, verify_isolation, AlignedBox, Dilation, Dyadic, Expr,
    FunctionSystem, Interval, IntervalVector, IsolationOutput, IsolationReport, JacobianMode, Roi, RootEnclosure,
    RoundingContext, SolverConfig, Status, TrialTest,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ROOT_RADIUS: f64 = 1e-12;

struct Golden {
    name: &'static str,
    source: &'static str,
    roi_lo: Vec<f64>,
    roi_width: f64,
    /// Every real root, in or out of the ROI.
    roots: Vec<Vec<f64>>,
    /// Roots are exact dyadics.
    exact: bool,
}

impl Golden {
    fn sys(&self) -> FunctionSystem {
        FunctionSystem::parse(self.source).unwrap()
    }

    fn roi(&self) -> Roi {
        Roi::new(self.roi_lo.iter().map(|&v| d(v)).collect(), d(self.roi_width)).unwrap()
    }

    fn enclosures(&self) -> Vec<IntervalVector> {
        self.roots
            .iter()
            .map(|r| {
                let side = |v: f64| {
                    if self.exact {
                        Interval::point(d(v))
                    } else {
                        Interval::new(d(v - ROOT_RADIUS), d(v + ROOT_RADIUS))
                    }
                };
                IntervalVector::new(r.iter().map(|&v| side(v)).collect())
            })
            .collect()
    }
}

fn d(v: f64) -> Dyadic {
    Dyadic::from_f64(v).unwrap()
}

/// Roots of `(sin x - y, x^2 + y^2 - 1)`: zeros of `sin(cos t) - sin t`
/// found by a sign scan over `samples` points of the circle, then polished
/// by two-dimensional Newton.
fn sin_circle_roots(samples: usize) -> Vec<Vec<f64>> {
    let g = |t: f64| (t.cos()).sin() - t.sin();
    let tau = std::f64::consts::TAU;
    let mut roots = Vec::new();
    let mut prev = g(0.0);
    for k in 1..=samples {
        let t = tau * k as f64 / samples as f64;
        let cur = g(t);
        if prev == 0.0 || prev.signum() != cur.signum() {
            let (mut x, mut y) = (t.cos(), t.sin());
            for _ in 0..50 {
                let (f1, f2) = (x.sin() - y, x * x + y * y - 1.0);
                let (a, b, c, dd) = (x.cos(), -1.0, 2.0 * x, 2.0 * y);
                let det = a * dd - b * c;
                x -= (dd * f1 - b * f2) / det;
                y -= (-c * f1 + a * f2) / det;
            }
            roots.push(vec![x, y]);
        }
        prev = cur;
    }
    roots
}

fn goldens() -> Vec<Golden> {
    let s2 = 2f64.sqrt();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        Golden {
            name: "x^2-2",
            source: "vars x; f1 = x^2 - 2",
            roi_lo: vec![0.0],
            roi_width: 2.0,
            roots: vec![vec![s2], vec![-s2]],
            exact: false,
        },
        Golden {
            name: "circle-line",
            source: "vars x,y; f1 = x^2 + y^2 - 1; f2 = x - y",
            roi_lo: vec![-2.0, -2.0],
            roi_width: 4.0,
            roots: vec![vec![h, h], vec![-h, -h]],
            exact: false,
        },
        Golden {
            name: "parabolas",
            source: "vars x,y; f1 = x^2 - y; f2 = y^2 - x",
            roi_lo: vec![-2.0, -2.0],
            roi_width: 4.0,
            roots: vec![vec![0.0, 0.0], vec![1.0, 1.0]],
            exact: true,
        },
        Golden {
            name: "sine-circle",
            source: "vars x,y; f1 = sin(x) - y; f2 = x^2 + y^2 - 1",
            roi_lo: vec![-2.0, -2.0],
            roi_width: 4.0,
            roots: sin_circle_roots(1_000_000),
            exact: false,
        },
        Golden {
            name: "far-lines",
            source: "vars x,y; f1 = x - 5; f2 = y - 5",
            roi_lo: vec![0.0, 0.0],
            roi_width: 1.0,
            roots: vec![vec![5.0, 5.0]],
            exact: true,
        },
    ]
}

#[derive(PartialEq)]
enum Place {
    Inside,
    Outside,
    Unknown,
}

fn place(root: &IntervalVector, b: &IntervalVector) -> Place {
    let mut inside = true;
    for (r, s) in root.iter().zip(b.iter()) {
        if r.hi() < s.lo() || s.hi() < r.lo() {
            return Place::Outside;
        }
        inside &= s.lo() <= r.lo() && r.hi() <= s.hi();
    }
    if inside {
        Place::Inside
    } else {
        Place::Unknown
    }
}

fn overlap(a: &IntervalVector, b: &IntervalVector) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x.lo() < y.hi() && y.lo() < x.hi())
}

fn within(a: &IntervalVector, b: &IntervalVector) -> bool {
    a.iter()
        .zip(b.iter())
        .all(|(x, y)| y.lo() <= x.lo() && x.hi() <= y.hi())
}

fn config(mode: JacobianMode) -> SolverConfig {
    SolverConfig {
        jacobian_mode: mode,
        stats_enabled: true,
        ..SolverConfig::default()
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn pass_if(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Indices of oracle roots found in each output box; `None` marks a box
/// with an undecidable membership.
fn roots_per_box(out: &IsolationOutput, roots: &[IntervalVector]) -> Vec<Option<Vec<usize>>> {
    out.boxes
        .iter()
        .map(|b| {
            let mut hits = Vec::new();
            for (k, r) in roots.iter().enumerate() {
                match place(r, &b.region) {
                    Place::Inside => hits.push(k),
                    Place::Outside => {}
                    Place::Unknown => return None,
                }
            }
            Some(hits)
        })
        .collect()
}

fn criterion_isolation(gs: &[Golden]) -> Outcome {
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for g in gs {
        let (sys, roi) = (g.sys(), g.roi());
        let out = isolate(&sys, &roi, &config(JacobianMode::Jc)).unwrap();
        let roots = g.enclosures();
        let b0 = roi.to_box();
        let b2 = dilate_box(&b0, Dilation::Two);
        let in_b0: Vec<usize> = (0..roots.len())
            .filter(|&k| place(&roots[k], &b0) != Place::Outside)
            .collect();
        let in_2b0 = (0..roots.len())
            .filter(|&k| place(&roots[k], &b2) != Place::Outside)
            .count();
        summary.push(format!("{} {}/{}", g.name, out.boxes.len(), in_b0.len()));
        if out.status != Status::Complete {
            problems.push(format!("{}: status {:?}", g.name, out.status));
        }
        if out.boxes.len() != in_b0.len() || in_b0.len() != in_2b0 {
            problems.push(format!(
                "{}: {} boxes for {} oracle roots",
                g.name,
                out.boxes.len(),
                in_b0.len()
            ));
        }
        let per_box = roots_per_box(&out, &roots);
        for (i, hits) in per_box.iter().enumerate() {
            match hits {
                Some(h) if h.len() == 1 => {}
                _ => problems.push(format!("{}: box {i} holds {hits:?}", g.name)),
            }
        }
        for &k in &in_b0 {
            let n = per_box.iter().flatten().filter(|h| h.contains(&k)).count();
            if n != 1 {
                problems.push(format!("{}: root {k} in {n} boxes", g.name));
            }
        }
        for (i, a) in out.boxes.iter().enumerate() {
            if !within(&a.region, &b2) {
                problems.push(format!("{}: box {i} leaves 2B0", g.name));
            }
            for b in &out.boxes[i + 1..] {
                if overlap(&a.region, &b.region) {
                    problems.push(format!("{}: overlapping boxes", g.name));
                }
            }
        }
        let rep = verify_isolation(&out, &sys, Some(&roots));
        if !rep.passed() {
            problems.push(format!("{}: verify {:?}", g.name, rep.violations));
        }
    }
    let detail = if problems.is_empty() {
        summary.join(", ")
    } else {
        problems.join("; ")
    };
    pass_if(problems.is_empty(), detail)
}

fn random_box(rng: &mut ChaCha8Rng, n: usize, max_depth: u32) -> AlignedBox {
    let depth = rng.gen_range(0..=max_depth);
    let coords = (0..n).map(|_| rng.gen_range(0..1u64 << depth)).collect();
    AlignedBox::new(depth, coords)
}

fn criterion_soundness(gs: &[Golden]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let ctx = RoundingContext::default();
    let per_system = 10_000 / gs.len();
    let (mut violations, mut unknown) = (Vec::new(), 0usize);
    let mut successes = [0usize; 3];
    for g in gs {
        let (sys, roi, roots) = (g.sys(), g.roi(), g.enclosures());
        for _ in 0..per_system {
            let cell = random_box(&mut rng, sys.dim(), 10);
            let b = cell.realize(&roi);
            if test_c0(&sys, &b, &ctx).success {
                successes[0] += 1;
                for r in &roots {
                    match place(r, &b) {
                        Place::Inside => violations.push(format!("{} C0 {cell:?}", g.name)),
                        Place::Unknown => unknown += 1,
                        Place::Outside => {}
                    }
                }
            }
            if test_mk(&sys, &b, &ctx).success {
                successes[1] += 1;
                let b2 = dilate_box(&b, Dilation::Two);
                if roots.iter().all(|r| place(r, &b2) == Place::Outside) {
                    violations.push(format!("{} MK {cell:?}", g.name));
                }
            }
            if test_jc(&sys, &b, &ctx).success {
                successes[2] += 1;
                let b3 = dilate_box(&b, Dilation::Three);
                if roots.iter().filter(|r| place(r, &b3) == Place::Inside).count() > 1 {
                    violations.push(format!("{} JC {cell:?}", g.name));
                }
            }
        }
    }
    let detail = format!(
        "{} boxes, successes C0/MK/JC {}/{}/{}, {} violations, {} undecidable",
        per_system * gs.len(),
        successes[0],
        successes[1],
        successes[2],
        violations.len(),
        unknown
    );
    pass_if(violations.is_empty() && unknown == 0, detail)
}

fn roots_in_roi(g: &Golden) -> Vec<RootEnclosure> {
    let b0 = g.roi().to_box();
    g.enclosures()
        .into_iter()
        .filter(|r| place(r, &b0) != Place::Outside)
        .map(|r| {
            if g.exact {
                RootEnclosure::exact(r.mid())
            } else {
                RootEnclosure::from_region(r)
            }
        })
        .collect()
}

fn diag_ctx() -> RoundingContext {
    RoundingContext::new(128)
}

fn criterion_sure_mk(gs: &[Golden]) -> Outcome {
    let ctx = diag_ctx();
    let mut lines = Vec::new();
    let mut ok = true;
    for g in gs {
        let (sys, roi) = (g.sys(), g.roi());
        for root in roots_in_roi(g) {
            let l2 = match sure_success_check(&sys, &root, &roi, &ctx) {
                Ok(rep) => rep.lambda2,
                Err(e) => {
                    ok = false;
                    lines.push(format!("{}: {e}", g.name));
                    continue;
                }
            };
            let top = depth_for_width(&roi, &l2.value);
            let trials: Vec<_> = run_trials(&sys, &root, &roi, TrialTest::Miranda, top + 2, &l2.value, None, &ctx)
                .into_iter()
                .filter(|t| t.cell.depth >= top)
                .collect();
            let failed = trials.iter().filter(|t| !t.success).count();
            ok &= failed == 0 && !trials.is_empty();
            lines.push(format!(
                "{} l2={:.4e} {}/{}",
                g.name,
                l2.value.to_f64(),
                trials.len() - failed,
                trials.len()
            ));
        }
    }
    pass_if(ok, lines.join(", "))
}

fn criterion_sure_jc(gs: &[Golden]) -> Outcome {
    let ctx = diag_ctx();
    let mut lines = Vec::new();
    let mut ok = true;
    for g in gs {
        let (sys, roi) = (g.sys(), g.roi());
        for root in roots_in_roi(g) {
            let l3 = match certiroot::certify_lambda3(&sys, &root, roi.width(), &ctx) {
                Ok(r) => r,
                Err(e) => {
                    ok = false;
                    lines.push(format!("{}: {e}", g.name));
                    continue;
                }
            };
            let top = depth_for_width(&roi, &l3.value);
            let trials: Vec<_> = run_trials(&sys, &root, &roi, TrialTest::Jacobian, top + 2, &l3.value, None, &ctx)
                .into_iter()
                .filter(|t| t.cell.depth >= top)
                .collect();
            let failed = trials.iter().filter(|t| !t.success).count();
            ok &= failed == 0 && !trials.is_empty();
            lines.push(format!(
                "{} l3={:.4e} {}/{}",
                g.name,
                l3.value.to_f64(),
                trials.len() - failed,
                trials.len()
            ));
        }
    }
    pass_if(ok, lines.join(", "))
}

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.6) {
            Expr::var(rng.gen_range(0..2))
        } else {
            Expr::constant(Dyadic::ratio_pow2(rng.gen_range(-12..=12), 2))
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.gen_range(0..8) {
        0 => Expr::add(a, random_expr(rng, depth - 1)),
        1 => Expr::sub(a, random_expr(rng, depth - 1)),
        2 | 3 => Expr::mul(a, random_expr(rng, depth - 1)),
        4 => Expr::pow(a, rng.gen_range(2..=3)),
        5 => Expr::sin(a),
        6 => Expr::cos(a),
        _ => Expr::exp(Expr::mul(Expr::constant(Dyadic::ratio_pow2(1, 2)), a)),
    }
}

fn criterion_excess_width() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ctx = RoundingContext::default();
    let grid = 40usize;
    let (mut checked, mut violations, mut worst) = (0, 0, 0.0f64);
    while checked < 1000 {
        let e = random_expr(&mut rng, 4);
        let grad: Vec<Expr> = (0..2).map(|k| e.differentiate(k)).collect();
        let depth = rng.gen_range(1..=8);
        let w = 4.0 / (1u64 << depth) as f64;
        let lo: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0 - w)).collect();
        let b = IntervalVector::new(lo.iter().map(|&l| Interval::new(d(l), d(l + w))).collect());
        let Ok(mv) = mean_value(&e, &grad, &b, &Dyadic::pow2(-80), &ctx) else {
            continue;
        };
        let Ok(partials) = grad
            .iter()
            .map(|g| g.eval_natural(&b.0, &ctx))
            .collect::<Result<Vec<_>, _>>()
        else {
            continue;
        };
        let (mut smin, mut smax) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..=grid {
            for j in 0..=grid {
                let p = [lo[0] + w * i as f64 / grid as f64, lo[1] + w * j as f64 / grid as f64];
                let v = e.eval_f64(&p);
                smin = smin.min(v);
                smax = smax.max(v);
            }
        }
        if !smin.is_finite() || !smax.is_finite() {
            continue;
        }
        checked += 1;
        let (mlo, mhi) = mv.to_f64_pair();
        let q = (mlo - smin).abs().max((mhi - smax).abs());
        let sum_w: f64 = partials.iter().map(|p| p.width().to_f64()).sum();
        let sum_mag: f64 = partials.iter().map(|p| p.mag().to_f64()).sum();
        // the grid misses at most this much of the range at each end
        let slack = sum_mag * w / (2.0 * grid as f64) + 1e-12 * (1.0 + smax.abs().max(smin.abs()));
        let bound = 2.0 * w * sum_w + slack;
        worst = worst.max(q / bound);
        if q > bound {
            violations += 1;
        }
    }
    pass_if(
        violations == 0,
        format!("{checked} boxes, {violations} violations, worst q/bound {worst:.3}"),
    )
}

fn criterion_accuracy(gs: &[Golden]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let base = RoundingContext::default();
    let fine = base.with_precision(4 * base.precision_bits);
    let (mut checked, mut violations) = (0usize, Vec::new());
    let close = |a: &Interval, b: &Interval, w: &Dyadic| a.hausdorff(b) <= w.shl(-4);
    'outer: while checked < 1000 {
        for g in gs {
            if checked >= 1000 {
                break 'outer;
            }
            let (sys, roi) = (g.sys(), g.roi());
            let cell = random_box(&mut rng, sys.dim(), 14);
            let b = cell.realize(&roi);
            let w = b.width();
            let tol = Dyadic::pow2(w.ilog2() - 6);
            checked += 1;
            let mut compare = |label: &str, x: Option<Interval>, y: Option<Interval>| {
                if let (Some(x), Some(y)) = (x, y) {
                    if !close(&x, &y, &w) {
                        violations.push(format!("{} {label} {cell:?}", g.name));
                    }
                }
            };
            let (c, cf) = (base.adapted_to_width(&w), fine.adapted_to_width(&w));
            for i in 0..sys.dim() {
                compare(
                    "f",
                    mean_value(sys.component(i), sys.gradient(i), &b, &tol, &c).ok(),
                    mean_value(sys.component(i), sys.gradient(i), &b, &tol, &cf).ok(),
                );
                for j in 0..sys.dim() {
                    compare(
                        "df",
                        mean_value(sys.partial(i, j), sys.partial_gradient(i, j), &b, &tol, &c).ok(),
                        mean_value(sys.partial(i, j), sys.partial_gradient(i, j), &b, &tol, &cf).ok(),
                    );
                }
            }
            compare(
                "det",
                test_jc(&sys, &b, &base).enclosure,
                test_jc(&sys, &b, &fine).enclosure,
            );
            if let Ok(pre) = build_preconditioner(&sys, &b.mid(), &base) {
                for face in box_faces(&dilate_box(&b, Dilation::Two)) {
                    compare(
                        "g",
                        preconditioned_on_face(&sys, &pre.matrix, face.axis, &face.region, &tol, &c).ok(),
                        preconditioned_on_face(&sys, &pre.matrix, face.axis, &face.region, &tol, &cf).ok(),
                    );
                }
            }
        }
    }
    pass_if(
        violations.is_empty(),
        format!(
            "{checked} boxes at {} vs {} bits, {} violations",
            base.precision_bits,
            fine.precision_bits,
            violations.len()
        ),
    )
}

fn criterion_pairing(gs: &[Golden]) -> Outcome {
    let (mut events, mut bad, mut mismatched) = (0usize, Vec::new(), Vec::new());
    for g in gs {
        let (sys, roi, roots) = (g.sys(), g.roi(), g.enclosures());
        let jcs = isolate(&sys, &roi, &config(JacobianMode::Jcs)).unwrap();
        for p in &jcs.pairings {
            events += 1;
            let inside = roots.iter().filter(|r| place(r, &p.region) == Place::Inside).count();
            let unknown = roots.iter().filter(|r| place(r, &p.region) == Place::Unknown).count();
            if inside != 1 || unknown != 0 {
                bad.push(format!("{} {:?}", g.name, p.cell));
            }
        }
        let jc = isolate(&sys, &roi, &config(JacobianMode::Jc)).unwrap();
        let found = |out: &IsolationOutput| {
            let mut v: Vec<usize> = roots_per_box(out, &roots).into_iter().flatten().flatten().collect();
            v.sort();
            v
        };
        if found(&jc) != found(&jcs) || jcs.status != Status::Complete {
            mismatched.push(g.name);
        }
    }
    pass_if(
        bad.is_empty() && mismatched.is_empty(),
        format!(
            "{events} pairing events, {} without a unique root, mismatched systems {mismatched:?}",
            bad.len()
        ),
    )
}

fn criterion_depth(gs: &[Golden]) -> Outcome {
    let ctx = diag_ctx();
    let mut lines = Vec::new();
    let mut hard = true;
    for g in gs {
        let (sys, roi) = (g.sys(), g.roi());
        let b2 = dilate_box(&roi.to_box(), Dilation::Two);
        let roots: Vec<RootEnclosure> = g
            .enclosures()
            .into_iter()
            .filter(|r| place(r, &b2) != Place::Outside)
            .map(RootEnclosure::from_region)
            .collect();
        let Ok(reports) = roots
            .iter()
            .map(|r| sure_success_check(&sys, r, &roi, &ctx))
            .collect::<Result<Vec<_>, _>>()
        else {
            lines.push(format!("{}: radii not computable", g.name));
            continue;
        };
        if reports.iter().any(|r| r.lambda2.unbounded || r.lambda3.unbounded) {
            lines.push(format!("{}: unbounded radii, skipped", g.name));
            continue;
        }
        let ell1 = reports
            .iter()
            .map(|r| r.lambda2.value.clone().min(r.lambda3.value.clone()).to_f64())
            .fold(f64::INFINITY, f64::min);
        let witnesses: Vec<Vec<f64>> = g.roots.clone();
        let est = estimate_exclusion_margin(&sys, &roi, &witnesses, ell1, 10_000, 8, &ctx);
        let out = isolate(&sys, &roi, &config(JacobianMode::Jc)).unwrap();
        match depth_soft_check(&roi, &reports, &est, out.stats.max_depth_reached) {
            Some(c) => {
                let flag = if c.within { "ok" } else { "WARN" };
                lines.push(format!("{} depth {} <= {} {flag}", g.name, c.observed, c.bound));
                if matches!(g.name, "x^2-2" | "circle-line") && !c.within {
                    hard = false;
                }
            }
            None => lines.push(format!("{}: no radius", g.name)),
        }
    }
    pass_if(hard, lines.join(", "))
}

fn criterion_determinism(gs: &[Golden]) -> Outcome {
    let mut differing = Vec::new();
    for g in gs {
        for mode in [JacobianMode::Jc, JacobianMode::Jcs] {
            let (sys, roi) = (g.sys(), g.roi());
            let render = || IsolationReport::new(&sys, &isolate(&sys, &roi, &config(mode)).unwrap()).to_json();
            let first = render();
            if (0..2).any(|_| render() != first) {
                differing.push(format!("{} {mode}", g.name));
            }
        }
    }
    pass_if(
        differing.is_empty(),
        format!("{} systems x 2 modes x 3 runs, differing {differing:?}", gs.len()),
    )
}

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() -> ExitCode {
    let gs = goldens();
    let sine_roots = gs.iter().find(|g| g.name == "sine-circle").map_or(0, |g| g.roots.len());
    println!("oracle: sine-circle has {sine_roots} roots by sign scan");
    let criteria: Vec<(&str, Criterion)> = vec![
        ("isolation correctness", Box::new(|| criterion_isolation(&gs))),
        ("soundness chain", Box::new(|| criterion_soundness(&gs))),
        ("sure success MK", Box::new(|| criterion_sure_mk(&gs))),
        ("sure success JC", Box::new(|| criterion_sure_jc(&gs))),
        ("excess width bound", Box::new(criterion_excess_width)),
        ("effective accuracy", Box::new(|| criterion_accuracy(&gs))),
        ("JC*/MK pairing", Box::new(|| criterion_pairing(&gs))),
        ("depth bound (soft)", Box::new(|| criterion_depth(&gs))),
        ("determinism", Box::new(|| criterion_determinism(&gs))),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        failed += !o.passed as usize;
        println!(
            "{tag} {} {name} ({:.1}s): {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
