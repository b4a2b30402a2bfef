//! Sure-success radii around simple roots and the trials that check them.
//!
//! Every `certify_*` function returns a lower bound on its radius: boxes
//! containing the root whose width does not exceed the returned value are
//! guaranteed to pass the corresponding test. Discs around the root are
//! enclosed by their circumscribing boxes, which only shrinks the radii.

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, Round, RoundingContext};
use crate::error::{DiagnosticsError, EvalError};
use crate::geometry::{box_faces, dilate_box, AlignedBox, Dilation, Roi, DEPTH_LIMIT};
use crate::interval::Interval;
use crate::linalg::{approx_inverse_with_certificate, interval_matrix_det, inverse_norm_bound, IntervalVector};
use crate::predicates::{build_preconditioner, test_jc, test_mk};
use crate::system::{lipschitz_bound, FunctionSystem};

/// Bisection steps after the bracketing phase.
const BISECTION_STEPS: u32 = 48;
/// Halvings tried before giving up on finding any certified radius.
const MAX_HALVINGS: u32 = 200;
const NEWTON_STEPS: usize = 80;

/// A small box certified to hold exactly one simple root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootEnclosure {
    pub region: IntervalVector,
    /// Approximation of the root inside `region`.
    pub witness: Vec<Dyadic>,
}

impl RootEnclosure {
    /// An exactly known root.
    pub fn exact(point: Vec<Dyadic>) -> Self {
        RootEnclosure {
            region: IntervalVector::from_point(&point),
            witness: point,
        }
    }

    /// A region known by other means to hold exactly one root.
    pub fn from_region(region: IntervalVector) -> Self {
        RootEnclosure {
            witness: region.mid(),
            region,
        }
    }

    /// Refines `hint` by Newton's method, then certifies a small box around
    /// the result: the Miranda test on `B` puts a root in `2B` and the
    /// Jacobian test on `B` makes it the only one in `3B`.
    pub fn from_hint(sys: &FunctionSystem, hint: &[Dyadic], ctx: &RoundingContext) -> Result<Self, DiagnosticsError> {
        let prec = ctx.precision_bits.max(128);
        let wctx = ctx.with_precision(prec);
        let mut x = hint.to_vec();
        let tiny = Dyadic::pow2(-(prec as i64) + 16);
        for _ in 0..NEWTON_STEPS {
            let point = IntervalVector::from_point(&x);
            let fx: Vec<Dyadic> = sys
                .components()
                .iter()
                .map(|f| f.eval_natural(&point.0, &wctx).map(|v| v.mid()))
                .collect::<Result<_, _>>()?;
            let jac = sys.jacobian_natural(&point, &wctx)?;
            let inv = approx_inverse_with_certificate(&jac.mid(), &wctx)
                .map_err(|e| DiagnosticsError::SingularEnclosure(format!("Jacobian at the hint: {e}")))?;
            let mut largest = Dyadic::zero();
            for (i, xi) in x.iter_mut().enumerate() {
                let step = inv
                    .inverse
                    .row(i)
                    .iter()
                    .zip(&fx)
                    .fold(Dyadic::zero(), |acc, (m, f)| &acc + &(m * f));
                largest = largest.max(step.abs());
                *xi = (&*xi - &step).round(prec, Round::Nearest);
            }
            if largest <= tiny {
                break;
            }
        }
        for e in [40i64, 30, 50, 20, 60] {
            let h = Dyadic::pow2(-e - 1);
            let b = IntervalVector::new(x.iter().map(|c| Interval::new(c - &h, c + &h)).collect());
            if test_jc(sys, &b, ctx).success && test_mk(sys, &b, ctx).success {
                return Ok(RootEnclosure {
                    region: dilate_box(&b, Dilation::Two),
                    witness: x,
                });
            }
        }
        Err(DiagnosticsError::SingularEnclosure(
            "no box around the refined hint passes both the Miranda and Jacobian tests".into(),
        ))
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }
}

/// A certified radius. `capped` is set when the certificate already holds
/// at the cap (the ROI width); `unbounded` additionally records that the
/// curvature bound vanished, so no finite radius limits the test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Radius {
    pub value: Dyadic,
    pub capped: bool,
    pub unbounded: bool,
}

impl Radius {
    fn finite(value: Dyadic) -> Self {
        Radius {
            value,
            capped: false,
            unbounded: false,
        }
    }

    fn capped(cap: &Dyadic) -> Self {
        Radius {
            value: cap.clone(),
            capped: true,
            unbounded: false,
        }
    }

    fn unbounded(cap: &Dyadic) -> Self {
        Radius {
            value: cap.clone(),
            capped: true,
            unbounded: true,
        }
    }

    pub fn min(&self, other: &Radius) -> Radius {
        match self.value.cmp(&other.value) {
            std::cmp::Ordering::Less => self.clone(),
            std::cmp::Ordering::Greater => other.clone(),
            std::cmp::Ordering::Equal => Radius {
                value: self.value.clone(),
                capped: self.capped && other.capped,
                unbounded: self.unbounded && other.unbounded,
            },
        }
    }
}

/// Largest radius in `(0, cap]` found to satisfy `ok`, assuming `ok` holds
/// on an initial segment. Returns `None` if nothing down to `cap * 2^-200`
/// passes.
fn search_radius(cap: &Dyadic, mut ok: impl FnMut(&Dyadic) -> bool) -> Option<(Dyadic, bool)> {
    if ok(cap) {
        return Some((cap.clone(), true));
    }
    let mut lo = cap.half();
    let mut halvings = 0;
    while !ok(&lo) {
        halvings += 1;
        if halvings > MAX_HALVINGS {
            return None;
        }
        lo = lo.half();
    }
    let mut hi = lo.shl(1);
    for _ in 0..BISECTION_STEPS {
        let mid = (&lo + &hi).half();
        if ok(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, false))
}

fn sqrt_n_upper(n: usize) -> Dyadic {
    Dyadic::from_i64(n as i64).sqrt_round(64, Round::Up)
}

fn factorial(n: usize) -> Dyadic {
    Dyadic::from_i64((1..=n as i64).product())
}

fn max_entry(m: &crate::linalg::DyadicMatrix) -> Dyadic {
    m.rows().into_iter().flatten().max().unwrap_or_else(Dyadic::zero)
}

fn singular(e: impl std::fmt::Display) -> DiagnosticsError {
    DiagnosticsError::SingularEnclosure(e.to_string())
}

/// Region covering every disc of radius `2 sqrt(n) r` about a point of the
/// enclosure.
fn disc_region(root: &RootEnclosure, r: &Dyadic) -> IntervalVector {
    let rho = &(&sqrt_n_upper(root.dim()) * r).shl(1);
    root.region.inflate(rho)
}

fn inverse_norm_on(
    sys: &FunctionSystem,
    region: &IntervalVector,
    ctx: &RoundingContext,
) -> Result<Dyadic, DiagnosticsError> {
    let jac = sys.jacobian_natural(region, ctx)?;
    inverse_norm_bound(&jac, ctx).map_err(singular)
}

/// Lower bound on the radius below which the abstract Miranda test
/// succeeds: the largest `r` found with `27 n N(r) r <= 1`, where `N(r)`
/// bounds `||J^-1|| ||K||` over the disc region of radius `2 sqrt(n) r`.
pub fn certify_lambda1(
    sys: &FunctionSystem,
    root: &RootEnclosure,
    cap: &Dyadic,
    ctx: &RoundingContext,
) -> Result<Radius, DiagnosticsError> {
    inverse_norm_on(sys, &root.region, ctx)?;
    let n = sys.dim();
    let factor = Dyadic::from_i64(27 * n as i64);
    let big = sys.k_matrix(&disc_region(root, cap), ctx)?;
    if big.norm_inf().is_zero() {
        return Ok(Radius::unbounded(cap));
    }
    let ok = |r: &Dyadic| -> bool {
        let region = disc_region(root, r);
        let Ok(inv) = inverse_norm_on(sys, &region, ctx) else {
            return false;
        };
        let Ok(k) = sys.k_matrix(&region, ctx) else {
            return false;
        };
        &(&(&factor * &inv) * &k.norm_inf()) * r <= Dyadic::one()
    };
    match search_radius(cap, ok) {
        Some((r, true)) => Ok(Radius::capped(&r)),
        Some((r, false)) => Ok(Radius::finite(r)),
        None => Err(singular("no radius satisfies the curvature condition")),
    }
}

/// Largest Lipschitz bound over the natural forms of the first partials on
/// `region`.
fn partials_lipschitz(
    sys: &FunctionSystem,
    region: &IntervalVector,
    ctx: &RoundingContext,
) -> Result<Dyadic, EvalError> {
    let n = sys.dim();
    let mut l = Dyadic::zero();
    for j in 0..n {
        for k in 0..n {
            l = l.max(lipschitz_bound(sys.partial_gradient(j, k), region, ctx)?);
        }
    }
    Ok(l)
}

/// `1 / (64 n^2 L ||J^-1||)` over the disc region of radius
/// `2 sqrt(n) lambda1`, rounded down.
pub fn lambda_hat1(
    sys: &FunctionSystem,
    root: &RootEnclosure,
    lambda1: &Radius,
    cap: &Dyadic,
    ctx: &RoundingContext,
) -> Result<Radius, DiagnosticsError> {
    let region = disc_region(root, &lambda1.value);
    let l = partials_lipschitz(sys, &region, ctx)?;
    if l.is_zero() {
        return Ok(Radius::unbounded(cap));
    }
    let inv = inverse_norm_on(sys, &region, ctx)?;
    let n = sys.dim() as i64;
    let denom = &(&Dyadic::from_i64(64 * n * n) * &l) * &inv;
    let value = Dyadic::one().div_round(&denom, ctx.precision_bits.max(64), Round::Down);
    if value >= *cap {
        Ok(Radius::capped(cap))
    } else {
        Ok(Radius::finite(value))
    }
}

/// Sure-success radius of the interval Miranda test.
pub fn certify_lambda2(lambda1: &Radius, lambda_hat1: &Radius) -> Radius {
    lambda1.min(lambda_hat1)
}

/// Certified `(|det J(alpha)| lower bound, max |J_ij(alpha)| upper bound)`.
fn jacobian_at_root(
    sys: &FunctionSystem,
    root: &RootEnclosure,
    ctx: &RoundingContext,
) -> Result<(Dyadic, Dyadic), DiagnosticsError> {
    let jac = sys.jacobian_natural(&root.region, ctx)?;
    let det = interval_matrix_det(&jac, ctx).mig();
    if det.is_zero() {
        return Err(singular("Jacobian determinant enclosure contains zero"));
    }
    let u = jac
        .rows()
        .into_iter()
        .flatten()
        .map(|e| e.mag())
        .max()
        .unwrap_or_else(Dyadic::zero);
    Ok((det, u))
}

/// True when `det > 3 n n! v (u + 3 v x)^(n-1) x`, evaluated exactly.
fn jacobian_margin_holds(det: &Dyadic, n: usize, u: &Dyadic, v: &Dyadic, x: &Dyadic) -> bool {
    let three = Dyadic::from_i64(3);
    let base = u + &(&(&three * v) * x);
    let term = &(&(&(&Dyadic::from_i64(3 * n as i64) * &factorial(n)) * v) * &base.pow(n as u32 - 1)) * x;
    *det > term
}

/// Lower bound on the smallest positive root of
/// `|det J(alpha)| - 3 n n! V (U + 3 V x)^(n-1) x`. `V` bounds the
/// curvature matrix over the region within `2x` of the root, which holds
/// `3B` for every width-`x` box containing it.
pub fn certify_lambda3(
    sys: &FunctionSystem,
    root: &RootEnclosure,
    cap: &Dyadic,
    ctx: &RoundingContext,
) -> Result<Radius, DiagnosticsError> {
    let (det, u) = jacobian_at_root(sys, root, ctx)?;
    let n = sys.dim();
    let v_at = |x: &Dyadic| -> Option<Dyadic> {
        sys.k_matrix(&root.region.inflate(&x.shl(1)), ctx)
            .ok()
            .map(|k| max_entry(&k))
    };
    if v_at(cap).is_some_and(|v| v.is_zero()) {
        return Ok(Radius::unbounded(cap));
    }
    let ok = |x: &Dyadic| v_at(x).is_some_and(|v| jacobian_margin_holds(&det, n, &u, &v, x));
    match search_radius(cap, ok) {
        Some((r, true)) => Ok(Radius::capped(&r)),
        Some((r, false)) => Ok(Radius::finite(r)),
        None => Err(singular("no radius satisfies the determinant condition")),
    }
}

/// Lipschitz constant valid for the forms of every `f_i` and every first
/// partial on `3 * roi`.
pub fn global_lipschitz(sys: &FunctionSystem, roi: &Roi, ctx: &RoundingContext) -> Result<Dyadic, EvalError> {
    let region = dilate_box(&roi.to_box(), Dilation::Three);
    let mut l = partials_lipschitz(sys, &region, ctx)?;
    for i in 0..sys.dim() {
        l = l.max(lipschitz_bound(sys.gradient(i), &region, ctx)?);
    }
    Ok(l)
}

/// As [`certify_lambda3`] with the global Lipschitz constant in place of
/// `V`.
pub fn certify_lambda4(
    sys: &FunctionSystem,
    root: &RootEnclosure,
    roi: &Roi,
    ctx: &RoundingContext,
) -> Result<Radius, DiagnosticsError> {
    let (det, u) = jacobian_at_root(sys, root, ctx)?;
    let l = global_lipschitz(sys, roi, ctx)?;
    let cap = roi.width();
    if l.is_zero() {
        return Ok(Radius::unbounded(cap));
    }
    let n = sys.dim();
    match search_radius(cap, |x| jacobian_margin_holds(&det, n, &u, &l, x)) {
        Some((r, true)) => Ok(Radius::capped(&r)),
        Some((r, false)) => Ok(Radius::finite(r)),
        None => Err(singular("no radius satisfies the determinant condition")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialTest {
    Miranda,
    Jacobian,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub test: TrialTest,
    pub cell: AlignedBox,
    pub width: Dyadic,
    pub success: bool,
    /// The width is within a certified radius, so failure is a violation.
    pub required: bool,
    /// For Miranda trials within `lambda1`: whether every preconditioned
    /// slope on the faces of `2B` has width at most `1/(32n)`, which on its
    /// own forces success.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_condition: Option<bool>,
}

impl Trial {
    pub fn violated(&self) -> bool {
        !self.success && (self.required || self.slope_condition == Some(true))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoryCheck {
    pub name: String,
    pub passed: bool,
    pub trials: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SureSuccessReport {
    pub root: RootEnclosure,
    pub lambda1: Radius,
    pub lambda_hat1: Radius,
    pub lambda2: Radius,
    pub lambda3: Radius,
    pub lambda4: Radius,
    /// Widest aligned width from which every deeper trial level succeeded.
    pub widest_miranda_success: Option<Dyadic>,
    pub widest_jacobian_success: Option<Dyadic>,
    pub checks: Vec<TheoryCheck>,
    pub trials: Vec<Trial>,
    pub passed: bool,
}

fn floor_ratio(a: &Dyadic, b: &Dyadic) -> BigInt {
    let (ea, eb) = (a.exponent(), b.exponent());
    let e = ea.min(eb);
    let num = a.mantissa() << (ea - e) as usize;
    let den = b.mantissa() << (eb - e) as usize;
    num.div_floor(&den)
}

fn ceil_ratio(a: &Dyadic, b: &Dyadic) -> BigInt {
    -floor_ratio(&-a.clone(), b)
}

/// Aligned boxes at `depth` whose closed realization meets `region`.
pub fn boxes_meeting(roi: &Roi, region: &IntervalVector, depth: u32) -> Vec<AlignedBox> {
    let side = roi.side(depth);
    let last: BigInt = (BigInt::from(1u8) << depth as usize) - 1;
    let mut ranges = Vec::with_capacity(roi.dim());
    for (iv, lo) in region.iter().zip(roi.lo()) {
        let first: BigInt = ceil_ratio(&(iv.lo() - lo), &side) - 1;
        let first = first.max(BigInt::from(0));
        let end = floor_ratio(&(iv.hi() - lo), &side).min(last.clone());
        if first > end {
            return Vec::new();
        }
        let (Ok(a), Ok(b)) = (u64::try_from(first), u64::try_from(end)) else {
            return Vec::new();
        };
        ranges.push(a..=b);
    }
    let mut out = vec![Vec::new()];
    for r in ranges {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u64>| {
                r.clone().map(move |k| {
                    let mut p = prefix.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(|c| AlignedBox::new(depth, c)).collect()
}

/// Smallest depth whose aligned width does not exceed `w`.
pub fn depth_for_width(roi: &Roi, w: &Dyadic) -> u32 {
    (0..=DEPTH_LIMIT).find(|&d| roi.side(d) <= *w).unwrap_or(DEPTH_LIMIT)
}

/// Whether the preconditioned slopes on every face of `2B` are narrow
/// enough to force the Miranda test.
fn slope_condition(sys: &FunctionSystem, b: &IntervalVector, ctx: &RoundingContext) -> Option<bool> {
    let n = sys.dim();
    let pre = build_preconditioner(sys, &b.mid(), ctx).ok()?;
    let limit = Dyadic::one().div_round(&Dyadic::from_i64(32 * n as i64), 64, Round::Down);
    let ctx = ctx.adapted_to_width(&b.width());
    for face in box_faces(&dilate_box(b, Dilation::Two)) {
        let i = face.axis;
        for k in 0..n {
            let mut slope = Interval::point(Dyadic::zero());
            for j in 0..n {
                let d = sys.partial(j, k).eval_natural(&face.region.0, &ctx).ok()?;
                slope = slope.add(&d.scale(&pre.matrix[(i, j)], &ctx), &ctx);
            }
            if slope.width() > limit {
                return Some(false);
            }
        }
    }
    Some(true)
}

/// Runs `test` on every aligned box at depths `0..=max_depth` that may
/// contain the root.
#[allow(clippy::too_many_arguments)]
pub fn run_trials(
    sys: &FunctionSystem,
    root: &RootEnclosure,
    roi: &Roi,
    test: TrialTest,
    max_depth: u32,
    required_width: &Dyadic,
    slope_width: Option<&Dyadic>,
    ctx: &RoundingContext,
) -> Vec<Trial> {
    let mut trials = Vec::new();
    for depth in 0..=max_depth {
        let width = roi.side(depth);
        for cell in boxes_meeting(roi, &root.region, depth) {
            let real = cell.realize(roi);
            let success = match test {
                TrialTest::Miranda => test_mk(sys, &real, ctx).success,
                TrialTest::Jacobian => test_jc(sys, &real, ctx).success,
            };
            let slope = slope_width
                .filter(|l| width <= **l)
                .and_then(|_| slope_condition(sys, &real, ctx));
            trials.push(Trial {
                test,
                required: width <= *required_width,
                width: width.clone(),
                cell,
                success,
                slope_condition: slope,
            });
        }
    }
    trials
}

fn widest_success(roi: &Roi, trials: &[Trial], test: TrialTest) -> Option<Dyadic> {
    let mut widest = None;
    let deepest = trials.iter().filter(|t| t.test == test).map(|t| t.cell.depth).max()?;
    for d in (0..=deepest).rev() {
        let level: Vec<_> = trials.iter().filter(|t| t.test == test && t.cell.depth == d).collect();
        if level.iter().all(|t| t.success) {
            widest = Some(roi.side(d));
        } else {
            break;
        }
    }
    widest
}

fn check(name: &str, trials: &[&Trial], violated: impl Fn(&Trial) -> bool) -> TheoryCheck {
    let violations = trials.iter().filter(|t| violated(t)).count();
    TheoryCheck {
        name: name.into(),
        passed: violations == 0,
        trials: trials.len(),
        violations,
    }
}

/// Certified radii for `root` and the sure-success trials at widths
/// `lambda`, `lambda/2` and `lambda/4` (and every coarser level).
pub fn sure_success_check(
    sys: &FunctionSystem,
    root: &RootEnclosure,
    roi: &Roi,
    ctx: &RoundingContext,
) -> Result<SureSuccessReport, DiagnosticsError> {
    let cap = roi.width();
    let lambda1 = certify_lambda1(sys, root, cap, ctx)?;
    let lambda_hat1 = lambda_hat1(sys, root, &lambda1, cap, ctx)?;
    let lambda2 = certify_lambda2(&lambda1, &lambda_hat1);
    let lambda3 = certify_lambda3(sys, root, cap, ctx)?;
    let lambda4 = certify_lambda4(sys, root, roi, ctx)?;

    let quarter = |r: &Radius| depth_for_width(roi, &r.value).saturating_add(2).min(DEPTH_LIMIT);
    let jc_radius = lambda3.value.clone().max(lambda4.value.clone());
    let mut trials = run_trials(
        sys,
        root,
        roi,
        TrialTest::Miranda,
        quarter(&lambda2),
        &lambda2.value,
        Some(&lambda1.value),
        ctx,
    );
    trials.extend(run_trials(
        sys,
        root,
        roi,
        TrialTest::Jacobian,
        depth_for_width(roi, &jc_radius).saturating_add(2).min(DEPTH_LIMIT),
        &jc_radius,
        None,
        ctx,
    ));
    trials.sort_by(|a, b| (a.test, a.cell.depth, &a.cell.coords).cmp(&(b.test, b.cell.depth, &b.cell.coords)));

    let mk: Vec<&Trial> = trials.iter().filter(|t| t.test == TrialTest::Miranda).collect();
    let jc: Vec<&Trial> = trials.iter().filter(|t| t.test == TrialTest::Jacobian).collect();
    let widest_miranda_success = widest_success(roi, &trials, TrialTest::Miranda);
    let widest_jacobian_success = widest_success(roi, &trials, TrialTest::Jacobian);
    let conservative = |widest: &Option<Dyadic>, r: &Dyadic, any: bool| {
        !any || widest.as_ref().is_some_and(|w| roi.side(depth_for_width(roi, r)) <= *w)
    };
    let mk_any = mk.iter().any(|t| t.required);
    let jc_any = jc.iter().any(|t| t.required);
    let checks = vec![
        check("miranda_sure_success", &mk, |t| t.required && !t.success),
        check("miranda_slope_condition", &mk, |t| {
            t.slope_condition == Some(true) && !t.success
        }),
        check("jacobian_sure_success", &jc, |t| t.required && !t.success),
        TheoryCheck {
            name: "radii_conservative".into(),
            passed: conservative(&widest_miranda_success, &lambda2.value, mk_any)
                && conservative(&widest_jacobian_success, &jc_radius, jc_any),
            trials: 2,
            violations: 0,
        },
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(SureSuccessReport {
        root: root.clone(),
        lambda1,
        lambda_hat1,
        lambda2,
        lambda3,
        lambda4,
        widest_miranda_success,
        widest_jacobian_success,
        checks,
        trials,
        passed,
    })
}

/// Sampled, uncertified estimates of the exclusion constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionEstimate {
    pub samples: usize,
    /// Samples that landed outside the removed discs.
    pub probes: usize,
    /// Estimated infimum of the largest distance to a component zero set.
    pub d0: Option<Dyadic>,
    /// `d0 / (2 sqrt(n))`.
    pub lambda_c0: Option<Dyadic>,
    /// Estimated infimum of `max_i |f_i| / L`.
    pub u: Option<Dyadic>,
    /// `u / 2`.
    pub lambda_interval_c0: Option<Dyadic>,
}

impl ExclusionEstimate {
    /// The smaller of the two sampled exclusion radii.
    pub fn radius(&self) -> Option<Dyadic> {
        match (&self.lambda_c0, &self.lambda_interval_c0) {
            (Some(a), Some(b)) => Some(a.clone().min(b.clone())),
            (a, b) => a.clone().or(b.clone()),
        }
    }
}

/// Distance from `p` to the zero set of component `i`: a converged
/// projection gives a point on the set, otherwise the first-order estimate
/// `|f| / |grad f|` is used.
fn zero_set_distance(sys: &FunctionSystem, i: usize, p: &[f64]) -> f64 {
    let value = |x: &[f64]| sys.component(i).eval_f64(x);
    let grad = |x: &[f64]| -> Vec<f64> { (0..p.len()).map(|k| sys.partial(i, k).eval_f64(x)).collect() };
    let f0 = value(p);
    let g0 = grad(p);
    let n0: f64 = g0.iter().map(|g| g * g).sum::<f64>().sqrt();
    let first_order = if n0 > 0.0 { f0.abs() / n0 } else { f64::INFINITY };
    let mut x = p.to_vec();
    for _ in 0..40 {
        let f = value(&x);
        if f.abs() < 1e-13 {
            let d: f64 = x.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            return d.min(first_order);
        }
        let g = grad(&x);
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if gg.is_nan() || gg <= 0.0 || !f.is_finite() {
            break;
        }
        for (xk, gk) in x.iter_mut().zip(&g) {
            *xk -= f * gk / gg;
        }
    }
    first_order
}

/// Estimates the exclusion constants by sampling `2 * roi` with the discs
/// of radius `ell1` around `roots` removed. The corners and center of the
/// region come first, then `samples` seeded random points; larger sample
/// counts extend the same sequence.
pub fn estimate_exclusion_margin(
    sys: &FunctionSystem,
    roi: &Roi,
    roots: &[Vec<f64>],
    ell1: f64,
    samples: usize,
    seed: u64,
    ctx: &RoundingContext,
) -> ExclusionEstimate {
    let n = sys.dim();
    let region = dilate_box(&roi.to_box(), Dilation::Two);
    let bounds: Vec<(f64, f64)> = region.iter().map(|i| i.to_f64_pair()).collect();
    let mut points: Vec<Vec<f64>> = (0..1usize << n)
        .map(|c| {
            bounds
                .iter()
                .enumerate()
                .map(|(k, b)| if c >> k & 1 == 1 { b.1 } else { b.0 })
                .collect()
        })
        .collect();
    points.push(bounds.iter().map(|b| 0.5 * (b.0 + b.1)).collect());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    points.extend((0..samples).map(|_| bounds.iter().map(|b| rng.gen_range(b.0..=b.1)).collect()));

    let lipschitz = global_lipschitz(sys, roi, ctx)
        .map(|l| l.to_f64())
        .unwrap_or(f64::INFINITY);
    let mut d0 = f64::INFINITY;
    let mut u = f64::INFINITY;
    let mut probes = 0;
    for p in &points {
        let removed = roots
            .iter()
            .any(|r| r.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() < ell1);
        if removed {
            continue;
        }
        probes += 1;
        let sep = (0..n).map(|i| zero_set_distance(sys, i, p)).fold(0.0, f64::max);
        d0 = d0.min(sep);
        let size = sys.eval_f64(p).iter().map(|v| v.abs()).fold(0.0, f64::max);
        u = u.min(size / lipschitz);
    }
    let to_dyadic = |v: f64| (v.is_finite()).then(|| Dyadic::from_f64(v)).flatten();
    let d0 = to_dyadic(d0);
    let u = to_dyadic(u);
    let root_n = (n as f64).sqrt();
    ExclusionEstimate {
        samples,
        probes,
        lambda_c0: d0.as_ref().and_then(|d| to_dyadic(d.to_f64() / (2.0 * root_n))),
        lambda_interval_c0: u.as_ref().map(Dyadic::half),
        d0,
        u,
    }
}

/// `ceil(log2(4 w / lambda))`: the deepest level at which boxes can still
/// be processed when every test succeeds below width `lambda`.
pub fn depth_bound(roi_width: &Dyadic, lambda: &Dyadic) -> u32 {
    let target = roi_width.shl(2);
    let mut k = 0u32;
    let mut scaled = lambda.clone();
    while scaled < target {
        scaled = scaled.shl(1);
        k += 1;
    }
    k
}

/// Observed solver depth against the bound implied by the certified radii
/// and the sampled exclusion radius. Exceeding it is a warning only, since
/// the exclusion radius is not certified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthCheck {
    pub lambda: Dyadic,
    pub bound: u32,
    pub observed: u32,
    pub within: bool,
}

pub fn depth_soft_check(
    roi: &Roi,
    reports: &[SureSuccessReport],
    exclusion: &ExclusionEstimate,
    observed: u32,
) -> Option<DepthCheck> {
    let radii = reports
        .iter()
        .flat_map(|r| [r.lambda2.value.clone(), r.lambda3.value.clone()])
        .chain(exclusion.radius())
        .filter(Dyadic::is_positive);
    let lambda = radii.min()?;
    let bound = depth_bound(roi.width(), &lambda);
    Some(DepthCheck {
        lambda,
        bound,
        observed,
        within: observed <= bound,
    })
}
