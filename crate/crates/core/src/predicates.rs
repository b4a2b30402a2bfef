//! Box predicates: exclusion (C0), Jacobian determinant (JC and the strict
//! JC*), and the preconditioned Miranda existence test (MK).
//!
//! All tests are one-sided. Success carries a certified claim; failure,
//! including failure caused by a domain or precision error, carries none.

use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, RoundingContext};
use crate::error::{EvalError, NumericError};
use crate::geometry::{box_faces, dilate_box, Dilation};
use crate::interval::Interval;
use crate::linalg::{approx_inverse_with_certificate, interval_matrix_det, DyadicMatrix, IntervalVector};
use crate::system::{eval_point_certified, mean_value, FunctionSystem};

/// What decided a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// `0` is excluded from this component's enclosure.
    Component(usize),
    /// The Miranda sign condition failed on this face.
    Face { axis: usize, upper: bool },
    /// The determinant enclosure excludes (or fails to exclude) zero.
    Determinant,
}

/// Certified sign bound of `g_i` on one face of `2B`: a lower bound on the
/// upper face, an upper bound on the lower face.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceMargin {
    pub axis: usize,
    pub upper: bool,
    pub bound: Dyadic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateOutcome {
    pub success: bool,
    pub witness: Option<Witness>,
    /// Number of interval form evaluations performed.
    pub evaluations: u64,
    /// Set when the test failed because of a domain or precision error.
    pub flag: Option<String>,
    /// Determinant enclosure for the Jacobian tests.
    pub enclosure: Option<Interval>,
    /// Face sign bounds for the Miranda test.
    pub margins: Vec<FaceMargin>,
}

impl PredicateOutcome {
    fn new(success: bool, evaluations: u64) -> Self {
        PredicateOutcome {
            success,
            witness: None,
            evaluations,
            flag: None,
            enclosure: None,
            margins: Vec::new(),
        }
    }

    fn flagged(evaluations: u64, err: impl std::fmt::Display) -> Self {
        PredicateOutcome {
            flag: Some(err.to_string()),
            ..PredicateOutcome::new(false, evaluations)
        }
    }
}

const PRECONDITIONER_BITS: u32 = 64;

/// Largest power of two not exceeding `w * 2^-k` (for `w > 0`).
fn tolerance(w: &Dyadic, k: i64) -> Dyadic {
    Dyadic::pow2(w.ilog2() - k)
}

/// Working context for a box of width `w`: enough bits that rounding is
/// small against `w`.
fn context_for(w: &Dyadic, ctx: &RoundingContext) -> RoundingContext {
    ctx.adapted_to_width(w)
}

/// Exclusion test: succeeds when some `f_i` has a mean value enclosure on
/// `b` that excludes zero.
pub fn test_c0(sys: &FunctionSystem, b: &IntervalVector, ctx: &RoundingContext) -> PredicateOutcome {
    let w = b.width();
    let ctx = context_for(&w, ctx);
    let tol = tolerance(&w, 6);
    let mut evaluations = 0;
    let mut flag = None;
    for i in 0..sys.dim() {
        evaluations += 1;
        match mean_value(sys.component(i), sys.gradient(i), b, &tol, &ctx) {
            Ok(enc) if !enc.contains_zero() => {
                return PredicateOutcome {
                    witness: Some(Witness::Component(i)),
                    ..PredicateOutcome::new(true, evaluations)
                };
            }
            Ok(_) => {}
            Err(e) => flag = Some(e.to_string()),
        }
    }
    PredicateOutcome {
        flag,
        ..PredicateOutcome::new(false, evaluations)
    }
}

/// Jacobian test: `0` not in the interval determinant of the mean value
/// Jacobian over `3b`.
pub fn test_jc(sys: &FunctionSystem, b: &IntervalVector, ctx: &RoundingContext) -> PredicateOutcome {
    let w = b.width();
    let ctx = context_for(&w, ctx);
    let region = dilate_box(b, Dilation::Three);
    let evaluations = (sys.dim() * sys.dim()) as u64;
    match entrywise_det(sys, &region, &tolerance(&w, 5), &ctx) {
        Ok(det) => PredicateOutcome {
            witness: Some(Witness::Determinant),
            enclosure: Some(det.clone()),
            ..PredicateOutcome::new(!det.contains_zero(), evaluations)
        },
        Err(e) => PredicateOutcome::flagged(evaluations, e),
    }
}

fn entrywise_det(
    sys: &FunctionSystem,
    region: &IntervalVector,
    tol: &Dyadic,
    ctx: &RoundingContext,
) -> Result<Interval, EvalError> {
    let jac = sys.jacobian_mean_value(region, tol, ctx)?;
    Ok(interval_matrix_det(&jac, ctx))
}

/// Strict Jacobian test: `0` not in an enclosure of `det J_f` over `3b`.
///
/// The enclosure intersects the mean value form and the natural form of the
/// symbolic determinant with the entrywise determinant used by
/// [`test_jc`], so JC success always implies JC* success.
pub fn test_jc_strict(sys: &FunctionSystem, b: &IntervalVector, ctx: &RoundingContext) -> PredicateOutcome {
    let w = b.width();
    let ctx = context_for(&w, ctx);
    let region = dilate_box(b, Dilation::Three);
    let tol = tolerance(&w, 5);
    let mut evaluations = 0;
    let mut parts = Vec::new();
    let mut flag = None;

    evaluations += 1;
    match mean_value(sys.jacobian_det(), sys.jacobian_det_gradient(), &region, &tol, &ctx) {
        Ok(e) => parts.push(e),
        Err(e) => flag = Some(e.to_string()),
    }
    evaluations += 1;
    match sys.jacobian_det().eval_natural(&region.0, &ctx) {
        Ok(e) => parts.push(e),
        Err(e) => flag = Some(e.to_string()),
    }
    evaluations += (sys.dim() * sys.dim()) as u64;
    match entrywise_det(sys, &region, &tol, &ctx) {
        Ok(e) => parts.push(e),
        Err(e) => flag = Some(e.to_string()),
    }
    let Some(first) = parts.first().cloned() else {
        return PredicateOutcome {
            flag,
            ..PredicateOutcome::new(false, evaluations)
        };
    };
    let enclosure = parts[1..].iter().try_fold(first, |acc, p| acc.intersect(p));
    match enclosure {
        Some(det) => PredicateOutcome {
            witness: Some(Witness::Determinant),
            enclosure: Some(det.clone()),
            flag,
            ..PredicateOutcome::new(!det.contains_zero(), evaluations)
        },
        // every part encloses the true range, so this signals a defect
        None => PredicateOutcome::flagged(evaluations, "inconsistent determinant enclosures"),
    }
}

/// Approximate inverse Jacobian at an anchor point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preconditioner {
    pub anchor: Vec<Dyadic>,
    pub matrix: DyadicMatrix,
    pub residual_bound: Dyadic,
    pub certified_nonsingular: bool,
}

/// Inverts the midpoint of the Jacobian enclosure at `m`.
///
/// The Jacobian and its inverse are computed at a fixed starting precision
/// (escalated only if the residual certificate fails), so the same `m`
/// yields the same matrix whatever the working precision of the caller.
pub fn build_preconditioner(
    sys: &FunctionSystem,
    m: &[Dyadic],
    ctx: &RoundingContext,
) -> Result<Preconditioner, NumericError> {
    let ctx = &RoundingContext::new(PRECONDITIONER_BITS).with_ceiling(ctx.max_precision_bits);
    let point = IntervalVector::from_point(m);
    let jac = sys
        .jacobian_natural(&point, ctx)
        .map_err(|_| NumericError::SingularToWorkingPrecision)?;
    let cert = approx_inverse_with_certificate(&jac.mid(), ctx)?;
    Ok(Preconditioner {
        anchor: m.to_vec(),
        certified_nonsingular: cert.certifies_nonsingular(),
        matrix: cert.inverse,
        residual_bound: cert.residual_bound,
    })
}

/// Miranda test on `2b` for `g = M f` with `M` an approximate inverse of the
/// Jacobian at the center of `b`. Faces are visited axis by axis, upper
/// face first, stopping at the first sign failure.
pub fn test_mk(sys: &FunctionSystem, b: &IntervalVector, ctx: &RoundingContext) -> PredicateOutcome {
    let w = b.width();
    let ctx = context_for(&w, ctx);
    let n = sys.dim();
    let pre = match build_preconditioner(sys, &b.mid(), &ctx) {
        Ok(p) if p.certified_nonsingular => p,
        Ok(_) => return PredicateOutcome::flagged(0, NumericError::SingularToWorkingPrecision),
        Err(e) => return PredicateOutcome::flagged(0, e),
    };
    let m = &pre.matrix;
    let doubled = dilate_box(b, Dilation::Two);
    let mut evaluations = 0;
    let mut margins = Vec::with_capacity(2 * n);
    for face in box_faces(&doubled) {
        let i = face.axis;
        let row_norm = m.row(i).iter().fold(Dyadic::one(), |acc, x| &acc + &x.abs());
        let tol = Dyadic::pow2(w.ilog2() - 7 - row_norm.ilog2());
        evaluations += 1;
        let g = match preconditioned_on_face(sys, m, i, &face.region, &tol, &ctx) {
            Ok(g) => g,
            Err(e) => {
                return PredicateOutcome {
                    witness: Some(Witness::Face {
                        axis: i,
                        upper: face.upper,
                    }),
                    margins,
                    ..PredicateOutcome::flagged(evaluations, e)
                }
            }
        };
        let (ok, bound) = if face.upper {
            (g.lo().is_positive(), g.lo().clone())
        } else {
            (g.hi().is_negative(), g.hi().clone())
        };
        if !ok {
            return PredicateOutcome {
                witness: Some(Witness::Face {
                    axis: i,
                    upper: face.upper,
                }),
                margins,
                ..PredicateOutcome::new(false, evaluations)
            };
        }
        margins.push(FaceMargin {
            axis: i,
            upper: face.upper,
            bound,
        });
    }
    PredicateOutcome {
        margins,
        ..PredicateOutcome::new(true, evaluations)
    }
}

/// Mean value form of `g_i = sum_j M_ij f_j` on a face, expanded at the
/// face center.
pub fn preconditioned_on_face(
    sys: &FunctionSystem,
    m: &DyadicMatrix,
    i: usize,
    face: &IntervalVector,
    tol: &Dyadic,
    ctx: &RoundingContext,
) -> Result<Interval, EvalError> {
    let n = sys.dim();
    let c = face.mid();
    let mut acc = Interval::point(Dyadic::zero());
    for j in 0..n {
        let mij = &m[(i, j)];
        if mij.is_zero() {
            continue;
        }
        let fj = eval_point_certified(sys.component(j), &c, tol, ctx)?;
        acc = acc.add(&fj.scale(mij, ctx), ctx);
    }
    for k in 0..n {
        if face[k].is_point() {
            continue;
        }
        let mut slope = Interval::point(Dyadic::zero());
        for j in 0..n {
            let mij = &m[(i, j)];
            if mij.is_zero() || sys.partial(j, k).is_zero() {
                continue;
            }
            let d = sys.partial(j, k).eval_natural(&face.0, ctx)?;
            slope = slope.add(&d.scale(mij, ctx), ctx);
        }
        acc = acc.add(&slope.mul(&Interval::symmetric(face[k].radius()), ctx), ctx);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> RoundingContext {
        RoundingContext::new(64)
    }

    fn d(v: f64) -> Dyadic {
        Dyadic::from_f64(v).unwrap()
    }

    fn bx(bounds: &[(f64, f64)]) -> IntervalVector {
        IntervalVector(bounds.iter().map(|&(a, b)| Interval::new(d(a), d(b))).collect())
    }

    fn sys(s: &str) -> FunctionSystem {
        FunctionSystem::parse(s).unwrap()
    }

    #[test]
    fn c0_examples() {
        let far = sys("vars x,y; f1 = x - 10; f2 = y");
        let out = test_c0(&far, &bx(&[(0.0, 1.0), (0.0, 1.0)]), &ctx());
        assert!(out.success);
        assert_eq!(out.witness, Some(Witness::Component(0)));

        let id = sys("vars x,y; f1 = x; f2 = y");
        assert!(!test_c0(&id, &bx(&[(-1.0, 1.0), (-1.0, 1.0)]), &ctx()).success);

        let sq = sys("vars x; f1 = x^2 - 2");
        assert!(test_c0(&sq, &bx(&[(0.0, 1.0)]), &ctx()).success);
        assert!(!test_c0(&sq, &bx(&[(1.0, 2.0)]), &ctx()).success);
    }

    #[test]
    fn c0_domain_error_is_failure_with_flag() {
        let s = sys("vars x; f1 = 1/x");
        let out = test_c0(&s, &bx(&[(-1.0, 1.0)]), &ctx());
        assert!(!out.success);
        assert!(out.flag.is_some());
    }

    #[test]
    fn jc_examples() {
        let id = sys("vars x,y; f1 = x; f2 = y");
        assert!(test_jc(&id, &bx(&[(5.0, 6.0), (-3.0, -2.0)]), &ctx()).success);

        let s = sys("vars x,y; f1 = x^2 - y; f2 = y^2 - x");
        assert!(test_jc(&s, &bx(&[(0.875, 1.125), (0.875, 1.125)]), &ctx()).success);
        // 3B = [1/8, 7/8]^2 meets the curve 4xy = 1
        assert!(!test_jc(&s, &bx(&[(0.375, 0.625), (0.375, 0.625)]), &ctx()).success);
    }

    #[test]
    fn jc_strict_examples() {
        let id = sys("vars x,y; f1 = x; f2 = y");
        assert!(test_jc_strict(&id, &bx(&[(5.0, 6.0), (-3.0, -2.0)]), &ctx()).success);

        // det = 3x^2 + 1 > 0, but the interval Jacobian entry 3x^2 on
        // 3B = [-1,2]^2 is enclosed with negative values
        let s = sys("vars x,y; f1 = x^3 - y; f2 = x + y");
        let b = bx(&[(0.0, 1.0), (0.0, 1.0)]);
        assert!(!test_jc(&s, &b, &ctx()).success);
        assert!(test_jc_strict(&s, &b, &ctx()).success);
    }

    #[test]
    fn strict_test_cannot_beat_entrywise_on_separable_determinant() {
        // det = 4xy - 1 has each variable once, so the entrywise
        // enclosure is already the exact range
        let s = sys("vars x,y; f1 = x^2 - y; f2 = y^2 - x");
        for k in 0..40 {
            let lo = -1.0 + 0.05 * k as f64;
            let b = bx(&[(lo, lo + 0.25), (0.3, 0.55)]);
            let jc = test_jc(&s, &b, &ctx());
            let jcs = test_jc_strict(&s, &b, &ctx());
            assert_eq!(jc.success, jcs.success, "box at {lo}");
        }
    }

    #[test]
    fn preconditioner_examples() {
        let id = sys("vars x,y; f1 = x; f2 = y");
        let p = build_preconditioner(&id, &[d(0.3), d(-2.0)], &ctx()).unwrap();
        assert_eq!(p.matrix, DyadicMatrix::identity(2));
        assert!(p.residual_bound.is_zero());
        assert!(p.certified_nonsingular);

        let diag = sys("vars x,y; f1 = 2*x; f2 = 4*y");
        let p = build_preconditioner(&diag, &[d(7.0), d(1.0)], &ctx()).unwrap();
        assert_eq!(p.matrix[(0, 0)], d(0.5));
        assert_eq!(p.matrix[(1, 1)], d(0.25));
        assert!(p.matrix[(0, 1)].is_zero() && p.matrix[(1, 0)].is_zero());

        let s = sys("vars x,y; f1 = x^2 - y^2; f2 = x - y");
        assert_eq!(
            build_preconditioner(&s, &[d(1.0), d(1.0)], &ctx()),
            Err(NumericError::SingularToWorkingPrecision)
        );
    }

    #[test]
    fn mk_examples() {
        let id = sys("vars x,y; f1 = x; f2 = y");
        let out = test_mk(&id, &bx(&[(-0.25, 0.25), (-0.25, 0.25)]), &ctx());
        assert!(out.success);
        assert_eq!(out.margins.len(), 4);
        assert_eq!(out.margins[0].bound, d(0.5));
        assert_eq!(out.margins[1].bound, d(-0.5));

        let far = sys("vars x,y; f1 = x - 5; f2 = y - 5");
        let out = test_mk(&far, &bx(&[(0.0, 1.0), (0.0, 1.0)]), &ctx());
        assert!(!out.success);
        // g_1 = x - 5 is negative on the upper face of 2B already
        assert_eq!(out.witness, Some(Witness::Face { axis: 0, upper: true }));

        let sq = sys("vars x; f1 = x^2 - 2");
        assert!(test_mk(&sq, &bx(&[(1.375, 1.4375)]), &ctx()).success);
    }

    #[test]
    fn mk_on_singular_center_fails_with_flag() {
        let s = sys("vars x,y; f1 = x^2 - y^2; f2 = x - y");
        let out = test_mk(&s, &bx(&[(0.5, 1.5), (0.5, 1.5)]), &ctx());
        assert!(!out.success);
        assert!(out.flag.is_some());
    }

    #[test]
    fn mk_hand_oracle_for_sqrt2() {
        // B = [11/8, 23/16], m = 45/32, g = f / f'(m) = (x^2 - 2)/(45/16);
        // upper face x = 47/32: g = (2209/1024 - 2) * 16/45 > 0,
        // lower face x = 43/32: g = (1849/1024 - 2) * 16/45 < 0
        let upper = (2209.0 / 1024.0 - 2.0) * 16.0 / 45.0;
        let lower = (1849.0 / 1024.0 - 2.0) * 16.0 / 45.0;
        let sq = sys("vars x; f1 = x^2 - 2");
        let out = test_mk(&sq, &bx(&[(1.375, 1.4375)]), &ctx());
        assert!(out.success);
        assert!((out.margins[0].bound.to_f64() - upper).abs() < 1e-12);
        assert!((out.margins[1].bound.to_f64() - lower).abs() < 1e-12);
    }

    #[test]
    fn precision_monotone_on_samples() {
        let s = sys("vars x,y; f1 = sin(x) - y; f2 = x^2 + y^2 - 1");
        for k in 0..16 {
            let a = -1.0 + 0.125 * k as f64;
            let b = bx(&[(a, a + 0.125), (0.5, 0.625)]);
            for (lo, hi) in [(64, 128), (96, 256)] {
                let c_lo = RoundingContext::new(lo);
                let c_hi = RoundingContext::new(hi);
                if test_c0(&s, &b, &c_lo).success {
                    assert!(test_c0(&s, &b, &c_hi).success);
                }
                if test_mk(&s, &b, &c_lo).success {
                    assert!(test_mk(&s, &b, &c_hi).success);
                }
                if test_jc(&s, &b, &c_lo).success {
                    assert!(test_jc(&s, &b, &c_hi).success);
                }
            }
        }
    }
}
