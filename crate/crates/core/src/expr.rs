//! Expression trees over `n` variables with symbolic differentiation and
//! interval evaluation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, RoundingContext};
use crate::elementary;
use crate::error::EvalError;
use crate::interval::Interval;

/// Arguments to `exp` above this bound are rejected rather than evaluated.
const EXP_ARG_LIMIT: i64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    Var(usize),
    Const(Dyadic),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn constant(c: impl Into<Dyadic>) -> Expr {
        Expr::Const(c.into())
    }

    pub fn zero() -> Expr {
        Expr::Const(Dyadic::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(Dyadic::one())
    }

    fn as_const(&self) -> Option<&Dyadic> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(Dyadic::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| *c == Dyadic::one())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
            _ if a.is_zero() => b,
            _ if b.is_zero() => a,
            (_, Expr::Neg(inner)) => Expr::sub(a, (**inner).clone()),
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
            _ if b.is_zero() => a,
            _ if a.is_zero() => Expr::neg(b),
            _ if a == b => Expr::zero(),
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
            _ if a.is_zero() || b.is_zero() => Expr::zero(),
            _ if a.is_one() => b,
            _ if b.is_one() => a,
            (_, Expr::Const(_)) => Expr::Mul(Box::new(b), Box::new(a)),
            _ if a == b => Expr::pow(a, 2),
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        if b.is_one() {
            return a;
        }
        if a.is_zero() && b.as_const().is_some_and(|c| !c.is_zero()) {
            return Expr::zero();
        }
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, k: i32) -> Expr {
        match (k, &a) {
            (0, _) => Expr::one(),
            (1, _) => a,
            (k, Expr::Const(c)) if k > 0 => Expr::Const(c.pow(k as u32)),
            (k, Expr::Pow(base, j)) if k > 0 && *j > 0 && j.checked_mul(k).is_some() => {
                Expr::pow((**base).clone(), j * k)
            }
            _ => Expr::Pow(Box::new(a), k),
        }
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::Sin(Box::new(a))
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::Cos(Box::new(a))
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::Exp(Box::new(a))
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Const(_) => None,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Symbolic partial derivative with respect to variable `var`.
    pub fn differentiate(&self, var: usize) -> Expr {
        match self {
            Expr::Var(i) => {
                if *i == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Const(_) => Expr::zero(),
            Expr::Neg(a) => Expr::neg(a.differentiate(var)),
            Expr::Add(a, b) => Expr::add(a.differentiate(var), b.differentiate(var)),
            Expr::Sub(a, b) => Expr::sub(a.differentiate(var), b.differentiate(var)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.differentiate(var), (**b).clone()),
                Expr::mul((**a).clone(), b.differentiate(var)),
            ),
            Expr::Div(a, b) => {
                let da = a.differentiate(var);
                let db = b.differentiate(var);
                if db.is_zero() {
                    return Expr::div(da, (**b).clone());
                }
                Expr::div(
                    Expr::sub(Expr::mul(da, (**b).clone()), Expr::mul((**a).clone(), db)),
                    Expr::pow((**b).clone(), 2),
                )
            }
            Expr::Pow(a, k) => Expr::mul(
                Expr::mul(Expr::constant(*k as i64), Expr::pow((**a).clone(), k - 1)),
                a.differentiate(var),
            ),
            Expr::Sin(a) => Expr::mul(Expr::cos((**a).clone()), a.differentiate(var)),
            Expr::Cos(a) => Expr::mul(Expr::neg(Expr::sin((**a).clone())), a.differentiate(var)),
            Expr::Exp(a) => Expr::mul(self.clone(), a.differentiate(var)),
        }
    }

    /// Natural interval extension: every operation replaced by its outward
    /// rounded interval counterpart.
    pub fn eval_natural(&self, x: &[Interval], ctx: &RoundingContext) -> Result<Interval, EvalError> {
        let prec = ctx.precision_bits;
        Ok(match self {
            Expr::Var(i) => x
                .get(*i)
                .cloned()
                .ok_or_else(|| EvalError::Domain(format!("variable index {i} out of range")))?,
            Expr::Const(c) => Interval::point(c.clone()).round_out(ctx),
            Expr::Neg(a) => a.eval_natural(x, ctx)?.neg(),
            Expr::Add(a, b) => a.eval_natural(x, ctx)?.add(&b.eval_natural(x, ctx)?, ctx),
            Expr::Sub(a, b) => a.eval_natural(x, ctx)?.sub(&b.eval_natural(x, ctx)?, ctx),
            Expr::Mul(a, b) => a.eval_natural(x, ctx)?.mul(&b.eval_natural(x, ctx)?, ctx),
            Expr::Div(a, b) => {
                let den = b.eval_natural(x, ctx)?;
                a.eval_natural(x, ctx)?
                    .div(&den, ctx)
                    .map_err(|_| EvalError::Domain(format!("division by {den} which contains zero")))?
            }
            Expr::Pow(a, k) => {
                let base = a.eval_natural(x, ctx)?;
                base.powi(*k, ctx)
                    .map_err(|_| EvalError::Domain(format!("negative power of {base} which contains zero")))?
            }
            Expr::Sin(a) => elementary::sin(&a.eval_natural(x, ctx)?, prec),
            Expr::Cos(a) => elementary::cos(&a.eval_natural(x, ctx)?, prec),
            Expr::Exp(a) => {
                let arg = a.eval_natural(x, ctx)?;
                if arg.hi() > &Dyadic::from_i64(EXP_ARG_LIMIT) {
                    return Err(EvalError::Domain(format!("exp argument {arg} too large")));
                }
                if arg.lo() < &Dyadic::from_i64(-EXP_ARG_LIMIT) {
                    let hi = elementary::exp_point(arg.hi(), prec);
                    Interval::new(Dyadic::zero(), hi.hi().clone())
                } else {
                    elementary::exp(&arg, prec)
                }
            }
        })
    }

    /// Plain floating-point evaluation, for oracles and sampling estimates.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Var(i) => x[*i],
            Expr::Const(c) => c.to_f64(),
            Expr::Neg(a) => -a.eval_f64(x),
            Expr::Add(a, b) => a.eval_f64(x) + b.eval_f64(x),
            Expr::Sub(a, b) => a.eval_f64(x) - b.eval_f64(x),
            Expr::Mul(a, b) => a.eval_f64(x) * b.eval_f64(x),
            Expr::Div(a, b) => a.eval_f64(x) / b.eval_f64(x),
            Expr::Pow(a, k) => a.eval_f64(x).powi(*k),
            Expr::Sin(a) => a.eval_f64(x).sin(),
            Expr::Cos(a) => a.eval_f64(x).cos(),
            Expr::Exp(a) => a.eval_f64(x).exp(),
        }
    }

    /// Infix rendering with the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        self.write(&mut out, names, 0);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if c.is_negative() => 3,
            _ => 5,
        }
    }

    fn write(&self, out: &mut String, names: &[String], parent: u8) {
        let own = self.precedence();
        let wrap = own < parent;
        if wrap {
            out.push('(');
        }
        let name = |i: usize| names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
        match self {
            Expr::Var(i) => out.push_str(&name(*i)),
            Expr::Const(c) => out.push_str(&render_const(c)),
            Expr::Neg(a) => {
                out.push('-');
                a.write(out, names, 4);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => " + ",
                    Expr::Sub(..) => " - ",
                    Expr::Mul(..) => "*",
                    _ => "/",
                };
                a.write(out, names, own);
                out.push_str(op);
                // right operand of a non-associative operator binds tighter
                b.write(out, names, own + 1);
            }
            Expr::Pow(a, k) => {
                a.write(out, names, 5);
                out.push('^');
                if *k < 0 {
                    out.push_str(&format!("({k})"));
                } else {
                    out.push_str(&k.to_string());
                }
            }
            Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => {
                let f = match self {
                    Expr::Sin(_) => "sin",
                    Expr::Cos(_) => "cos",
                    _ => "exp",
                };
                out.push_str(f);
                out.push('(');
                a.write(out, names, 0);
                out.push(')');
            }
        }
        if wrap {
            out.push(')');
        }
    }
}

fn render_const(c: &Dyadic) -> String {
    if c.is_integer() || c.exponent() >= -64 {
        c.to_decimal_exact()
    } else {
        c.to_hex_string()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x() -> Expr {
        Expr::var(0)
    }
    fn y() -> Expr {
        Expr::var(1)
    }
    fn ctx() -> RoundingContext {
        RoundingContext::new(64)
    }
    fn d(v: f64) -> Dyadic {
        Dyadic::from_f64(v).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let sq = Expr::pow(x(), 2);
        assert_eq!(sq.differentiate(0), Expr::mul(Expr::constant(2), x()));
        assert_eq!(Expr::sin(x()).differentiate(0), Expr::cos(x()));
        assert_eq!(Expr::mul(x(), y()).differentiate(1), x());
        assert_eq!(Expr::mul(x(), y()).differentiate(0), y());
        assert!(Expr::constant(5).differentiate(0).is_zero());
    }

    #[test]
    fn simplification_absorbs_units() {
        assert_eq!(Expr::add(Expr::zero(), x()), x());
        assert_eq!(Expr::mul(Expr::one(), x()), x());
        assert!(Expr::mul(x(), Expr::zero()).is_zero());
        assert_eq!(Expr::mul(x(), x()), Expr::pow(x(), 2));
        assert_eq!(Expr::pow(x(), 1), x());
        assert!(Expr::sub(y(), y()).is_zero());
    }

    #[test]
    fn natural_examples() {
        let e = Expr::sub(Expr::pow(x(), 2), x());
        let r = e.eval_natural(&[Interval::from_i64(0, 1)], &ctx()).unwrap();
        assert_eq!(r, Interval::from_i64(-1, 1));
        let c = Expr::constant(5)
            .eval_natural(&[Interval::from_i64(-3, 8)], &ctx())
            .unwrap();
        assert_eq!(c, Interval::from_i64(5, 5));
        let quarter = Interval::new(Dyadic::zero(), elementary::pi(80).hi().half());
        let s = Expr::sin(x()).eval_natural(&[quarter], &ctx()).unwrap();
        assert!(s.contains(&Dyadic::zero()) && s.contains(&Dyadic::one()));
    }

    #[test]
    fn division_by_zero_interval_is_domain_error() {
        let e = Expr::div(Expr::one(), x());
        let err = e.eval_natural(&[Interval::point(Dyadic::zero())], &ctx());
        assert!(matches!(err, Err(EvalError::Domain(_))));
        let err = Expr::pow(x(), -2).eval_natural(&[Interval::from_i64(-1, 1)], &ctx());
        assert!(matches!(err, Err(EvalError::Domain(_))));
    }

    #[test]
    fn render_round_trips_structure() {
        let names = vec!["x".to_string(), "y".to_string()];
        let e = Expr::sub(
            Expr::mul(x(), Expr::add(y(), Expr::one())),
            Expr::pow(Expr::sin(x()), 2),
        );
        assert_eq!(e.render(&names), "x*(y + 1) - sin(x)^2");
        let e = Expr::sub(x(), Expr::sub(y(), Expr::one()));
        assert_eq!(e.render(&names), "x - (y - 1)");
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![(0usize..2).prop_map(Expr::var), (-4i64..5).prop_map(Expr::constant),];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
                (inner.clone(), 2i32..4).prop_map(|(a, k)| Expr::pow(a, k)),
                inner.clone().prop_map(Expr::sin),
                inner.clone().prop_map(Expr::cos),
                inner.prop_map(|a| Expr::exp(Expr::mul(Expr::constant(Dyadic::ratio_pow2(1, 3)), a))),
            ]
        })
    }

    proptest! {
        #[test]
        fn natural_encloses_points(e in arb_expr(), a in -2.0f64..2.0, b in -2.0f64..2.0,
                                   t in 0.0f64..1.0, u in 0.0f64..1.0) {
            let bx = [
                Interval::new(d(a.min(b)), d(a.max(b))),
                Interval::new(d(-0.5), d(0.75)),
            ];
            let enc = e.eval_natural(&bx, &ctx()).unwrap();
            let p = [a.min(b) + t * (a - b).abs(), -0.5 + u * 1.25];
            let pt = [Interval::point(d(p[0])), Interval::point(d(p[1]))];
            let at = e.eval_natural(&pt, &ctx()).unwrap();
            prop_assert!(at.is_subset_of(&enc), "{} at {:?}: {} not in {}", e, p, at, enc);
            let v = e.eval_f64(&p);
            let (lo, hi) = enc.to_f64_pair();
            let slack = 1e-9 * v.abs().max(1.0);
            prop_assert!(lo - slack <= v && v <= hi + slack);
        }

        #[test]
        fn partials_match_central_differences(e in arb_expr(), a in -1.5f64..1.5, b in -1.5f64..1.5) {
            let h = 2f64.powi(-20);
            for var in 0..2 {
                let mut p = [a, b];
                let mut q = [a, b];
                p[var] += h;
                q[var] -= h;
                let fd = (e.eval_f64(&p) - e.eval_f64(&q)) / (2.0 * h);
                let sym = e.differentiate(var).eval_f64(&[a, b]);
                let scale = sym.abs().max(fd.abs()).max(1.0);
                prop_assert!((fd - sym).abs() <= 1e-6 * scale, "{e}: d/dx{var} {sym} vs {fd}");
            }
        }
    }
}
