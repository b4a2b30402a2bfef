//! Square systems `f = (f_1, ..., f_n)` with their derivative tables, and
//! the box forms built from them.

use crate::dyadic::{Dyadic, Round, RoundingContext};
use crate::error::{EvalError, ParseError};
use crate::expr::Expr;
use crate::interval::Interval;
use crate::linalg::{DyadicMatrix, IntervalMatrix, IntervalVector, Matrix};
use crate::parse::{parse_source, SystemSource};

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionSystem {
    names: Vec<String>,
    components: Vec<Expr>,
    /// `jacobian[i][j] = d f_i / d x_j`
    jacobian: Vec<Vec<Expr>>,
    /// `hessians[i][j][k] = d^2 f_i / d x_j d x_k`
    hessians: Vec<Vec<Vec<Expr>>>,
    det: Expr,
    det_gradient: Vec<Expr>,
}

impl FunctionSystem {
    pub fn new(names: Vec<String>, components: Vec<Expr>) -> Result<Self, ParseError> {
        let n = names.len();
        if n == 0 || components.len() != n {
            return Err(ParseError::DimensionMismatch {
                components: components.len(),
                variables: n,
            });
        }
        if let Some(k) = components.iter().filter_map(Expr::max_var).find(|&k| k >= n) {
            return Err(ParseError::UnknownVariable(format!("x{}", k + 1)));
        }
        let jacobian: Vec<Vec<Expr>> = components
            .iter()
            .map(|f| (0..n).map(|j| f.differentiate(j)).collect())
            .collect();
        let hessians = jacobian
            .iter()
            .map(|row| {
                row.iter()
                    .map(|d| (0..n).map(|k| d.differentiate(k)).collect())
                    .collect()
            })
            .collect();
        let det = symbolic_det(&jacobian);
        let det_gradient = (0..n).map(|k| det.differentiate(k)).collect();
        Ok(FunctionSystem {
            names,
            components,
            jacobian,
            hessians,
            det,
            det_gradient,
        })
    }

    /// Builds a system with variables named `x1..xn`.
    pub fn from_exprs(components: Vec<Expr>) -> Result<Self, ParseError> {
        let names = (1..=components.len()).map(|i| format!("x{i}")).collect();
        FunctionSystem::new(names, components)
    }

    pub fn from_source(src: &SystemSource) -> Result<Self, ParseError> {
        FunctionSystem::new(src.vars.clone(), src.components.clone())
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        FunctionSystem::from_source(&parse_source(text)?)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.components[i]
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn partial(&self, i: usize, j: usize) -> &Expr {
        &self.jacobian[i][j]
    }

    pub fn gradient(&self, i: usize) -> &[Expr] {
        &self.jacobian[i]
    }

    pub fn second_partial(&self, i: usize, j: usize, k: usize) -> &Expr {
        &self.hessians[i][j][k]
    }

    /// Gradient of `d f_i / d x_j`.
    pub fn partial_gradient(&self, i: usize, j: usize) -> &[Expr] {
        &self.hessians[i][j]
    }

    /// `det J_f` as a single expression (cofactor expansion).
    pub fn jacobian_det(&self) -> &Expr {
        &self.det
    }

    pub fn jacobian_det_gradient(&self) -> &[Expr] {
        &self.det_gradient
    }

    pub fn eval_f64(&self, p: &[f64]) -> Vec<f64> {
        self.components.iter().map(|f| f.eval_f64(p)).collect()
    }

    pub fn jacobian_f64(&self, p: &[f64]) -> Vec<Vec<f64>> {
        self.jacobian
            .iter()
            .map(|row| row.iter().map(|d| d.eval_f64(p)).collect())
            .collect()
    }

    /// Natural interval Jacobian over a region.
    pub fn jacobian_natural(
        &self,
        region: &IntervalVector,
        ctx: &RoundingContext,
    ) -> Result<IntervalMatrix, EvalError> {
        let n = self.dim();
        let mut rows = Vec::with_capacity(n);
        for row in &self.jacobian {
            rows.push(
                row.iter()
                    .map(|d| d.eval_natural(&region.0, ctx))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        Ok(Matrix::from_rows(rows))
    }

    /// Mean value form enclosure of every Jacobian entry over `region`; each
    /// entry's center value is certified to width at most `tol`.
    pub fn jacobian_mean_value(
        &self,
        region: &IntervalVector,
        tol: &Dyadic,
        ctx: &RoundingContext,
    ) -> Result<IntervalMatrix, EvalError> {
        let n = self.dim();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                row.push(mean_value(
                    &self.jacobian[i][j],
                    &self.hessians[i][j],
                    region,
                    tol,
                    ctx,
                )?);
            }
            rows.push(row);
        }
        Ok(Matrix::from_rows(rows))
    }

    /// Entrywise upper bounds `K_ij >= sum_k |d^2 f_i / d x_j d x_k|` over a region.
    pub fn k_matrix(&self, region: &IntervalVector, ctx: &RoundingContext) -> Result<DyadicMatrix, EvalError> {
        let n = self.dim();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                row.push(lipschitz_bound(&self.hessians[i][j], region, ctx)?);
            }
            rows.push(row);
        }
        Ok(Matrix::from_rows(rows))
    }
}

fn symbolic_det(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    match n {
        1 => m[0][0].clone(),
        2 => Expr::sub(
            Expr::mul(m[0][0].clone(), m[1][1].clone()),
            Expr::mul(m[0][1].clone(), m[1][0].clone()),
        ),
        _ => {
            let mut acc = Expr::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Expr>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let term = Expr::mul(m[0][j].clone(), symbolic_det(&minor));
                acc = if j % 2 == 0 {
                    Expr::add(acc, term)
                } else {
                    Expr::sub(acc, term)
                };
            }
            acc
        }
    }
}

/// Enclosure of `e(p)` of width at most `tol`, escalating precision as
/// needed.
pub fn eval_point_certified(
    e: &Expr,
    p: &[Dyadic],
    tol: &Dyadic,
    ctx: &RoundingContext,
) -> Result<Interval, EvalError> {
    let point: Vec<Interval> = p.iter().cloned().map(Interval::point).collect();
    let mut ctx = *ctx;
    loop {
        let v = e.eval_natural(&point, &ctx)?;
        if v.width() <= *tol {
            return Ok(v);
        }
        ctx = ctx
            .escalated()
            .ok_or(EvalError::PrecisionCeilingExceeded(ctx.max_precision_bits))?;
    }
}

/// Mean value form `e(m) + sum_k grad_k(B) (B_k - m_k)` with `m` the center
/// of `B`. Degenerate components contribute nothing, so a face of a box is
/// expanded about its own center. The value at `m` is certified to width
/// at most `tol`.
pub fn mean_value(
    e: &Expr,
    grad: &[Expr],
    b: &IntervalVector,
    tol: &Dyadic,
    ctx: &RoundingContext,
) -> Result<Interval, EvalError> {
    let m = b.mid();
    let mut acc = eval_point_certified(e, &m, tol, ctx)?;
    for (k, g) in grad.iter().enumerate() {
        if b[k].is_point() || g.is_zero() {
            continue;
        }
        let offset = Interval::symmetric(b[k].radius());
        let slope = g.eval_natural(&b.0, ctx)?;
        acc = acc.add(&slope.mul(&offset, ctx), ctx);
    }
    Ok(acc)
}

/// Upper bound on `sum_k |grad_k(S)|`, a Lipschitz constant (in the
/// infinity norm) of the function whose gradient is `grad` over `S`.
pub fn lipschitz_bound(grad: &[Expr], region: &IntervalVector, ctx: &RoundingContext) -> Result<Dyadic, EvalError> {
    let mut total = Dyadic::zero();
    for g in grad {
        if g.is_zero() {
            continue;
        }
        total = &total + &g.eval_natural(&region.0, ctx)?.mag();
    }
    Ok(total.round(ctx.precision_bits.max(64), Round::Up))
}
