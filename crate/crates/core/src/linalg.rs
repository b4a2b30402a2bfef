//! Interval vectors and matrices, enclosures of determinants, and certified
//! approximate inverses of point matrices.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, Round, RoundingContext};
use crate::error::NumericError;
use crate::interval::Interval;

/// A box in `R^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalVector(pub Vec<Interval>);

impl IntervalVector {
    pub fn new(entries: Vec<Interval>) -> Self {
        IntervalVector(entries)
    }

    pub fn from_point(p: &[Dyadic]) -> Self {
        IntervalVector(p.iter().cloned().map(Interval::point).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.0.iter()
    }

    pub fn mid(&self) -> Vec<Dyadic> {
        self.0.iter().map(Interval::mid).collect()
    }

    /// Largest component width (all boxes handled here are hypercubes or faces).
    pub fn width(&self) -> Dyadic {
        self.0.iter().map(Interval::width).max().unwrap_or_else(Dyadic::zero)
    }

    pub fn contains_point(&self, p: &[Dyadic]) -> bool {
        self.0.iter().zip(p).all(|(i, x)| i.contains(x))
    }

    pub fn is_subset_of(&self, other: &IntervalVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a.is_subset_of(b))
    }

    /// True when the open interiors intersect.
    pub fn interiors_overlap(&self, other: &IntervalVector) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .all(|(a, b)| a.lo() < b.hi() && b.lo() < a.hi())
    }

    /// Box with every side widened by `r` on both ends.
    pub fn inflate(&self, r: &Dyadic) -> IntervalVector {
        IntervalVector(self.0.iter().map(|i| Interval::new(i.lo() - r, i.hi() + r)).collect())
    }

    pub fn hull(&self, other: &IntervalVector) -> IntervalVector {
        IntervalVector(self.0.iter().zip(&other.0).map(|(a, b)| a.hull(b)).collect())
    }
}

impl Index<usize> for IntervalVector {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl IndexMut<usize> for IntervalVector {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.0[i]
    }
}

/// Square `n x n` matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

pub type IntervalMatrix = Matrix<Interval>;
pub type DyadicMatrix = Matrix<Dyadic>;

impl<T: Clone> Matrix<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let n = self.n - 1;
        Matrix::from_fn(n, |i, j| {
            let r = if i < skip_row { i } else { i + 1 };
            let c = if j < skip_col { j } else { j + 1 };
            self[(r, c)].clone()
        })
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

impl DyadicMatrix {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, |i, j| if i == j { Dyadic::one() } else { Dyadic::zero() })
    }

    /// Infinity norm (max absolute row sum), exact.
    pub fn norm_inf(&self) -> Dyadic {
        (0..self.n)
            .map(|i| self.row(i).iter().fold(Dyadic::zero(), |acc, x| &acc + &x.abs()))
            .max()
            .unwrap_or_else(Dyadic::zero)
    }

    pub fn to_interval(&self) -> IntervalMatrix {
        Matrix::from_fn(self.n, |i, j| Interval::point(self[(i, j)].clone()))
    }

    /// Exact product.
    pub fn mul(&self, other: &DyadicMatrix) -> DyadicMatrix {
        Matrix::from_fn(self.n, |i, j| {
            (0..self.n).fold(Dyadic::zero(), |acc, k| &acc + &(&self[(i, k)] * &other[(k, j)]))
        })
    }
}

impl IntervalMatrix {
    pub fn mid(&self) -> DyadicMatrix {
        Matrix::from_fn(self.n, |i, j| self[(i, j)].mid())
    }

    /// Upper bound on the infinity norm of every member matrix.
    pub fn norm_inf_upper(&self) -> Dyadic {
        (0..self.n)
            .map(|i| self.row(i).iter().fold(Dyadic::zero(), |acc, x| &acc + &x.mag()))
            .max()
            .unwrap_or_else(Dyadic::zero)
    }

    /// `point * self` in interval arithmetic.
    pub fn left_mul(&self, point: &DyadicMatrix, ctx: &RoundingContext) -> IntervalMatrix {
        Matrix::from_fn(self.n, |i, j| {
            (0..self.n).fold(Interval::point(Dyadic::zero()), |acc, k| {
                acc.add(&self[(k, j)].scale(&point[(i, k)], ctx), ctx)
            })
        })
    }

    pub fn mul_vec(&self, v: &IntervalVector, ctx: &RoundingContext) -> IntervalVector {
        IntervalVector(
            (0..self.n)
                .map(|i| {
                    (0..self.n).fold(Interval::point(Dyadic::zero()), |acc, k| {
                        acc.add(&self[(i, k)].mul(&v[k], ctx), ctx)
                    })
                })
                .collect(),
        )
    }
}

/// Enclosure of `{det A : A in m}`.
///
/// Cofactor expansion for `n <= 4`; interval Gaussian elimination with
/// partial pivoting above that, falling back to cofactors when every pivot
/// candidate contains zero.
pub fn interval_matrix_det(m: &IntervalMatrix, ctx: &RoundingContext) -> Interval {
    assert!(m.n() >= 1, "determinant of an empty matrix");
    if m.n() <= 4 {
        return cofactor_det(m, ctx);
    }
    gaussian_det(m, ctx).unwrap_or_else(|| cofactor_det(m, ctx))
}

fn cofactor_det(m: &IntervalMatrix, ctx: &RoundingContext) -> Interval {
    let n = m.n();
    match n {
        1 => m[(0, 0)].clone(),
        2 => m[(0, 0)].mul(&m[(1, 1)], ctx).sub(&m[(0, 1)].mul(&m[(1, 0)], ctx), ctx),
        _ => {
            let mut acc = Interval::point(Dyadic::zero());
            for j in 0..n {
                if m[(0, j)].is_point() && m[(0, j)].lo().is_zero() {
                    continue;
                }
                let term = m[(0, j)].mul(&cofactor_det(&m.minor(0, j), ctx), ctx);
                acc = if j % 2 == 0 {
                    acc.add(&term, ctx)
                } else {
                    acc.sub(&term, ctx)
                };
            }
            acc
        }
    }
}

fn gaussian_det(m: &IntervalMatrix, ctx: &RoundingContext) -> Option<Interval> {
    let n = m.n();
    let mut a = m.clone();
    let mut det = Interval::point(Dyadic::one());
    for k in 0..n {
        let pivot_row = (k..n)
            .filter(|&r| !a[(r, k)].contains_zero())
            .max_by(|&r, &s| a[(r, k)].mig().cmp(&a[(s, k)].mig()))?;
        if pivot_row != k {
            for j in 0..n {
                let tmp = a[(k, j)].clone();
                a[(k, j)] = a[(pivot_row, j)].clone();
                a[(pivot_row, j)] = tmp;
            }
            det = det.neg();
        }
        let pivot = a[(k, k)].clone();
        det = det.mul(&pivot, ctx);
        for r in k + 1..n {
            let factor = a[(r, k)].div(&pivot, ctx).ok()?;
            for j in k + 1..n {
                let upd = factor.mul(&a[(k, j)], ctx);
                a[(r, j)] = a[(r, j)].sub(&upd, ctx);
            }
        }
    }
    Some(det)
}

/// Approximate inverse together with a certified bound on `||M A - I||_inf`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedInverse {
    pub inverse: DyadicMatrix,
    pub residual_bound: Dyadic,
    pub precision_bits: u32,
}

impl CertifiedInverse {
    /// A residual below one proves both the matrix and its approximate
    /// inverse nonsingular.
    pub fn certifies_nonsingular(&self) -> bool {
        self.residual_bound < Dyadic::one()
    }
}

fn gauss_jordan(a: &DyadicMatrix, prec: u32) -> Option<DyadicMatrix> {
    let n = a.n();
    let mut lhs = a.clone();
    let mut inv = DyadicMatrix::identity(n);
    let r = |x: Dyadic| x.round(prec, Round::Nearest);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| lhs[(i, k)].abs().cmp(&lhs[(j, k)].abs()))?;
        if lhs[(p, k)].is_zero() {
            return None;
        }
        if p != k {
            for j in 0..n {
                let t = lhs[(k, j)].clone();
                lhs[(k, j)] = lhs[(p, j)].clone();
                lhs[(p, j)] = t;
                let t = inv[(k, j)].clone();
                inv[(k, j)] = inv[(p, j)].clone();
                inv[(p, j)] = t;
            }
        }
        let pivot = lhs[(k, k)].clone();
        for j in 0..n {
            lhs[(k, j)] = lhs[(k, j)].div_round(&pivot, prec, Round::Nearest);
            inv[(k, j)] = inv[(k, j)].div_round(&pivot, prec, Round::Nearest);
        }
        for i in 0..n {
            if i == k || lhs[(i, k)].is_zero() {
                continue;
            }
            let f = lhs[(i, k)].clone();
            for j in 0..n {
                lhs[(i, j)] = r(&lhs[(i, j)] - &(&f * &lhs[(k, j)]));
                inv[(i, j)] = r(&inv[(i, j)] - &(&f * &inv[(k, j)]));
            }
        }
    }
    Some(inv)
}

/// Approximate inverse of a point matrix at the context precision, retried at
/// doubled precision until the residual certificate drops below one or the
/// ceiling is reached.
pub fn approx_inverse_with_certificate(
    a: &DyadicMatrix,
    ctx: &RoundingContext,
) -> Result<CertifiedInverse, NumericError> {
    let mut ctx = *ctx;
    loop {
        let prec = ctx.precision_bits;
        let Some(inverse) = gauss_jordan(a, prec) else {
            return Err(NumericError::SingularToWorkingPrecision);
        };
        let mut e = a.to_interval().left_mul(&inverse, &ctx);
        for i in 0..a.n() {
            e[(i, i)] = e[(i, i)].sub(&Interval::point(Dyadic::one()), &ctx);
        }
        let residual_bound = e.norm_inf_upper().round(prec, Round::Up);
        let cert = CertifiedInverse {
            inverse,
            residual_bound,
            precision_bits: prec,
        };
        if cert.certifies_nonsingular() {
            return Ok(cert);
        }
        match ctx.escalated() {
            Some(next) => ctx = next,
            None => return Err(NumericError::SingularToWorkingPrecision),
        }
    }
}

/// Upper bound on `sup { ||A^-1||_inf : A in m }` via the midpoint inverse
/// `M` and the Neumann bound `||M|| / (1 - ||M m - I||)`.
pub fn inverse_norm_bound(m: &IntervalMatrix, ctx: &RoundingContext) -> Result<Dyadic, NumericError> {
    let cert = approx_inverse_with_certificate(&m.mid(), ctx)?;
    let mut e = m.left_mul(&cert.inverse, ctx);
    for i in 0..m.n() {
        e[(i, i)] = e[(i, i)].sub(&Interval::point(Dyadic::one()), ctx);
    }
    let en = e.norm_inf_upper();
    let one = Dyadic::one();
    if en >= one {
        return Err(NumericError::SingularToWorkingPrecision);
    }
    let denom = (&one - &en).round(ctx.precision_bits, Round::Down);
    Ok(cert.inverse.norm_inf().div_round(&denom, ctx.precision_bits, Round::Up))
}
