//! Lie-algebra closure of generators, the lower central series, and the
//! nilpotency criterion that decides Steinness of the ambient quotient for
//! discrete subgroups of NA.

use nalgebra::DMatrix;

use super::{in_na_chart, Tolerances};
use crate::error::{Error, Result};

/// Rank decisions while spanning use this relative singular-value threshold.
const RANK_TOL: f64 = 1e-10;

/// A bracket-closed linear span of traceless matrices with an orthonormal
/// basis (Frobenius inner product).
#[derive(Debug, Clone)]
pub struct LieAlgebraSpan {
    n: usize,
    basis: Vec<DMatrix<f64>>,
}

impl LieAlgebraSpan {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix_size(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[DMatrix<f64>] {
        &self.basis
    }

    /// Residual of `m` after projecting onto the span.
    pub fn projection_residual(&self, m: &DMatrix<f64>) -> f64 {
        let mut rem = m.clone();
        for b in &self.basis {
            let coeff = frobenius_dot(m, b);
            rem -= b * coeff;
        }
        rem.norm()
    }

    /// Verifies bracket closure of the basis.
    pub fn is_closed(&self, tol: &Tolerances) -> bool {
        for (i, x) in self.basis.iter().enumerate() {
            for y in &self.basis[(i + 1)..] {
                let br = bracket(x, y);
                if self.projection_residual(&br) > tol.residual.max(1e-10) * (1.0 + br.norm()) {
                    return false;
                }
            }
        }
        true
    }
}

fn frobenius_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub(crate) fn bracket(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// Orthonormal basis of the span of `mats` by SVD of the vectorized stack.
///
/// Inputs are direction-normalized and near-zero candidates dropped first,
/// so that a batch of numerically vanishing brackets cannot rescale itself
/// into spurious rank.
fn orthonormal_span(mats: &[DMatrix<f64>], n: usize) -> Vec<DMatrix<f64>> {
    let directions: Vec<DMatrix<f64>> = mats
        .iter()
        .filter(|m| m.norm() > 1e-12)
        .map(|m| m / m.norm())
        .collect();
    if directions.is_empty() {
        return Vec::new();
    }
    let mut stack = DMatrix::<f64>::zeros(n * n, directions.len());
    for (j, m) in directions.iter().enumerate() {
        for r in 0..n {
            for c in 0..n {
                stack[(r * n + c, j)] = m[(r, c)];
            }
        }
    }
    let svd = stack.svd(true, false);
    let u = svd.u.expect("svd with u requested");
    let smax = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let mut basis = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > RANK_TOL * smax {
            let mut m = DMatrix::<f64>::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    m[(r, c)] = u[(r * n + c, k)];
                }
            }
            basis.push(m);
        }
    }
    basis
}

/// Smallest bracket-closed span containing the generators, computed by
/// iterating bracket-and-span until the dimension stabilizes.
pub fn lie_algebra_closure(
    generators: &[DMatrix<f64>],
    tol: &Tolerances,
) -> Result<LieAlgebraSpan> {
    if generators.is_empty() {
        return Ok(LieAlgebraSpan {
            n: 0,
            basis: Vec::new(),
        });
    }
    let n = generators[0].nrows();
    for g in generators {
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::DimensionError(
                "generators must all be square of the same size".into(),
            ));
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidElement("non-finite generator".into()));
        }
        if g.trace().abs() > tol.residual.max(1e-10) * (1.0 + g.norm()) {
            return Err(Error::InvalidElement(format!(
                "generator has trace {:.3e}; expected traceless",
                g.trace()
            )));
        }
    }
    let mut basis = orthonormal_span(generators, n);
    loop {
        let dim = basis.len();
        let mut extended = basis.clone();
        for i in 0..dim {
            for j in (i + 1)..dim {
                extended.push(bracket(&basis[i], &basis[j]));
            }
        }
        let new_basis = orthonormal_span(&extended, n);
        if new_basis.len() == dim {
            return Ok(LieAlgebraSpan { n, basis });
        }
        basis = new_basis;
    }
}

/// Dimensions of the lower central series, starting with the algebra itself
/// and ending at the first stabilization or at zero.
pub fn lower_central_series_dims(span: &LieAlgebraSpan, tol: &Tolerances) -> Result<Vec<usize>> {
    if !span.is_closed(tol) {
        return Err(Error::NotAnAlgebra(
            "basis brackets do not stay in the span".into(),
        ));
    }
    let mut dims = vec![span.dim()];
    if span.dim() == 0 {
        return Ok(dims);
    }
    let mut layer = span.basis.to_vec();
    loop {
        let mut brackets = Vec::new();
        for x in &span.basis {
            for y in &layer {
                brackets.push(bracket(x, y));
            }
        }
        let next = orthonormal_span(&brackets, span.n);
        let dim = next.len();
        dims.push(dim);
        if dim == 0 || dim == *dims.get(dims.len() - 2).unwrap() {
            return Ok(dims);
        }
        layer = next;
    }
}

/// Engel-style nilpotency: the lower central series reaches zero.
pub fn is_nilpotent_algebra(span: &LieAlgebraSpan, tol: &Tolerances) -> Result<bool> {
    Ok(*lower_central_series_dims(span, tol)?.last().unwrap() == 0)
}

/// Detail returned by the Stein-quotient criterion.
#[derive(Debug, Clone)]
pub struct SteinReport {
    pub closure_dim: usize,
    pub series_dims: Vec<usize>,
    pub nilpotent: bool,
}

/// The computable criterion for Steinness of the complexified-quotient by
/// the group generated by elements of NA: the Lie algebra generated by their
/// logarithms must be nilpotent.
pub fn stein_report(generators: &[DMatrix<f64>], tol: &Tolerances) -> Result<SteinReport> {
    let logs: Vec<DMatrix<f64>> = generators
        .iter()
        .map(|g| logm_na(g, tol))
        .collect::<Result<_>>()?;
    let span = lie_algebra_closure(&logs, tol)?;
    let series_dims = lower_central_series_dims(&span, tol)?;
    let nilpotent = *series_dims.last().unwrap() == 0;
    Ok(SteinReport {
        closure_dim: span.dim(),
        series_dims,
        nilpotent,
    })
}

/// Boolean form of [`stein_report`].
pub fn stein_quotient_predicate(generators: &[DMatrix<f64>], tol: &Tolerances) -> Result<bool> {
    Ok(stein_report(generators, tol)?.nilpotent)
}

/// Principal matrix logarithm on the NA chart (upper triangular, positive
/// diagonal), by inverse scaling-and-squaring with the triangular square
/// root recurrence. The positive real spectrum makes the principal branch
/// globally valid.
pub fn logm_na(g: &DMatrix<f64>, tol: &Tolerances) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    if n != g.ncols() || g.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidElement(
            "expected a finite square matrix".into(),
        ));
    }
    if !in_na_chart(g, tol) {
        return Err(Error::NotInNA(
            "matrix is not upper triangular with positive diagonal".into(),
        ));
    }
    let id = DMatrix::<f64>::identity(n, n);
    let mut t = g.clone();
    // Strict upper storage only; lower part is exactly zero.
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = 0.0;
        }
    }
    let mut squarings = 0u32;
    while (&t - &id).norm() > 0.25 {
        t = sqrtm_upper(&t)?;
        squarings += 1;
        if squarings > 90 {
            return Err(Error::IllConditioned(
                "triangular square-root iteration did not contract".into(),
            ));
        }
    }
    // log(I + Y) by alternating series; |Y| < 1/4 so 40 terms are far below
    // double precision.
    let y = &t - &id;
    let mut term = y.clone();
    let mut log = DMatrix::<f64>::zeros(n, n);
    for j in 1..=40 {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        log += &term * (sign / j as f64);
        term = &term * &y;
    }
    log *= 2.0f64.powi(squarings as i32);
    // det g = 1 forces trace 0; clean the rounding residue exactly.
    let tr = log.trace();
    if tr.abs() > 1e-8 * (1.0 + log.norm()) {
        return Err(Error::InvalidElement(format!(
            "log has trace {tr:.3e}; input determinant is not 1"
        )));
    }
    for i in 0..n {
        log[(i, i)] -= tr / n as f64;
    }
    Ok(log)
}

/// Upper-triangular matrix square root by the standard recurrence; the
/// positive diagonal keeps every divisor positive.
fn sqrtm_upper(t: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = t.nrows();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        s[(i, i)] = t[(i, i)].sqrt();
    }
    for d in 1..n {
        for i in 0..(n - d) {
            let j = i + d;
            let mut acc = t[(i, j)];
            for k in (i + 1)..j {
                acc -= s[(i, k)] * s[(k, j)];
            }
            let denom = s[(i, i)] + s[(j, j)];
            if denom <= 0.0 {
                return Err(Error::IllConditioned(
                    "nonpositive diagonal in triangular square root".into(),
                ));
            }
            s[(i, j)] = acc / denom;
        }
    }
    Ok(s)
}
