//! Matrix-group decompositions for SL(n,R): Iwasawa NAK, multiplicative
//! Jordan decomposition, conjugacy classification, conjugation into NA, the
//! Cartan involution, and the Lie-closure/Engel nilpotency machinery behind
//! the Stein-quotient criterion.

mod iwasawa;
mod jordan;
mod nilpotency;

pub use iwasawa::{iwasawa_nak, IwasawaFactors};
pub use jordan::{jordan_multiplicative, JordanFactors};
pub use nilpotency::{
    is_nilpotent_algebra, lie_algebra_closure, logm_na, lower_central_series_dims,
    stein_quotient_predicate, stein_report, LieAlgebraSpan, SteinReport,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{QMat, Q};
use crate::rootsys::{restricted_roots_sl, root_vector};

/// Numerical tolerances used across the decomposition routines.
///
/// `structural` guards exact zero/one patterns, `residual` bounds round-trip
/// reconstruction errors, `spectral` is the relative eigenvalue clustering
/// and classification tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub structural: f64,
    pub residual: f64,
    pub spectral: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            structural: 1e-12,
            residual: 1e-10,
            spectral: 1e-8,
        }
    }
}

/// Validates a real group element: square, finite entries, determinant 1
/// within 1e-10 (scaled by the residual tolerance).
pub fn check_group_element(g: &DMatrix<f64>, tol: &Tolerances) -> Result<()> {
    if g.nrows() != g.ncols() || g.nrows() == 0 {
        return Err(Error::InvalidElement(format!(
            "expected a square matrix, got {}x{}",
            g.nrows(),
            g.ncols()
        )));
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidElement(
            "matrix has non-finite entries".into(),
        ));
    }
    let det = g.determinant();
    if (det - 1.0).abs() > tol.residual.max(1e-10) {
        return Err(Error::InvalidElement(format!(
            "determinant {det} is not 1 within tolerance"
        )));
    }
    Ok(())
}

/// The Cartan involution `theta(g) = (g^T)^{-1}` on real matrices.
pub fn cartan_theta(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    g.transpose()
        .try_inverse()
        .ok_or_else(|| Error::InvalidElement("singular matrix has no Cartan image".into()))
}

/// Holomorphic extension of the Cartan involution to complex matrices.
pub fn cartan_theta_complex(g: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    g.transpose()
        .try_inverse()
        .ok_or_else(|| Error::InvalidElement("singular matrix has no Cartan image".into()))
}

/// Conjugacy classification of a group element by its eigenvalue structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementClass {
    Unipotent,
    Hyperbolic,
    Elliptic,
    Mixed,
}

impl std::fmt::Display for ElementClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ElementClass::Unipotent => "unipotent",
            ElementClass::Hyperbolic => "hyperbolic",
            ElementClass::Elliptic => "elliptic",
            ElementClass::Mixed => "mixed",
        };
        f.write_str(s)
    }
}

/// Classifies an element: unipotent iff all eigenvalues are 1 within the
/// spectral tolerance; hyperbolic iff diagonalizable with positive real
/// eigenvalues; elliptic iff diagonalizable with unit-modulus eigenvalues;
/// mixed otherwise. The identity reports as unipotent.
///
/// Decided through the Jordan factors rather than raw eigenvalues: the
/// eigenvalues of a defective matrix are only computable to about
/// eps^(1/m), while factor triviality is stable. A trivial hyperbolic and
/// elliptic part is exactly "all eigenvalues 1"; a trivial unipotent part
/// is diagonalizability.
pub fn classify_element(g: &DMatrix<f64>, tol: &Tolerances) -> Result<ElementClass> {
    let factors = jordan_multiplicative(g, tol)?;
    let id = DMatrix::<f64>::identity(g.nrows(), g.nrows());
    let trivial =
        |m: &DMatrix<f64>| (m - &id).norm() <= 10.0 * tol.spectral.max(1e-10) * (1.0 + g.norm());
    let u_trivial = trivial(&factors.unipotent);
    let h_trivial = trivial(&factors.hyperbolic);
    let e_trivial = trivial(&factors.elliptic);
    Ok(match (u_trivial, h_trivial, e_trivial) {
        (_, true, true) => ElementClass::Unipotent,
        (true, _, true) => ElementClass::Hyperbolic,
        (true, true, _) => ElementClass::Elliptic,
        _ => ElementClass::Mixed,
    })
}

/// The reduction `gamma' = gamma_u gamma_h`: the input with its elliptic part
/// removed. The result never has a nontrivial elliptic part.
pub fn gamma_prime(g: &DMatrix<f64>, tol: &Tolerances) -> Result<DMatrix<f64>> {
    let factors = jordan_multiplicative(g, tol)?;
    Ok(&factors.unipotent * &factors.hyperbolic)
}

/// True when the matrix is structurally in the NA chart: upper triangular
/// with strictly positive diagonal.
pub fn in_na_chart(g: &DMatrix<f64>, tol: &Tolerances) -> bool {
    let n = g.nrows();
    if n != g.ncols() {
        return false;
    }
    let scale = 1.0 + g.norm();
    for i in 0..n {
        if g[(i, i)] <= 0.0 {
            return false;
        }
        for j in 0..i {
            if g[(i, j)].abs() > tol.structural * scale {
                return false;
            }
        }
    }
    true
}

/// Conjugates an element with positive real spectrum into the NA chart by an
/// orthogonal similarity: returns `(h, t)` with `h g h^{-1} = t`, `h`
/// orthogonal of determinant 1, and `t` upper triangular with positive
/// diagonal. Elements already in NA are returned unchanged with `h = I`.
pub fn conjugate_into_na(
    g: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_group_element(g, tol)?;
    let n = g.nrows();
    if in_na_chart(g, tol) {
        let mut t = g.clone();
        for i in 0..n {
            for j in 0..i {
                t[(i, j)] = 0.0;
            }
        }
        return Ok((DMatrix::identity(n, n), t));
    }
    let eigs = g.complex_eigenvalues();
    let scale = eigs.iter().map(|l| l.norm()).fold(1.0f64, f64::max);
    // A nontrivial elliptic part shows up as eigenvalues off the positive
    // real axis. Defective spectra smear numerically like eps^(1/m), so the
    // realness check is retried at coarser levels, gated by the final
    // residual of the triangularization.
    let mut levels = jordan::clustering_ladder(tol.spectral, n);
    if levels.last().copied().unwrap_or(0.0) < 1e-3 {
        levels.push(1e-3);
    }
    if eigs
        .iter()
        .any(|l| l.im.abs() > levels[levels.len() - 1] * scale || l.re <= 0.0)
    {
        return Err(Error::EllipticObstruction(
            "eigenvalues are not positive reals; the element is not conjugate into NA".into(),
        ));
    }
    for &level in &levels {
        let tau = level * scale;
        // Treating the imaginary parts as smear is only sound when they sit
        // well below the clustering level; at comparable size the
        // real/complex reading is ambiguous and a coarser level must decide.
        if eigs.iter().any(|l| l.im.abs() > tau / 3.0) {
            continue;
        }
        let reals: Vec<f64> = eigs.iter().map(|l| l.re).collect();
        let clusters = cluster_reals(&reals, tau);
        if let Some((h, t)) = try_real_triangularize(g, &clusters, tol) {
            return Ok((h, t));
        }
    }
    Err(Error::IllConditioned(
        "could not triangularize with an orthogonal conjugation at any clustering level".into(),
    ))
}

/// Groups real values into chains at absolute tolerance `tau`; returns
/// (representative mean, multiplicity) per cluster.
fn cluster_reals(values: &[f64], tau: f64) -> Vec<(f64, usize)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tau {
            let chunk = &sorted[start..i];
            let mean = chunk.iter().sum::<f64>() / chunk.len() as f64;
            clusters.push((mean, chunk.len()));
            start = i;
        }
    }
    clusters
}

fn try_real_triangularize(
    g: &DMatrix<f64>,
    clusters: &[(f64, usize)],
    tol: &Tolerances,
) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let n = g.nrows();
    let mut columns: Vec<DMatrix<f64>> = Vec::new();
    for &(mu, mult) in clusters {
        let shifted = g - DMatrix::<f64>::identity(n, n) * mu;
        // Generalized eigenspace = kernel of (g - mu I)^mult.
        let mut power = DMatrix::<f64>::identity(n, n);
        for _ in 0..mult {
            power = &power * &shifted;
        }
        let basis = smallest_singular_directions(&power, mult)?;
        // Refine so the restriction of (g - mu I) is strictly upper
        // triangular: order by the kernel chain of the restriction.
        let restricted = basis.transpose() * &shifted * &basis;
        let ordered = nilpotent_flag_order(&restricted)?;
        columns.push(&basis * &ordered);
    }
    let mut stacked = DMatrix::<f64>::zeros(n, n);
    let mut col = 0;
    for block in &columns {
        for j in 0..block.ncols() {
            stacked.set_column(col, &block.column(j));
            col += 1;
        }
    }
    if col != n {
        return None;
    }
    // Order-preserving orthonormalization.
    let qr = stacked.qr();
    let mut qmat = qr.q();
    if qmat.determinant() < 0.0 {
        let last = qmat.ncols() - 1;
        let negated = -qmat.column(last);
        qmat.set_column(last, &negated);
    }
    let h = qmat.transpose();
    let mut t = &h * g * &qmat;
    let bound = 1e-8 * (1.0 + g.norm());
    for i in 0..n {
        if t[(i, i)] <= 0.0 {
            return None;
        }
        for j in 0..i {
            if t[(i, j)].abs() > bound {
                return None;
            }
            t[(i, j)] = 0.0;
        }
    }
    let residual = (&h * g - &t * &h).norm();
    if residual > tol.residual.max(1e-10) * 100.0 * (1.0 + g.norm()) {
        return None;
    }
    Some((h, t))
}

/// Orthonormal basis of the `dim`-dimensional near-null space of `m`
/// (the right singular directions of the smallest singular values).
fn smallest_singular_directions(m: &DMatrix<f64>, dim: usize) -> Option<DMatrix<f64>> {
    let n = m.nrows();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[a]
            .partial_cmp(&svd.singular_values[b])
            .unwrap()
    });
    let mut basis = DMatrix::<f64>::zeros(n, dim);
    for (k, &idx) in order.iter().take(dim).enumerate() {
        basis.set_column(k, &vt.row(idx).transpose());
    }
    Some(basis)
}

/// For a numerically nilpotent matrix `b`, returns an orthonormal basis
/// ordered along the kernel chain `ker b  in  ker b^2  in ...`, so that `b`
/// becomes strictly upper triangular in that basis. Each level extends the
/// previous one, so the columns form a flag-adapted orthonormal system.
fn nilpotent_flag_order(b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let m = b.nrows();
    if m == 1 {
        return Some(DMatrix::identity(1, 1));
    }
    let scale = b.norm().max(1e-300);
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::new();
    let mut power = DMatrix::<f64>::identity(m, m);
    for k in 1..=m {
        power = &power * b;
        let svd = power.clone().svd(false, true);
        let vt = svd.v_t?;
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &c| {
            svd.singular_values[a]
                .partial_cmp(&svd.singular_values[c])
                .unwrap()
        });
        // Kernel directions of b^k; the threshold scales with |b|^k.
        let level_scale = scale.powi(k as i32).max(1e-300);
        for &idx in &order {
            if svd.singular_values[idx] > 1e-7 * level_scale {
                continue;
            }
            let mut v = vt.row(idx).transpose();
            for existing in &cols {
                let proj = existing.dot(&v);
                v -= existing * proj;
            }
            if v.norm() > 1e-6 {
                let normalized = &v / v.norm();
                cols.push(normalized);
            }
        }
        if cols.len() == m {
            break;
        }
    }
    if cols.len() != m {
        return None;
    }
    let mut q = DMatrix::<f64>::zeros(m, m);
    for (j, v) in cols.iter().enumerate() {
        q.set_column(j, v);
    }
    Some(q)
}

/// The adjoint representation of `g` in SL(3,R) on the 8-dimensional Lie
/// algebra sl(3,R), in the fixed basis
/// `[E12, E13, E23, E21, E31, E32, H1, H2]` with `H1 = d(1,-1,0)`,
/// `H2 = d(0,1,-1)`.
pub fn adjoint_matrix_sl3(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if g.nrows() != 3 || g.ncols() != 3 {
        return Err(Error::DimensionError(
            "the adjoint cross-check is implemented for 3x3 matrices".into(),
        ));
    }
    let ginv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidElement("singular matrix".into()))?;
    let basis = sl3_basis_f64();
    let mut ad = DMatrix::<f64>::zeros(8, 8);
    for (j, b) in basis.iter().enumerate() {
        let image = g * b * &ginv;
        let coords = sl3_coordinates(&image)?;
        for i in 0..8 {
            ad[(i, j)] = coords[i];
        }
    }
    Ok(ad)
}

fn sl3_basis_f64() -> Vec<DMatrix<f64>> {
    let unit = |k: usize, h: usize| {
        let mut m = DMatrix::<f64>::zeros(3, 3);
        m[(k, h)] = 1.0;
        m
    };
    let mut h1 = DMatrix::<f64>::zeros(3, 3);
    h1[(0, 0)] = 1.0;
    h1[(1, 1)] = -1.0;
    let mut h2 = DMatrix::<f64>::zeros(3, 3);
    h2[(1, 1)] = 1.0;
    h2[(2, 2)] = -1.0;
    vec![
        unit(0, 1),
        unit(0, 2),
        unit(1, 2),
        unit(1, 0),
        unit(2, 0),
        unit(2, 1),
        h1,
        h2,
    ]
}

fn sl3_coordinates(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
    if trace.abs() > 1e-8 * (1.0 + m.norm()) {
        return Err(Error::InternalError(
            "adjoint image is not traceless".into(),
        ));
    }
    Ok(vec![
        m[(0, 1)],
        m[(0, 2)],
        m[(1, 2)],
        m[(1, 0)],
        m[(2, 0)],
        m[(2, 1)],
        m[(0, 0)],
        -m[(2, 2)],
    ])
}

/// The matrix of `ad(X)` on the root-space-ordered basis of sl(n), exact.
///
/// The basis lists positive root vectors by descending height, then the
/// diagonal `H_i = E_ii - E_{i+1,i+1}`, then negative root vectors by
/// descending height. For `X` in the span of the positive root vectors and
/// the diagonal, the resulting matrix is upper triangular with an exactly
/// zero lower part, certifying split-solvability of that span.
pub fn ad_matrix_root_ordered(n: usize, x: &QMat) -> Result<QMat> {
    if x.rows != n || x.cols != n {
        return Err(Error::DimensionError(format!(
            "expected {n}x{n}, got {}x{}",
            x.rows, x.cols
        )));
    }
    if !x.trace().is_zero() {
        return Err(Error::InvalidElement(
            "ad argument must be traceless".into(),
        ));
    }
    let rs = restricted_roots_sl(n)?;
    // Height of eps_k - eps_h is h - k; sort descending.
    let mut pos: Vec<_> = rs.positive_roots().to_vec();
    pos.sort_by_key(|r| {
        let k = r.coeffs().iter().position(|&c| c == 1).unwrap();
        let h = r.coeffs().iter().position(|&c| c == -1).unwrap();
        (-((h as i64) - (k as i64)), k)
    });
    let mut basis: Vec<QMat> = pos.iter().map(|r| root_vector(r).unwrap()).collect();
    for i in 0..(n - 1) {
        let mut h = QMat::zeros(n, n);
        h[(i, i)] = Q::from_integer(1);
        h[(i + 1, i + 1)] = Q::from_integer(-1);
        basis.push(h);
    }
    let mut neg: Vec<_> = rs
        .positive_roots()
        .iter()
        .map(crate::rootsys::Root::neg)
        .collect();
    neg.sort_by_key(|r| {
        let k = r.coeffs().iter().position(|&c| c == 1).unwrap();
        let h = r.coeffs().iter().position(|&c| c == -1).unwrap();
        (-((h as i64) - (k as i64)), k)
    });
    basis.extend(neg.iter().map(|r| root_vector(r).unwrap()));

    let dim = basis.len();
    let mut ad = QMat::zeros(dim, dim);
    for (j, b) in basis.iter().enumerate() {
        let image = x.bracket(b);
        let coords = coordinates_in_sl_basis(n, &basis, &image)?;
        for (i, &c) in coords.iter().enumerate() {
            ad[(i, j)] = c;
        }
    }
    Ok(ad)
}

/// Expands a traceless matrix in the given sl(n) basis; exact because the
/// basis consists of matrix units and diagonal differences.
fn coordinates_in_sl_basis(n: usize, basis: &[QMat], m: &QMat) -> Result<Vec<Q>> {
    let mut coords = vec![Q::zero(); basis.len()];
    let mut remainder = m.clone();
    // Off-diagonal coordinates match single matrix units.
    for (idx, b) in basis.iter().enumerate() {
        let mut unit_pos = None;
        let mut is_unit = true;
        let mut count = 0;
        for r in 0..n {
            for c in 0..n {
                if !b[(r, c)].is_zero() {
                    count += 1;
                    if r != c && b[(r, c)] == Q::from_integer(1) {
                        unit_pos = Some((r, c));
                    } else {
                        is_unit = false;
                    }
                }
            }
        }
        if is_unit && count == 1 {
            if let Some((r, c)) = unit_pos {
                coords[idx] = m[(r, c)];
                let sub = b.scale(m[(r, c)]);
                remainder = remainder.sub(&sub);
            }
        }
    }
    // What is left must be diagonal: expand on H_i via partial sums.
    for r in 0..n {
        for c in 0..n {
            if r != c && !remainder[(r, c)].is_zero() {
                return Err(Error::InternalError(
                    "image does not lie in the sl(n) basis span".into(),
                ));
            }
        }
    }
    // Basis layout: positives (n(n-1)/2), then the n-1 diagonals, then
    // negatives. A diagonal d with sum 0 expands as partial sums on H_i.
    let diag_start = n * (n - 1) / 2;
    let mut partial = Q::zero();
    for i in 0..(n - 1) {
        partial += remainder[(i, i)];
        coords[diag_start + i] = partial;
    }
    Ok(coords)
}

/// Exact upper-triangularity test (zero lower part).
pub fn is_upper_triangular_exact(m: &QMat) -> bool {
    for i in 0..m.rows {
        for j in 0..i.min(m.cols) {
            if !m[(i, j)].is_zero() {
                return false;
            }
        }
    }
    true
}
