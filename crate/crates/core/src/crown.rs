//! The explicit SL(3,R) crown-tube realization inside the complex unimodular
//! symmetric matrices: forward embedding, closed-form inverse, the tube
//! membership inequalities, the multiplication-map Jacobian rank, slice
//! exhaustion values, and orbit-escape evidence for discrete NA-actions.
//!
//! Conventions: the embedded point is `M M^T` for `M = n a`, matching the
//! displayed entry formulas, so the closed-form inverse holds verbatim.
//! Complex arguments take values in `(-pi, pi]`; strict bounds are decided
//! by the exact sign of the computed value, with no fuzzy band.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use crate::decomp::{in_na_chart, Tolerances};
use crate::error::{Error, Result};
use crate::rootsys::{
    crown_cell, exhaustion_u_radians, restricted_roots_sl, CrownCell, RootSystem,
};

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Coordinates `(alpha, beta, gamma; zeta_1, zeta_2, zeta_3)` of a point
/// `n a` with `n` the unit upper-triangular matrix with strict entries
/// `alpha, beta, gamma` and `a = d(zeta_1, zeta_2, zeta_3)`,
/// `zeta_1 zeta_2 zeta_3 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeCoordinates {
    pub alpha: C,
    pub beta: C,
    pub gamma: C,
    pub zeta: [C; 3],
}

impl TubeCoordinates {
    pub fn new(alpha: C, beta: C, gamma: C, zeta: [C; 3]) -> Result<Self> {
        let product = zeta[0] * zeta[1] * zeta[2];
        if (product - c(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidCoordinates(format!(
                "zeta product must be 1 within 1e-12, got {product}"
            )));
        }
        if zeta.iter().any(|z| z.norm() < 1e-300) {
            return Err(Error::InvalidCoordinates(
                "zeta entries must be nonzero".into(),
            ));
        }
        Ok(TubeCoordinates {
            alpha,
            beta,
            gamma,
            zeta,
        })
    }

    /// The base point: `n = I`, `a = I`.
    pub fn identity() -> Self {
        TubeCoordinates {
            alpha: c(0.0, 0.0),
            beta: c(0.0, 0.0),
            gamma: c(0.0, 0.0),
            zeta: [c(1.0, 0.0); 3],
        }
    }

    /// Principal arguments of the diagonal coordinates.
    pub fn argument_vector(&self) -> [f64; 3] {
        [self.zeta[0].arg(), self.zeta[1].arg(), self.zeta[2].arg()]
    }

    pub fn log_moduli(&self) -> [f64; 3] {
        [
            self.zeta[0].norm().ln(),
            self.zeta[1].norm().ln(),
            self.zeta[2].norm().ln(),
        ]
    }

    /// Whether some 2-pi shift of the argument vector sums to zero and lies
    /// in the crown cell, i.e. the diagonal part belongs to the tube over
    /// the cell.
    pub fn in_tube_over_cell(&self, cell: &CrownCell) -> bool {
        let args = self.argument_vector();
        in_cell_branch(&args, std::f64::consts::TAU, cell).is_some()
    }

    /// The unit upper-triangular factor.
    pub fn unit_part(&self) -> Matrix3<C> {
        Matrix3::new(
            c(1.0, 0.0),
            self.alpha,
            self.beta,
            c(0.0, 0.0),
            c(1.0, 0.0),
            self.gamma,
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        )
    }

    /// The diagonal factor.
    pub fn diag_part(&self) -> Matrix3<C> {
        Matrix3::from_diagonal(&nalgebra::Vector3::new(
            self.zeta[0],
            self.zeta[1],
            self.zeta[2],
        ))
    }
}

/// Finds the unique shift `args + period * l` (componentwise, integer `l`)
/// that sums to zero and lies strictly in the cell; the translate
/// disjointness of the cell makes the hit unique when it exists. The shifted
/// vector is mean-projected to compensate float residue in the sum.
fn in_cell_branch(args: &[f64; 3], period: f64, cell: &CrownCell) -> Option<[f64; 3]> {
    let mut hit = None;
    for l0 in -1i32..=1 {
        for l1 in -1i32..=1 {
            for l2 in -1i32..=1 {
                let cand = [
                    args[0] + period * l0 as f64,
                    args[1] + period * l1 as f64,
                    args[2] + period * l2 as f64,
                ];
                let sum: f64 = cand.iter().sum();
                if sum.abs() > period / 2.0 {
                    continue;
                }
                let mean = sum / 3.0;
                let projected = [cand[0] - mean, cand[1] - mean, cand[2] - mean];
                if mean.abs() > 1e-6 {
                    // A branch with the right sum has residue at rounding
                    // scale only; anything larger is a different (wrong)
                    // branch.
                    continue;
                }
                if cell.contains_radians(&projected).unwrap_or(false) {
                    match hit {
                        None => hit = Some(projected),
                        Some(_) => return None,
                    }
                }
            }
        }
    }
    hit
}

/// A complex symmetric unimodular 3x3 matrix, stored by its upper triangle
/// so symmetry is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SymPoint {
    // a11, a12, a13, a22, a23, a33
    upper: [C; 6],
}

impl SymPoint {
    /// Builds from the upper triangle `(a11, a12, a13, a22, a23, a33)`;
    /// the determinant must be 1 within 1e-9.
    pub fn from_upper(upper: [C; 6]) -> Result<Self> {
        let s = SymPoint { upper };
        let det = s.det();
        if (det - c(1.0, 0.0)).norm() > 1e-9 {
            return Err(Error::InvalidCoordinates(format!(
                "symmetric point must be unimodular within 1e-9, det = {det}"
            )));
        }
        Ok(s)
    }

    /// Builds from a full matrix, requiring symmetry within 1e-9 relative.
    pub fn from_matrix(m: &Matrix3<C>) -> Result<Self> {
        let scale = 1.0 + m.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        for i in 0..3 {
            for j in (i + 1)..3 {
                if (m[(i, j)] - m[(j, i)]).norm() > 1e-9 * scale {
                    return Err(Error::InvalidCoordinates("matrix is not symmetric".into()));
                }
            }
        }
        Self::from_upper([
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 2)],
        ])
    }

    pub fn entry(&self, i: usize, j: usize) -> C {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        match (i, j) {
            (0, 0) => self.upper[0],
            (0, 1) => self.upper[1],
            (0, 2) => self.upper[2],
            (1, 1) => self.upper[3],
            (1, 2) => self.upper[4],
            (2, 2) => self.upper[5],
            _ => unreachable!(),
        }
    }

    pub fn to_matrix(&self) -> Matrix3<C> {
        Matrix3::new(
            self.entry(0, 0),
            self.entry(0, 1),
            self.entry(0, 2),
            self.entry(0, 1),
            self.entry(1, 1),
            self.entry(1, 2),
            self.entry(0, 2),
            self.entry(1, 2),
            self.entry(2, 2),
        )
    }

    pub fn det(&self) -> C {
        let [a11, a12, a13, a22, a23, a33] = self.upper;
        a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13)
            + a13 * (a12 * a23 - a22 * a13)
    }

    pub fn distance(&self, other: &SymPoint) -> f64 {
        self.upper
            .iter()
            .zip(&other.upper)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// The point `n a . I = (n a)(n a)^T` in closed form.
pub fn embed_tube(tc: &TubeCoordinates) -> Result<SymPoint> {
    let product = tc.zeta[0] * tc.zeta[1] * tc.zeta[2];
    if (product - c(1.0, 0.0)).norm() > 1e-12 {
        return Err(Error::InvalidCoordinates(format!(
            "zeta product must be 1 within 1e-12, got {product}"
        )));
    }
    let (al, be, ga) = (tc.alpha, tc.beta, tc.gamma);
    let z1 = tc.zeta[0] * tc.zeta[0];
    let z2 = tc.zeta[1] * tc.zeta[1];
    let z3 = tc.zeta[2] * tc.zeta[2];
    SymPoint::from_upper([
        z1 + al * al * z2 + be * be * z3,
        al * z2 + ga * be * z3,
        be * z3,
        z2 + ga * ga * z3,
        ga * z3,
        z3,
    ])
}

/// Evaluation of the four tube-membership condition groups.
#[derive(Debug, Clone)]
pub struct EReport {
    pub member: bool,
    /// Indices of failed groups: 0 the nonvanishing pair, 1..=3 the strict
    /// argument bounds in display order.
    pub failed_conditions: Vec<usize>,
    /// The three computed arguments, each in `(-pi, pi]`.
    pub argument_values: [f64; 3],
}

/// Checks the tube membership inequalities on a symmetric unimodular point:
/// `a33 != 0`, `a22 a33 - a23^2 != 0`, and the three strict argument bounds
/// `|arg(a33^-1 d^2)| < pi`, `|arg(a33 d)| < pi`, `|arg(a33^-2 d)| < pi`
/// with `d = a22 a33 - a23^2`.
pub fn in_tube_e(s: &SymPoint) -> EReport {
    let a33 = s.entry(2, 2);
    let d = s.entry(1, 1) * a33 - s.entry(1, 2) * s.entry(1, 2);
    let mut failed = Vec::new();
    if a33.norm() == 0.0 || d.norm() == 0.0 {
        failed.push(0);
    }
    let w1 = d * d / a33;
    let w2 = a33 * d;
    let w3 = d / (a33 * a33);
    let args = [w1.arg(), w2.arg(), w3.arg()];
    for (i, &a) in args.iter().enumerate() {
        if !a.is_finite() || a.abs() >= std::f64::consts::PI {
            failed.push(i + 1);
        }
    }
    EReport {
        member: failed.is_empty(),
        failed_conditions: failed,
        argument_values: args,
    }
}

/// Closed-form inverse of [`embed_tube`] with the square-root branch chosen
/// so the diagonal argument vector lies in the crown cell.
///
/// Fails with `NotInTube` when the membership inequalities fail, or when
/// they pass but no argument branch lands in the cell (the printed
/// inequalities admit a thin set of such points); fails with
/// `DegeneratePivot` when a pivot modulus drops below 1e-12.
pub fn extract_tube(s: &SymPoint) -> Result<TubeCoordinates> {
    let a33 = s.entry(2, 2);
    let d = s.entry(1, 1) * a33 - s.entry(1, 2) * s.entry(1, 2);
    if a33.norm() < 1e-12 || d.norm() < 1e-12 {
        return Err(Error::DegeneratePivot(format!(
            "|a33| = {:.3e}, |a22 a33 - a23^2| = {:.3e}",
            a33.norm(),
            d.norm()
        )));
    }
    let report = in_tube_e(s);
    if !report.member {
        return Err(Error::NotInTube(format!(
            "membership inequalities failed at condition groups {:?}",
            report.failed_conditions
        )));
    }
    let lambda3 = a33.arg() / 2.0;
    let lambda2 = (d / a33).arg() / 2.0;
    let rho3 = a33.norm().sqrt();
    let rho2 = (d / a33).norm().sqrt();
    let zeta3 = C::from_polar(rho3, lambda3);
    let zeta2 = C::from_polar(rho2, lambda2);
    let zeta1 = (zeta2 * zeta3).inv();
    let lambda1 = -lambda2 - lambda3;
    let cell = sl3_cell();
    if !cell.contains_radians(&[lambda1, lambda2, lambda3])? {
        return Err(Error::NotInTube(
            "inequalities hold but no argument branch lies in the crown cell".into(),
        ));
    }
    let gamma = s.entry(1, 2) / a33;
    let beta = s.entry(0, 2) / a33;
    let alpha = (s.entry(0, 1) * a33 - s.entry(1, 2) * s.entry(0, 2)) / d;
    TubeCoordinates::new(alpha, beta, gamma, [zeta1, zeta2, zeta3])
}

fn sl3_cell() -> CrownCell {
    let rs = restricted_roots_sl(3).expect("n = 3 is a valid rank");
    crown_cell(&rs)
}

fn sl3_roots() -> RootSystem {
    restricted_roots_sl(3).expect("n = 3 is a valid rank")
}

/// Real rank of the multiplication-map differential
/// `(X, Y, Z) -> Ad(a^{-1}) X + Y + Z` on the complexified Iwasawa pieces,
/// over a fixed real basis (dimension 16 for sl(3)).
pub fn phi_jacobian_rank(a_diag: &[C; 3]) -> Result<usize> {
    let product = a_diag[0] * a_diag[1] * a_diag[2];
    if a_diag.iter().any(|z| z.norm() < 1e-12) {
        return Err(Error::InvalidCoordinates(
            "diagonal entries must be nonzero".into(),
        ));
    }
    if (product - c(1.0, 0.0)).norm() > 1e-9 {
        return Err(Error::InvalidCoordinates(format!(
            "diagonal must be unimodular within 1e-9, product = {product}"
        )));
    }
    let a = Matrix3::from_diagonal(&nalgebra::Vector3::new(a_diag[0], a_diag[1], a_diag[2]));
    let a_inv = Matrix3::from_diagonal(&nalgebra::Vector3::new(
        a_diag[0].inv(),
        a_diag[1].inv(),
        a_diag[2].inv(),
    ));

    let unit = |k: usize, h: usize| {
        let mut m = Matrix3::<C>::zeros();
        m[(k, h)] = c(1.0, 0.0);
        m
    };
    let mut h1 = Matrix3::<C>::zeros();
    h1[(0, 0)] = c(1.0, 0.0);
    h1[(1, 1)] = c(-1.0, 0.0);
    let mut h2 = Matrix3::<C>::zeros();
    h2[(1, 1)] = c(1.0, 0.0);
    h2[(2, 2)] = c(-1.0, 0.0);
    let k1 = unit(0, 1) - unit(1, 0);
    let k2 = unit(0, 2) - unit(2, 0);
    let k3 = unit(1, 2) - unit(2, 1);

    // Real basis: complex basis elements and their i-multiples.
    let n_basis = [unit(0, 1), unit(0, 2), unit(1, 2)];
    let a_basis = [h1, h2];
    let k_basis = [k1, k2, k3];
    let mut columns: Vec<[f64; 16]> = Vec::with_capacity(16);
    for b in &n_basis {
        let image = a_inv * b * a;
        columns.push(sl3c_real_coords(&image));
        columns.push(sl3c_real_coords(&(image * c(0.0, 1.0))));
    }
    for b in a_basis.iter().chain(k_basis.iter()) {
        columns.push(sl3c_real_coords(b));
        columns.push(sl3c_real_coords(&(b * c(0.0, 1.0))));
    }
    let mut m = DMatrix::<f64>::zeros(16, 16);
    for (j, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    let svd = m.svd(false, false);
    let smax = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    Ok(svd
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-10 * smax)
        .count())
}

/// Real coordinates of a traceless complex 3x3 matrix in the basis
/// `[E12, E13, E23, E21, E31, E32, H1, H2]`, real and imaginary parts
/// interleaved.
fn sl3c_real_coords(m: &Matrix3<C>) -> [f64; 16] {
    let complex8 = [
        m[(0, 1)],
        m[(0, 2)],
        m[(1, 2)],
        m[(1, 0)],
        m[(2, 0)],
        m[(2, 1)],
        m[(0, 0)],
        -m[(2, 2)],
    ];
    let mut out = [0.0; 16];
    for (k, z) in complex8.iter().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
    out
}

/// Exhaustion value at a slice point `exp(2 i xi) . I`, recovering `xi` from
/// the half-arguments on the unique cell branch.
pub fn slice_exhaustion(s: &SymPoint) -> Result<f64> {
    let m = s.to_matrix();
    let scale = 1.0 + m.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    for i in 0..3 {
        for j in 0..3 {
            if i != j && m[(i, j)].norm() > 1e-10 * scale {
                return Err(Error::NotOnSlice("matrix is not diagonal".into()));
            }
        }
    }
    let diag = [m[(0, 0)], m[(1, 1)], m[(2, 2)]];
    for z in &diag {
        if (z.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::NotOnSlice(format!(
                "diagonal modulus {} is not 1 within 1e-10",
                z.norm()
            )));
        }
    }
    let half_args = [
        diag[0].arg() / 2.0,
        diag[1].arg() / 2.0,
        diag[2].arg() / 2.0,
    ];
    let cell = sl3_cell();
    let xi = in_cell_branch(&half_args, std::f64::consts::PI, &cell)
        .ok_or_else(|| Error::NotOnSlice("no argument branch lies in the crown cell".into()))?;
    exhaustion_u_radians(&sl3_roots(), &xi)
}

/// One application of the NA element `g = n' a'` to tube coordinates:
/// `(n', a') . (n, a) = (n' (a' n a'^{-1}), a' a)`.
pub fn act_na_on_tube(
    g: &DMatrix<f64>,
    tc: &TubeCoordinates,
    tol: &Tolerances,
) -> Result<TubeCoordinates> {
    let (np, ap) = split_na(g, tol)?;
    Ok(apply_na(&np, &ap, tc))
}

/// The strict upper entries of the unipotent part and the diagonal of an NA
/// element.
fn split_na(g: &DMatrix<f64>, tol: &Tolerances) -> Result<([f64; 3], [f64; 3])> {
    if g.nrows() != 3 || g.ncols() != 3 {
        return Err(Error::DimensionError(
            "NA action is implemented for 3x3".into(),
        ));
    }
    if !in_na_chart(g, tol) {
        return Err(Error::NotInNA(
            "matrix is not upper triangular with positive diagonal".into(),
        ));
    }
    let a = [g[(0, 0)], g[(1, 1)], g[(2, 2)]];
    let n = [g[(0, 1)] / a[1], g[(0, 2)] / a[2], g[(1, 2)] / a[2]];
    Ok((n, a))
}

fn apply_na(np: &[f64; 3], ap: &[f64; 3], tc: &TubeCoordinates) -> TubeCoordinates {
    // Conjugation of the unipotent coordinates by the positive diagonal.
    let al = tc.alpha * (ap[0] / ap[1]);
    let be = tc.beta * (ap[0] / ap[2]);
    let ga = tc.gamma * (ap[1] / ap[2]);
    // Left multiplication by n' in unit upper-triangular coordinates.
    let alpha = c(np[0], 0.0) + al;
    let beta = c(np[1], 0.0) + be + ga * np[0];
    let gamma = c(np[2], 0.0) + ga;
    TubeCoordinates {
        alpha,
        beta,
        gamma,
        zeta: [tc.zeta[0] * ap[0], tc.zeta[1] * ap[1], tc.zeta[2] * ap[2]],
    }
}

/// Coordinate-adapted distance between tube points: the larger of the
/// Euclidean distances on `(alpha, beta, gamma)` and on the log-moduli plus
/// principal arguments of `zeta`.
pub fn tube_distance(a: &TubeCoordinates, b: &TubeCoordinates) -> f64 {
    let dn = ((a.alpha - b.alpha).norm_sqr()
        + (a.beta - b.beta).norm_sqr()
        + (a.gamma - b.gamma).norm_sqr())
    .sqrt();
    let (la, lb) = (a.log_moduli(), b.log_moduli());
    let (ta, tb) = (a.argument_vector(), b.argument_vector());
    let da = (0..3)
        .map(|i| (la[i] - lb[i]).powi(2) + (ta[i] - tb[i]).powi(2))
        .sum::<f64>()
        .sqrt();
    dn.max(da)
}

#[derive(Debug, Clone)]
pub struct OrbitStep {
    pub k: i64,
    pub distance: f64,
}

/// Orbit-escape evidence for the action of a cyclic NA subgroup.
#[derive(Debug, Clone)]
pub struct OrbitEscapeReport {
    pub radius: f64,
    /// Distances from the start for k = -kmax..-1, 1..kmax in order.
    pub steps: Vec<OrbitStep>,
    /// Smallest K such that every computed orbit point with |k| >= K lies
    /// outside the ball; `None` when some far point stays inside.
    pub escape_k: Option<usize>,
    pub escaped: bool,
}

/// Applies the NA action of `gamma` iteratively in both directions and
/// reports when the orbit leaves the coordinate ball of the given radius.
pub fn orbit_escape_check(
    gamma: &DMatrix<f64>,
    start: &TubeCoordinates,
    radius: f64,
    kmax: usize,
    tol: &Tolerances,
) -> Result<OrbitEscapeReport> {
    if kmax < 1 {
        return Err(Error::OutOfRange("kmax must be >= 1".into()));
    }
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::OutOfRange(
            "radius must be positive and finite".into(),
        ));
    }
    let (np, ap) = split_na(gamma, tol)?;
    let id3 = DMatrix::<f64>::identity(3, 3);
    if (gamma - &id3).norm() <= tol.structural * (1.0 + gamma.norm()) {
        return Err(Error::DegenerateAction("gamma is the identity".into()));
    }
    let det: f64 = ap.iter().product::<f64>();
    if (det - 1.0).abs() > tol.residual.max(1e-10) {
        return Err(Error::InvalidElement(format!(
            "determinant {det} is not 1 within tolerance"
        )));
    }
    // Inverse in NA coordinates: gamma^{-1} = (a^{-1} n^{-1} a) a^{-1}.
    let ap_inv = [1.0 / ap[0], 1.0 / ap[1], 1.0 / ap[2]];
    let n_inv = [-np[0], np[0] * np[2] - np[1], -np[2]];
    let np_inv = [
        n_inv[0] * (ap[1] / ap[0]),
        n_inv[1] * (ap[2] / ap[0]),
        n_inv[2] * (ap[2] / ap[1]),
    ];

    let mut forward = Vec::with_capacity(kmax);
    let mut point = start.clone();
    for k in 1..=kmax {
        point = apply_na(&np, &ap, &point);
        forward.push(OrbitStep {
            k: k as i64,
            distance: tube_distance(&point, start),
        });
    }
    let mut backward = Vec::with_capacity(kmax);
    point = start.clone();
    for k in 1..=kmax {
        point = apply_na(&np_inv, &ap_inv, &point);
        backward.push(OrbitStep {
            k: -(k as i64),
            distance: tube_distance(&point, start),
        });
    }
    let mut steps: Vec<OrbitStep> = backward.into_iter().rev().collect();
    steps.extend(forward);

    let outside_from = |kk: usize| -> bool {
        steps
            .iter()
            .filter(|s| s.k.unsigned_abs() as usize >= kk)
            .all(|s| s.distance > radius)
    };
    let escape_k = (1..=kmax).find(|&kk| outside_from(kk));
    Ok(OrbitEscapeReport {
        radius,
        steps,
        escaped: escape_k.is_some(),
        escape_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn diag_sym(z1: C, z2: C, z3: C) -> SymPoint {
        SymPoint::from_upper([z1, c(0.0, 0.0), c(0.0, 0.0), z2, c(0.0, 0.0), z3]).unwrap()
    }

    #[test]
    fn embed_identity_and_shear() {
        let id = embed_tube(&TubeCoordinates::identity()).unwrap();
        assert!(id.distance(&diag_sym(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0))) < 1e-15);

        let tc =
            TubeCoordinates::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), [c(1.0, 0.0); 3]).unwrap();
        let s = embed_tube(&tc).unwrap();
        let expected = SymPoint::from_upper([
            c(2.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ])
        .unwrap();
        assert!(s.distance(&expected) < 1e-15);
    }

    #[test]
    fn embed_pure_phase() {
        let tc = TubeCoordinates::new(
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            [
                C::from_polar(1.0, PI / 5.0),
                C::from_polar(1.0, -PI / 5.0),
                c(1.0, 0.0),
            ],
        )
        .unwrap();
        let s = embed_tube(&tc).unwrap();
        let expected = diag_sym(
            C::from_polar(1.0, 2.0 * PI / 5.0),
            C::from_polar(1.0, -2.0 * PI / 5.0),
            c(1.0, 0.0),
        );
        assert!(s.distance(&expected) < 1e-15);
        assert!(tc.in_tube_over_cell(&sl3_cell()));
    }

    #[test]
    fn zeta_product_enforced() {
        let bad = TubeCoordinates::new(
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            [c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
        );
        assert!(matches!(bad, Err(Error::InvalidCoordinates(_))));
    }

    #[test]
    fn membership_report_cases() {
        let id = diag_sym(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        let r = in_tube_e(&id);
        assert!(r.member);
        assert_eq!(r.argument_values, [0.0, 0.0, 0.0]);

        // a33 = 0: first group fails. det = -a13^2 a22 with a13 = i, a22
        // arbitrary: pick a13 = i, a22 = 1 so det = 1.
        let s = SymPoint::from_upper([
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 1.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ])
        .unwrap();
        let r = in_tube_e(&s);
        assert!(!r.member);
        assert!(r.failed_conditions.contains(&0));

        // d(-1, -1, 1): d = -1, so arg(a33 d) and arg(a33^-2 d) both hit
        // the cut at pi.
        let s = diag_sym(c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0));
        let r = in_tube_e(&s);
        assert!(!r.member);
        assert_eq!(r.failed_conditions, vec![2, 3]);

        // The worked phase point: arguments (-4pi/5, -2pi/5, -2pi/5).
        let s = diag_sym(
            C::from_polar(1.0, 2.0 * PI / 5.0),
            C::from_polar(1.0, -2.0 * PI / 5.0),
            c(1.0, 0.0),
        );
        let r = in_tube_e(&s);
        assert!(r.member);
        assert!((r.argument_values[0] + 4.0 * PI / 5.0).abs() < 1e-12);
        assert!((r.argument_values[1] + 2.0 * PI / 5.0).abs() < 1e-12);
        assert!((r.argument_values[2] + 2.0 * PI / 5.0).abs() < 1e-12);
    }

    #[test]
    fn extract_examples() {
        let id = diag_sym(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        let tc = extract_tube(&id).unwrap();
        assert!(tc.alpha.norm() < 1e-15 && tc.beta.norm() < 1e-15 && tc.gamma.norm() < 1e-15);
        assert!((tc.zeta[0] - c(1.0, 0.0)).norm() < 1e-15);

        let s = SymPoint::from_upper([
            c(2.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ])
        .unwrap();
        let tc = extract_tube(&s).unwrap();
        assert!((tc.alpha - c(1.0, 0.0)).norm() < 1e-12);
        assert!(tc.beta.norm() < 1e-12 && tc.gamma.norm() < 1e-12);

        let s = diag_sym(
            C::from_polar(1.0, 2.0 * PI / 5.0),
            C::from_polar(1.0, -2.0 * PI / 5.0),
            c(1.0, 0.0),
        );
        let tc = extract_tube(&s).unwrap();
        assert!((tc.zeta[1] - C::from_polar(1.0, -PI / 5.0)).norm() < 1e-12);
        assert!((tc.zeta[0] - C::from_polar(1.0, PI / 5.0)).norm() < 1e-12);

        // Non-member: d(-1,-1,1).
        let s = diag_sym(c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(extract_tube(&s), Err(Error::NotInTube(_))));
    }

    #[test]
    fn extract_rejects_degenerate_pivot() {
        let s = SymPoint::from_upper([
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 1.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ])
        .unwrap();
        assert!(matches!(extract_tube(&s), Err(Error::DegeneratePivot(_))));
    }

    #[test]
    fn inequalities_hold_but_branch_misses_cell() {
        // Diagonal phases with argument vector (-0.45, 0.45, 0)*pi: every
        // printed inequality passes (the doubled arguments wrap), yet no
        // pi-shift branch lies in the cell.
        let s = diag_sym(
            C::from_polar(1.0, -0.9 * PI),
            C::from_polar(1.0, 0.9 * PI),
            c(1.0, 0.0),
        );
        let r = in_tube_e(&s);
        assert!(r.member);
        assert!(matches!(extract_tube(&s), Err(Error::NotInTube(_))));
    }

    #[test]
    fn round_trip_on_generic_point() {
        let tc = TubeCoordinates::new(
            c(0.3, -0.7),
            c(-1.1, 0.2),
            c(0.5, 0.9),
            [
                C::from_polar(1.3, 0.31),
                C::from_polar(0.7, -0.12),
                C::from_polar(1.0 / (1.3 * 0.7), -0.19),
            ],
        )
        .unwrap();
        let s = embed_tube(&tc).unwrap();
        assert!((s.det() - c(1.0, 0.0)).norm() < 1e-9);
        assert!(in_tube_e(&s).member);
        let back = extract_tube(&s).unwrap();
        assert!((back.alpha - tc.alpha).norm() < 1e-9);
        assert!((back.beta - tc.beta).norm() < 1e-9);
        assert!((back.gamma - tc.gamma).norm() < 1e-9);
        for i in 0..3 {
            assert!((back.zeta[i] - tc.zeta[i]).norm() < 1e-9);
        }
    }

    #[test]
    fn jacobian_rank_is_full() {
        assert_eq!(
            phi_jacobian_rank(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap(),
            16
        );
        let z1 = C::from_polar(1.4, 0.3);
        let z2 = C::from_polar(0.8, -0.9);
        let z3 = (z1 * z2).inv();
        assert_eq!(phi_jacobian_rank(&[z1, z2, z3]).unwrap(), 16);
        assert!(matches!(
            phi_jacobian_rank(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::InvalidCoordinates(_))
        ));
    }

    #[test]
    fn slice_values() {
        let id = diag_sym(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        let u = slice_exhaustion(&id).unwrap();
        assert!((u + 1.5 * PI * PI).abs() < 1e-12);

        let s = diag_sym(
            C::from_polar(1.0, 2.0 * PI / 5.0),
            C::from_polar(1.0, -2.0 * PI / 5.0),
            c(1.0, 0.0),
        );
        let u = slice_exhaustion(&s).unwrap();
        let xi = [PI / 5.0, -PI / 5.0, 0.0];
        let expected = exhaustion_u_radians(&sl3_roots(), &xi).unwrap();
        assert!((u - expected).abs() < 1e-10);

        // Permuting the diagonal leaves the value unchanged.
        let s_perm = diag_sym(
            C::from_polar(1.0, -2.0 * PI / 5.0),
            c(1.0, 0.0),
            C::from_polar(1.0, 2.0 * PI / 5.0),
        );
        let u_perm = slice_exhaustion(&s_perm).unwrap();
        assert!((u - u_perm).abs() < 1e-10);

        // Off-slice inputs are refused.
        let gl = embed_tube(
            &TubeCoordinates::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), [c(1.0, 0.0); 3]).unwrap(),
        )
        .unwrap();
        assert!(matches!(slice_exhaustion(&gl), Err(Error::NotOnSlice(_))));
    }

    #[test]
    fn na_action_matches_matrix_action() {
        let tol = tols();
        let g = nalgebra::dmatrix![
            1.2, 0.4, -0.3;
            0.0, 0.9, 1.1;
            0.0, 0.0, 1.0 / (1.2 * 0.9)
        ];
        let tc = TubeCoordinates::new(
            c(0.2, 0.5),
            c(-0.4, 0.1),
            c(0.7, -0.2),
            [
                C::from_polar(1.1, 0.2),
                C::from_polar(0.9, -0.3),
                C::from_polar(1.0 / (1.1 * 0.9), 0.1),
            ],
        )
        .unwrap();
        let moved = act_na_on_tube(&g, &tc, &tol).unwrap();
        let s_moved = embed_tube(&moved).unwrap().to_matrix();
        let gc = g.map(|x| c(x, 0.0));
        let s = embed_tube(&tc).unwrap().to_matrix();
        let mut expected = Matrix3::<C>::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = c(0.0, 0.0);
                for p in 0..3 {
                    for q in 0..3 {
                        acc += gc[(i, p)] * s[(p, q)] * gc[(j, q)];
                    }
                }
                expected[(i, j)] = acc;
            }
        }
        assert!((s_moved - expected).norm() < 1e-9);
    }

    #[test]
    fn orbit_escape_diagonal() {
        let tol = tols();
        let gamma = DMatrix::from_diagonal(&nalgebra::dvector![2.0, 1.0, 0.5]);
        let report =
            orbit_escape_check(&gamma, &TubeCoordinates::identity(), 10.0, 20, &tol).unwrap();
        assert!(report.escaped);
        // Distances strictly increase with |k| in each direction.
        let fwd: Vec<f64> = report
            .steps
            .iter()
            .filter(|s| s.k > 0)
            .map(|s| s.distance)
            .collect();
        for w in fwd.windows(2) {
            assert!(w[1] > w[0]);
        }
        let expected_first = (2.0 * (2.0f64.ln().powi(2))).sqrt();
        assert!((fwd[0] - expected_first).abs() < 1e-12);
    }

    #[test]
    fn orbit_escape_heisenberg_center() {
        let tol = tols();
        let mut gamma = DMatrix::<f64>::identity(3, 3);
        gamma[(0, 2)] = 1.0;
        let report =
            orbit_escape_check(&gamma, &TubeCoordinates::identity(), 10.0, 20, &tol).unwrap();
        for step in &report.steps {
            assert!((step.distance - step.k.unsigned_abs() as f64).abs() < 1e-12);
        }
        assert_eq!(report.escape_k, Some(11));
    }

    #[test]
    fn orbit_degenerate_and_bad_inputs() {
        let tol = tols();
        let id = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(
            orbit_escape_check(&id, &TubeCoordinates::identity(), 1.0, 5, &tol),
            Err(Error::DegenerateAction(_))
        ));
        let rot = nalgebra::dmatrix![0.0, -1.0, 0.0; 1.0, 0.0, 0.0; 0.0, 0.0, 1.0];
        assert!(matches!(
            orbit_escape_check(&rot, &TubeCoordinates::identity(), 1.0, 5, &tol),
            Err(Error::NotInNA(_))
        ));
    }
}
