//! Restricted root systems of sl(n,R), the Weyl group, the crown cell as an
//! exact polytope, and the model exhaustion function on the cell.
//!
//! All cell arithmetic is carried out in pi-units with exact rationals, so
//! strict-inequality membership, vertex identity and translate disjointness
//! are decided exactly. Floating point appears only at the API boundary
//! (radian-valued vectors coming from complex arguments).

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, q, qi, to_f64, QMat, Q};

/// A restricted root as an integer linear functional on the diagonal
/// coordinates: `X -> sum_k coeffs[k] * lambda_k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Root {
    coeffs: Vec<i64>,
}

impl Root {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Root { coeffs }
    }

    /// The functional `eps_k - eps_h`.
    pub fn eps_diff(n: usize, k: usize, h: usize) -> Self {
        let mut coeffs = vec![0; n];
        coeffs[k] = 1;
        coeffs[h] = -1;
        Root { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn neg(&self) -> Self {
        Root {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// True when the coefficient pattern is `eps_k - eps_h` (one +1, one -1,
    /// rest zero), the shape of every restricted root of sl(n,R).
    pub fn is_type_a(&self) -> bool {
        let plus = self.coeffs.iter().filter(|&&c| c == 1).count();
        let minus = self.coeffs.iter().filter(|&&c| c == -1).count();
        let zero = self.coeffs.iter().filter(|&&c| c == 0).count();
        plus == 1 && minus == 1 && plus + minus + zero == self.coeffs.len()
    }

    pub fn eval_q(&self, x: &[Q]) -> Q {
        self.coeffs.iter().zip(x).map(|(&c, &xi)| qi(c) * xi).sum()
    }

    pub fn eval_f(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(x)
            .map(|(&c, &xi)| c as f64 * xi)
            .sum()
    }

    /// Coefficients in the chart that eliminates the first coordinate via
    /// `lambda_1 = -(lambda_2 + ... + lambda_n)`.
    pub fn chart_coeffs(&self) -> Vec<i64> {
        let c1 = self.coeffs[0];
        self.coeffs[1..].iter().map(|&c| c - c1).collect()
    }
}

/// A point of the maximal abelian subspace: diagonal entries in pi-units,
/// exact rationals summing to zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AVector {
    coords: Vec<Q>,
}

impl AVector {
    pub fn new(coords: Vec<Q>) -> Result<Self> {
        let sum: Q = coords.iter().copied().sum();
        if !sum.is_zero() {
            return Err(Error::DimensionError(format!(
                "coordinates must sum to zero exactly, got {sum}"
            )));
        }
        Ok(AVector { coords })
    }

    pub fn zero(n: usize) -> Self {
        AVector {
            coords: vec![Q::zero(); n],
        }
    }

    /// Builds the full vector from chart coordinates `(lambda_2, ..,
    /// lambda_n)` with `lambda_1 = -sum`.
    pub fn from_chart(chart: &[Q]) -> Self {
        let head: Q = -chart.iter().copied().sum::<Q>();
        let mut coords = Vec::with_capacity(chart.len() + 1);
        coords.push(head);
        coords.extend_from_slice(chart);
        AVector { coords }
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn chart(&self) -> Vec<Q> {
        self.coords[1..].to_vec()
    }

    /// Coordinates in radians.
    pub fn to_radians(&self) -> Vec<f64> {
        self.coords.iter().map(|&c| to_f64(c) * PI).collect()
    }

    /// The coordinate permutation action `(w . X)_i = X_{w(i)}`.
    pub fn permuted(&self, perm: &[usize]) -> AVector {
        AVector {
            coords: perm.iter().map(|&i| self.coords[i]).collect(),
        }
    }
}

/// A restricted root system with a positivity split and Weyl generators
/// realized as coordinate permutations.
#[derive(Debug, Clone)]
pub struct RootSystem {
    n: usize,
    positive: Vec<Root>,
    all: Vec<Root>,
    weyl_generators: Vec<Vec<usize>>,
}

impl RootSystem {
    /// Assembles a root system from an explicit positive-root list and
    /// caller-supplied Weyl generators (coordinate permutations).
    pub fn from_parts(
        n: usize,
        positive: Vec<Root>,
        weyl_generators: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let pos_set: BTreeSet<&Root> = positive.iter().collect();
        for root in &positive {
            if root.dim() != n {
                return Err(Error::DimensionError(format!(
                    "root has {} coefficients, expected {n}",
                    root.dim()
                )));
            }
            if root.coeffs.iter().all(|&c| c == 0) {
                return Err(Error::InternalError("zero functional is not a root".into()));
            }
            if pos_set.contains(&root.neg()) {
                return Err(Error::InternalError(
                    "positive roots must not contain a pair alpha, -alpha".into(),
                ));
            }
        }
        for perm in &weyl_generators {
            let mut seen = vec![false; n];
            if perm.len() != n
                || perm
                    .iter()
                    .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
            {
                return Err(Error::InternalError(
                    "Weyl generator is not a permutation of the coordinates".into(),
                ));
            }
        }
        let mut all = positive.clone();
        all.extend(positive.iter().map(Root::neg));
        Ok(RootSystem {
            n,
            positive,
            all,
            weyl_generators,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.n - 1
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive
    }

    pub fn all_roots(&self) -> &[Root] {
        &self.all
    }

    pub fn weyl_generators(&self) -> &[Vec<usize>] {
        &self.weyl_generators
    }
}

/// The restricted root system of sl(n,R): all functionals `eps_k - eps_h`
/// with `k != h`, positive for `k < h`, Weyl group the full symmetric group
/// generated by adjacent transpositions.
pub fn restricted_roots_sl(n: usize) -> Result<RootSystem> {
    if n < 2 {
        return Err(Error::InvalidRank(format!(
            "sl({n}) has no restricted roots"
        )));
    }
    let mut positive = Vec::new();
    for k in 0..n {
        for h in (k + 1)..n {
            positive.push(Root::eps_diff(n, k, h));
        }
    }
    let mut weyl_generators = Vec::new();
    for i in 0..(n - 1) {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(i, i + 1);
        weyl_generators.push(perm);
    }
    RootSystem::from_parts(n, positive, weyl_generators)
}

/// The crown cell `{ X : |alpha(X)| < 1/2 }` in pi-units, kept as an
/// H-representation with one strict inequality pair per positive root.
#[derive(Debug, Clone)]
pub struct CrownCell {
    n: usize,
    ineqs: Vec<(Root, Q)>,
}

/// Builds the crown cell of a root system (bound 1/2 in pi-units per
/// positive root).
pub fn crown_cell(rs: &RootSystem) -> CrownCell {
    CrownCell {
        n: rs.n(),
        ineqs: rs
            .positive_roots()
            .iter()
            .map(|r| (r.clone(), q(1, 2)))
            .collect(),
    }
}

impl CrownCell {
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// Dimension of the cell inside the traceless hyperplane.
    pub fn dimension(&self) -> usize {
        self.n - 1
    }

    /// The inequality pairs `|root(X)| < bound`.
    pub fn inequalities(&self) -> &[(Root, Q)] {
        &self.ineqs
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionError(format!(
                "point has {len} coordinates, cell lives in dimension {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Exact strict membership for a pi-unit rational point.
    pub fn contains(&self, x: &AVector) -> Result<bool> {
        self.check_dim(x.dim())?;
        Ok(self
            .ineqs
            .iter()
            .all(|(root, bound)| root.eval_q(x.coords()).abs() < *bound))
    }

    /// Exact membership in the closure (all inequalities weak).
    pub fn contains_closure(&self, x: &AVector) -> Result<bool> {
        self.check_dim(x.dim())?;
        Ok(self
            .ineqs
            .iter()
            .all(|(root, bound)| root.eval_q(x.coords()).abs() <= *bound))
    }

    /// Strict membership for a radian-valued float point. The trace must
    /// vanish to within 1e-12; each inequality is decided by the exact sign
    /// of the computed float value.
    pub fn contains_radians(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x.len())?;
        let sum: f64 = x.iter().sum();
        if sum.abs() > 1e-12 || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::DimensionError(format!(
                "float coordinates must be finite and sum to zero within 1e-12, sum = {sum:e}"
            )));
        }
        Ok(self
            .ineqs
            .iter()
            .all(|(root, bound)| root.eval_f(x).abs() < to_f64(*bound) * PI))
    }

    /// Vertices of the cell closure, exact in pi-units, deduplicated; in a
    /// two-dimensional chart they are ordered counterclockwise.
    pub fn vertices(&self) -> Result<Vec<AVector>> {
        let d = self.dimension();
        if d == 0 || d > 3 {
            return Err(Error::DimensionError(format!(
                "vertex enumeration by inequality-subset intersection supports rank 1..=3, got {d}"
            )));
        }
        // Hyperplanes root(x) = +bound and root(x) = -bound in chart coords.
        let mut planes: Vec<(Vec<Q>, Q)> = Vec::new();
        for (root, bound) in &self.ineqs {
            let cc: Vec<Q> = root.chart_coeffs().iter().map(|&c| qi(c)).collect();
            planes.push((cc.clone(), *bound));
            planes.push((cc, -*bound));
        }
        let mut found: BTreeSet<Vec<Q>> = BTreeSet::new();
        let mut stack: Vec<usize> = Vec::new();
        collect_subsets(planes.len(), d, 0, &mut stack, &mut |subset| {
            let a: Vec<Vec<Q>> = subset.iter().map(|&i| planes[i].0.clone()).collect();
            let b: Vec<Q> = subset.iter().map(|&i| planes[i].1).collect();
            if let Some(sol) = exact::solve_square(&a, &b) {
                let candidate = AVector::from_chart(&sol);
                if self.contains_closure(&candidate).unwrap_or(false) {
                    found.insert(sol);
                }
            }
        });
        if found.is_empty() {
            return Err(Error::InternalError(
                "no vertices found; the cell representation is degenerate".into(),
            ));
        }
        let mut verts: Vec<Vec<Q>> = found.into_iter().collect();
        if d == 2 {
            verts.sort_by(|a, b| ccw_cmp(a, b));
        }
        Ok(verts.iter().map(|v| AVector::from_chart(v)).collect())
    }

    /// Exact per-axis half-widths of the chart bounding box (max |coord|
    /// over vertices).
    pub fn bounding_halfwidths(&self) -> Result<Vec<Q>> {
        let verts = self.vertices()?;
        let d = self.dimension();
        let mut hw = vec![Q::zero(); d];
        for v in &verts {
            for (j, c) in v.chart().iter().enumerate() {
                if c.abs() > hw[j] {
                    hw[j] = c.abs();
                }
            }
        }
        Ok(hw)
    }
}

fn collect_subsets(
    n: usize,
    k: usize,
    start: usize,
    stack: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if stack.len() == k {
        f(stack);
        return;
    }
    for i in start..n {
        stack.push(i);
        collect_subsets(n, k, i + 1, stack, f);
        stack.pop();
    }
}

/// Counterclockwise angular order around the origin, decided exactly:
/// upper half-plane (angle in [0, pi)) first, then by cross product.
fn ccw_cmp(a: &[Q], b: &[Q]) -> std::cmp::Ordering {
    fn half(p: &[Q]) -> u8 {
        if p[1].is_negative() || (p[1].is_zero() && p[0].is_negative()) {
            1
        } else {
            0
        }
    }
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    let cross = a[0] * b[1] - a[1] * b[0];
    if cross.is_positive() {
        std::cmp::Ordering::Less
    } else if cross.is_negative() {
        std::cmp::Ordering::Greater
    } else {
        a.cmp(b)
    }
}

/// The full Weyl orbit of a point under the generated permutation group,
/// computed by closure under the generators; returned sorted.
pub fn weyl_orbit(rs: &RootSystem, x: &AVector) -> Result<Vec<AVector>> {
    if x.dim() != rs.n() {
        return Err(Error::DimensionError(format!(
            "point dimension {} does not match n = {}",
            x.dim(),
            rs.n()
        )));
    }
    let mut orbit: BTreeSet<AVector> = BTreeSet::new();
    let mut frontier = vec![x.clone()];
    orbit.insert(x.clone());
    while let Some(point) = frontier.pop() {
        for perm in rs.weyl_generators() {
            let image = point.permuted(perm);
            if orbit.insert(image.clone()) {
                frontier.push(image);
            }
        }
    }
    Ok(orbit.into_iter().collect())
}

/// Outcome of the exact translate-disjointness check in the 2D chart.
#[derive(Debug, Clone)]
pub struct DisjointnessReport {
    pub range_bound: i64,
    /// For each offset `(l, m)` in the range (excluding the origin), whether
    /// `cell` and `cell + (l pi, m pi)` are disjoint.
    pub offsets: Vec<(i64, i64, bool)>,
    pub all_disjoint: bool,
    /// Exact chart bounding-box half-widths in pi-units.
    pub box_halfwidths: (Q, Q),
    /// True when the bounding box already separates every offset outside the
    /// checked range: `range_bound + 1 >= 2 * halfwidth` on both axes.
    pub box_certifies_beyond: bool,
}

/// Decides exactly, for every integer offset in `[-range_bound,
/// range_bound]^2` except the origin, whether the cell and its translate by
/// `(l pi, m pi)` in the `(lambda_2, lambda_3)` chart are disjoint.
pub fn translate_disjointness(cell: &CrownCell, range_bound: i64) -> Result<DisjointnessReport> {
    let ineqs = chart_inequalities_2d(cell)?;
    if range_bound < 1 {
        return Err(Error::OutOfRange(format!(
            "range_bound must be >= 1, got {range_bound}"
        )));
    }
    let mut offsets = Vec::new();
    let mut all_disjoint = true;
    for l in -range_bound..=range_bound {
        for m in -range_bound..=range_bound {
            if l == 0 && m == 0 {
                continue;
            }
            let disjoint = !translates_intersect(&ineqs, qi(1), (qi(l), qi(m)));
            all_disjoint &= disjoint;
            offsets.push((l, m, disjoint));
        }
    }
    let hw = cell.bounding_halfwidths()?;
    let (hx, hy) = (hw[0], hw[1]);
    let beyond = qi(range_bound + 1);
    let box_certifies_beyond = beyond >= qi(2) * hx && beyond >= qi(2) * hy;
    Ok(DisjointnessReport {
        range_bound,
        offsets,
        all_disjoint,
        box_halfwidths: (hx, hy),
        box_certifies_beyond,
    })
}

/// Smallest integer scale factor `s <= max_scale` at which some translate in
/// the offset range intersects the scaled cell, found by binary search with
/// the exact feasibility oracle (intersection is monotone in the scale).
pub fn first_failing_scale(
    cell: &CrownCell,
    range_bound: i64,
    max_scale: i64,
) -> Result<Option<i64>> {
    let ineqs = chart_inequalities_2d(cell)?;
    if range_bound < 1 || max_scale < 1 {
        return Err(Error::OutOfRange(
            "range_bound and max_scale must be >= 1".into(),
        ));
    }
    let fails = |s: i64| -> bool {
        for l in -range_bound..=range_bound {
            for m in -range_bound..=range_bound {
                if (l, m) != (0, 0) && translates_intersect(&ineqs, qi(s), (qi(l), qi(m))) {
                    return true;
                }
            }
        }
        false
    };
    if !fails(max_scale) {
        return Ok(None);
    }
    let (mut lo, mut hi) = (1i64, max_scale);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if fails(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Some(lo))
}

fn chart_inequalities_2d(cell: &CrownCell) -> Result<Vec<(Q, Q, Q)>> {
    if cell.dimension() != 2 {
        return Err(Error::DimensionError(format!(
            "translate disjointness runs in the 2D chart; cell dimension is {}",
            cell.dimension()
        )));
    }
    Ok(cell
        .ineqs
        .iter()
        .map(|(root, bound)| {
            let cc = root.chart_coeffs();
            (qi(cc[0]), qi(cc[1]), *bound)
        })
        .collect())
}

/// Exact feasibility of `scale*cell  intersect  (scale*cell + offset)`, both
/// open. Encoded as a rational LP maximizing the common slack `t`: the open
/// intersection is nonempty iff the optimum satisfies `t > 0`. The optimum is
/// found by enumerating basic solutions of the 3-variable system.
fn translates_intersect(ineqs: &[(Q, Q, Q)], scale: Q, offset: (Q, Q)) -> bool {
    // Rows: cx*x + cy*y + t <= rhs.
    let mut rows: Vec<(Q, Q, Q)> = Vec::with_capacity(ineqs.len() * 4);
    for &(cx, cy, b) in ineqs {
        let sb = b * scale;
        let shift = cx * offset.0 + cy * offset.1;
        rows.push((cx, cy, sb));
        rows.push((-cx, -cy, sb));
        rows.push((cx, cy, sb + shift));
        rows.push((-cx, -cy, sb - shift));
    }
    let nrows = rows.len();
    let feasible = |x: Q, y: Q, t: Q| rows.iter().all(|&(cx, cy, rhs)| cx * x + cy * y + t <= rhs);
    let mut best: Option<Q> = None;
    for i in 0..nrows {
        for j in (i + 1)..nrows {
            for k in (j + 1)..nrows {
                let a = vec![
                    vec![rows[i].0, rows[i].1, qi(1)],
                    vec![rows[j].0, rows[j].1, qi(1)],
                    vec![rows[k].0, rows[k].1, qi(1)],
                ];
                let b = vec![rows[i].2, rows[j].2, rows[k].2];
                if let Some(sol) = exact::solve_square(&a, &b) {
                    if feasible(sol[0], sol[1], sol[2]) && best.is_none_or(|t| sol[2] > t) {
                        best = Some(sol[2]);
                    }
                }
            }
        }
    }
    matches!(best, Some(t) if t.is_positive())
}

/// The model exhaustion value in pi^2-units: `sum over all roots of
/// (alpha(X)^2 - 1/4)`, exact. The sum runs over both sign classes.
pub fn exhaustion_u_exact(rs: &RootSystem, x: &AVector) -> Result<Q> {
    if x.dim() != rs.n() {
        return Err(Error::DimensionError(format!(
            "point dimension {} does not match n = {}",
            x.dim(),
            rs.n()
        )));
    }
    Ok(rs
        .all_roots()
        .iter()
        .map(|root| {
            let v = root.eval_q(x.coords());
            v * v - q(1, 4)
        })
        .sum())
}

/// `u(X) = sum over all roots of (alpha(X)^2 - (pi/2)^2)` in radians^2,
/// evaluated through the exact rational path so that Weyl images agree
/// bit-for-bit.
pub fn exhaustion_u(rs: &RootSystem, x: &AVector) -> Result<f64> {
    Ok(to_f64(exhaustion_u_exact(rs, x)?) * PI * PI)
}

/// Float-boundary evaluation of `u` for radian-valued coordinates.
pub fn exhaustion_u_radians(rs: &RootSystem, x: &[f64]) -> Result<f64> {
    if x.len() != rs.n() {
        return Err(Error::DimensionError(format!(
            "point dimension {} does not match n = {}",
            x.len(),
            rs.n()
        )));
    }
    let half_pi_sq = (PI / 2.0) * (PI / 2.0);
    Ok(rs
        .all_roots()
        .iter()
        .map(|root| {
            let v = root.eval_f(x);
            v * v - half_pi_sq
        })
        .sum())
}

/// Exact maximum of `u` over the cell closure in pi^2-units. `u` is convex,
/// so the supremum over the closure is attained at a vertex.
pub fn max_u_on_cell(rs: &RootSystem, cell: &CrownCell) -> Result<Q> {
    let verts = cell.vertices()?;
    verts
        .iter()
        .map(|v| exhaustion_u_exact(rs, v))
        .try_fold(None::<Q>, |acc, v| {
            let v = v?;
            Ok(Some(match acc {
                Some(m) if m >= v => m,
                _ => v,
            }))
        })?
        .ok_or_else(|| Error::InternalError("cell has no vertices".into()))
}

/// The constant Hessian of `u` with its restriction to the traceless
/// hyperplane.
#[derive(Debug, Clone)]
pub struct HessianReport {
    /// `2 * sum over all roots of alpha alpha^T` on the ambient coordinates,
    /// exact.
    pub full: QMat,
    /// The same quadratic form in the chart basis `e_j - e_1`, exact.
    pub chart: QMat,
    /// Minimum eigenvalue of the chart matrix (float evaluation).
    pub min_eigenvalue: f64,
    /// Exact positive definiteness of the restricted form (rational pivots).
    pub positive_definite: bool,
}

/// Computes the Hessian `2 sum alpha alpha^T` of the exhaustion function and
/// restricts it to the traceless hyperplane.
pub fn exhaustion_hessian(rs: &RootSystem) -> HessianReport {
    let n = rs.n();
    let mut full = QMat::zeros(n, n);
    for root in rs.all_roots() {
        for i in 0..n {
            for j in 0..n {
                full[(i, j)] += qi(2 * root.coeffs()[i] * root.coeffs()[j]);
            }
        }
    }
    // Chart basis vectors v_j = e_j - e_1, j = 2..n.
    let d = n - 1;
    let mut chart = QMat::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            // (v_a)^T H (v_b) with v_a supported at {0, a+1}.
            let mut val = Q::zero();
            for &(i, si) in &[(0usize, -1i64), (a + 1, 1i64)] {
                for &(j, sj) in &[(0usize, -1i64), (b + 1, 1i64)] {
                    val += qi(si * sj) * full[(i, j)];
                }
            }
            chart[(a, b)] = val;
        }
    }
    let chart_rows: Vec<Vec<Q>> = (0..d)
        .map(|i| (0..d).map(|j| chart[(i, j)]).collect())
        .collect();
    let positive_definite = exact::is_positive_definite(&chart_rows);
    let mut m = nalgebra::DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = to_f64(chart[(i, j)]);
        }
    }
    let eig = m.symmetric_eigen();
    let min_eigenvalue = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    HessianReport {
        full,
        chart,
        min_eigenvalue,
        positive_definite,
    }
}

/// The root vector `E_kh` spanning the root space of `eps_k - eps_h`.
pub fn root_vector(root: &Root) -> Result<QMat> {
    let n = root.dim();
    if !root.is_type_a() {
        return Err(Error::InternalError(
            "root vectors are defined for eps_k - eps_h functionals only".into(),
        ));
    }
    let k = root.coeffs().iter().position(|&c| c == 1).unwrap();
    let h = root.coeffs().iter().position(|&c| c == -1).unwrap();
    Ok(QMat::unit(n, k, h))
}
