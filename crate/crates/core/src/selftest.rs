//! Seeded self-test suites mirroring the per-module invariants, runnable
//! from the CLI. Each check is deterministic given the seed and tolerance
//! configuration.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Signed;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::atlas;
use crate::crown::{
    act_na_on_tube, embed_tube, extract_tube, in_tube_e, phi_jacobian_rank, slice_exhaustion,
    tube_distance, SymPoint, TubeCoordinates,
};
use crate::decomp::{
    ad_matrix_root_ordered, classify_element, gamma_prime, is_upper_triangular_exact, iwasawa_nak,
    jordan_multiplicative, lie_algebra_closure, lower_central_series_dims, stein_report,
    ElementClass, Tolerances,
};
use crate::exact::{q, QMat, Q};
use crate::rootsys::{
    crown_cell, exhaustion_hessian, exhaustion_u_exact, first_failing_scale, max_u_on_cell,
    restricted_roots_sl, root_vector, translate_disjointness, weyl_orbit, AVector,
};

/// Outcome of a single invariant check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

fn check(name: &str, passed: bool, details: String) -> Check {
    Check {
        name: name.to_string(),
        passed,
        details,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    RootSys,
    Decomp,
    Crown,
    Atlas,
    All,
}

impl FromStr for Scope {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rootsys" => Ok(Scope::RootSys),
            "decomp" => Ok(Scope::Decomp),
            "crown" => Ok(Scope::Crown),
            "atlas" => Ok(Scope::Atlas),
            "all" => Ok(Scope::All),
            other => Err(format!(
                "unknown scope `{other}` (expected rootsys|decomp|crown|atlas|all)"
            )),
        }
    }
}

/// Runs the selected suites with a fixed seed.
pub fn run(scope: Scope, seed: u64, tol: &Tolerances) -> Vec<Check> {
    let mut checks = Vec::new();
    if matches!(scope, Scope::RootSys | Scope::All) {
        checks.extend(rootsys_suite(seed));
    }
    if matches!(scope, Scope::Decomp | Scope::All) {
        checks.extend(decomp_suite(seed, tol));
    }
    if matches!(scope, Scope::Crown | Scope::All) {
        checks.extend(crown_suite(seed, tol));
    }
    if matches!(scope, Scope::Atlas | Scope::All) {
        checks.extend(atlas_suite());
    }
    checks
}

// ---------------------------------------------------------------------------
// Samplers (shared with the acceptance suite).

/// Random SL(n,R) element: uniform entries renormalized to determinant 1.
pub fn sample_sl(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    loop {
        let m = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let det = m.determinant();
        if det.abs() > 0.05 {
            return m / det.cbrt();
        }
    }
}

/// Random SL(3,R) element with condition number at most 40, suitable as a
/// conjugator when the checks carry absolute tolerances.
pub fn sample_conjugator3(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    loop {
        let m = sample_sl(rng, 3);
        let svd = m.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smax / smin <= 40.0 {
            return m;
        }
    }
}

/// Random rotation in SO(3).
pub fn sample_rotation3(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::<f64>::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
    let qr = m.qr();
    let mut rot = qr.q();
    if rot.determinant() < 0.0 {
        let negated = -rot.column(0);
        rot.set_column(0, &negated);
    }
    rot
}

/// Random NA element: positive diagonal normalized to determinant 1, bounded
/// upper entries.
pub fn sample_na3(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let d: Vec<f64> = (0..3).map(|_| rng.gen_range(0.5..2.0)).collect();
    let c = (d[0] * d[1] * d[2]).cbrt();
    let mut m = DMatrix::<f64>::zeros(3, 3);
    for i in 0..3 {
        m[(i, i)] = d[i] / c;
    }
    m[(0, 1)] = rng.gen_range(-1.0..1.0);
    m[(0, 2)] = rng.gen_range(-1.0..1.0);
    m[(1, 2)] = rng.gen_range(-1.0..1.0);
    m
}

/// Random unit upper-triangular element.
pub fn sample_unipotent3(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::identity(3, 3);
    m[(0, 1)] = rng.gen_range(-1.0..1.0);
    m[(0, 2)] = rng.gen_range(-1.0..1.0);
    m[(1, 2)] = rng.gen_range(-1.0..1.0);
    m
}

/// Radian argument vector sampled strictly inside `margin * cell` for sl(3),
/// returned as the full traceless triple.
pub fn sample_cell_args(rng: &mut ChaCha8Rng, margin: f64) -> [f64; 3] {
    let rs = restricted_roots_sl(3).unwrap();
    let cell = crown_cell(&rs);
    loop {
        let x = rng.gen_range(-PI / 3.0..PI / 3.0);
        let y = rng.gen_range(-PI / 3.0..PI / 3.0);
        let full = [-x - y, x, y];
        if cell.contains_radians(&full).unwrap_or(false) {
            return [full[0] * margin, full[1] * margin, full[2] * margin];
        }
    }
}

/// Random tube coordinates with arguments in `margin * cell` and moduli in
/// `[1/4, 4]` normalized to product 1.
pub fn sample_tube_coords(rng: &mut ChaCha8Rng, margin: f64) -> TubeCoordinates {
    let args = sample_cell_args(rng, margin);
    let rho: Vec<f64> = (0..3).map(|_| rng.gen_range(0.25..4.0)).collect();
    let c = (rho[0] * rho[1] * rho[2]).cbrt();
    let zeta = [
        Complex64::from_polar(rho[0] / c, args[0]),
        Complex64::from_polar(rho[1] / c, args[1]),
        Complex64::from_polar(rho[2] / c, args[2]),
    ];
    let cplx =
        |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    TubeCoordinates::new(cplx(rng), cplx(rng), cplx(rng), zeta)
        .expect("sampled zeta product is 1 by construction")
}

/// Random exact rational cell point for sl(3) (pi-units).
pub fn sample_cell_point_exact(rng: &mut ChaCha8Rng) -> AVector {
    let rs = restricted_roots_sl(3).unwrap();
    let cell = crown_cell(&rs);
    loop {
        let a = rng.gen_range(-60i64..=60);
        let b = rng.gen_range(-60i64..=60);
        let point = AVector::from_chart(&[q(a, 180), q(b, 180)]);
        if cell.contains(&point).unwrap() {
            return point;
        }
    }
}

// ---------------------------------------------------------------------------
// Suites.

fn rootsys_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x726f_6f74);
    let mut checks = Vec::new();

    // Negation closure and type-A pattern.
    let mut ok = true;
    for n in 2..=5 {
        let rs = restricted_roots_sl(n).unwrap();
        let set: BTreeSet<_> = rs.all_roots().iter().cloned().collect();
        ok &= rs.all_roots().iter().all(|r| set.contains(&r.neg()));
        ok &= rs.all_roots().len() == n * (n - 1);
        ok &= rs.positive_roots().len() == n * (n - 1) / 2;
    }
    checks.push(check("rootsys/negation-closure", ok, "sl(2..5)".into()));

    // Vertices: Weyl invariance, boundedness, origin membership.
    let mut ok = true;
    for n in [2usize, 3] {
        let rs = restricted_roots_sl(n).unwrap();
        let cell = crown_cell(&rs);
        ok &= cell.contains(&AVector::zero(n)).unwrap();
        let verts = cell.vertices().unwrap();
        let set: BTreeSet<Vec<Q>> = verts.iter().map(|v| v.coords().to_vec()).collect();
        for v in &verts {
            for perm in rs.weyl_generators() {
                ok &= set.contains(v.permuted(perm).coords());
            }
            ok &= v.coords().iter().all(|c| c.abs() < q(1, 2));
        }
    }
    checks.push(check(
        "rootsys/cell-weyl-invariant-bounded",
        ok,
        "vertices exact".into(),
    ));

    // The sl(3) hexagon.
    let rs3 = restricted_roots_sl(3).unwrap();
    let cell3 = crown_cell(&rs3);
    let verts = cell3.vertices().unwrap();
    let chart: BTreeSet<Vec<Q>> = verts.iter().map(|v| v.chart()).collect();
    let expected: BTreeSet<Vec<Q>> = [
        vec![q(1, 6), q(1, 6)],
        vec![q(1, 3), q(-1, 6)],
        vec![q(1, 6), q(-1, 3)],
        vec![q(-1, 6), q(-1, 6)],
        vec![q(-1, 3), q(1, 6)],
        vec![q(-1, 6), q(1, 3)],
    ]
    .into_iter()
    .collect();
    checks.push(check(
        "rootsys/sl3-hexagon",
        verts.len() == 6 && chart == expected,
        format!("{} vertices", verts.len()),
    ));

    // Translate disjointness at range 2 with the box certificate.
    let report = translate_disjointness(&cell3, 2).unwrap();
    checks.push(check(
        "rootsys/translate-disjointness",
        report.all_disjoint && report.offsets.len() == 24 && report.box_certifies_beyond,
        format!(
            "24 offsets disjoint; box halfwidths ({}, {})",
            report.box_halfwidths.0, report.box_halfwidths.1
        ),
    ));

    // First failing integer scale.
    let first = first_failing_scale(&cell3, 2, 8).unwrap();
    checks.push(check(
        "rootsys/first-failing-scale",
        first == Some(3),
        format!("{first:?}"),
    ));

    // Hessian: exact positive definiteness, permutation equivariance.
    let mut ok = true;
    for n in 2..=4 {
        let rs = restricted_roots_sl(n).unwrap();
        let h = exhaustion_hessian(&rs);
        ok &= h.positive_definite && h.min_eigenvalue > 0.0;
        for perm in rs.weyl_generators() {
            for i in 0..n {
                for j in 0..n {
                    ok &= h.full[(perm[i], perm[j])] == h.full[(i, j)];
                }
            }
        }
    }
    checks.push(check(
        "rootsys/hessian-positive-equivariant",
        ok,
        "exact pivots".into(),
    ));

    // Exhaustion: negative on the closure, max -pi^2/2 at vertices.
    let max = max_u_on_cell(&rs3, &cell3).unwrap();
    checks.push(check(
        "rootsys/u-max-at-vertices",
        max == q(-1, 2),
        format!("max u = {max} (pi^2 units)"),
    ));

    // Exact Weyl invariance of u at 100 sampled rational points.
    let mut ok = true;
    for _ in 0..100 {
        let x = sample_cell_point_exact(&mut rng);
        let base = exhaustion_u_exact(&rs3, &x).unwrap();
        for w in weyl_orbit(&rs3, &x).unwrap() {
            ok &= exhaustion_u_exact(&rs3, &w).unwrap() == base;
        }
    }
    checks.push(check(
        "rootsys/u-weyl-invariant-exact",
        ok,
        "100 rational samples, all 6 permutations".into(),
    ));

    // Bracket grading on matrix units.
    let mut ok = true;
    for n in [3usize, 4] {
        let rs = restricted_roots_sl(n).unwrap();
        for a in rs.all_roots() {
            for b in rs.all_roots() {
                let br = root_vector(a).unwrap().bracket(&root_vector(b).unwrap());
                let sum: Vec<i64> = a
                    .coeffs()
                    .iter()
                    .zip(b.coeffs())
                    .map(|(&x, &y)| x + y)
                    .collect();
                if sum.iter().all(|&c| c == 0) {
                    for i in 0..n {
                        for j in 0..n {
                            if i != j {
                                ok &= br[(i, j)] == Q::from_integer(0);
                            }
                        }
                    }
                } else if let Some(g) = rs.all_roots().iter().find(|r| r.coeffs() == sum) {
                    let eg = root_vector(g).unwrap();
                    let mut scalar = Q::from_integer(0);
                    for i in 0..n {
                        for j in 0..n {
                            if eg[(i, j)] != Q::from_integer(0) {
                                scalar = br[(i, j)];
                            }
                        }
                    }
                    ok &= br == eg.scale(scalar);
                } else {
                    ok &= br.is_zero();
                }
            }
        }
    }
    checks.push(check(
        "rootsys/bracket-grading",
        ok,
        "all root pairs, sl(3) and sl(4)".into(),
    ));

    // Weyl orbit membership characterization.
    let x = sample_cell_point_exact(&mut rng);
    let orbit = weyl_orbit(&rs3, &x).unwrap();
    let all_inside = orbit.iter().all(|p| cell3.contains_closure(p).unwrap());
    let outside = AVector::new(vec![q(1, 2), q(0, 1), q(-1, 2)]).unwrap();
    let orbit_out = weyl_orbit(&rs3, &outside).unwrap();
    let any_inside = orbit_out.iter().any(|p| cell3.contains_closure(p).unwrap());
    checks.push(check(
        "rootsys/orbit-closure-characterization",
        all_inside && !any_inside,
        "orbit stays in the closure iff the point does".into(),
    ));

    checks
}

fn decomp_suite(seed: u64, tol: &Tolerances) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6465_636f);
    let mut checks = Vec::new();
    let id3 = DMatrix::<f64>::identity(3, 3);

    // Iwasawa round-trip with exact structure.
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for _ in 0..200 {
        let g = sample_sl(&mut rng, 3);
        match iwasawa_nak(&g, tol) {
            Ok(f) => {
                let rel = (f.product() - &g).norm() / g.norm();
                worst = worst.max(rel);
                ok &= rel <= 1e-10;
                for i in 0..3 {
                    ok &= f.n_part[(i, i)] == 1.0 && f.a_part[(i, i)] > 0.0;
                    for j in 0..i {
                        ok &= f.n_part[(i, j)] == 0.0
                            && f.a_part[(i, j)] == 0.0
                            && f.a_part[(j, i)] == 0.0;
                    }
                }
                ok &= (f.k_part.transpose() * &f.k_part - &id3).norm() <= 1e-10;
            }
            Err(_) => ok = false,
        }
    }
    checks.push(check(
        "decomp/iwasawa-round-trip",
        ok,
        format!("200 samples, worst relative residual {worst:.2e}"),
    ));

    // Iwasawa uniqueness on structured factors.
    let mut ok = true;
    for _ in 0..100 {
        let n_in = sample_unipotent3(&mut rng);
        let a_in = {
            let mut a = DMatrix::<f64>::zeros(3, 3);
            let d: Vec<f64> = (0..3).map(|_| rng.gen_range(0.5..2.0)).collect();
            let c = (d[0] * d[1] * d[2]).cbrt();
            for i in 0..3 {
                a[(i, i)] = d[i] / c;
            }
            a
        };
        let k_in = sample_rotation3(&mut rng);
        let g = &n_in * &a_in * &k_in;
        if let Ok(f) = iwasawa_nak(&g, tol) {
            ok &= (f.n_part - &n_in).norm() <= 1e-9
                && (f.a_part - &a_in).norm() <= 1e-9
                && (f.k_part - &k_in).norm() <= 1e-9;
        } else {
            ok = false;
        }
    }
    checks.push(check(
        "decomp/iwasawa-uniqueness",
        ok,
        "100 structured factor triples".into(),
    ));

    // Jordan on synthesized commuting triples.
    let mut ok = true;
    for i in 0..100 {
        let (u, h, e) = sample_commuting_triple(&mut rng, i % 3);
        let p = sample_conjugator3(&mut rng);
        let p_inv = p.clone().try_inverse().unwrap();
        let g = &p * (&u * &h * &e) * &p_inv;
        match jordan_multiplicative(&g, tol) {
            Ok(f) => {
                ok &= (f.product() - &g).norm() <= 1e-8 * (1.0 + g.norm());
                for (a, b) in [
                    (&f.unipotent, &f.hyperbolic),
                    (&f.unipotent, &f.elliptic),
                    (&f.hyperbolic, &f.elliptic),
                ] {
                    ok &= (a * b - b * a).norm() <= 1e-8 * (1.0 + a.norm() * b.norm());
                }
                ok &= classify_element(&f.unipotent, tol).unwrap() == ElementClass::Unipotent;
                ok &= classify_element(&f.hyperbolic, tol).unwrap() == ElementClass::Hyperbolic;
                let e_class = classify_element(&f.elliptic, tol).unwrap();
                ok &= if (&e - &id3).norm() < 1e-12 {
                    e_class == ElementClass::Unipotent
                } else {
                    e_class == ElementClass::Elliptic
                };
            }
            Err(_) => ok = false,
        }
    }
    checks.push(check(
        "decomp/jordan-commuting-triples",
        ok,
        "100 conjugated block triples".into(),
    ));

    // Classification is conjugation invariant.
    let mut ok = true;
    for _ in 0..50 {
        let base = match rng.gen_range(0..3) {
            0 => sample_unipotent3(&mut rng),
            1 => {
                let mut a = DMatrix::<f64>::zeros(3, 3);
                let d: Vec<f64> = vec![rng.gen_range(1.2..2.0), rng.gen_range(0.4..0.8), 0.0];
                a[(0, 0)] = d[0];
                a[(1, 1)] = d[1];
                a[(2, 2)] = 1.0 / (d[0] * d[1]);
                a
            }
            _ => sample_rotation3(&mut rng),
        };
        let p = sample_conjugator3(&mut rng);
        let g = &p * &base * p.clone().try_inverse().unwrap();
        let (c1, c2) = (classify_element(&base, tol), classify_element(&g, tol));
        ok &= matches!((c1, c2), (Ok(a), Ok(b)) if a == b);
    }
    checks.push(check(
        "decomp/classify-conjugation-invariant",
        ok,
        "50 conjugated samples".into(),
    ));

    // gamma' is the identity map on NA.
    let mut ok = true;
    for _ in 0..50 {
        let g = sample_na3(&mut rng);
        match gamma_prime(&g, tol) {
            Ok(gp) => ok &= (gp - &g).norm() <= 1e-10 * (1.0 + g.norm()),
            Err(_) => ok = false,
        }
    }
    checks.push(check(
        "decomp/gamma-prime-idempotent-on-na",
        ok,
        "50 NA samples".into(),
    ));

    // theta identity g theta(g)^{-1} = n a^2 theta(n)^{-1}.
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n_in = sample_unipotent3(&mut rng);
        let a_in = sample_na3(&mut rng);
        let a_in = DMatrix::from_diagonal(&nalgebra::dvector![
            a_in[(0, 0)],
            a_in[(1, 1)],
            a_in[(2, 2)]
        ]);
        let k_in = sample_rotation3(&mut rng);
        let g = &n_in * &a_in * &k_in;
        let lhs = &g * g.transpose();
        let rhs = &n_in * &a_in * &a_in * n_in.transpose();
        let resid = (lhs - rhs).norm();
        worst = worst.max(resid);
        ok &= resid <= 1e-10 * (1.0 + g.norm().powi(2));
    }
    checks.push(check(
        "decomp/theta-identity",
        ok,
        format!("50 NAK triples, worst residual {worst:.2e}"),
    ));

    // Exact ad zero pattern for X in n + a.
    let mut ok = true;
    for n in [3usize, 4] {
        for _ in 0..10 {
            let mut x = QMat::zeros(n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    x[(i, j)] = q(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9));
                }
            }
            let mut diag_sum = Q::from_integer(0);
            for i in 0..(n - 1) {
                let v = q(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9));
                x[(i, i)] = v;
                diag_sum += v;
            }
            x[(n - 1, n - 1)] = -diag_sum;
            ok &= is_upper_triangular_exact(&ad_matrix_root_ordered(n, &x).unwrap());
        }
    }
    checks.push(check(
        "decomp/ad-triangular-on-na",
        ok,
        "20 rational points of n+a, exact zero pattern".into(),
    ));

    // Stein criterion cases.
    let e12 = {
        let mut m = id3.clone();
        m[(0, 1)] = 1.0;
        m
    };
    let e23 = {
        let mut m = id3.clone();
        m[(1, 2)] = 1.0;
        m
    };
    let d = DMatrix::from_diagonal(&nalgebra::dvector![2.0, 1.0, 0.5]);
    let r1 = stein_report(std::slice::from_ref(&e12), tol);
    let r2 = stein_report(std::slice::from_ref(&d), tol);
    let r3 = stein_report(&[e12.clone(), e23], tol);
    let r4 = stein_report(&[e12, d], tol);
    let ok = matches!(&r1, Ok(r) if r.nilpotent)
        && matches!(&r2, Ok(r) if r.nilpotent)
        && matches!(&r3, Ok(r) if r.nilpotent && r.series_dims == vec![3, 1, 0])
        && matches!(&r4, Ok(r) if !r.nilpotent);
    checks.push(check(
        "decomp/stein-criterion",
        ok,
        "unipotent, diagonal, Heisenberg pair, mixed pair".into(),
    ));

    // Engel consistency: series verdict matches ad-nilpotency.
    let h = DMatrix::from_diagonal(&nalgebra::dvector![1.0, -1.0, 0.0]);
    let e12m = {
        let mut m = DMatrix::<f64>::zeros(3, 3);
        m[(0, 1)] = 1.0;
        m
    };
    let e23m = {
        let mut m = DMatrix::<f64>::zeros(3, 3);
        m[(1, 2)] = 1.0;
        m
    };
    let mut ok = true;
    for gens in [vec![e12m.clone(), e23m], vec![h, e12m.clone()], vec![e12m]] {
        let span = lie_algebra_closure(&gens, tol).unwrap();
        let nilpotent = *lower_central_series_dims(&span, tol)
            .unwrap()
            .last()
            .unwrap()
            == 0;
        let engel = span.basis().iter().all(|x| {
            let dim = span.dim();
            let mut ad = DMatrix::<f64>::zeros(dim, dim);
            for (j, b) in span.basis().iter().enumerate() {
                let br = x * b - b * x;
                for (i, bi) in span.basis().iter().enumerate() {
                    ad[(i, j)] = br.iter().zip(bi.iter()).map(|(p, r)| p * r).sum();
                }
            }
            let mut power = DMatrix::<f64>::identity(dim, dim);
            for _ in 0..dim {
                power = &power * &ad;
            }
            power.norm() < 1e-8 * (1.0 + ad.norm().powi(dim as i32))
        });
        ok &= nilpotent == engel;
    }
    checks.push(check(
        "decomp/engel-consistency",
        ok,
        "series verdict matches ad nilpotency".into(),
    ));

    checks
}

/// Synthesizes a commuting (unipotent, hyperbolic, elliptic) triple; the
/// variant selects which factors are nontrivial.
pub fn sample_commuting_triple(
    rng: &mut ChaCha8Rng,
    variant: usize,
) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let id3 = DMatrix::<f64>::identity(3, 3);
    match variant {
        // Shear + scalar-on-plane diagonal + pi-rotation: all nontrivial.
        0 => {
            let t = rng.gen_range(0.2..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let r = rng.gen_range(1.2..2.5);
            let mut u = id3.clone();
            u[(0, 1)] = t;
            let h = DMatrix::from_diagonal(&nalgebra::dvector![r, r, 1.0 / (r * r)]);
            let e = DMatrix::from_diagonal(&nalgebra::dvector![-1.0, -1.0, 1.0]);
            (u, h, e)
        }
        // Generic rotation forces a trivial unipotent part.
        1 => {
            let r = rng.gen_range(1.3..2.5);
            let angle: f64 = rng.gen_range(0.3..2.8);
            let h = DMatrix::from_diagonal(&nalgebra::dvector![r, r, 1.0 / (r * r)]);
            let e = nalgebra::dmatrix![
                angle.cos(), -angle.sin(), 0.0;
                angle.sin(), angle.cos(), 0.0;
                0.0, 0.0, 1.0
            ];
            (id3.clone(), h, e)
        }
        // Unipotent times commuting diagonal, trivial elliptic part.
        _ => {
            let t = rng.gen_range(0.2..1.5);
            let r = rng.gen_range(1.3..2.5);
            let mut u = id3.clone();
            u[(0, 1)] = t;
            let h = DMatrix::from_diagonal(&nalgebra::dvector![r, r, 1.0 / (r * r)]);
            (u, h, id3.clone())
        }
    }
}

fn crown_suite(seed: u64, tol: &Tolerances) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6372_6f77);
    let mut checks = Vec::new();
    let rs = restricted_roots_sl(3).unwrap();
    let cell = crown_cell(&rs);

    // Embed -> extract round-trip, membership and unimodularity.
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let tc = sample_tube_coords(&mut rng, 0.95);
        match embed_tube(&tc) {
            Ok(s) => {
                ok &= (s.det() - Complex64::new(1.0, 0.0)).norm() <= 1e-9;
                ok &= in_tube_e(&s).member;
                match extract_tube(&s) {
                    Ok(back) => {
                        let d = tube_distance(&back, &tc).max(
                            (back.alpha - tc.alpha)
                                .norm()
                                .max((back.beta - tc.beta).norm())
                                .max((back.gamma - tc.gamma).norm())
                                .max(
                                    (0..3)
                                        .map(|i| (back.zeta[i] - tc.zeta[i]).norm())
                                        .fold(0.0f64, f64::max),
                                ),
                        );
                        worst = worst.max(d);
                        ok &= d <= 1e-9;
                    }
                    Err(_) => ok = false,
                }
            }
            Err(_) => ok = false,
        }
    }
    checks.push(check(
        "crown/round-trip-and-membership",
        ok,
        format!("1000 samples in 0.95*cell, worst deviation {worst:.2e}"),
    ));

    // Converse inclusion on tube-constructed members.
    let mut ok = true;
    for _ in 0..1000 {
        let tc = sample_tube_coords(&mut rng, 0.95);
        let s = match embed_tube(&tc) {
            Ok(s) => s,
            Err(_) => {
                ok = false;
                continue;
            }
        };
        match extract_tube(&s).and_then(|c2| embed_tube(&c2)) {
            Ok(s2) => ok &= s.distance(&s2) <= 1e-9,
            Err(_) => ok = false,
        }
    }
    checks.push(check(
        "crown/extract-embed-on-members",
        ok,
        "1000 members reproduce within 1e-9".into(),
    ));

    // NA-equivariance.
    let mut ok = true;
    for _ in 0..200 {
        let g = sample_na3(&mut rng);
        let tc = sample_tube_coords(&mut rng, 0.9);
        let moved = match act_na_on_tube(&g, &tc, tol) {
            Ok(m) => m,
            Err(_) => {
                ok = false;
                continue;
            }
        };
        let lhs = embed_tube(&moved).unwrap().to_matrix();
        let s = embed_tube(&tc).unwrap().to_matrix();
        let gc = g.map(|x| Complex64::new(x, 0.0));
        let mut rhs = nalgebra::Matrix3::<Complex64>::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = Complex64::new(0.0, 0.0);
                for p in 0..3 {
                    for qq in 0..3 {
                        acc += gc[(i, p)] * s[(p, qq)] * gc[(j, qq)];
                    }
                }
                rhs[(i, j)] = acc;
            }
        }
        ok &= (lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm());
    }
    checks.push(check(
        "crown/na-equivariance",
        ok,
        "200 NA actions match g S g^T".into(),
    ));

    // Branch uniqueness against translate disjointness.
    let report = translate_disjointness(&cell, 2).unwrap();
    let mut ok = report.all_disjoint;
    for _ in 0..200 {
        let tc = sample_tube_coords(&mut rng, 0.95);
        let args = tc.argument_vector();
        for l in -2i64..=2 {
            for m in -2i64..=2 {
                if (l, m) == (0, 0) {
                    continue;
                }
                let shifted = [
                    args[0] - (l + m) as f64 * PI,
                    args[1] + l as f64 * PI,
                    args[2] + m as f64 * PI,
                ];
                ok &= !cell.contains_radians(&shifted).unwrap_or(false);
            }
        }
    }
    checks.push(check(
        "crown/branch-uniqueness",
        ok,
        "no (l pi, m pi) alternative branch lies in the cell".into(),
    ));

    // Injectivity witness.
    let mut ok = true;
    for _ in 0..100 {
        let t1 = sample_tube_coords(&mut rng, 0.95);
        let mut t2 = sample_tube_coords(&mut rng, 0.95);
        while tube_distance(&t1, &t2) < 0.1 {
            t2 = sample_tube_coords(&mut rng, 0.95);
        }
        let (s1, s2) = (embed_tube(&t1).unwrap(), embed_tube(&t2).unwrap());
        ok &= s1.distance(&s2) >= 1e-6;
    }
    checks.push(check(
        "crown/injectivity-witness",
        ok,
        "100 distinct coordinate pairs separate by >= 1e-6".into(),
    ));

    // Jacobian rank.
    let mut ok = true;
    for i in 0..100 {
        let zeta = if i < 50 {
            let args = sample_cell_args(&mut rng, 0.98);
            let rho: Vec<f64> = (0..3).map(|_| rng.gen_range(0.5..2.0)).collect();
            let c = (rho[0] * rho[1] * rho[2]).cbrt();
            [
                Complex64::from_polar(rho[0] / c, args[0]),
                Complex64::from_polar(rho[1] / c, args[1]),
                Complex64::from_polar(rho[2] / c, args[2]),
            ]
        } else {
            // Arguments deliberately outside the cell.
            let rho: Vec<f64> = (0..3).map(|_| rng.gen_range(0.5..2.0)).collect();
            let c = (rho[0] * rho[1] * rho[2]).cbrt();
            let a0 = rng.gen_range(2.0..3.0);
            [
                Complex64::from_polar(rho[0] / c, a0),
                Complex64::from_polar(rho[1] / c, -a0 / 2.0),
                Complex64::from_polar(rho[2] / c, -a0 / 2.0),
            ]
        };
        ok &= phi_jacobian_rank(&zeta) == Ok(16);
    }
    checks.push(check(
        "crown/jacobian-rank-16",
        ok,
        "100 diagonal points, 50 inside the tube".into(),
    ));

    // Slice exhaustion: identity value and Weyl invariance.
    let id = SymPoint::from_upper([
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ])
    .unwrap();
    let u0 = slice_exhaustion(&id).unwrap();
    let mut ok = (u0 + 1.5 * PI * PI).abs() <= 1e-12;
    for _ in 0..50 {
        let args = sample_cell_args(&mut rng, 0.95);
        let mk = |a: [f64; 3]| {
            SymPoint::from_upper([
                Complex64::from_polar(1.0, 2.0 * a[0]),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::from_polar(1.0, 2.0 * a[1]),
                Complex64::new(0.0, 0.0),
                Complex64::from_polar(1.0, 2.0 * a[2]),
            ])
            .unwrap()
        };
        let base = slice_exhaustion(&mk(args)).unwrap();
        let perm = slice_exhaustion(&mk([args[1], args[2], args[0]])).unwrap();
        ok &= (base - perm).abs() <= 1e-9;
    }
    checks.push(check(
        "crown/slice-exhaustion",
        ok,
        format!("u(0) = {u0:.12} and permutation invariance"),
    ));

    checks
}

fn atlas_suite() -> Vec<Check> {
    let mut checks = Vec::new();
    let rows = atlas::list_all();
    let self_rows = rows
        .iter()
        .filter(|r| r.crown_class == atlas::CrownClass::HermitianSelf)
        .count();
    let target_rows = rows
        .iter()
        .filter(|r| matches!(r.crown_class, atlas::CrownClass::HermitianTarget(_)))
        .count();
    let rigid_rows = rows
        .iter()
        .filter(|r| r.crown_class == atlas::CrownClass::Rigid)
        .count();
    checks.push(check(
        "atlas/row-counts",
        rows.len() == 16 && self_rows == 6 && target_rows == 3 && rigid_rows == 7,
        format!("{self_rows} self, {target_rows} target, {rigid_rows} rigid rows"),
    ));

    let sl3 = atlas::lookup_str("SL(3,R)/SO(3)");
    let so41 = atlas::lookup_str("SO0(4,1)/SO(4)");
    let ok = matches!(&sl3, Ok(e) if e.crown_class == atlas::CrownClass::Rigid)
        && matches!(&so41, Ok(e) if e.crown_class
            == atlas::CrownClass::HermitianTarget("SO0(4,2)/(SO(4)xSO(2))".into()));
    checks.push(check(
        "atlas/printed-lookups",
        ok,
        "SL(3,R)/SO(3) rigid; SO0(4,1)/SO(4) -> SO0(4,2)/(SO(4)xSO(2))".into(),
    ));

    // Partition over concrete instances.
    let mut ok = true;
    let mut seen: std::collections::BTreeMap<String, u8> = std::collections::BTreeMap::new();
    let mut grid: Vec<Vec<i64>> = vec![vec![]];
    grid.extend((1..=8).map(|p| vec![p]));
    for p in 1..=8 {
        for qv in 1..=8 {
            grid.push(vec![p, qv]);
        }
    }
    for row in &rows {
        for params in &grid {
            if let Ok(entry) = atlas::lookup(row.family, params) {
                let desc = atlas::concrete_descriptor(row.family, params).unwrap();
                if let Some(&t) = seen.get(&desc) {
                    ok &= t == entry.table;
                } else {
                    seen.insert(desc, entry.table);
                }
            }
        }
    }
    checks.push(check(
        "atlas/partition",
        ok,
        format!("{} concrete instances, no cross-table match", seen.len()),
    ));

    // Round-trip every row.
    let mut ok = true;
    for row in &rows {
        let params: Vec<i64> = match row.family {
            atlas::Family::SlNR | atlas::Family::SlNC => vec![3],
            atlas::Family::SoNC => vec![4],
            atlas::Family::SpNC => vec![2],
            atlas::Family::So0P1 => vec![3],
            atlas::Family::So0PQ => vec![3, 3],
            atlas::Family::SuPQ | atlas::Family::SpPQ => vec![1, 1],
            atlas::Family::So0P2
            | atlas::Family::SoStar2n
            | atlas::Family::SpNR
            | atlas::Family::SuStar2n => vec![1],
            _ => vec![],
        };
        match atlas::lookup(row.family, &params) {
            Ok(e) => ok &= e.family == row.family && e.table == row.table,
            Err(_) => ok = false,
        }
    }
    checks.push(check("atlas/lookup-round-trip", ok, "all 16 rows".into()));

    checks
}
