//! Global NAK factorization of SL(n,R).

use nalgebra::DMatrix;

use super::{check_group_element, Tolerances};
use crate::error::{Error, Result};

/// The factors of `g = n a k`: `n` unit upper triangular, `a` positive
/// diagonal with determinant 1, `k` special orthogonal. The zero/one
/// structure of `n` and `a` is exact by construction.
#[derive(Debug, Clone)]
pub struct IwasawaFactors {
    pub n_part: DMatrix<f64>,
    pub a_part: DMatrix<f64>,
    pub k_part: DMatrix<f64>,
}

impl IwasawaFactors {
    /// Reconstruction `n a k`.
    pub fn product(&self) -> DMatrix<f64> {
        &self.n_part * &self.a_part * &self.k_part
    }
}

/// Decomposes `g` in SL(n,R) as `g = n a k`.
///
/// Computed through a Householder QR of the row-reversed transpose: with `P`
/// the exchange permutation, `g^T P = Q0 R0` gives
/// `g = (P R0^T P)(P Q0^T) = R K` with `R` upper triangular and `K`
/// orthogonal; a diagonal sign flip makes `diag(R)` positive, and `R` splits
/// as `n a`. The triple is the unique one with these structural constraints.
pub fn iwasawa_nak(g: &DMatrix<f64>, tol: &Tolerances) -> Result<IwasawaFactors> {
    check_group_element(g, tol)?;
    let n = g.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    // Inputs already in NA or in K split exactly.
    if super::in_na_chart(g, tol) {
        let mut a_part = DMatrix::<f64>::zeros(n, n);
        let mut n_part = DMatrix::<f64>::identity(n, n);
        for j in 0..n {
            a_part[(j, j)] = g[(j, j)];
            for i in 0..j {
                n_part[(i, j)] = g[(i, j)] / g[(j, j)];
            }
        }
        return Ok(IwasawaFactors {
            n_part,
            a_part,
            k_part: id,
        });
    }
    if (g.transpose() * g - &id).norm() <= tol.structural * (1.0 + g.norm()) {
        return Ok(IwasawaFactors {
            n_part: id.clone(),
            a_part: id,
            k_part: g.clone(),
        });
    }
    let p = exchange_matrix(n);
    let qr = (g.transpose() * &p).qr();
    let q0 = qr.q();
    let r0 = qr.r();
    let mut r = &p * r0.transpose() * &p;
    let mut k = &p * q0.transpose();
    for i in 0..n {
        if r[(i, i)] == 0.0 {
            return Err(Error::InvalidElement(
                "numerically singular input: zero pivot in the triangular factor".into(),
            ));
        }
        if r[(i, i)] < 0.0 {
            for row in 0..n {
                r[(row, i)] = -r[(row, i)];
            }
            for col in 0..n {
                k[(i, col)] = -k[(i, col)];
            }
        }
    }
    let mut a_part = DMatrix::<f64>::zeros(n, n);
    let mut n_part = DMatrix::<f64>::identity(n, n);
    for j in 0..n {
        a_part[(j, j)] = r[(j, j)];
        for i in 0..j {
            n_part[(i, j)] = r[(i, j)] / r[(j, j)];
        }
    }
    Ok(IwasawaFactors {
        n_part,
        a_part,
        k_part: k,
    })
}

fn exchange_matrix(n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        p[(i, n - 1 - i)] = 1.0;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn assert_structure(f: &IwasawaFactors) {
        let n = f.n_part.nrows();
        for i in 0..n {
            assert_eq!(f.n_part[(i, i)], 1.0);
            for j in 0..i {
                assert_eq!(f.n_part[(i, j)], 0.0);
                assert_eq!(f.a_part[(i, j)], 0.0);
                assert_eq!(f.a_part[(j, i)], 0.0);
            }
            assert!(f.a_part[(i, i)] > 0.0);
        }
        let kk = f.k_part.transpose() * &f.k_part;
        assert!((kk - DMatrix::<f64>::identity(n, n)).norm() <= 1e-10);
        assert!((f.k_part.determinant() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn identity_decomposes_trivially() {
        let g = DMatrix::<f64>::identity(3, 3);
        let f = iwasawa_nak(&g, &tols()).unwrap();
        assert!((f.product() - &g).norm() < 1e-14);
        assert!((f.n_part.clone() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-14);
        assert!((f.a_part.clone() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-14);
        assert_structure(&f);
    }

    #[test]
    fn upper_triangular_input_keeps_k_trivial() {
        let g = dmatrix![2.0, 1.0, -0.5; 0.0, 1.0, 3.0; 0.0, 0.0, 0.5];
        let f = iwasawa_nak(&g, &tols()).unwrap();
        assert_structure(&f);
        assert!((f.k_part.clone() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-12);
        assert!(
            (f.a_part.clone() - DMatrix::from_diagonal(&nalgebra::dvector![2.0, 1.0, 0.5]))
                .norm()
                .abs()
                < 1e-12
        );
        assert!((f.product() - &g).norm() < 1e-12);
    }

    #[test]
    fn rotation_input_lands_in_k() {
        let angle: f64 = 0.83;
        let g: DMatrix<f64> = dmatrix![
            angle.cos(), -angle.sin(), 0.0;
            angle.sin(), angle.cos(), 0.0;
            0.0, 0.0, 1.0
        ];
        let f = iwasawa_nak(&g, &tols()).unwrap();
        assert_structure(&f);
        assert!((f.n_part.clone() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-12);
        assert!((f.a_part.clone() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-12);
        assert!((f.k_part.clone() - &g).norm() < 1e-12);
    }

    #[test]
    fn round_trip_against_gram_schmidt_oracle() {
        // Independent oracle: classical Gram-Schmidt on the rows, bottom-up,
        // produces the same triangular-times-orthogonal split.
        let g: DMatrix<f64> = dmatrix![
            0.3, -1.2, 0.7;
            2.0, 0.4, -0.3;
            -0.5, 1.1, 0.9
        ];
        let g = &g / g.determinant().cbrt();
        let f = iwasawa_nak(&g, &tols()).unwrap();
        assert_structure(&f);
        assert!((f.product() - &g).norm() <= 1e-10 * g.norm());

        let (r_oracle, q_oracle) = rq_gram_schmidt(&g);
        assert!((&q_oracle - &f.k_part).norm() < 1e-9);
        let r_ours = &f.n_part * &f.a_part;
        assert!((&r_oracle - &r_ours).norm() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let not_unimodular = DMatrix::<f64>::identity(3, 3) * 2.0;
        assert!(matches!(
            iwasawa_nak(&not_unimodular, &tols()),
            Err(Error::InvalidElement(_))
        ));
        let non_finite = dmatrix![f64::NAN, 0.0; 0.0, 1.0];
        assert!(matches!(
            iwasawa_nak(&non_finite, &tols()),
            Err(Error::InvalidElement(_))
        ));
    }

    /// Test-only RQ oracle: orthonormalize the rows bottom-up.
    pub(super) fn rq_gram_schmidt(g: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = g.nrows();
        let mut q = DMatrix::<f64>::zeros(n, n);
        let mut r = DMatrix::<f64>::zeros(n, n);
        for i in (0..n).rev() {
            let mut v = g.row(i).transpose();
            for j in (i + 1)..n {
                let proj = g.row(i).transpose().dot(&q.row(j).transpose());
                r[(i, j)] = proj;
                v -= q.row(j).transpose() * proj;
            }
            let norm = v.norm();
            r[(i, i)] = norm;
            q.set_row(i, &(v / norm).transpose());
        }
        // Fix signs so the triangular factor has a positive diagonal (norms
        // already are) and determinant conventions match.
        (r, q)
    }
}
