//! Input documents: matrices and tube coordinates as JSON, numbers either
//! plain or `[re, im]` pairs. Entries are parsed exactly as written.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum NumOrPair {
    Num(f64),
    Pair([f64; 2]),
}

impl NumOrPair {
    pub fn to_complex(self) -> Complex64 {
        match self {
            NumOrPair::Num(re) => Complex64::new(re, 0.0),
            NumOrPair::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// `{ "n": 3, "entries": [[...], ...] }` with `n x n` rectangular entries.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub n: usize,
    pub entries: Vec<Vec<NumOrPair>>,
}

impl MatrixDocument {
    pub fn parse(text: &str) -> Result<Self, String> {
        let doc: MatrixDocument =
            serde_json::from_str(text).map_err(|e| format!("matrix document: {e}"))?;
        if doc.n == 0 || doc.entries.len() != doc.n {
            return Err(format!(
                "matrix document: expected {} rows, found {}",
                doc.n,
                doc.entries.len()
            ));
        }
        for (i, row) in doc.entries.iter().enumerate() {
            if row.len() != doc.n {
                return Err(format!(
                    "matrix document: row {i} has {} entries, expected {}",
                    row.len(),
                    doc.n
                ));
            }
        }
        let finite = doc.entries.iter().flatten().all(|e| {
            let z = e.to_complex();
            z.re.is_finite() && z.im.is_finite()
        });
        if !finite {
            return Err("matrix document: entries must be finite".into());
        }
        Ok(doc)
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.entries[i][j].to_complex())
    }

    /// Real matrix; fails if any entry carries an imaginary part.
    pub fn to_real(&self) -> Result<DMatrix<f64>, String> {
        let mut m = DMatrix::<f64>::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let z = self.entries[i][j].to_complex();
                if z.im != 0.0 {
                    return Err(format!(
                        "matrix document: entry ({i},{j}) is complex; this command takes real input"
                    ));
                }
                m[(i, j)] = z.re;
            }
        }
        Ok(m)
    }
}

/// `{ "alpha": ..., "beta": ..., "gamma": ..., "zeta": [z1, z2, z3] }`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubeDocument {
    pub alpha: NumOrPair,
    pub beta: NumOrPair,
    pub gamma: NumOrPair,
    pub zeta: [NumOrPair; 3],
}

impl TubeDocument {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("tube document: {e}"))
    }
}
