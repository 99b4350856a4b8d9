//! Minimal dense linear algebra: a square matrix type and a cyclic Jacobi
//! eigenvalue solver for symmetric matrices. Self-contained on purpose — the
//! solver is the independent oracle the analytic spectra are checked against,
//! so it must not share code with them.

use crate::error::{ModelError, Result};

/// Off-diagonal Frobenius norm below which the Jacobi iteration is considered
/// converged.
pub const JACOBI_OFFDIAG_TOL: f64 = 1e-12;
/// Sweep cap for the Jacobi iteration; symmetric matrices of the sizes used
/// here converge in well under ten sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(ModelError::ParameterOutOfRange(
                "matrix rows must all have length n".into(),
            ));
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.data[i * self.n..(i + 1) * self.n].iter().sum()
    }

    /// Largest absolute difference between the matrix and its transpose.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn offdiag_norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let v = self.get(i, j);
                sum += 2.0 * v * v;
            }
        }
        sum.sqrt()
    }
}

/// All eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi
/// rotations. The input is copied; asymmetry beyond 1e-12 is rejected.
pub fn symmetric_eigenvalues(matrix: &SquareMatrix) -> Result<Vec<f64>> {
    let asym = matrix.max_asymmetry();
    if asym > 1e-12 {
        return Err(ModelError::NotSymmetric(asym));
    }
    let n = matrix.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![matrix.get(0, 0)]);
    }

    let mut a = matrix.clone();
    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.offdiag_norm() < JACOBI_OFFDIAG_TOL {
            return Ok(sorted_diagonal(&a));
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                // tan of the rotation angle; theta overflow degrades to t = 0
                // which is a harmless no-op rotation.
                let t = {
                    let denom = theta.abs() + (theta * theta + 1.0).sqrt();
                    if theta >= 0.0 {
                        1.0 / denom
                    } else {
                        -1.0 / denom
                    }
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let app = a.get(p, p);
                let aqq = a.get(q, q);
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a.get(r, p);
                    let arq = a.get(r, q);
                    let new_rp = arp - s * (arq + tau * arp);
                    let new_rq = arq + s * (arp - tau * arq);
                    a.set(r, p, new_rp);
                    a.set(p, r, new_rp);
                    a.set(r, q, new_rq);
                    a.set(q, r, new_rq);
                }
            }
        }
    }
    if a.offdiag_norm() < JACOBI_OFFDIAG_TOL {
        Ok(sorted_diagonal(&a))
    } else {
        Err(ModelError::NoConvergence(JACOBI_MAX_SWEEPS))
    }
}

fn sorted_diagonal(a: &SquareMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = (0..a.n()).map(|i| a.get(i, i)).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}
