//! Direct solvers for the symmetric positive definite systems that come out of
//! Dirichlet problems on graphs.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("non-positive pivot {pivot} at row {row}")]
    NonPositivePivot { row: usize, pivot: f64 },
    #[error("dimension mismatch: matrix {matrix}, right-hand side {rhs}")]
    Dimension { matrix: usize, rhs: usize },
}

/// Symmetric sparse matrix stored as full rows.
#[derive(Debug, Clone, Default)]
pub struct SparseSymmetric {
    rows: Vec<BTreeMap<usize, f64>>,
}

impl SparseSymmetric {
    pub fn new(n: usize) -> Self {
        Self {
            rows: vec![BTreeMap::new(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn add_diagonal(&mut self, i: usize, v: f64) {
        *self.rows[i].entry(i).or_insert(0.0) += v;
    }

    /// Adds `v` at `(i, j)` and `(j, i)`.
    pub fn add_off_diagonal(&mut self, i: usize, j: usize, v: f64) {
        *self.rows[i].entry(j).or_insert(0.0) += v;
        *self.rows[j].entry(i).or_insert(0.0) += v;
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|(&j, &a)| a * x[j]).sum())
            .collect()
    }

    /// Relative residual `‖Ax − b‖∞ / max(‖b‖∞, ‖A‖∞‖x‖∞)`.
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let ax = self.mul(x);
        let res = ax.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        let norm_a = self
            .rows
            .iter()
            .map(|row| row.values().map(|a| a.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let norm_x = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let norm_b = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let scale = norm_b.max(norm_a * norm_x);
        if scale == 0.0 {
            res
        } else {
            res / scale
        }
    }

    /// LDLᵀ factorization eliminating unknowns in the order given by `order`.
    ///
    /// On trees eliminated leaves first there is no fill.
    pub fn factor(&self, order: &[usize]) -> Result<Ldl, SolveError> {
        let n = self.dim();
        assert_eq!(order.len(), n);
        let mut pos = vec![0; n];
        for (p, &i) in order.iter().enumerate() {
            pos[i] = p;
        }
        let mut work: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (i, row) in self.rows.iter().enumerate() {
            for (&j, &a) in row {
                work[pos[i]].insert(pos[j], a);
            }
        }
        let mut diag = vec![0.0; n];
        let mut lower: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for k in 0..n {
            let d = work[k].get(&k).copied().unwrap_or(0.0);
            if !(d > 0.0) {
                return Err(SolveError::NonPositivePivot {
                    row: order[k],
                    pivot: d,
                });
            }
            diag[k] = d;
            let later: Vec<(usize, f64)> = work[k].range(k + 1..).map(|(&j, &a)| (j, a)).collect();
            for &(i, a_ik) in &later {
                let row = &mut work[i];
                for &(j, a_jk) in &later {
                    *row.entry(j).or_insert(0.0) -= a_ik * a_jk / d;
                }
                row.remove(&k);
            }
            lower[k] = later.into_iter().map(|(i, a)| (i, a / d)).collect();
            work[k].clear();
        }
        Ok(Ldl {
            order: order.to_vec(),
            pos,
            diag,
            lower,
        })
    }

    /// Factor, solve, and refine once.
    pub fn solve(&self, b: &[f64], order: &[usize]) -> Result<Vec<f64>, SolveError> {
        if b.len() != self.dim() {
            return Err(SolveError::Dimension {
                matrix: self.dim(),
                rhs: b.len(),
            });
        }
        let ldl = self.factor(order)?;
        let mut x = ldl.solve(b);
        let ax = self.mul(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let dx = ldl.solve(&r);
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
        Ok(x)
    }
}

/// Factor produced by [`SparseSymmetric::factor`].
#[derive(Debug, Clone)]
pub struct Ldl {
    order: Vec<usize>,
    pos: Vec<usize>,
    diag: Vec<f64>,
    /// Column `k` of the unit lower factor, in permuted coordinates.
    lower: Vec<Vec<(usize, f64)>>,
}

impl Ldl {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut y = vec![0.0; n];
        for (i, &v) in b.iter().enumerate() {
            y[self.pos[i]] = v;
        }
        for k in 0..n {
            let yk = y[k];
            for &(i, l) in &self.lower[k] {
                y[i] -= l * yk;
            }
        }
        for (yk, d) in y.iter_mut().zip(&self.diag) {
            *yk /= d;
        }
        for k in (0..n).rev() {
            let s: f64 = self.lower[k].iter().map(|&(i, l)| l * y[i]).sum();
            y[k] -= s;
        }
        let mut x = vec![0.0; n];
        for (p, &i) in self.order.iter().enumerate() {
            x[i] = y[p];
        }
        x
    }
}

/// Thomas algorithm for `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`.
/// `sub[0]` and `sup[n-1]` are ignored. Requires a nonsingular system that
/// needs no pivoting (diagonally dominant in all our uses).
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
    let n = diag.len();
    if sub.len() != n || sup.len() != n || rhs.len() != n {
        return Err(SolveError::Dimension {
            matrix: n,
            rhs: rhs.len(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 || !denom.is_finite() {
        return Err(SolveError::NonPositivePivot { row: 0, pivot: denom });
    }
    c[0] = sup[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - sub[i] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(SolveError::NonPositivePivot { row: i, pivot: denom });
        }
        c[i] = if i + 1 < n { sup[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ldl_on_small_spd() {
        let mut a = SparseSymmetric::new(3);
        a.add_diagonal(0, 4.0);
        a.add_diagonal(1, 5.0);
        a.add_diagonal(2, 6.0);
        a.add_off_diagonal(0, 1, -1.0);
        a.add_off_diagonal(1, 2, -2.0);
        a.add_off_diagonal(0, 2, 0.5);
        let b = [1.0, 2.0, 3.0];
        for order in [[0, 1, 2], [2, 0, 1], [1, 2, 0]] {
            let x = a.solve(&b, &order).unwrap();
            assert!(a.relative_residual(&x, &b) < 1e-15);
        }
    }

    #[test]
    fn indefinite_pivot_fails() {
        let mut a = SparseSymmetric::new(2);
        a.add_diagonal(0, 1.0);
        a.add_diagonal(1, 1.0);
        a.add_off_diagonal(0, 1, 2.0);
        assert!(matches!(a.factor(&[0, 1]), Err(SolveError::NonPositivePivot { .. })));
    }

    #[test]
    fn thomas_matches_hand_solve() {
        // 3x - y = 1, -x + 3y = 0
        let x = solve_tridiagonal(&[0.0, -1.0], &[3.0, 3.0], &[-1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!((x[0] - 3.0 / 8.0).abs() < 1e-15);
        assert!((x[1] - 1.0 / 8.0).abs() < 1e-15);
    }
}
