//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by implicit-shift QL iteration.
//!
//! Single-threaded and free of randomness, so repeated solves of the same
//! matrix give bit-identical results.

use crate::error::{Error, Result};

/// Dense symmetric matrix stored row-major (both triangles).
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Panics if `rows` is not square and symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            for (j, &x) in row.iter().enumerate() {
                m.data[i * n + j] = x;
            }
        }
        for i in 0..n {
            for j in 0..i {
                assert_eq!(
                    m.get(i, j),
                    m.get(j, i),
                    "matrix is not symmetric at ({i}, {j})"
                );
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] = x;
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, x: f64) {
        self.set(i, j, x);
        self.set(j, i, x);
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Eigenvalues in ascending order, with eigenvectors as the columns of
/// `vectors` when they were requested.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Vec<f64>>>,
}

impl Eigen {
    /// Column `k` as an owned vector.
    pub fn vector(&self, k: usize) -> Option<Vec<f64>> {
        self.vectors
            .as_ref()
            .map(|cols| cols.iter().map(|row| row[k]).collect())
    }
}

/// QL sweeps allowed per eigenvalue before giving up.
const MAX_SWEEPS_PER_VALUE: usize = 60;

pub fn symmetric_eigenvalues(a: &SymmetricMatrix) -> Result<Vec<f64>> {
    Ok(solve(a, false)?.values)
}

pub fn symmetric_eigen(a: &SymmetricMatrix) -> Result<Eigen> {
    solve(a, true)
}

fn solve(a: &SymmetricMatrix, want_vectors: bool) -> Result<Eigen> {
    let n = a.dim();
    if n == 0 {
        return Ok(Eigen {
            values: vec![],
            vectors: want_vectors.then(Vec::new),
        });
    }
    let (mut diag, mut off, mut q) = tridiagonalize(a, want_vectors);
    tridiagonal_ql(&mut diag, &mut off, q.as_mut())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = q.map(|q| {
        (0..n)
            .map(|row| order.iter().map(|&col| q.get(row, col)).collect())
            .collect()
    });
    Ok(Eigen { values, vectors })
}

/// Reduces `a` to `Qᵀ A Q = T`. Returns the diagonal of `T`, its
/// subdiagonal (`off[i] = T[i+1][i]`, last entry zero) and optionally `Q`.
fn tridiagonalize(
    a: &SymmetricMatrix,
    want_q: bool,
) -> (Vec<f64>, Vec<f64>, Option<SymmetricMatrix>) {
    let n = a.dim();
    let mut m = a.clone();
    let mut q = want_q.then(|| SymmetricMatrix::identity(n));
    let mut off = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let norm = (lo..n).map(|i| m.get(i, k).powi(2)).sum::<f64>().sqrt();
        let tail = (lo + 1..n).map(|i| m.get(i, k).powi(2)).sum::<f64>();
        if tail == 0.0 {
            off[k] = m.get(lo, k);
            continue;
        }
        let x0 = m.get(lo, k);
        let alpha = if x0 > 0.0 { -norm } else { norm };
        // Householder vector v = x - alpha e1, normalized.
        for i in lo..n {
            v[i] = m.get(i, k);
        }
        v[lo] -= alpha;
        let vnorm = (lo..n).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
        for vi in &mut v[lo..n] {
            *vi /= vnorm;
        }
        // w = A v on the trailing block, then q = w - (vᵀw) v.
        for i in lo..n {
            w[i] = (lo..n).map(|j| m.get(i, j) * v[j]).sum();
        }
        let vw: f64 = (lo..n).map(|i| v[i] * w[i]).sum();
        for i in lo..n {
            w[i] -= vw * v[i];
        }
        // A ← A − 2 v qᵀ − 2 q vᵀ on the trailing block.
        for i in lo..n {
            for j in lo..n {
                let d = 2.0 * (v[i] * w[j] + w[i] * v[j]);
                m.set(i, j, m.get(i, j) - d);
            }
        }
        m.set_sym(lo, k, alpha);
        for i in lo + 1..n {
            m.set_sym(i, k, 0.0);
        }
        off[k] = alpha;

        if let Some(q) = q.as_mut() {
            // Q ← Q H, H = I − 2 v vᵀ.
            for row in 0..n {
                let dot: f64 = (lo..n).map(|j| q.get(row, j) * v[j]).sum();
                for j in lo..n {
                    q.set(row, j, q.get(row, j) - 2.0 * dot * v[j]);
                }
            }
        }
    }
    if n >= 2 {
        off[n - 2] = m.get(n - 1, n - 2);
    }
    off[n - 1] = 0.0;
    let diag = (0..n).map(|i| m.get(i, i)).collect();
    (diag, off, q)
}

/// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal matrix.
/// Overwrites `d` with the (unsorted) eigenvalues; rotations are applied to
/// the columns of `z` when given.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut SymmetricMatrix>) -> Result<()> {
    let n = d.len();
    let eps = f64::EPSILON;
    let mut shift_total = 0.0;
    let mut scale: f64 = 0.0;
    for l in 0..n {
        scale = scale.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * scale {
            m += 1;
        }
        let mut sweeps = 0;
        // m stays fixed while the sweeps drive e[l] to zero.
        if m > l {
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS_PER_VALUE {
                    return Err(Error::NoConvergence {
                        iterations: sweeps - 1,
                        residual: e[l].abs(),
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in &mut d[l + 2..n] {
                    *di -= h;
                }
                shift_total += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let zk1 = z.get(k, i + 1);
                            let zk = z.get(k, i);
                            z.set(k, i + 1, s * zk + c * zk1);
                            z.set(k, i, c * zk - s * zk1);
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * scale {
                    break;
                }
            }
        }
        d[l] += shift_total;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> SymmetricMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = SymmetricMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.set_sym(i, j, rng.gen_range(-5.0..5.0));
            }
        }
        m
    }

    fn oracle(m: &SymmetricMatrix) -> Vec<f64> {
        let n = m.dim();
        let dm = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
        let mut vals: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        vals
    }

    #[test]
    fn two_by_two_analytic() {
        let m = SymmetricMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let vals = symmetric_eigenvalues(&m).unwrap();
        assert!((vals[0]).abs() < 1e-14 && (vals[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_and_tiny_inputs() {
        let m = SymmetricMatrix::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ]);
        assert_eq!(symmetric_eigenvalues(&m).unwrap(), vec![-1.0, 2.0, 3.0]);
        assert_eq!(
            symmetric_eigenvalues(&SymmetricMatrix::from_rows(&[vec![4.0]])).unwrap(),
            vec![4.0]
        );
        assert!(symmetric_eigenvalues(&SymmetricMatrix::zeros(0))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn matches_independent_solver() {
        for (n, seed) in [(3, 1), (7, 2), (20, 3), (64, 4), (150, 5)] {
            let m = random_symmetric(n, seed);
            let ours = symmetric_eigenvalues(&m).unwrap();
            let theirs = oracle(&m);
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn vectors_and_values_only_agree() {
        let m = random_symmetric(30, 11);
        let full = symmetric_eigen(&m).unwrap();
        let vals = symmetric_eigenvalues(&m).unwrap();
        for (a, b) in full.values.iter().zip(&vals) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn residuals_are_small(n in 1usize..25, seed in any::<u64>()) {
            let m = random_symmetric(n, seed);
            let eig = symmetric_eigen(&m).unwrap();
            let norm = m.frobenius_norm().max(1.0);
            for k in 0..n {
                let v = eig.vector(k).unwrap();
                let mv = m.mul_vec(&v);
                let res: f64 = mv.iter().zip(&v).map(|(a, b)| (a - eig.values[k] * b).powi(2)).sum::<f64>().sqrt();
                prop_assert!(res <= 1e-10 * norm, "residual {res}");
                let len: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                prop_assert!((len - 1.0).abs() < 1e-10);
            }
            prop_assert!((eig.values.iter().sum::<f64>() - m.trace()).abs() < 1e-9 * norm);
        }
    }
}
