//! Hermitian eigendecomposition with reproducible output.
//!
//! The numeric work is delegated to nalgebra's tridiagonal QR solver. On top
//! of it this module fixes the output convention: eigenvalues descending,
//! and each cluster of (numerically) equal eigenvalues re-expressed in a
//! canonical orthonormal basis derived from the cluster projector, so the
//! result depends only on the eigenspaces and not on solver internals.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::matrix::{inner, ComplexMatrix, ZERO};
use crate::error::{Error, Result};
use crate::tolerances::EIGEN_HERMITIAN;

/// Eigenvalues closer than this are treated as one cluster.
pub const DEGENERACY: f64 = 1e-9;

/// Eigenvalues (descending) and matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]`.
    pub vectors: ComplexMatrix,
}

impl Eigendecomposition {
    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.vectors.column(i)
    }

    /// `U diag(λ) U†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_diagonal(&self.values);
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }
}

pub fn hermitian_eigendecomposition(h: &ComplexMatrix) -> Result<Eigendecomposition> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let defect = h.hermitian_defect();
    if defect > EIGEN_HERMITIAN {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.rows();
    if n == 0 {
        return Ok(Eigendecomposition {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let sym = h.hermitian_part();
    let m = DMatrix::from_fn(n, n, |r, c| sym[(r, c)]);
    let eig = SymmetricEigen::new(m);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let raw: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();

    let mut vectors = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[start] - values[end] <= DEGENERACY {
            end += 1;
        }
        vectors.extend(canonical_basis(&raw[start..end], n));
        start = end;
    }
    Ok(Eigendecomposition {
        values,
        vectors: ComplexMatrix::from_columns(n, &vectors),
    })
}

/// Deterministic orthonormal basis of `span(cluster)`.
///
/// Repeatedly projects the standard basis vector with the largest remaining
/// weight (lowest index on ties), then Gram-Schmidt against the vectors
/// already chosen. The chosen pivot component of each output vector is real
/// and positive.
pub fn canonical_basis(cluster: &[Vec<Complex64>], n: usize) -> Vec<Vec<Complex64>> {
    let r = cluster.len();
    // P e_j = sum_c v_c conj(v_c[j])
    let project_unit = |j: usize| -> Vec<Complex64> {
        let mut out = vec![ZERO; n];
        for v in cluster {
            let w = v[j].conj();
            for (o, x) in out.iter_mut().zip(v) {
                *o += x * w;
            }
        }
        out
    };
    let mut chosen: Vec<Vec<Complex64>> = Vec::with_capacity(r);
    let mut used = vec![false; n];
    for _ in 0..r {
        let mut best: Option<(usize, f64, Vec<Complex64>)> = None;
        for j in 0..n {
            if used[j] {
                continue;
            }
            let mut cand = project_unit(j);
            orthogonalize(&mut cand, &chosen);
            let w: f64 = cand.iter().map(|z| z.norm_sqr()).sum();
            let better = match &best {
                None => true,
                Some((_, bw, _)) => w > bw + 1e-12,
            };
            if better {
                best = Some((j, w, cand));
            }
        }
        let (j, _, mut v) = best.expect("cluster rank exceeds dimension");
        used[j] = true;
        orthogonalize(&mut v, &chosen);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let phase = if v[j].norm() > 0.0 {
            v[j].conj() / v[j].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for z in v.iter_mut() {
            *z = *z * phase / norm;
        }
        chosen.push(v);
    }
    chosen.sort_by_key(|v| first_significant(v));
    chosen
}

fn orthogonalize(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for u in basis {
            let c = inner(u, v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= c * y;
            }
        }
    }
}

fn first_significant(v: &[Complex64]) -> usize {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    v.iter()
        .position(|z| z.norm() >= 0.5 * max)
        .unwrap_or(0)
}
