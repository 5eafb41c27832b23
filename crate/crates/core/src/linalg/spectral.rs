use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::hermitian::HermitianOperator;
use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Relative gap below which neighbouring eigenvalues are merged into one cluster.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Clustered spectral decomposition `A = Σ_j λ_j Π_j`.
///
/// The eigenvectors are stored column-wise in ascending eigenvalue order and every
/// column is tagged with the cluster it belongs to. Projectors are assembled on
/// demand from those columns; most consumers work directly in the eigenbasis.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    multiplicities: Vec<usize>,
    raw_eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    cluster_of: Vec<usize>,
    cluster_tol: f64,
}

/// Decomposes `a`, merging eigenvalues `λ < μ` whenever
/// `μ - λ <= cluster_tol * max(1, |λ|, |μ|)`.
pub fn spectral_decompose(a: &HermitianOperator, cluster_tol: f64) -> Result<SpectralDecomposition> {
    decompose(a, cluster_tol, None)
}

/// Same as [`spectral_decompose`], but eigenvalues within `±zero_tol` are set to
/// exactly zero before clustering, and a cluster containing such a value keeps
/// zero as its representative.
pub(crate) fn spectral_decompose_snapped(
    a: &HermitianOperator,
    cluster_tol: f64,
    zero_tol: f64,
) -> Result<SpectralDecomposition> {
    decompose(a, cluster_tol, Some(zero_tol))
}

fn decompose(a: &HermitianOperator, cluster_tol: f64, zero_tol: Option<f64>) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let eig = SymmetricEigen::try_new(a.matrix().clone(), f64::EPSILON, 0).ok_or_else(|| Error::Eigensolver {
        dim: n,
        input: format!("{:?}", a.matrix().as_slice()),
    })?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver {
            dim: n,
            input: format!("{:?}", a.matrix().as_slice()),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut raw: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let mut snapped = vec![false; n];
    if let Some(tol) = zero_tol {
        for (v, s) in raw.iter_mut().zip(snapped.iter_mut()) {
            if v.abs() <= tol {
                *v = 0.0;
                *s = true;
            }
        }
    }

    let mut eigenvalues = Vec::new();
    let mut multiplicities = Vec::new();
    let mut cluster_of = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n {
            let (lo, hi) = (raw[end - 1], raw[end]);
            let scale = 1.0_f64.max(lo.abs()).max(hi.abs());
            if hi - lo <= cluster_tol * scale {
                end += 1;
            } else {
                break;
            }
        }
        let members = &raw[start..end];
        let rep = if snapped[start..end].iter().any(|&s| s) {
            0.0
        } else {
            members.iter().sum::<f64>() / members.len() as f64
        };
        let idx = eigenvalues.len();
        eigenvalues.push(rep);
        multiplicities.push(end - start);
        cluster_of.extend(std::iter::repeat(idx).take(end - start));
        start = end;
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        multiplicities,
        raw_eigenvalues: raw,
        eigenvectors,
        cluster_of,
        cluster_tol,
    })
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvectors.nrows()
    }

    /// Distinct (clustered) eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Eigenvalues as returned by the solver, one per column, ascending.
    pub fn raw_eigenvalues(&self) -> &[f64] {
        &self.raw_eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// Cluster index of every eigenvector column.
    pub fn cluster_of(&self) -> &[usize] {
        &self.cluster_of
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    pub fn num_clusters(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Clustered eigenvalue attached to eigenvector column `col`.
    pub fn column_eigenvalue(&self, col: usize) -> f64 {
        self.eigenvalues[self.cluster_of[col]]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Orthogonal projector onto the `j`-th eigenspace.
    pub fn projector(&self, j: usize) -> HermitianOperator {
        self.diagonal_function(|col| if self.cluster_of[col] == j { 1.0 } else { 0.0 })
    }

    pub fn projectors(&self) -> Vec<HermitianOperator> {
        (0..self.num_clusters()).map(|j| self.projector(j)).collect()
    }

    /// `Σ_j λ_j Π_j`.
    pub fn reconstruct(&self) -> HermitianOperator {
        self.diagonal_function(|col| self.column_eigenvalue(col))
    }

    /// `V diag(w) V^dagger` where `w[col]` comes from `weight(col)`.
    pub(crate) fn diagonal_function(&self, weight: impl Fn(usize) -> f64) -> HermitianOperator {
        let v = &self.eigenvectors;
        let n = self.dim();
        let mut scaled = v.clone();
        for c in 0..n {
            let w = weight(c);
            scaled.column_mut(c).scale_mut(w);
        }
        HermitianOperator::from_computed(&(scaled * v.adjoint()))
    }

    /// `V^dagger M V`: coordinates of `m` in the eigenbasis.
    pub(crate) fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * m * &self.eigenvectors
    }

    /// `V X V^dagger`.
    pub(crate) fn out_of_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        &self.eigenvectors * x * self.eigenvectors.adjoint()
    }

    /// Multiplies the eigenbasis coordinates of `m` entrywise by `weights(a, b)` and
    /// maps back. This is `Σ_{jk} w_{jk} Π_j M Π_k` when `weights` depends only on
    /// the clusters of `a` and `b`.
    pub(crate) fn hadamard_in_eigenbasis(
        &self,
        m: &CMatrix,
        weights: impl Fn(usize, usize) -> f64,
    ) -> CMatrix {
        let mut x = self.to_eigenbasis(m);
        let n = self.dim();
        for b in 0..n {
            for a in 0..n {
                x[(a, b)] *= Complex64::new(weights(a, b), 0.0);
            }
        }
        self.out_of_eigenbasis(&x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, seeded};

    fn fro(m: &HermitianOperator) -> f64 {
        m.frobenius_norm()
    }

    #[test]
    fn identity_has_a_single_cluster() {
        let s = spectral_decompose(&HermitianOperator::identity(2), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0]);
        assert_eq!(s.multiplicities(), &[2]);
        assert!(fro(&(&s.projector(0) - &HermitianOperator::identity(2))) < 1e-14);
    }

    #[test]
    fn diagonal_input_gives_coordinate_projectors() {
        let a = HermitianOperator::diagonal(&[0.75, 0.25]);
        let s = spectral_decompose(&a, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(s.eigenvalues().len(), 2);
        assert!((s.eigenvalues()[0] - 0.25).abs() < 1e-15);
        assert!((s.eigenvalues()[1] - 0.75).abs() < 1e-15);
        let p_hi = s.projector(1);
        assert!(fro(&(&p_hi - &HermitianOperator::diagonal(&[1.0, 0.0]))) < 1e-14);
        let p_lo = s.projector(0);
        assert!(fro(&(&p_lo - &HermitianOperator::diagonal(&[0.0, 1.0]))) < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = seeded(11);
        let a = random_hermitian(4, &mut rng);
        let s = spectral_decompose(&a, DEFAULT_CLUSTER_TOL).unwrap();
        assert!(fro(&(&s.reconstruct() - &a)) <= 1e-9 * fro(&a));
    }

    #[test]
    fn near_degenerate_eigenvalues_merge() {
        let a = HermitianOperator::diagonal(&[0.5, 0.5 + 1e-12, 0.1]);
        let s = spectral_decompose(&a, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(s.num_clusters(), 2);
        assert_eq!(s.multiplicities(), &[1, 2]);
    }

    #[test]
    fn snapping_zeroes_tiny_eigenvalues() {
        let a = HermitianOperator::diagonal(&[1e-13, -3e-12, 0.4]);
        let s = spectral_decompose_snapped(&a, DEFAULT_CLUSTER_TOL, 1e-10).unwrap();
        assert_eq!(s.eigenvalues(), &[0.0, 0.4]);
        assert_eq!(s.multiplicities(), &[2, 1]);
    }
}
