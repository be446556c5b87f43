//! Symmetric matrices, 2-jets and the eigenvalue services the rest of the
//! crate is built on.
//!
//! `SymMatrix` stores only the upper triangle, so symmetry holds by
//! construction. Eigenvalues come from a cyclic Jacobi iteration, which is
//! accurate and robust for the small dimensions used here (n ≤ 16).
//!
//! The standard complex structure on ℝ^{2m} is block diagonal with blocks
//! `[[0, -1], [1, 0]]`. The quaternionic triple on ℝ^{4m} is left
//! multiplication by i, j, k on each ℍ = span(1, i, j, k) block:
//!
//! ```text
//! I = [[0,-1, 0, 0],   J = [[0, 0,-1, 0],   K = [[0, 0, 0,-1],
//!      [1, 0, 0, 0],        [0, 0, 0, 1],        [0, 0,-1, 0],
//!      [0, 0, 0,-1],        [1, 0, 0, 0],        [0, 1, 0, 0],
//!      [0, 0, 1, 0]]        [0,-1, 0, 0]]        [1, 0, 0, 0]]
//! ```

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Off-diagonal stopping threshold of the Jacobi iteration, relative to the
/// Frobenius norm of the input.
pub const JACOBI_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    upper: Vec<f64>,
}

#[inline]
fn tri_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "SymMatrix dimension must be at least 1");
        SymMatrix {
            n,
            upper: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    pub fn scalar(n: usize, c: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds the matrix from `f(i, j)` evaluated on the upper triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Reads a square array of rows. The upper triangle wins when the input
    /// is not exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty matrix".into()));
        }
        for row in rows {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    /// Symmetrizes a dense matrix as ½(M + Mᵗ).
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    /// The rank-one matrix v vᵗ.
    pub fn outer(v: &[f64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    /// Orthogonal projection onto the line through `e` (normalized here).
    pub fn line_projection(e: &[f64]) -> Self {
        let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u: Vec<f64> = e.iter().map(|x| x / norm).collect();
        Self::outer(&u)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[tri_index(self.n, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = tri_index(self.n, i, j);
        self.upper[k] = v;
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn upper_mut(&mut self) -> &mut [f64] {
        &mut self.upper
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s.sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        SymMatrix {
            n: self.n,
            upper: self.upper.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        SymMatrix {
            n: self.n,
            upper: self
                .upper
                .iter()
                .zip(&other.upper)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn add_scalar(&self, c: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.set(i, i, m.get(i, i) + c);
        }
        m
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// ⟨A v, v⟩.
    pub fn quad(&self, v: &[f64]) -> f64 {
        let av = self.mul_vec(v);
        av.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// h A hᵗ for a square `h` of matching size.
    pub fn conjugate(&self, h: &DMatrix<f64>) -> Self {
        Self::from_dense(&(h * self.to_dense() * h.transpose()))
    }

    /// Ascending eigenvalues. Falls back to the last Jacobi iterate in the
    /// (never observed) case of non-convergence; use [`ordered_eigenvalues`]
    /// to see that error.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self.n {
            1 => return vec![self.upper[0]],
            2 => {
                // one exact Jacobi rotation
                let (a, b, d) = (self.upper[0], self.upper[1], self.upper[2]);
                let m = 0.5 * (a + d);
                let r = (0.5 * (a - d)).hypot(b);
                return vec![m - r, m + r];
            }
            _ => {}
        }
        match jacobi(self, false) {
            Ok(e) => e.values,
            Err((partial, _)) => partial,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().unwrap()
    }
}

/// Eigenpairs of a symmetric matrix. `vectors[k]` is the unit eigenvector
/// of `values[k]`; values ascend.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymEigen {
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.values.len();
        SymMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.values[k] * self.vectors[k][i] * self.vectors[k][j])
                .sum()
        })
    }
}

fn jacobi(a: &SymMatrix, want_vectors: bool) -> std::result::Result<SymEigen, (Vec<f64>, Error)> {
    let n = a.n();
    let mut m: Vec<f64> = (0..n * n).map(|k| a.get(k / n, k % n)).collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let threshold = JACOBI_TOL * a.frobenius();
    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += 2.0 * m[p * n + q] * m[p * n + q];
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n * usize::from(want_vectors) {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off(&m) <= threshold {
        converged = true;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let values: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    if !converged {
        let defect = off(&m);
        return Err((
            values,
            Error::NoConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
                off: defect,
            },
        ));
    }
    if !want_vectors {
        return Ok(SymEigen {
            values,
            vectors: Vec::new(),
        });
    }
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    Ok(SymEigen { values, vectors })
}

/// Full ascending eigendecomposition by cyclic Jacobi.
pub fn eigh(a: &SymMatrix) -> Result<SymEigen> {
    jacobi(a, true).map_err(|(_, e)| e)
}

/// Ascending eigenvalues λ₁ ≤ … ≤ λₙ.
pub fn ordered_eigenvalues(a: &SymMatrix) -> Result<Vec<f64>> {
    eigh(a).map(|e| e.values)
}

/// A 2-jet (r, p, A).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub r: f64,
    pub p: Vec<f64>,
    pub a: SymMatrix,
}

impl Jet {
    pub fn new(r: f64, p: Vec<f64>, a: SymMatrix) -> Self {
        assert_eq!(p.len(), a.n(), "jet gradient and Hessian sizes differ");
        Jet { r, p, a }
    }

    pub fn zero(n: usize) -> Self {
        Jet::new(0.0, vec![0.0; n], SymMatrix::zeros(n))
    }

    /// The pure second-order jet (0, 0, A).
    pub fn hessian(a: SymMatrix) -> Self {
        let n = a.n();
        Jet::new(0.0, vec![0.0; n], a)
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn add(&self, other: &Jet) -> Jet {
        Jet {
            r: self.r + other.r,
            p: self.p.iter().zip(&other.p).map(|(a, b)| a + b).collect(),
            a: self.a.add(&other.a),
        }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    pub fn scale(&self, t: f64) -> Jet {
        Jet {
            r: t * self.r,
            p: self.p.iter().map(|x| t * x).collect(),
            a: self.a.scale(t),
        }
    }

    pub fn p_norm(&self) -> f64 {
        self.p.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructureKind {
    Complex,
    Quaternionic,
}

/// A complex structure J on ℝ^{2m} or a quaternionic triple I, J, K on
/// ℝ^{4m}, stored as dense orthogonal matrices.
#[derive(Clone, Debug)]
pub struct ComplexStructure {
    kind: StructureKind,
    m: usize,
    mats: Vec<DMatrix<f64>>,
}

const STRUCTURE_TOL: f64 = 1e-12;

fn block_diag(block: &[[f64; 4]; 4], m: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(4 * m, 4 * m);
    for b in 0..m {
        for i in 0..4 {
            for j in 0..4 {
                out[(4 * b + i, 4 * b + j)] = block[i][j];
            }
        }
    }
    out
}

impl ComplexStructure {
    /// The standard J on ℝ^{2m}.
    pub fn complex(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter(
                "complex dimension m must be ≥ 1".into(),
            ));
        }
        let mut j = DMatrix::zeros(2 * m, 2 * m);
        for b in 0..m {
            j[(2 * b, 2 * b + 1)] = -1.0;
            j[(2 * b + 1, 2 * b)] = 1.0;
        }
        let s = ComplexStructure {
            kind: StructureKind::Complex,
            m,
            mats: vec![j],
        };
        s.verify()?;
        Ok(s)
    }

    /// The standard quaternionic triple on ℝ^{4m}.
    pub fn quaternionic(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter(
                "quaternionic dimension m must be ≥ 1".into(),
            ));
        }
        let i = [
            [0.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
        ];
        let j = [
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ];
        let k = [
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ];
        let s = ComplexStructure {
            kind: StructureKind::Quaternionic,
            m,
            mats: vec![block_diag(&i, m), block_diag(&j, m), block_diag(&k, m)],
        };
        s.verify()?;
        Ok(s)
    }

    fn verify(&self) -> Result<()> {
        let n = self.ambient_dim();
        let id = DMatrix::<f64>::identity(n, n);
        let mut defect: f64 = 0.0;
        for m in &self.mats {
            defect = defect.max((m * m + &id).amax());
            defect = defect.max((m.transpose() * m - &id).amax());
        }
        if self.kind == StructureKind::Quaternionic {
            defect = defect.max((&self.mats[0] * &self.mats[1] - &self.mats[2]).amax());
        }
        if defect > STRUCTURE_TOL {
            return Err(Error::BadStructure(defect));
        }
        Ok(())
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    /// Complex resp. quaternionic dimension.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            StructureKind::Complex => 2 * self.m,
            StructureKind::Quaternionic => 4 * self.m,
        }
    }

    /// Multiplicity of each eigenvalue of a hermitian-symmetric matrix.
    pub fn multiplicity(&self) -> usize {
        self.mats.len() + 1
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.mats
    }

    /// Eigenvalues of the hermitian part, one per complex (quaternionic)
    /// dimension. Each group of equal real eigenvalues is averaged.
    pub fn reduced_eigenvalues(&self, a: &SymMatrix) -> Result<Vec<f64>> {
        let h = hermitian_part(a, self)?;
        let vals = h.eigenvalues();
        let mult = self.multiplicity();
        Ok(vals
            .chunks(mult)
            .map(|c| c.iter().sum::<f64>() / mult as f64)
            .collect())
    }
}

/// A_ℂ = ½(A − JAJ), resp. A_ℍ = ¼(A − IAI − JAJ − KAK).
pub fn hermitian_part(a: &SymMatrix, c: &ComplexStructure) -> Result<SymMatrix> {
    if a.n() != c.ambient_dim() {
        return Err(Error::Dimension {
            expected: c.ambient_dim(),
            got: a.n(),
        });
    }
    let d = a.to_dense();
    let mut acc = d.clone();
    for m in c.matrices() {
        acc -= m * &d * m;
    }
    Ok(SymMatrix::from_dense(&(acc / c.multiplicity() as f64)))
}

/// e₀, …, eₙ of the given values.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, &x) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// The k-th elementary symmetric function of the eigenvalues of A.
pub fn sigma_k(a: &SymMatrix, k: usize) -> Result<f64> {
    if k == 0 || k > a.n() {
        return Err(Error::InvalidParameter(format!(
            "sigma_k needs 1 ≤ k ≤ {}, got {k}",
            a.n()
        )));
    }
    Ok(elementary_symmetric(&a.eigenvalues())[k])
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub(crate) fn check_ellipticity(lam: f64, big_lam: f64) -> Result<()> {
    if !(lam > 0.0 && lam < big_lam && big_lam.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Pucci constants need 0 < lam < Lam, got lam={lam}, Lam={big_lam}"
        )));
    }
    Ok(())
}

pub(crate) fn pucci_minus_values(values: &[f64], lam: f64, big_lam: f64) -> f64 {
    values
        .iter()
        .map(|&v| if v > 0.0 { lam * v } else { big_lam * v })
        .sum()
}

/// 𝒫⁻_{λ,Λ}(B) = λ tr B⁺ + Λ tr B⁻.
pub fn pucci_minus(b: &SymMatrix, lam: f64, big_lam: f64) -> Result<f64> {
    check_ellipticity(lam, big_lam)?;
    Ok(pucci_minus_values(&b.eigenvalues(), lam, big_lam))
}

/// 𝒫⁺_{λ,Λ}(B) = −𝒫⁻_{λ,Λ}(−B).
pub fn pucci_plus(b: &SymMatrix, lam: f64, big_lam: f64) -> Result<f64> {
    Ok(-pucci_minus(&b.scale(-1.0), lam, big_lam)?)
}

/// Largest deviation of the Gram matrix of `frame` from the identity.
pub fn orthonormality_defect(frame: &[Vec<f64>]) -> f64 {
    let mut defect: f64 = 0.0;
    for (i, u) in frame.iter().enumerate() {
        for (j, v) in frame.iter().enumerate().skip(i) {
            let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((dot - target).abs());
        }
    }
    defect
}

pub const FRAME_TOL: f64 = 1e-10;

/// tr_W A = Σ ⟨A wᵢ, wᵢ⟩ over an orthonormal frame of W.
pub fn trace_on_plane(a: &SymMatrix, frame: &[Vec<f64>]) -> Result<f64> {
    for w in frame {
        if w.len() != a.n() {
            return Err(Error::Dimension {
                expected: a.n(),
                got: w.len(),
            });
        }
    }
    let defect = orthonormality_defect(frame);
    if defect > FRAME_TOL {
        return Err(Error::NotOrthonormal(defect));
    }
    Ok(frame.iter().map(|w| a.quad(w)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_reorders() {
        let v = ordered_eigenvalues(&SymMatrix::from_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0]);
        let v = ordered_eigenvalues(&SymMatrix::identity(3)).unwrap();
        assert_eq!(v, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn swap_matrix_closed_form() {
        // characteristic polynomial t² − 1
        let a = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let v = ordered_eigenvalues(&a).unwrap();
        assert_abs_diff_eq!(v[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn tri_storage_is_symmetric() {
        let mut a = SymMatrix::zeros(3);
        a.set(2, 0, 5.0);
        assert_eq!(a.get(0, 2), 5.0);
        assert_eq!(a.upper().len(), 6);
    }

    #[test]
    fn hermitian_part_of_diag_2_0() {
        let c = ComplexStructure::complex(1).unwrap();
        let h = hermitian_part(&SymMatrix::from_diag(&[2.0, 0.0]), &c).unwrap();
        assert_eq!(h, SymMatrix::identity(2));
    }

    #[test]
    fn hermitian_part_quaternionic_diag() {
        let q = ComplexStructure::quaternionic(1).unwrap();
        let h = hermitian_part(&SymMatrix::from_diag(&[1.0, 2.0, 3.0, 6.0]), &q).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 3.0 } else { 0.0 };
                assert_abs_diff_eq!(h.get(i, j), want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn hermitian_part_dimension_mismatch() {
        let c = ComplexStructure::complex(2).unwrap();
        assert!(hermitian_part(&SymMatrix::identity(3), &c).is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(
            sigma_k(&SymMatrix::from_diag(&[2.0, 3.0, 4.0]), 3).unwrap(),
            24.0
        );
        let s2 = sigma_k(&SymMatrix::from_diag(&[1.0, 1.0, -1.0]), 2).unwrap();
        assert_abs_diff_eq!(s2, -1.0, epsilon = 1e-14);
        assert!(sigma_k(&SymMatrix::identity(2), 3).is_err());
        assert!(sigma_k(&SymMatrix::identity(2), 0).is_err());
    }

    #[test]
    fn pucci_examples() {
        let b = SymMatrix::from_diag(&[2.0, -1.0]);
        assert_eq!(pucci_minus(&b, 1.0, 2.0).unwrap(), 0.0);
        let psd = SymMatrix::from_diag(&[1.0, 3.0]);
        assert_eq!(pucci_minus(&psd, 0.5, 2.0).unwrap(), 2.0);
        assert!(pucci_minus(&b, 2.0, 1.0).is_err());
        assert!(pucci_minus(&b, 0.0, 1.0).is_err());
    }

    #[test]
    fn trace_on_plane_examples() {
        let a = SymMatrix::from_diag(&[1.0, 2.0, 3.0]);
        let w = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        assert_eq!(trace_on_plane(&a, &w).unwrap(), 3.0);
        let s = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(
            trace_on_plane(&s, &[vec![e, e]]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert!(trace_on_plane(&a, &[vec![1.0, 1.0, 0.0]]).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
