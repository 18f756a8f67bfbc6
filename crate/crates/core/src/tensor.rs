//! Dense complex linear algebra on bipartite operator spaces.
//!
//! Product basis vectors `|i⟩⊗|j⟩` of `C^{d_A} ⊗ C^{d_B}` map to the flat index
//! `i·d_B + j`. Every other module in the crate relies on this convention.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Absolute per-entry tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Relative gap below which eigenvalues are treated as one degenerate cluster.
const DEGENERACY_TOL: f64 = 1e-9;

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Local dimensions `(d_A, d_B)` of a bipartite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
}

impl Dims {
    pub const fn new(a: usize, b: usize) -> Self {
        Dims { a, b }
    }

    pub const fn square(d: usize) -> Self {
        Dims { a: d, b: d }
    }

    pub const fn total(&self) -> usize {
        self.a * self.b
    }

    #[inline]
    pub const fn index(&self, i: usize, j: usize) -> usize {
        i * self.b + j
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}⊗{}", self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Hermitian operator on `C^{d_A} ⊗ C^{d_B}`.
///
/// Witnesses, (possibly unnormalized) states and Choi operators all use this type.
/// Construction symmetrizes `(X + X†)/2` once the input is within [`HERMITIAN_TOL`]
/// of Hermitian and rejects anything further off.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOp {
    dims: Dims,
    mat: CMatrix,
}

impl HermitianOp {
    pub fn new(dims: Dims, mat: CMatrix) -> Result<Self> {
        let n = dims.total();
        if dims.a == 0 || dims.b == 0 || mat.nrows() != n || mat.ncols() != n {
            return Err(Error::dims(format!(
                "matrix is {}x{}, expected {n}x{n} for dims {dims}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let dev = hermitian_deviation(&mat);
        if !(dev <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(HermitianOp {
            dims,
            mat: symmetrize(&mat),
        })
    }

    /// Wraps a matrix produced by an operation that is Hermitian by construction,
    /// symmetrizing away rounding noise.
    pub(crate) fn from_hermitian_parts(dims: Dims, mat: CMatrix) -> Self {
        debug_assert_eq!(mat.nrows(), dims.total());
        debug_assert!(hermitian_deviation(&mat) < 1e-9);
        HermitianOp {
            dims,
            mat: symmetrize(&mat),
        }
    }

    pub fn identity(dims: Dims) -> Self {
        HermitianOp {
            dims,
            mat: CMatrix::identity(dims.total(), dims.total()),
        }
    }

    pub fn zeros(dims: Dims) -> Self {
        HermitianOp {
            dims,
            mat: CMatrix::zeros(dims.total(), dims.total()),
        }
    }

    /// Rank-one operator `|v⟩⟨v|`.
    pub fn projector(dims: Dims, v: &CVector) -> Result<Self> {
        if v.len() != dims.total() {
            return Err(Error::dims(format!(
                "vector of length {} for dims {dims}",
                v.len()
            )));
        }
        Ok(HermitianOp {
            dims,
            mat: outer(v, v),
        })
    }

    /// `|x⟩⟨x| ⊗ |y⟩⟨y|`.
    pub fn product_projector(x: &CVector, y: &CVector) -> Self {
        let dims = Dims::new(x.len(), y.len());
        HermitianOp {
            dims,
            mat: kron(&outer(x, x), &outer(y, y)),
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// `tr(self · other)`; real for a pair of Hermitian operators.
    pub fn expectation(&self, other: &HermitianOp) -> f64 {
        hs_inner(&self.mat, &other.mat)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn frobenius_distance(&self, other: &HermitianOp) -> f64 {
        (&self.mat - &other.mat).norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianOp {
            dims: self.dims,
            mat: &self.mat * c(s),
        }
    }

    /// Same matrix, reinterpreted with different (compatible) local dimensions.
    pub fn with_dims(&self, dims: Dims) -> Result<Self> {
        HermitianOp::new(dims, self.mat.clone())
    }

    pub fn partial_transpose(&self, sub: Subsystem) -> Self {
        HermitianOp {
            dims: self.dims,
            mat: pt_unchecked(&self.mat, self.dims, sub),
        }
    }

    pub fn partial_trace(&self, sub: Subsystem) -> CMatrix {
        ptrace_unchecked(&self.mat, self.dims, sub)
    }

    /// `(L_A ⊗ L_B) X (L_A ⊗ L_B)†` for local operators `L_A`, `L_B`.
    pub fn local_congruence(&self, la: &CMatrix, lb: &CMatrix) -> Result<Self> {
        if la.nrows() != self.dims.a
            || la.ncols() != self.dims.a
            || lb.nrows() != self.dims.b
            || lb.ncols() != self.dims.b
        {
            return Err(Error::dims("local operator shapes do not match dims"));
        }
        let l = kron(la, lb);
        Ok(HermitianOp::from_hermitian_parts(
            self.dims,
            &l * &self.mat * l.adjoint(),
        ))
    }

    /// Unitary (or general) congruence `U X U†` on the whole space.
    pub fn congruence(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dims.total() || u.ncols() != self.dims.total() {
            return Err(Error::dims("congruence matrix has wrong shape"));
        }
        Ok(HermitianOp::from_hermitian_parts(
            self.dims,
            u * &self.mat * u.adjoint(),
        ))
    }

    /// `⟨v|X|v⟩`.
    pub fn quadratic_form(&self, v: &CVector) -> f64 {
        (v.adjoint() * &self.mat * v)[(0, 0)].re
    }
}

fn same_dims(a: &HermitianOp, b: &HermitianOp) {
    assert_eq!(
        a.dims, b.dims,
        "operator dims differ ({} vs {})",
        a.dims, b.dims
    );
}

impl Add for &HermitianOp {
    type Output = HermitianOp;
    fn add(self, rhs: &HermitianOp) -> HermitianOp {
        same_dims(self, rhs);
        HermitianOp {
            dims: self.dims,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &HermitianOp {
    type Output = HermitianOp;
    fn sub(self, rhs: &HermitianOp) -> HermitianOp {
        same_dims(self, rhs);
        HermitianOp {
            dims: self.dims,
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Mul<f64> for &HermitianOp {
    type Output = HermitianOp;
    fn mul(self, rhs: f64) -> HermitianOp {
        self.scale(rhs)
    }
}

/// Spectrum of a Hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct EigResult {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl EigResult {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.eigenvectors;
        let lam = CMatrix::from_diagonal(&DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&x| c(x)),
        ));
        v * lam * v.adjoint()
    }
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    if m.ncols() != n {
        return f64::INFINITY;
    }
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// `|x⟩⟨y|`.
pub fn outer(x: &CVector, y: &CVector) -> CMatrix {
    x * y.adjoint()
}

/// `tr(A† B)`-style Hilbert–Schmidt pairing `tr(A B)` of two Hermitian matrices (real part).
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    // tr(AB) = Σ_ij A_ij B_ji
    a.iter()
        .zip(b.transpose().iter())
        .map(|(x, y)| (x * y).re)
        .sum()
}

pub fn basis_vector(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = c(1.0);
    v
}

/// Builds a complex vector from real amplitudes.
pub fn real_vector(xs: &[f64]) -> CVector {
    CVector::from_iterator(xs.len(), xs.iter().map(|&x| c(x)))
}

pub fn normalized(v: &CVector) -> CVector {
    v / c(v.norm())
}

/// Standard tensor product in the `i·d_B + j` convention.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(x: &CVector, y: &CVector) -> CVector {
    x.kronecker(y)
}

fn check_square(m: &CMatrix, dims: Dims) -> Result<()> {
    let n = dims.total();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::dims(format!(
            "matrix is {}x{}, dims {dims} require {n}x{n}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Partial transpose of an arbitrary square matrix on `C^{d_A}⊗C^{d_B}`.
pub fn partial_transpose(m: &CMatrix, dims: Dims, sub: Subsystem) -> Result<CMatrix> {
    check_square(m, dims)?;
    Ok(pt_unchecked(m, dims, sub))
}

fn pt_unchecked(m: &CMatrix, dims: Dims, sub: Subsystem) -> CMatrix {
    let (da, db) = (dims.a, dims.b);
    let mut out = CMatrix::zeros(da * db, da * db);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    // (X^{T_B})_{ij,kl} = X_{il,kj};  (X^{T_A})_{ij,kl} = X_{kj,il}
                    let v = match sub {
                        Subsystem::B => m[(dims.index(i, l), dims.index(k, j))],
                        Subsystem::A => m[(dims.index(k, j), dims.index(i, l))],
                    };
                    out[(dims.index(i, j), dims.index(k, l))] = v;
                }
            }
        }
    }
    out
}

/// Traces out the named factor.
pub fn partial_trace(m: &CMatrix, dims: Dims, sub: Subsystem) -> Result<CMatrix> {
    check_square(m, dims)?;
    Ok(ptrace_unchecked(m, dims, sub))
}

fn ptrace_unchecked(m: &CMatrix, dims: Dims, sub: Subsystem) -> CMatrix {
    let (da, db) = (dims.a, dims.b);
    match sub {
        Subsystem::A => CMatrix::from_fn(db, db, |j, l| {
            (0..da).map(|i| m[(dims.index(i, j), dims.index(i, l))]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(da, da, |i, k| {
            (0..db).map(|j| m[(dims.index(i, j), dims.index(k, j))]).sum()
        }),
    }
}

fn multi_index(mut flat: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = flat % dims[k];
        flat /= dims[k];
    }
}

fn flat_index(idx: &[usize], dims: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

/// Reorders tensor factors: factor `k` of the output is factor `perm[k]` of the input.
pub fn permute_subsystems(m: &CMatrix, dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    let n: usize = dims.iter().product();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::dims("matrix size does not match subsystem dims"));
    }
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() || perm.iter().any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::invalid("not a permutation of the subsystems"));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let map: Vec<usize> = (0..n)
        .map(|flat| {
            let mut old = vec![0; dims.len()];
            multi_index(flat, dims, &mut old);
            let new: Vec<usize> = perm.iter().map(|&p| old[p]).collect();
            flat_index(&new, &new_dims)
        })
        .collect();
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        for s in 0..n {
            out[(map[r], map[s])] = m[(r, s)];
        }
    }
    Ok(out)
}

/// Transposes every factor flagged in `which` of a multipartite operator.
pub fn partial_transpose_multi(m: &CMatrix, dims: &[usize], which: &[bool]) -> Result<CMatrix> {
    let n: usize = dims.iter().product();
    if m.nrows() != n || m.ncols() != n || which.len() != dims.len() {
        return Err(Error::dims("matrix size does not match subsystem dims"));
    }
    let k = dims.len();
    let mut out = CMatrix::zeros(n, n);
    let (mut ri, mut ci) = (vec![0; k], vec![0; k]);
    for r in 0..n {
        for s in 0..n {
            multi_index(r, dims, &mut ri);
            multi_index(s, dims, &mut ci);
            for f in 0..k {
                if which[f] {
                    std::mem::swap(&mut ri[f], &mut ci[f]);
                }
            }
            out[(flat_index(&ri, dims), flat_index(&ci, dims))] = m[(r, s)];
        }
    }
    Ok(out)
}

/// Swap operator `F|ψ⟩⊗|φ⟩ = |φ⟩⊗|ψ⟩` on `C^d ⊗ C^d`.
pub fn flip(d: usize) -> HermitianOp {
    let dims = Dims::square(d);
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(dims.index(i, j), dims.index(j, i))] = c(1.0);
        }
    }
    HermitianOp { dims, mat: m }
}

/// `|Φ₊⟩ = d^{-1/2} Σ_i |ii⟩`.
pub fn max_entangled_vector(d: usize) -> CVector {
    let dims = Dims::square(d);
    let mut v = CVector::zeros(d * d);
    let amp = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[dims.index(i, i)] = c(amp);
    }
    v
}

/// `P₊ = |Φ₊⟩⟨Φ₊|`.
pub fn max_entangled_projector(d: usize) -> HermitianOp {
    let v = max_entangled_vector(d);
    HermitianOp {
        dims: Dims::square(d),
        mat: outer(&v, &v),
    }
}

/// Projectors onto the symmetric and antisymmetric subspaces, `(I ± F)/2`.
pub fn symmetric_projectors(d: usize) -> (HermitianOp, HermitianOp) {
    let f = flip(d);
    let id = HermitianOp::identity(f.dims());
    ((&id + &f).scale(0.5), (&id - &f).scale(0.5))
}

/// Eigendecomposition of a Hermitian matrix given as raw entries.
pub fn herm_eig_matrix(m: &CMatrix) -> Result<EigResult> {
    let dev = hermitian_deviation(m);
    if !(dev <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(eig_symmetrized(&symmetrize(m)))
}

/// Eigendecomposition with ascending eigenvalues and a canonical eigenbasis.
///
/// Within each degenerate cluster the basis is rebuilt by Gram–Schmidt on the
/// projections of `e_0, e_1, …` onto the eigenspace, so the output does not depend on
/// the arbitrary basis returned by the underlying solver.
pub fn herm_eig(x: &HermitianOp) -> EigResult {
    eig_symmetrized(&x.mat)
}

fn eig_symmetrized(m: &CMatrix) -> EigResult {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let scale = values
        .iter()
        .fold(1.0_f64, |acc, v| acc.max(v.abs()));

    let mut vectors = CMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= DEGENERACY_TOL * scale {
            end += 1;
        }
        let cols: Vec<CVector> = order[start..end]
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let canon = canonical_basis(&cols, n);
        for (k, v) in canon.into_iter().enumerate() {
            vectors.set_column(start + k, &v);
        }
        start = end;
    }
    EigResult {
        eigenvalues: values,
        eigenvectors: vectors,
    }
}

fn canonical_basis(cols: &[CVector], n: usize) -> Vec<CVector> {
    let k = cols.len();
    let project = |v: &CVector| -> CVector {
        cols.iter()
            .fold(CVector::zeros(n), |acc, u| acc + u * u.dotc(v))
    };
    let mut basis: Vec<CVector> = Vec::with_capacity(k);
    // Largest threshold first; falls back only if the cluster is numerically ill-conditioned.
    for threshold in [0.1, 1e-3, 1e-8] {
        basis.clear();
        for i in 0..n {
            if basis.len() == k {
                break;
            }
            let mut w = project(&basis_vector(n, i));
            for b in &basis {
                let overlap = b.dotc(&w);
                w -= b * overlap;
            }
            let norm = w.norm();
            if norm > threshold / (k as f64).sqrt() {
                basis.push(w / c(norm));
            }
        }
        if basis.len() == k {
            return basis;
        }
    }
    cols.to_vec()
}

pub fn min_eigenvalue(x: &HermitianOp) -> f64 {
    x.mat
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn max_eigenvalue_matrix(m: &CMatrix) -> Result<f64> {
    Ok(herm_eig_matrix(m)?.max())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
    }

    #[test]
    fn kron_basics() {
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(kron(&i2, &i2), CMatrix::identity(4, 4));

        let p0 = outer(&basis_vector(2, 0), &basis_vector(2, 0));
        let p1 = outer(&basis_vector(2, 1), &basis_vector(2, 1));
        let k = kron(&p0, &p1);
        for r in 0..4 {
            for s in 0..4 {
                let expected = if r == 1 && s == 1 { 1.0 } else { 0.0 };
                assert_eq!(k[(r, s)], c(expected));
            }
        }

        let xx = kron(&pauli_x(), &pauli_x());
        let out = xx * basis_vector(4, 0);
        assert_eq!(out, basis_vector(4, 3));
    }

    #[test]
    fn kron_trace_is_multiplicative() {
        let a = CMatrix::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64, i as f64 - j as f64));
        let b = CMatrix::from_fn(2, 2, |i, j| C64::new(1.0 + (i * j) as f64, 0.5));
        let t = kron(&a, &b).trace();
        assert!((t - a.trace() * b.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_transpose_of_max_entangled_is_flip_over_d() {
        for d in 2..6 {
            let pt = max_entangled_projector(d).partial_transpose(Subsystem::B);
            let f = flip(d).scale(1.0 / d as f64);
            assert!(pt.frobenius_distance(&f) < 1e-14);
        }
        let id = HermitianOp::identity(Dims::new(2, 3));
        assert_eq!(id.partial_transpose(Subsystem::B), id);
    }

    #[test]
    fn partial_transpose_moves_coherences() {
        // The 2⊗2 witness family with a=b=1 at p=0: coherences on |01⟩,|10⟩ move to |00⟩,|11⟩.
        let mut m = CMatrix::zeros(4, 4);
        for (i, j, v) in [(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0), (3, 3, 1.0), (1, 2, -1.0), (2, 1, -1.0)] {
            m[(i, j)] = c(v);
        }
        let pt = partial_transpose(&m, Dims::square(2), Subsystem::B).unwrap();
        assert_eq!(pt[(0, 3)], c(-1.0));
        assert_eq!(pt[(3, 0)], c(-1.0));
        assert_eq!(pt[(1, 2)], c(0.0));
        assert_eq!(pt[(1, 1)], c(1.0));
    }

    #[test]
    fn partial_transpose_rejects_wrong_size() {
        let m = CMatrix::zeros(5, 5);
        assert!(matches!(
            partial_transpose(&m, Dims::square(2), Subsystem::B),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(partial_trace(&m, Dims::new(2, 3), Subsystem::A).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        for d in 2..5 {
            let p = max_entangled_projector(d);
            let rb = p.partial_trace(Subsystem::B);
            assert!((rb - CMatrix::identity(d, d) * c(1.0 / d as f64)).norm() < 1e-14);
            let fb = flip(d).partial_trace(Subsystem::B);
            assert!((fb - CMatrix::identity(d, d)).norm() < 1e-14);
        }
        let ra = CMatrix::from_row_slice(2, 2, &[c(0.7), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.3)]);
        let rb = CMatrix::from_fn(3, 3, |i, j| if i == j { c([0.5, 0.3, 0.2][i]) } else { c(0.0) });
        let prod = kron(&ra, &rb);
        let back = partial_trace(&prod, Dims::new(2, 3), Subsystem::A).unwrap();
        assert!((back - &rb).norm() < 1e-14);
        let back_a = partial_trace(&prod, Dims::new(2, 3), Subsystem::B).unwrap();
        assert!((back_a - &ra).norm() < 1e-14);
    }

    #[test]
    fn flip_spectrum_and_traces() {
        for d in 2..6 {
            let f = flip(d);
            assert!(close(f.trace(), d as f64, 1e-14));
            let f2 = f.matrix() * f.matrix();
            assert!((f2 - CMatrix::identity(d * d, d * d)).norm() < 1e-14);
            let eig = herm_eig(&f);
            let neg = eig.eigenvalues.iter().filter(|&&x| x < 0.0).count();
            assert_eq!(neg, d * (d - 1) / 2);
            assert!(eig.eigenvalues.iter().all(|x| close(x.abs(), 1.0, 1e-12)));
            let (sym, anti) = symmetric_projectors(d);
            assert!((&sym - &anti).frobenius_distance(&f) < 1e-14);
            assert!(close(f.expectation(&max_entangled_projector(d)), 1.0, 1e-14));
        }
        let eig = herm_eig(&flip(2));
        assert!(close(eig.eigenvalues[0], -1.0, 1e-12));
        assert!(eig.eigenvalues[1..].iter().all(|&x| close(x, 1.0, 1e-12)));
    }

    #[test]
    fn max_entangled_projector_d2() {
        let p = max_entangled_projector(2);
        for (r, s) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((p.matrix()[(r, s)] - c(0.5)).norm() < 1e-15);
        }
        assert!((p.matrix() * p.matrix() - p.matrix()).norm() < 1e-15);
        assert!(close(p.trace(), 1.0, 1e-15));
    }

    #[test]
    fn eig_reconstruction_and_canonical_degenerate_basis() {
        let f = flip(3);
        let eig = herm_eig(&f);
        assert!(close(eig.min(), -1.0, 1e-12));
        let rec = eig.reconstruct();
        assert!((rec - f.matrix()).norm() <= 1e-10 * f.frobenius_norm());
        let gram = eig.eigenvectors.adjoint() * &eig.eigenvectors;
        assert!((gram - CMatrix::identity(9, 9)).norm() < 1e-10);
        // Identical input bits give identical output bits.
        let again = herm_eig(&f);
        assert_eq!(again.eigenvectors, eig.eigenvectors);
        // Canonical basis of the identity is the standard basis.
        let id = herm_eig(&HermitianOp::identity(Dims::square(2)));
        assert!((id.eigenvectors - CMatrix::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = CMatrix::identity(4, 4);
        m[(0, 1)] = c(1e-6);
        assert!(matches!(HermitianOp::new(Dims::square(2), m.clone()), Err(Error::NotHermitian(_))));
        assert!(herm_eig_matrix(&m).is_err());
        m[(0, 1)] = c(1e-13);
        let h = HermitianOp::new(Dims::square(2), m).unwrap();
        assert_eq!(h.matrix()[(0, 1)], h.matrix()[(1, 0)].conj());
    }

    #[test]
    fn permute_and_multi_transpose_agree_with_bipartite() {
        let m = CMatrix::from_fn(6, 6, |i, j| C64::new((i * 7 + j) as f64, (i as f64) - 2.0 * j as f64));
        let pt = partial_transpose(&m, Dims::new(2, 3), Subsystem::B).unwrap();
        let multi = partial_transpose_multi(&m, &[2, 3], &[false, true]).unwrap();
        assert_eq!(pt, multi);
        let a = CMatrix::from_fn(2, 2, |i, j| c((i + 3 * j) as f64));
        let b = CMatrix::from_fn(3, 3, |i, j| c((2 * i + j) as f64 + 0.5));
        let swapped = permute_subsystems(&kron(&a, &b), &[2, 3], &[1, 0]).unwrap();
        assert_eq!(swapped, kron(&b, &a));
        assert!(permute_subsystems(&m, &[2, 3], &[0, 0]).is_err());
    }
}
