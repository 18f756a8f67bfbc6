//! PPT tests, product decompositions, a search oracle for separability, and the
//! explicit decompositions of the worked examples.

mod constructions;
mod nnls;
mod search;
mod xstate;

pub use constructions::{
    circle_critical_a, circle_decomposition, circle_q, circle_witness,
    rank2_decomposition, rank2_matrix, rank2_q, rank4_decomposition,
    rank4_matrix, rank4_q, qutrit_q_suite, choi_critical_decomposition,
    counterexample_2x2, gauss_legendre, spin1_depolarizer, spin1_matrices, spin1_orbit,
    spin1_projectors, spin1_rotation, spin1_singlet, QutritQReport,
};
pub use nnls::{nnls, nnls_warm};
pub use search::{sep_search, SearchOptions};
pub use xstate::{decompose_x_state, embed_2x2};

use crate::error::{Error, Result};
use crate::tensor::{c, min_eigenvalue, outer, CMatrix, CVector, Dims, HermitianOp, Subsystem};

/// Positivity tolerance used by the PPT predicates.
pub const PPT_TOL: f64 = 1e-9;

/// Weighted product term `p |v⟩⟨v| ⊗ |w⟩⟨w|` with unit vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    pub v: CVector,
    pub w: CVector,
}

impl ProductTerm {
    /// Normalizes `v` and `w`, moving their norms into the weight.
    pub fn new(weight: f64, v: CVector, w: CVector) -> Self {
        let (nv, nw) = (v.norm(), w.norm());
        ProductTerm {
            weight: weight * nv * nv * nw * nw,
            v: v / c(nv),
            w: w / c(nw),
        }
    }

    pub fn operator(&self) -> CMatrix {
        crate::tensor::kron(&outer(&self.v, &self.v), &outer(&self.w, &self.w)) * c(self.weight)
    }
}

/// Separable operator `Σ_k p_k |v_k⟩⟨v_k| ⊗ |w_k⟩⟨w_k|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductDecomposition {
    dims: Dims,
    terms: Vec<ProductTerm>,
}

impl ProductDecomposition {
    pub fn empty(dims: Dims) -> Self {
        ProductDecomposition { dims, terms: Vec::new() }
    }

    /// Validates shapes, positive weights and unit norms.
    pub fn new(dims: Dims, terms: Vec<ProductTerm>) -> Result<Self> {
        for (k, t) in terms.iter().enumerate() {
            if t.v.len() != dims.a || t.w.len() != dims.b {
                return Err(Error::dims(format!("term {k} has factor lengths ({}, {})", t.v.len(), t.w.len())));
            }
            if !(t.weight > 0.0) || !t.weight.is_finite() {
                return Err(Error::invalid(format!("term {k} has weight {}", t.weight)));
            }
            if (t.v.norm() - 1.0).abs() > 1e-9 || (t.w.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!("term {k} has non-unit factors")));
            }
        }
        Ok(ProductDecomposition { dims, terms })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn terms(&self) -> &[ProductTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// Adds a term; zero-weight terms are dropped.
    pub fn push(&mut self, term: ProductTerm) {
        assert_eq!((term.v.len(), term.w.len()), (self.dims.a, self.dims.b));
        if term.weight > 0.0 {
            self.terms.push(term);
        }
    }

    pub fn extend(&mut self, other: ProductDecomposition) {
        assert_eq!(self.dims, other.dims);
        self.terms.extend(other.terms);
    }

    pub fn scaled(&self, s: f64) -> Self {
        assert!(s > 0.0);
        ProductDecomposition {
            dims: self.dims,
            terms: self
                .terms
                .iter()
                .map(|t| ProductTerm { weight: t.weight * s, ..t.clone() })
                .collect(),
        }
    }

    /// Decomposition of `(L_A ⊗ L_B) ρ (L_A ⊗ L_B)†`.
    pub fn local_map(&self, la: &CMatrix, lb: &CMatrix) -> Result<Self> {
        if la.ncols() != self.dims.a || lb.ncols() != self.dims.b {
            return Err(Error::dims("local operator shapes do not match dims"));
        }
        let dims = Dims::new(la.nrows(), lb.nrows());
        let mut out = ProductDecomposition::empty(dims);
        for t in &self.terms {
            let (v, w) = (la * &t.v, lb * &t.w);
            if v.norm() > 0.0 && w.norm() > 0.0 {
                out.push(ProductTerm::new(t.weight, v, w));
            }
        }
        Ok(out)
    }

    /// Decomposition of the partial transpose, obtained by conjugating one factor.
    pub fn partial_transpose(&self, sub: Subsystem) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match sub {
                Subsystem::A => ProductTerm { v: t.v.conjugate(), ..t.clone() },
                Subsystem::B => ProductTerm { w: t.w.conjugate(), ..t.clone() },
            })
            .collect();
        ProductDecomposition { dims: self.dims, terms }
    }

    pub fn assemble(&self) -> HermitianOp {
        let n = self.dims.total();
        let mut m = CMatrix::zeros(n, n);
        for t in &self.terms {
            m += t.operator();
        }
        HermitianOp::from_hermitian_parts(self.dims, m)
    }

    /// Largest deviation of any factor from unit norm, and the smallest weight.
    pub fn term_health(&self) -> (f64, f64) {
        let mut dev: f64 = 0.0;
        let mut wmin = f64::INFINITY;
        for t in &self.terms {
            dev = dev.max((t.v.norm() - 1.0).abs()).max((t.w.norm() - 1.0).abs());
            wmin = wmin.min(t.weight);
        }
        (dev, wmin)
    }
}

pub fn is_ppt(rho: &HermitianOp) -> bool {
    min_eigenvalue(&rho.partial_transpose(Subsystem::B)) >= -PPT_TOL
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SepVerdict {
    Separable,
    Entangled,
}

/// Exact separability decision where PPT is sufficient (`2⊗2`, `2⊗3`, `3⊗2`).
pub fn ppt_sep_oracle(rho: &HermitianOp) -> Result<SepVerdict> {
    let d = rho.dims();
    if !matches!((d.a, d.b), (2, 2) | (2, 3) | (3, 2)) {
        return Err(Error::range(format!("PPT is not sufficient for separability in {d}")));
    }
    Ok(if is_ppt(rho) { SepVerdict::Separable } else { SepVerdict::Entangled })
}

/// Frobenius residual between `rho` and the assembled decomposition.
pub fn decomposition_residual(rho: &HermitianOp, dec: &ProductDecomposition) -> f64 {
    if rho.dims() != dec.dims() {
        return f64::INFINITY;
    }
    rho.frobenius_distance(&dec.assemble())
}

pub fn verify_decomposition(rho: &HermitianOp, dec: &ProductDecomposition, tol: f64) -> bool {
    let (dev, wmin) = dec.term_health();
    decomposition_residual(rho, dec) <= tol && dev < 1e-9 && (dec.is_empty() || wmin > 0.0)
}

/// `tr(E ρ)`; negative values detect entanglement.
pub fn witness_detects(e: &HermitianOp, rho: &HermitianOp) -> Result<f64> {
    if e.dims() != rho.dims() {
        return Err(Error::dims(format!("witness {} vs state {}", e.dims(), rho.dims())));
    }
    Ok(e.expectation(rho))
}
