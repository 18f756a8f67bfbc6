//! One-sided separability oracle: fully corrective conditional gradient over product
//! states. A returned decomposition certifies separability; `None` certifies nothing.

use nalgebra::{DMatrix, DVector};

use crate::optimize::{optimize_product, Extremum};
use crate::separability::{nnls_warm, ProductDecomposition, ProductTerm};
use crate::tensor::{c, kron_vec, min_eigenvalue, outer, CMatrix, CVector, HermitianOp};
use crate::{seeded_rng, Rng};

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub max_iter: usize,
    pub restarts: usize,
    pub alternations: usize,
    /// Frobenius residual accepted as success (for the unit-trace rescaled input).
    pub tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_iter: 400,
            restarts: 16,
            alternations: 20,
            tol: 1e-6,
        }
    }
}

impl SearchOptions {
    pub fn with_max_iter(max_iter: usize) -> Self {
        SearchOptions { max_iter, ..Self::default() }
    }
}

/// Real coordinates of a Hermitian matrix in an orthonormal basis (Frobenius norms agree).
fn hvec(m: &CMatrix) -> DVector<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    let s = std::f64::consts::SQRT_2;
    for i in 0..n {
        out.push(m[(i, i)].re);
        for j in (i + 1)..n {
            out.push(s * m[(i, j)].re);
            out.push(s * m[(i, j)].im);
        }
    }
    DVector::from_vec(out)
}

struct Atom {
    x: CVector,
    y: CVector,
    coords: DVector<f64>,
}

fn fit(atoms: &[Atom], target: &DVector<f64>, warm: &DVector<f64>) -> DVector<f64> {
    let a = DMatrix::from_columns(&atoms.iter().map(|t| t.coords.clone()).collect::<Vec<_>>());
    nnls_warm(&a, target, warm)
}

fn residual(rho: &CMatrix, atoms: &[Atom], w: &DVector<f64>) -> CMatrix {
    let mut r = rho.clone();
    for (k, atom) in atoms.iter().enumerate() {
        if w[k] > 0.0 {
            let v = kron_vec(&atom.x, &atom.y);
            r -= outer(&v, &v) * c(w[k]);
        }
    }
    r
}

/// Searches for a product decomposition of `rho`.
pub fn sep_search(rho: &HermitianOp, seed: u64, opts: SearchOptions) -> Option<ProductDecomposition> {
    let dims = rho.dims();
    let t = rho.trace();
    if !(t > 0.0) || min_eigenvalue(rho) < -1e-9 * t {
        return None;
    }
    let unit = rho.scale(1.0 / t);
    let target = hvec(unit.matrix());
    let mut rng: Rng = seeded_rng(seed);
    let mut atoms: Vec<Atom> = Vec::new();
    let mut weights = DVector::zeros(0);
    let mut r = unit.matrix().clone();
    for _ in 0..opts.max_iter {
        if r.norm() < opts.tol {
            break;
        }
        let opt = optimize_product(&r, dims, Extremum::Max, opts.restarts, opts.alternations, &mut rng);
        if opt.value <= 1e-15 {
            break;
        }
        let v = kron_vec(&opt.x, &opt.y);
        atoms.push(Atom {
            coords: hvec(&outer(&v, &v)),
            x: opt.x,
            y: opt.y,
        });
        let warm = DVector::from_fn(atoms.len(), |k, _| if k < weights.len() { weights[k] } else { 0.0 });
        weights = fit(&atoms, &target, &warm);
        let keep: Vec<bool> = weights.iter().map(|&w| w > 0.0).collect();
        if keep.iter().any(|k| !k) {
            let mut kept_w = Vec::new();
            let mut idx = 0;
            atoms.retain(|_| {
                let k = keep[idx];
                if k {
                    kept_w.push(weights[idx]);
                }
                idx += 1;
                k
            });
            weights = DVector::from_vec(kept_w);
        }
        r = residual(unit.matrix(), &atoms, &weights);
    }
    if r.norm() >= opts.tol {
        return None;
    }
    let mut dec = ProductDecomposition::empty(dims);
    for (k, atom) in atoms.iter().enumerate() {
        if weights[k] > 0.0 {
            dec.push(ProductTerm::new(weights[k] * t, atom.x.clone(), atom.y.clone()));
        }
    }
    Some(dec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separability::decomposition_residual;
    use crate::tensor::{max_entangled_projector, Dims};

    #[test]
    fn maximally_mixed_is_found() {
        let rho = HermitianOp::identity(Dims::new(2, 3)).scale(1.0 / 6.0);
        let dec = sep_search(&rho, 1, SearchOptions::default()).expect("separable");
        assert!(decomposition_residual(&rho, &dec) < 1e-6);
    }

    #[test]
    fn bell_state_is_not_found() {
        let rho = max_entangled_projector(2);
        assert!(sep_search(&rho, 2, SearchOptions::with_max_iter(60)).is_none());
    }

    #[test]
    fn hvec_is_isometric() {
        let m = max_entangled_projector(3).into_matrix();
        assert!((hvec(&m).norm() - m.norm()).abs() < 1e-14);
    }
}
