//! Optimization of `⟨x⊗y|X|x⊗y⟩` over normalized product vectors by alternating
//! eigenvector updates with random restarts.

use crate::haar::random_unit_vector;
use crate::tensor::{herm_eig_matrix, CMatrix, CVector, Dims};
use crate::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Min,
    Max,
}

#[derive(Clone, Debug)]
pub struct ProductOptimum {
    pub value: f64,
    pub x: CVector,
    pub y: CVector,
}

/// `(I ⊗ y†) X (I ⊗ y)`, an operator on the first factor.
pub fn contract_b(m: &CMatrix, dims: Dims, y: &CVector) -> CMatrix {
    CMatrix::from_fn(dims.a, dims.a, |i, k| {
        let mut acc = crate::tensor::c(0.0);
        for j in 0..dims.b {
            for l in 0..dims.b {
                acc += y[j].conj() * m[(dims.index(i, j), dims.index(k, l))] * y[l];
            }
        }
        acc
    })
}

/// `(x† ⊗ I) X (x ⊗ I)`, an operator on the second factor.
pub fn contract_a(m: &CMatrix, dims: Dims, x: &CVector) -> CMatrix {
    CMatrix::from_fn(dims.b, dims.b, |j, l| {
        let mut acc = crate::tensor::c(0.0);
        for i in 0..dims.a {
            for k in 0..dims.a {
                acc += x[i].conj() * m[(dims.index(i, j), dims.index(k, l))] * x[k];
            }
        }
        acc
    })
}

fn extremal_vector(m: &CMatrix, ext: Extremum) -> (f64, CVector) {
    let h = (m + m.adjoint()) * crate::tensor::c(0.5);
    let eig = herm_eig_matrix(&h).expect("symmetrized matrix is Hermitian");
    let k = match ext {
        Extremum::Min => 0,
        Extremum::Max => eig.eigenvalues.len() - 1,
    };
    (eig.eigenvalues[k], eig.vector(k))
}

/// Extremizes the product-state expectation of a Hermitian matrix.
pub fn optimize_product(
    m: &CMatrix,
    dims: Dims,
    ext: Extremum,
    restarts: usize,
    alternations: usize,
    rng: &mut Rng,
) -> ProductOptimum {
    let better = |a: f64, b: f64| match ext {
        Extremum::Min => a < b,
        Extremum::Max => a > b,
    };
    let mut best: Option<ProductOptimum> = None;
    for _ in 0..restarts.max(1) {
        let mut y = random_unit_vector(dims.b, rng);
        let mut x = random_unit_vector(dims.a, rng);
        let mut value = f64::NAN;
        for _ in 0..alternations.max(1) {
            let (_, nx) = extremal_vector(&contract_b(m, dims, &y), ext);
            x = nx;
            let (v, ny) = extremal_vector(&contract_a(m, dims, &x), ext);
            y = ny;
            value = v;
        }
        if best.as_ref().is_none_or(|b| better(value, b.value)) {
            best = Some(ProductOptimum { value, x, y });
        }
    }
    best.expect("at least one restart")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;
    use crate::tensor::{flip, kron_vec, max_entangled_projector};

    #[test]
    fn product_maximum_of_max_entangled_projector_is_one_over_d() {
        let mut rng = seeded_rng(3);
        for d in 2..5 {
            let p = max_entangled_projector(d);
            let opt = optimize_product(p.matrix(), Dims::square(d), Extremum::Max, 8, 20, &mut rng);
            assert!((opt.value - 1.0 / d as f64).abs() < 1e-10);
            let v = kron_vec(&opt.x, &opt.y);
            assert!((p.quadratic_form(&v) - opt.value).abs() < 1e-10);
        }
    }

    #[test]
    fn product_minimum_of_flip_is_zero() {
        let mut rng = seeded_rng(4);
        let f = flip(3);
        let opt = optimize_product(f.matrix(), Dims::square(3), Extremum::Min, 8, 20, &mut rng);
        assert!(opt.value.abs() < 1e-10);
    }
}
