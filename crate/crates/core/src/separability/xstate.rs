//! Explicit product decompositions of PPT `2⊗2` operators with a single coherence.
//!
//! For `ρ = diag(p, q, r, s) + c|00⟩⟨11| + h.c.` with `|c|² ≤ qr` and `|c|² ≤ ps`, the
//! phase-averaged vectors `x = (x₀, x₁e^{iθ})`, `y = (1, y₁e^{i(φ−θ)})`, `θ ∈ {0, π/2, π, 3π/2}`
//! reproduce the coherence and a diagonal with `d₀₀d₁₁ = d₀₁d₁₀ = |c|²`. The rest of the
//! diagonal is a sum of basis product states. Coherence on `|01⟩⟨10|` is handled by
//! relabeling the second factor.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::separability::{ProductDecomposition, ProductTerm};
use crate::tensor::{basis_vector, CMatrix, CVector, Dims, HermitianOp, C64};

fn swap_b(m: &CMatrix) -> CMatrix {
    let perm = [1usize, 0, 3, 2];
    CMatrix::from_fn(4, 4, |i, j| m[(perm[i], perm[j])])
}

fn single_coherence(m: &CMatrix, tol: f64) -> Result<ProductDecomposition> {
    let dims = Dims::square(2);
    let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
    let (p, q, r, s) = (diag[0], diag[1], diag[2], diag[3]);
    let cc = m[(0, 3)];
    let mut dec = ProductDecomposition::empty(dims);
    let mut rest = diag.clone();
    if cc.norm() > tol {
        let a = cc.norm();
        if a * a > q * r + tol || a * a > p * s + tol {
            return Err(Error::invalid("operator is not PPT and positive"));
        }
        let d00 = (a * (p / s).sqrt()).min(p);
        let d01 = (a * (q / r).sqrt()).min(q);
        let d10 = (a * (r / q).sqrt()).min(r);
        let x0 = d00.sqrt();
        let x1 = d10.sqrt();
        let y1 = (d01 / d00).sqrt();
        let phi = -cc.arg();
        for k in 0..4 {
            let theta = FRAC_PI_2 * k as f64;
            let x = CVector::from_vec(vec![C64::new(x0, 0.0), C64::from_polar(x1, theta)]);
            let y = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::from_polar(y1, phi - theta)]);
            dec.push(ProductTerm::new(0.25, x, y));
        }
        rest[0] -= d00;
        rest[1] -= d01;
        rest[2] -= d10;
        rest[3] -= a * a / d00;
    }
    for (k, &g) in rest.iter().enumerate() {
        if g < -tol {
            return Err(Error::Numerical(format!("negative diagonal remainder {g}")));
        }
        if g > 0.0 {
            dec.push(ProductTerm::new(g, basis_vector(2, k / 2), basis_vector(2, k % 2)));
        }
    }
    Ok(dec)
}

/// Product decomposition of a PPT `2⊗2` operator whose only off-diagonal entries sit on
/// `|00⟩⟨11|` or on `|01⟩⟨10|` (and their conjugates).
pub fn decompose_x_state(rho: &HermitianOp) -> Result<ProductDecomposition> {
    if rho.dims() != Dims::square(2) {
        return Err(Error::dims(format!("expected 2⊗2, got {}", rho.dims())));
    }
    let m = rho.matrix();
    let scale = m.norm().max(1e-300);
    let tol = 1e-12 * scale;
    for i in 0..4 {
        for j in 0..4 {
            if i != j && i + j != 3 && m[(i, j)].norm() > tol {
                return Err(Error::invalid("operator is not of X form"));
            }
        }
    }
    let c03 = m[(0, 3)].norm() > tol;
    let c12 = m[(1, 2)].norm() > tol;
    match (c03, c12) {
        (true, true) => Err(Error::invalid("both X coherences are present")),
        (_, false) => single_coherence(m, tol),
        (false, true) => {
            let dec = single_coherence(&swap_b(m), tol)?;
            let flip = CMatrix::from_fn(2, 2, |i, j| C64::new(if i != j { 1.0 } else { 0.0 }, 0.0));
            dec.local_map(&CMatrix::identity(2, 2), &flip)
        }
    }
}

/// Embeds a `2⊗2` decomposition into `dims` on the basis states `a_idx` of the first
/// factor and `b_idx` of the second.
pub fn embed_2x2(dec: &ProductDecomposition, dims: Dims, a_idx: [usize; 2], b_idx: [usize; 2]) -> ProductDecomposition {
    let ea = CMatrix::from_fn(dims.a, 2, |i, k| C64::new(if a_idx[k] == i { 1.0 } else { 0.0 }, 0.0));
    let eb = CMatrix::from_fn(dims.b, 2, |i, k| C64::new(if b_idx[k] == i { 1.0 } else { 0.0 }, 0.0));
    dec.local_map(&ea, &eb).expect("isometric embedding")
}
