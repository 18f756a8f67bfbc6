//! Explicit separable decompositions of the worked SPA examples.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::maps::decomposable_from_q;
use crate::separability::xstate::{decompose_x_state, embed_2x2};
use crate::separability::{decomposition_residual, is_ppt, ProductDecomposition, ProductTerm};
use crate::spa::mix_white_noise;
use crate::tensor::{
    basis_vector, c, kron, max_entangled_projector, min_eigenvalue, outer, real_vector, symmetric_projectors,
    CMatrix, CVector, Dims, HermitianOp, Subsystem, C64,
};

fn x_block_op(diag: [f64; 4], coherence: f64) -> HermitianOp {
    let mut m = CMatrix::from_diagonal(&CVector::from_iterator(4, diag.iter().map(|&x| c(x))));
    m[(0, 3)] = c(coherence);
    m[(3, 0)] = c(coherence);
    HermitianOp::new(Dims::square(2), m).expect("real symmetric block")
}

fn x_block(diag: [f64; 4], coherence: f64) -> ProductDecomposition {
    decompose_x_state(&x_block_op(diag, coherence)).expect("block is PPT")
}

fn projector_sum(dims: Dims, vectors: &[CVector]) -> HermitianOp {
    let mut m = CMatrix::zeros(dims.total(), dims.total());
    for v in vectors {
        m += outer(v, v);
    }
    HermitianOp::new(dims, m).expect("sum of projectors")
}

/// `p/4 · 1 + (1−p)(Q₁ + Q₂^Γ)` with `Q₂ = a(|00⟩+|11⟩)(⟨00|+⟨11|)`, `Q₁ = b(|01⟩+|10⟩)(⟨01|+⟨10|)`.
/// CP for `p ≥ 4a/(4a+1)`, NPT for `p < 4b/(4b+1)`.
pub fn counterexample_2x2(a: f64, b: f64, p: f64) -> Result<HermitianOp> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::range("a and b must be positive"));
    }
    let dims = Dims::square(2);
    let q2 = projector_sum(dims, &[real_vector(&[1.0, 0.0, 0.0, 1.0])]).scale(a);
    let q1 = projector_sum(dims, &[real_vector(&[0.0, 1.0, 1.0, 0.0])]).scale(b);
    let e = &q1 + &decomposable_from_q(&q2);
    mix_white_noise(&e, p)
}

/// `σ_ij = 1 − |ii⟩⟨jj| − |jj⟩⟨ii|` on `span{|i⟩,|j⟩}^{⊗2}`, embedded in `3⊗3`.
fn choi_sigma(i: usize, j: usize) -> ProductDecomposition {
    embed_2x2(&x_block([1.0; 4], -1.0), Dims::square(3), [i, j], [i, j])
}

/// Decomposition of the Choi SPA witness at `p = 3/5`: `(σ₀₁ + σ₁₂ + σ₀₂ + σ_d)/15` with
/// `σ_d = |02⟩⟨02| + |10⟩⟨10| + |21⟩⟨21|`.
pub fn choi_critical_decomposition() -> ProductDecomposition {
    let dims = Dims::square(3);
    let mut dec = ProductDecomposition::empty(dims);
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        dec.extend(choi_sigma(i, j));
    }
    for (i, j) in [(0, 2), (1, 0), (2, 1)] {
        dec.push(ProductTerm::new(1.0, basis_vector(3, i), basis_vector(3, j)));
    }
    dec.scaled(1.0 / 15.0)
}

// ---------------------------------------------------------------------------
// Rank-three optimal witness in 2⊗4

/// `Q` built from `|10⟩−|01⟩`, `|02⟩−|11⟩`, `|03⟩−|12⟩` (unnormalized, `tr Q = 6`).
pub fn circle_q() -> HermitianOp {
    let dims = Dims::new(2, 4);
    let v = |plus: (usize, usize), minus: (usize, usize)| {
        let mut x = vec![0.0; 8];
        x[dims.index(plus.0, plus.1)] = 1.0;
        x[dims.index(minus.0, minus.1)] = -1.0;
        real_vector(&x)
    };
    projector_sum(dims, &[v((1, 0), (0, 1)), v((0, 2), (1, 1)), v((0, 3), (1, 2))])
}

/// `Q^Γ + a·1`; the SPA witness is `(1−p)/6` times this with `a = 6p/(8(1−p))`.
pub fn circle_witness(a: f64) -> HermitianOp {
    let qg = decomposable_from_q(&circle_q());
    &qg + &HermitianOp::identity(qg.dims()).scale(a)
}

/// Root of `a(1+a) = 1`.
pub fn circle_critical_a() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Decomposition of `Q^Γ + a·1` at the critical `a`.
///
/// With `A = diag(1,a,a,1)`, `(1⊗A)(Q^Γ+a)(1⊗A†) = a²σ + (a−a²)M`, where
/// `σ = ∫ dφ/2π |ψ(φ)⟩⟨ψ(φ)|`, `ψ(φ) = (e^{iφ}, −1) ⊗ (1, e^{iφ}, e^{2iφ}, e^{3iφ})`, and `M` is a
/// pair of PPT `2⊗2` blocks carrying `κ = (1/a − a²)/(a − a²)`. The circle integral is
/// evaluated with 64 equispaced angles, exact for its degree-3 trigonometric entries.
pub fn circle_decomposition() -> ProductDecomposition {
    let a = circle_critical_a();
    let dims = Dims::new(2, 4);
    let kappa = (1.0 / a - a * a) / (a - a * a);
    let n = 64;
    let mut filtered = ProductDecomposition::empty(dims);
    for k in 0..n {
        let phi = 2.0 * PI * k as f64 / n as f64;
        let x = CVector::from_vec(vec![C64::from_polar(1.0, phi), c(-1.0)]);
        let y = CVector::from_fn(4, |j, _| C64::from_polar(1.0, phi * j as f64));
        filtered.push(ProductTerm::new(a * a / n as f64, x, y));
    }
    let blocks = [
        ([1.0, 1.0, kappa, 1.0], [0, 1]),
        ([1.0, kappa, 1.0, 1.0], [2, 3]),
    ];
    for (diag, b_idx) in blocks {
        filtered.extend(embed_2x2(&x_block(diag, -1.0), dims, [0, 1], b_idx).scaled(a - a * a));
    }
    let a_inv = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(1.0 / a), c(1.0 / a), c(1.0)]));
    filtered
        .local_map(&CMatrix::identity(2, 2), &a_inv)
        .expect("2⊗4 shapes")
}

// ---------------------------------------------------------------------------
// 3⊗3 examples

/// `Q` from `|01⟩−|10⟩` and `|12⟩−|21⟩` (unnormalized, `tr Q = 4`).
pub fn rank2_q() -> HermitianOp {
    let dims = Dims::square(3);
    let v = |i: usize, j: usize| {
        let mut x = vec![0.0; 9];
        x[dims.index(i, j)] = 1.0;
        x[dims.index(j, i)] = -1.0;
        real_vector(&x)
    };
    projector_sum(dims, &[v(0, 1), v(1, 2)])
}

/// `Q^Γ + a·1` for the rank-two example; `a = 4p/(9(1−p))`.
pub fn rank2_matrix(a: f64) -> HermitianOp {
    let qg = decomposable_from_q(&rank2_q());
    &qg + &HermitianOp::identity(qg.dims()).scale(a)
}

/// Three-block split of `Q^Γ + √2·1`: two PPT `2⊗2` blocks and `a(|02⟩⟨02| + |20⟩⟨20|)`.
pub fn rank2_decomposition() -> ProductDecomposition {
    let a = 2f64.sqrt();
    let dims = Dims::square(3);
    let mut dec = embed_2x2(&x_block([a, 1.0 + a, 1.0 + a, a / 2.0], -1.0), dims, [0, 1], [0, 1]);
    dec.extend(embed_2x2(&x_block([a / 2.0, 1.0 + a, 1.0 + a, a], -1.0), dims, [1, 2], [1, 2]));
    dec.push(ProductTerm::new(a, basis_vector(3, 0), basis_vector(3, 2)));
    dec.push(ProductTerm::new(a, basis_vector(3, 2), basis_vector(3, 0)));
    dec
}

/// Singlet of two spin-1 particles, `(|02⟩ + |20⟩ − |11⟩)/√3`.
pub fn spin1_singlet() -> CVector {
    let s = 1.0 / 3f64.sqrt();
    real_vector(&[0.0, 0.0, s, 0.0, -s, 0.0, s, 0.0, 0.0])
}

/// `Q = 2Π₋ + 2P_Ψ` (unnormalized, `tr Q = 8`).
pub fn rank4_q() -> HermitianOp {
    let (_, anti) = symmetric_projectors(3);
    let singlet = HermitianOp::projector(Dims::square(3), &spin1_singlet()).expect("9-vector");
    (&anti + &singlet).scale(2.0)
}

/// `Q^Γ + a·1` for the rank-four example; `a = 8p/(9(1−p))`.
pub fn rank4_matrix(a: f64) -> HermitianOp {
    let qg = decomposable_from_q(&rank4_q());
    &qg + &HermitianOp::identity(qg.dims()).scale(a)
}

/// Spin-1 matrices `(J_x, J_y, J_z)` in the basis `|0⟩ = m₊₁, |1⟩ = m₀, |2⟩ = m₋₁`.
pub fn spin1_matrices() -> [CMatrix; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let jx = CMatrix::from_row_slice(3, 3, &[c(0.0), c(s), c(0.0), c(s), c(0.0), c(s), c(0.0), c(s), c(0.0)]);
    let i = C64::new(0.0, s);
    let jy = CMatrix::from_row_slice(3, 3, &[c(0.0), -i, c(0.0), i, c(0.0), -i, c(0.0), i, c(0.0)]);
    let jz = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(0.0), c(-1.0)]));
    [jx, jy, jz]
}

/// Projectors `[P_{J=0}, P_{J=1}, P_{J=2}]` on total spin, by Lagrange interpolation of
/// `J²` on its eigenvalues `0, 2, 6`.
pub fn spin1_projectors() -> [HermitianOp; 3] {
    let id3 = CMatrix::identity(3, 3);
    let mut j2 = CMatrix::zeros(9, 9);
    for j in spin1_matrices() {
        let total = kron(&j, &id3) + kron(&id3, &j);
        j2 += &total * &total;
    }
    let id = CMatrix::identity(9, 9);
    let l = |x: f64| &j2 - &id * c(x);
    let p0 = l(2.0) * l(6.0) * c(1.0 / 12.0);
    let p1 = j2.clone() * l(6.0) * c(-1.0 / 8.0);
    let p2 = j2.clone() * l(2.0) * c(1.0 / 24.0);
    let dims = Dims::square(3);
    [p0, p1, p2].map(|m| HermitianOp::new(dims, m).expect("polynomial of a Hermitian operator"))
}

/// `Σ_J tr(ρ P_J)/tr(P_J) · P_J`, the average of `D(g)⊗D(g) ρ D(g)†⊗D(g)†` over SU(2) in
/// the spin-1 representation.
pub fn spin1_depolarizer(rho: &HermitianOp) -> Result<HermitianOp> {
    if rho.dims() != Dims::square(3) {
        return Err(Error::dims(format!("spin-1 depolarizer acts on 3⊗3, got {}", rho.dims())));
    }
    let mut out = HermitianOp::zeros(rho.dims());
    for p in spin1_projectors() {
        out = &out + &p.scale(rho.expectation(&p) / p.trace());
    }
    Ok(out)
}

/// Spin-1 rotation `D(α,β,γ) = e^{−iαJ_z} d(β) e^{−iγJ_z}`.
pub fn spin1_rotation(alpha: f64, beta: f64, gamma: f64) -> CMatrix {
    let (cb, sb) = (beta.cos(), beta.sin());
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let d = [
        [(1.0 + cb) / 2.0, -sb * r, (1.0 - cb) / 2.0],
        [sb * r, cb, -sb * r],
        [(1.0 - cb) / 2.0, sb * r, (1.0 + cb) / 2.0],
    ];
    let m = |k: usize| 1.0 - k as f64;
    CMatrix::from_fn(3, 3, |i, j| {
        C64::from_polar(d[i][j], -m(i) * alpha - m(j) * gamma)
    })
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` (Golub–Welsch).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let jac = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            let k = i.max(j) as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = jac.symmetric_eigen();
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], 2.0 * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

/// SU(2) orbit `∫ dg D(g)x ⊗ D(g)y` as a finite product decomposition. Uniform grids
/// of 10 points in `α, γ` and 5 Gauss–Legendre nodes in `cos β` integrate every
/// degree ≤ 4 Wigner function exactly, which covers the twirl of `3⊗3` operators.
pub fn spin1_orbit(x: &CVector, y: &CVector, weight: f64) -> ProductDecomposition {
    let (na, nb) = (10, 5);
    let mut dec = ProductDecomposition::empty(Dims::square(3));
    for (cb, wb) in gauss_legendre(nb) {
        let beta = cb.acos();
        for ia in 0..na {
            for ig in 0..na {
                let alpha = 2.0 * PI * ia as f64 / na as f64;
                let gamma = 2.0 * PI * ig as f64 / na as f64;
                let d = spin1_rotation(alpha, beta, gamma);
                let w = weight * wb / 2.0 / (na * na) as f64;
                dec.push(ProductTerm::new(w, &d * x, &d * y));
            }
        }
    }
    dec
}

/// Decomposition of `Q^Γ + (4/3)·1` for the rank-four example: `10 [D(|02⟩⟨02|) + D(|01⟩⟨01|)]`
/// realizes `Q + 4/3`, and conjugating the second factor gives the partial transpose.
pub fn rank4_decomposition() -> ProductDecomposition {
    let e = |i| basis_vector(3, i);
    let mut dec = spin1_orbit(&e(0), &e(2), 1.0);
    dec.extend(spin1_orbit(&e(0), &e(1), 1.0));
    dec.scaled(10.0).partial_transpose(Subsystem::B)
}

#[derive(Clone, Debug)]
pub struct QutritQReport {
    /// `−λ_min(Q^Γ)` for the rank-two `Q`.
    pub r2_critical_a: f64,
    /// `9a/(4+9a)` at the computed critical `a`.
    pub r2_p_c: f64,
    pub r2_decomposition_residual: f64,
    pub r2_blocks_ppt: bool,
    /// `−λ_min(Q^Γ)` for `Q = Π₋`; the witness is then isotropic.
    pub r3_critical_a: f64,
    pub r3_isotropic_residual: f64,
    pub r4_critical_a: f64,
    pub r4_p_c: f64,
    /// `(a+1)² − 4/9` at `a = 4/3`.
    pub r4_condition_1: f64,
    /// `(a+2/3)(a−1/3) − 2` at `a = 4/3`.
    pub r4_condition_2: f64,
    /// Residual of `(Q^Γ + 4/3)^Γ` against `(4/3)·1 + 2(P₁ + P₀)`.
    pub r4_spin_form_residual: f64,
    /// Least-squares scalar `s` with `s·[D(|02⟩⟨02|) + D(|01⟩⟨01|)] ≈ (Q^Γ + 4/3)^Γ`.
    pub r4_fitted_scale: f64,
    pub r4_fit_residual: f64,
    pub r4_decomposition_residual: f64,
}

pub fn qutrit_q_suite() -> QutritQReport {
    let dims = Dims::square(3);
    let r2_critical_a = -min_eigenvalue(&decomposable_from_q(&rank2_q()));
    let r2_dec = rank2_decomposition();
    let r2_blocks_ppt = [
        [r2_critical_a, 1.0 + r2_critical_a, 1.0 + r2_critical_a, r2_critical_a / 2.0],
        [r2_critical_a / 2.0, 1.0 + r2_critical_a, 1.0 + r2_critical_a, r2_critical_a],
    ]
    .iter()
    .all(|&d| {
        let block = x_block_op(d, -1.0);
        is_ppt(&block) && min_eigenvalue(&block) >= -1e-9
    });

    let (_, anti) = symmetric_projectors(3);
    let r3_critical_a = -min_eigenvalue(&decomposable_from_q(&anti));
    let q3 = &decomposable_from_q(&anti) + &HermitianOp::identity(dims).scale(r3_critical_a);
    let iso = (&HermitianOp::identity(dims).scale(1.0 + 2.0 * r3_critical_a) - &max_entangled_projector(3).scale(3.0))
        .scale(0.5);

    let r4_critical_a = -min_eigenvalue(&decomposable_from_q(&rank4_q()));
    let a4 = 4.0 / 3.0;
    let r4_gamma = rank4_matrix(a4).partial_transpose(Subsystem::B);
    let [p0, p1, _] = spin1_projectors();
    let spin_form = &HermitianOp::identity(dims).scale(4.0 / 3.0) + &(&p1 + &p0).scale(2.0);
    let e = |i| basis_vector(3, i);
    let image = &spin1_depolarizer(&HermitianOp::product_projector(&e(0), &e(2))).expect("3⊗3")
        + &spin1_depolarizer(&HermitianOp::product_projector(&e(0), &e(1))).expect("3⊗3");
    let scale = image.expectation(&r4_gamma) / image.expectation(&image);

    QutritQReport {
        r2_critical_a,
        r2_p_c: 9.0 * r2_critical_a / (4.0 + 9.0 * r2_critical_a),
        r2_decomposition_residual: decomposition_residual(&rank2_matrix(2f64.sqrt()), &r2_dec),
        r2_blocks_ppt,
        r3_critical_a,
        r3_isotropic_residual: q3.frobenius_distance(&iso),
        r4_critical_a,
        r4_p_c: 9.0 * r4_critical_a / (8.0 + 9.0 * r4_critical_a),
        r4_condition_1: (a4 + 1.0).powi(2) - 4.0 / 9.0,
        r4_condition_2: (a4 + 2.0 / 3.0) * (a4 - 1.0 / 3.0) - 2.0,
        r4_spin_form_residual: r4_gamma.frobenius_distance(&spin_form),
        r4_fitted_scale: scale,
        r4_fit_residual: r4_gamma.frobenius_distance(&image.scale(scale)),
        r4_decomposition_residual: decomposition_residual(&rank4_matrix(a4), &rank4_decomposition()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::choi3;
    use crate::separability::verify_decomposition;
    use crate::spa::spa_witness;

    #[test]
    fn choi_decomposition_reconstructs_critical_witness() {
        let target = spa_witness(&choi3(), 0.6).unwrap();
        assert!(verify_decomposition(&target, &choi_critical_decomposition(), 1e-12));
    }

    #[test]
    fn circle_criticality_and_decomposition() {
        let a = circle_critical_a();
        assert!((a * (1.0 + a) - 1.0).abs() < 1e-15);
        assert!(min_eigenvalue(&circle_witness(a)).abs() < 1e-9);
        assert!(min_eigenvalue(&circle_witness(a - 1e-3)) < 0.0);
        let kappa = (1.0 / a - a * a) / (a - a * a);
        assert!(kappa > 1.0);
        let dec = circle_decomposition();
        assert!(verify_decomposition(&circle_witness(a), &dec, 1e-12));
    }

    #[test]
    fn counterexample_window() {
        let rho = counterexample_2x2(1.0, 2.0, 0.8).unwrap();
        assert!(min_eigenvalue(&rho) > -1e-9);
        assert!(!is_ppt(&rho));
    }

    #[test]
    fn spin_projectors_resolve_identity() {
        let ps = spin1_projectors();
        let traces: Vec<f64> = ps.iter().map(|p| p.trace()).collect();
        assert!((traces[0] - 1.0).abs() < 1e-12 && (traces[1] - 3.0).abs() < 1e-12 && (traces[2] - 5.0).abs() < 1e-12);
        let sum = &(&ps[0] + &ps[1]) + &ps[2];
        assert!(sum.frobenius_distance(&HermitianOp::identity(Dims::square(3))) < 1e-12);
        let singlet = HermitianOp::projector(Dims::square(3), &spin1_singlet()).unwrap();
        assert!(ps[0].frobenius_distance(&singlet) < 1e-12);
        let (_, anti) = symmetric_projectors(3);
        assert!(ps[1].frobenius_distance(&anti) < 1e-12);
    }

    #[test]
    fn rotation_is_unitary_and_matches_generators() {
        let d = spin1_rotation(0.3, 1.1, -0.7);
        assert!((d.adjoint() * &d - CMatrix::identity(3, 3)).norm() < 1e-13);
        let [_, jy, _] = spin1_matrices();
        // d(β) = exp(−iβ J_y)
        let beta = 0.37;
        let gen = (jy * C64::new(0.0, -beta)).exp();
        assert!((spin1_rotation(0.0, beta, 0.0) - gen).norm() < 1e-12);
    }

    #[test]
    fn orbit_quadrature_equals_depolarizer() {
        let e = |i| basis_vector(3, i);
        let dec = spin1_orbit(&e(0), &e(2), 1.0);
        let exact = spin1_depolarizer(&HermitianOp::product_projector(&e(0), &e(2))).unwrap();
        assert!(dec.assemble().frobenius_distance(&exact) < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(5);
        let integral: f64 = rule.iter().map(|(x, w)| w * x.powi(8)).sum();
        assert!((integral - 2.0 / 9.0).abs() < 1e-13);
    }
}
