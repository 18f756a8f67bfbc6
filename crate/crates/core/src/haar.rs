//! Haar-distributed samples from the unitary and unitary-symplectic groups, plus the
//! finite subgroups used to symmetrize Monte Carlo orbits.

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::tensor::{c, CMatrix, CVector, C64};
use crate::Rng;

fn complex_gaussian(rng: &mut Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector(d: usize, rng: &mut Rng) -> CVector {
    CVector::from_fn(d, |_, _| complex_gaussian(rng))
}

/// Uniformly distributed unit vector in `C^d`.
pub fn random_unit_vector(d: usize, rng: &mut Rng) -> CVector {
    loop {
        let v = gaussian_vector(d, rng);
        let n = v.norm();
        if n > 1e-12 {
            return v / c(n);
        }
    }
}

/// Random density matrix `G G† / tr(G G†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_density_matrix(d: usize, rank: usize, rng: &mut Rng) -> CMatrix {
    let g = CMatrix::from_fn(d, rank, |_, _| complex_gaussian(rng));
    let m = &g * g.adjoint();
    let t = m.trace();
    m / t
}

/// Haar-random `U(d)` element: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` pushed into `Q`.
pub fn haar_unitary(d: usize, rng: &mut Rng) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c(1.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Darboux form `J = ⊕ [[0,1],[-1,0]]` pairing basis vectors `(0,1), (2,3), …`.
pub(crate) fn darboux(d: usize) -> CMatrix {
    let mut j = CMatrix::zeros(d, d);
    for k in (0..d).step_by(2) {
        j[(k, k + 1)] = c(1.0);
        j[(k + 1, k)] = c(-1.0);
    }
    j
}

/// Haar-random element of `Sp(d/2) = U(d) ∩ Sp(d, C)` with respect to the Darboux `J`,
/// so that `S S† = I` and `S J Sᵀ = J`.
///
/// This is quaternionic Gram–Schmidt on a quaternionic Ginibre matrix written in its
/// `d × d` complex embedding: each Gaussian column is orthogonalized against the
/// previous pairs and completed by its partner `-J s̄`, which keeps the column set
/// closed under the quaternionic structure.
pub fn haar_unitary_symplectic(d: usize, rng: &mut Rng) -> CMatrix {
    assert!(d % 2 == 0 && d >= 2, "symplectic dimension must be even");
    let j = darboux(d);
    let mut cols: Vec<CVector> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = gaussian_vector(d, rng);
        for u in &cols {
            let o = u.dotc(&v);
            v -= u * o;
        }
        let n = v.norm();
        if n < 1e-8 {
            continue;
        }
        let v = v / c(n);
        let partner = -(&j * v.conjugate());
        cols.push(v);
        cols.push(partner);
    }
    CMatrix::from_columns(&cols)
}

/// Weyl–Heisenberg group `{X^a Z^b}` on `C^d` (phases dropped). Conjugation averaged
/// over it is the completely depolarizing map.
pub fn weyl_heisenberg(d: usize) -> Vec<CMatrix> {
    let omega = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64);
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            // X^a Z^b |j⟩ = ω^{bj} |j + a⟩
            let mut m = CMatrix::zeros(d, d);
            for jj in 0..d {
                m[((jj + a) % d, jj)] = omega((b * jj) % d);
            }
            out.push(m);
        }
    }
    out
}

/// Finite subgroup of `Sp(n)` generated by unit quaternions `{±1, ±i, ±j, ±k}` on each
/// Darboux block together with cyclic shifts of the blocks. It acts irreducibly on
/// `C^{2n}`, so its conjugation average is completely depolarizing.
pub fn quaternion_block_group(d: usize) -> Vec<CMatrix> {
    assert!(d % 2 == 0 && d >= 2);
    let n = d / 2;
    let i = C64::i();
    let units: Vec<[C64; 4]> = {
        let base = [
            [c(1.0), c(0.0), c(0.0), c(1.0)],
            [i, c(0.0), c(0.0), -i],
            [c(0.0), c(1.0), c(-1.0), c(0.0)],
            [c(0.0), i, i, c(0.0)],
        ];
        base.iter()
            .flat_map(|q| [*q, [-q[0], -q[1], -q[2], -q[3]]])
            .collect()
    };
    let mut out = Vec::new();
    let total = units.len().pow(n as u32);
    for shift in 0..n {
        for code in 0..total {
            let mut m = CMatrix::zeros(d, d);
            let mut rest = code;
            for blk in 0..n {
                let q = units[rest % units.len()];
                rest /= units.len();
                let target = (blk + shift) % n;
                for r in 0..2 {
                    for s in 0..2 {
                        m[(2 * target + r, 2 * blk + s)] = q[2 * r + s];
                    }
                }
            }
            out.push(m);
        }
    }
    out
}
