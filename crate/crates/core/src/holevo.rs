//! Measure-and-prepare channels `Λ(ρ) = Σ_k tr(F_k ρ) ρ_k` built from product
//! decompositions of Choi operators, and Monte Carlo discretizations of the covariant
//! decompositions of the critical witnesses.
//!
//! A decomposition `E = Σ_k p_k |v_k⟩⟨v_k| ⊗ |w_k⟩⟨w_k|` gives `F_k = d_A p_k |v̄_k⟩⟨v̄_k|`
//! and `ρ_k = |w_k⟩⟨w_k|`.

use crate::error::{Error, Result};
use crate::haar::{haar_unitary, haar_unitary_symplectic, quaternion_block_group, weyl_heisenberg};
use crate::maps::{breuer_hall, id_tensor_t_witness, reduction, transposition, MapRep};
use crate::separability::{ProductDecomposition, ProductTerm};
use crate::spa::critical_p;
use crate::tensor::{basis_vector, c, herm_eig_matrix, kron, kron_vec, outer, real_vector, CMatrix, CVector, Dims, HermitianOp};
use crate::{seeded_rng, Rng};

/// Tolerance on POVM positivity and output-state normalization.
pub const ELEMENT_TOL: f64 = 1e-10;

/// One outcome: POVM element on the input and the state prepared on the output.
#[derive(Clone, Debug, PartialEq)]
pub struct HolevoElement {
    pub povm: CMatrix,
    pub state: CMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolevoChannel {
    dims: Dims,
    elements: Vec<HolevoElement>,
}

fn check_hermitian_psd(m: &CMatrix, what: &str) -> Result<()> {
    let eig = herm_eig_matrix(m)?;
    if eig.min() < -ELEMENT_TOL {
        return Err(Error::invalid(format!("{what} has eigenvalue {:e}", eig.min())));
    }
    Ok(())
}

impl HolevoChannel {
    /// `dims = (d_in, d_out)`. Elements must be positive and states unit-trace.
    pub fn new(dims: Dims, elements: Vec<HolevoElement>) -> Result<Self> {
        for (k, el) in elements.iter().enumerate() {
            if el.povm.shape() != (dims.a, dims.a) || el.state.shape() != (dims.b, dims.b) {
                return Err(Error::dims(format!("element {k} does not match dims {dims}")));
            }
            check_hermitian_psd(&el.povm, &format!("F_{k}"))?;
            check_hermitian_psd(&el.state, &format!("ρ_{k}"))?;
            let t = el.state.trace();
            if (t.re - 1.0).abs() > ELEMENT_TOL || t.im.abs() > ELEMENT_TOL {
                return Err(Error::invalid(format!("ρ_{k} has trace {t}")));
            }
        }
        Ok(HolevoChannel { dims, elements })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn elements(&self) -> &[HolevoElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn povm_sum(&self) -> CMatrix {
        let d = self.dims.a;
        self.elements.iter().fold(CMatrix::zeros(d, d), |acc, el| acc + &el.povm)
    }

    /// `‖Σ_k F_k − 1‖_F`.
    pub fn povm_residual(&self) -> f64 {
        let d = self.dims.a;
        (self.povm_sum() - CMatrix::identity(d, d)).norm()
    }

    /// `λ_max(Σ_k F_k)`; at most 1 for a trace-non-increasing channel.
    pub fn povm_norm(&self) -> f64 {
        herm_eig_matrix(&self.povm_sum()).map(|e| e.max()).unwrap_or(f64::NAN)
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        let (da, db) = (self.dims.a, self.dims.b);
        if rho.shape() != (da, da) {
            return Err(Error::dims(format!("input is {:?}, channel expects {da}x{da}", rho.shape())));
        }
        let mut out = CMatrix::zeros(db, db);
        for el in &self.elements {
            let weight = (&el.povm * rho).trace();
            out += &el.state * weight;
        }
        Ok(out)
    }

    /// `Σ_k F_kᵀ ⊗ ρ_k / d_in`.
    pub fn choi(&self) -> HermitianOp {
        let n = self.dims.total();
        let mut m = CMatrix::zeros(n, n);
        for el in &self.elements {
            m += kron(&el.povm.transpose(), &el.state);
        }
        HermitianOp::from_hermitian_parts(self.dims, m * c(1.0 / self.dims.a as f64))
    }

    pub fn to_map(&self, label: &str) -> MapRep {
        MapRep::from_choi(self.choi(), label)
    }
}

pub fn holevo_from_decomposition(dec: &ProductDecomposition) -> HolevoChannel {
    let dims = dec.dims();
    let da = dims.a as f64;
    let elements = dec
        .terms()
        .iter()
        .map(|t| {
            let vbar = t.v.conjugate();
            HolevoElement {
                povm: outer(&vbar, &vbar) * c(da * t.weight),
                state: outer(&t.w, &t.w),
            }
        })
        .collect();
    HolevoChannel { dims, elements }
}

pub fn apply_holevo(ch: &HolevoChannel, rho: &CMatrix) -> Result<CMatrix> {
    ch.apply(rho)
}

/// Frobenius distance between Choi operators; a proxy for channel distance, not the
/// diamond norm.
pub fn channel_distance(a: &MapRep, b: &MapRep) -> Result<f64> {
    if a.choi().dims() != b.choi().dims() {
        return Err(Error::dims(format!("{} vs {}", a.choi().dims(), b.choi().dims())));
    }
    Ok(a.choi().frobenius_distance(b.choi()))
}

// ---------------------------------------------------------------------------
// Covariant decompositions

/// Critical SPAs with a covariant separable decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CovariantFamily {
    /// `T̃` on `C^d`: `U⊗U` orbit of `|00⟩`.
    WernerT { d: usize },
    /// Reduction SPA on `C^d`: `U⊗Ū` orbit of `|01⟩`.
    IsotropicR { d: usize },
    /// Breuer–Hall SPA on `C^4`: `S⊗S̄` orbit of `|φ⟩⊗|ψ⟩`.
    BreuerHall,
    /// `(1⊗T)~` at the CP threshold: `U_A V_B Ū_{A'} V_{B'}` orbit of `|φ⟩_{AB}|00⟩_{A'B'}`.
    IdTensorT { da: usize, db: usize },
}

/// How group elements are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Sampling {
    /// Independent Haar samples.
    Iid,
    /// Each Haar sample multiplied by every element of a finite group whose conjugation
    /// average is completely depolarizing, so the POVM sums to the identity exactly.
    #[default]
    Orbit,
}

/// Seed weights `(α₀₀, α₀₁, α₁₁)` on `|00⟩, |01⟩, |11⟩` as printed for the `1⊗T` seed.
/// They reproduce `Ẽ_{1⊗T}` at the PPT threshold `d_A d_B²/(d_A d_B² + 1)`.
pub fn printed_alpha(da: usize, db: usize) -> [f64; 3] {
    let (a, b) = (da as f64, db as f64);
    let n = a * b * b + 1.0;
    [b * (1.0 + a) / n, (b * b + a - b * (1.0 + a)) / n, 1.0 - (b * b + a) / n]
}

/// Seed weights `(β₀₀, β₁₀, β₁₁)` on `|00⟩, |10⟩, |11⟩` (first index on `A`) matching
/// `Ẽ_{1⊗T}` at the CP threshold `d_A² d_B/(d_A² d_B + 1)`. All are nonnegative iff `d_A ≥ d_B`.
pub fn id_tensor_t_seed_weights(da: usize, db: usize) -> [f64; 3] {
    let (a, b) = (da as f64, db as f64);
    let n = a * a * b + 1.0;
    [a * (1.0 + b) / n, (a - 1.0) * (a - b) / n, (b - 1.0) * (a * a - 1.0) / n]
}

/// `(⟨1⊗F⟩, ⟨P₊⊗1⟩, ⟨P₊⊗F⟩)` of `Ẽ_{1⊗T}(p)`.
pub fn id_tensor_t_expectations(da: usize, db: usize, p: f64) -> [f64; 3] {
    let (a, b) = (da as f64, db as f64);
    [p / b + (1.0 - p) * b, p / (a * a) + (1.0 - p), p / (a * a * b) + (1.0 - p) * b]
}

/// CP threshold `d_A² d_B/(d_A² d_B + 1)` of `(1⊗T)~`.
pub fn id_tensor_t_cp_threshold(da: usize, db: usize) -> f64 {
    let x = (da * da * db) as f64;
    x / (x + 1.0)
}

/// PPT threshold `d_A d_B²/(d_A d_B² + 1)` of `(1⊗T)~`.
pub fn id_tensor_t_ppt_threshold(da: usize, db: usize) -> f64 {
    let x = (da * db * db) as f64;
    x / (x + 1.0)
}

/// `Σ √w_k |a_k b_k⟩` on `C^{d_A} ⊗ C^{d_B}`.
pub fn weighted_seed(da: usize, db: usize, entries: &[((usize, usize), f64)]) -> CVector {
    let mut v = CVector::zeros(da * db);
    for &((a, b), w) in entries {
        v[a * db + b] += c(w.max(0.0).sqrt());
    }
    v
}

type LocalPair = (CMatrix, CMatrix);

impl CovariantFamily {
    fn validate(&self) -> Result<()> {
        match *self {
            CovariantFamily::WernerT { d } | CovariantFamily::IsotropicR { d } if d < 2 => {
                Err(Error::range("covariant families need d ≥ 2"))
            }
            CovariantFamily::IdTensorT { da, db } if da < 2 || db < 2 => {
                Err(Error::range("1⊗T needs d_A, d_B ≥ 2"))
            }
            CovariantFamily::IdTensorT { da, db } if da < db => Err(Error::range(format!(
                "the separable seed for 1⊗T needs d_A ≥ d_B, got ({da}, {db})"
            ))),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            CovariantFamily::WernerT { d } => format!("transpose-{d}"),
            CovariantFamily::IsotropicR { d } => format!("reduction-{d}"),
            CovariantFamily::BreuerHall => "breuer-hall-4".into(),
            CovariantFamily::IdTensorT { da, db } => format!("id-tensor-t-{da}x{db}"),
        }
    }

    /// Dimensions of the Choi operator.
    pub fn dims(&self) -> Dims {
        match *self {
            CovariantFamily::WernerT { d } | CovariantFamily::IsotropicR { d } => Dims::square(d),
            CovariantFamily::BreuerHall => Dims::square(4),
            CovariantFamily::IdTensorT { da, db } => Dims::square(da * db),
        }
    }

    /// The exact critical SPA witness.
    pub fn target_witness(&self) -> Result<HermitianOp> {
        self.validate()?;
        Ok(match *self {
            CovariantFamily::WernerT { d } => critical_p(&transposition(d))?.witness_at_p_star,
            CovariantFamily::IsotropicR { d } => critical_p(&reduction(d)?)?.witness_at_p_star,
            CovariantFamily::BreuerHall => critical_p(&breuer_hall(4, None)?)?.witness_at_p_star,
            CovariantFamily::IdTensorT { da, db } => id_tensor_t_witness(da, db, id_tensor_t_cp_threshold(da, db))?,
        })
    }

    /// Seed product vector `|v⟩ ⊗ |w⟩`.
    pub fn seed(&self) -> Result<(CVector, CVector)> {
        self.validate()?;
        Ok(match *self {
            CovariantFamily::WernerT { d } => (basis_vector(d, 0), basis_vector(d, 0)),
            CovariantFamily::IsotropicR { d } => (basis_vector(d, 0), basis_vector(d, 1)),
            CovariantFamily::BreuerHall => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                (real_vector(&[0.5, 0.5, 0.5, 0.5]), real_vector(&[h, 0.0, -h, 0.0]))
            }
            CovariantFamily::IdTensorT { da, db } => {
                let [b00, b10, b11] = id_tensor_t_seed_weights(da, db);
                let phi = weighted_seed(da, db, &[((0, 0), b00), ((1, 0), b10), ((1, 1), b11)]);
                (phi, kron_vec(&basis_vector(da, 0), &basis_vector(db, 0)))
            }
        })
    }

    fn haar_pair(&self, rng: &mut Rng) -> LocalPair {
        match *self {
            CovariantFamily::WernerT { d } => {
                let u = haar_unitary(d, rng);
                (u.clone(), u)
            }
            CovariantFamily::IsotropicR { d } => {
                let u = haar_unitary(d, rng);
                let ub = u.conjugate();
                (u, ub)
            }
            CovariantFamily::BreuerHall => {
                let s = haar_unitary_symplectic(4, rng);
                let sb = s.conjugate();
                (s, sb)
            }
            CovariantFamily::IdTensorT { da, db } => {
                let u = haar_unitary(da, rng);
                let v = haar_unitary(db, rng);
                (kron(&u, &v), kron(&u.conjugate(), &v))
            }
        }
    }

    /// Finite subgroup used by [`Sampling::Orbit`], as pairs acting on the two factors.
    pub fn finite_group(&self) -> Vec<LocalPair> {
        match *self {
            CovariantFamily::WernerT { d } => weyl_heisenberg(d).into_iter().map(|g| (g.clone(), g)).collect(),
            CovariantFamily::IsotropicR { d } => {
                weyl_heisenberg(d).into_iter().map(|g| { let gb = g.conjugate(); (g, gb) }).collect()
            }
            CovariantFamily::BreuerHall => {
                quaternion_block_group(4).into_iter().map(|s| { let sb = s.conjugate(); (s, sb) }).collect()
            }
            CovariantFamily::IdTensorT { da, db } => {
                let (ga, gb) = (weyl_heisenberg(da), weyl_heisenberg(db));
                let mut out = Vec::with_capacity(ga.len() * gb.len());
                for u in &ga {
                    for v in &gb {
                        out.push((kron(u, v), kron(&u.conjugate(), v)));
                    }
                }
                out
            }
        }
    }
}

/// Sampled product decomposition of the family's critical witness with about `n` terms
/// of equal weight. `Orbit` rounds `n` down to a multiple of the finite group order
/// (at least one orbit).
pub fn covariant_decomposition(
    family: CovariantFamily,
    n: usize,
    seed: u64,
    sampling: Sampling,
) -> Result<ProductDecomposition> {
    if n == 0 {
        return Err(Error::range("need at least one sample"));
    }
    let (v0, w0) = family.seed()?;
    let mut rng = seeded_rng(seed);
    let pairs: Vec<LocalPair> = match sampling {
        Sampling::Iid => (0..n).map(|_| family.haar_pair(&mut rng)).collect(),
        Sampling::Orbit => {
            let group = family.finite_group();
            let orbits = (n / group.len()).max(1);
            let mut out = Vec::with_capacity(orbits * group.len());
            for _ in 0..orbits {
                let (la, lb) = family.haar_pair(&mut rng);
                for (ga, gb) in &group {
                    out.push((ga * &la, gb * &lb));
                }
            }
            out
        }
    };
    let weight = 1.0 / pairs.len() as f64;
    let terms = pairs
        .iter()
        .map(|(la, lb)| ProductTerm::new(weight, la * &v0, lb * &w0))
        .collect();
    ProductDecomposition::new(family.dims(), terms)
}

pub fn discretize_covariant(family: CovariantFamily, n: usize, seed: u64, sampling: Sampling) -> Result<HolevoChannel> {
    Ok(holevo_from_decomposition(&covariant_decomposition(family, n, seed, sampling)?))
}

/// Choi distance between the discretized channel and the exact critical SPA.
pub fn discretization_error(family: CovariantFamily, n: usize, seed: u64, sampling: Sampling) -> Result<f64> {
    let ch = discretize_covariant(family, n, seed, sampling)?;
    Ok(ch.choi().frobenius_distance(&family.target_witness()?))
}
