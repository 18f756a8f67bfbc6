//! Linear maps in Choi form and the catalog of named positive maps and witnesses.
//!
//! A map `Λ: B(C^{d_in}) → B(C^{d_out})` is stored through its normalized Choi operator
//! `E_Λ = (1 ⊗ Λ)(P₊)` on `C^{d_in} ⊗ C^{d_out}`. The action is recovered with
//! `Λ(ρ) = d_in · tr_A[E (ρᵀ ⊗ 1)]`.
//!
//! Catalog normalizations (each witness has unit trace):
//! - reduction: `Λ_R(ρ) = (tr ρ · 1 − ρ)/(d − 1)`
//! - Choi map on `C³`: `Λ_C(ρ) = ½(−ρ + Σ_i ρ_ii (2|i⟩⟨i| + |i−1⟩⟨i−1|))`, indices mod 3
//! - Breuer–Hall, even `d ≥ 4`: `Λ_BH(ρ) = (tr ρ · 1 − ρ − U ρᵀ U†)/(d − 2)`

use std::fmt;

use crate::error::{Error, Result};
use crate::haar::darboux;
use crate::optimize::{optimize_product, Extremum};
use crate::tensor::{
    basis_vector, c, flip, kron, kron_vec, max_entangled_projector, outer, partial_transpose_multi,
    permute_subsystems, real_vector, CMatrix, CVector, Dims, HermitianOp, Subsystem,
};
use crate::Rng;

/// Linear map stored as its Choi operator.
#[derive(Clone, Debug, PartialEq)]
pub struct MapRep {
    d_in: usize,
    d_out: usize,
    choi: HermitianOp,
    pub label: String,
}

impl MapRep {
    /// Map whose Choi operator is `choi`; dims are read from the operator.
    pub fn from_choi(choi: HermitianOp, label: &str) -> Self {
        let dims = choi.dims();
        MapRep {
            d_in: dims.a,
            d_out: dims.b,
            choi,
            label: label.to_string(),
        }
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn choi(&self) -> &HermitianOp {
        &self.choi
    }

    pub fn into_choi(self) -> HermitianOp {
        self.choi
    }

    /// Choi operator `Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|) / d_in` of a map given by its action.
    pub fn from_action<F>(d_in: usize, d_out: usize, label: &str, action: F) -> Result<Self>
    where
        F: Fn(&CMatrix) -> CMatrix,
    {
        let dims = Dims::new(d_in, d_out);
        let mut e = CMatrix::zeros(dims.total(), dims.total());
        for i in 0..d_in {
            for j in 0..d_in {
                let unit = outer(&basis_vector(d_in, i), &basis_vector(d_in, j));
                let img = action(&unit);
                if img.nrows() != d_out || img.ncols() != d_out {
                    return Err(Error::dims("map action returned wrong output shape"));
                }
                e += kron(&unit, &img) * c(1.0 / d_in as f64);
            }
        }
        Ok(MapRep {
            d_in,
            d_out,
            choi: HermitianOp::new(dims, e)?,
            label: label.to_string(),
        })
    }

    /// `Λ(ρ) = d_in · tr_A[E(ρᵀ ⊗ 1)]`.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.d_in || rho.ncols() != self.d_in {
            return Err(Error::dims(format!(
                "input is {}x{}, map expects {}x{}",
                rho.nrows(),
                rho.ncols(),
                self.d_in,
                self.d_in
            )));
        }
        let dims = self.choi.dims();
        let e = self.choi.matrix();
        let scale = c(self.d_in as f64);
        Ok(CMatrix::from_fn(self.d_out, self.d_out, |j, l| {
            let mut acc = c(0.0);
            for i in 0..self.d_in {
                for k in 0..self.d_in {
                    acc += e[(dims.index(i, j), dims.index(k, l))] * rho[(i, k)];
                }
            }
            acc * scale
        }))
    }

    /// `(1 ⊗ Λ)(ρ)` for `ρ` on `C^{d_A} ⊗ C^{d_in}`, block by block.
    pub fn apply_on_b(&self, rho: &HermitianOp) -> Result<HermitianOp> {
        let dims = rho.dims();
        if dims.b != self.d_in {
            return Err(Error::dims(format!("state {dims} vs map input {}", self.d_in)));
        }
        let out_dims = Dims::new(dims.a, self.d_out);
        let m = rho.matrix();
        let mut out = CMatrix::zeros(out_dims.total(), out_dims.total());
        for i in 0..dims.a {
            for k in 0..dims.a {
                let block = CMatrix::from_fn(dims.b, dims.b, |j, l| m[(dims.index(i, j), dims.index(k, l))]);
                let img = self.apply(&block)?;
                for j in 0..self.d_out {
                    for l in 0..self.d_out {
                        out[(out_dims.index(i, j), out_dims.index(k, l))] = img[(j, l)];
                    }
                }
            }
        }
        HermitianOp::new(out_dims, out)
    }
}

impl fmt::Display for MapRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} → {})", self.label, self.d_in, self.d_out)
    }
}

/// Map `Λ_E` associated with a witness `E`.
pub fn witness_to_map(e: &HermitianOp) -> MapRep {
    MapRep::from_choi(e.clone(), "witness")
}

/// `(1 ⊗ Λ)(P₊)`, evaluated by pushing the units `|i⟩⟨j|` through the map's action.
pub fn map_to_witness(map: &MapRep) -> HermitianOp {
    MapRep::from_action(map.d_in, map.d_out, &map.label, |x| {
        map.apply(x).expect("unit matrix has the input shape")
    })
    .expect("action of a Hermitian-preserving map")
    .choi
}

pub fn apply_map(map: &MapRep, rho: &CMatrix) -> Result<CMatrix> {
    map.apply(rho)
}

// ---------------------------------------------------------------------------
// Catalog

pub fn identity_map(d: usize) -> MapRep {
    MapRep::from_action(d, d, "identity", |x| x.clone()).expect("identity map")
}

pub fn transposition_map(d: usize) -> MapRep {
    MapRep::from_action(d, d, "transpose", |x| x.transpose()).expect("transposition map")
}

/// Witness of the transposition, `F/d`.
pub fn transposition(d: usize) -> HermitianOp {
    flip(d).scale(1.0 / d as f64)
}

pub fn reduction_map(d: usize) -> Result<MapRep> {
    if d < 2 {
        return Err(Error::range("reduction map needs d ≥ 2"));
    }
    let s = 1.0 / (d as f64 - 1.0);
    MapRep::from_action(d, d, "reduction", |x| {
        (CMatrix::identity(d, d) * x.trace() - x) * c(s)
    })
}

pub fn reduction(d: usize) -> Result<HermitianOp> {
    Ok(reduction_map(d)?.choi)
}

pub fn choi3_map() -> MapRep {
    MapRep::from_action(3, 3, "choi", |x| {
        let mut out = -x.clone();
        for i in 0..3 {
            let prev = (i + 2) % 3;
            out[(i, i)] += x[(i, i)] * c(2.0);
            out[(prev, prev)] += x[(i, i)];
        }
        out * c(0.5)
    })
    .expect("Choi map")
}

pub fn choi3() -> HermitianOp {
    choi3_map().choi
}

fn check_skew_unitary(u: &CMatrix, d: usize) -> Result<()> {
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::dims("skew-symmetric unitary has wrong shape"));
    }
    if (u.adjoint() * u - CMatrix::identity(d, d)).norm() > 1e-10 {
        return Err(Error::invalid("U is not unitary"));
    }
    if (u.transpose() + u).norm() > 1e-10 {
        return Err(Error::invalid("U is not skew-symmetric"));
    }
    Ok(())
}

/// Breuer–Hall map with skew-symmetric unitary `U` (Darboux `J` when `None`).
pub fn breuer_hall_map(d: usize, u: Option<&CMatrix>) -> Result<MapRep> {
    if d < 4 || d % 2 != 0 {
        return Err(Error::range(format!("Breuer–Hall map needs even d ≥ 4, got {d}")));
    }
    let u = match u {
        Some(u) => {
            check_skew_unitary(u, d)?;
            u.clone()
        }
        None => darboux(d),
    };
    let s = 1.0 / (d as f64 - 2.0);
    let ud = u.adjoint();
    MapRep::from_action(d, d, "breuer-hall", |x| {
        (CMatrix::identity(d, d) * x.trace() - x - &u * x.transpose() * &ud) * c(s)
    })
}

pub fn breuer_hall(d: usize, u: Option<&CMatrix>) -> Result<HermitianOp> {
    Ok(breuer_hall_map(d, u)?.choi)
}

/// `Q^Γ`, the optimal decomposable witness generated by `Q ≥ 0`.
pub fn decomposable_from_q(q: &HermitianOp) -> HermitianOp {
    q.partial_transpose(Subsystem::B)
}

/// `Ẽ_{1⊗T}(p) = p/(d_A d_B)² · 1 + (1−p)/d_B · P₊^{AA'} ⊗ F^{BB'}` on `(AB) ⊗ (A'B')`.
///
/// Computed as the partial transpose on `B'` of the maximally entangled projector between
/// `AB` and `A'B'`, mixed with white noise. The returned operator has dims
/// `(d_A d_B, d_A d_B)` with factor order `A, B, A', B'`.
pub fn id_tensor_t_witness(da: usize, db: usize, p: f64) -> Result<HermitianOp> {
    if da == 0 || db == 0 {
        return Err(Error::range("dimensions must be positive"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::range(format!("p = {p} outside [0, 1]")));
    }
    let d = da * db;
    let pplus = max_entangled_projector(d);
    let e = partial_transpose_multi(pplus.matrix(), &[da, db, da, db], &[false, false, false, true])?;
    let mixed = e * c(1.0 - p) + CMatrix::identity(d * d, d * d) * c(p / (d * d) as f64);
    HermitianOp::new(Dims::square(d), mixed)
}

/// Embeds `X_{AA'} ⊗ Y_{BB'}` into the `A, B, A', B'` factor order.
pub fn arrange_aa_bb(x_aa: &CMatrix, y_bb: &CMatrix, da: usize, db: usize) -> Result<HermitianOp> {
    let m = kron(x_aa, y_bb); // order A, A', B, B'
    let arranged = permute_subsystems(&m, &[da, da, db, db], &[0, 2, 1, 3])?;
    HermitianOp::new(Dims::square(da * db), arranged)
}

// ---------------------------------------------------------------------------
// Unextendible product bases

/// Orthogonal product vectors `x_i ⊗ y_i`, stored by their factors.
#[derive(Clone, Debug)]
pub struct UpbSpec {
    dims: Dims,
    factors: Vec<(CVector, CVector)>,
    pub name: String,
}

impl UpbSpec {
    pub fn new(dims: Dims, factors: Vec<(CVector, CVector)>, name: &str) -> Result<Self> {
        let n = factors.len();
        if n == 0 || n >= dims.total() {
            return Err(Error::range(format!(
                "a UPB needs 0 < n < d_A d_B = {}, got {n}",
                dims.total()
            )));
        }
        for (x, y) in &factors {
            if x.len() != dims.a || y.len() != dims.b {
                return Err(Error::dims("UPB factor length does not match dims"));
            }
            if (x.norm() - 1.0).abs() > 1e-10 || (y.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::invalid("UPB factors must be unit vectors"));
            }
        }
        let spec = UpbSpec {
            dims,
            factors,
            name: name.to_string(),
        };
        let vs = spec.vectors();
        for i in 0..n {
            for j in 0..i {
                if vs[i].dotc(&vs[j]).norm() > 1e-10 {
                    return Err(Error::invalid(format!("UPB vectors {j} and {i} are not orthogonal")));
                }
            }
        }
        Ok(spec)
    }

    /// Tiles UPB in `3⊗3`.
    pub fn tiles() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e = |i: usize| basis_vector(3, i);
        let factors = vec![
            (e(0), real_vector(&[s, -s, 0.0])),
            (real_vector(&[s, -s, 0.0]), e(2)),
            (e(2), real_vector(&[0.0, s, -s])),
            (real_vector(&[0.0, s, -s]), e(0)),
            (real_vector(&[1.0 / 3f64.sqrt(); 3]), real_vector(&[1.0 / 3f64.sqrt(); 3])),
        ];
        UpbSpec::new(Dims::square(3), factors, "tiles").expect("Tiles UPB")
    }

    /// Pyramid UPB in `3⊗3`: `v_j ⊗ v_{2j mod 5}` with apex vectors `v_j`.
    pub fn pyramid() -> Self {
        let h = (5f64.sqrt() + 1.0).sqrt() / 2.0;
        let norm = 2.0 / (5.0 + 5f64.sqrt()).sqrt();
        let v = |j: usize| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / 5.0;
            real_vector(&[norm * t.cos(), norm * t.sin(), norm * h])
        };
        let factors = (0..5).map(|j| (v(j), v((2 * j) % 5))).collect();
        UpbSpec::new(Dims::square(3), factors, "pyramid").expect("Pyramid UPB")
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(CVector, CVector)] {
        &self.factors
    }

    pub fn vectors(&self) -> Vec<CVector> {
        self.factors.iter().map(|(x, y)| kron_vec(x, y)).collect()
    }

    /// `Σ_i |v_i⟩⟨v_i|`.
    pub fn projector(&self) -> HermitianOp {
        let mut m = CMatrix::zeros(self.dims.total(), self.dims.total());
        for v in self.vectors() {
            m += outer(&v, &v);
        }
        HermitianOp::new(self.dims, m).expect("sum of projectors is Hermitian")
    }

    /// Estimate of `min_{e,f} Σ_i |⟨v_i|e⊗f⟩|²` by multistart alternating minimization.
    /// Heuristic: the true minimum is never larger than the returned value.
    pub fn min_product_overlap(&self, restarts: usize, rng: &mut Rng) -> f64 {
        let p = self.projector();
        optimize_product(p.matrix(), self.dims, Extremum::Min, restarts, 50, rng).value
    }

    /// Heuristic unextendibility check: no product vector orthogonal to the set was
    /// found by the multistart search.
    pub fn appears_unextendible(&self, rng: &mut Rng) -> bool {
        self.min_product_overlap(64, rng) > 1e-8
    }

    /// Default `ε` for [`upb_witness`]: 0.9 × the estimated minimal product overlap.
    pub fn default_epsilon(&self, rng: &mut Rng) -> f64 {
        0.9 * self.min_product_overlap(64, rng)
    }
}

/// `E_{v} = (Σ_i |v_i⟩⟨v_i| − ε·1)/(n − ε d_A d_B)`, with `0 < ε < n/(d_A d_B)`.
pub fn upb_witness(upb: &UpbSpec, eps: f64) -> Result<HermitianOp> {
    let n = upb.len() as f64;
    let dd = upb.dims.total() as f64;
    if !(eps > 0.0 && eps < n / dd) {
        return Err(Error::range(format!("ε = {eps} outside (0, {})", n / dd)));
    }
    let id = HermitianOp::identity(upb.dims);
    Ok((&upb.projector() - &id.scale(eps)).scale(1.0 / (n - eps * dd)))
}

/// `ρ_{v} = (1 − Σ_i |v_i⟩⟨v_i|)/(d_A d_B − n)`.
pub fn upb_state(upb: &UpbSpec) -> HermitianOp {
    let n = upb.len() as f64;
    let dd = upb.dims.total() as f64;
    let id = HermitianOp::identity(upb.dims);
    (&id - &upb.projector()).scale(1.0 / (dd - n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;
    use crate::tensor::{min_eigenvalue, HermitianOp};

    #[test]
    fn local_application_of_transposition_is_partial_transpose() {
        let mut rng = seeded_rng(11);
        let rho = crate::haar::random_density_matrix(6, 3, &mut rng);
        let rho = HermitianOp::new(Dims::new(2, 3), rho).unwrap();
        let lhs = transposition_map(3).apply_on_b(&rho).unwrap();
        assert!(lhs.frobenius_distance(&rho.partial_transpose(Subsystem::B)) < 1e-13);
    }

    #[test]
    fn transposition_witness_from_action_is_flip_over_d() {
        for d in 2..5 {
            let w = transposition_map(d).into_choi();
            assert!(w.frobenius_distance(&transposition(d)) < 1e-14);
        }
    }

    #[test]
    fn identity_map_witness_is_max_entangled() {
        let w = identity_map(2).into_choi();
        assert!(w.frobenius_distance(&max_entangled_projector(2)) < 1e-15);
    }

    #[test]
    fn reduction_witness_closed_form_d3() {
        // (1/(d−1)) (1/d · 1 − P₊) with d = 3
        let d = 3;
        let expected = (&HermitianOp::identity(Dims::square(d)).scale(1.0 / d as f64)
            - &max_entangled_projector(d))
            .scale(1.0 / (d as f64 - 1.0));
        assert!(reduction(d).unwrap().frobenius_distance(&expected) < 1e-14);
        assert!((expected.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn choi_witness_matches_closed_form() {
        // (1/6)(Σ_i [2|ii⟩⟨ii| + |i,i−1⟩⟨i,i−1|] − 3P₊)
        let dims = Dims::square(3);
        let mut m = max_entangled_projector(3).matrix() * c(-3.0);
        for i in 0..3 {
            m[(dims.index(i, i), dims.index(i, i))] += c(2.0);
            let k = dims.index(i, (i + 2) % 3);
            m[(k, k)] += c(1.0);
        }
        let expected = HermitianOp::new(dims, m * c(1.0 / 6.0)).unwrap();
        assert!(choi3().frobenius_distance(&expected) < 1e-14);
        assert!((min_eigenvalue(&choi3()) + 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn choi_map_on_ground_state() {
        let rho = outer(&basis_vector(3, 0), &basis_vector(3, 0));
        let out = choi3_map().apply(&rho).unwrap();
        let mut expected = CMatrix::zeros(3, 3);
        expected[(0, 0)] = c(0.5);
        expected[(2, 2)] = c(0.5);
        assert!((out - expected).norm() < 1e-14);
    }

    #[test]
    fn unital_checks_on_maximally_mixed_input() {
        for d in [3, 4] {
            let rho = CMatrix::identity(d, d) * c(1.0 / d as f64);
            let out = reduction_map(d).unwrap().apply(&rho).unwrap();
            assert!((out - &rho).norm() < 1e-14);
        }
        for d in [4, 6] {
            let rho = CMatrix::identity(d, d) * c(1.0 / d as f64);
            let out = breuer_hall_map(d, None).unwrap().apply(&rho).unwrap();
            assert!((out - &rho).norm() < 1e-14);
        }
    }

    #[test]
    fn breuer_hall_witness_matches_closed_form() {
        // (1/(d−2)) [1/d · 1 − P₊ − (1/d)(1⊗J)F(1⊗J†)]
        for d in [4, 6] {
            let j = darboux(d);
            let lj = kron(&CMatrix::identity(d, d), &j);
            let fj = &lj * flip(d).matrix() * lj.adjoint();
            let m = (CMatrix::identity(d * d, d * d) * c(1.0 / d as f64)
                - max_entangled_projector(d).matrix()
                - fj * c(1.0 / d as f64))
                * c(1.0 / (d as f64 - 2.0));
            let expected = HermitianOp::new(Dims::square(d), m).unwrap();
            assert!(breuer_hall(d, None).unwrap().frobenius_distance(&expected) < 1e-13);
        }
    }

    #[test]
    fn breuer_hall_rejects_bad_inputs() {
        assert!(matches!(breuer_hall(5, None), Err(Error::OutOfRange(_))));
        assert!(matches!(breuer_hall(2, None), Err(Error::OutOfRange(_))));
        let sym = CMatrix::identity(4, 4);
        assert!(matches!(breuer_hall(4, Some(&sym)), Err(Error::InvalidInput(_))));
        let j = darboux(4) * c(2.0);
        assert!(breuer_hall(4, Some(&j)).is_err());
    }

    #[test]
    fn upb_constructions() {
        for upb in [UpbSpec::tiles(), UpbSpec::pyramid()] {
            assert_eq!(upb.len(), 5);
            let rho = upb_state(&upb);
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            assert!(min_eigenvalue(&rho.partial_transpose(Subsystem::B)) > -1e-10);
            let w = upb_witness(&upb, 1e-3).unwrap();
            assert!(w.expectation(&rho) < 0.0);
            assert!((w.trace() - 1.0).abs() < 1e-12);
            let mut rng = seeded_rng(11);
            assert!(upb.appears_unextendible(&mut rng));
        }
        assert!(upb_witness(&UpbSpec::tiles(), 0.0).is_err());
        assert!(upb_witness(&UpbSpec::tiles(), 5.0 / 9.0).is_err());
    }

    #[test]
    fn extendible_set_is_flagged() {
        let e = |i| basis_vector(3, i);
        let upb = UpbSpec::new(Dims::square(3), vec![(e(0), e(0)), (e(1), e(1))], "partial").unwrap();
        let mut rng = seeded_rng(5);
        assert!(!upb.appears_unextendible(&mut rng));
        assert!(UpbSpec::new(Dims::square(3), vec![(e(0), e(0)), (e(0), e(0))], "dup").is_err());
    }

    #[test]
    fn id_tensor_t_at_zero_noise() {
        let w = id_tensor_t_witness(2, 2, 0.0).unwrap();
        let expected = arrange_aa_bb(max_entangled_projector(2).matrix(), &(flip(2).matrix() * c(0.5)), 2, 2).unwrap();
        assert!(w.frobenius_distance(&expected) < 1e-14);
        assert!((w.trace() - 1.0).abs() < 1e-14);
    }
}
