//! Structural physical approximations: `Ẽ(p) = p/D · 1 + (1 − p) E`, `D = d_A d_B`.

use crate::error::{Error, Result};
use crate::maps::MapRep;
use crate::separability::{ProductDecomposition, ProductTerm};
use crate::tensor::{c, herm_eig, herm_eig_matrix, min_eigenvalue, CMatrix, HermitianOp};

/// Tolerance on the minimal eigenvalue when deciding positivity.
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Allowed gap between the closed-form and bisection critical probabilities.
pub const BISECTION_AGREEMENT: f64 = 1e-8;
const BISECTION_STEPS: usize = 50;

#[derive(Clone, Debug)]
pub struct SpaResult {
    pub p_star: f64,
    pub lambda_min: f64,
    pub witness_at_p_star: HermitianOp,
    /// Minimal eigenvalue of `witness_at_p_star`.
    pub cp_certificate: f64,
    pub p_bisection: f64,
    /// `E` was already positive, so no noise is needed.
    pub already_cp: bool,
}

/// `p/D · 1 + (1 − p) E` without any normalization check on `E`.
pub fn mix_white_noise(e: &HermitianOp, p: f64) -> Result<HermitianOp> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::range(format!("p = {p} outside [0, 1]")));
    }
    let d = e.dims().total() as f64;
    let id = HermitianOp::identity(e.dims());
    Ok(&id.scale(p / d) + &e.scale(1.0 - p))
}

/// SPA of a unit-trace witness.
pub fn spa_witness(e: &HermitianOp, p: f64) -> Result<HermitianOp> {
    let t = e.trace();
    if (t - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("witness trace is {t}, expected 1")));
    }
    mix_white_noise(e, p)
}

/// `D|λ|/(1 + D|λ|)` for `λ < 0`, else 0.
pub fn closed_form_p(lambda_min: f64, total_dim: usize) -> f64 {
    if lambda_min >= 0.0 {
        return 0.0;
    }
    let x = total_dim as f64 * lambda_min.abs();
    x / (1.0 + x)
}

fn bisect_p(e: &HermitianOp) -> Result<f64> {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    if min_eigenvalue(e) >= 0.0 {
        return Ok(0.0);
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if min_eigenvalue(&mix_white_noise(e, mid)?) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `p` with `Ẽ(p) ≥ 0`, from the closed form and an independent bisection.
pub fn critical_p(e: &HermitianOp) -> Result<SpaResult> {
    let lambda_min = herm_eig(e).min();
    let p_star = closed_form_p(lambda_min, e.dims().total());
    let p_bisection = bisect_p(e)?;
    if (p_star - p_bisection).abs() > BISECTION_AGREEMENT {
        return Err(Error::Numerical(format!(
            "closed form p* = {p_star} disagrees with bisection {p_bisection}"
        )));
    }
    let witness_at_p_star = mix_white_noise(e, p_star)?;
    let cp_certificate = min_eigenvalue(&witness_at_p_star);
    Ok(SpaResult {
        p_star,
        lambda_min,
        witness_at_p_star,
        cp_certificate,
        p_bisection,
        already_cp: lambda_min >= 0.0,
    })
}

pub fn is_positive(x: &HermitianOp) -> bool {
    min_eigenvalue(x) >= -POSITIVITY_TOL
}

pub fn is_completely_positive(map: &MapRep) -> bool {
    is_positive(map.choi())
}

/// `Λ̃_p` as a map.
pub fn spa_map(map: &MapRep, p: f64) -> Result<MapRep> {
    let choi = mix_white_noise(map.choi(), p)?;
    Ok(MapRep::from_choi(choi, &format!("spa({})", map.label)))
}

/// `max_ρ tr Λ(ρ) = d_in · λ_max(tr_B E)`.
pub fn contractive_norm(map: &MapRep) -> f64 {
    let ra = map.choi().partial_trace(crate::tensor::Subsystem::B);
    let eig = herm_eig_matrix(&ra).expect("partial trace of a Hermitian operator");
    map.d_in() as f64 * eig.max()
}

pub fn is_trace_preserving(map: &MapRep) -> bool {
    let ra = map.choi().partial_trace(crate::tensor::Subsystem::B);
    let target = CMatrix::identity(map.d_in(), map.d_in()) * c(1.0 / map.d_in() as f64);
    (ra - target).norm() < 1e-10
}

/// `Λ'(ρ) = Λ(ρ) + [tr ρ − tr Λ(ρ)] · 1/d_out`.
pub fn trace_preserving_extension(map: &MapRep) -> Result<MapRep> {
    let norm = contractive_norm(map);
    if norm > 1.0 + POSITIVITY_TOL {
        return Err(Error::invalid(format!(
            "map is not contractive (max output trace {norm})"
        )));
    }
    let d_out = map.d_out();
    MapRep::from_action(map.d_in(), d_out, &format!("tp({})", map.label), |rho| {
        let out = map.apply(rho).expect("input has the map's shape");
        let deficit = rho.trace() - out.trace();
        out + CMatrix::identity(d_out, d_out) * (deficit / c(d_out as f64))
    })
}

/// Product decomposition of the extension's Choi operator: the original terms plus
/// `(1/d_A − tr_B E) ⊗ 1/d_out` split along the eigenvectors of the first factor.
pub fn extend_decomposition(map: &MapRep, dec: &ProductDecomposition) -> Result<ProductDecomposition> {
    if dec.dims() != map.choi().dims() {
        return Err(Error::dims("decomposition dims differ from the map's Choi dims"));
    }
    let (d_in, d_out) = (map.d_in(), map.d_out());
    let ra = map.choi().partial_trace(crate::tensor::Subsystem::B);
    let gap = CMatrix::identity(d_in, d_in) * c(1.0 / d_in as f64) - ra;
    let eig = herm_eig_matrix(&gap)?;
    if eig.min() < -POSITIVITY_TOL {
        return Err(Error::invalid("map is not contractive"));
    }
    let mut out = dec.clone();
    for (k, &g) in eig.eigenvalues.iter().enumerate() {
        if g <= 1e-14 {
            continue;
        }
        for j in 0..d_out {
            out.push(ProductTerm::new(
                g / d_out as f64,
                eig.vector(k),
                crate::tensor::basis_vector(d_out, j),
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{breuer_hall, choi3, identity_map, reduction_map, transposition, transposition_map};
    use crate::tensor::{flip, Dims};

    #[test]
    fn endpoints() {
        let e = transposition(3);
        let id = HermitianOp::identity(Dims::square(3)).scale(1.0 / 9.0);
        assert!(spa_witness(&e, 1.0).unwrap().frobenius_distance(&id) < 1e-15);
        assert!(spa_witness(&e, 0.0).unwrap().frobenius_distance(&e) < 1e-15);
        assert!(matches!(spa_witness(&e, 1.5), Err(Error::OutOfRange(_))));
        assert!(spa_witness(&flip(3), 0.5).is_err());
    }

    #[test]
    fn werner_spectrum_at_two_thirds() {
        let w = spa_witness(&transposition(2), 2.0 / 3.0).unwrap();
        // p/4 ∓ (1−p)/2 on the antisymmetric / symmetric subspaces
        let ev = herm_eig(&w).eigenvalues;
        assert!(ev[0].abs() < 1e-12);
        for x in &ev[1..] {
            assert!((x - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_probabilities() {
        let r = critical_p(&transposition(3)).unwrap();
        assert!((r.p_star - 0.75).abs() < 1e-12);
        assert!((r.p_bisection - 0.75).abs() < 1e-9);
        assert!(r.cp_certificate > -1e-12);
        assert!((critical_p(&choi3()).unwrap().p_star - 0.6).abs() < 1e-12);
        assert!((critical_p(&breuer_hall(4, None).unwrap()).unwrap().p_star - 0.8).abs() < 1e-12);
    }

    #[test]
    fn positive_input_needs_no_noise() {
        let r = critical_p(&HermitianOp::identity(Dims::square(2)).scale(0.25)).unwrap();
        assert!(r.already_cp);
        assert_eq!(r.p_star, 0.0);
    }

    #[test]
    fn complete_positivity() {
        assert!(is_completely_positive(&identity_map(3)));
        assert!(!is_completely_positive(&transposition_map(2)));
        let r = reduction_map(3).unwrap();
        assert!(is_completely_positive(&spa_map(&r, 0.75).unwrap()));
        assert!(!is_completely_positive(&spa_map(&r, 0.74).unwrap()));
    }

    #[test]
    fn trace_preserving_input_is_its_own_extension() {
        let m = identity_map(3);
        assert!((contractive_norm(&m) - 1.0).abs() < 1e-12);
        let ext = trace_preserving_extension(&m).unwrap();
        assert!(ext.choi().frobenius_distance(m.choi()) < 1e-14);
    }

    #[test]
    fn extension_closed_form() {
        // Choi of Λ' is E + (1/d_A − tr_B E) ⊗ 1/d_out
        let e = choi3().scale(0.5);
        let half = MapRep::from_choi(mix_white_noise(&e, 0.6).unwrap(), "half");
        let ext = trace_preserving_extension(&half).unwrap();
        assert!(is_trace_preserving(&ext));
        let ra = half.choi().partial_trace(crate::tensor::Subsystem::B);
        let gap = CMatrix::identity(3, 3) * c(1.0 / 3.0) - ra;
        let add = crate::tensor::kron(&gap, &(CMatrix::identity(3, 3) * c(1.0 / 3.0)));
        let expected = half.choi().matrix() + add;
        assert!((ext.choi().matrix() - expected).norm() < 1e-13);
    }

    #[test]
    fn non_contractive_map_has_no_extension() {
        let m = MapRep::from_choi(HermitianOp::identity(Dims::square(2)).scale(0.5), "big");
        assert!(contractive_norm(&m) > 1.0);
        assert!(trace_preserving_extension(&m).is_err());
    }
}
