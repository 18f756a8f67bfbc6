//! Symmetry-invariant families: Werner (`U⊗U`), isotropic (`U⊗Ū`), `UŪVV` on
//! `(AB)⊗(A'B')`, and the unitary-symplectic families invariant under `S⊗S` or `S⊗S̄`.
//!
//! For the symplectic families `A^J ≡ (1⊗J) A (1⊗J†)` with the Darboux form `J`.
//! `S⊗S`-invariant operators span `{1, F, P₊ᴶ}` with minimal projectors
//! `Π₀ = P₊ᴶ`, `Π₁ = (1 − F)/2 − P₊ᴶ`, `Π₂ = (1 + F)/2`, and `S⊗S̄`-invariant operators span
//! `{1, P₊, Fᴶ}` with `Π̂_α = Π_αᴶ`.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::haar::{darboux, haar_unitary, haar_unitary_symplectic};
use crate::maps::{arrange_aa_bb, breuer_hall_map, MapRep};
use crate::separability::is_ppt;
use crate::tensor::{
    c, flip, kron, max_entangled_projector, min_eigenvalue, CMatrix, CVector, Dims, HermitianOp, Subsystem,
};
use crate::{seeded_rng, Rng};

/// Orientation tolerance for the planar hull tests.
pub const HULL_TOL: f64 = 1e-12;
/// Eigenvalue tolerance for the matrix-level region checks.
pub const MATRIX_TOL: f64 = 1e-9;

/// Darboux form `J = ⊕ [[0, 1], [−1, 0]]`.
pub fn symplectic_j(d: usize) -> Result<CMatrix> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::range(format!("symplectic form needs even d ≥ 2, got {d}")));
    }
    Ok(darboux(d))
}

fn check_symplectic_dim(d: usize) -> Result<()> {
    if d < 4 || d % 2 != 0 {
        return Err(Error::range(format!("symplectic families need even d ≥ 4, got {d}")));
    }
    Ok(())
}

/// `A^J = (1⊗J) A (1⊗J†)`.
pub fn j_rotate(a: &HermitianOp) -> Result<HermitianOp> {
    let dims = a.dims();
    let j = symplectic_j(dims.b)?;
    a.local_congruence(&CMatrix::identity(dims.a, dims.a), &j)
}

/// Operator bases and minimal projectors of both symplectic algebras.
#[derive(Clone, Debug)]
pub struct InvariantBasis {
    pub d: usize,
    pub identity: HermitianOp,
    pub flip: HermitianOp,
    pub pplus_j: HermitianOp,
    pub pplus: HermitianOp,
    pub flip_j: HermitianOp,
    pub pi: [HermitianOp; 3],
    pub pi_hat: [HermitianOp; 3],
}

pub fn invariant_basis(d: usize) -> Result<InvariantBasis> {
    check_symplectic_dim(d)?;
    let dims = Dims::square(d);
    let identity = HermitianOp::identity(dims);
    let f = flip(d);
    let pplus = max_entangled_projector(d);
    let pplus_j = j_rotate(&pplus)?;
    let flip_j = j_rotate(&f)?;
    let sym = (&identity + &f).scale(0.5);
    let anti = (&identity - &f).scale(0.5);
    let pi = [pplus_j.clone(), &anti - &pplus_j, sym];
    let pi_hat = [j_rotate(&pi[0])?, j_rotate(&pi[1])?, j_rotate(&pi[2])?];
    Ok(InvariantBasis {
        d,
        identity,
        flip: f,
        pplus_j,
        pplus,
        flip_j,
        pi,
        pi_hat,
    })
}

impl InvariantBasis {
    /// `{1, F, P₊ᴶ}`.
    pub fn ss_span(&self) -> [HermitianOp; 3] {
        [self.identity.clone(), self.flip.clone(), self.pplus_j.clone()]
    }

    /// `{1, P₊, Fᴶ}`.
    pub fn ss_bar_span(&self) -> [HermitianOp; 3] {
        [self.identity.clone(), self.pplus.clone(), self.flip_j.clone()]
    }

    /// Largest Frobenius residual among `Π_α Π_β − δ_{αβ} Π_β`, `Σ Π_α − 1` (both families),
    /// `F P₊ᴶ + P₊ᴶ`, `P₊ᴶ F + P₊ᴶ`, `P₊ Fᴶ + P₊`, `Fᴶ P₊ + P₊`.
    pub fn algebra_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for set in [&self.pi, &self.pi_hat] {
            let mut sum = CMatrix::zeros(self.d * self.d, self.d * self.d);
            for (a, pa) in set.iter().enumerate() {
                sum += pa.matrix();
                for (b, pb) in set.iter().enumerate() {
                    let prod = pa.matrix() * pb.matrix();
                    let expect = if a == b { pb.matrix().clone() } else { CMatrix::zeros(prod.nrows(), prod.ncols()) };
                    worst = worst.max((prod - expect).norm());
                }
            }
            worst = worst.max((sum - self.identity.matrix()).norm());
        }
        let (f, pj, p, fj) = (self.flip.matrix(), self.pplus_j.matrix(), self.pplus.matrix(), self.flip_j.matrix());
        for r in [f * pj + pj, pj * f + pj, p * fj + p, fj * p + p] {
            worst = worst.max(r.norm());
        }
        worst
    }

    /// Largest `‖[Π_α, Π̂_β]‖`.
    pub fn commutator_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.pi {
            for b in &self.pi_hat {
                let (x, y) = (a.matrix(), b.matrix());
                worst = worst.max((x * y - y * x).norm());
            }
        }
        worst
    }
}

/// Unit-trace element of `span(basis)` with `tr(X basis_i) = targets_i`; `basis[0]` is
/// the identity and `targets[0]` its trace.
pub fn solve_in_span(basis: &[HermitianOp], targets: &[f64]) -> Result<HermitianOp> {
    if basis.is_empty() || basis.len() != targets.len() {
        return Err(Error::dims("basis and target lengths differ"));
    }
    let n = basis.len();
    let dims = basis[0].dims();
    let gram = DMatrix::from_fn(n, n, |i, j| basis[i].expectation(&basis[j]));
    let rhs = DVector::from_column_slice(targets);
    let x = gram
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("Gram matrix of the invariant basis is singular".into()))?;
    let mut out = HermitianOp::zeros(dims);
    for (k, b) in basis.iter().enumerate() {
        out = &out + &b.scale(x[k]);
    }
    Ok(out)
}

/// Rank of the Gram matrix of a list of operators.
pub fn gram_rank(ops: &[HermitianOp]) -> usize {
    let n = ops.len();
    let gram = DMatrix::from_fn(n, n, |i, j| ops[i].expectation(&ops[j]));
    gram.rank(1e-10)
}

// ---------------------------------------------------------------------------
// Werner, isotropic, UŪVV

/// Werner state with `⟨F⟩ = f ∈ [−1, 1]`.
pub fn werner(d: usize, f: f64) -> Result<HermitianOp> {
    if d < 2 {
        return Err(Error::range("Werner states need d ≥ 2"));
    }
    if !(-1.0..=1.0).contains(&f) {
        return Err(Error::range(format!("⟨F⟩ = {f} outside [−1, 1]")));
    }
    let id = HermitianOp::identity(Dims::square(d));
    solve_in_span(&[id, flip(d)], &[1.0, f])
}

/// Isotropic state with `⟨P₊⟩ = q ∈ [0, 1]`.
pub fn isotropic(d: usize, q: f64) -> Result<HermitianOp> {
    if d < 2 {
        return Err(Error::range("isotropic states need d ≥ 2"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::range(format!("⟨P₊⟩ = {q} outside [0, 1]")));
    }
    let id = HermitianOp::identity(Dims::square(d));
    solve_in_span(&[id, max_entangled_projector(d)], &[1.0, q])
}

/// `{1⊗1, 1⊗F, P₊⊗1, P₊⊗F}` on `(AB)⊗(A'B')`, factor order `A, B, A', B'`.
pub fn uuvv_basis(da: usize, db: usize) -> Result<[HermitianOp; 4]> {
    let (ia, ib) = (CMatrix::identity(da * da, da * da), CMatrix::identity(db * db, db * db));
    let (pa, fb) = (max_entangled_projector(da).into_matrix(), flip(db).into_matrix());
    Ok([
        arrange_aa_bb(&ia, &ib, da, db)?,
        arrange_aa_bb(&ia, &fb, da, db)?,
        arrange_aa_bb(&pa, &ib, da, db)?,
        arrange_aa_bb(&pa, &fb, da, db)?,
    ])
}

/// `UŪVV`-invariant state with `(⟨1⊗F⟩, ⟨P₊⊗1⟩, ⟨P₊⊗F⟩) = (t1, t2, t3)`.
pub fn uuvv_state(da: usize, db: usize, t1: f64, t2: f64, t3: f64) -> Result<HermitianOp> {
    if da == 0 || db == 0 {
        return Err(Error::range("dimensions must be positive"));
    }
    let rho = solve_in_span(&uuvv_basis(da, db)?, &[1.0, t1, t2, t3])?;
    let lam = min_eigenvalue(&rho);
    if lam < -MATRIX_TOL {
        return Err(Error::range(format!(
            "expectations ({t1}, {t2}, {t3}) give no state (min eigenvalue {lam:e})"
        )));
    }
    Ok(rho)
}

/// `(⟨1⊗F⟩, ⟨P₊⊗1⟩, ⟨P₊⊗F⟩)` of an operator on `(AB)⊗(A'B')`.
pub fn uuvv_expectations(x: &HermitianOp, da: usize, db: usize) -> Result<[f64; 3]> {
    if x.dims() != Dims::square(da * db) {
        return Err(Error::dims(format!("operator {} is not on ({da}·{db})⊗({da}·{db})", x.dims())));
    }
    let b = uuvv_basis(da, db)?;
    Ok([x.expectation(&b[1]), x.expectation(&b[2]), x.expectation(&b[3])])
}

// ---------------------------------------------------------------------------
// Twirls

/// Groups whose twirls are provided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwirlGroup {
    /// `U ⊗ U`.
    UU,
    /// `U ⊗ Ū`.
    UUbar,
    /// `S ⊗ S`, `S` unitary symplectic.
    SS,
    /// `S ⊗ S̄`.
    SSbar,
    /// `U_A V_B Ū_{A'} V_{B'}` on `(AB)⊗(A'B')`.
    UUbarVV { da: usize, db: usize },
}

impl TwirlGroup {
    fn local_dim(&self, dims: Dims) -> Result<usize> {
        if dims.a != dims.b {
            return Err(Error::dims(format!("twirls act on square dims, got {dims}")));
        }
        match *self {
            TwirlGroup::UUbarVV { da, db } if da * db != dims.a => {
                Err(Error::dims(format!("operator {dims} is not on ({da}·{db})⊗({da}·{db})")))
            }
            TwirlGroup::SS | TwirlGroup::SSbar => {
                check_symplectic_dim(dims.a)?;
                Ok(dims.a)
            }
            _ => Ok(dims.a),
        }
    }

    /// Operator basis of the commutant, identity first.
    pub fn invariant_span(&self, dims: Dims) -> Result<Vec<HermitianOp>> {
        let d = self.local_dim(dims)?;
        let id = HermitianOp::identity(dims);
        Ok(match *self {
            TwirlGroup::UU => vec![id, flip(d)],
            TwirlGroup::UUbar => vec![id, max_entangled_projector(d)],
            TwirlGroup::SS => invariant_basis(d)?.ss_span().to_vec(),
            TwirlGroup::SSbar => invariant_basis(d)?.ss_bar_span().to_vec(),
            TwirlGroup::UUbarVV { da, db } => uuvv_basis(da, db)?.to_vec(),
        })
    }

    /// One Haar-distributed group element as a unitary on the whole space.
    pub fn sample(&self, dims: Dims, rng: &mut Rng) -> Result<CMatrix> {
        let d = self.local_dim(dims)?;
        Ok(match *self {
            TwirlGroup::UU => {
                let u = haar_unitary(d, rng);
                kron(&u, &u)
            }
            TwirlGroup::UUbar => {
                let u = haar_unitary(d, rng);
                kron(&u, &u.conjugate())
            }
            TwirlGroup::SS => {
                let s = haar_unitary_symplectic(d, rng);
                kron(&s, &s)
            }
            TwirlGroup::SSbar => {
                let s = haar_unitary_symplectic(d, rng);
                kron(&s, &s.conjugate())
            }
            TwirlGroup::UUbarVV { da, db } => {
                let u = haar_unitary(da, rng);
                let v = haar_unitary(db, rng);
                kron(&kron(&u, &v), &kron(&u.conjugate(), &v))
            }
        })
    }
}

/// Exact twirl: orthogonal projection onto the invariant span.
pub fn twirl_exact(x: &HermitianOp, group: TwirlGroup) -> Result<HermitianOp> {
    let basis = group.invariant_span(x.dims())?;
    let targets: Vec<f64> = basis.iter().map(|b| x.expectation(b)).collect();
    solve_in_span(&basis, &targets)
}

/// Monte Carlo twirl over `n` Haar samples.
pub fn haar_twirl(x: &HermitianOp, group: TwirlGroup, n: usize, seed: u64) -> Result<HermitianOp> {
    if n == 0 {
        return Err(Error::range("twirl needs at least one sample"));
    }
    let dims = x.dims();
    let mut rng = seeded_rng(seed);
    let mut acc = CMatrix::zeros(dims.total(), dims.total());
    for _ in 0..n {
        let g = group.sample(dims, &mut rng)?;
        acc += &g * x.matrix() * g.adjoint();
    }
    HermitianOp::new(dims, acc * c(1.0 / n as f64))
}

// ---------------------------------------------------------------------------
// Symplectic region

/// `(⟨F⟩, ⟨P₊ᴶ⟩)` of an `S⊗S`-invariant state on `C^d ⊗ C^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymplecticCoords {
    pub f: f64,
    pub pj: f64,
    pub d: usize,
}

impl SymplecticCoords {
    pub fn new(f: f64, pj: f64, d: usize) -> Result<Self> {
        check_symplectic_dim(d)?;
        if !f.is_finite() || !pj.is_finite() {
            return Err(Error::invalid("coordinates must be finite"));
        }
        Ok(SymplecticCoords { f, pj, d })
    }

    /// Weights `tr(ρ Π_α)` of the state with these coordinates.
    pub fn projector_weights(&self) -> [f64; 3] {
        [self.pj, (1.0 - self.f) / 2.0 - self.pj, (1.0 + self.f) / 2.0]
    }

    fn point(&self) -> [f64; 2] {
        [self.f, self.pj]
    }
}

/// Extreme points `x₀, x₁, x₂, x₃` of the PPT region.
pub fn region_points(d: usize) -> [[f64; 2]; 4] {
    let df = d as f64;
    [[0.0, 0.0], [0.0, 1.0 / df], [1.0, 0.0], [df / (df + 2.0), 1.0 / (df + 2.0)]]
}

/// Vertices `Π₀, Π₁, Π₂` of the positivity triangle.
pub const POSITIVITY_TRIANGLE: [[f64; 2]; 3] = [[-1.0, 1.0], [-1.0, 0.0], [1.0, 0.0]];

/// Unit-trace element of `span{1, F, P₊ᴶ}` with the given coordinates, and whether the
/// coordinates lie in the positivity triangle.
pub fn state_from_coords(coords: SymplecticCoords) -> Result<(HermitianOp, bool)> {
    let basis = invariant_basis(coords.d)?.ss_span();
    let rho = solve_in_span(&basis, &[1.0, coords.f, coords.pj])?;
    let valid = coords.projector_weights().iter().all(|&w| w >= -MATRIX_TOL);
    Ok((rho, valid))
}

pub fn coords_from_state(rho: &HermitianOp) -> Result<SymplecticCoords> {
    let dims = rho.dims();
    if dims.a != dims.b {
        return Err(Error::dims(format!("symplectic coordinates need square dims, got {dims}")));
    }
    let b = invariant_basis(dims.a)?;
    SymplecticCoords::new(rho.expectation(&b.flip), rho.expectation(&b.pplus_j), dims.a)
}

/// `(|⟨u|v⟩|², |uᵀJv|²/d)`.
pub fn product_coords(u: &CVector, v: &CVector, d: usize) -> Result<SymplecticCoords> {
    if u.len() != d || v.len() != d {
        return Err(Error::dims("vectors do not have length d"));
    }
    let j = symplectic_j(d)?;
    let overlap = u.dotc(v).norm_sqr();
    let ujv = (u.transpose() * &j * v)[(0, 0)].norm_sqr() / d as f64;
    SymplecticCoords::new(overlap, ujv, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymplecticClass {
    Invalid,
    NptEntangled,
    PptEntangled,
    Separable,
}

impl SymplecticClass {
    pub fn label(&self) -> &'static str {
        match self {
            SymplecticClass::Invalid => "invalid",
            SymplecticClass::NptEntangled => "npt_entangled",
            SymplecticClass::PptEntangled => "ppt_entangled",
            SymplecticClass::Separable => "separable",
        }
    }
}

impl fmt::Display for SymplecticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Closed membership in a convex polygon with counter-clockwise vertices.
pub fn in_convex_polygon(p: [f64; 2], vertices: &[[f64; 2]], tol: f64) -> bool {
    let n = vertices.len();
    (0..n).all(|k| cross(vertices[k], vertices[(k + 1) % n], p) >= -tol)
}

fn ccw(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let signed: f64 = (0..pts.len())
        .map(|k| {
            let (a, b) = (pts[k], pts[(k + 1) % pts.len()]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    if signed < 0.0 {
        pts.reverse();
    }
    pts
}

fn ppt_hull(d: usize) -> Vec<[f64; 2]> {
    let x = region_points(d);
    ccw(vec![x[0], x[2], x[3], x[1]])
}

fn separable_hull(d: usize) -> Vec<[f64; 2]> {
    let x = region_points(d);
    ccw(vec![x[0], x[2], x[1]])
}

/// Region of the coordinate plane a point belongs to.
pub fn classify_symplectic(coords: SymplecticCoords) -> SymplecticClass {
    let p = coords.point();
    if !in_convex_polygon(p, &ccw(POSITIVITY_TRIANGLE.to_vec()), HULL_TOL) {
        SymplecticClass::Invalid
    } else if in_convex_polygon(p, &separable_hull(coords.d), HULL_TOL) {
        SymplecticClass::Separable
    } else if in_convex_polygon(p, &ppt_hull(coords.d), HULL_TOL) {
        SymplecticClass::PptEntangled
    } else {
        SymplecticClass::NptEntangled
    }
}

/// `pj > (1 − f)/d`: detected by the Breuer–Hall map. On the PPT region this is
/// equivalent to `(1 ⊗ Λ_BH)(ρ)` having a negative eigenvalue; NPT states outside the
/// line can still be detected.
pub fn bh_detection_check(coords: SymplecticCoords) -> bool {
    coords.pj > (1.0 - coords.f) / coords.d as f64 + HULL_TOL
}

/// Minimal eigenvalue of `(1 ⊗ Λ_BH)(ρ)` with the Darboux form.
pub fn bh_min_eigenvalue(rho: &HermitianOp) -> Result<f64> {
    let bh = breuer_hall_map(rho.dims().b, None)?;
    Ok(min_eigenvalue(&bh.apply_on_b(rho)?))
}

/// Region membership decided on matrices: positivity, PPT, then the Breuer–Hall test.
pub fn classify_by_matrices(coords: SymplecticCoords) -> Result<SymplecticClass> {
    let (rho, _) = state_from_coords(coords)?;
    let bh = breuer_hall_map(coords.d, None)?;
    Ok(matrix_class(&rho, &bh))
}

fn matrix_class(rho: &HermitianOp, bh: &MapRep) -> SymplecticClass {
    if min_eigenvalue(rho) < -MATRIX_TOL {
        SymplecticClass::Invalid
    } else if !is_ppt(rho) {
        SymplecticClass::NptEntangled
    } else if min_eigenvalue(&bh.apply_on_b(rho).expect("state matches the map")) < -MATRIX_TOL {
        SymplecticClass::PptEntangled
    } else {
        SymplecticClass::Separable
    }
}

/// Grid point of a `grid × grid` lattice over `[−1, 1] × [0, 1]`.
pub fn grid_point(d: usize, grid: usize, i: usize, j: usize) -> Result<SymplecticCoords> {
    let steps = grid.saturating_sub(1).max(1) as f64;
    SymplecticCoords::new(-1.0 + 2.0 * i as f64 / steps, j as f64 / steps, d)
}

/// Geometric classification of every lattice point, row-major in `f`.
pub fn sweep_symplectic(d: usize, grid: usize) -> Result<Vec<(SymplecticCoords, SymplecticClass)>> {
    check_symplectic_dim(d)?;
    let mut out = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            let c = grid_point(d, grid, i, j)?;
            out.push((c, classify_symplectic(c)));
        }
    }
    Ok(out)
}

/// Lattice points where the geometric and matrix-level classifications differ, or where
/// the detection line and the Breuer–Hall eigenvalue disagree inside the PPT region.
pub fn grid_disagreements(d: usize, grid: usize) -> Result<Vec<(SymplecticCoords, SymplecticClass, SymplecticClass)>> {
    let basis = invariant_basis(d)?.ss_span();
    let bh = breuer_hall_map(d, None)?;
    let mut out = Vec::new();
    for (c, geo) in sweep_symplectic(d, grid)? {
        let rho = solve_in_span(&basis, &[1.0, c.f, c.pj])?;
        let mat = matrix_class(&rho, &bh);
        let detected = bh_detection_check(c);
        let in_ppt = matches!(geo, SymplecticClass::Separable | SymplecticClass::PptEntangled);
        let bh_agrees = !in_ppt
            || detected == (min_eigenvalue(&bh.apply_on_b(&rho)?) < -MATRIX_TOL);
        if mat != geo || !bh_agrees {
            out.push((c, geo, mat));
        }
    }
    Ok(out)
}

fn shoelace(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    0.5 * (0..n)
        .map(|k| pts[k][0] * pts[(k + 1) % n][1] - pts[(k + 1) % n][0] * pts[k][1])
        .sum::<f64>()
        .abs()
}

/// Area of `conv{x₀,x₁,x₂,x₃}` minus `conv{x₀,x₁,x₂}`.
pub fn ppt_entangled_area(d: usize) -> f64 {
    shoelace(&ppt_hull(d)) - shoelace(&separable_hull(d))
}

/// Residuals of the trace identities that exchange the `Σ/Σ̂^Γ` and `Σ̂/Σ^Γ` diagrams.
pub fn region_symmetry_residual(d: usize) -> Result<f64> {
    let b = invariant_basis(d)?;
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        let (p, ph) = (&b.pi[a], &b.pi_hat[a]);
        let (pg, phg) = (p.partial_transpose(Subsystem::B), ph.partial_transpose(Subsystem::B));
        let pairs = [
            (ph.expectation(&b.flip_j), p.expectation(&b.flip)),
            (ph.expectation(&b.pplus), p.expectation(&b.pplus_j)),
            (ph.trace(), p.trace()),
            (p.trace(), phg.trace()),
            (pg.expectation(&b.flip_j), phg.expectation(&b.flip)),
            (pg.expectation(&b.pplus), phg.expectation(&b.pplus_j)),
        ];
        for (x, y) in pairs {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{breuer_hall, reduction, transposition};
    use crate::spa::critical_p;
    use crate::tensor::{basis_vector, real_vector};

    #[test]
    fn darboux_form() {
        let j = symplectic_j(2).unwrap();
        assert_eq!(j[(0, 1)], c(1.0));
        assert_eq!(j[(1, 0)], c(-1.0));
        let j = symplectic_j(6).unwrap();
        assert!((&j * &j + CMatrix::identity(6, 6)).norm() < 1e-15);
        assert!((j.transpose() + &j).norm() < 1e-15);
        assert!(symplectic_j(5).is_err());
        let b = invariant_basis(4).unwrap();
        assert!((b.pplus_j.expectation(&b.flip) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn projector_algebra() {
        let b = invariant_basis(4).unwrap();
        assert!(b.algebra_residual() < 1e-12);
        assert!(b.commutator_residual() < 1e-12);
        let traces: Vec<f64> = b.pi.iter().map(|p| p.trace()).collect();
        for (t, want) in traces.iter().zip([1.0, 5.0, 10.0]) {
            assert!((t - want).abs() < 1e-12);
        }
        assert!(invariant_basis(3).is_err());
    }

    #[test]
    fn coordinates_round_trip() {
        let b = invariant_basis(4).unwrap();
        let (rho, ok) = state_from_coords(SymplecticCoords::new(1.0, 0.0, 4).unwrap()).unwrap();
        assert!(ok);
        assert!(rho.frobenius_distance(&b.pi[2].scale(0.1)) < 1e-12);
        let (rho, ok) = state_from_coords(SymplecticCoords::new(-1.0, 1.0, 4).unwrap()).unwrap();
        assert!(ok);
        assert!(rho.frobenius_distance(&b.pi[0]) < 1e-12);
        let c = SymplecticCoords::new(0.3, 0.1, 6).unwrap();
        let back = coords_from_state(&state_from_coords(c).unwrap().0).unwrap();
        assert!((back.f - c.f).abs() < 1e-10 && (back.pj - c.pj).abs() < 1e-10);
        let (_, ok) = state_from_coords(SymplecticCoords::new(0.5, 0.9, 4).unwrap()).unwrap();
        assert!(!ok);
    }

    #[test]
    fn named_points() {
        let x = region_points(4);
        let at = |p: [f64; 2]| SymplecticCoords::new(p[0], p[1], 4).unwrap();
        assert_eq!(classify_symplectic(at(x[3])), SymplecticClass::PptEntangled);
        assert_eq!(classify_symplectic(at([1.0, 0.0])), SymplecticClass::Separable);
        assert_eq!(classify_symplectic(at([-1.0, 1.0])), SymplecticClass::NptEntangled);
        assert_eq!(classify_symplectic(at([0.5, 0.9])), SymplecticClass::Invalid);
        assert!(!bh_detection_check(at(x[1])));
        assert!(bh_detection_check(at(x[3])));
        assert!(!bh_detection_check(at([1.0, 0.0])));
        for p in [x[1], x[3], [1.0, 0.0]] {
            let c = at(p);
            assert_eq!(classify_by_matrices(c).unwrap(), classify_symplectic(c));
        }
    }

    #[test]
    fn product_vector_coordinates() {
        let e0 = basis_vector(4, 0);
        let c = product_coords(&e0, &e0, 4).unwrap();
        assert_eq!((c.f, c.pj), (1.0, 0.0));
        let u = real_vector(&[-0.5, 0.5, 0.5, 0.5]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = real_vector(&[h, 0.0, 0.0, h]);
        let c = product_coords(&u, &v, 4).unwrap();
        assert!(c.f.abs() < 1e-15 && c.pj.abs() < 1e-15);
        let u = real_vector(&[h, -h, 0.0, 0.0]);
        let v = real_vector(&[h, h, 0.0, 0.0]);
        let c = product_coords(&u, &v, 4).unwrap();
        assert!(c.f.abs() < 1e-15 && (c.pj - 0.25).abs() < 1e-15);
    }

    #[test]
    fn product_coordinates_match_state() {
        let mut rng = seeded_rng(3);
        for _ in 0..5 {
            let u = crate::haar::random_unit_vector(4, &mut rng);
            let v = crate::haar::random_unit_vector(4, &mut rng);
            let c = product_coords(&u, &v, 4).unwrap();
            let back = coords_from_state(&HermitianOp::product_projector(&u, &v)).unwrap();
            assert!((back.f - c.f).abs() < 1e-12 && (back.pj - c.pj).abs() < 1e-12);
            assert_eq!(classify_symplectic(c), SymplecticClass::Separable);
        }
    }

    #[test]
    fn werner_and_isotropic_match_spa_points() {
        for d in 2..5 {
            let p = critical_p(&transposition(d)).unwrap();
            let w = werner(d, 1.0).unwrap();
            assert!(w.frobenius_distance(&p.witness_at_p_star) < 1e-12);
            assert!(is_ppt(&w));
        }
        let r = critical_p(&reduction(3).unwrap()).unwrap();
        assert!(isotropic(3, 0.0).unwrap().frobenius_distance(&r.witness_at_p_star) < 1e-12);
        assert!(werner(3, 1.5).is_err());
        assert!(isotropic(3, -0.1).is_err());
    }

    #[test]
    fn werner_ppt_boundary() {
        // ⟨F⟩ ≥ 0 is PPT for Werner states
        assert!(is_ppt(&werner(3, 0.0).unwrap()));
        assert!(!is_ppt(&werner(3, -0.01).unwrap()));
    }

    #[test]
    fn exact_twirl_is_idempotent_projection() {
        let mut rng = seeded_rng(5);
        let x = HermitianOp::new(Dims::square(4), crate::haar::random_density_matrix(16, 4, &mut rng)).unwrap();
        for g in [TwirlGroup::UU, TwirlGroup::UUbar, TwirlGroup::SS, TwirlGroup::SSbar, TwirlGroup::UUbarVV { da: 2, db: 2 }] {
            let t = twirl_exact(&x, g).unwrap();
            assert!((t.trace() - 1.0).abs() < 1e-12);
            assert!(twirl_exact(&t, g).unwrap().frobenius_distance(&t) < 1e-12);
        }
    }

    #[test]
    fn monte_carlo_twirl_approaches_exact() {
        let e00 = basis_vector(3, 0);
        let x = HermitianOp::product_projector(&e00, &e00);
        let exact = twirl_exact(&x, TwirlGroup::UU).unwrap();
        assert!(exact.frobenius_distance(&werner(3, 1.0).unwrap()) < 1e-12);
        let mc = haar_twirl(&x, TwirlGroup::UU, 2000, 9).unwrap();
        assert!(mc.frobenius_distance(&exact) < 0.05);
    }

    #[test]
    fn breuer_hall_witness_is_ss_bar_invariant() {
        let e = critical_p(&breuer_hall(4, None).unwrap()).unwrap().witness_at_p_star;
        assert!(twirl_exact(&e, TwirlGroup::SSbar).unwrap().frobenius_distance(&e) < 1e-12);
        let b = invariant_basis(4).unwrap();
        assert!(e.expectation(&b.pplus).abs() < 1e-12);
        assert!(e.expectation(&b.flip_j).abs() < 1e-12);
        let mut rng = seeded_rng(1);
        let g = TwirlGroup::SSbar.sample(Dims::square(4), &mut rng).unwrap();
        assert!(e.congruence(&g).unwrap().frobenius_distance(&e) < 1e-12);
    }

    #[test]
    fn partial_transpose_exchanges_spans() {
        let b = invariant_basis(4).unwrap();
        let ss = b.ss_span();
        let pt: Vec<HermitianOp> = ss.iter().map(|x| x.partial_transpose(Subsystem::B)).collect();
        assert_eq!(gram_rank(&ss), 3);
        assert_eq!(gram_rank(&pt), 3);
        let mut joint = pt.clone();
        joint.extend(b.ss_bar_span());
        assert_eq!(gram_rank(&joint), 3);
    }

    #[test]
    fn region_symmetry_identities() {
        for d in [4, 6] {
            assert!(region_symmetry_residual(d).unwrap() < 1e-10);
        }
    }

    #[test]
    fn area_formula() {
        for d in [4usize, 6, 8, 10] {
            let df = d as f64;
            let want = (df - 2.0) / (2.0 * df * (df + 2.0));
            assert!((ppt_entangled_area(d) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn small_grid_agrees() {
        let bad = grid_disagreements(4, 9).unwrap();
        assert!(bad.is_empty(), "{bad:?}");
    }
}
