//! Reference-value harness: recompute every row, compare against the manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spalab::families::{
    classify_symplectic, grid_disagreements, ppt_entangled_area, region_points, SymplecticClass, SymplecticCoords,
};
use spalab::holevo::{
    discretize_covariant, id_tensor_t_cp_threshold, id_tensor_t_ppt_threshold, CovariantFamily, Sampling,
};
use spalab::maps::{breuer_hall, choi3, id_tensor_t_witness, reduction, transposition};
use spalab::separability::{
    choi_critical_decomposition, circle_critical_a, circle_decomposition, circle_witness, counterexample_2x2,
    decomposition_residual, is_ppt, qutrit_q_suite,
};
use spalab::spa::{critical_p, spa_witness, POSITIVITY_TOL};
use spalab::tensor::{flip, max_entangled_projector, max_entangled_vector, min_eigenvalue};
use spalab::Subsystem;

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

/// Manifest shipped with the binary.
pub const DEFAULT_MANIFEST: &str = include_str!("../tolerances.toml");

/// Sample counts of the two convergence checkpoints.
pub const HOLEVO_N: usize = 8192;
pub const HOLEVO_N_COARSE: usize = 512;

#[derive(Clone, Debug, Deserialize)]
pub struct ManifestCase {
    pub id: String,
    pub expected: f64,
    pub tol: f64,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    #[serde(rename = "case")]
    pub cases: Vec<ManifestCase>,
}

impl Manifest {
    pub fn parse(text: &str) -> CliResult<Self> {
        let m: Manifest = toml::from_str(text)?;
        if m.format_version != FORMAT_VERSION {
            return Err(CliError::input(format!(
                "manifest format_version {} (expected {FORMAT_VERSION})",
                m.format_version
            )));
        }
        let mut seen = BTreeMap::new();
        for c in &m.cases {
            if !(c.tol >= 0.0) || !c.expected.is_finite() {
                return Err(CliError::input(format!("case `{}`: tolerance must be ≥ 0 and values finite", c.id)));
            }
            if seen.insert(c.id.as_str(), ()).is_some() {
                return Err(CliError::input(format!("duplicate case `{}`", c.id)));
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproRow {
    pub id: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproReport {
    pub format_version: u32,
    pub seed: u64,
    pub rows: Vec<ReproRow>,
}

impl ReproReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Aligned text table.
    pub fn to_table(&self) -> String {
        let w = self.rows.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
        let mut s = String::new();
        let _ = writeln!(s, "format_version {}  seed {}", self.format_version, self.seed);
        let _ = writeln!(s, "{:<w$}  {:>22}  {:>22}  {:>9}  {}", "id", "expected", "computed", "tol", "result");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<w$}  {:>22.15e}  {:>22.15e}  {:>9.1e}  {}",
                r.id,
                r.expected,
                r.computed,
                r.tolerance,
                if r.pass { "pass" } else { "FAIL" }
            );
        }
        let failed = self.rows.iter().filter(|r| !r.pass).count();
        let _ = writeln!(s, "{} rows, {} failed", self.rows.len(), failed);
        s
    }
}

type Rows = Vec<(String, f64)>;
type Group = fn(u64) -> spalab::Result<Rows>;

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

const ID_TENSOR_T_DIMS: [(usize, usize); 5] = [(2, 2), (2, 3), (3, 2), (2, 4), (3, 3)];

fn id_tensor_t_rows(_: u64) -> spalab::Result<Rows> {
    let mut rows = Vec::new();
    for (da, db) in ID_TENSOR_T_DIMS {
        let e = id_tensor_t_witness(da, db, 0.0)?;
        rows.push((format!("1xT cp threshold ({da},{db})"), critical_p(&e)?.p_star));
        let eg = e.partial_transpose(Subsystem::B);
        rows.push((format!("1xT ppt threshold ({da},{db})"), critical_p(&eg)?.p_star));
    }
    let (lo, hi) = (id_tensor_t_cp_threshold(2, 3), id_tensor_t_ppt_threshold(2, 3));
    let mid = id_tensor_t_witness(2, 3, 0.5 * (lo + hi))?;
    let gap = lo < hi && min_eigenvalue(&mid) >= -POSITIVITY_TOL && !is_ppt(&mid);
    rows.push(("1xT gap (2,3)".into(), indicator(gap)));
    Ok(rows)
}

fn catalog_rows(_: u64) -> spalab::Result<Rows> {
    let mut rows = Vec::new();
    for d in 2..=6 {
        rows.push((format!("transpose p* d={d}"), critical_p(&transposition(d))?.p_star));
    }
    for d in 2..=4 {
        rows.push((format!("reduction p* d={d}"), critical_p(&reduction(d)?)?.p_star));
    }
    for d in [4, 6] {
        let e = breuer_hall(d, None)?;
        let r = critical_p(&e)?;
        rows.push((format!("breuer-hall lambda_min d={d}"), r.lambda_min));
        rows.push((format!("breuer-hall <phi+|E|phi+> d={d}"), e.quadratic_form(&max_entangled_vector(d))));
        rows.push((format!("breuer-hall p* d={d}"), r.p_star));
    }
    rows.push(("choi p*".into(), critical_p(&choi3())?.p_star));
    for d in [2, 3] {
        let w = critical_p(&transposition(d))?.witness_at_p_star;
        rows.push((format!("werner <F> at p* d={d}"), w.expectation(&flip(d))));
    }
    let iso = critical_p(&reduction(3)?)?.witness_at_p_star;
    rows.push(("isotropic <P+> at p* d=3".into(), iso.expectation(&max_entangled_projector(3))));
    Ok(rows)
}

fn decomposition_rows(_: u64) -> spalab::Result<Rows> {
    let mut rows = Vec::new();
    let choi_target = spa_witness(&choi3(), 0.6)?;
    rows.push(("choi residual".into(), decomposition_residual(&choi_target, &choi_critical_decomposition())));

    let a = circle_critical_a();
    let kappa = (1.0 / a - a * a) / (a - a * a);
    rows.push(("circle critical a".into(), a));
    rows.push(("circle kappa > 1".into(), indicator(kappa > 1.0)));
    rows.push(("circle residual".into(), decomposition_residual(&circle_witness(a), &circle_decomposition())));

    let q = qutrit_q_suite();
    rows.push(("rank2 critical a".into(), q.r2_critical_a));
    rows.push(("rank2 p_c".into(), q.r2_p_c));
    rows.push(("rank2 residual".into(), q.r2_decomposition_residual));
    rows.push(("rank4 critical a".into(), q.r4_critical_a));
    rows.push(("rank4 condition (a+1)^2-4/9".into(), q.r4_condition_1));
    rows.push(("rank4 condition (a+2/3)(a-1/3)-2".into(), q.r4_condition_2));
    rows.push(("rank4 fit residual".into(), q.r4_fit_residual));
    rows.push(("rank4 residual".into(), q.r4_decomposition_residual));

    let rho = counterexample_2x2(1.0, 2.0, 0.8)?;
    let cp = min_eigenvalue(&rho) >= -POSITIVITY_TOL;
    let npt = min_eigenvalue(&rho.partial_transpose(Subsystem::B)) <= -1e-6;
    rows.push(("counterexample a=1 b=2 p=4/5".into(), indicator(cp && npt)));
    Ok(rows)
}

fn symplectic_rows(_: u64) -> spalab::Result<Rows> {
    let x3 = region_points(4)[3];
    let class = classify_symplectic(SymplecticCoords::new(x3[0], x3[1], 4)?);
    let areas: Vec<f64> = [4, 6, 8, 10].iter().map(|&d| ppt_entangled_area(d)).collect();
    Ok(vec![
        ("symplectic grid disagreements d=4".into(), grid_disagreements(4, 41)?.len() as f64),
        ("symplectic x3 class d=4".into(), indicator(class == SymplecticClass::PptEntangled)),
        ("symplectic area decreasing d=4..10".into(), indicator(areas.windows(2).all(|w| w[1] < w[0]))),
    ])
}

/// Families compared at the two sample-count checkpoints.
pub fn holevo_families() -> [CovariantFamily; 5] {
    [
        CovariantFamily::WernerT { d: 2 },
        CovariantFamily::WernerT { d: 3 },
        CovariantFamily::IsotropicR { d: 3 },
        CovariantFamily::BreuerHall,
        CovariantFamily::IdTensorT { da: 2, db: 2 },
    ]
}

fn holevo_rows(seed: u64) -> spalab::Result<Rows> {
    let per_family: Vec<spalab::Result<Rows>> = holevo_families()
        .par_iter()
        .map(|&fam| {
            let target = fam.target_witness()?;
            let fine = discretize_covariant(fam, HOLEVO_N, seed, Sampling::Orbit)?;
            let coarse = discretize_covariant(fam, HOLEVO_N_COARSE, seed, Sampling::Orbit)?;
            let d_fine = fine.choi().frobenius_distance(&target);
            let d_coarse = coarse.choi().frobenius_distance(&target);
            let name = fam.name();
            Ok(vec![
                (format!("holevo distance {name} n={HOLEVO_N}"), d_fine),
                (format!("holevo convergence {name}"), indicator(d_fine < d_coarse)),
                (format!("holevo povm residual {name}"), fine.povm_residual()),
            ])
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_family {
        rows.extend(r?);
    }
    Ok(rows)
}

const GROUPS: [Group; 5] = [id_tensor_t_rows, catalog_rows, decomposition_rows, symplectic_rows, holevo_rows];

/// Computes every row and joins it with the manifest; rows are sorted by id.
pub fn cmd_reproduce(manifest: &Manifest, seed: u64) -> CliResult<ReproReport> {
    let computed: Vec<spalab::Result<Rows>> = GROUPS.par_iter().map(|g| g(seed)).collect();
    let mut values = BTreeMap::new();
    for group in computed {
        for (id, v) in group? {
            values.insert(id, v);
        }
    }
    let expected: BTreeMap<&str, &ManifestCase> = manifest.cases.iter().map(|c| (c.id.as_str(), c)).collect();
    if let Some(id) = values.keys().find(|id| !expected.contains_key(id.as_str())) {
        return Err(CliError::input(format!("manifest has no entry for `{id}`")));
    }
    if let Some(id) = expected.keys().find(|id| !values.contains_key(**id)) {
        return Err(CliError::input(format!("manifest entry `{id}` matches no computed row")));
    }
    let rows = values
        .into_iter()
        .map(|(id, computed)| {
            let c = expected[id.as_str()];
            let pass = computed.is_finite() && (computed - c.expected).abs() <= c.tol;
            ReproRow { id, expected: c.expected, computed, tolerance: c.tol, pass }
        })
        .collect();
    Ok(ReproReport { format_version: FORMAT_VERSION, seed, rows })
}
