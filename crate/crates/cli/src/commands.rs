//! Thin wrappers over the library operations.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::Serialize;
use spalab::families::{
    classify_symplectic, grid_disagreements, isotropic, sweep_symplectic, werner, SymplecticCoords,
};
use spalab::holevo::{discretize_covariant, CovariantFamily, Sampling};
use spalab::io::{decomposition_to_json, holevo_to_json, matrix_to_json, parse_holevo, parse_matrix};
use spalab::maps::{
    breuer_hall, choi3, decomposable_from_q, id_tensor_t_witness, reduction, transposition, upb_witness,
};
use spalab::separability::{
    choi_critical_decomposition, circle_critical_a, circle_decomposition, circle_witness, decomposition_residual,
    is_ppt, ppt_sep_oracle, rank2_decomposition, rank2_matrix, rank4_decomposition, rank4_matrix, sep_search,
    SearchOptions, SepVerdict,
};
use spalab::spa::{critical_p, mix_white_noise, spa_witness, POSITIVITY_TOL};
use spalab::tensor::min_eigenvalue;
use spalab::{seeded_rng, Dims, HermitianOp, Subsystem, UpbSpec};

use crate::args::{
    CaseName, FamilyCommand, FamilyName, HolevoCommand, MapName, SamplingName, SepCommand, SepMode, SpaCommand,
    WitnessSource,
};
use crate::error::{CliError, CliResult, EXIT_NUMERICAL, EXIT_OK};

/// Reads a file, or stdin for `-`.
pub fn read_input(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::io(path, e))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_output(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Prints `value` as one line of JSON, or the text rendering.
fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> CliResult<()> {
    let mut out = io::stdout().lock();
    let res = if json {
        writeln!(out, "{}", serde_json::to_string(value)?)
    } else {
        write!(out, "{}", text())
    };
    res.map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn print_raw(s: &str) -> CliResult<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "{s}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn positive_operator(x: &HermitianOp, what: &str) -> CliResult<()> {
    let t = x.trace();
    if !(t > 0.0) || min_eigenvalue(x) < -POSITIVITY_TOL * t.max(1.0) {
        return Err(CliError::input(format!("{what} is not a nonzero positive operator")));
    }
    Ok(())
}

fn square(dims: Option<(usize, usize)>, default: usize, name: &str) -> CliResult<usize> {
    match dims.unwrap_or((default, default)) {
        (a, b) if a == b => Ok(a),
        (a, b) => Err(CliError::input(format!("{name} needs equal dimensions, got {a},{b}"))),
    }
}

// ---------------------------------------------------------------------------
// spa

fn map_label(m: MapName) -> &'static str {
    match m {
        MapName::Transpose => "transpose",
        MapName::Reduction => "reduction",
        MapName::Choi => "choi",
        MapName::BreuerHall => "breuer-hall",
        MapName::UpbTiles => "upb-tiles",
        MapName::UpbPyramid => "upb-pyramid",
        MapName::IdTensorT => "id-tensor-t",
        MapName::QGamma => "q-gamma",
    }
}

fn q_witness(path: &Path) -> CliResult<HermitianOp> {
    let q = parse_matrix(&read_input(path)?)?;
    positive_operator(&q, "Q")?;
    Ok(decomposable_from_q(&q).scale(1.0 / q.trace()))
}

/// Normalized witness named by the arguments.
pub fn resolve_witness(src: &WitnessSource, seed: u64) -> CliResult<(String, HermitianOp)> {
    if let Some(path) = &src.witness {
        return Ok(("witness".into(), parse_matrix(&read_input(path)?)?));
    }
    let map = match (src.map, &src.q) {
        (None | Some(MapName::QGamma), Some(q)) => return Ok(("q-gamma".into(), q_witness(q)?)),
        (Some(m), None) if m != MapName::QGamma => m,
        (Some(m), Some(_)) => return Err(CliError::input(format!("--q cannot be combined with --map {}", map_label(m)))),
        _ => return Err(CliError::input("give one of --map, --witness or --q")),
    };
    let fixed_3x3 = |name: &str| -> CliResult<()> {
        match src.dims {
            None | Some((3, 3)) => Ok(()),
            Some((a, b)) => Err(CliError::input(format!("{name} is defined on 3,3 only, got {a},{b}"))),
        }
    };
    let e = match map {
        MapName::Transpose => transposition(square(src.dims, 3, "transpose")?),
        MapName::Reduction => reduction(square(src.dims, 3, "reduction")?)?,
        MapName::BreuerHall => breuer_hall(square(src.dims, 4, "breuer-hall")?, None)?,
        MapName::Choi => {
            fixed_3x3("choi")?;
            choi3()
        }
        MapName::UpbTiles | MapName::UpbPyramid => {
            fixed_3x3(map_label(map))?;
            let upb = if map == MapName::UpbTiles { UpbSpec::tiles() } else { UpbSpec::pyramid() };
            let eps = upb.default_epsilon(&mut seeded_rng(seed));
            upb_witness(&upb, eps)?
        }
        MapName::IdTensorT => {
            let (da, db) = src.dims.unwrap_or((2, 2));
            id_tensor_t_witness(da, db, 0.0)?
        }
        MapName::QGamma => unreachable!("handled above"),
    };
    Ok((map_label(map).into(), e))
}

#[derive(Serialize)]
struct CriticalOut {
    map: String,
    dims: [usize; 2],
    p_star: f64,
    lambda_min: f64,
    p_bisection: f64,
    cp_certificate: f64,
    already_cp: bool,
}

pub fn spa(cmd: SpaCommand, seed: u64, json: bool) -> CliResult<i32> {
    match cmd {
        SpaCommand::Critical(src) => {
            let (map, e) = resolve_witness(&src, seed)?;
            let r = critical_p(&e)?;
            let d = e.dims();
            let out = CriticalOut {
                map,
                dims: [d.a, d.b],
                p_star: r.p_star,
                lambda_min: r.lambda_min,
                p_bisection: r.p_bisection,
                cp_certificate: r.cp_certificate,
                already_cp: r.already_cp,
            };
            emit(json, &out, || {
                format!(
                    "map          {}\ndims         {},{}\np_star       {}\nlambda_min   {}\np_bisection  {}\ncp_cert      {}\n",
                    out.map, d.a, d.b, out.p_star, out.lambda_min, out.p_bisection, out.cp_certificate
                )
            })?;
        }
        SpaCommand::Mix { source, p } => {
            let (_, e) = resolve_witness(&source, seed)?;
            let mixed = if (e.trace() - 1.0).abs() <= 1e-9 { spa_witness(&e, p)? } else { mix_white_noise(&e, p)? };
            print_raw(&matrix_to_json(&mixed))?;
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// sep

#[derive(Debug, Serialize)]
pub struct SepOut {
    pub dims: [usize; 2],
    pub verdict: &'static str,
    pub method: &'static str,
    pub ppt: bool,
    pub min_eig_pt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

fn in_oracle_domain(d: Dims) -> bool {
    matches!((d.a, d.b), (2, 2) | (2, 3) | (3, 2))
}

pub fn sep_check(rho: &HermitianOp, mode: SepMode, seed: u64, max_iter: usize) -> CliResult<SepOut> {
    positive_operator(rho, "state")?;
    let rho = rho.scale(1.0 / rho.trace());
    let d = rho.dims();
    let min_eig_pt = min_eigenvalue(&rho.partial_transpose(Subsystem::B));
    let ppt = is_ppt(&rho);
    let mut out = SepOut {
        dims: [d.a, d.b],
        verdict: "unknown",
        method: "ppt",
        ppt,
        min_eig_pt,
        terms: None,
        residual: None,
    };
    let search = |out: &mut SepOut| {
        out.method = "search";
        if let Some(dec) = sep_search(&rho, seed, SearchOptions::with_max_iter(max_iter)) {
            out.verdict = "separable";
            out.terms = Some(dec.len());
            out.residual = Some(decomposition_residual(&rho, &dec));
        }
    };
    match mode {
        SepMode::Ppt => {
            if !ppt {
                out.verdict = "entangled";
            }
        }
        SepMode::Oracle => {
            out.method = "oracle";
            out.verdict = match ppt_sep_oracle(&rho)? {
                SepVerdict::Separable => "separable",
                SepVerdict::Entangled => "entangled",
            };
        }
        SepMode::Search => search(&mut out),
        SepMode::Auto => {
            if !ppt {
                out.verdict = "entangled";
            } else if in_oracle_domain(d) {
                out.method = "oracle";
                out.verdict = "separable";
            } else {
                search(&mut out);
            }
        }
    }
    Ok(out)
}

fn decompose_case(case: CaseName) -> (&'static str, HermitianOp, spalab::ProductDecomposition) {
    match case {
        CaseName::Choi => ("choi", spa_witness(&choi3(), 0.6).expect("unit trace"), choi_critical_decomposition()),
        CaseName::Circle => ("circle", circle_witness(circle_critical_a()), circle_decomposition()),
        CaseName::Rank2 => ("rank2", rank2_matrix(2f64.sqrt()), rank2_decomposition()),
        CaseName::Rank4 => ("rank4", rank4_matrix(4.0 / 3.0), rank4_decomposition()),
    }
}

#[derive(Serialize)]
struct DecomposeOut {
    case: &'static str,
    terms: usize,
    residual: f64,
    max_norm_deviation: f64,
    min_weight: f64,
}

pub fn sep(cmd: SepCommand, seed: u64, json: bool) -> CliResult<i32> {
    match cmd {
        SepCommand::Check { input, identity, mode, max_iter } => {
            let rho = match (input, identity) {
                (Some(path), _) => parse_matrix(&read_input(&path)?)?,
                (None, Some((a, b))) => HermitianOp::identity(Dims::new(a, b)),
                (None, None) => return Err(CliError::input("give --input or --identity")),
            };
            let out = sep_check(&rho, mode, seed, max_iter)?;
            emit(json, &out, || {
                let mut s = format!(
                    "verdict      {}\nmethod       {}\nppt          {}\nmin_eig_pt   {}\n",
                    out.verdict, out.method, out.ppt, out.min_eig_pt
                );
                if let (Some(t), Some(r)) = (out.terms, out.residual) {
                    s.push_str(&format!("terms        {t}\nresidual     {r}\n"));
                }
                s
            })?;
        }
        SepCommand::Decompose { case, out } => {
            let (name, target, dec) = decompose_case(case);
            let (dev, wmin) = dec.term_health();
            let summary = DecomposeOut {
                case: name,
                terms: dec.len(),
                residual: decomposition_residual(&target, &dec),
                max_norm_deviation: dev,
                min_weight: wmin,
            };
            let body = decomposition_to_json(&dec);
            match out {
                Some(path) => {
                    write_output(&path, &body)?;
                    emit(json, &summary, || {
                        format!(
                            "case         {}\nterms        {}\nresidual     {:e}\nwritten to   {}\n",
                            summary.case,
                            summary.terms,
                            summary.residual,
                            path.display()
                        )
                    })?;
                }
                None => print_raw(&body)?,
            }
            if summary.residual > 1e-8 {
                return Ok(EXIT_NUMERICAL);
            }
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// family

/// Tolerance on eigenvalues when labelling Werner and isotropic points.
const CLASS_TOL: f64 = 1e-9;

fn one_param_rows(family: FamilyName, d: usize, grid: usize) -> CliResult<Vec<(f64, f64, f64, &'static str)>> {
    let steps = grid.saturating_sub(1).max(1) as f64;
    (0..grid)
        .map(|k| {
            let t = k as f64 / steps;
            let (param, rho) = match family {
                FamilyName::Werner => {
                    let f = (-1.0 + 2.0 * t).clamp(-1.0, 1.0);
                    (f, werner(d, f)?)
                }
                _ => (t, isotropic(d, t)?),
            };
            let min_eig = min_eigenvalue(&rho);
            let min_eig_pt = min_eigenvalue(&rho.partial_transpose(Subsystem::B));
            let class = if min_eig < -CLASS_TOL {
                "invalid"
            } else if min_eig_pt < -CLASS_TOL {
                "npt_entangled"
            } else {
                "separable"
            };
            Ok((param, min_eig, min_eig_pt, class))
        })
        .collect()
}

#[derive(Serialize)]
struct ClassifyOut {
    d: usize,
    f: f64,
    pj: f64,
    class: &'static str,
    projector_weights: [f64; 3],
}

#[derive(Serialize)]
struct SweepOut {
    family: &'static str,
    d: usize,
    grid: usize,
    points: usize,
    counts: std::collections::BTreeMap<&'static str, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    disagreements: Option<usize>,
}

pub fn family(cmd: FamilyCommand, json: bool) -> CliResult<i32> {
    match cmd {
        FamilyCommand::Sweep { family, d, grid, out, verify } => {
            if grid < 2 || grid > 2001 {
                return Err(CliError::input(format!("grid {grid} outside 2..=2001")));
            }
            let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            let mut counts = std::collections::BTreeMap::new();
            let name = match family {
                FamilyName::Symplectic => {
                    wtr.write_record(["f", "pj", "class"])?;
                    for (c, class) in sweep_symplectic(d, grid)? {
                        wtr.write_record([c.f.to_string(), c.pj.to_string(), class.label().to_string()])?;
                        *counts.entry(class.label()).or_insert(0) += 1;
                    }
                    "symplectic"
                }
                FamilyName::Werner | FamilyName::Isotropic => {
                    wtr.write_record(["param", "min_eig", "min_eig_pt", "class"])?;
                    for (param, e, ept, class) in one_param_rows(family, d, grid)? {
                        wtr.write_record([param.to_string(), e.to_string(), ept.to_string(), class.to_string()])?;
                        *counts.entry(class).or_insert(0) += 1;
                    }
                    if family == FamilyName::Werner { "werner" } else { "isotropic" }
                }
            };
            let bytes = wtr.into_inner().map_err(|e| CliError::input(e.to_string()))?;
            let body = String::from_utf8(bytes).expect("csv output is UTF-8");
            let disagreements = match (verify, family) {
                (true, FamilyName::Symplectic) => Some(grid_disagreements(d, grid)?.len()),
                (true, _) => return Err(CliError::input("--verify applies to the symplectic family only")),
                _ => None,
            };
            let summary = SweepOut {
                family: name,
                d,
                grid,
                points: counts.values().sum(),
                counts,
                disagreements,
            };
            match &out {
                Some(path) => {
                    write_output(path, &body)?;
                    emit(json, &summary, || {
                        let mut s = format!("wrote {} points to {}\n", summary.points, path.display());
                        for (k, v) in &summary.counts {
                            s.push_str(&format!("{k:<14} {v}\n"));
                        }
                        if let Some(n) = summary.disagreements {
                            s.push_str(&format!("disagreements  {n}\n"));
                        }
                        s
                    })?;
                }
                None => {
                    let mut stdout = io::stdout().lock();
                    stdout.write_all(body.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
                    if let Some(n) = disagreements {
                        eprintln!("disagreements: {n}");
                    }
                }
            }
            if disagreements.is_some_and(|n| n > 0) {
                return Ok(EXIT_NUMERICAL);
            }
        }
        FamilyCommand::Classify { d, f, pj } => {
            let c = SymplecticCoords::new(f, pj, d)?;
            let out = ClassifyOut { d, f, pj, class: classify_symplectic(c).label(), projector_weights: c.projector_weights() };
            emit(json, &out, || format!("{}\n", out.class))?;
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// holevo

pub fn covariant_family(map: MapName, d: Option<usize>, dims: Option<(usize, usize)>) -> CliResult<CovariantFamily> {
    let single = |default: usize| -> CliResult<usize> {
        match (d, dims) {
            (Some(_), Some(_)) => Err(CliError::input("give --d or --dims, not both")),
            (Some(d), None) => Ok(d),
            (None, dims) => square(dims, default, map_label(map)),
        }
    };
    Ok(match map {
        MapName::Transpose => CovariantFamily::WernerT { d: single(2)? },
        MapName::Reduction => CovariantFamily::IsotropicR { d: single(3)? },
        MapName::BreuerHall => match single(4)? {
            4 => CovariantFamily::BreuerHall,
            other => return Err(CliError::input(format!("covariant Breuer–Hall channel is built for d = 4 only, got {other}"))),
        },
        MapName::IdTensorT => {
            if d.is_some() {
                return Err(CliError::input("id-tensor-t takes --dims dA,dB"));
            }
            let (da, db) = dims.unwrap_or((2, 2));
            CovariantFamily::IdTensorT { da, db }
        }
        other => return Err(CliError::input(format!("no covariant channel for {}", map_label(other)))),
    })
}

#[derive(Serialize)]
struct BuildOut {
    family: String,
    n: usize,
    elements: usize,
    seed: u64,
    sampling: &'static str,
    distance: f64,
    povm_residual: f64,
}

#[derive(Serialize)]
struct CheckOut {
    dims: [usize; 2],
    elements: usize,
    povm_residual: f64,
    povm_norm: f64,
    complete: bool,
}

/// POVM residual accepted as an exact completeness certificate.
const COMPLETE_TOL: f64 = 1e-8;

/// Upper bound on requested samples.
const MAX_SAMPLES: usize = 1 << 20;

pub fn holevo(cmd: HolevoCommand, seed: u64, json: bool) -> CliResult<i32> {
    match cmd {
        HolevoCommand::Build { map, d, dims, n, sampling, out } => {
            if n == 0 || n > MAX_SAMPLES {
                return Err(CliError::input(format!("n = {n} outside 1..={MAX_SAMPLES}")));
            }
            let fam = covariant_family(map, d, dims)?;
            let (s, sname) = match sampling {
                SamplingName::Orbit => (Sampling::Orbit, "orbit"),
                SamplingName::Iid => (Sampling::Iid, "iid"),
            };
            let ch = discretize_covariant(fam, n, seed, s)?;
            let summary = BuildOut {
                family: fam.name(),
                n,
                elements: ch.len(),
                seed,
                sampling: sname,
                distance: ch.choi().frobenius_distance(&fam.target_witness()?),
                povm_residual: ch.povm_residual(),
            };
            match out {
                Some(path) => {
                    write_output(&path, &holevo_to_json(&ch))?;
                    emit(json, &summary, || {
                        format!(
                            "family        {}\nelements      {}\ndistance      {:e}\npovm_residual {:e}\nwritten to    {}\n",
                            summary.family,
                            summary.elements,
                            summary.distance,
                            summary.povm_residual,
                            path.display()
                        )
                    })?;
                }
                None => print_raw(&holevo_to_json(&ch))?,
            }
        }
        HolevoCommand::Check { channel } => {
            let ch = parse_holevo(&read_input(&channel)?)?;
            let d = ch.dims();
            let out = CheckOut {
                dims: [d.a, d.b],
                elements: ch.len(),
                povm_residual: ch.povm_residual(),
                povm_norm: ch.povm_norm(),
                complete: ch.povm_residual() <= COMPLETE_TOL,
            };
            emit(json, &out, || {
                format!(
                    "elements      {}\npovm_residual {:e}\npovm_norm     {}\ncomplete      {}\n",
                    out.elements, out.povm_residual, out.povm_norm, out.complete
                )
            })?;
        }
    }
    Ok(EXIT_OK)
}
