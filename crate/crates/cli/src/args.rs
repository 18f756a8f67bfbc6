//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "spa-lab", version, about = "Structural physical approximations of positive maps")]
pub struct Cli {
    /// Seed for every randomized routine.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recompute every reference value and compare against the tolerance manifest.
    Reproduce(ReproduceArgs),
    #[command(subcommand)]
    Spa(SpaCommand),
    #[command(subcommand)]
    Sep(SepCommand),
    #[command(subcommand)]
    Family(FamilyCommand),
    #[command(subcommand)]
    Holevo(HolevoCommand),
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Directory for `report.json` and `report.txt`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Alternative tolerance manifest (TOML).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapName {
    Transpose,
    Reduction,
    Choi,
    BreuerHall,
    UpbTiles,
    UpbPyramid,
    IdTensorT,
    QGamma,
}

#[derive(Debug, Args)]
pub struct WitnessSource {
    /// Named map from the catalog (`q-gamma` needs `--q`).
    #[arg(long, value_enum, conflicts_with = "witness")]
    pub map: Option<MapName>,
    /// Local dimensions `dA,dB` (for `id-tensor-t`, the dims of the extended system).
    #[arg(long, value_parser = parse_dims)]
    pub dims: Option<(usize, usize)>,
    /// Witness as matrix JSON.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    /// Positive `Q` as matrix JSON; the witness is `Q^Γ/tr Q`.
    #[arg(long, conflicts_with = "witness")]
    pub q: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SpaCommand {
    /// Critical noise level `p*` of a witness.
    Critical(WitnessSource),
    /// Witness mixed with white noise at a given `p`, as matrix JSON.
    Mix {
        #[command(flatten)]
        source: WitnessSource,
        #[arg(long)]
        p: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CaseName {
    Choi,
    Circle,
    Rank2,
    Rank4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SepMode {
    /// PPT test, exact oracle in 2⊗2 and 2⊗3, product-state search otherwise.
    Auto,
    Ppt,
    Oracle,
    Search,
}

#[derive(Debug, Subcommand)]
pub enum SepCommand {
    /// Separability verdict for a state.
    Check {
        /// State as matrix JSON (`-` reads stdin).
        #[arg(long, conflicts_with = "identity")]
        input: Option<PathBuf>,
        /// Use the maximally mixed state on `dA,dB`.
        #[arg(long, value_parser = parse_dims)]
        identity: Option<(usize, usize)>,
        #[arg(long, value_enum, default_value_t = SepMode::Auto)]
        mode: SepMode,
        #[arg(long, default_value_t = 400)]
        max_iter: usize,
    },
    /// Explicit decomposition of a worked example.
    Decompose {
        #[arg(long, value_enum)]
        case: CaseName,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Symplectic,
    Werner,
    Isotropic,
}

#[derive(Debug, Subcommand)]
pub enum FamilyCommand {
    /// CSV sweep over a family's parameter space.
    Sweep {
        #[arg(long, value_enum)]
        family: FamilyName,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 41)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also classify every point with matrices and report disagreements on stderr.
        #[arg(long)]
        verify: bool,
    },
    /// Region of one point `(⟨F⟩, ⟨P₊ᴶ⟩)`.
    Classify {
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        f: f64,
        #[arg(long, allow_hyphen_values = true)]
        pj: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SamplingName {
    Orbit,
    Iid,
}

#[derive(Debug, Subcommand)]
pub enum HolevoCommand {
    /// Discretized measure-and-prepare form of a critical SPA.
    Build {
        #[arg(long, value_enum)]
        map: MapName,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, value_parser = parse_dims)]
        dims: Option<(usize, usize)>,
        #[arg(long, default_value_t = 8192)]
        n: usize,
        #[arg(long, value_enum, default_value_t = SamplingName::Orbit)]
        sampling: SamplingName,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Completeness and normalization of a channel file.
    Check {
        #[arg(long)]
        channel: PathBuf,
    },
}

/// `"a,b"` with both entries in `1..=64`.
pub fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `dA,dB`, got `{s}`"))?;
    let parse = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad dimension `{x}`: {e}"))
            .and_then(|d| if (1..=64).contains(&d) { Ok(d) } else { Err(format!("dimension {d} outside 1..=64")) })
    };
    Ok((parse(a)?, parse(b)?))
}
