use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sepmod_core::net::DEFAULT_BUDGET;

/// Separation-modulus, diameter and Rayleigh-quotient tools for unitarily
/// invariant matrix norms.
///
/// Gauges are written `lp:<r>` (r >= 1 or `inf`) or `kyfan:<m>`. Reports are
/// JSON on stdout; diagnostics go to stderr. Exit status: 0 success, 1 a
/// check failed, 2 bad input, 3 numerical or budget failure.
#[derive(Debug, Parser)]
#[command(name = "sepmod", version, max_term_width = 100)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Output format; CSV flattens the JSON report into one row.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,

    /// Cap on enumerated net profiles.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,

    /// Sandwich search exponent: ‖e1‖ is looked for in [e^-n^D, e^n^D].
    #[arg(long = "big-d", alias = "bigD", global = true, default_value_t = 2)]
    pub big_d: u32,

    /// Also print errors as JSON on stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub json_errors: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Separation-modulus representative √n·‖Id‖·diam(B_E) and spectral-gap
    /// order n³·‖Id‖² of the unitary ideal over a gauge.
    Sep(SepArgs),
    /// ℓ_p diameter of the gauge's unit ball: 2·max over a net of the ℓ_q
    /// ball of dual-norm values, q the conjugate of p.
    Diam(DiamArgs),
    /// The monotone multiplicative-grid net of the ℓ_q ball.
    #[command(subcommand)]
    Net(NetCommand),
    /// Dual norm max{⟨a, y⟩ : ‖y‖ <= 1} by the ellipsoid method.
    Dual(DualArgs),
    /// Unitarily invariant norm of a matrix read from a file.
    Norm(NormArgs),
    /// Ky Fan separation regime: n when m < √n, m√n when m >= √n.
    Regime(RegimeArgs),
    /// Certificates for the Rayleigh quotient of det(I − AAᵀ)^p on the
    /// operator-norm ball.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Args, Serialize)]
pub struct SepArgs {
    #[arg(long)]
    pub gauge: String,
    #[arg(long)]
    pub n: usize,
    /// Diameter source.
    #[arg(long, value_enum, default_value_t = SepMode::Closed)]
    pub mode: SepMode,
    /// Tolerance of the algorithmic diameter.
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SepMode {
    Closed,
    Alg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccessKind {
    /// Norm values and exact subgradients.
    Exact,
    /// Norm values only; finite-difference subgradients.
    Evaluation,
    /// Weak membership queries only.
    Membership,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    Full,
    Dominance,
    Cover,
}

#[derive(Debug, Args, Serialize)]
pub struct DiamArgs {
    #[arg(long)]
    pub gauge: String,
    #[arg(long)]
    pub n: usize,
    /// Exponent p in [1, inf].
    #[arg(long, default_value = "2")]
    pub p: String,
    /// Relative tolerance in (0, 1/2].
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = Reduction::Dominance)]
    pub reduction: Reduction,
    #[arg(long, value_enum, default_value_t = AccessKind::Exact)]
    pub access: AccessKind,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "net")]
pub enum NetCommand {
    /// Enumerate the net and report its size against the size bound.
    Build(NetBuildArgs),
    /// Round random and adversarial points into the net; PASS iff every
    /// point moves by at most δ/2.
    Check(NetCheckArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct NetBuildArgs {
    #[arg(long)]
    pub n: usize,
    /// Exponent q in [1, inf].
    #[arg(long)]
    pub q: String,
    #[arg(long)]
    pub delta: f64,
    /// Only coordinatewise-maximal points.
    #[arg(long)]
    pub maximal: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct NetCheckArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub q: String,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DualArgs {
    #[arg(long)]
    pub gauge: String,
    /// Comma-separated functional a; its length sets n.
    #[arg(long, allow_hyphen_values = true)]
    pub vector: String,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = AccessKind::Exact)]
    pub access: AccessKind,
}

#[derive(Debug, Args, Serialize)]
pub struct NormArgs {
    #[arg(long)]
    pub gauge: String,
    /// Matrix file: `.csv` (dense rows) or `.json` ({"n", "entries"}).
    #[arg(long)]
    pub file: PathBuf,
    /// The JSON file holds {"re": {...}, "im": {...}}.
    #[arg(long)]
    pub complex: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct RegimeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "check")]
pub enum VerifyCommand {
    /// Exact closed forms, their consistency identity and (n <= 3) the
    /// quadrature twins; with --samples also the MANOVA estimate.
    Jacobi(JacobiArgs),
    /// Normaliser Z_n(p): Gamma-function product against quadrature.
    Selberg(NpArgs),
    /// Gradient formula against central differences on random matrices.
    Gradient(GradientArgs),
    /// The Rayleigh quotient pn²(4p+n)²/(2(2p−1)(4p+1)) by one method.
    Rayleigh(RayleighArgs),
    /// Monte Carlo volume of the 2×2 operator-norm ball.
    Volume(VolumeArgs),
    /// Exact identity between the expectations and the quotient for all
    /// n, p up to the given limits.
    Identity(IdentityArgs),
    /// Brute-force minimiser of the quotient over p in [1, 10n].
    PSelection(PSelectionArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct NpArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub p: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct JacobiArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub p: u32,
    /// MANOVA samples; 0 skips Monte Carlo.
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct GradientArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
    /// Largest accepted relative error.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RayleighMode {
    Closed,
    Quadrature,
    McJacobi,
    McMatrix,
}

#[derive(Debug, Args, Serialize)]
pub struct RayleighArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub p: u32,
    #[arg(long, value_enum, default_value_t = RayleighMode::Closed)]
    pub mode: RayleighMode,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct VolumeArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct IdentityArgs {
    #[arg(long, default_value_t = 50)]
    pub max_n: u32,
    #[arg(long, default_value_t = 50)]
    pub max_p: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct PSelectionArgs {
    #[arg(long)]
    pub n: u32,
}
