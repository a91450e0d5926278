use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use permutent::SectorConfig;

use crate::error::CliError;

/// Tolerance on the sum of user-supplied densities.
pub const DENSITY_INPUT_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "permutent",
    version,
    about = "Entanglement spectra of permutation-invariant spin states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Block spectrum of one sector.
    Spectrum(SpectrumArgs),
    /// Exact, asymptotic, Gaussian and bound entropies of one block.
    Entropy(EntropyArgs),
    /// Entropies over a range of block sizes.
    Sweep(SweepArgs),
    /// Compare formula spectra against dense partial traces.
    Verify(VerifyArgs),
    /// Write the data and plots behind the entropy figures.
    Figures(FiguresArgs),
    /// Finite-size corrections of permutation-invariant and critical states.
    Corrections(CorrectionsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct SectorArgs {
    /// Number of sites, or `inf`.
    #[arg(long = "L", value_name = "L")]
    pub size: String,
    /// Local dimension `2 sigma + 1`.
    #[arg(long)]
    pub d: usize,
    /// Occupation per level, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "dens")]
    pub occ: Option<Vec<usize>>,
    /// Density per level, comma separated; fractions such as `1/3` are exact.
    #[arg(long, value_delimiter = ',')]
    pub dens: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub step: usize,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub sector: SectorArgs,
    #[arg(long)]
    pub n: usize,
    /// Attach exact rational weights (finite `L <= 300`).
    #[arg(long)]
    pub exact_rational: bool,
    /// Drop thermodynamic weights below this fraction of the largest.
    #[arg(long, default_value_t = 0.0)]
    pub cutoff: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub sector: SectorArgs,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub sector: SectorArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Sector grid as `d:maxL` pairs, or `none`.
    #[arg(long, value_delimiter = ',', default_value = "2:8,3:6")]
    pub grid: Vec<String>,
    /// Uniform-mixture grid as `d:maxL` pairs, or `none`.
    #[arg(long, value_delimiter = ',', default_value = "2:6,3:6")]
    pub mixture_grid: Vec<String>,
    /// Maximum absolute eigenvalue deviation accepted.
    #[arg(long, default_value_t = permutent::oracle::MATCH_TOL)]
    pub tol: f64,
    /// Perturb one formula weight by 1e-6 in the given sector case.
    #[arg(long, hide = true)]
    pub inject_fault: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    /// Directory receiving the CSV and SVG files.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct CorrectionsArgs {
    #[command(flatten)]
    pub sector: SectorArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    /// Central charge of the critical comparison.
    #[arg(long = "c", default_value_t = permutent::entropy::DEFAULT_CENTRAL_CHARGE)]
    pub central_charge: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Parses `1/3`, `0.25`, `1e-3` or `2` into an exact rational. Decimal input
/// is taken at its binary floating-point value.
pub fn parse_fraction(s: &str) -> Result<BigRational, CliError> {
    let s = s.trim();
    let bad = || CliError::Validation(format!("invalid density `{s}`"));
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let x = f64::from_str(s).map_err(|_| bad())?;
    BigRational::from_float(x).ok_or_else(bad)
}

impl SectorArgs {
    pub fn to_config(&self) -> Result<SectorConfig, CliError> {
        let invalid = |m: String| CliError::Validation(m);
        if self.d < 2 {
            return Err(invalid(format!("d must be >= 2, got {}", self.d)));
        }
        if self.size == "inf" {
            if self.occ.is_some() {
                return Err(invalid(
                    "--occ needs a finite --L; use --dens with --L inf".into(),
                ));
            }
            let dens = self
                .dens
                .as_ref()
                .ok_or_else(|| invalid("--L inf requires --dens".into()))?;
            if dens.len() != self.d {
                return Err(invalid(format!(
                    "--dens has {} values, expected d = {}",
                    dens.len(),
                    self.d
                )));
            }
            let exact = dens
                .iter()
                .map(|s| parse_fraction(s))
                .collect::<Result<Vec<_>, _>>()?;
            if exact.iter().any(|p| p.is_negative()) {
                return Err(invalid("densities must be nonnegative".into()));
            }
            let total: BigRational = exact.iter().fold(BigRational::zero(), |a, b| a + b);
            let residual = (&total - BigRational::one())
                .abs()
                .to_f64()
                .unwrap_or(f64::INFINITY);
            if residual > DENSITY_INPUT_TOL {
                return Err(invalid(format!(
                    "densities sum to {}, not 1",
                    total.to_f64().unwrap_or(f64::NAN)
                )));
            }
            let densities = exact
                .iter()
                .map(|p| (p / &total).to_f64().unwrap_or(f64::NAN))
                .collect();
            return SectorConfig::infinite(densities).map_err(CliError::from);
        }
        let l: usize = self.size.parse().map_err(|_| {
            invalid(format!(
                "--L must be a positive integer or `inf`, got `{}`",
                self.size
            ))
        })?;
        if self.dens.is_some() {
            return Err(invalid("--dens needs --L inf; use --occ for finite L".into()));
        }
        let occ = self
            .occ
            .clone()
            .ok_or_else(|| invalid("finite --L requires --occ".into()))?;
        if occ.len() != self.d {
            return Err(invalid(format!(
                "--occ has {} values, expected d = {}",
                occ.len(),
                self.d
            )));
        }
        let sum: usize = occ.iter().sum();
        if sum != l {
            return Err(invalid(format!("occupations sum to {sum}, not L = {l}")));
        }
        SectorConfig::finite(occ).map_err(CliError::from)
    }
}

/// Parses `d:maxL` pairs; a lone `none` yields an empty grid.
pub fn parse_grid(items: &[String]) -> Result<Vec<(usize, usize)>, CliError> {
    if items.len() == 1 && items[0] == "none" {
        return Ok(Vec::new());
    }
    items
        .iter()
        .map(|item| {
            let bad = || CliError::Validation(format!("grid entry `{item}` is not `d:maxL`"));
            let (d, l) = item.split_once(':').ok_or_else(bad)?;
            let d: usize = d.trim().parse().map_err(|_| bad())?;
            let l: usize = l.trim().parse().map_err(|_| bad())?;
            if d < 2 {
                return Err(CliError::Validation(format!("grid entry `{item}` has d < 2")));
            }
            Ok((d, l))
        })
        .collect()
}
