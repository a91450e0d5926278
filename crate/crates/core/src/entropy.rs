//! Entropy functionals over block spectra and the closed-form expressions
//! that accompany them: large-block asymptotics, the supremum over mixed
//! global states, effective spin under vanishing densities, and finite-size
//! corrections.
//!
//! All entropies are in bits.

use std::f64::consts::{E, LN_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{log2_binom_unchecked, log2_factorials};
use crate::error::{Error, Result};
use crate::gaussian::{build_gaussian, gaussian_entropy};
use crate::spectrum::{neumaier_sum, validate_densities, SectorConfig, Spectrum};

/// Allowed deviation of a spectrum's total weight from one.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Below this value of `n * prod p_i` the asymptotic formula is flagged.
pub const ASYMPTOTIC_VALIDITY_THRESHOLD: f64 = 10.0;

pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

pub const DEFAULT_CENTRAL_CHARGE: f64 = 1.0;

/// `-sum w log2 w` over the spectrum's support.
pub fn entropy_of_spectrum(s: &Spectrum) -> Result<f64> {
    let total = s.total_weight() + s.dropped_mass();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Domain(format!(
            "spectrum is not normalized: total weight {total}"
        )));
    }
    // fixed chunking keeps the floating-point sum independent of scheduling
    let partials: Vec<f64> = s
        .entries()
        .par_chunks(4096)
        .map(|chunk| {
            neumaier_sum(chunk.iter().map(|e| {
                let lw = e.weight.log2();
                if e.weight.is_zero() {
                    0.0
                } else {
                    -lw * lw.exp2()
                }
            }))
        })
        .collect();
    Ok(neumaier_sum(partials).max(0.0))
}

/// Exact entropy of the `n`-site block without materializing the spectrum.
///
/// The composition distribution factorizes level by level (hypergeometric
/// for finite `L`, binomial in the thermodynamic limit), so the chain rule
/// gives the entropy in `O(d n^2)` time.
pub fn block_entropy(cfg: &SectorConfig, n: usize) -> Result<f64> {
    match cfg {
        SectorConfig::Finite { occupations } => {
            let l: usize = occupations.iter().sum();
            if n > l {
                return Err(Error::Domain(format!("n exceeds L: block size {n} with L = {l}")));
            }
            Ok(chain_entropy_finite(occupations, n))
        }
        SectorConfig::Infinite { densities } => Ok(chain_entropy_thermo(densities, n)),
    }
}

fn chain_entropy_finite(occ: &[usize], n: usize) -> f64 {
    let d = occ.len();
    let l: usize = occ.iter().sum();
    let lf = log2_factorials(l);
    // h[m]: entropy of levels i.. given m block sites remain for them
    let mut h = vec![0.0f64; n + 1];
    for i in (0..d - 1).rev() {
        let pop: usize = occ[i..].iter().sum();
        let own = occ[i];
        let others = pop - own;
        let level = |m: usize| -> f64 {
            if m > pop {
                return 0.0;
            }
            let norm = log2_binom_unchecked(&lf, pop, m);
            let lo = m.saturating_sub(others);
            let hi = own.min(m);
            neumaier_sum((lo..=hi).map(|k| {
                let lp = log2_binom_unchecked(&lf, own, k) + log2_binom_unchecked(&lf, others, m - k) - norm;
                lp.exp2() * (h[m - k] - lp)
            }))
        };
        h = if i == 0 {
            let mut top = vec![0.0; n + 1];
            top[n] = level(n);
            top
        } else {
            (0..=n).into_par_iter().map(level).collect()
        };
    }
    h[n].max(0.0)
}

fn chain_entropy_thermo(p: &[f64], n: usize) -> f64 {
    let d = p.len();
    let lf = log2_factorials(n);
    let mut h = vec![0.0f64; n + 1];
    for i in (0..d - 1).rev() {
        let tail: f64 = p[i..].iter().sum();
        let q = if tail > 0.0 { (p[i] / tail).min(1.0) } else { 0.0 };
        let next = h.clone();
        let level = |m: usize| -> f64 {
            if q == 0.0 {
                return next[m];
            }
            if q == 1.0 {
                return next[0];
            }
            let (lq, lr) = (q.log2(), (1.0 - q).log2());
            neumaier_sum((0..=m).map(|k| {
                let lp = log2_binom_unchecked(&lf, m, k) + k as f64 * lq + (m - k) as f64 * lr;
                lp.exp2() * (next[m - k] - lp)
            }))
        };
        h = if i == 0 {
            let mut top = vec![0.0; n + 1];
            top[n] = level(n);
            top
        } else {
            (0..=n).into_par_iter().map(level).collect()
        };
    }
    h[n].max(0.0)
}

/// `C = 1/2 log2(prod_i p_i)`; `None` when a density vanishes.
pub fn constant_c(densities: &[f64]) -> Option<f64> {
    if densities.iter().any(|&p| p <= 0.0) {
        return None;
    }
    Some(0.5 * densities.iter().map(|p| p.log2()).sum::<f64>())
}

/// Large-block entropy `C + sigma log2(2 pi e n (L - n) / L)`, with the last
/// factor replaced by `n` in the thermodynamic limit.
pub fn asymptotic_entropy(cfg: &SectorConfig, n: usize) -> Result<f64> {
    let c = constant_c(&cfg.densities()).ok_or_else(|| {
        Error::Domain(
            "asymptotic entropy needs all densities > 0; reduce vanishing levels with effective_spin".into(),
        )
    })?;
    let sigma = cfg.sigma();
    let effective_n = match cfg.size() {
        Some(l) => {
            if n == 0 || n >= l {
                return Err(Error::Domain(format!(
                    "asymptotic entropy needs 0 < n < L, got n = {n}, L = {l}"
                )));
            }
            n as f64 * (l - n) as f64 / l as f64
        }
        None => {
            if n == 0 {
                return Err(Error::Domain("asymptotic entropy needs n > 0".into()));
            }
            n as f64
        }
    };
    Ok(c + sigma * (2.0 * PI * E * effective_n).log2())
}

/// Whether `n * prod p_i` reaches [`ASYMPTOTIC_VALIDITY_THRESHOLD`].
pub fn asymptotic_within_validity(cfg: &SectorConfig, n: usize) -> bool {
    let prod: f64 = cfg.densities().iter().product();
    n as f64 * prod >= ASYMPTOTIC_VALIDITY_THRESHOLD
}

/// `log2 C(n + d - 1, d - 1)`, the entropy of a flat spectrum on the
/// symmetric subspace.
pub fn max_entropy_bound(n: usize, d: usize) -> f64 {
    assert!(d >= 2, "local dimension must be >= 2");
    let lf = log2_factorials(n + d);
    log2_binom_unchecked(&lf, n + d - 1, d - 1)
}

/// Spin reduction when some levels carry (numerically) zero density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveSpin {
    pub sigma: f64,
    pub sigma_eff: f64,
    pub vanished_levels: usize,
    pub reduced_densities: Vec<f64>,
}

pub fn effective_spin(densities: &[f64], zero_tol: f64) -> Result<EffectiveSpin> {
    validate_densities(densities)?;
    let reduced: Vec<f64> = densities.iter().copied().filter(|&p| p > zero_tol).collect();
    if reduced.is_empty() {
        return Err(Error::Domain(format!("all densities are below {zero_tol}")));
    }
    let z = densities.len() - reduced.len();
    let sigma = (densities.len() - 1) as f64 / 2.0;
    Ok(EffectiveSpin {
        sigma,
        sigma_eff: sigma - z as f64 / 2.0,
        vanished_levels: z,
        reduced_densities: reduced,
    })
}

/// Finite-size corrections of the block entropy for permutation-invariant
/// states and, for comparison, for a conformally critical chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionReport {
    #[serde(rename = "L")]
    pub l: usize,
    pub n: usize,
    pub sigma: f64,
    pub central_charge: f64,
    /// `sigma log2(1 - n/L)`.
    pub delta_per_bits: f64,
    /// `-sigma (n/L) / ln 2`.
    pub delta_per_leading_bits: f64,
    /// `(c/3) log2(1 - (pi n / L)^2 / 3)`; null where the argument is not
    /// positive (`n/L` above about 0.55).
    pub delta_cr_bits: Option<f64>,
    /// `-(c/9) (pi n / L)^2 / ln 2`.
    pub delta_cr_leading_bits: f64,
    /// `(c/3) log2((L / (pi n)) sin(pi n / L))`, the critical entropy
    /// `(c/3) log2((L/pi) sin(pi n/L))` minus `(c/3) log2 n`.
    pub delta_cr_sine_bits: f64,
}

pub fn finite_size_corrections(
    cfg: &SectorConfig,
    n: usize,
    central_charge: f64,
) -> Result<CorrectionReport> {
    let l = cfg
        .size()
        .ok_or_else(|| Error::Domain("finite-size corrections need a finite sector".into()))?;
    if n == 0 || n >= l {
        return Err(Error::Domain(format!(
            "finite-size corrections need 0 < n < L, got n = {n}, L = {l}"
        )));
    }
    Ok(corrections_at_ratio(l, n, cfg.sigma(), central_charge))
}

fn corrections_at_ratio(l: usize, n: usize, sigma: f64, c: f64) -> CorrectionReport {
    let x = n as f64 / l as f64;
    let y = PI * x;
    let cr_arg = 1.0 - y * y / 3.0;
    CorrectionReport {
        l,
        n,
        sigma,
        central_charge: c,
        delta_per_bits: sigma * (-x).ln_1p() / LN_2,
        delta_per_leading_bits: -sigma * x / LN_2,
        delta_cr_bits: (cr_arg > 0.0).then(|| c / 3.0 * (-y * y / 3.0).ln_1p() / LN_2),
        delta_cr_leading_bits: -(c / 9.0) * y * y / LN_2,
        delta_cr_sine_bits: c / 3.0 * (y.sin() / y).log2(),
    }
}

/// Least-squares slope of `S` against `log2 n`.
pub fn fit_prefactor(points: &[(usize, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::Domain(format!(
            "prefactor fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(n, _)| n < 2) {
        return Err(Error::Domain("prefactor fit needs every n >= 2".into()));
    }
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::Domain("prefactor fit needs strictly increasing n".into()));
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).log2()).collect();
    let x_mean = xs.iter().sum::<f64>() / m;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, &(_, y)) in xs.iter().zip(points) {
        sxy += (x - x_mean) * (y - y_mean);
        sxx += (x - x_mean) * (x - x_mean);
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub exact_bits: f64,
    pub asymptotic_bits: Option<f64>,
    /// False when `n * prod p_i` is below [`ASYMPTOTIC_VALIDITY_THRESHOLD`].
    pub asymptotic_within_validity: bool,
    pub gaussian_bits: Option<f64>,
    pub sup_bound_bits: f64,
    #[serde(rename = "constant_C_bits")]
    pub constant_c_bits: Option<f64>,
    pub prefactor_gamma: Option<f64>,
}

/// Gathers every entropy value available for one sector and block size.
/// The Gaussian value is only defined in the thermodynamic limit.
pub fn entropy_report(cfg: &SectorConfig, n: usize) -> Result<EntropyReport> {
    let exact_bits = block_entropy(cfg, n)?;
    let densities = cfg.densities();
    let asymptotic_bits = asymptotic_entropy(cfg, n).ok();
    let gaussian_bits = match cfg {
        SectorConfig::Infinite { densities } if n > 0 => {
            build_gaussian(densities, n).ok().map(|m| gaussian_entropy(&m))
        }
        _ => None,
    };
    Ok(EntropyReport {
        exact_bits,
        asymptotic_within_validity: asymptotic_bits.is_some() && asymptotic_within_validity(cfg, n),
        asymptotic_bits,
        gaussian_bits,
        sup_bound_bits: max_entropy_bound(n, cfg.d()),
        constant_c_bits: constant_c(&densities),
        prefactor_gamma: None,
    })
}
