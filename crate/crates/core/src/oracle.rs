//! Brute-force reference path.
//!
//! States are stored as dense real amplitude vectors over all `d^L` basis
//! strings, reduced density matrices are formed by explicit partial trace,
//! and eigenvalues come from a cyclic Jacobi solver. Nothing here evaluates
//! binomial or multinomial formulas: sectors and normalizations are found by
//! scanning basis strings. The amplitudes of symmetric states are real and
//! nonnegative, so no complex arithmetic is needed.
//!
//! Basis index convention: site 0 is the most significant base-`d` digit, and
//! the block is made of the first `n` sites, so `index = block * d^(L-n) + env`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::spectrum::{dimension_symmetric_subspace, exact_spectrum, SectorConfig, Spectrum};

/// Largest state vector the oracle will allocate.
pub const MAX_STATE_AMPLITUDES: usize = 2_000_000;
/// Largest matrix the oracle will diagonalize.
pub const MAX_MATRIX_DIM: usize = 2000;
/// Eigenvalues at or below this are treated as zero.
pub const EIGEN_TOL: f64 = 1e-12;
/// Tolerance for a spectrum match.
pub const MATCH_TOL: f64 = 1e-10;

fn checked_pow(d: usize, e: usize) -> Option<usize> {
    (0..e).try_fold(1usize, |acc, _| acc.checked_mul(d))
}

/// Real amplitudes on the `d^L` basis strings of `L` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    amplitudes: Vec<f64>,
    sites: usize,
    d: usize,
}

impl DenseState {
    pub fn new(amplitudes: Vec<f64>, sites: usize, d: usize) -> Result<Self> {
        let dim = checked_pow(d, sites)
            .filter(|&n| n <= MAX_STATE_AMPLITUDES)
            .ok_or_else(|| {
                Error::ResourceGuard(format!("{d}^{sites} amplitudes exceed {MAX_STATE_AMPLITUDES}"))
            })?;
        if amplitudes.len() != dim {
            return Err(Error::Domain(format!(
                "expected {dim} amplitudes for {sites} sites of dimension {d}, got {}",
                amplitudes.len()
            )));
        }
        Ok(DenseState { amplitudes, sites, d })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Base-`d` digits of a basis index, site 0 first.
    pub fn digits(&self, index: usize) -> Vec<usize> {
        index_digits(index, self.sites, self.d)
    }

    /// Basis index of a digit string.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &x| acc * self.d + x)
    }
}

fn index_digits(mut index: usize, sites: usize, d: usize) -> Vec<usize> {
    let mut digits = vec![0usize; sites];
    for slot in digits.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    digits
}

fn letter_counts(index: usize, sites: usize, d: usize) -> Vec<usize> {
    let mut counts = vec![0usize; d];
    for x in index_digits(index, sites, d) {
        counts[x] += 1;
    }
    counts
}

fn finite_occupations(cfg: &SectorConfig) -> Result<&[usize]> {
    match cfg {
        SectorConfig::Finite { occupations } => Ok(occupations),
        SectorConfig::Infinite { .. } => Err(Error::Domain("the dense oracle needs a finite sector".into())),
    }
}

/// Equal superposition of every basis string whose letter counts equal the
/// sector's occupations.
pub fn build_state(cfg: &SectorConfig) -> Result<DenseState> {
    let occ = finite_occupations(cfg)?;
    let (sites, d) = (occ.iter().sum::<usize>(), occ.len());
    let dim = checked_pow(d, sites)
        .filter(|&n| n <= MAX_STATE_AMPLITUDES)
        .ok_or_else(|| {
            Error::ResourceGuard(format!("{d}^{sites} amplitudes exceed {MAX_STATE_AMPLITUDES}"))
        })?;
    let members: Vec<usize> = (0..dim).filter(|&i| letter_counts(i, sites, d) == occ).collect();
    let amp = 1.0 / (members.len() as f64).sqrt();
    let mut amplitudes = vec![0.0; dim];
    for i in members {
        amplitudes[i] = amp;
    }
    DenseState::new(amplitudes, sites, d)
}

/// Dense symmetric matrix on the `d^n` basis strings of a block.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseDensityMatrix {
    entries: Vec<f64>,
    dim: usize,
    n: usize,
    d: usize,
}

impl DenseDensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block_size(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Convex combination `sum_j w_j rho_j` of matrices on the same block.
    pub fn mix(parts: &[(f64, DenseDensityMatrix)]) -> Result<DenseDensityMatrix> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::Domain("empty mixture".into()))?;
        let mut out = DenseDensityMatrix {
            entries: vec![0.0; first.entries.len()],
            ..*first
        };
        for (w, m) in parts {
            if m.dim != out.dim {
                return Err(Error::Domain("mixture of matrices with different sizes".into()));
            }
            for (o, x) in out.entries.iter_mut().zip(&m.entries) {
                *o += w * x;
            }
        }
        Ok(out)
    }
}

/// `rho[a, b] = sum_e psi[a e] psi[b e]` over environment strings `e` of the
/// last `L - n` sites.
pub fn partial_trace(state: &DenseState, n: usize) -> Result<DenseDensityMatrix> {
    if n > state.sites {
        return Err(Error::Domain(format!(
            "n exceeds L: block size {n} with L = {}",
            state.sites
        )));
    }
    let dim = checked_pow(state.d, n)
        .filter(|&m| m <= MAX_MATRIX_DIM)
        .ok_or_else(|| {
            Error::ResourceGuard(format!(
                "{}^{n} block dimension exceeds {MAX_MATRIX_DIM}",
                state.d
            ))
        })?;
    let env = state.amplitudes.len() / dim;
    let psi = &state.amplitudes;
    let mut entries = vec![0.0; dim * dim];
    for a in 0..dim {
        let row_a = &psi[a * env..(a + 1) * env];
        for b in 0..=a {
            let row_b = &psi[b * env..(b + 1) * env];
            let v: f64 = row_a.iter().zip(row_b).map(|(x, y)| x * y).sum();
            entries[a * dim + b] = v;
            entries[b * dim + a] = v;
        }
    }
    Ok(DenseDensityMatrix {
        entries,
        dim,
        n,
        d: state.d,
    })
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, in
/// descending order. Sweeps stop once the off-diagonal Frobenius norm drops
/// below `tol * max(|trace|, 1)`; the budget is
/// `100 dim^2` rotations.
pub fn jacobi_eigenvalues(mut a: Vec<f64>, dim: usize, tol: f64) -> Result<Vec<f64>> {
    assert_eq!(a.len(), dim * dim, "matrix storage does not match dimension");
    let trace: f64 = (0..dim).map(|i| a[i * dim + i]).sum();
    let target = tol * trace.abs().max(1.0);
    let budget = 100 * dim * dim;
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..dim {
            for j in 0..i {
                s += 2.0 * a[i * dim + j] * a[i * dim + j];
            }
        }
        s.sqrt()
    };
    let mut rotations = 0usize;
    let mut residual = off_norm(&a);
    while residual > target {
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[p * dim + q];
                if apq == 0.0 {
                    continue;
                }
                if rotations >= budget {
                    return Err(Error::NonConvergence { rotations, residual });
                }
                rotations += 1;
                let (app, aqq) = (a[p * dim + p], a[q * dim + q]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let (akp, akq) = (a[k * dim + p], a[k * dim + q]);
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let (apk, aqk) = (a[p * dim + k], a[q * dim + k]);
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
                a[p * dim + q] = 0.0;
                a[q * dim + p] = 0.0;
            }
        }
        residual = off_norm(&a);
    }
    let mut values: Vec<f64> = (0..dim).map(|i| a[i * dim + i]).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Eigenvalues of `rho` above `tol`, descending.
pub fn dense_eigenvalues(rho: &DenseDensityMatrix, tol: f64) -> Result<Vec<f64>> {
    let all = jacobi_eigenvalues(rho.entries.clone(), rho.dim, tol)?;
    Ok(all.into_iter().filter(|&v| v > tol).collect())
}

/// Nonzero block spectrum of a mixture `sum_j w_j |psi_j><psi_j|`.
///
/// Writing `rho = W W^T` with one column `sqrt(w_j) psi_j[., e]` per state and
/// environment string, the nonzero eigenvalues of `rho` equal those of the
/// Gram matrix `W^T W`; whichever of the two is smaller gets diagonalized.
pub fn mixture_block_eigenvalues(components: &[(f64, &DenseState)], n: usize, tol: f64) -> Result<Vec<f64>> {
    let Some((_, first)) = components.first() else {
        return Err(Error::Domain("empty mixture".into()));
    };
    let (sites, d) = (first.sites, first.d);
    if components.iter().any(|(_, s)| s.sites != sites || s.d != d) {
        return Err(Error::Domain(
            "mixture components live on different spaces".into(),
        ));
    }
    if n > sites {
        return Err(Error::Domain(format!(
            "n exceeds L: block size {n} with L = {sites}"
        )));
    }
    let rows = checked_pow(d, n).expect("bounded by the state size");
    let env = first.amplitudes.len() / rows;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (w, state) in components {
        let scale = w.sqrt();
        for e in 0..env {
            let col: Vec<f64> = (0..rows).map(|a| scale * state.amplitudes[a * env + e]).collect();
            if col.iter().any(|&x| x != 0.0) {
                columns.push(col);
            }
        }
    }
    let cols = columns.len();
    let dim = rows.min(cols);
    if dim > MAX_MATRIX_DIM {
        return Err(Error::ResourceGuard(format!(
            "reduced matrix of size {dim} exceeds {MAX_MATRIX_DIM}"
        )));
    }
    let mut m = vec![0.0; dim * dim];
    if rows <= cols {
        for col in &columns {
            for a in 0..rows {
                if col[a] == 0.0 {
                    continue;
                }
                for b in 0..rows {
                    m[a * rows + b] += col[a] * col[b];
                }
            }
        }
    } else {
        for i in 0..cols {
            for j in 0..=i {
                let v: f64 = columns[i].iter().zip(&columns[j]).map(|(x, y)| x * y).sum();
                m[i * cols + j] = v;
                m[j * cols + i] = v;
            }
        }
    }
    let all = jacobi_eigenvalues(m, dim, tol)?;
    Ok(all.into_iter().filter(|&v| v > tol).collect())
}

/// Outcome of comparing a formula spectrum with the dense one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub config: serde_json::Value,
    pub n: usize,
    pub max_abs_dev: f64,
    pub support_size_formula: usize,
    pub support_size_dense: usize,
    pub pass: bool,
}

/// Compares two descending spectra, padding the shorter with zeros.
pub fn compare_spectra(
    config: serde_json::Value,
    n: usize,
    formula: &[f64],
    dense: &[f64],
    tol: f64,
) -> MatchReport {
    let len = formula.len().max(dense.len());
    let max_abs_dev = (0..len)
        .map(|i| {
            let a = formula.get(i).copied().unwrap_or(0.0);
            let b = dense.get(i).copied().unwrap_or(0.0);
            (a - b).abs()
        })
        .fold(0.0f64, f64::max);
    MatchReport {
        config,
        n,
        max_abs_dev,
        support_size_formula: formula.len(),
        support_size_dense: dense.len(),
        pass: formula.len() == dense.len() && max_abs_dev < tol,
    }
}

fn sector_json(occ: &[usize]) -> serde_json::Value {
    json!({ "L": occ.iter().sum::<usize>(), "d": occ.len(), "occupations": occ })
}

/// Dense check of the block spectrum of one symmetric sector.
pub fn verify_theorem(cfg: &SectorConfig, n: usize, tol: f64) -> Result<MatchReport> {
    let formula = exact_spectrum(cfg, n)?;
    verify_theorem_against(cfg, &formula, tol)
}

/// Dense check of a caller-supplied spectrum for `cfg`.
pub fn verify_theorem_against(cfg: &SectorConfig, formula: &Spectrum, tol: f64) -> Result<MatchReport> {
    let occ = finite_occupations(cfg)?;
    let n = formula.block_size();
    let state = build_state(cfg)?;
    let dense = mixture_block_eigenvalues(&[(1.0, &state)], n, EIGEN_TOL)?;
    Ok(compare_spectra(
        sector_json(occ),
        n,
        &formula.sorted_weights_desc(),
        &dense,
        tol,
    ))
}

/// Dense check that the uniform mixture over all symmetric sectors of `L`
/// sites has a flat block spectrum of `kappa(n)` equal values.
pub fn verify_uniform_mixture(sites: usize, d: usize, n: usize, tol: f64) -> Result<MatchReport> {
    if d < 2 {
        return Err(Error::Domain(format!("local dimension must be >= 2, got {d}")));
    }
    let dim = checked_pow(d, sites)
        .filter(|&m| m <= MAX_STATE_AMPLITUDES)
        .ok_or_else(|| {
            Error::ResourceGuard(format!("{d}^{sites} amplitudes exceed {MAX_STATE_AMPLITUDES}"))
        })?;
    let mut sectors: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for i in 0..dim {
        sectors.entry(letter_counts(i, sites, d)).or_default().push(i);
    }
    let weight = 1.0 / sectors.len() as f64;
    let states = sectors
        .values()
        .map(|members| {
            let amp = 1.0 / (members.len() as f64).sqrt();
            let mut amplitudes = vec![0.0; dim];
            for &i in members {
                amplitudes[i] = amp;
            }
            DenseState::new(amplitudes, sites, d)
        })
        .collect::<Result<Vec<_>>>()?;
    let components: Vec<(f64, &DenseState)> = states.iter().map(|s| (weight, s)).collect();
    let dense = mixture_block_eigenvalues(&components, n, EIGEN_TOL)?;
    let kappa: usize = dimension_symmetric_subspace(n, d)
        .try_into()
        .map_err(|_| Error::ResourceGuard("symmetric dimension overflows".into()))?;
    let formula = vec![1.0 / kappa as f64; kappa];
    let config = json!({ "L": sites, "d": d, "mixture": "uniform" });
    Ok(compare_spectra(config, n, &formula, &dense, tol))
}
