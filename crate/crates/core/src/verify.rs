//! Grids of oracle checks.

use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::BoundedCompositions;
use crate::error::{Error, Result};
use crate::oracle::{verify_theorem_against, verify_uniform_mixture, MatchReport};
use crate::spectrum::{exact_spectrum, SectorConfig};

/// Largest `d^L` admitted in a verification grid. Every case of a grid is
/// diagonalized densely, so this is far below the per-state oracle limit.
pub const MAX_GRID_AMPLITUDES: usize = 1 << 14;

/// `(d, max L)` pairs for sector checks and for uniform-mixture checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyGrid {
    pub theorem: Vec<(usize, usize)>,
    pub mixture: Vec<(usize, usize)>,
}

impl Default for VerifyGrid {
    fn default() -> Self {
        VerifyGrid {
            theorem: vec![(2, 8), (3, 6)],
            mixture: vec![(2, 6), (3, 6)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerifyCase {
    Theorem { occupations: Vec<usize>, n: usize },
    Mixture { sites: usize, d: usize, n: usize },
}

impl VerifyGrid {
    /// Refuses grids whose largest system exceeds [`MAX_GRID_AMPLITUDES`].
    pub fn check_resources(&self) -> Result<()> {
        for &(d, max_l) in self.theorem.iter().chain(&self.mixture) {
            let size = u32::try_from(max_l).ok().and_then(|l| d.checked_pow(l));
            if size.is_none_or(|s| s > MAX_GRID_AMPLITUDES) {
                return Err(Error::ResourceGuard(format!(
                    "grid entry d = {d}, L = {max_l} exceeds {MAX_GRID_AMPLITUDES} amplitudes"
                )));
            }
        }
        Ok(())
    }

    pub fn theorem_case_count(&self) -> usize {
        self.cases()
            .iter()
            .filter(|c| matches!(c, VerifyCase::Theorem { .. }))
            .count()
    }

    /// Every sector with `1 <= L <= max L`, every block size.
    pub fn cases(&self) -> Vec<VerifyCase> {
        let mut out = Vec::new();
        for &(d, max_l) in &self.theorem {
            for l in 1..=max_l {
                for occupations in BoundedCompositions::new(l, &vec![l; d]) {
                    for n in 0..=l {
                        out.push(VerifyCase::Theorem {
                            occupations: occupations.clone(),
                            n,
                        });
                    }
                }
            }
        }
        for &(d, max_l) in &self.mixture {
            for sites in 1..=max_l {
                for n in 0..=sites {
                    out.push(VerifyCase::Mixture { sites, d, n });
                }
            }
        }
        out
    }
}

/// Perturbs one weight of one sector case before comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultInjection {
    pub case: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationSummary {
    pub cases: usize,
    pub passed: usize,
    pub max_abs_dev: f64,
    pub failures: Vec<MatchReport>,
    #[serde(skip)]
    pub reports: Vec<MatchReport>,
}

impl VerificationSummary {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_case(case: &VerifyCase, tol: f64, delta: Option<f64>) -> Result<MatchReport> {
    match case {
        VerifyCase::Theorem { occupations, n } => {
            let cfg = SectorConfig::Finite {
                occupations: occupations.clone(),
            };
            let mut formula = exact_spectrum(&cfg, *n)?;
            if let Some(delta) = delta {
                formula.perturb_weight(0, delta);
            }
            verify_theorem_against(&cfg, &formula, tol)
        }
        VerifyCase::Mixture { sites, d, n } => verify_uniform_mixture(*sites, *d, *n, tol),
    }
}

/// Runs every case in parallel; reports keep grid order.
pub fn run_verification(
    grid: &VerifyGrid,
    tol: f64,
    fault: Option<FaultInjection>,
) -> Result<VerificationSummary> {
    grid.check_resources()?;
    let cases = grid.cases();
    let reports: Vec<MatchReport> = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| run_case(c, tol, fault.filter(|f| f.case == i).map(|f| f.delta)))
        .collect::<Result<_>>()?;
    let failures: Vec<MatchReport> = reports.iter().filter(|r| !r.pass).cloned().collect();
    Ok(VerificationSummary {
        cases: reports.len(),
        passed: reports.len() - failures.len(),
        max_abs_dev: reports.iter().map(|r| r.max_abs_dev).fold(0.0, f64::max),
        failures,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::MATCH_TOL;

    #[test]
    fn small_grid_passes() {
        let grid = VerifyGrid {
            theorem: vec![(2, 4), (3, 3)],
            mixture: vec![(2, 3)],
        };
        let summary = run_verification(&grid, MATCH_TOL, None).unwrap();
        assert!(summary.all_pass(), "{:?}", summary.failures);
        assert_eq!(summary.cases, grid.cases().len());
    }

    #[test]
    fn injected_fault_is_reported() {
        let grid = VerifyGrid {
            theorem: vec![(2, 3)],
            mixture: vec![],
        };
        let cases = grid.cases();
        let target = cases.len() / 2;
        let summary = run_verification(
            &grid,
            MATCH_TOL,
            Some(FaultInjection {
                case: target,
                delta: 1e-6,
            }),
        )
        .unwrap();
        assert_eq!(summary.failures.len(), 1);
        let VerifyCase::Theorem { occupations, n } = &cases[target] else {
            unreachable!()
        };
        assert_eq!(summary.failures[0].n, *n);
        assert_eq!(
            summary.failures[0].config["occupations"],
            serde_json::json!(occupations)
        );
    }

    #[test]
    fn oversized_grid_is_refused_up_front() {
        let grid = VerifyGrid {
            theorem: vec![(2, 40)],
            mixture: vec![],
        };
        assert!(matches!(
            run_verification(&grid, MATCH_TOL, None),
            Err(Error::ResourceGuard(_))
        ));
        let grid = VerifyGrid {
            theorem: vec![],
            mixture: vec![(5, 7)],
        };
        assert!(matches!(
            run_verification(&grid, MATCH_TOL, None),
            Err(Error::ResourceGuard(_))
        ));
    }

    #[test]
    fn empty_grid() {
        let grid = VerifyGrid {
            theorem: vec![],
            mixture: vec![],
        };
        let summary = run_verification(&grid, MATCH_TOL, None).unwrap();
        assert_eq!(summary.cases, 0);
        assert!(summary.all_pass());
    }
}
