//! Block-size sweeps and their CSV tables.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{
    asymptotic_entropy, block_entropy, finite_size_corrections, max_entropy_bound, CorrectionReport,
};
use crate::error::{Error, Result};
use crate::spectrum::SectorConfig;

/// Header of the sweep table.
pub const SWEEP_COLUMNS: [&str; 8] = ["L", "d", "n", "sector", "S_exact", "S_asym", "S_sup", "gap"];

/// Header of the corrections table.
pub const CORRECTION_COLUMNS: [&str; 6] = [
    "n_over_L",
    "delta_per",
    "delta_per_leading",
    "delta_cr",
    "delta_cr_leading",
    "delta_cr_sine",
];

/// One block size of a sweep. `gap` is `S_exact - S_asym`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub s_exact: f64,
    pub s_asym: Option<f64>,
    pub s_sup: f64,
    pub gap: Option<f64>,
}

/// Inclusive block range with a positive step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRange {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

impl BlockRange {
    pub fn new(start: usize, end: usize, step: usize) -> Result<Self> {
        if step == 0 {
            return Err(Error::Domain("block range step must be positive".into()));
        }
        if start > end {
            return Err(Error::Domain(format!("empty block range {start}..={end}")));
        }
        Ok(BlockRange { start, end, step })
    }

    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.end).step_by(self.step).collect()
    }
}

/// Exact, asymptotic, and supremum entropies for each block size, computed
/// in parallel and returned in range order.
pub fn sweep(cfg: &SectorConfig, range: BlockRange) -> Result<Vec<SweepRow>> {
    if let Some(l) = cfg.size() {
        if range.end > l {
            return Err(Error::Domain(format!(
                "n exceeds L: block size {} with L = {l}",
                range.end
            )));
        }
    }
    range
        .values()
        .into_par_iter()
        .map(|n| {
            let s_exact = block_entropy(cfg, n)?;
            let s_asym = asymptotic_entropy(cfg, n).ok();
            Ok(SweepRow {
                n,
                s_exact,
                s_asym,
                s_sup: max_entropy_bound(n, cfg.d()),
                gap: s_asym.map(|a| s_exact - a),
            })
        })
        .collect()
}

/// `40;40;40` for occupations, `0.5;0.5` for densities.
pub fn sector_label(cfg: &SectorConfig) -> String {
    match cfg {
        SectorConfig::Finite { occupations } => join(occupations.iter().map(|x| x.to_string())),
        SectorConfig::Infinite { densities } => join(densities.iter().map(|x| x.to_string())),
    }
}

fn join<I: Iterator<Item = String>>(it: I) -> String {
    it.collect::<Vec<_>>().join(";")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(cfg: &SectorConfig, rows: &[SweepRow], out: W) -> Result<()> {
    write_sweeps_csv(&[(cfg, rows)], out)
}

/// Several sweeps in one table under a single header.
pub fn write_sweeps_csv<W: Write>(sweeps: &[(&SectorConfig, &[SweepRow])], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(SWEEP_COLUMNS).map_err(io)?;
    for (cfg, rows) in sweeps {
        let l = cfg.size().map(|l| l.to_string()).unwrap_or_else(|| "inf".into());
        let d = cfg.d().to_string();
        let sector = sector_label(cfg);
        for r in rows.iter() {
            w.write_record([
                l.clone(),
                d.clone(),
                r.n.to_string(),
                sector.clone(),
                r.s_exact.to_string(),
                opt(r.s_asym),
                r.s_sup.to_string(),
                opt(r.gap),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// Corrections for every block size in `range`, which must lie in `1..L`.
pub fn corrections_table(
    cfg: &SectorConfig,
    range: BlockRange,
    central_charge: f64,
) -> Result<Vec<CorrectionReport>> {
    range
        .values()
        .into_iter()
        .map(|n| finite_size_corrections(cfg, n, central_charge))
        .collect()
}

pub fn write_corrections_csv<W: Write>(rows: &[CorrectionReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CORRECTION_COLUMNS).map_err(io)?;
    for r in rows {
        w.write_record([
            (r.n as f64 / r.l as f64).to_string(),
            r.delta_per_bits.to_string(),
            r.delta_per_leading_bits.to_string(),
            opt(r.delta_cr_bits),
            r.delta_cr_leading_bits.to_string(),
            r.delta_cr_sine_bits.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_shape_is_symmetric_and_peaked() {
        let cfg = SectorConfig::finite(vec![40, 40, 40]).unwrap();
        let rows = sweep(&cfg, BlockRange::new(0, 120, 1).unwrap()).unwrap();
        assert_eq!(rows.len(), 121);
        for n in 0..=120 {
            assert!((rows[n].s_exact - rows[120 - n].s_exact).abs() < 1e-10);
        }
        let peak = rows
            .iter()
            .max_by(|a, b| a.s_exact.total_cmp(&b.s_exact))
            .unwrap();
        assert_eq!(peak.n, 60);
        assert_eq!(rows[0].s_exact, 0.0);
        assert!(rows[0].s_asym.is_none() && rows[0].gap.is_none());
    }

    #[test]
    fn curves_are_ordered_by_spin() {
        let mut prev: Option<Vec<SweepRow>> = None;
        for d in 2..=5 {
            let cfg = SectorConfig::finite(vec![120 / d; d]).unwrap();
            let rows = sweep(&cfg, BlockRange::new(1, 119, 1).unwrap()).unwrap();
            if let Some(p) = prev {
                assert!(rows.iter().zip(&p).all(|(a, b)| a.s_exact > b.s_exact));
            }
            prev = Some(rows);
        }
    }

    #[test]
    fn single_row_range() {
        let cfg = SectorConfig::finite(vec![3, 3]).unwrap();
        let rows = sweep(&cfg, BlockRange::new(0, 0, 1).unwrap()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].s_exact, 0.0);
        assert!(sweep(&cfg, BlockRange::new(0, 7, 1).unwrap()).is_err());
        assert!(BlockRange::new(3, 1, 1).is_err());
        assert!(BlockRange::new(0, 1, 0).is_err());
    }

    #[test]
    fn csv_layout() {
        let cfg = SectorConfig::finite(vec![2, 2]).unwrap();
        let rows = sweep(&cfg, BlockRange::new(0, 2, 1).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&cfg, &rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "L,d,n,sector,S_exact,S_asym,S_sup,gap");
        assert!(lines[1].starts_with("4,2,0,2;2,0,,"));
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn correction_ratio_grows_toward_small_blocks() {
        let cfg = SectorConfig::finite(vec![500, 500]).unwrap();
        let rows = corrections_table(&cfg, BlockRange::new(10, 200, 10).unwrap(), 1.0).unwrap();
        let ratios: Vec<f64> = rows
            .iter()
            .map(|r| r.delta_per_bits / r.delta_cr_bits.unwrap())
            .collect();
        assert!(ratios.windows(2).all(|w| w[0] > w[1]));
        // ratio * n/L tends to 9 sigma / (c pi^2)
        let limit = 9.0 * 0.5 / std::f64::consts::PI.powi(2);
        for r in &rows {
            let x = r.n as f64 / r.l as f64;
            let scaled = r.delta_per_bits / r.delta_cr_bits.unwrap() * x;
            assert!((scaled - limit).abs() < 0.1 * limit, "{scaled}");
        }
        let mut buf = Vec::new();
        write_corrections_csv(&rows, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("n_over_L,delta_per,"));
    }
}
