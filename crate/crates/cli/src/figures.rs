use std::fs;
use std::path::Path;

use permutent::sweep::{
    corrections_table, sweep, write_corrections_csv, write_sweeps_csv, BlockRange, SweepRow,
};
use permutent::SectorConfig;

use crate::commands::{corrections_figure, sweep_figure};
use crate::error::CliError;

/// Block sizes shown for the thermodynamic curve of the first figure.
const INFINITE_N_MAX: usize = 240;

fn equal_sector(l: usize, d: usize) -> Result<SectorConfig, CliError> {
    Ok(SectorConfig::finite(vec![l / d; d])?)
}

fn write_figure(
    dir: &Path,
    stem: &str,
    title: &str,
    curves: &[(String, SectorConfig, Vec<SweepRow>)],
) -> Result<(), CliError> {
    let tables: Vec<(&SectorConfig, &[SweepRow])> =
        curves.iter().map(|(_, c, r)| (c, r.as_slice())).collect();
    let mut csv = Vec::new();
    write_sweeps_csv(&tables, &mut csv)?;
    fs::write(dir.join(format!("{stem}.csv")), csv)?;
    let labelled: Vec<(String, &[SweepRow])> =
        curves.iter().map(|(l, _, r)| (l.clone(), r.as_slice())).collect();
    fs::write(
        dir.join(format!("{stem}.svg")),
        sweep_figure(title, &labelled).to_svg(),
    )?;
    Ok(())
}

/// Spin 1 at equal densities for `L = 30, 60, 120, 240` and the
/// thermodynamic limit.
fn entropy_vs_size(dir: &Path) -> Result<(), CliError> {
    let mut curves = Vec::new();
    for l in [30, 60, 120, 240] {
        let cfg = equal_sector(l, 3)?;
        let rows = sweep(&cfg, BlockRange::new(0, l, 1)?)?;
        curves.push((format!("L = {l}"), cfg, rows));
    }
    let cfg = SectorConfig::infinite(vec![1.0 / 3.0; 3])?;
    let rows = sweep(&cfg, BlockRange::new(0, INFINITE_N_MAX, 1)?)?;
    curves.push(("L = inf".to_string(), cfg, rows));
    write_figure(dir, "fig1_entropy_spin1", "Spin 1, equal densities", &curves)
}

/// `L = 120` at equal densities for spins 1/2 through 2.
fn entropy_vs_spin(dir: &Path) -> Result<(), CliError> {
    let mut curves = Vec::new();
    for d in 2..=5 {
        let cfg = equal_sector(120, d)?;
        let rows = sweep(&cfg, BlockRange::new(0, 120, 1)?)?;
        curves.push((format!("d = {d}"), cfg, rows));
    }
    write_figure(dir, "fig2_entropy_spins", "L = 120, equal densities", &curves)
}

fn corrections(dir: &Path) -> Result<(), CliError> {
    let cfg = SectorConfig::finite(vec![500, 500])?;
    let rows = corrections_table(&cfg, BlockRange::new(10, 200, 10)?, 1.0)?;
    let mut csv = Vec::new();
    write_corrections_csv(&rows, &mut csv)?;
    fs::write(dir.join("corrections.csv"), csv)?;
    fs::write(dir.join("corrections.svg"), corrections_figure(&rows).to_svg())?;
    Ok(())
}

pub fn cmd_figures(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    entropy_vs_size(dir)?;
    entropy_vs_spin(dir)?;
    corrections(dir)?;
    eprintln!("figures written to {}", dir.display());
    Ok(())
}
