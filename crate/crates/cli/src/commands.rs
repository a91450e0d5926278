use std::fs;
use std::io::Write;
use std::path::Path;

use permutent::entropy::entropy_report;
use permutent::plot::{Figure, SeriesKind};
use permutent::spectrum::{exact_spectrum, exact_spectrum_rational, thermo_spectrum};
use permutent::sweep::{
    corrections_table, sector_label, sweep, write_corrections_csv, write_sweep_csv, BlockRange, SweepRow,
};
use permutent::verify::{run_verification, FaultInjection, VerifyCase, VerifyGrid};
use permutent::{CorrectionReport, SectorConfig, Spectrum};
use serde_json::json;

use crate::args::{
    parse_grid, CorrectionsArgs, EntropyArgs, Format, OutputArgs, RangeArgs, SpectrumArgs, SweepArgs,
    VerifyArgs,
};
use crate::error::CliError;

const FAULT_DELTA: f64 = 1e-6;

/// Writes `bytes` to the output path, or to stdout.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn format_or(out: &OutputArgs, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
    let f = out.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(CliError::Validation(format!(
            "format {f:?} is not available for this command"
        )));
    }
    Ok(f)
}

fn to_json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

pub fn spectrum_csv(s: &Spectrum) -> Result<Vec<u8>, CliError> {
    let doc = s.to_document();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["composition", "log2_weight", "weight"])?;
    for e in &doc.entries {
        let comp: Vec<String> = e.composition.iter().map(|k| k.to_string()).collect();
        w.write_record([
            comp.join(";"),
            e.log2_weight.to_string(),
            e.weight.clone().unwrap_or_default(),
        ])?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn cmd_spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let cfg = a.sector.to_config()?;
    let format = format_or(&a.out, Format::Json, &[Format::Json, Format::Csv])?;
    let spectrum = match &cfg {
        SectorConfig::Finite { .. } if a.exact_rational => exact_spectrum_rational(&cfg, a.n)?,
        SectorConfig::Finite { .. } => exact_spectrum(&cfg, a.n)?,
        SectorConfig::Infinite { .. } if a.exact_rational => {
            return Err(CliError::Validation("--exact-rational needs a finite --L".into()))
        }
        SectorConfig::Infinite { densities } => thermo_spectrum(densities, a.n, a.cutoff)?,
    };
    let bytes = match format {
        Format::Csv => spectrum_csv(&spectrum)?,
        _ => to_json_bytes(&spectrum.to_document())?,
    };
    emit(a.out.output.as_deref(), &bytes)?;
    let w = spectrum.weights();
    let min = w.iter().copied().fold(f64::INFINITY, f64::min);
    let max = w.iter().copied().fold(0.0, f64::max);
    let residual = spectrum.total_weight() + spectrum.dropped_mass() - 1.0;
    eprintln!(
        "support size {}, min weight {min:e}, max weight {max:e}, normalization residual {residual:e}",
        spectrum.len()
    );
    Ok(())
}

pub fn cmd_entropy(a: &EntropyArgs) -> Result<(), CliError> {
    let cfg = a.sector.to_config()?;
    let format = format_or(&a.out, Format::Json, &[Format::Json, Format::Csv])?;
    let report = entropy_report(&cfg, a.n)?;
    let bytes = match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(&report)?;
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))?
        }
        _ => to_json_bytes(&report)?,
    };
    emit(a.out.output.as_deref(), &bytes)
}

fn block_range(
    cfg: &SectorConfig,
    r: &RangeArgs,
    default_min: usize,
    default_max: Option<usize>,
) -> Result<BlockRange, CliError> {
    let end = r
        .n_max
        .or(default_max)
        .ok_or_else(|| CliError::Validation("--n-max is required when --L inf".into()))?;
    if let Some(l) = cfg.size() {
        if end > l {
            return Err(CliError::Validation(format!(
                "n exceeds L: --n-max {end} with L = {l}"
            )));
        }
    }
    Ok(BlockRange::new(r.n_min.unwrap_or(default_min), end, r.step)?)
}

pub fn sweep_json(cfg: &SectorConfig, rows: &[SweepRow]) -> serde_json::Value {
    let l = cfg.size().map(|l| json!(l)).unwrap_or_else(|| json!("inf"));
    let mut header = json!({ "L": l, "d": cfg.d() });
    match cfg {
        SectorConfig::Finite { occupations } => header["occupations"] = json!(occupations),
        SectorConfig::Infinite { densities } => header["densities"] = json!(densities),
    }
    json!({ "header": header, "rows": rows })
}

pub fn sweep_figure(title: &str, curves: &[(String, &[SweepRow])]) -> Figure {
    let mut fig = Figure::new(title, "n", "S (bits)");
    for (i, (label, rows)) in curves.iter().enumerate() {
        let exact = rows.iter().map(|r| (r.n as f64, r.s_exact)).collect();
        let asym = rows
            .iter()
            .filter_map(|r| r.s_asym.map(|a| (r.n as f64, a)))
            .collect();
        fig.push(&format!("{label} exact"), SeriesKind::Points, i, exact);
        fig.push(&format!("{label} asymptotic"), SeriesKind::Line, i, asym);
    }
    fig
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let cfg = a.sector.to_config()?;
    let format = format_or(&a.out, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let range = block_range(&cfg, &a.range, 0, cfg.size())?;
    let rows = sweep(&cfg, range)?;
    let bytes = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_sweep_csv(&cfg, &rows, &mut buf)?;
            buf
        }
        Format::Json => to_json_bytes(&sweep_json(&cfg, &rows))?,
        Format::Svg => {
            let l = cfg.size().map(|l| l.to_string()).unwrap_or_else(|| "inf".into());
            let title = format!("L = {l}, d = {}, sector {}", cfg.d(), sector_label(&cfg));
            sweep_figure(&title, &[(format!("L = {l}"), &rows)])
                .to_svg()
                .into_bytes()
        }
    };
    emit(a.out.output.as_deref(), &bytes)
}

pub fn corrections_figure(rows: &[CorrectionReport]) -> Figure {
    let x = |r: &CorrectionReport| r.n as f64 / r.l as f64;
    let mut fig = Figure::new("Finite-size corrections", "n/L", "correction (bits)");
    fig.push(
        "per",
        SeriesKind::Points,
        0,
        rows.iter().map(|r| (x(r), r.delta_per_bits)).collect(),
    );
    fig.push(
        "per leading",
        SeriesKind::Line,
        0,
        rows.iter().map(|r| (x(r), r.delta_per_leading_bits)).collect(),
    );
    fig.push(
        "cr",
        SeriesKind::Points,
        1,
        rows.iter()
            .filter_map(|r| r.delta_cr_bits.map(|v| (x(r), v)))
            .collect(),
    );
    fig.push(
        "cr leading",
        SeriesKind::Line,
        1,
        rows.iter().map(|r| (x(r), r.delta_cr_leading_bits)).collect(),
    );
    fig
}

pub fn cmd_corrections(a: &CorrectionsArgs) -> Result<(), CliError> {
    let cfg = a.sector.to_config()?;
    let l = cfg
        .size()
        .ok_or_else(|| CliError::Validation("corrections need a finite --L".into()))?;
    let format = format_or(&a.out, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let range = block_range(&cfg, &a.range, 1, Some((l / 5).max(1)))?;
    let rows = corrections_table(&cfg, range, a.central_charge)?;
    let bytes = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_corrections_csv(&rows, &mut buf)?;
            buf
        }
        Format::Json => to_json_bytes(&rows)?,
        Format::Svg => corrections_figure(&rows).to_svg().into_bytes(),
    };
    emit(a.out.output.as_deref(), &bytes)
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<(), CliError> {
    let grid = VerifyGrid {
        theorem: parse_grid(&a.grid)?,
        mixture: parse_grid(&a.mixture_grid)?,
    };
    let cases = grid.cases();
    if cases.is_empty() {
        eprintln!("warning: verification grid is empty, nothing to check");
    }
    let fault = match a.inject_fault {
        Some(i) if !matches!(cases.get(i), Some(VerifyCase::Theorem { .. })) => {
            return Err(CliError::Validation(format!(
                "fault case {i} is not a sector case"
            )))
        }
        Some(i) => Some(FaultInjection {
            case: i,
            delta: FAULT_DELTA,
        }),
        None => None,
    };
    let summary = run_verification(&grid, a.tol, fault)?;
    emit(a.output.as_deref(), &to_json_bytes(&summary)?)?;
    eprintln!(
        "{} of {} cases pass, max deviation {:e}",
        summary.passed, summary.cases, summary.max_abs_dev
    );
    if summary.all_pass() {
        return Ok(());
    }
    for f in &summary.failures {
        eprintln!(
            "mismatch: config {} n {} deviation {:e}",
            f.config, f.n, f.max_abs_dev
        );
    }
    Err(CliError::Mismatch(format!(
        "{} case(s) failed",
        summary.failures.len()
    )))
}
