//! Reduced-density-matrix spectra of an `n`-site block.
//!
//! For a permutation-invariant pure state with occupations `N_0..N_{d-1}` on
//! `L` sites, the eigenvalues of the block's reduced density matrix are
//! labelled by bounded compositions `k` of `n` and equal the multivariate
//! hypergeometric weights `prod_i C(N_i, k_i) / C(L, n)`. As `L` grows at
//! fixed densities these become multinomial weights, and for the uniform
//! mixture over all sectors the spectrum is flat.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    binom_big, binom_row, composition_count, for_each_weighted, log2_binom_unchecked, log2_factorials,
    BoundedCompositions, LogWeight,
};
use crate::error::{Error, Result};

/// Largest system size for which exact rational weights are produced.
pub const MAX_EXACT_RATIONAL_L: usize = 300;

/// Largest number of spectrum entries materialized at once.
pub const MAX_SPECTRUM_SUPPORT: usize = 5_000_000;

/// Tolerance on `sum p_i = 1` for thermodynamic sectors.
pub const DENSITY_SUM_TOL: f64 = 1e-12;

/// A symmetric sector: either `L` sites with fixed occupations per level, or
/// the thermodynamic limit with fixed level densities.
#[derive(Debug, Clone, PartialEq)]
pub enum SectorConfig {
    Finite { occupations: Vec<usize> },
    Infinite { densities: Vec<f64> },
}

impl SectorConfig {
    pub fn finite(occupations: Vec<usize>) -> Result<Self> {
        if occupations.len() < 2 {
            return Err(Error::Domain(format!(
                "local dimension must be >= 2, got {}",
                occupations.len()
            )));
        }
        if occupations.iter().sum::<usize>() == 0 {
            return Err(Error::Domain("system size L must be positive".into()));
        }
        Ok(SectorConfig::Finite { occupations })
    }

    pub fn infinite(densities: Vec<f64>) -> Result<Self> {
        validate_densities(&densities)?;
        Ok(SectorConfig::Infinite { densities })
    }

    /// Local dimension `d = 2 sigma + 1`.
    pub fn d(&self) -> usize {
        match self {
            SectorConfig::Finite { occupations } => occupations.len(),
            SectorConfig::Infinite { densities } => densities.len(),
        }
    }

    pub fn sigma(&self) -> f64 {
        (self.d() - 1) as f64 / 2.0
    }

    /// `Some(L)` for finite sectors.
    pub fn size(&self) -> Option<usize> {
        match self {
            SectorConfig::Finite { occupations } => Some(occupations.iter().sum()),
            SectorConfig::Infinite { .. } => None,
        }
    }

    /// Level densities, `N_i / L` for finite sectors.
    pub fn densities(&self) -> Vec<f64> {
        match self {
            SectorConfig::Finite { occupations } => {
                let l = occupations.iter().sum::<usize>() as f64;
                occupations.iter().map(|&n| n as f64 / l).collect()
            }
            SectorConfig::Infinite { densities } => densities.clone(),
        }
    }
}

pub(crate) fn validate_densities(densities: &[f64]) -> Result<()> {
    if densities.len() < 2 {
        return Err(Error::Domain(format!(
            "local dimension must be >= 2, got {}",
            densities.len()
        )));
    }
    if let Some(p) = densities.iter().find(|p| !(**p >= 0.0 && **p <= 1.0)) {
        return Err(Error::Domain(format!("density {p} outside [0, 1]")));
    }
    let sum: f64 = densities.iter().sum();
    if (sum - 1.0).abs() > DENSITY_SUM_TOL {
        return Err(Error::Domain(format!("densities sum to {sum}, expected 1")));
    }
    Ok(())
}

/// Block occupation vector `k_0..k_{d-1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Composition(Vec<usize>);

impl Composition {
    pub fn new(parts: Vec<usize>) -> Self {
        Composition(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    FiniteExact,
    Thermodynamic,
    UniformMixed,
}

#[derive(Debug, Clone)]
pub struct SpectrumEntry {
    pub composition: Composition,
    pub weight: LogWeight,
    /// Numerator over [`Spectrum::exact_denominator`], when exact weights
    /// were requested.
    pub exact_numerator: Option<BigUint>,
}

/// Eigenvalues of a block's reduced density matrix, one per composition.
#[derive(Debug, Clone)]
pub struct Spectrum {
    entries: Vec<SpectrumEntry>,
    block_size: usize,
    d: usize,
    source: SpectrumSource,
    sector: Option<SectorConfig>,
    exact_denominator: Option<BigUint>,
    dropped_mass: f64,
}

impl Spectrum {
    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    pub fn sector(&self) -> Option<&SectorConfig> {
        self.sector.as_ref()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Weight removed by a thermodynamic cutoff; zero otherwise.
    pub fn dropped_mass(&self) -> f64 {
        self.dropped_mass
    }

    pub fn exact_denominator(&self) -> Option<&BigUint> {
        self.exact_denominator.as_ref()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.weight.value()).collect()
    }

    /// Sum of weights in floating point (compensated).
    pub fn total_weight(&self) -> f64 {
        neumaier_sum(self.entries.iter().map(|e| e.weight.value()))
    }

    /// Reduced rational weight of one entry.
    pub fn exact_weight(&self, index: usize) -> Option<BigRational> {
        let den = self.exact_denominator.as_ref()?;
        let num = self.entries[index].exact_numerator.as_ref()?;
        Some(BigRational::new(num.clone().into(), den.clone().into()))
    }

    /// Sum of the exact weights, when present.
    pub fn exact_total(&self) -> Option<BigRational> {
        let den = self.exact_denominator.as_ref()?;
        let mut num = BigUint::zero();
        for e in &self.entries {
            num += e.exact_numerator.as_ref()?;
        }
        Some(BigRational::new(num.into(), den.clone().into()))
    }

    /// Entries sorted by descending weight.
    pub fn sorted_weights_desc(&self) -> Vec<f64> {
        let mut w = self.weights();
        w.sort_by(|a, b| b.total_cmp(a));
        w
    }

    /// Test hook: rescales one weight, leaving exact numerators untouched.
    #[doc(hidden)]
    pub fn perturb_weight(&mut self, index: usize, delta: f64) {
        let e = &mut self.entries[index];
        e.weight = LogWeight::from_value(e.weight.value() + delta);
    }

    pub fn to_document(&self) -> SpectrumDocument {
        let header = SpectrumHeader {
            l: match &self.sector {
                Some(SectorConfig::Finite { occupations }) => SizeLabel::Finite(occupations.iter().sum()),
                Some(SectorConfig::Infinite { .. }) => SizeLabel::Infinite,
                None => SizeLabel::Unspecified,
            },
            d: self.d,
            occupations: match &self.sector {
                Some(SectorConfig::Finite { occupations }) => Some(occupations.clone()),
                _ => None,
            },
            densities: match &self.sector {
                Some(SectorConfig::Infinite { densities }) => Some(densities.clone()),
                _ => None,
            },
            n: self.block_size,
            source: self.source,
            dropped_mass: self.dropped_mass,
        };
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| SpectrumRecord {
                composition: e.composition.0.clone(),
                log2_weight: e.weight.log2(),
                weight: self
                    .exact_weight(i)
                    .map(|r| format!("{}/{}", r.numer(), r.denom())),
            })
            .collect();
        SpectrumDocument { header, entries }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("spectrum serializes")
    }
}

pub(crate) fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `L` as written in serialized headers: an integer, `"inf"`, or null.
#[derive(Debug, Clone, PartialEq)]
pub enum SizeLabel {
    Finite(usize),
    Infinite,
    Unspecified,
}

impl Serialize for SizeLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SizeLabel::Finite(l) => s.serialize_u64(*l as u64),
            SizeLabel::Infinite => s.serialize_str("inf"),
            SizeLabel::Unspecified => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for SizeLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Null => Ok(SizeLabel::Unspecified),
            serde_json::Value::String(s) if s == "inf" => Ok(SizeLabel::Infinite),
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(|l| SizeLabel::Finite(l as usize))
                .ok_or_else(|| serde::de::Error::custom("L must be a nonnegative integer")),
            other => Err(serde::de::Error::custom(format!("invalid L: {other}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumHeader {
    #[serde(rename = "L")]
    pub l: SizeLabel,
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub occupations: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub densities: Option<Vec<f64>>,
    pub n: usize,
    pub source: SpectrumSource,
    #[serde(default)]
    pub dropped_mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub composition: Vec<usize>,
    pub log2_weight: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weight: Option<String>,
}

/// Serialized form of a [`Spectrum`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub header: SpectrumHeader,
    pub entries: Vec<SpectrumRecord>,
}

/// Dimension of the symmetric subspace of `n` sites with `d` levels:
/// `C(n + d - 1, d - 1)`.
pub fn dimension_symmetric_subspace(n: usize, d: usize) -> BigUint {
    assert!(d >= 2, "local dimension must be >= 2");
    binom_big(n + d - 1, d - 1)
}

fn finite_occupations(cfg: &SectorConfig) -> Result<&[usize]> {
    match cfg {
        SectorConfig::Finite { occupations } => Ok(occupations),
        SectorConfig::Infinite { .. } => Err(Error::Domain(
            "finite-size spectrum requires a finite sector; use thermo_spectrum".into(),
        )),
    }
}

fn check_support(n: usize, bounds: &[usize]) -> Result<()> {
    let count = composition_count(n, bounds);
    if count > BigUint::from(MAX_SPECTRUM_SUPPORT) {
        return Err(Error::ResourceGuard(format!(
            "spectrum support of {count} entries exceeds {MAX_SPECTRUM_SUPPORT}"
        )));
    }
    Ok(())
}

fn check_block(n: usize, l: usize) -> Result<()> {
    if n > l {
        return Err(Error::Domain(format!("n exceeds L: block size {n} with L = {l}")));
    }
    Ok(())
}

/// Spectrum of the `n`-site block of a finite sector, log-domain weights only.
pub fn exact_spectrum(cfg: &SectorConfig, n: usize) -> Result<Spectrum> {
    let occ = finite_occupations(cfg)?;
    let l: usize = occ.iter().sum();
    check_block(n, l)?;
    check_support(n, occ)?;
    let lf = log2_factorials(l);
    let norm = log2_binom_unchecked(&lf, l, n);
    let mut entries = Vec::new();
    for_each_weighted(
        n,
        occ,
        |i, k| log2_binom_unchecked(&lf, occ[i], k),
        |k, log_num| {
            entries.push(SpectrumEntry {
                composition: Composition(k.to_vec()),
                weight: LogWeight::from_log2(log_num - norm),
                exact_numerator: None,
            })
        },
    );
    Ok(Spectrum {
        entries,
        block_size: n,
        d: occ.len(),
        source: SpectrumSource::FiniteExact,
        sector: Some(cfg.clone()),
        exact_denominator: None,
        dropped_mass: 0.0,
    })
}

/// Like [`exact_spectrum`], additionally carrying exact rational weights
/// `prod_i C(N_i, k_i) / C(L, n)`. Requires `L <= 300`.
pub fn exact_spectrum_rational(cfg: &SectorConfig, n: usize) -> Result<Spectrum> {
    let occ = finite_occupations(cfg)?;
    let l: usize = occ.iter().sum();
    if l > MAX_EXACT_RATIONAL_L {
        return Err(Error::Domain(format!(
            "exact rational weights are limited to L <= {MAX_EXACT_RATIONAL_L}, got {l}"
        )));
    }
    let mut spectrum = exact_spectrum(cfg, n)?;
    let rows: Vec<Vec<BigUint>> = occ.iter().map(|&m| binom_row(m)).collect();
    let d = occ.len();
    // prefix[i] = prod_{j<i} C(N_j, k_j), refreshed from the changed index
    let mut prefix = vec![BigUint::one(); d + 1];
    let mut iter = BoundedCompositions::new(n, occ);
    let mut idx = 0;
    while let Some(pivot) = iter.advance() {
        let k = iter.current();
        for i in pivot..d {
            prefix[i + 1] = &prefix[i] * &rows[i][k[i]];
        }
        let entry = &mut spectrum.entries[idx];
        debug_assert_eq!(entry.composition.parts(), k);
        entry.exact_numerator = Some(prefix[d].clone());
        idx += 1;
    }
    spectrum.exact_denominator = Some(binom_big(l, n));
    Ok(spectrum)
}

/// Multinomial spectrum of the thermodynamic limit.
///
/// Entries lighter than `cutoff` times the heaviest weight are dropped and
/// their total reported by [`Spectrum::dropped_mass`]. Levels with zero
/// density contribute no entries.
pub fn thermo_spectrum(densities: &[f64], n: usize, cutoff: f64) -> Result<Spectrum> {
    validate_densities(densities)?;
    if !(0.0..1.0).contains(&cutoff) {
        return Err(Error::Domain(format!("cutoff {cutoff} outside [0, 1)")));
    }
    let bounds: Vec<usize> = densities.iter().map(|&p| if p > 0.0 { n } else { 0 }).collect();
    check_support(n, &bounds)?;
    let lf = log2_factorials(n);
    let log_p: Vec<f64> = densities.iter().map(|p| p.log2()).collect();
    let term = |i: usize, k: usize| {
        if k == 0 {
            0.0
        } else {
            k as f64 * log_p[i] - lf[k]
        }
    };
    let base = lf[n];

    let mut max_log = f64::NEG_INFINITY;
    if cutoff > 0.0 {
        for_each_weighted(n, &bounds, term, |_, s| max_log = max_log.max(base + s));
    }
    let threshold = if cutoff > 0.0 {
        max_log + cutoff.log2()
    } else {
        f64::NEG_INFINITY
    };

    let mut entries = Vec::new();
    let mut dropped = Vec::new();
    for_each_weighted(n, &bounds, term, |k, s| {
        let lw = base + s;
        if lw >= threshold {
            entries.push(SpectrumEntry {
                composition: Composition(k.to_vec()),
                weight: LogWeight::from_log2(lw),
                exact_numerator: None,
            });
        } else {
            dropped.push(lw.exp2());
        }
    });
    Ok(Spectrum {
        entries,
        block_size: n,
        d: densities.len(),
        source: SpectrumSource::Thermodynamic,
        sector: Some(SectorConfig::Infinite {
            densities: densities.to_vec(),
        }),
        exact_denominator: None,
        dropped_mass: neumaier_sum(dropped),
    })
}

/// Flat spectrum of the uniform mixture over all symmetric sectors:
/// `kappa(n)` weights of `1 / kappa(n)`, with exact weights attached.
pub fn uniform_mixed_spectrum(n: usize, d: usize) -> Result<Spectrum> {
    if d < 2 {
        return Err(Error::Domain(format!("local dimension must be >= 2, got {d}")));
    }
    check_support(n, &vec![n; d])?;
    let kappa = dimension_symmetric_subspace(n, d);
    let lf = log2_factorials(n + d);
    let log_w = LogWeight::from_log2(-log2_binom_unchecked(&lf, n + d - 1, d - 1));
    let entries = BoundedCompositions::new(n, &vec![n; d])
        .map(|k| SpectrumEntry {
            composition: Composition(k),
            weight: log_w,
            exact_numerator: Some(BigUint::one()),
        })
        .collect();
    Ok(Spectrum {
        entries,
        block_size: n,
        d,
        source: SpectrumSource::UniformMixed,
        sector: None,
        exact_denominator: Some(kappa),
        dropped_mass: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn finite(occ: &[usize]) -> SectorConfig {
        SectorConfig::finite(occ.to_vec()).unwrap()
    }

    fn weight_of(s: &Spectrum, parts: &[usize]) -> f64 {
        s.entries()
            .iter()
            .find(|e| e.composition.parts() == parts)
            .map(|e| e.weight.value())
            .unwrap_or(0.0)
    }

    #[test]
    fn oversized_support_is_refused() {
        let big = finite(&[2000; 5]);
        assert!(matches!(exact_spectrum(&big, 5000), Err(Error::ResourceGuard(_))));
        assert!(matches!(
            uniform_mixed_spectrum(500, 5),
            Err(Error::ResourceGuard(_))
        ));
        assert!(matches!(
            thermo_spectrum(&[0.2; 5], 500, 0.0),
            Err(Error::ResourceGuard(_))
        ));
    }

    #[test]
    fn symmetric_dimensions() {
        assert_eq!(dimension_symmetric_subspace(2, 2), BigUint::from(3u32));
        assert_eq!(dimension_symmetric_subspace(2, 3), BigUint::from(6u32));
        assert_eq!(dimension_symmetric_subspace(10, 4), BigUint::from(286u32));
        assert_eq!(BoundedCompositions::new(10, &[10; 4]).count(), 286);
    }

    #[test]
    fn four_qubit_half_filling() {
        let s = exact_spectrum_rational(&finite(&[2, 2]), 2).unwrap();
        assert_eq!(s.len(), 3);
        let expect = [
            (vec![0, 2], 1.0 / 6.0),
            (vec![1, 1], 4.0 / 6.0),
            (vec![2, 0], 1.0 / 6.0),
        ];
        for (k, w) in expect {
            assert!((weight_of(&s, &k) - w).abs() < 1e-15);
        }
        assert_eq!(s.exact_weight(1).unwrap(), BigRational::new(2.into(), 3.into()));
        assert!(s.exact_total().unwrap().is_one());
    }

    #[test]
    fn full_block_and_empty_block_are_pure() {
        let s = exact_spectrum(&finite(&[1, 1, 1]), 3).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.entries()[0].composition.parts(), &[1, 1, 1]);
        assert!((s.entries()[0].weight.value() - 1.0).abs() < 1e-15);

        let s = exact_spectrum(&finite(&[3, 5, 2, 7]), 0).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.entries()[0].composition.parts(), &[0, 0, 0, 0]);
        assert_eq!(s.entries()[0].weight.value(), 1.0);
    }

    #[test]
    fn block_larger_than_system_is_rejected() {
        assert!(matches!(
            exact_spectrum(&finite(&[2, 2]), 5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            exact_spectrum(&SectorConfig::infinite(vec![0.5, 0.5]).unwrap(), 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            exact_spectrum_rational(&finite(&[200, 200]), 3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sector_validation() {
        assert!(SectorConfig::finite(vec![4]).is_err());
        assert!(SectorConfig::finite(vec![0, 0]).is_err());
        assert!(SectorConfig::infinite(vec![0.5, 0.6]).is_err());
        assert!(SectorConfig::infinite(vec![1.5, -0.5]).is_err());
        let c = SectorConfig::infinite(vec![0.25; 4]).unwrap();
        assert_eq!(c.d(), 4);
        assert_eq!(c.sigma(), 1.5);
        assert_eq!(c.size(), None);
        assert_eq!(finite(&[1, 2, 3]).size(), Some(6));
    }

    #[test]
    fn thermo_small_cases() {
        let s = thermo_spectrum(&[0.5, 0.5], 2, 0.0).unwrap();
        assert!((weight_of(&s, &[0, 2]) - 0.25).abs() < 1e-15);
        assert!((weight_of(&s, &[1, 1]) - 0.5).abs() < 1e-15);
        assert!((weight_of(&s, &[2, 0]) - 0.25).abs() < 1e-15);

        let third = 1.0 / 3.0;
        let s = thermo_spectrum(&[third; 3], 1, 0.0).unwrap();
        assert_eq!(s.len(), 3);
        for w in s.weights() {
            assert!((w - third).abs() < 1e-15);
        }
        assert!(thermo_spectrum(&[1.2, -0.2], 2, 0.0).is_err());
    }

    #[test]
    fn thermo_skips_zero_density_levels() {
        let s = thermo_spectrum(&[0.5, 0.5, 0.0], 4, 0.0).unwrap();
        assert_eq!(s.len(), 5);
        assert!(s.entries().iter().all(|e| e.composition.parts()[2] == 0));
        assert!((s.total_weight() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn thermo_is_large_l_limit() {
        let big = exact_spectrum(&finite(&[500_000, 500_000]), 100).unwrap();
        let thermo = thermo_spectrum(&[0.5, 0.5], 100, 0.0).unwrap();
        assert_eq!(big.len(), thermo.len());
        for (a, b) in big.entries().iter().zip(thermo.entries()) {
            assert_eq!(a.composition, b.composition);
            assert!((a.weight.value() - b.weight.value()).abs() < 1e-3);
        }
    }

    #[test]
    fn thermo_cutoff_reports_dropped_mass() {
        let p = [0.2, 0.3, 0.5];
        let full = thermo_spectrum(&p, 60, 0.0).unwrap();
        let cutoff = 1e-6;
        let cut = thermo_spectrum(&p, 60, cutoff).unwrap();
        assert!(cut.len() < full.len());
        assert!((cut.total_weight() + cut.dropped_mass() - 1.0).abs() < 1e-12);
        assert!(cut.total_weight() >= 1.0 - 10.0 * cutoff);
    }

    #[test]
    fn uniform_mixture_is_flat() {
        let s = uniform_mixed_spectrum(1, 2).unwrap();
        assert_eq!(s.weights(), vec![0.5, 0.5]);
        let s = uniform_mixed_spectrum(2, 2).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.weights().iter().all(|w| (w - 1.0 / 3.0).abs() < 1e-15));
        let s = uniform_mixed_spectrum(2, 3).unwrap();
        assert_eq!(s.len(), 6);
        assert!(s.weights().iter().all(|w| (w - 1.0 / 6.0).abs() < 1e-15));
        assert!(s.exact_total().unwrap().is_one());
    }

    #[test]
    fn qubit_case_matches_two_binomial_form() {
        // lambda_k = C(n, k) C(L - n, N - k) / C(L, N), k = number of level-1 sites
        let (l, big_n) = (11usize, 4usize);
        let cfg = finite(&[l - big_n, big_n]);
        for n in 0..=l {
            let s = exact_spectrum(&cfg, n).unwrap();
            for e in s.entries() {
                let k = e.composition.parts()[1];
                let w = binom_big(n, k) * binom_big(l - n, big_n - k);
                let w =
                    crate::combinatorics::big_log2(&w) - crate::combinatorics::big_log2(&binom_big(l, big_n));
                assert!((e.weight.log2() - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hypergeometric_mean_is_exact() {
        let occ = [5usize, 3, 8];
        let l: usize = occ.iter().sum();
        let s = exact_spectrum_rational(&finite(&occ), 7).unwrap();
        for (i, &ni) in occ.iter().enumerate() {
            let mut mean = BigRational::zero();
            for (j, e) in s.entries().iter().enumerate() {
                mean +=
                    s.exact_weight(j).unwrap() * BigRational::from_integer(e.composition.parts()[i].into());
            }
            assert_eq!(mean, BigRational::new((7 * ni).into(), l.into()));
        }
    }

    #[test]
    fn json_document_shape() {
        let s = exact_spectrum_rational(&finite(&[2, 2]), 2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v["header"]["L"], 4);
        assert_eq!(v["header"]["source"], "finite_exact");
        assert_eq!(v["entries"][1]["weight"], "2/3");
        assert_eq!(v["entries"][0]["composition"], serde_json::json!([0, 2]));
        let s = thermo_spectrum(&[0.5, 0.5], 1, 0.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v["header"]["L"], "inf");
        assert!(v["entries"][0].get("weight").is_none());
        let back: SpectrumDocument = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(back.header.l, SizeLabel::Infinite);
    }

    proptest! {
        #[test]
        fn exact_normalization(occ in prop::collection::vec(0usize..20, 2..5), frac in 0.0f64..=1.0) {
            let l: usize = occ.iter().sum();
            prop_assume!(l > 0);
            let n = (frac * l as f64).round() as usize;
            let s = exact_spectrum_rational(&finite(&occ), n).unwrap();
            prop_assert!(s.exact_total().unwrap().is_one());
            prop_assert!((s.total_weight() - 1.0).abs() < 1e-10);
            prop_assert!(s.weights().iter().all(|&w| w > 0.0));
        }

        #[test]
        fn relabeling_levels_permutes_entries(
            occ in prop::collection::vec(0usize..12, 2..5),
            frac in 0.0f64..=1.0,
            seed in any::<u64>(),
        ) {
            let l: usize = occ.iter().sum();
            prop_assume!(l > 0);
            let n = (frac * l as f64).round() as usize;
            let d = occ.len();
            let mut perm: Vec<usize> = (0..d).collect();
            perm.rotate_left((seed % d as u64) as usize);
            if seed & 1 == 1 { perm.reverse(); }
            let permuted: Vec<usize> = perm.iter().map(|&i| occ[i]).collect();
            let a = exact_spectrum(&finite(&occ), n).unwrap();
            let b = exact_spectrum(&finite(&permuted), n).unwrap();
            prop_assert_eq!(a.len(), b.len());
            for e in a.entries() {
                let relabeled: Vec<usize> = perm.iter().map(|&i| e.composition.parts()[i]).collect();
                prop_assert!((weight_of(&b, &relabeled) - e.weight.value()).abs() < 1e-12);
            }
        }

        #[test]
        fn complement_has_same_weights(occ in prop::collection::vec(0usize..15, 2..5), frac in 0.0f64..=1.0) {
            let l: usize = occ.iter().sum();
            prop_assume!(l > 0);
            let n = (frac * l as f64).round() as usize;
            let a = exact_spectrum(&finite(&occ), n).unwrap().sorted_weights_desc();
            let b = exact_spectrum(&finite(&occ), l - n).unwrap().sorted_weights_desc();
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
