//! Moments of the composition distribution and its multivariate normal
//! approximation.
//!
//! Under multinomial weights the block occupations have mean `n p_i`,
//! variance `n p_i (1 - p_i)` and covariance `-n p_i p_j`. Eliminating one
//! level through the sum constraint leaves `2 sigma` coordinates with a
//! nonsingular covariance whose determinant is `n^{2 sigma} prod_i p_i`; the
//! Gaussian entropy follows in closed form.

use std::f64::consts::{E, PI};

use nalgebra::{DMatrix, DVector};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::spectrum::{neumaier_sum, validate_densities, Spectrum};

/// First and central second moments of the block occupations.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionMoments {
    pub mean: Vec<f64>,
    /// `d x d`, row-major.
    pub covariance: Vec<Vec<f64>>,
}

/// Exact summation of moments over the spectrum's support.
pub fn composition_moments(s: &Spectrum) -> CompositionMoments {
    let d = s.d();
    let weights = s.weights();
    let parts: Vec<&[usize]> = s.entries().iter().map(|e| e.composition.parts()).collect();
    let mean: Vec<f64> = (0..d)
        .map(|i| neumaier_sum(parts.iter().zip(&weights).map(|(k, w)| w * k[i] as f64)))
        .collect();
    let mut covariance = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in i..d {
            let c = neumaier_sum(
                parts
                    .iter()
                    .zip(&weights)
                    .map(|(k, w)| w * (k[i] as f64 - mean[i]) * (k[j] as f64 - mean[j])),
            );
            covariance[i][j] = c;
            covariance[j][i] = c;
        }
    }
    CompositionMoments { mean, covariance }
}

/// Gaussian model over the `d - 1` occupations left after eliminating one
/// level.
#[derive(Debug, Clone)]
pub struct GaussianModel {
    densities: Vec<f64>,
    n: usize,
    eliminated: usize,
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    precision: DMatrix<f64>,
    log2_det_covariance: f64,
}

impl GaussianModel {
    /// Number of retained coordinates, `2 sigma`.
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn sigma(&self) -> f64 {
        self.dim() as f64 / 2.0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    /// Level dropped through the sum constraint.
    pub fn eliminated_level(&self) -> usize {
        self.eliminated
    }

    /// Levels backing each retained coordinate, in order.
    pub fn retained_levels(&self) -> Vec<usize> {
        (0..self.densities.len())
            .filter(|&i| i != self.eliminated)
            .collect()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// `A`, the inverse covariance.
    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    pub fn det_a(&self) -> f64 {
        (-self.log2_det_covariance).exp2()
    }

    /// `log2(1 / det A)`, taken from the Cholesky factor.
    pub fn log2_det_covariance(&self) -> f64 {
        self.log2_det_covariance
    }

    /// Normal density at a full occupation vector (all `d` levels; the
    /// eliminated one is ignored).
    pub fn density_at(&self, occupations: &[usize]) -> f64 {
        let x = DVector::from_iterator(
            self.dim(),
            self.retained_levels().into_iter().map(|i| occupations[i] as f64),
        ) - &self.mean;
        let quad = (x.transpose() * &self.precision * &x)[(0, 0)];
        let log2_norm = -0.5 * self.log2_det_covariance - self.sigma() * (2.0 * PI).log2();
        (log2_norm - 0.5 * quad * std::f64::consts::LOG2_E).exp2()
    }
}

impl Serialize for GaussianModel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let row_major = |m: &DMatrix<f64>| -> Vec<f64> {
            (0..m.nrows())
                .flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)]))
                .collect()
        };
        let mut st = s.serialize_struct("GaussianModel", 8)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("densities", &self.densities)?;
        st.serialize_field("retained_levels", &self.retained_levels())?;
        st.serialize_field("mean", &self.mean.as_slice())?;
        st.serialize_field("covariance", &row_major(&self.covariance))?;
        st.serialize_field("precision", &row_major(&self.precision))?;
        st.serialize_field("det_A", &self.det_a())?;
        st.end()
    }
}

/// Builds the model with level 0 eliminated.
pub fn build_gaussian(densities: &[f64], n: usize) -> Result<GaussianModel> {
    build_gaussian_eliminating(densities, n, 0)
}

pub fn build_gaussian_eliminating(densities: &[f64], n: usize, eliminated: usize) -> Result<GaussianModel> {
    validate_densities(densities)?;
    if n == 0 {
        return Err(Error::Domain("Gaussian model needs n >= 1".into()));
    }
    if eliminated >= densities.len() {
        return Err(Error::Domain(format!("no level {eliminated} to eliminate")));
    }
    if densities.iter().any(|&p| p <= 0.0) {
        return Err(Error::Domain(
            "covariance is singular with a vanishing density; reduce with effective_spin first".into(),
        ));
    }
    let nf = n as f64;
    let retained: Vec<f64> = densities
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != eliminated)
        .map(|(_, &p)| p)
        .collect();
    let dim = retained.len();
    let mean = DVector::from_iterator(dim, retained.iter().map(|p| nf * p));
    let covariance = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            nf * retained[i] * (1.0 - retained[i])
        } else {
            -nf * retained[i] * retained[j]
        }
    });
    let chol = covariance.clone().cholesky().ok_or_else(|| {
        Error::Domain("covariance is not positive definite; reduce with effective_spin".into())
    })?;
    let log2_det_covariance = 2.0 * chol.l().diagonal().iter().map(|v| v.log2()).sum::<f64>();
    let precision = chol.inverse();
    Ok(GaussianModel {
        densities: densities.to_vec(),
        n,
        eliminated,
        mean,
        covariance,
        precision,
        log2_det_covariance,
    })
}

/// Differential entropy of the model in bits:
/// `sigma log2(2 pi e) + 1/2 log2(1 / det A)`.
pub fn gaussian_entropy(model: &GaussianModel) -> f64 {
    model.sigma() * (2.0 * PI * E).log2() + 0.5 * model.log2_det_covariance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::asymptotic_entropy;
    use crate::spectrum::{exact_spectrum, thermo_spectrum, SectorConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn multinomial_moment_examples() {
        let m = composition_moments(&thermo_spectrum(&[0.5, 0.5], 10, 0.0).unwrap());
        assert!(close(m.mean[0], 5.0, 1e-13) && close(m.mean[1], 5.0, 1e-13));
        assert!(close(m.covariance[0][0], 2.5, 1e-13));
        assert!(close(m.covariance[0][1], -2.5, 1e-13));

        let m = composition_moments(&thermo_spectrum(&[1.0 / 3.0; 3], 9, 0.0).unwrap());
        for i in 0..3 {
            assert!(close(m.mean[i], 3.0, 1e-13));
            for j in 0..3 {
                let expect = if i == j { 2.0 } else { -1.0 };
                assert!(close(m.covariance[i][j], expect, 1e-13));
            }
        }
    }

    #[test]
    fn hypergeometric_moments() {
        // Var = n p (1-p) (L-n)/(L-1)
        let s = exact_spectrum(&SectorConfig::finite(vec![2, 2]).unwrap(), 2).unwrap();
        let m = composition_moments(&s);
        assert!(close(m.mean[0], 1.0, 1e-14));
        let expect = 2.0 * 0.5 * 0.5 * 2.0 / 3.0;
        assert!(close(m.covariance[0][0], expect, 1e-14));
        assert!(close(expect, 1.0 / 3.0, 1e-15));
    }

    #[test]
    fn determinant_examples() {
        let third = 1.0 / 3.0;
        for n in [1usize, 7, 100] {
            let g = build_gaussian(&[third; 3], n).unwrap();
            let inv_det = (n * n) as f64 / 27.0;
            assert!(close(1.0 / g.det_a(), inv_det, 1e-12));
        }
        let g = build_gaussian(&[0.3, 0.7], 40).unwrap();
        assert_eq!(g.dim(), 1);
        assert!(close(g.covariance()[(0, 0)], 40.0 * 0.3 * 0.7, 1e-15));
        let g = build_gaussian(&[0.25; 4], 16).unwrap();
        assert!(close(1.0 / g.det_a(), 16f64.powi(3) * 0.25f64.powi(4), 1e-9));
    }

    #[test]
    fn precision_inverts_covariance() {
        let g = build_gaussian(&[0.1, 0.2, 0.3, 0.4], 25).unwrap();
        let id = g.precision() * g.covariance();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn singular_models_are_rejected() {
        assert!(
            matches!(build_gaussian(&[0.5, 0.5, 0.0], 4), Err(Error::Domain(m)) if m.contains("effective_spin"))
        );
        assert!(build_gaussian(&[0.5, 0.5], 0).is_err());
    }

    #[test]
    fn entropy_matches_closed_forms() {
        let g = build_gaussian(&[1.0 / 3.0; 3], 100).unwrap();
        assert!((gaussian_entropy(&g) - 8.360604).abs() < 1e-6);
        let g = build_gaussian(&[0.5, 0.5], 100).unwrap();
        let one_d = 0.5 * (2.0 * PI * E * 100.0 * 0.25).log2();
        assert!((gaussian_entropy(&g) - one_d).abs() < 1e-12);
        assert!((gaussian_entropy(&g) - 4.369024).abs() < 1e-6);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..=6 {
            for _ in 0..10 {
                let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..1.0)).collect();
                let sum: f64 = raw.iter().sum();
                let p: Vec<f64> = raw.iter().map(|x| x / sum).collect();
                for n in [1usize, 13, 400] {
                    let g = build_gaussian(&p, n).unwrap();
                    let cfg = SectorConfig::Infinite { densities: p.clone() };
                    let a = asymptotic_entropy(&cfg, n).unwrap();
                    assert!((gaussian_entropy(&g) - a).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn elimination_choice_does_not_matter() {
        let p = [0.15, 0.25, 0.6];
        let base = build_gaussian(&p, 30).unwrap();
        for e in 1..3 {
            let g = build_gaussian_eliminating(&p, 30, e).unwrap();
            assert!(close(g.det_a(), base.det_a(), 1e-12));
            assert!((gaussian_entropy(&g) - gaussian_entropy(&base)).abs() < 1e-12);
            let k = [4usize, 8, 18];
            assert!(close(g.density_at(&k), base.density_at(&k), 1e-10));
        }
    }

    #[test]
    fn local_limit_error_shrinks_at_the_mode() {
        let p = [0.2, 0.3, 0.5];
        let mut prev = f64::INFINITY;
        for n in [50usize, 100, 200, 400] {
            let s = thermo_spectrum(&p, n, 0.0).unwrap();
            let g = build_gaussian(&p, n).unwrap();
            let top = s
                .entries()
                .iter()
                .max_by(|a, b| a.weight.log2().total_cmp(&b.weight.log2()))
                .unwrap();
            let scaled = (top.weight.value() - g.density_at(top.composition.parts())).abs()
                * (n as f64).powf(g.sigma());
            assert!(scaled < prev, "n = {n}: {scaled} >= {prev}");
            prev = scaled;
        }
    }

    #[test]
    fn json_is_row_major() {
        let g = build_gaussian(&[0.2, 0.3, 0.5], 10).unwrap();
        let v = serde_json::to_value(&g).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["covariance"].as_array().unwrap().len(), 4);
        let c01 = v["covariance"][1].as_f64().unwrap();
        assert!((c01 + 10.0 * 0.3 * 0.5).abs() < 1e-12);
        assert!(v["det_A"].as_f64().unwrap() > 0.0);
    }
}
