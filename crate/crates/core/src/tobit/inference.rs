use alloc::vec::Vec;

use libm::sqrt;

use super::fit::{fit, TobitFit, TobitOptions};
use super::likelihood::row_scores;
use super::{CensoredSample, TobitError};
use crate::numerics::{chi_square_sf, normal_cdf, normal_pdf, normal_two_sided_p, solve_spd, DenseMatrix};

/// Sandwich `H⁻¹ (Σ gᵢgᵢᵀ) H⁻¹` given `(−H)⁻¹`.
pub(crate) fn robust_covariance_at(
    s: &CensoredSample,
    beta: &[f64],
    sigma: f64,
    neg_h_inv: &DenseMatrix,
) -> Result<DenseMatrix, TobitError> {
    let scores = row_scores(s, beta, sigma)?;
    let p = scores.cols();
    let mut meat = DenseMatrix::zeros(p, p);
    for i in 0..scores.rows() {
        let g = scores.row(i);
        for a in 0..p {
            for b in a..p {
                meat[(a, b)] += g[a] * g[b];
            }
        }
    }
    meat.mirror_upper();
    let left = neg_h_inv.matmul(&meat).expect("square");
    let mut v = left.matmul(neg_h_inv).expect("square");
    for a in 0..p {
        for b in 0..a {
            let avg = 0.5 * (v[(a, b)] + v[(b, a)]);
            v[(a, b)] = avg;
            v[(b, a)] = avg;
        }
    }
    Ok(v)
}

/// Heteroskedasticity-robust covariance of a converged fit, in `(β, ln σ)`.
pub fn robust_covariance(s: &CensoredSample, fit: &TobitFit) -> Result<DenseMatrix, TobitError> {
    if !fit.fingerprint.matches(&s.fingerprint()) || fit.k() != s.k() {
        return Err(TobitError::SampleMismatch);
    }
    robust_covariance_at(s, &fit.beta, fit.sigma, &fit.cov_hessian)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestResult {
    pub stat: f64,
    pub df: u32,
    pub p_value: f64,
}

/// Wald test that every slope (all coefficients after the intercept) is
/// zero, using the robust covariance.
pub fn wald_test(fit: &TobitFit) -> Result<TestResult, TobitError> {
    let k = fit.k();
    if k < 2 {
        return Err(TobitError::NoSlopes);
    }
    let idx: Vec<usize> = (1..k).collect();
    let v = fit.cov_robust.principal_submatrix(&idx);
    let b: Vec<f64> = fit.beta[1..].to_vec();
    let w = solve_spd(&v, &b).map_err(TobitError::NotPositiveDefinite)?;
    let stat = b.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>().max(0.0);
    let df = (k - 1) as u32;
    Ok(TestResult {
        stat,
        df,
        p_value: chi_square_sf(stat, df),
    })
}

/// Likelihood-ratio test of `reduced` nested in `full`.
pub fn lr_test(full: &TobitFit, reduced: &TobitFit) -> Result<TestResult, TobitError> {
    if !full.fingerprint.matches(&reduced.fingerprint) || reduced.k() > full.k() {
        return Err(TobitError::SampleMismatch);
    }
    let stat = (2.0 * (full.loglik - reduced.loglik)).max(0.0);
    let df = (full.k() - reduced.k()) as u32;
    let p_value = if df == 0 { 1.0 } else { chi_square_sf(stat, df) };
    Ok(TestResult { stat, df, p_value })
}

/// `E[y | x]` for the censored response at linear index `mu`.
pub fn censored_mean(mu: f64, sigma: f64, lower: f64, upper: f64) -> f64 {
    let (p_low, lower_term, pdf_low) = if lower.is_finite() {
        let a = (lower - mu) / sigma;
        (normal_cdf(a), lower * normal_cdf(a), normal_pdf(a))
    } else {
        (0.0, 0.0, 0.0)
    };
    let (p_high, upper_term, pdf_high) = if upper.is_finite() {
        let b = (upper - mu) / sigma;
        (normal_cdf(b), upper * normal_cdf(-b), normal_pdf(b))
    } else {
        (1.0, 0.0, 0.0)
    };
    lower_term + upper_term + mu * (p_high - p_low) + sigma * (pdf_low - pdf_high)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PseudoR2Variant {
    /// `1 − ℓ_full / ℓ_null`
    McFadden,
    /// Squared correlation of `y` with the fitted censored mean.
    SquaredCorrelation,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudoR2 {
    pub value: f64,
    pub variant: PseudoR2Variant,
}

/// McFadden's measure when both log-likelihoods are negative; otherwise (a
/// continuous density can push either above zero, and McFadden then leaves
/// `[0, 1]`) the squared correlation between `y` and `E[y | x]`.
pub fn pseudo_r2(s: &CensoredSample, full: &TobitFit, null: &TobitFit) -> PseudoR2 {
    if null.loglik < 0.0 && full.loglik < 0.0 {
        return PseudoR2 {
            value: 1.0 - full.loglik / null.loglik,
            variant: PseudoR2Variant::McFadden,
        };
    }
    let fitted: Vec<f64> = s
        .x()
        .mul_vec(&full.beta)
        .into_iter()
        .map(|mu| censored_mean(mu, full.sigma, s.lower(), s.upper()))
        .collect();
    PseudoR2 {
        value: squared_correlation(s.y(), &fitted),
        variant: PseudoR2Variant::SquaredCorrelation,
    }
}

fn squared_correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    // A constant fitted mean carries no explanatory power.
    if saa <= 0.0 || sbb <= 1e-24 * n * (1.0 + mb * mb) {
        return 0.0;
    }
    (sab * sab / (saa * sbb)).clamp(0.0, 1.0)
}

/// Average effect of each regressor on the unconditional censored mean:
/// `β_j · mean_i[Φ((U − x_iβ)/σ) − Φ((L − x_iβ)/σ)]`.
pub fn marginal_effects(s: &CensoredSample, fit: &TobitFit) -> Vec<f64> {
    let n = s.n() as f64;
    let mut bracket = 0.0;
    for mu in s.x().mul_vec(&fit.beta) {
        let hi = if s.upper().is_finite() {
            normal_cdf((s.upper() - mu) / fit.sigma)
        } else {
            1.0
        };
        let lo = if s.lower().is_finite() {
            normal_cdf((s.lower() - mu) / fit.sigma)
        } else {
            0.0
        };
        bracket += hi - lo;
    }
    bracket /= n;
    fit.beta.iter().map(|b| b * bracket).collect()
}

pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientRow {
    pub estimate: f64,
    pub robust_se: f64,
    pub z: f64,
    pub p_value: f64,
    pub stars: &'static str,
}

/// Everything a regression table needs: coefficients with robust inference,
/// joint tests, fit measures, and marginal effects.
#[derive(Clone, Debug, PartialEq)]
pub struct InferenceReport {
    pub coefficients: Vec<CoefficientRow>,
    pub sigma: f64,
    pub sigma_se: f64,
    pub loglik: f64,
    pub n_obs: usize,
    pub n_lower: usize,
    pub n_upper: usize,
    pub wald: TestResult,
    pub lr: TestResult,
    pub pseudo_r2: PseudoR2,
    pub marginal_effects: Vec<f64>,
    pub full: TobitFit,
    pub null: TobitFit,
}

/// Fits the full and intercept-only models and assembles robust inference.
/// The first design column must be the intercept.
pub fn infer(s: &CensoredSample, opts: &TobitOptions) -> Result<InferenceReport, TobitError> {
    let full = fit(s, opts)?;
    let null = fit(&s.intercept_only(), opts)?;
    let robust_se = full.robust_se();
    let coefficients = full
        .beta
        .iter()
        .zip(&robust_se)
        .map(|(&estimate, &se)| {
            let z = if se > 0.0 { estimate / se } else { f64::NAN };
            let p_value = if z.is_nan() { f64::NAN } else { normal_two_sided_p(z) };
            CoefficientRow {
                estimate,
                robust_se: se,
                z,
                p_value,
                stars: significance_stars(p_value),
            }
        })
        .collect();
    let k = full.k();
    let sigma_se = full.sigma * sqrt(full.cov_robust[(k, k)].max(0.0));
    Ok(InferenceReport {
        coefficients,
        sigma: full.sigma,
        sigma_se,
        loglik: full.loglik,
        n_obs: full.n_obs,
        n_lower: s.count(super::Censoring::AtLower),
        n_upper: s.count(super::Censoring::AtUpper),
        wald: wald_test(&full)?,
        lr: lr_test(&full, &null)?,
        pseudo_r2: pseudo_r2(s, &full, &null),
        marginal_effects: marginal_effects(s, &full),
        full,
        null,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tobit::SampleFingerprint;
    use alloc::vec;

    fn manual_fit(beta: Vec<f64>, cov_diag: Vec<f64>) -> TobitFit {
        let p = cov_diag.len();
        let mut cov = DenseMatrix::zeros(p, p);
        for (i, v) in cov_diag.iter().enumerate() {
            cov[(i, i)] = *v;
        }
        TobitFit {
            beta,
            sigma: 1.0,
            loglik: -10.0,
            cov_hessian: cov.clone(),
            cov_robust: cov,
            iterations: 0,
            converged: true,
            gradient_norm: 0.0,
            n_obs: 10,
            fingerprint: SampleFingerprint {
                n: 10,
                sum: 1.0,
                sum_sq: 1.0,
                lower: 0.0,
                upper: 1.0,
            },
        }
    }

    #[test]
    fn wald_zero_slopes() {
        let f = manual_fit(vec![0.7, 0.0, 0.0], vec![1.0, 0.5, 0.25, 0.1]);
        let w = wald_test(&f).unwrap();
        assert_eq!(w.stat, 0.0);
        assert_eq!(w.p_value, 1.0);
        assert_eq!(w.df, 2);
    }

    #[test]
    fn wald_single_slope() {
        let f = manual_fit(vec![0.3, 2.0], vec![1.0, 1.0, 0.1]);
        let w = wald_test(&f).unwrap();
        assert!((w.stat - 4.0).abs() < 1e-12);
        assert!((w.p_value - 0.0455).abs() < 5e-4);
    }

    #[test]
    fn wald_needs_slopes() {
        let f = manual_fit(vec![0.3], vec![1.0, 0.1]);
        assert_eq!(wald_test(&f), Err(TobitError::NoSlopes));
    }

    #[test]
    fn lr_identical_models() {
        let f = manual_fit(vec![0.3, 2.0], vec![1.0, 1.0, 0.1]);
        let t = lr_test(&f, &f).unwrap();
        assert_eq!((t.stat, t.p_value, t.df), (0.0, 1.0, 0));
    }

    #[test]
    fn lr_rejects_foreign_sample() {
        let a = manual_fit(vec![0.3, 2.0], vec![1.0, 1.0, 0.1]);
        let mut b = manual_fit(vec![0.3], vec![1.0, 0.1]);
        b.fingerprint.n = 11;
        assert_eq!(lr_test(&a, &b), Err(TobitError::SampleMismatch));
    }

    #[test]
    fn stars_follow_thresholds() {
        assert_eq!(significance_stars(0.009), "***");
        assert_eq!(significance_stars(0.01), "**");
        assert_eq!(significance_stars(0.049), "**");
        assert_eq!(significance_stars(0.05), "*");
        assert_eq!(significance_stars(0.0999), "*");
        assert_eq!(significance_stars(0.1), "");
    }

    #[test]
    fn censored_mean_limits() {
        // no censoring: the latent mean
        assert!((censored_mean(0.3, 0.2, f64::NEG_INFINITY, f64::INFINITY) - 0.3).abs() < 1e-15);
        // index far above the upper limit: pinned at the limit
        assert!((censored_mean(50.0, 1.0, 0.0, 1.0) - 1.0).abs() < 1e-12);
        assert!(censored_mean(-50.0, 1.0, 0.0, 1.0).abs() < 1e-12);
        // tiny scale, interior index
        assert!((censored_mean(0.4, 1e-6, 0.0, 1.0) - 0.4).abs() < 1e-12);
    }
}
