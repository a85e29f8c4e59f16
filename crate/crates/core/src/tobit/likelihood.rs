use alloc::vec;
use alloc::vec::Vec;

use libm::exp;

use super::{CensoredSample, Censoring, TobitError};
use crate::numerics::{log_normal_cdf, log_normal_pdf, mills_ratio, DenseMatrix};

/// Log-likelihood contribution of one row and its derivatives with respect
/// to the linear index `μ = xβ` and `τ = ln σ`.
#[derive(Clone, Copy, Debug)]
struct RowTerms {
    ll: f64,
    d_mu: f64,
    d_tau: f64,
    h_mu_mu: f64,
    h_mu_tau: f64,
    h_tau_tau: f64,
}

fn row_terms(status: Censoring, y: f64, mu: f64, sigma: f64, lower: f64, upper: f64) -> RowTerms {
    match status {
        Censoring::Interior => {
            let z = (y - mu) / sigma;
            RowTerms {
                ll: log_normal_pdf(z) - libm::log(sigma),
                d_mu: z / sigma,
                d_tau: z * z - 1.0,
                h_mu_mu: -1.0 / (sigma * sigma),
                h_mu_tau: -2.0 * z / sigma,
                h_tau_tau: -2.0 * z * z,
            }
        }
        Censoring::AtLower => {
            let a = (lower - mu) / sigma;
            let lam = mills_ratio(a);
            let curv = a * (a + lam);
            RowTerms {
                ll: log_normal_cdf(a),
                d_mu: -lam / sigma,
                d_tau: -lam * a,
                h_mu_mu: -lam * (a + lam) / (sigma * sigma),
                h_mu_tau: lam * (1.0 - curv) / sigma,
                h_tau_tau: lam * a * (1.0 - curv),
            }
        }
        Censoring::AtUpper => {
            let b = (mu - upper) / sigma;
            let lam = mills_ratio(b);
            let curv = b * (b + lam);
            RowTerms {
                ll: log_normal_cdf(b),
                d_mu: lam / sigma,
                d_tau: -lam * b,
                h_mu_mu: -lam * (b + lam) / (sigma * sigma),
                h_mu_tau: lam * (curv - 1.0) / sigma,
                h_tau_tau: lam * b * (1.0 - curv),
            }
        }
    }
}

fn linear_index(x: &DenseMatrix, i: usize, beta: &[f64]) -> f64 {
    x.row(i).iter().zip(beta).map(|(a, b)| a * b).sum()
}

fn check_params(s: &CensoredSample, beta: &[f64], sigma: f64) -> Result<(), TobitError> {
    if beta.len() != s.k() {
        return Err(TobitError::InvalidSample(alloc::format!(
            "expected {} coefficients, got {}",
            s.k(),
            beta.len()
        )));
    }
    if !(sigma > 0.0) || !sigma.is_finite() || beta.iter().any(|b| !b.is_finite()) {
        return Err(TobitError::NonFinite);
    }
    Ok(())
}

/// Censored-normal log-likelihood, accumulated in row order.
pub fn log_likelihood(s: &CensoredSample, beta: &[f64], sigma: f64) -> Result<f64, TobitError> {
    check_params(s, beta, sigma)?;
    let mut total = 0.0;
    for i in 0..s.n() {
        let mu = linear_index(s.x(), i, beta);
        total += row_terms(s.status()[i], s.y()[i], mu, sigma, s.lower(), s.upper()).ll;
    }
    if total.is_finite() {
        Ok(total)
    } else {
        Err(TobitError::NonFinite)
    }
}

/// Gradient and Hessian of the log-likelihood in `(β, ln σ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreHessian {
    pub loglik: f64,
    pub gradient: Vec<f64>,
    pub hessian: DenseMatrix,
}

pub fn score_and_hessian(s: &CensoredSample, beta: &[f64], sigma: f64) -> Result<ScoreHessian, TobitError> {
    check_params(s, beta, sigma)?;
    let k = s.k();
    let p = k + 1;
    let mut loglik = 0.0;
    let mut gradient = vec![0.0; p];
    let mut hessian = DenseMatrix::zeros(p, p);
    for i in 0..s.n() {
        let x = s.x().row(i);
        let mu = linear_index(s.x(), i, beta);
        let t = row_terms(s.status()[i], s.y()[i], mu, sigma, s.lower(), s.upper());
        loglik += t.ll;
        for a in 0..k {
            gradient[a] += t.d_mu * x[a];
            for b in a..k {
                hessian[(a, b)] += t.h_mu_mu * x[a] * x[b];
            }
            hessian[(a, k)] += t.h_mu_tau * x[a];
        }
        gradient[k] += t.d_tau;
        hessian[(k, k)] += t.h_tau_tau;
    }
    hessian.mirror_upper();
    if !loglik.is_finite() || gradient.iter().any(|g| !g.is_finite()) || !hessian.is_finite() {
        return Err(TobitError::NonFinite);
    }
    Ok(ScoreHessian {
        loglik,
        gradient,
        hessian,
    })
}

/// Per-row score vectors in `(β, ln σ)`, one row of the result per
/// observation.
pub fn row_scores(s: &CensoredSample, beta: &[f64], sigma: f64) -> Result<DenseMatrix, TobitError> {
    check_params(s, beta, sigma)?;
    let k = s.k();
    let mut out = DenseMatrix::zeros(s.n(), k + 1);
    for i in 0..s.n() {
        let x = s.x().row(i);
        let mu = linear_index(s.x(), i, beta);
        let t = row_terms(s.status()[i], s.y()[i], mu, sigma, s.lower(), s.upper());
        for a in 0..k {
            out[(i, a)] = t.d_mu * x[a];
        }
        out[(i, k)] = t.d_tau;
    }
    if !out.is_finite() {
        return Err(TobitError::NonFinite);
    }
    Ok(out)
}

/// Log-likelihood as a function of the packed vector `(β, ln σ)`.
pub(crate) fn packed_loglik(s: &CensoredSample, theta: &[f64]) -> Result<f64, TobitError> {
    let k = s.k();
    log_likelihood(s, &theta[..k], exp(theta[k]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_row(y: f64, lower: f64, upper: f64) -> CensoredSample {
        let x = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
        CensoredSample::new(vec![y], x, lower, upper).unwrap()
    }

    #[test]
    fn interior_at_mean() {
        let s = one_row(0.4, 0.0, 1.0);
        let ll = log_likelihood(&s, &[0.4], 1.0).unwrap();
        assert!((ll + 0.918_938_533_204_672_7).abs() < 1e-12);
    }

    #[test]
    fn upper_limit_at_index() {
        let s = one_row(1.0, 0.0, 1.0);
        let ll = log_likelihood(&s, &[1.0], 1.0).unwrap();
        assert!((ll + core::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn lower_limit_at_index() {
        let s = one_row(0.0, 0.0, 1.0);
        let ll = log_likelihood(&s, &[0.0], 1.0).unwrap();
        assert!((ll + core::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_scale() {
        let s = one_row(0.5, 0.0, 1.0);
        assert_eq!(log_likelihood(&s, &[0.5], 0.0), Err(TobitError::NonFinite));
        assert!(log_likelihood(&s, &[0.5, 1.0], 1.0).is_err());
    }

    #[test]
    fn far_tail_rows_stay_finite() {
        let s = one_row(1.0, 0.0, 1.0);
        // index far below the upper limit: Φ underflows, ln Φ must not
        let sh = score_and_hessian(&s, &[-80.0], 1.0).unwrap();
        assert!(sh.loglik < -3000.0 && sh.loglik.is_finite());
        assert!(sh.gradient.iter().all(|g| g.is_finite()));
    }
}
