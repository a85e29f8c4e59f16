use alloc::vec::Vec;

use libm::{exp, log, sqrt};

use super::inference::robust_covariance_at;
use super::likelihood::{packed_loglik, score_and_hessian};
use super::{CensoredSample, Censoring, SampleFingerprint, TobitError};
use crate::numerics::{Cholesky, DenseMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TobitOptions {
    pub max_iterations: usize,
    /// Converged once the score's ∞-norm falls below this...
    pub gradient_tol: f64,
    /// ...and the last accepted step moved the log-likelihood by less than
    /// this, relative to `1 + |loglik|`.
    pub loglik_rel_tol: f64,
    pub max_halvings: usize,
}

impl Default for TobitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tol: 1e-8,
            loglik_rel_tol: 1e-12,
            max_halvings: 60,
        }
    }
}

/// Maximum-likelihood estimate with Hessian-based and sandwich
/// covariances, both in `(β, ln σ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TobitFit {
    pub beta: Vec<f64>,
    pub sigma: f64,
    pub loglik: f64,
    pub cov_hessian: DenseMatrix,
    pub cov_robust: DenseMatrix,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    pub n_obs: usize,
    pub(crate) fingerprint: SampleFingerprint,
}

impl TobitFit {
    pub fn k(&self) -> usize {
        self.beta.len()
    }

    pub fn fingerprint(&self) -> SampleFingerprint {
        self.fingerprint
    }

    /// Delta-method standard error of σ from the Hessian covariance.
    pub fn sigma_se(&self) -> f64 {
        let k = self.k();
        self.sigma * sqrt(self.cov_hessian[(k, k)].max(0.0))
    }

    pub fn hessian_se(&self) -> Vec<f64> {
        self.cov_hessian
            .diagonal()
            .into_iter()
            .map(|v| sqrt(v.max(0.0)))
            .collect()
    }

    pub fn robust_se(&self) -> Vec<f64> {
        self.cov_robust
            .diagonal()
            .into_iter()
            .map(|v| sqrt(v.max(0.0)))
            .collect()
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, g| m.max(g.abs()))
}

/// Least squares over all rows (censored responses taken at their limit).
fn start_values(s: &CensoredSample) -> Result<(Vec<f64>, f64), TobitError> {
    let gram = s.x().gram();
    // Rank check on the correlation-scaled Gram matrix.
    let k = s.k();
    let mut scaled = gram.clone();
    for a in 0..k {
        for b in 0..k {
            let d = sqrt(gram[(a, a)] * gram[(b, b)]);
            scaled[(a, b)] = if d > 0.0 { gram[(a, b)] / d } else { 0.0 };
        }
    }
    if Cholesky::factor(&scaled).is_err() {
        return Err(TobitError::NotIdentified("design matrix is rank deficient"));
    }
    let xty: Vec<f64> = (0..k)
        .map(|a| (0..s.n()).map(|i| s.x()[(i, a)] * s.y()[i]).sum())
        .collect();
    let beta = Cholesky::factor(&gram)
        .and_then(|c| c.solve(&xty))
        .map_err(|_| TobitError::NotIdentified("design matrix is rank deficient"))?;
    let fitted = s.x().mul_vec(&beta);
    let rss: f64 = s.y().iter().zip(&fitted).map(|(y, f)| (y - f) * (y - f)).sum();
    let mut sigma = sqrt(rss / s.n() as f64);
    if !(sigma > 1e-8) {
        let spread = s.y().iter().fold(0.0f64, |m, y| m.max(y.abs()));
        sigma = 1e-3 * (1.0 + spread);
    }
    Ok((beta, sigma))
}

/// Newton ascent with backtracking on `(β, ln σ)`, started from least
/// squares. Accepted steps never decrease the log-likelihood by more than
/// its rounding resolution `loglik_rel_tol·(1 + |ℓ|)`.
pub fn fit(s: &CensoredSample, opts: &TobitOptions) -> Result<TobitFit, TobitError> {
    if s.count(Censoring::Interior) == 0 {
        return Err(TobitError::NotIdentified("no uncensored observations"));
    }
    let k = s.k();
    let (beta0, sigma0) = start_values(s)?;
    let mut theta: Vec<f64> = beta0;
    theta.push(log(sigma0));

    let mut last_change = f64::INFINITY;
    let mut iterations = 0usize;
    loop {
        let sh = score_and_hessian(s, &theta[..k], exp(theta[k]))?;
        let gnorm = inf_norm(&sh.gradient);
        let small_gradient = gnorm < opts.gradient_tol;
        if small_gradient && last_change < opts.loglik_rel_tol {
            return finish(s, theta, iterations, gnorm);
        }
        if iterations >= opts.max_iterations {
            return Err(TobitError::NoConvergence {
                iterations,
                gradient_norm: gnorm,
            });
        }

        let mut neg_h = sh.hessian.clone();
        neg_h.scale(-1.0);
        let newton = Cholesky::factor(&neg_h).and_then(|c| c.solve(&sh.gradient)).ok();
        let mut directions: Vec<Vec<f64>> = Vec::with_capacity(2);
        let newton_ok = newton.is_some();
        if let Some(d) = newton {
            directions.push(d);
        }
        // steepest ascent, normalized so the first trial moves at most one unit
        let scale = 1.0 / gnorm.max(1.0);
        directions.push(sh.gradient.iter().map(|g| g * scale).collect());

        let mut accepted = None;
        // Close to the optimum the predicted gain drops below what the summed
        // log-likelihood can resolve, so Armijo would only see rounding noise.
        // There the full Newton step is judged by the score instead, and may
        // not lose more than that resolution. If even that fails the score is
        // at its floating-point floor (badly scaled samples, tiny σ) and the
        // current point is as converged as the arithmetic allows.
        if let Some(d) = directions.first().filter(|_| newton_ok) {
            let gain = 0.5 * d.iter().zip(&sh.gradient).map(|(a, g)| a * g).sum::<f64>();
            let noise = opts.loglik_rel_tol * (1.0 + sh.loglik.abs());
            if gain <= noise {
                let cand: Vec<f64> = theta.iter().zip(d).map(|(a, b)| a + b).collect();
                if let Ok(next) = score_and_hessian(s, &cand[..k], exp(cand[k])) {
                    if next.loglik >= sh.loglik - noise && inf_norm(&next.gradient) < gnorm {
                        accepted = Some((cand, next.loglik));
                    }
                }
                if accepted.is_none() && last_change < opts.loglik_rel_tol {
                    return finish(s, theta, iterations, gnorm);
                }
            }
        }
        for dir in &directions {
            if accepted.is_some() {
                break;
            }
            let slope: f64 = dir.iter().zip(&sh.gradient).map(|(d, g)| d * g).sum();
            let mut t = 1.0;
            for _ in 0..opts.max_halvings {
                let cand: Vec<f64> = theta.iter().zip(dir).map(|(a, d)| a + t * d).collect();
                if let Ok(ll) = packed_loglik(s, &cand) {
                    if ll >= sh.loglik + 1e-4 * t * slope {
                        accepted = Some((cand, ll));
                        break;
                    }
                }
                t *= 0.5;
            }
        }
        iterations += 1;
        match accepted {
            Some((cand, ll)) => {
                last_change = (ll - sh.loglik).abs() / (1.0 + sh.loglik.abs());
                theta = cand;
            }
            // No ascent is representable at this precision.
            None if small_gradient => return finish(s, theta, iterations, gnorm),
            None => {
                return Err(TobitError::NoConvergence {
                    iterations,
                    gradient_norm: gnorm,
                })
            }
        }
    }
}

fn finish(s: &CensoredSample, theta: Vec<f64>, iterations: usize, gradient_norm: f64) -> Result<TobitFit, TobitError> {
    let k = s.k();
    let sigma = exp(theta[k]);
    let beta = theta[..k].to_vec();
    let sh = score_and_hessian(s, &beta, sigma)?;
    let mut neg_h = sh.hessian;
    neg_h.scale(-1.0);
    let chol = Cholesky::factor(&neg_h).map_err(TobitError::NotPositiveDefinite)?;
    let cov_hessian = chol.inverse();
    let cov_robust = robust_covariance_at(s, &beta, sigma, &cov_hessian)?;
    Ok(TobitFit {
        beta,
        sigma,
        loglik: sh.loglik,
        cov_hessian,
        cov_robust,
        iterations,
        converged: true,
        gradient_norm,
        n_obs: s.n(),
        fingerprint: s.fingerprint(),
    })
}

/// Fit of the intercept-only model on the same responses.
pub fn fit_intercept_only(s: &CensoredSample, opts: &TobitOptions) -> Result<TobitFit, TobitError> {
    fit(&s.intercept_only(), opts)
}
