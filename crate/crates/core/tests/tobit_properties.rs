use effx_core::numerics::fd_gradient;
use effx_core::tobit::{
    fit, infer, log_likelihood, lr_test, marginal_effects, pseudo_r2, score_and_hessian, wald_test, PseudoR2Variant,
};
use effx_core::{CensoredSample, DenseMatrix, TobitOptions};
use effx_testkit::{censored_mean_reference, ols, rng, simulate_two_limit, tobit_loglik_reference, TwoLimitDraw};
use proptest::prelude::*;
use rand::Rng;

const TRUE_BETA: [f64; 2] = [0.5, 0.3];
const TRUE_SIGMA: f64 = 0.2;

fn sample(d: &TwoLimitDraw, lower: f64, upper: f64) -> CensoredSample {
    CensoredSample::new(d.y.clone(), DenseMatrix::from_rows(&d.x).unwrap(), lower, upper).unwrap()
}

fn simulated(seed: u64, n: usize, beta: &[f64], sigma: f64) -> (TwoLimitDraw, CensoredSample) {
    let d = simulate_two_limit(&mut rng(seed), n, beta, sigma, 0.0, 1.0);
    let s = sample(&d, 0.0, 1.0);
    (d, s)
}

fn opts() -> TobitOptions {
    TobitOptions::default()
}

#[test]
fn analytic_score_matches_finite_differences() {
    for sample_seed in 0..5u64 {
        let mut r = rng(100 + sample_seed);
        let k = r.random_range(1..=3);
        let beta: Vec<f64> = (0..=k).map(|_| r.random_range(-0.5..1.0)).collect();
        let (_, s) = simulated(sample_seed, 150, &beta, 0.3);
        assert!(s.count(effx_core::tobit::Censoring::Interior) < s.n());
        for _ in 0..20 {
            let b: Vec<f64> = beta.iter().map(|v| v + r.random_range(-0.3..0.3)).collect();
            let sigma = r.random_range(0.1..0.8);
            let sh = score_and_hessian(&s, &b, sigma).unwrap();
            let mut theta = b.clone();
            theta.push(sigma.ln());
            let kk = b.len();
            let numeric = fd_gradient(
                |t: &[f64]| log_likelihood(&s, &t[..kk], t[kk].exp()).unwrap(),
                &theta,
                1e-5,
            )
            .unwrap();
            for (a, n) in sh.gradient.iter().zip(&numeric) {
                assert!((a - n).abs() <= 1e-5 * a.abs().max(1.0), "analytic {a} vs numeric {n}");
            }
            // the Hessian is the derivative of the gradient
            for c in 0..=kk {
                let col = fd_gradient(
                    |t: &[f64]| score_and_hessian(&s, &t[..kk], t[kk].exp()).unwrap().gradient[c],
                    &theta,
                    1e-5,
                )
                .unwrap();
                for (row, n) in col.iter().enumerate() {
                    let a = sh.hessian[(row, c)];
                    assert!((a - n).abs() <= 1e-5 * a.abs().max(1.0), "H[{row},{c}] {a} vs {n}");
                }
            }
            assert!(sh.hessian.max_asymmetry() <= 1e-10);
        }
    }
}

#[test]
fn loglik_matches_direct_formula() {
    for seed in 0..10 {
        let (d, s) = simulated(seed, 10, &TRUE_BETA, 0.4);
        let b = [0.45, 0.35];
        let want = tobit_loglik_reference(&d.y, &d.x, &b, 0.3, 0.0, 1.0);
        let got = log_likelihood(&s, &b, 0.3).unwrap();
        assert!((got - want).abs() <= 1e-10 * (1.0 + want.abs()), "{got} vs {want}");
    }
}

#[test]
fn seeded_simulation_recovers_truth() {
    let (_, s) = simulated(2024, 500, &TRUE_BETA, TRUE_SIGMA);
    let f = fit(&s, &opts()).unwrap();
    assert!(f.converged);
    let se = f.robust_se();
    for (j, (b, t)) in f.beta.iter().zip(TRUE_BETA).enumerate() {
        assert!((b - t).abs() <= 3.0 * se[j], "beta[{j}] = {b}");
    }
    // ln σ is the last parameter
    assert!((f.sigma.ln() - TRUE_SIGMA.ln()).abs() <= 3.0 * se[2]);
    let sh = score_and_hessian(&s, &f.beta, f.sigma).unwrap();
    assert!(sh.gradient.iter().all(|g| g.abs() < 1e-6));
    assert!(f.cov_robust.max_asymmetry() <= 1e-12 && f.cov_hessian.max_asymmetry() <= 1e-12);
    assert!(f
        .cov_robust
        .diagonal()
        .iter()
        .chain(&f.cov_hessian.diagonal())
        .all(|v| *v >= 0.0));
}

#[test]
fn robust_and_model_based_errors_agree_when_well_specified() {
    let (_, s) = simulated(77, 5000, &TRUE_BETA, TRUE_SIGMA);
    let f = fit(&s, &opts()).unwrap();
    for (r, h) in f.robust_se().iter().zip(f.hessian_se()) {
        assert!((r / h - 1.0).abs() <= 0.25, "robust {r} vs hessian {h}");
    }
}

#[test]
fn hessian_intervals_have_nominal_coverage() {
    let reps = 200;
    let mut covered = 0usize;
    let mut total = 0usize;
    for seed in 0..reps {
        let (_, s) = simulated(10_000 + seed, 500, &TRUE_BETA, TRUE_SIGMA);
        let f = fit(&s, &opts()).unwrap();
        let se = f.hessian_se();
        let est = [f.beta[0], f.beta[1], f.sigma.ln()];
        let truth = [TRUE_BETA[0], TRUE_BETA[1], TRUE_SIGMA.ln()];
        for j in 0..3 {
            covered += ((est[j] - truth[j]).abs() <= 1.959_963_985 * se[j]) as usize;
            total += 1;
        }
    }
    let coverage = covered as f64 / total as f64;
    assert!((0.90..=0.99).contains(&coverage), "coverage {coverage}");
}

#[test]
fn intercept_only_robust_variance_is_sample_variance_over_n() {
    let y = vec![0.21, 0.35, 0.52, 0.61, 0.74, 0.43, 0.28, 0.66, 0.12];
    let n = y.len() as f64;
    let s = CensoredSample::new(
        y.clone(),
        DenseMatrix::from_row_major(y.len(), 1, vec![1.0; y.len()]).unwrap(),
        0.0,
        1.0,
    )
    .unwrap();
    let f = fit(&s, &opts()).unwrap();
    let mean = y.iter().sum::<f64>() / n;
    let ss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    assert!((f.cov_robust[(0, 0)] - ss / (n * n)).abs() <= 1e-8);
}

#[test]
fn zero_censoring_reduces_to_least_squares() {
    let d = simulate_two_limit(
        &mut rng(3),
        200,
        &[0.5, 0.3, -0.2],
        0.05,
        f64::NEG_INFINITY,
        f64::INFINITY,
    );
    for lims in [(0.0, 1.0), (f64::NEG_INFINITY, f64::INFINITY)] {
        let s = sample(&d, lims.0, lims.1);
        assert_eq!(s.count(effx_core::tobit::Censoring::Interior), s.n());
        let f = fit(&s, &opts()).unwrap();
        let b = ols(&d.x, &d.y);
        for (p, q) in f.beta.iter().zip(&b) {
            assert!((p - q).abs() <= 1e-8);
        }
        let rss: f64 =
            d.x.iter()
                .zip(&d.y)
                .map(|(x, y)| {
                    let e = y - x.iter().zip(&b).map(|(a, c)| a * c).sum::<f64>();
                    e * e
                })
                .sum();
        assert!((f.sigma * f.sigma - rss / d.y.len() as f64).abs() <= 1e-8);
    }
}

#[test]
fn strong_signal_tests_reject() {
    let (_, s) = simulated(9, 30, &[0.2, 0.9], 0.05);
    let report = infer(&s, &opts()).unwrap();
    assert_eq!(report.wald.df, 1);
    assert!(report.wald.p_value < 0.01);
    assert!(report.lr.stat > 0.0 && report.lr.p_value < 0.01);
    assert!(
        report.pseudo_r2.value > 0.0 && report.pseudo_r2.value < 1.0,
        "{:?} ll {} null {}",
        report.pseudo_r2,
        report.loglik,
        report.null.loglik
    );
    for c in &report.coefficients {
        let expected = effx_core::tobit::significance_stars(c.p_value);
        assert_eq!(c.stars, expected);
    }
}

#[test]
fn pseudo_r2_edge_cases() {
    let (_, s) = simulated(4, 300, &TRUE_BETA, TRUE_SIGMA);
    let null_sample = s.intercept_only();
    let null = fit(&null_sample, &opts()).unwrap();
    let r0 = pseudo_r2(&null_sample, &null, &null);
    assert_eq!(r0.value, 0.0, "{r0:?}");

    // near-perfect interior fit: the null log-likelihood is positive
    let mut r = rng(8);
    let x: Vec<Vec<f64>> = (0..100).map(|_| vec![1.0, r.random_range(0.0..1.0)]).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|v| 0.3 + 0.4 * v[1] + r.random_range(-1e-4..1e-4))
        .collect();
    let s = CensoredSample::new(y, DenseMatrix::from_rows(&x).unwrap(), 0.0, 1.0).unwrap();
    let full = fit(&s, &opts()).unwrap();
    let null = fit(&s.intercept_only(), &opts()).unwrap();
    let r2 = pseudo_r2(&s, &full, &null);
    assert_eq!(r2.variant, PseudoR2Variant::SquaredCorrelation);
    assert!(r2.value > 0.9999);
    // with σ tiny and every index interior the bracket probability is 1
    for (me, b) in marginal_effects(&s, &full).iter().zip(&full.beta) {
        assert!((me - b).abs() <= 1e-9);
    }
}

#[test]
fn marginal_effects_match_differenced_censored_mean() {
    let (d, s) = simulated(21, 500, &TRUE_BETA, TRUE_SIGMA);
    let f = fit(&s, &opts()).unwrap();
    let me = marginal_effects(&s, &f);
    let h = 1e-4;
    for (j, &me_j) in me.iter().enumerate() {
        let mut acc = 0.0;
        for row in &d.x {
            let mu: f64 = row.iter().zip(&f.beta).map(|(a, b)| a * b).sum();
            let step = h * f.beta[j];
            acc += (censored_mean_reference(mu + step, f.sigma, 0.0, 1.0)
                - censored_mean_reference(mu - step, f.sigma, 0.0, 1.0))
                / (2.0 * h);
        }
        let oracle = acc / d.x.len() as f64;
        assert!((me_j - oracle).abs() <= 1e-6, "effect {j}: {me_j} vs {oracle}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn row_permutation_invariance(seed in any::<u64>(), shuffle in any::<u64>()) {
        let (d, s) = simulated(seed, 120, &TRUE_BETA, 0.3);
        let mut order: Vec<usize> = (0..d.y.len()).collect();
        let mut r = rng(shuffle);
        for i in (1..order.len()).rev() {
            order.swap(i, r.random_range(0..=i));
        }
        let permuted = TwoLimitDraw {
            y: order.iter().map(|&i| d.y[i]).collect(),
            x: order.iter().map(|&i| d.x[i].clone()).collect(),
        };
        let a = fit(&s, &opts()).unwrap();
        let b = fit(&sample(&permuted, 0.0, 1.0), &opts()).unwrap();
        for (p, q) in a.beta.iter().zip(&b.beta) {
            prop_assert!((p - q).abs() <= 1e-10);
        }
        prop_assert!((a.sigma - b.sigma).abs() <= 1e-10);
        let null_a = fit(&s.intercept_only(), &opts()).unwrap();
        let null_b = fit(&sample(&permuted, 0.0, 1.0).intercept_only(), &opts()).unwrap();
        let lr_a = lr_test(&a, &null_a).unwrap();
        let lr_b = lr_test(&b, &null_b).unwrap();
        prop_assert!(lr_a.stat >= 0.0);
        prop_assert!((lr_a.stat - lr_b.stat).abs() <= 1e-8);
    }

    #[test]
    fn covariate_rescaling(seed in any::<u64>(), log_a in -3.0f64..3.0) {
        let a = 10f64.powf(log_a);
        let (d, s) = simulated(seed, 150, &[0.4, 0.3, 0.2], 0.25);
        let scaled = TwoLimitDraw {
            y: d.y.clone(),
            x: d.x.iter().map(|r| vec![r[0], r[1] * a, r[2]]).collect(),
        };
        let s2 = sample(&scaled, 0.0, 1.0);
        let r1 = infer(&s, &opts()).unwrap();
        let r2 = infer(&s2, &opts()).unwrap();
        let close = |p: f64, q: f64| (p - q).abs() <= 1e-8 * (1.0 + p.abs());
        prop_assert!(close(r1.full.beta[1], r2.full.beta[1] * a));
        prop_assert!(close(r1.full.beta[0], r2.full.beta[0]));
        prop_assert!(close(r1.full.beta[2], r2.full.beta[2]));
        prop_assert!(close(r1.loglik, r2.loglik));
        prop_assert!(close(r1.sigma, r2.sigma));
        prop_assert!(close(r1.wald.stat, r2.wald.stat));
        prop_assert!(close(r1.lr.stat, r2.lr.stat));
        // the effect per unit of the rescaled covariate shrinks by 1/a
        prop_assert!(close(r1.marginal_effects[1], r2.marginal_effects[1] * a));
        prop_assert!(close(r1.marginal_effects[0], r2.marginal_effects[0]));
        prop_assert!(close(r1.marginal_effects[2], r2.marginal_effects[2]));
        prop_assert!((0.0..=1.0).contains(&r1.wald.p_value));
    }

    #[test]
    fn wald_is_invariant_and_bounded(seed in any::<u64>()) {
        let (_, s) = simulated(seed, 80, &[0.5, 0.0], 0.3);
        let f = fit(&s, &opts()).unwrap();
        let w = wald_test(&f).unwrap();
        prop_assert!(w.stat >= 0.0 && (0.0..=1.0).contains(&w.p_value));
    }
}
