//! Brute-force reference implementations for the effx test suites.
//!
//! Nothing in here shares code with `effx-core`: linear programs are solved
//! by enumerating every basis, probabilities come from numerical
//! quadrature, and regressions use plain Gaussian elimination.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// `min c·x` subject to rows and `x_j ≥ 0` for every non-free `j`.
#[derive(Clone, Debug)]
pub struct OracleLp {
    pub c: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Sense, f64)>,
    pub free: Vec<bool>,
}

impl OracleLp {
    pub fn new(c: Vec<f64>) -> Self {
        let free = vec![false; c.len()];
        Self {
            c,
            rows: Vec::new(),
            free,
        }
    }

    pub fn row(mut self, a: Vec<f64>, sense: Sense, b: f64) -> Self {
        self.rows.push((a, sense, b));
        self
    }

    pub fn feasible(&self, x: &[f64], tol: f64) -> bool {
        for (j, v) in x.iter().enumerate() {
            if !self.free[j] && *v < -tol {
                return false;
            }
        }
        self.rows.iter().all(|(a, sense, b)| {
            let ax: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
            let scale = 1.0 + b.abs() + a.iter().zip(x).map(|(p, q)| (p * q).abs()).fold(0.0, f64::max);
            match sense {
                Sense::Le => ax <= b + tol * scale,
                Sense::Ge => ax >= b - tol * scale,
                Sense::Eq => (ax - b).abs() <= tol * scale,
            }
        })
    }
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting; `None` when (numerically) singular.
pub fn gaussian_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-11 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                let pivot_row = a[col].clone();
                for (dst, src) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *dst -= f * src;
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Visits every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 && idx[0] == n - k {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Best objective over all basic feasible points, or `None` if no vertex is
/// feasible. Correct for feasible problems that are bounded and whose
/// feasible set has a vertex (always true when every variable is `≥ 0`).
pub fn vertex_enumeration(lp: &OracleLp) -> Option<(f64, Vec<f64>)> {
    let d = lp.c.len();
    // Candidate active hyperplanes: every row, then every sign bound.
    let mut planes: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for (a, _, b) in &lp.rows {
        planes.push(a.clone());
        rhs.push(*b);
    }
    for j in 0..d {
        if !lp.free[j] {
            let mut e = vec![0.0; d];
            e[j] = 1.0;
            planes.push(e);
            rhs.push(0.0);
        }
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for_each_subset(planes.len(), d, |subset| {
        let a: Vec<Vec<f64>> = subset.iter().map(|&i| planes[i].clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&i| rhs[i]).collect();
        let Some(x) = gaussian_solve(a, b) else { return };
        if !lp.feasible(&x, 1e-9) {
            return;
        }
        let obj: f64 = lp.c.iter().zip(&x).map(|(c, v)| c * v).sum();
        if best.as_ref().is_none_or(|(o, _)| obj < *o) {
            best = Some((obj, x));
        }
    });
    best
}

/// A random LP that is feasible (a known interior-ish point satisfies every
/// row) and bounded (a budget row caps `Σx`). `d ≤ 8`, at most 12 rows.
pub fn random_bounded_lp(rng: &mut Rng8, d: usize, rows: usize) -> OracleLp {
    assert!((1..=8).contains(&d) && (1..=12).contains(&rows));
    let coef = Uniform::new(-5.0f64, 5.0).unwrap();
    let point = Uniform::new(0.0f64, 3.0).unwrap();
    let x0: Vec<f64> = (0..d).map(|_| point.sample(rng)).collect();
    let c: Vec<f64> = (0..d).map(|_| (coef.sample(rng) * 4.0).round() / 4.0).collect();
    let mut lp = OracleLp::new(c);
    let budget = x0.iter().sum::<f64>() + 1.0 + point.sample(rng) * 5.0;
    lp = lp.row(vec![1.0; d], Sense::Le, budget);
    for _ in 1..rows {
        let a: Vec<f64> = (0..d).map(|_| (coef.sample(rng) * 2.0).round() / 2.0).collect();
        let ax: f64 = a.iter().zip(&x0).map(|(p, q)| p * q).sum();
        let sense = match rng.random_range(0..10) {
            0 => Sense::Eq,
            1..=5 => Sense::Le,
            _ => Sense::Ge,
        };
        let slack = point.sample(rng);
        let b = match sense {
            Sense::Eq => ax,
            Sense::Le => ax + slack,
            Sense::Ge => ax - slack,
        };
        lp = lp.row(a, sense, b);
    }
    lp
}

/// A random degenerate LP: many rows pass through the same vertex.
pub fn random_degenerate_lp(rng: &mut Rng8, d: usize, rows: usize) -> OracleLp {
    let coef = Uniform::new(-3i32, 4).unwrap();
    let c: Vec<f64> = (0..d).map(|_| coef.sample(rng) as f64).collect();
    let mut lp = OracleLp::new(c).row(vec![1.0; d], Sense::Le, 4.0);
    for _ in 1..rows {
        let a: Vec<f64> = (0..d).map(|_| coef.sample(rng) as f64).collect();
        // every row is tight at the origin
        lp = lp.row(a, Sense::Le, 0.0);
    }
    lp
}

/// Input-oriented envelopment LP in the oracle's own encoding: variable 0 is
/// θ (≥ 0, which any optimum satisfies since inputs are positive), then λ.
pub fn dea_oracle_lp(inputs: &[Vec<f64>], outputs: &[Vec<f64>], j: usize, vrs: bool) -> OracleLp {
    let n = inputs.len();
    let mut c = vec![0.0; n + 1];
    c[0] = 1.0;
    let mut lp = OracleLp::new(c);
    for i in 0..inputs[0].len() {
        let mut a = vec![inputs[j][i]];
        a.extend(inputs.iter().map(|x| -x[i]));
        lp = lp.row(a, Sense::Ge, 0.0);
    }
    for o in 0..outputs[0].len() {
        let mut a = vec![0.0];
        a.extend(outputs.iter().map(|y| y[o]));
        lp = lp.row(a, Sense::Ge, outputs[j][o]);
    }
    if vrs {
        let mut a = vec![1.0; n + 1];
        a[0] = 0.0;
        lp = lp.row(a, Sense::Eq, 1.0);
    }
    lp
}

pub fn dea_oracle_score(inputs: &[Vec<f64>], outputs: &[Vec<f64>], j: usize, vrs: bool) -> f64 {
    vertex_enumeration(&dea_oracle_lp(inputs, outputs, j, vrs))
        .expect("λ = e_j is always feasible")
        .0
}

/// Adaptive Simpson quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

pub fn phi(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Φ(z) by quadrature of the density (accurate to ~1e-14 for |z| ≤ 8).
pub fn normal_cdf_quadrature(z: f64) -> f64 {
    if z >= 0.0 {
        0.5 + integrate(&phi, 0.0, z, 1e-15)
    } else {
        0.5 - integrate(&phi, z, 0.0, 1e-15)
    }
}

/// Upper tail of chi-square(1) by integrating its density: substituting
/// `x = t²` turns it into `2·∫_{√x}^{∞} φ(t) dt`.
pub fn chi_square1_sf_quadrature(x: f64) -> f64 {
    let r = x.sqrt();
    2.0 * integrate(&phi, r, r + 40.0, 1e-15)
}

/// Log-likelihood of a two-limit Tobit evaluated directly from the
/// textbook formula, probabilities from quadrature, no log-domain helpers.
pub fn tobit_loglik_reference(y: &[f64], x: &[Vec<f64>], beta: &[f64], sigma: f64, lower: f64, upper: f64) -> f64 {
    let mut total = 0.0;
    for (yi, xi) in y.iter().zip(x) {
        let mu: f64 = xi.iter().zip(beta).map(|(a, b)| a * b).sum();
        let term = if *yi == upper {
            normal_cdf_quadrature((mu - upper) / sigma)
        } else if *yi == lower {
            normal_cdf_quadrature((lower - mu) / sigma)
        } else {
            phi((yi - mu) / sigma) / sigma
        };
        total += term.ln();
    }
    total
}

/// `E[y]` of a normal `N(mu, σ²)` clipped to `[lower, upper]`, by
/// integrating the latent density over the uncensored band.
pub fn censored_mean_reference(mu: f64, sigma: f64, lower: f64, upper: f64) -> f64 {
    let below = normal_cdf_quadrature((lower - mu) / sigma);
    let above = 1.0 - normal_cdf_quadrature((upper - mu) / sigma);
    let band = integrate(&|t: f64| t * phi((t - mu) / sigma) / sigma, lower, upper, 1e-14);
    lower * below + upper * above + band
}

/// Ordinary least squares through the normal equations.
pub fn ols(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = x[0].len();
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for (row, yi) in x.iter().zip(y) {
        for a in 0..k {
            xty[a] += row[a] * yi;
            for b in 0..k {
                xtx[a][b] += row[a] * row[b];
            }
        }
    }
    gaussian_solve(xtx, xty).expect("full-rank design")
}

/// Draws from the two-limit censored model with an intercept and
/// `slopes.len()` covariates, each uniform on `[0, 1]`.
pub struct TwoLimitDraw {
    pub y: Vec<f64>,
    /// Rows of the design matrix, intercept first.
    pub x: Vec<Vec<f64>>,
}

pub fn simulate_two_limit(rng: &mut Rng8, n: usize, beta: &[f64], sigma: f64, lower: f64, upper: f64) -> TwoLimitDraw {
    let cov = Uniform::new(0.0f64, 1.0).unwrap();
    let noise = Normal::new(0.0, sigma).unwrap();
    let mut y = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = vec![1.0];
        row.extend((1..beta.len()).map(|_| cov.sample(rng)));
        let mu: f64 = row.iter().zip(beta).map(|(a, b)| a * b).sum();
        let latent = mu + noise.sample(rng);
        y.push(latent.clamp(lower, upper));
        x.push(row);
    }
    TwoLimitDraw { y, x }
}

/// Random positive input/output data for small DEA instances.
pub fn random_dea_data(rng: &mut Rng8, n: usize, m: usize, s: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let val = Uniform::new(1.0f64, 10.0).unwrap();
    let inputs = (0..n).map(|_| (0..m).map(|_| val.sample(rng)).collect()).collect();
    let outputs = (0..n).map(|_| (0..s).map(|_| val.sample(rng)).collect()).collect();
    (inputs, outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_are_complete() {
        let mut count = 0;
        for_each_subset(6, 3, |_| count += 1);
        assert_eq!(count, 20);
        let mut seen = Vec::new();
        for_each_subset(3, 3, |s| seen.push(s.to_vec()));
        assert_eq!(seen, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn triangle_vertices() {
        let lp = OracleLp::new(vec![-1.0, -1.0]).row(vec![1.0, 1.0], Sense::Le, 1.0);
        let (obj, _) = vertex_enumeration(&lp).unwrap();
        assert!((obj + 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_reference_values() {
        assert!((normal_cdf_quadrature(1.0) - 0.841_344_746_068_543).abs() < 1e-13);
        assert!((chi_square1_sf_quadrature(3.841) - 0.05).abs() < 5e-4);
        assert!((chi_square1_sf_quadrature(4.0) - 0.0455).abs() < 5e-4);
    }
}
