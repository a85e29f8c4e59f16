use alloc::vec::Vec;

use super::NumericsError;

/// Central-difference gradient of `f` at `x` with step `h`.
pub fn fd_gradient<F>(f: F, x: &[f64], h: f64) -> Result<Vec<f64>, NumericsError>
where
    F: Fn(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        if !up.is_finite() || !down.is_finite() {
            return Err(NumericsError::NonFiniteEvaluation { index: i });
        }
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn square() {
        let g = fd_gradient(|x| x[0] * x[0], &[3.0], 1e-5).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-6);
    }

    #[test]
    fn constant_is_flat() {
        let g = fd_gradient(|_| 4.2, &[1.0, -2.0, 0.0], 1e-4).unwrap();
        assert_eq!(g, vec![0.0; 3]);
    }

    #[test]
    fn non_finite_is_an_error() {
        let err = fd_gradient(|x| libm::log(x[0]), &[0.0], 1e-3).unwrap_err();
        assert_eq!(err, NumericsError::NonFiniteEvaluation { index: 0 });
    }
}
