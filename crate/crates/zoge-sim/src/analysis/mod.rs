//! Ensemble statistics, numerical derivatives, and curve fitting.

mod fit;
mod phase;

pub use fit::{
    fit_power_law, fit_split_pearson7, pearson7_split, PearsonFit, PowerLawFit,
};
pub use phase::{
    contour_crossings, critical_bounds, critical_bounds_smoothed, upper_critical_bound,
    CriticalBounds, PhaseDiagram,
};

use crate::error::{Error, Result};

/// A disorder-averaged curve over a parameter grid.
#[derive(Debug, Clone)]
pub struct EnsembleCurve {
    pub x: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_realizations: usize,
    /// What was averaged (realizations, seeds, time window).
    pub meta: String,
}

/// Mean of the tail of a time series with an autocorrelation-aware
/// standard error.
///
/// Averages over t in [f T, T] where T is the last sample time and
/// f = `window_fraction` (0.5 by convention). The effective sample size is
/// reduced by the lag-1 autocorrelation of the windowed samples.
pub fn time_average_equilibrium(
    times: &[f64],
    values: &[f64],
    window_fraction: f64,
) -> Result<(f64, f64)> {
    if times.len() != values.len() {
        return Err(Error::invalid("times and values differ in length"));
    }
    if !(0.0..1.0).contains(&window_fraction) {
        return Err(Error::invalid("window fraction must lie in [0, 1)"));
    }
    let t_end = *times.last().ok_or_else(|| Error::SeriesTooShort("empty series".into()))?;
    let t_start = window_fraction * t_end;
    let window: Vec<f64> = times
        .iter()
        .zip(values.iter())
        .filter(|(&t, _)| t >= t_start)
        .map(|(_, &v)| v)
        .collect();
    if window.len() < 8 {
        return Err(Error::SeriesTooShort(format!(
            "only {} samples fall in the averaging window [{t_start:.3}, {t_end:.3}]; \
             at least 8 are required",
            window.len()
        )));
    }
    let m = window.len() as f64;
    let mean = window.iter().sum::<f64>() / m;
    let var = window.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    if var == 0.0 {
        return Ok((mean, 0.0));
    }
    let rho: f64 = window
        .windows(2)
        .map(|w| (w[0] - mean) * (w[1] - mean))
        .sum::<f64>()
        / window.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    let rho = rho.clamp(-0.99, 0.99);
    let ess = (m * (1.0 - rho) / (1.0 + rho)).clamp(1.0, m);
    Ok((mean, (var / ess).sqrt()))
}

/// Pointwise mean and standard error over realizations sharing one grid.
pub fn disorder_average(x: &[f64], curves: &[Vec<f64>], meta: &str) -> Result<EnsembleCurve> {
    if curves.len() < 2 {
        return Err(Error::invalid("need at least 2 realizations to average"));
    }
    if curves.iter().any(|c| c.len() != x.len()) {
        return Err(Error::invalid("realization grids do not match"));
    }
    let n = curves.len() as f64;
    let mut mean = vec![0.0; x.len()];
    let mut stderr = vec![0.0; x.len()];
    for (i, m) in mean.iter_mut().enumerate() {
        *m = curves.iter().map(|c| c[i]).sum::<f64>() / n;
    }
    for (i, s) in stderr.iter_mut().enumerate() {
        let var = curves.iter().map(|c| (c[i] - mean[i]).powi(2)).sum::<f64>() / (n - 1.0);
        *s = (var / n).sqrt();
    }
    Ok(EnsembleCurve {
        x: x.to_vec(),
        mean,
        stderr,
        n_realizations: curves.len(),
        meta: meta.to_string(),
    })
}

/// Finite-difference derivative of order 1 or 2 on a (near-)uniform grid.
///
/// Central three-point formulas in the interior (exact for the nonuniform
/// spacing), one-sided at the edges.
pub fn numeric_derivative(x: &[f64], y: &[f64], order: u8) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::invalid("grid and values differ in length"));
    }
    let n = x.len();
    if n < 5 {
        return Err(Error::invalid("derivative needs at least 5 points"));
    }
    if !(order == 1 || order == 2) {
        return Err(Error::invalid("derivative order must be 1 or 2"));
    }
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let h1 = x[i] - x[i - 1];
        let h2 = x[i + 1] - x[i];
        if order == 1 {
            out[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1]
                + (h2 - h1) / (h1 * h2) * y[i]
                + h1 / (h2 * (h1 + h2)) * y[i + 1];
        } else {
            out[i] = 2.0 / (h1 * (h1 + h2)) * y[i - 1] - 2.0 / (h1 * h2) * y[i]
                + 2.0 / (h2 * (h1 + h2)) * y[i + 1];
        }
    }
    if order == 1 {
        let h1 = x[1] - x[0];
        let h2 = x[2] - x[1];
        out[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0]
            + (h1 + h2) / (h1 * h2) * y[1]
            - h1 / (h2 * (h1 + h2)) * y[2];
        let g1 = x[n - 1] - x[n - 2];
        let g2 = x[n - 2] - x[n - 3];
        out[n - 1] = (2.0 * g1 + g2) / (g1 * (g1 + g2)) * y[n - 1]
            - (g1 + g2) / (g1 * g2) * y[n - 2]
            + g1 / (g2 * (g1 + g2)) * y[n - 3];
    } else {
        out[0] = out[1];
        out[n - 1] = out[n - 2];
    }
    Ok(out)
}

/// Moving least-squares quadratic smoother (odd window), for optional
/// pre-smoothing of noisy curves before differentiation.
pub fn smooth_quadratic(y: &[f64], window: usize) -> Result<Vec<f64>> {
    if window % 2 == 0 || window < 5 {
        return Err(Error::invalid("smoothing window must be odd and >= 5"));
    }
    if y.len() < window {
        return Err(Error::invalid("series shorter than the smoothing window"));
    }
    let half = (window / 2) as isize;
    let n = y.len() as isize;
    let mut out = vec![0.0; y.len()];
    for i in 0..n {
        let lo = (i - half).clamp(0, n - window as isize);
        let offsets: Vec<f64> = (0..window as isize).map(|k| (lo + k - i) as f64).collect();
        // quadratic least squares evaluated at offset 0
        let (mut s0, mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let (mut b0, mut b1, mut b2) = (0.0, 0.0, 0.0);
        for (k, &dx) in offsets.iter().enumerate() {
            let v = y[(lo + k as isize) as usize];
            s0 += 1.0;
            s1 += dx;
            s2 += dx * dx;
            s3 += dx * dx * dx;
            s4 += dx * dx * dx * dx;
            b0 += v;
            b1 += v * dx;
            b2 += v * dx * dx;
        }
        // solve the 3x3 normal equations for the constant coefficient
        let m = [s0, s1, s2, s1, s2, s3, s2, s3, s4];
        let rhs = [b0, b1, b2];
        out[i as usize] = solve3(&m, &rhs)[0];
    }
    Ok(out)
}

fn solve3(m: &[f64; 9], rhs: &[f64; 3]) -> [f64; 3] {
    let det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
        + m[2] * (m[3] * m[7] - m[4] * m[6]);
    let inv_det = 1.0 / det;
    let c0 = (rhs[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (rhs[1] * m[8] - m[5] * rhs[2])
        + m[2] * (rhs[1] * m[7] - m[4] * rhs[2]))
        * inv_det;
    let c1 = (m[0] * (rhs[1] * m[8] - m[5] * rhs[2]) - rhs[0] * (m[3] * m[8] - m[5] * m[6])
        + m[2] * (m[3] * rhs[2] - rhs[1] * m[6]))
        * inv_det;
    let c2 = (m[0] * (m[4] * rhs[2] - rhs[1] * m[7]) - m[1] * (m[3] * rhs[2] - rhs[1] * m[6])
        + rhs[0] * (m[3] * m[7] - m[4] * m[6]))
        * inv_det;
    [c0, c1, c2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_averages_exactly() {
        let times: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let values = vec![0.37; 100];
        let (mean, err) = time_average_equilibrium(&times, &values, 0.5).unwrap();
        assert!((mean - 0.37).abs() < 1e-14);
        assert!(err < 1e-13);
    }

    #[test]
    fn short_series_is_refused_with_a_length_message() {
        let times: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let values = vec![1.0; 5];
        let err = time_average_equilibrium(&times, &values, 0.5).unwrap_err();
        assert!(err.to_string().contains("at least 8"));
    }

    #[test]
    fn identical_realizations_have_zero_stderr() {
        let x = vec![0.0, 1.0, 2.0];
        let c = vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]];
        let curve = disorder_average(&x, &c, "test").unwrap();
        assert_eq!(curve.mean, vec![1.0, 2.0, 3.0]);
        assert!(curve.stderr.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let x = vec![0.0, 1.0];
        let c = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(disorder_average(&x, &c, "test").is_err());
    }

    #[test]
    fn derivative_of_linear_data_is_the_slope() {
        let x: Vec<f64> = (0..20).map(|i| 0.3 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let d = numeric_derivative(&x, &y, 1).unwrap();
        assert!(d.iter().all(|&v| (v - 2.5).abs() < 1e-12), "{d:?}");
        let d2 = numeric_derivative(&x, &y, 2).unwrap();
        assert!(d2.iter().all(|&v| v.abs() < 1e-10));
    }

    #[test]
    fn second_derivative_of_quadratic_data_is_constant() {
        let x: Vec<f64> = (0..20).map(|i| 0.25 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.5 * v * v + 0.2 * v).collect();
        let d2 = numeric_derivative(&x, &y, 2).unwrap();
        assert!(d2.iter().all(|&v| (v - 3.0).abs() < 1e-9), "{d2:?}");
        let d1 = numeric_derivative(&x, &y, 1).unwrap();
        for (i, &v) in d1.iter().enumerate() {
            assert!((v - (3.0 * x[i] + 0.2)).abs() < 1e-9);
        }
    }

    #[test]
    fn too_few_points_is_an_error() {
        let x = vec![0.0, 1.0, 2.0, 3.0];
        let y = vec![0.0; 4];
        assert!(numeric_derivative(&x, &y, 1).is_err());
    }

    #[test]
    fn quadratic_smoother_preserves_quadratics() {
        let y: Vec<f64> = (0..30).map(|i| 0.1 * (i * i) as f64 - i as f64).collect();
        let s = smooth_quadratic(&y, 7).unwrap();
        for (a, b) in y.iter().zip(s.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
