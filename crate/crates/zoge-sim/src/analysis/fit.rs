//! Nonlinear least squares: split Pearson VII peaks and log-log power laws.

use crate::error::{Error, Result};

/// Split Pearson VII profile:
///
/// P(x) = a0 / [1 + ((x-a1)/a2)^2 (2^(1/a3) - 1)]^a3   for x < a1
/// P(x) = a0 / [1 + ((x-a1)/a4)^2 (2^(1/a5) - 1)]^a5   for x > a1
///
/// a2/a4 are the left/right half widths at half maximum and a3/a5 the
/// left/right shape exponents; both halves equal a0 at x = a1.
pub fn pearson7_split(x: f64, p: &[f64; 6]) -> f64 {
    let (w, s) = if x < p[1] { (p[2], p[3]) } else { (p[4], p[5]) };
    let z = (x - p[1]) / w;
    let k = 2f64.powf(1.0 / s) - 1.0;
    p[0] / (1.0 + z * z * k).powf(s)
}

/// Fitted split Pearson VII parameters.
#[derive(Debug, Clone)]
pub struct PearsonFit {
    /// a0..a5: amplitude, center, left width, left shape, right width,
    /// right shape.
    pub params: [f64; 6],
    /// One-sigma errors from the fit covariance.
    pub param_errors: [f64; 6],
    pub residual_norm: f64,
    pub converged: bool,
}

impl PearsonFit {
    pub fn center(&self) -> f64 {
        self.params[1]
    }

    pub fn center_error(&self) -> f64 {
        self.param_errors[1]
    }

    pub fn eval(&self, x: f64) -> f64 {
        pearson7_split(x, &self.params)
    }
}

/// Damped least-squares fit of the split Pearson VII profile.
///
/// Widths and shapes are fitted in a log parametrization that keeps
/// a2, a4 > 0 and a3, a5 > 1/2. Default initialization: amplitude and
/// center from the maximum, widths from the half-maximum crossings,
/// shapes 1 (Lorentzian).
pub fn fit_split_pearson7(x: &[f64], y: &[f64], init: Option<[f64; 6]>) -> Result<PearsonFit> {
    if x.len() != y.len() {
        return Err(Error::invalid("x and y differ in length"));
    }
    if x.len() < 7 {
        return Err(Error::invalid("Pearson fit needs at least 7 points"));
    }
    let start = match init {
        Some(p) => p,
        None => default_init(x, y)?,
    };
    if !(start[2] > 0.0 && start[4] > 0.0 && start[3] > 0.5 && start[5] > 0.5) {
        return Err(Error::invalid(
            "initial widths must be positive and shapes above 1/2",
        ));
    }
    // theta = [a0, a1, ln a2, ln(a3 - 1/2), ln a4, ln(a5 - 1/2)]
    let theta0 = [
        start[0],
        start[1],
        start[2].ln(),
        (start[3] - 0.5).ln(),
        start[4].ln(),
        (start[5] - 0.5).ln(),
    ];
    let to_params = |theta: &[f64]| -> [f64; 6] {
        [
            theta[0],
            theta[1],
            theta[2].exp(),
            0.5 + theta[3].exp(),
            theta[4].exp(),
            0.5 + theta[5].exp(),
        ]
    };
    let residuals = |theta: &[f64], out: &mut Vec<f64>| {
        let p = to_params(theta);
        out.clear();
        out.extend(
            x.iter()
                .zip(y.iter())
                .map(|(&xi, &yi)| pearson7_split(xi, &p) - yi),
        );
    };
    let lm = levenberg_marquardt(&residuals, x.len(), &theta0, 400, 1e-12);
    let params = to_params(&lm.params);
    // error propagation through the exp reparametrization
    let mut param_errors = [0.0; 6];
    if let Some(cov) = &lm.covariance {
        let scale = [
            1.0,
            1.0,
            params[2],
            params[3] - 0.5,
            params[4],
            params[5] - 0.5,
        ];
        for i in 0..6 {
            param_errors[i] = cov[i * 6 + i].max(0.0).sqrt() * scale[i];
        }
    }
    Ok(PearsonFit {
        params,
        param_errors,
        residual_norm: lm.residual_norm,
        converged: lm.converged,
    })
}

fn default_init(x: &[f64], y: &[f64]) -> Result<[f64; 6]> {
    let (i_max, &y_max) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if !(y_max > 0.0) {
        return Err(Error::invalid("peak fit needs a positive maximum"));
    }
    let half = y_max / 2.0;
    let x_span = (x[x.len() - 1] - x[0]).abs();
    let mut left = x_span / 4.0;
    for i in (0..i_max).rev() {
        if y[i] <= half {
            let f = (y[i + 1] - half) / (y[i + 1] - y[i]).max(1e-300);
            left = (x[i_max] - (x[i + 1] + f * (x[i] - x[i + 1]))).abs();
            break;
        }
    }
    let mut right = x_span / 4.0;
    for i in i_max + 1..x.len() {
        if y[i] <= half {
            let f = (y[i - 1] - half) / (y[i - 1] - y[i]).max(1e-300);
            right = ((x[i - 1] + f * (x[i] - x[i - 1])) - x[i_max]).abs();
            break;
        }
    }
    Ok([
        y_max,
        x[i_max],
        left.max(1e-6 * x_span),
        1.0,
        right.max(1e-6 * x_span),
        1.0,
    ])
}

/// Power-law exponent from the tail of a decaying series.
#[derive(Debug, Clone)]
pub struct PowerLawFit {
    /// Decay exponent alpha with value ~ t^(-alpha).
    pub alpha: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub n_used: usize,
    /// Non-positive values dropped before taking logs.
    pub n_excluded: usize,
}

/// Linear regression of log(value) on log(t) inside the window.
///
/// Non-positive values are excluded; if they exceed half of the window the
/// fit is refused.
pub fn fit_power_law(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<PowerLawFit> {
    if times.len() != values.len() {
        return Err(Error::invalid("times and values differ in length"));
    }
    let in_window: Vec<(f64, f64)> = times
        .iter()
        .zip(values.iter())
        .filter(|(&t, _)| t >= window.0 && t <= window.1 && t > 0.0)
        .map(|(&t, &v)| (t, v))
        .collect();
    if in_window.len() < 10 {
        return Err(Error::SeriesTooShort(format!(
            "only {} points in the fit window; need at least 10",
            in_window.len()
        )));
    }
    let usable: Vec<(f64, f64)> = in_window
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|&(t, v)| (t.ln(), v.ln()))
        .collect();
    let n_excluded = in_window.len() - usable.len();
    if usable.len() * 2 < in_window.len() {
        return Err(Error::invalid(format!(
            "{n_excluded} of {} window points are non-positive; refusing the log fit",
            in_window.len()
        )));
    }
    if usable.len() < 10 {
        return Err(Error::SeriesTooShort(
            "fewer than 10 positive points in the fit window".into(),
        ));
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|p| p.0).sum();
    let sy: f64 = usable.iter().map(|p| p.1).sum();
    let mx = sx / n;
    let my = sy / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = usable
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let sst: f64 = usable.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sigma2 = ssr / (n - 2.0).max(1.0);
    Ok(PowerLawFit {
        alpha: -slope,
        stderr: (sigma2 / sxx).sqrt(),
        window,
        r_squared: if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 },
        n_used: usable.len(),
        n_excluded,
    })
}

pub(crate) struct LmOutcome {
    pub params: Vec<f64>,
    pub residual_norm: f64,
    pub converged: bool,
    /// Row-major p x p covariance, when the normal matrix is invertible.
    pub covariance: Option<Vec<f64>>,
}

/// Dense Levenberg-Marquardt with forward-difference Jacobian. Small
/// parameter counts only.
pub(crate) fn levenberg_marquardt(
    residuals: &dyn Fn(&[f64], &mut Vec<f64>),
    n_res: usize,
    init: &[f64],
    max_iter: usize,
    tol: f64,
) -> LmOutcome {
    let p = init.len();
    let mut theta = init.to_vec();
    let mut r = Vec::with_capacity(n_res);
    residuals(&theta, &mut r);
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut jac = vec![0.0; n_res * p];
    let mut r_pert = Vec::with_capacity(n_res);

    for _ in 0..max_iter {
        // forward-difference Jacobian
        for j in 0..p {
            let step = 1e-7 * theta[j].abs().max(1.0);
            let mut shifted = theta.clone();
            shifted[j] += step;
            residuals(&shifted, &mut r_pert);
            for i in 0..n_res {
                jac[i * p + j] = (r_pert[i] - r[i]) / step;
            }
        }
        // normal equations
        let mut jtj = vec![0.0; p * p];
        let mut jtr = vec![0.0; p];
        for i in 0..n_res {
            for a in 0..p {
                jtr[a] += jac[i * p + a] * r[i];
                for b in a..p {
                    jtj[a * p + b] += jac[i * p + a] * jac[i * p + b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                jtj[a * p + b] = jtj[b * p + a];
            }
        }

        let mut accepted = false;
        for _ in 0..12 {
            let mut damped = jtj.clone();
            for a in 0..p {
                damped[a * p + a] += lambda * jtj[a * p + a].max(1e-12);
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let Some(delta) = solve_dense(&damped, &rhs, p) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = theta.iter().zip(delta.iter()).map(|(t, d)| t + d).collect();
            residuals(&trial, &mut r_pert);
            let trial_cost: f64 = r_pert.iter().map(|v| v * v).sum();
            if trial_cost <= cost {
                let improvement = cost - trial_cost;
                theta = trial;
                std::mem::swap(&mut r, &mut r_pert);
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-14);
                accepted = true;
                let step_small = delta.iter().map(|d| d.abs()).fold(0.0, f64::max) < 1e-12;
                if improvement <= tol * cost.max(1e-300) || step_small {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if converged || !accepted {
            converged = converged || accepted;
            break;
        }
    }

    // covariance = sigma^2 (J^T J)^-1 at the solution
    let covariance = {
        let mut jtj = vec![0.0; p * p];
        for j in 0..p {
            let step = 1e-7 * theta[j].abs().max(1.0);
            let mut shifted = theta.clone();
            shifted[j] += step;
            residuals(&shifted, &mut r_pert);
            for i in 0..n_res {
                jac[i * p + j] = (r_pert[i] - r[i]) / step;
            }
        }
        for i in 0..n_res {
            for a in 0..p {
                for b in a..p {
                    jtj[a * p + b] += jac[i * p + a] * jac[i * p + b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                jtj[a * p + b] = jtj[b * p + a];
            }
        }
        let dof = (n_res.saturating_sub(p)).max(1) as f64;
        let sigma2 = cost / dof;
        invert_dense(&jtj, p).map(|inv| inv.iter().map(|v| v * sigma2).collect())
    };

    LmOutcome {
        params: theta,
        residual_norm: cost.sqrt(),
        converged,
        covariance,
    }
}

fn solve_dense(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[row * n + col].abs() > m[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if m[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            rhs.swap(col, pivot);
        }
        let inv = 1.0 / m[col * n + col];
        for row in col + 1..n {
            let f = m[row * n + col] * inv;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[row * n + k] -= f * m[col * n + k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for k in col + 1..n {
            acc -= m[col * n + k] * x[k];
        }
        x[col] = acc / m[col * n + col];
    }
    Some(x)
}

fn invert_dense(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut out = vec![0.0; n * n];
    for col in 0..n {
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        let x = solve_dense(a, &e, n)?;
        for row in 0..n {
            out[row * n + col] = x[row];
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    fn noise_rng() -> rand_chacha::ChaCha12Rng {
        rand_chacha::ChaCha12Rng::seed_from_u64(1234)
    }

    #[test]
    fn pearson_roundtrip_noiseless_is_exact() {
        let truth = [2.0, 1.1, 0.3, 1.4, 0.5, 2.2];
        let x: Vec<f64> = (0..200).map(|i| i as f64 * 0.02).collect();
        let y: Vec<f64> = x.iter().map(|&v| pearson7_split(v, &truth)).collect();
        let fit = fit_split_pearson7(&x, &y, None).unwrap();
        assert!(fit.converged);
        for (got, want) in fit.params.iter().zip(truth.iter()) {
            assert!(
                ((got - want) / want).abs() < 1e-6,
                "{got} vs {want} in {:?}",
                fit.params
            );
        }
    }

    #[test]
    fn pearson_roundtrip_with_noise_recovers_within_two_percent() {
        let truth = [1.5, 0.9, 0.25, 1.2, 0.4, 1.8];
        let x: Vec<f64> = (0..300).map(|i| i as f64 * 0.01).collect();
        let mut rng = noise_rng();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| pearson7_split(v, &truth) * (1.0 + 0.001 * (rng.gen::<f64>() - 0.5)))
            .collect();
        let fit = fit_split_pearson7(&x, &y, None).unwrap();
        for (got, want) in fit.params.iter().zip(truth.iter()) {
            assert!(((got - want) / want).abs() < 0.02, "{got} vs {want}");
        }
    }

    #[test]
    fn symmetric_lorentzian_fits_equal_widths() {
        let truth = [1.0, 0.0, 0.35, 1.0, 0.35, 1.0];
        let x: Vec<f64> = (-150..=150).map(|i| i as f64 * 0.01).collect();
        let mut rng = noise_rng();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| pearson7_split(v, &truth) + 1e-4 * (rng.gen::<f64>() - 0.5))
            .collect();
        let fit = fit_split_pearson7(&x, &y, None).unwrap();
        let (left, right) = (fit.params[2], fit.params[4]);
        assert!(
            ((left - right) / right).abs() < 0.02,
            "widths {left} vs {right}"
        );
    }

    #[test]
    fn power_law_exact_half() {
        let t: Vec<f64> = (1..200).map(|i| i as f64 * 0.5).collect();
        let v: Vec<f64> = t.iter().map(|x| x.powf(-0.5)).collect();
        let fit = fit_power_law(&t, &v, (1.0, 99.0)).unwrap();
        assert!((fit.alpha - 0.5).abs() < 1e-6);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn power_law_constant_series_gives_zero() {
        let t: Vec<f64> = (1..100).map(|i| i as f64).collect();
        let v = vec![0.2; t.len()];
        let fit = fit_power_law(&t, &v, (1.0, 99.0)).unwrap();
        assert!(fit.alpha.abs() < 1e-12);
    }

    #[test]
    fn power_law_recovery_under_noise() {
        // alpha in {0.1, 0.5, 1.0} with 5% multiplicative noise
        for &alpha in &[0.1, 0.5, 1.0] {
            let mut rng = noise_rng();
            let t: Vec<f64> = (0..240).map(|i| 10.0 * 1.03f64.powi(i)).collect();
            let v: Vec<f64> = t
                .iter()
                .map(|x| x.powf(-alpha) * (1.0 + 0.05 * (2.0 * rng.gen::<f64>() - 1.0)))
                .collect();
            let fit = fit_power_law(&t, &v, (10.0, 5000.0)).unwrap();
            assert!(
                (fit.alpha - alpha).abs() < 0.02,
                "alpha {} vs {alpha}",
                fit.alpha
            );
        }
    }

    #[test]
    fn nonpositive_points_are_excluded_and_counted() {
        let t: Vec<f64> = (1..=40).map(|i| i as f64).collect();
        let mut v: Vec<f64> = t.iter().map(|x| x.powf(-1.0)).collect();
        v[5] = 0.0;
        v[7] = -1e-9;
        let fit = fit_power_law(&t, &v, (1.0, 40.0)).unwrap();
        assert_eq!(fit.n_excluded, 2);
        assert!((fit.alpha - 1.0).abs() < 1e-6);
    }

    #[test]
    fn mostly_nonpositive_window_is_refused() {
        let t: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let v: Vec<f64> = t.iter().map(|&x| if x > 8.0 { -1.0 } else { 1.0 }).collect();
        assert!(fit_power_law(&t, &v, (1.0, 20.0)).is_err());
    }
}
