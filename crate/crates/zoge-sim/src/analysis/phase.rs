//! Critical-disorder bounds and (W, U) phase-diagram assembly.

use super::fit::{fit_split_pearson7, PearsonFit};
use super::{numeric_derivative, EnsembleCurve};
use crate::error::{Error, Result};

/// Bracket on the critical disorder from derivative peaks.
///
/// The maximum of d<Q0>/dW sits above the transition and the maximum of
/// d^2<Q0>/dW^2 below it; both peak locations come from split Pearson VII
/// fits rather than raw argmax.
#[derive(Debug, Clone)]
pub struct CriticalBounds {
    pub w_lower: f64,
    pub w_lower_err: f64,
    pub w_upper: f64,
    pub w_upper_err: f64,
    /// Raw argmax cross-checks for the two derivative curves.
    pub raw_argmax_d1: f64,
    pub raw_argmax_d2: f64,
    pub d1_fit: PearsonFit,
    pub d2_fit: PearsonFit,
}

/// Locates the transition bracket on a Q0-versus-W (or S^2-versus-W) curve.
pub fn critical_bounds(curve: &EnsembleCurve) -> Result<CriticalBounds> {
    critical_bounds_smoothed(curve, None)
}

/// Same bracket with optional moving-quadratic pre-smoothing of the curve
/// before differentiating, for noisy interacting ensembles.
pub fn critical_bounds_smoothed(
    curve: &EnsembleCurve,
    smooth_window: Option<usize>,
) -> Result<CriticalBounds> {
    let mean = match smooth_window {
        Some(window) => super::smooth_quadratic(&curve.mean, window)?,
        None => curve.mean.clone(),
    };
    let d1 = numeric_derivative(&curve.x, &mean, 1)?;
    let d2 = numeric_derivative(&curve.x, &mean, 2)?;
    let (d1_fit, raw1) = fit_peak(&curve.x, &d1)?;
    let (d2_fit, raw2) = fit_peak(&curve.x, &d2)?;
    let span = (curve.x[curve.x.len() - 1] - curve.x[0]).abs();
    Ok(CriticalBounds {
        w_lower: d2_fit.center(),
        w_lower_err: d2_fit.center_error().min(span),
        w_upper: d1_fit.center(),
        w_upper_err: d1_fit.center_error().min(span),
        raw_argmax_d1: raw1,
        raw_argmax_d2: raw2,
        d1_fit,
        d2_fit,
    })
}

/// Pearson center of the first-derivative peak alone: the upper critical
/// bound, usable when the data is too noisy for a stable curvature fit.
pub fn upper_critical_bound(
    curve: &EnsembleCurve,
    smooth_window: Option<usize>,
) -> Result<(f64, f64)> {
    let mean = match smooth_window {
        Some(window) => super::smooth_quadratic(&curve.mean, window)?,
        None => curve.mean.clone(),
    };
    let d1 = numeric_derivative(&curve.x, &mean, 1)?;
    let (fit, _) = fit_peak(&curve.x, &d1)?;
    let span = (curve.x[curve.x.len() - 1] - curve.x[0]).abs();
    Ok((fit.center(), fit.center_error().min(span)))
}

/// Fits the dominant positive peak of a derivative curve. The fit window is
/// the contiguous positive run around the argmax, so a negative lobe next
/// to the peak does not drag the profile.
fn fit_peak(x: &[f64], y: &[f64]) -> Result<(PearsonFit, f64)> {
    let (i_max, &y_max) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if !(y_max > 0.0) {
        return Err(Error::invalid(
            "no positive derivative peak: curve shows no transition in range",
        ));
    }
    if i_max == 0 || i_max + 1 == y.len() {
        return Err(Error::invalid(
            "derivative peaks at the grid boundary: transition not bracketed by the W range",
        ));
    }
    let mut lo = i_max;
    while lo > 0 && y[lo - 1] > 0.0 {
        lo -= 1;
    }
    let mut hi = i_max;
    while hi + 1 < y.len() && y[hi + 1] > 0.0 {
        hi += 1;
    }
    // Pearson needs some margin around the positive run; widen into the
    // tails until the window carries enough points for the profile
    lo = lo.saturating_sub(2);
    hi = (hi + 2).min(y.len() - 1);
    while hi - lo + 1 < 9 {
        let can_lo = lo > 0;
        let can_hi = hi + 1 < y.len();
        if can_lo {
            lo -= 1;
        }
        if can_hi {
            hi += 1;
        }
        if !can_lo && !can_hi {
            break;
        }
    }
    if hi - lo + 1 < 7 {
        return Err(Error::invalid(
            "derivative peak too narrow for a profile fit (fewer than 7 points)",
        ));
    }
    let fit = fit_split_pearson7(&x[lo..=hi], &y[lo..=hi], None)?;
    Ok((fit, x[i_max]))
}

/// Disorder-averaged asymptotic S^2 on a rectangular (W, U) grid.
#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    /// Row-major by U: s2[u_idx * w.len() + w_idx].
    pub s2: Vec<f64>,
    pub s2_err: Vec<f64>,
}

impl PhaseDiagram {
    pub fn value(&self, w_idx: usize, u_idx: usize) -> f64 {
        self.s2[u_idx * self.w.len() + w_idx]
    }

    /// S^2 linearly interpolated along W within one U row.
    pub fn interpolate_w(&self, u_idx: usize, w: f64) -> Option<f64> {
        let row = &self.s2[u_idx * self.w.len()..(u_idx + 1) * self.w.len()];
        interpolate(&self.w, row, w)
    }

    /// One Q0-style curve (S^2 vs W) for a fixed U.
    pub fn w_slice(&self, u_idx: usize) -> EnsembleCurve {
        let n_w = self.w.len();
        EnsembleCurve {
            x: self.w.clone(),
            mean: self.s2[u_idx * n_w..(u_idx + 1) * n_w].to_vec(),
            stderr: self.s2_err[u_idx * n_w..(u_idx + 1) * n_w].to_vec(),
            n_realizations: 0,
            meta: format!("phase-diagram slice at u = {}", self.u[u_idx]),
        }
    }
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> Option<f64> {
    if at < x[0] || at > x[x.len() - 1] {
        return None;
    }
    let i = x.partition_point(|&v| v < at).min(x.len() - 1).max(1);
    let f = (at - x[i - 1]) / (x[i] - x[i - 1]);
    Some(y[i - 1] + f * (y[i] - y[i - 1]))
}

/// Per-U crossing of the iso-contour S^2 = level, by linear interpolation
/// along each U row. Rows that never cross report None (partial contour).
pub fn contour_crossings(diagram: &PhaseDiagram, level: f64) -> Vec<(f64, Option<f64>)> {
    let n_w = diagram.w.len();
    diagram
        .u
        .iter()
        .enumerate()
        .map(|(u_idx, &u)| {
            let row = &diagram.s2[u_idx * n_w..(u_idx + 1) * n_w];
            let mut crossing = None;
            for i in 1..n_w {
                let (a, b) = (row[i - 1], row[i]);
                if (a - level) * (b - level) <= 0.0 && a != b {
                    let f = (level - a) / (b - a);
                    crossing = Some(diagram.w[i - 1] + f * (diagram.w[i] - diagram.w[i - 1]));
                    break;
                }
            }
            (u, crossing)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigmoid_curve(center: f64, width: f64) -> EnsembleCurve {
        let x: Vec<f64> = (0..60).map(|i| 0.4 + i as f64 * 0.025).collect();
        let mean: Vec<f64> = x
            .iter()
            .map(|&w| 1.0 / (1.0 + (-(w - center) / width).exp()))
            .collect();
        EnsembleCurve {
            stderr: vec![0.0; x.len()],
            n_realizations: 1,
            meta: "synthetic".into(),
            x,
            mean,
        }
    }

    #[test]
    fn sigmoid_bracket_contains_the_center() {
        let curve = sigmoid_curve(1.3, 0.1);
        let bounds = critical_bounds(&curve).unwrap();
        assert!(
            bounds.w_lower <= 1.3 && 1.3 <= bounds.w_upper,
            "bracket [{}, {}]",
            bounds.w_lower,
            bounds.w_upper
        );
        assert!(bounds.w_lower <= bounds.w_upper);
        // the logistic first derivative peaks exactly at the center
        assert!((bounds.w_upper - 1.3).abs() < 0.02);
        // and its curvature peaks one log(2+sqrt(3)) width below
        assert!((bounds.w_lower - (1.3 - 0.1 * (2.0f64 + 3.0f64.sqrt()).ln())).abs() < 0.03);
    }

    #[test]
    fn flat_curve_reports_no_transition() {
        let x: Vec<f64> = (0..30).map(|i| i as f64 * 0.05).collect();
        let curve = EnsembleCurve {
            mean: vec![0.5; x.len()],
            stderr: vec![0.0; x.len()],
            n_realizations: 1,
            meta: "flat".into(),
            x,
        };
        assert!(critical_bounds(&curve).is_err());
    }

    #[test]
    fn synthetic_phase_field_contour_follows_w_equals_one_plus_u() {
        // S^2(W, U) = sigmoid((W - 1 - U) / 0.1)
        let w: Vec<f64> = (0..41).map(|i| 0.5 + i as f64 * 0.05).collect();
        let u: Vec<f64> = (0..5).map(|i| i as f64 * 0.1).collect();
        let mut s2 = Vec::new();
        for &ui in &u {
            for &wi in &w {
                s2.push(1.0 / (1.0 + (-(wi - 1.0 - ui) / 0.1).exp()));
            }
        }
        let diagram = PhaseDiagram {
            s2_err: vec![0.0; s2.len()],
            w,
            u,
            s2,
        };
        let level = diagram.interpolate_w(0, 1.0).unwrap();
        for (ui, crossing) in contour_crossings(&diagram, level) {
            let got = crossing.expect("contour crosses every row");
            assert!((got - (1.0 + ui)).abs() < 0.01, "u={ui}: {got}");
        }
    }

    #[test]
    fn contour_marks_missing_rows_as_partial() {
        let diagram = PhaseDiagram {
            w: vec![0.0, 1.0],
            u: vec![0.0, 1.0],
            s2: vec![0.1, 0.2, 0.5, 0.6],
            s2_err: vec![0.0; 4],
        };
        let crossings = contour_crossings(&diagram, 0.15);
        assert!(crossings[0].1.is_some());
        assert!(crossings[1].1.is_none());
    }
}
