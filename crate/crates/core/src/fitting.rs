//! Log-log regression and sequence extrapolation helpers.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),
}

/// Least-squares line through `(log x, log y)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fit `log y = slope * log x + intercept`; `x`, `y` must be positive.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<SweepFit, FitError> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return Err(FitError::TooFewSamples {
            need: 2,
            got: xs.len().min(ys.len()),
        });
    }
    if xs.iter().chain(ys.iter()).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(FitError::IllConditioned(
            "log-log fit needs positive finite samples".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(FitError::IllConditioned("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(SweepFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Result of extrapolating a sequence `y(eps) -> limit` as `eps -> 0`.
#[derive(Debug, Clone, Copy)]
pub struct Extrapolated {
    pub limit: Complex64,
    /// Magnitude of the last extrapolation correction; a conservative
    /// error estimate.
    pub err_estimate: f64,
    /// Leading-order exponent used at the first peeling level, if any
    /// peeling was performed.
    pub leading_order: Option<f64>,
}

/// Adaptive Richardson extrapolation on a geometric-ish grid.
///
/// Each level estimates the leading error exponent from successive
/// differences and peels it. When the differences are already at the
/// noise floor the current tail value is returned directly, which makes
/// exactly-converged inputs (for instance a purely linear sweep) exact.
pub fn richardson_auto(eps: &[f64], ys: &[Complex64], max_levels: usize) -> Result<Extrapolated, FitError> {
    if eps.len() < 3 || eps.len() != ys.len() {
        return Err(FitError::TooFewSamples {
            need: 3,
            got: eps.len().min(ys.len()),
        });
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(FitError::IllConditioned("epsilons must strictly decrease".into()));
    }
    let scale = ys.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let floor = 1e-13 * scale;

    let mut xs: Vec<f64> = eps.to_vec();
    let mut ts: Vec<Complex64> = ys.to_vec();
    let mut leading_order = None;
    let mut last_corr = 0.0;
    let mut prev_limit: Option<Complex64> = None;

    for _ in 0..max_levels {
        if ts.len() < 3 {
            break;
        }
        let m = ts.len();
        let d_tail = (ts[m - 1] - ts[m - 2]).norm();
        if d_tail <= floor {
            // converged to rounding; nothing left to peel
            return Ok(Extrapolated {
                limit: ts[m - 1],
                err_estimate: d_tail.max(floor),
                leading_order,
            });
        }
        // estimate the leading exponent from the last difference pair
        let d1 = ts[m - 2] - ts[m - 3];
        let d2 = ts[m - 1] - ts[m - 2];
        if d2.norm() <= floor || d1.norm() <= floor {
            break;
        }
        let ratio = (d1.norm() / d2.norm()).max(1e-12);
        let step = (xs[m - 3] / xs[m - 2]).max(xs[m - 2] / xs[m - 1]);
        let gamma = ratio.ln() / step.ln();
        if !(gamma > 0.05) || !gamma.is_finite() {
            break; // not decaying; stop peeling
        }
        if leading_order.is_none() {
            leading_order = Some(gamma);
        }
        // Richardson step with exponent gamma
        let mut nxs = Vec::with_capacity(m - 1);
        let mut nts = Vec::with_capacity(m - 1);
        for k in 0..m - 1 {
            let rho = (xs[k] / xs[k + 1]).powf(gamma);
            nxs.push(xs[k + 1]);
            nts.push(ts[k + 1] + (ts[k + 1] - ts[k]) / (rho - 1.0));
        }
        last_corr = (nts[nts.len() - 1] - ts[m - 1]).norm();
        if let Some(prev) = prev_limit {
            let cur = nts[nts.len() - 1];
            let denom = cur.norm().max(floor);
            if (cur - prev).norm() > 0.10 * denom && (cur - prev).norm() > 100.0 * floor {
                return Err(FitError::IllConditioned(format!(
                    "consecutive extrapolants disagree by {:.2}%",
                    100.0 * (cur - prev).norm() / denom
                )));
            }
        }
        prev_limit = Some(nts[nts.len() - 1]);
        xs = nxs;
        ts = nts;
    }
    let m = ts.len();
    let tail_diff = if m >= 2 { (ts[m - 1] - ts[m - 2]).norm() } else { last_corr };
    Ok(Extrapolated {
        limit: ts[m - 1],
        err_estimate: tail_diff.max(floor),
        leading_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_recovers_power_law() {
        let xs: Vec<f64> = (1..8).map(|k| 2f64.powi(-k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.7 * x.powf(1.8)).collect();
        let fit = fit_loglog(&xs, &ys).unwrap();
        assert!((fit.slope - 1.8).abs() < 1e-10);
        assert!((fit.intercept - 3.7f64.ln()).abs() < 1e-10);
        assert!(fit.r_squared > 0.999999);
    }

    #[test]
    fn richardson_extrapolates_mixed_orders() {
        // y = L + 2 eps + 5 eps^2 - eps^3
        let eps: Vec<f64> = (2..9).map(|k| 2f64.powi(-k)).collect();
        let lim = Complex64::new(0.7, -0.3);
        let ys: Vec<Complex64> = eps
            .iter()
            .map(|&e| lim + Complex64::new(2.0 * e + 5.0 * e * e - e * e * e, 0.5 * e))
            .collect();
        let ex = richardson_auto(&eps, &ys, 3).unwrap();
        assert!(
            (ex.limit - lim).norm() < 1e-8,
            "limit {:?} err {}",
            ex.limit,
            (ex.limit - lim).norm()
        );
        let order = ex.leading_order.unwrap();
        assert!((order - 1.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn richardson_exact_sequence_passes_through() {
        let eps: Vec<f64> = (1..6).map(|k| 2f64.powi(-k)).collect();
        let lim = Complex64::new(-1.25, 0.5);
        let ys = vec![lim; 5];
        let ex = richardson_auto(&eps, &ys, 3).unwrap();
        assert_eq!(ex.limit, lim);
        assert!(ex.leading_order.is_none());
    }

    #[test]
    fn richardson_fractional_order() {
        // y = L + eps^{0.5} - 0.2 eps
        let eps: Vec<f64> = (2..10).map(|k| 2f64.powi(-k)).collect();
        let lim = Complex64::new(2.0, 1.0);
        let ys: Vec<Complex64> = eps
            .iter()
            .map(|&e| lim + Complex64::new(e.sqrt() - 0.2 * e, 0.0))
            .collect();
        let ex = richardson_auto(&eps, &ys, 3).unwrap();
        assert!((ex.limit - lim).norm() < 2e-4, "err {}", (ex.limit - lim).norm());
        let order = ex.leading_order.unwrap();
        assert!((order - 0.5).abs() < 0.1, "order {order}");
    }
}
