//! Convergence indices over iteration logs: RMS and max-abs families for
//! trajectory error, tracking errors, and sliding variables, plus the
//! terminal Lyapunov diagnostic.

use crate::error::{ensure_finite, Error, Result};
use crate::sim::IterationLog;
use crate::sta::phi;

/// Root mean square of a trace.
pub fn rms(trace: &[f64]) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let sum_sq: f64 = trace.iter().map(|&x| x * x).sum();
    Ok((sum_sq / trace.len() as f64).sqrt())
}

/// Largest absolute value over a trace.
pub fn max_abs(trace: &[f64]) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    Ok(trace.iter().fold(0.0f64, |m, &x| m.max(x.abs())))
}

/// Distance of the end-effector from the commanded diagonal path,
/// `|x - y| / sqrt(2)`.
pub fn trajectory_error(x_pos: f64, y_pos: f64) -> f64 {
    (x_pos - y_pos).abs() / std::f64::consts::SQRT_2
}

/// Per-axis tracking errors: `e_x = (y1 + y2)/2 - r`, `e_y = yy - r`.
pub fn tracking_errors(y1: f64, y2: f64, yy: f64, r: f64) -> (f64, f64) {
    (0.5 * (y1 + y2) - r, yy - r)
}

/// RMS distance between the housed uncertainty estimate (`-u_ilc`) and the
/// finite-difference uncertainty logged for the same iteration.
pub fn psi_error_rms(log: &IterationLog, axis: usize) -> Result<f64> {
    let trace = log.axes.get(axis).ok_or(Error::MissingColumn("axis"))?;
    if trace.psi_truth.is_empty() {
        return Err(Error::MissingColumn("psi_truth"));
    }
    let diff: Vec<f64> = trace
        .u_ilc
        .iter()
        .zip(&trace.psi_truth)
        .map(|(&u, &p)| -u - p)
        .collect();
    rms(&diff)
}

/// Terminal Lyapunov components of one iteration, summed over axes:
/// `V1 = beta phi(s(T))^2 / 2` and `V2 = (1/q) integral of psi_err^2 / 2`
/// with `psi_err = psi_truth + u_ilc` and a trapezoidal integral over the
/// sample grid.
pub fn lyapunov_diagnostic(log: &IterationLog, beta: f64, q: f64, kc: f64) -> Result<(f64, f64)> {
    if log.axes.is_empty() || log.t.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if log.axes.iter().any(|a| a.psi_truth.len() != a.s.len() || a.s.is_empty()) {
        return Err(Error::MissingColumn("psi_truth"));
    }
    let dt = if log.t.len() > 1 { log.t[1] - log.t[0] } else { 0.0 };
    let mut v1 = 0.0;
    let mut v2 = 0.0;
    for trace in &log.axes {
        let s_last = *trace.s.last().expect("non-empty");
        let p = phi(s_last, kc)?;
        v1 += 0.5 * beta * p * p;
        let sq =
            |k: usize| -> f64 { let e = trace.psi_truth[k] + trace.u_ilc[k]; e * e };
        let mut integral = 0.0;
        for k in 1..trace.s.len() {
            integral += 0.5 * (sq(k) + sq(k - 1)) * dt;
        }
        v2 += 0.5 / q * integral;
    }
    Ok((ensure_finite("V1", v1)?, ensure_finite("V2", v2)?))
}

/// Sliding-variable statistics of one axis in one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlidingStats {
    pub rmssv: f64,
    pub maxasv: f64,
}

/// Trajectory and tracking-error statistics (gantry runs only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryStats {
    pub rmse: f64,
    pub maxae: f64,
    pub rmse_ex: f64,
    pub maxae_ex: f64,
    pub rmse_ey: f64,
    pub maxae_ey: f64,
}

/// One summary row per iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    /// 1-based iteration number.
    pub iteration: usize,
    /// Present on gantry runs.
    pub trajectory: Option<TrajectoryStats>,
    /// One entry per axis, in log order.
    pub sliding: Vec<SlidingStats>,
    pub v1_terminal: f64,
    pub v2_terminal: f64,
}

/// Per-iteration convergence indices of a whole experiment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceSummary {
    pub rows: Vec<SummaryRow>,
}

/// Builds the summary over completed iteration logs. `gantry` enables the
/// trajectory/tracking block, which reads the first two axes as X1/X2 and the
/// third as Y.
pub fn summarize(
    iterations: &[IterationLog],
    gantry: bool,
    beta: f64,
    q: f64,
    kc: f64,
) -> Result<ConvergenceSummary> {
    let mut rows = Vec::with_capacity(iterations.len());
    for log in iterations {
        let trajectory = if gantry {
            if log.axes.len() != 3 {
                return Err(Error::MissingColumn("gantry axes"));
            }
            let n = log.n_samples();
            let mut e_d = Vec::with_capacity(n);
            let mut e_x = Vec::with_capacity(n);
            let mut e_y = Vec::with_capacity(n);
            for k in 0..n {
                let x_pos = 0.5 * (log.axes[0].y[k] + log.axes[1].y[k]);
                let y_pos = log.axes[2].y[k];
                e_d.push(trajectory_error(x_pos, y_pos));
                let (ex, ey) = tracking_errors(log.axes[0].y[k], log.axes[1].y[k], y_pos, log.r[k]);
                e_x.push(ex);
                e_y.push(ey);
            }
            Some(TrajectoryStats {
                rmse: rms(&e_d)?,
                maxae: max_abs(&e_d)?,
                rmse_ex: rms(&e_x)?,
                maxae_ex: max_abs(&e_x)?,
                rmse_ey: rms(&e_y)?,
                maxae_ey: max_abs(&e_y)?,
            })
        } else {
            None
        };
        let sliding = log
            .axes
            .iter()
            .map(|ax| {
                Ok(SlidingStats { rmssv: rms(&ax.s)?, maxasv: max_abs(&ax.s)? })
            })
            .collect::<Result<Vec<_>>>()?;
        let (v1, v2) = lyapunov_diagnostic(log, beta, q, kc)?;
        for stat in &sliding {
            ensure_finite("rmssv", stat.rmssv)?;
            ensure_finite("maxasv", stat.maxasv)?;
        }
        rows.push(SummaryRow {
            iteration: log.iteration,
            trajectory,
            sliding,
            v1_terminal: v1,
            v2_terminal: v2,
        });
    }
    Ok(ConvergenceSummary { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::AxisTrace;

    #[test]
    fn rms_values() {
        assert!((rms(&[3.0, 4.0]).unwrap() - 12.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(rms(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        for n in [1usize, 5, 17] {
            let trace = vec![-2.5; n];
            assert!((rms(&trace).unwrap() - 2.5).abs() < 1e-15);
        }
        assert_eq!(rms(&[]), Err(Error::EmptyTrace));
    }

    #[test]
    fn max_abs_values() {
        assert_eq!(max_abs(&[-2.0, 1.0]).unwrap(), 2.0);
        assert_eq!(max_abs(&[0.0; 4]).unwrap(), 0.0);
        assert_eq!(max_abs(&[1e-5, -2e-5]).unwrap(), 2e-5);
        assert_eq!(max_abs(&[]), Err(Error::EmptyTrace));
    }

    #[test]
    fn rms_bounded_by_max_abs() {
        let traces = [vec![0.3, -1.7, 0.2], vec![5.0; 9], vec![-1e-7, 2e-9, 3e-8]];
        for t in &traces {
            assert!(rms(t).unwrap() <= max_abs(t).unwrap() + 1e-18);
        }
    }

    #[test]
    fn trajectory_error_values() {
        assert_eq!(trajectory_error(1e-3, 1e-3), 0.0);
        assert!((trajectory_error(1e-3, 0.5e-3) - 3.535533905932738e-4).abs() < 1e-15);
        assert_eq!(trajectory_error(0.2, -0.4), trajectory_error(-0.4, 0.2));
    }

    #[test]
    fn tracking_error_values() {
        let r = 0.37;
        assert_eq!(tracking_errors(r, r, r, r), (0.0, 0.0));
        let (ex, ey) = tracking_errors(r + 2.0 * 1e-3, r, r, r);
        assert!((ex - 1e-3).abs() < 1e-15);
        assert_eq!(ey, 0.0);
        assert_eq!(tracking_errors(0.0, 0.0, 1e-4, 0.0), (0.0, 1e-4));
    }

    fn log_with(s: Vec<f64>, u_ilc: Vec<f64>, psi: Vec<f64>, dt: f64) -> IterationLog {
        let n = s.len();
        let trace = AxisTrace {
            y: vec![0.0; n],
            ydot: vec![0.0; n],
            e: vec![0.0; n],
            edot: vec![0.0; n],
            s,
            u: vec![0.0; n],
            u_st: vec![0.0; n],
            u_ilc,
            psi_truth: psi,
            d: vec![0.0; n],
        };
        IterationLog {
            iteration: 1,
            t: (0..n).map(|k| k as f64 * dt).collect(),
            r: vec![0.0; n],
            rdot: vec![0.0; n],
            axes: vec![trace],
        }
    }

    #[test]
    fn lyapunov_zero_log() {
        let log = log_with(vec![0.0; 5], vec![0.0; 5], vec![0.0; 5], 1e-3);
        assert_eq!(lyapunov_diagnostic(&log, 0.1, 1.5, 0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn lyapunov_terminal_phi_term() {
        // s(T) = 1, beta = 0.1, kc = 0 -> V1 = 0.05
        let log = log_with(vec![0.0, 0.0, 1.0], vec![0.0; 3], vec![0.0; 3], 1e-3);
        let (v1, v2) = lyapunov_diagnostic(&log, 0.1, 1.5, 0.0).unwrap();
        assert!((v1 - 0.05).abs() < 1e-15);
        assert_eq!(v2, 0.0);
    }

    #[test]
    fn lyapunov_integral_term_is_trapezoidal() {
        // psi_err = psi + u_ilc = [1, 1, 1]: trapz over 2 intervals of dt.
        let dt = 0.5;
        let log = log_with(vec![0.0; 3], vec![0.5; 3], vec![0.5; 3], dt);
        let (_, v2) = lyapunov_diagnostic(&log, 0.1, 2.0, 0.0).unwrap();
        assert!((v2 - 0.5 / 2.0 * 2.0 * dt).abs() < 1e-15);
    }

    #[test]
    fn summary_on_empty_axis_list_errors() {
        let log = IterationLog {
            iteration: 1,
            t: vec![],
            r: vec![],
            rdot: vec![],
            axes: vec![],
        };
        assert!(summarize(&[log], false, 0.1, 1.5, 0.1).is_err());
    }
}
