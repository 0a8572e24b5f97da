//! Point-to-point S-curve reference with closed-form first and second
//! derivatives.
//!
//! The motion segment is a quintic smoothstep,
//! `r = amplitude * (10 t^3 - 15 t^4 + 6 t^5)` over the normalized time
//! `t = (time - t_start) / (t_end - t_start)`, which makes `r`, `r'`, and
//! `r''` continuous over the whole horizon with `r'' = 0` at both ends.

use crate::error::{Error, Result};

/// S-curve profile over one iteration horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SCurveProfile {
    amplitude: f64,
    t_start: f64,
    t_end: f64,
    horizon: f64,
    dt: f64,
    n: usize,
}

impl SCurveProfile {
    /// Requires `0 <= t_start < t_end <= horizon`, finite amplitude, and a
    /// sample period that divides the horizon to within 1e-9.
    pub fn new(amplitude: f64, t_start: f64, t_end: f64, horizon: f64, dt: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::InvalidParam { what: "amplitude", value: amplitude });
        }
        if !t_start.is_finite() || t_start < 0.0 {
            return Err(Error::InvalidParam { what: "t_start", value: t_start });
        }
        if !t_end.is_finite() || t_end <= t_start {
            return Err(Error::InvalidParam { what: "t_end", value: t_end });
        }
        if !horizon.is_finite() || horizon < t_end {
            return Err(Error::InvalidParam { what: "horizon", value: horizon });
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidParam { what: "dt", value: dt });
        }
        let ratio = horizon / dt;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-9 || n < 1.0 {
            return Err(Error::InvalidParam { what: "horizon/dt", value: ratio });
        }
        Ok(Self { amplitude, t_start, t_end, horizon, dt, n: n as usize })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of samples in one iteration, `round(horizon / dt)`.
    pub fn n_samples(&self) -> usize {
        self.n
    }

    /// `(r, r', r'')` at time `t` in `[0, horizon]`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64, f64)> {
        if !t.is_finite() || t < 0.0 || t > self.horizon {
            return Err(Error::OutOfDomain { t, horizon: self.horizon });
        }
        let span = self.t_end - self.t_start;
        let tau = ((t - self.t_start) / span).clamp(0.0, 1.0);
        let t2 = tau * tau;
        let t3 = t2 * tau;
        let r = self.amplitude * (10.0 * t3 - 15.0 * t3 * tau + 6.0 * t3 * t2);
        let r_dot = if tau <= 0.0 || tau >= 1.0 {
            0.0
        } else {
            self.amplitude * (30.0 * t2 - 60.0 * t3 + 30.0 * t2 * t2) / span
        };
        let r_ddot = if tau <= 0.0 || tau >= 1.0 {
            0.0
        } else {
            self.amplitude * (60.0 * tau - 180.0 * t2 + 120.0 * t3) / (span * span)
        };
        Ok((r, r_dot, r_ddot))
    }

    /// The profile on the uniform grid `k * dt`, `k = 0..n_samples`.
    pub fn sample(&self) -> Vec<(f64, f64, f64)> {
        (0..self.n)
            .map(|k| self.eval(k as f64 * self.dt).expect("grid point within domain"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bench() -> SCurveProfile {
        SCurveProfile::new(0.1, 0.2, 1.2, 2.0, 1e-3).unwrap()
    }

    #[test]
    fn boundary_conditions() {
        let p = bench();
        assert_eq!(p.eval(0.0).unwrap(), (0.0, 0.0, 0.0));
        assert_eq!(p.eval(0.2).unwrap(), (0.0, 0.0, 0.0));
        let (r, rd, rdd) = p.eval(1.2).unwrap();
        assert_eq!((r, rd, rdd), (0.1, 0.0, 0.0));
        let (r, rd, rdd) = p.eval(2.0).unwrap();
        assert_eq!((r, rd, rdd), (0.1, 0.0, 0.0));
    }

    #[test]
    fn midpoint_symmetry() {
        let p = bench();
        let (r, _, _) = p.eval(0.7).unwrap();
        assert!((r - 0.05).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let p = bench();
        assert!(matches!(p.eval(-0.1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(p.eval(2.0 + 1e-9), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn invalid_profiles_rejected() {
        assert!(SCurveProfile::new(0.1, 1.2, 0.2, 2.0, 1e-3).is_err());
        assert!(SCurveProfile::new(0.1, -0.1, 1.2, 2.0, 1e-3).is_err());
        assert!(SCurveProfile::new(0.1, 0.2, 1.2, 1.0, 1e-3).is_err());
        assert!(SCurveProfile::new(0.1, 0.2, 1.2, 2.0, 3e-4).is_err()); // not a divisor
        assert!(SCurveProfile::new(f64::NAN, 0.2, 1.2, 2.0, 1e-3).is_err());
    }

    #[test]
    fn sample_count_and_determinism() {
        let p = bench();
        assert_eq!(p.n_samples(), 2000);
        let a = p.sample();
        let b = p.sample();
        assert_eq!(a.len(), 2000);
        assert_eq!(a, b);
        let zero = SCurveProfile::new(0.0, 0.2, 1.2, 2.0, 1e-3).unwrap();
        assert!(zero.sample().iter().all(|&(r, rd, rdd)| r == 0.0 && rd == 0.0 && rdd == 0.0));
    }

    #[test]
    fn monotone_for_positive_amplitude() {
        let p = bench();
        let samples = p.sample();
        for w in samples.windows(2) {
            assert!(w[1].0 >= w[0].0);
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        // FD step chosen well below dt so truncation stays under the bound;
        // tolerance 1e-6 * amplitude / (t_end - t_start). The r'' check skips
        // the two junction samples where the clamped quintic's third
        // derivative jumps and a symmetric difference of r' loses its order.
        let p = bench();
        let h = 1e-5;
        let tol = 1e-6 * p.amplitude() / (p.t_end() - p.t_start());
        for k in 1..p.n_samples() - 1 {
            let t = k as f64 * p.dt();
            let (_, rd, rdd) = p.eval(t).unwrap();
            let (rp, rdp, _) = p.eval(t + h).unwrap();
            let (rm, rdm, _) = p.eval(t - h).unwrap();
            assert!(((rp - rm) / (2.0 * h) - rd).abs() <= tol, "r' at t={t}");
            let at_junction =
                (t - p.t_start()).abs() <= h || (t - p.t_end()).abs() <= h;
            if !at_junction {
                assert!(((rdp - rdm) / (2.0 * h) - rdd).abs() <= tol, "r'' at t={t}");
            }
        }
    }

    #[test]
    fn velocity_integrates_to_displacement() {
        // Cumulative trapezoid of r' vs r: the end-to-end displacement match
        // is tight (the trapezoid error telescopes and r'' vanishes at both
        // ends); pointwise mid-motion the rule carries its O(dt^2) bias.
        let p = bench();
        let samples = p.sample();
        let mut acc = 0.0;
        let mut worst = 0.0f64;
        for k in 1..samples.len() {
            acc += 0.5 * (samples[k].1 + samples[k - 1].1) * p.dt();
            worst = worst.max((acc - samples[k].0).abs());
        }
        let max_rddot = samples.iter().map(|s| s.2.abs()).fold(0.0, f64::max);
        assert!(worst <= p.dt() * p.dt() / 12.0 * max_rddot * 1.5, "pointwise {worst}");
        let end_err = (acc - (samples.last().unwrap().0 - samples[0].0)).abs();
        assert!(end_err <= 1e-9 * p.amplitude(), "terminal {end_err}");
    }
}
