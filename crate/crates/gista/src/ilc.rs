//! Signum-type iterative learning law.
//!
//! The learning memory stores one control trace `u_ilc` across the iteration
//! horizon; it is the negated estimate of the lumped uncertainty
//! (`psi_hat = -u_ilc`). Each new iteration updates a sample by
//! `u_ilc[k] - 2 q beta varrho(s[k])` when `|s[k]|` exceeds the deadband
//! `epsilon`, and otherwise holds the value already written for the previous
//! sample, which keeps the signum update from chattering around zero.

use crate::error::{ensure_finite, Error, Result};
use crate::sta::varrho;

/// Learning gains `q`, `beta` and the deadband threshold `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IlcParams {
    q: f64,
    beta: f64,
    epsilon: f64,
}

impl IlcParams {
    /// Requires `q > 0`, `beta > 0`, `epsilon >= 0`.
    pub fn new(q: f64, beta: f64, epsilon: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 {
            return Err(Error::InvalidParam { what: "q", value: q });
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::InvalidParam { what: "beta", value: beta });
        }
        // epsilon = +inf is allowed: it degenerates to the all-hold chain.
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::InvalidParam { what: "epsilon", value: epsilon });
        }
        Ok(Self { q, beta, epsilon })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Stored learning input over one iteration, plus the iteration counter.
///
/// Iteration 0 memory is identically zero, so the first iteration runs on
/// the super-twisting term alone.
#[derive(Debug, Clone, PartialEq)]
pub struct IlcMemory {
    samples: Vec<f64>,
    iteration_index: usize,
}

impl IlcMemory {
    /// Zero-initialized memory over `n` samples.
    pub fn init(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyHorizon);
        }
        Ok(Self { samples: vec![0.0; n], iteration_index: 0 })
    }

    /// Wraps an already-computed trace as the memory of iteration `index`.
    pub fn from_samples(samples: Vec<f64>, iteration_index: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyHorizon);
        }
        for &x in &samples {
            ensure_finite("ilc memory sample", x)?;
        }
        Ok(Self { samples, iteration_index })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn iteration_index(&self) -> usize {
        self.iteration_index
    }
}

/// One-sample learning update during the current iteration.
///
/// `prev_at_k` is the memory of the previous iteration at this sample;
/// `held` is the value already written for sample `k - 1` of the current
/// iteration (callers pass 0 for `k = 0`, consistent with the zero
/// initialization).
pub fn sample_update(
    prev_at_k: f64,
    s_k: f64,
    params: &IlcParams,
    kc: f64,
    held: f64,
) -> Result<f64> {
    ensure_finite("ilc previous sample", prev_at_k)?;
    ensure_finite("sliding variable", s_k)?;
    ensure_finite("ilc held value", held)?;
    let out = if s_k.abs() > params.epsilon {
        prev_at_k - 2.0 * params.q * params.beta * varrho(s_k, kc)?
    } else {
        held
    };
    ensure_finite("ilc update", out)
}

/// Applies [`sample_update`] over a whole sliding-variable trace, threading
/// the hold value, and returns the next iteration's memory.
pub fn run_iteration_update(
    mem: &IlcMemory,
    s_trace: &[f64],
    params: &IlcParams,
    kc: f64,
) -> Result<IlcMemory> {
    if s_trace.len() != mem.len() {
        return Err(Error::LengthMismatch { expected: mem.len(), got: s_trace.len() });
    }
    let mut out = Vec::with_capacity(mem.len());
    for (k, (&prev, &s)) in mem.samples.iter().zip(s_trace).enumerate() {
        let held = if k == 0 { 0.0 } else { out[k - 1] };
        out.push(sample_update(prev, s, params, kc, held)?);
    }
    IlcMemory::from_samples(out, mem.iteration_index + 1)
}

/// Uncertainty estimate housed by the memory: `psi_hat = -u_ilc`.
pub fn psi_estimate(mem: &IlcMemory) -> Vec<f64> {
    mem.samples.iter().map(|&x| -x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(q: f64, beta: f64, epsilon: f64) -> IlcParams {
        IlcParams::new(q, beta, epsilon).unwrap()
    }

    #[test]
    fn init_is_zero() {
        let mem = IlcMemory::init(5).unwrap();
        assert_eq!(mem.samples(), &[0.0; 5]);
        assert_eq!(mem.iteration_index(), 0);
        assert_eq!(IlcMemory::init(1).unwrap().len(), 1);
        assert_eq!(IlcMemory::init(0), Err(Error::EmptyHorizon));
    }

    #[test]
    fn params_reject_bad_values() {
        assert!(IlcParams::new(0.0, 0.1, 0.0).is_err());
        assert!(IlcParams::new(1.5, 0.0, 0.0).is_err());
        assert!(IlcParams::new(1.5, 0.1, -1.0).is_err());
        assert!(IlcParams::new(1.5, 0.1, f64::INFINITY).is_ok());
    }

    #[test]
    fn update_branch_fires_above_deadband() {
        let u = sample_update(0.0, 1.0, &params(1.5, 0.1, 1e-6), 0.1, 0.0).unwrap();
        assert!((u - (-0.198)).abs() < 1e-15, "{u}");
    }

    #[test]
    fn hold_branch_inside_deadband() {
        let u = sample_update(-0.198, 0.0, &params(1.5, 0.1, 1e-6), 0.1, -0.2).unwrap();
        assert_eq!(u, -0.2);
    }

    #[test]
    fn update_with_negative_sliding_variable() {
        let u = sample_update(0.5, -1.0, &params(1.5, 0.1, 0.0), 0.0, 0.0).unwrap();
        assert!((u - 0.65).abs() < 1e-15, "{u}");
    }

    #[test]
    fn whole_trace_in_deadband_holds_zero_chain() {
        let mem = IlcMemory::init(4).unwrap();
        let next = run_iteration_update(&mem, &[0.0; 4], &params(1.5, 0.1, 1e-6), 0.1).unwrap();
        assert_eq!(next.samples(), &[0.0; 4]);
        assert_eq!(next.iteration_index(), 1);
    }

    #[test]
    fn whole_trace_update() {
        let mem = IlcMemory::init(2).unwrap();
        let next = run_iteration_update(&mem, &[1.0, 1.0], &params(1.5, 0.1, 0.0), 0.1).unwrap();
        for &u in next.samples() {
            assert!((u - (-0.198)).abs() < 1e-15);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let mem = IlcMemory::init(3).unwrap();
        let err = run_iteration_update(&mem, &[1.0; 4], &params(1.5, 0.1, 0.0), 0.0);
        assert_eq!(err, Err(Error::LengthMismatch { expected: 3, got: 4 }));
    }

    #[test]
    fn psi_estimate_negates() {
        let mem = IlcMemory::from_samples(vec![0.0, 0.0], 0).unwrap();
        assert_eq!(psi_estimate(&mem), vec![0.0, 0.0]);
        let mem = IlcMemory::from_samples(vec![-0.198], 1).unwrap();
        assert_eq!(psi_estimate(&mem), vec![0.198]);
        let mem = IlcMemory::from_samples(vec![1.5, -2.0], 2).unwrap();
        assert_eq!(psi_estimate(&mem), vec![-1.5, 2.0]);
    }

    #[test]
    fn infinite_deadband_degenerates_to_zero_chain() {
        let mem = IlcMemory::from_samples(vec![0.3, -0.7, 0.1], 3).unwrap();
        let p = params(1.5, 0.1, f64::INFINITY);
        let next = run_iteration_update(&mem, &[5.0, -2.0, 9.0], &p, 0.1).unwrap();
        assert_eq!(next.samples(), &[0.0, 0.0, 0.0]);
    }

    proptest! {
        // The u_ilc recursion and the psi_hat recursion are the same law up
        // to negation when the deadband never fires (exact zeros excluded:
        // with epsilon = 0 those take the hold branch instead).
        #[test]
        fn matches_negated_psi_hat_update(
            s_trace in proptest::collection::vec(
                (-1e2f64..1e2).prop_filter("nonzero", |s| *s != 0.0), 1..40),
            mem0 in proptest::collection::vec(-10.0f64..10.0, 1..40),
            kc in 0.0f64..1.0,
        ) {
            let n = s_trace.len().min(mem0.len());
            let s_trace = &s_trace[..n];
            let mem0 = &mem0[..n];
            let p = params(1.5, 0.1, 0.0);
            let mem = IlcMemory::from_samples(mem0.to_vec(), 0).unwrap();
            let next = run_iteration_update(&mem, s_trace, &p, kc).unwrap();

            let psi_hat_prev: Vec<f64> = psi_estimate(&mem);
            for k in 0..n {
                let psi_hat_next =
                    psi_hat_prev[k] + 2.0 * p.q() * p.beta() * varrho(s_trace[k], kc).unwrap();
                prop_assert_eq!(next.samples()[k], -psi_hat_next);
            }
        }

        // |u_{i+1}(k) - u_i(k)| <= 2 q beta (1/2 + (3/2) kc max|s|^(1/2) + kc^2 max|s|)
        // whenever the update branch fires.
        #[test]
        fn update_magnitude_bound(
            s in (-1e3f64..1e3).prop_filter("outside deadband", |s| s.abs() > 1e-9),
            prev in -10.0f64..10.0,
            kc in 0.0f64..2.0,
        ) {
            let p = params(1.5, 0.1, 1e-9);
            let u = sample_update(prev, s, &p, kc, 0.0).unwrap();
            let bound = 2.0 * p.q() * p.beta()
                * (0.5 + 1.5 * kc * s.abs().sqrt() + kc * kc * s.abs());
            prop_assert!((u - prev).abs() <= bound * (1.0 + 1e-12));
        }
    }
}
