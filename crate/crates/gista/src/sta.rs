//! Generalized super-twisting algorithm: the switching functions phi and
//! varrho, their gains, and the one-step control update.
//!
//! The control term is `u_st = -k1 * phi(s) + k2 * v` with the internal
//! integrator `v' = -varrho(s)`. With `kc = 0` both functions degrade to the
//! classic super-twisting terms `|s|^(1/2) sgn(s)` and `sgn(s)/2`.

use crate::error::{ensure_finite, Error, Result};

/// Sign of `x` with the `sgn(0) = 0` convention.
///
/// The zero convention keeps `phi` and `varrho` odd and injects no control at
/// an exact zero crossing.
pub fn sgn(x: f64) -> Result<f64> {
    ensure_finite("sgn input", x)?;
    Ok(if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    })
}

fn check_kc(kc: f64) -> Result<f64> {
    if !kc.is_finite() || kc < 0.0 {
        return Err(Error::InvalidParam { what: "kc", value: kc });
    }
    Ok(kc)
}

/// `phi(s) = |s|^(1/2) sgn(s) + kc * s`, odd and strictly increasing in `s`.
pub fn phi(s: f64, kc: f64) -> Result<f64> {
    ensure_finite("phi input s", s)?;
    check_kc(kc)?;
    Ok(s.abs().sqrt() * sgn(s)? + kc * s)
}

/// `varrho(s) = sgn(s)/2 + (3/2) kc |s|^(1/2) sgn(s) + kc^2 s`.
///
/// Closed form of `dphi/ds * phi`; the identity holds for every `s != 0` and
/// extends to `varrho(0) = 0` under the `sgn(0) = 0` convention.
pub fn varrho(s: f64, kc: f64) -> Result<f64> {
    ensure_finite("varrho input s", s)?;
    check_kc(kc)?;
    let sg = sgn(s)?;
    Ok(0.5 * sg + 1.5 * kc * s.abs().sqrt() * sg + kc * kc * s)
}

/// `dphi/ds = |s|^(-1/2) / 2 + kc`, singular at `s = 0`.
///
/// Exposed for verifying the chain-rule identity behind [`varrho`]; the
/// production path always uses the closed form.
pub fn dphi_ds(s: f64, kc: f64) -> Result<f64> {
    ensure_finite("dphi_ds input s", s)?;
    check_kc(kc)?;
    if s == 0.0 {
        return Err(Error::SingularDerivative);
    }
    Ok(0.5 / s.abs().sqrt() + kc)
}

/// Super-twisting control gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaGains {
    k1: f64,
    k2: f64,
    kc: f64,
}

impl StaGains {
    /// Requires `k1 > 0`, `k2 > 0`, `kc >= 0`.
    pub fn new(k1: f64, k2: f64, kc: f64) -> Result<Self> {
        if !k1.is_finite() || k1 <= 0.0 {
            return Err(Error::InvalidParam { what: "k1", value: k1 });
        }
        if !k2.is_finite() || k2 <= 0.0 {
            return Err(Error::InvalidParam { what: "k2", value: k2 });
        }
        check_kc(kc)?;
        Ok(Self { k1, k2, kc })
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn kc(&self) -> f64 {
        self.kc
    }
}

/// Super-twisting integrator state together with its gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GstaState {
    v: f64,
    gains: StaGains,
}

impl GstaState {
    /// Fresh state with `v = 0`.
    pub fn new(gains: StaGains) -> Self {
        Self { v: 0.0, gains }
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn gains(&self) -> &StaGains {
        &self.gains
    }

    /// Resets the integrator to `v = 0` (iteration rollover).
    pub fn reset(&mut self) {
        self.v = 0.0;
    }

    /// One sample-and-hold control update at rate `1/dt`.
    ///
    /// Computes `u_st = -k1 phi(s) + k2 v` with the current `v`, then
    /// advances the integrator by explicit forward Euler, `v' = v - dt *
    /// varrho(s)`. Returns the control value and the advanced state.
    pub fn step(&self, s: f64, dt: f64) -> Result<(f64, Self)> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidParam { what: "dt", value: dt });
        }
        let u_st = -self.gains.k1 * phi(s, self.gains.kc)? + self.gains.k2 * self.v;
        ensure_finite("u_st", u_st)?;
        let v_next = self.v - dt * varrho(s, self.gains.kc)?;
        ensure_finite("v", v_next)?;
        Ok((u_st, Self { v: v_next, gains: self.gains }))
    }
}
