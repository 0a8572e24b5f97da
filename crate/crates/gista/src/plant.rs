//! Continuous-time plant models: the flexure-joint dual-drive gantry and a
//! single-axis "oracle" plant whose lumped uncertainty is known in closed
//! form, for verifying the learning law.
//!
//! Controller outputs are in amperes throughout; the force constant `k_f`
//! (N/A) maps them to forces inside the plants.

use crate::error::{ensure_finite, Error, Result};

/// Position/velocity pair of one mechanical axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisState {
    /// Position (m).
    pub x1: f64,
    /// Velocity (m/s).
    pub x2: f64,
}

/// Flexure coupling force between the parallel carriages,
/// `v = k_v * (y1 - y2)`.
pub fn coupling_force(y1: f64, y2: f64, k_v: f64) -> f64 {
    k_v * (y1 - y2)
}

/// Cross-arm rotation angle for carriage positions `y1`, `y2`:
/// `theta = atan((y1 - y2) / l_arm)`.
pub fn theta(y1: f64, y2: f64, l_arm: f64) -> f64 {
    ((y1 - y2) / l_arm).atan()
}

/// Lumped disturbance shape: constant bias, Coulomb and extra viscous
/// friction, and a sinusoidal component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceSpec {
    /// Constant force (N).
    pub constant: f64,
    /// Coulomb friction amplitude (N), applied as `sgn(velocity)`.
    pub coulomb_amp: f64,
    /// Extra viscous coefficient (N·s/m) on top of the plant damping.
    pub viscous_extra: f64,
    /// Sinusoid amplitude (N).
    pub sin_amp: f64,
    /// Sinusoid frequency (Hz).
    pub sin_freq: f64,
    /// Sinusoid phase offset (rad).
    pub sin_phase: f64,
}

impl Default for DisturbanceSpec {
    fn default() -> Self {
        Self {
            constant: 0.0,
            coulomb_amp: 0.0,
            viscous_extra: 0.0,
            sin_amp: 0.0,
            sin_freq: 0.0,
            sin_phase: 0.0,
        }
    }
}

impl DisturbanceSpec {
    /// Rejects negative amplitudes/coefficients and non-finite fields.
    pub fn validate(&self) -> Result<()> {
        ensure_finite("disturbance constant", self.constant)?;
        ensure_finite("disturbance sin_phase", self.sin_phase)?;
        for (what, v) in [
            ("coulomb_amp", self.coulomb_amp),
            ("viscous_extra", self.viscous_extra),
            ("sin_amp", self.sin_amp),
            ("sin_freq", self.sin_freq),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParam { what: "disturbance amplitude", value: v });
            }
            let _ = what;
        }
        Ok(())
    }
}

/// Evaluates the lumped disturbance force at a given velocity and time.
///
/// `constant + coulomb_amp * sgn(velocity) + viscous_extra * velocity +
/// sin_amp * sin(2 pi sin_freq t + sin_phase)`, with the `sgn(0) = 0`
/// convention.
pub fn disturbance(spec: &DisturbanceSpec, velocity: f64, t: f64) -> f64 {
    let sg = if velocity > 0.0 {
        1.0
    } else if velocity < 0.0 {
        -1.0
    } else {
        0.0
    };
    spec.constant
        + spec.coulomb_amp * sg
        + spec.viscous_extra * velocity
        + spec.sin_amp
            * (2.0 * std::f64::consts::PI * spec.sin_freq * t + spec.sin_phase).sin()
}

/// Dual-drive gantry constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GantryParams {
    /// End-effector mass (kg).
    pub m_e: f64,
    /// Cross-arm mass (kg).
    pub m_c: f64,
    /// X1 carriage mass (kg).
    pub m_1: f64,
    /// X2 carriage mass (kg).
    pub m_2: f64,
    /// Flexure stiffness (N/m).
    pub k_v: f64,
    /// X1 damping (N·s/m).
    pub gamma_1: f64,
    /// X2 damping (N·s/m).
    pub gamma_2: f64,
    /// Y damping (N·s/m).
    pub gamma_e: f64,
    /// Force constant (N/A).
    pub k_f: f64,
    /// Cross-arm effective length (m); sets the rotation geometry.
    pub l_arm: f64,
    /// Rotation guard: derivatives error out when `cos(theta)` drops below.
    pub cos_min: f64,
}

impl Default for GantryParams {
    /// Bench constants of the simulated stage.
    fn default() -> Self {
        Self {
            m_e: 11.512,
            m_c: 4.371,
            m_1: 1.728,
            m_2: 1.586,
            k_v: 8693.7,
            gamma_1: 172.7,
            gamma_2: 172.7,
            gamma_e: 172.7,
            k_f: 100.0,
            l_arm: 0.5,
            cos_min: 0.5,
        }
    }
}

impl GantryParams {
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("m_e", self.m_e),
            ("m_c", self.m_c),
            ("m_1", self.m_1),
            ("m_2", self.m_2),
            ("k_v", self.k_v),
            ("k_f", self.k_f),
            ("l_arm", self.l_arm),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParam { what, value: v });
            }
        }
        for (what, v) in [
            ("gamma_1", self.gamma_1),
            ("gamma_2", self.gamma_2),
            ("gamma_e", self.gamma_e),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParam { what, value: v });
            }
        }
        if !self.cos_min.is_finite() || self.cos_min <= 0.0 || self.cos_min > 1.0 {
            return Err(Error::InvalidParam { what: "cos_min", value: self.cos_min });
        }
        Ok(())
    }

    /// Effective X1 inertia, `(m_e + m_c)/2 + m_1`. Recomputed on demand.
    pub fn m1_eff(&self) -> f64 {
        0.5 * (self.m_e + self.m_c) + self.m_1
    }

    /// Effective X2 inertia, `(m_e + m_c)/2 + m_2`.
    pub fn m2_eff(&self) -> f64 {
        0.5 * (self.m_e + self.m_c) + self.m_2
    }
}

/// Positions and velocities of the three carriages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GantryState {
    pub y1: f64,
    pub y2: f64,
    pub yy: f64,
    pub y1_dot: f64,
    pub y2_dot: f64,
    pub yy_dot: f64,
}

impl GantryState {
    pub const REST: Self = Self {
        y1: 0.0,
        y2: 0.0,
        yy: 0.0,
        y1_dot: 0.0,
        y2_dot: 0.0,
        yy_dot: 0.0,
    };

    pub fn from_array(a: &[f64; 6]) -> Self {
        Self { y1: a[0], y2: a[1], yy: a[2], y1_dot: a[3], y2_dot: a[4], yy_dot: a[5] }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.y1, self.y2, self.yy, self.y1_dot, self.y2_dot, self.yy_dot]
    }
}

/// Gantry equations of motion with explicit control and disturbance forces.
///
/// ```text
/// M1 y1'' = k_f u1 - gamma_1 y1' - v + d1
/// M2 y2'' = k_f u2 - gamma_2 y2' + v + d2
/// Me yy'' = k_f uy - (gamma_e / cos(theta)) yy' + dy,   Me = m_e / cos(theta)
/// ```
///
/// with `v = k_v (y1 - y2)`: the flexure is a positive stiffness between the
/// carriages, pulling a carriage that runs ahead back toward the other.
/// `v` and `theta` are recomputed from the current state; `Me` varies with
/// the rotation. Returns the state derivative in the `[positions, velocities]`
/// array layout. Errors out when `cos(theta)` falls below the guard.
pub fn gantry_derivatives(
    st: &GantryState,
    u: [f64; 3],
    d: [f64; 3],
    p: &GantryParams,
    theta_frozen_zero: bool,
) -> Result<[f64; 6]> {
    let v = coupling_force(st.y1, st.y2, p.k_v);
    let th = if theta_frozen_zero { 0.0 } else { theta(st.y1, st.y2, p.l_arm) };
    let cos_th = th.cos();
    if cos_th < p.cos_min {
        return Err(Error::RotationSingular { cos_theta: cos_th, cos_min: p.cos_min });
    }
    let a1 = (p.k_f * u[0] - p.gamma_1 * st.y1_dot - v + d[0]) / p.m1_eff();
    let a2 = (p.k_f * u[1] - p.gamma_2 * st.y2_dot + v + d[1]) / p.m2_eff();
    let m_e_eff = p.m_e / cos_th;
    let ay = (p.k_f * u[2] - (p.gamma_e / cos_th) * st.yy_dot + d[2]) / m_e_eff;
    Ok([st.y1_dot, st.y2_dot, st.yy_dot, a1, a2, ay])
}

/// Gantry plant bundling parameters with per-carriage disturbance shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct GantryPlant {
    pub params: GantryParams,
    /// Disturbances for X1, X2, Y in that order.
    pub disturbances: [DisturbanceSpec; 3],
    /// Hold the rotation at zero (decouples the Y inertia from the X spread).
    pub theta_frozen_zero: bool,
}

impl GantryPlant {
    pub fn new(
        params: GantryParams,
        disturbances: [DisturbanceSpec; 3],
        theta_frozen_zero: bool,
    ) -> Result<Self> {
        params.validate()?;
        for d in &disturbances {
            d.validate()?;
        }
        Ok(Self { params, disturbances, theta_frozen_zero })
    }

    /// Kinetic plus flexure potential energy. With zero input and zero
    /// disturbance this decays at the rate set by the dampings (the `cos`
    /// factors in the Y equation cancel in the power balance).
    pub fn mechanical_energy(&self, st: &GantryState) -> f64 {
        let p = &self.params;
        0.5 * p.m1_eff() * st.y1_dot * st.y1_dot
            + 0.5 * p.m2_eff() * st.y2_dot * st.y2_dot
            + 0.5 * p.m_e * st.yy_dot * st.yy_dot
            + 0.5 * p.k_v * (st.y1 - st.y2) * (st.y1 - st.y2)
    }
}

/// Single-axis oracle constants: `x'' = (k_f u - gamma x' + w(t)) / m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleAxisParams {
    pub m: f64,
    pub gamma: f64,
    pub k_f: f64,
}

impl Default for OracleAxisParams {
    fn default() -> Self {
        Self { m: 1.0, gamma: 0.0, k_f: 1.0 }
    }
}

impl OracleAxisParams {
    pub fn validate(&self) -> Result<()> {
        if !self.m.is_finite() || self.m <= 0.0 {
            return Err(Error::InvalidParam { what: "m", value: self.m });
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::InvalidParam { what: "gamma", value: self.gamma });
        }
        if !self.k_f.is_finite() || self.k_f <= 0.0 {
            return Err(Error::InvalidParam { what: "k_f", value: self.k_f });
        }
        Ok(())
    }
}

/// Second-order axis dynamics with an explicit known forcing `w` (N).
pub fn oracle_axis_derivatives(x: &AxisState, u: f64, p: &OracleAxisParams, w: f64) -> [f64; 2] {
    [x.x2, (p.k_f * u - p.gamma * x.x2 + w) / p.m]
}

/// Oracle plant: every term is known to the harness, so the lumped
/// uncertainty entering the sliding dynamics can be evaluated exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleAxisPlant {
    pub params: OracleAxisParams,
    pub forcing: DisturbanceSpec,
}

impl OracleAxisPlant {
    pub fn new(params: OracleAxisParams, forcing: DisturbanceSpec) -> Result<Self> {
        params.validate()?;
        forcing.validate()?;
        Ok(Self { params, forcing })
    }

    /// Exact lumped uncertainty for the sliding variable
    /// `s = lambda (y - r) + (y' - r')`:
    ///
    /// `psi = s' - u = lambda (x2 - r') - r'' + (k_f u - gamma x2 + w)/m - u`.
    pub fn analytic_psi(
        &self,
        st: &AxisState,
        u: f64,
        lambda: f64,
        r_dot: f64,
        r_ddot: f64,
        t: f64,
    ) -> f64 {
        let w = disturbance(&self.forcing, st.x2, t);
        lambda * (st.x2 - r_dot) - r_ddot
            + (self.params.k_f * u - self.params.gamma * st.x2 + w) / self.params.m
            - u
    }
}

/// What the fixed-step simulator needs from a plant with `D` state entries.
///
/// States are flat arrays laid out as all positions, then all velocities.
pub trait Plant<const D: usize> {
    fn n_axes(&self) -> usize;
    /// Stable axis labels used in logs and file columns.
    fn axis_names(&self) -> &'static [&'static str];
    fn initial_state(&self) -> [f64; D] {
        [0.0; D]
    }
    fn pos(&self, st: &[f64; D], axis: usize) -> f64;
    fn vel(&self, st: &[f64; D], axis: usize) -> f64;
    /// State derivative under held control `u` (one entry per axis) at time `t`.
    fn derivatives(&self, st: &[f64; D], u: &[f64], t: f64) -> Result<[f64; D]>;
    /// Disturbance force on `axis` at the given state and time (for logging).
    fn disturbance_at(&self, st: &[f64; D], axis: usize, t: f64) -> f64;
}

impl Plant<6> for GantryPlant {
    fn n_axes(&self) -> usize {
        3
    }

    fn axis_names(&self) -> &'static [&'static str] {
        &["x1", "x2", "y"]
    }

    fn pos(&self, st: &[f64; 6], axis: usize) -> f64 {
        st[axis]
    }

    fn vel(&self, st: &[f64; 6], axis: usize) -> f64 {
        st[axis + 3]
    }

    fn derivatives(&self, st: &[f64; 6], u: &[f64], t: f64) -> Result<[f64; 6]> {
        let state = GantryState::from_array(st);
        let d = [
            disturbance(&self.disturbances[0], state.y1_dot, t),
            disturbance(&self.disturbances[1], state.y2_dot, t),
            disturbance(&self.disturbances[2], state.yy_dot, t),
        ];
        gantry_derivatives(&state, [u[0], u[1], u[2]], d, &self.params, self.theta_frozen_zero)
    }

    fn disturbance_at(&self, st: &[f64; 6], axis: usize, t: f64) -> f64 {
        disturbance(&self.disturbances[axis], st[axis + 3], t)
    }
}

impl Plant<2> for OracleAxisPlant {
    fn n_axes(&self) -> usize {
        1
    }

    fn axis_names(&self) -> &'static [&'static str] {
        &["ax"]
    }

    fn pos(&self, st: &[f64; 2], _axis: usize) -> f64 {
        st[0]
    }

    fn vel(&self, st: &[f64; 2], _axis: usize) -> f64 {
        st[1]
    }

    fn derivatives(&self, st: &[f64; 2], u: &[f64], t: f64) -> Result<[f64; 2]> {
        let state = AxisState { x1: st[0], x2: st[1] };
        let w = disturbance(&self.forcing, state.x2, t);
        Ok(oracle_axis_derivatives(&state, u[0], &self.params, w))
    }

    fn disturbance_at(&self, st: &[f64; 2], _axis: usize, t: f64) -> f64 {
        disturbance(&self.forcing, st[1], t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_force_values() {
        assert_eq!(coupling_force(0.001, 0.001, 8693.7), 0.0);
        assert!((coupling_force(0.001, 0.0005, 8693.7) - 4.34685).abs() < 1e-12);
        assert!((coupling_force(0.0, 1e-3, 8693.7) - (-8.6937)).abs() < 1e-12);
    }

    #[test]
    fn theta_values() {
        for &x in &[0.0, 0.3, -1.7] {
            assert_eq!(theta(x, x, 0.5), 0.0);
        }
        let y2 = 0.01;
        let y1 = 0.5 * (0.01f64).tan() + y2;
        assert!((theta(y1, y2, 0.5) - 0.01).abs() < 1e-12);
        assert!((theta(1e-3, 0.0, 0.5) - 1.99999733e-3).abs() < 1e-11);
    }

    #[test]
    fn disturbance_terms() {
        let zero = DisturbanceSpec::default();
        assert_eq!(disturbance(&zero, 1.0, 2.0), 0.0);
        let coulomb = DisturbanceSpec { coulomb_amp: 2.0, ..Default::default() };
        assert_eq!(disturbance(&coulomb, -0.1, 0.0), -2.0);
        assert_eq!(disturbance(&coulomb, 0.0, 0.0), 0.0);
        let sin = DisturbanceSpec { sin_amp: 1.0, sin_freq: 1.0, ..Default::default() };
        assert!((disturbance(&sin, 0.0, 0.25) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_masses() {
        let p = GantryParams::default();
        assert!((p.m1_eff() - 9.6695).abs() < 1e-12);
        assert!((p.m2_eff() - 9.5275).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_has_zero_derivatives() {
        let p = GantryParams::default();
        let d = gantry_derivatives(&GantryState::REST, [0.0; 3], [0.0; 3], &p, false).unwrap();
        assert_eq!(d, [0.0; 6]);
    }

    #[test]
    fn coupling_accelerations_from_offset() {
        // y1 = 1 mm ahead of y2: v = 8.6937 N pulls X1 back and X2 forward.
        let p = GantryParams::default();
        let st = GantryState { y1: 1e-3, ..GantryState::REST };
        let d = gantry_derivatives(&st, [0.0; 3], [0.0; 3], &p, false).unwrap();
        assert!((d[3] - (-0.8991)).abs() < 1e-4, "a1 = {}", d[3]);
        assert!((d[4] - 0.91249).abs() < 1e-4, "a2 = {}", d[4]);
        assert_eq!(d[5], 0.0);
    }

    #[test]
    fn rotation_guard_triggers() {
        let p = GantryParams { cos_min: 0.99, ..Default::default() };
        // atan(0.2/0.5) = 21.8 deg, cos = 0.928 < 0.99
        let st = GantryState { y1: 0.2, ..GantryState::REST };
        let err = gantry_derivatives(&st, [0.0; 3], [0.0; 3], &p, false);
        assert!(matches!(err, Err(Error::RotationSingular { .. })));
        // frozen theta bypasses the geometry entirely
        assert!(gantry_derivatives(&st, [0.0; 3], [0.0; 3], &p, true).is_ok());
    }

    #[test]
    fn mirror_symmetric_derivatives() {
        let params = GantryParams { m_2: 1.728, gamma_2: 172.7, ..Default::default() };
        let spec = DisturbanceSpec { coulomb_amp: 2.0, sin_amp: 0.5, sin_freq: 5.0, ..Default::default() };
        let plant = GantryPlant::new(params, [spec; 3], false).unwrap();
        let st = [0.01, 0.01, 0.02, 0.1, 0.1, -0.3];
        let d = Plant::derivatives(&plant, &st, &[0.5, 0.5, -0.2], 0.33).unwrap();
        assert_eq!(d[0], d[1]);
        assert_eq!(d[3], d[4]);
    }

    #[test]
    fn oracle_axis_cases() {
        let p = OracleAxisParams::default();
        let rest = AxisState { x1: 0.0, x2: 0.0 };
        assert_eq!(oracle_axis_derivatives(&rest, 0.0, &p, 0.0), [0.0, 0.0]);
        assert_eq!(oracle_axis_derivatives(&rest, 1.0, &p, 0.0), [0.0, 1.0]);
    }

    #[test]
    fn derivatives_stay_finite_on_bounded_box() {
        // Deterministic LCG fuzz over the state/input box within the guard.
        let plant = GantryPlant::new(
            GantryParams::default(),
            [DisturbanceSpec { coulomb_amp: 2.0, sin_amp: 0.5, sin_freq: 5.0, ..Default::default() }; 3],
            false,
        )
        .unwrap();
        let mut lcg: u64 = 0x243F6A8885A308D3;
        let mut unit = || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (lcg >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for i in 0..1_000_000 {
            let st = [
                0.2 * unit(),
                0.2 * unit(),
                0.5 * unit(),
                2.0 * unit(),
                2.0 * unit(),
                2.0 * unit(),
            ];
            let u = [5.0 * unit(), 5.0 * unit(), 5.0 * unit()];
            let t = 2.0 * (unit() + 1.0);
            let d = Plant::derivatives(&plant, &st, &u, t)
                .unwrap_or_else(|e| panic!("sample {i}: {e}"));
            assert!(d.iter().all(|x| x.is_finite()), "sample {i}: {d:?}");
        }
    }
}
