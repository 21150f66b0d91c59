//! Transverse oscillator functions and relativistic Landau-level kinematics.

use num_complex::Complex64;
use thiserror::Error;

use crate::units::{ChannelParams, FieldStrength, Regime, Spin};

/// Highest oscillator index accepted by [`eval_oscillator`].
pub const MAX_OSCILLATOR_INDEX: i64 = 200;

/// Beyond this `|ξ|` every function up to [`MAX_OSCILLATOR_INDEX`] is below
/// the smallest subnormal double and [`eval_oscillator`] returns zero.
pub const MAX_OSCILLATOR_ARG: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OscillatorError {
    #[error("oscillator index {0} outside supported range -1..={MAX_OSCILLATOR_INDEX}")]
    IndexOutOfRange(i64),
    #[error("oscillator argument {0} is not finite")]
    NonFinite(f64),
}

const RESCALE: f64 = 1e150;

/// Normalised oscillator function
/// `Φ_n(ξ) = (2ⁿ n! √π)^(-1/2) H_n(ξ) e^(-ξ²/2)`, with `Φ_{-1} ≡ 0`.
///
/// Uses the three-term recurrence on the normalised functions,
/// `Φ_{k+1} = √(2/(k+1)) ξ Φ_k − √(k/(k+1)) Φ_{k-1}`, run on an unscaled
/// polynomial part with a separately tracked logarithmic scale so neither
/// the Gaussian factor underflows nor the polynomial overflows.
pub fn eval_oscillator(n: i64, xi: f64) -> Result<f64, OscillatorError> {
    if !(-1..=MAX_OSCILLATOR_INDEX).contains(&n) {
        return Err(OscillatorError::IndexOutOfRange(n));
    }
    if !xi.is_finite() {
        return Err(OscillatorError::NonFinite(xi));
    }
    if n < 0 {
        return Ok(0.0);
    }
    if xi.abs() > MAX_OSCILLATOR_ARG {
        return Ok(0.0);
    }
    let mut log_scale = -0.5 * xi * xi - 0.25 * std::f64::consts::PI.ln();
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    if cur == 0.0 {
        return Ok(0.0);
    }
    Ok(cur.signum() * (cur.abs().ln() + log_scale).exp())
}

/// Energy of the Landau state `(spin, level)` with longitudinal momentum `cp`
/// in a region of potential `v`: `(+, k)` carries `C_{k+1}`, `(-, k)` carries `C_k`.
pub fn level_energy(spin: Spin, level: u32, cp: f64, field: FieldStrength, v: f64) -> f64 {
    let c = match spin {
        Spin::Up => field.c_n(level + 1),
        Spin::Down => field.c_n(level),
    };
    (cp * cp + 1.0 + c).sqrt() + v
}

/// Incoming (and reflected) longitudinal momentum `cp = (E² − 1 − C_n)^(1/2)`.
pub fn momentum_left(params: &ChannelParams) -> f64 {
    let e = params.energy();
    (e * e - 1.0 - params.c_n()).sqrt()
}

/// Transmitted longitudinal momentum `cq` with the branch fixed by regime:
/// `+|cq|` above the step, `−|cq|` in the Klein regime (so the group velocity
/// `cq/(E − V0)` points into the step), `+i|cq|` when evanescent.
pub fn momentum_right(params: &ChannelParams) -> Complex64 {
    let e_bar = params.energy() - params.v0();
    let q_sq = e_bar * e_bar - 1.0 - params.c_n();
    let mag = q_sq.abs().sqrt();
    match params.regime() {
        Regime::CaseII => Complex64::new(mag, 0.0),
        Regime::CaseI => Complex64::new(-mag, 0.0),
        Regime::CaseIII => Complex64::new(0.0, mag),
    }
}
