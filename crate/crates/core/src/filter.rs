//! Spin filtering by time of flight.
//!
//! With `g ≠ 2` the pair `(+, n−1)` / `(−, n)` is no longer degenerate. At a
//! common total energy the spin term is compensated by the longitudinal
//! momentum:
//!
//! ```text
//! E² = (cp)² + 1 + 2b(n_orb + 1/2) + g·b·s_z
//! ```
//!
//! with `(n_orb, s_z) = (n−1, +1/2)` for the up member and `(n, −1/2)` for the
//! down member. At `g = 2` both reduce to `(cp)² = E² − 1 − 2bn`. The
//! up member is slower for `g > 2`, so its beam arrives later at a screen a
//! distance `d` from the step.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{FieldStrength, Regime};

/// Electron spin g-factor including radiative corrections.
pub const ANOMALOUS_G: f64 = 2.002319;

/// `ħ/(mc²)` in seconds (CODATA 2018).
pub const NATURAL_TIME_SECONDS: f64 = 1.054_571_817e-34 / 8.187_105_776_9e-14;

/// Compton length `ħ/(mc)` in metres (CODATA 2018).
pub const COMPTON_LENGTH_METRES: f64 = 3.861_592_679_6e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilterError {
    #[error("channel closed at this energy: (cp)² = {cp_squared} for the {member} member")]
    ClosedChannel {
        cp_squared: f64,
        member: &'static str,
    },
    #[error("transmitted beams are evanescent inside the step")]
    EvanescentBranch,
    #[error("filter setup invalid: {0}")]
    InvalidSetup(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Reflected,
    Transmitted,
}

impl std::str::FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "reflected" => Ok(Branch::Reflected),
            "transmitted" => Ok(Branch::Transmitted),
            other => Err(format!("unknown branch `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSetup {
    pub energy: f64,
    /// Shared channel index of the pair, `n ≥ 1`.
    pub n: u32,
    pub field: FieldStrength,
    pub g: f64,
    /// Flight distance in Compton units.
    pub distance: f64,
    pub branch: Branch,
    /// Step height; only used by [`Branch::Transmitted`].
    pub v0: f64,
}

impl FilterSetup {
    pub fn reflected(energy: f64, n: u32, field: FieldStrength, g: f64, distance: f64) -> Self {
        Self {
            energy,
            n,
            field,
            g,
            distance,
            branch: Branch::Reflected,
            v0: 0.0,
        }
    }

    fn validate(&self) -> Result<(), FilterError> {
        if self.n == 0 {
            return Err(FilterError::InvalidSetup(
                "the pair (+, n-1)/(-, n) needs n >= 1".into(),
            ));
        }
        for (name, v) in [
            ("E", self.energy),
            ("g", self.g),
            ("d", self.distance),
            ("V0", self.v0),
        ] {
            if !v.is_finite() {
                return Err(FilterError::InvalidSetup(format!("{name} must be finite")));
            }
        }
        if self.distance < 0.0 {
            return Err(FilterError::InvalidSetup(
                "distance must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Longitudinal kinetic energy available in the flight region:
    /// `E` on the reflected side, `E − V0` inside the step.
    fn flight_energy(&self) -> f64 {
        match self.branch {
            Branch::Reflected => self.energy,
            Branch::Transmitted => self.energy - self.v0,
        }
    }

    /// `Δ(cp²) = cp_down² − cp_up² = (g − 2)·b`.
    fn splitting(&self) -> f64 {
        (self.g - 2.0) * self.field.b()
    }

    /// `(cp_up², cp_down²)` at the flight energy, split symmetrically about
    /// the degenerate value `E² − 1 − 2bn`.
    fn momenta_squared(&self) -> (f64, f64) {
        let e = self.flight_energy();
        let mid = e * e - 1.0 - self.field.c_n(self.n);
        let half = 0.5 * self.splitting();
        (mid - half, mid + half)
    }
}

/// Longitudinal momenta `(cp_up, cp_down)` of the split pair.
pub fn split_momenta(setup: &FilterSetup) -> Result<(f64, f64), FilterError> {
    setup.validate()?;
    let (up, down) = setup.momenta_squared();
    if setup.branch == Branch::Transmitted && (up <= 0.0 || down <= 0.0) {
        return Err(FilterError::EvanescentBranch);
    }
    if up <= 0.0 {
        return Err(FilterError::ClosedChannel {
            cp_squared: up,
            member: "up",
        });
    }
    if down <= 0.0 {
        return Err(FilterError::ClosedChannel {
            cp_squared: down,
            member: "down",
        });
    }
    Ok((up.sqrt(), down.sqrt()))
}

/// Arrival delay `Δt = d/v_up − d/v_down` in units of `ħ/(mc²)`, with
/// `v = cp/|E|` (or `cq/|E − V0|` inside the step). Positive when the up
/// member is the slower beam.
pub fn arrival_delay(setup: &FilterSetup) -> Result<f64, FilterError> {
    if setup.branch == Branch::Transmitted {
        let mass = setup.field.channel_mass(setup.n);
        if Regime::classify(setup.energy, setup.v0, mass) == Regime::CaseIII {
            return Err(FilterError::EvanescentBranch);
        }
    }
    let (up, down) = split_momenta(setup)?;
    // d|E|(1/up − 1/down) without cancelling two nearly equal flight times
    Ok(
        setup.distance * setup.flight_energy().abs() * setup.splitting()
            / (up * down * (up + down)),
    )
}

/// Leading-order delay `d|E|Δ(cp²)/(2 cp³)` about the degenerate momentum.
pub fn first_order_delay(setup: &FilterSetup) -> Result<f64, FilterError> {
    setup.validate()?;
    let e = setup.flight_energy();
    let cp_sq = e * e - 1.0 - setup.field.c_n(setup.n);
    if cp_sq <= 0.0 {
        return Err(FilterError::ClosedChannel {
            cp_squared: cp_sq,
            member: "degenerate",
        });
    }
    Ok(setup.distance * e.abs() * setup.splitting() / (2.0 * cp_sq * cp_sq.sqrt()))
}
