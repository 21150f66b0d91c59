//! Natural units and channel labels.
//!
//! Every quantity in this crate is dimensionless: energies are measured in
//! units of the electron rest energy `mc²`, and `c = ħ = 1`, so momenta are
//! reported as `cp` (numerically equal to `p`) and lengths are in Compton
//! units `ħ/(mc)`. In these units `m²c⁴ = 1`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while validating a scattering channel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("closed channel: E² = {e_squared} must exceed 1 + C_n = {threshold}")]
    ClosedChannel { e_squared: f64, threshold: f64 },
    #[error("spin-up incoming state requires channel index n >= 1 (state (+, n-1))")]
    InvalidSpinIndex,
    #[error("field strength b must be non-negative, got {0}")]
    NegativeField(f64),
    #[error("parameter `{0}` must be finite")]
    NonFinite(&'static str),
    #[error("step height V0 must be non-negative, got {0}")]
    NegativeStep(f64),
}

/// Magnetic field expressed as the cyclotron ratio `b = ħω/(mc²)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct FieldStrength(f64);

impl FieldStrength {
    pub fn new(b: f64) -> Result<Self, ChannelError> {
        if !b.is_finite() {
            return Err(ChannelError::NonFinite("b"));
        }
        if b < 0.0 {
            return Err(ChannelError::NegativeField(b));
        }
        // normalise -0.0
        Ok(Self(b.max(0.0)))
    }

    pub const fn zero() -> Self {
        Self(0.0)
    }

    pub fn b(self) -> f64 {
        self.0
    }

    /// Magnetic length `L = b^(-1/2)` in Compton units; infinite for `b = 0`.
    pub fn magnetic_length(self) -> f64 {
        self.0.sqrt().recip()
    }

    /// Landau channel energy `C_n = 2bn` in units of `(mc²)²`.
    pub fn c_n(self, n: u32) -> f64 {
        2.0 * self.0 * f64::from(n)
    }

    /// Channel mass `M_n = (1 + C_n)^(1/2)`.
    pub fn channel_mass(self, n: u32) -> f64 {
        (1.0 + self.c_n(n)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn flipped(self) -> Self {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    /// `+1` for up, `-1` for down.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "up",
            Spin::Down => "down",
        })
    }
}

impl std::str::FromStr for Spin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "up" | "+" => Ok(Spin::Up),
            "down" | "-" => Ok(Spin::Down),
            other => Err(format!("unknown spin `{other}` (expected up or down)")),
        }
    }
}

/// Incoming electron state, labelled by the shared index of its degenerate
/// pair: `Up` with index `n` is the state `(+, n-1)`, `Down` with index `n`
/// is `(-, n)`. Both members of the pair see the same `C_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IncomingState {
    spin: Spin,
    n: u32,
}

impl IncomingState {
    pub fn new(spin: Spin, n: u32) -> Result<Self, ChannelError> {
        if spin == Spin::Up && n == 0 {
            return Err(ChannelError::InvalidSpinIndex);
        }
        Ok(Self { spin, n })
    }

    pub fn spin(self) -> Spin {
        self.spin
    }

    /// Shared channel index `n`.
    pub fn n(self) -> u32 {
        self.n
    }

    /// The non-degenerate lowest state `(-, 0)`.
    pub fn is_lowest(self) -> bool {
        self.spin == Spin::Down && self.n == 0
    }

    /// Whether a spin-reversed partner exists at the same energy.
    pub fn has_flip_partner(self) -> bool {
        !self.is_lowest()
    }
}

/// Scattering regime, set by where the energy sits relative to the gap
/// `V0 ± M_n` inside the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `E < V0 - M_n`: propagation inside the step below the gap (Klein regime).
    CaseI,
    /// `E > V0 + M_n`: propagation above the step.
    CaseII,
    /// `V0 - M_n <= E <= V0 + M_n`: evanescent, total reflection.
    CaseIII,
}

impl Regime {
    /// Classify with explicit gap half-width `mass`. Boundaries go to `CaseIII`.
    pub fn classify(e: f64, v0: f64, mass: f64) -> Self {
        if e > v0 + mass {
            Regime::CaseII
        } else if v0 - mass > e {
            Regime::CaseI
        } else {
            Regime::CaseIII
        }
    }

    pub fn is_propagating(self) -> bool {
        !matches!(self, Regime::CaseIII)
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::CaseI => "I",
            Regime::CaseII => "II",
            Regime::CaseIII => "III",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One validated scattering problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    energy: f64,
    v0: f64,
    field: FieldStrength,
    state: IncomingState,
}

impl ChannelParams {
    pub fn new(
        energy: f64,
        v0: f64,
        field: FieldStrength,
        state: IncomingState,
    ) -> Result<Self, ChannelError> {
        if !energy.is_finite() {
            return Err(ChannelError::NonFinite("E"));
        }
        if !v0.is_finite() {
            return Err(ChannelError::NonFinite("V0"));
        }
        if v0 < 0.0 {
            return Err(ChannelError::NegativeStep(v0));
        }
        let threshold = 1.0 + field.c_n(state.n());
        let e_squared = energy * energy;
        if energy <= 0.0 || e_squared <= threshold {
            return Err(ChannelError::ClosedChannel {
                e_squared,
                threshold,
            });
        }
        Ok(Self {
            energy,
            v0,
            field,
            state,
        })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn field(&self) -> FieldStrength {
        self.field
    }

    pub fn state(&self) -> IncomingState {
        self.state
    }

    pub fn c_n(&self) -> f64 {
        self.field.c_n(self.state.n())
    }

    pub fn channel_mass(&self) -> f64 {
        self.field.channel_mass(self.state.n())
    }

    pub fn regime(&self) -> Regime {
        Regime::classify(self.energy, self.v0, self.channel_mass())
    }

    /// Same channel with a different step height.
    pub fn with_v0(&self, v0: f64) -> Result<Self, ChannelError> {
        Self::new(self.energy, v0, self.field, self.state)
    }

    /// Same problem for the other member of the degenerate pair.
    pub fn with_spin(&self, spin: Spin) -> Result<Self, ChannelError> {
        let state = IncomingState::new(spin, self.state.n())?;
        Self::new(self.energy, self.v0, self.field, state)
    }
}

/// Validate raw inputs into [`ChannelParams`].
pub fn make_channel(
    energy: f64,
    v0: f64,
    b: f64,
    spin: Spin,
    n: u32,
) -> Result<ChannelParams, ChannelError> {
    let field = FieldStrength::new(b)?;
    let state = IncomingState::new(spin, n)?;
    ChannelParams::new(energy, v0, field, state)
}
