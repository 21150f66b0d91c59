//! Reflection and transmission at the potential step.
//!
//! For an incoming state of channel `n` the outgoing waves are the
//! spin-conserving pair `R`, `T` and the spin-reversed pair `R′`, `T′`. The
//! closed forms below are written in terms of the kinematic factor
//! `κ = q·ℰ/(p·ℰ̄)` with `ℰ = E + 1`, `ℰ̄ = E + 1 − V0`, and
//!
//! ```text
//! D  = p²ℰ̄²(1+κ)² + C_n V0²
//! R  = [p²ℰ̄²(1−κ)(1+κ) − C_n V0²] / D
//! R′ = 2 p ℰ̄ C_n^{1/2} V0 / D
//! T  = N · 2 p² ℰ ℰ̄ (1+κ) / D
//! T′ = N · 2 p ℰ C_n^{1/2} V0 / D,      N = |ℰ̄ Ē|^{1/2} / (ℰ E)^{1/2}
//! ```
//!
//! For a spin-down incoming electron `R′` and `T′` change sign. Complex `q`
//! and `κ` are used in every regime so the evanescent case needs no separate
//! algebra.
//!
//! They are evaluated through `D = 2ℰℰ̄·G` with `G = Eℰ̄ + pq − ℰ − C_n`:
//!
//! ```text
//! R  = (ℰ + C_n) V0 / (ℰ G)
//! R′ = p C_n^{1/2} V0 / (ℰ G)
//! T  = N p (pℰ̄ + qℰ) / (ℰ̄ G)
//! T′ = N p C_n^{1/2} V0 / (ℰ̄ G)
//! ```

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::landau::{momentum_left, momentum_right};
use crate::units::{
    make_channel, ChannelError, ChannelParams, FieldStrength, IncomingState, Regime, Spin,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatterError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("kinematic factor diverges: E + 1 − V0 = {e_cal_bar:e} is numerically zero")]
    SingularStep { e_cal_bar: f64 },
    #[error("boundary-condition matrix is singular")]
    SingularMatrix,
}

/// Relative width of the `ℰ̄ → 0` window in which `κ` is treated as singular.
pub fn singular_step_width(v0: f64) -> f64 {
    1e-12 * (1.0 + v0)
}

/// Everything the amplitude formulas need, in natural units.
#[derive(Debug, Clone, Copy)]
struct StepKinematics {
    energy: f64,
    v0: f64,
    p: f64,
    q: Complex64,
    c_n: f64,
    /// `ℰ = E + 1`
    e_cal: f64,
    /// `ℰ̄ = E + 1 − V0`
    e_cal_bar: f64,
    /// `Ē = E − V0`
    e_bar: f64,
}

impl StepKinematics {
    fn new(params: &ChannelParams) -> Self {
        let energy = params.energy();
        let v0 = params.v0();
        Self {
            energy,
            v0,
            p: momentum_left(params),
            q: momentum_right(params),
            c_n: params.c_n(),
            e_cal: energy + 1.0,
            e_cal_bar: (energy - v0) + 1.0,
            e_bar: energy - v0,
        }
    }

    fn near_singular(&self) -> bool {
        self.e_cal_bar.abs() < singular_step_width(self.v0)
    }

    fn kappa(&self) -> Complex64 {
        self.q * self.e_cal / (self.p * self.e_cal_bar)
    }

    /// `|ℰ̄ Ē|^{1/2} / (ℰ E)^{1/2}`, the ratio of left to right spinor norms.
    fn transmission_prefactor(&self) -> f64 {
        (self.e_cal_bar * self.e_bar).abs().sqrt() / (self.e_cal * self.energy).sqrt()
    }
}

/// The kinematic factor together with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinematicFactor {
    pub kappa: Complex64,
    pub p: f64,
    pub q: Complex64,
    pub e_cal: f64,
    pub e_cal_bar: f64,
}

/// `κ = q·ℰ/(p·ℰ̄)`.
pub fn kinematic_factor(params: &ChannelParams) -> Result<KinematicFactor, ScatterError> {
    let k = StepKinematics::new(params);
    if k.near_singular() {
        return Err(ScatterError::SingularStep {
            e_cal_bar: k.e_cal_bar,
        });
    }
    Ok(KinematicFactor {
        kappa: k.kappa(),
        p: k.p,
        q: k.q,
        e_cal: k.e_cal,
        e_cal_bar: k.e_cal_bar,
    })
}

/// Complex reflection and transmission amplitudes for one incoming state.
///
/// `t` and `t_flip` are the coefficients of the transmitted spinors with
/// their own normalisation `1/(2|ℰ̄ Ē|)^{1/2}`, so `|t|²` is not a current
/// fraction; see [`current_budget`] for that.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatterAmplitudes {
    pub r: Complex64,
    pub r_flip: Complex64,
    pub t: Complex64,
    pub t_flip: Complex64,
    pub regime: Regime,
    pub state: IncomingState,
}

impl ScatterAmplitudes {
    /// `(|T|², |T′|²)`, the quantities whose `V0 → ∞` limit is [`klein_limit`].
    pub fn transmitted_probabilities(&self) -> (f64, f64) {
        (self.t.norm_sqr(), self.t_flip.norm_sqr())
    }

    pub fn as_array(&self) -> [Complex64; 4] {
        [self.r, self.r_flip, self.t, self.t_flip]
    }

    fn spin_adjusted(mut self) -> Self {
        if self.state.spin() == Spin::Down {
            self.r_flip = -self.r_flip;
            self.t_flip = -self.t_flip;
        }
        self
    }
}

/// Closed-form amplitudes. Channels with `C_n = 0` (no field, or the lowest
/// state `(-, 0)`) take the field-free path with `R′ = T′ = 0` exactly.
///
/// With `C_n > 0` and `ℰ̄ → 0` the two transmitted spinors become parallel
/// (the step sits inside the gap there), so `T` and `T′` diverge separately
/// while the field they build stays finite. That window is reported as
/// [`ScatterError::SingularStep`].
pub fn amplitudes(params: &ChannelParams) -> Result<ScatterAmplitudes, ScatterError> {
    let k = StepKinematics::new(params);
    if k.c_n == 0.0 {
        return Ok(field_free(&k, params.regime(), params.state()));
    }
    general_from(&k, params)
}

/// The general magnetic-field formulas, evaluated even when `C_n = 0`.
///
/// [`amplitudes`] is the entry point; this one exists to compare the
/// general expressions against their field-free reduction.
pub fn general_amplitudes(params: &ChannelParams) -> Result<ScatterAmplitudes, ScatterError> {
    general_from(&StepKinematics::new(params), params)
}

fn general_from(
    k: &StepKinematics,
    params: &ChannelParams,
) -> Result<ScatterAmplitudes, ScatterError> {
    if k.near_singular() {
        return Err(ScatterError::SingularStep {
            e_cal_bar: k.e_cal_bar,
        });
    }
    let [r, r_flip, t, t_flip] = spin_up_closed_form(k);
    Ok(ScatterAmplitudes {
        r,
        r_flip,
        t,
        t_flip,
        regime: params.regime(),
        state: params.state(),
    }
    .spin_adjusted())
}

fn spin_up_closed_form(k: &StepKinematics) -> [Complex64; 4] {
    // P²ℰ̄²(1+κ)² + C V0² = 2ℰℰ̄·G
    let s = k.c_n.sqrt();
    let g = k.energy * k.e_cal_bar + k.p * k.q - k.e_cal - k.c_n;
    let reflect = Complex64::from(k.v0 / k.e_cal) / g;
    let transmit = Complex64::from(k.transmission_prefactor() * k.p / k.e_cal_bar) / g;
    [
        (k.e_cal + k.c_n) * reflect,
        k.p * s * reflect,
        transmit * (k.p * k.e_cal_bar + k.q * k.e_cal),
        transmit * s * k.v0,
    ]
}

fn field_free(k: &StepKinematics, regime: Regime, state: IncomingState) -> ScatterAmplitudes {
    let one = Complex64::new(1.0, 0.0);
    let pref = k.transmission_prefactor();
    let (r, t) = if k.e_cal_bar == 0.0 {
        // limit from inside the gap: q ≈ i(2ℰ̄)^{1/2}
        (
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -(2.0f64.sqrt()) * k.p / (k.e_cal * k.energy).sqrt()),
        )
    } else if k.near_singular() {
        // κ diverges; keep ℰ̄ in the numerators
        let pe = k.p * k.e_cal_bar;
        let qe = k.q * k.e_cal;
        (
            (pe - qe) / (pe + qe),
            pref * 2.0 * k.p * k.e_cal / (pe + qe),
        )
    } else {
        let kappa = k.kappa();
        (
            (one - kappa) / (one + kappa),
            pref * 2.0 * k.e_cal / (k.e_cal_bar * (one + kappa)),
        )
    };
    ScatterAmplitudes {
        r,
        r_flip: Complex64::new(0.0, 0.0),
        t,
        t_flip: Complex64::new(0.0, 0.0),
        regime,
        state,
    }
}

/// Field-free amplitudes `R = (1−κ)/(1+κ)`, `T = N·2ℰ/(ℰ̄(1+κ))`.
pub fn h0_amplitudes(energy: f64, v0: f64) -> Result<ScatterAmplitudes, ChannelError> {
    let params = make_channel(energy, v0, 0.0, Spin::Down, 0)?;
    let k = StepKinematics::new(&params);
    Ok(field_free(&k, params.regime(), params.state()))
}

/// Spinor coefficients of one plane-wave piece at `z = 0`, component by
/// component. Component `i` multiplies `Φ_{n-1}` for `i ∈ {0, 2}` and
/// `Φ_n` for `i ∈ {1, 3}`, for both incoming spins.
pub(crate) struct PieceSpinors {
    pub incident: [Complex64; 4],
    pub reflected: [Complex64; 4],
    pub reflected_flip: [Complex64; 4],
    pub transmitted: [Complex64; 4],
    pub transmitted_flip: [Complex64; 4],
    /// `1/(2ℰE)^{1/2}`
    pub left_norm: f64,
    /// `1/(2|ℰ̄Ē|)^{1/2}`, infinite at `E = V0` where `T = T′ = 0`.
    pub right_norm: f64,
    /// `ℰ/ℰ̄`, so that `N_R T = N_L (ℰ/ℰ̄)(1 + R)` and `N_R T′ = N_L (ℰ/ℰ̄) R′`.
    pub e_cal_ratio: f64,
    pub p: f64,
    pub q: Complex64,
}

pub(crate) fn piece_spinors(params: &ChannelParams) -> PieceSpinors {
    let k = StepKinematics::new(params);
    let c = |x: f64| Complex64::new(x, 0.0);
    let zero = c(0.0);
    let (ec, ebc, p, q, s) = (c(k.e_cal), c(k.e_cal_bar), c(k.p), k.q, c(k.c_n.sqrt()));
    // (+) spin-up spinor with momentum m: (ℰ, 0, m, s); (-) spin-down: (0, ℰ, s, -m)
    let up = |e: Complex64, m: Complex64| [e, zero, m, s];
    let down = |e: Complex64, m: Complex64| [zero, e, s, -m];
    let (incident, reflected, reflected_flip, transmitted, transmitted_flip) =
        match params.state().spin() {
            Spin::Up => (
                up(ec, p),
                up(ec, -p),
                down(ec, -p),
                up(ebc, q),
                down(ebc, q),
            ),
            Spin::Down => (
                down(ec, p),
                down(ec, -p),
                up(ec, -p),
                down(ebc, q),
                up(ebc, q),
            ),
        };
    PieceSpinors {
        incident,
        reflected,
        reflected_flip,
        transmitted,
        transmitted_flip,
        left_norm: (2.0 * k.e_cal * k.energy).sqrt().recip(),
        right_norm: (2.0 * (k.e_cal_bar * k.e_bar).abs()).sqrt().recip(),
        e_cal_ratio: k.e_cal / k.e_cal_bar,
        p: k.p,
        q: k.q,
    }
}

/// Oscillator index multiplying spinor component `i` in channel `n`.
pub(crate) fn component_level(n: u32, i: usize) -> i64 {
    match i {
        0 | 2 => i64::from(n) - 1,
        _ => i64::from(n),
    }
}

/// Amplitudes from a direct solve of the four continuity conditions at
/// `z = 0`, built from the spinors of each outgoing piece.
///
/// Rows whose oscillator factor is `Φ_{-1} ≡ 0` are identities and are
/// dropped, together with the spin-reversed unknowns when the incoming state
/// is `(-, 0)` and has no partner.
pub fn solve_boundary_system(params: &ChannelParams) -> Result<ScatterAmplitudes, ScatterError> {
    let sp = piece_spinors(params);
    let state = params.state();
    let with_flip = state.has_flip_partner();
    let rows: Vec<usize> = (0..4)
        .filter(|&i| component_level(state.n(), i) >= 0)
        .collect();
    let nl = Complex64::from(sp.left_norm);
    let nr = Complex64::from(sp.right_norm);
    // unknowns: R, T, then R', T'
    let mut columns: Vec<(f64, &[Complex64; 4], Complex64)> =
        vec![(1.0, &sp.reflected, nl), (-1.0, &sp.transmitted, nr)];
    if with_flip {
        columns.push((1.0, &sp.reflected_flip, nl));
        columns.push((-1.0, &sp.transmitted_flip, nr));
    }
    let dim = columns.len();
    if rows.len() != dim {
        return Err(ScatterError::SingularMatrix);
    }
    let a = DMatrix::from_fn(dim, dim, |row, col| {
        let (sign, spinor, norm) = columns[col];
        norm * spinor[rows[row]] * sign
    });
    let b = DVector::from_fn(dim, |row, _| -nl * sp.incident[rows[row]]);
    let x = a.lu().solve(&b).ok_or(ScatterError::SingularMatrix)?;
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(ScatterError::SingularMatrix);
    }
    let zero = Complex64::new(0.0, 0.0);
    Ok(ScatterAmplitudes {
        r: x[0],
        t: x[1],
        r_flip: if with_flip { x[2] } else { zero },
        t_flip: if with_flip { x[3] } else { zero },
        regime: params.regime(),
        state,
    })
}

/// Outgoing current fractions, each normalised to the incident current.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurrentBudget {
    pub refl_same: f64,
    pub refl_flip: f64,
    pub trans_same: f64,
    pub trans_flip: f64,
}

impl CurrentBudget {
    pub fn sum(&self) -> f64 {
        self.refl_same + self.refl_flip + self.trans_same + self.trans_flip
    }

    pub fn reflected(&self) -> f64 {
        self.refl_same + self.refl_flip
    }

    pub fn transmitted(&self) -> f64 {
        self.trans_same + self.trans_flip
    }

    pub fn as_array(&self) -> [f64; 4] {
        [
            self.refl_same,
            self.refl_flip,
            self.trans_same,
            self.trans_flip,
        ]
    }
}

/// Reflected fractions `|R|²`, `|R′|²`; transmitted fractions `κ|1+R|²` and
/// `κ|R′|²` where the transmitted waves propagate, zero when they decay.
pub fn current_budget(params: &ChannelParams) -> Result<CurrentBudget, ScatterError> {
    Ok(budget_from(params, &amplitudes(params)?))
}

/// Budget for given amplitudes; the transmitted weights use `κ` of `params`.
pub fn budget_from(params: &ChannelParams, amps: &ScatterAmplitudes) -> CurrentBudget {
    let refl_same = amps.r.norm_sqr();
    let refl_flip = amps.r_flip.norm_sqr();
    let (trans_same, trans_flip) = if params.regime().is_propagating() {
        let kappa = StepKinematics::new(params).kappa().re;
        let one = Complex64::new(1.0, 0.0);
        (kappa * (one + amps.r).norm_sqr(), kappa * refl_flip)
    } else {
        (0.0, 0.0)
    };
    CurrentBudget {
        refl_same,
        refl_flip,
        trans_same,
        trans_flip,
    }
}

/// Transmitted `|T|²` and `|T′|²` for an infinitely high step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KleinLimit {
    pub t_same: f64,
    pub t_flip: f64,
}

/// `V0 → ∞` limits of `|T|²`, `|T′|²`; identical for both members of a pair.
pub fn klein_limit(
    state: IncomingState,
    energy: f64,
    field: FieldStrength,
) -> Result<KleinLimit, ChannelError> {
    let params = ChannelParams::new(energy, 0.0, field, state)?;
    let p = momentum_left(&params);
    let c_n = params.c_n();
    let e_cal = energy + 1.0;
    let a = p + e_cal;
    let denom = energy * (a * a + c_n).powi(2);
    Ok(KleinLimit {
        t_same: e_cal * 4.0 * p * p * a * a / denom,
        t_flip: e_cal * 4.0 * p * p * c_n / denom,
    })
}
