//! Four-component spinor fields on a `(y, z)` grid.
//!
//! Every component factorises as `ψ_i(y, z) = a_i(z) Φ_{k_i}(ξ)` with
//! `ξ = (y − y₀)/L` and `k = (n−1, n, n−1, n)`, for both incoming spins. The
//! longitudinal coefficients `a_i(z)` come from [`mode_coefficients`].

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::landau::{eval_oscillator, OscillatorError};
use crate::quadrature::GaussHermite;
use crate::scattering::{component_level, piece_spinors, ScatterAmplitudes};
use crate::units::ChannelParams;

/// Largest number of grid points accepted by [`assemble_field`].
pub const MAX_GRID_POINTS: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("grid of {0} points exceeds the limit of {MAX_GRID_POINTS}")]
    GridTooLarge(usize),
    #[error("grid axis `{0}` is empty or has a non-finite step")]
    BadAxis(&'static str),
    #[error("no magnetic length at zero field; the transverse profile is undefined")]
    NoMagneticLength,
    #[error("transmitted normalisation diverges at E + 1 = V0")]
    SingularStep,
    #[error("amplitudes belong to a different incoming state")]
    MismatchedAmplitudes,
    #[error(transparent)]
    Oscillator(#[from] OscillatorError),
}

/// Uniformly spaced axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Axis {
    pub fn new(start: f64, step: f64, len: usize) -> Self {
        Self { start, step, len }
    }

    /// `len` points from `start` to `stop` inclusive.
    pub fn linspace(start: f64, stop: f64, len: usize) -> Self {
        let step = if len > 1 {
            (stop - start) / (len - 1) as f64
        } else {
            0.0
        };
        Self { start, step, len }
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.value(i))
    }

    fn check(&self, name: &'static str) -> Result<(), FieldError> {
        if self.len == 0 || !self.start.is_finite() || !self.step.is_finite() {
            return Err(FieldError::BadAxis(name));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub y: Axis,
    pub z: Axis,
}

impl Grid {
    /// `y ∈ y₀ ± 6L`, `z ∈ [−10λ, 10λ]` with `λ = 2π/p`, 512 × 512.
    pub fn default_for(params: &ChannelParams, guiding_center: f64) -> Self {
        let length = params.field().magnetic_length();
        let wavelength = 2.0 * std::f64::consts::PI / crate::landau::momentum_left(params);
        Self {
            y: Axis::linspace(
                guiding_center - 6.0 * length,
                guiding_center + 6.0 * length,
                512,
            ),
            z: Axis::linspace(-10.0 * wavelength, 10.0 * wavelength, 512),
        }
    }

    pub fn points(&self) -> usize {
        self.y.len.saturating_mul(self.z.len)
    }
}

/// Guiding centre `y₀ = k_x L²`.
pub fn guiding_center(params: &ChannelParams, kx: f64) -> f64 {
    kx / params.field().b()
}

/// `a_i(z)` such that `ψ_i = a_i(z) Φ_{k_i}(ξ)`; left pieces for `z < 0`,
/// transmitted pieces for `z ≥ 0`.
pub fn mode_coefficients(
    params: &ChannelParams,
    amps: &ScatterAmplitudes,
    z: f64,
) -> [Complex64; 4] {
    if z < 0.0 {
        left_coefficients(params, amps, z)
    } else {
        right_coefficients(params, amps, z)
    }
}

fn left_coefficients(params: &ChannelParams, amps: &ScatterAmplitudes, z: f64) -> [Complex64; 4] {
    let sp = piece_spinors(params);
    let fwd = Complex64::new(0.0, sp.p * z).exp();
    let back = fwd.conj();
    std::array::from_fn(|i| {
        sp.left_norm
            * (sp.incident[i] * fwd
                + (amps.r * sp.reflected[i] + amps.r_flip * sp.reflected_flip[i]) * back)
    })
}

fn right_coefficients(params: &ChannelParams, amps: &ScatterAmplitudes, z: f64) -> [Complex64; 4] {
    let sp = piece_spinors(params);
    let phase = (Complex64::i() * sp.q * z).exp();
    let (norm, t, t_flip) = if sp.right_norm.is_finite() {
        (sp.right_norm, amps.t, amps.t_flip)
    } else {
        // E = V0: the normalisation diverges while T and T′ vanish
        let ratio = sp.e_cal_ratio;
        (sp.left_norm, (amps.r + 1.0) * ratio, amps.r_flip * ratio)
    };
    std::array::from_fn(|i| {
        norm * (t * sp.transmitted[i] + t_flip * sp.transmitted_flip[i]) * phase
    })
}

/// `j_z = ψ†α_zψ = 2 Re(ψ₁*ψ₃ − ψ₂*ψ₄)` for one spinor (c = 1).
pub fn current_density(psi: &[Complex64; 4]) -> f64 {
    2.0 * (psi[0].conj() * psi[2] - psi[1].conj() * psi[3]).re
}

fn level_present(n: u32, i: usize) -> bool {
    component_level(n, i) >= 0
}

/// Current through a transverse plane at `z`, integrated over `ξ`, using the
/// orthonormality of the oscillator functions. Divided by the incident
/// current `p/E` it is the transmitted fraction (right side) or one minus
/// the reflected fraction (left side).
pub fn analytic_current(params: &ChannelParams, amps: &ScatterAmplitudes, z: f64) -> f64 {
    let mut a = mode_coefficients(params, amps, z);
    for (i, ai) in a.iter_mut().enumerate() {
        if !level_present(params.state().n(), i) {
            *ai = Complex64::new(0.0, 0.0);
        }
    }
    current_density(&a)
}

/// Same integral by Gauss–Hermite quadrature over the reconstructed field.
pub fn quadrature_current(
    params: &ChannelParams,
    amps: &ScatterAmplitudes,
    z: f64,
    rule: &GaussHermite,
) -> Result<f64, FieldError> {
    let a = mode_coefficients(params, amps, z);
    let n = params.state().n();
    let mut total = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let psi = spinor_at(&a, n, x)?;
        total += w * (x * x).exp() * current_density(&psi);
    }
    Ok(total)
}

/// Incident current `p/E`.
pub fn incident_current(params: &ChannelParams) -> f64 {
    crate::landau::momentum_left(params) / params.energy()
}

fn spinor_at(a: &[Complex64; 4], n: u32, xi: f64) -> Result<[Complex64; 4], OscillatorError> {
    let lower = eval_oscillator(i64::from(n) - 1, xi)?;
    let upper = eval_oscillator(i64::from(n), xi)?;
    Ok([a[0] * lower, a[1] * upper, a[2] * lower, a[3] * upper])
}

/// Sampled spinor field with the data it was built from.
#[derive(Debug, Clone)]
pub struct SpinorField {
    pub grid: Grid,
    pub guiding_center: f64,
    pub params: ChannelParams,
    pub amplitudes: ScatterAmplitudes,
    /// Row-major, `values[iy * nz + iz]`.
    pub values: Vec<[Complex64; 4]>,
    /// Left-side expression evaluated at `z = 0`, one entry per `y`.
    pub boundary_left: Vec<[Complex64; 4]>,
    /// Transmitted expression evaluated at `z = 0`, one entry per `y`.
    pub boundary_right: Vec<[Complex64; 4]>,
}

impl SpinorField {
    pub fn at(&self, iy: usize, iz: usize) -> &[Complex64; 4] {
        &self.values[iy * self.grid.z.len + iz]
    }

    /// `ρ = Σ|ψ_i|²` in the same layout as `values`.
    pub fn density(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|psi| psi.iter().map(|c| c.norm_sqr()).sum())
            .collect()
    }

    pub fn current(&self) -> Vec<f64> {
        self.values.iter().map(current_density).collect()
    }

    /// Density along `z` at the grid row closest to `y`.
    pub fn density_slice(&self, y: f64) -> Vec<(f64, f64)> {
        let iy = self.nearest_row(y);
        (0..self.grid.z.len)
            .map(|iz| {
                let rho = self.at(iy, iz).iter().map(|c| c.norm_sqr()).sum();
                (self.grid.z.value(iz), rho)
            })
            .collect()
    }

    pub fn nearest_row(&self, y: f64) -> usize {
        let ax = &self.grid.y;
        if ax.len == 1 || ax.step == 0.0 {
            return 0;
        }
        let i = ((y - ax.start) / ax.step).round();
        i.clamp(0.0, (ax.len - 1) as f64) as usize
    }
}

/// One grid row plus the left and right boundary values at that `y`.
type RowSamples = (Vec<[Complex64; 4]>, [Complex64; 4], [Complex64; 4]);

/// Assemble the incident, reflected and transmitted pieces on `grid`.
pub fn assemble_field(
    params: &ChannelParams,
    amps: &ScatterAmplitudes,
    grid: &Grid,
    guiding_center: f64,
) -> Result<SpinorField, FieldError> {
    if amps.state != params.state() {
        return Err(FieldError::MismatchedAmplitudes);
    }
    grid.y.check("y")?;
    grid.z.check("z")?;
    let points = grid.points();
    if points > MAX_GRID_POINTS {
        return Err(FieldError::GridTooLarge(points));
    }
    let b = params.field().b();
    if b == 0.0 {
        return Err(FieldError::NoMagneticLength);
    }
    let sp = piece_spinors(params);
    if !sp.right_norm.is_finite() && !sp.e_cal_ratio.is_finite() {
        return Err(FieldError::SingularStep);
    }
    let length = params.field().magnetic_length();
    let n = params.state().n();

    let columns: Vec<[Complex64; 4]> = grid
        .z
        .values()
        .map(|z| mode_coefficients(params, amps, z))
        .collect();
    let at_left = left_coefficients(params, amps, 0.0);
    let at_right = right_coefficients(params, amps, 0.0);

    let rows: Vec<RowSamples> = (0..grid.y.len)
        .into_par_iter()
        .map(|iy| {
            let xi = (grid.y.value(iy) - guiding_center) / length;
            let row = columns
                .iter()
                .map(|a| spinor_at(a, n, xi))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((
                row,
                spinor_at(&at_left, n, xi)?,
                spinor_at(&at_right, n, xi)?,
            ))
        })
        .collect::<Result<_, OscillatorError>>()?;

    let mut values = Vec::with_capacity(points);
    let mut boundary_left = Vec::with_capacity(grid.y.len);
    let mut boundary_right = Vec::with_capacity(grid.y.len);
    for (row, l, r) in rows {
        values.extend(row);
        boundary_left.push(l);
        boundary_right.push(r);
    }
    Ok(SpinorField {
        grid: *grid,
        guiding_center,
        params: *params,
        amplitudes: *amps,
        values,
        boundary_left,
        boundary_right,
    })
}

/// `max |ψ(0⁻) − ψ(0⁺)|` over `y` and components, divided by the largest
/// component magnitude on the boundary.
pub fn continuity_residual(field: &SpinorField) -> f64 {
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (l, r) in field.boundary_left.iter().zip(&field.boundary_right) {
        for i in 0..4 {
            let d = (l[i] - r[i]).norm();
            if d.is_nan() {
                return f64::INFINITY;
            }
            worst = worst.max(d);
            scale = scale.max(l[i].norm()).max(r[i].norm());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Least-squares `|q|` from the decay `ρ ∝ exp(−2|q|z)` of the density
/// along row `iy` for `z > 0`. `None` if fewer than two usable samples.
pub fn fit_decay_rate(field: &SpinorField, iy: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = (0..field.grid.z.len)
        .filter_map(|iz| {
            let z = field.grid.z.value(iz);
            let rho: f64 = field.at(iy, iz).iter().map(|c| c.norm_sqr()).sum();
            (z > 0.0 && rho > f64::MIN_POSITIVE).then(|| (z, rho.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    if sxx == 0.0 {
        return None;
    }
    Some(-0.5 * sxy / sxx)
}
