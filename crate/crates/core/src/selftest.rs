//! Invariant suite run by `kleinb selftest`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::sampling::sample_points;
use crate::scattering::{
    amplitudes, current_budget, general_amplitudes, h0_amplitudes, solve_boundary_system,
};
use crate::units::{make_channel, ChannelParams, Regime, Spin};

pub const UNITARITY_TOL: f64 = 1e-12;
pub const ORACLE_TOL: f64 = 1e-12;
pub const TOTAL_REFLECTION_TOL: f64 = 1e-14;
pub const SPIN_SYMMETRY_TOL: f64 = 1e-14;
pub const SLOPE_TOL: f64 = 0.01;

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

/// Component-wise amplitude mismatch, relative to `max(1, |b|)`.
pub fn amplitude_mismatch(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / y.norm().max(1.0))
        .fold(0.0, f64::max)
}

pub fn check_unitarity(points: &[ChannelParams]) -> CheckOutcome {
    let worst = points
        .par_iter()
        .map(|p| {
            current_budget(p)
                .map(|b| (b.sum() - 1.0).abs())
                .map_err(|e| format!("{p:?}: {e}"))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)));
    match worst {
        Ok(worst) => CheckOutcome::new(
            "unitarity",
            worst < UNITARITY_TOL,
            format!("{} points, max |sum - 1| = {worst:.3e}", points.len()),
        ),
        Err(e) => CheckOutcome::new("unitarity", false, e),
    }
}

pub fn check_oracle(points: &[ChannelParams]) -> CheckOutcome {
    let result: Result<f64, String> = points
        .par_iter()
        .map(|p| {
            let oracle = solve_boundary_system(p).map_err(|e| format!("{p:?}: {e}"))?;
            let closed = amplitudes(p).map_err(|e| format!("{p:?}: {e}"))?;
            Ok(amplitude_mismatch(&closed.as_array(), &oracle.as_array()))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)));
    match result {
        Ok(worst) => CheckOutcome::new(
            "oracle-equivalence",
            worst < ORACLE_TOL,
            format!("{} points, max mismatch = {worst:.3e}", points.len()),
        ),
        Err(e) => CheckOutcome::new("oracle-equivalence", false, e),
    }
}

pub fn check_field_free(points: &[ChannelParams]) -> CheckOutcome {
    let zero = Complex64::new(0.0, 0.0);
    let mut worst_general: f64 = 0.0;
    let mut worst_reflection: f64 = 0.0;
    let mut flips = 0usize;
    let mut evanescent = 0usize;
    for p in points {
        let Ok(free) = make_channel(p.energy(), p.v0(), 0.0, p.state().spin(), p.state().n())
        else {
            continue;
        };
        let (a, h, g) = match (
            amplitudes(&free),
            h0_amplitudes(free.energy(), free.v0()),
            general_amplitudes(&free),
        ) {
            (Ok(a), Ok(h), Ok(g)) => (a, h, g),
            _ => return CheckOutcome::new("field-free", false, format!("{free:?} failed")),
        };
        if a.r_flip != zero || a.t_flip != zero || a.as_array() != h.as_array() {
            flips += 1;
        }
        worst_general = worst_general.max(amplitude_mismatch(&h.as_array(), &g.as_array()));
        if free.regime() == Regime::CaseIII {
            evanescent += 1;
            worst_reflection = worst_reflection.max((a.r.norm_sqr() - 1.0).abs());
        }
    }
    CheckOutcome::new(
        "field-free",
        flips == 0 && worst_general < ORACLE_TOL && worst_reflection < TOTAL_REFLECTION_TOL,
        format!(
            "{flips} nonzero flips; field-free vs general max {worst_general:.3e}; \
             {evanescent} evanescent points, max ||R|^2 - 1| = {worst_reflection:.3e}"
        ),
    )
}

/// Log-log slope of `|R′|` against `b` between two small fields.
pub fn flip_slope(energy: f64, v0: f64, n: u32, b_hi: f64, b_lo: f64) -> Option<f64> {
    let hi = make_channel(energy, v0, b_hi, Spin::Up, n).ok()?;
    let lo = make_channel(energy, v0, b_lo, Spin::Up, n).ok()?;
    let (rh, rl) = (
        amplitudes(&hi).ok()?.r_flip.norm(),
        amplitudes(&lo).ok()?.r_flip.norm(),
    );
    Some((rh.ln() - rl.ln()) / (b_hi.ln() - b_lo.ln()))
}

pub fn check_no_flip(points: &[ChannelParams]) -> CheckOutcome {
    let zero = Complex64::new(0.0, 0.0);
    let mut flips = 0usize;
    let mut tested = 0usize;
    for p in points {
        let Ok(lowest) = make_channel(p.energy(), p.v0(), p.field().b(), Spin::Down, 0) else {
            continue;
        };
        tested += 1;
        let Ok(a) = amplitudes(&lowest) else {
            flips += 1;
            continue;
        };
        if a.r_flip != zero || a.t_flip != zero {
            flips += 1;
        }
    }
    let slopes: Vec<f64> = [(2.0, 6.0, 1), (3.0, 1.0, 2), (2.0, 2.5, 3), (1.5, 40.0, 5)]
        .iter()
        .filter_map(|&(e, v0, n)| flip_slope(e, v0, n, 1e-6, 1e-8))
        .collect();
    let worst_slope = slopes.iter().map(|s| (s - 0.5).abs()).fold(0.0, f64::max);
    CheckOutcome::new(
        "no-flip",
        flips == 0 && slopes.len() == 4 && worst_slope <= SLOPE_TOL,
        format!("{tested} lowest-state points, {flips} with flips; slopes {slopes:.6?}"),
    )
}

pub fn check_spin_symmetry(points: &[ChannelParams]) -> CheckOutcome {
    let mut worst: f64 = 0.0;
    let mut sign_errors = 0usize;
    let mut tested = 0usize;
    for p in points.iter().filter(|p| p.state().n() >= 1) {
        let up = p.with_spin(Spin::Up).expect("n >= 1");
        let down = p.with_spin(Spin::Down).expect("n >= 1");
        tested += 1;
        let (Ok(bu), Ok(bd), Ok(au), Ok(ad)) = (
            current_budget(&up),
            current_budget(&down),
            amplitudes(&up),
            amplitudes(&down),
        ) else {
            sign_errors += 1;
            continue;
        };
        for (x, y) in bu.as_array().iter().zip(bd.as_array()) {
            worst = worst.max((x - y).abs());
        }
        if au.r_flip != -ad.r_flip || au.t_flip != -ad.t_flip || au.r != ad.r || au.t != ad.t {
            sign_errors += 1;
        }
    }
    CheckOutcome::new(
        "spin-symmetry",
        worst < SPIN_SYMMETRY_TOL && sign_errors == 0,
        format!("{tested} pairs, max budget difference {worst:.3e}, {sign_errors} sign errors"),
    )
}

/// Runs the full suite on `count` seeded points.
pub fn run(seed: u64, count: usize) -> Vec<CheckOutcome> {
    let points = sample_points(seed, count);
    vec![
        check_unitarity(&points),
        check_oracle(&points),
        check_field_free(&points),
        check_no_flip(&points),
        check_spin_symmetry(&points),
    ]
}
