//! Acceptance criteria, one line each. Runs without the libtest harness so
//! every line is printed even when all criteria pass.

use std::process::Command;
use std::time::{Duration, Instant};

use kleinb::filter::{arrival_delay, first_order_delay, FilterSetup, ANOMALOUS_G};
use kleinb::quadrature::GaussHermite;
use kleinb::sampling::{sample_points, seed_from_env};
use kleinb::selftest;
use kleinb::wavefield::{
    assemble_field, continuity_residual, fit_decay_rate, incident_current, quadrature_current,
    Axis, Grid,
};
use kleinb::{
    amplitudes, current_budget, eval_oscillator, klein_limit, make_channel, ChannelParams,
    FieldStrength, IncomingState, Regime, Spin,
};
use num_complex::Complex64;
use serde_json::Value;

const RANDOM_POINTS: usize = 10_000;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn points() -> Vec<ChannelParams> {
    sample_points(seed_from_env(), RANDOM_POINTS)
}

fn coverage(points: &[ChannelParams]) -> Result<(), String> {
    for regime in [Regime::CaseI, Regime::CaseII, Regime::CaseIII] {
        if !points.iter().any(|p| p.regime() == regime) {
            return Err(format!("no {regime:?} points"));
        }
    }
    for spin in [Spin::Up, Spin::Down] {
        if !points.iter().any(|p| p.state().spin() == spin) {
            return Err(format!("no {spin} points"));
        }
    }
    let n_max = points.iter().map(|p| p.state().n()).max().unwrap_or(0);
    let b_max = points.iter().map(|p| p.field().b()).fold(0.0, f64::max);
    if n_max < 15 || b_max < 0.9 {
        return Err(format!(
            "parameter range too narrow: n <= {n_max}, b <= {b_max}"
        ));
    }
    Ok(())
}

fn unitarity() -> Verdict {
    let started = Instant::now();
    let pts = points();
    if let Err(e) = coverage(&pts) {
        return verdict(false, e);
    }
    let mut worst: f64 = 0.0;
    for p in &pts {
        match current_budget(p) {
            Ok(b) => worst = worst.max((b.sum() - 1.0).abs()),
            Err(e) => return verdict(false, format!("{p:?}: {e}")),
        }
    }
    let elapsed = started.elapsed();
    verdict(
        worst < 1e-12 && elapsed < Duration::from_secs(10),
        format!(
            "{} points, max |sum - 1| = {worst:.2e}, {:.2} s",
            pts.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn oracle_equivalence() -> Verdict {
    let o = selftest::check_oracle(&points());
    verdict(o.passed, o.detail)
}

/// Field-free reflection written out from scratch: `R = (pℰ̄ − qℰ)/(pℰ̄ + qℰ)`.
fn reference_field_free_r(e: f64, v0: f64) -> Complex64 {
    let p = (e * e - 1.0).sqrt();
    let e_bar = e - v0;
    let q_sq = e_bar * e_bar - 1.0;
    let q = if e > v0 + 1.0 {
        Complex64::new(q_sq.sqrt(), 0.0)
    } else if e < v0 - 1.0 {
        Complex64::new(-q_sq.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-q_sq).sqrt())
    };
    let pe = Complex64::from(p * (e + 1.0 - v0));
    let qe = q * (e + 1.0);
    (pe - qe) / (pe + qe)
}

fn field_free() -> Verdict {
    let pts = points();
    let o = selftest::check_field_free(&pts);
    let mut worst_r: f64 = 0.0;
    for p in &pts {
        let Ok(free) = make_channel(p.energy(), p.v0(), 0.0, p.state().spin(), p.state().n())
        else {
            continue;
        };
        let Ok(a) = amplitudes(&free) else {
            return verdict(false, format!("{free:?} failed"));
        };
        let want = reference_field_free_r(free.energy(), free.v0());
        worst_r = worst_r.max((a.r - want).norm() / want.norm().max(1.0));
    }
    verdict(
        o.passed && worst_r < 1e-12,
        format!("{}; R vs field-free formula {worst_r:.2e}", o.detail),
    )
}

fn klein() -> Verdict {
    let mut worst: f64 = 0.0;
    for (e, b, spin, n) in [
        (2.0, 0.2, Spin::Up, 1),
        (1.5, 0.05, Spin::Down, 3),
        (3.0, 0.5, Spin::Up, 2),
        (1.2, 0.0, Spin::Down, 0),
        (5.0, 1.0, Spin::Down, 7),
    ] {
        let state = IncomingState::new(spin, n).unwrap();
        let limit = klein_limit(state, e, FieldStrength::new(b).unwrap()).unwrap();
        let p = make_channel(e, 1e4, b, spin, n).unwrap();
        let (t, tf) = amplitudes(&p).unwrap().transmitted_probabilities();
        worst = worst.max(((t - limit.t_same) / limit.t_same).abs());
        if limit.t_flip > 0.0 {
            worst = worst.max(((tf - limit.t_flip) / limit.t_flip).abs());
        }
    }
    let anchor = klein_limit(
        IncomingState::new(Spin::Down, 0).unwrap(),
        2f64.sqrt(),
        FieldStrength::zero(),
    )
    .unwrap();
    let want = 2.0 / (2.0 + 2f64.sqrt());
    let anchor_err = (anchor.t_same - want).abs();
    verdict(
        worst < 1e-3 && anchor_err < 1e-12,
        format!("V0 = 1e4 relative gap {worst:.2e}; b = 0, E = √2 gives {:.12} (error {anchor_err:.1e})", anchor.t_same),
    )
}

fn no_flip() -> Verdict {
    let o = selftest::check_no_flip(&points());
    verdict(o.passed, o.detail)
}

fn spin_symmetry() -> Verdict {
    let o = selftest::check_spin_symmetry(&points());
    verdict(o.passed, o.detail)
}

fn field_grid(p: &ChannelParams) -> Grid {
    let length = p.field().magnetic_length();
    let q = kleinb::momentum_right(p);
    let decay = if p.regime() == Regime::CaseIII {
        q.im.max(1e-3)
    } else {
        1.0
    };
    Grid {
        y: Axis::linspace(-6.0 * length, 6.0 * length, 25),
        z: Axis::linspace(-2.0, 3.0 / decay, 41),
    }
}

fn field_continuity() -> Verdict {
    let pts: Vec<_> = sample_points(seed_from_env() ^ 0x00F1_E1D5, 400)
        .into_iter()
        .filter(|p| p.field().b() > 1e-3)
        .take(100)
        .collect();
    let rule = GaussHermite::new(48);
    let mut worst_residual: f64 = 0.0;
    let mut worst_current: f64 = 0.0;
    let mut worst_decay: f64 = 0.0;
    let mut fitted = 0;
    for p in &pts {
        let a = match amplitudes(p) {
            Ok(a) => a,
            Err(e) => return verdict(false, format!("{p:?}: {e}")),
        };
        let field = match assemble_field(p, &a, &field_grid(p), 0.0) {
            Ok(f) => f,
            Err(e) => return verdict(false, format!("{p:?}: {e}")),
        };
        worst_residual = worst_residual.max(continuity_residual(&field));

        let budget = current_budget(p).unwrap();
        let j0 = incident_current(p);
        for (z, want) in [
            (-1.3, 1.0 - budget.reflected()),
            (0.7, budget.transmitted()),
        ] {
            let got = quadrature_current(p, &a, z, &rule).unwrap() / j0;
            worst_current = worst_current.max((got - want).abs());
        }

        if p.regime() == Regime::CaseIII {
            let row = field.nearest_row(0.0);
            if let Some(rate) = fit_decay_rate(&field, row) {
                let q = kleinb::momentum_right(p).im;
                worst_decay = worst_decay.max((rate - q).abs() / q);
                fitted += 1;
            }
        }
    }
    verdict(
        pts.len() == 100
            && worst_residual < 1e-10
            && worst_current < 1e-8
            && fitted > 0
            && worst_decay < 0.01,
        format!(
            "{} points: residual {worst_residual:.2e}, current vs budget {worst_current:.2e}, \
             decay fit {fitted} points within {:.2e}",
            pts.len(),
            worst_decay
        ),
    )
}

fn orthonormality() -> Verdict {
    // trapezoid rule on a wide grid; spectrally accurate for these integrands
    let h = 1.0 / 128.0;
    let xs: Vec<f64> = (0..=(2 * 14 * 128)).map(|i| -14.0 + h * i as f64).collect();
    let table: Vec<Vec<f64>> = (0..=30)
        .map(|n| xs.iter().map(|&x| eval_oscillator(n, x).unwrap()).collect())
        .collect();
    let mut worst: f64 = 0.0;
    for m in 0..=30 {
        for n in m..=30 {
            let s: f64 = table[m]
                .iter()
                .zip(&table[n])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                * h;
            let want = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((s - want).abs());
        }
    }
    verdict(
        worst < 1e-10,
        format!("n <= 30, max |<m|n> - δ| = {worst:.2e}"),
    )
}

fn spin_filter() -> Verdict {
    let field = FieldStrength::new(0.1).unwrap();
    let at = |g: f64, e: f64| FilterSetup::reflected(e, 1, field, g, 1e6);
    let zero = arrival_delay(&at(2.0, 2.0)).unwrap();
    let anomalous = arrival_delay(&at(ANOMALOUS_G, 2.0)).unwrap();
    let mut worst: f64 = 0.0;
    for e in [1.5, 2.0, 4.0] {
        for i in -10..=10 {
            if i == 0 {
                continue;
            }
            let s = at(2.0 + 0.001 * f64::from(i), e);
            let exact = arrival_delay(&s).unwrap();
            let approx = first_order_delay(&s).unwrap();
            worst = worst.max(((exact - approx) / exact).abs());
        }
    }
    verdict(
        zero == 0.0 && anomalous > 0.0 && worst < 1e-6,
        format!("Δt(g=2) = {zero}, Δt(g=2.002319) = {anomalous:.6e}, first-order gap {worst:.2e}"),
    )
}

fn kleinb(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kleinb"))
        .args(args)
        .output()
        .expect("kleinb runs")
}

fn json_f64(v: &Value) -> f64 {
    v.to_string().parse().expect("numeric field")
}

fn sweep_round_trip() -> Result<usize, String> {
    let sweep = kleinb(&[
        "sweep", "--axis", "V0", "--start", "0", "--stop", "9", "--count", "19", "--E", "2.5",
        "--b", "0.3", "--n", "2", "--spin", "down",
    ]);
    if !sweep.status.success() {
        return Err(String::from_utf8_lossy(&sweep.stderr).into_owned());
    }
    let mut reader = csv::Reader::from_reader(sweep.stdout.as_slice());
    let header = reader.headers().map_err(|e| e.to_string())?.clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let mut checked = 0;
    for row in reader.records() {
        let row = row.map_err(|e| e.to_string())?;
        if !row[col("error")].is_empty() {
            continue;
        }
        let out = kleinb(&[
            "amps",
            "--E",
            "2.5",
            "--V0",
            &row[col("axis_value")],
            "--b",
            "0.3",
            "--n",
            "2",
            "--spin",
            "down",
        ]);
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        let rec: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        let a = &rec["amplitudes"];
        let b = &rec["budget"];
        let pairs = [
            ("re_R", &a["R"]["re"]),
            ("im_R", &a["R"]["im"]),
            ("re_Rp", &a["Rp"]["re"]),
            ("im_Rp", &a["Rp"]["im"]),
            ("re_T", &a["T"]["re"]),
            ("im_T", &a["T"]["im"]),
            ("re_Tp", &a["Tp"]["re"]),
            ("im_Tp", &a["Tp"]["im"]),
            ("refl_same", &b["refl_same"]),
            ("refl_flip", &b["refl_flip"]),
            ("trans_same", &b["trans_same"]),
            ("trans_flip", &b["trans_flip"]),
            ("sum", &rec["sum"]),
        ];
        for (name, v) in pairs {
            let csv_value: f64 = row[col(name)].parse().map_err(|_| format!("bad {name}"))?;
            if csv_value.to_bits() != json_f64(v).to_bits() {
                return Err(format!("row {}: {name} {csv_value:e} vs {v}", &row[0]));
            }
        }
        if rec["regime"] != row[col("regime")] {
            return Err(format!("row {}: regime differs", &row[0]));
        }
        checked += 1;
    }
    Ok(checked)
}

fn cli() -> Verdict {
    let started = Instant::now();
    let out = kleinb(&["selftest"]);
    let elapsed = started.elapsed();
    let text = String::from_utf8_lossy(&out.stdout);
    let checks = text.lines().filter(|l| l.starts_with("PASS")).count();
    let selftest_ok = out.status.success() && checks == 5 && elapsed < Duration::from_secs(30);
    match sweep_round_trip() {
        Ok(rows) => verdict(
            selftest_ok && rows >= 15,
            format!(
                "selftest {checks}/5 checks in {:.2} s; sweep round trip bit-exact on {rows} rows",
                elapsed.as_secs_f64()
            ),
        ),
        Err(e) => verdict(false, format!("sweep round trip: {e}")),
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("unitarity", unitarity),
        ("oracle equivalence", oracle_equivalence),
        ("field-free reduction", field_free),
        ("generalized Klein limit", klein),
        ("no-flip anchors", no_flip),
        ("spin symmetry", spin_symmetry),
        ("field continuity", field_continuity),
        ("oscillator basis", orthonormality),
        ("spin filter", spin_filter),
        ("command line", cli),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        let mark = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {mark} {name}: {}", i + 1, v.detail);
        if !v.passed {
            failed += 1;
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
