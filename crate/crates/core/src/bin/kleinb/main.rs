mod args;
mod output;
mod sweep;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;
use kleinb::filter::{
    arrival_delay, first_order_delay, split_momenta, FilterError, FilterSetup,
    COMPTON_LENGTH_METRES, NATURAL_TIME_SECONDS,
};
use kleinb::gridfile::{write_grid, Payload};
use kleinb::sampling::seed_from_env;
use kleinb::scattering::budget_from;
use kleinb::wavefield::{
    assemble_field, continuity_residual, guiding_center, Axis, FieldError, Grid,
};
use kleinb::{
    amplitudes, klein_limit, make_channel, selftest, solve_boundary_system, ChannelError,
    ChannelParams, FieldStrength, IncomingState, Regime, ScatterError,
};
use serde_json::json;

use args::{Cli, Command, FieldArgs, FilterArgs, KleinArgs, Method, PayloadArg, PointArgs};
use output::{amps_record, fmt17, num};

/// A rejected input, reported with exit code 2.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<ScatterError>() {
            return match e {
                ScatterError::Channel(_) => EXIT_INVALID,
                ScatterError::SingularStep { .. } | ScatterError::SingularMatrix => EXIT_NUMERICAL,
            };
        }
        if let Some(e) = cause.downcast_ref::<FieldError>() {
            return match e {
                FieldError::Oscillator(_) | FieldError::SingularStep => EXIT_NUMERICAL,
                _ => EXIT_INVALID,
            };
        }
        if cause.is::<ChannelError>() || cause.is::<FilterError>() || cause.is::<Invalid>() {
            return EXIT_INVALID;
        }
    }
    EXIT_FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match cli.command {
        Command::Amps(a) => {
            cmd_amps(&mut out, &a.point, a.method)?;
            ExitCode::SUCCESS
        }
        Command::Sweep(a) => {
            sweep::SweepSpec::resolve(&a)?.write_csv(&mut out)?;
            ExitCode::SUCCESS
        }
        Command::RegimeMap(a) => {
            cmd_regime_map(&mut out, &a)?;
            ExitCode::SUCCESS
        }
        Command::Field(a) => {
            cmd_field(&mut out, &a)?;
            ExitCode::SUCCESS
        }
        Command::KleinLimit(a) => {
            cmd_klein_limit(&mut out, &a)?;
            ExitCode::SUCCESS
        }
        Command::FilterDelay(a) => {
            cmd_filter_delay(&mut out, &a)?;
            ExitCode::SUCCESS
        }
        Command::Selftest(a) => cmd_selftest(
            &mut out,
            a.seed.unwrap_or_else(seed_from_env),
            a.count,
            a.json,
        )?,
    };
    out.flush()?;
    Ok(code)
}

fn channel(p: &PointArgs) -> Result<ChannelParams> {
    Ok(make_channel(p.energy, p.v0, p.b, p.spin, p.n)?)
}

fn print_json<W: Write>(out: &mut W, value: &serde_json::Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_amps<W: Write>(out: &mut W, point: &PointArgs, method: Method) -> Result<()> {
    let p = channel(point)?;
    let a = match method {
        Method::Closed => amplitudes(&p)?,
        Method::Oracle => solve_boundary_system(&p)?,
    };
    print_json(out, &amps_record(&p, &a, &budget_from(&p, &a)))
}

fn cmd_regime_map<W: Write>(out: &mut W, a: &args::RegimeMapArgs) -> Result<()> {
    if a.e_count == 0 || a.v0_count == 0 {
        return Err(Invalid("grid counts must be at least 1".into()).into());
    }
    let state = IncomingState::new(a.spin, a.n)?;
    let mass = FieldStrength::new(a.b)?.channel_mass(state.n());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["E", "V0", "regime", "open"])?;
    for e in Axis::linspace(a.e_start, a.e_stop, a.e_count).values() {
        for v0 in Axis::linspace(a.v0_start, a.v0_stop, a.v0_count).values() {
            let open = e.abs() > mass;
            let regime = Regime::classify(e, v0, mass);
            w.write_record([
                fmt17(e),
                fmt17(v0),
                regime.label().to_string(),
                open.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_field<W: Write>(out: &mut W, a: &FieldArgs) -> Result<()> {
    let p = channel(&a.point)?;
    if p.field().b() == 0.0 {
        return Err(FieldError::NoMagneticLength.into());
    }
    let amps = amplitudes(&p)?;
    let y0 = guiding_center(&p, a.kx);
    let default = Grid::default_for(&p, y0);
    let span = |ax: &Axis| (ax.start, ax.value(ax.len - 1));
    let (y_lo, y_hi) = span(&default.y);
    let (z_lo, z_hi) = span(&default.z);
    let grid = Grid {
        y: Axis::linspace(a.y_min.unwrap_or(y_lo), a.y_max.unwrap_or(y_hi), a.ny),
        z: Axis::linspace(a.z_min.unwrap_or(z_lo), a.z_max.unwrap_or(z_hi), a.nz),
    };
    let field = assemble_field(&p, &amps, &grid, y0)?;

    let payload = match a.payload {
        PayloadArg::Density => Payload::Density,
        PayloadArg::Spinor => Payload::Spinor,
    };
    let file = File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut grid_out = BufWriter::new(file);
    write_grid(&mut grid_out, &field, payload)?;
    grid_out.flush()?;

    let slice_path = a
        .slice
        .clone()
        .unwrap_or_else(|| a.out.with_extension("csv"));
    let slice_y = a.slice_y.unwrap_or(y0);
    let row_y = grid.y.value(field.nearest_row(slice_y));
    let mut w = csv::Writer::from_path(&slice_path)
        .with_context(|| format!("creating {}", slice_path.display()))?;
    w.write_record(["z", "density"])?;
    for (z, rho) in field.density_slice(slice_y) {
        w.write_record([fmt17(z), fmt17(rho)])?;
    }
    w.flush()?;

    print_json(
        out,
        &json!({
            "inputs": output::inputs(&p),
            "regime": p.regime().label(),
            "guiding_center": num(y0),
            "ny": grid.y.len,
            "nz": grid.z.len,
            "grid_file": a.out.display().to_string(),
            "slice_file": slice_path.display().to_string(),
            "slice_y": num(row_y),
            "continuity_residual": num(continuity_residual(&field)),
        }),
    )
}

fn cmd_klein_limit<W: Write>(out: &mut W, a: &KleinArgs) -> Result<()> {
    let state = IncomingState::new(a.spin, a.n)?;
    let field = FieldStrength::new(a.b)?;
    let limit = klein_limit(state, a.energy, field)?;
    let mut record = json!({
        "inputs": {
            "E": num(a.energy),
            "b": num(a.b),
            "n": a.n,
            "spin": a.spin.to_string(),
        },
        "T_sq": num(limit.t_same),
        "Tp_sq": num(limit.t_flip),
    });
    if let Some(v0) = a.v0 {
        let p = make_channel(a.energy, v0, a.b, a.spin, a.n)?;
        let (t_sq, tp_sq) = amplitudes(&p)?.transmitted_probabilities();
        record["finite_step"] = json!({
            "V0": num(v0),
            "regime": p.regime().label(),
            "T_sq": num(t_sq),
            "Tp_sq": num(tp_sq),
        });
    }
    print_json(out, &record)
}

fn cmd_filter_delay<W: Write>(out: &mut W, a: &FilterArgs) -> Result<()> {
    let setup = FilterSetup {
        energy: a.energy,
        n: a.n,
        field: FieldStrength::new(a.b)?,
        g: a.g,
        distance: a.d,
        branch: a.branch,
        v0: a.v0,
    };
    let (up, down) = split_momenta(&setup)?;
    let dt = arrival_delay(&setup)?;
    let first = first_order_delay(&setup)?;
    let mut record = json!({
        "inputs": {
            "E": num(a.energy),
            "n": a.n,
            "b": num(a.b),
            "g": num(a.g),
            "d": num(a.d),
            "branch": setup.branch,
            "V0": num(a.v0),
        },
        "cp_up": num(up),
        "cp_down": num(down),
        "delta_t": num(dt),
        "delta_t_first_order": num(first),
    });
    if a.si {
        record["delta_t_seconds"] = num(dt * NATURAL_TIME_SECONDS);
        record["distance_metres"] = num(a.d * COMPTON_LENGTH_METRES);
    }
    print_json(out, &record)
}

fn cmd_selftest<W: Write>(out: &mut W, seed: u64, count: usize, as_json: bool) -> Result<ExitCode> {
    let started = Instant::now();
    let outcomes = selftest::run(seed, count);
    let elapsed = started.elapsed().as_secs_f64();
    let passed = outcomes.iter().all(|o| o.passed);
    if as_json {
        print_json(
            out,
            &json!({
                "seed": seed,
                "count": count,
                "elapsed_seconds": num(elapsed),
                "passed": passed,
                "checks": outcomes,
            }),
        )?;
    } else {
        writeln!(out, "seed {seed}, {count} points")?;
        for o in &outcomes {
            let mark = if o.passed { "PASS" } else { "FAIL" };
            writeln!(out, "{mark} {}: {}", o.name, o.detail)?;
        }
        writeln!(out, "elapsed {elapsed:.2} s")?;
    }
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    })
}
