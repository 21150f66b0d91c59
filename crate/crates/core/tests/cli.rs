use std::process::{Command, Output};

use serde_json::Value;

fn kleinb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kleinb"))
        .args(args)
        .output()
        .expect("kleinb runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn num(v: &Value) -> f64 {
    v.to_string().parse().unwrap()
}

fn csv_rows(out: &Output) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let header = r.headers().unwrap().clone();
    (header, r.records().map(Result::unwrap).collect())
}

#[test]
fn amps_without_step_transmits_everything() {
    let rec = json(&kleinb(&[
        "amps", "--E", "2", "--V0", "0", "--b", "0.1", "--n", "1", "--spin", "up",
    ]));
    assert_eq!(num(&rec["amplitudes"]["T"]["re"]), 1.0);
    assert_eq!(num(&rec["sum"]), 1.0);
    assert_eq!(rec["regime"], "II");
}

#[test]
fn amps_field_free_total_reflection() {
    let rec = json(&kleinb(&[
        "amps", "--E", "2", "--V0", "2", "--b", "0", "--n", "0", "--spin", "down",
    ]));
    assert_eq!(rec["regime"], "III");
    assert!((num(&rec["budget"]["refl_same"]) - 1.0).abs() < 1e-14);
}

#[test]
fn amps_full_record_matches_oracle() {
    let args = [
        "--E", "2", "--V0", "6", "--b", "0.2", "--n", "1", "--spin", "up",
    ];
    let closed = json(&kleinb(&[&["amps"][..], &args].concat()));
    let oracle = json(&kleinb(
        &[&["amps", "--method", "oracle"][..], &args].concat(),
    ));
    for key in ["R", "Rp", "T", "Tp"] {
        for part in ["re", "im"] {
            let a = num(&closed["amplitudes"][key][part]);
            let b = num(&oracle["amplitudes"][key][part]);
            assert!((a - b).abs() < 1e-13, "{key}.{part}: {a} vs {b}");
        }
    }
    assert!((num(&closed["amplitudes"]["R"]["re"]) + 0.436_985_172_657_970_9).abs() < 1e-15);
    for key in [
        "inputs",
        "regime",
        "channel_mass",
        "amplitudes",
        "budget",
        "sum",
        "T_sq",
        "Tp_sq",
    ] {
        assert!(closed.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn seventeen_significant_digits() {
    let out = kleinb(&["amps", "--E", "2", "--V0", "6", "--b", "0.2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"E\": 2.0000000000000000e+0"));
    assert!(text.contains("\"b\": 2.0000000000000001e-1"));
}

#[test]
fn exit_codes() {
    let closed = kleinb(&["amps", "--E", "0.5"]);
    assert_eq!(closed.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&closed.stderr).contains("closed channel"));

    let no_partner = kleinb(&["amps", "--E", "2", "--n", "0", "--spin", "up"]);
    assert_eq!(no_partner.status.code(), Some(2));

    let singular = kleinb(&["amps", "--E", "2", "--V0", "3", "--b", "0.05", "--n", "2"]);
    assert_eq!(singular.status.code(), Some(3));

    let bad_flag = kleinb(&["amps", "--E", "two"]);
    assert_eq!(bad_flag.status.code(), Some(2));

    let bad_sweep = kleinb(&[
        "sweep", "--axis", "q", "--values", "1", "--E", "2", "--V0", "1", "--b", "0",
    ]);
    assert_eq!(bad_sweep.status.code(), Some(2));
}

#[test]
fn sweep_regime_transitions_and_order() {
    // M_1 = sqrt(1.2) ≈ 1.095; E = 2 crosses V0 = E ± M_1 near 0.905 and 3.095
    let (header, rows) = csv_rows(&kleinb(&[
        "sweep", "--axis", "V0", "--start", "0", "--stop", "5", "--count", "51", "--E", "2", "--b",
        "0.1", "--jobs", "4",
    ]));
    assert_eq!(
        header.iter().collect::<Vec<_>>().join(","),
        "axis_value,regime,re_R,im_R,re_Rp,im_Rp,re_T,im_T,re_Tp,im_Tp,refl_same,refl_flip,\
         trans_same,trans_flip,sum,error"
    );
    let axis: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(axis.windows(2).all(|w| w[0] < w[1]));
    let mut regimes: Vec<&str> = rows
        .iter()
        .map(|r| &r[1])
        .filter(|r| !r.is_empty())
        .collect();
    regimes.dedup();
    assert_eq!(regimes, ["II", "III", "I"]);
}

#[test]
fn sweep_output_independent_of_jobs() {
    let args = [
        "sweep", "--axis", "E", "--start", "1.05", "--stop", "8", "--count", "64", "--V0", "4",
        "--b", "0.4", "--n", "3",
    ];
    let one = kleinb(&[&args[..], &["--jobs", "1"]].concat());
    let many = kleinb(&[&args[..], &["--jobs", "8"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn field_sweep_starts_without_flips() {
    let (_, rows) = csv_rows(&kleinb(&[
        "sweep",
        "--axis",
        "b",
        "--start",
        "0",
        "--stop",
        "0.5",
        "--count",
        "6",
        "--E",
        "2",
        "--V0",
        "6",
        "--columns",
        "axis_value,refl_flip",
    ]));
    assert_eq!(&rows[0][1], "0.0000000000000000e+0");
    assert!(rows[1][1].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn closed_channels_become_error_rows() {
    let (header, rows) = csv_rows(&kleinb(&[
        "sweep", "--axis", "n", "--values", "0,1,2,40", "--E", "2", "--V0", "1", "--b", "0.1",
        "--spin", "down",
    ]));
    let err = header.iter().position(|h| h == "error").unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[..3].iter().all(|r| r[err].is_empty()));
    assert!(rows[3][err].contains("closed channel"));
    assert!(rows[3][1].is_empty());
}

#[test]
fn deep_step_sweep_approaches_klein_limit() {
    let (header, rows) = csv_rows(&kleinb(&[
        "sweep",
        "--axis",
        "V0",
        "--values",
        "1e2,1e3,1e4",
        "--E",
        "2",
        "--b",
        "0.2",
        "--n",
        "1",
        "--columns",
        "axis_value,re_T,im_T,re_Tp,im_Tp",
    ]));
    assert_eq!(header.len(), 5);
    let limit = json(&kleinb(&[
        "klein-limit",
        "--E",
        "2",
        "--b",
        "0.2",
        "--n",
        "1",
    ]));
    let (t_inf, tp_inf) = (num(&limit["T_sq"]), num(&limit["Tp_sq"]));
    let gaps: Vec<f64> = rows
        .iter()
        .map(|r| {
            let f = |i: usize| r[i].parse::<f64>().unwrap();
            let t = f(1).hypot(f(2)).powi(2);
            ((t - t_inf) / t_inf).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    assert!(gaps[2] < 1e-3);
    assert!(tp_inf > 0.0);
}

#[test]
fn sweep_from_config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.toml");
    std::fs::write(
        &path,
        "axis = \"V0\"\nstart = 0.0\nstop = 2.0\ncount = 3\nE = 2.0\nb = 0.1\nn = 1\nspin = \"up\"\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let (_, rows) = csv_rows(&kleinb(&["sweep", "--config", p]));
    assert_eq!(rows.len(), 3);
    let (_, rows) = csv_rows(&kleinb(&["sweep", "--config", p, "--count", "5"]));
    assert_eq!(rows.len(), 5);

    std::fs::write(&path, "axis = \"V0\"\nbogus = 1\n").unwrap();
    assert_eq!(kleinb(&["sweep", "--config", p]).status.code(), Some(2));
}

#[test]
fn klein_limit_field_free_anchor() {
    let rec = json(&kleinb(&["klein-limit", "--b", "0", "--E", "1.41421356"]));
    assert!((num(&rec["T_sq"]) - 0.585786).abs() < 1e-6);
    assert_eq!(num(&rec["Tp_sq"]), 0.0);
}

#[test]
fn filter_delay() {
    let rec = json(&kleinb(&["filter-delay", "--g", "2"]));
    assert_eq!(num(&rec["delta_t"]), 0.0);
    let rec = json(&kleinb(&["filter-delay", "--si"]));
    let dt = num(&rec["delta_t"]);
    assert!(dt > 0.0);
    let seconds = num(&rec["delta_t_seconds"]);
    assert!((seconds / dt - 1.288_088_668e-21).abs() < 1e-29);
    let rec = json(&kleinb(&[
        "filter-delay",
        "--branch",
        "transmitted",
        "--V0",
        "6",
        "--d",
        "2e6",
    ]));
    assert!(num(&rec["delta_t"]) > 0.0);
    let out = kleinb(&["filter-delay", "--branch", "transmitted", "--V0", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn field_dump_decays_in_evanescent_regime() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("psi.bin");
    let rec = json(&kleinb(&[
        "field",
        "--E",
        "2",
        "--V0",
        "2.5",
        "--b",
        "0.3",
        "--n",
        "1",
        "--ny",
        "33",
        "--nz",
        "80",
        "--out",
        grid.to_str().unwrap(),
    ]));
    assert_eq!(rec["regime"], "III");
    assert!(num(&rec["continuity_residual"]) < 1e-10);

    let data = kleinb::gridfile::read_grid(std::fs::File::open(&grid).unwrap()).unwrap();
    assert_eq!(data.values.len(), 33 * 80);
    assert_eq!(data.header.width, 1);

    let mut r = csv::Reader::from_path(grid.with_extension("csv")).unwrap();
    let slice: Vec<(f64, f64)> = r
        .records()
        .map(|row| {
            let row = row.unwrap();
            (row[0].parse().unwrap(), row[1].parse().unwrap())
        })
        .collect();
    let tail: Vec<f64> = slice
        .iter()
        .filter(|(z, _)| *z > 0.5)
        .map(|(_, rho)| *rho)
        .collect();
    assert!(tail.len() > 10);
    assert!(tail.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn field_needs_a_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = kleinb(&[
        "field",
        "--E",
        "2",
        "--b",
        "0",
        "--out",
        dir.path().join("x.bin").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn regime_map_labels() {
    let (_, rows) = csv_rows(&kleinb(&[
        "regime-map",
        "--E-start",
        "1.5",
        "--E-stop",
        "2.5",
        "--E-count",
        "3",
        "--V0-start",
        "0",
        "--V0-stop",
        "6",
        "--V0-count",
        "4",
        "--b",
        "0.1",
    ]));
    assert_eq!(rows.len(), 12);
    let labels: Vec<&str> = rows.iter().map(|r| &r[2]).collect();
    assert!(labels.contains(&"I") && labels.contains(&"II") && labels.contains(&"III"));
}

#[test]
fn selftest_honours_seed() {
    let a = Command::new(env!("CARGO_BIN_EXE_kleinb"))
        .args(["selftest", "--count", "300"])
        .env("KLEINB_SEED", "42")
        .output()
        .unwrap();
    assert!(a.status.success());
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("seed 42, 300 points"));
    let rec = json(&kleinb(&[
        "selftest", "--count", "300", "--seed", "7", "--json",
    ]));
    assert_eq!(rec["seed"], 7);
    assert_eq!(rec["passed"], true);
}
