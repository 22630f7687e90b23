//! End-to-end behaviour of the binary: exit-code contract, strict config
//! schema, fault injection, byte-identical reruns.

use std::path::Path;
use std::process::Command;

fn waveinv() -> Command {
    Command::new(env!("CARGO_BIN_EXE_waveinv"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn identities_pass_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("id.json");
    write(
        &cfg,
        r#"{ "experiment": "identities", "grids": [4, 16], "seed": 7,
             "identities": { "trials": 25 } }"#,
    );
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for out in [&out1, &out2] {
        let status = waveinv()
            .args(["identities", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = std::fs::read(out1.join("identities.csv")).unwrap();
    let b = std::fs::read(out2.join("identities.csv")).unwrap();
    assert_eq!(a, b, "identical config and seed must give identical bytes");
}

#[test]
fn corrupted_input_trips_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("id.json");
    write(
        &cfg,
        r#"{ "experiment": "identities", "grids": [8], "seed": 7,
             "identities": { "trials": 5, "fault_injection": 0.5 } }"#,
    );
    let status = waveinv()
        .args(["identities", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn unknown_keys_and_bad_configs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    write(
        &cfg,
        r#"{ "experiment": "identities", "grids": [8], "typo_key": 1 }"#,
    );
    let status = waveinv()
        .args(["identities", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // empty grid list
    write(&cfg, r#"{ "experiment": "identities", "grids": [] }"#);
    let status = waveinv()
        .args(["identities", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // experiment/command mismatch
    write(&cfg, r#"{ "experiment": "identities", "grids": [8] }"#);
    let status = waveinv()
        .args(["consistency", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn seed_override_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("id.json");
    write(
        &cfg,
        r#"{ "experiment": "identities", "grids": [8], "seed": 7,
             "identities": { "trials": 10 } }"#,
    );
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for (out, seed) in [(&out1, "7"), (&out2, "8")] {
        let status = waveinv()
            .args(["identities", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .args(["--seed", seed])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = std::fs::read(out1.join("identities.csv")).unwrap();
    let b = std::fs::read(out2.join("identities.csv")).unwrap();
    assert_ne!(a, b, "a different seed must change the sampled inputs");
}

#[test]
fn jobs_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("st.json");
    write(
        &cfg,
        r#"{ "experiment": "stability_sweep", "grids": [8, 16], "seed": 3,
             "weight": { "x0": -0.5, "beta": 0.9, "lambda": 2.0, "t_half": 1.6,
                         "eps": 0.5, "mode": "inverse" },
             "solver": { "t_final": 1.6 } }"#,
    );
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for (out, jobs) in [(&out1, "1"), (&out2, "4")] {
        let status = waveinv()
            .args(["stability-sweep", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .args(["--jobs", jobs])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = std::fs::read(out1.join("stability_sweep.csv")).unwrap();
    let b = std::fs::read(out2.join("stability_sweep.csv")).unwrap();
    assert_eq!(a, b, "worker count must not affect the merged rows");
}

#[test]
fn degenerate_potential_pair_is_flagged_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("st.json");
    write(
        &cfg,
        r#"{ "experiment": "stability_sweep", "grids": [8], "seed": 3,
             "weight": { "x0": -0.5, "beta": 0.9, "lambda": 2.0, "t_half": 1.6,
                         "eps": 0.5, "mode": "inverse" },
             "solver": { "t_final": 1.6 },
             "stability": { "q": { "offset": 1.0, "amplitude": 0.0, "mode": 1 } } }"#,
    );
    let out = dir.path().join("out");
    let status = waveinv()
        .args(["stability-sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(out.join("stability_sweep.csv")).unwrap();
    let potential_row: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("potential"))
        .unwrap()
        .split(',')
        .collect();
    assert_eq!(potential_row[10], "true", "row must carry the degenerate flag");
}

#[test]
fn explicit_s_beyond_the_budget_is_flagged_out_of_theory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ca.json");
    write(
        &cfg,
        r#"{ "experiment": "carleman_sweep", "grids": [8], "seed": 3,
             "weight": { "x0": -0.3, "beta": 0.3, "lambda": 2.0, "t_half": 0.5,
                         "eps": 0.016, "mode": "carleman" },
             "carleman": { "s_values": [0.05, 2.0], "kinds": ["low_mode"],
                           "quad_order": 24 } }"#,
    );
    let out = dir.path().join("out");
    let status = waveinv()
        .args(["carleman-sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0), "explicit s list carries no spread gate");
    let text = std::fs::read_to_string(out.join("carleman_sweep.csv")).unwrap();
    let flag_of = |s_value: f64| {
        text.lines()
            .skip(1)
            .map(|l| l.split(',').collect::<Vec<_>>())
            .find(|f| f[6] == "decompo" && (f[3].parse::<f64>().unwrap() - s_value).abs() < 1e-12)
            .map(|f| f[12].to_string())
            .unwrap()
    };
    // s h = 0.05/9 stays inside eps; s h = 2/9 exceeds it
    assert_eq!(flag_of(0.05), "false");
    assert_eq!(flag_of(2.0), "true");
}

#[test]
fn filtered_stability_reports_the_filter_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("st.json");
    write(
        &cfg,
        r#"{ "experiment": "stability_sweep", "grids": [8, 16], "seed": 3,
             "weight": { "x0": -0.5, "beta": 0.9, "lambda": 2.0, "t_half": 1.6,
                         "eps": 0.5, "mode": "inverse" },
             "solver": { "t_final": 1.6 },
             "stability": { "filtered_delta": 1.0 } }"#,
    );
    let out = dir.path().join("out");
    let status = waveinv()
        .args(["stability-sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(out.join("stability_sweep.csv")).unwrap();
    let row: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("potential"))
        .unwrap()
        .split(',')
        .collect();
    assert!(!row[9].is_empty(), "flux-only ratio column populated");
    assert_eq!(row[12], "true", "low-mode perturbation passes the filter");
}

#[test]
fn consistency_dump_writes_the_export_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("co.json");
    write(
        &cfg,
        r#"{ "experiment": "consistency", "grids": [8, 16], "seed": 3,
             "solver": { "t_final": 1.0, "n_ref": 128 },
             "consistency": {
               "data": { "y0_offset": 0.0, "y0_amplitude": 1.0, "y0_mode": 1 },
               "p": { "offset": 1.0, "amplitude": 0.5, "mode": 1 },
               "dump_solution": true } }"#,
    );
    let out = dir.path().join("out");
    let status = waveinv()
        .args(["consistency", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for file in [
        "consistency.csv",
        "trajectory_n8.csv",
        "observation_flux_n8.csv",
        "observation_tych_n8.csv",
        "trajectory_n16.csv",
    ] {
        assert!(out.join(file).is_file(), "missing {file}");
    }
    // header contract of the trajectory export
    let text = std::fs::read_to_string(out.join("trajectory_n8.csv")).unwrap();
    assert!(text.starts_with("n,t,j,x,y"));
}
