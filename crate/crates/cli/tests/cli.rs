use std::io::Write;
use std::process::{Command, Output};

const GOLDEN: &str = "surd:(-1+1*sqrt(5))/2";

fn rotospec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotospec"))
        .args(args)
        .env_remove("ROTOSPEC_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn exit_code_matrix() {
    let cases: &[(&[&str], i32)] = &[
        (&["classify", "--x", GOLDEN, "--lambda", "angle:rational:0/1", "--space", "H0"], 0),
        (&["classify", "--x", "liouville:2,3", "--lambda", "angle:rational:0/1"], 0),
        (&["classify", "--x", "rational:1/3", "--lambda", "complex:2,0"], 0),
        (&["classify", "--x", "rational:1/4", "--lambda", "orbit:2"], 0),
        (&["classify", "--x", GOLDEN, "--lambda", "angle:rational:1/7", "--alpha-grid", "1/2", "--horizon", "100"], 0),
        (&["classify", "--x", GOLDEN, "--lambda", "angle:surd:(0+1*sqrt(2))/2", "--horizon", "100"], 3),
        (&["classify", "--x", "ball:0.3±0.001", "--lambda", "angle:rational:0/1"], 2),
        (&["classify", "--x", "nonsense", "--lambda", "angle:rational:0/1"], 1),
        (&["classify", "--x", GOLDEN], 1),
        (&["classify", "--x", GOLDEN, "--lambda", "complex:1"], 1),
        (&["classify", "--x", GOLDEN, "--lambda", "angle:rational:0/1", "--space", "H7"], 1),
        (&["no-such-command"], 1),
        (&["construct", "--m", "1"], 1),
        (&["construct", "--m", "2", "--depth", "3"], 0),
        (&["divisors", "--x", "rational:1/3", "--lambda", "angle:rational:0/1", "--n", "6"], 0),
        (&["divisors", "--x", "rational:1/3", "--lambda", "angle:rational:0/1", "--n", "6", "--from", "9"], 1),
        (&["orbit", "--x", GOLDEN, "--n", "5"], 0),
        (&["criterion", "--x", GOLDEN, "--lambda", "angle:rational:0/1", "--alpha-grid", "1/2", "--beta", "3/4"], 0),
        (&["criterion", "--x", "liouville:2", "--lambda", "angle:rational:0/1", "--alpha-grid", "1/2", "--beta", "7/10", "--horizon", "300"], 3),
        (&["resolvent", "--x", "rational:1/2", "--lambda", "complex:3,0", "--n", "3"], 0),
        (&["resolvent", "--x", "rational:1/4", "--lambda", "angle:rational:0/1", "--n", "8"], 1),
        (&["classify", "--x", GOLDEN, "--lambda", "angle:rational:0/1", "--precision-bits", "3"], 1),
    ];
    for (args, code) in cases {
        let out = rotospec(args);
        assert_eq!(
            out.status.code(),
            Some(*code),
            "{args:?}\nstdout: {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn classify_json_shape() {
    let out = rotospec(&["classify", "--x", GOLDEN, "--lambda", "angle:rational:0/1", "--space", "H0"]);
    let v = json(&out);
    assert_eq!(v["verdict"], "NotInSpectrum");
    assert_eq!(v["evidence"]["kind"], "diophantine_tail_bound");
    assert_eq!(v["input"]["space"], "H0");
    assert!(v["runtime_ms"].is_null());

    let v = json(&rotospec(&["classify", "--x", "liouville:2,3", "--lambda", "angle:rational:0/1"]));
    assert_eq!(v["verdict"], "InSpectrum");
    assert_eq!(v["evidence"]["j"], 3);

    let v = json(&rotospec(&["classify", "--x", "rational:1/3", "--lambda", "complex:2,0"]));
    assert_eq!(v["evidence"]["kind"], "off_circle_resolvent");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let runs: &[&[&str]] = &[
        &["classify", "--x", GOLDEN, "--lambda", "angle:rational:0/1"],
        &["construct", "--m", "3"],
        &["resolvent", "--x", "liouville:2", "--lambda", "angle:rational:0/1", "--n", "256", "--window", "256"],
        &["classify", "--x", "rational:2/5", "--lambda-grid", "6"],
    ];
    for args in runs {
        let a = rotospec(args);
        let b = rotospec(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn lambda_grid_keeps_input_order() {
    let out = rotospec(&["classify", "--x", "rational:1/3", "--lambda-grid", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let names: Vec<_> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["input"]["lambda"].as_str().unwrap().to_string(), r["verdict"].as_str().unwrap().to_string()))
        .collect();
    let expected_lambda: Vec<String> = (0..6).map(|j| format!("angle:rational:{}", ["0/1", "1/6", "1/3", "1/2", "2/3", "5/6"][j])).collect();
    assert_eq!(names.iter().map(|n| n.0.clone()).collect::<Vec<_>>(), expected_lambda);
    let verdicts: Vec<_> = names.iter().map(|n| n.1.as_str()).collect();
    assert_eq!(
        verdicts,
        ["Eigenvalue", "NotInSpectrum", "Eigenvalue", "NotInSpectrum", "Eigenvalue", "NotInSpectrum"]
    );
}

#[test]
fn precision_sources() {
    let args = ["classify", "--x", "rational:1/3", "--lambda", "complex:2,0"];
    let bits = |out: Output| json(&out)["precision_bits"].as_u64().unwrap();
    assert_eq!(bits(rotospec(&args)), 128);

    let env = Command::new(env!("CARGO_BIN_EXE_rotospec"))
        .args(args)
        .env("ROTOSPEC_PRECISION_BITS", "256")
        .output()
        .unwrap();
    assert_eq!(bits(env), 256);

    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# run settings\nprecision_bits = 192\nx = rational:1/3\nlambda = complex:2,0").unwrap();
    let path = file.path().to_str().unwrap();
    let with_file = Command::new(env!("CARGO_BIN_EXE_rotospec"))
        .args(["classify", "--config", path])
        .env("ROTOSPEC_PRECISION_BITS", "256")
        .output()
        .unwrap();
    assert_eq!(bits(with_file), 192);
    assert_eq!(bits(rotospec(&["classify", "--config", path, "--precision-bits", "160"])), 160);
}

#[test]
fn resolvent_csv_and_text() {
    let out = rotospec(&[
        "resolvent", "--x", "rational:1/2", "--lambda", "complex:3,0", "--n", "3", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "n,re(a_n),im(a_n),divisor_log2_lo,divisor_log2_hi,b_n_log2_magnitude");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("2,1,0,1.000000,1.000000,-1.000000"));

    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "n,re,im\n1,1,0\n2,0,1").unwrap();
    let out = rotospec(&[
        "resolvent", "--x", "rational:1/2", "--lambda", "complex:3,0", "--n", "2",
        "--coeffs-file", file.path().to_str().unwrap(),
    ]);
    let v = json(&out);
    assert_eq!(v["stream"]["entries"][1]["b_exact"]["im"], "-1/2");
}

#[test]
fn demo_summarises_both_sides() {
    let out = rotospec(&["demo", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].contains("not in the spectrum"));
    assert!(lines[1].contains("is in the spectrum"));
}

#[test]
fn construct_lists_partial_sums() {
    let v = json(&rotospec(&["construct", "--m", "2", "--depth", "3"]));
    let sums: Vec<_> = v["construction"]["partial_sums"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect();
    assert_eq!(sums, ["1/2", "3/4", "193/256"]);
    let qs: Vec<_> = v["construction"]["q_sequence"]
        .as_array()
        .unwrap()
        .iter()
        .take(3)
        .map(|q| q["value"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(qs, ["2", "4", "256"]);
    assert_eq!(v["verification"]["passed"], true);
}
