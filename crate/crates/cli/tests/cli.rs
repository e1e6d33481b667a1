//! End-to-end checks of the binary: command outputs, exit codes, file
//! artifacts, and byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hybrid-centers")
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args).env_remove("HYBRID_CENTERS_TOL");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write_spec(name: &str, content: &str) -> PathBuf {
    let path = tmp(name);
    fs::write(&path, content).unwrap();
    path
}

const DEMO: &str = r#"{
  "center1": {"b": 0, "omega": 1, "delta": 1, "c": 0, "d": 0},
  "center2": {"b": 0, "omega": 1, "delta": -1, "c": 0, "d": 0},
  "reset": {"coeffs": [0, -4, -4]}
}"#;

fn affine_spec(offset: f64, slope: f64) -> String {
    format!(
        r#"{{
  "center1": {{"b": 0, "omega": 1, "delta": 1, "c": 0, "d": 0}},
  "center2": {{"b": 0, "omega": 1, "delta": -1, "c": 0, "d": 0}},
  "reset": {{"coeffs": [{offset}, {slope}]}}
}}"#
    )
}

fn num(v: &serde_json::Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn partition_demo_output_and_determinism() {
    let spec = write_spec("demo_partition.json", DEMO);
    let first = run(&["partition", spec.to_str().unwrap()]);
    assert!(first.status.success(), "{}", stderr(&first));
    let again = run(&["partition", spec.to_str().unwrap()]);
    assert_eq!(first.stdout, again.stdout, "reruns must be byte-identical");

    let doc: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    let branches = doc["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 4);
    let coeffs: Vec<f64> = branches[0]["coeffs"].as_array().unwrap().iter().map(num).collect();
    assert_eq!(coeffs, vec![0.0, 16.0, -80.0, 128.0, -64.0]);
    let d1 = &branches[0]["domain"][0];
    assert_eq!((num(&d1["lo"]), num(&d1["hi"])), (0.0, 1.0));
    assert_eq!(branches[1]["domain"][0]["hi"], "inf");
    assert_eq!(branches[3]["domain"][0]["lo"], "-inf");
    let boundaries: Vec<f64> =
        doc["boundary_points"].as_array().unwrap().iter().map(num).collect();
    assert_eq!(boundaries, vec![-1.0, 0.0, 1.0]);
}

#[test]
fn print_spec_round_trips_to_identical_analysis() {
    let spec = write_spec("demo_echo.json", DEMO);
    let echoed = run(&["partition", spec.to_str().unwrap(), "--print-spec"]);
    assert!(echoed.status.success());
    let echo_path = write_spec("demo_echo_canonical.json", &stdout(&echoed));

    let direct = run(&["partition", spec.to_str().unwrap()]);
    let via_echo = run(&["partition", echo_path.to_str().unwrap()]);
    assert_eq!(direct.stdout, via_echo.stdout);

    // Echo of the echo is stable.
    let echoed_again = run(&["partition", echo_path.to_str().unwrap(), "--print-spec"]);
    assert_eq!(echoed.stdout, echoed_again.stdout);
}

#[test]
fn bad_specs_exit_2_with_located_errors() {
    let bad_delta = write_spec("bad_delta.json", &DEMO.replace("\"delta\": -1", "\"delta\": -3"));
    let out = run(&["partition", bad_delta.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));

    let missing = write_spec("missing_field.json", &DEMO.replace("\"omega\": 1, ", ""));
    let out = run(&["partition", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("omega"), "{}", stderr(&out));

    let unknown = write_spec("unknown_field.json", &DEMO.replace("\"reset\"", "\"rset\""));
    let out = run(&["partition", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("rset"), "{}", stderr(&out));

    let out = run(&["partition", tmp("no_such_file.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let degenerate = write_spec("flat_reset.json", &DEMO.replace("[0, -4, -4]", "[1, 0]"));
    let out = run(&["partition", degenerate.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("leading"), "{}", stderr(&out));
}

#[test]
fn cycles_reports_the_neutral_dichotomy() {
    // Slope -1 with a nonzero branch-1 offset: no regular cycles at all.
    let no_cycle = write_spec("affine_minus_one.json", &affine_spec(1.0, -1.0));
    let out = run(&["cycles", no_cycle.to_str().unwrap(), "--max-period", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["affine"]["outcome"], "neutral_no_cycle");
    assert_eq!(doc["affine"]["dichotomy"], "no_regular_periodic_orbits");
    assert!(doc["cycles"].as_array().unwrap().iter().all(|c| c["regular"] == false));

    // Slope +1 here cancels the offset: the whole branch-1 domain is periodic.
    let continuum = write_spec("affine_plus_one.json", &affine_spec(1.0, 1.0));
    let out = run(&["cycles", continuum.to_str().unwrap(), "--max-period", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["affine"]["outcome"], "neutral_continuum");
    assert_eq!(doc["affine"]["dichotomy"], "all_branch_one_orbits_periodic");

    // A contracting slope reports its unique stable regular cycle.
    let stable = write_spec("affine_half.json", &affine_spec(1.0, 0.5));
    let out = run(&["cycles", stable.to_str().unwrap(), "--max-period", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["affine"]["outcome"], "cycle");
    assert_eq!(doc["affine"]["cycle"]["classification"], "stable");
    assert_eq!(num(&doc["affine"]["cycle"]["multiplier"]), 0.25);
}

#[test]
fn fate_grid_csv_and_strict_exit() {
    let spec = write_spec("demo_fate.json", DEMO);
    let out = run(&["fate", spec.to_str().unwrap(), "--grid", "-1.5:-1.5:1", "--max-iter", "50"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("y,verdict,iterations,bound"));
    let row = lines.next().unwrap();
    assert!(row.contains(",escape,"), "{row}");
    assert!(row.ends_with(",1.2500000000000000e0"), "{row}");

    // A chaotic interior start never resolves; --strict turns that into
    // exit 3 after the CSV is printed.
    let loose = run(&["fate", spec.to_str().unwrap(), "--grid", "0.3:0.3:1", "--max-iter", "60"]);
    assert!(loose.status.success());
    assert!(stdout(&loose).contains(",undetermined,"));
    let strict = run(&[
        "fate",
        spec.to_str().unwrap(),
        "--grid",
        "0.3:0.3:1",
        "--max-iter",
        "60",
        "--strict",
    ]);
    assert_eq!(strict.status.code(), Some(3));
    assert_eq!(strict.stdout, loose.stdout, "strictness must not change the data");
}

#[test]
fn simulate_closed_orbit_csv_and_artifacts() {
    let spec = write_spec("demo_simulate.json", DEMO);
    let svg_path = tmp("orbit.svg");
    let points_path = tmp("orbit_points.csv");
    let args = [
        "simulate",
        spec.to_str().unwrap(),
        "--q",
        "0,0.75",
        "--which",
        "1",
        "--arc-samples",
        "5",
        "--svg",
        svg_path.to_str().unwrap(),
        "--points-csv",
        points_path.to_str().unwrap(),
    ];
    let out = run(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "event_index,kind,t_start,duration,x,y");
    assert_eq!(lines.len(), 5, "closed period-1 orbit has 4 events: {text}");
    assert!(lines[1].starts_with("0,arc,"));
    assert!(lines[2].starts_with("1,jump,"));
    assert!(lines[3].starts_with("2,arc,"));
    assert!(lines[4].starts_with("3,jump,"));
    assert!(stderr(&out).contains("closed"), "{}", stderr(&out));

    let svg = fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"), "svg artifact");
    assert!(svg.contains("polyline"), "arcs rendered");
    assert!(svg.contains("stroke-dasharray"), "jump chords rendered");

    let points = fs::read_to_string(&points_path).unwrap();
    let mut rows = points.lines();
    assert_eq!(rows.next(), Some("t,x,y"));
    assert_eq!(rows.count(), 10, "two arcs, five samples each");

    let again = run(&args);
    assert_eq!(out.stdout, again.stdout, "simulate must be deterministic");
    assert_eq!(fs::read(&svg_path).unwrap().len(), svg.len());
}

#[test]
fn cobweb_skips_branch_boundaries() {
    let spec = write_spec("demo_cobweb.json", DEMO);
    let out = run(&["cobweb", spec.to_str().unwrap(), "--range", "-1:1", "--samples", "9"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "y,value,branch");
    // Grid hits the boundaries -1, 0, 1 which carry no branch; 6 rows stay.
    assert_eq!(lines.len(), 7, "{text}");
    for row in &lines[1..] {
        let branch: u8 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((1..=4).contains(&branch), "{row}");
    }
}

#[test]
fn chaos_demo_builtin_system_and_witness_csv() {
    let csv_path = tmp("dense_orbit.csv");
    let out = run(&["chaos-demo", "--csv", csv_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["passes"], true);
    assert_eq!(doc["coefficient_match"], true);
    assert_eq!(doc["interval_invariant"], true);
    assert_eq!(doc["periodic_density_depth"], 8);
    assert_eq!(doc["transitivity_blocks"], 8);
    assert!(num(&doc["sensitivity_estimate"]) > 0.1);

    let witness = fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = witness.lines().collect();
    assert_eq!(lines[0], "step,value");
    // Blocks of lengths 2,4,6,8: 2*2 + 4*8 + 6*32 + 8*128 digits.
    assert_eq!(lines.len(), 1 + 1252);
    for row in &lines[1..] {
        let value: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&value), "{row}");
    }

    // The same seed reproduces the certificate byte-for-byte.
    let again = run(&["chaos-demo", "--seed", "7"]);
    let again2 = run(&["chaos-demo", "--seed", "7"]);
    assert_eq!(again.stdout, again2.stdout);

    // A perturbed reset fails the coefficient gate.
    let off = write_spec(
        "demo_perturbed.json",
        &DEMO.replace("[0, -4, -4]", "[0.1, -4, -4]"),
    );
    let out = run(&["chaos-demo", off.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["coefficient_match"], false);
    assert_eq!(doc["passes"], false);
}

#[test]
fn env_tolerance_is_validated_and_applied() {
    let spec = write_spec("demo_env.json", DEMO);
    let out = run_env(
        &["partition", spec.to_str().unwrap()],
        &[("HYBRID_CENTERS_TOL", "not-a-float")],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("HYBRID_CENTERS_TOL"));

    let out = run_env(
        &["cycles", spec.to_str().unwrap(), "--max-period", "1"],
        &[("HYBRID_CENTERS_TOL", "1e-7")],
    );
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn analysis_block_supplies_defaults() {
    let with_analysis = DEMO.replace(
        "\"reset\": {\"coeffs\": [0, -4, -4]}",
        "\"reset\": {\"coeffs\": [0, -4, -4]},\n  \"analysis\": {\"max_iter\": 5, \"seed\": 3}",
    );
    let spec = write_spec("demo_analysis.json", &with_analysis);
    let out = run(&["fate", spec.to_str().unwrap(), "--grid", "0.3:0.3:1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains(",undetermined,5,"), "budget from the analysis block: {text}");

    // The flag wins over the block.
    let out = run(&["fate", spec.to_str().unwrap(), "--grid", "0.3:0.3:1", "--max-iter", "9"]);
    assert!(stdout(&out).contains(",undetermined,9,"), "{}", stdout(&out));

    // --print-spec keeps the analysis block.
    let echoed = run(&["fate", spec.to_str().unwrap(), "--grid", "0:0:1", "--print-spec"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&echoed)).unwrap();
    assert_eq!(doc["analysis"]["max_iter"], 5);
    assert_eq!(doc["analysis"]["seed"], 3);
}

#[test]
fn which_flag_validation() {
    let spec = write_spec("demo_which.json", DEMO);
    let out = run(&["simulate", spec.to_str().unwrap(), "--q", "0,0.75", "--which", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--which"), "{}", stderr(&out));
}

#[test]
fn help_lists_all_commands() {
    let out = run(&["--help"]);
    let text = stdout(&out);
    for cmd in ["partition", "cycles", "fate", "simulate", "cobweb", "chaos-demo"] {
        assert!(text.contains(cmd), "missing {cmd} in help");
    }
    assert!(stdout(&run(&["fate", "--help"])).contains("HYBRID_CENTERS_TOL") || {
        let root = stdout(&run(&["--help"]));
        root.contains("HYBRID_CENTERS_TOL")
    });
}

#[test]
fn path_helper_owns_tmpdir() {
    // Guards against accidentally writing artifacts into the repository.
    assert!(Path::new(env!("CARGO_TARGET_TMPDIR")).is_absolute());
}
