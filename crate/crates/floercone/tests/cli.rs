//! CLI integration: exit codes, table contents, machine-format determinism,
//! and the data-directory override (exercised through the real binary).

use std::process::Command;

use floercone::cli;

fn run(args: &[&str]) -> (i32, String) {
    let argv: Vec<String> = std::iter::once("floercone".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    cli::run(argv)
}

#[test]
fn hf_surgery_table_has_one_row_per_spinc_summing_to_n() {
    let (code, out) = run(&["hf-surgery", "--knot", "trefoil_rh", "--n", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("total dimension: 3"), "{out}");
    let rows = out
        .lines()
        .filter(|l| l.starts_with(['0', '1', '2']))
        .count();
    assert_eq!(rows, 3, "{out}");
}

#[test]
fn certify_machine_output_contains_expansion_and_grading() {
    let (code, out) = run(&[
        "certify", "--genus", "2", "--r", "7/5", "--format", "machine",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("[-2,-2,-3]"), "{out}");
    assert!(out.contains("\"loss_alexander\":\"5/4\""), "{out}");
    let parsed: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(parsed["certificate"]["spinc_label"], 1);
}

#[test]
fn validate_rejects_a_broken_file_naming_the_pair() {
    let dir = std::env::temp_dir();
    let path = dir.join("floercone_cli_test_nonsense.kfc");
    std::fs::write(
        &path,
        "knot nonsense genus 0\n\
         gen a A=0 M=1\n\
         gen b A=0 M=0\n\
         gen c A=0 M=-1\n\
         d a -> U^0 b\n\
         d b -> U^0 c\n",
    )
    .unwrap();
    let (code, out) = run(&["validate", "--file", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("square"), "{out}");
    assert!(out.contains('a') && out.contains('c'), "{out}");
}

#[test]
fn validate_accepts_bundled_data() {
    for name in ["unknot", "trefoil_rh", "t34_rh"] {
        let (code, out) = run(&["validate", "--knot", name]);
        assert_eq!(code, 0, "{name}: {out}");
        assert!(out.contains("valid"), "{out}");
    }
}

#[test]
fn machine_output_is_byte_identical_across_runs() {
    let args = [
        "dual-knot", "--knot", "figure_eight", "--n", "2", "--flavor", "minus", "--format",
        "machine",
    ];
    let (c1, o1) = run(&args);
    let (c2, o2) = run(&args);
    assert_eq!(c1, 0, "{o1}");
    assert_eq!(c2, 0);
    assert_eq!(o1, o2);
}

#[test]
fn usage_errors_exit_two() {
    let (code, _) = run(&["hf-surgery", "--knot", "trefoil_rh"]); // missing --n
    assert_eq!(code, 2);
    let (code, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["hf-surgery", "--knot", "a", "--file", "b", "--n", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn domain_errors_exit_one() {
    let (code, out) = run(&["hf-surgery", "--knot", "granny", "--n", "2"]);
    assert_eq!(code, 1);
    assert!(out.contains("unknown knot"), "{out}");

    let (code, out) = run(&["top-grading", "--knot", "unknot", "--n", "2"]);
    assert_eq!(code, 1);
    assert!(out.contains("genus"), "{out}");

    let (code, out) = run(&["plan", "--r", "0.5"]);
    assert_eq!(code, 1);
    assert!(out.contains("malformed rational"), "{out}");

    let (code, out) = run(&["certify", "--genus", "1", "--r", "0"]);
    assert_eq!(code, 1);
    assert!(out.contains("tight"), "{out}");
}

#[test]
fn plan_machine_golden() {
    let (code, out) = run(&["plan", "--r", "3", "--format", "machine"]);
    assert_eq!(code, 0);
    assert_eq!(
        out.trim(),
        r#"{"command":"plan","plan":{"cf_expansion":[-2,-2],"chain":[{"contact_coefficient":-1,"stabilizations":1},{"contact_coefficient":-1,"stabilizations":0}],"contact_coefficient":"3","degenerate":false,"pushoff_plus_count":1}}"#
    );
}

#[test]
fn list_knots_enumerates_bundled_entries() {
    let (code, out) = run(&["list-knots", "--format", "machine"]);
    assert_eq!(code, 0);
    let parsed: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    let names: Vec<&str> = parsed["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        vec![
            "unknot",
            "trefoil_rh",
            "trefoil_lh",
            "figure_eight",
            "t25_rh",
            "t34_rh",
            "thin_52"
        ]
    );
}

#[test]
fn check_injectivity_and_top_grading_verbs() {
    let (code, out) = run(&[
        "check-injectivity", "--knot", "figure_eight", "--n", "2", "--format", "machine",
    ]);
    assert_eq!(code, 0, "{out}");
    let parsed: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(parsed["injective"], true);
    assert_eq!(parsed["top_alexander"], "3/4");

    let (code, out) = run(&["top-grading", "--knot", "t25_rh", "--n", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("1"), "{out}");
}

#[test]
fn data_dir_override_via_subprocess() {
    // run the real binary with FLOERCONE_DATA_DIR pointing at a directory
    // holding a modified unknot file; the override must take effect
    let dir = std::env::temp_dir().join("floercone_data_override_test");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(
        dir.join("unknot.kfc"),
        "knot unknot_override genus 0\ngen u A=0 M=0\nflip u -> u\n",
    )
    .unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_floercone"))
        .args(["validate", "--knot", "unknot", "--format", "machine"])
        .env("FLOERCONE_DATA_DIR", &dir)
        .output()
        .unwrap();
    std::fs::remove_dir_all(&dir).ok();
    assert!(output.status.success());
    let parsed: serde_json::Value =
        serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(parsed["name"], "unknot_override");
}
