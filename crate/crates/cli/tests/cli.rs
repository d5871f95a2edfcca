use std::process::{Command, Output};

fn chaindet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chaindet"))
        .args(args)
        .env_remove("CENSUS_MAX_ENUM")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn count_gamma_class_both_methods() {
    let out = chaindet(&[
        "count", "--ring", "Z/8", "--n", "2", "--shape", "diagonal", "--class", "gamma^1",
        "--method", "both", "--emit", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "ring,q,e,n,shape,class,formula,oracle,applicable,match\n\
         Z/8,2,3,2,diagonal,gamma^1,8,8,true,true\n"
    );
}

#[test]
fn count_element_and_formula_only() {
    let out = chaindet(&[
        "count", "--ring", "Z/4", "--n", "2", "--shape", "circulant", "--class", "[0,1]",
        "--emit", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    // gcd(2, 2) != 1 and 2 does not divide q - 1: open, oracle only
    assert!(stdout(&out).ends_with("Z/4,2,2,2,circulant,\"[0,1]\",,0,false,false\n"));

    let out = chaindet(&[
        "count", "--ring", "F3[u]/u^1", "--n", "2", "--shape", "circulant", "--class", "zero",
        "--method", "formula", "--emit", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("circulant,zero,5,,true,false\n"));
}

#[test]
fn count_over_product() {
    let out = chaindet(&[
        "count", "--ring", "Z/4 x Z/3", "--n", "2", "--shape", "diagonal", "--class",
        "zero x zero", "--emit", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("zero x zero,40,40,true,true\n"));
}

#[test]
fn verify_grid_all_match() {
    let out = chaindet(&[
        "verify", "--rings", "Z/4,F2[u]/u^2", "--n-max", "3", "--shape", "diagonal", "--emit",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.matches("\"match\": true").count(), 18);
    assert!(!text.contains("\"match\": false"));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "verify", "--rings", "Z/9,GR(4,2),Z/4 x Z/2", "--n-max", "2", "--emit", "json",
    ];
    let a = chaindet(&args);
    let b = chaindet(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unit_coverage_holds_for_z4() {
    let out = chaindet(&["conjecture", "unit-coverage", "--ring", "Z/4", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"status\": \"consistent\""));
}

#[test]
fn counterexample_exits_3() {
    let out = chaindet(&[
        "conjecture", "unit-coverage", "--ring", "F4[u]/u^2", "--n", "2", "--emit", "csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("counterexample"));
}

#[test]
fn det_image_excludes_two() {
    let out = chaindet(&["det-image", "--ring", "Z/4", "--n", "2", "--shape", "circulant"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let missing = &text[text.find("\"missing\"").unwrap()..];
    assert!(missing.contains("\"[0,1]\""));

    let out = chaindet(&["det-image", "--ring", "Z/4", "--n", "3", "--cheap", "--emit", "csv"]);
    assert!(!stdout(&out).contains(",false\n"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(chaindet(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(chaindet(&["count", "--ring", "Z/8"]).status.code(), Some(1));
    let out = chaindet(&["count", "--ring", "Z/12", "--n", "2", "--shape", "diagonal", "--class", "unit"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a prime power"));
    let out = chaindet(&["verify", "--rings", "GR(4;2)", "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 4"));
}

#[test]
fn cap_flag_beats_env() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_chaindet"));
        cmd.args(["verify", "--rings", "Z/8", "--n", "3", "--shape", "diagonal"]);
        match env {
            Some(v) => cmd.env("CENSUS_MAX_ENUM", v),
            None => cmd.env_remove("CENSUS_MAX_ENUM"),
        };
        if let Some(v) = flag {
            cmd.args(["--max-enum", v]);
        }
        let out = cmd.output().unwrap();
        String::from_utf8(out.stdout).unwrap()
    };
    // 8^3 = 512 candidates
    assert!(run(Some("100"), None).contains("\"reason\""));
    assert!(!run(Some("100"), Some("1000")).contains("\"reason\""));
    assert!(run(None, Some("511")).contains("\"reason\""));
}

#[test]
fn table_is_formula_only() {
    let out = chaindet(&["table", "--rings", "Z/4", "--n", "2", "--shape", "circulant", "--emit", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "ring,q,e,n,shape,class,formula,oracle,applicable,match\n\
         Z/4,2,2,2,circulant,unit,,,false,false\n\
         Z/4,2,2,2,circulant,gamma^1,,,false,false\n\
         Z/4,2,2,2,circulant,zero,,,false,false\n"
    );
}
