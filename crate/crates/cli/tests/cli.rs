use std::process::{Command, Output};

fn symdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symdisc"))
        .args(args)
        .env_remove("SYMDISC_SIZE_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("valid json")
}

#[test]
fn l2_sym_base2_hand_value() {
    let out = symdisc(&["l2", "--b", "2", "--n", "1", "--sigma", "id", "--word", "s", "--what", "sym", "--method", "warnock"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "(2b^n L2)^2 = 137/72 ≈ 1.902778\n");
}

#[test]
fn l2_methods_agree() {
    for (what, word, sigma) in [("sym", "scs", "id"), ("scrambled", "csc", "(0,1)"), ("sym", "ccs", "(0,1)")] {
        let b = if sigma == "id" { "3" } else { "4" };
        let values: Vec<String> = ["warnock", "faure", "closed"]
            .iter()
            .map(|m| {
                let out = symdisc(&["l2", "--b", b, "--word", word, "--sigma", sigma, "--what", what, "--method", m, "--format", "json"]);
                assert!(out.status.success(), "{m}: {}", String::from_utf8_lossy(&out.stderr));
                json(&out)["value"].as_str().unwrap().to_string()
            })
            .collect();
        assert!(values.windows(2).all(|w| w[0] == w[1]), "{what} {word} {sigma}: {values:?}");
    }
}

#[test]
fn scrambled_label_uses_b_pow_n() {
    let out = symdisc(&["l2", "--b", "2", "--n", "1", "--what", "scrambled"]);
    assert_eq!(stdout(&out), "(b^n L2)^2 = 91/144 ≈ 0.631944\n");
}

#[test]
fn constant_definition_base3() {
    let out = symdisc(&["constant", "--b", "3", "--sigma", "id", "--method", "def"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["c"], "5/81");
    assert_eq!(v["leading"], "0.237039");
    assert_eq!(v["method"], "def");
    assert_eq!(v["oracle_checked"], true);
}

#[test]
fn constant_json_field_order_is_fixed() {
    let out = symdisc(&["constant", "--b", "11", "--sigma", "(0,2)(1,4)"]);
    assert_eq!(
        stdout(&out),
        "{\"b\":11,\"sigma\":\"[2,4,0,3,1,5,9,7,10,6,8]\",\"c\":\"415/3993\",\"approx\":\"0.103932\",\
         \"leading\":\"0.208189\",\"method\":\"closed\",\"oracle_checked\":true}\n"
    );
}

#[test]
fn constant_phi_dump() {
    let out = symdisc(&["constant", "--b", "3", "--phi", "sum"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["phi"], "sum");
    assert!(v["value"].as_str().unwrap().contains('/'));
}

#[test]
fn id_formula_rejects_other_permutations() {
    let out = symdisc(&["constant", "--b", "4", "--sigma", "(0,1)", "--method", "id-formula"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn search_base4_full() {
    let out = symdisc(&["search", "--b", "4", "--mode", "full", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v[0]["min_c"], "1/12");
    assert_eq!(v[0]["g"], 2);
}

#[test]
fn search_csv_matches_published_columns() {
    let dir = std::env::temp_dir().join(format!("symdisc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.csv");
    // g = 2 at b = 12: the first minimizer in lexicographic order is not the printed one
    let out = symdisc(&["search", "--b", "11..13", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let expected = "b,sigma_cycles,g,c_num,c_den,leading_6dp\n\
                    11,\"(0,2)(1,4)\",1,415,3993,0.208189\n\
                    12,\"(0,2)(1,4)(3,5)\",2,35,324,0.208500\n\
                    13,\"(0,2)(1,5)(3,4)\",1,55,507,0.205654\n";
    assert_eq!(stdout(&out), expected);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), expected);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn search_is_deterministic() {
    let args = ["search", "--b", "9..10", "--mode", "sample", "--samples", "50", "--seed", "7", "--format", "json"];
    assert_eq!(stdout(&symdisc(&args)), stdout(&symdisc(&args)));
}

#[test]
fn verify_mode_leaves_g_empty() {
    let out = symdisc(&["search", "--b", "26", "--mode", "verify", "--sigma", "(0,7,12,5)(1,2,11,10)(3,4,9,8)", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().nth(1), Some("26,\"(0,7,12,5)(1,2,11,10)(3,4,9,8)\",,2263,17576,0.198792"));
}

#[test]
fn long_runs_need_the_flag() {
    let out = symdisc(&["search", "--b", "24"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--allow-long"));
}

#[test]
fn pointset_formats() {
    let csv = symdisc(&["pointset", "--b", "2", "--n", "1", "--what", "scrambled"]);
    assert_eq!(stdout(&csv), "x_num,x_den,y_num,y_den\n0,1,0,1\n1,2,1,2\n");
    let v = json(&symdisc(&["pointset", "--b", "3", "--n", "2", "--format", "json"]));
    assert_eq!(v.as_array().unwrap().len(), 18);
}

#[test]
fn size_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_symdisc"))
        .args(["pointset", "--b", "3", "--n", "3"])
        .env("SYMDISC_SIZE_CAP", "9")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(symdisc(&["bogus"]).status.code(), Some(2));
    assert_eq!(symdisc(&["l2", "--b", "2", "--n", "3", "--word", "ss"]).status.code(), Some(2));
    assert_eq!(symdisc(&["l2", "--b", "2", "--word", "sx"]).status.code(), Some(2));
    assert_eq!(symdisc(&["l2", "--b", "2", "--n", "1", "--frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_single_suite() {
    let out = symdisc(&["verify", "--suite", "9"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("criterion  9 [PASS]"));
}

#[test]
fn verify_reports_the_misprinted_row() {
    let out = symdisc(&["verify", "--suite", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("2263/17576"));
}
