use std::process::{Command, Output};

use flint_cli::{read_csv, read_json_lines, OutputRecord};

fn flint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flint"))
        .args(args)
        .env_remove("FLINT_PRECISION_CAP")
        .output()
        .expect("binary runs")
}

fn records(args: &[&str]) -> Vec<OutputRecord> {
    let out = flint(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    read_json_lines(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

fn get<'a>(r: &'a OutputRecord, key: &str) -> &'a str {
    r.outputs.get(key).map(String::as_str).unwrap_or_else(|| panic!("missing {key} in {r:?}"))
}

#[test]
fn classify_converging_series() {
    let r = &records(&["classify", "--u", "8", "--v", "1"])[0];
    assert_eq!(get(r, "kind"), "SeriesConverges");
    assert_eq!(get(r, "theorem"), "series-converges");
    assert!(get(r, "justification").contains("7.6064 < 1 + (u-1)/v = 8"));
}

#[test]
fn classify_open_case_reports_intervals() {
    let r = &records(&["classify", "--u", "3", "--v", "2"])[0];
    assert_eq!(get(r, "kind"), "Unknown");
    assert!(get(r, "conditions").contains("SequenceToZero: mu(pi) < 2.5"));
    assert!(get(r, "conditions").contains("SequenceDiverges: mu(pi) > 2.5"));
    assert_eq!(get(r, "implied_if_sequence_converges"), "mu(pi) <= 2.5 (non-trivial)");
    assert_eq!(get(r, "implied_if_series_diverges"), "mu(pi) >= 2 (trivial)");
}

#[test]
fn classify_with_custom_bounds() {
    let r = &records(&["classify", "--u", "3", "--v", "2", "--mu-upper", "2.4"])[0];
    assert_eq!(get(r, "kind"), "SequenceToZero");
    let out = flint(&["classify", "--u", "3", "--v", "2", "--mu-lower", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spikes_below_400() {
    let rs = records(&["spikes", "--max-n", "400", "--u", "3", "--v", "2", "--threshold", "10"]);
    assert_eq!(rs.len(), 1);
    assert_eq!(get(&rs[0], "n"), "355");
    assert_eq!(get(&rs[0], "term"), "24.59818122");
    assert_eq!(get(&rs[0], "term_digits"), "10");
}

#[test]
fn sum_streams_checkpoints() {
    let rs = records(&["sum", "--max-n", "1000", "--u", "3", "--v", "2"]);
    let upto: Vec<&str> = rs.iter().map(|r| get(r, "upto_n")).collect();
    assert_eq!(upto, ["1", "10", "100", "1000"]);
    assert_eq!(get(&rs[3], "sum"), "30.1747901659");
    assert_eq!(rs[3].certified_digits, Some(12));
}

#[test]
fn scalar_commands() {
    let pi = &records(&["pi", "--digits", "20"])[0];
    assert_eq!(get(pi, "pi"), "3.1415926535897932385");
    let s = &records(&["sin", "--n", "1", "--digits", "15"])[0];
    assert_eq!(get(s, "sin"), "0.841470984807897");
    let t = &records(&["term", "--n", "2", "--u", "5/2", "--v", "1.5", "--digits", "12"])[0];
    assert_eq!(get(t, "term"), "0.203875982840");
    let w = &records(&["witness", "--convergent-index", "3"])[0];
    assert_eq!(get(w, "delta"), "3.20196");
    let d = &records(&["diag", "--convergent-index", "3", "--u", "1", "--v", "2"])[0];
    assert_eq!(get(d, "p"), "355");
    assert_eq!(get(d, "sin_one"), "0.8414709848");
    let e = &records(&["envelope", "--max-n", "1000", "--u", "3", "--v", "2", "--mu", "2", "--eps", "0.1"])[0];
    assert_eq!(get(e, "argmax"), "355");
    assert_eq!(get(e, "violations"), "1 3 22 355");
}

#[test]
fn convergents_and_history() {
    let cs = records(&["convergents", "--max-q", "120"]);
    let pq: Vec<String> = cs.iter().map(|r| format!("{}/{}", get(r, "p"), get(r, "q"))).collect();
    assert_eq!(pq, ["3/1", "22/7", "333/106", "355/113"]);
    let h = records(&["history"]);
    assert_eq!(h.len(), 5);
    assert_eq!(get(&h[0], "bound"), "30");
    assert_eq!(get(&h[4], "bound"), "7.6063");
    assert_eq!(get(&h[3], "years"), "1990-1993");
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["spikes", "--max-n", "5000", "--u", "3", "--v", "2", "--threshold", "1"];
    assert_eq!(flint(&args).stdout, flint(&args).stdout);
    let args = ["sum", "--max-n", "2000", "--u", "2.5", "--v", "1.5", "--format", "csv"];
    assert_eq!(flint(&args).stdout, flint(&args).stdout);
}

#[test]
fn csv_and_json_agree() {
    for args in [
        &["sum", "--max-n", "100", "--u", "3", "--v", "2"][..],
        &["classify", "--u", "7", "--v", "1"][..],
        &["convergents", "--count", "6"][..],
    ] {
        let json = records(args);
        let mut csv_args = args.to_vec();
        csv_args.extend(["--format", "csv"]);
        let out = flint(&csv_args);
        let csv = read_csv(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
        assert_eq!(json, csv, "{args:?}");
    }
}

#[test]
fn timing_is_opt_in() {
    assert_eq!(records(&["pi", "--digits", "5"])[0].elapsed_ms, None);
    assert!(records(&["pi", "--digits", "5", "--timing"])[0].elapsed_ms.is_some());
}

#[test]
fn exit_codes_and_streams() {
    let usage = flint(&["term", "--n", "5"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(usage.stdout.is_empty());
    assert!(!usage.stderr.is_empty());

    let bad = flint(&["term", "--n", "5", "--u", "0", "--v", "2"]);
    assert_eq!(bad.status.code(), Some(2));

    let capped = flint(&["pi", "--digits", "500", "--precision-cap", "100"]);
    assert_eq!(capped.status.code(), Some(3));
    assert!(capped.stdout.is_empty());
    assert!(String::from_utf8_lossy(&capped.stderr).contains("cap"));

    let env_capped = Command::new(env!("CARGO_BIN_EXE_flint"))
        .args(["pi", "--digits", "500"])
        .env("FLINT_PRECISION_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(env_capped.status.code(), Some(3));

    let big = flint(&["sin", "--n", "12345678901234567890123456789", "--digits", "10"]);
    assert!(big.status.success());
    assert_eq!(flint(&["--help"]).status.code(), Some(0));
}
