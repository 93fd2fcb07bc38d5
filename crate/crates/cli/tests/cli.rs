use std::io::Write;
use std::process::{Command, Output};

use rigidsum::cyclotomic::Cyclotomic;
use serde_json::Value;

const A_GENERIC: [&str; 10] = [
    "--datum", "A", "--q", "5", "--chi0", "1,1", "--chi1", "3,0", "--chiinf", "2,1",
];

fn rigidsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigidsum"))
        .args(args)
        .env_remove("RIGIDSUM_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8")
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("{l}: {e}")))
        .collect()
}

fn with(base: &[&'static str], extra: &[&'static str]) -> Vec<&'static str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn first_line_echoes_configuration() {
    let o = rigidsum(&["kloosterman", "--q", "7", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    let cfg = &lines[0]["config"];
    assert_eq!(cfg["command"], "kloosterman");
    assert_eq!(cfg["q"], "7");
    assert_eq!(cfg["generator"], "[3]");
    assert_eq!(lines.len(), 7);
    for p in &lines[1..] {
        assert_eq!(p["within_bound"], true);
    }

    let h = rigidsum(&["kloosterman", "--q", "3^2", "--format", "human"]);
    let first = stdout(&h).lines().next().unwrap().to_string();
    assert!(first.starts_with("# rigidsum kloosterman"), "{first}");
    assert!(first.contains("generator=[") && first.contains("q=3^2"), "{first}");
}

#[test]
fn kloosterman_real_and_rational_at_prime() {
    // Kl_2 over F_3 at x = 1 is -1.
    let o = rigidsum(&["kloosterman", "--q", "3", "--n", "2"]);
    let lines = json_lines(&o);
    let one = lines.iter().find(|l| l["x"] == 1).unwrap();
    assert!((one["float"]["re"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!(one["float"]["im"].as_f64().unwrap().abs() < 1e-12);
    for method in ["naive", "dft"] {
        let other = rigidsum(&["kloosterman", "--q", "7", "--n", "3", "--method", method]);
        let base = rigidsum(&["kloosterman", "--q", "7", "--n", "3"]);
        // Convolution may land in a larger cyclotomic field; compare as numbers.
        let vals = |o: &Output| {
            json_lines(o)[1..]
                .iter()
                .map(|l| Cyclotomic::from_json(&l["exact"].to_string()).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(vals(&other), vals(&base), "{method}");
    }
}

#[test]
fn csv_columns_and_rows() {
    let o = rigidsum(&["hypergeom", "--q", "7", "--chis", "1,2", "--rhos", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# rigidsum hypergeom"));
    assert_eq!(lines.next().unwrap(), "datum,q,x,value,float_re,float_im");
    let body = lines.collect::<Vec<_>>().join("\n");
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(body.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(&r[1], "7");
        assert_eq!(r[2].parse::<usize>().unwrap(), i + 1);
        assert!(r[3].starts_with("cyc("));
        r[4].parse::<f64>().unwrap();
        r[5].parse::<f64>().unwrap();
    }
}

#[test]
fn csv_refused_for_structured_commands() {
    let o = rigidsum(&["weil-scan", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identity_holds_and_perturbation_fails_with_witness() {
    let ok = rigidsum(&with(&["verify-identity"], &A_GENERIC));
    assert_eq!(ok.status.code(), Some(0));
    let rec = &json_lines(&ok)[1];
    assert_eq!(rec["holds"], true);
    assert_eq!(rec["generic"], true);

    let bad = rigidsum(&with(&with(&["verify-identity"], &A_GENERIC), &["--perturb-constant"]));
    assert_eq!(bad.status.code(), Some(1));
    let rec = &json_lines(&bad)[1];
    assert_eq!(rec["holds"], false);
    let x = rec["witness"].as_u64().expect("witness");
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.contains("q=5") && err.contains("chi0=1,1") && err.contains(&format!("x=[{x}]")), "{err}");
}

#[test]
fn identity_for_b_and_c() {
    let b = rigidsum(&["verify-identity", "--datum", "B", "--q", "7", "--chi0", "1,0", "--phi", "2,3"]);
    assert_eq!(b.status.code(), Some(0), "{}", String::from_utf8_lossy(&b.stderr));
    let c = rigidsum(&[
        "verify-identity", "--datum", "C", "--q", "3^2", "--chi0", "1,0", "--chiinf", "2,0", "--phi", "[0,1],[1,1]",
    ]);
    assert_eq!(c.status.code(), Some(0), "{}", String::from_utf8_lossy(&c.stderr));
}

#[test]
fn nontrivial_character_at_one_needs_experimental_flag() {
    let args = ["verify-identity", "--datum", "A", "--q", "5", "--chi0", "1,1", "--chi1", "3,2", "--chiinf", "2,1"];
    assert_eq!(rigidsum(&args).status.code(), Some(2));
    let o = rigidsum(&with(&args, &["--experimental-kummer"]));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_lines(&o)[1]["experimental"], "kummer-twist");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["verify-identity", "--datum", "A", "--q", "5", "--bogus"],
        vec!["kloosterman", "--q", "6"],
        vec!["kloosterman"],
        vec!["verify-identity", "--datum", "B", "--q", "5"],
        vec!["parahoric-dim", "--type", "Z9", "--parahoric", "iwahori"],
        vec!["suite", "--only", "11"],
        vec!["nonsense"],
    ] {
        let o = rigidsum(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.len() < 400, "{args:?}");
    }
    assert_eq!(rigidsum(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# generic datum A\ndatum = A\nq = 7\nchi0=1,1\nchi1=3,0\nchiinf=2,1").unwrap();
    let path = f.path().to_str().unwrap().to_string();
    let path = path.as_str();
    let from_file = rigidsum(&["verify-identity", "--config", path]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(json_lines(&from_file)[0]["config"]["q"], "7");

    let overridden = rigidsum(&["verify-identity", "--config", path, "--q", "5"]);
    assert_eq!(json_lines(&overridden)[0]["config"]["q"], "5");
    let plain = rigidsum(&with(&["verify-identity"], &A_GENERIC));
    assert_eq!(overridden.stdout, plain.stdout);

    writeln!(f, "perturb-constant = true").unwrap();
    assert_eq!(rigidsum(&["verify-identity", "--config", path]).status.code(), Some(1));

    let mut broken = tempfile::NamedTempFile::new().unwrap();
    writeln!(broken, "no equals sign").unwrap();
    let o = rigidsum(&["verify-identity", "--config", broken.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        vec!["kloosterman", "--q", "3^2", "--n", "3", "--format", "csv"],
        with(&["enumerate-relevant"], &A_GENERIC),
        vec!["suite", "--qmax", "5", "--only", "1,4,10", "--cases", "50"],
    ] {
        let a = rigidsum(&args);
        let b = rigidsum(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        // Timings vary; everything else must not.
        let strip = |o: &Output| {
            json_lines(o)
                .into_iter()
                .map(|mut v| {
                    if let Some(o) = v.as_object_mut() {
                        o.remove("seconds");
                    }
                    v
                })
                .collect::<Vec<_>>()
        };
        if args[0] == "suite" {
            assert_eq!(strip(&a), strip(&b));
        } else {
            assert_eq!(a.stdout, b.stdout, "{args:?}");
        }
    }
}

#[test]
fn eigen_trace_and_hecke_oracle_agree() {
    let args = ["--datum", "B", "--q", "3", "--chi0", "1,0", "--phi", "1,1"];
    let e = rigidsum(&with(&["eigen-trace"], &args));
    let h = rigidsum(&with(&["hecke-oracle"], &args));
    assert_eq!(h.status.code(), Some(0));
    let values = |o: &Output| json_lines(o)[1..].iter().map(|l| l["value"].clone()).collect::<Vec<_>>();
    assert_eq!(values(&e), values(&h));
    assert!(json_lines(&h)[1..].iter().all(|l| l["matches_eigen_trace"] == true));

    let capped = Command::new(env!("CARGO_BIN_EXE_rigidsum"))
        .args(with(&["hecke-oracle"], &args))
        .env("RIGIDSUM_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(2));
}

#[test]
fn rigidity_check_shape() {
    let o = rigidsum(&[
        "rigidity-check", "--genus", "0", "--points", "tame:2,tame-pr:2,tame:2", "--dimad", "3", "--h0", "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rec = &json_lines(&o)[1];
    let pts = rec["per_point"].as_array().unwrap();
    assert_eq!(pts.len(), 3);
    for p in pts {
        assert_eq!(p["a_adj"], 2);
        assert_eq!(p["sw"], 0);
        assert!(p.get("a_std").is_some());
    }
    assert_eq!(rec["index"], 0);
    assert_eq!(rec["rigid"], true);

    let b = rigidsum(&["rigidity-check", "--datum", "B"]);
    let rec = &json_lines(&b)[1];
    let inf = &rec["per_point"][1];
    assert_eq!((inf["sw"].as_i64(), inf["a_std"].as_i64(), inf["a_adj"].as_i64()), (Some(1), Some(3), Some(4)));
    assert_eq!(rec["index"], 0);

    let d = rigidsum(&[
        "rigidity-check", "--descriptor", "0=tame(1/3,2/3)", "--descriptor", "inf=wild(1/2x2;induced)",
    ]);
    assert_eq!(json_lines(&d)[1], *rec);
}

#[test]
fn non_rigid_data_reported() {
    let o = rigidsum(&["rigidity-check", "--points", "tame,tame,tame,tame"]);
    assert_eq!(o.status.code(), Some(0));
    let rec = &json_lines(&o)[1];
    assert_eq!(rec["rigid"], false);
}

#[test]
fn parahoric_and_conjecture_reports() {
    let o = rigidsum(&["parahoric-dim", "--type", "E8", "--parahoric", "iwahori-plus"]);
    assert_eq!(o.status.code(), Some(0));
    let rec = &json_lines(&o)[1];
    assert_eq!(rec["points"][0]["d"], 2 * (120 + 8));
    assert_eq!(rec["dim"], 248);

    let g2 = rigidsum(&["conjecture-check", "--case", "kloosterman", "--type", "G2"]);
    assert_eq!(g2.status.code(), Some(0));
    let rec = &json_lines(&g2)[1];
    assert_eq!(rec["match"], true);
    for p in rec["points"].as_array().unwrap() {
        assert_eq!(p["d"], p["a"]);
    }
    assert_eq!(rigidsum(&["conjecture-check", "--case", "all"]).status.code(), Some(0));
}

#[test]
fn enumerate_relevant_shape() {
    let o = rigidsum(&with(
        &with(&["enumerate-relevant"], &A_GENERIC),
        &["--dmin", "0", "--dmax", "3", "--split-cap", "4"],
    ));
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    assert_eq!(lines.len(), 5);
    for (d, rec) in (0..=3).zip(&lines[1..]) {
        assert_eq!(rec["d"], d);
        assert_eq!(rec["generic"], true);
        let rel = rec["relevant"].as_array().unwrap();
        assert_eq!(rel.len(), 1);
        assert!(rel[0]["splitting"].is_array());
        assert!(rel[0].get("level").is_some());
        assert!(rel[0].get("aut_order").is_some());
    }
}

#[test]
fn weil_scan_passes() {
    let o = rigidsum(&["weil-scan", "--n", "2", "--qmax", "101"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = json_lines(&o);
    assert_eq!(rows.len(), 1 + 26);
    let powers = rigidsum(&["weil-scan", "--n", "3", "--qmax", "27", "--powers"]);
    let qs: Vec<u64> = json_lines(&powers)[1..].iter().map(|r| r["q"].as_u64().unwrap()).collect();
    assert!(qs.contains(&8) && qs.contains(&9) && qs.contains(&27));
}

#[test]
fn suite_small_run_passes() {
    let o = rigidsum(&["suite", "--qmax", "7", "--format", "human"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10, "{text}");
}
