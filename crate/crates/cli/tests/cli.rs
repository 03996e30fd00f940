use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn linelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linelab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn capacity_example() {
    let v = json(&linelab(&["capacity", "--length", "10", "--k-limits", "1,3,2"]));
    assert_eq!(v, serde_json::json!({"capacity": 565, "eq_base": 23.77}));
}

#[test]
fn large_capacity_is_an_integer() {
    let v = json(&linelab(&["capacity", "--length", "40"]));
    assert!(v["capacity"].is_u64());
}

#[test]
fn maps_example() {
    let v = json(&linelab(&["maps", "--length", "5", "--k-limits", "1,3,2"]));
    assert_eq!(v["bcm"][1], serde_json::json!([14, 0, 0, 7]));
    assert_eq!(v["capacity"], 21);
}

#[test]
fn out_of_range_index_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let idx = dir.path().join("idx.txt");
    fs::write(&idx, "21\n").unwrap();
    let out = linelab(&["encode", "--length", "5", "--k-limits", "1,3,2", "--indices", idx.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("IndexOutOfRange"));
}

#[test]
fn usage_error_exits_2() {
    assert_eq!(linelab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(linelab(&["align", "--depth", "7"]).status.code(), Some(2));
}

#[test]
fn round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_owned();
    let input: String = (0..500).map(|i| format!("{}\n", (i * 7 + 3) % 21)).collect();
    fs::write(p("idx"), &input).unwrap();
    let steps: [&[&str]; 4] = [
        &["encode", "--indices", &p("idx"), "-o", &p("plain")],
        &["scramble", "--lfsr-seed", "1234", "--anchor", "2,5", "--letters", &p("plain"), "-o", &p("cipher")],
        &["descramble", "--lfsr-seed", "1234", "--anchor", "2,5", "--letters", &p("cipher"), "-o", &p("back")],
        &["decode", "--letters", &p("back"), "-o", &p("out")],
    ];
    for args in steps {
        let o = linelab(args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_ne!(fs::read(p("plain")).unwrap(), fs::read(p("cipher")).unwrap());
    assert_eq!(fs::read(p("out")).unwrap(), input.as_bytes());
}

#[test]
fn maps_file_feeds_encode() {
    let dir = tempfile::tempdir().unwrap();
    let maps = dir.path().join("m.json");
    let o = linelab(&["maps", "--length", "10"]);
    fs::write(&maps, &o.stdout).unwrap();
    let idx = dir.path().join("i");
    fs::write(&idx, "564 0\n").unwrap();
    let o = linelab(&["encode", "--maps", maps.to_str().unwrap(), "--indices", idx.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).split_whitespace().count(), 2);

    let mut doc: Value = serde_json::from_slice(&fs::read(&maps).unwrap()).unwrap();
    doc["bfm"][3][0] = 999.into();
    fs::write(&maps, doc.to_string()).unwrap();
    let o = linelab(&["capacity", "--maps", maps.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn balance_finds_the_example_set() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("delta.json");
    fs::write(
        &t,
        r#"{"rows":[[0,0,5,0],[3,0,0,2],[3,2,0,0],[4,1,0,0],[4,0,1,0],[4,1,0,0]],"total":5}"#,
    )
    .unwrap();
    let v = json(&linelab(&["balance", "--target-delta", t.to_str().unwrap(), "--limit", "5"]));
    assert!(v["found"].as_u64().unwrap() >= 1);
    let prof = v["sets"][0]["profile"].as_array().unwrap();
    assert!((prof[0].as_f64().unwrap() - 0.69).abs() < 0.005);
}

#[test]
fn align_recovers_offset() {
    let dir = tempfile::tempdir().unwrap();
    let idx = dir.path().join("i");
    let input: String = (0..2000u64).map(|i| format!("{} ", (i * 2654435761) % 21)).collect();
    fs::write(&idx, input).unwrap();
    let o = linelab(&["encode", "--indices", idx.to_str().unwrap()]);
    let letters: String = String::from_utf8(o.stdout).unwrap().split_whitespace().collect();
    let s = dir.path().join("s");
    fs::write(&s, &letters[2..letters.len() - 3]).unwrap();
    let v = json(&linelab(&["align", "--letters", s.to_str().unwrap(), "--variant", "JJ"]));
    assert_eq!(v["offset"], 3);
    assert!(v["contrast"]["linear_delta"].as_f64().unwrap() > 20.0);
}

#[test]
fn experiment_drivers_are_deterministic() {
    let a = linelab(&["link-sim", "--trials", "5", "--payload-words", "8", "--seed", "42"]);
    let b = linelab(&["link-sim", "--trials", "5", "--payload-words", "8", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["reached_normal"], 5);
    assert_eq!(v["post_sync_errors"], 0);

    assert_eq!(json(&linelab(&["rng-period"]))["period"], 2047);
    assert_eq!(json(&linelab(&["rng-period", "--modulus", "3"]))["period"], 3280);
    let v = json(&linelab(&["spaces", "--n", "21"]));
    assert_eq!(v["candidates"][0]["value"], 20);
    let v = json(&linelab(&["stats"]));
    assert_eq!(v["j_counts"], serde_json::json!([14, 14, 12, 12, 12]));
}
