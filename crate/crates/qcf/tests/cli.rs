use qcf::cli::run;
use qcf_core::{FieldId, ProjPoint};
use serde_json::Value;

fn qcf(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qcf").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--emit", "json"]);
    let (code, out, err) = qcf(&a);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qcf(&[]).0, 2);
    assert_eq!(qcf(&["frobnicate"]).0, 2);
    assert_eq!(qcf(&["validate", "7_7"]).0, 2);
    assert_eq!(qcf(&["orbit", "--case", "3_4", "--point", "1/0"]).0, 2);
    assert_eq!(qcf(&["orbit", "--case", "3_4", "--point", "-1"]).0, 2);
    assert_eq!(qcf(&["esets", "--case", "4_6", "--word", "16"]).0, 2);
    assert_eq!(qcf(&["blocks", "verify", "--case", "2_5", "--variant", "coarse"]).0, 2);
    assert_eq!(qcf(&["fixed-point-demo", "--case", "2_5"]).0, 2);
    assert_eq!(qcf(&["validate", "2_5", "--emit", "xml"]).0, 2);
    assert_eq!(qcf(&["fixed-point-demo", "--emit", "csv"]).0, 2);
    assert_eq!(qcf(&["--help"]).0, 0);
}

#[test]
fn list_and_validate() {
    let v = json(&["list-cases"]);
    assert_eq!(v["result"].as_array().unwrap().len(), 10);
    let v = json(&["validate", "4_6"]);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["result"]["matrices"].as_array().unwrap().len(), 15);
    let e1 = qcf::format::point_from_json(&v["result"]["endpoints"][1], FieldId::Sqrt6).unwrap();
    assert_eq!(e1, ProjPoint::parse("5 - 2*sqrt6", FieldId::Sqrt6).unwrap());
    assert_eq!(json(&["build", "--case", "2_7_cubic", "--validate"])["status"], "ok");
}

#[test]
fn orbit_csv_ends_with_marker() {
    let p = "17872569142100116747518989441504411/5689015449433817447221222422292025";
    let (code, out, _) = qcf(&["orbit", "--case", "3_4", "--point", p, "--emit", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "step,digit,point,log_height");
    assert_eq!(lines.len(), 1 + 656 + 1);
    assert_eq!(*lines.last().unwrap(), "# end: status=fixed-point-reached steps=656 final=inf");
    let (code, out, _) = qcf(&["--max-steps", "10", "orbit", "--case", "3_4", "--point", p, "--emit", "csv"]);
    assert_eq!(code, 0);
    assert!(out.contains("# end: status=step-budget-exhausted steps=10 final="), "{out}");
}

#[test]
fn esets_and_height() {
    let v = json(&["esets", "--case", "4_6", "--word", "9"]);
    assert_eq!(v["result"]["esharp"][0]["text"], "[0, inf]");
    let v = json(&["esets", "--case", "4_6", "--word", "13", "--samples", "20", "--seed", "3"]);
    assert!(v["result"]["esharp"].as_array().unwrap().is_empty());
    assert_eq!(v["result"]["t_decimal"], "6.449490");
    let v = json(&["height", "--case", "4_6", "--point", "(703-240*sqrt6)/380", "--word", "13"]);
    assert_eq!(v["result"][0]["height"], "700.380942");
    assert_eq!(v["result"][1]["height"], "422.679548");
}

#[test]
fn blocks_commands() {
    assert_eq!(qcf(&["blocks", "verify", "--case", "3_4"]).0, 0);
    assert_eq!(qcf(&["blocks", "complete", "--case", "3_6"]).0, 0);
    let (code, out, _) = qcf(&["blocks", "complete", "--case", "3_6", "--variant", "literal"]);
    assert_eq!(code, 1);
    assert!(out.contains("uncovered: 4,1 (1)^w"), "{out}");
    let v = json(&["blocks", "split", "--case", "2_5", "--samples", "10", "--seed", "1"]);
    assert_eq!(v["result"]["violations"], 0);
}

#[test]
fn family_file() {
    let dir = std::env::temp_dir().join(format!("qcf-fam-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.txt");
    std::fs::write(&good, "# the (2,5) family\n!{4} 4* !{4}\n").unwrap();
    let path = good.to_str().unwrap();
    assert_eq!(qcf(&["blocks", "verify", "--case", "2_5", "--family-file", path]).0, 0);
    assert_eq!(qcf(&["blocks", "complete", "--case", "2_5", "--family-file", path]).0, 0);
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "1 1\n").unwrap();
    assert_eq!(qcf(&["blocks", "complete", "--case", "2_5", "--family-file", bad.to_str().unwrap()]).0, 1);
    std::fs::write(&bad, "1 {\n").unwrap();
    assert_eq!(qcf(&["blocks", "verify", "--case", "2_5", "--family-file", bad.to_str().unwrap()]).0, 2);
    let missing = dir.join("missing.txt");
    assert_eq!(qcf(&["blocks", "verify", "--case", "2_5", "--family-file", missing.to_str().unwrap()]).0, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn plot_and_demo() {
    let (code, out, _) = qcf(&["plot-f", "--case", "4_6", "--word", "13", "--emit", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 401);
    assert!(out.starts_with("x,f_phi,t\n0.000000,"));
    let v = json(&["fixed-point-demo"]);
    assert_eq!(v["result"]["hyperbolic"], true);
    assert_eq!(v["result"]["fixed"], true);
}

#[test]
fn first_return_descends() {
    let v = json(&["first-return", "--case", "2_5", "--point", "tau/2"]);
    assert_eq!(v["result"]["status"], "returned");
    assert_eq!(v["result"]["height_change"], "decrease");
}
