use std::fs;
use std::path::PathBuf;
use std::process::Command;

use mtt_workbench::format::parse_documents;
use serde_json::Value;

fn sample(name: &str) -> String {
    format!("{}/samples/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn mttwb(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mttwb")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut v = vec!["--json"];
    v.extend_from_slice(args);
    let (code, out, err) = mttwb(&v);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}")))
}

#[test]
fn eval_translates_abcd() {
    let (code, out, _) = mttwb(&["eval", "--mtt", &sample("abcd.mtt"), "--input", "#(a(a(e)))"]);
    assert_eq!(code, 0);
    assert_eq!(out, "a(a(b(b(c(c(d(d(e))))))))\n");
}

#[test]
fn eval_reads_an_input_file() {
    let f = scratch("inputs.txt");
    fs::write(&f, "#(e)\n\n#(a(e))\n").unwrap();
    let (code, v) = json(&["eval", "--mtt", &sample("abcd.mtt"), "--input-file", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    let outs: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["output"].as_str().unwrap()).collect();
    assert_eq!(outs, ["e", "a(b(c(d(e))))"]);
}

#[test]
fn check_fv_finds_the_renaming() {
    let (code, out, _) = mttwb(&["check", "fv", "--mtt", &sample("abcd.mtt")]);
    assert_eq!(code, 0);
    assert_eq!(out, "q1 1 -> 1\nq2 1 -> 2\n");
    let rho = scratch("abcd.rho");
    fs::write(&rho, out).unwrap();
    assert_eq!(mttwb(&["check", "fv", "--mtt", &sample("abcd.mtt"), "--rho", rho.to_str().unwrap()]).0, 0);
    let bad = scratch("bad.rho");
    fs::write(&bad, "q1 1 -> 1\nq2 1 -> 1\n").unwrap();
    assert_eq!(mttwb(&["check", "fv", "--mtt", &sample("abcd.mtt"), "--rho", bad.to_str().unwrap()]).0, 1);
    assert_eq!(mttwb(&["check", "fv", "--mtt", &sample("twin_args.mtt")]).0, 1);
}

#[test]
fn check_circular_reports_a_witness() {
    let (code, out, _) = mttwb(&["check", "circular", "--att", &sample("loop.att")]);
    assert_eq!(code, 1);
    assert!(out.starts_with("circular on a(e): "), "{out}");
    let (code, v) = json(&["check", "circular", "--att", &sample("loop.att")]);
    assert_eq!(code, 1);
    assert_eq!((v["check"].as_str(), v["verdict"].as_str(), v["witness"].as_str()), (Some("circular"), Some("fail"), Some("a(e)")));
    assert_eq!(mttwb(&["check", "circular", "--att", &sample("mirror.att")]).0, 0);
}

#[test]
fn static_checks() {
    let abcd = sample("abcd.mtt");
    assert_eq!(mttwb(&["check", "consistency", "--mtt", &abcd]).0, 1);
    assert_eq!(mttwb(&["check", "consistency", "--mtt", &sample("abcd_padded.mtt")]).0, 0);
    assert_eq!(mttwb(&["check", "nondeleting", "--mtt", &abcd]).0, 0);
    assert_eq!(mttwb(&["check", "nondeleting", "--mtt", &sample("deleting.mtt")]).0, 1);
    assert_eq!(mttwb(&["check", "nonerasing", "--mtt", &abcd]).0, 1);
    let imp = ["check", "importance", "--mtt", &abcd, "--state", "q0", "--symbol", "#"];
    assert_eq!(mttwb(&[&imp[..], &["--path", "1.1"]].concat()).0, 0);
    let padded = sample("abcd_padded.mtt");
    let imp = ["check", "importance", "--mtt", &padded, "--state", "q0", "--symbol", "#", "--path", "2"];
    assert_eq!(mttwb(&imp).0, 1);
    assert_eq!(mttwb(&["check", "permanent", "--mtt", &abcd, "--state", "q1", "--param", "1"]).0, 0);
}

#[test]
fn dynamic_check() {
    let (code, v) = json(&["check", "dynfv", "--mtt", &sample("twin_args.mtt"), "--bound", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "no-violation-up-to-bound");
    assert_eq!(v["bound"], 7);
    let (code, v) = json(&["check", "dynfv", "--mtt", &sample("binary_blowup.mtt"), "--bound", "4"]);
    assert_eq!(code, 1);
    assert_eq!(v["witness"]["source"], "#(a(e))");
    assert_eq!(v["witness"]["state"], "q");
}

#[test]
fn dynamic_check_with_lookaround() {
    let out = scratch("deleting_nd.txt");
    let (code, _, err) =
        mttwb(&["convert", "--to", "nondeleting", "--mtt", &sample("deleting.mtt"), "-o", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(&out).unwrap();
    let (brel, mtt) = text.split_at(text.find("\nmtt ").unwrap() + 1);
    let (b, m) = (scratch("la.brel"), scratch("core.mtt"));
    fs::write(&b, brel).unwrap();
    fs::write(&m, mtt).unwrap();
    let (code, out, _) =
        mttwb(&["check", "dynfv", "--mtt", m.to_str().unwrap(), "--bound", "6", "--lookaround", b.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    // The same two files as an explicit pipeline agree with the source.
    let input = "sigma(e,sigma(e',e))";
    let direct = mttwb(&["eval", "--mtt", &sample("deleting.mtt"), "--input", input]);
    let piped = mttwb(&["eval", "--brel", b.to_str().unwrap(), "--mtt", m.to_str().unwrap(), "--input", input]);
    assert_eq!(direct.1, piped.1);
    assert_eq!(mttwb(&["eval", "--mtt", m.to_str().unwrap(), "--brel", b.to_str().unwrap(), "--input", input]).0, 65);
}

fn convert(args: &[&str]) -> String {
    let mut v = vec!["convert"];
    v.extend_from_slice(args);
    let (code, out, err) = mttwb(&v);
    assert_eq!(code, 0, "{args:?}: {err}");
    assert!(out.starts_with("// generated by mttwb convert --to "), "{out}");
    parse_documents(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}"));
    out
}

#[test]
fn every_conversion_re_parses() {
    let abcd = sample("abcd.mtt");
    for to in ["consistent", "att", "att-direct", "nondeleting", "nonerasing", "dynfv-att"] {
        convert(&["--to", to, "--mtt", &abcd]);
    }
    for m in ["deleting", "twin_args", "binary_blowup", "abcd_padded"] {
        convert(&["--to", "nondeleting", "--mtt", &sample(&format!("{m}.mtt"))]);
    }
    for a in ["chain", "mirror", "abcd"] {
        convert(&["--to", "from-att", "--att", &sample(&format!("{a}.att"))]);
    }
    convert(&["--to", "gadget", &abcd, &abcd]);

    let dynfv = convert(&["--to", "dynfv-att", "--mtt", &sample("twin_args.mtt")]);
    assert!(dynfv.contains("// state order: q0 q1 q2 q3"));
    let (trel, att) = dynfv.split_at(dynfv.find("\natt ").unwrap() + 1);
    let (t, a) = (scratch("tw.trel"), scratch("tw.att"));
    fs::write(&t, trel.split_once("\ntrel ").map(|(_, r)| format!("trel {r}")).unwrap()).unwrap();
    fs::write(&a, att).unwrap();
    let back = convert(&["--to", "from-att", "--att", a.to_str().unwrap()]);
    let m = scratch("tw_back.mtt");
    fs::write(&m, &back).unwrap();
    let product = convert(&["--to", "product", "--trel", t.to_str().unwrap(), "--mtt", m.to_str().unwrap()]);
    let p = scratch("product.mtt");
    fs::write(&p, product).unwrap();
    let (code, out, _) = mttwb(&["difftest", p.to_str().unwrap(), &sample("twin_args.mtt"), "--bound", "6"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn conversion_errors() {
    assert_eq!(mttwb(&["convert", "--to", "att", "--mtt", &sample("twin_args.mtt")]).0, 1);
    assert_eq!(mttwb(&["convert", "--to", "att"]).0, 64);
    assert_eq!(mttwb(&["convert", "--to", "from-att", "--att", &sample("loop.att")]).0, 1);
    assert_eq!(mttwb(&["convert", "--to", "gadget", &sample("abcd.mtt")]).0, 64);
}

#[test]
fn difftest_exit_codes() {
    let abcd = sample("abcd.mtt");
    let (code, v) = json(&["difftest", &abcd, &sample("abcd_padded.mtt"), "--bound", "6"]);
    assert_eq!((code, v["outcome"].as_str()), (0, Some("equal-up-to-bound")));
    let (code, v) = json(&["difftest", &abcd, &sample("binary_blowup.mtt"), "--bound", "4"]);
    assert_eq!((code, v["outcome"].as_str()), (1, Some("counterexample")));
    assert_eq!(v["schema"], 1);
    assert_eq!(mttwb(&["difftest", &abcd, &sample("twin_args.mtt")]).0, 2);
    assert_eq!(mttwb(&["difftest", &abcd, "/nonexistent"]).0, 2);
}

#[test]
fn graph_exports_dot() {
    let (code, out, _) = mttwb(&["graph", "--att", &sample("loop.att"), "--input", "a(e)"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph"));
    assert!(out.contains("\"i@1\" -> \"s@1\";"));
    let f = scratch("g.dot");
    let (code, _, _) = mttwb(&["graph", "--att", &sample("mirror.att"), "--input-file", concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/mirror_inputs.txt"), "--dot", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(fs::read_to_string(&f).unwrap().starts_with("digraph"));
    assert_eq!(mttwb(&["graph", "--mtt", &sample("abcd.mtt"), "--input", "e"]).0, 64);
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(mttwb(&[]).0, 64);
    assert_eq!(mttwb(&["check", "fv"]).0, 64);
    assert_eq!(mttwb(&["eval", "--mtt", &sample("abcd.mtt")]).0, 64);
    assert_eq!(mttwb(&["eval", "--mtt", &sample("loop.att"), "--input", "e"]).0, 65);
    assert_eq!(mttwb(&["eval", "--att", &sample("loop.att"), "--input", "a(e)"]).0, 1);
    assert_eq!(mttwb(&["--version"]).0, 0);
}

#[test]
fn runs_are_deterministic() {
    let args = ["--json", "check", "dynfv", "--mtt", &sample("binary_blowup.mtt"), "--bound", "5"];
    let first = mttwb(&args);
    for _ in 0..3 {
        assert_eq!(mttwb(&args), first);
    }
    let conv = ["convert", "--to", "nondeleting", "--mtt", &sample("deleting.mtt")];
    assert_eq!(mttwb(&conv), mttwb(&conv));
}
