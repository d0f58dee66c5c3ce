use std::io::Write;
use std::process::{Command, Stdio};

fn losc(args: &[&str], stdin: Option<&str>) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_losc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(s) = stdin {
        child.stdin.take().unwrap().write_all(s.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn temp_file(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("losc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn order_cmp_identity_below_generator() {
    let (code, out, _) = losc(&["order", "cmp", "--spec", "a b", "--lhs", "1", "--rhs", "a"], None);
    assert_eq!(code, 0);
    assert!(out.starts_with("verdict: lhs <= rhs"));
    let (code, out, _) = losc(&["order", "cmp", "--spec", "a b", "--lhs", "a", "--rhs", "1"], None);
    assert_eq!(code, 0);
    assert!(out.starts_with("verdict: lhs > rhs"));
}

#[test]
fn order_cmp_conjugate() {
    // 1 <^b b a b^-1 reads as 1 < b (b a b^-1) b^-1 under the base order.
    let (_, doc, _) =
        losc(&["--format", "doc", "order", "cmp", "--spec", "a b", "--lhs", "1", "--rhs", "a", "--conj", "b"], None);
    let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
    assert_eq!(v["difference"], "b a b^-1");
}

#[test]
fn short_relator_fails_check() {
    let p = temp_file("bad.pres", "generators: a b\nrelator: a b a^-1 b^-1\n");
    let (code, out, _) = losc(&["check-c16", "--input", p.to_str().unwrap()], None);
    assert_eq!(code, 1);
    assert!(out.contains("witness"));
}

#[test]
fn generated_perfect_group_is_perfect() {
    let (code, gen, _) = losc(&["gen", "perfect", "--seed", "7"], None);
    assert_eq!(code, 0);
    let (code, out, _) = losc(&["abelianize", "--stdin"], Some(&gen));
    assert_eq!(code, 0);
    assert!(out.contains("factors: none, free rank 0"));
    let (code, _, _) = losc(&["check-c16", "--stdin"], Some(&gen));
    assert_eq!(code, 0);
    let (code, out, _) = losc(&["dehn", "--stdin", "--word", "a b a^-1 b^-1"], Some(&gen));
    assert_eq!(code, 0);
    assert!(out.contains("nontrivial"));
}

#[test]
fn gen_is_deterministic_and_doc_output_pipes() {
    let a = losc(&["gen", "perfect", "--seed", "3", "--family", "21,22"], None).1;
    let b = losc(&["gen", "perfect", "--seed", "3", "--family", "21,22"], None).1;
    assert_eq!(a, b);
    let doc = losc(&["--format", "doc", "gen", "bowditch", "--indices", "21,22,23"], None).1;
    let (code, out, _) = losc(&["check-c16", "--stdin"], Some(&doc));
    assert_eq!(code, 0, "{out}");
}

#[test]
fn rips_pipeline() {
    let q = temp_file("q.pres", "generators: x1\n");
    let (code, gen, _) = losc(&["gen", "rips", "--input", q.to_str().unwrap(), "--seed", "1"], None);
    assert_eq!(code, 0);
    assert!(gen.contains("\"g_generators\":12"));
    let (code, _, _) = losc(&["check-c16", "--stdin"], Some(&gen));
    assert_eq!(code, 0);
    let (code, out, _) = losc(&["abelianize", "--stdin"], Some(&gen));
    assert_eq!(code, 0);
    // G / N is Q = Z, and G's abelianisation surjects onto it.
    assert!(out.contains("free rank"));
    let args = ["compat", "verify", "--stdin", "--radius", "1", "--samples", "20", "--threads", "2"];
    let (code, out, err) = losc(&args, Some(&gen));
    assert_eq!(code, 0, "{out}{err}");
    let one = losc(&["--threads", "1", "compat", "verify", "--stdin", "--radius", "1", "--samples", "20"], Some(&gen)).1;
    assert_eq!(out, one);
}

#[test]
fn cantor_adds_a_generator() {
    let gen = losc(&["gen", "bowditch", "--indices", "21"], None).1;
    let (code, out, _) = losc(&["gen", "cantor", "--stdin", "--name", "z"], Some(&gen));
    assert_eq!(code, 0);
    assert!(out.starts_with("generators: a1 a2 b1 b2 z\n"));
    let (_, ab, _) = losc(&["abelianize", "--stdin"], Some(&out));
    assert!(ab.contains("free rank 4"), "{ab}");
}

#[test]
fn compat_verify_perfect() {
    let gen = losc(&["gen", "perfect", "--seed", "2"], None).1;
    let (code, out, _) =
        losc(&["--format", "doc", "compat", "verify", "--stdin", "--samples", "50", "--radius", "1"], Some(&gen));
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["runs"].as_array().unwrap().len(), 2);
}

#[test]
fn obstruction_exit_codes() {
    let bad = "generators: x1 x2\nrelator: x1 x2 x1 x2^2\nrelator: x1 x2^-1 x1^2 x2^-1\n";
    assert_eq!(losc(&["obstruct", "--stdin"], Some(bad)).0, 1);
    assert_eq!(losc(&["obstruct", "--stdin"], Some("generators: x1 x2\n")).0, 0);
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(losc(&["frobnicate"], None).0, 2);
    assert_eq!(losc(&["check-c16"], None).0, 2);
    assert_eq!(losc(&["check-c16", "--stdin"], Some("relator: a\n")).0, 2);
    assert_eq!(losc(&["check-c16", "--input", "/nonexistent/x.pres"], None).0, 2);
    let q = "generators: a1\n";
    assert_eq!(losc(&["gen", "rips", "--stdin"], Some(q)).0, 2);
    // compat needs metadata that matches the presentation.
    assert_eq!(losc(&["compat", "verify", "--stdin"], Some("generators: a b\n")).0, 2);
    let gen = losc(&["gen", "perfect", "--seed", "0"], None).1;
    let tampered = gen.replacen("relator: ", "relator: a ", 1);
    assert_eq!(losc(&["compat", "verify", "--stdin"], Some(&tampered)).0, 2);
}
