use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

fn tfg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tfg_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tfg"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const MP2: &str = "graph mp2\nvertex 1\nvertex 2\nedge a 1 1\nedge b 1 2\nedge c 2 1\nedge l1 2 2\nedge l2 2 2\n";
const R2: &str = "graph r2\nvertex a\nedge x a a\nedge y a a\n";

#[test]
fn matui_into_homology() {
    let g = tfg(&["matui", "--d", "2", "--k", "1"]);
    assert_eq!(g.status.code(), Some(0));
    let h = tfg_stdin(&["homology", "-"], &stdout(&g));
    assert_eq!(h.status.code(), Some(0));
    let out = stdout(&h);
    assert!(out.contains("H0 = trivial\n"), "{out}");
    assert!(out.contains("H1 = trivial\n"), "{out}");
    let h2 = tfg_stdin(&["homology", "-", "--degree", "2"], &stdout(&g));
    assert_eq!(stdout(&h2), "H2 = trivial\n");
}

#[test]
fn matsumoto_files() {
    let dir = TempDir::new().unwrap();
    let mp2 = write(&dir, "mp2.graph", MP2);
    let r2 = write(&dir, "r2.graph", R2);
    let o = tfg(&["matsumoto", mp2.to_str().unwrap(), "X", r2.to_str().unwrap(), "X"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("matsumoto: MET\n"));
    let o = tfg(&["matsumoto", "r2", "X", "r3", "X"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).ends_with("matsumoto: NOT-MET\n"));
}

#[test]
fn matsumoto_refuses_infinite_cokernels() {
    let dir = TempDir::new().unwrap();
    let g = write(
        &dir,
        "inf.graph",
        "graph inf\nvertex u\nvertex v\nedge p u u\nedge q u u\nedge r u v\nedge s v u\nedge t v v\nedge w v v\n",
    );
    let g = g.to_str().unwrap();
    let o = tfg(&["matsumoto", g, "X", g, "X"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("matsumoto: UNSUPPORTED"));
    let o = tfg(&["build-completion", g, "X", "--primes", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn element_equality_exit_codes() {
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id.elem", "element over r2\npair @a -> @a\n");
    let swap = write(&dir, "swap.elem", "element over r2\npair x -> y\npair y -> x\n");
    let expanded = write(
        &dir,
        "swap2.elem",
        "element over r2\npair x.x -> y.x\npair x.y -> y.y\npair y -> x\n",
    );
    let (id, swap, expanded) = (id.to_str().unwrap(), swap.to_str().unwrap(), expanded.to_str().unwrap());
    let o = tfg(&["elem", "eq", id, swap]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "false\n");
    let o = tfg(&["elem", "eq", swap, expanded]);
    assert_eq!(o.status.code(), Some(0));
    let o = tfg(&["elem", "canon", expanded]);
    assert_eq!(stdout(&o), "element over r2\npair x -> y\npair y -> x\n");
    let o = tfg(&["elem", "compose", swap, swap]);
    assert_eq!(stdout(&o), "element over r2\npair @a -> @a\n");
    let o = tfg(&["elem", "apply", swap, "point x (y)"]);
    assert_eq!(stdout(&o), "point - (y)\ncocycle = 0\n");
    let o = tfg(&["elem", "local", swap]);
    assert_eq!(stdout(&o), "@a: (x y)\n");
}

#[test]
fn element_algebra_through_files() {
    let dir = TempDir::new().unwrap();
    let a = tfg(&["elem", "random", "m2", "--depth", "3", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    let a_path = write(&dir, "a.elem", &stdout(&a));
    let inv = tfg(&["elem", "invert", a_path.to_str().unwrap()]);
    let inv_path = write(&dir, "inv.elem", &stdout(&inv));
    let id = tfg(&["elem", "compose", a_path.to_str().unwrap(), inv_path.to_str().unwrap()]);
    assert_eq!(stdout(&id), "element over m2\npair @1 -> @1\npair @2 -> @2\n");
    let again = tfg(&["elem", "random", "m2", "--depth", "3", "--seed", "11"]);
    assert_eq!(stdout(&a), stdout(&again));
}

#[test]
fn restricted_elements_need_their_clopens() {
    let dir = TempDir::new().unwrap();
    let clopens = write(&dir, "y.clopen", "clopen Y: x, y.x\n");
    let e = write(&dir, "e.elem", "element over r2 restrict Y\npair y.x -> x\npair x -> y.x\n");
    let o = tfg(&["elem", "canon", e.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = tfg(&[
        "elem",
        "canon",
        e.to_str().unwrap(),
        "--graph",
        "r2",
        "--clopens",
        clopens.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "element over r2 restrict Y\npair x -> y.x\npair y.x -> x\n");
}

#[test]
fn certificates_validate_in_a_fresh_process() {
    let dir = TempDir::new().unwrap();
    for (graph, primes) in [("r2", "2"), ("r2", ""), ("m3", "5"), ("r3", "2,3")] {
        let o = tfg(&["build-completion", graph, "X", "--primes", primes]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let cert = stdout(&o);
        assert!(cert.contains("check matsumoto: PASS MET\n"));
        let again = tfg(&["build-completion", graph, "X", "--primes", primes]);
        assert_eq!(cert, stdout(&again));
        let path = write(&dir, "c.cert", &cert);
        let v = tfg(&["validate-certificate", path.to_str().unwrap()]);
        assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
        assert!(stdout(&v).ends_with("certificate: VALID\n"));
        let bad = write(&dir, "bad.cert", &cert.replace("check diconnected: PASS", "check diconnected: FAIL"));
        let v = tfg(&["validate-certificate", bad.to_str().unwrap()]);
        assert_eq!(v.status.code(), Some(1));
    }
}

#[test]
fn completion_reference_matrix() {
    let o = tfg(&["build-completion", "r2", "X", "--primes", "2"]);
    let cert = stdout(&o);
    assert!(cert.contains("matrix 3 3\n-1 -2 -2\n-1 -3 -2\n-1 -2 -3\n"), "{cert}");
    assert!(cert.contains("pattern v1: (e_1_1_1 e_1_1_2)\n"), "{cert}");
}

#[test]
fn patterns_and_fix_index() {
    let dir = TempDir::new().unwrap();
    let pat = write(&dir, "s3.pattern", "pattern a: (x y)\npattern a: (y z)\n");
    let pat = pat.to_str().unwrap();
    let o = tfg(&["lpc", "r3", pat]);
    assert_eq!(stdout(&o), "|F_a| = 6\nlpc = 2,3\n");
    let o = tfg(&["fix-index", "r3", pat, "X", "@a"]);
    assert_eq!(stdout(&o), "index = 6\nenumerated = 6\n");
    let o = tfg(&["lpc", "r3", pat, "--cap-closure", "3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn graph_reports() {
    let o = tfg(&["check-graph", "m2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("matrix 2 2\n1 1\n1 2\n"));
    let cyc = "graph c2\nvertex u\nvertex v\nedge a u v\nedge b v u\n";
    let o = tfg_stdin(&["check-graph", "-"], cyc);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("non-circular: false\n"));
    let o = tfg(&["export-dot", "r2"]);
    assert_eq!(stdout(&o), "digraph r2 {\n  a -> a [label=x];\n  a -> a [label=y];\n}\n");
    let o = tfg(&["abelianization", "r3"]);
    assert_eq!(stdout(&o), "abelianization = Z/2\n");
    let o = tfg(&["class-of", "r3", "x, y"]);
    assert_eq!(stdout(&o), "H0 = Z/2\nclass([Y]) = (0;)\n");
    let o = tfg(&["realize-class", "r3", "(1;)"]);
    assert_eq!(o.status.code(), Some(0));
    let y = stdout(&o);
    let o = tfg(&["class-of", "r3", y.trim().trim_start_matches("clopen Y:").trim()]);
    assert!(stdout(&o).ends_with("class([Y]) = (1;)\n"));
}

#[test]
fn usage_and_parse_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(tfg(&[]).status.code(), Some(2));
    assert_eq!(tfg(&["homology"]).status.code(), Some(2));
    assert_eq!(tfg(&["no-such-command"]).status.code(), Some(2));
    let bad = write(&dir, "bad.graph", "graph g\nvertex a\nedge x a b\n");
    let o = tfg(&["homology", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.graph:3:"), "{}", stderr(&o));
    let o = tfg(&["build-completion", "r2", "X", "--primes", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = tfg(&["matui", "--d", "1", "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
}
