use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn oklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oklab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn body_report_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = oklab(&["body", "--model", "p2:d=2", "--order", "lex", "--k", "1,2,3", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "Δ₁ ⊆ Δ₂ ⊆ Δ₃: OK"), "{}", stdout(&o));
    for k in 1..=3 {
        let file = dir.path().join(format!("delta_{k}.poly"));
        let text = fs::read_to_string(&file).unwrap();
        assert!(text.starts_with("n=2\n") && text.contains("facet"));
        let t = oklab(&["seshadri", "--polytope", file.to_str().unwrap()]);
        assert_eq!(stdout(&t), "t*=2\n");
    }
    assert!(fs::read_to_string(dir.path().join("delta.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn three_dimensional_bodies_emit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = oklab(&["body", "--model", "p3:d=1", "--k", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!dir.path().join("delta.svg").exists());
    let csv = fs::read_to_string(dir.path().join("delta_1.csv")).unwrap();
    assert!(csv.starts_with("kind,c1,c2,c3,offset\n"));
}

#[test]
fn curve_volume_line() {
    let o = oklab(&["volume", "--model", "curve:d=5", "--k", "1"]);
    assert_eq!(stdout(&o), "Δ=[0,5], vol=5, 1!·vol=5=deg L\n");
}

#[test]
fn conic_flag_volume() {
    let o = oklab(&["volume", "--model", "p2:d=2", "--flag", "conic", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Δ₂=(0, 0) (0, 4) (1, 0), vol=2, 2!·vol=4=(L^2)\n");
}

#[test]
fn seshadri_of_sigma_1_1_4() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sigma_1_1_4.poly");
    fs::write(&file, "n=3\n0 0 0\n1 0 0\n0 1 0\n0 0 4\n").unwrap();
    assert_eq!(stdout(&oklab(&["seshadri", "--polytope", file.to_str().unwrap()])), "t*=1\n");
    assert_eq!(stdout(&oklab(&["seshadri", "--model", "p2:d=3", "--order", "deglex"])), "t*=3\n");
}

#[test]
fn domain_queries() {
    let o = oklab(&["domain", "--model", "p2:d=1", "--point", "1/2,0;0,1/2", "--point", "1,0;0,0"]);
    assert_eq!(stdout(&o), "z=1/2,0;0,1/2: inside\nz=1,0;0,0: outside\n");
    let e = oklab(&["domain", "--ellipsoid", "1,4", "--point", "0,0;1,1", "--point", "1,0;0,0"]);
    assert_eq!(stdout(&e), "z=0,0;1,1: inside\nz=1,0;0,0: outside\n");
}

#[test]
fn degenerate_check_reports_every_tau() {
    let o = oklab(&["degenerate", "check", "--model", "p2:d=2", "--flag", "conic"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("γ=[10, 1], C=3.000000\n"));
    assert_eq!(text.lines().filter(|l| l.ends_with(": OK")).count(), 10);
}

#[test]
fn moment_image_csv() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("image.csv");
    let o = oklab(&["moment", "image", "--model", "p2:d=1", "--grid", "5", "--out", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&file).unwrap();
    assert!(csv.starts_with("x1,x2,mu1,mu2\n"));
    assert_eq!(csv.lines().count(), 26);
}

#[test]
fn outputs_are_byte_stable_across_threads() {
    let args = ["moment", "volume", "--model", "p2:d=2", "--flag", "conic"];
    let a = oklab(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_oklab")).args(args).env("OKLAB_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(oklab(&["volume", "--model", "p2:d=x"]).status.code(), Some(2));
    assert_eq!(oklab(&["volume", "--model", "p3:d=1", "--flag", "conic"]).status.code(), Some(2));
    assert_eq!(oklab(&["seshadri", "--polytope", "/nonexistent.poly"]).status.code(), Some(2));
    assert_eq!(oklab(&["volume"]).status.code(), Some(2));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_oklab")).args(["volume", "--model", "curve:d=1"]).env("OKLAB_THREADS", "zero").output().unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
    let tight = oklab(&["moment", "volume", "--model", "p2:d=1", "--tol", "1e-12"]);
    assert_eq!(tight.status.code(), Some(3));
}

#[test]
fn violated_inclusion_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("shrinking.sec");
    // level 2 lost the section z, so Δ_1 = [0,1] is not inside Δ_2 = {0}
    fs::write(&file, "n=1 k=1\n0:1\n1:1\nn=1 k=2\n0:1\n").unwrap();
    let model = format!("custom:{}", file.display());
    let o = oklab(&["body", "--model", &model, "--k", "1,2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("Δ₁ ⊄ Δ₂"));
    let v = oklab(&["volume", "--model", &model, "--k", "1"]);
    assert_eq!(stdout(&v), "Δ=[0,1], vol=1, 1!·vol=1, deg L unknown\n");
}

#[test]
fn certificate_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("cert.txt");
    let o = oklab(&["degenerate", "certify", "--model", "toric:0,0;1,0;0,1;1,1", "--grid", "16", "--out", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&file).unwrap(), stdout(&o));
    assert!(!Path::new(&file.with_extension("partial")).exists());
}
