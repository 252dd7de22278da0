use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heightbound")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn frobpoly_of_x3_plus_x_plus_1_at_5() {
    let o = run(&["frobpoly", "--curve", "a4=1 a6=1", "--p", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("X^2 + 3X + 5"), "{}", stdout(&o));
}

#[test]
fn canonical_height_of_origin_is_zero() {
    let o = run(&["canonical", "--point", "O"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn certify_then_verify() {
    let dir = std::env::temp_dir().join(format!("heightbound-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cert = dir.join("c.json");
    let args = ["certify", "--curve", "a6=-2", "--point", "x=3 y=5", "--p", "5", "--out", cert.to_str().unwrap()];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read_to_string(&cert).unwrap();
    let again = run(&args);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&cert).unwrap(), first);
    let v = run(&["verify", cert.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}{}", stdout(&v), String::from_utf8_lossy(&v.stderr));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes() {
    // point off the curve
    assert_eq!(run(&["canonical", "--curve", "a6=-2", "--point", "x=1 y=1"]).status.code(), Some(2));
    // unknown flag
    assert_eq!(run(&["frobpoly", "--bogus"]).status.code(), Some(2));
    // twist point on y^2 + y = x^3 over Q(√5), supersingular at 5
    let o = run(&["certify", "--field", "Q(sqrt 5)", "--curve", "a3=1", "--point", "x=1 y=-1+w", "--p", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("supersingular"));
}
