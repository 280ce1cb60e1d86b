use std::process::Command;

fn brokenstick(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_brokenstick"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn prob_plain() {
    let (code, stdout, _) =
        brokenstick(&["--format", "plain", "prob", "none", "--k", "4", "--n", "5"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "15/88");
}

#[test]
fn prob_json_round_trips() {
    let (code, stdout, _) = brokenstick(&["prob", "forall", "--k", "3", "--n", "4"]);
    assert_eq!(code, 0);
    let value: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(value["result"], "1/15");
    assert_eq!(value["command"], "prob");
    let again = serde_json::to_string_pretty(&value).unwrap() + "\n";
    assert_eq!(again, stdout);
}

#[test]
fn omega_exponents() {
    let (code, stdout, _) = brokenstick(&["omega", "--k", "4", "--n", "6"]);
    assert_eq!(code, 0);
    let value: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let sorted: Vec<&str> = value["result"]["sorted"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(sorted, ["1", "2", "4", "8", "15", "20"]);
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate", "--mode", "none", "--k", "3", "--n", "5", "--trials", "20000", "--seed", "7",
        "--chunks", "8",
    ];
    let (a, first, _) = brokenstick(&args);
    let (b, second, _) = brokenstick(&args);
    assert_eq!((a, b), (0, 0));
    assert_eq!(first, second);
}

#[test]
fn exit_codes() {
    let (code, stdout, stderr) = brokenstick(&["prob", "none", "--k", "5", "--n", "4"]);
    assert_eq!(code, 3);
    assert!(stdout.is_empty());
    assert!(stderr.starts_with("error:"));

    let (code, _, _) = brokenstick(&["prob", "sideways", "--n", "4"]);
    assert_eq!(code, 2);

    let (code, _, _) = brokenstick(&["verify", "--suite", "montecarlo", "--trials", "1"]);
    assert_eq!(code, 4);
}
