#[path = "support/golden.rs"]
mod golden;

use std::process::Command;

use ksym_cli::run;

fn ksym(args: &str) -> ksym_cli::Outcome {
    run(std::iter::once("ksym").chain(args.split_whitespace()))
}

#[test]
fn golden_reports_match() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut failures = Vec::new();
    for (model, cases) in golden::cases() {
        let (text, mismatched) = golden::transcript(model, &cases);
        failures.extend(mismatched);
        let path = golden::golden_path(model);
        if update {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(expected) if expected == text => {}
            Ok(_) => failures.push(format!("{} differs from the current output", path.display())),
            Err(e) => failures.push(format!("{}: {e}", path.display())),
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn reports_are_reproducible() {
    let a = ksym("check pseudosymmetry --model nahm --field radial --against X --format json --seed 7 --no-timing");
    let b = ksym("check pseudosymmetry --model nahm --field radial --against X --format json --seed 7 --no-timing");
    assert_eq!(a, b);
    let c = ksym("check pseudosymmetry --model nahm --field radial --against X --format json --seed 8 --no-timing");
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn pass_flag_is_recomputable_from_the_record() {
    for (model, cases) in golden::cases() {
        for (args, _) in cases {
            let out = ksym(&format!("{args} --model {model} --format json"));
            let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
            for check in v["checks"].as_array().unwrap() {
                let r = check["max_residual"].as_f64().unwrap();
                let tol = check["tol"].as_f64().unwrap();
                let pass = check["pass"].as_bool().unwrap();
                if check["kind"] != "regularity" {
                    assert_eq!(pass, r <= tol, "{model}: {args}: {check}");
                }
            }
            let all = v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true);
            assert_eq!(out.code, if all { 0 } else { 1 }, "{model}: {args}");
        }
    }
}

#[test]
fn json_report_has_the_flat_schema() {
    let out = ksym("verify law --model vibrating_string.ksym --law quadratic --against xi1,xi2 --format json");
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    for key in ["command", "model", "model_digest", "seed", "samples", "checks", "elapsed_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let check = &v["checks"][0];
    for key in ["name", "kind", "tol", "max_residual", "witness", "pass"] {
        assert!(check.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["seed"], 42);
    assert_eq!(v["samples"], 64);
    assert!(check["max_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn nahm_lambda_is_minus_one() {
    let out = ksym("check pseudosymmetry --model nahm.ksym --field radial --against X --format json");
    assert_eq!(out.code, 0);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let lambda = v["outputs"].as_array().unwrap().iter().find(|o| o["name"] == "lambda_1^1").unwrap();
    assert_eq!(lambda["value"], "-1");
}

#[test]
fn usage_and_load_errors_exit_with_two() {
    for args in [
        "",
        "frobnicate",
        "check symmetry --model free_particle",
        "check symmetry --model free_particle --field ddx --bogus",
        "check symmetry --model free_particle --field nope",
        "check symmetry --model no_such_model --field ddx",
        "verify law --model vibrating_string --law nope",
        "check cartan --model nahm --field X",
        "check symmetry --model free_particle --field ddx --param",
        "check symmetry --model free_particle --field ddx --samples 0",
        "integrate section --model vibrating_string --origin 0,0",
    ] {
        assert_eq!(ksym(args).code, 2, "`{args}`");
    }
}

#[test]
fn help_exits_with_zero() {
    let out = ksym("--help");
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("verify"));
}

#[test]
fn param_overrides_change_the_model() {
    let base = ksym("build noether --model vibrating_string --field ddx --format json --no-timing");
    let over = ksym("build noether --model vibrating_string --field ddx --format json --no-timing --param sigma=2 --param tau=3");
    assert_eq!(over.code, 0);
    assert_ne!(base.stdout, over.stdout);
    assert!(over.stdout.contains("\"2*v_1_1\""), "{}", over.stdout);
    assert!(over.stdout.contains("\"-3*v_2_1\""), "{}", over.stdout);
}

#[test]
fn model_files_are_read_from_disk() {
    let dir = std::env::temp_dir().join(format!("ksym-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("particle.ksym");
    std::fs::write(
        &path,
        "[model]\r\nname = particle\r\nkind = lagrangian\r\nn = 1\r\nk = 2\r\nfunction = 0.5*(v_1_1^2 + v_2_1^2)\r\n\r\n[field ddx]\r\nc_x_1 = 1\r\n",
    )
    .unwrap();
    let out = ksym(&format!("check cartan --model {} --field ddx", path.display()));
    assert_eq!(out.code, 0, "{}", out.stderr);

    let bad = dir.join("bad.ksym");
    std::fs::write(&bad, "[model]\nname = bad\nkind = lagrangian\nn = 1\nk = 1\nfunction = v_1_1^^2\n").unwrap();
    let out = ksym(&format!("check regularity --model {}", bad.display()));
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 6"), "{}", out.stderr);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn section_csv_is_written() {
    let path = std::env::temp_dir().join(format!("ksym-section-{}.csv", std::process::id()));
    let out = ksym(&format!(
        "integrate section --model free_particle --origin 0,0.3,0.2 --range 0.25 --step 0.0625 --csv {}",
        path.display()
    ));
    assert_eq!(out.code, 0, "{}", out.stderr);
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t_1,t_2,x_1,v_1_1,v_2_1");
    assert_eq!(lines.len(), 1 + 5 * 5);
    let row: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(&row[..2], &[0.0, 0.0625]);
    assert!((row[2] - 0.2 * 0.0625).abs() < 1e-15);
    std::fs::remove_file(&path).ok();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ksym");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["check", "symmetry", "--model", "free_particle", "--field", "ddx"]), Some(0));
    assert_eq!(code(&["verify", "law", "--model", "vibrating_string", "--law", "energy"]), Some(1));
    assert_eq!(code(&["verify", "law", "--model", "vibrating_string"]), Some(2));
    assert_eq!(code(&["list-models"]), Some(0));
}
