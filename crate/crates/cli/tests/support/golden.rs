//! Golden runs over the bundled models, shared by the CLI and acceptance tests.

use std::path::PathBuf;

/// Per model: argument lists run with `--format json --no-timing`, and the
/// expected exit code of each.
pub fn cases() -> Vec<(&'static str, Vec<(&'static str, i32)>)> {
    vec![
        (
            "nahm",
            vec![
                ("check pseudosymmetry --field radial --against X", 0),
                ("check symmetry --field radial", 1),
                ("check integrability", 0),
            ],
        ),
        (
            "free_particle",
            vec![
                ("check regularity", 0),
                ("verify evolution", 0),
                ("check symmetry --field ddx", 0),
                ("check pseudosymmetry --field liouville --y-tuple ddx", 0),
                ("build bracket-law --field ddx --s liouville", 0),
                ("verify law --law momentum", 0),
                ("verify divergence --law momentum --origin 0,0.3,0.2 --range 1", 0),
            ],
        ),
        (
            "vibrating_string",
            vec![
                ("check regularity", 0),
                ("solve evolution", 0),
                ("verify evolution --against xi1,xi2", 0),
                ("verify law --law quadratic --against xi1,xi2", 0),
                ("verify law --law energy", 1),
                ("check cartan --field ddx", 0),
                ("build noether --field ddx", 0),
                ("check converse --field ddx --law momentum", 0),
                ("check converse --field ddx --law quadratic", 1),
                ("check integrability", 0),
                ("verify divergence --law quadratic --origin 0,0.3,0.2 --step 0.0078125,0.00390625", 0),
            ],
        ),
        (
            "minimal_surface",
            vec![
                ("check regularity", 0),
                ("solve evolution --point 0.1,0.2,-0.3", 0),
                ("build noether --field ddx", 0),
            ],
        ),
        (
            "laplace3",
            vec![("check regularity", 0), ("solve evolution", 0), ("build noether --field ddx", 0)],
        ),
        (
            "navier",
            vec![("check regularity", 0), ("solve evolution", 0), ("build noether --field translation", 0)],
        ),
        (
            "oscillator_k1",
            vec![
                ("solve evolution --point 0.3,-0.2", 0),
                ("verify evolution", 0),
                ("verify law --law energy", 0),
                ("build noether --field xh", 0),
                ("integrate section --origin 1,0 --range 1 --step 0.001", 0),
            ],
        ),
    ]
}

pub fn golden_path(model: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{model}.golden"))
}

/// Transcript of every case for `model`: the command line, its exit code
/// and its stdout.
pub fn transcript(model: &str, cases: &[(&str, i32)]) -> (String, Vec<String>) {
    let mut text = String::new();
    let mut mismatched = Vec::new();
    for (args, expected) in cases {
        let mut argv = vec!["ksym".to_string()];
        argv.extend(args.split_whitespace().map(String::from));
        argv.extend(["--model", model, "--format", "json", "--no-timing"].map(String::from));
        let out = ksym_cli::run(argv.clone());
        if out.code != *expected {
            mismatched.push(format!("`{args}` on {model}: exit {} (expected {expected}) {}", out.code, out.stderr));
        }
        text.push_str(&format!("$ {}\n[exit {}]\n{}", argv[1..].join(" "), out.code, out.stdout));
    }
    (text, mismatched)
}
