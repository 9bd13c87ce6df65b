use std::path::{Path, PathBuf};
use std::process::Command;

use nabcoh::exactla::format_rational;
use nabcoh::random::{random_extension, seeded};
use nabcoh_cli::document::{
    build, parse, serialize, BasisDecl, BracketDecl, GroupDecl, GroupGenerator, InputDocument, Part,
};
use proptest::prelude::*;
use rand::Rng;

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn nabcoh(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nabcoh"))
        .args(args)
        .current_dir(workspace())
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

pub const GOLDEN: &[(&str, &[&str], i32)] = &[
    ("h2.tower", &["tower", "fixtures/h2", "--max-stage", "2"], 0),
    ("h2.sections", &["sections", "fixtures/h2"], 0),
    ("l1.sections", &["sections", "fixtures/l1"], 0),
    (
        "l1.sections.dual",
        &["sections", "fixtures/l1", "--algebra", "dual"],
        0,
    ),
    ("l1.tower", &["tower", "fixtures/l1"], 0),
    ("u2.sections", &["sections", "fixtures/u2"], 0),
    (
        "u2.sections.split",
        &["sections", "fixtures/u2", "--algebra", "split"],
        0,
    ),
    ("u2.tower", &["tower", "fixtures/u2"], 0),
    ("l1-z2.sections", &["sections", "fixtures/l1-z2"], 0),
    ("a2.normalize", &["normalize", "fixtures/a2"], 0),
    ("broken-ideal.validate", &["validate", "broken-ideal"], 1),
    (
        "gm-check.d0",
        &["gm-check", "--d", "0", "--max-degree", "10"],
        0,
    ),
    (
        "heisenberg-sign.cohomology",
        &["cohomology", "fixtures/heisenberg-sign"],
        0,
    ),
];

#[test]
fn reports_match_shipped_expectations() {
    for (name, args, code) in GOLDEN {
        let expected =
            std::fs::read_to_string(workspace().join(format!("fixtures/expected/{name}.txt")))
                .unwrap();
        let (c, out, _) = nabcoh(args);
        assert_eq!(c, *code, "{name}");
        assert_eq!(out, expected, "{name}");
    }
}

#[test]
fn spec_examples() {
    let (c, out, _) = nabcoh(&["tower", "fixtures/h2", "--max-stage", "2"]);
    assert_eq!(c, 0);
    assert!(out.contains("empty from stage 2"));
    let (c, out, _) = nabcoh(&["gm-check", "--d", "0", "--max-degree", "10"]);
    assert_eq!(c, 0);
    assert!(out.contains("cocycle space dimension 0"));
    let (c, out, _) = nabcoh(&["validate", "broken-ideal"]);
    assert_eq!(c, 1);
    assert!(out.contains("kernel is an ideal: FAIL at (y, z)"));
}

#[test]
fn exit_codes() {
    let (c, _, err) = nabcoh(&["tower", "fixtures/h2", "--max-stage", "3"]);
    assert_eq!(c, 2);
    assert!(err.contains("exceeds the kernel depth"));
    let (c, _, _) = nabcoh(&["sections", "fixtures/no-such-file"]);
    assert_eq!(c, 2);
    let (c, out, err) = nabcoh(&["sections", "broken-ideal"]);
    assert_eq!(c, 1);
    assert!(out.contains("FAIL at (y, z)"));
    assert!(err.contains("kernel is an ideal"));
    let (c, _, _) = nabcoh(&["normalize", "fixtures/h2"]);
    assert_eq!(c, 1);
    let (c, _, _) = nabcoh(&["sections", "fixtures/l1", "--algebra", "octonions"]);
    assert_eq!(c, 1);
}

#[test]
fn inexact_coefficients_rejected() {
    let dir = std::env::temp_dir().join(format!("nabcoh-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let text = std::fs::read_to_string(workspace().join("fixtures/h2.json"))
        .unwrap()
        .replace("[\"z\", \"1\"]", "[\"z\", \"0.5\"]");
    let path = dir.join("half.json");
    std::fs::write(&path, text).unwrap();
    let (c, _, err) = nabcoh(&["validate", path.to_str().unwrap()]);
    assert_eq!(c, 1);
    assert!(err.contains("\"1/2\""), "{err}");
}

#[test]
fn out_flag_and_determinism() {
    let dir = std::env::temp_dir().join(format!("nabcoh-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.txt");
    let args = ["sections", "fixtures/u2", "--out", path.to_str().unwrap()];
    let (c, first, _) = nabcoh(&args);
    assert_eq!(c, 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first);
    for _ in 0..3 {
        assert_eq!(nabcoh(&args).1, first);
    }
}

#[test]
fn fixtures_round_trip() {
    for entry in std::fs::read_dir(workspace().join("fixtures")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let doc = parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
            assert_eq!(parse(&serialize(&doc)).unwrap(), doc, "{}", path.display());
        }
    }
}

fn document_of(seed: u64) -> InputDocument {
    let mut rng = seeded(seed);
    let group = rng.gen_bool(0.5);
    let e = random_extension(&mut rng, 5, 3, group);
    let l = e.total();
    let basis = (0..l.dim())
        .map(|i| BasisDecl {
            name: l.name(i).to_string(),
            weight: l.weight(i),
            part: if e.kernel_mask()[i] {
                Part::Kernel
            } else {
                Part::Quotient
            },
        })
        .collect();
    let mut brackets = Vec::new();
    for a in 0..l.dim() {
        for b in a + 1..l.dim() {
            let t = l.bracket_terms(a, b);
            if !t.is_empty() {
                brackets.push(BracketDecl {
                    left: l.name(a).to_string(),
                    right: l.name(b).to_string(),
                    value: t
                        .iter()
                        .map(|(k, c)| (l.name(*k).to_string(), format_rational(c)))
                        .collect(),
                });
            }
        }
    }
    let group = (!e.group().is_trivial()).then(|| GroupDecl {
        generators: e
            .group()
            .generators()
            .iter()
            .zip(e.group().orders())
            .map(|(m, &order)| GroupGenerator {
                order,
                matrix: (0..m.rows())
                    .map(|r| m.row(r).iter().map(format_rational).collect())
                    .collect(),
            })
            .collect(),
    });
    InputDocument {
        format: 1,
        name: format!("random {seed}"),
        basis,
        grading_element: "h0".into(),
        brackets,
        group,
        module: None,
        section: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let doc = document_of(seed);
        let text = serialize(&doc);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize(&back), text);
        let built = build(&back).unwrap();
        prop_assert!(nabcoh::nabtower::validate_extension(&built.extension).passed());
    }
}
