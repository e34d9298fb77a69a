#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ontoforge::rdf::vocab::xsd;
use ontoforge::rdf::{serialize_turtle, BlankNode, Graph, Iri, Literal, Term, Triple};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

const NAMESPACES: &[(&str, &str)] = &[
    ("ex", "http://example.org/ns#"),
    ("kg", "https://kg.example/data/"),
    ("om", "http://www.ontology-of-units-of-measure.org/resource/om-2/"),
];

const LOCALS: &[&str] = &[
    "alpha",
    "Beta_2",
    "x-y",
    "item.v2",
    "1st",
    "_under",
    "trailing.",
    "with%20pct",
    "dash-",
    "é",
];

const STRINGS: &[&str] = &[
    "plain",
    "",
    "say \"hi\"",
    "back\\slash",
    "two\nlines",
    "tab\there",
    "bell\u{7}",
    "naïve café",
    "中文",
    "  padded  ",
    "a # not a comment",
    "semi ; colon , comma .",
];

fn random_iri(rng: &mut ChaCha8Rng) -> Iri {
    let (_, ns) = NAMESPACES.choose(rng).unwrap();
    let local = LOCALS.choose(rng).unwrap();
    let n: u8 = rng.random_range(0..20);
    Iri::new(format!("{ns}{local}{n}")).unwrap()
}

fn random_literal(rng: &mut ChaCha8Rng) -> Literal {
    match rng.random_range(0..8) {
        0 | 1 => Literal::string(*STRINGS.choose(rng).unwrap()),
        2 => Literal::lang(
            *STRINGS.choose(rng).unwrap(),
            *["en", "fr-ca", "de"].choose(rng).unwrap(),
        )
        .unwrap(),
        3 => Literal::typed(
            rng.random_range(-500i64..500).to_string(),
            Iri::new(xsd::INTEGER).unwrap(),
        )
        .unwrap(),
        4 => Literal::typed(
            format!("{:.3}", rng.random_range(-10.0..10.0f64)),
            Iri::new(xsd::DECIMAL).unwrap(),
        )
        .unwrap(),
        5 => Literal::typed(
            format!("{}E{}", rng.random_range(1..9), rng.random_range(-3..4)),
            Iri::new(xsd::DOUBLE).unwrap(),
        )
        .unwrap(),
        6 => Literal::typed(
            ["true", "false"].choose(rng).unwrap().to_string(),
            Iri::new(xsd::BOOLEAN).unwrap(),
        )
        .unwrap(),
        _ => Literal::typed(
            *STRINGS.choose(rng).unwrap(),
            Iri::new("http://example.org/dt#code").unwrap(),
        )
        .unwrap(),
    }
}

/// A random graph over a few namespaces, blank nodes, and literal shapes.
pub fn random_graph(seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new();
    for (p, ns) in NAMESPACES {
        if rng.random_bool(0.7) {
            g.set_prefix(*p, Iri::new(*ns).unwrap());
        }
    }
    let n = rng.random_range(0..40);
    for _ in 0..n {
        let subject: Term = if rng.random_bool(0.2) {
            BlankNode::new(format!("b{}", rng.random_range(0..5))).unwrap().into()
        } else {
            random_iri(&mut rng).into()
        };
        let predicate = if rng.random_bool(0.15) {
            Iri::new("http://www.w3.org/1999/02/22-rdf-syntax-ns#type").unwrap()
        } else {
            random_iri(&mut rng)
        };
        let object: Term = match rng.random_range(0..3) {
            0 => random_iri(&mut rng).into(),
            1 => BlankNode::new(format!("b{}", rng.random_range(0..5))).unwrap().into(),
            _ => random_literal(&mut rng).into(),
        };
        g.insert(Triple::new(subject, predicate, object).unwrap());
    }
    g
}

/// `count` Turtle documents in canonical form, deterministic in `seed`.
pub fn turtle_corpus(count: usize, seed: u64) -> Vec<String> {
    (0..count as u64)
        .map(|i| serialize_turtle(&random_graph(seed.wrapping_mul(1000).wrapping_add(i))))
        .collect()
}

/// Hand-written documents exercising shorthand the canonical writer never emits.
pub const SHORTHAND_DOCS: &[&str] = &[
    r#"@prefix ex: <http://example.org/ns#> .
ex:a ex:p ex:b , ex:c ; ex:q "x" ; a ex:Thing .
"#,
    r#"@prefix ex: <http://example.org/ns#> .
ex:a ex:n 1 , -2 , +3 , 1.5 , .5 , 1e3 , 2.5E-2 , true , false .
"#,
    r#"@prefix ex: <http://example.org/ns#> .
# comment line
ex:a ex:p [ ex:q "inner" ; ex:r [ ex:s ex:t ] ] .
[ ex:u "anon subject" ] ex:v ex:w .
"#,
    r#"@prefix ex: <http://example.org/ns#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
ex:a ex:p "esc \t é \U0001F600 \" \\"@en-GB , "12"^^xsd:integer , 'single' .
_:x ex:p _:y .
"#,
    r#"@prefix : <http://example.org/empty#> .
:a :b :c .
:a :b :c .
"#,
];

/// Runs the `ontoforge` binary to completion.
pub fn ontoforge<I, S>(args: I) -> std::process::Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    std::process::Command::new(env!("CARGO_BIN_EXE_ontoforge"))
        .args(args)
        .output()
        .unwrap()
}

/// Compiles the fixture T-Box and replays `trace` through `run-plan` in
/// `workdir`. Returns the process output.
pub fn run_fixture_plan(
    workdir: &std::path::Path,
    trace: &std::path::Path,
    doc_id: &str,
    no_feedback: bool,
) -> std::process::Output {
    let compiled = workdir.join("compiled");
    let out = ontoforge([
        "compile".as_ref(),
        "--tbox".as_ref(),
        fixture("synthesis_tbox.ttl").as_os_str(),
        "--out".as_ref(),
        compiled.as_os_str(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut args: Vec<std::ffi::OsString> = vec![
        "run-plan".into(),
        "--plan".into(),
        compiled.join("plan.json").into(),
        "--trace".into(),
        trace.into(),
        "--repairs".into(),
        fixture("repairs.json").into(),
        "--tbox".into(),
        fixture("synthesis_tbox.ttl").into(),
        "--doc-id".into(),
        doc_id.into(),
        "--workdir".into(),
        workdir.into(),
    ];
    if no_feedback {
        args.push("--no-feedback".into());
    }
    ontoforge(args)
}
