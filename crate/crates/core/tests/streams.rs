use streampack::streams::{
    generate, parse_bp_stream, parse_scalar_stream, parse_vector_stream, Generated, GeneratorKind, Ordering,
};

fn scalar(g: Generated) -> Vec<f64> {
    match g {
        Generated::Scalar(v) => v,
        Generated::Vector(_) => panic!("expected a scalar stream"),
    }
}

#[test]
fn million_line_round_trip() {
    let kind = GeneratorKind::Uniform { n: 1_000_000, lo: 0.0, hi: 1.0 };
    let generated = generate(&kind, 5).unwrap();
    let text = generated.to_string();
    assert_eq!(text.lines().count(), 1_000_000);
    let parsed = parse_bp_stream(text.as_bytes()).unwrap();
    assert_eq!(parsed, scalar(generated));
}

#[test]
fn generators_are_deterministic() {
    let kinds = [
        GeneratorKind::Uniform { n: 500, lo: 0.1, hi: 0.9 },
        GeneratorKind::Clustered { n: 500, clusters: 4, spread: 0.01 },
        GeneratorKind::SortedAdversarial { n: 500, lo: 0.0, hi: 1.0, order: Ordering::Sawtooth },
        GeneratorKind::VectorUniform { n: 100, d: 3, hi: 1.0 },
    ];
    for kind in &kinds {
        let a = generate(kind, 42).unwrap().to_string();
        let b = generate(kind, 42).unwrap().to_string();
        assert_eq!(a, b, "{kind:?}");
        assert_ne!(a, generate(kind, 43).unwrap().to_string(), "{kind:?}");
    }
}

#[test]
fn adversarial_orders() {
    let get = |order| scalar(generate(&GeneratorKind::SortedAdversarial { n: 35, lo: 0.0, hi: 1.0, order }, 1).unwrap());
    let asc = get(Ordering::Ascending);
    let desc = get(Ordering::Descending);
    let saw = get(Ordering::Sawtooth);
    assert!(asc.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(desc, asc.iter().rev().copied().collect::<Vec<_>>());
    let mut sorted = saw.clone();
    sorted.sort_by(f64::total_cmp);
    assert_eq!(sorted, asc);
    assert!(saw[..10].windows(2).all(|w| w[0] >= w[1]));
    assert!(saw[10] > saw[9]);
}

#[test]
fn empty_uniform_stream() {
    let g = generate(&GeneratorKind::Uniform { n: 0, lo: 0.0, hi: 1.0 }, 0).unwrap();
    assert!(g.is_empty());
    assert_eq!(g.to_string(), "");
}

#[test]
fn rank_reduction_file() {
    let g = generate(&GeneratorKind::RankReduction { values: vec![0.55, 0.60, 0.62], q: 0.58 }, 0).unwrap();
    let text = g.to_string();
    assert_eq!(text, "0.55\n0.55\n0.6\n0.6\n0.62\n0.62\n0.42\n0.42\n0.42\n0.42\n0.42\n0.42\n");
    assert_eq!(parse_scalar_stream(text.as_bytes()).unwrap().len(), 12);
}

#[test]
fn tight_vsched_file_round_trips() {
    let g = generate(&GeneratorKind::TightVsched { machines: 2, gamma: 0.25 }, 0).unwrap();
    let Generated::Vector(items) = &g else { panic!("expected vectors") };
    assert_eq!(items.len(), 10);
    let parsed = parse_vector_stream(g.to_string().as_bytes(), Some(3)).unwrap();
    assert_eq!(&parsed, items);
}

#[test]
fn invalid_generator_parameters() {
    assert!(generate(&GeneratorKind::Uniform { n: 5, lo: 0.5, hi: 0.2 }, 0).is_err());
    assert!(generate(&GeneratorKind::TightVsched { machines: 2, gamma: 0.3 }, 0).is_err());
    assert!(generate(&GeneratorKind::RankReduction { values: vec![0.9], q: 0.58 }, 0).is_err());
}
