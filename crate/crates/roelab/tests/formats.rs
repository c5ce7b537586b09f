use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roelab::formats::{
    format_edge_list, format_operator, parse_edge_list, parse_operator, ExpanderManifest,
    FamilySpec, SeparationSpec, SpaceSpec,
};
use roelab::LabError;
use roelab_core::expander::ExpanderFamily;
use roelab_core::{BandOperator, CoarseSpace, Complex64, GridMetric};

#[test]
fn operators_round_trip_bit_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let spec = SpaceSpec::Grid {
        dims: 2,
        side: 9,
        metric: Default::default(),
    };
    let space = Arc::new(spec.build(Path::new(".")).unwrap());
    for _ in 0..20 {
        let trip: Vec<_> = (0..120)
            .map(|_| {
                let x = rng.gen_range(0..81);
                let y = rng.gen_range(0..81);
                let v = Complex64::new(
                    rng.gen::<f64>() * 10f64.powi(rng.gen_range(-300..300)),
                    -rng.gen::<f64>(),
                );
                (x, y, v)
            })
            .collect();
        let t = BandOperator::from_triplets(space.clone(), trip).unwrap();
        let text = format_operator(&t, Some(&spec)).unwrap();
        let (back, header) = parse_operator(&text, "mem", None, Path::new(".")).unwrap();
        assert_eq!(header.nnz, t.nnz());
        assert_eq!(header.space.as_ref(), Some(&spec));
        assert_eq!(
            back.entries().collect::<Vec<_>>(),
            t.entries().collect::<Vec<_>>()
        );
        assert_eq!(back.propagation(), t.propagation());
        assert_eq!(format_operator(&back, Some(&spec)).unwrap(), text);
    }
}

#[test]
fn malformed_operators_point_at_the_line() {
    let space = Arc::new(CoarseSpace::grid(1, 4, GridMetric::Sup).unwrap());
    let head = "# roelab-operator {\"points\":4,\"nnz\":1,\"propagation\":0.0}\n";
    let err = |body: &str| {
        parse_operator(
            &format!("{head}{body}"),
            "t.op",
            Some(space.clone()),
            Path::new("."),
        )
        .unwrap_err()
    };
    assert!(matches!(err("0 0 1\n"), LabError::Format { line: 2, .. }));
    assert!(matches!(err("0 0 x 0\n"), LabError::Format { line: 2, .. }));
    assert!(matches!(
        err("0 0 1 0\n1 1 1 0\n"),
        LabError::Format { line: 1, .. }
    ));
    assert!(matches!(err("9 0 1 0\n"), LabError::Core(_)));
    let wrong = "# roelab-operator {\"points\":5,\"nnz\":0,\"propagation\":0.0}\n";
    assert!(parse_operator(wrong, "t.op", Some(space), Path::new(".")).is_err());
}

#[test]
fn edge_list_spaces_read_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let edges = vec![(0, 1), (1, 2), (3, 4)];
    std::fs::write(dir.path().join("g.txt"), format_edge_list(&edges)).unwrap();
    assert_eq!(
        parse_edge_list(&format_edge_list(&edges), "g").unwrap(),
        edges
    );
    let spec: SpaceSpec =
        toml::from_str("kind = \"edge-list\"\npath = \"g.txt\"\nseparation = 10.0\n").unwrap();
    assert_eq!(
        spec,
        SpaceSpec::EdgeList {
            path: "g.txt".into(),
            vertices: None,
            separation: Some(SeparationSpec::Uniform(10.0)),
        }
    );
    let space = spec.build(dir.path()).unwrap();
    assert_eq!(space.len(), 5);
    assert_eq!(space.distance(0, 2), 2.0);
    assert_eq!(space.distance(0, 4), 10.0);
}

#[test]
fn families_and_manifests_serialize() {
    let f: FamilySpec =
        serde_json::from_str(r#"{"kind":"generated","generators":[[0,1],[5]]}"#).unwrap();
    let space = Arc::new(CoarseSpace::grid(1, 8, GridMetric::Sup).unwrap());
    let fam = f.build(space.clone()).unwrap();
    assert_eq!(FamilySpec::from_family(&fam), f);
    let fin = FamilySpec::default().build(space).unwrap();
    assert_eq!(fin.generators().len(), 1);

    let ef = ExpanderFamily::generate(&[10, 20], 3, 2.99, 3, 50).unwrap();
    let m = ExpanderManifest::from_family(&ef, true);
    let text = serde_json::to_string(&m).unwrap();
    let back: ExpanderManifest = serde_json::from_str(&text).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.graphs[1].edges.as_ref().unwrap().len(), 30);
    assert!(back.graphs.iter().all(|g| g.lambda <= 2.99));
}
