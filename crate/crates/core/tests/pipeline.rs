//! End-to-end checks across modules: generate, persist, reload, analyse.

use std::fs::File;
use std::io::BufReader;

use num_rational::Ratio;
use proptest::prelude::*;

use interdep::generators::{
    gen_fig1, gen_interdependent, gen_k_partite, GenSeed, IntraKind, IntraLayerSpec,
};
use interdep::robustness::{
    certify_r_robust, is_r_robust_exact, robustness_parameter_exact, CertificateInputs,
};
use interdep::spectral::{algebraic_connectivity, default_tolerance, monotone_lambda2_check};
use interdep::structural::{isoperimetric_exact, vertex_connectivity};
use interdep::{Graph, LayeredGraph, NodeSet};

#[test]
fn files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let lg = gen_interdependent(
        6,
        3,
        0.4,
        &IntraLayerSpec::erdos_renyi(0.5),
        GenSeed::new(1, 2),
    )
    .unwrap();
    let edges = dir.path().join("g.txt");
    let layers = dir.path().join("g.layers");
    lg.graph()
        .write_edge_list(File::create(&edges).unwrap())
        .unwrap();
    lg.write_layers(File::create(&layers).unwrap()).unwrap();

    let g = Graph::read_edge_list(BufReader::new(File::open(&edges).unwrap())).unwrap();
    let back = LayeredGraph::read_layers(g, BufReader::new(File::open(&layers).unwrap())).unwrap();
    assert_eq!(back, lg);
    assert_eq!(
        std::fs::read_to_string(&edges).unwrap(),
        lg.graph().to_edge_list_string()
    );
}

#[test]
fn file_backed_layers_feed_the_generator() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("layer.txt");
    std::fs::write(&path, Graph::cycle(5).to_edge_list_string()).unwrap();
    let intra = IntraLayerSpec::Uniform(IntraKind::FromFile { path });
    let lg = gen_interdependent(5, 2, 0.0, &intra, GenSeed::new(0, 0)).unwrap();
    assert_eq!(lg.intra_edge_count(), 10);
    assert!(gen_interdependent(4, 2, 0.0, &intra, GenSeed::new(0, 0)).is_err());
}

#[test]
fn counterexample_end_to_end() {
    let g = gen_fig1(16, 1).unwrap().into_graph();
    assert_eq!(g.min_max_degree().unwrap(), (4, 5));
    assert_eq!(vertex_connectivity(&g).unwrap(), 4);
    assert_eq!(robustness_parameter_exact(&g, 20).unwrap(), 1);
    let iso = isoperimetric_exact(&g, 24).unwrap();
    assert_eq!(iso.value, Ratio::new(1, 2));
    assert_eq!(iso.argmin_set, NodeSet::from_indices(16, 0..8));

    let inputs = CertificateInputs::from_graph(&g).unwrap();
    assert!(certify_r_robust(2, &inputs).is_err());
    assert!(!certify_r_robust(5, &inputs).unwrap().is_robust());
}

#[test]
fn complete_five_is_spectrally_three_robust() {
    let g = Graph::complete(5);
    let inputs = CertificateInputs::from_graph(&g).unwrap();
    assert!((inputs.lambda2 - 5.0).abs() < 1e-8);
    assert!(certify_r_robust(3, &inputs).unwrap().is_robust());
    assert!(is_r_robust_exact(&g, 3, 20).unwrap().is_robust());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn intra_edges_never_lower_lambda2(seed in any::<u64>(), p in 0.1f64..0.9) {
        let plain = gen_k_partite(4, 3, p, GenSeed::new(seed, 0)).unwrap();
        let dense = gen_interdependent(4, 3, p, &IntraLayerSpec::erdos_renyi(0.7), GenSeed::new(seed, 0)).unwrap();
        let (a, b) = (plain.graph(), dense.graph());
        prop_assert!(a.edges().all(|(u, v)| b.has_edge(u, v)));
        let tol = default_tolerance(b);
        prop_assert!(algebraic_connectivity(b, tol).unwrap() >= algebraic_connectivity(a, tol).unwrap() - 10.0 * tol);
        prop_assert!(robustness_parameter_exact(b, 20).unwrap() >= robustness_parameter_exact(a, 20).unwrap());
    }

    #[test]
    fn single_edge_additions_are_monotone(seed in any::<u64>()) {
        let g = gen_k_partite(4, 2, 0.5, GenSeed::new(seed, 1)).unwrap().into_graph();
        if let Some((u, v)) = (0..8).flat_map(|u| (u + 1..8).map(move |v| (u, v))).find(|&(u, v)| !g.has_edge(u, v)) {
            prop_assert!(monotone_lambda2_check(&g, &g.with_edge(u, v).unwrap()).unwrap());
        }
    }
}
