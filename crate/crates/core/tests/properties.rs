use combforge::families::list_families;
use combforge::graph::Vertex;
use combforge::ops::{extract, Operation, RunConfig};
use combforge::verify::verify_with;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn neighbours_below_agree_with_adjacency(fam in 0usize..10, v in 0usize..200, cap in 1usize..200) {
        let spec = &list_families()[fam];
        let g = spec.oracle.as_ref();
        prop_assume!(g.contains(Vertex(v)));
        let below = g.neighbors_below(Vertex(v), cap);
        let brute: Vec<Vertex> = (0..cap).map(Vertex).filter(|&w| g.contains(w) && g.adjacent(Vertex(v), w)).collect();
        prop_assert_eq!(below, brute);
    }

    #[test]
    fn moving_a_tooth_path_vertex_is_rejected(k in 2usize..6, tooth in 0usize..6, shift in 1usize..50) {
        let e = extract(&RunConfig::new("comb", "teeth", Operation::StarComb, k)).unwrap();
        prop_assert!(e.report.ok());
        let mut v: serde_json::Value = serde_json::from_str(&e.certificate.to_json()).unwrap();
        let path = v["payload"]["tooth_paths"][tooth % k].as_array_mut().unwrap();
        let last = path.len() - 1;
        let idx = path[last]["index"].as_u64().unwrap() as usize;
        path[last]["index"] = (idx + shift).into();
        let forged = combforge::certificate::Certificate::from_json(&v.to_string()).unwrap();
        let spec = combforge::families::family("comb").unwrap();
        prop_assert!(!verify_with(&forged, &spec).ok());
    }
}
