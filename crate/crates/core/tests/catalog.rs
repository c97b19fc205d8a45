use std::collections::BTreeSet;

use combforge::families::{documentation_entries, family, list_families, manifest, Expected};
use combforge::graph::{Truncation, Vertex};
use combforge::Error;

const CAP: usize = 64;

#[test]
fn ten_families_and_two_documentation_entries() {
    let names: BTreeSet<&str> = list_families().iter().map(|f| f.name).collect();
    assert_eq!(names.len(), 10);
    assert_eq!(documentation_entries().len(), 2);
    for d in documentation_entries() {
        assert!(matches!(family(d.name), Err(Error::DocumentationOnly(_))));
    }
    assert!(matches!(family("petersen"), Err(Error::UnknownFamily(_))));
}

#[test]
fn neighbour_streams_are_sorted_symmetric_and_agree_with_adjacency() {
    for spec in list_families() {
        let g = spec.oracle.as_ref();
        for v in g.vertices_below(CAP) {
            let ns = g.neighbors_below(v, CAP);
            assert!(ns.windows(2).all(|w| w[0] < w[1]), "{} {v:?} unsorted", spec.name);
            for w in g.vertices_below(CAP) {
                let listed = ns.contains(&w);
                assert_eq!(listed, g.adjacent(v, w), "{} {v:?} {w:?}", spec.name);
                assert_eq!(g.adjacent(v, w), g.adjacent(w, v), "{} asymmetric", spec.name);
            }
        }
    }
}

#[test]
fn windows_at_the_default_depth_are_connected() {
    for spec in list_families() {
        let g = spec.oracle.as_ref();
        let t = Truncation::first_n(g, g.default_cap(spec.depth));
        assert!(t.is_connected(), "{}", spec.name);
    }
}

#[test]
fn declared_rays_are_paths_and_dominators_are_adjacent_infinitely_often() {
    for spec in list_families() {
        let g = spec.oracle.as_ref();
        let r = g.registry();
        for e in r.ends_below(CAP).into_iter().take(4) {
            let ray = r.ray_prefix(e, CAP);
            assert!(ray.windows(2).all(|w| g.adjacent(w[0], w[1])), "{} end {e:?}", spec.name);
            for d in r.dominators_below(e, CAP) {
                assert!(r.dominates(e, d));
                assert!(r.is_dominated(e));
            }
        }
    }
}

#[test]
fn presets_have_members_and_finite_lists_match() {
    for spec in list_families() {
        for p in &spec.presets {
            let members: Vec<Vertex> = (0..CAP).map(Vertex).filter(|&v| (p.members)(v)).collect();
            assert!(!members.is_empty(), "{}/{}", spec.name, p.name);
            if let Some(list) = &p.finite {
                assert_eq!(&members, list, "{}/{}", spec.name, p.name);
            }
            if p.finite.is_some() {
                assert_eq!(p.expected, Expected::Complement, "finite sets carry no comb");
            }
        }
    }
}

#[test]
fn shipped_manifest_is_current() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../families.json");
    let shipped = std::fs::read_to_string(path).unwrap();
    let current = format!("{}\n", serde_json::to_string_pretty(&manifest()).unwrap());
    assert_eq!(shipped, current, "regenerate with `combforge families --json > families.json`");
}
