mod common;

use common::*;
use linforest::decomp::{components, is_bounded_linear_forest, Bound, EdgeLabeling, Part};
use linforest::girth9::{discharging_audit, subdivide_all, subdivide_with_rotation, cubic_planar_bases};
use linforest::graph::{parse_graph, serialize_graph, MultiGraph, RotationSystem};
use proptest::prelude::*;

fn multigraph() -> impl Strategy<Value = MultiGraph> {
    (1usize..9, proptest::collection::vec((0usize..9, 0usize..9), 0..16)).prop_map(|(n, pairs)| {
        let mut g = MultiGraph::new(n);
        for (u, v) in pairs {
            if u % n != v % n {
                g.add_edge(u % n, v % n).unwrap();
            }
        }
        g
    })
}

proptest! {
    #[test]
    fn graph_text_round_trip(g in multigraph()) {
        let rot = RotationSystem::from_adjacency(&g);
        let text = serialize_graph(&g, Some(&rot));
        let (back, back_rot) = parse_graph(&text).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
        let back_rot = back_rot.unwrap();
        prop_assert_eq!(back_rot.orders(), rot.orders());
    }

    #[test]
    fn labeling_text_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..30)) {
        let lab = EdgeLabeling(bits.iter().map(|&b| if b { Part::B } else { Part::A }).collect());
        prop_assert_eq!(EdgeLabeling::parse(&lab.to_text(), lab.len()).unwrap(), lab);
    }

    /// A forest check agrees with a direct degree/cycle/size computation.
    #[test]
    fn forest_check_matches_components(g in multigraph(), k in 1usize..5) {
        let edges: Vec<usize> = (0..g.edge_count()).collect();
        let linear = components(&g, &edges);
        let bounded = is_bounded_linear_forest(&g, &edges, Bound::Finite(k)).is_ok();
        match linear {
            Ok(paths) => prop_assert_eq!(bounded, paths.iter().all(|p| p.len() <= k)),
            Err(_) => prop_assert!(!bounded),
        }
    }

    #[test]
    fn subdivision_multiplies_girth(g in multigraph(), t in 0usize..4) {
        let h = subdivide_all(&g, t);
        prop_assert_eq!(h.edge_count(), g.edge_count() * (t + 1));
        prop_assert_eq!(h.girth(), g.girth().map(|x| x * (t + 1)));
    }
}

#[test]
fn parse_errors_name_the_line() {
    for bad in ["", "2 1\n0 5\n", "2 2\n0 1\n", "2 1\n0 0\n", "1 0\nrotation\n0: 3\n", "x y\n"] {
        assert!(parse_graph(bad).is_err(), "{bad:?}");
    }
    let (g, rot) = parse_graph("# comment\n3 2\n0 1\n1 2\n").unwrap();
    assert_eq!(g.edge_count(), 2);
    assert!(rot.is_none());
}

#[test]
fn faces_of_plane_drawings_satisfy_euler() {
    for (name, g, rot) in cubic_planar_bases() {
        let (faces, euler) = rot.faces(&g);
        assert!(euler.is_planar(), "{name}");
        assert_eq!(faces.iter().map(|f| f.len()).sum::<usize>(), 2 * g.edge_count());
        for t in 1..3 {
            let (h, r) = subdivide_with_rotation(&g, &rot, t);
            assert!(r.faces(&h).1.is_planar(), "{name}/{t}");
        }
    }
}

#[test]
fn audit_flags_nonplanar_rotations() {
    let g = petersen();
    let rep = discharging_audit(&g, &RotationSystem::from_adjacency(&g));
    assert!(!rep.euler_consistent);
    assert_ne!(rep.components[0].expected, -12);
    assert_eq!(rep.components[0].initial, rep.components[0].expected);
}
