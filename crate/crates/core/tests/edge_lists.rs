use dsrg_core::digraph::{verify_dsrg, Digraph};
use dsrg_core::{DsrgParams, DsrgViolation};
use proptest::prelude::*;

fn digraph_strategy() -> impl Strategy<Value = Digraph> {
    (1usize..40).prop_flat_map(|v| {
        prop::collection::vec((0..v, 0..v), 0..200).prop_map(move |pairs| {
            Digraph::from_arcs(v, pairs.into_iter().filter(|(a, b)| a != b)).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn edge_list_round_trip(g in digraph_strategy()) {
        let text = g.to_edge_list();
        let back = Digraph::read_edge_list(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.to_edge_list(), text);
    }

    #[test]
    fn complement_twice_is_identity(g in digraph_strategy()) {
        prop_assert_eq!(g.complement().complement(), g.clone());
        let v = g.vertex_count() as u64;
        prop_assert_eq!(g.arc_count() + g.complement().arc_count(), v * (v - 1));
    }

    #[test]
    fn complement_verifies_with_complement_parameters(g in digraph_strategy()) {
        // K_v and its empty complement leave μ vacuous
        if let Ok(p) = verify_dsrg(&g) {
            if let Some(c) = p.complement().filter(|_| p.k > 0 && p.k + 1 < p.v) {
                prop_assert_eq!(verify_dsrg(&g.complement()), Ok(c));
            }
        }
    }
}

#[test]
fn removing_an_arc_is_caught() {
    let g = Digraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
    assert_eq!(verify_dsrg(&g), Ok(DsrgParams::new(3, 1, 0, 1, 0)));
    let broken = Digraph::from_arcs(3, [(0, 1), (1, 2)]).unwrap();
    assert!(matches!(
        verify_dsrg(&broken),
        Err(DsrgViolation::OutDegree { vertex: 2, .. })
    ));
    // the directed 4-cycle reaches its antipode in two steps but not its predecessor
    let square = Digraph::from_arcs(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    assert!(matches!(
        verify_dsrg(&square),
        Err(DsrgViolation::Entry { .. })
    ));
}
