mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rendezvous_core::format::instance_from_edges;
use rendezvous_core::kernel::{
    apply_rule1, apply_rule2, kernel_bound, kernelize, twin_classes, vertex_cover, KernelError, VertexCoverWitness,
    DEFAULT_COVER_BUDGET,
};
use rendezvous_core::{solve, Instance};

#[test]
fn four_cycle_cover_is_two_opposite_vertices() {
    let inst = instance_from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4)], 0, 2, 1);
    let c = vertex_cover(&inst.graph, 0, 2, 20);
    assert!(c.exact);
    assert_eq!(c.x.len(), common::brute_cover_size(&inst.graph, 0, 2));
    assert_eq!(c.x, vec![0, 2, 3]);
}

#[test]
fn classes_of_pendants() {
    // five pendants on vertex 0, which is also s; t = 6 hangs off 1
    let mut edges: Vec<_> = (1..6).map(|v| (0, v)).collect();
    edges.push((1, 6));
    let g = common::graph(7, &edges);
    let x = VertexCoverWitness { x: vec![0, 1, 6], exact: true };
    let classes = twin_classes(&g, &x).unwrap();
    assert_eq!(classes.len(), 1);
    assert_eq!(classes[0].y, vec![0]);
    assert_eq!(classes[0].members, vec![2, 3, 4, 5]);
    let all = VertexCoverWitness { x: (0..7).collect(), exact: false };
    assert!(twin_classes(&g, &all).unwrap().is_empty());
    let bad = VertexCoverWitness { x: vec![1, 6], exact: false };
    assert!(matches!(twin_classes(&g, &bad), Err(KernelError::CoverInvalid(0, _))));
}

#[test]
fn rule1_cases() {
    let adjacent = instance_from_edges(3, &[(0, 1), (1, 2)], 0, 1, 5);
    assert!(apply_rule1(&adjacent));
    let star = instance_from_edges(4, &[(0, 1), (0, 2), (0, 3)], 1, 2, 1);
    assert!(!apply_rule1(&star));
    let same = instance_from_edges(2, &[(0, 1)], 1, 1, 1);
    assert!(apply_rule1(&same));
    let report = kernelize(&adjacent).unwrap();
    assert!(report.trivial_yes && report.reduced.is_none());
}

#[test]
fn rule2_is_a_fixpoint_on_small_classes() {
    let inst = instance_from_edges(5, &[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4)], 0, 1, 2);
    let cover = vertex_cover(&inst.graph, 0, 1, 20);
    let out = apply_rule2(&inst, &cover).unwrap();
    assert!(out.deleted.is_empty());
    assert_eq!(out.instance, inst);
}

#[test]
fn planted_instance_fits_the_bound() {
    // cover of four, six classes of ten twins, two agents
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    loop {
        let inst = common::planted(&mut rng, 4, 6, 10..=10, 2);
        let report = kernelize(&inst).unwrap();
        if report.trivial_yes {
            continue;
        }
        assert!(report.exact);
        assert!(report.vc <= 4);
        let reduced = report.reduced.unwrap();
        assert!(reduced.graph.n() <= 52, "{} vertices", reduced.graph.n());
        assert!(report.size_bound_ok);
        break;
    }
}

#[test]
fn bound_saturates() {
    assert_eq!(kernel_bound(4, 2), 4 + 16 * 3);
    assert_eq!(kernel_bound(80, 1), u64::MAX);
}

fn instance_strategy() -> impl Strategy<Value = Instance> {
    (any::<u64>(), 3usize..5, 1usize..4, 1usize..5, 1usize..3)
        .prop_map(|(seed, cover, classes, size, k)| {
            common::planted(&mut ChaCha8Rng::seed_from_u64(seed), cover, classes, 1..=size, k)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_preserves_the_answer(inst in instance_strategy()) {
        let report = kernelize(&inst).unwrap();
        let before = solve(&inst).unwrap().winner;
        match &report.reduced {
            None => prop_assert_eq!(before, rendezvous_core::Side::Facilitator),
            Some(reduced) => prop_assert_eq!(solve(reduced).unwrap().winner, before),
        }
    }

    #[test]
    fn kernel_structure(inst in instance_strategy()) {
        let report = kernelize(&inst).unwrap();
        let Some(reduced) = report.reduced.clone() else { return Ok(()) };
        let cover = vertex_cover(&inst.graph, inst.s, inst.t, DEFAULT_COVER_BUDGET);
        prop_assert!(!report.deleted.contains(&inst.s) && !report.deleted.contains(&inst.t));
        prop_assert!(report.deleted.iter().all(|v| !cover.x.contains(v)));
        if report.exact {
            prop_assert!(report.size_bound_ok);
            prop_assert!(reduced.graph.n() as u64 <= kernel_bound(report.vc, inst.k));
        }
        let again = kernelize(&reduced).unwrap();
        prop_assert!(again.deleted.is_empty());
    }

    #[test]
    fn cover_is_minimum_and_classes_are_neighbourhoods(inst in instance_strategy()) {
        let g = &inst.graph;
        let cover = vertex_cover(g, inst.s, inst.t, DEFAULT_COVER_BUDGET);
        prop_assert!(cover.exact);
        prop_assert_eq!(cover.x.len(), common::brute_cover_size(g, inst.s, inst.t));
        let mut by_hood: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for v in (0..g.n()).filter(|v| !cover.x.contains(v)) {
            let hood: Vec<usize> = (0..g.n()).filter(|&w| g.has_edge(v, w)).collect();
            by_hood.entry(hood).or_default().push(v);
        }
        let classes = twin_classes(g, &cover).unwrap();
        let got: BTreeMap<Vec<usize>, Vec<usize>> = classes.into_iter().map(|c| (c.y, c.members)).collect();
        prop_assert_eq!(got, by_hood);
    }

    #[test]
    fn rule2_keeps_lowest_members(inst in instance_strategy()) {
        prop_assume!(!apply_rule1(&inst));
        let cover = vertex_cover(&inst.graph, inst.s, inst.t, DEFAULT_COVER_BUDGET);
        let out = apply_rule2(&inst, &cover).unwrap();
        for class in twin_classes(&inst.graph, &cover).unwrap() {
            let kept: Vec<_> = class.members.iter().filter(|v| !out.deleted.contains(v)).copied().collect();
            let want = class.members.len().min(inst.k + 1);
            prop_assert_eq!(&kept[..], &class.members[..want]);
        }
    }
}
