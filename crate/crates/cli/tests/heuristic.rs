use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rendezvous_cli::heuristic::{CutHolder, HeuristicDivider};
use rendezvous_core::format::instance_from_edges;
use rendezvous_core::sim::{simulate, GreedyRushFacilitator, RandomFacilitator};
use rendezvous_core::{lambda, ExtendedCount, Instance};

/// Random connected graph on `n` vertices with terminals 0 and n - 1 apart.
fn random_instance(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Option<Instance> {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(0.25) && !edges.contains(&(u, v)) {
                edges.push((u, v));
            }
        }
    }
    edges.retain(|&e| e != (0, n - 1));
    let inst = instance_from_edges(n, &edges, 0, n - 1, k);
    inst.connected.then_some(inst)
}

#[test]
fn holding_a_small_cut_never_loses() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    while checked < 60 {
        let n = rng.gen_range(4..=10);
        let k = rng.gen_range(1..=3);
        let Some(inst) = random_instance(&mut rng, n, k) else { continue };
        let Ok(ExtendedCount::Finite(lam)) = lambda(&inst.graph, inst.s, inst.t) else { continue };
        if lam as usize > k {
            continue;
        }
        checked += 1;
        assert!(CutHolder::new(&inst).holds_cut());
        let mut div = HeuristicDivider::new(&inst);
        let mut fac = RandomFacilitator::new(&inst.graph, ChaCha8Rng::seed_from_u64(checked));
        let trace = simulate(&inst, &mut fac, &mut div, 200).expect("heuristic moves are legal");
        assert!(!trace.met());
    }
}

#[test]
fn shadowing_moves_are_legal() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for seed in 0..60 {
        let n = rng.gen_range(4..=10);
        let Some(inst) = random_instance(&mut rng, n, 1) else { continue };
        let mut div = HeuristicDivider::new(&inst);
        let mut fac = GreedyRushFacilitator::new(&inst.graph);
        simulate(&inst, &mut fac, &mut div, 50).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let mut div = HeuristicDivider::new(&inst);
        let mut fac = RandomFacilitator::new(&inst.graph, ChaCha8Rng::seed_from_u64(seed));
        simulate(&inst, &mut fac, &mut div, 50).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
    }
}
