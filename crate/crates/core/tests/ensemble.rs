//! Distributional checks of the swap ensemble on C6, against exhaustive
//! enumeration of the 2-regular simple graphs on 6 labeled nodes: 60 hexagons
//! plus 10 triangle pairs, 70 states, every one containing 6 of the 15
//! possible edges. Uniform state probability therefore puts each edge at
//! presence 6/15 = 0.4 and the triangle-pair class at 10/70.
//!
//! Edge-presence marginals hit 0.4 under either round-counting mode. Full
//! state uniformity holds when rounds count attempts (the lazy chain);
//! counting accepted swaps instead observes the chain only when it moves,
//! which tilts the state mix toward low-rejection states (measured here as a
//! triangle fraction near 0.2). Both facts are pinned.

mod common;

use dinet_core::graph::Graph;
use dinet_core::ids::StudentId;
use dinet_core::nullmodel::{generate_null, NullModelConfig, SwapBudget};

fn c6() -> Graph {
    let ids: Vec<StudentId> = (0..6).map(|i| StudentId::from(format!("n{i}"))).collect();
    Graph::from_edges((0..6).map(|i| (ids[i].clone(), ids[(i + 1) % 6].clone())))
}

struct EnsembleStats {
    /// presence frequency of each of the 15 possible edges
    edge_freq: Vec<f64>,
    /// fraction of replicates that are a triangle pair
    triangle_fraction: f64,
}

fn run_ensemble(budget: SwapBudget, n_reps: u32) -> EnsembleStats {
    let g = c6();
    let cfg = NullModelConfig {
        swap_rounds_multiplier: 20,
        replicate_count: 1,
        master_seed: 2024,
        budget,
        ..Default::default()
    };
    let mut edge_counts = [0u64; 15];
    let mut triangle_pairs = 0u64;
    for rep in 0..n_reps {
        let out = generate_null(&g, &cfg, rep).unwrap();
        assert!(!out.saturated);
        assert_eq!(out.graph.degree_sequence(), vec![2; 6]);
        let gg = &out.graph;
        let mut k = 0;
        let mut has_triangle = false;
        for a in 0..6 {
            for b in (a + 1)..6 {
                if gg.contains_edge(a, b) {
                    edge_counts[k] += 1;
                }
                k += 1;
                for c in (b + 1)..6 {
                    if gg.contains_edge(a, b) && gg.contains_edge(b, c) && gg.contains_edge(a, c) {
                        has_triangle = true;
                    }
                }
            }
        }
        triangle_pairs += has_triangle as u64;
    }
    EnsembleStats {
        edge_freq: edge_counts
            .iter()
            .map(|&c| c as f64 / n_reps as f64)
            .collect(),
        triangle_fraction: triangle_pairs as f64 / n_reps as f64,
    }
}

const N_REPS: u32 = 100_000;

fn three_sigma(p: f64) -> f64 {
    3.0 * (p * (1.0 - p) / N_REPS as f64).sqrt()
}

#[test]
fn c6_edge_presence_matches_enumeration_default_mode() {
    let stats = run_ensemble(SwapBudget::Acceptances, N_REPS);
    let bound = three_sigma(0.4);
    for (k, &f) in stats.edge_freq.iter().enumerate() {
        assert!(
            (f - 0.4).abs() < bound,
            "edge {k}: frequency {f} off 0.4 by more than {bound}"
        );
    }
}

#[test]
fn c6_state_distribution_uniform_under_attempt_counting() {
    let stats = run_ensemble(SwapBudget::Attempts, N_REPS);
    let expected = 10.0 / 70.0;
    assert!(
        (stats.triangle_fraction - expected).abs() < three_sigma(expected),
        "triangle fraction {} vs uniform {expected}",
        stats.triangle_fraction
    );
    let bound = three_sigma(0.4);
    for (k, &f) in stats.edge_freq.iter().enumerate() {
        assert!(
            (f - 0.4).abs() < bound,
            "edge {k}: frequency {f} off 0.4 by more than {bound}"
        );
    }
}

#[test]
fn c6_acceptance_counting_tilts_states_toward_low_rejection() {
    // the jump-chain stationary mass of the triangle-pair class is
    // 10 * 0.6 / (10 * 0.6 + 60 * 0.4) = 0.2: the triangle pair accepts
    // 18 of 30 proposals while a hexagon accepts only 12 of 30
    let stats = run_ensemble(SwapBudget::Acceptances, N_REPS);
    assert!(
        (stats.triangle_fraction - 0.2).abs() < three_sigma(0.2),
        "triangle fraction {} vs jump-chain 0.2",
        stats.triangle_fraction
    );
}
