//! Degree-preserving randomization via double-edge swaps.
//!
//! One round picks two random edges with four distinct endpoints and rewires
//! them crosswise; the swap is rejected when either new edge already exists,
//! so the result stays simple and every node keeps its degree. A null graph
//! is the source after `multiplier * |E|` accepted swaps (rejections retry by
//! default; a flag switches the budget to raw attempts). Replicate streams
//! are seeded independently from `(master_seed, replicate_index)`, so the
//! ensemble is reproducible and order-independent.

use rand::Rng;
use rand::SeedableRng;
use rand_pcg::Pcg64;

use crate::cooccur::CoOccurrenceGraph;
use crate::graph::Graph;
use crate::metrics::average_clustering;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum NullModelError {
    #[error("double-edge swap needs at least 2 edges, graph has {0}")]
    TooFewEdges(usize),
    #[error("invalid config: {0}")]
    BadConfig(&'static str),
}

/// What "10|E| rounds" counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapBudget {
    /// Count accepted swaps; rejected attempts retry (default).
    Acceptances,
    /// Count every attempt, accepted or not.
    Attempts,
}

#[derive(Debug, Clone)]
pub struct NullModelConfig {
    /// Accepted-swap target per replicate is `swap_rounds_multiplier * |E|`.
    pub swap_rounds_multiplier: u32,
    pub replicate_count: u32,
    pub master_seed: u64,
    /// Attempt budget per required round before giving up (saturation guard).
    pub max_attempts_per_round: u32,
    pub budget: SwapBudget,
}

impl Default for NullModelConfig {
    fn default() -> Self {
        NullModelConfig {
            swap_rounds_multiplier: 10,
            replicate_count: 100,
            master_seed: 0,
            max_attempts_per_round: 100,
            budget: SwapBudget::Acceptances,
        }
    }
}

impl NullModelConfig {
    fn validate(&self) -> Result<(), NullModelError> {
        if self.swap_rounds_multiplier == 0 {
            return Err(NullModelError::BadConfig("swap_rounds_multiplier >= 1"));
        }
        if self.replicate_count == 0 {
            return Err(NullModelError::BadConfig("replicate_count >= 1"));
        }
        if self.max_attempts_per_round == 0 {
            return Err(NullModelError::BadConfig("max_attempts_per_round >= 1"));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-replicate stream seed.
pub fn replicate_seed(master_seed: u64, replicate_index: u32) -> u64 {
    splitmix64(splitmix64(master_seed) ^ (replicate_index as u64).wrapping_add(1))
}

/// Attempt one swap round. Returns whether the swap was applied.
pub fn double_edge_swap_round<R: Rng>(g: &mut Graph, rng: &mut R) -> Result<bool, NullModelError> {
    let m = g.edge_count();
    if m < 2 {
        return Err(NullModelError::TooFewEdges(m));
    }
    let i = rng.random_range(0..m);
    let mut j = rng.random_range(0..m - 1);
    if j >= i {
        j += 1;
    }
    let (u1, u2) = g.edge_at(i);
    let (u3, u4) = g.edge_at(j);
    if u1 == u3 || u1 == u4 || u2 == u3 || u2 == u4 {
        return Ok(false);
    }
    // Both cross-pairings preserve degrees; pick one uniformly.
    let ((a1, b1), (a2, b2)) = if rng.random_bool(0.5) {
        ((u1, u3), (u2, u4))
    } else {
        ((u1, u4), (u2, u3))
    };
    if g.contains_edge(a1, b1) || g.contains_edge(a2, b2) {
        return Ok(false);
    }
    g.replace_edge(i, (a1, b1)).expect("precheckd swap edge");
    g.replace_edge(j, (a2, b2)).expect("prechecked swap edge");
    Ok(true)
}

/// One randomized replicate with its swap statistics.
#[derive(Debug, Clone)]
pub struct NullReplicate {
    pub graph: Graph,
    pub accepted: u64,
    pub attempted: u64,
    /// Attempt budget ran out before reaching the round target; the source
    /// graph is returned unchanged (e.g. complete graphs admit no swap).
    pub saturated: bool,
}

/// Generate one null replicate of `g` under `config`.
pub fn generate_null(
    g: &Graph,
    config: &NullModelConfig,
    replicate_index: u32,
) -> Result<NullReplicate, NullModelError> {
    config.validate()?;
    let m = g.edge_count();
    if m < 2 {
        return Err(NullModelError::TooFewEdges(m));
    }
    let required = config.swap_rounds_multiplier as u64 * m as u64;
    let budget = required.saturating_mul(config.max_attempts_per_round as u64);
    let mut rng = Pcg64::seed_from_u64(replicate_seed(config.master_seed, replicate_index));
    let mut work = g.clone();
    let mut accepted = 0u64;
    let mut attempted = 0u64;
    loop {
        let rounds_done = match config.budget {
            SwapBudget::Acceptances => accepted,
            SwapBudget::Attempts => attempted,
        };
        if rounds_done >= required {
            return Ok(NullReplicate {
                graph: work,
                accepted,
                attempted,
                saturated: false,
            });
        }
        if attempted >= budget {
            return Ok(NullReplicate {
                graph: g.clone(),
                accepted,
                attempted,
                saturated: true,
            });
        }
        attempted += 1;
        if double_edge_swap_round(&mut work, &mut rng)? {
            accepted += 1;
        }
    }
}

/// Clustering ensemble over the null replicates of one graph.
#[derive(Debug, Clone)]
pub struct NullEnsembleResult {
    pub graph_label: crate::cooccur::GraphLabel,
    /// Average clustering of each replicate, in replicate order.
    pub replicate_clustering: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation of the replicate values.
    pub sd: f64,
    pub accepted_swaps: u64,
    pub attempted_swaps: u64,
    pub saturated_replicates: u32,
}

/// Generate `replicate_count` null graphs and average their clustering.
pub fn null_clustering_baseline(
    cg: &CoOccurrenceGraph,
    config: &NullModelConfig,
) -> Result<NullEnsembleResult, NullModelError> {
    config.validate()?;
    let mut values = Vec::with_capacity(config.replicate_count as usize);
    let mut accepted = 0u64;
    let mut attempted = 0u64;
    let mut saturated = 0u32;
    for idx in 0..config.replicate_count {
        let rep = generate_null(cg.graph(), config, idx)?;
        debug_assert_eq!(rep.graph.degree_sequence(), cg.graph().degree_sequence());
        values.push(average_clustering(&rep.graph).expect("null replicate is non-empty"));
        accepted += rep.accepted;
        attempted += rep.attempted;
        saturated += rep.saturated as u32;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    Ok(NullEnsembleResult {
        graph_label: cg.label,
        replicate_clustering: values,
        mean,
        sd: var.sqrt(),
        accepted_swaps: accepted,
        attempted_swaps: attempted,
        saturated_replicates: saturated,
    })
}
