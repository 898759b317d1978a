//! s-independence: the largest induced K_s-free vertex set, exactly by
//! branch and bound at small sizes, or probed statistically by sampling
//! fixed-size subsets and searching for a K_s inside each.

use serde::{Deserialize, Serialize};

use crate::cliques::{clique_exists_in_mask, mask_popcount};
use crate::error::{Error, Result};
use crate::graph::{BitGraph, SimpleGraph};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy)]
pub struct AlphaGuards {
    pub max_n: usize,
}

impl Default for AlphaGuards {
    fn default() -> Self {
        AlphaGuards { max_n: 60 }
    }
}

/// Evidence about alpha_s. `Exact` carries a maximum witness (or, from the
/// extraction routine, a verified K_s-free set witnessing a lower bound);
/// `Statistical` reports how many sampled subsets failed to contain a K_s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AlphaCertificate {
    Exact {
        value: u32,
        witness: Vec<u32>,
    },
    Statistical {
        alpha: u32,
        trials: u32,
        failures: u32,
        witnesses: Vec<Vec<u32>>,
        seed: u64,
    },
}

/// Exact alpha_s with a witness set.
pub fn alpha_s_exact(g: &SimpleGraph, s: u32) -> Result<AlphaCertificate> {
    alpha_s_exact_with_guards(g, s, &AlphaGuards::default())
}

pub fn alpha_s_exact_with_guards(
    g: &SimpleGraph,
    s: u32,
    guards: &AlphaGuards,
) -> Result<AlphaCertificate> {
    if s < 2 {
        return Err(Error::BadParam("alpha_s needs s >= 2".into()));
    }
    if g.num_vertices() > guards.max_n {
        return Err(Error::SizeLimit(format!(
            "{} vertices exceeds alpha guard {}",
            g.num_vertices(),
            guards.max_n
        )));
    }
    let bg = BitGraph::from_graph(g);
    let witness = largest_ks_free_subset(&bg, s as usize, None);
    Ok(AlphaCertificate::Exact {
        value: witness.len() as u32,
        witness,
    })
}

/// Include/exclude search for a maximum K_s-free induced set. With
/// `stop_at = Some(k)` the search returns as soon as a set of size k is
/// found (used as a decision procedure).
fn largest_ks_free_subset(bg: &BitGraph, s: usize, stop_at: Option<usize>) -> Vec<u32> {
    fn rec(
        bg: &BitGraph,
        s: usize,
        idx: usize,
        chosen: &mut Vec<u32>,
        chosen_mask: &mut Vec<u64>,
        best: &mut Vec<u32>,
        stop_at: Option<usize>,
    ) -> bool {
        if let Some(k) = stop_at {
            if best.len() >= k {
                return true;
            }
        }
        let n = bg.n();
        if chosen.len() + (n - idx) <= best.len() {
            return false;
        }
        if idx == n {
            if chosen.len() > best.len() {
                *best = chosen.clone();
            }
            if let Some(k) = stop_at {
                return best.len() >= k;
            }
            return false;
        }
        // Include idx unless it completes a K_s with chosen vertices.
        let mut nbhd = vec![0u64; bg.words()];
        let row = bg.row(idx);
        for w in 0..bg.words() {
            nbhd[w] = chosen_mask[w] & row[w];
        }
        if !clique_exists_in_mask(bg, &nbhd, s - 1) {
            chosen.push(idx as u32);
            chosen_mask[idx / 64] |= 1 << (idx % 64);
            let stop = rec(bg, s, idx + 1, chosen, chosen_mask, best, stop_at);
            chosen_mask[idx / 64] &= !(1 << (idx % 64));
            chosen.pop();
            if stop {
                return true;
            }
        }
        rec(bg, s, idx + 1, chosen, chosen_mask, best, stop_at)
    }

    let mut chosen_mask = vec![0u64; bg.words()];
    let mut chosen: Vec<u32> = Vec::new();
    let mut best: Vec<u32> = Vec::new();
    rec(bg, s, 0, &mut chosen, &mut chosen_mask, &mut best, stop_at);
    best
}

/// Decision form: does a K_s-free induced set of size >= k exist?
pub(crate) fn ks_free_subset_at_least(bg: &BitGraph, s: usize, k: usize) -> bool {
    if k == 0 {
        return true;
    }
    largest_ks_free_subset(bg, s, Some(k)).len() >= k
}

/// Samples `trials` uniform alpha-subsets and searches each for a K_s. A
/// subset with no K_s is a failure: direct evidence that alpha_s >= alpha.
/// This is evidence, never a proof of alpha_s < alpha.
pub fn alpha_s_probe(
    g: &SimpleGraph,
    s: u32,
    alpha: u32,
    trials: u32,
    seed: u64,
) -> Result<AlphaCertificate> {
    if s < 2 {
        return Err(Error::BadParam("alpha_s needs s >= 2".into()));
    }
    let n = g.num_vertices();
    if alpha as usize > n {
        return Err(Error::BadParam(format!(
            "alpha {alpha} exceeds vertex count {n}"
        )));
    }
    if trials < 1 {
        return Err(Error::BadParam("need at least one trial".into()));
    }
    let bg = BitGraph::from_graph(g);
    let mut failures = 0;
    let mut witnesses = Vec::new();
    let mut scratch: Vec<u32> = (0..n as u32).collect();
    for trial in 0..trials {
        // Partial Fisher-Yates driven by keyed draws.
        for i in 0..alpha as usize {
            let j = i + rng::uniform_below(
                seed,
                Stream::ProbeShuffle,
                ((trial as u64) << 32) | i as u64,
                (n - i) as u64,
            ) as usize;
            scratch.swap(i, j);
        }
        let mut mask = vec![0u64; bg.words()];
        for &v in &scratch[..alpha as usize] {
            mask[v as usize / 64] |= 1 << (v % 64);
        }
        if !clique_exists_in_mask(&bg, &mask, s as usize) {
            failures += 1;
            if witnesses.len() < 8 {
                let mut subset = scratch[..alpha as usize].to_vec();
                subset.sort_unstable();
                witnesses.push(subset);
            }
        }
    }
    Ok(AlphaCertificate::Statistical {
        alpha,
        trials,
        failures,
        witnesses,
        seed,
    })
}

/// Induced subgraph on `mask` is K_s-free (helper shared with extraction).
pub(crate) fn mask_is_ks_free(bg: &BitGraph, mask: &[u64], s: usize) -> bool {
    !clique_exists_in_mask(bg, mask, s)
}

pub(crate) fn mask_size(mask: &[u64]) -> u32 {
    mask_popcount(mask)
}
