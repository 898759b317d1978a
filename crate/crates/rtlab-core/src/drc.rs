//! Dependent random choice: sample a small vertex set, take its common
//! neighborhood, and prune until every r-subset has at least m common
//! neighbors. The cleanup is the constructive route to K_s-free sets used
//! by the extraction procedure.

use serde::{Deserialize, Serialize};

use crate::alpha::{mask_is_ks_free, mask_size, AlphaCertificate};
use crate::cliques::{first_clique, mask_ones};
use crate::error::{Error, Result};
use crate::graph::{BitGraph, SimpleGraph};
use crate::rng::{self, Stream};
use crate::util::{ceil_tol, combinations};

/// A vertex set whose every r-subset has at least m common neighbors in the
/// host graph, together with the sampling trace that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrcWitness {
    pub members: Vec<u32>,
    pub r: u32,
    pub m: u32,
    pub t: u32,
    pub sampled: Vec<u32>,
    pub removed: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum DrcOutcome {
    Found { witness: DrcWitness },
    NotFound { trials: u32, best_size: u32 },
}

/// The expectation guarantee `d^t / n^(t-1) - n^r (m/n)^t`; a witness of at
/// least this size exists whenever the value is >= the requested size.
pub fn drc_guarantee(n: f64, avg_degree: f64, r: u32, m: u32, t: u32) -> f64 {
    avg_degree.powi(t as i32) / n.powi(t as i32 - 1)
        - n.powi(r as i32) * (m as f64 / n).powi(t as i32)
}

/// Directly verifies the witness property: every r-subset of `members` has
/// at least m common neighbors in g.
pub fn verify_drc_witness(g: &SimpleGraph, members: &[u32], r: u32, m: u32) -> bool {
    let bg = BitGraph::from_graph(g);
    verify_on_bitgraph(&bg, members, r, m)
}

fn verify_on_bitgraph(bg: &BitGraph, members: &[u32], r: u32, m: u32) -> bool {
    for pick in combinations(members.len(), r as usize) {
        let subset: Vec<u32> = pick.iter().map(|&i| members[i]).collect();
        if common_neighbor_count(bg, &subset) < m {
            return false;
        }
    }
    true
}

fn common_neighborhood(bg: &BitGraph, subset: &[u32]) -> Vec<u64> {
    let mut mask = vec![u64::MAX; bg.words()];
    let extra = bg.words() * 64 - bg.n();
    if extra > 0 {
        mask[bg.words() - 1] >>= extra;
    }
    for &v in subset {
        let row = bg.row(v as usize);
        for w in 0..bg.words() {
            mask[w] &= row[w];
        }
    }
    mask
}

fn common_neighbor_count(bg: &BitGraph, subset: &[u32]) -> u32 {
    mask_size(&common_neighborhood(bg, subset))
}

/// Per trial: sample t vertices uniformly with repetition, take their common
/// neighborhood, then repeatedly delete the lowest-index vertex of the first
/// r-subset with fewer than m common neighbors until the set is clean.
/// Returns the largest clean nonempty set over all trials.
pub fn drc_find(
    g: &SimpleGraph,
    r: u32,
    m: u32,
    t: u32,
    trials: u32,
    seed: u64,
) -> Result<DrcOutcome> {
    if r < 1 || t < 1 {
        return Err(Error::BadParam("drc needs r >= 1 and t >= 1".into()));
    }
    if trials < 1 {
        return Err(Error::BadParam("need at least one trial".into()));
    }
    let n = g.num_vertices();
    if n == 0 {
        return Ok(DrcOutcome::NotFound {
            trials,
            best_size: 0,
        });
    }
    let bg = BitGraph::from_graph(g);
    let mut best: Option<DrcWitness> = None;
    for trial in 0..trials {
        let sampled: Vec<u32> = (0..t)
            .map(|i| {
                rng::uniform_below(
                    seed,
                    Stream::DrcSample,
                    ((trial as u64) << 32) | i as u64,
                    n as u64,
                ) as u32
            })
            .collect();
        let mask = common_neighborhood(&bg, &sampled);
        let mut members: Vec<u32> = mask_ones(&mask).map(|v| v as u32).collect();
        let mut removed = Vec::new();
        // Cleanup: deletion strictly shrinks the set, so this terminates.
        'clean: loop {
            if members.len() < r as usize {
                break;
            }
            for pick in combinations(members.len(), r as usize) {
                let subset: Vec<u32> = pick.iter().map(|&i| members[i]).collect();
                if common_neighbor_count(&bg, &subset) < m {
                    removed.push(subset[0]);
                    members.remove(pick[0]);
                    continue 'clean;
                }
            }
            break;
        }
        if members.is_empty() {
            continue;
        }
        if best.as_ref().is_none_or(|b| members.len() > b.members.len()) {
            best = Some(DrcWitness {
                members,
                r,
                m,
                t,
                sampled,
                removed,
            });
        }
    }
    match best {
        Some(witness) => {
            // The cleanup loop guarantees this; reverify before returning.
            if !verify_on_bitgraph(&bg, &witness.members, r, m) {
                return Err(Error::InvalidStructure(
                    "drc witness failed its own verification".into(),
                ));
            }
            Ok(DrcOutcome::Found { witness })
        }
        None => Ok(DrcOutcome::NotFound {
            trials,
            best_size: 0,
        }),
    }
}

/// How a K_s-free set was obtained by the extraction procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateVia {
    DrcSet,
    CommonNeighborhood,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ExtractOutcome {
    /// A verified K_s-free induced set (a lower-bound witness for alpha_s).
    Certificate {
        certificate: AlphaCertificate,
        via: CertificateVia,
        target: u32,
    },
    /// The graph contained K_{s+r} after all; the clique is the witness.
    Refutation { clique: Vec<u32> },
    NotFound { trials: u32, best_size: u32 },
}

/// Constructive extraction of a K_s-free set: run dependent random choice
/// with `t = ceil((r - delta) / (1 - delta))` and `m = ceil(n^delta)`; if the
/// found set U induces no K_s return it, otherwise take r vertices W of some
/// K_s in U and return the common neighborhood N(W), which must be K_s-free
/// unless the graph contains a K_{s+r}.
pub fn extract_independent_set(
    g: &SimpleGraph,
    s: u32,
    r: u32,
    delta: f64,
    trials: u32,
    seed: u64,
) -> Result<ExtractOutcome> {
    if s < 2 {
        return Err(Error::BadParam("extraction needs s >= 2".into()));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::BadRange(format!("delta {delta} outside (0,1)")));
    }
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::BadParam("empty graph".into()));
    }
    let t = (ceil_tol((r as f64 - delta) / (1.0 - delta)) as u32).max(1);
    let m = ceil_tol((n as f64).powf(delta)) as u32;
    let outcome = drc_find(g, r, m.max(1), t, trials, seed)?;
    let witness = match outcome {
        DrcOutcome::Found { witness } => witness,
        DrcOutcome::NotFound { trials, best_size } => {
            return Ok(ExtractOutcome::NotFound { trials, best_size })
        }
    };
    let bg = BitGraph::from_graph(g);
    let mut u_mask = vec![0u64; bg.words()];
    for &v in &witness.members {
        u_mask[v as usize / 64] |= 1 << (v % 64);
    }
    if mask_is_ks_free(&bg, &u_mask, s as usize) {
        return Ok(ExtractOutcome::Certificate {
            certificate: AlphaCertificate::Exact {
                value: witness.members.len() as u32,
                witness: witness.members,
            },
            via: CertificateVia::DrcSet,
            target: m,
        });
    }
    // U contains a K_s; take r of its vertices and look at their common
    // neighborhood.
    let induced = induced_bitgraph(&bg, &u_mask);
    let ks_local = first_clique(&induced.0, s as usize)
        .expect("a K_s was detected in the induced subgraph");
    let ks: Vec<u32> = ks_local.iter().map(|&i| induced.1[i as usize]).collect();
    let w: Vec<u32> = ks[..r as usize].to_vec();
    let nw = common_neighborhood(&bg, &w);
    if mask_is_ks_free(&bg, &nw, s as usize) {
        let members: Vec<u32> = mask_ones(&nw).map(|v| v as u32).collect();
        return Ok(ExtractOutcome::Certificate {
            certificate: AlphaCertificate::Exact {
                value: members.len() as u32,
                witness: members,
            },
            via: CertificateVia::CommonNeighborhood,
            target: m,
        });
    }
    // A K_s inside N(W) joins with W into a K_{s+r}.
    let induced_nw = induced_bitgraph(&bg, &nw);
    let ks_nw_local =
        first_clique(&induced_nw.0, s as usize).expect("a K_s was detected in N(W)");
    let mut clique: Vec<u32> = ks_nw_local
        .iter()
        .map(|&i| induced_nw.1[i as usize])
        .collect();
    clique.extend_from_slice(&w);
    clique.sort_unstable();
    for i in 0..clique.len() {
        for j in i + 1..clique.len() {
            debug_assert!(g.has_edge(clique[i], clique[j]));
        }
    }
    Ok(ExtractOutcome::Refutation { clique })
}

/// Induced subgraph on the mask, with the map back to original labels.
fn induced_bitgraph(bg: &BitGraph, mask: &[u64]) -> (BitGraph, Vec<u32>) {
    let members: Vec<u32> = mask_ones(mask).map(|v| v as u32).collect();
    let mut sub = BitGraph::new(members.len());
    for (i, &u) in members.iter().enumerate() {
        for (j, &v) in members.iter().enumerate().skip(i + 1) {
            if bg.has_edge(u as usize, v as usize) {
                sub.add_edge(i, j);
            }
        }
    }
    (sub, members)
}
