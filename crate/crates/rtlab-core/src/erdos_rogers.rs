//! Brute-force evaluation of the minimum s-independence number over all
//! K_t-free graphs of a given (small) order.

use crate::alpha::{alpha_s_exact_with_guards, ks_free_subset_at_least, AlphaCertificate, AlphaGuards};
use crate::cliques::clique_exists_in_mask;
use crate::error::{Error, Result};
use crate::graph::{BitGraph, SimpleGraph};

pub const DEFAULT_MAX_N: usize = 8;

/// Exact `f_{s,t}(n)`: the minimum alpha_s over every K_t-free graph on n
/// labeled vertices, by exhausting all 2^C(n,2) edge sets. Graphs containing
/// a K_t are skipped; a graph only has its exact alpha_s computed when a
/// cheap decision shows it beats the running minimum.
pub fn erdos_rogers_exact(s: u32, t: u32, n: usize) -> Result<u32> {
    erdos_rogers_exact_with_limit(s, t, n, DEFAULT_MAX_N)
}

pub fn erdos_rogers_exact_with_limit(s: u32, t: u32, n: usize, max_n: usize) -> Result<u32> {
    if s < 2 || s >= t {
        return Err(Error::BadParam(format!("need 2 <= s < t, got s={s}, t={t}")));
    }
    if n < 1 {
        return Err(Error::BadParam("n must be positive".into()));
    }
    if n > max_n {
        return Err(Error::SizeLimit(format!(
            "exhaustive search over 2^C({n},2) graphs exceeds guard {max_n}"
        )));
    }
    let pairs: Vec<(usize, usize)> = {
        let mut v = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                v.push((a, b));
            }
        }
        v
    };
    let words = n.div_ceil(64).max(1);
    let full = {
        let mut m = vec![u64::MAX; words];
        let extra = words * 64 - n;
        if extra > 0 {
            m[words - 1] >>= extra;
        }
        m
    };
    let mut best: Option<u32> = None;
    let guards = AlphaGuards { max_n: n };
    for mask in 0u64..1u64 << pairs.len() {
        let mut bg = BitGraph::new(n);
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                bg.add_edge(a, b);
            }
        }
        if clique_exists_in_mask(&bg, &full, t as usize) {
            continue;
        }
        let beaten = match best {
            None => true,
            Some(b) => !ks_free_subset_at_least(&bg, s as usize, b as usize),
        };
        if beaten {
            let g = bitgraph_to_simple(&bg, n);
            let AlphaCertificate::Exact { value, .. } =
                alpha_s_exact_with_guards(&g, s, &guards)?
            else {
                unreachable!()
            };
            best = Some(best.map_or(value, |b| b.min(value)));
        }
    }
    best.ok_or_else(|| Error::BadParam("no K_t-free graph found".into()))
}

fn bitgraph_to_simple(bg: &BitGraph, n: usize) -> SimpleGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if bg.has_edge(u, v) {
                edges.push((u as u32, v as u32));
            }
        }
    }
    SimpleGraph::new(n, edges).expect("edges from a valid bitgraph")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_case() {
        // On 2 vertices every graph is triangle-free; K_2 has alpha_2 = 1.
        assert_eq!(erdos_rogers_exact(2, 3, 2).unwrap(), 1);
    }

    #[test]
    fn triangle_free_on_three_and_four() {
        assert_eq!(erdos_rogers_exact(2, 3, 3).unwrap(), 2);
        assert_eq!(erdos_rogers_exact(2, 3, 4).unwrap(), 2);
    }

    #[test]
    fn param_checks() {
        assert!(erdos_rogers_exact(3, 3, 4).is_err());
        assert!(erdos_rogers_exact(1, 3, 4).is_err());
        assert!(erdos_rogers_exact(2, 3, 9).is_err());
    }
}
