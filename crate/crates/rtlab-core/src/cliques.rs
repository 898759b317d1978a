//! Exact clique search over bitset adjacency: existence, counting, and
//! enumeration of t-cliques, plus a branch-and-bound maximum clique.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BitGraph, SimpleGraph};

#[derive(Debug, Clone, Copy)]
pub struct CliqueGuards {
    pub max_n: usize,
    pub max_t: u32,
}

impl Default for CliqueGuards {
    fn default() -> Self {
        CliqueGuards {
            max_n: 2000,
            max_t: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CliqueMode {
    Exists,
    Count,
    Enumerate,
}

#[derive(Debug, Clone, Copy)]
pub struct CliqueQuery {
    pub target_size: u32,
    pub mode: CliqueMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum CliqueAnswer {
    Exists { found: bool },
    Count { count: u64 },
    Enumerate { cliques: Vec<Vec<u32>> },
}

pub(crate) fn mask_popcount(mask: &[u64]) -> u32 {
    mask.iter().map(|w| w.count_ones()).sum()
}

pub(crate) fn mask_ones(mask: &[u64]) -> impl Iterator<Item = usize> + '_ {
    mask.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(wi * 64 + b)
        })
    })
}

pub(crate) fn full_mask(n: usize, words: usize) -> Vec<u64> {
    let mut m = vec![u64::MAX; words];
    let extra = words * 64 - n;
    if extra > 0 {
        m[words - 1] >>= extra;
    }
    m
}

/// Zeroes every bit at position <= v.
fn clear_through(mask: &mut [u64], v: usize) {
    let word = v / 64;
    let bit = v % 64;
    for w in mask.iter_mut().take(word) {
        *w = 0;
    }
    mask[word] &= !((1u64 << bit) | (1u64 << bit).wrapping_sub(1));
}

/// Degeneracy ordering: repeatedly removes a minimum-degree vertex
/// (smallest index on ties).
fn degeneracy_order(bg: &BitGraph) -> Vec<usize> {
    let n = bg.n();
    let mut alive = full_mask(n, bg.words());
    let mut deg: Vec<i64> = (0..n).map(|v| bg.degree(v) as i64).collect();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = mask_ones(&alive)
            .min_by_key(|&v| (deg[v], v))
            .expect("alive set nonempty");
        order.push(v);
        alive[v / 64] &= !(1 << (v % 64));
        for (wi, w) in bg.row(v).iter().enumerate() {
            let mut w = w & alive[wi];
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                deg[wi * 64 + b] -= 1;
            }
        }
    }
    order
}

enum Visit {
    Exists(bool),
    Count(u64),
    Enumerate(Vec<Vec<u32>>),
}

struct Walker<'a> {
    bg: &'a BitGraph,
    t: usize,
    labels: Vec<u32>,
    stack: Vec<u32>,
    visit: Visit,
}

impl Walker<'_> {
    /// Extends cliques by vertices from `cand`; every vertex in `cand` has
    /// rank above the current stack top, so each clique is seen once.
    fn recurse(&mut self, cand: &[u64], depth: usize) -> bool {
        if depth + (mask_popcount(cand) as usize) < self.t {
            return false;
        }
        if depth + 1 == self.t {
            match &mut self.visit {
                Visit::Exists(found) => {
                    if mask_popcount(cand) > 0 {
                        *found = true;
                        return true;
                    }
                }
                Visit::Count(c) => *c += mask_popcount(cand) as u64,
                Visit::Enumerate(all) => {
                    let ones: Vec<usize> = mask_ones(cand).collect();
                    for v in ones {
                        let mut clique: Vec<u32> =
                            self.stack.iter().map(|&r| self.labels[r as usize]).collect();
                        clique.push(self.labels[v]);
                        clique.sort_unstable();
                        all.push(clique);
                    }
                }
            }
            return false;
        }
        let words = self.bg.words();
        let ones: Vec<usize> = mask_ones(cand).collect();
        for v in ones {
            let mut next = vec![0u64; words];
            let row = self.bg.row(v);
            for w in 0..words {
                next[w] = cand[w] & row[w];
            }
            // Restrict to ranks above v.
            clear_through(&mut next, v);
            self.stack.push(v as u32);
            let stop = self.recurse(&next, depth + 1);
            self.stack.pop();
            if stop {
                return true;
            }
        }
        false
    }
}

/// Exact t-clique query with degeneracy-ordered search.
pub fn find_clique(g: &SimpleGraph, query: &CliqueQuery) -> Result<CliqueAnswer> {
    find_clique_with_guards(g, query, &CliqueGuards::default())
}

pub fn find_clique_with_guards(
    g: &SimpleGraph,
    query: &CliqueQuery,
    guards: &CliqueGuards,
) -> Result<CliqueAnswer> {
    if query.target_size < 1 {
        return Err(Error::BadParam("clique size must be at least 1".into()));
    }
    if g.num_vertices() > guards.max_n {
        return Err(Error::SizeLimit(format!(
            "{} vertices exceeds clique guard {}",
            g.num_vertices(),
            guards.max_n
        )));
    }
    if matches!(query.mode, CliqueMode::Count | CliqueMode::Enumerate)
        && query.target_size > guards.max_t
    {
        return Err(Error::SizeLimit(format!(
            "clique size {} exceeds guard {}",
            query.target_size, guards.max_t
        )));
    }
    let bg = BitGraph::from_graph(g);
    let order = degeneracy_order(&bg);
    let n = bg.n();
    // Reorder adjacency by degeneracy rank.
    let mut rank = vec![0usize; n];
    for (pos, &v) in order.iter().enumerate() {
        rank[v] = pos;
    }
    let mut rg = BitGraph::new(n);
    for u in 0..n {
        for v in mask_ones(bg.row(u)) {
            if u < v {
                rg.add_edge(rank[u], rank[v]);
            }
        }
    }
    let labels: Vec<u32> = order.iter().map(|&v| v as u32).collect();
    let t = query.target_size as usize;

    // Size-1 cliques are the vertices themselves.
    if t == 1 {
        return Ok(match query.mode {
            CliqueMode::Exists => CliqueAnswer::Exists { found: n > 0 },
            CliqueMode::Count => CliqueAnswer::Count { count: n as u64 },
            CliqueMode::Enumerate => CliqueAnswer::Enumerate {
                cliques: (0..n as u32).map(|v| vec![v]).collect(),
            },
        });
    }

    let visit = match query.mode {
        CliqueMode::Exists => Visit::Exists(false),
        CliqueMode::Count => Visit::Count(0),
        CliqueMode::Enumerate => Visit::Enumerate(Vec::new()),
    };
    let mut walker = Walker {
        bg: &rg,
        t,
        labels,
        stack: Vec::with_capacity(t),
        visit,
    };
    let all = full_mask(n, rg.words());
    walker.recurse(&all, 0);
    Ok(match walker.visit {
        Visit::Exists(found) => CliqueAnswer::Exists { found },
        Visit::Count(count) => CliqueAnswer::Count { count },
        Visit::Enumerate(mut cliques) => {
            cliques.sort_unstable();
            CliqueAnswer::Enumerate { cliques }
        }
    })
}

/// True when the induced subgraph on `mask` contains a t-clique.
pub(crate) fn clique_exists_in_mask(bg: &BitGraph, mask: &[u64], t: usize) -> bool {
    if t == 0 {
        return true;
    }
    exists_rec(bg, mask, t)
}

fn exists_rec(bg: &BitGraph, cand: &[u64], t: usize) -> bool {
    let pop = mask_popcount(cand) as usize;
    if pop < t {
        return false;
    }
    if t == 1 {
        return true;
    }
    let words = bg.words();
    for v in mask_ones(cand).collect::<Vec<_>>() {
        let mut next = vec![0u64; words];
        let row = bg.row(v);
        for w in 0..words {
            next[w] = cand[w] & row[w];
        }
        // Only explore vertices after v to avoid revisiting subsets.
        clear_through(&mut next, v);
        if exists_rec(bg, &next, t - 1) {
            return true;
        }
    }
    false
}

/// Lexicographically first t-clique in the graph's own vertex order.
pub(crate) fn first_clique(bg: &BitGraph, t: usize) -> Option<Vec<u32>> {
    let mut stack = Vec::with_capacity(t);
    let all = full_mask(bg.n(), bg.words());
    if first_rec(bg, &all, t, &mut stack) {
        Some(stack)
    } else {
        None
    }
}

fn first_rec(bg: &BitGraph, cand: &[u64], t: usize, stack: &mut Vec<u32>) -> bool {
    if t == 0 {
        return true;
    }
    if (mask_popcount(cand) as usize) < t {
        return false;
    }
    let words = bg.words();
    for v in mask_ones(cand).collect::<Vec<_>>() {
        let mut next = vec![0u64; words];
        let row = bg.row(v);
        for w in 0..words {
            next[w] = cand[w] & row[w];
        }
        clear_through(&mut next, v);
        stack.push(v as u32);
        if first_rec(bg, &next, t - 1, stack) {
            return true;
        }
        stack.pop();
    }
    false
}

/// Exact maximum clique; returns the size and the lexicographically first
/// witness of that size.
pub fn max_clique(g: &SimpleGraph) -> (u32, Vec<u32>) {
    let bg = BitGraph::from_graph(g);
    if bg.n() == 0 {
        return (0, vec![]);
    }
    let order = degeneracy_order(&bg);
    let candidates: Vec<usize> = order.into_iter().rev().collect();
    let mut best: Vec<usize> = Vec::new();
    let mut current = Vec::new();
    mc_expand(&bg, &candidates, &mut current, &mut best);
    let size = best.len();
    let witness = first_clique(&bg, size).expect("a clique of the optimal size exists");
    (size as u32, witness)
}

/// Branch and bound with a greedy coloring bound.
fn mc_expand(bg: &BitGraph, cands: &[usize], current: &mut Vec<usize>, best: &mut Vec<usize>) {
    if cands.is_empty() {
        if current.len() > best.len() {
            *best = current.clone();
        }
        return;
    }
    // Greedy coloring: vertices in a color class are pairwise nonadjacent,
    // so a clique takes at most one per class. color_bound[i] is the number
    // of classes among cands[..=i].
    let mut color = vec![0usize; cands.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in cands.iter().enumerate() {
        let mut c = 0;
        'class: loop {
            if c == classes.len() {
                classes.push(vec![v]);
                break;
            }
            for &u in &classes[c] {
                if bg.has_edge(u, v) {
                    c += 1;
                    continue 'class;
                }
            }
            classes[c].push(v);
            break;
        }
        color[i] = c + 1;
    }
    // Re-sort candidates by color so the bound is monotone along the scan.
    let mut by_color: Vec<(usize, usize)> = cands.iter().copied().zip(color).collect();
    by_color.sort_by_key(|&(_, c)| c);
    for i in (0..by_color.len()).rev() {
        let (v, c) = by_color[i];
        if current.len() + c <= best.len() {
            return;
        }
        let next: Vec<usize> = by_color[..i]
            .iter()
            .map(|&(u, _)| u)
            .filter(|&u| bg.has_edge(u, v))
            .collect();
        current.push(v);
        mc_expand(bg, &next, current, best);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(g: &SimpleGraph, t: u32) -> u64 {
        match find_clique(
            g,
            &CliqueQuery {
                target_size: t,
                mode: CliqueMode::Count,
            },
        )
        .unwrap()
        {
            CliqueAnswer::Count { count } => count,
            _ => unreachable!(),
        }
    }

    fn exists(g: &SimpleGraph, t: u32) -> bool {
        match find_clique(
            g,
            &CliqueQuery {
                target_size: t,
                mode: CliqueMode::Exists,
            },
        )
        .unwrap()
        {
            CliqueAnswer::Exists { found } => found,
            _ => unreachable!(),
        }
    }

    #[test]
    fn k4_triangle_count() {
        let k4 = SimpleGraph::complete(4).unwrap();
        assert_eq!(count(&k4, 3), 4);
        assert_eq!(count(&k4, 4), 1);
        assert_eq!(count(&k4, 5), 0);
    }

    #[test]
    fn c5_is_triangle_free() {
        let c5 = SimpleGraph::cycle(5).unwrap();
        assert!(!exists(&c5, 3));
        assert_eq!(count(&c5, 2), 5);
    }

    #[test]
    fn join_c5_clique_sizes() {
        let c5 = SimpleGraph::cycle(5).unwrap();
        let j = crate::graph::join_construction(&c5, 2).unwrap();
        assert!(exists(&j, 4));
        assert!(!exists(&j, 5));
        assert_eq!(max_clique(&j).0, 4);
    }

    #[test]
    fn enumerate_triangles_of_k4() {
        let k4 = SimpleGraph::complete(4).unwrap();
        let answer = find_clique(
            &k4,
            &CliqueQuery {
                target_size: 3,
                mode: CliqueMode::Enumerate,
            },
        )
        .unwrap();
        let CliqueAnswer::Enumerate { cliques } = answer else {
            unreachable!()
        };
        assert_eq!(
            cliques,
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]
        );
    }

    #[test]
    fn guards_enforced() {
        let g = SimpleGraph::empty(5);
        let q = CliqueQuery {
            target_size: 13,
            mode: CliqueMode::Count,
        };
        assert!(matches!(
            find_clique(&g, &q),
            Err(Error::SizeLimit(_))
        ));
        let q = CliqueQuery {
            target_size: 0,
            mode: CliqueMode::Exists,
        };
        assert!(find_clique(&g, &q).is_err());
    }

    #[test]
    fn max_clique_witness_is_lex_first() {
        let g = SimpleGraph::new(6, vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
            .unwrap();
        let (size, witness) = max_clique(&g);
        assert_eq!(size, 3);
        assert_eq!(witness, vec![0, 1, 2]);
    }

    #[test]
    fn first_clique_on_bitgraph() {
        let g = SimpleGraph::cycle(5).unwrap();
        let bg = BitGraph::from_graph(&g);
        assert_eq!(first_clique(&bg, 2), Some(vec![0, 1]));
        assert_eq!(first_clique(&bg, 3), None);
    }
}
