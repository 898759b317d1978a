//! The structural heart of the freeness argument: every oversized clique of
//! a line-colored graph must sit on a dangerous point set of the underlying
//! hypergraph. This module checks that exhaustively on concrete instances.

use serde_json::json;

use crate::cliques::{find_clique_with_guards, CliqueAnswer, CliqueGuards, CliqueMode, CliqueQuery};
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::hypergraph::{type1_witness, type2_on_spine};
use crate::incidence::IncidenceStructure;
use crate::report::{CheckStatus, VerificationReport};
use crate::util::combinations;

/// Enumerates every (s+r)-clique of `g` and verifies that each one contains
/// a Type-1 dangerous subset of size a or a Type-2 dangerous subset of size
/// b with respect to `hx`. Also asserts that no clique lies inside a single
/// line (per-line graphs are s-partite, so that would be a construction
/// bug). Any violation is a hard failure with full witness data.
pub fn check_clique_dangerous_containment(
    g: &SimpleGraph,
    hx: &IncidenceStructure,
    s: u32,
    r: u32,
    a: u32,
    b: u32,
) -> Result<VerificationReport> {
    check_with_guards(g, hx, s, r, a, b, &CliqueGuards::default())
}

pub fn check_with_guards(
    g: &SimpleGraph,
    hx: &IncidenceStructure,
    s: u32,
    r: u32,
    a: u32,
    b: u32,
    guards: &CliqueGuards,
) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    if g.num_vertices() != hx.num_points() {
        return Err(Error::Mismatch(
            "graph and hypergraph have different vertex sets".into(),
        ));
    }
    let clique_size = s + r;
    let answer = find_clique_with_guards(
        g,
        &CliqueQuery {
            target_size: clique_size,
            mode: CliqueMode::Enumerate,
        },
        guards,
    )?;
    let CliqueAnswer::Enumerate { cliques } = answer else {
        unreachable!()
    };
    let cover = hx.pair_cover();
    let params = json!({ "s": s, "r": r, "a": a, "b": b, "clique_size": clique_size });

    let mut violations = Vec::new();
    let mut single_line = Vec::new();
    for clique in &cliques {
        // No line may hold the whole clique.
        if hx.lines().iter().any(|line| {
            clique.iter().all(|p| line.binary_search(p).is_ok())
        }) {
            single_line.push(clique.clone());
            continue;
        }
        let mut contained = false;
        if a <= clique_size {
            'type1: for pick in combinations(clique.len(), a as usize) {
                let subset: Vec<u32> = pick.iter().map(|&i| clique[i]).collect();
                if type1_witness(&cover, &subset).is_some() {
                    contained = true;
                    break 'type1;
                }
            }
        }
        if !contained && b <= clique_size && b > r {
            'type2: for pick in combinations(clique.len(), b as usize) {
                let subset: Vec<u32> = pick.iter().map(|&i| clique[i]).collect();
                for li in 0..hx.num_lines() as u32 {
                    if type2_on_spine(hx, &cover, &subset, b, r, li) {
                        contained = true;
                        break 'type2;
                    }
                }
            }
        }
        if !contained {
            violations.push(clique.clone());
        }
    }

    let pass = violations.is_empty() && single_line.is_empty();
    let report = VerificationReport::new(
        "clique-dangerous-containment",
        if pass { CheckStatus::Pass } else { CheckStatus::Fail },
    )
    .with_value(json!({
        "cliques_checked": cliques.len(),
        "violations": violations.len(),
        "single_line_cliques": single_line.len(),
    }))
    .with_witness(if pass {
        serde_json::Value::Null
    } else {
        json!({ "violating_cliques": violations, "single_line_cliques": single_line })
    })
    .with_params(params)
    .with_elapsed_ms(start.elapsed().as_millis() as u64);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_affine_plane, remove_parallel_class};
    use crate::graph::{build_partite_graph, color_lines};
    use crate::hypergraph::{sample_h1, SamplingMode, SamplingSpec};
    use crate::incidence::StructureKind;

    #[test]
    fn vacuous_pass_with_no_cliques() {
        let hx = IncidenceStructure::new(StructureKind::SampledH1, 4, vec![vec![0, 1]]).unwrap();
        let g = SimpleGraph::new(4, vec![(0, 1)]).unwrap();
        let report = check_clique_dangerous_containment(&g, &hx, 2, 1, 3, 4).unwrap();
        assert_eq!(report.status, CheckStatus::Pass);
        assert_eq!(report.value["cliques_checked"], 0);
    }

    #[test]
    fn full_h_q5_triangles_contain_type1_sets() {
        let (plane, classes) = build_affine_plane(5).unwrap();
        let h = remove_parallel_class(&plane, &classes, classes.vertical_class_index()).unwrap();
        let spec = SamplingSpec {
            lambda: 5.0,
            mode: SamplingMode::LineSubsample,
            seed: 0,
        };
        let h1 = sample_h1(&h, &spec).unwrap();
        for seed in 0..3 {
            let assignment = color_lines(&h1, 2, 1.0, seed).unwrap();
            let g = build_partite_graph(&h1, &assignment).unwrap();
            let report = check_clique_dangerous_containment(&g, &h1, 2, 1, 3, 4).unwrap();
            assert_eq!(report.status, CheckStatus::Pass, "{:?}", report.witness);
            assert!(report.value["cliques_checked"].as_u64().unwrap() > 0);
        }
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let hx = IncidenceStructure::new(StructureKind::SampledH1, 4, vec![vec![0, 1]]).unwrap();
        let g = SimpleGraph::empty(5);
        assert!(matches!(
            check_clique_dangerous_containment(&g, &hx, 2, 1, 3, 4),
            Err(Error::Mismatch(_))
        ));
    }
}
