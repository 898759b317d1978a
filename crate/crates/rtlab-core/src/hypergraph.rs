//! Randomized derivation of sub-hypergraphs from the remnant H and exact
//! enumeration of the complete point sets ("dangerous sets") that could host
//! oversized cliques in the derived graphs.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::incidence::{IncidenceStructure, PairCover, StructureKind};
use crate::report::{CheckStatus, VerificationReport};
use crate::rng::{self, Stream};
use crate::util::binomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    LineSubsample,
    VertexEliminate,
}

/// How to derive a random sub-hypergraph: keep each line (or point) with
/// probability `lambda / q`, decided independently per object by the
/// counter-based generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub lambda: f64,
    pub mode: SamplingMode,
    pub seed: u64,
}

fn ambient_order(h: &IncidenceStructure) -> Result<u64> {
    h.uniform_line_size()
        .map(|s| s as u64)
        .ok_or_else(|| Error::InvalidStructure("remnant lines must be uniform".into()))
}

fn check_lambda(lambda: f64, q: u64) -> Result<()> {
    if !(lambda > 0.0 && lambda <= q as f64) {
        return Err(Error::BadLambda(format!(
            "lambda {lambda} outside (0, {q}]"
        )));
    }
    Ok(())
}

/// Keeps each line of the remnant independently with probability
/// `lambda / q`; the point set is unchanged.
pub fn sample_h1(h: &IncidenceStructure, spec: &SamplingSpec) -> Result<IncidenceStructure> {
    if h.kind() != StructureKind::RemnantH {
        return Err(Error::BadTag {
            expected: StructureKind::RemnantH.as_str().into(),
            got: h.kind().as_str().into(),
        });
    }
    if spec.mode != SamplingMode::LineSubsample {
        return Err(Error::BadMode("sample_h1 requires line-subsample mode".into()));
    }
    let q = ambient_order(h)?;
    check_lambda(spec.lambda, q)?;
    let keep_prob = spec.lambda / q as f64;
    let kept: Vec<Vec<u32>> = h
        .lines()
        .iter()
        .enumerate()
        .filter(|(i, _)| rng::unit_f64(spec.seed, Stream::LineKeep, *i as u64) < keep_prob)
        .map(|(_, l)| l.clone())
        .collect();
    IncidenceStructure::new(StructureKind::SampledH1, h.num_points(), kept)
}

/// Eliminates each point independently with probability `1 - lambda / q`,
/// truncates every line to its survivors, reindexes points densely, and
/// prunes lines left with fewer than two points (they carry no edges and no
/// completeness information).
pub fn sample_h2(h: &IncidenceStructure, spec: &SamplingSpec) -> Result<IncidenceStructure> {
    if h.kind() != StructureKind::RemnantH {
        return Err(Error::BadTag {
            expected: StructureKind::RemnantH.as_str().into(),
            got: h.kind().as_str().into(),
        });
    }
    if spec.mode != SamplingMode::VertexEliminate {
        return Err(Error::BadMode("sample_h2 requires vertex-eliminate mode".into()));
    }
    let q = ambient_order(h)?;
    check_lambda(spec.lambda, q)?;
    let keep_prob = spec.lambda / q as f64;
    let mut new_index = vec![u32::MAX; h.num_points()];
    let mut survivors = 0u32;
    for v in 0..h.num_points() {
        if rng::unit_f64(spec.seed, Stream::PointKeep, v as u64) < keep_prob {
            new_index[v] = survivors;
            survivors += 1;
        }
    }
    let lines: Vec<Vec<u32>> = h
        .lines()
        .iter()
        .filter_map(|line| {
            let kept: Vec<u32> = line
                .iter()
                .filter_map(|&p| {
                    let ni = new_index[p as usize];
                    (ni != u32::MAX).then_some(ni)
                })
                .collect();
            (kept.len() >= 2).then_some(kept)
        })
        .collect();
    IncidenceStructure::new(StructureKind::SampledH2, survivors as usize, lines)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DangerousKind {
    Type1,
    Type2,
}

/// A complete vertex set together with the lines witnessing completeness.
/// Type 1 sets are in general position (no covering line holds three of the
/// vertices); Type 2 sets put `|vertices| - r` points on a spine line and
/// the remaining r points off it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DangerousSet {
    pub kind: DangerousKind,
    pub vertices: Vec<u32>,
    pub witness_lines: Vec<u32>,
    pub spine_line: Option<u32>,
    pub off_points: Option<Vec<u32>>,
    pub incidences: u64,
}

/// Guards for the exhaustive enumerators.
#[derive(Debug, Clone, Copy)]
pub struct DangerousGuards {
    pub max_points: usize,
    pub small_size: u32,
}

impl Default for DangerousGuards {
    fn default() -> Self {
        DangerousGuards {
            max_points: 400,
            small_size: 4,
        }
    }
}

fn check_guard(guards: &DangerousGuards, num_points: usize, size: u32) -> Result<()> {
    if num_points > guards.max_points && size > guards.small_size {
        return Err(Error::SizeLimit(format!(
            "{num_points} points with set size {size} exceeds the exhaustive-search guard"
        )));
    }
    Ok(())
}

/// Point-line incidences between `points` and the given lines.
pub fn count_incidences(
    hx: &IncidenceStructure,
    points: &[u32],
    lines: &[u32],
) -> Result<u64> {
    let mut count = 0;
    for &li in lines {
        let line = hx
            .lines()
            .get(li as usize)
            .ok_or_else(|| Error::BadIndex(format!("line {li} out of range")))?;
        count += points.iter().filter(|p| line.binary_search(p).is_ok()).count() as u64;
    }
    Ok(count)
}

/// Sorted, deduplicated list of all lines holding at least two of the set's
/// vertices. Under linearity these are exactly the pair-covering lines.
fn covering_lines(cover: &PairCover, set: &[u32]) -> Option<Vec<u32>> {
    let mut lines = Vec::new();
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            match cover.lines_for(set[i], set[j]) {
                [] => return None,
                ls => lines.extend_from_slice(ls),
            }
        }
    }
    lines.sort_unstable();
    lines.dedup();
    Some(lines)
}

/// Whether `set` is complete with all covering lines distinct per pair,
/// i.e. no line contains three of its points.
pub(crate) fn type1_witness(cover: &PairCover, set: &[u32]) -> Option<Vec<u32>> {
    let pairs = binomial(set.len() as u64, 2);
    let lines = covering_lines(cover, set)?;
    (lines.len() as u64 == pairs).then_some(lines)
}

/// Whether `set` is complete with exactly `b - r` points on line `li`.
pub(crate) fn type2_on_spine(
    hx: &IncidenceStructure,
    cover: &PairCover,
    set: &[u32],
    b: u32,
    r: u32,
    li: u32,
) -> bool {
    let line = hx.line(li as usize);
    let on_spine = set.iter().filter(|p| line.binary_search(p).is_ok()).count() as u32;
    on_spine == b - r && covering_lines(cover, set).is_some()
}

/// All size-a complete sets in general position, each with its witness
/// lines, in lexicographic order.
pub fn enumerate_dangerous_type1(hx: &IncidenceStructure, a: u32) -> Result<Vec<DangerousSet>> {
    enumerate_dangerous_type1_with_guard(hx, a, &DangerousGuards::default())
}

pub fn enumerate_dangerous_type1_with_guard(
    hx: &IncidenceStructure,
    a: u32,
    guards: &DangerousGuards,
) -> Result<Vec<DangerousSet>> {
    if a < 3 {
        return Err(Error::BadParam("type-1 sets need a >= 3".into()));
    }
    check_guard(guards, hx.num_points(), a)?;
    let cover = hx.pair_cover();
    let n = hx.num_points() as u32;
    let mut out = Vec::new();
    let mut set: Vec<u32> = Vec::with_capacity(a as usize);
    let mut used_lines: Vec<u32> = Vec::new();
    extend_type1(hx, &cover, a, n, &mut set, &mut used_lines, &mut out)?;
    Ok(out)
}

fn extend_type1(
    hx: &IncidenceStructure,
    cover: &PairCover,
    a: u32,
    n: u32,
    set: &mut Vec<u32>,
    used_lines: &mut Vec<u32>,
    out: &mut Vec<DangerousSet>,
) -> Result<()> {
    if set.len() == a as usize {
        let mut witness = used_lines.clone();
        witness.sort_unstable();
        let incidences = count_incidences(hx, set, &witness)?;
        out.push(DangerousSet {
            kind: DangerousKind::Type1,
            vertices: set.clone(),
            witness_lines: witness,
            spine_line: None,
            off_points: None,
            incidences,
        });
        return Ok(());
    }
    let start = set.last().map_or(0, |&v| v + 1);
    // Not enough room left to finish the set.
    let remaining = a as usize - set.len();
    if (n - start) < remaining as u32 {
        return Ok(());
    }
    for w in start..n {
        let mut new_lines: Vec<u32> = Vec::with_capacity(set.len());
        let mut ok = true;
        for &x in set.iter() {
            // The pair must be covered, and by a line not already used by
            // another pair (a repeat line would hold three of the points).
            match cover.unique_line(x, w) {
                Some(l) if !used_lines.contains(&l) && !new_lines.contains(&l) => {
                    new_lines.push(l)
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        set.push(w);
        let added = new_lines.len();
        used_lines.extend(new_lines);
        extend_type1(hx, cover, a, n, set, used_lines, out)?;
        used_lines.truncate(used_lines.len() - added);
        set.pop();
    }
    Ok(())
}

/// All size-b complete configurations with `b - r` points on a spine line
/// and r points off it, ordered by (vertices, spine). The same vertex set is
/// reported once per admissible spine.
pub fn enumerate_dangerous_type2(
    hx: &IncidenceStructure,
    b: u32,
    r: u32,
) -> Result<Vec<DangerousSet>> {
    enumerate_dangerous_type2_with_guard(hx, b, r, &DangerousGuards::default())
}

pub fn enumerate_dangerous_type2_with_guard(
    hx: &IncidenceStructure,
    b: u32,
    r: u32,
    guards: &DangerousGuards,
) -> Result<Vec<DangerousSet>> {
    if !(r >= 1 && b > r) {
        return Err(Error::BadParam("type-2 sets need b > r >= 1".into()));
    }
    check_guard(guards, hx.num_points(), b)?;
    let cover = hx.pair_cover();
    let n = hx.num_points() as u32;
    let spine_size = (b - r) as usize;
    let mut out = Vec::new();
    for (li, line) in hx.lines().iter().enumerate() {
        if line.len() < spine_size {
            continue;
        }
        let off_candidates: Vec<u32> =
            (0..n).filter(|p| line.binary_search(p).is_err()).collect();
        for spine_pick in crate::util::combinations(line.len(), spine_size) {
            let spine_points: Vec<u32> = spine_pick.iter().map(|&i| line[i]).collect();
            'off: for off_pick in crate::util::combinations(off_candidates.len(), r as usize) {
                let off_points: Vec<u32> =
                    off_pick.iter().map(|&i| off_candidates[i]).collect();
                // Completeness for the mixed and off-off pairs; the spine
                // covers its own pairs.
                for &t in &spine_points {
                    for &v in &off_points {
                        if !cover.is_covered(t, v) {
                            continue 'off;
                        }
                    }
                }
                for i in 0..off_points.len() {
                    for j in i + 1..off_points.len() {
                        if !cover.is_covered(off_points[i], off_points[j]) {
                            continue 'off;
                        }
                    }
                }
                let mut vertices: Vec<u32> = spine_points
                    .iter()
                    .chain(off_points.iter())
                    .copied()
                    .collect();
                vertices.sort_unstable();
                let mut witness = covering_lines(&cover, &vertices)
                    .expect("pairs checked above");
                if !witness.contains(&(li as u32)) {
                    witness.push(li as u32);
                    witness.sort_unstable();
                }
                let incidences = count_incidences(hx, &vertices, &witness)?;
                out.push(DangerousSet {
                    kind: DangerousKind::Type2,
                    vertices,
                    witness_lines: witness,
                    spine_line: Some(li as u32),
                    off_points: Some(off_points),
                    incidences,
                });
            }
        }
    }
    out.sort_by(|x, y| (&x.vertices, x.spine_line).cmp(&(&y.vertices, y.spine_line)));
    Ok(out)
}

/// Structural report for a sampled hypergraph: exact linearity, the
/// degree/line-size band `[lambda/2, 3*lambda/2]`, and exact dangerous-set
/// counts against their expectation bounds. The band and count comparisons
/// are advisory (the bounds are asymptotic), never hard failures.
pub fn verify_h_properties(
    hx: &IncidenceStructure,
    lambda: f64,
    r: u32,
    a: u32,
    b: u32,
) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let kind = hx.kind();
    if !matches!(kind, StructureKind::SampledH1 | StructureKind::SampledH2) {
        return Err(Error::BadTag {
            expected: "sampled-H1 or sampled-H2".into(),
            got: kind.as_str().into(),
        });
    }
    let degrees = hx.point_degrees();
    let max_line = hx.lines().iter().map(|l| l.len() as u64).max().unwrap_or(0);
    let q = max_line.max(degrees.iter().copied().max().unwrap_or(0) as u64);

    let mut checks = serde_json::Map::new();
    let mut hard_fail = false;
    let mut advisory_out = false;

    let linearity = hx.linearity_violation();
    if linearity.is_some() {
        hard_fail = true;
    }
    checks.insert(
        "linearity".into(),
        json!({
            "status": if linearity.is_none() { "pass" } else { "fail" },
            "witness": linearity.map(|(u, v)| json!([u, v])),
        }),
    );

    let lo = lambda / 2.0;
    let hi = 1.5 * lambda;
    let (band_name, values): (&str, Vec<u64>) = match kind {
        StructureKind::SampledH1 => ("degree-band", degrees.iter().map(|&d| d as u64).collect()),
        _ => ("line-size-band", hx.lines().iter().map(|l| l.len() as u64).collect()),
    };
    let outside = values
        .iter()
        .filter(|&&v| (v as f64) < lo || (v as f64) > hi)
        .count();
    if outside > 0 {
        advisory_out = true;
    }
    let (min_v, max_v) = (
        values.iter().copied().min().unwrap_or(0),
        values.iter().copied().max().unwrap_or(0),
    );
    checks.insert(
        band_name.into(),
        json!({
            "status": if outside == 0 { "pass" } else { "statistical" },
            "band": [lo, hi],
            "min": min_v,
            "max": max_v,
            "outside": outside,
            "total": values.len(),
        }),
    );

    let qf = q as f64;
    let (bound_a, bound_b) = match kind {
        StructureKind::SampledH1 => (
            crate::params::expected_type1_bound_h1(lambda, qf, a),
            crate::params::expected_type2_bound_h1(lambda, qf, b, r),
        ),
        _ => (
            crate::params::expected_type1_bound_h2(lambda, qf, a),
            crate::params::expected_type2_bound_h2(lambda, qf, b, r),
        ),
    };
    let guards = DangerousGuards::default();
    match (
        enumerate_dangerous_type1_with_guard(hx, a, &guards),
        enumerate_dangerous_type2_with_guard(hx, b, r, &guards),
    ) {
        (Ok(d_a), Ok(d_b)) => {
            let count_a = d_a.len() as f64;
            let count_b = d_b.len() as f64;
            if count_a > bound_a || count_b > bound_b {
                advisory_out = true;
            }
            checks.insert(
                "dangerous-counts".into(),
                json!({
                    "status": if count_a <= bound_a && count_b <= bound_b { "pass" } else { "statistical" },
                    "type1_count": d_a.len(),
                    "type1_bound": bound_a,
                    "type2_count": d_b.len(),
                    "type2_bound": bound_b,
                    "advisory": true,
                }),
            );
        }
        (Err(Error::SizeLimit(msg)), _) | (_, Err(Error::SizeLimit(msg))) => {
            checks.insert(
                "dangerous-counts".into(),
                json!({ "status": "skipped", "reason": msg }),
            );
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    }

    let status = if hard_fail {
        CheckStatus::Fail
    } else if advisory_out {
        CheckStatus::Statistical
    } else {
        CheckStatus::Pass
    };
    let mut report = VerificationReport::new("h-properties", status)
        .with_value(serde_json::Value::Object(checks))
        .with_params(json!({
            "kind": kind.as_str(),
            "lambda": lambda,
            "q": q,
            "r": r,
            "a": a,
            "b": b,
            "lambda_exceeds_log_q": lambda > qf.ln(),
        }))
        .with_elapsed_ms(start.elapsed().as_millis() as u64);
    if hard_fail {
        report = report.with_witness(json!({ "linearity": linearity.map(|(u, v)| [u, v]) }));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_affine_plane, remove_parallel_class};

    fn remnant(q: u64) -> IncidenceStructure {
        let (plane, classes) = build_affine_plane(q).unwrap();
        remove_parallel_class(&plane, &classes, classes.vertical_class_index()).unwrap()
    }

    fn spec(lambda: f64, mode: SamplingMode, seed: u64) -> SamplingSpec {
        SamplingSpec { lambda, mode, seed }
    }

    #[test]
    fn h1_full_lambda_keeps_everything() {
        let h = remnant(5);
        let h1 = sample_h1(&h, &spec(5.0, SamplingMode::LineSubsample, 9)).unwrap();
        assert_eq!(h1.kind(), StructureKind::SampledH1);
        assert_eq!(h1.num_lines(), 25);
        assert_eq!(h1.num_points(), 25);
        assert_eq!(h1.lines(), h.lines());
    }

    #[test]
    fn h1_is_deterministic_and_a_subset() {
        let h = remnant(11);
        let s = spec(4.0, SamplingMode::LineSubsample, 42);
        let a = sample_h1(&h, &s).unwrap();
        let b = sample_h1(&h, &s).unwrap();
        assert_eq!(a, b);
        assert!(a.num_lines() <= 121);
        for line in a.lines() {
            assert!(h.lines().binary_search(line).is_ok());
        }
    }

    #[test]
    fn h1_wrong_mode_or_tag_rejected() {
        let h = remnant(3);
        assert!(matches!(
            sample_h1(&h, &spec(2.0, SamplingMode::VertexEliminate, 0)),
            Err(Error::BadMode(_))
        ));
        let h1 = sample_h1(&h, &spec(3.0, SamplingMode::LineSubsample, 0)).unwrap();
        assert!(matches!(
            sample_h1(&h1, &spec(2.0, SamplingMode::LineSubsample, 0)),
            Err(Error::BadTag { .. })
        ));
        assert!(matches!(
            sample_h1(&h, &spec(0.0, SamplingMode::LineSubsample, 0)),
            Err(Error::BadLambda(_))
        ));
        assert!(matches!(
            sample_h1(&h, &spec(3.5, SamplingMode::LineSubsample, 0)),
            Err(Error::BadLambda(_))
        ));
    }

    #[test]
    fn h2_full_lambda_eliminates_nothing() {
        let h = remnant(5);
        let h2 = sample_h2(&h, &spec(5.0, SamplingMode::VertexEliminate, 1)).unwrap();
        assert_eq!(h2.num_points(), 25);
        assert_eq!(h2.num_lines(), 25);
    }

    #[test]
    fn h2_lines_are_truncations_and_linear() {
        let h = remnant(5);
        for seed in 0..20 {
            let h2 = sample_h2(&h, &spec(2.0, SamplingMode::VertexEliminate, seed)).unwrap();
            assert!(h2.linearity_violation().is_none());
            for line in h2.lines() {
                assert!(line.len() >= 2);
            }
        }
    }

    #[test]
    fn type1_triple_on_full_h_q3() {
        let h = remnant(3);
        let sets = enumerate_dangerous_type1(&h, 3).unwrap();
        // {(0,0),(1,1),(2,0)} = {0,4,6} is complete and in general position.
        let target = sets.iter().find(|s| s.vertices == vec![0, 4, 6]).unwrap();
        let witness_contents: Vec<Vec<u32>> = target
            .witness_lines
            .iter()
            .map(|&li| h.line(li as usize).to_vec())
            .collect();
        assert!(witness_contents.contains(&vec![0, 4, 8])); // y = x
        assert!(witness_contents.contains(&vec![0, 3, 6])); // y = 0
        assert!(witness_contents.contains(&vec![2, 4, 6])); // y = 2x + 2
        assert_eq!(target.incidences, 6);
    }

    #[test]
    fn type1_on_single_line_is_empty() {
        let hx = IncidenceStructure::new(StructureKind::SampledH1, 5, vec![vec![0, 1, 2, 3, 4]])
            .unwrap();
        assert!(enumerate_dangerous_type1(&hx, 3).unwrap().is_empty());
    }

    #[test]
    fn type2_spine_too_large_is_empty() {
        let h = remnant(3);
        // No line has q + 1 = 4 points, so b - r = 4 is impossible.
        assert!(enumerate_dangerous_type2(&h, 5, 1).unwrap().is_empty());
    }

    #[test]
    fn type2_q3_spine_plus_point() {
        let h = remnant(3);
        let sets = enumerate_dangerous_type2(&h, 4, 1).unwrap();
        assert!(!sets.is_empty());
        for s in &sets {
            let spine = h.line(s.spine_line.unwrap() as usize);
            let on_spine = s
                .vertices
                .iter()
                .filter(|p| spine.binary_search(p).is_ok())
                .count();
            assert_eq!(on_spine, 3);
            let off = s.off_points.as_ref().unwrap();
            assert_eq!(off.len(), 1);
            assert!(spine.binary_search(&off[0]).is_err());
            // Paper's incidence floor for these parameters: (2r+1)b - 4r^3.
            assert!(s.incidences >= 8, "{s:?}");
        }
    }

    #[test]
    fn count_incidences_basics() {
        let h = remnant(3);
        let line0 = h.line(0).to_vec();
        assert_eq!(count_incidences(&h, &line0, &[0]).unwrap(), 3);
        assert_eq!(count_incidences(&h, &[], &[0, 1]).unwrap(), 0);
        assert!(count_incidences(&h, &[0], &[99]).is_err());
    }

    #[test]
    fn verify_full_h1_degree_band_exact() {
        let h = remnant(5);
        let h1 = sample_h1(&h, &spec(5.0, SamplingMode::LineSubsample, 3)).unwrap();
        let report = verify_h_properties(&h1, 5.0, 1, 3, 4).unwrap();
        assert_eq!(report.value["degree-band"]["outside"], 0);
        assert_eq!(report.value["linearity"]["status"], "pass");
    }

    #[test]
    fn verify_rejects_untagged_input() {
        let h = remnant(3);
        assert!(matches!(
            verify_h_properties(&h, 2.0, 1, 3, 4),
            Err(Error::BadTag { .. })
        ));
    }
}
