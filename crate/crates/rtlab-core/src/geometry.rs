//! Exact finite-geometry constructions: the affine plane AG(2,q) with its
//! parallel classes, the remnant hypergraph left after deleting one class,
//! and the symplectic generalized quadrangle W(q).

use std::collections::{BTreeSet, HashMap};

use serde_json::json;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::incidence::{IncidenceStructure, StructureKind};
use crate::report::{CheckStatus, VerificationReport};

/// Largest affine-plane order built by default; keeps exhaustive pair checks
/// in the low seconds.
pub const DEFAULT_MAX_PLANE_ORDER: u64 = 101;

/// Largest quadrangle order built by default. W(13) already has 2380 points.
pub const DEFAULT_MAX_QUADRANGLE_ORDER: u64 = 13;

/// The q+1 parallel classes of an affine plane: classes `0..q` hold the
/// lines of slope m, class `q` holds the vertical lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelClassification {
    q: u64,
    classes: Vec<Vec<u32>>,
}

impl ParallelClassification {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> &[u32] {
        &self.classes[i]
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Index of the vertical class (slope infinity).
    pub fn vertical_class_index(&self) -> usize {
        self.q as usize
    }
}

/// Builds AG(2,q) over GF(q) with points indexed as `(x, y) -> x*q + y`.
///
/// Non-vertical lines are `{(x, m*x + b) : x in GF(q)}`, one parallel class
/// per slope m; the vertical class holds `{(c, y) : y in GF(q)}` for each c.
pub fn build_affine_plane(q: u64) -> Result<(IncidenceStructure, ParallelClassification)> {
    build_affine_plane_with_limit(q, DEFAULT_MAX_PLANE_ORDER)
}

pub fn build_affine_plane_with_limit(
    q: u64,
    max_order: u64,
) -> Result<(IncidenceStructure, ParallelClassification)> {
    let field = PrimeField::new(q)?;
    if q > max_order {
        return Err(Error::SizeLimit(format!(
            "affine plane order {q} exceeds limit {max_order}"
        )));
    }
    let qu = q as usize;
    let num_points = qu * qu;
    let mut tagged: Vec<(Vec<u32>, u32)> = Vec::with_capacity(num_points + qu);
    for m in 0..q {
        for b in 0..q {
            let pts: Vec<u32> = (0..q)
                .map(|x| (x * q + field.add(field.mul(m, x), b)) as u32)
                .collect();
            tagged.push((pts, m as u32));
        }
    }
    for c in 0..q {
        let pts: Vec<u32> = (0..q).map(|y| (c * q + y) as u32).collect();
        tagged.push((pts, q as u32));
    }
    tagged.sort_unstable();
    let mut classes = vec![Vec::new(); qu + 1];
    let mut lines = Vec::with_capacity(tagged.len());
    for (i, (pts, class)) in tagged.into_iter().enumerate() {
        classes[class as usize].push(i as u32);
        lines.push(pts);
    }
    let plane = IncidenceStructure::new(StructureKind::AffinePlane, num_points, lines)?;
    Ok((plane, ParallelClassification { q, classes }))
}

/// Deletes one parallel class, leaving the q-regular remnant on q^2 points
/// with q^2 lines.
pub fn remove_parallel_class(
    plane: &IncidenceStructure,
    classes: &ParallelClassification,
    class_index: usize,
) -> Result<IncidenceStructure> {
    if plane.kind() != StructureKind::AffinePlane {
        return Err(Error::BadTag {
            expected: StructureKind::AffinePlane.as_str().into(),
            got: plane.kind().as_str().into(),
        });
    }
    if class_index >= classes.num_classes() {
        return Err(Error::BadIndex(format!(
            "class {class_index} out of 0..{}",
            classes.num_classes()
        )));
    }
    let q = classes.q();
    if plane.num_points() != (q * q) as usize || plane.num_lines() != (q * q + q) as usize {
        return Err(Error::Mismatch(
            "classification does not match the given plane".into(),
        ));
    }
    let drop: BTreeSet<u32> = classes.class(class_index).iter().copied().collect();
    let kept: Vec<Vec<u32>> = plane
        .lines()
        .iter()
        .enumerate()
        .filter(|(i, _)| !drop.contains(&(*i as u32)))
        .map(|(_, l)| l.clone())
        .collect();
    IncidenceStructure::new(StructureKind::RemnantH, plane.num_points(), kept)
}

/// Builds the symplectic quadrangle W(q) of order (q,q): points are the
/// projective points of 4-space over GF(q), lines the totally isotropic
/// 2-dimensional subspaces of the alternating form
/// `<x,y> = x1*y2 - x2*y1 + x3*y4 - x4*y3`.
pub fn build_w_quadrangle(q: u64) -> Result<IncidenceStructure> {
    build_w_quadrangle_with_limit(q, DEFAULT_MAX_QUADRANGLE_ORDER)
}

pub fn build_w_quadrangle_with_limit(q: u64, max_order: u64) -> Result<IncidenceStructure> {
    let field = PrimeField::new(q)?;
    if q > max_order {
        return Err(Error::SizeLimit(format!(
            "quadrangle order {q} exceeds limit {max_order}"
        )));
    }

    // Projective points as canonical vectors (first nonzero coordinate = 1),
    // indexed in lexicographic order.
    let mut points: Vec<[u64; 4]> = Vec::new();
    let mut index: HashMap<[u64; 4], u32> = HashMap::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    let v = [a, b, c, d];
                    if v == [0, 0, 0, 0] {
                        continue;
                    }
                    let first = v.iter().copied().find(|&x| x != 0).unwrap();
                    if first == 1 {
                        index.insert(v, points.len() as u32);
                        points.push(v);
                    }
                }
            }
        }
    }
    let expected_points = ((q * q + 1) * (q + 1)) as usize;
    debug_assert_eq!(points.len(), expected_points);

    let form = |x: &[u64; 4], y: &[u64; 4]| -> u64 {
        let pos = field.add(field.mul(x[0], y[1]), field.mul(x[2], y[3]));
        let neg = field.add(field.mul(x[1], y[0]), field.mul(x[3], y[2]));
        field.sub(pos, neg)
    };
    let normalize = |v: [u64; 4]| -> Result<[u64; 4]> {
        let first = v.iter().copied().find(|&x| x != 0).ok_or_else(|| {
            Error::InvalidStructure("zero vector in projective span".into())
        })?;
        let inv = field.inv(first)?;
        Ok([
            field.mul(v[0], inv),
            field.mul(v[1], inv),
            field.mul(v[2], inv),
            field.mul(v[3], inv),
        ])
    };

    // Every isotropic pair spans a totally isotropic 2-space; collect the
    // spans once each.
    let mut lines: BTreeSet<Vec<u32>> = BTreeSet::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (u, v) = (&points[i], &points[j]);
            if form(u, v) != 0 {
                continue;
            }
            let mut line = Vec::with_capacity(q as usize + 1);
            line.push(j as u32);
            for t in 0..q {
                let w = [
                    field.add(u[0], field.mul(t, v[0])),
                    field.add(u[1], field.mul(t, v[1])),
                    field.add(u[2], field.mul(t, v[2])),
                    field.add(u[3], field.mul(t, v[3])),
                ];
                line.push(index[&normalize(w)?]);
            }
            line.sort_unstable();
            lines.insert(line);
        }
    }
    let expected_lines = ((q * q + 1) * (q + 1)) as usize;
    if lines.len() != expected_lines {
        return Err(Error::InvalidStructure(format!(
            "W({q}) produced {} lines, expected {expected_lines}",
            lines.len()
        )));
    }
    IncidenceStructure::new(
        StructureKind::Quadrangle,
        points.len(),
        lines.into_iter().collect(),
    )
}

/// Exhaustively checks the generalized-quadrangle axioms against the given
/// structure. Orders (p, q) are inferred from the first line size and the
/// first point degree; failures carry a witness.
pub fn verify_gq_axioms(structure: &IncidenceStructure) -> VerificationReport {
    let start = std::time::Instant::now();
    let n = structure.num_points();
    let m = structure.num_lines();
    let degrees = structure.point_degrees();
    let p_order = structure.lines().first().map_or(0, |l| l.len() as u64).saturating_sub(1);
    let q_order = degrees.first().copied().unwrap_or(0) as u64;
    let q_order = q_order.saturating_sub(1);

    let cover = structure.pair_cover();
    let mut checks = serde_json::Map::new();
    let mut witness = serde_json::Value::Null;
    let mut all_pass = true;
    let record = |name: &str,
                      pass: bool,
                      detail: serde_json::Value,
                      checks: &mut serde_json::Map<String, serde_json::Value>,
                      witness: &mut serde_json::Value,
                      all_pass: &mut bool| {
        checks.insert(
            name.to_string(),
            json!({ "status": if pass { "pass" } else { "fail" }, "detail": detail }),
        );
        if !pass {
            *all_pass = false;
            if witness.is_null() {
                *witness = json!({ "axiom": name, "detail": detail });
            }
        }
    };

    // Q1: any two points lie in at most one line.
    let q1_violation = structure.linearity_violation();
    record(
        "q1",
        q1_violation.is_none(),
        match q1_violation {
            None => serde_json::Value::Null,
            Some((u, v)) => json!({ "pair": [u, v] }),
        },
        &mut checks,
        &mut witness,
        &mut all_pass,
    );

    // Q2: for a point u off a line L there is exactly one point of L
    // collinear with u (hence no three lines form a triangle).
    let mut q2_witness = serde_json::Value::Null;
    let mut q2_ok = true;
    'outer: for (li, line) in structure.lines().iter().enumerate() {
        let on_line: BTreeSet<u32> = line.iter().copied().collect();
        for u in 0..n as u32 {
            if on_line.contains(&u) {
                continue;
            }
            let collinear: Vec<u32> = line
                .iter()
                .copied()
                .filter(|&w| cover.is_covered(u, w))
                .collect();
            if collinear.len() != 1 {
                q2_ok = false;
                q2_witness = json!({ "point": u, "line": li, "collinear": collinear });
                break 'outer;
            }
        }
    }
    record("q2", q2_ok, q2_witness, &mut checks, &mut witness, &mut all_pass);

    // Q3: uniform line size p+1 and uniform point degree q+1.
    let bad_line = structure
        .lines()
        .iter()
        .position(|l| l.len() as u64 != p_order + 1);
    let bad_point = degrees.iter().position(|&d| d as u64 != q_order + 1);
    record(
        "q3",
        bad_line.is_none() && bad_point.is_none(),
        json!({ "bad_line": bad_line, "bad_point": bad_point }),
        &mut checks,
        &mut witness,
        &mut all_pass,
    );

    // Q4: |P| = (pq+1)(p+1) and |L| = (pq+1)(q+1).
    let expect_points = (p_order * q_order + 1) * (p_order + 1);
    let expect_lines = (p_order * q_order + 1) * (q_order + 1);
    record(
        "q4",
        n as u64 == expect_points && m as u64 == expect_lines,
        json!({ "points": n, "expected_points": expect_points,
                "lines": m, "expected_lines": expect_lines }),
        &mut checks,
        &mut witness,
        &mut all_pass,
    );

    // Q5: p <= q^2 and q <= p^2.
    record(
        "q5",
        p_order <= q_order * q_order && q_order <= p_order * p_order,
        json!({ "p": p_order, "q": q_order }),
        &mut checks,
        &mut witness,
        &mut all_pass,
    );

    VerificationReport::new(
        "gq-axioms",
        if all_pass { CheckStatus::Pass } else { CheckStatus::Fail },
    )
    .with_value(serde_json::Value::Object(checks))
    .with_witness(witness)
    .with_params(json!({ "p": p_order, "q": q_order, "kind": structure.kind().as_str() }))
    .with_elapsed_ms(start.elapsed().as_millis() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_q2_counts() {
        let (plane, classes) = build_affine_plane(2).unwrap();
        assert_eq!(plane.num_points(), 4);
        assert_eq!(plane.num_lines(), 6);
        assert_eq!(classes.num_classes(), 3);
        for class in classes.classes() {
            assert_eq!(class.len(), 2);
        }
    }

    #[test]
    fn plane_q3_has_expected_slope_line() {
        let (plane, _) = build_affine_plane(3).unwrap();
        assert_eq!(plane.num_lines(), 12);
        // y = 2x + 2 over GF(3) passes through (0,2),(1,1),(2,0).
        assert!(plane.lines().iter().any(|l| l == &vec![2, 4, 6]));
    }

    #[test]
    fn plane_pairs_covered_exactly_once() {
        for q in [2u64, 3, 5] {
            let (plane, _) = build_affine_plane(q).unwrap();
            let cover = plane.pair_cover();
            let n = plane.num_points() as u32;
            for u in 0..n {
                for v in u + 1..n {
                    assert_eq!(cover.lines_for(u, v).len(), 1, "q={q} pair ({u},{v})");
                }
            }
        }
    }

    #[test]
    fn remnant_is_q_regular_with_q2_lines() {
        let (plane, classes) = build_affine_plane(3).unwrap();
        let h = remove_parallel_class(&plane, &classes, classes.vertical_class_index()).unwrap();
        assert_eq!(h.kind(), StructureKind::RemnantH);
        assert_eq!(h.num_points(), 9);
        assert_eq!(h.num_lines(), 9);
        assert!(h.point_degrees().iter().all(|&d| d == 3));

        let (plane2, classes2) = build_affine_plane(2).unwrap();
        for c in 0..classes2.num_classes() {
            let h2 = remove_parallel_class(&plane2, &classes2, c).unwrap();
            assert_eq!(h2.num_lines(), 4);
            assert!(h2.point_degrees().iter().all(|&d| d == 2));
        }
    }

    #[test]
    fn remnant_vertical_pair_uncovered() {
        let (plane, classes) = build_affine_plane(3).unwrap();
        let h = remove_parallel_class(&plane, &classes, classes.vertical_class_index()).unwrap();
        // (0,0) and (0,1) sat on a vertical line, which was removed.
        assert!(h.pair_cover().lines_for(0, 1).is_empty());
    }

    #[test]
    fn remove_class_bad_index() {
        let (plane, classes) = build_affine_plane(3).unwrap();
        assert!(matches!(
            remove_parallel_class(&plane, &classes, 4),
            Err(Error::BadIndex(_))
        ));
    }

    #[test]
    fn parallel_classes_partition_the_points() {
        let (plane, classes) = build_affine_plane(5).unwrap();
        for class in classes.classes() {
            let mut seen = vec![false; plane.num_points()];
            for &li in class {
                for &p in plane.line(li as usize) {
                    assert!(!seen[p as usize], "class lines overlap");
                    seen[p as usize] = true;
                }
            }
            assert!(seen.iter().all(|&s| s), "class does not cover all points");
        }
    }

    #[test]
    fn w2_and_w3_sizes() {
        let w2 = build_w_quadrangle(2).unwrap();
        assert_eq!(w2.num_points(), 15);
        assert_eq!(w2.num_lines(), 15);
        assert!(w2.lines().iter().all(|l| l.len() == 3));
        assert!(w2.point_degrees().iter().all(|&d| d == 3));

        let w3 = build_w_quadrangle(3).unwrap();
        assert_eq!(w3.num_points(), 40);
        assert_eq!(w3.num_lines(), 40);
        assert!(w3.lines().iter().all(|l| l.len() == 4));
        assert!(w3.point_degrees().iter().all(|&d| d == 4));
    }

    #[test]
    fn w2_satisfies_all_axioms() {
        let w2 = build_w_quadrangle(2).unwrap();
        let report = verify_gq_axioms(&w2);
        assert_eq!(report.status, CheckStatus::Pass, "{:?}", report.value);
    }

    #[test]
    fn remnant_fails_q2_with_witness() {
        let (plane, classes) = build_affine_plane(3).unwrap();
        let h = remove_parallel_class(&plane, &classes, classes.vertical_class_index()).unwrap();
        let report = verify_gq_axioms(&h);
        assert_eq!(report.status, CheckStatus::Fail);
        assert_eq!(report.value["q2"]["status"], "fail");
        assert!(!report.witness.is_null());
    }

    #[test]
    fn size_limits_enforced() {
        assert!(matches!(
            build_affine_plane_with_limit(103, 101),
            Err(Error::SizeLimit(_))
        ));
        assert!(matches!(
            build_w_quadrangle_with_limit(17, 13),
            Err(Error::SizeLimit(_))
        ));
        assert!(matches!(build_w_quadrangle(9), Err(Error::NotPrime(9))));
    }

    #[test]
    fn construction_is_deterministic() {
        let a = build_affine_plane(5).unwrap().0.to_text();
        let b = build_affine_plane(5).unwrap().0.to_text();
        assert_eq!(a, b);
        let w_a = build_w_quadrangle(3).unwrap().to_text();
        let w_b = build_w_quadrangle(3).unwrap().to_text();
        assert_eq!(w_a, w_b);
    }
}
