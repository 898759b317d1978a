//! Point-line incidence structures and their canonical text format.
//!
//! Lines are kept sorted lexicographically at all times, so the in-memory
//! line order, the on-disk order, and every index recorded against a
//! structure agree. Serialization is bit-exact: writing and re-reading a
//! structure reproduces the same bytes.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::fnv1a64;

/// First line of every hypergraph file.
pub const HYPERGRAPH_HEADER: &str = "rtlab-hypergraph v1";

/// Pair-scan budget for the linearity validation performed at construction
/// time. Structures whose total pair count exceeds this only arise from
/// constructions that guarantee linearity; `linearity_violation` is always
/// available for an explicit full scan.
const LINEARITY_SCAN_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StructureKind {
    #[serde(rename = "affine-plane")]
    AffinePlane,
    #[serde(rename = "remnant-H")]
    RemnantH,
    #[serde(rename = "sampled-H1")]
    SampledH1,
    #[serde(rename = "sampled-H2")]
    SampledH2,
    #[serde(rename = "quadrangle")]
    Quadrangle,
}

impl StructureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StructureKind::AffinePlane => "affine-plane",
            StructureKind::RemnantH => "remnant-H",
            StructureKind::SampledH1 => "sampled-H1",
            StructureKind::SampledH2 => "sampled-H2",
            StructureKind::Quadrangle => "quadrangle",
        }
    }

    /// Kinds whose invariant includes linearity (every point pair in at most
    /// one line).
    fn requires_linearity(&self) -> bool {
        !matches!(self, StructureKind::AffinePlane)
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StructureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "affine-plane" => StructureKind::AffinePlane,
            "remnant-H" => StructureKind::RemnantH,
            "sampled-H1" => StructureKind::SampledH1,
            "sampled-H2" => StructureKind::SampledH2,
            "quadrangle" => StructureKind::Quadrangle,
            other => {
                return Err(Error::BadTag {
                    expected: "a known structure kind".into(),
                    got: other.into(),
                })
            }
        })
    }
}

/// Canonical pair key with the endpoints ordered.
#[inline]
pub fn pair_key(u: u32, v: u32) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    ((a as u64) << 32) | b as u64
}

/// A hypergraph given by points `0..num_points` and lines as strictly
/// ascending point-index sequences, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceStructure {
    kind: StructureKind,
    num_points: usize,
    lines: Vec<Vec<u32>>,
}

impl IncidenceStructure {
    /// Validates indices, sorts lines into canonical order, and (within the
    /// scan budget) checks linearity for kinds that promise it.
    pub fn new(kind: StructureKind, num_points: usize, mut lines: Vec<Vec<u32>>) -> Result<Self> {
        for line in &lines {
            for w in line.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidStructure(format!(
                        "line {line:?} is not strictly increasing"
                    )));
                }
            }
            if let Some(&last) = line.last() {
                if last as usize >= num_points {
                    return Err(Error::InvalidStructure(format!(
                        "line {line:?} references point {last} outside 0..{num_points}"
                    )));
                }
            }
        }
        lines.sort_unstable();
        let s = IncidenceStructure {
            kind,
            num_points,
            lines,
        };
        if kind.requires_linearity() && s.total_pairs_in_lines() <= LINEARITY_SCAN_BUDGET {
            if let Some((u, v)) = s.linearity_violation() {
                return Err(Error::InvalidStructure(format!(
                    "kind {kind} requires linearity but pair ({u},{v}) lies in two lines"
                )));
            }
        }
        Ok(s)
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Vec<u32>] {
        &self.lines
    }

    pub fn line(&self, i: usize) -> &[u32] {
        &self.lines[i]
    }

    /// Number of lines through each point.
    pub fn point_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.num_points];
        for line in &self.lines {
            for &p in line {
                deg[p as usize] += 1;
            }
        }
        deg
    }

    /// Line size when all lines have the same size.
    pub fn uniform_line_size(&self) -> Option<usize> {
        let first = self.lines.first()?.len();
        self.lines.iter().all(|l| l.len() == first).then_some(first)
    }

    fn total_pairs_in_lines(&self) -> u64 {
        self.lines
            .iter()
            .map(|l| (l.len() as u64) * (l.len() as u64 - 1) / 2)
            .sum()
    }

    /// First point pair contained in two distinct lines, if any.
    pub fn linearity_violation(&self) -> Option<(u32, u32)> {
        let mut keys: Vec<u64> = Vec::with_capacity(self.total_pairs_in_lines() as usize);
        for line in &self.lines {
            for i in 0..line.len() {
                for j in i + 1..line.len() {
                    keys.push(pair_key(line[i], line[j]));
                }
            }
        }
        keys.sort_unstable();
        for w in keys.windows(2) {
            if w[0] == w[1] {
                return Some(((w[0] >> 32) as u32, w[0] as u32));
            }
        }
        None
    }

    /// Map from covered pairs to the lines covering them.
    pub fn pair_cover(&self) -> PairCover {
        let mut map: HashMap<u64, Vec<u32>> = HashMap::new();
        for (li, line) in self.lines.iter().enumerate() {
            for i in 0..line.len() {
                for j in i + 1..line.len() {
                    map.entry(pair_key(line[i], line[j]))
                        .or_default()
                        .push(li as u32);
                }
            }
        }
        PairCover { map }
    }

    /// Applies a point permutation (`perm[old] = new`) and re-canonicalizes.
    pub fn relabeled(&self, perm: &[u32]) -> Result<Self> {
        if perm.len() != self.num_points {
            return Err(Error::BadParam("permutation length mismatch".into()));
        }
        let mut seen = vec![false; self.num_points];
        for &p in perm {
            let idx = p as usize;
            if idx >= self.num_points || seen[idx] {
                return Err(Error::BadParam("not a permutation".into()));
            }
            seen[idx] = true;
        }
        let lines = self
            .lines
            .iter()
            .map(|line| {
                let mut l: Vec<u32> = line.iter().map(|&p| perm[p as usize]).collect();
                l.sort_unstable();
                l
            })
            .collect();
        IncidenceStructure::new(self.kind, self.num_points, lines)
    }

    /// Stable content hash used to tie derived artifacts to their source.
    pub fn fingerprint(&self) -> u64 {
        fnv1a64(self.to_text().as_bytes())
    }

    /// Canonical text form (UTF-8, LF, lines sorted lexicographically).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(HYPERGRAPH_HEADER);
        out.push('\n');
        out.push_str(&format!("kind {}\n", self.kind));
        out.push_str(&format!("points {}\n", self.num_points));
        out.push_str(&format!("lines {}\n", self.lines.len()));
        for line in &self.lines {
            out.push('L');
            for p in line {
                out.push(' ');
                out.push_str(&p.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut it = text.lines().enumerate();
        let header = next_line(&mut it)?;
        if header.1 != HYPERGRAPH_HEADER {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header {HYPERGRAPH_HEADER:?}"),
            });
        }
        let kind: StructureKind = parse_field(next_line(&mut it)?, "kind")?.parse()?;
        let num_points: usize = parse_numeric(next_line(&mut it)?, "points")?;
        let num_lines: usize = parse_numeric(next_line(&mut it)?, "lines")?;
        let mut lines = Vec::with_capacity(num_lines);
        for _ in 0..num_lines {
            let (ln, row) = next_line(&mut it)?;
            let mut parts = row.split_whitespace();
            if parts.next() != Some("L") {
                return Err(Error::Parse {
                    line: ln,
                    msg: "expected line record starting with 'L'".into(),
                });
            }
            let idxs: std::result::Result<Vec<u32>, _> =
                parts.map(|p| p.parse::<u32>()).collect();
            lines.push(idxs.map_err(|e| Error::Parse {
                line: ln,
                msg: e.to_string(),
            })?);
        }
        if it.next().is_some() {
            return Err(Error::Parse {
                line: num_lines + 5,
                msg: "trailing content after line records".into(),
            });
        }
        let mut sorted = lines.clone();
        sorted.sort_unstable();
        if sorted != lines {
            return Err(Error::Parse {
                line: 5,
                msg: "line records are not sorted lexicographically".into(),
            });
        }
        IncidenceStructure::new(kind, num_points, lines)
    }
}

fn next_line<'a, I: Iterator<Item = (usize, &'a str)>>(it: &mut I) -> Result<(usize, &'a str)> {
    it.next()
        .map(|(i, s)| (i + 1, s))
        .ok_or(Error::Parse {
            line: 0,
            msg: "unexpected end of file".into(),
        })
}

fn parse_field<'a>((ln, row): (usize, &'a str), key: &str) -> Result<&'a str> {
    row.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| Error::Parse {
            line: ln,
            msg: format!("expected '{key} <value>'"),
        })
}

fn parse_numeric<T: FromStr>((ln, row): (usize, &str), key: &str) -> Result<T> {
    parse_field((ln, row), key)?.parse().map_err(|_| Error::Parse {
        line: ln,
        msg: format!("invalid {key} value"),
    })
}

/// Pair-to-lines index for a fixed structure.
pub struct PairCover {
    map: HashMap<u64, Vec<u32>>,
}

impl PairCover {
    pub fn lines_for(&self, u: u32, v: u32) -> &[u32] {
        self.map.get(&pair_key(u, v)).map_or(&[], |v| v.as_slice())
    }

    /// The covering line when the pair is covered exactly once.
    pub fn unique_line(&self, u: u32, v: u32) -> Option<u32> {
        match self.lines_for(u, v) {
            [l] => Some(*l),
            _ => None,
        }
    }

    pub fn is_covered(&self, u: u32, v: u32) -> bool {
        !self.lines_for(u, v).is_empty()
    }

    pub fn covered_pair_count(&self) -> usize {
        self.map.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> IncidenceStructure {
        IncidenceStructure::new(
            StructureKind::RemnantH,
            4,
            vec![vec![2, 3], vec![0, 1], vec![0, 2]],
        )
        .unwrap()
    }

    #[test]
    fn lines_are_canonically_sorted() {
        let s = tiny();
        assert_eq!(s.lines(), &[vec![0, 1], vec![0, 2], vec![2, 3]]);
    }

    #[test]
    fn rejects_bad_lines() {
        let err = IncidenceStructure::new(StructureKind::RemnantH, 4, vec![vec![1, 1]]);
        assert!(matches!(err, Err(Error::InvalidStructure(_))));
        let err = IncidenceStructure::new(StructureKind::RemnantH, 4, vec![vec![3, 2]]);
        assert!(matches!(err, Err(Error::InvalidStructure(_))));
        let err = IncidenceStructure::new(StructureKind::RemnantH, 4, vec![vec![0, 4]]);
        assert!(matches!(err, Err(Error::InvalidStructure(_))));
    }

    #[test]
    fn rejects_nonlinear_tagged_structure() {
        let err = IncidenceStructure::new(
            StructureKind::SampledH1,
            4,
            vec![vec![0, 1, 2], vec![0, 1, 3]],
        );
        assert!(matches!(err, Err(Error::InvalidStructure(_))));
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let s = tiny();
        let text = s.to_text();
        let back = IncidenceStructure::from_text(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn from_text_rejects_unsorted_records() {
        let text = "rtlab-hypergraph v1\nkind remnant-H\npoints 4\nlines 2\nL 2 3\nL 0 1\n";
        assert!(matches!(
            IncidenceStructure::from_text(text),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn pair_cover_indexes_lines() {
        let s = tiny();
        let cover = s.pair_cover();
        assert_eq!(cover.unique_line(1, 0), Some(0));
        assert_eq!(cover.unique_line(0, 2), Some(1));
        assert!(!cover.is_covered(1, 3));
        assert_eq!(cover.covered_pair_count(), 3);
    }

    #[test]
    fn relabel_validates_permutation() {
        let s = tiny();
        assert!(s.relabeled(&[0, 0, 1, 2]).is_err());
        assert!(s.relabeled(&[0, 1, 2]).is_err());
        let r = s.relabeled(&[3, 2, 1, 0]).unwrap();
        assert_eq!(r.lines(), &[vec![0, 1], vec![1, 3], vec![2, 3]]);
    }
}
