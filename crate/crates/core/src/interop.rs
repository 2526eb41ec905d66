//! Two-sorted incidence structures, PBD export and the rank-3 matroid view.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{content_lines, parse_points, parse_usize};
use crate::pointset::PointSet;
use crate::space::{LinearSpace, Point};

/// Points and lines as separate sorts; each line is listed with its points.
/// Two-point lines are explicit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceStructure {
    pub points: usize,
    pub lines: Vec<Vec<Point>>,
}

impl IncidenceStructure {
    pub fn incidences(&self) -> usize {
        self.lines.iter().map(Vec::len).sum()
    }

    /// Lines as a sorted set of sorted point lists, for comparisons that
    /// ignore line labels.
    pub fn line_set(&self) -> BTreeSet<Vec<Point>> {
        self.lines
            .iter()
            .map(|l| {
                let mut v = l.clone();
                v.sort_unstable();
                v
            })
            .collect()
    }

    pub fn to_inc_string(&self) -> String {
        let mut s = format!("points {}\n", self.points);
        for (j, l) in self.lines.iter().enumerate() {
            write!(s, "line {j}:").unwrap();
            for p in l {
                write!(s, " {p}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_inc(text: &str) -> Result<Self> {
        let lines = content_lines(text);
        let mut it = lines.iter();
        let points = match it.next() {
            Some(&(no, l)) => match l.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["points", n] => parse_usize(n, no)?,
                _ => return Err(Error::parse(no, format!("expected `points N`, found {l:?}"))),
            },
            None => return Err(Error::parse(0, "empty input")),
        };
        let mut out = Vec::new();
        for &(no, l) in it {
            let (head, body) = l.split_once(':').ok_or_else(|| Error::parse(no, "expected `line j: i1 ... ik`"))?;
            match head.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["line", j] if parse_usize(j, no)? == out.len() => {}
                _ => return Err(Error::parse(no, format!("expected `line {}:`", out.len()))),
            }
            let pts = parse_points(&body.split_whitespace().collect::<Vec<_>>(), no)?;
            if pts.len() < 2 {
                return Err(Error::parse(no, "a line needs at least 2 points"));
            }
            if let Some(&p) = pts.iter().find(|&&p| p >= points) {
                return Err(Error::parse(no, format!("point {p} out of range")));
            }
            out.push(pts);
        }
        Ok(IncidenceStructure { points, lines: out })
    }
}

/// Materialises every line, trivial ones included, sorted lexicographically.
pub fn to_two_sorted(a: &LinearSpace) -> IncidenceStructure {
    let mut lines: Vec<Vec<Point>> = a.lines().iter().map(|l| l.points().to_vec()).collect();
    for x in 0..a.n() {
        for y in x + 1..a.n() {
            if a.is_trivial_pair(x, y) {
                lines.push(vec![x, y]);
            }
        }
    }
    lines.sort();
    IncidenceStructure { points: a.n(), lines }
}

/// R(a, b, c) iff a, b, c are distinct and on a common line; two-point lines
/// disappear.
pub fn to_one_sorted(b: &IncidenceStructure) -> Result<LinearSpace> {
    let mut owner: HashMap<(Point, Point), usize> = HashMap::new();
    for (j, l) in b.lines.iter().enumerate() {
        let mut pts = l.clone();
        pts.sort_unstable();
        if pts.len() < 2 {
            return Err(Error::AxiomFailure(format!("line {j} has fewer than 2 points")));
        }
        if pts.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::AxiomFailure(format!("line {j} repeats a point")));
        }
        if let Some(&p) = pts.iter().find(|&&p| p >= b.points) {
            return Err(Error::AxiomFailure(format!("line {j} has point {p} out of range")));
        }
        for (i, &x) in pts.iter().enumerate() {
            for &y in &pts[i + 1..] {
                if let Some(k) = owner.insert((x, y), j) {
                    return Err(Error::AxiomFailure(format!("points {x} and {y} lie on lines {k} and {j}")));
                }
            }
        }
    }
    for x in 0..b.points {
        for y in x + 1..b.points {
            if !owner.contains_key(&(x, y)) {
                return Err(Error::AxiomFailure(format!("points {x} and {y} lie on no line")));
            }
        }
    }
    LinearSpace::from_lines(b.points, b.lines.iter().filter(|l| l.len() >= 3).cloned())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PbdRecord {
    pub v: usize,
    pub k: BTreeSet<usize>,
    pub lambda: usize,
    pub blocks: Vec<Vec<Point>>,
}

impl PbdRecord {
    pub fn to_pbd_string(&self) -> String {
        let ks: Vec<String> = self.k.iter().map(|k| k.to_string()).collect();
        let mut s = format!("pbd v {} lambda {} k {}\n", self.v, self.lambda, ks.join(","));
        for b in &self.blocks {
            s.push_str("block");
            for p in b {
                write!(s, " {p}").unwrap();
            }
            s.push('\n');
        }
        s
    }
}

/// The (v, K, 1) design of nontrivial lines plus uncovered pairs.
pub fn to_pbd(a: &LinearSpace) -> PbdRecord {
    let blocks = to_two_sorted(a).lines;
    let mut cover: HashMap<(Point, Point), usize> = HashMap::new();
    for b in &blocks {
        for (i, &x) in b.iter().enumerate() {
            for &y in &b[i + 1..] {
                *cover.entry((x, y)).or_default() += 1;
            }
        }
    }
    let lambda = cover.values().copied().max().unwrap_or(1);
    debug_assert!(cover.values().all(|&c| c == lambda));
    PbdRecord { v: a.n(), k: blocks.iter().map(Vec::len).collect(), lambda, blocks }
}

/// Dependence in the rank-3 matroid: four or more points, or three collinear.
pub fn matroid_dependent(a: &LinearSpace, s: &PointSet) -> Result<bool> {
    a.check_set(s)?;
    Ok(match s.len() {
        0..=2 => false,
        3 => {
            let v = s.to_vec();
            a.collinear(v[0], v[1], v[2])
        }
        _ => true,
    })
}

/// Checks: D1, D2 dependent with D1 ∩ D2 independent implies D1 ∪ D2 - {a}
/// dependent for every point a. Sets of five or more points are dependent
/// after removing any point, so only D1, D2 of size 3 or 4 need checking.
/// Returns a witness (D1, D2, a) on failure.
pub fn check_matroid_exchange(a: &LinearSpace, size_limit: usize) -> Result<Option<(PointSet, PointSet, Point)>> {
    if a.n() > size_limit {
        return Err(Error::SizeLimit { what: "matroid exchange check", size: a.n(), limit: size_limit });
    }
    let n = a.n();
    let mut dependent: Vec<PointSet> = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                if a.collinear(x, y, z) {
                    dependent.push(PointSet::from([x, y, z]));
                }
                for w in z + 1..n {
                    dependent.push(PointSet::from([x, y, z, w]));
                }
            }
        }
    }
    for d1 in &dependent {
        for d2 in &dependent {
            if matroid_dependent(a, &d1.intersection(d2))? {
                continue;
            }
            let u = d1.union(d2);
            for p in 0..n {
                if !matroid_dependent(a, &u.without(p))? {
                    return Ok(Some((d1.clone(), d2.clone(), p)));
                }
            }
        }
    }
    Ok(None)
}
