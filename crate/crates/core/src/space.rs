use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointset::PointSet;

pub type Point = usize;

/// A stored (non-trivial) line: strictly increasing, at least three points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Line(Vec<Point>);

impl Line {
    pub fn new(mut points: Vec<Point>) -> Result<Self> {
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidLine { line: points, reason: "repeated point".into() });
        }
        if points.len() < 3 {
            return Err(Error::InvalidLine { line: points, reason: "fewer than 3 points".into() });
        }
        Ok(Line(points))
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn meet(&self, s: &PointSet) -> usize {
        self.0.iter().filter(|&&p| s.contains(p)).count()
    }

    pub fn to_set(&self) -> PointSet {
        self.0.iter().copied().collect()
    }
}

/// A finite linear space on points `0..n`. Only lines with at least three
/// points are stored; every other pair spans an implicit two-point line.
/// Lines are kept in lexicographic order, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "RawSpace", try_from = "RawSpace")]
pub struct LinearSpace {
    n: usize,
    lines: Vec<Line>,
    incidence: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    points: usize,
    lines: Vec<Vec<Point>>,
}

impl From<LinearSpace> for RawSpace {
    fn from(s: LinearSpace) -> Self {
        RawSpace { points: s.n, lines: s.lines.into_iter().map(|l| l.0).collect() }
    }
}

impl TryFrom<RawSpace> for LinearSpace {
    type Error = Error;

    fn try_from(r: RawSpace) -> Result<Self> {
        LinearSpace::from_lines(r.points, r.lines)
    }
}

fn pair(a: Point, b: Point) -> (Point, Point) {
    if a < b { (a, b) } else { (b, a) }
}

impl LinearSpace {
    pub fn empty(n: usize) -> Self {
        LinearSpace { n, lines: Vec::new(), incidence: vec![Vec::new(); n] }
    }

    /// Builds a space from explicit lines, rejecting anything that breaks the
    /// axioms: range, size, duplicates, and two lines sharing two points.
    pub fn from_lines<I, L>(n: usize, lines: I) -> Result<Self>
    where
        I: IntoIterator<Item = L>,
        L: Into<Vec<Point>>,
    {
        let mut out: Vec<Line> = Vec::new();
        let mut owner: HashMap<(Point, Point), usize> = HashMap::new();
        for raw in lines {
            let line = Line::new(raw.into())?;
            if let Some(&p) = line.0.iter().find(|&&p| p >= n) {
                return Err(Error::OutOfRange { point: p, n });
            }
            let idx = out.len();
            for (i, &a) in line.0.iter().enumerate() {
                for &b in &line.0[i + 1..] {
                    if let Some(&j) = owner.get(&(a, b)) {
                        let mut w: Vec<Point> = out[j].0.iter().chain(&line.0).copied().filter(|&x| x != a && x != b).collect();
                        w.sort_unstable();
                        w.dedup();
                        return Err(Error::AxiomViolation { pair: (a, b), witnesses: w });
                    }
                    owner.insert((a, b), idx);
                }
            }
            out.push(line);
        }
        out.sort();
        Ok(Self::assemble(n, out))
    }

    fn assemble(n: usize, lines: Vec<Line>) -> Self {
        let mut incidence = vec![Vec::new(); n];
        for (i, l) in lines.iter().enumerate() {
            for &p in &l.0 {
                incidence[p].push(i);
            }
        }
        LinearSpace { n, lines, incidence }
    }

    /// Builds the space whose collinearity relation is the given set of
    /// triples. Lines are the maximal cliques of the relation; a pair whose
    /// neighbourhood is not itself a clique is an axiom violation.
    pub fn validate(n: usize, triples: &[[Point; 3]]) -> Result<Self> {
        let mut rel: HashSet<[Point; 3]> = HashSet::new();
        let mut nbrs: HashMap<(Point, Point), BTreeSet<Point>> = HashMap::new();
        for t in triples {
            let mut t = *t;
            t.sort_unstable();
            if let Some(&p) = t.iter().find(|&&p| p >= n) {
                return Err(Error::OutOfRange { point: p, n });
            }
            if t[0] == t[1] || t[1] == t[2] {
                return Err(Error::InvalidLine { line: t.to_vec(), reason: "repeated point in triple".into() });
            }
            rel.insert(t);
            for (a, b, c) in [(t[0], t[1], t[2]), (t[0], t[2], t[1]), (t[1], t[2], t[0])] {
                nbrs.entry((a, b)).or_default().insert(c);
            }
        }
        let has = |a: Point, b: Point, c: Point| {
            let mut t = [a, b, c];
            t.sort_unstable();
            rel.contains(&t)
        };
        let mut keys: Vec<_> = nbrs.keys().copied().collect();
        keys.sort_unstable();
        let mut lines: BTreeSet<Vec<Point>> = BTreeSet::new();
        for (a, b) in keys {
            let third: Vec<Point> = nbrs[&(a, b)].iter().copied().collect();
            for (i, &x) in third.iter().enumerate() {
                for &y in &third[i + 1..] {
                    if !has(a, x, y) || !has(b, x, y) {
                        return Err(Error::AxiomViolation { pair: (a, b), witnesses: vec![x, y] });
                    }
                }
            }
            let mut line = third;
            line.extend([a, b]);
            line.sort_unstable();
            lines.insert(line);
        }
        Self::from_lines(n, lines)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> PointSet {
        PointSet::range(self.n)
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn line(&self, i: usize) -> &Line {
        &self.lines[i]
    }

    pub fn line_indices_through(&self, p: Point) -> &[usize] {
        &self.incidence[p]
    }

    pub fn lines_through(&self, p: Point) -> impl Iterator<Item = &Line> + '_ {
        self.incidence[p].iter().map(move |&i| &self.lines[i])
    }

    /// Index of the stored line through two distinct points, if the pair is
    /// not trivial.
    pub fn line_index_through(&self, a: Point, b: Point) -> Option<usize> {
        let (a, b) = if self.incidence[a].len() <= self.incidence[b].len() { (a, b) } else { (b, a) };
        self.incidence[a].iter().copied().find(|&i| self.lines[i].contains(b))
    }

    pub fn line_through(&self, a: Point, b: Point) -> Option<&Line> {
        self.line_index_through(a, b).map(|i| &self.lines[i])
    }

    /// The ternary collinearity relation R.
    pub fn collinear(&self, a: Point, b: Point, c: Point) -> bool {
        a != b && b != c && a != c && self.line_through(a, b).is_some_and(|l| l.contains(c))
    }

    pub fn check_set(&self, s: &PointSet) -> Result<()> {
        match s.max() {
            Some(p) if p >= self.n => Err(Error::OutOfRange { point: p, n: self.n }),
            _ => Ok(()),
        }
    }

    /// Sum over stored lines of max(0, |l ∩ S| - 2).
    pub(crate) fn nullity_unchecked(&self, s: &PointSet) -> i64 {
        let mut counts: HashMap<usize, i64> = HashMap::new();
        for p in s.iter() {
            for &i in &self.incidence[p] {
                *counts.entry(i).or_default() += 1;
            }
        }
        counts.values().map(|&c| (c - 2).max(0)).sum()
    }

    pub(crate) fn delta_unchecked(&self, s: &PointSet) -> i64 {
        s.len() as i64 - self.nullity_unchecked(s)
    }

    /// δ(S) = |S| - Σ_l max(0, |l ∩ S| - 2).
    pub fn delta(&self, s: &PointSet) -> Result<i64> {
        self.check_set(s)?;
        Ok(self.delta_unchecked(s))
    }

    /// δ(X/B) = δ(X ∪ B) - δ(B) for disjoint X and B.
    pub fn delta_rel(&self, x: &PointSet, b: &PointSet) -> Result<i64> {
        self.check_set(x)?;
        self.check_set(b)?;
        let both = x.intersection(b);
        if !both.is_empty() {
            return Err(Error::Overlap(both.to_vec()));
        }
        Ok(self.delta_unchecked(&x.union(b)) - self.delta_unchecked(b))
    }

    /// Stored lines meeting B in at least two points.
    pub fn lines_based_in(&self, b: &PointSet) -> Result<Vec<&Line>> {
        self.check_set(b)?;
        Ok(self.lines.iter().filter(|l| l.meet(b) >= 2).collect())
    }

    /// The induced substructure on S, relabelled order-preservingly; the
    /// second component maps new labels back to the old ones.
    pub fn induced_with_map(&self, s: &PointSet) -> Result<(LinearSpace, Vec<Point>)> {
        self.check_set(s)?;
        let back = s.to_vec();
        let mut fwd = vec![usize::MAX; self.n];
        for (i, &p) in back.iter().enumerate() {
            fwd[p] = i;
        }
        let mut seen = HashSet::new();
        let mut lines = Vec::new();
        for &p in &back {
            for &i in &self.incidence[p] {
                if !seen.insert(i) {
                    continue;
                }
                let l: Vec<Point> = self.lines[i].0.iter().filter(|&&q| s.contains(q)).map(|&q| fwd[q]).collect();
                if l.len() >= 3 {
                    lines.push(Line(l));
                }
            }
        }
        lines.sort();
        Ok((Self::assemble(back.len(), lines), back))
    }

    pub fn induced(&self, s: &PointSet) -> Result<LinearSpace> {
        Ok(self.induced_with_map(s)?.0)
    }

    /// Relabels points by `map[old] = new` onto `n` points.
    pub fn relabel(&self, map: &[Point], n: usize) -> Result<LinearSpace> {
        Self::from_lines(n, self.lines.iter().map(|l| l.0.iter().map(|&p| map[p]).collect::<Vec<_>>()))
    }

    pub fn is_trivial_pair(&self, a: Point, b: Point) -> bool {
        self.line_index_through(a, b).is_none()
    }

    /// Number of unordered pairs lying on a stored line.
    pub fn covered_pairs(&self) -> u64 {
        self.lines.iter().map(|l| (l.len() * (l.len() - 1) / 2) as u64).sum()
    }

    pub fn max_line_len(&self) -> usize {
        self.lines.iter().map(Line::len).max().unwrap_or(0)
    }

    pub(crate) fn push_point(&mut self) -> Point {
        self.incidence.push(Vec::new());
        self.n += 1;
        self.n - 1
    }

    /// Adds `p` to an existing line. `p` must not be collinear with any point
    /// of the line already.
    pub(crate) fn extend_line(&mut self, line: usize, p: Point) -> Result<()> {
        if p >= self.n {
            return Err(Error::OutOfRange { point: p, n: self.n });
        }
        if let Some(&q) = self.lines[line].0.iter().find(|&&q| q == p || self.line_index_through(p, q).is_some()) {
            return Err(Error::AxiomViolation { pair: pair(p, q), witnesses: self.lines[line].0.clone() });
        }
        let pts = &mut self.lines[line].0;
        let pos = pts.partition_point(|&q| q < p);
        pts.insert(pos, p);
        // two lines share at most one point, so the order is fixed by the first
        // two entries; only an insertion at the front can move the line
        if pos < 2 {
            let lines = std::mem::take(&mut self.lines);
            let mut lines = lines;
            lines.sort();
            *self = Self::assemble(self.n, lines);
        } else {
            self.incidence[p].push(line);
            self.incidence[p].sort_unstable();
        }
        Ok(())
    }

    pub(crate) fn insert_line(&mut self, points: Vec<Point>) -> Result<usize> {
        let line = Line::new(points)?;
        if let Some(&p) = line.0.iter().find(|&&p| p >= self.n) {
            return Err(Error::OutOfRange { point: p, n: self.n });
        }
        for (i, &a) in line.0.iter().enumerate() {
            for &b in &line.0[i + 1..] {
                if let Some(j) = self.line_index_through(a, b) {
                    return Err(Error::AxiomViolation { pair: (a, b), witnesses: self.lines[j].0.clone() });
                }
            }
        }
        let pos = self.lines.partition_point(|l| *l < line);
        for inc in &mut self.incidence {
            for i in inc.iter_mut() {
                if *i >= pos {
                    *i += 1;
                }
            }
        }
        for &p in &line.0 {
            let inc = &mut self.incidence[p];
            let at = inc.partition_point(|&i| i < pos);
            inc.insert(at, pos);
        }
        self.lines.insert(pos, line);
        Ok(pos)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::fano;

    #[test]
    fn fano_delta() {
        let f = fano();
        assert_eq!(f.delta(&f.points()).unwrap(), 0);
        assert_eq!(f.delta(&PointSet::new()).unwrap(), 0);
        assert_eq!(f.lines().len(), 7);
    }

    #[test]
    fn validate_builds_cliques() {
        let s = LinearSpace::validate(4, &[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap();
        assert_eq!(s.lines().len(), 1);
        assert_eq!(s.lines()[0].points(), &[0, 1, 2, 3]);
        assert_eq!(s.delta(&s.points()).unwrap(), 2);
    }

    #[test]
    fn validate_rejects_broken_clique() {
        let e = LinearSpace::validate(4, &[[0, 1, 2], [0, 1, 3]]).unwrap_err();
        assert!(matches!(e, Error::AxiomViolation { pair: (0, 1), .. }));
    }

    #[test]
    fn from_lines_rejects_double_meet() {
        let e = LinearSpace::from_lines(5, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap_err();
        assert!(matches!(e, Error::AxiomViolation { pair: (0, 1), .. }));
        assert!(matches!(LinearSpace::from_lines(3, vec![vec![0, 1, 3]]), Err(Error::OutOfRange { point: 3, .. })));
    }

    #[test]
    fn delta_rel_overlap() {
        let f = fano();
        assert!(matches!(f.delta_rel(&PointSet::from([0, 1]), &PointSet::from([1])), Err(Error::Overlap(_))));
        assert_eq!(f.delta_rel(&PointSet::from([3]), &PointSet::from([0, 1])).unwrap(), 0);
        assert_eq!(f.delta_rel(&PointSet::from([2]), &PointSet::from([0, 1])).unwrap(), 1);
    }

    #[test]
    fn induced_keeps_big_lines() {
        let s = LinearSpace::from_lines(6, vec![vec![0, 1, 2, 3], vec![3, 4, 5]]).unwrap();
        let t = s.induced(&PointSet::from([1, 2, 3, 4])).unwrap();
        assert_eq!(t.n(), 4);
        assert_eq!(t.lines().len(), 1);
        assert_eq!(t.lines()[0].points(), &[0, 1, 2]);
    }

    #[test]
    fn mutation_keeps_order() {
        let mut s = LinearSpace::from_lines(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let p = s.push_point();
        s.insert_line(vec![0, 3, p]).unwrap();
        let q = s.push_point();
        s.extend_line(s.line_index_through(1, 2).unwrap(), q).unwrap();
        let direct = LinearSpace::from_lines(8, vec![vec![0, 1, 2, 7], vec![3, 4, 5], vec![0, 3, 6]]).unwrap();
        assert_eq!(s, direct);
        assert!(s.insert_line(vec![0, 1, 5]).is_err());
    }
}
