//! The predimension δ and what it induces: strong substructures, intrinsic
//! closure, the dimension function d and its closure operator.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{bits, superset_min, Frame};
use crate::pointset::PointSet;
use crate::space::{LinearSpace, Point};

/// Limits for the exhaustive searches behind every query in this module.
#[derive(Clone, Copy, Debug)]
pub struct Search {
    /// Branch-and-bound nodes allowed per query before `SizeLimit`.
    pub node_budget: u64,
}

impl Default for Search {
    fn default() -> Self {
        Search { node_budget: 1 << 26 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongCheck {
    pub strong: bool,
    pub witness: Option<PointSet>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlatnessMode {
    Delta,
    D,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub holds: bool,
    pub lhs: i64,
    pub rhs: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExchangeFailure {
    NotExtensive { x: PointSet },
    NotMonotone { x: PointSet, y: PointSet },
    NotIdempotent { x: PointSet },
    Exchange { x: PointSet, a: Point, b: Point },
}

/// Splits `hi \ lo` into independent pieces for minimizing δ over
/// `lo ⊆ X ⊆ hi`. Points on at most one live line are peeled first; the rest
/// is grouped by shared live lines, and δ is additive across groups.
fn components(space: &LinearSpace, lo: &PointSet, hi: &PointSet) -> Vec<(Vec<Point>, Vec<Point>)> {
    let mut cand = hi.difference(lo);
    let mut count: HashMap<usize, usize> = HashMap::new();
    for p in lo.union(&cand).iter() {
        for &l in space.line_indices_through(p) {
            *count.entry(l).or_default() += 1;
        }
    }
    let live = |p: Point, count: &HashMap<usize, usize>| {
        space.line_indices_through(p).iter().filter(|l| count.get(l).copied().unwrap_or(0) >= 3).count()
    };
    let mut queue: Vec<Point> = cand.to_vec();
    while let Some(p) = queue.pop() {
        if !cand.contains(p) || live(p, &count) > 1 {
            continue;
        }
        cand.remove(p);
        for &l in space.line_indices_through(p) {
            let c = count.get_mut(&l).unwrap();
            *c -= 1;
            if *c == 2 {
                queue.extend(space.line(l).points().iter().filter(|&&q| cand.contains(q)));
            }
        }
    }
    // union-find over remaining candidates
    let pts = cand.to_vec();
    let idx: HashMap<Point, usize> = pts.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut parent: Vec<usize> = (0..pts.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let live_lines: Vec<usize> = count.iter().filter(|(_, &c)| c >= 3).map(|(&l, _)| l).collect();
    for &l in &live_lines {
        let mut first = None;
        for q in space.line(l).points() {
            if let Some(&j) = idx.get(q) {
                match first {
                    None => first = Some(j),
                    Some(f) => {
                        let (a, b) = (find(&mut parent, f), find(&mut parent, j));
                        parent[a] = b;
                    }
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<Point>> = HashMap::new();
    for (i, &p) in pts.iter().enumerate() {
        groups.entry(find(&mut parent, i)).or_default().push(p);
    }
    let mut out: Vec<(Vec<Point>, Vec<Point>)> = groups
        .into_values()
        .map(|comp| {
            let mut anchors = PointSet::new();
            for &p in &comp {
                for &l in space.line_indices_through(p) {
                    if count.get(&l).copied().unwrap_or(0) >= 3 {
                        anchors.extend(space.line(l).points().iter().copied().filter(|&q| lo.contains(q)));
                    }
                }
            }
            (comp, anchors.to_vec())
        })
        .collect();
    out.sort();
    out
}

impl Search {
    /// Minimum of δ over `lo ⊆ X ⊆ hi` and the least minimizer.
    pub fn min_delta(&self, space: &LinearSpace, lo: &PointSet, hi: &PointSet) -> Result<(i64, PointSet)> {
        space.check_set(lo)?;
        space.check_set(hi)?;
        if !lo.is_subset(hi) {
            return Err(Error::Invalid("lower set is not contained in upper set".into()));
        }
        let mut budget = self.node_budget;
        let mut value = space.delta_unchecked(lo);
        let mut best = lo.clone();
        for (comp, anchors) in components(space, lo, hi) {
            let mut pts = anchors;
            pts.extend(&comp);
            pts.sort_unstable();
            let frame = Frame::new(space, pts)?;
            let lo_m = frame.mask(lo);
            let (v, m) = frame.least_minimizer(lo_m, frame.all(), &mut budget)?;
            value += v - frame.delta(lo_m);
            best.extend(frame.set(m & !lo_m).iter());
        }
        Ok((value, best))
    }

    pub fn d(&self, space: &LinearSpace, x: &PointSet) -> Result<i64> {
        Ok(self.min_delta(space, x, &space.points())?.0)
    }

    pub fn icl(&self, space: &LinearSpace, x: &PointSet) -> Result<PointSet> {
        Ok(self.min_delta(space, x, &space.points())?.1)
    }

    pub fn is_strong(&self, space: &LinearSpace, lo: &PointSet, hi: &PointSet) -> Result<StrongCheck> {
        let (v, w) = self.min_delta(space, lo, hi)?;
        let strong = v >= space.delta_unchecked(lo);
        Ok(StrongCheck { strong, witness: (!strong).then_some(w) })
    }

    pub fn d_closure(&self, space: &LinearSpace, x: &PointSet) -> Result<PointSet> {
        let all = space.points();
        let (dx, icl) = self.min_delta(space, x, &all)?;
        let mut out = icl.clone();
        for a in all.difference(&icl).iter() {
            if self.min_delta(space, &icl.with(a), &all)?.0 == dx {
                out.insert(a);
            }
        }
        Ok(out)
    }

    /// Smallest subset with negative δ (by size, then lexicographically), if any.
    pub fn k0_violation(&self, space: &LinearSpace) -> Result<Option<PointSet>> {
        let empty = PointSet::new();
        let mut budget = self.node_budget;
        let mut found: Option<PointSet> = None;
        for (comp, _) in components(space, &empty, &space.points()) {
            let frame = Frame::new(space, comp)?;
            if frame.min_delta(0, frame.all(), &mut budget)?.0 >= 0 {
                continue;
            }
            let limit = found.as_ref().map_or(frame.len(), |f| f.len());
            if let Some(w) = smallest_negative(&frame, limit, &mut budget)? {
                if found.as_ref().is_none_or(|f| w.size_lex_cmp(f).is_lt()) {
                    found = Some(w);
                }
            }
        }
        Ok(found)
    }

    pub fn check_flatness(&self, space: &LinearSpace, family: &[PointSet], mode: FlatnessMode) -> Result<FlatnessReport> {
        if family.is_empty() {
            return Err(Error::Invalid("flatness needs a nonempty family".into()));
        }
        if family.len() > 20 {
            return Err(Error::SizeLimit { what: "flatness family", size: family.len(), limit: 20 });
        }
        for f in family {
            space.check_set(f)?;
        }
        let eval = |s: &PointSet| -> Result<i64> {
            match mode {
                FlatnessMode::Delta => Ok(space.delta_unchecked(s)),
                FlatnessMode::D => self.d(space, s),
            }
        };
        if mode == FlatnessMode::D {
            for f in family {
                if &self.d_closure(space, f)? != f {
                    return Err(Error::NotClosed(f.to_vec()));
                }
            }
        }
        let union = family.iter().fold(PointSet::new(), |u, f| u.union(f));
        let lhs = eval(&union)?;
        let mut rhs = 0;
        for s in 1u32..(1 << family.len()) {
            let mut it = bits(s as u128);
            let first = it.next().unwrap();
            let inter = it.fold(family[first].clone(), |acc, i| acc.intersection(&family[i]));
            let v = eval(&inter)?;
            rhs += if s.count_ones() % 2 == 1 { v } else { -v };
        }
        Ok(FlatnessReport { holds: lhs <= rhs, lhs, rhs })
    }

    /// Checks that d-closure is a closure operator with exchange, over every
    /// subset of a space of at most 20 points.
    pub fn check_exchange(&self, space: &LinearSpace) -> Result<Option<ExchangeFailure>> {
        let n = space.n();
        if n > 20 {
            return Err(Error::SizeLimit { what: "exchange check", size: n, limit: 20 });
        }
        let frame = Frame::whole(space)?;
        let free: Vec<usize> = (0..n).collect();
        let mut d = frame.delta_table(0, &free);
        superset_min(&mut d);
        let cl = |x: usize| -> usize { (0..n).filter(|&a| d[x | 1 << a] == d[x]).fold(0, |m, a| m | 1 << a) };
        let set = |m: usize| -> PointSet { (0..n).filter(|&i| m >> i & 1 == 1).collect() };
        let closures: Vec<usize> = (0..1usize << n).map(cl).collect();
        for x in 0..1usize << n {
            let c = closures[x];
            if c & x != x {
                return Ok(Some(ExchangeFailure::NotExtensive { x: set(x) }));
            }
            if closures[c] != c {
                return Ok(Some(ExchangeFailure::NotIdempotent { x: set(x) }));
            }
            for a in 0..n {
                let y = x | 1 << a;
                if closures[y] & c != c {
                    return Ok(Some(ExchangeFailure::NotMonotone { x: set(x), y: set(y) }));
                }
                if c >> a & 1 == 1 {
                    continue;
                }
                for b in 0..n {
                    let xb = x | 1 << b;
                    if closures[xb] >> a & 1 == 1 && closures[y] >> b & 1 == 0 {
                        return Ok(Some(ExchangeFailure::Exchange { x: set(x), a, b }));
                    }
                }
            }
        }
        Ok(None)
    }
}

fn smallest_negative(frame: &Frame, limit: usize, budget: &mut u64) -> Result<Option<PointSet>> {
    let m = frame.len();
    for size in 1..=limit.min(m) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if *budget == 0 {
                return Err(Error::SizeLimit { what: "search node budget", size: m, limit: 0 });
            }
            *budget -= 1;
            let mask = idx.iter().fold(0u128, |a, &i| a | 1 << i);
            if frame.delta(mask) < 0 {
                return Ok(Some(frame.set(mask)));
            }
            let mut i = size;
            while i > 0 && idx[i - 1] == m - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(None)
}

pub fn in_k0(space: &LinearSpace) -> Result<bool> {
    Ok(Search::default().k0_violation(space)?.is_none())
}

pub fn k0_violation(space: &LinearSpace) -> Result<Option<PointSet>> {
    Search::default().k0_violation(space)
}

pub fn is_strong(space: &LinearSpace, lo: &PointSet, hi: &PointSet) -> Result<StrongCheck> {
    Search::default().is_strong(space, lo, hi)
}

pub fn icl(space: &LinearSpace, x: &PointSet) -> Result<PointSet> {
    Search::default().icl(space, x)
}

pub fn d(space: &LinearSpace, x: &PointSet) -> Result<i64> {
    Search::default().d(space, x)
}

pub fn d_closure(space: &LinearSpace, x: &PointSet) -> Result<PointSet> {
    Search::default().d_closure(space, x)
}

pub fn check_flatness(space: &LinearSpace, family: &[PointSet], mode: FlatnessMode) -> Result<FlatnessReport> {
    Search::default().check_flatness(space, family, mode)
}

pub fn check_exchange(space: &LinearSpace) -> Result<Option<ExchangeFailure>> {
    Search::default().check_exchange(space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{ag23, fano};

    #[test]
    fn fano_dimension() {
        let f = fano();
        let all = f.points();
        assert!(in_k0(&f).unwrap());
        assert_eq!(d(&f, &PointSet::new()).unwrap(), 0);
        assert_eq!(d(&f, &PointSet::from([0])).unwrap(), 0);
        assert_eq!(icl(&f, &PointSet::from([0])).unwrap(), all);
        assert_eq!(icl(&f, &PointSet::new()).unwrap(), PointSet::new());
        let s = is_strong(&f, &PointSet::from([0]), &all).unwrap();
        assert!(!s.strong);
        assert_eq!(s.witness, Some(all.clone()));
        assert!(is_strong(&f, &PointSet::new(), &all).unwrap().strong);
        assert_eq!(d_closure(&f, &PointSet::new()).unwrap(), all);
    }

    #[test]
    fn affine_plane_plus_point_is_not_k0() {
        let mut lines: Vec<Vec<Point>> = ag23().lines().iter().map(|l| l.points().to_vec()).collect();
        lines.sort();
        let s = LinearSpace::from_lines(10, lines).unwrap();
        assert_eq!(s.delta(&PointSet::range(9)).unwrap(), -3);
        let w = k0_violation(&s).unwrap().unwrap();
        assert!(s.delta(&w).unwrap() < 0);
        assert!(!w.contains(9));
        // nothing smaller is negative
        let f = Frame::whole(&s).unwrap();
        let free: Vec<usize> = (0..10).collect();
        f.for_each_subset(0, &free, |m, d| assert!(d >= 0 || m.count_ones() as usize >= w.len()));
    }

    #[test]
    fn four_point_line_closure() {
        let s = LinearSpace::from_lines(4, vec![vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(d(&s, &PointSet::from([0, 1])).unwrap(), 2);
        assert_eq!(d_closure(&s, &PointSet::from([0, 1])).unwrap(), s.points());
        assert_eq!(d_closure(&s, &PointSet::from([0])).unwrap(), PointSet::from([0]));
        assert!(check_exchange(&s).unwrap().is_none());
    }

    #[test]
    fn flatness_two_sets_is_submodularity() {
        let f = fano();
        let r = check_flatness(&f, &[PointSet::from([0, 1, 3]), PointSet::from([3, 4, 5])], FlatnessMode::Delta).unwrap();
        assert!(r.holds);
        assert_eq!((r.lhs, r.rhs), (3, 3));
    }

    #[test]
    fn flatness_fails_on_long_line() {
        // three subsets of a single 6-point line: δ is not flat here
        let s = LinearSpace::from_lines(6, vec![vec![0, 1, 2, 3, 4, 5]]).unwrap();
        let fam = [PointSet::from([2, 3, 4]), PointSet::from([2, 3, 5]), PointSet::from([0, 1, 2, 4, 5])];
        let r = check_flatness(&s, &fam, FlatnessMode::Delta).unwrap();
        assert_eq!((r.holds, r.lhs, r.rhs), (false, 2, 1));
    }

    #[test]
    fn d_mode_requires_closed_sets() {
        let f = fano();
        let e = check_flatness(&f, &[PointSet::from([0])], FlatnessMode::D).unwrap_err();
        assert!(matches!(e, Error::NotClosed(_)));
    }
}
