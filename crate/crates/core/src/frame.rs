//! Dense local frames: up to 128 points indexed by bit position, with the
//! stored lines restricted to the frame as masks. All exhaustive searches run
//! here.

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::space::{LinearSpace, Point};

pub(crate) const FRAME_MAX: usize = 128;

#[derive(Clone, Debug)]
pub(crate) struct Frame {
    pub pts: Vec<Point>,
    pub lines: Vec<u128>,
    pub inc: Vec<Vec<u32>>,
}

#[inline]
pub(crate) fn bits(m: u128) -> impl Iterator<Item = usize> {
    let mut m = m;
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let b = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(b)
    })
}

#[inline]
fn pop(m: u128) -> i64 {
    m.count_ones() as i64
}

impl Frame {
    /// Frame on the given points (kept in the given order).
    pub fn new(space: &LinearSpace, pts: Vec<Point>) -> Result<Self> {
        if pts.len() > FRAME_MAX {
            return Err(Error::SizeLimit { what: "search frame", size: pts.len(), limit: FRAME_MAX });
        }
        let mut local = std::collections::HashMap::new();
        for (i, &p) in pts.iter().enumerate() {
            local.insert(p, i);
        }
        let mut seen = std::collections::HashSet::new();
        let mut lines = Vec::new();
        for &p in &pts {
            for &li in space.line_indices_through(p) {
                if !seen.insert(li) {
                    continue;
                }
                let m = space.line(li).points().iter().filter_map(|q| local.get(q)).fold(0u128, |m, &i| m | 1 << i);
                if m.count_ones() >= 3 {
                    lines.push(m);
                }
            }
        }
        Ok(Self::from_masks(pts, lines))
    }

    pub fn whole(space: &LinearSpace) -> Result<Self> {
        Self::new(space, (0..space.n()).collect())
    }

    pub fn from_masks(pts: Vec<Point>, lines: Vec<u128>) -> Self {
        let mut inc = vec![Vec::new(); pts.len()];
        for (li, &m) in lines.iter().enumerate() {
            for b in bits(m) {
                inc[b].push(li as u32);
            }
        }
        Frame { pts, lines, inc }
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn all(&self) -> u128 {
        if self.pts.len() == 128 { u128::MAX } else { (1u128 << self.pts.len()) - 1 }
    }

    pub fn delta(&self, m: u128) -> i64 {
        pop(m) - self.lines.iter().map(|&l| (pop(l & m) - 2).max(0)).sum::<i64>()
    }

    pub fn mask(&self, s: &PointSet) -> u128 {
        self.pts.iter().enumerate().filter(|(_, &p)| s.contains(p)).fold(0, |m, (i, _)| m | 1 << i)
    }

    pub fn set(&self, m: u128) -> PointSet {
        bits(m).map(|i| self.pts[i]).collect()
    }

    /// Removes from `hi \ lo` points lying on at most one line that keeps
    /// three points inside `hi`. Such points never lower δ, so minimum values
    /// and least minimizers are unaffected.
    pub fn peel(&self, lo: u128, mut hi: u128) -> u128 {
        loop {
            let mut changed = false;
            for p in bits(hi & !lo) {
                let live = self.inc[p].iter().filter(|&&l| pop(self.lines[l as usize] & hi) >= 3).count();
                if live <= 1 {
                    hi &= !(1 << p);
                    changed = true;
                }
            }
            if !changed {
                return hi;
            }
        }
    }

    /// Minimum of δ over `lo ⊆ X ⊆ hi` and some minimizer, by branch and
    /// bound. `budget` counts search nodes.
    pub fn min_delta(&self, lo: u128, hi: u128, budget: &mut u64) -> Result<(i64, u128)> {
        let hi = self.peel(lo, hi) | lo;
        let live: Vec<usize> = (0..self.lines.len()).filter(|&l| pop(self.lines[l] & hi) >= 3).collect();
        let mut free: Vec<(usize, i64)> = bits(hi & !lo)
            .map(|p| (p, self.inc[p].iter().filter(|&&l| pop(self.lines[l as usize] & hi) >= 3).count() as i64))
            .collect();
        free.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut suffix = vec![0i64; free.len() + 1];
        for i in (0..free.len()).rev() {
            suffix[i] = suffix[i + 1] + (free[i].1 - 1).max(0);
        }
        let mut slot = vec![usize::MAX; self.lines.len()];
        for (i, &l) in live.iter().enumerate() {
            slot[l] = i;
        }
        let mut cnt: Vec<i64> = live.iter().map(|&l| pop(self.lines[l] & lo)).collect();
        let start = self.delta(lo);
        let mut st = Bb { frame: self, free: &free, suffix: &suffix, slot: &slot, cnt: &mut cnt, best: (start, lo), budget };
        st.dfs(0, lo, start)?;
        Ok(st.best)
    }

    /// The least minimizer of δ over `lo ⊆ X ⊆ hi`: the intersection of all
    /// minimizers, which is itself a minimizer by submodularity.
    pub fn least_minimizer(&self, lo: u128, hi: u128, budget: &mut u64) -> Result<(i64, u128)> {
        let (m, some) = self.min_delta(lo, hi, budget)?;
        let mut cur = some;
        for p in bits(some & !lo) {
            let (v, w) = self.min_delta(lo, cur & !(1 << p), budget)?;
            if v == m {
                cur = w;
            }
        }
        Ok((m, cur))
    }

    /// Visits every subset of the `free` positions together with `base`, in
    /// Gray-code order, passing the free-part mask and δ. At most 32 free
    /// points.
    pub fn for_each_subset(&self, base: u128, free: &[usize], mut f: impl FnMut(u32, i64)) {
        assert!(free.len() <= 32);
        let mut cnt: Vec<i64> = self.lines.iter().map(|&l| pop(l & base)).collect();
        let mut null: i64 = cnt.iter().map(|&c| (c - 2).max(0)).sum();
        let mut size = pop(base);
        let mut mask: u32 = 0;
        f(0, size - null);
        for i in 1u64..(1u64 << free.len()) {
            let j = i.trailing_zeros() as usize;
            let p = free[j];
            let adding = mask >> j & 1 == 0;
            mask ^= 1 << j;
            let s = if adding { 1 } else { -1 };
            size += s;
            for &l in &self.inc[p] {
                let c = &mut cnt[l as usize];
                null -= (*c - 2).max(0);
                *c += s;
                null += (*c - 2).max(0);
            }
            f(mask, size - null);
        }
    }

    /// δ of `base ∪ T` for every subset T of `free`, indexed by the free-part mask.
    pub fn delta_table(&self, base: u128, free: &[usize]) -> Vec<i64> {
        let mut t = vec![0i64; 1 << free.len()];
        self.for_each_subset(base, free, |m, d| t[m as usize] = d);
        t
    }

    pub fn expand(free: &[usize], m: u32) -> u128 {
        free.iter().enumerate().filter(|(j, _)| m >> j & 1 == 1).fold(0, |acc, (_, &p)| acc | 1 << p)
    }
}

/// In-place transform: t[S] becomes the minimum of t over supersets of S.
pub(crate) fn superset_min(t: &mut [i64]) {
    let n = t.len();
    let mut bit = 1;
    while bit < n {
        for s in 0..n {
            if s & bit == 0 {
                let v = t[s | bit];
                if v < t[s] {
                    t[s] = v;
                }
            }
        }
        bit <<= 1;
    }
}

struct Bb<'a> {
    frame: &'a Frame,
    free: &'a [(usize, i64)],
    suffix: &'a [i64],
    slot: &'a [usize],
    cnt: &'a mut Vec<i64>,
    best: (i64, u128),
    budget: &'a mut u64,
}

impl Bb<'_> {
    fn dfs(&mut self, i: usize, mask: u128, cur: i64) -> Result<()> {
        if i == self.free.len() || cur - self.suffix[i] >= self.best.0 {
            return Ok(());
        }
        if *self.budget == 0 {
            return Err(Error::SizeLimit { what: "search node budget", size: self.free.len(), limit: 0 });
        }
        *self.budget -= 1;
        let p = self.free[i].0;
        let mut d = 1;
        for &l in &self.frame.inc[p] {
            let s = self.slot[l as usize];
            if s != usize::MAX {
                if self.cnt[s] >= 2 {
                    d -= 1;
                }
                self.cnt[s] += 1;
            }
        }
        let with = mask | 1 << p;
        if cur + d < self.best.0 {
            self.best = (cur + d, with);
        }
        let r = self.dfs(i + 1, with, cur + d);
        for &l in &self.frame.inc[p] {
            let s = self.slot[l as usize];
            if s != usize::MAX {
                self.cnt[s] -= 1;
            }
        }
        r?;
        self.dfs(i + 1, mask, cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::fano;

    #[test]
    fn gray_code_matches_direct() {
        let f = Frame::whole(&fano()).unwrap();
        let free: Vec<usize> = (0..7).collect();
        let t = f.delta_table(0, &free);
        for m in 0..128u32 {
            assert_eq!(t[m as usize], f.delta(Frame::expand(&free, m)));
        }
    }

    #[test]
    fn min_and_least_minimizer() {
        let f = Frame::whole(&fano()).unwrap();
        let mut budget = u64::MAX;
        assert_eq!(f.min_delta(1, f.all(), &mut budget).unwrap(), (0, f.all()));
        assert_eq!(f.least_minimizer(0, f.all(), &mut budget).unwrap(), (0, 0));
    }

    #[test]
    fn superset_min_small() {
        let mut t = vec![3, 1, 2, 5];
        superset_min(&mut t);
        assert_eq!(t, vec![1, 1, 2, 5]);
    }
}
