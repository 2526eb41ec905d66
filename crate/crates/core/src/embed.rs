//! Induced embeddings of a small pattern space into a target space: injective
//! maps preserving collinearity in both directions.

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::space::{LinearSpace, Point};

pub(crate) struct Embedder<'a> {
    pattern: &'a LinearSpace,
    target: &'a LinearSpace,
    order: Vec<Point>,
    fixed: usize,
    forbidden: PointSet,
    pub budget: u64,
}

impl<'a> Embedder<'a> {
    /// `fixed` pins pattern points to target points; unfixed pattern points
    /// must avoid `forbidden` and every pinned image.
    pub fn new(pattern: &'a LinearSpace, target: &'a LinearSpace, fixed: &[(Point, Point)], forbidden: PointSet) -> Self {
        let n = pattern.n();
        let mut placed = vec![false; n];
        let mut order: Vec<Point> = Vec::with_capacity(n);
        for &(p, _) in fixed {
            placed[p] = true;
            order.push(p);
        }
        let mut forbidden = forbidden;
        forbidden.extend(fixed.iter().map(|&(_, t)| t));
        while order.len() < n {
            let score = |x: Point| -> usize {
                pattern.lines_through(x).map(|l| l.points().iter().filter(|&&q| placed[q]).count()).map(|c| c * c).sum()
            };
            let x = (0..n).filter(|&x| !placed[x]).max_by_key(|&x| (score(x), std::cmp::Reverse(x))).unwrap();
            placed[x] = true;
            order.push(x);
        }
        Embedder { pattern, target, order, fixed: fixed.len(), forbidden, budget: 1 << 24 }
    }

    /// Calls `visit` with each embedding (indexed by pattern point) until it
    /// returns false. `fixed` must be the pins given to `new`.
    pub fn run(&mut self, fixed: &[(Point, Point)], visit: &mut dyn FnMut(&[Point]) -> bool) -> Result<()> {
        let mut img = vec![usize::MAX; self.pattern.n()];
        for (i, &(p, t)) in fixed.iter().enumerate() {
            img[p] = t;
            if !self.consistent(i, &img) {
                return Ok(());
            }
        }
        let mut used = PointSet::new();
        self.dfs(self.fixed, &mut img, &mut used, visit).map(|_| ())
    }

    fn consistent(&self, i: usize, img: &[Point]) -> bool {
        let x = self.order[i];
        let v = img[x];
        for j in 0..i {
            let y = self.order[j];
            let lp = self.pattern.line_through(x, y);
            let lt = self.target.line_through(v, img[y]);
            for k in 0..j {
                let z = self.order[k];
                if lp.is_some_and(|l| l.contains(z)) != lt.is_some_and(|l| l.contains(img[z])) {
                    return false;
                }
            }
        }
        true
    }

    fn candidates(&self, i: usize, img: &[Point]) -> Vec<Point> {
        let x = self.order[i];
        let earlier = &self.order[..i];
        let mut anchor: Option<Point> = None;
        for l in self.pattern.lines_through(x) {
            let on: Vec<Point> = earlier.iter().copied().filter(|&q| l.contains(q)).collect();
            if on.len() >= 2 {
                return match self.target.line_through(img[on[0]], img[on[1]]) {
                    Some(tl) => tl.points().to_vec(),
                    None => Vec::new(),
                };
            }
            if let Some(&q) = on.first() {
                anchor.get_or_insert(q);
            }
        }
        match anchor {
            Some(q) => {
                let mut c: Vec<Point> = self.target.lines_through(img[q]).flat_map(|l| l.points().iter().copied()).collect();
                c.sort_unstable();
                c.dedup();
                c
            }
            None => (0..self.target.n()).collect(),
        }
    }

    fn dfs(&mut self, i: usize, img: &mut Vec<Point>, used: &mut PointSet, visit: &mut dyn FnMut(&[Point]) -> bool) -> Result<bool> {
        if i == self.order.len() {
            return Ok(visit(img));
        }
        if self.budget == 0 {
            return Err(Error::SizeLimit { what: "embedding search budget", size: self.pattern.n(), limit: 0 });
        }
        self.budget -= 1;
        let x = self.order[i];
        for v in self.candidates(i, img) {
            if used.contains(v) || self.forbidden.contains(v) {
                continue;
            }
            img[x] = v;
            if !self.consistent(i, img) {
                continue;
            }
            used.insert(v);
            let go = self.dfs(i + 1, img, used, visit)?;
            used.remove(v);
            if !go {
                img[x] = usize::MAX;
                return Ok(false);
            }
        }
        img[x] = usize::MAX;
        Ok(true)
    }
}

/// All induced embeddings extending `fixed`, deduplicated by the image of the
/// unfixed points, in lexicographic order of that image (as a sorted list).
pub(crate) fn copies(pattern: &LinearSpace, target: &LinearSpace, fixed: &[(Point, Point)], cap: usize) -> Result<Vec<(PointSet, Vec<Point>)>> {
    let mut e = Embedder::new(pattern, target, fixed, PointSet::new());
    let pinned: PointSet = fixed.iter().map(|&(p, _)| p).collect();
    let mut out: std::collections::BTreeMap<Vec<Point>, Vec<Point>> = std::collections::BTreeMap::new();
    let mut overflow = false;
    e.run(fixed, &mut |img| {
        let mut key: Vec<Point> = (0..img.len()).filter(|p| !pinned.contains(*p)).map(|p| img[p]).collect();
        key.sort_unstable();
        out.entry(key).or_insert_with(|| img.to_vec());
        if out.len() > cap {
            overflow = true;
            return false;
        }
        true
    })?;
    if overflow {
        return Err(Error::SizeLimit { what: "copy count", size: out.len(), limit: cap });
    }
    Ok(out.into_iter().map(|(k, v)| (k.into_iter().collect(), v)).collect())
}

/// First embedding extending `fixed` whose unfixed images, listed in pattern
/// order, are lexicographically least.
pub(crate) fn least_embedding(pattern: &LinearSpace, target: &LinearSpace, fixed: &[(Point, Point)], forbidden: PointSet) -> Result<Option<Vec<Point>>> {
    let mut e = Embedder::new(pattern, target, fixed, forbidden);
    let pinned: PointSet = fixed.iter().map(|&(p, _)| p).collect();
    let mut best: Option<Vec<Point>> = None;
    e.run(fixed, &mut |img| {
        let key: Vec<Point> = (0..img.len()).filter(|p| !pinned.contains(*p)).map(|p| img[p]).collect();
        let better = match &best {
            None => true,
            Some(b) => {
                let bk: Vec<Point> = (0..b.len()).filter(|p| !pinned.contains(*p)).map(|p| b[p]).collect();
                key < bk
            }
        };
        if better {
            best = Some(img.to_vec());
        }
        true
    })?;
    Ok(best)
}

/// Whether `pattern` embeds (as an induced substructure) into `target`.
pub fn embeds(pattern: &LinearSpace, target: &LinearSpace) -> Result<Option<Vec<Point>>> {
    let mut e = Embedder::new(pattern, target, &[], PointSet::new());
    let mut found = None;
    e.run(&[], &mut |img| {
        found = Some(img.to_vec());
        false
    })?;
    Ok(found)
}

/// Isomorphism test through embedding of equal-size spaces.
pub fn isomorphic(a: &LinearSpace, b: &LinearSpace) -> Result<bool> {
    if a.n() != b.n() || a.lines().len() != b.lines().len() {
        return Ok(false);
    }
    Ok(embeds(a, b)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::fano;

    #[test]
    fn fano_automorphisms() {
        let f = fano();
        let mut e = Embedder::new(&f, &f, &[], PointSet::new());
        let mut count = 0;
        e.run(&[], &mut |_| {
            count += 1;
            true
        })
        .unwrap();
        assert_eq!(count, 168);
    }

    #[test]
    fn line_copies_over_pair() {
        let s = LinearSpace::from_lines(5, vec![vec![0, 1, 2, 3, 4]]).unwrap();
        let alpha = LinearSpace::from_lines(3, vec![vec![0, 1, 2]]).unwrap();
        let c = copies(&alpha, &s, &[(0, 0), (1, 1)], 100).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(least_embedding(&alpha, &s, &[(0, 0), (1, 1)], PointSet::new()).unwrap(), Some(vec![0, 1, 2]));
    }

    #[test]
    fn induced_means_no_extra_lines() {
        let tri = LinearSpace::empty(3);
        let line = LinearSpace::from_lines(3, vec![vec![0, 1, 2]]).unwrap();
        assert!(embeds(&tri, &line).unwrap().is_none());
        assert!(embeds(&tri, &fano()).unwrap().is_some());
    }
}
