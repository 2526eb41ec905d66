//! Named structures: the Fano plane, the cycle pairs C_k and D_k, the Fano
//! chain, and cycle graphs of Steiner triple
//! spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::primitives::GoodPair;
use crate::space::{LinearSpace, Point};

/// The Fano plane. Points 0, 1, 2 form a triangle; 3, 4, 5 are the third
/// points on its sides and 6 is the centre.
pub fn fano() -> LinearSpace {
    LinearSpace::from_lines(7, vec![vec![0, 1, 3], vec![1, 2, 4], vec![0, 2, 5], vec![0, 4, 6], vec![1, 5, 6], vec![2, 3, 6], vec![3, 4, 5]]).unwrap()
}

/// The affine plane of order 3 (nine points, twelve 3-point lines); δ = -3.
pub fn ag23() -> LinearSpace {
    let p = |x: usize, y: usize| 3 * x + y;
    let mut lines = Vec::new();
    for x in 0..3 {
        lines.push(vec![p(x, 0), p(x, 1), p(x, 2)]);
    }
    for slope in 0..3 {
        for c in 0..3 {
            lines.push((0..3).map(|x| p(x, (slope * x + c) % 3)).collect());
        }
    }
    LinearSpace::from_lines(9, lines).unwrap()
}

/// C_k over the base {a, b} = {0, 1}; c_i is point i + 1 for i = 1..4k.
/// a-lines join c_{2n+1} c_{2n+2}, b-lines join c_{2n+2} c_{2n+3}, and the
/// b-line through c_1 c_{4k} closes the cycle.
pub fn cycle_ck(k: usize) -> GoodPair {
    assert!(k >= 1);
    GoodPair::new_unchecked(cycle_space(k, 0), PointSet::from([0, 1]))
}

fn cycle_space(k: usize, extra: usize) -> LinearSpace {
    let c = |i: usize| i + 1;
    let mut lines = Vec::new();
    for n in 0..2 * k {
        lines.push(vec![0, c(2 * n + 1), c(2 * n + 2)]);
    }
    for n in 0..2 * k - 1 {
        lines.push(vec![1, c(2 * n + 2), c(2 * n + 3)]);
    }
    lines.push(vec![1, c(1), c(4 * k)]);
    let n = 4 * k + 2 + extra;
    if extra == 1 {
        let cc = 4 * k + 2;
        lines.push(vec![0, 1, cc]);
        lines.push(vec![cc, c(1), c(2 * k + 1)]);
        lines.push(vec![cc, c(k + 1), c(3 * k + 1)]);
    }
    LinearSpace::from_lines(n, lines).unwrap()
}

/// D_k: C_k plus the third point c = 4k + 2 on ab and two lines through c
/// joining antipodal cycle points. Good over the empty base.
pub fn cycle_dk(k: usize) -> GoodPair {
    assert!(k >= 1);
    GoodPair::new_unchecked(cycle_space(k, 1), PointSet::new())
}

/// A_0 ⊂ A_1 ⊂ ... ⊂ A_n: A_0 is the Fano plane with triangle a_0 b_0 c_0 =
/// 0 1 2, and A_{i+1} adds a_{i+1} b_{i+1} c_{i+1} = 7+3i, 8+3i, 9+3i with
/// lines a_i a_{i+1} c_{i+1}, b_i b_{i+1} c_{i+1}, a_{i+1} b_{i+1} c_i.
pub fn fano_chain(n: usize) -> Vec<LinearSpace> {
    let mut lines: Vec<Vec<Point>> = fano().lines().iter().map(|l| l.points().to_vec()).collect();
    let tri = |i: usize| -> [Point; 3] {
        if i == 0 { [0, 1, 2] } else { [4 + 3 * i, 5 + 3 * i, 6 + 3 * i] }
    };
    let mut out = vec![fano()];
    for i in 0..n {
        let [a, b, c] = tri(i);
        let [a1, b1, c1] = tri(i + 1);
        lines.push(vec![a, a1, c1]);
        lines.push(vec![b, b1, c1]);
        lines.push(vec![a1, b1, c]);
        out.push(LinearSpace::from_lines(10 + 3 * i, lines.clone()).unwrap());
    }
    out
}

/// The link of the Fano chain as a good pair: base {a_0, b_0, c_0} = {0, 1, 2}
/// and extension {a_1, b_1, c_1} = {3, 4, 5}.
pub fn chain_link() -> GoodPair {
    let s = LinearSpace::from_lines(6, vec![vec![0, 3, 5], vec![1, 4, 5], vec![3, 4, 2]]).unwrap();
    GoodPair::new_unchecked(s, PointSet::from([0, 1, 2]))
}

/// Base {d_1, d_2} = {0, 1}, extension c_1..c_6 = 2..7 with lines
/// d_1 c_1 c_2 c_3, d_2 c_4 c_5 c_3, c_4 c_1 c_6, c_5 c_2 c_6.
pub fn four_line_pair() -> GoodPair {
    let c = |i: usize| i + 1;
    let s = LinearSpace::from_lines(8, vec![vec![0, c(1), c(2), c(3)], vec![1, c(4), c(5), c(3)], vec![c(4), c(1), c(6)], vec![c(5), c(2), c(6)]]).unwrap();
    GoodPair::new_unchecked(s, PointSet::from([0, 1]))
}

/// The two-coloured graph of a pair a, b on a 3-point line a b c: vertices
/// are the other points, with an a-edge xy when a x y is a line and a b-edge
/// when b x y is.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleGraph {
    pub a: Point,
    pub b: Point,
    pub c: Point,
    pub vertices: Vec<Point>,
    pub a_edges: Vec<(Point, Point)>,
    pub b_edges: Vec<(Point, Point)>,
}

impl CycleGraph {
    /// Connected components as vertex sequences walked along alternating
    /// edges, starting from each component's least vertex.
    pub fn components(&self) -> Vec<Vec<Point>> {
        let mut adj: std::collections::BTreeMap<Point, Vec<Point>> = self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for &(x, y) in self.a_edges.iter().chain(&self.b_edges) {
            adj.get_mut(&x).unwrap().push(y);
            adj.get_mut(&y).unwrap().push(x);
        }
        let mut seen = PointSet::new();
        let mut out = Vec::new();
        for &v in &self.vertices {
            if seen.contains(v) {
                continue;
            }
            let mut walk = vec![v];
            seen.insert(v);
            let mut cur = v;
            while let Some(&next) = adj[&cur].iter().filter(|&&w| !seen.contains(w)).min() {
                seen.insert(next);
                walk.push(next);
                cur = next;
            }
            // pick up a path's other branch, if any
            let mut stack: Vec<Point> = walk.clone();
            while let Some(x) = stack.pop() {
                for &w in &adj[&x] {
                    if seen.insert(w) {
                        walk.push(w);
                        stack.push(w);
                    }
                }
            }
            out.push(walk);
        }
        out
    }
}

pub fn cycle_graph(m: &LinearSpace, a: Point, b: Point) -> Result<CycleGraph> {
    m.check_set(&PointSet::from([a, b]))?;
    let line = m.line_through(a, b).filter(|l| l.len() == 3).ok_or(Error::PairNotOnTriple(a, b))?;
    let c = *line.points().iter().find(|&&p| p != a && p != b).unwrap();
    let edges = |x: Point| -> Result<Vec<(Point, Point)>> {
        let mut e = Vec::new();
        for l in m.lines_through(x) {
            if l.contains(c) {
                continue;
            }
            if l.len() != 3 {
                return Err(Error::Invalid(format!("line {:?} through {x} is not a 3-point line", l.points())));
            }
            let o: Vec<Point> = l.points().iter().copied().filter(|&p| p != x).collect();
            e.push((o[0], o[1]));
        }
        Ok(e)
    };
    let vertices: Vec<Point> = (0..m.n()).filter(|&p| p != a && p != b && p != c).collect();
    Ok(CycleGraph { a, b, c, a_edges: edges(a)?, b_edges: edges(b)?, vertices })
}

/// Every good pair the builder may draw templates from, with its name.
pub fn template_library() -> Vec<(String, GoodPair)> {
    let mut v = vec![("alpha".to_string(), GoodPair::alpha())];
    for k in 1..=5 {
        v.push((format!("C{k}"), cycle_ck(k)));
    }
    v.push(("fano".into(), GoodPair::new_unchecked(fano(), PointSet::new())));
    v.push(("chain-link".into(), chain_link()));
    v.push(("four-line".into(), four_line_pair()));
    for k in 2..=5 {
        v.push((format!("D{k}"), cycle_dk(k)));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::{d, in_k0};
    use crate::embed::isomorphic;
    use crate::primitives::{bases_of, is_good_pair};

    #[test]
    fn ck_counts() {
        for k in 1..=3 {
            let c = cycle_ck(k);
            assert_eq!(c.size(), 4 * k + 2);
            assert_eq!(c.space().lines().len(), 4 * k);
            assert_eq!(c.space().delta(&c.space().points()).unwrap(), 2);
            assert!(is_good_pair(c.space(), c.base(), c.ext()).unwrap());
            assert_eq!(bases_of(c.space(), c.base(), c.ext()).unwrap(), vec![PointSet::from([0, 1])]);
        }
    }

    #[test]
    fn d1_is_fano() {
        let d1 = cycle_dk(1);
        assert_eq!(d1.size(), 7);
        assert!(isomorphic(d1.space(), &fano()).unwrap());
    }

    #[test]
    fn chain_structures() {
        let ch = fano_chain(2);
        assert_eq!(ch.len(), 3);
        assert_eq!(ch[2].n(), 13);
        for a in &ch {
            assert_eq!(a.delta(&a.points()).unwrap(), 0);
            assert!(in_k0(a).unwrap());
        }
        assert_eq!(d(&ch[2], &PointSet::range(7)).unwrap(), 0);
        let link = chain_link();
        assert!(is_good_pair(link.space(), link.base(), link.ext()).unwrap());
    }

    #[test]
    fn four_line_pair_is_good() {
        let e = four_line_pair();
        assert_eq!(e.space().delta(&e.space().points()).unwrap(), 2);
        assert!(is_good_pair(e.space(), e.base(), e.ext()).unwrap());
    }

    #[test]
    fn fano_cycle_graph() {
        let g = cycle_graph(&fano(), 0, 1).unwrap();
        assert_eq!(g.c, 3);
        assert_eq!(g.vertices.len(), 4);
        assert_eq!(g.a_edges.len(), 2);
        assert_eq!(g.b_edges.len(), 2);
        let comps = g.components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), 4);
        assert!(matches!(cycle_graph(&LinearSpace::empty(3), 0, 1), Err(Error::PairNotOnTriple(0, 1))));
    }

    #[test]
    fn affine_plane() {
        let a = ag23();
        assert_eq!(a.delta(&a.points()).unwrap(), -3);
    }
}
