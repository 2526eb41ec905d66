//! Brute-force oracles: direct transcriptions of the definitions over all
//! subsets, independent of the pruned searches in the library.
#![allow(dead_code)]

pub mod corpus;

use steiner::{LinearSpace, PointSet};

pub fn subsets(v: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0u64..1 << v.len()).map(move |m| v.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &p)| p).collect())
}

pub fn delta(m: &LinearSpace, s: &[usize]) -> i64 {
    let nullity: i64 = m.lines().iter().map(|l| (l.points().iter().filter(|p| s.contains(p)).count() as i64 - 2).max(0)).sum();
    s.len() as i64 - nullity
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// a ≤ a ∪ b: no set between them has smaller δ than a.
pub fn strong_in(m: &LinearSpace, a: &[usize], b: &[usize]) -> bool {
    let rest: Vec<usize> = b.iter().copied().filter(|p| !a.contains(p)).collect();
    let da = delta(m, a);
    let ok = subsets(&rest).all(|s| delta(m, &union(a, &s)) >= da);
    ok
}

pub fn min_delta(m: &LinearSpace) -> i64 {
    let all: Vec<usize> = (0..m.n()).collect();
    let v = subsets(&all).map(|s| delta(m, &s)).min().unwrap();
    v
}

pub fn in_k0(m: &LinearSpace) -> bool {
    let all: Vec<usize> = (0..m.n()).collect();
    let ok = subsets(&all).all(|s| delta(m, &s) >= 0);
    ok
}

/// Least X ⊇ a with a ≤-closed property: intersection of all supersets of
/// minimal δ.
pub fn icl(m: &LinearSpace, a: &[usize]) -> Vec<usize> {
    let rest: Vec<usize> = (0..m.n()).filter(|p| !a.contains(p)).collect();
    let mut best = i64::MAX;
    let mut inter: Option<Vec<usize>> = None;
    for s in subsets(&rest) {
        let x = union(a, &s);
        let d = delta(m, &x);
        if d < best {
            best = d;
            inter = Some(x);
        } else if d == best {
            inter = inter.map(|i| i.into_iter().filter(|p| x.contains(p)).collect());
        }
    }
    inter.unwrap()
}

pub fn d(m: &LinearSpace, a: &[usize]) -> i64 {
    let rest: Vec<usize> = (0..m.n()).filter(|p| !a.contains(p)).collect();
    let v = subsets(&rest).map(|s| delta(m, &union(a, &s))).min().unwrap();
    v
}

/// C is 0-primitive over B: B ≤ BC, δ(BC) = δ(B), and no proper nonempty
/// C' ⊂ C has δ(BC') = δ(B).
pub fn zero_primitive(m: &LinearSpace, b: &[usize], c: &[usize]) -> bool {
    if c.is_empty() {
        return false;
    }
    let db = delta(m, b);
    subsets(c).all(|s| {
        let v = delta(m, &union(b, &s));
        if s.is_empty() {
            true
        } else if s.len() == c.len() {
            v == db
        } else {
            v > db
        }
    })
}

pub fn good_pair(m: &LinearSpace, b: &[usize], c: &[usize]) -> bool {
    zero_primitive(m, b, c) && subsets(b).filter(|s| s.len() < b.len()).all(|s| !zero_primitive(m, &s, c))
}

/// All good pairs (B, C) with |B ∪ C| ≤ max_size, as sorted point lists.
pub fn good_pairs(m: &LinearSpace, max_size: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = m.n();
    let mut out = Vec::new();
    let mut code = vec![0u8; n];
    loop {
        let b: Vec<usize> = (0..n).filter(|&i| code[i] == 1).collect();
        let c: Vec<usize> = (0..n).filter(|&i| code[i] == 2).collect();
        if !c.is_empty() && b.len() + c.len() <= max_size && good_pair(m, &b, &c) {
            out.push((b, c));
        }
        let mut i = 0;
        while i < n && code[i] == 2 {
            code[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        code[i] += 1;
    }
    out.sort();
    out
}

pub fn set(v: &[usize]) -> PointSet {
    v.iter().copied().collect()
}
