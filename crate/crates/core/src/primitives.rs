//! Primitive extensions, good pairs, canonical codes and the copy count χ.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::canon::canonical_form;
use crate::dimension::Search;
use crate::embed;
use crate::error::{Error, Result};
use crate::format::{content_lines, parse_ls_block, parse_points};
use crate::frame::{superset_min, Frame};
use crate::pointset::PointSet;
use crate::space::{LinearSpace, Point};

/// Size limit for canonical codes unless a caller raises it.
pub const CODE_SIZE_LIMIT: usize = 16;
/// Cap on the number of copies enumerated by χ.
pub const COPY_CAP: usize = 4096;
/// Largest extension handled by the exhaustive primitivity checks.
pub const PRIMITIVE_LIMIT: usize = 24;

/// Canonical name of a good pair up to isomorphism over the base (setwise).
/// `alpha` for the one-point extension by a 3-point line; otherwise
/// `g<n>b<m>:` followed by the canonically relabelled lines, base first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalCode(String);

impl CanonicalCode {
    pub fn alpha() -> Self {
        CanonicalCode("alpha".into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Accepts any syntactically valid code; see `decode` for the pair.
    pub fn parse(s: &str) -> Result<Self> {
        let c = CanonicalCode(s.trim().to_string());
        c.decode()?;
        Ok(c)
    }

    /// The canonical representative: base on `0..m`, extension on `m..n`.
    pub fn decode(&self) -> Result<GoodPair> {
        if self.0 == "alpha" {
            return Ok(GoodPair::alpha());
        }
        let bad = || Error::BadCode(self.0.clone());
        let rest = self.0.strip_prefix('g').ok_or_else(bad)?;
        let (head, body) = rest.split_once(':').ok_or_else(bad)?;
        let (n, m) = head.split_once('b').ok_or_else(bad)?;
        let (n, m): (usize, usize) = (n.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?);
        if m >= n {
            return Err(bad());
        }
        let mut lines = Vec::new();
        if !body.is_empty() {
            for l in body.split('-') {
                let pts: Vec<Point> = l.split('.').map(|t| t.parse().map_err(|_| bad())).collect::<Result<_>>()?;
                lines.push(pts);
            }
        }
        let space = LinearSpace::from_lines(n, lines).map_err(|_| bad())?;
        Ok(GoodPair::new_unchecked(space, PointSet::range(m)))
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A structure BC together with its base B; C is the complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodPair {
    space: LinearSpace,
    base: PointSet,
    ext: PointSet,
}

impl GoodPair {
    /// Checks that C = points \ B is good over B.
    pub fn new(space: LinearSpace, base: PointSet) -> Result<Self> {
        let gp = Self::new_unchecked(space, base);
        if !is_good_pair(&gp.space, &gp.base, &gp.ext)? {
            return Err(Error::NotZeroPrimitive);
        }
        Ok(gp)
    }

    pub fn new_unchecked(space: LinearSpace, base: PointSet) -> Self {
        let ext = space.points().difference(&base);
        GoodPair { space, base, ext }
    }

    pub fn alpha() -> Self {
        Self::new_unchecked(LinearSpace::from_lines(3, vec![vec![0, 1, 2]]).unwrap(), PointSet::from([0, 1]))
    }

    pub fn space(&self) -> &LinearSpace {
        &self.space
    }

    pub fn base(&self) -> &PointSet {
        &self.base
    }

    pub fn ext(&self) -> &PointSet {
        &self.ext
    }

    pub fn size(&self) -> usize {
        self.space.n()
    }

    pub fn base_delta(&self) -> i64 {
        self.space.delta_unchecked(&self.base)
    }

    pub fn is_alpha(&self) -> bool {
        self.space.n() == 3 && self.base.len() == 2 && self.space.lines().len() == 1
    }

    /// Canonical form: relabelled so that the base is `0..m` and the code's
    /// line list is literally the stored one. Also returns the map from
    /// canonical labels to the original points.
    pub fn canonical(&self) -> (GoodPair, Vec<Point>) {
        let n = self.space.n();
        let colors: Vec<u32> = (0..n).map(|p| u32::from(!self.base.contains(p))).collect();
        let lines: Vec<Vec<usize>> = self.space.lines().iter().map(|l| l.points().to_vec()).collect();
        let (order, canon) = canonical_form(n, &lines, &colors);
        let space = LinearSpace::from_lines(n, canon).expect("relabelling preserves the axioms");
        (GoodPair::new_unchecked(space, PointSet::range(self.base.len())), order)
    }

    /// Code without a size limit.
    pub fn code(&self) -> CanonicalCode {
        if self.is_alpha() {
            return CanonicalCode::alpha();
        }
        let (c, _) = self.canonical();
        let mut s = format!("g{}b{}:", c.space.n(), c.base.len());
        let body: Vec<String> = c
            .space
            .lines()
            .iter()
            .map(|l| l.points().iter().map(|p| p.to_string()).collect::<Vec<_>>().join("."))
            .collect();
        s.push_str(&body.join("-"));
        CanonicalCode(s)
    }

    pub fn to_gp_string(&self) -> String {
        let mut s = self.space.to_ls_string();
        s.push_str("base");
        for p in self.base.iter() {
            s.push_str(&format!(" {p}"));
        }
        s.push('\n');
        s
    }

    /// Parses gp-v1 (an ls-v1 block followed by `base i1 ... im`) without
    /// checking goodness.
    pub fn parse_gp(text: &str) -> Result<Self> {
        let lines = content_lines(text);
        let (space, used) = parse_ls_block(&lines)?;
        let &(no, l) = lines.get(used).ok_or_else(|| Error::parse(lines.last().map_or(0, |l| l.0), "missing `base` record"))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.first() != Some(&"base") {
            return Err(Error::parse(no, format!("expected `base ...`, found {l:?}")));
        }
        let base: PointSet = parse_points(&toks[1..], no)?.into_iter().collect();
        if let Some(p) = base.max().filter(|&p| p >= space.n()) {
            return Err(Error::parse(no, format!("base point {p} out of range")));
        }
        if let Some(&(no, extra)) = lines.get(used + 1) {
            return Err(Error::parse(no, format!("unexpected content {extra:?}")));
        }
        Ok(Self::new_unchecked(space, base))
    }
}

pub fn canonical_code(gp: &GoodPair) -> Result<CanonicalCode> {
    canonical_code_with_limit(gp, CODE_SIZE_LIMIT)
}

pub fn canonical_code_with_limit(gp: &GoodPair, limit: usize) -> Result<CanonicalCode> {
    if gp.size() > limit {
        return Err(Error::SizeLimit { what: "canonical code", size: gp.size(), limit });
    }
    Ok(gp.code())
}

/// Frame over B ∪ C with the extension points listed as free positions.
fn pair_frame(space: &LinearSpace, b: &PointSet, c: &PointSet) -> Result<(Frame, u128, Vec<usize>)> {
    space.check_set(b)?;
    space.check_set(c)?;
    if !b.is_disjoint(c) {
        return Err(Error::Overlap(b.intersection(c).to_vec()));
    }
    if c.len() > PRIMITIVE_LIMIT {
        return Err(Error::SizeLimit { what: "primitive extension", size: c.len(), limit: PRIMITIVE_LIMIT });
    }
    let pts: Vec<Point> = b.union(c).to_vec();
    let frame = Frame::new(space, pts)?;
    let bm = frame.mask(b);
    let free: Vec<usize> = (0..frame.len()).filter(|&i| bm >> i & 1 == 0).collect();
    Ok((frame, bm, free))
}

/// Whether C is a primitive extension of B with δ(C/B) = 0, computed in the
/// induced structure on B ∪ C: B ≤ BC, δ(BC) = δ(B), and no proper nonempty
/// C' has δ(BC') = δ(B).
fn zero_primitive_in(frame: &Frame, bm: u128, free: &[usize]) -> bool {
    if free.is_empty() {
        return false;
    }
    let full = (1u32 << free.len()).wrapping_sub(1);
    let mut base = None;
    let mut ok = true;
    frame.for_each_subset(bm, free, |m, d| {
        let b = *base.get_or_insert(d);
        if m == full {
            ok &= d == b;
        } else if m != 0 {
            ok &= d > b;
        }
    });
    ok
}

/// Whether the structure `a` is a primitive extension of `b ⊆ a`: b ≤ a and no
/// strong intermediate structure lies strictly between them.
pub fn is_primitive(a: &LinearSpace, b: &PointSet) -> Result<bool> {
    let c = a.points().difference(b);
    let (frame, bm, free) = pair_frame(a, b, &c)?;
    let mut t = frame.delta_table(bm, &free);
    let raw = t.clone();
    superset_min(&mut t);
    if t[0] < raw[0] {
        return Err(Error::NotStrong);
    }
    if free.is_empty() {
        return Ok(false);
    }
    let full = (1usize << free.len()) - 1;
    Ok((1..full).all(|m| raw[m] > t[m]))
}

/// Whether C is good over B inside `m`: C is 0-primitive over B, and over no
/// proper subset of B.
pub fn is_good_pair(m: &LinearSpace, b: &PointSet, c: &PointSet) -> Result<bool> {
    if c.is_empty() {
        return Ok(false);
    }
    let (frame, bm, free) = pair_frame(m, b, c)?;
    if !zero_primitive_in(&frame, bm, &free) {
        return Ok(false);
    }
    let bits: Vec<usize> = crate::frame::bits(bm).collect();
    if bits.len() > 20 {
        return Err(Error::SizeLimit { what: "base of a good pair", size: bits.len(), limit: 20 });
    }
    for sub in 0u32..(1 << bits.len()) - 1 {
        if zero_primitive_in(&frame, Frame::expand(&bits, sub), &free) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The good bases B' ⊆ B of a 0-primitive extension C over B. For a single
/// point these are the pairs of base points on its line; otherwise the base
/// is unique: the points of B on lines meeting C.
pub fn bases_of(m: &LinearSpace, b: &PointSet, c: &PointSet) -> Result<Vec<PointSet>> {
    let (frame, bm, free) = pair_frame(m, b, c)?;
    if !zero_primitive_in(&frame, bm, &free) {
        return Err(Error::NotZeroPrimitive);
    }
    let bc = b.union(c);
    if c.len() == 1 {
        let p = c.min().unwrap();
        let on: Vec<Point> = m
            .lines_through(p)
            .map(|l| l.points().iter().copied().filter(|&q| b.contains(q)).collect::<Vec<_>>())
            .find(|v| v.len() >= 2)
            .ok_or(Error::NotZeroPrimitive)?;
        let mut out = Vec::new();
        for (i, &x) in on.iter().enumerate() {
            for &y in &on[i + 1..] {
                out.push(PointSet::from([x, y]));
            }
        }
        return Ok(out);
    }
    let b0: PointSet = b
        .iter()
        .filter(|&q| m.lines_through(q).any(|l| l.meet(&bc) >= 3 && l.meet(c) >= 1))
        .collect();
    Ok(vec![b0])
}

/// Copies of the extension of `gp` over a placement of its base into `m`
/// (base point i of `gp`, in increasing order, goes to `base_embed[i]`). A
/// copy is an induced embedding fixing the base pointwise; copies are
/// reported as their extension images.
pub fn copies_over(m: &LinearSpace, gp: &GoodPair, base_embed: &[Point]) -> Result<Vec<PointSet>> {
    let fixed = base_fix(m, gp, base_embed)?;
    Ok(embed::copies(gp.space(), m, &fixed, COPY_CAP)?.into_iter().map(|(s, _)| s).collect())
}

fn base_fix(m: &LinearSpace, gp: &GoodPair, base_embed: &[Point]) -> Result<Vec<(Point, Point)>> {
    if base_embed.len() != gp.base().len() {
        return Err(Error::Invalid(format!("base has {} points, embedding lists {}", gp.base().len(), base_embed.len())));
    }
    m.check_set(&base_embed.iter().copied().collect())?;
    Ok(gp.base().iter().zip(base_embed.iter().copied()).collect())
}

/// χ: the largest number of copies that are pairwise disjoint outside the base.
pub fn chi(m: &LinearSpace, gp: &GoodPair, base_embed: &[Point]) -> Result<usize> {
    Ok(max_disjoint(&copies_over(m, gp, base_embed)?, usize::MAX))
}

/// Greedy lower bound for χ, kept as a diagnostic.
pub fn chi_greedy(m: &LinearSpace, gp: &GoodPair, base_embed: &[Point]) -> Result<usize> {
    let mut taken = PointSet::new();
    let mut k = 0;
    for c in copies_over(m, gp, base_embed)? {
        if c.is_disjoint(&taken) {
            taken = taken.union(&c);
            k += 1;
        }
    }
    Ok(k)
}

/// Size of a maximum pairwise-disjoint subfamily, stopping early once
/// `enough` is reached.
pub(crate) fn max_disjoint(sets: &[PointSet], enough: usize) -> usize {
    fn go(sets: &[PointSet], i: usize, taken: &PointSet, cur: usize, best: &mut usize, enough: usize) {
        if cur > *best {
            *best = cur;
        }
        if *best >= enough || i == sets.len() || cur + (sets.len() - i) <= *best {
            return;
        }
        if sets[i].is_disjoint(taken) {
            go(sets, i + 1, &taken.union(&sets[i]), cur + 1, best, enough);
        }
        go(sets, i + 1, taken, cur, best, enough);
    }
    let mut best = 0;
    go(sets, 0, &PointSet::new(), 0, &mut best, enough);
    best
}

/// A good pair found inside a larger space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedPair {
    pub base: PointSet,
    pub ext: PointSet,
    /// The induced structure on base ∪ ext, relabelled order-preservingly.
    pub pair: GoodPair,
    /// Local label → point of the host space.
    pub embedding: Vec<Point>,
}

impl EmbeddedPair {
    fn new(m: &LinearSpace, base: PointSet, ext: PointSet) -> Self {
        let (space, embedding) = m.induced_with_map(&base.union(&ext)).expect("points in range");
        let local_base: PointSet = embedding.iter().enumerate().filter(|(_, p)| base.contains(**p)).map(|(i, _)| i).collect();
        EmbeddedPair { pair: GoodPair::new_unchecked(space, local_base), base, ext, embedding }
    }

    pub fn size(&self) -> usize {
        self.embedding.len()
    }

    pub fn base_points(&self) -> Vec<Point> {
        self.base.to_vec()
    }
}

/// All good pairs (B, C) in `m` with |B ∪ C| ≤ `max_size`, in order of size,
/// then the sorted point list of B ∪ C, then B.
pub fn enumerate_good_pairs(m: &LinearSpace, max_size: usize) -> Result<Vec<EmbeddedPair>> {
    GoodPairSearch::new(m, max_size).run(None, true)
}

/// Good pairs of size ≤ `max_size` meeting `touch`.
pub fn good_pairs_touching(m: &LinearSpace, max_size: usize, touch: &PointSet) -> Result<Vec<EmbeddedPair>> {
    GoodPairSearch::new(m, max_size).run(Some(touch), true)
}

/// Good pairs with at least two extension points; one-point extensions are
/// exactly the pairs of points on a line with a third, and callers that only
/// need their counts read them off the line lengths.
pub(crate) fn wide_good_pairs(m: &LinearSpace, max_size: usize, touch: Option<&PointSet>) -> Result<Vec<EmbeddedPair>> {
    GoodPairSearch::new(m, max_size).run(touch, false)
}

/// Search for extensions C with |C| ≥ 2. Every point of such a C lies on two
/// lines meeting C twice, so the search grows C by repairing the deficient
/// point with the fewest options; once C has no deficient point it is a
/// candidate, and is grown further through collinear points. Each candidate
/// is reached exactly once because every branch excludes the alternatives
/// tried before it. Per-line counts of C are kept incrementally.
struct GoodPairSearch<'a> {
    m: &'a LinearSpace,
    max_size: usize,
    core: Vec<bool>,
    in_c: Vec<bool>,
    excl: Vec<bool>,
    meet: Vec<u32>,
    c: Vec<Point>,
    mark: Vec<u32>,
    stamp: u32,
    found: Vec<(PointSet, PointSet)>,
    budget: u64,
}

impl<'a> GoodPairSearch<'a> {
    fn new(m: &'a LinearSpace, max_size: usize) -> Self {
        // points that can lie in an extension of size ≥ 2
        let mut core: PointSet = (0..m.n()).filter(|&p| m.line_indices_through(p).len() >= 2).collect();
        loop {
            let drop: Vec<Point> = core
                .iter()
                .filter(|&p| m.lines_through(p).filter(|l| l.points().iter().any(|&q| q != p && core.contains(q))).count() < 2)
                .collect();
            if drop.is_empty() {
                break;
            }
            for p in drop {
                core.remove(p);
            }
        }
        let n = m.n();
        GoodPairSearch {
            m,
            max_size,
            core: (0..n).map(|p| core.contains(p)).collect(),
            in_c: vec![false; n],
            excl: vec![false; n],
            meet: vec![0; m.lines().len()],
            c: Vec::new(),
            mark: vec![0; n],
            stamp: 0,
            found: Vec::new(),
            budget: 1 << 30,
        }
    }

    fn run(mut self, touch: Option<&PointSet>, alpha: bool) -> Result<Vec<EmbeddedPair>> {
        let m = self.m;
        let mut out: Vec<(PointSet, PointSet)> = Vec::new();
        if alpha && self.max_size >= 3 {
            for l in m.lines() {
                let pts = l.points();
                for &c in pts {
                    for (i, &x) in pts.iter().enumerate() {
                        for &y in &pts[i + 1..] {
                            if x == c || y == c {
                                continue;
                            }
                            if touch.is_none_or(|t| t.contains(c) || t.contains(x) || t.contains(y)) {
                                out.push((PointSet::from([x, y]), PointSet::from([c])));
                            }
                        }
                    }
                }
            }
        }
        if self.max_size >= 2 {
            let roots: Vec<Point> = match touch {
                None => (0..m.n()).filter(|&p| self.core[p]).collect(),
                Some(t) => {
                    let mut near = t.clone();
                    for p in t.iter().filter(|&p| p < m.n()) {
                        for l in m.lines_through(p) {
                            near.extend(l.points().iter().copied());
                        }
                    }
                    near.iter().filter(|&p| p < m.n() && self.core[p]).collect()
                }
            };
            // a root excludes itself from later searches; the global search
            // visits roots in increasing order, so C is found from its least point
            for &r in &roots {
                self.push(r);
                self.grow()?;
                self.pop();
                self.excl[r] = true;
            }
            for (b, c) in std::mem::take(&mut self.found) {
                if touch.is_none_or(|t| !t.is_disjoint(&b) || !t.is_disjoint(&c)) {
                    out.push((b, c));
                }
            }
        }
        let mut pairs: Vec<EmbeddedPair> = out.into_iter().map(|(b, c)| EmbeddedPair::new(m, b, c)).collect();
        pairs.sort_by(|x, y| {
            x.size().cmp(&y.size()).then_with(|| x.embedding.cmp(&y.embedding)).then_with(|| x.base.iter().cmp(y.base.iter()))
        });
        Ok(pairs)
    }

    fn push(&mut self, p: Point) {
        self.in_c[p] = true;
        self.c.push(p);
        for &l in self.m.line_indices_through(p) {
            self.meet[l] += 1;
        }
    }

    fn pop(&mut self) {
        let p = self.c.pop().expect("non-empty");
        self.in_c[p] = false;
        for &l in self.m.line_indices_through(p) {
            self.meet[l] -= 1;
        }
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp += 1;
        self.stamp
    }

    /// Lower bound on the points still to be added (to C or the base): every
    /// point of C ends on two lines holding three points of B ∪ C. A point p
    /// short of that needs, per missing line, one new point if the line
    /// already meets C twice (from S_p, the free points of such lines) and two
    /// otherwise. Points with disjoint S_p served from S_p need distinct new
    /// points; f points served the other way use f distinct lines, each
    /// holding a distinct pair of new points.
    fn extra_points_needed(&mut self) -> usize {
        let m = self.m;
        let mut needy: Vec<Vec<Point>> = Vec::new();
        let mut single = 0;
        for &p in &self.c {
            let mut heavy = 0;
            let mut cheap = 0;
            let mut s = Vec::new();
            for &l in m.line_indices_through(p) {
                match self.meet[l] {
                    k if k >= 3 => heavy += 1,
                    2 => {
                        cheap += 1;
                        s.extend(m.line(l).points().iter().copied().filter(|&q| !self.in_c[q]));
                    }
                    _ => {}
                }
            }
            if heavy < 2 {
                let want = 2 - heavy;
                let from_cheap = want.min(cheap);
                single = single.max(from_cheap + 2 * (want - from_cheap));
                needy.push(s);
            }
        }
        if needy.is_empty() {
            return 0;
        }
        needy.sort_by_key(|s| s.len());
        let st = self.next_stamp();
        let mut family = 0;
        for s in &needy {
            if s.iter().all(|&q| self.mark[q] != st) {
                for &q in s {
                    self.mark[q] = st;
                }
                family += 1;
            }
        }
        let pairs_cover = |w: usize| w * w.saturating_sub(1) / 2;
        let spread = (0..=family)
            .map(|f1| {
                let w2 = (0..).find(|&w| pairs_cover(w) >= family - f1).unwrap();
                f1.max(w2)
            })
            .min()
            .unwrap();
        spread.max(single)
    }

    /// The single-point bound for q were it added to C.
    fn own_need(&self, q: Point) -> usize {
        let (mut heavy, mut cheap) = (0, 0);
        for &l in self.m.line_indices_through(q) {
            match self.meet[l] {
                0 => {}
                1 => cheap += 1,
                _ => heavy += 1,
            }
        }
        if heavy >= 2 {
            return 0;
        }
        let want = 2 - heavy;
        let from_cheap = want.min(cheap);
        from_cheap + 2 * (want - from_cheap)
    }

    fn heavy_count(&self, p: Point) -> usize {
        self.m.line_indices_through(p).iter().filter(|&&l| self.meet[l] >= 2).count()
    }

    fn usable(&self, q: Point) -> bool {
        self.core[q] && !self.in_c[q] && !self.excl[q]
    }

    fn grow(&mut self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::SizeLimit { what: "good pair search budget", size: self.m.n(), limit: 0 });
        }
        self.budget -= 1;
        if self.c.len() + self.extra_points_needed() > self.max_size {
            return Ok(());
        }
        let m = self.m;
        let deficient: Vec<Point> = self.c.iter().copied().filter(|&p| self.heavy_count(p) < 2).collect();
        if deficient.is_empty() && self.c.len() >= 2 {
            let c: PointSet = self.c.iter().copied().collect();
            self.emit(&c)?;
        }
        if self.c.len() + 1 > self.max_size {
            return Ok(());
        }
        let st = self.next_stamp();
        let mut cand = Vec::new();
        if deficient.is_empty() {
            for i in 0..self.c.len() {
                for l in m.lines_through(self.c[i]) {
                    for &q in l.points() {
                        if self.mark[q] != st && self.usable(q) {
                            self.mark[q] = st;
                            cand.push(q);
                        }
                    }
                }
            }
        } else {
            // repair the deficient point with the fewest options
            let mut best: Option<Vec<Point>> = None;
            for d in deficient {
                let mut opts = Vec::new();
                for &l in m.line_indices_through(d) {
                    if self.meet[l] == 1 {
                        opts.extend(m.line(l).points().iter().copied().filter(|&q| self.usable(q)));
                    }
                }
                if best.as_ref().is_none_or(|b| opts.len() < b.len()) {
                    best = Some(opts);
                }
            }
            cand = best.unwrap_or_default();
        }
        cand.sort_unstable();
        for &q in &cand {
            if self.c.len() + 1 + self.own_need(q) > self.max_size {
                self.excl[q] = true;
                continue;
            }
            self.push(q);
            let r = self.grow();
            self.pop();
            r?;
            self.excl[q] = true;
        }
        for &q in &cand {
            self.excl[q] = false;
        }
        Ok(())
    }

    fn emit(&mut self, c: &PointSet) -> Result<()> {
        let m = self.m;
        // lines meeting C twice, indexed locally
        let mut twice: Vec<usize> = Vec::new();
        for &p in &self.c {
            for &l in m.line_indices_through(p) {
                if self.meet[l] >= 2 && !twice.contains(&l) {
                    twice.push(l);
                }
            }
        }
        let delta_c = c.len() as i64 - twice.iter().map(|&l| self.meet[l] as i64 - 2).sum::<i64>();
        if delta_c < 0 {
            return Ok(());
        }
        let st = self.next_stamp();
        let mut pool: Vec<Point> = Vec::new();
        for &l in &twice {
            for &q in m.line(l).points() {
                if !self.in_c[q] && self.mark[q] != st {
                    self.mark[q] = st;
                    pool.push(q);
                }
            }
        }
        pool.sort_unstable();
        let local = |l: usize| twice.iter().position(|&t| t == l);
        let mut pk = BasePicker {
            need: delta_c as usize,
            room: self.max_size - c.len(),
            hits_of: pool.iter().map(|&q| m.line_indices_through(q).iter().filter_map(|&l| local(l)).collect()).collect(),
            // lines through C may carry at most one base point
            guarded_of: pool.iter().map(|&q| m.line_indices_through(q).iter().copied().filter(|&l| self.meet[l] >= 1).collect()).collect(),
            last: vec![0; twice.len()],
            hit: vec![false; twice.len()],
            hits: 0,
            demands: Vec::new(),
            used: Vec::new(),
            chosen: Vec::new(),
            out: Vec::new(),
        };
        for (j, h) in pk.hits_of.iter().enumerate() {
            for &t in h {
                pk.last[t] = j;
            }
        }
        for &p in &self.c {
            let heavy = m.line_indices_through(p).iter().filter(|&&l| self.meet[l] >= 3).count();
            if heavy < 2 {
                let cheap: Vec<usize> = m.line_indices_through(p).iter().filter(|&&l| self.meet[l] == 2).filter_map(|&l| local(l)).collect();
                pk.demands.push((2 - heavy, cheap));
            }
        }
        pk.run(0, &pool);
        for b in std::mem::take(&mut pk.out) {
            let b: PointSet = b.into_iter().collect();
            let (frame, bm, free) = pair_frame(m, &b, c)?;
            // every chosen base point lies on a non-trivial line meeting C, so
            // the base is the unique good one as soon as C is 0-primitive
            if zero_primitive_in(&frame, bm, &free) {
                self.found.push((b, c.clone()));
            }
        }
        Ok(())
    }
}

/// Bases B from the pool hitting exactly `need` of the lines meeting C twice,
/// with no line through C receiving two base points and every point of C
/// left on two lines holding three points of B ∪ C.
struct BasePicker {
    need: usize,
    room: usize,
    hits_of: Vec<Vec<usize>>,
    guarded_of: Vec<Vec<usize>>,
    last: Vec<usize>,
    hit: Vec<bool>,
    hits: usize,
    demands: Vec<(usize, Vec<usize>)>,
    used: Vec<usize>,
    chosen: Vec<Point>,
    out: Vec<Vec<Point>>,
}

impl BasePicker {
    fn feasible(&self, i: usize) -> bool {
        let open = |t: usize| self.hit[t] || self.last[t] >= i;
        if self.hits + (0..self.hit.len()).filter(|&t| !self.hit[t] && self.last[t] >= i).count() < self.need {
            return false;
        }
        self.demands.iter().all(|(want, cheap)| cheap.iter().filter(|&&t| open(t)).count() >= *want)
    }

    fn run(&mut self, i: usize, pool: &[Point]) {
        if self.hits == self.need {
            if self.demands.iter().all(|(want, cheap)| cheap.iter().filter(|&&t| self.hit[t]).count() >= *want) {
                self.out.push(self.chosen.clone());
            }
            return;
        }
        if i == pool.len() || self.chosen.len() == self.room || !self.feasible(i) {
            return;
        }
        let clash = self.guarded_of[i].iter().any(|l| self.used.contains(l));
        let fresh = self.hits_of[i].iter().filter(|&&t| !self.hit[t]).count();
        if !clash && fresh == self.hits_of[i].len() && self.hits + fresh <= self.need {
            let hits = self.hits_of[i].clone();
            for &t in &hits {
                self.hit[t] = true;
            }
            self.hits += fresh;
            let before = self.used.len();
            self.used.extend(self.guarded_of[i].iter().copied());
            self.chosen.push(pool[i]);
            self.run(i + 1, pool);
            self.chosen.pop();
            self.used.truncate(before);
            self.hits -= fresh;
            for &t in &hits {
                self.hit[t] = false;
            }
        }
        self.run(i + 1, pool);
    }
}

/// One step of a decomposition into primitive extensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub from: PointSet,
    pub added: PointSet,
    pub increment: i64,
}

/// Decomposes D ≤ M into a chain of primitive extensions, choosing at each
/// step a smallest strong extension (ties broken lexicographically).
pub fn decompose(m: &LinearSpace, d: &PointSet) -> Result<Vec<Step>> {
    let search = Search::default();
    let all = m.points();
    if !search.is_strong(m, d, &all)?.strong {
        return Err(Error::NotStrong);
    }
    let frame = Frame::whole(m)?;
    let mut x = frame.mask(d);
    let mut steps = Vec::new();
    let mut budget: u64 = 1 << 28;
    while x != frame.all() {
        let dx = frame.delta(x);
        let rest: Vec<usize> = (0..frame.len()).filter(|&i| x >> i & 1 == 0).collect();
        let mut chosen: Option<u128> = None;
        for &p in &rest {
            let y = x | 1 << p;
            let dy = frame.delta(y);
            if dy == dx || (dy == dx + 1 && frame.min_delta(y, frame.all(), &mut budget)?.0 == dy) {
                chosen = Some(1 << p);
                break;
            }
        }
        if chosen.is_none() {
            'size: for size in 2..=rest.len() {
                let mut idx: Vec<usize> = (0..size).collect();
                loop {
                    if budget == 0 {
                        return Err(Error::SizeLimit { what: "decomposition search", size: rest.len(), limit: 0 });
                    }
                    budget -= 1;
                    let t = idx.iter().fold(0u128, |a, &i| a | 1 << rest[i]);
                    if frame.delta(x | t) == dx {
                        chosen = Some(t);
                        break 'size;
                    }
                    let mut i = size;
                    while i > 0 && idx[i - 1] == rest.len() - size + i - 1 {
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
        }
        let t = chosen.ok_or(Error::NotStrong)?;
        steps.push(Step { from: frame.set(x), added: frame.set(t), increment: frame.delta(x | t) - dx });
        x |= t;
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{cycle_ck, fano};

    #[test]
    fn alpha_code_and_bases() {
        let a = GoodPair::alpha();
        assert_eq!(a.code().as_str(), "alpha");
        assert_eq!(CanonicalCode::parse("alpha").unwrap().decode().unwrap(), a);
        let line = LinearSpace::from_lines(5, vec![vec![0, 1, 2, 3, 4]]).unwrap();
        let bases = bases_of(&line, &PointSet::from([0, 1, 2, 3]), &PointSet::from([4])).unwrap();
        assert_eq!(bases.len(), 6);
        assert_eq!(chi(&line, &a, &[0, 1]).unwrap(), 3);
    }

    #[test]
    fn fano_is_good_over_empty() {
        let f = fano();
        assert!(is_good_pair(&f, &PointSet::new(), &f.points()).unwrap());
        assert!(is_primitive(&f, &PointSet::new()).unwrap());
        let gp = GoodPair::new(f.clone(), PointSet::new()).unwrap();
        let code = canonical_code(&gp).unwrap();
        assert_eq!(code.decode().unwrap().code(), code);
        assert_eq!(chi(&f, &gp, &[]).unwrap(), 1);
    }

    #[test]
    fn codes_ignore_labels() {
        let f = fano();
        let moved = f.relabel(&[3, 5, 0, 6, 1, 2, 4], 7).unwrap();
        let a = GoodPair::new_unchecked(f, PointSet::new()).code();
        let b = GoodPair::new_unchecked(moved, PointSet::new()).code();
        assert_eq!(a, b);
    }

    #[test]
    fn code_size_limit() {
        let c3 = cycle_ck(3);
        assert_eq!(c3.size(), 14);
        assert!(canonical_code(&c3).is_ok());
        let c4 = cycle_ck(4);
        assert!(matches!(canonical_code(&c4), Err(Error::SizeLimit { .. })));
        assert!(canonical_code_with_limit(&c4, 24).is_ok());
    }

    #[test]
    fn gp_round_trip() {
        let c = cycle_ck(1);
        let text = c.to_gp_string();
        assert!(text.ends_with("base 0 1\n"));
        assert_eq!(GoodPair::parse_gp(&text).unwrap(), c);
    }

    #[test]
    fn primitive_requires_strong_base() {
        let f = fano();
        assert!(matches!(is_primitive(&f, &PointSet::from([0])), Err(Error::NotStrong)));
    }

    #[test]
    fn enumeration_in_fano() {
        let f = fano();
        let pairs = enumerate_good_pairs(&f, 7).unwrap();
        let alphas = pairs.iter().filter(|p| p.pair.is_alpha()).count();
        assert_eq!(alphas, 21);
        let others: Vec<_> = pairs.iter().filter(|p| !p.pair.is_alpha()).collect();
        assert!(others.iter().any(|p| p.base.is_empty() && p.ext.len() == 7));
        for p in &pairs {
            assert!(is_good_pair(&f, &p.base, &p.ext).unwrap(), "{p:?}");
        }
    }

    #[test]
    fn decompose_fano_over_point() {
        let f = fano();
        let steps = decompose(&f, &PointSet::new()).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].increment, 0);
    }

    #[test]
    fn max_disjoint_exact() {
        let sets = vec![PointSet::from([0, 1]), PointSet::from([1, 2]), PointSet::from([2, 3]), PointSet::from([3, 0])];
        assert_eq!(max_disjoint(&sets, usize::MAX), 2);
    }
}
