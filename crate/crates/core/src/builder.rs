//! Seeded construction of finite structures in K_μ: lines are completed to
//! length μ(α) + 2, good-pair templates are realised over bases while χ stays
//! below μ, and fresh points are added at a fixed rate.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amalgam::{amalgamate_or_identify_mapped, AmalgamOutcome};
use crate::error::{Error, Result};
use crate::format::{content_lines, parse_ls_block, parse_points, parse_usize};
use crate::gallery::template_library;
use crate::mu::{in_k_mu_touching, validate_mu, MuFunction};
use crate::pointset::PointSet;
use crate::primitives::{copies_over, enumerate_good_pairs, max_disjoint, CanonicalCode, GoodPair, CODE_SIZE_LIMIT};
use crate::space::{LinearSpace, Point};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceStep {
    AddPoint { point: Point },
    /// `point` joins the line through `a` and `b` (a new line if the pair was
    /// trivial).
    CompleteLine { a: Point, b: Point, point: Point },
    /// The template's extension points, in canonical order, went to `new`.
    RealizeGoodPair { code: CanonicalCode, base: Vec<Point>, new: Vec<Point> },
    /// Realising the template would have broken the μ bound; it was
    /// identified with the copy at `image` instead.
    Identify { code: CanonicalCode, base: Vec<Point>, image: Vec<Point> },
    /// Realisation refused: it breaks the μ bound and no copy was available.
    Reject { code: CanonicalCode, base: Vec<Point> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildTrace {
    pub seed: u64,
    pub mu_digest: String,
    pub template_max: usize,
    pub steps: Vec<TraceStep>,
    /// (number of steps applied, state).
    pub snapshots: Vec<(usize, LinearSpace)>,
}

#[derive(Clone, Debug)]
pub struct BuildConfig {
    pub steps: usize,
    pub seed: u64,
    pub template_max: usize,
    /// Every `add_point_every`-th step adds a fresh point.
    pub add_point_every: usize,
    pub snapshot_every: usize,
    /// Templates beyond the gallery, e.g. read from gp-v1 files.
    pub extra_templates: Vec<GoodPair>,
    /// After the step budget, extend every short line to full length.
    pub close_lines: bool,
}

impl BuildConfig {
    pub fn new(steps: usize, seed: u64, template_max: usize) -> Self {
        BuildConfig { steps, seed, template_max, add_point_every: 4, snapshot_every: 100, extra_templates: Vec::new(), close_lines: true }
    }
}

struct Template {
    code: CanonicalCode,
    pair: GoodPair,
}

struct Builder<'a> {
    mu: &'a MuFunction,
    cfg: &'a BuildConfig,
    rng: ChaCha8Rng,
    m: LinearSpace,
    templates: Vec<Template>,
    next_template: usize,
    frontier: Vec<Vec<Point>>,
    last_new: Vec<Point>,
    short: VecDeque<(Point, Point)>,
    saturated: HashSet<(usize, Vec<Point>)>,
    steps: Vec<TraceStep>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Task {
    CompleteLine,
    Realize,
    AddPoint,
}

/// Gallery templates (and extras) that can ever be realised under μ, with
/// the Fano plane and the chain link first so the chain can grow from the
/// start.
fn templates(mu: &MuFunction, cfg: &BuildConfig) -> Vec<Template> {
    let k = mu.line_length();
    let mut seen = HashSet::new();
    let mut out: Vec<(usize, Template)> = Vec::new();
    let gallery = template_library().into_iter();
    let extra = cfg.extra_templates.iter().cloned().map(|gp| (String::new(), gp));
    for (name, gp) in gallery.chain(extra) {
        if gp.is_alpha() || gp.size() > cfg.template_max || gp.space().max_line_len() > k {
            continue;
        }
        let code = gp.code();
        if !seen.insert(code.clone()) || mu.value_for(&code, gp.base_delta()) <= 0 {
            continue;
        }
        let rank = match name.as_str() {
            "fano" => 0,
            "chain-link" => 1,
            _ => 2,
        };
        let pair = code.decode().expect("codes decode");
        out.push((rank, Template { code, pair }));
    }
    out.sort_by(|a, b| (a.0, a.1.pair.size(), &a.1.code).cmp(&(b.0, b.1.pair.size(), &b.1.code)));
    out.into_iter().map(|(_, t)| t).collect()
}

impl<'a> Builder<'a> {
    fn new(mu: &'a MuFunction, cfg: &'a BuildConfig) -> Self {
        let templates = templates(mu, cfg);
        let n = templates.len();
        Builder {
            mu,
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            m: LinearSpace::empty(0),
            templates,
            next_template: 0,
            frontier: vec![Vec::new(); n],
            last_new: Vec::new(),
            short: VecDeque::new(),
            saturated: HashSet::new(),
            steps: Vec::new(),
        }
    }

    fn k(&self) -> usize {
        self.mu.line_length()
    }

    fn schedule(&self, i: usize) -> [Task; 3] {
        let r = self.cfg.add_point_every.max(2);
        match i % r {
            s if s == r - 1 => [Task::AddPoint, Task::CompleteLine, Task::Realize],
            s if s % 2 == 0 => [Task::CompleteLine, Task::Realize, Task::AddPoint],
            _ => [Task::Realize, Task::CompleteLine, Task::AddPoint],
        }
    }

    fn step(&mut self, i: usize) -> Result<()> {
        for task in self.schedule(i) {
            let done = match task {
                Task::CompleteLine => self.complete_line()?,
                Task::Realize => self.realize()?,
                Task::AddPoint => {
                    let p = self.m.push_point();
                    self.steps.push(TraceStep::AddPoint { point: p });
                    true
                }
            };
            if done {
                return Ok(());
            }
        }
        unreachable!("adding a point always succeeds")
    }

    fn track_short(&mut self, p: Point) {
        let k = self.k();
        let lines: Vec<(Point, Point)> = self.m.lines_through(p).filter(|l| l.len() < k).map(|l| (l.points()[0], l.points()[1])).collect();
        for key in lines {
            if !self.short.contains(&key) {
                self.short.push_back(key);
            }
        }
    }

    fn complete_line(&mut self) -> Result<bool> {
        let k = self.k();
        while let Some((a, b)) = self.short.pop_front() {
            let Some(li) = self.m.line_index_through(a, b) else { continue };
            if self.m.line(li).len() >= k {
                continue;
            }
            let before = self.m.clone();
            let p = self.m.push_point();
            self.m.extend_line(self.m.line_index_through(a, b).unwrap(), p)?;
            if self.local_ok(&PointSet::singleton(p))? {
                self.steps.push(TraceStep::CompleteLine { a, b, point: p });
                self.track_short(p);
                return Ok(true);
            }
            self.m = before;
            self.steps.push(TraceStep::Reject { code: CanonicalCode::alpha(), base: vec![a, b] });
            return Ok(true);
        }
        let n = self.m.n();
        if n < 2 {
            return Ok(false);
        }
        for _ in 0..64 {
            let a = self.rng.gen_range(0..n);
            let b = self.rng.gen_range(0..n);
            if a == b || !self.m.is_trivial_pair(a, b) {
                continue;
            }
            let (a, b) = (a.min(b), a.max(b));
            let before = self.m.clone();
            let p = self.m.push_point();
            self.m.insert_line(vec![a, b, p])?;
            if self.local_ok(&PointSet::singleton(p))? {
                self.steps.push(TraceStep::CompleteLine { a, b, point: p });
                self.track_short(p);
            } else {
                self.m = before;
                self.steps.push(TraceStep::Reject { code: CanonicalCode::alpha(), base: vec![a, b] });
            }
            return Ok(true);
        }
        Ok(false)
    }

    fn local_ok(&self, touch: &PointSet) -> Result<bool> {
        Ok(in_k_mu_touching(&self.m, self.mu, self.cfg.template_max, touch)?.ok)
    }

    /// Ordered base tuples drawn from `pool`, shuffled, at most `limit`.
    fn tuples(&mut self, pool: &[Point], size: usize, limit: usize) -> Vec<Vec<Point>> {
        let mut out = Vec::new();
        if size == 0 {
            return vec![Vec::new()];
        }
        if pool.len() < size {
            return out;
        }
        let mut seen = HashSet::new();
        for _ in 0..limit * 4 {
            let t: Vec<Point> = pool.choose_multiple(&mut self.rng, size).copied().collect();
            if seen.insert(t.clone()) {
                out.push(t);
                if out.len() == limit {
                    break;
                }
            }
        }
        out
    }

    fn base_fits(&self, t: usize, base: &[Point]) -> Result<bool> {
        if self.saturated.contains(&(t, base.to_vec())) {
            return Ok(false);
        }
        let gp = &self.templates[t].pair;
        // the base must carry the template's base structure
        let b: Vec<Point> = gp.base().to_vec();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                for l in j + 1..b.len() {
                    if gp.space().collinear(b[i], b[j], b[l]) != self.m.collinear(base[i], base[j], base[l]) {
                        return Ok(false);
                    }
                }
            }
        }
        let copies = copies_over(&self.m, gp, base)?;
        let limit = self.mu.value_for(&self.templates[t].code, gp.base_delta()).max(0) as usize;
        Ok(max_disjoint(&copies, limit) < limit)
    }

    fn pick_base(&mut self, t: usize) -> Result<Option<Vec<Point>>> {
        let size = self.templates[t].pair.base().len();
        let sources = [self.frontier[t].clone(), self.last_new.clone(), (0..self.m.n()).collect::<Vec<_>>()];
        for pool in sources {
            for base in self.tuples(&pool, size, 12) {
                if self.base_fits(t, &base)? {
                    return Ok(Some(base));
                }
                self.saturated.insert((t, base));
            }
        }
        Ok(None)
    }

    fn realize(&mut self) -> Result<bool> {
        for _ in 0..self.templates.len() {
            let t = self.next_template;
            self.next_template = (self.next_template + 1) % self.templates.len();
            let Some(base) = self.pick_base(t)? else { continue };
            let gp = self.templates[t].pair.clone();
            let code = self.templates[t].code.clone();
            let shared: Vec<(Point, Point)> = base.iter().enumerate().map(|(i, &p)| (p, i)).collect();
            let ext: Vec<Point> = gp.ext().to_vec();
            match amalgamate_or_identify_mapped(&self.m, gp.space(), &shared, self.mu, self.cfg.template_max) {
                Ok(r) => match r.outcome {
                    AmalgamOutcome::FreeAmalgam { space, e_embedding } => {
                        let new: Vec<Point> = ext.iter().map(|&i| e_embedding[i]).collect();
                        self.m = space;
                        for &p in &new {
                            self.track_short(p);
                        }
                        self.frontier[t] = new.clone();
                        self.last_new = new.clone();
                        self.steps.push(TraceStep::RealizeGoodPair { code, base, new });
                    }
                    AmalgamOutcome::Identified { e_embedding } => {
                        let image = ext.iter().map(|&i| e_embedding[i]).collect();
                        self.saturated.insert((t, base.clone()));
                        self.steps.push(TraceStep::Identify { code, base, image });
                    }
                },
                Err(Error::NoIdentification { .. }) => {
                    self.saturated.insert((t, base.clone()));
                    self.steps.push(TraceStep::Reject { code, base });
                }
                Err(e) => return Err(e),
            }
            return Ok(true);
        }
        Ok(false)
    }
}

pub fn build(mu: &MuFunction, steps: usize, seed: u64, template_max: usize) -> Result<(LinearSpace, BuildTrace)> {
    build_with(mu, &BuildConfig::new(steps, seed, template_max))
}

pub fn build_with(mu: &MuFunction, cfg: &BuildConfig) -> Result<(LinearSpace, BuildTrace)> {
    let v = validate_mu(mu);
    if !v.valid {
        return Err(Error::InvalidMu(v.reasons.join("; ")));
    }
    if cfg.template_max > CODE_SIZE_LIMIT {
        return Err(Error::SizeLimit { what: "template size", size: cfg.template_max, limit: CODE_SIZE_LIMIT });
    }
    let mut b = Builder::new(mu, cfg);
    let mut snapshots = Vec::new();
    for i in 0..cfg.steps {
        b.step(i)?;
        if cfg.snapshot_every > 0 && (i + 1) % cfg.snapshot_every == 0 && i + 1 < cfg.steps {
            snapshots.push((b.steps.len(), b.m.clone()));
        }
    }
    if cfg.close_lines {
        while !b.short.is_empty() {
            b.complete_line()?;
        }
    }
    if cfg.steps > 0 {
        snapshots.push((b.steps.len(), b.m.clone()));
    }
    let trace = BuildTrace { seed: cfg.seed, mu_digest: mu.digest(), template_max: cfg.template_max, steps: b.steps, snapshots };
    Ok((b.m, trace))
}

/// Re-applies the recorded steps from the empty structure.
pub fn replay(trace: &BuildTrace) -> Result<LinearSpace> {
    let mut m = LinearSpace::empty(0);
    for (i, s) in trace.steps.iter().enumerate() {
        let bad = |msg: &str| Error::Invalid(format!("trace step {i}: {msg}"));
        match s {
            TraceStep::AddPoint { point } => {
                if m.push_point() != *point {
                    return Err(bad("point label out of sequence"));
                }
            }
            TraceStep::CompleteLine { a, b, point } => {
                if m.push_point() != *point {
                    return Err(bad("point label out of sequence"));
                }
                match m.line_index_through(*a, *b) {
                    Some(li) => m.extend_line(li, *point)?,
                    None => {
                        m.insert_line(vec![*a, *b, *point])?;
                    }
                }
            }
            TraceStep::RealizeGoodPair { code, base, new } => {
                let gp = code.decode()?;
                let ext: Vec<Point> = gp.ext().to_vec();
                if ext.len() != new.len() || base.len() != gp.base().len() {
                    return Err(bad("embedding does not match the code"));
                }
                let shared: Vec<(Point, Point)> = base.iter().enumerate().map(|(i, &p)| (p, i)).collect();
                let (g, map) = crate::amalgam::glue(&m, gp.space(), &shared);
                if ext.iter().map(|&i| map[i]).ne(new.iter().copied()) {
                    return Err(bad("new points out of sequence"));
                }
                m = g;
            }
            TraceStep::Identify { .. } | TraceStep::Reject { .. } => {}
        }
    }
    Ok(m)
}

impl BuildTrace {
    pub fn to_trace_string(&self) -> String {
        let mut s = format!("trace v1\nseed {}\nmu-sha256 {}\ntemplate-max {}\n", self.seed, self.mu_digest, self.template_max);
        let list = |v: &[Point]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ");
        let mut snaps = self.snapshots.iter().peekable();
        for (i, st) in self.steps.iter().enumerate() {
            while let Some((at, sp)) = snaps.next_if(|(at, _)| *at == i) {
                write!(s, "snapshot {at}\n{}end\n", sp.to_ls_string()).unwrap();
            }
            match st {
                TraceStep::AddPoint { point } => writeln!(s, "add-point {point}"),
                TraceStep::CompleteLine { a, b, point } => writeln!(s, "complete-line {a} {b} -> {point}"),
                TraceStep::RealizeGoodPair { code, base, new } => writeln!(s, "realize {code} base {} -> {}", list(base), list(new)),
                TraceStep::Identify { code, base, image } => writeln!(s, "identify {code} base {} -> {}", list(base), list(image)),
                TraceStep::Reject { code, base } => writeln!(s, "reject {code} base {}", list(base)),
            }
            .unwrap();
        }
        for (at, sp) in snaps {
            write!(s, "snapshot {at}\n{}end\n", sp.to_ls_string()).unwrap();
        }
        s
    }

    pub fn parse_trace(text: &str) -> Result<Self> {
        let lines = content_lines(text);
        let header = |i: usize, key: &str| -> Result<&str> {
            let &(no, l) = lines.get(i).ok_or_else(|| Error::parse(0, format!("missing `{key}` record")))?;
            l.strip_prefix(key).map(str::trim).ok_or_else(|| Error::parse(no, format!("expected `{key} ...`, found {l:?}")))
        };
        if header(0, "trace")? != "v1" {
            return Err(Error::parse(lines[0].0, "expected `trace v1`"));
        }
        let seed: u64 = header(1, "seed")?.parse().map_err(|_| Error::parse(lines[1].0, "bad seed"))?;
        let mu_digest = header(2, "mu-sha256")?.to_string();
        let template_max = parse_usize(header(3, "template-max")?, lines[3].0)?;
        let mut steps = Vec::new();
        let mut snapshots = Vec::new();
        let mut i = 4;
        let split = |rest: &str, no: usize| -> Result<(Vec<Point>, Vec<Point>)> {
            let (l, r) = rest.split_once("->").ok_or_else(|| Error::parse(no, "expected `->`"))?;
            let toks = |x: &str| x.split_whitespace().map(str::to_owned).collect::<Vec<String>>();
            let lt = toks(l);
            let rt = toks(r);
            Ok((
                parse_points(&lt.iter().map(String::as_str).collect::<Vec<_>>(), no)?,
                parse_points(&rt.iter().map(String::as_str).collect::<Vec<_>>(), no)?,
            ))
        };
        while i < lines.len() {
            let (no, l) = lines[i];
            let (kind, rest) = l.split_once(' ').unwrap_or((l, ""));
            match kind {
                "snapshot" => {
                    let at = parse_usize(rest.trim(), no)?;
                    let (sp, used) = parse_ls_block(&lines[i + 1..])?;
                    i += 1 + used;
                    match lines.get(i) {
                        Some(&(_, "end")) => {}
                        Some(&(no, _)) => return Err(Error::parse(no, "expected `end` after snapshot")),
                        None => return Err(Error::parse(no, "unterminated snapshot")),
                    }
                    snapshots.push((at, sp));
                }
                "add-point" => steps.push(TraceStep::AddPoint { point: parse_usize(rest.trim(), no)? }),
                "complete-line" => {
                    let (ab, p) = split(rest, no)?;
                    if ab.len() != 2 || p.len() != 1 {
                        return Err(Error::parse(no, "expected `complete-line a b -> p`"));
                    }
                    steps.push(TraceStep::CompleteLine { a: ab[0], b: ab[1], point: p[0] });
                }
                "realize" | "identify" | "reject" => {
                    let (code, rest) = rest.split_once(" base").ok_or_else(|| Error::parse(no, "expected `base`"))?;
                    let code = CanonicalCode::parse(code).map_err(|e| Error::parse(no, e.to_string()))?;
                    if kind == "reject" {
                        let toks: Vec<&str> = rest.split_whitespace().collect();
                        steps.push(TraceStep::Reject { code, base: parse_points(&toks, no)? });
                    } else {
                        let (base, out) = split(rest, no)?;
                        steps.push(if kind == "realize" {
                            TraceStep::RealizeGoodPair { code, base, new: out }
                        } else {
                            TraceStep::Identify { code, base, image: out }
                        });
                    }
                }
                _ => return Err(Error::parse(no, format!("unknown record {l:?}"))),
            }
            i += 1;
        }
        Ok(BuildTrace { seed, mu_digest, template_max, steps, snapshots })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Saturation {
    pub code: CanonicalCode,
    pub bases: usize,
    pub max_chi: usize,
    pub mu: i64,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub points: usize,
    pub lines: usize,
    pub line_lengths: BTreeMap<usize, usize>,
    pub covered_pairs: u64,
    pub pair_coverage: f64,
    pub saturation: Vec<Saturation>,
}

/// Fraction of pairs from `pts` that lie on a nontrivial line of `m`.
pub fn pair_coverage_of(m: &LinearSpace, pts: &PointSet) -> f64 {
    let v = pts.to_vec();
    let total = v.len() * v.len().saturating_sub(1) / 2;
    if total == 0 {
        return 0.0;
    }
    let mut covered = 0usize;
    for (i, &a) in v.iter().enumerate() {
        for &b in &v[i + 1..] {
            if !m.is_trivial_pair(a, b) {
                covered += 1;
            }
        }
    }
    covered as f64 / total as f64
}

pub fn stats(m: &LinearSpace, mu: &MuFunction) -> Result<Stats> {
    stats_with(m, mu, 7, 500)
}

/// Statistics with χ/μ saturation over the first `sample` good pairs of size
/// at most `bound`.
pub fn stats_with(m: &LinearSpace, mu: &MuFunction, bound: usize, sample: usize) -> Result<Stats> {
    let mut line_lengths = BTreeMap::new();
    for l in m.lines() {
        *line_lengths.entry(l.len()).or_default() += 1;
    }
    let total = (m.n() * m.n().saturating_sub(1) / 2) as u64;
    let covered = m.covered_pairs();
    let mut sat: BTreeMap<CanonicalCode, Saturation> = BTreeMap::new();
    let mut seen = HashSet::new();
    for p in enumerate_good_pairs(m, bound)?.into_iter().take(sample) {
        let base = p.base_points();
        let code = p.pair.code();
        if !seen.insert((code.clone(), base.clone())) {
            continue;
        }
        let chi = max_disjoint(&copies_over(m, &p.pair, &base)?, usize::MAX);
        let mv = mu.value_for(&code, p.pair.base_delta());
        let ratio = if mv > 0 { chi as f64 / mv as f64 } else { f64::INFINITY };
        let e = sat.entry(code.clone()).or_insert(Saturation { code, bases: 0, max_chi: 0, mu: mv, max_ratio: 0.0 });
        e.bases += 1;
        e.max_chi = e.max_chi.max(chi);
        e.max_ratio = e.max_ratio.max(ratio);
    }
    Ok(Stats {
        points: m.n(),
        lines: m.lines().len(),
        line_lengths,
        covered_pairs: covered,
        pair_coverage: if total == 0 { 0.0 } else { covered as f64 / total as f64 },
        saturation: sat.into_values().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::fano;

    #[test]
    fn zero_steps() {
        let (m, t) = build(&MuFunction::new(1), 0, 1, 10).unwrap();
        assert_eq!(m.n(), 0);
        assert!(t.steps.is_empty() && t.snapshots.is_empty());
    }

    #[test]
    fn fano_stats() {
        let s = stats(&fano(), &MuFunction::new(1)).unwrap();
        assert_eq!(s.line_lengths, BTreeMap::from([(3, 7)]));
        assert_eq!(s.pair_coverage, 1.0);
        assert_eq!(stats(&LinearSpace::empty(4), &MuFunction::new(1)).unwrap().pair_coverage, 0.0);
    }

    #[test]
    fn small_build_round_trips() {
        let mu = MuFunction::new(1);
        let (m, t) = build(&mu, 40, 7, 10).unwrap();
        assert!(m.lines().iter().all(|l| l.len() == 3));
        assert_eq!(replay(&t).unwrap(), m);
        let text = t.to_trace_string();
        let back = BuildTrace::parse_trace(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_trace_string(), text);
    }

    #[test]
    fn invalid_mu_is_rejected() {
        assert!(matches!(build(&MuFunction::new(0), 5, 1, 10), Err(Error::InvalidMu(_))));
    }
}
