//! Free amalgamation over a shared base, and the amalgamate-or-identify
//! procedure that keeps the result inside K_μ.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dimension::is_strong;
use crate::embed::least_embedding;
use crate::error::{Error, Result};
use crate::mu::{in_k_mu_touching, KMuReport, MuFunction};
use crate::pointset::PointSet;
use crate::primitives::{bases_of, decompose, GoodPair};
use crate::space::{LinearSpace, Point};

/// Checks that `shared` (pairs of an F point and an E point) induces the same
/// structure in both spaces.
fn check_base(f: &LinearSpace, e: &LinearSpace, shared: &[(Point, Point)]) -> Result<()> {
    let fs: PointSet = shared.iter().map(|s| s.0).collect();
    let es: PointSet = shared.iter().map(|s| s.1).collect();
    f.check_set(&fs)?;
    e.check_set(&es)?;
    if fs.len() != shared.len() || es.len() != shared.len() {
        return Err(Error::Invalid("shared points must be distinct".into()));
    }
    for i in 0..shared.len() {
        for j in i + 1..shared.len() {
            for k in j + 1..shared.len() {
                let (a, b, c) = (shared[i], shared[j], shared[k]);
                if f.collinear(a.0, b.0, c.0) != e.collinear(a.1, b.1, c.1) {
                    return Err(Error::BaseMismatch);
                }
            }
        }
    }
    Ok(())
}

/// G = F ⊕_D E, where D is identified through `shared`. Points of F keep their
/// labels; points of E outside D are appended in increasing order. Returns G
/// and the map from E's points into G.
pub fn free_amalgam_mapped(f: &LinearSpace, e: &LinearSpace, shared: &[(Point, Point)]) -> Result<(LinearSpace, Vec<Point>)> {
    check_base(f, e, shared)?;
    let de: PointSet = shared.iter().map(|s| s.1).collect();
    if !is_strong(e, &de, &e.points())?.strong {
        return Err(Error::NotStrong);
    }
    Ok(glue(f, e, shared))
}

pub(crate) fn glue(f: &LinearSpace, e: &LinearSpace, shared: &[(Point, Point)]) -> (LinearSpace, Vec<Point>) {
    let mut g = f.clone();
    let mut map = vec![usize::MAX; e.n()];
    for &(fp, ep) in shared {
        map[ep] = fp;
    }
    for slot in map.iter_mut() {
        if *slot == usize::MAX {
            *slot = g.push_point();
        }
    }
    let de: PointSet = shared.iter().map(|s| s.1).collect();
    for l in e.lines() {
        let on_d: Vec<Point> = l.points().iter().copied().filter(|&p| de.contains(p)).collect();
        let merged = if on_d.len() >= 2 { g.line_index_through(map[on_d[0]], map[on_d[1]]) } else { None };
        match merged {
            Some(li) => {
                let li_pts = g.line(li).to_set();
                for &p in l.points() {
                    if !li_pts.contains(map[p]) {
                        let idx = g.line_index_through(map[on_d[0]], map[on_d[1]]).unwrap();
                        g.extend_line(idx, map[p]).expect("free amalgam preserves the axioms");
                    }
                }
            }
            None => {
                if on_d.len() < 3 {
                    g.insert_line(l.points().iter().map(|&p| map[p]).collect()).expect("free amalgam preserves the axioms");
                }
            }
        }
    }
    (g, map)
}

/// Free amalgam with D given by shared labels.
pub fn free_amalgam(f: &LinearSpace, e: &LinearSpace, d: &PointSet) -> Result<(LinearSpace, Vec<Point>)> {
    let shared: Vec<(Point, Point)> = d.iter().map(|p| (p, p)).collect();
    free_amalgam_mapped(f, e, &shared)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepAction {
    Free,
    Identified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Points of E added in this step.
    pub added: Vec<Point>,
    pub increment: i64,
    pub action: StepAction,
    /// Where the added points went.
    pub image: Vec<Point>,
    /// Violations that forced an identification.
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmalgamOutcome {
    /// F was extended; E maps into the new space, possibly with some steps
    /// identified with existing copies.
    FreeAmalgam { space: LinearSpace, e_embedding: Vec<Point> },
    /// Every new step already had a copy in F; E embeds into F itself.
    Identified { e_embedding: Vec<Point> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamResult {
    pub outcome: AmalgamOutcome,
    pub steps: Vec<StepRecord>,
}

impl AmalgamResult {
    pub fn space<'a>(&'a self, f: &'a LinearSpace) -> &'a LinearSpace {
        match &self.outcome {
            AmalgamOutcome::FreeAmalgam { space, .. } => space,
            AmalgamOutcome::Identified { .. } => f,
        }
    }

    pub fn e_embedding(&self) -> &[Point] {
        match &self.outcome {
            AmalgamOutcome::FreeAmalgam { e_embedding, .. } | AmalgamOutcome::Identified { e_embedding } => e_embedding,
        }
    }
}

/// Size of the good pair realised by a 0-step: its base plus the new points.
fn step_pair_size(sub: &LinearSpace, from: &PointSet, added: &PointSet) -> Result<usize> {
    if added.len() == 1 {
        return Ok(3);
    }
    Ok(bases_of(sub, from, added)?[0].len() + added.len())
}

/// Amalgamates E into F over D one primitive step at a time. A step that
/// would break the μ bound among good pairs of size ≤ `bound` is instead
/// identified with the lexicographically least copy already present.
pub fn amalgamate_or_identify_mapped(f: &LinearSpace, e: &LinearSpace, shared: &[(Point, Point)], mu: &MuFunction, bound: usize) -> Result<AmalgamResult> {
    check_base(f, e, shared)?;
    let de: PointSet = shared.iter().map(|s| s.1).collect();
    let steps = decompose(e, &de).map_err(|err| if err == Error::NotStrong { Error::NotStrong } else { err })?;
    let mut g = f.clone();
    let mut map = vec![usize::MAX; e.n()];
    for &(fp, ep) in shared {
        map[ep] = fp;
    }
    let mut records = Vec::new();
    for step in steps {
        let upto = step.from.union(&step.added);
        let (sub, back) = e.induced_with_map(&upto)?;
        let local = |s: &PointSet| -> PointSet { back.iter().enumerate().filter(|(_, p)| s.contains(**p)).map(|(i, _)| i).collect() };
        let (from_l, added_l) = (local(&step.from), local(&step.added));
        let fixed: Vec<(Point, Point)> = from_l.iter().map(|i| (i, map[back[i]])).collect();
        let added: Vec<Point> = step.added.to_vec();
        if step.increment == 0 {
            let need = step_pair_size(&sub, &from_l, &added_l)?;
            if need > bound {
                return Err(Error::BoundTooSmall { needed: need, bound });
            }
        }
        let pins: Vec<(Point, Point)> = fixed.iter().map(|&(e, f)| (f, e)).collect();
        let (g2, smap) = glue(&g, &sub, &pins);
        let new_pts: PointSet = added_l.iter().map(|i| smap[i]).collect();
        let report = if step.increment == 0 { in_k_mu_touching(&g2, mu, bound, &new_pts)? } else { KMuReport { ok: true, violations: Vec::new() } };
        if report.ok {
            for i in added_l.iter() {
                map[back[i]] = smap[i];
            }
            records.push(StepRecord { image: added.iter().map(|&p| map[p]).collect(), added, increment: step.increment, action: StepAction::Free, violations: Vec::new() });
            g = g2;
            continue;
        }
        let violations: Vec<String> = report.violations.iter().map(|v| format!("{} over {:?}: chi {} > mu {}", v.code, v.base, v.chi, v.mu)).collect();
        match least_embedding(&sub, &g, &fixed, PointSet::new())? {
            Some(img) => {
                for i in added_l.iter() {
                    map[back[i]] = img[i];
                }
                records.push(StepRecord { image: added.iter().map(|&p| map[p]).collect(), added, increment: 0, action: StepAction::Identified, violations });
            }
            None => {
                let code = GoodPair::new_unchecked(sub, from_l).code().to_string();
                return Err(Error::NoIdentification { code, violations });
            }
        }
    }
    let outcome = if g.n() == f.n() && g == *f {
        AmalgamOutcome::Identified { e_embedding: map }
    } else {
        AmalgamOutcome::FreeAmalgam { space: g, e_embedding: map }
    };
    Ok(AmalgamResult { outcome, steps: records })
}

pub fn amalgamate_or_identify(f: &LinearSpace, e: &LinearSpace, d: &PointSet, mu: &MuFunction, bound: usize) -> Result<AmalgamResult> {
    let shared: Vec<(Point, Point)> = d.iter().map(|p| (p, p)).collect();
    amalgamate_or_identify_mapped(f, e, &shared, mu, bound)
}

/// Codes of the overrides in μ, used to pick a default bound.
pub fn default_bound(mu: &MuFunction, e: &LinearSpace, d: &PointSet) -> usize {
    let sizes: BTreeSet<usize> = mu.overrides.keys().filter_map(|c| c.decode().ok()).map(|g| g.size()).collect();
    sizes.last().copied().unwrap_or(3).max(3) + e.n() - d.len()
}
