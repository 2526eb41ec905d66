//! Bounding functions μ on good pairs, the `mu v1` file format, and the
//! bounded membership test for the class K_μ.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::format::content_lines;
use crate::gallery::{cycle_ck, fano};
use crate::pointset::PointSet;
use crate::primitives::{copies_over, is_good_pair, max_disjoint, wide_good_pairs, CanonicalCode, GoodPair};
use crate::space::{LinearSpace, Point};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DefaultPolicy {
    /// μ(B, C) = max(δ(B), 1) for every pair without an override.
    #[default]
    MaxDeltaBaseOne,
}

impl DefaultPolicy {
    pub fn name(self) -> &'static str {
        match self {
            DefaultPolicy::MaxDeltaBaseOne => "max-delta-base-one",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        (s == "max-delta-base-one").then_some(DefaultPolicy::MaxDeltaBaseOne)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuFunction {
    pub alpha: i64,
    pub overrides: BTreeMap<CanonicalCode, i64>,
    pub default: DefaultPolicy,
}

impl MuFunction {
    pub fn new(alpha: i64) -> Self {
        MuFunction { alpha, overrides: BTreeMap::new(), default: DefaultPolicy::default() }
    }

    pub fn with(mut self, gp: &GoodPair, value: i64) -> Self {
        self.overrides.insert(gp.code(), value);
        self
    }

    /// Line length forced by μ(α): every line ends up with μ(α) + 2 points.
    pub fn line_length(&self) -> usize {
        (self.alpha + 2) as usize
    }

    pub fn value_for(&self, code: &CanonicalCode, base_delta: i64) -> i64 {
        if code.as_str() == "alpha" {
            return self.alpha;
        }
        if let Some(&v) = self.overrides.get(code) {
            return v;
        }
        match self.default {
            DefaultPolicy::MaxDeltaBaseOne => base_delta.max(1),
        }
    }

    pub fn value(&self, gp: &GoodPair) -> i64 {
        self.value_for(&gp.code(), gp.base_delta())
    }

    pub fn to_mu_string(&self) -> String {
        let mut s = format!("alpha {}\n", self.alpha);
        for (c, v) in &self.overrides {
            writeln!(s, "pair {c} {v}").unwrap();
        }
        writeln!(s, "default {}", self.default.name()).unwrap();
        s
    }

    pub fn parse_mu(text: &str) -> Result<Self> {
        let mut alpha = None;
        let mut overrides = BTreeMap::new();
        let mut default = DefaultPolicy::default();
        for (no, l) in content_lines(text) {
            let toks: Vec<&str> = l.split_whitespace().collect();
            match toks.as_slice() {
                ["alpha", v] if alpha.is_none() => {
                    alpha = Some(v.parse::<i64>().map_err(|_| Error::parse(no, format!("bad alpha value {v:?}")))?);
                }
                ["alpha", _] => return Err(Error::parse(no, "duplicate alpha record")),
                ["pair", code, v] => {
                    let code = CanonicalCode::parse(code).map_err(|e| Error::parse(no, e.to_string()))?;
                    let v: i64 = v.parse().map_err(|_| Error::parse(no, format!("bad value {v:?}")))?;
                    if overrides.insert(code, v).is_some() {
                        return Err(Error::parse(no, "duplicate pair record"));
                    }
                }
                ["default", name] => {
                    default = DefaultPolicy::from_name(name).ok_or_else(|| Error::parse(no, format!("unknown default policy {name:?}")))?;
                }
                _ => return Err(Error::parse(no, format!("unrecognised record {l:?}"))),
            }
        }
        let alpha = alpha.ok_or_else(|| Error::parse(0, "missing alpha record"))?;
        Ok(MuFunction { alpha, overrides, default })
    }

    /// SHA-256 of the canonical serialization, in hex.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_mu_string().as_bytes()))
    }

    /// μ of the Fano plane over the empty base; at least 1 means Fano copies
    /// are allowed.
    pub fn fano_value(&self) -> i64 {
        self.value(&GoodPair::new_unchecked(fano(), PointSet::new()))
    }
}

/// μ_X: γ_k has value 3 for k ∈ X and 2 otherwise; listed explicitly for
/// k up to max X.
pub fn mu_x(x: &BTreeSet<usize>, alpha: i64) -> MuFunction {
    let mut mu = MuFunction::new(alpha);
    let top = x.iter().copied().max().unwrap_or(0);
    for k in 1..=top {
        mu = mu.with(&cycle_ck(k), if x.contains(&k) { 3 } else { 2 });
    }
    mu
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuValidation {
    pub valid: bool,
    pub reasons: Vec<String>,
    /// Whether μ allows a copy of the Fano plane (μ(∅, Fano) ≥ 1).
    pub in_family_f: bool,
}

pub fn validate_mu(mu: &MuFunction) -> MuValidation {
    let mut reasons = Vec::new();
    if mu.alpha < 1 {
        reasons.push(format!("alpha must be at least 1, found {}", mu.alpha));
    }
    for (code, &v) in &mu.overrides {
        if code.as_str() == "alpha" {
            reasons.push("the value at alpha is set by the alpha record".into());
            continue;
        }
        let gp = match code.decode() {
            Ok(gp) => gp,
            Err(e) => {
                reasons.push(e.to_string());
                continue;
            }
        };
        match is_good_pair(gp.space(), gp.base(), gp.ext()) {
            Ok(true) => {}
            Ok(false) => reasons.push(format!("{code} is not a good pair")),
            Err(e) => reasons.push(format!("{code}: {e}")),
        }
        if gp.ext().len() >= 2 && v < gp.base_delta() {
            reasons.push(format!("{code}: value {v} is below δ(B) = {}", gp.base_delta()));
        }
        if v < 0 {
            reasons.push(format!("{code}: negative value {v}"));
        }
    }
    MuValidation { valid: reasons.is_empty(), reasons, in_family_f: mu.fano_value() >= 1 }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: CanonicalCode,
    pub base: Vec<Point>,
    pub chi: usize,
    pub mu: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KMuReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// χ ≤ μ for every good pair of size at most `bound`.
pub fn in_k_mu_bounded(m: &LinearSpace, mu: &MuFunction, bound: usize) -> Result<KMuReport> {
    k_mu_check(m, mu, bound, None)
}

/// The same check restricted to good pairs meeting `touch`.
pub fn in_k_mu_touching(m: &LinearSpace, mu: &MuFunction, bound: usize, touch: &PointSet) -> Result<KMuReport> {
    k_mu_check(m, mu, bound, Some(touch))
}

fn k_mu_check(m: &LinearSpace, mu: &MuFunction, bound: usize, touch: Option<&PointSet>) -> Result<KMuReport> {
    let mut violations = Vec::new();
    if bound >= 3 {
        for l in m.lines() {
            if touch.is_some_and(|t| l.meet(t) == 0) {
                continue;
            }
            if (l.len() as i64) - 2 > mu.alpha {
                violations.push(Violation { code: CanonicalCode::alpha(), base: l.points()[..2].to_vec(), chi: l.len() - 2, mu: mu.alpha });
            }
        }
    }
    let mut done: HashSet<(PointSet, PointSet)> = HashSet::new();
    for p in wide_good_pairs(m, bound, touch)? {
        if done.contains(&(p.base.clone(), p.ext.clone())) {
            continue;
        }
        let base = p.base_points();
        let copies = copies_over(m, &p.pair, &base)?;
        for c in &copies {
            done.insert((p.base.clone(), c.clone()));
        }
        let code = p.pair.code();
        let limit = mu.value_for(&code, p.pair.base_delta());
        if limit < 0 || max_disjoint(&copies, limit as usize + 1) > limit as usize {
            violations.push(Violation { code, base, chi: max_disjoint(&copies, usize::MAX), mu: limit });
        }
    }
    Ok(KMuReport { ok: violations.is_empty(), violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::fano;

    #[test]
    fn mu_file_round_trip() {
        let mu = mu_x(&BTreeSet::from([2]), 1);
        let text = mu.to_mu_string();
        assert!(text.starts_with("alpha 1\npair "));
        assert!(text.ends_with("default max-delta-base-one\n"));
        let back = MuFunction::parse_mu(&text).unwrap();
        assert_eq!(back, mu);
        assert_eq!(back.digest(), mu.digest());
        assert_eq!(back.value(&cycle_ck(2)), 3);
        assert_eq!(back.value(&cycle_ck(1)), 2);
        assert_eq!(back.value(&cycle_ck(3)), 2);
    }

    #[test]
    fn validation() {
        let ok = validate_mu(&MuFunction::new(1));
        assert!(ok.valid && ok.in_family_f);
        let bad = validate_mu(&MuFunction::new(1).with(&cycle_ck(1), 1));
        assert!(!bad.valid);
        let no_fano = validate_mu(&MuFunction::new(1).with(&GoodPair::new_unchecked(fano(), PointSet::new()), 0));
        assert!(no_fano.valid && !no_fano.in_family_f);
        assert!(!validate_mu(&MuFunction::new(0)).valid);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(MuFunction::parse_mu("pair alpha 2\n"), Err(Error::Parse { line: 0, .. })));
        assert!(matches!(MuFunction::parse_mu("alpha 1\nbogus\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(MuFunction::parse_mu("alpha 1\npair gXX 2\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn fano_in_k_mu() {
        let f = fano();
        assert!(in_k_mu_bounded(&f, &MuFunction::new(1), 7).unwrap().ok);
        let r = in_k_mu_bounded(&f, &MuFunction::new(1).with(&GoodPair::new_unchecked(fano(), PointSet::new()), 0), 7).unwrap();
        assert!(!r.ok);
        assert_eq!(r.violations[0].chi, 1);
    }

    #[test]
    fn long_line_violates_small_alpha() {
        let s = LinearSpace::from_lines(4, vec![vec![0, 1, 2, 3]]).unwrap();
        assert!(!in_k_mu_bounded(&s, &MuFunction::new(1), 4).unwrap().ok);
        assert!(in_k_mu_bounded(&s, &MuFunction::new(2), 4).unwrap().ok);
    }
}
