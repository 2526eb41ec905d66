//! Text formats: `linear-space v1` and the comment/line helpers shared by the
//! other formats.

use std::collections::HashSet;
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::space::{LinearSpace, Point};

pub const LS_HEADER: &str = "linear-space v1";

/// Non-blank, non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

pub(crate) fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::parse(line, format!("expected a non-negative integer, found {tok:?}")))
}

pub(crate) fn parse_points(toks: &[&str], line: usize) -> Result<Vec<Point>> {
    toks.iter().map(|t| parse_usize(t, line)).collect()
}

impl LinearSpace {
    /// Canonical serialization: header, point count, lines in lexicographic order.
    pub fn to_ls_string(&self) -> String {
        let mut s = format!("{LS_HEADER}\npoints {}\n", self.n());
        for l in self.lines() {
            s.push_str("line");
            for p in l.points() {
                write!(s, " {p}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_ls(text: &str) -> Result<Self> {
        let lines = content_lines(text);
        let (space, used) = parse_ls_block(&lines)?;
        if let Some(&(no, extra)) = lines.get(used) {
            return Err(Error::parse(no, format!("unexpected content {extra:?}")));
        }
        Ok(space)
    }
}

/// Parses one ls-v1 block from the front of `lines`, returning the space and
/// the number of entries consumed. Stops at the first non-`line` record.
pub(crate) fn parse_ls_block(lines: &[(usize, &str)]) -> Result<(LinearSpace, usize)> {
    let mut it = lines.iter();
    match it.next() {
        Some(&(_, h)) if h.split_whitespace().collect::<Vec<_>>() == ["linear-space", "v1"] => {}
        Some(&(no, h)) => return Err(Error::parse(no, format!("expected header {LS_HEADER:?}, found {h:?}"))),
        None => return Err(Error::parse(0, "empty input")),
    }
    let n = match it.next() {
        Some(&(no, l)) => {
            let toks: Vec<&str> = l.split_whitespace().collect();
            match toks.as_slice() {
                ["points", n] => parse_usize(n, no)?,
                _ => return Err(Error::parse(no, format!("expected `points N`, found {l:?}"))),
            }
        }
        None => return Err(Error::parse(lines.last().map_or(0, |l| l.0), "missing `points N`")),
    };
    let mut raw: Vec<Vec<Point>> = Vec::new();
    let mut seen = HashSet::new();
    let mut pairs = HashSet::new();
    let mut used = 2;
    for &(no, l) in &lines[2..] {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.first() != Some(&"line") {
            break;
        }
        let pts = parse_points(&toks[1..], no)?;
        if pts.len() < 3 {
            return Err(Error::parse(no, "a line needs at least 3 points"));
        }
        if pts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::parse(no, "line points must be strictly increasing"));
        }
        if let Some(&p) = pts.iter().find(|&&p| p >= n) {
            return Err(Error::parse(no, format!("point {p} out of range 0..{n}")));
        }
        if !seen.insert(pts.clone()) {
            return Err(Error::parse(no, "duplicate line"));
        }
        // check the two-points-one-line axiom here so the error is positional
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i + 1..] {
                if !pairs.insert((a, b)) {
                    return Err(Error::parse(no, format!("points {a} and {b} already lie on a common line")));
                }
            }
        }
        raw.push(pts);
        used += 1;
    }
    Ok((LinearSpace::from_lines(n, raw)?, used))
}
