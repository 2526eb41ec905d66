//! The frozen oracle corpus: spaces on at most 12 points with query sets and
//! the values the exhaustive oracles gave for them.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steiner::sampling::{random_k0, random_linear_space, random_subset};
use steiner::{LinearSpace, PointSet};

pub const PATH: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/corpus.txt");

pub struct Query {
    pub x: PointSet,
    pub hi: PointSet,
    pub strong: bool,
    pub hi_strong: bool,
    pub icl: Vec<usize>,
    pub d: i64,
}

pub struct Instance {
    pub space: LinearSpace,
    pub queries: Vec<Query>,
}

fn pts(v: &[usize]) -> String {
    v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_pts(s: &str) -> Vec<usize> {
    s.split_whitespace().map(|t| t.parse().unwrap()).collect()
}

/// Regenerates the corpus text from a fixed seed using the oracles.
pub fn generate() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = String::new();
    for i in 0..200 {
        let n = rng.gen_range(1..=12);
        let max_line = rng.gen_range(3..=5);
        // every fourth instance may leave K_0
        let m = if i % 4 == 3 {
            let attempts = rng.gen_range(0..=2 * n);
            random_linear_space(&mut rng, n, attempts, max_line)
        } else {
            random_k0(&mut rng, n, max_line)
        };
        out.push_str("instance\n");
        out.push_str(&m.to_ls_string());
        let all: Vec<usize> = (0..n).collect();
        for _ in 0..4 {
            let p = rng.gen_range(0.1..0.6);
            let x = random_subset(&mut rng, n, p).to_vec();
            let hi = PointSet::from(&x[..]).union(&random_subset(&mut rng, n, 0.5)).to_vec();
            writeln!(
                out,
                "query {} | hi {} | strong {} | hi-strong {} | icl {} | d {}",
                pts(&x),
                pts(&hi),
                u8::from(super::strong_in(&m, &x, &all)),
                u8::from(super::strong_in(&m, &x, &hi)),
                pts(&super::icl(&m, &x)),
                super::d(&m, &x)
            )
            .unwrap();
        }
        out.push_str("end\n");
    }
    out
}

pub fn load() -> Vec<Instance> {
    let text = std::fs::read_to_string(PATH).expect("corpus file");
    let mut out = Vec::new();
    let mut block = String::new();
    let mut queries = Vec::new();
    for line in text.lines() {
        if line == "instance" {
            block.clear();
            queries.clear();
        } else if line == "end" {
            out.push(Instance { space: LinearSpace::parse_ls(&block).unwrap(), queries: std::mem::take(&mut queries) });
        } else if let Some(q) = line.strip_prefix("query") {
            let f: Vec<&str> = q.split('|').map(str::trim).collect();
            let field = |i: usize, key: &str| f[i].strip_prefix(key).unwrap().trim().to_string();
            queries.push(Query {
                x: parse_pts(f[0]).into_iter().collect(),
                hi: parse_pts(&field(1, "hi")).into_iter().collect(),
                strong: field(2, "strong") == "1",
                hi_strong: field(3, "hi-strong") == "1",
                icl: parse_pts(&field(4, "icl")),
                d: field(5, "d").parse().unwrap(),
            });
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    out
}
