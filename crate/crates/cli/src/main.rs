//! `steiner`: batch front end for steiner-core.
//!
//! Exit codes: 0 success, 1 validation failure or violation found, 2 usage,
//! 3 size limit exceeded.

use std::io::Read;
use std::process::ExitCode;
use std::thread;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use steiner::amalgam::{amalgamate_or_identify, default_bound, AmalgamOutcome};
use steiner::builder::{build_with, replay, stats, BuildConfig, BuildTrace};
use steiner::dimension::{self, FlatnessMode};
use steiner::format::LS_HEADER;
use steiner::gallery;
use steiner::interop::{self, IncidenceStructure};
use steiner::mu::{validate_mu, MuFunction};
use steiner::primitives::{chi, enumerate_good_pairs};
use steiner::sampling::{random_k0, random_subset};
use steiner::{Error, GoodPair, LinearSpace, Point, PointSet};

#[derive(Parser)]
#[command(name = "steiner", version, about = "Predimension calculus on finite linear spaces")]
struct Cli {
    /// Emit a JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a linear-space, good-pair, mu or trace file.
    Validate { file: String },
    /// δ of the whole space or of a subset.
    Delta {
        file: String,
        #[arg(long)]
        subset: Option<String>,
    },
    /// Intrinsic closure of a set.
    Icl {
        file: String,
        #[arg(long)]
        set: String,
    },
    /// Dimension of a set.
    D {
        file: String,
        #[arg(long)]
        set: String,
    },
    /// Every good pair of bounded size.
    Goodpairs {
        file: String,
        #[arg(long)]
        max_size: usize,
    },
    /// Disjoint copies of a good pair over a base placement (or the maximum
    /// over all placements).
    Chi {
        file: String,
        #[arg(long)]
        pair: String,
        #[arg(long)]
        at: Option<String>,
    },
    /// Amalgamate E into F over shared points, identifying where μ demands.
    Amalgamate {
        f: String,
        e: String,
        #[arg(long, default_value = "")]
        shared: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Seeded build; writes a trace.
    Build {
        #[arg(long)]
        mu: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        template_max: usize,
        #[arg(long, default_value_t = 100)]
        snapshot_every: usize,
        /// Trace destination; `-` for standard output.
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Line lengths, pair coverage and χ/μ saturation.
    Stats {
        file: String,
        #[arg(long)]
        mu: String,
    },
    /// Named structures.
    Gallery {
        #[command(subcommand)]
        which: Gallery,
    },
    /// Convert between one-sorted, two-sorted and PBD forms.
    Convert {
        #[arg(long, value_enum)]
        to: Target,
        file: String,
    },
    /// Randomized property checks.
    Check {
        #[arg(value_enum)]
        property: Property,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        max_points: usize,
        /// Longest line in sampled spaces.
        #[arg(long, default_value_t = 4)]
        max_line: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Subcommand)]
enum Gallery {
    Fano,
    Ag23,
    /// {a,b} ∪ C_k as a good pair.
    Ck {
        #[arg(long)]
        k: usize,
    },
    /// D_k as a good pair over ∅.
    Dk {
        #[arg(long)]
        k: usize,
    },
    /// The last space A_n of the Fano chain.
    Chain {
        #[arg(long)]
        n: usize,
    },
    /// Cycle graph of a 3-point line through a and b.
    Cyclegraph {
        file: String,
        #[arg(long)]
        a: Point,
        #[arg(long)]
        b: Point,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    TwoSorted,
    OneSorted,
    Pbd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Property {
    Submodular,
    Flat,
    Exchange,
    Matroid,
}

/// What a subcommand produced: text, its JSON mirror, and an exit code.
struct Report {
    text: String,
    json: Value,
    code: u8,
}

impl Report {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Report { text: text.into(), json, code: 0 }
    }
}

enum Failure {
    Usage(String),
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(r) => {
            if cli.json {
                println!("{}", r.json);
            } else {
                print!("{}", r.text);
            }
            ExitCode::from(r.code)
        }
        Err(f) => {
            let (code, kind, msg) = match f {
                Failure::Usage(m) => (2, "usage", m),
                Failure::Io(m) => (1, "io", m),
                Failure::Core(e) if e.is_size_limit() => (3, "size-limit", e.to_string()),
                Failure::Core(e) => (1, "invalid", e.to_string()),
            };
            if cli.json {
                println!("{}", json!({ "ok": false, "kind": kind, "error": msg }));
            } else {
                eprintln!("steiner: {msg}");
            }
            ExitCode::from(code)
        }
    }
}

fn read_input(path: &str) -> Res<String> {
    let mut s = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
    } else {
        s = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))?;
    }
    Ok(s)
}

fn write_output(path: &str, text: &str) -> Res<()> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{path}: {e}")))
}

fn read_ls(path: &str) -> Res<LinearSpace> {
    Ok(LinearSpace::parse_ls(&read_input(path)?)?)
}

fn read_mu(path: &str) -> Res<MuFunction> {
    Ok(MuFunction::parse_mu(&read_input(path)?)?)
}

fn parse_list(s: &str) -> Res<Vec<Point>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::Usage(format!("expected a point index, found {t:?}"))))
        .collect()
}

fn parse_set(m: &LinearSpace, s: &str) -> Res<PointSet> {
    let set: PointSet = parse_list(s)?.into_iter().collect();
    m.check_set(&set)?;
    Ok(set)
}

fn fmt_pts(p: impl IntoIterator<Item = Point>) -> String {
    p.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn first_record(text: &str) -> &str {
    text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).find(|l| !l.is_empty()).unwrap_or("")
}

fn run(cmd: Cmd) -> Res<Report> {
    match cmd {
        Cmd::Validate { file } => validate(&read_input(&file)?),
        Cmd::Delta { file, subset } => {
            let m = read_ls(&file)?;
            let s = match subset {
                Some(s) => parse_set(&m, &s)?,
                None => m.points(),
            };
            let d = m.delta(&s)?;
            Ok(Report::ok(format!("{d}\n"), json!({ "ok": true, "set": s, "delta": d })))
        }
        Cmd::Icl { file, set } => {
            let m = read_ls(&file)?;
            let s = parse_set(&m, &set)?;
            let c = dimension::icl(&m, &s)?;
            Ok(Report::ok(format!("{}\n", fmt_pts(c.iter())), json!({ "ok": true, "set": s, "icl": c })))
        }
        Cmd::D { file, set } => {
            let m = read_ls(&file)?;
            let s = parse_set(&m, &set)?;
            let d = dimension::d(&m, &s)?;
            Ok(Report::ok(format!("{d}\n"), json!({ "ok": true, "set": s, "d": d })))
        }
        Cmd::Goodpairs { file, max_size } => {
            let m = read_ls(&file)?;
            let pairs = enumerate_good_pairs(&m, max_size)?;
            let mut text = String::new();
            let mut rows = Vec::new();
            for p in &pairs {
                let code = p.pair.code();
                text.push_str(&format!("{code} base {} ext {}\n", fmt_pts(p.base.iter()), fmt_pts(p.ext.iter())));
                rows.push(json!({ "code": code.as_str(), "base": p.base, "ext": p.ext }));
            }
            text.push_str(&format!("{} good pairs\n", pairs.len()));
            Ok(Report::ok(text, json!({ "ok": true, "count": pairs.len(), "pairs": rows })))
        }
        Cmd::Chi { file, pair, at } => {
            let m = read_ls(&file)?;
            let gp = GoodPair::parse_gp(&read_input(&pair)?)?;
            match at {
                Some(at) => {
                    let base = parse_list(&at)?;
                    let v = chi(&m, &gp, &base)?;
                    Ok(Report::ok(format!("{v}\n"), json!({ "ok": true, "base": base, "chi": v })))
                }
                None => {
                    let code = gp.code();
                    let mut best: Option<(usize, Vec<Point>)> = None;
                    for p in enumerate_good_pairs(&m, gp.size())? {
                        if p.pair.code() != code {
                            continue;
                        }
                        let base = p.base_points();
                        let v = chi(&m, &p.pair, &base)?;
                        if best.as_ref().is_none_or(|(b, _)| v > *b) {
                            best = Some((v, base));
                        }
                    }
                    let (v, base) = best.unwrap_or((0, Vec::new()));
                    Ok(Report::ok(format!("{v} at base {}\n", fmt_pts(base.iter().copied())), json!({ "ok": true, "code": code.as_str(), "base": base, "chi": v })))
                }
            }
        }
        Cmd::Amalgamate { f, e, shared, mu, bound } => {
            let (f, e, mu) = (read_ls(&f)?, read_ls(&e)?, read_mu(&mu)?);
            let d: PointSet = parse_list(&shared)?.into_iter().collect();
            let bound = bound.unwrap_or_else(|| default_bound(&mu, &e, &d));
            let r = amalgamate_or_identify(&f, &e, &d, &mu, bound)?;
            let emb = fmt_pts(r.e_embedding().iter().copied());
            let (text, j) = match &r.outcome {
                AmalgamOutcome::FreeAmalgam { space, e_embedding } => (
                    format!("free-amalgam\nembedding {emb}\n{}", space.to_ls_string()),
                    json!({ "ok": true, "outcome": "free-amalgam", "embedding": e_embedding, "space": space.to_ls_string(), "steps": r.steps }),
                ),
                AmalgamOutcome::Identified { e_embedding } => (
                    format!("identified\nembedding {emb}\n"),
                    json!({ "ok": true, "outcome": "identified", "embedding": e_embedding, "steps": r.steps }),
                ),
            };
            Ok(Report::ok(text, j))
        }
        Cmd::Build { mu, steps, seed, template_max, snapshot_every, out } => {
            let mu = read_mu(&mu)?;
            let cfg = BuildConfig { snapshot_every, ..BuildConfig::new(steps, seed, template_max) };
            let (m, trace) = build_with(&mu, &cfg)?;
            let text = trace.to_trace_string();
            let summary = json!({ "ok": true, "points": m.n(), "lines": m.lines().len(), "steps": trace.steps.len(), "mu_digest": trace.mu_digest });
            if out == "-" {
                Ok(Report { text, json: json!({ "ok": true, "trace": trace.to_trace_string() }), code: 0 })
            } else {
                write_output(&out, &text)?;
                Ok(Report::ok(format!("{} points, {} lines after {} steps; trace written to {out}\n", m.n(), m.lines().len(), trace.steps.len()), summary))
            }
        }
        Cmd::Stats { file, mu } => {
            let (m, mu) = (read_ls(&file)?, read_mu(&mu)?);
            let s = stats(&m, &mu)?;
            let mut text = format!("points {}\nlines {}\n", s.points, s.lines);
            for (len, c) in &s.line_lengths {
                text.push_str(&format!("length {len}: {c}\n"));
            }
            text.push_str(&format!("covered pairs {} ({:.4})\n", s.covered_pairs, s.pair_coverage));
            for sat in &s.saturation {
                text.push_str(&format!("{} bases {} max-chi {} mu {} ratio {:.3}\n", sat.code, sat.bases, sat.max_chi, sat.mu, sat.max_ratio));
            }
            Ok(Report::ok(text, json!({ "ok": true, "stats": s })))
        }
        Cmd::Gallery { which } => gallery_cmd(which),
        Cmd::Convert { to, file } => convert(to, &read_input(&file)?),
        Cmd::Check { property, trials, seed, max_points, max_line, jobs } => check(property, trials, seed, max_points, max_line, jobs),
    }
}

fn validate(text: &str) -> Res<Report> {
    let head = first_record(text);
    if head == LS_HEADER {
        let last = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).rfind(|l| !l.is_empty()).unwrap_or("");
        if last.starts_with("base") {
            let gp = GoodPair::parse_gp(text)?;
            let good = steiner::primitives::is_good_pair(gp.space(), gp.base(), gp.ext())?;
            let code = gp.code();
            let text = format!("good pair: {}\ncode {code}\n", if good { "yes" } else { "no" });
            return Ok(Report { text, json: json!({ "ok": good, "kind": "good-pair", "code": code.as_str() }), code: if good { 0 } else { 1 } });
        }
        let m = LinearSpace::parse_ls(text)?;
        let bad = dimension::k0_violation(&m)?;
        let mut out = format!("linear space: {} points, {} lines\n", m.n(), m.lines().len());
        match &bad {
            None => out.push_str("in K_0: yes\n"),
            Some(w) => out.push_str(&format!("in K_0: no (δ < 0 on {})\n", fmt_pts(w.iter()))),
        }
        let j = json!({ "ok": bad.is_none(), "kind": "linear-space", "points": m.n(), "lines": m.lines().len(), "k0_witness": bad });
        return Ok(Report { text: out, json: j, code: if bad.is_none() { 0 } else { 1 } });
    }
    if head.starts_with("alpha") {
        let mu = MuFunction::parse_mu(text)?;
        let v = validate_mu(&mu);
        let mut out = format!("mu: {}\n", if v.valid { "valid" } else { "invalid" });
        for r in &v.reasons {
            out.push_str(&format!("  {r}\n"));
        }
        out.push_str(&format!("allows Fano: {}\n", v.in_family_f));
        return Ok(Report { text: out, json: json!({ "ok": v.valid, "kind": "mu", "reasons": v.reasons, "allows_fano": v.in_family_f }), code: if v.valid { 0 } else { 1 } });
    }
    if head.starts_with("trace") {
        let t = BuildTrace::parse_trace(text)?;
        let m = replay(&t)?;
        let out = format!("trace: {} steps replayed to {} points, {} lines\n", t.steps.len(), m.n(), m.lines().len());
        return Ok(Report::ok(out, json!({ "ok": true, "kind": "trace", "steps": t.steps.len(), "points": m.n(), "lines": m.lines().len() })));
    }
    Err(Failure::Core(Error::Invalid(format!("unrecognised file; first record {head:?}"))))
}

fn gallery_cmd(which: Gallery) -> Res<Report> {
    let ls = |m: LinearSpace| Report::ok(m.to_ls_string(), json!({ "ok": true, "space": m.to_ls_string() }));
    let gp = |g: GoodPair| Report::ok(g.to_gp_string(), json!({ "ok": true, "pair": g.to_gp_string(), "code": g.code().as_str() }));
    let positive = |k: usize, what: &str| if k == 0 { Err(Failure::Usage(format!("{what} must be at least 1"))) } else { Ok(()) };
    Ok(match which {
        Gallery::Fano => ls(gallery::fano()),
        Gallery::Ag23 => ls(gallery::ag23()),
        Gallery::Ck { k } => {
            positive(k, "--k")?;
            gp(gallery::cycle_ck(k))
        }
        Gallery::Dk { k } => {
            positive(k, "--k")?;
            gp(gallery::cycle_dk(k))
        }
        Gallery::Chain { n } => ls(gallery::fano_chain(n).pop().expect("chain starts with A_0")),
        Gallery::Cyclegraph { file, a, b } => {
            let m = read_ls(&file)?;
            let g = gallery::cycle_graph(&m, a, b)?;
            let comps = g.components();
            let mut text = format!("third point {}\n", g.c);
            for c in &comps {
                text.push_str(&format!("component {}\n", fmt_pts(c.iter().copied())));
            }
            Report::ok(text, json!({ "ok": true, "graph": g, "components": comps }))
        }
    })
}

fn convert(to: Target, text: &str) -> Res<Report> {
    let one_sorted = first_record(text) == LS_HEADER;
    let space = || -> Res<LinearSpace> {
        if one_sorted {
            Ok(LinearSpace::parse_ls(text)?)
        } else {
            Ok(interop::to_one_sorted(&IncidenceStructure::parse_inc(text)?)?)
        }
    };
    let out = match to {
        Target::TwoSorted => interop::to_two_sorted(&space()?).to_inc_string(),
        Target::OneSorted => space()?.to_ls_string(),
        Target::Pbd => interop::to_pbd(&space()?).to_pbd_string(),
    };
    Ok(Report::ok(out.clone(), json!({ "ok": true, "output": out })))
}

/// One randomized trial; `Some(description)` on a violation.
fn trial(property: Property, seed: u64, index: usize, max_points: usize, max_line: usize) -> std::result::Result<Option<String>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let n = rng.gen_range(1..=max_points.max(1));
    let m = random_k0(&mut rng, n, max_line.max(2));
    match property {
        Property::Submodular => {
            let (a, b) = (random_subset(&mut rng, n, 0.5), random_subset(&mut rng, n, 0.5));
            let lhs = m.delta(&a.union(&b))? + m.delta(&a.intersection(&b))?;
            let rhs = m.delta(&a)? + m.delta(&b)?;
            Ok((lhs > rhs).then(|| format!("δ(A∪B)+δ(A∩B) = {lhs} > {rhs} = δ(A)+δ(B) for A = {a:?}, B = {b:?} in\n{}", m.to_ls_string())))
        }
        Property::Flat => {
            let s = rng.gen_range(2..=4);
            let fam: Vec<PointSet> = (0..s).map(|_| random_subset(&mut rng, n, 0.5)).collect();
            let r = dimension::check_flatness(&m, &fam, FlatnessMode::Delta)?;
            Ok((!r.holds).then(|| format!("δ(∪F) = {} > {} for F = {fam:?} in\n{}", r.lhs, r.rhs, m.to_ls_string())))
        }
        Property::Exchange => Ok(dimension::check_exchange(&m)?.map(|f| format!("{f:?} in\n{}", m.to_ls_string()))),
        Property::Matroid => Ok(interop::check_matroid_exchange(&m, 64)?.map(|(d1, d2, a)| format!("D1 = {d1:?}, D2 = {d2:?}, a = {a} in\n{}", m.to_ls_string()))),
    }
}

type TrialResult = (usize, std::result::Result<Option<String>, Error>);

fn check(property: Property, trials: usize, seed: u64, max_points: usize, max_line: usize, jobs: usize) -> Res<Report> {
    if max_points > 64 {
        return Err(Failure::Core(Error::SizeLimit { what: "check --max-points", size: max_points, limit: 64 }));
    }
    let jobs = jobs.clamp(1, trials.max(1));
    // trial i runs on stream i of the seed, so results do not depend on --jobs
    let chunks: Vec<Vec<TrialResult>> = thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| s.spawn(move || (j..trials).step_by(jobs).map(|i| (i, trial(property, seed, i, max_points, max_line))).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("check worker panicked")).collect()
    });
    let mut results: Vec<_> = chunks.into_iter().flatten().collect();
    results.sort_by_key(|r| r.0);
    let mut violations = Vec::new();
    for (i, r) in results {
        if let Some(v) = r? {
            violations.push(json!({ "trial": i, "report": v }));
        }
    }
    let mut text = String::new();
    if let Some(first) = violations.first() {
        text.push_str(&format!("first violation (trial {}):\n{}\n", first["trial"], first["report"].as_str().unwrap_or("")));
    }
    text.push_str(&format!("{trials} trials, {} violations\n", violations.len()));
    let code = if violations.is_empty() { 0 } else { 1 };
    Ok(Report { text, json: json!({ "ok": code == 0, "trials": trials, "violations": violations.len(), "reports": violations }), code })
}
