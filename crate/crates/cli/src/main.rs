use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use vclab::extremal::{hamming_ball, mz_family, stability_example, star, MzAssignment, Side};
use vclab::polycert::{certify, default_gamma, verify_certificate, Certificate};
use vclab::search::{self, Budget};
use vclab::shadow::{check_kk, check_partial_shadow, exact_kk_min, shadow_s};
use vclab::structure::{analyze_s1, link_audit, links, partition_tj, select_transversal};
use vclab::sunflower::{audit_witness_sunflowers, find_sunflower, largest_sunflower};
use vclab::vc::complete_uniform;
use vclab::{
    parse_family, parse_witnessed, select_witnesses, serialize_family, serialize_witnessed, vc_dimension, Error,
    Family, SubsetMask, WitnessedFamily,
};

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "vclab", version, about = "Exact tools for uniform set systems of bounded VC-dimension")]
struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Star,
    Mz,
    Stability,
    Hamming,
    Complete,
}

#[derive(Clone, Copy, ValueEnum)]
enum AssignmentKind {
    One,
    Two,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Vc,
    Switness,
    Intersecting,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a named construction.
    Construct {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Star centre (default n).
        #[arg(long)]
        center: Option<usize>,
        #[arg(long, value_enum, default_value = "one")]
        assignment: AssignmentKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// VC-dimension of a family.
    Vcdim { file: PathBuf },
    /// Canonical witnesses; fails if some member is shattered.
    Witness {
        file: PathBuf,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Link audit, or the link at one vertex.
    Links {
        file: PathBuf,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        v: Option<usize>,
    },
    /// Near-transversal J for parameter s.
    Transversal {
        file: PathBuf,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        s: u64,
    },
    /// Partition audit over J, or the single-element witness analysis.
    Audit {
        file: PathBuf,
        #[arg(long)]
        d: Option<usize>,
        /// Comma-separated elements of J.
        #[arg(long = "J", value_delimiter = ',')]
        j: Vec<usize>,
        #[arg(long)]
        s1: bool,
    },
    /// s-shadow of a family, or the partial-shadow check against --partial.
    Shadow {
        file: PathBuf,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        partial: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Kruskal-Katona check of a family, or the exact minimum for --m.
    Kk {
        file: Option<PathBuf>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
    },
    /// Sunflower search, or the witness-class audit.
    Sunflower {
        file: PathBuf,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        audit: bool,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Rank certificate, or verification of one.
    Polycert {
        file: Option<PathBuf>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        gamma: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Exact maximum-family search.
    Search {
        #[arg(long, value_enum)]
        problem: Problem,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long)]
        at_most: bool,
        #[arg(long)]
        nontrivial: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for an s-witness family above C(n-1, d).
    Hunt {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
}

/// Outcome of a subcommand: printed text or JSON, plus an exit code.
struct Report {
    text: String,
    json: Value,
    code: u8,
}

impl Report {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Report { text: text.into(), json, code: 0 }
    }

    fn holds(mut self, holds: bool) -> Self {
        if !holds {
            self.code = EXIT_VIOLATION;
        }
        self
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn is_witnessed(text: &str) -> bool {
    text.lines().any(|l| !l.trim_start().starts_with('#') && l.contains('|'))
}

/// Any family file; witnesses are dropped.
fn load_family(path: &Path) -> Result<Family, Error> {
    let text = read(path)?;
    if is_witnessed(&text) {
        Ok(parse_witnessed(&text)?.family().clone())
    } else {
        parse_family(&text)
    }
}

/// Witnesses from the file if present, else canonical ones for `d` (default k-1).
fn load_witnessed(path: &Path, d: Option<usize>) -> Result<WitnessedFamily, Error> {
    let text = read(path)?;
    if is_witnessed(&text) {
        let w = parse_witnessed(&text)?;
        if let Some(d) = d {
            if d != w.d() {
                return Err(Error::InvalidParameter(format!("file has d = {}, --d {d} given", w.d())));
            }
        }
        return Ok(w);
    }
    let f = parse_family(&text)?;
    let k = f.uniform_rank().ok_or_else(|| Error::InvalidParameter("family has no uniform header".into()))?;
    let d = match d {
        Some(d) => d,
        None => k.checked_sub(1).ok_or_else(|| Error::InvalidParameter("k must be >= 1".into()))?,
    };
    select_witnesses(&f, d)
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn elements(m: &SubsetMask) -> String {
    format!("{m}")
}

fn run(cli: &Cli) -> Result<Report, Error> {
    match &cli.cmd {
        Cmd::Construct { kind, n, d, center, assignment, out } => {
            let (n, d) = (*n, *d);
            let text = match kind {
                Kind::Mz => {
                    let a = match assignment {
                        AssignmentKind::One => MzAssignment::constant(n, d, Side::One)?,
                        AssignmentKind::Two => MzAssignment::constant(n, d, Side::Two)?,
                        AssignmentKind::Random => MzAssignment::random(n, d, &mut ChaCha8Rng::seed_from_u64(cli.seed))?,
                    };
                    serialize_witnessed(&mz_family(n, d, &a)?)
                }
                Kind::Star => serialize_family(&star(n, d + 1, center.unwrap_or(n))?),
                Kind::Stability => serialize_family(&stability_example(n, d)?),
                Kind::Hamming => serialize_family(&hamming_ball(n, d)?),
                Kind::Complete => serialize_family(&complete_uniform(n, d + 1)?),
            };
            let size = text.lines().count() - 1;
            let summary = json!({ "n": n, "d": d, "size": size, "out": out.as_ref().map(|p| p.display().to_string()) });
            match out {
                Some(p) => {
                    write(p, &text)?;
                    Ok(Report::ok(format!("wrote {size} sets to {}", p.display()), summary))
                }
                None => Ok(Report::ok(text.trim_end(), summary)),
            }
        }
        Cmd::Vcdim { file } => {
            let f = load_family(file)?;
            let vc = vc_dimension(&f)?;
            Ok(Report::ok(vc.to_string(), json!({ "n": f.n(), "size": f.len(), "vc_dimension": vc })))
        }
        Cmd::Witness { file, d, out } => {
            let f = load_family(file)?;
            let d = d.or_else(|| f.uniform_rank().map(|k| k.saturating_sub(1))).unwrap_or(0);
            match select_witnesses(&f, d) {
                Ok(w) => {
                    let text = serialize_witnessed(&w);
                    let j = json!({
                        "n": w.n(), "d": w.d(), "size": w.len(), "holds": true,
                        "size_d_witnesses": w.count_size_d_witnesses(),
                        "witnesses": w.witnesses().iter().map(|b| b.to_vec()).collect::<Vec<_>>(),
                    });
                    if let Some(p) = out {
                        write(p, &text)?;
                    }
                    Ok(Report::ok(text.trim_end(), j))
                }
                Err(Error::ShatteredMember { index, set }) => Ok(Report {
                    text: format!("member {index} ({set}) is shattered: VC-dimension exceeds {d}"),
                    json: json!({ "holds": false, "shattered_member": index, "set": set }),
                    code: EXIT_VIOLATION,
                }),
                Err(e) => Err(e),
            }
        }
        Cmd::Links { file, d, v } => {
            let w = load_witnessed(file, *d)?;
            match v {
                Some(v) => {
                    let lp = links(&w, *v)?;
                    Ok(Report::ok(
                        format!("X_{v}: {} sets, Y_{v}: {} sets", lp.x.len(), lp.y.len()),
                        to_json(&lp),
                    ))
                }
                None => {
                    let a = link_audit(&w)?;
                    let text = claims_text(&to_json(&a.claims), a.holds);
                    Ok(Report::ok(text, to_json(&a)).holds(a.holds))
                }
            }
        }
        Cmd::Transversal { file, d, s } => {
            let w = load_witnessed(file, *d)?;
            let j = select_transversal(&w, *s)?;
            Ok(Report::ok(elements(&j), json!({ "s": s, "j": j.to_vec(), "size": j.cardinality() })))
        }
        Cmd::Audit { file, d, j, s1 } => {
            let w = load_witnessed(file, *d)?;
            if *s1 {
                let r = analyze_s1(&w)?;
                let text = claims_text(&to_json(&r.claims), r.holds);
                return Ok(Report::ok(text, to_json(&r)).holds(r.holds));
            }
            let jm = SubsetMask::from_elements(w.n(), j.iter().copied())?;
            let a = partition_tj(&w, &jm)?;
            let sizes: Vec<usize> = a.parts.iter().map(Family::len).collect();
            let text = format!(
                "parts T1..T6 = {sizes:?}, deficiency {}\n{}",
                a.deficiency,
                claims_text(&to_json(&a.claims), a.holds)
            );
            Ok(Report::ok(text, to_json(&a)).holds(a.holds))
        }
        Cmd::Shadow { file, s, partial, k } => {
            let f = load_family(file)?;
            match partial {
                Some(g) => {
                    let g = load_family(g)?;
                    let k = k.ok_or_else(|| Error::InvalidParameter("--partial needs --k".into()))?;
                    let r = check_partial_shadow(&f, &g, k)?;
                    Ok(Report::ok(
                        format!("|G| = {} >= {} : {}", r.g_size, r.bound, if r.holds { "holds" } else { "VIOLATED" }),
                        to_json(&r),
                    )
                    .holds(r.holds))
                }
                None => {
                    let s = s.ok_or_else(|| Error::InvalidParameter("--s is required".into()))?;
                    let sh = shadow_s(&f, s)?;
                    Ok(Report::ok(serialize_family(&sh).trim_end(), json!({ "s": s, "size": sh.len(), "shadow": sh })))
                }
            }
        }
        Cmd::Kk { file, m, k, s } => match (file, m) {
            (Some(file), None) => {
                let f = load_family(file)?;
                let r = check_kk(&f)?;
                Ok(Report::ok(
                    format!(
                        "|F| = {}, shadow {} >= {:.6} : {}",
                        r.size,
                        r.shadow_size,
                        r.lovasz_bound,
                        if r.holds { "holds" } else { "VIOLATED" }
                    ),
                    to_json(&r),
                )
                .holds(r.holds))
            }
            (None, Some(m)) => {
                let k = k.ok_or_else(|| Error::InvalidParameter("--m needs --k".into()))?;
                let s = s.unwrap_or(k.saturating_sub(1));
                let v = exact_kk_min(*m, k, s)?;
                Ok(Report::ok(v.to_string(), json!({ "m": m, "k": k, "s": s, "min_shadow": v.to_string() })))
            }
            _ => Err(Error::InvalidParameter("give either a family file or --m".into())),
        },
        Cmd::Sunflower { file, r, audit, d } => {
            if *audit {
                let w = load_witnessed(file, *d)?;
                let a = audit_witness_sunflowers(&w)?;
                let text = format!(
                    "{} witness classes, limit {}, {} violations",
                    a.classes.len(),
                    a.limit,
                    a.violations.len()
                );
                return Ok(Report::ok(text, to_json(&a)).holds(a.holds));
            }
            let f = load_family(file)?;
            let found = match r {
                Some(r) => find_sunflower(&f, *r)?,
                None => largest_sunflower(&f),
            };
            Ok(match found {
                Some(sf) => Report::ok(
                    format!("sunflower of size {} with core {}: members {:?}", sf.len(), sf.core, sf.indices),
                    json!({ "found": true, "size": sf.len(), "core": sf.core.to_vec(), "indices": sf.indices }),
                ),
                None => Report::ok("no sunflower", json!({ "found": false })),
            })
        }
        Cmd::Polycert { file, d, gamma, out, verify } => {
            if let Some(p) = verify {
                let cert = Certificate::from_json(&read(p)?)?;
                return match verify_certificate(&cert) {
                    Ok(()) => Ok(Report::ok(
                        format!("certificate verified: |F| = {} <= {}", cert.family_size, cert.bound),
                        json!({ "verified": true, "bound": cert.bound, "family_size": cert.family_size }),
                    )),
                    Err(e @ Error::CertificateMismatch(_)) => Ok(Report {
                        text: e.to_string(),
                        json: json!({ "verified": false, "reason": e.to_string() }),
                        code: EXIT_VIOLATION,
                    }),
                    Err(e) => Err(e),
                };
            }
            let file = file.as_ref().ok_or_else(|| Error::InvalidParameter("a family file is required".into()))?;
            let w = load_witnessed(file, *d)?;
            let cert = certify(&w, gamma.unwrap_or_else(|| default_gamma(w.d())))?;
            let text = cert.to_json();
            if let Some(p) = out {
                write(p, &text)?;
            }
            Ok(Report::ok(
                format!(
                    "rank {} = side {}; |F| = {} <= C({},{}) - {} = {}",
                    cert.rank,
                    cert.matrix_side,
                    cert.family_size,
                    cert.n,
                    cert.d,
                    cert.yz_pairs.len(),
                    cert.bound
                ),
                to_json(&cert),
            ))
        }
        Cmd::Search { problem, n, d, k, s, at_most, nontrivial, out } => {
            let budget = Budget::from_env()?;
            let (size, family, j, flagged) = match problem {
                Problem::Vc => {
                    let d = d.ok_or_else(|| Error::InvalidParameter("--d is required".into()))?;
                    let o = search::max_vc_family(*n, d, &budget)?;
                    (o.size, o.family.clone(), to_json(&o), false)
                }
                Problem::Switness => {
                    let d = d.ok_or_else(|| Error::InvalidParameter("--d is required".into()))?;
                    let o = search::max_switness_family(*n, d, *s, *at_most, &budget)?;
                    (o.size, o.family.clone(), to_json(&o), o.exceeds_conjectured_bound)
                }
                Problem::Intersecting => {
                    let k = k.or(d.map(|d| d + 1)).ok_or_else(|| Error::InvalidParameter("--k is required".into()))?;
                    let o = search::max_intersecting(*n, k, *nontrivial, &budget)?;
                    (o.size, o.family.clone(), to_json(&o), false)
                }
            };
            if let Some(p) = out {
                write(p, &serialize_family(&family))?;
            }
            let mut text = format!("maximum {size}");
            if flagged {
                text = format!("COUNTEREXAMPLE: size {size} exceeds the conjectured bound\n{}", serialize_family(&family));
            }
            Ok(Report::ok(text, j).holds(!flagged))
        }
        Cmd::Hunt { n, d, s, restarts } => {
            let budget = Budget::from_env()?;
            let r = search::hunt_counterexample(*n, *d, *s, *restarts, cli.seed, &budget)?;
            let text = match (&r.counterexample, r.exhaustive_max) {
                (Some(f), _) => format!("COUNTEREXAMPLE of size {} > {}\n{}", f.len(), r.bound, serialize_family(f)),
                (None, Some(m)) => format!("none: exact maximum {m} <= {}", r.bound),
                (None, None) => format!("none found (search incomplete, best random {})", r.best_random),
            };
            let found = r.counterexample.is_some();
            let mut rep = Report::ok(text, to_json(&r)).holds(!found);
            if !found && r.exhaustive_max.is_none() {
                rep.code = EXIT_BUDGET;
            }
            Ok(rep)
        }
    }
}

fn claims_text(claims: &Value, holds: bool) -> String {
    let mut lines = Vec::new();
    if let Some(map) = claims.as_object() {
        for (name, c) in map {
            let ok = c["holds"].as_bool().unwrap_or(false);
            lines.push(format!("{} {name}: {} vs {}", if ok { "ok  " } else { "FAIL" }, c["lhs"], c["rhs"]));
        }
    }
    lines.push(if holds { "all claims hold".into() } else { "VIOLATION".into() });
    lines.join("\n")
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::BoundViolated { .. }
        | Error::RankDeficient { .. }
        | Error::CertificateMismatch(_)
        | Error::ShatteredMember { .. }
        | Error::CoveringFails { .. }
        | Error::NotIntersecting { .. }
        | Error::Inconsistency(_) => EXIT_VIOLATION,
        _ => EXIT_USAGE,
    }
}

fn error_json(e: &Error) -> Value {
    let mut j = json!({ "error": e.to_string() });
    match e {
        Error::BudgetExceeded { best, nodes, best_family } => {
            j["incomplete"] = json!(true);
            j["lower_bound"] = json!(best);
            j["nodes"] = json!(nodes);
            j["best_family"] = json!(best_family);
        }
        Error::RankDeficient { rank, side, kernel } => {
            j["rank"] = json!(rank);
            j["side"] = json!(side);
            j["kernel"] = json!(kernel);
        }
        _ => {}
    }
    j
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(&cli) {
        Ok(r) => {
            let out = if cli.json { serde_json::to_string_pretty(&r.json).expect("json") } else { r.text };
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout(), "{out}");
            ExitCode::from(r.code)
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&error_json(&e)).expect("json"));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
