//! Implementation of the `sofic` command-line tool.
//!
//! Exit codes: 0 on success, 1 when a verification or search reports a
//! negative outcome, 2 on usage or input errors.  Report artifacts embed the
//! resolved configuration (and seed, where one is used), so re-running a
//! persisted configuration reproduces the artifact byte for byte on the
//! exact path.
//!
//! The only environment variable consulted is `SOFIC_CACHE_DIR`: when set,
//! `approx build` memoizes built graphs there keyed by their resolved
//! configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use sofic::amenact::{self, FiniteAction, FolnerOutcome, FolnerReport, ParadoxOutcome, ParadoxPiece};
use sofic::approx::{self, LabeledGraph};
use sofic::exactla::{charpoly, det_star, inertia, rank, SparseIntMatrix};
use sofic::groups::{gh_distance, Elem, Letter, MarkedGroup};
use sofic::io;
use sofic::l2::{self, GroupRingMatrix};
use sofic::permcalc::{self, Perm};
use sofic::witness::{self, SoficWitness};
use sofic::{Error, Rat, Result};

/// Runs the CLI on the given arguments (including the program name) and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 { 0 } else { 2 };
            let _ = e.print();
            return code;
        }
    };
    match exec(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[derive(Parser)]
#[command(
    name = "sofic",
    version,
    about = "Labeled-graph approximations, permutation witnesses, and exact spectral invariants"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build labeled graphs and measure how well they approximate a group
    #[command(subcommand)]
    Approx(ApproxCmd),
    /// Construct, amplify, and verify permutation witnesses
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Permutation statistics and conjugacy calculus
    #[command(subcommand)]
    Perm(PermCmd),
    /// Exact linear algebra over the integers
    #[command(subcommand)]
    La(LaCmd),
    /// Normalized spectral invariants of operators over groups
    #[command(subcommand)]
    L2(L2Cmd),
    /// Følner sets, paradoxical decompositions, and error propagation
    #[command(subcommand)]
    Act(ActCmd),
}

// ---------------------------------------------------------------------------
// approx

#[derive(Subcommand)]
enum ApproxCmd {
    /// Build a labeled graph and write it as JSON
    Build(BuildArgs),
    /// Compute the set of vertices whose r-balls match the group's
    Goodset(GoodsetArgs),
    /// Marking distance between two groups by relation enumeration
    Distance(DistanceArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// torus | torus1d | torus2d | random-free | ball | quotient
    #[arg(long)]
    kind: String,
    /// Torus dimension (for --kind torus)
    #[arg(long)]
    d: Option<usize>,
    /// Side length (torus) or vertex count (random-free)
    #[arg(long)]
    n: Option<usize>,
    /// Free rank (for --kind random-free)
    #[arg(long)]
    rank: Option<usize>,
    /// RNG seed (for --kind random-free)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ball radius (for --kind ball)
    #[arg(long)]
    radius: Option<usize>,
    /// Group JSON (for --kind ball | quotient)
    #[arg(long)]
    group: Option<PathBuf>,
    /// Permutation file, one per line (for --kind quotient)
    #[arg(long)]
    perms: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GoodsetArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    group: PathBuf,
    #[arg(long)]
    radius: usize,
    /// Where to write the annotated graph (defaults to --graph, in place)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Longest relation length to probe
    #[arg(long, default_value_t = 8)]
    rmax: usize,
}

// ---------------------------------------------------------------------------
// witness

#[derive(Subcommand)]
enum WitnessCmd {
    /// Check multiplicativity and freeness ratios; exit 1 on failure
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Raise a witness to its k-fold product power
    Amplify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build an exact witness from permutation images of the generators
    FromQuotient {
        #[arg(long)]
        group: PathBuf,
        /// Permutation file: image of each generator, one per line
        #[arg(long)]
        perms: PathBuf,
        /// Check-set words (repeatable); all generators when omitted
        #[arg(long = "f")]
        f_words: Vec<String>,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        out: PathBuf,
    },
}

// ---------------------------------------------------------------------------
// perm

#[derive(Subcommand)]
enum PermCmd {
    /// Cycle census of a permutation
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Build a permutation with a prescribed normalized cycle census
    Realize {
        #[arg(long)]
        n: usize,
        /// Census as t:freq pairs, e.g. "1:1/2,3:1/6"
        #[arg(long)]
        dist: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find c with c·a·c⁻¹ = b; exit 1 when the cycle types differ
    Conjugate {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Size of the set of products of at most k conjugates
    Cover {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        cap: Option<usize>,
    },
}

// ---------------------------------------------------------------------------
// la

#[derive(Subcommand)]
enum LaCmd {
    /// Exact rank of an integer matrix
    Rank {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Characteristic polynomial, ascending coefficients
    Charpoly {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// det*: the product of nonzero eigenvalues of a PSD integer matrix
    Detstar {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Counts of eigenvalues below, at, and above a rational shift
    Inertia {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "0")]
        shift: String,
    },
}

// ---------------------------------------------------------------------------
// l2

#[derive(Subcommand)]
enum L2Cmd {
    /// Exact normalized kernel dimension of the approximated operator
    Kernel {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Normalized ln det* of Δ_m (exact below --cap, floating above)
    Detstar {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Largest dimension handled exactly
        #[arg(long, default_value_t = l2::EXACT_DIM_CAP)]
        cap: usize,
    },
    /// Exact eigenvalue-counting function at given thresholds
    Density {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated rational thresholds, e.g. "0,1/2,4"
        #[arg(long)]
        lambdas: String,
    },
    /// Run the invariants over a graph family and write a CSV report
    Study {
        #[arg(long)]
        op: PathBuf,
        /// Family spec: torus1d:8,16,32 | torus2d:4,8 | ball:2,3,4
        #[arg(long)]
        graphs: String,
        #[arg(long)]
        lambdas: Option<String>,
        #[arg(long, default_value_t = l2::EXACT_DIM_CAP)]
        cap: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

// ---------------------------------------------------------------------------
// act

#[derive(Subcommand)]
enum ActCmd {
    /// Search for a set with small boundary, error, and fixed-point ratios
    Folner {
        #[arg(long)]
        action: PathBuf,
        /// Comma-separated test words; all generators when omitted
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        epsilon: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Write the search report as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find or re-verify a (2,1)-matching certificate on a base set
    Paradox {
        #[arg(long)]
        action: Option<PathBuf>,
        /// Graph JSON (alternative to --action, with --group)
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        group: Option<PathBuf>,
        /// Base set: "all" or comma-separated 1-based points
        #[arg(long, default_value = "all")]
        base: String,
        /// Comma-separated translation words; all generators when omitted
        #[arg(long)]
        k: Option<String>,
        /// Translations are products of at most p words from --k
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Write the certificate as JSON
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-verify this certificate instead of searching
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Check that errors and fixed points propagate as sets predict
    Propagate {
        #[arg(long)]
        action: PathBuf,
        /// Comma-separated symmetric word set; all generators when omitted
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        radius: usize,
    },
}

// ---------------------------------------------------------------------------
// shared plumbing

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn read_group(path: &Path) -> Result<MarkedGroup> {
    io::parse_group_json(&read_text(path)?)
}

fn read_graph(path: &Path) -> Result<LabeledGraph> {
    io::parse_graph_json(&read_text(path)?)
}

fn read_matrix(path: &Path) -> Result<SparseIntMatrix> {
    io::parse_matrix_triplet(&read_text(path)?)
}

fn read_grm(path: &Path) -> Result<GroupRingMatrix> {
    io::parse_grm_json(&read_text(path)?)
}

fn read_action(path: &Path) -> Result<FiniteAction> {
    io::parse_action_json(&read_text(path)?)
}

fn read_perm_file(path: &Path) -> Result<Vec<Perm>> {
    read_text(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(io::parse_perm_line)
        .collect()
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

fn parse_word_list(spec: &str, group: &MarkedGroup) -> Result<Vec<Elem>> {
    spec.split(',')
        .map(|piece| io::parse_elem(piece.trim(), group))
        .collect()
}

fn generator_elems(group: &MarkedGroup) -> Result<Vec<Elem>> {
    (0..group.generator_count())
        .map(|i| group.word_reduce(&[i as Letter]))
        .collect()
}

fn k_words(spec: &Option<String>, group: &MarkedGroup) -> Result<Vec<Elem>> {
    match spec {
        Some(s) => parse_word_list(s, group),
        None => generator_elems(group),
    }
}

fn word_strings(group: &MarkedGroup, elems: &[Elem]) -> Result<Vec<String>> {
    elems.iter().map(|e| io::elem_string(group, e)).collect()
}

fn parse_base(spec: &str, size: usize) -> Result<Vec<usize>> {
    if spec.trim() == "all" {
        return Ok((0..size).collect());
    }
    let mut out = Vec::new();
    for tok in spec.split(',') {
        let x: usize = tok
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("`{tok}` is not a point index")))?;
        if x == 0 || x > size {
            return Err(Error::Parse(format!(
                "point {x} out of range 1..={size}"
            )));
        }
        out.push(x - 1);
    }
    Ok(out)
}

fn parse_lambdas(spec: &str) -> Result<Vec<Rat>> {
    spec.split(',').map(|s| io::parse_rat(s.trim())).collect()
}

fn one_based(points: &[usize]) -> Vec<usize> {
    points.iter().map(|&x| x + 1).collect()
}

fn rat_pair(r: &Rat) -> Value {
    json!({
        "rational": io::rat_string(r),
        "float": r.to_f64().unwrap_or(f64::NAN),
    })
}

fn fnv64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

// ---------------------------------------------------------------------------
// dispatch

fn exec(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Approx(c) => run_approx(c),
        Cmd::Witness(c) => run_witness(c),
        Cmd::Perm(c) => run_perm(c),
        Cmd::La(c) => run_la(c),
        Cmd::L2(c) => run_l2(c),
        Cmd::Act(c) => run_act(c),
    }
}

fn run_approx(cmd: ApproxCmd) -> Result<i32> {
    match cmd {
        ApproxCmd::Build(args) => {
            let need = |opt: Option<usize>, flag: &str| -> Result<usize> {
                opt.ok_or_else(|| {
                    Error::BadArgument(format!("--kind {} requires --{flag}", args.kind))
                })
            };
            let need_path = |opt: &Option<PathBuf>, flag: &str| -> Result<PathBuf> {
                opt.clone().ok_or_else(|| {
                    Error::BadArgument(format!("--kind {} requires --{flag}", args.kind))
                })
            };
            // Graph construction is deterministic given this key, so a cache
            // directory (SOFIC_CACHE_DIR) can memoize the artifact verbatim.
            let (key, text) = match args.kind.as_str() {
                "torus" | "torus1d" | "torus2d" => {
                    let d = match args.kind.as_str() {
                        "torus1d" => 1,
                        "torus2d" => 2,
                        _ => need(args.d, "d")?,
                    };
                    let n = need(args.n, "n")?;
                    let key = format!("torus d={d} n={n}");
                    (key.clone(), cached_graph(&key, || approx::torus_graph(d, n))?)
                }
                "random-free" => {
                    let rank = need(args.rank, "rank")?;
                    let n = need(args.n, "n")?;
                    let key = format!("random-free rank={rank} n={n} seed={}", args.seed);
                    (
                        key.clone(),
                        cached_graph(&key, || approx::random_free_graph(rank, n, args.seed))?,
                    )
                }
                "ball" => {
                    let r = need(args.radius, "radius")?;
                    let group = read_group(&need_path(&args.group, "group")?)?;
                    let key = format!(
                        "ball r={r} group={}",
                        io::group_json(&group)
                    );
                    (key.clone(), cached_graph(&key, || approx::ball_graph(&group, r))?)
                }
                "quotient" => {
                    let group = read_group(&need_path(&args.group, "group")?)?;
                    let perms = read_perm_file(&need_path(&args.perms, "perms")?)?;
                    let g = approx::quotient_graph(&group, &perms)?;
                    let text = graph_text(&g)?;
                    (String::new(), text)
                }
                other => {
                    return Err(Error::BadArgument(format!("unknown graph kind `{other}`")));
                }
            };
            let _ = key;
            write_text(&args.out, &text)?;
            let g = io::parse_graph_json(&text)?;
            println!(
                "graph {} vertices {} labels -> {}",
                g.vertex_count(),
                g.labels(),
                args.out.display()
            );
            Ok(0)
        }
        ApproxCmd::Goodset(args) => {
            let group = read_group(&args.group)?;
            let mut graph = read_graph(&args.graph)?;
            let good = approx::good_set(&mut graph, &group, args.radius);
            let out = args.out.as_ref().unwrap_or(&args.graph);
            write_text(out, &graph_text(&graph)?)?;
            println!(
                "good {}/{} radius {} -> {}",
                good.len(),
                graph.vertex_count(),
                args.radius,
                out.display()
            );
            Ok(0)
        }
        ApproxCmd::Distance(args) => {
            let a = read_group(&args.a)?;
            let b = read_group(&args.b)?;
            let d = gh_distance(&a, &b, args.rmax)?;
            println!("distance {d}");
            Ok(0)
        }
    }
}

fn graph_text(g: &LabeledGraph) -> Result<String> {
    let mut text =
        serde_json::to_string_pretty(&io::graph_json(g)).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn cached_graph<F>(key: &str, build: F) -> Result<String>
where
    F: FnOnce() -> Result<LabeledGraph>,
{
    let cache_file = std::env::var_os("SOFIC_CACHE_DIR").map(|dir| {
        let mut p = PathBuf::from(dir);
        p.push(format!("graph-{:016x}.json", fnv64(key)));
        p
    });
    if let Some(path) = &cache_file {
        if let Ok(text) = fs::read_to_string(path) {
            return Ok(text);
        }
    }
    let text = graph_text(&build()?)?;
    if let Some(path) = &cache_file {
        if let Some(dir) = path.parent() {
            let _ = fs::create_dir_all(dir);
        }
        let _ = fs::write(path, &text);
    }
    Ok(text)
}

fn run_witness(cmd: WitnessCmd) -> Result<i32> {
    match cmd {
        WitnessCmd::Verify { input } => {
            let w = io::parse_witness_json(&read_text(&input)?)?;
            let report = witness::verify_witness(&w)?;
            println!(
                "ratios ({}, {})",
                io::rat_string(&report.multiplicativity),
                io::rat_string(&report.freeness)
            );
            if report.pass {
                println!("pass");
                Ok(0)
            } else {
                println!("fail");
                Ok(1)
            }
        }
        WitnessCmd::Amplify { input, k, out } => {
            let w = io::parse_witness_json(&read_text(&input)?)?;
            let amplified = witness::amplify(&w, k)?;
            let text = witness_text(&amplified)?;
            write_text(&out, &text)?;
            println!(
                "amplified n {} -> {} epsilon {} -> {}",
                w.n,
                amplified.n,
                io::rat_string(&amplified.epsilon),
                out.display()
            );
            Ok(0)
        }
        WitnessCmd::FromQuotient { group, perms, f_words, epsilon, out } => {
            let group = read_group(&group)?;
            let perms = read_perm_file(&perms)?;
            let f_list = if f_words.is_empty() {
                generator_elems(&group)?
            } else {
                f_words
                    .iter()
                    .map(|w| io::parse_elem(w, &group))
                    .collect::<Result<Vec<Elem>>>()?
            };
            let eps = io::parse_rat(&epsilon)?;
            let w = witness::witness_from_quotient(&group, &perms, &f_list, eps)?;
            let entries = w.entries().count();
            write_text(&out, &witness_text(&w)?)?;
            println!("witness n {} entries {} -> {}", w.n, entries, out.display());
            Ok(0)
        }
    }
}

fn witness_text(w: &SoficWitness) -> Result<String> {
    let mut text =
        serde_json::to_string_pretty(&io::witness_json(w)?).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn run_perm(cmd: PermCmd) -> Result<i32> {
    match cmd {
        PermCmd::Stats { input } => {
            let p = io::parse_perm_line(&read_text(&input)?)?;
            let stats = permcalc::cycle_stats(&p);
            println!("degree {}", stats.degree);
            println!("fixed {}", stats.fix_count());
            let type_str = stats
                .cycle_type()
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            println!("type {type_str}");
            Ok(0)
        }
        PermCmd::Realize { n, dist, out } => {
            let mut census: BTreeMap<usize, Rat> = BTreeMap::new();
            for piece in dist.split(',') {
                let (t, freq) = piece
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("`{piece}` is not t:freq")))?;
                let t: usize = t
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("`{t}` is not a cycle length")))?;
                census.insert(t, io::parse_rat(freq)?);
            }
            let p = permcalc::realize_stats(&census, n)?;
            emit_perm(&p, &out)?;
            Ok(0)
        }
        PermCmd::Conjugate { a, b, out } => {
            let sigma = io::parse_perm_line(&read_text(&a)?)?;
            let rho = io::parse_perm_line(&read_text(&b)?)?;
            match permcalc::conjugator(&sigma, &rho) {
                Ok(c) => {
                    emit_perm(&c, &out)?;
                    Ok(0)
                }
                Err(Error::CycleTypeMismatch(_)) => {
                    eprintln!("no conjugator: cycle types differ");
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }
        PermCmd::Cover { input, k, cap } => {
            let p = io::parse_perm_line(&read_text(&input)?)?;
            let closure = match cap {
                Some(cap) => permcalc::covering_closure_with_cap(&p, k, cap)?,
                None => permcalc::covering_closure(&p, k)?,
            };
            println!("closure {}", closure.len());
            Ok(0)
        }
    }
}

fn emit_perm(p: &Perm, out: &Option<PathBuf>) -> Result<()> {
    let line = io::perm_line(p);
    match out {
        Some(path) => {
            write_text(path, &format!("{line}\n"))?;
            println!("perm degree {} -> {}", p.degree(), path.display());
        }
        None => println!("{line}"),
    }
    Ok(())
}

fn run_la(cmd: LaCmd) -> Result<i32> {
    match cmd {
        LaCmd::Rank { input } => {
            let m = read_matrix(&input)?;
            println!("{}", rank(&m));
            Ok(0)
        }
        LaCmd::Charpoly { input } => {
            let m = read_matrix(&input)?;
            let coeffs = charpoly(&m)?;
            let line = coeffs
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            println!("{line}");
            Ok(0)
        }
        LaCmd::Detstar { input } => {
            let m = read_matrix(&input)?;
            match det_star(&m) {
                Ok(d) => {
                    println!("{d}");
                    Ok(0)
                }
                Err(Error::NotPsd) => {
                    eprintln!("not positive semidefinite");
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }
        LaCmd::Inertia { input, shift } => {
            let m = read_matrix(&input)?;
            let lambda = io::parse_rat(&shift)?;
            let (below, at, above) = inertia(&m, &lambda)?;
            println!("{below} {at} {above}");
            Ok(0)
        }
    }
}

fn run_l2(cmd: L2Cmd) -> Result<i32> {
    match cmd {
        L2Cmd::Kernel { op, graph } => {
            let a = read_grm(&op)?;
            let g = read_graph(&graph)?;
            let k = l2::normalized_kernel_dim(&a, &g)?;
            println!("{}", io::rat_string(&k));
            Ok(0)
        }
        L2Cmd::Detstar { op, graph, cap } => {
            let a = read_grm(&op)?;
            let g = read_graph(&graph)?;
            let ld = l2::log_det_star_normalized_with_cap(&a, &g, cap)?;
            println!("lndet {}", ld.value);
            if let Some(ds) = &ld.det_star {
                println!("detstar {ds}");
            }
            Ok(0)
        }
        L2Cmd::Density { op, graph, lambdas } => {
            let a = read_grm(&op)?;
            let g = read_graph(&graph)?;
            let ls = parse_lambdas(&lambdas)?;
            let ds = l2::spectral_density(&a, &g, &ls)?;
            for (l, d) in ls.iter().zip(&ds) {
                println!("{} {}", io::rat_string(l), io::rat_string(d));
            }
            Ok(0)
        }
        L2Cmd::Study { op, graphs, lambdas, cap, out } => {
            let a = read_grm(&op)?;
            let ls = match &lambdas {
                Some(s) => parse_lambdas(s)?,
                None => Vec::new(),
            };
            let mut family = build_family(&graphs, a.group())?;
            let table = l2::convergence_study(&a, &mut family, &ls, cap);
            let config = json!({
                "graphs": graphs,
                "lambdas": ls.iter().map(io::rat_string).collect::<Vec<_>>(),
                "cap": cap,
            });
            let mut text = format!("# config {config}\n");
            text.push_str(&io::study_csv(&table));
            write_text(&out, &text)?;
            println!("study {} rows -> {}", table.rows.len(), out.display());
            Ok(0)
        }
    }
}

fn build_family(spec: &str, group: &MarkedGroup) -> Result<Vec<LabeledGraph>> {
    let (family, sizes) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("`{spec}` is not family:size,size,...")))?;
    let sizes: Vec<usize> = sizes
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("`{s}` is not a size")))
        })
        .collect::<Result<_>>()?;
    if sizes.is_empty() {
        return Err(Error::Parse("empty size list".into()));
    }
    sizes
        .iter()
        .map(|&n| match family {
            "torus1d" => approx::torus_graph(1, n),
            "torus2d" => approx::torus_graph(2, n),
            "ball" => approx::ball_graph(group, n),
            other => Err(Error::Parse(format!("unknown graph family `{other}`"))),
        })
        .collect()
}

fn run_act(cmd: ActCmd) -> Result<i32> {
    match cmd {
        ActCmd::Folner { action, k, epsilon, seed, budget, out } => {
            let a = read_action(&action)?;
            let kset = k_words(&k, a.group())?;
            let eps = io::parse_rat(&epsilon)?;
            let outcome = amenact::folner_search(&a, &kset, &eps, seed, budget)?;
            let (found, report) = match &outcome {
                FolnerOutcome::Found(r) => (true, r),
                FolnerOutcome::Exhausted(r) => (false, r),
            };
            if let Some(path) = &out {
                let artifact = json!({
                    "config": {
                        "action": action.display().to_string(),
                        "k": word_strings(a.group(), &kset)?,
                        "epsilon": io::rat_string(&eps),
                        "seed": seed,
                        "budget": budget,
                    },
                    "found": found,
                    "set": one_based(&report.set),
                    "boundary_ratio": rat_pair(&report.boundary_ratio),
                    "error_ratio": rat_pair(&report.error_ratio),
                    "fix_ratio": rat_pair(&report.fix_ratio),
                });
                write_json(path, &artifact)?;
            }
            let line = |r: &FolnerReport| {
                format!(
                    "|F| {} boundary {} error {} fix {}",
                    r.set.len(),
                    io::rat_string(&r.boundary_ratio),
                    io::rat_string(&r.error_ratio),
                    io::rat_string(&r.fix_ratio)
                )
            };
            if found {
                println!("found {}", line(report));
                Ok(0)
            } else {
                println!("exhausted {}", line(report));
                Ok(1)
            }
        }
        ActCmd::Paradox { action, graph, group, base, k, p, out, verify } => {
            enum Host {
                Action(FiniteAction),
                Graph(LabeledGraph, MarkedGroup),
            }
            let host = match (&action, &graph, &group) {
                (Some(a), None, None) => Host::Action(read_action(a)?),
                (None, Some(g), Some(gr)) => Host::Graph(read_graph(g)?, read_group(gr)?),
                _ => {
                    return Err(Error::BadArgument(
                        "give either --action or both --graph and --group".into(),
                    ));
                }
            };
            let (size, grp) = match &host {
                Host::Action(a) => (a.size(), a.group().clone()),
                Host::Graph(g, gr) => (g.vertex_count(), gr.clone()),
            };
            let a_set = parse_base(&base, size)?;

            if let Some(cert_path) = &verify {
                let (base_pts, pieces) = parse_paradox_cert(&read_text(cert_path)?, &grp)?;
                let result = match &host {
                    Host::Action(a) => amenact::verify_paradox(a, &base_pts, &pieces),
                    Host::Graph(g, gr) => {
                        amenact::verify_paradox_graph(g, gr, &base_pts, &pieces)
                    }
                };
                return match result {
                    Ok(()) => {
                        println!("certificate valid");
                        Ok(0)
                    }
                    Err(Error::Verification(msg)) => {
                        println!("certificate invalid: {msg}");
                        Ok(1)
                    }
                    Err(e) => Err(e),
                };
            }

            let kset = k_words(&k, &grp)?;
            let outcome = match &host {
                Host::Action(a) => amenact::paradox_certificate(a, &a_set, &kset, p)?,
                Host::Graph(g, gr) => {
                    amenact::paradox_certificate_graph(g, gr, &a_set, &kset, p)?
                }
            };
            match outcome {
                ParadoxOutcome::Certificate(pieces) => {
                    let covered: usize = pieces.iter().map(|q| q.points.len()).sum();
                    if let Some(path) = &out {
                        let artifact = paradox_cert_json(&grp, &a_set, &kset, p, &pieces)?;
                        write_json(path, &artifact)?;
                    }
                    println!(
                        "certificate {} pieces covering {} points",
                        pieces.len(),
                        covered
                    );
                    Ok(0)
                }
                ParadoxOutcome::Failure { violator, neighbor_count } => {
                    println!(
                        "no certificate: violator {} neighbors {}",
                        violator.len(),
                        neighbor_count
                    );
                    Ok(1)
                }
            }
        }
        ActCmd::Propagate { action, k, radius } => {
            let a = read_action(&action)?;
            let kset = k_words(&k, a.group())?;
            match amenact::propagation_check(&a, &kset, radius)? {
                None => {
                    println!("propagation holds radius {radius}");
                    Ok(0)
                }
                Some(x) => {
                    println!("propagation fails at point {}", x + 1);
                    Ok(1)
                }
            }
        }
    }
}

fn paradox_cert_json(
    group: &MarkedGroup,
    a_set: &[usize],
    k: &[Elem],
    p: usize,
    pieces: &[ParadoxPiece],
) -> Result<Value> {
    let mut out = Vec::with_capacity(pieces.len());
    for piece in pieces {
        out.push(json!({
            "s": io::elem_string(group, &piece.s)?,
            "t": io::elem_string(group, &piece.t)?,
            "points": one_based(&piece.points),
        }));
    }
    Ok(json!({
        "config": {"k": word_strings(group, k)?, "p": p},
        "base": one_based(a_set),
        "pieces": out,
    }))
}

fn parse_paradox_cert(text: &str, group: &MarkedGroup) -> Result<(Vec<usize>, Vec<ParadoxPiece>)> {
    let v: Value = serde_json::from_str(text)?;
    let o = v
        .as_object()
        .ok_or_else(|| Error::Parse("certificate: expected an object".into()))?;
    let base_raw = o
        .get("base")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("certificate: missing `base` array".into()))?;
    let mut base = Vec::with_capacity(base_raw.len());
    for x in base_raw {
        let v = x
            .as_u64()
            .ok_or_else(|| Error::Parse("certificate.base: expected integers".into()))?;
        if v == 0 {
            return Err(Error::Parse("certificate.base: points are 1-based".into()));
        }
        base.push((v - 1) as usize);
    }
    let raw_pieces = o
        .get("pieces")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("certificate: missing `pieces` array".into()))?;
    let mut pieces = Vec::with_capacity(raw_pieces.len());
    for rp in raw_pieces {
        let po = rp
            .as_object()
            .ok_or_else(|| Error::Parse("certificate.pieces: expected objects".into()))?;
        let word = |key: &str| -> Result<Elem> {
            let s = po
                .get(key)
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse(format!("certificate.pieces: missing `{key}`")))?;
            io::parse_elem(s, group)
        };
        let pts_raw = po
            .get("points")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("certificate.pieces: missing `points`".into()))?;
        let mut points = Vec::with_capacity(pts_raw.len());
        for x in pts_raw {
            let v = x
                .as_u64()
                .ok_or_else(|| Error::Parse("certificate.points: expected integers".into()))?;
            if v == 0 {
                return Err(Error::Parse("certificate.points: points are 1-based".into()));
            }
            points.push((v - 1) as usize);
        }
        pieces.push(ParadoxPiece { s: word("s")?, t: word("t")?, points });
    }
    Ok((base, pieces))
}
