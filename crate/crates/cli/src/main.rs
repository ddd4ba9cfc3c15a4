//! `l2switch`: batch front end for level-2 switching.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use level2::admissible::{
    block_complement, block_transpose, enumerate_b_bruteforce, enumerate_b_normalized, enumerate_v, read_b_file,
    write_b_file, AdmissibleCatalog, BlockGrid, Method, FORMAT_VERSION,
};
use level2::catalog::build;
use level2::engine::{
    apply, find_kneser_fano_instance, find_switching_sets, gen_kneser2, gen_planted, random_profile,
    verify_r_cospectral, SearchLimits, SwitchingInstance,
};
use level2::equivalence::{class_table, classes_weighted, read_class_table, GroupChoice, SymmetryGroup};
use level2::iso::{is_isomorphic, MAX_ORDER};
use level2::reducibility::{verify_certificate, FactorizationCertificate, Reducer, DEFAULT_DEPTH, MAX_DEPTH};
use level2::{Error, Family, Graph};

const EXIT_USAGE: u8 = 2;
const EXIT_CAPACITY: u8 = 3;
const EXIT_CONDITION: u8 = 4;
const EXIT_PAPER: u8 = 5;

#[derive(Parser)]
#[command(name = "l2switch", version, about = "Level-2 switching methods for R-cospectral graphs")]
struct Cli {
    /// Worker threads; output bytes do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Compare counts against the published values and exit 5 on mismatch.
    #[arg(long, global = true)]
    check_paper: bool,
    /// Output file (or directory where noted); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Patched,
    Normalized,
}

#[derive(Subcommand)]
enum Command {
    /// Print 2R for a family.
    Catalog {
        #[arg(long)]
        family: Family,
    },
    /// Write the admissible switching-set matrices (and, with --out DIR, the
    /// admissible outside columns).
    Enumerate {
        #[arg(long)]
        family: Family,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Largest raw listing to materialise.
        #[arg(long, default_value_t = 5_000_000)]
        limit: usize,
    },
    /// Partition a matrix file into equivalence classes.
    Classify {
        input: PathBuf,
        /// Use only the listed generators instead of every symmetry.
        #[arg(long)]
        generators: bool,
    },
    /// Decide reducibility for every class; with --out DIR also write the
    /// certificates.
    Reduce {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Re-check every certificate in a file.
    VerifyCertificate { input: PathBuf },
    /// List switching sets in a host graph.
    Find {
        input: PathBuf,
        #[arg(long)]
        family: Family,
        #[arg(long)]
        limit: Option<usize>,
        /// Seconds.
        #[arg(long)]
        time_budget: Option<f64>,
    },
    /// Switch a host graph on an ordered switching set.
    Switch {
        input: PathBuf,
        #[arg(long)]
        family: Family,
        /// Comma-separated ordered vertices; defaults to the `set:` line of
        /// the input.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<usize>>,
    },
    /// Compare two graphs for R-cospectrality and isomorphism.
    Verify { first: PathBuf, second: PathBuf },
    /// The 2-Kneser graph, optionally with its Fano-switched mate.
    Kneser {
        n: usize,
        k: usize,
        #[arg(long)]
        switch: bool,
    },
    /// A random host with a planted switching set.
    Plant {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 8)]
        outside: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Lib(Error),
    Usage(String),
    Paper(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers == 0 {
        eprintln!("error: --workers must be at least 1");
        return ExitCode::from(EXIT_USAGE);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build_global()
        .expect("thread pool is built once");
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = match &f {
                Failure::Usage(m) => {
                    eprintln!("error: {m}");
                    EXIT_USAGE
                }
                Failure::Paper(m) => {
                    eprintln!("expected-value check failed: {m}");
                    EXIT_PAPER
                }
                Failure::Lib(e) => {
                    eprintln!("error: {e}");
                    match e {
                        Error::Capacity { .. } => EXIT_CAPACITY,
                        Error::Admissibility(_) | Error::Condition(_) | Error::Placement(_) | Error::Inexact(_) => {
                            EXIT_CONDITION
                        }
                        _ => EXIT_USAGE,
                    }
                }
            };
            ExitCode::from(code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn out_dir(out: &Path) -> Outcome {
    fs::create_dir_all(out).map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))
}

fn file_stem(family: Family) -> String {
    family.to_string().replace(':', "-")
}

fn check(enabled: bool, what: &str, family: Family, got: usize, want: Option<usize>) -> Outcome {
    match want {
        Some(w) if enabled && got != w => Err(Failure::Paper(format!("{what} for {family}: got {got}, expected {w}"))),
        _ => Ok(()),
    }
}

fn expected_b_count(f: Family) -> Option<usize> {
    match f {
        Family::Circulant(4) => Some(3584),
        Family::Cube => Some(1504),
        _ => None,
    }
}

fn expected_class_count(f: Family) -> Option<usize> {
    match f {
        Family::Fano => Some(12),
        Family::Cube => Some(40),
        _ => None,
    }
}

fn expected_irreducible_count(f: Family) -> Option<usize> {
    match f {
        Family::Circulant(3) | Family::Circulant(4) => Some(if f == Family::Circulant(3) { 1 } else { 0 }),
        Family::Circulant(5) => Some(3),
        Family::Circulant(6) => Some(18),
        Family::Fano => Some(2),
        Family::Cube => Some(0),
        _ => None,
    }
}

/// Matrices one normalized circulant grid stands for.
fn normalized_weight(m: usize) -> u64 {
    1 << (m * (m - 1) / 2 + 1)
}

/// A graph file: graph6 or edge list, with an optional `set:` line naming
/// an ordered switching set.
fn read_graph(path: &Path) -> Result<(Graph, Option<Vec<usize>>), Failure> {
    let text = read(path)?;
    let mut set = None;
    let mut body = String::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.trim().strip_prefix("set:") {
            let v = rest
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| Error::Parse { line: i + 1, msg: format!("bad vertex {x:?}") }))
                .collect::<Result<Vec<usize>, Error>>()?;
            set = Some(v);
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    Ok((Graph::parse_any(&body)?, set))
}

fn run(cli: &Cli) -> Outcome {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Catalog { family } => {
            let r = build(*family)?;
            let n = r.size();
            let mut s = String::new();
            writeln!(s, "# {FORMAT_VERSION}").unwrap();
            writeln!(s, "family: {family}").unwrap();
            writeln!(s, "kind: 2R").unwrap();
            writeln!(s, "order: {n}").unwrap();
            for i in 0..n {
                let row: Vec<String> = (0..n).map(|j| r.at(i, j).to_string()).collect();
                writeln!(s, "{}", row.join(" ")).unwrap();
            }
            emit(out, &s)
        }
        Command::Enumerate { family, method, limit } => {
            let (b_text, raw, v_text) = match (method, family) {
                (Some(MethodArg::Normalized), Family::Circulant(m)) | (None, Family::Circulant(m)) if *m >= 5 => {
                    let grids = enumerate_b_normalized(*m)?;
                    let gs: Vec<Graph> = grids.iter().map(BlockGrid::to_graph).collect();
                    let raw = gs.len() as u64 * normalized_weight(*m);
                    let v = AdmissibleCatalog {
                        family: *family,
                        method: Method::Patched,
                        v_set: enumerate_v(&build(*family)?)?,
                        b_set: Vec::new(),
                    }
                    .v_file();
                    (write_b_file(*family, "normalized", &gs), raw, v)
                }
                (Some(MethodArg::Normalized), f) => {
                    return Err(Failure::Usage(format!("normalized listings exist for circulant families, not {f}")))
                }
                _ => {
                    let m = method.map(|m| match m {
                        MethodArg::Brute => Method::Brute,
                        _ => Method::Patched,
                    });
                    let cat = AdmissibleCatalog::compute(*family, m, *limit)?;
                    (cat.b_file(), cat.b_set.len() as u64, cat.v_file())
                }
            };
            eprintln!("{family}: {raw} admissible matrices");
            check(cli.check_paper, "|B_R|", *family, raw as usize, expected_b_count(*family))?;
            match out {
                Some(dir) => {
                    out_dir(dir)?;
                    let stem = file_stem(*family);
                    emit(Some(&dir.join(format!("{stem}.b.txt"))), &b_text)?;
                    emit(Some(&dir.join(format!("{stem}.v.txt"))), &v_text)
                }
                None => emit(None, &b_text),
            }
        }
        Command::Classify { input, generators } => {
            let file = read_b_file(&read(input)?)?;
            let choice = if *generators { GroupChoice::Generators } else { GroupChoice::Maximal };
            let group = SymmetryGroup::new(file.family, choice)?;
            let weight = match (file.method.as_str(), file.family) {
                ("normalized", Family::Circulant(m)) => normalized_weight(m),
                _ => 1,
            };
            let cs = classes_weighted(&file.b_set, &group, weight);
            eprintln!("{}: {} classes", file.family, cs.len());
            check(cli.check_paper, "class count", file.family, cs.len(), expected_class_count(file.family))?;
            emit(out, &class_table(file.family, choice, &cs))
        }
        Command::Reduce { input, depth } => {
            if *depth == 0 || *depth > MAX_DEPTH {
                return Err(Failure::Usage(format!("--depth must lie in 1..={MAX_DEPTH}")));
            }
            let text = read(input)?;
            let (family, mut cs) = read_class_table(&text)?;
            let choice = if text.lines().any(|l| l.trim() == "group: generators") {
                GroupChoice::Generators
            } else {
                GroupChoice::Maximal
            };
            let reducer = Reducer::new(family)?;
            let results: Vec<_> = cs
                .par_iter()
                .map(|c| reducer.search(&c.canonical, *depth))
                .collect::<Result<_, _>>()?;
            let mut certs = String::new();
            for (c, r) in cs.iter_mut().zip(&results) {
                c.irreducible = Some(r.is_none());
                if let Some(cert) = r {
                    certs.push_str(&cert.to_text());
                }
            }
            let irreducible = results.iter().filter(|r| r.is_none()).count();
            eprintln!("{family}: {irreducible} of {} classes irreducible at depth {depth}", cs.len());
            check(cli.check_paper, "irreducible classes", family, irreducible, expected_irreducible_count(family))?;
            let table = class_table(family, choice, &cs);
            match out {
                Some(dir) => {
                    out_dir(dir)?;
                    let stem = file_stem(family);
                    emit(Some(&dir.join(format!("{stem}.reduced.txt"))), &table)?;
                    emit(Some(&dir.join(format!("{stem}.certificates.txt"))), &certs)
                }
                None => emit(None, &table),
            }
        }
        Command::VerifyCertificate { input } => {
            let certs = FactorizationCertificate::parse_all(&read(input)?)?;
            for (i, c) in certs.iter().enumerate() {
                verify_certificate(c).map_err(|e| match e {
                    Error::Condition(m) => Error::Condition(format!("certificate {}: {m}", i + 1)),
                    e => e,
                })?;
            }
            emit(out, &format!("verified {} certificates\n", certs.len()))
        }
        Command::Find { input, family, limit, time_budget } => {
            let (g, _) = read_graph(input)?;
            let limits = SearchLimits {
                max_instances: *limit,
                time_budget: time_budget.map(Duration::from_secs_f64),
            };
            let found = find_switching_sets(&g, *family, &limits)?;
            let mut s = String::new();
            for inst in &found {
                let v: Vec<String> = inst.vertices().iter().map(usize::to_string).collect();
                writeln!(s, "set: {}", v.join(" ")).unwrap();
            }
            eprintln!("{} switching sets", found.len());
            emit(out, &s)
        }
        Command::Switch { input, family, set } => {
            let (g, file_set) = read_graph(input)?;
            let set = set
                .clone()
                .or(file_set)
                .ok_or_else(|| Failure::Usage("no switching set: pass --set or add a `set:` line".into()))?;
            let inst = SwitchingInstance::new(g, *family, &set)?;
            let h = apply(&inst)?;
            if !verify_r_cospectral(&inst.host, &h)? {
                return Err(Error::Condition("switched graph is not R-cospectral".into()).into());
            }
            emit(out, &format!("{}\n", h.to_graph6()))
        }
        Command::Verify { first, second } => {
            let (g, _) = read_graph(first)?;
            let (h, _) = read_graph(second)?;
            emit(out, &verify_report(&g, &h)?)
        }
        Command::Kneser { n, k, switch } => {
            let g = gen_kneser2(*n, *k)?;
            let mut s = format!("{}\n", g.to_graph6());
            if *switch {
                let inst = find_kneser_fano_instance(*n, *k)?;
                let h = apply(&inst)?;
                s.push_str(&format!("{}\n", h.to_graph6()));
                s.push_str(&verify_report(&g, &h)?);
            }
            emit(out, &s)
        }
        Command::Plant { family, outside, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let b = random_member(*family, &mut rng)?;
            let profile = random_profile(*family, *outside, &mut rng)?;
            let (g, inst) = gen_planted(*family, &b, &profile, rng.gen())?;
            let v: Vec<String> = inst.vertices().iter().map(usize::to_string).collect();
            emit(out, &format!("{}\nset: {}\n", g.to_graph6(), v.join(" ")))
        }
    }
}

fn verify_report(g: &Graph, h: &Graph) -> Result<String, Failure> {
    let cospectral = verify_r_cospectral(g, h)?;
    let mut s = String::new();
    writeln!(s, "char_poly(A): {}", g.char_poly()).unwrap();
    writeln!(s, "char_poly(A'): {}", h.char_poly()).unwrap();
    writeln!(s, "cospectral: {}", if cospectral { "yes" } else { "no" }).unwrap();
    if g.order() <= MAX_ORDER {
        let iso = is_isomorphic(g, h)?;
        writeln!(s, "isomorphic: {}", if iso { "yes" } else { "no" }).unwrap();
    } else {
        writeln!(s, "isomorphic: unknown (order above {MAX_ORDER})").unwrap();
    }
    Ok(s)
}

/// A uniformly chosen normalized member with random block complements for
/// large circulant families; a uniform member of the brute-force listing
/// otherwise.
fn random_member(family: Family, rng: &mut ChaCha8Rng) -> Result<Graph, Failure> {
    match family {
        Family::Circulant(m) if m >= 5 => {
            let grids = enumerate_b_normalized(m)?;
            let grid = &grids[rng.gen_range(0..grids.len())];
            let mut blocks: Vec<u8> = (0..m * m).map(|k| grid.block(k / m, k % m)).collect();
            for i in 0..m {
                for j in i + 1..m {
                    if rng.gen_bool(0.5) {
                        blocks[i * m + j] = block_complement(blocks[i * m + j]);
                        blocks[j * m + i] = block_transpose(blocks[i * m + j]);
                    }
                }
            }
            Ok(BlockGrid::new(m, blocks)?.to_graph())
        }
        f => {
            let all = enumerate_b_bruteforce(&build(f)?)?;
            Ok(all[rng.gen_range(0..all.len())].clone())
        }
    }
}
