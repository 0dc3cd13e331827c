use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use steiner_forest::generators::*;
use steiner_forest::local_search::local_search;
use steiner_forest::rational::{fmt_q, fmt_q_frac, parse_q, to_decimal};
use steiner_forest::solvers::exact::binary_tree_opt;
use steiner_forest::solvers::*;
use steiner_forest::verify::*;
use steiner_forest::{
    check_feasible, parse_instance, run_legacy, serialize_instance, steiner_tree_embed, Error, Forest, Instance,
    Vertex, Q,
};

#[derive(Parser)]
#[command(name = "sforest", version, about = "Steiner Forest by boosted moat growing")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Wheel,
    Grid,
    Binary,
    Horseshoe,
    Gluttonous,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Legacy,
    Ls,
    Main,
    St,
    Gluttonous,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TraceAlgo {
    Legacy,
    Ls,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// rows, horseshoe height, gluttonous copies or random vertex count
    #[arg(long)]
    n: Option<usize>,
    /// grid columns
    #[arg(long)]
    m: Option<usize>,
    /// binary tree height
    #[arg(long)]
    h: Option<usize>,
    /// gluttonous spine length
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 3)]
    petals: usize,
    #[arg(long)]
    xi: Option<String>,
    #[arg(long, default_value = "1/3")]
    density: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated instance
    Gen(GenArgs),
    /// Solve an instance file
    Solve {
        #[arg(long, value_enum, default_value = "main")]
        algo: Algo,
        #[arg(long = "in")]
        input: PathBuf,
        /// `table2` or a parameter file
        #[arg(long, default_value = "table2")]
        params: String,
        /// local search beta for `ls` and `st`
        #[arg(long)]
        beta: Option<String>,
        /// comma-separated terminals for `st`; defaults to all paired vertices
        #[arg(long, value_delimiter = ',')]
        terminals: Option<Vec<Vertex>>,
        #[arg(long)]
        json: bool,
    },
    /// Emit the trace document of a run
    Trace {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "legacy")]
        algo: TraceAlgo,
        #[arg(long, default_value = "1/10")]
        beta: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run property checkers
    Verify {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        claw: bool,
        #[arg(long)]
        assignments: bool,
        #[arg(long)]
        refinement: bool,
        /// `table2` or a parameter file
        #[arg(long)]
        params_table: Option<String>,
        #[arg(long, default_value = "1/10")]
        beta: String,
        /// claw samples; by default every case is enumerated up to 10 vertices
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Benchmark generated families against oracles
    Bench {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "wheel,grid,binary,horseshoe,gluttonous,random")]
        families: Vec<Family>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// print 0 instead of wall-clock times
        #[arg(long)]
        no_timing: bool,
    },
}

fn rational(s: &str, name: &str) -> Result<Q> {
    parse_q(s).ok_or_else(|| anyhow!(Error::Range { name: "argument", value: format!("{name}={s}") }))
}

fn need(v: Option<usize>, name: &str) -> Result<usize> {
    v.ok_or_else(|| anyhow!(Error::Precondition(format!("--{name} is required for this family"))))
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_instance(&text)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_table(spec: &str) -> Result<CertificateTable> {
    if spec == "table2" {
        return Ok(CertificateTable::table2());
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
    Ok(CertificateTable::parse(&text)?)
}

fn generate(a: &GenArgs) -> Result<String> {
    let xi_default = if a.family == Family::Gluttonous { "1/1000" } else { "1/100" };
    let xi = rational(a.xi.as_deref().unwrap_or(xi_default), "xi")?;
    let inst = match a.family {
        Family::Wheel => gen_wheel(&xi)?,
        Family::Grid => gen_grid(need(a.n, "n")?, need(a.m, "m")?, &xi)?,
        Family::Binary => {
            let b = gen_binary(need(a.h, "h")?, &xi)?;
            let root = b.terminals[0];
            let emb = steiner_tree_embed(&b.graph, &b.terminals, root)?;
            let mut text = format!(
                "# binary tree of height {}; Steiner tree over the leaves, rooted at {root}\n",
                b.h
            );
            text.push_str(&serialize_instance(&emb.instance));
            return Ok(text);
        }
        Family::Horseshoe => gen_horseshoe(need(a.n, "n")?, a.petals, &xi)?.instance,
        Family::Gluttonous => gen_gluttonous(need(a.n, "n")?, need(a.k, "k")?, &xi)?.instance,
        Family::Random => gen_random(need(a.n, "n")?, &rational(&a.density, "density")?, a.seed)?,
    };
    Ok(serialize_instance(&inst))
}

fn edge_list(f: &Forest) -> String {
    f.edge_ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

fn solve(
    algo: Algo,
    inst: &Instance,
    params: &str,
    beta: Option<&str>,
    terminals: Option<Vec<Vertex>>,
    json: bool,
) -> Result<String> {
    let table = load_table(params)?;
    let main_params = MainParameters {
        beta: table.beta.clone(),
        epsilon: table.epsilon.clone(),
        eta: table.eta.clone(),
    };
    let mut lines: Vec<(String, String)> = Vec::new();
    let forest = match algo {
        Algo::Legacy => {
            let out = run_legacy(inst)?;
            lines.push(("growth".into(), fmt_q(&out.trace.ledger.total())));
            out.forest
        }
        Algo::Ls => {
            let beta = rational(beta.unwrap_or(&fmt_q(&main_params.beta)), "beta")?;
            let leg = run_legacy(inst)?;
            let ls = local_search(inst, &leg.fingerprint, &beta)?;
            lines.push(("legacy_cost".into(), fmt_q(&leg.forest.cost(inst)?)));
            lines.push(("boosts".into(), ls.boosts.len().to_string()));
            lines.push(("growth".into(), fmt_q(&ls.outcome.trace.ledger.total())));
            ls.forest
        }
        Algo::Main => {
            let out = solve_main(inst, &main_params)?;
            lines.push(("chosen".into(), out.report.chosen.to_string()));
            for (c, cost) in &out.report.costs {
                lines.push((format!("cost_{c}"), fmt_q(cost)));
            }
            lines.push(("autarkic_pairs".into(), out.ap.selection.pairs.len().to_string()));
            out.forest
        }
        Algo::St => {
            let beta = match beta {
                Some(b) => rational(b, "beta")?,
                None => default_tree_beta(),
            };
            let terms = terminals.unwrap_or_else(|| inst.terminals());
            if terms.len() < 2 {
                bail!(Error::Precondition("need at least two terminals".into()));
            }
            let out = solve_steiner_tree(inst, &terms, &beta)?;
            lines.push(("boosts".into(), out.ls.boosts.len().to_string()));
            out.forest
        }
        Algo::Gluttonous => {
            let out = gluttonous(inst)?;
            lines.push(("steps".into(), out.steps.len().to_string()));
            out.forest
        }
        Algo::Exact => exact_opt(inst)?.1,
    };
    let cost = forest.cost(inst)?;
    if json {
        let mut obj = serde_json::Map::new();
        obj.insert("algo".into(), format!("{algo:?}").to_lowercase().into());
        obj.insert("cost".into(), fmt_q_frac(&cost).into());
        obj.insert("feasible".into(), check_feasible(inst, &forest)?.into());
        for (k, v) in lines {
            obj.insert(k, v.into());
        }
        obj.insert("edges".into(), forest.edge_ids.iter().copied().collect::<Vec<_>>().into());
        return Ok(format!("{}\n", serde_json::Value::Object(obj)));
    }
    let mut text = format!("algo {}\ncost {} ({})\n", format!("{algo:?}").to_lowercase(), fmt_q(&cost), to_decimal(&cost, 6));
    for (k, v) in lines {
        text.push_str(&format!("{k} {v}\n"));
    }
    text.push_str(&format!("edges {}\n", edge_list(&forest)));
    Ok(text)
}

/// Returns the report and whether every check passed.
fn verify(
    input: Option<&Path>,
    claw: bool,
    assignments: bool,
    refinement: bool,
    params_table: Option<&str>,
    beta: &str,
    samples: Option<usize>,
    seed: u64,
) -> Result<(String, bool)> {
    let mut text = String::new();
    let mut ok = true;
    if let Some(spec) = params_table {
        let t = load_table(spec)?;
        let (good, bad) = verify_parameters(&t);
        if good {
            text.push_str(&format!("OK: alpha = {}\n", fmt_q(&t.alpha)));
        } else {
            text.push_str(&format!("FAIL: {}\n", bad.join(", ")));
            ok = false;
        }
    }
    if !(claw || assignments || refinement) {
        if params_table.is_none() {
            bail!(Error::Precondition("nothing to verify".into()));
        }
        return Ok((text, ok));
    }
    let path = input.ok_or_else(|| anyhow!(Error::Precondition("--in is required".into())))?;
    let inst = read_instance(path)?;
    let beta = rational(beta, "beta")?;
    let leg = run_legacy(&inst)?;
    let ls = local_search(&inst, &leg.fingerprint, &beta)?;
    if claw {
        let scope = match samples {
            Some(samples) => ClawScope::Sample { samples, seed },
            None if inst.n <= 10 => ClawScope::Full,
            None => ClawScope::Sample { samples: 1000, seed },
        };
        let v = check_claw(&inst, &ls, &beta, scope)?;
        text.push_str(&format!("claw: {} violations\n", v.len()));
        for x in v.iter().take(10) {
            text.push_str(&format!(
                "  triple {:?} q {} tau {} tau' {} bound {}\n",
                x.triple,
                x.q,
                fmt_q(&x.tau),
                fmt_q(&x.tau_all),
                fmt_q(&x.bound)
            ));
        }
        ok &= v.is_empty();
    }
    if refinement {
        let r = check_refinement(&leg.trace, &ls.outcome.trace);
        text.push_str(&format!("refinement: {}\n", if r { "holds" } else { "BROKEN" }));
        ok &= r;
    }
    if assignments {
        let (_, opt) = exact_opt(&inst)?;
        let pr = compute_priorities(&inst, &leg.fingerprint);
        let r = compute_assignment(&inst, &leg.trace, &leg.fingerprint, &opt, &pr, AssignmentMode::PrefixTime)?;
        let ex = compute_assignment(&inst, &ls.outcome.trace, &leg.fingerprint, &opt, &pr, AssignmentMode::Exclusive)?;
        let growth = leg.trace.ledger.total();
        let covers = growth <= r.total();
        let prefix = r.is_prefix_time();
        let exclusive = ex.total() == ls.outcome.y_base;
        text.push_str(&format!(
            "assignments: growth {} <= r- {}: {}; prefix-time: {}; sum r^ = y_base {}: {}\n",
            fmt_q(&growth),
            fmt_q(&r.total()),
            covers,
            prefix,
            fmt_q(&ls.outcome.y_base),
            exclusive
        ));
        ok &= covers && prefix && exclusive;
    }
    Ok((text, ok))
}

struct Job {
    name: String,
    inst: Instance,
    /// leaves of a binary tree, solved as Steiner tree
    tree: Option<BinaryInstance>,
}

fn bench_jobs(families: &[Family]) -> Result<Vec<Job>> {
    let xi = parse_q("1/100").unwrap();
    let mut jobs = Vec::new();
    let plain = |name: String, inst: Instance| Job { name, inst, tree: None };
    for f in families {
        match f {
            Family::Wheel => jobs.push(plain("wheel".into(), gen_wheel(&xi)?)),
            Family::Grid => {
                for (n, m) in [(3, 3), (4, 4)] {
                    jobs.push(plain(format!("grid-{n}x{m}"), gen_grid(n, m, &xi)?));
                }
            }
            Family::Binary => {
                for h in 3..=5 {
                    let b = gen_binary(h, &xi)?;
                    jobs.push(Job {
                        name: format!("binary-h{h}"),
                        inst: b.graph.clone(),
                        tree: Some(b),
                    });
                }
            }
            Family::Horseshoe => {
                for n in 2..=4 {
                    jobs.push(plain(format!("horseshoe-n{n}"), gen_horseshoe(n, 3, &xi)?.instance));
                }
            }
            Family::Gluttonous => {
                for nk in 2..=3 {
                    let gi = gen_gluttonous(nk, nk, &parse_q("1/1000").unwrap())?;
                    jobs.push(plain(format!("gluttonous-n{nk}k{nk}"), gi.instance));
                }
            }
            Family::Random => {
                for seed in 0..10 {
                    jobs.push(plain(format!("random-s{seed}"), gen_random(7, &parse_q("1/3").unwrap(), seed)?));
                }
            }
        }
    }
    Ok(jobs)
}

fn bench_rows(job: &Job, timing: bool) -> Result<Vec<(String, String, String, String, String, u128)>> {
    let inst = &job.inst;
    let opt: Option<Q> = match &job.tree {
        Some(b) => Some(binary_tree_opt(b)),
        None => match exact_opt(inst) {
            Ok((c, _)) => Some(c),
            Err(Error::Capacity(_)) => None,
            Err(e) => return Err(e.into()),
        },
    };
    let algos: Vec<&str> = if job.tree.is_some() { vec!["st"] } else { vec!["legacy", "ls", "main", "gluttonous"] };
    let mut rows = Vec::new();
    for algo in algos {
        let start = Instant::now();
        let forest = match algo {
            "legacy" => run_legacy(inst)?.forest,
            "ls" => {
                let leg = run_legacy(inst)?;
                local_search(inst, &leg.fingerprint, &MainParameters::table2().beta)?.forest
            }
            "main" => solve_main(inst, &MainParameters::table2())?.forest,
            "gluttonous" => gluttonous(inst)?.forest,
            _ => {
                let b = job.tree.as_ref().unwrap();
                solve_steiner_tree(&b.graph, &b.terminals, &default_tree_beta())?.forest
            }
        };
        let ms = if timing { start.elapsed().as_millis() } else { 0 };
        let cost = forest.cost(inst)?;
        let (opt_s, ratio) = match &opt {
            Some(o) if *o > Q::from_integer(0.into()) => (fmt_q_frac(o), to_decimal(&(&cost / o), 12)),
            Some(o) => (fmt_q_frac(o), "NA".into()),
            None => ("NA".into(), "NA".into()),
        };
        rows.push((job.name.clone(), algo.to_string(), fmt_q_frac(&cost), opt_s, ratio, ms));
    }
    Ok(rows)
}

fn bench(families: &[Family], timing: bool) -> Result<String> {
    let jobs = bench_jobs(families)?;
    let results: Vec<Result<Vec<_>>> = jobs.par_iter().map(|j| bench_rows(j, timing)).collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    rows.sort();
    let mut text = String::from("instance\talgo\tcost\topt\tratio\truntime_ms\n");
    for (name, algo, cost, opt, ratio, ms) in rows {
        text.push_str(&format!("{name}\t{algo}\t{cost}\t{opt}\t{ratio}\t{ms}\n"));
    }
    Ok(text)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Gen(a) => {
            let text = generate(&a)?;
            emit(&a.out, &text)?;
        }
        Cmd::Solve {
            algo,
            input,
            params,
            beta,
            terminals,
            json,
        } => {
            let inst = read_instance(&input)?;
            print!("{}", solve(algo, &inst, &params, beta.as_deref(), terminals, json)?);
        }
        Cmd::Trace { input, algo, beta, out } => {
            let inst = read_instance(&input)?;
            let leg = run_legacy(&inst)?;
            let trace = match algo {
                TraceAlgo::Legacy => leg.trace,
                TraceAlgo::Ls => local_search(&inst, &leg.fingerprint, &rational(&beta, "beta")?)?.outcome.trace,
            };
            let doc = serde_json::to_string_pretty(&trace.to_json())?;
            emit(&out, &format!("{doc}\n"))?;
        }
        Cmd::Verify {
            input,
            claw,
            assignments,
            refinement,
            params_table,
            beta,
            samples,
            seed,
        } => {
            let (text, ok) = verify(
                input.as_deref(),
                claw,
                assignments,
                refinement,
                params_table.as_deref(),
                &beta,
                samples,
                seed,
            )?;
            print!("{text}");
            return Ok(ok);
        }
        Cmd::Bench { families, out, no_timing } => {
            let text = bench(&families, !no_timing)?;
            emit(&out, &text)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Capacity(_)) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
