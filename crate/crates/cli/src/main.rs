//! `profinite`: truncated profinite completions, verification suites,
//! non-surjectivity witnesses and diagram export.
//!
//! Exit status: 0 when every requested check passed, 1 when a check
//! failed, 2 on usage, parse or budget errors.

mod source;

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use profinite::approx::{all_approximations, surjective_approximations_with, SourceGroup};
use profinite::fingroup::catalog::default_catalog;
use profinite::fingroup::FinGroup;
use profinite::profinite::{
    check_fact_suite, check_iterate, check_perp, check_prop34, check_theorem_iso, check_triangle,
    classify_surjective_images, complete, finite_table, fp_catalog, nonsurjectivity_witness,
    remark47_limit, Mode,
};
use profinite::report::Report;
use profinite::Budget;

use source::parse_source;

#[derive(Parser)]
#[command(
    name = "profinite",
    version,
    about = "Truncated profinite completions of concrete groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Surjective,
    Full,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Surjective => Mode::Surjective,
            ModeArg::Full => Mode::Full,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Theorem,
    Triangle,
    Prop34,
    Perp,
    Classify,
    Remark47,
    Fact,
    Iterate,
}

#[derive(Subcommand)]
enum Command {
    /// Inverse limit over approximations with target order at most the bound.
    Complete {
        #[arg(long)]
        source: String,
        #[arg(long)]
        bound: usize,
        #[arg(long, value_enum, default_value = "surjective")]
        mode: ModeArg,
        /// Comma-separated targets for full mode; `default` is the abelian
        /// groups of order at most 8 with S3, D4 and Q8.
        #[arg(long)]
        catalog: Option<String>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Include the limit's elements in the JSON output.
        #[arg(long)]
        elements: bool,
    },
    /// Run one verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        source: Option<String>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        catalog: Option<String>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Least support of preimages of the all-ones family, levels 0..=level.
    Witness {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Export the approximation diagram as Graphviz DOT.
    Diagram {
        #[arg(long)]
        source: String,
        #[arg(long)]
        bound: usize,
        #[arg(long, value_enum, default_value = "surjective")]
        mode: ModeArg,
        #[arg(long)]
        catalog: Option<String>,
        /// Output path; standard output when absent.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        no_identities: bool,
    },
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_json(path: &Path, value: &Value) -> anyhow::Result<()> {
    write(path, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn catalog_for(
    list: Option<&str>,
    source: &SourceGroup,
    bound: usize,
) -> anyhow::Result<Vec<Arc<FinGroup>>> {
    let Some(list) = list else {
        return Ok(match source {
            SourceGroup::FpSpace { p, dim } => fp_catalog(*p, *dim, bound),
            _ => default_catalog(bound),
        });
    };
    let mut out: Vec<Arc<FinGroup>> = Vec::new();
    let mut seen = HashSet::new();
    for item in list.split(',') {
        let groups = if item.trim().eq_ignore_ascii_case("default") {
            default_catalog(bound)
        } else {
            let g =
                parse_source(item).with_context(|| format!("catalog entry '{}'", item.trim()))?;
            vec![Arc::new(finite_table(&g)?)]
        };
        for g in groups {
            if seen.insert(g.name().to_string()) {
                out.push(g);
            }
        }
    }
    Ok(out)
}

fn print_report(suite: &str, r: &Report) {
    let status = if r.passed() { "PASS" } else { "FAIL" };
    println!("{status:<6}{suite:<10}{}", r.instance);
    println!("      {}", r.claim);
    let data = if r.passed() {
        &r.witness
    } else {
        &r.counterexample
    };
    if let Some(v) = data {
        println!("      {v}");
    }
}

fn cmd_complete(
    source: &str,
    bound: usize,
    mode: ModeArg,
    catalog: Option<&str>,
    json: Option<&Path>,
    elements: bool,
    budget: &Budget,
) -> anyhow::Result<bool> {
    let g = parse_source(source)?;
    let cat = match mode {
        ModeArg::Full => catalog_for(catalog, &g, bound)?,
        ModeArg::Surjective => Vec::new(),
    };
    let r = complete(&g, bound, mode.into(), &cat, budget)?;
    println!("source: {}", g.name());
    println!("bound: {bound} (target order <= bound)");
    println!(
        "diagram: {} nodes, {} edges",
        r.diagram.nodes().len(),
        r.diagram.edges().len()
    );
    println!("limit order: {}", r.limit.order());
    match r.limit.invariant_factors() {
        Some(f) => println!("invariant factors: {f:?}"),
        None => println!("invariant factors: non-abelian"),
    }
    let yes = |b: bool| if b { "yes" } else { "no" };
    println!(
        "projection: injective {}, surjective {}",
        yes(r.projection.injective),
        yes(r.projection.surjective)
    );
    if let Some(path) = json {
        write_json(path, &r.to_json(elements))?;
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: Suite,
    p: u64,
    dim: usize,
    bound: Option<usize>,
    source: Option<&str>,
    depth: usize,
    catalog: Option<&str>,
    json: Option<&Path>,
    budget: &Budget,
) -> anyhow::Result<bool> {
    let size = (p as usize)
        .checked_pow(dim as u32)
        .context("p^dim overflows")?;
    let fp_bound = bound.unwrap_or(size.max((p as usize).pow(2)));
    let (name, report) = match suite {
        Suite::Theorem => ("theorem", check_theorem_iso(p, dim, fp_bound, budget)?),
        Suite::Triangle => ("triangle", check_triangle(p, dim, fp_bound, budget)?),
        Suite::Fact => ("fact", check_fact_suite(p, dim, fp_bound, budget)?),
        Suite::Perp => ("perp", check_perp(p, dim, budget)?),
        Suite::Remark47 => ("remark47", remark47_limit(p, dim, budget)?.1),
        Suite::Classify => {
            let b = bound.unwrap_or(8);
            let cat = catalog_for(
                Some(catalog.unwrap_or("default")),
                &SourceGroup::trivial(),
                b,
            )?;
            (
                "classify",
                classify_surjective_images(p, dim, &cat, budget)?.1,
            )
        }
        Suite::Prop34 => {
            let g = parse_source(source.unwrap_or("Z/4"))?;
            let b = bound.unwrap_or(8);
            let cat = catalog_for(Some(catalog.unwrap_or("default")), &g, b)?;
            ("prop34", check_prop34(&g, b, &cat, budget)?)
        }
        Suite::Iterate => {
            if bound.is_some() {
                bail!("iterate uses the group order as bound; --bound is not accepted");
            }
            let g = parse_source(source.unwrap_or("Z/2"))?;
            ("iterate", check_iterate(&g, depth, budget)?)
        }
    };
    print_report(name, &report);
    if let Some(path) = json {
        write_json(path, &serde_json::to_value(&report)?)?;
    }
    Ok(report.passed())
}

fn cmd_witness(p: u64, level: usize, json: Option<&Path>) -> anyhow::Result<bool> {
    let (levels, report) = nonsurjectivity_witness(p, level)?;
    println!(
        "{:>5} {:>7} {:>11}  forced",
        "level", "ambient", "min_support"
    );
    for l in &levels {
        println!(
            "{:>5} {:>7} {:>11}  {:?}",
            l.level, l.ambient, l.min_support, l.forced
        );
    }
    print_report("witness", &report);
    if let Some(path) = json {
        let v = serde_json::json!({ "levels": levels, "report": report });
        write_json(path, &v)?;
    }
    Ok(report.passed())
}

fn cmd_diagram(
    source: &str,
    bound: usize,
    mode: ModeArg,
    catalog: Option<&str>,
    dot: Option<&Path>,
    no_identities: bool,
    budget: &Budget,
) -> anyhow::Result<bool> {
    let g = parse_source(source)?;
    let d = match mode {
        ModeArg::Surjective => surjective_approximations_with(&g, bound, !no_identities, budget)?,
        ModeArg::Full => {
            if no_identities {
                bail!("--no-identities applies to surjective diagrams only");
            }
            all_approximations(&g, bound, &catalog_for(catalog, &g, bound)?, budget)?
        }
    };
    match dot {
        Some(path) => {
            write(path, &d.to_dot())?;
            println!(
                "diagram: {} nodes, {} edges",
                d.nodes().len(),
                d.edges().len()
            );
        }
        None => print!("{}", d.to_dot()),
    }
    Ok(true)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let budget = Budget::default();
    match cli.command {
        Command::Complete {
            source,
            bound,
            mode,
            catalog,
            json,
            elements,
        } => cmd_complete(
            &source,
            bound,
            mode,
            catalog.as_deref(),
            json.as_deref(),
            elements,
            &budget,
        ),
        Command::Verify {
            suite,
            p,
            dim,
            bound,
            source,
            depth,
            catalog,
            json,
        } => cmd_verify(
            suite,
            p,
            dim,
            bound,
            source.as_deref(),
            depth,
            catalog.as_deref(),
            json.as_deref(),
            &budget,
        ),
        Command::Witness { p, level, json } => cmd_witness(p, level, json.as_deref()),
        Command::Diagram {
            source,
            bound,
            mode,
            catalog,
            dot,
            no_identities,
        } => cmd_diagram(
            &source,
            bound,
            mode,
            catalog.as_deref(),
            dot.as_deref(),
            no_identities,
            &budget,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
