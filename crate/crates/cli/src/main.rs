use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use mhclass::catalog::{Catalog, SHIPPED_CORPUS};
use mhclass::geometry::CohClass;
use mhclass::harness::{self, Settings};
use mhclass::milnor::{hirzebruch_milnor_report, MilnorReport, SingularHypersurfaceData};
use mhclass::motivic::{Cycle, Flavor};
use mhclass::transforms::{fj_class, hirzebruch_class, milnor_transform};
use mhclass::{Error, Rational, YPoly};

#[derive(Parser)]
#[command(name = "mhclass", version, about = "Exact Hirzebruch, Fulton-Johnson and Milnor classes on a catalog of projective varieties")]
struct Cli {
    /// Truncation order of every characteristic series.
    #[arg(long, global = true, env = "MHCLASS_ORDER", default_value_t = 6)]
    order: usize,
    /// A rational value for y, or `symbolic`.
    #[arg(long, global = true, default_value = "symbolic", allow_hyphen_values = true)]
    y: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Catalog JSON; the shipped catalog when omitted.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Hypersurface corpus JSON; the shipped corpus when omitted.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Transform {
    Hirzebruch,
    Fj,
    Milnor,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic classes of a catalog cycle, or of `[X -> X]` over a point for a space.
    Classes {
        /// Cycle or space id.
        input: String,
        #[arg(long, value_enum, default_value_t = Transform::All)]
        transform: Transform,
    },
    /// chi_y degrees of catalog spaces (all of them by default).
    Chi { spaces: Vec<String> },
    /// Milnor reports for every corpus entry.
    Milnor,
    /// Runs the diagram harness.
    Check {
        /// Run only this check.
        #[arg(long)]
        only: Option<String>,
    },
}

struct Ctx {
    order: usize,
    y: Option<Rational>,
    format: Format,
    catalog: Catalog,
}

impl Ctx {
    fn spec_class(&self, c: CohClass) -> CohClass {
        match &self.y {
            Some(y0) => c.specialize(y0),
            None => c,
        }
    }

    fn spec_poly(&self, p: &YPoly) -> YPoly {
        match &self.y {
            Some(y0) => p.specialize(y0),
            None => p.clone(),
        }
    }
}

fn parse_y(s: &str) -> Result<Option<Rational>, Error> {
    if s == "symbolic" {
        return Ok(None);
    }
    s.parse::<Rational>()
        .map(Some)
        .map_err(|_| Error::Parse(format!("--y expects a rational or 'symbolic', got '{s}'")))
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn corpus(cli: &Cli, cat: &Catalog) -> Result<Vec<SingularHypersurfaceData>, Error> {
    match &cli.corpus {
        Some(p) => cat.corpus(&read(p)?),
        None => cat.corpus(SHIPPED_CORPUS),
    }
}

fn class_table(c: &CohClass) -> String {
    let rows = c.table();
    if rows.is_empty() {
        return "  0\n".into();
    }
    let w = rows.iter().map(|(m, _)| m.len()).max().unwrap_or(1);
    rows.iter().map(|(m, v)| format!("  {m:<w$}  {v}\n")).collect()
}

fn resolve_input(ctx: &Ctx, input: &str) -> Result<Cycle, Error> {
    match ctx.catalog.cycle(input) {
        Ok(c) => Ok(c.clone()),
        Err(_) => ctx.catalog.self_cycle(input, Flavor::Lci),
    }
}

fn cmd_classes(ctx: &Ctx, input: &str, transform: Transform) -> Result<bool, Error> {
    let c = resolve_input(ctx, input)?;
    let g = mhclass::genus::hirzebruch_series(ctx.order);
    let mut out: Vec<(&str, CohClass)> = Vec::new();
    if matches!(transform, Transform::Hirzebruch | Transform::All) {
        out.push(("T_y", hirzebruch_class(&c, ctx.order)?));
    }
    if matches!(transform, Transform::Fj | Transform::All)
        && (c.flavor() == Flavor::Lci || transform == Transform::Fj) {
            out.push(("FJ_y", fj_class(&g, &c)?));
        }
    if matches!(transform, Transform::Milnor | Transform::All)
        && (c.flavor() == Flavor::Lci || transform == Transform::Milnor) {
            out.push(("MT_y", milnor_transform(&c, ctx.order)?));
        }
    let out: Vec<(&str, CohClass)> = out.into_iter().map(|(k, v)| (k, ctx.spec_class(v))).collect();
    match ctx.format {
        Format::Json => {
            let classes: serde_json::Map<String, serde_json::Value> = out
                .iter()
                .map(|(k, v)| (k.to_string(), json!({"class": v, "degree": v.degree()})))
                .collect();
            println!("{}", serde_json::to_string_pretty(&json!({"input": input, "cycle": c.to_json(), "classes": classes})).unwrap());
        }
        Format::Text => {
            println!("{input}: {c}");
            for (k, v) in &out {
                println!("{k}  (degree {})", v.degree());
                print!("{}", class_table(v));
            }
        }
    }
    Ok(true)
}

fn cmd_chi(ctx: &Ctx, spaces: &[String]) -> Result<bool, Error> {
    let ids: Vec<String> = if spaces.is_empty() {
        ctx.catalog
            .spaces()
            .filter(|(_, s)| s.is_smooth() || s.resolution().is_some())
            .map(|(k, _)| k.clone())
            .collect()
    } else {
        spaces.to_vec()
    };
    let mut rows = Vec::new();
    for id in &ids {
        let c = ctx.catalog.self_cycle(id, Flavor::Sm)?;
        rows.push((id.clone(), ctx.spec_poly(&hirzebruch_class(&c, ctx.order)?.degree())));
    }
    match ctx.format {
        Format::Json => {
            let m: serde_json::Map<String, serde_json::Value> = rows.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            println!("{}", serde_json::to_string_pretty(&m).unwrap());
        }
        Format::Text => {
            let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(5).max(5);
            println!("{:<w$}  chi_y", "space");
            for (k, v) in rows {
                println!("{k:<w$}  {v}");
            }
        }
    }
    Ok(true)
}

fn milnor_text(ctx: &Ctx, reports: &[MilnorReport]) -> String {
    let w = reports.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5);
    let mut s = format!(
        "{:<w$}  {:>3}  {:>6}  {:>9}  {:<14}  {:<14}  {}\n",
        "entry", "dim", "sum_mu", "classical", "chi_y", "MT degree", "verdicts"
    );
    for r in reports {
        let bad = r.verdicts.iter().filter(|v| !v.passed).count();
        s.push_str(&format!(
            "{:<w$}  {:>3}  {:>6}  {:>9}  {:<14}  {:<14}  {}\n",
            r.name,
            r.dim,
            r.sum_mu,
            r.classical_milnor_degree.to_string(),
            ctx.spec_poly(&r.chi_y).to_string(),
            ctx.spec_poly(&r.hirzebruch_milnor_degree).to_string(),
            if bad == 0 {
                "all passed".to_string()
            } else {
                format!("{bad} failed")
            }
        ));
    }
    s
}

fn cmd_milnor(ctx: &Ctx, corpus: &[SingularHypersurfaceData]) -> Result<bool, Error> {
    let reports = corpus
        .iter()
        .map(|d| hirzebruch_milnor_report(d, ctx.order))
        .collect::<Result<Vec<_>, _>>()?;
    match ctx.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&reports).unwrap()),
        Format::Text => print!("{}", milnor_text(ctx, &reports)),
    }
    Ok(reports.iter().all(MilnorReport::all_passed))
}

fn cmd_check(ctx: &Ctx, corpus: &[SingularHypersurfaceData], only: Option<&str>) -> Result<bool, Error> {
    let settings = Settings {
        order: ctx.order,
        y: ctx.y.clone(),
    };
    let (text, json, passed) = match only {
        Some(id) => {
            let r = harness::run_check(id, &ctx.catalog, corpus, &settings)?;
            let passed = r.passed();
            let text = format!(
                "{} instances={} status={} control={}\n",
                r.id,
                r.instances,
                if r.status == harness::Status::Pass { "pass" } else { "FAIL" },
                match r.control.detected {
                    Some(true) => "detected",
                    Some(false) => "MISSED",
                    None => "skipped",
                }
            );
            (text, serde_json::to_string_pretty(&r).unwrap(), passed)
        }
        None => {
            let r = harness::run_all(&ctx.catalog, corpus, &settings)?;
            (r.to_text(), serde_json::to_string_pretty(&r).unwrap(), r.passed)
        }
    };
    match ctx.format {
        Format::Json => println!("{json}"),
        Format::Text => print!("{text}"),
    }
    Ok(passed)
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let y = parse_y(&cli.y)?;
    let catalog = match &cli.catalog {
        Some(p) => Catalog::from_json_str(&read(p)?)?,
        None => Catalog::shipped(),
    };
    let ctx = Ctx {
        order: cli.order.max(1),
        y,
        format: cli.format,
        catalog,
    };
    match &cli.command {
        Command::Classes { input, transform } => cmd_classes(&ctx, input, *transform),
        Command::Chi { spaces } => cmd_chi(&ctx, spaces),
        Command::Milnor => cmd_milnor(&ctx, &corpus(cli, &ctx.catalog)?),
        Command::Check { only } => cmd_check(&ctx, &corpus(cli, &ctx.catalog)?, only.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
