//! Command-line front end: evaluate measures, run the property suites, and
//! write RWA curves and case-study tables.

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use defrisk::checks::{check_axioms, check_on_family, equivalence_suite, InvarianceKind, ProbeFamily};
use defrisk::corpus::{all_indicators, random_corpus};
use defrisk::distortion::{extract_distortion, has_ordered_subset};
use defrisk::numeric::sig9;
use defrisk::regulatory::{case_study, curve_csv, rwa_curve, rwa_shape, SignConvention};
use defrisk::var::{alpha_grid, quantile_family, recover_drm, rho_var, VAR_TOL};
use defrisk::RandomVariable;

use config::{RunConfig, Suite};

pub const DEFAULT_CURVE_POINTS: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "defrisk", version, about = "Default risk measures on finite probability spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for random corpora and samplers; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Grid size: curve points for `rwa`, α-grid points for `check`.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Use a minus sign in front of √R·G(0.999) in the RWA formula.
    #[arg(long, global = true)]
    pub paper_literal_sign: bool,
    /// Output directory for CSV files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate every configured measure on every named variable.
    Eval,
    /// Run the axiom, invariance, equivalence and VaR suites.
    Check,
    /// RWA curve and case-study table.
    Rwa,
    /// Case-study table only.
    CaseStudy,
    /// Recover a distortion function from a law-invariant measure.
    ExtractDistortion,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Check => "check",
            Command::Rwa => "rwa",
            Command::CaseStudy => "case-study",
            Command::ExtractDistortion => "extract-distortion",
        }
    }
}

/// Exit status of a completed run; configuration errors surface as `Err`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    AssertionFailed,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::AssertionFailed => 1,
        }
    }
}

pub const CONFIG_ERROR: u8 = 2;

struct RunContext {
    cfg: RunConfig,
    base: PathBuf,
    seed: u64,
    grid: Option<usize>,
    sign: SignConvention,
    out: Option<PathBuf>,
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> anyhow::Result<Status> {
    let (cfg, base) = match &cli.config {
        Some(path) => RunConfig::read(path)?,
        None => match cli.command {
            Command::Rwa | Command::CaseStudy => (RunConfig::default(), PathBuf::new()),
            _ => bail!("`{}` needs --config", cli.command.name()),
        },
    };
    let ctx = RunContext {
        seed: cli.seed.unwrap_or(cfg.seed),
        grid: cli.grid.or(cfg.grid),
        sign: if cli.paper_literal_sign {
            SignConvention::Literal
        } else {
            SignConvention::Plus
        },
        out: cli.out.clone(),
        cfg,
        base,
    };
    if ctx.grid == Some(0) {
        bail!("--grid must be positive");
    }
    match cli.command {
        Command::Eval => eval(&ctx, stdout),
        Command::Check => check(&ctx, stdout),
        Command::Rwa => regulatory(&ctx, stdout, true),
        Command::CaseStudy => regulatory(&ctx, stdout, false),
        Command::ExtractDistortion => extraction(&ctx, stdout),
    }
}

fn write_output(ctx: &RunContext, name: &str, contents: &str) -> anyhow::Result<Option<PathBuf>> {
    let Some(dir) = &ctx.out else {
        return Ok(None);
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(Some(path))
}

fn eval(ctx: &RunContext, stdout: &mut dyn Write) -> anyhow::Result<Status> {
    let loaded = ctx.cfg.load(&ctx.base)?;
    let mut csv = String::from("measure,variable,rho");
    for a in &ctx.cfg.alphas {
        let _ = write!(csv, ",var_{}", sig9(*a));
    }
    csv.push('\n');
    for (name, rho) in &loaded.measures {
        for (var, x) in &loaded.space.variables {
            let value = rho.checked_evaluate(x).with_context(|| format!("evaluating `{name}` on `{var}`"))?;
            let _ = write!(csv, "{name},{var},{}", sig9(value));
            for &a in &ctx.cfg.alphas {
                let v = rho_var(rho, a, x).with_context(|| format!("VaR of `{name}` on `{var}`"))?;
                let _ = write!(csv, ",{}", sig9(v));
            }
            csv.push('\n');
        }
    }
    stdout.write_all(csv.as_bytes())?;
    write_output(ctx, "eval.csv", &csv)?;
    Ok(Status::Ok)
}

fn check_corpus(ctx: &RunContext, n: usize, named: &[RandomVariable]) -> Vec<RandomVariable> {
    let mut corpus = named.to_vec();
    corpus.extend(random_corpus(n, ctx.cfg.corpus_size, ctx.seed));
    corpus
}

fn check(ctx: &RunContext, stdout: &mut dyn Write) -> anyhow::Result<Status> {
    let loaded = ctx.cfg.load(&ctx.base)?;
    let suites = ctx.cfg.suites();
    if suites.is_empty() || loaded.measures.is_empty() {
        writeln!(stdout, "warning: nothing ran (no suites or no measures selected)")?;
        return Ok(Status::Ok);
    }
    let named: Vec<RandomVariable> = loaded.space.variables.values().cloned().collect();
    let corpus = check_corpus(ctx, loaded.space.measure.dim(), &named);
    let samples = ctx.cfg.samples;
    let mut failures = 0usize;
    let mut report = String::new();
    for (name, rho) in &loaded.measures {
        for suite in &suites {
            match suite {
                Suite::Axioms => {
                    let r = check_axioms(rho, &corpus);
                    match r.violations.first() {
                        None => {
                            let _ = writeln!(report, "ok   default_risk/axioms {name}: {} checks", r.checked);
                        }
                        Some(v) => {
                            failures += 1;
                            let _ = writeln!(
                                report,
                                "FAIL default_risk/axioms/{} {name}: {} ({} violations)",
                                v.property,
                                v.witness,
                                r.violations.len()
                            );
                        }
                    }
                }
                Suite::Invariance => {
                    let family = ProbeFamily::new(&corpus, samples, ctx.seed);
                    for kind in InvarianceKind::ALL {
                        let r = check_on_family(rho, kind, &family, samples, ctx.seed);
                        let tag = if r.passed() { "yes " } else { "no  " };
                        let _ = writeln!(report, "{tag} default_risk/invariance {name}: {r}");
                    }
                }
                Suite::Equivalence => {
                    let eq = equivalence_suite(rho, &corpus, samples, ctx.seed);
                    let flags = format!(
                        "indicator={} liquidity={} illiquidity={} scaling_condition={}",
                        eq.indicator.passed(),
                        eq.liquidity.passed(),
                        eq.illiquidity.passed(),
                        eq.scaling_condition()
                    );
                    if eq.consistent() {
                        let _ = writeln!(report, "ok   default_risk/equivalence {name}: {flags}");
                    } else {
                        failures += 1;
                        let witness = eq
                            .indicator
                            .witness
                            .as_ref()
                            .map(|w| w.to_string())
                            .unwrap_or_else(|| "indicator check passed".into());
                        let _ = writeln!(report, "FAIL default_risk/equivalence {name}: {flags}; {witness}");
                    }
                }
                Suite::Var => {
                    if !rho.is_indicator_representable() {
                        let _ = writeln!(report, "skip var_bridge/round_trip {name}: not indicator-representable");
                        continue;
                    }
                    let grid = alpha_grid(ctx.grid.unwrap_or(99));
                    let recovered = recover_drm(quantile_family(rho, grid)?);
                    let bad = corpus.iter().find_map(|x| {
                        let (a, b) = (rho.evaluate(x), recovered.evaluate(x));
                        ((a - b).abs() > VAR_TOL).then(|| format!("X={x}: ϱ={a}, recovered={b}"))
                    });
                    match bad {
                        None => {
                            let _ = writeln!(report, "ok   var_bridge/round_trip {name}: {} variables", corpus.len());
                        }
                        Some(w) => {
                            failures += 1;
                            let _ = writeln!(report, "FAIL var_bridge/round_trip {name}: {w}");
                        }
                    }
                }
            }
        }
    }
    let _ = writeln!(report, "{failures} hard failures");
    stdout.write_all(report.as_bytes())?;
    write_output(ctx, "check.txt", &report)?;
    Ok(if failures == 0 {
        Status::Ok
    } else {
        Status::AssertionFailed
    })
}

fn regulatory(ctx: &RunContext, stdout: &mut dyn Write, with_curve: bool) -> anyhow::Result<Status> {
    let reg = &ctx.cfg.regulatory;
    let rs = reg.rating_system()?;
    let (a, b) = reg.policies(&rs)?;
    if with_curve {
        let curve = rwa_curve(ctx.grid.unwrap_or(DEFAULT_CURVE_POINTS), rs.ead(), rs.lgd(), ctx.sign)?;
        let csv = curve_csv(&curve);
        match write_output(ctx, "rwa_curve.csv", &csv)? {
            Some(path) => writeln!(stdout, "wrote {}", path.display())?,
            None => stdout.write_all(csv.as_bytes())?,
        }
        let shape = rwa_shape(10_000, rs.ead(), rs.lgd(), ctx.sign)?;
        writeln!(
            stdout,
            "argmax p={} rwa={}; decreasing on final decile: {}",
            sig9(shape.argmax.0),
            sig9(shape.argmax.1),
            shape.decreasing_final_decile
        )?;
    }
    let table = case_study(&rs, &a, &b, ctx.sign)?;
    let csv = table.to_csv();
    match write_output(ctx, "case_study.csv", &csv)? {
        Some(path) => writeln!(stdout, "wrote {}", path.display())?,
        None => stdout.write_all(csv.as_bytes())?,
    }
    writeln!(stdout, "policy a: {}; policy b: {}", a.name(), b.name())?;
    for c in &table.clamps {
        writeln!(
            stdout,
            "clamped class {} policy {}: {} -> {}",
            c.class,
            c.policy,
            sig9(c.raw),
            sig9(c.clamped)
        )?;
    }
    Ok(Status::Ok)
}

fn extraction(ctx: &RunContext, stdout: &mut dyn Write) -> anyhow::Result<Status> {
    let Some(ex_cfg) = &ctx.cfg.extraction else {
        bail!("extract-distortion needs an `extraction` block");
    };
    let loaded = ctx.cfg.load(&ctx.base)?;
    let rho = loaded
        .measures
        .iter()
        .find(|(name, _)| *name == ex_cfg.measure)
        .map(|(_, rho)| rho)
        .with_context(|| format!("unknown measure `{}`", ex_cfg.measure))?;
    let p = &loaded.space.measure;
    let customers = match &ex_cfg.customers {
        None => all_indicators(p.dim())?,
        Some(names) => names
            .iter()
            .map(|n| {
                loaded
                    .space
                    .variables
                    .get(n)
                    .cloned()
                    .with_context(|| format!("unknown variable `{n}`"))
            })
            .collect::<anyhow::Result<_>>()?,
    };
    let ex = extract_distortion(rho, &customers, p)?;
    let ordered = has_ordered_subset(&customers, p)?;
    let mut csv = String::from("p,t\n");
    for (level, value) in &ex.levels {
        let _ = writeln!(csv, "{},{}", sig9(*level), sig9(*value));
    }
    match write_output(ctx, "extraction.csv", &csv)? {
        Some(path) => writeln!(stdout, "wrote {}", path.display())?,
        None => stdout.write_all(csv.as_bytes())?,
    }
    writeln!(
        stdout,
        "nondecreasing: {}; ordered subset: {}; law-invariance violations: {}; indicator violations: {}",
        ex.is_nondecreasing(),
        ordered.holds(),
        ex.law_invariance_violations.len(),
        ex.indicator_violations.len()
    )?;
    for v in ex.law_invariance_violations.iter().take(3) {
        writeln!(
            stdout,
            "  same PD {}: ϱ({})={} but ϱ({})={}",
            sig9(v.pd),
            v.x,
            v.rho_x,
            v.y,
            v.rho_y
        )?;
    }
    Ok(Status::Ok)
}
