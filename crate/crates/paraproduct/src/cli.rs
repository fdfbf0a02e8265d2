//! Command-line front end. [`run`] returns the process exit code:
//! 0 success, 1 verification failure, 2 input error, 3 resource error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use paraproduct_core::decompose::{decompose, DecomposeConfig, DecomposeError};
use paraproduct_core::verify::{verify_certificate_with, VerifyConfig};
use paraproduct_core::{MaxParaproductSpec, VertexId};
use serde::Deserialize;

use crate::corollary::{reduce_to_theorem, CorollaryInstance};
use crate::format::{parse_certificate, parse_graph, parse_template, write_certificate, write_graph};
use crate::numeric::lambda::max_lambda_on;
use crate::numeric::sweep::{ensemble_member, format_value};
use crate::numeric::symbol::DEFAULT_BASE;
use crate::numeric::{evaluate_lambda, family_box, uniformity_sweep, ExponentTuple, Families, Functions, GridFunction, SweepConfig, SymbolFamily, SymbolSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "paraproduct", version, about = "Decompose, verify and evaluate graph paraproducts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// JSON file with default values for the numeric flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// grid size N (power of two)
    #[arg(long)]
    grid_size: Option<usize>,
    /// lacunarity base B of the annulus symbols
    #[arg(long)]
    base: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// number of ensemble members
    #[arg(long)]
    ensemble: Option<usize>,
    /// certificate node budget
    #[arg(long)]
    budget: Option<usize>,
    /// scale-box radius (evaluate) or enumeration radius (decompose, verify)
    #[arg(long)]
    box_radius: Option<u64>,
    /// worker threads; output does not depend on it
    #[arg(long)]
    jobs: Option<usize>,
    /// comma-separated exponents p_v
    #[arg(long, value_delimiter = ',')]
    exponents: Option<Vec<f64>>,
    /// output path
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose a maximal paraproduct graph into a certificate
    Decompose {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Replay and check a certificate
    Verify {
        certificate: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a paraproduct on a seeded ensemble
    Evaluate {
        graph: PathBuf,
        /// use identically zero inputs
        #[arg(long)]
        zero: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep the parameter `A` of a graph template
    Sweep {
        template: PathBuf,
        /// inclusive range `lo..hi` or comma-separated list
        #[arg(long, default_value = "0..20")]
        a_values: String,
        #[command(flatten)]
        common: Common,
    },
    /// Reduce a summed multiplier product to constrained paraproducts
    ReduceCorollary {
        instance: PathBuf,
        /// evaluate both sides on seeded mean-zero inputs
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    grid_size: Option<usize>,
    base: Option<u32>,
    seed: Option<u64>,
    ensemble: Option<usize>,
    budget: Option<usize>,
    box_radius: Option<u64>,
    jobs: Option<usize>,
    exponents: Option<Vec<f64>>,
}

/// Validated parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid_size: usize,
    pub base: u32,
    pub seed: u64,
    pub ensemble: usize,
    pub budget: usize,
    pub box_radius: Option<u64>,
    pub jobs: usize,
    pub exponents: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
}

struct Failure {
    code: i32,
    message: String,
}

type Outcome = Result<(), Failure>;

fn input(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

fn resource(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_RESOURCE, message: message.into() }
}

fn resolve(c: &Common) -> Result<RunConfig, Failure> {
    let file: ConfigFile = match &c.config {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| input(format!("{}: {e}", p.display())))?,
        None => ConfigFile::default(),
    };
    let cfg = RunConfig {
        grid_size: c.grid_size.or(file.grid_size).unwrap_or(256),
        base: c.base.or(file.base).unwrap_or(DEFAULT_BASE),
        seed: c.seed.or(file.seed).unwrap_or(0),
        ensemble: c.ensemble.or(file.ensemble).unwrap_or(8),
        budget: c.budget.or(file.budget).unwrap_or(DecomposeConfig::default().node_budget),
        box_radius: c.box_radius.or(file.box_radius),
        jobs: c.jobs.or(file.jobs).unwrap_or(0),
        exponents: c.exponents.clone().or(file.exponents),
        output: c.output.clone(),
    };
    if cfg.grid_size < 4 || !cfg.grid_size.is_power_of_two() {
        return Err(input(format!("--grid-size {} is not a power of two at least 4", cfg.grid_size)));
    }
    if cfg.base < 2 {
        return Err(input("--base must be at least 2"));
    }
    if cfg.ensemble == 0 {
        return Err(input("--ensemble must be at least 1"));
    }
    if cfg.budget == 0 {
        return Err(input("--budget must be at least 1"));
    }
    Ok(cfg)
}

fn read(p: &Path) -> Result<String, Failure> {
    fs::read_to_string(p).map_err(|e| input(format!("{}: {e}", p.display())))
}

fn emit(cfg: &RunConfig, text: &str, out: &mut dyn Write) -> Outcome {
    match &cfg.output {
        Some(p) => fs::write(p, text).map_err(|e| resource(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| resource(e.to_string())),
    }
}

fn enumeration_cap(radius: Option<u64>, order: usize, default: u128) -> u128 {
    radius.map_or(default, |r| (2 * r as u128 + 1).saturating_pow(order as u32))
}

fn cmd_decompose(path: &Path, cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let g = parse_graph(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let spec = MaxParaproductSpec::new(g).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let dc = DecomposeConfig {
        node_budget: cfg.budget,
        enumeration_cap: enumeration_cap(cfg.box_radius, spec.graph().order(), DecomposeConfig::default().enumeration_cap),
        ..DecomposeConfig::default()
    };
    let cert = decompose(&spec, &dc).map_err(|e| match e {
        DecomposeError::Precondition(m) => input(m),
        DecomposeError::BudgetExceeded { .. } => resource(e.to_string()),
        DecomposeError::Internal { .. } => Failure { code: EXIT_VERIFY, message: e.to_string() },
    })?;
    let mut summary = String::new();
    let s = &cert.stats;
    let _ = writeln!(summary, "nodes: {} leaves: {} (good {}, vanishing {}) depth: {}", s.node_count, s.leaf_count, s.good_leaves, s.vanishing_leaves, s.max_depth);
    let deepest = cert.nodes.iter().max_by_key(|n| (n.depth, std::cmp::Reverse(n.id))).map_or(0, |n| n.id);
    let trace: Vec<String> = cert.path_to(deepest).iter().map(|&i| format!("{:?}", cert.nodes[i].measure)).collect();
    let _ = writeln!(summary, "measure trace: {}", trace.join(" > "));
    for (rule, count) in &s.rule_counts {
        let _ = writeln!(summary, "rule {rule}: {count}");
    }
    let json = write_certificate(&cert);
    match &cfg.output {
        Some(p) => {
            fs::write(p, json).map_err(|e| resource(format!("{}: {e}", p.display())))?;
            out.write_all(summary.as_bytes()).map_err(|e| resource(e.to_string()))
        }
        None => out.write_all(json.as_bytes()).map_err(|e| resource(e.to_string())),
    }
}

fn cmd_verify(path: &Path, cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let cert = parse_certificate(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let vc = VerifyConfig { enumeration_cap: enumeration_cap(cfg.box_radius, cert.root.order(), VerifyConfig::default().enumeration_cap) };
    let report = verify_certificate_with(&cert, &vc);
    let mut s = format!(
        "pass: {} nodes checked: {} identities: {} (enumerated {})\n",
        report.pass, report.nodes_checked, report.identities_checked, report.identities_enumerated
    );
    for f in &report.failures {
        let path: Vec<String> = f.path.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "FAIL node {} path {}: {:?}", f.node, path.join("/"), f.kind);
    }
    emit(cfg, &s, out)?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFY, message: format!("{} failing checks", report.failures.len()) })
    }
}

fn default_exponents(free: usize, maximal: bool) -> (Vec<f64>, Option<f64>) {
    if maximal {
        let p = free as f64 + 1.0;
        (vec![p; free], Some(p / free as f64))
    } else {
        (vec![free as f64; free], None)
    }
}

fn exponents_for(cfg: &RunConfig, free: usize, maximal: bool) -> Result<ExponentTuple, Failure> {
    let (dp, dstar) = default_exponents(free, maximal);
    let p = cfg.exponents.clone().unwrap_or(dp);
    let t = match dstar {
        None => ExponentTuple::new(p),
        Some(_) => {
            let s: f64 = p.iter().map(|x| 1.0 / x).sum();
            ExponentTuple::maximal(p, 1.0 / s)
        }
    };
    let t = t.map_err(|e| input(e.to_string()))?;
    if t.p.len() != free {
        return Err(input(format!("{} exponents for {free} functions", t.p.len())));
    }
    Ok(t)
}

fn cmd_evaluate(path: &Path, zero: bool, cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let g = parse_graph(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let n = cfg.grid_size;
    let free: Vec<VertexId> = g.free_vertices().into_iter().collect();
    if free.is_empty() {
        return Err(input("graph has no function-carrying vertex"));
    }
    let maximal = g.distinguished().is_some();
    let ex = exponents_for(cfg, free.len(), maximal)?;
    let fam = SymbolFamily::lacunary(&SymbolSpec::annulus(0, cfg.base), n).map_err(|e| input(e.to_string()))?;
    let families: Families = free.iter().map(|v| (*v, fam.clone())).collect();
    let mut bx = family_box(&families);
    if let Some(r) = cfg.box_radius {
        bx.values_mut().for_each(|x| *x = (-(r as i64), r as i64));
    }
    if let Some(vs) = g.distinguished() {
        let margin = g.edges().iter().map(|e| e.weight.abs()).sum::<i64>() + 1;
        let lo = bx.values().map(|x| x.0).min().unwrap_or(0) - margin;
        let hi = bx.values().map(|x| x.1).max().unwrap_or(0) + margin;
        bx.insert(vs, (lo, hi));
    }
    let mut s = format!("# format-version: 1\n# seed: {} grid-size: {n} base: {}\nmember,p,seed,value,ratio\n", cfg.seed, cfg.base);
    for m in 0..cfg.ensemble as u64 {
        let fs: Vec<GridFunction> = if zero {
            (0..free.len()).map(|_| GridFunction::zeros(n)).collect::<Result<_, _>>()
        } else {
            ensemble_member(cfg.seed, m, free.len(), n)
        }
        .map_err(|e| input(e.to_string()))?;
        let fmap: Functions = free.iter().copied().zip(fs.iter().cloned()).collect();
        let value = match g.distinguished() {
            None => evaluate_lambda(&g, &families, &fmap, &bx).map(|z| z.norm()),
            Some(vs) => max_lambda_on(&g, vs, &families, &fmap, &bx, n).map(|v| {
                let c: Vec<Complex64> = v.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
                crate::numeric::grid::lp_norm(&c, ex.p_star.expect("maximal exponent"))
            }),
        }
        .map_err(|e| resource(e.to_string()))?;
        let denom: f64 = fs.iter().zip(&ex.p).map(|(f, p)| f.lp_norm(*p)).product();
        let ratio = if value == 0.0 { 0.0 } else { value / denom };
        let _ = writeln!(s, "{m},{},{},{},{}", ex.label(), cfg.seed, format_value(value), format_value(ratio));
    }
    emit(cfg, &s, out)
}

fn parse_a_values(s: &str) -> Result<Vec<i64>, Failure> {
    let bad = || input(format!("bad --a-values `{s}`"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i64 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn cmd_sweep(path: &Path, a_values: &str, cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let t = parse_template(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    if t.distinguished.is_some() {
        return Err(input("sweep templates carry no distinguished vertex"));
    }
    let ex = exponents_for(cfg, t.vertices.len(), false)?;
    let n = cfg.grid_size;
    let fam = SymbolFamily::lacunary(&SymbolSpec::ball(0, true), n).map_err(|e| input(e.to_string()))?;
    let families: Families = t.vertices.iter().map(|v| (*v, fam.clone())).collect();
    let sc = SweepConfig { a_values: parse_a_values(a_values)?, ensemble_size: cfg.ensemble, seed: cfg.seed, jobs: cfg.jobs };
    let table = uniformity_sweep(&t, &families, &ex, n, &sc).map_err(|e| resource(e.to_string()))?;
    emit(cfg, &table.to_csv(), out)
}

fn cmd_reduce(path: &Path, check: bool, cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let inst: CorollaryInstance = serde_json::from_str(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let red = reduce_to_theorem(&inst).map_err(|e| input(e.to_string()))?;
    let mut s = format!("instances: {} residual terms: {} cutoff: {}\n", red.instances.len(), red.residuals.len(), red.cutoff);
    if let Some(dir) = &cfg.output {
        fs::create_dir_all(dir).map_err(|e| resource(format!("{}: {e}", dir.display())))?;
        for (k, t) in red.instances.iter().enumerate() {
            let p = dir.join(format!("instance-{k}.graph"));
            fs::write(&p, write_graph(&t.graph)).map_err(|e| resource(format!("{}: {e}", p.display())))?;
        }
        let p = dir.join("symbols.json");
        fs::write(&p, red.sidecar()).map_err(|e| resource(format!("{}: {e}", p.display())))?;
    }
    let mut code = EXIT_OK;
    if check {
        let n = inst.grid_size;
        let fs: Vec<GridFunction> = ensemble_member(cfg.seed, 0, inst.slots(), n)
            .map_err(|e| input(e.to_string()))?
            .into_iter()
            .map(|f| {
                let mut spec = f.spectrum().to_vec();
                spec[0] = Complex64::new(0.0, 0.0);
                GridFunction::from_spectrum(spec)
            })
            .collect::<Result<_, _>>()
            .map_err(|e| input(e.to_string()))?;
        let whole = inst.evaluate(&fs).map_err(|e| input(e.to_string()))?;
        let parts = red.evaluate_instances(&fs, n).map_err(|e| input(e.to_string()))?;
        let res = red.evaluate_residuals(&fs, n).map_err(|e| input(e.to_string()))?;
        let rel = (whole - parts - res).norm() / whole.norm().max(f64::MIN_POSITIVE);
        let vanish = red.all_vanish_at_origin(n).map_err(|e| input(e.to_string()))?;
        let _ = writeln!(s, "original: {} instances: {} residuals: {}", format_value(whole.norm()), format_value(parts.norm()), format_value(res.norm()));
        let _ = writeln!(s, "relative difference: {} symbols vanish at origin: {vanish}", format_value(rel));
        if !(rel <= 1e-10 && vanish) {
            code = EXIT_VERIFY;
        }
    }
    out.write_all(s.as_bytes()).map_err(|e| resource(e.to_string()))?;
    if code == EXIT_OK {
        Ok(())
    } else {
        Err(Failure { code, message: "reduction does not re-sum to the original".into() })
    }
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = (|| match &cli.command {
        Command::Decompose { graph, common } => cmd_decompose(graph, &resolve(common)?, out),
        Command::Verify { certificate, common } => cmd_verify(certificate, &resolve(common)?, out),
        Command::Evaluate { graph, zero, common } => cmd_evaluate(graph, *zero, &resolve(common)?, out),
        Command::Sweep { template, a_values, common } => cmd_sweep(template, a_values, &resolve(common)?, out),
        Command::ReduceCorollary { instance, check, common } => cmd_reduce(instance, *check, &resolve(common)?, out),
    })();
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
