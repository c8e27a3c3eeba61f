//! Command-line front end.
//!
//! Settings resolve as flags, then the config file (`--config` or the path
//! in `BIRKHOFF_CONFIG`), then built-in defaults. Exit codes: 0 success or
//! all residuals empty, 1 a residual is nonempty, 2 bad input or I/O.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::enumeration::{tree_class, EnumConfig, TreeClassQuery, TreeKind, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::evaluator::{EvalConfig, Evaluator, ExpansionLedger};
use crate::hamiltonian::{Kernel, ModeLattice};
use crate::oracle::{birkhoff_iterate, compare, DiffReport};
use crate::trees::{parse, render, symmetry_factor, validate_tree, AssumptionMode, RenderFormat};

pub const CONFIG_ENV: &str = "BIRKHOFF_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_RESIDUAL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "birkhoff",
    version,
    about = "Tree expansion of Birkhoff normal forms for cubic NLS"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML config file; overrides the path in BIRKHOFF_CONFIG
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// spatial dimension d
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// lattice radius: modes have coordinates in [-K, K]
    #[arg(long = "K", global = true)]
    pub radius: Option<i64>,
    /// resonance threshold: |phase| <= N is resonant
    #[arg(long = "N", global = true)]
    pub threshold: Option<u64>,
    /// maximum number of trees enumerated
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    #[arg(long = "assumption-mode", global = true, value_enum)]
    pub assumption_mode: Option<ModeArg>,
    /// output file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List a tree class
    Trees {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        ell: Option<usize>,
    },
    /// Tree expansion of the normal form after m steps, truncated at degree 2·ell
    Expand {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        ell: usize,
    },
    /// Compare the tree expansion with the brute-force iteration
    Verify {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        ell: usize,
        /// check this ledger (as written by `expand`) instead of expanding afresh
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
    /// Render one tree given in canonical form
    Render { tree: String },
    /// Tree expansion of the generator of step i
    FTransform {
        #[arg(long)]
        i: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Proof,
    Stated,
}

impl From<ModeArg> for AssumptionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Proof => AssumptionMode::ProofOrder,
            ModeArg::Stated => AssumptionMode::Stated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Latex,
    Dot,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    /// root r, degree < 2m
    Res,
    /// root o, degree = 2m
    Circ,
    /// root n, degree = 2m
    N,
    /// root o, degree in (2m, 2ell]
    CircRange,
}

/// Optional settings read from the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub dim: Option<usize>,
    #[serde(rename = "K")]
    pub radius: Option<i64>,
    #[serde(rename = "N")]
    pub threshold: Option<u64>,
    pub cap: Option<usize>,
    pub assumption_mode: Option<ModeArg>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub radius: i64,
    pub threshold: u64,
    pub cap: usize,
    pub mode: AssumptionMode,
    pub out: Option<PathBuf>,
    pub format: Option<FormatArg>,
}

impl RunConfig {
    /// `env_path` is the value of [`CONFIG_ENV`], passed in for testability.
    pub fn resolve(cli: &Cli, env_path: Option<PathBuf>) -> Result<Self> {
        let file = match cli.config.clone().or(env_path) {
            Some(p) => FileConfig::load(&p)?,
            None => FileConfig::default(),
        };
        let cfg = RunConfig {
            dim: cli.dim.or(file.dim).unwrap_or(1),
            radius: cli.radius.or(file.radius).unwrap_or(2),
            threshold: cli.threshold.or(file.threshold).unwrap_or(0),
            cap: cli.cap.or(file.cap).unwrap_or(DEFAULT_CAP),
            mode: cli
                .assumption_mode
                .or(file.assumption_mode)
                .map(Into::into)
                .unwrap_or_default(),
            out: cli.out.clone(),
            format: cli.format,
        };
        if cfg.radius < 1 {
            return Err(Error::Config(format!(
                "K must be at least 1, got {}",
                cfg.radius
            )));
        }
        ModeLattice::new(cfg.dim, cfg.radius).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    fn enum_cfg(&self) -> EnumConfig {
        EnumConfig {
            mode: self.mode,
            cap: self.cap,
        }
    }

    fn eval_cfg(&self, cutoff: usize) -> Result<EvalConfig> {
        EvalConfig::new(
            ModeLattice::new(self.dim, self.radius)?,
            self.threshold,
            cutoff,
        )
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => std::fs::write(p, text)?,
            None => {
                let mut so = std::io::stdout().lock();
                so.write_all(text.as_bytes())?;
                so.flush()?;
            }
        }
        Ok(())
    }
}

/// Entry point for the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let env_path = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    match run(&cli, env_path) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn run(cli: &Cli, env_path: Option<PathBuf>) -> Result<i32> {
    let cfg = RunConfig::resolve(cli, env_path)?;
    match &cli.command {
        Command::Trees { kind, m, ell } => cmd_trees(*kind, *m, *ell, &cfg),
        Command::Expand { m, ell } => cmd_expand(*m, *ell, &cfg),
        Command::Verify { m, ell, ledger } => cmd_verify(*m, *ell, ledger.as_deref(), &cfg),
        Command::Render { tree } => cmd_render(tree, &cfg),
        Command::FTransform { i } => cmd_f_transform(*i, &cfg),
    }
}

fn check_order(m: usize, ell: usize) -> Result<()> {
    if m == 0 || ell <= m {
        return Err(Error::Config(format!(
            "need 0 < m < ell, got m={m} ell={ell}"
        )));
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn cmd_trees(kind: KindArg, m: usize, ell: Option<usize>, cfg: &RunConfig) -> Result<i32> {
    let kind = match kind {
        KindArg::Res => TreeKind::ResBelow,
        KindArg::Circ => TreeKind::CircExact,
        KindArg::N => TreeKind::NExact,
        KindArg::CircRange => TreeKind::CircRange,
    };
    let q = TreeClassQuery {
        kind,
        m,
        ell: if kind == TreeKind::CircRange {
            ell
        } else {
            None
        },
    };
    let set = tree_class(&q, &cfg.enum_cfg())?;
    let export = set.export(cfg.mode)?;
    let text = match cfg.format.unwrap_or(FormatArg::Json) {
        FormatArg::Json => to_json(&export)?,
        FormatArg::Latex => join_renders(&set.trees, RenderFormat::Latex),
        FormatArg::Dot => join_renders(&set.trees, RenderFormat::Dot),
        FormatArg::Text => {
            let mut s = String::new();
            for (i, t) in export.trees.iter().enumerate() {
                s.push_str(&format!(
                    "{t}\tdegree {}\tS {}\n",
                    export.degrees[i], export.symmetry_factors[i]
                ));
            }
            s
        }
    };
    cfg.emit(&text)?;
    eprintln!("{q}: {} trees, degrees {:?}", set.len(), export.degrees);
    Ok(EXIT_OK)
}

fn join_renders(trees: &[crate::trees::DecoratedTree], f: RenderFormat) -> String {
    let mut s = String::new();
    for t in trees {
        s.push_str(&format!("% {t}\n"));
        s.push_str(&render(t, f));
        s.push('\n');
    }
    s
}

fn ledger_table(l: &ExpansionLedger) -> String {
    let width = l
        .entries
        .iter()
        .map(|e| e.tree.canonical().len())
        .max()
        .unwrap_or(4)
        .max(4);
    let mut s = format!("{:<width$}  {:>4}  {:>9}\n", "tree", "S", "monomials");
    for e in &l.entries {
        s.push_str(&format!(
            "{:<width$}  {:>4}  {:>9}\n",
            e.tree.canonical(),
            e.symmetry,
            e.kernel.len()
        ));
    }
    s.push_str(&format!(
        "{:<width$}  {:>4}  {:>9}\n",
        "total",
        "",
        l.total.len()
    ));
    s
}

fn emit_ledger(l: &ExpansionLedger, cfg: &RunConfig) -> Result<()> {
    match cfg.format.unwrap_or(FormatArg::Json) {
        FormatArg::Json => {
            cfg.emit(&to_json(l)?)?;
            eprint!("{}", ledger_table(l));
        }
        FormatArg::Text => cfg.emit(&ledger_table(l))?,
        other => {
            return Err(Error::Config(format!(
                "format {other:?} does not apply to ledgers"
            )))
        }
    }
    Ok(())
}

pub fn cmd_expand(m: usize, ell: usize, cfg: &RunConfig) -> Result<i32> {
    check_order(m, ell)?;
    let mut ev = Evaluator::new(cfg.eval_cfg(2 * ell)?, cfg.enum_cfg());
    let ledger = ev.normal_form(m, ell)?;
    emit_ledger(&ledger, cfg)?;
    Ok(EXIT_OK)
}

pub fn cmd_f_transform(i: usize, cfg: &RunConfig) -> Result<i32> {
    if i == 0 {
        return Err(Error::Config("generator index starts at 1".into()));
    }
    let mut ev = Evaluator::new(cfg.eval_cfg(2 * i + 2)?, cfg.enum_cfg());
    let ledger = ev.f_transform(i)?;
    emit_ledger(&ledger, cfg)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
pub struct CancellationRecord {
    pub i: usize,
    pub residual: Kernel,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub equal: bool,
    pub m: usize,
    pub ell: usize,
    pub normal_form: DiffReport,
    pub generators: Vec<DiffReport>,
    pub cancellations: Vec<CancellationRecord>,
}

pub fn cmd_verify(m: usize, ell: usize, ledger: Option<&Path>, cfg: &RunConfig) -> Result<i32> {
    check_order(m, ell)?;
    let ecfg = cfg.eval_cfg(2 * ell)?;
    let mut ev = Evaluator::new(ecfg, cfg.enum_cfg());
    let total = match ledger {
        Some(p) => load_ledger(p, m, ell, &ecfg)?,
        None => ev.normal_form(m, ell)?.total,
    };
    let run = birkhoff_iterate(m, ell, &ecfg)?;
    let normal_form = compare(&total, &run.normal_form)?;

    let mut generators = Vec::new();
    let mut cancellations = Vec::new();
    for (idx, f) in run.generators.iter().enumerate() {
        let i = idx + 1;
        let tree_f = ev.f_transform(i)?.total;
        generators.push(compare(&tree_f, f)?);
        cancellations.push(CancellationRecord {
            i,
            residual: ev.cancellation_check(i)?,
        });
    }
    let equal = normal_form.equal
        && generators.iter().all(|d| d.equal)
        && cancellations.iter().all(|c| c.residual.is_empty());
    let report = VerifyReport {
        equal,
        m,
        ell,
        normal_form,
        generators,
        cancellations,
    };
    cfg.emit(&to_json(&report)?)?;
    eprintln!(
        "verify m={m} ell={ell} K={} N={}: {}",
        cfg.radius,
        cfg.threshold,
        if equal { "equal" } else { "RESIDUAL" }
    );
    Ok(if equal { EXIT_OK } else { EXIT_RESIDUAL })
}

fn load_ledger(path: &Path, m: usize, ell: usize, ecfg: &EvalConfig) -> Result<Kernel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let ledger: ExpansionLedger = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if ledger.m != Some(m) || ledger.ell != Some(ell) || ledger.config != ecfg.into() {
        return Err(Error::Config(format!(
            "{} was written for a different run",
            path.display()
        )));
    }
    if ledger.sum_entries()? != ledger.total {
        return Err(Error::Config(format!(
            "{}: total does not match its entries",
            path.display()
        )));
    }
    Ok(ledger.total)
}

#[derive(Debug, Serialize)]
struct RenderReport {
    tree: String,
    degree: usize,
    valid: bool,
    violations: Vec<String>,
    #[serde(rename = "S", skip_serializing_if = "Option::is_none")]
    symmetry: Option<u64>,
}

pub fn cmd_render(tree: &str, cfg: &RunConfig) -> Result<i32> {
    let t = parse(tree)?;
    let text = match cfg.format.unwrap_or(FormatArg::Text) {
        FormatArg::Latex => render(&t, RenderFormat::Latex) + "\n",
        FormatArg::Dot => render(&t, RenderFormat::Dot),
        FormatArg::Text => render(&t, RenderFormat::Text),
        FormatArg::Json => {
            let rep = validate_tree(&t, cfg.mode);
            to_json(&RenderReport {
                tree: t.canonical(),
                degree: t.degree(),
                valid: rep.valid,
                violations: rep.violations.iter().map(|v| v.to_string()).collect(),
                symmetry: symmetry_factor(&t, 0, cfg.mode).ok(),
            })?
        }
    };
    cfg.emit(&text)?;
    Ok(EXIT_OK)
}
