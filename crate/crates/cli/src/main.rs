mod cont;
mod sample;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use wpwb::answer::{AnsKind, ExtNonNeg};
use wpwb::capacity::{choquet, choquet_ext, parse_capacity_file, CapacityFile, CapacityFlags, InputModel};
use wpwb::eval::{eval_expr, eval_test, parse_env, parse_universe, Env, Semantics};
use wpwb::numerics::{
    enumerate_format, format_decimal, format_fraction, parse_rational, proj, rounding_boundaries, FloatE, FloatFormat, RealE,
};
use wpwb::prevision::{check_laws, Law, ParametricPrevision};
use wpwb::syntax::{parse_expr, parse_program, parse_test, FreeVars, Instr, Label, Program};
use wpwb::wp::{enumerate_exec, evaluate, wp, wp_fixpoint, LoopStatus, WpConfig, DEFAULT_FUEL, DEFAULT_MAX_ITER};

#[derive(Parser)]
#[command(name = "wpwb", version, about = "Real and float semantics, weak preconditions and Choquet integrals")]
struct Cli {
    /// Output style: readable text or one `key = value` per line.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Kv,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a program, expression or test and print its canonical form.
    Parse(ParseArgs),
    /// Evaluate an expression or test under the real and float semantics.
    Eval(EvalArgs),
    /// Compute the weak precondition of a program for a continuation.
    Wp(WpArgs),
    /// Sample the prevision laws of a program's weak precondition.
    CheckPrevision(CheckArgs),
    /// Choquet integral of a function over the outcomes of a capacity file.
    Choquet(ChoquetArgs),
    /// Enumerate the final states of every run of a program.
    Oracle(OracleArgs),
    /// List the values of a tiny float format, or the reals rounding to one.
    Format(FormatArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Program file.
    #[arg(long, group = "program_text")]
    program: Option<PathBuf>,
    /// Program text given inline.
    #[arg(long, group = "program_text")]
    source: Option<String>,
}

impl SourceArgs {
    fn load(&self) -> Result<Program> {
        let text = match (&self.program, &self.source) {
            (Some(path), _) => read(path)?,
            (None, Some(text)) => text.clone(),
            (None, None) => bail!("give a program with --program <file> or --source <text>"),
        };
        parse_program(&text).map_err(|e| anyhow!("{e}"))
    }
}

#[derive(Args)]
struct EnvArgs {
    /// Environment file with lines such as `x = 3/2` or `x = err`.
    #[arg(long)]
    env: Option<PathBuf>,
    /// Inline bindings, e.g. "x = 1/2, y = err"; they override --env.
    #[arg(long)]
    bind: Option<String>,
}

impl EnvArgs {
    fn load(&self, sem: &Semantics) -> Result<Env> {
        let mut env = match &self.env {
            Some(path) => parse_env(&read(path)?, sem).map_err(|e| anyhow!("{}: {e}", path.display()))?,
            None => Env::empty(),
        };
        if let Some(text) = &self.bind {
            let extra = parse_env(text, sem).map_err(|e| anyhow!("--bind: {e}"))?;
            for (x, v) in extra.iter() {
                env = env.with(x, v.clone());
            }
        }
        Ok(env)
    }
}

#[derive(Args)]
struct ParseArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Parse an expression instead of a program.
    #[arg(long, group = "program_text", allow_hyphen_values = true)]
    expr: Option<String>,
    /// Parse a test instead of a program.
    #[arg(long, group = "program_text", allow_hyphen_values = true)]
    test: Option<String>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("what").required(true)))]
struct EvalArgs {
    /// `real`, `binary64` or `tiny:p=P,emin=E,emax=E`; float modes also
    /// print the real result.
    #[arg(long, default_value = "real")]
    mode: String,
    #[arg(long, group = "what", allow_hyphen_values = true)]
    expr: Option<String>,
    #[arg(long, group = "what", allow_hyphen_values = true)]
    test: Option<String>,
    #[command(flatten)]
    env: EnvArgs,
}

#[derive(Args)]
struct WpArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// `indicator: <test>`, `expr: <expr>`, `const: <answer>` or `table: <file>`.
    #[arg(long)]
    cont: String,
    /// Answer domain: `bool` or `ext-nonneg`.
    #[arg(long, default_value = "ext-nonneg")]
    ans: AnsKind,
    #[arg(long, default_value = "real")]
    mode: String,
    /// Environments to evaluate at: one per line, or `x in {0, 1, 2}`
    /// lines whose product is taken.
    #[arg(long)]
    universe: Option<PathBuf>,
    #[command(flatten)]
    env: EnvArgs,
    /// Iteration budget for each loop fixpoint.
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Capacity file for an input site, as `LABEL=PATH` or `PATH` when the
    /// file names its site.
    #[arg(long)]
    capacity: Vec<String>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "real")]
    mode: String,
    /// Number of sampled environments.
    #[arg(long, default_value_t = 8)]
    envs: usize,
    /// Number of random continuations, on top of those given with --cont
    /// and a fixed set built from the program variables.
    #[arg(long, default_value_t = 12)]
    conts: usize,
    /// Number of sampled (κ, κ', α, ρ) tuples per law.
    #[arg(long, default_value_t = 500)]
    samples: usize,
    /// Seed for the sample pools.
    #[arg(long, env = "WPWB_SEED", default_value_t = 0)]
    seed: u64,
    /// Extra continuations to include, same syntax as `wp --cont`.
    #[arg(long)]
    cont: Vec<String>,
    /// Evaluate at these environments instead of sampled ones.
    #[arg(long)]
    universe: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long)]
    capacity: Vec<String>,
    /// Laws whose failure is reported as a finding (exit status 1).
    #[arg(long, value_delimiter = ',', default_value = "homogeneity,monotonicity,upper,chain_continuity")]
    expect: Vec<String>,
}

#[derive(Args)]
struct ChoquetArgs {
    /// Capacity file.
    #[arg(long)]
    capacity: PathBuf,
    /// Function values per outcome, e.g. "o1:2 o2:1"; `+inf` is allowed.
    #[arg(long)]
    f: String,
    /// Semantics the outcome values are read in.
    #[arg(long, default_value = "real")]
    mode: String,
    /// Flags the capacity must have, e.g. "monotone,convex"; a missing
    /// flag is a finding.
    #[arg(long, value_delimiter = ',')]
    expect_flags: Vec<String>,
    /// Also print the capacity's flags.
    #[arg(long)]
    show_flags: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "real")]
    mode: String,
    #[command(flatten)]
    env: EnvArgs,
    /// Instruction steps allowed along each run.
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: usize,
}

#[derive(Args)]
struct FormatArgs {
    /// `tiny:p=P,emin=E,emax=E`; binary64 is too large to list.
    #[arg(long)]
    mode: String,
    /// Print the set of reals that round to this value (or `err`).
    #[arg(long, allow_hyphen_values = true)]
    preimage: Option<String>,
}

/// What a successful run found.
enum Outcome {
    Clean,
    Findings,
}

/// Collects output either as text lines or as `key = value` pairs.
struct Report {
    format: Format,
    out: String,
}

impl Report {
    fn new(format: Format) -> Self {
        Report { format, out: String::new() }
    }

    fn human(&mut self, line: impl AsRef<str>) {
        if self.format == Format::Human {
            let _ = writeln!(self.out, "{}", line.as_ref());
        }
    }

    fn kv(&mut self, key: impl AsRef<str>, value: impl std::fmt::Display) {
        if self.format == Format::Kv {
            let _ = writeln!(self.out, "{} = {value}", key.as_ref());
        }
    }

    fn raw_kv(&mut self, text: &str) {
        if self.format == Format::Kv {
            self.out.push_str(text);
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut report = Report::new(cli.format);
    let result = match &cli.command {
        Command::Parse(a) => run_parse(a, &mut report),
        Command::Eval(a) => run_eval(a, &mut report),
        Command::Wp(a) => run_wp(a, &mut report),
        Command::CheckPrevision(a) => run_check(a, &mut report),
        Command::Choquet(a) => run_choquet(a, &mut report),
        Command::Oracle(a) => run_oracle(a, &mut report),
        Command::Format(a) => run_format(a, &mut report),
    };
    print!("{}", report.out);
    match result {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Findings) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_mode(mode: &str) -> Result<Semantics> {
    if mode == "real" {
        return Ok(Semantics::Real);
    }
    let fmt: FloatFormat = mode.parse().map_err(|e| anyhow!("--mode {mode}: {e}"))?;
    Ok(Semantics::Float(fmt))
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn run_parse(a: &ParseArgs, r: &mut Report) -> Result<Outcome> {
    if let Some(text) = &a.expr {
        let e = parse_expr(text).map_err(|e| anyhow!("{e}"))?;
        r.human(e.to_string());
        r.human(format!("free vars: {{{}}}", join(e.free_vars())));
        r.kv("expr", &e);
        r.kv("free_vars", join(e.free_vars()));
    } else if let Some(text) = &a.test {
        let t = parse_test(text).map_err(|e| anyhow!("{e}"))?;
        r.human(t.to_string());
        r.human(format!("free vars: {{{}}}", join(t.free_vars())));
        r.kv("test", &t);
        r.kv("free_vars", join(t.free_vars()));
    } else {
        let p = a.source.load()?;
        r.human(p.to_string());
        r.human(format!("labels: {}", join(p.root.labels())));
        r.human(format!("vars: {{{}}}", join(p.root.free_vars())));
        r.kv("program", &p);
        r.kv("labels", join(p.root.labels()));
        r.kv("vars", join(p.root.free_vars()));
        r.kv("has_loop", p.root.contains_loop());
        r.kv("has_input", p.root.contains_input());
    }
    Ok(Outcome::Clean)
}

fn run_eval(a: &EvalArgs, r: &mut Report) -> Result<Outcome> {
    let sem = parse_mode(&a.mode)?;
    let mut modes = vec![];
    if matches!(sem, Semantics::Float(_)) {
        modes.push(("float", sem));
    }
    modes.push(("real", Semantics::Real));
    let mut parts = vec![];
    for (name, sem) in modes {
        let env = a.env.load(&sem)?;
        let shown = if let Some(text) = &a.expr {
            let e = parse_expr(text).map_err(|e| anyhow!("{e}"))?;
            eval_expr(&sem, &e, &env)?.to_string()
        } else {
            let t = parse_test(a.test.as_deref().unwrap()).map_err(|e| anyhow!("{e}"))?;
            eval_test(&t, &env, &sem)?.to_string()
        };
        r.kv(name, &shown);
        parts.push(format!("{name}: {shown}"));
    }
    r.human(parts.join(" | "));
    Ok(Outcome::Clean)
}

fn load_inputs(specs: &[String], sem: &Semantics) -> Result<Option<InputModel>> {
    if specs.is_empty() {
        return Ok(None);
    }
    let mut model = InputModel::new();
    for spec in specs {
        let (label, path) = match spec.split_once('=') {
            Some((l, p)) => (Some(parse_label(l)?), p),
            None => (None, spec.as_str()),
        };
        let CapacityFile { site, space, capacity } =
            parse_capacity_file(&read(Path::new(path))?, sem).map_err(|e| anyhow!("{path}: {e}"))?;
        let label = label.or(site).ok_or_else(|| anyhow!("{path} names no site; pass it as LABEL={path}"))?;
        model = model.with_site(label, space, capacity).map_err(|e| anyhow!("{path}: {e}"))?;
    }
    Ok(Some(model))
}

fn parse_label(text: &str) -> Result<Label> {
    let t = text.trim();
    t.strip_prefix('^').unwrap_or(t).parse().map_err(|_| anyhow!("`{text}` is not a label"))
}

fn wp_config(sem: Semantics, kind: AnsKind, max_iter: usize, capacities: &[String]) -> Result<WpConfig> {
    if max_iter == 0 {
        bail!("--max-iter must be at least 1");
    }
    let mut cfg = WpConfig::new(sem, kind).with_max_iter(max_iter);
    if let Some(model) = load_inputs(capacities, &sem)? {
        cfg = cfg.with_inputs(model);
    }
    Ok(cfg)
}

fn run_wp(a: &WpArgs, r: &mut Report) -> Result<Outcome> {
    let sem = parse_mode(&a.mode)?;
    let program = a.source.load()?;
    let k = cont::parse_cont_spec(&a.cont, sem, a.ans)?;
    let mut cfg = wp_config(sem, a.ans, a.max_iter, &a.capacity)?;
    let envs = match &a.universe {
        Some(path) => parse_universe(&read(path)?, &sem).map_err(|e| anyhow!("{}: {e}", path.display()))?,
        None => vec![a.env.load(&sem)?],
    };

    // a loop over a finite universe is solved once for all environments
    let (w, global) = match (&*program.root, &a.universe) {
        (Instr::While { .. }, Some(_)) => {
            cfg = cfg.with_universe(envs.clone());
            let (w, status) = wp_fixpoint(&program.root, &k, &cfg)?;
            (w, Some(status))
        }
        _ => (wp(&program.root, &k, &cfg)?, None),
    };

    let mut overall = LoopStatus::Stabilized(0);
    for (i, env) in envs.iter().enumerate() {
        let (ans, status) = evaluate(&w, env)?;
        overall = match (overall, status) {
            (LoopStatus::BudgetExhausted, _) | (_, LoopStatus::BudgetExhausted) => LoopStatus::BudgetExhausted,
            (LoopStatus::Stabilized(m), LoopStatus::Stabilized(n)) => LoopStatus::Stabilized(m.max(n)),
            (s, _) => s,
        };
        if global.is_some() {
            r.human(format!("{env} -> {ans}"));
        } else {
            r.human(format!("{env} -> {ans}  [{status}]"));
            r.kv(format!("rho.{i}.status"), status);
        }
        r.kv(format!("rho.{i}.env"), env);
        r.kv(format!("rho.{i}.answer"), &ans);
    }
    let status = global.unwrap_or(overall);
    r.human(format!("status: {status}"));
    if status == LoopStatus::BudgetExhausted {
        r.human(format!("note: some loop did not stabilize within {} iterations; answers are lower bounds", a.max_iter));
    }
    r.kv("status", status);
    Ok(Outcome::Clean)
}

fn run_check(a: &CheckArgs, r: &mut Report) -> Result<Outcome> {
    let sem = parse_mode(&a.mode)?;
    let program = a.source.load()?;
    let expected: Vec<Law> = a
        .expect
        .iter()
        .map(|name| {
            Law::ALL.into_iter().find(|l| l.name() == name.trim()).ok_or_else(|| {
                anyhow!("unknown law `{name}` (expected one of {})", join(Law::ALL.iter().map(|l| l.name())))
            })
        })
        .collect::<Result<_>>()?;
    let cfg = wp_config(sem, AnsKind::ExtNonNeg, a.max_iter, &a.capacity)?;
    let f = ParametricPrevision::wp_of(&program.root, &cfg)?;
    let extra = a
        .cont
        .iter()
        .map(|s| cont::parse_cont_spec(s, sem, AnsKind::ExtNonNeg))
        .collect::<Result<Vec<_>>>()?;
    let fixed = match &a.universe {
        Some(path) => parse_universe(&read(path)?, &sem).map_err(|e| anyhow!("{}: {e}", path.display()))?,
        None => vec![],
    };
    let vars: Vec<String> = program.root.free_vars().into_iter().collect();
    let counts = sample::Counts { envs: a.envs, conts: a.conts, tuples: a.samples };
    let plan = sample::plan(&vars, sem, &counts, a.seed, fixed, extra);
    let report = check_laws(&f, &plan)?;

    r.human(format!("program: {}", program.root));
    r.human(format!(
        "samples: {} environments, {} continuations, {} tuples per law, seed {}",
        plan.envs.len(),
        plan.conts.len(),
        a.samples,
        a.seed
    ));
    r.human(report.to_string());
    let class = if report.is_linear() {
        "linear"
    } else if report.is_upper() {
        "upper"
    } else {
        "unclassified"
    };
    r.human(format!("class: {class}"));
    r.kv("seed", a.seed);
    r.kv("mode", sem);
    r.kv("samples.envs", plan.envs.len());
    r.kv("samples.conts", plan.conts.len());
    r.kv("samples.tuples", a.samples);
    r.raw_kv(&report.to_kv());

    let failed: Vec<&str> = expected.iter().filter(|l| !report.holds(**l)).map(|l| l.name()).collect();
    if failed.is_empty() {
        Ok(Outcome::Clean)
    } else {
        r.human(format!("finding: expected law falsified: {}", failed.join(", ")));
        r.kv("findings", failed.join(","));
        Ok(Outcome::Findings)
    }
}

fn flag_names(flags: &CapacityFlags) -> Vec<&'static str> {
    [
        ("monotone", flags.monotone),
        ("convex", flags.convex),
        ("concave", flags.concave),
        ("normalized", flags.normalized),
    ]
    .into_iter()
    .filter(|(_, on)| *on)
    .map(|(n, _)| n)
    .collect()
}

fn run_choquet(a: &ChoquetArgs, r: &mut Report) -> Result<Outcome> {
    let sem = parse_mode(&a.mode)?;
    let path = a.capacity.display().to_string();
    let file = parse_capacity_file(&read(&a.capacity)?, &sem).map_err(|e| anyhow!("{path}: {e}"))?;
    let n = file.space.len();
    let mut values: Vec<Option<ExtNonNeg>> = vec![None; n];
    for item in a.f.split_whitespace() {
        let (name, value) = item.split_once(':').ok_or_else(|| anyhow!("--f entry `{item}` must be `oN:value`"))?;
        let idx: usize = name
            .trim_start_matches('o')
            .parse()
            .ok()
            .filter(|i| (1..=n).contains(i))
            .ok_or_else(|| anyhow!("--f: no outcome `{name}` (outcomes are o1..o{n})"))?;
        if values[idx - 1].replace(cont::parse_ext(value)?).is_some() {
            bail!("--f: outcome `{name}` given twice");
        }
    }
    let values: Vec<ExtNonNeg> = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| anyhow!("--f: no value for outcome o{}", i + 1)))
        .collect::<Result<_>>()?;
    let result = match values.iter().map(|v| v.as_finite().cloned()).collect::<Option<Vec<_>>>() {
        Some(finite) => ExtNonNeg::Finite(choquet(&finite, &file.capacity)?),
        None => choquet_ext(&values, &file.capacity)?,
    };
    let flags = file.capacity.flags();
    let names = flag_names(&flags);
    r.human(result.to_string());
    if a.show_flags {
        r.human(format!("flags: {}", join(&names)));
    }
    r.kv("choquet", &result);
    if let Some(q) = result.as_finite() {
        r.kv("choquet.exact", format_fraction(q));
    }
    for (name, on) in [
        ("monotone", flags.monotone),
        ("convex", flags.convex),
        ("concave", flags.concave),
        ("normalized", flags.normalized),
    ] {
        r.kv(format!("flags.{name}"), on);
    }
    let mut missing = vec![];
    for want in &a.expect_flags {
        let want = want.trim();
        if !["monotone", "convex", "concave", "normalized"].contains(&want) {
            bail!("unknown flag `{want}` (expected monotone, convex, concave or normalized)");
        }
        if !names.contains(&want) {
            missing.push(want.to_string());
        }
    }
    if missing.is_empty() {
        Ok(Outcome::Clean)
    } else {
        r.human(format!("finding: capacity is not {}", missing.join(", ")));
        r.kv("findings", missing.join(","));
        Ok(Outcome::Findings)
    }
}

fn run_oracle(a: &OracleArgs, r: &mut Report) -> Result<Outcome> {
    let sem = parse_mode(&a.mode)?;
    let program = a.source.load()?;
    let env = a.env.load(&sem)?;
    let result = enumerate_exec(&program.root, &env, &sem, a.fuel)?;
    for (i, fin) in result.finals.iter().enumerate() {
        r.human(fin.to_string());
        r.kv(format!("final.{i}"), fin);
    }
    r.human(format!("finals: {}, exhausted: {}", result.finals.len(), result.exhausted));
    r.kv("finals", result.finals.len());
    r.kv("exhausted", result.exhausted);
    Ok(Outcome::Clean)
}


fn run_format(a: &FormatArgs, r: &mut Report) -> Result<Outcome> {
    let fmt: FloatFormat = a.mode.parse().map_err(|e| anyhow!("--mode {}: {e}", a.mode))?;
    if let Some(text) = &a.preimage {
        let f = match text.trim() {
            "err" => FloatE::Err,
            t => {
                let q = parse_rational(t).map_err(|e| anyhow!("--preimage {t}: {e}"))?;
                if !fmt.is_representable(&q) {
                    bail!("{t} is not a value of {fmt}");
                }
                proj(&fmt, &RealE::Num(q))
            }
        };
        let pre = rounding_boundaries(&fmt, &f);
        r.human(format!("{f} <- {pre}"));
        r.kv("value", f);
        r.kv("preimage", pre);
        return Ok(Outcome::Clean);
    }
    let values = enumerate_format(&fmt)?;
    r.human(format!("[{}]", join(&values)));
    r.human(format!("{} values, F_max = {}", values.len(), format_decimal(&fmt.f_max())));
    r.kv("values", join(&values));
    r.kv("count", values.len());
    r.kv("f_max", format_decimal(&fmt.f_max()));
    Ok(Outcome::Clean)
}
