//! The `distcrn` command line.
//!
//! Exit codes: 0 success, 1 verification failed, 2 bad input, 3 state cap.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    self, compare, explore, format_f64, histogram_tsv, l1_f64, occupation_time, output_marginals, ssa_run,
    steady_json, steady_lines, steady_state_with, trajectory_json, trajectory_lines, AnalysisError,
    SsaOptions, SteadyOptions,
};
use crate::calculus::{eval, parse_formula_file, Environment, Formula};
use crate::compiler::{
    compile_direct, compile_direct_ratefree, compile_joint, compile_truncated,
    translate_with_manifest, CompileOptions, Manifest,
};
use crate::crn::{format_crn, parse_crn, Crs};
use crate::pmf::{format_pmf, geometric, parse_pmf, poisson_approx, Pmf, TailSource};
use crate::rational::{format_rational, parse_rational, to_f64, Rational};

#[derive(Debug, Parser)]
#[command(name = "distcrn", version, about = "Compile distributions into chemical reaction networks and check them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a formula to its exact pmf.
    Eval(EvalArgs),
    /// Compile a formula or pmf file to a reaction network.
    Compile(CompileArgs),
    /// Long-run distribution of a network, exact where feasible.
    Steady(SteadyArgs),
    /// Stochastic simulation of a network.
    Simulate(SimulateArgs),
    /// Compile a formula, solve the network, and compare with the formula's pmf.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct EnvArgs {
    /// Bind an environment variable, e.g. `--env c=1/2`.
    #[arg(long = "env", value_name = "NAME=VALUE", value_parser = parse_binding)]
    env: Vec<(String, Rational)>,
}

#[derive(Debug, Args)]
struct CompileFlags {
    /// Use equal rates, encoding weights in initial counts.
    #[arg(long)]
    rate_free: bool,
    /// Fast/slow rate ratio for environment-dependent choices.
    #[arg(long, value_name = "R", value_parser = parse_rational_arg)]
    rho: Option<Rational>,
}

impl CompileFlags {
    fn options(&self) -> CompileOptions {
        let mut opts = CompileOptions { rate_free: self.rate_free, ..CompileOptions::default() };
        if let Some(rho) = &self.rho {
            opts.rho = rho.clone();
        }
        opts
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    input: PathBuf,
    #[command(flatten)]
    env: EnvArgs,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompileArgs {
    /// Formula file, `.pmf` file, or `geometric:P` / `poisson:MEAN` with `--epsilon`.
    input: String,
    #[command(flatten)]
    env: EnvArgs,
    #[command(flatten)]
    flags: CompileFlags,
    /// Compile the pmf directly instead of translating the formula.
    #[arg(long)]
    direct: bool,
    /// Truncate to keep all but less than this much mass.
    #[arg(long, value_name = "A/B", value_parser = parse_rational_arg)]
    epsilon: Option<Rational>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Lines,
    Json,
    Tsv,
}

#[derive(Debug, Args)]
struct SteadyArgs {
    input: PathBuf,
    #[arg(long, value_name = "N", default_value_t = analysis::DEFAULT_CAP)]
    cap: usize,
    /// Fire non-competing reactions eagerly; exact for absorbing networks.
    #[arg(long)]
    reduce: bool,
    /// Largest bottom component solved in exact arithmetic.
    #[arg(long, value_name = "N", default_value_t = SteadyOptions::default().exact_limit)]
    exact_limit: usize,
    #[arg(long, value_enum, default_value_t = Format::Lines)]
    format: Format,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    input: PathBuf,
    #[arg(long, value_name = "N", default_value_t = 1000)]
    trials: u64,
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "F", default_value_t = f64::INFINITY)]
    tmax: f64,
    #[arg(long, value_name = "N", default_value_t = 10_000_000)]
    step_cap: u64,
    #[arg(long, value_name = "N", default_value_t = 1)]
    threads: usize,
    /// Time-average this species along one long trajectory instead.
    #[arg(long, value_name = "SPECIES")]
    occupation: Option<String>,
    #[arg(long, value_name = "N", default_value_t = 1_000_000)]
    jumps: u64,
    #[arg(long, value_name = "F", default_value_t = 0.1)]
    burn_in: f64,
    #[arg(long, value_enum, default_value_t = Format::Lines)]
    format: Format,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    input: PathBuf,
    #[command(flatten)]
    env: EnvArgs,
    #[command(flatten)]
    flags: CompileFlags,
    /// Compile the evaluated pmf directly instead of translating.
    #[arg(long)]
    direct: bool,
    /// Check this network instead of compiling the formula.
    #[arg(long, value_name = "PATH")]
    crn: Option<PathBuf>,
    #[arg(long, value_name = "A/B", default_value = "0", value_parser = parse_rational_arg)]
    tol: Rational,
    #[arg(long, value_name = "N", default_value_t = analysis::DEFAULT_CAP)]
    cap: usize,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// Why a command stopped, with its exit code.
#[derive(Debug)]
enum Failure {
    Verify(String),
    Input(String),
    Cap(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Verify(_) => 1,
            Failure::Input(_) => 2,
            Failure::Cap(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verify(m) | Failure::Input(m) | Failure::Cap(m) => m,
        }
    }
}

fn bad(context: &str, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{context}: {e}"))
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::StateCapExceeded(_) => Failure::Cap(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn parse_binding(s: &str) -> Result<(String, Rational), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let value = parse_rational(value).ok_or_else(|| format!("invalid rational `{value}`"))?;
    Ok((name.trim().to_string(), value))
}

fn parse_rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("invalid rational `{s}`"))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn environment(args: &EnvArgs) -> Result<Environment, Failure> {
    let mut env = Environment::new();
    for (name, value) in &args.env {
        env.bind(name.clone(), value.clone()).map_err(|e| bad("--env", e))?;
    }
    Ok(env)
}

fn formula(path: &Path) -> Result<Formula, Failure> {
    parse_formula_file(&read(path)?).map_err(|e| bad(&path.display().to_string(), e))
}

fn network(path: &Path) -> Result<Crs, Failure> {
    Ok(parse_crn(&read(path)?)
        .map_err(|e| bad(&path.display().to_string(), e))?
        .crs)
}

fn emit(out: &mut dyn Write, target: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match target {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let f = formula(&args.input)?;
    let pmf = eval(&f, &environment(&args.env)?).map_err(|e| bad("eval", e))?;
    emit(out, &args.out, &format_pmf(&pmf))
}

fn tail_source(spec: &str) -> Option<Result<TailSource, Failure>> {
    let (kind, value) = spec.split_once(':')?;
    let parsed = parse_rational(value).ok_or_else(|| Failure::Input(format!("invalid parameter `{value}`")));
    match kind {
        "geometric" => Some(parsed.map(geometric)),
        "poisson" => Some(parsed.map(|mean| poisson_approx(mean, 128))),
        _ => None,
    }
}

fn compile_pmf(pmf: &Pmf, args: &CompileArgs) -> Result<(Crs, Manifest), Failure> {
    if let Some(eps) = &args.epsilon {
        pmf.require_univariate().map_err(|e| bad("compile", e))?;
        let points = pmf.iter1().map(|(v, p)| (v, p.clone())).collect::<Vec<_>>();
        let (crs, t) = compile_truncated(points, eps).map_err(|e| bad("compile", e))?;
        let manifest = Manifest { mass_lost: Some(t.mass_lost), ..Manifest::for_network(&crs) };
        return Ok((crs, manifest));
    }
    let crs = if pmf.dim() > 1 {
        compile_joint(pmf)
    } else if args.flags.rate_free {
        compile_direct_ratefree(pmf)
    } else {
        compile_direct(pmf)
    }
    .map_err(|e| bad("compile", e))?;
    let manifest = Manifest::for_network(&crs);
    Ok((crs, manifest))
}

fn cmd_compile(args: &CompileArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (crs, manifest) = if let Some(source) = tail_source(&args.input) {
        let eps = args
            .epsilon
            .as_ref()
            .ok_or_else(|| Failure::Input(format!("`{}` has infinite support; pass --epsilon", args.input)))?;
        let (crs, t) = compile_truncated(source?, eps).map_err(|e| bad("compile", e))?;
        let manifest = Manifest { mass_lost: Some(t.mass_lost), ..Manifest::for_network(&crs) };
        (crs, manifest)
    } else if args.input.ends_with(".pmf") {
        let path = Path::new(&args.input);
        let pmf = parse_pmf(&read(path)?).map_err(|e| bad(&args.input, e))?;
        compile_pmf(&pmf, args)?
    } else {
        let f = formula(Path::new(&args.input))?;
        let env = environment(&args.env)?;
        if args.direct || args.epsilon.is_some() {
            let pmf = eval(&f, &env).map_err(|e| bad("eval", e))?;
            compile_pmf(&pmf, args)?
        } else {
            translate_with_manifest(&f, &env, &args.flags.options()).map_err(|e| bad("compile", e))?
        }
    };
    emit(out, &args.out, &format_crn(&crs, &manifest.entries()))
}

fn cmd_steady(args: &SteadyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let crs = network(&args.input)?;
    let opts = SteadyOptions { exact_limit: args.exact_limit, ..SteadyOptions::default() };
    let (sp, report) = if args.reduce {
        analysis::solve_absorbing(&crs, args.cap)?
    } else {
        let sp = explore(&crs, args.cap)?;
        let report = steady_state_with(&sp, &opts);
        (sp, report)
    };
    let marginals = output_marginals(&crs, &report)?;
    let text = match args.format {
        Format::Json => format!("{:#}\n", steady_json(sp.len(), &report, &marginals)),
        Format::Lines | Format::Tsv => steady_lines(sp.len(), &report, &marginals),
    };
    emit(out, &args.out, &text)
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let crs = network(&args.input)?;
    if let Some(species) = &args.occupation {
        let occ = occupation_time(&crs, species, args.seed, args.jumps, args.burn_in)?;
        let mut text = format!(
            "jumps {}\nburn_in_jumps {}\nobserved_time {}\n",
            occ.jumps,
            occ.burn_in_jumps,
            format_f64(occ.observed_time)
        );
        for (v, p) in &occ.distribution {
            text.push_str(&format!("{v} : {}\n", format_f64(*p)));
        }
        return emit(out, &args.out, &text);
    }
    let opts = SsaOptions {
        trials: args.trials,
        seed: args.seed,
        t_max: args.tmax,
        step_cap: args.step_cap,
        threads: args.threads,
        ..SsaOptions::default()
    };
    let stats = ssa_run(&crs, &opts)?;
    let text = match args.format {
        Format::Lines => trajectory_lines(&stats),
        Format::Json => format!("{:#}\n", trajectory_json(&stats)),
        Format::Tsv => {
            let mut s = String::new();
            for (name, h) in stats.species.iter().zip(&stats.histograms) {
                if stats.species.len() > 1 {
                    s.push_str(&format!("# {name}\n"));
                }
                s.push_str(&histogram_tsv(h));
            }
            s
        }
    };
    emit(out, &args.out, &text)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let f = formula(&args.input)?;
    let env = environment(&args.env)?;
    let target = eval(&f, &env).map_err(|e| bad("eval", e))?;
    let crs = match &args.crn {
        Some(path) => network(path)?,
        None if args.direct => if args.flags.rate_free {
            compile_direct_ratefree(&target)
        } else {
            compile_direct(&target)
        }
        .map_err(|e| bad("compile", e))?,
        None => translate_with_manifest(&f, &env, &args.flags.options())
            .map_err(|e| bad("compile", e))?
            .0,
    };
    let (sp, report) = analysis::solve_absorbing(&crs, args.cap)?;
    if crs.outputs().len() != 1 {
        return Err(AnalysisError::OutputCount(crs.outputs().len()).into());
    }
    let (l1, ratio, pass) = match report.distribution.exact() {
        Some(_) => {
            let cmp = compare(&target, &analysis::joint_output(&crs, &report)?)?;
            let pass = cmp.l1 <= args.tol;
            (format_rational(&cmp.l1), format_rational(&cmp.ratio), pass)
        }
        None => {
            let got = output_marginals(&crs, &report)?.remove(0).1.to_f64();
            let want: BTreeMap<u64, f64> = target.iter1().map(|(v, p)| (v, to_f64(p))).collect();
            let l1 = l1_f64(&want, &got);
            (format_f64(l1), format_f64(ratio_f64(&want, &got)), l1 <= to_f64(&args.tol))
        }
    };
    let text = format!(
        "method {}\nstates {}\nl1 {l1}\nratio {ratio}\ntolerance {}\nverdict {}\n",
        report.method.name(),
        sp.len(),
        format_rational(&args.tol),
        if pass { "pass" } else { "fail" }
    );
    emit(out, &args.out, &text)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "L1 distance {l1} exceeds tolerance {}",
            format_rational(&args.tol)
        )))
    }
}

/// Float counterpart of the ratio measure in [`compare`].
fn ratio_f64(a: &BTreeMap<u64, f64>, b: &BTreeMap<u64, f64>) -> f64 {
    a.keys()
        .chain(b.keys())
        .map(|k| {
            let (x, y) = (a.get(k).copied().unwrap_or(0.0), b.get(k).copied().unwrap_or(0.0));
            if x.max(y) == 0.0 {
                1.0
            } else {
                x.min(y) / x.max(y)
            }
        })
        .fold(1.0, f64::min)
}

/// Runs the command line given by `args` (program name first) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                return 2;
            }
            let _ = out.write_all(text.as_bytes());
            return 0;
        }
    };
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a, out),
        Command::Compile(a) => cmd_compile(a, out),
        Command::Steady(a) => cmd_steady(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(failure) => {
            let _ = writeln!(err, "distcrn: {}", failure.message());
            failure.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["distcrn"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn file(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
        let path = dir.path().join(name);
        fs::write(&path, text).unwrap();
        path.to_str().unwrap().to_string()
    }

    #[test]
    fn eval_bernoulli_and_one() {
        let dir = tempfile::tempdir().unwrap();
        let bern = file(&dir, "bern.dcal", "(one)_[1/3]:(zero)\n");
        assert_eq!(call(&["eval", &bern]), (0, "0 : 2/3\n1 : 1/3\n".into(), String::new()));
        let one = file(&dir, "one.dcal", "one");
        assert_eq!(call(&["eval", &one]).1, "1 : 1/1\n");
    }

    #[test]
    fn input_errors_exit_two() {
        let dir = tempfile::tempdir().unwrap();
        let bad = file(&dir, "bad.dcal", "one +");
        assert_eq!(call(&["eval", &bad]).0, 2);
        let free = file(&dir, "free.dcal", "(one)_[c]:(zero)");
        let (code, _, err) = call(&["eval", &free]);
        assert_eq!(code, 2);
        assert!(err.contains("unbound variable `c`"));
        assert_eq!(call(&["eval", &free, "--env", "c=3/2"]).0, 2);
        assert_eq!(call(&["eval", "/nonexistent/x.dcal"]).0, 2);
        assert_eq!(call(&["bogus"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn compile_direct_pmf() {
        let dir = tempfile::tempdir().unwrap();
        let pmf = file(&dir, "ex1.pmf", "2 : 1/6\n5 : 1/3\n10 : 1/2\n");
        let (code, text, _) = call(&["compile", &pmf, "--direct"]);
        assert_eq!(code, 0);
        let doc = parse_crn(&text).unwrap();
        assert_eq!(doc.crs.reactions().len(), 6);
        assert_eq!(doc.manifest_value("leaders"), Some("z"));
        let (_, text, _) = call(&["compile", "geometric:1/2", "--epsilon", "1/8"]);
        assert_eq!(parse_crn(&text).unwrap().manifest_value("massLost"), Some("1/16"));
        assert_eq!(call(&["compile", "geometric:1/2"]).0, 2);
    }

    #[test]
    fn steady_cap_exits_three() {
        let dir = tempfile::tempdir().unwrap();
        let crn = file(&dir, "u.crn", "init l1 = 10\nrxn l1 -> l2\nrxn l2 -> l1\noutput l1\n");
        let (code, text, _) = call(&["steady", &crn]);
        assert_eq!(code, 0);
        assert!(text.contains("method exact-rational-stationary"));
        assert_eq!(call(&["steady", &crn, "--cap", "3"]).0, 3);
    }

    #[test]
    fn verify_passes_and_fails() {
        let dir = tempfile::tempdir().unwrap();
        let f = file(&dir, "f.dcal", "(2*one)_[1/3]:(min(one + one, 3*one) + one)");
        let (code, text, _) = call(&["verify", &f, "--tol", "0"]);
        assert_eq!(code, 0, "{text}");
        assert!(text.contains("verdict pass"));
        let wrong = file(&dir, "w.crn", "init out = 2\noutput out\n");
        let (code, text, _) = call(&["verify", &f, "--crn", &wrong]);
        assert_eq!(code, 1);
        assert!(text.contains("verdict fail"));
    }

    #[test]
    fn simulate_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let pmf = file(&dir, "ex1.pmf", "2 : 1/6\n5 : 1/3\n10 : 1/2\n");
        let crn = dir.path().join("ex1.crn");
        let crn = crn.to_str().unwrap();
        assert_eq!(call(&["compile", &pmf, "--out", crn]).0, 0);
        let a = call(&["simulate", crn, "--trials", "200", "--seed", "42"]);
        let b = call(&["simulate", crn, "--trials", "200", "--seed", "42", "--threads", "3"]);
        assert_eq!(a, b);
        assert!(a.1.contains("stop quiescent 200"));
    }
}
