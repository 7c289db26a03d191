//! `tvconv`: analyze chain files, print TV curves, simulate couplings,
//! audit random instances and materialize the fixtures.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tvconv::coupling::{select_switching_params, Coupler, SwitchingParams};
use tvconv::harness::{default_truncation, verify_instances, FIXTURE_NAMES};
use tvconv::structure::{is_aperiodic, Periodicity};
use tvconv::verdict::{all_reports, audit};
use tvconv::{fixture, Analysis, ChainSpecFile, ConditionReport, Distribution, Error, Kernel, Prob, Witness};

#[derive(Parser, Debug)]
#[command(name = "tvconv", version, about = "Total-variation convergence analysis of finite Markov chains")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Numerical tolerance (stochasticity, invariance, equality).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classes, invariant measures, every condition report and the audit.
    Analyze { path: PathBuf },
    /// Rows `n,tv` of d(P_n(x,.), mu).
    TvCurve {
        path: PathBuf,
        /// Start state label.
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
    /// Meeting-time histogram of the switching coupling.
    Couple {
        path: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Defaults to 50 times the number of states.
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        traces: usize,
        /// Skeleton step N; chosen automatically with `p` when omitted.
        #[arg(long, requires = "p")]
        step: Option<usize>,
        #[arg(long, requires = "step")]
        p: Option<f64>,
    },
    /// Audits seeded random chains; exit code 2 on any violation.
    Verify {
        #[arg(long, default_value_t = 500)]
        instances: usize,
        #[arg(long, default_value_t = 8)]
        max_states: usize,
    },
    /// Writes a fixture as a chain file (stdout without --out).
    Fixtures {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(FIXTURE_NAMES))]
        name: String,
        #[arg(long)]
        truncation: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::AuditViolation { .. } => Failure::Violation(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Analyze { ref path } => analyze(&cli.global, path),
        Command::TvCurve { ref path, ref state, n_max } => tv_curve(&cli.global, path, state, n_max),
        Command::Couple {
            ref path,
            ref x,
            ref y,
            horizon,
            traces,
            step,
            p,
        } => couple(&cli.global, path, x, y, horizon, traces, step.zip(p)),
        Command::Verify { instances, max_states } => verify(&cli.global, instances, max_states),
        Command::Fixtures {
            ref name,
            truncation,
            ref out,
        } => fixtures(name, truncation, out.as_ref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

struct Loaded {
    kernel: Kernel<f64>,
    mu: Distribution<f64>,
    /// The file carried no ipm and `mu` is the equal mix of the extremal ones.
    default_mu: bool,
}

fn load(global: &Global, path: &PathBuf) -> Result<Loaded, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let file = ChainSpecFile::parse(&text)?;
    let tol = global.tolerance.unwrap_or_else(f64::default_tolerance);
    let (kernel, mu) = file.to_kernel(tol)?;
    let (mu, default_mu) = match mu {
        Some(mu) => (mu, false),
        None => {
            let ipms = kernel.invariant_measures()?;
            let mut mass = vec![0.0; kernel.len()];
            for m in &ipms {
                for (acc, &v) in mass.iter_mut().zip(m.as_slice()) {
                    *acc += v / ipms.len() as f64;
                }
            }
            (Distribution::normalized(mass, tol)?, true)
        }
    };
    Ok(Loaded { kernel, mu, default_mu })
}

fn state(kernel: &Kernel<f64>, label: &str) -> Result<usize, Failure> {
    Ok(kernel.space().id(label)?)
}

fn set_label(kernel: &Kernel<f64>, states: &[usize]) -> String {
    let names: Vec<&str> = states.iter().map(|&s| kernel.space().label(s)).collect();
    format!("{{{}}}", names.join(" "))
}

fn measure_label(kernel: &Kernel<f64>, mu: &Distribution<f64>) -> String {
    let parts: Vec<String> = mu
        .support()
        .iter()
        .map(|&i| format!("{} {}", kernel.space().label(i), mu.mass(i)))
        .collect();
    parts.join(", ")
}

fn witness_label(kernel: &Kernel<f64>, w: &Witness<f64>) -> String {
    let l = |s: usize| kernel.space().label(s).to_string();
    match w {
        Witness::None => String::new(),
        Witness::CounterexamplePair { x, y, detail } => format!("fails at pair ({},{}): {detail}", l(*x), l(*y)),
        Witness::CounterexampleState { x, detail } => format!("fails at {}: {detail}", l(*x)),
        Witness::Limits { worst_state, limit } => format!("max limit distance {limit:.3e} at {}", l(*worst_state)),
        Witness::Periodic { period, cells } => {
            let cells: Vec<String> = cells.iter().map(|c| set_label(kernel, c)).collect();
            format!("{period}-periodic {}", cells.join(" "))
        }
        Witness::Irreducible { anchor, domain } => {
            format!("phi = delta_{} on {}", l(*anchor), set_label(kernel, domain))
        }
        Witness::Conjunction { parts } => {
            let parts: Vec<String> = parts.iter().map(|(n, h, _)| format!("{n}={h}")).collect();
            parts.join(" ")
        }
        Witness::AsymptoticEquivalence { x, y, witnesses } => {
            format!("pair ({},{}) with {} witnesses", l(*x), l(*y), witnesses.len())
        }
        Witness::NonSingularity { x, y, n } => format!("pair ({},{}) non-singular at n={n}", l(*x), l(*y)),
        Witness::CouplingSequence { x, y, steps } => {
            let k = steps.last().map_or(0, |s| s.k);
            format!("pair ({},{}) reaches 1-1/{} at k={k}", l(*x), l(*y), steps.last().map_or(0, |s| s.m))
        }
        Witness::CouplingAtStep { x, y, k, diagonal_mass } => {
            format!("pair ({},{}) diagonal mass {diagonal_mass:.3e} at k={k}", l(*x), l(*y))
        }
        Witness::Switching {
            step,
            p,
            x,
            y,
            meet_probability,
        } => format!(
            "N={step} p={p} meeting probability {meet_probability:.6} at ({},{})",
            l(*x),
            l(*y)
        ),
        Witness::DiagonalAtom(d) => format!("delta_{z} (x) delta_{z} at k={} from ({},{})", d.k, l(d.x), l(d.y), z = l(d.z)),
    }
}

fn analyze(global: &Global, path: &PathBuf) -> Outcome {
    let Loaded { kernel, mu, default_mu } = load(global, path)?;
    let analysis = Analysis::new(&kernel)?;
    let periodicity = is_aperiodic(&kernel, &mu)?;
    let a = audit(&kernel, &mu)?;
    // The audit recomputes the reports; keep the standalone list for output.
    let reports: Vec<ConditionReport<f64>> = all_reports(&analysis, &mu)?;
    let dec = analysis.decomposition();
    let mut out = io::stdout().lock();
    if global.json {
        let classes: Vec<_> = dec
            .classes
            .iter()
            .map(|c| {
                json!({
                    "members": c.members.iter().map(|&s| kernel.space().label(s)).collect::<Vec<_>>(),
                    "recurrent": c.recurrent,
                    "period": c.period,
                })
            })
            .collect();
        let doc = json!({
            "states": kernel.space().labels(),
            "classes": classes,
            "ipms": analysis.ipms().iter().map(|m| m.as_slice()).collect::<Vec<_>>(),
            "mu": mu.as_slice(),
            "mu_default": default_mu,
            "periodicity": periodicity,
            "reports": reports,
            "audit": a,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
    } else {
        writeln!(out, "states: {}", kernel.len())?;
        writeln!(out, "classes:")?;
        for c in &dec.classes {
            if c.recurrent {
                writeln!(
                    out,
                    "  recurrent {} period {}",
                    set_label(&kernel, &c.members),
                    c.period.unwrap_or(1)
                )?;
            } else {
                writeln!(out, "  transient {}", set_label(&kernel, &c.members))?;
            }
        }
        writeln!(out, "extremal ipms: {}", analysis.ipms().len())?;
        for m in analysis.ipms() {
            writeln!(out, "  {}", measure_label(&kernel, m))?;
        }
        let source = if default_mu { " (equal mix of extremal ipms)" } else { "" };
        writeln!(out, "mu: {}{source}", measure_label(&kernel, &mu))?;
        match &periodicity {
            Periodicity::Aperiodic => writeln!(out, "periodicity: aperiodic")?,
            Periodicity::Periodic { period, cells } => {
                let cells: Vec<String> = cells.iter().map(|c| set_label(&kernel, c)).collect();
                writeln!(out, "periodicity: {period}-periodic {}", cells.join(" "))?;
            }
        }
        writeln!(out, "conditions:")?;
        for r in &reports {
            let idx = r.condition.index().map_or("-".to_string(), |l| l.number().to_string());
            writeln!(
                out,
                "  {:<4} [{idx}] {:<5} {:<12} {}",
                r.condition.name(),
                r.holds,
                format!("{:?}", r.method),
                witness_label(&kernel, &r.witness)
            )?;
        }
        if a.is_clean() {
            writeln!(out, "audit: clean (fingerprint {:016x})", a.fingerprint)?;
        } else {
            writeln!(out, "audit: {} violation(s)", a.violations.len())?;
            for v in &a.violations {
                writeln!(out, "  {} vs {}: {}", v.left, v.right, v.detail)?;
            }
        }
    }
    drop(out);
    a.into_result()?;
    Ok(())
}

fn tv_curve(global: &Global, path: &PathBuf, label: &str, n_max: usize) -> Outcome {
    let Loaded { kernel, mu, .. } = load(global, path)?;
    let x = state(&kernel, label)?;
    let curve = Analysis::new(&kernel)?.tv_curve(x, &mu, n_max)?;
    let mut out = io::stdout().lock();
    if global.json {
        let doc = json!({ "state": label, "values": curve.values, "limit": curve.limit });
        writeln!(out, "{doc}")?;
    } else {
        writeln!(out, "n,tv")?;
        for (n, v) in curve.values.iter().enumerate() {
            writeln!(out, "{n},{v:.17e}")?;
        }
    }
    Ok(())
}

fn couple(
    global: &Global,
    path: &PathBuf,
    x: &str,
    y: &str,
    horizon: Option<usize>,
    traces: usize,
    params: Option<(usize, f64)>,
) -> Outcome {
    let Loaded { kernel, mu, .. } = load(global, path)?;
    let (x, y) = (state(&kernel, x)?, state(&kernel, y)?);
    let params = match params {
        Some((step, p)) => {
            if step == 0 || !(p > 0.0 && p <= 1.0) {
                return Err(Failure::Usage(format!("need step >= 1 and 0 < p <= 1, got {step}, {p}")));
            }
            SwitchingParams { step, p }
        }
        None => select_switching_params(&kernel, &mu),
    };
    let horizon = horizon.unwrap_or(50 * kernel.len());
    let coupler = Coupler::new(&kernel, params)?;
    let times = coupler.meeting_times(x, y, horizon, global.seed, traces)?;
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    let mut never = 0;
    for t in &times {
        match t {
            Some(t) => *hist.entry(*t).or_default() += 1,
            None => never += 1,
        }
    }
    let mut out = io::stdout().lock();
    if global.json {
        let doc = json!({
            "step": params.step,
            "p": params.p,
            "horizon": horizon,
            "traces": traces,
            "seed": global.seed,
            "histogram": hist.iter().map(|(t, c)| json!([t, c])).collect::<Vec<_>>(),
            "no_meeting": never,
        });
        writeln!(out, "{doc}")?;
    } else {
        writeln!(out, "# N={} p={} horizon={horizon} traces={traces} seed={}", params.step, params.p, global.seed)?;
        writeln!(out, "meet_time,count")?;
        for (t, c) in &hist {
            writeln!(out, "{t},{c}")?;
        }
        writeln!(out, "none,{never}")?;
        let pct = if traces == 0 { 0.0 } else { 100.0 * never as f64 / traces as f64 };
        writeln!(out, "# no meeting: {pct:.2}%")?;
    }
    Ok(())
}

fn verify(global: &Global, instances: usize, max_states: usize) -> Outcome {
    if max_states == 0 {
        return Err(Failure::Usage("--max-states must be at least 1".into()));
    }
    let outcomes = verify_instances::<f64>(instances, max_states, global.seed);
    let bad: Vec<_> = outcomes.iter().filter(|o| !o.is_clean()).collect();
    let mut out = io::stdout().lock();
    if global.json {
        let doc = json!({ "instances": instances, "failures": bad });
        writeln!(out, "{doc}")?;
    } else {
        writeln!(out, "instances: {instances}  max_states: {max_states}  seed: {}", global.seed)?;
        for o in &bad {
            match &o.error {
                Some(e) => writeln!(out, "instance {}: error: {e}", o.index)?,
                None => {
                    for v in &o.violations {
                        writeln!(
                            out,
                            "instance {} ({:016x}): {} vs {}: {}",
                            o.index, v.fingerprint, v.left, v.right, v.detail
                        )?;
                    }
                }
            }
        }
        writeln!(out, "failing instances: {}", bad.len())?;
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(format!("{} of {instances} instances failed the audit", bad.len())))
    }
}

fn fixtures(name: &str, truncation: Option<usize>, out_path: Option<&PathBuf>) -> Outcome {
    let fx = fixture::<f64>(name, truncation.unwrap_or_else(|| default_truncation(name)))?;
    let mut meta = vec![format!("fixture {name}")];
    meta.extend(fx.expected.claims.iter().map(|(d, _)| format!("expect {d}")));
    let file = ChainSpecFile::from_kernel(&fx.kernel, Some(&fx.mu), &meta);
    match out_path {
        Some(p) => fs::write(p, file.to_string())?,
        None => write!(io::stdout().lock(), "{file}")?,
    }
    Ok(())
}
