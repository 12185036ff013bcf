mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ellfermat::arith::sieve;
use ellfermat::cm;
use ellfermat::compositeness::{even_denominator_verdict, theorem18_conditions, ConditionBounds};
use ellfermat::fermat::{
    coprimality_check, generate_cached, growth_report, parity_audit, tau_magnitudes, verify_tau_invariants,
    DEFAULT_DIGIT_BUDGET,
};
use ellfermat::order::cross_validate;
use ellfermat::tau::{tau_for_all_k, TauOptions, DEFAULT_SEARCH_BOUND};
use ellfermat::{
    generate_direct, Curve, CurveSpec, Error, FactorBudget, FermatState, GenerateOptions, Integer, QPoint,
};
use serde_json::json;

use output::{digest, Out};

/// Gap allowed between ln(F_k)/4^k and 3/8 of the height ratio at the last k.
const GROWTH_TOLERANCE: f64 = 1e-2;

#[derive(Parser, Debug)]
#[command(
    name = "ellfermat",
    version,
    about = "Elliptic Fermat numbers: generation and verification"
)]
struct Cli {
    /// Emit JSON lines instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized factoring and primality rounds
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Abort when e_k would exceed this many decimal digits
    #[arg(long = "budget-digits", global = true, default_value_t = DEFAULT_DIGIT_BUDGET)]
    budget_digits: u64,

    /// Largest |y| in the quartic Thue search
    #[arg(long = "thue-bound", global = true, default_value_t = 10_000)]
    thue_bound: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SeqArgs {
    /// Curve file: {"a", "b", "c", "P": {"m", "n", "e"}, "T"?}
    #[arg(long)]
    curve: Option<PathBuf>,

    /// Last index k
    #[arg(long, default_value_t = 5)]
    kmax: u32,

    /// JSON-lines cache of rows, created or extended as needed
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute rows 0..=kmax and print F_k
    Generate(SeqArgs),
    /// Run one verification over the rows
    Verify {
        which: Check,
        #[command(flatten)]
        seq: SeqArgs,
        /// Primes below this bound are used by `verify order`
        #[arg(long, default_value_t = 2000)]
        primes_below: u32,
    },
    /// The curve y^2 = x^3 - 2x with P = (2, 2)
    Cm {
        #[command(subcommand)]
        command: CmCommand,
    },
    /// Compositeness conditions (needs "T" in the curve file unless some e_k is even)
    Primality(SeqArgs),
    /// |tau_k| from the periodic schedule, checked against the definition
    Tau {
        #[command(flatten)]
        seq: SeqArgs,
        /// Largest multiple of P searched when building the schedule
        #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND)]
        search_bound: u32,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    Coprime,
    Parity,
    Order,
    Tau,
    Growth,
    Primality,
    CmAudit,
    CmTable,
}

#[derive(Subcommand, Debug)]
enum CmCommand {
    /// Frobenius traces for odd primes up to a bound
    Trace {
        #[arg(long, default_value_t = 100)]
        max_p: u32,
    },
    /// Congruence classes of the prime factors of F_n
    Audit {
        #[arg(long, default_value_t = 4)]
        n: u32,
    },
    /// Index n with q | F_n for a Fermat or Mersenne prime q
    Locate {
        #[arg(long)]
        prime: String,
    },
    /// Factor F_0..=kmax and compare with the reference table
    Table {
        #[arg(long, default_value_t = 5)]
        kmax: u32,
    },
}

/// Outcome of a subcommand that ran to completion.
enum Status {
    Ok,
    Failed(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out::new(cli.json);
    match run(&cli, &out) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed(what)) => {
            eprintln!("verification failed: {what}");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DigitBudget { .. } => 3,
        Error::Verification(_) | Error::InconsistentTau(_) | Error::Cache(_) => 4,
        _ => 2,
    }
}

fn load_curve(path: Option<&Path>) -> ellfermat::Result<(Curve, QPoint, Option<QPoint>)> {
    let path = path.ok_or_else(|| Error::Precondition("--curve is required".into()))?;
    let text = std::fs::read_to_string(path)?;
    let spec: CurveSpec = serde_json::from_str(&text)?;
    spec.load()
}

fn gen_opts(cli: &Cli) -> GenerateOptions {
    GenerateOptions {
        digit_budget: cli.budget_digits,
        ..Default::default()
    }
}

fn rows(cli: &Cli, seq: &SeqArgs, curve: &Curve, p: &QPoint) -> ellfermat::Result<Vec<FermatState>> {
    match &seq.cache {
        Some(path) => generate_cached(curve, p, seq.kmax, &gen_opts(cli), &ellfermat::SequenceCache::new(path)),
        None => generate_direct(curve, p, seq.kmax, &gen_opts(cli)),
    }
}

fn status(failures: &[String]) -> Status {
    match failures.first() {
        None => Status::Ok,
        Some(f) => Status::Failed(f.clone()),
    }
}

fn run(cli: &Cli, out: &Out) -> ellfermat::Result<Status> {
    match &cli.command {
        Command::Generate(seq) => generate(cli, out, seq),
        Command::Verify {
            which,
            seq,
            primes_below,
        } => verify(cli, out, *which, seq, *primes_below),
        Command::Cm { command } => cm_command(cli, out, command),
        Command::Primality(seq) => primality(cli, out, seq),
        Command::Tau { seq, search_bound } => tau(cli, out, seq, *search_bound),
    }
}

fn generate(cli: &Cli, out: &Out, seq: &SeqArgs) -> ellfermat::Result<Status> {
    let (curve, p, _) = load_curve(seq.curve.as_deref())?;
    let rows = match rows(cli, seq, &curve, &p) {
        Err(Error::DigitBudget { k, budget, partial }) => {
            for s in partial.iter() {
                print_row(out, s);
            }
            return Err(Error::DigitBudget { k, budget, partial });
        }
        r => r?,
    };
    for s in &rows {
        print_row(out, s);
    }
    Ok(Status::Ok)
}

fn print_row(out: &Out, s: &FermatState) {
    let text = s.f.to_string();
    let digits = text.len();
    let shown = if digits <= 120 { text } else { digest(&text) };
    out.line(
        &json!({ "k": s.k, "digits": digits, "F": shown, "tau": s.tau.as_ref().map(Integer::to_string) }),
        || format!("k = {:>2}  digits = {digits:>8}  F = {shown}", s.k),
    );
}

fn verify(cli: &Cli, out: &Out, which: Check, seq: &SeqArgs, primes_below: u32) -> ellfermat::Result<Status> {
    match which {
        Check::CmAudit => return cm_audit(cli, out, seq.kmax),
        Check::CmTable => return cm_table(cli, out, seq.kmax),
        Check::Primality => return primality(cli, out, seq),
        _ => {}
    }
    let (curve, p, _) = load_curve(seq.curve.as_deref())?;
    let states = rows(cli, seq, &curve, &p)?;
    match which {
        Check::Coprime => {
            let r = coprimality_check(&states)?;
            out.report(&r, || {
                format!("coprime: {} pairs, regime {:?}", r.pairs.len(), r.regime)
            });
            Ok(status(&r.failures))
        }
        Check::Parity => {
            let r = parity_audit(&states);
            out.report(&r, || {
                format!(
                    "parity: {} rows, exceptional k = {:?}",
                    r.rows.len(),
                    r.exceptional().collect::<Vec<_>>()
                )
            });
            Ok(status(&r.failures))
        }
        Check::Order => {
            let six_disc = Integer::from(curve.disc() * 6u32);
            let primes: Vec<Integer> = sieve(primes_below.saturating_sub(1))
                .into_iter()
                .map(Integer::from)
                .filter(|q| !six_disc.is_divisible(q))
                .collect();
            let r = cross_validate(&curve, &states, &primes)?;
            out.report(&r, || format!("order: {} primes cross-checked", r.rows.len()));
            Ok(status(&r.failures))
        }
        Check::Tau => {
            let inv = verify_tau_invariants(&curve, &states);
            let opts = TauOptions {
                digit_budget: cli.budget_digits,
                ..Default::default()
            };
            let sched = tau_for_all_k(&curve, &p, seq.kmax, &opts)?;
            let defn = tau_magnitudes(&states);
            let mut failures = inv.failures.clone();
            if sched.values() != defn {
                failures.push("schedule disagrees with tau_k = 2 n_(k-1) / F_k".into());
            }
            let values: Vec<String> = defn.iter().map(Integer::to_string).collect();
            out.report(&json!({ "tau": values, "invariants": inv, "schedule": sched }), || {
                format!("tau: |tau_k| = {values:?}")
            });
            Ok(status(&failures))
        }
        Check::Growth => {
            let g = growth_report(&states)?;
            let mut failures = Vec::new();
            if !g.monotone_from_five {
                failures.push("successive differences do not shrink from k = 5".into());
            }
            if g.gap >= GROWTH_TOLERANCE {
                failures.push(format!("gap {} exceeds {GROWTH_TOLERANCE}", g.gap));
            }
            out.report(&g, || {
                format!(
                    "growth: r_K = {:.6}, target = {:.6}, gap = {:.3e}",
                    g.ratios.last().unwrap(),
                    g.target,
                    g.gap
                )
            });
            Ok(status(&failures))
        }
        Check::CmAudit | Check::CmTable | Check::Primality => unreachable!(),
    }
}

fn factor_budget(cli: &Cli) -> FactorBudget {
    FactorBudget {
        seed: cli.seed,
        ..FactorBudget::thorough()
    }
}

fn cm_table(cli: &Cli, out: &Out, kmax: u32) -> ellfermat::Result<Status> {
    let rows = cm::reproduce_table(kmax, &factor_budget(cli))?;
    let cmp = cm::compare_with_reference(&rows);
    for (row, c) in rows.iter().zip(&cmp) {
        out.line(&json!({ "row": row, "comparison": c }), || {
            format!(
                "{:>2}  {}  {}",
                row.n,
                row.factorization,
                if c.matches { "ok" } else { "MISMATCH" }
            )
        });
    }
    let failures: Vec<String> = cmp
        .iter()
        .filter(|c| !c.matches)
        .map(|c| format!("row {} differs from the reference", c.n))
        .collect();
    Ok(status(&failures))
}

fn cm_audit(cli: &Cli, out: &Out, n: u32) -> ellfermat::Result<Status> {
    let rows = cm::reproduce_table(n, &factor_budget(cli))?;
    let audits = cm::congruence_audit(&rows, true)?;
    let mut failures = Vec::new();
    for a in &audits {
        out.line(a, || {
            let classes: Vec<String> = a
                .factors
                .iter()
                .map(|f| format!("{} (mod 4 = {}, mod 2^{} = {})", f.p, f.mod4, a.n, f.mod_2n))
                .collect();
            format!("n = {}: {}", a.n, classes.join(", "))
        });
        if !a.passed() {
            failures.push(format!("congruence fails in row {}", a.n));
        }
    }
    Ok(status(&failures))
}

fn cm_command(cli: &Cli, out: &Out, command: &CmCommand) -> ellfermat::Result<Status> {
    match command {
        CmCommand::Trace { max_p } => {
            for p in sieve(*max_p).into_iter().filter(|&p| p > 2) {
                let t = cm::trace(&Integer::from(p))?;
                out.line(&t, || {
                    format!("p = {p}: a_p = {}, #E = {} ({:?})", t.a_p, t.group_order, t.branch)
                });
            }
            Ok(Status::Ok)
        }
        CmCommand::Audit { n } => cm_audit(cli, out, *n),
        CmCommand::Locate { prime } => {
            let q: Integer = prime
                .parse()
                .map_err(|_| Error::Precondition(format!("not an integer: {prime}")))?;
            let loc = cm::special_prime_locator(&q)?;
            out.line(&loc, || {
                format!(
                    "{} divides F_{} (bound {}, {})",
                    loc.q,
                    loc.n,
                    loc.bound,
                    if loc.bound_satisfied {
                        "satisfied"
                    } else {
                        "not satisfied"
                    }
                )
            });
            Ok(Status::Ok)
        }
        CmCommand::Table { kmax } => cm_table(cli, out, *kmax),
    }
}

fn primality(cli: &Cli, out: &Out, seq: &SeqArgs) -> ellfermat::Result<Status> {
    let (curve, p, t) = load_curve(seq.curve.as_deref())?;
    let states = rows(cli, seq, &curve, &p)?;
    let even = even_denominator_verdict(&states);
    if even.first_even.is_some() {
        out.report(&even, || {
            let rows: Vec<String> = even.rows.iter().map(|r| format!("F_{}: {:?}", r.k, r.class)).collect();
            format!(
                "even denominator from k = {}: {}",
                even.first_even.unwrap(),
                rows.join(", ")
            )
        });
        return Ok(status(&even.failures));
    }
    let t = t.ok_or_else(|| Error::Precondition("all e_k odd; the curve file needs a 2-torsion point \"T\"".into()))?;
    let bounds = ConditionBounds {
        k_check: seq.kmax.max(1),
        thue_bound: cli.thue_bound,
        k_witness: seq.kmax.min(5),
        digit_budget: cli.budget_digits,
        ..Default::default()
    };
    let r = theorem18_conditions(&curve, &p, &t, &bounds)?;
    out.report(&r, || {
        let mut lines: Vec<String> = r
            .conditions
            .iter()
            .map(|c| format!("({}) {}: {}", c.id, if c.passed { "pass" } else { "FAIL" }, c.evidence))
            .collect();
        for w in &r.witnesses {
            lines.push(format!(
                "F_{} = {} * {}",
                w.k,
                digest(&w.divisor.to_string()),
                digest(&w.cofactor.to_string())
            ));
        }
        lines.join("\n")
    });
    let mut failures: Vec<String> = r
        .conditions
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("condition ({}) fails: {}", c.id, c.evidence))
        .collect();
    failures.extend(r.witness_failures.iter().cloned());
    Ok(status(&failures))
}

fn tau(cli: &Cli, out: &Out, seq: &SeqArgs, search_bound: u32) -> ellfermat::Result<Status> {
    let (curve, p, _) = load_curve(seq.curve.as_deref())?;
    let opts = TauOptions {
        search_bound,
        digit_budget: cli.budget_digits,
    };
    let t = tau_for_all_k(&curve, &p, seq.kmax, &opts)?;
    out.line(&t.schedule, || {
        t.schedule
            .primes
            .iter()
            .map(|s| format!("p = {}: {:?}, l = {:?}, r = {:?}, s = {}", s.p, s.case, s.l, s.r, s.s))
            .collect::<Vec<_>>()
            .join("\n")
    });
    for r in &t.rows {
        out.line(r, || {
            let via = if r.from_definition.is_empty() {
                String::new()
            } else {
                format!("  (definition used for {})", r.from_definition.join(", "))
            };
            format!("k = {:>2}  |tau| = {}{via}", r.k, r.value)
        });
    }
    let states = rows(cli, seq, &curve, &p)?;
    if t.values() != tau_magnitudes(&states) {
        return Ok(Status::Failed("schedule disagrees with the definition".into()));
    }
    Ok(Status::Ok)
}
