//! Command-line front end.
//!
//! Exit codes: 0 accepted / balanced, 1 rejected / not balanced, 2 invalid
//! input (including payoffs that are not imputations), 3 internal error.

use std::ffi::OsString;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::balance::{self, BalanceError, Balancedness, Checker, CollectionPair};
use crate::game::{parse_game, Coalition, Game, Payoff, MAX_PLAYERS};
use crate::oracle::{self, OracleError, ORACLE_MAX_PLAYERS};
use crate::report::{
    certificate_doc, nucleolus_doc, payoff_strings, render_text, witness_doc, BenchDoc, BenchRow, BenchRun,
    CheckerDoc, InputEcho, ReportDocument,
};
use crate::verify::{self, Mode, Variant, Verdict, VerifyError, VerifyOptions};

pub const EXIT_ACCEPTED: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "kohlberg", version, about = "Exact (pre)nucleolus verification for TU games")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    output: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether a payoff vector is the (pre)nucleolus.
    Verify(VerifyArgs),
    /// Decide T0-balancedness of an explicit collection of coalition masks.
    Balanced(BalancedArgs),
    /// Compute the (pre)nucleolus by sequential LPs (n <= 12).
    Nucleolus(NucleolusArgs),
    /// Verify oracle points of random games with every variant and tabulate costs.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    game: String,
    /// Comma-separated rationals, e.g. 9/2,9/2,3.
    #[arg(long, allow_hyphen_values = true)]
    payoff: String,
    #[arg(long, value_enum, default_value_t = Algorithm::Improved)]
    algorithm: Algorithm,
    #[arg(long)]
    prenucleolus: bool,
    /// Cross-check every balancedness decision with all four checkers.
    #[arg(long)]
    paranoid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Original,
    Simplified,
    Improved,
}

impl From<Algorithm> for Variant {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::Original => Variant::Original,
            Algorithm::Simplified => Variant::Simplified,
            Algorithm::Improved => Variant::Improved,
        }
    }
}

#[derive(Debug, Args)]
struct BalancedArgs {
    #[arg(long)]
    n: usize,
    /// Coalition masks of T (player i is bit i-1).
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    t0: Vec<u64>,
    #[arg(long, value_enum, default_value_t = CheckerArg::Fast)]
    checker: CheckerArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckerArg {
    Fast,
    Minweight,
    Percoalition,
    Homogeneous,
    All,
}

#[derive(Debug, Args)]
struct NucleolusArgs {
    #[arg(long)]
    game: String,
    #[arg(long)]
    prenucleolus: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    seed: u64,
    /// Upper end of the random integer coalition values.
    #[arg(long, default_value_t = 100)]
    range: i64,
    /// Extra game files benchmarked as fixed rows before the random games.
    #[arg(long)]
    game: Vec<String>,
}

/// Exit code and the text destined for standard output and standard error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> CliOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_ACCEPTED };
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CliOutcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let (code, doc) = match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Balanced(a) => cmd_balanced(a),
        Command::Nucleolus(a) => cmd_nucleolus(a),
        Command::Bench(a) => cmd_bench(a),
    };
    let stdout = match cli.output {
        OutputFormat::Text => render_text(&doc),
        OutputFormat::Json => doc.to_json(),
    };
    let stderr = match (&doc.diagnostic, code) {
        (Some(d), EXIT_INPUT | EXIT_INTERNAL) => format!("kohlberg: error: {d}\n"),
        _ => String::new(),
    };
    CliOutcome { code, stdout, stderr }
}

fn fail(mut doc: ReportDocument, code: i32, diagnostic: impl ToString) -> (i32, ReportDocument) {
    doc.diagnostic = Some(diagnostic.to_string());
    (code, doc)
}

fn load_game(path: &str) -> Result<Game, String> {
    let bytes = std::fs::read(Path::new(path)).map_err(|e| format!("cannot read game file {path}: {e}"))?;
    parse_game(&bytes).map_err(|e| format!("{path}: {e}"))
}

fn mode_of(prenucleolus: bool) -> Mode {
    if prenucleolus {
        Mode::Prenucleolus
    } else {
        Mode::Nucleolus
    }
}

fn cmd_verify(a: &VerifyArgs) -> (i32, ReportDocument) {
    let variant = Variant::from(a.algorithm);
    let mode = mode_of(a.prenucleolus);
    let mut doc = ReportDocument::new(
        "verify",
        InputEcho {
            game: Some(a.game.clone()),
            algorithm: Some(variant.name().into()),
            mode: Some(mode.name().into()),
            paranoid: Some(a.paranoid),
            ..Default::default()
        },
    );
    let game = match load_game(&a.game) {
        Ok(g) => g,
        Err(e) => return fail(doc, EXIT_INPUT, e),
    };
    doc.input.n = Some(game.players());
    let x = match Payoff::parse_csv(&a.payoff) {
        Ok(x) => x,
        Err(e) => return fail(doc, EXIT_INPUT, format!("payoff: {e}")),
    };
    doc.input.payoff = Some(payoff_strings(&x));
    let options = VerifyOptions { paranoid: a.paranoid };
    match verify::verify_with(&game, &x, variant, mode, &options) {
        Ok(report) => {
            doc.record_verification(&report);
            let code = match report.verdict {
                Verdict::IsNucleolus => EXIT_ACCEPTED,
                Verdict::NotNucleolus => EXIT_REJECTED,
                Verdict::NotImputation(_) => EXIT_INPUT,
            };
            (code, doc)
        }
        Err(VerifyError::Game(e)) => fail(doc, EXIT_INPUT, e),
        Err(e) => fail(doc, EXIT_INTERNAL, e),
    }
}

fn coalitions(masks: &[u64], n: usize) -> Result<Vec<Coalition>, String> {
    masks
        .iter()
        .map(|&m| {
            if m >> n != 0 {
                Err(format!("coalition mask {m} is out of range for {n} players (must be < {})", 1u64 << n))
            } else {
                Ok(Coalition::from_mask(m as u32))
            }
        })
        .collect()
}

fn cmd_balanced(a: &BalancedArgs) -> (i32, ReportDocument) {
    let mut doc = ReportDocument::new(
        "balanced",
        InputEcho {
            n: Some(a.n),
            checker: Some(format!("{:?}", a.checker).to_lowercase()),
            ..Default::default()
        },
    );
    if a.n == 0 || a.n > MAX_PLAYERS {
        return fail(doc, EXIT_INPUT, BalanceError::PlayerCount(a.n));
    }
    let (t, t0) = match (coalitions(&a.t, a.n), coalitions(&a.t0, a.n)) {
        (Ok(t), Ok(t0)) => (t, t0),
        (Err(e), _) | (_, Err(e)) => return fail(doc, EXIT_INPUT, e),
    };
    let pair = match CollectionPair::new(a.n, &t0, &t) {
        Ok(p) => p,
        Err(e) => return fail(doc, EXIT_INPUT, e),
    };
    doc.input.t = Some(pair.t().iter().map(|s| s.mask()).collect());
    doc.input.t0 = Some(pair.t0().iter().map(|s| s.mask()).collect());

    let result = match a.checker {
        CheckerArg::All => balance::check_unanimous(&pair).map(|all| {
            doc.checkers = all
                .iter()
                .map(|(c, r)| CheckerDoc {
                    checker: c.name().into(),
                    verdict: balanced_name(&r.outcome).into(),
                    lp_solves: r.lp_solves,
                })
                .collect();
            all.into_iter().next().expect("four results").1
        }),
        single => {
            let checker = match single {
                CheckerArg::Fast => Checker::Fast,
                CheckerArg::Minweight => Checker::MinWeight,
                CheckerArg::Percoalition => Checker::PerCoalition,
                _ => Checker::Homogeneous,
            };
            balance::check(&pair, checker)
        }
    };
    let check = match result {
        Ok(c) => c,
        Err(e @ (BalanceError::OutOfRange { .. } | BalanceError::EmptyCollection | BalanceError::PlayerCount(_))) => {
            return fail(doc, EXIT_INPUT, e)
        }
        Err(e) => return fail(doc, EXIT_INTERNAL, e),
    };
    doc.verdict = Some(balanced_name(&check.outcome).into());
    let code = match &check.outcome {
        Balancedness::Balanced(cert) => {
            doc.certificate = Some(certificate_doc(cert));
            EXIT_ACCEPTED
        }
        Balancedness::NotBalanced(w) => {
            doc.witness = Some(witness_doc(w));
            EXIT_REJECTED
        }
    };
    doc.counters = Some(crate::report::Counters {
        lp_solves: check.lp_solves,
        stored_coalitions_total: 0,
        iteration_count: 0,
    });
    (code, doc)
}

fn balanced_name(b: &Balancedness) -> &'static str {
    if b.is_balanced() {
        "Balanced"
    } else {
        "NotBalanced"
    }
}

fn cmd_nucleolus(a: &NucleolusArgs) -> (i32, ReportDocument) {
    let mode = mode_of(a.prenucleolus);
    let mut doc = ReportDocument::new(
        "nucleolus",
        InputEcho {
            game: Some(a.game.clone()),
            mode: Some(mode.name().into()),
            ..Default::default()
        },
    );
    let game = match load_game(&a.game) {
        Ok(g) => g,
        Err(e) => return fail(doc, EXIT_INPUT, e),
    };
    doc.input.n = Some(game.players());
    match oracle::compute(&game, mode) {
        Ok(result) => {
            doc.nucleolus = Some(nucleolus_doc(&result));
            (EXIT_ACCEPTED, doc)
        }
        Err(e @ (OracleError::TooManyPlayers(_) | OracleError::EmptyImputationSet { .. })) => {
            fail(doc, EXIT_INPUT, e)
        }
        Err(e) => fail(doc, EXIT_INTERNAL, e),
    }
}

fn cmd_bench(a: &BenchArgs) -> (i32, ReportDocument) {
    let mut doc = ReportDocument::new(
        "bench",
        InputEcho {
            n: Some(a.n),
            count: Some(a.count),
            seed: Some(a.seed),
            range: Some(a.range),
            fixtures: a.game.clone(),
            ..Default::default()
        },
    );
    if a.n == 0 || a.n > ORACLE_MAX_PLAYERS {
        return fail(doc, EXIT_INPUT, format!("--n must be between 1 and {ORACLE_MAX_PLAYERS}, got {}", a.n));
    }
    if a.range < 0 {
        return fail(doc, EXIT_INPUT, format!("--range must be non-negative, got {}", a.range));
    }
    let mut games: Vec<(String, Game)> = Vec::new();
    for path in &a.game {
        match load_game(path) {
            Ok(g) => {
                let label = Path::new(path)
                    .file_name()
                    .map_or_else(|| path.clone(), |f| f.to_string_lossy().into_owned());
                games.push((label, g));
            }
            Err(e) => return fail(doc, EXIT_INPUT, e),
        }
    }
    for i in 0..a.count as u64 {
        let seed = a.seed.wrapping_add(i);
        let game = oracle::with_imputations(&oracle::random_game(a.n, seed, a.range), a.range);
        games.push((format!("seed={seed}"), game));
    }

    let mut bench = BenchDoc::default();
    for (label, game) in &games {
        let point = match oracle::compute(game, Mode::Nucleolus) {
            Ok(r) => r.point,
            Err(e @ (OracleError::TooManyPlayers(_) | OracleError::EmptyImputationSet { .. })) => {
                return fail(doc, EXIT_INPUT, format!("{label}: {e}"))
            }
            Err(e) => return fail(doc, EXIT_INTERNAL, format!("{label}: {e}")),
        };
        let mut runs = Vec::new();
        for variant in Variant::ALL {
            let report = match verify::verify(game, &point, variant, Mode::Nucleolus) {
                Ok(r) => r,
                Err(e) => return fail(doc, EXIT_INTERNAL, format!("{label}: {e}")),
            };
            if report.verdict != Verdict::IsNucleolus {
                bench
                    .violations
                    .push(format!("{label} {variant}: oracle point judged {}", report.verdict.name()));
            }
            if variant != Variant::Original {
                bench
                    .violations
                    .extend(report.bound_violations().into_iter().map(|v| format!("{label} {variant}: {v}")));
            }
            runs.push(BenchRun {
                algorithm: variant.name().into(),
                verdict: report.verdict.name().into(),
                iterations: report.iteration_count(),
                lp_solves: report.lp_solves,
                stored_coalitions_total: report.stored_coalitions_total,
            });
        }
        bench.rows.push(BenchRow {
            label: label.clone(),
            n: game.players(),
            point: payoff_strings(&point),
            runs,
        });
    }
    let ok = bench.violations.is_empty();
    bench.assertion = format!(
        "assertion: every simplified/improved run obeyed iterations <= n-1 and storage <= n(n-1): {}",
        if ok { "ok" } else { "VIOLATED" }
    );
    doc.bench = Some(bench);
    if ok {
        (EXIT_ACCEPTED, doc)
    } else {
        fail(doc, EXIT_INTERNAL, "bound assertion violated")
    }
}
