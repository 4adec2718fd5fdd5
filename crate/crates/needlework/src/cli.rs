//! The `needle` command line: one subcommand family per module, a
//! machine-readable run report per invocation, deterministic under a
//! fixed seed. Exit code 0 when every reported assertion passes, 1
//! when one fails, 2 for unknown commands or malformed input.

use crate::acceptance;
use crate::addcomb::{bsg_extract, energy, AbelianSet, PairGraph};
use crate::extract::{
    bias_certificate, merger_distribution, min_entropy, AdversaryMap, Distribution,
};
use crate::field::Field;
use crate::incidence::{
    count_incidences, count_joints, cs_bound_holds, distance_stats, joints_grid, lines_from_json,
    points_from_json, st_grid,
};
use crate::kakeya::{build_kakeya, certify_lower_bound, nikodym_from_kakeya, KakeyaWitness};
use crate::lcc::RMCode;
use crate::poly::{binomial, MultiPoly, TermJson};
use crate::report::{derive_rng, RunReport};
use crate::scaling::{
    apply_scaling, float_matrix_from_csv, scale_by_potential, sinkhorn_scale, ScalingError,
};
use crate::sgdesign::{check_sg, design_from_config, Configuration};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num::{BigInt, BigRational};
use rand::Rng;
use serde::Deserialize;
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "needle",
    about = "Exactly checkable experiments: Kakeya sets, mergers, local correction, sumsets, incidences, designs, and scaling",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every pseudorandom stream in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the run report to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Refuse commands that would enumerate more field points than this.
    #[arg(long, global = true)]
    cap: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Kakeya sets: construction, verification, rank certificates.
    Kakeya {
        #[command(subcommand)]
        action: KakeyaAction,
    },
    /// Randomness mergers and character-sum bias.
    Extract {
        #[command(subcommand)]
        action: ExtractAction,
    },
    /// Locally correctable Reed-Muller codes.
    Lcc {
        #[command(subcommand)]
        action: LccAction,
    },
    /// Additive energy and structured subset extraction.
    Addcomb {
        #[command(subcommand)]
        action: AddcombAction,
    },
    /// Point-line incidences, joints, and distinct distances.
    Incidence {
        #[command(subcommand)]
        action: IncidenceAction,
    },
    /// Sylvester-Gallai configurations and design matrices.
    Sg {
        #[command(subcommand)]
        action: SgAction,
    },
    /// Matrix scaling by alternating normalization or potential descent.
    Scale {
        #[command(subcommand)]
        action: ScaleAction,
    },
    /// Named test batteries.
    Suite {
        /// Battery name; "acceptance" is the only one.
        name: String,
        /// Run only criteria whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Subcommand)]
enum KakeyaAction {
    /// Build a small Kakeya set in F_q^n and report its witness.
    Build {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
    },
    /// Re-check a witness file: one full line per direction.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Rank certificate for the point-count lower bound.
    Certify {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum ExtractAction {
    /// Exact merger output distribution against an adversary.
    Merger {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Adversary::Nikodym)]
        adversary: Adversary,
        /// Alias for --format.
        #[arg(long, value_enum)]
        report: Option<Format>,
    },
    /// Certified character-sum bias of a pair of subsets of Z_3^n.
    Bias {
        #[arg(long)]
        sets: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Adversary {
    Nikodym,
    Identity,
}

#[derive(Subcommand)]
enum LccAction {
    /// Evaluate a polynomial on all of F_q^m.
    Encode {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        e: u32,
        #[arg(long)]
        poly: PathBuf,
    },
    /// Decode one position of a codeword under simulated corruption.
    Correct {
        #[arg(long)]
        word: PathBuf,
        #[arg(long)]
        pos: usize,
        #[arg(long, default_value_t = 0)]
        errors: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
}

#[derive(Subcommand)]
enum AddcombAction {
    /// Additive energy and the quadruple-count bounds for a pair.
    Energy {
        /// One or two set files; a single file is paired with itself.
        #[arg(long = "set", required = true)]
        sets: Vec<PathBuf>,
    },
    /// Extract structured subsets from a pair graph.
    Bsg {
        #[arg(long)]
        graph: PathBuf,
        /// Doubling parameter, a rational like "4" or "7/2".
        #[arg(long = "K", default_value = "4")]
        k: String,
        /// Edge-density parameter, a rational in (0, 1].
        #[arg(long, default_value = "1/20")]
        eps: String,
    },
}

#[derive(Subcommand)]
enum IncidenceAction {
    /// Count exact point-line incidences from files.
    Count {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        lines: PathBuf,
    },
    /// The tight staircase instance with M^4 incidences.
    Grid {
        #[arg(long = "M")]
        m: u64,
    },
    /// Joints of the axis-parallel line grid.
    Joints {
        #[arg(long)]
        grid: u64,
    },
    /// Distinct-distance statistics of a rational point set.
    Distances {
        #[arg(long)]
        points: PathBuf,
    },
}

#[derive(Subcommand)]
enum SgAction {
    /// Coverage check: is the configuration delta-SG?
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Coverage fraction, a rational like "1" or "5/9".
        #[arg(long)]
        delta: String,
    },
    /// Build the design matrix of a configuration and bound its rank.
    Design {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum ScaleAction {
    /// Alternating row/column normalization of a nonnegative matrix.
    Sinkhorn {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_iters: u64,
    },
    /// Gradient descent on the scaling potential toward given marginals.
    Potential {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 500_000)]
        max_iters: u64,
    },
}

struct CliError(String);

fn fail<E: std::fmt::Display>(e: E) -> CliError {
    CliError(e.to_string())
}

/// Parses argv, runs the command, emits the report, and returns the
/// process exit code.
pub fn run<I>(argv: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    let format = match &cli.command {
        Command::Extract {
            action: ExtractAction::Merger {
                report: Some(choice),
                ..
            },
        } => *choice,
        _ => cli.format,
    };
    match execute(&cli) {
        Ok(mut report) => {
            report.finish(started);
            let rendered = match format {
                Format::Json => report.to_json_string(),
                Format::Csv => report.to_csv_string(),
            };
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return 2;
                    }
                }
                None => println!("{rendered}"),
            }
            report.exit_code()
        }
        Err(CliError(message)) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn execute(cli: &Cli) -> Result<RunReport, CliError> {
    match &cli.command {
        Command::Kakeya { action } => run_kakeya(cli, action),
        Command::Extract { action } => run_extract(cli, action),
        Command::Lcc { action } => run_lcc(cli, action),
        Command::Addcomb { action } => run_addcomb(cli, action),
        Command::Incidence { action } => run_incidence(cli, action),
        Command::Sg { action } => run_sg(cli, action),
        Command::Scale { action } => run_scale(cli, action),
        Command::Suite { name, filter } => run_suite_command(cli, name, filter.as_deref()),
    }
}

fn enforce_cap(cli: &Cli, size: u64) -> Result<(), CliError> {
    match cli.cap {
        Some(cap) if size > cap => Err(CliError(format!(
            "enumeration of {size} points exceeds --cap {cap}"
        ))),
        _ => Ok(()),
    }
}

fn read_input(report: &mut RunReport, label: &str, path: &PathBuf) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
    report.record_input(label, text.as_bytes());
    Ok(text)
}

fn record_param(report: &mut RunReport, label: &str, value: impl ToString) {
    report.record_input(label, value.to_string().as_bytes());
}

fn parse_rational(text: &str, what: &str) -> Result<BigRational, CliError> {
    BigRational::from_str(text).map_err(|e| CliError(format!("bad {what} {text:?}: {e}")))
}

fn space_size(q: u64, n: usize) -> u64 {
    q.checked_pow(n as u32).unwrap_or(u64::MAX)
}

/// Accepts either a bare witness file or a run report from
/// `kakeya build --out`, whose outputs embed the witness.
fn witness_from_text(text: &str) -> Result<KakeyaWitness, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError(format!("bad witness file: {e}")))?;
    let body = match value.pointer("/outputs/witness") {
        Some(embedded) => embedded.to_string(),
        None => text.to_string(),
    };
    KakeyaWitness::from_json(&body).map_err(fail)
}

fn run_kakeya(cli: &Cli, action: &KakeyaAction) -> Result<RunReport, CliError> {
    match action {
        KakeyaAction::Build { q, n } => {
            let mut report = RunReport::new(format!("kakeya build --q {q} --n {n}"), cli.seed);
            record_param(&mut report, "q", q);
            record_param(&mut report, "n", n);
            enforce_cap(cli, space_size(*q, *n))?;
            let witness = build_kakeya(*q, *n).map_err(fail)?;
            report.check("kakeya-verify", witness.verify(), "verified", "verified");
            let size = witness.points.len() as u128;
            let qn = (*q as u128).pow(*n as u32);
            let qn1 = (*q as u128).pow(*n as u32 - 1);
            let bound = BigRational::new(
                BigInt::from(qn + (1u128 << n) * qn1),
                BigInt::from(1u128 << (n - 1)),
            );
            report.check(
                "kakeya-size-bound",
                size * (1u128 << (n - 1)) <= qn + (1u128 << n) * qn1,
                size,
                &bound,
            );
            report.output_exact("size", witness.points.len());
            report.output_exact("directions", witness.base_of.len());
            let witness_json: serde_json::Value =
                serde_json::from_str(&witness.to_json()).map_err(fail)?;
            report.output_raw("witness", witness_json);
            Ok(report)
        }
        KakeyaAction::Verify { input } => {
            let mut report = RunReport::new("kakeya verify", cli.seed);
            let text = read_input(&mut report, "in", input)?;
            let witness = witness_from_text(&text)?;
            enforce_cap(cli, space_size(witness.q, witness.n))?;
            report.check("kakeya-verify", witness.verify(), "verified", "verified");
            let stats = witness.size_stats();
            report.output_exact("q", witness.q);
            report.output_exact("n", witness.n);
            report.output_exact("size", stats.size);
            report.output_float("main_term", stats.main_term);
            Ok(report)
        }
        KakeyaAction::Certify { input } => {
            let mut report = RunReport::new("kakeya certify", cli.seed);
            let text = read_input(&mut report, "in", input)?;
            let witness = witness_from_text(&text)?;
            enforce_cap(cli, space_size(witness.q, witness.n))?;
            let cert = certify_lower_bound(witness.q, witness.n, &witness.points).map_err(fail)?;
            let expected = binomial(witness.n as u64 + witness.q - 1, witness.n as u64);
            report.check(
                "kakeya-rank-full",
                cert.rank as u64 == expected,
                cert.rank,
                expected,
            );
            report.check(
                "kakeya-factorial-bound",
                cert.meets_factorial_bound(witness.q, witness.n),
                cert.implied_lower_bound,
                format!("{}^{} / {}!", witness.q, witness.n, witness.n),
            );
            report.output_exact("rank", cert.rank);
            report.output_exact("monomials", cert.monomial_count);
            report.output_exact("implied_lower_bound", cert.implied_lower_bound);
            Ok(report)
        }
    }
}

#[derive(Deserialize)]
struct BiasSetsFile {
    n: usize,
    a: Vec<Vec<u64>>,
    b: Vec<Vec<u64>>,
}

fn run_extract(cli: &Cli, action: &ExtractAction) -> Result<RunReport, CliError> {
    match action {
        ExtractAction::Merger {
            q, n, adversary, ..
        } => {
            let tag = match adversary {
                Adversary::Nikodym => "nikodym",
                Adversary::Identity => "identity",
            };
            let mut report = RunReport::new(
                format!("extract merger --q {q} --n {n} --adversary {tag}"),
                cli.seed,
            );
            record_param(&mut report, "q", q);
            record_param(&mut report, "n", n);
            record_param(&mut report, "adversary", tag);
            enforce_cap(cli, space_size(*q, *n))?;
            let domain: Vec<Vec<u64>> = (0..space_size(*q, *n))
                .map(|i| {
                    let mut v = vec![0u64; *n];
                    let mut rest = i;
                    for c in (0..*n).rev() {
                        v[c] = rest % q;
                        rest /= q;
                    }
                    v
                })
                .collect();
            let source = Distribution::uniform(domain).map_err(fail)?;
            match adversary {
                Adversary::Nikodym => {
                    let witness = build_kakeya(*q, *n).map_err(fail)?;
                    let nikodym = nikodym_from_kakeya(&witness).map_err(fail)?;
                    let attack = AdversaryMap::nikodym_attack(&nikodym).map_err(fail)?;
                    let merged = merger_distribution(*q, *n, &source, &attack).map_err(fail)?;
                    let mass = merged.mass_on_exact(&nikodym.points).map_err(fail)?;
                    let bound = BigRational::new(BigInt::from(*q - 1), BigInt::from(*q));
                    report.check("merger-planted-mass", mass >= bound, &mass, &bound);
                    report.output_exact("planted_mass", &mass);
                    report.output_exact("planted_size", nikodym.points.len());
                    report.output_exact("support", merged.len());
                    report.output_float("min_entropy", min_entropy(&merged));
                }
                Adversary::Identity => {
                    let attack = AdversaryMap::identity(*q, *n).map_err(fail)?;
                    let merged = merger_distribution(*q, *n, &source, &attack).map_err(fail)?;
                    report.check(
                        "merger-support-nonempty",
                        !merged.is_empty(),
                        merged.len(),
                        "> 0",
                    );
                    report.output_exact("support", merged.len());
                    report.output_float("min_entropy", min_entropy(&merged));
                }
            }
            Ok(report)
        }
        ExtractAction::Bias { sets } => {
            let mut report = RunReport::new("extract bias", cli.seed);
            let text = read_input(&mut report, "sets", sets)?;
            let file: BiasSetsFile =
                serde_json::from_str(&text).map_err(|e| CliError(format!("bad sets file: {e}")))?;
            let a: BTreeSet<Vec<u64>> = file.a.into_iter().collect();
            let b: BTreeSet<Vec<u64>> = file.b.into_iter().collect();
            let cert = bias_certificate(file.n, &a, &b, 1).map_err(fail)?;
            report.check(
                "bias-parseval",
                cert.holds(),
                &cert.magnitude_squared,
                &cert.parseval_bound,
            );
            report.output_exact("magnitude_squared", &cert.magnitude_squared);
            report.output_exact("parseval_bound", &cert.parseval_bound);
            report.output_exact("pairs", cert.pairs);
            report.output_float("bias", cert.bias_value());
            Ok(report)
        }
    }
}

#[derive(Deserialize)]
struct WordFile {
    q: u64,
    m: usize,
    e: u32,
    word: Vec<u64>,
}

fn run_lcc(cli: &Cli, action: &LccAction) -> Result<RunReport, CliError> {
    match action {
        LccAction::Encode { q, m, e, poly } => {
            let mut report = RunReport::new(format!("lcc encode --q {q} --m {m} --e {e}"), cli.seed);
            record_param(&mut report, "q", q);
            record_param(&mut report, "m", m);
            record_param(&mut report, "e", e);
            let text = read_input(&mut report, "poly", poly)?;
            enforce_cap(cli, space_size(*q, *m))?;
            let field = Field::prime(*q).map_err(fail)?;
            let code = RMCode::new(field.clone(), *m, *e).map_err(fail)?;
            // Polynomial files come in two shapes: a JSON term list, or
            // plain text like "3*x0^2*x1 + 4".
            let poly = if text.trim_start().starts_with('[') {
                let terms: Vec<TermJson> = serde_json::from_str(&text)
                    .map_err(|e| CliError(format!("bad polynomial file: {e}")))?;
                MultiPoly::from_json_terms(&field, *m, &terms).map_err(fail)?
            } else {
                MultiPoly::parse(&field, *m, &text).map_err(fail)?
            };
            let word = code.encode(&poly).map_err(fail)?;
            let residues: Vec<u64> = word.iter().map(|el| el.residue()).collect();
            report.check(
                "lcc-word-length",
                residues.len() as u64 == space_size(*q, *m),
                residues.len(),
                space_size(*q, *m),
            );
            report.output_raw(
                "codeword",
                serde_json::json!({ "q": q, "m": m, "e": e, "word": residues }),
            );
            Ok(report)
        }
        LccAction::Correct {
            word,
            pos,
            errors,
            trials,
        } => {
            let mut report = RunReport::new(
                format!("lcc correct --pos {pos} --errors {errors} --trials {trials}"),
                cli.seed,
            );
            let text = read_input(&mut report, "word", word)?;
            record_param(&mut report, "pos", pos);
            record_param(&mut report, "errors", errors);
            record_param(&mut report, "trials", trials);
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError(format!("bad word file: {e}")))?;
            let body = match value.pointer("/outputs/codeword") {
                Some(embedded) => embedded.clone(),
                None => value,
            };
            let file: WordFile = serde_json::from_value(body)
                .map_err(|e| CliError(format!("bad word file: {e}")))?;
            enforce_cap(cli, space_size(file.q, file.m))?;
            let field = Field::prime(file.q).map_err(fail)?;
            let code = RMCode::new(field.clone(), file.m, file.e).map_err(fail)?;
            if file.word.len() != code.length() {
                return Err(CliError(format!(
                    "word length {} does not match q^m = {}",
                    file.word.len(),
                    code.length()
                )));
            }
            if file.word.iter().any(|&r| r >= file.q) {
                return Err(CliError("word entries must be residues mod q".into()));
            }
            if *pos >= code.length() {
                return Err(CliError(format!("position {pos} out of range")));
            }
            let codeword: Vec<_> = file.word.iter().map(|&r| field.element_at(r)).collect();
            match errors {
                0 => {
                    let mut successes = 0u64;
                    let directions = code.directions().to_vec();
                    for direction in &directions {
                        if code.correct_along(&codeword, *pos, direction).map_err(fail)?
                            == codeword[*pos]
                        {
                            successes += 1;
                        }
                    }
                    report.check(
                        "lcc-zero-error-rate",
                        successes as usize == directions.len(),
                        format!("{successes}/{}", directions.len()),
                        format!("{0}/{0}", directions.len()),
                    );
                    report.output_float("success_rate", successes as f64 / directions.len() as f64);
                }
                1 => {
                    let mut rng = derive_rng(cli.seed, "lcc", "cli-correct");
                    let mut successes = 0u64;
                    let mut corrupted = codeword.clone();
                    for _ in 0..*trials {
                        let mut bad = rng.gen_range(0..code.length() - 1);
                        if bad >= *pos {
                            bad += 1;
                        }
                        let delta = field.element_at(rng.gen_range(1..file.q));
                        corrupted[bad] = &codeword[bad] + &delta;
                        if code.local_correct(&corrupted, *pos, &mut rng).map_err(fail)?
                            == codeword[*pos]
                        {
                            successes += 1;
                        }
                        corrupted[bad] = codeword[bad].clone();
                    }
                    let rate = successes as f64 / *trials as f64;
                    let expected = file.q as f64 / (file.q + 1) as f64;
                    report.check(
                        "lcc-one-error-rate",
                        (rate - expected).abs() <= 0.01,
                        rate,
                        format!("{}/{} +- 0.01", file.q, file.q + 1),
                    );
                    report.output_float("success_rate", rate);
                    report.output_exact("expected_rate", format!("{}/{}", file.q, file.q + 1));
                }
                _ => {
                    return Err(CliError(
                        "only --errors 0 and --errors 1 are supported".into(),
                    ))
                }
            }
            Ok(report)
        }
    }
}

fn run_addcomb(cli: &Cli, action: &AddcombAction) -> Result<RunReport, CliError> {
    match action {
        AddcombAction::Energy { sets } => {
            if sets.len() > 2 {
                return Err(CliError("--set may appear at most twice".into()));
            }
            let mut report = RunReport::new("addcomb energy", cli.seed);
            let mut parsed = Vec::new();
            for (idx, path) in sets.iter().enumerate() {
                let text = read_input(&mut report, &format!("set{idx}"), path)?;
                let value: serde_json::Value = serde_json::from_str(&text)
                    .map_err(|e| CliError(format!("bad set file: {e}")))?;
                parsed.push(AbelianSet::from_json(&value).map_err(fail)?);
            }
            let a = parsed[0].clone();
            let b = parsed.get(1).cloned().unwrap_or_else(|| a.clone());
            let result = energy(&a, &b).map_err(fail)?;
            let e_low = BigRational::from_integer(BigInt::from(result.size_a.max(result.size_b)));
            let e_high = BigRational::from_integer(BigInt::from(result.sumset_size));
            report.check("energy-lower", result.energy >= e_low, &result.energy, &e_low);
            report.check("energy-upper", result.energy <= e_high, &result.energy, &e_high);
            let lhs = BigInt::from(result.q) * BigInt::from(result.sumset_size);
            let rhs = BigInt::from(result.size_a).pow(2) * BigInt::from(result.size_b).pow(2);
            report.check("quadruple-count-bound", lhs >= rhs, &lhs, &rhs);
            report.output_exact("size_a", result.size_a);
            report.output_exact("size_b", result.size_b);
            report.output_exact("sumset_size", result.sumset_size);
            report.output_exact("quadruples", result.q);
            report.output_exact("energy", &result.energy);
            Ok(report)
        }
        AddcombAction::Bsg { graph, k, eps } => {
            let mut report = RunReport::new(format!("addcomb bsg --K {k} --eps {eps}"), cli.seed);
            let text = read_input(&mut report, "graph", graph)?;
            record_param(&mut report, "K", k);
            record_param(&mut report, "eps", eps);
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError(format!("bad graph file: {e}")))?;
            let graph = PairGraph::from_json(&value).map_err(fail)?;
            let k = parse_rational(k, "K")?;
            let eps = parse_rational(eps, "eps")?;
            let result = bsg_extract(&graph, &k, &eps).map_err(fail)?;
            report.check(
                "bsg-a-prime-nonempty",
                !result.a_prime.is_empty(),
                result.a_prime.len(),
                "> 0",
            );
            report.check(
                "bsg-b-prime-nonempty",
                !result.b_prime.is_empty(),
                result.b_prime.len(),
                "> 0",
            );
            report.check(
                "bsg-nondegenerate",
                result.degenerate.is_none(),
                result.degenerate.clone().unwrap_or_else(|| "ok".into()),
                "ok",
            );
            report.output_exact("a_prime_size", result.a_prime.len());
            report.output_exact("b_prime_size", result.b_prime.len());
            report.output_exact("difference_size", result.diff_size);
            report.output_exact("sumset_size", result.sum_size);
            report.output_float("popular_bound", result.popular_bound);
            if let Some(c) = result.c_achieved {
                report.output_float("c_achieved", c);
            }
            Ok(report)
        }
    }
}

fn run_incidence(cli: &Cli, action: &IncidenceAction) -> Result<RunReport, CliError> {
    match action {
        IncidenceAction::Count { points, lines } => {
            let mut report = RunReport::new("incidence count", cli.seed);
            let points_text = read_input(&mut report, "points", points)?;
            let lines_text = read_input(&mut report, "lines", lines)?;
            let points_value: serde_json::Value = serde_json::from_str(&points_text)
                .map_err(|e| CliError(format!("bad points file: {e}")))?;
            let lines_value: serde_json::Value = serde_json::from_str(&lines_text)
                .map_err(|e| CliError(format!("bad lines file: {e}")))?;
            let pts = points_from_json(&points_value).map_err(fail)?;
            let lns = lines_from_json(&lines_value).map_err(fail)?;
            let count = count_incidences(&pts, &lns);
            report.check(
                "cs-point-side",
                cs_bound_holds(count, pts.len() as u64, lns.len() as u64),
                count,
                format!("2*{}*sqrt({}) + 2*{}", pts.len(), lns.len(), lns.len()),
            );
            report.check(
                "cs-line-side",
                cs_bound_holds(count, lns.len() as u64, pts.len() as u64),
                count,
                format!("2*{}*sqrt({}) + 2*{}", lns.len(), pts.len(), pts.len()),
            );
            report.output_exact("incidences", count);
            report.output_exact("points", pts.len());
            report.output_exact("lines", lns.len());
            Ok(report)
        }
        IncidenceAction::Grid { m } => {
            let mut report = RunReport::new(format!("incidence grid --M {m}"), cli.seed);
            record_param(&mut report, "M", m);
            if *m == 0 || *m > 8 {
                return Err(CliError("need 1 <= M <= 8".into()));
            }
            let (pts, lns) = st_grid(*m);
            let count = count_incidences(&pts, &lns);
            report.check("grid-incidences", count == m.pow(4), count, m.pow(4));
            report.output_exact("incidences", count);
            report.output_exact("points", pts.len());
            report.output_exact("lines", lns.len());
            Ok(report)
        }
        IncidenceAction::Joints { grid } => {
            let mut report = RunReport::new(format!("incidence joints --grid {grid}"), cli.seed);
            record_param(&mut report, "grid", grid);
            let lines = joints_grid(*grid);
            let count = count_joints(&lines).map_err(fail)?;
            report.check("joints-count", count == grid.pow(3), count, grid.pow(3));
            let line_count = lines.len() as u128;
            report.check(
                "joints-line-bound",
                (count as u128).pow(2) <= line_count.pow(3),
                format!("{count}^2"),
                format!("{line_count}^3"),
            );
            report.output_exact("joints", count);
            report.output_exact("lines", lines.len());
            Ok(report)
        }
        IncidenceAction::Distances { points } => {
            let mut report = RunReport::new("incidence distances", cli.seed);
            let text = read_input(&mut report, "points", points)?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError(format!("bad points file: {e}")))?;
            let pts = points_from_json(&value).map_err(fail)?;
            let stats = distance_stats(&pts).map_err(fail)?;
            let distinct = BigRational::from_integer(BigInt::from(stats.distinct_sq_distances));
            let one = BigRational::from_integer(BigInt::from(1));
            report.check(
                "distance-pairs-bound",
                distinct >= stats.lower_bound_pairs,
                &distinct,
                &stats.lower_bound_pairs,
            );
            report.check(
                "distance-full-bound",
                &distinct + &one >= stats.lower_bound_full,
                &distinct + &one,
                &stats.lower_bound_full,
            );
            report.output_exact("points", stats.n);
            report.output_exact("distinct_sq_distances", stats.distinct_sq_distances);
            report.output_exact("quadruples_full", stats.q_full);
            report.output_exact("quadruples_nondegenerate", stats.q_nondegenerate);
            report.output_exact("unit_pairs", stats.unit_pairs);
            Ok(report)
        }
    }
}

fn run_sg(cli: &Cli, action: &SgAction) -> Result<RunReport, CliError> {
    match action {
        SgAction::Check { config, delta } => {
            let mut report = RunReport::new(format!("sg check --delta {delta}"), cli.seed);
            let text = read_input(&mut report, "config", config)?;
            record_param(&mut report, "delta", delta);
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError(format!("bad config file: {e}")))?;
            let configuration = Configuration::from_json(&value).map_err(fail)?;
            let delta = parse_rational(delta, "delta")?;
            let result = check_sg(&configuration, &delta).map_err(fail)?;
            let min_covered = result.covered.iter().min().copied().unwrap_or(0);
            report.check(
                "sg-delta-coverage",
                result.is_sg,
                format!("min covered {min_covered} of {}", result.n),
                format!("delta * n = {}", &delta * BigRational::from_integer(BigInt::from(result.n))),
            );
            report.output_exact("n", result.n);
            report.output_exact("min_covered", min_covered);
            if let Some(w) = result.witness {
                report.output_exact("witness", w);
            }
            Ok(report)
        }
        SgAction::Design { config } => {
            let mut report = RunReport::new("sg design", cli.seed);
            let text = read_input(&mut report, "config", config)?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError(format!("bad config file: {e}")))?;
            let configuration = Configuration::from_json(&value).map_err(fail)?;
            let design = design_from_config(&configuration).map_err(fail)?;
            let rank = design.exact_rank().map_err(fail)?;
            let floor = design.rank_floor();
            let (q, k, t) = design.params();
            report.check(
                "design-rank-bound",
                BigRational::from_integer(BigInt::from(rank)) >= floor,
                rank,
                &floor,
            );
            report.output_exact("rows", design.m());
            report.output_exact("cols", design.n());
            report.output_exact("q", q);
            report.output_exact("k", k);
            report.output_exact("t", t);
            report.output_exact("exact_rank", rank);
            report.output_exact("rank_floor", &floor);
            Ok(report)
        }
    }
}

#[derive(Deserialize)]
struct TargetFile {
    rows: Vec<f64>,
    cols: Vec<f64>,
}

fn coefficient_outputs(report: &mut RunReport, rho: &[f64], gamma: &[f64]) {
    report.output_raw(
        "rho",
        serde_json::Value::Array(rho.iter().map(|&v| serde_json::json!(v)).collect()),
    );
    report.output_raw(
        "gamma",
        serde_json::Value::Array(gamma.iter().map(|&v| serde_json::json!(v)).collect()),
    );
}

fn run_scale(cli: &Cli, action: &ScaleAction) -> Result<RunReport, CliError> {
    match action {
        ScaleAction::Sinkhorn {
            matrix,
            eps,
            max_iters,
        } => {
            let mut report = RunReport::new(format!("scale sinkhorn --eps {eps}"), cli.seed);
            let text = read_input(&mut report, "matrix", matrix)?;
            record_param(&mut report, "eps", eps);
            record_param(&mut report, "max_iters", max_iters);
            let b = float_matrix_from_csv(&text).map_err(fail)?;
            match sinkhorn_scale(&b, *eps, *max_iters) {
                Ok(result) => {
                    report.check(
                        "sinkhorn-converged",
                        result.achieved_eps <= *eps,
                        result.achieved_eps,
                        *eps,
                    );
                    report.output_float("achieved_eps", result.achieved_eps);
                    report.output_exact("iterations", result.iterations);
                    let scaled = apply_scaling(&b, &result.rho, &result.gamma);
                    let min_entry = scaled
                        .iter()
                        .flatten()
                        .cloned()
                        .fold(f64::INFINITY, f64::min);
                    report.output_float("min_scaled_entry", min_entry);
                    coefficient_outputs(&mut report, &result.rho, &result.gamma);
                }
                Err(ScalingError::DidNotConverge {
                    achieved_eps,
                    iterations,
                }) => {
                    report.check("sinkhorn-converged", false, achieved_eps, *eps);
                    report.output_float("achieved_eps", achieved_eps);
                    report.output_exact("iterations", iterations);
                }
                Err(other) => return Err(fail(other)),
            }
            Ok(report)
        }
        ScaleAction::Potential {
            matrix,
            target,
            step,
            tol,
            max_iters,
        } => {
            let mut report = RunReport::new(
                format!("scale potential --step {step} --tol {tol}"),
                cli.seed,
            );
            let matrix_text = read_input(&mut report, "matrix", matrix)?;
            let target_text = read_input(&mut report, "target", target)?;
            record_param(&mut report, "step", step);
            record_param(&mut report, "tol", tol);
            record_param(&mut report, "max_iters", max_iters);
            let b = float_matrix_from_csv(&matrix_text).map_err(fail)?;
            let targets: TargetFile = serde_json::from_str(&target_text)
                .map_err(|e| CliError(format!("bad target file: {e}")))?;
            match scale_by_potential(&b, &targets.rows, &targets.cols, *step, *tol, *max_iters) {
                Ok(result) => {
                    report.check(
                        "potential-descent-converged",
                        true,
                        result.achieved_eps,
                        format!("gradient below {tol}"),
                    );
                    report.output_float("achieved_eps", result.achieved_eps);
                    report.output_exact("iterations", result.iterations);
                    coefficient_outputs(&mut report, &result.rho, &result.gamma);
                }
                Err(ScalingError::DidNotConverge {
                    achieved_eps,
                    iterations,
                }) => {
                    report.check(
                        "potential-descent-converged",
                        false,
                        achieved_eps,
                        format!("gradient below {tol}"),
                    );
                    report.output_float("achieved_eps", achieved_eps);
                    report.output_exact("iterations", iterations);
                }
                Err(other) => return Err(fail(other)),
            }
            Ok(report)
        }
    }
}

fn run_suite_command(cli: &Cli, name: &str, filter: Option<&str>) -> Result<RunReport, CliError> {
    if name != "acceptance" {
        return Err(CliError(format!(
            "unknown suite {name:?}; the only battery is \"acceptance\""
        )));
    }
    let mut report = RunReport::new(
        match filter {
            Some(f) => format!("suite acceptance --filter {f}"),
            None => "suite acceptance".into(),
        },
        cli.seed,
    );
    record_param(&mut report, "suite", name);
    if let Some(f) = filter {
        record_param(&mut report, "filter", f);
    }
    let results = acceptance::run_suite(filter, cli.seed);
    if results.is_empty() {
        return Err(CliError(format!(
            "filter {:?} matches no criterion; known: {}",
            filter.unwrap_or(""),
            acceptance::criterion_names().join(", ")
        )));
    }
    let mut summary = serde_json::Map::new();
    for criterion in &results {
        report.check(
            format!("criterion-{}", criterion.name),
            criterion.passed,
            if criterion.passed { "pass" } else { "fail" },
            "pass",
        );
        summary.insert(
            criterion.name.to_string(),
            serde_json::json!({ "passed": criterion.passed, "millis": criterion.millis }),
        );
    }
    for criterion in results {
        report.extend_assertions(criterion.assertions);
    }
    report.output_raw("criteria", serde_json::Value::Object(summary));
    Ok(report)
}
