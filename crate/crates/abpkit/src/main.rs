use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use abpkit::abp::{Abp, AbpDto, ErrorLedger, LedgerDto, MultilayeredAbp, to_dot};
use abpkit::constructions::{default_points, esym_ben_or_formula, esym_brute, power_sum_abp};
use abpkit::field::FieldConfig;
use abpkit::formula::{Formula, FormulaDto, decompose_formula};
use abpkit::gen::Gen;
use abpkit::layered::reduce_layers_below;
use abpkit::poly::{Ring, SparsePoly, TermDto};
use abpkit::unlayered::depth_reduce_full;
use abpkit::verify;

const DEFAULT_SEED: u64 = 20240915;

#[derive(Parser)]
#[command(name = "abpkit", about = "Construct, transform, and verify algebraic branching programs and formulas", version)]
struct Cli {
    /// Seed for all randomized operations (printed in every report).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output path for the constructed/transformed object. Companion
    /// ledger and report files get `.ledger.json` / `.report.json` suffixes.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a known object and write it as JSON.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Run a pipeline on an input file; emits output, ledger, and report.
    Transform {
        #[command(subcommand)]
        pipeline: TransformKind,
    },
    /// Run a verification oracle and print its report.
    Verify {
        #[command(subcommand)]
        check: VerifyKind,
    },
    /// Render an ABP file as Graphviz DOT text.
    ExportDot {
        /// ABP JSON file.
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct FieldArg {
    /// Coefficient field: `p=<prime>` or `rational`.
    #[arg(long, default_value = "rational")]
    field: String,
}

impl FieldArg {
    fn parse(&self) -> Result<FieldConfig, CliError> {
        self.field.parse().map_err(|e: abpkit::field::FieldError| CliError::Usage(e.to_string()))
    }
}

#[derive(Subcommand)]
enum ConstructKind {
    /// ABP for the power sum x_1^k + ... + x_n^k.
    Powersum {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
    },
    /// Elementary symmetric polynomial esym(n,d), expanded term by term.
    EsymBrute {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Interpolation-based formula for esym(n,d) of size n(n+1).
    EsymBenor {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
}

#[derive(Subcommand)]
enum TransformKind {
    /// Iterated shrinkage on a layered/multilayered ABP file.
    ReduceLayers {
        #[arg(long)]
        input: PathBuf,
        /// Stop once the layer count is at most this.
        #[arg(long)]
        target: usize,
    },
    /// Iterated middle-band cutting on an unlayered ABP file.
    DepthReduceUnlayered {
        #[arg(long)]
        input: PathBuf,
        /// Ambient variable count n for the resource bounds (defaults to
        /// the ABP's vertex count).
        #[arg(long)]
        n: Option<usize>,
        /// Label degree bound used in the edge-budget hypothesis.
        #[arg(long)]
        delta: Option<u32>,
    },
    /// Single band-extraction round on a formula file.
    DecomposeFormula {
        #[arg(long)]
        input: PathBuf,
    },
    /// Iterated band extraction until the formal degree is at most target.
    ReduceFormulaDegree {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        target: u32,
    },
}

#[derive(Subcommand)]
enum VerifyKind {
    /// Common zeros of all partials of esym(n,d) over F_p have many zero
    /// coordinates (exhaustive enumeration).
    EsymSingular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: u64,
        /// Maximum number of points to enumerate.
        #[arg(long, default_value_t = 20_000_000)]
        budget: u64,
    },
    /// Count common zeros of x_i^D - g_i across primes; seeded random g.
    PowersumSingular {
        #[arg(long)]
        n: usize,
        /// The exponent D; the perturbations g_i get degree < D.
        #[arg(long)]
        d: u32,
        /// Primes to test, repeatable.
        #[arg(long = "p", required = true)]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 20_000_000)]
        budget: u64,
    },
    /// Euler identity sum_i x_i dA/dx_i = t*A on a seeded random
    /// homogeneous polynomial.
    Euler {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        n: usize,
        /// Homogeneity degree t.
        #[arg(long)]
        degree: u32,
    },
    /// Exact ledger reconstruction: original = transformed + sum P_iQ_i +
    /// delta + remainder.
    Ledger {
        /// ABP JSON before the transformation.
        #[arg(long)]
        original: PathBuf,
        /// ABP JSON after the transformation.
        #[arg(long)]
        transformed: PathBuf,
        /// Ledger JSON emitted by the transformation.
        #[arg(long)]
        ledger: PathBuf,
        /// Degree cap for the remainder (defaults to the ledger's bound).
        #[arg(long)]
        degree_cap: Option<u32>,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(String),
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
    })
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Failed(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// `foo.json` -> `foo.ledger.json`, `foo.report.json`.
fn companion(out: &Path, tag: &str) -> PathBuf {
    let stem = out.with_extension("");
    PathBuf::from(format!("{}.{tag}.json", stem.display()))
}

fn load_abp(path: &Path) -> Result<Abp, CliError> {
    let dto: AbpDto = read_json(path)?;
    Abp::from_dto(&dto).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_formula(path: &Path) -> Result<Formula, CliError> {
    let dto: FormulaDto = read_json(path)?;
    Formula::from_dto(&dto).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn emit(
    out: &Option<PathBuf>,
    object: serde_json::Value,
    ledger: Option<&ErrorLedger>,
    report: serde_json::Value,
) -> Result<(), CliError> {
    if let Some(path) = out {
        write_json(path, &object)?;
        if let Some(l) = ledger {
            write_json(&companion(path, "ledger"), &l.to_dto())?;
        }
        write_json(&companion(path, "report"), &report)?;
    } else {
        println!("{}", serde_json::to_string_pretty(&object).unwrap());
    }
    eprintln!("{report}");
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let seed = cli.seed;
    match cli.command {
        Command::Construct { kind } => {
            let (object, report) = match kind {
                ConstructKind::Powersum { field, n, k } => {
                    if n == 0 || k == 0 {
                        return Err(CliError::Usage("need n >= 1 and k >= 1".to_string()));
                    }
                    let ring = Ring::new(field.parse()?, n);
                    let abp = power_sum_abp(ring, k);
                    let dto = abp.to_dto();
                    let report = json!({
                        "seed": seed, "construct": "powersum", "n": n, "k": k,
                        "size": abp.size(), "layers": abp.num_layers(),
                    });
                    (serde_json::to_value(&dto).unwrap(), report)
                }
                ConstructKind::EsymBrute { field, n, d } => {
                    if d > n {
                        return Err(CliError::Usage(format!("need d <= n, got d={d} n={n}")));
                    }
                    let ring = Ring::new(field.parse()?, n);
                    let poly = esym_brute(ring, d);
                    let terms: Vec<TermDto> = poly.to_terms();
                    let object = json!({"field": ring.field.to_string(), "n": n, "terms": terms});
                    let report = json!({
                        "seed": seed, "construct": "esym-brute", "n": n, "d": d,
                        "num_terms": poly.num_terms(),
                    });
                    (object, report)
                }
                ConstructKind::EsymBenor { field, n, d } => {
                    let ring = Ring::new(field.parse()?, n);
                    let points = default_points(ring);
                    let f = esym_ben_or_formula(ring, d, &points)
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    let report = json!({
                        "seed": seed, "construct": "esym-benor", "n": n, "d": d,
                        "size": f.size(), "fdeg": f.fdeg(),
                    });
                    (serde_json::to_value(f.to_dto()).unwrap(), report)
                }
            };
            emit(&cli.out, object, None, report)?;
            Ok(true)
        }
        Command::Transform { pipeline } => {
            let (object, ledger, report) = match pipeline {
                TransformKind::ReduceLayers { input, target } => {
                    let multi: MultilayeredAbp = match load_abp(&input)? {
                        Abp::Layered(l) => l.into(),
                        Abp::Multilayered(m) => m,
                        Abp::Unlayered(_) => {
                            return Err(CliError::Usage(
                                "reduce-layers needs a layered or multilayered ABP".to_string(),
                            ));
                        }
                    };
                    let (out, ledger, mut report) = reduce_layers_below(&multi, target)
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    report.note(format!("seed {seed}"));
                    let ok = report.all_bounds_hold();
                    let dto = Abp::Multilayered(out).to_dto();
                    let mut rep = serde_json::to_value(&report).unwrap();
                    rep["seed"] = json!(seed);
                    rep["bounds_hold"] = json!(ok);
                    (serde_json::to_value(&dto).unwrap(), ledger, rep)
                }
                TransformKind::DepthReduceUnlayered { input, n, delta } => {
                    let abp = match load_abp(&input)? {
                        Abp::Unlayered(u) => u,
                        Abp::Layered(l) => l.to_unlayered(),
                        Abp::Multilayered(m) => m.merged_unlayered(),
                    };
                    let ambient = n.unwrap_or(abp.size());
                    let delta = delta.unwrap_or(abp.delta.max(1));
                    let (out, ledger, report) = depth_reduce_full(&abp, ambient, delta)
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    let ok = report.all_bounds_hold();
                    let dto = Abp::Unlayered(out).to_dto();
                    let mut rep = serde_json::to_value(&report).unwrap();
                    rep["seed"] = json!(seed);
                    rep["bounds_hold"] = json!(ok);
                    (serde_json::to_value(&dto).unwrap(), ledger, rep)
                }
                TransformKind::DecomposeFormula { input } => {
                    let f = load_formula(&input)?;
                    let dec =
                        decompose_formula(&f).map_err(|e| CliError::Usage(e.to_string()))?;
                    let mut ledger = ErrorLedger::empty(f.ring, 0);
                    for (g, h) in &dec.pairs {
                        ledger.push_pair(g.clone(), h.clone());
                    }
                    ledger.add_delta(&dec.constant);
                    let rep = json!({
                        "seed": seed,
                        "pipeline": "decompose-formula",
                        "fdeg_in": f.fdeg(),
                        "fdeg_out": dec.phi_prime.fdeg(),
                        "size_in": f.size(),
                        "size_out": dec.phi_prime.size(),
                        "pairs": dec.pairs.len(),
                        "extractions": dec.extractions,
                        "band_fdegs": dec.band_fdegs,
                        "degree_bands_ok": dec.degree_bands_ok,
                    });
                    (serde_json::to_value(dec.phi_prime.to_dto()).unwrap(), ledger, rep)
                }
                TransformKind::ReduceFormulaDegree { input, target } => {
                    let f = load_formula(&input)?;
                    let (out, ledger, report) =
                        abpkit::formula::reduce_formula_degree(&f, target)
                            .map_err(|e| CliError::Usage(e.to_string()))?;
                    let ok = report.all_bounds_hold();
                    let mut rep = serde_json::to_value(&report).unwrap();
                    rep["seed"] = json!(seed);
                    rep["bounds_hold"] = json!(ok);
                    (serde_json::to_value(out.to_dto()).unwrap(), ledger, rep)
                }
            };
            let ok = report.get("bounds_hold").and_then(|b| b.as_bool()).unwrap_or(true);
            emit(&cli.out, object, Some(&ledger), report)?;
            Ok(ok)
        }
        Command::Verify { check } => {
            let mut report = match check {
                VerifyKind::EsymSingular { n, d, p, budget } => {
                    verify::singular_support_esym(n, d, p, budget)
                        .map_err(|e| CliError::Usage(e.to_string()))?
                }
                VerifyKind::PowersumSingular { n, d, primes, budget } => {
                    if n == 0 || d < 2 {
                        return Err(CliError::Usage("need n >= 1 and d >= 2".to_string()));
                    }
                    // perturbations over the rationals, reduced per prime
                    let ring = Ring::new(FieldConfig::rational(), n);
                    let mut gen = Gen::new(seed);
                    let g: Vec<SparsePoly> =
                        (0..n).map(|_| gen.poly(ring, d - 1, 3)).collect();
                    verify::power_sum_singular_check(n, d, &g, &primes, budget)
                        .map_err(|e| CliError::Usage(e.to_string()))?
                }
                VerifyKind::Euler { field, n, degree } => {
                    let ring = Ring::new(field.parse()?, n);
                    let poly = Gen::new(seed).homogeneous_poly(ring, degree, 6);
                    verify::euler_check(&poly).map_err(|e| CliError::Usage(e.to_string()))?
                }
                VerifyKind::Ledger { original, transformed, ledger, degree_cap } => {
                    let f_in = load_abp(&original)?.computed_polynomial();
                    let f_out = load_abp(&transformed)?.computed_polynomial();
                    let dto: LedgerDto = read_json(&ledger)?;
                    let ledger = ErrorLedger::from_dto(&dto)
                        .map_err(|e| CliError::Usage(format!("{}: {e}", ledger.display())))?;
                    let cap = degree_cap.unwrap_or(ledger.degree_bound);
                    verify::check_ledger(&f_in, &f_out, &ledger, cap)
                }
            };
            let pass = report.pass;
            report.params["seed"] = json!(seed);
            let rep = serde_json::to_value(&report).unwrap();
            if let Some(path) = &cli.out {
                write_json(path, &rep)?;
            }
            println!("{rep}");
            Ok(pass)
        }
        Command::ExportDot { input } => {
            let abp = load_abp(&input)?;
            let dot = to_dot(&abp, &[], &[]);
            if let Some(path) = &cli.out {
                std::fs::write(path, &dot)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            } else {
                print!("{dot}");
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
