//! Command-line interface: `run`, `verify`, and `bench`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{csv_table, scaling_run};
use crate::config::{parse_constraint, parse_objective, Constraint};
use crate::dispersion::dispersion;
use crate::distance::{DistanceMatrix, Kernel, PointSet};
use crate::error::{Error, Result};
use crate::intersection::{
    convergence_bound, default_intersection_iterations, intersection_local_search, ptas_schedule,
    ScheduleMode,
};
use crate::local_search::{default_iterations, greedy_baseline, local_search, matroid_bound};
use crate::matroid::Matroid;
use crate::oracle::{
    brute_force_combined, brute_force_intersection, brute_force_msd, ENUMERATION_GUARD,
};
use crate::report::{
    AlgorithmSummary, Counters, InstanceSummary, ObjectiveSummary, OracleComparison, RunReport,
};
use crate::submodular::{
    combined_bound_exact, combined_bound_floor, combined_local_search, curvature, PotentialMode,
};
use crate::verify::run_all_suites;

/// Hard cap on the exchange parameter: move enumeration is exponential in p.
const MAX_P: usize = 4;

#[derive(Debug, Parser)]
#[command(
    name = "maxdiv",
    about = "Select maximally diverse subsets under matroid constraints",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a diversification algorithm on a dataset and emit a JSON report.
    Run(Box<RunArgs>),
    /// Run the randomized property suites.
    Verify(VerifyArgs),
    /// Cost-model sweep: counters for a range of ground-set sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    LocalSearch,
    LocalSearchIntersection,
    Greedy,
    BruteForce,
    Combined,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::LocalSearch => "local-search",
            Algorithm::LocalSearchIntersection => "local-search-intersection",
            Algorithm::Greedy => "greedy",
            Algorithm::BruteForce => "brute-force",
            Algorithm::Combined => "combined",
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Point CSV with header `id,x1,...,xq`.
    #[arg(long, conflicts_with = "matrix")]
    input: Option<PathBuf>,
    /// Precomputed distance matrix (first line n, then n rows of n reals).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// euclidean|manhattan|cosine|jaccard|precomputed
    #[arg(long)]
    distance: Option<String>,
    /// `uniform` (with --k) or a path to a JSON constraint config.
    #[arg(long)]
    constraint: Option<String>,
    /// Rank for the `uniform` constraint shorthand.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    /// JSON objective config (required by `combined`).
    #[arg(long)]
    objective: Option<PathBuf>,
    /// Iteration budget; defaults depend on the algorithm.
    #[arg(long)]
    iterations: Option<u64>,
    /// Exchange parameter for the intersection search (2..=4).
    #[arg(long, conflicts_with = "epsilon")]
    p: Option<usize>,
    /// Target accuracy; derives p and iterations via the schedule.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Echoed into the report; algorithms themselves are deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also compute the exact optimum (small instances) for the report.
    #[arg(long)]
    compare: bool,
    /// oblivious|linear-exact for `combined`; default picks linear-exact
    /// when the objective has curvature 0.
    #[arg(long)]
    potential: Option<String>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Trials per suite.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run the matrix-level suites against this matrix instead of
    /// generated kernels.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated ground-set sizes.
    #[arg(long, default_value = "500,1000,2000,4000", value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    k: usize,
    #[arg(long, default_value = "euclidean")]
    kernel: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Cli {
    pub fn execute(self) -> Result<ExitCode> {
        match self.command {
            Command::Run(args) => {
                run(&args)?;
                Ok(ExitCode::SUCCESS)
            }
            Command::Verify(args) => verify(&args),
            Command::Bench(args) => {
                let kernel = Kernel::from_str(&args.kernel)?;
                let rows = scaling_run(&args.sizes, args.k, kernel, args.seed)?;
                print!("{}", csv_table(&rows));
                Ok(ExitCode::SUCCESS)
            }
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

struct Instance {
    ids: Vec<String>,
    matrix: DistanceMatrix,
    kernel_name: String,
}

fn load_instance(args: &RunArgs) -> Result<Instance> {
    match (&args.input, &args.matrix) {
        (Some(csv), None) => {
            let kernel_name = args.distance.as_deref().ok_or_else(|| {
                Error::invalid("--distance is required with --input (euclidean|manhattan|cosine|jaccard)")
            })?;
            if kernel_name == "precomputed" {
                return Err(Error::invalid(
                    "--distance precomputed requires --matrix, not --input",
                ));
            }
            let kernel = Kernel::from_str(kernel_name)?;
            let points = PointSet::from_csv_str(&read_file(csv)?)?;
            let matrix = DistanceMatrix::from_points(&points, kernel)?;
            Ok(Instance {
                ids: points.ids().to_vec(),
                matrix,
                kernel_name: kernel.name().to_string(),
            })
        }
        (None, Some(path)) => {
            if let Some(d) = args.distance.as_deref() {
                if d != "precomputed" {
                    return Err(Error::invalid(format!(
                        "--matrix implies --distance precomputed, got '{d}'"
                    )));
                }
            }
            let matrix = DistanceMatrix::from_text(&read_file(path)?)?;
            let ids = (0..matrix.n()).map(|i| i.to_string()).collect();
            Ok(Instance {
                ids,
                matrix,
                kernel_name: "precomputed".to_string(),
            })
        }
        _ => Err(Error::invalid(
            "exactly one of --input or --matrix is required",
        )),
    }
}

fn load_constraint(args: &RunArgs, ids: &[String]) -> Result<Constraint> {
    match args.constraint.as_deref() {
        Some("uniform") => {
            let k = args
                .k
                .ok_or_else(|| Error::invalid("--constraint uniform requires --k"))?;
            Ok(Constraint::Single(Matroid::uniform(ids.len(), k)))
        }
        Some(path) => parse_constraint(&read_file(Path::new(path))?, ids),
        None => Err(Error::invalid(
            "--constraint is required (`uniform` or a config file path)",
        )),
    }
}

fn run(args: &RunArgs) -> Result<()> {
    let started = Instant::now();
    let instance = load_instance(args)?;
    let constraint = load_constraint(args, &instance.ids)?;
    let d = &instance.matrix;
    let n = d.n();
    if let Constraint::Single(m) = &constraint {
        if m.ground_size() != n {
            return Err(Error::invalid(format!(
                "constraint ground set {} does not match instance size {n}",
                m.ground_size()
            )));
        }
    }
    let objective = match &args.objective {
        Some(path) => Some(parse_objective(&read_file(path)?, &instance.ids)?),
        None => None,
    };
    if args.epsilon.is_some() && args.algorithm != Algorithm::LocalSearchIntersection {
        return Err(Error::invalid(format!(
            "--epsilon only applies to local-search-intersection, got {}",
            args.algorithm.name()
        )));
    }
    if args.p.is_some() && args.algorithm != Algorithm::LocalSearchIntersection {
        return Err(Error::invalid(format!(
            "--p only applies to local-search-intersection, got {}",
            args.algorithm.name()
        )));
    }
    if args.potential.is_some() && args.algorithm != Algorithm::Combined {
        return Err(Error::invalid(format!(
            "--potential only applies to combined, got {}",
            args.algorithm.name()
        )));
    }
    if objective.is_some()
        && !matches!(args.algorithm, Algorithm::Combined | Algorithm::BruteForce)
    {
        return Err(Error::invalid(format!(
            "--objective only applies to combined or brute-force, got {}",
            args.algorithm.name()
        )));
    }

    d.reset_evals();
    let mut warnings: Vec<String> = Vec::new();
    let mut p_used: Option<usize> = None;
    let mut ell_used: Option<u64> = None;
    let mut certified: Option<f64> = None;
    let mut f_value: Option<f64> = None;
    let mut linear_exact_used = false;

    let solution: Vec<usize> = match args.algorithm {
        Algorithm::LocalSearch => {
            let m = expect_single(&constraint, "local-search")?;
            let ell = args.iterations.unwrap_or_else(|| default_iterations(m.rank()));
            ell_used = Some(ell);
            certified = Some(matroid_bound(m.rank(), ell));
            let (set, trace) = local_search(d, m, ell);
            warnings.extend(trace.warnings);
            set
        }
        Algorithm::Greedy => {
            let m = expect_single(&constraint, "greedy")?;
            greedy_baseline(d, m)
        }
        Algorithm::BruteForce => match (&constraint, &objective) {
            (Constraint::Single(m), None) => {
                certified = Some(1.0);
                brute_force_msd(d, m)?.0
            }
            (Constraint::Single(m), Some(f)) => {
                certified = Some(1.0);
                brute_force_combined(d, m, f)?.set
            }
            (Constraint::Intersection(c), None) => {
                certified = Some(1.0);
                brute_force_intersection(d, c)?.0
            }
            (Constraint::Intersection(_), Some(_)) => {
                return Err(Error::invalid(
                    "brute-force supports objectives only with a single matroid",
                ))
            }
        },
        Algorithm::LocalSearchIntersection => {
            let c = match &constraint {
                Constraint::Intersection(c) => c,
                Constraint::Single(_) => {
                    return Err(Error::invalid(
                        "local-search-intersection requires an intersection constraint \
                         (kind = \"intersection\" in the config)",
                    ))
                }
            };
            let (p, ell, enumerate) = match args.epsilon {
                Some(eps) => {
                    let schedule = ptas_schedule(eps, c.k_common())?;
                    (
                        schedule.p,
                        schedule.ell,
                        schedule.mode == ScheduleMode::Enumerate,
                    )
                }
                None => {
                    let p = args.p.unwrap_or(2);
                    let ell = args
                        .iterations
                        .unwrap_or_else(|| default_intersection_iterations(c.k_common()));
                    (p, ell, false)
                }
            };
            p_used = Some(p);
            ell_used = Some(ell);
            if enumerate {
                warnings.push(format!(
                    "schedule: k = {} below the enumeration threshold; solved exactly",
                    c.k_common()
                ));
                certified = Some(1.0);
                brute_force_intersection(d, c)?.0
            } else {
                if p > MAX_P {
                    return Err(Error::invalid(format!(
                        "exchange parameter p = {p} exceeds the cap {MAX_P}; \
                         move enumeration is exponential in p"
                    )));
                }
                certified = convergence_bound(p, c.k_common(), ell);
                let (set, trace) = intersection_local_search(d, c, p, ell)?;
                warnings.extend(trace.warnings);
                set
            }
        }
        Algorithm::Combined => {
            let m = expect_single(&constraint, "combined")?;
            let f = objective.as_ref().ok_or_else(|| {
                Error::invalid("combined requires --objective with a JSON objective config")
            })?;
            let mode = match args.potential.as_deref() {
                Some(s) => PotentialMode::from_str(s)?,
                None => {
                    if curvature(f) == 0.0 {
                        PotentialMode::LinearExact
                    } else {
                        PotentialMode::Oblivious
                    }
                }
            };
            let ell = args.iterations.unwrap_or(10_000);
            ell_used = Some(ell);
            let (set, trace) = combined_local_search(d, m, f, mode, ell)?;
            warnings.extend(trace.warnings);
            if mode == PotentialMode::LinearExact {
                // Exact factor needs lambda_d from the optimum; until that
                // is known report the instance-independent floor (c = 0).
                certified = Some(combined_bound_floor(0.0, m.rank()));
                linear_exact_used = true;
            }
            set
        }
    };

    let disp = dispersion(d, &solution);
    if let Some(f) = &objective {
        f_value = Some(f.value(&solution));
    }
    let total = disp + f_value.unwrap_or(0.0);

    // The exact combined factor needs lambda_d from the optimum; compute it
    // whenever the instance is small enough, not only under --compare.
    let mut oracle_comparison = None;
    if args.compare || (linear_exact_used && n <= 12) {
        let opt_value = match (&constraint, &objective) {
            (Constraint::Single(m), None) => brute_force_msd(d, m).map(|(_, v)| v),
            (Constraint::Single(m), Some(f)) => {
                brute_force_combined(d, m, f).map(|opt| {
                    if linear_exact_used {
                        certified = Some(combined_bound_exact(
                            opt.lambda_d,
                            opt.lambda_f,
                            0.0,
                            m.rank(),
                        ));
                    }
                    opt.g
                })
            }
            (Constraint::Intersection(c), _) => brute_force_intersection(d, c).map(|(_, v)| v),
        };
        match opt_value {
            Ok(opt) if args.compare => {
                let achieved_ratio = if opt > 0.0 { total / opt } else { 1.0 };
                oracle_comparison = Some(OracleComparison {
                    opt_value: opt,
                    achieved_ratio,
                });
            }
            Ok(_) => {}
            Err(Error::GuardExceeded { candidates, .. }) => warnings.push(format!(
                "oracle comparison skipped: {candidates} candidate sets exceed the guard {ENUMERATION_GUARD}"
            )),
            Err(e) => return Err(e),
        }
    }

    let oracle_calls = match &constraint {
        Constraint::Single(m) => m.calls(),
        Constraint::Intersection(c) => c.oracle_calls(),
    };
    let report = RunReport {
        instance: InstanceSummary {
            n,
            kernel: instance.kernel_name,
            constraint: constraint.describe(),
            k: constraint.k(),
        },
        algorithm: AlgorithmSummary {
            name: args.algorithm.name().to_string(),
            p: p_used,
            ell: ell_used,
            epsilon: args.epsilon,
            seed: args.seed,
        },
        solution_ids: solution.iter().map(|&i| instance.ids[i].clone()).collect(),
        solution_indices: solution,
        objective: ObjectiveSummary {
            dispersion: disp,
            submodular: f_value,
            total,
        },
        certified_bound: certified,
        counters: Counters {
            oracle_calls,
            distance_evals: d.evals(),
        },
        oracle_comparison,
        warnings,
        wall_ms: started.elapsed().as_millis() as u64,
    };

    let json = report.to_json();
    match &args.report {
        Some(path) => std::fs::write(path, &json).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => print!("{json}"),
    }
    eprintln!(
        "{}: d = {:.6}, total = {:.6}, {} ms",
        args.algorithm.name(),
        report.objective.dispersion,
        report.objective.total,
        report.wall_ms
    );
    Ok(())
}

fn expect_single<'a>(constraint: &'a Constraint, algo: &str) -> Result<&'a Matroid> {
    match constraint {
        Constraint::Single(m) => Ok(m),
        Constraint::Intersection(_) => Err(Error::invalid(format!(
            "{algo} requires a single matroid constraint; use local-search-intersection"
        ))),
    }
}

fn verify(args: &VerifyArgs) -> Result<ExitCode> {
    let injected = match &args.matrix {
        Some(path) => Some(DistanceMatrix::from_text(&read_file(path)?)?),
        None => None,
    };
    let outcomes = run_all_suites(args.trials, args.seed, injected.as_ref());
    let mut failed = false;
    for outcome in &outcomes {
        println!("{outcome}");
        if !outcome.passed() {
            failed = true;
            if let Some(instance) = &outcome.first_violation {
                eprintln!("replay: {instance}");
            }
        }
    }
    Ok(if failed {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}
