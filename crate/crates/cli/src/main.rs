//! Command-line front end: structural analysis, single-target
//! classification, detailed-balanced / single-target / complex-balanced
//! realizations, simulation, equivalence and balance checks, and parameter
//! sweeps.
//!
//! Exit codes: 0 for success or a feasible answer, 1 for a well-defined
//! negative answer (infeasible, not balanced, no positive steady state),
//! 2 for usage or input errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crn_core::balancing::{self, WegscheiderOutcome};
use crn_core::dynamics::{self, IntegrateOptions, Verdict};
use crn_core::equivalence::{self, SweepQuery};
use crn_core::geometry::{self, SingleTargetCase};
use crn_core::model::{classify_structure, MassActionSystem};
use crn_core::parser::{self, ParsedInput, Report};
use crn_core::Tolerances;

#[derive(Parser)]
#[command(name = "crn", version, about = "Analysis of reaction networks embedded in Euclidean space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Override the primary feasibility/balance tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Rate constants (comma-separated), replacing any rates in the file.
    #[arg(long, global = true, value_name = "CSV")]
    rates: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Structural facts: sources, components, deficiency, reversibility.
    Analyze { file: PathBuf },
    /// Classify a single-target system by the geometry of its target.
    Classify { file: PathBuf },
    /// Construct a detailed-balanced realization of a single-target system.
    RealizeDb { file: PathBuf },
    /// Search for a dynamically equivalent single-target system.
    RealizeSt { file: PathBuf },
    /// Decide dynamical equivalence to a complex-balanced system at a state.
    RealizeCb {
        file: PathBuf,
        /// State at which to balance; found from seeds when omitted.
        #[arg(long, value_name = "CSV")]
        steady_state: Option<String>,
        /// Starting point for the steady-state search.
        #[arg(long, value_name = "CSV")]
        x0: Option<String>,
    },
    /// Integrate the mass-action ODE and classify the limit behaviour.
    Simulate {
        file: PathBuf,
        /// Initial state (defaults to all ones).
        #[arg(long, value_name = "CSV")]
        x0: Option<String>,
        #[arg(long, default_value_t = 100.0)]
        horizon: f64,
    },
    /// Decide whether two systems generate the same dynamics.
    CheckEquiv { a: PathBuf, b: PathBuf },
    /// Detailed/complex balance and rate-constant conditions at a state.
    CheckBalance {
        file: PathBuf,
        #[arg(long, value_name = "CSV")]
        steady_state: String,
    },
    /// Feasibility of a query over a grid of one rate constant.
    Sweep {
        file: PathBuf,
        /// Grid as lo:hi:count or lo:hi:count:log.
        #[arg(long, value_name = "SPEC")]
        grid: String,
        /// Which rate constant the grid replaces (1-based index).
        #[arg(long, default_value_t = 1)]
        vary: usize,
        /// Query: cb (complex-balanced) or st (single-target).
        #[arg(long, default_value = "cb")]
        query: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

type CliResult = Result<ExitCode, String>;

fn run(cli: Cli) -> CliResult {
    let mut tol = Tolerances::default();
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            return Err("--tol must be positive".into());
        }
        tol.lp_feasibility = t;
        tol.strict_slack = t;
        tol.balance_residual = t;
        tol.equivalence_abs = t;
    }
    let seed = std::env::var("CRN_SEED")
        .ok()
        .map(|s| s.parse::<u64>().map_err(|_| "CRN_SEED must be an integer".to_string()))
        .transpose()?
        .unwrap_or(0);
    let rates = cli.rates.as_deref().map(parse_csv).transpose()?;

    match &cli.command {
        Command::Analyze { file } => {
            let input = load(file)?;
            let report = classify_structure(input.network(), &tol);
            if cli.json {
                println!("{}", parser::emit_json(&Report::Structure(&report)));
            } else {
                println!("sources: {}", report.source_ids.len());
                println!("components: {}", report.num_components);
                println!("stoichiometric dimension: {}", report.stoich_dim);
                println!("deficiency: {}", report.deficiency);
                println!("reversible: {}", report.is_reversible);
                println!("weakly reversible: {}", report.is_weakly_reversible);
                println!("single target: {}", report.is_single_target);
                println!("power law: {}", report.is_power_law);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { file } => {
            let sys = load_system(file, rates, true)?;
            let verdict = geometry::classify_single_target(&sys, &tol)
                .map_err(|e| e.to_string())?;
            if cli.json {
                println!("{}", parser::emit_json(&Report::SingleTarget(&verdict)));
            }
            match verdict.case {
                SingleTargetCase::GloballyStable => {
                    if !cli.json {
                        println!("GLOBALLY_STABLE: target in relative interior");
                    }
                    Ok(ExitCode::SUCCESS)
                }
                SingleTargetCase::NoPositiveSteadyState => {
                    if !cli.json {
                        println!("NO_POSITIVE_STEADY_STATE: target not in relative interior");
                    }
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::RealizeDb { file } => {
            let sys = load_system(file, rates, false)?;
            match balancing::db_realize_single_target(&sys, &tol) {
                Ok(real) => {
                    if cli.json {
                        println!("{}", parser::emit_json(&Report::DbRealization(&real)));
                    } else {
                        println!("detailed-balanced realization found");
                        println!("steady state: {}", csv(&real.steady_state));
                        println!("rates: {}", csv(real.system.rates()));
                        println!("equivalence residual: {:e}", real.equivalence_residual);
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(balancing::BalanceError::NotInterior) => {
                    println!("no realization: target not in relative interior");
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::RealizeSt { file } => {
            let sys = load_system(file, rates, false)?;
            match equivalence::single_target_realize(&sys, &tol) {
                Some(st) => {
                    if cli.json {
                        println!("{}", parser::emit_json(&Report::System(&st)));
                    } else {
                        let target = st.network().vertices().last().unwrap().coords();
                        println!("single-target realization found");
                        println!("target: {}", csv(target));
                        println!("rates: {}", csv(st.rates()));
                    }
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("no single-target realization");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::RealizeCb { file, steady_state, x0 } => {
            let sys = load_system(file, rates, false)?;
            let state = match steady_state {
                Some(s) => parse_csv(s)?,
                None => {
                    let start = match x0 {
                        Some(s) => parse_csv(s)?,
                        None => vec![1.0; sys.dimension()],
                    };
                    match equivalence::find_positive_steady_state(&sys, &start, &tol) {
                        Some(x) => x,
                        None => {
                            let found =
                                equivalence::positive_steady_states(&sys, 8, seed, &tol);
                            found.into_iter().next().ok_or_else(|| {
                                "no positive steady state found; pass --steady-state".to_string()
                            })?
                        }
                    }
                }
            };
            let out = equivalence::cb_realize(&sys, &state, &tol).map_err(|e| e.to_string())?;
            if cli.json {
                println!("{}", parser::emit_json(&Report::CbFeasibility(&out)));
            } else if out.feasible {
                println!("feasible");
                println!("state: {}", csv(&out.steady_state_used));
                if let Some(realized) = &out.realized_system {
                    println!("realization edges: {}", realized.network().edges().len());
                }
            } else {
                println!("infeasible");
                println!("state: {}", csv(&out.steady_state_used));
            }
            if out.steady_residual > tol.steady_state_rel {
                eprintln!(
                    "warning: state is not a steady state (residual {:e}); balance requires one",
                    out.steady_residual
                );
            }
            Ok(ExitCode::from(if out.feasible { 0 } else { 1 }))
        }
        Command::Simulate { file, x0, horizon } => {
            let sys = load_system(file, rates, false)?;
            let start = match x0 {
                Some(s) => parse_csv(s)?,
                None => vec![1.0; sys.dimension()],
            };
            let traj =
                dynamics::integrate(&sys, &start, *horizon, &IntegrateOptions::default(), &tol)
                    .map_err(|e| e.to_string())?;
            if cli.json {
                println!("{}", parser::emit_json(&Report::Trajectory(&traj)));
            } else {
                eprintln!("verdict: {}", verdict_name(traj.verdict));
                print!("{}", traj.to_csv());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckEquiv { a, b } => {
            let sa = load_system(a, rates.clone(), false)?;
            let sb = load_system(b, None, false)?;
            let rep = equivalence::dynamically_equivalent(&sa, &sb, &tol)
                .map_err(|e| e.to_string())?;
            if cli.json {
                println!("{}", parser::emit_json(&Report::Equivalence(&rep)));
            } else if rep.equivalent {
                println!("equivalent");
            } else {
                println!("not equivalent (max residual {:e})", rep.max_residual);
            }
            Ok(ExitCode::from(if rep.equivalent { 0 } else { 1 }))
        }
        Command::CheckBalance { file, steady_state } => {
            let sys = load_system(file, rates, false)?;
            let state = parse_csv(steady_state)?;
            let mut all_pass = true;
            let mut json_parts = Vec::new();

            let (cb, cb_rows) = balancing::check_complex_balance(&sys, &state, &tol);
            all_pass &= cb.balanced;
            if cli.json {
                json_parts.push(format!(
                    "\"complex\":{}",
                    parser::emit_json(&Report::ComplexBalance(&cb, &cb_rows))
                ));
            } else {
                println!(
                    "complex balance: {} (max residual {:e})",
                    pass(cb.balanced),
                    cb.max_residual
                );
            }
            if sys.network().is_reversible() {
                let (db, db_rows) =
                    balancing::check_detailed_balance(&sys, &state, &tol).unwrap();
                all_pass &= db.balanced;
                let weg = balancing::wegscheider_check(&sys, &tol).unwrap();
                let weg_pass = matches!(weg, WegscheiderOutcome::Pass);
                all_pass &= weg_pass;
                if cli.json {
                    json_parts.push(format!(
                        "\"detailed\":{}",
                        parser::emit_json(&Report::DetailedBalance(&db, &db_rows))
                    ));
                    json_parts.push(format!("\"wegscheider\":{{\"pass\":{weg_pass}}}"));
                } else {
                    println!(
                        "detailed balance: {} (max residual {:e})",
                        pass(db.balanced),
                        db.max_residual
                    );
                    println!("rate-constant (Wegscheider) condition: {}", pass(weg_pass));
                }
            }
            if cli.json {
                println!("{{{}}}", json_parts.join(","));
            }
            Ok(ExitCode::from(if all_pass { 0 } else { 1 }))
        }
        Command::Sweep { file, grid, vary, query } => {
            let sys = load_system(file, rates, false)?;
            let grid = parse_grid(grid)?;
            let vary = vary.checked_sub(1).ok_or("--vary is 1-based")?;
            if vary >= sys.rates().len() {
                return Err(format!(
                    "--vary {} out of range: system has {} rates",
                    vary + 1,
                    sys.rates().len()
                ));
            }
            let template = sys.clone();
            let family = move |p: f64| -> Result<MassActionSystem, String> {
                if !(p > 0.0) {
                    return Err("parameter must be positive".into());
                }
                let mut rates = template.rates().to_vec();
                rates[vary] = p;
                MassActionSystem::new(template.network().clone(), rates)
                    .map_err(|e| e.to_string())
            };
            let q = match query.as_str() {
                "cb" => SweepQuery::ComplexBalanced { state_attempts: 5, seed },
                "st" => SweepQuery::SingleTarget,
                other => return Err(format!("unknown query '{other}' (use cb or st)")),
            };
            let result = equivalence::region_sweep(family, &grid, q, &tol);
            if cli.json {
                println!("{}", parser::emit_json(&Report::Sweep(&result)));
            } else {
                println!("{:>14}  {:>10}  witness", "parameter", "feasible");
                for row in &result.rows {
                    let feas = match (row.feasible, &row.error) {
                        (Some(f), _) => f.to_string(),
                        (None, Some(e)) => format!("error: {e}"),
                        (None, None) => "?".to_string(),
                    };
                    println!("{:>14.6e}  {:>10}  {}", row.parameter, feas, row.witness_summary);
                }
                for b in &result.boundaries {
                    println!("boundary near {:.6e}", b);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::ConvergedInterior => "CONVERGED_INTERIOR",
        Verdict::ApproachedBoundary => "APPROACHED_BOUNDARY",
        Verdict::Diverged => "DIVERGED",
        Verdict::Inconclusive => "INCONCLUSIVE",
    }
}

fn load(path: &PathBuf) -> Result<ParsedInput, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        parser::parse_network_json(&text)
    } else {
        parser::parse_network(&text)
    };
    parsed.map_err(|e| format!("{}: {e}", path.display()))
}

/// Load a file as a system. `rates` override the file; `unit_default` allows
/// rateless networks by assigning unit rates (for rate-independent queries).
fn load_system(
    path: &PathBuf,
    rates: Option<Vec<f64>>,
    unit_default: bool,
) -> Result<MassActionSystem, String> {
    let parsed = load(path)?;
    let rates = match (&parsed, rates, unit_default) {
        (ParsedInput::Network(n), None, true) => Some(vec![1.0; n.edges().len()]),
        (_, r, _) => r,
    };
    parsed.into_system(rates).map_err(|e| e.to_string())
}

fn parse_csv(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number '{p}'")))
        .collect()
}

fn csv(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",")
}

/// Grid spec lo:hi:count or lo:hi:count:log.
fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 && parts.len() != 4 {
        return Err("grid spec is lo:hi:count[:log]".into());
    }
    let lo: f64 = parts[0].parse().map_err(|_| "bad grid lower bound")?;
    let hi: f64 = parts[1].parse().map_err(|_| "bad grid upper bound")?;
    let count: usize = parts[2].parse().map_err(|_| "bad grid count")?;
    let log = match parts.get(3) {
        Some(&"log") => true,
        Some(other) => return Err(format!("unknown grid mode '{other}'")),
        None => false,
    };
    if count < 1 {
        return Err("grid needs at least one point".into());
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    if log && !(lo > 0.0 && hi > 0.0) {
        return Err("log grid needs positive bounds".into());
    }
    let pts = (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            if log {
                (lo.ln() + t * (hi.ln() - lo.ln())).exp()
            } else {
                lo + t * (hi - lo)
            }
        })
        .collect();
    Ok(pts)
}
