//! Dispatch from parsed flags to the owning library module.
//!
//! Each handler resolves defaults, validates flag *combinations* (the
//! modules validate the values), runs the sweep, and returns the canonical
//! parameter list — the one echoed in metadata and replay lines — together
//! with the result table.

use std::f64::consts::E;

use reset_search::eigen1d::{self, Params1d};
use reset_search::eigen_radial::{self, ParamsRadial};
use reset_search::mc::{self, SimConfig, SurvivalEstimate};
use reset_search::speed::{classify_schedule, FrontSchedule};
use reset_search::target::{
    self, SearchModel, TargetDistribution, TargetError,
};

use crate::args::{
    Cli, Command, CompareArgs, DistKind, Eig1dArgs, EigRadialArgs, LaplaceArgs, SimulateArgs,
    SpeedClassifyArgs, SurvivalArgs, TargetFailArgs,
};
use crate::grid::{canonical_text, parse_grid};
use crate::output::{Cell, Column, RunSpec, Table};
use crate::CliError;

type Params = Vec<(&'static str, String)>;
type Handled = (&'static str, Params, Table);

/// Runs the parsed command and assembles the fully resolved spec.
pub fn execute(cli: &Cli) -> Result<(RunSpec, Table), CliError> {
    let (command, params, table) = match &cli.command {
        Command::Eig1d(args) => run_eig1d(args)?,
        Command::EigRadial(args) => run_eig_radial(args)?,
        Command::Survival(args) => run_survival(args)?,
        Command::Simulate(args) => run_simulate(args)?,
        Command::TargetFail(args) => run_target_fail(args)?,
        Command::Laplace(args) => run_laplace(args)?,
        Command::SpeedClassify(args) => run_speed_classify(args)?,
        Command::Compare(args) => run_compare(args)?,
    };
    let spec = RunSpec { command, params, output_path: cli.out.clone(), format: cli.format };
    Ok((spec, table))
}

/// Shortest round-trip text of a number, for metadata and replay lines.
fn num(value: f64) -> String {
    format!("{value}")
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

/// Resolves the `--dim`/`--eps0` pair: `None` selects the line model,
/// `Some((dim, eps0))` the radial one. Combination errors are usage errors;
/// out-of-range dimensions are left to the radial module.
fn radial_selector(dim: Option<u32>, eps0: Option<f64>) -> Result<Option<(u32, f64)>, CliError> {
    match (dim, eps0) {
        (None, None) | (Some(1), None) => Ok(None),
        (Some(1), Some(_)) => Err(usage("--eps0 applies only to --dim >= 2")),
        (Some(d), Some(e)) => Ok(Some((d, e))),
        (Some(_), None) => Err(usage("radial runs (--dim >= 2) need --eps0")),
        (None, Some(_)) => Err(usage("--eps0 needs --dim >= 2")),
    }
}

fn run_eig1d(args: &Eig1dArgs) -> Result<Handled, CliError> {
    let grid = parse_grid(&args.distance)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &a in &grid {
        let sol = eigen1d::solve(Params1d::new(args.diffusion, args.reset_rate, a)?, 0.0)?;
        rows.push(vec![
            Cell::Float(a),
            Cell::Float(sol.lambda0()),
            Cell::Float(sol.decay_rate()),
            Cell::Float(sol.prefactor()),
            Cell::Float(sol.residual()),
        ]);
    }
    let params = vec![
        ("D", num(args.diffusion)),
        ("r", num(args.reset_rate)),
        ("a", canonical_text(&args.distance)),
    ];
    let table = Table {
        columns: vec![
            Column { name: "a", unit: "length" },
            Column { name: "lambda0", unit: "1/time" },
            Column { name: "q", unit: "1/length" },
            Column { name: "m", unit: "dimensionless" },
            Column { name: "residual", unit: "1/time" },
        ],
        rows,
        notes: vec![],
    };
    Ok(("eig1d", params, table))
}

fn run_eig_radial(args: &EigRadialArgs) -> Result<Handled, CliError> {
    let grid = parse_grid(&args.reset_radius)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &reset_radius in &grid {
        let params = ParamsRadial::new(
            args.diffusion,
            args.reset_rate,
            args.dim,
            args.target_radius,
            reset_radius,
        )?;
        let sol = eigen_radial::solve(params, 0.0)?;
        rows.push(vec![
            Cell::Float(reset_radius),
            Cell::Float(sol.lambda0()),
            Cell::Float(sol.decay_rate()),
            Cell::Float(sol.prefactor(args.tol)?),
            Cell::Float(sol.residual()),
        ]);
    }
    let params = vec![
        ("D", num(args.diffusion)),
        ("r", num(args.reset_rate)),
        ("dim", args.dim.to_string()),
        ("eps0", num(args.target_radius)),
        ("A", canonical_text(&args.reset_radius)),
        ("tol", num(args.tol)),
    ];
    let table = Table {
        columns: vec![
            Column { name: "A", unit: "length" },
            Column { name: "lambda0", unit: "1/time" },
            Column { name: "q", unit: "1/length" },
            Column { name: "m", unit: "dimensionless" },
            Column { name: "residual", unit: "1/time" },
        ],
        rows,
        notes: vec![],
    };
    Ok(("eig-radial", params, table))
}

fn run_survival(args: &SurvivalArgs) -> Result<Handled, CliError> {
    let ts = parse_grid(&args.times)?;
    let mut params = vec![("D", num(args.diffusion)), ("r", num(args.reset_rate))];
    let mut notes = Vec::new();
    let mut rows = Vec::with_capacity(ts.len());

    match radial_selector(args.dim, args.target_radius)? {
        None => {
            let sol =
                eigen1d::solve(Params1d::new(args.diffusion, args.reset_rate, args.distance)?, 0.0)?;
            let m = sol.prefactor();
            notes.push(("lambda0", num(sol.lambda0())));
            notes.push(("q", num(sol.decay_rate())));
            notes.push(("m", num(m)));
            for &t in &ts {
                let p = sol.survival_asymptote(t)?;
                rows.push(vec![
                    Cell::Float(t),
                    Cell::Float(p),
                    Cell::Float(-sol.lambda0() * t - m.ln()),
                ]);
            }
        }
        Some((dim, eps0)) => {
            let model = ParamsRadial::new(
                args.diffusion,
                args.reset_rate,
                dim,
                eps0,
                args.distance,
            )?;
            let sol = eigen_radial::solve(model, 0.0)?;
            let m = sol.prefactor(args.tol)?;
            params.push(("dim", dim.to_string()));
            params.push(("eps0", num(eps0)));
            notes.push(("lambda0", num(sol.lambda0())));
            notes.push(("q", num(sol.decay_rate())));
            notes.push(("m", num(m)));
            for &t in &ts {
                let p = sol.survival_asymptote(t, args.tol)?;
                rows.push(vec![
                    Cell::Float(t),
                    Cell::Float(p),
                    Cell::Float(-sol.lambda0() * t - m.ln()),
                ]);
            }
        }
    }
    params.push(("a", num(args.distance)));
    params.push(("t", canonical_text(&args.times)));
    params.push(("tol", num(args.tol)));
    let table = Table {
        columns: vec![
            Column { name: "t", unit: "time" },
            Column { name: "p_asymptote", unit: "probability" },
            Column { name: "log_p_asymptote", unit: "dimensionless" },
        ],
        rows,
        notes,
    };
    Ok(("survival", params, table))
}

/// Shared Monte Carlo driver for `simulate` and `compare`: validates the
/// dimension/step flag combination and returns the estimates plus the
/// engine name and the canonical model parameters.
fn run_mc(
    diffusion: f64,
    reset_rate: f64,
    distance: f64,
    ts: &[f64],
    n: u64,
    seed: u64,
    dim: Option<u32>,
    eps0: Option<f64>,
    dt: Option<f64>,
    antithetic: bool,
) -> Result<(Vec<SurvivalEstimate>, &'static str, Params), CliError> {
    let horizon = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut cfg = SimConfig {
        n_trajectories: n,
        t_max: horizon,
        dt: 0.0,
        seed,
        antithetic,
    };
    let mut params: Params = vec![("D", num(diffusion)), ("r", num(reset_rate))];
    let (estimates, engine) = match radial_selector(dim, eps0)? {
        None => {
            if dt.is_some() {
                return Err(usage("--dt applies only to --dim >= 2: the line engine is exact"));
            }
            let model = Params1d::new(diffusion, reset_rate, distance)?;
            (mc::simulate_survival_1d(&model, &cfg, ts)?, "exact-event")
        }
        Some((d, e)) => {
            let Some(step) = dt else {
                return Err(usage("radial simulation needs --dt"));
            };
            cfg.dt = step;
            params.push(("dim", d.to_string()));
            params.push(("eps0", num(e)));
            params.push(("dt", num(step)));
            let model = ParamsRadial::new(diffusion, reset_rate, d, e, distance)?;
            (mc::simulate_survival_radial(&model, &cfg, ts)?, "euler-maruyama-bridge")
        }
    };
    params.push(("a", num(distance)));
    Ok((estimates, engine, params))
}

fn run_simulate(args: &SimulateArgs) -> Result<Handled, CliError> {
    let ts = parse_grid(&args.times)?;
    let (estimates, engine, mut params) = run_mc(
        args.diffusion,
        args.reset_rate,
        args.distance,
        &ts,
        args.n,
        args.seed,
        args.dim,
        args.target_radius,
        args.dt,
        args.antithetic,
    )?;
    params.push(("t", canonical_text(&args.times)));
    params.push(("n", args.n.to_string()));
    params.push(("seed", args.seed.to_string()));
    if args.antithetic {
        params.push(("antithetic", String::new()));
    }
    let rows = estimates
        .iter()
        .map(|est| {
            vec![
                Cell::Float(est.t),
                Cell::Float(est.p_hat),
                Cell::Float(est.half_width_95),
                Cell::Count(est.survivors),
            ]
        })
        .collect();
    let table = Table {
        columns: vec![
            Column { name: "t", unit: "time" },
            Column { name: "p_hat", unit: "probability" },
            Column { name: "ci95_half_width", unit: "probability" },
            Column { name: "survivors", unit: "count" },
        ],
        rows,
        notes: vec![("engine", engine.to_string())],
    };
    Ok(("simulate", params, table))
}

fn run_target_fail(args: &TargetFailArgs) -> Result<Handled, CliError> {
    let ts = parse_grid(&args.times)?;

    // Resolve the law family to (B, l), rejecting contradictory flags.
    let forbid = |flag: &'static str, given: bool| {
        if given {
            Err(usage(format!("--{flag} does not apply to --dist {}", args.dist.name())))
        } else {
            Ok(())
        }
    };
    let check_l = |implied: f64| match args.stretch_exponent {
        Some(l) if l != implied => Err(usage(format!(
            "--dist {} implies --l {implied}, got {l}",
            args.dist.name()
        ))),
        _ => Ok(()),
    };
    let (dist, law_params): (TargetDistribution, Params) = match args.dist {
        DistKind::Gaussian => {
            forbid("rate", args.rate.is_some())?;
            forbid("B", args.tail_coefficient.is_some())?;
            check_l(2.0)?;
            let sigma = args.sigma.ok_or_else(|| usage("--dist gaussian needs --sigma"))?;
            (TargetDistribution::gaussian(sigma, args.dim)?, vec![("sigma", num(sigma))])
        }
        DistKind::Exponential => {
            forbid("sigma", args.sigma.is_some())?;
            forbid("B", args.tail_coefficient.is_some())?;
            check_l(1.0)?;
            let rate = args.rate.ok_or_else(|| usage("--dist exponential needs --rate"))?;
            (TargetDistribution::exponential(rate, args.dim)?, vec![("rate", num(rate))])
        }
        DistKind::Stretched => {
            forbid("sigma", args.sigma.is_some())?;
            forbid("rate", args.rate.is_some())?;
            let b = args.tail_coefficient.ok_or_else(|| usage("--dist stretched needs --B"))?;
            let l = args.stretch_exponent.ok_or_else(|| usage("--dist stretched needs --l"))?;
            (TargetDistribution::new(b, l, args.dim)?, vec![("B", num(b)), ("l", num(l))])
        }
    };

    let (model, mut params) = build_model(args.diffusion, args.reset_rate, args.dim, args.target_radius)?;
    params.push(("dist", args.dist.name().to_string()));
    params.extend(law_params);
    params.push(("t", canonical_text(&args.times)));
    params.push(("tol", num(args.tol)));

    let l = dist.stretch_exponent();
    let mut rows = Vec::with_capacity(ts.len());
    for &t in &ts {
        let log_f = target::log_failure_probability(&dist, &model, t, args.tol)?;
        // Same definition as the library's scaling functional, reusing the
        // already-computed log failure; undefined (NaN) until ln ln t > 0.
        let scaling = if t > E { log_f / t.ln().powf(l) } else { f64::NAN };
        rows.push(vec![
            Cell::Float(t),
            Cell::Float(log_f),
            Cell::Float(log_f.exp().min(1.0)),
            Cell::Float(scaling),
        ]);
    }
    let table = Table {
        columns: vec![
            Column { name: "t", unit: "time" },
            Column { name: "log_failure", unit: "dimensionless" },
            Column { name: "failure", unit: "probability" },
            Column { name: "scaling_functional", unit: "dimensionless" },
        ],
        rows,
        notes: vec![],
    };
    Ok(("target-fail", params, table))
}

/// Builds the search model for the `--dim`-selected geometry along with the
/// canonical `D, r[, dim, eps0]` parameter prefix.
fn build_model(
    diffusion: f64,
    reset_rate: f64,
    dim: u32,
    eps0: Option<f64>,
) -> Result<(SearchModel, Params), CliError> {
    let mut params: Params = vec![("D", num(diffusion)), ("r", num(reset_rate))];
    let model = match radial_selector(Some(dim), eps0)? {
        None => SearchModel::one_dimensional(diffusion, reset_rate)?,
        Some((d, e)) => {
            params.push(("dim", d.to_string()));
            params.push(("eps0", num(e)));
            SearchModel::radial(diffusion, reset_rate, d, e)?
        }
    };
    Ok((model, params))
}

fn run_laplace(args: &LaplaceArgs) -> Result<Handled, CliError> {
    let ts = parse_grid(&args.times)?;
    let (b, l) = (args.tail_coefficient, args.stretch_exponent);
    let (kappa, big_r) = (args.kappa, args.rate_prefactor);
    let mut rows = Vec::with_capacity(ts.len());
    for &t in &ts {
        let point = match target::laplace_minimize(b, l, kappa, big_r, t) {
            Ok(point) => Some(point),
            // Below the two-critical-point threshold the minimiser does not
            // exist yet; the bounds and the direct integral still do.
            Err(TargetError::PreAsymptotic { .. }) => None,
            Err(err) => return Err(err.into()),
        };
        let bounds = target::laplace_bound_check(b, l, kappa, big_r, t, args.epsilon, args.alpha)?;
        rows.push(vec![
            Cell::Float(t),
            Cell::Float(point.map_or(f64::NAN, |p| p.a_star)),
            Cell::Float(point.map_or(f64::NAN, |p| p.gamma_at_star)),
            Cell::Float(bounds.lower_log),
            Cell::Float(bounds.integral_log),
            Cell::Float(bounds.upper_log),
            Cell::Count(u64::from(bounds.bracketed)),
        ]);
    }
    let params = vec![
        ("B", num(b)),
        ("l", num(l)),
        ("kappa", num(kappa)),
        ("R", num(big_r)),
        ("t", canonical_text(&args.times)),
        ("epsilon", num(args.epsilon)),
        ("alpha", num(args.alpha)),
    ];
    let table = Table {
        columns: vec![
            Column { name: "t", unit: "time" },
            Column { name: "a_star", unit: "length" },
            Column { name: "gamma_at_star", unit: "dimensionless" },
            Column { name: "lower_log", unit: "dimensionless" },
            Column { name: "integral_log", unit: "dimensionless" },
            Column { name: "upper_log", unit: "dimensionless" },
            Column { name: "bracketed", unit: "boolean" },
        ],
        rows,
        notes: vec![],
    };
    Ok(("laplace", params, table))
}

fn run_speed_classify(args: &SpeedClassifyArgs) -> Result<Handled, CliError> {
    let ts = parse_grid(&args.times)?;
    let (model, mut params) =
        build_model(args.diffusion, args.reset_rate, args.dim, args.target_radius)?;
    params.push(("alpha", num(args.alpha)));
    params.push(("beta", num(args.beta)));
    params.push(("c", num(args.constant)));
    params.push(("t", canonical_text(&args.times)));
    params.push(("threshold", num(args.threshold)));

    let schedule = FrontSchedule::from_coeffs(args.alpha, args.beta, args.constant);
    let report = classify_schedule(&schedule, &model, &ts, args.threshold)?;

    let rows = report
        .rows
        .iter()
        .map(|row| {
            vec![
                Cell::Float(row.t),
                Cell::Float(row.offset),
                Cell::Float(row.drift),
                Cell::Float(row.corrected_drift),
                Cell::Float(row.log_lambda_t),
                Cell::Float(row.lambda_t),
            ]
        })
        .collect();
    let table = Table {
        columns: vec![
            Column { name: "t", unit: "time" },
            Column { name: "offset", unit: "length" },
            Column { name: "drift", unit: "length" },
            Column { name: "corrected_drift", unit: "length" },
            Column { name: "log_lambda_t", unit: "dimensionless" },
            Column { name: "lambda_t", unit: "dimensionless" },
        ],
        rows,
        notes: vec![
            ("regime", report.regime.to_string()),
            ("front_scale", num(report.front_scale)),
            ("gamma_critical", num(report.gamma_critical)),
        ],
    };
    Ok(("speed-classify", params, table))
}

fn run_compare(args: &CompareArgs) -> Result<Handled, CliError> {
    let ts = parse_grid(&args.times)?;
    let (estimates, engine, mut params) = run_mc(
        args.diffusion,
        args.reset_rate,
        args.distance,
        &ts,
        args.n,
        args.seed,
        args.dim,
        args.target_radius,
        args.dt,
        args.antithetic,
    )?;
    params.push(("t", canonical_text(&args.times)));
    params.push(("n", args.n.to_string()));
    params.push(("seed", args.seed.to_string()));
    if args.antithetic {
        params.push(("antithetic", String::new()));
    }
    params.push(("tol", num(args.tol)));

    // Analytic reference from the matching eigenproblem.
    let mut notes = vec![("engine", engine.to_string())];
    let analytic: Vec<f64> = match radial_selector(args.dim, args.target_radius)? {
        None => {
            let sol = eigen1d::solve(
                Params1d::new(args.diffusion, args.reset_rate, args.distance)?,
                0.0,
            )?;
            notes.push(("lambda0", num(sol.lambda0())));
            notes.push(("m", num(sol.prefactor())));
            ts.iter().map(|&t| sol.survival_asymptote(t)).collect::<Result<_, _>>()?
        }
        Some((d, e)) => {
            let sol = eigen_radial::solve(
                ParamsRadial::new(args.diffusion, args.reset_rate, d, e, args.distance)?,
                0.0,
            )?;
            notes.push(("lambda0", num(sol.lambda0())));
            notes.push(("m", num(sol.prefactor(args.tol)?)));
            ts.iter().map(|&t| sol.survival_asymptote(t, args.tol)).collect::<Result<_, _>>()?
        }
    };

    let rows = estimates
        .iter()
        .zip(analytic.iter())
        .map(|(est, &p)| {
            vec![
                Cell::Float(est.t),
                Cell::Float(est.p_hat),
                Cell::Float(est.half_width_95),
                Cell::Float(p),
                Cell::Float(est.p_hat / p),
            ]
        })
        .collect();
    let table = Table {
        columns: vec![
            Column { name: "t", unit: "time" },
            Column { name: "mc_p", unit: "probability" },
            Column { name: "mc_ci", unit: "probability" },
            Column { name: "analytic_p", unit: "probability" },
            Column { name: "ratio", unit: "dimensionless" },
        ],
        rows,
        notes,
    };
    Ok(("compare", params, table))
}
