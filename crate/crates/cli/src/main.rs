mod fail;
mod output;
mod problem;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use backlund::chart::fde_terms;
use backlund::verify::{crosscheck_from, grid_scan, tabulate};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fail::Failure;
use output::{CrosscheckReport, FdeReport, LadderReport, VerifyReport};
use problem::{Overrides, Problem};

#[derive(Parser)]
#[command(
    name = "backlund",
    version,
    about = "Build and certify solutions of y y'' = F(z, y^2)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the solution as CSV: z, y, dy, d2y, residual
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Scan the residual on the grid and write a JSON report
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, env = "BACKLUND_TOL", default_value_t = 1e-8, value_parser = positive)]
        tol: f64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Apply an Emden-Fowler step list, then tabulate and verify the result
    Ladder {
        #[command(flatten)]
        common: Common,
        /// `Delta,K` pairs separated by `;`
        #[arg(long)]
        steps: Option<Steps>,
        #[arg(long, env = "BACKLUND_TOL", default_value_t = 1e-8, value_parser = positive)]
        tol: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Integrate from the solution's initial data and compare
    Crosscheck {
        #[command(flatten)]
        common: Common,
        /// Integrator tolerance
        #[arg(long, default_value_t = 1e-9, value_parser = positive)]
        tol: f64,
        /// Largest accepted deviation
        #[arg(long, default_value_t = 1e-5, value_parser = positive)]
        limit: f64,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Sample the auto-Bäcklund condition of the problem's map at random (z, v)
    FdeCert {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9, value_parser = positive)]
        tol: f64,
        #[arg(long, default_value_t = 0.1, value_parser = positive)]
        v_min: f64,
        #[arg(long, default_value_t = 10.0, value_parser = positive)]
        v_max: f64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON)
    problem: PathBuf,
    /// Override the number of grid points
    #[arg(long)]
    grid: Option<usize>,
    /// Check this closed-form expression instead of the file's solution
    #[arg(long)]
    solution_expr: Option<String>,
}

impl Common {
    fn load(&self, steps: Option<&Steps>, force_ladder: bool) -> Result<Problem, Failure> {
        let overrides = Overrides {
            solution_expr: self.solution_expr.clone(),
            steps: steps.map(|s| s.0.clone()),
            grid: self.grid,
            force_ladder,
        };
        problem::load(&self.problem, &overrides)
    }
}

#[derive(Clone, Debug)]
struct Steps(Vec<(f64, f64)>);

impl FromStr for Steps {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut steps = Vec::new();
        for (i, pair) in s.split(';').enumerate() {
            let parts: Vec<&str> = pair.split(',').map(str::trim).collect();
            let [d, k] = parts[..] else {
                return Err(format!("step {i}: expected `Delta,K`, found `{pair}`"));
            };
            let num = |t: &str| t.parse::<f64>().map_err(|e| format!("step {i}: `{t}`: {e}"));
            steps.push((num(d)?, num(k)?));
        }
        Ok(Steps(steps))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("{x} is not a positive finite number")),
        Err(e) => Err(e.to_string()),
    }
}

fn check(e: backlund::Error) -> Failure {
    Failure::Check(e.to_string())
}

fn verdict(pass: bool, what: &str) -> Result<(), Failure> {
    if pass {
        Ok(())
    } else {
        Err(Failure::Check(what.to_string()))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate { common, out } => {
            let p = common.load(None, false)?;
            let rows = tabulate(&p.solution, p.equation.as_ref(), p.domain, p.grid).map_err(check)?;
            output::write_table(&mut *output::sink(out.as_deref())?, &rows)
        }
        Command::Verify { common, tol, out } => {
            let p = common.load(None, false)?;
            let g = grid_scan(&p.solution, p.equation.as_ref(), p.domain, p.grid, tol).map_err(check)?;
            output::write_json(&mut *output::sink(out.as_deref())?, &VerifyReport::new(&p.name, &g))?;
            verdict(
                g.pass(),
                &format!("{} of {} points exceed tolerance {tol:e}", g.failures.len(), g.n_points),
            )
        }
        Command::Ladder {
            common,
            steps,
            tol,
            csv,
            json,
        } => {
            if common.solution_expr.is_some() {
                return Err(Failure::input("--solution-expr", "not used by ladder"));
            }
            let p = common.load(steps.as_ref(), true)?;
            if p.family != problem::Family::EmdenFowler1 {
                return Err(Failure::input("family", "ladder needs an emden-fowler-1 problem"));
            }
            let state = p.ladder.clone().expect("ladder state");
            let g = grid_scan(&p.solution, p.equation.as_ref(), p.domain, p.grid, tol).map_err(check)?;
            let rows = tabulate(&p.solution, p.equation.as_ref(), p.domain, p.grid).map_err(check)?;
            let report = LadderReport {
                grid: VerifyReport::new(&p.name, &g),
                r: state.r,
                s: state.s,
                steps: state.steps.iter().map(|&(d, k)| [d, k]).collect(),
            };
            output::write_json(&mut *output::sink(json.as_deref())?, &report)?;
            output::write_table(&mut *output::sink(csv.as_deref())?, &rows)?;
            verdict(
                g.pass(),
                &format!("{} of {} points exceed tolerance {tol:e}", g.failures.len(), g.n_points),
            )
        }
        Command::Crosscheck {
            common,
            tol,
            limit,
            from,
            to,
            out,
        } => {
            let p = common.load(None, false)?;
            let (z0, z1) = (from.unwrap_or(p.domain.lo), to.unwrap_or(p.domain.hi));
            for (z, flag) in [(z0, "--from"), (z1, "--to")] {
                if !p.domain.contains(z) {
                    return Err(Failure::input(flag, format!("{z} lies outside the domain")));
                }
            }
            if !(1e-12..=1e-3).contains(&tol) {
                return Err(Failure::input("--tol", format!("{tol:e} outside [1e-12, 1e-3]")));
            }
            let (traj, dev) = crosscheck_from(&p.solution, p.equation.as_ref(), z0, z1, tol).map_err(check)?;
            let report = CrosscheckReport {
                problem: p.name.clone(),
                tolerance: tol,
                limit,
                z0,
                z1,
                max_deviation: dev,
                accepted_steps: traj.stats.accepted,
                rejected_steps: traj.stats.rejected,
                pass: dev <= limit,
            };
            output::write_json(&mut *output::sink(out.as_deref())?, &report)?;
            verdict(report.pass, &format!("deviation {dev:e} exceeds {limit:e}"))
        }
        Command::FdeCert {
            common,
            samples,
            seed,
            tol,
            v_min,
            v_max,
            out,
        } => {
            if samples == 0 {
                return Err(Failure::input("--samples", "must be at least 1"));
            }
            if v_min >= v_max {
                return Err(Failure::input(
                    "--v-min",
                    format!("{v_min} must be below --v-max {v_max}"),
                ));
            }
            let p = common.load(None, false)?;
            let f = p.map.as_ref().ok_or_else(|| {
                Failure::input(
                    "Delta",
                    "missing; fde-cert needs a map (Delta and K, steps, or moebius)",
                )
            })?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (lo, hi) = (p.domain.lo, p.domain.hi);
            let mut report = FdeReport {
                problem: p.name.clone(),
                tolerance: tol,
                samples,
                seed,
                max_abs_residual: 0.0,
                max_rel_residual: 0.0,
                argmax_z: lo,
                argmax_v: v_min,
                pass: true,
            };
            for _ in 0..samples {
                let z = rng.gen_range(lo..=hi);
                let v = (rng.gen_range(v_min.ln()..=v_max.ln())).exp();
                let t = fde_terms(&p.structure, f, z, v).map_err(|e| check(e.at_point(z)))?;
                report.max_abs_residual = report.max_abs_residual.max(t.residual.abs());
                if t.relative() > report.max_rel_residual {
                    report.max_rel_residual = t.relative();
                    report.argmax_z = z;
                    report.argmax_v = v;
                }
            }
            report.pass = report.max_rel_residual <= tol;
            output::write_json(&mut *output::sink(out.as_deref())?, &report)?;
            verdict(
                report.pass,
                &format!("fde residual {:e} exceeds {tol:e}", report.max_rel_residual),
            )
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("backlund: {e}");
            e.exit_code()
        }
    }
}
