//! Command-line driver: solve the configured game, run the experiment
//! campaigns, and run the consistency checkers.
//!
//! Exit codes: 0 on success, 2 on validation errors (configuration or
//! CFL), 3 when a check subcommand finds a violated assertion.

use clap::{Parser, Subcommand};
use mfg_theta::error::MfgError;
use mfg_theta::harness::campaigns::{
    run_convergence, run_energy_test, run_fundamental_test, run_solve,
};
use mfg_theta::harness::config::Config;
use mfg_theta::harness::manifest::write_manifest;
use mfg_theta::numerical_hamiltonian::{check_axioms, NumHamiltonian};
use mfg_theta::problem::{cfl_check, control_bound_m};
use mfg_theta::torus_grid::dump_scalar_curve_csv;
use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mfg", about = "Theta-scheme solver for mean field games on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured game and write the solution fields.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Skip the CFL admissibility check (experiments only).
        #[arg(long)]
        override_cfl: bool,
    },
    /// Self-convergence ladder against a fine reference grid.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Energy stability of the perturbed Kolmogorov equation.
    Energy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fundamental inequality on the kernel-form game.
    Fundamental {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the CFL bounds for the configured problem.
    CheckCfl {
        #[arg(long)]
        config: PathBuf,
    },
    /// Audit the numerical-Hamiltonian axioms for the configured cost.
    CheckNumham {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

fn exit_code_for(err: &MfgError) -> ExitCode {
    match err {
        MfgError::Config(_) | MfgError::CflViolation { .. } | MfgError::ThetaTooSmall(_) => {
            ExitCode::from(2)
        }
        _ => ExitCode::from(1),
    }
}

fn run() -> Result<ExitCode, MfgError> {
    mfg_theta::harness::init_threads();
    let cli = Cli::parse();
    match cli.command {
        Command::Solve { config, out, override_cfl } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = Config::from_str(&text)?;
            let sol = run_solve(&cfg, override_cfl)?;
            std::fs::create_dir_all(&out)?;
            write_manifest(&out, &text, 0)?;
            dump_scalar_curve_csv(File::create(out.join("u.csv"))?, &sol.u)?;
            dump_scalar_curve_csv(File::create(out.join("m.csv"))?, &sol.m)?;
            sol.write_iteration_log(File::create(out.join("iterations.csv"))?)?;
            println!(
                "converged in {} iterations, residual {:.3e}",
                sol.iterations, sol.residual
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Convergence { config, out } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = Config::from_str(&text)?;
            let report = run_convergence(&cfg)?;
            std::fs::create_dir_all(&out)?;
            write_manifest(&out, &text, 0)?;
            report.write_csv(File::create(out.join("convergence.csv"))?)?;
            report.write_rates_csv(File::create(out.join("rates.csv"))?)?;
            println!(
                "fitted rates: u {:.3}, m {:.3}",
                report.fitted_rate_u, report.fitted_rate_m
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Energy { config, out, seed } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = Config::from_str(&text)?;
            let report = run_energy_test(&cfg, seed)?;
            std::fs::create_dir_all(&out)?;
            write_manifest(&out, &text, seed)?;
            report.write_csv(File::create(out.join("energy.csv"))?)?;
            for (n, amp) in report.level_means() {
                println!("N = {n}: mean amplification {amp:.6}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fundamental { config, out, seed } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = Config::from_str(&text)?;
            let report = run_fundamental_test(&cfg, seed)?;
            std::fs::create_dir_all(&out)?;
            write_manifest(&out, &text, seed)?;
            report.write_csv(File::create(out.join("fundamental.csv"))?)?;
            if report.all_hold(1e-8) {
                println!("fundamental inequality holds in all {} runs", report.rows.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("fundamental inequality VIOLATED");
                Ok(ExitCode::from(3))
            }
        }
        Command::CheckCfl { config } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = Config::from_str(&text)?;
            let grid = cfg.grid()?;
            let spec = cfg.problem_spec()?;
            let m_bound = control_bound_m(&spec, grid);
            let rep = cfl_check(&grid, m_bound)?;
            println!("M = {m_bound}");
            println!("dt = {} (max {})", grid.dt(), rep.dt_max);
            println!("h = {} (max {})", grid.h(), rep.h_max);
            if rep.ok {
                println!("PASS");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("FAIL");
                Ok(ExitCode::from(3))
            }
        }
        Command::CheckNumham { config, out, seed, samples } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = Config::from_str(&text)?;
            let grid = cfg.grid()?;
            let spec = cfg.problem_spec()?;
            let nh = NumHamiltonian::new(spec.running_cost.clone());
            let report = check_axioms(&nh, grid, samples, seed)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                write_manifest(&dir, &text, seed)?;
                report.write_csv(File::create(dir.join("axioms.csv"))?)?;
            }
            for r in &report.results {
                println!(
                    "{}: {} (max violation {:.3e} over {} samples)",
                    r.axiom,
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.max_violation,
                    r.samples
                );
            }
            if report.all_passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
