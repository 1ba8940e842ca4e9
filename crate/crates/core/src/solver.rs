//! Outer fixed-point loop for the coupled system: iterate
//! `m_{k+1} = (1 - w_k) m_k + w_k phi(m_k)` where
//! `phi = fp_forward . (control extraction) . hjb_backward`, until the
//! residual `||m - phi(m)||_{inf,1}` drops below tolerance.
//!
//! The scheme itself only guarantees existence and uniqueness of the
//! fixed point; the damping strategy is a practical choice. Fictitious
//! weights `w_k = 1/(k+1)` always average, a fixed weight converges much
//! faster on monotone couplings, and the undamped map may cycle.

use crate::error::{MfgError, Result};
use crate::problem::{cfl_check, control_bound_m, ProblemSpec};
use crate::theta_scheme::{fp_forward, hjb_backward};
use crate::torus_grid::{Grid, ScalarField, VectorField};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Damping {
    /// `w_k = 1/(k+1)`: fictitious-play averaging.
    Fictitious,
    /// Fixed relaxation weight in (0, 1].
    Fixed(f64),
    /// `w = 1`: the undamped Picard map.
    Plain,
}

impl Damping {
    fn weight(&self, k: usize) -> f64 {
        match self {
            Damping::Fictitious => 1.0 / (k as f64 + 1.0),
            Damping::Fixed(w) => *w,
            Damping::Plain => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Init {
    /// Uniform density at every time slice.
    Uniform,
    /// Forward diffusion roll of `m0` with zero control.
    DiffusionOnly,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub damping: Damping,
    pub tol: f64,
    pub max_outer: usize,
    pub init: Init,
    /// Skip the CFL check (experiments only).
    pub override_cfl: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            damping: Damping::Fictitious,
            tol: 1e-9,
            max_outer: 5000,
            init: Init::Uniform,
            override_cfl: false,
        }
    }
}

/// One row of the outer iteration log.
#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    pub k: usize,
    pub omega: f64,
    pub residual: f64,
    pub max_abs_v: f64,
    pub min_m: f64,
}

#[derive(Debug, Clone)]
pub struct MfgSolution {
    pub u: Vec<ScalarField>,
    pub v: Vec<VectorField>,
    pub m: Vec<ScalarField>,
    /// `||m - phi(m)||_{inf,1}` at exit.
    pub residual: f64,
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    /// Control bound `M` used for the truncated Hamiltonian.
    pub control_bound: f64,
    /// Largest per-pass count of nodes where the ball constraint was
    /// active, over all outer iterations. Zero under CFL with `D = M`.
    pub max_active_truncation: usize,
}

impl MfgSolution {
    pub fn write_iteration_log<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,omega,residual,max_abs_v,min_m")?;
        for r in &self.history {
            writeln!(w, "{},{},{},{},{}", r.k, r.omega, r.residual, r.max_abs_v, r.min_m)?;
        }
        Ok(())
    }
}

/// `max_t ||a(t) - b(t)||_1` over density curves.
pub fn norm_inf_1(a: &[ScalarField], b: &[ScalarField]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.sub(y).norm_1()).fold(0.0, f64::max)
}

/// One application of `phi`: backward HJB on `m`, extract controls,
/// forward FP. Returns the full triple.
fn apply_phi(
    m: &[ScalarField],
    m0: &ScalarField,
    spec: &ProblemSpec,
    grid: Grid,
    d_trunc: f64,
) -> Result<(Vec<ScalarField>, Vec<VectorField>, Vec<ScalarField>, usize)> {
    let hjb = hjb_backward(m, spec, grid, d_trunc)?;
    let (m_next, _) = fp_forward(&hjb.v, m0, None, grid)?;
    Ok((hjb.u, hjb.v, m_next, hjb.active_truncation))
}

/// Residual `||m - phi(m)||_{inf,1}` of a candidate curve.
pub fn residual(m: &[ScalarField], spec: &ProblemSpec, grid: Grid) -> Result<f64> {
    let d_trunc = control_bound_m(spec, grid);
    let m0 = spec.initial_field(grid);
    let (_, _, m_next, _) = apply_phi(m, &m0, spec, grid, d_trunc)?;
    Ok(norm_inf_1(m, &m_next))
}

fn initial_curve(init: Init, m0: &ScalarField, grid: Grid) -> Result<Vec<ScalarField>> {
    match init {
        Init::Uniform => {
            Ok((0..=grid.t_steps).map(|_| ScalarField::uniform_density(grid)).collect())
        }
        Init::DiffusionOnly => {
            let v: Vec<_> = (0..grid.t_steps).map(|_| VectorField::zeros(grid)).collect();
            let (m, _) = fp_forward(&v, m0, None, grid)?;
            Ok(m)
        }
    }
}

pub fn solve_mfg(spec: &ProblemSpec, grid: Grid, opts: &SolveOptions) -> Result<MfgSolution> {
    if opts.tol <= 0.0 {
        return Err(MfgError::Config(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if let Damping::Fixed(w) = opts.damping {
        if !(0.0 < w && w <= 1.0) {
            return Err(MfgError::Config(format!("fixed damping weight must lie in (0,1], got {w}")));
        }
    }
    let d_trunc = control_bound_m(spec, grid);
    let cfl = cfl_check(&grid, d_trunc)?;
    if !cfl.ok && !opts.override_cfl {
        return Err(MfgError::CflViolation {
            dt: grid.dt(),
            dt_max: cfl.dt_max,
            h: grid.h(),
            h_max: cfl.h_max,
        });
    }

    let m0 = spec.initial_field(grid);
    let mut m = initial_curve(opts.init, &m0, grid)?;
    let mut history = Vec::new();
    let mut best_residual = f64::INFINITY;

    let mut max_active_truncation = 0usize;
    for k in 0..opts.max_outer {
        let (_, v, m_next, truncated) = apply_phi(&m, &m0, spec, grid, d_trunc)?;
        max_active_truncation = max_active_truncation.max(truncated);
        let res = norm_inf_1(&m, &m_next);
        let omega = opts.damping.weight(k);
        let max_abs_v = v.iter().map(|f| f.norm_inf()).fold(0.0, f64::max);
        let min_m = m_next.iter().map(|s| s.min()).fold(f64::INFINITY, f64::min);
        history.push(IterationRecord { k, omega, residual: res, max_abs_v, min_m });
        best_residual = best_residual.min(res);

        if res <= opts.tol {
            // recompute (u, v) at the final m so the triple is consistent
            let (u, v, _, truncated) = apply_phi(&m, &m0, spec, grid, d_trunc)?;
            max_active_truncation = max_active_truncation.max(truncated);
            return Ok(MfgSolution {
                u,
                v,
                m,
                residual: res,
                iterations: k + 1,
                history,
                control_bound: d_trunc,
                max_active_truncation,
            });
        }
        for t in 0..=grid.t_steps {
            for i in 0..grid.num_nodes() {
                m[t].values[i] = (1.0 - omega) * m[t].values[i] + omega * m_next[t].values[i];
            }
        }
    }
    Err(MfgError::MaxOuterExceeded { max_outer: opts.max_outer, residual: best_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Coupling, RunningCost};
    use std::sync::Arc;

    fn coupled_spec(amp: f64) -> ProblemSpec {
        ProblemSpec::new(
            RunningCost::quadratic_isotropic(1.0),
            Coupling::identity_local(),
            Arc::new(move |x: &[f64]| amp * (2.0 * std::f64::consts::PI * x[0]).cos()),
            Arc::new(|_| 1.0),
            0.0,
            0.1,
            amp * 2.0 * std::f64::consts::PI,
        )
        .unwrap()
    }

    #[test]
    fn decoupled_system_converges_in_one_plain_step() {
        let spec = ProblemSpec::new(
            RunningCost::quadratic_isotropic(1.0),
            Coupling::None,
            Arc::new(|x: &[f64]| 0.05 * (2.0 * std::f64::consts::PI * x[0]).cos()),
            Arc::new(|_| 1.0),
            0.0,
            0.0,
            0.05 * 2.0 * std::f64::consts::PI,
        )
        .unwrap();
        let grid = Grid::new(1, 16, 256, 0.75, 0.2).unwrap();
        let opts = SolveOptions { damping: Damping::Plain, ..Default::default() };
        let sol = solve_mfg(&spec, grid, &opts).unwrap();
        // phi is constant in m: one step lands on the fixed point, the
        // second confirms it.
        assert!(sol.iterations <= 2);
        assert!(sol.residual <= opts.tol);
    }

    #[test]
    fn symmetric_problem_has_uniform_solution() {
        let spec = ProblemSpec::new(
            RunningCost::quadratic_isotropic(1.0),
            Coupling::None,
            Arc::new(|_| 0.0),
            Arc::new(|_| 1.0),
            0.0,
            0.0,
            0.0,
        )
        .unwrap();
        let grid = Grid::new(1, 16, 64, 0.75, 0.2).unwrap();
        let opts = SolveOptions { damping: Damping::Plain, ..Default::default() };
        let sol = solve_mfg(&spec, grid, &opts).unwrap();
        for s in &sol.u {
            assert!(s.norm_inf() < 1e-13);
        }
        for s in &sol.v {
            assert!(s.norm_inf() < 1e-13);
        }
        for s in &sol.m {
            for val in &s.values {
                assert!((val - grid.cell_volume()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn iterates_stay_probabilities_and_controls_bounded() {
        let spec = coupled_spec(0.05);
        let grid = Grid::new(1, 16, 256, 0.75, 0.2).unwrap();
        let opts = SolveOptions { damping: Damping::Fixed(0.5), tol: 1e-9, ..Default::default() };
        let sol = solve_mfg(&spec, grid, &opts).unwrap();
        let m_bound = control_bound_m(&spec, grid);
        for rec in &sol.history {
            assert!(rec.min_m >= -1e-12);
            assert!(rec.max_abs_v <= m_bound + 1e-9);
        }
        for s in &sol.m {
            assert!((s.total_mass() - 1.0).abs() < 1e-12);
            assert!(s.min() >= -1e-12);
        }
    }

    #[test]
    fn residual_is_idempotent_on_solution() {
        let spec = coupled_spec(0.05);
        let grid = Grid::new(1, 16, 256, 0.75, 0.2).unwrap();
        let opts = SolveOptions { damping: Damping::Fixed(0.5), tol: 1e-10, ..Default::default() };
        let sol = solve_mfg(&spec, grid, &opts).unwrap();
        let r = residual(&sol.m, &spec, grid).unwrap();
        assert!((r - sol.residual).abs() < 1e-12);
    }

    #[test]
    fn uniqueness_two_inits_agree() {
        let spec = coupled_spec(0.05);
        let grid = Grid::new(1, 16, 256, 0.75, 0.2).unwrap();
        let tol = 1e-9;
        let a = solve_mfg(
            &spec,
            grid,
            &SolveOptions { damping: Damping::Fixed(0.5), tol, init: Init::Uniform, ..Default::default() },
        )
        .unwrap();
        let b = solve_mfg(
            &spec,
            grid,
            &SolveOptions {
                damping: Damping::Fixed(0.5),
                tol,
                init: Init::DiffusionOnly,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(norm_inf_1(&a.m, &b.m) <= 100.0 * tol);
    }

    #[test]
    fn cfl_violation_rejected_without_override() {
        let spec = coupled_spec(0.05);
        // far too few time steps for N = 16
        let grid = Grid::new(1, 16, 8, 0.75, 0.2).unwrap();
        assert!(matches!(
            solve_mfg(&spec, grid, &SolveOptions::default()),
            Err(MfgError::CflViolation { .. })
        ));
    }

    #[test]
    fn max_outer_exceeded_reported() {
        let spec = coupled_spec(0.05);
        let grid = Grid::new(1, 16, 256, 0.75, 0.2).unwrap();
        let opts =
            SolveOptions { damping: Damping::Fictitious, tol: 1e-12, max_outer: 3, ..Default::default() };
        assert!(matches!(
            solve_mfg(&spec, grid, &opts),
            Err(MfgError::MaxOuterExceeded { max_outer: 3, .. })
        ));
    }

    #[test]
    fn iteration_log_format() {
        let spec = coupled_spec(0.05);
        let grid = Grid::new(1, 16, 256, 0.75, 0.2).unwrap();
        let opts = SolveOptions { damping: Damping::Fixed(0.5), ..Default::default() };
        let sol = solve_mfg(&spec, grid, &opts).unwrap();
        let mut buf = Vec::new();
        sol.write_iteration_log(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "k,omega,residual,max_abs_v,min_m");
        assert_eq!(text.lines().count(), sol.iterations + 1);
    }
}
