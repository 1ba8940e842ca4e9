//! The two coupled passes of the theta-scheme: backward HJB with feedback
//! control extraction and forward Fokker-Planck, including the perturbed
//! variant used by the energy test.
//!
//! Each time step splits the diffusion into an explicit `(1-theta)` part
//! and an implicit `theta` part; first-order terms are explicit and
//! centered.

use crate::error::Result;
use crate::implicit_heat::{solve_b1, HeatSolveOptions};
use crate::problem::{coupling_field, hamiltonian, ProblemSpec};
use crate::torus_grid::{divergence_h, gradient_h, Grid, ScalarField, VectorField};
use std::io::Write;

/// Output of the backward pass.
#[derive(Debug, Clone)]
pub struct HjbResult {
    /// Value function, `T+1` slices.
    pub u: Vec<ScalarField>,
    /// Half-step buffers `u(t+1/2)`, `T` slices (kept for the consistency
    /// harness, which needs their centered gradients).
    pub u_half: Vec<ScalarField>,
    /// Feedback controls, `T` slices.
    pub v: Vec<VectorField>,
    /// Number of nodes at which the Hamiltonian ball constraint was
    /// active. Under the CFL condition with `D = M` this must stay zero.
    pub active_truncation: usize,
}

/// Divergence-form and additive perturbations of the FP pass.
#[derive(Debug, Clone)]
pub struct FpPerturbation {
    pub delta_v: Vec<VectorField>,
    pub delta: Vec<ScalarField>,
}

impl FpPerturbation {
    pub fn zero(grid: Grid) -> Self {
        FpPerturbation {
            delta_v: (0..grid.t_steps).map(|_| VectorField::zeros(grid)).collect(),
            delta: (0..grid.t_steps).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        FpPerturbation {
            delta_v: self.delta_v.iter().map(|f| f.scale(a)).collect(),
            delta: self.delta.iter().map(|f| f.scale(a)).collect(),
        }
    }
}

/// Per-step diagnostics of the forward pass.
#[derive(Debug, Clone)]
pub struct FpStepDiag {
    pub t: usize,
    pub mass: f64,
    pub min_m: f64,
    pub max_abs_v: f64,
}

#[derive(Debug, Clone, Default)]
pub struct FpDiagnostics {
    pub steps: Vec<FpStepDiag>,
}

impl FpDiagnostics {
    pub fn write_csv<W: Write>(&self, mut w: W, active_truncation: usize) -> Result<()> {
        writeln!(w, "t,mass,min_m,max_abs_v,active_truncation")?;
        for s in &self.steps {
            writeln!(w, "{},{},{},{},{}", s.t, s.mass, s.min_m, s.max_abs_v, active_truncation)?;
        }
        Ok(())
    }
}

/// Backward HJB pass over a given density curve (`T+1` slices).
///
/// For t = T-1 down to 0:
///   `u(t+1/2) = B1^{-1} u(t+1)` with `B1 = Id - theta*sigma*dt*Lap_h`;
///   `u(t)   = dt*( -H^D(t,., grad_h u(t+1/2)) + f(t,.,m(t)) )
///             + (Id + (1-theta)*sigma*dt*Lap_h) u(t+1/2)`;
///   `v(t)   = -H_p^D` at the same points.
pub fn hjb_backward(
    m: &[ScalarField],
    spec: &ProblemSpec,
    grid: Grid,
    d_trunc: f64,
) -> Result<HjbResult> {
    debug_assert_eq!(m.len(), grid.t_steps + 1);
    let heat_opts = HeatSolveOptions::default();
    let dt = grid.dt();
    let explicit_w = (1.0 - grid.theta) * grid.sigma * dt;

    let mut u = vec![ScalarField::zeros(grid); grid.t_steps + 1];
    let mut u_half = vec![ScalarField::zeros(grid); grid.t_steps];
    let mut v = vec![VectorField::zeros(grid); grid.t_steps];
    let mut active_truncation = 0usize;

    u[grid.t_steps] = spec.terminal_field(grid);
    for t in (0..grid.t_steps).rev() {
        let half = solve_b1(&u[t + 1], grid.theta * grid.sigma, &heat_opts)?;
        let grad_half = gradient_h(&half);
        let lap_half = crate::torus_grid::laplacian_h(&half);
        let f_slice = coupling_field(spec, grid, t, &m[t]);
        let t_phys = t as f64 * dt;
        let mut slice = ScalarField::zeros(grid);
        let mut v_slice = VectorField::zeros(grid);
        for idx in 0..grid.num_nodes() {
            let x = grid.position(idx);
            let p = grad_half.get(idx);
            let ev = hamiltonian(&spec.running_cost, t_phys, &x, p, d_trunc)?;
            if ev.truncated {
                active_truncation += 1;
            }
            slice.values[idx] = dt * (-ev.value + f_slice.values[idx])
                + half.values[idx]
                + explicit_w * lap_half.values[idx];
            v_slice.set(idx, &ev.control);
        }
        u[t] = slice;
        v[t] = v_slice;
        u_half[t] = half;
    }
    Ok(HjbResult { u, u_half, v, active_truncation })
}

/// Forward Fokker-Planck pass.
///
/// The unperturbed explicit half-step is evaluated in stencil form, which
/// makes the coefficient positivity under CFL directly visible:
///   `m(t+1/2, x) = (1 - 2d(1-theta)sigma dt/h^2) m(t,x)
///      + dt sum_i ((1-theta)sigma/h^2 - v_i(t,x+he_i)/(2h)) m(t,x+he_i)
///      + dt sum_i ((1-theta)sigma/h^2 + v_i(t,x-he_i)/(2h)) m(t,x-he_i)`.
/// Perturbations enter as `- dt div_h(delta_v) + dt delta`, then the
/// implicit step `B1 m(t+1) = m(t+1/2)` closes the update.
pub fn fp_forward(
    v: &[VectorField],
    m0: &ScalarField,
    pert: Option<&FpPerturbation>,
    grid: Grid,
) -> Result<(Vec<ScalarField>, FpDiagnostics)> {
    debug_assert_eq!(v.len(), grid.t_steps);
    let heat_opts = HeatSolveOptions::default();
    let dt = grid.dt();
    let h = grid.h();
    let nu = (1.0 - grid.theta) * grid.sigma / (h * h);
    let diag_coeff = 1.0 - 2.0 * grid.d as f64 * (1.0 - grid.theta) * grid.sigma * dt / (h * h);

    let mut m = Vec::with_capacity(grid.t_steps + 1);
    m.push(m0.clone());
    let mut diags = FpDiagnostics::default();

    for t in 0..grid.t_steps {
        let cur = &m[t];
        let vs = &v[t];
        let mut half = ScalarField::zeros(grid);
        for idx in 0..grid.num_nodes() {
            let mut acc = diag_coeff * cur.values[idx];
            for a in 0..grid.d {
                let up = grid.shift(idx, a, 1);
                let dn = grid.shift(idx, a, -1);
                acc += dt * (nu - vs.component(up, a) / (2.0 * h)) * cur.values[up];
                acc += dt * (nu + vs.component(dn, a) / (2.0 * h)) * cur.values[dn];
            }
            half.values[idx] = acc;
        }
        if let Some(p) = pert {
            let div_dv = divergence_h(&p.delta_v[t]);
            for idx in 0..grid.num_nodes() {
                half.values[idx] += dt * (p.delta[t].values[idx] - div_dv.values[idx]);
            }
        }
        let next = solve_b1(&half, grid.theta * grid.sigma, &heat_opts)?;
        diags.steps.push(FpStepDiag {
            t,
            mass: next.total_mass(),
            min_m: next.min(),
            max_abs_v: vs.norm_inf(),
        });
        m.push(next);
    }
    Ok((m, diags))
}

/// Coefficient positivity of the explicit FP stencil under CFL: both
/// `1 - 2d(1-theta)sigma dt/h^2 >= 0` and
/// `(1-theta)sigma/h^2 +- v_i/(2h) >= 0` for every component.
pub fn stencil_coefficients_positive(grid: Grid, v: &[VectorField]) -> bool {
    let h = grid.h();
    let dt = grid.dt();
    let nu = (1.0 - grid.theta) * grid.sigma / (h * h);
    if 1.0 - 2.0 * grid.d as f64 * (1.0 - grid.theta) * grid.sigma * dt / (h * h) < 0.0 {
        return false;
    }
    for vs in v {
        for idx in 0..grid.num_nodes() {
            for a in 0..grid.d {
                let c = vs.component(idx, a) / (2.0 * h);
                if nu - c < 0.0 || nu + c < 0.0 {
                    return false;
                }
            }
        }
    }
    true
}
