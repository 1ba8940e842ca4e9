//! The abstract discrete mean field game in kernel form.
//!
//! The theta-scheme is a special case of a discrete MFG whose transition
//! kernel is affine in the control,
//! `pi(t,x,y,w) = pi0(x,y) + dt*<pi1(x,y), w>`, with
//! `pi0(x,y) = B1^{-1}(y,x) + dt*(B1^{-1}B2)(y,x)` and
//! `pi1(x,y)_i = (B1^{-1}(y,x+he_i) - B1^{-1}(y,x-he_i)) / (2h)`.
//! This module builds the dense kernels on small grids, runs the
//! Kolmogorov and dynamic-programming recursions in kernel form, and
//! evaluates both sides of the fundamental inequality. It exists to
//! cross-check the stencil-form engines of `theta_scheme`, which share no
//! code with it.

use crate::error::{MfgError, Result};
use crate::implicit_heat::{solve_b1, HeatSolveOptions};
use crate::problem::{coupling_f, hamiltonian, ProblemSpec};
use crate::torus_grid::{laplacian_h, Grid, ScalarField, VectorField};
use rayon::prelude::*;

/// Hard cap on the number of nodes for the dense kernel build.
pub const MAX_DENSE_NODES: usize = 4096;

/// Dense, time-independent transition kernels. `pi0` is stored row-major
/// as `pi0[x * n + y]`, `pi1` as `pi1[(x * n + y) * d + i]`.
#[derive(Debug, Clone)]
pub struct TransitionModel {
    pub grid: Grid,
    pub pi0: Vec<f64>,
    pub pi1: Vec<f64>,
    /// Control bound `D` of the truncated Hamiltonian.
    pub control_bound: f64,
}

impl TransitionModel {
    #[inline]
    pub fn pi0_at(&self, x: usize, y: usize) -> f64 {
        self.pi0[x * self.grid.num_nodes() + y]
    }

    #[inline]
    pub fn pi1_at(&self, x: usize, y: usize) -> &[f64] {
        let d = self.grid.d;
        let base = (x * self.grid.num_nodes() + y) * d;
        &self.pi1[base..base + d]
    }
}

/// Build the kernels by solving `N^d` unit-vector systems with the
/// spectral heat solver: column `x` of `B1^{-1}` is `B1^{-1} e_x`.
pub fn build_transition(grid: Grid, spec: &ProblemSpec) -> Result<TransitionModel> {
    let n = grid.num_nodes();
    if n > MAX_DENSE_NODES {
        return Err(MfgError::TransitionSizeGuard { actual: n, max: MAX_DENSE_NODES });
    }
    let c = grid.theta * grid.sigma;
    let dt = grid.dt();
    let h = grid.h();
    let explicit_w = (1.0 - grid.theta) * grid.sigma;
    let opts = HeatSolveOptions::default();

    // cols[x][y] = B1^{-1}(y, x)
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut e = ScalarField::zeros(grid);
            e.values[x] = 1.0;
            solve_b1(&e, c, &opts).map(|f| f.values)
        })
        .collect::<Result<_>>()?;

    let mut pi0 = vec![0.0f64; n * n];
    let mut pi1 = vec![0.0f64; n * n * grid.d];
    for x in 0..n {
        // B2 e_x applied first, then B1^{-1}: B1^{-1} and B2 commute, so
        // the column of B1^{-1}B2 is (1-theta)sigma * Lap_h(B1^{-1} e_x).
        let col = ScalarField { grid, values: cols[x].clone() };
        let lap_col = laplacian_h(&col);
        for y in 0..n {
            pi0[x * n + y] = cols[x][y] + dt * explicit_w * lap_col.values[y];
        }
        for a in 0..grid.d {
            let xp = grid.shift(x, a, 1);
            let xm = grid.shift(x, a, -1);
            for y in 0..n {
                pi1[(x * n + y) * grid.d + a] = (cols[xp][y] - cols[xm][y]) / (2.0 * h);
            }
        }
    }
    let control_bound = crate::problem::control_bound_m(spec, grid);
    Ok(TransitionModel { grid, pi0, pi1, control_bound })
}

/// Forward Kolmogorov recursion in kernel form:
/// `m(t+1,y) = sum_x (pi0(x,y) + dt*<pi1(x,y), v(t,x)>) m(t,x) [+ delta(t,y)]`.
pub fn kolmogorov_roll(
    model: &TransitionModel,
    v: &[VectorField],
    m0: &ScalarField,
    delta: Option<&[ScalarField]>,
) -> Result<Vec<ScalarField>> {
    let grid = model.grid;
    let n = grid.num_nodes();
    debug_assert_eq!(v.len(), grid.t_steps);
    let worst = v.iter().map(|f| f.norm_inf()).fold(0.0f64, f64::max);
    if worst > model.control_bound * (1.0 + 1e-12) + 1e-12 {
        return Err(MfgError::ControlBoundViolation { max_abs: worst, bound: model.control_bound });
    }
    let dt = grid.dt();
    let mut m = Vec::with_capacity(grid.t_steps + 1);
    m.push(m0.clone());
    for t in 0..grid.t_steps {
        let cur = &m[t];
        let vs = &v[t];
        let mut next = ScalarField::zeros(grid);
        for x in 0..n {
            let mx = cur.values[x];
            if mx == 0.0 {
                continue;
            }
            let vx = vs.get(x);
            for y in 0..n {
                let mut w = model.pi0[x * n + y];
                let p1 = &model.pi1[(x * n + y) * grid.d..(x * n + y + 1) * grid.d];
                for a in 0..grid.d {
                    w += dt * p1[a] * vx[a];
                }
                next.values[y] += w * mx;
            }
        }
        if let Some(ds) = delta {
            for y in 0..n {
                next.values[y] += ds[t].values[y];
            }
        }
        m.push(next);
    }
    Ok(m)
}

/// Backward dynamic-programming recursion in kernel form:
/// `p0 = pi0 u(t+1)`, `p1 = pi1 u(t+1)`,
/// `u(t,x) = (-H^D(t,x,p1) + f(t,x,m(t))) dt + p0 [+ eta(t,x)]`,
/// `v(t,x) = -H_p^D(t,x,p1)`.
pub fn dp_roll(
    model: &TransitionModel,
    m: &[ScalarField],
    spec: &ProblemSpec,
    eta: Option<&[ScalarField]>,
) -> Result<(Vec<ScalarField>, Vec<VectorField>)> {
    let grid = model.grid;
    let n = grid.num_nodes();
    debug_assert_eq!(m.len(), grid.t_steps + 1);
    let dt = grid.dt();
    let mut u = vec![ScalarField::zeros(grid); grid.t_steps + 1];
    let mut v = vec![VectorField::zeros(grid); grid.t_steps];
    u[grid.t_steps] = spec.terminal_field(grid);
    for t in (0..grid.t_steps).rev() {
        let top = u[t + 1].clone();
        let t_phys = t as f64 * dt;
        let mut slice = ScalarField::zeros(grid);
        let mut v_slice = VectorField::zeros(grid);
        for x in 0..n {
            let mut p0 = 0.0;
            let mut p1 = vec![0.0; grid.d];
            for s in 0..n {
                let us = top.values[s];
                p0 += model.pi0[x * n + s] * us;
                let row = &model.pi1[(x * n + s) * grid.d..(x * n + s + 1) * grid.d];
                for a in 0..grid.d {
                    p1[a] += row[a] * us;
                }
            }
            let xs = grid.position(x);
            let ev = hamiltonian(&spec.running_cost, t_phys, &xs, &p1, model.control_bound)?;
            let f_val = coupling_f(spec, grid, t, x, &m[t]);
            slice.values[x] = (-ev.value + f_val) * dt + p0;
            if let Some(es) = eta {
                slice.values[x] += es[t].values[x];
            }
            v_slice.set(x, &ev.control);
        }
        u[t] = slice;
        v[t] = v_slice;
    }
    Ok((u, v))
}

/// A triple satisfying the perturbed system together with its
/// perturbations `eta` (dynamic programming) and `delta` (Kolmogorov).
#[derive(Debug, Clone)]
pub struct PerturbedSolution {
    pub u: Vec<ScalarField>,
    pub v: Vec<VectorField>,
    pub m: Vec<ScalarField>,
    pub eta: Vec<ScalarField>,
    pub delta: Vec<ScalarField>,
}

#[derive(Debug, Clone, Copy)]
pub struct FundamentalGap {
    pub lhs: f64,
    pub rhs: f64,
}

/// Both sides of the fundamental inequality:
/// `lhs = (dt*alpha/2) sum_{t,x} ||v - vbar||^2 (m + mbar)(t,x)`,
/// `rhs = sum_{t,x} (u - ubar)(t+1,x) delta(t,x) + (mbar - m)(t,x) eta(t,x)`.
/// The caller asserts `lhs <= rhs + tol`.
pub fn fundamental_gap(
    exact_u: &[ScalarField],
    exact_v: &[VectorField],
    exact_m: &[ScalarField],
    perturbed: &PerturbedSolution,
    spec: &ProblemSpec,
) -> Result<FundamentalGap> {
    let grid = exact_u[0].grid;
    let n = grid.num_nodes();
    let dt = grid.dt();
    let min_m = perturbed.m.iter().map(|s| s.min()).fold(f64::INFINITY, f64::min);
    if min_m < -1e-12 {
        return Err(MfgError::NegativeMass(min_m));
    }
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for t in 0..grid.t_steps {
        for x in 0..n {
            let dv: f64 = (0..grid.d)
                .map(|a| {
                    let e = perturbed.v[t].component(x, a) - exact_v[t].component(x, a);
                    e * e
                })
                .sum();
            lhs += dv * (perturbed.m[t].values[x] + exact_m[t].values[x]);
            rhs += (perturbed.u[t + 1].values[x] - exact_u[t + 1].values[x])
                * perturbed.delta[t].values[x]
                + (exact_m[t].values[x] - perturbed.m[t].values[x]) * perturbed.eta[t].values[x];
        }
    }
    lhs *= dt * spec.alpha / 2.0;
    Ok(FundamentalGap { lhs, rhs })
}
