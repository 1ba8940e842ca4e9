//! Problem data: running cost, coupling, terminal cost and initial
//! density, together with the (truncated) Hamiltonian, the control bound
//! M, and the CFL checker.

use crate::error::{MfgError, Result};
use crate::torus_grid::{restrict_ih, Grid, ScalarField};
use std::sync::Arc;

pub type SpaceFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type TimeSpaceFn = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;
pub type TimeSpaceVecFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;
pub type CostFn = Arc<dyn Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync>;
pub type CostGradFn = Arc<dyn Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// Running cost in the control variable.
///
/// `Quadratic` is `l(t,x,v) = (alpha/2)||v||^2 + <b(t,x), v> + c(t,x)`
/// with a closed-form conjugate. `Generic` carries an evaluator and its
/// gradient and is conjugated by projected gradient ascent.
#[derive(Clone)]
pub enum RunningCost {
    Quadratic {
        alpha: f64,
        drift: Option<TimeSpaceVecFn>,
        offset: Option<TimeSpaceFn>,
    },
    Generic {
        alpha: f64,
        eval: CostFn,
        grad: CostGradFn,
        /// Estimate of the gradient Lipschitz constant of `l` in `v`,
        /// used to pick the ascent step (default 10*alpha).
        grad_lipschitz: f64,
    },
}

impl RunningCost {
    pub fn quadratic_isotropic(alpha: f64) -> Self {
        RunningCost::Quadratic { alpha, drift: None, offset: None }
    }

    pub fn alpha(&self) -> f64 {
        match self {
            RunningCost::Quadratic { alpha, .. } => *alpha,
            RunningCost::Generic { alpha, .. } => *alpha,
        }
    }

    pub fn eval(&self, t: f64, x: &[f64], v: &[f64]) -> f64 {
        match self {
            RunningCost::Quadratic { alpha, drift, offset } => {
                let sq: f64 = v.iter().map(|vi| vi * vi).sum();
                let mut acc = 0.5 * alpha * sq;
                if let Some(b) = drift {
                    let bv = b(t, x);
                    acc += bv.iter().zip(v).map(|(bi, vi)| bi * vi).sum::<f64>();
                }
                if let Some(c) = offset {
                    acc += c(t, x);
                }
                acc
            }
            RunningCost::Generic { eval, .. } => eval(t, x, v),
        }
    }

    /// Gradient of the running cost in `v`.
    pub fn grad_v(&self, t: f64, x: &[f64], v: &[f64]) -> Vec<f64> {
        match self {
            RunningCost::Quadratic { alpha, drift, .. } => {
                let mut g: Vec<f64> = v.iter().map(|vi| alpha * vi).collect();
                if let Some(b) = drift {
                    let bv = b(t, x);
                    for (gi, bi) in g.iter_mut().zip(bv) {
                        *gi += bi;
                    }
                }
                g
            }
            RunningCost::Generic { grad, .. } => grad(t, x, v),
        }
    }
}

/// Mean-field coupling `f`.
///
/// `Local` applies a monotone scalar map to the reconstructed density
/// value; `Nonlocal` convolves the density with a symmetric PSD kernel on
/// the torus.
#[derive(Clone)]
pub enum Coupling {
    /// No coupling at all (`f = 0`).
    None,
    Local {
        map: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
    Nonlocal {
        kernel: SpaceFn,
    },
}

impl Coupling {
    pub fn identity_local() -> Self {
        Coupling::Local { map: Arc::new(|rho| rho) }
    }
}

/// Full problem data with its declared continuous-level constants.
#[derive(Clone)]
pub struct ProblemSpec {
    pub running_cost: RunningCost,
    pub coupling: Coupling,
    pub terminal_cost: SpaceFn,
    pub initial_density: SpaceFn,
    /// Strong-convexity modulus of the running cost (> 0).
    pub alpha: f64,
    pub l_ell: f64,
    pub l_f: f64,
    pub l_g: f64,
    /// Quadrature points per axis for `I_h` (default 3).
    pub quad_order: usize,
    /// Optional user override for the control bound M.
    pub m_override: Option<f64>,
}

impl ProblemSpec {
    pub fn new(
        running_cost: RunningCost,
        coupling: Coupling,
        terminal_cost: SpaceFn,
        initial_density: SpaceFn,
        l_ell: f64,
        l_f: f64,
        l_g: f64,
    ) -> Result<Self> {
        let alpha = running_cost.alpha();
        if alpha <= 0.0 {
            return Err(MfgError::Config(format!("alpha must be positive, got {alpha}")));
        }
        if l_ell < 0.0 || l_f < 0.0 || l_g < 0.0 {
            return Err(MfgError::Config("Lipschitz constants must be nonnegative".into()));
        }
        Ok(ProblemSpec {
            running_cost,
            coupling,
            terminal_cost,
            initial_density,
            alpha,
            l_ell,
            l_f,
            l_g,
            quad_order: 3,
            m_override: None,
        })
    }

    /// Terminal cost sampled at the nodes.
    pub fn terminal_field(&self, grid: Grid) -> ScalarField {
        let g = self.terminal_cost.clone();
        ScalarField::from_fn(grid, move |x| g(x))
    }

    /// Initial density discretized by `I_h` (renormalized to unit mass to
    /// absorb quadrature error).
    pub fn initial_field(&self, grid: Grid) -> ScalarField {
        let m0 = self.initial_density.clone();
        let mut field = restrict_ih(grid, self.quad_order, move |x| m0(x));
        let mass = field.total_mass();
        if mass > 0.0 {
            field.values.iter_mut().for_each(|v| *v /= mass);
        }
        field
    }
}

/// Result of one (possibly truncated) Hamiltonian evaluation.
#[derive(Debug, Clone)]
pub struct HamiltonianEval {
    pub value: f64,
    /// The optimal control, equal to `-H_p^D(t,x,p)`.
    pub control: Vec<f64>,
    /// Whether the ball constraint `||v|| <= D` was active.
    pub truncated: bool,
}

const GENERIC_MAX_ITER: usize = 100_000;
const GENERIC_TOL: f64 = 1e-10;

/// Truncated Hamiltonian `H^D(t,x,p) = sup_{||v|| <= D} <-p,v> - l(t,x,v)`.
///
/// The quadratic variant is closed-form: the unconstrained maximizer is
/// `v = -(p+b)/alpha` and the ball constraint, when active, projects it
/// radially (the objective is `-(alpha/2)||v - v*||^2 + const`).
pub fn hamiltonian(
    cost: &RunningCost,
    t: f64,
    x: &[f64],
    p: &[f64],
    d_trunc: f64,
) -> Result<HamiltonianEval> {
    if d_trunc < 0.0 {
        return Err(MfgError::Config(format!("truncation D must be nonnegative, got {d_trunc}")));
    }
    match cost {
        RunningCost::Quadratic { alpha, drift, .. } => {
            let b: Vec<f64> = match drift {
                Some(bfn) => bfn(t, x),
                None => vec![0.0; p.len()],
            };
            let mut v: Vec<f64> = p.iter().zip(&b).map(|(pi, bi)| -(pi + bi) / alpha).collect();
            let norm = v.iter().map(|vi| vi * vi).sum::<f64>().sqrt();
            let truncated = norm > d_trunc;
            if truncated {
                let s = d_trunc / norm;
                v.iter_mut().for_each(|vi| *vi *= s);
            }
            let value = -p.iter().zip(&v).map(|(pi, vi)| pi * vi).sum::<f64>()
                - cost.eval(t, x, &v);
            Ok(HamiltonianEval { value, control: v, truncated })
        }
        RunningCost::Generic { alpha, grad, grad_lipschitz, .. } => {
            // Projected gradient ascent on v -> <-p,v> - l(t,x,v) over the
            // D-ball; the objective is alpha-strongly concave.
            let l_inner = if *grad_lipschitz > 0.0 { *grad_lipschitz } else { 10.0 * alpha };
            let step = 1.0 / l_inner;
            let mut v = vec![0.0; p.len()];
            let mut res = f64::INFINITY;
            for it in 0..GENERIC_MAX_ITER {
                let lg = grad(t, x, &v);
                // ascent direction of the concave objective
                let dir: Vec<f64> = p.iter().zip(&lg).map(|(pi, gi)| -pi - gi).collect();
                let mut next: Vec<f64> =
                    v.iter().zip(&dir).map(|(vi, di)| vi + step * di).collect();
                let norm = next.iter().map(|vi| vi * vi).sum::<f64>().sqrt();
                let truncated = norm > d_trunc;
                if truncated {
                    let s = d_trunc / norm;
                    next.iter_mut().for_each(|vi| *vi *= s);
                }
                res = next
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
                    / step;
                v = next;
                if res <= GENERIC_TOL {
                    let value = -p.iter().zip(&v).map(|(pi, vi)| pi * vi).sum::<f64>()
                        - cost.eval(t, x, &v);
                    return Ok(HamiltonianEval { value, control: v, truncated });
                }
                let _ = it;
            }
            Err(MfgError::HamiltonianDiverged { iterations: GENERIC_MAX_ITER, residual: res })
        }
    }
}

/// Discrete coupling field `f(t, ., m)` on a whole slice.
///
/// Local couplings reduce exactly to `F(m(x)/h^d)` (the reconstruction is
/// constant on each cell). Nonlocal couplings are evaluated as a discrete
/// circular convolution with the cell-averaged kernel.
pub fn coupling_field(spec: &ProblemSpec, grid: Grid, t_idx: usize, m: &ScalarField) -> ScalarField {
    let _ = t_idx; // built-in couplings are time-independent
    match &spec.coupling {
        Coupling::None => ScalarField::zeros(grid),
        Coupling::Local { map } => {
            let inv_vol = 1.0 / grid.cell_volume();
            ScalarField {
                grid,
                values: m.values.iter().map(|&mv| map(mv * inv_vol)).collect(),
            }
        }
        Coupling::Nonlocal { kernel } => {
            // Cell-averaged kernel K_bar(w) = (1/h^d) \int_{B_h(w)} K.
            let k = kernel.clone();
            let kbar = restrict_ih(grid, spec.quad_order, move |w| k(w))
                .scale(1.0 / grid.cell_volume());
            let mut out = ScalarField::zeros(grid);
            for x in 0..grid.num_nodes() {
                let xc = grid.coords(x);
                let mut acc = 0.0;
                for z in 0..grid.num_nodes() {
                    let zc = grid.coords(z);
                    let diff: Vec<usize> = xc
                        .iter()
                        .zip(&zc)
                        .map(|(&a, &b)| (a + grid.n - b) % grid.n)
                        .collect();
                    acc += kbar.values[grid.node(&diff)] * m.values[z];
                }
                out.values[x] = acc;
            }
            out
        }
    }
}

/// Pointwise accessor for the coupling (wraps `coupling_field`).
pub fn coupling_f(spec: &ProblemSpec, grid: Grid, t_idx: usize, x: usize, m: &ScalarField) -> f64 {
    coupling_field(spec, grid, t_idx, m).values[x]
}

/// Control bound `M = (1/alpha)(2 max ||l_v(t,x,0)|| + sqrt(d)(L_l+L_f+L_g))`.
///
/// The max is taken over the sampled space-time grid (exact for quadratic
/// costs, where it equals `max ||b||`). A user override on the spec wins.
pub fn control_bound_m(spec: &ProblemSpec, grid: Grid) -> f64 {
    if let Some(m) = spec.m_override {
        return m;
    }
    let zero = vec![0.0; grid.d];
    let mut max_lv0 = 0.0f64;
    for t in 0..=grid.t_steps {
        let tp = t as f64 * grid.dt();
        for idx in 0..grid.num_nodes() {
            let x = grid.position(idx);
            let g = spec.running_cost.grad_v(tp, &x, &zero);
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            max_lv0 = max_lv0.max(norm);
        }
    }
    (2.0 * max_lv0 + (grid.d as f64).sqrt() * (spec.l_ell + spec.l_f + spec.l_g)) / spec.alpha
}

#[derive(Debug, Clone, Copy)]
pub struct CflReport {
    pub ok: bool,
    pub dt_max: f64,
    pub h_max: f64,
}

/// Check the step-size condition: `dt <= h^2 / (2d(1-theta)sigma)` and
/// `h <= 2(1-theta)sigma / M`.
pub fn cfl_check(grid: &Grid, m_bound: f64) -> Result<CflReport> {
    if grid.theta >= 1.0 {
        return Err(MfgError::ThetaOne);
    }
    let dt_max = grid.h() * grid.h() / (2.0 * grid.d as f64 * (1.0 - grid.theta) * grid.sigma);
    let h_max = if m_bound > 0.0 {
        2.0 * (1.0 - grid.theta) * grid.sigma / m_bound
    } else {
        f64::INFINITY
    };
    // Tiny relative slack so exact-boundary configurations are accepted
    // despite roundoff in h = 1/N.
    let eps = 1e-12;
    let ok = grid.dt() <= dt_max * (1.0 + eps) && grid.h() <= h_max * (1.0 + eps);
    Ok(CflReport { ok, dt_max, h_max })
}
