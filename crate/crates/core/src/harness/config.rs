//! Problem and campaign configuration: a TOML file with sections
//! `grid`, `cost`, `coupling`, `terminal`, `initial`, `constants`,
//! `solver`, and `campaign`. The schema is documented in the README.

use crate::error::{MfgError, Result};
use crate::harness::expressions::{parse_expression, Expression};
use crate::problem::{Coupling, ProblemSpec, RunningCost};
use crate::solver::{Damping, Init, SolveOptions};
use crate::torus_grid::Grid;
use serde::Deserialize;
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub d: usize,
    pub n: usize,
    pub t: usize,
    pub theta: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostConfig {
    /// Only `"quadratic"` is supported from configuration files; generic
    /// costs are an API-level feature.
    pub variant: String,
    pub alpha: f64,
    /// Constant drift vector `b` (length d), defaults to zero.
    pub b: Option<Vec<f64>>,
    /// Constant offset `c`, defaults to zero.
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    /// `"none"`, `"local"` (with `map`), or `"nonlocal"` (with `kernel`).
    pub variant: String,
    /// Local map id; only `"identity"` is built in.
    pub map: Option<String>,
    /// Kernel expression id for the nonlocal variant.
    pub kernel: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub expression: String,
    /// Multiplies the expression; defaults to 1.
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub l_ell: Option<f64>,
    pub l_f: Option<f64>,
    pub l_g: Option<f64>,
    /// Optional override for the control bound M.
    pub m_override: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// `"fictitious"`, `"fixed"`, or `"plain"`.
    pub damping: Option<String>,
    /// Weight for `"fixed"` damping.
    pub omega: Option<f64>,
    pub tol: Option<f64>,
    pub max_outer: Option<usize>,
    /// `"uniform"` or `"diffusion_only"`.
    pub init: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    /// Grid sizes of the tested levels, strictly increasing.
    pub levels: Option<Vec<usize>>,
    /// Reference grid size for the convergence ladder.
    pub reference: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    /// Perturbation magnitudes for the fundamental-inequality campaign.
    pub magnitudes: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub grid: GridConfig,
    pub cost: CostConfig,
    pub coupling: CouplingConfig,
    pub terminal: DataConfig,
    pub initial: DataConfig,
    #[serde(default)]
    pub constants: ConstantsConfig,
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub campaign: CampaignConfig,
}

impl Config {
    pub fn from_str(text: &str) -> Result<Config> {
        let cfg: Config =
            toml::from_str(text).map_err(|e| MfgError::Config(format!("parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        Config::from_str(&text)
    }

    fn validate(&self) -> Result<()> {
        if self.cost.variant != "quadratic" {
            return Err(MfgError::Config(format!(
                "unsupported cost variant {:?} (only \"quadratic\" is configurable)",
                self.cost.variant
            )));
        }
        if self.cost.alpha <= 0.0 {
            return Err(MfgError::Config(format!(
                "alpha must be positive, got {}",
                self.cost.alpha
            )));
        }
        if let Some(b) = &self.cost.b {
            if b.len() != self.grid.d {
                return Err(MfgError::Config(format!(
                    "drift b has length {}, expected d = {}",
                    b.len(),
                    self.grid.d
                )));
            }
        }
        match self.coupling.variant.as_str() {
            "none" => {}
            "local" => {
                let map = self.coupling.map.as_deref().unwrap_or("identity");
                if map != "identity" {
                    return Err(MfgError::Config(format!("unknown local map {map:?}")));
                }
            }
            "nonlocal" => {
                let k = self.coupling.kernel.as_deref().ok_or_else(|| {
                    MfgError::Config("nonlocal coupling requires a kernel expression".into())
                })?;
                parse_expression(k)?;
            }
            other => {
                return Err(MfgError::Config(format!("unknown coupling variant {other:?}")));
            }
        }
        parse_expression(&self.terminal.expression)?;
        let init = parse_expression(&self.initial.expression)?;
        if init == Expression::Zero {
            return Err(MfgError::Config(
                "initial density cannot be the zero expression".into(),
            ));
        }
        if let Some(s) = &self.solver {
            if let Some(d) = &s.damping {
                match d.as_str() {
                    "fictitious" | "plain" => {}
                    "fixed" => {
                        let w = s.omega.ok_or_else(|| {
                            MfgError::Config("fixed damping requires omega".into())
                        })?;
                        if !(0.0 < w && w <= 1.0) {
                            return Err(MfgError::Config(format!(
                                "omega must lie in (0,1], got {w}"
                            )));
                        }
                    }
                    other => {
                        return Err(MfgError::Config(format!("unknown damping {other:?}")));
                    }
                }
            }
            if let Some(i) = &s.init {
                if i != "uniform" && i != "diffusion_only" {
                    return Err(MfgError::Config(format!("unknown init {i:?}")));
                }
            }
        }
        if let Some(levels) = &self.campaign.levels {
            if !levels.windows(2).all(|w| w[0] < w[1]) {
                return Err(MfgError::Config("levels must be strictly increasing".into()));
            }
            if let Some(r) = self.campaign.reference {
                if let Some(&last) = levels.last() {
                    if r <= last {
                        return Err(MfgError::Config(format!(
                            "reference level {r} must exceed the finest tested level {last}"
                        )));
                    }
                }
                for &l in levels {
                    if r % l != 0 {
                        return Err(MfgError::Config(format!(
                            "reference N = {r} must be a multiple of every level (violated by {l})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.d, self.grid.n, self.grid.t, self.grid.theta, self.grid.sigma)
    }

    /// Grid with the same parameters but a different resolution (used by
    /// the campaign ladders).
    pub fn grid_at(&self, n: usize, t: usize) -> Result<Grid> {
        Grid::new(self.grid.d, n, t, self.grid.theta, self.grid.sigma)
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let cost = RunningCost::Quadratic {
            alpha: self.cost.alpha,
            drift: self.cost.b.clone().map(|b| {
                let b = b.clone();
                Arc::new(move |_t: f64, _x: &[f64]| b.clone()) as _
            }),
            offset: self.cost.c.map(|c| Arc::new(move |_t: f64, _x: &[f64]| c) as _),
        };
        let coupling = match self.coupling.variant.as_str() {
            "none" => Coupling::None,
            "local" => Coupling::identity_local(),
            "nonlocal" => {
                let expr = parse_expression(self.coupling.kernel.as_deref().unwrap())?;
                Coupling::Nonlocal { kernel: Arc::new(move |x: &[f64]| expr.eval(x)) }
            }
            _ => unreachable!("validated"),
        };
        let term_expr = parse_expression(&self.terminal.expression)?;
        let term_amp = self.terminal.amplitude.unwrap_or(1.0);
        let init_expr = parse_expression(&self.initial.expression)?;
        let init_amp = self.initial.amplitude.unwrap_or(1.0);
        let d = self.grid.d;

        let l_g = self
            .constants
            .l_g
            .unwrap_or_else(|| term_expr.lipschitz(d, term_amp));
        let l_ell = self.constants.l_ell.unwrap_or(0.0);
        let l_f = self.constants.l_f.unwrap_or_else(|| match &coupling {
            Coupling::None => 0.0,
            // identity local coupling on smooth densities; a nominal
            // constant keeping the truncation bound slack
            _ => 0.1,
        });

        let te = term_expr.clone();
        let ie = init_expr.clone();
        let mut spec = ProblemSpec::new(
            cost,
            coupling,
            Arc::new(move |x: &[f64]| term_amp * te.eval(x)),
            Arc::new(move |x: &[f64]| init_amp * ie.eval(x)),
            l_ell,
            l_f,
            l_g,
        )?;
        spec.m_override = self.constants.m_override;
        Ok(spec)
    }

    pub fn solve_options(&self) -> Result<SolveOptions> {
        let mut opts = SolveOptions::default();
        if let Some(s) = &self.solver {
            if let Some(d) = &s.damping {
                opts.damping = match d.as_str() {
                    "fictitious" => Damping::Fictitious,
                    "plain" => Damping::Plain,
                    "fixed" => Damping::Fixed(s.omega.unwrap()),
                    _ => unreachable!("validated"),
                };
            }
            if let Some(t) = s.tol {
                opts.tol = t;
            }
            if let Some(m) = s.max_outer {
                opts.max_outer = m;
            }
            if let Some(i) = &s.init {
                opts.init = if i == "uniform" { Init::Uniform } else { Init::DiffusionOnly };
            }
        }
        Ok(opts)
    }
}
