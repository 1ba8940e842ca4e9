//! Periodic grid geometry, scalar/vector fields, and the centered
//! finite-difference operators with their exact duality identities.
//!
//! The torus `[0,1)^d` is discretized with `N` cells per axis (`h = 1/N`)
//! and `T` time steps (`dt = 1/T`). Nodes are stored row-major over axis
//! indices; periodic wrap is done by modular index arithmetic, no ghost
//! cells.

use crate::error::{MfgError, Result};
use std::io::Write;

/// Grid geometry and scheme parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    /// Spatial dimension (1 or 2 at desk scale; 3 accepted but untested).
    pub d: usize,
    /// Cells per axis.
    pub n: usize,
    /// Number of time steps.
    pub t_steps: usize,
    /// Implicitness weight of the diffusion split, in [0,1].
    pub theta: f64,
    /// Diffusion coefficient, > 0.
    pub sigma: f64,
}

impl Grid {
    pub fn new(d: usize, n: usize, t_steps: usize, theta: f64, sigma: f64) -> Result<Self> {
        if d == 0 || d > 3 {
            return Err(MfgError::Config(format!("dimension must be 1..=3, got {d}")));
        }
        if n == 0 {
            return Err(MfgError::Config("N must be positive".into()));
        }
        if t_steps <= 1 {
            return Err(MfgError::Config("T must be greater than 1".into()));
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(MfgError::Config(format!("theta must lie in [0,1], got {theta}")));
        }
        if sigma <= 0.0 {
            return Err(MfgError::Config(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Grid { d, n, t_steps, theta, sigma })
    }

    /// Cell width `h = 1/N`.
    #[inline]
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Time step `dt = 1/T`.
    #[inline]
    pub fn dt(&self) -> f64 {
        1.0 / self.t_steps as f64
    }

    /// Number of spatial nodes, `N^d`.
    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Cell volume `h^d`.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.d as i32)
    }

    /// Stride of `axis` in the row-major node ordering.
    #[inline]
    fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.d - 1 - axis) as u32)
    }

    /// Index of the node shifted by `steps` cells along `axis`, with wrap.
    #[inline]
    pub fn shift(&self, idx: usize, axis: usize, steps: i64) -> usize {
        let stride = self.stride(axis);
        let n = self.n as i64;
        let coord = (idx / stride) % self.n;
        let new_coord = ((coord as i64 + steps).rem_euclid(n)) as usize;
        idx + new_coord * stride - coord * stride
    }

    /// Multi-index of a node.
    pub fn coords(&self, idx: usize) -> Vec<usize> {
        let mut c = vec![0usize; self.d];
        let mut rem = idx;
        for a in (0..self.d).rev() {
            c[a] = rem % self.n;
            rem /= self.n;
        }
        c
    }

    /// Physical position of a node.
    pub fn position(&self, idx: usize) -> Vec<f64> {
        self.coords(idx).iter().map(|&i| i as f64 * self.h()).collect()
    }

    /// Node index from a multi-index (entries taken modulo N).
    pub fn node(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.d);
        coords.iter().fold(0, |acc, &i| acc * self.n + (i % self.n))
    }
}

/// Real-valued function on a single time slice of the spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField { grid, values: vec![0.0; grid.num_nodes()] }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        ScalarField { grid, values: vec![c; grid.num_nodes()] }
    }

    /// Uniform probability distribution: `h^d` per node.
    pub fn uniform_density(grid: Grid) -> Self {
        ScalarField::constant(grid, grid.cell_volume())
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.num_nodes()).map(|i| f(&grid.position(i))).collect();
        ScalarField { grid, values }
    }

    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn norm_1(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn norm_2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &ScalarField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    /// Discrete Lipschitz seminorm: `max_{x,i} |f(x+he_i) - f(x)| / h`.
    pub fn lipschitz_seminorm(&self) -> f64 {
        let g = self.grid;
        let h = g.h();
        let mut worst = 0.0f64;
        for idx in 0..g.num_nodes() {
            for a in 0..g.d {
                let j = g.shift(idx, a, 1);
                worst = worst.max((self.values[j] - self.values[idx]).abs() / h);
            }
        }
        worst
    }

    pub fn scale(&self, a: f64) -> ScalarField {
        ScalarField { grid: self.grid, values: self.values.iter().map(|v| a * v).collect() }
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    /// Translate by `k` cells along `axis` (periodic).
    pub fn translate(&self, axis: usize, k: i64) -> ScalarField {
        let g = self.grid;
        let mut out = ScalarField::zeros(g);
        for idx in 0..g.num_nodes() {
            out.values[g.shift(idx, axis, k)] = self.values[idx];
        }
        out
    }
}

/// R^d-valued function on a single time slice. Layout is node-major:
/// component `i` of node `x` sits at `values[x*d + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        VectorField { grid, values: vec![0.0; grid.num_nodes() * grid.d] }
    }

    pub fn constant(grid: Grid, c: &[f64]) -> Self {
        debug_assert_eq!(c.len(), grid.d);
        let mut values = Vec::with_capacity(grid.num_nodes() * grid.d);
        for _ in 0..grid.num_nodes() {
            values.extend_from_slice(c);
        }
        VectorField { grid, values }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let mut values = Vec::with_capacity(grid.num_nodes() * grid.d);
        for i in 0..grid.num_nodes() {
            let v = f(&grid.position(i));
            debug_assert_eq!(v.len(), grid.d);
            values.extend_from_slice(&v);
        }
        VectorField { grid, values }
    }

    #[inline]
    pub fn get(&self, node: usize) -> &[f64] {
        &self.values[node * self.grid.d..(node + 1) * self.grid.d]
    }

    #[inline]
    pub fn set(&mut self, node: usize, v: &[f64]) {
        self.values[node * self.grid.d..(node + 1) * self.grid.d].copy_from_slice(v);
    }

    #[inline]
    pub fn component(&self, node: usize, axis: usize) -> f64 {
        self.values[node * self.grid.d + axis]
    }

    /// `max_x ||w(x)||` (Euclidean norm per node).
    pub fn norm_inf(&self) -> f64 {
        let d = self.grid.d;
        (0..self.grid.num_nodes())
            .map(|i| self.values[i * d..(i + 1) * d].iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn norm_2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &VectorField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, a: f64) -> VectorField {
        VectorField { grid: self.grid, values: self.values.iter().map(|v| a * v).collect() }
    }

    /// Pointwise product with a scalar field (forms the flux `v m`).
    pub fn mul_scalar_field(&self, m: &ScalarField) -> VectorField {
        let d = self.grid.d;
        let mut out = self.clone();
        for node in 0..self.grid.num_nodes() {
            for a in 0..d {
                out.values[node * d + a] *= m.values[node];
            }
        }
        out
    }

    pub fn translate(&self, axis: usize, k: i64) -> VectorField {
        let g = self.grid;
        let mut out = VectorField::zeros(g);
        for idx in 0..g.num_nodes() {
            let target = g.shift(idx, axis, k);
            for a in 0..g.d {
                out.values[target * g.d + a] = self.values[idx * g.d + a];
            }
        }
        out
    }
}

/// Discrete Laplacian: centered second differences with periodic wrap.
pub fn laplacian_h(f: &ScalarField) -> ScalarField {
    let g = f.grid;
    let h2 = g.h() * g.h();
    let mut out = ScalarField::zeros(g);
    for idx in 0..g.num_nodes() {
        let mut acc = 0.0;
        for a in 0..g.d {
            acc += f.values[g.shift(idx, a, 1)] + f.values[g.shift(idx, a, -1)]
                - 2.0 * f.values[idx];
        }
        out.values[idx] = acc / h2;
    }
    out
}

/// Centered discrete gradient.
pub fn gradient_h(f: &ScalarField) -> VectorField {
    let g = f.grid;
    let two_h = 2.0 * g.h();
    let mut out = VectorField::zeros(g);
    for idx in 0..g.num_nodes() {
        for a in 0..g.d {
            out.values[idx * g.d + a] =
                (f.values[g.shift(idx, a, 1)] - f.values[g.shift(idx, a, -1)]) / two_h;
        }
    }
    out
}

/// Centered discrete divergence.
pub fn divergence_h(w: &VectorField) -> ScalarField {
    let g = w.grid;
    let two_h = 2.0 * g.h();
    let mut out = ScalarField::zeros(g);
    for idx in 0..g.num_nodes() {
        let mut acc = 0.0;
        for a in 0..g.d {
            acc += w.values[g.shift(idx, a, 1) * g.d + a]
                - w.values[g.shift(idx, a, -1) * g.d + a];
        }
        out.values[idx] = acc / two_h;
    }
    out
}

/// Forward discrete gradient.
pub fn forward_gradient_h(f: &ScalarField) -> VectorField {
    let g = f.grid;
    let h = g.h();
    let mut out = VectorField::zeros(g);
    for idx in 0..g.num_nodes() {
        for a in 0..g.d {
            out.values[idx * g.d + a] = (f.values[g.shift(idx, a, 1)] - f.values[idx]) / h;
        }
    }
    out
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    match order {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let a = 1.0 / 3.0f64.sqrt();
            (vec![-a, a], vec![1.0, 1.0])
        }
        3 => {
            let a = (3.0f64 / 5.0).sqrt();
            (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
            let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
            let wa = (18.0 + 30.0f64.sqrt()) / 36.0;
            let wb = (18.0 - 30.0f64.sqrt()) / 36.0;
            (vec![-b, -a, a, b], vec![wb, wa, wa, wb])
        }
        _ => {
            let a = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
            let b = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
            let wa = (322.0 + 13.0 * 70.0f64.sqrt()) / 900.0;
            let wb = (322.0 - 13.0 * 70.0f64.sqrt()) / 900.0;
            (vec![-b, -a, 0.0, a, b], vec![wb, wa, 128.0 / 225.0, wa, wb])
        }
    }
}

/// Cell integration `I_h`: per-node integral over `B_h(x)` of a continuous
/// function, by tensor-product Gauss quadrature (`order` points per axis,
/// exact for polynomials of degree `2*order - 1`).
pub fn restrict_ih(grid: Grid, order: usize, fc: impl Fn(&[f64]) -> f64) -> ScalarField {
    let (nodes, weights) = gauss_rule(order.clamp(1, 5));
    let h = grid.h();
    let half = h / 2.0;
    let q = nodes.len();
    let mut out = ScalarField::zeros(grid);
    let mut point = vec![0.0f64; grid.d];
    let mut qidx = vec![0usize; grid.d];
    for idx in 0..grid.num_nodes() {
        let center = grid.position(idx);
        let mut acc = 0.0;
        qidx.iter_mut().for_each(|i| *i = 0);
        loop {
            let mut w = 1.0;
            for a in 0..grid.d {
                point[a] = center[a] + half * nodes[qidx[a]];
                w *= weights[qidx[a]] * half;
            }
            acc += w * fc(&point);
            // odometer over the tensor grid
            let mut a = 0;
            loop {
                if a == grid.d {
                    break;
                }
                qidx[a] += 1;
                if qidx[a] < q {
                    break;
                }
                qidx[a] = 0;
                a += 1;
            }
            if a == grid.d {
                break;
            }
        }
        out.values[idx] = acc;
    }
    out
}

/// Piecewise-constant reconstruction `R_h`: the returned closure equals
/// `m(x)/h^d` on the cell `B_h(x)`.
pub fn reconstruct_rh(m: &ScalarField) -> impl Fn(&[f64]) -> f64 {
    let grid = m.grid;
    let values = m.values.clone();
    let inv_vol = 1.0 / grid.cell_volume();
    move |y: &[f64]| {
        let mut coords = vec![0usize; grid.d];
        for a in 0..grid.d {
            let i = (y[a] * grid.n as f64).round() as i64;
            coords[a] = i.rem_euclid(grid.n as i64) as usize;
        }
        values[grid.node(&coords)] * inv_vol
    }
}

/// Write a space-time scalar field as CSV: header `t,i0[,i1],value`,
/// time-major then row-major space.
pub fn dump_scalar_curve_csv<W: Write>(mut w: W, slices: &[ScalarField]) -> Result<()> {
    let grid = slices[0].grid;
    let mut header = String::from("t");
    for a in 0..grid.d {
        header.push_str(&format!(",i{a}"));
    }
    header.push_str(",value");
    writeln!(w, "{header}")?;
    for (t, slice) in slices.iter().enumerate() {
        for idx in 0..grid.num_nodes() {
            let coords = grid.coords(idx);
            let mut row = format!("{t}");
            for c in coords {
                row.push_str(&format!(",{c}"));
            }
            writeln!(w, "{row},{}", slice.values[idx])?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(n: usize) -> Grid {
        Grid::new(1, n, 4, 0.75, 1.0).unwrap()
    }

    fn grid2(n: usize) -> Grid {
        Grid::new(2, n, 4, 0.75, 1.0).unwrap()
    }

    fn rand_scalar(grid: Grid, seed: u64) -> ScalarField {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        ScalarField {
            grid,
            values: (0..grid.num_nodes()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    fn rand_vector(grid: Grid, seed: u64) -> VectorField {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        VectorField {
            grid,
            values: (0..grid.num_nodes() * grid.d).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let f = ScalarField::constant(grid2(6), 3.0);
        assert!(laplacian_h(&f).norm_inf() == 0.0);
    }

    #[test]
    fn laplacian_indicator_stencil() {
        // d=1, N=4, h=1/4: indicator of node 0 maps to (-32, 16, 0, 16).
        let g = grid1(4);
        let mut f = ScalarField::zeros(g);
        f.values[0] = 1.0;
        let lap = laplacian_h(&f);
        assert_eq!(lap.values, vec![-32.0, 16.0, 0.0, 16.0]);
    }

    #[test]
    fn laplacian_cosine_eigenfield() {
        let g = grid1(16);
        let h = g.h();
        let f = ScalarField::from_fn(g, |x| (2.0 * std::f64::consts::PI * x[0]).cos());
        let lap = laplacian_h(&f);
        let lambda = -(2.0 / (h * h)) * (1.0 - (2.0 * std::f64::consts::PI * h).cos());
        for i in 0..g.num_nodes() {
            assert!((lap.values[i] - lambda * f.values[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn gradient_indicator_stencil() {
        let g = grid1(4);
        let mut f = ScalarField::zeros(g);
        f.values[0] = 1.0;
        let grad = gradient_h(&f);
        assert_eq!(grad.values, vec![0.0, -2.0, 0.0, 2.0]);
    }

    #[test]
    fn gradient_sine_eigenfield() {
        let g = grid1(12);
        let h = g.h();
        let two_pi = 2.0 * std::f64::consts::PI;
        let f = ScalarField::from_fn(g, |x| (two_pi * x[0]).sin());
        let grad = gradient_h(&f);
        let factor = (two_pi * h).sin() / h;
        for i in 0..g.num_nodes() {
            let x = g.position(i)[0];
            assert!((grad.values[i] - factor * (two_pi * x).cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn divergence_matches_gradient_in_1d() {
        let g = grid1(8);
        let f = rand_scalar(g, 7);
        let w = VectorField { grid: g, values: f.values.clone() };
        let div = divergence_h(&w);
        let grad = gradient_h(&f);
        for i in 0..g.num_nodes() {
            assert_eq!(div.values[i], grad.values[i]);
        }
    }

    #[test]
    fn forward_gradient_indicator() {
        let g = grid1(4);
        let mut f = ScalarField::zeros(g);
        f.values[0] = 1.0;
        let fg = forward_gradient_h(&f);
        assert_eq!(fg.values, vec![-4.0, 0.0, 0.0, 4.0]);
    }

    #[test]
    fn integration_by_parts_both_identities() {
        for (gi, seed) in [(grid1(8), 1u64), (grid2(6), 2)] {
            for k in 0..100 {
                let mu = rand_scalar(gi, seed * 1000 + k);
                let nu = rand_scalar(gi, seed * 1000 + 500 + k);
                let w = rand_vector(gi, seed * 2000 + k);
                let lhs1 = -mu.dot(&divergence_h(&w));
                let rhs1 = gradient_h(&mu).dot(&w);
                assert!((lhs1 - rhs1).abs() <= 1e-12 * (1.0 + lhs1.abs()));
                let lhs2 = -nu.dot(&laplacian_h(&mu));
                let rhs2 = forward_gradient_h(&nu).dot(&forward_gradient_h(&mu));
                assert!((lhs2 - rhs2).abs() <= 1e-12 * (1.0 + lhs2.abs().max(rhs2.abs())));
            }
        }
    }

    #[test]
    fn laplacian_is_symmetric() {
        let g = grid2(5);
        let f = rand_scalar(g, 11);
        let gfield = rand_scalar(g, 13);
        let a = laplacian_h(&f).dot(&gfield);
        let b = f.dot(&laplacian_h(&gfield));
        assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn gradient_norm_comparison() {
        for (gi, seed) in [(grid1(8), 3u64), (grid2(6), 4)] {
            for k in 0..50 {
                let mu = rand_scalar(gi, seed * 3000 + k);
                let c = gradient_h(&mu).norm_2();
                let fwd = forward_gradient_h(&mu).norm_2();
                assert!(c * c <= fwd * fwd + 1e-12);
            }
        }
    }

    #[test]
    fn operators_commute_with_translation() {
        let g = grid2(5);
        let f = rand_scalar(g, 21);
        for axis in 0..2 {
            let shifted = f.translate(axis, 2);
            assert!(laplacian_h(&shifted)
                .sub(&laplacian_h(&f).translate(axis, 2))
                .norm_inf()
                < 1e-13);
            let ga = gradient_h(&shifted);
            let gb = gradient_h(&f).translate(axis, 2);
            for i in 0..ga.values.len() {
                assert!((ga.values[i] - gb.values[i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn restrict_constant_gives_cell_volume() {
        let g = grid2(4);
        let m = restrict_ih(g, 3, |_| 1.0);
        for v in &m.values {
            assert!((v - g.cell_volume()).abs() < 1e-15);
        }
        assert!((m.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn restrict_linear_midpoint_symmetry() {
        // Interior cells of f(y)=y integrate to x*h on a d=1 grid.
        let g = grid1(4);
        let m = restrict_ih(g, 3, |y| y[0]);
        let h = g.h();
        for i in 1..3 {
            let x = i as f64 * h;
            assert!((m.values[i] - x * h).abs() < 1e-15);
        }
    }

    #[test]
    fn restrict_then_reconstruct_roundtrip() {
        let g = grid1(6);
        let m = rand_scalar(g, 31);
        let rc = reconstruct_rh(&m);
        let back = restrict_ih(g, 3, rc);
        for i in 0..g.num_nodes() {
            assert!((back.values[i] - m.values[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn reconstruct_l2_scaling_identity() {
        let g = grid2(4);
        let m1 = rand_scalar(g, 41);
        let m2 = rand_scalar(g, 43);
        let r1 = reconstruct_rh(&m1);
        let r2 = reconstruct_rh(&m2);
        // ||R_h(m1)-R_h(m2)||_{L^2} via exact piecewise-constant integration.
        let mut acc = 0.0;
        for idx in 0..g.num_nodes() {
            let p = g.position(idx);
            let diff = r1(&p) - r2(&p);
            acc += diff * diff * g.cell_volume();
        }
        let lhs = acc.sqrt();
        let rhs = m1.sub(&m2).norm_2() / g.cell_volume().sqrt();
        assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn reconstruct_uniform_is_one() {
        let g = grid1(8);
        let m = ScalarField::uniform_density(g);
        let r = reconstruct_rh(&m);
        assert!((r(&[0.3]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn csv_dump_shape() {
        let g = grid1(2);
        let s = vec![ScalarField::constant(g, 1.5), ScalarField::constant(g, 2.5)];
        let mut buf = Vec::new();
        dump_scalar_curve_csv(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "t,i0,value\n0,0,1.5\n0,1,1.5\n1,0,2.5\n1,1,2.5\n");
    }
}
