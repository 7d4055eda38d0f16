//! Rectangular sampling grids and the partial Fourier transform in `t`.
//!
//! Nodes are `y_i = (i − N/2)h` with `h = 2·extent/N` on each axis; the dual
//! frequencies are offset by half a cell, `τ_k = (k − N/2 + ½)Δτ` with
//! `Δτ = π/t_extent`, so no frequency node sits on the degenerate fibre
//! `τ = 0`.

use std::f64::consts::PI;
use std::sync::Arc;

use nilproj_core::C64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Domain of a sampled function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    /// Values `f(y, t)`.
    Yt,
    /// Values `f̃(y, τ)`.
    YTau,
}

/// Sampling grid over `ℝ^{2n} × ℝ^r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    /// Number of `y` axes (`2n`).
    pub y_dim: usize,
    /// Half-width of every `y` axis.
    pub y_extent: f64,
    /// Points per `y` axis.
    pub y_points: usize,
    /// Number of `t` axes (`r`).
    pub t_dim: usize,
    /// Half-width of every `t` axis.
    pub t_extent: f64,
    /// Points per `t` axis.
    pub t_points: usize,
}

impl Grid {
    /// Validated grid: positive extents, power-of-two point counts.
    pub fn new(
        y_dim: usize,
        y_extent: f64,
        y_points: usize,
        t_dim: usize,
        t_extent: f64,
        t_points: usize,
    ) -> Result<Self> {
        let g = Self { y_dim, y_extent, y_points, t_dim, t_extent, t_points };
        g.validate()?;
        Ok(g)
    }

    /// Checks the invariants.
    pub fn validate(&self) -> Result<()> {
        if self.y_dim == 0 || self.t_dim == 0 {
            return Err(Error::Grid("zero-dimensional axis set".into()));
        }
        for (name, pts) in [("y_points", self.y_points), ("t_points", self.t_points)] {
            if pts < 2 || !pts.is_power_of_two() {
                return Err(Error::Grid(format!("{name} = {pts} is not a power of two ≥ 2")));
            }
        }
        for (name, e) in [("y_extent", self.y_extent), ("t_extent", self.t_extent)] {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::Grid(format!("{name} = {e} must be positive")));
            }
        }
        let total = (self.y_points as f64).powi(self.y_dim as i32) * (self.t_points as f64).powi(self.t_dim as i32);
        if total > 1.0e9 {
            return Err(Error::Grid(format!("{total} samples exceed the supported size")));
        }
        Ok(())
    }

    /// `y` spacing.
    pub fn y_step(&self) -> f64 {
        2.0 * self.y_extent / self.y_points as f64
    }

    /// `t` spacing.
    pub fn t_step(&self) -> f64 {
        2.0 * self.t_extent / self.t_points as f64
    }

    /// `τ` spacing `π/t_extent`.
    pub fn tau_step(&self) -> f64 {
        PI / self.t_extent
    }

    /// Number of `y` nodes.
    pub fn y_len(&self) -> usize {
        self.y_points.pow(self.y_dim as u32)
    }

    /// Number of `t` (or `τ`) nodes.
    pub fn t_len(&self) -> usize {
        self.t_points.pow(self.t_dim as u32)
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.y_len() * self.t_len()
    }

    /// Always false for a validated grid.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `y` cell volume `h^{2n}`.
    pub fn y_cell(&self) -> f64 {
        self.y_step().powi(self.y_dim as i32)
    }

    /// `t` cell volume.
    pub fn t_cell(&self) -> f64 {
        self.t_step().powi(self.t_dim as i32)
    }

    /// `τ` cell volume.
    pub fn tau_cell(&self) -> f64 {
        self.tau_step().powi(self.t_dim as i32)
    }

    /// Coordinate of index `i` on a `y` axis.
    pub fn y_coord(&self, i: usize) -> f64 {
        (i as f64 - (self.y_points / 2) as f64) * self.y_step()
    }

    /// Coordinate of index `j` on a `t` axis.
    pub fn t_coord(&self, j: usize) -> f64 {
        (j as f64 - (self.t_points / 2) as f64) * self.t_step()
    }

    /// Coordinate of index `k` on a `τ` axis.
    pub fn tau_coord(&self, k: usize) -> f64 {
        (k as f64 - (self.t_points / 2) as f64 + 0.5) * self.tau_step()
    }

    /// Per-axis indices of a flat `y` index (last axis fastest).
    pub fn y_indices(&self, flat: usize) -> Vec<usize> {
        unflatten(flat, self.y_points, self.y_dim)
    }

    /// `y` point of a flat index.
    pub fn y_point(&self, flat: usize) -> Vec<f64> {
        self.y_indices(flat).into_iter().map(|i| self.y_coord(i)).collect()
    }

    /// `t` point of a flat index.
    pub fn t_point(&self, flat: usize) -> Vec<f64> {
        unflatten(flat, self.t_points, self.t_dim).into_iter().map(|j| self.t_coord(j)).collect()
    }

    /// `τ` point of a flat index.
    pub fn tau_point(&self, flat: usize) -> Vec<f64> {
        unflatten(flat, self.t_points, self.t_dim).into_iter().map(|k| self.tau_coord(k)).collect()
    }

    /// All `y` points in flat order.
    pub fn y_points_all(&self) -> Vec<Vec<f64>> {
        (0..self.y_len()).map(|i| self.y_point(i)).collect()
    }
}

fn unflatten(mut flat: usize, n: usize, dim: usize) -> Vec<usize> {
    let mut out = vec![0; dim];
    for a in (0..dim).rev() {
        out[a] = flat % n;
        flat /= n;
    }
    out
}

/// Complex samples on a [`Grid`], laid out `t`-major: `values[t·Y + y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    /// Grid.
    pub grid: Grid,
    /// Samples.
    pub values: Vec<C64>,
    /// Domain of the samples.
    pub space: Space,
}

impl SampledFunction {
    /// Wraps samples after checking the length.
    pub fn new(grid: Grid, values: Vec<C64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for a grid of {}", values.len(), grid.len())));
        }
        Ok(Self { grid, values, space })
    }

    /// Samples `f(y, t)` on the grid.
    pub fn from_fn<F: Fn(&[f64], &[f64]) -> C64>(grid: Grid, f: F) -> Self {
        let ys = grid.y_points_all();
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.t_len() {
            let t = grid.t_point(j);
            for y in &ys {
                values.push(f(y, &t));
            }
        }
        Self { grid, values, space: Space::Yt }
    }

    /// The `y` slice at flat `t` (or `τ`) index `j`.
    pub fn slice(&self, j: usize) -> &[C64] {
        let ny = self.grid.y_len();
        &self.values[j * ny..(j + 1) * ny]
    }

    /// Discrete `L²` norm with the measure of the current domain; in `τ`
    /// space this includes the `(2π)^{−r}` of Plancherel.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        let cell = match self.space {
            Space::Yt => self.grid.y_cell() * self.grid.t_cell(),
            Space::YTau => self.grid.y_cell() * self.grid.tau_cell() / (2.0 * PI).powi(self.grid.t_dim as i32),
        };
        (s * cell).sqrt()
    }

    /// Discrete inner product `⟨f, g⟩ = Σ f·conj(g)·cell` (`Yt` space).
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.same_grid(other)?;
        let s: C64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * (self.grid.y_cell() * self.grid.t_cell()))
    }

    /// `‖f − g‖_{L²}`.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        let diff: Vec<C64> = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid, values: diff, space: self.space }.l2_norm())
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.space != other.space {
            return Err(Error::GridMismatch("operands differ in grid or space".into()));
        }
        Ok(())
    }
}

/// One-dimensional shifted DFT along a `t` axis, exact inverse pair.
struct AxisTransform {
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    pre: Vec<C64>,
    post: Vec<C64>,
}

impl AxisTransform {
    fn new(grid: &Grid) -> Self {
        let n = grid.t_points;
        let mut planner = FftPlanner::new();
        let nf = n as f64;
        let cj = (n / 2) as f64;
        let ck = cj - 0.5;
        // τ_k t_j = (2π/N)(k − c_k)(j − c_j): pre-twiddle in j, post-twiddle in k.
        let pre = (0..n).map(|j| C64::from_polar(1.0, 2.0 * PI * ck * j as f64 / nf)).collect();
        let post = (0..n).map(|k| C64::from_polar(grid.t_step(), 2.0 * PI * (k as f64 * cj - ck * cj) / nf)).collect();
        Self { fft: planner.plan_fft_forward(n), ifft: planner.plan_fft_inverse(n), pre, post }
    }

    fn forward(&self, line: &mut [C64]) {
        for (v, p) in line.iter_mut().zip(&self.pre) {
            *v *= p;
        }
        self.fft.process(line);
        for (v, p) in line.iter_mut().zip(&self.post) {
            *v *= p;
        }
    }

    /// Inverse with the `Δτ/2π` factor (`N·h·Δτ = 2π`); only the phase of `post` is undone.
    fn inverse(&self, line: &mut [C64], scale: f64) {
        for (v, p) in line.iter_mut().zip(&self.post) {
            *v *= p.conj() * (scale / p.norm());
        }
        self.ifft.process(line);
        for (v, p) in line.iter_mut().zip(&self.pre) {
            *v *= p.conj();
        }
    }
}

fn along_t_axes(f: &mut SampledFunction, mut op: impl FnMut(&mut [C64])) {
    let g = f.grid;
    let (nt, ny) = (g.t_points, g.y_len());
    let mut line = vec![C64::new(0.0, 0.0); nt];
    for axis in 0..g.t_dim {
        let stride = nt.pow((g.t_dim - 1 - axis) as u32) * ny;
        let block = stride * nt;
        for base in (0..f.values.len()).step_by(block) {
            for off in 0..stride {
                for (k, v) in line.iter_mut().enumerate() {
                    *v = f.values[base + off + k * stride];
                }
                op(&mut line);
                for (k, v) in line.iter().enumerate() {
                    f.values[base + off + k * stride] = *v;
                }
            }
        }
    }
}

/// `f̃(y, τ_k) ≈ Σ_j e^{−iτ_k·t_j} f(y, t_j)·h_t^r`.
pub fn partial_fourier(f: &SampledFunction) -> Result<SampledFunction> {
    if f.space != Space::Yt {
        return Err(Error::WrongSpace { expected: Space::Yt, got: f.space });
    }
    let tr = AxisTransform::new(&f.grid);
    let mut out = f.clone();
    along_t_axes(&mut out, |line| tr.forward(line));
    out.space = Space::YTau;
    Ok(out)
}

/// `f(y, t_j) ≈ (2π)^{−r} Σ_k e^{iτ_k·t_j} f̃(y, τ_k)·Δτ^r`.
pub fn inverse_partial_fourier(f: &SampledFunction) -> Result<SampledFunction> {
    if f.space != Space::YTau {
        return Err(Error::WrongSpace { expected: Space::YTau, got: f.space });
    }
    let tr = AxisTransform::new(&f.grid);
    let scale = f.grid.tau_step() / (2.0 * PI);
    let mut out = f.clone();
    along_t_axes(&mut out, |line| tr.inverse(line, scale));
    out.space = Space::Yt;
    Ok(out)
}
