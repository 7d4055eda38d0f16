//! Projection operators on sampled functions.
//!
//! `ℙ_m f` is computed fibrewise: `f̃(·, τ) ∗_τ Q_m(·, τ)` on every frequency
//! slice, followed by the inverse partial Fourier transform. Slices are
//! independent and are processed on a rayon pool; results are collected in
//! slice order, so outputs do not depend on the worker count.

use std::sync::Arc;

use nilproj_core::laguerre::{laguerre_upto, q_generating, q_m_from_sigma, DEGREE_CAP};
use nilproj_core::tau::spectral_data;
use nilproj_core::{GroupDescriptor, C64};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{inverse_partial_fourier, partial_fourier, Grid, SampledFunction, Space};

/// Slices whose largest value is below this fraction of the global maximum
/// of `f̃` are treated as zero.
pub const SLICE_SKIP_RATIO: f64 = 1e-13;

/// Kernel rows below this fraction of the kernel maximum are skipped by the
/// FFT-accelerated convolution.
pub const ROW_SKIP_RATIO: f64 = 1e-18;

/// Fibre kernel applied on each `τ` slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SliceKernel {
    /// `Q_m(·, τ)`.
    Level(usize),
    /// `Σ_{m ≤ M} R^m Q_m(·, τ)`.
    Partial {
        /// Abel parameter `R ∈ [0, 1)`.
        r: f64,
        /// Truncation order `M`.
        m_max: usize,
    },
    /// `Σ_m R^m Q_m(·, τ)` in closed form.
    Generating {
        /// Abel parameter `R ∈ [0, 1)`.
        r: f64,
    },
}

/// Which twisted-convolution implementation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionPath {
    /// FFT-accelerated path when `2n = 2`, direct otherwise.
    Auto,
    /// Always the direct `O(N²)` sum.
    Direct,
}

/// Projection engine for one group and grid.
pub struct Engine {
    group: GroupDescriptor,
    grid: Grid,
    pool: rayon::ThreadPool,
    /// Convolution implementation.
    pub path: ConvolutionPath,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl Engine {
    /// Engine running on `workers` threads (`0`: rayon's default).
    pub fn new(group: &GroupDescriptor, grid: Grid, workers: usize) -> Result<Self> {
        grid.validate()?;
        if grid.y_dim != group.dim_y() || grid.t_dim != group.r {
            return Err(Error::GridMismatch(format!(
                "grid has {}+{} axes, group needs {}+{}",
                grid.y_dim,
                grid.t_dim,
                group.dim_y(),
                group.r
            )));
        }
        let pool =
            rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| Error::Config(e.to_string()))?;
        let mut planner = FftPlanner::new();
        let len = 2 * grid.y_points;
        Ok(Self {
            group: group.clone(),
            grid,
            pool,
            path: ConvolutionPath::Auto,
            fft: planner.plan_fft_forward(len),
            ifft: planner.plan_fft_inverse(len),
        })
    }

    /// The grid.
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// The group.
    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    /// Samples a fibre kernel on the `y` grid at frequency `tau`.
    pub fn kernel_slice(&self, kind: SliceKernel, tau: &[f64]) -> Result<Vec<C64>> {
        let g = &self.group;
        match kind {
            SliceKernel::Level(m) | SliceKernel::Partial { m_max: m, .. } if m > DEGREE_CAP => {
                return Err(nilproj_core::Error::DegreeCap { m, cap: DEGREE_CAP }.into());
            }
            SliceKernel::Partial { r, .. } | SliceKernel::Generating { r } if !(0.0..1.0).contains(&r) => {
                return Err(nilproj_core::Error::RNotInRange(r).into());
            }
            _ => {}
        }
        let spec = spectral_data(g, tau)?;
        let n = g.n;
        let pref = (2.0 / std::f64::consts::PI).powi(n as i32) * spec.det_sqrt;
        let ys = self.grid.y_points_all();
        Ok(ys
            .iter()
            .map(|y| {
                let sigma = spec.sigma(y);
                let v = match kind {
                    SliceKernel::Level(m) => q_m_from_sigma(n, m, spec.det_sqrt, sigma),
                    SliceKernel::Partial { r, m_max } => {
                        let l = laguerre_upto(m_max, n as f64 - 1.0, 2.0 * sigma);
                        let mut s = 0.0;
                        let mut rm = 1.0;
                        for v in l {
                            s += rm * v;
                            rm *= r;
                        }
                        pref * (-sigma).exp() * s
                    }
                    SliceKernel::Generating { r } => q_generating(n, spec.det_sqrt, sigma, r),
                };
                C64::new(v, 0.0)
            })
            .collect())
    }

    /// `(f ∗_τ g)(y) = Σ_x e^{−2i yᵗB^τx} f(y − x) g(x) h^{2n}`, with `f`
    /// taken as zero outside the grid.
    pub fn twisted_convolve(&self, f: &[C64], g: &[C64], tau: &[f64]) -> Result<Vec<C64>> {
        let ny = self.grid.y_len();
        if f.len() != ny || g.len() != ny {
            return Err(Error::GridMismatch(format!("slices of length {} and {}, grid has {ny}", f.len(), g.len())));
        }
        if tau.len() != self.group.r {
            return Err(nilproj_core::Error::DimensionMismatch { expected: self.group.r, got: tau.len() }.into());
        }
        if self.grid.y_dim == 2 && self.path == ConvolutionPath::Auto {
            Ok(self.convolve_fast(f, g, tau))
        } else {
            Ok(self.convolve_direct(f, g, tau))
        }
    }

    fn b_tau_rows(&self, tau: &[f64]) -> Vec<f64> {
        let d = self.grid.y_dim;
        let bt = self.group.b_tau(tau).expect("dimension checked");
        let mut flat = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                flat[i * d + j] = bt[(i, j)];
            }
        }
        flat
    }

    /// Reference path.
    pub fn convolve_direct(&self, f: &[C64], g: &[C64], tau: &[f64]) -> Vec<C64> {
        let grid = &self.grid;
        let (d, np, ny) = (grid.y_dim, grid.y_points, grid.y_len());
        let bt = self.b_tau_rows(tau);
        let half = np / 2;
        let idx: Vec<Vec<usize>> = (0..ny).map(|i| grid.y_indices(i)).collect();
        let pts: Vec<Vec<f64>> = (0..ny).map(|i| grid.y_point(i)).collect();
        // B^τ x for every kernel node with a nonzero value.
        let support: Vec<(usize, Vec<f64>)> = (0..ny)
            .filter(|&x| g[x] != C64::new(0.0, 0.0))
            .map(|x| {
                let bx = (0..d).map(|i| (0..d).map(|j| bt[i * d + j] * pts[x][j]).sum()).collect();
                (x, bx)
            })
            .collect();
        let mut out = vec![C64::new(0.0, 0.0); ny];
        for (yi, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            'x: for (x, bx) in &support {
                let mut fi = 0usize;
                for a in 0..d {
                    let k = idx[yi][a] as isize - idx[*x][a] as isize + half as isize;
                    if k < 0 || k >= np as isize {
                        continue 'x;
                    }
                    fi = fi * np + k as usize;
                }
                let phase: f64 = pts[yi].iter().zip(bx).map(|(a, b)| a * b).sum();
                acc += C64::from_polar(1.0, -2.0 * phase) * f[fi] * g[*x];
            }
            *o = acc * grid.y_cell();
        }
        out
    }

    /// FFT-accelerated path for `2n = 2`.
    ///
    /// With `b = B^τ_{12}` the phase factors as `e^{−2ib y₁x₂}·e^{2ib y₂x₁}`;
    /// for fixed output row `y₁` and kernel row `x₁` the inner sum over `x₂`
    /// is an ordinary convolution of the `f` row at `y₁ − x₁` with the
    /// modulated kernel row, evaluated by zero-padded FFTs.
    fn convolve_fast(&self, f: &[C64], g: &[C64], tau: &[f64]) -> Vec<C64> {
        let grid = &self.grid;
        let n = grid.y_points;
        let half = n / 2;
        let len = 2 * n;
        let b = self.b_tau_rows(tau)[1];
        let zero = C64::new(0.0, 0.0);
        let coords: Vec<f64> = (0..n).map(|i| grid.y_coord(i)).collect();
        // E[i][j] = e^{−2ib c_i c_j}.
        let e: Vec<C64> = (0..n * n).map(|k| C64::from_polar(1.0, -2.0 * b * coords[k / n] * coords[k % n])).collect();
        let mut scratch = vec![zero; self.fft.get_inplace_scratch_len().max(self.ifft.get_inplace_scratch_len())];
        let f_hat: Vec<Option<Vec<C64>>> = (0..n)
            .map(|k| {
                let row = &f[k * n..(k + 1) * n];
                if row.iter().all(|v| *v == zero) {
                    return None;
                }
                let mut buf = vec![zero; len];
                buf[..n].copy_from_slice(row);
                self.fft.process_with_scratch(&mut buf, &mut scratch);
                Some(buf)
            })
            .collect();
        let gmax = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let g_live: Vec<bool> =
            (0..n).map(|j| g[j * n..(j + 1) * n].iter().any(|v| v.norm() > ROW_SKIP_RATIO * gmax)).collect();
        let mut out = vec![zero; n * n];
        let mut buf = vec![zero; len];
        let norm = grid.y_cell() / len as f64;
        for i0 in 0..n {
            let acc = &mut out[i0 * n..(i0 + 1) * n];
            for j0 in 0..n {
                let k0 = i0 as isize - j0 as isize + half as isize;
                if k0 < 0 || k0 >= n as isize || !g_live[j0] {
                    continue;
                }
                let Some(fh) = &f_hat[k0 as usize] else { continue };
                for j1 in 0..n {
                    buf[j1] = g[j0 * n + j1] * e[i0 * n + j1];
                }
                buf[n..].fill(zero);
                self.fft.process_with_scratch(&mut buf, &mut scratch);
                for (v, w) in buf.iter_mut().zip(fh) {
                    *v *= w;
                }
                self.ifft.process_with_scratch(&mut buf, &mut scratch);
                for i1 in 0..n {
                    acc[i1] += e[i1 * n + j0].conj() * buf[i1 + half];
                }
            }
            for v in acc.iter_mut() {
                *v *= norm;
            }
        }
        out
    }

    /// Applies a fibre kernel to every slice of `ft` (in `τ` space).
    fn apply_on_slices(&self, ft: &SampledFunction, kind: SliceKernel) -> Result<SampledFunction> {
        let gmax = ft.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let nt = self.grid.t_len();
        let slices: Vec<Result<Vec<C64>>> = self.pool.install(|| {
            (0..nt)
                .into_par_iter()
                .map(|j| {
                    let s = ft.slice(j);
                    if s.iter().all(|v| v.norm() <= SLICE_SKIP_RATIO * gmax) {
                        return Ok(vec![C64::new(0.0, 0.0); s.len()]);
                    }
                    let tau = self.grid.tau_point(j);
                    let q = self.kernel_slice(kind, &tau)?;
                    self.twisted_convolve(s, &q, &tau)
                })
                .collect()
        });
        let mut values = Vec::with_capacity(ft.values.len());
        for s in slices {
            values.extend(s?);
        }
        SampledFunction::new(self.grid, values, Space::YTau)
    }

    fn check_input(&self, f: &SampledFunction) -> Result<()> {
        if f.grid != self.grid {
            return Err(Error::GridMismatch("function grid differs from engine grid".into()));
        }
        if f.space != Space::Yt {
            return Err(Error::WrongSpace { expected: Space::Yt, got: f.space });
        }
        Ok(())
    }

    /// Applies a fibre kernel to `f` (in `(y, t)` space).
    pub fn apply_kernel(&self, f: &SampledFunction, kind: SliceKernel) -> Result<SampledFunction> {
        self.check_input(f)?;
        let ft = partial_fourier(f)?;
        inverse_partial_fourier(&self.apply_on_slices(&ft, kind)?)
    }

    /// `ℙ_m f`.
    pub fn apply_projection(&self, f: &SampledFunction, m: usize) -> Result<SampledFunction> {
        self.apply_kernel(f, SliceKernel::Level(m))
    }

    /// `ℙ_m f` for each `m` in `ms`, sharing one forward transform.
    pub fn project_levels(&self, f: &SampledFunction, ms: &[usize]) -> Result<Vec<SampledFunction>> {
        self.check_input(f)?;
        let ft = partial_fourier(f)?;
        ms.iter().map(|&m| inverse_partial_fourier(&self.apply_on_slices(&ft, SliceKernel::Level(m))?)).collect()
    }

    /// `Σ_{m ≤ M} R^m ℙ_m f`, or the full Abel sum from the closed-form
    /// generating kernel when `m_max` is `None`.
    pub fn abel_reconstruct(&self, f: &SampledFunction, r: f64, m_max: Option<usize>) -> Result<SampledFunction> {
        if !(0.0..1.0).contains(&r) {
            return Err(nilproj_core::Error::RNotInRange(r).into());
        }
        let kind = match m_max {
            Some(m) => SliceKernel::Partial { r, m_max: m },
            None => SliceKernel::Generating { r },
        };
        self.apply_kernel(f, kind)
    }
}
