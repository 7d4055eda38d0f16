//! The projection kernels `P_m(y, t)`.
//!
//! Three independent evaluations are provided:
//!
//! * [`KernelEvaluator::p_m`]: the closed form
//!   `Σ_j C_{m,j} ∫_{S^{r−1}} δ(τ)(σ+it·τ)^{m−j}/(σ−it·τ)^{m+n+r−j} dτ`, with
//!   `σ = ⟨𝓑^τy,y⟩` and `δ = Π μ_j`, by sphere quadrature (`y ≠ 0`);
//! * [`KernelEvaluator::p_m_oracle`]: the same object before the radial
//!   integral is done in closed form,
//!   `2^{n−r}π^{−n−r}∫_{S^{r−1}} δ ∫₀^∞ ρ^{n+r−1} e^{−ρσ+iρt·τ} L_m^{(n−1)}(2ρσ) dρ dτ`;
//! * [`KernelEvaluator::p_m_continued`]: the contour representation that
//!   stays valid on the line `y = 0`, `t ≠ 0`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::group::{dilate_point, homogeneous_norm, GroupDescriptor, GroupPoint};
use crate::laguerre::{laguerre_upto, DEGREE_CAP};
use crate::linalg::householder_e1;
use crate::quadrature::{adaptive_gk15, gauss_laguerre, gauss_legendre_on, graded_sphere_rule, SphereRule};
use crate::tau::{gram_complex, spectral_data, Contour};
use crate::C64;

/// Quadrature and contour parameters for kernel evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConfig {
    /// Height parameter `ε ∈ (0, 1)` of the contour `L_ε`.
    pub epsilon: f64,
    /// Resolution of the `S^{r−1}` rule (`None`: 512 for `r ≤ 2`, 128 for
    /// `r = 3`, 32 for `r = 4`).
    pub sphere_degree: Option<usize>,
    /// Resolution of the `S^{r−2}` rule used by the contour representation.
    pub continued_sphere_degree: usize,
    /// Gauss–Laguerre order of the oracle's radial rule.
    pub radial_nodes: usize,
    /// Largest admissible `m`.
    pub m_max: usize,
    /// Relative tolerance of the adaptive contour integration.
    pub contour_tol: f64,
    /// Largest accepted relative discrepancy between the sphere rule and its
    /// half-resolution companion before [`Error::QuadratureNotConverged`].
    pub convergence_tol: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            sphere_degree: None,
            continued_sphere_degree: 16,
            radial_nodes: 96,
            m_max: DEGREE_CAP,
            contour_tol: 1e-12,
            convergence_tol: 1e-6,
        }
    }
}

/// `C_{m,j} = (−1)^m 2^{n−r}/π^{n+r} · C(r,j) · (m+n+r−1−j)!/(m−j)!`, and `0`
/// for `j > m`.
pub fn c_mj(n: usize, r: usize, m: usize, j: usize) -> f64 {
    if j > m || j > r {
        return 0.0;
    }
    let mut binom = 1.0;
    for i in 0..j {
        binom = binom * (r - i) as f64 / (i + 1) as f64;
    }
    let mut ratio = 1.0;
    for i in (m - j + 1)..=(m + n + r - 1 - j) {
        ratio *= i as f64;
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    sign * libm::pow(2.0, n as f64 - r as f64) / libm::pow(PI, (n + r) as f64) * binom * ratio
}

/// Largest `|a − b|/Σ|terms|` between two sphere sums.
fn discrepancy(main: &[(C64, f64)], coarse: &[(C64, f64)]) -> f64 {
    main.iter().zip(coarse).map(|(a, b)| (a.0 - b.0).norm() / a.1.max(f64::MIN_POSITIVE)).fold(0.0, f64::max)
}

/// Sphere nodes with the spectral data needed by the kernels.
#[derive(Debug, Clone)]
struct NodeSet {
    tau: Vec<Vec<f64>>,
    weight: Vec<f64>,
    det_sqrt: Vec<f64>,
    /// Row-major `𝓑^τ` per node.
    script_b: Vec<Vec<f64>>,
}

impl NodeSet {
    fn new(g: &GroupDescriptor, rule: &SphereRule) -> Result<Self> {
        let mut out = Self { tau: vec![], weight: vec![], det_sqrt: vec![], script_b: vec![] };
        let d = 2 * g.n;
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let s = spectral_data(g, t)?;
            let mut flat = vec![0.0; d * d];
            for i in 0..d {
                for j in 0..d {
                    flat[i * d + j] = s.script_b[(i, j)];
                }
            }
            out.tau.push(t.clone());
            out.weight.push(*w);
            out.det_sqrt.push(s.det_sqrt);
            out.script_b.push(flat);
        }
        Ok(out)
    }

    fn sigma(&self, k: usize, y: &[f64]) -> f64 {
        let d = y.len();
        let b = &self.script_b[k];
        let mut s = 0.0;
        for i in 0..d {
            let mut row = 0.0;
            for j in 0..d {
                row += b[i * d + j] * y[j];
            }
            s += row * y[i];
        }
        s
    }
}

/// Result of [`KernelEvaluator::mean_value_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValue {
    /// `∫_{S^{r−1}}∫_{ℝ^{2n}} P_m(y, ṫ) dy dṫ`.
    pub value: C64,
    /// `∫_{S^{r−1}}∫_{ℝ^{2n}} |P_m(y, ṫ)| dy dṫ`.
    pub abs_integral: f64,
}

/// Kernel evaluator for one group: caches sphere rules, per-node spectra,
/// the radial rule and the functional-calculus contour.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    /// The group.
    pub group: GroupDescriptor,
    /// Configuration.
    pub config: KernelConfig,
    nodes: NodeSet,
    half_nodes: Option<NodeSet>,
    sub_rule: Option<SphereRule>,
    radial_x: Vec<f64>,
    radial_w: Vec<f64>,
    contour: Contour,
}

fn default_sphere_degree(r: usize) -> usize {
    match r {
        0..=2 => 512,
        3 => 128,
        _ => 32,
    }
}

impl KernelEvaluator {
    /// Builds rules and caches; validates the configuration.
    pub fn new(group: &GroupDescriptor, config: KernelConfig) -> Result<Self> {
        if !(config.epsilon > 0.0 && config.epsilon < 1.0) {
            return Err(Error::Config(alloc::format!("epsilon {} not in (0,1)", config.epsilon)));
        }
        if config.m_max > DEGREE_CAP {
            return Err(Error::DegreeCap { m: config.m_max, cap: DEGREE_CAP });
        }
        let r = group.r;
        let deg = config.sphere_degree.unwrap_or_else(|| default_sphere_degree(r));
        let rule = SphereRule::new(r, deg)?;
        let nodes = NodeSet::new(group, &rule)?;
        let half_nodes = if r >= 2 { Some(NodeSet::new(group, &SphereRule::new(r, deg / 2)?)?) } else { None };
        let sub_rule = if r >= 2 { Some(SphereRule::new(r - 1, config.continued_sphere_degree)?) } else { None };
        let (radial_x, radial_w) = gauss_laguerre(config.radial_nodes, (group.n + r - 1) as f64);
        Ok(Self {
            group: group.clone(),
            contour: Contour::for_group(group),
            config,
            nodes,
            half_nodes,
            sub_rule,
            radial_x,
            radial_w,
        })
    }

    /// Number of nodes of the main sphere rule.
    pub fn sphere_nodes(&self) -> usize {
        self.nodes.tau.len()
    }

    fn check(&self, y: &[f64], t: &[f64], ms: &[usize]) -> Result<()> {
        let g = &self.group;
        if y.len() != 2 * g.n {
            return Err(Error::DimensionMismatch { expected: 2 * g.n, got: y.len() });
        }
        if t.len() != g.r {
            return Err(Error::DimensionMismatch { expected: g.r, got: t.len() });
        }
        for &m in ms {
            if m > self.config.m_max {
                return Err(Error::DegreeCap { m, cap: self.config.m_max });
            }
        }
        Ok(())
    }

    /// Closed-form sphere sum; returns `(Σ_j C_{m,j} I_{m,j}, Σ_j |C_{m,j}|·Σ|terms|)` per m.
    fn sphere_sum(&self, set: &NodeSet, y: &[f64], t: &[f64], ms: &[usize]) -> Vec<(C64, f64)> {
        let (n, r) = (self.group.n, self.group.r);
        let mut out = vec![(C64::new(0.0, 0.0), 0.0); ms.len()];
        let coef: Vec<Vec<f64>> = ms.iter().map(|&m| (0..=r).map(|j| c_mj(n, r, m, j)).collect()).collect();
        for k in 0..set.tau.len() {
            let sigma = set.sigma(k, y);
            let c: f64 = set.tau[k].iter().zip(t).map(|(a, b)| a * b).sum();
            let lp = C64::new(sigma, c).ln();
            let lm = C64::new(sigma, -c).ln();
            assert!(sigma > 0.0, "sigma must be positive for y != 0");
            let wd = set.weight[k] * set.det_sqrt[k];
            for (q, &m) in ms.iter().enumerate() {
                for j in 0..=r.min(m) {
                    let a = (m - j) as f64;
                    let b = (m + n + r - j) as f64;
                    let term = (lp * a - lm * b).exp() * (wd * coef[q][j]);
                    out[q].0 += term;
                    out[q].1 += term.norm();
                }
            }
        }
        out
    }

    /// `P_m(y, t)` for several `m` at once by the closed-form sphere sum.
    ///
    /// For `r ≥ 2` the fixed rule is checked against its half-resolution
    /// companion; when they disagree, the sum is recomputed on the rule graded
    /// towards the directions orthogonal to `t` (see
    /// [`graded_sphere_rule`]), which carries its own convergence check.
    pub fn p_m_multi(&self, ms: &[usize], y: &[f64], t: &[f64]) -> Result<Vec<C64>> {
        self.check(y, t, ms)?;
        if y.iter().all(|v| *v == 0.0) {
            return Err(Error::YZero);
        }
        self.on_sphere(y, t, |set| self.sphere_sum(set, y, t, ms))
    }

    /// Integrates a sphere sum (`(value, Σ|terms|)` per output) on the fixed
    /// rule, or, when the fixed rule and its half-resolution companion
    /// disagree, on the rule graded towards `{ṫ : ṫ·t = 0}`, where the
    /// integrand peaks with width `≈ σ/|t|` once `|t| ≫ σ`. Graded panels of
    /// 32 Gauss–Legendre nodes are checked against 16.
    fn on_sphere<F: Fn(&NodeSet) -> Vec<(C64, f64)>>(&self, y: &[f64], t: &[f64], sum: F) -> Result<Vec<C64>> {
        let main = sum(&self.nodes);
        let Some(half) = &self.half_nodes else {
            return Ok(main.into_iter().map(|v| v.0).collect());
        };
        let rel = discrepancy(&main, &sum(half));
        if rel <= self.config.convergence_tol {
            return Ok(main.into_iter().map(|v| v.0).collect());
        }
        let g = &self.group;
        let tn = libm::sqrt(t.iter().map(|v| v * v).sum::<f64>());
        let sub = match &self.sub_rule {
            Some(sub) if tn > 0.0 => sub,
            _ => return Err(Error::QuadratureNotConverged(rel)),
        };
        let y2: f64 = y.iter().map(|v| v * v).sum();
        let width = (g.sigma_min * y2 / tn).clamp(1e-12, PI / 4.0);
        let fine = sum(&NodeSet::new(g, &graded_sphere_rule(t, width, 32, sub)?)?);
        let coarse = sum(&NodeSet::new(g, &graded_sphere_rule(t, width, 16, sub)?)?);
        let rel = discrepancy(&fine, &coarse);
        if !(rel <= self.config.convergence_tol) {
            return Err(Error::QuadratureNotConverged(rel));
        }
        Ok(fine.into_iter().map(|v| v.0).collect())
    }

    /// `P_m(y, t)` by the closed-form sphere sum (`y ≠ 0`).
    pub fn p_m(&self, m: usize, y: &[f64], t: &[f64]) -> Result<C64> {
        Ok(self.p_m_multi(&[m], y, t)?[0])
    }

    /// `P_m(y, t)` with an explicitly chosen `S^{r−1}` resolution and no
    /// convergence check; used by refinement studies.
    pub fn p_m_with_rule(&self, m: usize, y: &[f64], t: &[f64], rule: &SphereRule) -> Result<C64> {
        self.check(y, t, &[m])?;
        if y.iter().all(|v| *v == 0.0) {
            return Err(Error::YZero);
        }
        let set = NodeSet::new(&self.group, rule)?;
        Ok(self.sphere_sum(&set, y, t, &[m])[0].0)
    }

    /// `P_m(y, t)` from the radial-integral form.
    ///
    /// With `u = ρσ` and `ω = t·τ/σ` the radial integral is
    /// `σ^{−(n+r)}∫₀^∞ u^{n+r−1}e^{−(1−iω)u}L_m^{(n−1)}(2u)du`; the ray is
    /// rotated to `u = s/(1−iω)`, which removes the oscillation, and the
    /// result is integrated by generalised Gauss–Laguerre in `s`.
    pub fn p_m_oracle(&self, m: usize, y: &[f64], t: &[f64]) -> Result<C64> {
        self.check(y, t, &[m])?;
        if y.iter().all(|v| *v == 0.0) {
            return Err(Error::YZero);
        }
        Ok(self.on_sphere(y, t, |set| self.oracle_sum(set, m, y, t))?[0])
    }

    fn oracle_sum(&self, set: &NodeSet, m: usize, y: &[f64], t: &[f64]) -> Vec<(C64, f64)> {
        let (n, r) = (self.group.n, self.group.r);
        let pref = libm::pow(2.0, n as f64 - r as f64) / libm::pow(PI, (n + r) as f64);
        let (mut acc, mut abs) = (C64::new(0.0, 0.0), 0.0);
        for k in 0..set.tau.len() {
            let sigma = set.sigma(k, y);
            let c: f64 = set.tau[k].iter().zip(t).map(|(a, b)| a * b).sum();
            let z1 = C64::new(1.0, -c / sigma);
            let inv = z1.inv();
            let mut rad = C64::new(0.0, 0.0);
            for (x, w) in self.radial_x.iter().zip(&self.radial_w) {
                rad += laguerre_complex(m, n as f64 - 1.0, inv * (2.0 * x)) * *w;
            }
            let scale = (C64::new(sigma, 0.0) * z1).powi(-((n + r) as i32));
            let term = rad * scale * (set.weight[k] * set.det_sqrt[k] * pref);
            acc += term;
            abs += term.norm();
        }
        vec![(acc, abs)]
    }

    /// `P_m(y, t)` on `𝒩∖{0}`, including the line `y = 0`.
    pub fn p_m_continued(&self, m: usize, y: &[f64], t: &[f64]) -> Result<C64> {
        Ok(self.p_m_continued_multi(&[m], y, t)?[0])
    }

    /// [`Self::p_m_continued`] for several `m` sharing one contour integration.
    ///
    /// For `r = 1` the sphere is `{±1}` and the closed form is already
    /// finite at `y = 0`, `t ≠ 0`: it is evaluated with exact integer powers.
    /// For `r ≥ 2` the direction `t/|t|` is rotated to `e₁` by a Householder
    /// reflection `O_t`, the sphere is parametrised as `(z, √(1−z²)τ')` with
    /// surface element `(1−z²)^{(r−3)/2} dz dτ'`, and `z` runs over
    /// `L_ε: z = −cos θ + iε sin θ`. `ε` is halved (up to four times) when the
    /// functional-calculus contour loses the spectrum.
    pub fn p_m_continued_multi(&self, ms: &[usize], y: &[f64], t: &[f64]) -> Result<Vec<C64>> {
        self.check(y, t, ms)?;
        let y0 = y.iter().all(|v| *v == 0.0);
        let tn = libm::sqrt(t.iter().map(|v| v * v).sum::<f64>());
        if y0 && tn == 0.0 {
            return Err(Error::OriginPoint);
        }
        if self.group.r == 1 {
            return Ok(self.two_point(ms, y, t));
        }
        let mut eps = self.config.epsilon;
        let mut last = Error::SpectrumEscapedContour(f64::NAN);
        for _ in 0..5 {
            match self.contour_integral(ms, y, t, tn, eps) {
                Err(e @ Error::SpectrumEscapedContour(_)) => {
                    last = e;
                    eps *= 0.5;
                }
                other => return other,
            }
        }
        Err(last)
    }

    fn two_point(&self, ms: &[usize], y: &[f64], t: &[f64]) -> Vec<C64> {
        let (n, r) = (self.group.n, self.group.r);
        let set = &self.nodes;
        let mut out = vec![C64::new(0.0, 0.0); ms.len()];
        for k in 0..set.tau.len() {
            let sigma = set.sigma(k, y);
            let c = set.tau[k][0] * t[0];
            let plus = C64::new(sigma, c);
            let minus = C64::new(sigma, -c);
            let wd = set.weight[k] * set.det_sqrt[k];
            for (q, &m) in ms.iter().enumerate() {
                for j in 0..=r.min(m) {
                    let a = (m - j) as i32;
                    let b = (m + n + r - j) as i32;
                    out[q] += plus.powi(a) * minus.powi(-b) * (wd * c_mj(n, r, m, j));
                }
            }
        }
        out
    }

    fn contour_integral(&self, ms: &[usize], y: &[f64], t: &[f64], tn: f64, eps: f64) -> Result<Vec<C64>> {
        let g = &self.group;
        let (n, r) = (g.n, g.r);
        let d = 2 * n;
        let sub = self.sub_rule.as_ref().expect("r >= 2");
        let ot = if tn > 0.0 {
            householder_e1(&t.iter().map(|v| v / tn).collect::<Vec<_>>())
        } else {
            nalgebra::DMatrix::identity(r, r)
        };
        let coef: Vec<Vec<f64>> = ms.iter().map(|&m| (0..=r).map(|j| c_mj(n, r, m, j)).collect()).collect();
        let half_exp = (r as f64 - 3.0) / 2.0;
        let mut failure: Option<Error> = None;
        let mut w = vec![C64::new(0.0, 0.0); r];
        let integrand = |s: f64, out: &mut [C64]| {
            for v in out.iter_mut() {
                *v = C64::new(0.0, 0.0);
            }
            if failure.is_some() {
                return;
            }
            // θ = π(3s² − 2s³) removes the endpoint singularities of (1−z²)^{(r−3)/2}.
            let th = PI * s * s * (3.0 - 2.0 * s);
            let dth = 6.0 * PI * s * (1.0 - s);
            if dth == 0.0 {
                return;
            }
            let (st, ct) = (libm::sin(th), libm::cos(th));
            let z = C64::new(-ct, eps * st);
            let dz = C64::new(st, eps * ct) * dth;
            let one_minus = C64::new(1.0, 0.0) - z * z;
            let root = one_minus.sqrt();
            let jac = if half_exp == 0.0 { C64::new(1.0, 0.0) } else { (one_minus.ln() * half_exp).exp() };
            let itz = C64::new(0.0, tn) * z;
            for (tp, wt) in sub.nodes.iter().zip(&sub.weights) {
                // w = O_t (z, √(1−z²) τ').
                for a in 0..r {
                    let mut acc = z * ot[(a, 0)];
                    for b in 1..r {
                        acc += root * (ot[(a, b)] * tp[b - 1]);
                    }
                    w[a] = acc;
                }
                let tm = gram_complex(g, &w);
                let (half, det) = match self.contour.sqrt_and_det(&tm, d) {
                    Ok(v) => v,
                    Err(e) => {
                        failure = Some(e);
                        return;
                    }
                };
                let mut sigma = C64::new(0.0, 0.0);
                for i in 0..d {
                    let mut row = C64::new(0.0, 0.0);
                    for j in 0..d {
                        row += half[i * d + j] * y[j];
                    }
                    sigma += row * y[i];
                }
                let num = sigma + itz;
                let den = sigma - itz;
                let lnum = num.ln();
                let lden = den.ln();
                let base = det * jac * dz * *wt;
                for (q, &m) in ms.iter().enumerate() {
                    for j in 0..=r.min(m) {
                        let a = (m - j) as f64;
                        let b = (m + n + r - j) as f64;
                        let pw = if a == 0.0 { (-lden * b).exp() } else { (lnum * a - lden * b).exp() };
                        out[q] += base * pw * coef[q][j];
                    }
                }
            }
        };
        let res = adaptive_gk15(integrand, 0.0, 1.0, ms.len(), self.config.contour_tol, 0.0, 4000);
        if let Some(e) = failure {
            return Err(e);
        }
        res
    }

    /// Abel-summed kernel `Σ_m R^m P_m(y, t)` in closed form:
    /// `(n+r−1)! 2^{n−r} M^r/(π^{n+r}(1+R)^n) ∫ δ(τ)/(σ − iM t·τ)^{n+r} dτ`,
    /// `M = (1−R)/(1+R)`.
    pub fn abel_kernel(&self, rr: f64, y: &[f64], t: &[f64]) -> Result<C64> {
        if !(0.0..1.0).contains(&rr) {
            return Err(Error::RNotInRange(rr));
        }
        self.check(y, t, &[])?;
        if y.iter().all(|v| *v == 0.0) {
            return Err(Error::YZero);
        }
        let (n, r) = (self.group.n, self.group.r);
        let mm = (1.0 - rr) / (1.0 + rr);
        let fact: f64 = (1..n + r).map(|i| i as f64).product();
        let pref = fact * libm::pow(2.0, n as f64 - r as f64) * libm::pow(mm, r as f64)
            / (libm::pow(PI, (n + r) as f64) * libm::pow(1.0 + rr, n as f64));
        let set = &self.nodes;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..set.tau.len() {
            let sigma = set.sigma(k, y);
            let c: f64 = set.tau[k].iter().zip(t).map(|(a, b)| a * b).sum();
            acc += C64::new(sigma, -mm * c).powi(-((n + r) as i32)) * (set.weight[k] * set.det_sqrt[k]);
        }
        Ok(acc * pref)
    }

    /// `∫_{S^{r−1}}∫_{ℝ^{2n}} P_m(y, ṫ) dy dṫ` with a radial × spherical rule
    /// in `y` (`ρ = Lx/(1−x)`, Gauss–Legendre in `x`) and the sphere rule in `ṫ`.
    ///
    /// Supported for `n ≤ 2`. Raises [`Error::QuadratureNotConverged`] when
    /// halving the radial rule changes the value by more than `1e−8·∫∫|P_m|`.
    pub fn mean_value_integral(&self, m: usize, radial: usize, angular: usize) -> Result<MeanValue> {
        let full = self.mean_value_with(m, radial, angular)?;
        let half = self.mean_value_with(m, radial / 2, angular)?;
        let rel = (full.value - half.value).norm() / full.abs_integral;
        if rel > 1e-8 {
            return Err(Error::QuadratureNotConverged(rel));
        }
        Ok(full)
    }

    fn mean_value_with(&self, m: usize, radial: usize, angular: usize) -> Result<MeanValue> {
        let g = &self.group;
        let d = 2 * g.n;
        let ang = SphereRule::new(d, angular)?;
        let (xs, wx) = gauss_legendre_on(radial, 0.0, 1.0);
        let scale = 1.0 / libm::sqrt(g.sigma_max);
        let set = &self.nodes;
        let mut value = C64::new(0.0, 0.0);
        let mut abs_integral = 0.0;
        let mut y = vec![0.0; d];
        for (x, wxi) in xs.iter().zip(&wx) {
            let rho = scale * x / (1.0 - x);
            let jac = scale / ((1.0 - x) * (1.0 - x)) * libm::pow(rho, (d - 1) as f64);
            for (u, wu) in ang.nodes.iter().zip(&ang.weights) {
                for i in 0..d {
                    y[i] = rho * u[i];
                }
                for k in 0..set.tau.len() {
                    let p = match self.p_m(m, &y, &set.tau[k]) {
                        Ok(v) => v,
                        Err(Error::QuadratureNotConverged(_)) => self.p_m_continued(m, &y, &set.tau[k])?,
                        Err(e) => return Err(e),
                    };
                    let w = wxi * jac * wu * set.weight[k];
                    value += p * w;
                    abs_integral += p.norm() * w;
                }
            }
        }
        Ok(MeanValue { value, abs_integral })
    }
}

/// Calderón–Zygmund size statistics of `P_m` over a sample set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CzStatistics {
    /// `sup ‖g‖^Q |P_m(g)|`.
    pub size: f64,
    /// `sup_j ‖g‖^{Q+1} |Y_j P_m(g)|`.
    pub gradient: f64,
}

impl KernelEvaluator {
    /// `P_m(y, t)` for several `m` by the closed form where its sphere rule
    /// converges and by the contour representation otherwise (in particular
    /// near `y = 0`).
    pub fn p_m_any_multi(&self, ms: &[usize], y: &[f64], t: &[f64]) -> Result<Vec<C64>> {
        match self.p_m_multi(ms, y, t) {
            Err(Error::YZero) | Err(Error::QuadratureNotConverged(_)) => self.p_m_continued_multi(ms, y, t),
            other => other,
        }
    }

    /// Single-`m` form of [`Self::p_m_any_multi`].
    pub fn p_m_any(&self, m: usize, y: &[f64], t: &[f64]) -> Result<C64> {
        Ok(self.p_m_any_multi(&[m], y, t)?[0])
    }

    /// Horizontal derivatives `Y_j P_m`, `j = 1, …, 2n`, for several `m`:
    /// `out[j][q]` belongs to `ms[q]`. Fourth-order central differences of
    /// step `h` along the left translates `s ↦ g·(s e_j, 0)`.
    pub fn horizontal_gradient(&self, ms: &[usize], y: &[f64], t: &[f64], h: f64) -> Result<Vec<Vec<C64>>> {
        let g = &self.group;
        let mut out = Vec::with_capacity(2 * g.n);
        for j in 0..2 * g.n {
            let mut ej = vec![0.0; 2 * g.n];
            ej[j] = 1.0;
            let bf = g.b_form(y, &ej);
            let at = |s: f64| -> Result<Vec<C64>> {
                let yy: Vec<f64> = y.iter().zip(&ej).map(|(a, e)| a + s * e).collect();
                let tt: Vec<f64> = t.iter().zip(&bf).map(|(a, b)| a + 2.0 * s * b).collect();
                self.p_m_any_multi(ms, &yy, &tt)
            };
            let (p1, m1, p2, m2) = (at(h)?, at(-h)?, at(2.0 * h)?, at(-2.0 * h)?);
            out.push((0..ms.len()).map(|q| (-p2[q] + p1[q] * 8.0 - m1[q] * 8.0 + m2[q]) / (12.0 * h)).collect());
        }
        Ok(out)
    }

    /// Size and gradient statistics over `points`, one entry per `m`.
    ///
    /// The finite-difference step for `Y_j` is `h_rel·‖g‖`, so dilating the
    /// sample set by `λ` dilates every stencil by `λ` and the statistics are
    /// invariant up to rounding.
    pub fn cz_statistics(&self, ms: &[usize], points: &[GroupPoint], h_rel: f64) -> Result<Vec<CzStatistics>> {
        let q = self.group.q as f64;
        let mut out = vec![CzStatistics { size: 0.0, gradient: 0.0 }; ms.len()];
        for p in points {
            let nrm = homogeneous_norm(&p.y, &p.t);
            if nrm == 0.0 {
                return Err(Error::OriginPoint);
            }
            let v = self.p_m_any_multi(ms, &p.y, &p.t)?;
            let grad = self.horizontal_gradient(ms, &p.y, &p.t, h_rel * nrm)?;
            for (k, o) in out.iter_mut().enumerate() {
                o.size = o.size.max(libm::pow(nrm, q) * v[k].norm());
                for d in &grad {
                    o.gradient = o.gradient.max(libm::pow(nrm, q + 1.0) * d[k].norm());
                }
            }
        }
        Ok(out)
    }
}

/// Deterministic sample set for the size statistics: random directions
/// normalised to `‖g‖ = 1` and dilated by `2^k`, `k ∈ {−3, …, 3}`; the first
/// `r`-many points lie on the line `y = 0`.
pub fn cz_samples(g: &GroupDescriptor, count: usize, seed: u64) -> Vec<GroupPoint> {
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let y: Vec<f64> =
            if i < g.r { vec![0.0; 2 * g.n] } else { (0..2 * g.n).map(|_| StandardNormal.sample(&mut rng)).collect() };
        let t: Vec<f64> = (0..g.r).map(|_| StandardNormal.sample(&mut rng)).collect();
        let nrm = homogeneous_norm(&y, &t);
        let k = (rng.next_u32() % 7) as i32 - 3;
        out.push(dilate_point(libm::ldexp(1.0, k) / nrm, &GroupPoint::new(y, t)));
    }
    out
}

/// `L_m^{(α)}(z)` for complex `z`.
pub fn laguerre_complex(m: usize, alpha: f64, z: C64) -> C64 {
    let mut p0 = C64::new(1.0, 0.0);
    if m == 0 {
        return p0;
    }
    let mut p1 = C64::new(1.0 + alpha, 0.0) - z;
    for k in 1..m {
        let kf = k as f64;
        let p2 = (p1 * (C64::new(2.0 * kf + 1.0 + alpha, 0.0) - z) - p0 * (kf + alpha)) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Real Laguerre values reused by tests.
pub fn laguerre_real(m: usize, alpha: f64, x: f64) -> f64 {
    laguerre_upto(m, alpha, x)[m]
}
