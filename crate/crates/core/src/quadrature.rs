//! Quadrature: Gauss–Legendre, generalised Gauss–Laguerre, product rules on
//! spheres and an adaptive Gauss–Kronrod integrator for vector integrands.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::C64;

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre_pd(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        for _ in 0..100 {
            let (p, dp) = legendre_pd(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_pd(n, z);
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    (x.iter().map(|v| c + h * v).collect(), w.iter().map(|v| h * v).collect())
}

/// Generalised Gauss–Laguerre rule for `∫₀^∞ x^α e^{−x} f(x) dx`.
///
/// Nodes start from the Golub–Welsch eigenvalues and are polished by Newton
/// steps; weights come from the closed form
/// `Γ(n+α+1)/(n! x_i [L_n^{(α)'}(x_i)]²)`, evaluated in logarithms.
pub fn gauss_laguerre(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jm[(k, k)] = 2.0 * k as f64 + alpha + 1.0;
        if k + 1 < n {
            let off = libm::sqrt((k as f64 + 1.0) * (k as f64 + 1.0 + alpha));
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let mut x: Vec<f64> = SymmetricEigen::new(jm).eigenvalues.iter().copied().collect();
    x.sort_by(f64::total_cmp);
    let eval = |z: f64| -> (f64, f64) {
        // Returns (L_n, L_n') scaled by a common positive factor.
        let (mut p0, mut p1) = (1.0, 1.0 + alpha - z);
        for k in 1..n {
            let kf = k as f64;
            let p2 = ((2.0 * kf + 1.0 + alpha - z) * p1 - (kf + alpha) * p0) / (kf + 1.0);
            p0 = p1;
            p1 = p2;
        }
        let d = (n as f64 * p1 - (n as f64 + alpha) * p0) / z;
        (p1, d)
    };
    let mut w = vec![0.0; n];
    let lg = libm::lgamma(n as f64 + alpha + 1.0) - libm::lgamma(n as f64 + 1.0);
    for i in 0..n {
        let mut z = x[i];
        for _ in 0..8 {
            let (p, d) = eval(z);
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs() {
                break;
            }
        }
        x[i] = z;
        let (_, d) = eval(z);
        w[i] = libm::exp(lg - libm::log(z) - 2.0 * libm::log(d.abs()));
    }
    (x, w)
}

/// Quadrature rule on the unit sphere `S^{dim−1} ⊂ ℝ^{dim}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    /// Ambient dimension.
    pub dim: usize,
    /// Unit nodes.
    pub nodes: Vec<Vec<f64>>,
    /// Positive weights summing to the sphere area.
    pub weights: Vec<f64>,
    /// Largest total degree integrated exactly.
    pub exact_degree: usize,
}

/// Surface area of `S^{dim−1}`.
pub fn sphere_area(dim: usize) -> f64 {
    2.0 * libm::pow(PI, dim as f64 / 2.0) / libm::tgamma(dim as f64 / 2.0)
}

/// Exact `∫_{S^{dim−1}} x^α dσ`.
pub fn sphere_monomial_integral(alpha: &[usize]) -> f64 {
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let betas: Vec<f64> = alpha.iter().map(|&a| (a as f64 + 1.0) / 2.0).collect();
    let sum: f64 = betas.iter().sum();
    let lg: f64 = betas.iter().map(|&b| libm::lgamma(b)).sum::<f64>() - libm::lgamma(sum);
    2.0 * libm::exp(lg)
}

impl SphereRule {
    /// Product rule of the given resolution.
    ///
    /// * `dim = 1`: `{±1}` with unit weights (exact for every degree).
    /// * `dim = 2`: `N = resolution` trapezoid nodes.
    /// * `dim = 3`: `resolution/2` Gauss–Legendre nodes in `cos θ` times
    ///   `resolution` azimuthal nodes.
    /// * `dim = 4`: Hopf coordinates `(√(1−s)e^{iφ₁}, √s e^{iφ₂})` with
    ///   `resolution/2` Gauss–Legendre nodes in `s` and `resolution` nodes in
    ///   each angle.
    ///
    /// Exactness is validated on all monomials up to degree
    /// `min(exact_degree, 8)`.
    pub fn new(dim: usize, resolution: usize) -> Result<Self> {
        let res = resolution.max(2);
        let rule = match dim {
            1 => Self { dim, nodes: vec![vec![1.0], vec![-1.0]], weights: vec![1.0, 1.0], exact_degree: usize::MAX },
            2 => {
                let mut nodes = Vec::with_capacity(res);
                for k in 0..res {
                    let a = 2.0 * PI * (k as f64 + 0.5) / res as f64;
                    nodes.push(vec![libm::cos(a), libm::sin(a)]);
                }
                Self { dim, nodes, weights: vec![2.0 * PI / res as f64; res], exact_degree: res - 1 }
            }
            3 => {
                let np = (res / 2).max(1);
                let (u, wu) = gauss_legendre(np);
                let mut nodes = Vec::with_capacity(np * res);
                let mut weights = Vec::with_capacity(np * res);
                for (ui, wi) in u.iter().zip(&wu) {
                    let s = libm::sqrt(1.0 - ui * ui);
                    for k in 0..res {
                        let a = 2.0 * PI * (k as f64 + 0.5) / res as f64;
                        nodes.push(vec![s * libm::cos(a), s * libm::sin(a), *ui]);
                        weights.push(wi * 2.0 * PI / res as f64);
                    }
                }
                Self { dim, nodes, weights, exact_degree: (2 * np - 1).min(res - 1) }
            }
            4 => {
                let ns = (res / 2).max(1);
                let (s, ws) = gauss_legendre_on(ns, 0.0, 1.0);
                let da = 2.0 * PI / res as f64;
                let mut nodes = Vec::with_capacity(ns * res * res);
                let mut weights = Vec::with_capacity(ns * res * res);
                for (si, wi) in s.iter().zip(&ws) {
                    let (c, d) = (libm::sqrt(1.0 - si), libm::sqrt(*si));
                    for k1 in 0..res {
                        let a1 = da * (k1 as f64 + 0.5);
                        for k2 in 0..res {
                            let a2 = da * (k2 as f64 + 0.5);
                            nodes.push(vec![
                                c * libm::cos(a1),
                                c * libm::sin(a1),
                                d * libm::cos(a2),
                                d * libm::sin(a2),
                            ]);
                            weights.push(0.5 * wi * da * da);
                        }
                    }
                }
                Self { dim, nodes, weights, exact_degree: (res - 1).min(2 * (2 * ns - 1) + 1) }
            }
            _ => return Err(Error::Config(alloc::format!("no sphere rule for dimension {dim}"))),
        };
        rule.validate(rule.exact_degree.min(8))?;
        Ok(rule)
    }

    /// Checks exactness on every monomial of total degree `≤ degree`.
    pub fn validate(&self, degree: usize) -> Result<()> {
        let mut alpha = vec![0usize; self.dim];
        loop {
            let total: usize = alpha.iter().sum();
            if total <= degree {
                let exact = sphere_monomial_integral(&alpha);
                let approx: f64 = self
                    .nodes
                    .iter()
                    .zip(&self.weights)
                    .map(|(x, w)| w * x.iter().zip(&alpha).map(|(v, &a)| libm::pow(*v, a as f64)).product::<f64>())
                    .sum();
                if (approx - exact).abs() > 1e-12 * sphere_area(self.dim) {
                    return Err(Error::QuadratureNotConverged((approx - exact).abs()));
                }
            }
            // Odometer over exponents 0..=degree.
            let mut i = 0;
            loop {
                if i == self.dim {
                    return Ok(());
                }
                alpha[i] += 1;
                if alpha[i] <= degree {
                    break;
                }
                alpha[i] = 0;
                i += 1;
            }
        }
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// True when the rule has no nodes.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const GK_WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: FnMut(f64, &mut [C64])>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [C64]) -> (Vec<C64>, f64, f64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let zero = C64::new(0.0, 0.0);
    let mut k = vec![zero; dim];
    let mut g = vec![zero; dim];
    let mut abs = 0.0f64;
    for i in 0..8 {
        let xs: &[f64] = if i == 7 { &[0.0] } else { &[-GK_X[i], GK_X[i]] };
        for &s in xs {
            f(c + h * s, buf);
            abs += GK_WK[i] * buf.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for q in 0..dim {
                k[q] += buf[q] * GK_WK[i];
                if i % 2 == 1 {
                    g[q] += buf[q] * GK_WG[i / 2];
                }
            }
        }
    }
    let mut err = 0.0f64;
    for q in 0..dim {
        k[q] *= h;
        g[q] *= h;
        err = err.max((k[q] - g[q]).norm());
    }
    (k, err, abs * h.abs())
}

/// Rule on `S^{r−1}` graded towards the great sphere orthogonal to `axis`.
///
/// Points are written `sin θ·a + cos θ·ω` with `ω` on the unit sphere of
/// `a^⊥` (`sub`, of dimension `r − 1`) and surface element `cos^{r−2}θ dθ dω`.
/// The latitude `θ ∈ [−π/2, π/2]` is split at `±width·2^k` and each panel
/// carries `order` Gauss–Legendre nodes. `a` is the sign-normalised `axis`
/// (first non-zero entry positive), so `axis` and `−axis` give the same rule,
/// and the rule is antipodally symmetric whenever `sub` is.
pub fn graded_sphere_rule(axis: &[f64], width: f64, order: usize, sub: &SphereRule) -> Result<SphereRule> {
    let r = axis.len();
    if r < 2 || sub.dim != r - 1 {
        return Err(Error::Config(alloc::format!(
            "graded rule needs r >= 2 and an S^{} sub-rule",
            r.saturating_sub(2)
        )));
    }
    let norm = libm::sqrt(axis.iter().map(|v| v * v).sum::<f64>());
    if !(norm > 0.0) || !(width > 0.0) {
        return Err(Error::Config("graded rule needs a non-zero axis and a positive width".into()));
    }
    let sign = if axis.iter().find(|v| **v != 0.0).copied().unwrap_or(1.0) < 0.0 { -1.0 } else { 1.0 };
    let a: Vec<f64> = axis.iter().map(|v| sign * v / norm).collect();
    let frame = crate::linalg::householder_e1(&a);

    let half = PI / 2.0;
    let mut cuts = vec![0.0];
    let mut c = width.min(half);
    while c < half {
        cuts.push(c);
        c *= 2.0;
    }
    cuts.push(half);
    let (x, w) = gauss_legendre(order.max(1));
    let mut thetas = Vec::new();
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        for (xi, wi) in x.iter().zip(&w) {
            let th = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xi;
            let wt = 0.5 * (hi - lo) * wi * libm::pow(libm::cos(th), r as f64 - 2.0);
            thetas.push((th, wt));
            thetas.push((-th, wt));
        }
    }
    let mut nodes = Vec::with_capacity(thetas.len() * sub.len());
    let mut weights = Vec::with_capacity(thetas.len() * sub.len());
    for (th, wt) in thetas {
        let (st, ct) = (libm::sin(th), libm::cos(th));
        for (om, wo) in sub.nodes.iter().zip(&sub.weights) {
            let node: Vec<f64> = (0..r)
                .map(|i| st * frame[(i, 0)] + ct * (1..r).map(|j| frame[(i, j)] * om[j - 1]).sum::<f64>())
                .collect();
            nodes.push(node);
            weights.push(wt * wo);
        }
    }
    Ok(SphereRule { dim: r, nodes, weights, exact_degree: 0 })
}

/// Adaptive Gauss–Kronrod (7/15) integration of a vector-valued integrand on
/// `[a, b]`, bisecting the worst interval until the summed error estimate is
/// below `max(abs_tol, rel_tol·S)`, where `S` bounds `∫ max_q |f_q|`; measuring
/// against `S` rather than `|I|` keeps cancelling integrands from chasing
/// round-off.
pub fn adaptive_gk15<F: FnMut(f64, &mut [C64])>(
    mut f: F,
    a: f64,
    b: f64,
    dim: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<Vec<C64>> {
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    let mut parts: Vec<(f64, f64, Vec<C64>, f64, f64)> = Vec::new();
    let (v, e, s) = gk15(&mut f, a, b, dim, &mut buf);
    parts.push((a, b, v, e, s));
    loop {
        let mut total = vec![C64::new(0.0, 0.0); dim];
        let mut err = 0.0;
        let mut scale = 0.0;
        let mut worst = 0;
        for (i, p) in parts.iter().enumerate() {
            for q in 0..dim {
                total[q] += p.2[q];
            }
            err += p.3;
            scale += p.4;
            if p.3 > parts[worst].3 {
                worst = i;
            }
        }
        if err <= abs_tol.max(rel_tol * scale) {
            return Ok(total);
        }
        if parts.len() >= max_intervals {
            return Err(Error::QuadratureNotConverged(err / scale.max(f64::MIN_POSITIVE)));
        }
        let (lo, hi, ..) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1, s1) = gk15(&mut f, lo, mid, dim, &mut buf);
        let (v2, e2, s2) = gk15(&mut f, mid, hi, dim, &mut buf);
        parts.push((lo, mid, v1, e1, s1));
        parts.push((mid, hi, v2, e2, s2));
        // Keep a deterministic order independent of swap_remove.
        parts.sort_by(|x, y| x.0.total_cmp(&y.0));
    }
}
