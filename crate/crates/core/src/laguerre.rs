//! Laguerre polynomials, the orthonormal functions `l_k^{(p)}`, exponential
//! Laguerre functions `𝓛̃_k^{(p)}(y, τ)` and the fibre kernels `Q_m(y, τ)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::group::GroupDescriptor;
use crate::tau::{spectral_data, tau_coordinates, TauSpectrum};
use crate::C64;

/// Largest supported degree `m = |k|` and component `k_j`.
pub const DEGREE_CAP: usize = 60;

/// `L_m^{(α)}(x)` by the three-term recurrence.
pub fn laguerre_poly(m: i32, alpha: f64, x: f64) -> Result<f64> {
    if m < 0 {
        return Err(Error::NegativeDegree);
    }
    Ok(laguerre_upto(m as usize, alpha, x)[m as usize])
}

/// `[L_0^{(α)}(x), …, L_m^{(α)}(x)]`.
pub fn laguerre_upto(m: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(1.0);
    if m == 0 {
        return out;
    }
    out.push(1.0 + alpha - x);
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// `l_k^{(p)}(σ) = [k!/(k+p)!]^{1/2} L_k^{(p)}(σ) σ^{p/2} e^{−σ/2}`.
pub fn laguerre_l(k: usize, p: usize, sigma: f64) -> Result<f64> {
    if sigma < 0.0 {
        return Err(Error::NegativeArgument(sigma));
    }
    Ok(laguerre_l_unchecked(k, p, sigma))
}

fn laguerre_l_unchecked(k: usize, p: usize, sigma: f64) -> f64 {
    let l = laguerre_upto(k, p as f64, sigma)[k];
    if p == 0 {
        return l * libm::exp(-0.5 * sigma);
    }
    if sigma == 0.0 {
        return 0.0;
    }
    let log_norm = 0.5 * (libm::lgamma(k as f64 + 1.0) - libm::lgamma((k + p) as f64 + 1.0));
    l * libm::exp(log_norm + 0.5 * p as f64 * libm::log(sigma) - 0.5 * sigma)
}

/// Multi-index pair `(k, p)` for `𝓛̃_k^{(p)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    /// Laguerre degrees `k_j ≥ 0`.
    pub k: Vec<usize>,
    /// Angular orders `p_j`.
    pub p: Vec<i32>,
}

impl MultiIndex {
    /// Index with all `p_j = 0`.
    pub fn radial(k: Vec<usize>) -> Self {
        let n = k.len();
        Self { k, p: vec![0; n] }
    }

    /// `|k| = Σ k_j`.
    pub fn order(&self) -> usize {
        self.k.iter().sum()
    }
}

/// All `k ∈ ℤ^n_{≥0}` with `|k| = m`, in colexicographic order.
pub fn compositions(m: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return if m == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for last in 0..=m {
        for mut head in compositions(m - last, n - 1) {
            head.push(last);
            out.push(head);
        }
    }
    out
}

/// `𝓛̃_k^{(p)}(y, τ)` for a precomputed spectrum.
///
/// In τ-coordinates each plane contributes
/// `μ_j(τ̇)(2|τ|/π)(sgn p_j)^{p_j} l_{k_j}^{(|p_j|)}(2μ_j(τ)|y_j^τ|²) e^{ip_jθ_j}`.
pub fn exp_laguerre_spec(spec: &TauSpectrum, idx: &MultiIndex, y: &[f64]) -> C64 {
    let n = spec.mu.len();
    let tn = libm::sqrt(spec.tau.iter().map(|v| v * v).sum::<f64>());
    let yt = tau_coordinates(spec, y);
    let mut acc = C64::new(1.0, 0.0);
    for j in 0..n {
        let (a, b) = (yt[2 * j], yt[2 * j + 1]);
        let mu_unit = spec.mu[j] / tn;
        let r2 = mu_unit * (a * a + b * b);
        let p = idx.p[j];
        let ap = p.unsigned_abs() as usize;
        let mut val = 2.0 * tn / core::f64::consts::PI * laguerre_l_unchecked(idx.k[j], ap, 2.0 * tn * r2);
        if p < 0 && ap % 2 == 1 {
            val = -val;
        }
        let phase = if p == 0 {
            C64::new(1.0, 0.0)
        } else if a == 0.0 && b == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            let th = libm::atan2(b, a) * p as f64;
            C64::new(libm::cos(th), libm::sin(th))
        };
        acc *= phase * (mu_unit * val);
    }
    acc
}

/// `𝓛̃_k^{(p)}(y, τ)`.
pub fn exp_laguerre(g: &GroupDescriptor, idx: &MultiIndex, y: &[f64], tau: &[f64]) -> Result<C64> {
    if idx.k.len() != g.n || idx.p.len() != g.n {
        return Err(Error::DimensionMismatch { expected: g.n, got: idx.k.len() });
    }
    if let Some(&big) = idx.k.iter().max() {
        if big > DEGREE_CAP {
            return Err(Error::DegreeCap { m: big, cap: DEGREE_CAP });
        }
    }
    let spec = spectral_data(g, tau)?;
    Ok(exp_laguerre_spec(&spec, idx, y))
}

/// `(2^n δ/π^n) e^{−σ} L_m^{(n−1)}(2σ)` with `δ = Π μ_j(τ)`, `σ = ⟨𝓑^τy,y⟩`.
pub fn q_m_from_sigma(n: usize, m: usize, det_sqrt: f64, sigma: f64) -> f64 {
    let pref = libm::pow(2.0 / core::f64::consts::PI, n as f64) * det_sqrt;
    pref * libm::exp(-sigma) * laguerre_upto(m, n as f64 - 1.0, 2.0 * sigma)[m]
}

/// `Q_m(y, τ)`.
pub fn q_m(g: &GroupDescriptor, m: usize, y: &[f64], tau: &[f64]) -> Result<f64> {
    if m > DEGREE_CAP {
        return Err(Error::DegreeCap { m, cap: DEGREE_CAP });
    }
    let spec = spectral_data(g, tau)?;
    Ok(q_m_from_sigma(g.n, m, spec.det_sqrt, spec.sigma(y)))
}

/// `Σ_m R^m Q_m = (2^n δ/π^n)(1−R)^{−n} e^{−σ(1+R)/(1−R)}`.
pub fn q_generating(n: usize, det_sqrt: f64, sigma: f64, r: f64) -> f64 {
    let pref = libm::pow(2.0 / core::f64::consts::PI, n as f64) * det_sqrt;
    pref * libm::pow(1.0 - r, -(n as f64)) * libm::exp(-sigma * (1.0 + r) / (1.0 - r))
}

/// Applies `Δ̃ = −¼ Σ_j Ỹ_{v_j}²`, `Ỹ_v f = ∂_v f + 2i(yᵗB^τv) f`, to `f` at
/// `y` with fourth-order central differences of step `h` along the columns
/// `v_j` of `O(τ)`.
pub fn twisted_sublaplacian_fd<F: Fn(&[f64]) -> C64>(spec: &TauSpectrum, f: F, y: &[f64], h: f64) -> C64 {
    let d = y.len();
    let f0 = f(y);
    let mut acc = C64::new(0.0, 0.0);
    let mut pt = vec![0.0; d];
    for j in 0..d {
        let v: Vec<f64> = (0..d).map(|i| spec.o[(i, j)]).collect();
        let mut at = |s: f64| {
            for i in 0..d {
                pt[i] = y[i] + s * h * v[i];
            }
            f(&pt)
        };
        let (p1, m1, p2, m2) = (at(1.0), at(-1.0), at(2.0), at(-2.0));
        let d1 = (-p2 + p1 * 8.0 - m1 * 8.0 + m2) / (12.0 * h);
        let d2 = (-p2 + p1 * 16.0 - f0 * 30.0 + m1 * 16.0 - m2) / (12.0 * h * h);
        let mut byv = 0.0;
        for a in 0..d {
            for b in 0..d {
                byv += y[a] * spec.b_tau[(a, b)] * v[b];
            }
        }
        acc += d2 + C64::new(0.0, 4.0 * byv) * d1 - f0 * (4.0 * byv * byv);
    }
    acc * -0.25
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::examples::*;

    fn binom(a: f64, k: usize) -> f64 {
        let mut c = 1.0;
        for i in 0..k {
            c *= (a - i as f64) / (i as f64 + 1.0);
        }
        c
    }

    /// Explicit sum and the sum of its absolute terms (the cancellation scale).
    fn series(m: usize, alpha: f64, x: f64) -> (f64, f64) {
        let mut s = 0.0;
        let mut sa = 0.0;
        let mut fact = 1.0;
        for i in 0..=m {
            if i > 0 {
                fact *= i as f64;
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let term = binom(m as f64 + alpha, m - i) * libm::pow(x, i as f64) / fact;
            s += sign * term;
            sa += term;
        }
        (s, sa)
    }

    #[test]
    fn recurrence_matches_series() {
        for m in 0..=12 {
            for &alpha in &[0.0, 0.5, 1.0, 3.0] {
                for &x in &[0.0, 0.3, 1.7, 5.0, 11.0] {
                    let a = laguerre_poly(m, alpha, x).unwrap();
                    let (b, scale) = series(m as usize, alpha, x);
                    assert!((a - b).abs() <= 1e-14 * (1.0 + scale), "m={m} a={alpha} x={x}");
                }
            }
        }
        assert_eq!(laguerre_poly(1, 0.0, 2.0).unwrap(), -1.0);
        assert!((laguerre_poly(2, 0.0, 2.0).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(laguerre_poly(-1, 0.0, 2.0), Err(Error::NegativeDegree));
    }

    #[test]
    fn l_function_values() {
        assert!((laguerre_l(0, 0, 2.0).unwrap() - libm::exp(-1.0)).abs() < 1e-16);
        assert!(laguerre_l(1, 0, 1.0).unwrap().abs() < 1e-16);
        assert!(laguerre_l(0, 0, -1.0).is_err());
        // p = 1, k = 0: σ^{1/2} e^{−σ/2}.
        assert!((laguerre_l(0, 1, 4.0).unwrap() - 2.0 * libm::exp(-2.0)).abs() < 1e-15);
    }

    #[test]
    fn compositions_colex() {
        let c = compositions(2, 2);
        assert_eq!(c, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(compositions(3, 3).len(), 10);
    }

    #[test]
    fn heisenberg_ground_state() {
        let g = heisenberg();
        let v = exp_laguerre(&g, &MultiIndex::radial(vec![0]), &[1.0, 0.0], &[1.0]).unwrap();
        let want = 2.0 / core::f64::consts::PI * libm::exp(-1.0);
        assert!((v.re - want).abs() < 1e-15 && v.im == 0.0);
        let q = q_m(&g, 0, &[1.0, 0.0], &[1.0]).unwrap();
        assert!((q - want).abs() < 1e-15);
    }

    #[test]
    fn q_m_is_sum_of_exp_laguerre() {
        for g in [heisenberg(), anisotropic_r1(), anisotropic_r2(), quaternionic()] {
            let tau: Vec<f64> = (0..g.r).map(|b| 0.7 - 0.4 * b as f64).collect();
            let spec = spectral_data(&g, &tau).unwrap();
            let y: Vec<f64> = (0..2 * g.n).map(|i| 0.3 + 0.25 * i as f64).collect();
            for m in 0..5 {
                let s: C64 = compositions(m, g.n)
                    .into_iter()
                    .map(|k| exp_laguerre_spec(&spec, &MultiIndex::radial(k), &y))
                    .sum();
                let q = q_m(&g, m, &y, &tau).unwrap();
                assert!((s.re - q).abs() <= 1e-12 * (1.0 + q.abs()) && s.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn angular_phase_and_sign() {
        let g = heisenberg();
        let y = [0.0, 0.8];
        let plus = exp_laguerre(&g, &MultiIndex { k: vec![1], p: vec![1] }, &y, &[1.0]).unwrap();
        let minus = exp_laguerre(&g, &MultiIndex { k: vec![1], p: vec![-1] }, &y, &[1.0]).unwrap();
        assert!((plus + minus.conj()).norm() < 1e-15);
        let origin = exp_laguerre(&g, &MultiIndex { k: vec![0], p: vec![2] }, &[0.0, 0.0], &[1.0]).unwrap();
        assert_eq!(origin, C64::new(0.0, 0.0));
    }

    #[test]
    fn generating_identity() {
        for &(sigma, r) in &[(0.3, 0.5), (1.2, 0.3), (2.5, 0.6)] {
            let s: f64 = (0..=60).map(|m| libm::pow(r, m as f64) * q_m_from_sigma(2, m, 1.5, sigma)).sum();
            let c = q_generating(2, 1.5, sigma, r);
            assert!((s - c).abs() < 1e-10 * c.abs());
        }
    }

    #[test]
    fn fd_eigenfunction_ground_state() {
        let g = anisotropic_r1();
        let spec = spectral_data(&g, &[1.3]).unwrap();
        let idx = MultiIndex::radial(vec![1, 0]);
        let y = [0.2, -0.4, 0.3, 0.1];
        let f = |p: &[f64]| exp_laguerre_spec(&spec, &idx, p);
        let lam = spec.mu[0] * 3.0 + spec.mu[1];
        let lhs = twisted_sublaplacian_fd(&spec, f, &y, 1e-2);
        assert!((lhs - f(&y) * lam).norm() < 1e-6);
    }
}
