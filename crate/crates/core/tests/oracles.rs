//! Kernel values against an independent oracle: for `r = 1`, `P_m(y, t)` is
//! the inverse Fourier transform `(1/π)∫₀^∞ cos(τt) Q_m(y, τ) dτ` of the
//! explicit level kernel, integrated here by composite Gauss–Legendre.

use nilproj_core::group::examples::{anisotropic_r1, heisenberg};
use nilproj_core::quadrature::gauss_legendre_on;
use nilproj_core::{KernelConfig, KernelEvaluator};

/// `L_m^{(α)}(x)` by the three-term recurrence.
fn laguerre(m: usize, alpha: f64, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, 1.0 + alpha - x);
    if m == 0 {
        return a;
    }
    for k in 1..m {
        let k = k as f64;
        let c = ((2.0 * k + 1.0 + alpha - x) * b - (k + alpha) * a) / (k + 1.0);
        a = b;
        b = c;
    }
    b
}

/// `Q_m(y, τ)` for `B = blockdiag(s₁J, …, s_nJ)` at `τ > 0`.
fn q_block(scales: &[f64], m: usize, y: &[f64], tau: f64) -> f64 {
    let n = scales.len();
    let delta: f64 = scales.iter().map(|s| s * tau).product();
    let sigma: f64 = scales.iter().enumerate().map(|(j, s)| s * tau * (y[2 * j].powi(2) + y[2 * j + 1].powi(2))).sum();
    (2.0 / std::f64::consts::PI).powi(n as i32) * delta * (-sigma).exp() * laguerre(m, n as f64 - 1.0, 2.0 * sigma)
}

fn inverse_fourier(scales: &[f64], m: usize, y: &[f64], t: f64) -> f64 {
    let smin = scales.iter().cloned().fold(f64::INFINITY, f64::min);
    let y2: f64 = y.iter().map(|v| v * v).sum();
    let upper = 80.0 / (smin * y2);
    let panels = 400;
    let mut acc = 0.0;
    for p in 0..panels {
        let (a, b) = (upper * p as f64 / panels as f64, upper * (p + 1) as f64 / panels as f64);
        let (x, w) = gauss_legendre_on(20, a, b);
        for (xi, wi) in x.iter().zip(&w) {
            acc += wi * (xi * t).cos() * q_block(scales, m, y, *xi);
        }
    }
    acc / std::f64::consts::PI
}

#[test]
fn heisenberg_kernels_match_inverse_fourier() {
    let ev = KernelEvaluator::new(&heisenberg(), KernelConfig::default()).unwrap();
    for (y, t) in [([0.7, -0.2], 0.3), ([1.1, 0.4], -1.7), ([0.3, 0.3], 2.5)] {
        for m in [0, 1, 3, 6] {
            let expect = inverse_fourier(&[1.0], m, &y, t);
            for got in [ev.p_m(m, &y, &[t]).unwrap(), ev.p_m_continued(m, &y, &[t]).unwrap()] {
                assert!((got.re - expect).abs() <= 1e-9 * expect.abs().max(1e-3), "m={m} {got} {expect}");
                assert!(got.im.abs() <= 1e-9 * expect.abs().max(1e-3));
            }
        }
    }
}

#[test]
fn anisotropic_kernels_match_inverse_fourier() {
    let ev = KernelEvaluator::new(&anisotropic_r1(), KernelConfig::default()).unwrap();
    for (y, t) in [([0.7, -0.2, 0.1, 0.5], 0.3), ([0.2, 0.4, -0.9, 0.1], -1.2)] {
        for m in [0, 2, 5] {
            let expect = inverse_fourier(&[1.0, 2.0], m, &y, t);
            let got = ev.p_m_oracle(m, &y, &[t]).unwrap();
            assert!((got.re - expect).abs() <= 1e-9 * expect.abs().max(1e-3), "m={m} {got} {expect}");
        }
    }
}
