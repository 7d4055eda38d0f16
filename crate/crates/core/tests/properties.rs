//! Property-based invariants of the group law, the spectral package, the
//! Laguerre identities and the kernels.

use nilproj_core::group::examples::{anisotropic_r1, anisotropic_r2, heisenberg, quaternionic};
use nilproj_core::group::{dilate_point, homogeneous_norm};
use nilproj_core::laguerre::{compositions, exp_laguerre, laguerre_upto, q_m};
use nilproj_core::tau::{j_of_mu, spectral_data};
use nilproj_core::{GroupDescriptor, GroupPoint, KernelConfig, KernelEvaluator, MultiIndex};
use proptest::prelude::*;
use std::sync::OnceLock;

fn groups() -> [GroupDescriptor; 4] {
    [heisenberg(), anisotropic_r1(), anisotropic_r2(), quaternionic()]
}

fn vec_in(len: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(lo..hi, len)
}

fn point(g: &GroupDescriptor) -> impl Strategy<Value = GroupPoint> {
    (vec_in(2 * g.n, -2.0, 2.0), vec_in(g.r, -2.0, 2.0)).prop_map(|(y, t)| GroupPoint::new(y, t))
}

fn close_vec(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

fn evaluator() -> &'static KernelEvaluator {
    static EV: OnceLock<KernelEvaluator> = OnceLock::new();
    EV.get_or_init(|| KernelEvaluator::new(&anisotropic_r2(), KernelConfig::default()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_law_is_associative_with_inverses(
        (gi, a, b, c) in (0usize..4).prop_flat_map(|gi| {
            let g = &groups()[gi];
            (Just(gi), point(g), point(g), point(g))
        })
    ) {
        let g = &groups()[gi];
        let left = g.mul(&g.mul(&a, &b).unwrap(), &c).unwrap();
        let right = g.mul(&a, &g.mul(&b, &c).unwrap()).unwrap();
        prop_assert!(close_vec(&left.t, &right.t, 1e-12) && close_vec(&left.y, &right.y, 1e-12));
        let e = g.mul(&a, &g.inv(&a)).unwrap();
        prop_assert!(e.y.iter().chain(&e.t).all(|v| v.abs() < 1e-12));
        // Dilations are automorphisms.
        let lam = 1.7;
        let d1 = dilate_point(lam, &g.mul(&a, &b).unwrap());
        let d2 = g.mul(&dilate_point(lam, &a), &dilate_point(lam, &b)).unwrap();
        prop_assert!(close_vec(&d1.t, &d2.t, 1e-12) && close_vec(&d1.y, &d2.y, 1e-12));
    }

    #[test]
    fn normal_form_and_scaling(gi in 0usize..4, raw in vec_in(3, -3.0, 3.0), lam in 0.1f64..10.0) {
        let g = &groups()[gi];
        let tau = &raw[..g.r];
        prop_assume!(tau.iter().map(|v| v * v).sum::<f64>() > 1e-4);
        let s = spectral_data(g, tau).unwrap();
        let resid = (s.o.transpose() * &s.b_tau * &s.o - j_of_mu(&s.mu)).norm();
        prop_assert!(resid <= 1e-8 * s.b_tau.norm());
        prop_assert!(s.mu.windows(2).all(|w| w[0] >= w[1]) && s.mu.iter().all(|m| *m > 0.0));
        let scaled: Vec<f64> = tau.iter().map(|v| v * lam).collect();
        let s2 = spectral_data(g, &scaled).unwrap();
        prop_assert!(close_vec(&s2.mu, &s.mu.iter().map(|m| m * lam).collect::<Vec<_>>(), 1e-10));
        prop_assert!((s2.det_sqrt - s.det_sqrt * lam.powi(g.n as i32)).abs() <= 1e-9 * s2.det_sqrt);
    }

    #[test]
    fn laguerre_addition(x1 in 0.0f64..8.0, x2 in 0.0f64..8.0, m in 0usize..10) {
        let (a, b) = (laguerre_upto(m, 0.0, x1), laguerre_upto(m, 0.0, x2));
        let lhs: f64 = (0..=m).map(|k| a[k] * b[m - k]).sum();
        let rhs = laguerre_upto(m, 1.0, x1 + x2)[m];
        let scale: f64 = (0..=m).map(|k| (a[k] * b[m - k]).abs()).sum::<f64>().max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn q_m_is_sum_of_exponential_laguerre(gi in 0usize..4, y in vec_in(4, -1.5, 1.5), raw in vec_in(3, -2.0, 2.0), m in 0usize..6) {
        let g = &groups()[gi];
        let (y, tau) = (&y[..2 * g.n], &raw[..g.r]);
        prop_assume!(tau.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let q = q_m(g, m, y, tau).unwrap();
        let mut sum = 0.0;
        let mut abs = 0.0;
        for k in compositions(m, g.n) {
            let v = exp_laguerre(g, &MultiIndex::radial(k), y, tau).unwrap();
            prop_assert!(v.im.abs() <= 1e-14 * (1.0 + v.re.abs()));
            sum += v.re;
            abs += v.re.abs();
        }
        prop_assert!((sum - q).abs() <= 1e-11 * abs.max(q.abs()).max(1e-300));
    }

    #[test]
    fn kernel_is_homogeneous_and_conjugate_symmetric(p in point(&anisotropic_r2()), lam in 0.25f64..4.0, m in 0usize..4) {
        let y2: f64 = p.y.iter().map(|v| v * v).sum();
        prop_assume!(y2 > 0.1);
        let ev = evaluator();
        let q = 8.0;
        let base = ev.p_m_any(m, &p.y, &p.t).unwrap();
        let floor = 1e-6 * homogeneous_norm(&p.y, &p.t).powf(-q);
        let d = dilate_point(lam, &p);
        let scaled = ev.p_m_any(m, &d.y, &d.t).unwrap() * lam.powf(q);
        prop_assert!((scaled - base).norm() <= 1e-8 * base.norm().max(floor));
        let ny: Vec<f64> = p.y.iter().map(|v| -v).collect();
        let nt: Vec<f64> = p.t.iter().map(|v| -v).collect();
        let neg = ev.p_m_any(m, &ny, &nt).unwrap();
        prop_assert!((neg - base.conj()).norm() <= 1e-12 * base.norm().max(floor));
    }
}
