//! Step-two nilpotent groups `ℝ^{2n} × ℝ^r`: validation, group law,
//! dilations, homogeneous norm and quasi-distance.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Largest supported `n`.
pub const MAX_N: usize = 16;
/// Largest supported `r`.
pub const MAX_R: usize = 4;
/// Default singular-value threshold for non-degeneracy.
pub const DEFAULT_SIGMA_MIN_THRESHOLD: f64 = 1e-8;

/// A validated group: `r` skew-symmetric `2n × 2n` matrices `B^β`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDescriptor {
    /// Half the horizontal dimension.
    pub n: usize,
    /// Centre dimension.
    pub r: usize,
    /// The matrices `B^β`, `β = 1..r`.
    pub b: Vec<DMatrix<f64>>,
    /// Homogeneous dimension `2n + 2r`.
    pub q: usize,
    /// Smallest singular value of `B^τ` over the sampled unit `τ`.
    pub sigma_min: f64,
    /// Largest singular value of `B^τ` over the sampled unit `τ`.
    pub sigma_max: f64,
    /// Threshold used during validation.
    pub sigma_min_threshold: f64,
}

/// A point `(y, t)` of the group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint {
    /// Horizontal part, length `2n`.
    pub y: Vec<f64>,
    /// Central part, length `r`.
    pub t: Vec<f64>,
}

impl GroupPoint {
    /// Builds a point from its two parts.
    pub fn new(y: Vec<f64>, t: Vec<f64>) -> Self {
        Self { y, t }
    }

    /// The identity of a group with the given dimensions.
    pub fn identity(n: usize, r: usize) -> Self {
        Self { y: vec![0.0; 2 * n], t: vec![0.0; r] }
    }
}

/// Unit directions at which non-degeneracy is checked.
///
/// `r = 1`: `±1`. `r = 2`: 360 equispaced circle points. `r ≥ 3`: the
/// `2r(r+1)`-point set made of the `±e_i`, the `(±e_i ± e_j)/√2` and `2r`
/// seeded random directions, followed by 1000 seeded uniform random points.
pub fn nondegeneracy_samples(r: usize) -> Vec<Vec<f64>> {
    match r {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..360)
            .map(|k| {
                let a = 2.0 * core::f64::consts::PI * k as f64 / 360.0;
                vec![libm::cos(a), libm::sin(a)]
            })
            .collect(),
        _ => {
            let mut out = Vec::new();
            for i in 0..r {
                for s in [1.0, -1.0] {
                    let mut v = vec![0.0; r];
                    v[i] = s;
                    out.push(v);
                }
            }
            let h = core::f64::consts::FRAC_1_SQRT_2;
            for i in 0..r {
                for j in i + 1..r {
                    for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        let mut v = vec![0.0; r];
                        v[i] = si * h;
                        v[j] = sj * h;
                        out.push(v);
                    }
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(0x5e_ed0f_5a3e);
            for _ in 0..(2 * r + 1000) {
                out.push(random_unit(&mut rng, r));
            }
            out
        }
    }
}

/// Uniform random point on `S^{r-1}`.
pub fn random_unit<R: rand_core::RngCore>(rng: &mut R, r: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..r).map(|_| StandardNormal.sample(rng)).collect();
        let nrm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if nrm > 1e-12 {
            return v.into_iter().map(|x| x / nrm).collect();
        }
    }
}

/// Extreme singular values of a skew matrix via `(Bᵗ B)`.
pub(crate) fn singular_range(bt: &DMatrix<f64>) -> (f64, f64) {
    let ata = bt.transpose() * bt;
    let eig = SymmetricEigen::new(ata);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &l in eig.eigenvalues.iter() {
        let s = libm::sqrt(l.max(0.0));
        lo = lo.min(s);
        hi = hi.max(s);
    }
    (lo, hi)
}

/// Validates the matrix list and returns a descriptor.
///
/// Skew-symmetry must hold exactly; non-degeneracy is checked on
/// [`nondegeneracy_samples`] against `sigma_min_threshold`.
pub fn validate_group(
    n: usize,
    r: usize,
    b_list: &[DMatrix<f64>],
    sigma_min_threshold: f64,
) -> Result<GroupDescriptor> {
    if n == 0 || r == 0 || n > MAX_N || r > MAX_R {
        return Err(Error::Dimensions { n, r });
    }
    if b_list.len() != r {
        return Err(Error::Shape(alloc::format!("expected {r} matrices, got {}", b_list.len())));
    }
    let d = 2 * n;
    for (beta, m) in b_list.iter().enumerate() {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Shape(alloc::format!(
                "B^{} is {}x{}, expected {d}x{d}",
                beta + 1,
                m.nrows(),
                m.ncols()
            )));
        }
        for i in 0..d {
            for j in i..d {
                if m[(i, j)] != -m[(j, i)] || !m[(i, j)].is_finite() {
                    return Err(Error::NotSkewSymmetric { beta: beta + 1, row: i, col: j });
                }
            }
        }
    }
    let mut g = GroupDescriptor {
        n,
        r,
        b: b_list.to_vec(),
        q: 2 * n + 2 * r,
        sigma_min: f64::INFINITY,
        sigma_max: 0.0,
        sigma_min_threshold,
    };
    for tau in nondegeneracy_samples(r) {
        let (lo, hi) = singular_range(&g.b_tau_unchecked(&tau));
        if !(lo >= sigma_min_threshold) {
            return Err(Error::Degenerate { tau, sigma_min: lo });
        }
        g.sigma_min = g.sigma_min.min(lo);
        g.sigma_max = g.sigma_max.max(hi);
    }
    Ok(g)
}

impl GroupDescriptor {
    /// Horizontal dimension `2n`.
    pub fn dim_y(&self) -> usize {
        2 * self.n
    }

    fn check_point(&self, g: &GroupPoint) -> Result<()> {
        if g.y.len() != 2 * self.n {
            return Err(Error::DimensionMismatch { expected: 2 * self.n, got: g.y.len() });
        }
        if g.t.len() != self.r {
            return Err(Error::DimensionMismatch { expected: self.r, got: g.t.len() });
        }
        Ok(())
    }

    /// `B(x, y)_β = Σ_{kl} B^β_{kl} x_k y_l`.
    pub fn b_form(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.b
            .iter()
            .map(|m| {
                let mut s = 0.0;
                for k in 0..x.len() {
                    for l in 0..y.len() {
                        s += m[(k, l)] * x[k] * y[l];
                    }
                }
                s
            })
            .collect()
    }

    pub(crate) fn b_tau_unchecked(&self, tau: &[f64]) -> DMatrix<f64> {
        let d = 2 * self.n;
        let mut out = DMatrix::zeros(d, d);
        for (m, &tb) in self.b.iter().zip(tau) {
            out += m * tb;
        }
        out
    }

    /// `B^τ = Σ_β τ_β B^β`.
    pub fn b_tau(&self, tau: &[f64]) -> Result<DMatrix<f64>> {
        if tau.len() != self.r {
            return Err(Error::DimensionMismatch { expected: self.r, got: tau.len() });
        }
        Ok(self.b_tau_unchecked(tau))
    }

    /// Group product `(g.y + h.y, g.t + h.t + 2B(g.y, h.y))`.
    pub fn mul(&self, g: &GroupPoint, h: &GroupPoint) -> Result<GroupPoint> {
        self.check_point(g)?;
        self.check_point(h)?;
        let bf = self.b_form(&g.y, &h.y);
        Ok(GroupPoint {
            y: g.y.iter().zip(&h.y).map(|(a, b)| a + b).collect(),
            t: (0..self.r).map(|b| g.t[b] + h.t[b] + 2.0 * bf[b]).collect(),
        })
    }

    /// Inverse `(−y, −t)`.
    pub fn inv(&self, g: &GroupPoint) -> GroupPoint {
        GroupPoint { y: g.y.iter().map(|v| -v).collect(), t: g.t.iter().map(|v| -v).collect() }
    }

    /// Parabolic dilation `(λy, λ²t)`.
    pub fn dilate(&self, lambda: f64, g: &GroupPoint) -> Result<GroupPoint> {
        if !(lambda > 0.0) {
            return Err(Error::NonPositiveLambda(lambda));
        }
        Ok(dilate_point(lambda, g))
    }

    /// Homogeneous norm `(|y|⁴ + |t|²)^{1/4}`.
    pub fn homogeneous_norm(&self, g: &GroupPoint) -> f64 {
        homogeneous_norm(&g.y, &g.t)
    }

    /// Quasi-distance `ρ(h, g) = ‖g⁻¹ h‖`.
    pub fn quasi_distance(&self, h: &GroupPoint, g: &GroupPoint) -> Result<f64> {
        Ok(self.homogeneous_norm(&self.mul(&self.inv(g), h)?))
    }

    /// Measured lower bound for the quasi-triangle constant: the largest
    /// `ρ(x, z) / (ρ(x, y) + ρ(y, z))` over `samples` seeded random triples.
    /// Points are Gaussian, each dilated by a random factor in `[e^{−2}, e²]`.
    pub fn triangle_constant_estimate(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let point = |rng: &mut ChaCha8Rng| {
            let lam = libm::exp(4.0 * rand_distr::Uniform::new(0.0, 1.0).expect("unit interval").sample(rng) - 2.0);
            let y: Vec<f64> = (0..2 * self.n).map(|_| StandardNormal.sample(rng)).collect();
            let t: Vec<f64> = (0..self.r).map(|_| StandardNormal.sample(rng)).collect();
            dilate_point(lam, &GroupPoint { y, t })
        };
        let mut worst = 1.0f64;
        for _ in 0..samples {
            let (x, y, z) = (point(&mut rng), point(&mut rng), point(&mut rng));
            let (Ok(xz), Ok(xy), Ok(yz)) =
                (self.quasi_distance(&x, &z), self.quasi_distance(&x, &y), self.quasi_distance(&y, &z))
            else {
                continue;
            };
            if xy + yz > 0.0 {
                worst = worst.max(xz / (xy + yz));
            }
        }
        worst
    }
}

/// `(λy, λ²t)` without validation.
pub fn dilate_point(lambda: f64, g: &GroupPoint) -> GroupPoint {
    let l2 = lambda * lambda;
    GroupPoint { y: g.y.iter().map(|v| lambda * v).collect(), t: g.t.iter().map(|v| l2 * v).collect() }
}

/// `(|y|⁴ + |t|²)^{1/4}`.
pub fn homogeneous_norm(y: &[f64], t: &[f64]) -> f64 {
    let y2: f64 = y.iter().map(|v| v * v).sum();
    let t2: f64 = t.iter().map(|v| v * v).sum();
    libm::sqrt(libm::sqrt(y2 * y2 + t2))
}

/// `J = [[0,−1],[1,0]]`.
pub fn symplectic_j() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
}

/// Block-diagonal matrix with blocks `c_j·J`.
pub fn block_j(scales: &[f64]) -> DMatrix<f64> {
    let d = 2 * scales.len();
    let mut m = DMatrix::zeros(d, d);
    for (j, &c) in scales.iter().enumerate() {
        m[(2 * j, 2 * j + 1)] = -c;
        m[(2 * j + 1, 2 * j)] = c;
    }
    m
}

/// Left multiplication by the quaternion units `i, j, k` on `ℝ⁴ = span(1,i,j,k)`.
pub fn quaternion_units() -> [DMatrix<f64>; 3] {
    // Columns are the images of the basis vectors 1, i, j, k.
    let qi = DMatrix::from_row_slice(4, 4, &[0., -1., 0., 0., 1., 0., 0., 0., 0., 0., 0., -1., 0., 0., 1., 0.]);
    let qj = DMatrix::from_row_slice(4, 4, &[0., 0., -1., 0., 0., 0., 0., 1., 1., 0., 0., 0., 0., -1., 0., 0.]);
    let qk = DMatrix::from_row_slice(4, 4, &[0., 0., 0., -1., 0., 0., -1., 0., 0., 1., 0., 0., 1., 0., 0., 0.]);
    [qi, qj, qk]
}

/// Standard example groups used by tests, examples and the CLI.
pub mod examples {
    use super::*;

    /// The Heisenberg group `H₁`: `n = r = 1`, `B¹ = J`.
    pub fn heisenberg() -> GroupDescriptor {
        validate_group(1, 1, &[symplectic_j()], DEFAULT_SIGMA_MIN_THRESHOLD).unwrap()
    }

    /// `n = 2, r = 1`, `B¹ = blockdiag(J, 2J)`.
    pub fn anisotropic_r1() -> GroupDescriptor {
        validate_group(2, 1, &[block_j(&[1.0, 2.0])], DEFAULT_SIGMA_MIN_THRESHOLD).unwrap()
    }

    /// `n = 2, r = 2`, `B¹ = blockdiag(J, 2J)`, `B² =` quaternion `j`.
    pub fn anisotropic_r2() -> GroupDescriptor {
        let [_, qj, _] = quaternion_units();
        validate_group(2, 2, &[block_j(&[1.0, 2.0]), qj], DEFAULT_SIGMA_MIN_THRESHOLD).unwrap()
    }

    /// Quaternionic H-type group `n = 2, r = 3`.
    pub fn quaternionic() -> GroupDescriptor {
        validate_group(2, 3, &quaternion_units(), DEFAULT_SIGMA_MIN_THRESHOLD).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    fn pt(y: &[f64], t: &[f64]) -> GroupPoint {
        GroupPoint::new(y.to_vec(), t.to_vec())
    }

    #[test]
    fn heisenberg_validates_with_unit_sigma() {
        let g = heisenberg();
        assert!((g.sigma_min - 1.0).abs() < 1e-14);
        assert_eq!(g.q, 4);
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let z = DMatrix::zeros(2, 2);
        assert!(matches!(validate_group(1, 1, &[z], 1e-8), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn non_skew_is_rejected_with_indices() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0 + 1e-16 * 4.0, 0.0]);
        assert_eq!(validate_group(1, 1, &[m], 1e-8), Err(Error::NotSkewSymmetric { beta: 1, row: 0, col: 1 }));
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(validate_group(1, 2, &[symplectic_j()], 1e-8), Err(Error::Shape(_))));
        assert!(matches!(validate_group(2, 1, &[symplectic_j()], 1e-8), Err(Error::Shape(_))));
        assert!(matches!(validate_group(17, 1, &[], 1e-8), Err(Error::Dimensions { .. })));
    }

    #[test]
    fn quaternionic_is_h_type() {
        let g = quaternionic();
        assert!((g.sigma_min - 1.0).abs() < 1e-12 && (g.sigma_max - 1.0).abs() < 1e-12);
        let s = 1.0 / libm::sqrt(3.0);
        let bt = g.b_tau(&[s, s, s]).unwrap();
        let p = bt.transpose() * &bt;
        assert!((p - DMatrix::<f64>::identity(4, 4)).norm() < 1e-14);
    }

    #[test]
    fn anisotropic_r2_nondegenerate() {
        let g = anisotropic_r2();
        assert!(g.sigma_min > 0.5);
    }

    #[test]
    fn abelian_product() {
        let g = validate_group(1, 1, &[DMatrix::zeros(2, 2)], 0.0).unwrap();
        let p = g.mul(&pt(&[1., 2.], &[3.]), &pt(&[4., 5.], &[6.])).unwrap();
        assert_eq!(p, pt(&[5., 7.], &[9.]));
    }

    #[test]
    fn heisenberg_product() {
        let g = heisenberg();
        let p = g.mul(&pt(&[1., 0.], &[0.]), &pt(&[0., 1.], &[0.])).unwrap();
        // 2·B¹_{12}·x_1·y_2 computed independently.
        let oracle = 2.0 * symplectic_j()[(0, 1)];
        assert_eq!(p, pt(&[1., 1.], &[oracle]));
        assert_eq!(p.t[0], -2.0);
    }

    #[test]
    fn inverse_and_dilation() {
        let g = heisenberg();
        let a = pt(&[1., 0.], &[5.]);
        assert_eq!(g.inv(&a), pt(&[-1., 0.], &[-5.]));
        assert_eq!(g.mul(&a, &g.inv(&a)).unwrap(), GroupPoint::identity(1, 1));
        assert_eq!(g.dilate(2.0, &pt(&[1., 0.], &[1.])).unwrap(), pt(&[2., 0.], &[4.]));
        assert!(matches!(g.dilate(0.0, &a), Err(Error::NonPositiveLambda(_))));
    }

    #[test]
    fn norms() {
        let g = heisenberg();
        assert_eq!(g.homogeneous_norm(&pt(&[1., 0.], &[0.])), 1.0);
        assert!((g.homogeneous_norm(&pt(&[0., 0.], &[4.])) - 2.0).abs() < 1e-15);
        assert!((g.homogeneous_norm(&pt(&[1., 1.], &[2.])) - libm::pow(8.0, 0.25)).abs() < 1e-15);
    }

    #[test]
    fn inverse_product_matches_componentwise_formula() {
        let g = anisotropic_r2();
        let h = pt(&[0.3, -1.0, 2.0, 0.5], &[1.0, -2.0]);
        let a = pt(&[1.5, 0.2, -0.7, 0.1], &[0.4, 0.9]);
        let lhs = g.mul(&g.inv(&h), &a).unwrap();
        let bf = g.b_form(&h.y, &a.y);
        for b in 0..2 {
            assert!((lhs.t[b] - (a.t[b] - h.t[b] - 2.0 * bf[b])).abs() < 1e-14);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let g = heisenberg();
        assert!(matches!(g.mul(&pt(&[1.0], &[0.]), &pt(&[1., 0.], &[0.])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn triangle_constant_is_finite_and_reproducible() {
        for g in [heisenberg(), quaternionic()] {
            let c = g.triangle_constant_estimate(2000, 3);
            assert!((1.0..10.0).contains(&c), "{c}");
            assert_eq!(c, g.triangle_constant_estimate(2000, 3));
        }
    }
}
