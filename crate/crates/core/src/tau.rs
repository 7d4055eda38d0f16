//! Spectral package of `B^τ`: eigenvalues `μ_j(τ)`, the normalising
//! orthogonal matrix `O(τ)`, `𝓑^τ = [(B^τ)ᵗB^τ]^{1/2}`, `Π μ_j(τ)`, and the
//! holomorphic extension of `𝓑` to complex `z` by a Cauchy integral.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::group::GroupDescriptor;
use crate::linalg::{det_c, invert_in_place};
use crate::C64;

/// Spectral data of `B^τ` for one real `τ ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauSpectrum {
    /// The frequency.
    pub tau: Vec<f64>,
    /// `B^τ`.
    pub b_tau: DMatrix<f64>,
    /// `μ_1 ≥ … ≥ μ_n > 0`.
    pub mu: Vec<f64>,
    /// Orthogonal `O(τ)` with `OᵗB^τO = J(μ)`.
    pub o: DMatrix<f64>,
    /// `𝓑^τ = O diag(μ_1, μ_1, …, μ_n, μ_n) Oᵗ`.
    pub script_b: DMatrix<f64>,
    /// `Π μ_j(τ) = det(𝓑^τ)^{1/2}`.
    pub det_sqrt: f64,
}

/// Block-diagonal `J(μ)` with blocks `[[0, −μ_j], [μ_j, 0]]`.
pub fn j_of_mu(mu: &[f64]) -> DMatrix<f64> {
    crate::group::block_j(mu)
}

/// Computes the spectral package of `B^τ`.
///
/// Eigenvectors `u_j` of `(B^τ)ᵗB^τ` are taken in descending eigenvalue
/// order, Gram–Schmidt orthogonalised against everything already chosen, and
/// paired with `v_j = B^τu_j/μ_j`.
pub fn spectral_data(g: &GroupDescriptor, tau: &[f64]) -> Result<TauSpectrum> {
    let bt = g.b_tau(tau)?;
    let tn = libm::sqrt(tau.iter().map(|v| v * v).sum::<f64>());
    if tn == 0.0 {
        return Err(Error::ZeroTau);
    }
    let d = 2 * g.n;
    let eig = SymmetricEigen::new(bt.transpose() * &bt);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let smallest = libm::sqrt(eig.eigenvalues[order[d - 1]].max(0.0));
    if smallest < g.sigma_min_threshold * tn {
        return Err(Error::DegenerateTau(smallest));
    }

    let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(d);
    let mut pairs: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(g.n);
    let top = eig.eigenvalues[order[0]];
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && eig.eigenvalues[order[end - 1]] - eig.eigenvalues[order[end]] <= 1e-10 * top {
            end += 1;
        }
        let cluster: Vec<DVector<f64>> =
            order[start..end].iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
        for _ in 0..(end - start) / 2 {
            let mut best: Option<DVector<f64>> = None;
            let mut best_norm = -1.0;
            for c in &cluster {
                let r = project_out(c.clone(), &chosen);
                let nr = r.norm();
                if nr > best_norm {
                    best_norm = nr;
                    best = Some(r);
                }
            }
            let u = best.unwrap() / best_norm;
            let bu = &bt * &u;
            let mu = bu.norm();
            let mut v = bu / mu;
            chosen.push(u.clone());
            v = project_out(v, &chosen);
            v /= v.norm();
            chosen.push(v.clone());
            pairs.push((mu, u, v));
        }
        start = end;
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut o = DMatrix::zeros(d, d);
    let mut mu = Vec::with_capacity(g.n);
    for (j, (m, u, v)) in pairs.iter().enumerate() {
        o.set_column(2 * j, u);
        o.set_column(2 * j + 1, v);
        mu.push(*m);
    }
    let mut diag = DVector::zeros(d);
    for j in 0..g.n {
        diag[2 * j] = mu[j];
        diag[2 * j + 1] = mu[j];
    }
    let script_b = &o * DMatrix::from_diagonal(&diag) * o.transpose();
    let script_b = (&script_b + script_b.transpose()) * 0.5;
    let det_sqrt = mu.iter().product();
    Ok(TauSpectrum { tau: tau.to_vec(), b_tau: bt, mu, o, script_b, det_sqrt })
}

fn project_out(mut x: DVector<f64>, basis: &[DVector<f64>]) -> DVector<f64> {
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(&x);
            x -= b * c;
        }
    }
    x
}

/// `(𝓑^τ, Π μ_j(τ))`.
pub fn script_b(g: &GroupDescriptor, tau: &[f64]) -> Result<(DMatrix<f64>, f64)> {
    let s = spectral_data(g, tau)?;
    Ok((s.script_b, s.det_sqrt))
}

/// τ-coordinates `O(τ)ᵗ y`.
pub fn tau_coordinates(spec: &TauSpectrum, y: &[f64]) -> Vec<f64> {
    let d = y.len();
    (0..d).map(|k| (0..d).map(|i| spec.o[(i, k)] * y[i]).sum()).collect()
}

/// `⟨𝓑 y, y⟩`.
pub fn quadratic_form(m: &DMatrix<f64>, y: &[f64]) -> f64 {
    let d = y.len();
    let mut s = 0.0;
    for i in 0..d {
        let mut row = 0.0;
        for j in 0..d {
            row += m[(i, j)] * y[j];
        }
        s += row * y[i];
    }
    s
}

impl TauSpectrum {
    /// `⟨𝓑^τ y, y⟩`.
    pub fn sigma(&self, y: &[f64]) -> f64 {
        quadratic_form(&self.script_b, y)
    }
}

/// Holomorphic extension of `𝓑` at complex `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTauMatrix {
    /// The complex frequency.
    pub z: Vec<C64>,
    /// `[(B^z)ᵗB^z]^{1/2}` (principal branch).
    pub script_b_z: DMatrix<C64>,
    /// `det([(B^z)ᵗB^z]^{1/4})`, the continuation of `Π μ_j`.
    pub det_sqrt_z: C64,
}

/// Closed contour for the functional calculus: a circle through `a/2` and
/// `2b`, where `[a, b]` bounds the eigenvalues of `(B^τ)ᵗB^τ` over unit `τ`,
/// discretised by the trapezoid rule (geometrically convergent for analytic
/// periodic integrands).
#[derive(Debug, Clone)]
pub struct Contour {
    /// Centre.
    pub center: f64,
    /// Radius.
    pub radius: f64,
    nodes: Vec<C64>,
    weights: Vec<C64>,
    sqrt_nodes: Vec<C64>,
    quarter_nodes: Vec<C64>,
}

/// Largest accepted deviation of the discrete Riesz projector from the identity.
pub const PROJECTOR_TOLERANCE: f64 = 1e-9;

impl Contour {
    /// Contour adapted to the group's sampled singular-value range.
    pub fn for_group(g: &GroupDescriptor) -> Self {
        Self::new(g.sigma_min * g.sigma_min, g.sigma_max * g.sigma_max)
    }

    /// Circle through `a/2` and `2b`, with enough nodes for ~1e-16 accuracy
    /// on the real spectrum `[a, b]`.
    pub fn new(a: f64, b: f64) -> Self {
        let left = 0.5 * a;
        let right = 2.0 * b;
        let center = 0.5 * (left + right);
        let radius = 0.5 * (right - left);
        // Convergence factor: worst of the branch point (0) and the spectrum.
        let q = (radius / center).max((center - a).abs().max((b - center).abs()) / radius);
        let n_est = libm::ceil(-36.8 / libm::log(q) * 1.25) as usize;
        let n = n_est.clamp(64, 4096).div_ceil(16) * 16;
        Self::with_nodes(center, radius, n)
    }

    /// Circle with explicit centre, radius and node count.
    pub fn with_nodes(center: f64, radius: f64, n: usize) -> Self {
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for k in 0..n {
            let th = 2.0 * core::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            let e = C64::new(libm::cos(th), libm::sin(th)) * radius;
            nodes.push(C64::new(center, 0.0) + e);
            weights.push(e / n as f64);
        }
        let sqrt_nodes = nodes.iter().map(|z| z.sqrt()).collect();
        let quarter_nodes = nodes.iter().map(|z| z.sqrt().sqrt()).collect();
        Self { center, radius, nodes, weights, sqrt_nodes, quarter_nodes }
    }

    /// Number of trapezoid nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Always false; a contour has at least 64 nodes.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(T^{1/2}, det T^{1/4})` for a complex symmetric row-major `T`.
    ///
    /// Fails with [`Error::SpectrumEscapedContour`] when the discrete Riesz
    /// projector `(1/2πi)∮(ζ−T)^{-1}dζ` deviates from the identity, i.e. some
    /// eigenvalue is not (safely) inside the circle.
    pub fn sqrt_and_det(&self, t: &[C64], d: usize) -> Result<(Vec<C64>, C64)> {
        let zero = C64::new(0.0, 0.0);
        let mut half = vec![zero; d * d];
        let mut quarter = vec![zero; d * d];
        let mut proj = vec![zero; d * d];
        let mut work = vec![zero; d * d];
        let mut inv = vec![zero; d * d];
        for k in 0..self.nodes.len() {
            for (w, &tv) in work.iter_mut().zip(t) {
                *w = -tv;
            }
            for i in 0..d {
                work[i * d + i] += self.nodes[k];
            }
            if !invert_in_place(&mut work, &mut inv, d) {
                return Err(Error::SpectrumEscapedContour(f64::INFINITY));
            }
            let w = self.weights[k];
            let wh = w * self.sqrt_nodes[k];
            let wq = w * self.quarter_nodes[k];
            for i in 0..d * d {
                half[i] += wh * inv[i];
                quarter[i] += wq * inv[i];
                proj[i] += w * inv[i];
            }
        }
        let mut defect = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let e = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((proj[i * d + j] - e).norm());
            }
        }
        if !(defect <= PROJECTOR_TOLERANCE) {
            return Err(Error::SpectrumEscapedContour(defect));
        }
        Ok((half, det_c(&quarter, d)))
    }
}

/// `B^z = Σ z_β B^β` as a row-major complex matrix.
pub fn b_complex(g: &GroupDescriptor, z: &[C64]) -> Vec<C64> {
    let d = 2 * g.n;
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for (m, &zb) in g.b.iter().zip(z) {
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] += zb * m[(i, j)];
            }
        }
    }
    out
}

/// `(B^z)ᵗB^z` (plain transpose, no conjugation) as a row-major matrix.
pub fn gram_complex(g: &GroupDescriptor, z: &[C64]) -> Vec<C64> {
    let d = 2 * g.n;
    let bz = b_complex(g, z);
    let mut t = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..d {
                s += bz[k * d + i] * bz[k * d + j];
            }
            t[i * d + j] = s;
        }
    }
    t
}

/// Holomorphic `𝓑^z` and `det(𝓑^z)^{1/2}` by the Cauchy integral on `contour`.
pub fn script_b_complex(g: &GroupDescriptor, contour: &Contour, z: &[C64]) -> Result<ComplexTauMatrix> {
    if z.len() != g.r {
        return Err(Error::DimensionMismatch { expected: g.r, got: z.len() });
    }
    let d = 2 * g.n;
    let t = gram_complex(g, z);
    let (half, det_sqrt_z) = contour.sqrt_and_det(&t, d)?;
    Ok(ComplexTauMatrix { z: z.to_vec(), script_b_z: DMatrix::from_row_slice(d, d, &half), det_sqrt_z })
}

/// Constant `C` of the two-sided bound `C⁻¹|y|² ≤ ⟨𝓑^τy,y⟩ ≤ C|y|²` over
/// the given unit directions.
pub fn quadratic_form_constant(g: &GroupDescriptor, taus: &[Vec<f64>]) -> Result<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for tau in taus {
        let s = spectral_data(g, tau)?;
        lo = lo.min(s.mu[g.n - 1]);
        hi = hi.max(s.mu[0]);
    }
    Ok(hi.max(1.0 / lo))
}
