//! Uniform reference grid on [0, π] and the finite-difference operators
//! used by the transplanted flow.
//!
//! Profiles h(θ) live on θ_j = jπ/N, j = 0..N, and are understood as even
//! 2π-periodic functions: h(−s) = h(s), h(π + s) = h(π − s). Stencils
//! reaching past an endpoint are closed by that reflection, so no ghost
//! storage is needed and even symmetry is preserved bit-exactly.
//!
//! The quotients h/sin²θ, h′/sinθ, h′/tanθ are finite up to the endpoints
//! for admissible data (h = 0, h″ > 0 there) but are 0/0 as written. Away
//! from the endpoints they are evaluated directly; on the first
//! [`MODEL_RADIUS`] nodes and at θ = 0, π they are read off a local
//! two-term least-squares model
//!
//! ```text
//! h(θ) ≈ A·s + B·s²,   s = 1 − cos θ  (resp. 1 + cos θ at the right),
//! ```
//!
//! fitted through the first four interior nodes with the endpoint pinned
//! at zero. The basis is quadratic in the physical coordinate x = c − d·cosθ,
//! so the fit is exact for spherical caps, and A is exactly the endpoint
//! second derivative: h″(0) = A (and h″(π) = A of the right fit). The
//! quotients follow from sin²θ = s(2 − s):
//!
//! ```text
//! h/sin²  → (A + B·s)/(2 − s),   limit A/2 at the endpoint,
//! h′/sin  → ±(A + 2B·s),         limit A at θ=0, −A at θ=π,
//! h′/tan  =  (h′/sin)·cos θ,      limit A at both endpoints.
//! ```

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Nodes per side on which quotients switch from direct evaluation to the
/// endpoint model (excluding the endpoint itself).
pub const MODEL_RADIUS: usize = 2;

/// Number of interior nodes entering each endpoint fit.
pub const FIT_NODES: usize = 4;

/// Smallest supported grid; below this the endpoint fits and the interior
/// band would overlap.
pub const MIN_GRID: usize = 16;

/// Grid values indexed by node, length n+1.
pub type Field = Vec<f64>;

/// Endpoint data recovered from the two least-squares fits of a profile.
///
/// `h2_0` and `h2_pi` are the fitted endpoint second derivatives (the A
/// coefficients); `b_0` and `b_pi` are the quadratic corrections needed to
/// evaluate quotients on the model nodes.
#[derive(Debug, Clone, Copy)]
pub struct EndpointFit {
    pub h2_0: f64,
    pub b_0: f64,
    pub h2_pi: f64,
    pub b_pi: f64,
}

/// Reference grid with precomputed trigonometric tables and fit weights.
///
/// The tables are built symmetrically: sin θ_{N−j} is bit-equal to sin θ_j,
/// cos θ_{N−j} to −cos θ_j, and cos(π/2) is exactly zero. Mirror-symmetric
/// input therefore produces mirror-symmetric output through every operator
/// here, to the last bit.
#[derive(Debug, Clone)]
pub struct Grid {
    n: usize,
    dtheta: f64,
    theta: Vec<f64>,
    sin_t: Vec<f64>,
    cos_t: Vec<f64>,
    // s-values and least-squares weights of the endpoint fit: the fitted
    // coefficients are A = Σ wa[k]·h[k+1], B = Σ wb[k]·h[k+1] on the left
    // and the mirrored sums on the right.
    fit_s: [f64; FIT_NODES],
    fit_wa: [f64; FIT_NODES],
    fit_wb: [f64; FIT_NODES],
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_GRID || n % 2 != 0 {
            return Err(Error::BadGridSize { n, min: MIN_GRID });
        }
        let dtheta = std::f64::consts::PI / n as f64;
        let mut theta = vec![0.0; n + 1];
        let mut sin_t = vec![0.0; n + 1];
        let mut cos_t = vec![0.0; n + 1];
        for j in 0..n / 2 {
            let t = j as f64 * dtheta;
            theta[j] = t;
            theta[n - j] = std::f64::consts::PI - t;
            sin_t[j] = t.sin();
            sin_t[n - j] = sin_t[j];
            cos_t[j] = t.cos();
            cos_t[n - j] = -cos_t[j];
        }
        theta[n / 2] = std::f64::consts::FRAC_PI_2;
        sin_t[n / 2] = 1.0;
        cos_t[n / 2] = 0.0;

        let mut fit_s = [0.0; FIT_NODES];
        for k in 0..FIT_NODES {
            fit_s[k] = 1.0 - cos_t[k + 1];
        }
        let (s2, s3, s4) = fit_s.iter().fold((0.0, 0.0, 0.0), |(a, b, c), &s| {
            (a + s * s, b + s * s * s, c + s * s * s * s)
        });
        let det = s2 * s4 - s3 * s3;
        let mut fit_wa = [0.0; FIT_NODES];
        let mut fit_wb = [0.0; FIT_NODES];
        for k in 0..FIT_NODES {
            let s = fit_s[k];
            fit_wa[k] = (s4 * s - s3 * s * s) / det;
            fit_wb[k] = (s2 * s * s - s3 * s) / det;
        }

        Ok(Grid {
            n,
            dtheta,
            theta,
            sin_t,
            cos_t,
            fit_s,
            fit_wa,
            fit_wb,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn sin_theta(&self) -> &[f64] {
        &self.sin_t
    }

    pub fn cos_theta(&self) -> &[f64] {
        &self.cos_t
    }

    pub fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.n + 1 {
            return Err(Error::LengthMismatch {
                len: f.len(),
                n: self.n,
            });
        }
        Ok(())
    }

    /// Fold an index into [0, n] by even 2π-periodic reflection.
    fn refl(&self, i: isize) -> usize {
        let m = 2 * self.n as isize;
        let mut i = i.rem_euclid(m);
        if i > self.n as isize {
            i = m - i;
        }
        i as usize
    }

    /// Fourth-order central first derivative with reflection closure.
    ///
    /// The summation order pairs mirror-image samples, so diff1 of even
    /// data is exactly zero at both endpoints.
    pub fn diff1(&self, f: &[f64]) -> Field {
        let scale = 1.0 / (12.0 * self.dtheta);
        (0..=self.n as isize)
            .map(|j| {
                let fm2 = f[self.refl(j - 2)];
                let fm1 = f[self.refl(j - 1)];
                let fp1 = f[self.refl(j + 1)];
                let fp2 = f[self.refl(j + 2)];
                ((fm2 - fp2) + 8.0 * (fp1 - fm1)) * scale
            })
            .collect()
    }

    /// Fourth-order central second derivative with reflection closure.
    pub fn diff2(&self, f: &[f64]) -> Field {
        let scale = 1.0 / (12.0 * self.dtheta * self.dtheta);
        (0..=self.n as isize)
            .map(|j| {
                let fm2 = f[self.refl(j - 2)];
                let fm1 = f[self.refl(j - 1)];
                let f0 = f[self.refl(j)];
                let fp1 = f[self.refl(j + 1)];
                let fp2 = f[self.refl(j + 2)];
                (-(fp2 + fm2) + 16.0 * (fp1 + fm1) - 30.0 * f0) * scale
            })
            .collect()
    }

    /// Least-squares endpoint fits h ≈ A·s + B·s² through the first four
    /// interior nodes on each side, endpoint pinned at zero.
    pub fn endpoint_fit(&self, h: &[f64]) -> EndpointFit {
        let mut h2_0 = 0.0;
        let mut b_0 = 0.0;
        let mut h2_pi = 0.0;
        let mut b_pi = 0.0;
        for k in 0..FIT_NODES {
            h2_0 += self.fit_wa[k] * h[k + 1];
            b_0 += self.fit_wb[k] * h[k + 1];
            h2_pi += self.fit_wa[k] * h[self.n - 1 - k];
            b_pi += self.fit_wb[k] * h[self.n - 1 - k];
        }
        EndpointFit {
            h2_0,
            b_0,
            h2_pi,
            b_pi,
        }
    }

    /// h/sin²θ with endpoint limits h″/2 and the near-endpoint model.
    pub fn quot_sin2(&self, h: &[f64], fit: &EndpointFit) -> Field {
        let n = self.n;
        let mut q = vec![0.0; n + 1];
        q[0] = 0.5 * fit.h2_0;
        q[n] = 0.5 * fit.h2_pi;
        for j in 1..=MODEL_RADIUS {
            let s = self.fit_s[j - 1];
            q[j] = (fit.h2_0 + fit.b_0 * s) / (2.0 - s);
            q[n - j] = (fit.h2_pi + fit.b_pi * s) / (2.0 - s);
        }
        for j in MODEL_RADIUS + 1..=n - MODEL_RADIUS - 1 {
            q[j] = h[j] / (self.sin_t[j] * self.sin_t[j]);
        }
        q
    }

    /// h′/sinθ with endpoint limits h″(0), −h″(π) and the near-endpoint
    /// model. `d1` must be `diff1(h)`.
    pub fn quot_dsin(&self, d1: &[f64], fit: &EndpointFit) -> Field {
        let n = self.n;
        let mut q = vec![0.0; n + 1];
        q[0] = fit.h2_0;
        q[n] = -fit.h2_pi;
        for j in 1..=MODEL_RADIUS {
            let s = self.fit_s[j - 1];
            q[j] = fit.h2_0 + 2.0 * fit.b_0 * s;
            q[n - j] = -(fit.h2_pi + 2.0 * fit.b_pi * s);
        }
        for j in MODEL_RADIUS + 1..=n - MODEL_RADIUS - 1 {
            q[j] = d1[j] / self.sin_t[j];
        }
        q
    }

    /// h′/tanθ = (h′/sinθ)·cosθ; exactly zero at θ = π/2, limit +h″ at
    /// both endpoints.
    pub fn quot_dtan(&self, d1: &[f64], fit: &EndpointFit) -> Field {
        let mut q = self.quot_dsin(d1, fit);
        for (qj, &c) in q.iter_mut().zip(self.cos_t.iter()) {
            *qj *= c;
        }
        q
    }

    /// Pointwise product with sin θ; exact zeros at the endpoints.
    pub fn mul_sin(&self, f: &[f64]) -> Field {
        f.iter().zip(self.sin_t.iter()).map(|(&v, &s)| v * s).collect()
    }

    /// Trapezoid rule over [0, π] with fixed left-to-right summation.
    pub fn trapezoid(&self, f: &[f64]) -> f64 {
        let mut acc = 0.5 * (f[0] + f[self.n]);
        for &v in &f[1..self.n] {
            acc += v;
        }
        acc * self.dtheta
    }

    // ---- matrix representations -------------------------------------
    //
    // The linearization assembles the Fréchet derivative from the exact
    // matrix representation of the discrete quotients above, including
    // the fit rows, so that directional derivatives of the discrete Φ₁
    // match the matrix to round-off.

    fn stencil_matrix(&self, coeffs: &[(isize, f64)], scale: f64) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for j in 0..=n as isize {
            for &(k, w) in coeffs {
                m[(j as usize, self.refl(j + k))] += w * scale;
            }
        }
        m
    }

    pub fn mat_diff1(&self) -> DMatrix<f64> {
        let s = 1.0 / (12.0 * self.dtheta);
        self.stencil_matrix(&[(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)], s)
    }

    pub fn mat_diff2(&self) -> DMatrix<f64> {
        let s = 1.0 / (12.0 * self.dtheta * self.dtheta);
        self.stencil_matrix(
            &[(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)],
            s,
        )
    }

    /// Row functionals of the endpoint fits: `(e0, epi)` with
    /// h″(0) = e0·h and h″(π) = epi·h.
    pub fn fit_rows(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.n;
        let mut e0 = DMatrix::zeros(1, n + 1);
        let mut epi = DMatrix::zeros(1, n + 1);
        for k in 0..FIT_NODES {
            e0[(0, k + 1)] = self.fit_wa[k];
            epi[(0, n - 1 - k)] = self.fit_wa[k];
        }
        (e0, epi)
    }

    /// Matrix of h ↦ quot_sin2(h, fit(h)).
    pub fn mat_quot_sin2(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for k in 0..FIT_NODES {
            m[(0, k + 1)] = 0.5 * self.fit_wa[k];
            m[(n, n - 1 - k)] = 0.5 * self.fit_wa[k];
            for j in 1..=MODEL_RADIUS {
                let s = self.fit_s[j - 1];
                let w = (self.fit_wa[k] + s * self.fit_wb[k]) / (2.0 - s);
                m[(j, k + 1)] = w;
                m[(n - j, n - 1 - k)] = w;
            }
        }
        for j in MODEL_RADIUS + 1..=n - MODEL_RADIUS - 1 {
            m[(j, j)] = 1.0 / (self.sin_t[j] * self.sin_t[j]);
        }
        m
    }

    /// Matrix of h ↦ quot_dsin(diff1(h), fit(h)).
    pub fn mat_quot_dsin(&self) -> DMatrix<f64> {
        let n = self.n;
        let d1 = self.mat_diff1();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for k in 0..FIT_NODES {
            m[(0, k + 1)] = self.fit_wa[k];
            m[(n, n - 1 - k)] = -self.fit_wa[k];
            for j in 1..=MODEL_RADIUS {
                let s = self.fit_s[j - 1];
                let w = self.fit_wa[k] + 2.0 * s * self.fit_wb[k];
                m[(j, k + 1)] = w;
                m[(n - j, n - 1 - k)] = -w;
            }
        }
        for j in MODEL_RADIUS + 1..=n - MODEL_RADIUS - 1 {
            for i in 0..=n {
                m[(j, i)] = d1[(j, i)] / self.sin_t[j];
            }
        }
        m
    }

    /// Matrix of h ↦ quot_dtan(diff1(h), fit(h)) = diag(cos θ)·quot_dsin.
    pub fn mat_quot_dtan(&self) -> DMatrix<f64> {
        let mut m = self.mat_quot_dsin();
        for j in 0..=self.n {
            for i in 0..=self.n {
                m[(j, i)] *= self.cos_t[j];
            }
        }
        m
    }
}

/// Least-squares slope of log(err) against log(n); the sign is flipped so
/// a fourth-order method reports ≈ 4. Returns None when fewer than two
/// usable points exist or an error is exactly zero.
pub fn observed_order(ns: &[usize], errs: &[f64]) -> Option<f64> {
    if ns.len() != errs.len() || ns.len() < 2 || errs.iter().any(|&e| e <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|&e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(-sxy / sxx)
}
