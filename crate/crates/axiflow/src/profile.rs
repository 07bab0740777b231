//! Surface representations and admissibility checks.
//!
//! Three equivalent descriptions of a closed rotationally symmetric
//! surface appear throughout:
//!
//! * u(x) > 0 on (a, b): the physical radius profile; u vanishes with a
//!   vertical tangent (square-root cusp) at the axis.
//! * v(x) = u²/2: the regular quantity at the boundary — C¹ up to the
//!   endpoints with v′(a) > 0 > v′(b) and v·v″ → 0 for admissible data.
//! * h(θ) = v(c − d·cos θ) on [0, π]: the transplanted profile the solver
//!   evolves, with c = (a+b)/2 and d = (b−a)/2.
//!
//! [`HProfile`] enforces the hard structural invariants (pinned endpoints,
//! interior positivity, d > 0). The softer admissibility conditions —
//! h″ > 0 at the endpoints and the induced boundary compatibility
//! lim (h″ − h′/tan θ) = 0 — are diagnosed by [`validate_initial`], which
//! accepts raw values precisely so it can report on inadmissible data
//! instead of refusing to construct it.

use serde::{Deserialize, Serialize};

use crate::error::{AxisEnd, Error, Result};
use crate::grid::Grid;

/// Transplanted profile: samples of h on θ_j = jπ/N plus the interval
/// center and half-width. The solver's state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HProfile {
    values: Vec<f64>,
    c: f64,
    d: f64,
}

impl HProfile {
    /// Validates the structural invariants: length N+1 with N even ≥ 16,
    /// finite entries, endpoints exactly zero, positive interior, d > 0.
    pub fn new(values: Vec<f64>, c: f64, d: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidProfile("empty profile".into()));
        }
        let n = values.len() - 1;
        Grid::new(n)?; // size check
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidProfile("non-finite h values".into()));
        }
        if values[0] != 0.0 || values[n] != 0.0 {
            return Err(Error::InvalidProfile(format!(
                "endpoints must be exactly zero, got h(0) = {}, h(π) = {}",
                values[0], values[n]
            )));
        }
        if let Some(j) = (1..n).find(|&j| values[j] <= 0.0) {
            return Err(Error::InvalidProfile(format!(
                "interior value h_{} = {} is not positive",
                j, values[j]
            )));
        }
        if !(d > 0.0) || !d.is_finite() || !c.is_finite() {
            return Err(Error::InvalidProfile(format!(
                "need finite c and d > 0, got c = {c}, d = {d}"
            )));
        }
        Ok(HProfile { values, c, d })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// Left physical endpoint a = c − d.
    pub fn a(&self) -> f64 {
        self.c - self.d
    }

    /// Right physical endpoint b = c + d.
    pub fn b(&self) -> f64 {
        self.c + self.d
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.n()).expect("validated at construction")
    }

    pub fn validate(&self, grid: &Grid) -> ValidationReport {
        validate_initial(grid, &self.values)
    }
}

/// Physical-variable samples of v = u²/2 (and u) on [a, b], for I/O,
/// oracles, and the axis-regularity check.
#[derive(Debug, Clone)]
pub struct PhysicalProfile {
    xs: Vec<f64>,
    v: Vec<f64>,
    u: Vec<f64>,
}

impl PhysicalProfile {
    pub fn new(xs: Vec<f64>, v: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if xs.len() < 8 || xs.len() != v.len() || xs.len() != u.len() {
            return Err(Error::InvalidProfile(format!(
                "need ≥ 8 consistent samples, got {}/{}/{}",
                xs.len(),
                v.len(),
                u.len()
            )));
        }
        if !xs.iter().chain(&v).chain(&u).all(|x| x.is_finite()) {
            return Err(Error::InvalidProfile("non-finite samples".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidProfile("xs must be strictly increasing".into()));
        }
        let last = v.len() - 1;
        if v[0] != 0.0 || v[last] != 0.0 {
            return Err(Error::InvalidProfile(format!(
                "v must vanish exactly at the endpoints, got {} and {}",
                v[0], v[last]
            )));
        }
        if v[1..last].iter().any(|&x| x <= 0.0) {
            return Err(Error::InvalidProfile("interior v must be positive".into()));
        }
        let vmax = v.iter().cloned().fold(0.0, f64::max);
        for (&uj, &vj) in u.iter().zip(&v) {
            if (uj * uj - 2.0 * vj).abs() > 1e-12 * (1.0 + 2.0 * vmax) {
                return Err(Error::InvalidProfile(format!(
                    "u² = 2v violated: u = {uj}, v = {vj}"
                )));
            }
        }
        Ok(PhysicalProfile { xs, v, u })
    }

    /// Builds the u-samples as √(2v).
    pub fn from_v(xs: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let u = v.iter().map(|&x| (2.0 * x.max(0.0)).sqrt()).collect();
        Self::new(xs, v, u)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn a(&self) -> f64 {
        self.xs[0]
    }

    pub fn b(&self) -> f64 {
        *self.xs.last().unwrap()
    }
}

/// Principal curvatures of the surface of revolution at a sample point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurvatureSample {
    pub k1: f64,
    pub k2: f64,
    /// Mean curvature H = k1 + k2; equals the normal velocity under the
    /// flow law V = H.
    pub mean: f64,
}

/// Curvatures at an interior point from the profile and its derivatives:
/// k1 = −u_xx/(1+u_x²)^{3/2} (meridian), k2 = 1/(u·(1+u_x²)^{1/2})
/// (rotation).
pub fn curvature_interior(u: f64, u_x: f64, u_xx: f64) -> Result<CurvatureSample> {
    if !(u > 0.0) {
        return Err(Error::InvalidInput(format!(
            "curvature_interior needs u > 0, got {u}; axis points use curvature_axis"
        )));
    }
    let q = 1.0 + u_x * u_x;
    let k1 = -u_xx / (q * q.sqrt());
    let k2 = 1.0 / (u * q.sqrt());
    Ok(CurvatureSample {
        k1,
        k2,
        mean: k1 + k2,
    })
}

/// Resolution floor for "h″ > 0 at the endpoint": the least-squares fit
/// carries O(Δθ⁴) truncation noise with a constant near 10², so values
/// below 0.1·Δθ²·max|h| are indistinguishable from a degenerate
/// (quartic-order) touchdown at this resolution.
pub fn axis_posdef_floor(grid: &Grid, values: &[f64]) -> f64 {
    let hmax = values.iter().fold(f64::MIN_POSITIVE, |m, &v| m.max(v.abs()));
    0.1 * grid.dtheta() * grid.dtheta() * hmax
}

/// Curvature where the surface meets the axis. Both principal curvatures
/// coincide there and equal d/h″ at the corresponding endpoint, so
/// H = 2d/h″; this drives the boundary ODEs a′ = H(a), b′ = −H(b).
pub fn curvature_axis(grid: &Grid, h: &HProfile, end: AxisEnd) -> Result<CurvatureSample> {
    grid.check_len(h.values())?;
    let fit = grid.endpoint_fit(h.values());
    let h2 = match end {
        AxisEnd::Left => fit.h2_0,
        AxisEnd::Right => fit.h2_pi,
    };
    if h2 <= axis_posdef_floor(grid, h.values()) {
        return Err(Error::AxisDegeneracy { end, h2 });
    }
    let k = h.d() / h2;
    Ok(CurvatureSample {
        k1: k,
        k2: k,
        mean: 2.0 * k,
    })
}

/// One named admissibility check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// The quantity the check measured (estimate, extrapolated limit, …).
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<22} {}  value = {:.6e}  ({})",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.value,
                c.detail
            )?;
        }
        write!(
            f,
            "overall: {}",
            if self.passed() { "pass" } else { "FAIL" }
        )
    }
}

/// Richardson extrapolation of a field toward an endpoint from the nodes
/// at distances Δ, 2Δ, 4Δ; eliminates constant-free linear and quadratic
/// terms: L = (8φ(Δ) − 6φ(2Δ) + φ(4Δ))/3.
fn richardson_limit(phi1: f64, phi2: f64, phi4: f64) -> f64 {
    (8.0 * phi1 - 6.0 * phi2 + phi4) / 3.0
}

/// Admissibility report for raw transplanted samples.
///
/// Checks, in order: exact endpoint zeros, interior positivity, fitted
/// h″ > 0 at both endpoints, consistency of the even extension (finite
/// data; the reflected first-derivative stencil must vanish identically
/// at the endpoints), and the induced boundary compatibility
/// lim (h″ − h′/tan θ) = 0 at both ends, measured by Richardson
/// extrapolation from the nodes at Δθ, 2Δθ, 4Δθ.
///
/// The compatibility tolerance is `max(1e−4, 4·Δθ)` relative to the
/// maximum magnitude of the compatibility field: admissible data that is
/// merely W³ (a |θ|³ term at the axis) has a compatibility defect the
/// grid can only resolve to O(Δθ), so a fixed 1e−4 would misreport such
/// data as inadmissible on practical grids.
pub fn validate_initial(grid: &Grid, values: &[f64]) -> ValidationReport {
    let n = grid.n();
    let mut checks = Vec::new();

    let len_ok = values.len() == n + 1;
    let finite = len_ok && values.iter().all(|v| v.is_finite());

    let end_ok = finite && values[0] == 0.0 && values[n] == 0.0;
    checks.push(Check {
        name: "endpoint_zero",
        passed: end_ok,
        value: if len_ok && finite {
            values[0].abs().max(values[n].abs())
        } else {
            f64::NAN
        },
        detail: "h(0) = h(π) = 0 exactly".into(),
    });

    let min_int = if finite {
        values[1..n].iter().cloned().fold(f64::INFINITY, f64::min)
    } else {
        f64::NAN
    };
    checks.push(Check {
        name: "interior_positive",
        passed: finite && min_int > 0.0,
        value: min_int,
        detail: "min interior h".into(),
    });

    if !finite {
        checks.push(Check {
            name: "even_extension",
            passed: false,
            value: f64::NAN,
            detail: "non-finite or mis-sized data".into(),
        });
        return ValidationReport { checks };
    }

    let fit = grid.endpoint_fit(values);
    let floor = axis_posdef_floor(grid, values);
    checks.push(Check {
        name: "h2_left_positive",
        passed: fit.h2_0 > floor,
        value: fit.h2_0,
        detail: format!("fitted h″(0), floor {floor:.3e}"),
    });
    checks.push(Check {
        name: "h2_right_positive",
        passed: fit.h2_pi > floor,
        value: fit.h2_pi,
        detail: format!("fitted h″(π), floor {floor:.3e}"),
    });

    // Evenness is built into the discretization, so the checkable content
    // is that the reflected stencils see consistent finite data: for even
    // data diff1 cancels bit-exactly at both endpoints.
    let d1 = grid.diff1(values);
    let even_ok = d1[0] == 0.0 && d1[n] == 0.0;
    checks.push(Check {
        name: "even_extension",
        passed: even_ok,
        value: d1[0].abs().max(d1[n].abs()),
        detail: "reflected diff1 vanishes at endpoints".into(),
    });

    // Boundary compatibility: the flow requires (h″ − h′/tan θ) → 0 at
    // both endpoints (the transplanted form of v·v″ → 0).
    let d2 = grid.diff2(values);
    let qdt = grid.quot_dtan(&d1, &fit);
    let phi: Vec<f64> = d2.iter().zip(&qdt).map(|(&a, &b)| a - b).collect();
    let scale = phi.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let tol = (1e-4f64).max(4.0 * grid.dtheta()) * scale.max(f64::MIN_POSITIVE);
    let lim_left = richardson_limit(phi[1], phi[2], phi[4]);
    let lim_right = richardson_limit(phi[n - 1], phi[n - 2], phi[n - 4]);
    checks.push(Check {
        name: "boundary_compat_left",
        passed: lim_left.abs() <= tol,
        value: lim_left,
        detail: format!("extrapolated (h″ − h′/tanθ)(0⁺), tol {tol:.3e}"),
    });
    checks.push(Check {
        name: "boundary_compat_right",
        passed: lim_right.abs() <= tol,
        value: lim_right,
        detail: format!("extrapolated (h″ − h′/tanθ)(π⁻), tol {tol:.3e}"),
    });

    ValidationReport { checks }
}

/// Second-order one-sided derivative at x0 from (x0, y0) and two interior
/// samples; exact for quadratics.
fn one_sided_slope(x0: f64, y0: f64, x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    let p = x1 - x0;
    let q = x2 - x0;
    (q * q * (y1 - y0) - p * p * (y2 - y0)) / (p * q * (q - p))
}

/// Nonuniform 3-point second derivative at the middle node.
fn second_diff(xm: f64, ym: f64, x0: f64, y0: f64, xp: f64, yp: f64) -> f64 {
    2.0 * ((yp - y0) / (xp - x0) - (y0 - ym) / (x0 - xm)) / (xp - xm)
}

/// Intercept of the least-squares line through (s_k, q_k).
fn linear_intercept(s: &[f64], q: &[f64]) -> f64 {
    let n = s.len() as f64;
    let ms = s.iter().sum::<f64>() / n;
    let mq = q.iter().sum::<f64>() / n;
    let sxx: f64 = s.iter().map(|x| (x - ms) * (x - ms)).sum();
    let sxy: f64 = s.iter().zip(q).map(|(x, y)| (x - ms) * (y - mq)).sum();
    let slope = sxy / sxx;
    mq - slope * ms
}

/// Axis-regularity check on physical samples: v′ must be strictly
/// positive at a and strictly negative at b (one-sided second-order
/// estimates), and v·v″ must tend to zero at both ends (least-squares
/// linear extrapolation of the three nearest interior values).
///
/// The slope threshold is 1e−3 of the largest sample slope; the v·v″
/// tolerance is 5e−2 of the field's maximum magnitude — the limit is
/// approached only like √(x−a) for admissible W³ data, so tighter
/// tolerances would reject profiles the theory admits.
pub fn axis_regularity_check(p: &PhysicalProfile) -> ValidationReport {
    let xs = p.xs();
    let v = p.v();
    let m = xs.len() - 1;

    let slope_left = one_sided_slope(xs[0], v[0], xs[1], v[1], xs[2], v[2]);
    let slope_right = one_sided_slope(xs[m], v[m], xs[m - 1], v[m - 1], xs[m - 2], v[m - 2]);
    let slope_scale = xs
        .windows(2)
        .zip(v.windows(2))
        .map(|(xw, vw)| ((vw[1] - vw[0]) / (xw[1] - xw[0])).abs())
        .fold(f64::MIN_POSITIVE, f64::max);
    let slope_tol = 1e-3 * slope_scale;

    let mut checks = vec![
        Check {
            name: "v_slope_left",
            passed: slope_left > slope_tol,
            value: slope_left,
            detail: format!("one-sided v′(a), must exceed {slope_tol:.3e}"),
        },
        Check {
            name: "v_slope_right",
            passed: slope_right < -slope_tol,
            value: slope_right,
            detail: format!("one-sided v′(b), must be below −{slope_tol:.3e}"),
        },
    ];

    // v·v″ at the three interior samples nearest each end.
    let q_at = |j: usize| v[j] * second_diff(xs[j - 1], v[j - 1], xs[j], v[j], xs[j + 1], v[j + 1]);
    let q_all: Vec<f64> = (1..m).map(q_at).collect();
    let q_scale = q_all.iter().fold(f64::MIN_POSITIVE, |acc, &x| acc.max(x.abs()));
    let q_tol = 5e-2 * q_scale;

    let s_left: Vec<f64> = (1..4).map(|j| xs[j] - xs[0]).collect();
    let q_left: Vec<f64> = (1..4).map(q_at).collect();
    let lim_left = linear_intercept(&s_left, &q_left);
    let s_right: Vec<f64> = (1..4).map(|j| xs[m] - xs[m - j]).collect();
    let q_right: Vec<f64> = (1..4).map(|j| q_at(m - j)).collect();
    let lim_right = linear_intercept(&s_right, &q_right);

    checks.push(Check {
        name: "vv_xx_limit_left",
        passed: lim_left.abs() <= q_tol,
        value: lim_left,
        detail: format!("extrapolated v·v″ at a, tol {q_tol:.3e}"),
    });
    checks.push(Check {
        name: "vv_xx_limit_right",
        passed: lim_right.abs() <= q_tol,
        value: lim_right,
        detail: format!("extrapolated v·v″ at b, tol {q_tol:.3e}"),
    });

    ValidationReport { checks }
}

/// Transplant physical samples onto the reference grid: h_j = v(c − d·cosθ_j)
/// by monotone cubic interpolation of the v-samples, endpoints pinned to
/// zero exactly.
pub fn h_from_physical(p: &PhysicalProfile, n: usize) -> Result<HProfile> {
    let grid = Grid::new(n)?;
    let a = p.a();
    let b = p.b();
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    let slopes = pchip_slopes(p.xs(), p.v());
    let mut values = vec![0.0; n + 1];
    for j in 1..n {
        let x = (c - d * grid.cos_theta()[j]).clamp(a, b);
        values[j] = pchip_eval(p.xs(), p.v(), &slopes, x);
    }
    HProfile::new(values, c, d)
}

/// Inverse transplant: xs_j = c − d·cosθ_j, v = h, u = √(2h).
pub fn physical_from_h(grid: &Grid, h: &HProfile) -> Result<PhysicalProfile> {
    grid.check_len(h.values())?;
    let xs: Vec<f64> = grid
        .cos_theta()
        .iter()
        .map(|&ct| h.c() - h.d() * ct)
        .collect();
    PhysicalProfile::from_v(xs, h.values().to_vec())
}

/// Shape-limited cubic Hermite slopes. The raw estimate is the parabolic
/// (secant-weighted) slope, which stays second-order accurate even where
/// the derivative itself is O(Δx); the classical harmonic-mean slope loses
/// an order next to interior maxima, which every closed profile has. On
/// monotone segments the estimate is clipped into the Fritsch–Carlson box
/// (same sign as the secants, at most 3× the smaller one), so the
/// interpolant is monotone there and stays positive approaching the
/// touchdown ends. Across a secant sign change the slope keeps its value
/// up to a 3× cap; overshooting an interior extremum slightly is harmless.
fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = ys
        .windows(2)
        .zip(&h)
        .map(|(w, &hk)| (w[1] - w[0]) / hk)
        .collect();
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        let p = (h[k] * delta[k - 1] + h[k - 1] * delta[k]) / (h[k - 1] + h[k]);
        let prod = delta[k - 1] * delta[k];
        if prod > 0.0 {
            let cap = 3.0 * delta[k - 1].abs().min(delta[k].abs());
            m[k] = if p * delta[k] <= 0.0 {
                0.0
            } else {
                p.signum() * p.abs().min(cap)
            };
        } else if prod < 0.0 {
            let cap = 3.0 * delta[k - 1].abs().max(delta[k].abs());
            m[k] = p.signum() * p.abs().min(cap);
        } else {
            m[k] = 0.0;
        }
    }
    let end_slope = |h0: f64, h1: f64, d0: f64, d1: f64| -> f64 {
        let mut s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= 0.0 {
            s = 0.0;
        } else if d0 * d1 < 0.0 && s.abs() > 3.0 * d0.abs() {
            s = 3.0 * d0;
        }
        s
    };
    m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

fn pchip_eval(xs: &[f64], ys: &[f64], slopes: &[f64], x: f64) -> f64 {
    let n = xs.len();
    let k = match xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(n - 2),
        Err(i) => i.saturating_sub(1).min(n - 2),
    };
    let hk = xs[k + 1] - xs[k];
    let t = (x - xs[k]) / hk;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * ys[k] + h10 * hk * slopes[k] + h01 * ys[k + 1] + h11 * hk * slopes[k + 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_h(grid: &Grid, d: f64) -> Vec<f64> {
        grid.sin_theta().iter().map(|&s| 0.5 * d * d * s * s).collect()
    }

    #[test]
    fn hprofile_rejects_structural_violations() {
        let g = Grid::new(32).unwrap();
        let good = sphere_h(&g, 1.0);
        assert!(HProfile::new(good.clone(), 0.0, 1.0).is_ok());

        let mut off = good.clone();
        off[0] = 1e-14;
        assert!(HProfile::new(off, 0.0, 1.0).is_err());

        let mut neg = good.clone();
        neg[5] = -neg[5];
        assert!(HProfile::new(neg, 0.0, 1.0).is_err());

        assert!(HProfile::new(good.clone(), 0.0, -1.0).is_err());
        assert!(HProfile::new(good, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn curvature_interior_matches_hand_values() {
        // Unit sphere at x = 0 and a cylinder.
        let s = curvature_interior(1.0, 0.0, -1.0).unwrap();
        assert_eq!(s.k1, 1.0);
        assert_eq!(s.k2, 1.0);
        assert_eq!(s.mean, 2.0);
        let c = curvature_interior(2.5, 0.0, 0.0).unwrap();
        assert_eq!(c.k1, 0.0);
        assert!((c.k2 - 0.4).abs() < 1e-15);

        // Unit sphere at x = 1/2: u = √3/2, u_x = −1/√3, u_xx = −8/(3√3)
        // (differentiate u = √(1−x²): u″ = −(1−x²)^{−3/2}).
        let u = (0.75f64).sqrt();
        let ux = -1.0 / 3.0f64.sqrt();
        let uxx = -8.0 / (3.0 * 3.0f64.sqrt());
        let s = curvature_interior(u, ux, uxx).unwrap();
        assert!((s.k1 - 1.0).abs() < 1e-14, "k1 = {}", s.k1);
        assert!((s.k2 - 1.0).abs() < 1e-14, "k2 = {}", s.k2);
        assert!((s.mean - 2.0).abs() < 1e-14);

        assert!(curvature_interior(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn curvature_interior_sphere_family_property() {
        // u = √(r²−x²) gives k1 = k2 = 1/r at every interior point.
        for &r in &[0.5, 1.0, 3.0] {
            for i in 1..20 {
                let x = -0.95 * r + 1.9 * r * (i as f64) / 20.0;
                let u = (r * r - x * x).sqrt();
                let ux = -x / u;
                let uxx = -r * r / (u * u * u);
                let s = curvature_interior(u, ux, uxx).unwrap();
                assert!((s.k1 - 1.0 / r).abs() < 1e-12);
                assert!((s.k2 - 1.0 / r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn curvature_axis_matches_sphere_and_ellipsoid() {
        let g = Grid::new(128).unwrap();
        // Unit sphere: h″(0) = 1, H = 2.
        let h = HProfile::new(sphere_h(&g, 1.0), 0.0, 1.0).unwrap();
        let s = curvature_axis(&g, &h, AxisEnd::Left).unwrap();
        assert!((s.mean - 2.0).abs() < 1e-10);

        // Sphere radius 2: h = 2sin²θ, d = 2, h″(0) = 4 → H = 1.
        let h = HProfile::new(sphere_h(&g, 2.0), 0.0, 2.0).unwrap();
        let s = curvature_axis(&g, &h, AxisEnd::Right).unwrap();
        assert!((s.mean - 1.0).abs() < 1e-10);

        // Ellipsoid u = 2√(1−x²): h = 2sin²θ with d = 1 → H = 1/2.
        let vals: Vec<f64> = g.sin_theta().iter().map(|&s| 2.0 * s * s).collect();
        let h = HProfile::new(vals, 0.0, 1.0).unwrap();
        let s = curvature_axis(&g, &h, AxisEnd::Left).unwrap();
        assert!((s.mean - 0.5).abs() < 1e-10);
        assert_eq!(s.k1, s.k2);
    }

    #[test]
    fn curvature_axis_flags_degenerate_touchdown() {
        let g = Grid::new(128).unwrap();
        // h = sin⁴θ has h″(0) = 0: quartic touchdown, no axis curvature.
        let vals: Vec<f64> = g.sin_theta().iter().map(|&s| s.powi(4)).collect();
        let h = HProfile::new(vals, 0.0, 1.0).unwrap();
        assert!(matches!(
            curvature_axis(&g, &h, AxisEnd::Left),
            Err(Error::AxisDegeneracy { .. })
        ));
    }

    #[test]
    fn validate_accepts_sphere() {
        let g = Grid::new(256).unwrap();
        let rep = validate_initial(&g, &sphere_h(&g, 1.0));
        assert!(rep.passed(), "{rep}");
        // The extrapolated limit carries the O(Δθ⁴) truncation of diff2
        // and the quotient stencils; at N = 256 that is a few 1e-7.
        let compat = rep.check("boundary_compat_left").unwrap();
        assert!(compat.value.abs() < 1e-5, "limit {}", compat.value);
    }

    #[test]
    fn validate_accepts_half_power_profile_and_reports_h2() {
        // h = sin²θ + sin³θ: admissible non-C³ datum, h″(0) = 2. Built
        // from the grid tables so the endpoint values are exact zeros.
        let g = Grid::new(256).unwrap();
        let h: Vec<f64> = g.sin_theta().iter().map(|&s| s * s + s * s * s).collect();
        let rep = validate_initial(&g, &h);
        assert!(rep.passed(), "{rep}");
        let h2 = rep.check("h2_left_positive").unwrap().value;
        assert!((h2 - 2.0).abs() < 0.08, "h″(0) = {h2}");
    }

    #[test]
    fn validate_counterexamples_toggle_individual_checks() {
        let g = Grid::new(256).unwrap();

        // h = 1 − cosθ: fails endpoint zero at π (h(π) = 2).
        let h: Vec<f64> = g.cos_theta().iter().map(|&c| 1.0 - c).collect();
        let rep = validate_initial(&g, &h);
        assert!(!rep.check("endpoint_zero").unwrap().passed);

        // Sign flip in the interior.
        let h: Vec<f64> = g
            .theta()
            .iter()
            .map(|&t| t.sin().powi(2) * (0.3 - t.sin().powi(2)))
            .collect();
        let rep = validate_initial(&g, &h);
        assert!(!rep.check("interior_positive").unwrap().passed);

        // Quartic touchdown: h″(0) = 0.
        let h: Vec<f64> = g.sin_theta().iter().map(|&s| s.powi(4)).collect();
        let rep = validate_initial(&g, &h);
        assert!(!rep.check("h2_left_positive").unwrap().passed);
        assert!(!rep.check("h2_right_positive").unwrap().passed);

        // Corrupted data.
        let mut h = sphere_h(&g, 1.0);
        h[100] = f64::NAN;
        let rep = validate_initial(&g, &h);
        assert!(!rep.check("even_extension").unwrap().passed);

        // h = sinθ: a C⁰ cusp at the axis; h′/tanθ diverges and the
        // boundary compatibility fails.
        let h: Vec<f64> = g.sin_theta().to_vec();
        let rep = validate_initial(&g, &h);
        assert!(!rep.check("boundary_compat_left").unwrap().passed, "{rep}");
    }

    #[test]
    fn axis_check_passes_sphere_and_reports_slopes() {
        let g = Grid::new(256).unwrap();
        let h = HProfile::new(sphere_h(&g, 1.0), 0.0, 1.0).unwrap();
        let p = physical_from_h(&g, &h).unwrap();
        let rep = axis_regularity_check(&p);
        assert!(rep.passed(), "{rep}");
        assert!((rep.check("v_slope_left").unwrap().value - 1.0).abs() < 1e-6);
        assert!((rep.check("v_slope_right").unwrap().value + 1.0).abs() < 1e-6);
    }

    #[test]
    fn axis_check_values_for_half_power_profile() {
        // v = 1−x² + (1−x²)^{3/2} on uniform samples: v′(1) = −2. The
        // one-sided slope converges like √Δx on the half-power term, so a
        // dense sampling is needed to pass the 5% gate.
        let m = 4096;
        let xs: Vec<f64> = (0..=m).map(|i| -1.0 + 2.0 * i as f64 / m as f64).collect();
        let v: Vec<f64> = xs
            .iter()
            .map(|&x| {
                let w: f64 = 1.0 - x * x;
                w + w.max(0.0).powf(1.5)
            })
            .collect();
        let p = PhysicalProfile::from_v(xs, v).unwrap();
        let rep = axis_regularity_check(&p);
        assert!(rep.passed(), "{rep}");
        let sr = rep.check("v_slope_right").unwrap().value;
        assert!((sr + 2.0).abs() < 0.05, "v′(1) ≈ {sr}");
    }

    #[test]
    fn axis_check_fails_quartic_tangency_on_slope_only() {
        let m = 512;
        let xs: Vec<f64> = (0..=m).map(|i| -1.0 + 2.0 * i as f64 / m as f64).collect();
        let v: Vec<f64> = xs.iter().map(|&x| 0.5 * (1.0 - x * x).powi(2)).collect();
        let p = PhysicalProfile::from_v(xs, v).unwrap();
        let rep = axis_regularity_check(&p);
        assert!(!rep.check("v_slope_left").unwrap().passed);
        assert!(!rep.check("v_slope_right").unwrap().passed);
        assert!(rep.check("vv_xx_limit_left").unwrap().passed, "{rep}");
        assert!(rep.check("vv_xx_limit_right").unwrap().passed);
    }

    #[test]
    fn axis_check_fails_sqrt_profile_on_vvxx() {
        // v = √(1−x²): v·v″ = −1/(1−x²) diverges at the ends.
        let m = 512;
        let xs: Vec<f64> = (0..=m).map(|i| -1.0 + 2.0 * i as f64 / m as f64).collect();
        let v: Vec<f64> = xs.iter().map(|&x| (1.0 - x * x).max(0.0).sqrt()).collect();
        let p = PhysicalProfile::from_v(xs, v).unwrap();
        let rep = axis_regularity_check(&p);
        assert!(!rep.check("vv_xx_limit_left").unwrap().passed, "{rep}");
    }

    #[test]
    fn transplant_and_inverse_round_trip() {
        let g = Grid::new(128).unwrap();
        let h = HProfile::new(sphere_h(&g, 1.0), 5.0, 1.0).unwrap();
        let p = physical_from_h(&g, &h).unwrap();
        assert!((p.a() - 4.0).abs() < 1e-14);
        assert!((p.b() - 6.0).abs() < 1e-14);
        // Round trip on the transplanted nodes themselves is exact to
        // a few machine epsilons.
        let h2 = h_from_physical(&p, 128).unwrap();
        assert_eq!(h2.n(), 128);
        for j in 0..=128 {
            let err = (h2.values()[j] - h.values()[j]).abs();
            assert!(err <= 10.0 * f64::EPSILON * (1.0 + h.values()[j]), "j = {j}");
        }
        assert!((h2.c() - 5.0).abs() < 1e-14);
        assert!((h2.d() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn transplant_from_uniform_physical_samples() {
        // v(x) = (1−x²)/2 sampled uniformly → h = sin²θ/2 after transplant.
        let m = 1024;
        let xs: Vec<f64> = (0..=m).map(|i| -1.0 + 2.0 * i as f64 / m as f64).collect();
        let v: Vec<f64> = xs.iter().map(|&x| 0.5 * (1.0 - x * x)).collect();
        let p = PhysicalProfile::from_v(xs, v).unwrap();
        let h = h_from_physical(&p, 128).unwrap();
        let g = Grid::new(128).unwrap();
        for j in 0..=128 {
            let exact = 0.5 * g.sin_theta()[j].powi(2);
            assert!((h.values()[j] - exact).abs() < 1e-8, "j = {j}");
        }
    }

    #[test]
    fn transplant_converges_at_third_order_on_half_power_profile() {
        // Represent h = sin²θ + sin³θ by physical samples at increasingly
        // fine transplanted nodes, then interpolate back onto a fixed fine
        // grid. The cosine-clustered nodes keep the spacing near the axis
        // at O(Δθ²), so the monotone cubic interpolant retains third
        // order even though v has only a half-power of regularity there.
        let fine = 512usize;
        let gf = Grid::new(fine).unwrap();
        let exact: Vec<f64> = (0..=fine)
            .map(|j| {
                let s = gf.sin_theta()[j];
                s * s + s * s * s
            })
            .collect();

        let ns = [32usize, 64, 128];
        let mut errs = Vec::new();
        for &n in &ns {
            let g = Grid::new(n).unwrap();
            let vals: Vec<f64> = (0..=n)
                .map(|j| {
                    let s = g.sin_theta()[j];
                    s * s + s * s * s
                })
                .collect();
            let h = HProfile::new(vals, 0.0, 1.0).unwrap();
            let p = physical_from_h(&g, &h).unwrap();
            let back = h_from_physical(&p, fine).unwrap();
            let err = (0..=fine)
                .map(|j| (back.values()[j] - exact[j]).abs())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        let order = crate::grid::observed_order(&ns, &errs).unwrap();
        assert!(order > 2.5, "order {order}, errors {errs:?}");
        assert!(errs[2] < 1e-4, "finest error {}", errs[2]);
    }

    #[test]
    fn pchip_is_monotone_on_monotone_data() {
        let xs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| x * x * (3.0 - 2.0 * x)).collect();
        let slopes = pchip_slopes(&xs, &ys);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let x = i as f64 / 400.0;
            let y = pchip_eval(&xs, &ys, &slopes, x);
            assert!(y >= prev - 1e-12, "not monotone at x = {x}");
            prev = y;
        }
    }
}
