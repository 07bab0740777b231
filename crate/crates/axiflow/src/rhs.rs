//! Right-hand side of the transplanted flow system.
//!
//! The moving-boundary problem for v = u²/2 becomes, after transplanting
//! onto the fixed grid θ ∈ [0, π] via x = c − d·cosθ, the coupled system
//!
//!   h_t = Φ₁(h, d)   (field),
//!   c′  = Φ₂ = d·(1/h″(0) − 1/h″(π)),
//!   d′  = Φ₃ = −d·(1/h″(0) + 1/h″(π)),
//!
//! where Φ₁ contains the quasilinear diffusion in the interior plus a
//! transport bracket coming from the motion of the grid itself.  Φ₁
//! vanishes identically at both endpoints, so pinning h(0) = h(π) = 0 is
//! preserved exactly by any explicit integrator.
//!
//! `oracle_vt` evaluates the same evolution law in fixed physical
//! coordinates from pointwise (v, v_x, v_xx); it shares no code with the
//! transplanted path and serves as an independent consistency check.

use crate::error::{AxisEnd, Error, Result};
use crate::grid::{Field, Grid};
use crate::profile::{axis_posdef_floor, HProfile};

/// One full evaluation of (Φ₁, Φ₂, Φ₃) with the endpoint second
/// derivatives that fed the boundary terms.
#[derive(Debug, Clone)]
pub struct RhsEval {
    pub h_t: Field,
    pub c_dot: f64,
    pub d_dot: f64,
    pub h2_0: f64,
    pub h2_pi: f64,
    /// Max over nodes of the effective diffusion coefficient
    /// 2(h/sin²θ)/(2d²h + (h′/sinθ)²); the explicit-step stability limit
    /// is dt ≲ Δθ²/this. Scales like 1/d² on shrinking spheres.
    pub a1_max: f64,
}

/// Rate of change of v at a fixed physical point, from pointwise values:
/// v_t = (2v·v_xx − v_x²)/(2v + v_x²) − 1.
pub fn oracle_vt(v: f64, v_x: f64, v_xx: f64) -> Result<f64> {
    let den = 2.0 * v + v_x * v_x;
    if den <= 1e-14 * (1.0 + v.abs() + v_x * v_x) {
        return Err(Error::InvalidInput(format!(
            "degenerate denominator 2v + v_x² = {den:e}"
        )));
    }
    Ok((2.0 * v * v_xx - v_x * v_x) / den - 1.0)
}

/// Φ₁ alone (endpoints exactly 0).
pub fn phi1(grid: &Grid, h: &HProfile) -> Result<Field> {
    Ok(full_rhs(grid, h)?.h_t)
}

/// Φ₁ with the grid-transport bracket removed: the rate of change of v at
/// the physical point currently under each node, for comparison against
/// `oracle_vt` through the chain rule.
pub fn phi1_transport_free(grid: &Grid, h: &HProfile) -> Result<Field> {
    phi1_impl(grid, h.values(), h.d(), false)
}

/// Physical-versus-transplanted consistency on the middle band
/// θ ∈ [π/8, 7π/8]: compares the transport-free Φ₁ against `oracle_vt`
/// evaluated with analytically supplied v-derivatives at x = c − d·cosθ
/// (v itself is read off the profile). The Φ₁ side uses only finite
/// differences of h, so the residual is its genuine discretization
/// error. Returns (max |residual|, max |v_t|) over the band.
pub fn transport_consistency(
    grid: &Grid,
    h: &HProfile,
    v_x: &dyn Fn(f64) -> f64,
    v_xx: &dyn Fn(f64) -> f64,
) -> Result<(f64, f64)> {
    let tf = phi1_transport_free(grid, h)?;
    let n = grid.n();
    let lo = (n as f64 / 8.0).ceil() as usize;
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for j in lo..=(n - lo) {
        let x = h.c() - h.d() * grid.cos_theta()[j];
        let want = oracle_vt(h.values()[j], v_x(x), v_xx(x))?;
        err = err.max((tf[j] - want).abs());
        scale = scale.max(want.abs());
    }
    Ok((err, scale))
}

/// The canonical quartic test profile h = sin²θ(1 − ½sin²θ), i.e.
/// v = (1 − x⁴)/2 on [−1, 1]; its analytic derivatives are
/// v′ = −2x³ and v″ = −6x².
pub fn canonical_oracle_profile(grid: &Grid) -> HProfile {
    let vals = grid
        .sin_theta()
        .iter()
        .map(|&s| s * s * (1.0 - 0.5 * s * s))
        .collect();
    HProfile::new(vals, 0.0, 1.0).expect("quartic profile is admissible")
}

/// Consistency error of the canonical quartic profile at grid size n;
/// returns (max |residual|, max |v_t|) over the middle band.
pub fn canonical_consistency(n: usize) -> Result<(f64, f64)> {
    let grid = Grid::new(n)?;
    let h = canonical_oracle_profile(&grid);
    transport_consistency(&grid, &h, &|x| -2.0 * x * x * x, &|x| -6.0 * x * x)
}

/// Φ₂ = d·(1/h″(0) − 1/h″(π)): drift of the midpoint c.
pub fn phi2(grid: &Grid, h: &HProfile) -> Result<f64> {
    let (h2_0, h2_pi) = end_curvatures(grid, h.values())?;
    Ok(h.d() * (1.0 / h2_0 - 1.0 / h2_pi))
}

/// Φ₃ = −d·(1/h″(0) + 1/h″(π)): shrink rate of the half-width d.
/// Strictly negative whenever both endpoint curvatures are positive.
pub fn phi3(grid: &Grid, h: &HProfile) -> Result<f64> {
    let (h2_0, h2_pi) = end_curvatures(grid, h.values())?;
    Ok(-h.d() * (1.0 / h2_0 + 1.0 / h2_pi))
}

/// Evaluate the whole system, sharing one endpoint-derivative fit.
pub fn full_rhs(grid: &Grid, h: &HProfile) -> Result<RhsEval> {
    full_rhs_raw(grid, h.values(), h.d())
}

/// Same as `full_rhs` but on raw field data, so integrator stages can be
/// evaluated without re-validating admissibility on every call. Structural
/// failures (degenerate axis, pinched denominator) still error out.
pub fn full_rhs_raw(grid: &Grid, values: &[f64], d: f64) -> Result<RhsEval> {
    let (h2_0, h2_pi) = end_curvatures(grid, values)?;
    let (h_t, a1_max) = phi1_body(grid, values, d, h2_0, h2_pi, true)?;
    let c_dot = d * (1.0 / h2_0 - 1.0 / h2_pi);
    let d_dot = -d * (1.0 / h2_0 + 1.0 / h2_pi);
    Ok(RhsEval {
        h_t,
        c_dot,
        d_dot,
        h2_0,
        h2_pi,
        a1_max,
    })
}

pub(crate) fn end_curvatures(grid: &Grid, values: &[f64]) -> Result<(f64, f64)> {
    grid.check_len(values)?;
    let fit = grid.endpoint_fit(values);
    let floor = axis_posdef_floor(grid, values);
    if fit.h2_0 <= floor {
        return Err(Error::AxisDegeneracy {
            end: AxisEnd::Left,
            h2: fit.h2_0,
        });
    }
    if fit.h2_pi <= floor {
        return Err(Error::AxisDegeneracy {
            end: AxisEnd::Right,
            h2: fit.h2_pi,
        });
    }
    Ok((fit.h2_0, fit.h2_pi))
}

fn phi1_impl(grid: &Grid, values: &[f64], d: f64, with_transport: bool) -> Result<Field> {
    let (h2_0, h2_pi) = end_curvatures(grid, values)?;
    Ok(phi1_body(grid, values, d, h2_0, h2_pi, with_transport)?.0)
}

fn phi1_body(
    grid: &Grid,
    values: &[f64],
    d: f64,
    h2_0: f64,
    h2_pi: f64,
    with_transport: bool,
) -> Result<(Field, f64)> {
    let fit = grid.endpoint_fit(values);
    let d1 = grid.diff1(values);
    let d2 = grid.diff2(values);
    let q_s2 = grid.quot_sin2(values, &fit);
    let q_ds = grid.quot_dsin(&d1, &fit);
    let q_dt = grid.quot_dtan(&d1, &fit);

    // The denominator 2d²h + (h′/sinθ)² can only approach zero where h and
    // h′ vanish together in the interior, i.e. at a neck pinch. We never
    // regularize past it: the flow is not defined there.
    let hmax = values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let qmax = q_ds.iter().fold(0.0f64, |m, &q| m.max(q.abs()));
    let den_floor = 1e-14 * (2.0 * d * d * hmax + qmax * qmax).max(f64::MIN_POSITIVE);

    let inv0 = 1.0 / h2_0;
    let invp = 1.0 / h2_pi;
    let n = grid.n();
    let cos_t = grid.cos_theta();
    let mut h_t = vec![0.0; n + 1];
    let mut a1_max = (1.0 / h2_0).max(1.0 / h2_pi);
    for j in 1..n {
        let den = 2.0 * d * d * values[j] + q_ds[j] * q_ds[j];
        if den <= den_floor {
            return Err(Error::PinchDenominator {
                theta: grid.theta()[j],
                value: den,
            });
        }
        a1_max = a1_max.max(2.0 * q_s2[j] / den);
        let diffusion = (2.0 * q_s2[j] * (d2[j] - q_dt[j]) - q_ds[j] * q_ds[j]) / den - 1.0;
        h_t[j] = if with_transport {
            let bracket = (1.0 + cos_t[j]) * inv0 - (1.0 - cos_t[j]) * invp;
            diffusion + bracket * q_ds[j]
        } else {
            diffusion
        };
    }
    Ok((h_t, a1_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sphere_h(grid: &Grid, d: f64) -> Vec<f64> {
        grid.sin_theta().iter().map(|&s| 0.5 * d * d * s * s).collect()
    }

    #[test]
    fn oracle_hand_values() {
        assert!((oracle_vt(2.0, 1.0, 0.0).unwrap() + 1.2).abs() < 1e-15);
        assert!((oracle_vt(0.5, 0.0, -1.0).unwrap() + 2.0).abs() < 1e-15);
        // v_x = v_xx = 0 recovers the cylinder law v_t = −1.
        for v in [0.3, 1.0, 7.0] {
            assert_eq!(oracle_vt(v, 0.0, 0.0).unwrap(), -1.0);
        }
        assert!(oracle_vt(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn sphere_rhs_matches_closed_form() {
        // h = d²sin²θ/2 evolves with h_t = −2sin²θ, c′ = 0, d′ = −2/d.
        let g = Grid::new(256).unwrap();
        for d in [0.5, 1.0, 2.0] {
            let h = HProfile::new(sphere_h(&g, d), 0.0, d).unwrap();
            let ev = full_rhs(&g, &h).unwrap();
            // The endpoint fit is exact on the sphere family, so the
            // boundary rates are exact to round-off, not just O(Δθ²).
            assert_eq!(ev.c_dot, 0.0, "d = {d}");
            assert!((ev.d_dot + 2.0 / d).abs() < 1e-12 / d, "d = {d}");
            let err = (0..=g.n())
                .map(|j| (ev.h_t[j] + 2.0 * g.sin_theta()[j].powi(2)).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-6, "d = {d}: max residual {err:e}");
        }
    }

    #[test]
    fn phi_vanishes_at_endpoints_exactly() {
        let g = Grid::new(128).unwrap();
        let vals: Vec<f64> = g
            .sin_theta()
            .iter()
            .map(|&s| s * s + 0.3 * s * s * s)
            .collect();
        let h = HProfile::new(vals, 1.0, 1.0).unwrap();
        let ev = full_rhs(&g, &h).unwrap();
        assert_eq!(ev.h_t[0], 0.0);
        assert_eq!(ev.h_t[g.n()], 0.0);
    }

    #[test]
    fn ellipsoid_phi1_at_equator() {
        // h = 2sin²θ, d = 1: at θ = π/2, h″ = −4, the quotients vanish,
        // and the transport bracket cancels by symmetry, so Φ₁ = −5.
        let g = Grid::new(256).unwrap();
        let vals: Vec<f64> = g.sin_theta().iter().map(|&s| 2.0 * s * s).collect();
        let h = HProfile::new(vals, 0.0, 1.0).unwrap();
        let p1 = phi1(&g, &h).unwrap();
        let mid = g.n() / 2;
        assert!((p1[mid] + 5.0).abs() < 1e-6, "Φ₁(π/2) = {}", p1[mid]);
    }

    #[test]
    fn boundary_rates_for_unequal_end_curvatures() {
        // h = sin²θ(3 − cosθ)/4 has h″(0) = 1 and h″(π) = 2, so
        // Φ₂ = d(1 − 1/2) = d/2 and Φ₃ = −3d/2.
        let g = Grid::new(256).unwrap();
        let vals: Vec<f64> = (0..=g.n())
            .map(|j| {
                let s = g.sin_theta()[j];
                let c = g.cos_theta()[j];
                0.25 * s * s * (3.0 - c)
            })
            .collect();
        let h = HProfile::new(vals, 0.0, 1.5).unwrap();
        assert!((phi2(&g, &h).unwrap() - 0.75).abs() < 1e-6);
        assert!((phi3(&g, &h).unwrap() + 2.25).abs() < 1e-6);
    }

    #[test]
    fn full_rhs_agrees_with_individual_pieces() {
        let g = Grid::new(128).unwrap();
        let vals: Vec<f64> = (0..=g.n())
            .map(|j| {
                let s = g.sin_theta()[j];
                let c = g.cos_theta()[j];
                0.5 * s * s * (1.0 + 0.2 * c)
            })
            .collect();
        let h = HProfile::new(vals, -3.0, 0.7).unwrap();
        let ev = full_rhs(&g, &h).unwrap();
        assert_eq!(ev.h_t, phi1(&g, &h).unwrap());
        assert_eq!(ev.c_dot, phi2(&g, &h).unwrap());
        assert_eq!(ev.d_dot, phi3(&g, &h).unwrap());
        let fit = g.endpoint_fit(h.values());
        assert_eq!(ev.h2_0, fit.h2_0);
        assert_eq!(ev.h2_pi, fit.h2_pi);
    }

    #[test]
    fn symmetric_profile_has_zero_c_dot_exactly() {
        // Dumbbell-type even profile: mirror symmetry of the tables makes
        // h″(0) and h″(π) bit-identical, so Φ₂ = 0 exactly.
        let g = Grid::new(256).unwrap();
        let vals: Vec<f64> = g
            .sin_theta()
            .iter()
            .map(|&s| 0.5 * s * s * (1.0 - 0.9 * s * s))
            .collect();
        let h = HProfile::new(vals, 0.0, 1.0).unwrap();
        let ev = full_rhs(&g, &h).unwrap();
        assert_eq!(ev.c_dot, 0.0);
        // And Φ₁ inherits the mirror symmetry bit-exactly.
        for j in 0..=g.n() {
            assert_eq!(ev.h_t[j], ev.h_t[g.n() - j], "j = {j}");
        }
    }

    #[test]
    fn transport_free_matches_physical_oracle_at_third_order() {
        // Profiles h(θ) = p(cosθ) with hand-differentiated physical form
        // v(x), compared through the chain rule on the middle band. The
        // Φ₁ path uses only finite differences of h; the oracle side uses
        // the analytic v derivatives, so the residual is the genuine
        // discretization error.
        type Deriv = (fn(f64) -> f64, fn(f64) -> f64, fn(f64) -> f64);
        let cases: [(Deriv, f64); 3] = [
            // v = (1−x²)/2: the unit sphere.
            ((|x| 0.5 * (1.0 - x * x), |x| -x, |_| -1.0), 1.0),
            // v = (1−x⁴)/2 = transplant of sin²θ(1+cos²θ)/2.
            (
                (
                    |x| 0.5 * (1.0 - x * x * x * x),
                    |x| -2.0 * x * x * x,
                    |x| -6.0 * x * x,
                ),
                1.0,
            ),
            // v = (1−x²)(2+x)/2: asymmetric ends.
            (
                (
                    |x| 0.5 * (1.0 - x * x) * (2.0 + x),
                    |x| 0.5 * (1.0 - 4.0 * x - 3.0 * x * x),
                    |x| -2.0 - 3.0 * x,
                ),
                1.0,
            ),
        ];
        for (idx, &((v, vx, vxx), d)) in cases.iter().enumerate() {
            let ns = [64usize, 128, 256];
            let mut errs = Vec::new();
            for &n in &ns {
                let g = Grid::new(n).unwrap();
                let mut vals: Vec<f64> = g.cos_theta().iter().map(|&ct| v(-d * ct)).collect();
                // Pin the endpoint values to exact zeros (v(±1) = 0
                // analytically, but cos table times rounding says 1e−17).
                vals[0] = 0.0;
                vals[n] = 0.0;
                let h = HProfile::new(vals, 0.0, d).unwrap();
                let (err, _) = transport_consistency(&g, &h, &vx, &vxx).unwrap();
                errs.push(err);
            }
            let order = crate::grid::observed_order(&ns, &errs).unwrap();
            assert!(order > 3.0, "case {idx}: order {order}, errors {errs:?}");
            assert!(errs[2] < 1e-6, "case {idx}: finest {:e}", errs[2]);
        }
    }

    #[test]
    fn canonical_profile_matches_its_physical_form() {
        // sin²θ(1 − ½sin²θ) transplants to v = (1−x⁴)/2; the helper must
        // agree with the direct construction used above.
        let g = Grid::new(128).unwrap();
        let h = canonical_oracle_profile(&g);
        for (j, &ct) in g.cos_theta().iter().enumerate() {
            let v = 0.5 * (1.0 - ct.powi(4));
            assert!((h.values()[j] - v).abs() < 1e-15, "j = {j}");
        }
        let (err, scale) = canonical_consistency(256).unwrap();
        assert!(err / scale < 1e-6, "relative residual {:e}", err / scale);
    }

    #[test]
    fn degenerate_axis_is_rejected() {
        let g = Grid::new(128).unwrap();
        let vals: Vec<f64> = g.sin_theta().iter().map(|&s| s.powi(4)).collect();
        let h = HProfile::new(vals, 0.0, 1.0).unwrap();
        assert!(matches!(
            full_rhs(&g, &h),
            Err(Error::AxisDegeneracy { .. })
        ));
    }

    #[test]
    fn pinched_denominator_is_rejected() {
        // A neck squeezed to 1e−17 at θ = π/2 with flat slope there: both
        // h and h′/sinθ vanish at the node, so 2d²h + (h′/sinθ)² drops
        // under the floor and the evaluation refuses to continue.
        let g = Grid::new(128).unwrap();
        let vals: Vec<f64> = (0..=g.n())
            .map(|j| {
                let s = g.sin_theta()[j];
                let c = g.cos_theta()[j];
                s * s * c * c + 1e-17 * s * s
            })
            .collect();
        let h = HProfile::new(vals, 0.0, 1.0).unwrap();
        assert!(matches!(
            full_rhs(&g, &h),
            Err(Error::PinchDenominator { theta, .. }) if (theta - std::f64::consts::FRAC_PI_2).abs() < 1e-12
        ));
    }

    proptest! {
        // Random admissible profiles: h = d²sin²θ/2 · (1 + Σ aₖ sin²(kθ))
        // with small aₖ stays positive with h″(0), h″(π) > 0.
        #[test]
        fn phi3_negative_and_translation_invariant(
            d in 0.3f64..3.0,
            c in -5.0f64..5.0,
            a1 in -0.1f64..0.1,
            a2 in -0.1f64..0.1,
            a3 in -0.1f64..0.1,
        ) {
            let g = Grid::new(64).unwrap();
            let vals: Vec<f64> = (0..=g.n()).map(|j| {
                let t = g.theta()[j];
                let s = g.sin_theta()[j];
                let bump = 1.0 + a1 * (t).sin().powi(2)
                    + a2 * (2.0 * t).sin().powi(2)
                    + a3 * (3.0 * t).sin().powi(2);
                0.5 * d * d * s * s * bump
            }).collect();
            let h0 = HProfile::new(vals.clone(), 0.0, d).unwrap();
            let hc = HProfile::new(vals, c, d).unwrap();
            let e0 = full_rhs(&g, &h0).unwrap();
            let ec = full_rhs(&g, &hc).unwrap();
            prop_assert!(e0.d_dot < 0.0);
            // c never enters Φ: evaluations are bit-identical.
            prop_assert_eq!(&e0.h_t, &ec.h_t);
            prop_assert_eq!(e0.c_dot, ec.c_dot);
            prop_assert_eq!(e0.d_dot, ec.d_dot);
        }
    }
}
