//! Information geometry induced on the phase space by a convex energy
//! density: total Legendre transform, fiber metric, dual coordinates,
//! alpha-connections, canonical divergence and the generalized Pythagorean
//! relation.
//!
//! The dually flat structure makes geodesics straight lines in the
//! respective affine coordinates (`x` for the primal connection, `y` for its
//! dual), so no ODE integration appears anywhere; the only numerics is the
//! damped-Newton Legendre transform.

use crate::density::Density;
use crate::error::{Error, Result};
use crate::linalg;

/// Search region and tolerances for the numeric Legendre transform.
#[derive(Debug, Clone)]
pub struct SearchBox {
    pub half_width: f64,
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for SearchBox {
    fn default() -> Self {
        SearchBox {
            half_width: 4.0,
            grad_tol: 1e-13,
            max_iter: 200,
        }
    }
}

/// Value and maximizer of the total Legendre transform
/// `L[psi](y) = sup_x (x . y - psi(x))`.
#[derive(Debug, Clone)]
pub struct TransformResult {
    pub value: f64,
    pub maximizer: Vec<f64>,
}

/// Damped-Newton maximization of `x . y - psi(x)` via the gradient equation
/// `grad psi(x) = y`, with a grid-search fallback start for low dimensions.
pub fn legendre_transform(
    psi: &dyn Density,
    y: &[f64],
    search: &SearchBox,
) -> Result<TransformResult> {
    let n = psi.dim();
    debug_assert_eq!(y.len(), n);
    let objective = |x: &[f64]| -> f64 {
        x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - psi.eval(x)
    };
    let mut x = vec![0.0; n];
    if n <= 2 {
        // grid start; keeps Newton inside the right basin even for
        // flat-bottomed quartics
        let steps = 33;
        let mut best = objective(&x);
        let mut idx = vec![0usize; n];
        loop {
            let cand: Vec<f64> = idx
                .iter()
                .map(|&i| -search.half_width + 2.0 * search.half_width * i as f64 / (steps - 1) as f64)
                .collect();
            let v = objective(&cand);
            if v > best {
                best = v;
                x = cand;
            }
            let mut carry = 0;
            loop {
                idx[carry] += 1;
                if idx[carry] < steps {
                    break;
                }
                idx[carry] = 0;
                carry += 1;
                if carry == n {
                    break;
                }
            }
            if carry == n {
                break;
            }
        }
    }
    let residual = |x: &[f64]| -> Vec<f64> {
        psi.grad(x).iter().zip(y).map(|(gi, yi)| gi - yi).collect()
    };
    let inf_norm = |v: &[f64]| v.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    let mut converged = false;
    for _ in 0..search.max_iter {
        let g = residual(&x);
        let gnorm = inf_norm(&g);
        if gnorm <= search.grad_tol {
            converged = true;
            break;
        }
        let h = psi.hess(&x);
        if (0..n).any(|i| h[i][i] < -1e-12 * (1.0 + gnorm)) {
            return Err(Error::NonConvex);
        }
        // Newton direction, falling back to a plain residual step where the
        // Hessian degenerates (e.g. a pure quartic at the origin)
        let step = match linalg::solve(&h, &g) {
            Some(s) => s,
            None => g.clone(),
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - lambda * s).collect();
            if inf_norm(&residual(&cand)) < gnorm {
                x = cand;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            // progress stalled at the floating-point floor
            if gnorm <= 1e-9 {
                converged = true;
                break;
            }
            return Err(Error::NoConvergence);
        }
    }
    if !converged && inf_norm(&residual(&x)) > search.grad_tol.max(1e-9) {
        return Err(Error::NoConvergence);
    }
    for (axis, &v) in x.iter().enumerate() {
        if v.abs() >= search.half_width {
            return Err(Error::BoxBoundaryHit { axis, value: v });
        }
    }
    Ok(TransformResult {
        value: objective(&x),
        maximizer: x,
    })
}

/// Analytic dual of the unit quadratic: `phi(y) = 1/2 |y|^2`.
///
/// This is the closed-form co-energy density for all four signatures when
/// `psi = 1/2 |x|^2`; anything else must go through [`legendre_transform`].
pub fn quadratic_cotransform(psi: &crate::density::Quadratic) -> Result<crate::density::Quadratic> {
    if psi.coeffs.iter().any(|&c| c != 0.5) {
        return Err(Error::NotQuadratic);
    }
    Ok(crate::density::Quadratic::unit(psi.coeffs.len()))
}

/// The fiber metric `g_ab = d^2 psi / dx^a dx^b`.
pub fn fiber_metric(psi: &dyn Density, x: &[f64]) -> Vec<Vec<f64>> {
    psi.hess(x)
}

/// Check `g(d/dx^b, d/dy_a) = delta` with `dx/dy` obtained from central
/// differences of the numeric maximizer: the duality pairing of the two
/// coordinate systems.
pub fn duality_pairing_check(psi: &dyn Density, x: &[f64], search: &SearchBox) -> Result<f64> {
    let n = psi.dim();
    let y = psi.grad(x);
    let g = psi.hess(x);
    // dx/dy by a fourth-order five-point stencil on the numeric maximizer
    let eps = 3e-3;
    let mut dx_dy = vec![vec![0.0; n]; n]; // [j][a] = d x^j / d y_a
    for a in 0..n {
        let probe = |s: f64| -> Result<Vec<f64>> {
            let mut yy = y.clone();
            yy[a] += s;
            Ok(legendre_transform(psi, &yy, search)?.maximizer)
        };
        let x_p2 = probe(2.0 * eps)?;
        let x_p1 = probe(eps)?;
        let x_m1 = probe(-eps)?;
        let x_m2 = probe(-2.0 * eps)?;
        for j in 0..n {
            dx_dy[j][a] =
                (-x_p2[j] + 8.0 * x_p1[j] - 8.0 * x_m1[j] + x_m2[j]) / (12.0 * eps);
        }
    }
    // g(d/dx^b, d/dy_a) = g_bj dx^j/dy_a
    let mut worst = 0.0_f64;
    for b in 0..n {
        for a in 0..n {
            let mut v = 0.0;
            for j in 0..n {
                v += g[b][j] * dx_dy[j][a];
            }
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    Ok(worst)
}

/// Components of the alpha-connection family
/// `Gamma^(alpha)_abc = (1 - alpha)/2 * d^3 psi / dx^a dx^b dx^c`.
pub fn alpha_connection(psi: &dyn Density, x: &[f64], alpha: f64) -> Vec<Vec<Vec<f64>>> {
    let n = psi.dim();
    let w = 0.5 * (1.0 - alpha);
    let mut out = vec![vec![vec![0.0; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                out[a][b][c] = w * psi.third(x, a, b, c);
            }
        }
    }
    out
}

/// A dually flat chart: the density, its transform machinery, and metric
/// access through the two Hessians.
pub struct DuallyFlatChart<'a> {
    pub psi: &'a dyn Density,
    pub search: SearchBox,
}

impl<'a> DuallyFlatChart<'a> {
    pub fn new(psi: &'a dyn Density) -> DuallyFlatChart<'a> {
        DuallyFlatChart {
            psi,
            search: SearchBox::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.psi.dim()
    }

    /// `y` coordinates of a point given in `x` coordinates.
    pub fn to_dual(&self, x: &[f64]) -> Vec<f64> {
        self.psi.grad(x)
    }

    /// `phi(y)` at the dual image of `x`, via the Legendre equality
    /// `phi(grad psi(x)) = x . grad psi(x) - psi(x)` (exact, no search).
    pub fn phi_at_dual_of(&self, x: &[f64]) -> f64 {
        let y = self.psi.grad(x);
        x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() - self.psi.eval(x)
    }

    pub fn metric(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.psi.hess(x)
    }
}

/// Canonical divergence `D(xi || xi') = psi(xi) + phi(y') - x(xi) . y'`
/// with `y' = grad psi(xi')`; both arguments in `x` coordinates.
pub fn canonical_divergence(chart: &DuallyFlatChart, xi: &[f64], xi_prime: &[f64]) -> f64 {
    let y_prime = chart.psi.grad(xi_prime);
    let phi = chart.phi_at_dual_of(xi_prime);
    chart.psi.eval(xi) + phi - xi.iter().zip(&y_prime).map(|(a, b)| a * b).sum::<f64>()
}

const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Pythagorean residual `|D(xi''' || xi') - D(xi''' || xi'') - D(xi'' || xi')|`
/// for a corner configuration: `xi'-xi''` on a dual-geodesic (straight in
/// `y`), `xi''-xi'''` on a primal geodesic (straight in `x`), orthogonal at
/// `xi''` under the fiber metric. Errors if the corner is not orthogonal.
pub fn pythagoras_check(
    chart: &DuallyFlatChart,
    xi_prime: &[f64],
    xi_dprime: &[f64],
    xi_tprime: &[f64],
) -> Result<f64> {
    let u: Vec<f64> = xi_tprime
        .iter()
        .zip(xi_dprime)
        .map(|(a, b)| a - b)
        .collect();
    let y_d = chart.to_dual(xi_dprime);
    let y_p = chart.to_dual(xi_prime);
    let dy: Vec<f64> = y_d.iter().zip(&y_p).map(|(a, b)| a - b).collect();
    // The dual-geodesic tangent in x-coordinates is Hess(phi) dy; pairing it
    // with u under g = Hess(psi) collapses to the plain dot product u . dy.
    let u_scale = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let dy_scale = dy.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let defect: f64 = u.iter().zip(&dy).map(|(a, b)| a * b).sum();
    if defect.abs() > ORTHOGONALITY_TOL * (1.0 + u_scale * dy_scale) {
        return Err(Error::NotOrthogonal(defect.abs()));
    }
    let d31 = canonical_divergence(chart, xi_tprime, xi_prime);
    let d32 = canonical_divergence(chart, xi_tprime, xi_dprime);
    let d21 = canonical_divergence(chart, xi_dprime, xi_prime);
    Ok((d31 - d32 - d21).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{AxisPoly, Quadratic, QuadraticFormPlusQuartic};

    fn quartic1() -> AxisPoly {
        AxisPoly {
            coeffs: vec![vec![0.0, 0.0, 0.0, 0.0, 0.25]],
        }
    }

    #[test]
    fn transform_of_unit_quadratic_is_itself() {
        let psi = Quadratic::unit(2);
        let y = [0.3, -1.1];
        let r = legendre_transform(&psi, &y, &SearchBox::default()).unwrap();
        let phi = 0.5 * (y[0] * y[0] + y[1] * y[1]);
        assert!((r.value - phi).abs() < 1e-12);
        for (m, v) in r.maximizer.iter().zip(&y) {
            assert!((m - v).abs() < 1e-12);
        }
    }

    #[test]
    fn transform_of_scaled_quadratic() {
        // psi = a x^2 / 2 with a = 2: phi(y) = y^2 / (2a); grid-search oracle
        // over [-4, 4] agrees
        let psi = Quadratic { coeffs: vec![1.0] }; // c x^2 with c = 1, i.e. a = 2
        let y = [1.0];
        let r = legendre_transform(&psi, &y, &SearchBox::default()).unwrap();
        assert!((r.value - 0.25).abs() < 1e-12);
        assert!((r.maximizer[0] - 0.5).abs() < 1e-12);
        let mut best = f64::MIN;
        let mut arg = 0.0;
        for i in 0..20001 {
            let x = -4.0 + 8.0 * i as f64 / 20000.0;
            let v = x * y[0] - psi.eval(&[x]);
            if v > best {
                best = v;
                arg = x;
            }
        }
        assert!((best - r.value).abs() < 1e-7);
        assert!((arg - r.maximizer[0]).abs() < 1e-3);
    }

    #[test]
    fn transform_of_quartic() {
        // psi = x^4/4, y = 8: x* = 2, phi = 16 - 4 = 12
        let psi = quartic1();
        let r = legendre_transform(&psi, &[8.0], &SearchBox::default()).unwrap();
        assert!((r.maximizer[0] - 2.0).abs() < 1e-10);
        assert!((r.value - 12.0).abs() < 1e-10);
    }

    #[test]
    fn transform_error_paths() {
        let psi = Quadratic::unit(1);
        // maximizer for y = 10 sits at x = 10, outside the default box
        let err = legendre_transform(&psi, &[10.0], &SearchBox::default());
        assert!(matches!(err, Err(Error::BoxBoundaryHit { .. })));
        // concave "density" is rejected
        let bad = Quadratic {
            coeffs: vec![-0.5],
        };
        assert!(matches!(
            legendre_transform(&bad, &[0.1], &SearchBox::default()),
            Err(Error::NonConvex)
        ));
    }

    #[test]
    fn cotransform_matches_numeric() {
        let psi = Quadratic::unit(4);
        let phi = quadratic_cotransform(&psi).unwrap();
        let y = [0.3, -1.2, 0.5, 2.0];
        let num = legendre_transform(&psi, &y, &SearchBox::default()).unwrap();
        assert!((phi.eval(&y) - num.value).abs() <= 1e-10);
        assert_eq!(phi.eval(&[0.0; 4]), 0.0);
        let non_unit = Quadratic {
            coeffs: vec![0.5, 0.7],
        };
        assert!(quadratic_cotransform(&non_unit).is_err());
    }

    #[test]
    fn biconjugation_recovers_psi() {
        // L[L[psi]] = psi on convex densities; the outer sup runs over y with
        // the inner numeric transform as the objective's phi.
        let psi = quartic1();
        let search = SearchBox::default();
        for x in [0.5, 1.0, 1.5] {
            // phi(y) numerically, then psi**(x) = sup_y (x y - phi(y)):
            // maximizer y* solves grad phi(y) = x, i.e. x*(y) = x, i.e.
            // y = grad psi(x); verify the sup by direct evaluation
            let y_star = psi.grad(&[x]);
            let phi = legendre_transform(&psi, &y_star, &search).unwrap();
            let psi_cc = x * y_star[0] - phi.value;
            assert!((psi_cc - psi.eval(&[x])).abs() <= 1e-9);
            // and that it is really the sup: nearby y do no better
            for dy in [-0.3, 0.2] {
                let y = [y_star[0] + dy];
                let phi2 = legendre_transform(&psi, &y, &search).unwrap();
                assert!(x * y[0] - phi2.value <= psi_cc + 1e-9);
            }
        }
    }

    #[test]
    fn gradient_inverse_identity() {
        // grad phi (grad psi(x)) = x: the maximizer of the transform at
        // y = grad psi(x) is x itself
        let psi = QuadraticFormPlusQuartic {
            a: vec![vec![1.2, 0.3], vec![0.3, 0.9]],
            q: vec![0.1, 0.2],
        };
        for x in [[0.4, -0.7], [1.1, 0.2]] {
            let y = psi.grad(&x);
            let r = legendre_transform(&psi, &y, &SearchBox::default()).unwrap();
            for (m, v) in r.maximizer.iter().zip(&x) {
                assert!((m - v).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn fiber_metric_cases() {
        let psi = Quadratic::unit(3);
        let g = fiber_metric(&psi, &[0.1, 0.2, 0.3]);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(g[i][j], want);
            }
        }
        let q = quartic1();
        let g = fiber_metric(&q, &[1.0]);
        assert_eq!(g[0][0], 3.0);
    }

    #[test]
    fn hessian_product_identity() {
        // Hess psi (x*) . Hess phi (y) = identity at matched points, with
        // Hess phi from the numeric transform maximizer derivative
        let psi = quartic1();
        let x = [1.0];
        let res = duality_pairing_check(&psi, &x, &SearchBox::default()).unwrap();
        assert!(res <= 1e-10, "residual {res:e}");
    }

    #[test]
    fn duality_pairing_cases() {
        let psi = Quadratic::unit(2);
        let r = duality_pairing_check(&psi, &[0.7, -0.4], &SearchBox::default()).unwrap();
        assert!(r <= 1e-10);
        let mixed = QuadraticFormPlusQuartic {
            a: vec![vec![1.5, 0.4], vec![0.4, 1.1]],
            q: vec![0.15, 0.05],
        };
        let r = duality_pairing_check(&mixed, &[0.5, 0.8], &SearchBox::default()).unwrap();
        assert!(r <= 1e-8, "residual {r:e}");
    }

    #[test]
    fn alpha_connection_cases() {
        let psi = Quadratic::unit(3);
        for alpha in [-1.0, 0.0, 0.7, 1.0] {
            let g = alpha_connection(&psi, &[0.4, 0.1, -0.2], alpha);
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        assert_eq!(g[a][b][c], 0.0);
                    }
                }
            }
        }
        let q = quartic1();
        let g0 = alpha_connection(&q, &[1.0], 0.0);
        assert_eq!(g0[0][0][0], 3.0); // (1/2) * 6x at x = 1
    }

    #[test]
    fn alpha_connection_metric_derivative_identity() {
        // d_a g_bc = Gamma^(alpha)_abc + Gamma^(-alpha)_acb, with the metric
        // derivative from central differences (exact for these polynomials)
        let q = quartic1();
        let x = [1.0];
        let alpha = 0.7;
        let gp = alpha_connection(&q, &x, alpha);
        let gm = alpha_connection(&q, &x, -alpha);
        let h = 1e-3;
        let g_plus = fiber_metric(&q, &[x[0] + h]);
        let g_minus = fiber_metric(&q, &[x[0] - h]);
        let dg = (g_plus[0][0] - g_minus[0][0]) / (2.0 * h);
        let sum = gp[0][0][0] + gm[0][0][0];
        assert!((dg - sum).abs() <= 1e-10, "{dg} vs {sum}");
    }

    #[test]
    fn divergence_cases() {
        let psi = Quadratic::unit(1);
        let chart = DuallyFlatChart::new(&psi);
        let d = canonical_divergence(&chart, &[1.0], &[0.0]);
        assert!((d - 0.5).abs() < 1e-14);
        assert_eq!(canonical_divergence(&chart, &[0.7], &[0.7]), 0.0);

        let q = quartic1();
        let chart = DuallyFlatChart::new(&q);
        // xi = 0, xi' = 1: psi(0) + phi(1) - 0 = 0.75
        let d = canonical_divergence(&chart, &[0.0], &[1.0]);
        assert!((d - 0.75).abs() < 1e-14);
    }

    #[test]
    fn divergence_nonnegative_and_faithful() {
        let psi = QuadraticFormPlusQuartic {
            a: vec![vec![1.0, 0.2], vec![0.2, 0.8]],
            q: vec![0.1, 0.3],
        };
        let chart = DuallyFlatChart::new(&psi);
        let mut seed = 5u64;
        let mut rnd = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((seed >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for _ in 0..1000 {
            let a = [rnd(), rnd()];
            let b = [rnd(), rnd()];
            let d = canonical_divergence(&chart, &a, &b);
            assert!(d >= -1e-15, "negative divergence {d:e}");
            let same = canonical_divergence(&chart, &a, &a);
            assert!(same.abs() <= 1e-15);
            if a.iter().zip(&b).any(|(x, y)| (x - y).abs() > 1e-8) {
                assert!(d > 0.0);
            }
        }
    }

    #[test]
    fn pythagoras_quadratic_corner() {
        let psi = Quadratic::unit(2);
        let chart = DuallyFlatChart::new(&psi);
        let r = pythagoras_check(&chart, &[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(r <= 1e-10);
        let d31 = canonical_divergence(&chart, &[1.0, 1.0], &[0.0, 0.0]);
        assert!((d31 - 1.0).abs() < 1e-14); // 1.0 = 0.5 + 0.5
    }

    #[test]
    fn pythagoras_degenerate_corner() {
        let psi = Quadratic::unit(2);
        let chart = DuallyFlatChart::new(&psi);
        let r = pythagoras_check(&chart, &[0.3, -0.4], &[0.9, 0.1], &[0.9, 0.1]).unwrap();
        assert!(r <= 1e-12);
    }

    #[test]
    fn pythagoras_quartic_separable_corner() {
        // axis-aligned corner: the y-leg moves only along axis 0, the x-leg
        // only along axis 1; orthogonality is exact
        let psi = AxisPoly {
            coeffs: vec![
                vec![0.0, 0.0, 0.5, 0.0, 0.25],
                vec![0.0, 0.0, 0.5, 0.0, 0.1],
            ],
        };
        let chart = DuallyFlatChart::new(&psi);
        let xi_p = [0.2, 0.5];
        let xi_d = [1.0, 0.5];
        let xi_t = [1.0, 1.3];
        let r = pythagoras_check(&chart, &xi_p, &xi_d, &xi_t).unwrap();
        assert!(r <= 1e-9, "residual {r:e}");
    }

    #[test]
    fn pythagoras_rejects_skew_corners() {
        let psi = Quadratic::unit(2);
        let chart = DuallyFlatChart::new(&psi);
        let err = pythagoras_check(&chart, &[0.0, 0.0], &[1.0, 0.0], &[2.0, 1.0]);
        assert!(matches!(err, Err(Error::NotOrthogonal(_))));
    }
}
