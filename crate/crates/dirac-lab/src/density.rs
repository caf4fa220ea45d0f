//! Smooth convex densities on fiber coordinates, with analytic derivatives.
//!
//! Every consumer (contact lifts, Legendre transforms, fiber metric,
//! connections) differentiates analytically through this trait; finite
//! differences only ever appear inside test oracles.

/// A smooth function of fiber coordinates with analytic derivatives up to
/// third order.
pub trait Density: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
    fn grad(&self, x: &[f64]) -> Vec<f64>;
    fn hess(&self, x: &[f64]) -> Vec<Vec<f64>>;
    fn third(&self, x: &[f64], a: usize, b: usize, c: usize) -> f64;
}

/// `psi = sum_i c_i x_i^2`; `c = 1/2` everywhere is the unit quadratic.
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub coeffs: Vec<f64>,
}

impl Quadratic {
    pub fn unit(dim: usize) -> Quadratic {
        Quadratic {
            coeffs: vec![0.5; dim],
        }
    }
}

impl Density for Quadratic {
    fn dim(&self) -> usize {
        self.coeffs.len()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.coeffs).map(|(v, c)| c * v * v).sum()
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.coeffs).map(|(v, c)| 2.0 * c * v).collect()
    }
    fn hess(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = x.len();
        let mut h = vec![vec![0.0; n]; n];
        for i in 0..n {
            h[i][i] = 2.0 * self.coeffs[i];
        }
        h
    }
    fn third(&self, _x: &[f64], _a: usize, _b: usize, _c: usize) -> f64 {
        0.0
    }
}

/// Separable polynomial `psi = sum_a sum_k coeffs[a][k] x_a^k`.
#[derive(Debug, Clone)]
pub struct AxisPoly {
    /// `coeffs[a][k]` multiplies `x_a^k`.
    pub coeffs: Vec<Vec<f64>>,
}

impl AxisPoly {
    fn d1(&self, a: usize, x: f64) -> f64 {
        self.coeffs[a]
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64 * x.powi(k as i32 - 1))
            .sum()
    }
    fn d2(&self, a: usize, x: f64) -> f64 {
        self.coeffs[a]
            .iter()
            .enumerate()
            .skip(2)
            .map(|(k, c)| c * (k * (k - 1)) as f64 * x.powi(k as i32 - 2))
            .sum()
    }
    fn d3(&self, a: usize, x: f64) -> f64 {
        self.coeffs[a]
            .iter()
            .enumerate()
            .skip(3)
            .map(|(k, c)| c * (k * (k - 1) * (k - 2)) as f64 * x.powi(k as i32 - 3))
            .sum()
    }
}

impl Density for AxisPoly {
    fn dim(&self) -> usize {
        self.coeffs.len()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(a, &v)| {
                self.coeffs[a]
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * v.powi(k as i32))
                    .sum::<f64>()
            })
            .sum()
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        x.iter().enumerate().map(|(a, &v)| self.d1(a, v)).collect()
    }
    fn hess(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = x.len();
        let mut h = vec![vec![0.0; n]; n];
        for (a, &v) in x.iter().enumerate() {
            h[a][a] = self.d2(a, v);
        }
        h
    }
    fn third(&self, x: &[f64], a: usize, b: usize, c: usize) -> f64 {
        if a == b && b == c {
            self.d3(a, x[a])
        } else {
            0.0
        }
    }
}

/// `psi = 1/2 x^T A x + sum_a q_a x_a^4`, a non-separable convex test density.
#[derive(Debug, Clone)]
pub struct QuadraticFormPlusQuartic {
    pub a: Vec<Vec<f64>>,
    pub q: Vec<f64>,
}

impl Density for QuadraticFormPlusQuartic {
    fn dim(&self) -> usize {
        self.q.len()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let mut v = 0.0;
        for i in 0..n {
            for j in 0..n {
                v += 0.5 * self.a[i][j] * x[i] * x[j];
            }
            v += self.q[i] * x[i].powi(4);
        }
        v
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let lin: f64 = (0..n).map(|j| self.a[i][j] * x[j]).sum();
                lin + 4.0 * self.q[i] * x[i].powi(3)
            })
            .collect()
    }
    fn hess(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = x.len();
        let mut h = self.a.clone();
        for i in 0..n {
            h[i][i] += 12.0 * self.q[i] * x[i] * x[i];
        }
        h
    }
    fn third(&self, x: &[f64], a: usize, b: usize, c: usize) -> f64 {
        if a == b && b == c {
            24.0 * self.q[a] * x[a]
        } else {
            0.0
        }
    }
}
