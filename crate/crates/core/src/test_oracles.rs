//! Independent numerical oracles used only by the test suite.
//!
//! Nothing here shares a code path with the implementations under test:
//! moments come from composite Simpson in a transformed variable (or from
//! closed forms), and orthonormal polynomials are rebuilt from monomials by
//! modified Gram-Schmidt in a Chebyshev representation.

use crate::measures::{MeasureFamily1D, MeasureKind};

/// Composite Simpson on [a, b] with `panels` panels (must be even-friendly).
pub fn composite_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2) & !1; // even
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    acc * h / 3.0
}

/// Closed-form monomial moments where available: standard Gaussian
/// (double factorial) and unit exponential (factorial).
pub fn closed_form_moment(fam: &MeasureFamily1D, j: usize) -> Option<f64> {
    match fam.kind() {
        MeasureKind::Gaussian => {
            if j % 2 == 1 {
                Some(0.0)
            } else {
                let mut v = 1.0;
                let mut k = j as i64 - 1;
                while k > 1 {
                    v *= k as f64;
                    k -= 2;
                }
                Some(v)
            }
        }
        MeasureKind::Exponential => {
            let mut v = 1.0;
            for k in 1..=j {
                v *= k as f64;
            }
            Some(v)
        }
        _ => None,
    }
}

/// Monomial moment of a Jacobi family by composite Simpson in theta-space.
///
/// With x = cos(theta) the weight becomes
/// 2^{a+b+1} sin^{2a+1}(theta/2) cos^{2b+1}(theta/2), smooth for a, b >= -1/2.
pub fn composite_moment_oracle(fam: &MeasureFamily1D, j: usize) -> f64 {
    let MeasureKind::Jacobi { alpha, beta } = fam.kind() else {
        panic!("composite_moment_oracle only handles Jacobi families");
    };
    assert!(
        alpha >= -0.5 && beta >= -0.5,
        "theta-space oracle needs alpha, beta >= -1/2"
    );
    let ln_c = -((alpha + beta + 1.0) * std::f64::consts::LN_2
        + libm::lgamma(alpha + 1.0)
        + libm::lgamma(beta + 1.0)
        - libm::lgamma(alpha + beta + 2.0));
    let scale = (ln_c + (alpha + beta + 1.0) * std::f64::consts::LN_2).exp();
    let f = |theta: f64| {
        let half = 0.5 * theta;
        let s = half.sin();
        let c = half.cos();
        let w = s.powf(2.0 * alpha + 1.0) * c.powf(2.0 * beta + 1.0);
        theta.cos().powi(j as i32) * w
    };
    scale * composite_simpson(&f, 0.0, std::f64::consts::PI, 50_000)
}

/// Two-sided Kolmogorov-Smirnov statistic of a sorted sample against `cdf`.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max((f - (i as f64 + 1.0) / n).abs());
    }
    d
}

/// Orthonormal polynomials rebuilt from the monomial sequence by modified
/// Gram-Schmidt on value vectors at Gauss nodes (the discrete inner
/// product is exact for the degrees involved), evaluated off the grid by
/// barycentric interpolation. Value space keeps the construction well
/// conditioned even for Hermite/Laguerre, where the polynomials span many
/// orders of magnitude across the node range.
pub struct GsBasis {
    nodes: Vec<f64>,
    ln_bary: Vec<f64>,
    bary_sign: Vec<f64>,
    psi_values: Vec<Vec<f64>>, // psi_values[i][k] = psi_i(nodes[k])
    condition: Vec<f64>,       // cancellation factor of the degree-i projection step
}

impl GsBasis {
    pub fn build(fam: &MeasureFamily1D, max_degree: usize) -> Self {
        let q = (2 * max_degree + 24).max(64);
        let rule = fam.gauss_rule(q).expect("quadrature for GS oracle");
        let inner = |u: &[f64], v: &[f64]| -> f64 {
            rule.weights
                .iter()
                .zip(u.iter().zip(v))
                .map(|(&w, (&uk, &vk))| w * uk * vk)
                .sum()
        };
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_degree + 1);
        for i in 0..=max_degree {
            let mut v: Vec<f64> = rule.nodes.iter().map(|&x| x.powi(i as i32)).collect();
            let scale = inner(&v, &v).sqrt();
            for vk in v.iter_mut() {
                *vk /= scale;
            }
            for _pass in 0..2 {
                for b in basis.iter() {
                    let r = inner(b, &v);
                    for (vk, bk) in v.iter_mut().zip(b) {
                        *vk -= r * bk;
                    }
                }
            }
            let norm = inner(&v, &v).sqrt();
            for vk in v.iter_mut() {
                *vk /= norm;
            }
            basis.push(v);
        }
        // barycentric weights in log space; signs alternate on sorted nodes
        let n = rule.nodes.len();
        let mut ln_bary = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                if j != i {
                    acc -= (rule.nodes[i] - rule.nodes[j]).abs().ln();
                }
            }
            ln_bary[i] = acc;
        }
        let max_ln = ln_bary.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for v in ln_bary.iter_mut() {
            *v -= max_ln;
        }
        let bary_sign: Vec<f64> = (0..n)
            .map(|i| if (n - 1 - i) % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        Self { nodes: rule.nodes, ln_bary, bary_sign, psi_values: basis }
    }

    pub fn eval(&self, degree: usize, x: f64) -> f64 {
        let vals = &self.psi_values[degree];
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, &xi) in self.nodes.iter().enumerate() {
            let dx = x - xi;
            if dx.abs() < 1e-300 {
                return vals[i];
            }
            let lam = self.bary_sign[i] * self.ln_bary[i].exp() / dx;
            num += lam * vals[i];
            den += lam;
        }
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_matches_polynomial_integral() {
        let f = |x: f64| x * x;
        let got = composite_simpson(&f, 0.0, 1.0, 100);
        assert!((got - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gs_basis_matches_known_legendre() {
        let gs = GsBasis::build(&MeasureFamily1D::uniform(), 3);
        // orthonormal Legendre under dx/2: psi_2(x) = sqrt(5) (3x^2-1)/2
        let x = 0.4;
        let expect = 5f64.sqrt() * (3.0 * x * x - 1.0) / 2.0;
        assert!((gs.eval(2, x) - expect).abs() < 1e-12);
        let expect3 = 7f64.sqrt() * (5.0 * x.powi(3) - 3.0 * x) / 2.0;
        assert!((gs.eval(3, x) - expect3).abs() < 1e-12);
    }
}
