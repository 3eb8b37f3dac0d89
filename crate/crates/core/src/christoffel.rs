//! The (reciprocal) Christoffel function, sampling weights and the
//! sample-complexity constant kappa_w.
//!
//! K(x) = sum_i |phi_i(x)|^2 over any orthonormal basis of the space;
//! kappa_w is the essential supremum of w(x) K(x), which multiplies the
//! log factor in the sample-complexity bound and satisfies kappa_w >= n
//! for every weight function.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index_sets::IndexSet;
use crate::orthopoly::OrthoBasis;

/// Weight function attached to sample points.
///
/// `MonteCarlo` is the unweighted case w = 1. `OptimalInverse` is
/// w(x) = n / K(x), optimal in the sense kappa_w = n. `Regularized(theta)`
/// is w(x) = (theta + (1-theta) K(x)/n)^{-1}, bounded by 1/theta, with
/// kappa_w <= n/(1-theta); theta = 1/2 is the default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightSpec {
    MonteCarlo,
    OptimalInverse,
    Regularized { theta: f64 },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Regularized { theta: 0.5 }
    }
}

impl WeightSpec {
    pub fn regularized(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "regularization theta must lie in (0,1), got {theta}"
            )));
        }
        Ok(WeightSpec::Regularized { theta })
    }

    /// Parses `mc`, `opt` or `reg:theta` (bare `reg` means theta = 1/2).
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "mc" => Ok(WeightSpec::MonteCarlo),
            "opt" => Ok(WeightSpec::OptimalInverse),
            "reg" => Ok(WeightSpec::default()),
            other => {
                if let Some(t) = other.strip_prefix("reg:") {
                    let theta: f64 = t
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad theta in `{other}`")))?;
                    Self::regularized(theta)
                } else {
                    Err(Error::UnknownName(format!("weight spec `{other}`")))
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            WeightSpec::MonteCarlo => "mc".into(),
            WeightSpec::OptimalInverse => "opt".into(),
            WeightSpec::Regularized { theta } => format!("reg:{theta}"),
        }
    }

    /// Weight value as a function of K(x) and n.
    pub fn weight_from_k(&self, k: f64, n: usize) -> Result<f64> {
        match *self {
            WeightSpec::MonteCarlo => Ok(1.0),
            WeightSpec::OptimalInverse => {
                if k <= 0.0 {
                    Err(Error::SingularWeight)
                } else {
                    Ok(n as f64 / k)
                }
            }
            WeightSpec::Regularized { theta } => {
                Ok(1.0 / (theta + (1.0 - theta) * k / n as f64))
            }
        }
    }

    /// Density of the matched sampling measure relative to the base
    /// measure: nu(x) = 1/w(x) evaluated from K(x).
    pub fn nu_from_k(&self, k: f64, n: usize) -> f64 {
        match *self {
            WeightSpec::MonteCarlo => 1.0,
            WeightSpec::OptimalInverse => k / n as f64,
            WeightSpec::Regularized { theta } => theta + (1.0 - theta) * k / n as f64,
        }
    }
}

/// K(x) = sum over the basis of Psi_nu(x)^2.
pub fn christoffel_k(basis: &OrthoBasis, x: &[f64]) -> Result<f64> {
    let row = basis.eval_row(x)?;
    Ok(row.iter().map(|v| v * v).sum())
}

/// w(x) under the given spec.
pub fn weight(basis: &OrthoBasis, spec: WeightSpec, x: &[f64]) -> Result<f64> {
    let k = christoffel_k(basis, x)?;
    spec.weight_from_k(k, basis.n())
}

/// Search grid for the supremum of w * K.
#[derive(Clone, Copy, Debug)]
pub enum GridSpec {
    /// 10x oversampling of the maximal degree per coordinate.
    Auto,
    PerDim(usize),
}

#[derive(Clone, Debug)]
pub struct KappaEstimate {
    pub value: f64,
    pub argmax: Vec<f64>,
}

/// Numerical supremum of w(x) K(x) over a tensor search grid, polished by
/// coordinate-wise golden-section ascent around the grid argmax.
///
/// Bounded coordinates use Chebyshev-density grids (Christoffel maxima of
/// Jacobi families sit at the boundary); unbounded coordinates search over
/// high-order Gauss nodes. Monte Carlo weights over an unbounded factor
/// have an unbounded supremum; that case returns `f64::INFINITY`.
pub fn kappa_w(basis: &OrthoBasis, spec: WeightSpec, grid: GridSpec) -> Result<KappaEstimate> {
    let n = basis.n();
    let unbounded = basis
        .measure()
        .factors()
        .iter()
        .any(|f| !f.is_bounded());
    if unbounded && spec == WeightSpec::MonteCarlo {
        // polynomials are not uniformly bounded there
        let coords = grid_coordinates(basis, grid)?;
        let (_, argmax) = grid_supremum(basis, spec, &coords)?;
        return Ok(KappaEstimate { value: f64::INFINITY, argmax });
    }
    let coords = grid_coordinates(basis, grid)?;
    let (mut best, mut x) = grid_supremum(basis, spec, &coords)?;

    let objective = |x: &[f64]| -> f64 {
        let k = christoffel_k(basis, x).unwrap_or(f64::NAN);
        spec.weight_from_k(k, n).map(|w| w * k).unwrap_or(f64::NAN)
    };
    // two rounds of coordinate-wise golden section around the argmax cell
    for _ in 0..2 {
        for dim in 0..basis.dim() {
            let c = &coords[dim];
            let pos = c.partition_point(|&v| v < x[dim]).min(c.len() - 1);
            let lo = c[pos.saturating_sub(1)];
            let hi = c[(pos + 1).min(c.len() - 1)];
            if hi <= lo {
                continue;
            }
            let (v, xi) = golden_section_max(
                |t| {
                    let mut y = x.clone();
                    y[dim] = t;
                    objective(&y)
                },
                lo,
                hi,
            );
            if v > best {
                best = v;
                x[dim] = xi;
            }
        }
    }
    Ok(KappaEstimate { value: best, argmax: x })
}

/// Asserts the universal lower bound kappa_w >= n (within 1e-6 relative).
pub fn kappa_lower_bound_check(basis: &OrthoBasis, spec: WeightSpec) -> Result<bool> {
    let est = kappa_w(basis, spec, GridSpec::Auto)?;
    let n = basis.n() as f64;
    Ok(est.value >= n - 1e-6 * n)
}

/// Supremum of K over the corner for tensor Legendre spaces:
/// K(1,...,1) = sum_{nu in S} prod_k (2 nu_k + 1). For lower sets this is
/// the global maximum and is bounded by n^2.
pub fn legendre_lower_set_kappa(index_set: &IndexSet) -> f64 {
    index_set
        .iter()
        .map(|idx| {
            idx.components()
                .iter()
                .map(|&nu| 2.0 * nu as f64 + 1.0)
                .product::<f64>()
        })
        .sum()
}

/// Lower-set bound for tensor Chebyshev (first kind) spaces: n^{log 3 / log 2}.
pub fn chebyshev_lower_set_bound(n: usize) -> f64 {
    (n as f64).powf(3f64.ln() / 2f64.ln())
}

fn grid_coordinates(basis: &OrthoBasis, grid: GridSpec) -> Result<Vec<Vec<f64>>> {
    let mut coords = Vec::with_capacity(basis.dim());
    for (fam, &deg) in basis.measure().factors().iter().zip(basis.max_degree_per_dim()) {
        let g = match grid {
            GridSpec::Auto => 10 * (deg as usize + 1),
            GridSpec::PerDim(g) => g.max(2),
        };
        let c: Vec<f64> = if fam.is_bounded() {
            (0..g)
                .map(|i| -(std::f64::consts::PI * i as f64 / (g - 1) as f64).cos())
                .collect()
        } else {
            fam.gauss_rule(g)?.nodes
        };
        coords.push(c);
    }
    Ok(coords)
}

/// Deterministic parallel max of w*K over the tensor grid;
/// ties break toward the lowest flat index.
fn grid_supremum(
    basis: &OrthoBasis,
    spec: WeightSpec,
    coords: &[Vec<f64>],
) -> Result<(f64, Vec<f64>)> {
    let sizes: Vec<usize> = coords.iter().map(|c| c.len()).collect();
    let total: usize = sizes.iter().product();
    let n = basis.n();
    let eval = |flat: usize| -> (f64, usize) {
        let mut rem = flat;
        let mut x = Vec::with_capacity(coords.len());
        for (c, &s) in coords.iter().zip(&sizes) {
            x.push(c[rem % s]);
            rem /= s;
        }
        let k = match christoffel_k(basis, &x) {
            Ok(k) => k,
            Err(_) => return (f64::NEG_INFINITY, flat),
        };
        let v = match spec {
            // for the unbounded-MC sentinel path we still report the K argmax
            WeightSpec::MonteCarlo => k,
            _ => spec.weight_from_k(k, n).map(|w| w * k).unwrap_or(f64::NEG_INFINITY),
        };
        (v, flat)
    };
    let (best, idx) = (0..total)
        .into_par_iter()
        .map(eval)
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    if !best.is_finite() {
        return Err(Error::Numerical("grid supremum of w*K is not finite".into()));
    }
    let mut rem = idx;
    let mut x = Vec::with_capacity(coords.len());
    for (c, &s) in coords.iter().zip(&sizes) {
        x.push(c[rem % s]);
        rem /= s;
    }
    Ok((best, x))
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-12 * (1.0 + a.abs() + b.abs()) {
            break;
        }
    }
    let xm = 0.5 * (a + b);
    (f(xm).max(fc).max(fd), xm)
}
