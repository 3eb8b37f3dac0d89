//! Univariate measure families, tensor-product measures and Gauss quadrature.
//!
//! Every family here is a probability measure. Bounded families are the
//! Jacobi measures on (-1, 1) (uniform and both Chebyshev measures are the
//! special cases (0,0), (-1/2,-1/2) and (1/2,1/2)); the unbounded ones are
//! the standard Gaussian on R and the unit exponential on [0, inf).
//!
//! Gauss rules are produced from the three-term recurrence coefficients by
//! symmetric tridiagonal eigendecomposition and serve as the integration
//! oracle for the rest of the crate.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Default cap on materialized tensor-product quadrature nodes.
pub const TENSOR_QUADRATURE_CAP: usize = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasureKind {
    /// Density c_{a,b} (1-x)^a (1+x)^b on (-1, 1), a, b > -1.
    Jacobi { alpha: f64, beta: f64 },
    /// Density (2 pi)^{-1/2} e^{-x^2/2} on R.
    Gaussian,
    /// Density e^{-x} on [0, inf).
    Exponential,
}

/// A univariate probability measure with its orthonormal-polynomial data.
///
/// Cheap to clone; the lazily built CDF table used by the generic Jacobi
/// sampler is shared between clones.
#[derive(Clone, Debug)]
pub struct MeasureFamily1D {
    kind: MeasureKind,
    rho_cdf: Arc<OnceLock<CdfTable>>,
}

impl PartialEq for MeasureFamily1D {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl MeasureFamily1D {
    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0) || !(beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Jacobi parameters must be finite and > -1, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Self::from_kind(MeasureKind::Jacobi { alpha, beta }))
    }

    pub fn uniform() -> Self {
        Self::from_kind(MeasureKind::Jacobi { alpha: 0.0, beta: 0.0 })
    }

    pub fn chebyshev_first() -> Self {
        Self::from_kind(MeasureKind::Jacobi { alpha: -0.5, beta: -0.5 })
    }

    pub fn chebyshev_second() -> Self {
        Self::from_kind(MeasureKind::Jacobi { alpha: 0.5, beta: 0.5 })
    }

    pub fn gaussian() -> Self {
        Self::from_kind(MeasureKind::Gaussian)
    }

    pub fn exponential() -> Self {
        Self::from_kind(MeasureKind::Exponential)
    }

    fn from_kind(kind: MeasureKind) -> Self {
        Self { kind, rho_cdf: Arc::new(OnceLock::new()) }
    }

    /// Parses a family spec: `uniform`, `chebyshev1`, `chebyshev2`,
    /// `jacobi:a:b`, `gaussian`, `exponential`.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        match s {
            "uniform" | "legendre" => Ok(Self::uniform()),
            "chebyshev1" => Ok(Self::chebyshev_first()),
            "chebyshev2" => Ok(Self::chebyshev_second()),
            "gaussian" | "hermite" => Ok(Self::gaussian()),
            "exponential" | "laguerre" => Ok(Self::exponential()),
            _ => {
                if let Some(rest) = s.strip_prefix("jacobi:") {
                    let parts: Vec<&str> = rest.split(':').collect();
                    if parts.len() != 2 {
                        return Err(Error::Parse(format!(
                            "expected jacobi:alpha:beta, got `{s}`"
                        )));
                    }
                    let alpha: f64 = parts[0]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad alpha in `{s}`")))?;
                    let beta: f64 = parts[1]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad beta in `{s}`")))?;
                    Self::jacobi(alpha, beta)
                } else {
                    Err(Error::UnknownName(s.to_string()))
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            MeasureKind::Jacobi { alpha, beta } => {
                if alpha == 0.0 && beta == 0.0 {
                    "uniform".to_string()
                } else if alpha == -0.5 && beta == -0.5 {
                    "chebyshev1".to_string()
                } else if alpha == 0.5 && beta == 0.5 {
                    "chebyshev2".to_string()
                } else {
                    format!("jacobi:{alpha}:{beta}")
                }
            }
            MeasureKind::Gaussian => "gaussian".to_string(),
            MeasureKind::Exponential => "exponential".to_string(),
        }
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    /// Support as an interval; unbounded ends are +-infinity.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            MeasureKind::Jacobi { .. } => (-1.0, 1.0),
            MeasureKind::Gaussian => (f64::NEG_INFINITY, f64::INFINITY),
            MeasureKind::Exponential => (0.0, f64::INFINITY),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.kind, MeasureKind::Jacobi { .. })
    }

    /// Membership in the closure of the support.
    pub fn contains(&self, x: f64) -> bool {
        let (a, b) = self.support();
        x >= a && x <= b && x.is_finite()
    }

    /// Probability density at `x`.
    ///
    /// For Jacobi families with a negative exponent the corresponding
    /// endpoint is excluded (the density diverges there).
    pub fn density(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Domain(format!(
                "x = {x} outside the support of {}",
                self.name()
            )));
        }
        match self.kind {
            MeasureKind::Jacobi { alpha, beta } => {
                if (alpha < 0.0 && x == 1.0) || (beta < 0.0 && x == -1.0) {
                    return Err(Error::Domain(format!(
                        "density of {} diverges at x = {x}",
                        self.name()
                    )));
                }
                let mut ln = ln_jacobi_norm(alpha, beta);
                if alpha != 0.0 {
                    ln += alpha * (1.0 - x).ln();
                }
                if beta != 0.0 {
                    ln += beta * (1.0 + x).ln();
                }
                Ok(ln.exp())
            }
            MeasureKind::Gaussian => Ok((-0.5 * x * x).exp() / (2.0 * PI).sqrt()),
            MeasureKind::Exponential => Ok((-x).exp()),
        }
    }

    /// Cumulative distribution function.
    ///
    /// Closed forms where available; general Jacobi goes through the
    /// tabulated CDF (interpolation residual below 1e-9).
    pub fn cdf(&self, x: f64) -> Result<f64> {
        match self.kind {
            MeasureKind::Jacobi { alpha, beta } => {
                if x <= -1.0 {
                    return Ok(0.0);
                }
                if x >= 1.0 {
                    return Ok(1.0);
                }
                if alpha == 0.0 && beta == 0.0 {
                    Ok((x + 1.0) / 2.0)
                } else if alpha == -0.5 && beta == -0.5 {
                    Ok(1.0 - x.acos() / PI)
                } else {
                    Ok(self.rho_table()?.cdf_at(x))
                }
            }
            MeasureKind::Gaussian => Ok(0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)),
            MeasureKind::Exponential => Ok(if x <= 0.0 { 0.0 } else { 1.0 - (-x).exp() }),
        }
    }

    /// Coefficients of the orthonormal three-term recurrence
    /// `sqrt(b_{k+1}) psi_{k+1}(x) = (x - a_k) psi_k(x) - sqrt(b_k) psi_{k-1}(x)`,
    /// with `b_0 = 1`.
    pub fn recurrence_coeffs(&self, k: usize) -> (f64, f64) {
        match self.kind {
            MeasureKind::Jacobi { alpha, beta } => jacobi_recurrence(alpha, beta, k),
            MeasureKind::Gaussian => (0.0, if k == 0 { 1.0 } else { k as f64 }),
            MeasureKind::Exponential => {
                let kf = k as f64;
                (2.0 * kf + 1.0, if k == 0 { 1.0 } else { kf * kf })
            }
        }
    }

    /// q-node Gauss rule; exact for polynomials of degree <= 2q-1 against
    /// this measure. Weights are positive and sum to one.
    pub fn gauss_rule(&self, q: usize) -> Result<QuadratureRule> {
        if q == 0 {
            return Err(Error::InvalidParameter("gauss rule needs q >= 1".into()));
        }
        let mut diag = Vec::with_capacity(q);
        let mut off = Vec::with_capacity(q);
        for k in 0..q {
            let (a, b) = self.recurrence_coeffs(k);
            diag.push(a);
            if k > 0 {
                off.push(b.sqrt());
            }
        }
        off.push(0.0);
        let (nodes_raw, first_components) =
            tridiag_eigen_first_row(&mut diag, &mut off).map_err(|_| {
                Error::Numerical(format!(
                    "eigendecomposition of the {q}-node Jacobi matrix for {} did not converge",
                    self.name()
                ))
            })?;
        let (lo, hi) = self.support();
        let nodes: Vec<f64> = nodes_raw.iter().map(|&x| x.clamp(lo, hi)).collect();
        let weights: Vec<f64> = first_components.iter().map(|&z| z * z).collect();
        Ok(QuadratureRule { nodes, weights, exactness_degree: 2 * q - 1 })
    }

    /// One draw from the measure. Deterministic given the generator state.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self.kind {
            MeasureKind::Jacobi { alpha, beta } => {
                if alpha == 0.0 && beta == 0.0 {
                    2.0 * rng.gen::<f64>() - 1.0
                } else if alpha == -0.5 && beta == -0.5 {
                    (PI * rng.gen::<f64>()).cos()
                } else {
                    let table = self
                        .rho_table()
                        .expect("CDF tabulation failed for a valid Jacobi family");
                    table.invert(rng.gen::<f64>())
                }
            }
            MeasureKind::Gaussian => StandardNormal.sample(rng),
            MeasureKind::Exponential => Exp1.sample(rng),
        }
    }

    fn rho_table(&self) -> Result<&CdfTable> {
        if let Some(t) = self.rho_cdf.get() {
            return Ok(t);
        }
        let table = tabulate_weighted_cdf(self, &|_| 1.0, 0, 1e-9, 2048, 32768)?;
        Ok(self.rho_cdf.get_or_init(|| table))
    }
}

fn jacobi_recurrence(alpha: f64, beta: f64, k: usize) -> (f64, f64) {
    let s = alpha + beta;
    if k == 0 {
        return ((beta - alpha) / (s + 2.0), 1.0);
    }
    let kf = k as f64;
    let denom = (2.0 * kf + s) * (2.0 * kf + s + 2.0);
    let a = if alpha == beta { 0.0 } else { (beta * beta - alpha * alpha) / denom };
    let b = if k == 1 {
        4.0 * (alpha + 1.0) * (beta + 1.0) / ((s + 2.0) * (s + 2.0) * (s + 3.0))
    } else {
        4.0 * kf * (kf + alpha) * (kf + beta) * (kf + s)
            / ((2.0 * kf + s) * (2.0 * kf + s) * (2.0 * kf + s + 1.0) * (2.0 * kf + s - 1.0))
    };
    (a, b)
}

/// Implicit-shift QL for a symmetric tridiagonal matrix that carries only
/// the first row of the eigenvector matrix (the classical IMTQLX routine
/// behind Golub-Welsch). Unlike a general-purpose eigensolver it keeps the
/// tiny first components -- and hence the small Gauss weights of unbounded
/// measures -- to good relative accuracy.
///
/// `diag` holds the diagonal, `off` the off-diagonal (its last slot is
/// scratch). Returns eigenvalues in ascending order with the matching
/// first components.
fn tridiag_eigen_first_row(
    diag: &mut [f64],
    off: &mut [f64],
) -> std::result::Result<(Vec<f64>, Vec<f64>), ()> {
    let n = diag.len();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    if n > 1 {
        off[n - 1] = 0.0;
        let prec = f64::EPSILON;
        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m < n - 1 && off[m].abs() > prec * (diag[m].abs() + diag[m + 1].abs()) {
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > 100 {
                    return Err(());
                }
                let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
                let mut r = (g * g + 1.0).sqrt();
                let signed_r = if g >= 0.0 { r } else { -r };
                g = diag[m] - diag[l] + off[l] / (g + signed_r);
                let mut s = 1.0;
                let mut c = 1.0;
                let mut p = 0.0;
                for i in (l..m).rev() {
                    let mut f = s * off[i];
                    let b = c * off[i];
                    if g.abs() <= f.abs() {
                        c = g / f;
                        r = (c * c + 1.0).sqrt();
                        off[i + 1] = f * r;
                        s = 1.0 / r;
                        c *= s;
                    } else {
                        s = f / g;
                        r = (s * s + 1.0).sqrt();
                        off[i + 1] = g * r;
                        c = 1.0 / r;
                        s *= c;
                    }
                    g = diag[i + 1] - p;
                    r = (diag[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    diag[i + 1] = g + p;
                    g = c * r - b;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                diag[l] -= p;
                off[l] = g;
                off[m] = 0.0;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let first: Vec<f64> = order.iter().map(|&i| z[i]).collect();
    Ok((eigenvalues, first))
}

/// ln of the Jacobi normalization constant c_{a,b} = 1 / (2^{a+b+1} B(a+1, b+1)).
fn ln_jacobi_norm(alpha: f64, beta: f64) -> f64 {
    let ln_beta_fn = libm::lgamma(alpha + 1.0) + libm::lgamma(beta + 1.0)
        - libm::lgamma(alpha + beta + 2.0);
    -((alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_beta_fn)
}

/// A Gauss rule for one measure family.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Tensor product of univariate families; the product density on the
/// product domain.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorMeasure {
    factors: Vec<MeasureFamily1D>,
}

impl TensorMeasure {
    pub fn new(factors: Vec<MeasureFamily1D>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("tensor measure needs d >= 1".into()));
        }
        Ok(Self { factors })
    }

    /// One family replicated across `dim` coordinates.
    pub fn isotropic(factor: MeasureFamily1D, dim: usize) -> Result<Self> {
        Self::new(vec![factor; dim.max(1)])
    }

    /// Parses either a single family spec (replicated to `dim`) or a
    /// comma-separated list of per-coordinate specs.
    pub fn from_spec(spec: &str, dim: usize) -> Result<Self> {
        if spec.contains(',') {
            let factors = spec
                .split(',')
                .map(MeasureFamily1D::parse)
                .collect::<Result<Vec<_>>>()?;
            if dim != 0 && factors.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: factors.len() });
            }
            Self::new(factors)
        } else {
            Self::isotropic(MeasureFamily1D::parse(spec)?, dim.max(1))
        }
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[MeasureFamily1D] {
        &self.factors
    }

    pub fn factor(&self, k: usize) -> &MeasureFamily1D {
        &self.factors[k]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.factors).all(|(&xi, f)| f.contains(xi))
    }

    pub fn density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let mut p = 1.0;
        for (xi, f) in x.iter().zip(&self.factors) {
            p *= f.density(*xi)?;
        }
        Ok(p)
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.factors.iter().map(|f| f.sample(rng)).collect()
    }

    pub fn sample_many(&self, m: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = rng_from_seed(seed);
        (0..m).map(|_| self.sample(&mut rng)).collect()
    }

    /// Materialized tensor Gauss rule with `q` nodes per coordinate.
    pub fn tensor_gauss(&self, q_per_dim: usize) -> Result<TensorQuadrature> {
        let d = self.dim();
        let total = q_per_dim
            .checked_pow(d as u32)
            .filter(|&t| t <= TENSOR_QUADRATURE_CAP)
            .ok_or(Error::QuadratureTooLarge {
                requested: q_per_dim.saturating_pow(d as u32),
                cap: TENSOR_QUADRATURE_CAP,
            })?;
        let rules = self
            .factors
            .iter()
            .map(|f| f.gauss_rule(q_per_dim))
            .collect::<Result<Vec<_>>>()?;
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut counter = vec![0usize; d];
        loop {
            let mut x = Vec::with_capacity(d);
            let mut w = 1.0;
            for (k, &i) in counter.iter().enumerate() {
                x.push(rules[k].nodes[i]);
                w *= rules[k].weights[i];
            }
            nodes.push(x);
            weights.push(w);
            // odometer increment
            let mut k = 0;
            loop {
                if k == d {
                    return Ok(TensorQuadrature { nodes, weights });
                }
                counter[k] += 1;
                if counter[k] < q_per_dim {
                    break;
                }
                counter[k] = 0;
                k += 1;
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct TensorQuadrature {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl TensorQuadrature {
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, &w)| w * f(x))
            .sum()
    }
}

// ---------------------------------------------------------------------------
// Tabulated CDFs with monotone cubic (Fritsch-Carlson) interpolation.
// ---------------------------------------------------------------------------

/// Tabulated CDF of a density `extra(x) * rho(x)` together with a monotone
/// cubic interpolant; supports forward evaluation and inversion.
#[derive(Clone, Debug)]
pub struct CdfTable {
    xs: Vec<f64>,
    cdf: Vec<f64>,
    slopes: Vec<f64>,
}

impl CdfTable {
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn cdf_values(&self) -> &[f64] {
        &self.cdf
    }

    pub fn cdf_at(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[n - 1] {
            return 1.0;
        }
        let i = match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        self.eval_segment(i, x)
    }

    /// Inverse CDF. `u` outside [0, 1] is clamped to the support endpoints.
    pub fn invert(&self, u: f64) -> f64 {
        let n = self.xs.len();
        if u <= 0.0 {
            return self.xs[0];
        }
        if u >= 1.0 {
            return self.xs[n - 1];
        }
        // first segment whose right endpoint reaches u
        let mut i = match self.cdf.partition_point(|&v| v < u) {
            0 => 0,
            p => p - 1,
        };
        i = i.min(n - 2);
        // skip mass-free segments
        while i + 1 < n - 1 && self.cdf[i + 1] <= u && self.cdf[i + 1] == self.cdf[i] {
            i += 1;
        }
        let (mut lo, mut hi) = (self.xs[i], self.xs[i + 1]);
        let (clo, chi) = (self.cdf[i], self.cdf[i + 1]);
        if chi <= clo {
            return hi;
        }
        let mut x = lo + (hi - lo) * (u - clo) / (chi - clo);
        for _ in 0..64 {
            let f = self.eval_segment(i, x) - u;
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let df = self.eval_segment_deriv(i, x);
            let mut step_ok = false;
            if df > 0.0 {
                let xn = x - f / df;
                if xn > lo && xn < hi {
                    x = xn;
                    step_ok = true;
                }
            }
            if !step_ok {
                x = 0.5 * (lo + hi);
            }
            if (hi - lo) <= 1e-15 * (1.0 + x.abs()) || f.abs() <= 1e-15 {
                break;
            }
        }
        x
    }

    fn eval_segment(&self, i: usize, x: f64) -> f64 {
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.cdf[i], self.cdf[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + h * d0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + h * d1 * (t3 - t2)
    }

    fn eval_segment_deriv(&self, i: usize, x: f64) -> f64 {
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.cdf[i], self.cdf[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        (y0 * (6.0 * t2 - 6.0 * t)
            + h * d0 * (3.0 * t2 - 4.0 * t + 1.0)
            + y1 * (6.0 * t - 6.0 * t2)
            + h * d1 * (3.0 * t2 - 2.0 * t))
            / h
    }
}

/// Fritsch-Carlson slopes for monotone data.
fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut d = vec![0.0; n];
    if n < 2 {
        return d;
    }
    let h: Vec<f64> = (0..n - 1).map(|i| xs[i + 1] - xs[i]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    for i in 1..n - 1 {
        if delta[i - 1] <= 0.0 || delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    let one_sided = |h0: f64, h1: f64, d0: f64, d1: f64| -> f64 {
        let val = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if val * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && val.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            val
        }
    };
    if n >= 3 {
        d[0] = one_sided(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = one_sided(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    } else {
        d[0] = delta[0];
        d[1] = delta[0];
    }
    d
}

fn gl24() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| {
        MeasureFamily1D::uniform()
            .gauss_rule(24)
            .expect("24-node Gauss-Legendre rule")
    })
}

/// Integral of `f` over [a, b] with the 24-node Gauss-Legendre rule.
///
/// The uniform family's rule represents dx/2, hence the (b - a) factor.
fn gl_segment(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let rule = gl24();
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * f(c + r * s);
    }
    (b - a) * acc
}

/// Builds the CDF of the density `extra(x) * rho(x)` on a tabulation grid.
///
/// `extra` must be nonnegative and integrate (against rho) to one;
/// `degree_hint` is the polynomial degree of `extra` and sizes the grid for
/// unbounded supports and the endpoint quadratures for Jacobi weights.
/// The table is refined (up to `max_points` grid points) until the monotone
/// cubic interpolant reproduces midpoint CDF values to `residual_target`.
pub(crate) fn tabulate_weighted_cdf(
    fam: &MeasureFamily1D,
    extra: &dyn Fn(f64) -> f64,
    degree_hint: u32,
    residual_target: f64,
    initial_points: usize,
    max_points: usize,
) -> Result<CdfTable> {
    let mut n = initial_points.max(64);
    loop {
        let xs = tabulation_grid(fam, degree_hint, n);
        let mut increments = Vec::with_capacity(xs.len() - 1);
        for i in 0..xs.len() - 1 {
            let v = segment_mass(fam, extra, degree_hint, xs[i], xs[i + 1])?;
            increments.push(v.max(0.0));
        }
        let total: f64 = increments.iter().sum();
        if !(total.is_finite() && (total - 1.0).abs() < 1e-4) {
            return Err(Error::Numerical(format!(
                "CDF tabulation for {} integrated to {total:.6e} instead of 1",
                fam.name()
            )));
        }
        let mut cdf = Vec::with_capacity(xs.len());
        cdf.push(0.0);
        let mut acc = 0.0;
        for v in &increments {
            acc += v;
            cdf.push(acc / total);
        }
        *cdf.last_mut().unwrap() = 1.0;
        let slopes = pchip_slopes(&xs, &cdf);
        let table = CdfTable { xs, cdf, slopes };

        // probe interpolation residual at segment midpoints
        let stride = ((table.xs.len() - 1) / 64).max(1);
        let mut max_resid: f64 = 0.0;
        for i in (0..table.xs.len() - 1).step_by(stride) {
            let mid = 0.5 * (table.xs[i] + table.xs[i + 1]);
            if mid <= table.xs[i] || mid >= table.xs[i + 1] {
                continue;
            }
            let half = segment_mass(fam, extra, degree_hint, table.xs[i], mid)?;
            let exact = (table.cdf[i] * total + half.max(0.0)) / total;
            max_resid = max_resid.max((table.cdf_at(mid) - exact).abs());
        }
        if max_resid <= residual_target || 2 * n >= max_points {
            if max_resid > residual_target.max(1e-6) {
                return Err(Error::Numerical(format!(
                    "CDF tabulation for {} stalled at residual {max_resid:.3e}",
                    fam.name()
                )));
            }
            return Ok(table);
        }
        n *= 2;
    }
}

fn tabulation_grid(fam: &MeasureFamily1D, degree_hint: u32, n: usize) -> Vec<f64> {
    let j = degree_hint as f64;
    match fam.kind() {
        MeasureKind::Jacobi { .. } => (0..=n)
            .map(|i| -(PI * i as f64 / n as f64).cos())
            .map(|x| x.clamp(-1.0, 1.0))
            .collect(),
        MeasureKind::Gaussian => {
            let x_max = (4.0 * j + 2.0).sqrt() + 10.0;
            (0..=n)
                .map(|i| -x_max + 2.0 * x_max * i as f64 / n as f64)
                .collect()
        }
        MeasureKind::Exponential => {
            let x_max = 4.0 * j + 20.0 * (j + 1.0).sqrt() + 30.0;
            (0..=n)
                .map(|i| {
                    let t = i as f64 / n as f64;
                    x_max * t * t
                })
                .collect()
        }
    }
}

/// Mass of `extra * rho` on [a, b].
///
/// Interior segments use Gauss-Legendre; segments touching a Jacobi
/// endpoint absorb the singular weight factor into a mapped Gauss-Jacobi
/// rule so negative exponents are integrated exactly.
fn segment_mass(
    fam: &MeasureFamily1D,
    extra: &dyn Fn(f64) -> f64,
    degree_hint: u32,
    a: f64,
    b: f64,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    match fam.kind() {
        MeasureKind::Jacobi { alpha, beta } => {
            let q_end = degree_hint as usize + 16;
            if a <= -1.0 {
                // weight (1+x)^beta handled by Gauss-Jacobi(0, beta)
                let rule_fam = MeasureFamily1D::jacobi(0.0, beta)?;
                let rule = rule_fam.gauss_rule(q_end)?;
                let ln_c0b = ln_jacobi_norm(0.0, beta);
                let ln_cab = ln_jacobi_norm(alpha, beta);
                let half = 0.5 * (b + 1.0);
                let mut acc = 0.0;
                for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let x = -1.0 + half * (s + 1.0);
                    let smooth = if alpha == 0.0 { 1.0 } else { (1.0 - x).powf(alpha) };
                    acc += w * extra(x) * smooth;
                }
                Ok(acc * half.powf(beta + 1.0) * (ln_cab - ln_c0b).exp())
            } else if b >= 1.0 {
                let rule_fam = MeasureFamily1D::jacobi(alpha, 0.0)?;
                let rule = rule_fam.gauss_rule(q_end)?;
                let ln_ca0 = ln_jacobi_norm(alpha, 0.0);
                let ln_cab = ln_jacobi_norm(alpha, beta);
                let half = 0.5 * (1.0 - a);
                let mut acc = 0.0;
                for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let x = 1.0 - half * (1.0 - s);
                    let smooth = if beta == 0.0 { 1.0 } else { (1.0 + x).powf(beta) };
                    acc += w * extra(x) * smooth;
                }
                Ok(acc * half.powf(alpha + 1.0) * (ln_cab - ln_ca0).exp())
            } else {
                let f = |x: f64| extra(x) * fam.density(x).unwrap_or(0.0);
                Ok(gl_segment(&f, a, b))
            }
        }
        _ => {
            let f = |x: f64| extra(x) * fam.density(x).unwrap_or(0.0);
            Ok(gl_segment(&f, a, b))
        }
    }
}
