//! Multi-index sets defining polynomial approximation spaces.
//!
//! Supported shapes: tensor product, total degree and hyperbolic cross,
//! each with an optional anisotropy vector. Sets are stored in graded
//! lexicographic order so matrix columns and CSV output are reproducible.

use crate::error::{Error, Result};

/// Default cap on the cardinality of a constructed index set.
pub const INDEX_SET_CAP: usize = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    /// Componentwise partial order.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len()
            && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexSetKind {
    TensorProduct,
    TotalDegree,
    HyperbolicCross,
    /// Compatibility shape: sum_k (nu_k + 1)^{a_k} <= p + 1. A shifted
    /// simplex rather than a cross; kept behind its own name because the
    /// two definitions circulate under the same label.
    HyperbolicCrossSum,
}

impl IndexSetKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "tp" => Ok(Self::TensorProduct),
            "td" => Ok(Self::TotalDegree),
            "hc" => Ok(Self::HyperbolicCross),
            "hc-sum" => Ok(Self::HyperbolicCrossSum),
            _ => Err(Error::UnknownName(format!("index set kind `{s}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::TensorProduct => "tp",
            Self::TotalDegree => "td",
            Self::HyperbolicCross => "hc",
            Self::HyperbolicCrossSum => "hc-sum",
        }
    }
}

/// An ordered, duplicate-free set of multi-indices of fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    dim: usize,
    indices: Vec<MultiIndex>,
}

impl IndexSet {
    /// Builds a set from arbitrary indices: validates dimensions,
    /// deduplicates and sorts into graded lexicographic order.
    pub fn from_indices(dim: usize, mut indices: Vec<MultiIndex>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("index set needs d >= 1".into()));
        }
        for idx in &indices {
            if idx.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: idx.dim() });
            }
        }
        indices.sort_by(graded_lex);
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::InvalidParameter("index set must be nonempty".into()));
        }
        Ok(Self { dim, indices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.indices.iter()
    }

    pub fn contains(&self, idx: &MultiIndex) -> bool {
        self.indices
            .binary_search_by(|probe| graded_lex(probe, idx))
            .is_ok()
    }

    /// Largest degree appearing in each coordinate.
    pub fn max_degree_per_dim(&self) -> Vec<u32> {
        let mut m = vec![0u32; self.dim];
        for idx in &self.indices {
            for (mk, &vk) in m.iter_mut().zip(idx.components()) {
                *mk = (*mk).max(vk);
            }
        }
        m
    }

    /// True iff the set is lower (downward closed): with every index it
    /// contains all componentwise-smaller ones. Checking the immediate
    /// predecessors suffices by induction.
    pub fn is_lower(&self) -> bool {
        use std::collections::HashSet;
        let set: HashSet<&[u32]> = self.indices.iter().map(|i| i.components()).collect();
        for idx in &self.indices {
            let mut probe = idx.0.clone();
            for k in 0..self.dim {
                if probe[k] == 0 {
                    continue;
                }
                probe[k] -= 1;
                if !set.contains(probe.as_slice()) {
                    return false;
                }
                probe[k] += 1;
            }
        }
        true
    }

    /// The first `n` indices in graded-lex order. Prefixes of lower sets
    /// stay lower because full total-degree layers precede partial ones.
    pub fn truncated_to(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate a set of {} indices to {n}",
                self.len()
            )));
        }
        Ok(Self { dim: self.dim, indices: self.indices[..n].to_vec() })
    }
}

/// Graded lexicographic order: by total degree, ties broken
/// lexicographically on the components.
fn graded_lex(a: &MultiIndex, b: &MultiIndex) -> std::cmp::Ordering {
    a.total_degree()
        .cmp(&b.total_degree())
        .then_with(|| a.0.cmp(&b.0))
}

/// Builds the index set of the given kind and order.
///
/// Membership rules (`a` is the anisotropy vector, ones when absent):
/// tensor product `max_k a_k nu_k <= p`; total degree `sum_k a_k nu_k <= p`;
/// hyperbolic cross `prod_k (nu_k + 1)^{a_k} <= p + 1`; and the `hc-sum`
/// compatibility shape `sum_k (nu_k + 1)^{a_k} <= p + 1`.
pub fn build_index_set(
    kind: IndexSetKind,
    d: usize,
    p: f64,
    anisotropy: Option<&[f64]>,
) -> Result<IndexSet> {
    build_index_set_with_cap(kind, d, p, anisotropy, INDEX_SET_CAP)
}

pub fn build_index_set_with_cap(
    kind: IndexSetKind,
    d: usize,
    p: f64,
    anisotropy: Option<&[f64]>,
    cap: usize,
) -> Result<IndexSet> {
    if d == 0 {
        return Err(Error::InvalidParameter("index set needs d >= 1".into()));
    }
    if !(p >= 0.0) {
        return Err(Error::InvalidParameter(format!("order p must be >= 0, got {p}")));
    }
    let a: Vec<f64> = match anisotropy {
        Some(v) => {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.len() });
            }
            if v.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::InvalidParameter(
                    "anisotropy must be positive componentwise".into(),
                ));
            }
            v.to_vec()
        }
        None => vec![1.0; d],
    };

    let mut indices = Vec::new();
    let mut current = vec![0u32; d];
    match kind {
        IndexSetKind::TensorProduct => {
            enumerate_box(&a, p, 0, &mut current, &mut indices, cap)?
        }
        IndexSetKind::TotalDegree => {
            enumerate_additive(&a, p, 0.0, |nu, ak| nu as f64 * ak, 0, &mut current, &mut indices, cap)?
        }
        IndexSetKind::HyperbolicCrossSum => {
            // budget p + 1 - d * min-term handled inside the closure form:
            // each coordinate contributes (nu_k + 1)^{a_k}, at least 1.
            enumerate_additive(
                &a,
                p + 1.0,
                0.0,
                |nu, ak| ((nu + 1) as f64).powf(ak),
                0,
                &mut current,
                &mut indices,
                cap,
            )?
        }
        IndexSetKind::HyperbolicCross => {
            enumerate_multiplicative(&a, p + 1.0, 1.0, 0, &mut current, &mut indices, cap)?
        }
    }
    IndexSet::from_indices(d, indices)
}

fn push_checked(indices: &mut Vec<MultiIndex>, idx: MultiIndex, cap: usize) -> Result<()> {
    if indices.len() >= cap {
        return Err(Error::IndexSetTooLarge { cap });
    }
    indices.push(idx);
    Ok(())
}

fn enumerate_box(
    a: &[f64],
    p: f64,
    k: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
    cap: usize,
) -> Result<()> {
    if k == a.len() {
        return push_checked(out, MultiIndex(current.clone()), cap);
    }
    let mut nu = 0u32;
    while a[k] * nu as f64 <= p {
        current[k] = nu;
        enumerate_box(a, p, k + 1, current, out, cap)?;
        nu += 1;
    }
    current[k] = 0;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn enumerate_additive(
    a: &[f64],
    budget: f64,
    used: f64,
    term: impl Fn(u32, f64) -> f64 + Copy,
    k: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
    cap: usize,
) -> Result<()> {
    if k == a.len() {
        return push_checked(out, MultiIndex(current.clone()), cap);
    }
    // remaining coordinates contribute at least their nu = 0 term
    let floor_rest: f64 = a[k + 1..].iter().map(|&ak| term(0, ak)).sum();
    let mut nu = 0u32;
    loop {
        let t = term(nu, a[k]);
        if used + t + floor_rest > budget {
            break;
        }
        current[k] = nu;
        enumerate_additive(a, budget, used + t, term, k + 1, current, out, cap)?;
        nu = match nu.checked_add(1) {
            Some(v) => v,
            None => break,
        };
    }
    current[k] = 0;
    Ok(())
}

fn enumerate_multiplicative(
    a: &[f64],
    budget: f64,
    used: f64,
    k: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
    cap: usize,
) -> Result<()> {
    if k == a.len() {
        return push_checked(out, MultiIndex(current.clone()), cap);
    }
    let mut nu = 0u32;
    loop {
        let factor = ((nu + 1) as f64).powf(a[k]);
        if used * factor > budget {
            break;
        }
        current[k] = nu;
        enumerate_multiplicative(a, budget, used * factor, k + 1, current, out, cap)?;
        nu = match nu.checked_add(1) {
            Some(v) => v,
            None => break,
        };
    }
    current[k] = 0;
    Ok(())
}

/// Parses `tp:p`, `td:p`, `hc:p`, `hc-sum:p`, optionally followed by
/// `:a=a1,a2,...`.
pub fn parse_index_set_spec(spec: &str) -> Result<(IndexSetKind, f64, Option<Vec<f64>>)> {
    let mut parts = spec.trim().split(':');
    let kind = IndexSetKind::parse(parts.next().unwrap_or(""))?;
    let p: f64 = parts
        .next()
        .ok_or_else(|| Error::Parse(format!("missing order in `{spec}`")))?
        .parse()
        .map_err(|_| Error::Parse(format!("bad order in `{spec}`")))?;
    let mut anisotropy = None;
    if let Some(rest) = parts.next() {
        let list = rest
            .strip_prefix("a=")
            .ok_or_else(|| Error::Parse(format!("expected `a=...` in `{spec}`")))?;
        let a: Vec<f64> = list
            .split(',')
            .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad anisotropy in `{spec}`"))))
            .collect::<Result<_>>()?;
        anisotropy = Some(a);
    }
    if parts.next().is_some() {
        return Err(Error::Parse(format!("trailing fields in `{spec}`")));
    }
    Ok((kind, p, anisotropy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn idx(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn total_degree_example() {
        let s = build_index_set(IndexSetKind::TotalDegree, 2, 2.0, None).unwrap();
        assert_eq!(s.len(), 6);
        let expect: Vec<MultiIndex> = [
            [0u32, 0],
            [0, 1],
            [1, 0],
            [0, 2],
            [1, 1],
            [2, 0],
        ]
        .iter()
        .map(|v| idx(v))
        .collect();
        assert_eq!(s.indices(), expect.as_slice());
    }

    #[test]
    fn hyperbolic_cross_example() {
        // product form: (nu1+1)(nu2+1) <= 4
        let s = build_index_set(IndexSetKind::HyperbolicCross, 2, 3.0, None).unwrap();
        assert_eq!(s.len(), 8);
        for v in [[0u32, 0], [1, 0], [2, 0], [3, 0], [0, 1], [1, 1], [0, 2], [0, 3]] {
            assert!(s.contains(&idx(&v)), "{v:?} missing");
        }
    }

    #[test]
    fn hyperbolic_cross_sum_form_differs() {
        // sum form: (nu1+1)+(nu2+1) <= 4, i.e. total degree <= 2
        let s = build_index_set(IndexSetKind::HyperbolicCrossSum, 2, 3.0, None).unwrap();
        assert_eq!(s.len(), 6);
        assert!(!s.contains(&idx(&[3, 0])));
    }

    #[test]
    fn tensor_product_p0() {
        let s = build_index_set(IndexSetKind::TensorProduct, 3, 0.0, None).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.indices()[0], idx(&[0, 0, 0]));
    }

    #[test]
    fn lower_set_predicate() {
        let ok = IndexSet::from_indices(2, vec![idx(&[0, 0]), idx(&[1, 0]), idx(&[0, 1])]).unwrap();
        assert!(ok.is_lower());
        let bad = IndexSet::from_indices(2, vec![idx(&[0, 0]), idx(&[2, 0])]).unwrap();
        assert!(!bad.is_lower());
    }

    #[test]
    fn cardinalities_match_combinatorics() {
        for d in 1..=4usize {
            for p in 0..=6u32 {
                let tp = build_index_set(IndexSetKind::TensorProduct, d, p as f64, None).unwrap();
                assert_eq!(tp.len(), (p as usize + 1).pow(d as u32), "TP d={d} p={p}");
                let td = build_index_set(IndexSetKind::TotalDegree, d, p as f64, None).unwrap();
                let mut binom = 1usize;
                for i in 1..=d {
                    binom = binom * (p as usize + i) / i;
                }
                assert_eq!(td.len(), binom, "TD d={d} p={p}");
            }
        }
    }

    #[test]
    fn builders_produce_lower_sets_and_anisotropy_ones_match() {
        let mut rng = crate::rng::rng_from_seed(99);
        let kinds = [
            IndexSetKind::TensorProduct,
            IndexSetKind::TotalDegree,
            IndexSetKind::HyperbolicCross,
            IndexSetKind::HyperbolicCrossSum,
        ];
        for trial in 0..50 {
            let kind = kinds[trial % kinds.len()];
            let d = rng.gen_range(1..=4usize);
            let mut p = rng.gen_range(0.0..8.0f64);
            if kind == IndexSetKind::HyperbolicCrossSum {
                // the sum form is empty below p + 1 = d
                p = p.max(d as f64);
            }
            let s = build_index_set(kind, d, p, None).unwrap();
            assert!(s.is_lower(), "{kind:?} d={d} p={p} not lower");
            let ones = vec![1.0; d];
            let s1 = build_index_set(kind, d, p, Some(&ones)).unwrap();
            assert_eq!(s, s1, "{kind:?} d={d} p={p}: isotropic != explicit ones");

            // random anisotropic sets stay lower too
            let a: Vec<f64> = (0..d).map(|_| rng.gen_range(0.5..2.5)).collect();
            let sa = build_index_set(kind, d, p, Some(&a)).unwrap();
            assert!(sa.is_lower(), "{kind:?} anisotropic not lower");
        }
    }

    #[test]
    fn monotone_in_order() {
        for kind in [
            IndexSetKind::TensorProduct,
            IndexSetKind::TotalDegree,
            IndexSetKind::HyperbolicCross,
        ] {
            let mut prev = build_index_set(kind, 3, 0.0, None).unwrap();
            for p in 1..=6 {
                let cur = build_index_set(kind, 3, p as f64, None).unwrap();
                for i in prev.iter() {
                    assert!(cur.contains(i), "{kind:?}: p monotonicity violated");
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn zero_index_always_present_in_canonical_kinds() {
        for kind in [
            IndexSetKind::TensorProduct,
            IndexSetKind::TotalDegree,
            IndexSetKind::HyperbolicCross,
        ] {
            let s = build_index_set(kind, 3, 0.0, None).unwrap();
            assert!(s.contains(&idx(&[0, 0, 0])));
        }
        // the printed sum form is empty once p + 1 < d
        assert!(build_index_set(IndexSetKind::HyperbolicCrossSum, 3, 0.5, None).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let r = build_index_set_with_cap(IndexSetKind::TensorProduct, 3, 100.0, None, 1000);
        assert!(matches!(r, Err(Error::IndexSetTooLarge { .. })));
    }

    #[test]
    fn graded_lex_prefix_is_lower() {
        let s = build_index_set(IndexSetKind::TotalDegree, 3, 5.0, None).unwrap();
        for n in 1..=s.len() {
            assert!(s.truncated_to(n).unwrap().is_lower());
        }
    }

    #[test]
    fn spec_parsing() {
        let (kind, p, a) = parse_index_set_spec("td:3").unwrap();
        assert_eq!(kind, IndexSetKind::TotalDegree);
        assert_eq!(p, 3.0);
        assert!(a.is_none());
        let (kind, p, a) = parse_index_set_spec("hc:4:a=1,2.5").unwrap();
        assert_eq!(kind, IndexSetKind::HyperbolicCross);
        assert_eq!(p, 4.0);
        assert_eq!(a.unwrap(), vec![1.0, 2.5]);
        assert!(parse_index_set_spec("xx:3").is_err());
        assert!(parse_index_set_spec("td").is_err());
    }
}
