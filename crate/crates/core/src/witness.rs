//! Property A witnesses, positive type kernels and the operator norm
//! localization constant.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::BandOperator;
use crate::space::{within, CoarseSpace, PointSet};

/// Tolerance on `‖ξ_x‖₁ = 1`.
pub const L1_TOL: f64 = 1e-12;

/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-9;

/// Largest subset accepted by [`check_positive_type`].
pub const MAX_KERNEL_BLOCK: usize = 2000;

/// `x ↦ ξ_x`: unit, non-negative `ℓ¹` vectors supported in `B(x, S)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessFunction {
    domain: PointSet,
    vectors: Vec<Vec<(usize, f64)>>,
    support_radius: f64,
}

impl WitnessFunction {
    /// Checks the support and normalisation of every vector. Each vector is
    /// a list of `(point, weight)` pairs; it is sorted here.
    pub fn new(
        space: &CoarseSpace,
        domain: PointSet,
        mut vectors: Vec<Vec<(usize, f64)>>,
        support_radius: f64,
    ) -> Result<Self> {
        space.check_set(&domain)?;
        if vectors.len() != domain.len() {
            return Err(Error::InvalidArgument(
                "one vector per domain point is required".to_string(),
            ));
        }
        for (x, v) in domain.iter().zip(vectors.iter_mut()) {
            v.sort_unstable_by_key(|p| p.0);
            v.dedup_by(|a, b| {
                if a.0 == b.0 {
                    b.1 += a.1;
                    true
                } else {
                    false
                }
            });
            let mut total = 0.0;
            for &(y, w) in v.iter() {
                space.check_point(y)?;
                if w < 0.0 || !w.is_finite() {
                    return Err(Error::InvalidArgument(
                        "negative witness weight".to_string(),
                    ));
                }
                if !within(space.distance(x, y), support_radius) {
                    return Err(Error::InvalidArgument(
                        "witness vector leaves its support ball".to_string(),
                    ));
                }
                total += w;
            }
            if (total - 1.0).abs() > L1_TOL {
                return Err(Error::InvalidArgument(
                    "witness vector is not ℓ¹-normalised".to_string(),
                ));
            }
        }
        Ok(WitnessFunction {
            domain,
            vectors,
            support_radius,
        })
    }

    /// `ξ_x = δ_x`.
    pub fn delta(space: &CoarseSpace, domain: PointSet) -> Result<Self> {
        let vectors = domain.iter().map(|x| vec![(x, 1.0)]).collect();
        Self::new(space, domain, vectors, 0.0)
    }

    pub fn domain(&self) -> &PointSet {
        &self.domain
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// `ξ_x` as sorted `(point, weight)` pairs, or `None` off the domain.
    pub fn vector(&self, x: usize) -> Option<&[(usize, f64)]> {
        self.domain
            .as_slice()
            .binary_search(&x)
            .ok()
            .map(|i| self.vectors[i].as_slice())
    }
}

/// `ξ_x` is the normalised indicator of `B(x, S)`.
pub fn averaging_witness(space: &CoarseSpace, domain: PointSet, s: f64) -> Result<WitnessFunction> {
    if !(s >= 0.0) {
        return Err(Error::InvalidArgument(
            "support radius must be non-negative".to_string(),
        ));
    }
    let vectors = domain
        .iter()
        .map(|x| {
            let b = space.ball(x, s);
            let w = 1.0 / b.len() as f64;
            b.iter().map(|y| (y, w)).collect()
        })
        .collect();
    WitnessFunction::new(space, domain, vectors, s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variation {
    pub max_variation: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub pairs_checked: usize,
}

fn l1_distance(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < a.len() || j < b.len() {
        let ka = a.get(i).map_or(usize::MAX, |p| p.0);
        let kb = b.get(j).map_or(usize::MAX, |p| p.0);
        if ka == kb {
            s += (a[i].1 - b[j].1).abs();
            i += 1;
            j += 1;
        } else if ka < kb {
            s += a[i].1;
            i += 1;
        } else {
            s += b[j].1;
            j += 1;
        }
    }
    s
}

/// `max ‖ξ_x − ξ_y‖₁` over domain pairs with `d(x, y) <= R`.
pub fn check_partition_witness(
    space: &CoarseSpace,
    witness: &WitnessFunction,
    r: f64,
) -> Result<Variation> {
    let dom = &witness.domain;
    if dom.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let mut out = Variation {
        max_variation: 0.0,
        worst_pair: None,
        pairs_checked: 0,
    };
    for (i, x) in dom.iter().enumerate() {
        for y in space.ball(x, r).iter().filter(|&y| y > x) {
            let Ok(j) = dom.as_slice().binary_search(&y) else {
                continue;
            };
            out.pairs_checked += 1;
            let v = l1_distance(&witness.vectors[i], &witness.vectors[j]);
            if v > out.max_variation || out.worst_pair.is_none() {
                out.max_variation = v;
                out.worst_pair = Some((x, y));
            }
        }
    }
    Ok(out)
}

/// `k(x, y) = ⟨η_x, η_y⟩` with `η_x = √ξ_x` (the Mazur map into the unit
/// sphere of `ℓ²`).
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    domain: PointSet,
    eta: Vec<Vec<(usize, f64)>>,
}

impl Kernel {
    pub fn domain(&self) -> &PointSet {
        &self.domain
    }

    /// Zero off the domain.
    pub fn value(&self, x: usize, y: usize) -> f64 {
        let d = self.domain.as_slice();
        match (d.binary_search(&x), d.binary_search(&y)) {
            (Ok(i), Ok(j)) => {
                let (a, b) = (&self.eta[i], &self.eta[j]);
                let (mut p, mut q, mut s) = (0, 0, 0.0);
                while p < a.len() && q < b.len() {
                    match a[p].0.cmp(&b[q].0) {
                        core::cmp::Ordering::Equal => {
                            s += a[p].1 * b[q].1;
                            p += 1;
                            q += 1;
                        }
                        core::cmp::Ordering::Less => p += 1,
                        core::cmp::Ordering::Greater => q += 1,
                    }
                }
                s
            }
            _ => 0.0,
        }
    }
}

pub fn kernel_from_witness(witness: &WitnessFunction) -> Kernel {
    Kernel {
        domain: witness.domain.clone(),
        eta: witness
            .vectors
            .iter()
            .map(|v| v.iter().map(|&(y, w)| (y, w.sqrt())).collect())
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositiveType {
    pub positive: bool,
    pub min_eigenvalue: f64,
    /// Index of the subset attaining the minimum.
    pub worst_subset: Option<usize>,
}

/// Every principal submatrix `[k(x_i, x_j)]` over the given subsets is
/// positive semidefinite up to [`PSD_TOL`].
pub fn check_positive_type<K>(kernel: K, subsets: &[PointSet]) -> Result<PositiveType>
where
    K: Fn(usize, usize) -> f64,
{
    let mut out = PositiveType {
        positive: true,
        min_eigenvalue: f64::INFINITY,
        worst_subset: None,
    };
    for (idx, s) in subsets.iter().enumerate() {
        let m = s.len();
        if m > MAX_KERNEL_BLOCK {
            return Err(Error::InvalidArgument(
                "kernel subset larger than 2000 points".to_string(),
            ));
        }
        if m == 0 {
            continue;
        }
        let pts = s.as_slice();
        let mut a = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let v = 0.5 * (kernel(pts[i], pts[j]) + kernel(pts[j], pts[i]));
                a[i * m + j] = v;
                a[j * m + i] = v;
            }
        }
        let lo = linalg::symmetric_eigenvalues(a, m)[0];
        if lo < out.min_eigenvalue {
            out.min_eigenvalue = lo;
            out.worst_subset = Some(idx);
        }
    }
    out.positive = !(out.min_eigenvalue < PSD_TOL);
    Ok(out)
}

/// How a window cuts down the operator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Restriction {
    /// `‖T χ_W‖`: the largest `‖Tζ‖` over unit `ζ` supported in `W`.
    #[default]
    Columns,
    /// `‖χ_W T χ_W‖`.
    TwoSided,
}

#[derive(Clone, Debug, Default)]
pub struct LocalizationOptions {
    pub restriction: Restriction,
    /// Points excluded as window centres.
    pub margin: PointSet,
    /// Only these centres are swept when set.
    pub centers: Option<PointSet>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationReport {
    pub s: f64,
    pub best_constant: f64,
    pub operator_norm: f64,
    pub window_norm: f64,
    pub center: usize,
    pub witness_window: PointSet,
    /// Unit vector supported in the window, as `(point, value)` pairs.
    pub witness_vector: Vec<(usize, Complex64)>,
    pub windows_checked: usize,
    pub restriction: Restriction,
}

/// Points within `S` of the boundary of a grid box; empty for graph spaces.
pub fn grid_margin(space: &CoarseSpace, s: f64) -> PointSet {
    let Some((_, side, _)) = space.grid_shape() else {
        return PointSet::new();
    };
    let s = (s + 1e-9).floor().max(0.0) as i64;
    let side = side as i64;
    space
        .points()
        .filter(|&x| {
            space
                .coords(x)
                .unwrap_or_default()
                .iter()
                .any(|&c| c < s || c > side - 1 - s)
        })
        .collect()
}

/// Maximal set of diameter at most `S` grown from `x`: points of `B(x, S)`
/// are added by increasing distance, then index, while the diameter allows.
pub fn window_at(space: &CoarseSpace, x: usize, s: f64) -> PointSet {
    let mut cand: Vec<(f64, usize)> = space
        .ball(x, s)
        .iter()
        .map(|y| (space.distance(x, y), y))
        .collect();
    cand.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut w: Vec<usize> = Vec::new();
    for (_, y) in cand {
        if w.iter().all(|&z| within(space.distance(y, z), s)) {
            w.push(y);
        }
    }
    w.into_iter().collect()
}

/// [`localization_constant_with`] using column restriction.
pub fn localization_constant(
    t: &BandOperator,
    s: f64,
    margin: &PointSet,
) -> Result<LocalizationReport> {
    localization_constant_with(
        t,
        s,
        &LocalizationOptions {
            margin: margin.clone(),
            ..Default::default()
        },
    )
}

/// Largest `‖T ζ‖ / ‖T‖` over unit vectors `ζ` supported in a window of
/// diameter at most `S`. Ties go to the lowest centre.
pub fn localization_constant_with(
    t: &BandOperator,
    s: f64,
    opts: &LocalizationOptions,
) -> Result<LocalizationReport> {
    if !(s >= 0.0) {
        return Err(Error::InvalidArgument(
            "window diameter must be non-negative".to_string(),
        ));
    }
    if t.is_zero() {
        return Err(Error::InvalidArgument("operator is zero".to_string()));
    }
    let space = t.space().clone();
    let norm = t.norm()?;
    let gram = match opts.restriction {
        Restriction::Columns => Some(t.adjoint().multiply(t)?),
        Restriction::TwoSided => None,
    };
    let centers: Vec<usize> = match &opts.centers {
        Some(c) => c.difference(&opts.margin).into_vec(),
        None => space
            .points()
            .filter(|&x| !opts.margin.contains(x))
            .collect(),
    };
    let mut best: Option<(f64, usize, PointSet)> = None;
    let mut checked = 0;
    for x in centers {
        let w = window_at(&space, x, s);
        checked += 1;
        let h = match &gram {
            Some(g) => submatrix(g, &w),
            None => two_sided_gram(t, &w),
        };
        let val = linalg::hermitian_eigenvalues(&h, w.len())
            .last()
            .copied()
            .unwrap_or(0.0)
            .max(0.0);
        if best.as_ref().is_none_or(|(b, _, _)| val > *b) {
            best = Some((val, x, w));
        }
    }
    let Some((val, center, window)) = best else {
        return Err(Error::NoWindows);
    };
    let h = match &gram {
        Some(g) => submatrix(g, &window),
        None => two_sided_gram(t, &window),
    };
    let (_, vec) = linalg::hermitian_top(&h, window.len());
    let window_norm = val.sqrt();
    Ok(LocalizationReport {
        s,
        best_constant: (window_norm / norm).min(1.0),
        operator_norm: norm,
        window_norm,
        center,
        witness_vector: window.iter().zip(vec).collect(),
        witness_window: window,
        windows_checked: checked,
        restriction: opts.restriction,
    })
}

fn submatrix(g: &BandOperator, w: &PointSet) -> Vec<Complex64> {
    let pts = w.as_slice();
    let m = pts.len();
    let mut h = vec![Complex64::new(0.0, 0.0); m * m];
    for (i, &u) in pts.iter().enumerate() {
        let (cols, vals) = g.row(u);
        let mut k = 0;
        for (j, &v) in pts.iter().enumerate() {
            while k < cols.len() && (cols[k] as usize) < v {
                k += 1;
            }
            if k < cols.len() && cols[k] as usize == v {
                h[i * m + j] = vals[k];
            }
        }
    }
    h
}

fn two_sided_gram(t: &BandOperator, w: &PointSet) -> Vec<Complex64> {
    let m = w.len();
    let a = submatrix(t, w);
    let mut h = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in 0..m {
            h[i * m + j] = (0..m).map(|k| a[k * m + i].conj() * a[k * m + j]).sum();
        }
    }
    h
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResistanceReport {
    pub passed: bool,
    pub kappa: f64,
    /// Localization constant of each block at its scale.
    pub constants: Vec<f64>,
    pub block_norms: Vec<f64>,
}

/// Every block `T_n` has localization constant at most `κ` at scale `S_n`.
/// Windows are centred within `S_n` of the block, the only place they can
/// see it.
pub fn resistance_check(
    blocks: &[(BandOperator, PointSet)],
    kappa: f64,
    s_schedule: &[f64],
) -> Result<ResistanceReport> {
    if s_schedule.len() < blocks.len() {
        return Err(Error::ScheduleTooShort {
            needed: blocks.len(),
            got: s_schedule.len(),
        });
    }
    for (i, w) in s_schedule.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonIncreasingSchedule(i + 1));
        }
    }
    for (i, (_, a)) in blocks.iter().enumerate() {
        for (j, (_, b)) in blocks.iter().enumerate().skip(i + 1) {
            if !a.is_disjoint(b) {
                return Err(Error::OverlappingBlocks(i, j));
            }
        }
    }
    let mut constants = Vec::with_capacity(blocks.len());
    let mut norms = Vec::with_capacity(blocks.len());
    for ((t, b), &s) in blocks.iter().zip(s_schedule) {
        if t.is_zero() {
            constants.push(0.0);
            norms.push(0.0);
            continue;
        }
        let opts = LocalizationOptions {
            centers: Some(t.space().neighbourhood(b, s)),
            ..Default::default()
        };
        let rep = localization_constant_with(t, s, &opts)?;
        constants.push(rep.best_constant);
        norms.push(rep.operator_norm);
    }
    Ok(ResistanceReport {
        passed: constants.iter().all(|&c| c <= kappa),
        kappa,
        constants,
        block_norms: norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::GridMetric;
    use alloc::sync::Arc;
    use approx::assert_relative_eq;

    fn line(n: usize) -> Arc<CoarseSpace> {
        Arc::new(CoarseSpace::grid(1, n, GridMetric::Sup).unwrap())
    }

    #[test]
    fn delta_witness_has_full_variation() {
        let s = line(10);
        let w = WitnessFunction::delta(&s, s.all()).unwrap();
        let v = check_partition_witness(&s, &w, 1.0).unwrap();
        assert_eq!(v.max_variation, 2.0);
        assert_eq!(v.worst_pair, Some((0, 1)));
        let k = kernel_from_witness(&w);
        assert_eq!(k.value(3, 3), 1.0);
        assert_eq!(k.value(3, 4), 0.0);
    }

    #[test]
    fn averaging_variation_on_the_line() {
        let n = 200;
        let s = line(n);
        for sr in [1usize, 4, 9] {
            for r in 1..=3usize {
                let dom = PointSet::range(sr..n - sr);
                let w = averaging_witness(&s, dom, sr as f64).unwrap();
                let v = check_partition_witness(&s, &w, r as f64).unwrap();
                let expect = 2.0 * r.min(2 * sr + 1) as f64 / (2 * sr + 1) as f64;
                assert!((v.max_variation - expect).abs() < 1e-12, "{sr} {r}");
            }
        }
    }

    #[test]
    fn averaging_variation_on_the_square() {
        let l = 30;
        let s = Arc::new(CoarseSpace::grid(2, l, GridMetric::Sup).unwrap());
        let sr = 3usize;
        let dom: PointSet = s
            .points()
            .filter(|&p| {
                s.coords(p)
                    .unwrap()
                    .iter()
                    .all(|&c| c >= sr as i64 && c < (l - sr) as i64)
            })
            .collect();
        let w = averaging_witness(&s, dom, sr as f64).unwrap();
        let side = (2 * sr + 1) as f64;
        // Axis neighbours.
        let a = s.index_of(&[10, 10]).unwrap();
        let b = s.index_of(&[10, 11]).unwrap();
        let axis = l1_distance(w.vector(a).unwrap(), w.vector(b).unwrap());
        assert!((axis - 2.0 / side).abs() < 1e-12);
        // Diagonal neighbours are the worst case.
        let v = check_partition_witness(&s, &w, 1.0).unwrap();
        let diag = 2.0 * (4 * sr + 1) as f64 / (side * side);
        assert!((v.max_variation - diag).abs() < 1e-12);
    }

    #[test]
    fn singleton_space_averaging_is_delta() {
        let s = line(1);
        let w = averaging_witness(&s, s.all(), 3.0).unwrap();
        assert_eq!(w.vector(0).unwrap(), &[(0, 1.0)]);
    }

    #[test]
    fn witness_validation() {
        let s = line(5);
        let bad = WitnessFunction::new(&s, PointSet::from(vec![0]), vec![vec![(3, 1.0)]], 1.0);
        assert!(bad.is_err());
        let bad = WitnessFunction::new(&s, PointSet::from(vec![0]), vec![vec![(0, 0.7)]], 1.0);
        assert!(bad.is_err());
        let empty = WitnessFunction::new(&s, PointSet::new(), vec![], 1.0).unwrap();
        assert_eq!(
            check_partition_witness(&s, &empty, 1.0).unwrap_err(),
            Error::EmptyDomain
        );
    }

    #[test]
    fn restricted_domain_only_sees_its_pairs() {
        let s = line(40);
        let strip = PointSet::range(15..25);
        let dom = s.all().difference(&strip);
        let w = averaging_witness(&s, dom, 2.0).unwrap();
        let v = check_partition_witness(&s, &w, 1.0).unwrap();
        let (x, y) = v.worst_pair.unwrap();
        assert!(!strip.contains(x) && !strip.contains(y));
        let k = kernel_from_witness(&w);
        assert_eq!(k.value(20, 20), 0.0);
    }

    #[test]
    fn averaging_kernel_is_triangular() {
        let s = line(100);
        let sr = 5usize;
        let w = averaging_witness(&s, PointSet::range(sr..100 - sr), sr as f64).unwrap();
        let k = kernel_from_witness(&w);
        for d in 0..15usize {
            let expect = (1.0 - d as f64 / (2 * sr + 1) as f64).max(0.0);
            assert!((k.value(40, 40 + d) - expect).abs() < 1e-12);
        }
        let p = check_positive_type(|x, y| k.value(x, y), &[s.all()]).unwrap();
        assert!(p.positive);
    }

    #[test]
    fn positive_type_examples() {
        let s = line(60);
        let all = [s.all()];
        assert!(
            check_positive_type(|x, y| (x == y) as u8 as f64, &all)
                .unwrap()
                .positive
        );
        assert!(check_positive_type(|_, _| 1.0, &all).unwrap().positive);
        let fejer = |x: usize, y: usize| (1.0 - (x as f64 - y as f64).abs() / 7.0).max(0.0);
        assert!(check_positive_type(fejer, &all).unwrap().positive);
        let p = check_positive_type(|x, y| if x == y { 0.0 } else { 1.0 }, &all).unwrap();
        assert!(!p.positive);
        assert!((p.min_eigenvalue + 1.0).abs() < 1e-9);
    }

    #[test]
    fn windows_have_bounded_diameter() {
        let s = line(30);
        assert_eq!(window_at(&s, 10, 3.0), PointSet::range(8..12));
        assert_eq!(window_at(&s, 10, 4.0), PointSet::range(8..13));
        assert_eq!(window_at(&s, 0, 4.0), PointSet::range(0..5));
        let sq = CoarseSpace::grid(2, 9, GridMetric::Graph).unwrap();
        let w = window_at(&sq, 40, 2.0);
        assert!(sq.set_diameter(&w) <= 2.0);
    }

    #[test]
    fn identity_localizes_perfectly() {
        let s = line(20);
        let id = BandOperator::identity(s);
        for sr in [0.0, 1.0, 5.0] {
            let r = localization_constant(&id, sr, &PointSet::new()).unwrap();
            assert_relative_eq!(r.best_constant, 1.0, epsilon = 1e-12);
            assert_eq!(r.center, 0);
        }
    }

    #[test]
    fn path_localization_two_sided_is_exact() {
        let n = 120;
        let s = line(n);
        let a = BandOperator::adjacency(s.clone());
        let pi = core::f64::consts::PI;
        for sr in [2usize, 5, 10] {
            let opts = LocalizationOptions {
                restriction: Restriction::TwoSided,
                margin: grid_margin(&s, sr as f64),
                centers: None,
            };
            let r = localization_constant_with(&a, sr as f64, &opts).unwrap();
            let expect = (pi / (sr + 2) as f64).cos() / (pi / (n + 1) as f64).cos();
            assert!((r.best_constant - expect).abs() < 1e-9);
            assert_eq!(r.witness_window.len(), sr + 1);
        }
    }

    #[test]
    fn path_localization_columns_closed_form() {
        let n = 120;
        let s = line(n);
        let a = BandOperator::adjacency(s.clone());
        let pi = core::f64::consts::PI;
        for sr in [2usize, 3, 8, 11] {
            let r = localization_constant(&a, sr as f64, &grid_margin(&s, sr as f64)).unwrap();
            let m = if sr % 2 == 0 { sr + 4 } else { sr + 3 };
            let expect = (pi / m as f64).cos() / (pi / (n + 1) as f64).cos();
            assert!((r.best_constant - expect).abs() < 1e-9, "{sr}");
            let tz: f64 = {
                let mut x = vec![Complex64::new(0.0, 0.0); n];
                for &(p, v) in &r.witness_vector {
                    x[p] = v;
                }
                let mut y = x.clone();
                a.apply(&x, &mut y);
                y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
            };
            assert!((tz - r.best_constant * r.operator_norm).abs() < 1e-9);
        }
    }

    #[test]
    fn localization_is_monotone_and_saturates() {
        let s = line(25);
        let a = BandOperator::adjacency(s.clone());
        let mut last = 0.0;
        for sr in 0..30 {
            let c = localization_constant(&a, sr as f64, &PointSet::new())
                .unwrap()
                .best_constant;
            assert!(c >= last - 1e-12);
            last = c;
        }
        assert_relative_eq!(last, 1.0, epsilon = 1e-12);
        assert_eq!(
            localization_constant(&a, 2.0, &s.all()).unwrap_err(),
            Error::NoWindows
        );
    }

    #[test]
    fn resistance_check_examples() {
        let s = line(40);
        let b1 = PointSet::range(0..10);
        let b2 = PointSet::range(20..30);
        let zero = BandOperator::zero(s.clone());
        let r = resistance_check(
            &[(zero.clone(), b1.clone()), (zero, b2.clone())],
            0.01,
            &[1.0, 2.0],
        )
        .unwrap();
        assert!(r.passed);
        let id1 = BandOperator::identity(s.clone()).window_restrict(&b1, &b1);
        let id2 = BandOperator::identity(s.clone()).window_restrict(&b2, &b2);
        let blocks = [(id1, b1.clone()), (id2, b2)];
        assert!(!resistance_check(&blocks, 0.99, &[1.0, 2.0]).unwrap().passed);
        assert_eq!(
            resistance_check(&blocks, 0.5, &[2.0, 2.0]).unwrap_err(),
            Error::NonIncreasingSchedule(1)
        );
        let over = [
            blocks[0].clone(),
            (blocks[1].0.clone(), PointSet::range(5..15)),
        ];
        assert_eq!(
            resistance_check(&over, 0.5, &[1.0, 2.0]).unwrap_err(),
            Error::OverlappingBlocks(0, 1)
        );
    }
}
