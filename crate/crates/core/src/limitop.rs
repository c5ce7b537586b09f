//! Empirical limit operators along direction sequences, and the integer
//! combinatorics of sparse sets.
//!
//! A direction at infinity is replaced by a sequence of points `h_n` and a
//! frame: for each term a chart identifying a fixed local window with a
//! window around `h_n`. Limits are read off the last `tail` terms.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::ideals::{ghostly_membership, GhostlyVerdict, IdealFamily};
use crate::operator::BandOperator;
use crate::space::{CoarseSpace, PointSet};

pub const DEFAULT_TAIL: usize = 8;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_RADIUS: usize = 10;

/// Points escaping to infinity: strictly increasing distance from the
/// basepoint.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSequence {
    points: Vec<usize>,
}

impl DirectionSequence {
    pub fn new(space: &CoarseSpace, points: Vec<usize>) -> Result<Self> {
        let b = space.basepoint();
        for &p in &points {
            space.check_point(p)?;
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(space.distance(b, w[1]) > space.distance(b, w[0])) {
                return Err(Error::InvalidArgument(alloc::format!(
                    "direction term {} does not move away from the basepoint",
                    i + 1
                )));
            }
        }
        Ok(DirectionSequence { points })
    }

    /// Integer positions on a one-dimensional grid. Values outside the grid
    /// are rejected.
    pub fn from_integers(space: &CoarseSpace, values: &[i64]) -> Result<Self> {
        let pts = values
            .iter()
            .map(|&v| {
                space.index_of(&[v]).ok_or(Error::PointOutOfRange {
                    point: v.max(0) as usize,
                    len: space.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, pts)
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `N ↦ min_{m ≠ n, m + n >= N} d(h_n, h_m)` for `N = 0..2·len`.
    pub fn sparsity(&self, space: &CoarseSpace) -> Vec<f64> {
        let k = self.points.len();
        let mut by_sum = vec![f64::INFINITY; 2 * k];
        for n in 0..k {
            for m in n + 1..k {
                let d = space.distance(self.points[n], self.points[m]);
                by_sum[n + m] = by_sum[n + m].min(d);
            }
        }
        for s in (0..by_sum.len().saturating_sub(1)).rev() {
            by_sum[s] = by_sum[s].min(by_sum[s + 1]);
        }
        by_sum
    }
}

/// Identifications of a local window with windows around each term.
#[derive(Clone, Debug)]
pub struct Frame {
    local: Arc<CoarseSpace>,
    charts: Vec<Option<Vec<usize>>>,
}

impl Frame {
    /// Lattice offsets `[-r, r]^N` around each term of a sequence in a grid
    /// space. Terms whose window leaves the grid get no chart.
    pub fn lattice(space: &CoarseSpace, seq: &DirectionSequence, radius: usize) -> Result<Self> {
        let (dims, _, kind) = space.grid_shape().ok_or_else(|| {
            Error::InvalidArgument("lattice frames need a grid space".to_string())
        })?;
        let local = Arc::new(CoarseSpace::grid(dims, 2 * radius + 1, kind)?);
        let r = radius as i64;
        let charts = seq
            .points()
            .iter()
            .map(|&h| {
                let c = space.coords(h).unwrap_or_default();
                local
                    .points()
                    .map(|p| {
                        let off = local.coords(p).unwrap_or_default();
                        let target: Vec<i64> =
                            c.iter().zip(&off).map(|(&a, &o)| a + o - r).collect();
                        space.index_of(&target)
                    })
                    .collect::<Option<Vec<usize>>>()
            })
            .collect();
        Ok(Frame { local, charts })
    }

    /// Explicit charts. Charts may differ in length; only equal-length
    /// charts matching `local` support entrywise limits.
    pub fn explicit(local: Arc<CoarseSpace>, charts: Vec<Vec<usize>>) -> Self {
        Frame {
            local,
            charts: charts.into_iter().map(Some).collect(),
        }
    }

    pub fn local(&self) -> &Arc<CoarseSpace> {
        &self.local
    }

    pub fn len(&self) -> usize {
        self.charts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charts.is_empty()
    }

    pub fn chart(&self, n: usize) -> Option<&[usize]> {
        self.charts.get(n).and_then(|c| c.as_deref())
    }

    /// Indices and charts of the last `tail` terms.
    fn tail(&self, tail: usize) -> Result<Vec<(usize, &[usize])>> {
        if tail == 0 || self.charts.len() < tail {
            return Err(Error::InsufficientTail {
                available: self.charts.len(),
                tail,
            });
        }
        (self.charts.len() - tail..self.charts.len())
            .map(|i| match &self.charts[i] {
                Some(c) => Ok((i, c.as_slice())),
                None => Err(Error::WindowOutsideSpace { index: i }),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitOperator {
    /// Entries taken from the last term, on the local window.
    pub operator: BandOperator,
    /// `(a, b, max − min)` for every entry that moves over the tail.
    pub oscillation: Vec<(usize, usize, f64)>,
    pub max_oscillation: f64,
    pub terms: Vec<usize>,
}

fn tail_values(t: &BandOperator, tail: &[(usize, &[usize])], a: usize, b: usize) -> Vec<Complex64> {
    tail.iter().map(|(_, c)| t.get(c[a], c[b])).collect()
}

fn spread(v: &[Complex64]) -> f64 {
    let mut s: f64 = 0.0;
    for (i, x) in v.iter().enumerate() {
        for y in &v[i + 1..] {
            s = s.max((x - y).norm());
        }
    }
    s
}

/// Entries `T(c_n(a), c_n(b))` over the tail, accepted when every entry
/// varies by less than `tol`.
pub fn empirical_limit_operator(
    t: &BandOperator,
    frame: &Frame,
    tail: usize,
    tol: f64,
) -> Result<LimitOperator> {
    let tl = frame.tail(tail)?;
    let m = frame.local.len();
    if tl.iter().any(|(_, c)| c.len() != m) {
        return Err(Error::InvalidArgument(
            "charts do not match the local window".to_string(),
        ));
    }
    let last = tl.last().expect("tail is non-empty").1;
    let mut triplets = Vec::new();
    let mut osc = Vec::new();
    let mut worst: f64 = 0.0;
    for a in 0..m {
        // Only pairs seen in some tail term can be nonzero.
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for (_, c) in &tl {
            let (cols, _) = t.row(c[a]);
            for b in 0..m {
                if cols.binary_search(&(c[b] as u32)).is_ok() {
                    seen.insert(b);
                }
            }
        }
        for b in seen {
            let v = tail_values(t, &tl, a, b);
            let s = spread(&v);
            worst = worst.max(s);
            if s > 0.0 {
                osc.push((a, b, s));
            }
            triplets.push((a, b, t.get(last[a], last[b])));
        }
    }
    if !(worst < tol) && worst > 0.0 {
        return Err(Error::NoEmpiricalLimit {
            offending: osc.into_iter().filter(|e| !(e.2 < tol)).collect(),
            worst,
        });
    }
    Ok(LimitOperator {
        operator: BandOperator::from_triplets(frame.local.clone(), triplets)?,
        oscillation: osc,
        max_oscillation: worst,
        terms: tl.iter().map(|(i, _)| *i).collect(),
    })
}

/// How a vanishing verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitMethod {
    /// Every tail entry is below `ε` and moves by less than `ε`.
    Entrywise,
    /// The local sup norms settle to a limit.
    Cauchy,
    /// The local sup norms decrease strictly; limit by Aitken extrapolation.
    Extrapolated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vanishing {
    pub vanishes: bool,
    pub limit: f64,
    pub method: LimitMethod,
    /// `max |T|` over each tail window.
    pub local_sup: Vec<f64>,
}

fn local_sup(t: &BandOperator, chart: &[usize]) -> f64 {
    let set: PointSet = chart.iter().copied().collect();
    t.window_restrict(&set, &set).sup_norm()
}

/// Does `T` vanish along the frame? Equal-size windows are decided
/// entrywise: every tail entry below `ε` and moving by less than `ε`.
/// Windows of different sizes are judged by their local sup norms `m_n`: a
/// settled sequence gives its last value, a strictly decreasing one of
/// length at least three is extrapolated, anything else has no empirical
/// limit.
pub fn vanishing_in_direction(
    t: &BandOperator,
    frame: &Frame,
    tail: usize,
    eps: f64,
) -> Result<Vanishing> {
    let tl = frame.tail(tail)?;
    let sups: Vec<f64> = tl.iter().map(|(_, c)| local_sup(t, c)).collect();
    let m_last = *sups.last().expect("tail is non-empty");
    let uniform = tl.iter().all(|(_, c)| c.len() == frame.local.len());
    if uniform {
        let m = frame.local.len();
        let mut ok = true;
        'outer: for a in 0..m {
            for b in 0..m {
                let v = tail_values(t, &tl, a, b);
                if v.iter().any(|z| !(z.norm() < eps)) || !(spread(&v) < eps) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        let limit = if ok {
            m_last
        } else {
            sups.iter().copied().fold(0.0, f64::max)
        };
        return Ok(Vanishing {
            vanishes: ok,
            limit,
            method: LimitMethod::Entrywise,
            local_sup: sups,
        });
    } else if sups.iter().all(|&s| s < eps / 2.0) {
        return Ok(Vanishing {
            vanishes: true,
            limit: m_last,
            method: LimitMethod::Entrywise,
            local_sup: sups,
        });
    }
    let lo = sups.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sups.iter().copied().fold(0.0, f64::max);
    if hi - lo < DEFAULT_TOL {
        return Ok(Vanishing {
            vanishes: m_last < eps,
            limit: m_last,
            method: LimitMethod::Cauchy,
            local_sup: sups,
        });
    }
    let k = sups.len();
    if k >= 3 && sups.windows(2).all(|w| w[1] < w[0]) {
        let (x0, x1, x2) = (sups[k - 3], sups[k - 2], sups[k - 1]);
        let d2 = x2 - 2.0 * x1 + x0;
        let limit = if d2 > 0.0 {
            (x2 - (x2 - x1) * (x2 - x1) / d2).clamp(0.0, x2)
        } else {
            x2
        };
        return Ok(Vanishing {
            vanishes: limit < eps,
            limit,
            method: LimitMethod::Extrapolated,
            local_sup: sups,
        });
    }
    Err(Error::NoEmpiricalLimit {
        offending: tl
            .iter()
            .zip(&sups)
            .map(|((i, _), &s)| (*i, *i, s))
            .collect(),
        worst: hi - lo,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossValidation {
    pub ghostly: GhostlyVerdict,
    pub directions: Vec<Vanishing>,
    /// Vanishing in every supplied direction.
    pub vanishes: bool,
    pub agree: bool,
    /// The smallest grid value, used as the vanishing threshold.
    pub eps: f64,
}

/// Compares the ε-support test with vanishing along frames that escape the
/// family. Every tail window must lie beyond `k_cap` from all generators.
pub fn cross_validate_ghostly(
    t: &BandOperator,
    family: &IdealFamily,
    frames: &[Frame],
    eps_grid: &[f64],
    k_cap: f64,
    tail: usize,
) -> Result<CrossValidation> {
    let eps = eps_grid.iter().copied().fold(f64::INFINITY, f64::min);
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(
            "ε grid must be positive and non-empty".to_string(),
        ));
    }
    let near: Vec<bool> = {
        let mut mask = vec![false; t.dim()];
        for i in 0..family.generators().len() {
            for (m, &d) in mask.iter_mut().zip(family.generator_distances(i)) {
                *m |= d <= k_cap;
            }
        }
        mask
    };
    for (s, f) in frames.iter().enumerate() {
        for (i, c) in f.tail(tail)? {
            if c.iter().any(|&p| near[p]) {
                return Err(Error::NotEscaping {
                    sequence: s,
                    index: i,
                });
            }
        }
    }
    let ghostly = ghostly_membership(t, family, eps_grid, k_cap);
    let directions = frames
        .iter()
        .map(|f| vanishing_in_direction(t, f, tail, eps))
        .collect::<Result<Vec<_>>>()?;
    let vanishes = directions.iter().all(|d| d.vanishes);
    Ok(CrossValidation {
        agree: vanishes == ghostly.member,
        ghostly,
        directions,
        vanishes,
        eps,
    })
}

/// `{h ∈ H : h − g ∈ H, h <= bound}`.
pub fn translate_intersection(h: &[i64], g: i64, bound: i64) -> Vec<i64> {
    let set: BTreeSet<i64> = h.iter().copied().filter(|&x| x <= bound).collect();
    set.iter()
        .copied()
        .filter(|&x| set.contains(&(x - g)))
        .collect()
}

/// Evidence that large-index pairs of `H` are far apart.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsityCertificate {
    /// Smallest `N` with `min_{m ≠ n, m + n >= N} |h_n − h_m| > needed`.
    pub index: usize,
    pub gap: i64,
    pub needed: i64,
}

/// `N ↦ min_{m ≠ n, m + n >= N} |h_n − h_m|` over the sorted distinct set.
pub fn sparsity_profile(h: &[i64]) -> Vec<i64> {
    let mut v = h.to_vec();
    v.sort_unstable();
    v.dedup();
    let k = v.len();
    let mut by_sum = vec![i64::MAX; 2 * k];
    for n in 0..k {
        for m in n + 1..k {
            by_sum[n + m] = by_sum[n + m].min(v[m] - v[n]);
        }
    }
    for s in (0..by_sum.len().saturating_sub(1)).rev() {
        by_sum[s] = by_sum[s].min(by_sum[s + 1]);
    }
    by_sum
}

/// Pairs with index sum at least some `N <= |H|` are more than `needed`
/// apart.
pub fn sparsity_certificate(h: &[i64], needed: i64) -> Result<SparsityCertificate> {
    let prof = sparsity_profile(h);
    let k = prof.len() / 2;
    match (0..=k.min(prof.len().saturating_sub(1)))
        .find(|&n| prof[n] > needed && prof[n] != i64::MAX)
    {
        Some(index) => Ok(SparsityCertificate {
            index,
            gap: prof[index],
            needed,
        }),
        None => Err(Error::NotSparse {
            gap: prof.get(k).copied().unwrap_or(0),
            needed,
        }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisjointTranslates {
    /// `(g_n, B_n)` for `n = 0..=n_max`, with `g_n = n`.
    pub pairs: Vec<(i64, Vec<i64>)>,
    /// `|H \ B_n|` per pair.
    pub removed: Vec<usize>,
    /// The sets `B_n + g_n` are pairwise disjoint.
    pub disjoint: bool,
    pub certificate: SparsityCertificate,
}

/// `B_n = H \ ((H − 1) ∪ .. ∪ (H − n))`, so that the translates `B_n + n`
/// are pairwise disjoint. Refused unless `H` carries a sparsity
/// certificate for gaps beyond `n_max`.
pub fn build_disjoint_translates(
    h: &[i64],
    n_max: usize,
    bound: i64,
) -> Result<DisjointTranslates> {
    let set: BTreeSet<i64> = h.iter().copied().filter(|&x| x <= bound).collect();
    let hv: Vec<i64> = set.iter().copied().collect();
    let certificate = sparsity_certificate(&hv, n_max as i64)?;
    let mut pairs = Vec::with_capacity(n_max + 1);
    let mut removed = Vec::with_capacity(n_max + 1);
    let mut b = hv.clone();
    for n in 0..=n_max as i64 {
        if n > 0 {
            b.retain(|&x| !set.contains(&(x + n)));
        }
        removed.push(hv.len() - b.len());
        pairs.push((n, b.clone()));
    }
    let mut all: Vec<i64> = pairs
        .iter()
        .flat_map(|(g, b)| b.iter().map(move |x| x + g))
        .collect();
    let total = all.len();
    all.sort_unstable();
    all.dedup();
    Ok(DisjointTranslates {
        disjoint: all.len() == total,
        pairs,
        removed,
        certificate,
    })
}

/// Named integer sets up to `bound`: `squares`, `powers:b`, `affine:a,b`.
pub fn named_sequence(name: &str, bound: i64) -> Result<Vec<i64>> {
    let unknown = || Error::UnknownGenerator(String::from(name));
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (name.trim(), None),
    };
    match (head, arg) {
        ("squares", None) => Ok((0i64..)
            .map(|k| k * k)
            .take_while(|&v| v <= bound)
            .collect()),
        ("powers", Some(a)) => {
            let base: i64 = a.parse().map_err(|_| unknown())?;
            if base < 2 {
                return Err(unknown());
            }
            let mut out = Vec::new();
            let mut v = 1i64;
            while v <= bound {
                out.push(v);
                match v.checked_mul(base) {
                    Some(n) => v = n,
                    None => break,
                }
            }
            Ok(out)
        }
        ("affine", Some(a)) => {
            let (p, q) = a.split_once(',').ok_or_else(unknown)?;
            let p: i64 = p.trim().parse().map_err(|_| unknown())?;
            let q: i64 = q.trim().parse().map_err(|_| unknown())?;
            if p < 1 {
                return Err(unknown());
            }
            Ok((0i64..)
                .map(|n| p * n + q)
                .take_while(|&v| v <= bound)
                .filter(|&v| v >= 0)
                .collect())
        }
        _ => Err(unknown()),
    }
}
