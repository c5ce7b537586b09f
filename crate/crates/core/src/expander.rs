//! Random regular expanders, constant projections and their band
//! approximants, and the disjoint union of expander copies carrying a
//! partial ghost projection.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ideals::IdealFamily;
use crate::limitop::{DirectionSequence, Frame};
use crate::linalg;
use crate::operator::BandOperator;
use crate::space::{CoarseSpace, PointSet, Separation};
use crate::witness::{resistance_check, ResistanceReport};

pub const DEFAULT_RETRIES: usize = 20;

/// A `d`-regular simple graph with its adjacency spectrum.
#[derive(Clone, Debug)]
pub struct ExpanderGraph {
    pub n: usize,
    pub d: usize,
    pub edges: Vec<(usize, usize)>,
    /// Largest modulus among the non-trivial adjacency eigenvalues.
    pub lambda: f64,
    /// Adjacency eigenvalues, ascending.
    pub spectrum: Vec<f64>,
    pub seed: u64,
    pub attempts: usize,
}

impl ExpanderGraph {
    /// Builds the graph from an edge list and certifies it.
    pub fn from_edges(n: usize, d: usize, edges: Vec<(usize, usize)>, seed: u64) -> Result<Self> {
        let mut deg = vec![0usize; n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::PointOutOfRange {
                    point: u.max(v),
                    len: n,
                });
            }
            deg[u] += 1;
            deg[v] += 1;
        }
        if deg.iter().any(|&k| k != d) {
            return Err(Error::InvalidDegree {
                n,
                d,
                reason: "graph is not regular",
            });
        }
        let spectrum = adjacency_spectrum(n, &edges);
        Ok(ExpanderGraph {
            n,
            d,
            lambda: second_modulus(&spectrum),
            edges,
            spectrum,
            seed,
            attempts: 1,
        })
    }

    pub fn space(&self) -> Result<CoarseSpace> {
        CoarseSpace::graph_with_len(self.n, &self.edges, None)
    }
}

fn adjacency_spectrum(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    for &(u, v) in edges {
        a[u * n + v] += 1.0;
        a[v * n + u] += 1.0;
    }
    linalg::symmetric_eigenvalues(a, n)
}

fn second_modulus(spectrum: &[f64]) -> f64 {
    let n = spectrum.len();
    if n < 2 {
        return 0.0;
    }
    spectrum[n - 2].max(-spectrum[0])
}

/// `d` random perfect matchings on `n` vertices, resampled until their
/// union is simple and its second eigenvalue modulus is at most
/// `lambda_max`.
pub fn random_regular_expander(
    n: usize,
    d: usize,
    lambda_max: f64,
    seed: u64,
    retries: usize,
) -> Result<ExpanderGraph> {
    if (n * d) % 2 == 1 {
        return Err(Error::InvalidDegree {
            n,
            d,
            reason: "n·d is odd",
        });
    }
    if n % 2 == 1 {
        return Err(Error::InvalidDegree {
            n,
            d,
            reason: "the matching model needs even n",
        });
    }
    if d < 3 {
        return Err(Error::InvalidDegree {
            n,
            d,
            reason: "degree below 3",
        });
    }
    if d >= n {
        return Err(Error::InvalidDegree {
            n,
            d,
            reason: "degree must be below n",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for attempt in 1..=retries.max(1) {
        let Some(edges) = sample_matchings(n, d, &mut rng) else {
            continue;
        };
        let spectrum = adjacency_spectrum(n, &edges);
        let lambda = second_modulus(&spectrum);
        best = best.min(lambda);
        if lambda <= lambda_max {
            return Ok(ExpanderGraph {
                n,
                d,
                edges,
                lambda,
                spectrum,
                seed,
                attempts: attempt,
            });
        }
    }
    Err(Error::RetriesExhausted {
        retries: retries.max(1),
        best_lambda: best,
    })
}

fn sample_matchings(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
    let mut adj = vec![false; n * n];
    let mut edges = Vec::with_capacity(n * d / 2);
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..d {
        let mut placed = false;
        for _ in 0..200 {
            perm.shuffle(rng);
            if perm.chunks(2).all(|p| !adj[p[0] * n + p[1]]) {
                for p in perm.chunks(2) {
                    let (u, v) = (p[0].min(p[1]), p[0].max(p[1]));
                    adj[u * n + v] = true;
                    adj[v * n + u] = true;
                    edges.push((u, v));
                }
                placed = true;
                break;
            }
        }
        if !placed {
            return None;
        }
    }
    edges.sort_unstable();
    Some(edges)
}

/// Certified `d`-regular graphs of increasing size.
#[derive(Clone, Debug)]
pub struct ExpanderFamily {
    pub graphs: Vec<ExpanderGraph>,
}

impl ExpanderFamily {
    /// Graph `i` is drawn with seed `seed + i`.
    pub fn generate(
        sizes: &[usize],
        d: usize,
        lambda_max: f64,
        seed: u64,
        retries: usize,
    ) -> Result<Self> {
        for (i, w) in sizes.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::NonIncreasingSchedule(i + 1));
            }
        }
        let graphs = sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                random_regular_expander(n, d, lambda_max, seed.wrapping_add(i as u64), retries)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExpanderFamily { graphs })
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.graphs.iter().map(|g| g.n).collect()
    }
}

/// `⊕_B P_B` where `P_B` has every entry `1/|B|` on `B × B`.
pub fn constant_projection(space: Arc<CoarseSpace>, blocks: &[PointSet]) -> Result<BandOperator> {
    for (i, a) in blocks.iter().enumerate() {
        space.check_set(a)?;
        for (j, b) in blocks.iter().enumerate().skip(i + 1) {
            if !a.is_disjoint(b) {
                return Err(Error::OverlappingBlocks(i, j));
            }
        }
    }
    let mut t = Vec::new();
    for b in blocks {
        let w = Complex64::new(1.0 / b.len() as f64, 0.0);
        for x in b.iter() {
            for y in b.iter() {
                t.push((x, y, w));
            }
        }
    }
    BandOperator::from_triplets(space, t)
}

/// `T_m(x)` for `|x| >= 1` and in general by the recurrence.
pub fn chebyshev_t(m: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if m == 0 {
        return 1.0;
    }
    for _ in 1..m {
        let c = 2.0 * x * b - a;
        a = b;
        b = c;
    }
    b
}

/// `p_m(x) = (T_m(x/ρ) + 1) / (T_m(1/ρ) + 1)`: `p(1) = 1`, `0 <= p` on
/// `[-ρ, ρ]`, and `p <= 2 / (T_m(1/ρ) + 1)` there.
pub fn positive_filter(m: usize, rho: f64, x: f64) -> f64 {
    (chebyshev_t(m, x / rho) + 1.0) / (chebyshev_t(m, 1.0 / rho) + 1.0)
}

/// `2 / (T_m(d/λ) + 1)`.
pub fn chebyshev_bound(m: usize, lambda: f64, d: f64) -> f64 {
    2.0 / (chebyshev_t(m, d / lambda) + 1.0)
}

/// Least `m` with [`chebyshev_bound`] at most `delta`.
pub fn chebyshev_degree(lambda: f64, d: f64, delta: f64) -> Result<usize> {
    if !(lambda < d) {
        return Err(Error::DegenerateSpectrum { lambda, degree: d });
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("δ must be positive".into()));
    }
    let mut m = 0;
    while chebyshev_bound(m, lambda, d) > delta {
        m += 1;
        if m > 100_000 {
            return Err(Error::InvalidArgument("δ too small for this gap".into()));
        }
    }
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct BandApprox {
    pub operator: BandOperator,
    pub degree: usize,
    /// `max |p(μ/d)|` over the non-trivial spectrum: `‖a − P‖`, plus a
    /// rounding allowance.
    pub error_bound: f64,
    /// `2 / (T_m(d/λ) + 1)`, from the certificate alone.
    pub analytic_bound: f64,
}

/// `a = p_m(A/d)` on the graph's own space, with `ρ = λ/d`.
pub fn chebyshev_band_approx(
    graph: &ExpanderGraph,
    space: Arc<CoarseSpace>,
    lambda: f64,
    m: usize,
) -> Result<BandApprox> {
    let d = graph.d as f64;
    if !(lambda < d) {
        return Err(Error::DegenerateSpectrum { lambda, degree: d });
    }
    let a = BandOperator::from_real(
        space.clone(),
        graph
            .edges
            .iter()
            .flat_map(|&(u, v)| [(u, v, 1.0 / lambda), (v, u, 1.0 / lambda)]),
    )?;
    let id = BandOperator::identity(space);
    // U_k = T_k(A/λ), by the three-term recurrence.
    let mut prev = id.clone();
    let mut cur = if m == 0 { id.clone() } else { a.clone() };
    for _ in 1..m.max(1) {
        let next = a
            .multiply(&cur)?
            .scale(Complex64::new(2.0, 0.0))
            .sub(&prev)?;
        prev = cur;
        cur = next;
    }
    let scale = 1.0 / (chebyshev_t(m, d / lambda) + 1.0);
    let op = cur.add(&id)?.scale(Complex64::new(scale, 0.0));
    let rho = lambda / d;
    let n = graph.spectrum.len();
    let exact = graph.spectrum[..n.saturating_sub(1)]
        .iter()
        .map(|&mu| positive_filter(m, rho, mu / d).abs())
        .fold(0.0, f64::max);
    Ok(BandApprox {
        operator: op,
        degree: m,
        error_bound: exact + 1e-12,
        analytic_bound: chebyshev_bound(m, lambda, d),
    })
}

/// The disjoint union `Y = ⊔ Y_{i,j}` of copies `Y_{i,j} = X_i`, with
/// `d(Y_{i,j}, Y_{k,l}) = f(i + j + k + l)` (indices from 1).
#[derive(Clone, Debug)]
pub struct ColumnSpace {
    pub space: Arc<CoarseSpace>,
    pub projection: BandOperator,
    /// Generated by the columns `⊔_j Y_{i,j}`.
    pub columns: IdealFamily,
    /// `blocks[i][j]` is `Y_{i+1, j+1}`.
    pub blocks: Vec<Vec<PointSet>>,
    pub sizes: Vec<usize>,
    pub j_max: usize,
}

/// `f(s) = slope · s`, for `s = 0..len`.
pub fn linear_schedule(len: usize, slope: f64) -> Vec<f64> {
    (0..len).map(|s| slope * s as f64).collect()
}

/// Entries needed in a schedule for `columns` columns of `j_max` copies.
pub fn schedule_len(columns: usize, j_max: usize) -> usize {
    2 * (columns + j_max) + 1
}

pub fn column_space(
    family: &ExpanderFamily,
    j_max: usize,
    separation: &[f64],
) -> Result<ColumnSpace> {
    let cols = family.graphs.len();
    if cols == 0 || j_max == 0 {
        return Err(Error::InvalidArgument(
            "need at least one column and one copy".into(),
        ));
    }
    let needed = schedule_len(cols, j_max);
    if separation.len() < needed {
        return Err(Error::ScheduleTooShort {
            needed,
            got: separation.len(),
        });
    }
    for (i, w) in separation.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonIncreasingSchedule(i + 1));
        }
    }
    let mut edges = Vec::new();
    let mut blocks = Vec::with_capacity(cols);
    let mut labels = Vec::new();
    let mut offset = 0;
    for (i, g) in family.graphs.iter().enumerate() {
        let mut col = Vec::with_capacity(j_max);
        for j in 0..j_max {
            edges.extend(g.edges.iter().map(|&(u, v)| (u + offset, v + offset)));
            col.push(PointSet::range(offset..offset + g.n));
            labels.push((i + 1, j + 1));
            offset += g.n;
        }
        blocks.push(col);
    }
    let mut pairwise = Vec::new();
    for (a, &(i, j)) in labels.iter().enumerate() {
        for &(k, l) in &labels[a + 1..] {
            pairwise.push(separation[i + j + k + l]);
        }
    }
    let space = Arc::new(CoarseSpace::graph_with_len(
        offset,
        &edges,
        Some(Separation::Pairwise(pairwise)),
    )?);
    let flat: Vec<PointSet> = blocks.iter().flatten().cloned().collect();
    let projection = constant_projection(space.clone(), &flat)?;
    let columns = IdealFamily::new(
        space.clone(),
        blocks
            .iter()
            .map(|c| c.iter().fold(PointSet::new(), |acc, b| acc.union(b)))
            .collect(),
    )?;
    Ok(ColumnSpace {
        space,
        projection,
        columns,
        blocks,
        sizes: family.sizes(),
        j_max,
    })
}

impl ColumnSpace {
    /// `Y_{i,j}`, indices from 1.
    pub fn block(&self, i: usize, j: usize) -> &PointSet {
        &self.blocks[i - 1][j - 1]
    }

    pub fn columns_count(&self) -> usize {
        self.blocks.len()
    }

    /// `F_k = ⊔_{j <= k} Y_{i,j}` over all columns, `k = 1..=j_max`.
    pub fn j_exhaustion(&self) -> Vec<PointSet> {
        (1..=self.j_max)
            .map(|k| {
                self.blocks
                    .iter()
                    .flat_map(|c| c[..k].iter())
                    .fold(PointSet::new(), |acc, b| acc.union(b))
            })
            .collect()
    }

    /// First points of `Y_{1,j0}, Y_{2,j0}, ..`.
    pub fn i_direction(&self, j0: usize) -> Result<DirectionSequence> {
        let pts = (1..=self.columns_count())
            .map(|i| self.block(i, j0).as_slice()[0])
            .collect();
        DirectionSequence::new(&self.space, pts)
    }

    /// First points of `Y_{i0,1}, Y_{i0,2}, ..`.
    pub fn j_direction(&self, i0: usize) -> Result<DirectionSequence> {
        let pts = (1..=self.j_max)
            .map(|j| self.block(i0, j).as_slice()[0])
            .collect();
        DirectionSequence::new(&self.space, pts)
    }

    /// Charts are whole blocks, so their sizes grow with `i`.
    pub fn i_direction_frame(&self, family: &ExpanderFamily, j0: usize) -> Result<Frame> {
        let local = Arc::new(family.graphs[0].space()?);
        let charts = (1..=self.columns_count())
            .map(|i| self.block(i, j0).as_slice().to_vec())
            .collect();
        Ok(Frame::explicit(local, charts))
    }

    /// Every chart identifies `X_{i0}` with a copy `Y_{i0,j}`.
    pub fn j_direction_frame(&self, family: &ExpanderFamily, i0: usize) -> Result<Frame> {
        let local = Arc::new(family.graphs[i0 - 1].space()?);
        let charts = (1..=self.j_max)
            .map(|j| self.block(i0, j).as_slice().to_vec())
            .collect();
        Ok(Frame::explicit(local, charts))
    }
}

/// Band approximants of constant projections on growing expanders, placed
/// far apart in one space, with their resistance certificate.
#[derive(Clone, Debug)]
pub struct ResistanceBlocks {
    pub space: Arc<CoarseSpace>,
    pub blocks: Vec<(BandOperator, PointSet)>,
    pub approximations: Vec<BandApprox>,
    /// `‖a_n − P_n‖` bounds.
    pub errors: Vec<f64>,
    pub norms: Vec<f64>,
    pub report: ResistanceReport,
    /// Largest localization constant found.
    pub kappa: f64,
    /// `⊕ a_n`.
    pub sum: BandOperator,
}

/// Degrees are the least with [`chebyshev_bound`] at most `delta`. Blocks
/// are separated by `separation`, which must exceed every `S_n`.
pub fn resistance_blocks(
    family: &ExpanderFamily,
    kappa_target: f64,
    s_schedule: &[f64],
    delta: f64,
    separation: f64,
) -> Result<ResistanceBlocks> {
    if s_schedule.len() < family.graphs.len() {
        return Err(Error::ScheduleTooShort {
            needed: family.graphs.len(),
            got: s_schedule.len(),
        });
    }
    let mut approximations = Vec::new();
    for (i, (g, &s)) in family.graphs.iter().zip(s_schedule).enumerate() {
        let local = Arc::new(g.space()?);
        let ball = local.geometry_profile(s) as f64;
        let achieved = (ball / g.n as f64).sqrt() + delta;
        if achieved > kappa_target {
            return Err(Error::GrowthUnsatisfiable {
                kappa: kappa_target,
                block: i,
                achieved,
            });
        }
        let m = chebyshev_degree(g.lambda, g.d as f64, delta)?;
        approximations.push(chebyshev_band_approx(g, local, g.lambda, m)?);
    }
    let mut edges = Vec::new();
    let mut ranges = Vec::new();
    let mut offset = 0;
    for g in &family.graphs {
        edges.extend(g.edges.iter().map(|&(u, v)| (u + offset, v + offset)));
        ranges.push(offset);
        offset += g.n;
    }
    let space = Arc::new(CoarseSpace::graph_with_len(
        offset,
        &edges,
        Some(Separation::Uniform(separation)),
    )?);
    let mut blocks = Vec::new();
    let mut all = Vec::new();
    for ((g, a), &off) in family.graphs.iter().zip(&approximations).zip(&ranges) {
        let trip: Vec<(usize, usize, Complex64)> = a
            .operator
            .entries()
            .map(|(x, y, v)| (x + off, y + off, v))
            .collect();
        all.extend(trip.iter().copied());
        blocks.push((
            BandOperator::from_triplets(space.clone(), trip)?,
            PointSet::range(off..off + g.n),
        ));
    }
    let report = resistance_check(&blocks, kappa_target, s_schedule)?;
    let kappa = report.constants.iter().copied().fold(0.0, f64::max);
    Ok(ResistanceBlocks {
        norms: report.block_norms.clone(),
        errors: approximations.iter().map(|a| a.error_bound).collect(),
        sum: BandOperator::from_triplets(space.clone(), all)?,
        space,
        blocks,
        approximations,
        report,
        kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::{default_eps_grid, default_k_cap, ghostly_membership};
    use crate::limitop::{empirical_limit_operator, vanishing_in_direction};

    #[test]
    fn k4_is_the_only_cubic_graph_on_four_vertices() {
        let g = random_regular_expander(4, 3, 2.0, 1, 50).unwrap();
        assert_eq!(g.edges.len(), 6);
        assert!((g.lambda - 1.0).abs() < 1e-12);
        let a = chebyshev_band_approx(&g, Arc::new(g.space().unwrap()), g.lambda, 1).unwrap();
        assert!(a.error_bound < 1e-11);
        let p = constant_projection(a.operator.space().clone(), &[PointSet::range(0..4)]).unwrap();
        assert!(a.operator.sub(&p).unwrap().sup_norm() < 1e-14);
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(
            random_regular_expander(5, 3, 2.9, 0, 5),
            Err(Error::InvalidDegree { .. })
        ));
        assert!(matches!(
            random_regular_expander(10, 2, 2.9, 0, 5),
            Err(Error::InvalidDegree { .. })
        ));
        assert!(matches!(
            random_regular_expander(30, 3, 0.1, 0, 3),
            Err(Error::RetriesExhausted { retries: 3, .. })
        ));
    }

    #[test]
    fn expander_of_hundred_vertices() {
        let g = random_regular_expander(100, 3, 2.9, 7, DEFAULT_RETRIES).unwrap();
        assert!(g.lambda <= 2.9);
        let again = random_regular_expander(100, 3, 2.9, 7, DEFAULT_RETRIES).unwrap();
        assert_eq!(g.edges, again.edges);
        let space = Arc::new(g.space().unwrap());
        let p = constant_projection(space.clone(), &[space.all()]).unwrap();
        let m = chebyshev_degree(g.lambda, 3.0, 0.05).unwrap();
        let a = chebyshev_band_approx(&g, space, g.lambda, m).unwrap();
        assert!(a.error_bound <= a.analytic_bound + 1e-12);
        assert!(a.error_bound <= 0.05);
        assert!(a.operator.propagation() <= m as f64);
        let diff = a.operator.sub(&p).unwrap().norm().unwrap();
        assert!(diff <= a.error_bound);
        let zero = chebyshev_band_approx(&g, p.space().clone(), g.lambda, 0).unwrap();
        assert_eq!(zero.operator, BandOperator::identity(p.space().clone()));
        assert!((zero.error_bound - 1.0).abs() < 1e-9);
        assert!(chebyshev_band_approx(&g, p.space().clone(), 3.0, 3).is_err());
    }

    #[test]
    fn chebyshev_degree_at_the_usual_gap() {
        assert_eq!(chebyshev_degree(2.9, 3.0, 0.05).unwrap(), 17);
        assert!(chebyshev_bound(18, 2.9, 3.0) < chebyshev_bound(17, 2.9, 3.0));
    }

    #[test]
    fn constant_projection_examples() {
        let s = Arc::new(
            CoarseSpace::graph(
                &[(0, 1), (2, 3), (3, 4), (4, 5)],
                Some(Separation::Uniform(3.0)),
            )
            .unwrap(),
        );
        let p = constant_projection(s.clone(), &[PointSet::range(0..2), PointSet::range(2..6)])
            .unwrap();
        assert_eq!(p.get(0, 1).re, 0.5);
        assert_eq!(p.get(3, 5).re, 0.25);
        assert!(p.multiply(&p).unwrap().sub(&p).unwrap().sup_norm() < 1e-15);
        assert_eq!(p.adjoint(), p);
        assert!((p.norm().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            constant_projection(s, &[PointSet::range(0..3), PointSet::range(2..4)]).unwrap_err(),
            Error::OverlappingBlocks(0, 1)
        );
    }

    fn small_columns() -> (ExpanderFamily, ColumnSpace) {
        let fam = ExpanderFamily::generate(&[10, 20, 40], 3, 2.99, 11, 50).unwrap();
        let w = column_space(&fam, 5, &linear_schedule(schedule_len(3, 5), 10.0)).unwrap();
        (fam, w)
    }

    #[test]
    fn column_space_structure() {
        let (fam, w) = small_columns();
        assert_eq!(w.space.len(), 5 * 70);
        let x = w.block(2, 3).as_slice()[0];
        let y = w.block(1, 4).as_slice()[0];
        assert_eq!(w.space.distance(x, y), 100.0);
        let p = &w.projection;
        assert!(p.multiply(p).unwrap().sub(p).unwrap().sup_norm() < 1e-12);
        assert!((p.norm().unwrap() - 1.0).abs() < 1e-12);

        let grid = default_eps_grid();
        let k = default_k_cap(&w.space);
        assert!(ghostly_membership(p, &w.columns, &grid, k).member);
        let fin = IdealFamily::finite_sets_at_basepoint(w.space.clone()).unwrap();
        assert!(!ghostly_membership(p, &fin, &grid, k).member);

        let prof = p.ghost_profile(&w.j_exhaustion()).unwrap();
        assert!(prof[..4].iter().all(|&g| g >= 0.1));
        assert_eq!(prof[4], 0.0);

        let col1 =
            IdealFamily::spatial(w.space.clone(), w.columns.generators()[0].clone()).unwrap();
        assert!(!col1.contains(w.block(2, 5), 89.0));
        assert!(col1.contains(w.block(2, 5), 90.0));

        let vi =
            vanishing_in_direction(p, &w.i_direction_frame(&fam, 1).unwrap(), 3, 2f64.powi(-12))
                .unwrap();
        assert!(vi.vanishes);
        for i in 1..=3 {
            let f = w.j_direction_frame(&fam, i).unwrap();
            let vj = vanishing_in_direction(p, &f, 5, 2f64.powi(-12)).unwrap();
            assert!(!vj.vanishes);
            let lim = empirical_limit_operator(p, &f, 5, 1e-9).unwrap();
            let e = 1.0 / fam.graphs[i - 1].n as f64;
            assert!(lim.operator.entries().all(|(_, _, v)| v.re == e));
            assert_eq!(lim.operator.nnz(), fam.graphs[i - 1].n.pow(2));
        }
        assert!(w.i_direction(1).is_ok() && w.j_direction(2).is_ok());
    }

    #[test]
    fn column_schedule_errors() {
        let fam = ExpanderFamily::generate(&[10], 3, 2.99, 1, 50).unwrap();
        assert!(matches!(
            column_space(&fam, 3, &[1.0, 2.0]),
            Err(Error::ScheduleTooShort { .. })
        ));
        let single = column_space(&fam, 1, &linear_schedule(5, 10.0)).unwrap();
        assert_eq!(single.space.len(), 10);
    }

    #[test]
    fn resistance_on_small_blocks() {
        let fam = ExpanderFamily::generate(&[60, 120], 3, 2.9, 5, 50).unwrap();
        let r = resistance_blocks(&fam, 0.6, &[1.0, 2.0], 0.05, 50.0).unwrap();
        assert!(r.report.passed);
        assert!(r.kappa <= 0.6);
        assert!(r.norms.iter().all(|&n| (0.95..=1.0 + 1e-9).contains(&n)));
        assert!(matches!(
            resistance_blocks(&fam, 0.1, &[1.0, 2.0], 0.05, 50.0),
            Err(Error::GrowthUnsatisfiable { .. })
        ));
    }
}
