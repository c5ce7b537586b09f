//! Ideals in a space, represented by finitely many generating sets.
//!
//! A set `Z` belongs to the family generated by `A_1, .., A_m` when it sits
//! inside `N_k(A_{i_1} ∪ .. ∪ A_{i_n})` for some `k`. At finite scale every
//! neighbourhood eventually swallows the whole space, so `k` is capped by
//! `k_cap`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::operator::BandOperator;
use crate::space::{within, CoarseSpace, PointSet, DIST_TOL};

/// Which construction produced a family; carried into reports.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyKind {
    Generated,
    Spatial,
    /// Finite sets, represented by neighbourhoods of a fixed core.
    FiniteSets,
    Principal,
}

#[derive(Clone, Debug)]
pub struct IdealFamily {
    space: Arc<CoarseSpace>,
    generators: Vec<PointSet>,
    kind: FamilyKind,
    dist: Vec<Vec<f64>>,
}

/// Witness for `Z ⊆ N_k(∪_{i ∈ generators} A_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipCertificate {
    pub generators: Vec<usize>,
    pub k: f64,
}

/// A set certified to lie in the family, with its certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub certificate: MembershipCertificate,
    pub set: PointSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GhostlyVerdict {
    pub member: bool,
    /// Largest ε in the grid whose row support falls outside the family.
    pub first_failing: Option<f64>,
    /// Per ε: the certificate, or `None` when membership fails.
    pub levels: Vec<(f64, Option<MembershipCertificate>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometricDistance {
    pub distance: f64,
    pub best: Candidate,
    pub candidates_tried: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockBound {
    pub bound: f64,
    /// The candidate attaining the minimum and the block used against it.
    pub worst: Candidate,
    pub block: Option<usize>,
    pub block_norms: Vec<f64>,
}

/// `2^{-1}, .., 2^{-12}`.
pub fn default_eps_grid() -> Vec<f64> {
    (1..=12).map(|k| 0.5f64.powi(k)).collect()
}

/// A quarter of the diameter.
pub fn default_k_cap(space: &CoarseSpace) -> f64 {
    space.diameter() / 4.0
}

impl IdealFamily {
    pub fn new(space: Arc<CoarseSpace>, generators: Vec<PointSet>) -> Result<Self> {
        Self::with_kind(space, generators, FamilyKind::Generated)
    }

    fn with_kind(
        space: Arc<CoarseSpace>,
        generators: Vec<PointSet>,
        kind: FamilyKind,
    ) -> Result<Self> {
        for g in &generators {
            space.check_set(g)?;
        }
        let dist = generators
            .iter()
            .map(|g| space.distances_to_set(g))
            .collect();
        Ok(IdealFamily {
            space,
            generators,
            kind,
            dist,
        })
    }

    /// The family `{Z : Z ⊆ N_R(A)}`.
    pub fn spatial(space: Arc<CoarseSpace>, a: PointSet) -> Result<Self> {
        Self::with_kind(space, vec![a], FamilyKind::Spatial)
    }

    /// Finite subsets. Singletons would generate everything at finite scale,
    /// so the family is represented by neighbourhoods of `core`.
    pub fn finite_sets(space: Arc<CoarseSpace>, core: PointSet) -> Result<Self> {
        Self::with_kind(space, vec![core], FamilyKind::FiniteSets)
    }

    /// Finite sets around the basepoint.
    pub fn finite_sets_at_basepoint(space: Arc<CoarseSpace>) -> Result<Self> {
        let b = space.basepoint();
        Self::finite_sets(space, PointSet::from_sorted(vec![b]))
    }

    /// Generated by the row supports `r(supp_ε(T))`, `ε` in `eps_grid`.
    /// Empty and repeated supports are dropped.
    pub fn principal(t: &BandOperator, eps_grid: &[f64]) -> Result<Self> {
        if eps_grid.is_empty() {
            return Err(Error::InvalidArgument("empty ε grid".into()));
        }
        let mut gens: Vec<PointSet> = Vec::new();
        for &e in eps_grid {
            let r = t.row_support(e);
            if !r.is_empty() && !gens.contains(&r) {
                gens.push(r);
            }
        }
        Self::with_kind(t.space().clone(), gens, FamilyKind::Principal)
    }

    pub fn space(&self) -> &Arc<CoarseSpace> {
        &self.space
    }

    pub fn generators(&self) -> &[PointSet] {
        &self.generators
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// Distance from every point to generator `i`.
    pub fn generator_distances(&self, i: usize) -> &[f64] {
        &self.dist[i]
    }

    fn union_distances(&self) -> Vec<f64> {
        let mut out = vec![f64::INFINITY; self.space.len()];
        for d in &self.dist {
            for (o, &v) in out.iter_mut().zip(d) {
                *o = o.min(v);
            }
        }
        out
    }

    /// Decides `Z ∈ L` with `k <= k_cap`. The radius is the smallest
    /// possible; generators are then chosen greedily by coverage.
    pub fn membership(&self, z: &PointSet, k_cap: f64) -> Option<MembershipCertificate> {
        if z.is_empty() {
            return Some(MembershipCertificate {
                generators: Vec::new(),
                k: 0.0,
            });
        }
        let union = self.union_distances();
        let k = z.iter().map(|x| union[x]).fold(0.0, f64::max);
        if !within(k, k_cap) {
            return None;
        }
        let mut left: Vec<usize> = z.iter().collect();
        let mut chosen = Vec::new();
        while !left.is_empty() {
            let (best, count) = (0..self.dist.len())
                .filter(|i| !chosen.contains(i))
                .map(|i| {
                    (
                        i,
                        left.iter().filter(|&&x| within(self.dist[i][x], k)).count(),
                    )
                })
                .fold((usize::MAX, 0), |acc, c| if c.1 > acc.1 { c } else { acc });
            debug_assert!(count > 0);
            if count == 0 {
                return None;
            }
            chosen.push(best);
            left.retain(|&x| !within(self.dist[best][x], k));
        }
        chosen.sort_unstable();
        Some(MembershipCertificate {
            generators: chosen,
            k,
        })
    }

    pub fn contains(&self, z: &PointSet, k_cap: f64) -> bool {
        self.membership(z, k_cap).is_some()
    }

    /// Sets certified in the family: `N_k` of the union of all generators
    /// and of each single generator, for every distance value `k <= k_cap`.
    /// Repeated sets are dropped.
    pub fn candidates(&self, k_cap: f64) -> Vec<Candidate> {
        let mut out: Vec<Candidate> = Vec::new();
        let all: Vec<usize> = (0..self.dist.len()).collect();
        let union = self.union_distances();
        let mut sources: Vec<(Vec<usize>, &[f64])> = vec![(all, &union)];
        for (i, d) in self.dist.iter().enumerate() {
            if self.dist.len() > 1 {
                sources.push((vec![i], d));
            }
        }
        for (gens, d) in sources {
            let mut radii: Vec<f64> = d
                .iter()
                .copied()
                .filter(|&v| v.is_finite() && within(v, k_cap))
                .collect();
            radii.sort_unstable_by(f64::total_cmp);
            radii.dedup_by(|a, b| (*a - *b).abs() <= DIST_TOL);
            for k in radii {
                let set = PointSet::from_sorted(
                    d.iter()
                        .enumerate()
                        .filter_map(|(x, &v)| within(v, k).then_some(x))
                        .collect(),
                );
                if out.iter().any(|c| c.set == set) {
                    continue;
                }
                out.push(Candidate {
                    certificate: MembershipCertificate {
                        generators: gens.clone(),
                        k,
                    },
                    set,
                });
            }
        }
        if out.is_empty() {
            out.push(Candidate {
                certificate: MembershipCertificate {
                    generators: Vec::new(),
                    k: 0.0,
                },
                set: PointSet::new(),
            });
        }
        out
    }
}

/// `r(supp_ε(T)) ∈ L` for every `ε` in the grid.
pub fn ghostly_membership(
    t: &BandOperator,
    family: &IdealFamily,
    eps_grid: &[f64],
    k_cap: f64,
) -> GhostlyVerdict {
    let mut grid = eps_grid.to_vec();
    grid.sort_unstable_by(|a, b| b.total_cmp(a));
    let levels: Vec<(f64, Option<MembershipCertificate>)> = grid
        .iter()
        .map(|&e| (e, family.membership(&t.row_support(e), k_cap)))
        .collect();
    let first_failing = levels.iter().find(|(_, c)| c.is_none()).map(|(e, _)| *e);
    GhostlyVerdict {
        member: first_failing.is_none(),
        first_failing,
        levels,
    }
}

/// `min_Y ‖T − χ_Y T χ_Y‖` over certified candidates `Y`; an upper bound
/// on the distance from `T` to the geometric ideal. Stops early once the
/// distance drops to `eps`.
pub fn geometric_distance(
    t: &BandOperator,
    family: &IdealFamily,
    eps: f64,
    k_cap: f64,
) -> Result<GeometricDistance> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("ε must be positive".into()));
    }
    let mut best: Option<(f64, Candidate)> = None;
    let mut tried = 0;
    for cand in family.candidates(k_cap) {
        tried += 1;
        let rest = t.sub(&t.window_restrict(&cand.set, &cand.set))?;
        let d = if rest.is_zero() { 0.0 } else { rest.norm()? };
        if best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, cand));
        }
        if d <= eps {
            break;
        }
    }
    let (distance, best) = best.expect("candidates are never empty");
    Ok(GeometricDistance {
        distance,
        best,
        candidates_tried: tried,
    })
}

/// `min_Y max_{B ∩ Y = ∅} ‖χ_B T χ_B‖` over certified candidates `Y`.
pub fn block_lower_bound(
    t: &BandOperator,
    family: &IdealFamily,
    blocks: &[PointSet],
    k_cap: f64,
) -> Result<BlockBound> {
    for (i, a) in blocks.iter().enumerate() {
        t.space().check_set(a)?;
        for (j, b) in blocks.iter().enumerate().skip(i + 1) {
            if !a.is_disjoint(b) {
                return Err(Error::OverlappingBlocks(i, j));
            }
        }
    }
    let block_norms = blocks
        .iter()
        .map(|b| {
            let r = t.window_restrict(b, b);
            if r.is_zero() {
                Ok(0.0)
            } else {
                r.norm()
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut worst: Option<(f64, Candidate, Option<usize>)> = None;
    for cand in family.candidates(k_cap) {
        let (value, block) = blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.is_disjoint(&cand.set))
            .map(|(i, _)| (block_norms[i], Some(i)))
            .fold((0.0, None), |acc, c| {
                if c.0 > acc.0 || acc.1.is_none() {
                    c
                } else {
                    acc
                }
            });
        if worst.as_ref().is_none_or(|(w, _, _)| value < *w) {
            worst = Some((value, cand, block));
        }
    }
    let (bound, worst, block) = worst.expect("candidates are never empty");
    Ok(BlockBound {
        bound,
        worst,
        block,
        block_norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{GridMetric, Separation};
    use proptest::prelude::*;

    fn line(n: usize) -> Arc<CoarseSpace> {
        Arc::new(CoarseSpace::grid(1, n, GridMetric::Sup).unwrap())
    }

    #[test]
    fn trivial_membership() {
        let s = line(20);
        let fam =
            IdealFamily::new(s, vec![PointSet::range(0..5), PointSet::range(10..12)]).unwrap();
        let c = fam.membership(&PointSet::range(1..4), 0.0).unwrap();
        assert_eq!(
            c,
            MembershipCertificate {
                generators: vec![0],
                k: 0.0
            }
        );
        let c = fam.membership(&PointSet::from(vec![2, 13]), 5.0).unwrap();
        assert_eq!(c.k, 2.0);
        assert_eq!(c.generators, vec![0, 1]);
        assert!(!fam.contains(&PointSet::from(vec![19]), 5.0));
    }

    #[test]
    fn evens_cover_with_radius_one() {
        let s = line(100);
        let evens = PointSet::from_sorted((0..100).step_by(2).collect());
        let fam = IdealFamily::new(s.clone(), vec![evens]).unwrap();
        assert_eq!(fam.membership(&s.all(), 1.0).unwrap().k, 1.0);
        assert!(!fam.contains(&s.all(), 0.5));
    }

    fn strip(s: &CoarseSpace, l: usize, theta: f64, width: f64) -> PointSet {
        let (sn, cs) = theta.sin_cos();
        PointSet::from_sorted(
            (0..l * l)
                .filter(|&p| {
                    let c = s.coords(p).unwrap();
                    let (x, y) = (c[1] as f64, c[0] as f64);
                    (x * sn - y * cs).abs() <= width
                })
                .collect(),
        )
    }

    #[test]
    fn strips_at_other_angles_do_not_generate() {
        let l = 60;
        let s = Arc::new(CoarseSpace::grid(2, l, GridMetric::Sup).unwrap());
        let pi = core::f64::consts::PI;
        let gens = [0.0, pi / 4.0, pi / 2.0]
            .iter()
            .map(|&t| strip(&s, l, t, 1.0))
            .collect();
        let fam = IdealFamily::new(s.clone(), gens).unwrap();
        let z = strip(&s, l, pi / 8.0, 1.0);
        assert!(!fam.contains(&z, l as f64 / 10.0));
        assert!(fam.contains(&strip(&s, l, 0.0, 3.0), l as f64 / 10.0));
    }

    #[test]
    fn spatial_extremes() {
        let s = line(10);
        let full = IdealFamily::spatial(s.clone(), s.all()).unwrap();
        assert!(full.contains(&PointSet::range(3..9), 0.0));
        let empty = IdealFamily::spatial(s.clone(), PointSet::new()).unwrap();
        assert!(empty.contains(&PointSet::new(), 100.0));
        assert!(!empty.contains(&PointSet::from(vec![0]), 100.0));
    }

    #[test]
    fn separated_components_stay_apart() {
        let edges = [(0, 1), (1, 2), (3, 4), (4, 5)];
        let s = Arc::new(CoarseSpace::graph(&edges, Some(Separation::Uniform(50.0))).unwrap());
        let fam = IdealFamily::spatial(s, PointSet::range(0..3)).unwrap();
        assert!(!fam.contains(&PointSet::from(vec![4]), 49.0));
        assert!(fam.contains(&PointSet::from(vec![4]), 50.0));
    }

    #[test]
    fn principal_families() {
        let s = line(12);
        let id = BandOperator::identity(s.clone());
        let fam = IdealFamily::principal(&id, &default_eps_grid()).unwrap();
        assert_eq!(fam.generators(), &[s.all()]);
        let b = PointSet::range(2..5);
        let t = BandOperator::from_real(
            s.clone(),
            b.iter().flat_map(|x| b.iter().map(move |y| (x, y, 0.3))),
        )
        .unwrap();
        let fam = IdealFamily::principal(&t, &default_eps_grid()).unwrap();
        assert_eq!(fam.generators(), &[b]);
        assert!(IdealFamily::principal(&t, &[]).is_err());
    }

    #[test]
    fn principal_family_of_truncation() {
        let s = line(30);
        let t = BandOperator::from_real(s, (0..30).map(|x| (x, x, 1.0 / (1 + x) as f64))).unwrap();
        let grid = default_eps_grid();
        let eps = grid[3];
        let a = IdealFamily::principal(&t.truncate(eps), &grid).unwrap();
        let b = IdealFamily::principal(&t, &grid[..=3]).unwrap();
        assert_eq!(a.generators(), b.generators());
    }

    #[test]
    fn ghostly_examples() {
        let s = line(40);
        let id = BandOperator::identity(s.clone());
        let whole = IdealFamily::spatial(s.clone(), s.all()).unwrap();
        let k = default_k_cap(&s);
        assert!(ghostly_membership(&id, &whole, &default_eps_grid(), k).member);
        let fin = IdealFamily::finite_sets_at_basepoint(s.clone()).unwrap();
        let v = ghostly_membership(&id, &fin, &default_eps_grid(), k);
        assert!(!v.member);
        assert_eq!(v.first_failing, Some(0.5));
        let rank_one = BandOperator::from_real(s.clone(), [(3, 7, 1.0)]).unwrap();
        assert!(ghostly_membership(&rank_one, &fin, &default_eps_grid(), k).member);
    }

    #[test]
    fn geometric_distance_examples() {
        let s = line(30);
        let a = PointSet::range(5..10);
        let t = BandOperator::from_real(s.clone(), a.iter().map(|x| (x, x, 2.0))).unwrap();
        let fam = IdealFamily::spatial(s.clone(), a.clone()).unwrap();
        let g = geometric_distance(&t, &fam, 1e-9, 3.0).unwrap();
        assert_eq!(g.distance, 0.0);
        assert_eq!(g.best.set, a);
        assert!(geometric_distance(&t, &fam, 0.0, 3.0).is_err());

        // Small tail outside every candidate.
        let tail = BandOperator::from_real(s.clone(), (20..30).map(|x| (x, x, 0.01))).unwrap();
        let g = geometric_distance(&t.add(&tail).unwrap(), &fam, 1e-9, 3.0).unwrap();
        assert!((g.distance - 0.01).abs() < 1e-12);
    }

    #[test]
    fn block_bound_examples() {
        let edges: Vec<(usize, usize)> = (0..4)
            .flat_map(|b| (0..4).map(move |i| (5 * b + i, 5 * b + i + 1)))
            .collect();
        let s = Arc::new(CoarseSpace::graph(&edges, Some(Separation::Uniform(100.0))).unwrap());
        let blocks: Vec<PointSet> = (0..4).map(|b| PointSet::range(5 * b..5 * b + 5)).collect();
        let fam = IdealFamily::finite_sets_at_basepoint(s.clone()).unwrap();
        let zero = BandOperator::zero(s.clone());
        assert_eq!(
            block_lower_bound(&zero, &fam, &blocks, 10.0).unwrap().bound,
            0.0
        );

        let trip = blocks.iter().flat_map(|b| {
            let b = b.clone();
            b.as_slice()
                .iter()
                .flat_map(|&x| b.as_slice().iter().map(move |&y| (x, y, 0.2)))
                .collect::<Vec<_>>()
        });
        let p = BandOperator::from_real(s.clone(), trip).unwrap();
        let bb = block_lower_bound(&p, &fam, &blocks, 10.0).unwrap();
        assert!((bb.bound - 1.0).abs() < 1e-10);
        let gd = geometric_distance(&p, &fam, 1e-9, 10.0).unwrap();
        assert!(bb.bound <= gd.distance + 1e-9);

        let overlapping = vec![PointSet::range(0..3), PointSet::range(2..4)];
        assert_eq!(
            block_lower_bound(&p, &fam, &overlapping, 10.0).unwrap_err(),
            Error::OverlappingBlocks(0, 1)
        );
    }

    proptest! {
        #[test]
        fn membership_is_closed(
            gen in proptest::collection::vec(0usize..60, 1..6),
            z in proptest::collection::vec(0usize..60, 0..10),
            w in proptest::collection::vec(0usize..60, 0..10),
            r in 0usize..4,
        ) {
            let s = line(60);
            let fam = IdealFamily::new(s.clone(), vec![PointSet::from(gen)]).unwrap();
            let z = PointSet::from(z);
            let w = PointSet::from(w);
            let cap = 8.0;
            if fam.contains(&z, cap) {
                let sub: PointSet = z.iter().step_by(2).collect();
                prop_assert!(fam.contains(&sub, cap));
                if fam.contains(&w, cap) {
                    prop_assert!(fam.contains(&z.union(&w), cap));
                }
                let k = fam.membership(&z, cap).unwrap().k;
                prop_assert!(fam.contains(&s.neighbourhood(&z, r as f64), k + r as f64));
            }
        }
    }
}
