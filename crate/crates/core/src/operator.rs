//! Band operators on a finite space: the algebraic uniform Roe algebra at
//! finite scale.
//!
//! Storage is compressed sparse rows over point indices. Entries with
//! modulus below [`PRUNE`] are dropped on construction, so the support is
//! exactly the set of stored pairs.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg;
use crate::space::{CoarseSpace, PointSet};

/// Entries with smaller modulus are not stored.
pub const PRUNE: f64 = 1e-14;

/// Default relative tolerance for [`BandOperator::norm`].
pub const NORM_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct BandOperator {
    space: Arc<CoarseSpace>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<Complex64>,
    propagation: f64,
}

impl PartialEq for BandOperator {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space)
            && self.row_ptr == other.row_ptr
            && self.cols == other.cols
            && self.vals == other.vals
    }
}

fn same_space(a: &Arc<CoarseSpace>, b: &Arc<CoarseSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl BandOperator {
    /// Builds an operator from `(row, col, value)` triplets. Repeated pairs
    /// are summed; near-zero results are pruned.
    pub fn from_triplets<I>(space: Arc<CoarseSpace>, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let n = space.len();
        let mut t: Vec<(usize, usize, Complex64)> = triplets.into_iter().collect();
        for &(x, y, _) in &t {
            space.check_point(x)?;
            space.check_point(y)?;
        }
        t.sort_unstable_by_key(|&(x, y, _)| (x, y));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(t.len());
        for (x, y, v) in t {
            match merged.last_mut() {
                Some(last) if last.0 == x && last.1 == y => last.2 += v,
                _ => merged.push((x, y, v)),
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(merged.len());
        let mut vals = Vec::with_capacity(merged.len());
        for (x, y, v) in merged {
            if v.norm() < PRUNE {
                continue;
            }
            row_ptr[x + 1] += 1;
            cols.push(y as u32);
            vals.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self::from_parts(space, row_ptr, cols, vals))
    }

    /// Real-valued convenience wrapper around [`BandOperator::from_triplets`].
    pub fn from_real<I>(space: Arc<CoarseSpace>, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::from_triplets(space, triplets.into_iter().map(|(x, y, v)| (x, y, c(v))))
    }

    fn from_parts(
        space: Arc<CoarseSpace>,
        row_ptr: Vec<usize>,
        cols: Vec<u32>,
        vals: Vec<Complex64>,
    ) -> Self {
        let mut op = BandOperator {
            space,
            row_ptr,
            cols,
            vals,
            propagation: 0.0,
        };
        op.propagation = op.recompute_propagation();
        op
    }

    pub fn zero(space: Arc<CoarseSpace>) -> Self {
        let n = space.len();
        Self::from_parts(space, vec![0; n + 1], Vec::new(), Vec::new())
    }

    pub fn identity(space: Arc<CoarseSpace>) -> Self {
        Self::diagonal(space.clone(), &vec![c(1.0); space.len()])
    }

    pub fn diagonal(space: Arc<CoarseSpace>, diag: &[Complex64]) -> Self {
        let n = space.len();
        assert_eq!(diag.len(), n);
        Self::from_triplets(space, diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
            .expect("diagonal indices are in range")
    }

    /// Adjacency operator of the graph `{(x, y) : d(x, y) = 1}`.
    pub fn adjacency(space: Arc<CoarseSpace>) -> Self {
        let mut t = Vec::new();
        for x in space.points() {
            for y in space.ball(x, 1.0).iter() {
                if y != x && space.distance(x, y) == 1.0 {
                    t.push((x, y, c(1.0)));
                }
            }
        }
        Self::from_triplets(space, t).expect("ball points are in range")
    }

    pub fn space(&self) -> &Arc<CoarseSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn propagation(&self) -> f64 {
        self.propagation
    }

    pub fn recompute_propagation(&self) -> f64 {
        self.entries()
            .map(|(x, y, _)| self.space.distance(x, y))
            .fold(0.0, f64::max)
    }

    /// Column indices and values of one row.
    pub fn row(&self, x: usize) -> (&[u32], &[Complex64]) {
        let (a, b) = (self.row_ptr[x], self.row_ptr[x + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        let (cols, vals) = self.row(x);
        match cols.binary_search(&(y as u32)) {
            Ok(i) => vals[i],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim()).flat_map(move |x| {
            let (cols, vals) = self.row(x);
            cols.iter()
                .zip(vals)
                .map(move |(&y, &v)| (x, y as usize, v))
        })
    }

    /// `supp(T)`: the stored pairs.
    pub fn support(&self) -> Vec<(usize, usize)> {
        self.entries().map(|(x, y, _)| (x, y)).collect()
    }

    /// `‖T‖_∞ = max |T(x, y)|`.
    pub fn sup_norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `supp_ε(T) = {(x, y) : |T(x, y)| >= ε}`, closed inequality.
    pub fn epsilon_support(&self, eps: f64) -> Vec<(usize, usize)> {
        self.entries()
            .filter(|(_, _, v)| v.norm() >= eps)
            .map(|(x, y, _)| (x, y))
            .collect()
    }

    /// `r(supp_ε(T))`: rows carrying an entry of modulus at least `eps`.
    pub fn row_support(&self, eps: f64) -> PointSet {
        PointSet::from_sorted(
            (0..self.dim())
                .filter(|&x| self.row(x).1.iter().any(|v| v.norm() >= eps))
                .collect(),
        )
    }

    /// The ε-truncation `T_ε`: keep entries with `|T(x, y)| >= eps`.
    pub fn truncate(&self, eps: f64) -> Self {
        self.filter(|_, _, v| v.norm() >= eps)
    }

    fn filter<F: Fn(usize, usize, Complex64) -> bool>(&self, keep: F) -> Self {
        let n = self.dim();
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for x in 0..n {
            let (rc, rv) = self.row(x);
            for (&y, &v) in rc.iter().zip(rv) {
                if keep(x, y as usize, v) {
                    cols.push(y);
                    vals.push(v);
                }
            }
            row_ptr[x + 1] = cols.len();
        }
        Self::from_parts(self.space.clone(), row_ptr, cols, vals)
    }

    /// `χ_A T χ_B`.
    pub fn window_restrict(&self, rows: &PointSet, cols: &PointSet) -> Self {
        let n = self.dim();
        let rmask = rows.to_mask(n.max(rows.max().map_or(0, |m| m + 1)));
        let cmask = cols.to_mask(n.max(cols.max().map_or(0, |m| m + 1)));
        self.filter(|x, y, _| rmask[x] && cmask[y])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        Self::from_triplets(out.space.clone(), out.entries().collect::<Vec<_>>())
            .expect("entries are in range")
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Self::from_triplets(self.space.clone(), self.entries().chain(other.entries()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Self::from_triplets(
            self.space.clone(),
            self.entries()
                .chain(other.entries().map(|(x, y, v)| (x, y, -v))),
        )
    }

    /// Matrix product `self * other`, row by row with a dense accumulator.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.dim();
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut mark = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for x in 0..n {
            let (ac, av) = self.row(x);
            for (&k, &a) in ac.iter().zip(av) {
                let (bc, bv) = other.row(k as usize);
                for (&y, &b) in bc.iter().zip(bv) {
                    let y = y as usize;
                    if !mark[y] {
                        mark[y] = true;
                        touched.push(y);
                    }
                    acc[y] += a * b;
                }
            }
            touched.sort_unstable();
            for &y in &touched {
                let v = acc[y];
                if v.norm() >= PRUNE {
                    cols.push(y as u32);
                    vals.push(v);
                }
                acc[y] = Complex64::new(0.0, 0.0);
                mark[y] = false;
            }
            touched.clear();
            row_ptr[x + 1] = cols.len();
        }
        Ok(Self::from_parts(self.space.clone(), row_ptr, cols, vals))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim();
        let mut counts = vec![0usize; n + 1];
        for &y in &self.cols {
            counts[y as usize + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut cols = vec![0u32; self.nnz()];
        let mut vals = vec![Complex64::new(0.0, 0.0); self.nnz()];
        for (x, y, v) in self.entries() {
            let slot = next[y];
            cols[slot] = x as u32;
            vals[slot] = v.conj();
            next[y] += 1;
        }
        let mut out = BandOperator {
            space: self.space.clone(),
            row_ptr,
            cols,
            vals,
            propagation: self.propagation,
        };
        out.propagation = self.propagation;
        out
    }

    /// `y = T x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, out) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *out = cols
                .iter()
                .zip(vals)
                .map(|(&j, &v)| v * x[j as usize])
                .sum();
        }
    }

    /// `y = T* x`.
    pub fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (i, &xi) in x.iter().enumerate().take(self.dim()) {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j as usize] += v.conj() * xi;
            }
        }
    }

    /// Spectral norm by Lanczos on `T*T` from a fixed start vector, to
    /// relative tolerance `tol`. Returns the norm and a unit vector
    /// attaining it.
    pub fn operator_norm_with_vector(&self, tol: f64) -> Result<(f64, Vec<Complex64>)> {
        let n = self.dim();
        if self.is_zero() {
            return Ok((0.0, linalg::seed_vector(n)));
        }
        let mut tmp = vec![Complex64::new(0.0, 0.0); n];
        let top = linalg::lanczos_top(
            n,
            |x, y| {
                self.apply(x, &mut tmp);
                self.apply_adjoint(&tmp, y);
            },
            tol,
            (10 * n).max(200),
        )?;
        Ok((top.value.max(0.0).sqrt(), top.vector))
    }

    pub fn operator_norm(&self, tol: f64) -> Result<f64> {
        self.operator_norm_with_vector(tol).map(|(v, _)| v)
    }

    /// [`BandOperator::operator_norm`] at [`NORM_TOL`].
    pub fn norm(&self) -> Result<f64> {
        self.operator_norm(NORM_TOL)
    }

    /// Ghost profile along an exhaustion `F_1 ⊆ F_2 ⊆ ..`:
    /// `g_k = max |T(x, y)|` over `(x, y) ∉ F_k × F_k`.
    pub fn ghost_profile(&self, exhaustion: &[PointSet]) -> Result<Vec<f64>> {
        let n = self.dim();
        for (k, w) in exhaustion.windows(2).enumerate() {
            if !w[0].is_subset(&w[1]) {
                return Err(Error::NonMonotoneExhaustion(k + 1));
            }
        }
        match exhaustion.last() {
            Some(last) if last.len() == n => {}
            _ => return Err(Error::IncompleteExhaustion),
        }
        let mut level = vec![usize::MAX; n];
        for (k, f) in exhaustion.iter().enumerate() {
            for x in f.iter() {
                if level[x] == usize::MAX {
                    level[x] = k;
                }
            }
        }
        let mut profile = vec![0.0f64; exhaustion.len()];
        for (x, y, v) in self.entries() {
            let first = level[x].max(level[y]);
            for g in profile.iter_mut().take(first) {
                *g = g.max(v.norm());
            }
        }
        Ok(profile)
    }

    /// Row-major dense copy, for small instances and tests.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for (x, y, v) in self.entries() {
            out[x * n + y] = v;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{GridMetric, Separation};
    use approx::assert_relative_eq;

    fn line(n: usize) -> Arc<CoarseSpace> {
        Arc::new(CoarseSpace::grid(1, n, GridMetric::Sup).unwrap())
    }

    fn shift(space: Arc<CoarseSpace>, by: i64) -> BandOperator {
        let n = space.len() as i64;
        BandOperator::from_real(
            space,
            (0..n)
                .filter(|&x| (0..n).contains(&(x + by)))
                .map(|x| ((x + by) as usize, x as usize, 1.0)),
        )
        .unwrap()
    }

    #[test]
    fn epsilon_support_is_closed() {
        let s = line(2);
        let t = BandOperator::from_real(s, [(0, 0, 0.5), (0, 1, 0.05)]).unwrap();
        assert_eq!(t.epsilon_support(0.1), vec![(0, 0)]);
        assert_eq!(t.epsilon_support(0.05), vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn constant_block_support() {
        let n = 7;
        let s = line(n);
        let t = BandOperator::from_real(
            s,
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y, 1.0 / n as f64))),
        )
        .unwrap();
        assert_eq!(t.epsilon_support(1.0 / n as f64).len(), n * n);
        assert_eq!(t.epsilon_support(0.01).len(), n * n);
    }

    #[test]
    fn truncation_examples() {
        let s = line(2);
        let t = BandOperator::from_real(
            s.clone(),
            [(0, 0, 0.5), (1, 1, 0.5), (0, 1, 0.05), (1, 0, 0.05)],
        )
        .unwrap();
        let d = BandOperator::from_real(s, [(0, 0, 0.5), (1, 1, 0.5)]).unwrap();
        assert_eq!(t.truncate(0.1), d);
        assert_eq!(t.truncate(0.05), t);
        assert!(t.truncate(0.1).propagation() <= t.propagation());
    }

    #[test]
    fn identity_and_path_norms() {
        let s = line(10);
        assert_relative_eq!(
            BandOperator::identity(s).norm().unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let p = BandOperator::adjacency(line(3));
        assert_relative_eq!(p.norm().unwrap(), 2f64.sqrt(), epsilon = 1e-12);
        let big = BandOperator::adjacency(line(200));
        let exact = 2.0 * (core::f64::consts::PI / 201.0).cos();
        assert!((big.norm().unwrap() - exact).abs() < 1e-9);
    }

    #[test]
    fn algebra_examples() {
        let s = line(6);
        let t = shift(s.clone(), 1);
        let id = BandOperator::identity(s.clone());
        assert_eq!(id.multiply(&t).unwrap(), t);
        assert_eq!(t.adjoint(), shift(s.clone(), -1));
        assert_eq!(t.adjoint().adjoint(), t);
        let ts = t.multiply(&t.adjoint()).unwrap();
        assert!(ts.propagation() <= 2.0);
        let sum = t.add(&t.adjoint()).unwrap();
        assert_eq!(sum, BandOperator::adjacency(s.clone()));
        assert!(t.sub(&t).unwrap().is_zero());
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let a = BandOperator::identity(line(3));
        let b = BandOperator::identity(line(4));
        assert_eq!(a.multiply(&b).unwrap_err(), Error::SpaceMismatch);
        assert_eq!(a.add(&b).unwrap_err(), Error::SpaceMismatch);
    }

    #[test]
    fn window_restriction_examples() {
        let s = line(8);
        let t = BandOperator::adjacency(s.clone());
        assert_eq!(t.window_restrict(&s.all(), &s.all()), t);
        assert!(t.window_restrict(&PointSet::new(), &s.all()).is_zero());
        let w = PointSet::range(2..5);
        let r = t.window_restrict(&w, &w);
        assert_eq!(r.nnz(), 4);
        assert_relative_eq!(r.norm().unwrap(), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn ghost_profile_examples() {
        let s = line(10);
        let compact = BandOperator::from_real(s.clone(), [(1, 2, 3.0), (2, 1, 1.0)]).unwrap();
        let ex: Vec<PointSet> = (3..=10).map(|k| PointSet::range(0..k)).collect();
        assert!(compact
            .ghost_profile(&ex)
            .unwrap()
            .iter()
            .all(|&g| g == 0.0));

        let n = 10;
        let block = BandOperator::from_real(
            s.clone(),
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y, 0.1))),
        )
        .unwrap();
        let balls: Vec<PointSet> = (0..=9).map(|r| s.ball(0, r as f64)).collect();
        let prof = block.ghost_profile(&balls).unwrap();
        assert!(prof[..9].iter().all(|&g| (g - 0.1).abs() < 1e-15));
        assert_eq!(prof[9], 0.0);

        let bad = vec![PointSet::range(0..5), PointSet::range(0..3), s.all()];
        assert_eq!(
            block.ghost_profile(&bad).unwrap_err(),
            Error::NonMonotoneExhaustion(1)
        );
        assert_eq!(
            block.ghost_profile(&[PointSet::range(0..3)]).unwrap_err(),
            Error::IncompleteExhaustion
        );
    }

    #[test]
    fn propagation_is_cached_correctly() {
        let space = Arc::new(
            CoarseSpace::graph(&[(0, 1), (2, 3)], Some(Separation::Uniform(5.0))).unwrap(),
        );
        let t = BandOperator::from_real(space, [(0, 3, 1.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(t.propagation(), 5.0);
        assert_eq!(t.propagation(), t.recompute_propagation());
        assert_eq!(t.adjoint().propagation(), 5.0);
    }

    #[test]
    fn tiny_entries_are_pruned() {
        let t = BandOperator::from_real(
            line(3),
            [(0, 0, 1e-15), (1, 1, 1.0), (2, 2, 0.5), (2, 2, -0.5)],
        )
        .unwrap();
        assert_eq!(t.support(), vec![(1, 1)]);
    }
}
