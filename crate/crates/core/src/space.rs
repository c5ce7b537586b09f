//! Finite bounded-geometry metric spaces.
//!
//! Points are the indices `0..len`. Two metric families are supported: boxes
//! `{0..L-1}^N` in a lattice with a closed-form metric, and graphs whose
//! connected components carry the shortest-path metric and sit at explicit
//! mutual distances given by a separation schedule.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Slack used for every `d(x, y) <= r` comparison.
pub const DIST_TOL: f64 = 1e-9;

/// Largest number of points a space may have.
pub const MAX_POINTS: u128 = 1_000_000;

#[inline]
pub(crate) fn within(d: f64, r: f64) -> bool {
    d <= r + DIST_TOL
}

/// A sorted, deduplicated set of point indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet(Vec<usize>);

impl PointSet {
    pub fn new() -> Self {
        PointSet(Vec::new())
    }

    /// Builds a set from indices that are already strictly increasing.
    pub fn from_sorted(points: Vec<usize>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        PointSet(points)
    }

    pub fn range(r: Range<usize>) -> Self {
        PointSet(r.collect())
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        PointSet(
            mask.iter()
                .enumerate()
                .filter_map(|(i, &m)| m.then_some(i))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn to_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &x in &self.0 {
            mask[x] = true;
        }
        mask
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                core::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        PointSet(out)
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet(self.iter().filter(|&x| other.contains(x)).collect())
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        PointSet(self.iter().filter(|&x| !other.contains(x)).collect())
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.len() <= other.len() && self.iter().all(|x| other.contains(x))
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().all(|x| !large.contains(x))
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        PointSet(v)
    }
}

impl From<Vec<usize>> for PointSet {
    fn from(v: Vec<usize>) -> Self {
        v.into_iter().collect()
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = usize;
    type IntoIter = core::iter::Copied<core::slice::Iter<'a, usize>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GridMetric {
    /// Euclidean distance rounded up to the next integer. Rounding up keeps
    /// the triangle inequality; rounding to nearest does not.
    EuclideanRounded,
    /// Chebyshev (max-coordinate) distance.
    Sup,
    /// Path metric of the lattice graph, i.e. the l1 distance.
    Graph,
}

/// Distances between the connected components of a graph space.
#[derive(Clone, Debug, PartialEq)]
pub enum Separation {
    /// Every pair of distinct components at the same distance.
    Uniform(f64),
    /// Upper triangle of the component distance matrix, row by row:
    /// `(0,1), (0,2), .., (0,c-1), (1,2), ..`.
    Pairwise(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
struct Components {
    component_of: Vec<u32>,
    local_index: Vec<u32>,
    members: Vec<Vec<usize>>,
    /// Row-major `size * size` shortest-path distances per component.
    local_dist: Vec<Vec<u32>>,
    diameters: Vec<u32>,
    /// Dense `c * c` matrix, zero on the diagonal.
    separation: Vec<f64>,
    edges: Vec<(usize, usize)>,
}

impl Components {
    fn count(&self) -> usize {
        self.members.len()
    }

    fn sep(&self, a: usize, b: usize) -> f64 {
        self.separation[a * self.count() + b]
    }

    fn local(&self, c: usize, i: usize, j: usize) -> u32 {
        let size = self.members[c].len();
        self.local_dist[c][i * size + j]
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Metric {
    Grid {
        dims: usize,
        side: usize,
        kind: GridMetric,
    },
    Graph(Components),
}

/// A finite metric space of bounded geometry.
///
/// Immutable after construction. Distances are integers for lattice and
/// graph metrics; separation schedules may introduce real values.
#[derive(Clone, Debug, PartialEq)]
pub struct CoarseSpace {
    len: usize,
    metric: Metric,
}

/// A bijection `D -> R` between subsets of the space moving points a
/// bounded distance. Its graph is `{(t(x), x)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialTranslation {
    /// `(x, t(x))`, sorted by `x`.
    map: Vec<(usize, usize)>,
    displacement_bound: f64,
}

impl PartialTranslation {
    pub fn identity(domain: &PointSet) -> Self {
        PartialTranslation {
            map: domain.iter().map(|x| (x, x)).collect(),
            displacement_bound: 0.0,
        }
    }

    pub fn domain(&self) -> PointSet {
        PointSet::from_sorted(self.map.iter().map(|&(x, _)| x).collect())
    }

    pub fn range(&self) -> PointSet {
        self.map.iter().map(|&(_, y)| y).collect()
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.map
            .binary_search_by_key(&x, |&(d, _)| d)
            .ok()
            .map(|i| self.map[i].1)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.map
    }

    /// Graph pairs `(t(x), x)`, sorted lexicographically.
    pub fn graph(&self) -> Vec<(usize, usize)> {
        let mut g: Vec<_> = self.map.iter().map(|&(x, y)| (y, x)).collect();
        g.sort_unstable();
        g
    }

    pub fn displacement_bound(&self) -> f64 {
        self.displacement_bound
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn is_injective(&self) -> bool {
        let mut targets: Vec<usize> = self.map.iter().map(|&(_, y)| y).collect();
        targets.sort_unstable();
        targets.windows(2).all(|w| w[0] != w[1])
    }
}

impl CoarseSpace {
    /// The box `{0..side-1}^dims`. Point indices are mixed-radix with the
    /// first coordinate most significant.
    pub fn grid(dims: usize, side: usize, kind: GridMetric) -> Result<Self> {
        if dims == 0 || side == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid needs positive dims and side, got {dims} and {side}"
            )));
        }
        let mut n: u128 = 1;
        for _ in 0..dims {
            n = n.saturating_mul(side as u128);
            if n > MAX_POINTS {
                return Err(Error::SizeOverflow {
                    requested: (side as u128).saturating_pow(dims as u32),
                    limit: MAX_POINTS,
                });
            }
        }
        Ok(CoarseSpace {
            len: n as usize,
            metric: Metric::Grid { dims, side, kind },
        })
    }

    /// Graph metric on the vertices `0..=max id`. Components are ordered by
    /// their smallest vertex; with more than one component a separation
    /// schedule is mandatory.
    pub fn graph(edges: &[(usize, usize)], separation: Option<Separation>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::EmptyEdgeList);
        }
        let n = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0) + 1;
        Self::graph_with_len(n, edges, separation)
    }

    /// Like [`CoarseSpace::graph`] with an explicit vertex count, so that
    /// isolated vertices past the largest edge endpoint are kept.
    pub fn graph_with_len(
        n: usize,
        edges: &[(usize, usize)],
        separation: Option<Separation>,
    ) -> Result<Self> {
        if n as u128 > MAX_POINTS {
            return Err(Error::SizeOverflow {
                requested: n as u128,
                limit: MAX_POINTS,
            });
        }
        if n == 0 {
            return Err(Error::EmptyEdgeList);
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut clean = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::PointOutOfRange {
                    point: u.max(v),
                    len: n,
                });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let e = (u.min(v), u.max(v));
            clean.push(e);
        }
        clean.sort_unstable();
        clean.dedup();
        for &(u, v) in &clean {
            adj[u].push(v);
            adj[v].push(u);
        }

        let unset = u32::MAX;
        let mut component_of = vec![unset; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if component_of[start] != unset {
                continue;
            }
            let c = members.len() as u32;
            let mut comp = vec![start];
            component_of[start] = c;
            let mut head = 0;
            while head < comp.len() {
                let x = comp[head];
                head += 1;
                for &y in &adj[x] {
                    if component_of[y] == unset {
                        component_of[y] = c;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            members.push(comp);
        }
        let mut local_index = vec![0u32; n];
        for comp in &members {
            for (i, &x) in comp.iter().enumerate() {
                local_index[x] = i as u32;
            }
        }

        let mut local_dist = Vec::with_capacity(members.len());
        let mut diameters = Vec::with_capacity(members.len());
        for comp in &members {
            let size = comp.len();
            let mut dist = vec![u32::MAX; size * size];
            let mut queue = VecDeque::new();
            for (i, &src) in comp.iter().enumerate() {
                let row = &mut dist[i * size..(i + 1) * size];
                row[i] = 0;
                queue.clear();
                queue.push_back(src);
                while let Some(x) = queue.pop_front() {
                    let dx = row[local_index[x] as usize];
                    for &y in &adj[x] {
                        let ly = local_index[y] as usize;
                        if row[ly] == u32::MAX {
                            row[ly] = dx + 1;
                            queue.push_back(y);
                        }
                    }
                }
            }
            diameters.push(dist.iter().copied().max().unwrap_or(0));
            local_dist.push(dist);
        }

        let c = members.len();
        let mut sep = vec![0.0; c * c];
        if c > 1 {
            let schedule = separation.ok_or(Error::DisconnectedComponent { components: c })?;
            match schedule {
                Separation::Uniform(d) => {
                    for a in 0..c {
                        for b in 0..c {
                            if a != b {
                                sep[a * c + b] = d;
                            }
                        }
                    }
                }
                Separation::Pairwise(list) => {
                    let needed = c * (c - 1) / 2;
                    if list.len() < needed {
                        return Err(Error::ScheduleTooShort {
                            needed,
                            got: list.len(),
                        });
                    }
                    let mut k = 0;
                    for a in 0..c {
                        for b in a + 1..c {
                            sep[a * c + b] = list[k];
                            sep[b * c + a] = list[k];
                            k += 1;
                        }
                    }
                }
            }
            validate_separation(&sep, &diameters)?;
        }

        Ok(CoarseSpace {
            len: n,
            metric: Metric::Graph(Components {
                component_of,
                local_index,
                members,
                local_dist,
                diameters,
                separation: sep,
                edges: clean,
            }),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn points(&self) -> Range<usize> {
        0..self.len
    }

    pub fn all(&self) -> PointSet {
        PointSet::range(0..self.len)
    }

    /// The lexicographically smallest point, used as the basepoint for
    /// "tending to infinity".
    pub fn basepoint(&self) -> usize {
        0
    }

    /// `(dims, side, kind)` for lattice boxes.
    pub fn grid_shape(&self) -> Option<(usize, usize, GridMetric)> {
        match self.metric {
            Metric::Grid { dims, side, kind } => Some((dims, side, kind)),
            Metric::Graph(_) => None,
        }
    }

    /// Deduplicated edges `(u, v)` with `u < v` for graph spaces.
    pub fn edges(&self) -> Option<&[(usize, usize)]> {
        match &self.metric {
            Metric::Graph(g) => Some(&g.edges),
            Metric::Grid { .. } => None,
        }
    }

    /// Upper triangle of the component separation matrix (graph spaces).
    pub fn separation_schedule(&self) -> Option<Vec<f64>> {
        match &self.metric {
            Metric::Graph(g) => {
                let c = g.count();
                let mut out = Vec::with_capacity(c * c.saturating_sub(1) / 2);
                for a in 0..c {
                    for b in a + 1..c {
                        out.push(g.sep(a, b));
                    }
                }
                Some(out)
            }
            Metric::Grid { .. } => None,
        }
    }

    /// Connected components (graph spaces) or the single box.
    pub fn components(&self) -> Vec<PointSet> {
        match &self.metric {
            Metric::Graph(g) => g
                .members
                .iter()
                .map(|m| PointSet::from_sorted(m.clone()))
                .collect(),
            Metric::Grid { .. } => vec![self.all()],
        }
    }

    pub fn coords(&self, x: usize) -> Option<Vec<i64>> {
        let Metric::Grid { dims, side, .. } = self.metric else {
            return None;
        };
        let mut out = vec![0i64; dims];
        let mut rest = x;
        for k in (0..dims).rev() {
            out[k] = (rest % side) as i64;
            rest /= side;
        }
        Some(out)
    }

    pub fn index_of(&self, coords: &[i64]) -> Option<usize> {
        let Metric::Grid { dims, side, .. } = self.metric else {
            return None;
        };
        if coords.len() != dims {
            return None;
        }
        let mut idx = 0usize;
        for &c in coords {
            if c < 0 || c as usize >= side {
                return None;
            }
            idx = idx * side + c as usize;
        }
        Some(idx)
    }

    pub fn distance(&self, x: usize, y: usize) -> f64 {
        match &self.metric {
            Metric::Grid { dims, side, kind } => grid_distance(*dims, *side, *kind, x, y),
            Metric::Graph(g) => {
                let (cx, cy) = (g.component_of[x] as usize, g.component_of[y] as usize);
                if cx == cy {
                    g.local(cx, g.local_index[x] as usize, g.local_index[y] as usize) as f64
                } else {
                    g.sep(cx, cy)
                }
            }
        }
    }

    /// `B(x, r) = {y : d(x, y) <= r}`.
    pub fn ball(&self, x: usize, r: f64) -> PointSet {
        match &self.metric {
            Metric::Grid { dims, side, kind } => {
                let rr = (r + DIST_TOL).floor().max(0.0) as i64;
                let c = self.coords(x).unwrap_or_default();
                let mut out = Vec::new();
                let lo: Vec<i64> = c.iter().map(|&v| (v - rr).max(0)).collect();
                let hi: Vec<i64> = c.iter().map(|&v| (v + rr).min(*side as i64 - 1)).collect();
                let mut cur = lo.clone();
                loop {
                    let off: Vec<i64> = cur.iter().zip(&c).map(|(a, b)| a - b).collect();
                    if within(offset_norm(*kind, &off), r) {
                        out.push(self.index_of(&cur).unwrap_or(0));
                    }
                    // odometer increment, last coordinate fastest
                    let mut k = *dims;
                    loop {
                        if k == 0 {
                            return PointSet::from_sorted(out);
                        }
                        k -= 1;
                        if cur[k] < hi[k] {
                            cur[k] += 1;
                            cur[k + 1..*dims].copy_from_slice(&lo[k + 1..*dims]);
                            break;
                        }
                    }
                }
            }
            Metric::Graph(g) => {
                let cx = g.component_of[x] as usize;
                let lx = g.local_index[x] as usize;
                let mut out = Vec::new();
                for c in 0..g.count() {
                    if c == cx {
                        for (j, &y) in g.members[c].iter().enumerate() {
                            if within(g.local(c, lx, j) as f64, r) {
                                out.push(y);
                            }
                        }
                    } else if within(g.sep(cx, c), r) {
                        out.extend_from_slice(&g.members[c]);
                    }
                }
                out.sort_unstable();
                PointSet::from_sorted(out)
            }
        }
    }

    /// Distance from every point to `a`; `f64::INFINITY` when `a` is empty.
    pub fn distances_to_set(&self, a: &PointSet) -> Vec<f64> {
        let n = self.len;
        if a.is_empty() {
            return vec![f64::INFINITY; n];
        }
        match &self.metric {
            Metric::Grid { dims, side, kind } => match kind {
                GridMetric::Graph | GridMetric::Sup => {
                    self.lattice_bfs(a, *dims, *side, *kind == GridMetric::Sup)
                }
                GridMetric::EuclideanRounded => (0..n)
                    .map(|x| {
                        a.iter()
                            .map(|y| self.distance(x, y))
                            .fold(f64::INFINITY, f64::min)
                    })
                    .collect(),
            },
            Metric::Graph(g) => {
                let c = g.count();
                let mut by_comp: Vec<Vec<usize>> = vec![Vec::new(); c];
                for y in a.iter() {
                    by_comp[g.component_of[y] as usize].push(g.local_index[y] as usize);
                }
                let mut cross = vec![f64::INFINITY; c];
                for (cc, slot) in cross.iter_mut().enumerate() {
                    for (other, locals) in by_comp.iter().enumerate() {
                        if other != cc && !locals.is_empty() {
                            *slot = slot.min(g.sep(cc, other));
                        }
                    }
                }
                let mut out = vec![f64::INFINITY; n];
                for cc in 0..c {
                    for (i, &x) in g.members[cc].iter().enumerate() {
                        let mut best = cross[cc];
                        for &j in &by_comp[cc] {
                            best = best.min(g.local(cc, i, j) as f64);
                        }
                        out[x] = best;
                    }
                }
                out
            }
        }
    }

    fn lattice_bfs(&self, a: &PointSet, dims: usize, side: usize, king: bool) -> Vec<f64> {
        let n = self.len;
        let mut dist = vec![u32::MAX; n];
        let mut queue = VecDeque::with_capacity(a.len());
        for x in a.iter() {
            dist[x] = 0;
            queue.push_back(x);
        }
        let steps: Vec<Vec<i64>> = if king {
            let mut all = Vec::new();
            let total = 3usize.pow(dims as u32);
            for code in 0..total {
                let mut c = code;
                let mut step = vec![0i64; dims];
                for s in step.iter_mut() {
                    *s = (c % 3) as i64 - 1;
                    c /= 3;
                }
                if step.iter().any(|&v| v != 0) {
                    all.push(step);
                }
            }
            all
        } else {
            let mut all = Vec::new();
            for k in 0..dims {
                for s in [-1i64, 1] {
                    let mut step = vec![0i64; dims];
                    step[k] = s;
                    all.push(step);
                }
            }
            all
        };
        let mut coords = vec![0i64; dims];
        while let Some(x) = queue.pop_front() {
            let mut rest = x;
            for k in (0..dims).rev() {
                coords[k] = (rest % side) as i64;
                rest /= side;
            }
            for step in &steps {
                let mut idx = 0usize;
                let mut ok = true;
                for k in 0..dims {
                    let v = coords[k] + step[k];
                    if v < 0 || v as usize >= side {
                        ok = false;
                        break;
                    }
                    idx = idx * side + v as usize;
                }
                if ok && dist[idx] == u32::MAX {
                    dist[idx] = dist[x] + 1;
                    queue.push_back(idx);
                }
            }
        }
        dist.into_iter().map(|d| d as f64).collect()
    }

    /// `N_r(A) = {x : d(x, A) <= r}`.
    pub fn neighbourhood(&self, a: &PointSet, r: f64) -> PointSet {
        if a.is_empty() {
            return PointSet::new();
        }
        let d = self.distances_to_set(a);
        PointSet::from_sorted(
            d.iter()
                .enumerate()
                .filter_map(|(x, &v)| within(v, r).then_some(x))
                .collect(),
        )
    }

    /// `E_r = {(x, y) : d(x, y) <= r}`, sorted lexicographically.
    pub fn entourage(&self, r: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in self.points() {
            for y in self.ball(x, r).iter() {
                out.push((x, y));
            }
        }
        out
    }

    /// Splits `E_r` into graphs of partial translations by greedy proper
    /// edge colouring of the bipartite pair graph, pairs taken in
    /// lexicographic `(row, column)` order. Each colour class `{(t(x), x)}`
    /// is one translation. At most `2 * geometry_profile(r) - 1` parts.
    pub fn decompose_entourage(&self, r: f64) -> Vec<PartialTranslation> {
        let n = self.len;
        let mut row_colors: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut col_colors: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut bounds: Vec<f64> = Vec::new();
        for (row, col) in self.entourage(r) {
            let mut color = 0u32;
            while row_colors[row].contains(&color) || col_colors[col].contains(&color) {
                color += 1;
            }
            row_colors[row].push(color);
            col_colors[col].push(color);
            let c = color as usize;
            if c == classes.len() {
                classes.push(Vec::new());
                bounds.push(0.0);
            }
            classes[c].push((col, row));
            bounds[c] = bounds[c].max(self.distance(row, col));
        }
        classes
            .into_iter()
            .zip(bounds)
            .map(|(mut map, displacement_bound)| {
                map.sort_unstable();
                PartialTranslation {
                    map,
                    displacement_bound,
                }
            })
            .collect()
    }

    /// `max_x |B(x, r)|`, exactly.
    pub fn geometry_profile(&self, r: f64) -> usize {
        if r < 0.0 {
            return 0;
        }
        match &self.metric {
            Metric::Grid { dims, side, kind } => {
                let rr = (r + DIST_TOL).floor() as usize;
                if *kind == GridMetric::Sup {
                    return (2 * rr + 1).min(*side).pow(*dims as u32);
                }
                let vol = (2 * rr + 1).min(*side).pow(*dims as u32);
                if (self.len as u128) * (vol as u128) <= 20_000_000 {
                    self.points()
                        .map(|x| self.ball(x, r).len())
                        .max()
                        .unwrap_or(0)
                } else {
                    // Lattice balls clipped to a box are largest at the centre.
                    let centre: Vec<i64> = vec![(*side as i64 - 1) / 2; *dims];
                    let x = self.index_of(&centre).unwrap_or(0);
                    self.ball(x, r).len()
                }
            }
            Metric::Graph(g) => {
                let mut best = 0;
                for c in 0..g.count() {
                    let size = g.members[c].len();
                    let mut inner = 0;
                    for i in 0..size {
                        let cnt = (0..size)
                            .filter(|&j| within(g.local(c, i, j) as f64, r))
                            .count();
                        inner = inner.max(cnt);
                    }
                    let outer: usize = (0..g.count())
                        .filter(|&o| o != c && within(g.sep(c, o), r))
                        .map(|o| g.members[o].len())
                        .sum();
                    best = best.max(inner + outer);
                }
                best
            }
        }
    }

    /// `geometry_profile(r)` for every integer `r` in `0..=cap`.
    pub fn profile_table(&self, cap: usize) -> Vec<usize> {
        (0..=cap).map(|r| self.geometry_profile(r as f64)).collect()
    }

    pub fn diameter(&self) -> f64 {
        match &self.metric {
            Metric::Grid { dims, side, kind } => {
                let last = self.len - 1;
                grid_distance(*dims, *side, *kind, 0, last)
            }
            Metric::Graph(g) => {
                let inner = g.diameters.iter().copied().max().unwrap_or(0) as f64;
                g.separation.iter().copied().fold(inner, f64::max)
            }
        }
    }

    /// Diameter of a subset, by pairwise scan.
    pub fn set_diameter(&self, a: &PointSet) -> f64 {
        let pts = a.as_slice();
        let mut best: f64 = 0.0;
        for (i, &x) in pts.iter().enumerate() {
            for &y in &pts[i + 1..] {
                best = best.max(self.distance(x, y));
            }
        }
        best
    }

    pub fn check_point(&self, x: usize) -> Result<()> {
        if x < self.len {
            Ok(())
        } else {
            Err(Error::PointOutOfRange {
                point: x,
                len: self.len,
            })
        }
    }

    pub fn check_set(&self, a: &PointSet) -> Result<()> {
        match a.max() {
            Some(x) => self.check_point(x),
            None => Ok(()),
        }
    }
}

fn offset_norm(kind: GridMetric, off: &[i64]) -> f64 {
    match kind {
        GridMetric::Sup => off.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as f64,
        GridMetric::Graph => off.iter().map(|v| v.unsigned_abs()).sum::<u64>() as f64,
        GridMetric::EuclideanRounded => {
            let s: u64 = off.iter().map(|&v| (v * v) as u64).sum();
            ceil_sqrt(s) as f64
        }
    }
}

fn ceil_sqrt(s: u64) -> u64 {
    let mut r = libm::sqrt(s as f64) as u64;
    while r * r > s {
        r -= 1;
    }
    while r * r < s {
        r += 1;
    }
    r
}

fn grid_distance(dims: usize, side: usize, kind: GridMetric, x: usize, y: usize) -> f64 {
    let (mut a, mut b) = (x, y);
    let mut sup = 0u64;
    let mut sum = 0u64;
    let mut sq = 0u64;
    for _ in 0..dims {
        let da = (a % side) as i64 - (b % side) as i64;
        let v = da.unsigned_abs();
        sup = sup.max(v);
        sum += v;
        sq += v * v;
        a /= side;
        b /= side;
    }
    match kind {
        GridMetric::Sup => sup as f64,
        GridMetric::Graph => sum as f64,
        GridMetric::EuclideanRounded => ceil_sqrt(sq) as f64,
    }
}

fn validate_separation(sep: &[f64], diameters: &[u32]) -> Result<()> {
    let c = diameters.len();
    for a in 0..c {
        for b in 0..c {
            if a == b {
                continue;
            }
            let d = sep[a * c + b];
            if !(d >= 1.0) || !d.is_finite() {
                return Err(Error::InvalidSeparation(format!(
                    "components {a} and {b} at distance {d}"
                )));
            }
            if (diameters[a].max(diameters[b]) as f64) > 2.0 * d + DIST_TOL {
                return Err(Error::InvalidSeparation(format!(
                    "distance {d} between components {a} and {b} is below half a diameter"
                )));
            }
            for m in 0..c {
                if m != a && m != b && d > sep[a * c + m] + sep[m * c + b] + DIST_TOL {
                    return Err(Error::InvalidSeparation(format!(
                        "triangle inequality fails for components {a}, {m}, {b}"
                    )));
                }
            }
        }
    }
    Ok(())
}
