//! Text and JSON formats: space descriptors, edge lists, operator triplet
//! files, ideal families and expander manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use roelab_core::expander::ExpanderFamily;
use roelab_core::{
    BandOperator, CoarseSpace, Complex64, GridMetric, IdealFamily, PointSet, Separation,
};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// First token of the header line of an operator file.
pub const OPERATOR_MAGIC: &str = "# roelab-operator";

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| LabError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| LabError::io(path, e))
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricSpec {
    EuclideanRounded,
    #[default]
    Sup,
    Graph,
}

impl From<MetricSpec> for GridMetric {
    fn from(m: MetricSpec) -> Self {
        match m {
            MetricSpec::EuclideanRounded => GridMetric::EuclideanRounded,
            MetricSpec::Sup => GridMetric::Sup,
            MetricSpec::Graph => GridMetric::Graph,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeparationSpec {
    Uniform(f64),
    Pairwise(Vec<f64>),
}

impl From<&SeparationSpec> for Separation {
    fn from(s: &SeparationSpec) -> Self {
        match s {
            SeparationSpec::Uniform(d) => Separation::Uniform(*d),
            SeparationSpec::Pairwise(v) => Separation::Pairwise(v.clone()),
        }
    }
}

/// Where a space comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpaceSpec {
    Grid {
        dims: usize,
        side: usize,
        #[serde(default)]
        metric: MetricSpec,
    },
    Graph {
        edges: Vec<(usize, usize)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        separation: Option<SeparationSpec>,
    },
    EdgeList {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        separation: Option<SeparationSpec>,
    },
}

impl SpaceSpec {
    /// Relative edge-list paths are taken from `base`.
    pub fn build(&self, base: &Path) -> Result<CoarseSpace> {
        Ok(match self {
            SpaceSpec::Grid { dims, side, metric } => {
                CoarseSpace::grid(*dims, *side, (*metric).into())?
            }
            SpaceSpec::Graph {
                edges,
                vertices,
                separation,
            } => graph_space(edges, *vertices, separation.as_ref())?,
            SpaceSpec::EdgeList {
                path,
                vertices,
                separation,
            } => {
                let p = resolve(base, path);
                let edges = parse_edge_list(&read_text(&p)?, &p.display().to_string())?;
                graph_space(&edges, *vertices, separation.as_ref())?
            }
        })
    }
}

fn graph_space(
    edges: &[(usize, usize)],
    vertices: Option<usize>,
    sep: Option<&SeparationSpec>,
) -> roelab_core::Result<CoarseSpace> {
    let sep = sep.map(Separation::from);
    match vertices {
        Some(n) => CoarseSpace::graph_with_len(n, edges, sep),
        None => CoarseSpace::graph(edges, sep),
    }
}

/// One `u v` pair per line; `#` starts a comment.
pub fn parse_edge_list(text: &str, origin: &str) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: &str| LabError::Format {
            path: origin.to_string(),
            line: i + 1,
            message: message.to_string(),
        };
        let mut it = line.split_whitespace();
        let u = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("expected `u v`"))?;
        let v = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("expected `u v`"))?;
        if it.next().is_some() {
            return Err(bad("trailing tokens after `u v`"));
        }
        out.push((u, v));
    }
    Ok(out)
}

pub fn format_edge_list(edges: &[(usize, usize)]) -> String {
    let mut s = String::with_capacity(edges.len() * 8);
    for (u, v) in edges {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

/// JSON header of an operator file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorHeader {
    pub points: usize,
    pub nnz: usize,
    pub propagation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
}

/// Header line, then one `row col re im` line per stored entry. Numbers are
/// written in shortest round-trip form, so reading back is bit-exact.
pub fn format_operator(t: &BandOperator, space: Option<&SpaceSpec>) -> Result<String> {
    let header = OperatorHeader {
        points: t.dim(),
        nnz: t.nnz(),
        propagation: t.propagation(),
        space: space.cloned(),
    };
    let mut s = format!("{OPERATOR_MAGIC} {}\n", serde_json::to_string(&header)?);
    for (x, y, v) in t.entries() {
        s.push_str(&format!("{x} {y} {:?} {:?}\n", v.re, v.im));
    }
    Ok(s)
}

/// Reads an operator file. The space is `space` when given, otherwise the
/// one described in the header.
pub fn parse_operator(
    text: &str,
    origin: &str,
    space: Option<Arc<CoarseSpace>>,
    base: &Path,
) -> Result<(BandOperator, OperatorHeader)> {
    let bad = |line: usize, message: String| LabError::Format {
        path: origin.to_string(),
        line,
        message,
    };
    let mut lines = text.lines();
    let first = lines.next().unwrap_or("");
    let json = first
        .strip_prefix(OPERATOR_MAGIC)
        .ok_or_else(|| bad(1, format!("missing `{OPERATOR_MAGIC}` header")))?;
    let header: OperatorHeader =
        serde_json::from_str(json.trim()).map_err(|e| bad(1, format!("bad header: {e}")))?;
    let space = match (space, &header.space) {
        (Some(s), _) => s,
        (None, Some(spec)) => Arc::new(spec.build(base)?),
        (None, None) => {
            return Err(bad(
                1,
                "no space in the header and none supplied".to_string(),
            ));
        }
    };
    if space.len() != header.points {
        return Err(bad(
            1,
            format!(
                "header has {} points, space has {}",
                header.points,
                space.len()
            ),
        ));
    }
    let mut trip = Vec::with_capacity(header.nnz);
    for (i, raw) in lines.enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(bad(i + 2, "expected `row col re im`".to_string()));
        }
        let parse_err = |what: &str| bad(i + 2, format!("cannot parse {what}"));
        let x: usize = f[0].parse().map_err(|_| parse_err("row"))?;
        let y: usize = f[1].parse().map_err(|_| parse_err("col"))?;
        let re: f64 = f[2].parse().map_err(|_| parse_err("re"))?;
        let im: f64 = f[3].parse().map_err(|_| parse_err("im"))?;
        trip.push((x, y, Complex64::new(re, im)));
    }
    if trip.len() != header.nnz {
        return Err(bad(
            1,
            format!(
                "header announces {} entries, found {}",
                header.nnz,
                trip.len()
            ),
        ));
    }
    Ok((BandOperator::from_triplets(space, trip)?, header))
}

pub fn read_operator(
    path: &Path,
    space: Option<Arc<CoarseSpace>>,
) -> Result<(BandOperator, OperatorHeader)> {
    let base = path.parent().unwrap_or(Path::new("."));
    parse_operator(&read_text(path)?, &path.display().to_string(), space, base)
}

/// Generators as point-id lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    Generated {
        generators: Vec<Vec<usize>>,
    },
    /// Neighbourhoods of `core`, default the basepoint.
    FiniteSets {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        core: Option<Vec<usize>>,
    },
    Whole,
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec::FiniteSets { core: None }
    }
}

impl FamilySpec {
    pub fn build(&self, space: Arc<CoarseSpace>) -> Result<IdealFamily> {
        Ok(match self {
            FamilySpec::Generated { generators } => IdealFamily::new(
                space,
                generators.iter().cloned().map(PointSet::from).collect(),
            )?,
            FamilySpec::FiniteSets { core: None } => IdealFamily::finite_sets_at_basepoint(space)?,
            FamilySpec::FiniteSets { core: Some(c) } => {
                IdealFamily::finite_sets(space, PointSet::from(c.clone()))?
            }
            FamilySpec::Whole => {
                let all = space.all();
                IdealFamily::spatial(space, all)?
            }
        })
    }

    pub fn from_family(f: &IdealFamily) -> Self {
        FamilySpec::Generated {
            generators: f
                .generators()
                .iter()
                .map(|g| g.as_slice().to_vec())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphManifest {
    pub n: usize,
    pub seed: u64,
    pub lambda: f64,
    pub attempts: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
}

/// Sizes, degree, seeds and certificates of an expander family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpanderManifest {
    pub schema: u32,
    pub degree: usize,
    pub graphs: Vec<GraphManifest>,
}

impl ExpanderManifest {
    pub fn from_family(f: &ExpanderFamily, with_edges: bool) -> Self {
        ExpanderManifest {
            schema: 1,
            degree: f.graphs.first().map_or(0, |g| g.d),
            graphs: f
                .graphs
                .iter()
                .map(|g| GraphManifest {
                    n: g.n,
                    seed: g.seed,
                    lambda: g.lambda,
                    attempts: g.attempts,
                    edges: with_edges.then(|| g.edges.clone()),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_lists_round_trip() {
        let e = vec![(0, 1), (1, 2), (5, 3)];
        assert_eq!(parse_edge_list(&format_edge_list(&e), "x").unwrap(), e);
        let err = parse_edge_list("0 1\n2\n", "f.txt").unwrap_err();
        assert!(matches!(err, LabError::Format { line: 2, .. }));
        assert_eq!(
            parse_edge_list("# c\n\n3 4 # tail\n", "x").unwrap(),
            vec![(3, 4)]
        );
    }

    #[test]
    fn space_specs_parse() {
        let s: SpaceSpec = serde_json::from_str(r#"{"kind":"grid","dims":1,"side":5}"#).unwrap();
        assert_eq!(s.build(Path::new(".")).unwrap().len(), 5);
        let g: SpaceSpec =
            serde_json::from_str(r#"{"kind":"graph","edges":[[0,1],[2,3]],"separation":7}"#)
                .unwrap();
        assert_eq!(g.build(Path::new(".")).unwrap().distance(0, 3), 7.0);
        assert!(
            serde_json::from_str::<SpaceSpec>(r#"{"kind":"grid","dims":1,"side":5,"x":1}"#)
                .is_err()
        );
    }
}
