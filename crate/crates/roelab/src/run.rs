//! Experiment pipelines. Each returns a JSON report and one CSV table.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use roelab_core::expander::{
    column_space, linear_schedule, resistance_blocks, schedule_len, ExpanderFamily,
};
use roelab_core::ideals::{
    block_lower_bound, default_eps_grid, default_k_cap, geometric_distance, ghostly_membership,
    MembershipCertificate,
};
use roelab_core::limitop::{empirical_limit_operator, named_sequence, vanishing_in_direction};
use roelab_core::witness::{
    averaging_witness, check_partition_witness, check_positive_type, grid_margin,
    kernel_from_witness, localization_constant_with, LocalizationOptions, Restriction,
    MAX_KERNEL_BLOCK,
};
use roelab_core::{
    BandOperator, CoarseSpace, Complex64, DirectionSequence, Error as CoreError, Frame,
    IdealFamily, PointSet,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{
    ExperimentConfig, ExperimentKind, LocalizationReference, OperatorSpec, RestrictionSpec,
    WitnessReference,
};
use crate::error::{LabError, Result};
use crate::formats::{read_operator, write_text, ExpanderManifest};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub kind: String,
    /// The configuration with every default filled in.
    pub header: ExperimentConfig,
    pub results: Value,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| LabError::io("<csv>", e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub table: Table,
}

impl Outcome {
    pub fn report_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.report)?;
        s.push('\n');
        Ok(s)
    }
}

#[derive(Default)]
struct Checks(Vec<Assertion>);

impl Checks {
    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.0.push(Assertion {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }
}

fn f(v: f64) -> String {
    format!("{v}")
}

fn cert_json(c: &Option<MembershipCertificate>) -> Value {
    match c {
        Some(c) => json!({ "generators": c.generators, "k": c.k }),
        None => Value::Null,
    }
}

/// Runs the experiment. Relative paths are resolved against `base`.
pub fn run(cfg: &ExperimentConfig, base: &Path) -> Result<Outcome> {
    let mut cfg = cfg.clone().materialize()?;
    let workers = *cfg
        .workers
        .get_or_insert_with(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| LabError::Usage(format!("cannot start {workers} workers: {e}")))?;
    let space = match &cfg.space {
        Some(s) => Some(Arc::new(s.build(base)?)),
        None => None,
    };
    let op = match (&cfg.operator, &space) {
        (Some(o), Some(s)) => Some(build_operator(o, s.clone(), base)?),
        _ => None,
    };
    let mut checks = Checks::default();
    let (results, table) = pool.install(|| match cfg.kind {
        ExperimentKind::LocalizationSweep => {
            localization_sweep(&cfg, op.as_ref().expect("validated"), &mut checks)
        }
        ExperimentKind::GhostAudit => {
            ghost_audit(&cfg, op.as_ref().expect("validated"), &mut checks)
        }
        ExperimentKind::IdealMembership => ideal_membership(
            &mut cfg,
            space.clone().expect("validated"),
            op.as_ref(),
            &mut checks,
        ),
        ExperimentKind::LimitOperator => {
            limit_operator(&cfg, op.as_ref().expect("validated"), &mut checks)
        }
        ExperimentKind::ColumnPipeline => column_pipeline(&mut cfg, &mut checks),
        ExperimentKind::ResistancePipeline => resistance(&cfg, &mut checks),
        ExperimentKind::WitnessCheck => {
            witness(&cfg, &space.clone().expect("validated"), &mut checks)
        }
    })?;
    let passed = checks.0.iter().all(|a| a.passed);
    Ok(Outcome {
        report: Report {
            schema: SCHEMA,
            kind: cfg.kind.name().to_string(),
            header: cfg,
            results,
            assertions: checks.0,
            passed,
        },
        table,
    })
}

/// Writes the configured outputs. Without a JSON path the report goes to
/// stdout.
pub fn write_outputs(outcome: &Outcome, base: &Path) -> Result<()> {
    let out = &outcome.report.header.output;
    let json = outcome.report_json()?;
    match &out.json {
        Some(p) => write_text(&base.join(p), &json)?,
        None => print!("{json}"),
    }
    if let Some(p) = &out.csv {
        write_text(&base.join(p), &outcome.table.to_csv()?)?;
    }
    Ok(())
}

fn line_side(space: &CoarseSpace, what: &str) -> Result<usize> {
    match space.grid_shape() {
        Some((1, side, _)) => Ok(side),
        _ => Err(LabError::config(
            "operator.kind",
            format!("{what} needs a one-dimensional grid space"),
        )),
    }
}

pub fn laurent(space: Arc<CoarseSpace>, coefficients: &[(i64, f64)]) -> Result<BandOperator> {
    let n = line_side(&space, "a Laurent operator")? as i64;
    let mut trip = Vec::new();
    for &(k, a) in coefficients {
        for x in 0..n {
            let y = x + k;
            if (0..n).contains(&y) {
                trip.push((y as usize, x as usize, a));
            }
        }
    }
    Ok(BandOperator::from_real(space, trip)?)
}

pub fn build_operator(
    spec: &OperatorSpec,
    space: Arc<CoarseSpace>,
    base: &Path,
) -> Result<BandOperator> {
    Ok(match spec {
        OperatorSpec::Identity => BandOperator::identity(space),
        OperatorSpec::Adjacency => BandOperator::adjacency(space),
        OperatorSpec::Shift { by } => laurent(space, &[(*by, 1.0)])?,
        OperatorSpec::Laurent { coefficients } => laurent(space, coefficients)?,
        OperatorSpec::ConstantProjection => {
            let comps = space.components();
            roelab_core::expander::constant_projection(space, &comps)?
        }
        OperatorSpec::File { path } => read_operator(&base.join(path), Some(space))?.0,
    })
}

fn localization_sweep(
    cfg: &ExperimentConfig,
    t: &BandOperator,
    checks: &mut Checks,
) -> Result<(Value, Table)> {
    let p = cfg.localization.as_ref().expect("materialized");
    let restriction = match p.restriction {
        RestrictionSpec::Columns => Restriction::Columns,
        RestrictionSpec::TwoSided => Restriction::TwoSided,
    };
    let space = t.space();
    let reports = (p.s_min..=p.s_max)
        .into_par_iter()
        .map(|s| {
            let s = s as f64;
            let opts = LocalizationOptions {
                restriction,
                margin: if p.margin {
                    grid_margin(space, s)
                } else {
                    PointSet::new()
                },
                centers: None,
            };
            localization_constant_with(t, s, &opts)
        })
        .collect::<roelab_core::Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "s",
        "constant",
        "window_norm",
        "operator_norm",
        "center",
        "windows_checked",
        "reference",
        "deviation",
    ]);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for r in &reports {
        let reference = match p.reference {
            LocalizationReference::None => None,
            LocalizationReference::PathCosine => Some((std::f64::consts::PI / (r.s + 2.0)).cos()),
        };
        let dev = reference.map(|c| (r.best_constant - c).abs());
        worst = worst.max(dev.unwrap_or(0.0));
        table.push(vec![
            f(r.s),
            f(r.best_constant),
            f(r.window_norm),
            f(r.operator_norm),
            r.center.to_string(),
            r.windows_checked.to_string(),
            reference.map_or(String::new(), f),
            dev.map_or(String::new(), f),
        ]);
        rows.push(json!({
            "s": r.s,
            "constant": r.best_constant,
            "window_norm": r.window_norm,
            "operator_norm": r.operator_norm,
            "center": r.center,
            "window": r.witness_window.as_slice(),
            "windows_checked": r.windows_checked,
            "reference": reference,
        }));
    }
    if p.reference != LocalizationReference::None {
        checks.check(
            "matches-reference",
            worst <= p.tolerance,
            format!("largest deviation {worst:e}, tolerance {:e}", p.tolerance),
        );
    }
    Ok((json!({ "sweep": rows }), table))
}

fn doubling_radii(space: &CoarseSpace) -> Vec<f64> {
    let diam = space.diameter();
    let mut out = Vec::new();
    let mut r = 1.0;
    while r < diam {
        out.push(r);
        r *= 2.0;
    }
    out
}

fn ghost_audit(
    cfg: &ExperimentConfig,
    t: &BandOperator,
    checks: &mut Checks,
) -> Result<(Value, Table)> {
    let p = cfg.ghost.as_ref().expect("materialized");
    let space = t.space();
    let radii = p.radii.clone().unwrap_or_else(|| doubling_radii(space));
    let base = space.basepoint();
    let sets: Vec<PointSet> = radii.iter().map(|&r| space.ball(base, r)).collect();
    // The profile needs the whole space last; its value there is 0.
    let mut full = sets.clone();
    if full.last().is_none_or(|s| s.len() < space.len()) {
        full.push(space.all());
    }
    let mut profile = t.ghost_profile(&full)?;
    profile.truncate(sets.len());
    let mut table = Table::new(&["k", "radius", "size", "profile"]);
    for (k, ((r, s), g)) in radii.iter().zip(&sets).zip(&profile).enumerate() {
        table.push(vec![(k + 1).to_string(), f(*r), s.len().to_string(), f(*g)]);
    }
    if let Some(lb) = p.min_profile {
        let m = profile.iter().copied().fold(f64::INFINITY, f64::min);
        checks.check(
            "not-a-ghost",
            m >= lb,
            format!("smallest profile value {m}, bound {lb}"),
        );
    }
    if let Some(ub) = p.max_tail {
        let last = profile.last().copied().unwrap_or(0.0);
        checks.check(
            "tail-decays",
            last <= ub,
            format!("last profile value {last}, bound {ub}"),
        );
    }
    Ok((
        json!({
            "radii": radii,
            "sizes": sets.iter().map(PointSet::len).collect::<Vec<_>>(),
            "profile": profile,
            "sup_norm": t.sup_norm(),
        }),
        table,
    ))
}

fn ideal_membership(
    cfg: &mut ExperimentConfig,
    space: Arc<CoarseSpace>,
    t: Option<&BandOperator>,
    checks: &mut Checks,
) -> Result<(Value, Table)> {
    let p = cfg.membership.as_mut().expect("materialized");
    let k_cap = *p.k_cap.get_or_insert_with(|| default_k_cap(&space));
    let grid = p.eps_grid.get_or_insert_with(default_eps_grid).clone();
    let family: IdealFamily = p.family.build(space.clone())?;
    let mut table = Table::new(&["item", "index", "eps", "size", "member", "k", "generators"]);
    let gens = |c: &Option<MembershipCertificate>| {
        c.as_ref().map_or(String::new(), |c| {
            c.generators
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
    };
    let mut sets = Vec::new();
    for (i, z) in p.sets.iter().enumerate() {
        let z = PointSet::from(z.clone());
        space.check_set(&z)?;
        let c = family.membership(&z, k_cap);
        table.push(vec![
            "set".into(),
            i.to_string(),
            String::new(),
            z.len().to_string(),
            c.is_some().to_string(),
            c.as_ref().map_or(String::new(), |c| f(c.k)),
            gens(&c),
        ]);
        if let Some(exp) = &p.expect_members {
            checks.check(
                &format!("set-{i}-membership"),
                c.is_some() == exp[i],
                format!("member = {}, expected {}", c.is_some(), exp[i]),
            );
        }
        sets.push(json!({ "size": z.len(), "certificate": cert_json(&c) }));
    }
    let mut out = json!({
        "generators": family.generators().iter().map(|g| g.as_slice().to_vec()).collect::<Vec<_>>(),
        "sets": sets,
    });
    if let Some(t) = t {
        let v = ghostly_membership(t, &family, &grid, k_cap);
        for (i, (e, c)) in v.levels.iter().enumerate() {
            table.push(vec![
                "level".into(),
                i.to_string(),
                f(*e),
                t.row_support(*e).len().to_string(),
                c.is_some().to_string(),
                c.as_ref().map_or(String::new(), |c| f(c.k)),
                gens(c),
            ]);
        }
        if let Some(exp) = p.expect_ghostly {
            checks.check(
                "ghostly-membership",
                v.member == exp,
                format!(
                    "member = {}, expected {exp}, first failing ε {:?}",
                    v.member, v.first_failing
                ),
            );
        }
        out["ghostly"] = json!({
            "member": v.member,
            "first_failing": v.first_failing,
            "levels": v.levels.iter().map(|(e, c)| json!({ "eps": e, "certificate": cert_json(c) })).collect::<Vec<_>>(),
        });
        if let Some(eps) = p.distance_eps {
            let d = geometric_distance(t, &family, eps, k_cap)?;
            out["geometric_distance"] = json!({
                "distance": d.distance,
                "certificate": cert_json(&Some(d.best.certificate.clone())),
                "candidates_tried": d.candidates_tried,
            });
        }
    }
    Ok((out, table))
}

fn limit_operator(
    cfg: &ExperimentConfig,
    t: &BandOperator,
    checks: &mut Checks,
) -> Result<(Value, Table)> {
    let p = cfg.limit.as_ref().expect("materialized");
    let space = t.space();
    let side = line_side(space, "a limit-operator experiment")? as i64;
    let r = p.radius as i64;
    let values: Vec<i64> = match &p.points {
        Some(v) => v.clone(),
        None => named_sequence(&p.sequence, side - 1 - r)?
            .into_iter()
            .filter(|&v| v >= r)
            .collect(),
    };
    let seq = DirectionSequence::from_integers(space, &values)?;
    let frame = Frame::lattice(space, &seq, p.radius)?;
    let tail = p.tail.unwrap_or(seq.len());
    let mut table = Table::new(&["a", "b", "re", "im", "oscillation"]);
    let mut out = json!({ "points": values, "tail": tail });
    let converged = match empirical_limit_operator(t, &frame, tail, p.tol) {
        Ok(lim) => {
            let osc = |a: usize, b: usize| {
                lim.oscillation
                    .iter()
                    .find(|e| e.0 == a && e.1 == b)
                    .map_or(0.0, |e| e.2)
            };
            let offset = |a: usize| a as i64 - r;
            let entries: Vec<Value> = lim
                .operator
                .entries()
                .map(|(a, b, v)| {
                    table.push(vec![
                        offset(a).to_string(),
                        offset(b).to_string(),
                        f(v.re),
                        f(v.im),
                        f(osc(a, b)),
                    ]);
                    json!([offset(a), offset(b), v.re, v.im])
                })
                .collect();
            out["limit"] = json!({
                "entries": entries,
                "max_oscillation": lim.max_oscillation,
                "terms": lim.terms,
            });
            true
        }
        Err(e @ CoreError::NoEmpiricalLimit { .. }) => {
            out["limit"] = json!({ "error": e.to_string() });
            false
        }
        Err(e) => return Err(e.into()),
    };
    let v = vanishing_in_direction(t, &frame, tail, p.eps)?;
    out["vanishing"] = json!({
        "vanishes": v.vanishes,
        "limit": v.limit,
        "method": format!("{:?}", v.method),
    });
    if let Some(exp) = p.expect_converged {
        checks.check(
            "limit-exists",
            converged == exp,
            format!("converged = {converged}, expected {exp}"),
        );
    }
    if let Some(exp) = p.expect_vanishes {
        checks.check(
            "vanishes",
            v.vanishes == exp,
            format!("vanishes = {}, expected {exp}", v.vanishes),
        );
    }
    Ok((out, table))
}

fn column_pipeline(cfg: &mut ExperimentConfig, checks: &mut Checks) -> Result<(Value, Table)> {
    let p = cfg.columns.as_mut().expect("materialized");
    let fam = ExpanderFamily::generate(&p.sizes, p.degree, p.lambda_max, p.seed, p.retries)?;
    let cols = fam.graphs.len();
    let w = column_space(
        &fam,
        p.copies,
        &linear_schedule(schedule_len(cols, p.copies), p.slope),
    )?;
    let k_cap = *p.k_cap.get_or_insert_with(|| default_k_cap(&w.space));
    let grid = p.eps_grid.get_or_insert_with(default_eps_grid).clone();
    let proj = &w.projection;
    let mut table = Table::new(&["quantity", "index", "value"]);

    // The last set of the exhaustion is the whole space.
    let ex = w.j_exhaustion();
    let mut profile = proj.ghost_profile(&ex)?;
    profile.pop();
    for (k, g) in profile.iter().enumerate() {
        table.push(vec!["ghost-profile".into(), (k + 1).to_string(), f(*g)]);
    }
    let m = profile.iter().copied().fold(f64::INFINITY, f64::min);
    checks.check(
        "not-a-ghost",
        m >= p.min_profile,
        format!("smallest profile value {m}, bound {}", p.min_profile),
    );

    let g_cols = ghostly_membership(proj, &w.columns, &grid, k_cap);
    checks.check(
        "ghostly-in-columns",
        g_cols.member,
        format!("first failing ε {:?}", g_cols.first_failing),
    );
    let fin = IdealFamily::finite_sets_at_basepoint(w.space.clone())?;
    let g_fin = ghostly_membership(proj, &fin, &grid, k_cap);
    checks.check(
        "outside-finite-sets",
        !g_fin.member,
        format!("first failing ε {:?}", g_fin.first_failing),
    );

    let vi = vanishing_in_direction(proj, &w.i_direction_frame(&fam, 1)?, cols, p.eps)?;
    table.push(vec!["i-direction-limit".into(), "1".into(), f(vi.limit)]);
    checks.check(
        "vanishes-in-i-direction",
        vi.vanishes,
        format!("limit {} by {:?}", vi.limit, vi.method),
    );

    let mut j_dirs = Vec::new();
    for i in 1..=cols {
        let frame = w.j_direction_frame(&fam, i)?;
        let vj = vanishing_in_direction(proj, &frame, p.copies, p.eps)?;
        let lim =
            empirical_limit_operator(proj, &frame, p.copies, roelab_core::limitop::DEFAULT_TOL)?;
        let n = fam.graphs[i - 1].n;
        let e = 1.0 / n as f64;
        let exact = lim.operator.nnz() == n * n
            && lim
                .operator
                .entries()
                .all(|(_, _, v)| v == Complex64::new(e, 0.0));
        table.push(vec!["j-direction-limit".into(), i.to_string(), f(vj.limit)]);
        checks.check(
            &format!("j-direction-{i}-persists"),
            !vj.vanishes && exact,
            format!(
                "vanishes = {}, limit entries equal 1/{n}: {exact}",
                vj.vanishes
            ),
        );
        j_dirs.push(json!({ "column": i, "vanishes": vj.vanishes, "local_sup": vj.local_sup, "entries_exact": exact }));
    }
    Ok((
        json!({
            "expanders": ExpanderManifest::from_family(&fam, false),
            "points": w.space.len(),
            "ghost_profile": profile,
            "ghostly_columns": g_cols.member,
            "ghostly_finite_sets": g_fin.member,
            "i_direction": { "vanishes": vi.vanishes, "limit": vi.limit, "local_sup": vi.local_sup },
            "j_directions": j_dirs,
        }),
        table,
    ))
}

fn resistance(cfg: &ExperimentConfig, checks: &mut Checks) -> Result<(Value, Table)> {
    let p = cfg.resistance.as_ref().expect("materialized");
    let fam = ExpanderFamily::generate(&p.sizes, p.degree, p.lambda_max, p.seed, p.retries)?;
    let rb = resistance_blocks(&fam, p.kappa, &p.scales, p.delta, p.separation)?;
    let mut table = Table::new(&[
        "n", "lambda", "degree", "error", "norm", "scale", "constant",
    ]);
    for (i, g) in fam.graphs.iter().enumerate() {
        table.push(vec![
            g.n.to_string(),
            f(g.lambda),
            rb.approximations[i].degree.to_string(),
            f(rb.errors[i]),
            f(rb.norms[i]),
            f(p.scales[i]),
            f(rb.report.constants[i]),
        ]);
    }
    let lam = fam.graphs.iter().map(|g| g.lambda).fold(0.0, f64::max);
    checks.check(
        "spectral-gap",
        lam <= p.lambda_max,
        format!("largest λ {lam}"),
    );
    let err = rb.errors.iter().copied().fold(0.0, f64::max);
    checks.check(
        "approximation",
        err <= p.delta,
        format!("largest ‖a − P‖ bound {err}"),
    );
    checks.check(
        "resistance",
        rb.report.passed,
        format!("largest constant {}, κ {}", rb.kappa, p.kappa),
    );
    let nmin = rb.norms.iter().copied().fold(f64::INFINITY, f64::min);
    checks.check(
        "norms",
        nmin >= p.min_norm,
        format!("smallest ‖a_n‖ {nmin}"),
    );
    let fin = IdealFamily::finite_sets_at_basepoint(rb.space.clone())?;
    let sets: Vec<PointSet> = rb.blocks.iter().map(|(_, s)| s.clone()).collect();
    let bb = block_lower_bound(&rb.sum, &fin, &sets, p.k_cap)?;
    checks.check(
        "block-lower-bound",
        bb.bound >= p.min_block_bound,
        format!("bound {}, required {}", bb.bound, p.min_block_bound),
    );
    Ok((
        json!({
            "expanders": ExpanderManifest::from_family(&fam, false),
            "degrees": rb.approximations.iter().map(|a| a.degree).collect::<Vec<_>>(),
            "errors": rb.errors,
            "analytic_bounds": rb.approximations.iter().map(|a| a.analytic_bound).collect::<Vec<_>>(),
            "norms": rb.norms,
            "constants": rb.report.constants,
            "kappa": rb.kappa,
            "block_bound": { "bound": bb.bound, "block": bb.block, "block_norms": bb.block_norms },
        }),
        table,
    ))
}

fn witness(
    cfg: &ExperimentConfig,
    space: &Arc<CoarseSpace>,
    checks: &mut Checks,
) -> Result<(Value, Table)> {
    let p = cfg.witness.as_ref().expect("materialized");
    let r = p.r as f64;
    let all = space.all();
    if p.kernel && all.len() > MAX_KERNEL_BLOCK {
        return Err(LabError::config(
            "witness.kernel",
            format!(
                "space has {} points, the kernel check allows {MAX_KERNEL_BLOCK}",
                all.len()
            ),
        ));
    }
    let rows = (p.s_min..=p.s_max)
        .into_par_iter()
        .map(|s| -> roelab_core::Result<_> {
            let s = s as f64;
            let interior = all.difference(&grid_margin(space, s + r));
            let var = check_partition_witness(space, &averaging_witness(space, interior, s)?, r)?;
            let pos = if p.kernel {
                let k = kernel_from_witness(&averaging_witness(space, all.clone(), s)?);
                Some(check_positive_type(
                    |x, y| k.value(x, y),
                    std::slice::from_ref(&all),
                )?)
            } else {
                None
            };
            Ok((s, var, pos))
        })
        .collect::<roelab_core::Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "s",
        "variation",
        "reference",
        "deviation",
        "min_eigenvalue",
        "positive",
    ]);
    let mut worst: f64 = 0.0;
    let mut all_pos = true;
    let mut out = Vec::new();
    for (s, var, pos) in &rows {
        let reference = match p.reference {
            WitnessReference::None => None,
            WitnessReference::LineAverage => Some(2.0 * r / (2.0 * s + 1.0)),
        };
        let dev = reference.map(|c| (var.max_variation - c).abs());
        worst = worst.max(dev.unwrap_or(0.0));
        all_pos &= pos.as_ref().is_none_or(|q| q.positive);
        table.push(vec![
            f(*s),
            f(var.max_variation),
            reference.map_or(String::new(), f),
            dev.map_or(String::new(), f),
            pos.as_ref().map_or(String::new(), |q| f(q.min_eigenvalue)),
            pos.as_ref()
                .map_or(String::new(), |q| q.positive.to_string()),
        ]);
        out.push(json!({
            "s": s,
            "variation": var.max_variation,
            "worst_pair": var.worst_pair,
            "pairs_checked": var.pairs_checked,
            "min_eigenvalue": pos.as_ref().map(|q| q.min_eigenvalue),
        }));
    }
    if p.reference != WitnessReference::None {
        checks.check(
            "variation-matches-reference",
            worst <= p.tolerance,
            format!("largest deviation {worst:e}, tolerance {:e}", p.tolerance),
        );
    }
    if p.kernel {
        checks.check(
            "positive-type",
            all_pos,
            "kernel checked on the whole space",
        );
    }
    Ok((json!({ "rows": out }), table))
}
