//! Sweep engine: turns a resolved [`SweepSpec`] into a table of rows and
//! serializes it as CSV or JSON.
//!
//! Output rules shared by every sweep:
//! * metadata echoes the full resolved parameter set, so a file is
//!   self-describing;
//! * floats are printed with 17 significant digits, making reruns
//!   byte-identical;
//! * axis points that fall outside a convergence domain are kept as rows
//!   with empty value cells and a cleared validity flag, never dropped.

use num_complex::Complex64;

use super::params::Params;
use crate::error::{Error, Result};
use crate::fockspace::{build_quadratures, coherent_vector, padded, DimPolicy};
use crate::photonstats::{photon_distribution, statistics_report, PhotonDistribution, StatisticsReport};
use crate::qspecial::DeformationParameter;
use crate::weakmeas::{eigenvalue_scale, fidelity, weak_value_x2, Observable};
use crate::rel_delta_c;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    WeakValue,
    PhotonDist,
    Mandel,
    G2,
    Quadrature,
}

impl SweepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepKind::WeakValue => "weak-value",
            SweepKind::PhotonDist => "photon-dist",
            SweepKind::Mandel => "mandel",
            SweepKind::G2 => "g2",
            SweepKind::Quadrature => "quadrature",
        }
    }

    pub fn default_axis(self) -> Axis {
        match self {
            SweepKind::WeakValue => Axis::Q,
            SweepKind::PhotonDist => Axis::N,
            _ => Axis::ZModulus,
        }
    }

    pub fn allowed_axes(self) -> &'static [Axis] {
        match self {
            SweepKind::WeakValue => &[Axis::Q],
            SweepKind::PhotonDist => &[Axis::N],
            _ => &[Axis::Q, Axis::G, Axis::ZModulus],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Q,
    G,
    ZModulus,
    N,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Q => "q",
            Axis::G => "g",
            Axis::ZModulus => "z_modulus",
            Axis::N => "n",
        }
    }

    pub fn parse(s: &str) -> Result<Axis> {
        match s {
            "q" => Ok(Axis::Q),
            "g" => Ok(Axis::G),
            "z_modulus" => Ok(Axis::ZModulus),
            "n" => Ok(Axis::N),
            other => Err(Error::Config(format!(
                "unknown axis '{other}' (expected q, g, z_modulus or n)"
            ))),
        }
    }
}

/// Inclusive linear grid; `count = 1` degenerates to the start point.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![start];
    }
    let step = (stop - start) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                stop
            } else {
                start + step * i as f64
            }
        })
        .collect()
}

/// Parses `start:stop:count`.
pub fn parse_range(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "expected start:stop:count, got '{s}'"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Config(format!("invalid range start '{}'", parts[0])))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Config(format!("invalid range stop '{}'", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::Config(format!("invalid range count '{}'", parts[2])))?;
    if count == 0 {
        return Err(Error::Config("range count must be at least 1".into()));
    }
    if !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::Config(format!("invalid range '{s}'")));
    }
    Ok((start, stop, count))
}

pub fn validate_axis_values(axis: Axis, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one axis value".into()));
    }
    for w in values.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Config("axis values must be strictly increasing".into()));
        }
    }
    for &v in values {
        let ok = match axis {
            Axis::Q => v > 0.0 && v <= 1.0,
            Axis::G | Axis::ZModulus => v >= 0.0,
            Axis::N => v >= 0.0 && (v - v.round()).abs() <= 1e-9,
        };
        if !ok {
            return Err(Error::Config(format!(
                "axis value {v} is not valid for axis {}",
                axis.as_str()
            )));
        }
    }
    Ok(())
}

/// A fully resolved sweep: parameters, axis grid, and truncation policy.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub params: Params,
    /// Deformation values for distribution sweeps; one output column each.
    pub q_list: Vec<f64>,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub preset: Option<&'static str>,
    pub policy: DimPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Flag(bool),
    Empty,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(fmt_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        use serde_json::{json, Value};
        let metadata: Vec<Value> = self
            .metadata
            .iter()
            .map(|(k, v)| json!([k, v]))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(cell_json).collect()))
            .collect();
        let root = json!({
            "metadata": metadata,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&root).expect("static structure");
        s.push('\n');
        s
    }
}

fn fmt_cell(c: &Cell) -> String {
    match c {
        Cell::Float(v) => format!("{v:.16e}"),
        Cell::Int(i) => i.to_string(),
        Cell::Flag(b) => (*b as u8).to_string(),
        Cell::Empty => String::new(),
    }
}

fn cell_json(c: &Cell) -> serde_json::Value {
    use serde_json::Value;
    match c {
        Cell::Float(v) => serde_json::Number::from_f64(*v)
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Cell::Int(i) => Value::Number((*i).into()),
        Cell::Flag(b) => Value::Bool(*b),
        Cell::Empty => Value::Null,
    }
}

/// Classifies evaluation failures: points outside a convergence domain (or
/// beyond the truncation cap) become flagged cells, real errors propagate.
fn evaluable<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(
            Error::Domain { .. } | Error::NonConvergence { .. } | Error::DimensionOverflow { .. },
        ) => Ok(None),
        Err(e) => Err(e),
    }
}

fn base_metadata(spec: &SweepSpec, observable_note: &str) -> Vec<(String, String)> {
    let mut m: Vec<(String, String)> = Vec::new();
    m.push(("tool".into(), format!("qpointer {}", env!("CARGO_PKG_VERSION"))));
    m.push(("command".into(), spec.kind.as_str().into()));
    m.push((
        "preset".into(),
        spec.preset.map(str::to_owned).unwrap_or_else(|| "custom".into()),
    ));
    m.push(("axis".into(), spec.axis.as_str().into()));
    m.push((
        "range".into(),
        format!(
            "{}:{}:{}",
            spec.values.first().copied().unwrap_or(f64::NAN),
            spec.values.last().copied().unwrap_or(f64::NAN),
            spec.values.len()
        ),
    ));
    let p = &spec.params;
    if spec.kind == SweepKind::PhotonDist {
        let qs: Vec<String> = spec.q_list.iter().map(|q| format!("{q}")).collect();
        m.push(("q_list".into(), qs.join(", ")));
    } else if spec.axis != Axis::Q {
        m.push(("q".into(), format!("{}", p.q)));
    }
    if spec.axis != Axis::G {
        m.push(("g".into(), format!("{}", p.g)));
    }
    if spec.axis != Axis::ZModulus {
        m.push(("z_modulus".into(), format!("{}", p.z_modulus)));
    }
    m.push(("z_phase".into(), format!("{}", p.z_phase)));
    m.push(("alpha_modulus".into(), format!("{}", p.alpha_modulus)));
    m.push(("alpha_phase".into(), format!("{}", p.alpha_phase)));
    m.push(("beta_modulus".into(), format!("{}", p.beta_modulus)));
    m.push(("beta_phase".into(), format!("{}", p.beta_phase)));
    m.push(("observable".into(), observable_note.into()));
    m.push(("dim_start".into(), format!("{}", spec.policy.start)));
    m.push(("dim_max".into(), format!("{}", spec.policy.max)));
    m.push(("tail_target".into(), format!("{:e}", spec.policy.tail_target)));
    m
}

pub fn run(spec: &SweepSpec) -> Result<SweepResult> {
    validate_axis_values(spec.axis, &spec.values)?;
    if !spec.kind.allowed_axes().contains(&spec.axis) {
        return Err(Error::Config(format!(
            "axis {} is not valid for {} sweeps",
            spec.axis.as_str(),
            spec.kind.as_str()
        )));
    }
    match spec.kind {
        SweepKind::WeakValue => run_weak_value(spec),
        SweepKind::PhotonDist => run_photon_dist(spec),
        SweepKind::Mandel => run_scalar(spec, "mandel", |r| {
            (r.mandel_q, r.oracle_deltas.mandel_q)
        }),
        SweepKind::G2 => run_scalar(spec, "g2", |r| (r.g2_zero, r.oracle_deltas.g2_zero)),
        SweepKind::Quadrature => run_quadrature(spec),
    }
}

/// Matrix-mechanics weak value `<beta|X2|alpha> / <beta|alpha>`; needs both
/// selection states to be normalizable.
fn matrix_weak_value_x2(
    alpha: Complex64,
    beta: Complex64,
    q: DeformationParameter,
    policy: &DimPolicy,
) -> Result<Complex64> {
    let va = coherent_vector(alpha, q, policy)?;
    let vb = coherent_vector(beta, q, policy)?;
    let dim = va.dim().max(vb.dim());
    let va = padded(&va, dim)?;
    let vb = padded(&vb, dim)?;
    let (_, x2, _) = build_quadratures(q, dim)?;
    let num = vb.coeffs.dotc(&(&x2.matrix * &va.coeffs));
    let den = vb.coeffs.dotc(&va.coeffs);
    Ok(num / den)
}

fn run_weak_value(spec: &SweepSpec) -> Result<SweepResult> {
    let p = &spec.params;
    let alpha = p.alpha()?;
    let beta = p.beta()?;
    let z = p.z()?;
    let mut metadata = base_metadata(spec, "x2");
    let columns = vec![
        "q".into(),
        "wv_x2_re".into(),
        "wv_x2_im".into(),
        "wv_x2_abs".into(),
        "baseline_x2".into(),
        "anomalous".into(),
        "oracle_delta".into(),
        "domain_ok".into(),
    ];
    let mut rows = Vec::with_capacity(spec.values.len());
    let mut any_flagged = false;
    let mut any_oracle_gap = false;
    for &q_val in &spec.values {
        let q = DeformationParameter::new(q_val)?;
        let mut row = vec![Cell::Float(q_val)];
        let wv = evaluable(weak_value_x2(alpha, beta, q))?;
        let baseline = evaluable(eigenvalue_scale(z, q, &spec.policy))?;
        match (wv, baseline) {
            (Some(w), Some(b)) => {
                row.push(Cell::Float(w.value.re));
                row.push(Cell::Float(w.value.im));
                row.push(Cell::Float(w.value.norm()));
                row.push(Cell::Float(b));
                let a2 = alpha.modulus() * alpha.modulus();
                let b2 = beta.modulus() * beta.modulus();
                let ab = alpha.modulus() * beta.modulus();
                if q.admits(a2) && q.admits(b2) && q.admits(ab) {
                    let fid = fidelity(alpha, beta, q)?;
                    row.push(Cell::Flag(fid.norm() < 1e-12));
                    let mwv = matrix_weak_value_x2(
                        alpha.to_complex(),
                        beta.to_complex(),
                        q,
                        &spec.policy,
                    )?;
                    row.push(Cell::Float(rel_delta_c(w.value, mwv)));
                } else {
                    any_oracle_gap = true;
                    row.push(Cell::Empty);
                    row.push(Cell::Empty);
                }
                row.push(Cell::Flag(true));
            }
            _ => {
                any_flagged = true;
                row.extend([Cell::Empty; 6]);
                row.push(Cell::Flag(false));
            }
        }
        rows.push(row);
    }
    if any_flagged {
        metadata.push((
            "note_domain".into(),
            "rows with domain_ok=0 fall outside the series convergence domain".into(),
        ));
    }
    if any_oracle_gap {
        metadata.push((
            "note_oracle".into(),
            "anomalous/oracle_delta are empty where the selection states are not normalizable"
                .into(),
        ));
    }
    Ok(SweepResult {
        metadata,
        columns,
        rows,
    })
}

fn q_column_name(q: f64) -> String {
    format!("p_q{q:.2}").replace('.', "_")
}

fn run_photon_dist(spec: &SweepSpec) -> Result<SweepResult> {
    let mut metadata = base_metadata(spec, spec.params.observable.as_str());
    let mut columns = vec!["n".to_string()];
    let mut dists: Vec<Option<PhotonDistribution>> = Vec::new();
    let mut flagged: Vec<f64> = Vec::new();
    for &q_val in &spec.q_list {
        columns.push(q_column_name(q_val));
        let mut p = spec.params.clone();
        p.q = q_val;
        let dist = match evaluable(p.build(spec.policy))? {
            Some(cfg) => evaluable(photon_distribution(&cfg))?,
            None => None,
        };
        if dist.is_none() {
            flagged.push(q_val);
        }
        dists.push(dist);
    }
    columns.push("oracle_delta".into());
    columns.push("domain_ok".into());
    if !flagged.is_empty() {
        let qs: Vec<String> = flagged.iter().map(|q| format!("{q}")).collect();
        metadata.push(("flagged_q".into(), qs.join(", ")));
        metadata.push((
            "note_domain".into(),
            "flagged q values put |z|^2 outside the convergence radius; their cells are empty"
                .into(),
        ));
    }
    let all_ok = flagged.is_empty();
    let mut rows = Vec::with_capacity(spec.values.len());
    for &v in &spec.values {
        let n = v.round() as usize;
        let mut row = vec![Cell::Int(n as i64)];
        let mut delta = None::<f64>;
        for dist in &dists {
            match dist {
                Some(d) => {
                    row.push(Cell::Float(d.probs.get(n).copied().unwrap_or(0.0)));
                    let dn = d.deltas.get(n).copied().unwrap_or(0.0);
                    delta = Some(delta.map_or(dn, |x: f64| x.max(dn)));
                }
                None => row.push(Cell::Empty),
            }
        }
        row.push(delta.map(Cell::Float).unwrap_or(Cell::Empty));
        row.push(Cell::Flag(all_ok));
        rows.push(row);
    }
    Ok(SweepResult {
        metadata,
        columns,
        rows,
    })
}

fn apply_axis(p: &mut Params, axis: Axis, v: f64) {
    match axis {
        Axis::Q => p.q = v,
        Axis::G => p.g = v,
        Axis::ZModulus => p.z_modulus = v,
        Axis::N => unreachable!("n axis is specific to distribution sweeps"),
    }
}

enum BranchOutcome {
    Ok(StatisticsReport),
    OutOfDomain,
    Undefined,
}

fn branch_report(spec: &SweepSpec, v: f64, observable: Observable) -> Result<BranchOutcome> {
    let mut p = spec.params.clone();
    apply_axis(&mut p, spec.axis, v);
    p.observable = observable;
    let cfg = match evaluable(p.build(spec.policy))? {
        Some(cfg) => cfg,
        None => return Ok(BranchOutcome::OutOfDomain),
    };
    match statistics_report(&cfg) {
        Ok(r) => Ok(BranchOutcome::Ok(r)),
        Err(Error::ZeroMeanPhoton) => Ok(BranchOutcome::Undefined),
        Err(
            Error::Domain { .. } | Error::NonConvergence { .. } | Error::DimensionOverflow { .. },
        ) => Ok(BranchOutcome::OutOfDomain),
        Err(e) => Err(e),
    }
}

fn run_scalar(
    spec: &SweepSpec,
    value_name: &str,
    pick: fn(&StatisticsReport) -> (f64, f64),
) -> Result<SweepResult> {
    let mut metadata = base_metadata(spec, "both");
    let mut columns = vec![spec.axis.as_str().to_string()];
    for branch in ["x1", "x2"] {
        columns.push(format!("{branch}_{value_name}"));
        columns.push(format!("{branch}_oracle_delta"));
        columns.push(format!("{branch}_domain_ok"));
    }
    let mut rows = Vec::with_capacity(spec.values.len());
    let mut any_flagged = false;
    let mut any_undefined = false;
    for &v in &spec.values {
        let mut row = vec![Cell::Float(v)];
        for obs in [Observable::X1, Observable::X2] {
            match branch_report(spec, v, obs)? {
                BranchOutcome::Ok(r) => {
                    let (value, delta) = pick(&r);
                    row.push(Cell::Float(value));
                    row.push(Cell::Float(delta));
                    row.push(Cell::Flag(true));
                }
                BranchOutcome::OutOfDomain => {
                    any_flagged = true;
                    row.extend([Cell::Empty, Cell::Empty, Cell::Flag(false)]);
                }
                BranchOutcome::Undefined => {
                    any_undefined = true;
                    row.extend([Cell::Empty, Cell::Empty, Cell::Flag(true)]);
                }
            }
        }
        rows.push(row);
    }
    if any_flagged {
        metadata.push((
            "note_domain".into(),
            "branches with domain_ok=0 fall outside the series convergence domain".into(),
        ));
    }
    if any_undefined {
        metadata.push((
            "note_undefined".into(),
            "empty cells with domain_ok=1 have zero mean photon number".into(),
        ));
    }
    Ok(SweepResult {
        metadata,
        columns,
        rows,
    })
}

fn run_quadrature(spec: &SweepSpec) -> Result<SweepResult> {
    let mut metadata = base_metadata(spec, "both");
    let mut columns = vec![spec.axis.as_str().to_string()];
    for branch in ["x1", "x2"] {
        for field in [
            "mean_x",
            "mean_p",
            "var_x",
            "var_p",
            "comm_im",
            "uncert_product",
            "uncert_bound",
            "squeezed_x",
            "squeezed_p",
            "oracle_delta",
            "domain_ok",
        ] {
            columns.push(format!("{branch}_{field}"));
        }
    }
    let mut rows = Vec::with_capacity(spec.values.len());
    let mut any_flagged = false;
    for &v in &spec.values {
        let mut row = vec![Cell::Float(v)];
        for obs in [Observable::X1, Observable::X2] {
            match branch_report(spec, v, obs)? {
                BranchOutcome::Ok(r) => {
                    let m = &r.moments;
                    let delta = [
                        r.oracle_deltas.mean_x,
                        r.oracle_deltas.mean_p,
                        r.oracle_deltas.var_x,
                        r.oracle_deltas.var_p,
                        r.oracle_deltas.cross_xp,
                        r.oracle_deltas.commutator,
                    ]
                    .into_iter()
                    .fold(0.0, f64::max);
                    row.push(Cell::Float(m.mean_x));
                    row.push(Cell::Float(m.mean_p));
                    row.push(Cell::Float(m.var_x));
                    row.push(Cell::Float(m.var_p));
                    row.push(Cell::Float(m.commutator_expect.im));
                    row.push(Cell::Float(m.var_x * m.var_p));
                    row.push(Cell::Float(0.25 * m.commutator_expect.norm_sqr()));
                    row.push(Cell::Flag(m.squeezed_x));
                    row.push(Cell::Flag(m.squeezed_p));
                    row.push(Cell::Float(delta));
                    row.push(Cell::Flag(true));
                }
                BranchOutcome::Undefined => {
                    row.extend([Cell::Empty; 9]);
                    row.push(Cell::Empty);
                    row.push(Cell::Flag(true));
                }
                BranchOutcome::OutOfDomain => {
                    any_flagged = true;
                    row.extend([Cell::Empty; 9]);
                    row.push(Cell::Empty);
                    row.push(Cell::Flag(false));
                }
            }
        }
        rows.push(row);
    }
    if any_flagged {
        metadata.push((
            "note_domain".into(),
            "branches with domain_ok=0 fall outside the series convergence domain".into(),
        ));
    }
    Ok(SweepResult {
        metadata,
        columns,
        rows,
    })
}
