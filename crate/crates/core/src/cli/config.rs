//! The JSON run configuration and its translation into problem instances.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::control::{OcpInstance, OcpOptions};
use crate::error::{Error, Result};
use crate::experiments::{SUITES, SUITE_SEED};
use crate::kernel::{BoxConstraint, BundleTable, NonlinearityBundle};
use crate::numerics::{assemble_operators, build_grid, SpatialGrid, TimeGrid, Trajectory};
use crate::state::{solve_state, ProblemParams, StateInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    /// Nodes per axis.
    pub resolution: Vec<usize>,
    pub extents: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub horizon: f64,
    pub tau: f64,
}

/// Model constants other than the horizon, which lives in [`TimeSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSpec {
    pub mu: f64,
    pub nu: f64,
    pub eps: f64,
    pub l_u: f64,
    pub l_v: f64,
    pub m_eta: f64,
    pub m_theta: f64,
    pub m_u: f64,
    pub m_v: f64,
    pub c_emb: f64,
}

impl Default for ParamsSpec {
    fn default() -> Self {
        let p = ProblemParams::default();
        ParamsSpec {
            mu: p.mu,
            nu: p.nu,
            eps: p.eps,
            l_u: p.l_u,
            l_v: p.l_v,
            m_eta: p.m_eta,
            m_theta: p.m_theta,
            m_u: p.m_u,
            m_v: p.m_v,
            c_emb: p.c_emb,
        }
    }
}

impl ParamsSpec {
    pub fn resolve(&self, horizon: f64) -> ProblemParams {
        ProblemParams {
            mu: self.mu,
            nu: self.nu,
            eps: self.eps,
            l_u: self.l_u,
            l_v: self.l_v,
            m_eta: self.m_eta,
            m_theta: self.m_theta,
            m_u: self.m_u,
            m_v: self.m_v,
            horizon,
            c_emb: self.c_emb,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BundleSpec {
    Default {
        delta_star: f64,
    },
    /// CSV with header `x,g,dg,G,alpha0,dalpha0,alpha,dalpha,ddalpha`.
    Table {
        path: PathBuf,
        delta_star: f64,
    },
}

impl Default for BundleSpec {
    fn default() -> Self {
        BundleSpec::Default { delta_star: 1.0 }
    }
}

/// A named analytic field, a node-ordered CSV, or (targets only) the
/// endpoint of the uncontrolled run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Constant {
        value: f64,
    },
    /// `offset + amplitude·exp(−|x − center|²/(2 width²))`.
    GaussianBump {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `offset + amplitude·sin(2π k·x)`.
    Sine {
        wavevector: Vec<f64>,
        amplitude: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `amplitude·Π_d x_d(L_d − x_d)`, zero on the boundary.
    Bubble {
        amplitude: f64,
    },
    /// Header `x[,y],value`, one row per node in node order.
    Csv {
        path: PathBuf,
    },
    UncontrolledEndpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsSpec {
    pub eta0: FieldSpec,
    pub theta0: FieldSpec,
    #[serde(default = "endpoint")]
    pub eta_target: FieldSpec,
    #[serde(default = "endpoint")]
    pub theta_target: FieldSpec,
    /// Time-constant controls for `solve-state`, `gradcheck`, and the
    /// optimizer's starting point before projection.
    #[serde(default = "zero")]
    pub u: FieldSpec,
    #[serde(default = "zero")]
    pub v: FieldSpec,
}

fn endpoint() -> FieldSpec {
    FieldSpec::UncontrolledEndpoint
}

fn zero() -> FieldSpec {
    FieldSpec::Constant { value: 0.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lower: f64,
    pub upper: f64,
}

impl Default for BoxSpec {
    fn default() -> Self {
        BoxSpec { lower: -1.0, upper: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Write every `field_stride`-th frame under `fields/`; 0 disables.
    pub field_stride: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: PathBuf::from("kwcopt-out"),
            field_stride: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub time: TimeSpec,
    #[serde(default)]
    pub params: ParamsSpec,
    #[serde(default)]
    pub bundle: BundleSpec,
    pub fields: FieldsSpec,
    #[serde(default, rename = "box")]
    pub bounds: BoxSpec,
    #[serde(default)]
    pub optimizer: OcpOptions,
    /// Strictly decreasing regularizations for `eps-sweep`.
    #[serde(default)]
    pub eps_list: Vec<f64>,
    /// Steps `δ` for `gradcheck`.
    #[serde(default = "default_deltas")]
    pub fd_deltas: Vec<f64>,
    /// Suites for `check`; empty means all.
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default)]
    pub output: OutputSpec,
    /// Replaces `optimizer.seed`.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_deltas() -> Vec<f64> {
    vec![1e-3, 1e-4]
}

fn default_seed() -> u64 {
    SUITE_SEED
}

impl RunConfig {
    /// Parses JSON; relative paths inside, including the output directory,
    /// are resolved against `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Input(format!("config: {e}")))?;
        cfg.optimizer.seed = cfg.seed;
        cfg.output.dir = base.join(&cfg.output.dir);
        if let BundleSpec::Table { path, .. } = &mut cfg.bundle {
            *path = base.join(&*path);
        }
        for f in cfg.fields.all_mut() {
            if let FieldSpec::Csv { path } = f {
                *path = base.join(&*path);
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Everything that can be checked without solving.
    pub fn validate(&self) -> Result<()> {
        self.params.resolve(self.time.horizon).validate()?;
        TimeGrid::new(self.time.horizon, self.time.tau)?;
        if !(self.bounds.lower <= self.bounds.upper) {
            return Err(Error::Input(format!(
                "box lower {} exceeds upper {}",
                self.bounds.lower, self.bounds.upper
            )));
        }
        if let Some(s) = self.suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
            return Err(Error::Input(format!("unknown suite {s}; expected one of {SUITES:?}")));
        }
        if self.fd_deltas.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::Input("fd_deltas must be positive".into()));
        }
        for (name, f) in [
            ("eta0", &self.fields.eta0),
            ("theta0", &self.fields.theta0),
            ("u", &self.fields.u),
            ("v", &self.fields.v),
        ] {
            if *f == FieldSpec::UncontrolledEndpoint {
                return Err(Error::Input(format!("{name} cannot be the uncontrolled endpoint")));
            }
        }
        Ok(())
    }

    /// The eps-sweep list, checked.
    pub fn eps_levels(&self) -> Result<&[f64]> {
        if self.eps_list.is_empty() {
            return Err(Error::Input("eps_list is empty".into()));
        }
        if self.eps_list.iter().any(|e| !(*e > 0.0)) || self.eps_list.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Input("eps_list must be positive and strictly decreasing".into()));
        }
        Ok(&self.eps_list)
    }

    pub fn bundle(&self) -> Result<NonlinearityBundle> {
        match &self.bundle {
            BundleSpec::Default { delta_star } => Ok(NonlinearityBundle::default_with(*delta_star)),
            BundleSpec::Table { path, delta_star } => {
                let table = read_table(path)?;
                let (lo, hi) = (table.x.first().copied().unwrap_or(0.0), table.x.last().copied().unwrap_or(0.0));
                let b = NonlinearityBundle::tabulated(table, *delta_star)?;
                b.validate(lo, hi, 201)?;
                Ok(b)
            }
        }
    }

    /// Builds and validates the instance. Missing targets are filled by an
    /// uncontrolled run.
    pub fn instance(&self) -> Result<OcpInstance> {
        self.validate()?;
        let g = &self.grid;
        let grid = build_grid(g.dim, &g.resolution, &g.extents)?;
        let ops = Arc::new(assemble_operators(&grid)?);
        let time = TimeGrid::new(self.time.horizon, self.time.tau)?;
        let params = self.params.resolve(self.time.horizon);
        let bundle = self.bundle()?;
        let n = ops.nodes();
        let f = &self.fields;
        let mut state = StateInstance {
            ops: ops.clone(),
            time,
            params,
            bundle,
            eta0: sample_field(&f.eta0, &grid)?,
            theta0: sample_field(&f.theta0, &grid)?,
            eta_ad: DVector::zeros(n),
            theta_ad: DVector::zeros(n),
            u: Trajectory::constant(time, sample_field(&f.u, &grid)?),
            v: Trajectory::constant(time, sample_field(&f.v, &grid)?),
        };
        let needs_endpoint = [&f.eta_target, &f.theta_target]
            .iter()
            .any(|s| **s == FieldSpec::UncontrolledEndpoint);
        let free = if needs_endpoint {
            let zero = state.with_controls(Trajectory::zeros(time, n), Trajectory::zeros(time, n));
            Some(solve_state(&zero)?)
        } else {
            None
        };
        let target = |spec: &FieldSpec, pick: fn(&crate::state::StateTrajectory) -> &Trajectory| match spec {
            FieldSpec::UncontrolledEndpoint => Ok(pick(free.as_ref().expect("computed above")).last().clone()),
            s => sample_field(s, &grid),
        };
        state.eta_ad = target(&f.eta_target, |s| &s.eta)?;
        state.theta_ad = target(&f.theta_target, |s| &s.theta)?;
        state.validate()?;
        let constraint = BoxConstraint::constant(time, n, self.bounds.lower, self.bounds.upper)?;
        Ok(OcpInstance { state, constraint })
    }
}

impl FieldsSpec {
    fn all_mut(&mut self) -> [&mut FieldSpec; 6] {
        [
            &mut self.eta0,
            &mut self.theta0,
            &mut self.eta_target,
            &mut self.theta_target,
            &mut self.u,
            &mut self.v,
        ]
    }
}

/// Node values of `spec` on `grid`.
pub fn sample_field(spec: &FieldSpec, grid: &SpatialGrid) -> Result<DVector<f64>> {
    let dim = grid.dim();
    let want = |name: &str, v: &[f64]| {
        if v.len() == dim {
            Ok(())
        } else {
            Err(Error::Input(format!("{name} has {} components in dimension {dim}", v.len())))
        }
    };
    match spec {
        FieldSpec::Constant { value } => Ok(DVector::from_element(grid.node_count(), *value)),
        FieldSpec::GaussianBump {
            center,
            width,
            amplitude,
            offset,
        } => {
            want("center", center)?;
            if !(*width > 0.0) {
                return Err(Error::Input("gaussian width must be positive".into()));
            }
            Ok(grid.sample(|x| {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                offset + amplitude * (-r2 / (2.0 * width * width)).exp()
            }))
        }
        FieldSpec::Sine {
            wavevector,
            amplitude,
            offset,
        } => {
            want("wavevector", wavevector)?;
            Ok(grid.sample(|x| {
                let phase: f64 = x.iter().zip(wavevector).map(|(a, k)| a * k).sum();
                offset + amplitude * (2.0 * PI * phase).sin()
            }))
        }
        FieldSpec::Bubble { amplitude } => {
            let ext = grid.extents().to_vec();
            Ok(grid.sample(|x| amplitude * x.iter().zip(&ext).map(|(a, l)| a * (l - a)).product::<f64>()))
        }
        FieldSpec::Csv { path } => read_field(path, grid),
        FieldSpec::UncontrolledEndpoint => Err(Error::Input("the uncontrolled endpoint is not a sampled field".into())),
    }
}

fn csv_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Input(format!("{}: {e}", path.display()))
}

fn read_field(path: &Path, grid: &SpatialGrid) -> Result<DVector<f64>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let expected: Vec<&str> = ["x", "y"][..grid.dim()].iter().copied().chain(["value"]).collect();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(csv_error(path, format!("header must be {}", expected.join(","))));
    }
    let mut values = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let nums = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| csv_error(path, format!("row {}: {e}", row + 1)))?;
        let node = grid
            .coords()
            .get(row)
            .ok_or_else(|| csv_error(path, "more rows than grid nodes"))?;
        let h = grid.spacing();
        if (0..grid.dim()).any(|d| (nums[d] - node[d]).abs() > 1e-6 * h.max(1.0)) {
            return Err(csv_error(path, format!("row {} is not at node {row}", row + 1)));
        }
        values.push(nums[grid.dim()]);
    }
    if values.len() != grid.node_count() {
        return Err(csv_error(path, format!("{} rows for {} nodes", values.len(), grid.node_count())));
    }
    Ok(DVector::from_vec(values))
}

fn read_table(path: &Path) -> Result<BundleTable> {
    const COLS: [&str; 9] = ["x", "g", "dg", "G", "alpha0", "dalpha0", "alpha", "dalpha", "ddalpha"];
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != COLS {
        return Err(csv_error(path, format!("header must be {}", COLS.join(","))));
    }
    let mut cols: [Vec<f64>; 9] = Default::default();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        for (c, s) in cols.iter_mut().zip(rec.iter()) {
            c.push(s.trim().parse().map_err(|e| csv_error(path, format!("row {}: {e}", row + 1)))?);
        }
    }
    let [x, g, dg, big_g, alpha0, dalpha0, alpha, dalpha, ddalpha] = cols;
    Ok(BundleTable {
        x,
        g,
        dg,
        big_g,
        alpha0,
        dalpha0,
        alpha,
        dalpha,
        ddalpha,
    })
}
