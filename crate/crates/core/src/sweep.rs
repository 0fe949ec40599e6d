//! Parameter sweeps over one or two axes and landscape analysis.
//!
//! Grid points are evaluated independently (in parallel when a worker pool is
//! available) and written to slots fixed by their grid index, so a surface is
//! bit-identical regardless of worker count. Post-processing runs on the
//! completed surface.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::IntegratorConfig;
use crate::model::ModelSpec;
use crate::objective::{flatness, recombination_rate, t_bar, ObjectiveSpec};
use crate::units::{energy_to_cm1, time_to_fs};

/// Ties closer than this are treated as a plateau.
pub const PLATEAU_TOLERANCE: f64 = 1e-12;
/// A 1D minimum is significant when its depth exceeds this fraction of `T₀`.
pub const SIGNIFICANCE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    /// Vibron amplitude `A` (drive on level 2).
    Amplitude,
    /// Vibron angular frequency `ω`.
    #[serde(rename = "omega")]
    Frequency,
    /// Vibron phase `φ`.
    #[serde(rename = "phi")]
    Phase,
    GammaMinus,
}

impl Parameter {
    pub fn key(self) -> &'static str {
        match self {
            Parameter::Amplitude => "amplitude",
            Parameter::Frequency => "omega",
            Parameter::Phase => "phi",
            Parameter::GammaMinus => "gamma_minus",
        }
    }

    pub fn apply(self, model: &mut ModelSpec, value: f64) {
        match self {
            Parameter::Amplitude => model.drive.a2 = value,
            Parameter::Frequency => model.drive.omega = value,
            Parameter::Phase => model.drive.phi = value,
            Parameter::GammaMinus => model.dissipation.gamma_minus = value,
        }
    }

    pub fn is_energy(self) -> bool {
        !matches!(self, Parameter::Phase)
    }

    /// CSV column names for one value of this parameter.
    pub fn columns(self) -> Vec<String> {
        if self.is_energy() {
            vec![
                format!("{}_internal", self.key()),
                format!("{}_cm1", self.key()),
            ]
        } else {
            vec![format!("{}_rad", self.key())]
        }
    }

    fn column_values(self, v: f64) -> Vec<f64> {
        if self.is_energy() {
            vec![v, energy_to_cm1(v)]
        } else {
            vec![v]
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: Parameter,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(param: Parameter, start: f64, stop: f64, count: usize) -> Self {
        Axis {
            param,
            start,
            stop,
            count,
        }
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + i as f64 * (self.stop - self.start) / n as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    TBar,
    RecombinationRate,
}

impl ObjectiveKind {
    pub fn columns(self) -> Vec<&'static str> {
        match self {
            ObjectiveKind::TBar => vec!["t_bar_internal", "t_bar_fs"],
            ObjectiveKind::RecombinationRate => vec!["recombination_rate"],
        }
    }

    fn column_values(self, v: f64) -> Vec<f64> {
        match self {
            ObjectiveKind::TBar => vec![v, time_to_fs(v)],
            ObjectiveKind::RecombinationRate => vec![v],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub base: ModelSpec,
    pub objective: ObjectiveKind,
    pub window: ObjectiveSpec,
    pub integrator: IntegratorConfig,
    /// Neighborhood radius (grid steps) for the basin flatness of each minimum.
    pub flatness_radius: usize,
}

impl SweepSpec {
    pub fn new(
        axes: Vec<Axis>,
        base: ModelSpec,
        objective: ObjectiveKind,
        window: ObjectiveSpec,
    ) -> Self {
        SweepSpec {
            axes,
            base,
            objective,
            window,
            integrator: IntegratorConfig::default(),
            flatness_radius: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidParameter(format!(
                "a sweep needs 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        for a in &self.axes {
            if a.count < 2 {
                return Err(Error::InvalidParameter(format!(
                    "axis {} needs count ≥ 2",
                    a.param
                )));
            }
            if !(a.start.is_finite() && a.stop.is_finite() && a.start < a.stop) {
                return Err(Error::InvalidParameter(format!(
                    "axis {} needs finite start < stop",
                    a.param
                )));
            }
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::InvalidParameter(
                "sweep axes must be distinct".into(),
            ));
        }
        self.base.validate()?;
        self.window.validate()?;
        self.integrator.validate()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    fn model_at(&self, coords: &[f64]) -> ModelSpec {
        let mut m = self.base;
        for (a, &v) in self.axes.iter().zip(coords) {
            a.param.apply(&mut m, v);
        }
        m
    }

    /// Objective value for a single parameter point.
    pub fn evaluate(&self, coords: &[f64]) -> Result<f64> {
        let model = self.model_at(coords);
        let tb = t_bar(&model, &self.window, &self.integrator)?;
        Ok(match self.objective {
            ObjectiveKind::TBar => tb,
            ObjectiveKind::RecombinationRate => {
                recombination_rate(model.dissipation.gamma_minus, tb, &self.window)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMetadata {
    pub timestamp: String,
    pub engine_version: String,
    pub integrator: IntegratorConfig,
}

/// Objective values on the sweep grid, row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSurface {
    pub spec: SweepSpec,
    pub grid: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub metadata: SurfaceMetadata,
}

impl SweepSurface {
    /// Wrap precomputed values (e.g. a synthetic landscape) in a surface.
    pub fn from_values(spec: SweepSpec, values: Vec<f64>) -> Result<Self> {
        let expected: usize = spec.shape().iter().product();
        if values.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "surface needs {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "surface value {v} is not finite"
            )));
        }
        Ok(SweepSurface {
            grid: spec.axes.iter().map(Axis::values).collect(),
            metadata: SurfaceMetadata {
                timestamp: chrono::Utc::now().to_rfc3339(),
                engine_version: crate::ENGINE_VERSION.to_string(),
                integrator: spec.integrator,
            },
            spec,
            values,
        })
    }

    pub fn shape(&self) -> Vec<usize> {
        self.spec.shape()
    }

    pub fn ndim(&self) -> usize {
        self.spec.axes.len()
    }

    fn flat(&self, idx: &[usize]) -> usize {
        flat_index(&self.shape(), idx)
    }

    pub fn value(&self, idx: &[usize]) -> f64 {
        self.values[self.flat(idx)]
    }

    pub fn location(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.grid).map(|(&i, g)| g[i]).collect()
    }

    fn axis_position(&self, param: Parameter) -> Result<usize> {
        self.spec
            .axes
            .iter()
            .position(|a| a.param == param)
            .ok_or_else(|| Error::AxisNotInSurface(param.to_string()))
    }

    /// Long-format CSV: one row per grid point, axis columns then objective.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut header: Vec<String> = self
            .spec
            .axes
            .iter()
            .flat_map(|a| a.param.columns())
            .collect();
        header.extend(self.spec.objective.columns().into_iter().map(String::from));
        writeln!(w, "{}", header.join(","))?;
        let shape = self.shape();
        for (k, &v) in self.values.iter().enumerate() {
            let idx = unflatten(&shape, k);
            let mut row: Vec<f64> = Vec::new();
            for (d, (a, &i)) in self.spec.axes.iter().zip(&idx).enumerate() {
                row.extend(a.param.column_values(self.grid[d][i]));
            }
            row.extend(self.spec.objective.column_values(v));
            let row: Vec<String> = row.iter().map(f64::to_string).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn flat_index(shape: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &n)| acc * n + i)
}

fn unflatten(shape: &[usize], mut k: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for d in (0..shape.len()).rev() {
        idx[d] = k % shape[d];
        k /= shape[d];
    }
    idx
}

/// Axis-adjacent and diagonal neighbors inside the grid.
fn neighbors(shape: &[usize], idx: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let deltas: &[i64] = &[-1, 0, 1];
    match shape.len() {
        1 => {
            for &d in deltas {
                let i = idx[0] as i64 + d;
                if d != 0 && i >= 0 && (i as usize) < shape[0] {
                    out.push(vec![i as usize]);
                }
            }
        }
        _ => {
            for &di in deltas {
                for &dj in deltas {
                    let (i, j) = (idx[0] as i64 + di, idx[1] as i64 + dj);
                    if (di, dj) != (0, 0)
                        && i >= 0
                        && j >= 0
                        && (i as usize) < shape[0]
                        && (j as usize) < shape[1]
                    {
                        out.push(vec![i as usize, j as usize]);
                    }
                }
            }
        }
    }
    out
}

fn on_boundary(shape: &[usize], idx: &[usize]) -> bool {
    idx.iter().zip(shape).any(|(&i, &n)| i == 0 || i + 1 == n)
}

/// Evaluate the sweep on the ambient rayon pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepSurface> {
    spec.validate()?;
    let shape = spec.shape();
    let grid: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let total: usize = shape.iter().product();
    let coords_of = |k: usize| -> Vec<f64> {
        unflatten(&shape, k)
            .iter()
            .zip(&grid)
            .map(|(&i, g)| g[i])
            .collect()
    };
    let results: Vec<Result<f64>> = (0..total)
        .into_par_iter()
        .map(|k| spec.evaluate(&coords_of(k)))
        .collect();
    let mut values = Vec::with_capacity(total);
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(grid_error(
                    spec,
                    &coords_of(k),
                    Error::Divergence { time: v },
                ));
            }
            Err(e) => return Err(grid_error(spec, &coords_of(k), e)),
        }
    }
    SweepSurface::from_values(spec.clone(), values)
}

fn grid_error(spec: &SweepSpec, coords: &[f64], source: Error) -> Error {
    Error::GridPoint {
        coords: spec
            .axes
            .iter()
            .zip(coords)
            .map(|(a, &v)| (a.param.to_string(), v))
            .collect(),
        source: Box::new(source),
    }
}

/// Evaluate the sweep on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(spec: &SweepSpec, workers: usize) -> Result<SweepSurface> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::WorkerPool(e.to_string()))?;
    pool.install(|| run_sweep(spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimumKind {
    Local,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Significance {
    Significant,
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub index: Vec<usize>,
    pub location: Vec<f64>,
    pub value: f64,
    pub kind: MinimumKind,
    /// `None` when the flatness neighborhood leaves the grid.
    pub basin_flatness: Option<f64>,
    /// Depth below the lower of the two flanking maxima (1D only).
    pub depth: Option<f64>,
    pub significance: Option<Significance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaReport {
    /// Interior local minima in grid order; the global one carries
    /// `kind = Global` when it is interior.
    pub local: Vec<Minimum>,
    pub global: Minimum,
    /// The least grid value sits on the boundary (and is absent from `local`).
    pub global_on_boundary: bool,
}

impl MinimaReport {
    pub fn significant(&self) -> impl Iterator<Item = &Minimum> {
        self.local
            .iter()
            .filter(|m| m.significance != Some(Significance::Marginal))
    }
}

/// Interior local minima of a gridded function. Connected plateaus (ties
/// within [`PLATEAU_TOLERANCE`]) count once, at their lexicographically
/// smallest point, and only when every neighbor of the plateau is strictly
/// higher.
fn local_minima_indices(shape: &[usize], values: &[f64]) -> Vec<Vec<usize>> {
    let total = values.len();
    let mut seen = vec![false; total];
    let mut found = Vec::new();
    for k in 0..total {
        if seen[k] {
            continue;
        }
        let level = values[k];
        let mut queue = VecDeque::from([k]);
        seen[k] = true;
        let mut members = vec![k];
        let mut is_min = true;
        while let Some(p) = queue.pop_front() {
            let idx = unflatten(shape, p);
            if on_boundary(shape, &idx) {
                is_min = false;
            }
            for n in neighbors(shape, &idx) {
                let q = flat_index(shape, &n);
                let v = values[q];
                if (v - level).abs() <= PLATEAU_TOLERANCE {
                    if !seen[q] {
                        seen[q] = true;
                        members.push(q);
                        queue.push_back(q);
                    }
                } else if v < level {
                    is_min = false;
                }
            }
        }
        if is_min {
            let first = *members.iter().min().unwrap_or(&k);
            found.push(unflatten(shape, first));
        }
    }
    found.sort();
    found
}

/// Depth of a 1D minimum below the lower of its two flanking maxima; a flank
/// that rises to the boundary uses the boundary value.
fn flank_depth(values: &[f64], i: usize) -> f64 {
    let mut l = i;
    while l > 0 && values[l - 1] >= values[l] {
        l -= 1;
    }
    let mut r = i;
    while r + 1 < values.len() && values[r + 1] >= values[r] {
        r += 1;
    }
    values[l].min(values[r]) - values[i]
}

pub fn find_minima(surface: &SweepSurface) -> MinimaReport {
    let shape = surface.shape();
    let values = &surface.values;
    let global_k = values
        .iter()
        .enumerate()
        .fold(0, |best, (k, &v)| if v < values[best] { k } else { best });
    let global_idx = unflatten(&shape, global_k);
    let radius = surface.spec.flatness_radius.max(1);
    let threshold = SIGNIFICANCE_FRACTION * surface.spec.window.t0;

    let make = |idx: Vec<usize>, kind: MinimumKind| {
        let (depth, significance) = if shape.len() == 1 {
            let d = flank_depth(values, idx[0]);
            let s = if d > threshold {
                Significance::Significant
            } else {
                Significance::Marginal
            };
            (Some(d), Some(s))
        } else {
            (None, None)
        };
        Minimum {
            location: surface.location(&idx),
            value: surface.value(&idx),
            kind,
            basin_flatness: flatness(surface, &idx, radius).ok(),
            depth,
            significance,
            index: idx,
        }
    };

    let global_value = values[global_k];
    let local: Vec<Minimum> = local_minima_indices(&shape, values)
        .into_iter()
        .map(|idx| {
            let kind = if surface.value(&idx) <= global_value {
                MinimumKind::Global
            } else {
                MinimumKind::Local
            };
            make(idx, kind)
        })
        .collect();
    let global_on_boundary = on_boundary(&shape, &global_idx);
    let global = local
        .iter()
        .find(|m| m.kind == MinimumKind::Global)
        .cloned()
        .unwrap_or_else(|| make(global_idx, MinimumKind::Global));
    MinimaReport {
        local,
        global,
        global_on_boundary,
    }
}

/// Lower envelope of a 2D surface along one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    /// Axis that was minimized over.
    pub minimized: Parameter,
    /// Remaining axis.
    pub axis: Parameter,
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
    /// Location on the minimized axis attaining each value.
    pub argmin: Vec<f64>,
}

impl Profile {
    /// Interior local minima (dips) of the profile, by index.
    pub fn dips(&self) -> Vec<usize> {
        local_minima_indices(&[self.values.len()], &self.values)
            .into_iter()
            .map(|i| i[0])
            .collect()
    }
}

pub fn min_over_axis(surface: &SweepSurface, axis: Parameter) -> Result<Profile> {
    if surface.ndim() != 2 {
        return Err(Error::NotTwoDimensional);
    }
    let over = surface.axis_position(axis)?;
    let keep = 1 - over;
    let shape = surface.shape();
    let mut values = Vec::with_capacity(shape[keep]);
    let mut argmin = Vec::with_capacity(shape[keep]);
    for k in 0..shape[keep] {
        let mut best = (f64::INFINITY, 0usize);
        for m in 0..shape[over] {
            let mut idx = [0usize; 2];
            idx[keep] = k;
            idx[over] = m;
            let v = surface.value(&idx);
            if v < best.0 {
                best = (v, m);
            }
        }
        values.push(best.0);
        argmin.push(surface.grid[over][best.1]);
    }
    Ok(Profile {
        minimized: axis,
        axis: surface.spec.axes[keep].param,
        coords: surface.grid[keep].clone(),
        values,
        argmin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frontier {
    height: f64,
    k: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on height, index breaks ties
        other
            .height
            .total_cmp(&self.height)
            .then_with(|| other.k.cmp(&self.k))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lowest possible maximum along any grid-adjacency path between two points.
fn saddle_height(surface: &SweepSurface, from: &[usize], to: &[usize]) -> f64 {
    let shape = surface.shape();
    let start = flat_index(&shape, from);
    let goal = flat_index(&shape, to);
    let mut best = vec![f64::INFINITY; surface.values.len()];
    best[start] = surface.values[start];
    let mut heap = BinaryHeap::from([Frontier {
        height: best[start],
        k: start,
    }]);
    while let Some(Frontier { height, k }) = heap.pop() {
        if k == goal {
            return height;
        }
        if height > best[k] {
            continue;
        }
        for n in neighbors(&shape, &unflatten(&shape, k)) {
            let q = flat_index(&shape, &n);
            let h = height.max(surface.values[q]);
            if h < best[q] {
                best[q] = h;
                heap.push(Frontier { height: h, k: q });
            }
        }
    }
    best[goal]
}

/// Barrier separating two minima: saddle height of the minimax path minus the
/// higher of the two minimum values. Positive means no descending route exists.
pub fn barrier_check(surface: &SweepSurface, m1: &Minimum, m2: &Minimum) -> f64 {
    let saddle = saddle_height(surface, &m1.index, &m2.index);
    saddle - surface.value(&m1.index).max(surface.value(&m2.index))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Barrier {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub height: f64,
}

/// Full post-processing of a completed surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub surface: SweepSurface,
    pub minima: MinimaReport,
    /// Minimum over the first axis for every value of the second (2D only).
    pub profile: Option<Profile>,
    /// Profile dip locations on the remaining axis.
    pub profile_dips: Vec<f64>,
    /// Barriers between every pair of interior local minima.
    pub barriers: Vec<Barrier>,
}

pub fn analyze(surface: SweepSurface) -> SurfaceReport {
    let minima = find_minima(&surface);
    let (profile, profile_dips) = if surface.ndim() == 2 {
        let p = min_over_axis(&surface, surface.spec.axes[0].param).ok();
        let dips = p
            .as_ref()
            .map(|p| p.dips().into_iter().map(|i| p.coords[i]).collect())
            .unwrap_or_default();
        (p, dips)
    } else {
        (None, Vec::new())
    };
    let mut barriers = Vec::new();
    for (a, m1) in minima.local.iter().enumerate() {
        for m2 in &minima.local[a + 1..] {
            barriers.push(Barrier {
                from: m1.location.clone(),
                to: m2.location.clone(),
                height: barrier_check(&surface, m1, m2),
            });
        }
    }
    SurfaceReport {
        surface,
        minima,
        profile,
        profile_dips,
        barriers,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DissipationSpec, DriveSpec, SinkSpec};

    fn base() -> ModelSpec {
        ModelSpec {
            e1: 3.0,
            e2: 0.0,
            j: 0.75,
            drive: DriveSpec::on_level2(3.0, 3.40, 0.0),
            dissipation: DissipationSpec::new(0.6, 0.22),
            sink: SinkSpec::new(0.0, 0.1),
        }
    }

    fn surface_2d(n: usize, m: usize, f: impl Fn(f64, f64) -> f64) -> SweepSurface {
        let axes = vec![
            Axis::new(Parameter::Amplitude, 0.0, (n - 1) as f64, n),
            Axis::new(Parameter::Frequency, 0.0, (m - 1) as f64, m),
        ];
        let spec = SweepSpec::new(
            axes,
            base(),
            ObjectiveKind::TBar,
            ObjectiveSpec::with_window(1.0),
        );
        let mut values = Vec::new();
        for i in 0..n {
            for j in 0..m {
                values.push(f(i as f64, j as f64));
            }
        }
        SweepSurface::from_values(spec, values).unwrap()
    }

    fn surface_1d(values: Vec<f64>, t0: f64) -> SweepSurface {
        let n = values.len();
        let axes = vec![Axis::new(Parameter::Frequency, 0.0, (n - 1) as f64, n)];
        let spec = SweepSpec::new(
            axes,
            base(),
            ObjectiveKind::TBar,
            ObjectiveSpec::with_window(t0),
        );
        SweepSurface::from_values(spec, values).unwrap()
    }

    #[test]
    fn axis_values_hit_endpoints() {
        let a = Axis::new(Parameter::Frequency, 0.5, 5.0, 91);
        let v = a.values();
        assert_eq!(v[0], 0.5);
        assert_eq!(v[90], 5.0);
        assert!((v[27] - 1.85).abs() < 1e-12);
    }

    #[test]
    fn convex_bowl_has_single_minimum() {
        let s = surface_2d(9, 11, |x, y| {
            (x - 3.0).powi(2) + 2.0 * (y - 6.0).powi(2) + 1.0
        });
        let r = find_minima(&s);
        assert_eq!(r.local.len(), 1);
        assert_eq!(r.local[0].index, vec![3, 6]);
        assert_eq!(r.local[0].kind, MinimumKind::Global);
        assert_eq!(r.global.index, vec![3, 6]);
        assert!(!r.global_on_boundary);
        assert_eq!(barrier_check(&s, &r.local[0], &r.local[0]), 0.0);
    }

    #[test]
    fn monotone_surface_has_boundary_global_only() {
        let s = surface_2d(5, 6, |x, y| x + 2.0 * y);
        let r = find_minima(&s);
        assert!(r.local.is_empty());
        assert!(r.global_on_boundary);
        assert_eq!(r.global.index, vec![0, 0]);
    }

    #[test]
    fn plateau_reports_lexicographically_smallest_point() {
        let s = surface_2d(6, 6, |x, y| {
            if (2.0..=3.0).contains(&x) && (2.0..=3.0).contains(&y) {
                0.0
            } else {
                1.0
            }
        });
        let r = find_minima(&s);
        assert_eq!(r.local.len(), 1);
        assert_eq!(r.local[0].index, vec![2, 2]);
    }

    #[test]
    fn plateau_with_lower_exit_is_not_a_minimum() {
        let s = surface_1d(vec![3.0, 2.0, 2.0, 1.0, 5.0], 1.0);
        let r = find_minima(&s);
        assert_eq!(r.local.len(), 1);
        assert_eq!(r.local[0].index, vec![3]);
    }

    #[test]
    fn one_dimensional_significance() {
        // Dip at 1 with depth 0.05 (< 1% of T₀ = 10) and dip at 4 with depth 2.
        let s = surface_1d(vec![5.0, 4.95, 5.0, 4.0, 3.0, 6.0], 10.0);
        let r = find_minima(&s);
        assert_eq!(r.local.len(), 2);
        assert_eq!(r.local[0].significance, Some(Significance::Marginal));
        assert!((r.local[0].depth.unwrap() - 0.05).abs() < 1e-12);
        assert_eq!(r.local[1].significance, Some(Significance::Significant));
        assert!((r.local[1].depth.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(r.significant().count(), 1);
    }

    #[test]
    fn barrier_between_separated_dips() {
        // Two wells at y=2 and y=8 separated by a ridge at y=5.
        let s = surface_2d(7, 11, |x, y| {
            let well =
                |c: f64, depth: f64| depth * (-((y - c).powi(2) + (x - 3.0).powi(2)) / 2.0).exp();
            2.0 - well(2.0, 1.0) - well(8.0, 0.8)
        });
        let r = find_minima(&s);
        assert_eq!(r.local.len(), 2);
        let b12 = barrier_check(&s, &r.local[0], &r.local[1]);
        let b21 = barrier_check(&s, &r.local[1], &r.local[0]);
        assert!(b12 > 0.0);
        assert_eq!(b12, b21);
    }

    #[test]
    fn flat_valley_between_equal_dips_has_zero_barrier() {
        // Row 2 is a flat valley at 0 joining both ends; everything else is 1.
        let s = surface_2d(5, 9, |x, _| if x == 2.0 { 0.0 } else { 1.0 });
        let a = Minimum {
            index: vec![2, 1],
            location: vec![2.0, 1.0],
            value: 0.0,
            kind: MinimumKind::Local,
            basin_flatness: None,
            depth: None,
            significance: None,
        };
        let b = Minimum {
            index: vec![2, 7],
            location: vec![2.0, 7.0],
            ..a.clone()
        };
        assert_eq!(barrier_check(&s, &a, &b), 0.0);
    }

    #[test]
    fn profile_dominates_surface() {
        let s = surface_2d(6, 8, |x, y| ((x - 2.0) * (y - 3.0)).sin() + 0.1 * x);
        let p = min_over_axis(&s, Parameter::Amplitude).unwrap();
        assert_eq!(p.axis, Parameter::Frequency);
        for (j, pv) in p.values.iter().enumerate() {
            for i in 0..6 {
                assert!(*pv <= s.value(&[i, j]));
            }
        }
        let q = min_over_axis(&s, Parameter::Frequency).unwrap();
        assert_eq!(q.values.len(), 6);
    }

    #[test]
    fn profile_of_constant_rows() {
        let s = surface_2d(4, 5, |_, y| (y - 2.0).powi(2));
        let p = min_over_axis(&s, Parameter::Amplitude).unwrap();
        assert_eq!(p.values, vec![4.0, 1.0, 0.0, 1.0, 4.0]);
        assert_eq!(p.dips(), vec![2]);
    }

    #[test]
    fn profile_errors() {
        let s = surface_1d(vec![1.0, 0.0, 1.0], 1.0);
        assert!(matches!(
            min_over_axis(&s, Parameter::Frequency),
            Err(Error::NotTwoDimensional)
        ));
        let s = surface_2d(3, 3, |x, y| x + y);
        assert!(matches!(
            min_over_axis(&s, Parameter::Phase),
            Err(Error::AxisNotInSurface(_))
        ));
    }

    #[test]
    fn spec_validation() {
        let w = ObjectiveSpec::with_window(1.0);
        let bad = SweepSpec::new(vec![], base(), ObjectiveKind::TBar, w);
        assert!(bad.validate().is_err());
        let dup = SweepSpec::new(
            vec![
                Axis::new(Parameter::Phase, 0.0, 1.0, 3),
                Axis::new(Parameter::Phase, 0.0, 1.0, 3),
            ],
            base(),
            ObjectiveKind::TBar,
            w,
        );
        assert!(dup.validate().is_err());
        let short = SweepSpec::new(
            vec![Axis::new(Parameter::Phase, 0.0, 1.0, 1)],
            base(),
            ObjectiveKind::TBar,
            w,
        );
        assert!(short.validate().is_err());
        let reversed = SweepSpec::new(
            vec![Axis::new(Parameter::Phase, 1.0, 0.0, 3)],
            base(),
            ObjectiveKind::TBar,
            w,
        );
        assert!(reversed.validate().is_err());
    }

    #[test]
    fn failing_grid_point_reports_coordinates() {
        let mut b = base();
        b.drive = b.drive.with_feedback();
        // Nonzero phase with feedback on is rejected per point.
        let spec = SweepSpec::new(
            vec![Axis::new(Parameter::Phase, -0.5, 0.5, 3)],
            b,
            ObjectiveKind::TBar,
            ObjectiveSpec::with_window(1.0),
        );
        let err = run_sweep(&spec).unwrap_err();
        match err {
            Error::GridPoint { coords, .. } => assert_eq!(coords, vec![("phi".to_string(), -0.5)]),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn csv_long_format() {
        let s = surface_2d(2, 3, |x, y| x * 10.0 + y);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "amplitude_internal,amplitude_cm1,omega_internal,omega_cm1,t_bar_internal,t_bar_fs"
        );
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[6], "1,100,2,200,12,600");
    }

    #[test]
    fn parallel_sweep_is_deterministic() {
        let mut spec = SweepSpec::new(
            vec![
                Axis::new(Parameter::Amplitude, 2.0, 4.0, 3),
                Axis::new(Parameter::Frequency, 3.0, 3.6, 4),
            ],
            base(),
            ObjectiveKind::RecombinationRate,
            ObjectiveSpec::with_window(crate::objective::default_window(3.40)),
        );
        spec.integrator.steps_per_period = 200;
        let one = run_sweep_with_workers(&spec, 1).unwrap();
        let four = run_sweep_with_workers(&spec, 4).unwrap();
        assert_eq!(one.values, four.values);
        assert_eq!(one.grid, four.grid);
        for v in &one.values {
            assert!(v.is_finite() && *v > 0.0);
        }
    }
}
