//! Experiment description: model source, reduction settings, time grid,
//! input signal and initial states.

use std::f64::consts::PI;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use balbound::{Method, ReducedModel, SampledSignal, StateSpaceModel, TimeGrid};
use nalgebra::{DMatrix, DVector};

use crate::error::{BenchError, Result};
use crate::mm::read_matrix;
use crate::synth::{synthesize_model, SyntheticSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    Files {
        a: PathBuf,
        b: PathBuf,
        c: PathBuf,
        d: Option<PathBuf>,
        column: usize,
        row: usize,
    },
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    /// `4 sin³(2.7 t) + e^{0.2 t}`
    Beam,
    /// `t − 8e^{−t/2}` up to `t = π`, then `(π − t) − 8e^{−t/2}`.
    CdPlayer,
    /// One column of `m` samples, or `t,u` pairs interpolated onto the grid.
    Csv(PathBuf),
    /// `λ0, λ1..λK (cos), λK+1..λ2K (sin)` with period `T`.
    Fourier(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Zero,
    Ones(f64),
    File(PathBuf, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RomStateSpec {
    Zero,
    Project,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub model: ModelSource,
    pub methods: Vec<Method>,
    pub n: Option<usize>,
    pub n_range: Option<RangeInclusive<usize>>,
    pub k: usize,
    pub k_range: RangeInclusive<usize>,
    pub t_final: f64,
    pub grid_m: usize,
    pub input: InputSpec,
    pub x0: StateSpec,
    pub x0hat: RomStateSpec,
    pub out_dir: PathBuf,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(BenchError::Config("`T` must be positive".into()));
        }
        let k_max = self.k.max(*self.k_range.end());
        if self.grid_m < 2 || self.grid_m < balbound::bounds::MIN_POINTS_PER_ORDER * k_max {
            return Err(BenchError::Config(format!(
                "`grid_m` = {} does not resolve K = {k_max}; need at least {}",
                self.grid_m,
                (balbound::bounds::MIN_POINTS_PER_ORDER * k_max).max(2)
            )));
        }
        if self.n == Some(0) || self.n_range.as_ref().is_some_and(|r| *r.start() == 0) {
            return Err(BenchError::Config(
                "reduced order must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        Ok(TimeGrid::new(self.t_final, self.grid_m)?)
    }

    pub fn order(&self) -> Result<usize> {
        self.n
            .ok_or_else(|| BenchError::Config("`n` is required".into()))
    }

    pub fn orders(&self) -> Result<RangeInclusive<usize>> {
        self.n_range
            .clone()
            .ok_or_else(|| BenchError::Config("`n_range` (or `n`) is required".into()))
    }

    pub fn load_model(&self) -> Result<StateSpaceModel> {
        match &self.model {
            ModelSource::Files {
                a,
                b,
                c,
                d,
                column,
                row,
            } => load_model(a, b, c, d.as_deref(), *column, *row),
            ModelSource::Synthetic(spec) => synthesize_model(spec),
        }
    }

    pub fn sample_input(&self) -> Result<SampledSignal> {
        sample_input(&self.input, self.grid()?)
    }

    pub fn initial_state(&self, order: usize) -> Result<DVector<f64>> {
        Ok(match &self.x0 {
            StateSpec::Zero => DVector::zeros(order),
            StateSpec::Ones(s) => DVector::from_element(order, *s),
            StateSpec::File(path, s) => {
                let m = read_matrix(path)?;
                if m.len() != order || (m.nrows() != 1 && m.ncols() != 1) {
                    return Err(BenchError::Config(format!(
                        "{}: initial state must be a vector of length {order}",
                        path.display()
                    )));
                }
                DVector::from_iterator(order, m.iter().copied()) * *s
            }
        })
    }

    pub fn rom_initial_state(&self, rom: &ReducedModel, x0: &DVector<f64>) -> DVector<f64> {
        match self.x0hat {
            RomStateSpec::Zero => DVector::zeros(rom.order()),
            RomStateSpec::Project => rom.project_state(x0),
        }
    }
}

fn read_existing(path: &Path) -> Result<DMatrix<f64>> {
    if !path.exists() {
        return Err(BenchError::Config(format!(
            "{} not found; benchmark data (e.g. SLICOT Beam, CD Player) is not bundled, see scripts/fetch_slicot.sh",
            path.display()
        )));
    }
    read_matrix(path)
}

/// Assemble a SISO model from matrix files, picking input `column` of B and
/// output `row` of C (1-based). A missing D means zero feedthrough.
pub fn load_model(
    a: &Path,
    b: &Path,
    c: &Path,
    d: Option<&Path>,
    column: usize,
    row: usize,
) -> Result<StateSpaceModel> {
    let a = read_existing(a)?;
    let n = a.nrows();
    let mut bm = read_existing(b)?;
    let mut cm = read_existing(c)?;
    // Tolerate vectors stored with the other orientation.
    if bm.nrows() != n && bm.ncols() == n && bm.nrows() == 1 {
        bm = bm.transpose();
    }
    if cm.ncols() != n && cm.nrows() == n && cm.ncols() == 1 {
        cm = cm.transpose();
    }
    if bm.nrows() != n {
        return Err(BenchError::Config(format!(
            "B has {} rows, A has order {n}",
            bm.nrows()
        )));
    }
    if cm.ncols() != n {
        return Err(BenchError::Config(format!(
            "C has {} columns, A has order {n}",
            cm.ncols()
        )));
    }
    if column == 0 || column > bm.ncols() {
        return Err(BenchError::Config(format!(
            "`model.column` {column} outside 1..={}",
            bm.ncols()
        )));
    }
    if row == 0 || row > cm.nrows() {
        return Err(BenchError::Config(format!(
            "`model.row` {row} outside 1..={}",
            cm.nrows()
        )));
    }
    let dv = match d {
        Some(p) => {
            let dm = read_existing(p)?;
            if dm.len() == 1 {
                dm[(0, 0)]
            } else if dm.nrows() == cm.nrows() && dm.ncols() == bm.ncols() {
                dm[(row - 1, column - 1)]
            } else {
                return Err(BenchError::Config(format!(
                    "D is {}x{}, expected {}x{}",
                    dm.nrows(),
                    dm.ncols(),
                    cm.nrows(),
                    bm.ncols()
                )));
            }
        }
        None => 0.0,
    };
    let b = bm.column(column - 1).into_owned();
    let c = cm.row(row - 1).transpose();
    Ok(StateSpaceModel::new(a, b, c, dv)?)
}

pub fn beam_input(t: f64) -> f64 {
    let s = (2.7 * t).sin();
    4.0 * s * s * s + (0.2 * t).exp()
}

pub fn cdplayer_input(t: f64) -> f64 {
    let ramp = if t <= PI { t } else { PI - t };
    ramp - 8.0 * (-t / 2.0).exp()
}

pub fn sample_input(spec: &InputSpec, grid: TimeGrid) -> Result<SampledSignal> {
    Ok(match spec {
        InputSpec::Beam => SampledSignal::from_fn(grid, beam_input),
        InputSpec::CdPlayer => SampledSignal::from_fn(grid, cdplayer_input),
        InputSpec::Fourier(l) => {
            let k = (l.len() - 1) / 2;
            let w = 2.0 * PI / grid.t_final();
            SampledSignal::from_fn(grid, |t| {
                l[0] + (1..=k)
                    .map(|j| l[j] * (w * j as f64 * t).cos() + l[k + j] * (w * j as f64 * t).sin())
                    .sum::<f64>()
            })
        }
        InputSpec::Csv(path) => csv_input(path, grid)?,
    })
}

fn csv_input(path: &Path, grid: TimeGrid) -> Result<SampledSignal> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => BenchError::io(path, io),
            other => BenchError::parse(path, 0, format!("{other:?}")),
        })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let vals: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match vals {
            Ok(v) if !v.is_empty() => rows.push(v),
            // A leading header row.
            Err(_) if i == 0 => {}
            _ => return Err(BenchError::parse(path, i + 1, "expected numeric fields")),
        }
    }
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(BenchError::parse(
            path,
            0,
            "rows have differing field counts",
        ));
    }
    match width {
        1 => {
            let vals: Vec<f64> = rows.into_iter().map(|r| r[0]).collect();
            Ok(SampledSignal::new(grid, vals).map_err(|_| {
                BenchError::parse(
                    path,
                    0,
                    format!("single-column input must have {} samples", grid.len()),
                )
            })?)
        }
        2 => {
            let (t, u): (Vec<f64>, Vec<f64>) = rows.into_iter().map(|r| (r[0], r[1])).unzip();
            if t.windows(2).any(|w| w[1] <= w[0]) {
                return Err(BenchError::parse(
                    path,
                    0,
                    "time column must be strictly increasing",
                ));
            }
            let tol = 1e-9 * grid.t_final();
            if t[0] > tol || t[t.len() - 1] < grid.t_final() - tol {
                return Err(BenchError::parse(path, 0, "samples must cover [0, T]"));
            }
            Ok(SampledSignal::from_fn(grid, |s| interpolate(&t, &u, s)))
        }
        _ => Err(BenchError::parse(
            path,
            0,
            "expected one column of samples or `t,u` pairs",
        )),
    }
}

fn interpolate(t: &[f64], u: &[f64], s: f64) -> f64 {
    let i = t.partition_point(|&x| x <= s);
    if i == 0 {
        return u[0];
    }
    if i == t.len() {
        return u[t.len() - 1];
    }
    let th = (s - t[i - 1]) / (t[i] - t[i - 1]);
    u[i - 1] + th * (u[i] - u[i - 1])
}
