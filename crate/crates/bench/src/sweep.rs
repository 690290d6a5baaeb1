//! n-sweeps and K-sweeps with a rigor audit of every row.

use std::ops::RangeInclusive;

use balbound::bounds::{offline_precompute, refined_output, rom_error, BoundReport, OfflineBound};
use balbound::reduction::{balance, gramians, reduce, BalancedRealization, GramianPair};
use balbound::{Error, Method, ReducedModel, SampledSignal, StateSpaceModel};
use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{BenchError, Result};
use crate::scenario::Scenario;

/// Absolute slack of the rigor audit.
pub const RIGOR_SLACK: f64 = 1e-6;

/// Everything input-independent about the full model.
pub struct Prepared {
    pub fom: StateSpaceModel,
    pub gram: GramianPair,
    pub bal: BalancedRealization,
    pub u: SampledSignal,
    pub x0: DVector<f64>,
}

impl Prepared {
    pub fn new(sc: &Scenario) -> Result<Self> {
        let fom = sc.load_model()?;
        if !fom.is_stable() {
            return Err(Error::NotHurwitz {
                abscissa: fom.spectral_abscissa(),
            }
            .into());
        }
        let gram = gramians(&fom)?;
        let bal = balance(&fom, &gram)?;
        let u = sc.sample_input()?;
        let x0 = sc.initial_state(fom.order())?;
        Ok(Self {
            fom,
            gram,
            bal,
            u,
            x0,
        })
    }

    pub fn reduce(&self, n: usize, method: Method) -> Result<ReducedModel> {
        Ok(reduce(&self.bal, n, method)?)
    }

    pub fn offline(&self, rom: &ReducedModel, k_max: usize) -> Result<OfflineBound> {
        Ok(offline_precompute(
            &self.fom,
            rom,
            &self.gram,
            k_max,
            self.u.grid().t_final(),
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    HsvGap,
    RankDeficient,
    UnstableRom,
    Failed,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::HsvGap => "hsv_gap",
            Self::RankDeficient => "rank_deficient",
            Self::UnstableRom => "unstable_rom",
            Self::Failed => "failed",
        }
    }

    fn from_error(e: &BenchError) -> Self {
        match e {
            BenchError::Core(Error::HsvGap { .. }) => Self::HsvGap,
            BenchError::Core(Error::RankDeficient { .. }) => Self::RankDeficient,
            BenchError::Core(Error::UnstableReducedModel { .. }) => Self::UnstableRom,
            _ => Self::Failed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NRow {
    pub n: usize,
    pub method: Method,
    pub status: RowStatus,
    /// `σ_{n+1}`
    pub hsv_next: f64,
    pub alpha: f64,
    pub report: Option<BoundReport>,
}

impl NRow {
    pub fn is_rigorous(&self) -> bool {
        self.report
            .as_ref()
            .is_none_or(|r| r.is_rigorous(RIGOR_SLACK))
    }
}

#[derive(Debug, Clone)]
pub struct NSweep {
    pub k: usize,
    pub hsv: Vec<f64>,
    pub norm_u: f64,
    pub rows: Vec<NRow>,
}

pub fn run_n_sweep(sc: &Scenario) -> Result<NSweep> {
    let prep = Prepared::new(sc)?;
    let orders = sc.orders()?;
    n_sweep(&prep, sc, orders, &sc.methods, sc.k)
}

/// Sweep over reduced orders for each method. The full-model Gramians, the
/// full-model output and its Schur form are computed once in `prep`.
pub fn n_sweep(
    prep: &Prepared,
    sc: &Scenario,
    orders: RangeInclusive<usize>,
    methods: &[Method],
    k: usize,
) -> Result<NSweep> {
    let y_fom = refined_output(&prep.fom, &prep.u, &prep.x0)?;
    let jobs: Vec<(usize, Method)> = methods
        .iter()
        .flat_map(|&m| orders.clone().map(move |n| (n, m)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(n, method)| {
            let hsv_next = prep.bal.hsv.get(n).copied().unwrap_or(0.0);
            let alpha = prep.bal.apriori_constant(n);
            let eval = || -> Result<BoundReport> {
                let rom = prep.reduce(n, method)?;
                let x0r = sc.rom_initial_state(&rom, &prep.x0);
                let report = prep
                    .offline(&rom, k)?
                    .evaluate(&prep.u, &prep.x0, &x0r, k)?;
                let err = rom_error(&y_fom, &rom.model, &prep.u, &x0r)?;
                Ok(report.with_actual_error(err))
            };
            let (status, report) = match eval() {
                Ok(r) => (RowStatus::Ok, Some(r)),
                Err(e @ BenchError::Core(Error::InvalidOrder { .. })) => return Err(e),
                Err(e) => (RowStatus::from_error(&e), None),
            };
            Ok(NRow {
                n,
                method,
                status,
                hsv_next,
                alpha,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NSweep {
        k,
        hsv: prep.bal.hsv.clone(),
        norm_u: prep.u.l2_norm(),
        rows,
    })
}

#[derive(Debug, Clone)]
pub struct KSweep {
    pub n: usize,
    pub method: Method,
    pub alpha: f64,
    pub measured_error: f64,
    pub rows: Vec<BoundReport>,
}

impl KSweep {
    pub fn is_rigorous(&self) -> bool {
        self.rows.iter().all(|r| r.is_rigorous(RIGOR_SLACK))
    }
}

pub fn run_k_sweep(sc: &Scenario) -> Result<KSweep> {
    let prep = Prepared::new(sc)?;
    k_sweep(&prep, sc, sc.order()?, sc.methods[0], sc.k_range.clone())
}

/// Sweep over Fourier orders; the offline data is computed once at the
/// largest order and shared by all rows.
pub fn k_sweep(
    prep: &Prepared,
    sc: &Scenario,
    n: usize,
    method: Method,
    orders: RangeInclusive<usize>,
) -> Result<KSweep> {
    let rom = prep.reduce(n, method)?;
    let x0r = sc.rom_initial_state(&rom, &prep.x0);
    let off = prep.offline(&rom, *orders.end())?;
    let y_fom = refined_output(&prep.fom, &prep.u, &prep.x0)?;
    let err = rom_error(&y_fom, &rom.model, &prep.u, &x0r)?;
    let ks: Vec<usize> = orders.collect();
    let rows = ks
        .par_iter()
        .map(|&k| {
            Ok(off
                .evaluate(&prep.u, &prep.x0, &x0r, k)?
                .with_actual_error(err))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KSweep {
        n,
        method,
        alpha: rom.alpha,
        measured_error: err,
        rows,
    })
}

/// Describe rows violating `measured ≤ γ + slack`.
pub fn rigor_violations<'a>(
    rows: impl IntoIterator<Item = (String, &'a BoundReport)>,
) -> Vec<String> {
    rows.into_iter()
        .filter(|(_, r)| !r.is_rigorous(RIGOR_SLACK))
        .map(|(label, r)| {
            format!(
                "{label}: measured error {:.6e} exceeds gamma {:.6e} (steady {:.3e}, transient {:.3e}, rest {:.3e})",
                r.actual_error.unwrap_or(f64::NAN),
                r.gamma,
                r.term_steady,
                r.term_transient,
                r.term_rest
            )
        })
        .collect()
}

impl NSweep {
    pub fn violations(&self) -> Vec<String> {
        rigor_violations(self.rows.iter().filter_map(|r| {
            r.report
                .as_ref()
                .map(|rep| (format!("{} n={}", r.method, r.n), rep))
        }))
    }
}

impl KSweep {
    pub fn violations(&self) -> Vec<String> {
        rigor_violations(
            self.rows
                .iter()
                .map(|r| (format!("{} n={} K={}", self.method, self.n, r.k), r)),
        )
    }
}
