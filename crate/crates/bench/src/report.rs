//! CSV tables and plain-text summaries. Floats carry 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use balbound::bounds::BoundReport;
use balbound::{Method, ReducedModel};
use nalgebra::DMatrix;

use crate::error::{BenchError, Result};
use crate::mm::write_matrix;
use crate::scenario::Scenario;
use crate::sweep::{KSweep, NSweep};

pub const N_SWEEP_COLUMNS: [&str; 12] = [
    "n",
    "status",
    "hsv_next",
    "alpha",
    "apriori",
    "term_steady",
    "term_transient",
    "term_rest",
    "gamma",
    "measured_error",
    "gamma_over_error",
    "rigorous",
];

pub const K_SWEEP_COLUMNS: [&str; 11] = [
    "k",
    "remainder_rel",
    "term_steady",
    "term_transient",
    "term_rest",
    "gamma",
    "apriori",
    "measured_error",
    "gamma_over_error",
    "apriori_over_error",
    "rigorous",
];

pub const BOUND_COLUMNS: [&str; 14] = [
    "n",
    "method",
    "k",
    "norm_u",
    "remainder_rel",
    "alpha",
    "term_steady",
    "term_transient",
    "term_rest",
    "gamma",
    "delta_x0",
    "apriori",
    "measured_error",
    "rigorous",
];

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn ratio(a: f64, b: Option<f64>) -> String {
    float(b.map_or(f64::NAN, |b| a / b))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let f = fs::File::create(path).map_err(|e| BenchError::io(path, e))?;
    Ok(csv::Writer::from_writer(f))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))
}

pub fn n_sweep_path(sc: &Scenario, method: Method) -> PathBuf {
    sc.out_dir
        .join(format!("{}_{}.csv", sc.name, method.short_name()))
}

pub fn write_n_sweep(sc: &Scenario, sweep: &NSweep) -> Result<Vec<PathBuf>> {
    ensure_dir(&sc.out_dir)?;
    let mut written = Vec::new();
    for &method in &sc.methods {
        let path = n_sweep_path(sc, method);
        let mut w = csv_writer(&path)?;
        w.write_record(N_SWEEP_COLUMNS)?;
        for row in sweep.rows.iter().filter(|r| r.method == method) {
            let mut rec = vec![
                row.n.to_string(),
                row.status.as_str().to_string(),
                float(row.hsv_next),
                float(row.alpha),
            ];
            match &row.report {
                Some(r) => rec.extend([
                    float(r.apriori),
                    float(r.term_steady),
                    float(r.term_transient),
                    float(r.term_rest),
                    float(r.gamma),
                    float(r.actual_error.unwrap_or(f64::NAN)),
                    ratio(r.gamma, r.actual_error),
                    row.is_rigorous().to_string(),
                ]),
                None => {
                    rec.push(float(row.alpha * sweep.norm_u));
                    rec.extend(std::iter::repeat_n(float(f64::NAN), 6));
                    rec.push(String::new());
                }
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| BenchError::io(&path, e))?;
        written.push(path);
    }
    let summary = sc.out_dir.join(format!("{}_n_summary.txt", sc.name));
    fs::write(&summary, n_summary(sc, sweep)).map_err(|e| BenchError::io(&summary, e))?;
    written.push(summary);
    Ok(written)
}

fn settings(sc: &Scenario) -> String {
    let mut s = String::new();
    writeln!(s, "scenario: {}", sc.name).unwrap();
    writeln!(s, "model: {:?}", sc.model).unwrap();
    writeln!(s, "input: {:?}", sc.input).unwrap();
    writeln!(s, "x0: {:?}, x0hat: {:?}", sc.x0, sc.x0hat).unwrap();
    writeln!(s, "T: {}", float(sc.t_final)).unwrap();
    writeln!(s, "grid points: {}", sc.grid_m).unwrap();
    s
}

pub fn n_summary(sc: &Scenario, sweep: &NSweep) -> String {
    let mut s = settings(sc);
    writeln!(s, "K: {}", sweep.k).unwrap();
    writeln!(s, "norm_u: {}", float(sweep.norm_u)).unwrap();
    for &method in &sc.methods {
        let rows: Vec<_> = sweep.rows.iter().filter(|r| r.method == method).collect();
        let ok: Vec<&BoundReport> = rows.iter().filter_map(|r| r.report.as_ref()).collect();
        let max_ratio = ok
            .iter()
            .filter_map(|r| r.actual_error.map(|e| r.gamma / e))
            .fold(f64::NAN, f64::max);
        let improves = ok.iter().filter(|r| r.gamma < r.apriori).count();
        writeln!(
            s,
            "{method}: {} rows, {} evaluated, {} skipped, gamma < apriori in {improves}, max gamma/error {}",
            rows.len(),
            ok.len(),
            rows.len() - ok.len(),
            float(max_ratio)
        )
        .unwrap();
    }
    let v = sweep.violations();
    writeln!(
        s,
        "rigor: {}",
        if v.is_empty() {
            "pass".to_string()
        } else {
            format!("FAIL ({} rows)", v.len())
        }
    )
    .unwrap();
    for line in v {
        writeln!(s, "  {line}").unwrap();
    }
    s
}

pub fn k_sweep_path(sc: &Scenario) -> PathBuf {
    sc.out_dir.join(format!("{}_k.csv", sc.name))
}

pub fn write_k_sweep(sc: &Scenario, sweep: &KSweep) -> Result<Vec<PathBuf>> {
    ensure_dir(&sc.out_dir)?;
    let path = k_sweep_path(sc);
    let mut w = csv_writer(&path)?;
    w.write_record(K_SWEEP_COLUMNS)?;
    for r in &sweep.rows {
        w.write_record([
            r.k.to_string(),
            float(r.remainder_rel),
            float(r.term_steady),
            float(r.term_transient),
            float(r.term_rest),
            float(r.gamma),
            float(r.apriori),
            float(r.actual_error.unwrap_or(f64::NAN)),
            ratio(r.gamma, r.actual_error),
            ratio(r.apriori, r.actual_error),
            r.is_rigorous(crate::sweep::RIGOR_SLACK).to_string(),
        ])?;
    }
    w.flush().map_err(|e| BenchError::io(&path, e))?;
    let summary = sc.out_dir.join(format!("{}_k_summary.txt", sc.name));
    fs::write(&summary, k_summary(sc, sweep)).map_err(|e| BenchError::io(&summary, e))?;
    Ok(vec![path, summary])
}

pub fn k_summary(sc: &Scenario, sweep: &KSweep) -> String {
    let mut s = settings(sc);
    writeln!(
        s,
        "method: {}, n: {}, alpha: {}",
        sweep.method,
        sweep.n,
        float(sweep.alpha)
    )
    .unwrap();
    writeln!(s, "measured error: {}", float(sweep.measured_error)).unwrap();
    let max_ratio = sweep
        .rows
        .iter()
        .map(|r| r.gamma / sweep.measured_error)
        .fold(f64::NAN, f64::max);
    writeln!(s, "max gamma/error: {}", float(max_ratio)).unwrap();
    let v = sweep.violations();
    writeln!(
        s,
        "rigor: {}",
        if v.is_empty() {
            "pass".to_string()
        } else {
            format!("FAIL ({} rows)", v.len())
        }
    )
    .unwrap();
    for line in v {
        writeln!(s, "  {line}").unwrap();
    }
    s
}

pub fn write_bound(
    sc: &Scenario,
    n: usize,
    method: Method,
    alpha: f64,
    r: &BoundReport,
) -> Result<PathBuf> {
    ensure_dir(&sc.out_dir)?;
    let path = sc.out_dir.join(format!("{}_bound.csv", sc.name));
    let mut w = csv_writer(&path)?;
    w.write_record(BOUND_COLUMNS)?;
    w.write_record([
        n.to_string(),
        method.short_name().to_string(),
        r.k.to_string(),
        float(r.norm_u),
        float(r.remainder_rel),
        float(alpha),
        float(r.term_steady),
        float(r.term_transient),
        float(r.term_rest),
        float(r.gamma),
        float(r.delta_x0),
        float(r.apriori),
        float(r.actual_error.unwrap_or(f64::NAN)),
        r.is_rigorous(crate::sweep::RIGOR_SLACK).to_string(),
    ])?;
    w.flush().map_err(|e| BenchError::io(&path, e))?;
    Ok(path)
}

pub fn write_hsv(sc: &Scenario, hsv: &[f64]) -> Result<PathBuf> {
    ensure_dir(&sc.out_dir)?;
    let path = sc.out_dir.join(format!("{}_hsv.csv", sc.name));
    let mut w = csv_writer(&path)?;
    w.write_record(["j", "sigma"])?;
    for (j, s) in hsv.iter().enumerate() {
        w.write_record([(j + 1).to_string(), float(*s)])?;
    }
    w.flush().map_err(|e| BenchError::io(&path, e))?;
    Ok(path)
}

/// Write `A`, `b`, `c`, `d` of a model as `<prefix>_{a,b,c,d}.mtx`.
pub fn write_model(
    dir: &Path,
    prefix: &str,
    model: &balbound::StateSpaceModel,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let n = model.order();
    let parts: [(&str, DMatrix<f64>); 4] = [
        ("a", model.a().clone()),
        ("b", DMatrix::from_column_slice(n, 1, model.b().as_slice())),
        ("c", DMatrix::from_row_slice(1, n, model.c().as_slice())),
        ("d", DMatrix::from_element(1, 1, model.d())),
    ];
    parts
        .iter()
        .map(|(tag, m)| {
            let p = dir.join(format!("{prefix}_{tag}.mtx"));
            write_matrix(&p, m).map(|_| p)
        })
        .collect()
}

pub fn write_rom(sc: &Scenario, rom: &ReducedModel) -> Result<Vec<PathBuf>> {
    let prefix = format!("{}_{}_n{}", sc.name, rom.method.short_name(), rom.order());
    write_model(&sc.out_dir, &prefix, &rom.model)
}
