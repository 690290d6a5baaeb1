//! Command-line interface.

use std::io::Write;
use std::path::PathBuf;

use balbound::bounds::measured_error;
use clap::{Args, Parser, Subcommand};

use crate::config::{parse_range, Config};
use crate::error::{BenchError, Result};
use crate::report::{
    float, write_bound, write_hsv, write_k_sweep, write_model, write_n_sweep, write_rom,
};
use crate::scenario::{ModelSource, Scenario};
use crate::sweep::{run_k_sweep, run_n_sweep, Prepared};
use crate::synth::synthesize_model;

#[derive(Debug, Parser)]
#[command(
    name = "balbound",
    version,
    about = "Balanced-truncation reduction with a posteriori L2 error bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce a model and write the reduced matrices and Hankel singular values.
    Reduce(Common),
    /// Evaluate the a posteriori bound for one reduced model and input.
    Bound(Common),
    /// Sweep the reduced order (`n_range`) for each method.
    SweepN(Common),
    /// Sweep the Fourier order (`k_range`) for one reduced model.
    SweepK(Common),
    /// Write a synthetic model (`synth.*` keys; `--n` sets its order).
    Synth(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file with `key = value` lines.
    #[arg(long)]
    pub config: PathBuf,
    /// Reduced order, or an inclusive range such as `2..30`.
    #[arg(long)]
    pub n: Option<String>,
    /// Fourier order, or an inclusive range such as `0..15`.
    #[arg(long)]
    pub k: Option<String>,
    /// `bt`, `spa` or `both`.
    #[arg(long)]
    pub method: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    fn config(&self, synth: bool) -> Result<Config> {
        let mut cfg = Config::load(&self.config)?;
        if let Some(n) = &self.n {
            let r = parse_range(n).map_err(|e| BenchError::Config(format!("--n: {e}")))?;
            if synth {
                cfg.set("synth.n", r.start().to_string());
            } else {
                cfg.set("n", r.start().to_string());
                cfg.set("n_range", format!("{}..{}", r.start(), r.end()));
            }
        }
        if let Some(k) = &self.k {
            let r = parse_range(k).map_err(|e| BenchError::Config(format!("--k: {e}")))?;
            if r.start() == r.end() {
                cfg.set("k", r.start().to_string());
                cfg.set("k_range", format!("0..{}", r.end()));
            } else {
                cfg.set("k", r.end().to_string());
                cfg.set("k_range", format!("{}..{}", r.start(), r.end()));
            }
        }
        if let Some(m) = &self.method {
            cfg.set("method", m.clone());
        }
        if let Some(out) = &self.out {
            let abs = std::env::current_dir()
                .map_err(|e| BenchError::io(".", e))?
                .join(out);
            cfg.set("out_dir", abs.to_string_lossy().into_owned());
        }
        Ok(cfg)
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Reduce(c) => reduce(&c.config(false)?.scenario()?, out),
        Command::Bound(c) => bound(&c.config(false)?.scenario()?, out),
        Command::SweepN(c) => sweep_n(&c.config(false)?.scenario()?, out),
        Command::SweepK(c) => sweep_k(&c.config(false)?.scenario()?, out),
        Command::Synth(c) => synth(&c.config(true)?.scenario()?, out),
    }
}

fn say(out: &mut dyn Write, line: String) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| BenchError::io("<stdout>", e))
}

fn reduce(sc: &Scenario, out: &mut dyn Write) -> Result<()> {
    let prep = Prepared::new(sc)?;
    let n = sc.order()?;
    say(
        out,
        format!(
            "full order {}, numerical rank {}",
            prep.fom.order(),
            prep.bal.rank()
        ),
    )?;
    say(
        out,
        format!("wrote {}", write_hsv(sc, &prep.bal.hsv)?.display()),
    )?;
    for &method in &sc.methods {
        let rom = prep.reduce(n, method)?;
        say(
            out,
            format!(
                "{method} n={n}: alpha {} spectral abscissa {}",
                float(rom.alpha),
                float(rom.model.spectral_abscissa())
            ),
        )?;
        for p in write_rom(sc, &rom)? {
            say(out, format!("wrote {}", p.display()))?;
        }
    }
    Ok(())
}

fn bound(sc: &Scenario, out: &mut dyn Write) -> Result<()> {
    let prep = Prepared::new(sc)?;
    let n = sc.order()?;
    let method = sc.methods[0];
    let rom = prep.reduce(n, method)?;
    let x0r = sc.rom_initial_state(&rom, &prep.x0);
    let report = prep
        .offline(&rom, sc.k)?
        .evaluate(&prep.u, &prep.x0, &x0r, sc.k)?;
    let err = measured_error(&prep.fom, &rom.model, &prep.u, &prep.x0, &x0r)?;
    let report = report.with_actual_error(err);
    let path = write_bound(sc, n, method, rom.alpha, &report)?;
    say(
        out,
        format!(
            "{method} n={n} K={}: gamma {} (steady {}, transient {}, rest {}), apriori {}, measured {}",
            sc.k,
            float(report.gamma),
            float(report.term_steady),
            float(report.term_transient),
            float(report.term_rest),
            float(report.apriori),
            float(err)
        ),
    )?;
    say(out, format!("wrote {}", path.display()))?;
    let v = crate::sweep::rigor_violations([(format!("{method} n={n} K={}", sc.k), &report)]);
    if v.is_empty() {
        Ok(())
    } else {
        Err(BenchError::Rigor(v.join("; ")))
    }
}

fn sweep_n(sc: &Scenario, out: &mut dyn Write) -> Result<()> {
    let sweep = run_n_sweep(sc)?;
    for p in write_n_sweep(sc, &sweep)? {
        say(out, format!("wrote {}", p.display()))?;
    }
    let v = sweep.violations();
    if v.is_empty() {
        say(out, "rigor audit passed".into())
    } else {
        Err(BenchError::Rigor(v.join("; ")))
    }
}

fn sweep_k(sc: &Scenario, out: &mut dyn Write) -> Result<()> {
    let sweep = run_k_sweep(sc)?;
    for p in write_k_sweep(sc, &sweep)? {
        say(out, format!("wrote {}", p.display()))?;
    }
    let v = sweep.violations();
    if v.is_empty() {
        say(out, "rigor audit passed".into())
    } else {
        Err(BenchError::Rigor(v.join("; ")))
    }
}

fn synth(sc: &Scenario, out: &mut dyn Write) -> Result<()> {
    let ModelSource::Synthetic(spec) = &sc.model else {
        return Err(BenchError::Config(
            "`synth` needs `synth.n` (or --n) instead of model files".into(),
        ));
    };
    let model = synthesize_model(spec)?;
    say(
        out,
        format!(
            "order {} spectral abscissa {}",
            model.order(),
            float(model.spectral_abscissa())
        ),
    )?;
    for p in write_model(&sc.out_dir, &sc.name, &model)? {
        say(out, format!("wrote {}", p.display()))?;
    }
    Ok(())
}
