//! Flat `key = value` scenario files. Blank lines and `#` comments are
//! ignored; relative paths resolve against the file's directory.
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `name` | stem of output file names | `model` |
//! | `model.a`, `model.b`, `model.c`, `model.d` | matrix files (`model.d` optional) | |
//! | `model.column`, `model.row` | 1-based input column of B / output row of C | `1` |
//! | `synth.n`, `synth.re_min`, `synth.re_max`, `synth.im_max`, `synth.complex_fraction` | synthetic model instead of files | `-, -5, -0.1, 5, 0.5` |
//! | `method` | `bt`, `spa` or `both` | `both` |
//! | `n`, `n_range` | reduced order / inclusive range `a..b` | |
//! | `k`, `k_range` | Fourier order / inclusive range | `10`, `0..k` |
//! | `T` | final time, numbers or multiples of `pi` | `2pi` |
//! | `grid_m` | grid points | `2000` |
//! | `input.kind`, `input.params` | `beam`, `cdplayer`, `csv <path>`, `fourier <λ0,λ1,…>` | `beam` |
//! | `x0.kind`, `x0.scale`, `x0.params` | `zero`, `ones`, `file <path>` | `zero`, `1` |
//! | `x0hat.kind` | `zero` or `project` (balanced projection of x0) | `zero` |
//! | `out_dir` | output directory | `.` |
//! | `seed` | RNG seed for synthetic models | `0` |

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use balbound::Method;

use crate::error::{BenchError, Result};
use crate::scenario::{InputSpec, ModelSource, RomStateSpec, Scenario, StateSpec};
use crate::synth::SyntheticSpec;

#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
    base: PathBuf,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, path, base)
    }

    pub fn parse(text: &str, origin: &Path, base: PathBuf) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| BenchError::parse(origin, ln + 1, "expected `key = value`"))?;
            let key = k.trim();
            if key.is_empty() {
                return Err(BenchError::parse(origin, ln + 1, "empty key"));
            }
            if entries
                .insert(key.to_string(), v.trim().to_string())
                .is_some()
            {
                return Err(BenchError::parse(
                    origin,
                    ln + 1,
                    format!("duplicate key `{key}`"),
                ));
            }
        }
        Ok(Self { entries, base })
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(|p| self.resolve(p))
    }

    fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| BenchError::Config(format!("invalid value for `{key}`: `{v}`")))
            })
            .transpose()
    }

    fn range(&self, key: &str) -> Result<Option<RangeInclusive<usize>>> {
        self.get(key)
            .map(|v| parse_range(v).map_err(|m| BenchError::Config(format!("`{key}`: {m}"))))
            .transpose()
    }

    /// Build a scenario, applying documented defaults.
    pub fn scenario(&self) -> Result<Scenario> {
        let known = [
            "name",
            "model.a",
            "model.b",
            "model.c",
            "model.d",
            "model.column",
            "model.row",
            "synth.n",
            "synth.re_min",
            "synth.re_max",
            "synth.im_max",
            "synth.complex_fraction",
            "method",
            "n",
            "n_range",
            "k",
            "k_range",
            "T",
            "grid_m",
            "input.kind",
            "input.params",
            "x0.kind",
            "x0.scale",
            "x0.params",
            "x0hat.kind",
            "out_dir",
            "seed",
        ];
        if let Some(k) = self.entries.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(BenchError::Config(format!("unknown key `{k}`")));
        }

        let seed = self.parsed::<u64>("seed")?.unwrap_or(0);
        let model = match (self.path("model.a"), self.parsed::<usize>("synth.n")?) {
            (Some(a), None) => ModelSource::Files {
                a,
                b: self
                    .path("model.b")
                    .ok_or_else(|| BenchError::Config("`model.b` is required".into()))?,
                c: self
                    .path("model.c")
                    .ok_or_else(|| BenchError::Config("`model.c` is required".into()))?,
                d: self.path("model.d"),
                column: self.parsed("model.column")?.unwrap_or(1),
                row: self.parsed("model.row")?.unwrap_or(1),
            },
            (None, Some(n)) => ModelSource::Synthetic(SyntheticSpec {
                n,
                seed,
                re_min: self.parsed("synth.re_min")?.unwrap_or(-5.0),
                re_max: self.parsed("synth.re_max")?.unwrap_or(-0.1),
                im_max: self.parsed("synth.im_max")?.unwrap_or(5.0),
                complex_fraction: self.parsed("synth.complex_fraction")?.unwrap_or(0.5),
            }),
            (Some(_), Some(_)) => {
                return Err(BenchError::Config(
                    "give either `model.a` or `synth.n`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(BenchError::Config(
                    "no model: set `model.a`/`model.b`/`model.c` or `synth.n`".into(),
                ))
            }
        };

        let methods = match self.get("method").map(str::to_ascii_lowercase).as_deref() {
            None | Some("both") | Some("bt,spa") => {
                vec![Method::BalancedTruncation, Method::SingularPerturbation]
            }
            Some(m) => vec![m
                .parse::<Method>()
                .map_err(|e| BenchError::Config(format!("`method`: {e}")))?],
        };

        let n_single = self.parsed::<usize>("n")?;
        let n_range = self.range("n_range")?.or(n_single.map(|n| n..=n));
        let k = self.parsed::<usize>("k")?.unwrap_or(10);
        let k_range = self.range("k_range")?.unwrap_or(0..=k);

        let t_final = match self.get("T") {
            Some(v) => parse_time(v)
                .ok_or_else(|| BenchError::Config(format!("invalid value for `T`: `{v}`")))?,
            None => 2.0 * PI,
        };
        let grid_m = self
            .parsed::<usize>("grid_m")?
            .unwrap_or(balbound::TimeGrid::DEFAULT_POINTS);

        let input = self.input()?;
        let x0 = self.state()?;
        let x0hat = match self.get("x0hat.kind").unwrap_or("zero") {
            "zero" => RomStateSpec::Zero,
            "project" => RomStateSpec::Project,
            other => {
                return Err(BenchError::Config(format!(
                    "unknown `x0hat.kind` `{other}`"
                )))
            }
        };

        let scenario = Scenario {
            name: self.get("name").unwrap_or("model").to_string(),
            model,
            methods,
            n: n_single.or(n_range.as_ref().map(|r| *r.start())),
            n_range,
            k,
            k_range,
            t_final,
            grid_m,
            input,
            x0,
            x0hat,
            out_dir: self.path("out_dir").unwrap_or_else(|| self.resolve(".")),
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn input(&self) -> Result<InputSpec> {
        let params = self.get("input.params");
        Ok(match self.get("input.kind").unwrap_or("beam") {
            "beam" => InputSpec::Beam,
            "cdplayer" => InputSpec::CdPlayer,
            "csv" => {
                InputSpec::Csv(params.map(|p| self.resolve(p)).ok_or_else(|| {
                    BenchError::Config("`input.params` must name a CSV file".into())
                })?)
            }
            "fourier" => {
                let p = params.ok_or_else(|| {
                    BenchError::Config("`input.params` must list Fourier coefficients".into())
                })?;
                let coeffs = p
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| {
                        BenchError::Config(format!("invalid Fourier coefficients `{p}`"))
                    })?;
                if coeffs.len() % 2 == 0 {
                    return Err(BenchError::Config(
                        "Fourier coefficients must be λ0 followed by K cosine and K sine terms"
                            .into(),
                    ));
                }
                InputSpec::Fourier(coeffs)
            }
            other => {
                return Err(BenchError::Config(format!(
                    "unknown `input.kind` `{other}`"
                )))
            }
        })
    }

    fn state(&self) -> Result<StateSpec> {
        let scale = self.parsed::<f64>("x0.scale")?.unwrap_or(1.0);
        Ok(match self.get("x0.kind").unwrap_or("zero") {
            "zero" => StateSpec::Zero,
            "ones" => StateSpec::Ones(scale),
            "file" => StateSpec::File(
                self.path("x0.params").ok_or_else(|| {
                    BenchError::Config("`x0.params` must name a vector file".into())
                })?,
                scale,
            ),
            other => return Err(BenchError::Config(format!("unknown `x0.kind` `{other}`"))),
        })
    }
}

/// `a..b`, `a..=b`, `a:b`, `a-b` (all inclusive) or a single value.
pub fn parse_range(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let s = s.trim();
    let parts = ["..=", "..", ":", "-"]
        .iter()
        .find_map(|sep| s.split_once(sep));
    let (lo, hi) = match parts {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, s),
    };
    let lo: usize = lo.parse().map_err(|_| format!("invalid range `{s}`"))?;
    let hi: usize = hi.parse().map_err(|_| format!("invalid range `{s}`"))?;
    if lo > hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok(lo..=hi)
}

/// A number, optionally multiplied by `pi` (`2pi`, `2*pi`, `pi`, `0.5 pi`).
pub fn parse_time(s: &str) -> Option<f64> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    let v = match t.strip_suffix("pi") {
        Some("") => PI,
        Some(f) => f.trim_end_matches('*').parse::<f64>().ok()? * PI,
        None => t.parse().ok()?,
    };
    (v.is_finite() && v > 0.0).then_some(v)
}
