//! SISO state-space models, uniform time grids, sampled signals and an
//! exponential integrator that is exact for piecewise-linear inputs.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{expm, schur};

/// `x' = A x + b u`, `y = c x + d u`, `x(0) = x0`.
#[derive(Debug, Clone)]
pub struct StateSpaceModel {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
    d: f64,
    x0: DVector<f64>,
    abscissa: f64,
}

impl StateSpaceModel {
    /// Build a model with zero initial state. Unstable `A` is accepted and
    /// reported through [`is_stable`](Self::is_stable).
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>, d: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        let n = a.nrows();
        if n == 0 {
            return Err(Error::DimensionMismatch {
                what: "state dimension",
                expected: 1,
                found: 0,
            });
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                what: "input map b",
                expected: n,
                found: b.len(),
            });
        }
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                what: "output map c",
                expected: n,
                found: c.len(),
            });
        }
        if a.iter()
            .chain(b.iter())
            .chain(c.iter())
            .any(|v| !v.is_finite())
            || !d.is_finite()
        {
            return Err(Error::NonFinite("state-space matrices"));
        }
        let abscissa = schur(&a)?.spectral_abscissa();
        Ok(Self {
            a,
            b,
            c,
            d,
            x0: DVector::zeros(n),
            abscissa,
        })
    }

    /// Assemble a model whose spectral abscissa is already known.
    pub(crate) fn from_parts(
        a: DMatrix<f64>,
        b: DVector<f64>,
        c: DVector<f64>,
        d: f64,
        abscissa: f64,
    ) -> Self {
        let n = a.nrows();
        Self {
            a,
            b,
            c,
            d,
            x0: DVector::zeros(n),
            abscissa,
        }
    }

    pub fn with_initial_state(mut self, x0: DVector<f64>) -> Result<Self> {
        if x0.len() != self.order() {
            return Err(Error::DimensionMismatch {
                what: "initial state",
                expected: self.order(),
                found: x0.len(),
            });
        }
        self.x0 = x0;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    /// Output map stored as a column vector; `y = cᵀ x + d u`.
    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn x0(&self) -> &DVector<f64> {
        &self.x0
    }

    /// Largest real part of the eigenvalues of `A`.
    pub fn spectral_abscissa(&self) -> f64 {
        self.abscissa
    }

    pub fn is_stable(&self) -> bool {
        self.abscissa < 0.0
    }

    pub(crate) fn require_stable(&self) -> Result<()> {
        if self.is_stable() {
            Ok(())
        } else {
            Err(Error::NotHurwitz {
                abscissa: self.abscissa,
            })
        }
    }

    /// Steady-state gain `d − c A⁻¹ b`.
    pub fn dc_gain(&self) -> Result<f64> {
        let sol = self
            .a
            .clone()
            .lu()
            .solve(&self.b)
            .ok_or(Error::Singular("state matrix A"))?;
        Ok(self.d - self.c.dot(&sol))
    }
}

/// Largest real part of the eigenvalues of a square matrix.
pub fn spectral_abscissa(a: &DMatrix<f64>) -> Result<f64> {
    Ok(schur(a)?.spectral_abscissa())
}

/// Uniform grid `t_k = k T / (m − 1)`, `k = 0..m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    m: usize,
}

impl TimeGrid {
    pub const DEFAULT_POINTS: usize = 2000;

    pub fn new(t_final: f64, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidGrid("at least two grid points are required"));
        }
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::InvalidGrid("final time must be finite and positive"));
        }
        Ok(Self { t_final, m })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.t_final / (self.m - 1) as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k + 1 == self.m {
            self.t_final
        } else {
            self.t_final * k as f64 / (self.m - 1) as f64
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(move |k| self.node(k))
    }

    /// The grid with every interval halved.
    pub fn refined(&self) -> Self {
        Self {
            t_final: self.t_final,
            m: 2 * self.m - 1,
        }
    }
}

/// Values of a scalar function on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl SampledSignal {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                what: "signal samples",
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: alloc::vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Node-wise `α·self + β·other`.
    pub fn combine(&self, alpha: f64, other: &SampledSignal, beta: f64) -> Result<SampledSignal> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn sub(&self, other: &SampledSignal) -> Result<SampledSignal> {
        self.combine(1.0, other, -1.0)
    }

    pub fn l2_norm(&self) -> f64 {
        l2_norm(self)
    }

    /// Piecewise-linear interpolant sampled on [`TimeGrid::refined`].
    pub fn refined(&self) -> SampledSignal {
        let mut values = Vec::with_capacity(2 * self.values.len() - 1);
        for w in self.values.windows(2) {
            values.push(w[0]);
            values.push(0.5 * (w[0] + w[1]));
        }
        values.push(self.values[self.values.len() - 1]);
        Self {
            grid: self.grid.refined(),
            values,
        }
    }

    fn check_same_grid(&self, other: &SampledSignal) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch {
                what: "signal grids",
                expected: self.grid.len(),
                found: other.grid.len(),
            });
        }
        Ok(())
    }
}

/// Composite trapezoidal rule for samples on a uniform grid.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            step * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// Composite Simpson rule on a uniform grid; an odd number of intervals
/// closes with the three-eighths rule.
pub fn simpson(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * step * (values[0] + values[1]),
        _ => {
            let intervals = n - 1;
            let tail = if intervals % 2 == 1 { 3 } else { 0 };
            let even_end = intervals - tail;
            let mut acc = 0.0;
            let mut i = 0;
            while i < even_end {
                acc += values[i] + 4.0 * values[i + 1] + values[i + 2];
                i += 2;
            }
            acc *= step / 3.0;
            if tail == 3 {
                let v = &values[even_end..];
                acc += 3.0 * step / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
            }
            acc
        }
    }
}

/// Simpson `L²(0, T)` norm of a sampled signal.
pub fn l2_norm_simpson(signal: &SampledSignal) -> f64 {
    let sq: Vec<f64> = signal.values.iter().map(|v| v * v).collect();
    libm::sqrt(simpson(&sq, signal.grid.step()).max(0.0))
}

/// Trapezoidal `L²(0, T)` norm of a sampled signal.
pub fn l2_norm(signal: &SampledSignal) -> f64 {
    let sq: Vec<f64> = signal.values.iter().map(|v| v * v).collect();
    libm::sqrt(trapezoid(&sq, signal.grid.step()).max(0.0))
}

/// Step matrices of the exponential integrator for one model and step size.
///
/// With `u` linear on `[t_k, t_k + h]`,
/// `x_{k+1} = e^{Ah} x_k + (G₁ − G₂) u_k + G₂ u_{k+1}` where `G₁ = h φ₁(Ah) b`
/// and `G₂ = h φ₂(Ah) b`, all read off one exponential of an augmented matrix.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: TimeGrid,
    transition: DMatrix<f64>,
    hold: DVector<f64>,
    ramp: DVector<f64>,
    c: DVector<f64>,
    d: f64,
}

impl Propagator {
    pub fn new(model: &StateSpaceModel, grid: &TimeGrid) -> Result<Self> {
        let n = model.order();
        let h = grid.step();
        let mut aug = DMatrix::<f64>::zeros(n + 2, n + 2);
        aug.view_mut((0, 0), (n, n)).copy_from(&(model.a() * h));
        aug.view_mut((0, n), (n, 1)).copy_from(&(model.b() * h));
        aug[(n, n + 1)] = 1.0;
        let e = expm(&aug)?;
        let transition = e.view((0, 0), (n, n)).into_owned();
        let g1 = e.view((0, n), (n, 1)).column(0).into_owned();
        let g2 = e.view((0, n + 1), (n, 1)).column(0).into_owned();
        Ok(Self {
            grid: *grid,
            transition,
            hold: g1 - &g2,
            ramp: g2,
            c: model.c().clone(),
            d: model.d(),
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Output samples and final state for `input` starting from `x0`.
    pub fn run(
        &self,
        input: &SampledSignal,
        x0: &DVector<f64>,
    ) -> Result<(SampledSignal, DVector<f64>)> {
        if *input.grid() != self.grid {
            return Err(Error::DimensionMismatch {
                what: "input grid",
                expected: self.grid.len(),
                found: input.grid().len(),
            });
        }
        let n = self.c.len();
        if x0.len() != n {
            return Err(Error::DimensionMismatch {
                what: "initial state",
                expected: n,
                found: x0.len(),
            });
        }
        let u = input.values();
        let mut x = x0.clone();
        let mut next = DVector::<f64>::zeros(n);
        let mut y = Vec::with_capacity(u.len());
        y.push(self.c.dot(&x) + self.d * u[0]);
        for k in 0..u.len() - 1 {
            next.gemv(1.0, &self.transition, &x, 0.0);
            next.axpy(u[k], &self.hold, 1.0);
            next.axpy(u[k + 1], &self.ramp, 1.0);
            core::mem::swap(&mut x, &mut next);
            y.push(self.c.dot(&x) + self.d * u[k + 1]);
        }
        Ok((SampledSignal::new(self.grid, y)?, x))
    }
}

/// Simulate `model` on the grid of `input` from `x0`.
pub fn simulate(
    model: &StateSpaceModel,
    input: &SampledSignal,
    x0: &DVector<f64>,
) -> Result<(SampledSignal, DVector<f64>)> {
    Propagator::new(model, input.grid())?.run(input, x0)
}
