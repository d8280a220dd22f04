//! Discretized (t, D, E) domain and the value arrays living on it.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::EngineError;

/// Uniform mesh over `[0, horizon] x [0, xi_max] x [0, e_max]` with node
/// coordinates `D_i = i * delta_d`, `E_j = j * delta_e`, `t_k = k * delta_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    /// Number of demand cells (nodes are `0..=n_d`).
    pub n_d: usize,
    /// Number of emissions cells (nodes are `0..=n_e`).
    pub n_e: usize,
    /// Number of time steps (levels are `0..=n_t`).
    pub n_t: usize,
    /// Demand mesh width (MW).
    pub delta_d: f64,
    /// Emissions mesh width (tCO2).
    pub delta_e: f64,
    /// Time step (years).
    pub delta_t: f64,
    /// Demand domain bound (MW).
    pub xi_max: f64,
    /// Emissions domain bound (tCO2).
    pub e_max: f64,
    /// Time horizon (years).
    pub horizon: f64,
}

impl Grid {
    pub fn new(
        n_d: usize,
        n_e: usize,
        n_t: usize,
        xi_max: f64,
        e_max: f64,
        horizon: f64,
    ) -> Result<Self, EngineError> {
        if n_d == 0 || n_e == 0 || n_t == 0 {
            return Err(EngineError::InvalidParams(
                "grid needs at least one cell per axis and one time step".into(),
            ));
        }
        if !(xi_max > 0.0 && e_max > 0.0 && horizon > 0.0) {
            return Err(EngineError::InvalidParams(format!(
                "grid domain must be positive (xi_max = {xi_max}, e_max = {e_max}, \
                 horizon = {horizon})"
            )));
        }
        Ok(Self {
            n_d,
            n_e,
            n_t,
            delta_d: xi_max / n_d as f64,
            delta_e: e_max / n_e as f64,
            delta_t: horizon / n_t as f64,
            xi_max,
            e_max,
            horizon,
        })
    }

    #[inline]
    pub fn d_at(&self, i: usize) -> f64 {
        if i == self.n_d {
            self.xi_max
        } else {
            i as f64 * self.delta_d
        }
    }

    #[inline]
    pub fn e_at(&self, j: usize) -> f64 {
        if j == self.n_e {
            self.e_max
        } else {
            j as f64 * self.delta_e
        }
    }

    #[inline]
    pub fn t_at(&self, k: usize) -> f64 {
        if k == self.n_t {
            self.horizon
        } else {
            k as f64 * self.delta_t
        }
    }

    /// Number of spatial nodes.
    pub fn node_count(&self) -> usize {
        (self.n_d + 1) * (self.n_e + 1)
    }

    /// Nearest E-node index for a coordinate; errors if the snap distance
    /// exceeds `tol_cells` mesh widths.
    pub fn snap_e_node(&self, e: f64, tol_cells: f64) -> Result<usize, EngineError> {
        let raw = e / self.delta_e;
        let node = raw.round();
        if (raw - node).abs() > tol_cells || node < 0.0 || node > self.n_e as f64 {
            return Err(EngineError::GridMismatch(format!(
                "emissions level {e} is {:.3} cells away from the nearest node",
                (raw - node).abs()
            )));
        }
        Ok(node as usize)
    }
}

/// Certificate (or option) prices on the spatial mesh at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSurface {
    pub grid: Grid,
    /// Time this level belongs to (years).
    pub time: f64,
    /// Row-major values: index `i * (n_e + 1) + j`.
    values: Vec<f64>,
}

impl ValueSurface {
    pub fn constant(grid: Grid, time: f64, value: f64) -> Self {
        Self {
            grid,
            time,
            values: vec![value; grid.node_count()],
        }
    }

    /// Builds a surface from a function of node indices.
    pub fn from_fn(grid: Grid, time: f64, f: impl Fn(usize, usize) -> f64) -> Self {
        let stride = grid.n_e + 1;
        let mut values = vec![0.0; grid.node_count()];
        for i in 0..=grid.n_d {
            for j in 0..=grid.n_e {
                values[i * stride + j] = f(i, j);
            }
        }
        Self { grid, time, values }
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * (self.grid.n_e + 1) + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * (self.grid.n_e + 1) + j] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bilinear interpolation at physical coordinates `(d, e)`.
    ///
    /// `e` values beyond the top face are clamped onto it (the surface is
    /// constant above the cap); `d` must lie in the demand domain.
    pub fn bilinear(&self, d: f64, e: f64) -> Result<f64, EngineError> {
        let g = &self.grid;
        if !d.is_finite() || d < -1e-9 * g.xi_max || d > g.xi_max * (1.0 + 1e-9) {
            return Err(EngineError::Domain {
                op: "bilinear",
                what: "d",
                value: d,
                lo: 0.0,
                hi: g.xi_max,
            });
        }
        if !e.is_finite() || e < -1e-9 * g.e_max {
            return Err(EngineError::Domain {
                op: "bilinear",
                what: "e",
                value: e,
                lo: 0.0,
                hi: g.e_max,
            });
        }
        let d = d.clamp(0.0, g.xi_max);
        let e = e.clamp(0.0, g.e_max);
        let fd = d / g.delta_d;
        let fe = e / g.delta_e;
        let i = (fd.floor() as usize).min(g.n_d - 1);
        let j = (fe.floor() as usize).min(g.n_e - 1);
        let wd = fd - i as f64;
        let we = fe - j as f64;
        let v00 = self.value(i, j);
        let v01 = self.value(i, j + 1);
        let v10 = self.value(i + 1, j);
        let v11 = self.value(i + 1, j + 1);
        Ok(v00 * (1.0 - wd) * (1.0 - we)
            + v10 * wd * (1.0 - we)
            + v01 * (1.0 - wd) * we
            + v11 * wd * we)
    }

    /// Writes the surface as CSV rows `t,D,E,value` in full double precision.
    pub fn write_csv<W: Write>(&self, out: &mut W, with_header: bool) -> Result<(), EngineError> {
        if with_header {
            writeln!(out, "t,D,E,value")?;
        }
        for i in 0..=self.grid.n_d {
            for j in 0..=self.grid.n_e {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    self.time,
                    self.grid.d_at(i),
                    self.grid.e_at(j),
                    self.value(i, j)
                )?;
            }
        }
        Ok(())
    }
}

/// Which time levels a backward solve keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StorePolicy {
    /// Every level (the full space-time solution).
    All,
    /// Every `n`-th level, always including the first and last.
    Stride(usize),
    /// Only the initial (t = 0) and terminal levels.
    EndpointsOnly,
}

impl StorePolicy {
    pub(crate) fn keeps(&self, k: usize, n_t: usize) -> bool {
        match self {
            StorePolicy::All => true,
            StorePolicy::Stride(s) => k == 0 || k == n_t || k % s.max(&1) == 0,
            StorePolicy::EndpointsOnly => k == 0 || k == n_t,
        }
    }
}

/// The stored time levels of one backward solve, ascending in time.
#[derive(Debug, Clone)]
pub struct SolvedSurfaces {
    levels: Vec<ValueSurface>,
}

impl SolvedSurfaces {
    pub(crate) fn from_levels(mut levels: Vec<ValueSurface>) -> Self {
        levels.sort_by(|a, b| a.time.total_cmp(&b.time));
        Self { levels }
    }

    pub fn levels(&self) -> &[ValueSurface] {
        &self.levels
    }

    pub fn grid(&self) -> &Grid {
        &self.levels[0].grid
    }

    /// Earliest stored level (t = 0 for a complete solve).
    pub fn first(&self) -> &ValueSurface {
        &self.levels[0]
    }

    /// Terminal level.
    pub fn last(&self) -> &ValueSurface {
        self.levels.last().expect("at least one level")
    }

    pub fn first_time(&self) -> f64 {
        self.first().time
    }

    pub fn last_time(&self) -> f64 {
        self.last().time
    }

    /// True when every time level of the solve was stored.
    pub fn is_complete(&self) -> bool {
        self.levels.len() == self.grid().n_t + 1
    }

    /// The stored level nearest at or below `t` (with a small forward slack
    /// for rounding at level boundaries).
    pub fn level_at_or_below(&self, t: f64) -> Result<&ValueSurface, EngineError> {
        let slack = 1e-9 * self.grid().horizon.max(1.0);
        if !t.is_finite() || t < self.first_time() - slack || t > self.last_time() + slack {
            return Err(EngineError::Domain {
                op: "level_at_or_below",
                what: "t",
                value: t,
                lo: self.first_time(),
                hi: self.last_time(),
            });
        }
        let idx = self.levels.partition_point(|s| s.time <= t + slack);
        Ok(&self.levels[idx.saturating_sub(1)])
    }

    /// Exact stored level at time `t`, if any.
    pub fn level_at(&self, t: f64) -> Option<&ValueSurface> {
        let slack = 1e-9 * self.grid().horizon.max(1.0);
        self.levels.iter().find(|s| (s.time - t).abs() <= slack)
    }

    /// Price lookup: bilinear interpolation in `(d, e)` on the stored level
    /// nearest at or below `t`.
    pub fn evaluate(&self, t: f64, d: f64, e: f64) -> Result<f64, EngineError> {
        self.level_at_or_below(t)?.bilinear(d, e)
    }

    /// Writes every stored level as one CSV stream.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<(), EngineError> {
        writeln!(out, "t,D,E,value")?;
        for level in &self.levels {
            level.write_csv(out, false)?;
        }
        Ok(())
    }
}

/// Grid metadata sidecar written next to CSV surface exports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSidecar {
    pub grid: Grid,
    /// Times of the exported levels (years).
    pub times: Vec<f64>,
    /// Free-form description of what the CSV holds.
    pub description: String,
}
