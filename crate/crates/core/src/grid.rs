//! Candidate response grids and the discretizers that round onto them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interval::{Bound, Interval};

/// A strictly increasing, finite set of candidate response values.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    // Nearest-point cell boundaries: midpoints of consecutive points.
    boundaries: Vec<f64>,
    spacing: Option<f64>,
}

impl Grid {
    /// Builds a grid from arbitrary strictly increasing points.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSize("grid needs at least one point".into()));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("grid points must be finite".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("grid points must be strictly increasing".into()));
        }
        let boundaries = points.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Ok(Self { points, boundaries, spacing: None })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Interior cell boundaries (`len() - 1` of them).
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Uniform cell width, for grids built by [`make_grid`].
    pub fn spacing(&self) -> Option<f64> {
        self.spacing
    }

    /// Gap between neighbouring points: the uniform spacing when known,
    /// otherwise the smallest gap. `None` for a one-point grid of unknown spacing.
    pub fn point_gap(&self) -> Option<f64> {
        self.spacing.or_else(|| {
            self.points
                .windows(2)
                .map(|w| w[1] - w[0])
                .min_by(f64::total_cmp)
        })
    }

    /// Range that unbounded edge cells are clipped to when reporting lengths:
    /// half a cell beyond the outermost points.
    pub fn length_window(&self) -> Option<(f64, f64)> {
        let first = self.points[0];
        let last = self.points[self.points.len() - 1];
        if let Some(delta) = self.spacing {
            return Some((first - 0.5 * delta, last + 0.5 * delta));
        }
        match (self.boundaries.first(), self.boundaries.last()) {
            (Some(&b0), Some(&bl)) => Some((2.0 * first - b0, 2.0 * last - bl)),
            _ => None,
        }
    }

    /// Position of an exact grid point.
    pub fn index_of(&self, point: f64) -> Result<usize> {
        self.points
            .binary_search_by(|p| p.total_cmp(&point))
            .map_err(|_| Error::UnknownPoint(point))
    }

    /// Index of the nearest point. Cells are half-open `[lo, hi)`, so a value
    /// exactly between two points goes to the upper one.
    pub fn nearest_index(&self, y: f64) -> usize {
        self.boundaries.partition_point(|&b| b <= y)
    }
}

/// The midpoint grid `{lo + (k - 1/2)(hi - lo)/m : k = 1..m}`.
pub fn make_grid(lo: f64, hi: f64, m: usize) -> Result<Grid> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidRange { lo, hi });
    }
    if m == 0 {
        return Err(Error::InvalidSize("grid size must be at least 1".into()));
    }
    let delta = (hi - lo) / m as f64;
    let points = (1..=m).map(|k| lo + (k as f64 - 0.5) * delta).collect();
    let mut grid = Grid::from_points(points)?;
    grid.spacing = Some(delta);
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundingMode {
    /// Round to the nearest grid point.
    Nearest,
    /// Round to one of the two bracketing points with probabilities that make
    /// the result unbiased inside the grid range.
    Randomized { seed: u64 },
}

/// Maps the real line onto a [`Grid`].
///
/// The randomized mode owns its generator; use one instance per thread.
#[derive(Debug, Clone)]
pub struct Discretizer {
    grid: Grid,
    mode: RoundingMode,
    rng: Option<ChaCha8Rng>,
}

impl Discretizer {
    pub fn nearest(grid: Grid) -> Self {
        Self { grid, mode: RoundingMode::Nearest, rng: None }
    }

    pub fn randomized(grid: Grid, seed: u64) -> Self {
        Self {
            grid,
            mode: RoundingMode::Randomized { seed },
            rng: Some(ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    pub fn with_mode(grid: Grid, mode: RoundingMode) -> Self {
        match mode {
            RoundingMode::Nearest => Self::nearest(grid),
            RoundingMode::Randomized { seed } => Self::randomized(grid, seed),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mode(&self) -> RoundingMode {
        self.mode
    }

    /// Deterministic nearest-point rounding, regardless of mode.
    pub fn nearest_point(&self, y: f64) -> f64 {
        self.grid.points[self.grid.nearest_index(y)]
    }

    /// Rounds `y` onto the grid. Values outside the grid range go to the
    /// nearest endpoint in both modes.
    pub fn discretize(&mut self, y: f64) -> f64 {
        let Some(rng) = self.rng.as_mut() else {
            return self.grid.points[self.grid.nearest_index(y)];
        };
        let points = &self.grid.points;
        let (first, last) = (points[0], points[points.len() - 1]);
        if y <= first {
            return first;
        }
        if y >= last {
            return last;
        }
        let upper = points.partition_point(|&p| p <= y);
        let (lo, hi) = (points[upper - 1], points[upper]);
        let p_lower = (hi - y) / (hi - lo);
        if rng.random::<f64>() < p_lower {
            lo
        } else {
            hi
        }
    }

    /// Rounds every value in order, drawing from the generator once per value.
    pub fn discretize_all(&mut self, ys: &[f64]) -> Vec<f64> {
        ys.iter().map(|&y| self.discretize(y)).collect()
    }

    /// The set of responses that can round to `point`.
    ///
    /// Nearest mode gives the half-open cell `[b_{m-1}, b_m)`; randomized mode
    /// gives the open support `(y_{m-1}, y_{m+1})`. Edge cells are unbounded.
    pub fn preimage_cell(&self, point: f64) -> Result<Interval> {
        let m = self.grid.index_of(point)?;
        Ok(self.preimage_cell_at(m))
    }

    /// [`preimage_cell`](Self::preimage_cell) by grid index.
    pub fn preimage_cell_at(&self, m: usize) -> Interval {
        let last = self.grid.len() - 1;
        match self.mode {
            RoundingMode::Nearest => {
                let b = &self.grid.boundaries;
                let lo = if m == 0 { Bound::open(f64::NEG_INFINITY) } else { Bound::closed(b[m - 1]) };
                let hi = if m == last { Bound::open(f64::INFINITY) } else { Bound::open(b[m]) };
                Interval::new(lo, hi)
            }
            RoundingMode::Randomized { .. } => {
                let p = &self.grid.points;
                let lo = if m == 0 { f64::NEG_INFINITY } else { p[m - 1] };
                let hi = if m == last { f64::INFINITY } else { p[m + 1] };
                Interval::open(lo, hi)
            }
        }
    }
}
