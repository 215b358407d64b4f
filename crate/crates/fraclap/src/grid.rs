//! Uniform symmetric grids, grid functions, and far-field models.

use crate::{Error, Result};

/// Uniform grid on `[-L, L]` with nodes `x_i = -L + i h`. The node count is
/// kept odd so that `x = 0` is always a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    l: f64,
    h: f64,
    n: usize,
}

impl Grid {
    /// Builds the grid over `[-l, l]` with spacing `h`; `2l/h` must be an
    /// even integer (up to 1e-12 relative) so the grid is symmetric with a
    /// center node.
    pub fn symmetric(l: f64, h: f64) -> Result<Self> {
        if !(l > 0.0 && h > 0.0 && l.is_finite() && h.is_finite()) {
            return Err(Error::Domain(format!("grid: bad L = {l} or h = {h}")));
        }
        let cells = 2.0 * l / h;
        let n_cells = cells.round();
        if (cells - n_cells).abs() > 1e-12 * cells.max(1.0) {
            return Err(Error::Domain(format!(
                "grid: 2L/h = {cells} is not an integer"
            )));
        }
        let n_cells = n_cells as usize;
        if n_cells % 2 != 0 || n_cells == 0 {
            return Err(Error::Domain(format!(
                "grid: 2L/h = {n_cells} must be a positive even integer for a center node"
            )));
        }
        Ok(Self { l, h, n: n_cells + 1 })
    }

    pub fn half_width(&self) -> f64 {
        self.l
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of nodes, odd.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node coordinate `x_i = -L + i h`.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        -self.l + i as f64 * self.h
    }

    /// Index of the center node `x = 0`.
    pub fn center(&self) -> usize {
        (self.n - 1) / 2
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }
}

/// Samples of a function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFn {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "grid function: {} values on a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("grid function: non-finite sample".into()));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every node.
    pub fn sample<F: Fn(f64) -> f64>(grid: Grid, f: F) -> Result<Self> {
        let values = grid.nodes().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at the left endpoint `-L`.
    pub fn left_value(&self) -> f64 {
        self.values[0]
    }

    /// Value at the right endpoint `L`.
    pub fn right_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// Analytic rule for samples beyond the tabulated range of a
/// [`FarField::DirichletTable`].
#[derive(Debug, Clone, PartialEq)]
pub enum TailRule {
    Zero,
    /// `g(y) ≈ amp_side · L^β |y|^{-β}`, amplitudes anchored at `±L`.
    Algebraic { beta: f64, u_left: f64, u_right: f64 },
}

/// How a grid function continues outside `[-L, L]`.
#[derive(Debug, Clone, PartialEq)]
pub enum FarField {
    /// Identically zero outside the grid.
    Zero,
    /// Algebraic decay `u(y) ≈ u(±L) L^β |y|^{-β}`. The amplitudes stored
    /// here are defaults; the operator re-reads the live grid endpoints at
    /// apply time so that evolving iterates keep a consistent tail.
    AlgebraicTail { beta: f64, u_left: f64, u_right: f64 },
    /// Tabulated Dirichlet data at spacing h on `[-L - L_W, -L)` (left,
    /// ascending in x) and `(L, L + L_W]` (right, ascending), plus a tail
    /// rule past the table.
    DirichletTable {
        left: Vec<f64>,
        right: Vec<f64>,
        tail: TailRule,
    },
}

impl FarField {
    /// Algebraic tail with amplitudes taken from the grid endpoints.
    pub fn algebraic_from(beta: f64, u: &GridFn) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Domain(format!(
                "far field: beta = {beta} must be positive"
            )));
        }
        Ok(FarField::AlgebraicTail {
            beta,
            u_left: u.left_value(),
            u_right: u.right_value(),
        })
    }

    /// Builds a Dirichlet table by sampling `g` at the `m` exterior nodes on
    /// each side of `[-L, L]`.
    pub fn table_from<F: Fn(f64) -> f64>(grid: Grid, m: usize, g: F, tail: TailRule) -> Self {
        let (l, h) = (grid.half_width(), grid.h());
        let left = (0..m).map(|k| g(-l - (m - k) as f64 * h)).collect();
        let right = (1..=m).map(|k| g(l + k as f64 * h)).collect();
        FarField::DirichletTable { left, right, tail }
    }
}
