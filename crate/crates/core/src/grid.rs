//! Uniform space-time grid on `[0,T] × [0,1]` and a dense row-major field
//! container shared by the solver, the measure lifts, and the residual
//! suites.

use crate::Scalar;

/// Uniform grid with `Nt` time steps and `Nx` interior space nodes.
///
/// Time nodes are `t_i = i·dt`, `i = 0..=Nt`, with `dt = T/Nt`. Space nodes
/// are `x_j = j·dx`, `j = 0..=Nx+1`, with `dx = 1/(Nx+1)`; `j = 0` and
/// `j = Nx+1` are the Dirichlet boundary nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeGrid<S: Scalar> {
    pub nt: usize,
    pub nx: usize,
    pub horizon: S,
    pub dt: S,
    pub dx: S,
}

impl<S: Scalar> SpaceTimeGrid<S> {
    pub fn new(horizon: S, nt: usize, nx: usize) -> Self {
        assert!(nt >= 2 && nx >= 2, "need Nt >= 2 and Nx >= 2");
        assert!(horizon > S::zero(), "horizon must be positive");
        SpaceTimeGrid {
            nt,
            nx,
            horizon,
            dt: horizon / S::of_usize(nt),
            dx: S::one() / S::of_usize(nx + 1),
        }
    }

    /// Number of time rows, `Nt + 1`.
    pub fn rows(&self) -> usize {
        self.nt + 1
    }

    /// Number of space columns including both boundary nodes, `Nx + 2`.
    pub fn cols(&self) -> usize {
        self.nx + 2
    }

    pub fn t(&self, i: usize) -> S {
        self.dt * S::of_usize(i)
    }

    pub fn x(&self, j: usize) -> S {
        self.dx * S::of_usize(j)
    }

    pub fn is_boundary_col(&self, j: usize) -> bool {
        j == 0 || j == self.nx + 1
    }

    /// Grid refined by an integer factor in both directions.
    pub fn refined(&self, factor: usize) -> Self {
        SpaceTimeGrid::new(self.horizon, self.nt * factor, (self.nx + 1) * factor - 1)
    }

    /// `dx² + dt²`, the scale every second-order residual is measured
    /// against.
    pub fn h2(&self) -> S {
        self.dx * self.dx + self.dt * self.dt
    }

    pub fn shape_label(&self) -> String {
        format!("{}x{}", self.nt, self.nx)
    }

    /// Trapezoid weights over the time nodes.
    pub fn time_weights(&self) -> Vec<S> {
        trapezoid_weights(self.rows(), self.dt)
    }

    /// Trapezoid weights over all space nodes including the boundary.
    pub fn space_weights(&self) -> Vec<S> {
        trapezoid_weights(self.cols(), self.dx)
    }
}

pub(crate) fn trapezoid_weights<S: Scalar>(n: usize, h: S) -> Vec<S> {
    let mut w = vec![h; n];
    w[0] = h * S::half();
    w[n - 1] = h * S::half();
    w
}

/// Dense `(Nt+1) × (Nx+2)` array of nodal values, row-major in time.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2<S: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Field2<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Field2 { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = f(i, j);
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn min(&self) -> S {
        self.data.iter().fold(S::infinity(), |acc, v| acc.min(*v))
    }

    pub fn max(&self) -> S {
        self.data.iter().fold(S::neg_infinity(), |acc, v| acc.max(*v))
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Field2 { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip(&self, other: &Self, f: impl Fn(S, S) -> S) -> Self {
        assert!(self.same_shape(other), "shape mismatch");
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Field2 { rows: self.rows, cols: self.cols, data }
    }
}

impl<S: Scalar> std::ops::Index<(usize, usize)> for Field2<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> std::ops::IndexMut<(usize, usize)> for Field2<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}
