//! 1D harmonic transport equation: RK4 marching solver and the discrete
//! residual operator used as the refinement metric.
//!
//! The equation is `m(x)·y'(x) = i·k·y(x) + g(x)` on `x ∈ [0, 1]` with
//! `y(0) = 0`. Inputs come in two flavours: a scalar Mach number with a
//! parametric source (case 1), and nodal Mach/source fields expanded from
//! Chebyshev coefficients (case 2). Solutions are stored as real vectors of
//! length `2·node_count`, laid out `(Re y at all nodes, Im y at all nodes)`.
//!
//! `solve` and `residual` deliberately use different discretisations (RK4
//! marching vs. a 4th-order finite-difference collocation residual), so the
//! residual is an independent measure of how well a vector satisfies the
//! equation. Both are pure and reentrant.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("solution overflowed or became non-finite (Mach too close to zero or pathological source)")]
    NonFiniteResult,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Equally spaced nodes spanning `[0, 1]` inclusive of both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    node_count: usize,
    nodes: Vec<f64>,
}

impl SpatialGrid {
    pub fn new(node_count: usize) -> Result<Self, TransportError> {
        if node_count < 2 {
            return Err(TransportError::InvalidParameter(format!(
                "node_count must be >= 2, got {node_count}"
            )));
        }
        let h = 1.0 / (node_count - 1) as f64;
        let mut nodes: Vec<f64> = (0..node_count).map(|j| j as f64 * h).collect();
        nodes[node_count - 1] = 1.0;
        Ok(Self { node_count, nodes })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Uniform spacing `Δx = 1/(node_count − 1)`.
    pub fn spacing(&self) -> f64 {
        1.0 / (self.node_count - 1) as f64
    }

    /// Length `M = 2·node_count` of solution vectors on this grid.
    pub fn solution_len(&self) -> usize {
        2 * self.node_count
    }
}

/// Parametric case-1 source `g(x) = a·e^{iαx} + e^{iαx − (x−x_m)²/(2σ²)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case1Source {
    pub a: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub x_m: f64,
}

impl Case1Source {
    pub fn new(a: f64, alpha: f64, sigma: f64, x_m: f64) -> Result<Self, TransportError> {
        if !(sigma > 0.0) {
            return Err(TransportError::InvalidParameter(format!(
                "sigma must be > 0, got {sigma}"
            )));
        }
        Ok(Self { a, alpha, sigma, x_m })
    }

    /// Evaluate the source at a spatial position.
    pub fn eval(&self, x: f64) -> Complex64 {
        let carrier = Complex64::new(0.0, self.alpha * x).exp();
        let envelope = (-(x - self.x_m).powi(2) / (2.0 * self.sigma * self.sigma)).exp();
        carrier * (self.a + envelope)
    }
}

/// Mach number: constant (case 1) or a nodal field (case 2).
#[derive(Debug, Clone, PartialEq)]
pub enum MachField {
    Scalar(f64),
    Nodal(Vec<f64>),
}

/// Source term: parametric (case 1) or a nodal complex field (case 2).
#[derive(Debug, Clone, PartialEq)]
pub enum SourceField {
    Parametric(Case1Source),
    Nodal(Vec<Complex64>),
}

/// Full parameterisation of one transport problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportParams {
    pub wave_number: f64,
    pub mach: MachField,
    pub source: SourceField,
}

impl TransportParams {
    /// Check Mach non-degeneracy and that nodal fields match the grid.
    pub fn validate(&self, grid: &SpatialGrid) -> Result<(), TransportError> {
        match &self.mach {
            MachField::Scalar(m) => {
                if *m == 0.0 || !m.is_finite() {
                    return Err(TransportError::InvalidParameter("Mach number must be nonzero and finite".into()));
                }
            }
            MachField::Nodal(ms) => {
                if ms.len() != grid.node_count() {
                    return Err(TransportError::DimensionMismatch(format!(
                        "Mach field has {} nodes, grid has {}",
                        ms.len(),
                        grid.node_count()
                    )));
                }
                if ms.iter().any(|m| *m == 0.0 || !m.is_finite()) {
                    return Err(TransportError::InvalidParameter("Mach field must be nonzero and finite everywhere".into()));
                }
            }
        }
        if let SourceField::Nodal(gs) = &self.source {
            if gs.len() != grid.node_count() {
                return Err(TransportError::DimensionMismatch(format!(
                    "source field has {} nodes, grid has {}",
                    gs.len(),
                    grid.node_count()
                )));
            }
        }
        Ok(())
    }
}

/// Discretised solution `y_R = (Re y, Im y) ∈ R^M`, `M = 2·node_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionVector {
    values: Vec<f64>,
}

impl SolutionVector {
    pub fn from_complex(nodes: &[Complex64]) -> Self {
        let mut values = Vec::with_capacity(2 * nodes.len());
        values.extend(nodes.iter().map(|c| c.re));
        values.extend(nodes.iter().map(|c| c.im));
        Self { values }
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self, TransportError> {
        if values.len() % 2 != 0 {
            return Err(TransportError::DimensionMismatch(format!(
                "solution length {} is odd",
                values.len()
            )));
        }
        Ok(Self { values })
    }

    pub fn zeros(node_count: usize) -> Self {
        Self { values: vec![0.0; 2 * node_count] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.values.len() / 2
    }

    pub fn re(&self, j: usize) -> f64 {
        self.values[j]
    }

    pub fn im(&self, j: usize) -> f64 {
        self.values[self.node_count() + j]
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        let n = self.node_count();
        (0..n).map(|j| Complex64::new(self.values[j], self.values[n + j])).collect()
    }
}

/// Real Chebyshev coefficients of one field; evaluated on `[0, 1]` via the
/// affine map to `[−1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevField {
    coefficients: Vec<f64>,
}

impl ChebyshevField {
    pub fn new(coefficients: Vec<f64>) -> Result<Self, TransportError> {
        if coefficients.is_empty() {
            return Err(TransportError::InvalidParameter("Chebyshev coefficient vector is empty".into()));
        }
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Evaluate `Σ cₙ·Tₙ(2x−1)` by the Clenshaw recurrence.
    pub fn eval(&self, x: f64) -> f64 {
        let t = 2.0 * x - 1.0;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coefficients.iter().rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        // Clenshaw for Chebyshev: f = b0 - t*b1 with the half-weight on c0
        b1 - t * b2
    }
}

/// Evaluate a Chebyshev field at every grid node.
pub fn expand_chebyshev(field: &ChebyshevField, grid: &SpatialGrid) -> Vec<f64> {
    grid.nodes().iter().map(|&x| field.eval(x)).collect()
}

/// Concatenate `(mach, Re g, Im g)` into the case-2 input vector of length
/// `N = 3·node_count`.
pub fn pack_case2_input(
    mach_nodes: &[f64],
    re_g_nodes: &[f64],
    im_g_nodes: &[f64],
) -> Result<Vec<f64>, TransportError> {
    if mach_nodes.len() != re_g_nodes.len() || mach_nodes.len() != im_g_nodes.len() {
        return Err(TransportError::DimensionMismatch(format!(
            "field lengths differ: mach {}, re {}, im {}",
            mach_nodes.len(),
            re_g_nodes.len(),
            im_g_nodes.len()
        )));
    }
    let mut packed = Vec::with_capacity(3 * mach_nodes.len());
    packed.extend_from_slice(mach_nodes);
    packed.extend_from_slice(re_g_nodes);
    packed.extend_from_slice(im_g_nodes);
    Ok(packed)
}

/// Inverse of [`pack_case2_input`]; recovers the three nodal fields exactly.
pub fn unpack_case2_input(packed: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>), TransportError> {
    if packed.len() % 3 != 0 {
        return Err(TransportError::DimensionMismatch(format!(
            "packed length {} is not divisible by 3",
            packed.len()
        )));
    }
    let n = packed.len() / 3;
    Ok((
        packed[..n].to_vec(),
        packed[n..2 * n].to_vec(),
        packed[2 * n..].to_vec(),
    ))
}

/// Case-2 params from a packed nodal input vector.
pub fn params_from_packed(
    packed: &[f64],
    wave_number: f64,
) -> Result<TransportParams, TransportError> {
    let (mach, re_g, im_g) = unpack_case2_input(packed)?;
    let source: Vec<Complex64> = re_g
        .iter()
        .zip(im_g.iter())
        .map(|(&r, &i)| Complex64::new(r, i))
        .collect();
    Ok(TransportParams {
        wave_number,
        mach: MachField::Nodal(mach),
        source: SourceField::Nodal(source),
    })
}

/// Sampled coefficient field: values at nodes plus values at step midpoints.
struct FieldSamples<T> {
    at_nodes: Vec<T>,
    at_mid: Vec<T>,
}

fn scalar_samples(v: f64, n: usize) -> FieldSamples<f64> {
    FieldSamples { at_nodes: vec![v; n], at_mid: vec![v; n - 1] }
}

fn parametric_samples(src: &Case1Source, grid: &SpatialGrid) -> FieldSamples<Complex64> {
    let h = grid.spacing();
    FieldSamples {
        at_nodes: grid.nodes().iter().map(|&x| src.eval(x)).collect(),
        at_mid: (0..grid.node_count() - 1)
            .map(|j| src.eval(grid.nodes()[j] + 0.5 * h))
            .collect(),
    }
}

/// Midpoint values of a nodal field by 4-point cubic interpolation
/// (Catmull-Rom in the interior, one-sided cubics at the first and last step).
fn cubic_midpoints<T>(nodes: &[T]) -> Vec<T>
where
    T: Copy
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<f64, Output = T>,
{
    let n = nodes.len();
    let mut mid = Vec::with_capacity(n - 1);
    for j in 0..n - 1 {
        let m = if n < 4 {
            // too few nodes for a cubic; fall back to the linear average
            (nodes[j] + nodes[j + 1]) * 0.5
        } else if j == 0 {
            nodes[0] * (5.0 / 16.0) + nodes[1] * (15.0 / 16.0) - nodes[2] * (5.0 / 16.0)
                + nodes[3] * (1.0 / 16.0)
        } else if j == n - 2 {
            nodes[n - 1] * (5.0 / 16.0) + nodes[n - 2] * (15.0 / 16.0)
                - nodes[n - 3] * (5.0 / 16.0)
                + nodes[n - 4] * (1.0 / 16.0)
        } else {
            (nodes[j] + nodes[j + 1]) * (9.0 / 16.0)
                - (nodes[j - 1] + nodes[j + 2]) * (1.0 / 16.0)
        };
        mid.push(m);
    }
    mid
}

fn nodal_samples_f64(nodes: &[f64]) -> FieldSamples<f64> {
    FieldSamples { at_nodes: nodes.to_vec(), at_mid: cubic_midpoints(nodes) }
}

fn nodal_samples_c64(nodes: &[Complex64]) -> FieldSamples<Complex64> {
    FieldSamples { at_nodes: nodes.to_vec(), at_mid: cubic_midpoints(nodes) }
}

/// March `y'(x) = (i·k·y + g(x)) / m(x)`, `y(0) = 0`, with classical RK4
/// over the grid. Nodal coefficient fields are interpolated to step midpoints
/// by local cubics, so case-2 inputs keep 4th-order accuracy.
pub fn solve(params: &TransportParams, grid: &SpatialGrid) -> Result<SolutionVector, TransportError> {
    params.validate(grid)?;
    let n = grid.node_count();
    let h = grid.spacing();
    let ik = Complex64::new(0.0, params.wave_number);

    let mach = match &params.mach {
        MachField::Scalar(m) => scalar_samples(*m, n),
        MachField::Nodal(ms) => nodal_samples_f64(ms),
    };
    let source = match &params.source {
        SourceField::Parametric(src) => parametric_samples(src, grid),
        SourceField::Nodal(gs) => nodal_samples_c64(gs),
    };

    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n - 1 {
        let f = |yv: Complex64, g: Complex64, m: f64| (ik * yv + g) / m;
        let k1 = f(y[j], source.at_nodes[j], mach.at_nodes[j]);
        let k2 = f(y[j] + k1 * (h / 2.0), source.at_mid[j], mach.at_mid[j]);
        let k3 = f(y[j] + k2 * (h / 2.0), source.at_mid[j], mach.at_mid[j]);
        let k4 = f(y[j] + k3 * h, source.at_nodes[j + 1], mach.at_nodes[j + 1]);
        y[j + 1] = y[j] + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if !y[j + 1].re.is_finite() || !y[j + 1].im.is_finite() {
            return Err(TransportError::NonFiniteResult);
        }
    }
    Ok(SolutionVector::from_complex(&y))
}

/// First derivative of a complex nodal vector by 4th-order finite differences
/// (central in the interior, skewed/one-sided at the two nodes nearest each
/// boundary). Requires at least 5 nodes.
fn derivative4(y: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = y.len();
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let w = 1.0 / (12.0 * h);
    d[0] = (-y[0] * 25.0 + y[1] * 48.0 - y[2] * 36.0 + y[3] * 16.0 - y[4] * 3.0) * w;
    d[1] = (-y[0] * 3.0 - y[1] * 10.0 + y[2] * 18.0 - y[3] * 6.0 + y[4]) * w;
    for j in 2..n - 2 {
        d[j] = (y[j - 2] - y[j - 1] * 8.0 + y[j + 1] * 8.0 - y[j + 2]) * w;
    }
    d[n - 2] = (y[n - 1] * 3.0 + y[n - 2] * 10.0 - y[n - 3] * 18.0 + y[n - 4] * 6.0 - y[n - 5]) * w;
    d[n - 1] = (y[n - 1] * 25.0 - y[n - 2] * 48.0 + y[n - 3] * 36.0 - y[n - 4] * 16.0 + y[n - 5] * 3.0) * w;
    d
}

/// Discrete residual of a candidate solution: the RMS over all nodes except
/// `x = 0` of `|m·(Dy)_j − i·k·y_j − g(x_j)|` with `D` the 4th-order
/// finite-difference operator, plus the boundary penalty `|y(0)|`.
///
/// Deterministic and pure; never solves anything.
pub fn residual(
    params: &TransportParams,
    y: &SolutionVector,
    grid: &SpatialGrid,
) -> Result<f64, TransportError> {
    params.validate(grid)?;
    let n = grid.node_count();
    if y.len() != grid.solution_len() {
        return Err(TransportError::DimensionMismatch(format!(
            "solution length {} does not match grid ({} expected)",
            y.len(),
            grid.solution_len()
        )));
    }
    if n < 5 {
        return Err(TransportError::InvalidParameter(
            "the residual stencil needs node_count >= 5".into(),
        ));
    }

    let yc = y.to_complex();
    let d = derivative4(&yc, grid.spacing());
    let ik = Complex64::new(0.0, params.wave_number);

    let mach_at = |j: usize| -> f64 {
        match &params.mach {
            MachField::Scalar(m) => *m,
            MachField::Nodal(ms) => ms[j],
        }
    };
    let source_at = |j: usize| -> Complex64 {
        match &params.source {
            SourceField::Parametric(src) => src.eval(grid.nodes()[j]),
            SourceField::Nodal(gs) => gs[j],
        }
    };

    let mut sum_sq = 0.0;
    for j in 1..n {
        let r = d[j] * mach_at(j) - ik * yc[j] - source_at(j);
        sum_sq += r.norm_sqr();
    }
    let rms = (sum_sq / (n - 1) as f64).sqrt();
    Ok(rms + yc[0].norm())
}
