//! Compilers from target functions to network weights, plus exact
//! approximation-error measurement.
//!
//! All constructions here are single-step (`T = 1`) two-layer networks with a
//! membrane-potential read-out:
//!
//! * half-space tests `H(b_i - <a_i, x>)` in the first layer,
//! * AND gates `H(sum chi_j - n)` in the second layer,
//! * cell values as decoder weights.
//!
//! Cell membership is half-open per coordinate, `[lo, hi)`: with `H(0) = 1`
//! the indicator `chi = H(x - r_i) - H(x - r_{i+1})` owns its lower boundary
//! and the topmost grid boundary belongs to no cell.

use crate::domain::BoxDomain;
use crate::matrix::Matrix;
use crate::scalar::{Mode, Scalar};
use crate::snn::{DecoderSpec, EncoderSpec, LayerParams, Network, NetworkError};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// The polyhedron `{x : A x <= b}`.
#[derive(Debug, Clone)]
pub struct PolyhedronSpec {
    pub normals: Matrix,
    pub offsets: Vec<Scalar>,
}

impl PolyhedronSpec {
    pub fn new(normals: Matrix, offsets: Vec<Scalar>) -> Result<Self, ConstructError> {
        if normals.rows() == 0 {
            return Err(ConstructError::InvalidParameter(
                "polyhedron needs at least one half-space".into(),
            ));
        }
        if normals.rows() != offsets.len() {
            return Err(ConstructError::InvalidParameter(
                "one offset per half-space required".into(),
            ));
        }
        for r in 0..normals.rows() {
            if normals.row(r).iter().all(Scalar::is_zero) {
                return Err(ConstructError::InvalidParameter(format!(
                    "half-space {r} has a zero normal"
                )));
            }
        }
        Ok(PolyhedronSpec { normals, offsets })
    }

    pub fn half_space_count(&self) -> usize {
        self.normals.rows()
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        (0..self.normals.rows()).all(|r| {
            let lhs = crate::matrix::dot(self.normals.row(r), x);
            lhs.compare(&self.offsets[r]) != Ordering::Greater
        })
    }
}

/// A function that is constant on the cells of a hyperrectangular grid and
/// zero outside. Every coordinate has the same number of cells `N`; cell
/// `(i_1, ..., i_n)` is the half-open box `X_j [r_{j,i_j}, r_{j,i_j+1})` and
/// values are stored row-major (last coordinate fastest).
#[derive(Debug, Clone)]
pub struct StepFunctionSpec {
    breakpoints: Vec<Vec<Scalar>>,
    values: Vec<Scalar>,
}

impl StepFunctionSpec {
    pub fn new(breakpoints: Vec<Vec<Scalar>>, values: Vec<Scalar>) -> Result<Self, ConstructError> {
        if breakpoints.is_empty() {
            return Err(ConstructError::InvalidParameter("no coordinates".into()));
        }
        let cells = breakpoints[0].len().saturating_sub(1);
        if cells == 0 {
            return Err(ConstructError::InvalidParameter(
                "each coordinate needs at least two breakpoints".into(),
            ));
        }
        for (j, grid) in breakpoints.iter().enumerate() {
            if grid.len() != cells + 1 {
                return Err(ConstructError::InvalidParameter(format!(
                    "coordinate {j} has {} breakpoints, expected {}",
                    grid.len(),
                    cells + 1
                )));
            }
            for w in grid.windows(2) {
                if w[0].compare(&w[1]) != Ordering::Less {
                    return Err(ConstructError::InvalidParameter(format!(
                        "breakpoints of coordinate {j} must be strictly increasing"
                    )));
                }
            }
        }
        let expected = cells.pow(breakpoints.len() as u32);
        if values.len() != expected {
            return Err(ConstructError::InvalidParameter(format!(
                "{} cell values given, grid has {expected} cells",
                values.len()
            )));
        }
        Ok(StepFunctionSpec {
            breakpoints,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.breakpoints.len()
    }

    /// Cells per coordinate.
    pub fn cells_per_axis(&self) -> usize {
        self.breakpoints[0].len() - 1
    }

    pub fn breakpoints(&self) -> &[Vec<Scalar>] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn mode(&self) -> Mode {
        self.breakpoints[0][0].mode()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let n = self.cells_per_axis();
        idx.iter().fold(0, |acc, &i| acc * n + i)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let n = self.cells_per_axis();
        let mut idx = vec![0; self.dim()];
        for j in (0..self.dim()).rev() {
            idx[j] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn cell_center(&self, idx: &[usize]) -> Vec<Scalar> {
        let two = Scalar::from_int(self.mode(), 2);
        idx.iter()
            .enumerate()
            .map(|(j, &i)| &(&self.breakpoints[j][i] + &self.breakpoints[j][i + 1]) / &two)
            .collect()
    }

    /// Direct evaluation of the specified function (the reference the
    /// compiled network is checked against).
    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        assert_eq!(x.len(), self.dim());
        let mut idx = Vec::with_capacity(self.dim());
        for (j, v) in x.iter().enumerate() {
            let grid = &self.breakpoints[j];
            if v.compare(&grid[0]) == Ordering::Less
                || v.compare(grid.last().unwrap()) != Ordering::Less
            {
                return Scalar::zero(self.mode());
            }
            // last i with grid[i] <= v
            let mut cell = 0;
            for (i, r) in grid.iter().enumerate().skip(1) {
                if v.compare(r) == Ordering::Less {
                    break;
                }
                cell = i;
            }
            idx.push(cell);
        }
        self.values[self.flat_index(&idx)].clone()
    }
}

/// Width and error summary of a compiled approximant.
#[derive(Debug, Clone)]
pub struct ApproxReport {
    pub sup_error: Scalar,
    pub l2_error_sq: Option<Scalar>,
    pub first_width: usize,
    pub second_width: usize,
    pub breakpoints: Vec<Vec<Scalar>>,
}

/// Network that copies its input spike train to the output layer:
/// `W = (1 + eps) I`, `b = 0`, `u0 = 0`, `beta = 1`, `theta = 1` per layer,
/// valid for any `0 < eps < 1/T` (default `1/(2T)`).
pub fn identity_network(
    n: usize,
    latency: usize,
    depth: usize,
    eps: Option<Scalar>,
    mode: Mode,
) -> Result<Network, ConstructError> {
    if n == 0 || latency == 0 || depth == 0 {
        return Err(ConstructError::InvalidParameter(
            "width, latency and depth must be >= 1".into(),
        ));
    }
    let eps = eps.unwrap_or_else(|| Scalar::ratio(mode, 1, 2 * latency as i64));
    let upper = Scalar::ratio(mode, 1, latency as i64);
    if !eps.is_positive() || eps.compare(&upper) != Ordering::Less {
        return Err(ConstructError::InvalidParameter(format!(
            "eps={eps} outside (0, 1/{latency})"
        )));
    }
    let gain = &Scalar::one(mode) + &eps;
    let layer = || {
        let mut w = Matrix::zeros(mode, n, n);
        for i in 0..n {
            w.set(i, i, gain.clone());
        }
        LayerParams {
            weights: w,
            bias: vec![Scalar::zero(mode); n],
            initial_potential: vec![Scalar::zero(mode); n],
            leak: Scalar::one(mode),
            threshold: Scalar::one(mode),
        }
    };
    let layers = (0..depth).map(|_| layer()).collect();
    Ok(Network::new(
        layers,
        latency,
        EncoderSpec::Direct,
        DecoderSpec::Count,
        mode,
    )?)
}

/// Realizes the indicator of `{A x <= b}` in a single time step: first layer
/// neuron `i` computes `H(b_i - <a_i, x>)`, the single second-layer neuron
/// fires iff all `p` tests fire.
pub fn indicator_network(poly: &PolyhedronSpec, mode: Mode) -> Result<Network, ConstructError> {
    let p = poly.half_space_count();
    let one = Scalar::one(mode);
    let first_rows: Vec<Vec<Scalar>> = (0..p)
        .map(|i| {
            poly.normals
                .row(i)
                .iter()
                .map(|w| -&w.convert(mode))
                .collect()
        })
        .collect();
    let first = LayerParams {
        weights: Matrix::from_rows(first_rows),
        bias: poly
            .offsets
            .iter()
            .map(|b| &b.convert(mode) + &one)
            .collect(),
        initial_potential: vec![Scalar::zero(mode); p],
        leak: Scalar::one(mode),
        threshold: one.clone(),
    };
    let second = LayerParams {
        weights: Matrix::from_rows(vec![vec![one.clone(); p]]),
        bias: vec![Scalar::from_int(mode, 1 - p as i64)],
        initial_potential: vec![Scalar::zero(mode)],
        leak: Scalar::one(mode),
        threshold: one.clone(),
    };
    let decoder = DecoderSpec::membrane_potential(
        1,
        Matrix::from_rows(vec![vec![one]]),
        vec![Scalar::zero(mode)],
        mode,
    );
    Ok(Network::new(
        vec![first, second],
        1,
        EncoderSpec::Direct,
        decoder,
        mode,
    )?)
}

/// Compiles a grid step function exactly: one first-layer neuron
/// `H(x_j - r_{j,i})` per (coordinate, breakpoint), one second-layer AND
/// neuron per cell, cell values as decoder weights. Widths are
/// `n_1 = (N + 1) n` and `n_2 = N^n`.
pub fn step_network(spec: &StepFunctionSpec, mode: Mode) -> Result<Network, ConstructError> {
    let n = spec.dim();
    let cells_per_axis = spec.cells_per_axis();
    let points = cells_per_axis + 1;
    let n1 = points * n;
    let n2 = spec.values().len();
    let one = Scalar::one(mode);

    // neuron (j, i) at row j*points + i tests H(x_j - r_{j,i})
    let mut first_w = Matrix::zeros(mode, n1, n);
    let mut first_b = Vec::with_capacity(n1);
    for j in 0..n {
        for i in 0..points {
            first_w.set(j * points + i, j, one.clone());
            first_b.push(&one - &spec.breakpoints()[j][i].convert(mode));
        }
    }
    let first = LayerParams {
        weights: first_w,
        bias: first_b,
        initial_potential: vec![Scalar::zero(mode); n1],
        leak: Scalar::one(mode),
        threshold: one.clone(),
    };

    // cell (i_1..i_n): sum_j (H(x_j - r_{j,i_j}) - H(x_j - r_{j,i_j+1})) >= n
    let mut second_w = Matrix::zeros(mode, n2, n1);
    for flat in 0..n2 {
        let idx = spec.multi_index(flat);
        for (j, &i) in idx.iter().enumerate() {
            second_w.set(flat, j * points + i, one.clone());
            second_w.set(flat, j * points + i + 1, -&one);
        }
    }
    let second = LayerParams {
        weights: second_w,
        bias: vec![Scalar::from_int(mode, 1 - n as i64); n2],
        initial_potential: vec![Scalar::zero(mode); n2],
        leak: Scalar::one(mode),
        threshold: one.clone(),
    };

    let read_out: Vec<Scalar> = spec.values().iter().map(|v| v.convert(mode)).collect();
    let decoder = DecoderSpec::membrane_potential(
        1,
        Matrix::from_rows(vec![read_out]),
        vec![Scalar::zero(mode)],
        mode,
    );
    Ok(Network::new(
        vec![first, second],
        1,
        EncoderSpec::Direct,
        decoder,
        mode,
    )?)
}

fn ceil_to_u64(v: &Scalar) -> u64 {
    match v {
        Scalar::Exact(r) => {
            use num::{Integer, Signed, ToPrimitive};
            let (n, d) = (r.numer(), r.denom());
            if r.is_negative() || n == &num::BigInt::from(0) {
                0
            } else {
                n.div_ceil(d).to_u64().expect("cell count fits u64")
            }
        }
        Scalar::Float(x) => x.ceil().max(0.0) as u64,
    }
}

/// Builds the grid approximant of a `gamma`-Lipschitz function on a box:
/// `N = max(ceil(diam * gamma / eps), 1)` cells per coordinate, cell values
/// sampled at cell centers (error at most `gamma * width / 2 <= eps / 2`).
pub fn lipschitz_network(
    f: &dyn Fn(&[Scalar]) -> Scalar,
    gamma: &Scalar,
    eps: &Scalar,
    domain: &BoxDomain,
    mode: Mode,
) -> Result<(Network, ApproxReport), ConstructError> {
    if !eps.is_positive() {
        return Err(ConstructError::InvalidParameter(
            "eps must be positive".into(),
        ));
    }
    if gamma.is_negative() {
        return Err(ConstructError::InvalidParameter(
            "gamma must be a nonnegative Lipschitz constant".into(),
        ));
    }
    let n = domain.dim();
    let diam = domain.diameter();
    let cells = ceil_to_u64(&(&(&diam * gamma) / eps)).max(1);
    let cells_scalar = Scalar::from_int(mode, cells as i64);

    let breakpoints: Vec<Vec<Scalar>> = (0..n)
        .map(|j| {
            let lo = domain.lo()[j].convert(mode);
            let width = &domain.side(j).convert(mode) / &cells_scalar;
            (0..=cells)
                .map(|i| &lo + &(&Scalar::from_int(mode, i as i64) * &width))
                .collect()
        })
        .collect();

    let total = (cells as usize).pow(n as u32);
    let mut values = Vec::with_capacity(total);
    let probe = StepFunctionSpec::new(breakpoints.clone(), vec![Scalar::zero(mode); total])?;
    for flat in 0..total {
        let center = probe.cell_center(&probe.multi_index(flat));
        values.push(f(&center).convert(mode));
    }
    let spec = StepFunctionSpec::new(breakpoints.clone(), values)?;
    let net = step_network(&spec, mode)?;

    let max_width = (0..n)
        .map(|j| &domain.side(j).convert(mode) / &cells_scalar)
        .reduce(Scalar::max)
        .expect("nonempty domain");
    let guaranteed = &(gamma.convert(mode) * &max_width) / &Scalar::from_int(mode, 2);
    let report = ApproxReport {
        sup_error: guaranteed,
        l2_error_sq: None,
        first_width: (cells as usize + 1) * n,
        second_width: total,
        breakpoints,
    };
    Ok((net, report))
}

/// One affine piece `intercept + slope * x` on `[lo, hi)`.
#[derive(Debug, Clone)]
pub struct LinearPiece {
    pub lo: Scalar,
    pub hi: Scalar,
    pub intercept: Scalar,
    pub slope: Scalar,
}

impl LinearPiece {
    pub fn value_at(&self, x: &Scalar) -> Scalar {
        &self.intercept + &(&self.slope * x)
    }
}

/// A 1D target function made of contiguous affine pieces; the last piece is
/// closed at its upper end.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    pieces: Vec<LinearPiece>,
}

impl PiecewiseLinear {
    pub fn new(pieces: Vec<LinearPiece>) -> Result<Self, ConstructError> {
        if pieces.is_empty() {
            return Err(ConstructError::InvalidParameter("no pieces".into()));
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(ConstructError::InvalidParameter(
                    "pieces must be contiguous".into(),
                ));
            }
        }
        for p in &pieces {
            if p.lo.compare(&p.hi) != Ordering::Less {
                return Err(ConstructError::InvalidParameter("empty piece".into()));
            }
        }
        Ok(PiecewiseLinear { pieces })
    }

    pub fn pieces(&self) -> &[LinearPiece] {
        &self.pieces
    }

    pub fn domain(&self) -> (Scalar, Scalar) {
        (
            self.pieces.first().unwrap().lo.clone(),
            self.pieces.last().unwrap().hi.clone(),
        )
    }

    pub fn breakpoints(&self) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = self.pieces.iter().map(|p| p.lo.clone()).collect();
        out.push(self.pieces.last().unwrap().hi.clone());
        out
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let (lo, hi) = self.domain();
        assert!(
            x.compare(&lo) != Ordering::Less && x.compare(&hi) != Ordering::Greater,
            "evaluation outside the target domain"
        );
        for (i, p) in self.pieces.iter().enumerate() {
            let below_hi = x.compare(&p.hi) == Ordering::Less
                || (i + 1 == self.pieces.len() && x.compare(&p.hi) != Ordering::Greater);
            if x.compare(&p.lo) != Ordering::Less && below_hi {
                return p.value_at(x);
            }
        }
        unreachable!("contiguous pieces cover the domain")
    }

    /// The ramp `slope * x` on `[lo, hi]`.
    pub fn ramp(slope: Scalar, lo: Scalar, hi: Scalar) -> Self {
        let mode = slope.mode();
        PiecewiseLinear {
            pieces: vec![LinearPiece {
                lo,
                hi,
                intercept: Scalar::zero(mode),
                slope,
            }],
        }
    }

    pub fn constant(value: Scalar, lo: Scalar, hi: Scalar) -> Self {
        let mode = value.mode();
        PiecewiseLinear {
            pieces: vec![LinearPiece {
                lo,
                hi,
                intercept: value,
                slope: Scalar::zero(mode),
            }],
        }
    }

    /// Pieces of a 1D step-function spec over its grid.
    pub fn from_step_spec(spec: &StepFunctionSpec) -> Result<Self, ConstructError> {
        if spec.dim() != 1 {
            return Err(ConstructError::Unsupported(
                "only 1D step specs convert to piecewise-linear targets".into(),
            ));
        }
        let grid = &spec.breakpoints()[0];
        let mode = spec.mode();
        let pieces = spec
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| LinearPiece {
                lo: grid[i].clone(),
                hi: grid[i + 1].clone(),
                intercept: v.clone(),
                slope: Scalar::zero(mode),
            })
            .collect();
        PiecewiseLinear::new(pieces)
    }
}

/// The near-staircase target on `[0, K]`: flat value `k * eps` on most of
/// `[k-1, k]` with narrow transition plateaus of half-width `eps/100` at
/// value `(k + 1/2) * eps` around each integer `k`. Against the unit-cell
/// staircase network the squared L2 error integrates to exactly
/// `K * eps^3 / 200`.
pub fn staircase_target(k: usize, eps: &Scalar) -> Result<PiecewiseLinear, ConstructError> {
    let mode = eps.mode();
    let one = Scalar::one(mode);
    if !eps.is_positive() || eps.compare(&one) != Ordering::Less {
        return Err(ConstructError::InvalidParameter(
            "staircase requires 0 < eps < 1".into(),
        ));
    }
    if k == 0 {
        return Err(ConstructError::InvalidParameter("K must be >= 1".into()));
    }
    let delta = eps / &Scalar::from_int(mode, 100);
    let half = &one / &Scalar::from_int(mode, 2);
    let zero = Scalar::zero(mode);
    let mut pieces = Vec::with_capacity(2 * k + 1);
    let plateau = |level: i64| -> Scalar {
        let height = &Scalar::from_int(mode, level) + &half;
        &height * eps
    };
    // leading half-plateau [0, delta)
    pieces.push(LinearPiece {
        lo: zero.clone(),
        hi: delta.clone(),
        intercept: plateau(0),
        slope: zero.clone(),
    });
    for step in 1..=k {
        let kk = Scalar::from_int(mode, step as i64);
        let flat_lo = &(&kk - &one) + &delta;
        let flat_hi = &kk - &delta;
        pieces.push(LinearPiece {
            lo: flat_lo,
            hi: flat_hi.clone(),
            intercept: &kk * eps,
            slope: zero.clone(),
        });
        let plateau_hi = if step == k { kk.clone() } else { &kk + &delta };
        pieces.push(LinearPiece {
            lo: flat_hi,
            hi: plateau_hi,
            intercept: plateau(step as i64),
            slope: zero.clone(),
        });
    }
    PiecewiseLinear::new(pieces)
}

/// The step network on unit cells `[k-1, k)` with values `k * eps` — the
/// grid approximant the staircase target is measured against.
pub fn staircase_network(k: usize, eps: &Scalar, mode: Mode) -> Result<Network, ConstructError> {
    let grid: Vec<Scalar> = (0..=k).map(|i| Scalar::from_int(mode, i as i64)).collect();
    let values: Vec<Scalar> = (1..=k)
        .map(|i| &Scalar::from_int(mode, i as i64) * &eps.convert(mode))
        .collect();
    let spec = StepFunctionSpec::new(vec![grid], values)?;
    step_network(&spec, mode)
}

/// First-layer breakpoint positions of a 1D single-step network: neuron
/// `(w, b)` flips at `x = (theta - beta u0 - b) / w`.
pub fn net_breakpoints_1d(net: &Network) -> Result<Vec<Scalar>, ConstructError> {
    if net.latency() != 1 || net.input_dim() != 1 {
        return Err(ConstructError::Unsupported(
            "exact 1D error measurement needs a T=1 network on one input".into(),
        ));
    }
    let layer = &net.layers()[0];
    let mut out = Vec::new();
    for i in 0..layer.width() {
        let w = layer.weights.get(i, 0);
        if w.is_zero() {
            continue;
        }
        let z = &(&layer.threshold - &(&layer.leak * &layer.initial_potential[i])) - &layer.bias[i];
        out.push(&z / w);
    }
    Ok(crate::scalar::sort_dedup(out))
}

fn subdivision(
    net: &Network,
    target: &PiecewiseLinear,
    interval: (&Scalar, &Scalar),
) -> Result<Vec<Scalar>, ConstructError> {
    let (lo, hi) = interval;
    if lo.compare(hi) != Ordering::Less {
        return Err(ConstructError::InvalidParameter("empty interval".into()));
    }
    let (tlo, thi) = target.domain();
    if lo.compare(&tlo) == Ordering::Less || hi.compare(&thi) == Ordering::Greater {
        return Err(ConstructError::InvalidParameter(
            "interval exceeds the target's domain".into(),
        ));
    }
    let mut points = vec![lo.clone(), hi.clone()];
    for p in net_breakpoints_1d(net)?
        .into_iter()
        .chain(target.breakpoints())
    {
        if p.compare(lo) == Ordering::Greater && p.compare(hi) == Ordering::Less {
            points.push(p);
        }
    }
    Ok(crate::scalar::sort_dedup(points))
}

/// Exact supremum of `|realize - target|` over the interval. Both functions
/// are affine between consecutive breakpoints, so the supremum is attained at
/// (one-sided limits towards) subinterval endpoints.
pub fn sup_error_exact(
    net: &Network,
    target: &PiecewiseLinear,
    interval: (&Scalar, &Scalar),
) -> Result<Scalar, ConstructError> {
    let points = subdivision(net, target, interval)?;
    let mode = net.mode();
    let two = Scalar::from_int(mode, 2);
    let mut sup = Scalar::zero(mode);
    for w in points.windows(2) {
        let mid = &(&w[0] + &w[1]) / &two;
        let v = crate::snn::realize(net, std::slice::from_ref(&mid))?[0].clone();
        // target restricted to the open subinterval is one affine piece;
        // endpoint values are its one-sided limits
        let piece = target
            .pieces()
            .iter()
            .enumerate()
            .find(|(i, p)| {
                mid.compare(&p.lo) != Ordering::Less
                    && (mid.compare(&p.hi) == Ordering::Less || *i + 1 == target.pieces().len())
            })
            .map(|(_, p)| p)
            .expect("subdivision stays inside the target domain");
        for x in w {
            let dev = (&v - &piece.value_at(x)).abs();
            sup = sup.max(dev);
        }
    }
    Ok(sup)
}

/// Exact integral of `(realize - target)^2` over the interval, in closed form
/// per affine subinterval.
pub fn l2_error_exact(
    net: &Network,
    target: &PiecewiseLinear,
    interval: (&Scalar, &Scalar),
) -> Result<Scalar, ConstructError> {
    let points = subdivision(net, target, interval)?;
    let mode = net.mode();
    let two = Scalar::from_int(mode, 2);
    let three = Scalar::from_int(mode, 3);
    let mut total = Scalar::zero(mode);
    for w in points.windows(2) {
        let mid = &(&w[0] + &w[1]) / &two;
        let v = crate::snn::realize(net, std::slice::from_ref(&mid))?[0].clone();
        let piece = target
            .pieces()
            .iter()
            .enumerate()
            .find(|(i, p)| {
                mid.compare(&p.lo) != Ordering::Less
                    && (mid.compare(&p.hi) == Ordering::Less || *i + 1 == target.pieces().len())
            })
            .map(|(_, p)| p)
            .expect("subdivision stays inside the target domain");
        // integrate (c0 - s x)^2 with c0 = v - intercept, s = slope
        let c0 = &v - &piece.intercept;
        let s = &piece.slope;
        let contribution = if s.is_zero() {
            &(&c0 * &c0) * &(&w[1] - &w[0])
        } else {
            let at = |x: &Scalar| {
                let d = &c0 - &(s * x);
                &(&d * &d) * &d
            };
            &(&at(&w[0]) - &at(&w[1])) / &(&three * s)
        };
        total = &total + &contribution;
    }
    Ok(total)
}

/// Squared L2 distance between the unit staircase network's realization and
/// the staircase target on `[0, K]`; equals `K * eps^3 / 200` exactly.
pub fn staircase_l2_error(net: &Network, k: usize, eps: &Scalar) -> Result<Scalar, ConstructError> {
    let target = staircase_target(k, eps)?;
    let mode = net.mode();
    let lo = Scalar::zero(mode);
    let hi = Scalar::from_int(mode, k as i64);
    l2_error_exact(net, &target, (&lo, &hi))
}
