//! Input-space region analysis: per-neuron parallel hyperplane families,
//! closed-form region bounds, exact 2D arrangement counting and sampling
//! estimators.

mod arrangement;
mod construct;
mod sampling;

pub use arrangement::{
    cell_complex_2d, count_and_complex_2d, count_exact_2d, verify_general_position, CellComplex2D,
    CellGeometry,
};
pub use construct::{
    general_position_layer, random_first_layer, random_two_layer, GeneralPositionLayer,
};
pub use sampling::{halton_points, sample_patterns};

use crate::scalar::Scalar;
use crate::snn::Network;
use crate::temporal::neuron_partition;
use num::BigUint;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("operation requires a 2-dimensional input space, got {0}")]
    NotTwoDimensional(usize),
    #[error("operation requires exact rational arithmetic")]
    ExactModeRequired,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Network(#[from] crate::snn::NetworkError),
}

/// The parallel hyperplanes `{x : <direction, x> = offset}` contributed by
/// one neuron; offsets are strictly increasing and deduplicated.
#[derive(Debug, Clone)]
pub struct ParallelFamily {
    pub direction: Vec<Scalar>,
    pub offsets: Vec<Scalar>,
}

/// Maximum number of hyperplanes a single latency-`T` neuron contributes:
/// `(T^2 + T) / 2` (one less than its maximum region count).
pub fn hyperplanes_per_neuron(latency: usize) -> u64 {
    crate::temporal::temporal_bound(latency) - 1
}

/// Hyperplane families of the first hidden layer: neuron `k` with weight row
/// `w_k != 0` contributes planes `<w_k, x> = z* - b_k` for every boundary
/// `z*` of its temporal partition. Zero-weight neurons are constant on all of
/// input space and contribute no planes.
pub fn first_layer_families(net: &Network) -> Vec<ParallelFamily> {
    let layer = &net.layers()[0];
    let mut families = Vec::new();
    for k in 0..layer.width() {
        let w: Vec<Scalar> = layer.weights.row(k).to_vec();
        if w.iter().all(Scalar::is_zero) {
            continue;
        }
        let partition = neuron_partition(
            &layer.leak,
            &layer.threshold,
            &layer.initial_potential[k],
            net.latency(),
        );
        let offsets = partition
            .boundaries()
            .iter()
            .map(|z| z - &layer.bias[k])
            .collect();
        families.push(ParallelFamily {
            direction: w,
            offsets,
        });
    }
    families
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Upper bound on the regions cut out of `R^d` by `n` families of at most
/// `k` parallel hyperplanes each: `sum_{i=0}^{d} k^i C(n, i)`.
pub fn r_regions_closed(n: u64, d: u64, k: u64) -> BigUint {
    let mut total = BigUint::from(0u32);
    for i in 0..=d {
        total += BigUint::from(k).pow(i as u32) * binomial(n, i);
    }
    total
}

/// Same bound by the deletion-restriction recursion
/// `r(n, d) = r(n-1, d) + k * r(n-1, d-1)` with `r(0, d) = 1`.
pub fn r_regions_recursive(n: u64, d: u64, k: u64) -> BigUint {
    fn rec(
        n: u64,
        d: u64,
        k: u64,
        memo: &mut std::collections::HashMap<(u64, u64), BigUint>,
    ) -> BigUint {
        if n == 0 {
            return BigUint::from(1u32);
        }
        if let Some(v) = memo.get(&(n, d)) {
            return v.clone();
        }
        let mut v = rec(n - 1, d, k, memo);
        if d > 0 {
            v += BigUint::from(k) * rec(n - 1, d - 1, k, memo);
        }
        memo.insert((n, d), v.clone());
        v
    }
    rec(n, d, k, &mut std::collections::HashMap::new())
}

/// Tight upper bound on the number of activation (and hence constant)
/// regions of a network with `n1` first-layer neurons, input dimension
/// `n_in` and latency `T`.
pub fn count_bound(n1: usize, n_in: usize, latency: usize) -> BigUint {
    assert!(n1 >= 1 && n_in >= 1 && latency >= 1);
    if n1 >= n_in {
        r_regions_closed(n1 as u64, n_in as u64, hyperplanes_per_neuron(latency))
    } else {
        BigUint::from(crate::temporal::temporal_bound(latency)).pow(n1 as u32)
    }
}

/// How a region count was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountMethod {
    Exact2d,
    Sampled(usize),
}

impl std::fmt::Display for CountMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CountMethod::Exact2d => write!(f, "exact2d"),
            CountMethod::Sampled(n) => write!(f, "sampled({n})"),
        }
    }
}

/// Region counts of one network: distinct spike patterns per layer
/// (cumulative over all time steps), distinct decoded outputs, and — in
/// exact 2D mode — connected constant regions after merging adjacent equal
/// cells.
#[derive(Debug, Clone)]
pub struct CountReport {
    pub layer_pattern_counts: Vec<u64>,
    pub distinct_outputs: u64,
    pub connected_constant_regions: Option<u64>,
    pub bound: BigUint,
    pub method: CountMethod,
    pub seed: Option<u64>,
}

/// A cell with its representative point, layer pattern and decoded output.
#[derive(Debug, Clone)]
pub struct AnnotatedCell {
    pub representative: (Scalar, Scalar),
    pub pattern: String,
    pub output: Vec<Scalar>,
}

/// A clipped cell complex annotated with per-cell patterns and outputs.
#[derive(Debug, Clone)]
pub struct RegionAnalysis {
    pub report: CountReport,
    pub cells: Vec<AnnotatedCell>,
    pub adjacency: Vec<(usize, usize)>,
}

struct DisjointSets(Vec<usize>);

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets((0..n).collect())
    }

    fn find(&mut self, i: usize) -> usize {
        if self.0[i] != i {
            let root = self.find(self.0[i]);
            self.0[i] = root;
        }
        self.0[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// Builds the first-layer cell complex clipped to `clip`, evaluates the
/// cumulative spike pattern through layer `layer` (1-based; the decoded
/// output when `layer` equals the depth) at every cell representative, and
/// counts distinct patterns, distinct outputs and connected constant
/// regions. Exact mode only.
pub fn constant_regions_2d(
    net: &Network,
    clip: &crate::domain::BoxDomain,
    layer: usize,
) -> Result<RegionAnalysis, GeometryError> {
    if net.input_dim() != 2 {
        return Err(GeometryError::NotTwoDimensional(net.input_dim()));
    }
    if net.mode() != crate::scalar::Mode::Exact || clip.mode() != crate::scalar::Mode::Exact {
        return Err(GeometryError::ExactModeRequired);
    }
    if layer == 0 || layer > net.depth() {
        return Err(GeometryError::InvalidParameter(format!(
            "layer {layer} outside 1..={}",
            net.depth()
        )));
    }
    let families = first_layer_families(net);
    let complex = cell_complex_2d(&families, clip)?;
    let at_output = layer == net.depth();

    let mut traces = Vec::with_capacity(complex.cells.len());
    for cell in &complex.cells {
        let x = [
            Scalar::from_rational(cell.representative.0.clone()),
            Scalar::from_rational(cell.representative.1.clone()),
        ];
        traces.push(crate::snn::simulate(net, &x)?);
    }

    let mut layer_pattern_counts = Vec::with_capacity(layer);
    for l in 0..layer {
        let distinct: std::collections::HashSet<&[bool]> =
            traces.iter().map(|t| t.layers[l].spikes.bits()).collect();
        layer_pattern_counts.push(distinct.len() as u64);
    }

    let outputs: Vec<Vec<Scalar>> = traces
        .iter()
        .map(|t| crate::snn::decode_for(net, t.output_spikes()))
        .collect();
    let output_keys: Vec<String> = outputs
        .iter()
        .map(|o| {
            o.iter()
                .map(Scalar::to_repr_string)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let distinct_outputs = output_keys
        .iter()
        .collect::<std::collections::HashSet<_>>()
        .len() as u64;

    // merge adjacent cells carrying the same value
    let merge_keys: Vec<String> = if at_output {
        output_keys.clone()
    } else {
        traces
            .iter()
            .map(|t| t.layers[layer - 1].spikes.bit_string())
            .collect()
    };
    let mut sets = DisjointSets::new(complex.cells.len());
    for &(a, b) in &complex.adjacency {
        if merge_keys[a] == merge_keys[b] {
            sets.union(a, b);
        }
    }
    let components = {
        let mut roots = std::collections::HashSet::new();
        for i in 0..complex.cells.len() {
            roots.insert(sets.find(i));
        }
        roots.len() as u64
    };

    let report = CountReport {
        layer_pattern_counts,
        distinct_outputs,
        connected_constant_regions: Some(components),
        bound: count_bound(net.layers()[0].width(), 2, net.latency()),
        method: CountMethod::Exact2d,
        seed: None,
    };
    let cells = complex
        .cells
        .iter()
        .zip(&traces)
        .zip(&outputs)
        .map(|((cell, trace), output)| AnnotatedCell {
            representative: (
                Scalar::from_rational(cell.representative.0.clone()),
                Scalar::from_rational(cell.representative.1.clone()),
            ),
            pattern: trace.layers[layer - 1].spikes.bit_string(),
            output: output.clone(),
        })
        .collect();
    Ok(RegionAnalysis {
        report,
        cells,
        adjacency: complex.adjacency,
    })
}
