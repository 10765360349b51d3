//! Low-discrepancy sampling estimator for pattern and output counts in any
//! input dimension. Sampled counts are lower bounds on the true counts.

use super::{count_bound, CountMethod, CountReport, GeometryError};
use crate::domain::BoxDomain;
use crate::scalar::{Mode, Scalar};
use crate::snn::Network;
use num::bigint::BigInt;
use num::rational::BigRational;
use std::collections::HashSet;

const HALTON_BASES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Radical-inverse of `index` in the given base, as a `num/den` pair.
fn radical_inverse(mut index: u64, base: u64) -> (u64, u64) {
    let mut num = 0u64;
    let mut den = 1u64;
    while index > 0 {
        num = num * base + index % base;
        den *= base;
        index /= base;
    }
    (num, den)
}

fn halton_coord(mode: Mode, index: u64, base: u64, rotation: u64) -> Scalar {
    let (num, den) = radical_inverse(index, base);
    match mode {
        Mode::Float => {
            let x = num as f64 / den as f64 + rotation as f64 / 2f64.powi(32);
            Scalar::Float(x.fract())
        }
        Mode::Exact => {
            let mut x = BigRational::new(BigInt::from(num), BigInt::from(den))
                + BigRational::new(BigInt::from(rotation), BigInt::from(1u64 << 32));
            if x >= BigRational::from_integer(BigInt::from(1)) {
                x -= BigRational::from_integer(BigInt::from(1));
            }
            Scalar::Exact(x)
        }
    }
}

/// The first `count` points of a seeded (rotated) Halton sequence scaled to
/// the box. Deterministic for a fixed `(seed, mode, box)`.
pub fn halton_points(domain: &BoxDomain, count: usize, seed: u64) -> Vec<Vec<Scalar>> {
    let dim = domain.dim();
    assert!(dim <= HALTON_BASES.len(), "dimension too large for sampler");
    let mode = domain.mode();
    let mut state = seed;
    let rotations: Vec<u64> = (0..dim).map(|_| splitmix64(&mut state) >> 32).collect();
    (0..count)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let unit = halton_coord(mode, i as u64 + 1, HALTON_BASES[j], rotations[j]);
                    &domain.lo()[j] + &(&unit * &domain.side(j))
                })
                .collect()
        })
        .collect()
}

/// Simulates the network on quasi-uniform sample points and counts distinct
/// cumulative spike patterns per layer (up to `layer`) plus distinct decoded
/// outputs. All reported counts are lower bounds on the true region counts.
pub fn sample_patterns(
    net: &Network,
    domain: &BoxDomain,
    samples: usize,
    layer: usize,
    seed: u64,
) -> Result<CountReport, GeometryError> {
    if samples == 0 {
        return Err(GeometryError::InvalidParameter(
            "need at least one sample".into(),
        ));
    }
    if layer == 0 || layer > net.depth() {
        return Err(GeometryError::InvalidParameter(format!(
            "layer {layer} outside 1..={}",
            net.depth()
        )));
    }
    if domain.dim() != net.input_dim() {
        return Err(GeometryError::InvalidParameter(
            "sampling box dimension differs from the input dimension".into(),
        ));
    }
    let domain = domain.convert(net.mode());
    let mut pattern_sets: Vec<HashSet<Vec<bool>>> = vec![HashSet::new(); layer];
    let mut outputs: HashSet<String> = HashSet::new();
    for point in halton_points(&domain, samples, seed) {
        let trace = crate::snn::simulate(net, &point)?;
        for (l, set) in pattern_sets.iter_mut().enumerate() {
            set.insert(trace.layers[l].spikes.bits().to_vec());
        }
        let out = crate::snn::decode_for(net, trace.output_spikes());
        outputs.insert(
            out.iter()
                .map(Scalar::to_repr_string)
                .collect::<Vec<_>>()
                .join(","),
        );
    }
    Ok(CountReport {
        layer_pattern_counts: pattern_sets.iter().map(|s| s.len() as u64).collect(),
        distinct_outputs: outputs.len() as u64,
        connected_constant_regions: None,
        bound: count_bound(net.layers()[0].width(), net.input_dim(), net.latency()),
        method: CountMethod::Sampled(samples),
        seed: Some(seed),
    })
}
