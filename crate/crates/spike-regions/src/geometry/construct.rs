//! Constructions that attain the region bound, plus random layers for
//! randomized sweeps.

use super::{verify_general_position, GeometryError, ParallelFamily};
use crate::matrix::Matrix;
use crate::scalar::{Mode, Scalar};
use crate::snn::{DecoderSpec, EncoderSpec, LayerParams, Network};
use crate::temporal::{neuron_partition, temporal_bound};
use num::bigint::BigInt;
use num::rational::BigRational;
use rand::Rng;

/// A first layer whose hyperplane families are in general position with the
/// maximum number of hyperplanes per neuron, wrapped as a depth-1 network on
/// two inputs.
#[derive(Debug, Clone)]
pub struct GeneralPositionLayer {
    pub network: Network,
    pub families: Vec<ParallelFamily>,
}

/// Dyadic initial potentials for which the integrator neuron (`beta = 1`,
/// `theta = 1`) attains the full quadratic partition bound; candidates are
/// enumerated coarse-to-fine so thresholds stay well separated when possible.
fn maximal_partition_potentials(count: usize, latency: usize) -> Vec<(Scalar, Vec<Scalar>)> {
    let one = Scalar::one(Mode::Exact);
    let bound = temporal_bound(latency) as usize;
    let mut found = Vec::new();
    for level in 2u32..40 {
        let denom = 1i64 << level;
        let mut numer = 1i64;
        while numer < denom && numer < 64 {
            let u0 = Scalar::ratio(Mode::Exact, numer, denom);
            if !found.iter().any(|(u, _): &(Scalar, Vec<Scalar>)| *u == u0) {
                let partition = neuron_partition(&one, &one, &u0, latency);
                if partition.region_count() == bound {
                    found.push((u0, partition.boundaries().to_vec()));
                    if found.len() == count {
                        return found;
                    }
                }
            }
            numer += 2;
        }
    }
    panic!("no dyadic initial potential attains the partition bound for T={latency}");
}

fn floor_to_eighths(x: &BigRational) -> BigRational {
    let eight = BigRational::from_integer(BigInt::from(8));
    (x * &eight).floor() / eight
}

/// Builds a two-input first layer with `n1` neurons whose parallel families
/// are in general position and each carry `(T^2 + T)/2` hyperplanes, so the
/// arrangement attains the region bound exactly. Directions are pairwise
/// non-parallel; each family is translated past every intersection point of
/// the previous ones, with the clearance doubled if a coincidence is ever
/// detected.
pub fn general_position_layer(
    n1: usize,
    latency: usize,
) -> Result<GeneralPositionLayer, GeometryError> {
    if n1 < 2 {
        return Err(GeometryError::InvalidParameter(
            "general-position construction needs n1 >= 2".into(),
        ));
    }
    if latency == 0 {
        return Err(GeometryError::InvalidParameter(
            "latency must be >= 1".into(),
        ));
    }
    let mode = Mode::Exact;
    let temporal = maximal_partition_potentials(n1, latency);

    let mut families: Vec<ParallelFamily> = Vec::new();
    let mut points: Vec<(BigRational, BigRational)> = Vec::new();
    let mut biases: Vec<Scalar> = Vec::new();
    for (k, (_, thresholds)) in temporal.iter().enumerate() {
        let slope = BigInt::from(k as i64);
        let dot_of = |p: &(BigRational, BigRational)| -> BigRational { &p.0 + &(&p.1 * &slope) };
        let max_dot = points.iter().map(dot_of).max();
        let min_threshold = thresholds
            .first()
            .expect("latency >= 1 yields at least one threshold")
            .as_rational()
            .expect("exact construction")
            .clone();
        let mut clearance = BigRational::new(BigInt::from(1), BigInt::from(8));
        let bias = loop {
            let base = match &max_dot {
                Some(m) => floor_to_eighths(&(&min_threshold - m)),
                None => floor_to_eighths(&min_threshold),
            };
            let candidate = base - &clearance;
            // offsets z* - bias all exceed every existing <w, p>; a
            // coincidence would mean some point lies on a new line
            let hit = points.iter().any(|p| {
                let d = dot_of(p);
                thresholds
                    .iter()
                    .any(|z| z.as_rational().expect("exact") - &candidate == d)
            });
            if !hit {
                break candidate;
            }
            clearance = &clearance * BigRational::from_integer(BigInt::from(2));
        };
        let bias_scalar = Scalar::Exact(bias.clone());
        let offsets: Vec<Scalar> = thresholds.iter().map(|z| z - &bias_scalar).collect();
        let family = ParallelFamily {
            direction: vec![Scalar::from_int(mode, 1), Scalar::from_int(mode, k as i64)],
            offsets,
        };
        // extend the intersection-point set with the new family's crossings
        for prev in &families {
            let prev_slope = prev.direction[1].as_rational().unwrap().clone();
            for c_new in &family.offsets {
                for c_old in &prev.offsets {
                    // x + k y = c_new, x + k' y = c_old
                    let cn = c_new.as_rational().unwrap();
                    let co = c_old.as_rational().unwrap();
                    let det = BigRational::from_integer(slope.clone()) - &prev_slope;
                    let y = (cn - co) / &det;
                    let x = cn - &(&y * &slope);
                    points.push((x, y));
                }
            }
        }
        families.push(family);
        biases.push(bias_scalar);
    }

    if !verify_general_position(&families)? {
        return Err(GeometryError::InvalidParameter(
            "construction failed the general-position certificate".into(),
        ));
    }

    let weights = Matrix::from_rows(
        families
            .iter()
            .map(|f| f.direction.clone())
            .collect::<Vec<_>>(),
    );
    let layer = LayerParams {
        weights,
        bias: biases,
        initial_potential: temporal.iter().map(|(u, _)| u.clone()).collect(),
        leak: Scalar::one(mode),
        threshold: Scalar::one(mode),
    };
    let network = Network::new(
        vec![layer],
        latency,
        EncoderSpec::Direct,
        DecoderSpec::Count,
        mode,
    )?;
    Ok(GeneralPositionLayer { network, families })
}

fn dyadic(rng: &mut impl Rng, lo: i64, hi: i64, denom: i64) -> Scalar {
    Scalar::ratio(Mode::Exact, rng.gen_range(lo..=hi), denom)
}

fn random_layer(rng: &mut impl Rng, width: usize, fan_in: usize) -> LayerParams {
    let rows = (0..width)
        .map(|_| (0..fan_in).map(|_| dyadic(rng, -64, 64, 32)).collect())
        .collect();
    LayerParams {
        weights: Matrix::from_rows(rows),
        bias: (0..width).map(|_| dyadic(rng, -64, 64, 32)).collect(),
        initial_potential: (0..width).map(|_| dyadic(rng, -64, 64, 64)).collect(),
        leak: dyadic(rng, 0, 64, 64),
        threshold: dyadic(rng, 1, 128, 64),
    }
}

/// A random shallow network with dyadic exact parameters (losslessly
/// convertible to float mode).
pub fn random_first_layer(rng: &mut impl Rng, n_in: usize, n1: usize, latency: usize) -> Network {
    let layer = random_layer(rng, n1, n_in);
    Network::new(
        vec![layer],
        latency,
        EncoderSpec::Direct,
        DecoderSpec::Count,
        Mode::Exact,
    )
    .expect("random parameters are valid")
}

/// A random two-layer network with a random affine read-out.
pub fn random_two_layer(
    rng: &mut impl Rng,
    n_in: usize,
    n1: usize,
    n2: usize,
    latency: usize,
) -> Network {
    let first = random_layer(rng, n1, n_in);
    let second = random_layer(rng, n2, n1);
    let decoder = DecoderSpec::MembranePotential {
        time_weights: vec![Scalar::one(Mode::Exact); latency],
        output_weights: Matrix::from_rows(vec![(0..n2)
            .map(|_| dyadic(rng, -64, 64, 32))
            .collect()]),
        output_bias: vec![dyadic(rng, -64, 64, 32)],
    };
    Network::new(
        vec![first, second],
        latency,
        EncoderSpec::Direct,
        decoder,
        Mode::Exact,
    )
    .expect("random parameters are valid")
}
