//! Discrete-time leaky integrate-and-fire network model and its exact
//! forward simulation.
//!
//! Per layer and time step, with `H` the Heaviside step (`H(z) = 1` iff
//! `z >= 0`, so the boundary case fires):
//!
//! ```text
//! s(t) = H(beta * u(t-1) + W s_prev(t) + b - theta)
//! u(t) = beta * u(t-1) + W s_prev(t) + b - theta * s(t)
//! ```
//!
//! Inputs are statically encoded (the analog vector is fed unchanged at every
//! step); outputs are decoded from the final layer's spike train.

use crate::matrix::{dot, Matrix};
use crate::scalar::{Mode, Scalar};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Heaviside step with the boundary convention `H(0) = 1`.
pub fn heaviside(z: &Scalar) -> bool {
    !z.is_negative()
}

/// Weights, bias, initial membrane potential, leak and threshold of one layer.
#[derive(Debug, Clone)]
pub struct LayerParams {
    pub weights: Matrix,
    pub bias: Vec<Scalar>,
    pub initial_potential: Vec<Scalar>,
    pub leak: Scalar,
    pub threshold: Scalar,
}

impl LayerParams {
    pub fn width(&self) -> usize {
        self.weights.rows()
    }

    pub fn fan_in(&self) -> usize {
        self.weights.cols()
    }

    fn validate(&self, mode: Mode) -> Result<(), NetworkError> {
        let n = self.width();
        if self.bias.len() != n || self.initial_potential.len() != n {
            return Err(NetworkError::DimensionMismatch(format!(
                "layer width {n} but bias has {} and u0 has {} entries",
                self.bias.len(),
                self.initial_potential.len()
            )));
        }
        if self.leak.is_negative() || (&self.leak - &Scalar::one(mode)).is_positive() {
            return Err(NetworkError::InvalidParameter(format!(
                "leak beta={} outside [0, 1]",
                self.leak
            )));
        }
        if !self.threshold.is_positive() {
            return Err(NetworkError::InvalidParameter(format!(
                "threshold theta={} must be positive",
                self.threshold
            )));
        }
        for s in self
            .weights
            .iter()
            .chain(self.bias.iter())
            .chain(self.initial_potential.iter())
            .chain([&self.leak, &self.threshold])
        {
            if s.mode() != mode {
                return Err(NetworkError::InvalidParameter(
                    "layer mixes exact and float scalars".into(),
                ));
            }
            if let Scalar::Float(v) = s {
                if !v.is_finite() {
                    return Err(NetworkError::InvalidParameter(
                        "non-finite parameter".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn convert(&self, mode: Mode) -> LayerParams {
        LayerParams {
            weights: self.weights.convert(mode),
            bias: self.bias.iter().map(|s| s.convert(mode)).collect(),
            initial_potential: self
                .initial_potential
                .iter()
                .map(|s| s.convert(mode))
                .collect(),
            leak: self.leak.convert(mode),
            threshold: self.threshold.convert(mode),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncoderSpec {
    /// Feed the analog input unchanged at every time step.
    Direct,
}

/// Named transform applied to first-spike times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeTransform {
    Reciprocal,
    Identity,
}

#[derive(Debug, Clone)]
pub enum DecoderSpec {
    /// Affine read-out `sum_t a_t (V s(t) + c)`.
    MembranePotential {
        time_weights: Vec<Scalar>,
        output_weights: Matrix,
        output_bias: Vec<Scalar>,
    },
    /// Per-neuron spike average over time, in `[0, 1]`.
    Rate,
    /// Per-neuron spike count, in `{0, ..., T}`.
    Count,
    /// Transform of the earliest firing time, `silent_value` if no spike.
    FirstSpikeTime {
        silent_value: Scalar,
        transform: TimeTransform,
    },
}

impl DecoderSpec {
    /// Default read-out used by the compilers: `a = (1,...,1)`, output `V s + c`.
    pub fn membrane_potential(
        latency: usize,
        output_weights: Matrix,
        output_bias: Vec<Scalar>,
        mode: Mode,
    ) -> Self {
        DecoderSpec::MembranePotential {
            time_weights: vec![Scalar::one(mode); latency],
            output_weights,
            output_bias,
        }
    }

    /// Default first-spike decoder: silent neurons map to `T + 1`, times are inverted.
    pub fn first_spike_time(latency: usize, mode: Mode) -> Self {
        DecoderSpec::FirstSpikeTime {
            silent_value: Scalar::from_int(mode, latency as i64 + 1),
            transform: TimeTransform::Reciprocal,
        }
    }

    pub fn output_dim(&self, last_width: usize) -> usize {
        match self {
            DecoderSpec::MembranePotential { output_weights, .. } => output_weights.rows(),
            _ => last_width,
        }
    }

    fn convert(&self, mode: Mode) -> DecoderSpec {
        match self {
            DecoderSpec::MembranePotential {
                time_weights,
                output_weights,
                output_bias,
            } => DecoderSpec::MembranePotential {
                time_weights: time_weights.iter().map(|s| s.convert(mode)).collect(),
                output_weights: output_weights.convert(mode),
                output_bias: output_bias.iter().map(|s| s.convert(mode)).collect(),
            },
            DecoderSpec::Rate => DecoderSpec::Rate,
            DecoderSpec::Count => DecoderSpec::Count,
            DecoderSpec::FirstSpikeTime {
                silent_value,
                transform,
            } => DecoderSpec::FirstSpikeTime {
                silent_value: silent_value.convert(mode),
                transform: *transform,
            },
        }
    }
}

/// Binary spike trains of one layer: `neurons x steps`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpikeTrain {
    neurons: usize,
    steps: usize,
    bits: Vec<bool>,
}

impl SpikeTrain {
    pub fn zeros(neurons: usize, steps: usize) -> Self {
        SpikeTrain {
            neurons,
            steps,
            bits: vec![false; neurons * steps],
        }
    }

    pub fn from_bits(neurons: usize, steps: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), neurons * steps);
        SpikeTrain {
            neurons,
            steps,
            bits,
        }
    }

    pub fn neurons(&self) -> usize {
        self.neurons
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn get(&self, neuron: usize, step: usize) -> bool {
        self.bits[neuron * self.steps + step]
    }

    pub fn set(&mut self, neuron: usize, step: usize, v: bool) {
        self.bits[neuron * self.steps + step] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// One row per neuron, e.g. `"010|110"` for 2 neurons and 3 steps.
    pub fn bit_string(&self) -> String {
        (0..self.neurons)
            .map(|i| {
                (0..self.steps)
                    .map(|t| if self.get(i, t) { '1' } else { '0' })
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("|")
    }

    pub fn to_matrix(&self, mode: Mode) -> Matrix {
        let mut m = Matrix::zeros(mode, self.neurons, self.steps);
        for i in 0..self.neurons {
            for t in 0..self.steps {
                if self.get(i, t) {
                    m.set(i, t, Scalar::one(mode));
                }
            }
        }
        m
    }
}

/// Spikes and membrane potentials of one layer; potentials include `u(0)`.
#[derive(Debug, Clone)]
pub struct LayerTrace {
    pub spikes: SpikeTrain,
    /// `width x (T + 1)`, column 0 is the initial potential.
    pub potentials: Matrix,
}

#[derive(Debug, Clone)]
pub struct SimulationTrace {
    pub layers: Vec<LayerTrace>,
}

impl SimulationTrace {
    pub fn output_spikes(&self) -> &SpikeTrain {
        &self.layers.last().expect("at least one layer").spikes
    }

    /// Re-derives every layer from the recurrence and compares; exact
    /// equality in both modes since the recomputation is bit-identical.
    pub fn replay_matches(&self, net: &Network, input: &Matrix) -> bool {
        match simulate_train(net, input) {
            Ok(fresh) => {
                fresh.layers.len() == self.layers.len()
                    && fresh
                        .layers
                        .iter()
                        .zip(&self.layers)
                        .all(|(a, b)| a.spikes == b.spikes && a.potentials == b.potentials)
            }
            Err(_) => false,
        }
    }
}

/// A full discrete-time LIF network: layer parameters, latency and codecs.
#[derive(Debug, Clone)]
pub struct Network {
    layers: Vec<LayerParams>,
    latency: usize,
    encoder: EncoderSpec,
    decoder: DecoderSpec,
    mode: Mode,
}

impl Network {
    pub fn new(
        layers: Vec<LayerParams>,
        latency: usize,
        encoder: EncoderSpec,
        decoder: DecoderSpec,
        mode: Mode,
    ) -> Result<Self, NetworkError> {
        if latency == 0 {
            return Err(NetworkError::InvalidParameter(
                "latency T must be >= 1".into(),
            ));
        }
        if layers.is_empty() {
            return Err(NetworkError::InvalidParameter(
                "network needs at least one layer".into(),
            ));
        }
        let mut prev = layers[0].fan_in();
        for (idx, layer) in layers.iter().enumerate() {
            layer.validate(mode)?;
            if layer.fan_in() != prev {
                return Err(NetworkError::DimensionMismatch(format!(
                    "layer {idx} expects fan-in {prev} but has {}",
                    layer.fan_in()
                )));
            }
            prev = layer.width();
        }
        match &decoder {
            DecoderSpec::MembranePotential {
                time_weights,
                output_weights,
                output_bias,
            } => {
                if time_weights.len() != latency {
                    return Err(NetworkError::DimensionMismatch(format!(
                        "decoder has {} time weights for latency {latency}",
                        time_weights.len()
                    )));
                }
                if output_weights.cols() != prev {
                    return Err(NetworkError::DimensionMismatch(format!(
                        "decoder matrix has {} columns for last layer width {prev}",
                        output_weights.cols()
                    )));
                }
                if output_bias.len() != output_weights.rows() {
                    return Err(NetworkError::DimensionMismatch(
                        "decoder bias length differs from decoder rows".into(),
                    ));
                }
                for s in time_weights
                    .iter()
                    .chain(output_weights.iter())
                    .chain(output_bias.iter())
                {
                    if s.mode() != mode {
                        return Err(NetworkError::InvalidParameter(
                            "decoder mixes arithmetic modes".into(),
                        ));
                    }
                }
            }
            DecoderSpec::FirstSpikeTime {
                silent_value,
                transform,
            } => {
                if silent_value.mode() != mode {
                    return Err(NetworkError::InvalidParameter(
                        "decoder mixes arithmetic modes".into(),
                    ));
                }
                if *transform == TimeTransform::Reciprocal && silent_value.is_zero() {
                    return Err(NetworkError::InvalidParameter(
                        "reciprocal transform with silent value 0".into(),
                    ));
                }
            }
            DecoderSpec::Rate | DecoderSpec::Count => {}
        }
        Ok(Network {
            layers,
            latency,
            encoder,
            decoder,
            mode,
        })
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn latency(&self) -> usize {
        self.latency
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn encoder(&self) -> &EncoderSpec {
        &self.encoder
    }

    pub fn decoder(&self) -> &DecoderSpec {
        &self.decoder
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].fan_in()
    }

    pub fn output_dim(&self) -> usize {
        self.decoder.output_dim(self.layers.last().unwrap().width())
    }

    /// Same network re-expressed in the other arithmetic mode.
    pub fn convert(&self, mode: Mode) -> Network {
        Network {
            layers: self.layers.iter().map(|l| l.convert(mode)).collect(),
            latency: self.latency,
            encoder: self.encoder.clone(),
            decoder: self.decoder.convert(mode),
            mode,
        }
    }
}

/// Repeats `x` in every column: the static (direct) input encoding.
pub fn encode_direct(x: &[Scalar], latency: usize) -> Matrix {
    assert!(latency >= 1, "latency must be >= 1");
    let mode = x.first().map_or(Mode::Exact, Scalar::mode);
    let mut m = Matrix::zeros(mode, x.len(), latency);
    for (i, v) in x.iter().enumerate() {
        for t in 0..latency {
            m.set(i, t, v.clone());
        }
    }
    m
}

/// Runs the recurrence on an already-encoded input time series
/// (`input_dim x T`, entries may be analog).
pub fn simulate_train(net: &Network, input: &Matrix) -> Result<SimulationTrace, NetworkError> {
    if input.rows() != net.input_dim() || input.cols() != net.latency {
        return Err(NetworkError::DimensionMismatch(format!(
            "input is {}x{}, network expects {}x{}",
            input.rows(),
            input.cols(),
            net.input_dim(),
            net.latency
        )));
    }
    for s in input.iter() {
        if s.mode() != net.mode {
            return Err(NetworkError::InvalidParameter(
                "input mode differs from network mode".into(),
            ));
        }
    }
    let latency = net.latency;
    let mut prev = input.clone();
    let mut layers = Vec::with_capacity(net.layers.len());
    for layer in &net.layers {
        let n = layer.width();
        let mut potentials = Matrix::zeros(net.mode, n, latency + 1);
        for i in 0..n {
            potentials.set(i, 0, layer.initial_potential[i].clone());
        }
        let mut spikes = SpikeTrain::zeros(n, latency);
        for t in 0..latency {
            for i in 0..n {
                let mut acc = Scalar::zero(net.mode);
                for (j, w) in layer.weights.row(i).iter().enumerate() {
                    acc = &acc + &(w * prev.get(j, t));
                }
                let drive = &acc + &layer.bias[i];
                let decayed = &(&layer.leak * potentials.get(i, t)) + &drive;
                let arg = &decayed - &layer.threshold;
                let fired = heaviside(&arg);
                spikes.set(i, t, fired);
                // reset by subtraction: u(t) = decayed - theta * s(t)
                potentials.set(i, t + 1, if fired { arg } else { decayed });
            }
        }
        prev = spikes.to_matrix(net.mode);
        layers.push(LayerTrace { spikes, potentials });
    }
    Ok(SimulationTrace { layers })
}

/// Encodes `x` and runs the network.
pub fn simulate(net: &Network, x: &[Scalar]) -> Result<SimulationTrace, NetworkError> {
    if x.len() != net.input_dim() {
        return Err(NetworkError::DimensionMismatch(format!(
            "input has {} entries, network expects {}",
            x.len(),
            net.input_dim()
        )));
    }
    simulate_train(net, &encode_direct(x, net.latency))
}

/// Applies the output decoding to a final-layer spike train.
pub fn decode(spec: &DecoderSpec, train: &SpikeTrain) -> Vec<Scalar> {
    match spec {
        DecoderSpec::MembranePotential {
            time_weights,
            output_weights,
            output_bias,
        } => {
            assert_eq!(
                time_weights.len(),
                train.steps(),
                "decoder/latency mismatch"
            );
            let mode = time_weights
                .first()
                .map_or_else(|| output_bias[0].mode(), Scalar::mode);
            let n_out = output_weights.rows();
            let spikes = train.to_matrix(mode);
            let mut out = vec![Scalar::zero(mode); n_out];
            for (t, a_t) in time_weights.iter().enumerate() {
                let column = spikes.column(t);
                for (k, o) in out.iter_mut().enumerate() {
                    let term = &dot(output_weights.row(k), &column) + &output_bias[k];
                    *o = &*o + &(a_t * &term);
                }
            }
            out
        }
        DecoderSpec::Rate => {
            let t = train.steps() as i64;
            (0..train.neurons())
                .map(|i| {
                    let count = (0..train.steps()).filter(|&s| train.get(i, s)).count() as i64;
                    Scalar::ratio(Mode::Exact, count, t)
                })
                .collect()
        }
        DecoderSpec::Count => (0..train.neurons())
            .map(|i| {
                let count = (0..train.steps()).filter(|&s| train.get(i, s)).count() as i64;
                Scalar::from_int(Mode::Exact, count)
            })
            .collect(),
        DecoderSpec::FirstSpikeTime {
            silent_value,
            transform,
        } => (0..train.neurons())
            .map(|i| {
                let first = (0..train.steps()).find(|&s| train.get(i, s));
                let raw = match first {
                    Some(s) => Scalar::from_int(silent_value.mode(), s as i64 + 1),
                    None => silent_value.clone(),
                };
                match transform {
                    TimeTransform::Identity => raw,
                    TimeTransform::Reciprocal => &Scalar::one(raw.mode()) / &raw,
                }
            })
            .collect(),
    }
}

/// End-to-end realization: encode, simulate, decode.
pub fn realize(net: &Network, x: &[Scalar]) -> Result<Vec<Scalar>, NetworkError> {
    let trace = simulate(net, x)?;
    Ok(decode_for(net, trace.output_spikes()))
}

/// Decodes with the network's own decoder, keeping rate/count outputs in the
/// network's arithmetic mode.
pub fn decode_for(net: &Network, train: &SpikeTrain) -> Vec<Scalar> {
    decode(&net.decoder, train)
        .into_iter()
        .map(|s| s.convert(net.mode))
        .collect()
}

/// One layer of the time-unrolled threshold network: the weight matrix is
/// block diagonal (`W` repeated `T` times on the vectorized spike train) and
/// the bias at step `t` is `beta * u(t-1) + b - theta`, which depends on the
/// spike history through the membrane potential.
#[derive(Debug, Clone)]
pub struct UnrolledLayer {
    pub weights: Matrix,
    pub bias: Vec<Scalar>,
    pub leak: Scalar,
    pub threshold: Scalar,
    pub initial_potential: Vec<Scalar>,
    pub width: usize,
}

impl UnrolledLayer {
    /// Bias of the flattened threshold unit `(t, i)` given the potential
    /// carried into step `t`.
    pub fn bias_at(&self, i: usize, potential: &Scalar) -> Scalar {
        &(&(&self.leak * potential) + &self.bias[i]) - &self.threshold
    }
}

#[derive(Debug, Clone)]
pub struct UnrolledNetwork {
    pub layers: Vec<UnrolledLayer>,
    pub latency: usize,
    pub mode: Mode,
}

/// Flattens the temporal dimension into space: per layer a
/// `(n*T) x (n_prev*T)` block-diagonal weight matrix plus history-dependent
/// biases. Evaluation reproduces [`simulate`] bit for bit.
pub fn unroll_to_heaviside(net: &Network) -> UnrolledNetwork {
    let t = net.latency();
    let layers = net
        .layers()
        .iter()
        .map(|layer| {
            let n = layer.width();
            let p = layer.fan_in();
            let mut big = Matrix::zeros(net.mode(), n * t, p * t);
            for block in 0..t {
                for i in 0..n {
                    for j in 0..p {
                        big.set(
                            block * n + i,
                            block * p + j,
                            layer.weights.get(i, j).clone(),
                        );
                    }
                }
            }
            UnrolledLayer {
                weights: big,
                bias: layer.bias.clone(),
                leak: layer.leak.clone(),
                threshold: layer.threshold.clone(),
                initial_potential: layer.initial_potential.clone(),
                width: n,
            }
        })
        .collect();
    UnrolledNetwork {
        layers,
        latency: net.latency(),
        mode: net.mode(),
    }
}

impl UnrolledNetwork {
    /// Evaluates the flat threshold network on an encoded input
    /// (`input_dim x T`). The weight contribution comes from one
    /// block-diagonal matrix-vector product per layer; biases are rolled
    /// forward step by step because they depend on spike history.
    pub fn eval(&self, input: &Matrix) -> Vec<SpikeTrain> {
        let t = self.latency;
        assert_eq!(input.cols(), t, "input latency mismatch");
        // time-major vectorization: entry t*p + j is neuron j at step t
        let mut prev: Vec<Scalar> = (0..t).flat_map(|step| input.column(step)).collect();
        let mut out = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let n = layer.width;
            let rows = n * t;
            let mut drive: Vec<Scalar> = Vec::with_capacity(rows);
            for r in 0..rows {
                drive.push(dot(layer.weights.row(r), &prev));
            }
            let mut potential = layer.initial_potential.clone();
            let mut spikes = SpikeTrain::zeros(n, t);
            for step in 0..t {
                for i in 0..n {
                    let weighted = &drive[step * n + i] + &layer.bias[i];
                    let decayed = &(&layer.leak * &potential[i]) + &weighted;
                    let arg = &decayed - &layer.threshold;
                    let fired = heaviside(&arg);
                    spikes.set(i, step, fired);
                    potential[i] = if fired { arg } else { decayed };
                }
            }
            let as_matrix = spikes.to_matrix(self.mode);
            prev = (0..t).flat_map(|step| as_matrix.column(step)).collect();
            out.push(spikes);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(v: i64) -> Scalar {
        Scalar::from_int(Mode::Exact, v)
    }

    fn exact_ratio(n: i64, d: i64) -> Scalar {
        Scalar::ratio(Mode::Exact, n, d)
    }

    fn single_neuron_net(
        beta: Scalar,
        theta: Scalar,
        u0: Scalar,
        w: Scalar,
        b: Scalar,
        latency: usize,
    ) -> Network {
        let mode = beta.mode();
        let layer = LayerParams {
            weights: Matrix::from_rows(vec![vec![w]]),
            bias: vec![b],
            initial_potential: vec![u0],
            leak: beta,
            threshold: theta,
        };
        Network::new(
            vec![layer],
            latency,
            EncoderSpec::Direct,
            DecoderSpec::Count,
            mode,
        )
        .unwrap()
    }

    #[test]
    fn encode_direct_repeats_columns() {
        let x = vec![exact_ratio(7, 10)];
        let m = encode_direct(&x, 3);
        assert_eq!(m.rows(), 1);
        assert_eq!(m.cols(), 3);
        for t in 0..3 {
            assert_eq!(m.get(0, t), &exact_ratio(7, 10));
        }

        let z = vec![exact(0), exact(0)];
        let m = encode_direct(&z, 1);
        assert_eq!((m.rows(), m.cols()), (2, 1));

        let v = vec![exact(1), exact(-2)];
        let m = encode_direct(&v, 2);
        assert_eq!(m.get(1, 0), &exact(-2));
        assert_eq!(m.get(1, 1), &exact(-2));
    }

    #[test]
    fn integrator_neuron_spike_pattern() {
        // beta=1, theta=1, u0=0, w=1, b=0, x=0.7: u accumulates 0.7 per step
        // and loses 1 per spike -> (0,1,1,0,1)
        let net = single_neuron_net(exact(1), exact(1), exact(0), exact(1), exact(0), 5);
        let trace = simulate(&net, &[exact_ratio(7, 10)]).unwrap();
        let bits: Vec<bool> = (0..5).map(|t| trace.output_spikes().get(0, t)).collect();
        assert_eq!(bits, vec![false, true, true, false, true]);
    }

    #[test]
    fn memoryless_neuron_fires_on_boundary() {
        // beta=0, x=1, w=1, b=0, theta=1: argument is exactly 0 and H(0)=1
        let net = single_neuron_net(exact(0), exact(1), exact_ratio(9, 2), exact(1), exact(0), 3);
        let trace = simulate(&net, &[exact(1)]).unwrap();
        let bits: Vec<bool> = (0..3).map(|t| trace.output_spikes().get(0, t)).collect();
        assert_eq!(bits, vec![true, true, true]);
    }

    #[test]
    fn replay_invariant_holds() {
        let net = single_neuron_net(
            exact_ratio(4, 5),
            exact(1),
            exact_ratio(1, 4),
            exact(1),
            exact_ratio(-1, 8),
            6,
        );
        let input = encode_direct(&[exact_ratio(7, 10)], 6);
        let trace = simulate_train(&net, &input).unwrap();
        assert!(trace.replay_matches(&net, &input));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let net = single_neuron_net(exact(1), exact(1), exact(0), exact(1), exact(0), 2);
        assert!(matches!(
            simulate(&net, &[exact(1), exact(2)]),
            Err(NetworkError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn decode_rate_count_and_potential() {
        let train = SpikeTrain::from_bits(1, 4, vec![true, false, true, false]);
        assert_eq!(decode(&DecoderSpec::Rate, &train), vec![exact_ratio(1, 2)]);

        let train = SpikeTrain::from_bits(1, 3, vec![true, true, false]);
        assert_eq!(decode(&DecoderSpec::Count, &train), vec![exact(2)]);

        // V=0, c=3, a=(1,1): constant 6 regardless of the spikes
        let spec = DecoderSpec::MembranePotential {
            time_weights: vec![exact(1), exact(1)],
            output_weights: Matrix::from_rows(vec![vec![exact(0)]]),
            output_bias: vec![exact(3)],
        };
        let train = SpikeTrain::from_bits(1, 2, vec![true, false]);
        assert_eq!(decode(&spec, &train), vec![exact(6)]);
        let train = SpikeTrain::from_bits(1, 2, vec![false, false]);
        assert_eq!(decode(&spec, &train), vec![exact(6)]);
    }

    #[test]
    fn decode_first_spike_time() {
        let spec = DecoderSpec::first_spike_time(4, Mode::Exact);
        let train = SpikeTrain::from_bits(
            2,
            4,
            vec![false, true, true, false, false, false, false, false],
        );
        let out = decode(&spec, &train);
        assert_eq!(out[0], exact_ratio(1, 2)); // first spike at t=2
        assert_eq!(out[1], exact_ratio(1, 5)); // silent -> 1/(T+1)
    }

    #[test]
    fn decoder_is_affine_in_spikes() {
        // superposition: flipping one bit changes the output by the same
        // amount regardless of the base train
        let spec = DecoderSpec::MembranePotential {
            time_weights: vec![exact(1), exact(2), exact(-1)],
            output_weights: Matrix::from_rows(vec![vec![exact(3), exact(-2)]]),
            output_bias: vec![exact_ratio(1, 2)],
        };
        let base_a = SpikeTrain::from_bits(2, 3, vec![false, false, false, false, false, false]);
        let base_b = SpikeTrain::from_bits(2, 3, vec![true, false, true, false, true, false]);
        for neuron in 0..2 {
            for step in 0..3 {
                let mut a1 = base_a.clone();
                a1.set(neuron, step, true);
                let mut b1 = base_b.clone();
                let was = b1.get(neuron, step);
                b1.set(neuron, step, !was);
                let delta_a = &decode(&spec, &a1)[0] - &decode(&spec, &base_a)[0];
                let mut delta_b = &decode(&spec, &b1)[0] - &decode(&spec, &base_b)[0];
                if was {
                    delta_b = -delta_b;
                }
                assert_eq!(delta_a, delta_b, "neuron {neuron} step {step}");
            }
        }
    }

    #[test]
    fn zero_decoder_realizes_zero() {
        let layer = LayerParams {
            weights: Matrix::from_rows(vec![vec![exact(2)]]),
            bias: vec![exact(0)],
            initial_potential: vec![exact(0)],
            leak: exact(1),
            threshold: exact(1),
        };
        let decoder = DecoderSpec::MembranePotential {
            time_weights: vec![exact(1), exact(1)],
            output_weights: Matrix::from_rows(vec![vec![exact(0)]]),
            output_bias: vec![exact(0)],
        };
        let net = Network::new(vec![layer], 2, EncoderSpec::Direct, decoder, Mode::Exact).unwrap();
        for x in [-3, 0, 5] {
            assert_eq!(realize(&net, &[exact(x)]).unwrap(), vec![exact(0)]);
        }
    }

    #[test]
    fn positive_rescaling_preserves_spikes() {
        // multiplying (W, b, u0, theta) of a layer by c > 0 rescales the
        // membrane argument without changing its sign
        let net = single_neuron_net(
            exact_ratio(3, 4),
            exact(1),
            exact_ratio(1, 8),
            exact_ratio(5, 4),
            exact_ratio(-1, 2),
            7,
        );
        let c = exact_ratio(7, 3);
        let scaled_layer = LayerParams {
            weights: Matrix::from_rows(vec![vec![&c * &exact_ratio(5, 4)]]),
            bias: vec![&c * &exact_ratio(-1, 2)],
            initial_potential: vec![&c * &exact_ratio(1, 8)],
            leak: exact_ratio(3, 4),
            threshold: &c * &exact(1),
        };
        let scaled = Network::new(
            vec![scaled_layer],
            7,
            EncoderSpec::Direct,
            DecoderSpec::Count,
            Mode::Exact,
        )
        .unwrap();
        for x in [exact_ratio(7, 10), exact_ratio(-2, 5), exact(2)] {
            let a = simulate(&net, &[x.clone()]).unwrap();
            let b = simulate(&scaled, &[x]).unwrap();
            assert_eq!(a.output_spikes(), b.output_spikes());
        }
    }

    #[test]
    fn dyadic_networks_agree_across_modes() {
        // dyadic parameters are exactly representable as doubles, so the two
        // arithmetic modes produce identical spike trains
        let net = single_neuron_net(
            exact_ratio(3, 4),
            exact_ratio(9, 8),
            exact_ratio(-5, 16),
            exact_ratio(7, 4),
            exact_ratio(1, 32),
            9,
        );
        let float_net = net.convert(Mode::Float);
        for k in -12..=12i64 {
            let x = exact_ratio(k, 8);
            let a = simulate(&net, std::slice::from_ref(&x)).unwrap();
            let b = simulate(&float_net, &[x.convert(Mode::Float)]).unwrap();
            assert_eq!(a.output_spikes(), b.output_spikes(), "x = {k}/8");
        }
    }

    #[test]
    fn unroll_block_diagonal_structure() {
        // identity gadget, n=1, T=2: weight block (1 + eps) on the diagonal
        let eps = exact_ratio(1, 4);
        let w = &exact(1) + &eps;
        let net = single_neuron_net(exact(1), exact(1), exact(0), w.clone(), exact(0), 2);
        let unrolled = unroll_to_heaviside(&net);
        let big = &unrolled.layers[0].weights;
        assert_eq!((big.rows(), big.cols()), (2, 2));
        assert_eq!(big.get(0, 0), &w);
        assert_eq!(big.get(1, 1), &w);
        assert_eq!(big.get(0, 1), &exact(0));
        assert_eq!(big.get(1, 0), &exact(0));
    }

    #[test]
    fn unroll_t1_is_plain_threshold_network() {
        let net = single_neuron_net(exact_ratio(1, 2), exact(2), exact(0), exact(3), exact(1), 1);
        let unrolled = unroll_to_heaviside(&net);
        let layer = &unrolled.layers[0];
        // with u0 = 0 the single bias is b - theta
        assert_eq!(layer.bias_at(0, &exact(0)), exact(-1));
        let input = encode_direct(&[exact_ratio(2, 3)], 1);
        let spikes = unrolled.eval(&input);
        let trace = simulate_train(&net, &input).unwrap();
        assert_eq!(&spikes[0], trace.output_spikes());
    }
}
