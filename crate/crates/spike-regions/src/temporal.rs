//! Per-neuron temporal partition: how a single first-layer neuron splits its
//! pre-activation axis `z = <w, x> + b` into intervals with distinct spike
//! patterns.
//!
//! At step `t` with spike history `(s(1), ..., s(t-1))`, the neuron fires iff
//! `z >= z*` where
//!
//! ```text
//! z*(t, h) = (-beta^t u0 + theta * (1 + sum_{i=1}^{t-1} beta^i h_{t-i}))
//!            / sum_{i=0}^{t-1} beta^i
//! ```
//!
//! Refining the axis by these thresholds, a latency-`T` neuron produces at
//! most `(T^2 + T + 2) / 2` intervals: each step splits at most one interval
//! per spike-count class, never one per history.

use crate::scalar::{Mode, Scalar};
use crate::snn::heaviside;
use std::cmp::Ordering;

/// Firing threshold of step `t` given the spike history of steps
/// `1..t` (length `t - 1`). The neuron fires at `t` iff `z >= z*`.
pub fn shift_value(
    t: usize,
    history: &[bool],
    beta: &Scalar,
    theta: &Scalar,
    u0: &Scalar,
) -> Scalar {
    assert!(t >= 1, "time step must be >= 1");
    assert_eq!(history.len(), t - 1, "history length must be t - 1");
    assert!(
        !beta.is_negative() && !(beta - &Scalar::one(beta.mode())).is_positive(),
        "leak beta must lie in [0, 1]"
    );
    assert!(theta.is_positive(), "threshold theta must be positive");
    let mode = beta.mode();
    let mut weighted_history = Scalar::zero(mode);
    // s(t - i) carries weight beta^i, i = 1..t-1
    for i in 1..t {
        if history[t - i - 1] {
            weighted_history = &weighted_history + &beta.pow(i as u32);
        }
    }
    let numer =
        &(-&(&beta.pow(t as u32) * u0)) + &(theta * &(&Scalar::one(mode) + &weighted_history));
    let mut denom = Scalar::zero(mode);
    for i in 0..t {
        denom = &denom + &beta.pow(i as u32);
    }
    &numer / &denom
}

/// Maximum number of distinct spike patterns a single neuron can produce
/// over `T` steps: `(T^2 + T + 2) / 2`.
pub fn temporal_bound(latency: usize) -> u64 {
    let t = latency as u64;
    (t * t + t + 2) / 2
}

/// Scalar recurrence oracle: simulates one neuron directly on the
/// pre-activation value `z` and returns its spike pattern.
pub fn pattern_oracle(
    z: &Scalar,
    beta: &Scalar,
    theta: &Scalar,
    u0: &Scalar,
    latency: usize,
) -> Vec<bool> {
    let mut u = u0.clone();
    let mut bits = Vec::with_capacity(latency);
    for _ in 0..latency {
        let decayed = &(beta * &u) + z;
        let arg = &decayed - theta;
        let fired = heaviside(&arg);
        bits.push(fired);
        u = if fired { arg } else { decayed };
    }
    bits
}

/// Partition of the pre-activation axis into maximal intervals of constant
/// spike pattern. Interval `i` is `[boundaries[i-1], boundaries[i])` with the
/// unbounded ends implied; each boundary belongs to the interval on its right
/// (`H(0) = 1`).
#[derive(Debug, Clone)]
pub struct TemporalPartition {
    boundaries: Vec<Scalar>,
    patterns: Vec<Vec<bool>>,
}

impl TemporalPartition {
    pub fn region_count(&self) -> usize {
        self.patterns.len()
    }

    pub fn boundaries(&self) -> &[Scalar] {
        &self.boundaries
    }

    pub fn patterns(&self) -> &[Vec<bool>] {
        &self.patterns
    }

    /// Lower/upper endpoint of interval `i`; `None` encodes the unbounded side.
    pub fn interval(&self, i: usize) -> (Option<&Scalar>, Option<&Scalar>) {
        let lo = if i == 0 {
            None
        } else {
            Some(&self.boundaries[i - 1])
        };
        let hi = self.boundaries.get(i);
        (lo, hi)
    }

    /// Pattern of the interval containing `z`.
    pub fn pattern_at(&self, z: &Scalar) -> &[bool] {
        // first interval whose lower bound is > z, minus one
        let mut idx = 0;
        for b in &self.boundaries {
            if z.compare(b) == Ordering::Less {
                break;
            }
            idx += 1;
        }
        &self.patterns[idx]
    }

    /// CSV rows `interval_lo,interval_hi,pattern` with `-inf`/`inf` for the
    /// unbounded ends.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("interval_lo,interval_hi,pattern\n");
        for (i, pattern) in self.patterns.iter().enumerate() {
            let (lo, hi) = self.interval(i);
            let lo = lo.map_or("-inf".to_string(), Scalar::to_repr_string);
            let hi = hi.map_or("inf".to_string(), Scalar::to_repr_string);
            let bits: String = pattern.iter().map(|&b| if b { '1' } else { '0' }).collect();
            out.push_str(&format!("{lo},{hi},{bits}\n"));
        }
        out
    }
}

/// Event-driven interval refinement. Starting from one unbounded interval
/// with empty history, step `t` inserts each live interval's firing threshold
/// `z*(t, history)`: strictly interior thresholds split the interval (left
/// half silent, right half incl. the threshold firing), otherwise the bit is
/// forced. In float mode a threshold within `1e-9` of an endpoint counts as
/// coincident and forces the bit.
pub fn neuron_partition(
    beta: &Scalar,
    theta: &Scalar,
    u0: &Scalar,
    latency: usize,
) -> TemporalPartition {
    assert!(latency >= 1, "latency must be >= 1");
    let float_mode = beta.mode() == Mode::Float;
    let mode = beta.mode();
    // geometric prefix sums 1 + beta + ... + beta^(t-1) and the powers beta^t
    let mut beta_pow = Vec::with_capacity(latency + 1);
    let mut denom = Vec::with_capacity(latency + 1);
    beta_pow.push(Scalar::one(mode));
    denom.push(Scalar::zero(mode));
    for t in 1..=latency {
        denom.push(&denom[t - 1] + &beta_pow[t - 1]);
        beta_pow.push(&beta_pow[t - 1] * beta);
    }
    // (lower bound, pattern so far, beta-weighted history sum); the weighted
    // sum W = sum_i beta^i h_{t-i} updates as W <- beta * (W + bit)
    let mut intervals: Vec<(Option<Scalar>, Vec<bool>, Scalar)> =
        vec![(None, Vec::new(), Scalar::zero(mode))];
    for t in 1..=latency {
        let mut next: Vec<(Option<Scalar>, Vec<bool>, Scalar)> =
            Vec::with_capacity(intervals.len() + t);
        for idx in 0..intervals.len() {
            let (lo, bits, w_sum) = &intervals[idx];
            let hi = intervals
                .get(idx + 1)
                .map(|(l, _, _)| l.clone().expect("inner bound"));
            let numer = &(-&(&beta_pow[t] * u0)) + &(theta * &(&Scalar::one(mode) + w_sum));
            let z_star = &numer / &denom[t];
            let coincides_lo = lo.as_ref().is_some_and(|l| {
                if float_mode {
                    z_star.approx_eq(l)
                } else {
                    z_star == *l
                }
            });
            let coincides_hi = hi.as_ref().is_some_and(|h| {
                if float_mode {
                    z_star.approx_eq(h)
                } else {
                    z_star == *h
                }
            });
            let below = lo
                .as_ref()
                .is_some_and(|l| z_star.compare(l) != Ordering::Greater);
            let above = hi
                .as_ref()
                .is_some_and(|h| z_star.compare(h) != Ordering::Less);
            let fired_sum = beta * &(w_sum + &Scalar::one(mode));
            let silent_sum = beta * w_sum;
            if coincides_lo || (below && !coincides_hi) {
                // every z in [lo, hi) satisfies z >= z*: forced spike
                let mut fired = bits.clone();
                fired.push(true);
                next.push((lo.clone(), fired, fired_sum));
            } else if coincides_hi || above {
                // no z in [lo, hi) reaches z*: forced silence
                let mut silent = bits.clone();
                silent.push(false);
                next.push((lo.clone(), silent, silent_sum));
            } else {
                let mut left = bits.clone();
                left.push(false);
                let mut right = bits.clone();
                right.push(true);
                next.push((lo.clone(), left, silent_sum));
                next.push((Some(z_star), right, fired_sum));
            }
        }
        intervals = next;
    }
    let boundaries = intervals
        .iter()
        .skip(1)
        .map(|(lo, _, _)| lo.clone().expect("inner bound"))
        .collect();
    let patterns = intervals.into_iter().map(|(_, bits, _)| bits).collect();
    TemporalPartition {
        boundaries,
        patterns,
    }
}

/// One row of the realized shift trajectory for a fixed pre-activation `z`.
#[derive(Debug, Clone)]
pub struct ShiftRow {
    /// Time step, 1-based.
    pub step: usize,
    /// Firing threshold `z*` seen at this step.
    pub threshold: Scalar,
    /// Whether the neuron fired at this step.
    pub fired: bool,
    /// Spike history entering this step.
    pub history: Vec<bool>,
    /// Earliest previous step with the same threshold value, if any.
    pub repeat_of: Option<usize>,
}

/// Threshold sequence along the trajectory actually visited for a fixed `z`,
/// with exact repetition detection (tolerance-based in float mode).
pub fn realized_shifts(
    z: &Scalar,
    beta: &Scalar,
    theta: &Scalar,
    u0: &Scalar,
    latency: usize,
) -> Vec<ShiftRow> {
    let mut history: Vec<bool> = Vec::new();
    let mut rows: Vec<ShiftRow> = Vec::with_capacity(latency);
    for t in 1..=latency {
        let threshold = shift_value(t, &history, beta, theta, u0);
        let fired = heaviside(&(z - &threshold));
        let repeat_of = rows
            .iter()
            .find(|r| r.threshold.approx_eq(&threshold))
            .map(|r| r.step);
        rows.push(ShiftRow {
            step: t,
            threshold,
            fired,
            history: history.clone(),
            repeat_of,
        });
        history.push(fired);
    }
    rows
}
