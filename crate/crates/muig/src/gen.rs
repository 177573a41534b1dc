//! Deterministic random representations for tests and benchmarks.
//!
//! The generator is a hand-rolled splitmix so corpora freeze across
//! platforms and releases; nothing here depends on process state.

use crate::interval::{IntervalKind, Representation, UnitInterval};
use crate::rational::Rational;

/// Splitmix generator with the usual 64-bit constants.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in `[0, bound)` by the multiply-shift reduction.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        ((u128::from(self.next_u64()) * u128::from(bound)) >> 64) as u64
    }
}

/// Parameters of one random representation.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub n: usize,
    pub seed: u64,
    /// Left endpoints land on multiples of `1 / grid_denominator`.
    pub grid_denominator: i64,
    /// Relative draw weights for the pp, pm, mp, mm kinds.
    pub kind_weights: [u32; 4],
    /// Chance that a vertex duplicates the previous left endpoint and kind.
    pub twin_rate: f64,
    /// Left endpoints range over `[0, window]`; small windows pack the
    /// line, large ones leave gaps and disconnect the graph.
    pub window: i64,
}

impl Default for GenParams {
    fn default() -> GenParams {
        GenParams {
            n: 10,
            seed: 1,
            grid_denominator: 4,
            kind_weights: [1, 1, 1, 1],
            twin_rate: 0.2,
            window: 3,
        }
    }
}

const KINDS: [IntervalKind; 4] = [
    IntervalKind::Closed,
    IntervalKind::ClosedOpen,
    IntervalKind::OpenClosed,
    IntervalKind::Open,
];

/// Draws a representation with vertex ids `0..n`.
pub fn random_representation(params: &GenParams) -> Representation {
    assert!(params.grid_denominator >= 1, "grid denominator must be positive");
    assert!(params.window >= 0, "window must be nonnegative");
    let weight_total: u64 = params.kind_weights.iter().map(|&w| u64::from(w)).sum();
    assert!(weight_total > 0, "at least one kind weight must be positive");

    let mut rng = SplitMix64::new(params.seed);
    let numerators = (params.window * params.grid_denominator + 1) as u64;
    let mut intervals: Vec<UnitInterval> = Vec::with_capacity(params.n);
    for v in 0..params.n {
        let twin = v > 0 && rng.next_f64() < params.twin_rate;
        let (kind, left) = if twin {
            let prev = &intervals[v - 1];
            (prev.kind, prev.left)
        } else {
            let mut pick = rng.next_below(weight_total);
            let mut kind = KINDS[3];
            for (k, &w) in KINDS.iter().zip(&params.kind_weights) {
                if pick < u64::from(w) {
                    kind = *k;
                    break;
                }
                pick -= u64::from(w);
            }
            let numerator = rng.next_below(numerators) as i64;
            (kind, Rational::new(numerator, params.grid_denominator))
        };
        intervals.push(UnitInterval::new(v as u32, kind, left));
    }
    Representation::new(intervals)
}

/// 500 small instances covering all kinds, twins, level contacts, gaps and
/// staircase tops. The exact parameter cycle is part of the repository's
/// test contract; tests pin a digest of the generated corpus.
pub fn corpus_params() -> Vec<GenParams> {
    let grids: [i64; 5] = [1, 2, 3, 4, 6];
    let weights: [[u32; 4]; 6] = [
        [1, 1, 1, 1],
        [3, 1, 1, 1],
        [1, 3, 3, 1],
        [5, 0, 0, 1],
        [0, 1, 1, 0],
        [1, 0, 0, 0],
    ];
    let twin_rates: [f64; 3] = [0.0, 0.15, 0.35];
    let windows: [i64; 3] = [1, 2, 3];
    (0..500)
        .map(|i| GenParams {
            n: 4 + i % 11,
            seed: (i as u64 + 1).wrapping_mul(0x9e3779b97f4a7c15),
            grid_denominator: grids[i % grids.len()],
            kind_weights: weights[i % weights.len()],
            twin_rate: twin_rates[i % twin_rates.len()],
            window: windows[i % windows.len()],
        })
        .collect()
}
