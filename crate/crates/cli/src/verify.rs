//! Parallel front end to the compatibility harness.

use losc_core::compat::{
    check_conjugator, h_ball, sample_conjugators, Compat, CompatReport, Direction, PerfectCompat, RipsCompat,
};
use losc_core::constructions::{PerfectGroup, RipsOutput};
use losc_core::words::{enumerate_ball, substitute, Letter, SignedLetter, Word};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Which conjugators to test.
#[derive(Clone, Debug)]
pub struct Sampling {
    /// Every reduced word of length at most this over the domain letters.
    pub radius: usize,
    pub samples: usize,
    /// Length cap for sampled conjugators; `None` is `max |h_i| + 3`.
    pub max_len: Option<usize>,
    pub structured: bool,
    pub seed: u64,
}

/// One direction (and, for the HNN case, one domain order).
#[derive(Clone, Debug)]
pub struct Run {
    pub direction: Direction,
    pub order: Option<u8>,
    pub report: CompatReport,
}

/// Every reduced word of length `≤ radius` in `letters`.
pub fn ball_over(letters: &[Letter], radius: usize) -> Vec<Word> {
    let images: Vec<Word> = letters.iter().map(|&l| Word::letter(SignedLetter::new(l, true))).collect();
    enumerate_ball(letters.len(), radius).map(|w| substitute(&w, &images)).collect()
}

/// Runs `ctx` over `conjugators`, merging in input order.
pub fn verify_parallel<C: Compat + Sync>(ctx: &C, conjugators: &[Word], h_depth: usize) -> CompatReport {
    let hs = h_ball(&ctx.map(), h_depth);
    let records: Vec<_> = conjugators.par_iter().map(|g| check_conjugator(ctx, g, &hs)).collect();
    let mut report = CompatReport::default();
    for rec in records {
        report.absorb("", rec, false);
    }
    report
}

fn conjugators<R: rand::Rng>(
    rng: &mut R,
    sampling: &Sampling,
    letters: &[Letter],
    gens: &[Word],
    structured: Vec<Word>,
) -> Vec<Word> {
    let mut out = if sampling.structured { structured } else { Vec::new() };
    out.extend(ball_over(letters, sampling.radius));
    let max_len = sampling.max_len.unwrap_or_else(|| gens.iter().map(Word::len).max().unwrap_or(0) + 3);
    out.extend(sample_conjugators(rng, letters, gens, sampling.samples, max_len));
    out
}

pub fn verify_perfect(p: &PerfectGroup, directions: &[Direction], sampling: &Sampling, h_depth: usize) -> Vec<Run> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    directions
        .iter()
        .map(|&direction| {
            let ctx = PerfectCompat::new(p, direction);
            let gens: Vec<Word> = ctx.sides.dom.iter().map(|o| o.word.clone()).collect();
            let structured = ctx.structured(&mut rng);
            let gs = conjugators(&mut rng, sampling, &ctx.letters(), &gens, structured);
            Run { direction, order: None, report: verify_parallel(&ctx, &gs, h_depth) }
        })
        .collect()
}

pub fn verify_rips(
    r: &RipsOutput,
    directions: &[Direction],
    orders: &[u8],
    sampling: &Sampling,
    h_depth: usize,
) -> Vec<Run> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let mut runs = Vec::new();
    for &direction in directions {
        for &j in orders {
            let ctx = RipsCompat::new(r, direction, j);
            let gens: Vec<Word> = ctx.sides.dom.iter().map(|o| o.word.clone()).collect();
            let structured = ctx.structured(&mut rng);
            let gs = conjugators(&mut rng, sampling, &ctx.letters(), &gens, structured);
            runs.push(Run { direction, order: Some(j), report: verify_parallel(&ctx, &gs, h_depth) });
        }
    }
    runs
}

/// Pairs with `τ_j(h) ≠ τ_{3−j}(k)` for some `j`.
pub fn tau_transport_failures(r: &RipsOutput) -> Vec<usize> {
    r.pairs
        .iter()
        .filter(|p| [1u8, 2].iter().any(|&j| r.layout.order(j).tau(&p.h) != r.layout.order(3 - j).tau(&p.k)))
        .map(|p| p.index)
        .collect()
}

/// Pairs with `τ(h) ≠ τ(k)` under `a < b < c < d`.
pub fn perfect_tau_failures(p: &PerfectGroup) -> Vec<usize> {
    let t = p.order();
    (0..p.map.len()).filter(|&i| t.tau(&p.map.domain[i]) != t.tau(&p.map.codomain[i])).collect()
}
