//! Seeded random streams.
//!
//! All randomness goes through ChaCha8 (`rand_chacha::ChaCha8Rng`), a 64-bit
//! seeded counter-mode generator. Independent purposes (problem generation,
//! starting points, search loops) draw from distinct ChaCha streams of the
//! same seed, so changing how many numbers one consumer draws never shifts
//! another consumer's values. Output is reproducible within this crate; it
//! is not meant to match any other implementation bit for bit.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Stream used by [`crate::problems::generate_quadratic`].
pub const PROBLEM_STREAM: u64 = 0;
/// Stream used for starting points.
pub const START_STREAM: u64 = 1;
/// Stream used for randomized searches (witness hunts, sweeps).
pub const SEARCH_STREAM: u64 = 2;

pub fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn normal_vector<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| StandardNormal.sample(rng))
}

pub fn normal_matrix<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}
