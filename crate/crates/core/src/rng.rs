//! Seeded random streams.
//!
//! All randomness comes from ChaCha20, a counter-based generator: a
//! `(seed, stream)` pair names an independent sequence, so parallel work
//! that derives its stream from its index reproduces regardless of
//! scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub type StreamRng = ChaCha20Rng;

pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fills `out` with standard normal variates (Marsaglia polar method).
pub fn fill_standard_normal<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let mut chunks = out.chunks_exact_mut(2);
    for pair in &mut chunks {
        let (a, b) = polar_pair(rng);
        pair[0] = a;
        pair[1] = b;
    }
    if let [last] = chunks.into_remainder() {
        *last = polar_pair(rng).0;
    }
}

fn polar_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    loop {
        let u = 2.0 * rng.gen::<f64>() - 1.0;
        let v = 2.0 * rng.gen::<f64>() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            let f = (-2.0 * s.ln() / s).sqrt();
            return (u * f, v * f);
        }
    }
}
