use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::LogSample;

use super::maxent::MaxEntDistribution;

/// Generator for stream `stream` under `master`. Streams of one master seed
/// are independent, so environments can be simulated in any order or in
/// parallel.
pub fn stream_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// IID draws of `(w, r)` atoms.
#[derive(Debug, Clone)]
pub struct Sampler {
    atoms: Vec<(f64, f64)>,
    index: WeightedIndex<f64>,
}

impl Sampler {
    pub fn new(dist: &MaxEntDistribution) -> Result<Self> {
        let index = WeightedIndex::new(&dist.probs)
            .map_err(|e| Error::InfeasibleMoments(format!("invalid probabilities: {e}")))?;
        Ok(Self {
            atoms: dist.atoms.clone(),
            index,
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> LogSample {
        let (w, r) = self.atoms[self.index.sample(rng)];
        LogSample::new(w, r)
    }
}

/// `n` draws determined entirely by `(seed, n)`.
pub fn sample_stream(dist: &MaxEntDistribution, seed: u64, n: usize) -> Result<Vec<LogSample>> {
    let sampler = Sampler::new(dist)?;
    let mut rng = stream_rng(seed, 0);
    Ok((0..n).map(|_| sampler.draw(&mut rng)).collect())
}
