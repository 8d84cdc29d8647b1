//! Counter-based Gaussian streams: the draws for a cell are a pure function of
//! `(seed, cell index)`, so any evaluation order gives the same field.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    key: [u8; 32],
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        let mut state = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        RngStream { seed, key }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The first 128 bits of the derived key.
    pub fn stream_key(&self) -> u128 {
        u128::from_le_bytes(self.key[..16].try_into().unwrap())
    }

    /// Generator dedicated to one cell.
    pub fn cell(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }

    /// `m` independent standard normal deviates for `index`.
    pub fn normals(&self, index: u64, m: usize) -> Vec<f64> {
        let mut rng = self.cell(index);
        (0..m).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    /// `m` independent complex standard normal deviates for `index`: real and
    /// imaginary parts independent with variance 1/2 each.
    pub fn complex_normals(&self, index: u64, m: usize) -> Vec<(f64, f64)> {
        let mut rng = self.cell(index);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        (0..m)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                (re * s, im * s)
            })
            .collect()
    }
}

/// `m` real standard normal deviates for `(seed, cell_index)`.
pub fn gaussian_stream(seed: u64, cell_index: u64, m: usize) -> Vec<f64> {
    RngStream::new(seed).normals(cell_index, m)
}
