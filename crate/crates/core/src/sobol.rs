//! Sobol low-discrepancy points.
//!
//! Direction numbers are the first rows of Joe & Kuo's `new-joe-kuo-6.21201`
//! table. The optional scramble is a random digital shift (an XOR of every
//! coordinate with a per-dimension key), which keeps the net structure of the
//! base sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const BITS: usize = 32;

/// (degree s, coefficient a, initial m_1..m_s) for dimensions 2, 3, ...
const DIRECTIONS: &[(u32, u32, &[u32])] = &[
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
    (5, 4, &[1, 1, 5, 5, 5]),
    (5, 7, &[1, 1, 7, 11, 19]),
    (5, 11, &[1, 1, 5, 1, 1]),
    (5, 13, &[1, 1, 1, 3, 11]),
    (5, 14, &[1, 3, 5, 5, 31]),
    (6, 1, &[1, 3, 3, 9, 7, 49]),
    (6, 13, &[1, 1, 1, 15, 21, 21]),
    (6, 16, &[1, 3, 1, 13, 27, 49]),
    (6, 19, &[1, 1, 1, 15, 7, 5]),
    (6, 22, &[1, 3, 1, 15, 13, 25]),
    (6, 25, &[1, 1, 5, 5, 19, 61]),
    (7, 1, &[1, 3, 7, 11, 23, 15, 103]),
    (7, 4, &[1, 3, 7, 13, 13, 15, 69]),
];

/// Largest supported dimension.
pub const MAX_DIMENSION: usize = DIRECTIONS.len() + 1;

fn direction_vectors(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = 1 << (BITS - 1 - i);
        }
        return v;
    }
    let (s, a, m) = DIRECTIONS[dim - 1];
    let s = s as usize;
    for i in 0..s.min(BITS) {
        v[i] = m[i] << (BITS - 1 - i);
    }
    for i in s..BITS {
        let mut x = v[i - s] ^ (v[i - s] >> s);
        for k in 1..s {
            if (a >> (s - 1 - k)) & 1 == 1 {
                x ^= v[i - k];
            }
        }
        v[i] = x;
    }
    v
}

/// Gray-code Sobol generator. The all-zero first point is skipped, so the
/// one-dimensional sequence starts 0.5, 0.75, 0.25, ...
#[derive(Debug, Clone)]
pub struct Sobol {
    directions: Vec<[u32; BITS]>,
    state: Vec<u32>,
    shift: Vec<u32>,
    index: u32,
}

impl Sobol {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIMENSION {
            return Err(Error::Unsupported(format!(
                "Sobol dimension {dim} outside 1..={MAX_DIMENSION}"
            )));
        }
        Ok(Self {
            directions: (0..dim).map(direction_vectors).collect(),
            state: vec![0; dim],
            shift: vec![0; dim],
            index: 0,
        })
    }

    /// Digitally shifted sequence keyed by `seed`.
    pub fn scrambled(dim: usize, seed: u64) -> Result<Self> {
        let mut s = Self::new(dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        s.shift = (0..dim).map(|_| rng.gen()).collect();
        Ok(s)
    }

    pub fn dimension(&self) -> usize {
        self.directions.len()
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let c = self.index.trailing_ones() as usize;
        self.index = self.index.wrapping_add(1);
        for (x, v) in self.state.iter_mut().zip(&self.directions) {
            *x ^= v[c.min(BITS - 1)];
        }
        self.state
            .iter()
            .zip(&self.shift)
            .map(|(x, s)| f64::from(x ^ s) / 4_294_967_296.0)
            .collect()
    }

    pub fn take_points(&mut self, n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|_| self.next_point()).collect()
    }
}

/// First `n` points of the scrambled `d`-dimensional sequence.
pub fn sobol_init(n: usize, d: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    Ok(Sobol::scrambled(d, seed)?.take_points(n))
}
