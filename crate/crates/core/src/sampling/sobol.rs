use super::joe_kuo::DIRECTION_NUMBERS;
use super::SamplingError;

/// Highest supported Sobol dimension.
pub const MAX_SOBOL_DIM: usize = 64;

const BITS: usize = 32;
const SCALE: f64 = 1.0 / (1u64 << BITS) as f64;

fn direction_vectors(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = 1 << (BITS - 1 - k);
        }
        return v;
    }
    let (s, a, m) = DIRECTION_NUMBERS[dim - 1];
    let s = s as usize;
    for k in 0..s.min(BITS) {
        v[k] = m[k] << (BITS - 1 - k);
    }
    for k in s..BITS {
        let mut x = v[k - s] ^ (v[k - s] >> s);
        for l in 1..s {
            if (a >> (s - 1 - l)) & 1 == 1 {
                x ^= v[k - l];
            }
        }
        v[k] = x;
    }
    v
}

/// Gray-code Sobol generator.
///
/// The origin (internal index 0) is never emitted: the first point produced
/// is internal index 1. State after `i` emitted points depends only on
/// `(dimension, i)`.
#[derive(Debug, Clone)]
pub struct SobolSequence {
    directions: Vec<[u32; BITS]>,
    /// Internal index of the last point folded into `state`.
    index: u64,
    state: Vec<u32>,
}

impl SobolSequence {
    pub fn new(dim: usize) -> Result<Self, SamplingError> {
        if dim == 0 || dim > MAX_SOBOL_DIM {
            return Err(SamplingError::DimensionUnsupported(dim));
        }
        Ok(Self {
            directions: (0..dim).map(direction_vectors).collect(),
            index: 0,
            state: vec![0; dim],
        })
    }

    pub fn dimension(&self) -> usize {
        self.directions.len()
    }

    /// Number of points emitted so far.
    pub fn emitted(&self) -> u64 {
        self.index
    }

    /// Jump so that the next emitted point is point `start` (0-based).
    pub fn skip_to(&mut self, start: u64) {
        self.index = start;
        let gray = start ^ (start >> 1);
        for (d, dirs) in self.directions.iter().enumerate() {
            let mut x = 0u32;
            for (bit, dv) in dirs.iter().enumerate() {
                if (gray >> bit) & 1 == 1 {
                    x ^= dv;
                }
            }
            self.state[d] = x;
        }
    }

    /// Next point in `[0, 1)^dim`.
    pub fn next_point(&mut self) -> Vec<f64> {
        self.index += 1;
        assert!(self.index < (1u64 << BITS), "Sobol index space exhausted");
        let bit = self.index.trailing_zeros() as usize;
        for (x, dirs) in self.state.iter_mut().zip(&self.directions) {
            *x ^= dirs[bit];
        }
        self.state.iter().map(|&x| f64::from(x) * SCALE).collect()
    }
}

/// `count` Sobol points starting at emitted index `start`.
pub fn sobol_points(dim: usize, start: u64, count: usize) -> Result<Vec<Vec<f64>>, SamplingError> {
    let mut seq = SobolSequence::new(dim)?;
    seq.skip_to(start);
    Ok((0..count).map(|_| seq.next_point()).collect())
}
