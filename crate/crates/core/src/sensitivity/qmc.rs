//! Seeded, scrambled Sobol' low-discrepancy sequence.
//!
//! Direction numbers come from the Joe & Kuo `new-joe-kuo-6` tables. Each
//! dimension's generator matrix is scrambled with a random lower-triangular
//! binary matrix (linear matrix scramble) and every point receives a random
//! digital shift, both drawn from a ChaCha stream keyed by the seed. Points
//! are addressable by index, so any slice of the sequence can be generated
//! independently of the others.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const BITS: usize = 32;
const SCALE: f64 = 1.0 / 4_294_967_296.0;

/// `(degree s, polynomial coefficients a, initial direction integers m_1..m_s)`
/// for dimensions 2 through 64.
#[rustfmt::skip]
static JOE_KUO: [(u32, u32, &[u32]); 63] = [
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
    (7, 7, &[1, 1, 3, 13, 7, 35, 63]),
    (7, 8, &[1, 3, 5, 9, 1, 25, 53]),
    (7, 14, &[1, 3, 1, 13, 9, 35, 107]),
    (7, 19, &[1, 3, 1, 5, 27, 61, 31]),
    (7, 21, &[1, 1, 5, 11, 19, 41, 61]),
    (7, 28, &[1, 3, 5, 3, 3, 13, 69]),
    (7, 31, &[1, 1, 7, 13, 1, 19, 1]),
    (7, 32, &[1, 3, 7, 5, 13, 19, 59]),
    (7, 37, &[1, 1, 3, 9, 25, 29, 41]),
    (7, 41, &[1, 3, 5, 13, 23, 1, 55]),
    (7, 42, &[1, 3, 7, 3, 13, 59, 17]),
    (7, 50, &[1, 3, 1, 3, 5, 53, 69]),
    (7, 55, &[1, 1, 5, 5, 23, 33, 13]),
    (7, 56, &[1, 1, 7, 7, 1, 61, 123]),
    (7, 59, &[1, 1, 7, 9, 13, 61, 49]),
    (7, 62, &[1, 3, 3, 5, 3, 55, 33]),
    (8, 14, &[1, 3, 1, 15, 31, 13, 49, 245]),
    (8, 21, &[1, 3, 5, 15, 31, 59, 63, 97]),
    (8, 22, &[1, 3, 1, 11, 11, 11, 77, 249]),
    (8, 38, &[1, 3, 1, 11, 27, 43, 71, 9]),
    (8, 47, &[1, 1, 7, 15, 21, 11, 81, 45]),
    (8, 49, &[1, 3, 7, 3, 25, 31, 65, 79]),
    (8, 50, &[1, 3, 1, 1, 19, 11, 3, 205]),
    (8, 52, &[1, 1, 5, 9, 19, 21, 29, 157]),
    (8, 56, &[1, 3, 7, 11, 1, 33, 89, 185]),
    (8, 67, &[1, 3, 3, 3, 15, 9, 79, 71]),
    (8, 70, &[1, 3, 7, 11, 15, 39, 119, 27]),
    (8, 84, &[1, 1, 3, 1, 11, 31, 97, 225]),
    (8, 97, &[1, 1, 1, 3, 23, 43, 57, 177]),
    (8, 103, &[1, 3, 7, 7, 17, 17, 37, 71]),
    (8, 115, &[1, 3, 1, 5, 27, 63, 123, 213]),
    (8, 122, &[1, 1, 3, 5, 11, 43, 53, 133]),
    (9, 8, &[1, 3, 5, 5, 29, 17, 47, 173, 479]),
    (9, 13, &[1, 3, 3, 11, 3, 1, 109, 9, 69]),
    (9, 16, &[1, 1, 1, 5, 17, 39, 23, 5, 343]),
    (9, 22, &[1, 3, 1, 5, 25, 15, 31, 103, 499]),
    (9, 25, &[1, 1, 1, 11, 11, 17, 63, 105, 183]),
    (9, 44, &[1, 1, 5, 11, 9, 29, 97, 231, 363]),
    (9, 47, &[1, 1, 5, 15, 19, 45, 41, 7, 383]),
    (9, 52, &[1, 3, 7, 7, 31, 19, 83, 137, 221]),
    (9, 55, &[1, 1, 1, 3, 23, 15, 111, 223, 83]),
    (9, 59, &[1, 1, 5, 13, 31, 15, 55, 25, 161]),
    (9, 62, &[1, 1, 3, 13, 25, 47, 39, 87, 257]),
];

/// Highest dimension supported by the embedded tables.
pub const MAX_DIMENSIONS: usize = JOE_KUO.len() + 1;

#[derive(Debug, Clone)]
pub struct ScrambledSobol {
    directions: Vec<[u32; BITS]>,
    shifts: Vec<u32>,
}

impl ScrambledSobol {
    pub fn new(dims: usize, seed: u64) -> Result<Self> {
        Self::build(dims, Some(seed))
    }

    /// The plain (unscrambled) sequence; point 0 is the origin.
    pub fn unscrambled(dims: usize) -> Result<Self> {
        Self::build(dims, None)
    }

    fn build(dims: usize, seed: Option<u64>) -> Result<Self> {
        if dims == 0 || dims > MAX_DIMENSIONS {
            return Err(Error::validation(
                "dimensions",
                format!("Sobol generator supports 1..={MAX_DIMENSIONS} dimensions, got {dims}"),
            ));
        }
        let mut directions: Vec<[u32; BITS]> = (0..dims).map(direction_numbers).collect();
        let mut shifts = vec![0u32; dims];
        if let Some(seed) = seed {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for (dir, shift) in directions.iter_mut().zip(shifts.iter_mut()) {
                let rows = random_lower_triangular(&mut rng);
                for v in dir.iter_mut() {
                    *v = apply_lower_triangular(&rows, *v);
                }
                *shift = rng.random();
            }
        }
        Ok(Self { directions, shifts })
    }

    pub fn dims(&self) -> usize {
        self.directions.len()
    }

    /// Write point `index` (in Gray-code order) into `out`, each coordinate
    /// in the open unit interval.
    pub fn point_into(&self, index: u32, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dims());
        let gray = index ^ (index >> 1);
        for ((x, dir), shift) in out.iter_mut().zip(&self.directions).zip(&self.shifts) {
            let mut bits = *shift;
            let mut g = gray;
            let mut k = 0;
            while g != 0 {
                if g & 1 == 1 {
                    bits ^= dir[k];
                }
                g >>= 1;
                k += 1;
            }
            *x = (bits as f64 + 0.5) * SCALE;
        }
    }

    pub fn point(&self, index: u32) -> Vec<f64> {
        let mut out = vec![0.0; self.dims()];
        self.point_into(index, &mut out);
        out
    }
}

/// Direction integers `v_1..v_32` for zero-based dimension `dim`, MSB-aligned.
fn direction_numbers(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (k, v) in v.iter_mut().enumerate() {
            *v = 1 << (BITS - 1 - k);
        }
        return v;
    }
    let (s, a, m) = JOE_KUO[dim - 1];
    let s = s as usize;
    for k in 0..s.min(BITS) {
        v[k] = m[k] << (BITS - 1 - k);
    }
    for k in s..BITS {
        let mut next = v[k - s] ^ (v[k - s] >> s);
        for j in 1..s {
            if (a >> (s - 1 - j)) & 1 == 1 {
                next ^= v[k - j];
            }
        }
        v[k] = next;
    }
    v
}

/// Rows of a random unit lower-triangular matrix over GF(2). Row `r` is a
/// mask over input bits, MSB-first, with bit `r` set and nothing right of it.
fn random_lower_triangular(rng: &mut ChaCha8Rng) -> [u32; BITS] {
    let mut rows = [0u32; BITS];
    for (r, row) in rows.iter_mut().enumerate() {
        let diagonal = 1u32 << (BITS - 1 - r);
        let above: u32 = if r == 0 { 0 } else { rng.random::<u32>() & !((1u32 << (BITS - r)) - 1) };
        *row = above | diagonal;
    }
    rows
}

fn apply_lower_triangular(rows: &[u32; BITS], v: u32) -> u32 {
    rows.iter().enumerate().fold(0u32, |acc, (r, row)| {
        acc | (((row & v).count_ones() & 1) << (BITS - 1 - r))
    })
}

/// Seeded uniform points, addressable by index like the Sobol' generator.
#[derive(Debug, Clone)]
pub struct UniformPoints {
    dims: usize,
    seed: u64,
}

impl UniformPoints {
    pub fn new(dims: usize, seed: u64) -> Self {
        Self { dims, seed }
    }

    pub fn point_into(&self, index: u32, out: &mut [f64]) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_word_pos(index as u128 * self.dims as u128);
        for x in out.iter_mut() {
            *x = (rng.random::<u32>() as f64 + 0.5) * SCALE;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unscrambled_matches_reference_prefix() {
        // First points of the Joe-Kuo sequence in dimensions 1..=3 (Gray-code order).
        let seq = ScrambledSobol::unscrambled(3).unwrap();
        let truncate = |p: Vec<f64>| p.iter().map(|x| (x * 8.0).floor() / 8.0).collect::<Vec<_>>();
        assert_eq!(truncate(seq.point(0)), vec![0.0, 0.0, 0.0]);
        assert_eq!(truncate(seq.point(1)), vec![0.5, 0.5, 0.5]);
        assert_eq!(truncate(seq.point(2)), vec![0.75, 0.25, 0.25]);
        assert_eq!(truncate(seq.point(3)), vec![0.25, 0.75, 0.75]);
        assert_eq!(truncate(seq.point(4)), vec![0.375, 0.375, 0.625]);
    }

    #[test]
    fn every_dimension_is_stratified() {
        // A (0, m, 1)-net in each coordinate: 2^k points hit every interval
        // [j/2^k, (j+1)/2^k) exactly once, scrambled or not.
        for seq in [ScrambledSobol::unscrambled(MAX_DIMENSIONS).unwrap(), ScrambledSobol::new(MAX_DIMENSIONS, 7).unwrap()] {
            let n = 1u32 << 10;
            for d in 0..MAX_DIMENSIONS {
                let mut seen = vec![false; n as usize];
                for i in 0..n {
                    let x = seq.point(i)[d];
                    let cell = (x * n as f64) as usize;
                    assert!(!seen[cell], "dimension {d} repeats cell {cell}");
                    seen[cell] = true;
                }
            }
        }
    }

    #[test]
    fn pairs_are_stratified_in_low_dimensions() {
        // Dimensions 1 and 2 form a (0, 2)-sequence: 2^(2k) points fill a 2^k grid.
        let seq = ScrambledSobol::new(2, 11).unwrap();
        let k = 4;
        let side = 1usize << k;
        let mut counts = vec![0usize; side * side];
        for i in 0..(side * side) as u32 {
            let p = seq.point(i);
            counts[(p[0] * side as f64) as usize * side + (p[1] * side as f64) as usize] += 1;
        }
        assert!(counts.iter().all(|&c| c == 1));
    }

    #[test]
    fn seeded_and_deterministic() {
        let a = ScrambledSobol::new(5, 42).unwrap();
        let b = ScrambledSobol::new(5, 42).unwrap();
        let c = ScrambledSobol::new(5, 43).unwrap();
        for i in [0u32, 1, 17, 1000] {
            assert_eq!(a.point(i), b.point(i));
            assert_ne!(a.point(i), c.point(i));
            assert!(a.point(i).iter().all(|&x| x > 0.0 && x < 1.0));
        }
    }

    #[test]
    fn unit_cube_mean() {
        let seq = ScrambledSobol::new(8, 3).unwrap();
        let n = 1u32 << 12;
        let mut sums = [0.0; 8];
        for i in 0..n {
            for (s, x) in sums.iter_mut().zip(seq.point(i)) {
                *s += x;
            }
        }
        for s in sums {
            assert!((s / n as f64 - 0.5).abs() < 1e-3);
        }
    }

    #[test]
    fn uniform_points_are_index_addressable() {
        let u = UniformPoints::new(3, 9);
        let mut a = [0.0; 3];
        let mut b = [0.0; 3];
        u.point_into(5, &mut a);
        u.point_into(5, &mut b);
        assert_eq!(a, b);
        u.point_into(6, &mut b);
        assert_ne!(a, b);
    }

    #[test]
    fn rejects_unsupported_dimensions() {
        assert!(ScrambledSobol::new(0, 1).is_err());
        assert!(ScrambledSobol::new(MAX_DIMENSIONS + 1, 1).is_err());
    }
}
