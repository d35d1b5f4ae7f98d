//! Exact Euclidean distance transform.
//!
//! Two separable passes over the lattice, both in integer arithmetic: a
//! column pass producing the vertical distance to the nearest foreground
//! cell, then a row pass taking the lower envelope of the parabolas
//! `(x - i)^2 + g(i)^2` (Meijster, Roerdink and Hesselink). Squared distances
//! are exact integers, so the result matches a brute-force minimum bit for
//! bit: the only floating point step is the final `sqrt(d2) * spacing`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{BinaryMask, ScalarField};

/// Squared distance, in cells, from every cell to the nearest `true` cell.
///
/// `bits` is row-major with `rows * cols` entries and must contain at least
/// one `true`.
pub fn squared_edt(bits: &[bool], rows: usize, cols: usize) -> Vec<i64> {
    assert_eq!(bits.len(), rows * cols);
    // Larger than any in-grid distance, so its square dominates every
    // genuine candidate without overflowing i64.
    let inf = (rows + cols) as i64;

    let mut g = vec![inf; rows * cols];
    for j in 0..cols {
        if bits[j] {
            g[j] = 0;
        }
    }
    for i in 1..rows {
        let (prev, cur) = g.split_at_mut(i * cols);
        let prev = &prev[(i - 1) * cols..];
        let cur = &mut cur[..cols];
        let row_bits = &bits[i * cols..(i + 1) * cols];
        for j in 0..cols {
            cur[j] = if row_bits[j] { 0 } else { (prev[j] + 1).min(inf) };
        }
    }
    for i in (0..rows.saturating_sub(1)).rev() {
        let (cur, next) = g.split_at_mut((i + 1) * cols);
        let cur = &mut cur[i * cols..];
        let next = &next[..cols];
        for j in 0..cols {
            if next[j] < cur[j] {
                cur[j] = next[j] + 1;
            }
        }
    }

    let mut out = vec![0i64; rows * cols];
    out.par_chunks_mut(cols)
        .zip(g.par_chunks(cols))
        .for_each_init(
            || (vec![0usize; cols], vec![0i64; cols]),
            |(s, t), (dst, gr)| lower_envelope(gr, dst, s, t),
        );
    out
}

fn lower_envelope(g: &[i64], dst: &mut [i64], s: &mut [usize], t: &mut [i64]) {
    let n = g.len();
    let f = |x: i64, i: usize| {
        let d = x - i as i64;
        d * d + g[i] * g[i]
    };
    let sep = |i: usize, u: usize| {
        let (ii, uu) = (i as i64, u as i64);
        (uu * uu - ii * ii + g[u] * g[u] - g[i] * g[i]).div_euclid(2 * (uu - ii))
    };

    let mut q: isize = 0;
    s[0] = 0;
    t[0] = 0;
    for u in 1..n {
        while q >= 0 && f(t[q as usize], s[q as usize]) > f(t[q as usize], u) {
            q -= 1;
        }
        if q < 0 {
            q = 0;
            s[0] = u;
        } else {
            let w = 1 + sep(s[q as usize], u);
            if w < n as i64 {
                q += 1;
                s[q as usize] = u;
                t[q as usize] = w;
            }
        }
    }
    for u in (0..n).rev() {
        dst[u] = f(u as i64, s[q as usize]);
        if u as i64 == t[q as usize] {
            q -= 1;
        }
    }
}

/// Distance from each cell center to the nearest member cell center, in
/// domain units. Zero on member cells.
pub fn distance_transform(mask: &BinaryMask) -> Result<ScalarField> {
    if mask.is_empty() {
        return Err(Error::EmptySet);
    }
    let grid = *mask.grid();
    let d2 = squared_edt(mask.bits(), grid.rows, grid.cols);
    let h = grid.spacing;
    Ok(ScalarField::from_raw(grid, d2.into_iter().map(|v| (v as f64).sqrt() * h).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(bits: &[bool], rows: usize, cols: usize) -> Vec<i64> {
        let fg: Vec<(i64, i64)> = (0..rows * cols)
            .filter(|&k| bits[k])
            .map(|k| ((k / cols) as i64, (k % cols) as i64))
            .collect();
        (0..rows * cols)
            .map(|k| {
                let (i, j) = ((k / cols) as i64, (k % cols) as i64);
                fg.iter().map(|&(a, b)| (a - i).pow(2) + (b - j).pow(2)).min().unwrap()
            })
            .collect()
    }

    #[test]
    fn all_true_is_zero() {
        let g = GridSpec::pixels(5, 7).unwrap();
        let d = distance_transform(&BinaryMask::full(g)).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pythagorean_offset() {
        let g = GridSpec::pixels(11, 11).unwrap();
        let mut m = BinaryMask::empty(g);
        m.set(5, 5, true);
        let d = distance_transform(&m).unwrap();
        assert_eq!(d.get(5 + 4, 5 + 3), 5.0);
        assert_eq!(d.get(5 - 3, 5 - 4), 5.0);
    }

    #[test]
    fn empty_mask_is_an_error() {
        let g = GridSpec::pixels(3, 3).unwrap();
        assert!(matches!(distance_transform(&BinaryMask::empty(g)), Err(Error::EmptySet)));
    }

    #[test]
    fn matches_brute_force_on_random_masks() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let rows = rng.random_range(1..=32);
            let cols = rng.random_range(1..=32);
            let density: f64 = rng.random_range(0.01..0.9);
            let mut bits: Vec<bool> = (0..rows * cols).map(|_| rng.random_bool(density)).collect();
            if !bits.iter().any(|&b| b) {
                bits[rng.random_range(0..rows * cols)] = true;
            }
            assert_eq!(squared_edt(&bits, rows, cols), brute(&bits, rows, cols));
        }
    }

    #[test]
    fn single_row_and_column() {
        let bits = [false, false, true, false, false, false];
        assert_eq!(squared_edt(&bits, 1, 6), vec![4, 1, 0, 1, 4, 9]);
        assert_eq!(squared_edt(&bits, 6, 1), vec![4, 1, 0, 1, 4, 9]);
    }
}
