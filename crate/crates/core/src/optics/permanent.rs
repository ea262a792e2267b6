use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};

pub const MAX_PERMANENT_SIZE: usize = 20;

/// Matrix permanent by Ryser's formula, visiting column subsets in Gray-code
/// order so each step updates the row sums with a single column.
pub fn permanent(a: &CMatrix) -> Result<C64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::NotSquare { rows: n, cols: a.ncols() });
    }
    if n > MAX_PERMANENT_SIZE {
        return Err(Error::PermanentTooLarge(n));
    }
    match n {
        0 => return Ok(C64::new(1.0, 0.0)),
        1 => return Ok(a[(0, 0)]),
        2 => return Ok(a[(0, 0)] * a[(1, 1)] + a[(0, 1)] * a[(1, 0)]),
        _ => {}
    }
    let mut row_sums = vec![ZERO; n];
    let mut in_subset = vec![false; n];
    let mut total = ZERO;
    let mut subset_size = 0usize;
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        if in_subset[j] {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= a[(i, j)];
            }
            subset_size -= 1;
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += a[(i, j)];
            }
            subset_size += 1;
        }
        in_subset[j] = !in_subset[j];
        let prod: C64 = row_sums.iter().product();
        if subset_size.is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}

/// Σ_σ ∏ᵢ a[i, σ(i)] over all permutations. Exponential in n·log n; only for
/// cross-checking small cases.
pub fn permanent_brute_force(a: &CMatrix) -> C64 {
    fn rec(a: &CMatrix, row: usize, used: &mut Vec<bool>) -> C64 {
        let n = a.nrows();
        if row == n {
            return C64::new(1.0, 0.0);
        }
        let mut acc = ZERO;
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                acc += a[(row, j)] * rec(a, row + 1, used);
                used[j] = false;
            }
        }
        acc
    }
    rec(a, 0, &mut vec![false; a.nrows()])
}
