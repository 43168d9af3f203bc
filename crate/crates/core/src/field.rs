//! Arithmetic in the prime field of order 2^61 - 1.

pub const MODULUS: u64 = (1 << 61) - 1;

#[inline]
fn fold(x: u64) -> u64 {
    let s = (x & MODULUS) + (x >> 61);
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    fold(a + b)
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    fold(a + MODULUS - b)
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    let x = a as u128 * b as u128;
    let lo = (x as u64) & MODULUS;
    let hi = (x >> 61) as u64;
    fold(lo + hi)
}

pub fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    acc
}

/// Multiplicative inverse of a nonzero element.
pub fn inv(a: u64) -> u64 {
    debug_assert!(a != 0);
    pow(a, MODULUS - 2)
}

/// Rank of a dense matrix over the field, by Gaussian elimination.
/// Consumes the rows.
pub fn rank(mut rows: Vec<Vec<u64>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let scale = inv(rows[rank][col]);
        for x in rows[rank][col..].iter_mut() {
            *x = mul(*x, scale);
        }
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail.iter_mut() {
            let f = row[col];
            if f != 0 {
                for c in col..ncols {
                    row[c] = sub(row[c], mul(f, pivot_row[c]));
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}
