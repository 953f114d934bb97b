//! Arithmetic and dense linear algebra over GF(2^8).
//!
//! The field is `GF(2)[x]/(x^8+x^4+x^3+x^2+1)` (0x11D), the polynomial used by
//! most Reed-Solomon deployments. Addition is XOR; multiplication goes
//! through a 64 KiB table built at compile time. The elimination routines
//! here back both the rateless decoder (rank and solve on pseudo-random
//! coefficient matrices) and the fixed-rate share codec (Vandermonde solve).

const POLY: u16 = 0x11D;

const fn mul_slow(a: u8, b: u8) -> u8 {
    let mut acc: u16 = 0;
    let mut a16 = a as u16;
    let mut b16 = b as u16;
    while b16 != 0 {
        if b16 & 1 != 0 {
            acc ^= a16;
        }
        a16 <<= 1;
        if a16 & 0x100 != 0 {
            a16 ^= POLY;
        }
        b16 >>= 1;
    }
    acc as u8
}

const fn build_mul_table() -> [[u8; 256]; 256] {
    let mut t = [[0u8; 256]; 256];
    let mut a = 0usize;
    while a < 256 {
        let mut b = 0usize;
        while b < 256 {
            t[a][b] = mul_slow(a as u8, b as u8);
            b += 1;
        }
        a += 1;
    }
    t
}

const fn build_inv_table() -> [u8; 256] {
    let mut t = [0u8; 256];
    let mut a = 1usize;
    while a < 256 {
        let mut b = 1usize;
        while b < 256 {
            if mul_slow(a as u8, b as u8) == 1 {
                t[a] = b as u8;
                break;
            }
            b += 1;
        }
        a += 1;
    }
    t
}

static MUL: [[u8; 256]; 256] = build_mul_table();
static INV: [u8; 256] = build_inv_table();

#[inline]
pub fn mul(a: u8, b: u8) -> u8 {
    MUL[a as usize][b as usize]
}

/// Multiplicative inverse. `inv(0)` is undefined and panics in debug builds.
#[inline]
pub fn inv(a: u8) -> u8 {
    debug_assert!(a != 0, "inverse of zero");
    INV[a as usize]
}

pub fn pow(base: u8, exp: u32) -> u8 {
    let mut acc = 1u8;
    let mut i = 0;
    while i < exp {
        acc = mul(acc, base);
        i += 1;
    }
    acc
}

/// `dst ^= c * src`, elementwise.
#[inline]
pub fn axpy(dst: &mut [u8], c: u8, src: &[u8]) {
    if c == 0 {
        return;
    }
    debug_assert!(src.len() <= dst.len());
    let row = &MUL[c as usize];
    for (d, &s) in dst.iter_mut().zip(src.iter()) {
        *d ^= row[s as usize];
    }
}

/// `dst *= c`, elementwise.
#[inline]
pub fn scale(dst: &mut [u8], c: u8) {
    let row = &MUL[c as usize];
    for d in dst.iter_mut() {
        *d = row[*d as usize];
    }
}

/// Outcome of Gauss-Jordan elimination on an augmented system.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Rank of the coefficient matrix.
    pub rank: usize,
    /// True when some row reduced to zero coefficients but a nonzero value,
    /// i.e. the equations contradict each other.
    pub inconsistent: bool,
    /// The unique solution, one value row per unknown, present only when
    /// `rank == unknowns` and the system is consistent.
    pub solution: Option<Vec<Vec<u8>>>,
    /// Field multiplications spent, for operation accounting.
    pub multiplies: u64,
}

/// Solve `C * X = V` over GF(2^8), where row i of `coeffs` holds the
/// coefficients of one equation and row i of `values` its right-hand side
/// (an arbitrary-length byte vector; all rows must share one length).
///
/// Runs full Gauss-Jordan so that on success the solution can be read out
/// directly, and rows left over after elimination expose inconsistencies.
pub fn solve(mut coeffs: Vec<Vec<u8>>, mut values: Vec<Vec<u8>>, unknowns: usize) -> SolveReport {
    assert_eq!(coeffs.len(), values.len());
    let rows = coeffs.len();
    let mut mults: u64 = 0;
    let mut pivot_row_for_col: Vec<Option<usize>> = vec![None; unknowns];
    let mut next = 0usize; // rows 0..next are pivot rows

    for col in 0..unknowns {
        let Some(found) = (next..rows).find(|&r| coeffs[r][col] != 0) else {
            continue;
        };
        coeffs.swap(next, found);
        values.swap(next, found);

        let piv = coeffs[next][col];
        if piv != 1 {
            let f = inv(piv);
            scale(&mut coeffs[next][col..], f);
            scale(&mut values[next], f);
            mults += (unknowns - col + values[next].len()) as u64;
        }
        for r in 0..rows {
            if r == next || coeffs[r][col] == 0 {
                continue;
            }
            let factor = coeffs[r][col];
            let (c_src, c_dst) = split_two(&mut coeffs, next, r);
            axpy(&mut c_dst[col..], factor, &c_src[col..]);
            let (v_src, v_dst) = split_two(&mut values, next, r);
            axpy(v_dst, factor, v_src);
            mults += (unknowns - col + v_dst.len()) as u64;
        }
        pivot_row_for_col[col] = Some(next);
        next += 1;
        if next == rows {
            break;
        }
    }

    let rank = next;
    let inconsistent = (rank..rows).any(|r| values[r].iter().any(|&b| b != 0));
    let solution = if rank == unknowns && !inconsistent {
        Some(
            (0..unknowns)
                .map(|col| values[pivot_row_for_col[col].expect("full rank")].clone())
                .collect(),
        )
    } else {
        None
    };
    SolveReport {
        rank,
        inconsistent,
        solution,
        multiplies: mults,
    }
}

/// Rank of a coefficient matrix (rows consumed in place).
pub fn rank(rows: &mut [Vec<u8>], unknowns: usize) -> usize {
    let n = rows.len();
    let mut next = 0usize;
    for col in 0..unknowns {
        let Some(found) = (next..n).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(next, found);
        let f = inv(rows[next][col]);
        if f != 1 {
            scale(&mut rows[next][col..], f);
        }
        for r in next + 1..n {
            let factor = rows[r][col];
            if factor != 0 {
                let (src, dst) = split_two(rows, next, r);
                axpy(&mut dst[col..], factor, &src[col..]);
            }
        }
        next += 1;
        if next == n || next == unknowns {
            break;
        }
    }
    next
}

/// Borrow rows `a` (immutably) and `b` (mutably) from one slice.
fn split_two<T>(v: &mut [T], a: usize, b: usize) -> (&T, &mut T) {
    debug_assert!(a != b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&hi[0], &mut lo[b])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_matches_reference_on_known_products() {
        // Hand-checked products in GF(2^8)/0x11D.
        assert_eq!(mul(0, 0xFF), 0);
        assert_eq!(mul(1, 0xAB), 0xAB);
        assert_eq!(mul(2, 0x80), 0x1D);
        assert_eq!(mul(7, 11), 0x31);
        assert_eq!(mul(2, 0x8E), 0x01);
        assert_eq!(mul(0x53, 0x8C), 0x01);
    }

    #[test]
    fn field_axioms_spot_check() {
        let mut rng = crate::rng::DeterministicRng::from_seed(5);
        for _ in 0..2000 {
            let a = rng.next_u64() as u8;
            let b = rng.next_u64() as u8;
            let c = rng.next_u64() as u8;
            assert_eq!(mul(a, b), mul(b, a));
            assert_eq!(mul(a, mul(b, c)), mul(mul(a, b), c));
            assert_eq!(mul(a, b ^ c), mul(a, b) ^ mul(a, c));
            if a != 0 {
                assert_eq!(mul(a, inv(a)), 1);
            }
        }
    }

    #[test]
    fn solve_recovers_known_system() {
        // x0 + 2*x1 = [5], 3*x0 + x1 = [4]
        let coeffs = vec![vec![1, 2], vec![3, 1]];
        let x0 = vec![7u8];
        let x1 = vec![9u8];
        let v0 = vec![x0[0] ^ mul(2, x1[0])];
        let v1 = vec![mul(3, x0[0]) ^ x1[0]];
        let rep = solve(coeffs, vec![v0, v1], 2);
        assert_eq!(rep.rank, 2);
        assert!(!rep.inconsistent);
        assert_eq!(rep.solution.unwrap(), vec![x0, x1]);
    }

    #[test]
    fn solve_flags_inconsistent_rows() {
        // Same equation twice with different right-hand sides.
        let coeffs = vec![vec![1, 1], vec![1, 1]];
        let values = vec![vec![3u8], vec![4u8]];
        let rep = solve(coeffs, values, 2);
        assert_eq!(rep.rank, 1);
        assert!(rep.inconsistent);
        assert!(rep.solution.is_none());
    }

    #[test]
    fn rank_counts_independent_rows() {
        let mut rows = vec![vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 0]];
        // Third row is the sum of the first two.
        assert_eq!(rank(&mut rows, 3), 2);
        assert_eq!(rank(&mut [], 3), 0);
    }
}
