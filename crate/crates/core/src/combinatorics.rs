//! Exact combinatorial quantities: Stirling numbers of both kinds, binomial
//! coefficients, Lah numbers and harmonic numbers.
//!
//! Everything here is integer or rational arithmetic; no floating point. The
//! Stirling triangles are built by their additive recurrences (no
//! alternating sums, so no cancellation) and memoized up to a configurable
//! row cap. Rows past the cap are recomputed per call, still exactly.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Default number of memoized triangle rows.
const DEFAULT_MEMO_CAP: usize = 200;

static MEMO_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_MEMO_CAP);

/// Change the number of memoized Stirling-triangle rows. Larger requests
/// still succeed; they just recompute rows on the fly.
pub fn set_memo_cap(rows: usize) {
    MEMO_CAP.store(rows, Ordering::Relaxed);
}

enum Kind {
    First,
    Second,
}

/// Rows of one Stirling triangle; `rows[n][m]` for `0 <= m <= n`.
struct Triangle {
    kind: Kind,
    rows: RwLock<Vec<Vec<BigInt>>>,
}

impl Triangle {
    const fn new(kind: Kind) -> Self {
        Triangle {
            kind,
            rows: RwLock::new(Vec::new()),
        }
    }

    fn next_row(&self, n_prev: usize, prev: &[BigInt]) -> Vec<BigInt> {
        let n = n_prev + 1;
        let mut row = vec![BigInt::zero(); n + 1];
        for m in 1..=n {
            // s(n+1,m) = n*s(n,m) + s(n,m-1)  /  S(n+1,m) = m*S(n,m) + S(n,m-1)
            let factor = match self.kind {
                Kind::First => BigInt::from(n_prev),
                Kind::Second => BigInt::from(m),
            };
            let carry = if m <= n_prev {
                &prev[m] * factor
            } else {
                BigInt::zero()
            };
            row[m] = carry + &prev[m - 1];
        }
        row
    }

    fn value(&self, n: usize, m: usize) -> BigInt {
        if n == 0 && m == 0 {
            return BigInt::one();
        }
        if m == 0 || m > n {
            return BigInt::zero();
        }
        let cap = MEMO_CAP.load(Ordering::Relaxed);
        {
            let rows = self.rows.read().unwrap();
            if n < rows.len() {
                return rows[n][m].clone();
            }
        }
        let mut rows = self.rows.write().unwrap();
        if rows.is_empty() {
            rows.push(vec![BigInt::one()]);
        }
        while rows.len() <= n.min(cap) {
            let next = self.next_row(rows.len() - 1, rows.last().unwrap());
            rows.push(next);
        }
        if n < rows.len() {
            return rows[n][m].clone();
        }
        // Past the cap: keep extending a private copy of the last row.
        let mut level = rows.len() - 1;
        let mut row = rows.last().unwrap().clone();
        drop(rows);
        while level < n {
            row = self.next_row(level, &row);
            level += 1;
        }
        row[m].clone()
    }
}

static FIRST: Triangle = Triangle::new(Kind::First);
static SECOND: Triangle = Triangle::new(Kind::Second);

/// Signless Stirling number of the first kind: the number of permutations
/// of an `n`-set with exactly `m` cycles. Zero for `m` outside `1..=n`,
/// except for the convention at `n = m = 0` where it equals one.
pub fn stirling_first(n: usize, m: usize) -> BigInt {
    FIRST.value(n, m)
}

/// Stirling number of the second kind: the number of partitions of an
/// `n`-set into `m` non-empty blocks. Same boundary conventions as
/// [`stirling_first`].
pub fn stirling_second(n: usize, m: usize) -> BigInt {
    SECOND.value(n, m)
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Lah number `L(n, k) = n!/k! * C(n-1, k-1)` for `1 <= k <= n`.
pub fn lah(n: usize, k: usize) -> Result<BigInt> {
    if k == 0 || n == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "lah requires 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    Ok(factorial(n) / factorial(k) * binomial(n - 1, k - 1))
}

/// Generalized harmonic number `H_n^(order)` as an exact rational, in
/// lowest terms. `order = 1` gives the ordinary harmonic number.
pub fn harmonic(n: usize, order: u32) -> BigRational {
    assert!(n >= 1, "harmonic number needs n >= 1");
    assert!(order >= 1, "harmonic order must be >= 1");
    let mut acc = BigRational::zero();
    for i in 1..=n {
        acc += BigRational::new(BigInt::one(), BigInt::from(i).pow(order));
    }
    acc
}

/// Exact check of the two Stirling convolution identities:
/// the alternating sum `sum_m (-1)^(n-m) s(n,m) S(m,k)` collapses to the
/// Kronecker delta, and the plain sum equals the Lah number `L(n,k)`.
pub fn stirling_identity_check(n: usize, k: usize) -> Result<bool> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "identity check requires 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    let mut alternating = BigInt::zero();
    let mut plain = BigInt::zero();
    for m in k..=n {
        let term = stirling_first(n, m) * stirling_second(m, k);
        if (n - m) % 2 == 0 {
            alternating += &term;
        } else {
            alternating -= &term;
        }
        plain += term;
    }
    let delta = if n == k { BigInt::one() } else { BigInt::zero() };
    Ok(alternating == delta && plain == lah(n, k)?)
}
