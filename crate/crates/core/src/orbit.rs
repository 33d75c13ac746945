//! Apparatus parameters, cyclic orbits and orbit counting.

use crate::error::{Error, Result};
use crate::pattern::Pattern;

/// Size and action constant of one device in the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApparatusSpec {
    n: usize,
    h0: f64,
    h_n: f64,
    prime: bool,
}

impl ApparatusSpec {
    pub fn new(n: usize, h0: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooSmall(n));
        }
        if !(h0.is_finite() && h0 > 0.0) {
            return Err(Error::InvalidActionConstant(h0));
        }
        Ok(Self {
            n,
            h0,
            h_n: h0 / n as f64,
            prime: is_prime(n),
        })
    }

    /// `h0 = 1`.
    pub fn with_size(n: usize) -> Result<Self> {
        Self::new(n, 1.0)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h0(&self) -> f64 {
        self.h0
    }

    /// Renormalised constant `h0 / n`.
    #[inline]
    pub fn h_n(&self) -> f64 {
        self.h_n
    }

    #[inline]
    pub fn is_prime(&self) -> bool {
        self.prime
    }
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// The cyclic-shift orbit of a pattern: the invariant subspace spanned by
/// `rep, shift(rep), …, shift^{ℓ−1}(rep)`.
///
/// Members are produced on demand; storing them would cost `n·ℓ` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitBasis {
    representative: Pattern,
    period: usize,
}

impl OrbitBasis {
    pub fn representative(&self) -> &Pattern {
        &self.representative
    }

    /// Orbit length `ℓ`; always divides `n`.
    pub fn period(&self) -> usize {
        self.period
    }

    pub fn n(&self) -> usize {
        self.representative.len()
    }

    /// `members[j] = shift^j(representative)`, indices taken mod `ℓ`.
    pub fn member(&self, j: usize) -> Pattern {
        self.representative.rotate_right(j % self.period)
    }

    pub fn members(&self) -> impl Iterator<Item = Pattern> + '_ {
        (0..self.period).map(move |j| self.member(j))
    }

    /// Index of `p` in this orbit, if it is a member.
    pub fn position_of(&self, p: &Pattern) -> Option<usize> {
        if p.len() != self.n() || p.count_ones() != self.representative.count_ones() {
            return None;
        }
        (0..self.period).find(|&j| &self.member(j) == p)
    }
}

pub fn orbit(p: &Pattern) -> OrbitBasis {
    let period = divisors(p.len())
        .into_iter()
        .find(|&d| &p.rotate_right(d) == p)
        .expect("n itself always returns the pattern");
    OrbitBasis {
        representative: p.clone(),
        period,
    }
}

/// Largest `n` counted by explicit enumeration of all `2^n` strings.
pub const ENUMERATION_CAP: usize = 22;

/// Rightward rotation on a dense index (MSB = leftmost particle).
#[inline]
pub(crate) fn rotate_index(x: usize, n: usize) -> usize {
    (x >> 1) | ((x & 1) << (n - 1))
}

/// Canonical representatives (minimal index in their orbit) of every orbit of
/// length-`n` strings, in increasing order.
pub fn orbit_representatives(n: usize) -> Vec<usize> {
    assert!((1..=ENUMERATION_CAP).contains(&n));
    (0..1usize << n)
        .filter(|&x| {
            let mut y = x;
            for _ in 1..n {
                y = rotate_index(y, n);
                if y < x {
                    return false;
                }
            }
            true
        })
        .collect()
}

/// Number of orbits by walking all `2^n` strings.
pub fn count_orbits_enumerated(n: usize) -> Result<u128> {
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    if n > ENUMERATION_CAP {
        return Err(Error::CountOverflow(n));
    }
    Ok(orbit_representatives(n).len() as u128)
}

/// Burnside count `(1/n) Σ_{d|n} φ(d) 2^{n/d}`.
pub fn count_orbits_burnside(n: usize) -> Result<u128> {
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    if n >= 127 {
        return Err(Error::CountOverflow(n));
    }
    let total: u128 = divisors(n)
        .into_iter()
        .map(|d| euler_phi(d) as u128 * (1u128 << (n / d)))
        .sum();
    Ok(total / n as u128)
}

/// Total number of cyclic orbits; enumerates when feasible, Burnside beyond.
pub fn count_orbits(n: usize) -> Result<u128> {
    if n <= ENUMERATION_CAP {
        count_orbits_enumerated(n)
    } else {
        count_orbits_burnside(n)
    }
}

/// `2 + (2^n − 2)/n`, defined only for prime `n`.
pub fn fermat_orbit_count(n: usize) -> Option<u128> {
    if !is_prime(n) || n >= 127 {
        return None;
    }
    let free = (1u128 << n) - 2;
    debug_assert_eq!(free % n as u128, 0);
    Some(2 + free / n as u128)
}

fn euler_phi(mut n: usize) -> usize {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}
