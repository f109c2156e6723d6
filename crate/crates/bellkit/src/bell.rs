//! Exact Bell numbers: triangle recurrence, logarithms, consecutive ratios,
//! and an independent series oracle.

use crate::error::{Error, Result};
use crate::hp::HPReal;
use rug::ops::Pow;
use rug::{Float, Integer};
use std::sync::Mutex;

/// Default cap on the largest exactly-computed index. Triangle cost and
/// memory grow quadratically; this keeps desk-scale runs in the minutes.
pub const DEFAULT_MAX_INDEX: u64 = 20_000;

/// Arbitrary-precision natural number.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BigNat(Integer);

impl BigNat {
    pub fn from_u64(n: u64) -> Self {
        BigNat(Integer::from(n))
    }

    pub fn as_integer(&self) -> &Integer {
        &self.0
    }

    pub fn bits(&self) -> u32 {
        self.0.significant_bits()
    }

    /// Number of decimal digits.
    pub fn decimal_digits(&self) -> u64 {
        self.0.to_string().len() as u64
    }

    pub fn to_hp(&self, prec: u32) -> HPReal {
        HPReal::from_integer(&self.0, prec)
    }
}

impl std::fmt::Display for BigNat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for BigNat {
    fn from(n: u64) -> Self {
        BigNat::from_u64(n)
    }
}

/// Binomial coefficient C(n, k), exact.
pub fn binomial(n: u64, k: u64) -> BigNat {
    if k > n {
        return BigNat(Integer::new());
    }
    BigNat(Integer::from(Integer::binomial_u(
        u32::try_from(n).expect("binomial index fits u32"),
        u32::try_from(k).expect("binomial index fits u32"),
    )))
}

/// Row-wise triangle state. Extending by one row costs one big-integer
/// addition per entry of the new row.
struct Triangle {
    /// Bell numbers produced so far; `bells[n]` is the n-th Bell number.
    bells: Vec<Integer>,
    /// Last computed row of the triangle; row k has k+1 entries.
    row: Vec<Integer>,
}

impl Triangle {
    fn new() -> Self {
        Triangle {
            bells: vec![Integer::from(1)],
            row: vec![Integer::from(1)],
        }
    }

    fn extend_to(&mut self, n_max: u64) {
        while (self.bells.len() as u64) <= n_max {
            let mut next = Vec::with_capacity(self.row.len() + 1);
            next.push(self.row.last().unwrap().clone());
            for v in &self.row {
                let s = Integer::from(next.last().unwrap() + v);
                next.push(s);
            }
            self.row = next;
            self.bells.push(self.row[0].clone());
        }
    }
}

/// Table of exact Bell numbers for indices `0..=n_max`.
#[derive(Debug)]
pub struct BellTable {
    values: Vec<BigNat>,
}

impl BellTable {
    /// Build the table with the default resource cap.
    pub fn up_to(n_max: u64) -> Result<Self> {
        Self::up_to_with_cap(n_max, DEFAULT_MAX_INDEX)
    }

    /// Build the table with an explicit cap. Exceeding the cap is an error,
    /// never a silent truncation.
    pub fn up_to_with_cap(n_max: u64, cap: u64) -> Result<Self> {
        if n_max > cap {
            return Err(Error::ResourceLimit {
                requested: n_max,
                cap,
            });
        }
        let mut tri = Triangle::new();
        tri.extend_to(n_max);
        Ok(BellTable {
            values: tri.bells.into_iter().map(BigNat).collect(),
        })
    }

    pub fn n_max(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn get(&self, n: u64) -> &BigNat {
        &self.values[n as usize]
    }

    pub fn values(&self) -> &[BigNat] {
        &self.values
    }

    /// ln B_n computed from the exact value, never from an approximation.
    pub fn log_bell(&self, n: u64, prec: u32) -> HPReal {
        self.get(n).to_hp(prec + 32).ln().with_prec(prec)
    }

    /// B_n / B_{n-1} from the exact numerator and denominator.
    pub fn ratio(&self, n: u64, prec: u32) -> HPReal {
        assert!(n >= 1, "ratio needs n >= 1");
        let num = self.get(n).to_hp(prec + 32);
        let den = self.get(n - 1).to_hp(prec + 32);
        num.div(&den).with_prec(prec)
    }
}

static CACHE: Mutex<Option<Triangle>> = Mutex::new(None);

fn with_cache<T>(n: u64, f: impl FnOnce(&Triangle) -> T) -> T {
    let mut guard = CACHE.lock().unwrap();
    let tri = guard.get_or_insert_with(Triangle::new);
    tri.extend_to(n);
    f(tri)
}

/// Exact B_n through a process-wide memoized triangle.
pub fn bell(n: u64) -> Result<BigNat> {
    bell_with_cap(n, DEFAULT_MAX_INDEX)
}

pub fn bell_with_cap(n: u64, cap: u64) -> Result<BigNat> {
    if n > cap {
        return Err(Error::ResourceLimit { requested: n, cap });
    }
    Ok(with_cache(n, |tri| BigNat(tri.bells[n as usize].clone())))
}

/// ln B_n with absolute error below `2^-(prec-8)`, from the exact value.
pub fn log_bell(n: u64, prec: u32) -> Result<HPReal> {
    let b = bell(n)?;
    Ok(b.to_hp(prec + 32).ln().with_prec(prec))
}

/// B_n / B_{n-1} as a ball, from exact values.
pub fn bell_ratio_exact(n: u64, prec: u32) -> Result<HPReal> {
    if n < 1 {
        return Err(Error::Domain("ratio needs n >= 1".into()));
    }
    let num = bell(n)?.to_hp(prec + 32);
    let den = bell(n - 1)?.to_hp(prec + 32);
    Ok(num.div(&den).with_prec(prec))
}

/// Independent series oracle for B_n: the partial sum
/// `(1/e) * sum_{k=1}^{K} k^n / k!` with a certified geometric tail bound,
/// rounded to the unique integer it encloses.
///
/// Fails with [`Error::Indeterminate`] when the tail plus the tracked
/// rounding budget cannot pin down a single integer at this precision.
pub fn bell_dobinski_oracle(n: u64, prec: u32) -> Result<BigNat> {
    if n == 0 {
        return Err(Error::Domain("series oracle needs n >= 1".into()));
    }
    let nu = u32::try_from(n).map_err(|_| Error::ResourceLimit {
        requested: n,
        cap: u32::MAX as u64,
    })?;

    let mut sum = HPReal::zero(prec);
    let mut factorial = Integer::from(1);
    let mut k: u64 = 0;
    let mut last_term = HPReal::zero(prec);

    let k_floor = 3 * n.max(8);
    let tail = loop {
        k += 1;
        factorial *= k;
        let power = Integer::from(k).pow(nu);
        let term = HPReal::from_integer(&power, prec).div(&HPReal::from_integer(&factorial, prec));
        sum = sum.add(&term);
        if k >= k_floor {
            // Ratio of consecutive terms, (1 + 1/k)^n / (k+1), decreasing in
            // k; certify it is < 1/2 and bound the remaining tail by the
            // geometric series from the current term.
            let ratio = term.div(&last_term);
            let rho = ratio.hi();
            if rho.is_finite() && rho < 0.5 {
                let t_hi = term.hi();
                // tail <= term * rho / (1 - rho), rounded up
                let num = Float::with_val_round(prec, &t_hi * &rho, rug::float::Round::Up).0;
                let den = Float::with_val_round(prec, 1 - rho.clone(), rug::float::Round::Down).0;
                let tail = Float::with_val_round(prec, &num / &den, rug::float::Round::Up).0;
                if tail < 0.1 {
                    break tail;
                }
            }
        }
        last_term = term;
    };

    let e = HPReal::e(prec);
    let value = sum.div(&e);
    // The omitted tail is positive: B_n lies in [value.lo, value.hi + tail/e].
    let tail_over_e = Float::with_val_round(
        prec,
        &tail / e.lo(),
        rug::float::Round::Up,
    )
    .0;

    let slack = Float::with_val_round(32, value.err_budget() + &tail_over_e, rug::float::Round::Up).0;
    if !(slack < 0.4) {
        return Err(Error::Indeterminate(format!(
            "series oracle for n = {n}: uncertainty {slack} >= 0.4"
        )));
    }

    let lo = value.lo();
    let hi = Float::with_val_round(prec, value.hi() + &tail_over_e, rug::float::Round::Up).0;
    let lo_int = Float::with_val(prec, lo.ceil_ref())
        .to_integer()
        .ok_or_else(|| Error::Indeterminate("series sum is not finite".into()))?;
    let hi_int = Float::with_val(prec, hi.floor_ref())
        .to_integer()
        .ok_or_else(|| Error::Indeterminate("series sum is not finite".into()))?;
    if lo_int != hi_int {
        return Err(Error::Indeterminate(format!(
            "series oracle for n = {n} brackets more than one integer"
        )));
    }
    Ok(BigNat(lo_int))
}
