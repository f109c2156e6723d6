//! Log-domain evaluation of the two saddle-point approximants to B_n, the
//! second-order correction factor, and comparison estimators.
//!
//! Everything here stays in the log domain; magnitudes like B_2000 have
//! thousands of digits and are only exponentiated at presentation time.

use crate::error::{Error, Result};
use crate::hp::HPReal;
use crate::lambertw::{lambert_w, lambert_w_seeded};
use rug::Float;

/// A positive quantity represented by its natural logarithm.
#[derive(Debug, Clone)]
pub struct LogMagnitude {
    pub log_value: HPReal,
    /// Which estimator produced this magnitude.
    pub provenance: &'static str,
}

/// The second-order multiplier q = Q(W(n+1)) applied to the saddle form.
#[derive(Debug, Clone)]
pub struct CorrectionFactor {
    pub q: HPReal,
    /// R = W(n+1).
    pub r: HPReal,
    pub n: u64,
}

/// ln n! by direct log-summation: n-1 high-precision terms with the budget
/// tracked per term. O(n); sweeps should use [`Evaluator`], which amortizes
/// the prefix.
pub fn log_factorial(n: u64, prec: u32) -> HPReal {
    let mut sum = HPReal::zero(prec);
    for k in 2..=n {
        sum = sum.add(&HPReal::from_u64(k, prec).ln());
    }
    sum
}

/// ln E*_n = e^W(n) + n W(n) - (n+1) - ln(1 + W(n))/2, with e^W(n)
/// evaluated as n/W(n).
pub fn log_e_star(n: u64, prec: u32) -> Result<LogMagnitude> {
    if n < 1 {
        return Err(Error::Domain("star form needs n >= 1".into()));
    }
    let p = prec + 16;
    let w = lambert_w(&HPReal::from_u64(n, p), p)?.w;
    Ok(log_e_star_parts(n, &w, prec))
}

pub(crate) fn log_e_star_parts(n: u64, w: &HPReal, prec: u32) -> LogMagnitude {
    let p = prec + 16;
    let nh = HPReal::from_u64(n, p);
    let ew = nh.div(w);
    let log_value = ew
        .add(&nh.mul(w))
        .sub(&HPReal::from_u64(n + 1, p))
        .sub(&HPReal::one(p).add(w).ln().half())
        .with_prec(prec);
    LogMagnitude {
        log_value,
        provenance: "star-form",
    }
}

/// ln E_n = ln n! + (e^R - 1) - n ln R - ln(2 pi (n+1) (R+1))/2 with
/// R = W(n+1) and e^R evaluated as (n+1)/R.
///
/// Well-defined for every n >= 0 (the empty log-factorial is zero).
pub fn log_e(n: u64, prec: u32) -> Result<LogMagnitude> {
    let p = prec + 16;
    let lnfact = log_factorial(n, p);
    let r = lambert_w(&HPReal::from_u64(n + 1, p), p)?.w;
    Ok(log_e_parts(n, &lnfact, &r, prec))
}

pub(crate) fn log_e_parts(n: u64, lnfact: &HPReal, r: &HPReal, prec: u32) -> LogMagnitude {
    let p = prec + 16;
    let np1 = HPReal::from_u64(n + 1, p);
    let e_r = np1.div(r);
    let two_pi = HPReal::pi(p).shl(1);
    let half_log = two_pi
        .mul(&np1)
        .mul(&r.add(&HPReal::one(p)))
        .ln()
        .half();
    let log_value = lnfact
        .add(&e_r.sub(&HPReal::one(p)))
        .sub(&HPReal::from_u64(n, p).mul(&r.ln()))
        .sub(&half_log)
        .with_prec(prec);
    LogMagnitude {
        log_value,
        provenance: "saddle-form",
    }
}

/// Q(x) = 1 - e^-x (1 - 3/(2x) - 10/x^2 - 9/x^3 + 1/x^4) / (12 (1 + 1/x)^3).
pub fn q_of_r(r: &HPReal, prec: u32) -> HPReal {
    let p = prec + 16;
    let r = r.with_prec(p);
    let one = HPReal::one(p);
    let inv = one.div(&r);
    let inv2 = inv.mul(&inv);
    let inv3 = inv2.mul(&inv);
    let inv4 = inv2.mul(&inv2);
    let numer = one
        .sub(&inv.mul(&HPReal::from_ratio(3, 2, p)))
        .sub(&inv2.mul(&HPReal::from_u64(10, p)))
        .sub(&inv3.mul(&HPReal::from_u64(9, p)))
        .add(&inv4);
    let denom = one.add(&inv).pow_u32(3).mul(&HPReal::from_u64(12, p));
    one.sub(&r.neg().exp().mul(&numer.div(&denom)))
        .with_prec(prec)
}

/// q_n = Q(W(n+1)).
pub fn q_factor(n: u64, prec: u32) -> Result<CorrectionFactor> {
    let p = prec + 16;
    let r = lambert_w(&HPReal::from_u64(n + 1, p), p)?.w;
    Ok(CorrectionFactor {
        q: q_of_r(&r, prec),
        r: r.with_prec(prec),
        n,
    })
}

/// ln(E_n q_n): the center of the second-order enclosure.
pub fn second_order_estimate(n: u64, prec: u32) -> Result<LogMagnitude> {
    if n < 1 {
        return Err(Error::Domain("second-order estimate needs n >= 1".into()));
    }
    let e = log_e(n, prec + 16)?;
    let q = q_factor(n, prec + 16)?;
    Ok(LogMagnitude {
        log_value: e.log_value.add(&q.q.ln()).with_prec(prec),
        provenance: "second-order",
    })
}

/// n ln(0.792 n / ln(n+1)): log of the classic power-form upper bound.
/// Comparison-only; it does not track the true asymptotics.
pub fn power_upper_estimate(n: u64, prec: u32) -> Result<LogMagnitude> {
    if n < 1 {
        return Err(Error::Domain("power-form estimate needs n >= 1".into()));
    }
    let p = prec + 16;
    let c = HPReal::from_decimal("0.792", p);
    let nh = HPReal::from_u64(n, p);
    let inner = c.mul(&nh).div(&HPReal::from_u64(n + 1, p).ln());
    Ok(LogMagnitude {
        log_value: nh.mul(&inner.ln()).with_prec(prec),
        provenance: "power-upper",
    })
}

/// Shared tables for sweeps over contiguous index ranges: the running
/// log-factorial and the Lambert W chain, each computed once and then read
/// concurrently.
pub struct Evaluator {
    prec: u32,
    /// lnfact[n] = ln n!, for n <= lnfact_max.
    lnfact: Vec<HPReal>,
    /// w[k] = W(k) for 1 <= k <= w_max; w[0] = 0.
    w: Vec<HPReal>,
}

impl Evaluator {
    /// Build tables at the given precision. `lnfact_max` may be zero when no
    /// selected check needs factorials.
    pub fn build(prec: u32, lnfact_max: u64, w_max: u64) -> Result<Evaluator> {
        let p = prec + 16;
        let mut lnfact = Vec::with_capacity(lnfact_max as usize + 1);
        lnfact.push(HPReal::zero(p));
        let mut acc = HPReal::zero(p);
        for k in 1..=lnfact_max {
            if k >= 2 {
                acc = acc.add(&HPReal::from_u64(k, p).ln());
            }
            lnfact.push(acc.clone());
        }

        let mut w = Vec::with_capacity(w_max as usize + 1);
        w.push(HPReal::zero(p));
        let mut seed: Option<Float> = None;
        for k in 1..=w_max {
            let wv = lambert_w_seeded(&HPReal::from_u64(k, p), p, seed.as_ref())?;
            seed = Some(wv.w.value().clone());
            w.push(wv.w);
        }
        Ok(Evaluator { prec, lnfact, w })
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn w_max(&self) -> u64 {
        self.w.len() as u64 - 1
    }

    pub fn lnfact_max(&self) -> u64 {
        self.lnfact.len() as u64 - 1
    }

    /// W(k).
    pub fn w(&self, k: u64) -> &HPReal {
        &self.w[k as usize]
    }

    pub fn lnfact(&self, n: u64) -> &HPReal {
        &self.lnfact[n as usize]
    }

    pub fn log_e(&self, n: u64) -> LogMagnitude {
        log_e_parts(n, self.lnfact(n), self.w(n + 1), self.prec)
    }

    pub fn log_e_star(&self, n: u64) -> LogMagnitude {
        log_e_star_parts(n, self.w(n), self.prec)
    }

    pub fn q(&self, n: u64) -> CorrectionFactor {
        CorrectionFactor {
            q: q_of_r(self.w(n + 1), self.prec),
            r: self.w(n + 1).clone(),
            n,
        }
    }
}
