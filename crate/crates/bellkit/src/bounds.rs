//! Theorem-backed enclosures for B_n and B_n/B_{n-1}, and the customizable
//! epsilon-parameterized error bounds with their optimizer.
//!
//! Every enclosure is a certified interval: the exact quantity provably lies
//! between `lo` and `hi` whenever `n >= valid_from`, with the working
//! rounding budget folded into the interval endpoints' balls.

use crate::asym::{log_e, log_e_star, q_factor};
use crate::error::{Error, Result};
use crate::hp::HPReal;
use crate::lambertw::lambert_w;
use rug::float::Round;
use rug::Float;

/// Which bound produced an enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundId {
    /// Two-sided second-order enclosure E_n (q_n ± 1.6 e^-2R), valid n >= 1.
    SecondOrder,
    /// First-order enclosure E_n (1 ± e^-R/11), valid n >= 11; upper side
    /// tightens to E_n itself from n = 311.
    FirstOrder,
    /// (1 - ln n/(5n)) E*_n <= B_n <= E*_n, valid n >= 2.
    StarSandwich,
    /// Elementary power bounds (n/(e ln n))^n <= B_n <= (3n/(4 ln n))^n,
    /// refined upper bound from n = 6.
    Elementary,
    /// |B_n/B_{n-1} - e^W(n)| <= (8/7)/W(n), valid n >= 1 (linear domain).
    RatioStep,
}

impl BoundId {
    pub fn label(self) -> &'static str {
        match self {
            BoundId::SecondOrder => "second-order",
            BoundId::FirstOrder => "first-order",
            BoundId::StarSandwich => "star-sandwich",
            BoundId::Elementary => "elementary",
            BoundId::RatioStep => "ratio-step",
        }
    }
}

impl std::fmt::Display for BoundId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Whether interval endpoints are logarithms of the bounded quantity or the
/// quantity itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Log,
    Linear,
}

/// Certified interval with provenance.
#[derive(Debug, Clone)]
pub struct Enclosure {
    pub lo: HPReal,
    pub hi: HPReal,
    pub scale: Scale,
    pub provenance: Vec<BoundId>,
    /// Minimal index for which the producing bound applies.
    pub valid_from: u64,
}

impl Enclosure {
    /// Certified containment: `Some(true)` when the value provably lies in
    /// [lo, hi], `Some(false)` when it provably does not, `None` when the
    /// comparison falls inside the rounding margin.
    pub fn contains(&self, value: &HPReal) -> Option<bool> {
        if self.lo.certainly_le(value) && value.certainly_le(&self.hi) {
            return Some(true);
        }
        if value.certainly_gt(&self.hi) || self.lo.certainly_gt(value) {
            return Some(false);
        }
        None
    }

    pub fn provenance_label(&self) -> String {
        self.provenance
            .iter()
            .map(|b| b.label())
            .collect::<Vec<_>>()
            .join("+")
    }
}

fn check_valid(check: &'static str, ok: bool, condition: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Validity {
            check,
            condition: condition.to_string(),
        })
    }
}

/// e^-R as a ball, computed exactly from the defining identity
/// e^-W(n+1) = W(n+1)/(n+1).
fn exp_neg_r(n: u64, r: &HPReal, prec: u32) -> HPReal {
    r.with_prec(prec).div(&HPReal::from_u64(n + 1, prec))
}

/// Interval for ln B_n from the second-order bound, given ln E_n and the
/// correction factor.
pub(crate) fn master_interval(
    log_e: &HPReal,
    qf: &crate::asym::CorrectionFactor,
    prec: u32,
) -> (HPReal, HPReal) {
    let p = prec + 16;
    let e2 = exp_neg_r(qf.n, &qf.r, p).pow_u32(2);
    let half = e2.mul(&HPReal::from_ratio(8, 5, p));
    let lo = log_e.add(&qf.q.sub(&half).ln()).with_prec(prec);
    let hi = log_e.add(&qf.q.add(&half).ln()).with_prec(prec);
    (lo, hi)
}

/// Second-order enclosure: B_n between E_n (q_n - 1.6 e^-2R) and
/// E_n (q_n + 1.6 e^-2R), R = W(n+1). Valid for every n >= 1.
pub fn enclosure_master(n: u64, prec: u32) -> Result<Enclosure> {
    check_valid("second-order enclosure", n >= 1, "n >= 1")?;
    let p = prec + 16;
    let e = log_e(n, p)?.log_value;
    let qf = q_factor(n, p)?;
    let (lo, hi) = master_interval(&e, &qf, prec);
    Ok(Enclosure {
        lo,
        hi,
        scale: Scale::Log,
        provenance: vec![BoundId::SecondOrder],
        valid_from: 1,
    })
}

pub(crate) fn prop_main_interval(
    log_e: &HPReal,
    r: &HPReal,
    n: u64,
    prec: u32,
) -> (HPReal, HPReal) {
    let p = prec + 16;
    let delta = exp_neg_r(n, r, p).div(&HPReal::from_u64(11, p));
    let one = HPReal::one(p);
    let lo = log_e.add(&one.sub(&delta).ln()).with_prec(prec);
    let hi = if n >= 311 {
        log_e.with_prec(prec)
    } else {
        log_e.add(&one.add(&delta).ln()).with_prec(prec)
    };
    (lo, hi)
}

/// First-order enclosure: |B_n/E_n - 1| <= e^-W(n+1)/11 for n >= 11, with
/// the upper side replaced by E_n itself once n >= 311.
pub fn enclosure_prop_main(n: u64, prec: u32) -> Result<Enclosure> {
    check_valid("first-order enclosure", n >= 11, "n >= 11")?;
    let p = prec + 16;
    let e = log_e(n, p)?.log_value;
    let r = lambert_w(&HPReal::from_u64(n + 1, p), p)?.w;
    let (lo, hi) = prop_main_interval(&e, &r, n, prec);
    Ok(Enclosure {
        lo,
        hi,
        scale: Scale::Log,
        provenance: vec![BoundId::FirstOrder],
        valid_from: 11,
    })
}

pub(crate) fn estar_interval(log_e_star: &HPReal, n: u64, prec: u32) -> (HPReal, HPReal) {
    let p = prec + 16;
    let shrink = HPReal::one(p)
        .sub(&HPReal::from_u64(n, p).ln().div(&HPReal::from_u64(5 * n, p)))
        .ln();
    (
        log_e_star.add(&shrink).with_prec(prec),
        log_e_star.with_prec(prec),
    )
}

/// Star-form sandwich: (1 - ln n/(5n)) E*_n <= B_n <= E*_n for n >= 2.
pub fn enclosure_estar(n: u64, prec: u32) -> Result<Enclosure> {
    check_valid("star-form sandwich", n >= 2, "n >= 2")?;
    let p = prec + 16;
    let s = log_e_star(n, p)?.log_value;
    let (lo, hi) = estar_interval(&s, n, prec);
    Ok(Enclosure {
        lo,
        hi,
        scale: Scale::Log,
        provenance: vec![BoundId::StarSandwich],
        valid_from: 2,
    })
}

/// The three elementary log-bounds at index n: lower, plain upper, and (for
/// n >= 6) the refined upper.
pub(crate) fn elementary_parts(n: u64, prec: u32) -> (HPReal, HPReal, Option<HPReal>) {
    let p = prec + 16;
    let nh = HPReal::from_u64(n, p);
    let ln_n = nh.ln();
    let ln_ln_n = ln_n.ln();
    let one = HPReal::one(p);

    // n (ln n - 1 - ln ln n)
    let lo = nh.mul(&ln_n.sub(&one).sub(&ln_ln_n)).with_prec(prec);
    // n (ln n - ln ln n + ln(3/4))
    let hi_power = nh
        .mul(&ln_n.sub(&ln_ln_n).add(&HPReal::from_ratio(3, 4, p).ln()))
        .with_prec(prec);
    let refined = (n >= 6).then(|| {
        nh.mul(
            &ln_n
                .sub(&one)
                .sub(&ln_ln_n)
                .add(&one.add(&ln_ln_n.mul(&HPReal::from_u64(3, p)).div(&ln_n)).ln()),
        )
        .with_prec(prec)
    });
    (lo, hi_power, refined)
}

/// Elementary power bounds: (n/(e ln n))^n <= B_n <= (3n/(4 ln n))^n for
/// n >= 2; from n = 6 the upper bound is the minimum with
/// (n/(e ln n) (1 + 3 ln ln n / ln n))^n.
pub fn enclosure_elementary(n: u64, prec: u32) -> Result<Enclosure> {
    check_valid("elementary bounds", n >= 2, "n >= 2")?;
    let (lo, hi_power, refined) = elementary_parts(n, prec);
    let hi = match refined {
        Some(r) if r.value() <= hi_power.value() => r,
        _ => hi_power,
    };
    Ok(Enclosure {
        lo,
        hi,
        scale: Scale::Log,
        provenance: vec![BoundId::Elementary],
        valid_from: 2,
    })
}

pub(crate) fn ratio_interval(w: &HPReal, n: u64, prec: u32) -> (HPReal, HPReal) {
    let p = prec + 16;
    let center = HPReal::from_u64(n, p).div(w);
    let half = HPReal::from_ratio(8, 7, p).div(w);
    (
        center.sub(&half).with_prec(prec),
        center.add(&half).with_prec(prec),
    )
}

/// Ratio enclosure: B_n/B_{n-1} within (8/7)/W(n) of e^W(n) = n/W(n), for
/// n >= 1. Linear domain; the magnitudes involved are only ~n/ln n.
pub fn ratio_enclosure(n: u64, prec: u32) -> Result<Enclosure> {
    check_valid("ratio enclosure", n >= 1, "n >= 1")?;
    let p = prec + 16;
    let w = lambert_w(&HPReal::from_u64(n, p), p)?.w;
    let (lo, hi) = ratio_interval(&w, n, prec);
    Ok(Enclosure {
        lo,
        hi,
        scale: Scale::Linear,
        provenance: vec![BoundId::RatioStep],
        valid_from: 1,
    })
}

/// Intersection of all log-domain enclosures valid at `n`. The intersection
/// is provably nonempty when every contributing theorem is correctly
/// implemented; an empty result is surfaced as a hard error, never clamped.
pub fn best_enclosure(n: u64, prec: u32) -> Result<Enclosure> {
    check_valid("best enclosure", n >= 1, "n >= 1")?;
    let mut parts: Vec<Enclosure> = vec![enclosure_master(n, prec)?];
    if n >= 11 {
        parts.push(enclosure_prop_main(n, prec)?);
    }
    if n >= 2 {
        parts.push(enclosure_estar(n, prec)?);
        parts.push(enclosure_elementary(n, prec)?);
    }

    // Outer-bound intersection: expand each endpoint by its budget, then
    // take max of lower ends and min of upper ends.
    let mut lo = parts[0].lo.lo();
    let mut hi = parts[0].hi.hi();
    for part in &parts[1..] {
        let l = part.lo.lo();
        let h = part.hi.hi();
        if l > lo {
            lo = l;
        }
        if h < hi {
            hi = h;
        }
    }
    if !(lo <= hi) {
        return Err(Error::EmptyIntersection { n });
    }
    let provenance = parts.iter().map(|p| p.provenance[0]).collect();
    Ok(Enclosure {
        lo: HPReal::with_error(lo, Float::new(32)),
        hi: HPReal::with_error(hi, Float::new(32)),
        scale: Scale::Log,
        provenance,
        valid_from: n,
    })
}

/// Certified bounds on the number of decimal digits of B_n, from the best
/// enclosure with directed rounding.
pub fn digit_count(n: u64, prec: u32) -> Result<(u64, u64)> {
    let enc = best_enclosure(n, prec)?;
    let p = prec + 16;
    let ln10_hi = HPReal::from_u64(10, p).ln().hi();
    let ln10_lo = HPReal::from_u64(10, p).ln().lo();
    // floor(log10 B) + 1 with outward rounding; B_n >= 1 so at least 1 digit.
    let log10_lo = Float::with_val_round(p, enc.lo.lo() / &ln10_hi, Round::Down).0;
    let log10_hi = Float::with_val_round(p, enc.hi.hi() / &ln10_lo, Round::Up).0;
    let d_lo = log10_lo.floor().to_f64() as i64 + 1;
    let d_hi = log10_hi.floor().to_f64() as i64 + 1;
    Ok((d_lo.max(1) as u64, d_hi.max(1) as u64))
}

// ---- customizable epsilon bounds ----

/// Report on the epsilon-parameterized error bounds at radius parameter `r`.
/// `j1_term` and `j234_term` are scaled by e^{2r}, so `total_coefficient`
/// is the total error divided by e^{-2r}.
#[derive(Debug, Clone)]
pub struct EpsilonBoundReport {
    pub r: HPReal,
    pub eps: HPReal,
    pub j1_term: HPReal,
    pub j234_term: HPReal,
    pub total_coefficient: HPReal,
}

fn require_ball(check: &'static str, cond: bool, name: &str) -> Result<()> {
    check_valid(check, cond, name)
}

/// Error bound for the vertical-segment contribution:
/// sqrt(2/pi) (1/eps) exp(-eps^2 e^r / 2 - r/2)
/// + (6/5) exp(e^r eps^4 / 22 - 2r)
/// + eps^7 exp(-eps^2 e^r / 2 + 5r/2) / (30 (eps^2 e^r - 5)).
///
/// Requires r >= 5, 0 < eps < 1 and eps^2 e^r > 5 (certified on balls).
pub fn j1_error_rhs(r: &HPReal, eps: &HPReal, prec: u32) -> Result<HPReal> {
    let p = prec + 16;
    let five = HPReal::from_u64(5, p);
    let one = HPReal::one(p);
    require_ball("j1 bound", five.certainly_le(r), "r >= 5")?;
    require_ball("j1 bound", eps.lo() > 0, "eps > 0")?;
    require_ball("j1 bound", eps.certainly_le(&one) && !eps.certainly_ge(&one), "eps < 1")?;
    let er = r.with_prec(p).exp();
    let s = eps.with_prec(p).pow_u32(2).mul(&er);
    require_ball("j1 bound", five.certainly_le(&s) && s.lo() > 5, "eps^2 e^r > 5")?;

    let half_s = s.half();
    let half_r = r.with_prec(p).half();

    let t1 = HPReal::from_u64(2, p)
        .div(&HPReal::pi(p))
        .sqrt()
        .div(&eps.with_prec(p))
        .mul(&half_s.neg().sub(&half_r).exp());
    let t2 = HPReal::from_ratio(6, 5, p).mul(
        &er.mul(&eps.with_prec(p).pow_u32(4))
            .div(&HPReal::from_u64(22, p))
            .sub(&r.with_prec(p).shl(1))
            .exp(),
    );
    let t3 = eps
        .with_prec(p)
        .pow_u32(7)
        .mul(&half_s.neg().add(&r.with_prec(p).mul(&HPReal::from_ratio(5, 2, p))).exp())
        .div(&s.sub(&five).mul(&HPReal::from_u64(30, p)));
    Ok(t1.add(&t2).add(&t3).with_prec(prec))
}

/// Error bound for the two horizontal slits:
/// exp(e^r (cos eps - 1) - r (1 - eps^2)/2). Requires r >= 5, 0 < eps < 1/2.
pub fn j23_rhs(r: &HPReal, eps: &HPReal, prec: u32) -> Result<HPReal> {
    let p = prec + 16;
    require_ball("j23 bound", HPReal::from_u64(5, p).certainly_le(r), "r >= 5")?;
    require_ball("j23 bound", eps.lo() > 0, "eps > 0")?;
    let half = HPReal::from_ratio(1, 2, p);
    require_ball("j23 bound", eps.hi() < 0.5, "eps < 1/2")?;
    let er = r.with_prec(p).exp();
    let one = HPReal::one(p);
    let arg = er
        .mul(&eps.with_prec(p).cos().sub(&one))
        .sub(&r.with_prec(p).mul(&one.sub(&eps.with_prec(p).pow_u32(2))).mul(&half));
    Ok(arg.exp().with_prec(prec))
}

/// Error bound for the big arc:
/// 3 [exp(e^r (cos eps - 1) - r/2) + r exp(-2 e^r / r + r/2)].
/// Requires r >= 4, 0 < eps < 1/2.
pub fn j4_rhs(r: &HPReal, eps: &HPReal, prec: u32) -> Result<HPReal> {
    let p = prec + 16;
    require_ball("j4 bound", HPReal::from_u64(4, p).certainly_le(r), "r >= 4")?;
    require_ball("j4 bound", eps.lo() > 0, "eps > 0")?;
    require_ball("j4 bound", eps.hi() < 0.5, "eps < 1/2")?;
    let er = r.with_prec(p).exp();
    let one = HPReal::one(p);
    let half_r = r.with_prec(p).half();
    let a = er.mul(&eps.with_prec(p).cos().sub(&one)).sub(&half_r).exp();
    let b = r
        .with_prec(p)
        .mul(&er.shl(1).div(&r.with_prec(p)).neg().add(&half_r).exp());
    Ok(a.add(&b).mul(&HPReal::from_u64(3, p)).with_prec(prec))
}

/// Combined bound for everything except the vertical segment:
/// 4 exp(-11 eps^2 e^r / 24 - 3r/8) + 3 r exp(-2 e^r / r + r/2).
/// Requires r >= 5, 0 < eps < 1/2.
pub fn j234_rhs(r: &HPReal, eps: &HPReal, prec: u32) -> Result<HPReal> {
    let p = prec + 16;
    require_ball("j234 bound", HPReal::from_u64(5, p).certainly_le(r), "r >= 5")?;
    require_ball("j234 bound", eps.lo() > 0, "eps > 0")?;
    require_ball("j234 bound", eps.hi() < 0.5, "eps < 1/2")?;
    let er = r.with_prec(p).exp();
    let s = eps.with_prec(p).pow_u32(2).mul(&er);
    let a = s
        .mul(&HPReal::from_ratio(11, 24, p))
        .neg()
        .sub(&r.with_prec(p).mul(&HPReal::from_ratio(3, 8, p)))
        .exp()
        .mul(&HPReal::from_u64(4, p));
    let half_r = r.with_prec(p).half();
    let b = r
        .with_prec(p)
        .mul(&er.shl(1).div(&r.with_prec(p)).neg().add(&half_r).exp())
        .mul(&HPReal::from_u64(3, p));
    Ok(a.add(&b).with_prec(prec))
}

/// Total error divided by e^{-2r}, evaluated with the exponent shift folded
/// into each term so extreme arguments stay representable.
pub fn total_error_coefficient(r: &HPReal, eps: &HPReal, prec: u32) -> Result<EpsilonBoundReport> {
    let p = prec + 16;
    let five = HPReal::from_u64(5, p);
    require_ball("total error coefficient", five.certainly_le(r), "r >= 5")?;
    require_ball("total error coefficient", eps.lo() > 0, "eps > 0")?;
    require_ball("total error coefficient", eps.hi() < 0.5, "eps < 1/2")?;
    let er = r.with_prec(p).exp();
    let s = eps.with_prec(p).pow_u32(2).mul(&er);
    require_ball("total error coefficient", s.lo() > 5, "eps^2 e^r > 5")?;

    let rw = r.with_prec(p);
    let ew = eps.with_prec(p);
    let half_s = s.half();

    // j1 * e^{2r}
    let t1 = HPReal::from_u64(2, p)
        .div(&HPReal::pi(p))
        .sqrt()
        .div(&ew)
        .mul(&half_s.neg().add(&rw.mul(&HPReal::from_ratio(3, 2, p))).exp());
    let t2 = HPReal::from_ratio(6, 5, p)
        .mul(&er.mul(&ew.pow_u32(4)).div(&HPReal::from_u64(22, p)).exp());
    let t3 = ew
        .pow_u32(7)
        .mul(&half_s.neg().add(&rw.mul(&HPReal::from_ratio(9, 2, p))).exp())
        .div(&s.sub(&five).mul(&HPReal::from_u64(30, p)));
    let j1_term = t1.add(&t2).add(&t3);

    // j234 * e^{2r}
    let a = s
        .mul(&HPReal::from_ratio(11, 24, p))
        .neg()
        .add(&rw.mul(&HPReal::from_ratio(13, 8, p)))
        .exp()
        .mul(&HPReal::from_u64(4, p));
    let b = rw
        .mul(&er.shl(1).div(&rw).neg().add(&rw.mul(&HPReal::from_ratio(5, 2, p))).exp())
        .mul(&HPReal::from_u64(3, p));
    let j234_term = a.add(&b);

    let total = j1_term.add(&j234_term);
    Ok(EpsilonBoundReport {
        r: r.with_prec(prec),
        eps: eps.with_prec(prec),
        j1_term: j1_term.with_prec(prec),
        j234_term: j234_term.with_prec(prec),
        total_coefficient: total.with_prec(prec),
    })
}

/// Feasible open interval for eps at a given r: the lower guard keeps
/// eps^2 e^r away from the pole at 5, the upper end respects eps < 1/2.
fn feasible_interval(r: &HPReal, prec: u32) -> (Float, Float) {
    let p = prec + 16;
    let lo = HPReal::from_decimal("5.01", p)
        .mul(&r.with_prec(p).neg().exp())
        .sqrt();
    let hi = HPReal::from_decimal("0.4999999995", p);
    (lo.value().clone(), hi.value().clone())
}

/// Deterministic minimizer of [`total_error_coefficient`] in eps for fixed
/// r >= 5: a 512-point log-spaced scan brackets the minimum, then a
/// golden-section refinement runs in log space to a relative tolerance of
/// 1e-6 on eps. When the refined point disagrees with the scan minimum by
/// more than 1%, the scan point wins.
pub fn optimize_epsilon(r: &HPReal, prec: u32) -> Result<EpsilonBoundReport> {
    require_ball(
        "epsilon optimizer",
        HPReal::from_u64(5, prec).certainly_le(r),
        "r >= 5",
    )?;
    let p = prec;
    let (lo, hi) = feasible_interval(r, p);
    let llo = Float::with_val(p, lo.ln_ref());
    let lhi = Float::with_val(p, hi.ln_ref());

    let objective = |log_eps: &Float| -> Float {
        let eps = HPReal::with_error(Float::with_val(p, log_eps.exp_ref()), Float::new(32));
        match total_error_coefficient(r, &eps, p) {
            Ok(rep) => rep.total_coefficient.value().clone(),
            Err(_) => Float::with_val(p, rug::float::Special::Infinity),
        }
    };

    const SCAN_POINTS: u32 = 512;
    let step = Float::with_val(p, &lhi - &llo) / SCAN_POINTS;
    let mut best_i = 0u32;
    let mut best_val = Float::with_val(p, rug::float::Special::Infinity);
    for i in 0..=SCAN_POINTS {
        let x = Float::with_val(p, &llo + Float::with_val(p, &step * i));
        let v = objective(&x);
        if v < best_val {
            best_val = v;
            best_i = i;
        }
    }
    let scan_log = Float::with_val(p, &llo + Float::with_val(p, &step * best_i));

    // Golden-section on the bracketing neighbors of the scan minimum.
    let golden = {
        let mut a = Float::with_val(p, &scan_log - &step);
        let mut b = Float::with_val(p, &scan_log + &step);
        if a < llo {
            a = llo.clone();
        }
        if b > lhi {
            b = lhi.clone();
        }
        let inv_phi = (Float::with_val(p, 5).sqrt() - 1u32) / 2u32;
        let mut c = Float::with_val(p, &b - Float::with_val(p, &b - &a) * &inv_phi);
        let mut d = Float::with_val(p, &a + Float::with_val(p, &b - &a) * &inv_phi);
        let mut fc = objective(&c);
        let mut fd = objective(&d);
        let tol = Float::with_val(p, 1e-6);
        while Float::with_val(p, &b - &a) > tol {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = Float::with_val(p, &b - Float::with_val(p, &b - &a) * &inv_phi);
                fc = objective(&c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = Float::with_val(p, &a + Float::with_val(p, &b - &a) * &inv_phi);
                fd = objective(&d);
            }
        }
        Float::with_val(p, &a + &b) >> 1
    };

    let golden_val = objective(&golden);
    let chosen = if golden_val.is_finite()
        && Float::with_val(p, &golden_val - &best_val)
            <= Float::with_val(p, &best_val * &Float::with_val(p, 0.01f64))
    {
        golden
    } else {
        scan_log
    };
    let eps = HPReal::with_error(Float::with_val(p, chosen.exp_ref()), Float::new(32));
    total_error_coefficient(r, &eps, prec)
}
