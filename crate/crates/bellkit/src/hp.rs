//! High-precision reals with a tracked rounding-error budget.
//!
//! [`HPReal`] is a ball: an MPFR float carrying an upper bound on the
//! accumulated absolute rounding error. Every operation rounds the value to
//! nearest and pushes a sound, upward-rounded error bound through the usual
//! first-order propagation rules. Comparisons between balls either resolve
//! with certainty or report an overlap, which callers surface as
//! INDETERMINATE and answer by escalating precision — never by guessing.
//!
//! The error budget lives in a 32-bit float of its own, so it keeps a full
//! exponent range even when values are astronomically large or small. An
//! operation that cannot bound its error (division by a ball straddling
//! zero, logarithm of a ball touching zero) yields an infinite budget,
//! which poisons every comparison downstream.

use rug::float::{exp_max, exp_min, Constant, Round};
use rug::Float;
use std::cmp::Ordering;

/// Working precision, in bits, used when the caller does not choose one.
pub const DEFAULT_PRECISION: u32 = 192;

/// Precision of the error budget. Only its exponent range matters.
const ERR_PREC: u32 = 32;

/// Upward-rounded evaluation of an error-budget expression.
macro_rules! eup {
    ($e:expr) => {
        Float::with_val_round(ERR_PREC, $e, Round::Up).0
    };
}

/// Downward-rounded evaluation (for denominators and other lower bounds).
macro_rules! edown {
    ($e:expr) => {
        Float::with_val_round(ERR_PREC, $e, Round::Down).0
    };
}

/// High-precision real with explicit working precision and rounding-error
/// budget. The true quantity is guaranteed to lie in
/// `[value - err_budget, value + err_budget]`.
#[derive(Debug, Clone)]
pub struct HPReal {
    value: Float,
    err: Float,
}

/// Result of comparing two balls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    /// Every point of the left ball is strictly below every point of the right.
    CertainlyLess,
    /// Every point of the left ball is strictly above every point of the right.
    CertainlyGreater,
    /// The balls overlap; the comparison cannot be certified at this precision.
    Overlap,
}

fn err_zero() -> Float {
    Float::new(ERR_PREC)
}

fn err_inf() -> Float {
    Float::with_val(ERR_PREC, rug::float::Special::Infinity)
}

/// Upper bound on the rounding error committed by an operation that produced
/// `r` with ternary result `ord` (`Equal` means the result was exact).
fn round_err(r: &Float, ord: Ordering) -> Float {
    if ord == Ordering::Equal {
        return err_zero();
    }
    if r.is_nan() {
        return err_inf();
    }
    if r.is_infinite() {
        // Overflow; lo()/hi() special-case infinite values instead.
        return err_zero();
    }
    match r.get_exp() {
        // One full ulp covers the half-ulp of round-to-nearest with slack.
        Some(e) => Float::with_val(ERR_PREC, 1) << (e - r.prec() as i32),
        // A nonzero true value rounded to zero: bounded by the underflow
        // threshold.
        None => Float::with_val(ERR_PREC, 1) << (exp_min() + 64),
    }
}

/// |v| rounded up to the error precision.
fn abs_up(v: &Float) -> Float {
    eup!(v.abs_ref())
}

impl HPReal {
    // ---- constructors ----

    pub fn zero(prec: u32) -> Self {
        HPReal {
            value: Float::new(prec),
            err: err_zero(),
        }
    }

    pub fn one(prec: u32) -> Self {
        HPReal {
            value: Float::with_val(prec, 1),
            err: err_zero(),
        }
    }

    pub fn from_u64(n: u64, prec: u32) -> Self {
        let (value, ord) = Float::with_val_round(prec, n, Round::Nearest);
        let err = round_err(&value, ord);
        HPReal { value, err }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        let (value, ord) = Float::with_val_round(prec, n, Round::Nearest);
        let err = round_err(&value, ord);
        HPReal { value, err }
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        let (value, ord) = Float::with_val_round(prec, x, Round::Nearest);
        let err = round_err(&value, ord);
        HPReal { value, err }
    }

    pub fn from_integer(n: &rug::Integer, prec: u32) -> Self {
        let (value, ord) = Float::with_val_round(prec, n, Round::Nearest);
        let err = round_err(&value, ord);
        HPReal { value, err }
    }

    /// Parse a decimal literal, rounding once to `prec` bits. Used for
    /// decimal constants such as `0.792` that are not binary-representable.
    pub fn from_decimal(s: &str, prec: u32) -> Self {
        Self::try_from_decimal(s, prec).expect("valid decimal literal")
    }

    pub fn try_from_decimal(s: &str, prec: u32) -> Option<Self> {
        let parsed = Float::parse(s).ok()?;
        let (value, ord) = Float::with_val_round(prec, parsed, Round::Nearest);
        let err = round_err(&value, ord);
        Some(HPReal { value, err })
    }

    /// Exact ratio p/q rounded once.
    pub fn from_ratio(p: i64, q: u64, prec: u32) -> Self {
        let num = HPReal::from_i64(p, prec);
        let den = HPReal::from_u64(q, prec);
        num.div(&den)
    }

    /// A ball constructed from an already-certified value and error bound.
    pub fn with_error(value: Float, err: Float) -> Self {
        let err = if err.is_sign_negative() { -err } else { err };
        HPReal {
            value,
            err: eup!(&err),
        }
    }

    pub fn pi(prec: u32) -> Self {
        let (value, ord) = Float::with_val_round(prec, Constant::Pi, Round::Nearest);
        let err = round_err(&value, ord);
        HPReal { value, err }
    }

    /// Euler's number, as `exp(1)`.
    pub fn e(prec: u32) -> Self {
        HPReal::one(prec).exp()
    }

    // ---- accessors ----

    pub fn prec(&self) -> u32 {
        self.value.prec()
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn err_budget(&self) -> &Float {
        &self.err
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.err.is_finite()
    }

    /// Certified lower end of the ball, at full precision.
    pub fn lo(&self) -> Float {
        let p = self.prec();
        if self.value.is_nan() || self.err.is_nan() {
            return Float::with_val(p, rug::float::Special::Nan);
        }
        if self.err.is_infinite() {
            return Float::with_val(p, rug::float::Special::NegInfinity);
        }
        if self.value.is_infinite() {
            return if self.value.is_sign_positive() {
                // Overflow to +inf certifies the true value is huge.
                Float::with_val(p, 1) << (exp_max() - 64)
            } else {
                Float::with_val(p, rug::float::Special::NegInfinity)
            };
        }
        Float::with_val_round(p, &self.value - &self.err, Round::Down).0
    }

    /// Certified upper end of the ball, at full precision.
    pub fn hi(&self) -> Float {
        let p = self.prec();
        if self.value.is_nan() || self.err.is_nan() {
            return Float::with_val(p, rug::float::Special::Nan);
        }
        if self.err.is_infinite() {
            return Float::with_val(p, rug::float::Special::Infinity);
        }
        if self.value.is_infinite() {
            return if self.value.is_sign_positive() {
                Float::with_val(p, rug::float::Special::Infinity)
            } else {
                -(Float::with_val(p, 1) << (exp_max() - 64))
            };
        }
        Float::with_val_round(p, &self.value + &self.err, Round::Up).0
    }

    /// True when the budget has drifted past `max(1, |value|) * 2^(-prec/2)`,
    /// the point at which callers should redo the computation at doubled
    /// precision.
    pub fn needs_escalation(&self) -> bool {
        if self.value.is_nan() || !self.err.is_finite() {
            return true;
        }
        if self.err.is_zero() {
            return false;
        }
        let mut scale = abs_up(&self.value);
        if scale < 1 {
            scale = Float::with_val(ERR_PREC, 1);
        }
        let threshold = scale >> (self.prec() / 2) as i32;
        self.err > threshold
    }

    // ---- arithmetic ----

    fn combine(&self, rhs: &HPReal) -> u32 {
        self.prec().max(rhs.prec())
    }

    pub fn add(&self, rhs: &HPReal) -> HPReal {
        let (value, ord) =
            Float::with_val_round(self.combine(rhs), &self.value + &rhs.value, Round::Nearest);
        let r = round_err(&value, ord);
        let err = eup!(&self.err + &rhs.err);
        let err = eup!(&err + &r);
        HPReal { value, err }
    }

    pub fn sub(&self, rhs: &HPReal) -> HPReal {
        let (value, ord) =
            Float::with_val_round(self.combine(rhs), &self.value - &rhs.value, Round::Nearest);
        let r = round_err(&value, ord);
        let err = eup!(&self.err + &rhs.err);
        let err = eup!(&err + &r);
        HPReal { value, err }
    }

    pub fn neg(&self) -> HPReal {
        HPReal {
            value: Float::with_val(self.prec(), -&self.value),
            err: self.err.clone(),
        }
    }

    pub fn abs(&self) -> HPReal {
        HPReal {
            value: Float::with_val(self.prec(), self.value.abs_ref()),
            err: self.err.clone(),
        }
    }

    pub fn mul(&self, rhs: &HPReal) -> HPReal {
        let (value, ord) =
            Float::with_val_round(self.combine(rhs), &self.value * &rhs.value, Round::Nearest);
        let r = round_err(&value, ord);
        if self.err.is_infinite() || rhs.err.is_infinite() {
            return HPReal { value, err: err_inf() };
        }
        // |a||db| + |b||da| + da*db + rounding
        let mut err = eup!(abs_up(&self.value) * &rhs.err);
        err = eup!(&err + eup!(abs_up(&rhs.value) * &self.err));
        err = eup!(&err + eup!(&self.err * &rhs.err));
        err = eup!(&err + &r);
        HPReal { value, err }
    }

    pub fn div(&self, rhs: &HPReal) -> HPReal {
        let p = self.combine(rhs);
        let (value, ord) = Float::with_val_round(p, &self.value / &rhs.value, Round::Nearest);
        let r = round_err(&value, ord);
        if self.err.is_infinite() || rhs.err.is_infinite() {
            return HPReal { value, err: err_inf() };
        }
        // Denominator magnitude bounded away from zero, rounded down.
        let bl = edown!(rhs.value.abs_ref());
        let bl = edown!(&bl - &rhs.err);
        if !(bl > 0) {
            return HPReal { value, err: err_inf() };
        }
        // (|da| + (|a/b| + ulp) |db|) / (|b| - db) + rounding
        let q_hi = eup!(abs_up(&value) + &r);
        let mut err = eup!(&q_hi * &rhs.err);
        err = eup!(&err + &self.err);
        err = Float::with_val_round(ERR_PREC, &err / &bl, Round::Up).0;
        err = eup!(&err + &r);
        HPReal { value, err }
    }

    pub fn recip(&self) -> HPReal {
        HPReal::one(self.prec()).div(self)
    }

    /// Exact scaling by a power of two.
    pub fn shl(&self, k: i32) -> HPReal {
        HPReal {
            value: self.value.clone() << k,
            err: self.err.clone() << k,
        }
    }

    pub fn half(&self) -> HPReal {
        self.shl(-1)
    }

    /// Re-round to a different working precision.
    pub fn with_prec(&self, prec: u32) -> HPReal {
        let (value, ord) = Float::with_val_round(prec, &self.value, Round::Nearest);
        let r = round_err(&value, ord);
        let err = eup!(&self.err + &r);
        HPReal { value, err }
    }

    pub fn ln(&self) -> HPReal {
        let p = self.prec();
        let (value, ord) = Float::with_val_round(p, self.value.ln_ref(), Round::Nearest);
        let r = round_err(&value, ord);
        if self.err.is_infinite() {
            return HPReal { value, err: err_inf() };
        }
        if self.err.is_zero() {
            return HPReal { value, err: r };
        }
        // |ln t - ln v| <= err / (v - err), valid only when v - err > 0.
        let vl = edown!(&self.value);
        let vl = edown!(&vl - &self.err);
        if !(vl > 0) {
            return HPReal { value, err: err_inf() };
        }
        let prop = Float::with_val_round(ERR_PREC, &self.err / &vl, Round::Up).0;
        let err = eup!(&prop + &r);
        HPReal { value, err }
    }

    pub fn exp(&self) -> HPReal {
        let p = self.prec();
        let (value, ord) = Float::with_val_round(p, self.value.exp_ref(), Round::Nearest);
        let r = round_err(&value, ord);
        if self.err.is_infinite() {
            return HPReal { value, err: err_inf() };
        }
        if value.is_infinite() {
            // Overflow: sound only while the input budget cannot drag the
            // true value below the huge-value floor used by lo().
            let err = if self.err <= 1u32 { err_zero() } else { err_inf() };
            return HPReal { value, err };
        }
        if self.err.is_zero() {
            return HPReal { value, err: r };
        }
        // |e^t - e^v| <= e^v * expm1(err), with e^v <= value + ulp
        let grow = Float::with_val_round(ERR_PREC, self.err.exp_m1_ref(), Round::Up).0;
        let vu = eup!(abs_up(&value) + &r);
        let prop = eup!(&vu * &grow);
        let err = eup!(&prop + &r);
        HPReal { value, err }
    }

    pub fn sqrt(&self) -> HPReal {
        let p = self.prec();
        let (value, ord) = Float::with_val_round(p, self.value.sqrt_ref(), Round::Nearest);
        let r = round_err(&value, ord);
        if self.err.is_infinite() {
            return HPReal { value, err: err_inf() };
        }
        if self.err.is_zero() {
            return HPReal { value, err: r };
        }
        let vl = edown!(&self.value);
        let vl = edown!(&vl - &self.err);
        if vl > 0 {
            // err / (2 sqrt(v - err))
            let root = edown!(vl.sqrt_ref());
            let den = edown!(&root + &root);
            let prop = Float::with_val_round(ERR_PREC, &self.err / &den, Round::Up).0;
            let err = eup!(&prop + &r);
            HPReal { value, err }
        } else {
            // Ball touches zero: |sqrt t - sqrt v| <= sqrt(err) on [0, v+err].
            let prop = eup!(self.err.sqrt_ref());
            let err = eup!(&prop + &r);
            HPReal { value, err }
        }
    }

    pub fn cos(&self) -> HPReal {
        let p = self.prec();
        let (value, ord) = Float::with_val_round(p, self.value.cos_ref(), Round::Nearest);
        let r = round_err(&value, ord);
        // |cos'| <= 1
        let err = eup!(&self.err + &r);
        HPReal { value, err }
    }

    /// Integer power by binary exponentiation over ball multiplication.
    pub fn pow_u32(&self, k: u32) -> HPReal {
        if k == 0 {
            return HPReal::one(self.prec());
        }
        let mut base = self.clone();
        let mut acc: Option<HPReal> = None;
        let mut k = k;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul(&base);
        }
        acc.unwrap()
    }

    // ---- comparisons ----

    pub fn cmp_ball(&self, rhs: &HPReal) -> Rel {
        let a_hi = self.hi();
        let b_lo = rhs.lo();
        if a_hi.is_nan() || b_lo.is_nan() {
            return Rel::Overlap;
        }
        if a_hi < b_lo {
            return Rel::CertainlyLess;
        }
        let a_lo = self.lo();
        let b_hi = rhs.hi();
        if a_lo.is_nan() || b_hi.is_nan() {
            return Rel::Overlap;
        }
        if a_lo > b_hi {
            return Rel::CertainlyGreater;
        }
        Rel::Overlap
    }

    /// Certifies `self <= rhs` (non-strict).
    pub fn certainly_le(&self, rhs: &HPReal) -> bool {
        let a = self.hi();
        let b = rhs.lo();
        !a.is_nan() && !b.is_nan() && a <= b
    }

    /// Certifies that `self <= rhs` is violated.
    pub fn certainly_gt(&self, rhs: &HPReal) -> bool {
        let a = self.lo();
        let b = rhs.hi();
        !a.is_nan() && !b.is_nan() && a > b
    }

    pub fn certainly_ge(&self, rhs: &HPReal) -> bool {
        rhs.certainly_le(self)
    }

    // ---- formatting ----

    /// Deterministic decimal rendering with the given number of significant
    /// digits.
    pub fn to_sig_string(&self, digits: usize) -> String {
        float_sig_string(&self.value, digits)
    }
}

/// Deterministic scientific rendering of a raw float.
pub fn float_sig_string(f: &Float, digits: usize) -> String {
    if f.is_nan() {
        return "nan".to_string();
    }
    if f.is_infinite() {
        return if f.is_sign_positive() { "inf" } else { "-inf" }.to_string();
    }
    if f.is_zero() {
        let zeros = "0".repeat(digits.saturating_sub(1));
        return format!("0.{zeros}e0");
    }
    // rug interprets the format precision as total significant digits.
    format!("{:.*e}", digits, f)
}

impl std::fmt::Display for HPReal {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "{}", self.to_sig_string(12))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait<&HPReal> for &HPReal {
            type Output = HPReal;
            fn $method(self, rhs: &HPReal) -> HPReal {
                HPReal::$method(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl std::ops::Neg for &HPReal {
    type Output = HPReal;
    fn neg(self) -> HPReal {
        HPReal::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rug::ops::Pow;

    fn ball_contains(b: &HPReal, truth: &Float) -> bool {
        let lo = b.lo();
        let hi = b.hi();
        lo <= *truth && *truth <= hi
    }

    #[test]
    fn exact_small_integers_have_zero_budget() {
        let x = HPReal::from_u64(12345, 64);
        assert!(x.err_budget().is_zero());
        let y = HPReal::from_f64(0.5, 64);
        assert!(y.err_budget().is_zero());
    }

    #[test]
    fn decimal_parse_carries_one_ulp() {
        let x = HPReal::from_decimal("0.792", 96);
        assert!(!x.err_budget().is_zero());
        let hi = x.hi();
        let lo = x.lo();
        assert!(lo < 0.7921 && hi > 0.7919);
    }

    #[test]
    fn ln_of_zero_straddling_ball_poisons_budget() {
        let tiny = HPReal::with_error(Float::with_val(64, 1e-30), Float::with_val(32, 1e-20));
        let l = tiny.ln();
        assert!(l.err_budget().is_infinite());
        assert_eq!(l.cmp_ball(&HPReal::zero(64)), Rel::Overlap);
    }

    #[test]
    fn division_by_straddling_ball_poisons_budget() {
        let denom = HPReal::with_error(Float::with_val(64, 1e-10), Float::with_val(32, 1.0));
        let q = HPReal::one(64).div(&denom);
        assert!(q.err_budget().is_infinite());
    }

    #[test]
    fn exp_underflow_keeps_positive_budget() {
        let x = HPReal::from_f64(-8.0e8, 64);
        let e = x.exp();
        // exp(-8e8) underflows the representable range but must not be
        // certified as exactly zero.
        assert!(e.hi() > 0);
    }

    #[test]
    fn exp_overflow_certifies_huge_lower_end() {
        let x = HPReal::from_f64(8.0e8, 64);
        let e = x.exp();
        assert!(e.value().is_infinite());
        assert!(e.lo() > 1e300);
        let bound = HPReal::from_f64(1e308, 64);
        assert!(e.certainly_gt(&bound));
    }

    #[test]
    fn escalation_flag_trips_on_large_budget() {
        let x = HPReal::with_error(Float::with_val(64, 1.0), Float::with_val(32, 1e-3));
        assert!(x.needs_escalation());
        let y = HPReal::from_u64(1, 64);
        assert!(!y.needs_escalation());
    }

    #[test]
    fn sig_string_is_deterministic() {
        let x = HPReal::from_u64(115975, 128).ln();
        let a = x.to_sig_string(12);
        let b = x.to_sig_string(12);
        assert_eq!(a, b);
        assert!(a.starts_with("1.1661129929"), "{a}");
        assert_eq!(HPReal::zero(64).to_sig_string(12), "0.00000000000e0");
    }

    proptest! {
        // Soundness: low-precision ball arithmetic must always enclose the
        // quantity computed directly at much higher precision.
        #[test]
        fn ball_ops_enclose_high_precision_truth(a in -1.0e3f64..1.0e3, b in -1.0e3f64..1.0e3) {
            let p = 24u32;
            let hp = 256u32;
            let xa = HPReal::from_f64(a, p);
            let xb = HPReal::from_f64(b, p);
            let fa = Float::with_val(hp, a);
            let fb = Float::with_val(hp, b);

            let sum = xa.add(&xb);
            prop_assert!(ball_contains(&sum, &Float::with_val(hp, &fa + &fb)));

            let prod = xa.mul(&xb);
            prop_assert!(ball_contains(&prod, &Float::with_val(hp, &fa * &fb)));

            if b != 0.0 {
                let quot = xa.div(&xb);
                let truth = Float::with_val(hp, &fa / &fb);
                prop_assert!(quot.err_budget().is_infinite() || ball_contains(&quot, &truth));
            }
        }

        #[test]
        fn ball_transcendentals_enclose_truth(a in 1.0e-6f64..1.0e6) {
            let p = 32u32;
            let hp = 256u32;
            // Chain a few operations so budgets actually accumulate.
            let x = HPReal::from_f64(a, p);
            let y = x.ln().exp().sqrt();
            let fa = Float::with_val(hp, a);
            let truth = Float::with_val(hp, fa.ln_ref()).exp().sqrt();
            prop_assert!(ball_contains(&y, &truth));

            let c = x.cos();
            let truth_c = Float::with_val(hp, a).cos();
            prop_assert!(ball_contains(&c, &truth_c));
        }

        #[test]
        fn pow_encloses_truth(a in 0.01f64..50.0, k in 0u32..40) {
            let x = HPReal::from_f64(a, 48);
            let y = x.pow_u32(k);
            let truth = Float::with_val(512, a).pow(k);
            prop_assert!(ball_contains(&y, &truth));
        }

        // Catastrophic cancellation: the algebraically zero combination
        // (a+b)(a-b) - (a^2 - b^2) must keep zero inside its ball.
        #[test]
        fn cancellation_keeps_truth_inside(a in -1.0e6f64..1.0e6, b in -1.0e6f64..1.0e6) {
            let p = 40u32;
            let xa = HPReal::from_f64(a, p);
            let xb = HPReal::from_f64(b, p);
            let lhs = xa.add(&xb).mul(&xa.sub(&xb));
            let rhs = xa.mul(&xa).sub(&xb.mul(&xb));
            let diff = lhs.sub(&rhs);
            let zero = Float::new(64);
            prop_assert!(ball_contains(&diff, &zero));
        }

        // Long alternating sums keep the high-precision truth enclosed even
        // when the running value repeatedly cancels.
        #[test]
        fn running_sum_encloses_truth(terms in proptest::collection::vec(-100.0f64..100.0, 1..60)) {
            let p = 32u32;
            let mut sum = HPReal::zero(p);
            let mut truth = Float::new(512);
            for (i, t) in terms.iter().enumerate() {
                let x = HPReal::from_f64(*t, p);
                if i % 2 == 0 {
                    sum = sum.add(&x);
                    truth += Float::with_val(512, *t);
                } else {
                    sum = sum.sub(&x);
                    truth -= Float::with_val(512, *t);
                }
            }
            prop_assert!(ball_contains(&sum, &truth));
        }
    }
}
