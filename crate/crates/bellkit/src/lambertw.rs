//! Principal-branch Lambert W for nonnegative arguments, certified by a
//! residual check rather than by iteration count.
//!
//! The iteration is Halley's method on `w e^w - x` with the usual
//! logarithmic initial guess. Once the iteration settles, the residual
//! `|w e^w - x|` is re-evaluated in ball arithmetic at elevated precision;
//! the bound on `|w - W(x)|` follows from the mean value theorem, since
//! `(w e^w)' = (1+w) e^w >= 1` on the nonnegative axis.

use crate::error::{Error, Result};
use crate::hp::HPReal;
use rug::float::Round;
use rug::Float;

const MAX_ITERATIONS: usize = 64;

/// Guard bits folded into the default residual tolerance.
const TOLERANCE_GUARD: u32 = 16;

/// A certified evaluation of W(x).
#[derive(Debug, Clone)]
pub struct WValue {
    /// The value, with the certification folded into its error budget.
    pub w: HPReal,
    /// The argument.
    pub x: HPReal,
    /// Upper bound on |w e^w - x| at the certified midpoint.
    pub residual: Float,
}

/// W(x) for x >= 0 at the given precision.
///
/// The returned residual satisfies `residual <= max(x, 1) * 2^-(prec-16)`.
/// Arguments below zero are a domain error (the second real branch is not
/// implemented); failure of the iteration to converge cannot happen for
/// x >= 0 and is reported as a bug signal.
pub fn lambert_w(x: &HPReal, prec: u32) -> Result<WValue> {
    lambert_w_seeded(x, prec, None)
}

/// Same as [`lambert_w`], but starts the iteration from a caller-supplied
/// guess. Sweeps over consecutive arguments use the previous W value to cut
/// the iteration down to one or two steps; the certification is unaffected.
pub fn lambert_w_seeded(x: &HPReal, prec: u32, seed: Option<&Float>) -> Result<WValue> {
    if !x.value().is_finite() || (x.value().is_sign_negative() && !x.value().is_zero()) {
        return Err(Error::Domain(format!(
            "W is implemented for finite x >= 0 only, got x = {}",
            x.to_sig_string(12)
        )));
    }
    if x.value().is_zero() {
        return Ok(WValue {
            w: HPReal::zero(prec),
            x: x.clone(),
            residual: Float::new(32),
        });
    }

    let wp = prec + 32;
    let xv = Float::with_val(wp, x.value());
    let mut w = match seed {
        Some(s) if s.is_finite() && *s >= 0 => Float::with_val(wp, s),
        _ => initial_guess(&xv, wp),
    };

    let threshold = {
        let scale = if xv > 1 { xv.clone() } else { Float::with_val(wp, 1) };
        scale >> (wp as i32 - 8)
    };
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let ew = Float::with_val(wp, w.exp_ref());
        let f = Float::with_val(wp, &w * &ew) - &xv;
        // Halley step: f / (f' - f f'' / (2 f'))
        let w1 = Float::with_val(wp, &w + 1u32);
        let fp = Float::with_val(wp, &w1 * &ew);
        let corr = Float::with_val(wp, &f * Float::with_val(wp, &w + 2u32))
            / (Float::with_val(wp, &w1 << 1));
        let denom = fp - corr;
        if denom.is_zero() {
            break;
        }
        let step = f / denom;
        w -= &step;
        if w.is_sign_negative() {
            w = Float::new(wp);
        }
        let fnow = Float::with_val(wp, w.exp_ref());
        let fnow = Float::with_val(wp, &w * &fnow) - &xv;
        if fnow.abs() <= threshold {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "Halley iteration for W({}) at {} bits",
            x.to_sig_string(12),
            prec
        )));
    }

    // Certified residual at elevated precision, including the argument's own
    // budget.
    let cp = wp + 32;
    let w_ball = HPReal::with_error(Float::with_val(cp, &w), Float::new(32));
    let x_mid = HPReal::with_error(Float::with_val(cp, x.value()), Float::new(32));
    let resid_ball = w_ball.mul(&w_ball.exp()).sub(&x_mid);
    let resid_mid = Float::with_val_round(32, resid_ball.abs().hi(), Round::Up).0;

    // The gate judges the iterate against the argument's midpoint; the
    // argument's own budget is folded into the stored bound afterwards.
    let tolerance = {
        let scale = if *x.value() > 1 {
            Float::with_val_round(32, x.value(), Round::Up).0
        } else {
            Float::with_val(32, 1)
        };
        scale >> (prec as i32 - TOLERANCE_GUARD as i32)
    };
    if !(resid_mid <= tolerance) {
        return Err(Error::NonConvergence(format!(
            "residual {resid_mid} exceeds tolerance {tolerance} for W({})",
            x.to_sig_string(12)
        )));
    }
    let residual = Float::with_val_round(32, &resid_mid + x.err_budget(), Round::Up).0;

    // |w - W(x)| <= residual / min (1+t)e^t over the bracket; the crude
    // bound residual/1 locates the bracket, one refinement tightens it.
    let crude = residual.clone();
    let m = Float::with_val_round(cp, &w - &crude, Round::Down).0;
    let m = if m.is_sign_negative() { Float::new(cp) } else { m };
    let deriv_lo = {
        let em = Float::with_val_round(cp, m.exp_ref(), Round::Down).0;
        let m1 = Float::with_val_round(cp, &m + 1u32, Round::Down).0;
        Float::with_val_round(32, m1 * em, Round::Down).0
    };
    let delta = Float::with_val_round(32, &residual / &deriv_lo, Round::Up).0;

    let (wv, ord) = Float::with_val_round(prec, &w, Round::Nearest);
    let round_slack = match (ord, wv.get_exp()) {
        (std::cmp::Ordering::Equal, _) => Float::new(32),
        (_, Some(e)) => Float::with_val(32, 1) << (e - prec as i32),
        (_, None) => Float::new(32),
    };
    let err = Float::with_val_round(32, &delta + &round_slack, Round::Up).0;

    Ok(WValue {
        w: HPReal::with_error(wv, err),
        x: x.clone(),
        residual,
    })
}

/// Convenience wrapper for integer arguments.
pub fn lambert_w_u64(n: u64, prec: u32) -> Result<WValue> {
    lambert_w(&HPReal::from_u64(n, prec), prec)
}

fn initial_guess(x: &Float, wp: u32) -> Float {
    let e = Float::with_val(wp, 1).exp();
    if *x >= e {
        // ln x - ln ln x, exact at x = e, asymptotically tight above.
        let lx = Float::with_val(wp, x.ln_ref());
        let llx = Float::with_val(wp, lx.ln_ref());
        let g = lx - llx;
        if g.is_sign_negative() {
            Float::new(wp)
        } else {
            g
        }
    } else {
        // x/(1+x) underestimates mildly on (0, e); Halley recovers fast.
        Float::with_val(wp, x / Float::with_val(wp, x + 1u32))
    }
}

/// e^W(x), computed as x / W(x) to avoid exponentiation error; the limit
/// value 1 is returned at x = 0.
pub fn exp_w(x: &HPReal, prec: u32) -> Result<HPReal> {
    if x.value().is_zero() {
        return Ok(HPReal::one(prec));
    }
    let wv = lambert_w(x, prec + 16)?;
    Ok(x.with_prec(prec + 16).div(&wv.w).with_prec(prec))
}

/// The integral of W over [0, x], via the closed form
/// `e^W(x) + x W(x) - x - 1`.
pub fn w_integral(x: &HPReal, prec: u32) -> Result<HPReal> {
    if x.value().is_zero() {
        return Ok(HPReal::zero(prec));
    }
    let p = prec + 16;
    let wv = lambert_w(x, p)?;
    let ew = x.with_prec(p).div(&wv.w);
    let xw = x.with_prec(p).mul(&wv.w);
    let sum = ew.add(&xw).sub(&x.with_prec(p)).sub(&HPReal::one(p));
    Ok(sum.with_prec(prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::Rel;

    const OMEGA_50: &str = "0.5671432904097838729999686622103555497538157871865125";

    #[test]
    fn zero_maps_to_zero() {
        let w = lambert_w(&HPReal::zero(96), 96).unwrap();
        assert!(w.w.value().is_zero());
        assert!(w.residual.is_zero());
    }

    #[test]
    fn w_of_e_is_one() {
        let e = HPReal::e(192);
        let w = lambert_w(&e, 192).unwrap();
        let diff = w.w.sub(&HPReal::one(192)).abs();
        assert!(diff.hi() < 1e-50);
    }

    #[test]
    fn defining_inverse_at_five() {
        // x = 5 e^5 must give exactly W = 5 up to the certified tolerance.
        let p = 192;
        let five = HPReal::from_u64(5, p);
        let x = five.mul(&five.exp());
        let w = lambert_w(&x, p).unwrap();
        let diff = w.w.sub(&five).abs();
        assert!(diff.hi() < 1e-50);
    }

    #[test]
    fn omega_constant_matches_bisection_oracle() {
        // Independent oracle: bisection on w e^w - 1 over [0.5, 0.6].
        let p = 256u32;
        let mut lo = Float::with_val(p, 0.5f64);
        let mut hi = Float::with_val(p, 0.6f64);
        for _ in 0..220 {
            let mid: Float = Float::with_val(p, &lo + &hi) >> 1;
            let f = Float::with_val(p, mid.exp_ref()) * &mid - 1u32;
            if f.is_sign_negative() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let w = lambert_w(&HPReal::one(p), p).unwrap().w;
        let diff = Float::with_val(p, w.value() - &lo).abs();
        assert!(diff < Float::with_val(p, 1e-45f64));

        // And the frozen decimal digits agree.
        let frozen = HPReal::from_decimal(OMEGA_50, p);
        assert!(w.sub(&frozen).abs().hi() < 1e-45);
        assert!(w.to_sig_string(12).starts_with("5.67143290410e-1"));
    }

    #[test]
    fn residual_invariant_on_log_grid() {
        let p = 192u32;
        for i in 0..60 {
            let x = HPReal::from_f64(10f64.powf(-4.0 + 16.0 * i as f64 / 59.0), p);
            let wv = lambert_w(&x, p).unwrap();
            let scale = if x.to_f64() > 1.0 { x.to_f64() } else { 1.0 };
            assert!(
                wv.residual.to_f64() <= scale * 2f64.powi(-(p as i32 - 16)),
                "residual too large at x = {}",
                x.to_sig_string(6)
            );
        }
    }

    #[test]
    fn sandwich_monotonicity_and_derivative_on_grid() {
        let p = 192u32;
        let mut prev: Option<(f64, HPReal)> = None;
        for i in 0..48 {
            let xf = 10f64.powf(0.44 + 11.0 * i as f64 / 47.0); // ~e upward
            let x = HPReal::from_f64(xf, p);
            let w = lambert_w(&x, p).unwrap().w;

            // ln x - ln ln x <= W(x) <= ln x for x >= e
            let lx = x.ln();
            let llx = lx.ln();
            assert!(w.certainly_le(&lx), "upper sandwich fails at {xf}");
            assert!(lx.sub(&llx).certainly_le(&w), "lower sandwich fails at {xf}");

            // strict monotonicity
            if let Some((pxf, pw)) = &prev {
                assert!(*pxf < xf);
                assert_eq!(pw.cmp_ball(&w), Rel::CertainlyLess);
            }

            // derivative identity: central difference vs 1/(x + e^W)
            let h = HPReal::from_f64(xf, p).shl(-20);
            let xp = x.add(&h);
            let xm = x.sub(&h);
            let wp_ = lambert_w(&xp, p).unwrap().w;
            let wm = lambert_w(&xm, p).unwrap().w;
            let cd = wp_.sub(&wm).div(&h.shl(1));
            let deriv = x.add(&exp_w(&x, p).unwrap()).recip();
            let rel = cd.div(&deriv).sub(&HPReal::one(p)).abs();
            assert!(
                rel.hi() < 2f64.powi(-36),
                "derivative identity off at {xf}: {}",
                rel.to_sig_string(6)
            );

            prev = Some((xf, w));
        }
    }

    #[test]
    fn concavity_on_grid() {
        let p = 128u32;
        // Second divided differences of a concave function are <= 0.
        let mut xs = Vec::new();
        for i in 0..40 {
            xs.push(10f64.powf(-1.0 + 12.0 * i as f64 / 39.0));
        }
        let ws: Vec<HPReal> = xs
            .iter()
            .map(|&x| lambert_w(&HPReal::from_f64(x, p), p).unwrap().w)
            .collect();
        for i in 1..xs.len() - 1 {
            let (x0, x1, x2) = (xs[i - 1], xs[i], xs[i + 1]);
            let d01 = ws[i].sub(&ws[i - 1]).div(&HPReal::from_f64(x1 - x0, p));
            let d12 = ws[i + 1].sub(&ws[i]).div(&HPReal::from_f64(x2 - x1, p));
            assert!(
                d12.certainly_le(&d01),
                "second divided difference positive near x = {x1}"
            );
        }
    }

    #[test]
    fn concavity_increment_bound_on_grid() {
        // W(y) - W(x) <= (y - x)/x for 0 < x < y.
        let p = 128u32;
        let pairs = [(0.5f64, 1.0f64), (1.0, 4.0), (10.0, 11.0), (100.0, 250.0), (1e6, 2e6)];
        for (xf, yf) in pairs {
            let x = HPReal::from_f64(xf, p);
            let y = HPReal::from_f64(yf, p);
            let wx = lambert_w(&x, p).unwrap().w;
            let wy = lambert_w(&y, p).unwrap().w;
            let lhs = wy.sub(&wx);
            let rhs = y.sub(&x).div(&x);
            assert!(lhs.certainly_le(&rhs), "increment bound fails at ({xf},{yf})");
        }
    }

    #[test]
    fn regime_threshold_indices() {
        let p = 128u32;
        let five = HPReal::from_u64(5, p);
        let w744 = lambert_w_u64(744, p).unwrap().w;
        let w743 = lambert_w_u64(743, p).unwrap().w;
        let w742 = lambert_w_u64(742, p).unwrap().w;
        assert!(five.certainly_le(&w744));
        assert!(five.certainly_le(&w743));
        assert!(w742.cmp_ball(&five) == Rel::CertainlyLess);
    }

    #[test]
    fn negative_argument_is_domain_error() {
        let x = HPReal::from_f64(-0.1, 64);
        assert!(matches!(lambert_w(&x, 64), Err(Error::Domain(_))));
    }

    #[test]
    fn exp_w_examples() {
        let p = 192u32;
        // x = e -> e
        let e = HPReal::e(p);
        let r = exp_w(&e, p).unwrap();
        assert!(r.sub(&e).abs().hi() < 1e-50);
        // x = 1 -> 1/omega
        let r = exp_w(&HPReal::one(p), p).unwrap();
        let inv_omega = HPReal::from_decimal("1.763222834351896710225201776951707080436", p);
        assert!(r.sub(&inv_omega).abs().hi() < 1e-37);
        // x = 5 e^5 -> e^5
        let five = HPReal::from_u64(5, p);
        let x = five.mul(&five.exp());
        let r = exp_w(&x, p).unwrap();
        assert!(r.sub(&five.exp()).abs().hi() < 1e-45);
        // limit at zero
        let r = exp_w(&HPReal::zero(p), p).unwrap();
        assert!(r.value() == &1);
    }

    #[test]
    fn integral_closed_form_examples() {
        let p = 192u32;
        assert!(w_integral(&HPReal::zero(p), p).unwrap().value().is_zero());
        // x = e: e + e - e - 1 = e - 1
        let e = HPReal::e(p);
        let v = w_integral(&e, p).unwrap();
        let truth = e.sub(&HPReal::one(p));
        assert!(v.sub(&truth).abs().hi() < 1e-50);
        // x = 10, digits derived from the closed form at high precision
        let v = w_integral(&HPReal::from_u64(10, p), p).unwrap();
        let truth = HPReal::from_decimal("12.1842055927939353391378460950234419736612", p);
        assert!(v.sub(&truth).abs().hi() < 1e-38);
    }

    #[test]
    fn seeded_evaluation_matches_cold_start() {
        let p = 192u32;
        let x = HPReal::from_u64(1000, p);
        let cold = lambert_w(&x, p).unwrap();
        let seed = Float::with_val(64, 5.25);
        let warm = lambert_w_seeded(&x, p, Some(&seed)).unwrap();
        assert!(cold.w.sub(&warm.w).abs().hi() < 1e-50);
    }

    #[test]
    fn bracketing_sign_check_holds_on_grid() {
        // The certified bound says W(x) lies in [w - d, w + d]; stepping one
        // extra d outward must produce a certain sign change of w e^w - x.
        let p = 160u32;
        for xf in [0.3f64, 1.0, 7.5, 1e4, 1e9] {
            let x = HPReal::from_f64(xf, p);
            let wv = lambert_w(&x, p).unwrap();
            let pe = p + 64; // evaluate well below the bracket width
            let d = Float::with_val(pe, wv.w.err_budget()) << 1;
            let lo = HPReal::with_error(Float::with_val(pe, wv.w.value() - &d), Float::new(32));
            let hi = HPReal::with_error(Float::with_val(pe, wv.w.value() + &d), Float::new(32));
            let f_lo = lo.mul(&lo.exp()).sub(&x);
            let f_hi = hi.mul(&hi.exp()).sub(&x);
            assert!(
                f_lo.certainly_le(&HPReal::zero(p)),
                "no sign bracket below at x = {xf}: {}",
                f_lo.to_sig_string(6)
            );
            assert!(
                HPReal::zero(p).certainly_le(&f_hi),
                "no sign bracket above at x = {xf}: {}",
                f_hi.to_sig_string(6)
            );
        }
    }
}
