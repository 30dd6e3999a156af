//! The kernel integral `I_τ(v) = ∫₀^∞ (t+v)^{τ-1} t^{τ-1} e^{-2t} dt` and the
//! exponentially weighted integrals of it that drive the privacy bounds.

use super::{QuadSettings, SingularityMode};
use crate::error::{Error, Result};
use crate::quad::Quadrature;
use crate::special::{gamma, gamma_window, upper_incomplete};

/// Integrands are negligible past `1 + ln(1e18)/2`: they decay at least like
/// `e^{-2t}` relative to their value at `t = 1`.
const UNIT_CUTOFF: f64 = 1.0 + 20.723_265_836_946_41;

/// Beyond this the incomplete gamma underflows and tails are not representable.
pub const MAX_TAIL_ARGUMENT: f64 = 700.0;

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::domain("tau", tau, "must lie in (0, 1]"));
    }
    Ok(())
}

/// `I_τ(0) = Γ(2τ−1) / 2^{2τ−1}`, finite only for `τ > 1/2`.
pub fn kernel_at_zero(tau: f64) -> Result<f64> {
    check_tau(tau)?;
    if tau <= 0.5 {
        return Err(Error::domain("tau", tau, "I(0) diverges for tau <= 1/2"));
    }
    Ok(gamma(2.0 * tau - 1.0) / 2f64.powf(2.0 * tau - 1.0))
}

/// Integrates `t^{τ−1} h(t)` over `[0, ∞)` where `h` is bounded near zero and
/// decays at least like `e^{-2t}`. On `[0, 1]` the substitution `u = t^τ`
/// absorbs the `t^{τ−1}` singularity exactly.
fn integrate_singular_weight<H>(tau: f64, settings: &QuadSettings, h: H) -> Result<f64>
where
    H: Fn(f64) -> f64,
{
    let quad = settings.quadrature();
    let head = match settings.singularity {
        SingularityMode::PowerSubstitution => {
            let inv = 1.0 / tau;
            quad.integrate(|u| h(u.powf(inv)) * inv, 0.0, 1.0)?.value
        }
        SingularityMode::Plain => {
            quad.integrate(|t| t.powf(tau - 1.0) * h(t), 0.0, 1.0)?
                .value
        }
    };
    let tail = quad
        .integrate(|t| t.powf(tau - 1.0) * h(t), 1.0, UNIT_CUTOFF)?
        .value;
    Ok(head + tail)
}

/// `I_τ(v)`.
pub fn eval_kernel(tau: f64, v: f64, settings: &QuadSettings) -> Result<f64> {
    check_tau(tau)?;
    if !(v >= 0.0) || v.is_infinite() {
        return Err(Error::domain(
            "v",
            v,
            "must be a finite non-negative number",
        ));
    }
    if tau == 1.0 {
        return Ok(0.5);
    }
    if v == 0.0 {
        return kernel_at_zero(tau);
    }
    let e = tau - 1.0;
    integrate_singular_weight(tau, settings, |t| (t + v).powf(e) * (-2.0 * t).exp())
}

/// `∫_a^∞ e^{-v} I_τ(v) dv`, through the order-swapped form
/// `∫₀^∞ t^{τ−1} e^{-t} Γ(τ, t+a) dt`.
pub fn tail_integral(tau: f64, a: f64, settings: &QuadSettings) -> Result<f64> {
    check_tau(tau)?;
    check_tail_argument(a)?;
    if tau == 1.0 {
        return Ok(0.5 * (-a).exp());
    }
    let value =
        integrate_singular_weight(tau, settings, |t| (-t).exp() * upper_incomplete(tau, t + a))?;
    underflow_guard(a, value)
}

/// `∫₀^b e^{-v} I_τ(v) dv`, through `∫₀^∞ t^{τ−1} e^{-t} ∫_t^{t+b} w^{τ−1} e^{-w} dw dt`.
///
/// Equivalent to `Γ(τ)²/2 − tail_integral(b)` but free of cancellation for
/// small `b`.
pub fn head_integral(tau: f64, b: f64, settings: &QuadSettings) -> Result<f64> {
    check_tau(tau)?;
    check_tail_argument(b)?;
    if tau == 1.0 {
        return Ok(-0.5 * (-b).exp_m1());
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    integrate_singular_weight(tau, settings, |t| (-t).exp() * gamma_window(tau, t, b))
}

/// `∫_a^∞ e^{-v} I_τ(v) dv` as a literal iterated integral: an outer adaptive
/// quadrature over `v` whose integrand calls [`eval_kernel`]. Independent of
/// the incomplete-gamma route and used to cross-check it.
pub fn tail_integral_iterated(tau: f64, a: f64, settings: &QuadSettings) -> Result<f64> {
    check_tau(tau)?;
    check_tail_argument(a)?;
    let inner = QuadSettings {
        rel_tol: (settings.rel_tol * 1e-2).max(1e-14),
        ..*settings
    };
    let outer = settings.quadrature();
    let weighted = |v: f64| -> f64 {
        // Errors surface as NaN and fail the outer estimate.
        eval_kernel(tau, v, &inner).map_or(f64::NAN, |k| (-v).exp() * k)
    };

    let near = if a == 0.0 {
        // Near zero, e^{-v}I(v) ~ v^{2τ-1} when τ < 1/2; v = w^p flattens it.
        let p = if tau < 0.5 { 1.0 / (2.0 * tau) } else { 2.0 };
        outer
            .integrate(|w| p * w.powf(p - 1.0) * weighted(w.powf(p)), 0.0, 1.0)?
            .value
    } else {
        outer.integrate(weighted, a, a + 1.0)?.value
    };
    // e^{-v}I(v) is decreasing; 42 e-folds past a+1 is below 1e-18 of the value there.
    let far = outer.integrate(weighted, a + 1.0, a + 1.0 + 41.5)?.value;
    let value = near + far;
    if value.is_nan() {
        return Err(Error::NonConvergence {
            lo: a,
            hi: f64::INFINITY,
            estimate: value,
            error: f64::NAN,
        });
    }
    underflow_guard(a, value)
}

/// `Γ(τ)²/2`, the value of `tail_integral(τ, 0)` (density normalization).
pub fn total_mass(tau: f64) -> f64 {
    let g = gamma(tau);
    0.5 * g * g
}

fn check_tail_argument(a: f64) -> Result<()> {
    if !(a >= 0.0) {
        return Err(Error::domain("a", a, "must be non-negative"));
    }
    if a > MAX_TAIL_ARGUMENT {
        return Err(Error::domain("a", a, "tail underflows double precision"));
    }
    Ok(())
}

fn underflow_guard(a: f64, value: f64) -> Result<f64> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain("a", a, "tail underflows double precision"))
    }
}

/// Convenience used by diagnostics: a plain `Quadrature` honouring settings.
impl QuadSettings {
    pub fn quadrature(&self) -> Quadrature {
        Quadrature::with_rel_tol(self.rel_tol)
    }
}
