//! Pre-Schwarzian and Schwarzian operators, the canonical quadratic
//! operator on logarithmic derivatives, pole-shifted logarithm fibers, and
//! the first variation of these operators at the origin of coefficient
//! space, with explicit norm bounds.
//!
//! All operator outputs are closed-form expression trees, so jets of any
//! order are exact — no finite differencing is involved anywhere except in
//! tests, where difference quotients serve as independent oracles.

use crate::beltrami::{BeltramiCoefficient, SupportBox};
use crate::error::{Error, Result};
use crate::function::{AnalyticMap, Domain, Expr, Jet};
use crate::quadrature::{adaptive_gauss, integrate_halfplane, QuadratureConfig, SeminormValue};
use crate::{c, C};

/// Which operator produced a result (used to translate evaluation errors:
/// the derivative-ratio operators turn division-by-zero into critical-point
/// reports, since their denominator is exactly `F′`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    /// `N_F = F″/F′`.
    PreSchwarzian,
    /// `S_F = N_F′ − ½N_F²`.
    Schwarzian,
    /// `J(Φ) = Φ″ − ½(Φ′)²`.
    CanonicalJ,
    /// `Φ_a = Φ₀ − 2·log(F − a)` (or `Φ₀` itself at `a = ∞`).
    Shift,
}

impl Operator {
    fn divides_by_derivative(self) -> bool {
        matches!(self, Operator::PreSchwarzian | Operator::Schwarzian)
    }
}

impl std::fmt::Display for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Operator::PreSchwarzian => "N",
            Operator::Schwarzian => "S",
            Operator::CanonicalJ => "J",
            Operator::Shift => "shift",
        })
    }
}

/// An operator output together with the input it came from.
#[derive(Clone, Debug)]
pub struct OperatorResult {
    function: AnalyticMap,
    source: AnalyticMap,
    operator: Operator,
}

impl OperatorResult {
    pub fn function(&self) -> &AnalyticMap {
        &self.function
    }

    pub fn source(&self) -> &AnalyticMap {
        &self.source
    }

    pub fn operator(&self) -> Operator {
        self.operator
    }

    /// Exact jet of the output.  Vanishing of `F′` surfaces as
    /// [`Error::CriticalPoint`] for the derivative-ratio operators.
    pub fn jet(&self, z: C, ord: usize) -> Result<Jet> {
        self.function.jet(z, ord).map_err(|e| match e {
            Error::Pole { at } if self.operator.divides_by_derivative() => {
                Error::CriticalPoint { at }
            }
            other => other,
        })
    }

    pub fn eval(&self, z: C) -> Result<C> {
        Ok(self.jet(z, 0)?.value())
    }
}

/// `N_F = F″/F′`, the logarithmic derivative of `F′`, as a closed form.
pub fn pre_schwarzian(f: &AnalyticMap) -> OperatorResult {
    let n = f.expr().deriv(2) / f.expr().deriv(1);
    OperatorResult {
        function: n.on(f.domain()),
        source: f.clone(),
        operator: Operator::PreSchwarzian,
    }
}

/// `S_F = N_F′ − ½·N_F²`, the Schwarzian derivative.
pub fn schwarzian(f: &AnalyticMap) -> OperatorResult {
    let n = f.expr().deriv(2) / f.expr().deriv(1);
    let s = n.deriv(1) - Expr::real(0.5) * &n * &n;
    OperatorResult {
        function: s.on(f.domain()),
        source: f.clone(),
        operator: Operator::Schwarzian,
    }
}

/// `J(Φ) = Φ″ − ½·(Φ′)²`.  Applied to `Φ = log F′` this reproduces `S_F`.
pub fn canonical_j(phi: &AnalyticMap) -> OperatorResult {
    let d1 = phi.expr().deriv(1);
    let j = phi.expr().deriv(2) - Expr::real(0.5) * &d1 * &d1;
    OperatorResult {
        function: j.on(phi.domain()),
        source: phi.clone(),
        operator: Operator::CanonicalJ,
    }
}

/// A conformal map's image region, described well enough to decide whether
/// a shift target stays boundedly away from it.
#[derive(Clone, Debug)]
pub enum ImageSpec {
    /// The image is the plane minus the closed real ray `(−∞, cut]`.  Its
    /// closure is all of ℂ, so **no finite target is ever admissible**.
    PlaneMinusRay { cut: f64 },
    /// The image boundary as a densely sampled closed curve; a target is
    /// admissible when it is at least `margin` from every sample and the
    /// curve does not wind around it.
    SampledBoundary { samples: Vec<C>, margin: f64 },
}

impl ImageSpec {
    /// Sample the boundary curve `F(e^{iθ})` of a map extending to the
    /// closed disk (sampled just inside, at radius `1 − 2^-40`).
    pub fn sampled(f: &AnalyticMap, n: usize, margin: f64) -> Result<ImageSpec> {
        if f.domain() != Domain::UnitDisk {
            return Err(Error::KindDomain(
                "boundary sampling is defined for disk maps".into(),
            ));
        }
        let r = 1.0 - (2f64).powi(-40);
        let mut samples = Vec::with_capacity(n);
        for k in 0..n {
            let z = C::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64);
            samples.push(f.eval(z)?);
        }
        Ok(ImageSpec::SampledBoundary { samples, margin })
    }

    /// Check that `a` is admissible (outside the image closure with room to
    /// spare); on failure, explain why.
    pub fn admissible(&self, a: C) -> std::result::Result<(), String> {
        match self {
            ImageSpec::PlaneMinusRay { cut } => Err(format!(
                "the image omits only the ray ending at {cut}, so its closure is \
                 the whole plane and no finite target is bounded away from it"
            )),
            ImageSpec::SampledBoundary { samples, margin } => {
                let dist = samples
                    .iter()
                    .map(|&s| (s - a).norm())
                    .fold(f64::INFINITY, f64::min);
                if dist < *margin {
                    return Err(format!(
                        "target is {dist:.3e} from the image boundary, closer than \
                         the required margin {margin:.3e}"
                    ));
                }
                let winding: f64 = (0..samples.len())
                    .map(|i| {
                        let s0 = samples[i] - a;
                        let s1 = samples[(i + 1) % samples.len()] - a;
                        (s1 / s0).arg()
                    })
                    .sum::<f64>()
                    / (2.0 * std::f64::consts::PI);
                if winding.round().abs() > 0.5 {
                    return Err(format!(
                        "the image boundary winds {} times around the target",
                        winding.round()
                    ));
                }
                Ok(())
            }
        }
    }
}

/// A shift target: a finite point or the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShiftTarget {
    Infinity,
    Finite(C),
}

/// The pole-shifted logarithm fiber over `Φ₀ = log F′`:
/// `Φ_a = Φ₀ − 2·log(F − a)` for finite admissible `a`, and `Φ₀` itself at
/// `a = ∞`.  Differentiating,
/// `Φ_a′ = −2F′/(F−a) + Φ₀′` and the `a`-part of `Φ_a″` is
/// `2F′²/(F−a)² − 2F″/(F−a)`; all fibers share one canonical image under
/// [`canonical_j`].
pub fn mobius_shift(
    phi0: &AnalyticMap,
    f: &AnalyticMap,
    image: &ImageSpec,
    a: ShiftTarget,
) -> Result<OperatorResult> {
    if phi0.domain() != f.domain() {
        return Err(Error::KindDomain(format!(
            "base point lives on `{}` but the map lives on `{}`",
            phi0.domain(),
            f.domain()
        )));
    }
    let expr = match a {
        ShiftTarget::Infinity => phi0.expr().clone(),
        ShiftTarget::Finite(a) => {
            image.admissible(a).map_err(|why| Error::Fiber { a: a.to_string(), why })?;
            // The fiber is defined up to an additive branch constant, which
            // every derived quantity (Φ_a′, J) cancels.  Pin the branch as
            // log(F−a) = log(1 − F/a) + log(−a): the expression-level
            // logarithm then stays clear of its cut whenever |F| < |a|,
            // and the constant is ordinary complex arithmetic.
            let log_part = if a.norm() > f64::MIN_POSITIVE {
                (Expr::real(1.0) - f.expr().clone() * Expr::constant(a.inv())).ln()
                    + Expr::constant((-a).ln())
            } else {
                f.expr().clone().ln()
            };
            phi0.expr().clone() - Expr::real(2.0) * log_part
        }
    };
    Ok(OperatorResult {
        function: expr.on(phi0.domain()),
        source: f.clone(),
        operator: Operator::Shift,
    })
}

/// Support boxes must keep this much clearance from the real line for the
/// variational kernels to be well-posed.
pub const SUPPORT_CLEARANCE: f64 = 1e-6;

/// Validate a coefficient for the variational kernels: upper half-plane
/// carrier, compact (box) support, support clear of the real line.
fn variational_support(nu: &BeltramiCoefficient) -> Result<SupportBox> {
    if nu.domain() != Domain::UpperHalfPlane {
        return Err(Error::KindDomain(
            "variational kernels read coefficients on the upper half-plane".into(),
        ));
    }
    let b = nu.support().ok_or_else(|| {
        Error::Support("variational kernels need compactly supported coefficients".into())
    })?;
    if b.y0 < SUPPORT_CLEARANCE {
        return Err(Error::Support(format!(
            "support reaches within {} of the real line (clearance {SUPPORT_CLEARANCE})",
            b.y0
        )));
    }
    Ok(b)
}

/// `∫∫_box (w−ζ)^{−3} du dv` in closed form (iterated antiderivatives
/// reduce the double integral to a 4-corner alternating sum).
fn box_cubic_integral(b: SupportBox, zeta: C) -> C {
    let f = |x: f64, y: f64| (c(x, y) - zeta).inv();
    (f(b.x1, b.y1) - f(b.x1, b.y0) - f(b.x0, b.y1) + f(b.x0, b.y0)) / c(0.0, 2.0)
}

/// `∫∫_box (w−ζ)^{−4} du dv` in closed form.
fn box_quartic_integral(b: SupportBox, zeta: C) -> C {
    let f = |x: f64, y: f64| {
        let d = (c(x, y) - zeta).inv();
        d * d
    };
    (f(b.x1, b.y1) - f(b.x1, b.y0) - f(b.x0, b.y1) + f(b.x0, b.y0)) / c(0.0, 6.0)
}

/// Complex-valued line integral via two scalar adaptive passes.
fn complex_line(f: &(impl Fn(f64) -> C + Sync), a: f64, b: f64, tol: f64) -> C {
    let re = adaptive_gauss(&|t: f64| f(t).re, a, b, tol, 15, 12);
    let im = adaptive_gauss(&|t: f64| f(t).im, a, b, tol, 15, 12);
    c(re, im)
}

/// Complex-valued box integral by iterated adaptive quadrature.
fn box_integral(g: &(impl Fn(C) -> C + Sync), b: SupportBox, tol: f64) -> C {
    complex_line(
        &|y: f64| complex_line(&|x: f64| g(c(x, y)), b.x0, b.x1, tol),
        b.y0,
        b.y1,
        tol,
    )
}

/// First variation of the logarithmic-derivative operator at the origin,
/// differentiated once: `(d₀L(ν))′(ζ) = −(2/π) ∫ ν(w)/(w−ζ)³ du dv`,
/// evaluated at `ζ` in the lower half-plane.  Constant-box coefficients use
/// the exact corner formula; general fields fall back to adaptive
/// quadrature over the support box.
pub fn d0_pre_schwarzian(nu: &BeltramiCoefficient, zeta: C) -> Result<C> {
    let b = variational_support(nu)?;
    if !(zeta.im < 0.0) {
        return Err(Error::OutsideDomain {
            z: zeta.to_string(),
            domain: Domain::LowerHalfPlane.to_string(),
        });
    }
    let front = c(-2.0 / std::f64::consts::PI, 0.0);
    Ok(match nu.box_value() {
        Some(v) => front * v * box_cubic_integral(b, zeta),
        None => {
            let g = |w: C| {
                let d = (w - zeta).inv();
                nu.eval(w) * d * d * d
            };
            front * box_integral(&g, b, 1e-10)
        }
    })
}

/// First variation of the Schwarzian operator at the origin:
/// `d₀S(ν)(ζ) = −(6/π) ∫ ν(w)/(w−ζ)⁴ du dv`, which is exactly the
/// `ζ`-derivative of [`d0_pre_schwarzian`].
pub fn d0_schwarzian(nu: &BeltramiCoefficient, zeta: C) -> Result<C> {
    let b = variational_support(nu)?;
    if !(zeta.im < 0.0) {
        return Err(Error::OutsideDomain {
            z: zeta.to_string(),
            domain: Domain::LowerHalfPlane.to_string(),
        });
    }
    let front = c(-6.0 / std::f64::consts::PI, 0.0);
    Ok(match nu.box_value() {
        Some(v) => front * v * box_quartic_integral(b, zeta),
        None => {
            let g = |w: C| {
                let d = (w - zeta).inv();
                let d2 = d * d;
                nu.eval(w) * d2 * d2
            };
            front * box_integral(&g, b, 1e-10)
        }
    })
}

fn constant_box(nu: &BeltramiCoefficient) -> Result<(SupportBox, C)> {
    let b = variational_support(nu)?;
    let v = nu.box_value().ok_or_else(|| {
        Error::Support(
            "norm ladders are implemented for constant box coefficients; \
             general fields are served by the pointwise kernels"
            .into(),
        )
    })?;
    Ok((b, v))
}

/// Weighted `p`-integral ladder of `(d₀L(ν))′` over the lower half-plane:
/// the first-derivative seminorm `(∫ (|Im z|·|·|)^p |Im z|^{−2} dA)^{1/p}`.
pub fn d0_pre_schwarzian_besov(
    nu: &BeltramiCoefficient,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<SeminormValue> {
    cfg.validate()?;
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::KindDomain(format!("the ladder needs p ≥ 1, got {p}")));
    }
    let (b, v) = constant_box(nu)?;
    let front = 2.0 / std::f64::consts::PI;
    let g = move |z: C| {
        let w = z.im.abs();
        let d = front * v.norm() * box_cubic_integral(b, z).norm();
        (w * d).powf(p) / (w * w)
    };
    Ok(integrate_halfplane(g, Domain::LowerHalfPlane, cfg).map_monotone(|x| x.powf(1.0 / p)))
}

/// Weighted `p`-integral ladder of `d₀S(ν)` over the lower half-plane with
/// the square weight: `(∫ (|Im z|²·|·|)^p |Im z|^{−2} dA)^{1/p}`.
pub fn d0_schwarzian_weighted(
    nu: &BeltramiCoefficient,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<SeminormValue> {
    cfg.validate()?;
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::KindDomain(format!("the ladder needs p ≥ 1, got {p}")));
    }
    let (b, v) = constant_box(nu)?;
    let front = 6.0 / std::f64::consts::PI;
    let g = move |z: C| {
        let w = z.im.abs();
        let d = front * v.norm() * box_quartic_integral(b, z).norm();
        (w * w * d).powf(p) / (w * w)
    };
    Ok(integrate_halfplane(g, Domain::LowerHalfPlane, cfg).map_monotone(|x| x.powf(1.0 / p)))
}

/// Constant in the first-variation derivative bound
/// `∥·∥ ≤ (4π)^{1/p} · 16/(2−q) · ∥ν∥_p` with `q = p/(p−1)` (needs `p > 2`
/// so that `q < 2`).
pub fn besov_variation_constant(p: f64) -> f64 {
    assert!(p > 2.0, "the derivative bound holds for p > 2 (conjugate q < 2)");
    let q = p / (p - 1.0);
    (4.0 * std::f64::consts::PI).powf(1.0 / p) * 16.0 / (2.0 - q)
}

/// Constant in the Schwarzian-variation bound `∥·∥ ≤ 24·∥ν∥_p`.
pub const SCHWARZIAN_VARIATION_CONSTANT: f64 = 24.0;
