//! Beltrami coefficient fields on the exterior disk or the upper half-plane:
//! size classes, membership diagnostics, and the Bloch-gated section map.
//!
//! A coefficient is a bounded measurable `μ` with `sup |μ| < 1`.  The two
//! carriers use different reference densities: on the exterior disk the
//! hyperbolic-type density is `2/(|z|²−1)`, on the upper half-plane it is
//! `1/Im z`; `p`-integrability is always taken against the square of that
//! density times area measure.

use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::{AnalyticMap, Domain};
use crate::quadrature::{integrate_annulus, QuadratureConfig, SeminormValue};
use crate::report::{Check, VerificationReport};
use crate::seminorm::{seminorm, SeminormKind};
use crate::{c, C};

/// Radius beyond which the exterior-disk `p`-norm switches from quadrature
/// to the declared-supremum tail bound.
const OUTER_RADIUS: f64 = 64.0;

/// Closed axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SupportBox {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl SupportBox {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<SupportBox> {
        let all_finite = x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite();
        if !all_finite || x1 <= x0 || y1 <= y0 {
            return Err(Error::Support(format!("degenerate box [{x0}, {x1}] × [{y0}, {y1}]")));
        }
        Ok(SupportBox { x0, x1, y0, y1 })
    }

    pub fn contains(&self, z: C) -> bool {
        self.x0 <= z.re && z.re <= self.x1 && self.y0 <= z.im && z.im <= self.y1
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// A bounded measurable dilatation datum `μ` with `sup |μ| < 1`.
///
/// The closure is the pointwise formula; `declared_sup` is the promised
/// essential supremum, checked against a 10⁴-point grid at construction.
/// Optional support metadata enables closed-form kernels and exact tails.
#[derive(Clone)]
pub struct BeltramiCoefficient {
    eval: Arc<dyn Fn(C) -> C + Send + Sync>,
    domain: Domain,
    declared_sup: f64,
    label: String,
    /// The coefficient vanishes outside this box (half-plane carriers).
    support: Option<SupportBox>,
    /// The coefficient vanishes for `|z|` beyond this radius (exterior disk).
    support_radius: Option<f64>,
    /// Constant value on `support`, when the field is a box indicator.
    box_value: Option<C>,
    /// Largest `|μ|` seen on the validation grid.
    grid_sup: f64,
}

impl std::fmt::Debug for BeltramiCoefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BeltramiCoefficient")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("declared_sup", &self.declared_sup)
            .field("grid_sup", &self.grid_sup)
            .finish_non_exhaustive()
    }
}

impl BeltramiCoefficient {
    /// Wrap a pointwise formula, checking the size invariant on a fixed
    /// 100×100 grid (boundary-refined geometrically).
    pub fn new(
        label: impl Into<String>,
        domain: Domain,
        declared_sup: f64,
        eval: impl Fn(C) -> C + Send + Sync + 'static,
    ) -> Result<BeltramiCoefficient> {
        Self::assemble(label.into(), domain, declared_sup, Arc::new(eval), None, None, None)
    }

    /// The zero coefficient.
    pub fn zero(domain: Domain) -> BeltramiCoefficient {
        Self::assemble(
            "zero".into(),
            domain,
            0.0,
            Arc::new(|_| c(0.0, 0.0)),
            None,
            Some(1.0),
            None,
        )
        .expect("the zero coefficient is always valid")
    }

    /// `μ(z) = ½·min(1, (|z|²−1)^γ)` on the exterior disk: decays toward the
    /// unit circle at rate `γ` and saturates at ½ away from it.
    pub fn power_gamma(gamma: f64) -> Result<BeltramiCoefficient> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Hypothesis(format!(
                "decay exponent must lie in (0, 1], got {gamma}"
            )));
        }
        Self::assemble(
            format!("power:gamma={gamma}"),
            Domain::ExteriorDisk,
            0.5,
            Arc::new(move |z: C| {
                let s = z.norm_sqr() - 1.0;
                c(0.5 * s.powf(gamma).min(1.0), 0.0)
            }),
            None,
            None,
            None,
        )
    }

    /// Constant value on the annulus `1 < |z| < 2`, zero beyond.
    pub fn constant_annulus(value: C) -> Result<BeltramiCoefficient> {
        Self::assemble(
            format!("annulus:re={},im={}", value.re, value.im),
            Domain::ExteriorDisk,
            value.norm(),
            Arc::new(move |z: C| {
                let r2 = z.norm_sqr();
                if r2 < 4.0 {
                    value
                } else {
                    c(0.0, 0.0)
                }
            }),
            None,
            Some(2.0),
            None,
        )
    }

    /// Constant value on a rectangle strictly inside the upper half-plane,
    /// zero elsewhere.  These are the inputs of the variational kernels.
    pub fn box_on_upper(value: C, support: SupportBox) -> Result<BeltramiCoefficient> {
        if support.y0 <= 0.0 {
            return Err(Error::Support(format!(
                "box bottom y0 = {} must be strictly above the boundary line",
                support.y0
            )));
        }
        Self::assemble(
            format!(
                "box:x0={},x1={},y0={},y1={},re={},im={}",
                support.x0, support.x1, support.y0, support.y1, value.re, value.im
            ),
            Domain::UpperHalfPlane,
            value.norm(),
            Arc::new(move |z: C| if support.contains(z) { value } else { c(0.0, 0.0) }),
            Some(support),
            None,
            Some(value),
        )
    }

    fn assemble(
        label: String,
        domain: Domain,
        declared_sup: f64,
        eval: Arc<dyn Fn(C) -> C + Send + Sync>,
        support: Option<SupportBox>,
        support_radius: Option<f64>,
        box_value: Option<C>,
    ) -> Result<BeltramiCoefficient> {
        if domain != Domain::ExteriorDisk && domain != Domain::UpperHalfPlane {
            return Err(Error::KindDomain(format!(
                "coefficients live on `ext-disk` or `hplus`, not `{domain}`"
            )));
        }
        if !(declared_sup.is_finite() && (0.0..1.0).contains(&declared_sup)) {
            return Err(Error::Hypothesis(format!(
                "declared supremum must satisfy 0 ≤ s < 1, got {declared_sup}"
            )));
        }
        let mut grid_sup = 0.0f64;
        for z in validation_grid(domain, support) {
            let m = eval(z).norm();
            if m > declared_sup * (1.0 + 1e-12) {
                return Err(Error::Hypothesis(format!(
                    "|μ({z})| = {m} exceeds the declared supremum {declared_sup}"
                )));
            }
            grid_sup = grid_sup.max(m);
        }
        Ok(BeltramiCoefficient {
            eval,
            domain,
            declared_sup,
            label,
            support,
            support_radius,
            box_value,
            grid_sup,
        })
    }

    /// Pointwise value (unchecked; callers sample inside the carrier).
    pub fn eval(&self, z: C) -> C {
        (self.eval)(z)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn declared_sup(&self) -> f64 {
        self.declared_sup
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support(&self) -> Option<SupportBox> {
        self.support
    }

    /// Constant value on the support box, when the field is an indicator.
    pub fn box_value(&self) -> Option<C> {
        self.box_value
    }

    /// Largest modulus observed on the validation grid (a lower bound for
    /// the essential supremum).
    pub fn grid_sup(&self) -> f64 {
        self.grid_sup
    }
}

/// Fixed validation grid: 100 boundary-refined levels × 100 transversal
/// points, plus a 40×40 grid inside the support box when one is declared.
fn validation_grid(domain: Domain, support: Option<SupportBox>) -> Vec<C> {
    let mut pts = Vec::with_capacity(10_000 + 1_600);
    for i in 0..100 {
        // Distances 2^-12 … 2^6 from the boundary circle/line.
        let s = (2f64).powf(-12.0 + 18.0 * i as f64 / 99.0);
        for j in 0..100 {
            let t = (j as f64 + 0.5) / 100.0;
            let z = match domain {
                Domain::ExteriorDisk => {
                    C::from_polar((1.0 + s).sqrt(), 2.0 * std::f64::consts::PI * t)
                }
                _ => c(-8.0 + 16.0 * t, s),
            };
            pts.push(z);
        }
    }
    if let Some(b) = support {
        for i in 0..40 {
            let x = b.x0 + b.width() * (i as f64 + 0.5) / 40.0;
            for j in 0..40 {
                let y = b.y0 + b.height() * (j as f64 + 0.5) / 40.0;
                pts.push(c(x, y));
            }
        }
    }
    pts
}

/// Outcome of the size diagnostics for one coefficient.
#[derive(Clone, Debug, serde::Serialize)]
pub struct MembershipVerdict {
    pub label: String,
    pub p: f64,
    /// Ladder value of the `p`-integral seminorm (divergence flagged).
    pub p_norm: SeminormValue,
    /// Grid supremum of `|μ|`.
    pub sup_norm: f64,
    /// Least-squares decay exponent fitted to boundary-shell suprema, when
    /// the decay is a clean power; `None` off the exterior disk or when the
    /// signal is degenerate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_fit: Option<f64>,
}

/// The `p`-integral seminorm ladder of a coefficient.
///
/// On the exterior disk the integrand `|μ|^p (2/(|z|²−1))²` is summed over
/// shells approaching the unit circle (where any divergence lives), with the
/// region beyond radius 64 bounded by the declared supremum unless the
/// support is known to end earlier.  On the upper half-plane the coefficient
/// must be compactly supported (a box), and the integral `|μ|^p / (Im z)²`
/// is exact for constant boxes.
pub fn p_norm(
    mu: &BeltramiCoefficient,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<SeminormValue> {
    cfg.validate()?;
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::KindDomain(format!("p-integrability needs p ≥ 1, got {p}")));
    }
    match mu.domain {
        Domain::ExteriorDisk => Ok(exterior_p_ladder(mu, p, cfg)),
        Domain::UpperHalfPlane => {
            let b = mu.support.ok_or_else(|| {
                Error::Support(
                    "half-plane p-norms need a declared support box".into(),
                )
            })?;
            let raw = if let Some(v) = mu.box_value {
                v.norm().powf(p) * b.width() * (1.0 / b.y0 - 1.0 / b.y1)
            } else {
                let inner = |y: f64| {
                    let row = |x: f64| mu.eval(c(x, y)).norm().powf(p);
                    crate::quadrature::adaptive_gauss(&row, b.x0, b.x1, 1e-9, 15, 10) / (y * y)
                };
                crate::quadrature::adaptive_gauss(&inner, b.y0, b.y1, 1e-9, 15, 10)
            };
            Ok(SeminormValue::exact(raw.powf(1.0 / p)))
        }
        other => Err(Error::KindDomain(format!("no p-norm carrier on `{other}`"))),
    }
}

fn exterior_p_ladder(mu: &BeltramiCoefficient, p: f64, cfg: &QuadratureConfig) -> SeminormValue {
    let integrand = |z: C| {
        let s = z.norm_sqr() - 1.0;
        mu.eval(z).norm().powf(p) * (2.0 / s).powi(2)
    };
    let eps = &cfg.shell_epsilons;
    let mut partials = Vec::with_capacity(eps.len());
    // Fixed outer region [1+ε₀, 64] in dyadic pieces, plus the tail bound.
    let mut acc = integrate_annulus(&integrand, 1.0 + eps[0], 2.0, cfg, 0.0);
    let skip_outer = mu.support_radius.is_some_and(|r| r <= 2.0);
    if !skip_outer {
        let mut r = 2.0;
        while r < OUTER_RADIUS {
            acc += integrate_annulus(&integrand, r, 2.0 * r, cfg, acc);
            r *= 2.0;
        }
    }
    if !mu.support_radius.is_some_and(|r| r <= OUTER_RADIUS) {
        // ∫_{|z|>R} (2/(|z|²−1))² dA = 4π/(R²−1), times the worst |μ|^p.
        acc += mu.declared_sup.powf(p) * 4.0 * std::f64::consts::PI
            / (OUTER_RADIUS * OUTER_RADIUS - 1.0);
    }
    partials.push(acc);
    for k in 1..eps.len() {
        acc += integrate_annulus(&integrand, 1.0 + eps[k], 1.0 + eps[k - 1], cfg, acc);
        partials.push(acc);
    }
    SeminormValue::from_partials(eps, &partials, cfg.tol_rel).map_monotone(|x| x.powf(1.0 / p))
}

/// Supremum ladder of `((|z|²−1)^{−γ} ∨ 1)·|μ(z)|` on the exterior disk.
///
/// Rung `k` is the running supremum over `|z|² − 1 ≥ ε_k`; divergence of the
/// ladder means the coefficient decays slower than `γ` allows.
pub fn decay_check(
    mu: &BeltramiCoefficient,
    gamma: f64,
    cfg: &QuadratureConfig,
) -> Result<SeminormValue> {
    cfg.validate()?;
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Hypothesis(format!(
            "decay exponent must lie in (0, 1], got {gamma}"
        )));
    }
    if mu.domain != Domain::ExteriorDisk {
        return Err(Error::KindDomain(
            "the decay class is read on the exterior disk".into(),
        ));
    }
    let weighted = |z: C| {
        let s = z.norm_sqr() - 1.0;
        s.powf(-gamma).max(1.0) * mu.eval(z).norm()
    };
    // Geometric sweep of one band of `s = |z|²−1`, updating the running sup.
    fn scan(
        weighted: &impl Fn(C) -> f64,
        s_lo: f64,
        s_hi: f64,
        levels: usize,
        best: &mut f64,
        witness: &mut C,
    ) {
        for i in 0..levels {
            let s = s_lo * (s_hi / s_lo).powf((i as f64 + 0.5) / levels as f64);
            let r = (1.0 + s).sqrt();
            for j in 0..256 {
                let z = C::from_polar(r, 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / 256.0);
                let v = weighted(z);
                if v > *best {
                    *best = v;
                    *witness = z;
                }
            }
        }
    }
    let eps = &cfg.shell_epsilons;
    let mut partials = Vec::with_capacity(eps.len());
    let mut best = 0.0f64;
    let mut witness = c(2.0, 0.0);
    scan(&weighted, eps[0], OUTER_RADIUS * OUTER_RADIUS, 48, &mut best, &mut witness);
    partials.push(best);
    for k in 1..eps.len() {
        scan(&weighted, eps[k], eps[k - 1], 8, &mut best, &mut witness);
        partials.push(best);
    }
    let mut out = SeminormValue::from_partials(eps, &partials, cfg.tol_rel);
    out.estimate = *partials.last().unwrap();
    out.tail = 0.0;
    out.witness = Some((witness.re, witness.im));
    Ok(out)
}

/// Fit a decay exponent from boundary-shell suprema of `|μ|`: the slope of
/// `ln sup` against `ln shell-height` over the last dyadic shells.  `None`
/// when the carrier is not the exterior disk, the coefficient is negligible
/// near the circle, or the decay is not a clean power.
fn fit_gamma(mu: &BeltramiCoefficient) -> Option<f64> {
    if mu.domain != Domain::ExteriorDisk {
        return None;
    }
    let shells: Vec<f64> = (8..=13).map(|k| (2f64).powi(-k)).collect();
    let mut ln_s = Vec::new();
    let mut ln_m = Vec::new();
    for &s_hi in &shells {
        let s_lo = s_hi / 2.0;
        let mut m = 0.0f64;
        for i in 0..6 {
            let s = s_lo * (s_hi / s_lo).powf((i as f64 + 0.5) / 6.0);
            let r = (1.0 + s).sqrt();
            for j in 0..128 {
                let z = C::from_polar(r, 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / 128.0);
                m = m.max(mu.eval(z).norm());
            }
        }
        if m < 1e-13 {
            return None;
        }
        ln_s.push(s_hi.ln());
        ln_m.push(m.ln());
    }
    let n = ln_s.len() as f64;
    let (sx, sy): (f64, f64) = (ln_s.iter().sum(), ln_m.iter().sum());
    let sxx: f64 = ln_s.iter().map(|x| x * x).sum();
    let sxy: f64 = ln_s.iter().zip(&ln_m).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let max_resid = ln_s
        .iter()
        .zip(&ln_m)
        .map(|(x, y)| (y - (slope * x + intercept)).abs())
        .fold(0.0f64, f64::max);
    (slope.is_finite() && max_resid < 0.05).then_some(slope)
}

/// Assemble the full size diagnostics for one coefficient.
pub fn membership(
    mu: &BeltramiCoefficient,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<MembershipVerdict> {
    Ok(MembershipVerdict {
        label: mu.label.clone(),
        p,
        p_norm: p_norm(mu, p, cfg)?,
        sup_norm: mu.grid_sup,
        gamma_fit: fit_gamma(mu),
    })
}

/// The section map: turn an analytic `Φ` on the lower half-plane with
/// `sup |Im z|·|Φ′| < ½` into a coefficient on the upper half-plane by
/// `μ(z) = −2·Im(z)·|Φ′(z̄)|` (the source formula carries the modulus; see
/// [`aw_section_no_modulus`] for the variant without it).
pub fn aw_section(
    phi: &AnalyticMap,
    cfg: &QuadratureConfig,
) -> Result<BeltramiCoefficient> {
    section_impl(phi, cfg, true)
}

/// As [`aw_section`] but without the modulus: `μ(z) = −2·Im(z)·Φ′(z̄)`.
/// Provided for comparison; neither variant is asserted as the canonical
/// section.
pub fn aw_section_no_modulus(
    phi: &AnalyticMap,
    cfg: &QuadratureConfig,
) -> Result<BeltramiCoefficient> {
    section_impl(phi, cfg, false)
}

fn section_impl(
    phi: &AnalyticMap,
    cfg: &QuadratureConfig,
    modulus: bool,
) -> Result<BeltramiCoefficient> {
    if phi.domain() != Domain::LowerHalfPlane {
        return Err(Error::KindDomain(
            "the section reads Φ on the lower half-plane".into(),
        ));
    }
    let bloch = seminorm(phi, SeminormKind::Bloch, cfg)?;
    if bloch.divergent || !(bloch.estimate < 0.5) {
        return Err(Error::Hypothesis(format!(
            "the section needs sup |Im z|·|Φ′| < 1/2; the ladder gives {}{}",
            bloch.estimate,
            if bloch.divergent { " (divergent)" } else { "" }
        )));
    }
    let declared = (2.0 * bloch.estimate * (1.0 + 1e-6)).min(1.0 - 1e-12);
    let pc = phi.clone();
    let eval = move |z: C| -> C {
        let d1 = pc
            .jet_unchecked(z.conj(), 1)
            .expect("Φ′ must be evaluable at the mirror point")
            .d1();
        if modulus {
            c(-2.0 * z.im * d1.norm(), 0.0)
        } else {
            c(-2.0 * z.im, 0.0) * d1
        }
    };
    let tag = if modulus { "section" } else { "section-no-modulus" };
    BeltramiCoefficient::new(
        format!("{tag}(bloch={:.6})", bloch.estimate),
        Domain::UpperHalfPlane,
        declared,
        eval,
    )
}

/// One cell of the inclusion diagram: build `μ_γ = ½·min(1,(|z|²−1)^γ)` and
/// report whether its decay class and its `p`-integrability verdicts sit on
/// the expected side of the `γp > 1` threshold.
pub fn inclusion_witness(
    gamma: f64,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<VerificationReport> {
    let mu = BeltramiCoefficient::power_gamma(gamma)?;
    let decay = decay_check(&mu, gamma, cfg)?;
    let norm = p_norm(&mu, p, cfg)?;
    let mut report = VerificationReport::new("beltrami-inclusion", cfg);
    report.push(
        Check::condition(
            format!("decay:gamma={gamma}"),
            "coefficient lies in its own decay class (ladder settles)",
            !decay.divergent,
            Some(decay.estimate),
            Some(0.5),
        )
        .with_ladder(&decay, 4),
    );
    report.push(
        Check::condition(
            format!("pnorm-threshold:gamma={gamma},p={p}"),
            "p-integrability holds exactly when the decay-integrability product exceeds one",
            norm.divergent == (gamma * p <= 1.0),
            Some(norm.estimate),
            Some(gamma * p),
        )
        .with_ladder(&norm, 4),
    );
    Ok(report)
}

impl FromStr for BeltramiCoefficient {
    type Err = Error;

    /// Parse `name[:key=value,…]`: `zero`, `power:gamma=0.5`,
    /// `annulus:re=0.3,im=0.1`, or `box:x0=0,x1=1,y0=1,y1=2,re=0.3,im=0`.
    fn from_str(s: &str) -> Result<BeltramiCoefficient> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (s, None),
        };
        let mut params = std::collections::BTreeMap::new();
        if let Some(rest) = rest {
            for piece in rest.split(',') {
                let (k, v) = piece
                    .split_once('=')
                    .ok_or_else(|| Error::parse(s, format!("expected key=value, got `{piece}`")))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(s, format!("`{v}` is not a number")))?;
                params.insert(k.trim().to_string(), v);
            }
        }
        let get = |k: &str| -> Result<f64> {
            params
                .get(k)
                .copied()
                .ok_or_else(|| Error::parse(s, format!("missing parameter `{k}`")))
        };
        match name {
            "zero" => Ok(BeltramiCoefficient::zero(Domain::ExteriorDisk)),
            "power" => BeltramiCoefficient::power_gamma(get("gamma")?),
            "annulus" => BeltramiCoefficient::constant_annulus(c(
                get("re")?,
                params.get("im").copied().unwrap_or(0.0),
            )),
            "box" => BeltramiCoefficient::box_on_upper(
                c(get("re")?, params.get("im").copied().unwrap_or(0.0)),
                SupportBox::new(get("x0")?, get("x1")?, get("y0")?, get("y1")?)?,
            ),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Expr;
    use approx::assert_relative_eq;

    /// Exact `∫ |μ_γ|^p (2/s)² dA` over `|z|² − 1 ≥ s0` for the power
    /// coefficient, by the radial substitution `s = |z|² − 1`.
    fn power_norm_closed_form(gamma: f64, p: f64, s0: f64) -> f64 {
        let gp = gamma * p;
        let factor = 4.0 * std::f64::consts::PI / (2f64).powf(p);
        let near = if (gp - 1.0).abs() < 1e-12 {
            (1.0 / s0).ln()
        } else {
            (1.0 - s0.powf(gp - 1.0)) / (gp - 1.0)
        };
        factor * (near + 1.0)
    }

    #[test]
    fn zero_is_trivial_everywhere() {
        let cfg = QuadratureConfig::default();
        let mu = BeltramiCoefficient::zero(Domain::ExteriorDisk);
        let n = p_norm(&mu, 2.0, &cfg).unwrap();
        assert!(!n.divergent);
        assert_eq!(n.estimate, 0.0);
        let d = decay_check(&mu, 1.0, &cfg).unwrap();
        assert!(!d.divergent);
        assert_eq!(d.estimate, 0.0);
        let v = membership(&mu, 2.0, &cfg).unwrap();
        assert_eq!(v.sup_norm, 0.0);
        assert!(v.gamma_fit.is_none());
    }

    #[test]
    fn power_coefficient_matches_radial_closed_form() {
        let cfg = QuadratureConfig::default();
        // γp = 2: convergent, full integral has a closed form.
        let mu = BeltramiCoefficient::power_gamma(1.0).unwrap();
        let n = p_norm(&mu, 2.0, &cfg).unwrap();
        assert!(!n.divergent);
        let exact = power_norm_closed_form(1.0, 2.0, 0.0);
        assert_relative_eq!(n.estimate.powi(2), exact, max_relative = 1e-3);
        // Every rung matches the truncated closed form tightly.  Rung k
        // covers |z| ≥ 1 + ε_k, i.e. s ≥ ε_k(2 + ε_k).
        for (k, &(e, v)) in n.ladder.iter().enumerate().skip(1) {
            let s0 = e * (2.0 + e);
            assert_relative_eq!(
                v.powi(2),
                power_norm_closed_form(1.0, 2.0, s0),
                max_relative = 1e-5,
            );
            let _ = k;
        }
        // γp = 1: the marginal, logarithmically divergent case.
        let mu_half = BeltramiCoefficient::power_gamma(0.5).unwrap();
        let n = p_norm(&mu_half, 2.0, &cfg).unwrap();
        assert!(n.divergent);
        // γp = 1.5: convergent again.
        let n = p_norm(&mu_half, 3.0, &cfg).unwrap();
        assert!(!n.divergent);
        assert_relative_eq!(
            n.estimate.powi(3),
            power_norm_closed_form(0.5, 3.0, 0.0),
            max_relative = 1e-3,
        );
    }

    #[test]
    fn annulus_ladder_matches_closed_form_per_rung() {
        let mut cfg = QuadratureConfig::default();
        cfg.tol_rel = 1e-9;
        let value = c(0.3, 0.4);
        let mu = BeltramiCoefficient::constant_annulus(value).unwrap();
        let p = 2.0;
        let n = p_norm(&mu, p, &cfg).unwrap();
        assert!(n.divergent, "constant up to the circle cannot be p-integrable");
        for &(e, v) in n.ladder.iter() {
            let s0 = e * (2.0 + e);
            // ∫_{s0 ≤ s ≤ 3} |c|^p (2/s)² dA = |c|^p·4π·(1/s0 − 1/3).
            let exact = value.norm().powi(2) * 4.0 * std::f64::consts::PI * (1.0 / s0 - 1.0 / 3.0);
            assert_relative_eq!(v.powi(2), exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn threshold_grid_all_twenty_cells() {
        let cfg = QuadratureConfig::default();
        for &gamma in &[0.25, 0.5, 0.75, 1.0] {
            let mu = BeltramiCoefficient::power_gamma(gamma).unwrap();
            for &p in &[1.0, 1.5, 2.0, 3.0, 4.0] {
                let n = p_norm(&mu, p, &cfg).unwrap();
                let expect_finite = gamma * p > 1.0;
                assert_eq!(
                    !n.divergent,
                    expect_finite,
                    "gamma={gamma} p={p}: ladder {:?}",
                    n.ladder.last()
                );
            }
        }
    }

    #[test]
    fn decay_class_membership_and_failure() {
        let cfg = QuadratureConfig::default();
        let mu1 = BeltramiCoefficient::power_gamma(1.0).unwrap();
        let d = decay_check(&mu1, 1.0, &cfg).unwrap();
        assert!(!d.divergent);
        assert_relative_eq!(d.estimate, 0.5, max_relative = 1e-9);

        // γ-decay ½ tested against the full exponent 1 fails: the weighted
        // sup grows like s^{-1/2}.
        let mu_half = BeltramiCoefficient::power_gamma(0.5).unwrap();
        let d = decay_check(&mu_half, 1.0, &cfg).unwrap();
        assert!(d.divergent);

        // Tested against its own exponent it is exactly ½ again.
        let d = decay_check(&mu_half, 0.5, &cfg).unwrap();
        assert!(!d.divergent);
        assert_relative_eq!(d.estimate, 0.5, max_relative = 1e-9);
    }

    #[test]
    fn gamma_fit_recovers_power_exponents() {
        for gamma in [0.25, 0.5, 1.0] {
            let mu = BeltramiCoefficient::power_gamma(gamma).unwrap();
            let fit = fit_gamma(&mu).expect("power decay is a clean power");
            assert_relative_eq!(fit, gamma, max_relative = 1e-6);
        }
        let annulus = BeltramiCoefficient::constant_annulus(c(0.5, 0.0)).unwrap();
        let fit = fit_gamma(&annulus).expect("constant has exponent zero");
        assert!(fit.abs() < 1e-9);
    }

    #[test]
    fn box_norm_closed_form_and_support_rules() {
        let cfg = QuadratureConfig::default();
        let b = SupportBox::new(0.0, 1.0, 1.0, 2.0).unwrap();
        let mu = BeltramiCoefficient::box_on_upper(c(0.3, 0.0), b).unwrap();
        let n = p_norm(&mu, 2.0, &cfg).unwrap();
        let exact = 0.3 * (1.0f64 * (1.0 - 0.5)).sqrt();
        assert_relative_eq!(n.estimate, exact, max_relative = 1e-12);
        assert!(!n.divergent);

        // Boxes may not touch the boundary line.
        let low = SupportBox::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            BeltramiCoefficient::box_on_upper(c(0.1, 0.0), low),
            Err(Error::Support(_))
        ));
        // Degenerate rectangles are rejected at construction.
        assert!(SupportBox::new(1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn size_invariant_is_enforced() {
        // Declared supremum at or above one is rejected.
        assert!(BeltramiCoefficient::new(
            "too-big",
            Domain::ExteriorDisk,
            1.0,
            |_| c(0.9, 0.0)
        )
        .is_err());
        // Declared supremum smaller than the actual field is caught.
        assert!(BeltramiCoefficient::new(
            "lying",
            Domain::ExteriorDisk,
            0.1,
            |_| c(0.5, 0.0)
        )
        .is_err());
        // Carrier restriction.
        assert!(BeltramiCoefficient::new("wrong", Domain::UnitDisk, 0.1, |_| c(0.0, 0.0))
            .is_err());
    }

    #[test]
    fn section_gate_bound_and_variants() {
        let cfg = QuadratureConfig::default();
        let z = Expr::var();
        // Φ(z) = 0.2·log(iz) on the lower half-plane: iz has positive real
        // part there, |Im z|·|Φ′| = 0.2|Im z|/|z| ≤ 0.2.
        let phi = (Expr::constant(c(0.0, 1.0)) * &z).ln() * Expr::real(0.2);
        let phi = phi.on(Domain::LowerHalfPlane);
        let mu = aw_section(&phi, &cfg).unwrap();
        assert_eq!(mu.domain(), Domain::UpperHalfPlane);
        // Grid sup transfers: sup |μ| = 2·sup |Im z||Φ′|.
        assert_relative_eq!(mu.grid_sup(), 2.0 * 0.2, max_relative = 1e-3);
        assert!(mu.grid_sup() < 1.0);
        // Values are real and nonpositive (the formula carries a modulus).
        let v = mu.eval(c(0.3, 0.7));
        assert_eq!(v.im, 0.0);
        assert!(v.re <= 0.0);

        // The no-modulus variant has the same size but complex values.
        let mu2 = aw_section_no_modulus(&phi, &cfg).unwrap();
        assert_relative_eq!(mu2.eval(c(0.3, 0.7)).norm(), v.norm(), max_relative = 1e-12);
        assert!(mu2.eval(c(0.3, 0.7)).im != 0.0);

        // Hypothesis gate: Bloch norm 0.6 ≥ ½ is rejected.
        let big = (Expr::constant(c(0.0, 1.0)) * &z).ln() * Expr::real(0.6);
        let err = aw_section(&big.on(Domain::LowerHalfPlane), &cfg).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)), "{err}");

        // Constants produce the zero coefficient.
        let flat = Expr::constant(c(3.0, -1.0)).on(Domain::LowerHalfPlane);
        let mu0 = aw_section(&flat, &cfg).unwrap();
        assert_eq!(mu0.grid_sup(), 0.0);
    }

    #[test]
    fn inclusion_witness_reports() {
        let cfg = QuadratureConfig::default();
        // γ = 1, p = 2: both sides finite.
        let r = inclusion_witness(1.0, 2.0, &cfg).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        // γ = 1, p = 1: the boundary case, p-norm divergent, still passes
        // because the verdict matches the threshold side.
        let r = inclusion_witness(1.0, 1.0, &cfg).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        // γ = 0.5, p = 3: finite.
        let r = inclusion_witness(0.5, 3.0, &cfg).unwrap();
        assert!(r.passed(), "{}", r.to_json());
    }

    #[test]
    fn parse_round_trips() {
        for s in ["zero", "power:gamma=0.5", "annulus:re=0.3,im=0.1",
                  "box:x0=0,x1=1,y0=1,y1=2,re=0.3"] {
            let mu: BeltramiCoefficient = s.parse().unwrap();
            assert!(mu.declared_sup() < 1.0);
        }
        assert!("power:gamma=2".parse::<BeltramiCoefficient>().is_err());
        assert!("nonsense".parse::<BeltramiCoefficient>().is_err());
        assert!("box:x0=0".parse::<BeltramiCoefficient>().is_err());
    }
}
