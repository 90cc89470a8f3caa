//! The witness gallery and the pre-registered verification suites.
//!
//! A gallery member is named by a spec string like `koebe`,
//! `monomial:m=3`, `lacunary_phi1:a=0.1`, or `cayley_pullback:of=koebe`;
//! [`gallery`] turns the string into an [`AnalyticMap`].  [`run_suite`]
//! executes one of six named check batteries and returns a report whose
//! rows are sorted by claim id, so output is byte-stable run to run.

use std::collections::BTreeMap;

use crate::beltrami::{aw_section, aw_section_no_modulus, inclusion_witness, BeltramiCoefficient, SupportBox};
use crate::cayley::{cayley, green_energy, pullback_from_disk, pushforward_to_disk, transport_report, CayleyDirection, Mobius};
use crate::error::{Error, Result};
use crate::function::{AnalyticMap, Domain, Expr};
use crate::quadrature::QuadratureConfig;
use crate::report::{Check, VerificationReport};
use crate::schwarzian::{
    besov_variation_constant, canonical_j, d0_pre_schwarzian, d0_pre_schwarzian_besov,
    d0_schwarzian, d0_schwarzian_weighted, mobius_shift, schwarzian, ImageSpec, ShiftTarget,
    SCHWARZIAN_VARIATION_CONSTANT,
};
use crate::seminorm::{
    equivalence_probe_p1, inequality_suite, seminorm, sharp_monotonicity_checks, SeminormKind,
};
use crate::{c, C};

/// Default amplitude for the two separation witnesses.  Seminorm ladders
/// are positively homogeneous, so the amplitude only scales values; small
/// amplitudes keep every finite seminorm in a well-conditioned range.
pub const WITNESS_AMPLITUDE: f64 = 0.1;

/// Default number of lacunary terms (exponents `2^0 .. 2^47`): far beyond
/// anything the quadrature shells can see, so truncation is invisible.
pub const LACUNARY_TERMS: u64 = 48;

/// The available suite identifiers, in canonical order.
pub const SUITE_IDS: [&str; 6] = [
    "norm-inequalities",
    "cayley-transport",
    "schwarzian-identities",
    "counterexamples",
    "variational-bounds",
    "beltrami-inclusions",
];

/// The gallery member names (parameters shown with their defaults).
pub const GALLERY_NAMES: [&str; 8] = [
    "identity",
    "monomial:m=2",
    "koebe",
    "log_witness",
    "lacunary_phi1:a=0.1,n=48",
    "logsq_phi1:a=0.1",
    "cayley_pullback:of=<member>",
    "halfplane_pole:k=1",
];

fn parse_params(
    name: &str,
    body: &str,
    allowed: &[&str],
) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    if body.is_empty() {
        return Ok(out);
    }
    for piece in body.split(',') {
        let (k, v) = piece
            .split_once('=')
            .ok_or_else(|| Error::parse(piece, "expected key=value"))?;
        if !allowed.contains(&k) {
            return Err(Error::parse(k, format!("`{name}` takes only {allowed:?}")));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::parse(k, "parameter given twice"));
        }
    }
    Ok(out)
}

fn param_f64(map: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64> {
    match map.get(key) {
        None => Ok(default),
        Some(s) => s
            .parse::<f64>()
            .map_err(|_| Error::parse(s.as_str(), format!("`{key}` must be a real number"))),
    }
}

fn param_u64(map: &BTreeMap<String, String>, key: &str, default: u64) -> Result<u64> {
    match map.get(key) {
        None => Ok(default),
        Some(s) => s
            .parse::<u64>()
            .map_err(|_| Error::parse(s.as_str(), format!("`{key}` must be a nonnegative integer"))),
    }
}

/// Build a gallery member from its spec string.
///
/// | name | parameters | domain |
/// |------|------------|--------|
/// | `identity` | — | disk |
/// | `monomial` | `m` (default 2) | disk |
/// | `koebe` | — | disk |
/// | `log_witness` | — | disk |
/// | `lacunary_phi1` | `a` (default 0.1), `n` terms (default 48) | disk |
/// | `logsq_phi1` | `a` (default 0.1) | disk |
/// | `cayley_pullback` | `of=<full inner spec>` | upper half-plane |
/// | `halfplane_pole` | `k` (default 1) | lower half-plane |
pub fn gallery(spec: &str) -> Result<AnalyticMap> {
    let spec = spec.trim();
    if let Some(inner) = spec.strip_prefix("cayley_pullback:of=") {
        let f = gallery(inner)?;
        if f.domain() != Domain::UnitDisk {
            return Err(Error::KindDomain(
                "cayley_pullback wraps disk members only".into(),
            ));
        }
        return pullback_from_disk(&f, Domain::UpperHalfPlane);
    }
    if spec == "cayley_pullback" || spec.starts_with("cayley_pullback:") {
        return Err(Error::parse(spec, "expected cayley_pullback:of=<member>"));
    }
    let (name, body) = match spec.split_once(':') {
        Some((n, b)) => (n, b),
        None => (spec, ""),
    };
    let z = Expr::var;
    match name {
        "identity" => {
            parse_params(name, body, &[])?;
            Ok(z().on_disk())
        }
        "monomial" => {
            let params = parse_params(name, body, &["m"])?;
            let m = param_u64(&params, "m", 2)?;
            if m > 64 {
                return Err(Error::parse(spec, "monomial degree capped at 64"));
            }
            Ok(z().powi(m as i64).on_disk())
        }
        "koebe" => {
            parse_params(name, body, &[])?;
            Ok((z() * (Expr::real(1.0) - z()).powi(-2)).on_disk())
        }
        "log_witness" => {
            parse_params(name, body, &[])?;
            Ok((Expr::real(1.0) - z()).powi(-1).ln().on_disk())
        }
        "lacunary_phi1" => {
            let params = parse_params(name, body, &["a", "n"])?;
            let a = param_f64(&params, "a", WITNESS_AMPLITUDE)?;
            let n = param_u64(&params, "n", LACUNARY_TERMS)?;
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::parse(spec, "amplitude must be positive"));
            }
            if !(1..=60).contains(&n) {
                return Err(Error::parse(spec, "term count must lie in 1..=60"));
            }
            let terms: Vec<(C, u64)> = (0..n)
                .map(|j| (c(a * (2f64).powi(-(j as i32)), 0.0), 1u64 << j))
                .collect();
            Ok(Expr::series(terms).on_disk())
        }
        "logsq_phi1" => {
            let params = parse_params(name, body, &["a"])?;
            let a = param_f64(&params, "a", WITNESS_AMPLITUDE)?;
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::parse(spec, "amplitude must be positive"));
            }
            let one_minus = Expr::real(1.0) - z();
            let l = one_minus.powi(-1).ln();
            Ok((Expr::real(a) * &one_minus * &l * &l).on_disk())
        }
        "halfplane_pole" => {
            let params = parse_params(name, body, &["k"])?;
            let k = param_u64(&params, "k", 1)?;
            if !(1..=16).contains(&k) {
                return Err(Error::parse(spec, "pole order must lie in 1..=16"));
            }
            Ok((z() - Expr::constant(c(0.0, 1.0)))
                .powi(-(k as i64))
                .on(Domain::LowerHalfPlane))
        }
        other => Err(Error::UnknownName(format!("gallery function `{other}`"))),
    }
}

/// Run one named suite and return its report, rows sorted by claim id.
pub fn run_suite(suite_id: &str, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let mut report = match suite_id {
        "norm-inequalities" => norm_inequalities(cfg)?,
        "cayley-transport" => cayley_transport(cfg)?,
        "schwarzian-identities" => schwarzian_identities(cfg)?,
        "counterexamples" => counterexamples(cfg)?,
        "variational-bounds" => variational_bounds(cfg)?,
        "beltrami-inclusions" => beltrami_inclusions(cfg)?,
        other => {
            return Err(Error::UnknownName(format!(
                "suite `{other}` (available: {})",
                SUITE_IDS.join(", ")
            )))
        }
    };
    report.checks.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    Ok(report)
}

/// The six disk members the inequality battery runs on.
fn inequality_gallery() -> [&'static str; 6] {
    [
        "identity",
        "monomial:m=3",
        "koebe",
        "log_witness",
        "lacunary_phi1:a=0.1",
        "logsq_phi1:a=0.1",
    ]
}

fn norm_inequalities(cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("norm-inequalities", cfg);
    let ps = [1.5, 2.0, 3.0];
    let mono_pairs = [(1.0, 2.0), (1.5, 3.0), (2.0, 3.0)];
    for spec in inequality_gallery() {
        let f = gallery(spec)?;
        for chk in inequality_suite(&f, spec, &ps, cfg)?.checks {
            report.push(chk);
        }
        for chk in sharp_monotonicity_checks(&f, spec, &mono_pairs, cfg)? {
            report.push(chk);
        }
        for chk in equivalence_probe_p1(&f, spec, cfg)? {
            report.push(chk);
        }
    }
    Ok(report)
}

fn cayley_transport(cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("cayley-transport", cfg);

    // Composite-seminorm transport rows for two pole orders at p = 2 and
    // the one-sided p = 1 comparison (which carries the computed curvature
    // Carleson constant).
    for (spec, p) in [
        ("halfplane_pole:k=1", 2.0),
        ("halfplane_pole:k=2", 2.0),
        ("halfplane_pole:k=1", 1.0),
    ] {
        let f = gallery(spec)?;
        for mut chk in transport_report(&f, p, cfg)?.checks {
            chk.claim_id = format!("{spec}:{}", chk.claim_id);
            report.push(chk);
        }
    }

    // The quadratic first-derivative mean is an exact conformal invariant:
    // equality rows on three pole orders.
    for k in 1..=3u64 {
        let spec = format!("halfplane_pole:k={k}");
        let f = gallery(&spec)?;
        let disk_side = pushforward_to_disk(&f)?;
        let h = seminorm(&f, SeminormKind::Besov(2.0), cfg)?;
        let d = seminorm(&disk_side, SeminormKind::Besov(2.0), cfg)?;
        report.push(
            Check::equality(
                format!("{spec}:quadratic-mean-invariant"),
                "quadratic first-derivative mean is equal on both sides of the transform",
                h.estimate,
                d.estimate,
                1e-4,
            )
            .with_ladder(&h, 4),
        );
    }

    // The Green-potential energy is invariant point by point.
    for (k, w) in [(1u64, c(-0.5, -1.5)), (2, c(0.75, -0.8))] {
        let spec = format!("halfplane_pole:k={k}");
        let f = gallery(&spec)?;
        let e_h = green_energy(&f, w, cfg)?;
        let disk_side = pushforward_to_disk(&f)?;
        let e_d = green_energy(&disk_side, cayley(w, CayleyDirection::LowerToDisk)?, cfg)?;
        report.push(Check::equality(
            format!("{spec}:green-energy-invariant"),
            "Green-potential energy agrees at mirrored base points",
            e_h,
            e_d,
            1e-4,
        ));
    }

    // Visibility of p = 1 non-invariance: the sharp seminorm of the simple
    // pole is 4 on the half-plane but 0 for its (linear) disk transport.
    {
        let f = gallery("halfplane_pole:k=1")?;
        let disk_side = pushforward_to_disk(&f)?;
        let h = seminorm(&f, SeminormKind::BesovSharp(1.0), cfg)?;
        let d = seminorm(&disk_side, SeminormKind::BesovSharp(1.0), cfg)?;
        let gap_visible = !h.divergent
            && !d.divergent
            && (h.estimate - d.estimate).abs() > 0.1 * h.estimate.max(d.estimate);
        report.push(
            Check::condition(
                "sharp-p1-not-isometric",
                "the p=1 sharp seminorm moves by more than 10% under transport \
                 (two-sided comparability, not isometry)",
                gap_visible,
                Some(h.estimate),
                Some(d.estimate),
            )
            .with_ladder(&h, 4),
        );
    }

    Ok(report)
}

/// Ten Möbius maps with poles spiralling outside the closed disk
/// (golden-angle spacing); nonsingular by construction.
fn mobius_family() -> Vec<Mobius> {
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    (0..10)
        .map(|j| {
            let jf = j as f64;
            let t = std::f64::consts::TAU * (jf * GOLDEN).fract();
            let pole = C::from_polar(1.5 + 0.2 * jf, t);
            let a = C::from_polar(1.0 + 0.1 * jf, 0.7 * t);
            let b = c(0.3 * jf.cos(), -0.2);
            // |a·pole| >= 1.5 > |b|, so the determinant stays away from 0.
            Mobius::new(a, b, c(1.0, 0.0), -pole)
        })
        .collect()
}

/// Interior grid points on a slowly winding spiral, bounded away from the
/// real axis' logarithm cuts by genericity of the golden angle.
fn spiral_points(n: usize) -> Vec<C> {
    (0..n)
        .map(|j| {
            let r = 0.05 + 0.88 * (j as f64 + 0.5) / n as f64;
            C::from_polar(r, 2.399_963 * (j as f64 + 1.0))
        })
        .collect()
}

fn koebe_map() -> AnalyticMap {
    gallery("koebe").expect("fixed spec parses")
}

fn schwarzian_identities(cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("schwarzian-identities", cfg);
    let pts = spiral_points(200);

    // Möbius maps are the kernel of the curvature operator.
    {
        let mut worst = 0.0f64;
        for m in mobius_family() {
            let s = schwarzian(&m.expr().on_disk());
            for &z in &pts {
                worst = worst.max(s.eval(z)?.norm());
            }
        }
        report.push(Check::condition(
            "mobius-kernel",
            "curvature of ten Möbius maps vanishes on a 200-point grid (sup < 1e-10)",
            worst < 1e-10,
            Some(worst),
            Some(1e-10),
        ));
    }

    // Closed form on the cusp map.
    {
        let s = schwarzian(&koebe_map());
        let mut worst = 0.0f64;
        for &z in &pts {
            let d = c(1.0, 0.0) - z * z;
            worst = worst.max((s.eval(z)? + c(6.0, 0.0) * (d * d).inv()).norm());
        }
        report.push(Check::condition(
            "koebe-closed-form",
            "curvature of the cusp map matches -6/(1-z²)² (sup < 1e-10)",
            worst < 1e-10,
            Some(worst),
            Some(1e-10),
        ));
    }

    // J(log F') = S_F, for the cusp map and two Möbius post-compositions
    // whose poles stay on the omitted ray.
    let composed: [(&str, Option<Mobius>); 3] = [
        ("plain", None),
        ("post-pole-at-minus-1", Some(Mobius::new(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)))),
        ("post-pole-at-minus-half", Some(Mobius::new(c(1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)))),
    ];
    for (tag, w) in composed {
        let f = match &w {
            None => koebe_map(),
            Some(m) => m.expr().of(koebe_map().expr()).on_disk(),
        };
        let j = canonical_j(&f.expr().deriv(1).ln().on_disk());
        let s = schwarzian(&f);
        let mut worst = 0.0f64;
        for &z in &pts {
            worst = worst.max((j.eval(z)? - s.eval(z)?).norm());
        }
        report.push(Check::condition(
            format!("compose-identity:{tag}"),
            "J applied to the derivative's logarithm equals the curvature operator (sup < 1e-9)",
            worst < 1e-9,
            Some(worst),
            Some(1e-9),
        ));
    }

    // All admissible pole shifts land in one fiber of J.
    {
        let z = Expr::var();
        let f = (&z + Expr::real(0.25) * &z * &z).on_disk();
        let image = ImageSpec::sampled(&f, 2048, 0.05)?;
        let phi0 = f.expr().deriv(1).ln().on_disk();
        let j0 = canonical_j(&phi0);
        let probe = spiral_points(60);
        let mut worst = 0.0f64;
        for k in 0..20 {
            let a = C::from_polar(2.0, std::f64::consts::TAU * (k as f64 + 0.31) / 20.0);
            let fiber = mobius_shift(&phi0, &f, &image, ShiftTarget::Finite(a))?;
            let jf = canonical_j(fiber.function());
            for &z in &probe {
                worst = worst.max((jf.eval(z)? - j0.eval(z)?).norm());
            }
        }
        report.push(Check::condition(
            "fiber-constancy",
            "twenty admissible pole shifts leave the canonical image unchanged (sup < 1e-8)",
            worst < 1e-8,
            Some(worst),
            Some(1e-8),
        ));

        // Gate behaviour: inside and near-boundary targets are refused,
        // and a ray-complement image refuses every finite target.
        let refused_inside = image.admissible(c(0.3, 0.0)).is_err();
        let refused_near = image.admissible(c(1.27, 0.0)).is_err();
        report.push(Check::condition(
            "fiber-gate-sampled",
            "sampled-boundary image refuses enclosed and margin-violating targets",
            refused_inside && refused_near,
            None,
            None,
        ));
        let ray = ImageSpec::PlaneMinusRay { cut: -0.25 };
        let phi_k = koebe_map().expr().deriv(1).ln().on_disk();
        let all_refused = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.5)].iter().all(|&a| {
            matches!(
                mobius_shift(&phi_k, &koebe_map(), &ray, ShiftTarget::Finite(a)),
                Err(Error::Fiber { .. })
            )
        });
        report.push(Check::condition(
            "fiber-gate-ray",
            "a plane-minus-ray image refuses every finite target",
            all_refused,
            None,
            None,
        ));
    }

    // Growth bound for logarithms of univalent derivatives: sup-seminorm
    // at most 3, attained by the cusp map.
    for (tag, f) in [
        ("koebe", koebe_map()),
        (
            "composed",
            Mobius::new(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0))
                .expr()
                .of(koebe_map().expr())
                .on_disk(),
        ),
    ] {
        let phi = f.expr().deriv(1).ln().on_disk();
        let bloch = seminorm(&phi, SeminormKind::Bloch, cfg)?;
        report.push(
            Check::inequality(
                format!("log-derivative-growth:{tag}"),
                "sup-seminorm of the derivative's logarithm is at most 3",
                bloch.upper_bound(),
                bloch.estimate,
                Some(1.0),
                3.0,
                crate::seminorm::SUITE_SLACK,
            )
            .with_ladder(&bloch, 4),
        );
    }

    Ok(report)
}

fn counterexamples(cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("counterexamples", cfg);
    let lacunary = gallery("lacunary_phi1:a=0.1")?;
    let logsq = gallery("logsq_phi1:a=0.1")?;

    let sharp_lac = seminorm(&lacunary, SeminormKind::BesovSharp(1.0), cfg)?;
    let decay_lac = seminorm(&lacunary, SeminormKind::Decay(1.0), cfg)?;
    let sharp_log = seminorm(&logsq, SeminormKind::BesovSharp(1.0), cfg)?;
    let decay_log = seminorm(&logsq, SeminormKind::Decay(1.0), cfg)?;

    report.push(
        Check::condition(
            "lacunary:integral-sharp-diverges",
            "the lacunary witness leaves the p=1 integral sharp class (ladder diverges)",
            sharp_lac.divergent,
            Some(sharp_lac.estimate),
            None,
        )
        .with_ladder(&sharp_lac, 4),
    );
    report.push(
        Check::condition(
            "lacunary:decay-1-settles",
            "the lacunary witness stays in the γ=1 decay class (sup ladder settles)",
            !decay_lac.divergent,
            Some(decay_lac.estimate),
            None,
        )
        .with_ladder(&decay_lac, 4),
    );
    report.push(
        Check::condition(
            "logsq:integral-sharp-settles",
            "the log-square witness stays in the p=1 integral sharp class (ladder settles)",
            !sharp_log.divergent,
            Some(sharp_log.estimate),
            None,
        )
        .with_ladder(&sharp_log, 4),
    );
    report.push(
        Check::condition(
            "logsq:decay-1-diverges",
            "the log-square witness leaves the γ=1 decay class (sup ladder diverges)",
            decay_log.divergent,
            Some(decay_log.estimate),
            None,
        )
        .with_ladder(&decay_log, 4),
    );
    Ok(report)
}

/// Ten constant box coefficients with varied position, aspect, and phase;
/// all sup norms stay below 1.
fn variational_family() -> Result<Vec<BeltramiCoefficient>> {
    let specs: [(f64, f64, f64, f64, C); 10] = [
        (0.0, 1.0, 1.0, 2.0, c(0.3, 0.0)),
        (-1.0, 1.0, 0.5, 1.5, c(0.0, 0.25)),
        (-2.0, -0.5, 1.0, 4.0, c(0.2, -0.2)),
        (0.5, 3.0, 0.125, 0.5, c(-0.4, 0.1)),
        (-0.25, 0.25, 2.0, 8.0, c(0.5, 0.3)),
        (1.0, 2.0, 1.0, 2.0, c(-0.15, -0.35)),
        (-3.0, -1.0, 0.25, 1.0, c(0.45, 0.0)),
        (0.0, 0.5, 0.5, 1.0, c(0.0, -0.5)),
        (-0.7, 2.3, 1.5, 3.0, c(0.25, 0.25)),
        (-1.5, 1.5, 0.0625, 0.25, c(0.6, -0.1)),
    ];
    specs
        .iter()
        .map(|&(x0, x1, y0, y1, v)| {
            BeltramiCoefficient::box_on_upper(v, SupportBox::new(x0, x1, y0, y1)?)
        })
        .collect()
}

fn variational_bounds(cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("variational-bounds", cfg);
    for (i, nu) in variational_family()?.iter().enumerate() {
        let id = format!("nu={i:02}");
        let nu_norm = |p: f64| -> Result<f64> {
            Ok(crate::beltrami::p_norm(nu, p, cfg)?.estimate)
        };

        for p in [3.0, 4.0] {
            let lhs = d0_pre_schwarzian_besov(nu, p, cfg)?;
            report.push(
                Check::inequality(
                    format!("first-variation-derivative-bound:{id}:p={p}"),
                    "weighted p-mean of the differentiated first variation is controlled by the coefficient's p-norm",
                    lhs.upper_bound(),
                    lhs.estimate,
                    Some(nu_norm(p)?),
                    besov_variation_constant(p),
                    1.0,
                )
                .with_ladder(&lhs, 4),
            );
        }
        for p in [1.0, 2.0, 3.0] {
            let lhs = d0_schwarzian_weighted(nu, p, cfg)?;
            report.push(
                Check::inequality(
                    format!("curvature-variation-bound:{id}:p={p}"),
                    "weighted p-mean of the curvature variation is at most 24 times the coefficient's p-norm",
                    lhs.upper_bound(),
                    lhs.estimate,
                    Some(nu_norm(p)?),
                    SCHWARZIAN_VARIATION_CONSTANT,
                    1.0,
                )
                .with_ladder(&lhs, 4),
            );
        }

        // The curvature variation is the derivative of the differentiated
        // first variation: five-point stencil agreement at a fixed target.
        let zeta = c(0.3, -1.1);
        let direct = d0_schwarzian(nu, zeta)?;
        let h = 1e-2;
        let at = |ofs: f64| d0_pre_schwarzian(nu, zeta + c(ofs, 0.0));
        let stencil = (-at(2.0 * h)? + at(h)? * c(8.0, 0.0) - at(-h)? * c(8.0, 0.0)
            + at(-2.0 * h)?)
            / c(12.0 * h, 0.0);
        let rel = (direct - stencil).norm() / direct.norm().max(f64::MIN_POSITIVE);
        report.push(Check::condition(
            format!("derivative-identity:{id}"),
            "curvature variation equals the stencil derivative of the first variation (rel < 1e-6)",
            rel < 1e-6,
            Some(rel),
            Some(1e-6),
        ));
    }
    Ok(report)
}

fn beltrami_inclusions(cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("beltrami-inclusions", cfg);

    for (gamma, p) in [
        (0.25, 4.0),
        (0.5, 2.0),
        (0.5, 3.0),
        (0.75, 1.5),
        (1.0, 1.0),
        (1.0, 2.0),
    ] {
        for mut chk in inclusion_witness(gamma, p, cfg)?.checks {
            chk.claim_id = format!("cell:{}", chk.claim_id);
            report.push(chk);
        }
    }

    // The section gate: a small-seminorm Φ yields a legal coefficient in
    // both variants; a large one is refused.
    let log_expr = (Expr::constant(c(0.0, 1.0)) * Expr::var()).ln();
    let small = (Expr::real(0.2) * &log_expr).on(Domain::LowerHalfPlane);
    for (tag, mu) in [
        ("with-modulus", aw_section(&small, cfg)?),
        ("without-modulus", aw_section_no_modulus(&small, cfg)?),
    ] {
        report.push(Check::inequality(
            format!("section-sup-bound:{tag}"),
            "section of a small-seminorm function has supremum strictly below 1",
            Some(mu.grid_sup()),
            mu.grid_sup(),
            Some(1.0),
            1.0,
            1.0,
        ));
    }
    let large = (Expr::real(0.6) * &log_expr).on(Domain::LowerHalfPlane);
    report.push(Check::condition(
        "section-gate-refuses",
        "section refuses a function whose sup-seminorm reaches 1/2",
        matches!(aw_section(&large, cfg), Err(Error::Hypothesis(_))),
        None,
        None,
    ));

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gallery_members_parse_and_land_on_their_domains() {
        for (spec, domain) in [
            ("identity", Domain::UnitDisk),
            ("monomial:m=3", Domain::UnitDisk),
            ("koebe", Domain::UnitDisk),
            ("log_witness", Domain::UnitDisk),
            ("lacunary_phi1:a=0.5,n=20", Domain::UnitDisk),
            ("logsq_phi1:a=1", Domain::UnitDisk),
            ("cayley_pullback:of=koebe", Domain::UpperHalfPlane),
            ("halfplane_pole:k=2", Domain::LowerHalfPlane),
        ] {
            assert_eq!(gallery(spec).unwrap().domain(), domain, "{spec}");
        }
        for bad in [
            "unknown",
            "monomial:k=2",
            "monomial:m=2,m=3",
            "lacunary_phi1:a=-1",
            "lacunary_phi1:n=0",
            "halfplane_pole:k=0",
            "cayley_pullback",
            "cayley_pullback:of=halfplane_pole:k=1",
        ] {
            assert!(gallery(bad).is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn lacunary_jet_has_the_right_sparse_coefficients() {
        // With amplitude 1 the k-th derivative at 0 is k!·2^{-n} when
        // k = 2^n, and 0 at non-lacunary orders.
        let f = gallery("lacunary_phi1:a=1,n=20").unwrap();
        let jet = f.jet(c(0.0, 0.0), 4).unwrap();
        assert_relative_eq!(jet.d(1).re, 1.0);
        assert_relative_eq!(jet.d(2).re, 1.0); // 2!·(1/2)
        assert_eq!(jet.d(3).norm(), 0.0);
        assert_relative_eq!(jet.d(4).re, 6.0); // 4!·(1/4)
    }

    #[test]
    fn logsq_second_derivative_closed_form() {
        // Φ₁″ = 2a(1 - L)/(1 - z) with L = log 1/(1-z).
        let a = 0.7;
        let f = gallery("logsq_phi1:a=0.7").unwrap();
        for z in spiral_points(25) {
            let l = -(c(1.0, 0.0) - z).ln();
            let expect = c(2.0 * a, 0.0) * (c(1.0, 0.0) - l) * (c(1.0, 0.0) - z).inv();
            let got = f.jet(z, 2).unwrap().d(2);
            assert!((got - expect).norm() < 1e-12 * expect.norm().max(1.0), "{z}");
        }
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let cfg = QuadratureConfig::default();
        assert!(matches!(
            run_suite("no-such-suite", &cfg),
            Err(Error::UnknownName(_))
        ));
    }

    #[test]
    fn schwarzian_suite_passes_and_is_deterministic() {
        let cfg = QuadratureConfig::with_eps_min((2f64).powi(-8));
        let report = run_suite("schwarzian-identities", &cfg).unwrap();
        assert!(report.passed(), "{}", report.to_json());
        let again = run_suite("schwarzian-identities", &cfg).unwrap();
        assert_eq!(report.to_json(), again.to_json());
        assert_eq!(report.to_csv(), again.to_csv());
        // Sorted by claim id.
        let ids: Vec<&str> = report.checks.iter().map(|c| c.claim_id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn counterexamples_suite_has_four_ladder_rows() {
        let cfg = QuadratureConfig::with_eps_min((2f64).powi(-10));
        let report = run_suite("counterexamples", &cfg).unwrap();
        assert!(report.passed(), "{}", report.to_json());
        assert_eq!(report.checks.len(), 4);
        assert!(report.checks.iter().all(|c| c.ladder_excerpt.is_some()));
    }

    #[test]
    fn variational_suite_passes() {
        let cfg = QuadratureConfig::with_eps_min((2f64).powi(-10));
        let report = run_suite("variational-bounds", &cfg).unwrap();
        assert!(report.passed(), "{}", report.to_json());
        assert_eq!(report.checks.len(), 60);
    }

    #[test]
    fn beltrami_suite_passes() {
        let cfg = QuadratureConfig::with_eps_min((2f64).powi(-10));
        let report = run_suite("beltrami-inclusions", &cfg).unwrap();
        assert!(report.passed(), "{}", report.to_json());
    }

    #[test]
    fn transport_suite_passes() {
        let cfg = QuadratureConfig::with_eps_min((2f64).powi(-10));
        let report = run_suite("cayley-transport", &cfg).unwrap();
        assert!(report.passed(), "{}", report.to_json());
    }

    #[test]
    fn norm_inequality_suite_passes_on_two_members() {
        // The full six-member battery runs in the acceptance harness; unit
        // scope keeps one polynomial and one singular member.
        let cfg = QuadratureConfig::with_eps_min((2f64).powi(-8));
        let f = gallery("monomial:m=3").unwrap();
        let r = inequality_suite(&f, "monomial:m=3", &[1.5, 2.0, 3.0], &cfg).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        let f = gallery("log_witness").unwrap();
        let r = inequality_suite(&f, "log_witness", &[1.5, 2.0, 3.0], &cfg).unwrap();
        assert!(r.passed(), "{}", r.to_json());
    }
}
