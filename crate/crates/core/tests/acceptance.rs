//! End-to-end acceptance gate.
//!
//! Eleven numbered criteria, one test each.  Every test prints a single
//! `criterion N: pass — ...` line on success (visible with
//! `cargo test --test acceptance -- --nocapture`), so a full run reads as a
//! checklist.  Tolerances are the ones the library promises; nothing here
//! reaches into private internals.

use holonorm::beltrami::{aw_section, p_norm, BeltramiCoefficient, SupportBox};
use holonorm::cayley::{
    cayley, green_energy, halfplane_curvature_carleson_constant, pushforward_to_disk,
    CayleyDirection, Mobius,
};
use holonorm::function::{AnalyticMap, Domain, Expr};
use holonorm::quadrature::{boundary_ball_mean, pairwise_sum, QuadratureConfig, SeminormValue};
use holonorm::report::Verdict;
use holonorm::schwarzian::{
    canonical_j, d0_pre_schwarzian, d0_schwarzian, mobius_shift, schwarzian, ImageSpec,
    ShiftTarget,
};
use holonorm::seminorm::{seminorm, SeminormKind};
use holonorm::suites::{gallery, run_suite, SUITE_IDS};
use holonorm::{c, Error, C};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shells_down_to(exponent: i32) -> QuadratureConfig {
    QuadratureConfig::with_eps_min((2f64).powi(exponent))
}

/// Interior grid on a slowly winding golden-angle spiral; generic enough to
/// dodge logarithm cuts and symmetry axes.
fn spiral(n: usize) -> Vec<C> {
    (0..n)
        .map(|j| {
            let r = 0.05 + 0.88 * (j as f64 + 0.5) / n as f64;
            C::from_polar(r, 2.399_963 * (j as f64 + 1.0))
        })
        .collect()
}

fn one() -> C {
    c(1.0, 0.0)
}

// --------------------------------------------------------------------------
// 1. Fractional-linear maps are exactly the kernel of the curvature operator.
// --------------------------------------------------------------------------

#[test]
fn criterion_01_fractional_linear_maps_have_vanishing_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let pts = spiral(200);
    let mut accepted = 0usize;
    let mut worst = 0.0f64;
    while accepted < 50 {
        let mut draw = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (a, b, cc, d) = (draw(), draw(), draw(), draw());
        if (a * d - b * cc).norm() < 1e-2 {
            continue; // too close to a constant map
        }
        // The pole -d/c must stay off the closed disk.
        if cc.norm() > 1e-3 && (d / cc).norm() < 1.3 {
            continue;
        }
        let s = schwarzian(&Mobius::new(a, b, cc, d).expr().on_disk());
        for &z in &pts {
            worst = worst.max(s.eval(z).unwrap().norm());
        }
        accepted += 1;
    }
    assert!(worst < 1e-10, "largest |S| over the family: {worst:.3e}");
    println!(
        "criterion 1: pass — 50 random fractional-linear maps, grid sup |S| = {worst:.2e} < 1e-10"
    );
}

// --------------------------------------------------------------------------
// 2. The curvature of log F′ recovers the Schwarzian of F.
// --------------------------------------------------------------------------

#[test]
fn criterion_02_log_derivative_composition_recovers_the_schwarzian() {
    let pts = spiral(200);
    let koebe = gallery("koebe").unwrap();
    let mut variants: Vec<(String, AnalyticMap)> = vec![("koebe".into(), koebe.clone())];
    // Post-compose with fractional-linear maps whose poles sit on the ray
    // the koebe image omits, so the compositions stay analytic on the disk.
    for (j, pole) in [-0.25, -0.5, -1.0, -2.5, -10.0].into_iter().enumerate() {
        let b = 0.3 * j as f64;
        let m = Expr::mobius(one(), c(b, 0.0), one(), c(-pole, 0.0));
        variants.push((
            format!("post-composition with pole at {pole}"),
            m.of(koebe.expr()).on_disk(),
        ));
    }
    let mut worst = 0.0f64;
    for (name, f) in &variants {
        let log_deriv = f.expr().deriv(1).ln().on_disk();
        let j_op = canonical_j(&log_deriv);
        let s_op = schwarzian(f);
        for &z in &pts {
            let gap = (j_op.eval(z).unwrap() - s_op.eval(z).unwrap()).norm();
            assert!(gap < 1e-9, "{name} at {z}: gap {gap:.3e}");
            worst = worst.max(gap);
        }
    }
    println!(
        "criterion 2: pass — J(log F′) = S(F) for the slit map and 5 post-compositions, \
         sup gap {worst:.2e} < 1e-9"
    );
}

// --------------------------------------------------------------------------
// 3. Closed form for the extremal slit map.
// --------------------------------------------------------------------------

#[test]
fn criterion_03_slit_map_schwarzian_matches_its_closed_form() {
    let s = schwarzian(&gallery("koebe").unwrap());
    let mut worst = 0.0f64;
    for z in spiral(100) {
        let d = one() - z * z;
        let expect = c(-6.0, 0.0) / (d * d);
        worst = worst.max((s.eval(z).unwrap() - expect).norm());
    }
    assert!(worst < 1e-10, "sup gap {worst:.3e}");
    println!(
        "criterion 3: pass — S(koebe) = -6/(1-z²)² on 100 interior points, sup gap {worst:.2e}"
    );
}

// --------------------------------------------------------------------------
// 4. Shift fibers project to a single curvature.
// --------------------------------------------------------------------------

#[test]
fn criterion_04_shift_fibers_share_one_curvature() {
    let f = (Expr::var() + Expr::real(0.25) * Expr::var() * Expr::var()).on_disk();
    let phi0 = (Expr::real(1.0) + Expr::real(0.5) * Expr::var()).ln().on_disk();
    let image = ImageSpec::sampled(&f, 2048, 0.05).unwrap();
    let base = canonical_j(&phi0);
    let pts = spiral(60);
    let base_vals: Vec<C> = pts.iter().map(|&z| base.eval(z).unwrap()).collect();
    let mut worst = 0.0f64;
    for k in 0..20 {
        let a = C::from_polar(2.0, std::f64::consts::TAU * (k as f64 + 0.31) / 20.0);
        let shifted = mobius_shift(&phi0, &f, &image, ShiftTarget::Finite(a)).unwrap();
        let j_op = canonical_j(shifted.function());
        for (i, &z) in pts.iter().enumerate() {
            worst = worst.max((j_op.eval(z).unwrap() - base_vals[i]).norm());
        }
    }
    assert!(worst < 1e-8, "sup gap over the fiber: {worst:.3e}");
    println!(
        "criterion 4: pass — J is constant along 20 admissible shift fibers, \
         sup gap {worst:.2e} < 1e-8"
    );
}

// --------------------------------------------------------------------------
// 5. The inequality battery holds on the whole gallery.
// --------------------------------------------------------------------------

#[test]
fn criterion_05_inequality_battery_holds_on_the_gallery() {
    let cfg = shells_down_to(-10);
    let report = run_suite("norm-inequalities", &cfg).unwrap();
    let fails: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| c.verdict == Verdict::Fail)
        .map(|c| c.claim_id.as_str())
        .collect();
    assert!(fails.is_empty(), "failed rows: {fails:?}");
    assert!(report.passed());
    let pass = report.checks.iter().filter(|c| c.verdict == Verdict::Pass).count();
    let skip = report.checks.len() - pass;
    // Members whose every seminorm converges must clear every row outright.
    for member in ["identity", "monomial:m=3"] {
        let unskipped = report
            .checks
            .iter()
            .filter(|c| c.claim_id.contains(member))
            .all(|c| c.verdict == Verdict::Pass);
        assert!(unskipped, "{member} has non-pass rows");
    }
    assert!(pass >= 60, "only {pass} rows passed");
    println!(
        "criterion 5: pass — inequality battery over 6 members: {pass} rows pass, \
         {skip} recorded as divergent, 0 fail"
    );
}

// --------------------------------------------------------------------------
// 6. Two witnesses separate the sharp-integral and decay-sup classes.
// --------------------------------------------------------------------------

/// Ladder increments (normalized by the witness amplitude) into shells at or
/// below `eps_cut`.
fn deep_increments(v: &SeminormValue, amplitude: f64, eps_cut: f64) -> Vec<f64> {
    v.ladder
        .windows(2)
        .filter(|w| w[1].0 <= eps_cut * 1.000_001)
        .map(|w| (w[1].1 - w[0].1) / amplitude)
        .collect()
}

#[test]
fn criterion_06_sharp_and_decay_ladders_separate_two_witnesses() {
    let cfg = shells_down_to(-14);
    let amp = 0.1;
    let lac = gallery("lacunary_phi1:a=0.1").unwrap();
    let log = gallery("logsq_phi1:a=0.1").unwrap();

    let lac_sharp = seminorm(&lac, SeminormKind::BesovSharp(1.0), &cfg).unwrap();
    let lac_decay = seminorm(&lac, SeminormKind::Decay(1.0), &cfg).unwrap();
    let log_sharp = seminorm(&log, SeminormKind::BesovSharp(1.0), &cfg).unwrap();
    let log_decay = seminorm(&log, SeminormKind::Decay(1.0), &cfg).unwrap();

    // Divergent sides must gain at least (ln 2)/2 per shell (per unit
    // amplitude) on every rung past 2^-8.
    let floor = 0.5 * std::f64::consts::LN_2;
    let cut = (2f64).powi(-9);

    assert!(lac_sharp.divergent, "lacunary sharp ladder should diverge");
    let incs = deep_increments(&lac_sharp, amp, cut);
    assert_eq!(incs.len(), 6);
    for (i, inc) in incs.iter().enumerate() {
        assert!(*inc >= floor, "lacunary sharp rung {i}: increment {inc:.4} < {floor:.4}");
    }

    assert!(log_decay.divergent, "log-square decay ladder should diverge");
    let incs = deep_increments(&log_decay, amp, cut);
    assert_eq!(incs.len(), 6);
    for (i, inc) in incs.iter().enumerate() {
        assert!(*inc >= floor, "log-square decay rung {i}: increment {inc:.4} < {floor:.4}");
    }

    // Finite sides must have stabilized: final step below 0.5% by the last
    // shell.
    assert!(!lac_decay.divergent && lac_decay.last_delta_rel < 5e-3,
        "lacunary decay ladder: divergent={} last_delta_rel={:.3e}",
        lac_decay.divergent, lac_decay.last_delta_rel);
    assert!(!log_sharp.divergent && log_sharp.last_delta_rel < 5e-3,
        "log-square sharp ladder: divergent={} last_delta_rel={:.3e}",
        log_sharp.divergent, log_sharp.last_delta_rel);

    println!(
        "criterion 6: pass — lacunary witness: sharp diverges / decay-sup = {:.6}; \
         log-square witness: sharp = {:.6} / decay-sup diverges (shells to 2^-14)",
        lac_decay.estimate, log_sharp.estimate
    );
}

// --------------------------------------------------------------------------
// 7. The p = 1 integral seminorm degenerates: infinite off constants.
// --------------------------------------------------------------------------

#[test]
fn criterion_07_p1_integral_seminorm_degenerates() {
    let cfg = shells_down_to(-8);
    let nonconstant = [
        "identity",
        "monomial:m=2",
        "koebe",
        "log_witness",
        "lacunary_phi1:a=0.1",
        "logsq_phi1:a=0.1",
        "halfplane_pole:k=1",
        "cayley_pullback:of=koebe",
    ];
    for spec in nonconstant {
        let v = seminorm(&gallery(spec).unwrap(), SeminormKind::Besov(1.0), &cfg).unwrap();
        assert!(
            v.divergent,
            "{spec}: p=1 ladder should diverge, got estimate {} (last_delta_rel {:.3e})",
            v.estimate, v.last_delta_rel
        );
    }
    let constant = seminorm(&gallery("monomial:m=0").unwrap(), SeminormKind::Besov(1.0), &cfg)
        .unwrap();
    assert!(!constant.divergent);
    assert_eq!(constant.estimate, 0.0);
    assert!(constant.ladder.iter().all(|&(_, v)| v == 0.0));
    println!(
        "criterion 7: pass — p=1 ladder diverges for all 8 nonconstant members and is \
         exactly 0 for a constant"
    );
}

// --------------------------------------------------------------------------
// 8. Transport invariance and the curvature Carleson density bound.
// --------------------------------------------------------------------------

#[test]
fn criterion_08_transport_invariance_and_density_bound() {
    let cfg = shells_down_to(-10);
    let mut worst_rel = 0.0f64;

    // (i) The quadratic first-derivative mean is an exact conformal
    // invariant.
    for k in 1..=3u64 {
        let f = gallery(&format!("halfplane_pole:k={k}")).unwrap();
        let d = pushforward_to_disk(&f).unwrap();
        let vh = seminorm(&f, SeminormKind::Besov(2.0), &cfg).unwrap();
        let vd = seminorm(&d, SeminormKind::Besov(2.0), &cfg).unwrap();
        let rel = (vh.estimate - vd.estimate).abs() / vh.estimate;
        assert!(rel < 1e-4, "k={k}: {} vs {} (rel {rel:.2e})", vh.estimate, vd.estimate);
        worst_rel = worst_rel.max(rel);
    }

    // (ii) The Green-potential energy is invariant point by point.
    for (k, w) in [(1u64, c(-0.5, -1.5)), (2, c(0.75, -0.8))] {
        let f = gallery(&format!("halfplane_pole:k={k}")).unwrap();
        let e_h = green_energy(&f, w, &cfg).unwrap();
        let d = pushforward_to_disk(&f).unwrap();
        let wd = cayley(w, CayleyDirection::LowerToDisk).unwrap();
        let e_d = green_energy(&d, wd, &cfg).unwrap();
        let rel = (e_h - e_d).abs() / e_h.abs().max(e_d.abs());
        assert!(rel < 1e-4, "k={k}: energy {e_h} vs {e_d} (rel {rel:.2e})");
        worst_rel = worst_rel.max(rel);
    }

    // (iii) p = 1 is only one-sidedly comparable, with the computed
    // curvature Carleson constant.
    let f = gallery("halfplane_pole:k=1").unwrap();
    let d = pushforward_to_disk(&f).unwrap();
    let sh = seminorm(&f, SeminormKind::BesovSharp(1.0), &cfg).unwrap();
    let sd = seminorm(&d, SeminormKind::BesovSharp(1.0), &cfg).unwrap();
    assert!(!sh.divergent && !sd.divergent);
    let cap = (1.0 + halfplane_curvature_carleson_constant()) * sh.estimate;
    assert!(
        sd.estimate <= 1.05 * cap,
        "disk side {} exceeds (1+c)·half-plane side {cap}",
        sd.estimate
    );

    // (iv) The boundary-ball means of the curvature Carleson density stay
    // below π and match the closed form
    // 2·arccos(r/2) + (2/r)(2 − √(4 − r²)).
    let mut worst_density_rel = 0.0f64;
    for j in 1..=8 {
        let r = (2f64).powi(-j);
        let mean = boundary_ball_mean(|z: C| (one() - z).norm().recip(), r);
        let closed = 2.0 * (r / 2.0).acos() + (2.0 / r) * (2.0 - (4.0 - r * r).sqrt());
        let rel = (mean - closed).abs() / closed;
        assert!(rel <= 1e-9, "r=2^-{j}: mean {mean} vs closed form {closed} (rel {rel:.2e})");
        assert!(mean <= std::f64::consts::PI, "r=2^-{j}: mean {mean} exceeds π");
        worst_density_rel = worst_density_rel.max(rel);
    }

    println!(
        "criterion 8: pass — quadratic mean and Green energy invariant to {worst_rel:.2e}; \
         p=1 one-sided bound holds; 8 boundary-ball density means ≤ π \
         (closed form to {worst_density_rel:.2e})"
    );
}

// --------------------------------------------------------------------------
// 9. Variational kernels against dense-grid oracles, and the norm bounds.
// --------------------------------------------------------------------------

/// Midpoint Riemann sum of ∫_box (w−ζ)^{-pow} dA over an n×n panel grid.
fn midpoint_box_integral(b: &SupportBox, zeta: C, pow: i32, n: usize) -> C {
    let hx = b.width() / n as f64;
    let hy = b.height() / n as f64;
    let mut re_rows = Vec::with_capacity(n);
    let mut im_rows = Vec::with_capacity(n);
    for iy in 0..n {
        let y = b.y0 + (iy as f64 + 0.5) * hy;
        let mut re_row = Vec::with_capacity(n);
        let mut im_row = Vec::with_capacity(n);
        for ix in 0..n {
            let x = b.x0 + (ix as f64 + 0.5) * hx;
            let v = (c(x, y) - zeta).powi(-pow);
            re_row.push(v.re);
            im_row.push(v.im);
        }
        re_rows.push(pairwise_sum(&re_row));
        im_rows.push(pairwise_sum(&im_row));
    }
    c(pairwise_sum(&re_rows), pairwise_sum(&im_rows)) * (hx * hy)
}

/// Richardson-extrapolated midpoint oracle for the two variational kernels.
fn kernel_oracle(b: &SupportBox, value: C, zeta: C, pow: i32) -> C {
    let coarse = midpoint_box_integral(b, zeta, pow, 600);
    let fine = midpoint_box_integral(b, zeta, pow, 1200);
    let integral = fine + (fine - coarse) / 3.0;
    let front = match pow {
        3 => -2.0 / std::f64::consts::PI,
        4 => -6.0 / std::f64::consts::PI,
        _ => unreachable!(),
    };
    c(front, 0.0) * value * integral
}

#[test]
fn criterion_09_variational_kernels_and_norm_bounds() {
    let cases = [
        (SupportBox::new(-1.0, 1.5, 0.4, 2.2).unwrap(), c(0.35, -0.2), c(0.2, -0.9)),
        (SupportBox::new(0.5, 2.0, 1.0, 3.0).unwrap(), c(-0.4, 0.15), c(-1.1, -0.35)),
    ];
    let mut worst = 0.0f64;
    for (b, v, zeta) in &cases {
        let mu = BeltramiCoefficient::box_on_upper(*v, *b).unwrap();
        let cubic = d0_pre_schwarzian(&mu, *zeta).unwrap();
        let quartic = d0_schwarzian(&mu, *zeta).unwrap();
        let cubic_oracle = kernel_oracle(b, *v, *zeta, 3);
        let quartic_oracle = kernel_oracle(b, *v, *zeta, 4);
        let rel_c = (cubic - cubic_oracle).norm() / cubic_oracle.norm();
        let rel_q = (quartic - quartic_oracle).norm() / quartic_oracle.norm();
        assert!(rel_c < 1e-7, "cubic kernel vs oracle: rel {rel_c:.2e}");
        assert!(rel_q < 1e-7, "quartic kernel vs oracle: rel {rel_q:.2e}");
        worst = worst.max(rel_c).max(rel_q);

        // The quartic kernel is the ζ-derivative of the cubic one: check
        // with a five-point stencil.
        let h = 1e-2;
        let pre = |dz: f64| d0_pre_schwarzian(&mu, *zeta + c(dz, 0.0)).unwrap();
        let stencil = (-pre(2.0 * h) + pre(h) * 8.0 - pre(-h) * 8.0 + pre(-2.0 * h))
            / c(12.0 * h, 0.0);
        let rel_d = (quartic - stencil).norm() / quartic.norm();
        assert!(rel_d < 1e-6, "derivative stencil: rel {rel_d:.2e}");
        worst = worst.max(rel_d);
    }

    let report = run_suite("variational-bounds", &shells_down_to(-10)).unwrap();
    assert!(report.passed(), "{}", report.to_json());
    assert_eq!(report.checks.len(), 60);
    println!(
        "criterion 9: pass — kernels match dense-grid oracles and the derivative stencil \
         (worst rel {worst:.2e}); all 60 norm-bound rows hold"
    );
}

// --------------------------------------------------------------------------
// 10. The p-integrability threshold and the section hypothesis gate.
// --------------------------------------------------------------------------

#[test]
fn criterion_10_integrability_threshold_and_section_gate() {
    let cfg = shells_down_to(-10);
    for gamma in [0.25, 0.5, 0.75, 1.0] {
        for p in [1.0, 1.5, 2.0, 3.0, 4.0] {
            let mu = BeltramiCoefficient::power_gamma(gamma).unwrap();
            let v = p_norm(&mu, p, &cfg).unwrap();
            let expect_divergent = gamma * p <= 1.0;
            assert_eq!(
                v.divergent, expect_divergent,
                "gamma={gamma} p={p}: estimate {} (last_delta_rel {:.3e})",
                v.estimate, v.last_delta_rel
            );
        }
    }

    let gentle = (Expr::real(0.2) * (Expr::constant(c(0.0, 1.0)) * Expr::var()).ln())
        .on(Domain::LowerHalfPlane);
    let mu = aw_section(&gentle, &cfg).unwrap();
    let sup = mu.grid_sup();
    assert!(sup < 1.0, "section coefficient sup {sup} must stay below 1");
    assert!((sup - 0.4).abs() <= 2e-3, "section sup {sup} should be twice the slope bound 0.2");

    let steep = (Expr::real(0.6) * (Expr::constant(c(0.0, 1.0)) * Expr::var()).ln())
        .on(Domain::LowerHalfPlane);
    assert!(
        matches!(aw_section(&steep, &cfg), Err(Error::Hypothesis(_))),
        "a slope bound of 0.6 must be rejected"
    );
    println!(
        "criterion 10: pass — 20 integrability cells match the exponent product rule; \
         section accepts slope 0.2 (|μ| sup {sup:.4}) and rejects slope 0.6"
    );
}

// --------------------------------------------------------------------------
// 11. Reports are byte-identical across runs and parallel schedules.
// --------------------------------------------------------------------------

#[test]
fn criterion_11_reports_are_byte_identical_across_schedules() {
    let cfg = shells_down_to(-8);
    let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pool3 = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    for id in SUITE_IDS {
        let a = pool1.install(|| run_suite(id, &cfg)).unwrap();
        let b = pool3.install(|| run_suite(id, &cfg)).unwrap();
        assert_eq!(a.to_json(), b.to_json(), "{id}: json differs between schedules");
        assert_eq!(a.to_csv(), b.to_csv(), "{id}: csv differs between schedules");
    }
    println!(
        "criterion 11: pass — all 6 suite reports byte-identical across two runs on \
         1- and 3-thread pools"
    );
}
