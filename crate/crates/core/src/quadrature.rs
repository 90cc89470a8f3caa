//! Adaptive quadrature over hyperbolic domains.
//!
//! Everything here reports through dyadic *shell ladders*: the domain is
//! exhausted by shells that approach the boundary at rate `2^-k`, and each
//! rung of a ladder is the integral (or running supremum) over the region up
//! to that shell.  Convergent ladders get a geometric tail extrapolation;
//! divergent ones are flagged, never extrapolated.  All summation uses a
//! fixed pairwise reduction tree, so results are bit-identical across runs
//! and across parallel scheduling.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::function::Domain;
use crate::{C, Error, Result};

/// Controls shell structure and refinement budgets.
#[derive(Clone, Debug, serde::Serialize)]
pub struct QuadratureConfig {
    /// Relative tolerance for rung convergence and cell refinement.
    pub tol_rel: f64,
    /// Strictly decreasing boundary distances in (0,1); shell `k` is the
    /// region at distance `>= shell_epsilons[k]` from the boundary.
    pub shell_epsilons: Vec<f64>,
    /// Gauss order for radial rules and the base angular resolution.
    pub angular_order: usize,
    /// Maximum bisection depth / doubling count per cell.
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            tol_rel: 1e-6,
            shell_epsilons: (3..=16).map(|k| (2f64).powi(-k)).collect(),
            angular_order: 24,
            max_subdivisions: 12,
        }
    }
}

impl QuadratureConfig {
    /// Default shells extended (or truncated) to reach `eps_min`.
    pub fn with_eps_min(eps_min: f64) -> Self {
        let mut cfg = QuadratureConfig::default();
        let mut eps = Vec::new();
        let mut e = 0.125;
        while e >= eps_min * 0.999_999 {
            eps.push(e);
            e /= 2.0;
        }
        cfg.shell_epsilons = eps;
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_rel > 0.0) {
            return Err(Error::Hypothesis("tol_rel must be positive".into()));
        }
        if self.shell_epsilons.len() < 4 {
            return Err(Error::Hypothesis("need at least 4 shells".into()));
        }
        for w in self.shell_epsilons.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::Hypothesis("shell_epsilons must be strictly decreasing".into()));
            }
        }
        let (first, last) = (self.shell_epsilons[0], *self.shell_epsilons.last().unwrap());
        if !(first < 1.0 && last > 0.0) {
            return Err(Error::Hypothesis("shell_epsilons must lie in (0,1)".into()));
        }
        Ok(())
    }

    fn base_angular(&self) -> usize {
        (4 * self.angular_order).max(64)
    }

    fn max_angular(&self) -> usize {
        self.base_angular() << self.max_subdivisions.min(16)
    }
}

/// The value of a seminorm (or any ladder-computed quantity).
///
/// `ladder` pairs each shell distance `epsilon` with the partial value over
/// the region up to that shell.  `estimate` equals the last partial plus the
/// geometric `tail` extrapolated from the final two increments when the
/// ladder converges; when `divergent` is set the estimate is just the last
/// partial and `tail` is zero.
#[derive(Clone, Debug, Serialize)]
pub struct SeminormValue {
    pub estimate: f64,
    pub ladder: Vec<(f64, f64)>,
    pub last_delta_rel: f64,
    pub divergent: bool,
    /// Extrapolated remainder beyond the last shell (already in `estimate`).
    pub tail: f64,
    /// Where a supremum was attained, for sup-type ladders.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(f64, f64)>,
}

impl SeminormValue {
    /// Assemble a ladder from per-shell partials and classify it.
    ///
    /// Divergence: the last three increments each exceed `tol_rel` times the
    /// final partial and are non-decreasing up to a 5% slack (logarithmic
    /// blow-ups produce near-constant, very slowly drifting increments).
    pub(crate) fn from_partials(eps: &[f64], partials: &[f64], tol_rel: f64) -> SeminormValue {
        assert_eq!(eps.len(), partials.len());
        assert!(partials.len() >= 4, "ladder needs at least 4 rungs");
        let n = partials.len() - 1;
        let last = partials[n];
        let d = |i: usize| partials[i] - partials[i - 1];
        let (d2, d1, d0) = (d(n - 2), d(n - 1), d(n));
        let floor = tol_rel * last.abs();
        let divergent = d2 > floor
            && d1 > floor
            && d0 > floor
            && d1 >= 0.95 * d2
            && d0 >= 0.95 * d1;
        let mut tail = 0.0;
        if !divergent && d0 > 0.0 && d1 > 0.0 {
            let rho = d0 / d1;
            if rho < 0.95 {
                tail = d0 * rho / (1.0 - rho);
            }
        }
        let estimate = last + tail;
        let last_delta_rel = d0.abs() / last.abs().max(f64::MIN_POSITIVE);
        SeminormValue {
            estimate,
            ladder: eps.iter().copied().zip(partials.iter().copied()).collect(),
            last_delta_rel,
            divergent,
            tail,
            witness: None,
        }
    }

    /// A value known in closed form: no ladder, converged by construction.
    pub(crate) fn exact(v: f64) -> SeminormValue {
        SeminormValue {
            estimate: v,
            ladder: Vec::new(),
            last_delta_rel: 0.0,
            divergent: false,
            tail: 0.0,
            witness: None,
        }
    }

    /// A usable upper bound for inequality checks: the estimate inflated by
    /// ten times the last relative increment.  `None` when the ladder is
    /// divergent or has not stabilized below half a percent.
    pub fn upper_bound(&self) -> Option<f64> {
        if self.divergent || !(self.last_delta_rel < 5e-3) {
            None
        } else {
            Some(self.estimate * (1.0 + 10.0 * self.last_delta_rel))
        }
    }

    /// Apply a monotone map (such as a p-th root) to every rung and to the
    /// estimate, keeping the divergence classification of the raw ladder.
    pub(crate) fn map_monotone(&self, f: impl Fn(f64) -> f64) -> SeminormValue {
        let ladder: Vec<(f64, f64)> = self.ladder.iter().map(|&(e, v)| (e, f(v))).collect();
        let n = ladder.len() - 1;
        let last_delta_rel = if n == 0 {
            0.0
        } else {
            (ladder[n].1 - ladder[n - 1].1).abs() / ladder[n].1.abs().max(f64::MIN_POSITIVE)
        };
        let estimate = f(self.estimate);
        SeminormValue {
            estimate,
            tail: estimate - ladder[n].1,
            ladder,
            last_delta_rel,
            divergent: self.divergent,
            witness: self.witness,
        }
    }
}

/// Sum with a fixed pairwise tree; bit-identical regardless of how the
/// summands were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

fn gauss_cache() -> &'static Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence and cached per order.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    assert!(n >= 1);
    if let Some(hit) = gauss_cache().lock().unwrap().get(&n) {
        return hit.clone();
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' via the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let entry = Arc::new((nodes, weights));
    gauss_cache().lock().unwrap().insert(n, entry.clone());
    entry
}

fn gauss_interval(f: &(impl Fn(f64) -> f64 + Sync), a: f64, b: f64, order: usize) -> f64 {
    let gl = gauss_legendre(order);
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    let terms: Vec<f64> = gl
        .0
        .iter()
        .zip(gl.1.iter())
        .map(|(&x, &w)| w * f(c + h * x))
        .collect();
    h * pairwise_sum(&terms)
}

/// Adaptive Gauss on [a, b]: bisect until whole and halves agree.
pub(crate) fn adaptive_gauss(
    f: &(impl Fn(f64) -> f64 + Sync),
    a: f64,
    b: f64,
    tol_rel: f64,
    order: usize,
    depth: usize,
) -> f64 {
    fn rec(
        f: &(impl Fn(f64) -> f64 + Sync),
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        order: usize,
        depth: usize,
    ) -> f64 {
        let m = (a + b) / 2.0;
        let left = gauss_interval(f, a, m, order);
        let right = gauss_interval(f, m, b, order);
        let halves = left + right;
        if depth == 0 || (halves - whole).abs() <= tol {
            return halves;
        }
        rec(f, a, m, left, tol / 2.0, order, depth - 1)
            + rec(f, m, b, right, tol / 2.0, order, depth - 1)
    }
    let whole = gauss_interval(f, a, b, order);
    let tol = (tol_rel * whole.abs()).max(f64::EPSILON);
    rec(f, a, b, whole, tol, order, depth)
}

/// Mean of a 2π-periodic function by trapezoid doubling.  Requires two
/// successive within-tolerance agreements before accepting, which guards
/// against aliasing on sparse-spectrum integrands.
pub(crate) fn periodic_mean(
    f: &(impl Fn(f64) -> f64 + Sync),
    tol_rel: f64,
    base: usize,
    max_m: usize,
) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let eval_points = |m: usize, offset_half: bool| -> f64 {
        // offset_half: sample the midpoints between the current m points,
        // i.e. the odd points of the 2m-point rule.
        let step = two_pi / m as f64;
        let shift = if offset_half { step / 2.0 } else { 0.0 };
        let vals: Vec<f64> = if m >= 4096 {
            (0..m).into_par_iter().map(|i| f(i as f64 * step + shift)).collect()
        } else {
            (0..m).map(|i| f(i as f64 * step + shift)).collect()
        };
        pairwise_sum(&vals)
    };
    let mut m = base;
    let mut sum = eval_points(m, false);
    let mut mean = sum / m as f64;
    let mut agreements = 0;
    while 2 * m <= max_m {
        let odd = eval_points(m, true);
        sum += odd;
        m *= 2;
        let next = sum / m as f64;
        if (next - mean).abs() <= tol_rel * next.abs().max(f64::MIN_POSITIVE) {
            agreements += 1;
        } else {
            agreements = 0;
        }
        mean = next;
        if agreements >= 2 {
            break;
        }
    }
    mean
}

/// One fixed product rule on the annulus `r0 <= |z| <= r1`: `s` uniform
/// radial Gauss panels tensored with an `m`-point angular trapezoid.
fn annulus_rule(
    g: &(impl Fn(C) -> f64 + Sync),
    r0: f64,
    r1: f64,
    s: usize,
    m: usize,
    order: usize,
) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let gl = gauss_legendre(order);
    let mut theta_vals = vec![0.0f64; m];
    let mut radial_terms = Vec::with_capacity(s * order);
    let h = (r1 - r0) / s as f64;
    for i in 0..s {
        let a = r0 + i as f64 * h;
        let (cm, hm) = (a + h / 2.0, h / 2.0);
        for (&x, &w) in gl.0.iter().zip(gl.1.iter()) {
            let r = cm + hm * x;
            if m >= 4096 {
                theta_vals
                    .par_iter_mut()
                    .enumerate()
                    .for_each(|(j, v)| *v = g(C::from_polar(r, two_pi * j as f64 / m as f64)));
            } else {
                for (j, v) in theta_vals.iter_mut().enumerate() {
                    *v = g(C::from_polar(r, two_pi * j as f64 / m as f64));
                }
            }
            let mean = pairwise_sum(&theta_vals) / m as f64;
            radial_terms.push(w * hm * r * mean * two_pi);
        }
    }
    pairwise_sum(&radial_terms)
}

/// Hard cap on integrand evaluations per refinement step of one rung; keeps
/// discontinuous integrands from consuming unbounded time.
const RUNG_EVAL_BUDGET: usize = 1 << 25;

/// Integral of `g` (with respect to area) over the annulus `r0 <= |z| <= r1`,
/// by doubling the product rule until two successive agreements (the double
/// agreement guards against aliasing on sparse-spectrum integrands).
///
/// `scale_hint` is the magnitude of the ladder so far: rungs that are tiny
/// relative to it are allowed to stop early at proportionally looser
/// absolute accuracy.
pub(crate) fn integrate_annulus(
    g: &(impl Fn(C) -> f64 + Sync),
    r0: f64,
    r1: f64,
    cfg: &QuadratureConfig,
    scale_hint: f64,
) -> f64 {
    let order = cfg.angular_order + 1;
    // Thin boundary rungs are radially resolved by two Gauss panels (the
    // integrand varies on the scale of the rung width); only a thick core
    // region also needs radial refinement.
    let thick = (r1 - r0) > 0.5;
    let mut s = if thick { 4 } else { 2 };
    let mut m = cfg.base_angular();
    let m_cap = cfg.max_angular();
    let mut cur = annulus_rule(g, r0, r1, s, m, order);
    let mut agree = 0;
    let mut grow_radial = false;
    loop {
        let (ns, nm) = if thick && (grow_radial || m * 2 > m_cap) && s < 512 {
            (s * 2, m)
        } else if m * 2 <= m_cap {
            (s, m * 2)
        } else {
            break;
        };
        grow_radial = !grow_radial;
        if ns * order * nm > RUNG_EVAL_BUDGET {
            break;
        }
        let next = annulus_rule(g, r0, r1, ns, nm, order);
        let scale = next.abs().max(1e-3 * scale_hint).max(f64::MIN_POSITIVE);
        // The epsilon floor lets integrands that are zero up to roundoff
        // (e.g. curvature of an exactly linear transported map) settle
        // immediately instead of burning the whole budget chasing noise.
        let tol_abs = f64::EPSILON * (1.0 + scale_hint);
        if (next - cur).abs() <= (cfg.tol_rel * scale).max(tol_abs) {
            agree += 1;
        } else {
            agree = 0;
        }
        s = ns;
        m = nm;
        cur = next;
        if agree >= 2 {
            break;
        }
    }
    cur
}

/// Shell radii `1 - eps_k` for the configured ladder.
fn shell_radii(cfg: &QuadratureConfig) -> Vec<f64> {
    cfg.shell_epsilons.iter().map(|&e| 1.0 - e).collect()
}

/// Integral of a pointwise nonnegative `g` over the unit disk, reported as a
/// shell ladder with divergence detection.
pub fn integrate_disk(
    g: impl Fn(C) -> f64 + Sync,
    cfg: &QuadratureConfig,
) -> SeminormValue {
    let radii = shell_radii(cfg);
    let mut partials = Vec::with_capacity(radii.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &r in &radii {
        let inc = integrate_annulus(&g, prev, r, cfg, acc);
        assert!(inc >= 0.0, "negative shell increment for a nonnegative integrand");
        acc += inc;
        partials.push(acc);
        prev = r;
    }
    SeminormValue::from_partials(&cfg.shell_epsilons, &partials, cfg.tol_rel)
}

/// The conformal equivalence sending the disk onto the given half-plane
/// (inverse Cayley), together with the area Jacobian `|dz/dζ|^2`.
pub(crate) fn disk_to_halfplane(zeta: C, upper: bool) -> (C, f64) {
    let one = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    let d = one - zeta;
    let w = i * (one + zeta) / d;
    let jac = 4.0 / d.norm_sqr().powi(2);
    (if upper { w } else { -w }, jac)
}

/// Integral of `g` over the upper or lower half-plane, by the exact change
/// of variables onto the disk.
pub fn integrate_halfplane(
    g: impl Fn(C) -> f64 + Sync,
    domain: Domain,
    cfg: &QuadratureConfig,
) -> SeminormValue {
    assert!(domain.is_halfplane(), "integrate_halfplane needs a half-plane domain");
    let upper = domain == Domain::UpperHalfPlane;
    integrate_disk(
        move |zeta| {
            let (z, jac) = disk_to_halfplane(zeta, upper);
            g(z) * jac
        },
        cfg,
    )
}

/// Supremum of a nonnegative `g` by shell-graded polar grids plus a local
/// shrinking-window polish around the best point.  Estimates are lower
/// bounds by construction (every reported value was attained at a sampled
/// point); the ladder tracks the running maximum per shell.
pub fn sup_refine(
    g: impl Fn(C) -> f64 + Sync,
    domain: Domain,
    cfg: &QuadratureConfig,
) -> SeminormValue {
    let upper = domain == Domain::UpperHalfPlane;
    let lift = |zeta: C| -> C {
        match domain {
            Domain::UnitDisk => zeta,
            Domain::UpperHalfPlane | Domain::LowerHalfPlane => disk_to_halfplane(zeta, upper).0,
            Domain::ExteriorDisk => panic!("sup_refine not defined on the exterior disk"),
        }
    };
    let h = |zeta: C| g(lift(zeta));

    let two_pi = 2.0 * std::f64::consts::PI;
    let radii = shell_radii(cfg);
    let mut best = 0.0f64;
    let mut best_at = C::new(0.0, 0.0);
    let mut partials = Vec::with_capacity(radii.len());

    for (k, &r) in radii.iter().enumerate() {
        let r_in = if k == 0 { 0.0 } else { radii[k - 1] };
        // Angular resolution matched to the shell's boundary distance.
        let m = ((1 << (k + 5)).max(1024)).min(1 << 17);
        let rungs = 4;
        for j in 0..=rungs {
            // Geometric interpolation in boundary distance between shells.
            let t = j as f64 / rungs as f64;
            let r_j = if k == 0 {
                r_in + (r - r_in) * t
            } else {
                1.0 - (1.0 - r_in).powf(1.0 - t) * (1.0 - r).powf(t)
            };
            if k > 0 && j == 0 {
                continue; // shared with the previous shell
            }
            let vals: Vec<f64> = (0..m)
                .into_par_iter()
                .map(|i| h(C::from_polar(r_j, two_pi * i as f64 / m as f64)))
                .collect();
            for (i, &v) in vals.iter().enumerate() {
                if v > best {
                    best = v;
                    best_at = C::from_polar(r_j, two_pi * i as f64 / m as f64);
                }
            }
        }
        // Local polish: shrinking-window coordinate descent in (r, θ).
        let (mut r0, mut th0) = (best_at.norm(), best_at.arg());
        let mut dr = (1.0 - r_in) * 0.25;
        let mut dth = two_pi / m as f64;
        for _ in 0..40 {
            let mut moved = false;
            for (er, eth) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
                let rr = (r0 + er * dr).clamp(0.0, r);
                let tt = th0 + eth * dth;
                let v = h(C::from_polar(rr, tt));
                if v > best {
                    best = v;
                    best_at = C::from_polar(rr, tt);
                    r0 = rr;
                    th0 = tt;
                    moved = true;
                }
            }
            if !moved {
                dr /= 2.0;
                dth /= 2.0;
            }
        }
        partials.push(best);
    }
    let mut out = SeminormValue::from_partials(&cfg.shell_epsilons, &partials, cfg.tol_rel);
    let w = lift(best_at);
    out.witness = Some((w.re, w.im));
    out
}

/// Supremum over dyadic Carleson boxes of the box mean `(1/|I|) ∫_box density`.
///
/// Two translated dyadic families are scanned at every level (offset 0 and
/// one third of the level length), which covers the full interval supremum
/// up to the standard three-lattice comparison.  On the disk, boxes are the
/// Carleson windows over dyadic arcs (arc length `2π·2^-j`, radial depth
/// `min(1, arc)`); on a half-plane they are squares over dyadic pieces of
/// the root interval `[-R, R]`, `R = 4`.
pub fn dyadic_carleson_sup(
    density: impl Fn(C) -> f64 + Sync,
    domain: Domain,
    depth: usize,
) -> f64 {
    dyadic_carleson_level_sups(density, domain, depth).into_iter().fold(0.0, f64::max)
}

/// Per-level box suprema from one lattice: entry `j` is the best mean over
/// level-`j` boxes (level 0 widest, level `depth` narrowest), so a running
/// maximum over the prefix `0..=j` is the sup restricted to boxes no smaller
/// than scale `2^-j`.
pub(crate) fn dyadic_carleson_level_sups(
    density: impl Fn(C) -> f64 + Sync,
    domain: Domain,
    depth: usize,
) -> Vec<f64> {
    match domain {
        Domain::UnitDisk => carleson_disk(&density, depth),
        Domain::UpperHalfPlane | Domain::LowerHalfPlane => {
            carleson_halfplane(&density, domain == Domain::UpperHalfPlane, depth)
        }
        Domain::ExteriorDisk => panic!("Carleson boxes are not defined on the exterior disk"),
    }
}

/// Box means over one cell grid: `rows[i]` holds prefix sums over the finest
/// angular/horizontal bins of the cell integrals in radial row `i`.
struct CellGrid {
    /// Cumulative integral over bins `0..j` for each row; length bins+1.
    row_prefix: Vec<Vec<f64>>,
    /// Row index ranges covered by each level's box depth: `row_span[j]` is
    /// the number of leading rows (deepest first) inside a level-j box.
    row_span: Vec<usize>,
    bins: usize,
    /// Whether the bin axis is periodic (disk angle) or an interval.
    periodic: bool,
}

impl CellGrid {
    /// Mean over the level-`j` box starting at finest-bin `b0`.
    fn box_sum(&self, j: usize, b0: usize, width_bins: usize) -> f64 {
        let rows = self.row_span[j];
        let mut acc = Vec::with_capacity(rows);
        for row in &self.row_prefix[..rows] {
            let hi = b0 + width_bins;
            let sum = if hi > self.bins {
                debug_assert!(self.periodic, "non-periodic box past the interval end");
                row[self.bins] - row[b0] + row[hi - self.bins]
            } else {
                row[hi] - row[b0]
            };
            acc.push(sum);
        }
        pairwise_sum(&acc)
    }
}

/// Supremum of box means at each level `j = 0..=depth` separately.
fn carleson_scan(grid: &CellGrid, depth: usize, lengths: &[f64]) -> Vec<f64> {
    let mut level_best = vec![0.0f64; depth + 1];
    for j in 0..=depth {
        let width_bins = 3 << (depth - j);
        let shift = width_bins / 3;
        let count = grid.bins / width_bins;
        for family in 0..2 {
            let offset = family * shift;
            for i in 0..count {
                let b0 = i * width_bins + offset;
                if !grid.periodic && b0 + width_bins > grid.bins {
                    continue; // the shifted family's last window leaves the interval
                }
                let mean = grid.box_sum(j, b0, width_bins) / lengths[j];
                level_best[j] = level_best[j].max(mean);
            }
        }
    }
    level_best
}

fn carleson_disk(density: &(impl Fn(C) -> f64 + Sync), depth: usize) -> Vec<f64> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let bins = 3usize << depth;
    // Radial segment boundaries: the window floors 1 - h_j for every level,
    // refined geometrically toward the boundary, truncated at 1 - 2^-16.
    let mut cuts: Vec<f64> = Vec::new();
    for j in 0..=depth {
        let h = (two_pi * (2f64).powi(-(j as i32))).min(1.0);
        cuts.push(1.0 - h);
    }
    let mut d = 1.0 - cuts.last().unwrap();
    while d > (2f64).powi(-16) {
        d /= 2.0;
        cuts.push(1.0 - d);
    }
    cuts.push(1.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let truncated = 1.0 - (2f64).powi(-16);

    // Rows ordered deepest (nearest boundary) first.
    let segs: Vec<(f64, f64)> = cuts
        .windows(2)
        .rev()
        .map(|w| (w[0], w[1].min(truncated)))
        .filter(|&(a, b)| b > a)
        .collect();
    let gl = gauss_legendre(4);
    let cells: Vec<Vec<f64>> = segs
        .par_iter()
        .map(|&(ra, rb)| {
            let (cm, hm) = ((ra + rb) / 2.0, (rb - ra) / 2.0);
            (0..bins)
                .map(|b| {
                    let t0 = two_pi * b as f64 / bins as f64;
                    let t1 = two_pi * (b + 1) as f64 / bins as f64;
                    let (tc, th) = ((t0 + t1) / 2.0, (t1 - t0) / 2.0);
                    let mut vals = Vec::with_capacity(16);
                    for (&xr, &wr) in gl.0.iter().zip(gl.1.iter()) {
                        let r = cm + hm * xr;
                        for (&xt, &wt) in gl.0.iter().zip(gl.1.iter()) {
                            let th_ = tc + th * xt;
                            vals.push(wr * wt * r * density(C::from_polar(r, th_)));
                        }
                    }
                    hm * th * pairwise_sum(&vals)
                })
                .collect()
        })
        .collect();
    let row_prefix: Vec<Vec<f64>> = cells
        .iter()
        .map(|row| {
            let mut p = Vec::with_capacity(bins + 1);
            let mut acc = 0.0;
            p.push(0.0);
            for &v in row {
                acc += v;
                p.push(acc);
            }
            p
        })
        .collect();
    // Level j boxes reach down to radius 1 - h_j: count rows within.
    let row_span: Vec<usize> = (0..=depth)
        .map(|j| {
            let floor = 1.0 - (two_pi * (2f64).powi(-(j as i32))).min(1.0);
            segs.iter().take_while(|&&(a, _)| a >= floor - 1e-12).count()
        })
        .collect();
    let grid = CellGrid { row_prefix, row_span, bins, periodic: true };
    let lengths: Vec<f64> = (0..=depth).map(|j| two_pi * (2f64).powi(-(j as i32))).collect();
    carleson_scan(&grid, depth, &lengths)
}

fn carleson_halfplane(
    density: &(impl Fn(C) -> f64 + Sync),
    upper: bool,
    depth: usize,
) -> Vec<f64> {
    carleson_halfplane_rooted(density, upper, depth, 8.0)
}

/// Half-plane Carleson lattice over a root interval `[-root/2, root/2]` of
/// chosen width; wide roots let slowly saturating measures reach their
/// large-box supremum.
pub(crate) fn carleson_halfplane_rooted(
    density: &(impl Fn(C) -> f64 + Sync),
    upper: bool,
    depth: usize,
    root: f64,
) -> Vec<f64> {
    let bins = 3usize << depth;
    let mut cuts: Vec<f64> = (0..=depth).map(|j| root * (2f64).powi(-(j as i32))).collect();
    let mut d = *cuts.last().unwrap();
    let y_min = root * (2f64).powi(-16);
    while d > y_min {
        d /= 2.0;
        cuts.push(d);
    }
    cuts.push(y_min);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let segs: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    let gl = gauss_legendre(4);
    let sign = if upper { 1.0 } else { -1.0 };
    let cells: Vec<Vec<f64>> = segs
        .par_iter()
        .map(|&(ya, yb)| {
            let (cy, hy) = ((ya + yb) / 2.0, (yb - ya) / 2.0);
            (0..bins)
                .map(|b| {
                    let x0 = -root / 2.0 + root * b as f64 / bins as f64;
                    let x1 = -root / 2.0 + root * (b + 1) as f64 / bins as f64;
                    let (cx, hx) = ((x0 + x1) / 2.0, (x1 - x0) / 2.0);
                    let mut vals = Vec::with_capacity(16);
                    for (&xy, &wy) in gl.0.iter().zip(gl.1.iter()) {
                        let y = cy + hy * xy;
                        for (&xx, &wx) in gl.0.iter().zip(gl.1.iter()) {
                            let x = cx + hx * xx;
                            vals.push(wy * wx * density(C::new(x, sign * y)));
                        }
                    }
                    hy * hx * pairwise_sum(&vals)
                })
                .collect()
        })
        .collect();
    let row_prefix: Vec<Vec<f64>> = cells
        .iter()
        .map(|row| {
            let mut p = Vec::with_capacity(bins + 1);
            let mut acc = 0.0;
            p.push(0.0);
            for &v in row {
                acc += v;
                p.push(acc);
            }
            p
        })
        .collect();
    let row_span: Vec<usize> = (0..=depth)
        .map(|j| {
            let h = root * (2f64).powi(-(j as i32));
            segs.iter().take_while(|&&(_, b)| b <= h * (1.0 + 1e-12)).count()
        })
        .collect();
    let grid = CellGrid { row_prefix, row_span, bins, periodic: false };
    let lengths: Vec<f64> = (0..=depth).map(|j| root * (2f64).powi(-(j as i32))).collect();
    carleson_scan(&grid, depth, &lengths)
}

/// `(1/r) ∫_{|ζ-1|<r, |ζ|<1} g dA`, the boundary-ball mean at the point 1,
/// in polar coordinates centered at 1 (exact region description).
pub fn boundary_ball_mean(g: impl Fn(C) -> f64 + Sync, r: f64) -> f64 {
    assert!(r > 0.0 && r < 2.0);
    let order = 32;
    let inner = |rho: f64| -> f64 {
        // |1 - ρ e^{iφ}| < 1  ⟺  ρ < 2 cos φ  ⟺  |φ| < arccos(ρ/2)
        let phi_max = (rho / 2.0).acos();
        let f = |phi: f64| g(C::new(1.0 - rho * phi.cos(), -rho * phi.sin()));
        rho * gauss_interval(&f, -phi_max, phi_max, order)
    };
    adaptive_gauss(&inner, 0.0, r, 1e-10, order, 14) / r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;
    use std::f64::consts::PI;

    #[test]
    fn gauss_is_exact_on_polynomials() {
        // ∫_0^1 r · (r²)^24 dr = 1/50, radial order = angular_order + 1 = 25.
        let f = |r: f64| r * r.powi(48);
        let v = gauss_interval(&f, 0.0, 1.0, 25);
        assert!((v - 0.02).abs() < 1e-15);
    }

    #[test]
    fn disk_area() {
        let cfg = QuadratureConfig::default();
        let v = integrate_disk(|_| 1.0, &cfg);
        assert!(!v.divergent);
        assert!((v.estimate - PI).abs() < 1e-8 * PI, "got {}", v.estimate);
        // ladder is nondecreasing (also asserted inside)
        for w in v.ladder.windows(2) {
            assert!(w[1].1 >= w[0].1);
        }
    }

    #[test]
    fn besov2_identity_integrand() {
        // ((1-|z|²)/2)² · 1 · (2/(1-|z|²))² ≡ 1 → π.
        let cfg = QuadratureConfig::default();
        let g = |z: C| {
            let w = (1.0 - z.norm_sqr()) / 2.0;
            (w * 1.0).powi(2) * (1.0 / w).powi(2)
        };
        let v = integrate_disk(g, &cfg);
        assert!((v.estimate - PI).abs() < 1e-8 * PI);
    }

    #[test]
    fn besov1_identity_diverges_logarithmically() {
        // 2/(1-|z|²): each dyadic shell adds ≈ 2π·ln2.
        let cfg = QuadratureConfig::default();
        let v = integrate_disk(|z: C| 2.0 / (1.0 - z.norm_sqr()), &cfg);
        assert!(v.divergent);
        let n = v.ladder.len();
        let inc = v.ladder[n - 1].1 - v.ladder[n - 2].1;
        assert!((inc - 2.0 * PI * (2f64).ln()).abs() < 0.01 * inc);
    }

    #[test]
    fn halfplane_unit_square() {
        let cfg = QuadratureConfig::default();
        let inside =
            |z: C| (0.0..=1.0).contains(&z.re) && (1.0..=2.0).contains(&z.im);
        let v = integrate_halfplane(
            move |z| if inside(z) { 1.0 } else { 0.0 },
            Domain::UpperHalfPlane,
            &cfg,
        );
        assert!(!v.divergent);
        assert!((v.estimate - 1.0).abs() < 2e-3, "got {}", v.estimate);
    }

    #[test]
    fn halfplane_weighted_squares() {
        let cfg = QuadratureConfig::default();
        let inside =
            |z: C| (0.0..=1.0).contains(&z.re) && (1.0..=2.0).contains(&z.im);
        // ∫∫ y^-1 over [0,1]×[1,2] = ln 2 exactly.
        let v1 = integrate_halfplane(
            move |z| if inside(z) { 1.0 / z.im } else { 0.0 },
            Domain::UpperHalfPlane,
            &cfg,
        );
        assert!((v1.estimate - (2f64).ln()).abs() < 2e-3, "got {}", v1.estimate);
        // ∫∫ y^-2 over the same square = 1/2 exactly.
        let v2 = integrate_halfplane(
            move |z| if inside(z) { 1.0 / (z.im * z.im) } else { 0.0 },
            Domain::UpperHalfPlane,
            &cfg,
        );
        assert!((v2.estimate - 0.5).abs() < 2e-3, "got {}", v2.estimate);
    }

    #[test]
    fn halfplane_quartic_decay() {
        // ∫_{H+} |z+i|^-4 = π/4 exactly.
        let cfg = QuadratureConfig::default();
        let v = integrate_halfplane(
            |z: C| (z + c(0.0, 1.0)).norm_sqr().powi(-2),
            Domain::UpperHalfPlane,
            &cfg,
        );
        assert!(!v.divergent);
        assert!((v.estimate - PI / 4.0).abs() < 1e-6 * (PI / 4.0), "got {}", v.estimate);
    }

    #[test]
    fn sup_of_log_witness_weight() {
        // (1-|z|²)/2 · |1/(1-z)| has supremum 1 (approached along (0,1)).
        let cfg = QuadratureConfig::default();
        let g = |z: C| (1.0 - z.norm_sqr()) / 2.0 / (c(1.0, 0.0) - z).norm();
        let v = sup_refine(g, Domain::UnitDisk, &cfg);
        assert!(!v.divergent);
        assert!((v.estimate - 1.0).abs() < 1e-4, "got {}", v.estimate);
    }

    #[test]
    fn sup_of_zero_is_zero() {
        let cfg = QuadratureConfig::default();
        let v = sup_refine(|_| 0.0, Domain::UnitDisk, &cfg);
        assert_eq!(v.estimate, 0.0);
        assert!(!v.divergent);
    }

    #[test]
    fn carleson_zero_density() {
        assert_eq!(dyadic_carleson_sup(|_| 0.0, Domain::UnitDisk, 6), 0.0);
    }

    #[test]
    fn carleson_depth_stability_identity() {
        let density = |z: C| (1.0 - z.norm_sqr()) / 2.0;
        let d8 = dyadic_carleson_sup(density, Domain::UnitDisk, 8);
        let d12 = dyadic_carleson_sup(density, Domain::UnitDisk, 12);
        assert!((d8 - d12).abs() <= 0.05 * d12, "d8={d8} d12={d12}");
    }

    #[test]
    fn boundary_ball_means_stay_below_pi() {
        // (1/r) ∫_{Δ(1,r)∩𝔻} dA/|1-ζ| = 2 arccos(r/2) + (2/r)(2 - √(4-r²)).
        for j in 1..=8 {
            let r = (2f64).powi(-j);
            let v = boundary_ball_mean(|z: C| 1.0 / (c(1.0, 0.0) - z).norm(), r);
            let exact = 2.0 * (r / 2.0).acos() + (2.0 / r) * (2.0 - (4.0 - r * r).sqrt());
            assert!((v - exact).abs() < 1e-8, "r={r} v={v} exact={exact}");
            assert!(v <= PI);
        }
    }

    #[test]
    fn pairwise_sum_matches_naive_on_smooth_data() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * i) % 97) as f64 / 97.0).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        let mut bad = QuadratureConfig::default();
        bad.shell_epsilons = vec![0.5, 0.5, 0.25, 0.1];
        assert!(bad.validate().is_err());
        let eps = QuadratureConfig::with_eps_min((2f64).powi(-20));
        assert!(eps.validate().is_ok());
        assert_eq!(eps.shell_epsilons.len(), 18);
    }
}
