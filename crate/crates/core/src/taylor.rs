//! Fixed-point Taylor expansions of adjustable order.
//!
//! A [`Taylor`] value holds the leading coefficients of an analytic function
//! at one point: `c[j] = f^(j)(z0)/j!`.  All arithmetic below is exact on
//! these truncated expansions (a quotient ring of polynomials), so jets of
//! any order come out of closed-form expression trees without finite
//! differencing.  Operator nodes that need extra derivatives of a
//! subexpression simply request a deeper expansion of it.

use num_complex::Complex64 as C;

#[derive(Clone, Debug)]
pub(crate) struct Taylor {
    /// `c[j]` is the j-th Taylor coefficient (derivative over factorial).
    c: Vec<C>,
}

/// Arithmetic failures that map onto crate-level evaluation errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum TaylorError {
    /// Division by an expansion whose value is exactly zero.
    DivisionByZero,
    /// `ln` of zero or of a point on the cut `(-inf, 0]`.
    LogBranch,
}

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

impl Taylor {
    pub fn constant(v: C, ord: usize) -> Self {
        let mut c = vec![ZERO; ord + 1];
        c[0] = v;
        Taylor { c }
    }

    /// The coordinate function `z` expanded at `z0`.
    pub fn var(z0: C, ord: usize) -> Self {
        let mut c = vec![ZERO; ord + 1];
        c[0] = z0;
        if ord >= 1 {
            c[1] = ONE;
        }
        Taylor { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> C {
        self.c[0]
    }

    /// The raw j-th coefficient (derivative over factorial).
    #[cfg(test)]
    pub fn coeff(&self, j: usize) -> C {
        self.c[j]
    }

    /// `f^(k)` at the expansion point; requires `k <= order`.
    pub fn derivative(&self, k: usize) -> C {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }

    pub(crate) fn from_coeffs(c: Vec<C>) -> Self {
        debug_assert!(!c.is_empty());
        Taylor { c }
    }

    pub fn add(&self, o: &Taylor) -> Taylor {
        let n = self.order().min(o.order());
        Taylor::from_coeffs((0..=n).map(|j| self.c[j] + o.c[j]).collect())
    }

    pub fn sub(&self, o: &Taylor) -> Taylor {
        let n = self.order().min(o.order());
        Taylor::from_coeffs((0..=n).map(|j| self.c[j] - o.c[j]).collect())
    }

    pub fn scale(&self, s: C) -> Taylor {
        Taylor::from_coeffs(self.c.iter().map(|&a| a * s).collect())
    }

    pub fn mul(&self, o: &Taylor) -> Taylor {
        let n = self.order().min(o.order());
        let mut c = vec![ZERO; n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Taylor::from_coeffs(c)
    }

    pub fn recip(&self) -> Result<Taylor, TaylorError> {
        let v = self.value();
        if v == ZERO {
            return Err(TaylorError::DivisionByZero);
        }
        let n = self.order();
        let inv = ONE / v;
        let mut c = vec![ZERO; n + 1];
        c[0] = inv;
        for m in 1..=n {
            let mut acc = ZERO;
            for i in 1..=m {
                acc += self.c[i] * c[m - i];
            }
            c[m] = -inv * acc;
        }
        Ok(Taylor::from_coeffs(c))
    }

    pub fn div(&self, o: &Taylor) -> Result<Taylor, TaylorError> {
        Ok(self.mul(&o.recip()?))
    }

    /// Principal-branch logarithm.  Errors exactly on the cut `(-inf, 0]`
    /// (including the branch point 0); points off the real axis never error.
    pub fn ln(&self) -> Result<Taylor, TaylorError> {
        let v = self.value();
        if v.im == 0.0 && v.re <= 0.0 {
            return Err(TaylorError::LogBranch);
        }
        let n = self.order();
        // ln(f) = ln(f0) + ln(1 + u), u = f/f0 - 1 nilpotent to order n+1.
        let mut u = self.scale(ONE / v);
        u.c[0] = ZERO;
        let mut out = Taylor::constant(v.ln(), n);
        let mut upow = u.clone();
        for m in 1..=n {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            out = out.add(&upow.scale(C::new(sign / m as f64, 0.0)));
            if m < n {
                upow = upow.mul(&u);
            }
        }
        Ok(out)
    }

    /// Integer power by binary exponentiation (negative via reciprocal).
    pub fn powi(&self, k: i64) -> Result<Taylor, TaylorError> {
        if k >= 0 {
            Ok(self.powu(k as u64))
        } else {
            self.recip().map(|r| r.powu(k.unsigned_abs()))
        }
    }

    pub fn powu(&self, mut k: u64) -> Taylor {
        let mut acc = Taylor::constant(ONE, self.order());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Composition `outer(inner)`; `outer` must be expanded at `inner.value()`.
    pub fn compose(outer: &Taylor, inner: &Taylor) -> Taylor {
        let n = outer.order().min(inner.order());
        let mut g = inner.clone();
        g.c.truncate(n + 1);
        g.c[0] = ZERO;
        let mut acc = Taylor::constant(outer.c[n], n);
        for i in (0..n).rev() {
            acc = acc.mul(&g);
            acc.c[0] += outer.c[i];
        }
        acc
    }

    /// Expansion of the k-th derivative; drops `k` orders of accuracy.
    pub fn derivative_series(&self, k: usize) -> Taylor {
        assert!(self.order() >= k, "expansion too shallow for derivative");
        let n = self.order() - k;
        let mut c = vec![ZERO; n + 1];
        for (j, cj) in c.iter_mut().enumerate() {
            // (j+k)! / j! as an exact small-integer product
            let mut fall = 1.0;
            for i in 1..=k {
                fall *= (j + i) as f64;
            }
            *cj = self.c[j + k] * fall;
        }
        Taylor::from_coeffs(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn product_rule_via_mul() {
        // f = z^2, g = z^3 at z0 = 2: (fg)'' = 30 z^4 / ... check against z^5
        let z0 = c(2.0, 0.0);
        let f = Taylor::var(z0, 4).mul(&Taylor::var(z0, 4));
        let g = Taylor::var(z0, 4).powu(3);
        let fg = f.mul(&g);
        let direct = Taylor::var(z0, 4).powu(5);
        for j in 0..=4 {
            let d = (fg.coeff(j) - direct.coeff(j)).norm();
            assert!(d < 1e-12 * direct.coeff(j).norm().max(1.0), "j={j} d={d}");
        }
    }

    #[test]
    fn recip_matches_geometric_series() {
        // 1/(1-z) at 0: coefficients all 1
        let one_minus = Taylor::constant(c(1.0, 0.0), 6).sub(&Taylor::var(c(0.0, 0.0), 6));
        let r = one_minus.recip().unwrap();
        for j in 0..=6 {
            assert!((r.coeff(j) - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn ln_derivatives() {
        // ln(1-z) at z0 = 0.3 + 0.1i: ln' = -1/(1-z), ln'' = -1/(1-z)^2
        let z0 = c(0.3, 0.1);
        let f = Taylor::constant(c(1.0, 0.0), 3).sub(&Taylor::var(z0, 3));
        let l = f.ln().unwrap();
        let w = c(1.0, 0.0) - z0;
        assert!((l.derivative(1) + 1.0 / w).norm() < 1e-14);
        assert!((l.derivative(2) + 1.0 / (w * w)).norm() < 1e-14);
        assert!((l.derivative(3) + 2.0 / (w * w * w)).norm() < 1e-13);
    }

    #[test]
    fn ln_cut_detection() {
        let neg = Taylor::constant(c(-2.0, 0.0), 2);
        assert_eq!(neg.ln().unwrap_err(), TaylorError::LogBranch);
        let zero = Taylor::constant(ZERO, 2);
        assert_eq!(zero.ln().unwrap_err(), TaylorError::LogBranch);
        let off_axis = Taylor::constant(c(-2.0, 1e-12), 2);
        assert!(off_axis.ln().is_ok());
    }

    #[test]
    fn compose_chain_rule() {
        // h = ln(1/(1-z)) composed as outer=ln at inner value
        let z0 = c(0.2, 0.4);
        let inner = Taylor::constant(c(1.0, 0.0), 5)
            .sub(&Taylor::var(z0, 5))
            .recip()
            .unwrap();
        let outer = Taylor::var(inner.value(), 5).ln().unwrap();
        let h = Taylor::compose(&outer, &inner);
        // h'(z) = 1/(1-z)
        let w = c(1.0, 0.0) - z0;
        assert!((h.derivative(1) - 1.0 / w).norm() < 1e-13);
        assert!((h.derivative(2) - 1.0 / (w * w)).norm() < 1e-13);
        assert!((h.derivative(3) - 2.0 / (w * w * w)).norm() < 1e-12);
    }

    #[test]
    fn derivative_series_shifts() {
        let z0 = c(1.5, -0.7);
        let f = Taylor::var(z0, 6).powu(5); // z^5
        let d2 = f.derivative_series(2); // 20 z^3
        let expect = Taylor::var(z0, 4).powu(3).scale(c(20.0, 0.0));
        for j in 0..=4 {
            let d = (d2.coeff(j) - expect.coeff(j)).norm();
            assert!(d < 1e-10 * expect.coeff(j).norm().max(1.0));
        }
    }
}
