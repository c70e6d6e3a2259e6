//! Laguerre polynomials `L_l(u)` via the stable upward three-term recurrence
//!
//! ```text
//! (l+1) L_{l+1}(u) = (2l+1-u) L_l(u) - l L_{l-1}(u),   L_0 = 1, L_1 = 1-u,
//! ```
//!
//! their derivatives through the identity `u L'_l(u) = l (L_l(u) - L_{l-1}(u))`
//! (with the limit `L'_l(0) = -l`), and the exponentially scaled combination
//!
//! ```text
//! ℓ_l(u) = e^{-u/2} L_l(u),   |ℓ_l(u)| ≤ 1 for u ≥ 0,
//! ```
//!
//! which is what the Landau-channel series actually consumes. Because the
//! recurrence is linear, the damping factor passes straight through it: the
//! scaled values satisfy the same recurrence with scaled seeds. For large `u`
//! the seed `e^{-u/2}` underflows around `u ≈ 1416`; [`ScaledLaguerre`]
//! switches to renormalized iteration with an explicit logarithmic offset so
//! arguments up to `u ~ 10⁴` (far beyond the `ε = 500` maps, which reach
//! `u ≈ 1200`) stay exact to full relative precision.

use super::SpecialFnError;

/// Largest `u` for which the plain seed `e^{-u/2}` is used directly. The seed
/// is then ≥ 9.9e-305, still a normal f64 with full precision.
const DIRECT_SEED_LIMIT: f64 = 1400.0;
/// Renormalize the running recurrence values when they exceed 2^840.
const RENORM_EXP: i32 = 840;

/// Table of `L_0..L_n` and `L'_0..L'_n` at a fixed argument.
#[derive(Debug, Clone)]
pub struct LaguerreTable {
    u: f64,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl LaguerreTable {
    /// The argument the table was built at.
    pub fn argument(&self) -> f64 {
        self.u
    }

    /// `L_l(u)`.
    pub fn value(&self, l: usize) -> f64 {
        self.values[l]
    }

    /// `L'_l(u)`.
    pub fn deriv(&self, l: usize) -> f64 {
        self.derivs[l]
    }

    /// Number of stored orders (`n + 1`).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when the table is empty (never produced by [`laguerre_all`]).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Evaluate `L_0..L_n` and derivatives at `u ≥ 0` by upward recurrence.
pub fn laguerre_all(n: usize, u: f64) -> Result<LaguerreTable, SpecialFnError> {
    if !(u >= 0.0) || !u.is_finite() {
        return Err(SpecialFnError::NegativeArgument { u });
    }
    let mut values = Vec::with_capacity(n + 1);
    values.push(1.0);
    if n >= 1 {
        values.push(1.0 - u);
    }
    for l in 1..n {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0 - u) * values[l] - lf * values[l - 1]) / (lf + 1.0);
        values.push(next);
    }
    let derivs = (0..=n)
        .map(|l| {
            if l == 0 {
                0.0
            } else if u == 0.0 {
                -(l as f64)
            } else {
                (l as f64) * (values[l] - values[l - 1]) / u
            }
        })
        .collect();
    Ok(LaguerreTable { u, values, derivs })
}

/// One scaled Laguerre term: `value = e^{-u/2} L_l(u)` and
/// `deriv = e^{-u/2} L'_l(u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledTerm {
    pub l: u32,
    pub value: f64,
    pub deriv: f64,
}

/// Streaming generator of scaled Laguerre terms `ℓ_l(u)` for `l = 0, 1, 2, …`.
///
/// Internally iterates the recurrence on values `w_l = ℓ_l(u)·e^{-offset}`;
/// whenever the `w` magnitudes exceed `2^840` they are rescaled by an exact
/// power of two and the offset absorbs the difference, so neither overflow nor
/// harmful underflow can occur at any argument.
#[derive(Debug, Clone)]
pub struct ScaledLaguerre {
    u: f64,
    l_next: u32,
    w_prev: f64,
    w_cur: f64,
    /// Natural-log offset: true value = w · exp(log_scale).
    log_scale: f64,
}

impl ScaledLaguerre {
    /// Start the sequence at `l = 0`. Panics on negative or non-finite `u`
    /// only in debug builds; callers validate at the API boundary.
    pub fn new(u: f64) -> Self {
        debug_assert!(u >= 0.0 && u.is_finite());
        if u <= DIRECT_SEED_LIMIT {
            let s = (-0.5 * u).exp();
            Self {
                u,
                l_next: 0,
                w_prev: s,
                w_cur: (1.0 - u) * s,
                log_scale: 0.0,
            }
        } else {
            Self::new_renormalized(u)
        }
    }

    /// Force the renormalized-iteration path regardless of `u`; used by tests
    /// to verify both paths agree where they overlap.
    #[cfg(test)]
    pub(crate) fn new_forced_log_path(u: f64) -> Self {
        Self::new_renormalized(u)
    }

    fn new_renormalized(u: f64) -> Self {
        Self {
            u,
            l_next: 0,
            w_prev: 1.0,
            w_cur: 1.0 - u,
            log_scale: -0.5 * u,
        }
    }

    fn emit(&self, w: f64) -> f64 {
        if self.log_scale == 0.0 {
            w
        } else if w == 0.0 {
            0.0
        } else {
            let v = (w.abs().ln() + self.log_scale).exp();
            if w < 0.0 {
                -v
            } else {
                v
            }
        }
    }

    /// Produce the term for the next `l` and advance.
    pub fn next_term(&mut self) -> ScaledTerm {
        let l = self.l_next;
        let (w_lo, w_hi) = (self.w_prev, self.w_cur);
        let w_l = if l == 0 { w_lo } else { w_hi };
        let value = self.emit(w_l);
        let deriv = if l == 0 {
            0.0
        } else if self.u == 0.0 {
            -(l as f64)
        } else {
            // u L'_l = l (L_l - L_{l-1}); subtract in scaled space first.
            self.emit((l as f64) * (w_hi - w_lo) / self.u)
        };

        if l >= 1 {
            let lf = l as f64;
            let mut next = ((2.0 * lf + 1.0 - self.u) * w_hi - lf * w_lo) / (lf + 1.0);
            let mut cur = w_hi;
            if next.abs() > f64::powi(2.0, RENORM_EXP) {
                // Exact power-of-two rescale keeps relative precision intact.
                next = libm_scalbn(next, -RENORM_EXP);
                cur = libm_scalbn(cur, -RENORM_EXP);
                self.log_scale += RENORM_EXP as f64 * std::f64::consts::LN_2;
            }
            self.w_prev = cur;
            self.w_cur = next;
        }
        self.l_next = l + 1;
        ScaledTerm { l, value, deriv }
    }
}

#[inline]
fn libm_scalbn(x: f64, e: i32) -> f64 {
    // f64::powi(2, e) is exact for |e| < 1023, so this multiply is exact.
    x * f64::powi(2.0, e)
}

/// Single scaled value `ℓ_l(u) = e^{-u/2} L_l(u)`.
pub fn scaled_laguerre(l: u32, u: f64) -> f64 {
    let mut it = ScaledLaguerre::new(u);
    let mut term = it.next_term();
    while term.l < l {
        term = it.next_term();
    }
    term.value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_values_are_exact() {
        for &u in &[0.0, 1.0, 2.0] {
            let t = laguerre_all(2, u).unwrap();
            assert_eq!(t.value(0), 1.0);
            assert_eq!(t.value(1), 1.0 - u);
        }
        // L_2(u) = 1 - 2u + u²/2, so L_2(2) = -1.
        let t = laguerre_all(2, 2.0).unwrap();
        assert!((t.value(2) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn mid_order_values_match_monomial_sum_oracle() {
        // Expected values from a monomial-sum evaluation of
        // L_n(u) = Σ_k C(n,k) (-u)^k / k! carried out with mpmath at 40
        // significant digits.
        let t = laguerre_all(12, 3.7).unwrap();
        let expected_10 = 0.694_262_567_354_107_390_87;
        let expected_12 = 1.398_306_086_764_111_621_7;
        assert!(((t.value(10) - expected_10) / expected_10).abs() < 1e-12);
        assert!(((t.value(12) - expected_12) / expected_12).abs() < 1e-12);
    }

    #[test]
    fn recurrence_residual_vanishes() {
        let t = laguerre_all(60, 7.3).unwrap();
        for l in 1..59 {
            let lf = l as f64;
            let lhs = (lf + 1.0) * t.value(l + 1);
            let rhs = (2.0 * lf + 1.0 - 7.3) * t.value(l) - lf * t.value(l - 1);
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            assert!(
                ((lhs - rhs) / scale).abs() < 1e-12,
                "recurrence residual at l={l}"
            );
        }
    }

    #[test]
    fn derivative_identity_matches_finite_differences() {
        let u = 3.7;
        let h = 1e-6;
        let t = laguerre_all(20, u).unwrap();
        let tp = laguerre_all(20, u + h).unwrap();
        let tm = laguerre_all(20, u - h).unwrap();
        for l in [1usize, 5, 12, 20] {
            let fd = (tp.value(l) - tm.value(l)) / (2.0 * h);
            let scale = fd.abs().max(1.0);
            assert!(
                ((t.deriv(l) - fd) / scale).abs() < 1e-7,
                "derivative mismatch at l={l}: {} vs {}",
                t.deriv(l),
                fd
            );
        }
        let t0 = laguerre_all(8, 0.0).unwrap();
        for l in 0..=8 {
            assert_eq!(t0.deriv(l), -(l as f64)); // L'_l(0) = -l
            assert_eq!(t0.value(l), 1.0); // L_l(0) = 1
        }
    }

    #[test]
    fn negative_argument_is_rejected() {
        assert!(laguerre_all(3, -0.5).is_err());
        assert!(laguerre_all(3, f64::NAN).is_err());
    }

    /// Frozen values of ℓ_l(u) = e^{-u/2} L_l(u) computed with mpmath at 40
    /// significant digits (exp(-u/2) * laguerre(l, 0, u)).
    #[test]
    fn scaled_values_match_extended_precision_oracle() {
        let cases: &[(u32, f64, f64)] = &[
            (100, 600.0, 3.884_659_632_035_103_38e-20),
            (250, 600.0, -3.589_002_945_346_549_94e-2),
            (300, 600.0, -7.237_291_121_060_930_29e-4),
            (500, 600.0, 1.498_394_492_086_653_56e-2),
            (600, 600.0, -1.356_579_484_633_901_65e-2),
            (100, 1210.0, 4.236_023_163_602_496_76e-117),
            (250, 1210.0, 2.000_635_116_136_203_63e-15),
            (300, 1210.0, 2.811_428_123_242_814_29e-2),
            (500, 1210.0, -1.414_246_196_795_564_37e-2),
            (600, 1210.0, -5.175_703_680_412_284_75e-3),
            (100, 1400.0, 1.920_173_887_026_830_61e-151),
            (250, 1400.0, 2.774_589_055_748_783_78e-35),
            (300, 1400.0, 1.363_445_866_104_452_81e-13),
            (500, 1400.0, -5.874_091_334_059_175_73e-3),
            (600, 1400.0, 1.232_794_207_022_037_65e-2),
        ];
        for &(l, u, expected) in cases {
            let got = scaled_laguerre(l, u);
            assert!(
                ((got - expected) / expected).abs() < 1e-10,
                "ℓ_{l}({u}) = {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn renormalized_path_agrees_with_direct_path() {
        // u = 1300 is valid for both the direct-seed path and the
        // renormalized path; they must agree to full precision.
        let u = 1300.0;
        let mut direct = ScaledLaguerre::new(u);
        let mut log = ScaledLaguerre::new_forced_log_path(u);
        for _ in 0..=800 {
            let a = direct.next_term();
            let b = log.next_term();
            assert_eq!(a.l, b.l);
            let scale = a.value.abs().max(1e-300);
            assert!(
                ((a.value - b.value) / scale).abs() < 1e-11,
                "path mismatch at l={}: {} vs {}",
                a.l,
                a.value,
                b.value
            );
        }
    }

    #[test]
    fn scaled_magnitude_respects_unit_bound() {
        // |e^{-u/2} L_l(u)| ≤ 1 on u ≥ 0.
        for &u in &[0.0, 0.3, 7.3, 55.0, 240.0, 602.0, 1210.0] {
            let mut it = ScaledLaguerre::new(u);
            for _ in 0..2000 {
                let t = it.next_term();
                assert!(
                    t.value.abs() <= 1.0 + 1e-12,
                    "|ℓ_{}({u})| = {} exceeds 1",
                    t.l,
                    t.value
                );
            }
        }
    }

    #[test]
    fn scaled_partial_sums_oscillate_boundedly() {
        // Smoke test of alternation: partial sums of Σ_l ℓ_l(u) wander but do
        // not run away over thousands of terms.
        let mut it = ScaledLaguerre::new(7.3);
        let mut sum = 0.0;
        let mut max_abs: f64 = 0.0;
        for _ in 0..4000 {
            sum += it.next_term().value;
            max_abs = max_abs.max(sum.abs());
        }
        assert!(max_abs < 100.0, "partial sums grew to {max_abs}");
    }

    #[test]
    fn scaled_deriv_matches_table_at_moderate_argument() {
        let u = 12.4;
        let table = laguerre_all(40, u).unwrap();
        let damp = (-0.5 * u).exp();
        let mut it = ScaledLaguerre::new(u);
        for l in 0..=40usize {
            let t = it.next_term();
            let want_v = table.value(l) * damp;
            let want_d = table.deriv(l) * damp;
            assert!((t.value - want_v).abs() < 1e-12 * want_v.abs().max(1.0));
            assert!((t.deriv - want_d).abs() < 1e-12 * want_d.abs().max(1.0));
        }
    }
}
