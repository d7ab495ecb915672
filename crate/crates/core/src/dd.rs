//! Double-double arithmetic, just enough for log-gamma sums.
//!
//! Series terms are `exp(Σ ln Γ(·) + n ln|z|)` where the individual
//! logarithms reach hundreds while their sum stays small. In plain `f64`
//! each log carries ~eps·|ln Γ| of absolute error, which becomes relative
//! error of the term. Carrying the sum in double-double keeps terms at a
//! few ulp.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};
const HALF_LN_2PI: Dd = Dd {
    hi: 0.918_938_533_204_672_8,
    lo: -3.878_294_158_067_241_4e-17,
};

/// Below this the argument is shifted up before Stirling is applied.
const STIRLING_MIN: f64 = 15.0;

/// `B_{2k} / (2k(2k−1))` for k = 1..10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

#[cfg(target_feature = "fma")]
#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

// without hardware fma `mul_add` is a libm call; Dekker's split is faster
#[cfg(not(target_feature = "fma"))]
#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    #[inline]
    fn split(a: f64) -> (f64, f64) {
        let t = 134_217_729.0 * a;
        let hi = t - (t - a);
        (hi, a - hi)
    }
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    Dd {
        hi: p,
        lo: ((ah * bh - p) + ah * bl + al * bh) + al * bl,
    }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    /// `a·b` without rounding.
    pub fn product(a: f64, b: f64) -> Dd {
        two_prod(a, b)
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd {
                hi: f64::INFINITY,
                lo: 0.0,
            };
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        // r = (x − k ln2) / 256, then exp(r) by Taylor and eight squarings
        let r = (self - LN2 * k) * (1.0 / 256.0);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for i in 1..=12 {
            term = term * r / i as f64;
            sum = sum + term;
            if term.hi.abs() < 1e-33 {
                break;
            }
        }
        for _ in 0..8 {
            sum = sum * sum;
        }
        let scale = 2f64.powi(k as i32);
        Dd {
            hi: sum.hi * scale,
            lo: sum.lo * scale,
        }
    }

    /// Natural log of a positive value.
    ///
    /// `x = 2^k·m` with `m` near a table point `c`, then
    /// `ln x = k ln2 + ln c + 2 atanh((m−c)/(m+c))`.
    pub fn ln(self) -> Dd {
        if !(self.hi > 0.0 && self.hi.is_finite()) {
            return Dd::from(self.hi.ln());
        }
        let (frac, k) = frexp(self.hi);
        let scale = 2f64.powi(-k);
        let m = Dd {
            hi: frac * 2.0,
            lo: self.lo * scale * 2.0,
        };
        let j = ((m.hi - 1.0) * LN_TABLE_STEPS as f64).round() as usize;
        let c = 1.0 + j as f64 / LN_TABLE_STEPS as f64;
        let u = (m - c).div_dd(m + c);
        let u2 = u * u;
        // u⁵ and beyond are below 1e-14 relative, f64 is enough there
        let u2f = u2.hi;
        let tail = u.hi * u2f * u2f * (1.0 / 5.0 + u2f * (1.0 / 7.0 + u2f / 9.0));
        let atanh = u + (u * u2) / 3.0 + tail;
        LN2 * (k - 1) as f64 + ln_table()[j] + atanh * 2.0
    }

    /// Natural log by one Newton step on `exp`; used to build the table.
    fn ln_newton(self) -> Dd {
        let y = Dd::from(self.hi.ln());
        y + self * (-y).exp() - 1.0
    }

    fn div_dd(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        quick_two_sum(q1, q2) + r.hi / o.hi
    }

    /// Rounds `exp(self)` to `f64`.
    pub fn exp_f64(self) -> f64 {
        self.hi.exp() * (1.0 + self.lo)
    }
}

impl From<f64> for Dd {
    fn from(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, o: f64) -> Dd {
        let s = two_sum(self.hi, o);
        quick_two_sum(s.hi, s.lo + self.lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    fn sub(self, o: f64) -> Dd {
        self + (-o)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        quick_two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, o: f64) -> Dd {
        let p = two_prod(self.hi, o);
        quick_two_sum(p.hi, p.lo + self.lo * o)
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, o: f64) -> Dd {
        let q1 = self.hi / o;
        let r = self - two_prod(q1, o);
        quick_two_sum(q1, r.hi / o)
    }
}

const LN_TABLE_STEPS: usize = 256;

/// ln(1 + j/256) for j = 0..=256.
fn ln_table() -> &'static [Dd] {
    static TABLE: OnceLock<Vec<Dd>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=LN_TABLE_STEPS)
            .map(|j| Dd::from(1.0 + j as f64 / LN_TABLE_STEPS as f64).ln_newton())
            .collect()
    })
}

/// `x = frac·2^exp` with `frac` in [1/2, 1), for finite positive `x`.
fn frexp(x: f64) -> (f64, i32) {
    let bits = x.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i32;
    if e == 0 {
        let (f, k) = frexp(x * 2f64.powi(64));
        return (f, k - 64);
    }
    (
        f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52)),
        e - 1022,
    )
}

/// ln Γ(x) for `x > 0`; `None` outside that range.
pub(crate) fn ln_gamma(x: Dd) -> Option<Dd> {
    if !(x.hi > 1e-8 && x.hi.is_finite()) {
        return None;
    }
    let mut x = x;
    let mut shift = Dd::ONE;
    while x.hi < STIRLING_MIN {
        shift = shift * x;
        x = x + 1.0;
    }
    let inv = 1.0 / x.hi;
    let inv2 = inv * inv;
    let tail = STIRLING.iter().rev().fold(0.0, |acc, c| acc * inv2 + c) * inv;
    let main = (x - 0.5) * x.ln() - x + HALF_LN_2PI + tail;
    Some(if shift == Dd::ONE {
        main
    } else {
        main - shift.ln()
    })
}

/// ln n! for n below this come from a table.
const FACTORIAL_TABLE: usize = 1024;

/// ln n!, tabulated for small n.
pub(crate) fn ln_factorial(n: usize) -> Dd {
    static TABLE: OnceLock<Vec<Dd>> = OnceLock::new();
    if n >= FACTORIAL_TABLE {
        return ln_gamma_f64(n as f64 + 1.0).unwrap_or(Dd {
            hi: f64::INFINITY,
            lo: 0.0,
        });
    }
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(FACTORIAL_TABLE);
        let mut acc = Dd::ZERO;
        t.push(acc);
        for k in 1..FACTORIAL_TABLE {
            acc = acc + Dd::from(k as f64).ln();
            t.push(acc);
        }
        t
    })[n]
}

/// ln Γ of a real `f64`, positive arguments only.
pub(crate) fn ln_gamma_f64(x: f64) -> Option<Dd> {
    ln_gamma(Dd::from(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    // (x, hi, lo) of ln Γ(x) to 50 digits
    const LN_GAMMA: [(f64, f64, f64); 7] = [
        (0.5, 0.5723649429247001, 5.132975581353913e-18),
        (48.2, 137.57529272012997, 1.0597134768943302e-14),
        (100.0, 359.1342053695754, 1.249838958769947e-15),
        (3.7, 1.428072326665388, 4.823204321026723e-17),
        (0.001, 6.907178885383853, 2.777556825107376e-16),
        (15.0, 25.19122118273868, 1.6710216640385304e-15),
        (14.999, 25.18854687054693, -1.4059240086588795e-15),
    ];

    // (x, hi, lo) of ln x to 50 digits
    const LN: [(f64, f64, f64); 4] = [
        (7.0, 1.945_910_149_055_313_2, 7.323_586_207_904_907e-17),
        (1.5, 0.405_465_108_108_164_4, -2.881_138_025_962_642_6e-18),
        (1e300, 690.775_527_898_213_7, 2.374_766_002_880_024_3e-14),
        (3e-5, -10.414_313_176_302_12, 7.979_547_251_798_227e-16),
    ];

    #[test]
    fn exp_and_ln_round_trip() {
        for x in [1e-3, 0.5, 1.0, 2.0, 37.25, 1e10] {
            let back = Dd::from(x).ln().exp();
            assert!(((back.hi - x) + back.lo).abs() <= 1e-28 * x, "{x}");
        }
        for (x, hi, lo) in LN {
            let d = Dd::from(x).ln() - Dd { hi, lo };
            assert!((d.hi + d.lo).abs() <= 1e-29 * hi.abs(), "{x}: {d:?}");
            if x > 1e100 {
                continue; // exp(−y) loses its low word to underflow; the table never goes there
            }
            let d = Dd::from(x).ln_newton() - Dd { hi, lo };
            assert!((d.hi + d.lo).abs() <= 1e-29 * hi.abs(), "{x}: {d:?}");
        }
        let e = Dd::ONE.exp();
        assert_eq!(e.hi, std::f64::consts::E);
        assert!((e.lo - 1.445_646_891_729_250_2e-16).abs() < 1e-28, "{e:?}");
    }

    #[test]
    fn ln_gamma_matches_references() {
        for (x, hi, lo) in LN_GAMMA {
            let v = ln_gamma_f64(x).unwrap() - Dd { hi, lo };
            assert!((v.hi + v.lo).abs() <= 1e-17, "{x}: {v:?}");
        }
        // ln Γ(n+1) = ln n! exactly for small n
        let v = ln_gamma_f64(21.0).unwrap();
        let exact = Dd::from(2_432_902_008_176_640_000.0).ln();
        assert!(((v - exact).hi).abs() < 1e-17);
        assert!(ln_gamma_f64(-0.5).is_none());
        let d = ln_factorial(300) - ln_gamma_f64(301.0).unwrap();
        assert!((d.hi + d.lo).abs() < 1e-17);
    }
}
