//! Dyadic interval arithmetic on big integers with directed rounding.
//!
//! An [`Interval`] at precision `p` is the closed range
//! `[lo / 2^p, hi / 2^p]`. Every operation rounds `lo` down and `hi` up, so
//! the true real value always stays inside. Sign and ceiling queries answer
//! `None` when the enclosure is too wide; [`decide_sign`] and
//! [`decide_ceil`] then retry at doubled precision.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Highest precision tried before giving up on a decision.
pub const MAX_PRECISION: u32 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn pow2(p: u32) -> BigInt {
    BigInt::one() << p as usize
}

impl Interval {
    pub fn int(x: impl Into<BigInt>, prec: u32) -> Self {
        let v = x.into() << prec as usize;
        Interval {
            lo: v.clone(),
            hi: v,
            prec,
        }
    }

    pub fn rational(r: &BigRational, prec: u32) -> Self {
        let scaled = r.numer() << prec as usize;
        Interval {
            lo: scaled.div_floor(r.denom()),
            hi: Integer::div_ceil(&scaled, r.denom()),
            prec,
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn add(&self, o: &Interval) -> Interval {
        debug_assert_eq!(self.prec, o.prec);
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
            prec: self.prec,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
            prec: self.prec,
        }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        debug_assert_eq!(self.prec, o.prec);
        let prods = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let min = prods.iter().min().expect("four products");
        let max = prods.iter().max().expect("four products");
        let scale = pow2(self.prec);
        Interval {
            lo: min.div_floor(&scale),
            hi: Integer::div_ceil(max, &scale),
            prec: self.prec,
        }
    }

    pub fn mul_int(&self, m: &BigInt) -> Interval {
        let (a, b) = (&self.lo * m, &self.hi * m);
        let (lo, hi) = if m.is_negative() { (b, a) } else { (a, b) };
        Interval {
            lo,
            hi,
            prec: self.prec,
        }
    }

    /// Division by a positive integer.
    pub fn div_int(&self, d: &BigInt) -> Interval {
        debug_assert!(d.is_positive());
        Interval {
            lo: self.lo.div_floor(d),
            hi: Integer::div_ceil(&self.hi, d),
            prec: self.prec,
        }
    }

    /// `1 / self`, or `None` when the interval touches zero.
    pub fn recip(&self) -> Option<Interval> {
        if !self.lo.is_positive() && !self.hi.is_negative() {
            return None;
        }
        let num = pow2(2 * self.prec);
        Some(Interval {
            lo: num.div_floor(&self.hi),
            hi: Integer::div_ceil(&num, &self.lo),
            prec: self.prec,
        })
    }

    pub fn div(&self, o: &Interval) -> Option<Interval> {
        o.recip().map(|r| self.mul(&r))
    }

    /// Multiplies by `2^e`.
    pub fn shl(&self, e: u32) -> Interval {
        Interval {
            lo: &self.lo << e as usize,
            hi: &self.hi << e as usize,
            prec: self.prec,
        }
    }

    /// Adds `[-ulps, +ulps]` units in the last place.
    pub fn widen(&self, ulps: u32) -> Interval {
        Interval {
            lo: &self.lo - ulps,
            hi: &self.hi + ulps,
            prec: self.prec,
        }
    }

    /// Sign of every point of the interval, if they agree.
    pub fn sign(&self) -> Option<Ordering> {
        if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// The common ceiling of every point of the interval, if there is one.
    pub fn ceil(&self) -> Option<BigInt> {
        let scale = pow2(self.prec);
        let a = Integer::div_ceil(&self.lo, &scale);
        let b = Integer::div_ceil(&self.hi, &scale);
        (a == b).then_some(a)
    }

    /// Midpoint as `f64`, for display only.
    pub fn approx(&self) -> f64 {
        BigRational::new(&self.lo + &self.hi, pow2(self.prec + 1))
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

/// Constants and elementary functions at a fixed working precision.
#[derive(Clone, Debug)]
pub struct Reals {
    prec: u32,
    ln2: Interval,
}

impl Reals {
    pub fn new(prec: u32) -> Self {
        Reals {
            prec,
            ln2: ln2_series(prec),
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn int(&self, x: impl Into<BigInt>) -> Interval {
        Interval::int(x, self.prec)
    }

    pub fn rational(&self, r: &BigRational) -> Interval {
        Interval::rational(r, self.prec)
    }

    pub fn ln2(&self) -> Interval {
        self.ln2.clone()
    }

    /// `log2(e) = 1 / ln 2`.
    pub fn log2_e(&self) -> Interval {
        self.ln2.recip().expect("ln 2 is positive")
    }

    /// Natural logarithm of a positive rational.
    pub fn ln(&self, r: &BigRational) -> Interval {
        assert!(r.is_positive(), "logarithm of a non-positive number");
        let m = r.numer().bits() as i64 - r.denom().bits() as i64;
        let reduced = if m >= 0 {
            r / BigRational::from_integer(pow2(m as u32))
        } else {
            r * BigRational::from_integer(pow2((-m) as u32))
        };
        // reduced lies in (1/2, 2), so |y| < 1/3.
        let one = BigRational::one();
        let y = (&reduced - &one) / (&reduced + &one);
        let atanh = atanh_series(&self.rational(&y), self.prec);
        self.ln2.mul_int(&BigInt::from(m)).add(&atanh.shl(1))
    }

    pub fn ln_int(&self, x: impl Into<BigInt>) -> Interval {
        self.ln(&BigRational::from_integer(x.into()))
    }

    pub fn log2(&self, r: &BigRational) -> Interval {
        self.ln(r).div(&self.ln2).expect("ln 2 is positive")
    }

    /// `2^q` for a non-negative rational `q`.
    pub fn exp2(&self, q: &BigRational) -> Interval {
        assert!(!q.is_negative(), "negative exponent");
        let whole = q.floor().to_integer();
        let frac = q - BigRational::from_integer(whole.clone());
        let e = whole.to_u32().expect("exponent fits in u32");
        let x = self.rational(&frac).mul(&self.ln2);
        exp_series(&x, self.prec).shl(e)
    }
}

/// `ln 2 = sum_{j >= 1} 1 / (j 2^j)`.
fn ln2_series(prec: u32) -> Interval {
    let terms = prec + 2;
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let top = pow2(prec);
    for j in 1..=terms {
        let d = BigInt::from(j) << j as usize;
        lo += top.div_floor(&d);
        hi += Integer::div_ceil(&top, &d);
    }
    // The tail after `terms` terms is below 2^-terms <= one unit.
    Interval {
        lo,
        hi: hi + 1u32,
        prec,
    }
}

/// `atanh(y) = sum y^(2i+1) / (2i+1)` for `|y| <= 1/3`.
fn atanh_series(y: &Interval, prec: u32) -> Interval {
    let y2 = y.mul(y);
    let mut power = y.clone();
    let mut sum = y.clone();
    // 3^-(2N+1) < 2^-(prec+1) once 2N+1 > (prec+1)/log2(3).
    let terms = prec / 3 + 2;
    for i in 1..=terms {
        power = power.mul(&y2);
        sum = sum.add(&power.div_int(&BigInt::from(2 * i + 1)));
    }
    sum.widen(2)
}

/// `exp(x)` for `|x| < 1`.
fn exp_series(x: &Interval, prec: u32) -> Interval {
    let mut term = Interval::int(1, prec);
    let mut sum = term.clone();
    let mut i = 1u32;
    // Stop when the next term is below 2^-(prec+2); tail at most twice it.
    let mut factorial_bits = 0.0f64;
    while factorial_bits < f64::from(prec) + 4.0 {
        term = term.mul(x).div_int(&BigInt::from(i));
        sum = sum.add(&term);
        i += 1;
        factorial_bits += f64::from(i).log2();
    }
    sum.widen(2)
}

/// Sign of the real enclosed by `f(reals)`, refining precision until the
/// enclosure excludes zero. `None` if even [`MAX_PRECISION`] bits do not
/// settle it.
pub fn decide_sign<F>(f: F) -> Option<Ordering>
where
    F: Fn(&Reals) -> Interval,
{
    let mut prec = 64;
    while prec <= MAX_PRECISION {
        if let Some(s) = f(&Reals::new(prec)).sign() {
            return Some(s);
        }
        prec *= 2;
    }
    None
}

/// Ceiling of the real enclosed by `f(reals)`; see [`decide_sign`].
pub fn decide_ceil<F>(f: F) -> Option<BigInt>
where
    F: Fn(&Reals) -> Interval,
{
    let mut prec = 64;
    while prec <= MAX_PRECISION {
        if let Some(c) = f(&Reals::new(prec)).ceil() {
            return Some(c);
        }
        prec *= 2;
    }
    None
}
