//! Internal numeric helpers: tolerant comparisons, compensated summation,
//! and float views of arbitrary-precision integers.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

/// Absolute tolerance for comparisons against analytically exact boundaries.
pub(crate) const TOL: f64 = 1e-12;

/// Tolerance in index units for floor/ceil of in-block offsets.
pub(crate) const IDX_TOL: f64 = 1e-9;

/// `a > b`, treating a gap of at most [`TOL`] as a tie (not greater).
#[inline]
pub(crate) fn fuzzy_gt(a: f64, b: f64) -> bool {
    a > b + TOL
}

/// `a >= b`, accepting shortfalls of at most [`TOL`].
#[inline]
pub(crate) fn fuzzy_ge(a: f64, b: f64) -> bool {
    a >= b - TOL
}

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

/// `log(exp(a) + exp(b))` without overflow.
pub(crate) fn logsumexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// Natural log of a big integer; `-inf` for zero.
///
/// Values beyond f64 range are handled through their top 53 bits:
/// `ln(x) = ln(mantissa) + shift·ln 2`.
pub(crate) fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 53 {
        (x.to_u64().expect("fits in u64") as f64).ln()
    } else {
        let shift = bits - 53;
        let top = (x >> shift).to_u64().expect("53 bits fit in u64");
        (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Base-2 log of a big integer; exact for powers of two.
pub(crate) fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 53 {
        (x.to_u64().expect("fits in u64") as f64).log2()
    } else {
        let shift = bits - 53;
        let top = (x >> shift).to_u64().expect("53 bits fit in u64");
        (top as f64).log2() + shift as f64
    }
}

/// Exact floor of a finite f64 into a signed big integer.
pub(crate) fn floor_to_bigint(x: f64) -> BigInt {
    debug_assert!(x.is_finite());
    BigInt::from_f64(x.floor()).expect("finite float")
}

/// Exact ceil of a finite f64 into a signed big integer.
pub(crate) fn ceil_to_bigint(x: f64) -> BigInt {
    debug_assert!(x.is_finite());
    BigInt::from_f64(x.ceil()).expect("finite float")
}

/// `⌊k·(1 + 1e-12)/denom⌋` computed exactly over rationals.
///
/// The relative fuzz keeps ratios that are analytically integral from
/// dropping to the next integer down when `denom` carries float noise.
/// `k` may be far beyond f64 range.
pub(crate) fn fuzzy_floor_ratio(k: &BigUint, denom: f64) -> BigUint {
    let denom = if denom > 0.0 {
        denom
    } else {
        f64::MIN_POSITIVE
    };
    let d = BigRational::from_float(denom).expect("finite denominator");
    let fuzz = BigRational::new(
        BigInt::from(1_000_000_000_001u64),
        BigInt::from(1_000_000_000_000u64),
    );
    let val = BigRational::from_integer(BigInt::from(k.clone())) * fuzz / d;
    let fl = val.floor().to_integer();
    if fl.is_negative() {
        BigUint::zero()
    } else {
        fl.to_biguint().expect("non-negative")
    }
}

/// `round(e^y)` as a big integer, for exponents far beyond f64 range.
///
/// Carries ~15 significant digits (the same precision the inputs have);
/// used where in-block index offsets exceed what a float can hold.
pub(crate) fn exp_to_biguint(y: f64) -> BigUint {
    if !y.is_finite() || y < 0.0 {
        return BigUint::zero();
    }
    let t = y * std::f64::consts::LOG2_E;
    if t < 52.0 {
        return BigUint::from_f64(t.exp2().round()).expect("small exponent");
    }
    let shift = (t - 52.0).floor() as u64;
    let mantissa = (t - shift as f64).exp2().round();
    BigUint::from_f64(mantissa).expect("53-bit mantissa") << shift
}

/// Clamp a signed value into `[lo, hi]` and return it unsigned.
pub(crate) fn clamp_to_range(x: BigInt, lo: &BigUint, hi: &BigUint) -> BigUint {
    let lo_s = BigInt::from(lo.clone());
    let hi_s = BigInt::from(hi.clone());
    let clamped = x.max(lo_s).min(hi_s);
    clamped.to_biguint().expect("clamped to non-negative range")
}

/// `x^n` for big bases.
pub(crate) fn biguint_pow(base: u64, n: u32) -> BigUint {
    num_traits::pow::pow(BigUint::from(base), n as usize)
}
