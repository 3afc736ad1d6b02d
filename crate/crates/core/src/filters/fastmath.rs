//! Branch-free exponentials that vectorize. Only plain IEEE operations are
//! used (no fused multiply-add), so results match on every target.

/// Vector targets for hot kernels. FMA is deliberately left out so every
/// version rounds identically.
macro_rules! simd_kernel {
    ($item:item) => {
        #[multiversion::multiversion(targets("x86_64+avx512f+avx2+avx", "x86_64+avx2+avx"))]
        $item
    };
}
pub(crate) use simd_kernel;

const LOG2_E: f32 = std::f32::consts::LOG2_E;
const LN_2: f32 = std::f32::consts::LN_2;

/// Adding this rounds an f32 in (-2^22, 2^22) to the nearest integer, which
/// then sits in the low mantissa bits.
const ROUND_MAGIC: f32 = 12_582_912.0;

/// `e^x` for `x <= 0`; relative error below `2e-6 + 1e-7·|x|` (the f32
/// rounding of `x·log2 e` dominates for large `|x|`), flushes to 0 below 2^-126.5.
#[inline(always)]
pub fn exp_nonpos(x: f32) -> f32 {
    let t = (x * LOG2_E).max(-127.0);
    let k = t + ROUND_MAGIC;
    let n = k - ROUND_MAGIC;
    // fraction in [-0.5, 0.5]
    let y = (t - n) * LN_2;
    let p = 1.0
        + y * (1.0
            + y * (0.5
                + y * (1.0 / 6.0
                    + y * (1.0 / 24.0 + y * (1.0 / 120.0 + y * (1.0 / 720.0 + y * (1.0 / 5040.0)))))));
    let n_bits = k.to_bits().wrapping_sub(ROUND_MAGIC.to_bits());
    p * f32::from_bits(n_bits.wrapping_add(127) << 23)
}

/// `(1 + tanh(z)) / 2`, written as a logistic so only `exp_nonpos` is needed.
#[inline(always)]
pub fn half_one_plus_tanh(z: f32) -> f32 {
    let e = exp_nonpos(-2.0 * z.abs());
    let s = 1.0 / (1.0 + e);
    if z >= 0.0 {
        s
    } else {
        e * s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_matches_libm() {
        let mut x = 0f32;
        while x > -80.0 {
            let exact = libm::exp(x as f64);
            let got = exp_nonpos(x) as f64;
            let err = (got - exact).abs();
            assert!(err <= (2e-6 + 1e-7 * (x as f64).abs()) * exact + 1e-37, "x={x} got {got} exact {exact}");
            x -= 0.0137;
        }
        assert_eq!(exp_nonpos(0.0), 1.0);
        assert_eq!(exp_nonpos(-1e9), 0.0);
    }

    #[test]
    fn logistic_matches_tanh() {
        for i in -300..=300 {
            let z = i as f32 / 100.0;
            let exact = (1.0 + libm::tanh(z as f64)) / 2.0;
            assert!((half_one_plus_tanh(z) as f64 - exact).abs() < 1e-6, "z={z}");
        }
    }
}
