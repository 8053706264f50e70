//! Scalar special functions backing the inference and bound routines.
//!
//! Self-contained double-precision implementations of the classical
//! approximations: Cody's rational erfc, the Wichura (AS 241) normal
//! quantile, a Lanczos log-gamma, and Lentz-style continued fractions for the
//! regularized incomplete gamma and beta functions. Absolute errors are below
//! 1e-12 across the tested ranges; the unit tests pin a reference grid.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `log(1 + exp(x))` without overflow or catastrophic cancellation.
pub fn ln_1p_exp(x: f64) -> f64 {
    if x > 33.3 {
        // exp(-x) underflows the 1 ulp of x itself.
        x
    } else if x >= 0.0 {
        x + (-x).exp().ln_1p()
    } else if x > -37.0 {
        x.exp().ln_1p()
    } else {
        x.exp()
    }
}

/// Standard logistic function `1 / (1 + exp(-x))`, stable on both tails.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

// Cody's rational approximations for erf/erfc (W. J. Cody, Math. Comp. 23,
// 1969), the same scheme used by the classical CALERF routine. Three ranges:
// |x| <= 0.46875, 0.46875 < |x| <= 4, |x| > 4.
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
const ERF_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const ERF_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
const ERF_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERF_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];
const ONE_OVER_SQRT_PI: f64 = 5.6418958354775628695e-1;

/// erfc(y) for y > 0.46875, with the split-exponential trick that keeps the
/// relative error small deep into the tail.
fn erfc_tail(y: f64) -> f64 {
    let r = if y <= 4.0 {
        let mut num = ERF_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERF_C[i]) * y;
            den = (den + ERF_D[i]) * y;
        }
        (num + ERF_C[7]) / (den + ERF_D[7])
    } else {
        if y >= 26.6 {
            return 0.0; // erfc underflows past ~26.55
        }
        let ysq = 1.0 / (y * y);
        let mut num = ERF_P[5] * ysq;
        let mut den = ysq;
        for i in 0..4 {
            num = (num + ERF_P[i]) * ysq;
            den = (den + ERF_Q[i]) * ysq;
        }
        let r = ysq * (num + ERF_P[4]) / (den + ERF_Q[4]);
        (ONE_OVER_SQRT_PI - r) / y
    };
    // exp(-y^2) split as exp(-hi^2) * exp(-(y-hi)(y+hi)) with hi a multiple
    // of 1/16, so the squared term is exact in double precision.
    let hi = (y * 16.0).trunc() / 16.0;
    let del = (y - hi) * (y + hi);
    (-hi * hi).exp() * (-del).exp() * r
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        1.0 - erf(x)
    } else if x < 0.0 {
        2.0 - erfc_tail(y)
    } else {
        erfc_tail(y)
    }
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        let z = y * y;
        let mut num = ERF_A[4] * z;
        let mut den = z;
        for i in 0..3 {
            num = (num + ERF_A[i]) * z;
            den = (den + ERF_B[i]) * z;
        }
        x * (num + ERF_A[3]) / (den + ERF_B[3])
    } else if x < 0.0 {
        erfc_tail(y) - 1.0
    } else {
        1.0 - erfc_tail(y)
    }
}

/// Standard normal CDF `Phi(x) = erfc(-x / sqrt 2) / 2`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal upper tail `1 - Phi(x)`, computed directly from erfc so
/// the far tail keeps full relative accuracy.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal quantile (inverse CDF), Wichura's algorithm AS 241
/// (PPND16 variant, ~16 significant digits). Returns +-infinity at 1 and 0.
pub fn normal_quantile(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "normal_quantile: p = {p} outside [0, 1]");
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = poly(
            &[
                3.3871328727963666080e0,
                1.3314166789178437745e2,
                1.9715909503065514427e3,
                1.3731693765509461125e4,
                4.5921953931549871457e4,
                6.7265770927008700853e4,
                3.3430575583588128105e4,
                2.5090809287301226727e3,
            ],
            r,
        );
        let den = poly(
            &[
                1.0,
                4.2313330701600911252e1,
                6.8718700749205790830e2,
                5.3941960214247511077e3,
                2.1213794301586595867e4,
                3.9307895800092710610e4,
                2.8729085735721942674e4,
                5.2264952788528545610e3,
            ],
            r,
        );
        return q * num / den;
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        poly(
            &[
                1.42343711074968357734e0,
                4.63033784615654529590e0,
                5.76949722146069140550e0,
                3.64784832476320460504e0,
                1.27045825245236838258e0,
                2.41780725177450611770e-1,
                2.27238449892691845833e-2,
                7.74545014278341407640e-4,
            ],
            r,
        ) / poly(
            &[
                1.0,
                2.05319162663775882187e0,
                1.67638483018380384940e0,
                6.89767334985100004550e-1,
                1.48103976427480074590e-1,
                1.51986665636164571966e-2,
                5.47593808499534494600e-4,
                1.05075007164441684324e-9,
            ],
            r,
        )
    } else {
        let r = r - 5.0;
        poly(
            &[
                6.65790464350110377720e0,
                5.46378491116411436990e0,
                1.78482653991729133580e0,
                2.96560571828504891230e-1,
                2.65321895265761230930e-2,
                1.24266094738807843860e-3,
                2.71155556874348757815e-5,
                2.01033439929228813265e-7,
            ],
            r,
        ) / poly(
            &[
                1.0,
                5.99832206555887937690e-1,
                1.36929880922735805310e-1,
                1.48753612908506148525e-2,
                7.86869131145613259100e-4,
                1.84631831751005468180e-5,
                1.42151175831644588870e-7,
                2.04426310338993978564e-15,
            ],
            r,
        )
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Ascending-power polynomial evaluation by Horner's rule.
fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

// Lanczos approximation with g = 7 and nine coefficients; relative error
// below 1e-13 on the positive axis.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Natural log of the gamma function for x > 0 (reflection handles
/// 0 < x < 0.5).
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma: x = {x} must be positive");
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma `P(a, x)`; series for `x < a + 1`,
/// continued fraction otherwise.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "gamma_p: a = {a}, x = {x}");
    if x == 0.0 {
        0.0
    } else if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "gamma_q: a = {a}, x = {x}");
    if x == 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (a * x.ln() - x - ln_gamma(a)).exp()
}

/// Upper-tail continued fraction in modified Lentz form.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (a * x.ln() - x - ln_gamma(a)).exp() * h
}

/// Regularized incomplete beta `I_x(a, b)` via the Lentz continued fraction,
/// using the symmetry `I_x(a, b) = 1 - I_{1-x}(b, a)` to stay in the
/// fast-converging region.
pub fn beta_inc(x: f64, a: f64, b: f64) -> f64 {
    assert!(
        (0.0..=1.0).contains(&x) && a > 0.0 && b > 0.0,
        "beta_inc: x = {x}, a = {a}, b = {b}"
    );
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let front =
        (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(x, a, b) / a
    } else {
        1.0 - front * beta_cf(1.0 - x, b, a) / b
    }
}

fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Chi-squared upper tail with `df` degrees of freedom.
pub fn chi2_sf(x: f64, df: f64) -> f64 {
    assert!(df > 0.0 && x >= 0.0, "chi2_sf: x = {x}, df = {df}");
    gamma_q(0.5 * df, 0.5 * x)
}

/// F-distribution upper tail with `(d1, d2)` degrees of freedom:
/// `I_{d2 / (d2 + d1 f)}(d2/2, d1/2)`.
pub fn f_sf(f: f64, d1: f64, d2: f64) -> f64 {
    assert!(d1 > 0.0 && d2 > 0.0 && f >= 0.0, "f_sf: f = {f}, d1 = {d1}, d2 = {d2}");
    beta_inc(d2 / (d2 + d1 * f), 0.5 * d2, 0.5 * d1)
}

/// Upper tail of the Kolmogorov distribution,
/// `K(x) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2)`, with the Jacobi theta
/// form on the left tail where the alternating series converges slowly.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.0 {
        // 1 - (sqrt(2 pi) / x) * sum_{j>=1} exp(-(2j-1)^2 pi^2 / (8 x^2))
        let mut sum = 0.0;
        for j in 1..=20u32 {
            let m = (2 * j - 1) as f64;
            let term = (-(m * m) * PI * PI / (8.0 * x * x)).exp();
            sum += term;
            if term < 1e-18 * sum.max(1.0) {
                break;
            }
        }
        1.0 - (2.0 * PI).sqrt() / x * sum
    } else {
        let mut sum = 0.0;
        for j in 1..=100u32 {
            let jf = j as f64;
            let term = (-2.0 * jf * jf * x * x).exp();
            if j % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
            if term < 1e-18 {
                break;
            }
        }
        2.0 * sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn erfc_reference_grid() {
        assert_relative_eq!(erfc(1.0), 0.15729920705028513, max_relative = 1e-13);
        assert_relative_eq!(erfc(3.3), 3.0577097964381654e-06, max_relative = 1e-13);
        assert_relative_eq!(erfc(7.7), 1.2942740067717136e-27, max_relative = 1e-13);
        assert_relative_eq!(erfc(26.0), 5.663192408856143e-296, max_relative = 1e-12);
        assert_relative_eq!(erfc(-1.0), 2.0 - 0.15729920705028513, max_relative = 1e-14);
        assert_eq!(erfc(0.0), 1.0);
        assert_eq!(erfc(27.0), 0.0);
    }

    #[test]
    fn normal_cdf_reference_grid() {
        assert_relative_eq!(normal_cdf(-3.0), 0.0013498980316300933, max_relative = 1e-13);
        assert_relative_eq!(normal_cdf(-1.0), 0.15865525393145707, max_relative = 1e-13);
        assert_relative_eq!(normal_cdf(0.5), 0.6914624612740131, max_relative = 1e-13);
        assert_relative_eq!(normal_cdf(1.959963984540054), 0.975, max_relative = 1e-13);
        assert_relative_eq!(normal_cdf(3.3), 0.9995165758576162, max_relative = 1e-13);
        assert_eq!(normal_cdf(0.0), 0.5);
        assert_relative_eq!(normal_sf(3.3), 1.0 - 0.9995165758576162, max_relative = 1e-10);
        // Far tail keeps relative accuracy where 1 - cdf would be pure noise.
        assert_relative_eq!(
            normal_sf(10.0),
            7.61985302416053e-24,
            max_relative = 1e-12
        );
    }

    #[test]
    fn normal_quantile_reference_grid() {
        assert_relative_eq!(
            normal_quantile(0.001),
            -3.090232306167813,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            normal_quantile(0.025),
            -1.9599639845400545,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            normal_quantile(1e-12),
            -7.034483825301131,
            max_relative = 1e-14
        );
        assert_eq!(normal_quantile(0.5), 0.0);
        assert_eq!(normal_quantile(0.0), f64::NEG_INFINITY);
        assert_eq!(normal_quantile(1.0), f64::INFINITY);
    }

    #[test]
    fn ln_gamma_reference_values() {
        assert_abs_diff_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(5.0), 24.0f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(ln_gamma(0.5), PI.sqrt().ln(), max_relative = 1e-13);
        assert_relative_eq!(ln_gamma(122.0), 462.60817852687495, max_relative = 1e-13);
    }

    #[test]
    fn incomplete_gamma_reference_grid() {
        assert_relative_eq!(gamma_p(3.0, 2.0), 0.32332358381693654, max_relative = 1e-12);
        assert_relative_eq!(gamma_p(2.0, 3.0), 0.8008517265285442, max_relative = 1e-12);
        assert_relative_eq!(
            gamma_p(0.5, 0.1),
            0.34527915398142317,
            max_relative = 1e-12
        );
        assert_relative_eq!(gamma_p(28.0, 30.0), 0.6671309159544766, max_relative = 1e-12);
        assert_eq!(gamma_p(3.0, 0.0), 0.0);
        assert_eq!(gamma_q(3.0, 0.0), 1.0);
    }

    #[test]
    fn incomplete_beta_reference_grid() {
        assert_relative_eq!(
            beta_inc(0.97, 122.0, 3.0),
            0.27767704680718963,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            beta_inc(0.5, 0.5, 0.5),
            0.5000000000000001,
            max_relative = 1e-12
        );
        assert_eq!(beta_inc(0.0, 2.0, 3.0), 0.0);
        assert_eq!(beta_inc(1.0, 2.0, 3.0), 1.0);
    }

    #[test]
    fn chi2_sf_reference_grid() {
        assert_relative_eq!(chi2_sf(3.1, 1.0), 0.07829229414640966, max_relative = 1e-12);
        assert_relative_eq!(chi2_sf(10.0, 4.0), 0.04042768199451279, max_relative = 1e-12);
        assert_relative_eq!(
            chi2_sf(56.3, 56.0),
            0.46362066156598797,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            chi2_sf(120.0, 56.0),
            1.4635235148683149e-06,
            max_relative = 1e-12
        );
        assert_relative_eq!(chi2_sf(0.5, 2.0), 0.7788007830714049, max_relative = 1e-12);
    }

    #[test]
    fn f_sf_reference_grid() {
        assert_relative_eq!(f_sf(1.0, 6.0, 244.0), 0.42590955676473097, max_relative = 1e-12);
        assert_relative_eq!(
            f_sf(2.5, 6.0, 244.0),
            0.022937293246476653,
            max_relative = 1e-12
        );
        assert_relative_eq!(f_sf(0.3, 6.0, 94.0), 0.9354368131046118, max_relative = 1e-12);
        assert_relative_eq!(f_sf(5.0, 3.0, 17.0), 0.01148466804369444, max_relative = 1e-12);
        assert_relative_eq!(f_sf(1.7, 12.0, 8.0), 0.22964079946726246, max_relative = 1e-12);
        assert_eq!(f_sf(0.0, 3.0, 17.0), 1.0);
    }

    #[test]
    fn kolmogorov_sf_reference_grid() {
        assert_relative_eq!(kolmogorov_sf(0.5), 0.9639452436648751, max_relative = 1e-12);
        assert_relative_eq!(kolmogorov_sf(0.8), 0.5441424115741981, max_relative = 1e-12);
        assert_relative_eq!(kolmogorov_sf(1.0), 0.26999967167735456, max_relative = 1e-12);
        assert_relative_eq!(kolmogorov_sf(1.2), 0.11224966667072497, max_relative = 1e-12);
        assert_relative_eq!(kolmogorov_sf(1.6), 0.011952043239196616, max_relative = 1e-12);
        assert_relative_eq!(kolmogorov_sf(2.0), 0.0006709252557796953, max_relative = 1e-12);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn logistic_and_softplus_tails() {
        assert_eq!(logistic(0.0), 0.5);
        assert_relative_eq!(logistic(710.0), 1.0, max_relative = 1e-15);
        assert!(logistic(-710.0) > 0.0 || logistic(-710.0) == 0.0);
        assert_eq!(ln_1p_exp(800.0), 800.0);
        assert_relative_eq!(ln_1p_exp(0.0), 2.0f64.ln(), max_relative = 1e-15);
        assert_eq!(ln_1p_exp(-800.0), 0.0);
    }

    #[test]
    fn agrees_with_statrs_on_dense_grids() {
        use statrs::distribution::{ChiSquared, Continuous, ContinuousCDF, FisherSnedecor, Normal};
        let _ = Normal::new(0.0, 1.0).map(|d| d.pdf(0.0)); // silence unused trait warning paths
        // statrs' own erf carries ~1e-10 relative error in places, so the
        // cross-check tolerance is looser than the pinned reference grid.
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut x = -6.0;
        while x <= 6.0 {
            assert_abs_diff_eq!(normal_cdf(x), normal.cdf(x), epsilon = 1e-10);
            x += 0.173;
        }
        let mut p = 0.0005;
        while p < 1.0 {
            assert_abs_diff_eq!(
                normal_quantile(p),
                normal.inverse_cdf(p),
                epsilon = 1e-8
            );
            p += 0.0137;
        }
        for df in [1.0, 2.0, 5.0, 56.0, 120.0] {
            let chi = ChiSquared::new(df).unwrap();
            let mut x = 0.1;
            while x < 4.0 * df {
                assert_abs_diff_eq!(chi2_sf(x, df), chi.sf(x), epsilon = 1e-12);
                x += 0.37 * df.sqrt();
            }
        }
        for (d1, d2) in [(6.0, 244.0), (3.0, 17.0), (12.0, 8.0), (1.0, 1.0)] {
            let fdist = FisherSnedecor::new(d1, d2).unwrap();
            let mut f = 0.05;
            while f < 8.0 {
                assert_abs_diff_eq!(f_sf(f, d1, d2), fdist.sf(f), epsilon = 1e-11);
                f += 0.31;
            }
        }
    }

    proptest! {
        #[test]
        fn erf_erfc_complementarity(x in -6.0f64..6.0) {
            prop_assert!((erf(x) + erfc(x) - 1.0).abs() < 1e-14);
            prop_assert!((erf(-x) + erf(x)).abs() < 1e-15);
        }

        #[test]
        fn quantile_inverts_cdf(p in 0.0001f64..0.9999) {
            let x = normal_quantile(p);
            prop_assert!((normal_cdf(x) - p).abs() < 1e-13);
        }

        #[test]
        fn gamma_p_q_sum_to_one(a in 0.1f64..80.0, x in 0.0f64..120.0) {
            prop_assert!((gamma_p(a, x) + gamma_q(a, x) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn beta_inc_symmetry(x in 0.001f64..0.999, a in 0.2f64..50.0, b in 0.2f64..50.0) {
            let lhs = beta_inc(x, a, b);
            let rhs = 1.0 - beta_inc(1.0 - x, b, a);
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn cdf_monotone(x in -8.0f64..8.0) {
            prop_assert!(normal_cdf(x) <= normal_cdf(x + 1e-3));
        }
    }
}
