//! Special functions: log-Γ, erf/erfc, and the exponentially scaled Bessel `I₀`.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln |Γ(x)|` via the Lanczos approximation (g = 7, nine terms).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx).
        return (PI / (PI * x).sin().abs()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

pub fn gamma(x: f64) -> f64 {
    if x == x.floor() && x > 0.0 && x < 171.0 {
        // Exact factorials where representable.
        let mut p = 1.0;
        let mut k = 2.0;
        while k < x {
            p *= k;
            k += 1.0;
        }
        return p;
    }
    let sign = if x < 0.0 && (x.floor() as i64) % 2 != 0 { -1.0 } else { 1.0 };
    sign * ln_gamma(x).exp()
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}

/// Volume of the unit ball in `R^m`, `π^{m/2} / Γ(m/2 + 1)`; `κ₀ = 1`.
pub fn unit_ball_volume(m: u32) -> f64 {
    let h = m as f64 / 2.0;
    if m <= 100 {
        PI.powf(h) / gamma(h + 1.0)
    } else {
        (h * PI.ln() - ln_gamma(h + 1.0)).exp()
    }
}

fn erf_series(x: f64) -> f64 {
    // erf x = 2/√π · e^{-x²} Σ 2ᵏ x^{2k+1} / (1·3·…·(2k+1)); all terms positive.
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= 2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    2.0 / PI.sqrt() * (-x2).exp() * sum
}

fn erfc_continued_fraction(x: f64) -> f64 {
    // erfc x = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))), modified Lentz.
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// Error function; power series below |x| = 3, continued fraction above.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let a = x.abs();
    let v = if a < 3.0 {
        erf_series(a)
    } else {
        1.0 - erfc_continued_fraction(a)
    };
    v.copysign(x)
}

pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 3.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// Exponentially scaled modified Bessel function, `e^{-x} I₀(x)` for `x ≥ 0`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x <= 30.0 {
        // Σ (x/2)^{2k} / (k!)²
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= q / (k * k);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        // e^{-x} I₀(x) ~ 1/√(2πx) Σ ((2k-1)!!)² / (k! (8x)^k)
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            let next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (k * 8.0 * x);
            if next >= term || next < sum * 1e-17 {
                if next < term {
                    sum += next;
                }
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

pub fn bessel_i0(x: f64) -> f64 {
    bessel_i0_scaled(x) * x.abs().exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_values() {
        assert!(rel(gamma(0.5), PI.sqrt()) < 1e-14);
        assert!(rel(gamma(2.5), 0.75 * PI.sqrt()) < 1e-14);
        assert_eq!(gamma(5.0), 24.0);
        assert!(rel(ln_gamma(100.0), 359.134_205_369_575_4) < 1e-14);
        assert!(rel(gamma(0.1), 9.513_507_698_668_732) < 1e-13);
    }

    #[test]
    fn erf_values() {
        // mpmath, 50 digits
        assert!((erf(0.5) - 0.520_499_877_813_046_5).abs() < 1e-15);
        assert!((erf(2.0) - 0.995_322_265_018_952_7).abs() < 1e-15);
        assert!((erf(2.999) - 0.999_977_769_831_400_2).abs() < 1e-15);
        assert!(rel(erfc(3.5), 7.430_983_723_414_127e-7) < 1e-13);
        assert!(rel(erfc(6.0), 2.151_973_671_249_891_3e-17) < 1e-12);
        assert_eq!(erf(-1.0), -erf(1.0));
        assert_eq!(erf(0.0), 0.0);
    }

    #[test]
    fn erf_is_continuous_at_the_split() {
        let below = erf(3.0 - 1e-12);
        let above = erf(3.0);
        assert!((below - above).abs() < 1e-15);
    }

    #[test]
    fn bessel_values() {
        // mpmath values
        assert!(rel(bessel_i0(1.0), 1.266_065_877_752_008_3) < 1e-15);
        assert!(rel(bessel_i0_scaled(25.0), 8.019_677_354_743_671e-2) < 1e-13);
        assert!(rel(bessel_i0_scaled(50.0), 5.656_162_664_745_419e-2) < 1e-13);
        let a = bessel_i0_scaled(30.0);
        let b = bessel_i0_scaled(30.000_001);
        assert!(rel(a, b) < 1e-7);
    }

    #[test]
    fn ball_volumes() {
        assert!(rel(unit_ball_volume(2), PI) < 1e-14);
        assert!(rel(unit_ball_volume(3), 4.0 * PI / 3.0) < 1e-14);
        assert_eq!(unit_ball_volume(0), 1.0);
        assert_eq!(binomial(5, 2), 10.0);
    }
}
