//! Special functions: dilogarithm, Bloch-Wigner, complete and incomplete
//! elliptic integrals, Carlson symmetric forms, the complex AGM, and the
//! Dirichlet character values needed for the chi_{-3} constants.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::PI;
use std::sync::OnceLock;

#[derive(Debug, thiserror::Error)]
pub enum SpecFunError {
    #[error("invalid elliptic modulus: k^2 = {k2} lies on [1, oo)")]
    InvalidModulus { k2: f64 },
    #[error("argument out of domain: {what}")]
    Domain { what: String },
}

// ---------------------------------------------------------------------------
// Bernoulli numbers
// ---------------------------------------------------------------------------

/// First `n` Bernoulli numbers B_0..B_{n-1} (B_1 = -1/2 convention),
/// computed exactly with the defining recurrence and rounded once.
fn bernoulli_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        const N: usize = 52;
        let mut b: Vec<BigRational> = Vec::with_capacity(N);
        b.push(BigRational::one());
        for m in 1..N {
            // sum_{j=0}^{m} C(m+1, j) B_j = 0  =>  solve for B_m
            let mut acc = BigRational::zero();
            let mut binom = BigInt::one(); // C(m+1, 0)
            for (j, bj) in b.iter().enumerate().take(m) {
                acc += BigRational::from_integer(binom.clone()) * bj;
                // C(m+1, j+1) = C(m+1, j) * (m+1-j) / (j+1)
                binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
            }
            let c = BigRational::from_integer(binom); // C(m+1, m)
            b.push(-acc / c);
        }
        b.iter().map(|r| r.to_f64().unwrap()).collect()
    })
}

// ---------------------------------------------------------------------------
// Dilogarithm and Bloch-Wigner
// ---------------------------------------------------------------------------

/// Principal branch of the dilogarithm Li_2(z), cut along [1, oo).
///
/// On the cut itself the value follows the z + i0 side through the standard
/// library's log convention. Strategy: inversion and reflection shrink the
/// argument into |z| <= 1/2, where the Debye series in u = -log(1-z)
/// converges in a handful of terms.
pub fn dilog(z: Complex64) -> Complex64 {
    let zeta2 = PI * PI / 6.0;
    if z.is_zero() {
        return Complex64::new(0.0, 0.0);
    }
    if z == Complex64::new(1.0, 0.0) {
        return Complex64::new(zeta2, 0.0);
    }
    if z == Complex64::new(-1.0, 0.0) {
        return Complex64::new(-zeta2 / 2.0, 0.0);
    }

    let mut w = z;
    let mut add = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;

    if w.norm() > 1.0 {
        // Li2(z) = -Li2(1/z) - pi^2/6 - log(-z)^2 / 2
        let lnmz = (-w).ln();
        add = add - Complex64::new(zeta2, 0.0) - lnmz * lnmz * 0.5;
        w = 1.0 / w;
        sign = -sign;
    }
    if w.re > 0.5 {
        // Li2(w) = pi^2/6 - log(w) log(1-w) - Li2(1-w)
        let lnw = w.ln();
        let ln1mw = (Complex64::new(1.0, 0.0) - w).ln();
        add += sign * (Complex64::new(zeta2, 0.0) - lnw * ln1mw);
        w = Complex64::new(1.0, 0.0) - w;
        sign = -sign;
    }

    // Debye series: Li2(w) = sum_{n>=0} B_n u^{n+1} / (n+1)!,  u = -log(1-w).
    let u = -(Complex64::new(1.0, 0.0) - w).ln();
    let b = bernoulli_table();
    let mut term = u; // B_0 u / 1!
    let mut sum = term;
    let mut fact = 1.0f64;
    for n in 1..b.len() {
        fact *= (n + 1) as f64;
        term *= u;
        if b[n] == 0.0 {
            continue;
        }
        let contrib = term * (b[n] / fact);
        sum += contrib;
        if contrib.norm() < 1e-18 * sum.norm().max(1e-30) {
            break;
        }
    }
    add + sign * sum
}

/// Bloch-Wigner dilogarithm D(z) = Im Li_2(z) + arg(1 - z) log|z|.
///
/// Identically zero on the real axis; satisfies D(conj z) = -D(z) and
/// D(1/z) = -D(z).
pub fn bloch_wigner(z: Complex64) -> f64 {
    if z.im == 0.0 {
        return 0.0;
    }
    let li2 = dilog(z);
    li2.im + (Complex64::new(1.0, 0.0) - z).arg() * z.norm().ln()
}

// ---------------------------------------------------------------------------
// Carlson symmetric integrals and the AGM
// ---------------------------------------------------------------------------

/// Carlson's symmetric integral R_F(x, y, z) for complex arguments off the
/// negative real axis (principal square roots), by the duplication theorem.
pub fn carlson_rf(x: Complex64, y: Complex64, z: Complex64) -> Complex64 {
    let mut x = x;
    let mut y = y;
    let mut z = z;
    let mut a = (x + y + z) / 3.0;
    let q = {
        let r = f64::EPSILON * 0.5;
        let hx = (a - x).norm();
        let hy = (a - y).norm();
        let hz = (a - z).norm();
        hx.max(hy).max(hz) / (3.0 * r).powf(1.0 / 8.0)
    };
    let mut fourn = 1.0f64;
    for _ in 0..60 {
        let sx = x.sqrt();
        let sy = y.sqrt();
        let sz = z.sqrt();
        let lam = sx * sy + sy * sz + sz * sx;
        x = (x + lam) * 0.25;
        y = (y + lam) * 0.25;
        z = (z + lam) * 0.25;
        a = (a + lam) * 0.25;
        fourn *= 4.0;
        if q / fourn < a.norm() {
            break;
        }
    }
    let xx = (a - x) / a;
    let yy = (a - y) / a;
    let zz = -xx - yy;
    let e2 = xx * yy - zz * zz;
    let e3 = xx * yy * zz;
    // Fifth-order expansion of R_F about the symmetric point.
    let one = Complex64::new(1.0, 0.0);
    let s = one - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - e2 * e3 * (3.0 / 44.0);
    s / a.sqrt()
}

/// Complex arithmetic-geometric mean with the standard "right" square root
/// choice: at each step the sign of the geometric mean is picked so the
/// iterates stay balanced, |a - b| <= |a + b|.
pub fn agm(a0: Complex64, b0: Complex64) -> Complex64 {
    let mut a = a0;
    let mut b = b0;
    for _ in 0..80 {
        if (a - b).norm() <= 4.0 * f64::EPSILON * a.norm().max(b.norm()) {
            break;
        }
        let am = (a + b) * 0.5;
        let mut gm = (a * b).sqrt();
        if (am - gm).norm() > (am + gm).norm() {
            gm = -gm;
        }
        a = am;
        b = gm;
    }
    (a + b) * 0.5
}

// ---------------------------------------------------------------------------
// Elliptic integrals
// ---------------------------------------------------------------------------

/// Validated elliptic modulus k for K(k) and F(phi, k).
///
/// Rejects k^2 on [1, oo), where the complete integral diverges or sits on
/// its branch cut. Purely imaginary and general complex moduli off that ray
/// are accepted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus(Complex64);

impl EllipticModulus {
    pub fn new(k: Complex64) -> Result<Self, SpecFunError> {
        let k2 = k * k;
        if k2.im == 0.0 && k2.re >= 1.0 {
            return Err(SpecFunError::InvalidModulus { k2: k2.re });
        }
        Ok(EllipticModulus(k))
    }

    /// Real modulus 0 <= k < 1.
    pub fn real(k: f64) -> Result<Self, SpecFunError> {
        Self::new(Complex64::new(k, 0.0))
    }

    /// Purely imaginary modulus i*kappa.
    pub fn imaginary(kappa: f64) -> Result<Self, SpecFunError> {
        Self::new(Complex64::new(0.0, kappa))
    }

    pub fn k(&self) -> Complex64 {
        self.0
    }
}

/// Complete elliptic integral of the first kind K(k).
///
/// Real moduli use the AGM, purely imaginary moduli the reciprocal-modulus
/// transformation K(i kappa) = K(kappa / sqrt(1+kappa^2)) / sqrt(1+kappa^2),
/// and everything else falls through to Carlson R_F(0, 1-k^2, 1).
pub fn ellipk(m: EllipticModulus) -> Complex64 {
    let k = m.k();
    if k.im == 0.0 && k.re.abs() < 1.0 {
        let kp = (1.0 - k.re * k.re).sqrt();
        let v = PI / (2.0 * agm_real(1.0, kp));
        return Complex64::new(v, 0.0);
    }
    if k.re == 0.0 {
        let kappa = k.im.abs();
        let d = (1.0 + kappa * kappa).sqrt();
        let inner = kappa / d;
        let kp = (1.0 - inner * inner).sqrt();
        let v = PI / (2.0 * agm_real(1.0, kp)) / d;
        return Complex64::new(v, 0.0);
    }
    carlson_rf(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0) - k * k, Complex64::new(1.0, 0.0))
}

fn agm_real(a0: f64, b0: f64) -> f64 {
    let mut a = a0;
    let mut b = b0;
    while (a - b).abs() > 2.0 * f64::EPSILON * a.abs() {
        let (na, nb) = (0.5 * (a + b), (a * b).sqrt());
        a = na;
        b = nb;
    }
    0.5 * (a + b)
}

/// Incomplete elliptic integral of the first kind F(phi, k) for real
/// amplitude |phi| <= pi/2, via Carlson R_F.
pub fn ellipf(phi: f64, m: EllipticModulus) -> Result<Complex64, SpecFunError> {
    if !(-std::f64::consts::FRAC_PI_2..=std::f64::consts::FRAC_PI_2).contains(&phi) {
        return Err(SpecFunError::Domain {
            what: format!("amplitude {phi} outside [-pi/2, pi/2]"),
        });
    }
    let s = phi.sin();
    let c = phi.cos();
    let k = m.k();
    let rf = carlson_rf(
        Complex64::new(c * c, 0.0),
        Complex64::new(1.0, 0.0) - k * k * (s * s),
        Complex64::new(1.0, 0.0),
    );
    Ok(rf * s)
}

// ---------------------------------------------------------------------------
// chi_{-3} constants
// ---------------------------------------------------------------------------

/// Values attached to the odd quadratic character of conductor 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi3Values {
    /// L(chi_{-3}, 2).
    pub l2: f64,
    /// L'(chi_{-3}, -1), via the functional equation:
    /// L'(chi_{-3}, -1) = 3 sqrt(3) / (4 pi) * L(chi_{-3}, 2).
    pub lprime_minus1: f64,
}

/// Hurwitz zeta(2, a) by Euler-Maclaurin.
fn hurwitz_zeta2(a: f64) -> f64 {
    const N: usize = 30;
    let b = bernoulli_table();
    let mut s = 0.0;
    for k in 0..N {
        let t = a + k as f64;
        s += 1.0 / (t * t);
    }
    let t = a + N as f64;
    s += 1.0 / t + 0.5 / (t * t);
    // sum_{j>=1} B_{2j} t^{-(2j+1)}
    let mut tp = t * t * t;
    for j in 1..=9 {
        s += b[2 * j] / tp;
        tp *= t * t;
    }
    s
}

/// L(chi_{-3}, 2) and L'(chi_{-3}, -1).
pub fn chi3_values() -> Chi3Values {
    // L(chi,2) = sum chi(n)/n^2 = (zeta(2,1/3) - zeta(2,2/3)) / 9
    let l2 = (hurwitz_zeta2(1.0 / 3.0) - hurwitz_zeta2(2.0 / 3.0)) / 9.0;
    let lprime_minus1 = 3.0 * 3.0f64.sqrt() / (4.0 * PI) * l2;
    Chi3Values { l2, lprime_minus1 }
}

// ---------------------------------------------------------------------------
// Exponential integral
// ---------------------------------------------------------------------------

/// E_1(x) for x > 0: power series below 1, modified Lentz continued
/// fraction above.
pub(crate) fn expint_e1(x: f64) -> f64 {
    assert!(x > 0.0, "expint_e1 requires x > 0");
    const EULER_GAMMA: f64 = 0.577215664901532860606512090082;
    if x <= 1.0 {
        // E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let c = -term / k as f64;
            sum += c;
            if c.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // E1(x) = e^{-x} / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...)))
        // evaluated with the modified Lentz algorithm.
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut f = b;
        let mut c = b;
        let mut d = 0.0f64;
        for n in 1..200 {
            let a = -((n * n) as f64);
            b += 2.0;
            d = b + a * d;
            if d == 0.0 {
                d = tiny;
            }
            c = b + a / c;
            if c == 0.0 {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-17 {
                break;
            }
        }
        (-x).exp() / f
    }
}
