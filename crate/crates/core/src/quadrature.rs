//! One-dimensional quadrature with explicit error estimates.
//!
//! Three engines, chosen per use site:
//!
//! * globally adaptive Gauss-Kronrod 7-15 with interval bisection, for
//!   integrands that are smooth away from finitely many known bad points;
//! * tanh-sinh (double-exponential) rules for intervals whose *endpoints*
//!   carry integrable singularities, used both standalone and as the
//!   sub-rule next to declared singular abscissae;
//! * the doubling trapezoid rule on the circle, which converges
//!   geometrically for periodic analytic integrands.
//!
//! Everything reports a [`QuadEstimate`] carrying the value, a conservative
//! error bound, and the number of integrand evaluations spent.

use num_complex::Complex64;
use std::sync::OnceLock;

/// Result of a quadrature routine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate<T> {
    /// Best available value of the integral.
    pub value: T,
    /// Conservative bound on the absolute error of `value`.
    pub abs_error: f64,
    /// Number of integrand evaluations consumed.
    pub evaluations: usize,
}

/// What kind of singularity the caller declares at a location.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    /// No declared singularities.
    None,
    /// Integrable logarithmic (or milder algebraic) singularities.
    Logarithmic,
}

/// Declared singular abscissae of an integrand on `[lo, hi]`.
///
/// Locations must lie within the closed integration interval; interior
/// points split the interval and every sub-interval adjacent to a declared
/// location is handled by a tanh-sinh rule, which tolerates endpoint blowup
/// of the declared kind.
#[derive(Debug, Clone)]
pub struct SingularitySpec {
    pub locations: Vec<f64>,
    pub kind: SingularityKind,
}

impl SingularitySpec {
    pub fn none() -> Self {
        SingularitySpec { locations: Vec::new(), kind: SingularityKind::None }
    }

    pub fn logarithmic(locations: Vec<f64>) -> Self {
        SingularitySpec { locations, kind: SingularityKind::Logarithmic }
    }
}

/// Failure modes of the quadrature routines.
#[derive(Debug, thiserror::Error)]
pub enum QuadError {
    #[error("invalid integration interval [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },
    #[error("declared singularity at {loc} lies outside [{lo}, {hi}]")]
    SingularityOutsideInterval { loc: f64, lo: f64, hi: f64 },
    #[error(
        "quadrature did not converge: error estimate {achieved:.3e} above tolerance {requested:.3e} \
         after {evaluations} evaluations"
    )]
    NonConvergence { achieved: f64, requested: f64, evaluations: usize },
    #[error("integrand returned a non-finite value near x = {x}")]
    NonFiniteIntegrand { x: f64 },
}

/// Default evaluation budget per top-level quadrature call.
///
/// Read once from the environment variable `TORUS_MAHLER_BUDGET`; defaults
/// to 1_000_000 when unset or unparsable.
pub fn default_budget() -> usize {
    static BUDGET: OnceLock<usize> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var("TORUS_MAHLER_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&b| b > 0)
            .unwrap_or(1_000_000)
    })
}

/// Scalar types the generic quadrature core can accumulate.
///
/// Implemented for `f64` and `Complex64`; the trait is public only because
/// it appears in public signatures.
pub trait QuadScalar: Copy + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> {
    fn zero() -> Self;
    fn scale(self, s: f64) -> Self;
    fn norm(self) -> f64;
    fn is_finite(self) -> bool;
}

impl QuadScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl QuadScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1], positive half.
// xgk[1], xgk[3], ... are the embedded 7-point Gauss abscissae.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod 7-15 application on `[lo, hi]`.
///
/// Returns `(kronrod_value, error_estimate, evaluations)`. The error
/// estimate follows the usual practice of sharpening the raw Gauss/Kronrod
/// discrepancy `d` to `d^1.5` relative to a local scale, which stays a
/// reliable bound for integrands smooth on the interval.
fn gk15<T: QuadScalar>(f: &mut dyn FnMut(f64) -> T, lo: f64, hi: f64) -> (T, f64, usize) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);

    let fc = f(c);
    let mut kron = fc.scale(WGK[7]);
    let mut gauss = fc.scale(WG[3]);
    // Mean |f| against Kronrod weights, used to scale the error heuristic.
    let mut resabs = fc.norm() * WGK[7];

    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        let s = f1 + f2;
        kron = kron + s.scale(WGK[j]);
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss = gauss + s.scale(WG[j / 2]);
        }
    }

    let value = kron.scale(h);
    let raw = (kron - gauss).norm() * h.abs();
    let scale = resabs * h.abs();
    // QUADPACK-style nonlinear sharpening, floored by a multiple of machine
    // epsilon relative to the magnitude of the integral piece.
    let mut err = raw;
    if scale > 0.0 && raw > 0.0 {
        let ratio = (200.0 * raw / scale).powf(1.5);
        if ratio < 1.0 {
            err = scale * ratio.max(1e-30);
        }
    }
    err = err.max(50.0 * f64::EPSILON * scale);
    (value, err, 15)
}

struct Segment<T> {
    lo: f64,
    hi: f64,
    value: T,
    err: f64,
}

/// Globally adaptive quadrature over `[lo, hi]` for a real integrand.
///
/// Declared singular locations from `sing` split the interval; the
/// sub-intervals touching a declared location are integrated with the
/// tanh-sinh rule (never evaluating the endpoint itself), all others with
/// adaptive Gauss-Kronrod bisection driven by a max-error heap.
pub fn integrate_adaptive(
    f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    sing: &SingularitySpec,
    tol: f64,
) -> Result<QuadEstimate<f64>, QuadError> {
    integrate_adaptive_generic(f, lo, hi, sing, tol, default_budget())
}

/// Complex-valued counterpart of [`integrate_adaptive`].
pub fn integrate_adaptive_complex(
    f: impl FnMut(f64) -> Complex64,
    lo: f64,
    hi: f64,
    sing: &SingularitySpec,
    tol: f64,
) -> Result<QuadEstimate<Complex64>, QuadError> {
    integrate_adaptive_generic(f, lo, hi, sing, tol, default_budget())
}

fn integrate_adaptive_generic<T: QuadScalar>(
    mut f: impl FnMut(f64) -> T,
    lo: f64,
    hi: f64,
    sing: &SingularitySpec,
    tol: f64,
    budget: usize,
) -> Result<QuadEstimate<T>, QuadError> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(QuadError::BadInterval { lo, hi });
    }
    for &s in &sing.locations {
        if !(lo..=hi).contains(&s) {
            return Err(QuadError::SingularityOutsideInterval { loc: s, lo, hi });
        }
    }

    // Split [lo, hi] at declared singular points.
    let mut cuts: Vec<f64> = Vec::with_capacity(sing.locations.len() + 2);
    cuts.push(lo);
    cuts.extend(sing.locations.iter().copied());
    cuts.push(hi);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let singular_at = |x: f64| sing.locations.iter().any(|&s| s == x);

    let mut total = T::zero();
    let mut total_err = 0.0;
    let mut evals = 0usize;
    let mut segments: Vec<Segment<T>> = Vec::new();

    let npieces = cuts.len() - 1;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        if singular_at(a) || singular_at(b) {
            // Endpoint singularity on this piece: tanh-sinh, full accuracy
            // requested per piece.
            let est =
                tanh_sinh_generic(&mut f, a, b, tol / npieces as f64, budget.saturating_sub(evals))?;
            total = total + est.value;
            total_err += est.abs_error;
            evals += est.evaluations;
        } else {
            let (v, e, n) = gk15(&mut f, a, b);
            if !v.is_finite() {
                return Err(QuadError::NonFiniteIntegrand { x: 0.5 * (a + b) });
            }
            evals += n;
            segments.push(Segment { lo: a, hi: b, value: v, err: e });
        }
    }

    // Bisect the worst segment until the summed error meets tolerance.
    loop {
        let seg_err: f64 = segments.iter().map(|s| s.err).sum();
        if seg_err + total_err <= tol || segments.is_empty() {
            break;
        }
        if evals + 30 > budget {
            let value = segments.iter().fold(total, |acc, s| acc + s.value);
            let achieved = seg_err + total_err;
            return Err(QuadError::NonConvergence {
                achieved,
                requested: tol,
                evaluations: evals + usize::from(value.norm().is_nan()),
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.err.partial_cmp(&b.1.err).unwrap())
            .unwrap();
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // Interval at floating-point resolution; accept its estimate.
            total = total + seg.value;
            total_err += seg.err;
            continue;
        }
        for (a, b) in [(seg.lo, mid), (mid, seg.hi)] {
            let (v, e, n) = gk15(&mut f, a, b);
            if !v.is_finite() {
                return Err(QuadError::NonFiniteIntegrand { x: 0.5 * (a + b) });
            }
            evals += n;
            segments.push(Segment { lo: a, hi: b, value: v, err: e });
        }
    }

    let mut value = total;
    let mut err = total_err;
    for s in &segments {
        value = value + s.value;
        err += s.err;
    }
    Ok(QuadEstimate { value, abs_error: err, evaluations: evals })
}

/// Tanh-sinh (double-exponential) quadrature on `[lo, hi]` for a real
/// integrand, tolerant of integrable endpoint singularities. The endpoints
/// themselves are never evaluated.
pub fn tanh_sinh(
    f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadEstimate<f64>, QuadError> {
    let mut f = f;
    tanh_sinh_generic(&mut f, lo, hi, tol, default_budget())
}

/// Complex-valued counterpart of [`tanh_sinh`].
pub fn tanh_sinh_complex(
    f: impl FnMut(f64) -> Complex64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadEstimate<Complex64>, QuadError> {
    let mut f = f;
    tanh_sinh_generic(&mut f, lo, hi, tol, default_budget())
}

fn tanh_sinh_generic<T: QuadScalar>(
    f: &mut impl FnMut(f64) -> T,
    lo: f64,
    hi: f64,
    tol: f64,
    budget: usize,
) -> Result<QuadEstimate<T>, QuadError> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(QuadError::BadInterval { lo, hi });
    }
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let half_pi = std::f64::consts::FRAC_PI_2;

    // Abscissa and weight of the transformed rule at parameter t.
    // x = c + h tanh((pi/2) sinh t), w = h (pi/2) cosh t / cosh^2((pi/2) sinh t)
    let node = |t: f64| -> (f64, f64) {
        let s = half_pi * t.sinh();
        let x = c + h * s.tanh();
        let w = h * half_pi * t.cosh() / s.cosh().powi(2);
        (x, w)
    };

    // t beyond which the weight underflows relative to everything else.
    const T_MAX: f64 = 6.115;
    const MAX_LEVEL: u32 = 12;

    let mut evals = 0usize;
    let mut eval = |f: &mut dyn FnMut(f64) -> T, x: f64, evals: &mut usize| -> Result<T, QuadError> {
        *evals += 1;
        let v = f(x);
        if !v.is_finite() {
            return Err(QuadError::NonFiniteIntegrand { x });
        }
        Ok(v)
    };

    // Level 0: step 1.
    let mut step = 1.0f64;
    let mut sum = T::zero();
    {
        let (x0, w0) = node(0.0);
        sum = sum + eval(f, x0, &mut evals)?.scale(w0);
        let mut k = 1;
        while (k as f64) * step <= T_MAX {
            let t = k as f64 * step;
            for tt in [t, -t] {
                let (x, w) = node(tt);
                if x <= lo || x >= hi || w == 0.0 {
                    continue;
                }
                sum = sum + eval(f, x, &mut evals)?.scale(w);
            }
            k += 1;
        }
    }
    let mut prev = sum.scale(step);
    let mut prev_prev_diff = f64::INFINITY;

    for _level in 1..=MAX_LEVEL {
        step *= 0.5;
        // New points are odd multiples of the new step.
        let mut k = 1u64;
        while (k as f64) * step <= T_MAX {
            let t = k as f64 * step;
            for tt in [t, -t] {
                let (x, w) = node(tt);
                if x <= lo || x >= hi || w == 0.0 {
                    continue;
                }
                sum = sum + eval(f, x, &mut evals)?.scale(w);
            }
            k += 2;
        }
        let cur = sum.scale(step);
        let diff = (cur - prev).norm();
        let floor = 10.0 * f64::EPSILON * cur.norm().max(1.0);
        if diff <= tol.max(floor) {
            // Converged: the Romberg-like doubling makes `diff` itself a
            // safe (typically gross) overestimate of the remaining error.
            return Ok(QuadEstimate {
                value: cur,
                abs_error: diff.max(0.5 * floor),
                evaluations: evals,
            });
        }
        if evals > budget {
            return Err(QuadError::NonConvergence {
                achieved: diff,
                requested: tol,
                evaluations: evals,
            });
        }
        prev = cur;
        prev_prev_diff = diff;
    }

    Err(QuadError::NonConvergence {
        achieved: prev_prev_diff,
        requested: tol,
        evaluations: evals,
    })
}

/// Mean of a complex-valued periodic function over the unit circle,
/// `(1/2pi) \int_{-pi}^{pi} g(theta) d(theta)`, by the doubling trapezoid
/// rule. Geometric convergence for integrands analytic in a neighborhood of
/// the circle.
pub fn integrate_circle(
    mut g: impl FnMut(f64) -> Complex64,
    tol: f64,
) -> Result<QuadEstimate<Complex64>, QuadError> {
    let budget = default_budget();
    let two_pi = 2.0 * std::f64::consts::PI;

    let mut n = 16usize;
    let mut evals = 0usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let theta = -std::f64::consts::PI + two_pi * (k as f64) / (n as f64);
        let v = g(theta);
        evals += 1;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(QuadError::NonFiniteIntegrand { x: theta });
        }
        acc += v;
    }
    let mut prev = acc / n as f64;

    // Each doubling inserts midpoints between existing nodes.
    loop {
        if evals + n > budget {
            return Err(QuadError::NonConvergence {
                achieved: f64::INFINITY,
                requested: tol,
                evaluations: evals,
            });
        }
        for k in 0..n {
            let theta = -std::f64::consts::PI + two_pi * (k as f64 + 0.5) / (n as f64);
            let v = g(theta);
            evals += 1;
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(QuadError::NonFiniteIntegrand { x: theta });
            }
            acc += v;
        }
        n *= 2;
        let cur = acc / n as f64;
        let diff = (cur - prev).norm();
        let floor = 8.0 * f64::EPSILON * cur.norm().max(1.0);
        if diff <= tol.max(floor) && n >= 64 {
            return Ok(QuadEstimate {
                value: cur,
                abs_error: diff.max(0.25 * floor),
                evaluations: evals,
            });
        }
        prev = cur;
    }
}
