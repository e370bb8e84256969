//! Adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_41,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_intervals: 2000,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadConfig {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("QuadratureNonConvergence: estimate {value} with error {error:e} after {intervals} intervals")]
    NonConvergence {
        value: f64,
        error: f64,
        intervals: usize,
    },
    #[error("QuadratureNonConvergence: non-finite integrand value at {x}")]
    NonFinite { x: f64 },
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite { x: c });
    }
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let (x1, x2) = (c - dx, c + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(QuadError::NonFinite { x: x1 });
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite { x: x2 });
        }
        k += WGK[i] * (f1 + f2);
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

/// ∫_a^b f with global adaptive bisection.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (v, e) = gk15(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    let (mut total, mut err) = (v, e);
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if err <= tol {
            break;
        }
        if heap.len() >= cfg.max_intervals {
            return Err(QuadError::NonConvergence {
                value: total,
                error: err,
                intervals: heap.len(),
            });
        }
        let s = heap.pop().expect("non-empty");
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            return Err(QuadError::NonConvergence {
                value: total,
                error: err,
                intervals: heap.len(),
            });
        }
        let (v1, e1) = gk15(&mut f, s.a, m)?;
        let (v2, e2) = gk15(&mut f, m, s.b)?;
        evaluations += 30;
        total += v1 + v2 - s.value;
        err += e1 + e2 - s.error;
        heap.push(Segment { a: s.a, b: m, value: v1, error: e1 });
        heap.push(Segment { a: m, b: s.b, value: v2, error: e2 });
    }
    // re-sum to shed accumulated update roundoff
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

fn needs_substitution(e: f64) -> bool {
    !(e >= 0.0 && e.fract() == 0.0)
}

/// ∫_a^b f where f behaves like (x−a)^{ea} near a and (b−x)^{eb} near b
/// (ea, eb > −1). The integrand receives `(x, x − a, b − x)` with the
/// offsets computed without cancellation. The interval is split at the
/// midpoint and each singular half is mapped by x − a = t^{1/(ea+1)}.
pub fn integrate_singular<F: FnMut(f64, f64, f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    ea: f64,
    eb: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    assert!(ea > -1.0 && eb > -1.0, "endpoint exponents must exceed -1");
    let len = b - a;
    let half = 0.5 * len;
    let sub = QuadConfig {
        abs_tol: 0.5 * cfg.abs_tol,
        ..*cfg
    };
    let left = if needs_substitution(ea) {
        let p = 1.0 / (ea + 1.0);
        let t_max = half.powf(ea + 1.0);
        integrate(
            |t| {
                let d = t.powf(p);
                f(a + d, d, len - d) * p * t.powf(p - 1.0)
            },
            0.0,
            t_max,
            &sub,
        )?
    } else {
        integrate(|x| f(x, x - a, b - x), a, a + half, &sub)?
    };
    let right = if needs_substitution(eb) {
        let p = 1.0 / (eb + 1.0);
        let t_max = half.powf(eb + 1.0);
        integrate(
            |t| {
                let d = t.powf(p);
                f(b - d, len - d, d) * p * t.powf(p - 1.0)
            },
            0.0,
            t_max,
            &sub,
        )?
    } else {
        integrate(|x| f(x, x - a, b - x), a + half, b, &sub)?
    };
    Ok(QuadResult {
        value: left.value + right.value,
        error: left.error + right.error,
        evaluations: left.evaluations + right.evaluations,
    })
}

/// Iterated integral of `f` over the box ∏[lo_i, hi_i] (innermost axis last).
/// Orientation follows the limits, so hi < lo gives a signed result.
pub fn integrate_box<F: Fn(&[f64]) -> f64>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    let mut x = vec![0.0; lo.len()];
    let mut evaluations = 0;
    let r = integrate_axis(f, lo, hi, cfg, 0, &mut x, &mut evaluations)?;
    Ok(QuadResult {
        evaluations,
        ..r
    })
}

fn integrate_axis<F: Fn(&[f64]) -> f64>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    cfg: &QuadConfig,
    axis: usize,
    x: &mut Vec<f64>,
    evaluations: &mut usize,
) -> Result<QuadResult, QuadError> {
    let dims = lo.len();
    if dims == 0 {
        *evaluations += 1;
        return Ok(QuadResult {
            value: f(&[]),
            error: 0.0,
            evaluations: 1,
        });
    }
    let mut failure: Option<QuadError> = None;
    let mut inner_err = 0.0f64;
    let inner_cfg = QuadConfig {
        abs_tol: cfg.abs_tol * 0.1,
        rel_tol: cfg.rel_tol * 0.1,
        ..*cfg
    };
    let r = integrate(
        |t| {
            x[axis] = t;
            if axis + 1 == dims {
                *evaluations += 1;
                f(x)
            } else {
                let mut xs = x.clone();
                match integrate_axis(f, lo, hi, &inner_cfg, axis + 1, &mut xs, evaluations) {
                    Ok(r) => {
                        inner_err = inner_err.max(r.error);
                        r.value
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            }
        },
        lo[axis],
        hi[axis],
        cfg,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(QuadResult {
        value: r.value,
        error: r.error + inner_err * (hi[axis] - lo[axis]).abs(),
        evaluations: r.evaluations,
    })
}
