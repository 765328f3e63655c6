//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::real::Real;

// Kronrod abscissae, outermost first; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_478,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Stopping rule: stop once the error estimate is below `max(abs, rel · |I|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
    pub max_subdivisions: usize,
}

impl<T: Real> Tolerance<T> {
    pub fn new(abs: f64, rel: f64, max_subdivisions: usize) -> Self {
        Self {
            abs: T::lit(abs),
            rel: T::lit(rel),
            max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
    pub subdivisions: usize,
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
fn kronrod21<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Result<(T, T)> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut res_k = fc * T::lit(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return Err(Error::domain("quadrature", format!("integrand not finite on [{a}, {b}]")));
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half_len.abs();
    let value = res_k * half_len;
    res_abs = res_abs * scale;
    res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && err != T::zero() {
        let r = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if r < T::one() { res_asc * r } else { res_asc };
    }
    let eps50 = T::lit(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / eps50 {
        err = err.max(eps50 * res_abs);
    }
    Ok((value, err))
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(f: F, a: T, b: T, tol: Tolerance<T>) -> Result<Integral<T>> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the panels
/// delimited by `points` (which must be sorted and have at least two entries).
pub fn integrate_with_breaks<T: Real, F: FnMut(T) -> T>(
    f: F,
    points: &[T],
    tol: Tolerance<T>,
) -> Result<Integral<T>> {
    let (integral, converged) = adaptive(f, points, tol)?;
    if converged {
        Ok(integral)
    } else {
        Err(Error::Quadrature {
            subdivisions: integral.subdivisions,
            estimate: integral.value.as_f64(),
            error: integral.error.as_f64(),
        })
    }
}

/// Like [`integrate_with_breaks`] but hands back the best estimate together with
/// a convergence flag instead of failing.
pub(crate) fn adaptive<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    points: &[T],
    tol: Tolerance<T>,
) -> Result<(Integral<T>, bool)> {
    if points.len() < 2 {
        return Err(Error::domain("quadrature", "need at least two break points"));
    }
    if points.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::domain("quadrature", "break points must be sorted"));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (value, error) = kronrod21(&mut f, w[0], w[1])?;
        evaluations += 21;
        heap.push(Segment { a: w[0], b: w[1], value, error });
    }
    let mut subdivisions = heap.len();
    loop {
        let value: T = heap.iter().map(|s| s.value).sum();
        let error: T = heap.iter().map(|s| s.error).sum();
        let done = Integral {
            value,
            error,
            evaluations,
            subdivisions,
        };
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok((done, true));
        }
        let Some(worst) = heap.pop() else {
            return Ok((done, true));
        };
        let mid = T::lit(0.5) * (worst.a + worst.b);
        let narrow = !(worst.a < mid && mid < worst.b);
        if subdivisions >= tol.max_subdivisions || narrow {
            return Ok((done, false));
        }
        let (v1, e1) = kronrod21(&mut f, worst.a, mid)?;
        let (v2, e2) = kronrod21(&mut f, mid, worst.b)?;
        evaluations += 42;
        subdivisions += 1;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }
}
