//! Radix-2 FFT, periodic and zero-padded aperiodic convolution, and the
//! `O(N log N)` evaluator for the quadratic Caputo scheme.

use crate::error::{Error, Result};
use crate::grid::SampledSeries;
use crate::quadrature::{build_power_table, quadratic_coefficients, PowerTable};
use crate::specfun::gamma_fn;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Complex sequence regarded as `P`-periodic; index arithmetic is modulo `P`.
#[derive(Debug, Clone)]
pub struct PeriodicSequence {
    pub values: Vec<Complex64>,
}

impl PeriodicSequence {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("period must be at least 1".into()));
        }
        Ok(Self { values })
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }
}

/// Iterative radix-2 decimation-in-time FFT with a precomputed twiddle table.
struct Radix2Fft {
    len: usize,
    // Twiddles e^{-2 pi i k / len} for 0 <= k < len/2.
    twiddles: Vec<Complex64>,
}

impl Radix2Fft {
    fn new(len: usize) -> Self {
        debug_assert!(len.is_power_of_two());
        let twiddles = (0..len / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
            .collect();
        Self { len, twiddles }
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.len;
        debug_assert_eq!(buf.len(), n);
        // Bit-reversal permutation.
        let mut j = 0usize;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let even = buf[start + k];
                    let odd = buf[start + k + half] * w;
                    buf[start + k] = even + odd;
                    buf[start + k + half] = even - odd;
                }
            }
            size <<= 1;
        }
        if inverse {
            let scale = 1.0 / n as f64;
            for v in buf.iter_mut() {
                *v *= scale;
            }
        }
    }
}

fn dft_direct(values: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let p = values.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut out = Vec::with_capacity(p);
    for k in 0..p {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &a) in values.iter().enumerate() {
            acc += a * Complex64::from_polar(1.0, sign * 2.0 * PI * (j * k % p) as f64 / p as f64);
        }
        out.push(if inverse { acc / p as f64 } else { acc });
    }
    out
}

/// Discrete Fourier transform; fast path on power-of-two lengths,
/// direct `O(P^2)` evaluation otherwise.
pub fn dft(values: &[Complex64]) -> Vec<Complex64> {
    if values.len().is_power_of_two() {
        let mut buf = values.to_vec();
        Radix2Fft::new(values.len()).transform(&mut buf, false);
        buf
    } else {
        dft_direct(values, false)
    }
}

/// Inverse discrete Fourier transform, `idft(dft(x)) = x`.
pub fn idft(values: &[Complex64]) -> Vec<Complex64> {
    if values.len().is_power_of_two() {
        let mut buf = values.to_vec();
        Radix2Fft::new(values.len()).transform(&mut buf, true);
        buf
    } else {
        dft_direct(values, true)
    }
}

/// Circular convolution of two `P`-periodic sequences via the discrete
/// convolution theorem.
pub fn periodic_convolve(a: &PeriodicSequence, b: &PeriodicSequence) -> Result<PeriodicSequence> {
    if a.period() != b.period() {
        return Err(Error::InvalidArgument(format!(
            "period mismatch: {} vs {}",
            a.period(),
            b.period()
        )));
    }
    let fa = dft(&a.values);
    let fb = dft(&b.values);
    let prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(&x, &y)| x * y).collect();
    PeriodicSequence::new(idft(&prod))
}

/// Kernel values `b_{-M+1} .. b_{M-1}` for an aperiodic convolution of length `M`.
#[derive(Debug, Clone)]
pub struct KernelLookup {
    m: usize,
    // values[i] = b_{i - (M-1)}
    values: Vec<f64>,
}

impl KernelLookup {
    pub fn new(m: usize, values: Vec<f64>) -> Result<Self> {
        if m == 0 || values.len() != 2 * m - 1 {
            return Err(Error::InvalidArgument(format!(
                "kernel lookup for M = {m} needs 2M-1 values, got {}",
                values.len()
            )));
        }
        Ok(Self { m, values })
    }

    /// `b_j` for `-M+1 <= j <= M-1`.
    pub fn get(&self, j: isize) -> f64 {
        self.values[(j + self.m as isize - 1) as usize]
    }
}

fn padded_period(m: usize) -> usize {
    (2 * m - 1).next_power_of_two()
}

/// `sum_{l=0}^{M-1} a_l b_{j-l}` for `0 <= j <= M-1`, computed through the
/// zero-padded periodic embedding; padded entries with index `>= M` are
/// discarded.
pub fn aperiodic_convolve(a: &[f64], b: &KernelLookup) -> Result<Vec<f64>> {
    let m = a.len();
    if m == 0 {
        return Err(Error::InvalidArgument("empty input sequence".into()));
    }
    if b.m != m {
        return Err(Error::InvalidArgument(format!(
            "kernel built for M = {}, input has M = {m}",
            b.m
        )));
    }
    let p = padded_period(m);
    let mut pa = vec![Complex64::new(0.0, 0.0); p];
    let mut pb = vec![Complex64::new(0.0, 0.0); p];
    for (j, &v) in a.iter().enumerate() {
        pa[j] = Complex64::new(v, 0.0);
    }
    // Nonnegative kernel indices in place, negative ones wrapped to the tail.
    for j in 0..m {
        pb[j] = Complex64::new(b.get(j as isize), 0.0);
    }
    for j in 1..m {
        pb[p - j] = Complex64::new(b.get(-(j as isize)), 0.0);
    }
    let fa = dft(&pa);
    let fb = dft(&pb);
    let prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(&x, &y)| x * y).collect();
    let full = idft(&prod);
    Ok(full[..m].iter().map(|v| v.re).collect())
}

/// Reusable fast-evaluation plan: padded FFT size and the three kernel
/// spectra, which depend only on `(alpha, N)`.
pub struct ConvolutionPlan {
    alpha: f64,
    n: usize,
    p: usize,
    fft: Radix2Fft,
    table: PowerTable,
    spec_b1: Vec<Complex64>,
    spec_b2: Vec<Complex64>,
    spec_b3: Vec<Complex64>,
}

impl ConvolutionPlan {
    pub fn new(alpha: f64, n: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "fractional order must lie strictly in (0,1), got {alpha}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidArgument("plan needs N >= 2".into()));
        }
        let m = n - 1;
        let p = padded_period(m);
        let fft = Radix2Fft::new(p);
        let table = build_power_table(alpha, n);
        // Kernels: b1_j = (j+1)^{2-a} - j^{2-a}, b2_j = (j+1)^{1-a}, b3_j = j^{1-a},
        // for 0 <= j <= N-2, zero-padded to P.
        let mut b1 = vec![Complex64::new(0.0, 0.0); p];
        let mut b2 = vec![Complex64::new(0.0, 0.0); p];
        let mut b3 = vec![Complex64::new(0.0, 0.0); p];
        for j in 0..m {
            b1[j] = Complex64::new(table.p2[j + 1] - table.p2[j], 0.0);
            b2[j] = Complex64::new(table.p1[j + 1], 0.0);
            b3[j] = Complex64::new(table.p1[j], 0.0);
        }
        fft.transform(&mut b1, false);
        fft.transform(&mut b2, false);
        fft.transform(&mut b3, false);
        Ok(Self {
            alpha,
            n,
            p,
            fft,
            table,
            spec_b1: b1,
            spec_b2: b2,
            spec_b3: b3,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn padded_period(&self) -> usize {
        self.p
    }
}

/// Fast-convolution evaluation of the quadratic Caputo scheme; agrees with
/// the direct quadrature entrywise up to roundoff, at `O(N log N)` cost.
pub fn caputo_fast(series: &SampledSeries, alpha: f64, plan: &ConvolutionPlan) -> Result<Vec<f64>> {
    let n = series.grid.n();
    if plan.n != n || plan.alpha != alpha {
        return Err(Error::InvalidArgument(format!(
            "plan built for (alpha, N) = ({}, {}), called with ({alpha}, {n})",
            plan.alpha, plan.n
        )));
    }
    let m = n - 1;
    let p = plan.p;
    let (c1, c2, c3) = quadratic_coefficients(&series.values, alpha);

    let mut a1 = vec![Complex64::new(0.0, 0.0); p];
    let mut a2 = vec![Complex64::new(0.0, 0.0); p];
    let mut a3 = vec![Complex64::new(0.0, 0.0); p];
    for j in 0..m {
        a1[j] = Complex64::new(c1[j], 0.0);
        a2[j] = Complex64::new(c2[j], 0.0);
        a3[j] = Complex64::new(-c3[j], 0.0);
    }
    plan.fft.transform(&mut a1, false);
    plan.fft.transform(&mut a2, false);
    plan.fft.transform(&mut a3, false);

    // One inverse transform of the summed spectra recovers all three
    // convolutions at once.
    let mut acc = vec![Complex64::new(0.0, 0.0); p];
    for k in 0..p {
        acc[k] = a1[k] * plan.spec_b1[k] + a2[k] * plan.spec_b2[k] + a3[k] * plan.spec_b3[k];
    }
    plan.fft.transform(&mut acc, true);

    let table = &plan.table;
    let scale = series.grid.h().powf(-alpha) / gamma_fn(2.0 - alpha)?;
    let (f0, f1, f2) = (series.values[0], series.values[1], series.values[2]);
    let mut out = vec![0.0; n + 1];
    out[1] = scale
        * ((f2 - 2.0 * f1 + f0) / (2.0 - alpha) - (f2 - 4.0 * f1 + 3.0 * f0) / 2.0);
    for j in 2..=n {
        let head = (f2 - 2.0 * f1 + f0) / (2.0 - alpha) * (table.p2[j] - table.p2[j - 1])
            - (f2 - 4.0 * f1 + 3.0 * f0) / 2.0 * table.p1[j]
            - (f2 - f0) / 2.0 * table.p1[j - 1];
        out[j] = scale * (head + acc[j - 2].re);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_time_grid;
    use crate::quadrature::caputo_quadratic;
    use rand::{Rng, SeedableRng};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn dft_known_values() {
        let out = dft(&[c(1.0), c(1.0), c(1.0), c(1.0)]);
        assert!((out[0] - c(4.0)).norm() < 1e-12);
        for k in 1..4 {
            assert!(out[k].norm() < 1e-12);
        }
        let out = dft(&[c(1.0), c(0.0), c(0.0), c(0.0)]);
        for k in 0..4 {
            assert!((out[k] - c(1.0)).norm() < 1e-13);
        }
        let back = idft(&[c(4.0), c(0.0), c(0.0), c(0.0)]);
        for v in back {
            assert!((v - c(1.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn dft_matches_direct_sum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for &p in &[8usize, 16, 12, 5] {
            let x: Vec<Complex64> = (0..p)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let fast = dft(&x);
            let slow = dft_direct(&x, false);
            let scale = slow.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            for k in 0..p {
                assert!((fast[k] - slow[k]).norm() < 1e-12 * scale, "p={p}, k={k}");
            }
        }
    }

    #[test]
    fn roundtrip_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let x: Vec<Complex64> = (0..64)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let back = idft(&dft(&x));
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).norm() < 1e-13);
        }
        let zeros = vec![c(0.0); 8];
        assert!(idft(&dft(&zeros)).iter().all(|v| v.norm() == 0.0));
    }

    fn periodic_convolve_direct(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let p = a.len();
        (0..p)
            .map(|j| {
                (0..p)
                    .map(|l| a[l] * b[(j + p - l % p) % p])
                    .sum::<Complex64>()
            })
            .collect()
    }

    #[test]
    fn periodic_convolution_examples() {
        // Delta is the convolution identity.
        let delta = PeriodicSequence::new(vec![c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        let b = PeriodicSequence::new(vec![c(2.0), c(-1.0), c(3.0), c(0.5)]).unwrap();
        let out = periodic_convolve(&delta, &b).unwrap();
        for (x, y) in out.values.iter().zip(&b.values) {
            assert!((x - y).norm() < 1e-13);
        }
        // Hand-expanded case.
        let a = PeriodicSequence::new(vec![c(1.0), c(2.0), c(0.0), c(0.0)]).unwrap();
        let b = PeriodicSequence::new(vec![c(3.0), c(4.0), c(0.0), c(0.0)]).unwrap();
        let out = periodic_convolve(&a, &b).unwrap();
        let expected = [3.0, 10.0, 8.0, 0.0];
        for (x, e) in out.values.iter().zip(expected) {
            assert!((x - c(e)).norm() < 1e-12);
        }
        // Period mismatch rejected.
        let short = PeriodicSequence::new(vec![c(1.0)]).unwrap();
        assert!(periodic_convolve(&a, &short).is_err());
    }

    #[test]
    fn periodic_convolution_matches_direct_sum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for &p in &[4usize, 16, 64, 1024] {
            let gen = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Complex64> {
                (0..p)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            };
            let av = gen(&mut rng);
            let bv = gen(&mut rng);
            let fast = periodic_convolve(
                &PeriodicSequence::new(av.clone()).unwrap(),
                &PeriodicSequence::new(bv.clone()).unwrap(),
            )
            .unwrap();
            let slow = periodic_convolve_direct(&av, &bv);
            let scale = slow.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            for k in 0..p {
                assert!((fast.values[k] - slow[k]).norm() < 1e-12 * scale, "p={p}");
            }
            // Convolution theorem restated on the spectra.
            let fa = dft(&av);
            let fb = dft(&bv);
            let fc = dft(&fast.values);
            for k in 0..p {
                assert!((fc[k] - fa[k] * fb[k]).norm() < 1e-11 * scale.max(1.0) * p as f64);
            }
        }
    }

    #[test]
    fn aperiodic_convolution_examples() {
        // M = 1.
        let b = KernelLookup::new(1, vec![2.0]).unwrap();
        assert_eq!(aperiodic_convolve(&[3.0], &b).unwrap(), vec![6.0]);
        // Hand expansion: j=0: a0 b0 + a1 b_{-1} = 2 + 5; j=1: a0 b1 + a1 b0 = 3 + 2.
        let b = KernelLookup::new(2, vec![5.0, 2.0, 3.0]).unwrap();
        let out = aperiodic_convolve(&[1.0, 1.0], &b).unwrap();
        assert!((out[0] - 7.0).abs() < 1e-12);
        assert!((out[1] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn aperiodic_convolution_matches_direct_sum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let m = 37usize;
        let a: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let kv: Vec<f64> = (0..2 * m - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let kernel = KernelLookup::new(m, kv).unwrap();
        let fast = aperiodic_convolve(&a, &kernel).unwrap();
        let mut scale = 0.0f64;
        let slow: Vec<f64> = (0..m)
            .map(|j| {
                (0..m)
                    .map(|l| a[l] * kernel.get(j as isize - l as isize))
                    .sum()
            })
            .collect();
        for v in &slow {
            scale = scale.max(v.abs());
        }
        for j in 0..m {
            assert!((fast[j] - slow[j]).abs() < 1e-12 * scale, "j={j}");
        }
    }

    #[test]
    fn fast_path_equals_direct_path() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        for &n in &[2usize, 3, 5, 17, 100, 1000] {
            let grid = build_time_grid(1.2, n).unwrap();
            let alpha = rng.gen_range(0.05..0.95);
            let series = grid.sample(|t| (2.0 * t).exp() + rng.gen_range(-0.1..0.1));
            let plan = ConvolutionPlan::new(alpha, n).unwrap();
            let fast = caputo_fast(&series, alpha, &plan).unwrap();
            let direct = caputo_quadratic(&series, alpha).unwrap();
            let scale = direct.iter().fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
            for j in 0..=n {
                assert!(
                    (fast[j] - direct[j]).abs() <= 1e-10 * scale,
                    "n={n}, alpha={alpha}, j={j}: {} vs {}",
                    fast[j],
                    direct[j]
                );
            }
        }
    }

    #[test]
    fn plan_reuse_is_deterministic() {
        let n = 64;
        let alpha = 0.37;
        let grid = build_time_grid(1.0, n).unwrap();
        let s1 = grid.sample(|t| (t * 3.0).sin() + 1.0);
        let s2 = grid.sample(|t| t * t - 0.5 * t);
        let shared = ConvolutionPlan::new(alpha, n).unwrap();
        let r1 = caputo_fast(&s1, alpha, &shared).unwrap();
        let r2 = caputo_fast(&s2, alpha, &shared).unwrap();
        let f1 = caputo_fast(&s1, alpha, &ConvolutionPlan::new(alpha, n).unwrap()).unwrap();
        let f2 = caputo_fast(&s2, alpha, &ConvolutionPlan::new(alpha, n).unwrap()).unwrap();
        assert_eq!(r1, f1);
        assert_eq!(r2, f2);
    }

    #[test]
    fn plan_mismatch_rejected() {
        let grid = build_time_grid(1.0, 8).unwrap();
        let s = grid.sample(|t| t);
        let plan = ConvolutionPlan::new(0.3, 16).unwrap();
        assert!(caputo_fast(&s, 0.3, &plan).is_err());
        let plan = ConvolutionPlan::new(0.4, 8).unwrap();
        assert!(caputo_fast(&s, 0.3, &plan).is_err());
    }

    #[test]
    fn padded_period_matches_reference_choice() {
        // P = 2^ceil(log2(2N-3))
        for &(n, expect) in &[(2usize, 1usize), (3, 4), (5, 8), (17, 32), (100, 256)] {
            assert_eq!(padded_period(n - 1), expect, "n={n}");
        }
    }
}
