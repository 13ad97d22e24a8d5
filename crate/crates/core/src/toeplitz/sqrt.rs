use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

use super::LaurentSymbol;

/// Maximum number of times the sample count is doubled.
pub const MAX_DOUBLINGS: u32 = 12;

const IMAG_TOL: f64 = 1e-10;

/// Solve `a = 2g - g^2` for `g`, i.e. `1 - g = sqrt(1 - a)` on the unit circle.
///
/// Samples `1 - a` at the `N`-th roots of unity, takes the principal square
/// root pointwise and interpolates back. `N` starts at the power of two at or
/// above `4 * width(a)` and doubles until the coefficient mass beyond
/// `|k| > N/4` drops below `tol` and the re-expansion `2g - g^2` matches `a`
/// within `10 * tol` in Wiener norm. Coefficients at both ends are then
/// trimmed while their accumulated mass stays under `tol / 2`.
pub fn symbol_sqrt(a: &LaurentSymbol, tol: f64) -> Result<LaurentSymbol> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tol must be positive, got {tol}"
        )));
    }
    if !a.is_nonneg() {
        return Err(Error::InvalidInput(
            "symbol coefficients must be nonnegative".into(),
        ));
    }
    if a.wiener_norm() >= 1.0 {
        return Err(Error::InvalidInput("symbol Wiener norm must be < 1".into()));
    }
    if a.is_zero() {
        return Ok(LaurentSymbol::zero());
    }

    let mut planner = FftPlanner::<f64>::new();
    let start = (4 * a.width()).max(8).next_power_of_two();
    let mut last_tail = f64::INFINITY;
    for doubling in 0..=MAX_DOUBLINGS {
        let n = start << doubling;
        let coeffs = interpolate(a, n, &mut planner)?;
        // coeffs[j] holds the coefficient of z^(j - n/2).
        let half = n / 2;
        let quarter = n / 4;
        let tail: f64 = coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| (*j as i64 - half as i64).unsigned_abs() as usize > quarter)
            .map(|(_, c)| c.abs())
            .sum();
        last_tail = tail;
        if tail >= tol {
            continue;
        }
        let g = trim(
            &coeffs[half - quarter..=half + quarter],
            -(quarter as i64),
            tol / 2.0,
        );
        if reexpansion_error(a, &g, &mut planner) <= 10.0 * tol {
            return Ok(g);
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "symbol_sqrt: tail mass {last_tail:.3e} still above {tol:.3e} after {MAX_DOUBLINGS} doublings"
    )))
}

/// Coefficients of `1 - sqrt(1 - a)` from `n` samples, indexed from `-n/2`.
fn interpolate(a: &LaurentSymbol, n: usize, planner: &mut FftPlanner<f64>) -> Result<Vec<f64>> {
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for (k, &c) in (a.lo()..=a.hi()).zip(a.coeffs()) {
        buf[k.rem_euclid(n as i64) as usize].re += c;
    }
    // Unnormalized inverse DFT evaluates a(w_j) = sum_k a_k w_j^k.
    planner.plan_fft_inverse(n).process(&mut buf);
    for s in buf.iter_mut() {
        *s = Complex::new(1.0, 0.0) - (Complex::new(1.0, 0.0) - *s).sqrt();
    }
    planner.plan_fft_forward(n).process(&mut buf);

    let scale = 1.0 / n as f64;
    let max_imag = buf.iter().map(|c| (c.im * scale).abs()).fold(0.0, f64::max);
    if max_imag >= IMAG_TOL {
        return Err(Error::ConvergenceFailure(format!(
            "symbol_sqrt: interpolated coefficients have imaginary part {max_imag:.3e}"
        )));
    }
    let half = n / 2;
    Ok((0..n).map(|j| buf[(j + n - half) % n].re * scale).collect())
}

fn trim(coeffs: &[f64], lo: i64, budget: f64) -> LaurentSymbol {
    let mut start = 0;
    let mut end = coeffs.len();
    let mut dropped = 0.0;
    while start < end && dropped + coeffs[start].abs() <= budget {
        dropped += coeffs[start].abs();
        start += 1;
    }
    while end > start && dropped + coeffs[end - 1].abs() <= budget {
        dropped += coeffs[end - 1].abs();
        end -= 1;
    }
    if start == end {
        return LaurentSymbol::zero();
    }
    let mut lo = lo + start as i64;
    let mut kept = coeffs[start..end].to_vec();
    if lo > 0 {
        let mut padded = vec![0.0; lo as usize];
        padded.extend(kept);
        kept = padded;
        lo = 0;
    }
    LaurentSymbol::from_parts(lo, kept)
}

/// `||2g - g^2 - a||_W`, with `g^2` formed by FFT convolution.
fn reexpansion_error(a: &LaurentSymbol, g: &LaurentSymbol, planner: &mut FftPlanner<f64>) -> f64 {
    let len = 2 * g.width() - 1;
    let n = len.next_power_of_two();
    let mut buf: Vec<Complex<f64>> = g.coeffs().iter().map(|&c| Complex::new(c, 0.0)).collect();
    buf.resize(n, Complex::new(0.0, 0.0));
    planner.plan_fft_forward(n).process(&mut buf);
    for s in buf.iter_mut() {
        *s = *s * *s;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let sq_lo = 2 * g.lo();
    let lo = sq_lo.min(a.lo());
    let hi = (sq_lo + len as i64 - 1).max(a.hi());
    (lo..=hi)
        .map(|k| {
            let idx = k - sq_lo;
            let sq = if idx >= 0 && (idx as usize) < len {
                buf[idx as usize].re * scale
            } else {
                0.0
            };
            (2.0 * g.coeff(k) - sq - a.coeff(k)).abs()
        })
        .sum()
}
