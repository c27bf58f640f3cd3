//! Formants from the roots of a linear-prediction polynomial.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectral::hamming;
use super::FeatureError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Formant {
    pub frequency_hz: f64,
    pub amplitude: f64,
    pub bandwidth_hz: f64,
}

/// Formants ordered by ascending frequency; always at least two.
#[derive(Debug, Clone, PartialEq)]
pub struct FormantSet {
    formants: Vec<Formant>,
}

impl FormantSet {
    pub fn formants(&self) -> &[Formant] {
        &self.formants
    }

    pub fn first(&self) -> Formant {
        self.formants[0]
    }

    pub fn second(&self) -> Formant {
        self.formants[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormantConfig {
    pub pre_emphasis: f64,
    pub max_bandwidth_hz: f64,
}

impl Default for FormantConfig {
    fn default() -> Self {
        Self {
            pre_emphasis: 0.97,
            max_bandwidth_hz: 400.0,
        }
    }
}

/// Prediction-error filter `A(z) = 1 + Σ a_k z⁻ᵏ` and its residual power.
#[derive(Debug, Clone)]
pub struct Lpc {
    /// `[1, a_1, …, a_p]`
    pub coefficients: Vec<f64>,
    pub error_power: f64,
}

impl Lpc {
    /// Autocorrelation method solved by Levinson-Durbin recursion.
    pub fn fit(signal: &[f64], order: usize) -> Option<Self> {
        if signal.len() <= order {
            return None;
        }
        let r: Vec<f64> = (0..=order)
            .map(|k| signal[..signal.len() - k].iter().zip(&signal[k..]).map(|(a, b)| a * b).sum())
            .collect();
        if !(r[0] > 0.0) {
            return None;
        }
        let mut a = vec![0.0; order + 1];
        a[0] = 1.0;
        let mut err = r[0];
        for i in 1..=order {
            let acc: f64 = (1..i).map(|j| a[j] * r[i - j]).sum::<f64>() + r[i];
            let k = -acc / err;
            let prev = a.clone();
            for j in 1..i {
                a[j] = prev[j] + k * prev[i - j];
            }
            a[i] = k;
            err *= 1.0 - k * k;
            if !(err > 0.0) {
                return None;
            }
        }
        Some(Self {
            coefficients: a,
            error_power: err,
        })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `|A(e^{jω})|` at normalized angular frequency `omega`.
    pub fn inverse_gain(&self, omega: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, &a)| Complex64::from_polar(a, -omega * k as f64))
            .sum::<Complex64>()
            .norm()
    }

    /// Magnitude of the all-pole model spectrum `sqrt(E)/|A|`.
    pub fn envelope(&self, omega: f64) -> f64 {
        self.error_power.sqrt() / self.inverse_gain(omega)
    }
}

fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of a real polynomial given highest degree first, by Aberth-Ehrlich
/// simultaneous iteration.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let start = coeffs.iter().position(|&c| c != 0.0).unwrap_or(coeffs.len());
    let coeffs = &coeffs[start..];
    if coeffs.len() < 2 {
        return Vec::new();
    }
    let mut trailing = coeffs.len();
    while trailing > 1 && coeffs[trailing - 1] == 0.0 {
        trailing -= 1;
    }
    let zeros_at_origin = coeffs.len() - trailing;
    let lead = coeffs[0];
    let monic: Vec<f64> = coeffs[..trailing].iter().map(|c| c / lead).collect();
    let n = monic.len() - 1;

    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    if n == 0 {
        return roots;
    }
    // start on a circle of radius = geometric mean of root moduli
    let radius = monic[n].abs().powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();

    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = eval_with_derivative(&monic, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = newton / (Complex64::new(1.0, 0.0) - newton * repulsion);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    roots.extend(z);
    roots
}

pub fn pre_emphasize(frame: &[f64], coefficient: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(frame.len());
    let mut prev = 0.0;
    for &x in frame {
        out.push(x - coefficient * prev);
        prev = x;
    }
    out
}

/// LPC order used for formant analysis: two plus one per kHz of sample rate.
pub fn formant_lpc_order(sample_rate_hz: u32) -> usize {
    2 + (sample_rate_hz / 1000) as usize
}

/// Resonances of the vocal-tract model fitted to one frame.
///
/// The frame is pre-emphasized and Hamming-windowed, then complex LPC roots with bandwidth
/// under the configured limit become formants.
pub fn formants(frame: &[f64], sample_rate_hz: u32, cfg: &FormantConfig) -> Result<FormantSet, FeatureError> {
    let fs = f64::from(sample_rate_hz);
    let emphasized = pre_emphasize(frame, cfg.pre_emphasis);
    let windowed: Vec<f64> = emphasized
        .iter()
        .zip(hamming(frame.len()))
        .map(|(x, w)| x * w)
        .collect();
    let lpc = Lpc::fit(&windowed, formant_lpc_order(sample_rate_hz)).ok_or(FeatureError::NoFormantsFound)?;

    let mut found: Vec<Formant> = polynomial_roots(&lpc.coefficients)
        .into_iter()
        .filter(|r| r.im > 1e-12)
        .filter_map(|r| {
            let omega = r.arg();
            let frequency_hz = omega * fs / (2.0 * PI);
            let bandwidth_hz = -fs / PI * r.norm().ln();
            let ok = frequency_hz > 0.0
                && frequency_hz < fs / 2.0
                && bandwidth_hz > 0.0
                && bandwidth_hz < cfg.max_bandwidth_hz;
            ok.then(|| Formant {
                frequency_hz,
                amplitude: lpc.envelope(omega),
                bandwidth_hz,
            })
        })
        .collect();
    if found.len() < 2 {
        return Err(FeatureError::NoFormantsFound);
    }
    found.sort_by(|a, b| a.frequency_hz.total_cmp(&b.frequency_hz));
    Ok(FormantSet { formants: found })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_known_quadratic_and_cubic() {
        // (z - 2)(z + 3) = z² + z - 6
        let mut r = polynomial_roots(&[1.0, 1.0, -6.0]);
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] - Complex64::new(-3.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        // z³ - 1 has the three cube roots of unity
        let r = polynomial_roots(&[1.0, 0.0, 0.0, -1.0]);
        assert_eq!(r.len(), 3);
        for z in r {
            assert!((z.powu(3) - 1.0).norm() < 1e-12);
        }
        // z(z - 1)
        let r = polynomial_roots(&[2.0, -2.0, 0.0]);
        assert_eq!(r.len(), 2);
        assert!(r.iter().any(|z| z.norm() < 1e-15));
    }

    #[test]
    fn levinson_recovers_ar2() {
        // x[n] = 1.2 x[n-1] - 0.5 x[n-2] + e[n], long deterministic pseudo-noise drive
        let mut state = 12345u64;
        let mut x = vec![0.0; 20000];
        for n in 2..x.len() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let e = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            x[n] = 1.2 * x[n - 1] - 0.5 * x[n - 2] + e;
        }
        let lpc = Lpc::fit(&x, 2).unwrap();
        assert!((lpc.coefficients[1] + 1.2).abs() < 0.02);
        assert!((lpc.coefficients[2] - 0.5).abs() < 0.02);
    }

    #[test]
    fn silent_frame_has_no_formants() {
        assert!(matches!(
            formants(&[0.0; 400], 16000, &FormantConfig::default()),
            Err(FeatureError::NoFormantsFound)
        ));
    }
}
