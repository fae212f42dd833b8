//! Fixed-step scalar integration and dense output.

/// Classical fourth-order Runge–Kutta for `y' = f(t, y)` on `[t0, t0 + n h]`.
/// Returns the `n + 1` samples including the initial value.
pub fn rk4<F: Fn(f64, f64) -> f64>(f: F, t0: f64, y0: f64, h: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut y = y0;
    out.push(y);
    for k in 0..n {
        let t = t0 + k as f64 * h;
        let k1 = f(t, y);
        let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push(y);
    }
    out
}

/// Uniformly sampled scalar function with derivative samples, evaluated by
/// cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct HermiteSamples {
    pub t0: f64,
    pub h: f64,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl HermiteSamples {
    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.values.len() - 1;
        let s = ((t - self.t0) / self.h).clamp(0.0, n as f64);
        let i = (s.floor() as usize).min(n - 1);
        (i, s - i as f64)
    }

    pub fn value(&self, t: f64) -> f64 {
        let (i, s) = self.locate(t);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.h, self.slopes[i + 1] * self.h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let (i, s) = self.locate(t);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.h, self.slopes[i + 1] * self.h);
        let s2 = s * s;
        ((6.0 * s2 - 6.0 * s) * y0 + (3.0 * s2 - 4.0 * s + 1.0) * m0 + (-6.0 * s2 + 6.0 * s) * y1 + (3.0 * s2 - 2.0 * s) * m1)
            / self.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_exponential() {
        let ys = rk4(|_, y| -0.7 * y, 0.0, 1.0, 0.01, 200);
        assert!((ys[200] - (-1.4f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn hermite_reproduces_cubic() {
        let f = |t: f64| t * t * t - 2.0 * t;
        let df = |t: f64| 3.0 * t * t - 2.0;
        let h = 0.25;
        let ts: Vec<f64> = (0..=8).map(|i| i as f64 * h).collect();
        let s = HermiteSamples {
            t0: 0.0,
            h,
            values: ts.iter().map(|&t| f(t)).collect(),
            slopes: ts.iter().map(|&t| df(t)).collect(),
        };
        for t in [0.1, 0.77, 1.3, 1.99] {
            assert!((s.value(t) - f(t)).abs() < 1e-13);
            assert!((s.derivative(t) - df(t)).abs() < 1e-12);
        }
    }
}
