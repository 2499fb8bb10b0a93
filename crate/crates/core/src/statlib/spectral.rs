use std::f64::consts::PI;

/// Fourier coefficients of a signal sampled on the symmetric eFAST grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    /// `cos` amplitudes; index `w - 1` holds frequency `w`.
    pub a: Vec<f64>,
    /// `sin` amplitudes, same indexing.
    pub b: Vec<f64>,
}

impl Periodogram {
    pub fn max_frequency(&self) -> usize {
        self.a.len()
    }

    /// `(A_w^2 + B_w^2) / 2`, the variance carried by frequency `w >= 1`.
    pub fn power(&self, w: usize) -> f64 {
        if w == 0 || w > self.a.len() {
            return 0.0;
        }
        let (a, b) = (self.a[w - 1], self.b[w - 1]);
        0.5 * (a * a + b * b)
    }

    pub fn total_power(&self) -> f64 {
        (1..=self.max_frequency()).map(|w| self.power(w)).sum()
    }
}

/// Grid point `s_t = pi (2t + 1 - n) / n`, spanning `(-pi, pi)`.
pub fn search_grid(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..n)
        .map(|t| PI * (2.0 * t as f64 + 1.0 - nf) / nf)
        .collect()
}

/// Direct-sum periodogram for frequencies `1..=(n-1)/2`.
///
/// Returns an empty periodogram when `n < 3`.
pub fn periodogram(signal: &[f64]) -> Periodogram {
    let n = signal.len();
    if n < 3 {
        return Periodogram { a: Vec::new(), b: Vec::new() };
    }
    let grid = search_grid(n);
    let top = (n - 1) / 2;
    let scale = 2.0 / n as f64;
    let mut a = Vec::with_capacity(top);
    let mut b = Vec::with_capacity(top);
    for w in 1..=top {
        let wf = w as f64;
        let (mut sa, mut sb) = (0.0, 0.0);
        for (y, s) in signal.iter().zip(&grid) {
            let (sin, cos) = (wf * s).sin_cos();
            sa += y * cos;
            sb += y * sin;
        }
        a.push(scale * sa);
        b.push(scale * sb);
    }
    Periodogram { a, b }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_only(p: &Periodogram, w: usize, a: f64, b: f64) {
        for k in 1..=p.max_frequency() {
            let (ea, eb) = if k == w { (a, b) } else { (0.0, 0.0) };
            assert!((p.a[k - 1] - ea).abs() < 1e-9, "A_{k} = {}", p.a[k - 1]);
            assert!((p.b[k - 1] - eb).abs() < 1e-9, "B_{k} = {}", p.b[k - 1]);
        }
    }

    #[test]
    fn cosine_lands_on_its_frequency() {
        let s = search_grid(65);
        let y: Vec<f64> = s.iter().map(|s| (3.0 * s).cos()).collect();
        assert_only(&periodogram(&y), 3, 1.0, 0.0);
    }

    #[test]
    fn sine_lands_on_its_frequency() {
        let s = search_grid(101);
        let y: Vec<f64> = s.iter().map(|s| 2.0 * (5.0 * s).sin()).collect();
        assert_only(&periodogram(&y), 5, 0.0, 2.0);
    }

    #[test]
    fn constant_has_no_power() {
        let p = periodogram(&[4.2; 33]);
        assert_eq!(p.max_frequency(), 16);
        assert!(p.total_power() < 1e-20);
    }

    #[test]
    fn grid_is_symmetric_open_interval() {
        let s = search_grid(7);
        assert_eq!(s.len(), 7);
        assert!(s[3].abs() < 1e-15);
        assert!(s[0] > -PI && s[6] < PI);
        assert!((s[0] + s[6]).abs() < 1e-15);
    }
}
