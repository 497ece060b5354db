//! Interpolation helpers shared by the catalog, profiles and correlation code.

/// Piecewise-linear interpolation through sorted `(x, y)` rows, holding the
/// end values outside the tabulated range.
pub fn linear_clamped(rows: &[(f64, f64)], x: f64) -> f64 {
    match rows {
        [] => f64::NAN,
        [(_, y)] => *y,
        _ => {
            let (x0, y0) = rows[0];
            let (xn, yn) = rows[rows.len() - 1];
            if x <= x0 {
                return y0;
            }
            if x >= xn {
                return yn;
            }
            let i = rows.partition_point(|(xi, _)| *xi <= x);
            let (xa, ya) = rows[i - 1];
            let (xb, yb) = rows[i];
            ya + (yb - ya) * (x - xa) / (xb - xa)
        }
    }
}

/// Natural cubic spline through samples on a uniform grid.
#[derive(Debug, Clone)]
pub struct UniformCubicSpline {
    x0: f64,
    dx: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl UniformCubicSpline {
    pub fn new(x0: f64, dx: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        let mut m = vec![0.0; n];
        if n >= 3 {
            // Tridiagonal system for second derivatives with m_0 = m_{n-1} = 0.
            let k = n - 2;
            let mut c_prime = vec![0.0; k];
            let mut d_prime = vec![0.0; k];
            for i in 0..k {
                let rhs = 6.0 * (y[i + 2] - 2.0 * y[i + 1] + y[i]) / (dx * dx);
                let (a, b, c) = (1.0, 4.0, 1.0);
                if i == 0 {
                    c_prime[i] = c / b;
                    d_prime[i] = rhs / b;
                } else {
                    let denom = b - a * c_prime[i - 1];
                    c_prime[i] = c / denom;
                    d_prime[i] = (rhs - a * d_prime[i - 1]) / denom;
                }
            }
            for i in (0..k).rev() {
                let next = if i + 1 < k { m[i + 2] } else { 0.0 };
                m[i + 1] = d_prime[i] - c_prime[i] * next;
            }
        }
        UniformCubicSpline { x0, dx, y, m }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x0, self.x0 + self.dx * (self.y.len().saturating_sub(1)) as f64)
    }

    /// Value at `x`; `None` outside the sampled domain.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let n = self.y.len();
        let (lo, hi) = self.domain();
        let slack = 1e-12 * self.dx.abs();
        if n == 0 || x < lo - slack || x > hi + slack {
            return None;
        }
        if n == 1 {
            return Some(self.y[0]);
        }
        let t = ((x - self.x0) / self.dx).clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).min(n - 2);
        let u = t - i as f64;
        if u == 0.0 {
            return Some(self.y[i]);
        }
        let h2 = self.dx * self.dx;
        let a = 1.0 - u;
        let value = a * self.y[i]
            + u * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (u * u * u - u) * self.m[i + 1]) * h2 / 6.0;
        Some(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_nodes_and_lines() {
        let y: Vec<f64> = (0..11).map(|i| 2.0 * i as f64 + 1.0).collect();
        let s = UniformCubicSpline::new(0.0, 0.5, y);
        assert_eq!(s.eval(1.0), Some(5.0));
        assert!((s.eval(1.23).unwrap() - (2.0 * 2.46 + 1.0)).abs() < 1e-12);
        assert_eq!(s.eval(-0.1), None);
    }

    #[test]
    fn spline_accuracy_on_smooth_function() {
        let dx = 0.01;
        let y: Vec<f64> = (0..=400).map(|i| (i as f64 * dx).sin()).collect();
        let s = UniformCubicSpline::new(0.0, dx, y);
        for x in [0.5, 1.234, 2.5, 3.77] {
            assert!((s.eval(x).unwrap() - f64::sin(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn linear_table() {
        let rows = [(0.0, 0.0), (1.0, 10.0), (3.0, 30.0)];
        assert_eq!(linear_clamped(&rows, 2.0), 20.0);
        assert_eq!(linear_clamped(&rows, 1.0), 10.0);
        assert_eq!(linear_clamped(&rows, 5.0), 30.0);
    }
}
