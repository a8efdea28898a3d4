//! 3x3 matrices, characteristic polynomials and closed-form eigenvalues.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dense 3x3 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matrix3(pub [[f64; 3]; 3]);

impl Matrix3 {
    pub const IDENTITY: Matrix3 = Matrix3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Matrix3([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Sum of the three principal 2x2 minors.
    pub fn principal_minor_sum(&self) -> f64 {
        let m = &self.0;
        (m[0][0] * m[1][1] - m[0][1] * m[1][0])
            + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
            + (m[1][1] * m[2][2] - m[1][2] * m[2][1])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix3 {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.0[r][c]
    }
}

/// Coefficients of `det(M - lambda*I) = c3 lambda^3 + c2 lambda^2 + c1 lambda + c0`.
///
/// With this expansion `c3 = -1`, `c2 = trace(M)`, `c1` is minus the sum of
/// the principal 2x2 minors and `c0 = det(M)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPoly {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl CharPoly {
    pub fn coefficients(&self) -> [f64; 4] {
        [self.c3, self.c2, self.c1, self.c0]
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        ((z * self.c3 + self.c2) * z + self.c1) * z + self.c0
    }

    /// Magnitude of the largest term at `|z|`; used to judge residuals.
    pub fn term_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        (self.c3.abs() * r * r * r)
            .max(self.c2.abs() * r * r)
            .max(self.c1.abs() * r)
            .max(self.c0.abs())
    }
}

pub fn char_poly(m: &Matrix3) -> CharPoly {
    CharPoly {
        c3: -1.0,
        c2: m.trace(),
        c1: -m.principal_minor_sum(),
        c0: m.det(),
    }
}

/// Eigenvalues of `m` as the roots of its characteristic polynomial.
///
/// Roots come from the depressed cubic (Cardano when there is one real root,
/// the trigonometric form when all three are real) and are then polished by
/// a few Newton iterations. Complex roots form an exact conjugate pair. The
/// result is ordered by descending real part, then ascending imaginary part.
pub fn eigenvalues3(m: &Matrix3) -> [Complex64; 3] {
    let cp = char_poly(m);
    let mut roots = cubic_roots(&cp);
    sort_roots(&mut roots);
    roots
}

fn cubic_roots(cp: &CharPoly) -> [Complex64; 3] {
    // monic form lambda^3 + a2 lambda^2 + a1 lambda + a0
    let a2 = cp.c2 / cp.c3;
    let a1 = cp.c1 / cp.c3;
    let a0 = cp.c0 / cp.c3;
    let shift = a2 / 3.0;
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    let half_q = q / 2.0;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;

    if disc > 0.0 {
        let sq = disc.sqrt();
        // pick the sign that avoids cancellation
        let u = -(half_q.signum()) * (half_q.abs() + sq).cbrt();
        let v = if u == 0.0 { 0.0 } else { -third_p / u };
        let real = polish_real(cp, u + v - shift);
        let pair = Complex64::new(-(u + v) / 2.0 - shift, (3f64.sqrt() / 2.0) * (u - v).abs());
        let pair = polish_complex(cp, pair);
        if pair.im == 0.0 {
            // the pair collapsed onto the real axis during polishing
            return [Complex64::new(real, 0.0), pair, pair];
        }
        [Complex64::new(real, 0.0), pair, pair.conj()]
    } else {
        let xs = if third_p == 0.0 {
            [0.0; 3]
        } else {
            let r = 2.0 * (-third_p).sqrt();
            let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            [0, 1, 2].map(|k| r * (theta - 2.0 * PI * k as f64 / 3.0).cos())
        };
        xs.map(|x| Complex64::new(polish_real(cp, x - shift), 0.0))
    }
}

fn polish_real(cp: &CharPoly, x0: f64) -> f64 {
    let f = |x: f64| ((cp.c3 * x + cp.c2) * x + cp.c1) * x + cp.c0;
    let df = |x: f64| (3.0 * cp.c3 * x + 2.0 * cp.c2) * x + cp.c1;
    let mut x = x0;
    let mut fx = f(x).abs();
    for _ in 0..4 {
        let d = df(x);
        if d == 0.0 || fx == 0.0 {
            break;
        }
        let candidate = x - f(x) / d;
        let fc = f(candidate).abs();
        if !(fc < fx) {
            break;
        }
        x = candidate;
        fx = fc;
    }
    x
}

fn polish_complex(cp: &CharPoly, z0: Complex64) -> Complex64 {
    let df = |z: Complex64| (z * (3.0 * cp.c3) + 2.0 * cp.c2) * z + cp.c1;
    let mut z = z0;
    let mut fz = cp.eval(z).norm();
    for _ in 0..4 {
        let d = df(z);
        if d.norm() == 0.0 || fz == 0.0 {
            break;
        }
        let candidate = z - cp.eval(z) / d;
        let fc = cp.eval(candidate).norm();
        if !(fc < fz) {
            break;
        }
        z = candidate;
        fz = fc;
    }
    Complex64::new(z.re, z.im.abs())
}

fn sort_roots(roots: &mut [Complex64; 3]) {
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_roots(got: [Complex64; 3], want: [(f64, f64); 3], tol: f64) {
        for (g, (re, im)) in got.iter().zip(want) {
            assert!((g.re - re).abs() < tol && (g.im - im).abs() < tol, "got {got:?}, want {want:?}");
        }
    }

    #[test]
    fn identity_roots() {
        let cp = char_poly(&Matrix3::IDENTITY);
        assert_eq!(cp.coefficients(), [-1.0, 3.0, -3.0, 1.0]);
        assert_roots(eigenvalues3(&Matrix3::IDENTITY), [(1.0, 0.0); 3], 1e-12);
    }

    #[test]
    fn diagonal_roots_and_ordering() {
        assert_roots(
            eigenvalues3(&Matrix3::diag(1.0, 2.0, 3.0)),
            [(3.0, 0.0), (2.0, 0.0), (1.0, 0.0)],
            1e-12,
        );
        assert_roots(
            eigenvalues3(&Matrix3::diag(-1.0, -2.0, 5.0)),
            [(5.0, 0.0), (-1.0, 0.0), (-2.0, 0.0)],
            1e-12,
        );
        let cp = char_poly(&Matrix3::diag(1.0, 2.0, 3.0));
        for r in [1.0, 2.0, 3.0] {
            assert_eq!(cp.eval(Complex64::new(r, 0.0)).norm(), 0.0);
        }
    }

    #[test]
    fn rotation_block_gives_conjugate_pair() {
        // eigenvalues 2 and -1 +/- 3i
        let m = Matrix3([[-1.0, -3.0, 0.0], [3.0, -1.0, 0.0], [0.0, 0.0, 2.0]]);
        let e = eigenvalues3(&m);
        assert_roots(e, [(2.0, 0.0), (-1.0, -3.0), (-1.0, 3.0)], 1e-12);
        assert_eq!(e[1], e[2].conj());
    }

    #[test]
    fn nilpotent_matrix_has_triple_zero() {
        let m = Matrix3([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]);
        assert_roots(eigenvalues3(&m), [(0.0, 0.0); 3], 1e-12);
    }

    #[test]
    fn repeated_root_pair() {
        // (l - 2)^2 (l + 1)
        let m = Matrix3([[2.0, 1.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, -1.0]]);
        assert_roots(eigenvalues3(&m), [(2.0, 0.0), (2.0, 0.0), (-1.0, 0.0)], 1e-7);
    }
}
