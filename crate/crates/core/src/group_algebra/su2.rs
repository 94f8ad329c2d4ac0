//! SU(2) elements and spin-j representation matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// `[[a, b], [-conj(b), conj(a)]]` with `|a|^2 + |b|^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Su2Element {
    pub a: Complex64,
    pub b: Complex64,
}

impl Su2Element {
    pub fn identity() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// Diagonal representative `diag(e^{iθ/2}, e^{-iθ/2})` of the class with angle θ.
    pub fn from_class_angle(theta: f64) -> Self {
        Self {
            a: Complex64::from_polar(1.0, theta / 2.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// Rotation by `angle` about the unit vector `axis`.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let (s, c) = (angle / 2.0).sin_cos();
        let (x, y, z) = (axis[0] / n, axis[1] / n, axis[2] / n);
        // exp(i angle/2 n.sigma)
        Self {
            a: Complex64::new(c, s * z),
            b: Complex64::new(s * y, s * x),
        }
    }

    /// Haar-random element (uniform unit quaternion).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        Self {
            a: Complex64::new(q[0] / n, q[1] / n),
            b: Complex64::new(q[2] / n, q[3] / n),
        }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.a, self.b], [-self.b.conj(), self.a.conj()]]
    }

    pub fn compose(&self, other: &Self) -> Self {
        let m = self.matrix();
        let o = other.matrix();
        Self {
            a: m[0][0] * o[0][0] + m[0][1] * o[1][0],
            b: m[0][0] * o[0][1] + m[0][1] * o[1][1],
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// `cos(θ/2) = Re a`, θ in `[0, 2π]`.
    pub fn class_angle(&self) -> f64 {
        2.0 * self.a.re.clamp(-1.0, 1.0).acos()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.a.norm_sqr() + self.b.norm_sqr() - 1.0).abs() <= tol
    }
}

/// Character of spin `twice_j / 2` at the element, via the Chebyshev
/// recurrence `U_{n+1} = 2x U_n - U_{n-1}` with `x = cos(θ/2)`.
pub fn character(twice_j: u32, u: &Su2Element) -> f64 {
    chebyshev_u(twice_j, u.a.re.clamp(-1.0, 1.0))
}

pub(crate) fn chebyshev_u(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// Spin-j representation matrix on the basis `a = 0..=2j` with `m = j - a`.
///
/// Realised on homogeneous polynomials of degree 2j in `(x, y)` with
/// orthonormal monomials `x^{j+m} y^{j-m} / sqrt((j+m)!(j-m)!)`; the element
/// acts as `f(v) -> f(U^T v)`, so spin 1/2 reproduces `U` itself.
pub fn wigner_matrix(twice_j: u32, u: &Su2Element) -> DMatrix<Complex64> {
    let n = twice_j as usize;
    let d = n + 1;
    let m = u.matrix();
    let (u00, u01, u10, u11) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let mut out = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for col in 0..d {
        let p = n - col; // power of x
        let q = col; // power of y
        let norm_in = (factorial(p) * factorial(q)).sqrt();
        for r in 0..=p {
            let tr = binomial(p, r) * u00.powu(r as u32) * u10.powu((p - r) as u32);
            for s in 0..=q {
                let ts = binomial(q, s) * u01.powu(s as u32) * u11.powu((q - s) as u32);
                let p_out = r + s;
                let row = n - p_out;
                let norm_out = (factorial(p_out) * factorial(n - p_out)).sqrt();
                out[(row, col)] += tr * ts * (norm_out / norm_in);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spin_half_is_defining_rep() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = Su2Element::random(&mut rng);
        let d = wigner_matrix(1, &u);
        let m = u.matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert!((d[(i, j)] - m[i][j]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn wigner_matrices_are_unitary_homomorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for twice_j in 0..=8 {
            let u = Su2Element::random(&mut rng);
            let v = Su2Element::random(&mut rng);
            let du = wigner_matrix(twice_j, &u);
            let dv = wigner_matrix(twice_j, &v);
            let duv = wigner_matrix(twice_j, &u.compose(&v));
            assert!((&du * &dv - duv).norm() < 1e-11, "j2={twice_j}");
            let id = DMatrix::identity(du.nrows(), du.ncols());
            assert!((&du * du.adjoint() - id).norm() < 1e-11);
            assert!((du.trace().re - character(twice_j, &u)).abs() < 1e-11);
        }
    }

    #[test]
    fn character_closed_form() {
        for twice_j in 0..6u32 {
            for k in 1..20 {
                let theta = 0.3 * k as f64;
                let expected = ((twice_j as f64 + 1.0) * theta / 2.0).sin() / (theta / 2.0).sin();
                let got = character(twice_j, &Su2Element::from_class_angle(theta));
                assert!((got - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn class_angle_round_trip() {
        let u = Su2Element::from_axis_angle([1.0, 2.0, -0.5], 1.234);
        assert!(u.is_unitary(1e-14));
        assert!((u.class_angle() - 1.234).abs() < 1e-12);
    }
}
