//! Fixed-size complex matrix arithmetic for two-qubit computations.
//!
//! Everything here is 2x2 or 4x4, so the types are plain arrays with explicit
//! loops; no general linear-algebra backend is involved. Hermitian eigenvalues
//! are computed with a cyclic Jacobi iteration, which at these sizes converges
//! to machine precision in a handful of sweeps.

use num_complex::Complex64;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// A 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

/// A 4x4 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[C64; 4]; 4]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        m.0[0][0] = C64::new(1.0, 0.0);
        m.0[1][1] = C64::new(1.0, 0.0);
        m
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        let mut out = Self::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][c] + other.0[r][c];
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Mat2 {
        let mut out = *self;
        for row in &mut out.0 {
            for e in row {
                *e *= factor;
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Eigenvalues of a Hermitian 2x2 matrix, ascending. The imaginary parts
    /// of the diagonal are ignored; callers validate Hermiticity.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let off = self.0[0][1].norm_sqr();
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + off).sqrt();
        [mid - rad, mid + rad]
    }
}

impl Mat4 {
    pub fn zero() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn add(&self, other: &Mat4) -> Mat4 {
        let mut out = Self::zero();
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] = self.0[r][c] + other.0[r][c];
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Mat4 {
        let mut out = *self;
        for row in &mut out.0 {
            for e in row {
                *e *= factor;
            }
        }
        out
    }

    pub fn mul(&self, other: &Mat4) -> Mat4 {
        let mut out = Self::zero();
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = ZERO;
                for m in 0..4 {
                    acc += self.0[r][m] * other.0[m][c];
                }
                out.0[r][c] = acc;
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// `Tr[self * other]` without forming the product.
    pub fn trace_product(&self, other: &Mat4) -> C64 {
        let mut acc = ZERO;
        for r in 0..4 {
            for c in 0..4 {
                acc += self.0[r][c] * other.0[c][r];
            }
        }
        acc
    }

    /// Largest deviation `|a_ij - conj(a_ji)|` from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max((self.0[r][c] - self.0[c][r].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of a Hermitian 4x4 matrix, ascending, via cyclic Jacobi
    /// rotations. Callers validate Hermiticity first.
    pub fn hermitian_eigenvalues(&self) -> [f64; 4] {
        let mut a = self.0;
        // Symmetrize away rounding-level asymmetry so the iteration acts on an
        // exactly Hermitian matrix.
        for r in 0..4 {
            a[r][r] = C64::new(a[r][r].re, 0.0);
            for c in (r + 1)..4 {
                let avg = 0.5 * (a[r][c] + a[c][r].conj());
                a[r][c] = avg;
                a[c][r] = avg.conj();
            }
        }

        for _sweep in 0..64 {
            let off: f64 = (0..4)
                .flat_map(|r| ((r + 1)..4).map(move |c| (r, c)))
                .map(|(r, c)| a[r][c].norm_sqr())
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..4 {
                for q in (p + 1)..4 {
                    let apq = a[p][q];
                    if apq.norm() < 1e-18 {
                        continue;
                    }
                    // Unitary 2x2 rotation that zeroes the (p, q) element:
                    // columns (p, q) mix with c = cos(theta),
                    // s = sin(theta) * exp(i*phi), phi = arg(a_pq).
                    let app = a[p][p].re;
                    let aqq = a[q][q].re;
                    let abs = apq.norm();
                    let phase = apq / abs;
                    let theta = 0.5 * (2.0 * abs).atan2(app - aqq);
                    let (sin, cos) = theta.sin_cos();
                    let s = phase.conj() * sin;

                    // Update rows p and q of A <- J^dagger A, then columns of ... J.
                    for k in 0..4 {
                        let akp = a[p][k];
                        let akq = a[q][k];
                        a[p][k] = cos * akp + s.conj() * akq;
                        a[q][k] = -s * akp + cos * akq;
                    }
                    for k in 0..4 {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = cos * akp + s * akq;
                        a[k][q] = -s.conj() * akp + cos * akq;
                    }
                }
            }
        }

        let mut eig = [a[0][0].re, a[1][1].re, a[2][2].re, a[3][3].re];
        eig.sort_by(f64::total_cmp);
        eig
    }
}

/// Kronecker product of two single-qubit operators, party A first.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    out
}

/// The spin operator along a Bloch direction: `n . sigma`.
pub fn pauli_vector(dir: [f64; 3]) -> Mat2 {
    let [nx, ny, nz] = dir;
    Mat2([
        [C64::new(nz, 0.0), C64::new(nx, -ny)],
        [C64::new(nx, ny), C64::new(-nz, 0.0)],
    ])
}

/// Projector onto a (normalized) two-qubit pure state.
pub fn outer_product(psi: &[C64; 4]) -> Mat4 {
    let mut out = Mat4::zero();
    for r in 0..4 {
        for c in 0..4 {
            out.0[r][c] = psi[r] * psi[c].conj();
        }
    }
    out
}
