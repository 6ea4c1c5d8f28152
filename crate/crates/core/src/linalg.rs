//! Small dense complex LU with partial pivoting.

use num_complex::Complex64;

pub(crate) struct Lu<const N: usize> {
    lu: [[Complex64; N]; N],
    perm: [usize; N],
}

impl<const N: usize> Lu<N> {
    /// Factorizes `a`; `None` if a pivot is exactly zero.
    pub(crate) fn factor(mut a: [[Complex64; N]; N]) -> Option<Self> {
        let mut perm = [0usize; N];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        for k in 0..N {
            let pivot = (k..N)
                .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
                .unwrap_or(k);
            if a[pivot][k].norm() == 0.0 {
                return None;
            }
            a.swap(k, pivot);
            perm.swap(k, pivot);
            let inv = a[k][k].inv();
            for i in k + 1..N {
                let factor = a[i][k] * inv;
                a[i][k] = factor;
                for j in k + 1..N {
                    let upper = a[k][j];
                    a[i][j] -= factor * upper;
                }
            }
        }
        Some(Lu { lu: a, perm })
    }

    pub(crate) fn solve(&self, b: &[Complex64; N]) -> [Complex64; N] {
        let mut x = [Complex64::new(0.0, 0.0); N];
        for i in 0..N {
            let mut sum = b[self.perm[i]];
            for j in 0..i {
                sum -= self.lu[i][j] * x[j];
            }
            x[i] = sum;
        }
        for i in (0..N).rev() {
            let mut sum = x[i];
            for j in i + 1..N {
                sum -= self.lu[i][j] * x[j];
            }
            x[i] = sum / self.lu[i][i];
        }
        x
    }

    /// ‖A⁻¹‖₁, from the columns of the explicit inverse.
    pub(crate) fn inverse_norm1(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for col in 0..N {
            let mut e = [Complex64::new(0.0, 0.0); N];
            e[col] = Complex64::new(1.0, 0.0);
            let x = self.solve(&e);
            worst = worst.max(x.iter().map(|v| v.norm()).sum());
        }
        worst
    }
}

pub(crate) fn norm1<const N: usize>(a: &[[Complex64; N]; N]) -> f64 {
    (0..N)
        .map(|j| (0..N).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn mat_vec<const N: usize>(a: &[[Complex64; N]; N], x: &[Complex64; N]) -> [Complex64; N] {
    let mut y = [Complex64::new(0.0, 0.0); N];
    for i in 0..N {
        y[i] = a[i].iter().zip(x).map(|(m, v)| m * v).sum();
    }
    y
}

pub(crate) fn norm2<const N: usize>(x: &[Complex64; N]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}
