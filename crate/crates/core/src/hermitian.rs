// Cyclic Jacobi eigenvalues for dense Hermitian matrices. Slow but
// self-contained, which is what a cross-check needs.

use alloc::vec::Vec;

use crate::c64;

const MAX_SWEEPS: usize = 60;

/// Iteration stops once the off-diagonal Frobenius norm is below this
/// fraction of the full norm. By Weyl's inequality that bounds every
/// eigenvalue error by the same fraction of `‖A‖_F`.
const OFF_DIAGONAL_RTOL: f64 = 1e-13;

/// Eigenvalues of the Hermitian matrix stored row-major in `a` (`n × n`),
/// in no particular order. Only the upper triangle's conjugate symmetry is
/// assumed; `a` is overwritten. `None` if the iteration stalls.
pub(crate) fn jacobi_eigenvalues(a: &mut [c64], n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    // `off` below counts the upper triangle only, half the off-diagonal mass
    let target = 0.5 * OFF_DIAGONAL_RTOL * OFF_DIAGONAL_RTOL * total.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|r| ((r + 1)..n).map(move |c| (r, c)))
            .map(|(r, c)| a[r * n + c].norm_sqr())
            .sum();
        if off <= target {
            return Some((0..n).map(|k| a[k * n + k].re).collect());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(a, n, p, q);
            }
        }
    }
    None
}

fn rotate(a: &mut [c64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = libm::hypot(apq.re, apq.im);
    if r == 0.0 {
        return;
    }
    // scale column q by conj(phase) so the pivot becomes the real number r
    let phase = apq / r;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + libm::sqrt(1.0 + theta * theta))
    } else {
        -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
    };
    let c = 1.0 / libm::sqrt(1.0 + t * t);
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q] * phase.conj();
        let new_p = akp * c - akq * s;
        let new_q = akp * s + akq * c;
        a[k * n + p] = new_p;
        a[p * n + k] = new_p.conj();
        a[k * n + q] = new_q;
        a[q * n + k] = new_q.conj();
    }
    a[p * n + p] = c64::new(app - t * r, 0.0);
    a[q * n + q] = c64::new(aqq + t * r, 0.0);
    a[p * n + q] = c64::new(0.0, 0.0);
    a[q * n + p] = c64::new(0.0, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form() {
        // [[2, 1+i], [1-i, 3]]: eigenvalues (5 ± √(1 + 8)) / 2 = 1, 4
        let mut a = [c64::new(2.0, 0.0), c64::new(1.0, 1.0), c64::new(1.0, -1.0), c64::new(3.0, 0.0)];
        let mut e = jacobi_eigenvalues(&mut a, 2).unwrap();
        e.sort_by(f64::total_cmp);
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn preserves_trace_and_frobenius_norm() {
        let n = 9;
        let mut a = alloc::vec![c64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in r..n {
                let z = if r == c {
                    c64::new(libm::sin(r as f64 * 0.7), 0.0)
                } else {
                    c64::new(libm::cos((r * 3 + c) as f64), libm::sin((r + 5 * c) as f64))
                };
                a[r * n + c] = z;
                a[c * n + r] = z.conj();
            }
        }
        let trace: f64 = (0..n).map(|k| a[k * n + k].re).sum();
        let frob: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let e = jacobi_eigenvalues(&mut a, n).unwrap();
        assert!((e.iter().sum::<f64>() - trace).abs() < 1e-12);
        assert!((e.iter().map(|x| x * x).sum::<f64>() - frob).abs() < 1e-11);
    }
}
