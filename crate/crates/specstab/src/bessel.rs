//! Bessel functions of the first kind and their zeros, by power series and
//! bisection. Valid for the moderate arguments needed by disk spectra
//! (x up to ~30, orders up to ~12).

/// J_p(x) by the alternating power series.
pub fn bessel_j(p: u32, x: f64) -> f64 {
    debug_assert!(x.abs() <= 40.0, "power series unreliable for |x| = {x}");
    let half = 0.5 * x;
    // term_0 = (x/2)^p / p!
    let mut term = 1.0;
    for i in 1..=p {
        term *= half / i as f64;
    }
    let mut sum = term;
    let x2 = half * half;
    for m in 1..300 {
        term *= -x2 / (m as f64 * (m + p) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-30) && m as f64 > half {
            break;
        }
    }
    sum
}

/// First `count` positive zeros of J_p, each to absolute accuracy 1e-10.
pub fn bessel_j_zeros(p: u32, count: usize) -> Vec<f64> {
    let mut zeros = Vec::with_capacity(count);
    let step = 0.05;
    let mut a = 0.05;
    let mut fa = bessel_j(p, a);
    // zeros of J_p are separated by more than `step` in this range
    while zeros.len() < count {
        let b = a + step;
        let fb = bessel_j(p, b);
        if fa == 0.0 {
            zeros.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi) = (a, b);
            let mut flo = fa;
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                let fm = bessel_j(p, mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                } else if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
        assert!(a < 200.0, "failed to bracket enough Bessel zeros");
    }
    zeros
}

/// Dirichlet eigenvalues of the disk of radius `r`, ascending with
/// multiplicity: (j_{p,q}/r)^2, doubled for p >= 1.
pub fn disk_eigenvalues(r: f64, k: usize) -> Vec<f64> {
    assert!(r > 0.0 && k >= 1);
    let mut lams: Vec<f64> = Vec::new();
    for p in 0..=(k as u32 + 1) {
        for z in bessel_j_zeros(p, k) {
            let lam = (z / r) * (z / r);
            lams.push(lam);
            if p > 0 {
                lams.push(lam);
            }
        }
    }
    lams.sort_by(f64::total_cmp);
    lams.truncate(k);
    lams
}

/// c(2, k): the k-th Dirichlet eigenvalue of the unit disk.
pub fn unit_disk_eigenvalue(k: usize) -> f64 {
    disk_eigenvalues(1.0, k)[k - 1]
}
