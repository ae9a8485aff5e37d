//! Sparse stencil operators and the iterative kernels built on them.
//!
//! The discrete Dirichlet Laplacian on a masked lattice is a (2R+1)-point
//! stencil with constant off-diagonal -1/h^2 and diagonal 2R/h^2, restricted
//! to interior cells (boundary by deletion). It is stored as a neighbor table
//! rather than a general CSR matrix: every coefficient is known from the
//! pattern alone, which keeps matvec, IC(0) and the energy identity
//! <Lv, v> = ||grad v||^2 exact and fast.

use crate::lattice::Lattice;

pub const NO_NEIGHBOR: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct StencilOp {
    pub n: usize,
    pub rank: usize,
    /// 2*rank entries per dof: axis a minus at 2a, plus at 2a+1.
    nb: Vec<u32>,
    pub inv_h2: f64,
    /// Zeroth-order term: the operator is -Laplace + shift * I.
    pub shift: f64,
}

impl StencilOp {
    /// Builds the operator over the interior cells of `mask`, in scan order.
    /// Also returns the dof -> grid linear index map.
    pub fn from_mask<const R: usize>(
        lat: &Lattice<R>,
        mask: &[bool],
        shift: f64,
    ) -> (StencilOp, Vec<usize>) {
        assert_eq!(mask.len(), lat.len());
        let mut grid_to_dof = vec![NO_NEIGHBOR; mask.len()];
        let mut dof_to_grid = Vec::new();
        for (idx, &on) in mask.iter().enumerate() {
            if on {
                grid_to_dof[idx] = dof_to_grid.len() as u32;
                dof_to_grid.push(idx);
            }
        }
        let n = dof_to_grid.len();
        let strides = lat.strides();
        let mut nb = vec![NO_NEIGHBOR; n * 2 * R];
        for (dof, &idx) in dof_to_grid.iter().enumerate() {
            let c = lat.coords(idx);
            for a in 0..R {
                if c[a] > 0 {
                    let j = grid_to_dof[idx - strides[a]];
                    nb[dof * 2 * R + 2 * a] = j;
                }
                if c[a] + 1 < lat.dims[a] {
                    let j = grid_to_dof[idx + strides[a]];
                    nb[dof * 2 * R + 2 * a + 1] = j;
                }
            }
        }
        (
            StencilOp { n, rank: R, nb, inv_h2: 1.0 / (lat.h * lat.h), shift },
            dof_to_grid,
        )
    }

    #[inline]
    pub fn neighbors(&self, dof: usize) -> &[u32] {
        let w = 2 * self.rank;
        &self.nb[dof * w..(dof + 1) * w]
    }

    pub fn diag(&self) -> f64 {
        2.0 * self.rank as f64 * self.inv_h2 + self.shift
    }

    pub fn matvec(&self, v: &[f64], y: &mut [f64]) {
        debug_assert_eq!(v.len(), self.n);
        let w = 2 * self.rank;
        let diag = self.diag();
        for i in 0..self.n {
            let mut s = diag * v[i];
            for &j in &self.nb[i * w..i * w + w] {
                if j != NO_NEIGHBOR {
                    s -= self.inv_h2 * v[j as usize];
                }
            }
            y[i] = s;
        }
    }

    /// Plain l2 quadratic form <Av, v>.
    pub fn quadratic(&self, v: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n];
        self.matvec(v, &mut y);
        dot(v, &y)
    }
}

/// Incomplete Cholesky with zero fill, in LDL^T form. The 5/7-point Dirichlet
/// operator is an M-matrix, so the factorization cannot break down.
#[derive(Clone, Debug)]
pub struct Ic0 {
    d: Vec<f64>,
}

impl Ic0 {
    pub fn factor(op: &StencilOp) -> Ic0 {
        let a = -op.inv_h2;
        let diag = op.diag();
        let w = 2 * op.rank;
        let mut d = vec![0.0f64; op.n];
        for i in 0..op.n {
            let mut s = diag;
            // minus-direction neighbors precede i in scan order
            for axis in 0..op.rank {
                let j = op.nb[i * w + 2 * axis];
                if j != NO_NEIGHBOR {
                    s -= a * a / d[j as usize];
                }
            }
            d[i] = s;
        }
        Ic0 { d }
    }

    /// z = M^{-1} r with M = (D + L) D^{-1} (D + L^T).
    pub fn solve(&self, op: &StencilOp, r: &[f64], z: &mut [f64], scratch: &mut [f64]) {
        let a = -op.inv_h2;
        let w = 2 * op.rank;
        let y = scratch;
        for i in 0..op.n {
            let mut s = r[i];
            for axis in 0..op.rank {
                let j = op.nb[i * w + 2 * axis];
                if j != NO_NEIGHBOR {
                    s -= a * y[j as usize];
                }
            }
            y[i] = s / self.d[i];
        }
        for i in 0..op.n {
            y[i] *= self.d[i];
        }
        for i in (0..op.n).rev() {
            let mut s = y[i];
            for axis in 0..op.rank {
                let j = op.nb[i * w + 2 * axis + 1];
                if j != NO_NEIGHBOR {
                    s -= a * z[j as usize];
                }
            }
            z[i] = s / self.d[i];
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub struct CgWorkspace {
    r: Vec<f64>,
    z: Vec<f64>,
    p: Vec<f64>,
    ap: Vec<f64>,
    scratch: Vec<f64>,
}

impl CgWorkspace {
    pub fn new(n: usize) -> Self {
        CgWorkspace {
            r: vec![0.0; n],
            z: vec![0.0; n],
            p: vec![0.0; n],
            ap: vec![0.0; n],
            scratch: vec![0.0; n],
        }
    }
}

/// Preconditioned conjugate gradients; `x` holds the initial guess on entry
/// and the solution on exit. Returns the iteration count. The stopping rule
/// is relative (||r|| <= tol ||b||), so the solve is scale-equivariant.
pub fn pcg(
    op: &StencilOp,
    prec: &Ic0,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_it: usize,
    ws: &mut CgWorkspace,
) -> usize {
    let n = op.n;
    op.matvec(x, &mut ws.ap);
    for i in 0..n {
        ws.r[i] = b[i] - ws.ap[i];
    }
    let norm_b = norm(b);
    if norm_b == 0.0 {
        x.fill(0.0);
        return 0;
    }
    prec.solve(op, &ws.r, &mut ws.z, &mut ws.scratch);
    ws.p.copy_from_slice(&ws.z);
    let mut rz = dot(&ws.r, &ws.z);
    let mut it = 0;
    while it < max_it {
        if norm(&ws.r) <= tol * norm_b {
            break;
        }
        op.matvec(&ws.p, &mut ws.ap);
        let alpha = rz / dot(&ws.p, &ws.ap);
        axpy(alpha, &ws.p, x);
        axpy(-alpha, &ws.ap, &mut ws.r);
        prec.solve(op, &ws.r, &mut ws.z, &mut ws.scratch);
        let rz_next = dot(&ws.r, &ws.z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            ws.p[i] = ws.z[i] + beta * ws.p[i];
        }
        it += 1;
    }
    it
}

/// Cyclic Jacobi eigensolver for small dense symmetric matrices (row-major).
/// Returns eigenvalues ascending with matching eigenvector columns in `v`.
pub fn jacobi_eigh(a: &mut [f64], n: usize, v: &mut [f64]) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    assert_eq!(v.len(), n * n);
    v.fill(0.0);
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n == 0 {
        return Vec::new();
    }
    let scale = (0..n).map(|i| a[i * n + i].abs()).fold(1e-300, f64::max);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p * n + q].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[i * n + p];
                        let aiq = a[i * n + q];
                        a[i * n + p] = c * aip - s * aiq;
                        a[p * n + i] = a[i * n + p];
                        a[i * n + q] = s * aip + c * aiq;
                        a[q * n + i] = a[i * n + q];
                    }
                }
                a[p * n + p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a[q * n + q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
    // sort ascending, permuting eigenvector columns
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let w: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let vc = v.to_vec();
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            v[r * n + new] = vc[r * n + old];
        }
    }
    w
}

/// Implicit-QL eigensolver for symmetric tridiagonal matrices (diag `d`,
/// off-diagonal `e`, e[0] unused). Eigenvectors accumulate into `z`
/// (n x n row-major, start from identity). Classic tql2.
pub fn tql2(d: &mut [f64], e: &mut [f64], n: usize, z: &mut [f64]) {
    if n == 0 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "tql2 failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// In-place lower Cholesky of a small dense SPD matrix; returns false if a
/// pivot is not positive.
pub fn cholesky(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut s = a[j * n + j];
        for k in 0..j {
            s -= a[j * n + k] * a[j * n + k];
        }
        if s <= 0.0 {
            return false;
        }
        let l = s.sqrt();
        a[j * n + j] = l;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / l;
        }
        for i in 0..j {
            a[i * n + j] = 0.0;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    fn line_op(m: usize, h: f64) -> StencilOp {
        // 1-D segment of m interior cells inside a grid of m+2 points.
        let lat = Lattice::<1>::new(h, [0.0], [m + 2]).unwrap();
        let mask: Vec<bool> = (0..m + 2).map(|i| i > 0 && i <= m).collect();
        StencilOp::from_mask(&lat, &mask, 0.0).0
    }

    #[test]
    fn tridiagonal_matvec() {
        let op = line_op(4, 0.5);
        // diag 2/h^2 = 8, off -4
        let v = vec![1.0, 2.0, 3.0, 4.0];
        let mut y = vec![0.0; 4];
        op.matvec(&v, &mut y);
        assert_eq!(y, vec![8.0 - 8.0, 16.0 - 16.0, 24.0 - 24.0, 32.0 - 12.0]);
    }

    #[test]
    fn pcg_solves_poisson_line() {
        let op = line_op(50, 1.0 / 51.0);
        let prec = Ic0::factor(&op);
        let b = vec![1.0; 50];
        let mut x = vec![0.0; 50];
        let mut ws = CgWorkspace::new(50);
        let its = pcg(&op, &prec, &b, &mut x, 1e-12, 1000, &mut ws);
        let mut y = vec![0.0; 50];
        op.matvec(&x, &mut y);
        let err: f64 = y.iter().zip(&b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "err={err}, its={its}");
        // IC(0) on a tridiagonal matrix is exact: one iteration.
        assert!(its <= 2, "its={its}");
    }

    #[test]
    fn jacobi_small_matrix() {
        let mut a = vec![2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0];
        let mut v = vec![0.0; 9];
        let w = jacobi_eigh(&mut a, 3, &mut v);
        let expect = [2.0 - 2.0f64.sqrt(), 2.0, 2.0 + 2.0f64.sqrt()];
        for (got, want) in w.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn tql2_matches_classic_spectrum() {
        // (2,-1) tridiagonal: lambda_j = 2 - 2 cos(j pi/(n+1))
        let n = 40;
        let mut d = vec![2.0; n];
        let mut e = vec![-1.0; n];
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        tql2(&mut d, &mut e, n, &mut z);
        let mut got = d.clone();
        got.sort_by(f64::total_cmp);
        for (j, g) in got.iter().enumerate() {
            let want = 2.0 - 2.0 * (std::f64::consts::PI * (j + 1) as f64 / (n as f64 + 1.0)).cos();
            assert!((g - want).abs() < 1e-12, "j={j} got={g} want={want}");
        }
        // eigenvector residual check for a middle pair
        let col = 7;
        let lam = d[col];
        for r in 0..n {
            let mut s = 2.0 * z[r * n + col];
            if r > 0 {
                s -= z[(r - 1) * n + col];
            }
            if r + 1 < n {
                s -= z[(r + 1) * n + col];
            }
            assert!((s - lam * z[r * n + col]).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_identity_perturbation() {
        let mut g = vec![1.0, 0.1, 0.1, 1.0];
        assert!(cholesky(&mut g, 2));
        assert!((g[0] - 1.0).abs() < 1e-15);
        assert!((g[2] - 0.1).abs() < 1e-15);
    }
}
