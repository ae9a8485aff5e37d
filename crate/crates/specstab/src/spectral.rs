//! Discrete Dirichlet spectra on grid domains.
//!
//! The Laplacian is the 5-point stencil over interior cells with boundary by
//! deletion, scaled 1/h^2. The discrete L^2 inner product carries the cell
//! weight h^n, and the forward-difference gradient energy matches the
//! operator's quadratic form identically: <Lv, v> = ||grad v||^2.

use crate::bessel;
use crate::error::{Error, Result};
use crate::grid::{DistanceMode, GridDomain};
use crate::lattice::Lattice;
use crate::op::StencilOp;
use crate::solver::{smallest_eigenpairs, EigOptions};

/// Assembled Dirichlet Laplacian of a grid domain.
pub struct DirichletOperator {
    pub(crate) op: StencilOp,
    pub dof_to_grid: Vec<usize>,
    pub grid_len: usize,
    pub h: f64,
    pub rank: usize,
}

impl DirichletOperator {
    pub fn dim(&self) -> usize {
        self.op.n
    }

    /// l2 quadratic form of the operator (no h^n weight).
    pub fn quadratic(&self, v: &[f64]) -> f64 {
        self.op.quadratic(v)
    }

    pub fn matvec(&self, v: &[f64], y: &mut [f64]) {
        self.op.matvec(v, y)
    }
}

pub fn assemble_laplacian(dom: &GridDomain) -> Result<DirichletOperator> {
    if dom.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let lat = dom.lattice();
    let (op, dof_to_grid) = StencilOp::from_mask(lat, dom.interior(), 0.0);
    Ok(DirichletOperator {
        op,
        dof_to_grid,
        grid_len: lat.len(),
        h: lat.h,
        rank: 2,
    })
}

/// Assembly over a raw lattice mask (1-D and 3-D variants share the stencil).
pub fn assemble_masked<const R: usize>(
    lat: &Lattice<R>,
    mask: &[bool],
) -> Result<DirichletOperator> {
    let (op, dof_to_grid) = StencilOp::from_mask(lat, mask, 0.0);
    if op.n == 0 {
        return Err(Error::EmptyDomain);
    }
    Ok(DirichletOperator {
        op,
        dof_to_grid,
        grid_len: lat.len(),
        h: lat.h,
        rank: R,
    })
}

/// Ascending Dirichlet eigenvalues with discretely orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub h: f64,
    /// Weight of the discrete inner product, h^n.
    pub ip_weight: f64,
    vectors: Vec<Vec<f64>>,
    dof_to_grid: Vec<usize>,
    grid_len: usize,
}

impl SpectralResult {
    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvector in dof space, normalized in the weighted inner product.
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i]
    }

    /// Eigenvector zero-extended to the full grid.
    pub fn vector_on_grid(&self, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.grid_len];
        for (dof, &g) in self.dof_to_grid.iter().enumerate() {
            v[g] = self.vectors[i][dof];
        }
        v
    }

    pub fn dof_to_grid(&self) -> &[usize] {
        &self.dof_to_grid
    }

    /// max_ij |<v_i, v_j> - delta_ij| in the weighted inner product.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.k() {
            for j in i..self.k() {
                let mut s = 0.0;
                for (a, b) in self.vectors[i].iter().zip(&self.vectors[j]) {
                    s += a * b;
                }
                s *= self.ip_weight;
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - want).abs());
            }
        }
        worst
    }
}

/// The k algebraically smallest eigenpairs of an assembled operator.
pub fn lowest_eigenpairs(
    op: &DirichletOperator,
    k: usize,
    tol: f64,
    seed: u64,
) -> Result<SpectralResult> {
    let out = smallest_eigenpairs(&op.op, &EigOptions::new(k).with_tol(tol).with_seed(seed))?;
    let ip_weight = op.h.powi(op.rank as i32);
    let scale = 1.0 / ip_weight.sqrt();
    let vectors = out
        .vectors
        .into_iter()
        .map(|mut v| {
            v.iter_mut().for_each(|x| *x *= scale);
            v
        })
        .collect();
    Ok(SpectralResult {
        eigenvalues: out.values,
        residuals: out.residuals,
        h: op.h,
        ip_weight,
        vectors,
        dof_to_grid: op.dof_to_grid.clone(),
        grid_len: op.grid_len,
    })
}

/// lambda_1 of the domain; +inf for the empty set. For a disconnected mask
/// this is the minimum of the component fundamental tones, automatically.
pub fn fundamental_tone(dom: &GridDomain, tol: f64, seed: u64) -> Result<f64> {
    if dom.is_empty() {
        return Ok(f64::INFINITY);
    }
    let op = assemble_laplacian(dom)?;
    Ok(lowest_eigenpairs(&op, 1, tol, seed)?.eigenvalues[0])
}

/// Weighted inner product of full-grid vectors.
pub fn grid_ip(lat: &Lattice<2>, u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), lat.len());
    let w = lat.h * lat.h;
    w * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
}

/// Dirichlet energy of a full-grid vector that vanishes on the outer ring:
/// h^{n-2} sum over axis-adjacent pairs of (v_a - v_b)^2. Matches the
/// operator's quadratic form for vectors supported on a mask.
pub fn dirichlet_energy(lat: &Lattice<2>, v: &[f64]) -> f64 {
    energy_bilinear(lat, v, v)
}

/// The bilinear form of `dirichlet_energy`.
pub fn energy_bilinear(lat: &Lattice<2>, u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), lat.len());
    assert_eq!(v.len(), lat.len());
    let [nx, ny] = lat.dims;
    let s = lat.strides();
    let mut acc = 0.0;
    for ix in 0..nx {
        for iy in 0..ny {
            let i = ix * s[0] + iy * s[1];
            if ix + 1 < nx {
                let j = i + s[0];
                acc += (u[i] - u[j]) * (v[i] - v[j]);
            }
            if iy + 1 < ny {
                let j = i + s[1];
                acc += (u[i] - u[j]) * (v[i] - v[j]);
            }
        }
    }
    // h^n * (1/h^2); n = 2
    acc
}

/// Piecewise-linear cutoff transition realized on the grid.
#[derive(Clone, Debug)]
pub struct CutoffProfile {
    /// One value per grid cell, in [0, 1].
    pub values: Vec<f64>,
    pub eps: f64,
    /// Nominal slope bound 1/eps; the grid realization obeys
    /// 1/(eps - h) = 1/eps + O(h/eps^2).
    pub gradient_bound: f64,
}

/// eta = clamp(d(x, outer^c) / (eps - h), 0, 1): equal to 1 on `inner`,
/// 0 outside `outer`, slope within O(h/eps^2) of 1/eps.
pub fn cutoff_profile(
    inner: &GridDomain,
    outer: &GridDomain,
    eps: f64,
) -> Result<CutoffProfile> {
    if !inner.is_subset_of(outer)? {
        return Err(Error::geometry("cutoff: inner set not contained in outer"));
    }
    let h = outer.h();
    if !(eps > h) {
        return Err(Error::argument(format!(
            "cutoff width eps = {eps} must exceed the grid spacing {h}"
        )));
    }
    let df = outer.distance_transform(DistanceMode::ToComplement);
    // separation precondition: dist(inner, outer^c) >= eps - h
    let need = (eps - h) / h;
    let need_sq = need * need * (1.0 - 1e-12);
    for (idx, &on) in inner.interior().iter().enumerate() {
        if on && (df.d_sq[idx] as f64) < need_sq {
            return Err(Error::geometry(format!(
                "inner and outer^c are closer than eps - h = {}; cannot realize slope 1/eps",
                eps - h
            )));
        }
    }
    let denom = eps - h;
    let values: Vec<f64> = df
        .d_sq
        .iter()
        .map(|&dsq| {
            if dsq == crate::lattice::UNREACHABLE {
                1.0
            } else {
                (((dsq as f64).sqrt() * h) / denom).clamp(0.0, 1.0)
            }
        })
        .collect();
    Ok(CutoffProfile { values, eps, gradient_bound: 1.0 / eps })
}

/// Lemma-style cutoff energy test: the Dirichlet energy of eta*f against
/// lambda + Lambda + 2 sqrt(Lambda lambda) with Lambda = 2(1+eps^2 lambda)/(eps^4 mu).
pub struct CutoffEnergyCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub lambda_cap: f64,
    pub pass: bool,
}

pub fn cutoff_energy_check(
    lat: &Lattice<2>,
    f_grid: &[f64],
    eta: &CutoffProfile,
    lambda: f64,
    mu: f64,
    eps: f64,
    slack: f64,
) -> Result<CutoffEnergyCheck> {
    if !(mu > 0.0) {
        return Err(Error::argument(format!("mu must be positive, got {mu}")));
    }
    let psi: Vec<f64> = eta.values.iter().zip(f_grid).map(|(e, f)| e * f).collect();
    let lhs = dirichlet_energy(lat, &psi);
    let cap = if mu.is_infinite() {
        0.0
    } else {
        2.0 * (1.0 + eps * eps * lambda) / (eps.powi(4) * mu)
    };
    let rhs = lambda + cap + 2.0 * (cap * lambda).sqrt();
    Ok(CutoffEnergyCheck { lhs, rhs, lambda_cap: cap, pass: lhs <= rhs + slack })
}

/// Shapes with analytically known Dirichlet spectra.
#[derive(Clone, Copy, Debug)]
pub enum RefShape {
    Rectangle { a: f64, b: f64 },
    Disk { r: f64 },
}

/// First k eigenvalues, ascending with multiplicity. Rectangle eigenvalues
/// are pi^2 (m^2/a^2 + n^2/b^2); disk eigenvalues come from Bessel zeros
/// computed by bisection to 1e-10.
pub fn reference_spectrum(shape: RefShape, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::argument("k must be >= 1"));
    }
    match shape {
        RefShape::Rectangle { a, b } => {
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::argument("rectangle sides must be positive"));
            }
            let pi2 = std::f64::consts::PI * std::f64::consts::PI;
            let m_max = k + 2;
            let mut lams = Vec::with_capacity(m_max * m_max);
            for m in 1..=m_max {
                for n in 1..=m_max {
                    lams.push(pi2 * ((m * m) as f64 / (a * a) + (n * n) as f64 / (b * b)));
                }
            }
            lams.sort_by(f64::total_cmp);
            lams.truncate(k);
            Ok(lams)
        }
        RefShape::Disk { r } => {
            if !(r > 0.0) {
                return Err(Error::argument("disk radius must be positive"));
            }
            Ok(bessel::disk_eigenvalues(r, k))
        }
    }
}

/// c(n,k) for n = 2: the k-th eigenvalue of the unit disk.
pub fn ball_eigenvalue_constant(k: usize) -> f64 {
    bessel::unit_disk_eigenvalue(k)
}

/// Richardson error estimate for the fine spectrum of an (h, 2h) pair:
/// err(h) ~ (lambda(2h) - lambda(h)) / 3 per eigenvalue (second-order stencil).
pub fn richardson_slack(fine: &[f64], coarse: &[f64]) -> Vec<f64> {
    fine.iter()
        .zip(coarse)
        .map(|(f, c)| ((c - f) / 3.0).abs())
        .collect()
}
