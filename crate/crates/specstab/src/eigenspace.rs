//! Eigenspace proximity: projections between cluster bases of nested
//! domains, the A/B/C proximity bounds with their hypothesis gate, the
//! prehilbert projection lemma, and the Gram-Schmidt energy bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constants::{a_sequence, b_sequence, GapData};
use crate::error::{Error, Result};
use crate::report::Verdict;
use crate::spectral::SpectralResult;

/// Orthonormal basis of one eigenvalue cluster, zero-extended to the shared
/// grid so that the discrete L^2(Omega') inner product applies to both
/// domains' vectors.
#[derive(Clone, Debug)]
pub struct ClusterBasis {
    pub cluster: usize,
    pub eigenvalue: f64,
    pub ip_weight: f64,
    pub vectors: Vec<Vec<f64>>,
}

impl ClusterBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn ip(&self, u: &[f64], v: &[f64]) -> f64 {
        self.ip_weight * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    }

    /// max_ij |<v_i, v_j> - delta_ij|.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.ip(&self.vectors[i], &self.vectors[j]) - want).abs());
            }
        }
        worst
    }
}

/// Splits a spectral result into cluster bases following the gap data.
pub fn cluster_bases(spec: &SpectralResult, gaps: &GapData) -> Vec<ClusterBasis> {
    let mut out = Vec::new();
    for k in 1..=gaps.cluster_count() {
        let range = gaps.cluster_range(k);
        if range.end > spec.k() {
            break;
        }
        let vectors: Vec<Vec<f64>> = range.clone().map(|j| spec.vector_on_grid(j)).collect();
        out.push(ClusterBasis {
            cluster: k,
            eigenvalue: spec.eigenvalues[range.end - 1],
            ip_weight: spec.ip_weight,
            vectors,
        });
    }
    out
}

/// P_k f = sum_j <f, f'_j> f'_j over the cluster basis, and its squared norm.
pub fn project_onto_cluster(f: &[f64], basis: &ClusterBasis) -> Result<(Vec<f64>, f64)> {
    if basis.vectors.iter().any(|v| v.len() != f.len()) {
        return Err(Error::geometry("projection: vector grids do not match"));
    }
    let mut proj = vec![0.0; f.len()];
    let mut norm_sq = 0.0;
    for b in &basis.vectors {
        let c = basis.ip(f, b);
        norm_sq += c * c;
        for (p, x) in proj.iter_mut().zip(b) {
            *p += c * x;
        }
    }
    Ok((proj, norm_sq))
}

/// Prehilbert projection lemma: for a unit vector v with P(v) != 0,
/// || v - P(v)/||P(v)|| ||^2 <= 4 (1 - ||P(v)||^2).
pub struct PrehilbertCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

pub fn prehilbert_check(f: &[f64], basis: &ClusterBasis) -> Result<PrehilbertCheck> {
    let (proj, norm_sq) = project_onto_cluster(f, basis)?;
    if norm_sq == 0.0 {
        return Err(Error::Precondition("prehilbert check requires P(v) != 0".into()));
    }
    let norm = norm_sq.sqrt();
    let mut lhs = 0.0;
    for (v, p) in f.iter().zip(&proj) {
        let d = v - p / norm;
        lhs += d * d;
    }
    lhs *= basis.ip_weight;
    let rhs = 4.0 * (1.0 - norm_sq);
    Ok(PrehilbertCheck { lhs, rhs, pass: lhs <= rhs + 1e-12 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProximityPart {
    Hypothesis,
    ResidualA,
    WitnessB,
    MassC,
    Calculation,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProximityRow {
    pub cluster: usize,
    pub part: ProximityPart,
    pub sample: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize, Default)]
pub struct ProximityReport {
    pub rows: Vec<ProximityRow>,
    pub anomalies: Vec<String>,
}

impl ProximityReport {
    pub fn violated(&self) -> usize {
        self.rows.iter().filter(|r| r.verdict == Verdict::Violated).count()
    }
}

pub struct ProximityOptions {
    pub k_max: usize,
    pub samples_per_cluster: usize,
    pub seed: u64,
    /// Discretization allowance added to every right-hand side.
    pub slack: f64,
}

impl ProximityOptions {
    pub fn new(k_max: usize) -> Self {
        ProximityOptions { k_max, samples_per_cluster: 10, seed: 0x5eed, slack: 0.0 }
    }
}

fn unit_samples(
    basis: &ClusterBasis,
    extra: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = basis.vectors.clone();
    let dim = basis.dim();
    for _ in 0..extra {
        let coeffs: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
        let mut v = vec![0.0; basis.vectors[0].len()];
        for (c, b) in coeffs.iter().zip(&basis.vectors) {
            for (x, y) in v.iter_mut().zip(b) {
                *x += c * y;
            }
        }
        let n = basis.ip(&v, &v).sqrt();
        if n > 0.0 {
            v.iter_mut().for_each(|x| *x /= n);
            out.push(v);
        }
    }
    out
}

/// Runs the A/B/C proximity checks and the calculation-lemma intermediate
/// inequality on every cluster up to `k_max`. Rows whose hypothesis gate
/// fails are marked hypothesis_failed, never violated.
pub fn proximity_report(
    gaps: &GapData,
    bases_inner: &[ClusterBasis],
    bases_outer: &[ClusterBasis],
    opts: &ProximityOptions,
) -> Result<ProximityReport> {
    let mut report = ProximityReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let k_lim = opts
        .k_max
        .min(gaps.gaps.len())
        .min(bases_inner.len())
        .min(bases_outer.len());
    for k in 1..=k_lim {
        let gap = gaps.gaps[k - 1];
        let a_k = gaps.constants[k - 1];
        let n_k = gaps.cumulative[k - 1];
        let n_km1 = if k == 1 { 0 } else { gaps.cumulative[k - 2] };
        if n_k >= gaps.deviations.len() {
            break; // delta_{N_k + 1} not measurable with this spectrum length
        }
        let delta_gate = gaps.deviations[n_k]; // delta_{N_k + 1}
        let delta_lead = gaps.deviations[n_km1]; // delta_{N_{k-1} + 1}
        let gate_rhs = gap / (2.0 * a_k);
        let hypothesis_ok = delta_gate <= gate_rhs;
        report.rows.push(ProximityRow {
            cluster: k,
            part: ProximityPart::Hypothesis,
            sample: 0,
            lhs: delta_gate,
            rhs: gate_rhs,
            verdict: if hypothesis_ok { Verdict::Verified } else { Verdict::HypothesisFailed },
        });
        let verdict_of = |ok: bool| {
            if !hypothesis_ok {
                Verdict::HypothesisFailed
            } else if ok {
                Verdict::Verified
            } else {
                Verdict::Violated
            }
        };

        // Part A: || (I - P_k) f ||^2 <= A_k delta_{N_{k-1}+1} / Lambda_k
        let samples = unit_samples(&bases_inner[k - 1], opts.samples_per_cluster, &mut rng);
        let rhs_a = a_k * delta_lead / gap + opts.slack;
        for (s, f) in samples.iter().enumerate() {
            let (_, norm_sq) = project_onto_cluster(f, &bases_outer[k - 1])?;
            let lhs = (1.0 - norm_sq).max(0.0);
            report.rows.push(ProximityRow {
                cluster: k,
                part: ProximityPart::ResidualA,
                sample: s,
                lhs,
                rhs: rhs_a,
                verdict: verdict_of(lhs <= rhs_a),
            });
        }

        // Part B: witness f for each f' in E'_k via the normalized E_k projection
        let rhs_b = 4.0 * a_k * delta_lead / gap + opts.slack;
        for (s, fp) in bases_outer[k - 1].vectors.iter().enumerate() {
            let (proj, norm_sq) = project_onto_cluster(fp, &bases_inner[k - 1])?;
            if norm_sq == 0.0 {
                if hypothesis_ok {
                    report.anomalies.push(format!(
                        "cluster {k}: degenerate projection of f'_{s} onto E_k under a \
                         satisfied hypothesis (bijectivity anomaly)"
                    ));
                }
                continue;
            }
            let norm = norm_sq.sqrt();
            let f: Vec<f64> = proj.iter().map(|x| x / norm).collect();
            let mut lhs = 0.0;
            for (a, b) in f.iter().zip(fp) {
                let d = a - b;
                lhs += d * d;
            }
            lhs *= bases_inner[k - 1].ip_weight;
            // a-posteriori witness relation f' ~ P_k f / ||P_k f||
            let (pkf, pk_norm_sq) = project_onto_cluster(&f, &bases_outer[k - 1])?;
            if pk_norm_sq > 0.0 {
                let pn = pk_norm_sq.sqrt();
                let mut rel = 0.0;
                for (a, b) in fp.iter().zip(&pkf) {
                    let d = a - b / pn;
                    rel += d * d;
                }
                rel = (rel * bases_inner[k - 1].ip_weight).sqrt();
                let floor = 1e-6 * (delta_lead / gap).sqrt().max(1e-8);
                if hypothesis_ok && rel > floor.max(16.0 * opts.slack.sqrt()) {
                    report.anomalies.push(format!(
                        "cluster {k}: witness relation residual {rel:.3e} exceeds {floor:.3e}"
                    ));
                }
            }
            report.rows.push(ProximityRow {
                cluster: k,
                part: ProximityPart::WitnessB,
                sample: s,
                lhs,
                rhs: rhs_b,
                verdict: verdict_of(lhs <= rhs_b),
            });
        }

        // Part C: mass of the first k projections for f in clusters above k
        let sum_a: f64 = gaps.constants[..k].iter().sum();
        let rhs_c = 4.0 * sum_a * delta_lead / gap + opts.slack;
        for upper in (k + 1)..=bases_inner.len() {
            let samples = unit_samples(&bases_inner[upper - 1], 2, &mut rng);
            for (s, f) in samples.iter().enumerate() {
                let mut lhs = 0.0;
                for basis in bases_outer.iter().take(k) {
                    let (_, nsq) = project_onto_cluster(f, basis)?;
                    lhs += nsq;
                }
                report.rows.push(ProximityRow {
                    cluster: k,
                    part: ProximityPart::MassC,
                    sample: (upper - k - 1) * 100 + s,
                    lhs,
                    rhs: rhs_c,
                    verdict: verdict_of(lhs <= rhs_c),
                });
            }
        }

        // Calculation lemma at cluster k, under the weaker gate
        // delta_{N_k+1} <= Lambda_k / 2.
        if gaps.cumulative[k - 1] < gaps.lambda_prime.len() {
            let calc_ok = delta_gate <= gap / 2.0;
            let lam_p_next = gaps.lambda_prime[gaps.cumulative[k - 1]]; // lambda'_{N_k+1}
            for (s, f) in samples.iter().enumerate() {
                let (_, nsq) = project_onto_cluster(f, &bases_outer[k - 1])?;
                let lhs = (1.0 - nsq).max(0.0);
                let mut mass_below = 0.0;
                for basis in bases_outer.iter().take(k - 1) {
                    let (_, m) = project_onto_cluster(f, basis)?;
                    mass_below += m;
                }
                let rhs =
                    2.0 / gap * (delta_lead + lam_p_next * mass_below) + opts.slack;
                report.rows.push(ProximityRow {
                    cluster: k,
                    part: ProximityPart::Calculation,
                    sample: s,
                    lhs,
                    rhs,
                    verdict: if !calc_ok {
                        Verdict::HypothesisFailed
                    } else if lhs <= rhs {
                        Verdict::Verified
                    } else {
                        Verdict::Violated
                    },
                });
            }
        }
    }
    Ok(report)
}

/// Which energy hypothesis/conclusion the Gram-Schmidt lemma runs under.
pub enum EnergyBoundMode {
    /// q(psi_i) <= lambda (1 + rho), conclusion q(F_i) <= lambda (1 + rho b_k).
    Uniform(f64),
    /// q(psi_i) <= lambda_i (1 + rho), conclusion q(F_i) <= lambda_i (1 + rho b_i).
    PerIndex(Vec<f64>),
}

pub struct GramSchmidtCheck {
    pub basis: Vec<Vec<f64>>,
    pub energies: Vec<f64>,
    pub bounds: Vec<f64>,
    pub max_ratio: f64,
    pub pass: bool,
}

/// Sequential orthonormalization F_i = h_i/||h_i||,
/// h_i = psi_i - sum_{j<i} <F_j, psi_i> F_j, with the b-sequence energy
/// bounds. Floating-point headroom of 1e-11 relative is allowed on the
/// hypothesis and conclusion comparisons.
pub fn gram_schmidt_energy_check(
    psi: &[Vec<f64>],
    ip: &dyn Fn(&[f64], &[f64]) -> f64,
    q_bilinear: &dyn Fn(&[f64], &[f64]) -> f64,
    mode: &EnergyBoundMode,
    rho: f64,
) -> Result<GramSchmidtCheck> {
    let k = psi.len();
    if k == 0 {
        return Err(Error::argument("gram-schmidt needs at least one vector"));
    }
    let a = a_sequence(k)?;
    let a_k = a[k - 1];
    if 4.0 * rho * a_k > 1.0 + 1e-9 {
        return Err(Error::Precondition(format!(
            "4 rho a_k = {} > 1: the almost-orthogonality hypothesis is inadmissible",
            4.0 * rho * a_k
        )));
    }
    let fp = 1e-11;
    // hypothesis (almost orthonormality)
    for i in 0..k {
        for j in i..k {
            let want = if i == j { 1.0 } else { 0.0 };
            let dev = (ip(&psi[i], &psi[j]) - want).abs();
            if dev > rho * (1.0 + fp) + fp {
                return Err(Error::Precondition(format!(
                    "|<psi_{i}, psi_{j}> - delta| = {dev:.3e} exceeds rho = {rho:.3e}"
                )));
            }
        }
    }
    // hypothesis (energy)
    let hyp_bound = |i: usize| -> f64 {
        match mode {
            EnergyBoundMode::Uniform(lam) => lam * (1.0 + rho),
            EnergyBoundMode::PerIndex(lams) => lams[i] * (1.0 + rho),
        }
    };
    for (i, p) in psi.iter().enumerate() {
        let q = q_bilinear(p, p);
        if q > hyp_bound(i) * (1.0 + fp) {
            return Err(Error::Precondition(format!(
                "q(psi_{i}) = {q:.6e} exceeds the hypothesis bound {:.6e}",
                hyp_bound(i)
            )));
        }
    }
    let b = b_sequence(k, rho)?;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut energies = Vec::with_capacity(k);
    let mut bounds = Vec::with_capacity(k);
    let mut max_ratio = 0.0f64;
    let mut pass = true;
    for (i, p) in psi.iter().enumerate() {
        let mut h = p.clone();
        for f in &basis {
            let c = ip(f, &h);
            for (x, y) in h.iter_mut().zip(f) {
                *x -= c * y;
            }
        }
        let n_sq = ip(&h, &h);
        if n_sq <= 0.0 || n_sq.sqrt() < 1e-14 {
            return Err(Error::Precondition(format!(
                "gram-schmidt degeneracy at index {i} (||h|| ~ 0) despite 4 rho a_k <= 1; \
                 anomalous input"
            )));
        }
        let n = n_sq.sqrt();
        h.iter_mut().for_each(|x| *x /= n);
        let q = q_bilinear(&h, &h);
        let bound = match mode {
            EnergyBoundMode::Uniform(lam) => lam * (1.0 + rho * b[k - 1]),
            EnergyBoundMode::PerIndex(lams) => lams[i] * (1.0 + rho * b[i]),
        };
        if q > bound * (1.0 + fp) {
            pass = false;
        }
        max_ratio = max_ratio.max(q / bound);
        energies.push(q);
        bounds.push(bound);
        basis.push(h);
    }
    Ok(GramSchmidtCheck { basis, energies, bounds, max_ratio, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_basis(vectors: Vec<Vec<f64>>, lam: f64) -> ClusterBasis {
        ClusterBasis { cluster: 1, eigenvalue: lam, ip_weight: 1.0, vectors }
    }

    #[test]
    fn projector_identity_and_orthogonality() {
        let e1 = vec![1.0, 0.0, 0.0];
        let e2 = vec![0.0, 1.0, 0.0];
        let b = dense_basis(vec![e1.clone(), e2], 1.0);
        let (p, n) = project_onto_cluster(&e1, &b).unwrap();
        assert_eq!(p, e1);
        assert!((n - 1.0).abs() < 1e-14);
        let (p0, n0) = project_onto_cluster(&[0.0, 0.0, 1.0], &b).unwrap();
        assert!(p0.iter().all(|&x| x == 0.0) && n0 == 0.0);
    }

    #[test]
    fn projection_squared_cosine() {
        // 1-D cluster along the x axis: ||P f||^2 is the squared cosine.
        let axis = dense_basis(vec![vec![1.0, 0.0, 0.0]], 1.0);
        let theta = 0.7f64;
        let f = vec![theta.cos(), theta.sin(), 0.0];
        let (_, n) = project_onto_cluster(&f, &axis).unwrap();
        assert!((n - theta.cos().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn projector_idempotent_and_pythagoras() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let dim = 6;
            // random orthonormal 2-D basis by Gram-Schmidt
            let mut v1: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
            let n1 = v1.iter().map(|x| x * x).sum::<f64>().sqrt();
            v1.iter_mut().for_each(|x| *x /= n1);
            let mut v2: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
            let c = v1.iter().zip(&v2).map(|(a, b)| a * b).sum::<f64>();
            for (x, y) in v2.iter_mut().zip(&v1) {
                *x -= c * y;
            }
            let n2 = v2.iter().map(|x| x * x).sum::<f64>().sqrt();
            v2.iter_mut().for_each(|x| *x /= n2);
            let b = dense_basis(vec![v1, v2], 1.0);
            let mut f: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
            let nf = f.iter().map(|x| x * x).sum::<f64>().sqrt();
            f.iter_mut().for_each(|x| *x /= nf);
            let (p, nsq) = project_onto_cluster(&f, &b).unwrap();
            let (pp, nsq2) = project_onto_cluster(&p, &b).unwrap();
            for (a, bb) in p.iter().zip(&pp) {
                assert!((a - bb).abs() < 1e-12);
            }
            assert!((nsq - nsq2).abs() < 1e-12);
            // Pythagoras
            let res: f64 = f
                .iter()
                .zip(&p)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
            assert!((res + nsq - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prehilbert_fixed_point_and_plane_identity() {
        let b = dense_basis(vec![vec![1.0, 0.0]], 1.0);
        let c = prehilbert_check(&[1.0, 0.0], &b).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert_eq!(c.rhs, 0.0);
        assert!(c.pass);
        // angle theta to a 1-D range: lhs = 2 - 2 cos(theta) <= 4 sin^2 theta = rhs
        for theta in [0.3f64, 0.9, 1.4] {
            let v = vec![theta.cos(), theta.sin()];
            let c = prehilbert_check(&v, &b).unwrap();
            assert!((c.lhs - (2.0 - 2.0 * theta.cos())).abs() < 1e-12);
            assert!((c.rhs - 4.0 * theta.sin().powi(2)).abs() < 1e-12);
            assert!(c.pass);
        }
        assert!(prehilbert_check(&[0.0, 1.0], &b).is_err());
    }

    #[test]
    fn prehilbert_random_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut checked = 0;
        while checked < 10_000 {
            let dim = 2 + (rng.gen::<u64>() % 19) as usize;
            let pdim = 1 + (rng.gen::<u64>() % (dim as u64 - 1)) as usize;
            // random orthonormal projector basis
            let mut basis: Vec<Vec<f64>> = Vec::new();
            for _ in 0..pdim {
                let mut v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
                for b in &basis {
                    let c: f64 = b.iter().zip(&v).map(|(a, x)| a * x).sum();
                    for (x, y) in v.iter_mut().zip(b) {
                        *x -= c * y;
                    }
                }
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n < 1e-8 {
                    continue;
                }
                v.iter_mut().for_each(|x| *x /= n);
                basis.push(v);
            }
            let b = dense_basis(basis, 1.0);
            let mut f: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
            let n = f.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n < 1e-8 {
                continue;
            }
            f.iter_mut().for_each(|x| *x /= n);
            match prehilbert_check(&f, &b) {
                Ok(c) => {
                    assert!(c.pass, "violation: lhs={} rhs={}", c.lhs, c.rhs);
                    checked += 1;
                }
                Err(_) => continue,
            }
        }
    }

    #[test]
    fn gram_schmidt_exact_orthonormal_is_identity() {
        // psi exactly orthonormal eigenvectors of q: F_i = psi_i, q(F_i) = lambda_i.
        let psi = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let lams = [1.0, 2.0, 3.0];
        let ip = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let q = move |u: &[f64], v: &[f64]| {
            u.iter()
                .zip(v)
                .enumerate()
                .map(|(i, (a, b))| lams[i] * a * b)
                .sum::<f64>()
        };
        let out = gram_schmidt_energy_check(
            &psi,
            &ip,
            &q,
            &EnergyBoundMode::Uniform(3.0),
            0.0,
        )
        .unwrap();
        assert!(out.pass);
        for (i, f) in out.basis.iter().enumerate() {
            assert!((q(f, f) - lams[i]).abs() < 1e-12);
        }
        let per = gram_schmidt_energy_check(
            &psi,
            &ip,
            &q,
            &EnergyBoundMode::PerIndex(lams.to_vec()),
            0.0,
        )
        .unwrap();
        assert!(per.pass);
    }

    #[test]
    fn gram_schmidt_k1_bound_is_b1() {
        // k = 1: q(F_1) = q(psi)/||psi||^2 <= lambda (1 + 4 rho) for rho < 1/2.
        let rho = 0.2;
        let psi = vec![vec![(1.0f64 - rho).sqrt(), 0.0]];
        let ip = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let lam = 1.0;
        let q = move |u: &[f64], v: &[f64]| (u[0] * v[0] + 0.5 * u[1] * v[1]) * lam;
        // ||psi||^2 = 1 - rho (admissible), q(psi) = lambda (1 - rho) <= lambda (1 + rho)
        let out =
            gram_schmidt_energy_check(&psi, &ip, &q, &EnergyBoundMode::Uniform(lam), rho)
                .unwrap();
        assert!(out.pass);
        assert!((out.bounds[0] - lam * (1.0 + 4.0 * rho)).abs() < 1e-12);
    }

    #[test]
    fn gram_schmidt_rejects_inadmissible_rho() {
        let psi = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let ip = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let q = |u: &[f64], v: &[f64]| ip(u, v);
        // a_2 = 2 so rho must satisfy 8 rho <= 1
        assert!(matches!(
            gram_schmidt_energy_check(&psi, &ip, &q, &EnergyBoundMode::Uniform(1.0), 0.2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn gram_schmidt_rejects_violated_hypothesis() {
        let psi = vec![vec![1.0, 0.0], vec![0.9, (1.0f64 - 0.81).sqrt()]];
        let ip = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let q = |u: &[f64], v: &[f64]| ip(u, v);
        // <psi_1, psi_2> = 0.9 exceeds any admissible rho for k = 2
        assert!(gram_schmidt_energy_check(
            &psi,
            &ip,
            &q,
            &EnergyBoundMode::Uniform(1.0),
            0.05
        )
        .is_err());
    }
}
