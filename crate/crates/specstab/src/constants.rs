//! Explicit constants, recurrences and thresholds: the a_k/b_k sequences,
//! the admissibility condition with its rho/epsilon choices, eigenvalue gap
//! data with the A_k induction, Hardy constants for the geometric families,
//! and the closed-form local bounds.

use serde::Serialize;

use crate::bessel;
use crate::error::{Error, Result};

/// a_1 = 1, a_k = 1 + sum_{i<k} a_i^2 (equivalently a_{k+1} = a_k^2 + a_k).
/// Exact in u128 up to k = 8, then continued in f64; overflow past the f64
/// range reports the largest safe k.
pub fn a_sequence(k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::argument("k must be >= 1"));
    }
    let mut out = Vec::with_capacity(k);
    let mut exact: Option<u128> = Some(1);
    let mut value = 1.0f64;
    for i in 0..k {
        if i > 0 {
            exact = exact.and_then(|a| a.checked_mul(a).and_then(|sq| sq.checked_add(a)));
            value = match exact {
                Some(a) => a as f64,
                None => value * value + value,
            };
        }
        if !value.is_finite() {
            return Err(Error::Range {
                what: "a_k exceeds the floating-point range (doubly exponential growth)".into(),
                largest_safe_k: i,
            });
        }
        out.push(value);
    }
    Ok(out)
}

/// b_1 = 4, b_k = (1 + 8 a_k) ((1 + rho b_{k-1})(1 + 8 a_k) + 1).
pub fn b_sequence(k: usize, rho: f64) -> Result<Vec<f64>> {
    if !(rho >= 0.0) {
        return Err(Error::argument(format!("rho must be >= 0, got {rho}")));
    }
    let a = a_sequence(k)?;
    let mut out = Vec::with_capacity(k);
    let mut prev = 4.0f64;
    out.push(prev);
    for ak in a.iter().take(k).skip(1) {
        let m = 1.0 + 8.0 * ak;
        let b = m * ((1.0 + rho * prev) * m + 1.0);
        if !b.is_finite() {
            return Err(Error::Range {
                what: "b_k exceeds the floating-point range".into(),
                largest_safe_k: out.len(),
            });
        }
        out.push(b);
        prev = b;
    }
    Ok(out)
}

/// Both recurrences at once.
pub fn ak_bk_sequences(k: usize, rho: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((a_sequence(k)?, b_sequence(k, rho)?))
}

/// b_k tabulated at the extremal admissible rho* = 1/(4 a_k).
pub fn bk_at_extremal_rho(k: usize) -> Result<f64> {
    let a = a_sequence(k)?;
    let rho_star = 1.0 / (4.0 * a[k - 1]);
    Ok(b_sequence(k, rho_star)?[k - 1])
}

/// Every admissibility quantity for one (lambda, mu, alpha, k) tuple.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantsLedger {
    pub k: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub mu: f64,
    /// 8 (lambda/mu)^{1/2 - 2 alpha}; zero when mu is infinite.
    pub rho: f64,
    /// The dilation radius 2 (lambda/mu)^alpha / sqrt(lambda).
    pub eps_theorem: f64,
    /// Half of it: the cutoff scale used inside the proof.
    pub eps_proof: f64,
    pub a_k: f64,
    pub b_k: f64,
    /// 2 (1 + eps0^2 lambda) / (eps0^4 mu) at eps0 = eps_proof.
    pub lambda_cap: f64,
    /// 32 (lambda/mu)^{1/2 - 2 alpha} a_k = 4 rho a_k.
    pub condition_value: f64,
    pub condition_ok: bool,
}

/// Fills the ledger. mu = +inf is the empty-shell convention: rho = 0,
/// eps = 0, condition holds, the bound is zero.
pub fn rho_epsilon_condition(
    lambda: f64,
    mu: f64,
    alpha: f64,
    k: usize,
) -> Result<ConstantsLedger> {
    if !(lambda > 0.0) {
        return Err(Error::argument(format!("lambda must be positive, got {lambda}")));
    }
    if !(alpha > 0.0 && alpha < 0.25) {
        return Err(Error::argument(format!("alpha must lie in (0, 1/4), got {alpha}")));
    }
    if !(mu > 0.0) {
        return Err(Error::argument(format!("mu must be positive or infinite, got {mu}")));
    }
    let (a, _) = ak_bk_sequences(k, 0.0)?;
    let a_k = a[k - 1];
    if mu.is_infinite() {
        let b_k = b_sequence(k, 0.0)?[k - 1];
        return Ok(ConstantsLedger {
            k,
            alpha,
            lambda,
            mu,
            rho: 0.0,
            eps_theorem: 0.0,
            eps_proof: 0.0,
            a_k,
            b_k,
            lambda_cap: 0.0,
            condition_value: 0.0,
            condition_ok: true,
        });
    }
    let ratio = lambda / mu;
    let rho = 8.0 * ratio.powf(0.5 - 2.0 * alpha);
    let condition_value = 4.0 * rho * a_k;
    let eps_theorem = 2.0 * ratio.powf(alpha) / lambda.sqrt();
    let eps_proof = 0.5 * eps_theorem;
    let e0 = eps_proof;
    let lambda_cap = 2.0 * (1.0 + e0 * e0 * lambda) / (e0.powi(4) * mu);
    let b_k = b_sequence(k, rho)?[k - 1];
    Ok(ConstantsLedger {
        k,
        alpha,
        lambda,
        mu,
        rho,
        eps_theorem,
        eps_proof,
        a_k,
        b_k,
        lambda_cap,
        condition_value,
        condition_ok: condition_value <= 1.0,
    })
}

/// Multiplicity structure, gaps, deviations and proximity constants of two
/// nested spectra.
#[derive(Clone, Debug, Serialize)]
pub struct GapData {
    pub tol_mult: f64,
    /// Cluster sizes n_k.
    pub multiplicities: Vec<usize>,
    /// N_k = n_1 + ... + n_k.
    pub cumulative: Vec<usize>,
    /// Gaps Lambda_k = min_{j<=k} (lambda_{N_j+1} - lambda_{N_j}); one entry
    /// per cluster whose upper gap is visible in the spectrum.
    pub gaps: Vec<f64>,
    /// Deviations delta_i = max_{j<=i} (lambda_j - lambda'_j), clamped at 0.
    pub deviations: Vec<f64>,
    /// Proximity constants A_k = 2 + 8 lambda_{N_{k-1}+1} (sum_{i<k} A_i) / Lambda_k.
    pub constants: Vec<f64>,
    pub lambda: Vec<f64>,
    pub lambda_prime: Vec<f64>,
    /// Some lambda_j - lambda'_j fell below -neg_slack (monotonicity noise).
    pub negative_deviation_flagged: bool,
}

impl GapData {
    /// Index range (1-based cluster ids) for cluster k.
    pub fn cluster_range(&self, k: usize) -> std::ops::Range<usize> {
        let lo = if k == 1 { 0 } else { self.cumulative[k - 2] };
        lo..self.cumulative[k - 1]
    }

    pub fn cluster_count(&self) -> usize {
        self.multiplicities.len()
    }
}

/// Clusters lambda by relative tolerance and computes the gap machinery.
///
/// Requires lambda'_j <= lambda_j + neg_slack for all j (nested domains);
/// negative differences are clamped at zero and flagged when they exceed
/// the slack. A consecutive gap within [tol, 3 tol) of the clustering
/// threshold is ambiguous and reported as an error.
pub fn gap_data(
    lambda: &[f64],
    lambda_prime: &[f64],
    tol_mult: f64,
    neg_slack: f64,
) -> Result<GapData> {
    if lambda.is_empty() {
        return Err(Error::argument("empty spectrum"));
    }
    if !(tol_mult > 0.0) {
        return Err(Error::argument("tol_mult must be positive"));
    }
    let m = lambda.len().min(lambda_prime.len());
    // deviations
    let mut deviations = Vec::with_capacity(m);
    let mut worst = 0.0f64;
    let mut flagged = false;
    for j in 0..m {
        let d = lambda[j] - lambda_prime[j];
        if d < -neg_slack {
            flagged = true;
        }
        worst = worst.max(d.max(0.0));
        deviations.push(worst);
    }
    // clustering
    let mut multiplicities = Vec::new();
    let mut cumulative = Vec::new();
    let mut size = 1usize;
    for j in 1..lambda.len() {
        let rel = (lambda[j] - lambda[j - 1]) / lambda[j].abs().max(f64::MIN_POSITIVE);
        if rel < 0.0 {
            return Err(Error::argument("spectrum is not ascending"));
        }
        if (tol_mult..3.0 * tol_mult).contains(&rel) {
            return Err(Error::Clustering(format!(
                "gap between eigenvalues {} and {} is within [tol, 3 tol) of the \
                 clustering threshold ({rel:.3e} vs {tol_mult:.3e}); tighten the solve \
                 or adjust tol_mult",
                j, j + 1
            )));
        }
        if rel >= 3.0 * tol_mult {
            multiplicities.push(size);
            cumulative.push(cumulative.last().copied().unwrap_or(0) + size);
            size = 1;
        } else {
            size += 1;
        }
    }
    multiplicities.push(size);
    cumulative.push(cumulative.last().copied().unwrap_or(0) + size);

    // gaps: Lambda_k needs lambda_{N_k + 1}
    let mut gaps = Vec::new();
    let mut running = f64::INFINITY;
    for (k, &nk) in cumulative.iter().enumerate() {
        if nk < lambda.len() {
            running = running.min(lambda[nk] - lambda[nk - 1]);
            gaps.push(running);
        } else {
            break;
        }
        let _ = k;
    }
    // constants A_k
    let mut constants: Vec<f64> = Vec::with_capacity(gaps.len());
    let mut sum_a = 0.0;
    for (k, &gap) in gaps.iter().enumerate() {
        let a_k = if k == 0 {
            2.0
        } else {
            let lead = lambda[cumulative[k - 1]]; // lambda_{N_{k-1}+1}
            2.0 + 8.0 * lead * sum_a / gap
        };
        constants.push(a_k);
        sum_a += a_k;
    }
    Ok(GapData {
        tol_mult,
        multiplicities,
        cumulative,
        gaps,
        deviations,
        constants,
        lambda: lambda.to_vec(),
        lambda_prime: lambda_prime.to_vec(),
        negative_deviation_flagged: flagged,
    })
}

/// Geometric families with (partially) explicit weak-Hardy constants.
#[derive(Clone, Debug)]
pub enum HardyFamily {
    /// Uniform external rolling ball with parameter eps0 in R^n.
    RollingBall { n: u32, eps0: f64 },
    /// Simply connected planar sets: a = 16, b = 0.
    PlanarSimplyConnected,
    /// Uniform external cone condition (angle, height); the Hardy constants
    /// go through the capacity route and are supplied externally, but the
    /// reach eps* and the contraction multiplier N are explicit.
    Cone { angle: f64, height: f64, n: u32 },
}

#[derive(Clone, Debug, Serialize)]
pub struct HardyConstants {
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// The family does not determine a and b; they are scenario inputs.
    pub externally_supplied: bool,
    pub cone_eps_star: Option<f64>,
    pub cone_steps: Option<f64>,
}

pub fn hardy_constants(family: &HardyFamily) -> Result<HardyConstants> {
    match *family {
        HardyFamily::RollingBall { n, eps0 } => {
            if n < 2 {
                return Err(Error::argument("rolling-ball family needs n >= 2"));
            }
            if !(eps0 > 0.0) {
                return Err(Error::argument("eps0 must be positive"));
            }
            let p = (n - 2) as f64;
            let pi = std::f64::consts::PI;
            let i1 = adaptive_simpson(&|t: f64| t.sin().powf(p), 0.0, pi / 6.0, 1e-10);
            let i2 = adaptive_simpson(&|t: f64| t.sin().powf(p), 0.0, pi / 2.0, 1e-10);
            let a = n as f64 / 32.0 * i1 / i2;
            let b = (2.0 / eps0) * (2.0 / eps0);
            Ok(HardyConstants {
                a: Some(a),
                b: Some(b),
                externally_supplied: false,
                cone_eps_star: None,
                cone_steps: None,
            })
        }
        HardyFamily::PlanarSimplyConnected => Ok(HardyConstants {
            a: Some(16.0),
            b: Some(0.0),
            externally_supplied: false,
            cone_eps_star: None,
            cone_steps: None,
        }),
        HardyFamily::Cone { angle, height, n } => {
            if !(angle > 0.0 && angle < std::f64::consts::PI) {
                return Err(Error::argument("cone angle must lie in (0, pi)"));
            }
            if !(height > 0.0) {
                return Err(Error::argument("cone height must be positive"));
            }
            if n < 2 {
                return Err(Error::argument("cone family needs n >= 2"));
            }
            let t = (angle / 2.0).tan();
            Ok(HardyConstants {
                a: None,
                b: None,
                externally_supplied: true,
                cone_eps_star: Some(height * t / (t + 1.0)),
                cone_steps: Some((1.0 / t - 1e-12).ceil().max(1.0)),
            })
        }
    }
}

/// The inner-contraction threshold and bound shape of the two-sided
/// eigenvalue comparison: eps_k = (1 / (2 c (lambda_k + b)^{3/2}))^{1/(2+2alpha)}
/// with bound(eps) = 2^{2 alpha + 1} * 9 * c * (lambda_k + b)^{3/2} * eps^{2 alpha}.
#[derive(Clone, Debug, Serialize)]
pub struct DaviesThreshold {
    pub eps_k: f64,
    pub coeff: f64,
    pub alpha: f64,
}

impl DaviesThreshold {
    pub fn bound(&self, eps: f64) -> f64 {
        self.coeff * eps.powf(2.0 * self.alpha)
    }
}

pub fn davies_threshold(c: f64, lambda_k: f64, b: f64, alpha: f64) -> Result<DaviesThreshold> {
    if !(c > 0.0) {
        return Err(Error::argument("the constant c must be positive (scenario input)"));
    }
    if !(lambda_k >= 0.0 && b >= 0.0) {
        return Err(Error::argument("lambda_k and b must be nonnegative"));
    }
    if !(alpha > 0.0) {
        return Err(Error::argument("alpha must be positive"));
    }
    let base = (lambda_k + b).powf(1.5);
    let eps_k = (1.0 / (2.0 * c * base)).powf(1.0 / (2.0 + 2.0 * alpha));
    let coeff = 2.0f64.powf(2.0 * alpha + 1.0) * 9.0 * c * base;
    Ok(DaviesThreshold { eps_k, coeff, alpha })
}

/// Closed-form bounds and identities with c(n,k) from the disk spectrum.
#[derive(Clone, Debug)]
pub enum ClosedForm {
    /// c(n,k)/r0^2 (2 eps/r0 + eps^2/r0^2)
    Convex { n: u32, k: usize, r0: f64, eps: f64, c_nk: Option<f64> },
    /// (n-1)^2/4 + c~/r0^2
    Cheng { n: u32, r0: f64, c_tilde: f64 },
    /// c(n,k) eps (2r + eps) / (r^2 (eps + r)^2)
    BallIdentity { n: u32, k: usize, r: f64, eps: f64, c_nk: Option<f64> },
}

pub fn closed_form_bound(form: &ClosedForm) -> Result<f64> {
    let c_of = |n: u32, k: usize, c_nk: Option<f64>| -> Result<f64> {
        match (n, c_nk) {
            (_, Some(c)) => Ok(c),
            (2, None) => Ok(bessel::unit_disk_eigenvalue(k)),
            (n, None) => Err(Error::argument(format!(
                "c({n},{k}) is only built in for n = 2; supply it for other dimensions"
            ))),
        }
    };
    match *form {
        ClosedForm::Convex { n, k, r0, eps, c_nk } => {
            if !(r0 > 0.0 && eps >= 0.0) {
                return Err(Error::argument("convex bound needs r0 > 0, eps >= 0"));
            }
            let c = c_of(n, k, c_nk)?;
            Ok(c / (r0 * r0) * (2.0 * eps / r0 + eps * eps / (r0 * r0)))
        }
        ClosedForm::Cheng { n, r0, c_tilde } => {
            if !(r0 > 0.0) {
                return Err(Error::argument("Cheng bound needs r0 > 0"));
            }
            let nm1 = (n - 1) as f64;
            Ok(nm1 * nm1 / 4.0 + c_tilde / (r0 * r0))
        }
        ClosedForm::BallIdentity { n, k, r, eps, c_nk } => {
            if !(r > 0.0 && eps >= 0.0) {
                return Err(Error::argument("ball identity needs r > 0, eps >= 0"));
            }
            let c = c_of(n, k, c_nk)?;
            Ok(c * eps * (2.0 * r + eps) / (r * r * (eps + r) * (eps + r)))
        }
    }
}

/// Adaptive Simpson quadrature with absolute tolerance.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth >= 50 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth + 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth + 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 0)
}
