//! Statistics of additive operators `A_L = Σ_{i∈L} a_i`: spectral measure,
//! tails, the gap/variance trade-off, Fisher information and the
//! locality structure of `A_L`'s spectral projectors.

pub mod fisher;
pub mod scaling;

use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::models::lmg::ladder;
use crate::models::HamiltonianSpec;
use crate::operator::{enumerate_q_local_basis, Letter, LocalOperator, PauliString, Representation, StateVector};
use crate::spectral::GroundSolution;

pub use fisher::{fisher_neff, FisherOptions, FisherReport};
pub use scaling::{
    critical_exponent_inequality, lmg_scaling_fit, CriticalExponents, ExponentCheck, FitSummary, LmgScaling,
    ScalingRow,
};

/// Values of `A_L` closer than this are merged.
pub const VALUE_BIN: f64 = 1e-9;
/// Bins lighter than this (amplitude 1e-12) are outside the support.
const SUPPORT_FLOOR: f64 = 1e-24;
const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
/// Tail window used for the decay-rate fit.
const FIT_WINDOW: (f64, f64) = (1e-8, 0.1);
/// Largest system for the exhaustive projector-locality check.
pub const PROJECTOR_LOCALITY_MAX_SITES: usize = 8;

type M2 = Matrix2<Complex64>;

fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_matrix(l: Letter) -> M2 {
    let (o, z, i) = (cz(1.0, 0.0), cz(0.0, 0.0), cz(0.0, 1.0));
    match l {
        Letter::I => M2::new(o, z, z, o),
        Letter::X => M2::new(z, o, o, z),
        Letter::Y => M2::new(z, -i, i, z),
        Letter::Z => M2::new(o, z, z, -o),
    }
}

/// `(a0, ax, ay, az)` with `m = a0 I + a·σ`; real for Hermitian `m`.
fn pauli_coefficients(m: &M2) -> [f64; 4] {
    [
        ((m[(0, 0)] + m[(1, 1)]) / 2.0).re,
        ((m[(0, 1)] + m[(1, 0)]) / 2.0).re,
        ((m[(0, 1)] - m[(1, 0)]) * cz(0.0, 0.5)).re,
        ((m[(0, 0)] - m[(1, 1)]) / 2.0).re,
    ]
}

/// Eigenvalues and eigenvector columns of a Hermitian 2×2 matrix.
fn local_eigen(m: &M2) -> ([f64; 2], M2) {
    let e = SymmetricEigen::new(*m);
    ([e.eigenvalues[0], e.eigenvalues[1]], e.eigenvectors)
}

#[derive(Clone, Debug)]
pub struct AdditiveOperator {
    n_sites: usize,
    sites: Vec<usize>,
    ops: Vec<M2>,
    label: String,
}

impl AdditiveOperator {
    pub fn new(n_sites: usize, sites: Vec<usize>, ops: Vec<M2>, label: &str) -> Result<AdditiveOperator> {
        if sites.len() != ops.len() {
            return Err(invalid("one local operator per site is required"));
        }
        let mut sorted = sites.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != sites.len() {
            return Err(invalid("additive operator sites must be distinct"));
        }
        if sites.iter().any(|&s| s >= n_sites) {
            return Err(invalid("additive operator site out of range"));
        }
        for (s, m) in sites.iter().zip(&ops) {
            if (m - m.adjoint()).iter().any(|c| c.norm() > HERMITIAN_TOL) {
                return Err(invalid(format!("a_{s} is not Hermitian")));
            }
            let [a0, x, y, z] = pauli_coefficients(m);
            let norm = a0.abs() + (x * x + y * y + z * z).sqrt();
            if norm > 1.0 + NORM_TOL {
                return Err(invalid(format!("‖a_{s}‖ = {norm} exceeds 1")));
            }
        }
        Ok(AdditiveOperator {
            n_sites,
            sites,
            ops,
            label: label.to_string(),
        })
    }

    /// `Σ_{i∈sites} σ^letter_i`.
    pub fn pauli_sum(n_sites: usize, sites: &[usize], letter: Letter) -> Result<AdditiveOperator> {
        let m = pauli_matrix(letter);
        AdditiveOperator::new(n_sites, sites.to_vec(), vec![m; sites.len()], &format!("sum {}", letter.symbol()))
    }

    /// `Σ_i v_i·σ_i` with `|v_i| ≤ 1`.
    pub fn from_bloch(n_sites: usize, sites: &[usize], vectors: &[[f64; 3]]) -> Result<AdditiveOperator> {
        let ops = vectors
            .iter()
            .map(|v| {
                pauli_matrix(Letter::X) * cz(v[0], 0.0)
                    + pauli_matrix(Letter::Y) * cz(v[1], 0.0)
                    + pauli_matrix(Letter::Z) * cz(v[2], 0.0)
            })
            .collect();
        AdditiveOperator::new(n_sites, sites.to_vec(), ops, "bloch")
    }

    /// Random `a_i = a0 I + v·σ` with `|a0| + |v| ≤ 1`.
    pub fn random<R: Rng>(n_sites: usize, sites: &[usize], rng: &mut R) -> Result<AdditiveOperator> {
        let ops = sites
            .iter()
            .map(|_| {
                let dir = crate::models::states::random_unit3(rng);
                let r: f64 = rng.random_range(0.05..1.0);
                let a0 = (1.0 - r) * rng.random_range(-1.0..1.0);
                M2::identity() * cz(a0, 0.0)
                    + pauli_matrix(Letter::X) * cz(r * dir[0], 0.0)
                    + pauli_matrix(Letter::Y) * cz(r * dir[1], 0.0)
                    + pauli_matrix(Letter::Z) * cz(r * dir[2], 0.0)
            })
            .collect();
        AdditiveOperator::new(n_sites, sites.to_vec(), ops, "random")
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn l_size(&self) -> usize {
        self.sites.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn local(&self, k: usize) -> &M2 {
        &self.ops[k]
    }

    /// As a Pauli-basis operator.
    pub fn to_local_operator(&self) -> Result<LocalOperator> {
        let n = self.n_sites;
        let mut terms = Vec::with_capacity(4 * self.sites.len());
        for (&s, m) in self.sites.iter().zip(&self.ops) {
            let [a0, x, y, z] = pauli_coefficients(m);
            terms.push((a0, PauliString::identity(n)?));
            terms.push((x, PauliString::single(n, s, Letter::X)?));
            terms.push((y, PauliString::single(n, s, Letter::Y)?));
            terms.push((z, PauliString::single(n, s, Letter::Z)?));
        }
        LocalOperator::from_real_terms(n, terms)
    }

    /// The common `a` when every site carries the same operator.
    fn uniform_over_all(&self) -> Option<M2> {
        let first = *self.ops.first()?;
        let same = self
            .ops
            .iter()
            .all(|m| (m - first).iter().all(|c| c.norm() <= HERMITIAN_TOL));
        (self.sites.len() == self.n_sites && same).then_some(first)
    }

    /// Per-site eigenvalues `d_i(s)` over all sites (zero off `L`) and the
    /// matching eigenbases.
    fn site_spectra(&self) -> (Vec<[f64; 2]>, Vec<M2>) {
        let mut vals = vec![[0.0; 2]; self.n_sites];
        let mut bases = vec![M2::identity(); self.n_sites];
        for (&s, m) in self.sites.iter().zip(&self.ops) {
            let (v, u) = local_eigen(m);
            vals[s] = v;
            bases[s] = u;
        }
        (vals, bases)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditiveSpectralMeasure {
    pub values: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub median: f64,
    pub mean: f64,
    pub variance: f64,
}

impl AdditiveSpectralMeasure {
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.probabilities)
            .filter(|(v, _)| **v <= x + VALUE_BIN)
            .map(|(_, p)| p)
            .sum()
    }
}

fn require_full(psi: &StateVector) -> Result<()> {
    if let Representation::CollectiveSpin { .. } = psi.representation() {
        return Err(Error::UnsupportedRepresentation("collective-spin"));
    }
    Ok(())
}

/// Amplitudes of `ψ` in the tensor product of local eigenbases, with the
/// additive eigenvalue of every basis state.
fn rotated(a: &AdditiveOperator, psi: &StateVector) -> Result<(Vec<Complex64>, Vec<f64>)> {
    require_full(psi)?;
    if psi.n_sites() != a.n_sites {
        return Err(Error::DimensionMismatch {
            expected: a.n_sites,
            found: psi.n_sites(),
        });
    }
    let (vals, bases) = a.site_spectra();
    let mut t = psi.amplitudes().to_vec();
    for &s in &a.sites {
        let u = &bases[s];
        let bit = 1usize << s;
        for b in 0..t.len() {
            if b & bit == 0 {
                let (x0, x1) = (t[b], t[b | bit]);
                t[b] = u[(0, 0)].conj() * x0 + u[(1, 0)].conj() * x1;
                t[b | bit] = u[(0, 1)].conj() * x0 + u[(1, 1)].conj() * x1;
            }
        }
    }
    let values = (0..t.len())
        .map(|b| a.sites.iter().map(|&s| vals[s][(b >> s) & 1]).sum())
        .collect();
    Ok((t, values))
}

pub fn additive_measure(a: &AdditiveOperator, psi: &StateVector) -> Result<AdditiveSpectralMeasure> {
    let (t, vals) = rotated(a, psi)?;
    let total: f64 = t.iter().map(|c| c.norm_sqr()).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("state norm² = {total}, expected 1")));
    }
    let mut pairs: Vec<(f64, f64)> = vals.iter().copied().zip(t.iter().map(|c| c.norm_sqr())).collect();
    let mean: f64 = pairs.iter().map(|(v, p)| v * p).sum();
    let variance: f64 = pairs.iter().map(|(v, p)| (v - mean).powi(2) * p).sum();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut values: Vec<f64> = Vec::new();
    let mut probabilities: Vec<f64> = Vec::new();
    let mut start = f64::NEG_INFINITY;
    for (v, p) in pairs {
        if v - start > VALUE_BIN {
            start = v;
            values.push(v);
            probabilities.push(p);
        } else {
            *probabilities.last_mut().expect("bin opened") += p;
        }
    }
    let (values, probabilities): (Vec<f64>, Vec<f64>) = values
        .into_iter()
        .zip(probabilities)
        .filter(|(_, p)| *p > SUPPORT_FLOOR)
        .unzip();
    let mut acc = 0.0;
    let mut median = *values.last().expect("non-empty spectrum");
    for (v, p) in values.iter().zip(&probabilities) {
        acc += p;
        if acc >= 0.5 - 1e-12 {
            median = *v;
            break;
        }
    }
    Ok(AdditiveSpectralMeasure {
        values,
        probabilities,
        median,
        mean,
        variance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TailDirection {
    AtLeast,
    AtMost,
}

/// `‖Π^A_{≥x} ψ‖` or `‖Π^A_{≤x} ψ‖`.
pub fn tail_norm(m: &AdditiveSpectralMeasure, x: f64, dir: TailDirection) -> f64 {
    m.values
        .iter()
        .zip(&m.probabilities)
        .filter(|(v, _)| match dir {
            TailDirection::AtLeast => **v >= x - VALUE_BIN,
            TailDirection::AtMost => **v <= x + VALUE_BIN,
        })
        .map(|(_, p)| p)
        .sum::<f64>()
        .sqrt()
}

/// Mean and variance of `A_L` in `ψ`. Collective-spin states are supported
/// when the same `a` acts on every site.
pub fn additive_moments(a: &AdditiveOperator, psi: &StateVector) -> Result<(f64, f64)> {
    match psi.representation() {
        Representation::Full => {
            let m = additive_measure(a, psi)?;
            Ok((m.mean, m.variance))
        }
        Representation::CollectiveSpin { sector_dim } => {
            let am = a
                .uniform_over_all()
                .ok_or(Error::UnsupportedRepresentation("collective-spin with a non-uniform additive operator"))?;
            let [a0, vx, vy, vz] = pauli_coefficients(&am);
            let n = psi.n_sites();
            let s = n as f64 / 2.0;
            let x = psi.amplitudes();
            // y = (v·S) ψ, S_± = S_x ± i S_y
            let up = cz(vx / 2.0, -vy / 2.0);
            let down = cz(vx / 2.0, vy / 2.0);
            let mut y = vec![cz(0.0, 0.0); sector_dim];
            for j in 0..sector_dim {
                let m = j as f64 - s;
                y[j] += x[j] * vz * m;
                if j + 1 < sector_dim {
                    y[j + 1] += x[j] * up * ladder(s, m);
                }
                if j >= 1 {
                    y[j - 1] += x[j] * down * ladder(s, m - 1.0);
                }
            }
            let nrm: f64 = x.iter().map(|c| c.norm_sqr()).sum();
            let ev: f64 = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / nrm;
            let sq: f64 = y.iter().map(|c| c.norm_sqr()).sum::<f64>() / nrm;
            Ok((n as f64 * a0 + 2.0 * ev, 4.0 * (sq - ev * ev).max(0.0)))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TailProfilePoint {
    pub h: f64,
    pub tail: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailProfile {
    pub mean: f64,
    pub points: Vec<TailProfilePoint>,
    /// Tail range used for the fit; widened to `[1e-8, 1]` when the
    /// default window holds fewer than two points.
    pub fit_window: (f64, f64),
    /// `−d log‖Π_{≥⟨A⟩+h}Ω‖/dh` over the fit window, if it holds two points.
    pub fitted_rate: Option<f64>,
    pub fit: Option<LineFit>,
    /// `√(δE/|L|)`.
    pub reference_rate: f64,
}

/// Upper-tail norms of `A_L` above its ground-state mean.
pub fn ground_tail_profile(ground: &GroundSolution, a: &AdditiveOperator) -> Result<TailProfile> {
    let omega = ground.require_unique()?;
    let m = additive_measure(a, omega)?;
    let mut points = vec![TailProfilePoint {
        h: 0.0,
        tail: tail_norm(&m, m.mean, TailDirection::AtLeast),
    }];
    for &v in m.values.iter().filter(|&&v| v > m.mean + VALUE_BIN) {
        points.push(TailProfilePoint {
            h: v - m.mean,
            tail: tail_norm(&m, v, TailDirection::AtLeast),
        });
    }
    let in_window = |w: (f64, f64)| -> (Vec<f64>, Vec<f64>) {
        points
            .iter()
            .filter(|p| p.h > 0.0 && p.tail >= w.0 && p.tail <= w.1)
            .map(|p| (p.h, p.tail.ln()))
            .unzip()
    };
    // small systems may never reach the deep tail
    let mut fit_window = FIT_WINDOW;
    let (mut hs, mut ls) = in_window(fit_window);
    if hs.len() < 2 {
        fit_window = (FIT_WINDOW.0, 1.0);
        (hs, ls) = in_window(fit_window);
    }
    let fit = fit_line(&hs, &ls).ok();
    Ok(TailProfile {
        mean: m.mean,
        points,
        fit_window,
        fitted_rate: fit.as_ref().map(|f| -f.slope),
        fit,
        reference_rate: (ground.gap / a.l_size().max(1) as f64).sqrt(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Tradeoff {
    pub delta_e: f64,
    pub variance: f64,
    pub l_size: usize,
    /// `δE (ΔA_L)² / |L|`.
    pub ratio: f64,
}

pub fn gap_variance_tradeoff(spec: &HamiltonianSpec, ground: &GroundSolution, a: &AdditiveOperator) -> Result<Tradeoff> {
    let omega = ground.require_unique()?;
    if spec.n_sites() != a.n_sites {
        return Err(Error::DimensionMismatch {
            expected: spec.n_sites(),
            found: a.n_sites,
        });
    }
    let (_, variance) = additive_moments(a, omega)?;
    let l = a.l_size();
    Ok(Tradeoff {
        delta_e: ground.gap,
        variance,
        l_size: l,
        ratio: ground.gap * variance / l.max(1) as f64,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectorLocalityReport {
    pub q: usize,
    pub h: f64,
    pub strings_checked: usize,
    /// Largest Frobenius bound on `‖Π^A_{≥m+h} P Π^A_{≤m}‖` over strings and `m`.
    pub max_block_norm: f64,
    pub violations: usize,
}

impl ProjectorLocalityReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// For every Pauli string `P` of weight ≤ q, bounds `‖Π^A_{≥m+h} P Π^A_{≤m}‖`
/// uniformly in `m` by the Frobenius norm of all matrix elements of `P`
/// between `A`-eigenstates whose values differ by at least `h`. A q-local
/// `O` is a combination of such strings, so zero blocks for every string
/// mean zero blocks for every `O`.
pub fn projector_locality_check(a: &AdditiveOperator, q: usize, h: f64) -> Result<ProjectorLocalityReport> {
    let n = a.n_sites;
    if n > PROJECTOR_LOCALITY_MAX_SITES {
        return Err(Error::DimensionLimit {
            what: "exhaustive projector-locality check sites",
            requested: n,
            limit: PROJECTOR_LOCALITY_MAX_SITES,
        });
    }
    let (vals, bases) = a.site_spectra();
    let d = 1usize << n;
    let value = |b: usize| -> f64 { (0..n).map(|s| vals[s][(b >> s) & 1]).sum() };
    let v: Vec<f64> = (0..d).map(value).collect();
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|r| (0..d).map(move |c| (r, c)))
        .filter(|&(r, c)| v[r] - v[c] >= h - VALUE_BIN)
        .collect();
    // U_s† σ U_s for every site and letter
    let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    let rot: Vec<[M2; 4]> = bases
        .iter()
        .map(|u| letters.map(|l| u.adjoint() * pauli_matrix(l) * u))
        .collect();
    let strings = enumerate_q_local_basis(n, q.min(n), None, None)?;
    let mut report = ProjectorLocalityReport {
        q,
        h,
        strings_checked: strings.len(),
        max_block_norm: 0.0,
        violations: 0,
    };
    for p in &strings {
        let idx: Vec<usize> = (0..n).map(|s| p.letter(s) as usize).collect();
        let mut fro = 0.0;
        for &(r, c) in &pairs {
            let mut e = cz(1.0, 0.0);
            for s in 0..n {
                e *= rot[s][idx[s]][((r >> s) & 1, (c >> s) & 1)];
            }
            fro += e.norm_sqr();
        }
        let fro = fro.sqrt();
        report.max_block_norm = report.max_block_norm.max(fro);
        if fro > 1e-10 {
            report.violations += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_special_state, SpecialState};

    fn plus(n: usize) -> StateVector {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::product(&vec![[cz(r, 0.0), cz(r, 0.0)]; n]).unwrap()
    }

    #[test]
    fn point_mass() {
        let a = AdditiveOperator::pauli_sum(4, &[0, 1, 2, 3], Letter::Z).unwrap();
        let m = additive_measure(&a, &StateVector::basis(4, 0).unwrap()).unwrap();
        assert_eq!(m.values.len(), 1);
        assert!((m.median - 4.0).abs() < 1e-12 && m.variance.abs() < 1e-12);
    }

    #[test]
    fn binomial_coins() {
        let n = 6;
        let a = AdditiveOperator::pauli_sum(n, &(0..n).collect::<Vec<_>>(), Letter::Z).unwrap();
        let m = additive_measure(&a, &plus(n)).unwrap();
        assert_eq!(m.values.len(), n + 1);
        for (k, (v, p)) in m.values.iter().zip(&m.probabilities).enumerate() {
            let binom = (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
            assert!((v - (2 * k) as f64 + n as f64).abs() < 1e-12);
            assert!((p - binom / 64.0).abs() < 1e-12);
        }
        assert!((m.variance - n as f64).abs() < 1e-12);
        assert!(m.median.abs() < 1e-12);
    }

    #[test]
    fn ghz_two_points() {
        let n = 5;
        let g = make_special_state(&SpecialState::Ghz(n)).unwrap();
        let a = AdditiveOperator::pauli_sum(n, &(0..n).collect::<Vec<_>>(), Letter::Z).unwrap();
        let m = additive_measure(&a, &g).unwrap();
        assert_eq!(m.values, vec![-5.0, 5.0]);
        assert!((m.variance - 25.0).abs() < 1e-12);
        assert_eq!(m.median, -5.0);
        assert!((tail_norm(&m, 1e-6, TailDirection::AtLeast) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((tail_norm(&m, -10.0, TailDirection::AtLeast) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_certification() {
        let big = pauli_matrix(Letter::Z) * cz(1.5, 0.0);
        assert!(AdditiveOperator::new(2, vec![0], vec![big], "x").is_err());
        let nonh = M2::new(cz(0.0, 0.0), cz(0.5, 0.0), cz(0.0, 0.0), cz(0.0, 0.0));
        assert!(AdditiveOperator::new(2, vec![0], vec![nonh], "x").is_err());
        assert!(AdditiveOperator::pauli_sum(2, &[0, 0], Letter::Z).is_err());
    }

    #[test]
    fn collective_moments_match_full() {
        let n = 5;
        let g = make_special_state(&SpecialState::Ghz(n)).unwrap();
        let mut amps = vec![cz(0.0, 0.0); n + 1];
        let r = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = cz(r, 0.0);
        amps[n] = cz(r, 0.0);
        let c = StateVector::collective(n, amps).unwrap();
        for l in [Letter::X, Letter::Y, Letter::Z] {
            let a = AdditiveOperator::pauli_sum(n, &(0..n).collect::<Vec<_>>(), l).unwrap();
            let (m1, v1) = additive_moments(&a, &g).unwrap();
            let (m2, v2) = additive_moments(&a, &c).unwrap();
            assert!((m1 - m2).abs() < 1e-12 && (v1 - v2).abs() < 1e-10, "{l:?}: {v1} vs {v2}");
        }
    }
}
