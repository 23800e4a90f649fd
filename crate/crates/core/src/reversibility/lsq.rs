//! Least-squares search for the best q-local reverse operator.
//!
//! The set `{R|φ⟩ : R q-local}` is a linear subspace; the best residual is
//! the distance from the target to it. Three routes compute that distance:
//!
//! * `Gram` — explicit Pauli images, Gram matrix, eigen pseudo-inverse.
//!   Small bases only; the only route that yields Pauli coefficients.
//! * `Schmidt` — no basis at all. Operators on a support `X` applied to
//!   `φ` span exactly `H_X ⊗ rowspace(Φ_X)` with `Φ_X` the `X | X^c`
//!   reshaping of `φ`, so the span is the sum of those blocks over all
//!   `|X| = q`, i.e. the range of `M = Σ_X Π_X` with `Π_X` the block
//!   projectors. A pivoted Cholesky factor of `M` spans `range(M)` up to
//!   the pivot cutoff, so the projection is achievable by construction.
//! * `Stream` — explicit images (needed for symmetry filtering) merged by
//!   the same block Gram–Schmidt, without forming a Gram matrix.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::operator::basis::for_each_combination;
use crate::operator::pauli::scatter;
use crate::operator::state::dot;
use crate::operator::{apply_pauli, enumerate_q_local_basis, q_local_count, PauliString, StateVector};

/// Relative eigenvalue cutoff of the Gram pseudo-inverse.
pub const GRAM_CUTOFF: f64 = 1e-10;
/// Largest explicit basis accepted by any route.
pub const MAX_BASIS: usize = 20_000;
/// `Auto` picks `Gram` up to this basis size.
pub const GRAM_ROUTE_LIMIT: usize = 1024;
/// Largest basis `Gram` accepts when requested explicitly.
pub const GRAM_LIMIT: usize = 2048;
/// Subspace routes keep an explicit orthonormal basis of the span.
pub const SUBSPACE_MAX_SITES: usize = 12;
/// Candidates whose projected norm falls below this are dependent.
const DROP_TOL: f64 = 1e-8;
/// Relative singular-value cutoff for the Schmidt row spaces.
const SCHMIDT_CUTOFF: f64 = 1e-10;
const STREAM_BLOCK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LsqRoute {
    Auto,
    Gram,
    Schmidt,
    Stream,
}

#[derive(Clone, Debug)]
pub struct LsqOptions {
    /// Restrict supports to these sites.
    pub region: Option<Vec<usize>>,
    /// Keep only strings commuting with every generator.
    pub symmetry: Option<Vec<PauliString>>,
    pub route: LsqRoute,
    pub max_basis: usize,
}

impl Default for LsqOptions {
    fn default() -> Self {
        LsqOptions {
            region: None,
            symmetry: None,
            route: LsqRoute::Auto,
            max_basis: MAX_BASIS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LsqOutcome {
    pub residual: f64,
    /// The best achievable `R|φ⟩`.
    pub fitted: StateVector,
    /// Dimension of the span actually resolved.
    pub span_dim: usize,
    pub route: LsqRoute,
    /// Explicit basis size (`Gram`/`Stream`).
    pub basis_size: Option<usize>,
    /// Pauli coefficients of one optimal `R` (`Gram` only).
    pub coefficients: Option<Vec<(PauliString, Complex64)>>,
    /// `max_X ‖Π_X r‖/‖r‖` for the final residual `r` (`Schmidt` only);
    /// zero exactly when `r` is orthogonal to the whole span.
    pub optimality_defect: Option<f64>,
}

fn sorted_region(n: usize, region: Option<&[usize]>) -> Result<Vec<usize>> {
    match region {
        None => Ok((0..n).collect()),
        Some(r) => {
            let mut r = r.to_vec();
            r.sort_unstable();
            r.dedup();
            if r.iter().any(|&s| s >= n) {
                return Err(invalid("region site out of range"));
            }
            Ok(r)
        }
    }
}

fn dimension_limit(what: &'static str, requested: usize, limit: usize) -> Error {
    Error::DimensionLimit { what, requested, limit }
}

/// Minimizes `‖R|input⟩ − |target⟩‖` over q-local `R`.
pub fn least_squares_reverse(
    target: &StateVector,
    input: &StateVector,
    q: usize,
    opts: &LsqOptions,
) -> Result<LsqOutcome> {
    if !target.is_full() || !input.is_full() {
        return Err(Error::UnsupportedRepresentation("collective-spin"));
    }
    target.check_compatible(input)?;
    let n = target.n_sites();
    let region = sorted_region(n, opts.region.as_deref())?;
    let q = q.min(region.len());
    let symmetric = opts.symmetry.is_some();

    let route = match opts.route {
        LsqRoute::Schmidt if symmetric => {
            return Err(invalid("the Schmidt route cannot apply a symmetry filter"));
        }
        LsqRoute::Auto => {
            if !symmetric && q_local_count(region.len(), q) > GRAM_ROUTE_LIMIT {
                LsqRoute::Schmidt
            } else {
                LsqRoute::Auto
            }
        }
        r => r,
    };
    if route == LsqRoute::Schmidt {
        if n > SUBSPACE_MAX_SITES {
            return Err(dimension_limit("subspace least-squares sites", n, SUBSPACE_MAX_SITES));
        }
        return schmidt_route(target, input, q, &region);
    }

    let raw = q_local_count(region.len(), q);
    if raw > 64 * opts.max_basis {
        return Err(dimension_limit("q-local basis size", raw, opts.max_basis));
    }
    let basis = enumerate_q_local_basis(n, q, Some(&region), opts.symmetry.as_deref())?;
    if basis.len() > opts.max_basis {
        return Err(dimension_limit("q-local basis size", basis.len(), opts.max_basis));
    }
    let route = match route {
        LsqRoute::Auto if basis.len() <= GRAM_ROUTE_LIMIT => LsqRoute::Gram,
        LsqRoute::Auto => LsqRoute::Stream,
        r => r,
    };
    match route {
        LsqRoute::Gram => {
            if basis.len() > GRAM_LIMIT {
                return Err(dimension_limit("Gram least-squares basis", basis.len(), GRAM_LIMIT));
            }
            gram_route(target, input, basis)
        }
        _ => {
            if n > SUBSPACE_MAX_SITES {
                return Err(dimension_limit("subspace least-squares sites", n, SUBSPACE_MAX_SITES));
            }
            stream_route(target, input, &basis)
        }
    }
}

fn gram_route(target: &StateVector, input: &StateVector, basis: Vec<PauliString>) -> Result<LsqOutcome> {
    let images: Vec<Vec<Complex64>> = basis
        .par_iter()
        .map(|p| apply_pauli(p, input).map(|v| v.into_amplitudes()))
        .collect::<Result<_>>()?;
    let m = images.len();
    let rows: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|i| (i..m).map(|j| dot(&images[i], &images[j])).collect())
        .collect();
    let mut g = DMatrix::<Complex64>::zeros(m, m);
    for (i, row) in rows.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + off;
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    let b = DVector::from_iterator(m, images.iter().map(|v| dot(v, target.amplitudes())));
    let eig = SymmetricEigen::new(g);
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let mut c = DVector::<Complex64>::zeros(m);
    let mut kept = 0;
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lmax > 0.0 && lam > GRAM_CUTOFF * lmax {
            let u = eig.eigenvectors.column(k);
            let w = u.dotc(&b) / lam;
            c.axpy(w, &u, Complex64::new(1.0, 0.0));
            kept += 1;
        }
    }
    let mut fitted = vec![Complex64::new(0.0, 0.0); target.dim()];
    for (ci, img) in c.iter().zip(&images) {
        if *ci != Complex64::new(0.0, 0.0) {
            for (f, v) in fitted.iter_mut().zip(img) {
                *f += ci * v;
            }
        }
    }
    let fitted = target.with_amplitudes(fitted)?;
    let residual = fitted.distance(target)?;
    Ok(LsqOutcome {
        residual,
        fitted,
        span_dim: kept,
        route: LsqRoute::Gram,
        basis_size: Some(m),
        coefficients: Some(basis.into_iter().zip(c.iter().copied()).collect()),
        optimality_defect: None,
    })
}

/// Incrementally grown orthonormal basis of a subspace of `T^d`.
struct Orthobasis<T: ComplexField<RealField = f64> + Copy> {
    q: DMatrix<T>,
    rank: usize,
}

impl<T: ComplexField<RealField = f64> + Copy> Orthobasis<T> {
    fn new(d: usize) -> Self {
        Orthobasis {
            q: DMatrix::zeros(d, d.min(256)),
            rank: 0,
        }
    }

    fn dim(&self) -> usize {
        self.q.nrows()
    }

    fn is_full(&self) -> bool {
        self.rank == self.dim()
    }

    fn project_out(&self, c: &mut DMatrix<T>) {
        if self.rank == 0 {
            return;
        }
        let qv = self.q.columns(0, self.rank);
        for _ in 0..2 {
            let coef = qv.ad_mul(c);
            c.gemm(-T::one(), &qv, &coef, T::one());
        }
    }

    /// Adds the span of the columns of `c` (each of unit norm).
    fn add_block(&mut self, mut c: DMatrix<T>) {
        if self.is_full() {
            return;
        }
        self.project_out(&mut c);
        let start = self.rank;
        for j in 0..c.ncols() {
            let mut v = c.column(j).clone_owned();
            for _ in 0..2 {
                for i in start..self.rank {
                    let qi = self.q.column(i);
                    let h = qi.dotc(&v);
                    v.axpy(-h, &qi, T::one());
                }
            }
            let nv = v.norm();
            if nv > DROP_TOL {
                v.unscale_mut(nv);
                if self.rank == self.q.ncols() {
                    let cap = (2 * self.q.ncols()).min(self.dim());
                    let q = std::mem::replace(&mut self.q, DMatrix::zeros(0, 0));
                    self.q = q.resize_horizontally(cap, T::zero());
                }
                self.q.set_column(self.rank, &v);
                self.rank += 1;
                if self.is_full() {
                    return;
                }
            }
        }
    }

    /// Orthogonal projection of `t` onto the span.
    fn project(&self, t: &DVector<T>) -> DVector<T> {
        if self.is_full() {
            return t.clone();
        }
        let mut r = DMatrix::from_column_slice(t.len(), 1, t.as_slice());
        self.project_out(&mut r);
        t - r.column(0)
    }
}

/// Real representation of `(target, input)` when both are real up to a
/// global phase: `(target phase, real target, real input)`.
fn real_pair(target: &StateVector, input: &StateVector) -> Option<(Complex64, Vec<f64>, Vec<f64>)> {
    let pt = target.real_up_to_phase(1e-12)?;
    let pi = input.real_up_to_phase(1e-12)?;
    let t = target.amplitudes().iter().map(|a| (a * pt.conj()).re).collect();
    let i = input.amplitudes().iter().map(|a| (a * pi.conj()).re).collect();
    Some((pt, t, i))
}

trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync {
    fn to_c(self) -> Complex64;
}

impl Scalar for f64 {
    fn to_c(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn to_c(self) -> Complex64 {
        self
    }
}

fn finish<T: Scalar>(
    target: &StateVector,
    phase: Complex64,
    basis: &Orthobasis<T>,
    t: &DVector<T>,
    route: LsqRoute,
    basis_size: Option<usize>,
) -> Result<LsqOutcome> {
    let proj = basis.project(t);
    let fitted = target.with_amplitudes(proj.iter().map(|a| phase * a.to_c()).collect())?;
    let residual = fitted.distance(target)?;
    Ok(LsqOutcome {
        residual,
        fitted,
        span_dim: basis.rank,
        route,
        basis_size,
        coefficients: None,
        optimality_defect: None,
    })
}

fn schmidt_route(target: &StateVector, input: &StateVector, q: usize, region: &[usize]) -> Result<LsqOutcome> {
    match real_pair(target, input) {
        Some((ph, t, i)) => schmidt_generic::<f64>(target, ph, &t, &i, q, region),
        None => schmidt_generic::<Complex64>(
            target,
            Complex64::new(1.0, 0.0),
            target.amplitudes(),
            input.amplitudes(),
            q,
            region,
        ),
    }
}

/// Orthonormal rows spanning the row space of `input` reshaped as
/// `X | complement`.
fn row_space<T: Scalar>(input: &[T], xs: &[usize], cs: &[usize]) -> DMatrix<T> {
    let (r, c) = (1usize << xs.len(), 1usize << cs.len());
    let phi = DMatrix::from_fn(r, c, |x, y| input[(scatter(x as u64, xs) | scatter(y as u64, cs)) as usize]);
    let svd = phi.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&j| smax > 0.0 && svd.singular_values[j] > SCHMIDT_CUTOFF * smax)
        .collect();
    DMatrix::from_fn(keep.len(), c, |j, y| v_t[(keep[j], y)])
}

/// One block `H_X ⊗ rowspace(Φ_X)`: the amplitude index of `(x, y)` and
/// orthonormal rows `W` with `Π_X v = V W†W` for `V` the reshaped `v`.
struct SchmidtBlock<T> {
    index: Vec<u32>,
    nx: usize,
    w: DMatrix<T>,
}

impl<T: Scalar> SchmidtBlock<T> {
    fn reshape(&self, v: &[T]) -> DMatrix<T> {
        let nc = self.w.ncols();
        DMatrix::from_fn(self.nx, nc, |x, y| v[self.index[x * nc + y] as usize])
    }

    fn projection_norm(&self, v: &[T]) -> f64 {
        (self.reshape(v) * self.w.adjoint()).norm()
    }
}

/// `M = Σ_X Π_X` as a dense matrix.
fn assemble_projector_sum<T: Scalar>(blocks: &[SchmidtBlock<T>], d: usize) -> DMatrix<T> {
    let mut m = DMatrix::<T>::zeros(d, d);
    for b in blocks {
        // Π_X[(x,a),(x,b)] = (W†W)[b,a]
        let p = b.w.adjoint() * &b.w;
        let nc = b.w.ncols();
        for x in 0..b.nx {
            let idx = &b.index[x * nc..(x + 1) * nc];
            for (bb, &col) in idx.iter().enumerate() {
                for (aa, &row) in idx.iter().enumerate() {
                    m[(row as usize, col as usize)] += p[(bb, aa)];
                }
            }
        }
    }
    m
}

/// Blocked pivoted Cholesky of a positive semi-definite matrix: returns
/// `L` (`d × k`, lower trapezoidal) and `perm` with
/// `M[perm[i], perm[j]] ≈ (L L†)[i, j]`, stopping once every remaining
/// pivot is at most `tol · max diag`.
fn pivoted_cholesky<T: Scalar>(mut a: DMatrix<T>, tol: f64) -> (DMatrix<T>, Vec<usize>) {
    const NB: usize = 64;
    let d = a.nrows();
    let mut perm: Vec<usize> = (0..d).collect();
    let maxdiag = (0..d).map(|i| a[(i, i)].real()).fold(0.0, f64::max);
    let stop = tol * maxdiag;
    // panel contributions to the diagonal not yet applied to `a`
    let mut work = vec![0.0f64; d];
    let mut rank = d;
    let mut k = 0;
    'outer: while k < d {
        let kb = NB.min(d - k);
        work.iter_mut().for_each(|w| *w = 0.0);
        for j in k..k + kb {
            let (piv, val) = (j..d)
                .map(|i| (i, a[(i, i)].real() - work[i]))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .expect("non-empty");
            if !(val > stop) {
                rank = j;
                break 'outer;
            }
            if piv != j {
                a.swap_rows(j, piv);
                a.swap_columns(j, piv);
                perm.swap(j, piv);
                work.swap(j, piv);
            }
            let ljj = val.sqrt();
            a[(j, j)] = T::from_real(ljj);
            if j + 1 < d {
                if j > k {
                    let row = a.view((j, k), (1, j - k)).adjoint();
                    let panel = a.view((j + 1, k), (d - j - 1, j - k)).clone_owned();
                    let mut col = a.view_mut((j + 1, j), (d - j - 1, 1));
                    col.gemm(-T::one(), &panel, &row, T::one());
                }
                for i in j + 1..d {
                    a[(i, j)] = a[(i, j)].unscale(ljj);
                    work[i] += a[(i, j)].modulus_squared();
                }
            }
        }
        let e = k + kb;
        if e < d {
            let l21 = a.view((e, k), (d - e, kb)).clone_owned();
            let l21h = l21.adjoint();
            let mut t = a.view_mut((e, e), (d - e, d - e));
            t.gemm(-T::one(), &l21, &l21h, T::one());
        }
        k = e;
    }
    let l = DMatrix::from_fn(d, rank, |i, j| if i >= j { a[(i, j)] } else { T::zero() });
    (l, perm)
}

/// Orthogonal projection of `t` onto `range(L)`, in original coordinates.
fn project_onto_factor_range<T: Scalar>(l: &DMatrix<T>, perm: &[usize], t: &[T]) -> Vec<T> {
    let (d, k) = l.shape();
    let tp = DVector::from_iterator(d, perm.iter().map(|&i| t[i]));
    let fitted_p = if k == 0 {
        DVector::zeros(d)
    } else if k == d {
        tp.clone()
    } else if 2 * k <= d {
        let q = l.clone().qr().q();
        &q * q.ad_mul(&tp)
    } else {
        // null space of L†: [−L1^{-†} L2†; I]
        let l1 = l.rows(0, k).clone_owned();
        let l2h = l.rows(k, d - k).adjoint();
        let x = l1
            .ad_solve_lower_triangular(&l2h)
            .expect("positive pivots keep L1 invertible");
        let mut z = DMatrix::<T>::zeros(d, d - k);
        z.rows_mut(0, k).copy_from(&(-x));
        z.rows_mut(k, d - k).fill_with_identity();
        let q = z.qr().q();
        &tp - &q * q.ad_mul(&tp)
    };
    let mut out = vec![T::zero(); d];
    for (i, &p) in perm.iter().enumerate() {
        out[p] = fitted_p[i];
    }
    out
}

fn vnorm<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|a| a.modulus_squared()).sum::<f64>().sqrt()
}

fn schmidt_generic<T: Scalar>(
    target: &StateVector,
    phase: Complex64,
    t: &[T],
    input: &[T],
    q: usize,
    region: &[usize],
) -> Result<LsqOutcome> {
    let n = target.n_sites();
    let d = target.dim();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for_each_combination(region.len(), q, |c| subsets.push(c.iter().map(|&i| region[i]).collect()));
    let blocks: Vec<SchmidtBlock<T>> = subsets
        .into_par_iter()
        .map(|xs| {
            let cs: Vec<usize> = (0..n).filter(|s| !xs.contains(s)).collect();
            let w = row_space(input, &xs, &cs);
            let (nx, nc) = (1usize << xs.len(), 1usize << cs.len());
            let mut index = Vec::with_capacity(nx * nc);
            for x in 0..nx {
                let hi = scatter(x as u64, &xs);
                for y in 0..nc {
                    index.push((hi | scatter(y as u64, &cs)) as u32);
                }
            }
            SchmidtBlock { index, nx, w }
        })
        .collect();
    // a full-rank cut already spans everything
    let full = blocks.iter().any(|b| b.nx * b.w.nrows() == d);
    let mut rank = d;
    let fitted: Vec<T> = if full {
        t.to_vec()
    } else {
        let m = assemble_projector_sum(&blocks, d);
        let (l, perm) = pivoted_cholesky(m, GRAM_CUTOFF);
        rank = l.ncols();
        project_onto_factor_range(&l, &perm, t)
    };
    let r: Vec<T> = t.iter().zip(&fitted).map(|(a, b)| *a - *b).collect();
    let rn = vnorm(&r);
    let defect = if rn > 0.0 {
        blocks.iter().map(|b| b.projection_norm(&r)).fold(0.0, f64::max) / rn
    } else {
        0.0
    };
    let fitted = target.with_amplitudes(fitted.iter().map(|a| phase * a.to_c()).collect())?;
    let residual = fitted.distance(target)?;
    Ok(LsqOutcome {
        residual,
        fitted,
        span_dim: rank,
        route: LsqRoute::Schmidt,
        basis_size: None,
        coefficients: None,
        optimality_defect: Some(defect),
    })
}

fn stream_route(target: &StateVector, input: &StateVector, strings: &[PauliString]) -> Result<LsqOutcome> {
    match real_pair(target, input) {
        Some((ph, t, _)) => {
            stream_generic::<f64>(target, ph, &t, strings, |p| {
                let img = apply_pauli(p, input)?;
                let ip = img
                    .real_up_to_phase(1e-12)
                    .ok_or_else(|| invalid("Pauli image of a real state lost reality"))?;
                Ok(img.amplitudes().iter().map(|a| (a * ip.conj()).re).collect())
            })
        }
        None => stream_generic::<Complex64>(
            target,
            Complex64::new(1.0, 0.0),
            target.amplitudes(),
            strings,
            |p| Ok(apply_pauli(p, input)?.into_amplitudes()),
        ),
    }
}

fn stream_generic<T: Scalar>(
    target: &StateVector,
    phase: Complex64,
    t: &[T],
    strings: &[PauliString],
    image: impl Fn(&PauliString) -> Result<Vec<T>> + Sync,
) -> Result<LsqOutcome> {
    let d = target.dim();
    let t = DVector::from_column_slice(t);
    let mut basis = Orthobasis::<T>::new(d);
    for chunk in strings.chunks(STREAM_BLOCK) {
        let imgs: Vec<Vec<T>> = chunk.par_iter().map(&image).collect::<Result<_>>()?;
        let mut c = DMatrix::<T>::zeros(d, imgs.len());
        let mut col = 0;
        for v in &imgs {
            let nv = v.iter().map(|a| a.modulus_squared()).sum::<f64>().sqrt();
            if nv > 0.0 {
                c.set_column(col, &DVector::from_iterator(d, v.iter().map(|a| a.unscale(nv))));
                col += 1;
            }
        }
        basis.add_block(c.columns(0, col).clone_owned());
        if basis.is_full() {
            break;
        }
    }
    finish(target, phase, &basis, &t, LsqRoute::Stream, Some(strings.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::states::random_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ghz(n: usize) -> StateVector {
        let mut a = vec![Complex64::new(0.0, 0.0); 1 << n];
        let r = std::f64::consts::FRAC_1_SQRT_2;
        a[0] = Complex64::new(r, 0.0);
        a[(1 << n) - 1] = Complex64::new(r, 0.0);
        StateVector::from_amplitudes(n, a).unwrap()
    }

    #[test]
    fn identity_suffices_for_same_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = random_state(5, &mut rng).unwrap();
        for route in [LsqRoute::Gram, LsqRoute::Schmidt] {
            let o = LsqOptions { route, ..Default::default() };
            let r = least_squares_reverse(&psi, &psi, 0, &o).unwrap();
            assert!(r.residual < 1e-10, "{route:?}: {}", r.residual);
        }
    }

    #[test]
    fn ghz_branch_cannot_be_restored() {
        let g = ghz(6);
        let mut a = vec![Complex64::new(0.0, 0.0); 64];
        a[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let phi = StateVector::from_amplitudes(6, a).unwrap();
        for q in 0..6 {
            let routes: &[LsqRoute] = if q <= 3 { &[LsqRoute::Gram, LsqRoute::Schmidt] } else { &[LsqRoute::Schmidt] };
            for &route in routes {
                let o = LsqOptions { route, ..Default::default() };
                let r = least_squares_reverse(&g, &phi, q, &o).unwrap();
                assert!((r.residual - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9, "q={q} {route:?}");
            }
        }
        let o = LsqOptions::default();
        let r = least_squares_reverse(&g, &phi, 6, &o).unwrap();
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn routes_agree_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 6;
        let t = random_state(n, &mut rng).unwrap();
        // a low-rank input makes the span non-trivial
        let z = Complex64::new(0.0, 0.0);
        let mut a = vec![z; 1 << n];
        a[0] = Complex64::new(0.6, 0.0);
        a[5] = Complex64::new(0.0, 0.8);
        let phi = StateVector::from_amplitudes(n, a).unwrap();
        for q in 0..=3 {
            let res: Vec<f64> = [LsqRoute::Gram, LsqRoute::Schmidt, LsqRoute::Stream]
                .iter()
                .map(|&route| {
                    let o = LsqOptions { route, ..Default::default() };
                    least_squares_reverse(&t, &phi, q, &o).unwrap().residual
                })
                .collect();
            assert!((res[0] - res[1]).abs() < 1e-8, "q={q}: {res:?}");
            assert!((res[0] - res[2]).abs() < 1e-8, "q={q}: {res:?}");
        }
    }

    #[test]
    fn gram_coefficients_reproduce_fit() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = random_state(4, &mut rng).unwrap();
        let phi = random_state(4, &mut rng).unwrap();
        let o = LsqOptions { route: LsqRoute::Gram, ..Default::default() };
        let r = least_squares_reverse(&t, &phi, 1, &o).unwrap();
        let mut acc = t.zeros_like();
        for (p, c) in r.coefficients.as_ref().unwrap() {
            acc.axpy(*c, &apply_pauli(p, &phi).unwrap()).unwrap();
        }
        assert!(acc.distance(&r.fitted).unwrap() < 1e-9);
    }

    #[test]
    fn schmidt_rejects_symmetry() {
        let psi = ghz(3);
        let o = LsqOptions {
            route: LsqRoute::Schmidt,
            symmetry: Some(vec![]),
            ..Default::default()
        };
        assert!(least_squares_reverse(&psi, &psi, 1, &o).is_err());
    }
}
