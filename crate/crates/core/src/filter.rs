//! Scaled Chebyshev filter `F_R` used as the reverse-operator polynomial.
//!
//! `F_R(x) = T_{n0}((x − δE)/E_c − 1) / T_{n0}(−δE/E_c − 1)` maps the
//! window `[δE, 2E_c + δE]` onto `[−1, 1]` and is pinned to `F_R(0) = 1`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::models::HamiltonianSpec;
use crate::operator::StateVector;

/// Chebyshev polynomial of the first kind.
pub fn chebyshev_t(n: u32, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        (n as f64 * x.acos()).cos()
    } else {
        let v = (n as f64 * x.abs().acosh()).cosh();
        if x < 0.0 && n % 2 == 1 {
            -v
        } else {
            v
        }
    }
}

/// Three-term recurrence, used as an oracle and for small `n`.
pub fn chebyshev_t_recurrence(n: u32, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut a, mut b) = (1.0, x);
            for _ in 1..n {
                let c = 2.0 * x * b - a;
                a = b;
                b = c;
            }
            b
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ChebyBoundsReport {
    pub n: u32,
    pub samples: usize,
    /// `max |T_n|` on `[−1, 1]` minus 1.
    pub worst_inner: f64,
    /// `max (|T_n(x)| − (2|x|)^n/2)/scale` over `|x| ≥ 1`.
    pub worst_upper: f64,
    /// `max (lower(x) − |T_n(x)|)/scale` over `|x| ≥ 1`.
    pub worst_lower: f64,
    pub violations: usize,
}

/// Relative slack for the two outer bounds; they are equalities at
/// `|x| = 1` for `n = 1`.
const BOUND_RTOL: f64 = 1e-12;

/// Checks `|T_n| ≤ 1` on `[−1,1]` and
/// `exp(2n√((|x|−1)/(|x|+1)))/2 ≤ |T_n(x)| ≤ (2|x|)^n/2` for `|x| ≥ 1`.
/// `x_max` bounds the outer sample range.
pub fn verify_cheby_bounds(n: u32, sample_count: usize, x_max: f64) -> ChebyBoundsReport {
    let mut r = ChebyBoundsReport {
        n,
        samples: sample_count,
        worst_inner: f64::NEG_INFINITY,
        worst_upper: f64::NEG_INFINITY,
        worst_lower: f64::NEG_INFINITY,
        violations: 0,
    };
    let m = sample_count.max(2);
    for i in 0..m {
        let x = -1.0 + 2.0 * i as f64 / (m - 1) as f64;
        let d = chebyshev_t(n, x).abs() - 1.0;
        r.worst_inner = r.worst_inner.max(d);
        if d > 1e-12 {
            r.violations += 1;
        }
    }
    for i in 0..m {
        let a = 1.0 + (x_max - 1.0) * i as f64 / (m - 1) as f64;
        for x in [a, -a] {
            let t = chebyshev_t(n, x).abs();
            let up = 0.5 * (2.0 * x.abs()).powi(n as i32);
            let lo = 0.5 * (2.0 * n as f64 * ((x.abs() - 1.0) / (x.abs() + 1.0)).sqrt()).exp();
            let du = (t - up) / up;
            let dl = (lo - t) / t;
            r.worst_upper = r.worst_upper.max(du);
            r.worst_lower = r.worst_lower.max(dl);
            if du > BOUND_RTOL || dl > BOUND_RTOL {
                r.violations += 1;
            }
        }
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FilterParams {
    pub q: usize,
    pub k: usize,
    pub n0: usize,
    pub g: f64,
    pub l_size: usize,
    pub delta_e: f64,
    pub e_c: f64,
    pub xi: f64,
    pub lambda: f64,
}

impl FilterParams {
    pub fn new(q: usize, k: usize, g: f64, l_size: usize, delta_e: f64) -> Result<FilterParams> {
        Self::build(q, k, g, l_size, delta_e, true)
    }

    /// Variant with the `8gkn0` term of `E_c` removed; exists only to show
    /// that the check suite notices a broken window.
    pub fn new_without_depth_term(
        q: usize,
        k: usize,
        g: f64,
        l_size: usize,
        delta_e: f64,
    ) -> Result<FilterParams> {
        Self::build(q, k, g, l_size, delta_e, false)
    }

    fn build(q: usize, k: usize, g: f64, l_size: usize, delta_e: f64, depth: bool) -> Result<FilterParams> {
        if !(delta_e > 0.0) {
            return Err(Error::Gapless(delta_e));
        }
        if k == 0 {
            return Err(invalid("k must be >= 1"));
        }
        if !(g > 0.0) || !g.is_finite() {
            return Err(invalid("g must be positive"));
        }
        if l_size == 0 {
            return Err(invalid("|L| must be >= 1"));
        }
        let n0 = q / k;
        let e_c = g * l_size as f64 + if depth { 8.0 * g * k as f64 * n0 as f64 } else { 0.0 };
        Ok(FilterParams {
            q,
            k,
            n0,
            g,
            l_size,
            delta_e,
            e_c,
            xi: (1.0 + 2.0 * e_c / delta_e).sqrt(),
            lambda: 1.0 / (4.0 * g * k as f64),
        })
    }

    /// `n0 = 0`: the filter is the constant 1.
    pub fn is_trivial(&self) -> bool {
        self.n0 == 0
    }

    /// `2 e^{−2 n0/ξ}`.
    pub fn window_cap(&self) -> f64 {
        2.0 * (-2.0 * self.n0 as f64 / self.xi).exp()
    }

    pub fn window(&self) -> (f64, f64) {
        (self.delta_e, 2.0 * self.e_c + self.delta_e)
    }

    fn mapped(&self, x: f64) -> f64 {
        (x - self.delta_e) / self.e_c - 1.0
    }

    /// `T_{n0}(−δE/E_c − 1)`.
    pub fn normalizer(&self) -> f64 {
        chebyshev_t(self.n0 as u32, self.mapped(0.0))
    }
}

pub fn filter_params(q: usize, k: usize, g: f64, l_size: usize, delta_e: f64) -> Result<FilterParams> {
    FilterParams::new(q, k, g, l_size, delta_e)
}

pub fn eval_filter(p: &FilterParams, x: f64) -> f64 {
    chebyshev_t(p.n0 as u32, p.mapped(x)) / p.normalizer()
}

/// `((2x − 2δE)/E_c − 2)^{n0} · e^{−2n0/ξ}`, the growth bound above the window.
pub fn high_range_bound(p: &FilterParams, x: f64) -> f64 {
    let base = (2.0 * x - 2.0 * p.delta_e) / p.e_c - 2.0;
    base.powi(p.n0 as i32) * (-2.0 * p.n0 as f64 / p.xi).exp()
}

#[derive(Clone, Debug, Serialize)]
pub struct FilterReport {
    pub f_at_zero: f64,
    pub window_sup: f64,
    pub window_cap: f64,
    pub samples: usize,
}

/// Samples `|F_R|` uniformly on the window.
pub fn filter_report(p: &FilterParams, samples: usize) -> FilterReport {
    let (a, b) = p.window();
    let m = samples.max(2);
    let sup = (0..m)
        .map(|i| eval_filter(p, a + (b - a) * i as f64 / (m - 1) as f64).abs())
        .fold(0.0, f64::max);
    FilterReport {
        f_at_zero: eval_filter(p, 0.0),
        window_sup: sup,
        window_cap: p.window_cap(),
        samples: m,
    }
}

/// Norm guard for the vector recurrence.
pub const OVERFLOW_GUARD: f64 = 1e150;

/// `F_R(H)|ψ>` by the vector Chebyshev recurrence on
/// `Y = (H − δE)/E_c − I`; `spec` must already be shifted to `E_0 = 0`.
pub fn apply_filter(p: &FilterParams, spec: &HamiltonianSpec, psi: &StateVector) -> Result<StateVector> {
    if p.n0 == 0 {
        return Ok(psi.clone());
    }
    let apply_y = |v: &StateVector| -> Result<StateVector> {
        let mut hv = spec.apply(v)?;
        let a = Complex64::new(1.0 / p.e_c, 0.0);
        let b = Complex64::new(-(p.delta_e / p.e_c) - 1.0, 0.0);
        hv.scale(a);
        hv.axpy(b, v)?;
        Ok(hv)
    };
    let mut t_prev = psi.clone();
    let mut t_cur = apply_y(psi)?;
    for _ in 1..p.n0 {
        let mut next = apply_y(&t_cur)?;
        next.scale(Complex64::new(2.0, 0.0));
        next.axpy(Complex64::new(-1.0, 0.0), &t_prev)?;
        let nn = next.norm();
        if !nn.is_finite() || nn > OVERFLOW_GUARD {
            return Err(Error::RangeOverflow(nn));
        }
        t_prev = t_cur;
        t_cur = next;
    }
    Ok(t_cur.scaled(Complex64::new(1.0 / p.normalizer(), 0.0)))
}

#[derive(Clone, Debug, Serialize)]
pub struct HighRangePoint {
    pub x: f64,
    pub abs_filter: f64,
    /// `((2x − 2δE)/E_c − 2)^{n0} e^{−2n0/ξ}`.
    pub growth_bound: f64,
    /// `|F_R(x)| e^{−λ(x − 2g|L|)}`.
    pub damped: f64,
    /// `e^{−2n0/ξ} e^{−λ(x − 2g|L|)/2}`.
    pub damped_bound: f64,
    pub g_two: f64,
    pub g_six: f64,
    /// `G_2(x) ≤ 0` and `damped ≤ damped_bound`.
    pub holds_two: bool,
    /// `G_6(x) ≤ 0`.
    pub holds_six: bool,
    pub growth_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HighRangeReport {
    pub points: Vec<HighRangePoint>,
    pub g_at_window_edge: f64,
    pub g_at_window_edge_closed_form: f64,
    pub all_two: bool,
    pub all_six: bool,
    pub all_growth: bool,
}

/// Damped-growth exponent above the window with reference energy `c·g|L|`:
/// `G_c(x) = −λ/2 (x − c g|L|) + n0 ln((2x − 2δE)/E_c − 2)`.
pub fn damped_exponent(p: &FilterParams, x: f64, c: f64) -> f64 {
    let base = (2.0 * x - 2.0 * p.delta_e) / p.e_c - 2.0;
    -p.lambda / 2.0 * (x - c * p.g * p.l_size as f64) + p.n0 as f64 * base.ln()
}

/// Evaluates the growth bound and the damped product above the window.
/// With `G_2 ≤ 0` the growth bound gives
/// `|F_R(x)| e^{−λ(x−2g|L|)} ≤ e^{−2n0/ξ} e^{−λ(x−2g|L|)/2}`; both the
/// `2g|L|` and `6g|L|` reference variants of `G` are reported.
pub fn high_range_product_check(p: &FilterParams, x_grid: &[f64]) -> Result<HighRangeReport> {
    let edge = p.window().1;
    let gl = p.g * p.l_size as f64;
    let decay = (-2.0 * p.n0 as f64 / p.xi).exp();
    let mut points = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        if x < edge - 1e-9 * edge.abs().max(1.0) {
            return Err(invalid(format!("grid point {x} lies below 2E_c + δE = {edge}")));
        }
        let f = eval_filter(p, x).abs();
        let growth = high_range_bound(p, x);
        let damped = f * (-p.lambda * (x - 2.0 * gl)).exp();
        let damped_bound = decay * (-p.lambda * (x - 2.0 * gl) / 2.0).exp();
        let two = damped_exponent(p, x, 2.0);
        let six = damped_exponent(p, x, 6.0);
        points.push(HighRangePoint {
            x,
            abs_filter: f,
            growth_bound: growth,
            damped,
            damped_bound,
            g_two: two,
            g_six: six,
            holds_two: two <= 0.0 && damped <= damped_bound * (1.0 + 1e-12),
            holds_six: six <= 0.0,
            growth_ok: f <= growth * (1.0 + 1e-12),
        });
    }
    let n0 = p.n0 as f64;
    Ok(HighRangeReport {
        all_two: points.iter().all(|q| q.holds_two),
        all_six: points.iter().all(|q| q.holds_six),
        all_growth: points.iter().all(|q| q.growth_ok),
        g_at_window_edge: damped_exponent(p, edge, 2.0),
        g_at_window_edge_closed_form: -2.0 * n0 - p.lambda * p.delta_e / 2.0 + n0 * 2f64.ln(),
        points,
    })
}
