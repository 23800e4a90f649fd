use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::operator::StateVector;

#[derive(Clone, Debug, PartialEq)]
pub enum SpecialState {
    Ghz(usize),
    W(usize),
    /// `(|0>|0…0> + |1>|W>)/√2` with the first spin on site 0.
    GhzWHybrid(usize),
    Product(Vec<[Complex64; 2]>),
}

pub fn make_special_state(kind: &SpecialState) -> Result<StateVector> {
    match kind {
        SpecialState::Ghz(n) => {
            let n = *n;
            if n < 2 {
                return Err(invalid("GHZ needs n >= 2"));
            }
            let mut s = StateVector::zeros(n)?;
            let r = std::f64::consts::FRAC_1_SQRT_2;
            s.amplitudes_mut()[0] = Complex64::new(r, 0.0);
            s.amplitudes_mut()[(1usize << n) - 1] = Complex64::new(r, 0.0);
            Ok(s)
        }
        SpecialState::W(n) => {
            let n = *n;
            if n < 2 {
                return Err(invalid("W needs n >= 2"));
            }
            let mut s = StateVector::zeros(n)?;
            let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
            for i in 0..n {
                s.amplitudes_mut()[1 << i] = a;
            }
            Ok(s)
        }
        SpecialState::GhzWHybrid(n) => {
            let n = *n;
            if n < 3 {
                return Err(invalid("hybrid state needs n >= 3"));
            }
            let mut s = StateVector::zeros(n)?;
            let r = std::f64::consts::FRAC_1_SQRT_2;
            s.amplitudes_mut()[0] = Complex64::new(r, 0.0);
            let a = Complex64::new(r / ((n - 1) as f64).sqrt(), 0.0);
            for i in 1..n {
                s.amplitudes_mut()[1 | (1 << i)] = a;
            }
            Ok(s)
        }
        SpecialState::Product(sites) => {
            for (i, [a, b]) in sites.iter().enumerate() {
                if ((a.norm_sqr() + b.norm_sqr()) - 1.0).abs() > 1e-10 {
                    return Err(invalid(format!("site {i} state is not normalized")));
                }
            }
            StateVector::product(sites)
        }
    }
}

/// Haar-random single-qubit state.
pub fn random_site_state<R: Rng>(rng: &mut R) -> [Complex64; 2] {
    let v: [f64; 4] = std::array::from_fn(|_| gaussian(rng));
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    [
        Complex64::new(v[0] / n, v[1] / n),
        Complex64::new(v[2] / n, v[3] / n),
    ]
}

/// Random single-qubit state with real amplitudes.
pub fn random_real_site_state<R: Rng>(rng: &mut R) -> [Complex64; 2] {
    let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    [Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0)]
}

/// Haar-random pure state on `n` qubits.
pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Result<StateVector> {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
        .collect();
    StateVector::from_amplitudes(n, amps)?.normalized()
}

/// Uniform point on the unit sphere in three dimensions.
pub fn random_unit3<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| gaussian(rng));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.map(|x| x / n);
        }
    }
}

/// Standard normal sample (Box–Muller).
pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w3_amplitudes() {
        let w = make_special_state(&SpecialState::W(3)).unwrap();
        let a = 1.0 / 3f64.sqrt();
        for idx in [1, 2, 4] {
            assert!((w.amplitudes()[idx].re - a).abs() < 1e-15);
        }
        assert!((w.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hybrid_is_normalized() {
        let h = make_special_state(&SpecialState::GhzWHybrid(4)).unwrap();
        assert!((h.norm() - 1.0).abs() < 1e-12);
        // site 0 is |0> or |1> with probability 1/2 each
        let p1: f64 = h
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(b, _)| b & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        assert!((p1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn small_ghz_rejected() {
        assert!(make_special_state(&SpecialState::Ghz(1)).is_err());
        assert!(make_special_state(&SpecialState::GhzWHybrid(2)).is_err());
    }
}
