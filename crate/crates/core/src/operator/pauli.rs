//! Pauli strings in symplectic (X-mask, Z-mask) form.
//!
//! A string is stored as `i^phase * L_0 ⊗ L_1 ⊗ ...` where each letter
//! `L_s` is one of the Hermitian matrices I, X, Y, Z. Site `s` is bit `s`
//! of both masks; the letter is read off as
//! `(x, z) = (0,0) -> I, (1,0) -> X, (1,1) -> Y, (0,1) -> Z`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Largest number of sites a bitmask string can address.
pub const MAX_SITES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    /// The three non-identity letters in canonical order.
    pub const NON_IDENTITY: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];
}

/// Global phase `i^k`, `k ∈ {0,1,2,3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u32) -> Phase {
        Phase((k % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        i_pow(self.0 as u32)
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }
}

pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_sites: usize,
    x: u64,
    z: u64,
    phase: Phase,
}

fn site_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n_sites: usize) -> Result<PauliString> {
        PauliString::from_masks(n_sites, 0, 0, Phase::ONE)
    }

    pub fn from_masks(n_sites: usize, x: u64, z: u64, phase: Phase) -> Result<PauliString> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(invalid(format!(
                "n_sites must be in 1..={MAX_SITES}, got {n_sites}"
            )));
        }
        let m = site_mask(n_sites);
        if x & !m != 0 || z & !m != 0 {
            return Err(invalid("mask addresses a site beyond n_sites"));
        }
        Ok(PauliString {
            n_sites,
            x,
            z,
            phase,
        })
    }

    /// Builds a string from `(site, letter)` pairs. Repeated sites are
    /// rejected so that the phase convention stays unambiguous.
    pub fn from_letters(n_sites: usize, letters: &[(usize, Letter)]) -> Result<PauliString> {
        let mut x = 0u64;
        let mut z = 0u64;
        let mut seen = 0u64;
        for &(site, letter) in letters {
            if site >= n_sites {
                return Err(invalid(format!("site {site} out of range for {n_sites} sites")));
            }
            let bit = 1u64 << site;
            if seen & bit != 0 {
                return Err(invalid(format!("site {site} listed twice")));
            }
            seen |= bit;
            let (bx, bz) = letter.bits();
            if bx {
                x |= bit;
            }
            if bz {
                z |= bit;
            }
        }
        PauliString::from_masks(n_sites, x, z, Phase::ONE)
    }

    /// Single-site letter.
    pub fn single(n_sites: usize, site: usize, letter: Letter) -> Result<PauliString> {
        PauliString::from_letters(n_sites, &[(site, letter)])
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> PauliString {
        self.phase = phase;
        self
    }

    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    pub fn support(&self) -> Vec<usize> {
        bits_of(self.support_mask())
    }

    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support_mask() == 0
    }

    pub fn letter(&self, site: usize) -> Letter {
        let bit = 1u64 << site;
        Letter::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    /// Exponent `e` with `self = i^e X^x Z^z` (each `Y = i X Z`).
    fn xz_exponent(&self) -> u32 {
        self.phase.0 as u32 + (self.x & self.z).count_ones()
    }

    /// Group product `self * other`.
    pub fn compose(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_sites != other.n_sites {
            return Err(Error::DimensionMismatch {
                expected: self.n_sites,
                found: other.n_sites,
            });
        }
        // X^a Z^b X^c Z^d = (-1)^{|b & c|} X^{a^c} Z^{b^d}
        let e = self.xz_exponent()
            + other.xz_exponent()
            + 2 * (self.z & other.x).count_ones();
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let letters_y = (x & z).count_ones();
        let phase = Phase::from_exponent(e + 4 * 64 - letters_y);
        Ok(PauliString {
            n_sites: self.n_sites,
            x,
            z,
            phase,
        })
    }

    pub fn adjoint(&self) -> PauliString {
        PauliString {
            phase: self.phase.conj(),
            ..*self
        }
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Action on a computational basis state: returns `(amplitude, image)`
    /// with `self |b> = amplitude |image>`.
    #[inline]
    pub fn act_on_basis(&self, b: u64) -> (Complex64, u64) {
        let sign = (self.z & b).count_ones();
        let k = self.xz_exponent() + 2 * sign;
        (i_pow(k), b ^ self.x)
    }

    /// Exponent `k` such that `self |b> = i^k |b ^ x>`.
    #[inline]
    pub(crate) fn basis_phase_exponent(&self, b: u64) -> u32 {
        self.xz_exponent() + 2 * (self.z & b).count_ones()
    }

    /// Same letters, phase reset to +1.
    pub fn unsigned(&self) -> PauliString {
        self.with_phase(Phase::ONE)
    }

    /// Compact key identifying the letters (phase ignored).
    pub fn key(&self) -> (u64, u64) {
        (self.x, self.z)
    }

    /// Dense `2^w x 2^w` matrix of the string restricted to `sites`
    /// (ordered, `sites[j]` is bit `j` of the local index). Letters outside
    /// `sites` must be identity.
    pub fn local_matrix(&self, sites: &[usize]) -> Result<Vec<Vec<Complex64>>> {
        let mut covered = 0u64;
        for &s in sites {
            covered |= 1u64 << s;
        }
        if self.support_mask() & !covered != 0 {
            return Err(invalid("string has support outside the requested sites"));
        }
        let dim = 1usize << sites.len();
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for col in 0..dim {
            let b = scatter(col as u64, sites);
            let (amp, img) = self.act_on_basis(b);
            let row = gather(img, sites) as usize;
            m[row][col] += amp;
        }
        Ok(m)
    }
}

impl fmt::Display for PauliString {
    /// `X0 Z3 Y7`, with a leading `-`, `i*` or `-i*` for non-trivial phases
    /// and `I` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase.0 {
            1 => write!(f, "i*")?,
            2 => write!(f, "-")?,
            3 => write!(f, "-i*")?,
            _ => {}
        }
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for s in self.support() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}{}", self.letter(s).symbol(), s)?;
        }
        Ok(())
    }
}

pub(crate) fn bits_of(mut m: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        let t = m.trailing_zeros() as usize;
        out.push(t);
        m &= m - 1;
    }
    out
}

/// Spreads the low bits of `local` onto the global positions `sites`.
pub(crate) fn scatter(local: u64, sites: &[usize]) -> u64 {
    let mut b = 0u64;
    for (j, &s) in sites.iter().enumerate() {
        if local >> j & 1 == 1 {
            b |= 1u64 << s;
        }
    }
    b
}

/// Inverse of [`scatter`]: collects the bits at `sites` into a local index.
pub(crate) fn gather(global: u64, sites: &[usize]) -> u64 {
    let mut l = 0u64;
    for (j, &s) in sites.iter().enumerate() {
        if global >> s & 1 == 1 {
            l |= 1u64 << j;
        }
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(p: &PauliString) -> Vec<Vec<Complex64>> {
        let sites: Vec<usize> = (0..p.n_sites()).collect();
        p.local_matrix(&sites).unwrap()
    }

    fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let n = a.len();
        let mut c = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    }

    #[test]
    fn x_times_y_is_i_z() {
        let x = PauliString::single(1, 0, Letter::X).unwrap();
        let y = PauliString::single(1, 0, Letter::Y).unwrap();
        let p = x.compose(&y).unwrap();
        assert_eq!(p.letter(0), Letter::Z);
        assert_eq!(p.phase(), Phase::I);
    }

    #[test]
    fn x_is_an_involution() {
        let x = PauliString::single(1, 0, Letter::X).unwrap();
        let p = x.compose(&x).unwrap();
        assert!(p.is_identity());
        assert_eq!(p.phase(), Phase::ONE);
    }

    #[test]
    fn two_site_product_matches_dense_multiplication() {
        let a = PauliString::from_letters(2, &[(0, Letter::X), (1, Letter::Z)]).unwrap();
        let b = PauliString::from_letters(2, &[(0, Letter::Z), (1, Letter::Z)]).unwrap();
        let p = a.compose(&b).unwrap();
        assert_eq!(p.support(), vec![0]);
        assert_eq!(p.letter(0), Letter::Y);
        assert_eq!(p.phase(), Phase::MINUS_I);
        let oracle = matmul(&dense(&a), &dense(&b));
        let got = dense(&p);
        for i in 0..4 {
            for j in 0..4 {
                assert!((oracle[i][j] - got[i][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let a = PauliString::identity(2).unwrap();
        let b = PauliString::identity(3).unwrap();
        assert!(matches!(a.compose(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn display_lists_letters_in_site_order() {
        let p = PauliString::from_letters(8, &[(7, Letter::Y), (0, Letter::X), (3, Letter::Z)])
            .unwrap()
            .with_phase(Phase::MINUS_ONE);
        assert_eq!(p.to_string(), "-X0 Z3 Y7");
    }

    #[test]
    fn repeated_site_is_rejected() {
        assert!(PauliString::from_letters(3, &[(1, Letter::X), (1, Letter::Z)]).is_err());
    }
}
