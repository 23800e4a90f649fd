use super::pauli::{Letter, PauliString};
use crate::error::{invalid, Result};

/// Number of strings with support size ≤ q inside a region of `m` sites.
pub fn q_local_count(m: usize, q: usize) -> usize {
    let mut total = 0usize;
    let mut binom = 1usize;
    let mut pow3 = 1usize;
    for s in 0..=q.min(m) {
        total = total.saturating_add(binom.saturating_mul(pow3));
        binom = binom * (m - s) / (s + 1);
        pow3 = pow3.saturating_mul(3);
    }
    total
}

/// All unit-phase Pauli strings with support size ≤ `q`, ordered by weight,
/// then by support (lexicographic), then by letters. When `region` is given
/// supports are restricted to it; when `symmetry` is given only strings that
/// commute with every generator are kept.
pub fn enumerate_q_local_basis(
    n: usize,
    q: usize,
    region: Option<&[usize]>,
    symmetry: Option<&[PauliString]>,
) -> Result<Vec<PauliString>> {
    if q > n {
        return Err(invalid(format!("q = {q} exceeds n = {n}")));
    }
    let sites: Vec<usize> = match region {
        Some(r) => {
            let mut r = r.to_vec();
            r.sort_unstable();
            r.dedup();
            if r.iter().any(|&s| s >= n) {
                return Err(invalid("region site out of range"));
            }
            r
        }
        None => (0..n).collect(),
    };
    if let Some(gens) = symmetry {
        if gens.iter().any(|g| g.n_sites() != n) {
            return Err(invalid("symmetry generator size differs from n"));
        }
    }
    let mut out = Vec::with_capacity(q_local_count(sites.len(), q));
    for s in 0..=q.min(sites.len()) {
        for_each_combination(sites.len(), s, |combo| {
            let mut letters = vec![0usize; s];
            loop {
                let pairs: Vec<(usize, Letter)> = combo
                    .iter()
                    .zip(&letters)
                    .map(|(&i, &l)| (sites[i], Letter::NON_IDENTITY[l]))
                    .collect();
                let p = PauliString::from_letters(n, &pairs).expect("valid by construction");
                let keep = symmetry.is_none_or(|g| g.iter().all(|h| h.commutes_with(&p)));
                if keep {
                    out.push(p);
                }
                // odometer over letters
                let mut j = s;
                loop {
                    if j == 0 {
                        return;
                    }
                    j -= 1;
                    letters[j] += 1;
                    if letters[j] < 3 {
                        break;
                    }
                    letters[j] = 0;
                }
            }
        });
    }
    Ok(out)
}

/// Calls `f` with every `k`-subset of `0..m` in lexicographic order.
pub(crate) fn for_each_combination(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        f(&c);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if c[i] < m - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
    }
}
