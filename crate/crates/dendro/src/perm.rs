//! Small permutation helpers. A permutation is a `Vec<usize>` mapping
//! positions to positions; `act` conventions are fixed by the operad module.

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

pub fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == x)
}

/// Function composition: (compose(s, t))(x) = s(t(x)).
pub fn compose(s: &[usize], t: &[usize]) -> Vec<usize> {
    t.iter().map(|&x| s[x]).collect()
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// Decompose `p` into adjacent transpositions `s_{i}` (swapping `i`, `i+1`)
/// such that `p = s_{v[0]} ∘ s_{v[1]} ∘ … ∘ s_{v.last()}`.
pub fn adjacent_decomposition(p: &[usize]) -> Vec<usize> {
    let mut v = p.to_vec();
    let mut swaps = Vec::new();
    // bubble v into the identity, recording the swaps used
    loop {
        let mut done = true;
        for i in 0..v.len().saturating_sub(1) {
            if v[i] > v[i + 1] {
                v.swap(i, i + 1);
                swaps.push(i);
                done = false;
            }
        }
        if done {
            break;
        }
    }
    swaps.reverse();
    swaps
}

/// The transposition permutation of an n-by-m grid: position `i*m + j` is
/// sent from position `j*n + i`, i.e. `result[i*m + j] = j*n + i`.
pub fn grid_transpose(n: usize, m: usize) -> Vec<usize> {
    let mut p = vec![0; n * m];
    for i in 0..n {
        for j in 0..m {
            p[i * m + j] = j * n + i;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(0).len(), 1);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn adjacent_decomposition_reconstructs() {
        for p in permutations(4) {
            let swaps = adjacent_decomposition(&p);
            let mut q = identity(4);
            // p = s_{v0} ∘ s_{v1} ∘ …: apply right-to-left to the identity
            for &i in swaps.iter().rev() {
                let mut s = identity(4);
                s.swap(i, i + 1);
                q = compose(&s, &q);
            }
            assert_eq!(q, p);
        }
    }

    #[test]
    fn grid_transpose_involution() {
        let p = grid_transpose(3, 2);
        let q = grid_transpose(2, 3);
        assert!(is_identity(&compose(&p, &q)));
        assert_eq!(p[1 * 2 + 1], 1 * 3 + 1);
        assert_eq!(p[2 * 2], 2);
    }

    #[test]
    fn compose_and_inverse() {
        for p in permutations(4) {
            assert!(is_identity(&compose(&p, &inverse(&p))));
            assert!(is_identity(&compose(&inverse(&p), &p)));
        }
    }
}
