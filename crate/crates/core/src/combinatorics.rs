//! Small integer helpers shared by the net verifier and the Haar machinery.

/// Binomial coefficient `C(n, k)`; saturates on overflow.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// All weak compositions of `total` into `parts` nonnegative integers, in
/// lexicographic order of the entries read left to right (so the first
/// composition is `(0, …, 0, total)`).
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut current = vec![0u32; parts];
    fill(total, 0, &mut current, &mut out);
    out
}

fn fill(remaining: u32, idx: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if idx + 1 == current.len() {
        current[idx] = remaining;
        out.push(current.clone());
        return;
    }
    for v in 0..=remaining {
        current[idx] = v;
        fill(remaining - v, idx + 1, current, out);
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    (2u64..).filter(|&k| is_prime(k)).take(count).collect()
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    (n.max(2)..)
        .find(|&k| is_prime(k))
        .expect("primes are unbounded")
}

/// `Some(e)` when `n == base^e`.
pub fn exact_log(n: u64, base: u64) -> Option<u32> {
    if base < 2 || n == 0 {
        return None;
    }
    let mut e = 0;
    let mut v = 1u64;
    while v < n {
        v = v.checked_mul(base)?;
        e += 1;
    }
    (v == n).then_some(e)
}
