//! Small prime table used by the combined-state index map.

/// Returns the `n`-th prime, 1-based: `nth_prime(1) == 2`.
///
/// Panics if `n` is 0. Supports `n` up to 6542 (primes below 2^16), far past
/// every reachable basis index.
pub fn nth_prime(n: usize) -> u64 {
    assert!(n >= 1, "prime index is 1-based");
    static TABLE: std::sync::OnceLock<Vec<u64>> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(|| {
        // Sieve of Eratosthenes over u16 range; 6542 primes < 65536.
        const LIMIT: usize = 1 << 16;
        let mut composite = vec![false; LIMIT];
        let mut primes = Vec::with_capacity(6542);
        for p in 2..LIMIT {
            if !composite[p] {
                primes.push(p as u64);
                let mut q = p * p;
                while q < LIMIT {
                    composite[q] = true;
                    q += p;
                }
            }
        }
        primes
    });
    *table
        .get(n - 1)
        .unwrap_or_else(|| panic!("prime index {n} out of supported range"))
}
