//! Colexicographic pair codes: `{i, j}` with `i < j` ↦ `j(j−1)/2 + i`.

/// Number of unordered pairs on `n` vertices.
#[inline]
pub fn pair_count(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

#[inline]
pub fn encode(u: u64, v: u64) -> u64 {
    debug_assert_ne!(u, v);
    let (i, j) = if u < v { (u, v) } else { (v, u) };
    j * (j - 1) / 2 + i
}

/// Inverse of [`encode`], returning `(i, j)` with `i < j`.
#[inline]
pub fn decode(code: u64) -> (u64, u64) {
    // largest j with j(j-1)/2 <= code
    let mut j = (((8 * code as u128 + 1) as f64).sqrt() as u64).div_ceil(2);
    while j * (j - 1) / 2 > code {
        j -= 1;
    }
    while (j + 1) * j / 2 <= code {
        j += 1;
    }
    (code - j * (j - 1) / 2, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_codes() {
        assert_eq!(encode(0, 1), 0);
        assert_eq!(encode(0, 2), 1);
        assert_eq!(encode(1, 2), 2);
        assert_eq!(encode(3, 0), 3);
        assert_eq!(decode(5), (2, 3));
        assert_eq!(pair_count(4), 6);
    }

    #[test]
    fn dense_roundtrip() {
        let mut code = 0;
        for j in 1..200u64 {
            for i in 0..j {
                assert_eq!(encode(i, j), code);
                assert_eq!(decode(code), (i, j));
                code += 1;
            }
        }
    }

    proptest! {
        #[test]
        fn roundtrip_large(i in 0u64..3_000_000_000, d in 1u64..1_000_000_000) {
            let j = i + d;
            let c = encode(i, j);
            prop_assert_eq!(decode(c), (i, j));
        }
    }
}
