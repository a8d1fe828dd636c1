//! Small integer/bit helpers shared by every module.
//!
//! `floor_log2(x)` is ⌊log₂ x⌋ and `bitlen(x)` is ⌊log₂ x⌋ + 1, both defined
//! for `x >= 1`. Binary expansions are always MSB-first.

/// ⌊log₂ x⌋ for `x >= 1`.
pub fn floor_log2(x: u64) -> u32 {
    assert!(x >= 1, "floor_log2 is undefined for 0");
    63 - x.leading_zeros()
}

/// Number of bits in the binary representation of `x >= 1`.
pub fn bitlen(x: u64) -> u32 {
    floor_log2(x) + 1
}

/// MSB-first binary digits of `x >= 1`.
pub fn binary_digits(x: u64) -> Vec<bool> {
    let len = bitlen(x);
    (0..len).rev().map(|i| (x >> i) & 1 == 1).collect()
}

/// The `i`-th (1-based, MSB-first) bit of `x`.
pub fn nth_msb(x: u64, i: usize) -> bool {
    let digits = binary_digits(x);
    digits[i - 1]
}

/// Integer value of an MSB-first digit string; `None` on overflow.
pub fn from_digits(digits: &[bool]) -> Option<u64> {
    digits.iter().try_fold(0u64, |acc, &b| {
        acc.checked_mul(2).and_then(|v| v.checked_add(b as u64))
    })
}
