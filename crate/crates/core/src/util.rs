//! Crate-private helpers.

/// FNV-1a over a byte stream. Used wherever a stable, platform-independent
/// 64-bit digest is needed to derive RNG seeds; unlike the std hasher its
/// output is fixed for all builds.
#[derive(Clone, Copy)]
pub(crate) struct Fnv1a(u64);

impl Fnv1a {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;

    pub(crate) fn new() -> Self {
        Fnv1a(Self::OFFSET)
    }

    pub(crate) fn write(mut self, bytes: &[u8]) -> Self {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(Self::PRIME);
        }
        self
    }

    pub(crate) fn write_u64(self, value: u64) -> Self {
        self.write(&value.to_le_bytes())
    }

    pub(crate) fn finish(self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable() {
        // Reference value for "hello" from the FNV-1a specification.
        let h = Fnv1a::new().write(b"hello").finish();
        assert_eq!(h, 0xa430_d846_80aa_bd0b);
    }

    #[test]
    fn digest_depends_on_all_parts() {
        let a = Fnv1a::new().write_u64(1).write(b"x").finish();
        let b = Fnv1a::new().write_u64(2).write(b"x").finish();
        assert_ne!(a, b);
    }
}
