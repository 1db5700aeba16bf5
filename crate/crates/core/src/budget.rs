use crate::error::{Error, Result};

/// Resource limits for the exhaustive parts of the library.
///
/// Every enumeration checks its size against one of these before doing any
/// work and fails with [`Error::Budget`] instead of running away.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    /// Largest group stored as a multiplication table (associativity is
    /// checked exhaustively up to this order).
    pub table_order: usize,
    /// Upper bound on candidate generator-image tuples in hom enumeration.
    pub hom_candidates: u128,
    /// Upper bound on `p^dim` for subspace enumeration.
    pub fp_space: u128,
    /// Largest materialized inverse limit.
    pub limit_elements: usize,
    /// Largest product of node orders the brute-force solver will scan.
    pub brute_force_product: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            table_order: 256,
            hom_candidates: 1 << 32,
            fp_space: 1 << 16,
            limit_elements: 1_000_000,
            brute_force_product: 1 << 24,
        }
    }
}

impl Budget {
    pub(crate) fn check(what: &'static str, needed: u128, limit: u128) -> Result<()> {
        if needed > limit {
            Err(Error::Budget {
                what,
                needed,
                limit,
            })
        } else {
            Ok(())
        }
    }
}
