/// Work caps checked before any enumeration starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest field (base, extension or splitting field) that may be built.
    pub max_field_size: u64,
    /// Largest number of subspaces that may be enumerated or indexed.
    pub max_subspaces: u64,
    /// Largest number of candidate points of `P^n` that may be scanned.
    pub max_points: u64,
    /// Largest counting workload (subspaces times points, or point pairs).
    pub max_work: u64,
    /// `converge` picks exact mode automatically up to this many subspaces.
    pub exact_threshold: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_field_size: 1 << 24,
            max_subspaces: 1 << 26,
            max_points: 1 << 25,
            max_work: 1 << 36,
            exact_threshold: 1 << 22,
        }
    }
}
