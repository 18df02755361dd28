/// Resource bounds for the symbolic engines.
///
/// Narrowing saturation is only semi-decidable, so every search is run under
/// explicit caps; exceeding a cap is reported, never hidden.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Maximum rewrite steps per `normalize` call.
    pub max_rewrite_steps: usize,
    /// Maximum narrowing tree depth.
    pub max_narrow_depth: usize,
    /// Maximum narrowing nodes explored per query.
    pub max_narrow_nodes: usize,
    /// Cap on the component sum of a Diophantine basis vector.
    pub max_dioph_norm: u32,
    /// Cap on the number of Diophantine basis vectors.
    pub max_dioph_basis: usize,
    /// Cap on basis subsets enumerated per elementary AC problem.
    pub max_ac_subsets: usize,
    /// Cap on total ground assignments tried by the brute-force oracle.
    pub max_assignments: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_rewrite_steps: 100_000,
            max_narrow_depth: 10,
            max_narrow_nodes: 10_000,
            max_dioph_norm: 40,
            max_dioph_basis: 4_096,
            max_ac_subsets: 1 << 20,
            max_assignments: 1_000_000,
        }
    }
}

/// Counters reported back to the user after a query.
#[derive(Debug, Clone, Copy, Default, serde::Serialize)]
pub struct Stats {
    /// Narrowing nodes explored.
    pub nodes: usize,
    /// Rewrite steps performed.
    pub rewrites: usize,
    /// Unifiers produced by B-unification.
    pub unifiers: usize,
}

/// Per-query mutable state: fresh-variable counter, limits, and counters.
///
/// Two concurrent queries never share a session.
#[derive(Debug, Clone)]
pub struct Session {
    pub limits: Limits,
    pub stats: Stats,
    fresh: u64,
}

impl Session {
    pub fn new(limits: Limits) -> Self {
        Session { limits, stats: Stats::default(), fresh: 0 }
    }

    /// Next candidate fresh-name index. Callers skip indices whose name is
    /// already taken in their avoidance set.
    pub fn next_fresh_index(&mut self) -> u64 {
        self.fresh += 1;
        self.fresh
    }
}

impl Default for Session {
    fn default() -> Self {
        Session::new(Limits::default())
    }
}
