//! Exact invariant-mean theory for a self-map of a finite set.
//!
//! Every orbit of `T: X -> X` falls into a cycle; the basins of the cycles
//! partition `X`, each cycle carries the uniform mean `m_C`, and every
//! `T`-invariant mean is a convex combination of the `m_C`. All arithmetic
//! here is exact rational.

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::Error;
use crate::Result;

/// Exact rational scalar used throughout this module.
pub type Q = Ratio<i64>;

/// A total self-map of `{0, ..., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSystem {
    map: Vec<usize>,
}

impl FiniteSystem {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::InvalidArgument(
                "finite system must have at least one state".into(),
            ));
        }
        let n = map.len();
        if let Some(bad) = map.iter().find(|t| **t >= n) {
            return Err(Error::InvalidArgument(format!(
                "map entry {bad} out of range 0..{n}"
            )));
        }
        Ok(FiniteSystem { map })
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }
}

/// Cycles and basins of a finite system.
///
/// Cycles are listed in order of their smallest state; within a cycle,
/// states start from the smallest and follow the map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<usize>>,
    /// For each state, the index into `cycles` of its eventual cycle.
    pub basin_of: Vec<usize>,
}

impl CycleDecomposition {
    /// States of the basin of cycle `c`, ascending.
    pub fn basin(&self, c: usize) -> Vec<usize> {
        self.basin_of
            .iter()
            .enumerate()
            .filter_map(|(x, b)| (*b == c).then_some(x))
            .collect()
    }

    /// Number of steps until the forward orbit of `x` enters its cycle.
    pub fn tail_length(&self, sys: &FiniteSystem, x: usize) -> usize {
        let cycle = &self.cycles[self.basin_of[x]];
        let mut y = x;
        let mut steps = 0;
        while !cycle.contains(&y) {
            y = sys.apply(y);
            steps += 1;
        }
        steps
    }
}

/// The exact simplex of invariant means: one uniform mean per cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantMeanSet {
    /// Weight vector of `m_C` for each cycle: `1/|C|` on the cycle states.
    pub cycle_means: Vec<Vec<Q>>,
    /// Dimension of the simplex spanned by the cycle means.
    pub simplex_dim: usize,
}

impl InvariantMeanSet {
    /// Apply the `c`-th cycle mean to `f`.
    pub fn mean(&self, c: usize, f: &[Q]) -> Q {
        self.cycle_means[c]
            .iter()
            .zip(f.iter())
            .map(|(w, v)| *w * *v)
            .fold(Q::zero(), |a, b| a + b)
    }
}

/// Walks every orbit once, marking states, and returns the canonical
/// cycle/basin decomposition.
pub fn decompose(sys: &FiniteSystem) -> CycleDecomposition {
    let n = sys.size();
    const UNSEEN: usize = usize::MAX;
    // cycle index per state once known; UNSEEN before that
    let mut cycle_of = vec![UNSEEN; n];
    // position of a state on the walk currently in progress
    let mut on_path = vec![UNSEEN; n];
    let mut raw_cycles: Vec<Vec<usize>> = Vec::new();

    for start in 0..n {
        if cycle_of[start] != UNSEEN {
            continue;
        }
        let mut path = Vec::new();
        let mut x = start;
        let cycle_idx = loop {
            if cycle_of[x] != UNSEEN {
                break cycle_of[x];
            }
            if on_path[x] != UNSEEN {
                // closed a new cycle on this walk
                let cycle: Vec<usize> = path[on_path[x]..].to_vec();
                raw_cycles.push(cycle);
                break raw_cycles.len() - 1;
            }
            on_path[x] = path.len();
            path.push(x);
            x = sys.apply(x);
        };
        for y in path {
            on_path[y] = UNSEEN;
            cycle_of[y] = cycle_idx;
        }
    }

    // canonical form: rotate each cycle to start at its smallest state,
    // then order cycles by that state
    let mut order: Vec<usize> = (0..raw_cycles.len()).collect();
    for cycle in &mut raw_cycles {
        let min_pos = cycle
            .iter()
            .enumerate()
            .min_by_key(|(_, s)| **s)
            .map(|(i, _)| i)
            .unwrap();
        cycle.rotate_left(min_pos);
    }
    order.sort_by_key(|i| raw_cycles[*i][0]);
    let rank_of: Vec<usize> = {
        let mut r = vec![0; order.len()];
        for (rank, idx) in order.iter().enumerate() {
            r[*idx] = rank;
        }
        r
    };
    let cycles: Vec<Vec<usize>> = order.iter().map(|i| raw_cycles[*i].clone()).collect();
    let basin_of = cycle_of.into_iter().map(|c| rank_of[c]).collect();
    CycleDecomposition { cycles, basin_of }
}

/// The cycle means `m_C(f) = (1/|C|) sum_{y in C} f(y)`, as exact weight
/// vectors. The invariant means are exactly their convex hull.
pub fn invariant_mean_simplex(sys: &FiniteSystem) -> InvariantMeanSet {
    let decomposition = decompose(sys);
    let n = sys.size();
    let cycle_means = decomposition
        .cycles
        .iter()
        .map(|cycle| {
            let mut w = vec![Q::zero(); n];
            let share = Q::new(1, cycle.len() as i64);
            for y in cycle {
                w[*y] = share;
            }
            w
        })
        .collect::<Vec<_>>();
    let simplex_dim = cycle_means.len() - 1;
    InvariantMeanSet {
        cycle_means,
        simplex_dim,
    }
}

/// The exact interval `[a, b]` of values `m(f)` over all invariant means:
/// the min and max of the cycle means. `f` is almost convergent iff `a == b`.
pub fn value_interval(sys: &FiniteSystem, f: &[Q]) -> Result<(Q, Q)> {
    if f.len() != sys.size() {
        return Err(Error::InvalidArgument(format!(
            "f has length {}, system has {} states",
            f.len(),
            sys.size()
        )));
    }
    let means = invariant_mean_simplex(sys);
    let values: Vec<Q> = (0..means.cycle_means.len())
        .map(|c| means.mean(c, f))
        .collect();
    let a = *values.iter().min().unwrap();
    let b = *values.iter().max().unwrap();
    Ok((a, b))
}

/// Independent brute-force check of the cycle-mean characterization.
///
/// Enumerates every probability vector on `X` with denominator
/// `grid_resolution`, filters by exact invariance `p(T^-1[A]) = p(A)` for
/// all subsets `A` of `X`, and confirms that every survivor is the convex
/// combination of cycle means predicted by its basin masses, that all
/// survivor values of `f` lie in `[a, b]`, and that the interval endpoints
/// are attained by verified invariant measures. Exact arithmetic; returns
/// `false` on any discrepancy.
pub fn verify_against_bruteforce(
    sys: &FiniteSystem,
    f: &[Q],
    grid_resolution: u32,
) -> Result<bool> {
    let n = sys.size();
    if n > 8 {
        return Err(Error::InvalidArgument(
            "brute-force oracle limited to n <= 8".into(),
        ));
    }
    if grid_resolution == 0 {
        return Err(Error::InvalidArgument(
            "grid resolution must be positive".into(),
        ));
    }
    if f.len() != n {
        return Err(Error::InvalidArgument("f length mismatch".into()));
    }
    let grid = grid_resolution as i64;
    let decomposition = decompose(sys);
    let means = invariant_mean_simplex(sys);
    let (a, b) = value_interval(sys, f)?;

    // structural checks on the decomposition itself
    if !decomposition_is_consistent(sys, &decomposition) {
        return Ok(false);
    }
    // each cycle mean must be an exactly invariant probability vector
    for (c, w) in means.cycle_means.iter().enumerate() {
        if !is_invariant_distribution(sys, w) {
            return Ok(false);
        }
        let composed: Vec<Q> = (0..n).map(|x| f[sys.apply(x)]).collect();
        if means.mean(c, f) != means.mean(c, &composed) {
            return Ok(false);
        }
    }

    // preimage bitmasks and T^-1 on subsets
    let pre_mask: Vec<u32> = (0..n)
        .map(|y| {
            (0..n)
                .filter(|x| sys.apply(*x) == y)
                .fold(0u32, |m, x| m | (1 << x))
        })
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut tinv = vec![0u32; (full as usize) + 1];
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        tinv[mask as usize] = tinv[(mask & (mask - 1)) as usize] | pre_mask[low];
    }

    let mut survivors: Vec<Vec<i64>> = Vec::new();
    let mut weights = vec![0i64; n];
    enumerate_compositions(grid, 0, &mut weights, &mut |w| {
        // fail fast on singleton invariance, then confirm every subset
        for y in 0..n {
            if w[y] != mask_sum(w, pre_mask[y]) {
                return;
            }
        }
        let sums = subset_sums(w, full);
        for mask in 0..=full {
            if sums[mask as usize] != sums[tinv[mask as usize] as usize] {
                return;
            }
        }
        survivors.push(w.to_vec());
    });

    // every survivor must decompose over the cycle means and stay in [a, b]
    let mut attained_lower = false;
    let mut attained_upper = false;
    for w in &survivors {
        for (c, cycle) in decomposition.cycles.iter().enumerate() {
            let basin_mass: i64 = (0..n)
                .filter(|x| decomposition.basin_of[*x] == c)
                .map(|x| w[x])
                .sum();
            for &x in cycle {
                // p restricted to the cycle is lambda_C * m_C
                if w[x] * cycle.len() as i64 != basin_mass {
                    return Ok(false);
                }
            }
        }
        for (x, mass) in w.iter().enumerate() {
            let on_cycle = decomposition.cycles[decomposition.basin_of[x]].contains(&x);
            if !on_cycle && *mass != 0 {
                return Ok(false);
            }
        }
        let value = w
            .iter()
            .zip(f.iter())
            .map(|(wi, fi)| Q::new(*wi, grid) * *fi)
            .fold(Q::zero(), |acc, t| acc + t);
        if value < a || value > b {
            return Ok(false);
        }
        if value == a {
            attained_lower = true;
        }
        if value == b {
            attained_upper = true;
        }
    }

    // the endpoints are attained by the extreme cycle means, which were
    // verified invariant above; when those vertices lie on the grid the
    // survivors must attain the endpoints too
    let lower_on_grid = decomposition
        .cycles
        .iter()
        .enumerate()
        .any(|(c, cycle)| means.mean(c, f) == a && grid % cycle.len() as i64 == 0);
    let upper_on_grid = decomposition
        .cycles
        .iter()
        .enumerate()
        .any(|(c, cycle)| means.mean(c, f) == b && grid % cycle.len() as i64 == 0);
    if lower_on_grid && !attained_lower {
        return Ok(false);
    }
    if upper_on_grid && !attained_upper {
        return Ok(false);
    }
    Ok(true)
}

fn decomposition_is_consistent(sys: &FiniteSystem, d: &CycleDecomposition) -> bool {
    let n = sys.size();
    let mut seen = vec![false; n];
    for (c, cycle) in d.cycles.iter().enumerate() {
        if cycle.is_empty() {
            return false;
        }
        for (i, &x) in cycle.iter().enumerate() {
            if seen[x] {
                return false; // cycles must be disjoint
            }
            seen[x] = true;
            if sys.apply(x) != cycle[(i + 1) % cycle.len()] {
                return false; // T restricted to the cycle is a cyclic permutation
            }
            if d.basin_of[x] != c {
                return false; // C_x subset of B_x
            }
        }
    }
    // every forward orbit enters its assigned cycle
    for x in 0..n {
        let cycle = &d.cycles[d.basin_of[x]];
        let mut y = x;
        for _ in 0..=n {
            if cycle.contains(&y) {
                break;
            }
            y = sys.apply(y);
        }
        if !cycle.contains(&y) {
            return false;
        }
    }
    true
}

fn is_invariant_distribution(sys: &FiniteSystem, w: &[Q]) -> bool {
    let n = sys.size();
    if w.iter().any(|x| *x < Q::zero()) {
        return false;
    }
    if w.iter().fold(Q::zero(), |a, b| a + *b) != Q::new(1, 1) {
        return false;
    }
    (0..n).all(|y| {
        let pre: Q = (0..n)
            .filter(|x| sys.apply(*x) == y)
            .map(|x| w[x])
            .fold(Q::zero(), |a, b| a + b);
        pre == w[y]
    })
}

fn mask_sum(w: &[i64], mask: u32) -> i64 {
    let mut m = mask;
    let mut s = 0i64;
    while m != 0 {
        s += w[m.trailing_zeros() as usize];
        m &= m - 1;
    }
    s
}

fn subset_sums(w: &[i64], full: u32) -> Vec<i64> {
    let mut sums = vec![0i64; (full as usize) + 1];
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        sums[mask as usize] = sums[(mask & (mask - 1)) as usize] + w[low];
    }
    sums
}

fn enumerate_compositions(
    total: i64,
    idx: usize,
    weights: &mut Vec<i64>,
    visit: &mut impl FnMut(&[i64]),
) {
    let n = weights.len();
    if idx == n - 1 {
        weights[idx] = total;
        visit(weights);
        return;
    }
    for v in 0..=total {
        weights[idx] = v;
        enumerate_compositions(total - v, idx + 1, weights, visit);
    }
}
