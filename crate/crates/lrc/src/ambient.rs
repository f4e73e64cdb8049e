//! The exponent grid H_J, its per-axis arithmetic conventions, minimal
//! cyclotomic sets with canonical representatives, and closed defining sets.
//!
//! Axes in J use Z/(T_j+1); axes outside J use Z/T_j on {1..T_j} with 0 as an
//! absorbing extra point (0 + a = a, 0 * a = 0).

use std::collections::BTreeSet;

use thiserror::Error;

pub type ExpVec = Vec<u32>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("axis count must be >= 1")]
    NoAxes,
    #[error("N_{0} = {1} must be > 1")]
    BadAxisSize(usize, u32),
    #[error("axis index {0} out of range 1..={1}")]
    AxisOutOfRange(usize, usize),
    #[error("L must be a subset of J")]
    LNotInJ,
    #[error("(N_{0} - 1) = {1} does not divide Q - 1 = {2}")]
    AxisOrderMismatch(usize, u32, u32),
    #[error("q - 1 = {0} does not divide N_{1} - 1 = {2}")]
    LocalityAxisMismatch(u32, usize, u32),
    #[error("exponent {0} out of range 0..={1} on axis {2}")]
    ExponentOutOfRange(u32, u32, usize),
    #[error("exponent vector has {0} coordinates, grid has {1} axes")]
    ArityMismatch(usize, usize),
    #[error("q = {0} is not invertible modulo N_{1} - 1 = {2}; scaling by q is not a permutation")]
    NonInvertibleScaling(u32, usize, u32),
    #[error("a defining set needs at least one representative")]
    EmptyDelta,
    #[error("defining set is not closed")]
    NotClosed,
}

/// The grid H_J = {0..T_1} x ... x {0..T_m} with J/L axis markings.
#[derive(Debug, Clone)]
pub struct GridSpec {
    m: usize,
    n_sizes: Vec<u32>,
    j_axes: BTreeSet<usize>,
    l_axes: BTreeSet<usize>,
    t_caps: Vec<u32>,
}

impl GridSpec {
    /// Axis indices in `j_axes`/`l_axes` are 1-based, matching the usual
    /// variable numbering X_1..X_m.
    pub fn new(n_sizes: Vec<u32>, j_axes: &[usize], l_axes: &[usize]) -> Result<Self, GridError> {
        let m = n_sizes.len();
        if m == 0 {
            return Err(GridError::NoAxes);
        }
        for (i, &n) in n_sizes.iter().enumerate() {
            if n <= 1 {
                return Err(GridError::BadAxisSize(i + 1, n));
            }
        }
        let mut j_set = BTreeSet::new();
        for &j in j_axes {
            if j == 0 || j > m {
                return Err(GridError::AxisOutOfRange(j, m));
            }
            j_set.insert(j - 1);
        }
        let mut l_set = BTreeSet::new();
        for &l in l_axes {
            if l == 0 || l > m {
                return Err(GridError::AxisOutOfRange(l, m));
            }
            l_set.insert(l - 1);
        }
        if !l_set.is_subset(&j_set) {
            return Err(GridError::LNotInJ);
        }
        let t_caps = n_sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| if j_set.contains(&i) { n - 2 } else { n - 1 })
            .collect();
        Ok(GridSpec {
            m,
            n_sizes,
            j_axes: j_set,
            l_axes: l_set,
            t_caps,
        })
    }

    /// Check the divisibility conditions tying the grid to a tower.
    pub fn validate(&self, q: u32, big_q: u32) -> Result<(), GridError> {
        for (i, &n) in self.n_sizes.iter().enumerate() {
            if (big_q - 1) % (n - 1) != 0 {
                return Err(GridError::AxisOrderMismatch(i + 1, n - 1, big_q - 1));
            }
        }
        for &l in &self.l_axes {
            if (self.n_sizes[l] - 1) % (q - 1) != 0 {
                return Err(GridError::LocalityAxisMismatch(
                    q - 1,
                    l + 1,
                    self.n_sizes[l] - 1,
                ));
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n_size(&self, axis: usize) -> u32 {
        self.n_sizes[axis]
    }
    pub fn n_sizes(&self) -> &[u32] {
        &self.n_sizes
    }
    pub fn t_cap(&self, axis: usize) -> u32 {
        self.t_caps[axis]
    }
    /// 0-based axis membership tests.
    pub fn in_j(&self, axis: usize) -> bool {
        self.j_axes.contains(&axis)
    }
    pub fn in_l(&self, axis: usize) -> bool {
        self.l_axes.contains(&axis)
    }
    pub fn j_axes(&self) -> impl Iterator<Item = usize> + '_ {
        self.j_axes.iter().copied()
    }
    pub fn l_axes(&self) -> impl Iterator<Item = usize> + '_ {
        self.l_axes.iter().copied()
    }
    pub fn j_is_full(&self) -> bool {
        self.j_axes.len() == self.m
    }
    pub fn l_is_empty(&self) -> bool {
        self.l_axes.is_empty()
    }

    /// |H_J| = prod (T_j + 1)
    pub fn grid_cardinality(&self) -> u64 {
        self.t_caps.iter().map(|&t| t as u64 + 1).product()
    }

    /// Length of the codes on this grid.
    pub fn code_length(&self) -> u64 {
        self.n_sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| if self.in_j(i) { n as u64 - 1 } else { n as u64 })
            .product()
    }

    pub fn check_exponent(&self, a: &[u32]) -> Result<(), GridError> {
        if a.len() != self.m {
            return Err(GridError::ArityMismatch(a.len(), self.m));
        }
        for (i, &ai) in a.iter().enumerate() {
            if ai > self.t_caps[i] {
                return Err(GridError::ExponentOutOfRange(ai, self.t_caps[i], i + 1));
            }
        }
        Ok(())
    }

    pub fn iter_grid(&self) -> GridIter<'_> {
        GridIter {
            grid: self,
            cur: Some(vec![0; self.m]),
        }
    }
}

pub struct GridIter<'a> {
    grid: &'a GridSpec,
    cur: Option<ExpVec>,
}

impl Iterator for GridIter<'_> {
    type Item = ExpVec;
    fn next(&mut self) -> Option<ExpVec> {
        let cur = self.cur.clone()?;
        // advance last axis fastest
        let mut next = cur.clone();
        let mut axis = self.grid.m;
        loop {
            if axis == 0 {
                self.cur = None;
                break;
            }
            axis -= 1;
            if next[axis] < self.grid.t_caps[axis] {
                next[axis] += 1;
                for slot in next.iter_mut().skip(axis + 1) {
                    *slot = 0;
                }
                self.cur = Some(next);
                break;
            }
        }
        Some(cur)
    }
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

/// Scalar multiple c * a_j on one axis under that axis's convention.
pub fn axis_mul(grid: &GridSpec, axis: usize, c: u64, a: u32) -> Result<u32, GridError> {
    if axis >= grid.m() {
        return Err(GridError::AxisOutOfRange(axis + 1, grid.m()));
    }
    let t = grid.t_cap(axis);
    if a > t {
        return Err(GridError::ExponentOutOfRange(a, t, axis + 1));
    }
    if grid.in_j(axis) {
        // {0..T_j} identified with Z/(T_j+1)
        Ok(((c % (t as u64 + 1)) * (a as u64) % (t as u64 + 1)) as u32)
    } else if a == 0 {
        // 0 * anything = 0
        Ok(0)
    } else {
        // {1..T_j} identified with Z/T_j; residue 0 stands for T_j
        let r = (c % t as u64) * (a as u64) % t as u64;
        Ok(if r == 0 { t } else { r as u32 })
    }
}

/// Componentwise c * a.
pub fn vec_mul(grid: &GridSpec, c: u64, a: &[u32]) -> Result<ExpVec, GridError> {
    grid.check_exponent(a)?;
    a.iter()
        .enumerate()
        .map(|(i, &ai)| axis_mul(grid, i, c, ai))
        .collect()
}

/// A minimal cyclotomic set {a, qa, q^2 a, ...} with its canonical representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicSet {
    rep: ExpVec,
    elements: Vec<ExpVec>,
}

impl CyclotomicSet {
    pub fn representative(&self) -> &ExpVec {
        &self.rep
    }
    /// Elements in orbit order starting from the representative.
    pub fn elements(&self) -> &[ExpVec] {
        &self.elements
    }
    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn contains(&self, a: &[u32]) -> bool {
        self.elements.iter().any(|e| e == a)
    }
}

/// The canonical representative: minimize the first coordinate, then the
/// second among ties, and so on.
pub fn find_representative(elements: &[ExpVec]) -> ExpVec {
    assert!(!elements.is_empty(), "empty orbit");
    let m = elements[0].len();
    let mut live: Vec<&ExpVec> = elements.iter().collect();
    let mut rep = Vec::with_capacity(m);
    for j in 0..m {
        let min_j = live.iter().map(|e| e[j]).min().unwrap();
        rep.push(min_j);
        live.retain(|e| e[j] == min_j);
    }
    rep
}

/// Orbit of `a` under componentwise multiplication by q.
pub fn cyclotomic_orbit(grid: &GridSpec, a: &[u32], q: u32) -> Result<CyclotomicSet, GridError> {
    grid.check_exponent(a)?;
    // the walk below only cycles if scaling by q permutes every axis
    for axis in 0..grid.m() {
        let modulus = grid.n_size(axis) - 1;
        if gcd_u32(q, modulus) != 1 {
            return Err(GridError::NonInvertibleScaling(q, axis + 1, modulus));
        }
    }
    let mut elements = vec![a.to_vec()];
    let mut cur = a.to_vec();
    loop {
        cur = vec_mul(grid, q as u64, &cur)?;
        if cur == elements[0] {
            break;
        }
        elements.push(cur.clone());
    }
    let rep = find_representative(&elements);
    // rotate so the listing starts at the representative
    let pos = elements.iter().position(|e| *e == rep).unwrap();
    elements.rotate_left(pos);
    Ok(CyclotomicSet { rep, elements })
}

/// A closed defining set: a union of minimal cyclotomic sets.
#[derive(Debug, Clone)]
pub struct DeltaSet {
    orbits: Vec<CyclotomicSet>,
    sigma: Vec<u64>,
    merged_duplicates: usize,
}

impl DeltaSet {
    pub fn orbits(&self) -> &[CyclotomicSet] {
        &self.orbits
    }
    pub fn representatives(&self) -> impl Iterator<Item = &ExpVec> {
        self.orbits.iter().map(|o| o.representative())
    }
    /// All exponents, representative-major, orbit order within each block.
    pub fn elements(&self) -> impl Iterator<Item = &ExpVec> {
        self.orbits.iter().flat_map(|o| o.elements().iter())
    }
    pub fn cardinality(&self) -> usize {
        self.orbits.iter().map(|o| o.len()).sum()
    }
    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }
    /// sigma_L of each representative, in orbit order.
    pub fn sigma_values(&self) -> &[u64] {
        &self.sigma
    }
    /// How many duplicate representatives were merged during construction.
    pub fn merged_duplicates(&self) -> usize {
        self.merged_duplicates
    }
    pub fn contains(&self, a: &[u32]) -> bool {
        self.orbits.iter().any(|o| o.contains(a))
    }
}

/// Integer sum of the L-indexed coordinates.
pub fn sigma_l(grid: &GridSpec, a: &[u32]) -> Result<u64, GridError> {
    grid.check_exponent(a)?;
    Ok(grid.l_axes().map(|l| a[l] as u64).sum())
}

/// Build a closed set from representatives. Non-canonical representatives are
/// normalized; duplicates are merged and counted.
pub fn build_delta(grid: &GridSpec, q: u32, reps: &[ExpVec]) -> Result<DeltaSet, GridError> {
    if reps.is_empty() {
        return Err(GridError::EmptyDelta);
    }
    let mut orbits: Vec<CyclotomicSet> = Vec::new();
    let mut merged = 0;
    for r in reps {
        let orbit = cyclotomic_orbit(grid, r, q)?;
        if orbits.iter().any(|o| o.rep == orbit.rep) {
            merged += 1;
        } else {
            orbits.push(orbit);
        }
    }
    let sigma = orbits
        .iter()
        .map(|o| sigma_l(grid, &o.rep))
        .collect::<Result<_, _>>()?;
    Ok(DeltaSet {
        orbits,
        sigma,
        merged_duplicates: merged,
    })
}

/// Closure of an arbitrary exponent collection.
pub fn closure_of(grid: &GridSpec, q: u32, elements: &[ExpVec]) -> Result<DeltaSet, GridError> {
    build_delta(grid, q, elements)
}

/// Is the subset a union of minimal cyclotomic sets?
pub fn is_closed(grid: &GridSpec, q: u32, subset: &[ExpVec]) -> Result<bool, GridError> {
    let set: BTreeSet<&ExpVec> = subset.iter().collect();
    for a in subset {
        let orbit = cyclotomic_orbit(grid, a, q)?;
        for e in orbit.elements() {
            if !set.contains(e) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_example_grid() -> GridSpec {
        // q = 8, Q = 64, N = (8, 10), J = {1}
        GridSpec::new(vec![8, 10], &[1], &[1]).unwrap()
    }

    #[test]
    fn axis_conventions() {
        let grid = worked_example_grid();
        assert_eq!(grid.t_cap(0), 6);
        assert_eq!(grid.t_cap(1), 9);
        // j in J: mod T_j + 1
        assert_eq!(axis_mul(&grid, 0, 8, 1).unwrap(), 1);
        // j not in J: {1..T_j} as Z/T_j, 16 = 7 mod 9
        assert_eq!(axis_mul(&grid, 1, 8, 2).unwrap(), 7);
        // 0 is absorbing off J
        assert_eq!(axis_mul(&grid, 1, 8, 0).unwrap(), 0);
        assert_eq!(axis_mul(&grid, 1, 12345, 0).unwrap(), 0);
        // residue 0 folds to T_j off J
        assert_eq!(axis_mul(&grid, 1, 9, 3).unwrap(), 9);
        assert!(axis_mul(&grid, 0, 2, 7).is_err());
    }

    #[test]
    fn worked_example_orbits() {
        let grid = worked_example_grid();
        let orbit = cyclotomic_orbit(&grid, &[1, 2], 8).unwrap();
        assert_eq!(orbit.elements(), &[vec![1, 2], vec![1, 7]]);
        assert_eq!(orbit.len(), 2);
        let orbit = cyclotomic_orbit(&grid, &[2, 3], 8).unwrap();
        assert_eq!(orbit.elements(), &[vec![2, 3], vec![2, 6]]);
        let orbit = cyclotomic_orbit(&grid, &[1, 3], 8).unwrap();
        assert_eq!(orbit.elements(), &[vec![1, 3], vec![1, 6]]);
        let zero = cyclotomic_orbit(&grid, &[0, 0], 8).unwrap();
        assert_eq!(zero.elements(), &[vec![0, 0]]);
    }

    #[test]
    fn univariate_orbit_q9() {
        // N_1 = 17, q = 9: orbit of 1 is {1, 9}
        let grid = GridSpec::new(vec![17], &[1], &[1]).unwrap();
        let orbit = cyclotomic_orbit(&grid, &[1], 9).unwrap();
        assert_eq!(orbit.elements(), &[vec![1], vec![9]]);
    }

    #[test]
    fn representative_rules() {
        assert_eq!(find_representative(&[vec![2, 3], vec![2, 6]]), vec![2, 3]);
        assert_eq!(find_representative(&[vec![1, 6], vec![1, 3]]), vec![1, 3]);
        assert_eq!(find_representative(&[vec![0, 0]]), vec![0, 0]);
        // idempotent: representative of a singleton listing of the rep is itself
        let rep = find_representative(&[vec![5, 1], vec![3, 9], vec![3, 2]]);
        assert_eq!(rep, vec![3, 2]);
        assert_eq!(find_representative(&[rep.clone()]), rep);
    }

    #[test]
    fn sigma_values() {
        let grid = worked_example_grid();
        assert_eq!(sigma_l(&grid, &[2, 3]).unwrap(), 2);
        let grid2 = GridSpec::new(vec![8, 10], &[1, 2], &[1, 2]).unwrap();
        assert_eq!(sigma_l(&grid2, &[2, 3]).unwrap(), 5);
        assert_eq!(sigma_l(&grid, &[0, 1]).unwrap(), 0);
    }

    #[test]
    fn delta_construction_and_closure() {
        let grid = worked_example_grid();
        let delta1 = build_delta(&grid, 8, &[vec![1, 2], vec![2, 3]]).unwrap();
        assert_eq!(delta1.cardinality(), 4);
        assert_eq!(delta1.merged_duplicates(), 0);
        // stray element (1,3) closed over
        let delta = closure_of(&grid, 8, &[vec![1, 2], vec![2, 3], vec![1, 3]]).unwrap();
        assert_eq!(delta.cardinality(), 6);
        // duplicates merge silently but are reported
        let delta = build_delta(&grid, 8, &[vec![1, 2], vec![1, 7]]).unwrap();
        assert_eq!(delta.cardinality(), 2);
        assert_eq!(delta.merged_duplicates(), 1);
        assert!(matches!(
            build_delta(&grid, 8, &[]),
            Err(GridError::EmptyDelta)
        ));
    }

    #[test]
    fn closedness() {
        let grid = worked_example_grid();
        let delta1: Vec<ExpVec> = vec![vec![1, 2], vec![1, 7], vec![2, 3], vec![2, 6]];
        assert!(is_closed(&grid, 8, &delta1).unwrap());
        let mut delta2 = delta1.clone();
        delta2.push(vec![1, 3]);
        assert!(!is_closed(&grid, 8, &delta2).unwrap());
        let full: Vec<ExpVec> = grid.iter_grid().collect();
        assert!(is_closed(&grid, 8, &full).unwrap());
    }

    #[test]
    fn orbits_partition_the_grid() {
        let grid = worked_example_grid();
        let mut seen: BTreeSet<ExpVec> = BTreeSet::new();
        let mut total = 0u64;
        for a in grid.iter_grid() {
            let orbit = cyclotomic_orbit(&grid, &a, 8).unwrap();
            if seen.insert(orbit.representative().clone()) {
                total += orbit.len() as u64;
            }
        }
        assert_eq!(total, grid.grid_cardinality());
        assert_eq!(grid.grid_cardinality(), 70);
    }

    #[test]
    fn orbit_stable_under_scaling() {
        let grid = GridSpec::new(vec![22, 10], &[1], &[1]).unwrap();
        for a in grid.iter_grid().step_by(7) {
            let qa = vec_mul(&grid, 8, &a).unwrap();
            let o1 = cyclotomic_orbit(&grid, &a, 8).unwrap();
            let o2 = cyclotomic_orbit(&grid, &qa, 8).unwrap();
            assert_eq!(o1, o2);
        }
    }

    #[test]
    fn non_invertible_scaling_is_rejected() {
        // gcd(8, 10) = 2: multiplication by q does not permute the axis
        let grid = GridSpec::new(vec![22, 11], &[1], &[1]).unwrap();
        assert!(matches!(
            cyclotomic_orbit(&grid, &[1, 5], 8),
            Err(GridError::NonInvertibleScaling(8, 2, 10))
        ));
    }

    #[test]
    fn grid_validation() {
        let grid = GridSpec::new(vec![8, 10], &[1], &[1]).unwrap();
        assert!(grid.validate(8, 64).is_ok());
        // 9 does not divide 63
        let grid = GridSpec::new(vec![8, 11], &[1], &[1]).unwrap();
        assert!(matches!(
            grid.validate(8, 64),
            Err(GridError::AxisOrderMismatch(2, 10, 63))
        ));
        // locality axis must satisfy q-1 | N_j - 1
        let grid = GridSpec::new(vec![10, 8], &[1, 2], &[1]).unwrap();
        assert!(matches!(
            grid.validate(8, 64),
            Err(GridError::LocalityAxisMismatch(7, 1, 9))
        ));
        assert!(matches!(
            GridSpec::new(vec![8], &[1], &[2]),
            Err(GridError::AxisOutOfRange(2, 1))
        ));
        assert!(matches!(
            GridSpec::new(vec![8, 10], &[1], &[2]),
            Err(GridError::LNotInJ)
        ));
    }
}
