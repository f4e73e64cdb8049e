//! Brute-force and bounded computation of minimum distance, dual distance,
//! MDS checks, and small-instance generalized Hamming weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::evalcode::LinearCode;
use crate::galois::Field;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("the zero code has no minimum distance")]
    ZeroCode,
    #[error("enumeration budget exceeded ({0} needed)")]
    OverBudget(u128),
    #[error("exact distance unavailable within budget")]
    NotExact,
    #[error("t = {0} outside 1..={1}")]
    BadSubcodeDim(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMode {
    Exact,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceResult {
    pub value: usize,
    pub mode: DistanceMode,
    /// Codewords (or column-search work units) examined.
    pub enumerated: u64,
}

impl DistanceResult {
    pub fn is_exact(&self) -> bool {
        self.mode == DistanceMode::Exact
    }
}

#[derive(Debug, Clone)]
pub struct DistanceOptions {
    /// Exact message enumeration runs when q^k does not exceed this.
    pub exact_budget: u64,
    /// Work cap for the dependent-column exact search.
    pub column_search_ops: u64,
    /// Uniform random messages drawn in upper-bound mode.
    pub random_samples: u64,
    pub seed: u64,
    /// Worker threads for exact message enumeration.
    pub threads: usize,
    /// Position classes (e.g. recovery orbits); upper-bound mode fully
    /// enumerates the subcodes vanishing on single classes and class pairs.
    pub shorten_classes: Vec<Vec<usize>>,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions {
            exact_budget: 20_000_000,
            column_search_ops: 20_000_000,
            random_samples: 200_000,
            seed: 0x5eed,
            threads: 1,
            shorten_classes: Vec::new(),
        }
    }
}

impl DistanceOptions {
    pub fn with_budget(budget: u64) -> Self {
        DistanceOptions {
            exact_budget: budget,
            column_search_ops: budget,
            ..Default::default()
        }
    }
}

/// Minimum distance of `code`; exact when a complete method fits the budget,
/// otherwise the smallest weight found by structured + random sampling.
pub fn min_distance(
    code: &LinearCode,
    opts: &DistanceOptions,
) -> Result<DistanceResult, MetricsError> {
    let k = code.k();
    if k == 0 {
        return Err(MetricsError::ZeroCode);
    }
    let q = code.field().size() as u64;
    let message_space = (q as u128).checked_pow(k as u32);
    if let Some(total) = message_space {
        if total <= opts.exact_budget as u128 {
            let (d, enumerated) = exact_by_enumeration(code, opts.threads);
            return Ok(DistanceResult {
                value: d,
                mode: DistanceMode::Exact,
                enumerated,
            });
        }
    }
    // complete small-weight search on the parity-check side
    let parity = code.dual();
    if parity.k() > 0 {
        match min_dependent_columns(
            code.field(),
            parity.generator(),
            code.n(),
            opts.column_search_ops,
        ) {
            ColumnSearch::Found { weight, ops } => {
                return Ok(DistanceResult {
                    value: weight,
                    mode: DistanceMode::Exact,
                    enumerated: ops,
                });
            }
            ColumnSearch::Aborted => {}
        }
    }
    Ok(upper_bound_search(code, opts))
}

/// d(C^perp) through the same machinery.
pub fn dual_distance(
    code: &LinearCode,
    opts: &DistanceOptions,
) -> Result<DistanceResult, MetricsError> {
    min_distance(&code.dual(), opts)
}

/// true iff d = n - k + 1; requires an exact distance within budget.
pub fn is_mds(code: &LinearCode, opts: &DistanceOptions) -> Result<bool, MetricsError> {
    let d = min_distance(code, opts)?;
    if !d.is_exact() {
        return Err(MetricsError::NotExact);
    }
    Ok(d.value == code.n() - code.k() + 1)
}

// ---- exact enumeration ----

/// Projective message enumeration: one message per scalar class (weights are
/// scalar-invariant), maintaining the codeword incrementally as one digit of
/// the message odometer moves at a time.
fn exact_by_enumeration(code: &LinearCode, threads: usize) -> (usize, u64) {
    let k = code.k();
    let q = code.field().size();
    // task = (lead digit index, value of the first free digit)
    let mut tasks: Vec<(usize, Option<u32>)> = Vec::new();
    for lead in 0..k {
        if lead + 1 < k {
            for v in 0..q {
                tasks.push((lead, Some(v)));
            }
        } else {
            tasks.push((lead, None));
        }
    }
    let run = |task: &(usize, Option<u32>)| -> (usize, u64) {
        let (lead, first_free) = *task;
        enumerate_block(code, lead, first_free)
    };
    if threads <= 1 || tasks.len() == 1 {
        let mut best = usize::MAX;
        let mut count = 0u64;
        for t in &tasks {
            let (d, c) = run(t);
            best = best.min(d);
            count += c;
        }
        return (best, count);
    }
    let results: Vec<(usize, u64)> = std::thread::scope(|scope| {
        let chunk = tasks.len().div_ceil(threads);
        let mut handles = Vec::new();
        for part in tasks.chunks(chunk) {
            handles.push(scope.spawn(move || {
                let mut best = usize::MAX;
                let mut count = 0u64;
                for t in part {
                    let (d, c) = run(t);
                    best = best.min(d);
                    count += c;
                }
                (best, count)
            }));
        }
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let best = results.iter().map(|r| r.0).min().unwrap();
    let count = results.iter().map(|r| r.1).sum();
    (best, count)
}

/// Enumerate all messages with digits below `lead` zero, digit `lead` = 1,
/// digit lead+1 fixed to `first_free` (when Some), remaining digits free.
fn enumerate_block(code: &LinearCode, lead: usize, first_free: Option<u32>) -> (usize, u64) {
    let field = code.field();
    let q = field.size();
    let k = code.k();
    let gen = code.generator();

    let mut word: Vec<u32> = gen[lead].clone();
    if let Some(v) = first_free {
        if v != 0 {
            for (w, &g) in word.iter_mut().zip(&gen[lead + 1]) {
                *w = field.add(*w, field.mul(v, g));
            }
        }
    }
    let free_start = lead + 1 + usize::from(first_free.is_some());
    let free = k - free_start;

    // step deltas between consecutive packed digit values
    let mut delta = vec![0u32; q as usize];
    for v in 0..q - 1 {
        delta[v as usize] = field.sub(v + 1, v);
    }
    let wrap = field.neg(q - 1); // q-1 -> 0

    let weight = |w: &[u32]| w.iter().filter(|&&x| x != 0).count();
    let mut best = weight(&word);
    let mut count = 1u64;
    if free == 0 {
        return (best, count);
    }
    let mut digits = vec![0u32; free];
    loop {
        // odometer: last digit fastest
        let mut i = free;
        loop {
            if i == 0 {
                return (best, count);
            }
            i -= 1;
            let row = &gen[free_start + i];
            let d = digits[i];
            if d + 1 < q {
                digits[i] = d + 1;
                let step = delta[d as usize];
                for (w, &g) in word.iter_mut().zip(row) {
                    *w = field.add(*w, field.mul(step, g));
                }
                break;
            }
            digits[i] = 0;
            for (w, &g) in word.iter_mut().zip(row) {
                *w = field.add(*w, field.mul(wrap, g));
            }
            // carry continues upward
        }
        let w = weight(&word);
        if w < best {
            best = w;
        }
        count += 1;
    }
}

// ---- exact small-weight search via dependent columns ----

pub enum ColumnSearch {
    Found { weight: usize, ops: u64 },
    Aborted,
}

/// Smallest number of linearly dependent columns of the matrix given by
/// `rows`. Iterative deepening; exact when it returns `Found`.
pub fn min_dependent_columns(
    field: &Field,
    rows: &[Vec<u32>],
    ncols: usize,
    max_ops: u64,
) -> ColumnSearch {
    let nrows = rows.len();
    let cols: Vec<Vec<u32>> = (0..ncols)
        .map(|c| rows.iter().map(|r| r[c]).collect())
        .collect();
    let mut ops = 0u64;

    struct Ctx<'a> {
        field: &'a Field,
        cols: &'a [Vec<u32>],
        nrows: usize,
        max_ops: u64,
    }
    // reduce a column against the eliminated stack; None = reduced to zero
    fn reduce(
        ctx: &Ctx,
        col: &[u32],
        basis: &[(usize, Vec<u32>)],
        ops: &mut u64,
    ) -> Option<(usize, Vec<u32>)> {
        let mut v = col.to_vec();
        *ops += ctx.nrows as u64;
        for (pivot, b) in basis {
            let c = v[*pivot];
            if c != 0 {
                for (x, &bv) in v.iter_mut().zip(b) {
                    *x = ctx.field.sub(*x, ctx.field.mul(c, bv));
                }
            }
        }
        let pivot = v.iter().position(|&x| x != 0)?;
        let inv = ctx.field.inv(v[pivot]);
        for x in v.iter_mut() {
            *x = ctx.field.mul(*x, inv);
        }
        Some((pivot, v))
    }
    fn dfs(
        ctx: &Ctx,
        start: usize,
        depth_left: usize,
        basis: &mut Vec<(usize, Vec<u32>)>,
        ops: &mut u64,
    ) -> Result<bool, ()> {
        for idx in start..ctx.cols.len() {
            if ctx.cols.len() - idx < depth_left {
                break;
            }
            if *ops > ctx.max_ops {
                return Err(());
            }
            match reduce(ctx, &ctx.cols[idx], basis, ops) {
                None => {
                    // dependence among the chosen columns plus this one;
                    // shallower dependences were ruled out at earlier depths
                    debug_assert!(depth_left == 1, "dependence below the current search depth");
                    return Ok(true);
                }
                Some(entry) => {
                    if depth_left > 1 {
                        basis.push(entry);
                        let found = dfs(ctx, idx + 1, depth_left - 1, basis, ops)?;
                        basis.pop();
                        if found {
                            return Ok(true);
                        }
                    }
                }
            }
        }
        Ok(false)
    }

    let ctx = Ctx {
        field,
        cols: &cols,
        nrows,
        max_ops,
    };
    for w in 1..=ncols {
        let mut basis = Vec::new();
        match dfs(&ctx, 0, w, &mut basis, &mut ops) {
            Ok(true) => return ColumnSearch::Found { weight: w, ops },
            Ok(false) => {}
            Err(()) => return ColumnSearch::Aborted,
        }
    }
    // all columns independent: no nonzero word at all; callers handle the
    // zero code before getting here
    ColumnSearch::Aborted
}

// ---- upper-bound sampling ----

fn upper_bound_search(code: &LinearCode, opts: &DistanceOptions) -> DistanceResult {
    let field = code.field();
    let q = field.size();
    let k = code.k();
    let n = code.n();
    let gen = code.generator();
    let weight = |w: &[u32]| w.iter().filter(|&&x| x != 0).count();
    let mut best = usize::MAX;
    let mut examined = 0u64;

    // all weight-<=2 messages, up to scalar
    for row in gen {
        best = best.min(weight(row));
        examined += 1;
    }
    let mut word = vec![0u32; n];
    for i in 0..k {
        for j in i + 1..k {
            for c in 1..q {
                for (slot, (&a, &b)) in word.iter_mut().zip(gen[i].iter().zip(&gen[j])) {
                    *slot = field.add(a, field.mul(c, b));
                }
                best = best.min(weight(&word));
                examined += 1;
            }
        }
    }

    // full enumeration of the subcodes vanishing on one class (or a pair)
    let sub_cap = opts.exact_budget.min(1 << 20);
    let mut class_sets: Vec<Vec<usize>> = opts.shorten_classes.clone();
    let nc = opts.shorten_classes.len();
    if (2..=6).contains(&nc) {
        for i in 0..nc {
            for j in i + 1..nc {
                let mut merged = opts.shorten_classes[i].clone();
                merged.extend_from_slice(&opts.shorten_classes[j]);
                class_sets.push(merged);
            }
        }
    }
    for class in &class_sets {
        let support: Vec<usize> = (0..n).filter(|p| !class.contains(p)).collect();
        if support.is_empty() {
            continue;
        }
        let Ok(shortened) = code.shorten(&support) else {
            continue;
        };
        if shortened.k() == 0 {
            continue;
        }
        if (q as u128).pow(shortened.k() as u32) <= sub_cap as u128 {
            let (d, c) = exact_by_enumeration(&shortened, 1);
            best = best.min(d);
            examined += c;
        }
    }

    // seeded uniform random messages
    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    let mut msg = vec![0u32; k];
    for _ in 0..opts.random_samples {
        for m in msg.iter_mut() {
            *m = rng.gen_range(0..q);
        }
        if msg.iter().all(|&m| m == 0) {
            continue;
        }
        let w = weight(&code.encode(&msg));
        if w < best {
            best = w;
        }
        examined += 1;
    }

    DistanceResult {
        value: best,
        mode: DistanceMode::Upper,
        enumerated: examined,
    }
}

// ---- generalized Hamming weights ----

fn gaussian_binomial(k: u32, t: u32, q: u64) -> Option<u128> {
    // prod_{i=0..t-1} (q^(k-i) - 1) / (q^(t-i) - 1), exactly in u128
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..t {
        num = num.checked_mul((q as u128).checked_pow(k - i)? - 1)?;
        den = den.checked_mul((q as u128).checked_pow(t - i)? - 1)?;
    }
    Some(num / den)
}

/// Exact t-th generalized Hamming weight by enumerating all t-dimensional
/// subcodes (RREF representatives).
pub fn generalized_hamming_weight(
    code: &LinearCode,
    t: usize,
    budget: u64,
) -> Result<usize, MetricsError> {
    let k = code.k();
    if t == 0 || t > k {
        return Err(MetricsError::BadSubcodeDim(t, k));
    }
    let q = code.field().size() as u64;
    let count =
        gaussian_binomial(k as u32, t as u32, q).ok_or(MetricsError::OverBudget(u128::MAX))?;
    if count > budget as u128 {
        return Err(MetricsError::OverBudget(count));
    }
    let n = code.n();
    let mut best = usize::MAX;

    // pivot column combinations, ascending
    let mut pivots: Vec<usize> = (0..t).collect();
    loop {
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut cells = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for j in p + 1..k {
                if !pivot_set.contains(&j) {
                    cells.push((i, j));
                }
            }
        }
        let mut mat = vec![vec![0u32; k]; t];
        for (i, &p) in pivots.iter().enumerate() {
            mat[i][p] = 1;
        }
        let mut vals = vec![0u32; cells.len()];
        loop {
            for ((i, j), &v) in cells.iter().zip(&vals) {
                mat[*i][*j] = v;
            }
            let mut support = vec![false; n];
            for row_msg in &mat {
                let cw = code.encode(row_msg);
                for (s, &x) in support.iter_mut().zip(&cw) {
                    if x != 0 {
                        *s = true;
                    }
                }
            }
            let w = support.iter().filter(|&&s| s).count();
            if w < best {
                best = w;
            }
            // odometer over cell values
            let mut i = 0;
            loop {
                if i == cells.len() {
                    break;
                }
                vals[i] += 1;
                if (vals[i] as u64) < q {
                    break;
                }
                vals[i] = 0;
                i += 1;
            }
            if i == cells.len() {
                break;
            }
        }
        // next pivot combination
        let mut i = t;
        loop {
            if i == 0 {
                return Ok(best);
            }
            i -= 1;
            if pivots[i] + (t - i) < k {
                pivots[i] += 1;
                for j in i + 1..t {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{build_delta, GridSpec};
    use crate::evalcode::{build_subfield_subcode, enumerate_points};
    use crate::galois::make_tower;

    /// Independent weight scan: encode every nonzero message directly.
    fn weight_scan_oracle(code: &LinearCode) -> usize {
        let q = code.field().size();
        let k = code.k();
        let mut best = usize::MAX;
        let mut msg = vec![0u32; k];
        loop {
            let mut i = 0;
            loop {
                if i == k {
                    return best;
                }
                msg[i] += 1;
                if msg[i] < q {
                    break;
                }
                msg[i] = 0;
                i += 1;
            }
            let w = code.encode(&msg).iter().filter(|&&x| x != 0).count();
            best = best.min(w);
        }
    }

    fn table2_code(r: usize) -> LinearCode {
        let tower = make_tower(3, 2, 4).unwrap();
        let grid = GridSpec::new(vec![17], &[1], &[1]).unwrap();
        let pts = enumerate_points(&grid, &tower).unwrap();
        let reps: Vec<Vec<u32>> = (0..r as u32).map(|a| vec![a]).collect();
        let delta = build_delta(&grid, 9, &reps).unwrap();
        build_subfield_subcode(&grid, &tower, &pts, &delta)
            .unwrap()
            .0
    }

    #[test]
    fn exact_distance_matches_oracle_on_small_codes() {
        let code = table2_code(2);
        assert_eq!((code.n(), code.k()), (16, 3));
        let d = min_distance(&code, &DistanceOptions::default()).unwrap();
        assert!(d.is_exact());
        assert_eq!(d.value, 8);
        assert_eq!(d.value, weight_scan_oracle(&code));

        let code = table2_code(3);
        let d = min_distance(&code, &DistanceOptions::default()).unwrap();
        assert_eq!(d.value, 8);
        assert_eq!(d.value, weight_scan_oracle(&code));
    }

    #[test]
    fn repetition_code_distance() {
        let tower = make_tower(2, 3, 6).unwrap();
        let grid = GridSpec::new(vec![22], &[1], &[1]).unwrap();
        let pts = enumerate_points(&grid, &tower).unwrap();
        let delta = build_delta(&grid, 8, &[vec![0]]).unwrap();
        let (code, _) = build_subfield_subcode(&grid, &tower, &pts, &delta).unwrap();
        let d = min_distance(&code, &DistanceOptions::default()).unwrap();
        assert_eq!((d.value, d.mode), (21, DistanceMode::Exact));
        // dual of a repetition code is the parity-type code with d = 2
        let dd = dual_distance(&code, &DistanceOptions::default()).unwrap();
        assert_eq!(dd.value, 2);
    }

    #[test]
    fn zero_and_full_codes_are_rejected() {
        let f = crate::galois::Field::new(3, 2).unwrap();
        let zero = LinearCode::zero(f.clone(), 5);
        assert!(matches!(
            min_distance(&zero, &DistanceOptions::default()),
            Err(MetricsError::ZeroCode)
        ));
        let full = LinearCode::from_rows(f, 2, vec![vec![1, 0], vec![0, 1]]);
        assert!(matches!(
            dual_distance(&full, &DistanceOptions::default()),
            Err(MetricsError::ZeroCode)
        ));
    }

    #[test]
    fn dual_distance_via_column_search() {
        // [16,3,8]: the dual has dimension 13, far over the message budget,
        // but d_dual = 3 is reachable by the dependent-column search.
        let code = table2_code(2);
        let dd = dual_distance(&code, &DistanceOptions::default()).unwrap();
        assert!(dd.is_exact());
        assert_eq!(dd.value, 3);
    }

    #[test]
    fn threads_agree_with_single_thread() {
        let code = table2_code(4);
        let d1 = min_distance(&code, &DistanceOptions::default()).unwrap();
        let d4 = min_distance(
            &code,
            &DistanceOptions {
                threads: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(d1.value, d4.value);
        assert_eq!(d1.enumerated, d4.enumerated);
    }

    #[test]
    fn mds_checks() {
        let code = table2_code(2);
        assert!(!is_mds(&code, &DistanceOptions::default()).unwrap());
        let f = crate::galois::Field::new(3, 2).unwrap();
        let rep = LinearCode::from_rows(f, 4, vec![vec![1, 1, 1, 1]]);
        assert!(is_mds(&rep, &DistanceOptions::default()).unwrap());
    }

    #[test]
    fn ghw_basics() {
        let code = table2_code(2);
        let d1 = generalized_hamming_weight(&code, 1, 10_000_000).unwrap();
        let d = min_distance(&code, &DistanceOptions::default())
            .unwrap()
            .value;
        assert_eq!(d1, d);
        let dk = generalized_hamming_weight(&code, code.k(), 10_000_000).unwrap();
        assert_eq!(dk, 16, "support of the whole code");
        let d2 = generalized_hamming_weight(&code, 2, 10_000_000).unwrap();
        assert!(d1 < d2 && d2 < dk);
        assert!(matches!(
            generalized_hamming_weight(&code, 0, 1000),
            Err(MetricsError::BadSubcodeDim(0, 3))
        ));
    }

    #[test]
    fn puncturing_mds_keeps_mds() {
        // orbit code [8,2,7]: each single puncture drops d by one and stays MDS
        let code = table2_code(2);
        let orbit: Vec<usize> = {
            // positions of one eta-orbit: use the locality module's partition
            let tower = make_tower(3, 2, 4).unwrap();
            let grid = GridSpec::new(vec![17], &[1], &[1]).unwrap();
            let pts = enumerate_points(&grid, &tower).unwrap();
            crate::locality::orbit_classes(&pts, &grid, &tower).unwrap()[0].clone()
        };
        let mut current = code.puncture(&orbit).unwrap();
        let opts = DistanceOptions::default();
        let mut expect_d = 7;
        assert!(is_mds(&current, &opts).unwrap());
        for _ in 0..5 {
            let keep: Vec<usize> = (1..current.n()).collect();
            current = current.puncture(&keep).unwrap();
            expect_d -= 1;
            let d = min_distance(&current, &opts).unwrap();
            assert_eq!(d.value, expect_d);
            assert!(is_mds(&current, &opts).unwrap());
        }
    }

    #[test]
    fn singleton_bound_holds() {
        for r in [2usize, 3, 4] {
            let code = table2_code(r);
            let d = min_distance(&code, &DistanceOptions::default()).unwrap();
            assert!(d.value <= code.n() - code.k() + 1);
        }
    }

    #[test]
    fn upper_bound_mode_reports_found_weight() {
        let code = table2_code(5);
        let opts = DistanceOptions {
            exact_budget: 10,
            column_search_ops: 10,
            random_samples: 2_000,
            ..Default::default()
        };
        let d = min_distance(&code, &opts).unwrap();
        assert_eq!(d.mode, DistanceMode::Upper);
        let exact = min_distance(&code, &DistanceOptions::default()).unwrap();
        assert!(d.value >= exact.value);
    }
}
