//! Zero sets Z_J, monomial/trace evaluation, J-affine variety codes over F_Q,
//! their subfield-subcodes over F_q, and puncture/shorten/dual operations.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::ambient::{self, DeltaSet, ExpVec, GridError, GridSpec};
use crate::galois::{Field, FieldTower, GaloisError};
use crate::linalg;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error("defining set is not closed")]
    NotClosed,
    #[error("orbit length {0} does not divide the relative tower degree {1}")]
    OrbitTowerMismatch(u32, u32),
    #[error("dual defining sets require m = 1 with J = {{1}}")]
    DualDeltaArity,
    #[error("position set must be non-empty")]
    EmptyPositions,
    #[error("position {0} out of range for length {1}")]
    PositionOutOfRange(usize, usize),
    #[error("field mismatch between codes")]
    FieldMismatch,
}

/// The ordered zero set Z_J with the coord(.) position lookup.
///
/// Order is axis-lexicographic by discrete log (gamma_j^0, gamma_j^1, ...,
/// with 0 sorted last on axes outside J); axis 1 is most significant.
#[derive(Debug, Clone)]
pub struct PointSet {
    points: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn points(&self) -> &[Vec<u32>] {
        &self.points
    }
    pub fn point(&self, i: usize) -> &[u32] {
        &self.points[i]
    }
    /// Position of a point, if it lies in Z_J.
    pub fn coord(&self, point: &[u32]) -> Option<usize> {
        self.index.get(point).copied()
    }
}

/// Enumerate the zeros of the ideal I_J over F_Q.
pub fn enumerate_points(grid: &GridSpec, tower: &FieldTower) -> Result<PointSet, CodeError> {
    grid.validate(tower.q(), tower.big_q())?;
    let big = tower.big();
    let big_order = big.order() as u64;
    let mut axis_values: Vec<Vec<u32>> = Vec::with_capacity(grid.m());
    for axis in 0..grid.m() {
        let n = grid.n_size(axis) as u64;
        let gamma = big.exp_of(big_order / (n - 1));
        let mut vals = Vec::with_capacity(n as usize);
        let mut acc = 1u32;
        for _ in 0..n - 1 {
            vals.push(acc);
            acc = big.mul(acc, gamma);
        }
        if !grid.in_j(axis) {
            vals.push(0);
        }
        axis_values.push(vals);
    }
    let total: usize = axis_values.iter().map(|v| v.len()).product();
    let mut points = Vec::with_capacity(total);
    let mut idx = vec![0usize; grid.m()];
    'outer: loop {
        points.push(
            idx.iter()
                .enumerate()
                .map(|(a, &i)| axis_values[a][i])
                .collect::<Vec<u32>>(),
        );
        // advance the last axis fastest
        let mut axis = grid.m();
        loop {
            if axis == 0 {
                break 'outer;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < axis_values[axis].len() {
                break;
            }
            idx[axis] = 0;
        }
    }
    debug_assert_eq!(points.len(), total);
    let index = points.iter().cloned().zip(0..).collect();
    Ok(PointSet { points, index })
}

/// X^a at a point, with x^0 = 1 even when x = 0.
pub fn eval_monomial(big: &Field, point: &[u32], exp: &[u32]) -> u32 {
    let mut acc = 1u32;
    for (&x, &e) in point.iter().zip(exp) {
        let factor = if e == 0 {
            1
        } else if x == 0 {
            0
        } else {
            big.pow(x, e as u64)
        };
        acc = big.mul(acc, factor);
        if acc == 0 {
            return 0;
        }
    }
    acc
}

/// Evaluate a formal F_Q-combination of monomials at every point.
pub fn evaluate(tower: &FieldTower, pts: &PointSet, terms: &[(u32, ExpVec)]) -> Vec<u32> {
    let big = tower.big();
    pts.points()
        .iter()
        .map(|p| {
            let mut acc = 0u32;
            for (c, e) in terms {
                acc = big.add(acc, big.mul(*c, eval_monomial(big, p, e)));
            }
            acc
        })
        .collect()
}

/// A linear code held as a reduced-row-echelon generator basis.
#[derive(Debug, Clone)]
pub struct LinearCode {
    field: Arc<Field>,
    n: usize,
    gen: Vec<Vec<u32>>,
}

impl LinearCode {
    pub fn from_rows(field: Arc<Field>, n: usize, mut rows: Vec<Vec<u32>>) -> LinearCode {
        debug_assert!(rows.iter().all(|r| r.len() == n));
        linalg::rref(&field, &mut rows);
        LinearCode {
            field,
            n,
            gen: rows,
        }
    }

    pub fn zero(field: Arc<Field>, n: usize) -> LinearCode {
        LinearCode {
            field,
            n,
            gen: Vec::new(),
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.gen.len()
    }
    pub fn generator(&self) -> &[Vec<u32>] {
        &self.gen
    }

    pub fn encode(&self, msg: &[u32]) -> Vec<u32> {
        assert_eq!(msg.len(), self.k());
        let mut out = vec![0u32; self.n];
        for (m, row) in msg.iter().zip(&self.gen) {
            if *m == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(row) {
                *o = self.field.add(*o, self.field.mul(*m, g));
            }
        }
        out
    }

    pub fn contains(&self, word: &[u32]) -> bool {
        let mut rows = self.gen.clone();
        rows.push(word.to_vec());
        linalg::rank(&self.field, &rows) == self.k()
    }

    pub fn same_code(&self, other: &LinearCode) -> bool {
        self.field.size() == other.field.size() && self.n == other.n && self.gen == other.gen
    }

    pub fn dual(&self) -> LinearCode {
        let ker = linalg::kernel_basis(&self.field, &self.gen, self.n);
        LinearCode::from_rows(self.field.clone(), self.n, ker)
    }

    /// C[R]: projection onto the positions in R (ascending order).
    pub fn puncture(&self, positions: &[usize]) -> Result<LinearCode, CodeError> {
        let sel = normalize_positions(positions, self.n)?;
        let rows: Vec<Vec<u32>> = self
            .gen
            .iter()
            .map(|r| sel.iter().map(|&c| r[c]).collect())
            .collect();
        Ok(LinearCode::from_rows(self.field.clone(), sel.len(), rows))
    }

    /// C[[R]]: codewords supported inside R, projected onto R.
    pub fn shorten(&self, positions: &[usize]) -> Result<LinearCode, CodeError> {
        let sel = normalize_positions(positions, self.n)?;
        let in_sel: std::collections::BTreeSet<usize> = sel.iter().copied().collect();
        let comp: Vec<usize> = (0..self.n).filter(|c| !in_sel.contains(c)).collect();
        if comp.is_empty() {
            return Ok(self.clone());
        }
        let comp_cols: Vec<Vec<u32>> = self
            .gen
            .iter()
            .map(|r| comp.iter().map(|&c| r[c]).collect())
            .collect();
        // messages whose codeword vanishes on the complement
        let mt = linalg::transpose(&comp_cols, comp.len());
        let msgs = linalg::kernel_basis(&self.field, &mt, self.k());
        let rows: Vec<Vec<u32>> = msgs
            .iter()
            .map(|m| {
                let w = self.encode(m);
                sel.iter().map(|&c| w[c]).collect()
            })
            .collect();
        Ok(LinearCode::from_rows(self.field.clone(), sel.len(), rows))
    }

    pub fn random_codeword<R: Rng>(&self, rng: &mut R) -> Vec<u32> {
        let msg: Vec<u32> = (0..self.k())
            .map(|_| rng.gen_range(0..self.field.size()))
            .collect();
        self.encode(&msg)
    }
}

fn normalize_positions(positions: &[usize], n: usize) -> Result<Vec<usize>, CodeError> {
    if positions.is_empty() {
        return Err(CodeError::EmptyPositions);
    }
    let mut sel: Vec<usize> = positions.to_vec();
    sel.sort_unstable();
    sel.dedup();
    if let Some(&bad) = sel.iter().find(|&&c| c >= n) {
        return Err(CodeError::PositionOutOfRange(bad, n));
    }
    Ok(sel)
}

/// One representative's block of the trace basis.
#[derive(Debug, Clone)]
pub struct TraceBlock {
    pub rep: ExpVec,
    pub orbit_len: usize,
    /// xi_a: a primitive element of F_{q^{i_a}} realized inside F_Q.
    pub xi: u32,
    /// ev_J(T_a(xi^k X^a)) for k = 0..i_a-1, entries lowered to F_q.
    pub rows: Vec<Vec<u32>>,
}

/// The explicit generating set of C_Delta, block per representative.
#[derive(Debug, Clone)]
pub struct TraceBasis {
    pub blocks: Vec<TraceBlock>,
}

impl TraceBasis {
    pub fn row_count(&self) -> usize {
        self.blocks.iter().map(|b| b.rows.len()).sum()
    }
    pub fn all_rows(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.blocks.iter().flat_map(|b| b.rows.iter())
    }
}

/// E_Delta over F_Q spanned by the monomial evaluations of the given exponents.
pub fn build_evaluation_code_from_exponents(
    grid: &GridSpec,
    tower: &FieldTower,
    pts: &PointSet,
    exponents: &[ExpVec],
) -> Result<LinearCode, CodeError> {
    let big = tower.big();
    let mut rows = Vec::with_capacity(exponents.len());
    for e in exponents {
        grid.check_exponent(e)?;
        rows.push(
            pts.points()
                .iter()
                .map(|p| eval_monomial(big, p, e))
                .collect(),
        );
    }
    Ok(LinearCode::from_rows(big.clone(), pts.len(), rows))
}

pub fn build_evaluation_code(
    grid: &GridSpec,
    tower: &FieldTower,
    pts: &PointSet,
    delta: &DeltaSet,
) -> Result<LinearCode, CodeError> {
    let exps: Vec<ExpVec> = delta.elements().cloned().collect();
    build_evaluation_code_from_exponents(grid, tower, pts, &exps)
}

/// C_Delta over F_q together with its trace basis (closed Delta only).
pub fn build_subfield_subcode(
    grid: &GridSpec,
    tower: &FieldTower,
    pts: &PointSet,
    delta: &DeltaSet,
) -> Result<(LinearCode, TraceBasis), CodeError> {
    let big = tower.big();
    let small = tower.small();
    let rel_deg = tower.tower_degree();
    let q = tower.q() as u64;
    let mut blocks = Vec::with_capacity(delta.orbit_count());
    for orbit in delta.orbits() {
        grid.check_exponent(orbit.representative())?;
        let i_a = orbit.len() as u32;
        if rel_deg % i_a != 0 {
            return Err(CodeError::OrbitTowerMismatch(i_a, rel_deg));
        }
        // xi_a = alpha^((Q-1)/(q^{i_a}-1)) is primitive in the subfield F_{q^{i_a}}
        let sub_order = q.pow(i_a) - 1;
        let xi = big.exp_of(big.order() as u64 / sub_order);
        let rep = orbit.representative().clone();
        // Frobenius chains per point of the monomial value
        let base_vals: Vec<u32> = pts
            .points()
            .iter()
            .map(|p| eval_monomial(big, p, &rep))
            .collect();
        let mut frob_base: Vec<Vec<u32>> = Vec::with_capacity(i_a as usize);
        frob_base.push(base_vals);
        for t in 1..i_a as usize {
            let prev = &frob_base[t - 1];
            frob_base.push(prev.iter().map(|&v| tower.frobenius_q(v)).collect());
        }
        let mut rows = Vec::with_capacity(i_a as usize);
        for k in 0..i_a as u64 {
            let xi_k = big.pow(xi, k);
            let mut frob_xi = Vec::with_capacity(i_a as usize);
            let mut cur = xi_k;
            for _ in 0..i_a {
                frob_xi.push(cur);
                cur = tower.frobenius_q(cur);
            }
            let mut row = Vec::with_capacity(pts.len());
            for j in 0..pts.len() {
                let mut acc = 0u32;
                for t in 0..i_a as usize {
                    acc = big.add(acc, big.mul(frob_xi[t], frob_base[t][j]));
                }
                debug_assert_eq!(tower.frobenius_q(acc), acc, "trace value must lie in F_q");
                row.push(tower.try_lower(acc)?);
            }
            rows.push(row);
        }
        blocks.push(TraceBlock {
            rep,
            orbit_len: i_a as usize,
            xi,
            rows,
        });
    }
    let basis = TraceBasis { blocks };
    let all: Vec<Vec<u32>> = basis.all_rows().cloned().collect();
    let code = LinearCode::from_rows(small.clone(), pts.len(), all);
    Ok((code, basis))
}

/// Same as `build_subfield_subcode` but from a raw exponent list; rejects
/// non-closed sets instead of silently closing them.
pub fn build_subfield_subcode_from_elements(
    grid: &GridSpec,
    tower: &FieldTower,
    pts: &PointSet,
    elements: &[ExpVec],
) -> Result<(LinearCode, TraceBasis), CodeError> {
    if !ambient::is_closed(grid, tower.q(), elements)? {
        return Err(CodeError::NotClosed);
    }
    let delta = ambient::build_delta(grid, tower.q(), elements)?;
    build_subfield_subcode(grid, tower, pts, &delta)
}

/// Independent oracle for the subfield-subcode: solve, over GF(p), for every
/// F_Q-combination of E's generators whose coordinates are all fixed by
/// x -> x^q. Shares nothing with the trace-basis route.
pub fn subfield_subcode_oracle(tower: &FieldTower, e_code: &LinearCode) -> LinearCode {
    let big = tower.big();
    let small = tower.small();
    let gf_p = Field::new(tower.p(), 1).expect("prime field");
    let p = tower.p();
    let ell = tower.ell();
    let n = e_code.n();
    let k = e_code.k();
    if k == 0 {
        return LinearCode::zero(small.clone(), n);
    }
    // unknowns: mu_{i,t} over GF(p), lambda_i = sum_t mu_{i,t} x^t (packed: p^t)
    let unknowns = k * ell as usize;
    let mut rows: Vec<Vec<u32>> = vec![vec![0u32; unknowns]; n * ell as usize];
    for i in 0..k {
        for t in 0..ell as usize {
            let basis_el = (p as u64).pow(t as u32) as u32;
            let col = i * ell as usize + t;
            for j in 0..n {
                let z = big.mul(basis_el, e_code.generator()[i][j]);
                let phi = big.sub(tower.frobenius_q(z), z);
                // unpack phi into GF(p) digits
                let mut v = phi;
                for d in 0..ell as usize {
                    rows[j * ell as usize + d][col] = v % p;
                    v /= p;
                }
            }
        }
    }
    let kernel = linalg::kernel_basis(&gf_p, &rows, unknowns);
    let mut words = Vec::with_capacity(kernel.len());
    for mu in &kernel {
        let lambdas: Vec<u32> = (0..k)
            .map(|i| {
                let mut packed = 0u64;
                for t in (0..ell as usize).rev() {
                    packed = packed * p as u64 + mu[i * ell as usize + t] as u64;
                }
                packed as u32
            })
            .collect();
        let word: Vec<u32> = (0..n)
            .map(|j| {
                let mut acc = 0u32;
                for (i, &l) in lambdas.iter().enumerate() {
                    acc = big.add(acc, big.mul(l, e_code.generator()[i][j]));
                }
                tower
                    .try_lower(acc)
                    .expect("oracle codeword coordinate fixed by Frobenius")
            })
            .collect();
        words.push(word);
    }
    LinearCode::from_rows(small.clone(), n, words)
}

/// Trace image Tr(D) of a code over F_Q, as a code over F_q.
pub fn trace_image(tower: &FieldTower, d_code: &LinearCode) -> LinearCode {
    let big = tower.big();
    let small = tower.small();
    let rel_deg = tower.tower_degree();
    let alpha = big.generator();
    let mut rows = Vec::new();
    for g in d_code.generator() {
        for t in 0..rel_deg {
            let c = big.pow(alpha, t as u64);
            let row: Vec<u32> = g
                .iter()
                .map(|&x| {
                    let tr = tower.relative_trace_raw(big.mul(c, x), rel_deg).unwrap();
                    tower
                        .try_lower(tr)
                        .expect("full relative trace lands in F_q")
                })
                .collect();
            rows.push(row);
        }
    }
    LinearCode::from_rows(small.clone(), d_code.n(), rows)
}

/// The dual defining set Delta^perp = H_J minus the union of the orbits of
/// n_J - a over the representatives a of Delta (univariate case).
///
/// Returns `None` when Delta = H_J (the dual is the zero code).
pub fn dual_delta(
    grid: &GridSpec,
    q: u32,
    delta: &DeltaSet,
) -> Result<Option<DeltaSet>, CodeError> {
    if grid.m() != 1 || !grid.in_j(0) {
        return Err(CodeError::DualDeltaArity);
    }
    let n = grid.n_size(0) - 1; // code length and exponent modulus
    let mut excluded = vec![false; n as usize];
    for rep in delta.representatives() {
        let mirrored = (n - rep[0] % n) % n;
        let orbit = ambient::cyclotomic_orbit(grid, &[mirrored], q)?;
        for e in orbit.elements() {
            excluded[e[0] as usize] = true;
        }
    }
    let mut reps: Vec<ExpVec> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for a in 0..n {
        if excluded[a as usize] {
            continue;
        }
        let orbit = ambient::cyclotomic_orbit(grid, &[a], q)?;
        if seen.insert(orbit.representative().clone()) {
            reps.push(orbit.representative().clone());
        }
    }
    if reps.is_empty() {
        return Ok(None);
    }
    Ok(Some(ambient::build_delta(grid, q, &reps)?))
}
