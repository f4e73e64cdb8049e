//! Built-in table presets, the shared build/analyze pipeline, and CSV rows.

use thiserror::Error;

use crate::ambient::{self, DeltaSet, GridError, GridSpec};
use crate::evalcode::{self, CodeError, LinearCode, PointSet, TraceBasis};
use crate::galois::{make_tower, FieldTower, GaloisError};
use crate::locality::{self, Defects, LocalityError, LocalitySummary};
use crate::metrics::{self, DistanceMode, DistanceOptions, DistanceResult, MetricsError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Locality(#[from] LocalityError),
    #[error("unknown table id {0} (valid: 1..=10)")]
    UnknownTable(u32),
}

/// Everything constructed for one code.
pub struct BuiltCode {
    pub tower: FieldTower,
    pub grid: GridSpec,
    pub pts: PointSet,
    pub delta: DeltaSet,
    pub code: LinearCode,
    pub trace_basis: TraceBasis,
}

pub fn build_code(
    p: u32,
    s: u32,
    ell: u32,
    n_sizes: &[u32],
    j: &[usize],
    l: &[usize],
    reps: &[Vec<u32>],
) -> Result<BuiltCode, BuildError> {
    let tower = make_tower(p, s, ell)?;
    let grid = GridSpec::new(n_sizes.to_vec(), j, l)?;
    grid.validate(tower.q(), tower.big_q())?;
    let pts = evalcode::enumerate_points(&grid, &tower)?;
    let delta = ambient::build_delta(&grid, tower.q(), reps)?;
    let (code, trace_basis) = evalcode::build_subfield_subcode(&grid, &tower, &pts, &delta)?;
    Ok(BuiltCode {
        tower,
        grid,
        pts,
        delta,
        code,
        trace_basis,
    })
}

/// One row of the machine-readable table output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub d_mode: DistanceMode,
    pub d_dual: usize,
    pub r: usize,
    pub delta: usize,
    pub defect: i64,
}

pub const CSV_HEADER: &str = "q,n,k,d,d_mode,d_dual,r,delta,defect";

pub fn rows_to_csv(rows: &[TableRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let mode = match r.d_mode {
            DistanceMode::Exact => "exact",
            DistanceMode::Upper => "upper",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.q, r.n, r.k, r.d, mode, r.d_dual, r.r, r.delta, r.defect
        ));
    }
    out
}

/// Full analysis of a built code.
pub struct CodeAnalysis {
    pub q: u32,
    pub big_q: u32,
    pub n: usize,
    pub k: usize,
    pub d: DistanceResult,
    pub d_dual: DistanceResult,
    pub locality: LocalitySummary,
    /// Defects from the (r, delta) pair, when one is certified.
    pub defects: Option<Defects>,
    /// (t, upper estimate of D_t) along the t-locality chain.
    pub dt_estimates: Vec<(usize, i64)>,
    pub sharp: Option<bool>,
}

impl CodeAnalysis {
    pub fn row(&self) -> TableRow {
        let (r, delta) = match self.locality {
            LocalitySummary::RDelta { r, delta, .. } => (r, delta),
            LocalitySummary::ClassicalOnly { r } => (r, 0),
        };
        TableRow {
            q: self.q,
            n: self.n,
            k: self.k,
            d: self.d.value,
            d_mode: self.d.mode,
            d_dual: self.d_dual.value,
            r,
            delta,
            defect: self.defects.map(|d| d.d_delta_minus_1).unwrap_or(-1),
        }
    }
}

/// Complements of small windows of first-axis fibers; used to hunt for
/// low-weight dual words supported on a few fibers.
fn fiber_complement_classes(pts: &PointSet) -> Vec<Vec<usize>> {
    use std::collections::BTreeMap;
    let mut fibers: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, p) in pts.points().iter().enumerate() {
        fibers.entry(p[0]).or_default().push(i);
    }
    let fibers: Vec<Vec<usize>> = fibers.into_values().collect();
    let mut classes = Vec::new();
    for w in [2usize, 3] {
        if fibers.len() < w {
            continue;
        }
        for start in 0..=fibers.len() - w {
            let support: Vec<usize> = fibers[start..start + w].iter().flatten().copied().collect();
            let class: Vec<usize> = (0..pts.len()).filter(|i| !support.contains(i)).collect();
            classes.push(class);
        }
    }
    classes
}

pub fn analyze_code(built: &BuiltCode, opts: &DistanceOptions) -> Result<CodeAnalysis, BuildError> {
    let q = built.tower.q();
    let n = built.code.n();
    let k = built.code.k();

    let mut d_opts = opts.clone();
    if !built.grid.l_is_empty() {
        d_opts.shorten_classes = locality::orbit_classes(&built.pts, &built.grid, &built.tower)?;
    }
    let d = metrics::min_distance(&built.code, &d_opts)?;

    // dual distance: certified univariate squeeze first, then search
    let mut d_dual = locality::univariate_dual_distance(
        &built.code,
        &built.delta,
        &built.grid,
        &built.pts,
        &built.tower,
    )?;
    if d_dual.is_none() {
        let mut dual_opts = opts.clone();
        dual_opts.shorten_classes = fiber_complement_classes(&built.pts);
        d_dual = Some(metrics::dual_distance(&built.code, &dual_opts)?);
    }
    let d_dual = d_dual.unwrap();

    let locality_summary = locality::locality_pair(&built.delta, q)?;
    let (defects, dt_estimates) = match &locality_summary {
        LocalitySummary::RDelta {
            r,
            delta,
            rt_bounds,
        } => {
            let defects = locality::singleton_defects(n, k, d.value, *r, *delta);
            let dts = rt_bounds
                .iter()
                .map(|&(t, rt)| (t, locality::defect_t(n, k, d.value, rt, t)))
                .collect();
            (Some(defects), dts)
        }
        LocalitySummary::ClassicalOnly { r } => (
            None,
            vec![(1, locality::singleton_defects(n, k, d.value, *r, 2).d1)],
        ),
    };
    let sharp = if d_dual.is_exact() {
        let r = match &locality_summary {
            LocalitySummary::RDelta { r, .. } => *r,
            LocalitySummary::ClassicalOnly { r } => *r,
        };
        Some(locality::sharpness(r, &d_dual)?)
    } else {
        None
    };

    Ok(CodeAnalysis {
        q,
        big_q: built.tower.big_q(),
        n,
        k,
        d,
        d_dual,
        locality: locality_summary,
        defects,
        dt_estimates,
        sharp,
    })
}

/// A table preset: tower, grid, and the defining-set representatives per row.
pub struct TablePreset {
    pub id: u32,
    pub p: u32,
    pub s: u32,
    pub ell: u32,
    pub n_sizes: Vec<u32>,
    pub j: Vec<usize>,
    pub l: Vec<usize>,
    pub rows: Vec<Vec<Vec<u32>>>,
}

fn univariate_rows(rs: &[u32]) -> Vec<Vec<Vec<u32>>> {
    rs.iter()
        .map(|&r| (0..r).map(|a| vec![a]).collect())
        .collect()
}

/// Cumulative rows: row i uses the base set plus all additions up to i.
fn cumulative_rows(base: Vec<Vec<u32>>, additions: &[Vec<Vec<u32>>]) -> Vec<Vec<Vec<u32>>> {
    let mut rows = vec![base];
    for add in additions {
        let mut next = rows.last().unwrap().clone();
        next.extend(add.iter().cloned());
        rows.push(next);
    }
    rows
}

pub fn preset(id: u32) -> Option<TablePreset> {
    let t = match id {
        1 => TablePreset {
            id,
            p: 2,
            s: 3,
            ell: 6,
            n_sizes: vec![22],
            j: vec![1],
            l: vec![1],
            rows: univariate_rows(&[2, 3, 4, 6]),
        },
        2 => TablePreset {
            id,
            p: 3,
            s: 2,
            ell: 4,
            n_sizes: vec![17],
            j: vec![1],
            l: vec![1],
            rows: univariate_rows(&[2, 3, 4, 5, 6, 7]),
        },
        3 => TablePreset {
            id,
            p: 11,
            s: 1,
            ell: 2,
            n_sizes: vec![21],
            j: vec![1],
            l: vec![1],
            rows: univariate_rows(&[2, 3, 4, 5, 6, 7]),
        },
        4 => TablePreset {
            id,
            p: 5,
            s: 2,
            ell: 4,
            n_sizes: vec![49],
            j: vec![1],
            l: vec![1],
            rows: univariate_rows(&[2, 3, 4, 5, 6, 7]),
        },
        5 => TablePreset {
            id,
            p: 3,
            s: 3,
            ell: 6,
            n_sizes: vec![53],
            j: vec![1],
            l: vec![1],
            rows: univariate_rows(&[2, 3, 4, 5, 6, 7]),
        },
        6 => TablePreset {
            id,
            p: 11,
            s: 1,
            ell: 1,
            n_sizes: vec![11, 3],
            j: vec![1, 2],
            l: vec![1],
            rows: cumulative_rows(
                vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![2, 0]],
                &[
                    vec![vec![3, 0]],
                    vec![vec![4, 0]],
                    vec![vec![5, 0]],
                    vec![vec![1, 1], vec![6, 0]],
                    vec![vec![7, 1]],
                ],
            ),
        },
        7 => TablePreset {
            id,
            p: 2,
            s: 4,
            ell: 4,
            n_sizes: vec![16, 4],
            j: vec![1, 2],
            l: vec![1],
            rows: cumulative_rows(
                vec![vec![0, 0], vec![0, 1], vec![1, 1], vec![2, 0], vec![3, 0]],
                &[
                    vec![vec![4, 0]],
                    vec![vec![5, 0]],
                    vec![vec![4, 1], vec![6, 1]],
                ],
            ),
        },
        8 => TablePreset {
            id,
            p: 5,
            s: 2,
            ell: 2,
            n_sizes: vec![25, 3],
            j: vec![1, 2],
            l: vec![1],
            rows: cumulative_rows(
                vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1], vec![2, 0]],
                &[
                    vec![vec![3, 0]],
                    vec![vec![4, 0]],
                    vec![vec![5, 0]],
                    vec![vec![6, 0]],
                    vec![vec![7, 0]],
                    vec![vec![8, 0]],
                    vec![vec![9, 0]],
                ],
            ),
        },
        9 => TablePreset {
            id,
            p: 3,
            s: 3,
            ell: 3,
            n_sizes: vec![27, 3],
            j: vec![1, 2],
            l: vec![1],
            rows: cumulative_rows(
                vec![
                    vec![0, 0],
                    vec![0, 1],
                    vec![1, 0],
                    vec![1, 1],
                    vec![2, 0],
                    vec![3, 0],
                ],
                &[
                    vec![vec![4, 0]],
                    vec![vec![5, 0]],
                    vec![vec![6, 0]],
                    vec![vec![7, 0]],
                    vec![vec![8, 0]],
                    vec![vec![9, 0]],
                    vec![vec![10, 0]],
                    vec![vec![11, 0]],
                ],
            ),
        },
        10 => TablePreset {
            id,
            p: 2,
            s: 5,
            ell: 10,
            n_sizes: vec![94],
            j: vec![1],
            l: vec![1],
            rows: univariate_rows(&[2, 3, 4]),
        },
        _ => return None,
    };
    Some(t)
}

/// Build and analyze every row of a preset table.
pub fn table_rows(
    id: u32,
    opts: &DistanceOptions,
) -> Result<Vec<(CodeAnalysis, BuiltCode)>, BuildError> {
    let preset = preset(id).ok_or(BuildError::UnknownTable(id))?;
    let mut out = Vec::with_capacity(preset.rows.len());
    for reps in &preset.rows {
        let built = build_code(
            preset.p,
            preset.s,
            preset.ell,
            &preset.n_sizes,
            &preset.j,
            &preset.l,
            reps,
        )?;
        let analysis = analyze_code(&built, opts)?;
        out.push((analysis, built));
    }
    Ok(out)
}
