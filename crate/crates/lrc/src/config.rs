//! Flat key=value code configurations.
//!
//! ```text
//! p=3
//! s=2
//! ell=4
//! m=1
//! N=17
//! J=1
//! L=1
//! delta_reps=0,1
//! budget=20000000
//! trials=1000
//! seed=42
//! ```
//!
//! Lists are comma-separated; exponent vectors are colon-joined integers
//! (`delta_reps=0:0,0:1,1:0` for m = 2). Lines starting with `#` are comments.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {0}: expected key=value")]
    BadLine(usize),
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("duplicate key '{0}'")]
    DuplicateKey(String),
    #[error("missing required key '{0}'")]
    MissingKey(&'static str),
    #[error("invalid value for '{key}': {value}")]
    BadValue { key: &'static str, value: String },
    #[error("m = {m} but N has {n} entries")]
    ArityMismatch { m: usize, n: usize },
    #[error("delta_reps entry has {got} coordinates, expected {want}")]
    RepArity { got: usize, want: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeConfig {
    pub p: u32,
    pub s: u32,
    pub ell: u32,
    pub m: usize,
    pub n_sizes: Vec<u32>,
    pub j: Vec<usize>,
    pub l: Vec<usize>,
    pub delta_reps: Vec<Vec<u32>>,
    pub budget: u64,
    pub trials: u64,
    pub seed: u64,
}

fn parse_num<T: std::str::FromStr>(key: &'static str, v: &str) -> Result<T, ConfigError> {
    v.trim().parse().map_err(|_| ConfigError::BadValue {
        key,
        value: v.to_string(),
    })
}

fn parse_list<T: std::str::FromStr>(key: &'static str, v: &str) -> Result<Vec<T>, ConfigError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|_| ConfigError::BadValue {
                key,
                value: v.to_string(),
            })
        })
        .collect()
}

pub fn parse(text: &str) -> Result<CodeConfig, ConfigError> {
    let mut p = None;
    let mut s = None;
    let mut ell = None;
    let mut m = None;
    let mut n_sizes: Option<Vec<u32>> = None;
    let mut j: Option<Vec<usize>> = None;
    let mut l: Option<Vec<usize>> = None;
    let mut delta_reps: Option<Vec<Vec<u32>>> = None;
    let mut budget = 20_000_000u64;
    let mut trials = 1000u64;
    let mut seed = 0u64;

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::BadLine(lineno + 1));
        };
        let key = key.trim();
        let dup = |taken: bool| {
            if taken {
                Err(ConfigError::DuplicateKey(key.to_string()))
            } else {
                Ok(())
            }
        };
        match key {
            "p" => {
                dup(p.is_some())?;
                p = Some(parse_num("p", value)?);
            }
            "s" => {
                dup(s.is_some())?;
                s = Some(parse_num("s", value)?);
            }
            "ell" => {
                dup(ell.is_some())?;
                ell = Some(parse_num("ell", value)?);
            }
            "m" => {
                dup(m.is_some())?;
                m = Some(parse_num("m", value)?);
            }
            "N" => {
                dup(n_sizes.is_some())?;
                n_sizes = Some(parse_list("N", value)?);
            }
            "J" => {
                dup(j.is_some())?;
                j = Some(parse_list("J", value)?);
            }
            "L" => {
                dup(l.is_some())?;
                l = Some(parse_list("L", value)?);
            }
            "delta_reps" => {
                dup(delta_reps.is_some())?;
                let reps: Result<Vec<Vec<u32>>, ConfigError> = value
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.split(':')
                            .map(|c| {
                                c.trim().parse().map_err(|_| ConfigError::BadValue {
                                    key: "delta_reps",
                                    value: t.to_string(),
                                })
                            })
                            .collect()
                    })
                    .collect();
                delta_reps = Some(reps?);
            }
            "budget" => budget = parse_num("budget", value)?,
            "trials" => trials = parse_num("trials", value)?,
            "seed" => seed = parse_num("seed", value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
    }

    let p = p.ok_or(ConfigError::MissingKey("p"))?;
    let s = s.ok_or(ConfigError::MissingKey("s"))?;
    let ell = ell.ok_or(ConfigError::MissingKey("ell"))?;
    let n_sizes = n_sizes.ok_or(ConfigError::MissingKey("N"))?;
    let m = m.unwrap_or(n_sizes.len());
    let j = j.ok_or(ConfigError::MissingKey("J"))?;
    let l = l.ok_or(ConfigError::MissingKey("L"))?;
    let delta_reps = delta_reps.ok_or(ConfigError::MissingKey("delta_reps"))?;
    if m != n_sizes.len() {
        return Err(ConfigError::ArityMismatch {
            m,
            n: n_sizes.len(),
        });
    }
    for rep in &delta_reps {
        if rep.len() != m {
            return Err(ConfigError::RepArity {
                got: rep.len(),
                want: m,
            });
        }
    }
    Ok(CodeConfig {
        p,
        s,
        ell,
        m,
        n_sizes,
        j,
        l,
        delta_reps,
        budget,
        trials,
        seed,
    })
}
