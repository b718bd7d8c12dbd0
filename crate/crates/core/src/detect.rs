//! Enumeration of super-rank tuples up to an iterate bound, grouping into
//! exceptional subspaces, and orbit intersection counts.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{filter_with_orbits, span_canonical, super_rank, FilterVerdict, Matrix, ModularOrbit, Subspace};
use crate::numtheory::is_prime;
use crate::orbit::{check_degree, increasing_tuples, iterate, ExpTuple, ExponentBudget, ProjPoint};
use crate::subsum::bullet_sums_vanish;

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_PRIME_COUNT: usize = 3;

/// `count` distinct primes in `[2^29, 2^30)` drawn from a seeded stream.
pub fn random_primes(count: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c = rng.gen_range((1u64 << 29)..(1u64 << 30)) | 1;
        if is_prime(c) && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct DetectConfig {
    pub d: u64,
    pub r: usize,
    pub max_iter: u64,
    pub primes: Vec<u64>,
    pub budget: ExponentBudget,
    /// Run the modular filter before exact confirmation.
    pub use_filter: bool,
    /// Record the `I^t` block-sum analysis for every confirmed tuple.
    pub analyze_partitions: bool,
}

impl DetectConfig {
    pub fn new(d: u64, r: usize, max_iter: u64) -> DetectConfig {
        DetectConfig {
            d,
            r,
            max_iter,
            primes: random_primes(DEFAULT_PRIME_COUNT, DEFAULT_SEED),
            budget: ExponentBudget::default(),
            use_filter: true,
            analyze_partitions: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEcho {
    pub field: String,
    pub point: Vec<Vec<String>>,
    pub d: u64,
    pub r: usize,
    pub max_iter: u64,
    pub primes: Vec<u64>,
    pub filter: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceEntry {
    pub basis: Vec<Vec<Vec<String>>>,
    pub preimage: Vec<Vec<u64>>,
    pub intersection_count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedTuple {
    pub tuple: Vec<u64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleAnalysis {
    pub tuple: Vec<u64>,
    /// Rows `t` for which every block of `I^t` sums to zero for every
    /// column selection (never expected for a super-rank tuple).
    pub vanishing_bullets: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub enumerated: u64,
    /// Tuples certified full rank by the modular filter.
    pub filtered: u64,
    /// Tuples confirmed super-rank exactly.
    pub confirmed: u64,
    /// Candidates that failed exact confirmation.
    pub rejected_exact: u64,
    pub skipped: Vec<SkippedTuple>,
    pub rejected_primes: Vec<u64>,
    /// Iterates above the exponent budget, excluded from intersection counts.
    pub unchecked_iterates: Vec<u64>,
    pub partition_analyses: Vec<TupleAnalysis>,
    /// With `r = 1` a super-rank pair means two equal iterates.
    pub preperiodic_witness: bool,
    /// Informational value `floor(n / (n - r + 1))`.
    pub generic_expectation: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalReport {
    pub input: InputEcho,
    /// Results cover only tuples with entries up to `max_iter`.
    pub truncated_at: u64,
    pub complete: bool,
    pub tuples: Vec<Vec<u64>>,
    pub subspaces: Vec<SubspaceEntry>,
    pub diagnostics: Diagnostics,
}

impl ExceptionalReport {
    /// The report with run-specific settings erased, for comparing runs that
    /// differ only in filtering.
    pub fn results(&self) -> (&[Vec<u64>], &[SubspaceEntry]) {
        (&self.tuples, &self.subspaces)
    }

    /// One row per subspace.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("subspace,projective_dim,intersection_count,preimage_size,preimage,basis\n");
        for (i, s) in self.subspaces.iter().enumerate() {
            let pre: Vec<String> = s
                .preimage
                .iter()
                .map(|m| m.iter().map(u64::to_string).collect::<Vec<_>>().join("-"))
                .collect();
            let basis = serde_json::to_string(&s.basis).expect("basis serializes").replace('"', "\"\"");
            out.push_str(&format!(
                "{},{},{},{},{},\"{}\"\n",
                i,
                s.basis.len() - 1,
                s.intersection_count,
                s.preimage.len(),
                pre.join(";"),
                basis
            ));
        }
        out
    }
}

enum Outcome {
    Filtered,
    NotSuperRank,
    Confirmed(Subspace),
    Skipped(String),
}

fn rows_of(iterates: &[Option<ProjPoint>], m: &ExpTuple) -> Option<Matrix> {
    m.entries().iter().map(|&i| iterates[i as usize].as_ref().map(|q| q.coords().to_vec())).collect()
}

fn check_tuple(
    m: &ExpTuple,
    iterates: &[Option<ProjPoint>],
    orbits: &[std::result::Result<ModularOrbit, u64>],
    cfg: &DetectConfig,
) -> Result<Outcome> {
    if cfg.use_filter {
        if let FilterVerdict::CertifiedFullRank { .. } = filter_with_orbits(orbits, m, cfg.r)? {
            return Ok(Outcome::Filtered);
        }
    }
    let Some(rows) = rows_of(iterates, m) else {
        return Ok(Outcome::Skipped(format!("exponent {}^{} exceeds the budget", cfg.d, m.max())));
    };
    if !super_rank(&rows)? {
        return Ok(Outcome::NotSuperRank);
    }
    let pts: Vec<ProjPoint> = m.entries().iter().map(|&i| iterates[i as usize].clone().unwrap()).collect();
    Ok(Outcome::Confirmed(span_canonical(&pts)?))
}

/// Exact iterates `phi^m(P)` for `m = 0..=max`; `None` past the budget.
fn orbit_points(p: &ProjPoint, d: u64, max: u64, budget: ExponentBudget) -> Result<Vec<Option<ProjPoint>>> {
    (0..=max)
        .into_par_iter()
        .map(|m| match iterate(p, d, m, budget) {
            Ok(q) => Ok(Some(q)),
            Err(Error::ExponentBudgetExceeded { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// `#{0 <= m <= max : phi^m(P) in L}`.
pub fn intersection_count(p: &ProjPoint, d: u64, l: &Subspace, max: u64, budget: ExponentBudget) -> Result<u64> {
    check_degree(d)?;
    let pts = orbit_points(p, d, max, budget)?;
    count_in(&pts, l)
}

fn count_in(pts: &[Option<ProjPoint>], l: &Subspace) -> Result<u64> {
    let mut c = 0;
    for q in pts.iter().flatten() {
        if l.contains(q)? {
            c += 1;
        }
    }
    Ok(c)
}

/// The full pipeline over all `C(M+1, r+1)` increasing tuples.
pub fn enumerate_exceptional(p: &ProjPoint, cfg: &DetectConfig) -> Result<ExceptionalReport> {
    check_degree(cfg.d)?;
    if cfg.r == 0 {
        return Err(Error::Unsupported("r = 0".into()));
    }
    p.require_nonzero_coords()?;
    let n = p.dim();
    if cfg.r > n {
        return Err(Error::Unsupported(format!("r = {} exceeds the dimension {n}", cfg.r)));
    }
    if cfg.max_iter < cfg.r as u64 {
        return Err(Error::InvalidTuple(format!("iterate bound {} is below r = {}", cfg.max_iter, cfg.r)));
    }

    let iterates = orbit_points(p, cfg.d, cfg.max_iter, cfg.budget)?;
    let orbits: Vec<std::result::Result<ModularOrbit, u64>> = if cfg.use_filter {
        cfg.primes
            .par_iter()
            .map(|&q| ModularOrbit::new(p, cfg.d, cfg.max_iter, q).map_err(|_| q))
            .collect()
    } else {
        Vec::new()
    };
    if cfg.use_filter && orbits.iter().all(|o| o.is_err()) {
        return Err(Error::AllPrimesBad);
    }

    let tuples = increasing_tuples(cfg.r + 1, cfg.max_iter);
    let outcomes: Vec<Result<Outcome>> = tuples.par_iter().map(|m| check_tuple(m, &iterates, &orbits, cfg)).collect();

    let mut diag = Diagnostics {
        enumerated: tuples.len() as u64,
        rejected_primes: orbits.iter().filter_map(|o| o.as_ref().err().copied()).collect(),
        unchecked_iterates: (0..=cfg.max_iter).filter(|&m| iterates[m as usize].is_none()).collect(),
        generic_expectation: (n / (n - cfg.r + 1)) as u64,
        ..Diagnostics::default()
    };
    let mut found = Vec::new();
    let mut groups: Vec<(Subspace, Vec<Vec<u64>>)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (m, out) in tuples.iter().zip(outcomes) {
        match out? {
            Outcome::Filtered => diag.filtered += 1,
            Outcome::NotSuperRank => diag.rejected_exact += 1,
            Outcome::Skipped(reason) => diag.skipped.push(SkippedTuple {
                tuple: m.entries().to_vec(),
                reason,
            }),
            Outcome::Confirmed(l) => {
                diag.confirmed += 1;
                found.push(m.clone());
                let key = l.key();
                match index.get(&key) {
                    Some(&k) => groups[k].1.push(m.entries().to_vec()),
                    None => {
                        index.insert(key, groups.len());
                        groups.push((l, vec![m.entries().to_vec()]));
                    }
                }
            }
        }
    }

    if cfg.analyze_partitions {
        diag.partition_analyses = found
            .par_iter()
            .map(|m| {
                let rows = rows_of(&iterates, m).expect("confirmed tuples have exact rows");
                let vanishing = (0..=cfg.r)
                    .map(|t| bullet_sums_vanish(&rows, t).map(|v| (t, v)))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .filter_map(|(t, v)| v.then_some(t))
                    .collect();
                Ok(TupleAnalysis {
                    tuple: m.entries().to_vec(),
                    vanishing_bullets: vanishing,
                })
            })
            .collect::<Result<Vec<_>>>()?;
    }
    diag.preperiodic_witness = cfg.r == 1 && !found.is_empty();

    let subspaces = groups
        .par_iter()
        .map(|(l, pre)| {
            Ok(SubspaceEntry {
                basis: l.to_json().basis,
                preimage: pre.clone(),
                intersection_count: count_in(&iterates, l)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let complete = diag.skipped.is_empty() && diag.unchecked_iterates.is_empty();
    Ok(ExceptionalReport {
        input: InputEcho {
            field: p.field().to_string(),
            point: p.coords().iter().map(|c| c.to_strings()).collect(),
            d: cfg.d,
            r: cfg.r,
            max_iter: cfg.max_iter,
            primes: if cfg.use_filter { cfg.primes.clone() } else { Vec::new() },
            filter: cfg.use_filter,
        },
        truncated_at: cfg.max_iter,
        complete,
        tuples: found.iter().map(|m| m.entries().to_vec()).collect(),
        subspaces,
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rationals;

    fn pt(v: &[i64]) -> ProjPoint {
        ProjPoint::from_ints(&rationals(), v).unwrap()
    }

    #[test]
    fn primes_are_seeded() {
        let a = random_primes(3, 7);
        assert_eq!(a, random_primes(3, 7));
        assert_ne!(a, random_primes(3, 8));
        assert!(a.iter().all(|&p| is_prime(p) && p >= 1 << 29 && p < 1 << 30));
    }

    #[test]
    fn one_line_for_special_point() {
        let rep = enumerate_exceptional(&pt(&[1, 2, -3]), &DetectConfig::new(2, 2, 3)).unwrap();
        assert_eq!(rep.tuples, vec![vec![0, 1, 2]]);
        assert_eq!(rep.subspaces.len(), 1);
        assert_eq!(rep.subspaces[0].preimage, vec![vec![0, 1, 2]]);
        assert_eq!(rep.subspaces[0].intersection_count, 3);
        assert_eq!(rep.diagnostics.enumerated, 4);
        assert_eq!(rep.diagnostics.filtered, 3);
        assert!(rep.diagnostics.partition_analyses[0].vanishing_bullets.is_empty());
        assert!(rep.complete);
    }

    #[test]
    fn none_for_generic_point() {
        let rep = enumerate_exceptional(&pt(&[1, 2, 3]), &DetectConfig::new(2, 2, 5)).unwrap();
        assert!(rep.subspaces.is_empty());
        assert_eq!(rep.diagnostics.enumerated, 20);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(enumerate_exceptional(&pt(&[1, 2, 3]), &DetectConfig::new(2, 0, 5)), Err(Error::Unsupported(_))));
        assert!(matches!(enumerate_exceptional(&pt(&[1, 2, 3]), &DetectConfig::new(2, 3, 5)), Err(Error::Unsupported(_))));
        assert_eq!(
            enumerate_exceptional(&ProjPoint::from_ints(&rationals(), &[1, 0, 3]).unwrap(), &DetectConfig::new(2, 2, 5)).unwrap_err(),
            Error::ZeroCoordinate(1)
        );
    }

    #[test]
    fn budget_skips_are_reported() {
        let mut cfg = DetectConfig::new(2, 1, 4);
        cfg.budget = ExponentBudget(8);
        let rep = enumerate_exceptional(&pt(&[1, 2]), &cfg).unwrap();
        assert!(!rep.complete);
        assert_eq!(rep.diagnostics.unchecked_iterates, vec![4]);
        let skipped: Vec<Vec<u64>> = rep.diagnostics.skipped.iter().map(|s| s.tuple.clone()).collect();
        // tuples involving iterate 4 that the filter could not dismiss
        assert!(skipped.iter().all(|m| m.contains(&4)));
    }

    #[test]
    fn preperiodic_pair() {
        // [1, -1] has phi^1 = phi^2 = [1, 1]
        let rep = enumerate_exceptional(&pt(&[1, -1]), &DetectConfig::new(2, 1, 3)).unwrap();
        assert!(rep.diagnostics.preperiodic_witness);
        assert_eq!(rep.subspaces.len(), 1);
        assert_eq!(rep.subspaces[0].intersection_count, 3);
    }

    #[test]
    fn csv_has_a_row_per_subspace() {
        let rep = enumerate_exceptional(&pt(&[1, 2, -3]), &DetectConfig::new(2, 2, 3)).unwrap();
        let csv = rep.to_csv();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.lines().nth(1).unwrap().starts_with("0,1,3,1,0-1-2,"));
    }
}
