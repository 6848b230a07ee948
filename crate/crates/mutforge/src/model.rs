//! Shared domain types: mutation records, the pool set algebra
//! (A ⊇ C ⊇ U, viable = C − U), kill matrices, and bug cases.
//!
//! All types are immutable after construction and classification is a pure
//! function, so everything here can be shared read-only across executors.

use crate::syntax::normalize_tokens;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid source location: {0}")]
    InvalidLocation(String),
    #[error("pool integrity error: {0}")]
    Integrity(String),
    #[error("pool is not classified (record `{0}` has no status)")]
    Unclassified(String),
    #[error("kill matrix is empty")]
    EmptyMatrix,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

/// A file-relative line range, 1-based and inclusive.
#[derive(
    Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct SourceLocation {
    pub file: String,
    pub line_start: u32,
    pub line_end: u32,
}

impl SourceLocation {
    pub fn new(file: impl Into<String>, line_start: u32, line_end: u32) -> Result<Self, ModelError> {
        let loc = SourceLocation { file: file.into(), line_start, line_end };
        loc.validate()?;
        Ok(loc)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.file.is_empty() {
            return Err(ModelError::InvalidLocation("file must be non-empty".into()));
        }
        if self.file.split(['/', '\\']).any(|seg| seg == "..") {
            return Err(ModelError::InvalidLocation(format!(
                "file `{}` must not contain parent-directory segments",
                self.file
            )));
        }
        if self.line_start < 1 {
            return Err(ModelError::InvalidLocation("line_start must be >= 1".into()));
        }
        if self.line_end < self.line_start {
            return Err(ModelError::InvalidLocation(format!(
                "line_end {} precedes line_start {}",
                self.line_end, self.line_start
            )));
        }
        Ok(())
    }

    pub fn single_line(file: impl Into<String>, line: u32) -> Result<Self, ModelError> {
        Self::new(file, line, line)
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line_start == self.line_end {
            write!(f, "{}:{}", self.file, self.line_start)
        } else {
            write!(f, "{}:{}-{}", self.file, self.line_start, self.line_end)
        }
    }
}

/// Where a mutation came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Origin {
    Llm { backend: String, prompt: String },
    Rule { operator: String },
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Llm { backend, prompt } => write!(f, "{backend}/{prompt}"),
            Origin::Rule { operator } => write!(f, "rule/{operator}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

/// One compiler/checker finding. `kind` is an adapter-specific stable code
/// that the error-type taxonomy matches on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: String,
    pub message: String,
    pub location: Option<SourceLocation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MutantStatus {
    NonCompilable { diagnostics: Vec<Diagnostic> },
    IdenticalToOriginal,
    Duplicate { of: String },
    Viable,
    /// Assigned only when imported manual labels mark a viable mutant
    /// equivalent.
    EquivalentLabeled,
}

impl MutantStatus {
    pub fn is_compilable(&self) -> bool {
        !matches!(self, MutantStatus::NonCompilable { .. })
    }

    pub fn is_useless(&self) -> bool {
        matches!(self, MutantStatus::IdenticalToOriginal | MutantStatus::Duplicate { .. })
    }

    /// Member of the practical working set C − U.
    pub fn is_viable(&self) -> bool {
        matches!(self, MutantStatus::Viable | MutantStatus::EquivalentLabeled)
    }
}

/// One candidate mutation as returned by a generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationRecord {
    pub id: String,
    pub origin: Origin,
    pub location: SourceLocation,
    pub original_text: String,
    pub mutated_text: String,
    /// `None` until the pool is classified.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<MutantStatus>,
    /// Seconds of generator wall time attributed to this record.
    pub gen_wall_time: f64,
    /// Absent for rule generators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_usage: Option<TokenUsage>,
}

/// The set A of all generated mutations for one (generator, project) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationPool {
    pub project_id: String,
    pub generator_id: String,
    pub records: Vec<MutationRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCounts {
    /// |A|: everything generated.
    pub all: usize,
    /// |C|: records that are not non-compilable.
    pub compilable: usize,
    /// |U|: identical-to-original plus duplicates.
    pub useless: usize,
    /// |C − U|: the practical working set.
    pub viable: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompileOutcome {
    Ok,
    Failed(Vec<Diagnostic>),
}

impl MutationPool {
    pub fn new(project_id: impl Into<String>, generator_id: impl Into<String>) -> Self {
        MutationPool { project_id: project_id.into(), generator_id: generator_id.into(), records: Vec::new() }
    }

    pub fn record(&self, id: &str) -> Option<&MutationRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn is_classified(&self) -> bool {
        self.records.iter().all(|r| r.status.is_some())
    }

    /// (|A|, |C|, |U|, viable). Errors on unclassified pools.
    pub fn set_counts(&self) -> Result<SetCounts, ModelError> {
        let mut counts = SetCounts { all: self.records.len(), compilable: 0, useless: 0, viable: 0 };
        for r in &self.records {
            let status = r
                .status
                .as_ref()
                .ok_or_else(|| ModelError::Unclassified(r.id.clone()))?;
            if status.is_compilable() {
                counts.compilable += 1;
            }
            if status.is_useless() {
                counts.useless += 1;
            }
            if status.is_viable() {
                counts.viable += 1;
            }
        }
        Ok(counts)
    }

    pub fn viable_records(&self) -> Vec<&MutationRecord> {
        self.records.iter().filter(|r| r.status.as_ref().is_some_and(|s| s.is_viable())).collect()
    }

    pub fn to_json(&self) -> Result<String, ModelError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self, ModelError> {
        let pool: MutationPool = serde_json::from_str(json)?;
        let mut seen = BTreeSet::new();
        for r in &pool.records {
            r.location.validate()?;
            if !seen.insert(r.id.clone()) {
                return Err(ModelError::Integrity(format!("duplicate record id `{}`", r.id)));
            }
        }
        Ok(pool)
    }
}

/// Assign statuses. Precedence per record: identical-to-original (token
/// equality), then non-compilable, then duplicate of an earlier viable
/// record at the same location, then viable. Identical and duplicate
/// records are never compiled, so they may lack compile results; records
/// token-equal to an earlier screened record inherit its outcome.
///
/// Re-running with the same inputs is a no-op, and an imported
/// `EquivalentLabeled` status survives reclassification.
pub fn classify(
    pool: &MutationPool,
    compile_results: &BTreeMap<String, CompileOutcome>,
) -> Result<MutationPool, ModelError> {
    for id in compile_results.keys() {
        if pool.record(id).is_none() {
            return Err(ModelError::Integrity(format!(
                "compile result for unknown record id `{id}`"
            )));
        }
    }
    let mut ids = BTreeSet::new();
    for r in &pool.records {
        if !ids.insert(&r.id) {
            return Err(ModelError::Integrity(format!("duplicate record id `{}`", r.id)));
        }
    }

    // (location, token sequence) → outcome of the first screened twin.
    let mut screened: BTreeMap<(SourceLocation, Vec<String>), CompileOutcome> = BTreeMap::new();
    // (location, token sequence) → id of the first viable occurrence.
    let mut first_viable: BTreeMap<(SourceLocation, Vec<String>), String> = BTreeMap::new();

    let mut out = pool.clone();
    for record in &mut out.records {
        let original = normalize_tokens(&record.original_text);
        let mutated = normalize_tokens(&record.mutated_text);
        if mutated == original {
            record.status = Some(MutantStatus::IdenticalToOriginal);
            continue;
        }
        let key = (record.location.clone(), mutated);
        let outcome = match compile_results.get(&record.id) {
            Some(o) => {
                screened.entry(key.clone()).or_insert_with(|| o.clone());
                o.clone()
            }
            None => match screened.get(&key) {
                Some(o) => o.clone(),
                None => {
                    return Err(ModelError::Integrity(format!(
                        "record `{}` has no compile result and no screened twin",
                        record.id
                    )))
                }
            },
        };
        record.status = Some(match outcome {
            CompileOutcome::Failed(diagnostics) => MutantStatus::NonCompilable { diagnostics },
            CompileOutcome::Ok => match first_viable.get(&key) {
                Some(first_id) => MutantStatus::Duplicate { of: first_id.clone() },
                None => {
                    first_viable.insert(key, record.id.clone());
                    // Keep an imported equivalence label across reruns.
                    if matches!(record.status, Some(MutantStatus::EquivalentLabeled)) {
                        MutantStatus::EquivalentLabeled
                    } else {
                        MutantStatus::Viable
                    }
                }
            },
        });
    }
    Ok(out)
}

/// Per-test result of one execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub test_id: String,
    pub verdict: Verdict,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Timeout,
    Crash,
}

impl Verdict {
    pub fn code(self) -> char {
        match self {
            Verdict::Pass => 'P',
            Verdict::Fail => 'F',
            Verdict::Timeout => 'T',
            Verdict::Crash => 'C',
        }
    }

    pub fn from_code(c: char) -> Option<Verdict> {
        Some(match c {
            'P' => Verdict::Pass,
            'F' => Verdict::Fail,
            'T' => Verdict::Timeout,
            'C' => Verdict::Crash,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    Verdict(Verdict),
    NotRun,
}

impl Cell {
    pub fn code(self) -> char {
        match self {
            Cell::Verdict(v) => v.code(),
            Cell::NotRun => 'N',
        }
    }
}

/// Per-mutant, per-test outcomes plus the clean-program baseline.
///
/// A test kills a mutant when the baseline passes it and the mutant run
/// fails, times out, or crashes: any observable behavioral difference
/// counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillMatrix {
    pub mutant_ids: Vec<String>,
    pub test_ids: Vec<String>,
    pub baseline: BTreeMap<String, Verdict>,
    /// Row-major: `rows[mutant][test]` aligned with the id vectors.
    pub rows: Vec<Vec<Cell>>,
}

impl KillMatrix {
    pub fn cell(&self, mutant_id: &str, test_id: &str) -> Option<Cell> {
        let m = self.mutant_ids.iter().position(|m| m == mutant_id)?;
        let t = self.test_ids.iter().position(|t| t == test_id)?;
        Some(self.rows[m][t])
    }

    /// fT_M: tests that pass on the baseline and not on the mutant.
    pub fn killing_tests(&self, mutant_id: &str) -> BTreeSet<String> {
        let Some(m) = self.mutant_ids.iter().position(|m| m == mutant_id) else {
            return BTreeSet::new();
        };
        self.test_ids
            .iter()
            .enumerate()
            .filter(|(t, test_id)| {
                self.baseline.get(*test_id) == Some(&Verdict::Pass)
                    && matches!(
                        self.rows[m][*t],
                        Cell::Verdict(Verdict::Fail)
                            | Cell::Verdict(Verdict::Timeout)
                            | Cell::Verdict(Verdict::Crash)
                    )
            })
            .map(|(_, test_id)| test_id.clone())
            .collect()
    }

    pub fn is_killed(&self, mutant_id: &str) -> bool {
        !self.killing_tests(mutant_id).is_empty()
    }

    /// Killed mutants over all mutants; errors on an empty matrix.
    pub fn mutation_score(&self) -> Result<f64, ModelError> {
        if self.mutant_ids.is_empty() {
            return Err(ModelError::EmptyMatrix);
        }
        let killed = self.mutant_ids.iter().filter(|m| self.is_killed(m)).count();
        Ok(killed as f64 / self.mutant_ids.len() as f64)
    }
}

/// A real bug: fixed and buggy snapshots plus the bug-triggering tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BugCase {
    pub id: String,
    pub fixed_dir: PathBuf,
    pub buggy_dir: PathBuf,
    pub tests_dir: PathBuf,
    pub location: SourceLocation,
    /// fT_B; never empty for a valid case.
    pub triggering_tests: BTreeSet<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, line: u32, original: &str, mutated: &str) -> MutationRecord {
        MutationRecord {
            id: id.into(),
            origin: Origin::Rule { operator: "AOR".into() },
            location: SourceLocation::single_line("main.mini", line).unwrap(),
            original_text: original.into(),
            mutated_text: mutated.into(),
            status: None,
            gen_wall_time: 0.0,
            token_usage: None,
        }
    }

    fn ok_results(pool: &MutationPool) -> BTreeMap<String, CompileOutcome> {
        pool.records.iter().map(|r| (r.id.clone(), CompileOutcome::Ok)).collect()
    }

    #[test]
    fn location_invariants() {
        assert!(SourceLocation::new("a.mini", 1, 1).is_ok());
        assert!(SourceLocation::new("", 1, 1).is_err());
        assert!(SourceLocation::new("a.mini", 0, 1).is_err());
        assert!(SourceLocation::new("a.mini", 3, 2).is_err());
        assert!(SourceLocation::new("../a.mini", 1, 1).is_err());
        assert!(SourceLocation::new("sub/a.mini", 1, 2).is_ok());
    }

    #[test]
    fn identical_tokens_classify_identical() {
        let mut pool = MutationPool::new("p", "g");
        pool.records.push(rec("m1", 1, "a = b + 1;", "a  =  b + 1 ;"));
        let out = classify(&pool, &BTreeMap::new()).unwrap();
        assert_eq!(out.records[0].status, Some(MutantStatus::IdenticalToOriginal));
    }

    #[test]
    fn whitespace_variants_become_duplicates() {
        let mut pool = MutationPool::new("p", "g");
        pool.records.push(rec("m1", 1, "a = b + 1;", "a = b - 1;"));
        pool.records.push(rec("m2", 1, "a = b + 1;", "a=b-1;"));
        let results: BTreeMap<_, _> = [("m1".to_string(), CompileOutcome::Ok)].into();
        let out = classify(&pool, &results).unwrap();
        assert_eq!(out.records[0].status, Some(MutantStatus::Viable));
        assert_eq!(out.records[1].status, Some(MutantStatus::Duplicate { of: "m1".into() }));
    }

    #[test]
    fn duplicates_at_different_locations_stay_viable() {
        let mut pool = MutationPool::new("p", "g");
        pool.records.push(rec("m1", 1, "a = b + 1;", "a = b - 1;"));
        pool.records.push(rec("m2", 2, "a = b + 1;", "a = b - 1;"));
        let out = classify(&pool, &ok_results(&pool)).unwrap();
        assert!(out.records.iter().all(|r| r.status == Some(MutantStatus::Viable)));
    }

    /// 10 records: 3 failing compile, 1 identical, 2 duplicates.
    fn fixture_pool() -> (MutationPool, BTreeMap<String, CompileOutcome>) {
        let mut pool = MutationPool::new("p", "g");
        let mut results = BTreeMap::new();
        let diag = Diagnostic { kind: "type-error".into(), message: "boom".into(), location: None };
        for i in 0..3 {
            let id = format!("bad{i}");
            pool.records.push(rec(&id, 10 + i, "x = 1;", &format!("x = {i} +;")));
            results.insert(id, CompileOutcome::Failed(vec![diag.clone()]));
        }
        pool.records.push(rec("same", 20, "x = 1;", "x = 1 ;"));
        for i in 0..2 {
            let id = format!("v{i}");
            pool.records.push(rec(&id, 30 + i, "x = 1;", "x = 2;"));
            results.insert(id, CompileOutcome::Ok);
        }
        // Two duplicates of v0 at its location.
        for i in 0..2 {
            let id = format!("dup{i}");
            pool.records.push(rec(&id, 30, "x = 1;", "x =  2;"));
        }
        for i in 0..2 {
            let id = format!("w{i}");
            pool.records.push(rec(&id, 40 + i, "x = 1;", "x = 0;"));
            results.insert(id, CompileOutcome::Ok);
        }
        (pool, results)
    }

    #[test]
    fn fixture_counts_match_hand_derivation() {
        let (pool, results) = fixture_pool();
        let out = classify(&pool, &results).unwrap();
        let counts = out.set_counts().unwrap();
        assert_eq!(counts, SetCounts { all: 10, compilable: 7, useless: 3, viable: 4 });
    }

    #[test]
    fn empty_pool_counts_are_zero() {
        let pool = MutationPool::new("p", "g");
        assert_eq!(
            pool.set_counts().unwrap(),
            SetCounts { all: 0, compilable: 0, useless: 0, viable: 0 }
        );
    }

    #[test]
    fn all_viable_pool() {
        let mut pool = MutationPool::new("p", "g");
        pool.records.push(rec("m1", 1, "x = 1;", "x = 2;"));
        pool.records.push(rec("m2", 2, "x = 1;", "x = 3;"));
        let out = classify(&pool, &ok_results(&pool)).unwrap();
        let c = out.set_counts().unwrap();
        assert_eq!((c.all, c.compilable, c.useless, c.viable), (2, 2, 0, 2));
    }

    #[test]
    fn unclassified_pool_errors_on_counts() {
        let mut pool = MutationPool::new("p", "g");
        pool.records.push(rec("m1", 1, "x = 1;", "x = 2;"));
        assert!(matches!(pool.set_counts(), Err(ModelError::Unclassified(_))));
    }

    #[test]
    fn unknown_id_in_compile_results_is_integrity_error() {
        let pool = MutationPool::new("p", "g");
        let results: BTreeMap<_, _> = [("ghost".to_string(), CompileOutcome::Ok)].into();
        assert!(matches!(classify(&pool, &results), Err(ModelError::Integrity(_))));
    }

    #[test]
    fn missing_compile_result_for_nonduplicate_is_an_error() {
        let mut pool = MutationPool::new("p", "g");
        pool.records.push(rec("m1", 1, "x = 1;", "x = 2;"));
        assert!(matches!(classify(&pool, &BTreeMap::new()), Err(ModelError::Integrity(_))));
    }

    #[test]
    fn classification_is_idempotent() {
        let (pool, results) = fixture_pool();
        let once = classify(&pool, &results).unwrap();
        let twice = classify(&once, &results).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn equivalent_label_survives_reclassification() {
        let mut pool = MutationPool::new("p", "g");
        let mut r = rec("m1", 1, "x = 1;", "x = 2;");
        r.status = Some(MutantStatus::EquivalentLabeled);
        pool.records.push(r);
        let results: BTreeMap<_, _> = [("m1".to_string(), CompileOutcome::Ok)].into();
        let out = classify(&pool, &results).unwrap();
        assert_eq!(out.records[0].status, Some(MutantStatus::EquivalentLabeled));
        let counts = out.set_counts().unwrap();
        assert_eq!(counts.viable, 1);
    }

    #[test]
    fn pool_json_round_trip() {
        let (pool, results) = fixture_pool();
        let out = classify(&pool, &results).unwrap();
        let json = out.to_json().unwrap();
        let back = MutationPool::from_json(&json).unwrap();
        assert_eq!(out, back);
    }

    #[test]
    fn killing_tests_respect_baseline() {
        let matrix = KillMatrix {
            mutant_ids: vec!["m1".into(), "m2".into()],
            test_ids: vec!["t1".into(), "t2".into(), "t3".into()],
            baseline: [
                ("t1".to_string(), Verdict::Pass),
                ("t2".to_string(), Verdict::Fail),
                ("t3".to_string(), Verdict::Pass),
            ]
            .into(),
            rows: vec![
                vec![
                    Cell::Verdict(Verdict::Fail),
                    Cell::Verdict(Verdict::Fail),
                    Cell::Verdict(Verdict::Timeout),
                ],
                vec![Cell::Verdict(Verdict::Pass), Cell::Verdict(Verdict::Fail), Cell::NotRun],
            ],
        };
        // t2 fails on the baseline, so it never kills.
        assert_eq!(
            matrix.killing_tests("m1"),
            ["t1".to_string(), "t3".to_string()].into_iter().collect()
        );
        assert!(matrix.killing_tests("m2").is_empty());
        assert_eq!(matrix.mutation_score().unwrap(), 0.5);
    }

    #[test]
    fn empty_matrix_score_errors() {
        let matrix = KillMatrix {
            mutant_ids: vec![],
            test_ids: vec![],
            baseline: BTreeMap::new(),
            rows: vec![],
        };
        assert!(matches!(matrix.mutation_score(), Err(ModelError::EmptyMatrix)));
    }
}
