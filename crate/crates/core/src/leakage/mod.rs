//! The quantization attack on nearest-candidate identification modules and
//! its two counter-measures.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LeakageError {
    #[error("database needs at least one row of at least one bit")]
    EmptyDatabase,
    #[error("candidate count {c} outside 1..={n}")]
    CandidatesOutOfRange { c: usize, n: usize },
    #[error("query has {got} bits, rows have {want}")]
    QueryLength { got: usize, want: usize },
    #[error("{0} must be at least 1")]
    Zero(&'static str),
}

/// `N` stored `Q`-bit quantizations. Row `r` is reported under the label
/// `perm[r]` (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantDB {
    rows: Vec<Vec<bool>>,
    perm: Vec<usize>,
}

impl QuantDB {
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self, LeakageError> {
        let q = rows.first().map_or(0, Vec::len);
        if q == 0 || rows.iter().any(|r| r.len() != q) {
            return Err(LeakageError::EmptyDatabase);
        }
        let perm = (1..=rows.len()).collect();
        Ok(QuantDB { rows, perm })
    }

    /// Uniformly random rows, identity labelling.
    pub fn random(n: usize, q: usize, rng: &mut impl Rng) -> Result<Self, LeakageError> {
        if n == 0 || q == 0 {
            return Err(LeakageError::EmptyDatabase);
        }
        QuantDB::new((0..n).map(|_| (0..q).map(|_| rng.gen()).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn q(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn label(&self, row: usize) -> usize {
        self.perm[row]
    }

    /// Draws a fresh labelling.
    pub fn permute(&mut self, rng: &mut impl Rng) {
        self.perm.shuffle(rng);
    }
}

fn hamming(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Labels of the `c` rows nearest to `query`, ties to the lower row, sorted.
pub fn module_answer(db: &QuantDB, query: &[bool], c: usize) -> Result<Vec<usize>, LeakageError> {
    if c == 0 || c > db.n() {
        return Err(LeakageError::CandidatesOutOfRange { c, n: db.n() });
    }
    if query.len() != db.q() {
        return Err(LeakageError::QueryLength {
            got: query.len(),
            want: db.q(),
        });
    }
    let mut order: Vec<usize> = (0..db.n()).collect();
    order.sort_by_key(|&r| (hamming(&db.rows[r], query), r));
    let mut out: Vec<usize> = order[..c].iter().map(|&r| db.label(r)).collect();
    out.sort_unstable();
    Ok(out)
}

/// Which counter rows a query updates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UpdateRule {
    /// Only the rows named in the answer.
    #[default]
    SelectedRows,
    /// Every row, whatever the answer.
    AllRows,
}

/// `N x Q` counters indexed by label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterTable {
    cells: Vec<Vec<i64>>,
}

impl CounterTable {
    pub fn new(n: usize, q: usize) -> Self {
        CounterTable {
            cells: vec![vec![0; q]; n],
        }
    }

    pub fn get(&self, label: usize, bit: usize) -> i64 {
        self.cells[label - 1][bit]
    }

    fn update(&mut self, label: usize, query: &[bool]) {
        for (cell, &b) in self.cells[label - 1].iter_mut().zip(query) {
            *cell += if b { 1 } else { -1 };
        }
    }

    /// Sign of each counter; zero guesses 1.
    pub fn guess(&self) -> Vec<Vec<bool>> {
        self.cells.iter().map(|row| row.iter().map(|&v| v >= 0).collect()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackResult {
    /// Guessed bits per label.
    pub guessed: Vec<Vec<bool>>,
    pub queries_used: u64,
    pub bit_accuracy: f64,
}

/// Fraction of bits where the guess for each row's current label matches the row.
fn accuracy(db: &QuantDB, guessed: &[Vec<bool>]) -> f64 {
    let total = db.n() * db.q();
    let hits: usize = (0..db.n())
        .map(|r| db.q() - hamming(&db.rows[r], &guessed[db.label(r) - 1]))
        .sum();
    hits as f64 / total as f64
}

fn random_query(q: usize, rng: &mut impl Rng) -> Vec<bool> {
    (0..q).map(|_| rng.gen()).collect()
}

fn run(
    db: &QuantDB,
    c: usize,
    epoch_len: Option<u64>,
    queries: u64,
    seed: u64,
    rule: UpdateRule,
) -> Result<AttackResult, LeakageError> {
    if c == 0 || c > db.n() {
        return Err(LeakageError::CandidatesOutOfRange { c, n: db.n() });
    }
    let mut db = db.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = CounterTable::new(db.n(), db.q());
    for k in 0..queries {
        if let Some(b) = epoch_len {
            if k > 0 && k % b == 0 {
                db.permute(&mut rng);
            }
        }
        let query = random_query(db.q(), &mut rng);
        let ind = module_answer(&db, &query, c)?;
        match rule {
            UpdateRule::SelectedRows => ind.iter().for_each(|&l| table.update(l, &query)),
            UpdateRule::AllRows => (1..=db.n()).for_each(|l| table.update(l, &query)),
        }
    }
    let guessed = table.guess();
    Ok(AttackResult {
        bit_accuracy: accuracy(&db, &guessed),
        guessed,
        queries_used: queries,
    })
}

/// Uniform random queries against a fixed labelling.
pub fn counter_attack(db: &QuantDB, c: usize, budget: u64, seed: u64) -> Result<AttackResult, LeakageError> {
    counter_attack_with(db, c, budget, seed, UpdateRule::SelectedRows)
}

pub fn counter_attack_with(
    db: &QuantDB,
    c: usize,
    budget: u64,
    seed: u64,
    rule: UpdateRule,
) -> Result<AttackResult, LeakageError> {
    if budget == 0 {
        return Err(LeakageError::Zero("query budget"));
    }
    run(db, c, None, budget, seed, rule)
}

/// The labelling is redrawn after every `b` queries; `epochs * b` queries in all.
pub fn counter_attack_with_reset(
    db: &QuantDB,
    c: usize,
    b: u64,
    epochs: u64,
    seed: u64,
) -> Result<AttackResult, LeakageError> {
    if b == 0 {
        return Err(LeakageError::Zero("epoch length"));
    }
    run(db, c, Some(b), b * epochs, seed, UpdateRule::SelectedRows)
}

/// One experiment row.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub seed: u64,
    pub n: usize,
    pub q: usize,
    pub c: usize,
    /// Epoch length, if the labelling is redrawn.
    pub b: Option<u64>,
    pub budget: u64,
    pub accuracy: f64,
}

impl ExperimentRow {
    pub const HEADER: &'static str = "seed,N,Q,C,B,budget,accuracy";
}

impl fmt::Display for ExperimentRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.b.map_or_else(|| "-".to_owned(), |b| b.to_string());
        write!(f, "{},{},{},{},{},{},{:.4}", self.seed, self.n, self.q, self.c, b, self.budget, self.accuracy)
    }
}

/// Experiment parameters; `b = None` is the unprotected module.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Experiment {
    pub n: usize,
    pub q: usize,
    pub c: usize,
    pub budget: u64,
    pub b: Option<u64>,
}

impl Experiment {
    /// Runs with a database drawn from `seed` and queries from `seed + 1`.
    /// With `b` set, `budget` counts queries and is rounded up to whole epochs.
    pub fn run(&self, seed: u64) -> Result<ExperimentRow, LeakageError> {
        if self.n == 0 || self.q == 0 {
            return Err(LeakageError::EmptyDatabase);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let db = QuantDB::random(self.n, self.q, &mut rng)?;
        let qseed = seed.wrapping_add(1);
        let r = match self.b {
            None => counter_attack(&db, self.c, self.budget, qseed)?,
            Some(b) => counter_attack_with_reset(&db, self.c, b, self.budget.div_ceil(b.max(1)), qseed)?,
        };
        Ok(ExperimentRow {
            seed,
            n: self.n,
            q: self.q,
            c: self.c,
            b: self.b,
            budget: r.queries_used,
            accuracy: r.bit_accuracy,
        })
    }

    /// Median accuracy over seeds `0..seeds`.
    pub fn median_accuracy(&self, seeds: u64) -> Result<f64, LeakageError> {
        let mut accs = (0..seeds).map(|s| self.run(s).map(|r| r.accuracy)).collect::<Result<Vec<_>, _>>()?;
        if accs.is_empty() {
            return Ok(0.0);
        }
        accs.sort_by(f64::total_cmp);
        let m = accs.len();
        Ok(if m % 2 == 1 {
            accs[m / 2]
        } else {
            (accs[m / 2 - 1] + accs[m / 2]) / 2.0
        })
    }
}

/// First budget of the doubling ladder `start, 2*start, ...` (at most `max`)
/// whose median accuracy over `seeds` seeds reaches `target`.
pub fn budget_for_accuracy(
    base: Experiment,
    target: f64,
    seeds: u64,
    start: u64,
    max: u64,
) -> Result<Option<(u64, f64)>, LeakageError> {
    let mut budget = start.max(1);
    while budget <= max {
        let acc = Experiment { budget, ..base }.median_accuracy(seeds)?;
        if acc >= target {
            return Ok(Some((budget, acc)));
        }
        budget *= 2;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn nearest_row_is_returned() {
        let db = QuantDB::new(vec![bits("0000"), bits("1111")]).unwrap();
        assert_eq!(module_answer(&db, &bits("0001"), 1).unwrap(), vec![1]);
        assert_eq!(module_answer(&db, &bits("0001"), 2).unwrap(), vec![1, 2]);
        assert!(module_answer(&db, &bits("0001"), 3).is_err());
        assert!(module_answer(&db, &bits("01"), 1).is_err());
    }

    #[test]
    fn ties_go_to_the_lower_row() {
        let db = QuantDB::new(vec![bits("01"), bits("10")]).unwrap();
        assert_eq!(module_answer(&db, &bits("00"), 1).unwrap(), vec![1]);
    }

    #[test]
    fn zero_counters_guess_one() {
        let t = CounterTable::new(2, 3);
        assert!(t.guess().iter().flatten().all(|&b| b));
    }

    #[test]
    fn attack_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let db = QuantDB::random(8, 16, &mut rng).unwrap();
        assert_eq!(counter_attack(&db, 2, 500, 9).unwrap(), counter_attack(&db, 2, 500, 9).unwrap());
    }

    #[test]
    fn one_long_epoch_matches_the_unprotected_attack() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let db = QuantDB::random(8, 16, &mut rng).unwrap();
        let plain = counter_attack(&db, 2, 400, 1).unwrap();
        let reset = counter_attack_with_reset(&db, 2, 400, 1, 1).unwrap();
        assert_eq!(plain, reset);
    }

    #[test]
    fn zero_epochs_is_the_all_ones_baseline() {
        let db = QuantDB::new(vec![bits("1100"), bits("1000")]).unwrap();
        let r = counter_attack_with_reset(&db, 1, 4, 0, 0).unwrap();
        assert_eq!(r.queries_used, 0);
        assert_eq!(r.bit_accuracy, 3.0 / 8.0);
    }
}
