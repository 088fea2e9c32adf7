use serde::Serialize;

/// One named check with its verdict, the worst deviation observed and a
/// free-form witness or note.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub detail: String,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Self { name: name.into(), passed: true, residual: 0.0, detail: String::new() }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: false, residual: 0.0, detail: detail.into() }
    }

    pub fn with_residual(mut self, residual: f64) -> Self {
        self.residual = residual;
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Ordered list of named checks; the overall verdict is their conjunction.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConditionReport {
    pub checks: Vec<Check>,
}

impl ConditionReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: ConditionReport) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().fold(0.0, |acc, c| acc.max(c.residual))
    }
}

/// Running maximum of scaled deviations plus the first location that broke
/// the tolerance.
pub(crate) struct Tracker {
    pub tol: f64,
    pub worst: f64,
    pub first_failure: Option<String>,
}

impl Tracker {
    pub fn new(tol: f64) -> Self {
        Self { tol, worst: 0.0, first_failure: None }
    }

    pub fn observe(&mut self, deviation: f64, witness: impl FnOnce() -> String) {
        if deviation > self.worst || deviation.is_nan() {
            self.worst = if deviation.is_nan() { f64::INFINITY } else { deviation };
        }
        if (deviation > self.tol || deviation.is_nan()) && self.first_failure.is_none() {
            self.first_failure = Some(witness());
        }
    }

    pub fn fail(&mut self, witness: impl FnOnce() -> String) {
        self.worst = f64::INFINITY;
        if self.first_failure.is_none() {
            self.first_failure = Some(witness());
        }
    }

    pub fn into_check(self, name: &str) -> Check {
        match self.first_failure {
            None => Check::pass(name).with_residual(self.worst),
            Some(w) => Check::fail(name, w).with_residual(self.worst),
        }
    }
}
