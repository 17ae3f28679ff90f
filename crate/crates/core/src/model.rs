//! Two-machine makespan scheduling: instances, assignments and search states.
//!
//! Job `i` with `bits[i] == false` runs on machine M1, otherwise on M2.
//! Loads are exact `u64` values and every update is overflow-checked.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Processing times `p_i` together with the bounds `L <= p_i <= U`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct Instance {
    sizes: Vec<u64>,
    lower: u64,
    upper: u64,
    total: u64,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    n: usize,
    #[serde(rename = "L")]
    lower: u64,
    #[serde(rename = "U")]
    upper: u64,
    sizes: Vec<u64>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        if raw.n != raw.sizes.len() {
            return Err(Error::InvalidInstance(format!(
                "n = {} but {} sizes given",
                raw.n,
                raw.sizes.len()
            )));
        }
        Instance::new(raw.sizes, raw.lower, raw.upper)
    }
}

impl From<Instance> for RawInstance {
    fn from(inst: Instance) -> Self {
        RawInstance {
            n: inst.sizes.len(),
            lower: inst.lower,
            upper: inst.upper,
            sizes: inst.sizes,
        }
    }
}

impl Instance {
    pub fn new(sizes: Vec<u64>, lower: u64, upper: u64) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidInstance("at least one job is required".into()));
        }
        if lower == 0 || lower > upper {
            return Err(Error::InvalidInstance(format!(
                "bounds must satisfy 1 <= L <= U, got L = {lower}, U = {upper}"
            )));
        }
        (sizes.len() as u64)
            .checked_mul(upper)
            .ok_or(Error::Overflow("n * U"))?;
        if let Some((i, &p)) = sizes
            .iter()
            .enumerate()
            .find(|(_, &p)| p < lower || p > upper)
        {
            return Err(Error::InvalidInstance(format!(
                "size of job {i} is {p}, outside [{lower}, {upper}]"
            )));
        }
        let total = sizes.iter().sum();
        Ok(Self {
            sizes,
            lower,
            upper,
            total,
        })
    }

    /// Instance for the random model: sizes in `[1, n]`.
    pub fn random_model(sizes: Vec<u64>) -> Result<Self> {
        let n = sizes.len() as u64;
        Self::new(sizes, 1, n.max(1))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInstance(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialises")
    }

    pub fn n(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn size(&self, job: usize) -> u64 {
        self.sizes[job]
    }

    pub fn lower(&self) -> u64 {
        self.lower
    }

    pub fn upper(&self) -> u64 {
        self.upper
    }

    /// Total load `P`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// `R = U / L`.
    pub fn ratio(&self) -> f64 {
        self.upper as f64 / self.lower as f64
    }

    /// Replaces the size of `job`, keeping `P` in sync. Returns the old size.
    pub(crate) fn set_size(&mut self, job: usize, size: u64) -> Result<u64> {
        let n = self.n();
        if job >= n {
            return Err(Error::IndexOutOfRange { index: job, n });
        }
        if size < self.lower || size > self.upper {
            return Err(Error::OutOfRange {
                value: size as f64,
                lo: self.lower as f64,
                hi: self.upper as f64,
            });
        }
        let old = std::mem::replace(&mut self.sizes[job], size);
        self.total = (self.total - old)
            .checked_add(size)
            .ok_or(Error::Overflow("total load"))?;
        Ok(old)
    }
}

/// A bit vector `x` assigning every job to a machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawAssignment", into = "RawAssignment")]
pub struct Assignment {
    bits: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct RawAssignment {
    bits: String,
}

impl TryFrom<RawAssignment> for Assignment {
    type Error = Error;

    fn try_from(raw: RawAssignment) -> Result<Self> {
        raw.bits.parse()
    }
}

impl From<Assignment> for RawAssignment {
    fn from(a: Assignment) -> Self {
        RawAssignment { bits: a.to_string() }
    }
}

impl std::str::FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidAssignment(format!(
                    "unexpected character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Assignment::from_bits)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Assignment {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// All jobs on M1.
    pub fn all_on_first(n: usize) -> Self {
        Self {
            bits: vec![false; n],
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidAssignment(e.to_string()))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn machine_of(&self, job: usize) -> Machine {
        if self.bits[job] {
            Machine::M2
        } else {
            Machine::M1
        }
    }

    /// Bitwise complement, i.e. the same schedule with machine labels swapped.
    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Machine {
    M1,
    M2,
}

impl Machine {
    pub fn other(self) -> Self {
        match self {
            Machine::M1 => Machine::M2,
            Machine::M2 => Machine::M1,
        }
    }
}

/// Result of comparing the two loads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fuller {
    M1,
    M2,
    Tie,
}

impl Fuller {
    /// The machine treated as fuller; a tie resolves to M1.
    pub fn machine(self) -> Machine {
        match self {
            Fuller::M2 => Machine::M2,
            Fuller::M1 | Fuller::Tie => Machine::M1,
        }
    }
}

/// An instance with an assignment and cached machine loads.
///
/// `load1 + load2 == P` always holds and both loads always equal a full
/// recomputation from the assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchState {
    instance: Instance,
    assignment: Assignment,
    load1: u64,
    load2: u64,
    on_second: usize,
}

impl SearchState {
    pub fn new(instance: Instance, assignment: Assignment) -> Result<Self> {
        if assignment.len() != instance.n() {
            return Err(Error::LengthMismatch {
                expected: instance.n(),
                got: assignment.len(),
            });
        }
        let (load1, load2) = recompute_loads(&instance, &assignment);
        let on_second = assignment.bits.iter().filter(|&&b| b).count();
        Ok(Self {
            instance,
            assignment,
            load1,
            load2,
            on_second,
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn n(&self) -> usize {
        self.instance.n()
    }

    pub fn loads(&self) -> (u64, u64) {
        (self.load1, self.load2)
    }

    /// `f(x) = max(|M1|, |M2|)`.
    #[inline]
    pub fn makespan(&self) -> u64 {
        self.load1.max(self.load2)
    }

    /// `d(x) = ||M1| - |M2||`.
    #[inline]
    pub fn discrepancy(&self) -> u64 {
        self.load1.abs_diff(self.load2)
    }

    pub fn fuller_machine(&self) -> Fuller {
        match self.load1.cmp(&self.load2) {
            std::cmp::Ordering::Greater => Fuller::M1,
            std::cmp::Ordering::Less => Fuller::M2,
            std::cmp::Ordering::Equal => Fuller::Tie,
        }
    }

    pub fn jobs_on(&self, machine: Machine) -> usize {
        match machine {
            Machine::M1 => self.n() - self.on_second,
            Machine::M2 => self.on_second,
        }
    }

    /// Number of jobs on the fuller machine; on a tie, the count on M1.
    pub fn jobs_on_fuller(&self) -> usize {
        self.jobs_on(self.fuller_machine().machine())
    }

    /// Indices of the jobs currently on `machine`.
    pub fn jobs_of(&self, machine: Machine) -> impl Iterator<Item = usize> + '_ {
        let want = machine == Machine::M2;
        self.assignment
            .bits
            .iter()
            .enumerate()
            .filter(move |(_, &b)| b == want)
            .map(|(i, _)| i)
    }

    /// Loads that would result from toggling every job in `flips`, without
    /// touching the state.
    pub fn loads_after_flips(&self, flips: &[usize]) -> Result<(u64, u64)> {
        let n = self.n();
        let (mut l1, mut l2) = (self.load1, self.load2);
        for (k, &i) in flips.iter().enumerate() {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            let p = self.instance.sizes[i];
            // a repeated index moves the job back
            let repeats = flips[..k].iter().filter(|&&j| j == i).count();
            let on_second = self.assignment.bits[i] ^ (repeats % 2 == 1);
            let (from, to) = if on_second {
                (&mut l2, &mut l1)
            } else {
                (&mut l1, &mut l2)
            };
            *from = from.checked_sub(p).ok_or(Error::Overflow("load delta"))?;
            *to = to.checked_add(p).ok_or(Error::Overflow("load delta"))?;
        }
        Ok((l1, l2))
    }

    /// Toggles every listed job and delta-updates the loads.
    ///
    /// Indices are validated before anything is modified. A repeated index
    /// toggles the job once per occurrence.
    pub fn apply_flips(&mut self, flips: &[usize]) -> Result<()> {
        let (l1, l2) = self.loads_after_flips(flips)?;
        for &i in flips {
            let b = &mut self.assignment.bits[i];
            *b = !*b;
            if *b {
                self.on_second += 1;
            } else {
                self.on_second -= 1;
            }
        }
        self.load1 = l1;
        self.load2 = l2;
        Ok(())
    }

    /// Sets the size of `job` and updates the cached loads. Returns the old size.
    pub fn set_size(&mut self, job: usize, size: u64) -> Result<u64> {
        let old = self.instance.set_size(job, size)?;
        let load = if self.assignment.bits[job] {
            &mut self.load2
        } else {
            &mut self.load1
        };
        *load = (*load - old)
            .checked_add(size)
            .ok_or(Error::Overflow("load after size change"))?;
        Ok(old)
    }

    /// Checks the cached loads against a full recomputation.
    pub fn is_consistent(&self) -> bool {
        let (l1, l2) = recompute_loads(&self.instance, &self.assignment);
        l1 == self.load1
            && l2 == self.load2
            && l1 + l2 == self.instance.total()
            && self.on_second == self.assignment.bits.iter().filter(|&&b| b).count()
    }

    pub fn into_parts(self) -> (Instance, Assignment) {
        (self.instance, self.assignment)
    }
}

fn recompute_loads(instance: &Instance, assignment: &Assignment) -> (u64, u64) {
    instance
        .sizes
        .iter()
        .zip(&assignment.bits)
        .fold((0, 0), |(l1, l2), (&p, &b)| if b { (l1, l2 + p) } else { (l1 + p, l2) })
}

/// Lower bound `⌈(n/2) · L/U⌉` on the number of jobs on the fuller machine.
pub fn min_fuller_bound(n: usize, upper: u64, lower: u64) -> u64 {
    assert!(n >= 1 && lower >= 1 && upper >= lower, "need n >= 1 and U >= L >= 1");
    let num = n as u128 * lower as u128;
    let den = 2 * upper as u128;
    num.div_ceil(den) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(sizes: &[u64], bits: &str) -> SearchState {
        let lo = *sizes.iter().min().unwrap();
        let hi = *sizes.iter().max().unwrap();
        let inst = Instance::new(sizes.to_vec(), lo, hi).unwrap();
        SearchState::new(inst, bits.parse().unwrap()).unwrap()
    }

    #[test]
    fn makespan_examples() {
        assert_eq!(state(&[3, 5], "01").makespan(), 5);
        assert_eq!(state(&[1, 2, 3], "000").makespan(), 6);
        assert_eq!(state(&[4, 3, 3], "100").makespan(), 6);
    }

    #[test]
    fn discrepancy_examples() {
        assert_eq!(state(&[3, 5], "01").discrepancy(), 2);
        assert_eq!(state(&[1, 2, 3], "000").discrepancy(), 6);
        assert_eq!(state(&[1, 2, 3, 4, 10], "00001").discrepancy(), 0);
    }

    #[test]
    fn fuller_machine_examples() {
        assert_eq!(state(&[4, 3, 3], "011").fuller_machine(), Fuller::M2);
        assert_eq!(state(&[6, 4], "01").fuller_machine(), Fuller::M1);
        assert_eq!(state(&[4, 6], "01").fuller_machine(), Fuller::M2);
        assert_eq!(state(&[5, 5], "01").fuller_machine(), Fuller::Tie);
    }

    #[test]
    fn jobs_on_fuller_examples() {
        assert_eq!(state(&[4, 3, 3], "100").jobs_on_fuller(), 2);
        assert_eq!(state(&[1, 2, 3], "000").jobs_on_fuller(), 3);
        // tie counts M1
        assert_eq!(state(&[5, 5], "01").jobs_on_fuller(), 1);
        assert_eq!(state(&[5, 5, 1, 1], "0011").jobs_on_fuller(), 2);
    }

    #[test]
    fn min_fuller_bound_examples() {
        assert_eq!(min_fuller_bound(10, 2, 1), 3);
        assert_eq!(min_fuller_bound(8, 1, 1), 4);
        assert_eq!(min_fuller_bound(100, 50, 1), 1);
        assert_eq!(min_fuller_bound(100, 100, 2), 1);
        assert_eq!(min_fuller_bound(1, 1000, 1), 1);
    }

    #[test]
    fn apply_flips_examples() {
        let mut s = state(&[4, 3, 3], "000");
        s.apply_flips(&[0]).unwrap();
        assert_eq!(s.assignment().to_string(), "100");
        assert_eq!(s.loads(), (6, 4));

        let before = s.clone();
        s.apply_flips(&[]).unwrap();
        assert_eq!(s, before);

        s.apply_flips(&[0, 1, 2]).unwrap();
        s.apply_flips(&[0, 1, 2]).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn apply_flips_rejects_out_of_range_without_mutating() {
        let mut s = state(&[4, 3, 3], "000");
        let before = s.clone();
        assert_eq!(
            s.apply_flips(&[0, 3]),
            Err(Error::IndexOutOfRange { index: 3, n: 3 })
        );
        assert_eq!(s, before);
    }

    #[test]
    fn set_size_updates_loads() {
        let mut s = state(&[4, 3, 3], "011");
        assert_eq!(s.set_size(1, 4).unwrap(), 3);
        assert_eq!(s.loads(), (4, 7));
        assert!(s.is_consistent());
        assert!(s.set_size(1, 5).is_err());
        assert!(s.set_size(0, 2).is_err());
        assert!(s.is_consistent());
    }

    #[test]
    fn instance_validation() {
        assert!(Instance::new(vec![], 1, 2).is_err());
        assert!(Instance::new(vec![1], 0, 2).is_err());
        assert!(Instance::new(vec![3], 1, 2).is_err());
        assert!(Instance::new(vec![2], 3, 2).is_err());
        assert!(Instance::new(vec![u64::MAX, u64::MAX], 1, u64::MAX).is_err());
        assert!(Instance::new(vec![2, 1], 1, 2).is_ok());
    }

    #[test]
    fn length_mismatch() {
        let inst = Instance::new(vec![1, 2], 1, 2).unwrap();
        assert_eq!(
            SearchState::new(inst, "0".parse().unwrap()),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn json_formats() {
        let inst = Instance::from_json(r#"{"n":3,"L":1,"U":7,"sizes":[3,5,7]}"#).unwrap();
        assert_eq!(inst.sizes(), &[3, 5, 7]);
        assert_eq!(inst.total(), 15);
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
        assert!(Instance::from_json(r#"{"n":2,"L":1,"U":7,"sizes":[3,5,7]}"#).is_err());
        assert!(Instance::from_json(r#"{"n":1,"L":4,"U":7,"sizes":[3]}"#).is_err());

        let a = Assignment::from_json(r#"{"bits":"0101"}"#).unwrap();
        assert_eq!(a.bits(), &[false, true, false, true]);
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"{"bits":"0101"}"#);
        assert!(Assignment::from_json(r#"{"bits":"01x"}"#).is_err());
    }
}
