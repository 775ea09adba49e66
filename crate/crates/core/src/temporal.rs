//! Chronological periods, representative periods and their weights.
//!
//! Periods `p`, representative periods `rp` and sub-periods `k` are all
//! 1-based. Every chronological period maps to exactly one `(rp, k)` pair and
//! all representative periods share the same set of sub-periods.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::table::Table;

/// Relative tolerance used when weights are not all integral.
pub const WEIGHT_RTOL: f64 = 1e-9;

/// Target sums for the representative-period weight identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightTargets {
    /// Target of `sum_rp w_rp` (days in a year for daily representative periods).
    pub rp_sum: f64,
    /// Target of `sum_{rp,k} w_rp * w_k` (hours in a year).
    pub hour_sum: f64,
}

impl WeightTargets {
    pub const ANNUAL: WeightTargets = WeightTargets {
        rp_sum: 365.0,
        hour_sum: 8760.0,
    };

    /// Targets for a shortened year of `days` days with hourly sub-periods.
    pub fn days(days: f64) -> Self {
        WeightTargets {
            rp_sum: days,
            hour_sum: 24.0 * days,
        }
    }
}

impl Default for WeightTargets {
    fn default() -> Self {
        Self::ANNUAL
    }
}

/// One entry of a moving-window membership list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct WindowMember {
    pub rp: usize,
    pub k: usize,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalStructure {
    gamma: Vec<(usize, usize)>,
    w_rp: Vec<f64>,
    w_k: Vec<f64>,
    mow: usize,
}

impl TemporalStructure {
    /// One representative period holding every chronological period once.
    pub fn full_chronology(n_periods: usize) -> Result<Self> {
        if n_periods == 0 {
            return Err(Error::InvalidArgument("a chronology needs at least one period".into()));
        }
        Ok(TemporalStructure {
            gamma: (1..=n_periods).map(|p| (1, p)).collect(),
            w_rp: vec![1.0],
            w_k: vec![1.0; n_periods],
            mow: n_periods,
        })
    }

    /// Builds and validates a representative-period structure.
    ///
    /// `mapping` lists `(p, rp, k)` triples, `w_rp` and `w_k` list weights by
    /// identifier. Identifiers must be contiguous from 1.
    pub fn representative(
        mapping: &[(usize, usize, usize)],
        w_rp: &[(usize, f64)],
        w_k: &[(usize, f64)],
        targets: WeightTargets,
    ) -> Result<Self> {
        let w_rp = dense_weights("representative period", w_rp)?;
        let w_k = dense_weights("sub-period", w_k)?;
        let n_periods = mapping.iter().map(|m| m.0).max().unwrap_or(0);
        if n_periods == 0 {
            return Err(Error::InvalidArgument("empty period mapping".into()));
        }
        let mut gamma = vec![None; n_periods];
        for &(p, rp, k) in mapping {
            if p == 0 {
                return Err(Error::InvalidArgument("periods are numbered from 1".into()));
            }
            if rp == 0 || rp > w_rp.len() {
                return Err(Error::InvalidArgument(format!("period {p} maps to unknown rp {rp}")));
            }
            if k == 0 || k > w_k.len() {
                return Err(Error::InvalidArgument(format!("period {p} maps to unknown k {k}")));
            }
            if gamma[p - 1].replace((rp, k)).is_some() {
                return Err(Error::InvalidArgument(format!("period {p} is mapped twice")));
            }
        }
        let gamma = gamma
            .into_iter()
            .enumerate()
            .map(|(i, g)| g.ok_or(Error::IncompleteMapping(i + 1)))
            .collect::<Result<Vec<_>>>()?;

        // A single unit-weighted period spanning the horizon is a chronology
        // and is exempt from the annual identities.
        let chronology = w_rp == [1.0] && w_k.iter().all(|&w| w == 1.0) && w_k.len() == n_periods;
        if !chronology {
            check_sum("sum of w_rp", w_rp.iter().copied(), targets.rp_sum)?;
            let hours = w_rp.iter().flat_map(|&a| w_k.iter().map(move |&b| a * b));
            check_sum("sum of w_rp * w_k", hours, targets.hour_sum)?;
        }

        let mow = w_k.len();
        let ts = TemporalStructure { gamma, w_rp, w_k, mow };
        ts.with_mow(mow)
    }

    /// Replaces the moving-window length. The number of periods must be a
    /// multiple of it.
    pub fn with_mow(mut self, mow: usize) -> Result<Self> {
        if mow == 0 {
            return Err(Error::InvalidArgument(
                "moving window must be at least one period".into(),
            ));
        }
        if !self.n_periods().is_multiple_of(mow) {
            return Err(Error::InvalidArgument(format!(
                "moving window {mow} leaves a partial final window over {} periods",
                self.n_periods()
            )));
        }
        self.mow = mow;
        Ok(self)
    }

    /// Reads `gamma.csv` (p,rp,k), `rp_weights.csv` (rp,w_rp) and
    /// `k_weights.csv` (k,w_k) from `dir`.
    pub fn read_dir(dir: &Path, targets: WeightTargets) -> Result<Self> {
        let read = |name: &str, cols: &[&str]| -> Result<Table> {
            Table::read(&dir.join(name), cols, cols)?.ok_or_else(|| Error::schema(name, None, "file not found"))
        };
        let gamma_t = read("gamma.csv", &["p", "rp", "k"])?;
        let mut mapping = Vec::new();
        for row in gamma_t.rows() {
            mapping.push((row.usize("p")?, row.usize("rp")?, row.usize("k")?));
        }
        let rp_t = read("rp_weights.csv", &["rp", "w_rp"])?;
        let mut w_rp = Vec::new();
        for row in rp_t.rows() {
            w_rp.push((row.usize("rp")?, row.f64("w_rp")?));
        }
        let k_t = read("k_weights.csv", &["k", "w_k"])?;
        let mut w_k = Vec::new();
        for row in k_t.rows() {
            w_k.push((row.usize("k")?, row.f64("w_k")?));
        }
        Self::representative(&mapping, &w_rp, &w_k, targets)
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        use crate::table::{fmt_f64, write_csv};
        let gamma: Vec<_> = self
            .gamma
            .iter()
            .enumerate()
            .map(|(i, (rp, k))| vec![(i + 1).to_string(), rp.to_string(), k.to_string()])
            .collect();
        write_csv(&dir.join("gamma.csv"), &["p", "rp", "k"], &gamma)?;
        let rp: Vec<_> = self
            .w_rp
            .iter()
            .enumerate()
            .map(|(i, w)| vec![(i + 1).to_string(), fmt_f64(*w)])
            .collect();
        write_csv(&dir.join("rp_weights.csv"), &["rp", "w_rp"], &rp)?;
        let k: Vec<_> = self
            .w_k
            .iter()
            .enumerate()
            .map(|(i, w)| vec![(i + 1).to_string(), fmt_f64(*w)])
            .collect();
        write_csv(&dir.join("k_weights.csv"), &["k", "w_k"], &k)
    }

    pub fn n_periods(&self) -> usize {
        self.gamma.len()
    }

    pub fn n_rp(&self) -> usize {
        self.w_rp.len()
    }

    pub fn n_k(&self) -> usize {
        self.w_k.len()
    }

    pub fn mow(&self) -> usize {
        self.mow
    }

    pub fn w_rp(&self, rp: usize) -> f64 {
        self.w_rp[rp - 1]
    }

    pub fn w_k(&self, k: usize) -> f64 {
        self.w_k[k - 1]
    }

    /// Combined weight `w_rp * w_k` of an operational slot.
    pub fn weight(&self, rp: usize, k: usize) -> f64 {
        self.w_rp(rp) * self.w_k(k)
    }

    /// Sum of `w_rp * w_k` over all slots.
    pub fn total_hours(&self) -> f64 {
        self.slots().map(|(rp, k)| self.weight(rp, k)).sum()
    }

    /// `Γ(p)`.
    pub fn gamma(&self, p: usize) -> (usize, usize) {
        self.gamma[p - 1]
    }

    /// Exactly one representative period of weight 1 with unit sub-periods.
    pub fn is_full_chronology(&self) -> bool {
        self.w_rp.len() == 1 && self.w_rp[0] == 1.0 && self.w_k.iter().all(|&w| w == 1.0)
    }

    /// All `(rp, k)` slots in lexicographic order.
    pub fn slots(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.n_rp()).flat_map(move |rp| (1..=self.n_k()).map(move |k| (rp, k)))
    }

    /// Sub-period preceding `k` inside its representative period.
    ///
    /// Representative periods are cyclic, so `k = 1` follows the last
    /// sub-period. In full chronology the first period has no predecessor.
    pub fn predecessor(&self, k: usize) -> Option<usize> {
        if k > 1 {
            Some(k - 1)
        } else if self.is_full_chronology() {
            None
        } else {
            Some(self.n_k())
        }
    }

    /// Periods at which inter-period constraints are imposed (`p mod MOW = 0`).
    pub fn checkpoints(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.n_periods() / self.mow).map(move |i| i * self.mow)
    }

    /// Slots that periods `(p - MOW, p]` map to, with how often each occurs.
    pub fn window_members(&self, p: usize) -> Result<Vec<WindowMember>> {
        if p == 0 || p > self.n_periods() || !p.is_multiple_of(self.mow) {
            return Err(Error::InvalidArgument(format!(
                "period {p} is not a checkpoint of a {}-period moving window",
                self.mow
            )));
        }
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for pp in (p - self.mow + 1)..=p {
            *counts.entry(self.gamma(pp)).or_default() += 1;
        }
        Ok(counts
            .into_iter()
            .map(|((rp, k), multiplicity)| WindowMember { rp, k, multiplicity })
            .collect())
    }
}

fn dense_weights(what: &str, weights: &[(usize, f64)]) -> Result<Vec<f64>> {
    let mut dense = vec![None; weights.len()];
    for &(id, w) in weights {
        if id == 0 || id > weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{what} identifiers must run from 1 to {}, got {id}",
                weights.len()
            )));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "{what} {id} has non-positive weight {w}"
            )));
        }
        if dense[id - 1].replace(w).is_some() {
            return Err(Error::InvalidArgument(format!("{what} {id} is weighted twice")));
        }
    }
    if dense.is_empty() {
        return Err(Error::InvalidArgument(format!("no {what} weights given")));
    }
    Ok(dense.into_iter().map(|w| w.unwrap()).collect())
}

const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0;

fn is_integral(v: f64) -> bool {
    v.fract() == 0.0 && v.abs() < EXACT_LIMIT
}

/// Checks a weight identity: exact integer arithmetic when every addend and
/// the target are integral, relative tolerance otherwise.
fn check_sum(what: &str, values: impl Iterator<Item = f64> + Clone, target: f64) -> Result<()> {
    let exact = is_integral(target) && values.clone().all(is_integral);
    if exact {
        let sum: i128 = values.map(|v| v as i128).sum();
        if sum != target as i128 {
            return Err(Error::InconsistentWeights(format!(
                "{what} is {sum}, expected {target}"
            )));
        }
    } else {
        let sum: f64 = values.sum();
        if (sum - target).abs() > WEIGHT_RTOL * target.abs().max(1.0) {
            return Err(Error::InconsistentWeights(format!(
                "{what} is {sum}, expected {target}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    type Weights = Vec<(usize, f64)>;

    fn rep_days(n_rp: usize, w: f64, hours: usize) -> (Weights, Weights) {
        (
            (1..=n_rp).map(|rp| (rp, w)).collect(),
            (1..=hours).map(|k| (k, 1.0)).collect(),
        )
    }

    #[test]
    fn full_chronology_year() {
        let ts = TemporalStructure::full_chronology(8760).unwrap();
        assert_eq!(ts.n_rp(), 1);
        assert_eq!(ts.w_rp(1), 1.0);
        assert!((1..=8760).all(|k| ts.w_k(k) == 1.0));
        assert!(ts.is_full_chronology());
        assert_eq!(ts.gamma(17), (1, 17));
    }

    #[test]
    fn full_chronology_single_period() {
        let ts = TemporalStructure::full_chronology(1).unwrap();
        assert_eq!(ts.n_periods(), 1);
        assert_eq!(ts.slots().count(), 1);
        assert_eq!(ts.predecessor(1), None);
    }

    #[test]
    fn full_chronology_weight_identity() {
        let ts = TemporalStructure::full_chronology(24).unwrap();
        assert_eq!(ts.total_hours(), 24.0);
    }

    #[test]
    fn zero_periods_rejected() {
        assert!(matches!(
            TemporalStructure::full_chronology(0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn five_days_of_73() {
        let (w_rp, w_k) = rep_days(5, 73.0, 24);
        let mapping: Vec<_> = (1..=8760)
            .map(|p| (p, ((p - 1) / 24) % 5 + 1, (p - 1) % 24 + 1))
            .collect();
        let ts = TemporalStructure::representative(&mapping, &w_rp, &w_k, WeightTargets::ANNUAL).unwrap();
        assert_eq!(ts.total_hours(), 8760.0);
        assert_eq!(ts.mow(), 24);
        assert!(!ts.is_full_chronology());
    }

    #[test]
    fn seven_days_summing_to_year() {
        let weights = [52.0, 52.0, 52.0, 52.0, 52.0, 52.0, 53.0];
        let w_rp: Vec<_> = weights.iter().enumerate().map(|(i, w)| (i + 1, *w)).collect();
        let w_k: Vec<_> = (1..=24).map(|k| (k, 1.0)).collect();
        let mapping: Vec<_> = (1..=8760)
            .map(|p| (p, ((p - 1) / 24) % 7 + 1, (p - 1) % 24 + 1))
            .collect();
        assert!(TemporalStructure::representative(&mapping, &w_rp, &w_k, WeightTargets::ANNUAL).is_ok());
    }

    #[test]
    fn three_hundred_days_rejected() {
        let (w_rp, w_k) = rep_days(3, 100.0, 24);
        let mapping: Vec<_> = (1..=72).map(|p| (p, (p - 1) / 24 + 1, (p - 1) % 24 + 1)).collect();
        let err = TemporalStructure::representative(&mapping, &w_rp, &w_k, WeightTargets::ANNUAL);
        assert!(matches!(err, Err(Error::InconsistentWeights(_))));
    }

    #[test]
    fn fractional_weights_use_tolerance() {
        let w_rp = vec![(1, 182.5), (2, 182.5 + 1e-8)];
        let w_k: Vec<_> = (1..=24).map(|k| (k, 1.0)).collect();
        let mapping: Vec<_> = (1..=48).map(|p| (p, (p - 1) / 24 + 1, (p - 1) % 24 + 1)).collect();
        assert!(TemporalStructure::representative(&mapping, &w_rp, &w_k, WeightTargets::ANNUAL).is_ok());
        let w_rp = vec![(1, 182.5), (2, 182.6)];
        assert!(TemporalStructure::representative(&mapping, &w_rp, &w_k, WeightTargets::ANNUAL).is_err());
    }

    #[test]
    fn uncovered_period_is_incomplete_mapping() {
        let (w_rp, w_k) = rep_days(1, 1.0, 3);
        let mapping = vec![(1, 1, 1), (3, 1, 3)];
        let err = TemporalStructure::representative(
            &mapping,
            &w_rp,
            &w_k,
            WeightTargets {
                rp_sum: 1.0,
                hour_sum: 3.0,
            },
        );
        assert!(matches!(err, Err(Error::IncompleteMapping(2))));
    }

    #[test]
    fn partial_final_window_rejected() {
        let ts = TemporalStructure::full_chronology(50).unwrap();
        assert!(ts.clone().with_mow(24).is_err());
        assert!(ts.with_mow(25).is_ok());
    }

    #[test]
    fn window_identity_mapping() {
        let ts = TemporalStructure::full_chronology(48).unwrap().with_mow(24).unwrap();
        let members = ts.window_members(24).unwrap();
        assert_eq!(members.len(), 24);
        assert!(members.iter().all(|m| m.multiplicity == 1 && m.rp == 1));
        assert!(matches!(ts.window_members(25), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn window_alternating_days() {
        // days alternate rp1, rp2 over two days of 24 hours
        let w_rp = vec![(1, 1.0), (2, 1.0)];
        let w_k: Vec<_> = (1..=24).map(|k| (k, 1.0)).collect();
        let mapping: Vec<_> = (1..=48).map(|p| (p, (p - 1) / 24 + 1, (p - 1) % 24 + 1)).collect();
        let ts = TemporalStructure::representative(&mapping, &w_rp, &w_k, WeightTargets::days(2.0))
            .unwrap()
            .with_mow(48)
            .unwrap();
        let members = ts.window_members(48).unwrap();
        // brute force count over Γ
        let mut expected = BTreeMap::new();
        for p in 1..=48 {
            *expected.entry(ts.gamma(p)).or_insert(0usize) += 1;
        }
        assert_eq!(members.len(), expected.len());
        for m in members {
            assert_eq!(expected[&(m.rp, m.k)], m.multiplicity);
        }
    }

    #[test]
    fn cyclic_predecessor_in_representative_mode() {
        let (w_rp, w_k) = rep_days(1, 2.0, 24);
        let mapping: Vec<_> = (1..=48).map(|p| (p, 1, (p - 1) % 24 + 1)).collect();
        let ts = TemporalStructure::representative(&mapping, &w_rp, &w_k, WeightTargets::days(2.0)).unwrap();
        assert_eq!(ts.predecessor(1), Some(24));
        assert_eq!(ts.predecessor(5), Some(4));
    }
}
