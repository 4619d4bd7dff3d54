use super::gate::{Gate, Polarity};
use super::QsimError;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

const NORM_TOL: f64 = 1e-12;
/// Branch probabilities below this are treated as exactly zero.
pub(crate) const PROB_CUTOFF: f64 = 1e-14;

/// Dense amplitude vector over `n_qubits` qubits, always of length
/// `2^n_qubits` and unit norm.
#[derive(Clone, Debug)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// |0...0>
    pub fn zero(n_qubits: usize) -> Self {
        Statevector::basis(n_qubits, 0).expect("index 0 always valid")
    }

    /// Computational basis state |index>.
    pub fn basis(n_qubits: usize, index: u64) -> Result<Self, QsimError> {
        let dim = 1usize << n_qubits;
        if index >= dim as u64 {
            return Err(QsimError::BasisOutOfRange { index, n_qubits });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n_qubits, amps })
    }

    /// Builds a state from raw amplitudes, which must have power-of-two
    /// length and unit norm.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(QsimError::BadStateLength { len });
        }
        let n_qubits = len.trailing_zeros() as usize;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QsimError::NotNormalized { norm });
        }
        Ok(Statevector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        self.amps[index as usize]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies a gate, returning the new state.
    pub fn apply(&self, gate: &Gate) -> Result<Statevector, QsimError> {
        let mut out = self.clone();
        out.apply_in_place(gate)?;
        Ok(out)
    }

    pub(crate) fn apply_in_place(&mut self, gate: &Gate) -> Result<(), QsimError> {
        gate.validate_for(self.n_qubits)?;
        let targets = gate.targets();
        let k = targets.len();
        let block = gate.block_matrix();
        let target_mask: u64 = targets.iter().map(|&t| 1u64 << t).sum();
        // Or-mask spreading the k block-local bits onto the target qubits.
        let spread: Vec<u64> = (0..1usize << k)
            .map(|j| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| j >> bit & 1 == 1)
                    .map(|(_, &t)| 1u64 << t)
                    .sum()
            })
            .collect();
        let dim = self.amps.len() as u64;
        let mut sub = vec![Complex64::new(0.0, 0.0); 1 << k];
        'groups: for base in 0..dim {
            if base & target_mask != 0 {
                continue;
            }
            for c in gate.controls() {
                let bit = base >> c.qubit & 1;
                let want = match c.polarity {
                    Polarity::Filled => 1,
                    Polarity::Open => 0,
                };
                if bit != want {
                    continue 'groups;
                }
            }
            for (j, mask) in spread.iter().enumerate() {
                sub[j] = self.amps[(base | mask) as usize];
            }
            for (i, mask) in spread.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, s) in sub.iter().enumerate() {
                    acc += block[(i, j)] * s;
                }
                self.amps[(base | mask) as usize] = acc;
            }
        }
        Ok(())
    }

    /// Marginal Born-rule distribution over a qubit subset. Bit `k` of the
    /// outcome holds the value of `qubits[k]`.
    pub fn measure_distribution(&self, qubits: &[usize]) -> Result<OutcomeDistribution, QsimError> {
        if qubits.is_empty() {
            return Err(QsimError::EmptySubset);
        }
        for (i, &q) in qubits.iter().enumerate() {
            super::check_qubit(q, self.n_qubits)?;
            if qubits[..i].contains(&q) {
                return Err(QsimError::DuplicateQubit(q));
            }
        }
        let mut probs: BTreeMap<u64, f64> = BTreeMap::new();
        for (idx, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut outcome = 0u64;
            for (k, &q) in qubits.iter().enumerate() {
                outcome |= (idx as u64 >> q & 1) << k;
            }
            *probs.entry(outcome).or_insert(0.0) += p;
        }
        probs.retain(|_, p| *p > PROB_CUTOFF);
        Ok(OutcomeDistribution {
            qubits: qubits.to_vec(),
            probs,
        })
    }

    /// Projects onto `qubits == outcome` and renormalizes. Returns the
    /// branch probability together with the post-measurement state.
    pub(crate) fn project(&self, qubits: &[usize], outcome: u64) -> (f64, Statevector) {
        let mut prob = 0.0;
        for (idx, amp) in self.amps.iter().enumerate() {
            if Self::selects(idx as u64, qubits, outcome) {
                prob += amp.norm_sqr();
            }
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        if prob > 0.0 {
            let scale = 1.0 / prob.sqrt();
            for (idx, amp) in self.amps.iter().enumerate() {
                if Self::selects(idx as u64, qubits, outcome) {
                    amps[idx] = amp * scale;
                }
            }
        }
        (
            prob,
            Statevector {
                n_qubits: self.n_qubits,
                amps,
            },
        )
    }

    fn selects(index: u64, qubits: &[usize], outcome: u64) -> bool {
        qubits
            .iter()
            .enumerate()
            .all(|(k, &q)| index >> q & 1 == outcome >> k & 1)
    }
}

/// Probability map over the outcomes of a measured qubit subset.
#[derive(Clone, Debug)]
pub struct OutcomeDistribution {
    qubits: Vec<usize>,
    probs: BTreeMap<u64, f64>,
}

impl OutcomeDistribution {
    pub fn from_probabilities(qubits: Vec<usize>, probs: BTreeMap<u64, f64>) -> Self {
        OutcomeDistribution { qubits, probs }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn probability(&self, outcome: u64) -> f64 {
        self.probs.get(&outcome).copied().unwrap_or(0.0)
    }

    /// Outcomes with nonzero probability, in increasing outcome order.
    pub fn support(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().map(|(&o, &p)| (o, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Outcome with the largest probability (smallest outcome on ties).
    pub fn modal_outcome(&self) -> Option<u64> {
        self.probs
            .iter()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(a.0)))
            .map(|(&o, _)| o)
    }

    /// Total variation distance, treating missing outcomes as zero.
    pub fn total_variation(&self, other: &OutcomeDistribution) -> f64 {
        let mut keys: Vec<u64> = self.probs.keys().copied().collect();
        keys.extend(other.probs.keys().copied());
        keys.sort_unstable();
        keys.dedup();
        0.5 * keys
            .iter()
            .map(|&k| (self.probability(k) - other.probability(k)).abs())
            .sum::<f64>()
    }

    /// Multinomial draw of `shots` samples, reproducible under a fixed seed.
    pub fn sample_counts(&self, shots: u64, seed: u64) -> BTreeMap<u64, u64> {
        let outcomes: Vec<u64> = self.probs.keys().copied().collect();
        let mut cumulative = Vec::with_capacity(outcomes.len());
        let mut acc = 0.0;
        for &o in &outcomes {
            acc += self.probs[&o];
            cumulative.push(acc);
        }
        let total = acc;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for _ in 0..shots {
            let r: f64 = rng.gen_range(0.0..total);
            let pos = cumulative.partition_point(|&c| c <= r);
            let idx = pos.min(outcomes.len() - 1);
            *counts.entry(outcomes[idx]).or_insert(0) += 1;
        }
        counts
    }
}
