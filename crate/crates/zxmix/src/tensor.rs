//! Minimal dense tensors over qubit-sized legs, used to contract diagrams.
//!
//! Every leg has dimension 2. Legs are identified by opaque ids; contraction
//! sums over all legs shared between two tensors at once.

use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies a tensor leg within one network.
pub type LegId = u64;

/// Dense tensor with one bit per leg; `legs[0]` is the most significant bit
/// of the data index.
#[derive(Clone, Debug)]
pub struct Tensor {
    legs: Vec<LegId>,
    data: Vec<C64>,
}

impl Tensor {
    pub fn new(legs: Vec<LegId>, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), 1 << legs.len());
        let mut seen = legs.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), legs.len(), "tensor legs must be unique");
        Self { legs, data }
    }

    pub fn scalar(z: C64) -> Self {
        Self { legs: Vec::new(), data: vec![z] }
    }

    /// Identity wire between two legs.
    pub fn delta(a: LegId, b: LegId) -> Self {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        Self::new(vec![a, b], vec![o, z, z, o])
    }

    pub fn legs(&self) -> &[LegId] { &self.legs }

    pub fn data(&self) -> &[C64] { &self.data }

    pub fn conj(&self) -> Self {
        Self { legs: self.legs.clone(), data: self.data.iter().map(|z| z.conj()).collect() }
    }

    fn bit_of(&self, idx: usize, pos: usize) -> usize {
        (idx >> (self.legs.len() - 1 - pos)) & 1
    }

    /// Trace out a pair of legs of this tensor (sum over equal bit values).
    pub fn self_trace(&self, la: LegId, lb: LegId) -> Self {
        let pa = self.legs.iter().position(|&l| l == la).expect("leg not found");
        let pb = self.legs.iter().position(|&l| l == lb).expect("leg not found");
        assert_ne!(pa, pb);
        let keep: Vec<usize> =
            (0..self.legs.len()).filter(|&p| p != pa && p != pb).collect();
        let legs: Vec<LegId> = keep.iter().map(|&p| self.legs[p]).collect();
        let mut data = vec![C64::new(0.0, 0.0); 1 << legs.len()];
        for (idx, z) in self.data.iter().enumerate() {
            if self.bit_of(idx, pa) != self.bit_of(idx, pb) {
                continue;
            }
            let mut out = 0usize;
            for &p in &keep {
                out = (out << 1) | self.bit_of(idx, p);
            }
            data[out] += z;
        }
        Self { legs, data }
    }

    /// Contract with `other` over every shared leg (an outer product when
    /// none are shared).
    pub fn contract(&self, other: &Self) -> Self {
        let shared: Vec<LegId> =
            self.legs.iter().copied().filter(|l| other.legs.contains(l)).collect();
        let free_a: Vec<usize> = (0..self.legs.len())
            .filter(|&p| !shared.contains(&self.legs[p]))
            .collect();
        let free_b: Vec<usize> = (0..other.legs.len())
            .filter(|&p| !shared.contains(&other.legs[p]))
            .collect();
        let shared_a: Vec<usize> =
            shared.iter().map(|l| self.legs.iter().position(|x| x == l).unwrap()).collect();
        let shared_b: Vec<usize> =
            shared.iter().map(|l| other.legs.iter().position(|x| x == l).unwrap()).collect();

        let legs: Vec<LegId> = free_a
            .iter()
            .map(|&p| self.legs[p])
            .chain(free_b.iter().map(|&p| other.legs[p]))
            .collect();
        let (na, nb, ns) = (free_a.len(), free_b.len(), shared.len());
        let mut data = vec![C64::new(0.0, 0.0); 1 << legs.len()];
        for ia in 0..1usize << na {
            for ib in 0..1usize << nb {
                let mut acc = C64::new(0.0, 0.0);
                for is in 0..1usize << ns {
                    let mut idx_a = 0usize;
                    for (n, &p) in free_a.iter().enumerate() {
                        idx_a |= ((ia >> (na - 1 - n)) & 1) << (self.legs.len() - 1 - p);
                    }
                    for (n, &p) in shared_a.iter().enumerate() {
                        idx_a |= ((is >> (ns - 1 - n)) & 1) << (self.legs.len() - 1 - p);
                    }
                    let mut idx_b = 0usize;
                    for (n, &p) in free_b.iter().enumerate() {
                        idx_b |= ((ib >> (nb - 1 - n)) & 1) << (other.legs.len() - 1 - p);
                    }
                    for (n, &p) in shared_b.iter().enumerate() {
                        idx_b |= ((is >> (ns - 1 - n)) & 1) << (other.legs.len() - 1 - p);
                    }
                    acc += self.data[idx_a] * other.data[idx_b];
                }
                data[(ia << nb) | ib] = acc;
            }
        }
        Self { legs, data }
    }

    /// Read the data out with legs rearranged into `order` (a permutation of
    /// this tensor's legs).
    pub fn reordered(&self, order: &[LegId]) -> Vec<C64> {
        assert_eq!(order.len(), self.legs.len());
        let pos: Vec<usize> =
            order.iter().map(|l| self.legs.iter().position(|x| x == l).unwrap()).collect();
        let n = self.legs.len();
        let mut out = vec![C64::new(0.0, 0.0); self.data.len()];
        for (dst, slot) in out.iter_mut().enumerate() {
            let mut src = 0usize;
            for (n_out, &p) in pos.iter().enumerate() {
                src |= ((dst >> (n - 1 - n_out)) & 1) << (n - 1 - p);
            }
            *slot = self.data[src];
        }
        out
    }
}

/// How to pick the next contraction.
#[derive(Copy, Clone, Debug)]
pub enum ContractionOrder {
    /// Contract the pair producing the smallest intermediate tensor.
    Greedy,
    /// Seeded random pair order; used to check order independence.
    Random(u64),
}

/// Contract a whole network down to a single tensor over its open legs.
pub fn contract_network(mut tensors: Vec<Tensor>, order: ContractionOrder) -> Tensor {
    if tensors.is_empty() {
        return Tensor::scalar(C64::new(1.0, 0.0));
    }
    let mut rng = match order {
        ContractionOrder::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        ContractionOrder::Greedy => None,
    };
    while tensors.len() > 1 {
        let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
        for i in 0..tensors.len() {
            for j in (i + 1)..tensors.len() {
                let shared =
                    tensors[i].legs().iter().filter(|l| tensors[j].legs().contains(l)).count();
                if shared > 0 {
                    let result_legs =
                        tensors[i].legs().len() + tensors[j].legs().len() - 2 * shared;
                    candidates.push((result_legs, i, j));
                }
            }
        }
        let (i, j) = if candidates.is_empty() {
            // disconnected components: fold as outer products
            (0, 1)
        } else if let Some(rng) = rng.as_mut() {
            let &(_, i, j) = candidates.choose(rng).unwrap();
            (i, j)
        } else {
            let &(_, i, j) = candidates.iter().min().unwrap();
            (i, j)
        };
        let b = tensors.swap_remove(j);
        let a = tensors.swap_remove(i);
        tensors.push(a.contract(&b));
    }
    tensors.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 { C64::new(re, 0.0) }

    #[test]
    fn delta_chain_contracts_to_delta() {
        let d = Tensor::delta(0, 1).contract(&Tensor::delta(1, 2));
        assert_eq!(d.legs(), &[0, 2]);
        assert_eq!(d.data(), Tensor::delta(0, 2).data());
    }

    #[test]
    fn closed_loop_is_two() {
        // tr(I₂) = 2
        let loop2 = Tensor::delta(0, 1).contract(&Tensor::delta(0, 1));
        assert!(loop2.legs().is_empty());
        assert_eq!(loop2.data()[0], c(2.0));
    }

    #[test]
    fn self_trace_takes_the_trace() {
        let t = Tensor::new(vec![0, 1], vec![c(1.0), c(2.0), c(3.0), c(4.0)]);
        let tr = t.self_trace(0, 1);
        assert_eq!(tr.data()[0], c(5.0));
    }

    #[test]
    fn reorder_swaps_indices() {
        let t = Tensor::new(vec![7, 9], vec![c(1.0), c(2.0), c(3.0), c(4.0)]);
        assert_eq!(t.reordered(&[9, 7]), vec![c(1.0), c(3.0), c(2.0), c(4.0)]);
    }

    #[test]
    fn outer_product_on_disjoint_networks() {
        let out = contract_network(
            vec![Tensor::scalar(c(3.0)), Tensor::scalar(c(0.5))],
            ContractionOrder::Greedy,
        );
        assert_eq!(out.data()[0], c(1.5));
    }
}
