//! Interpretation of diagrams: the standard matrix semantics by tensor
//! network contraction, and the completely-positive-map semantics by
//! doubling with the discard wired to a partial trace.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::diagram::{BoundaryRole, Diagram, NodeId, NodeKind};
use crate::matrix::{kron, ComplexMatrix, MatrixError};
use crate::tensor::{contract_network, ContractionOrder, LegId, Tensor};

#[derive(Debug, Error, PartialEq)]
pub enum SemanticsError {
    #[error("diagram contains a discard; use the CP-map interpretation")]
    HasDiscard,

    #[error(transparent)]
    Shape(#[from] MatrixError),

    #[error("input deviates from Hermitian by {0:.3e}")]
    NotHermitianInput(f64),
}

pub type SemanticsResult<T> = Result<T, SemanticsError>;

/// Standard interpretation: contract the diagram to a `2^out × 2^in` matrix.
///
/// Boundary order fixes the index layout: input/output position 0 is the
/// most significant bit, matching [`kron`].
pub fn interpret(dg: &Diagram) -> SemanticsResult<ComplexMatrix> {
    interpret_ordered(dg, ContractionOrder::Greedy)
}

/// [`interpret`] with an explicit contraction order; the result must not
/// depend on it.
pub fn interpret_ordered(
    dg: &Diagram,
    order: ContractionOrder,
) -> SemanticsResult<ComplexMatrix> {
    if dg.contains_discard() {
        return Err(SemanticsError::HasDiscard);
    }
    let net = build_network(dg, Copy::Single)?;
    Ok(finish(dg, net, order, false))
}

/// Spider tensor in the computational basis: all-zeros index gets 1,
/// all-ones gets `e^{iα}`.
fn z_tensor(legs: Vec<LegId>, phase: C64) -> Tensor {
    let n = legs.len();
    let mut data = vec![C64::new(0.0, 0.0); 1 << n];
    data[0] = C64::new(1.0, 0.0);
    data[(1 << n) - 1] += phase;
    Tensor::new(legs, data)
}

/// X-spider: the Z-spider conjugated by Hadamards on every leg, in closed
/// form `2^{-k/2} (1 + e^{iα}(−1)^{|index|})`.
fn x_tensor(legs: Vec<LegId>, phase: C64) -> Tensor {
    let n = legs.len();
    let scale = (0.5f64).powf(n as f64 / 2.0);
    let data = (0..1usize << n)
        .map(|idx| {
            let sign = if idx.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            (C64::new(1.0, 0.0) + phase * sign) * scale
        })
        .collect();
    Tensor::new(legs, data)
}

fn h_tensor(legs: Vec<LegId>) -> Tensor {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let data = vec![
        C64::new(r, 0.0),
        C64::new(r, 0.0),
        C64::new(r, 0.0),
        C64::new(-r, 0.0),
    ];
    Tensor::new(legs, data)
}

/// Which copies of the doubled network to emit.
#[derive(Copy, Clone, PartialEq)]
enum Copy {
    Single,
    Doubled,
}

struct Network {
    tensors: Vec<Tensor>,
    /// (role, position, leg) — for `Doubled`, ket legs then bra legs per pin.
    pins: Vec<(BoundaryRole, usize, Vec<LegId>)>,
}

/// Translate the diagram into tensors. Leg ids: edge `e` maps to `2e`
/// (ket copy) and `2e+1` (bra copy); fresh ids are allocated past them.
fn build_network(dg: &Diagram, copies: Copy) -> SemanticsResult<Network> {
    let edges = dg.edges();
    let mut fresh = 2 * edges.len() as LegId;
    let mut alloc = || {
        fresh += 1;
        fresh - 1
    };

    let sides: &[u64] = match copies {
        Copy::Single => &[0],
        Copy::Doubled => &[0, 1],
    };
    let mut tensors = Vec::new();
    let mut pins = Vec::new();
    // boundary-boundary wires become a delta, emitted at the lower endpoint;
    // the leg reserved for the peer is parked here until it is visited
    let mut parked: std::collections::BTreeMap<(NodeId, u64), LegId> =
        std::collections::BTreeMap::new();

    let incident = |id: NodeId| -> Vec<usize> {
        edges
            .iter()
            .enumerate()
            .flat_map(|(e, &(a, b))| {
                let mut occ = Vec::new();
                if a == id {
                    occ.push(e);
                }
                if b == id {
                    occ.push(e);
                }
                occ
            })
            .collect()
    };

    for (id, kind) in dg.nodes() {
        match kind {
            NodeKind::Boundary { role, pos } => {
                let e = incident(id)[0];
                let (a, b) = edges[e];
                let other = if a == id { b } else { a };
                let other_is_boundary = dg.node(other).unwrap().is_boundary();
                let mut legs = Vec::new();
                for &side in sides {
                    if other_is_boundary {
                        let leg = if id < other {
                            let mine = alloc();
                            let theirs = alloc();
                            tensors.push(Tensor::delta(mine, theirs));
                            parked.insert((other, side), theirs);
                            mine
                        } else {
                            parked.remove(&(id, side)).expect("wire leg parked by peer")
                        };
                        legs.push(leg);
                    } else {
                        legs.push(2 * e as LegId + side);
                    }
                }
                pins.push((*role, *pos, legs));
            }
            NodeKind::Discard => {
                let e = incident(id)[0] as LegId;
                match copies {
                    Copy::Single => return Err(SemanticsError::HasDiscard),
                    Copy::Doubled => tensors.push(Tensor::delta(2 * e, 2 * e + 1)),
                }
            }
            NodeKind::Z(_) | NodeKind::X(_) | NodeKind::H => {
                for &side in sides {
                    let occ = incident(id);
                    // self-loops repeat an edge: give the second occurrence a
                    // temporary leg and trace the pair out immediately
                    let mut legs: Vec<LegId> = Vec::with_capacity(occ.len());
                    let mut traces = Vec::new();
                    for &e in &occ {
                        let base = 2 * e as LegId + side;
                        if legs.contains(&base) {
                            let tmp = alloc();
                            traces.push((base, tmp));
                            legs.push(tmp);
                        } else {
                            legs.push(base);
                        }
                    }
                    let mut t = match kind {
                        NodeKind::Z(ph) => z_tensor(legs, ph.cexp()),
                        NodeKind::X(ph) => x_tensor(legs, ph.cexp()),
                        NodeKind::H => h_tensor(legs),
                        _ => unreachable!(),
                    };
                    if side == 1 {
                        t = t.conj();
                    }
                    for (a, b) in traces {
                        t = t.self_trace(a, b);
                    }
                    tensors.push(t);
                }
            }
        }
    }
    debug_assert!(parked.is_empty());
    Ok(Network { tensors, pins })
}

fn finish(dg: &Diagram, net: Network, order: ContractionOrder, doubled: bool) -> ComplexMatrix {
    let result = contract_network(net.tensors, order);
    // row bits: (bra outs, ket outs) by ascending position; cols likewise
    let mut out_pins: Vec<&(BoundaryRole, usize, Vec<LegId>)> =
        net.pins.iter().filter(|(r, _, _)| *r == BoundaryRole::Output).collect();
    let mut in_pins: Vec<&(BoundaryRole, usize, Vec<LegId>)> =
        net.pins.iter().filter(|(r, _, _)| *r == BoundaryRole::Input).collect();
    out_pins.sort_by_key(|(_, pos, _)| *pos);
    in_pins.sort_by_key(|(_, pos, _)| *pos);
    let copies = if doubled { 2 } else { 1 };
    let mut leg_order = Vec::new();
    for side in (0..copies).rev() {
        for (_, _, legs) in &out_pins {
            leg_order.push(legs[side]);
        }
    }
    for side in (0..copies).rev() {
        for (_, _, legs) in &in_pins {
            leg_order.push(legs[side]);
        }
    }
    let data = result.reordered(&leg_order);
    let rows = 1usize << (copies * dg.out_arity());
    let cols = 1usize << (copies * dg.in_arity());
    assert_eq!(data.len(), rows * cols);
    ComplexMatrix::from_fn(rows, cols, |i, j| data[i * cols + j])
}

/// A completely positive map as a matrix acting on column-stacked density
/// matrices: `vec(ρ)[j·d + i] = ρ_{ij}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim_in: usize,
    dim_out: usize,
    mat: ComplexMatrix,
}

impl Superoperator {
    pub fn new(dim_in: usize, dim_out: usize, mat: ComplexMatrix) -> Self {
        assert_eq!(mat.rows(), dim_out * dim_out);
        assert_eq!(mat.cols(), dim_in * dim_in);
        Self { dim_in, dim_out, mat }
    }

    /// Doubling of a pure map: `ρ ↦ M ρ M†` is `conj(M) ⊗ M` on vec(ρ).
    pub fn from_pure(m: &ComplexMatrix) -> Self {
        Self { dim_in: m.cols(), dim_out: m.rows(), mat: kron(&m.conj(), m) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim_in: dim, dim_out: dim, mat: ComplexMatrix::identity(dim * dim) }
    }

    pub fn dim_in(&self) -> usize { self.dim_in }

    pub fn dim_out(&self) -> usize { self.dim_out }

    pub fn mat(&self) -> &ComplexMatrix { &self.mat }

    /// `true` for maps from the scalar space to itself.
    pub fn is_scalar(&self) -> bool { self.dim_in == 1 && self.dim_out == 1 }

    pub fn scale(&self, z: C64) -> Self {
        Self { dim_in: self.dim_in, dim_out: self.dim_out, mat: self.mat.scale(z) }
    }

    pub fn add(&self, other: &Self) -> SemanticsResult<Self> {
        Ok(Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            mat: self.mat.add(&other.mat)?,
        })
    }

    /// Apply after `first`: `self ∘ first` as maps on density matrices.
    pub fn compose(&self, first: &Self) -> SemanticsResult<Self> {
        Ok(Self {
            dim_in: first.dim_in,
            dim_out: self.dim_out,
            mat: self.mat.matmul(&first.mat)?,
        })
    }

    /// Parallel composition; `self` takes the high-order qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        // interleave the bra/ket blocks so that the result acts on
        // vec of the tensored density matrix
        let din = self.dim_in * other.dim_in;
        let dout = self.dim_out * other.dim_out;
        let mat = ComplexMatrix::from_fn(dout * dout, din * din, |r, c| {
            let (brao, keto) = (r / dout, r % dout);
            let (brai, keti) = (c / din, c % din);
            let (brao1, brao2) = (brao / other.dim_out, brao % other.dim_out);
            let (keto1, keto2) = (keto / other.dim_out, keto % other.dim_out);
            let (brai1, brai2) = (brai / other.dim_in, brai % other.dim_in);
            let (keti1, keti2) = (keti / other.dim_in, keti % other.dim_in);
            self.mat[(brao1 * self.dim_out + keto1, brai1 * self.dim_in + keti1)]
                * other.mat[(brao2 * other.dim_out + keto2, brai2 * other.dim_in + keti2)]
        });
        Self { dim_in: din, dim_out: dout, mat }
    }

    /// Apply to a density matrix. The input must be Hermitian within 1e-9;
    /// the result is symmetrized.
    pub fn apply(&self, rho: &ComplexMatrix) -> SemanticsResult<ComplexMatrix> {
        if rho.rows() != self.dim_in || rho.cols() != self.dim_in {
            return Err(SemanticsError::Shape(MatrixError::ShapeMismatch(
                rho.rows(),
                rho.cols(),
                self.dim_in,
                self.dim_in,
            )));
        }
        let defect = rho.hermiticity_defect();
        if defect > 1e-9 {
            return Err(SemanticsError::NotHermitianInput(defect));
        }
        let vec = ComplexMatrix::from_fn(self.dim_in * self.dim_in, 1, |k, _| {
            rho[(k % self.dim_in, k / self.dim_in)]
        });
        let w = self.mat.matmul(&vec)?;
        let raw = ComplexMatrix::from_fn(self.dim_out, self.dim_out, |i, j| {
            w[(j * self.dim_out + i, 0)]
        });
        Ok(raw.add(&raw.dagger())?.scale(C64::new(0.5, 0.0)))
    }

    /// Choi matrix `C[(i·d_out + k), (j·d_out + l)] = ⟨k|Φ(|i⟩⟨j|)|l⟩`.
    pub fn choi(&self) -> ComplexMatrix {
        let (din, dout) = (self.dim_in, self.dim_out);
        ComplexMatrix::from_fn(din * dout, din * dout, |r, c| {
            let (i, k) = (r / dout, r % dout);
            let (j, l) = (c / dout, c % dout);
            self.mat[(l * dout + k, j * din + i)]
        })
    }
}

/// CP-map interpretation: doubling of the standard interpretation, with
/// discard nodes becoming a partial trace over their wire.
pub fn interpret_cpm(dg: &Diagram) -> Superoperator {
    interpret_cpm_ordered(dg, ContractionOrder::Greedy)
}

/// [`interpret_cpm`] with an explicit contraction order.
pub fn interpret_cpm_ordered(dg: &Diagram, order: ContractionOrder) -> Superoperator {
    if !dg.contains_discard() {
        let m = interpret_ordered(dg, order).expect("discard-free");
        return Superoperator::from_pure(&m);
    }
    let net = build_network(dg, Copy::Doubled).expect("doubled network admits discards");
    let mat = finish(dg, net, order, true);
    Superoperator::new(1 << dg.in_arity(), 1 << dg.out_arity(), mat)
}

/// Free-function form of [`Superoperator::apply`].
pub fn apply_superop(s: &Superoperator, rho: &ComplexMatrix) -> SemanticsResult<ComplexMatrix> {
    s.apply(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::gens::*;
    use crate::phase::Phase;

    fn c(re: f64, im: f64) -> C64 { C64::new(re, im) }

    #[test]
    fn zero_phase_z_spider_is_identity() {
        let m = interpret(&z(1, 1, Phase::zero())).unwrap();
        assert!(m.approx_eq(&ComplexMatrix::identity(2), 1e-15));
    }

    #[test]
    fn hadamard_matrix() {
        let m = interpret(&hadamard()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expect = ComplexMatrix::from_rows(vec![
            vec![c(r, 0.0), c(r, 0.0)],
            vec![c(r, 0.0), c(-r, 0.0)],
        ]);
        assert!(m.approx_eq(&expect, 1e-15));
    }

    #[test]
    fn empty_diagram_is_scalar_one() {
        let m = interpret(&empty()).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 1));
        assert_eq!(m[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn swap_exchanges_wires() {
        let m = interpret(&swap()).unwrap();
        let mut expect = ComplexMatrix::zeros(4, 4);
        expect[(0, 0)] = c(1.0, 0.0);
        expect[(1, 2)] = c(1.0, 0.0);
        expect[(2, 1)] = c(1.0, 0.0);
        expect[(3, 3)] = c(1.0, 0.0);
        assert!(m.approx_eq(&expect, 1e-15));
    }

    #[test]
    fn yanked_wire_is_identity() {
        // (∩ ⊗ I) ∘ (I ⊗ ∪), checked against plain matrix contraction of
        // the 4×2 and 2×4 cup/cap matrices
        let lhs = identity().tensor(&cup());
        let rhs = cap().tensor(&identity());
        let yanked = lhs.compose(&rhs).unwrap();
        let m = interpret(&yanked).unwrap();

        let cup_m = interpret(&cup()).unwrap();
        let cap_m = interpret(&cap()).unwrap();
        let i2 = ComplexMatrix::identity(2);
        let oracle = kron(&cap_m, &i2).matmul(&kron(&i2, &cup_m)).unwrap();
        assert!(m.approx_eq(&oracle, 1e-12));
        assert!(m.approx_eq(&i2, 1e-12));
    }

    #[test]
    fn spider_chain_fuses_semantically() {
        let a = z(1, 1, Phase::new(1, 4));
        let chain = a.compose(&a).unwrap();
        let m = interpret(&chain).unwrap();
        let expect = interpret(&z(1, 1, Phase::new(1, 2))).unwrap();
        assert!(m.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn discard_is_rejected_by_matrix_semantics() {
        assert_eq!(interpret(&discard()).unwrap_err(), SemanticsError::HasDiscard);
    }

    #[test]
    fn cpm_of_discard_is_the_trace() {
        let s = interpret_cpm(&discard());
        assert_eq!((s.dim_in(), s.dim_out()), (2, 1));
        // vec(ρ) ↦ ρ00 + ρ11
        let expect = ComplexMatrix::from_rows(vec![vec![
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ]]);
        assert!(s.mat().approx_eq(&expect, 1e-15));
        let half_i = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        let out = s.apply(&half_i).unwrap();
        assert!((out[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cpm_identity_superoperator() {
        let s = interpret_cpm(&identity());
        assert!(s.mat().approx_eq(&ComplexMatrix::identity(4), 1e-15));
    }

    #[test]
    fn doubling_matches_conjugation_oracle() {
        // H applied to |0⟩⟨0| gives |+⟩⟨+|
        let s = interpret_cpm(&hadamard());
        let mut rho = ComplexMatrix::zeros(2, 2);
        rho[(0, 0)] = c(1.0, 0.0);
        let out = s.apply(&rho).unwrap();
        let h = interpret(&hadamard()).unwrap();
        let oracle = h.matmul(&rho).unwrap().matmul(&h.dagger()).unwrap();
        assert!(out.approx_eq(&oracle, 1e-12));
        assert!((out[(0, 1)] - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn doubled_contraction_agrees_with_pure_doubling() {
        // route a discard through only part of the diagram so the doubled
        // network path is exercised
        let dg = z(1, 2, Phase::new(1, 4))
            .compose(&identity().tensor(&discard()))
            .unwrap();
        let s = interpret_cpm(&dg);
        assert_eq!((s.dim_in(), s.dim_out()), (2, 2));
        // oracle: M = Z-spider(1,2, π/4), Φ(ρ) = Tr_2(M ρ M†)
        let m = interpret(&z(1, 2, Phase::new(1, 4))).unwrap();
        let mut rho = ComplexMatrix::zeros(2, 2);
        rho[(0, 0)] = c(0.5, 0.0);
        rho[(1, 1)] = c(0.5, 0.0);
        rho[(0, 1)] = c(0.25, 0.25);
        rho[(1, 0)] = c(0.25, -0.25);
        let big = m.matmul(&rho).unwrap().matmul(&m.dagger()).unwrap();
        let mut traced = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let v = traced[(i, j)] + big[(2 * i + k, 2 * j + k)];
                    traced[(i, j)] = v;
                }
            }
        }
        let out = s.apply(&rho).unwrap();
        assert!(out.approx_eq(&traced, 1e-12));
    }

    #[test]
    fn scalar_circle_interprets_to_two() {
        let circle = cup().compose(&cap()).unwrap();
        let m = interpret(&circle).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 1));
        assert!((m[(0, 0)] - c(2.0, 0.0)).norm() < 1e-15);
    }
}
