use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clinr_sim::arch::{ArchConfig, World};
use clinr_sim::circuit::{compose, layer, random_clifford_circuit, split_equal_depth, Circuit, GateDistribution};
use clinr_sim::engine::{Backend, FrameBackend, TableauBackend};
use clinr_sim::noise::sample_local_error;
use clinr_sim::pauli::{Pauli, PauliString};
use clinr_sim::tableau::StabilizerTableau;

fn circuit(n: usize, size: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_clifford_circuit(n, size, GateDistribution::default(), &mut rng).unwrap()
}

fn pauli_string(codes: &[u8]) -> PauliString {
    let factors: Vec<(usize, Pauli)> = codes
        .iter()
        .enumerate()
        .map(|(q, c)| (q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][*c as usize % 4]))
        .collect();
    PauliString::from_sparse(codes.len(), &factors)
}

fn symplectic_odd(a: &PauliString, b: &PauliString) -> bool {
    (0..a.num_qubits()).fold(false, |acc, q| {
        acc ^ (a.x_bit(q) & b.z_bit(q)) ^ (a.z_bit(q) & b.x_bit(q))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_commutation_is_symplectic(codes in prop::collection::vec((0u8..4, 0u8..4), 1..70)) {
        let a = pauli_string(&codes.iter().map(|c| c.0).collect::<Vec<_>>());
        let b = pauli_string(&codes.iter().map(|c| c.1).collect::<Vec<_>>());
        prop_assert_eq!(a.commutes_with(&b), !symplectic_odd(&a, &b));
        prop_assert_eq!(a.commutes_with(&b), b.commutes_with(&a));
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        prop_assert_eq!(ab.x_words(), ba.x_words());
        prop_assert_eq!(ab.z_words(), ba.z_words());
        prop_assert!(a.mul(&a).has_trivial_masks());
        prop_assert!(ab.weight() <= a.weight() + b.weight());
    }

    #[test]
    fn random_circuits_give_consistent_tableaux(n in 2usize..12, seed in any::<u64>()) {
        let c = circuit(n, n * n, seed);
        let tab = StabilizerTableau::from_circuit(n, c.ops()).unwrap();
        prop_assert!(tab.is_consistent());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let s = tab.random_stabilizer(&mut rng);
        prop_assert!(tab.in_stabilizer_group(&s));
        prop_assert!(tab.acts_trivially(&s));
    }

    #[test]
    fn layering_preserves_circuit(n in 2usize..10, size in 0usize..80, seed in any::<u64>()) {
        let c = circuit(n, size, seed);
        let lc = layer(&c);
        prop_assert_eq!(lc.depth(), c.depth());
        for ops in lc.layers() {
            let mut seen = vec![false; n];
            for op in ops {
                for &q in op.qubits() {
                    prop_assert!(!seen[q]);
                    seen[q] = true;
                }
            }
        }
        let flat = lc.to_circuit();
        prop_assert_eq!(flat.size(), c.size());
        let a = StabilizerTableau::from_circuit(n, c.ops()).unwrap();
        let b = StabilizerTableau::from_circuit(n, flat.ops()).unwrap();
        prop_assert_eq!(a.canonical_form(), b.canonical_form());
    }

    #[test]
    fn splitting_balances_depth(n in 2usize..10, seed in any::<u64>(), t in 1usize..6) {
        let c = circuit(n, n * n + 4 * t, seed);
        prop_assume!(t <= c.depth());
        let blocks = split_equal_depth(&c, t).unwrap();
        prop_assert_eq!(blocks.len(), t);
        let depths: Vec<usize> = blocks.iter().map(|b| b.depth()).collect();
        prop_assert_eq!(depths.iter().sum::<usize>(), c.depth());
        let (lo, hi) = (*depths.iter().min().unwrap(), *depths.iter().max().unwrap());
        prop_assert!(hi - lo <= 1);
        let joined = compose(&blocks, n).unwrap();
        let a = StabilizerTableau::from_circuit(n, c.ops()).unwrap();
        let b = StabilizerTableau::from_circuit(n, joined.ops()).unwrap();
        prop_assert_eq!(a.canonical_form(), b.canonical_form());
    }

    #[test]
    fn frame_and_tableau_agree_on_input_errors(
        n in 2usize..8,
        seed in any::<u64>(),
        codes in prop::collection::vec(0u8..4, 8),
    ) {
        let c = circuit(n, n * n, seed);
        let err = pauli_string(&codes[..n]);
        let ideal = StabilizerTableau::from_circuit(n, c.ops()).unwrap();
        let qubits: Vec<usize> = (0..n).collect();

        let mut frame = FrameBackend::new(n);
        let mut tab = TableauBackend::new(n, seed);
        frame.pauli_on(&err, &qubits);
        tab.pauli_on(&err, &qubits);
        for op in c.ops() {
            frame.gate(op);
            tab.gate(op);
        }
        // An input error is harmless exactly when it has no X component.
        let harmless = (0..n).all(|q| !err.x_bit(q));
        prop_assert_eq!(frame.fails(&ideal, &qubits), !harmless);
        prop_assert_eq!(tab.fails(&ideal, &qubits), !harmless);
    }

    #[test]
    fn local_errors_respect_extreme_rates(arity in 1usize..3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(sample_local_error(arity, 0.0, &mut rng).is_identity());
        prop_assert!(!sample_local_error(arity, 1.0, &mut rng).is_identity());
    }

    #[test]
    fn scheduler_conserves_pairs_and_matches_stepping(
        n in 1usize..16,
        tau in 0u32..8,
        links in 1usize..4,
        inventory in 0usize..16,
        ready in prop::collection::vec(0u64..150, 1..5),
    ) {
        let t = ready.len();
        let mut cfg = ArchConfig::for_clinr(n, t, tau).with_links(links);
        cfg.initial_inventory = inventory.min(n);
        let fast = World::new(cfg.clone(), n, ready.clone()).unwrap().run().unwrap();
        let slow = World::new(cfg, n, ready.clone()).unwrap().with_trace().run().unwrap();
        prop_assert_eq!(fast.total_depth, slow.total_depth);
        prop_assert_eq!(&fast.transfers, &slow.transfers);
        prop_assert_eq!(&fast.links, &slow.links);
        for l in &fast.links {
            prop_assert!(l.is_conserved());
        }
        for rec in slow.trace.as_ref().unwrap() {
            for s in &rec.links {
                prop_assert_eq!(s.generated, s.consumed + s.available as u64 + s.discarded);
            }
        }
        let inj = fast.injections();
        prop_assert_eq!(inj.len(), t);
        let mut prev_end = 0;
        for (k, tr) in inj.iter().enumerate() {
            prop_assert!(tr.start >= ready[k].max(prev_end));
            prop_assert!(tr.depth() >= 4);
            let per_round = n.div_ceil(links) as u64;
            prop_assert!(tr.depth() <= per_round * tau as u64 + 4);
            if tau == 0 {
                prop_assert_eq!(tr.stall_layers, 0);
            }
            prev_end = tr.end;
        }
        prop_assert!(fast.teleport().start >= prev_end);
        prop_assert_eq!(fast.total_depth, fast.teleport().end);
        prop_assert_eq!(fast.pairs_consumed(), (n * (t + 1)) as u64);
    }
}
