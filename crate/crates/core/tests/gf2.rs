use proptest::prelude::*;
use tetrahelix::gf2::min_weight_in_coset;
use tetrahelix::{BitMatrix, BitVector, CosetSearch};

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), c), r)
            .prop_map(move |rows| BitMatrix::from_rows(c, rows.iter().map(|b| BitVector::from_bools(b)).collect()).unwrap())
    })
}

fn brute_min_coset(gens: &[BitVector], offset: &BitVector) -> usize {
    let mut best = usize::MAX;
    for mask in 0u32..1 << gens.len() {
        let mut v = offset.clone();
        for (i, g) in gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                v.xor_assign(g);
            }
        }
        best = best.min(v.weight());
    }
    best
}

proptest! {
    #[test]
    fn rank_is_transpose_invariant(m in matrix(12, 70)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn kernel_has_full_dimension_and_is_annihilated(m in matrix(10, 40)) {
        let k = m.kernel_basis();
        prop_assert_eq!(k.len(), m.ncols() - m.rank());
        for v in &k {
            prop_assert!(m.mul_vec(v).is_zero());
        }
        let km = BitMatrix::from_rows(m.ncols(), k.clone()).unwrap();
        prop_assert_eq!(km.rank(), k.len());
    }

    #[test]
    fn solve_returns_preimages(m in matrix(10, 40), seed in any::<u64>()) {
        let x = BitVector::from_indices(m.ncols(), (0..m.ncols()).filter(|i| (seed >> (i % 64)) & 1 == 1));
        let b = m.mul_vec(&x);
        let y = m.solve(&b).unwrap().expect("b is in the column space");
        prop_assert_eq!(m.mul_vec(&y), b);
    }

    #[test]
    fn row_space_membership_matches_combinations(m in matrix(8, 30), mask in any::<u8>()) {
        let sel = BitVector::from_indices(m.nrows(), (0..m.nrows()).filter(|i| mask >> i & 1 == 1));
        prop_assert!(m.row_space_contains(&m.combine_rows(&sel)));
    }

    #[test]
    fn bitstring_round_trip(bits in prop::collection::vec(any::<bool>(), 0..200)) {
        let v = BitVector::from_bools(&bits);
        prop_assert_eq!(BitVector::from_bitstring(&v.to_bitstring()).unwrap(), v.clone());
        prop_assert_eq!(v.weight(), bits.iter().filter(|&&b| b).count());
    }

    #[test]
    fn coset_minimum_matches_enumeration(
        gens in prop::collection::vec(prop::collection::vec(any::<bool>(), 24), 0..8),
        off in prop::collection::vec(any::<bool>(), 24),
    ) {
        let gens: Vec<BitVector> = gens.iter().map(|g| BitVector::from_bools(g)).collect();
        let off = BitVector::from_bools(&off);
        let expected = brute_min_coset(&gens, &off);
        match min_weight_in_coset(&gens, &off, 24).unwrap() {
            CosetSearch::Found { weight, witness } => {
                prop_assert_eq!(weight, expected);
                prop_assert_eq!(witness.weight(), weight);
                let g = BitMatrix::from_rows(24, gens.clone()).unwrap();
                prop_assert!(g.row_space_contains(&witness.xor(&off)) || witness == off);
            }
            CosetSearch::Exhausted { .. } => prop_assert!(false, "cap equals n"),
        }
    }
}

#[test]
fn malformed_bitstrings_are_rejected() {
    assert!(BitVector::from_bitstring("01x").is_err());
    assert!(BitMatrix::from_rows(3, vec![BitVector::zeros(4)]).is_err());
}
