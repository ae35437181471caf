use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tetrahelix::colex::Colex;
use tetrahelix::csscode::{check_diagonal_transversality, find_t_partition};
use tetrahelix::harness::block_qubits_formula;
use tetrahelix::{build_tetrahedral_colex, build_tetrahelix, validate_colex, Basis, BitVector, CssCode, Distance, LogicalPhase, TetrahelixCode};

#[test]
fn colex_sizes_and_validation() {
    for l in [3, 5, 7] {
        let c = build_tetrahedral_colex(l).unwrap();
        assert_eq!(c.num_vertices(), block_qubits_formula(l), "L = {l}");
        assert_eq!(c.facets.len(), 4);
        let report = validate_colex(&c);
        assert!(report.passed(), "L = {l}: {report:?}");
    }
}

#[test]
fn even_or_small_sizes_are_rejected() {
    assert!(build_tetrahedral_colex(4).is_err());
    assert!(build_tetrahedral_colex(1).is_err());
    assert!(build_tetrahelix(0, 3).is_err());
}

#[test]
fn colex_json_round_trip() {
    let c = build_tetrahedral_colex(5).unwrap();
    let back = Colex::from_json(&c.to_json().unwrap()).unwrap();
    assert_eq!(back, c);
}

#[test]
fn tampered_colex_fails_validation() {
    let mut c = build_tetrahedral_colex(3).unwrap();
    let v = c.cells[0].vertices.pop().unwrap();
    assert!(!validate_colex(&c).passed(), "removing vertex {v} from a cell must be detected");
}

#[test]
fn distance_five_block() {
    let c = CssCode::from_colex(&build_tetrahedral_colex(5).unwrap()).unwrap();
    assert_eq!(c.n, 65);
    assert_eq!(c.logical_count(), 1);
    assert_eq!(c.distance(Basis::Z, 5).unwrap(), Distance::Exact(5));
    assert_eq!(c.distance(Basis::Z, 4).unwrap(), Distance::AtLeast(5));
}

#[test]
fn transversal_t_on_distance_five_block() {
    let c = CssCode::from_colex(&build_tetrahedral_colex(5).unwrap()).unwrap();
    let p = find_t_partition(&c).unwrap().expect("partition exists");
    let r = check_diagonal_transversality(&c, &p, None).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(matches!(r.residue, Some(1) | Some(7)));
    assert_eq!(r.logical, Some(p.induced_logical));
}

#[test]
fn broken_partition_is_rejected() {
    let c = CssCode::from_colex(&build_tetrahedral_colex(3).unwrap()).unwrap();
    let p = find_t_partition(&c).unwrap().unwrap();
    assert_eq!(p.induced_logical, LogicalPhase::T);
    let flipped = p.with_plus(p.v_minus[0]);
    assert!(!check_diagonal_transversality(&c, &flipped, None).unwrap().passed);
}

#[test]
fn code_json_round_trip() {
    let c = build_tetrahelix(2, 3).unwrap().code;
    assert_eq!(CssCode::from_json(&c.to_json().unwrap()).unwrap(), c);
}

#[test]
fn noncommuting_code_is_rejected() {
    let c = build_tetrahelix(1, 3).unwrap().code;
    let mut f = c.to_file();
    let row = &mut f.hz[0].bits;
    let q = (0..row.len()).find(|&i| !row.get(i)).unwrap();
    row.flip(q);
    assert!(CssCode::from_file(f).is_err());
}

#[test]
fn chain_structure_for_several_lengths() {
    for (k, span) in [(1, 1), (2, 2), (3, 3), (4, 4), (6, 4)] {
        let t = build_tetrahelix(k, 3).unwrap();
        assert_eq!(t.n(), 15 * k);
        assert!(t.code.commutes());
        assert_eq!(t.code.logical_count(), 1, "k = {k}");
        assert_eq!(t.max_fusion_span(), span, "k = {k}");
        assert_eq!(t.code.distance(Basis::Z, 3).unwrap(), Distance::Exact(3), "k = {k}");
        assert!(t.code.logical_x.dot(&t.code.logical_z));
        for b in 0..k {
            assert_eq!(t.block_slice(&t.code.logical_x, b), t.block_logicals[b].0);
        }
    }
}

#[test]
fn chain_json_round_trip() {
    let t = build_tetrahelix(3, 3).unwrap();
    let back = TetrahelixCode::from_json(&t.to_json().unwrap()).unwrap();
    assert_eq!(back.code, t.code);
    assert_eq!(back.pairings, t.pairings);
    assert_eq!(back.fused_cells, t.fused_cells);
}

/// Noiseless X-basis outcomes: Z stabilizers plus, when `logical`, the Z logical.
fn ideal_outcomes(t: &TetrahelixCode, logical: bool, seed: u64) -> BitVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = if logical { t.code.logical_z.clone() } else { BitVector::zeros(t.n()) };
    for r in t.code.hz.rows() {
        if rng.gen_bool(0.5) {
            v.xor_assign(r);
        }
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Noiseless chain outcomes split into noiseless block outcomes whose
    /// logical values multiply to the chain value.
    #[test]
    fn split_of_codewords_gives_block_codewords(k in 1usize..=5, logical in any::<bool>(), seed in any::<u64>()) {
        let t = build_tetrahelix(k, 3).unwrap();
        let o = ideal_outcomes(&t, logical, seed);
        let split = t.split_frame(&o).unwrap();
        let mut value = false;
        for (b, ob) in split.outcomes.iter().enumerate() {
            prop_assert!(t.blocks[b].hx.mul_vec(ob).is_zero(), "block {} has a nonzero cell syndrome", b);
            value ^= ob.dot(&t.blocks[b].logical_x);
        }
        prop_assert_eq!(value, logical);
        prop_assert_eq!(o.xor(&split.frame), split.outcomes.iter().fold(BitVector::zeros(0), |acc, x| acc.concat(x)));
    }

    /// The frame is a product of pair operators, hence a Z stabilizer of the chain.
    #[test]
    fn split_frame_is_a_pair_product(k in 2usize..=4, seed in any::<u64>()) {
        let t = build_tetrahelix(k, 3).unwrap();
        let o = BitVector::from_indices(t.n(), (0..t.n()).filter(|i| (seed.rotate_left(*i as u32 % 64) ^ (*i as u64 * 0x9e37)) & 3 == 0));
        let split = t.split_frame(&o).unwrap();
        prop_assert!(t.code.hz.row_space_contains(&split.frame));
    }
}
