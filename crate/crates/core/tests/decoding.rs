use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tetrahelix::decoder::{decode_2d, decode_tetrahedral, pipeline_decode, prep_correct, BoundedSearch, FacetCode, MinWeightTable, PrepDecoder};
use tetrahelix::noise::{propagate, sample_iid_faults, FaultLabel, Stage};
use tetrahelix::{build_tetrahedral_colex, build_tetrahelix, BitMatrix, BitVector, CssCode, FaultSet, NoiseModel, Pipeline, StageLayout, SyndromeDecoder};

fn block(l: usize) -> CssCode {
    CssCode::from_colex(&build_tetrahedral_colex(l).unwrap()).unwrap()
}

/// Minimum weight of a vector with syndrome `s`, by enumerating all of `{0,1}^n`.
fn brute_min_weight(h: &BitMatrix, s: &BitVector) -> usize {
    let n = h.ncols();
    (0u32..1 << n)
        .filter(|&e| h.mul_vec(&BitVector::from_indices(n, (0..n).filter(|i| e >> i & 1 == 1))) == *s)
        .map(|e| e.count_ones() as usize)
        .min()
        .unwrap()
}

#[test]
fn table_weights_match_enumeration() {
    let c = block(3);
    let t = MinWeightTable::build(&c.hx).unwrap();
    assert_eq!(t.coverage(), 1 << c.hx.rank());
    for e in 0u32..1 << 15 {
        if e.count_ones() > 3 {
            continue;
        }
        let v = BitVector::from_indices(15, (0..15).filter(|i| e >> i & 1 == 1));
        let s = c.hx.mul_vec(&v);
        let fix = t.lookup(&s).unwrap();
        assert_eq!(c.hx.mul_vec(&fix), s);
        assert_eq!(fix.weight(), t.weight(&s));
        assert!(fix.weight() <= v.weight());
    }
    let s = c.hx.mul_vec(&BitVector::from_indices(15, [0, 5, 9, 13]));
    assert_eq!(t.weight(&s), brute_min_weight(&c.hx, &s));
}

#[test]
fn block_decoder_corrects_low_weight_errors() {
    for l in [3, 5] {
        let c = block(l);
        let dec = SyndromeDecoder::new(&c.hx);
        let t = (l - 1) / 2;
        let mut rng = ChaCha8Rng::seed_from_u64(l as u64);
        for _ in 0..300 {
            let w = rng.gen_range(0..=t);
            let e = BitVector::from_indices(c.n, (0..w).map(|_| rng.gen_range(0..c.n)));
            for logical in [false, true] {
                let mut o = e.clone();
                if logical {
                    o.xor_assign(&c.logical_z);
                }
                assert_eq!(decode_tetrahedral(&c, &dec, &o).unwrap(), logical, "L = {l}, error {:?}", e.support());
            }
        }
    }
}

#[test]
fn search_and_table_agree_on_weight() {
    let c = block(3);
    let table = MinWeightTable::build(&c.hx).unwrap();
    let search = BoundedSearch::new(&c.hx, 6, 200_000);
    for e in 0u32..1 << 15 {
        if e.count_ones() > 2 {
            continue;
        }
        let s = c.hx.mul_vec(&BitVector::from_indices(15, (0..15).filter(|i| e >> i & 1 == 1)));
        let found = search.decode(&s).unwrap();
        assert_eq!(c.hx.mul_vec(&found), s);
        assert_eq!(found.weight(), table.weight(&s));
    }
}

#[test]
fn facet_codes_have_full_rank_checks() {
    for l in [3, 5] {
        let colex = build_tetrahedral_colex(l).unwrap();
        for color in 0..4 {
            let f = FacetCode::new(&colex, color).unwrap();
            assert_eq!(f.size(), (3 * l * l + 1) / 4, "L = {l}, color {color}");
            let zero = decode_2d(&f, &BitVector::zeros(f.size())).unwrap();
            assert!(!zero.x);
            assert!(zero.correction.is_zero());
        }
    }
}

#[test]
fn prep_decoder_absorbs_single_faults() {
    let c = block(3);
    let dec = PrepDecoder::new(&c).unwrap();
    let bdec = SyndromeDecoder::new(&c.hx);
    let m = c.hz.nrows();
    for q in 0..c.n + m {
        let (x, flips) = if q < c.n {
            (BitVector::from_indices(c.n, [q]), BitVector::zeros(m))
        } else {
            (BitVector::zeros(c.n), BitVector::from_indices(m, [q - c.n]))
        };
        let out = prep_correct(&c, &dec, &x, &flips).unwrap();
        assert!(!decode_tetrahedral(&c, &bdec, &out.residual).unwrap(), "fault {q}");
    }
}

#[test]
fn noiseless_pipeline_reports_no_failure() {
    for k in 1..=3 {
        let p = Pipeline::new(build_tetrahelix(k, 3).unwrap()).unwrap();
        let r = p.run(&FaultSet::empty(&p.layout)).unwrap();
        assert!(!r.logical);
        assert_eq!(r.merge_bits.len(), k - 1);
    }
}

#[test]
fn single_faults_on_distance_five_chain() {
    let p = Pipeline::new(build_tetrahelix(2, 5).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let loc = rng.gen_range(0..p.layout.size());
        let label = FaultLabel::ALL[rng.gen_range(0..4)];
        let mut f = FaultSet::single(&p.layout, loc, label);
        if rng.gen_bool(0.5) {
            f.twirl = BitVector::ones(p.layout.data_qubits);
        }
        assert!(!p.run(&f).unwrap().logical, "location {loc} {label:?}");
    }
}

#[test]
fn measurement_labels_act_by_stage() {
    let layout = StageLayout::new(4, 3, 2, true);
    let mut seen = 0;
    for stage in Stage::ALL {
        let r = layout.range(stage);
        seen += r.len();
        for loc in r {
            assert_eq!(layout.locate(loc).unwrap().0, stage);
        }
    }
    assert_eq!(seen, layout.size());
    let syn = layout.range(Stage::Syndrome).start;
    let flipped = |label| propagate(&FaultSet::single(&layout, syn, label), &layout).unwrap().syndrome_flips.weight();
    assert_eq!(flipped(FaultLabel::X), 1);
    assert_eq!(flipped(FaultLabel::Meas), 1);
    assert_eq!(flipped(FaultLabel::Z), 0);
    let fin = layout.range(Stage::Final).start;
    let out = |label| propagate(&FaultSet::single(&layout, fin, label), &layout).unwrap().outcome_flips().weight();
    assert_eq!(out(FaultLabel::Z), 1);
    assert_eq!(out(FaultLabel::Y), 1);
    assert_eq!(out(FaultLabel::X), 0);
}

#[test]
fn no_merge_round_for_single_blocks() {
    let p = Pipeline::new(build_tetrahelix(1, 3).unwrap()).unwrap();
    assert!(!p.layout.merge_round);
    assert!(p.layout.range(Stage::Merge).is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampling_is_a_function_of_the_seed(seed in any::<u64>(), eps in 0.0f64..0.2) {
        let layout = StageLayout::new(30, 20, 7, true);
        let model = NoiseModel::uniform(eps).unwrap();
        let a = sample_iid_faults(&model, &layout, seed);
        prop_assert_eq!(&a, &sample_iid_faults(&model, &layout, seed));
        prop_assert!(a.faults.windows(2).all(|w| w[0].location < w[1].location));
        prop_assert!(a.faults.iter().all(|f| f.location < layout.size()));
    }

    #[test]
    fn twirled_x_gains_z_only_under_coins(x in prop::collection::vec(any::<bool>(), 20), coins in prop::collection::vec(any::<bool>(), 20)) {
        let x = BitVector::from_bools(&x);
        let coins = BitVector::from_bools(&coins);
        let z = tetrahelix::noise::twirl_through_diagonal(&x, &coins);
        prop_assert_eq!(z.and(&x), z.clone());
        prop_assert_eq!(z.and(&coins), z);
    }

    /// Adding a Z stabilizer to the outcomes never changes the decoded value.
    #[test]
    fn decoding_is_stabilizer_invariant(seed in any::<u64>(), k in 1usize..=3) {
        let t = build_tetrahelix(k, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = BitVector::from_indices(t.n(), (0..2).map(|_| rng.gen_range(0..t.n())));
        let mut s = e.clone();
        for r in t.code.hz.rows() {
            if rng.gen_bool(0.5) {
                s.xor_assign(r);
            }
        }
        prop_assert_eq!(pipeline_decode(&t, &e).unwrap(), pipeline_decode(&t, &s).unwrap());
    }
}

/// Pauli-twirl weights of `T^s X T^-s`: the twirled channel applies X or Y with probability ½ each.
#[test]
fn twirl_weights_of_conjugated_x() {
    use num_complex::Complex64;
    let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    for s in [1.0, -1.0] {
        // T^s X T^-s = [[0, w^-s], [w^s, 0]]
        let (a, b) = (w.powf(-s), w.powf(s));
        let c_x = (a + b) / 2.0;
        let c_y = Complex64::i() * (a - b) / 2.0;
        assert!((c_x.norm_sqr() - 0.5).abs() < 1e-12);
        assert!((c_y.norm_sqr() - 0.5).abs() < 1e-12);
    }
}

/// Exact state-vector run of one L=3 block: X error on any qubit just before
/// the transversal T layer leaves the decoded logical distribution unchanged,
/// which is what the twirled frame model predicts.
#[test]
fn twirl_model_matches_exact_single_block() {
    use num_complex::Complex64;
    use tetrahelix::csscode::find_t_partition;

    let c = block(3);
    let n = c.n;
    let dec = SyndromeDecoder::new(&c.hx);
    let p = find_t_partition(&c).unwrap().unwrap();
    let plus = p.plus_mask(n);
    let to_u32 = |v: &BitVector| v.iter_ones().fold(0u32, |a, i| a | 1 << i);
    let plus = to_u32(&plus);
    let mut gens: Vec<u32> = c.hx.rows().iter().map(to_u32).collect();
    gens.push(to_u32(&c.logical_x));
    let mut support = vec![0u32];
    for g in gens {
        let more: Vec<u32> = support.iter().map(|s| s ^ g).collect();
        support.extend(more);
    }
    support.sort_unstable();
    support.dedup();
    let omega = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let logical_one = |error: Option<usize>| -> f64 {
        let mut amp = vec![Complex64::new(0.0, 0.0); 1 << n];
        for &s in &support {
            let s = error.map_or(s, |q| s ^ 1 << q);
            let signed = (s & plus).count_ones() as i32 - (s & !plus).count_ones() as i32;
            amp[s as usize] = omega.powi(signed);
        }
        let mut h = 1;
        while h < amp.len() {
            for i in (0..amp.len()).step_by(2 * h) {
                for j in i..i + h {
                    let (x, y) = (amp[j], amp[j + h]);
                    amp[j] = x + y;
                    amp[j + h] = x - y;
                }
            }
            h *= 2;
        }
        let total: f64 = amp.iter().map(|a| a.norm_sqr()).sum();
        let mut one = 0.0;
        for (o, a) in amp.iter().enumerate() {
            let w = a.norm_sqr();
            if w > 0.0 {
                let bits = BitVector::from_indices(n, (0..n).filter(|i| o >> i & 1 == 1));
                if decode_tetrahedral(&c, &dec, &bits).unwrap() {
                    one += w;
                }
            }
        }
        one / total
    };
    let ideal = logical_one(None);
    assert!((ideal - (std::f64::consts::PI / 8.0).sin().powi(2)).abs() < 1e-9, "ideal {ideal}");
    for q in 0..n {
        assert!((logical_one(Some(q)) - ideal).abs() < 1e-9, "qubit {q}");
    }
}
