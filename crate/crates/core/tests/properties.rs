use proptest::prelude::*;
use qupdate_core::css::{qudits_per_helper, CssCode, Sample};
use qupdate_core::field::Elem;
use qupdate_core::mds::{apply_update, MdsCode};
use qupdate_core::protocol::ProtocolInstance;
use qupdate_core::qsim::{run_quantum_update, QuantumSimulator, DEFAULT_CAP};

/// `(alpha, k, q, n)` with `q > ceil(alpha/2) k` and `q >= n`.
fn params() -> impl Strategy<Value = (usize, usize, u32, usize)> {
    (2usize..=6, 2usize..=4, prop::sample::select(vec![5u32, 7, 11, 13]), 1usize..=2)
        .prop_map(|(a, k, q, extra)| (a, k, q, k + extra))
        .prop_filter("field large enough", |&(a, k, q, n)| q as usize > qudits_per_helper(a) * k && q as usize >= n)
}

fn instance() -> impl Strategy<Value = ProtocolInstance> {
    (params(), any::<u64>()).prop_map(|((alpha, k, q, n), shuffle)| {
        let mut nodes: Vec<usize> = (0..n).collect();
        let mut s = shuffle;
        for i in (1..n).rev() {
            nodes.swap(i, (s % (i as u64 + 1)) as usize);
            s /= i as u64 + 1;
        }
        let mds = MdsCode::build_interleaved_rs(n, k, alpha, q).unwrap();
        let css = CssCode::build_css_general(alpha, k, q).unwrap();
        ProtocolInstance::bind(mds, css, &nodes[..k], nodes[k]).unwrap()
    })
}

fn reduce(v: &[u32], q: u32) -> Vec<Elem> {
    v.iter().map(|x| x % q).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn every_round_reconstructs_the_stale_share(inst in instance(), raw in prop::collection::vec(any::<u32>(), 24)) {
        let b = inst.mds().message_len();
        let mp = reduce(&raw[..b], inst.field().modulus());
        let rec = inst.run_update(&mp, &mp).unwrap();
        prop_assert!(rec.correct);
        prop_assert_eq!(rec.reconstructed, rec.expected);
    }

    #[test]
    fn single_symbol_changes(inst in instance(), raw in prop::collection::vec(any::<u32>(), 24), j in 0usize..24, delta in 1u32..13) {
        let f = inst.field();
        let b = inst.mds().message_len();
        let m = reduce(&raw[..b], f.modulus());
        let mp = apply_update(f, &m, j % b, delta % f.modulus());
        let rec = inst.run_update(&m, &mp).unwrap();
        prop_assert!(rec.correct);
    }

    #[test]
    fn helper_output_is_a_function_of_its_share(inst in instance(), raw in prop::collection::vec(any::<u32>(), 6), h in 0usize..4) {
        let h = h % inst.helpers().len();
        let d = reduce(&raw[..inst.css().alpha()], inst.field().modulus());
        let a = inst.helper_encode(h, &d).unwrap();
        let b = inst.helper_encode(h, &d).unwrap();
        prop_assert_eq!(&a, &b);
        // The transfer matrix maps the exponents back to the target share.
        let p: Vec<Elem> = a.x.iter().chain(&a.z).copied().collect();
        let target = inst.p_blocks()[h].mul_vec(&d).unwrap();
        prop_assert_eq!(inst.transfer()[h].matrix.mul_vec(&p).unwrap(), target);
    }

    #[test]
    fn stale_share_is_the_sum_of_helper_contributions(inst in instance(), raw in prop::collection::vec(any::<u32>(), 24)) {
        let f = inst.field();
        let b = inst.mds().message_len();
        let mp = reduce(&raw[..b], f.modulus());
        let mut sum = vec![0; inst.css().alpha()];
        for (h, &node) in inst.helpers().iter().enumerate() {
            let d = inst.mds().encode_node(node, &mp).unwrap().data;
            sum = f.add_vec(&sum, &inst.p_blocks()[h].mul_vec(&d).unwrap());
        }
        prop_assert_eq!(sum, inst.mds().encode_node(inst.stale(), &mp).unwrap().data);
    }

    #[test]
    fn sampled_codes_are_valid_when_accepted((alpha, k, q, _) in params(), seed in any::<u64>()) {
        if let Sample::Accepted(code) = CssCode::sample_css_random(alpha, k, q, seed).unwrap() {
            prop_assert!(code.check_dual_containment());
            prop_assert!(code.check_subblock_ranks());
            for h in 0..k {
                prop_assert_eq!(code.transfer_matrix(h).unwrap().matrix.rank(), alpha);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn hilbert_oracle_agrees_with_algebra(a in 1u32..5, raw in prop::collection::vec(0u32..5, 4), helpers in prop::sample::select(vec![(0usize, 1usize, 2usize), (1, 0, 2), (0, 2, 1), (2, 1, 0)])) {
        let mds = MdsCode::build_interleaved_rs(3, 2, 2, 5).unwrap();
        let css = CssCode::build_css_bell(a, 5).unwrap();
        let inst = ProtocolInstance::bind(mds, css, &[helpers.0, helpers.1], helpers.2).unwrap();
        let rec = run_quantum_update(&inst, &raw).unwrap();
        prop_assert!(rec.matches_algebraic);
        prop_assert!(rec.max_residual < 1e-8);
        prop_assert_eq!(rec.syndromes.to_share(), inst.mds().encode_node(helpers.2, &raw).unwrap().data);
    }

    #[test]
    fn hilbert_oracle_general_alpha(raw in prop::collection::vec(0u32..7, 8), stale in 0usize..3) {
        let mds = MdsCode::build_interleaved_rs(3, 2, 4, 7).unwrap();
        let css = CssCode::build_css_general(4, 2, 7).unwrap();
        let helpers: Vec<usize> = (0..3).filter(|&i| i != stale).collect();
        let inst = ProtocolInstance::bind(mds, css, &helpers, stale).unwrap();
        let sim = QuantumSimulator::new(&inst, DEFAULT_CAP).unwrap();
        let rec = sim.run(&raw).unwrap();
        prop_assert!(rec.matches_algebraic);
    }
}
