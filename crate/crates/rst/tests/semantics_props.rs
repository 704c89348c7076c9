mod common;

use common::{base_formula, ext_formula};
use proptest::prelude::*;
use rst::elaborator::elaborate_to_base;
use rst::hfset::{self, HfSet};
use rst::model::{eval, eval_extended, Env, Universe};
use rst::schemas::{self, SchemaId, Theory};
use rst::syntax::{closure, var, Variable};

fn decode(n: u64) -> HfSet {
    hfset::make_set((0..64).filter(|i| n >> i & 1 == 1).map(decode))
}

fn distinct_tuple(len: usize) -> impl Strategy<Value = Vec<Variable>> {
    proptest::sample::subsequence((1u32..=16).collect::<Vec<_>>(), len)
        .prop_shuffle()
        .prop_map(|v| v.into_iter().map(var).collect())
}

fn fixed_schema() -> impl Strategy<Value = SchemaId> {
    prop_oneof![
        Just(SchemaId::A1),
        Just(SchemaId::A3),
        Just(SchemaId::A4),
        Just(SchemaId::A5),
        Just(SchemaId::A6),
        (1usize..=6).prop_map(SchemaId::e),
    ]
}

proptest! {
    #[test]
    fn classify_inverts_instantiate(id in fixed_schema(), seed in distinct_tuple(7)) {
        let th = Theory::rst_ext();
        let arity = schemas::placeholders(&th.template(&id).unwrap()).len();
        let tuple = &seed[..arity];
        let inst = th.instantiate(&id, tuple, None).unwrap();
        let m = th.classify(&inst).unwrap();
        prop_assert_eq!(m.id, id);
        prop_assert_eq!(m.tuple, tuple.to_vec());
    }

    #[test]
    fn a2_round_trip_with_payload(seed in distinct_tuple(3), payload in base_formula(16, 2)) {
        let th = Theory::rst();
        let (u, x) = (seed[0], seed[1]);
        prop_assume!(!payload.all_vars().contains(&u) && !payload.all_vars().contains(&x));
        let inst = th.instantiate(&SchemaId::A2, &seed, Some(&payload)).unwrap();
        let m = th.classify(&inst).unwrap();
        prop_assert_eq!(m.id, SchemaId::A2);
        prop_assert_eq!(m.payload, Some(payload));
        prop_assert!(!m.relaxed);
    }

    #[test]
    fn elaboration_agrees_where_defined(f in ext_formula(3, 3)) {
        let g = closure(&f);
        let base = elaborate_to_base(&Theory::rst_ext(), &g).unwrap();
        prop_assert!(base.is_base());
        let u = Universe::stage(2).unwrap();
        if let Some(b) = eval_extended(&u, &g, &Env::new()).unwrap().as_bool() {
            prop_assert_eq!(eval(&u, &base, &Env::new()).unwrap(), b);
        }
    }

    #[test]
    fn transitivity_characterizations_agree(n in 0u64..(1 << 16)) {
        let a = decode(n);
        let t = hfset::is_transitive(&a);
        prop_assert_eq!(t, hfset::subset(&hfset::union_of(&a), &a));
        prop_assert_eq!(t, hfset::tc(&a) == a);
        prop_assert_eq!(t, hfset::subset(&a, &hfset::power_set(&a).unwrap()));
        prop_assert!(!hfset::tc(&a).contains(&a));
    }

    #[test]
    fn ordinals_of_transitive_closures(n in 0u64..(1 << 16)) {
        let t = hfset::tc(&decode(n));
        let gamma = hfset::ordinals_in(&t).unwrap();
        prop_assert!(hfset::is_ordinal(&gamma));
        let subsets = hfset::power_set(&t).unwrap();
        let among = hfset::make_set(subsets.elements().iter().filter(|s| hfset::is_ordinal(s)).cloned());
        prop_assert_eq!(hfset::successor(&gamma), among);
    }
}

#[test]
fn stage_sizes_follow_the_exponential_recurrence() {
    let mut n = 0usize;
    for k in 0..=hfset::MAX_STAGE {
        assert_eq!(Universe::stage(k).unwrap().len(), n);
        n = 1usize.checked_shl(n as u32).unwrap_or(usize::MAX);
    }
    assert!(Universe::stage(hfset::MAX_STAGE + 1).is_err());
}
