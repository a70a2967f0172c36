use proptest::prelude::*;
use weyl_cli::doc::{CircuitDocument, MatrixDocument};
use weyl_core::verify::random_circuit;
use weyl_core::{haar_random_u4, BaseGate};

fn base_from(kind: u8, angle: f64, seed: u64) -> BaseGate {
    match kind % 4 {
        0 => BaseGate::Controlled { gamma: angle },
        1 => BaseGate::SuperControlled { alpha2: angle / 2.0 },
        2 => BaseGate::MirroredControlled { gamma: angle },
        _ => BaseGate::Custom(haar_random_u4(seed)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circuit_documents_roundtrip_exactly(
        kind in 0u8..4, angle in 0.01f64..1.5, n in 0usize..5, seed in any::<u64>(), phase in -10.0f64..10.0,
        with_override in any::<bool>(),
    ) {
        let mut c = random_circuit(&base_from(kind, angle, seed), n, seed);
        c.phase = phase;
        if with_override && n > 0 {
            c.overrides = vec![None; n];
            c.overrides[0] = Some(base_from(kind + 1, angle, seed ^ 1));
        }
        let text = serde_json::to_string(&CircuitDocument::from_circuit(&c)).unwrap();
        let back: CircuitDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_circuit(Some(1e-10)).unwrap(), c);
    }

    #[test]
    fn matrix_documents_roundtrip_exactly(seed in any::<u64>()) {
        let m = haar_random_u4(seed);
        let text = serde_json::to_string_pretty(&MatrixDocument::from_mat4(&m)).unwrap();
        let back: MatrixDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_mat4(Some(1e-10)).unwrap(), m);
    }
}
