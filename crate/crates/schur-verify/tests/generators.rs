//! Generator soundness: every seeded draw must land inside the case
//! hypothesis it claims to satisfy, across all supported case/structure
//! pairings, including the boundary-probing draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schur_verify::domain::{gen_instance, random_structure, GenConfig};
use schur_verify::{check_hypothesis, CaseId, Structure};

fn pairings() -> Vec<(&'static str, &'static str, usize, u64)> {
    let mut out = Vec::new();
    for case in ["S2", "S3", "S3F", "S3V", "S3VG", "S4", "S5", "S6", "S7", "QEQ"] {
        out.push((case, "REAL_MUL", 1, 1000));
    }
    for structure in [
        "REAL_MUL",
        "VEC_DOT",
        "VEC_BILINEAR",
        "FUNC_QUAD",
        "MATMUL_COMMUTING",
        "FROBENIUS",
        "HADAMARD",
        "KRONECKER",
        "RKRONECKER",
    ] {
        let dim = if structure.contains("KRON") { 2 } else { 4 };
        out.push(("C3", structure, dim, 300));
    }
    for case in ["C3P", "R4", "R5"] {
        for structure in ["REAL_MUL", "MATMUL_COMMUTING", "HADAMARD"] {
            out.push((case, structure, 3, 300));
        }
    }
    out.push(("C3P", "KRONECKER", 2, 300));
    for case in ["R6", "R7"] {
        for structure in ["REAL_MUL", "MATMUL_COMMUTING"] {
            out.push((case, structure, 3, 300));
        }
    }
    out
}

#[test]
fn generated_instances_satisfy_their_hypotheses() {
    for (case, structure, dim, seeds) in pairings() {
        let id = CaseId::parse(case).unwrap();
        let mut srng = ChaCha8Rng::seed_from_u64(3);
        let s: Structure = random_structure(structure, dim, &mut srng).unwrap();
        let cfg = GenConfig {
            dim,
            ..Default::default()
        };
        for seed in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = gen_instance(id, &s, &cfg, &mut rng)
                .unwrap_or_else(|e| panic!("{case}/{structure} seed {seed}: {e}"));
            let h = check_hypothesis(id, &s, &inst, 1e-9)
                .unwrap_or_else(|e| panic!("{case}/{structure} seed {seed}: {e}"));
            assert!(
                h.satisfied,
                "{case}/{structure} seed {seed}: failed clauses {:?}",
                h.failed
            );
        }
    }
}

#[test]
fn generation_is_deterministic_per_seed() {
    let cfg = GenConfig {
        dim: 3,
        ..Default::default()
    };
    let s = Structure::MatmulCommuting;
    for seed in 0..50u64 {
        let a = gen_instance(
            CaseId::R5,
            &s,
            &cfg,
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap();
        let b = gen_instance(
            CaseId::R5,
            &s,
            &cfg,
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
