//! Replays every checked-in fuzz seed through its harness body.

use std::path::Path;

#[path = "../../../fuzz/src/lib.rs"]
mod harness;

#[test]
fn corpus_seeds_pass_their_harness() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut replayed = 0;
    for (name, body) in harness::TARGETS {
        let dir = root.join(name);
        let seeds: Vec<_> = std::fs::read_dir(&dir)
            .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
            .map(|entry| entry.unwrap().path())
            .collect();
        assert!(!seeds.is_empty(), "no seeds for {name}");
        for seed in seeds {
            body(&std::fs::read(&seed).unwrap());
            replayed += 1;
        }
    }
    assert!(replayed >= harness::TARGETS.len());
}

#[test]
fn targets_match_the_fuzz_directory() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/fuzz_targets");
    let mut on_disk: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path().file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    on_disk.sort();
    let listed: Vec<&str> = harness::TARGETS.iter().map(|(n, _)| *n).collect();
    assert_eq!(on_disk, listed);
}

#[test]
fn hostile_inputs_do_not_panic() {
    let deep = "(x".repeat(50_000) + "y" + &")".repeat(50_000);
    let inputs: Vec<Vec<u8>> = vec![
        deep.into_bytes(),
        vec![0xff, 0xfe, 0x00],
        b"l1^65535*l1^65535".to_vec(),
        b"f1 = 1/0".to_vec(),
        b"x(99999999999999999999999)".to_vec(),
        b"{\"schema_version\": 1e400}".to_vec(),
        "gf:18446744073709551617".as_bytes().to_vec(),
        b"0..0".to_vec(),
    ];
    for input in &inputs {
        for (_, body) in harness::TARGETS {
            body(input);
        }
    }
}

mod random_text {
    use super::harness;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn words(s in "[bxy'′() ]{0,40}") {
            harness::word_parse(s.as_bytes());
        }

        #[test]
        fn polys(s in "[lmxy0-9()*^/+− -]{0,48}") {
            harness::poly_parse(s.as_bytes());
        }

        #[test]
        fn systems(s in "(f[0-9]{1,2} ?= ?)?[abclm0-9*^+ -]{0,24}(;|#.{0,4})?(\n[abc0-9*^+ -]{0,16}){0,3}") {
            harness::reference_parse(s.as_bytes());
            harness::system_input(s.as_bytes());
        }

        #[test]
        fn flags(s in "(gf:|GF\\(|q|Dp|dp|lp)?[0-9.=-]{0,10}\\)?") {
            harness::flag_parse(s.as_bytes());
        }

        #[test]
        fn bytes(data in prop::collection::vec(any::<u8>(), 0..64)) {
            for (_, body) in harness::TARGETS {
                body(&data);
            }
        }
    }
}
