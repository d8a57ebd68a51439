use std::collections::BTreeSet;

use xsdbind_core::analyzer::{analyze_corpus, Document};
use xsdbind_core::loader::{load_schema_set, MemoryResolver, SchemaSource};
use xsdbind_core::pipeline::binding_components;
use xsdbind_core::simplify::{compute_retained_set, render_reduced_schemas};
use xsdbind_harness::synth::Suite;
use xsdbind_harness::{fixtures, fixtures_root};
use xsdbind_runtime::Mode;

fn retained_names(suite: &Suite) -> BTreeSet<String> {
    let schema = load_schema_set(
        &[SchemaSource::new("s.xsd", suite.xsd())],
        &MemoryResolver::new(),
    )
    .unwrap();
    let docs: Vec<Document> = suite
        .documents
        .iter()
        .map(|(n, t)| Document::new(n.clone(), t.clone()))
        .collect();
    let (usage, fails) = analyze_corpus(&schema, &docs, Mode::Strict);
    assert!(fails.is_empty(), "{fails:?}");
    let kept = compute_retained_set(&schema, &usage).unwrap();
    schema
        .user_globals()
        .filter(|c| kept.contains(&c.id))
        .map(|c| c.name.as_ref().unwrap().local.clone())
        .collect()
}

#[test]
fn large_suites_match_the_generator_oracle() {
    for seed in 0..50 {
        let s = Suite::generate(seed, 25, 75, 5);
        assert_eq!(retained_names(&s), s.oracle_closure(), "seed {seed}");
    }
}

#[test]
fn reduced_schema_reloads_to_the_same_reduction() {
    for seed in 0..100u64 {
        let used = 2 + (seed as usize % 12);
        let s = Suite::generate(seed, used, (seed as usize * 7) % (31 - used), 3);
        let schema = load_schema_set(
            &[SchemaSource::new("s.xsd", s.xsd())],
            &MemoryResolver::new(),
        )
        .unwrap();
        let docs: Vec<Document> = s
            .documents
            .iter()
            .map(|(n, t)| Document::new(n.clone(), t.clone()))
            .collect();
        let (usage, _) = analyze_corpus(&schema, &docs, Mode::Strict);
        let kept = compute_retained_set(&schema, &usage).unwrap();
        let files = render_reduced_schemas(&schema, &kept).unwrap();
        assert_eq!(files.len(), 1);
        let again = load_schema_set(
            &[SchemaSource::new("r.xsd", files[0].text.clone())],
            &MemoryResolver::new(),
        )
        .unwrap();
        let (u2, f2) = analyze_corpus(&again, &docs, Mode::Strict);
        assert!(f2.is_empty(), "{seed}: {f2:?}");
        let k2 = compute_retained_set(&again, &u2).unwrap();
        assert_eq!(
            again.user_globals().count(),
            s.oracle_closure().len(),
            "{seed}"
        );
        assert_eq!(
            render_reduced_schemas(&again, &k2).unwrap()[0].text,
            files[0].text,
            "{seed}"
        );
    }
}

#[test]
fn bound_classes_and_fields_come_from_the_component_set() {
    for fx in fixtures::FIXTURES {
        let loaded = fx.load(&fixtures_root()).unwrap();
        for v in fx.variants() {
            let usage = if v.saturated {
                xsdbind_core::analyzer::saturated_usage(&loaded.schema)
            } else {
                loaded.usage.clone()
            };
            let set: BTreeSet<String> = binding_components(&loaded.schema, &usage, &v.options)
                .unwrap()
                .into_iter()
                .map(|id| loaded.schema.key(id).to_string())
                .collect();
            let model = v.bind(&loaded, "m").unwrap();
            for c in &model.classes {
                assert!(
                    set.contains(&c.source_type),
                    "{}/{}: class {} from {}",
                    fx.name,
                    v.name,
                    c.name,
                    c.source_type
                );
                for f in &c.fields {
                    let owner = f.source.split('#').next().unwrap();
                    assert!(
                        set.contains(owner),
                        "{}/{}: {}.{} from {}",
                        fx.name,
                        v.name,
                        c.name,
                        f.name,
                        f.source
                    );
                }
            }
        }
    }
}
