use std::path::Path;

use worksworld::benchgen;
use worksworld::config::{load_config, parse_config, serialize_config, ConfigDocument};
use worksworld::grounding::ground;
use worksworld::model::ResourceKind;
use worksworld::pipeline::{read_instance, solve, PipelineOptions, Verdict};
use worksworld::Q;

fn example(name: &str) -> worksworld::model::ProblemInstance {
    read_instance(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)).unwrap()
}

#[test]
fn shipped_two_wfc_config_grounds_like_the_generator() {
    let inst = example("two_wfc_one_site.yaml");
    let s = ground(&inst).stats();
    assert_eq!((s.f, s.x, s.a), (22, 7, 14));
    let g = ground(&benchgen::table4_instance(2, 1)).stats();
    assert_eq!((s.init_facts, s.init_values), (g.init_facts, g.init_values));
}

#[test]
fn shipped_configs_solve() {
    for name in ["two_wfc_one_site.yaml", "edge_to_cloud.yaml"] {
        let run = solve(&example(name), &PipelineOptions::default());
        assert_eq!(run.verdict, Verdict::Solved, "{name}: {:?}", run.detail);
    }
}

#[test]
fn default_storage_unit_applies_to_bare_numbers() {
    let inst = example("two_wfc_one_site.yaml");
    assert_eq!(inst.interface("dsi1").unwrap().total[ResourceKind::Storage], Q::int(10240));
    assert_eq!(inst.link("l1").unwrap().total_bw, Q::int(1024));
    assert_eq!(inst.link("l1").unwrap().latency, Q::new(1, 2000));
}

#[test]
fn generated_documents_round_trip() {
    for inst in [benchgen::table4_instance(4, 3), benchgen::gen_complex(2, 1).unwrap(), benchgen::gen_random_small(7)] {
        let text = serialize_config(&ConfigDocument::from_instance(&inst));
        let back = load_config(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(serialize_config(&parse_config(&text).unwrap()), text);
    }
}

#[test]
fn errors_carry_positions() {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/two_wfc_one_site.yaml")).unwrap();
    let bad = text.replace("bandwidth: 1 GB/s", "bandwidth: 1 GB/fortnight");
    let e = load_config(&bad).unwrap_err();
    assert!(e.line.is_some(), "{e}");
    assert!(e.message.contains("bandwidth"), "{e}");
    let dup = text.replace("id: cleaner", "id: sensor");
    let e = load_config(&dup).unwrap_err();
    assert!(e.message.contains("duplicate id"), "{e}");
}
