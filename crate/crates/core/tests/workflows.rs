use mhclass::catalog::{Catalog, SHIPPED_CORPUS};
use mhclass::geometry::Chain;
use mhclass::milnor::hirzebruch_milnor_report;
use mhclass::motivic::{lci_check_chain, Cycle, DecompositionWitness, Flavor};
use mhclass::transforms::{hirzebruch_class, milnor_transform};
use mhclass::{Rational, YPoly};

fn nodal_entry(cat: &Catalog) -> mhclass::milnor::SingularHypersurfaceData {
    cat.corpus(SHIPPED_CORPUS)
        .unwrap()
        .into_iter()
        .find(|d| d.name == "nodal cubic")
        .unwrap()
}

#[test]
fn shipped_witnesses_hold() {
    let cat = Catalog::shipped();
    assert!(!cat.witnesses().is_empty());
    for w in cat.witnesses() {
        let out = w.check(4).unwrap();
        assert!(out.holds, "{}", out.name);
    }
}

#[test]
fn milnor_report_ignores_decomposition_choice() {
    let cat = Catalog::shipped();
    let d = nodal_entry(&cat);
    let a = hirzebruch_milnor_report(&d, 5).unwrap();

    // [X -> X] itself, resolved through the attached resolution.
    let whole = Cycle::generator(d.decomposition.base().clone(), Flavor::Sm, Chain::identity(d.space.clone())).unwrap();
    let b = hirzebruch_milnor_report(&d.with_decomposition(whole).unwrap(), 5).unwrap();

    assert_eq!(a.chi_y, b.chi_y);
    assert_eq!(a.hirzebruch_milnor_degree, b.hirzebruch_milnor_degree);
    assert_eq!(a.classical_milnor_degree, b.classical_milnor_degree);
    assert_eq!(a.verdicts, b.verdicts);
}

#[test]
fn wrong_decomposition_is_caught_by_witness() {
    let cat = Catalog::shipped();
    let d = nodal_entry(&cat);
    let normalization = Cycle::generator(
        d.decomposition.base().clone(),
        Flavor::Sm,
        Chain::single(cat.morphism("nu_nodal").unwrap().clone()),
    )
    .unwrap();
    let w = DecompositionWitness::new("missing point", d.decomposition.clone(), normalization).unwrap();
    assert!(!w.check(4).unwrap().holds);
}

#[test]
fn lci_rejects_finite_modifications_and_singular_targets() {
    let cat = Catalog::shipped();
    for id in ["nu_nodal", "nu_cusp", "pt_nodal"] {
        let cert = lci_check_chain(&Chain::single(cat.morphism(id).unwrap().clone()));
        assert!(!cert.accepted, "{id}: {cert}");
        assert!(cert.obstruction.is_some());
    }
    let ok = cat.chain("P1", &["i_conic".into(), "c_P2".into()]).unwrap();
    let cert = lci_check_chain(&ok);
    assert!(cert.accepted, "{cert}");
    assert_eq!((cert.embedding_codim, cert.smooth_rel_dim), (1, 2));
}

#[test]
fn milnor_transform_sees_the_node() {
    let cat = Catalog::shipped();
    let nodal = cat.cycle("nodal_self").unwrap();
    let cubic = cat.cycle("cubic_self").unwrap();
    assert!(milnor_transform(cubic, 4).unwrap().is_zero());
    let mt = milnor_transform(nodal, 4).unwrap();
    assert!(!mt.is_zero());
    assert_eq!(mt.degree().eval(&Rational::from_int(-1)), Rational::one());
}

#[test]
fn singular_space_chi_y_via_resolution() {
    let cat = Catalog::shipped();
    let nodal = cat.self_cycle("nodal", Flavor::Sm).unwrap();
    let cusp = cat.self_cycle("cusp", Flavor::Sm).unwrap();
    assert_eq!(hirzebruch_class(&nodal, 4).unwrap().degree(), -YPoly::y());
    // Cuspidal cubic is homeomorphic to P1.
    assert_eq!(hirzebruch_class(&cusp, 4).unwrap().degree(), YPoly::from_ints(&[1, -1]));
}

#[test]
fn catalog_survives_a_file_round_trip() {
    let cat = Catalog::shipped();
    let dir = std::env::temp_dir().join(format!("mhclass-rt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("catalog.json");
    std::fs::write(&path, cat.to_json_string()).unwrap();
    let back = Catalog::load(&path).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(back.to_json_string(), cat.to_json_string());
    for (id, c) in cat.cycles() {
        assert!(back.cycle(id).unwrap().same_as(c).unwrap(), "{id}");
    }
}
