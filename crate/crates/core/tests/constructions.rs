use oddcox::chambers::{bounding_reflections, is_coxeter_polytope, ChamberSet};
use oddcox::constructor::{
    check_certificate, construct, construct_single_multiple_edge, Certificate, CertificateFile, Construction, Provenance,
};
use oddcox::criterion::Verdict;
use oddcox::diagrams::{CoxeterMatrix, Order, INF};
use oddcox::words::{CoxeterGroup, Word};

fn build(m: &CoxeterMatrix) -> Certificate {
    match construct(m).unwrap() {
        Construction::Certificate(c) => *c,
        Construction::NoSubgroup(v) => panic!("{m} has no subgroup: {v:?}"),
    }
}

/// Checks every claim of a certificate independently of how it was built.
fn audit(m: &CoxeterMatrix, cert: &Certificate) {
    assert!(cert.verified, "{m}");
    assert!(cert.tiling.is_tiling(), "{m}");
    assert_eq!(cert.index, cert.chambers.len());
    assert_eq!(cert.tiling.index, Some(cert.index));
    assert!(cert.chambers.contains(&Word::empty()));
    let g = CoxeterGroup::new(m.clone());
    assert!(cert.chambers.is_connected(&g).unwrap());
    assert!(is_coxeter_polytope(&g, &cert.chambers).unwrap().is_polytope());
    let walls = bounding_reflections(&g, &cert.chambers).unwrap();
    assert_eq!(walls.len(), cert.generators.len());
    for r in &cert.generators {
        assert_eq!(r.word.len() % 2, 1, "{}", r.word);
        assert!(g.multiply(&r.word, &r.word).unwrap().is_empty());
        assert_eq!(g.normal_form(&r.word).unwrap(), r.word);
    }
    let file = CertificateFile::parse(&cert.to_text()).unwrap();
    let check = check_certificate(m, &file, None).unwrap();
    assert!(check.passed(), "{:?}", check.problems);
}

#[test]
fn five_five_three_triangles() {
    for (a, b, c, index) in [(3u32, 5u32, 5u32, 18usize), (9, 5, 5, 54), (3, 25, 35, 18), (15, 5, 5, 90)] {
        let m = CoxeterMatrix::triangle(a, b, c).unwrap();
        let cert = build(&m);
        assert_eq!(cert.provenance, Provenance::Rotation553);
        assert_eq!(cert.index, index, "({a},{b},{c})");
        audit(&m, &cert);
    }
}

#[test]
fn single_multiple_edge() {
    let cases = [
        CoxeterMatrix::triangle(5, INF, INF).unwrap(),
        CoxeterMatrix::triangle(7, 3, 3).unwrap(),
        CoxeterMatrix::triangle(3, 3, 3).unwrap(),
        CoxeterMatrix::triangle(INF, INF, INF).unwrap(),
        CoxeterMatrix::from_upper(2, [Order::Finite(9)]).unwrap(),
        CoxeterMatrix::from_upper(4, [3.into(), 5.into(), INF, 3.into(), INF, 9.into()]).unwrap(),
    ];
    for m in cases {
        let cert = build(&m);
        let connected = oddcox::diagrams::divisibility_diagram(&m).is_connected();
        let expected = if connected { Provenance::DihedralStar } else { Provenance::FreeFactorLift };
        assert_eq!(cert.provenance, expected, "{m}");
        audit(&m, &cert);
    }
}

#[test]
fn dihedral_star_sizes() {
    // residue of 10, plus s3 after each of its 5 even elements
    let m = CoxeterMatrix::triangle(5, INF, INF).unwrap();
    let cert = construct_single_multiple_edge(&m).unwrap();
    assert_eq!(cert.index, 15);
    audit(&m, &cert);
    // the dispatcher lifts the half-cycle of the component {1, 2} instead
    assert_eq!(build(&m).index, 5);

    let m = CoxeterMatrix::from_upper(2, [Order::Finite(9)]).unwrap();
    assert_eq!(build(&m).index, 9);
    let m = CoxeterMatrix::triangle(3, 3, 3).unwrap();
    assert_eq!(build(&m).index, 9);
    let m = CoxeterMatrix::triangle(7, 3, 3).unwrap();
    assert_eq!(build(&m).index, 21);
}

#[test]
fn five_five_three_inside_a_larger_component() {
    let mut m = CoxeterMatrix::free(4).unwrap();
    m.set(0, 1, 3.into()).unwrap();
    m.set(0, 2, 5.into()).unwrap();
    m.set(1, 2, 5.into()).unwrap();
    m.set(0, 3, 3.into()).unwrap();
    let cert = build(&m);
    assert_eq!(cert.provenance, Provenance::Extended553);
    audit(&m, &cert);
}

#[test]
fn free_products_lift_a_factor() {
    let mut m = CoxeterMatrix::free(4).unwrap();
    m.set(0, 1, 5.into()).unwrap();
    m.set(0, 2, 5.into()).unwrap();
    m.set(1, 2, 3.into()).unwrap();
    let cert = build(&m);
    assert_eq!(cert.index, 18);
    audit(&m, &cert);

    // (5,5,5) has nothing, so the isolated vertex carries the subgroup
    let mut m = CoxeterMatrix::free(4).unwrap();
    m.set(0, 1, 5.into()).unwrap();
    m.set(0, 2, 5.into()).unwrap();
    m.set(1, 2, 5.into()).unwrap();
    let cert = build(&m);
    assert_eq!(cert.index, 2);
    assert_eq!(cert.chambers.members(), &[Word::empty(), Word::generator(3)]);
    audit(&m, &cert);
}

#[test]
fn no_subgroup_is_reported() {
    for m in [
        CoxeterMatrix::triangle(5, 5, 5).unwrap(),
        CoxeterMatrix::triangle(7, 5, 3).unwrap(),
        CoxeterMatrix::triangle(5, 5, INF).unwrap(),
    ] {
        match construct(&m).unwrap() {
            Construction::NoSubgroup(Verdict::NoSubgroup { forbidden }) => assert_eq!(forbidden.len(), 1),
            other => panic!("{m}: {other:?}"),
        }
    }
}

#[test]
fn tampered_certificates_fail() {
    let m = CoxeterMatrix::triangle(3, 5, 5).unwrap();
    let cert = build(&m);
    let good = CertificateFile::parse(&cert.to_text()).unwrap();

    let mut fewer = good.clone();
    fewer.chambers.pop();
    fewer.index -= 1;
    assert!(!check_certificate(&m, &fewer, None).unwrap().passed());

    let mut wrong_index = good.clone();
    wrong_index.index += 1;
    assert!(!check_certificate(&m, &wrong_index, None).unwrap().passed());

    let mut wrong_generator = good.clone();
    wrong_generator.generators[0] = Word::generator(0);
    if !cert.generators.iter().any(|r| r.word == Word::generator(0)) {
        assert!(!check_certificate(&m, &wrong_generator, None).unwrap().passed());
    }

    let other = CoxeterMatrix::triangle(5, 5, 5).unwrap();
    assert!(!check_certificate(&other, &good, None).unwrap().passed());
    let bigger = CoxeterMatrix::triangle(9, 5, 5).unwrap();
    assert!(!check_certificate(&bigger, &good, None).unwrap().passed());
}

#[test]
fn ball_and_residue_checks_agree() {
    let m = CoxeterMatrix::triangle(3, 5, 5).unwrap();
    let cert = build(&m);
    let file = CertificateFile::parse(&cert.to_text()).unwrap();
    let ball = check_certificate(&m, &file, Some(10)).unwrap();
    assert!(ball.passed(), "{:?}", ball.problems);
    let g = CoxeterGroup::new(m.clone());
    let half = ChamberSet::new(&g, cert.chambers.members()[..9].iter().cloned()).unwrap();
    assert!(!oddcox::constructor::verify_domain(&g, &half, Some(10)).unwrap().passed());
    assert!(!oddcox::constructor::verify_domain(&g, &half, None).unwrap().passed());
}
