use poisson_lab::fields::Local;
use poisson_lab::gallery::{self, EntryKind};
use poisson_lab::structure::Structure;
use poisson_lab::submersion::SubmersionSpec;
use poisson_lab::{load_structure, Error, LoadOptions};

#[test]
fn every_entry_loads_and_validates() {
    let ids = gallery::list();
    assert_eq!(ids.len(), 27);
    for id in &ids {
        let e = gallery::get(id).unwrap();
        assert!(!e.summary.is_empty());
        match &e.kind {
            EntryKind::Structure(s) => s.validate(e.load_options()).unwrap_or_else(|err| panic!("{id}: {err}")),
            EntryKind::Submersion(sub) => sub.validate(e.load_options()).unwrap_or_else(|err| panic!("{id}: {err}")),
        }
    }
}

#[test]
fn exported_text_reloads_to_the_same_structure() {
    for id in gallery::list() {
        let e = gallery::get(&id).unwrap();
        let EntryKind::Structure(s) = &e.kind else { continue };
        let again = Structure::parse(&s.to_text()).unwrap_or_else(|err| panic!("{id}: {err}"));
        assert_eq!(again.name, s.name);
        assert_eq!(again.coords, s.coords);
        for p in s.sample_points(8, 4) {
            let a = Local::new(s, &p).unwrap();
            let b = Local::new(&again, &p).unwrap();
            assert_eq!(a.pi_values(), b.pi_values(), "{id}");
            assert_eq!(a.g_values(), b.g_values(), "{id}");
            assert_eq!(a.j_values(), b.j_values(), "{id}");
        }
    }
}

#[test]
fn submersion_entries_round_trip() {
    for id in gallery::list() {
        let EntryKind::Submersion(sub) = gallery::get(&id).unwrap().kind else { continue };
        let again = SubmersionSpec::parse(&sub.to_text(), &gallery::structure).unwrap();
        assert_eq!(again.map.len(), sub.map.len(), "{id}");
    }
}

#[test]
fn non_poisson_entry_needs_the_override() {
    let e = gallery::get("nonpoisson_demo").unwrap();
    assert!(e.requires_override);
    assert!(matches!(
        load_structure(&e.text, LoadOptions::default()),
        Err(Error::Validation { ref check, .. }) if check == "jacobi"
    ));
    assert!(load_structure(&e.text, LoadOptions { allow_non_poisson: true }).is_ok());
}

#[test]
fn euclid_family_is_parameterised() {
    let s = gallery::structure("euclid_rn_rs:6,3,5").unwrap();
    assert_eq!(s.dim, 6);
    assert_eq!(s.casimirs.len(), 4);
    assert_eq!(gallery::structure("euclid_rn_rs").unwrap().dim, 3);
    for bad in ["euclid_rn_rs:3,1,1", "euclid_rn_rs:3,1,4", "euclid_rn_rs:x", "euclid_rn_rs3", "nope"] {
        assert!(matches!(gallery::get(bad), Err(Error::UnknownEntry(_))), "{bad}");
    }
}

#[test]
fn kinds_are_not_interchangeable() {
    assert!(gallery::submersion("so3_euclid").is_err());
    assert!(gallery::structure("r4_to_r3").is_err());
}

#[test]
fn written_endomorphism_differs_from_the_canonical_one() {
    // at (0,0,1) the canonical J is Π itself; the written one has a single entry
    let d = gallery::written_j_deviation("so3_reg_conformal", &[0.0, 0.0, 1.0]).unwrap().unwrap();
    assert_eq!(d, (2.0, 2.0));
    let jw = gallery::written_j("sl2_reg_conformal", &[1.0, 2.0, 3.0]).unwrap();
    assert_eq!((jw[(1, 0)], jw[(0, 2)], jw[(2, 1)]), (-3.0, 2.0, -1.0));
    assert!(gallery::written_j("so3_euclid", &[0.0, 0.0, 1.0]).is_none());
}
