use std::ffi::{CStr, CString};
use std::ptr;

use eginv_ffi::*;

fn fixture(name: &str) -> CString {
    let p = format!("{}/../core/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    CString::new(p).unwrap()
}

fn last_error() -> String {
    let p = eg_last_error();
    if p.is_null() {
        String::new()
    } else {
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }
}

#[test]
fn solve_three_by_three_fixture() {
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(eg_dataset_from_file(fixture("triangular3.json").as_ptr(), &mut ds), EgStatus::Ok);
        let (mut kind, mut p, mut q) = (EgInstance::Sequence, 0usize, 0usize);
        assert_eq!(eg_dataset_info(ds, &mut kind, &mut p, &mut q), EgStatus::Ok);
        assert_eq!((kind, p, q), (EgInstance::Matrix, 3, 3));

        let mut res = [f64::NAN; 6];
        let mut all = 0;
        assert_eq!(eg_check(ds, 0.0, res.as_mut_ptr(), &mut all), EgStatus::Ok);
        assert_eq!(all, 1);
        assert!(res.iter().all(|r| *r < 1e-12));

        let want = [[1.0, 2.0, 0.0], [0.0, 1.0, 2.0], [0.0, 0.0, 1.0]];
        for method in [EgMethod::Canonical, EgMethod::General, EgMethod::Auto] {
            let mut g = ptr::null_mut();
            let mut inc = [f64::NAN; 4];
            assert_eq!(eg_solve(ds, method, 0.0, &mut g, inc.as_mut_ptr()), EgStatus::Ok, "{}", last_error());
            assert!(inc.iter().all(|r| *r < 1e-12));
            for i in 0..3 {
                for j in 0..3 {
                    let (mut re, mut im) = (0.0, 0.0);
                    assert_eq!(eg_element_entry(g, 0, i, j, &mut re, &mut im), EgStatus::Ok);
                    assert!((re - want[i][j]).abs() < 1e-12 && im.abs() < 1e-12);
                }
            }
            let mut r2 = [f64::NAN; 2];
            assert_eq!(eg_invert(ds, g, 0.0, r2.as_mut_ptr()), EgStatus::Ok);
            assert!(r2[0] < 1e-12 && r2[1] < 1e-12);
            eg_element_free(g);
        }
        eg_dataset_free(ds);
    }
}

#[test]
fn singular_diagonal_is_refused() {
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(eg_dataset_from_file(fixture("singular2.json").as_ptr(), &mut ds), EgStatus::Ok);
        let mut g = ptr::null_mut();
        assert_eq!(eg_solve(ds, EgMethod::General, 0.0, &mut g, ptr::null_mut()), EgStatus::Refused);
        assert!(g.is_null());
        assert!(last_error().contains("a0 is singular"));
        eg_dataset_free(ds);
    }
}

#[test]
fn parse_errors_and_nulls() {
    unsafe {
        let mut ds = ptr::null_mut();
        let bad = CString::new("{\"format\": \"eginv-dataset/1\", \"instance\": \"matrix\"}").unwrap();
        assert_eq!(eg_dataset_from_json(bad.as_ptr(), &mut ds), EgStatus::ParseError);
        assert!(last_error().contains("missing field \"p\""));
        assert!(ds.is_null());
        assert_eq!(eg_dataset_from_json(ptr::null(), &mut ds), EgStatus::NullArgument);
        assert_eq!(eg_check(ptr::null(), 0.0, ptr::null_mut(), ptr::null_mut()), EgStatus::NullArgument);
        eg_dataset_free(ptr::null_mut());
        eg_element_free(ptr::null_mut());
        eg_string_free(ptr::null_mut());
    }
}

#[test]
fn generated_sequence_round_trip() {
    unsafe {
        let (mut ds, mut g0) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(eg_generate(EgInstance::Sequence, 2, 3, 3, 11, &mut ds, &mut g0), EgStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(eg_dataset_to_json(ds, &mut text), EgStatus::Ok);
        let mut ds2 = ptr::null_mut();
        assert_eq!(eg_dataset_from_json(text, &mut ds2), EgStatus::Ok);
        eg_string_free(text);

        let mut g = ptr::null_mut();
        assert_eq!(eg_solve(ds2, EgMethod::General, 0.0, &mut g, ptr::null_mut()), EgStatus::Ok, "{}", last_error());
        for j in 0..=3 {
            for r in 0..2 {
                for c in 0..3 {
                    let (mut a, mut b, mut x, mut y) = (0.0, 0.0, 0.0, 0.0);
                    assert_eq!(eg_element_entry(g, j, r, c, &mut a, &mut b), EgStatus::Ok);
                    assert_eq!(eg_element_entry(g0, j, r, c, &mut x, &mut y), EgStatus::Ok);
                    assert!((a - x).abs() < 1e-10 && (b - y).abs() < 1e-10);
                }
            }
        }
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(eg_element_entry(g, 0, 2, 0, &mut re, &mut im), EgStatus::InvalidArgument);
        let mut gt = ptr::null_mut();
        assert_eq!(eg_element_to_json(g, &mut gt), EgStatus::Ok);
        assert!(CStr::from_ptr(gt).to_str().unwrap().contains("eginv-element/1"));
        eg_string_free(gt);
        for h in [g, g0] {
            eg_element_free(h);
        }
        eg_dataset_free(ds);
        eg_dataset_free(ds2);
    }
}

#[test]
fn matrix_generation_rejects_rectangular() {
    unsafe {
        let (mut ds, mut g) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(eg_generate(EgInstance::Matrix, 2, 3, 0, 1, &mut ds, &mut g), EgStatus::InvalidArgument);
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(eg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
