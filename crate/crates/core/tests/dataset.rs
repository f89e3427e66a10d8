use proptest::prelude::*;
use std::io::Write;
use trimweight::dataset::{load_csv_with, read_csv};
use trimweight::{load_csv, Dataset, Error};

fn rows() -> impl Strategy<Value = Vec<(bool, f64, f64, f64)>> {
    prop::collection::vec((any::<bool>(), -1e6..1e6f64, -1e3..1e3f64, -1e-3..1e-3f64), 2..40)
        .prop_filter("both arms", |v| v.iter().any(|r| r.0) && v.iter().any(|r| !r.0))
}

proptest! {
    #[test]
    fn csv_round_trip(data in rows()) {
        let a: Vec<u8> = data.iter().map(|r| u8::from(r.0)).collect();
        let y: Vec<f64> = data.iter().map(|r| r.1).collect();
        let x: Vec<Vec<f64>> = data.iter().map(|r| vec![r.2, r.3]).collect();
        let d = Dataset::from_covariates(a, y, &x, vec!["u".into(), "v".into()]).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf, "treat", "y").unwrap();
        let back = read_csv(buf.as_slice(), "treat", Some("y")).unwrap();
        prop_assert_eq!(back.treatment(), d.treatment());
        prop_assert_eq!(back.covariate_names(), d.covariate_names());
        for (p, q) in back.outcome().iter().zip(d.outcome()).chain(back.design().iter().zip(d.design())) {
            prop_assert!((p - q).abs() <= 1e-15 * q.abs().max(1e-300));
        }
    }
}

#[test]
fn loads_from_disk() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "id,age,treated,score").unwrap();
    writeln!(f, "1, 34, 1, 2.5").unwrap();
    writeln!(f, "2, 51, 0, 1.0").unwrap();
    writeln!(f, "3, 29, 1, 3.0").unwrap();
    let d = load_csv(f.path(), "treated", "score").unwrap();
    assert_eq!(d.n(), 3);
    assert_eq!(d.p(), 3);
    assert_eq!(d.covariate_names(), ["(intercept)", "id", "age"]);
    assert_eq!(d.row(1), [1.0, 2.0, 51.0]);

    let no_outcome = load_csv_with(f.path(), "treated", None).unwrap();
    assert_eq!(no_outcome.p(), 4);
    assert!(no_outcome.outcome().iter().all(|&y| y == 0.0));

    assert!(matches!(load_csv(f.path(), "arm", "score"), Err(Error::MissingColumn(c)) if c == "arm"));
    assert!(load_csv("/nonexistent/file.csv", "treated", "score").unwrap_err().is_validation());
}
