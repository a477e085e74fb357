use pinchcert_web::{beta_sweep_points, certify_document, constants_table, params};

#[test]
fn blank_fields_use_printed_defaults() {
    let p = params(4, "", "", "", "", false, false).unwrap();
    assert_eq!(p, params(4, "0.15", "1", "1", "0.5", false, false).unwrap());
    assert!(params(7, "", "1", "1", "1", false, false).is_err());
    assert!(params(4, "abc", "", "", "", false, false).is_err());
}

#[test]
fn certificate_documents() {
    let json = certify_document(4, "", "", "", "", false, false, "json").unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["verdict"], "pass");
    let md = certify_document(5, "", "", "", "", false, false, "markdown").unwrap();
    assert!(md.contains("first failing condition: C9"));
    assert!(certify_document(4, "", "", "", "", false, false, "pdf").is_err());
}

#[test]
fn constants_rows_carry_flags() {
    let rows: serde_json::Value = serde_json::from_str(&constants_table(5, "1/1000", "", "", "").unwrap()).unwrap();
    let eta = rows.as_array().unwrap().iter().find(|r| r["symbol"] == "eta").unwrap();
    assert_eq!(eta["exact"], "6256175/7014007");
    assert_eq!(eta["published"]["matches"], false);
}

#[test]
fn sweep_crosses_zero_at_printed_beta() {
    let pts = beta_sweep_points(4, "", "", "", "0", "1", 4).unwrap();
    assert_eq!(pts.len(), 5);
    assert_eq!(pts[2].beta, "1/2");
    assert_eq!(pts[2].det, "0");
    assert_eq!(pts[2].classification, "PositiveSemidefiniteSingular");
    assert!(pts[1].det_f64 > 0.0 && pts[3].det_f64 < 0.0);
    assert!(pts.windows(2).all(|w| w[0].det_f64 > w[1].det_f64));
    assert!(beta_sweep_points(4, "", "", "", "1", "0", 4).is_err());
    assert!(beta_sweep_points(4, "1", "", "", "0", "1", 4).is_err());
}
