use serde_json::Value;
use topoderiv_web::{disk_expansion_json, polygon_moments_json, potential_profile_json};

#[test]
fn profile_matches_closed_form() {
    let v: Value = serde_json::from_str(&potential_profile_json(2, 3.0, 30).unwrap()).unwrap();
    for row in v["rows"].as_array().unwrap() {
        let q = row["quadrature"].as_f64().unwrap();
        let c = row["closed_form"].as_f64().unwrap();
        assert!((q - c).abs() < 1e-9, "{row}");
        if let Some(pm) = row["point_mass"].as_f64() {
            assert!((pm - c).abs() < 1e-9 * c.abs().max(1.0));
        }
    }
    assert!(potential_profile_json(4, 3.0, 30).is_err());
}

#[test]
fn square_moments() {
    let v: Value = serde_json::from_str(&polygon_moments_json("[[-1,-1],[1,-1],[1,1],[-1,1]]", 2).unwrap()).unwrap();
    assert!((v["measure"].as_f64().unwrap() - 4.0).abs() < 1e-14);
    assert_eq!(v["symmetric"], true);
    let off = polygon_moments_json("[[0.5,0.5],[1,0.5],[1,1]]", 2);
    assert!(off.is_err());
}

#[test]
fn coarse_disk_expansion() {
    let v: Value = serde_json::from_str(&disk_expansion_json("H1", 33, 3.0, 1.0).unwrap()).unwrap();
    let d4 = v["ledger"]["entries"].as_array().unwrap().iter().find(|e| e["k"] == 4).unwrap()["coeff"].as_f64().unwrap();
    assert_eq!(d4, -2.0);
    assert_eq!(v["sweep"].as_array().unwrap().len(), 5);
    assert!(disk_expansion_json("H2", 33, 3.0, 1.0).is_err());
}
