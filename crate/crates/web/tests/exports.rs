use serde_json::Value;
use streampack_web::{estimate_bins_json, generate_uniform_text, round_stream_json, tight_vsched_json};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn staircase_dominates() {
    let text = generate_uniform_text(3000, 0.0, 1.0, 3).unwrap();
    let v = parse(round_stream_json(&text, 0.2, "geometric").unwrap());
    let big: Vec<f64> = v["big"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let rounded: Vec<f64> = v["rounded"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(big.len(), rounded.len());
    assert!(big.iter().zip(&rounded).all(|(b, r)| r >= b));
    assert!(v["sigma"].as_u64().unwrap() < big.len() as u64);
}

#[test]
fn estimate_report() {
    let v = parse(estimate_bins_json("0.6\n0.6\n0.3\n0.1\n", 0.2, "geometric", "exact").unwrap());
    assert_eq!(v["estimate"]["bins"], 2);
    assert_eq!(v["size_lower_bound"], 2.0);
    assert!(estimate_bins_json("0.6\n", 0.5, "geometric", "gg").is_err());
    assert!(estimate_bins_json("0.6\n", 0.2, "geometric", "simplex").is_err());
    assert!(estimate_bins_json("oops\n", 0.2, "geometric", "gg").unwrap_err().contains("line 1"));
}

#[test]
fn tight_example_values() {
    let v = parse(tight_vsched_json(2, 0.25).unwrap());
    assert_eq!(v["opt_stream"], 1.0);
    assert_eq!(v["opt_summary"], 1.5);
    assert_eq!(v["big_count"], 2);
    assert!(tight_vsched_json(2, 0.3).is_err());
    assert!(tight_vsched_json(4, 0.1).is_err());
}
