//! Flat key-value scenario files.
//!
//! The format is a subset of TOML: one `key = value` per line, `#` starts a
//! comment. Every key is optional; missing keys keep the default scenario
//! value. Powers accept either a `_dbm` or a `_w` suffix, thresholds either
//! `_db` or a bare linear value.
//!
//! | key | unit |
//! |-----|------|
//! | `lambda_m`, `lambda_s` | points per m² |
//! | `p_m_dbm` / `p_m_w`, `p_s_dbm` / `p_s_w` | dBm / W |
//! | `alpha_m`, `alpha_s` | path-loss exponents (> 2) |
//! | `a`, `b` | cluster radii, m |
//! | `n1`, `n2` | SBS count per cluster |
//! | `bandwidth_hz` | Hz |
//! | `gamma_bl_db` / `gamma_bl`, `gamma_el_db` / `gamma_el` | dB / linear |
//! | `f_count` | files |
//! | `l_b`, `l_e`, `m_cache` | bits |
//! | `zipf_alpha` | skewness |
//! | `c_ca`, `c_bh` | W/bit |
//! | `zeta_s`, `zeta_m` | amplifier coefficients |
//! | `p_s_fix_w` / `p_s_fix_dbm`, `p_m_fix_w` / `p_m_fix_dbm` | W / dBm |
//! | `el_caching_uses_bl_size` | bool |

use std::path::Path;

use toml::{Table, Value};

use super::{db_to_linear, dbm_to_watts, Scenario};
use crate::error::{Error, Result};

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_scenario(&text)
}

/// Parses and validates scenario text.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    let mut s = Scenario::default();

    let n = &mut s.network;
    take_real(&mut table, "lambda_m", &mut n.lambda_m)?;
    take_real(&mut table, "lambda_s", &mut n.lambda_s)?;
    take_power(&mut table, "p_m", &mut n.p_m)?;
    take_power(&mut table, "p_s", &mut n.p_s)?;
    take_real(&mut table, "alpha_m", &mut n.alpha_m)?;
    take_real(&mut table, "alpha_s", &mut n.alpha_s)?;
    take_real(&mut table, "a", &mut n.a)?;
    take_real(&mut table, "b", &mut n.b)?;
    take_count(&mut table, "n1", &mut n.n1)?;
    take_count(&mut table, "n2", &mut n.n2)?;
    take_real(&mut table, "bandwidth_hz", &mut n.w)?;
    take_threshold(&mut table, "gamma_bl", &mut n.gamma_bl)?;
    take_threshold(&mut table, "gamma_el", &mut n.gamma_el)?;

    let c = &mut s.content;
    take_count(&mut table, "f_count", &mut c.f_count)?;
    take_real(&mut table, "l_b", &mut c.l_b)?;
    take_real(&mut table, "l_e", &mut c.l_e)?;
    take_real(&mut table, "m_cache", &mut c.m_cache)?;
    take_real(&mut table, "zipf_alpha", &mut c.zipf_alpha)?;

    let p = &mut s.power;
    take_real(&mut table, "c_ca", &mut p.c_ca)?;
    take_real(&mut table, "c_bh", &mut p.c_bh)?;
    take_real(&mut table, "zeta_s", &mut p.zeta_s)?;
    take_real(&mut table, "zeta_m", &mut p.zeta_m)?;
    take_power(&mut table, "p_s_fix", &mut p.p_s_fix)?;
    take_power(&mut table, "p_m_fix", &mut p.p_m_fix)?;

    if let Some(v) = table.remove("el_caching_uses_bl_size") {
        s.options.el_caching_uses_bl_size = v
            .as_bool()
            .ok_or_else(|| Error::validation("el_caching_uses_bl_size", "expected true or false"))?;
    }

    if let Some(key) = table.keys().next() {
        return Err(Error::validation(key, "unknown key"));
    }
    s.validate()?;
    Ok(s)
}

fn real(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::validation(key, format!("expected a number, got {v}"))),
    }
}

fn take_real(t: &mut Table, key: &str, dst: &mut f64) -> Result<()> {
    if let Some(v) = t.remove(key) {
        *dst = real(key, &v)?;
    }
    Ok(())
}

fn take_count(t: &mut Table, key: &str, dst: &mut usize) -> Result<()> {
    if let Some(v) = t.remove(key) {
        let x = real(key, &v)?;
        if x < 0.0 || x.fract() != 0.0 || !x.is_finite() {
            return Err(Error::validation(key, format!("expected a non-negative integer, got {v}")));
        }
        *dst = x as usize;
    }
    Ok(())
}

fn take_power(t: &mut Table, stem: &str, dst: &mut f64) -> Result<()> {
    let dbm_key = format!("{stem}_dbm");
    let w_key = format!("{stem}_w");
    match (t.remove(&dbm_key), t.remove(&w_key)) {
        (Some(_), Some(_)) => Err(Error::validation(&w_key, format!("conflicts with `{dbm_key}`"))),
        (Some(v), None) => {
            *dst = dbm_to_watts(real(&dbm_key, &v)?);
            Ok(())
        }
        (None, Some(v)) => {
            *dst = real(&w_key, &v)?;
            Ok(())
        }
        (None, None) => Ok(()),
    }
}

fn take_threshold(t: &mut Table, stem: &str, dst: &mut f64) -> Result<()> {
    let db_key = format!("{stem}_db");
    match (t.remove(&db_key), t.remove(stem)) {
        (Some(_), Some(_)) => Err(Error::validation(stem, format!("conflicts with `{db_key}`"))),
        (Some(v), None) => {
            *dst = db_to_linear(real(&db_key, &v)?);
            Ok(())
        }
        (None, Some(v)) => {
            *dst = real(stem, &v)?;
            Ok(())
        }
        (None, None) => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let s = parse_scenario("# nothing here\n").unwrap();
        assert_eq!(s, Scenario::default());
    }

    #[test]
    fn swapped_radii_name_the_key() {
        let err = parse_scenario("a = 100\nb = 50\n").unwrap_err();
        assert!(matches!(err, Error::Validation { ref key, .. } if key == "a"), "{err}");
    }

    #[test]
    fn zero_cache_is_valid() {
        let s = parse_scenario("m_cache = 0").unwrap();
        assert_eq!((s.content.m_b(), s.content.m_e()), (0, 0));
    }

    #[test]
    fn power_suffixes() {
        let s = parse_scenario("p_s_w = 0.5\np_m_dbm = 40\n").unwrap();
        assert_eq!(s.network.p_s, 0.5);
        assert!((s.network.p_m - 10.0).abs() < 1e-12);
        assert!(parse_scenario("p_s_w = 0.5\np_s_dbm = 20\n").is_err());
    }

    #[test]
    fn thresholds_in_db_or_linear() {
        let s = parse_scenario("gamma_bl_db = 0\ngamma_el = 2.5").unwrap();
        assert_eq!(s.network.gamma_bl, 1.0);
        assert_eq!(s.network.gamma_el, 2.5);
    }

    #[test]
    fn malformed_and_unknown() {
        assert!(matches!(parse_scenario("a = = 3"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_scenario("alpha = 3"),
            Err(Error::Validation { ref key, .. }) if key == "alpha"
        ));
        assert!(parse_scenario("n1 = 2.5").is_err());
        assert!(parse_scenario("a = \"fifty\"").is_err());
    }

    #[test]
    fn loading_is_pure() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.toml");
        std::fs::write(&path, "zipf_alpha = 0.6\nn1 = 3\n").unwrap();
        assert_eq!(load_scenario(&path).unwrap(), load_scenario(&path).unwrap());
    }
}
