//! Static per-country covariates: openness to Russia and distance to Moscow.

use crate::{Error, Result};

/// Moscow reference point (degrees).
pub const MOSCOW_LAT: f64 = 55.7558;
pub const MOSCOW_LON: f64 = 37.6173;

/// Mean Earth radius in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Debug, Clone, PartialEq)]
pub struct CountryMeta {
    pub iso2: String,
    pub capital_lat: f64,
    pub capital_lon: f64,
    pub exports_to_rus: f64,
    pub imports_from_rus: f64,
    pub gdp: f64,
    /// Degree of openness, `(exports + imports) / gdp`.
    pub doo: f64,
    /// Capital-to-Moscow distance in thousands of km.
    pub dist: f64,
}

impl CountryMeta {
    pub fn new(
        iso2: impl Into<String>,
        capital_lat: f64,
        capital_lon: f64,
        exports_to_rus: f64,
        imports_from_rus: f64,
        gdp: f64,
    ) -> Result<Self> {
        let doo = degree_of_openness(exports_to_rus, imports_from_rus, gdp)?;
        let dist = distance_to_moscow(capital_lat, capital_lon)?;
        Ok(Self {
            iso2: iso2.into(),
            capital_lat,
            capital_lon,
            exports_to_rus,
            imports_from_rus,
            gdp,
            doo,
            dist,
        })
    }
}

pub fn degree_of_openness(exports: f64, imports: f64, gdp: f64) -> Result<f64> {
    if !(gdp.is_finite() && gdp > 0.0) {
        return Err(Error::InvalidInput(format!("gdp must be positive, got {gdp}")));
    }
    if !(exports.is_finite() && exports >= 0.0 && imports.is_finite() && imports >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "trade flows must be non-negative, got exports {exports}, imports {imports}"
        )));
    }
    Ok((exports + imports) / gdp)
}

fn check_coords(lat: f64, lon: f64) -> Result<()> {
    if !((-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon)) {
        return Err(Error::InvalidInput(format!(
            "coordinates ({lat}, {lon}) out of range"
        )));
    }
    Ok(())
}

/// Haversine great-circle distance in km.
pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> Result<f64> {
    check_coords(lat1, lon1)?;
    check_coords(lat2, lon2)?;
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = p2 - p1;
    let dlam = (lon2 - lon1).to_radians();
    let a = (dphi / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dlam / 2.0).sin().powi(2);
    let c = 2.0 * a.sqrt().min(1.0).asin();
    Ok(EARTH_RADIUS_KM * c)
}

/// Distance from a capital to Moscow in units of 10³ km.
pub fn distance_to_moscow(lat: f64, lon: f64) -> Result<f64> {
    Ok(haversine_km(lat, lon, MOSCOW_LAT, MOSCOW_LON)? / 1000.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn openness_examples() {
        assert_eq!(degree_of_openness(0.0, 0.0, 1.0).unwrap(), 0.0);
        assert_relative_eq!(degree_of_openness(5.0, 5.0, 100.0).unwrap(), 0.1);
        assert_relative_eq!(degree_of_openness(3.0, 7.0, 200.0).unwrap(), 0.05);
        assert!(degree_of_openness(1.0, 1.0, 0.0).is_err());
        assert!(degree_of_openness(-1.0, 1.0, 10.0).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance_to_moscow(MOSCOW_LAT, MOSCOW_LON).unwrap(), 0.0);
        let anti = distance_to_moscow(-MOSCOW_LAT, MOSCOW_LON - 180.0).unwrap();
        assert_relative_eq!(anti, std::f64::consts::PI * EARTH_RADIUS_KM / 1000.0, epsilon = 1e-9);
        assert_relative_eq!(anti, 20.015, epsilon = 1e-3);
        let kyiv = distance_to_moscow(50.4501, 30.5234).unwrap();
        assert!((kyiv - 0.756).abs() < 0.002, "kyiv {kyiv}");
        assert!(distance_to_moscow(91.0, 0.0).is_err());
        assert!(distance_to_moscow(0.0, 181.0).is_err());
    }

    fn coord() -> impl Strategy<Value = (f64, f64)> {
        (-90.0f64..=90.0, -180.0f64..=180.0)
    }

    proptest! {
        #[test]
        fn haversine_symmetric_and_triangle(a in coord(), b in coord(), c in coord()) {
            let ab = haversine_km(a.0, a.1, b.0, b.1).unwrap();
            let ba = haversine_km(b.0, b.1, a.0, a.1).unwrap();
            let bc = haversine_km(b.0, b.1, c.0, c.1).unwrap();
            let ac = haversine_km(a.0, a.1, c.0, c.1).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-9 * 1000.0);
            prop_assert!(ac <= ab + bc + 1e-9 * 1000.0);
        }

        #[test]
        fn openness_scale_free(e in 0.0f64..1e6, i in 0.0f64..1e6, g in 1.0f64..1e9, s in 1e-3f64..1e3) {
            let base = degree_of_openness(e, i, g).unwrap();
            let scaled = degree_of_openness(e * s, i * s, g * s).unwrap();
            prop_assert!((base - scaled).abs() <= 1e-12 * base.max(1e-300).max(1.0));
        }
    }
}
