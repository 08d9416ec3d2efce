//! The one number format shared by reports, meshes and probe CSV.

/// Rounds to 9 significant digits; `−0` becomes `0`.
pub fn round9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Text of a finite number after [`round9`]: shortest round-trip decimal,
/// plain notation for `1e-5 <= |x| < 1e16` (integers keep a trailing `.0`),
/// exponent notation otherwise (`1e-7`, `1.5e+16`). Non-finite values give
/// `None`.
pub fn fmt_num(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    Some(serde_json::to_string(&round9(x)).expect("finite float serializes"))
}

/// Serde adapters writing [`round9`]-rounded numbers.
pub mod serde_num {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::round9;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(round9(*x))
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d)
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(x) if x.is_finite() => s.serialize_f64(round9(*x)),
                _ => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Option::<f64>::deserialize(d)
        }
    }

    pub mod vec {
        use serde::ser::SerializeSeq;

        use super::*;

        pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                if x.is_finite() {
                    seq.serialize_element(&round9(*x))?;
                } else {
                    seq.serialize_element(&Option::<f64>::None)?;
                }
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<f64>::deserialize(d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        let f = |x| fmt_num(x).unwrap();
        assert_eq!(f(1.0), "1.0");
        assert_eq!(f(-0.0), "0.0");
        assert_eq!(f(std::f64::consts::FRAC_1_SQRT_2), "0.707106781");
        assert_eq!(f(1.0 / 3.0 * 1e-7), "3.33333333e-8");
        assert_eq!(f(123456789012.0), "123456789000.0");
        assert_eq!(f(2.5e20), "2.5e+20");
        assert_eq!(f(1e-5), "0.00001");
        assert_eq!(fmt_num(f64::NAN), None);
        assert_eq!(round9(1e-320), 1e-320);
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [0.1, 1.0 / 7.0, -12345.678901234, 6.02214076e23, 1e-300] {
            let r = round9(x);
            assert_eq!(round9(r), r);
            assert_eq!(fmt_num(r), fmt_num(x));
        }
    }
}
