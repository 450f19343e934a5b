use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::var::{nvars, VarId};

/// Numerators are drawn from `[-NUM_RANGE, NUM_RANGE]` and denominators from
/// `1..=DEN_RANGE`, a pool of well over 10^6 distinct rationals.
const NUM_RANGE: i64 = 1_000_000;
const DEN_RANGE: i64 = 997;

/// Exact rational value for each of the `3m+1` jet coordinates, in slot order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePoint {
    m: usize,
    #[serde(with = "rational_strings")]
    values: Vec<BigRational>,
}

impl SamplePoint {
    pub fn new(m: usize, values: Vec<BigRational>) -> Self {
        assert_eq!(values.len(), nvars(m), "sample point needs 3m+1 coordinates");
        SamplePoint { m, values }
    }

    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let values = (0..nvars(m)).map(|_| random_rational(rng)).collect();
        SamplePoint { m, values }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn get(&self, v: VarId) -> &BigRational {
        &self.values[v.slot(self.m)]
    }

    pub fn set(&mut self, v: VarId, value: BigRational) {
        let s = v.slot(self.m);
        self.values[s] = value;
    }

    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

pub fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    let n = rng.gen_range(-NUM_RANGE..=NUM_RANGE);
    let d = rng.gen_range(1..=DEN_RANGE);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl fmt::Display for SamplePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (s, v) in self.values.iter().enumerate() {
            if s > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}={}", VarId::from_slot(s, self.m), v)?;
        }
        write!(f, "}}")
    }
}

pub(crate) mod rational_strings {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(|v| v.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        raw.iter().map(|s| s.parse::<BigRational>().map_err(D::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_points_are_deterministic() {
        let a = SamplePoint::random(2, &mut ChaCha8Rng::seed_from_u64(7));
        let b = SamplePoint::random(2, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert_eq!(a.values().len(), 7);
    }

    #[test]
    fn serde_round_trip() {
        let a = SamplePoint::random(3, &mut ChaCha8Rng::seed_from_u64(1));
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<SamplePoint>(&s).unwrap(), a);
    }
}
