//! Exact finite distributions and the distances between them.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Probability vector over the indices `0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDist", into = "RawDist")]
pub struct FiniteDist {
    mass: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RawDist(#[serde(with = "crate::rational::serde_vec")] Vec<Rational>);

impl TryFrom<RawDist> for FiniteDist {
    type Error = Error;

    fn try_from(raw: RawDist) -> Result<Self> {
        FiniteDist::new(raw.0)
    }
}

impl From<FiniteDist> for RawDist {
    fn from(d: FiniteDist) -> Self {
        RawDist(d.mass)
    }
}

impl FiniteDist {
    pub fn new(mass: Vec<Rational>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        if let Some(i) = mass.iter().position(|m| m.is_negative()) {
            return Err(Error::InvalidDistribution(format!("negative mass at {i}")));
        }
        let total: Rational = mass.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        Ok(Self { mass })
    }

    pub fn uniform(n: usize) -> Self {
        let m = Rational::new(1.into(), (n as i64).into());
        Self { mass: vec![m; n] }
    }

    pub fn point(n: usize, at: usize) -> Self {
        let mut mass = vec![Rational::zero(); n];
        mass[at] = Rational::one();
        Self { mass }
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self, i: usize) -> &Rational {
        &self.mass[i]
    }

    pub fn masses(&self) -> &[Rational] {
        &self.mass
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(i, _)| i)
    }

    /// Smallest positive mass.
    pub fn min_positive(&self) -> Rational {
        self.mass
            .iter()
            .filter(|m| !m.is_zero())
            .min()
            .cloned()
            .expect("a distribution has nonempty support")
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut mass = vec![Rational::zero(); self.len()];
        for (i, m) in self.mass.iter().enumerate() {
            mass[perm[i]] = m.clone();
        }
        Self { mass }
    }
}

fn same_space(p: &FiniteDist, r: &FiniteDist) -> Result<()> {
    if p.len() != r.len() {
        return Err(Error::Domain(format!(
            "distributions over {} and {} states",
            p.len(),
            r.len()
        )));
    }
    Ok(())
}

fn ratios(p: &FiniteDist, r: &FiniteDist) -> Result<Vec<Rational>> {
    same_space(p, r)?;
    p.support()
        .map(|x| {
            if r.mass(x).is_zero() {
                Err(Error::Support {
                    index: x,
                    detail: "state in supp(p) has zero mass under r".into(),
                })
            } else {
                Ok(p.mass(x) / r.mass(x))
            }
        })
        .collect()
}

/// `max_{x ∈ supp(p)} p(x)/r(x)`; errors if `supp(p) ⊄ supp(r)`.
pub fn d_max(p: &FiniteDist, r: &FiniteDist) -> Result<Rational> {
    Ok(ratios(p, r)?.into_iter().max().expect("nonempty support"))
}

/// Like [`d_max`] but maps a support violation to `None` (infinite ratio).
pub fn d_max_allow_infinite(p: &FiniteDist, r: &FiniteDist) -> Result<Option<Rational>> {
    match d_max(p, r) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Support { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `max_{x ∈ supp(p)} |p(x)/r(x) − 1|`.
pub fn d_inf(p: &FiniteDist, r: &FiniteDist) -> Result<Rational> {
    Ok(ratios(p, r)?
        .into_iter()
        .map(|q| (q - Rational::one()).abs())
        .max()
        .expect("nonempty support"))
}

/// Unhalved ℓ1 distance `Σ |p(x) − r(x)|`, in `[0, 2]`.
pub fn tv_distance(p: &FiniteDist, r: &FiniteDist) -> Result<Rational> {
    same_space(p, r)?;
    Ok(p.masses()
        .iter()
        .zip(r.masses())
        .map(|(a, b)| (a - b).abs())
        .sum())
}

/// The distribution `h` completing `r = p/(1+ε) + ε·h/(1+ε)`.
///
/// A negative entry means `p(z) > (1+ε)·r(z)` somewhere, i.e. the claimed
/// bound `D_max(p, r) ≤ 1 + ε` was false.
pub fn residual(p: &FiniteDist, r: &FiniteDist, eps: &Rational) -> Result<FiniteDist> {
    same_space(p, r)?;
    if !eps.is_positive() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let one_plus = Rational::one() + eps;
    let scale = &one_plus / eps;
    let mut mass = Vec::with_capacity(p.len());
    for (z, (pz, rz)) in p.masses().iter().zip(r.masses()).enumerate() {
        let h = &scale * (rz - pz / &one_plus);
        if h.is_negative() {
            return Err(Error::CertificateViolation {
                state: z,
                detail: format!("residual mass {h} < 0: p(z)/r(z) exceeds 1 + {eps}"),
            });
        }
        mass.push(h);
    }
    FiniteDist::new(mass)
}

/// Entrywise `p/(1+ε) + ε·h/(1+ε)`.
pub fn mixture(p: &FiniteDist, h: &FiniteDist, eps: &Rational) -> Vec<Rational> {
    let one_plus = Rational::one() + eps;
    p.masses()
        .iter()
        .zip(h.masses())
        .map(|(a, b)| (a + eps * b) / &one_plus)
        .collect()
}
