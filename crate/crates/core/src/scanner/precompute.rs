//! Recipient-side tables: multiplication by a fixed scalar (the viewing key)
//! and by fixed bases (spending keys and generators).

use ark_ec::scalar_mul::glv::GLVConfig;
use ark_ec::scalar_mul::BatchMulPreprocessing;
use ark_ec::short_weierstrass::{Affine, Projective, SWCurveConfig};
use ark_ec::{AdditiveGroup, AffineRepr, CurveGroup};
use ark_ff::{batch_inversion, BigInteger, Field, PrimeField, Zero};

/// wNAF window. Tables hold the odd multiples `P, 3P, .., 15P`.
const WINDOW: usize = 5;
const TABLE_LEN: usize = 1 << (WINDOW - 2);

fn wnaf_digits<F: PrimeField>(k: &F, negate: bool) -> Vec<i8> {
    let digits = k
        .into_bigint()
        .find_wnaf(WINDOW)
        .expect("window is in range");
    digits
        .into_iter()
        .map(|d| if negate { -(d as i8) } else { d as i8 })
        .collect()
}

fn odd_multiples<C: SWCurveConfig>(p: &Projective<C>) -> [Projective<C>; TABLE_LEN] {
    let mut table = [*p; TABLE_LEN];
    let twice = p.double();
    for i in 1..TABLE_LEN {
        table[i] = table[i - 1] + twice;
    }
    table
}

#[inline(always)]
fn add_digit<C: SWCurveConfig>(acc: &mut Projective<C>, table: &[Projective<C>; TABLE_LEN], d: i8) {
    if d > 0 {
        *acc += &table[(d >> 1) as usize];
    } else if d < 0 {
        *acc -= &table[((-d) >> 1) as usize];
    }
}

/// Below this many points the shared inversions cost more than they save.
const LOCKSTEP_MIN: usize = 16;

/// A batch of affine points in structure-of-arrays form. The digits of a
/// fixed scalar are the same for every point, so all lanes go through the
/// same doublings and additions and each step needs one inversion for the
/// whole batch (Montgomery's trick).
#[derive(Clone)]
struct Lanes<F> {
    x: Vec<F>,
    y: Vec<F>,
}

impl<F: Field> Lanes<F> {
    fn from_points<C: SWCurveConfig<BaseField = F>>(points: &[Affine<C>]) -> Option<Self> {
        if points.iter().any(|p| p.infinity) {
            return None;
        }
        Some(Lanes {
            x: points.iter().map(|p| p.x).collect(),
            y: points.iter().map(|p| p.y).collect(),
        })
    }

    fn into_points<C: SWCurveConfig<BaseField = F>>(self) -> Vec<Affine<C>> {
        self.x.into_iter().zip(self.y).map(|(x, y)| Affine::new_unchecked(x, y)).collect()
    }

    fn negated(&self) -> Self {
        Lanes {
            x: self.x.clone(),
            y: self.y.iter().map(|y| -*y).collect(),
        }
    }

    /// Fails on a zero denominator, which only an exceptional input can hit.
    fn invert(den: &mut [F]) -> bool {
        if den.iter().any(Zero::is_zero) {
            return false;
        }
        batch_inversion(den);
        true
    }

    fn double_in_place<C: SWCurveConfig<BaseField = F>>(&mut self, den: &mut Vec<F>) -> bool {
        den.clear();
        den.extend(self.y.iter().map(|y| y.double()));
        if !Self::invert(den) {
            return false;
        }
        for ((x, y), inv) in self.x.iter_mut().zip(&mut self.y).zip(den.iter()) {
            let xx = x.square();
            let lambda = (xx.double() + xx + C::COEFF_A) * inv;
            let x3 = lambda.square() - x.double();
            *y = lambda * (*x - x3) - *y;
            *x = x3;
        }
        true
    }

    fn add_in_place(&mut self, q: &Self, negate: bool, den: &mut Vec<F>) -> bool {
        den.clear();
        den.extend(q.x.iter().zip(&self.x).map(|(qx, x)| *qx - x));
        if !Self::invert(den) {
            return false;
        }
        for (i, inv) in den.iter().enumerate() {
            let qy = if negate { -q.y[i] } else { q.y[i] };
            let (x, y) = (self.x[i], self.y[i]);
            let lambda = (qy - y) * inv;
            let x3 = lambda.square() - x - q.x[i];
            self.y[i] = lambda * (x - x3) - y;
            self.x[i] = x3;
        }
        true
    }
}

fn odd_multiples_lanes<C: SWCurveConfig>(base: &Lanes<C::BaseField>) -> Option<Vec<Lanes<C::BaseField>>> {
    let mut den = Vec::with_capacity(base.x.len());
    let mut twice = base.clone();
    if !twice.double_in_place::<C>(&mut den) {
        return None;
    }
    let mut table = vec![base.clone()];
    for i in 1..TABLE_LEN {
        let mut next = table[i - 1].clone();
        if !next.add_in_place(&twice, false, &mut den) {
            return None;
        }
        table.push(next);
    }
    Some(table)
}

/// Joint double-and-add over several digit strings, each with its own table,
/// in lockstep over `n` lanes. `None` means an exceptional case came up.
fn lockstep_horner<C: SWCurveConfig>(
    streams: &[(&[i8], &[Lanes<C::BaseField>])],
    n: usize,
) -> Option<Vec<Affine<C>>> {
    let len = streams.iter().map(|(d, _)| d.len()).max().unwrap_or(0);
    let mut den = Vec::with_capacity(n);
    let mut acc: Option<Lanes<C::BaseField>> = None;
    for i in (0..len).rev() {
        if let Some(a) = acc.as_mut() {
            if !a.double_in_place::<C>(&mut den) {
                return None;
            }
        }
        for (digits, table) in streams {
            let d = digits.get(i).copied().unwrap_or(0);
            if d == 0 {
                continue;
            }
            let q = &table[(d.unsigned_abs() >> 1) as usize];
            match acc.as_mut() {
                None => acc = Some(if d > 0 { q.clone() } else { q.negated() }),
                Some(a) => {
                    if !a.add_in_place(q, d < 0, &mut den) {
                        return None;
                    }
                }
            }
        }
    }
    Some(match acc {
        Some(a) => a.into_points(),
        None => vec![Affine::identity(); n],
    })
}

/// Multiplication by a fixed scalar `k` on a curve with an efficient
/// endomorphism. `k` is split once into two half-length signed parts,
/// `k = k1 + k2*lambda`, each recoded to wNAF; a multiplication is then one
/// joint double-and-add pass over 128-bit digit strings.
#[derive(Clone)]
pub struct GlvFixedScalar<C: GLVConfig> {
    k1: Vec<i8>,
    k2: Vec<i8>,
    _curve: std::marker::PhantomData<C>,
}

impl<C: GLVConfig> GlvFixedScalar<C> {
    pub fn new(k: C::ScalarField) -> Self {
        let ((pos1, k1), (pos2, k2)) = C::scalar_decomposition(k);
        GlvFixedScalar {
            k1: wnaf_digits(&k1, !pos1),
            k2: wnaf_digits(&k2, !pos2),
            _curve: std::marker::PhantomData,
        }
    }

    pub fn mul(&self, p: &Affine<C>) -> Projective<C> {
        let base = p.into_group();
        let t1 = odd_multiples(&base);
        let t2 = t1.map(|q| C::endomorphism(&q));
        let len = self.k1.len().max(self.k2.len());
        let mut acc = Projective::<C>::zero();
        for i in (0..len).rev() {
            acc.double_in_place();
            add_digit(&mut acc, &t1, self.k1.get(i).copied().unwrap_or(0));
            add_digit(&mut acc, &t2, self.k2.get(i).copied().unwrap_or(0));
        }
        acc
    }

    /// Multiplies every point by `k`, sharing one inversion per step across
    /// the batch. Falls back to [`Self::mul`] for small batches and
    /// exceptional inputs.
    pub fn mul_batch(&self, points: &[Affine<C>]) -> Vec<Affine<C>> {
        let lockstep = || {
            let t1 = odd_multiples_lanes::<C>(&Lanes::from_points(points)?)?;
            let t2: Vec<_> = t1
                .iter()
                .map(|t| {
                    let image: Vec<_> = t.clone().into_points::<C>().iter().map(C::endomorphism_affine).collect();
                    Lanes::from_points(&image)
                })
                .collect::<Option<_>>()?;
            lockstep_horner::<C>(&[(&self.k1, &t1), (&self.k2, &t2)], points.len())
        };
        if points.len() >= LOCKSTEP_MIN {
            if let Some(out) = lockstep() {
                return out;
            }
        }
        let proj: Vec<_> = points.iter().map(|p| self.mul(p)).collect();
        Projective::normalize_batch(&proj)
    }
}

/// Fixed-scalar multiplication without an endomorphism: the scalar's wNAF
/// recoding is kept, each call builds a small table of odd multiples.
#[derive(Clone)]
pub struct WnafFixedScalar<C: SWCurveConfig> {
    digits: Vec<i8>,
    _curve: std::marker::PhantomData<C>,
}

impl<C: SWCurveConfig> WnafFixedScalar<C> {
    pub fn new(k: C::ScalarField) -> Self {
        WnafFixedScalar {
            digits: wnaf_digits(&k, false),
            _curve: std::marker::PhantomData,
        }
    }

    pub fn mul(&self, p: &Affine<C>) -> Projective<C> {
        let table = odd_multiples(&p.into_group());
        let mut acc = Projective::<C>::zero();
        for &d in self.digits.iter().rev() {
            acc.double_in_place();
            add_digit(&mut acc, &table, d);
        }
        acc
    }

    /// Batched [`Self::mul`], as for [`GlvFixedScalar::mul_batch`].
    pub fn mul_batch(&self, points: &[Affine<C>]) -> Vec<Affine<C>> {
        let lockstep = || {
            let table = odd_multiples_lanes::<C>(&Lanes::from_points(points)?)?;
            lockstep_horner::<C>(&[(&self.digits, &table)], points.len())
        };
        if points.len() >= LOCKSTEP_MIN {
            if let Some(out) = lockstep() {
                return out;
            }
        }
        let proj: Vec<_> = points.iter().map(|p| self.mul(p)).collect();
        Projective::normalize_batch(&proj)
    }
}

impl<C: GLVConfig> std::fmt::Debug for GlvFixedScalar<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GlvFixedScalar")
            .field("digits", &(self.k1.len(), self.k2.len()))
            .finish()
    }
}

impl<C: SWCurveConfig> std::fmt::Debug for WnafFixedScalar<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WnafFixedScalar")
            .field("digits", &self.digits.len())
            .finish()
    }
}

/// Table for multiplying one fixed base by many scalars.
pub struct FixedBase<C: SWCurveConfig> {
    table: BatchMulPreprocessing<Projective<C>>,
}

impl<C: SWCurveConfig> FixedBase<C> {
    /// Window sized for a few thousand multiplications: about 32 table rows.
    pub fn new(base: &Affine<C>) -> Self {
        FixedBase {
            table: BatchMulPreprocessing::new(base.into_group(), 1 << 12),
        }
    }

    pub fn mul(&self, k: &C::ScalarField) -> Affine<C> {
        self.table.batch_mul(std::slice::from_ref(k))[0]
    }

    pub fn batch_mul(&self, ks: &[C::ScalarField]) -> Vec<Affine<C>> {
        self.table.batch_mul(ks)
    }
}

impl<C: SWCurveConfig> std::fmt::Debug for FixedBase<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FixedBase")
            .field("window", &self.table.window)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use ark_ec::CurveGroup;
    use ark_ff::{One, UniformRand};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    use super::*;

    type Bn = ark_bn254::g1::Config;
    type Bls = ark_bls12_381::g1::Config;
    type Secp = ark_secp256k1::Config;

    fn check_glv<C: GLVConfig>(rng: &mut ChaCha20Rng) {
        let edge = [
            C::ScalarField::one(),
            -C::ScalarField::one(),
            C::ScalarField::from(2u64),
            C::LAMBDA,
            -C::LAMBDA,
        ];
        let randoms: Vec<_> = (0..30).map(|_| C::ScalarField::rand(rng)).collect();
        for k in edge.into_iter().chain(randoms) {
            let table = GlvFixedScalar::<C>::new(k);
            for _ in 0..3 {
                let p = Projective::<C>::rand(rng).into_affine();
                assert_eq!(table.mul(&p), p * k);
            }
            assert!(table.mul(&Affine::<C>::identity()).is_zero());
        }
        assert!(GlvFixedScalar::<C>::new(C::ScalarField::zero())
            .mul(&Projective::<C>::rand(rng).into_affine())
            .is_zero());
    }

    fn check_batch<C: GLVConfig>(rng: &mut ChaCha20Rng) {
        let points: Vec<_> = (0..40).map(|_| Projective::<C>::rand(rng).into_affine()).collect();
        let edge = [
            C::ScalarField::zero(),
            C::ScalarField::one(),
            -C::ScalarField::one(),
            C::ScalarField::from(16u64),
            C::LAMBDA,
        ];
        let randoms: Vec<_> = (0..5).map(|_| C::ScalarField::rand(rng)).collect();
        for k in edge.into_iter().chain(randoms) {
            let table = GlvFixedScalar::<C>::new(k);
            let want: Vec<_> = points.iter().map(|p| (*p * k).into_affine()).collect();
            assert_eq!(table.mul_batch(&points), want);
            assert_eq!(table.mul_batch(&points[..3]), want[..3]);
            let mut with_identity = points.clone();
            with_identity[7] = Affine::identity();
            let got = table.mul_batch(&with_identity);
            assert!(got[7].is_zero());
            assert_eq!(got[8], want[8]);
        }
        // the same point twice and its negation stay independent lanes
        let p = points[0];
        let twins = [vec![p, p, -p], points.clone()].concat();
        let table = GlvFixedScalar::<C>::new(C::ScalarField::rand(rng));
        let got = table.mul_batch(&twins);
        assert_eq!(got[0], got[1]);
        assert_eq!(got[2], -got[0]);
    }

    #[test]
    fn lockstep_batches_match_single_multiplication() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        check_batch::<Bn>(&mut rng);
        check_batch::<Bls>(&mut rng);
        let points: Vec<_> = (0..30)
            .map(|_| ark_secp256k1::Projective::rand(&mut rng).into_affine())
            .collect();
        for k in [ark_secp256k1::Fr::one(), ark_secp256k1::Fr::rand(&mut rng)] {
            let want: Vec<_> = points.iter().map(|p| (*p * k).into_affine()).collect();
            assert_eq!(WnafFixedScalar::<Secp>::new(k).mul_batch(&points), want);
        }
    }

    #[test]
    fn glv_matches_plain_multiplication() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        check_glv::<Bn>(&mut rng);
        check_glv::<Bls>(&mut rng);
    }

    #[test]
    fn wnaf_matches_plain_multiplication() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..30 {
            let k = ark_secp256k1::Fr::rand(&mut rng);
            let table = WnafFixedScalar::<Secp>::new(k);
            let p = ark_secp256k1::Projective::rand(&mut rng).into_affine();
            assert_eq!(table.mul(&p), p * k);
        }
        let minus_one = WnafFixedScalar::<Secp>::new(-ark_secp256k1::Fr::one());
        let g = ark_secp256k1::Affine::generator();
        assert_eq!(minus_one.mul(&g), -g.into_group());
    }

    #[test]
    fn fixed_base_matches_plain_multiplication() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let base = ark_bn254::G1Projective::rand(&mut rng).into_affine();
        let table = FixedBase::<Bn>::new(&base);
        let ks: Vec<_> = (0..20).map(|_| ark_bn254::Fr::rand(&mut rng)).collect();
        let batch = table.batch_mul(&ks);
        for (k, got) in ks.iter().zip(batch) {
            assert_eq!(got, (base * k).into_affine());
            assert_eq!(table.mul(k), got);
        }
        let secp = FixedBase::<Secp>::new(&ark_secp256k1::Affine::generator());
        let k = -ark_secp256k1::Fr::one();
        assert_eq!(secp.mul(&k), -ark_secp256k1::Affine::generator());
    }
}
