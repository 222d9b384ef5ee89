//! Exact root extraction over Q(i).
//!
//! No floating point and no integer factorization. Roots of the squarefree
//! part are located modulo an inert prime, Hensel-lifted to a modulus
//! exceeding the root height bound, recovered by rational reconstruction,
//! and verified exactly; multiplicities come from exact deflation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exactmath::gauss::GaussRat;
use crate::exactmath::poly::Poly;

/// All roots of `p` lying in Q(i), with multiplicities. `fully_split` is true
/// iff the multiplicities sum to deg(p).
pub fn roots_in_field(p: &Poly) -> (Vec<(GaussRat, usize)>, bool) {
    assert!(!p.is_zero(), "roots of the zero polynomial");
    let mut work = p.monic();
    let mut roots: Vec<(GaussRat, usize)> = Vec::new();

    // Factor out t^k.
    let zero_mult = work.coeffs().iter().take_while(|c| c.is_zero()).count();
    if zero_mult > 0 {
        let shifted = Poly::new(work.coeffs()[zero_mult..].to_vec());
        roots.push((GaussRat::zero(), zero_mult));
        work = shifted;
    }

    if work.degree().is_some_and(|d| d >= 1) {
        let squarefree = {
            let gcd = work.gcd(&work.derivative());
            work.div_rem(&gcd).0
        };
        for root in field_roots_of_squarefree(&squarefree) {
            let mult = deflate(&mut work, &root);
            roots.push((root, mult));
        }
    }

    let found: usize = roots.iter().map(|(_, m)| m).sum();
    let fully_split = found == p.degree().unwrap_or(0);
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    (roots, fully_split)
}

fn deflate(work: &mut Poly, root: &GaussRat) -> usize {
    let lin = Poly::linear(root);
    let mut mult = 0;
    loop {
        let (q, r) = work.div_rem(&lin);
        if !r.is_zero() {
            break;
        }
        *work = q;
        mult += 1;
        if work.degree().is_none() {
            break;
        }
    }
    debug_assert!(mult > 0, "claimed root does not divide");
    mult
}

/// Gaussian integer as a coefficient pair (re, im).
type GInt = (BigInt, BigInt);

fn gi_norm(g: &GInt) -> BigInt {
    &g.0 * &g.0 + &g.1 * &g.1
}

/// Clears denominators: returns the Gaussian-integer coefficient list of a
/// scalar multiple of `p`.
fn integer_coeffs(p: &Poly) -> Vec<GInt> {
    let mut den_lcm = BigInt::one();
    for c in p.coeffs() {
        den_lcm = den_lcm.lcm(c.re.denom());
        den_lcm = den_lcm.lcm(c.im.denom());
    }
    let scale = BigRational::from_integer(den_lcm);
    p.coeffs()
        .iter()
        .map(|c| {
            let re = &c.re * &scale;
            let im = &c.im * &scale;
            debug_assert!(re.denom().is_one() && im.denom().is_one());
            (re.numer().clone(), im.numer().clone())
        })
        .collect()
}

/// Certified roots of a squarefree monic-over-Q(i) polynomial of degree >= 1
/// with nonzero constant term.
fn field_roots_of_squarefree(p: &Poly) -> Vec<GaussRat> {
    let d = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Vec::new(),
    };
    if d == 1 {
        // a0 + a1 t: root -a0/a1 directly
        let root = -&(&p.coeff(0) / &p.coeff(1));
        return vec![root];
    }
    let ints = integer_coeffs(p);
    debug_assert!(!gi_norm(&ints[0]).is_zero(), "zero root not deflated");

    // Height bounds: a reduced root U/W has W | lead and U | const, so the
    // numerators of its components are bounded by sqrt(N(const) * N(lead))
    // and the common denominator by N(lead).
    let n_lead = gi_norm(&ints[d]);
    let n_const = gi_norm(&ints[0]);
    let bound_num = num_integer::Roots::sqrt(&(&n_const * &n_lead)) + 1;
    let bound_den = n_lead.clone();

    // A good inert prime: degree preserved and squarefree mod p.
    let mut prime = 61u64; // arbitrary start below the 3 mod 4 sequence
    let (p_good, mod_roots) = loop {
        prime = next_inert_prime(prime);
        if let Some(roots) = usable_prime(&ints, prime) {
            break (prime, roots);
        }
        assert!(prime < 100_000, "no usable prime located");
    };
    if mod_roots.is_empty() {
        return Vec::new();
    }

    // Lift modulus beyond 2 * bound_num * bound_den for unique reconstruction.
    let target: BigInt = BigInt::from(2) * &bound_num * &bound_den + 1;
    let mut out = Vec::new();
    for root in mod_roots {
        if let Some(candidate) =
            lift_and_reconstruct(&ints, p_good, root, &target, &bound_num, &bound_den)
        {
            if p.eval(&candidate).is_zero() {
                out.push(candidate);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Next prime congruent to 3 mod 4 strictly above `n` (inert in Z[i]).
fn next_inert_prime(n: u64) -> u64 {
    let mut k = n + 1;
    loop {
        if k % 4 == 3 && is_prime_u64(k) {
            return k;
        }
        k += 1;
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Arithmetic in F_p[i] with i^2 = -1 (a field for p = 3 mod 4).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Fp2 {
    re: u64,
    im: u64,
}

struct Fp2Ctx {
    p: u64,
}

impl Fp2Ctx {
    fn add(&self, a: Fp2, b: Fp2) -> Fp2 {
        Fp2 {
            re: (a.re + b.re) % self.p,
            im: (a.im + b.im) % self.p,
        }
    }

    fn mul(&self, a: Fp2, b: Fp2) -> Fp2 {
        let p = self.p as u128;
        let (are, aim, bre, bim) = (a.re as u128, a.im as u128, b.re as u128, b.im as u128);
        let re = (are * bre + (p - 1) * ((aim * bim) % p)) % p;
        let im = (are * bim + aim * bre) % p;
        Fp2 {
            re: re as u64,
            im: im as u64,
        }
    }

    fn is_zero(&self, a: Fp2) -> bool {
        a.re == 0 && a.im == 0
    }

    fn reduce_gint(&self, g: &GInt) -> Fp2 {
        use num_traits::ToPrimitive;
        let p = BigInt::from(self.p);
        Fp2 {
            re: g.0.mod_floor(&p).to_u64().expect("reduced below p"),
            im: g.1.mod_floor(&p).to_u64().expect("reduced below p"),
        }
    }
}

/// Checks that `prime` preserves the degree and squarefreeness of the
/// polynomial; returns its residue-field roots when usable.
fn usable_prime(ints: &[GInt], prime: u64) -> Option<Vec<Fp2>> {
    let ctx = Fp2Ctx { p: prime };
    let coeffs: Vec<Fp2> = ints.iter().map(|g| ctx.reduce_gint(g)).collect();
    if ctx.is_zero(*coeffs.last().unwrap()) {
        return None;
    }
    let eval = |x: Fp2, cs: &[Fp2]| -> Fp2 {
        let mut acc = Fp2 { re: 0, im: 0 };
        for c in cs.iter().rev() {
            acc = ctx.add(ctx.mul(acc, x), *c);
        }
        acc
    };
    // derivative coefficients
    let deriv: Vec<Fp2> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| {
            let scalar = Fp2 {
                re: (k as u64) % prime,
                im: 0,
            };
            ctx.mul(scalar, *c)
        })
        .collect();
    let mut roots = Vec::new();
    for re in 0..prime {
        for im in 0..prime {
            let x = Fp2 { re, im };
            if ctx.is_zero(eval(x, &coeffs)) {
                if ctx.is_zero(eval(x, &deriv)) {
                    // repeated root mod p: pick another prime
                    return None;
                }
                roots.push(x);
            }
        }
    }
    Some(roots)
}

/// Modular Gaussian-integer arithmetic helpers over Z[i]/m.
fn gim_add(a: &GInt, b: &GInt, m: &BigInt) -> GInt {
    ((&a.0 + &b.0).mod_floor(m), (&a.1 + &b.1).mod_floor(m))
}

fn gim_sub(a: &GInt, b: &GInt, m: &BigInt) -> GInt {
    ((&a.0 - &b.0).mod_floor(m), (&a.1 - &b.1).mod_floor(m))
}

fn gim_mul(a: &GInt, b: &GInt, m: &BigInt) -> GInt {
    (
        (&a.0 * &b.0 - &a.1 * &b.1).mod_floor(m),
        (&a.0 * &b.1 + &a.1 * &b.0).mod_floor(m),
    )
}

/// Inverse of a mod m for m a power of an inert prime: via N(a)^-1.
fn gim_inv(a: &GInt, m: &BigInt) -> Option<GInt> {
    let norm = (&a.0 * &a.0 + &a.1 * &a.1).mod_floor(m);
    let inv_norm = mod_inverse(&norm, m)?;
    let conj = (a.0.mod_floor(m), (-&a.1).mod_floor(m));
    Some((
        (&conj.0 * &inv_norm).mod_floor(m),
        (&conj.1 * &inv_norm).mod_floor(m),
    ))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

fn gim_eval(coeffs: &[GInt], x: &GInt, m: &BigInt) -> GInt {
    let mut acc = (BigInt::zero(), BigInt::zero());
    for c in coeffs.iter().rev() {
        acc = gim_add(&gim_mul(&acc, x, m), c, m);
    }
    acc
}

/// Newton-lifts a simple residue-field root to modulus >= target and
/// reconstructs a field element within the height bounds.
fn lift_and_reconstruct(
    ints: &[GInt],
    prime: u64,
    root: Fp2,
    target: &BigInt,
    bound_num: &BigInt,
    bound_den: &BigInt,
) -> Option<GaussRat> {
    let deriv: Vec<GInt> = ints
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| (&c.0 * BigInt::from(k), &c.1 * BigInt::from(k)))
        .collect();
    let mut modulus = BigInt::from(prime);
    let mut x: GInt = (BigInt::from(root.re), BigInt::from(root.im));
    while &modulus < target {
        modulus = &modulus * &modulus;
        let fx = gim_eval(ints, &x, &modulus);
        let dfx = gim_eval(&deriv, &x, &modulus);
        let inv = gim_inv(&dfx, &modulus)?;
        let step = gim_mul(&fx, &inv, &modulus);
        x = gim_sub(&x, &step, &modulus);
    }
    let re = rational_reconstruct(&x.0, &modulus, bound_num, bound_den)?;
    let im = rational_reconstruct(&x.1, &modulus, bound_num, bound_den)?;
    Some(GaussRat::new(re, im))
}

/// Wang-style rational reconstruction: v/w = c mod m with |v| <= bound_num
/// and 0 < w <= bound_den. Used by the root lifting above.
fn rational_reconstruct(
    c: &BigInt,
    m: &BigInt,
    bound_num: &BigInt,
    bound_den: &BigInt,
) -> Option<BigRational> {
    let mut r0 = m.clone();
    let mut r1 = c.mod_floor(m);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while &r1 > bound_num {
        if r1.is_zero() {
            return None;
        }
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > *bound_den {
        return None;
    }
    let (num, den) = if t1.is_negative() {
        (-r1, -t1)
    } else {
        (r1, t1)
    };
    Some(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn root_set(p: &Poly) -> (Vec<(GaussRat, usize)>, bool) {
        roots_in_field(p)
    }

    #[test]
    fn t_squared() {
        let (roots, split) = root_set(&Poly::from_ints(&[0, 0, 1]));
        assert_eq!(roots, vec![(GaussRat::zero(), 2)]);
        assert!(split);
    }

    #[test]
    fn t_squared_plus_one() {
        let (roots, split) = root_set(&Poly::from_ints(&[1, 0, 1]));
        assert!(split);
        assert_eq!(roots.len(), 2);
        assert!(roots.contains(&(GaussRat::i(), 1)));
        assert!(roots.contains(&(-&GaussRat::i(), 1)));
    }

    #[test]
    fn t_squared_minus_two_does_not_split() {
        let (roots, split) = root_set(&Poly::from_ints(&[-2, 0, 1]));
        assert!(roots.is_empty());
        assert!(!split);
    }

    #[test]
    fn quadratic_residue_everywhere_but_irrational() {
        // (t^2-2)(t^2-3)(t^2-6): some factor has roots modulo every prime,
        // yet none lie in Q(i); lifting must reject all the spurious ones.
        let p = Poly::from_ints(&[-2, 0, 1])
            .mul(&Poly::from_ints(&[-3, 0, 1]))
            .mul(&Poly::from_ints(&[-6, 0, 1]));
        let (roots, split) = root_set(&p);
        assert!(roots.is_empty());
        assert!(!split);
    }

    #[test]
    fn rational_roots_with_large_height() {
        // (t - 97)(t - 1/101)(t + 355/113)
        let a = Poly::linear(&GaussRat::from_int(97));
        let b = Poly::linear(&GaussRat::from_parts(1, 0, 101));
        let c = Poly::linear(&GaussRat::from_parts(-355, 0, 113));
        let (roots, split) = root_set(&a.mul(&b).mul(&c));
        assert!(split);
        assert!(roots.contains(&(GaussRat::from_int(97), 1)));
        assert!(roots.contains(&(GaussRat::from_parts(1, 0, 101), 1)));
        assert!(roots.contains(&(GaussRat::from_parts(-355, 0, 113), 1)));
    }

    #[test]
    fn complex_roots_with_multiplicity() {
        // (t - (2+3i)/5)^2 (t - i) (t + 1)
        let r = GaussRat::from_parts(2, 3, 5);
        let lin = Poly::linear(&r);
        let p = lin
            .mul(&lin)
            .mul(&Poly::linear(&GaussRat::i()))
            .mul(&Poly::linear(&GaussRat::from_int(-1)));
        let (roots, split) = root_set(&p);
        assert!(split);
        assert!(roots.contains(&(r, 2)));
        assert!(roots.contains(&(GaussRat::i(), 1)));
        assert!(roots.contains(&(GaussRat::from_int(-1), 1)));
    }

    #[test]
    fn mixed_split_detected() {
        // (t - i)(t^2 - 2): only i is in the field.
        let p = Poly::linear(&GaussRat::i()).mul(&Poly::from_ints(&[-2, 0, 1]));
        let (roots, split) = root_set(&p);
        assert_eq!(roots, vec![(GaussRat::i(), 1)]);
        assert!(!split);
    }

    #[test]
    fn rational_reconstruction_basics() {
        // 2/3 mod 10007
        let m = BigInt::from(10007);
        let inv3 = mod_inverse(&BigInt::from(3), &m).unwrap();
        let c = (BigInt::from(2) * inv3).mod_floor(&m);
        let rec = rational_reconstruct(&c, &m, &BigInt::from(50), &BigInt::from(50)).unwrap();
        assert_eq!(rec, BigRational::new(BigInt::from(2), BigInt::from(3)));
    }
}
