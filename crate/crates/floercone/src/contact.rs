//! Contact surgery combinatorics: negative continued fractions, conversion of
//! rational contact surgery coefficients into chains of ±1 surgeries with
//! prescribed stabilizations, Legendrian invariant bookkeeping, spin^c label
//! arithmetic, and end-to-end tightness certificates for negative rational
//! surgeries.

use serde::Serialize;

use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ContactError {
    #[error("continued fraction expansion requires a negative rational, got {0}")]
    NonNegative(Rat),
    #[error("strict expansion (all entries <= -2) requires q < -1, got {0}")]
    StrictRange(Rat),
    #[error("expected a positive surgery coefficient, got {0}")]
    NotPositive(Rat),
    #[error(
        "r = 0: zero surgery always carries a taut foliation and hence a tight contact structure; certificates cover r > 0"
    )]
    ZeroSurgery,
    #[error("tb = 1: the surgered manifold is not a rational homology sphere")]
    TbOne,
    #[error("c1 pairing value {pairing} and n = {n} have mismatched parity: (pairing - n)/2 is not an integer")]
    ParityViolation { pairing: Rat, n: i64 },
    #[error("malformed plan: {0}")]
    MalformedPlan(String),
}

/// Classical invariants of a Legendrian representative, with the genus of the
/// underlying knot type and the order of its homology class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LegendrianData {
    pub knot_name: String,
    pub genus: u32,
    pub tb: Rat,
    pub rot: Rat,
    pub order: u32,
}

impl LegendrianData {
    /// tb != 1 and tb - rot = 2g - 1.
    pub fn is_admissible(&self) -> bool {
        self.tb != Rat::int(1)
            && self.tb - self.rot == Rat::int(2 * i64::from(self.genus) - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabSign {
    Positive,
    Negative,
}

/// Stabilize `count` times: tb drops by count; rot moves by ±count.
/// Negative stabilization decreases rot and preserves the dual-knot Alexander
/// bookkeeping used by the certificates.
pub fn stabilize(l: &LegendrianData, sign: StabSign, count: u32) -> LegendrianData {
    let c = Rat::int(i64::from(count));
    LegendrianData {
        tb: l.tb - c,
        rot: match sign {
            StabSign::Negative => l.rot - c,
            StabSign::Positive => l.rot + c,
        },
        ..l.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfMode {
    /// All entries <= -2; requires q < -1.
    Strict,
    /// Leading entry allowed to be -1; accepts any q < 0.
    LeadMinusOne,
}

/// Negative continued fraction expansion
/// `q = a_1 - 1/(a_2 - 1/(... - 1/a_m))`
/// with `a_1 = floor(q)` (so `a_1 <= -1`, and `<= -2` when q < -1) and all
/// subsequent entries `<= -2`. Unique in each mode and round-trips exactly.
pub fn neg_cf(q: Rat, mode: CfMode) -> Result<Vec<i64>, ContactError> {
    if !q.is_negative() {
        return Err(ContactError::NonNegative(q));
    }
    if mode == CfMode::Strict && q >= Rat::int(-1) {
        return Err(ContactError::StrictRange(q));
    }
    let mut entries = Vec::new();
    let mut cur = q;
    loop {
        let a = cur.floor_int();
        entries.push(a);
        if cur == Rat::int(a) {
            break;
        }
        // a - cur is in (-1, 0), so the next value is < -1
        cur = (Rat::int(a) - cur).recip();
    }
    Ok(entries)
}

/// Evaluate a negative continued fraction. `None` on a zero denominator.
pub fn eval_neg_cf(entries: &[i64]) -> Option<Rat> {
    let mut it = entries.iter().rev();
    let mut val = Rat::int(*it.next()?);
    for &a in it {
        if val.is_zero() {
            return None;
        }
        val = Rat::int(a) - val.recip();
    }
    Some(val)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainComponent {
    pub stabilizations: u32,
    /// +1 or -1.
    pub contact_coefficient: i64,
}

/// A contact surgery plan: `pushoff_plus_count` Legendrian push-offs with
/// contact +1, followed by a chain of contact -1 components carrying the
/// listed stabilization counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurgeryPlan {
    pub contact_coefficient: Rat,
    pub pushoff_plus_count: u32,
    pub chain: Vec<ChainComponent>,
    pub cf_expansion: Vec<i64>,
    /// Set for positive coefficients 1/k: the chain is empty and the plan is
    /// just k push-offs.
    pub degenerate: bool,
}

fn chain_from_cf(cf: &[i64]) -> Vec<ChainComponent> {
    cf.iter()
        .enumerate()
        .map(|(i, &a)| ChainComponent {
            stabilizations: if i == 0 {
                (-a - 1).max(0) as u32
            } else {
                (-a - 2).max(0) as u32
            },
            contact_coefficient: -1,
        })
        .collect()
}

/// Plan for a positive contact surgery coefficient r = x/y: e push-offs with
/// contact +1 (e minimal positive with x/(y - ex) < 0) and the strict
/// continued-fraction chain of x/(y - ex). For x = 1 the chain degenerates to
/// the e = y push-offs alone.
pub fn dgs_positive(r: Rat) -> Result<SurgeryPlan, ContactError> {
    if !r.is_positive() {
        return Err(ContactError::NotPositive(r));
    }
    let (x, y) = (r.numer(), r.denom());
    if x == 1 {
        return Ok(SurgeryPlan {
            contact_coefficient: r,
            pushoff_plus_count: y as u32,
            chain: Vec::new(),
            cf_expansion: Vec::new(),
            degenerate: true,
        });
    }
    let e = y.div_euclid(x) + 1;
    let q = Rat::new(x, y - e * x);
    let cf = neg_cf(q, CfMode::Strict)?;
    Ok(SurgeryPlan {
        contact_coefficient: r,
        pushoff_plus_count: e as u32,
        chain: chain_from_cf(&cf),
        cf_expansion: cf,
        degenerate: false,
    })
}

/// Plan for a negative contact surgery coefficient: the lead-minus-one
/// continued fraction of r, realized as a chain of contact -1 surgeries where
/// component 1 is the knot itself with |a_1 + 1| stabilizations and component
/// i is a push-off of component i - 1 with |a_i + 2| stabilizations.
pub fn dgs_negative(r: Rat) -> Result<SurgeryPlan, ContactError> {
    if !r.is_negative() {
        return Err(ContactError::NonNegative(r));
    }
    let cf = neg_cf(r, CfMode::LeadMinusOne)?;
    Ok(SurgeryPlan {
        contact_coefficient: r,
        pushoff_plus_count: 0,
        chain: chain_from_cf(&cf),
        cf_expansion: cf,
        degenerate: false,
    })
}

/// Recompute the smooth surgery coefficient a plan produces on a Legendrian
/// with the given tb, by slam-dunking the chain as a meridian tower (chain
/// component i >= 2 rides a standard meridian, tb = -1 - stabilizations) and
/// composing the +1 push-offs reciprocally. For a valid plan this equals
/// tb + contact_coefficient.
pub fn smooth_roundtrip(plan: &SurgeryPlan, tb: Rat) -> Result<Rat, ContactError> {
    let e = i64::from(plan.pushoff_plus_count);
    if plan.chain.is_empty() {
        if e == 0 {
            return Err(ContactError::MalformedPlan(
                "no push-offs and no chain".to_string(),
            ));
        }
        // e push-offs with contact +1 compose to contact 1/e
        return Ok(tb + Rat::new(1, e));
    }

    // smooth framings: tb_i + contact coefficient, fold as continued fraction
    let framings: Vec<Rat> = plan
        .chain
        .iter()
        .enumerate()
        .map(|(i, comp)| {
            let stabs = Rat::int(i64::from(comp.stabilizations));
            let tb_i = if i == 0 { tb - stabs } else { Rat::int(-1) - stabs };
            tb_i + Rat::int(comp.contact_coefficient)
        })
        .collect();
    let mut it = framings.iter().rev();
    let mut val = *it.next().expect("chain is nonempty");
    for &f in it {
        if val.is_zero() {
            return Err(ContactError::MalformedPlan(
                "zero denominator while slam-dunking the chain".to_string(),
            ));
        }
        val = f - val.recip();
    }
    let chain_contact = val - tb;
    if e == 0 {
        return Ok(tb + chain_contact);
    }
    if chain_contact.is_zero() {
        return Err(ContactError::MalformedPlan(
            "chain evaluates to contact coefficient zero".to_string(),
        ));
    }
    let inv = Rat::int(e) + chain_contact.recip();
    if inv.is_zero() {
        return Err(ContactError::MalformedPlan(
            "push-offs cancel the chain coefficient".to_string(),
        ));
    }
    Ok(tb + inv.recip())
}

/// Rational classical invariants of the Legendrian push-off after Legendrian
/// surgery: with t = tb, (tb_Q, rot_Q) = (t - t^2/(t-1), rot - rot*t/(t-1)).
pub fn pushoff_after_surgery(l: &LegendrianData) -> Result<(Rat, Rat), ContactError> {
    let t = l.tb;
    if t == Rat::int(1) {
        return Err(ContactError::TbOne);
    }
    let denom = t - Rat::int(1);
    let tb_q = t - t * t / denom;
    let rot_q = l.rot - l.rot * t / denom;
    Ok((tb_q, rot_q))
}

/// Alexander grading forced on the distinguished class: (tb_Q - rot_Q + 1)/2.
pub fn loss_alexander(tb_q: Rat, rot_q: Rat) -> Rat {
    (tb_q - rot_q + Rat::int(1)) / Rat::int(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingMode {
    /// Pairing value order * rot.
    LegendrianSurgery,
    /// Pairing value order * (rot + n - 1).
    PositiveContactSurgery,
}

/// Spin^c label in Z/n from the c1 pairing congruence
/// `pairing - n = 2i (mod 2n)`.
pub fn spinc_label(rot: Rat, n: i64, mode: PairingMode, order: u32) -> Result<i64, ContactError> {
    assert!(n >= 1);
    let pairing = match mode {
        PairingMode::LegendrianSurgery => rot * i64::from(order),
        PairingMode::PositiveContactSurgery => {
            (rot + Rat::int(n - 1)) * i64::from(order)
        }
    };
    let shifted = pairing - Rat::int(n);
    if !shifted.is_integer() || shifted.numer() % 2 != 0 {
        return Err(ContactError::ParityViolation { pairing, n });
    }
    Ok((shifted.numer() / 2).rem_euclid(n))
}

/// End-to-end record certifying that smooth (-r)-surgery supports a tight
/// contact structure via a Legendrian surgery chain on the standard
/// (tb 0, rot -2g+1) representative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TightnessCertificate {
    pub knot_name: String,
    pub genus: u32,
    pub r: Rat,
    pub base_legendrian: LegendrianData,
    pub plan: SurgeryPlan,
    pub first_surgery_legendrian: LegendrianData,
    pub admissibility: bool,
    /// Smooth coefficient of the first Legendrian surgery, negated.
    pub n_effective: i64,
    pub spinc_label: i64,
    pub loss_alexander: Rat,
    pub warnings: Vec<String>,
}

/// Assemble the certificate for smooth (-r)-surgery on a genus-g knot.
pub fn certify_tight(genus: u32, r: Rat) -> Result<TightnessCertificate, ContactError> {
    if r.is_zero() {
        return Err(ContactError::ZeroSurgery);
    }
    if !r.is_positive() {
        return Err(ContactError::NotPositive(r));
    }
    let g = i64::from(genus);
    let base = LegendrianData {
        knot_name: format!("genus{genus}_standard"),
        genus,
        tb: Rat::int(0),
        rot: Rat::int(-2 * g + 1),
        order: 1,
    };
    let plan = dgs_negative(-r)?;
    let first_stabs = plan.chain[0].stabilizations;
    let first = stabilize(&base, StabSign::Negative, first_stabs);
    let admissibility = first.is_admissible();
    let n_effective = i64::from(first_stabs) + 1;
    let spinc = (Rat::int(1 - g).numer()).rem_euclid(n_effective);
    let loss = Rat::new(2 * g + n_effective - 1, 2 * n_effective);

    let mut warnings = Vec::new();
    if genus == 0 {
        warnings.push(
            "genus 0: top-grading formulas for the dual knot presuppose genus >= 1".to_string(),
        );
    }
    if !admissibility {
        warnings.push("first surgery Legendrian is not admissible".to_string());
    }

    Ok(TightnessCertificate {
        knot_name: base.knot_name.clone(),
        genus,
        r,
        base_legendrian: base,
        plan,
        first_surgery_legendrian: first,
        admissibility,
        n_effective,
        spinc_label: spinc,
        loss_alexander: loss,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn neg_cf_anchor_values() {
        assert_eq!(neg_cf(rat("-3/2"), CfMode::Strict).unwrap(), vec![-2, -2]);
        assert_eq!(neg_cf(rat("-4"), CfMode::Strict).unwrap(), vec![-4]);
        assert_eq!(
            neg_cf(rat("-7/5"), CfMode::Strict).unwrap(),
            vec![-2, -2, -3]
        );
        assert_eq!(neg_cf(rat("-1"), CfMode::LeadMinusOne).unwrap(), vec![-1]);
        assert_eq!(
            neg_cf(rat("-1/2"), CfMode::LeadMinusOne).unwrap(),
            vec![-1, -2]
        );
    }

    #[test]
    fn neg_cf_rejects_out_of_range() {
        assert!(matches!(
            neg_cf(rat("1/2"), CfMode::Strict),
            Err(ContactError::NonNegative(_))
        ));
        assert!(matches!(
            neg_cf(rat("-1"), CfMode::Strict),
            Err(ContactError::StrictRange(_))
        ));
        assert!(matches!(
            neg_cf(rat("0"), CfMode::LeadMinusOne),
            Err(ContactError::NonNegative(_))
        ));
    }

    #[test]
    fn neg_cf_entries_obey_mode_bounds() {
        for (num, den) in [(-7, 5), (-3, 1), (-15, 4), (-1, 7), (-99, 100)] {
            let q = Rat::new(num, den);
            let cf = neg_cf(q, CfMode::LeadMinusOne).unwrap();
            assert!(cf[0] <= -1);
            assert!(cf[1..].iter().all(|&a| a <= -2), "{q}: {cf:?}");
            assert_eq!(eval_neg_cf(&cf).unwrap(), q);
        }
    }

    #[test]
    fn dgs_positive_anchors() {
        let p = dgs_positive(rat("3")).unwrap();
        assert_eq!(p.pushoff_plus_count, 1);
        assert_eq!(p.cf_expansion, vec![-2, -2]);
        let stabs: Vec<u32> = p.chain.iter().map(|c| c.stabilizations).collect();
        assert_eq!(stabs, vec![1, 0]);

        for n in 1..=10i64 {
            let p = dgs_positive(Rat::new(n + 1, n)).unwrap();
            assert_eq!(p.pushoff_plus_count, 1, "n = {n}");
            assert_eq!(p.cf_expansion, vec![-(n + 1)]);
            let stabs: Vec<u32> = p.chain.iter().map(|c| c.stabilizations).collect();
            assert_eq!(stabs, vec![n as u32]);
        }

        let p = dgs_positive(rat("2")).unwrap();
        assert_eq!(p.pushoff_plus_count, 1);
        assert_eq!(p.cf_expansion, vec![-2]);
        assert_eq!(p.chain[0].stabilizations, 1);
    }

    #[test]
    fn dgs_positive_degenerate_cases() {
        let p = dgs_positive(rat("1")).unwrap();
        assert!(p.degenerate);
        assert_eq!(p.pushoff_plus_count, 1);
        assert!(p.chain.is_empty());
        for k in 2..=5i64 {
            let p = dgs_positive(Rat::new(1, k)).unwrap();
            assert!(p.degenerate);
            assert_eq!(p.pushoff_plus_count, k as u32);
        }
    }

    #[test]
    fn dgs_negative_anchors() {
        let p = dgs_negative(rat("-1")).unwrap();
        assert_eq!(p.cf_expansion, vec![-1]);
        assert_eq!(p.chain.len(), 1);
        assert_eq!(p.chain[0].stabilizations, 0);

        let p = dgs_negative(rat("-7/5")).unwrap();
        assert_eq!(p.cf_expansion, vec![-2, -2, -3]);
        let stabs: Vec<u32> = p.chain.iter().map(|c| c.stabilizations).collect();
        assert_eq!(stabs, vec![1, 0, 1]);

        let p = dgs_negative(rat("-1/2")).unwrap();
        assert_eq!(p.cf_expansion, vec![-1, -2]);
        let stabs: Vec<u32> = p.chain.iter().map(|c| c.stabilizations).collect();
        assert_eq!(stabs, vec![0, 0]);
    }

    #[test]
    fn smooth_roundtrip_anchors() {
        let p = dgs_negative(rat("-7/5")).unwrap();
        assert_eq!(smooth_roundtrip(&p, Rat::int(0)).unwrap(), rat("-7/5"));

        let p = dgs_negative(rat("-1")).unwrap();
        assert_eq!(smooth_roundtrip(&p, Rat::int(0)).unwrap(), rat("-1"));

        let p = dgs_negative(rat("-1/2")).unwrap();
        assert_eq!(smooth_roundtrip(&p, Rat::int(0)).unwrap(), rat("-1/2"));

        let p = dgs_positive(rat("3")).unwrap();
        for t in -3..=3 {
            assert_eq!(
                smooth_roundtrip(&p, Rat::int(t)).unwrap(),
                Rat::int(t + 3),
                "tb = {t}"
            );
        }
    }

    #[test]
    fn stabilization_moves_invariants() {
        let l = LegendrianData {
            knot_name: "k".into(),
            genus: 1,
            tb: Rat::int(0),
            rot: Rat::int(-1),
            order: 1,
        };
        let s = stabilize(&l, StabSign::Negative, 1);
        assert_eq!((s.tb, s.rot), (Rat::int(-1), Rat::int(-2)));
        let l0 = LegendrianData {
            rot: Rat::int(0),
            ..l.clone()
        };
        let s = stabilize(&l0, StabSign::Positive, 1);
        assert_eq!((s.tb, s.rot), (Rat::int(-1), Rat::int(1)));
        let same = stabilize(&l, StabSign::Negative, 0);
        assert_eq!(same, l);
    }

    #[test]
    fn admissibility_preserved_by_negative_stabilization() {
        for tb in -4..=4i64 {
            for g in 0..=3u32 {
                let l = LegendrianData {
                    knot_name: "k".into(),
                    genus: g,
                    tb: Rat::int(tb),
                    rot: Rat::int(tb - 2 * i64::from(g) + 1),
                    order: 1,
                };
                if !l.is_admissible() {
                    continue;
                }
                if l.tb != Rat::int(2) {
                    assert!(stabilize(&l, StabSign::Negative, 1).is_admissible());
                } else {
                    assert!(stabilize(&l, StabSign::Negative, 2).is_admissible());
                }
            }
        }
    }

    #[test]
    fn pushoff_transforms() {
        let mk = |tb: i64, rot: i64, g: u32| LegendrianData {
            knot_name: "k".into(),
            genus: g,
            tb: Rat::int(tb),
            rot: Rat::int(rot),
            order: 1,
        };
        assert_eq!(
            pushoff_after_surgery(&mk(0, -1, 1)).unwrap(),
            (Rat::int(0), Rat::int(-1))
        );
        assert_eq!(
            pushoff_after_surgery(&mk(-1, -2, 1)).unwrap(),
            (rat("-1/2"), Rat::int(-1))
        );
        assert_eq!(
            pushoff_after_surgery(&mk(-2, -5, 2)).unwrap(),
            (rat("-2/3"), rat("-5/3"))
        );
        assert!(matches!(
            pushoff_after_surgery(&mk(1, 0, 1)),
            Err(ContactError::TbOne)
        ));
    }

    #[test]
    fn loss_alexander_values() {
        assert_eq!(loss_alexander(Rat::int(0), Rat::int(0)), rat("1/2"));
        assert_eq!(loss_alexander(rat("-1/2"), Rat::int(-1)), rat("3/4"));
        for n in 1..=6i64 {
            for g in 1..=3i64 {
                let tb_q = Rat::new(1 - n, n);
                let rot_q = Rat::new(-n - 2 * g + 2, n);
                assert_eq!(
                    loss_alexander(tb_q, rot_q),
                    Rat::new(2 * g + n - 1, 2 * n)
                );
            }
        }
    }

    #[test]
    fn spinc_label_values() {
        for n in 1..=6i64 {
            for g in 1..=3i64 {
                let rot = Rat::int(-n - 2 * g + 2);
                let label = spinc_label(rot, n, PairingMode::LegendrianSurgery, 1).unwrap();
                assert_eq!(label, (1 - g).rem_euclid(n));
            }
        }
        assert_eq!(
            spinc_label(rat("-17"), 1, PairingMode::LegendrianSurgery, 1).unwrap(),
            0
        );
        // rot = -n - 2g + 2 with g = 3, n = 5
        assert_eq!(
            spinc_label(rat("-9"), 5, PairingMode::LegendrianSurgery, 1).unwrap(),
            3
        );
        assert!(matches!(
            spinc_label(rat("-4"), 5, PairingMode::LegendrianSurgery, 1),
            Err(ContactError::ParityViolation { .. })
        ));
    }

    #[test]
    fn certify_examples() {
        let c = certify_tight(1, rat("1")).unwrap();
        assert_eq!(c.plan.cf_expansion, vec![-1]);
        assert_eq!(c.first_surgery_legendrian.tb, Rat::int(0));
        assert_eq!(c.first_surgery_legendrian.rot, Rat::int(-1));
        assert_eq!(c.n_effective, 1);
        assert_eq!(c.spinc_label, 0);
        assert_eq!(c.loss_alexander, Rat::int(1));
        assert!(c.admissibility);

        let c = certify_tight(2, rat("7/5")).unwrap();
        assert_eq!(c.plan.cf_expansion, vec![-2, -2, -3]);
        assert_eq!(c.first_surgery_legendrian.tb, Rat::int(-1));
        assert_eq!(c.first_surgery_legendrian.rot, Rat::int(-4));
        assert!(c.admissibility);
        assert_eq!(c.n_effective, 2);
        assert_eq!(c.spinc_label, 1);
        assert_eq!(c.loss_alexander, rat("5/4"));

        let c = certify_tight(0, rat("3")).unwrap();
        assert_eq!(c.plan.cf_expansion, vec![-3]);
        assert_eq!(c.first_surgery_legendrian.tb, Rat::int(-2));
        assert_eq!(c.first_surgery_legendrian.rot, Rat::int(-1));
        assert!(c.admissibility);
        assert_eq!(c.n_effective, 3);
        assert_eq!(c.spinc_label, 1);
        assert_eq!(c.loss_alexander, rat("1/3"));
        assert!(!c.warnings.is_empty());

        assert!(matches!(
            certify_tight(1, Rat::int(0)),
            Err(ContactError::ZeroSurgery)
        ));
        assert!(matches!(
            certify_tight(1, rat("-2")),
            Err(ContactError::NotPositive(_))
        ));
    }

    #[test]
    fn stabilized_surgery_composes_with_meridian_surgery() {
        // Legendrian surgery on the n-fold stabilization equals Legendrian
        // surgery followed by contact (n+1)/n on the standard meridian,
        // compared through the smooth coefficients.
        for n in 1..=8i64 {
            for t in -3..=3i64 {
                let tb = Rat::int(t);
                let neg = dgs_negative(Rat::int(-1)).unwrap();
                let stabbed_tb = tb - Rat::int(n);
                let lhs = smooth_roundtrip(&neg, stabbed_tb).unwrap();

                let on_l = smooth_roundtrip(&neg, tb).unwrap();
                let meridian_plan = dgs_positive(Rat::new(n + 1, n)).unwrap();
                let rho = smooth_roundtrip(&meridian_plan, Rat::int(-1)).unwrap();
                let rhs = on_l - rho.recip();
                assert_eq!(lhs, rhs, "n = {n}, tb = {t}");
            }
        }
    }
}
