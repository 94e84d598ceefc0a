//! Finitely presented groups with peripheral data, and verification of
//! morphisms onto the even triangle group generated by x, y.
//!
//! The verification runs in a matrix realization (the triangle group at the
//! unipotent angle, or the solved pair with unipotent commutator): relators
//! and claimed relations must map to the projective identity, witness words
//! must hit x, y, xy, xy^-1, and peripheral images must be unipotent.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::config::Tolerances;
use crate::herm::{
    classify, projective_dist, GroupElement, HermError, IsometryClass, IsometryTag,
};
use crate::homology::{abelianization_matrix, smith_invariants, surjects_onto, AbelianGroup};
use crate::lagrangian::{self, LagrangianError};
use crate::linalg::{Mat3, C64};
use crate::triangle::{
    build, elliptic_trace, Order, TriangleError, TriangleRealization, TriangleSpec,
};
use crate::word::{Alphabet, Word, WordError, WordEvaluator};

#[derive(Debug, Error)]
pub enum PresentationError {
    #[error("relator or peripheral word uses letters outside the generators: {0}")]
    LetterOutsideGenerators(#[source] WordError),
    #[error("no cusp with index {0}")]
    NoSuchCusp(usize),
    #[error("bad Dehn-filling slope ({0}, {1}): gcd must be 1")]
    BadSlope(i64, i64),
    #[error("missing witness words")]
    MissingWitness,
    #[error("no image word for generator '{0}'")]
    MissingImage(char),
    #[error("failed to build the target realization: {0}")]
    BuildFailure(#[from] TriangleError),
    #[error("lagrangian target: {0}")]
    Lagrangian(#[from] LagrangianError),
    #[error(transparent)]
    Word(WordError),
    #[error(transparent)]
    Herm(#[from] HermError),
}

impl From<WordError> for PresentationError {
    fn from(e: WordError) -> Self {
        PresentationError::Word(e)
    }
}

/// A finite presentation with peripheral (meridian, longitude) word pairs.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub name: String,
    pub generators: Vec<char>,
    pub relators: Vec<Word>,
    pub peripheral: Vec<(Word, Word)>,
}

impl Presentation {
    pub fn new(
        name: &str,
        generators: &[char],
        relators: Vec<Word>,
        peripheral: Vec<(Word, Word)>,
    ) -> Result<Self, PresentationError> {
        let alphabet = Alphabet::new(generators);
        for w in relators
            .iter()
            .chain(peripheral.iter().flat_map(|(m, l)| [m, l]))
        {
            w.check_alphabet(&alphabet)
                .map_err(PresentationError::LetterOutsideGenerators)?;
        }
        Ok(Presentation {
            name: name.to_string(),
            generators: generators.to_vec(),
            relators,
            peripheral,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(&self.generators)
    }
}

/// How the target group is realized by matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealizationKind {
    /// Triangle realization at the unipotent angle.
    TriangleUnipotent,
    /// Pair with tr[x,y] = 3 from the commutator solver.
    Lagrangian,
}

/// Expression over the four witness words, e.g. `wxy^-2 wy^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessExpr(pub Vec<(WitnessSymbol, i32)>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessSymbol {
    Wx,
    Wy,
    Wxy,
    WxyInv,
}

impl WitnessExpr {
    pub fn parse(s: &str) -> Result<Self, WordError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut out = Vec::new();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (sym, len) = if rest.starts_with("wxyinv") {
                (WitnessSymbol::WxyInv, 6)
            } else if rest.starts_with("wxy") {
                (WitnessSymbol::Wxy, 3)
            } else if rest.starts_with("wx") {
                (WitnessSymbol::Wx, 2)
            } else if rest.starts_with("wy") {
                (WitnessSymbol::Wy, 2)
            } else {
                return Err(WordError::Syntax(rest.to_string()));
            };
            rest = &rest[len..];
            let mut k = 1i32;
            if let Some(stripped) = rest.strip_prefix('^') {
                let digits: String = stripped
                    .chars()
                    .take_while(|c| c.is_ascii_digit() || *c == '-')
                    .collect();
                k = digits
                    .parse()
                    .map_err(|_| WordError::Syntax(rest.to_string()))?;
                rest = &stripped[digits.len()..];
            }
            out.push((sym, k));
        }
        Ok(WitnessExpr(out))
    }

    pub fn expand(&self, w: &Witnesses) -> Word {
        let mut out = Word::empty();
        for (sym, k) in &self.0 {
            let base = match sym {
                WitnessSymbol::Wx => &w.wx,
                WitnessSymbol::Wy => &w.wy,
                WitnessSymbol::Wxy => &w.wxy,
                WitnessSymbol::WxyInv => &w.wxy_inv,
            };
            out = out.concat(&base.pow(*k));
        }
        out
    }
}

/// The four witness words over the presentation's generators, plus the
/// expressions recovering the generators from them.
#[derive(Clone, Debug)]
pub struct Witnesses {
    pub wx: Word,
    pub wy: Word,
    pub wxy: Word,
    pub wxy_inv: Word,
    pub wa: Option<BTreeMap<char, WitnessExpr>>,
}

/// A claimed morphism onto the even triangle group of order n (or infinity).
#[derive(Clone, Debug)]
pub struct MorphismSpec {
    pub target_n: Order,
    pub images: BTreeMap<char, Word>,
    pub witnesses: Option<Witnesses>,
    pub claimed_relations: Vec<Word>,
    pub kind: RealizationKind,
}

/// Matrix realization of the target group.
pub enum RealizedTarget {
    Triangle(TriangleRealization),
    Pair { x: GroupElement, y: GroupElement },
}

impl RealizedTarget {
    pub fn x(&self) -> &GroupElement {
        match self {
            RealizedTarget::Triangle(t) => &t.x,
            RealizedTarget::Pair { x, .. } => x,
        }
    }

    pub fn y(&self) -> &GroupElement {
        match self {
            RealizedTarget::Triangle(t) => &t.y,
            RealizedTarget::Pair { y, .. } => y,
        }
    }

    pub fn for_morphism(m: &MorphismSpec) -> Result<Self, PresentationError> {
        match m.kind {
            RealizationKind::TriangleUnipotent => {
                let spec = TriangleSpec::at_unipotent_angle(
                    Order::Finite(3),
                    Order::Finite(3),
                    m.target_n,
                )?;
                Ok(RealizedTarget::Triangle(build(&spec)?))
            }
            RealizationKind::Lagrangian => {
                let n = m.target_n.finite().ok_or(PresentationError::BuildFailure(
                    TriangleError::Unsupported(Order::Finite(3), Order::Finite(3), m.target_n),
                ))?;
                let sol = lagrangian::lagrangian_solve(n)?;
                Ok(RealizedTarget::Pair { x: sol.x, y: sol.y })
            }
        }
    }
}

/// One named check with its numeric residual.
#[derive(Clone, Debug)]
pub struct CheckLine {
    pub label: String,
    pub residual: f64,
    pub pass: bool,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "  [{}] {} (residual {:.3e})",
            if self.pass { "ok" } else { "FAIL" },
            self.label,
            self.residual
        )
    }
}

/// Per-cusp classification of the peripheral images.
#[derive(Clone, Debug)]
pub struct CuspReport {
    pub index: usize,
    pub meridian: IsometryClass,
    pub longitude: IsometryClass,
    /// Exponent k with longitude = meridian^k (projectively), if one exists.
    pub rank_one_power: Option<i32>,
    pub unipotent: bool,
}

impl CuspReport {
    fn image_ok(cls: &IsometryClass) -> bool {
        matches!(cls.tag, IsometryTag::Unipotent | IsometryTag::Identity)
    }
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub name: String,
    pub target_n: Order,
    pub relators: Vec<CheckLine>,
    pub claimed: Vec<CheckLine>,
    pub witnesses: Vec<CheckLine>,
    pub traces: Vec<CheckLine>,
    pub surjective: bool,
    pub trace_coordinates: Option<[C64; 5]>,
    pub cusps: Vec<CuspReport>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.relators.iter().all(|c| c.pass)
            && self.claimed.iter().all(|c| c.pass)
            && self.witnesses.iter().all(|c| c.pass)
            && self.traces.iter().all(|c| c.pass)
            && self.surjective
            && self.boundary_unipotent()
    }

    pub fn boundary_unipotent(&self) -> bool {
        self.cusps.iter().all(|c| c.unipotent)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} -> even triangle group, n = {}", self.name, self.target_n)?;
        writeln!(f, "relators:")?;
        for c in &self.relators {
            writeln!(f, "{c}")?;
        }
        if !self.claimed.is_empty() {
            writeln!(f, "claimed relations:")?;
            for c in &self.claimed {
                writeln!(f, "{c}")?;
            }
        }
        if !self.witnesses.is_empty() {
            writeln!(f, "witnesses:")?;
            for c in &self.witnesses {
                writeln!(f, "{c}")?;
            }
        }
        if !self.traces.is_empty() {
            writeln!(f, "traces:")?;
            for c in &self.traces {
                writeln!(f, "{c}")?;
            }
        }
        writeln!(
            f,
            "surjective onto <x,y>: {}",
            if self.surjective { "yes" } else { "unverified" }
        )?;
        if let Some(tc) = &self.trace_coordinates {
            writeln!(
                f,
                "trace coordinates (x, y, xy, xy^-1, [x,y]): {}",
                tc.iter()
                    .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
        }
        for c in &self.cusps {
            writeln!(
                f,
                "cusp {}: meridian {} (tr {:.6}{:+.6}i), longitude {}{}{}",
                c.index,
                c.meridian.tag,
                c.meridian.trace.re,
                c.meridian.trace.im,
                c.longitude.tag,
                match c.rank_one_power {
                    Some(k) => format!(", rank one (longitude = meridian^{k})"),
                    None => String::new(),
                },
                if c.unipotent { "" } else { "  [NOT UNIPOTENT]" }
            )?;
        }
        writeln!(
            f,
            "overall: {}",
            if self.pass() { "PASS" } else { "FAIL" }
        )
    }
}

fn evaluator_for(
    p: &Presentation,
    m: &MorphismSpec,
    target: &RealizedTarget,
) -> Result<WordEvaluator, PresentationError> {
    let mut xy_eval = WordEvaluator::new(&[('x', target.x().clone()), ('y', target.y().clone())])?;
    let mut images: Vec<(char, GroupElement)> = Vec::new();
    for &g in &p.generators {
        let img_word = m
            .images
            .get(&g)
            .ok_or(PresentationError::MissingImage(g))?;
        images.push((g, xy_eval.evaluate(img_word)?));
    }
    Ok(WordEvaluator::new(&images)?)
}

/// Runs the full verification: relators, claimed triangle-type relations,
/// witness equalities, prescribed traces, surjectivity, and the peripheral
/// classification.
pub fn verify_morphism(
    p: &Presentation,
    m: &MorphismSpec,
    tol: f64,
) -> Result<VerificationReport, PresentationError> {
    let target = RealizedTarget::for_morphism(m)?;
    verify_morphism_with(p, m, &target, tol)
}

pub fn verify_morphism_with(
    p: &Presentation,
    m: &MorphismSpec,
    target: &RealizedTarget,
    tol: f64,
) -> Result<VerificationReport, PresentationError> {
    let mut gamma = evaluator_for(p, m, target)?;
    let id = Mat3::identity();

    let mut relators = Vec::new();
    for rel in &p.relators {
        let g = gamma.evaluate_matrix(rel)?;
        let residual = projective_dist(&g, &id);
        relators.push(CheckLine {
            label: format!("gamma({rel}) = id"),
            residual,
            pass: residual < tol,
        });
    }

    let mut claimed = Vec::new();
    for rel in &m.claimed_relations {
        let g = gamma.evaluate_matrix(rel)?;
        let residual = projective_dist(&g, &id);
        claimed.push(CheckLine {
            label: format!("gamma({rel}) = id"),
            residual,
            pass: residual < tol,
        });
    }

    let mut witness_checks = Vec::new();
    let mut trace_checks = Vec::new();
    let mut surjective = false;
    let mut trace_coordinates = None;

    if let Some(w) = &m.witnesses {
        let x = target.x().matrix();
        let y = target.y().matrix();
        let xy = x.mul(y);
        let xy_inv = x.mul(&y.inverse().expect("isometries are invertible"));
        let pairs: [(&str, &Word, &Mat3); 4] = [
            ("gamma(wx) = x", &w.wx, x),
            ("gamma(wy) = y", &w.wy, y),
            ("gamma(wxy) = xy", &w.wxy, &xy),
            ("gamma(wxyinv) = xy^-1", &w.wxy_inv, &xy_inv),
        ];
        for (label, word, expect) in pairs {
            let g = gamma.evaluate_matrix(word)?;
            let residual = projective_dist(&g, expect);
            witness_checks.push(CheckLine {
                label: label.to_string(),
                residual,
                pass: residual < tol,
            });
        }
        // generators recovered from the witness subgroup
        if let Some(exprs) = &w.wa {
            for (g, expr) in exprs {
                let expanded = expr.expand(w);
                let lhs = gamma.evaluate_matrix(&expanded)?;
                let rhs = gamma.evaluate_matrix(&Word::parse(&g.to_string())?)?;
                let residual = projective_dist(&lhs, &rhs);
                witness_checks.push(CheckLine {
                    label: format!("gamma(w_{g}) = gamma({g}), w_{g} = {expanded}"),
                    residual,
                    pass: residual < tol,
                });
            }
        }
        // the witness images generate <x,y>, so the morphism is onto
        surjective = witness_checks.iter().take(2).all(|c| c.pass);

        let target_xy = match m.target_n {
            Order::Finite(n) => elliptic_trace(n),
            Order::Infinite => 3.0,
        };
        let trace_targets: [(&str, &Word, f64); 4] = [
            ("tr gamma(wx) = 0", &w.wx, 0.0),
            ("tr gamma(wy) = 0", &w.wy, 0.0),
            ("tr gamma(wxy)", &w.wxy, target_xy),
            ("tr gamma(wxyinv) = 3", &w.wxy_inv, 3.0),
        ];
        for (label, word, expect) in trace_targets {
            let tr = gamma.evaluate_matrix(word)?.trace();
            let residual = (tr - C64::new(expect, 0.0)).norm();
            trace_checks.push(CheckLine {
                label: format!("{label} (target {expect:.6})"),
                residual,
                pass: residual < tol,
            });
        }

        let gx = gamma.evaluate_matrix(&w.wx)?;
        let gy = gamma.evaluate_matrix(&w.wy)?;
        let comm = gx
            .mul(&gy)
            .mul(&gx.inverse().unwrap())
            .mul(&gy.inverse().unwrap());
        trace_coordinates = Some([
            gx.trace(),
            gy.trace(),
            gx.mul(&gy).trace(),
            gx.mul(&gy.inverse().unwrap()).trace(),
            comm.trace(),
        ]);
    }

    let cusps = check_peripheral_with(p, m, target, tol)?;

    Ok(VerificationReport {
        name: p.name.clone(),
        target_n: m.target_n,
        relators,
        claimed,
        witnesses: witness_checks,
        traces: trace_checks,
        surjective,
        trace_coordinates,
        cusps,
    })
}

/// Classifies the peripheral images per cusp and looks for a rank-one
/// relation longitude = meridian^k with |k| bounded.
pub fn check_peripheral(
    p: &Presentation,
    m: &MorphismSpec,
    tol: f64,
) -> Result<Vec<CuspReport>, PresentationError> {
    let target = RealizedTarget::for_morphism(m)?;
    check_peripheral_with(p, m, &target, tol)
}

pub fn check_peripheral_with(
    p: &Presentation,
    m: &MorphismSpec,
    target: &RealizedTarget,
    tol: f64,
) -> Result<Vec<CuspReport>, PresentationError> {
    let mut gamma = evaluator_for(p, m, target)?;
    let classify_tol = Tolerances::DEFAULT.trace_classify;
    let mut out = Vec::new();
    for (index, (mu, lam)) in p.peripheral.iter().enumerate() {
        let gm = gamma.evaluate(mu)?;
        let gl = gamma.evaluate(lam)?;
        let cm = classify(&gm, classify_tol)?;
        let cl = classify(&gl, classify_tol)?;

        let mut rank_one_power = None;
        if cm.tag == IsometryTag::Identity || cl.tag == IsometryTag::Identity {
            rank_one_power = Some(0);
        } else {
            let bound = Tolerances::DEFAULT.peripheral_power_bound;
            for k in -bound..=bound {
                if projective_dist(&gm.matrix().powi(k), gl.matrix()) < tol {
                    rank_one_power = Some(k);
                    break;
                }
            }
        }

        // every non-identity peripheral image must be unipotent
        let unipotent = CuspReport::image_ok(&cm) && CuspReport::image_ok(&cl);
        out.push(CuspReport {
            index,
            meridian: cm,
            longitude: cl,
            rank_one_power,
            unipotent,
        });
    }
    Ok(out)
}

/// Adds the relator meridian^p * longitude^q and removes the cusp.
pub fn dehn_fill(
    p: &Presentation,
    cusp_index: usize,
    fill_p: i64,
    fill_q: i64,
) -> Result<Presentation, PresentationError> {
    if cusp_index >= p.peripheral.len() {
        return Err(PresentationError::NoSuchCusp(cusp_index));
    }
    if gcd(fill_p.unsigned_abs(), fill_q.unsigned_abs()) != 1 {
        return Err(PresentationError::BadSlope(fill_p, fill_q));
    }
    let (mu, lam) = &p.peripheral[cusp_index];
    let relator = mu.pow(fill_p as i32).concat(&lam.pow(fill_q as i32));
    let mut relators = p.relators.clone();
    relators.push(relator);
    let mut peripheral = p.peripheral.clone();
    peripheral.remove(cusp_index);
    Ok(Presentation {
        name: format!("{}({},{})", p.name, fill_p, fill_q),
        generators: p.generators.clone(),
        relators,
        peripheral,
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Outcome of the homology obstruction.
#[derive(Clone, Debug)]
pub struct ObstructionVerdict {
    pub h1: AbelianGroup,
    pub target_ab: AbelianGroup,
    pub allowed: bool,
}

/// Abelianization of the target even triangle group: Z/3 when 3 does not
/// divide n, and (Z/3)^2 when 3 | n or n is infinite.
pub fn target_abelianization(n: Order) -> AbelianGroup {
    match n {
        Order::Finite(k) if k % 3 != 0 => AbelianGroup::cyclic(3),
        _ => AbelianGroup::from_invariants(0, &[3, 3]),
    }
}

/// Computes H_1 of the presentation and checks it can surject onto the
/// target's abelianization; `blocked` means no surjective morphism exists.
pub fn homology_obstruction(p: &Presentation, target_n: Order) -> ObstructionVerdict {
    let m = abelianization_matrix(&p.relators, &p.alphabet());
    let h1 = smith_invariants(&m);
    let target_ab = target_abelianization(target_n);
    let allowed = surjects_onto(&h1, &target_ab);
    ObstructionVerdict {
        h1,
        target_ab,
        allowed,
    }
}

/// The five trace coordinates (tr X, tr Y, tr XY, tr XY^-1, tr [X,Y]) that
/// pin an irreducible two-generator representation up to conjugation.
pub fn trace_coordinates(x: &GroupElement, y: &GroupElement) -> Result<[C64; 5], HermError> {
    if !crate::herm::same_form(x, y) {
        return Err(HermError::FormMismatch);
    }
    let xm = x.matrix();
    let ym = y.matrix();
    let y_inv = y.inverse();
    let comm = xm
        .mul(ym)
        .mul(&xm.inverse().unwrap())
        .mul(y_inv.matrix());
    Ok([
        xm.trace(),
        ym.trace(),
        xm.mul(ym).trace(),
        xm.mul(y_inv.matrix()).trace(),
        comm.trace(),
    ])
}
