//! Parametric previsions: transformers of `[0, +∞]`-valued continuations
//! that are positively homogeneous and monotone, and sampling-based
//! checks of the laws they are expected to satisfy.
//!
//! All arithmetic is exact, so every reported violation is a genuine
//! counterexample. Passing verdicts are evidence on the samples only.

mod laws;

use std::fmt;
use std::sync::Arc;

pub use laws::{check_laws, Chain, ChainKind, Counterexample, Law, LawReport, LawVerdict, SamplePlan};

use crate::answer::{Ans, AnsKind, Continuation, EvalTrace};
use crate::capacity::InputModel;
use crate::error::SemanticsError;
use crate::eval::{Env, Semantics};
use crate::syntax::{Instr, Label};
use crate::wp::{wp, WpConfig};

/// Where a prevision came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrevisionTag {
    WpOfProgram,
    Composed,
    SupOf,
    ChoquetInput,
    User,
}

impl fmt::Display for PrevisionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrevisionTag::WpOfProgram => "wp-of-program",
            PrevisionTag::Composed => "composed",
            PrevisionTag::SupOf => "sup-of",
            PrevisionTag::ChoquetInput => "choquet-input",
            PrevisionTag::User => "user",
        })
    }
}

type Transformer = dyn Fn(&Continuation) -> Result<Continuation, SemanticsError> + Send + Sync;

#[derive(Clone)]
pub struct ParametricPrevision {
    f: Arc<Transformer>,
    tag: PrevisionTag,
    name: String,
}

impl ParametricPrevision {
    pub fn user(
        name: impl Into<String>,
        f: impl Fn(&Continuation) -> Result<Continuation, SemanticsError> + Send + Sync + 'static,
    ) -> Self {
        ParametricPrevision { f: Arc::new(f), tag: PrevisionTag::User, name: name.into() }
    }

    pub fn identity() -> Self {
        ParametricPrevision::user("identity", |k| Ok(k.clone()))
    }

    /// `κ ↦ wp(instr)(κ)` in the `[0, +∞]` answer domain.
    pub fn wp_of(instr: &Instr, cfg: &WpConfig) -> Result<Self, SemanticsError> {
        if cfg.kind() != AnsKind::ExtNonNeg {
            return Err(SemanticsError::DomainMismatch { expected: AnsKind::ExtNonNeg, found: cfg.kind() });
        }
        // surface configuration errors now rather than on first use
        wp(instr, &Continuation::zero(), cfg)?;
        let instr = instr.clone();
        let cfg = cfg.clone();
        Ok(ParametricPrevision {
            f: Arc::new(move |k| wp(&instr, k, &cfg)),
            tag: PrevisionTag::WpOfProgram,
            name: "wp".into(),
        })
    }

    /// The Choquet integral over the outcomes of the input at `label`.
    pub fn choquet_input(label: Label, model: &InputModel, sem: Semantics) -> Result<Self, SemanticsError> {
        let (space, _) = model.site(label).ok_or(SemanticsError::NoModelForSite(label))?;
        let instr = Instr::Input { label, targets: space.vars().to_vec() };
        let cfg = WpConfig::new(sem, AnsKind::ExtNonNeg).with_inputs(model.clone());
        let mut p = ParametricPrevision::wp_of(&instr, &cfg)?;
        p.tag = PrevisionTag::ChoquetInput;
        p.name = format!("choquet@^{label}");
        Ok(p)
    }

    pub fn tag(&self) -> PrevisionTag {
        self.tag
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, k: &Continuation) -> Result<Continuation, SemanticsError> {
        k.require(AnsKind::ExtNonNeg)?;
        let out = (self.f)(k)?;
        out.require(AnsKind::ExtNonNeg)?;
        Ok(out)
    }

    /// `F(κ)(ρ)`.
    pub fn eval(&self, k: &Continuation, env: &Env) -> Result<Ans, SemanticsError> {
        self.apply(k)?.eval(env, &mut EvalTrace::default())
    }

    pub fn fix_at(&self, env: &Env) -> FixedPrevision {
        FixedPrevision { f: self.clone(), env: env.clone() }
    }
}

impl fmt::Debug for ParametricPrevision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParametricPrevision({}, {})", self.tag, self.name)
    }
}

/// `(F ∘ G)(κ) = F(G(κ))`.
pub fn compose(f: &ParametricPrevision, g: &ParametricPrevision) -> ParametricPrevision {
    let (f2, g2) = (f.clone(), g.clone());
    ParametricPrevision {
        f: Arc::new(move |k| f2.apply(&g2.apply(k)?)),
        tag: PrevisionTag::Composed,
        name: format!("{} . {}", f.name, g.name),
    }
}

/// Pointwise join `F(κ) ⊔ G(κ)`.
pub fn sup2(f: &ParametricPrevision, g: &ParametricPrevision) -> ParametricPrevision {
    let (f2, g2) = (f.clone(), g.clone());
    ParametricPrevision {
        f: Arc::new(move |k| Continuation::join(&f2.apply(k)?, &g2.apply(k)?)),
        tag: PrevisionTag::SupOf,
        name: format!("sup({}, {})", f.name, g.name),
    }
}

/// The classical prevision `κ ↦ F(κ)(ρ)` at a fixed environment.
#[derive(Clone, Debug)]
pub struct FixedPrevision {
    f: ParametricPrevision,
    env: Env,
}

impl FixedPrevision {
    pub fn eval(&self, k: &Continuation) -> Result<Ans, SemanticsError> {
        self.f.eval(k, &self.env)
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    /// The parametric checks restricted to this environment.
    pub fn check_laws(&self, plan: &SamplePlan) -> Result<LawReport, SemanticsError> {
        check_laws(&self.f, &plan.restricted_to(&self.env))
    }
}
