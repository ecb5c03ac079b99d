//! Terms as partial maps on flat tuples laid out in context order.
//!
//! A context `x₁:A₁, …, xₙ:Aₙ` is a `Vec<Value>` of length `n`. Consuming
//! a variable removes its slot and introducing one appends a slot, mirroring
//! the typechecker's context threading, so unitors and associators are no-ops.

use std::sync::Arc;

use crate::denote::discard::{DiscardEnv, Discarder};
use crate::syntax::{AtomTable, Term, Type, VarContext};
use crate::value::Value;

/// What one unit of fuel pays for.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FuelModel {
    /// One unit per application of `W` in the loop fixpoint, exit included.
    #[default]
    Unfoldings,
    /// Calibrated to the reduction relation: the cost of a term is exactly
    /// the number of steps it takes to reach `skip`.
    OperationalSteps,
}

/// Step costs of the calibrated model.
pub mod cost {
    /// `new unit`, `discard`, injections, pairing, fold, unfold.
    pub const ATOMIC: u64 = 1;
    /// `skip; P ⇝ P`
    pub const SEQ: u64 = 1;
    /// Branch selection.
    pub const CASE: u64 = 1;
    /// `while` to its `if`, the case, and `b = left u`.
    pub const LOOP_EXIT: u64 = 3;
    /// `while` to its `if`, the case, `b = right u`, its `skip`, and the
    /// `skip` after the body.
    pub const LOOP_CONTINUE: u64 = 5;
}

#[derive(Clone, Debug)]
pub(crate) enum Op {
    Id,
    Seq(Box<Op>, Box<Op>),
    NewUnit,
    Discard { slot: usize, discarder: Discarder },
    Inject { slot: usize, left: bool, left_ty: Type, right_ty: Type },
    Case { slot: usize, left: Box<Op>, right: Box<Op>, right_to_left: Vec<usize> },
    Pair { fst: usize, snd: usize },
    Unpair { slot: usize },
    Fold { slot: usize, mu_ty: Type },
    Unfold { slot: usize },
    While { guard: usize, body: Box<Op>, restore: Vec<usize> },
}

/// `perm[i]` is the slot of `from` holding the variable at position `i` of `to`.
fn permutation(from: &VarContext, to: &VarContext) -> Vec<usize> {
    to.names().map(|n| from.position(n).expect("same variables")).collect()
}

fn slot(ctx: &VarContext, var: &str) -> usize {
    ctx.position(var).expect("well-typed term")
}

fn introduce(ctx: &mut VarContext, var: &str, ty: Type) {
    ctx.insert(var.to_string(), ty).expect("well-typed term");
}

/// Compiles a well-typed term; `ctx` goes from Γ to Σ.
pub(crate) fn compile(atoms: &AtomTable, ctx: &mut VarContext, term: &Term) -> Op {
    match term {
        Term::Skip => Op::Id,
        Term::Seq(m, n) => {
            let first = compile(atoms, ctx, m);
            let second = compile(atoms, ctx, n);
            Op::Seq(Box::new(first), Box::new(second))
        }
        Term::NewUnit { var, .. } => {
            introduce(ctx, var, Type::Unit);
            Op::NewUnit
        }
        Term::Discard { var, .. } => {
            let s = slot(ctx, var);
            let ty = ctx.remove(var).unwrap();
            Op::Discard { slot: s, discarder: Discarder::for_closed(atoms, &ty) }
        }
        Term::Left { dst, left_ty, right_ty, src, .. } | Term::Right { dst, left_ty, right_ty, src, .. } => {
            let s = slot(ctx, src);
            ctx.remove(src);
            introduce(ctx, dst, Type::sum(left_ty.clone(), right_ty.clone()));
            Op::Inject {
                slot: s,
                left: matches!(term, Term::Left { .. }),
                left_ty: left_ty.clone(),
                right_ty: right_ty.clone(),
            }
        }
        Term::Case { scrutinee, left_var, left_body, right_var, right_body, .. } => {
            let s = slot(ctx, scrutinee);
            let Some(Type::Sum(a, b)) = ctx.remove(scrutinee) else { panic!("well-typed term") };
            let mut lctx = ctx.clone();
            introduce(&mut lctx, left_var, Arc::unwrap_or_clone(a));
            let left = compile(atoms, &mut lctx, left_body);
            let mut rctx = ctx.clone();
            introduce(&mut rctx, right_var, Arc::unwrap_or_clone(b));
            let right = compile(atoms, &mut rctx, right_body);
            let right_to_left = permutation(&rctx, &lctx);
            *ctx = lctx;
            Op::Case { slot: s, left: Box::new(left), right: Box::new(right), right_to_left }
        }
        Term::Pair { dst, fst, snd, .. } => {
            let i = slot(ctx, fst);
            let a = ctx.remove(fst).unwrap();
            let j = slot(ctx, snd);
            let b = ctx.remove(snd).unwrap();
            introduce(ctx, dst, Type::tensor(a, b));
            Op::Pair { fst: i, snd: j }
        }
        Term::Unpair { fst, snd, src, .. } => {
            let s = slot(ctx, src);
            let Some(Type::Tensor(a, b)) = ctx.remove(src) else { panic!("well-typed term") };
            introduce(ctx, fst, Arc::unwrap_or_clone(a));
            introduce(ctx, snd, Arc::unwrap_or_clone(b));
            Op::Unpair { slot: s }
        }
        Term::Fold { dst, mu_ty, src, .. } => {
            let s = slot(ctx, src);
            ctx.remove(src);
            introduce(ctx, dst, mu_ty.clone());
            Op::Fold { slot: s, mu_ty: mu_ty.clone() }
        }
        Term::Unfold { dst, src, .. } => {
            let s = slot(ctx, src);
            let ty = ctx.remove(src).unwrap();
            introduce(ctx, dst, ty.unfold_mu().expect("well-typed term"));
            Op::Unfold { slot: s }
        }
        Term::While { guard, body, .. } => {
            let g = slot(ctx, guard);
            let mut inner = ctx.clone();
            let body = compile(atoms, &mut inner, body);
            let restore = permutation(&inner, ctx);
            Op::While { guard: g, body: Box::new(body), restore }
        }
    }
}

/// Remaining fuel; running out is `⊥`.
pub(crate) struct Tank {
    pub model: FuelModel,
    pub left: u64,
}

impl Tank {
    fn spend(&mut self, model: FuelModel, amount: u64) -> Option<()> {
        if model != self.model || amount == 0 {
            return Some(());
        }
        self.left = self.left.checked_sub(amount)?;
        Some(())
    }

    fn steps(&mut self, amount: u64) -> Option<()> {
        self.spend(FuelModel::OperationalSteps, amount)
    }
}

fn permute(tuple: Vec<Value>, perm: &[usize]) -> Vec<Value> {
    let mut slots: Vec<Option<Value>> = tuple.into_iter().map(Some).collect();
    perm.iter().map(|&i| slots[i].take().expect("permutation")).collect()
}

/// Evaluates `op` on `tuple`; `None` is `⊥`.
pub(crate) fn eval(op: &Op, mut tuple: Vec<Value>, tank: &mut Tank) -> Option<Vec<Value>> {
    match op {
        Op::Id => Some(tuple),
        Op::Seq(m, n) => {
            let mid = eval(m, tuple, tank)?;
            tank.steps(cost::SEQ)?;
            eval(n, mid, tank)
        }
        Op::NewUnit => {
            tank.steps(cost::ATOMIC)?;
            tuple.push(Value::Star);
            Some(tuple)
        }
        Op::Discard { slot, discarder } => {
            tank.steps(cost::ATOMIC)?;
            let v = tuple.remove(*slot);
            discarder.apply(&v, &DiscardEnv::empty())?;
            Some(tuple)
        }
        Op::Inject { slot, left, left_ty, right_ty } => {
            tank.steps(cost::ATOMIC)?;
            let v = tuple.remove(*slot);
            let (a, b) = (left_ty.clone(), right_ty.clone());
            tuple.push(if *left { Value::left(a, b, v) } else { Value::right(a, b, v) });
            Some(tuple)
        }
        Op::Case { slot, left, right, right_to_left } => {
            tank.steps(cost::CASE)?;
            // Distributivity: Γ ⊗ (A + B) ≅ (Γ ⊗ A) + (Γ ⊗ B).
            match tuple.remove(*slot) {
                Value::Left { inner, .. } => {
                    tuple.push(*inner);
                    eval(left, tuple, tank)
                }
                Value::Right { inner, .. } => {
                    tuple.push(*inner);
                    let out = eval(right, tuple, tank)?;
                    Some(permute(out, right_to_left))
                }
                _ => None,
            }
        }
        Op::Pair { fst, snd } => {
            tank.steps(cost::ATOMIC)?;
            let a = tuple.remove(*fst);
            let b = tuple.remove(*snd);
            tuple.push(Value::pair(a, b));
            Some(tuple)
        }
        Op::Unpair { slot } => {
            tank.steps(cost::ATOMIC)?;
            let Value::Pair(a, b) = tuple.remove(*slot) else { return None };
            tuple.push(*a);
            tuple.push(*b);
            Some(tuple)
        }
        Op::Fold { slot, mu_ty } => {
            tank.steps(cost::ATOMIC)?;
            let v = tuple.remove(*slot);
            tuple.push(Value::fold(mu_ty.clone(), v));
            Some(tuple)
        }
        Op::Unfold { slot } => {
            tank.steps(cost::ATOMIC)?;
            let Value::Fold { inner, .. } = tuple.remove(*slot) else { return None };
            tuple.push(*inner);
            Some(tuple)
        }
        Op::While { guard, body, restore } => loop {
            // One application of W_f: exit on ff, run the body on tt.
            tank.spend(FuelModel::Unfoldings, 1)?;
            match tuple[*guard].is_bit()? {
                false => {
                    tank.steps(cost::LOOP_EXIT)?;
                    return Some(tuple);
                }
                true => {
                    tank.steps(cost::LOOP_CONTINUE)?;
                    let out = eval(body, tuple, tank)?;
                    tuple = permute(out, restore);
                }
            }
        },
    }
}
