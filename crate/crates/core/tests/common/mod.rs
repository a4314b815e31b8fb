#![allow(dead_code)]

use projsat::oracle::TruthTable;
use projsat::{BoolFunc, Clause, CnfFormula, Manager, Point, VarId};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random table over `n` variables.
pub fn random_table(rng: &mut impl Rng, n: usize) -> TruthTable {
    let mut t = TruthTable::new(n).unwrap();
    for i in 0..t.len() {
        t.set(i, rng.gen());
    }
    t
}

pub fn random_func(rng: &mut impl Rng, mgr: &Manager) -> BoolFunc {
    random_table(rng, mgr.var_count()).to_func(mgr)
}

/// Builds the function with table `t` as a disjunction of minterms in
/// shuffled order, a route unrelated to `TruthTable::to_func`.
pub fn func_from_minterms(rng: &mut impl Rng, mgr: &Manager, t: &TruthTable) -> BoolFunc {
    let n = t.var_count();
    let mut on: Vec<u64> = (0..t.len()).filter(|&i| t.get(i)).collect();
    on.shuffle(rng);
    mgr.or_all(on.into_iter().map(|idx| {
        let p = Point::from_index(n, idx);
        let mut lits: Vec<usize> = (0..n).collect();
        lits.shuffle(rng);
        mgr.and_all(
            lits.into_iter()
                .map(|v| mgr.literal(VarId(v as u32), !p.bits()[v]).unwrap()),
        )
    }))
}

/// Values of `f` at every point, via `eval`.
pub fn values(mgr: &Manager, f: BoolFunc) -> Vec<bool> {
    let n = mgr.var_count();
    (0..1u64 << n)
        .map(|i| mgr.eval(f, &Point::from_index(n, i)).unwrap())
        .collect()
}

pub fn random_clause(rng: &mut impl Rng, n: usize, max_len: usize) -> Clause {
    let len = rng.gen_range(1..=max_len.min(n));
    let mut vars: Vec<u32> = (0..n as u32).collect();
    vars.shuffle(rng);
    Clause::new(vars[..len].iter().map(|&v| projsat::Literal {
        var: VarId(v),
        negated: rng.gen(),
    }))
}

/// A random CNF whose clauses may repeat variables and so may be
/// tautological.
pub fn random_cnf(rng: &mut impl Rng, n: usize, m: usize, max_len: usize) -> CnfFormula {
    let clauses = (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            Clause::new((0..len).map(|_| projsat::Literal {
                var: VarId(rng.gen_range(0..n as u32)),
                negated: rng.gen(),
            }))
        })
        .collect();
    CnfFormula::new(n, clauses)
}

/// Points satisfying every clause, by direct evaluation.
pub fn brute_force_models(f: &CnfFormula) -> Vec<Point> {
    (0..1u64 << f.var_count)
        .map(|i| Point::from_index(f.var_count, i))
        .filter(|p| f.satisfied_by(p))
        .collect()
}
