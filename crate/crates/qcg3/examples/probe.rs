use qcg3::qscalar::{Backend, BigFixed, Scalar};
use qcg3::tensor::*;
use qcg3::oracle::*;
use num_rational::BigRational;
use num_bigint::BigInt;

fn show(v: &[Scalar], ctx: &qcg3::qscalar::NumericContext) -> String {
    v.iter().map(|x| {
        let d = x.eval(ctx).to_decimal(6);
        format!("{d:>10}")
    }).collect::<Vec<_>>().join(" ")
}

fn main() {
    let be = Backend::numeric(BigRational::new(BigInt::from(9), BigInt::from(10)), 60);
    let ctx = be.context();
    let table = qcg_table(1, 1, &be).unwrap();
    let gens = build_generators(1, 1, &be);

    // s=1 highest-weight vector
    let hw = highest_weight_expansion(1, 1, 1, &be).unwrap();
    let v = gens.basis.vector_of(&hw, &be);
    println!("kets: {:?}", gens.basis.kets.iter().map(|(a,b)|
        format!("({}{},{}{})", a.a,a.b,b.a,b.b)).collect::<Vec<_>>());
    println!("v(hw s=1)   = {}", show(&v, ctx));

    // u = DE1- ( DE2- v )  via oracle matrices
    let u2 = gens.e_minus[1].apply(&v, &be);
    let u = gens.e_minus[0].apply(&u2, &be);
    println!("E1-E2- v    = {}", show(&u, ctx));
    let u2b = gens.e_minus[0].apply(&v, &be);
    let ub = gens.e_minus[1].apply(&u2b, &be);
    println!("E2-E1- v    = {}", show(&ub, ctx));

    // the naive alpha3-built table state at s=1, omega=(1,1)
    let st = table.channels[1].states.iter().find(|s| s.omega.a==1 && s.omega.b==1).unwrap();
    let w = gens.basis.vector_of(st, &be);
    println!("table state = {}", show(&w, ctx));

    // overlaps of u with every table state
    for s in table.states() {
        let sv = gens.basis.vector_of(s, &be);
        let mut acc = BigFixed::zero(ctx.bits);
        for i in 0..sv.len() { acc = &acc + &(&sv[i].eval(ctx) * &u[i].eval(ctx)); }
        let a = acc.abs();
        if a > BigFixed::pow10_neg(40, ctx.bits) {
            println!("  <u|state s={} om=({},{})> = {}", s.channel.s, s.omega.a, s.omega.b, acc.to_decimal(8));
        }
    }
}
