use holink::algebra::{differential, rat, shuffle_sums, sign_pow, DiagramSum};
use holink::diagram::{enumerate, parse_diagram, Parity, Space};

fn main() {
    let a = parse_diagram("diagram v1 { m=2 parity=odd seg=[[],[a,b]] free=[] edges=[chord(a,b,a->b)] }").unwrap();
    let x = DiagramSum::from_diagram(&a);
    let xy = shuffle_sums(&x, &x).unwrap();
    let lhs = differential(&xy);
    let mut rhs = shuffle_sums(&differential(&x), &x).unwrap();
    rhs.add(&shuffle_sums(&x, &differential(&x)).unwrap());
    println!("dx = {}", differential(&x));
    let mut resid = lhs.clone();
    resid.add(&rhs.scaled(&rat(-1)));
    println!("residual = {resid}");
    // count failures over corpus both parities
    for parity in [Parity::Odd, Parity::Even] {
        let mut corpus = Vec::new();
        for (defect, order) in [(0i64, 0i64), (0, 1), (1, 1), (0, 2)] {
            corpus.extend(enumerate(2, parity, defect, order, Space::Ld).unwrap());
        }
        let mut fails = 0;
        let mut total = 0;
        for a in &corpus {
            for b in &corpus {
                let x = DiagramSum::from_diagram(a);
                let y = DiagramSum::from_diagram(b);
                if let Ok(xy) = shuffle_sums(&x, &y) {
                    total += 1;
                    let lhs = differential(&xy);
                    let mut rhs = shuffle_sums(&differential(&x), &y).unwrap();
                    let sgn = sign_pow(a.degree_parity() as usize);
                    rhs.add(&shuffle_sums(&x, &differential(&y)).unwrap().scaled(&sgn));
                    if lhs != rhs { fails += 1; }
                }
            }
        }
        println!("{parity:?}: {fails}/{total} fail");
    }
}
