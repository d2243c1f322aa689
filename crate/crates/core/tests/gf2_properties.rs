use icl_core::gf2::{BitVec, Gf2Matrix, SymbolSystem};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Gf2Matrix> {
    prop::collection::vec(prop::collection::vec(any::<bool>(), cols), rows).prop_map(move |rs| {
        Gf2Matrix::from_rows(cols, rs.iter().map(|r| BitVec::from_bools(r)).collect())
    })
}

fn sized_matrix() -> impl Strategy<Value = Gf2Matrix> {
    (0usize..8, 1usize..70).prop_flat_map(|(r, c)| matrix(r, c))
}

/// Rank by counting the distinct vectors in the row span.
fn span_rank(m: &Gf2Matrix) -> usize {
    let mut span = vec![BitVec::zeros(m.num_cols())];
    for row in m.rows() {
        if span.contains(row) {
            continue;
        }
        let more: Vec<BitVec> = span
            .iter()
            .map(|v| {
                let mut w = v.clone();
                w.xor_assign(row);
                w
            })
            .collect();
        span.extend(more);
    }
    span.len().trailing_zeros() as usize
}

proptest! {
    #[test]
    fn rank_matches_span_size(m in sized_matrix()) {
        prop_assert_eq!(m.rank(), span_rank(&m));
    }

    #[test]
    fn rank_of_transpose(m in sized_matrix()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn nullspace_is_a_kernel_basis(m in sized_matrix()) {
        let basis = m.nullspace();
        prop_assert_eq!(basis.len() + m.rank(), m.num_cols());
        for v in &basis {
            prop_assert!(m.mul_vec(v).is_zero());
        }
        let b = Gf2Matrix::from_rows(m.num_cols(), basis);
        prop_assert_eq!(b.rank(), b.num_rows());
    }

    #[test]
    fn rref_keeps_the_row_space(m in sized_matrix()) {
        let (r, pivots) = m.rref();
        prop_assert_eq!(pivots.len(), m.rank());
        for row in m.rows() {
            prop_assert!(r.row_space_contains(row));
        }
        for (i, &p) in pivots.iter().enumerate() {
            for k in 0..r.num_rows() {
                prop_assert_eq!(r.get(k, p), k == i);
            }
        }
    }

    #[test]
    fn hex_round_trip(bits in prop::collection::vec(any::<bool>(), 0..200)) {
        let v = BitVec::from_bools(&bits);
        prop_assert_eq!(BitVec::from_hex(v.len(), &v.to_hex()), Some(v.clone()));
        prop_assert_eq!(BitVec::parse(&v.to_string()), Some(v));
    }

    #[test]
    fn symbol_system_recovers_determined_unknowns(
        coeffs in matrix(6, 5),
        symbols in prop::collection::vec(prop::collection::vec(any::<bool>(), 9), 5),
    ) {
        let truth: Vec<BitVec> = symbols.iter().map(|s| BitVec::from_bools(s)).collect();
        let mut sys = SymbolSystem::new(5, 9);
        for row in coeffs.rows() {
            let mut rhs = BitVec::zeros(9);
            for u in row.ones() {
                rhs.xor_assign(&truth[u]);
            }
            sys.add_equation(row.clone(), rhs);
        }
        let solved = sys.solve().expect("consistent by construction");
        for (u, value) in solved.iter().enumerate() {
            let determined = coeffs.row_space_contains(&BitVec::unit(5, u));
            prop_assert_eq!(value.is_some(), determined);
            if let Some(v) = value {
                prop_assert_eq!(v, &truth[u]);
            }
        }
    }
}

#[test]
fn inconsistent_system_is_rejected() {
    let mut sys = SymbolSystem::new(1, 2);
    sys.add_equation(BitVec::parse("1").unwrap(), BitVec::parse("01").unwrap());
    sys.add_equation(BitVec::parse("1").unwrap(), BitVec::parse("11").unwrap());
    assert!(sys.solve().is_err());
}
