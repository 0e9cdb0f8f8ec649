//! The group-operations contract shared by every concrete group in the crate.
//!
//! Word maps are evaluated generically over this trait, so the same word
//! engine serves free groups, `PSL2(p)`, the direct sum `Δ`, and the sparse
//! wreath product `Γ`.

pub trait Group {
    type Elem: Clone + PartialEq;

    fn identity(&self) -> Self::Elem;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    /// In-place right multiplication. Implementations with growable
    /// representations override this to avoid copying the accumulator.
    fn mul_assign(&self, acc: &mut Self::Elem, rhs: &Self::Elem) {
        *acc = self.mul(acc, rhs);
    }

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    fn pow(&self, a: &Self::Elem, exp: i64) -> Self::Elem {
        let base = if exp < 0 { self.inv(a) } else { a.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    fn commutator(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let ab = self.mul(a, b);
        let ai = self.inv(a);
        let bi = self.inv(b);
        self.mul(&self.mul(&ab, &ai), &bi)
    }
}
