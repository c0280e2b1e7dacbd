use super::FieldMatrix;
use crate::csa::SystemParams;

/// The N×N Cauchy-Vandermonde matrix the collector inverts.
///
/// Row n is `[1/(1+α_n), …, 1/(L+α_n), 1, α_n, …, α_n^E]`: L Cauchy columns
/// carrying the wanted symbols, then E+1 Vandermonde columns absorbing the
/// aligned interference.
pub fn build_decoding_matrix(params: &SystemParams) -> FieldMatrix {
    let m = params.modulus();
    let n = params.servers();
    let l = params.message_len();
    let e = params.colluders();
    debug_assert_eq!(l + e + 1, n);
    let mut mat = FieldMatrix::zeros(m, n, n);
    for (row, &alpha) in params.alphas().iter().enumerate() {
        let alpha = m.element(alpha);
        for i in 1..=l {
            let shift = alpha + m.element(i as u64);
            // nonzero: SystemParams rejects α with α + i = 0
            mat.set(row, i - 1, shift.inv().expect("validated alpha"));
        }
        for p in 0..=e {
            mat.set(row, l + p, alpha.pow(p as u64));
        }
    }
    mat
}
