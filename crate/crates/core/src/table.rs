//! The published table of minimal constants over `B_b(τ)`, as printed.

/// One printed row: base, a minimizer's lower half in cycle notation, the
/// count `g_b` of minimizers, `c_b^σ` as printed, and `sqrt(c/ln b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub b: usize,
    pub cycles: &'static str,
    pub g: usize,
    pub c: &'static str,
    pub leading: &'static str,
}

const fn row(b: usize, cycles: &'static str, g: usize, c: &'static str, leading: &'static str) -> TableRow {
    TableRow {
        b,
        cycles,
        g,
        c,
        leading,
    }
}

pub const PUBLISHED_TABLE: [TableRow; 26] = [
    row(2, "id", 1, "1/24", "0.245178"),
    row(3, "id", 1, "5/81", "0.237039"),
    row(4, "id", 2, "1/12", "0.245178"),
    row(5, "(0,1)", 1, "29/375", "0.219202"),
    row(6, "(0,1)", 4, "67/648", "0.240220"),
    row(7, "(0,1,2)", 2, "2/21", "0.221229"),
    row(8, "(0,2,3,1)", 2, "3/32", "0.212330"),
    row(9, "(0,1,3)", 4, "26/243", "0.220671"),
    row(10, "(0,3,4,1)", 2, "111/1000", "0.219560"),
    row(11, "(0,2)(1,4)", 1, "415/3993", "0.208189"),
    row(12, "(0,3)(2,5)", 2, "35/324", "0.208500"),
    row(13, "(0,2)(1,5)(3,4)", 1, "55/507", "0.205654"),
    row(14, "(0,2)(1,5)(4,6)", 2, "983/8232", "0.212715"),
    row(15, "(0,4)(2,6)", 3, "236/2025", "0.207450"),
    row(16, "(0,5,4)(2,3,7)", 4, "23/192", "0.207859"),
    row(17, "(0,3,5,6,4,2)(1,7)", 2, "584/4913", "0.204829"),
    row(18, "(0,5,8,3)(1,2,7,6)", 2, "241/1944", "0.207101"),
    row(19, "(0,5)(2,8)(4,6,7)", 2, "827/6859", "0.202358"),
    row(20, "(0,2,4)(1,8)(3,6)(5,7,9)", 8, "193/1500", "0.207243"),
    row(21, "(0,6)(2,9)(5,8)", 1, "491/3969", "0.201576"),
    row(22, "(0,4,2,1,9,8,5,6,10,3,7)", 8, "4219/31944", "0.206708"),
    row(23, "(0,6)(2,10)(4,8)(7,9)", 1, "4586/36501", "0.200175"),
    row(24, "(0,7,11,3,5,8,1,2,10,9,6,4)", 16, "343/2592", "0.204055"),
    row(25, "(0,4,6,8,10,7)(1,9,5,3,11,2)", 8, "1234/9375", "0.202218"),
    row(26, "(0,7,12,5)(1,2,11,10)(3,4,9,8)", 2, "2236/17576", "0.198792"),
    row(27, "(0,3,1,10,6,8,11,9,4,12,2,7)", 14, "289/2187", "0.200235"),
];

pub fn table_row(b: usize) -> Option<&'static TableRow> {
    PUBLISHED_TABLE.iter().find(|r| r.b == b)
}
