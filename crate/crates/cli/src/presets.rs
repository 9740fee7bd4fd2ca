use qpc_core::CodeParams;

fn codes(list: &[(u32, u32)]) -> Vec<CodeParams> {
    list.iter()
        .map(|&(n, m)| CodeParams::new(n, m).expect("preset codes are valid"))
        .collect()
}

pub fn table_1_codes() -> Vec<CodeParams> {
    codes(&[(1, 1), (2, 2), (3, 10), (6, 5), (10, 3), (23, 5)])
}

pub const TABLE_1_ETAS: [&str; 7] = ["1", "0.99", "0.95", "0.90", "0.75", "0.50", "0.30"];

pub fn table_s1_codes() -> Vec<CodeParams> {
    codes(&[
        (1, 1),
        (1, 2),
        (2, 1),
        (2, 2),
        (2, 3),
        (3, 2),
        (3, 3),
        (3, 4),
        (4, 3),
        (3, 5),
        (5, 3),
        (4, 4),
        (4, 5),
        (5, 4),
        (5, 5),
        (7, 4),
        (3, 10),
        (6, 5),
        (10, 3),
        (10, 4),
        (12, 4),
        (15, 5),
        (23, 5),
        (30, 6),
    ])
}

pub fn fig3_codes() -> Vec<CodeParams> {
    codes(&[(10, 3), (13, 4), (16, 4), (23, 5), (35, 6)])
}

pub const FIG3_DISTANCE_KM: f64 = 1000.0;
