//! Values of the published tables used as acceptance oracles.

/// Biot errors over R⁻¹ (α_p = 1E-4, λ = 1E4): `[mesh][norm P, V, U][column]` for h = 1/8 .. 1/64.
pub const TABLE1: [[[f64; 6]; 3]; 4] = [
    [
        [2.1e-1, 2.1e-2, 6.6e-3, 2.1e-3, 2.0e-3, 2.0e-3],
        [1.3e1, 1.3e0, 4.1e-1, 1.3e-1, 1.6e-4, 1.6e-8],
        [9.1e-2, 9.1e-2, 9.1e-2, 9.1e-2, 9.1e-2, 9.1e-2],
    ],
    [
        [1.0e-1, 1.0e-2, 3.3e-3, 1.0e-3, 1.0e-3, 1.0e-3],
        [6.6e0, 6.6e-1, 2.1e-1, 6.6e-2, 8.3e-5, 8.3e-9],
        [4.5e-2, 4.5e-2, 4.5e-2, 4.5e-2, 4.5e-2, 4.5e-2],
    ],
    [
        [5.2e-2, 5.1e-3, 1.6e-3, 5.1e-4, 5.1e-4, 5.2e-4],
        [3.3e0, 3.3e-1, 1.0e-1, 3.3e-2, 4.4e-5, 4.4e-9],
        [2.3e-2, 2.3e-2, 2.3e-2, 2.3e-2, 2.3e-2, 2.3e-2],
    ],
    [
        [2.6e-2, 2.6e-3, 8.2e-4, 2.6e-4, 2.6e-4, 2.6e-4],
        [1.7e0, 1.7e-1, 5.2e-2, 1.7e-2, 2.3e-5, 2.3e-9],
        [1.1e-2, 1.1e-2, 1.1e-2, 1.1e-2, 1.1e-2, 1.1e-2],
    ],
];

/// Biot MinRes at h = 1/16, 1/64; rows (α_p, λ) row-major, columns R⁻¹: `(iterations, factor)` with factors printed as `<0.01` stored as 0.005.
pub const TABLE4: [[[(usize, f64); 6]; 12]; 2] = [
    [
        [(19, 0.37), (27, 0.50), (26, 0.49), (19, 0.38), (13, 0.24), (13, 0.24)],
        [(10, 0.15), (20, 0.39), (19, 0.38), (13, 0.23), (4, 0.005), (3, 0.005)],
        [(10, 0.11), (20, 0.39), (19, 0.38), (13, 0.23), (4, 0.005), (3, 0.005)],
        [(19, 0.38), (35, 0.58), (43, 0.65), (34, 0.50), (19, 0.29), (19, 0.36)],
        [(9, 0.08), (10, 0.11), (12, 0.17), (13, 0.23), (17, 0.31), (5, 0.01)],
        [(6, 0.05), (8, 0.07), (9, 0.10), (10, 0.14), (11, 0.18), (3, 0.005)],
        [(19, 0.38), (35, 0.58), (43, 0.65), (34, 0.50), (19, 0.29), (19, 0.36)],
        [(9, 0.08), (10, 0.11), (12, 0.17), (14, 0.23), (20, 0.31), (5, 0.01)],
        [(6, 0.05), (8, 0.07), (8, 0.07), (9, 0.08), (13, 0.24), (4, 0.01)],
        [(19, 0.38), (35, 0.58), (43, 0.65), (34, 0.50), (19, 0.29), (19, 0.36)],
        [(9, 0.08), (10, 0.11), (12, 0.17), (14, 0.23), (20, 0.31), (5, 0.01)],
        [(6, 0.05), (8, 0.07), (8, 0.07), (9, 0.08), (13, 0.24), (4, 0.01)],
    ],
    [
        [(18, 0.35), (27, 0.49), (28, 0.51), (25, 0.47), (12, 0.20), (12, 0.20)],
        [(9, 0.12), (19, 0.36), (20, 0.39), (16, 0.30), (4, 0.005), (3, 0.005)],
        [(8, 0.09), (19, 0.36), (20, 0.39), (16, 0.30), (4, 0.005), (3, 0.005)],
        [(19, 0.36), (34, 0.57), (46, 0.66), (47, 0.61), (20, 0.39), (19, 0.37)],
        [(8, 0.09), (10, 0.11), (12, 0.17), (13, 0.21), (21, 0.40), (5, 0.01)],
        [(6, 0.03), (7, 0.06), (8, 0.09), (9, 0.12), (14, 0.26), (3, 0.005)],
        [(19, 0.36), (34, 0.57), (46, 0.66), (47, 0.61), (20, 0.39), (19, 0.37)],
        [(8, 0.09), (10, 0.11), (12, 0.17), (13, 0.21), (26, 0.49), (5, 0.01)],
        [(6, 0.03), (7, 0.06), (7, 0.06), (8, 0.09), (13, 0.22), (4, 0.01)],
        [(19, 0.36), (34, 0.57), (46, 0.66), (47, 0.61), (20, 0.39), (19, 0.37)],
        [(8, 0.09), (10, 0.11), (12, 0.17), (13, 0.21), (26, 0.49), (5, 0.01)],
        [(6, 0.03), (7, 0.06), (7, 0.06), (8, 0.09), (13, 0.22), (4, 0.01)],
    ],
];

/// Barenblatt MinRes at h = 1/16, 1/64; rows (β, K2 scale), columns K1 scale: `(iterations, factor)` with factors printed as `<0.01` stored as 0.005.
pub const BARENBLATT: [[[(usize, f64); 3]; 8]; 2] = [
    [
        [(16, 0.31), (16, 0.31), (16, 0.31)],
        [(21, 0.41), (21, 0.41), (21, 0.41)],
        [(37, 0.61), (37, 0.61), (37, 0.61)],
        [(29, 0.51), (29, 0.51), (29, 0.51)],
        [(16, 0.31), (16, 0.31), (16, 0.31)],
        [(21, 0.41), (21, 0.41), (21, 0.41)],
        [(37, 0.61), (37, 0.61), (37, 0.61)],
        [(29, 0.51), (29, 0.51), (29, 0.51)],
    ],
    [
        [(18, 0.33), (18, 0.33), (18, 0.33)],
        [(32, 0.55), (32, 0.55), (32, 0.55)],
        [(38, 0.61), (38, 0.61), (38, 0.61)],
        [(27, 0.49), (27, 0.49), (27, 0.49)],
        [(18, 0.33), (18, 0.33), (18, 0.33)],
        [(32, 0.55), (32, 0.55), (32, 0.55)],
        [(38, 0.61), (38, 0.61), (38, 0.61)],
        [(27, 0.49), (27, 0.49), (27, 0.49)],
    ],
];

/// Four-network MinRes at h = 1/32, 1/64; rows (λ scale, K scale), columns K3 scale: `(iterations, factor)` with factors printed as `<0.01` stored as 0.005.
pub const FOUR_NETWORK: [[[(usize, f64); 6]; 9]; 2] = [
    [
        [(34, 0.56), (32, 0.56), (26, 0.47), (23, 0.42), (19, 0.37), (19, 0.37)],
        [(24, 0.48), (24, 0.49), (24, 0.49), (22, 0.42), (21, 0.41), (20, 0.40)],
        [(21, 0.41), (21, 0.41), (21, 0.41), (26, 0.49), (41, 0.63), (39, 0.62)],
        [(18, 0.35), (25, 0.48), (30, 0.53), (34, 0.57), (34, 0.57), (34, 0.57)],
        [(12, 0.20), (20, 0.40), (35, 0.59), (31, 0.54), (31, 0.54), (31, 0.54)],
        [(9, 0.12), (18, 0.40), (34, 0.58), (21, 0.41), (14, 0.26), (14, 0.26)],
        [(14, 0.25), (14, 0.27), (12, 0.19), (12, 0.20), (12, 0.20), (12, 0.20)],
        [(12, 0.20), (14, 0.26), (9, 0.12), (7, 0.07), (7, 0.07), (7, 0.07)],
        [(11, 0.18), (14, 0.26), (9, 0.12), (6, 0.04), (5, 0.02), (5, 0.02)],
    ],
    [
        [(34, 0.56), (32, 0.56), (26, 0.47), (21, 0.41), (19, 0.37), (19, 0.37)],
        [(24, 0.48), (24, 0.49), (24, 0.49), (23, 0.42), (22, 0.42), (21, 0.41)],
        [(21, 0.41), (21, 0.41), (21, 0.41), (36, 0.58), (45, 0.66), (45, 0.66)],
        [(20, 0.40), (28, 0.51), (34, 0.58), (34, 0.57), (34, 0.57), (34, 0.57)],
        [(13, 0.22), (25, 0.48), (36, 0.60), (31, 0.54), (31, 0.54), (31, 0.54)],
        [(6, 0.03), (25, 0.46), (36, 0.60), (21, 0.41), (14, 0.26), (14, 0.26)],
        [(14, 0.25), (14, 0.27), (12, 0.19), (12, 0.20), (12, 0.20), (12, 0.20)],
        [(12, 0.20), (14, 0.26), (9, 0.12), (7, 0.07), (7, 0.07), (7, 0.07)],
        [(12, 0.20), (14, 0.26), (9, 0.12), (6, 0.04), (5, 0.02), (5, 0.02)],
    ],
];
