// SPDX-License-Identifier: Apache-2.0
//
// Exact integer feasibility of conjunctions of affine constraints (the Omega
// test: equality elimination, exact and inexact Fourier-Motzkin with dark
// shadows and splinters).

#pragma once

#include "lrumodel/poly/Int.h"

#include <vector>

namespace lrumodel::poly {

/// Constant at index 0, then one coefficient per variable.
using Row = std::vector<Int>;

/// Normalizes an inequality row in place (divides by the coefficient gcd and
/// tightens the constant). Returns false if the row is a contradiction; a
/// trivially true row is left with an all-zero linear part.
bool normalizeInequality(Row &R);

/// Normalizes an equality row in place (gcd, leading coefficient positive).
/// Returns false if it has no integer solution.
bool normalizeEquality(Row &R);

bool isZeroLinear(const Row &R);

/// Returns true iff there is an integer point satisfying all rows.
/// Rows are `expr == 0` (equalities) and `expr >= 0` (inequalities).
bool isIntegerFeasible(std::vector<Row> Equalities, std::vector<Row> Inequalities);

/// Fourier-Motzkin real shadow of eliminating every variable except `Keep`,
/// returned as inequalities over the full row width (other columns zero).
/// Exact over the rationals; used for bounding boxes and scan bounds.
std::vector<Row> realShadow(std::vector<Row> Equalities, std::vector<Row> Inequalities,
                            const std::vector<bool> &Keep);

} // namespace lrumodel::poly
