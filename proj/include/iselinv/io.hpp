#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "iselinv/factorization.hpp"
#include "iselinv/ordering.hpp"
#include "iselinv/selinv.hpp"
#include "iselinv/sparse.hpp"
#include "iselinv/symbolic.hpp"
#include "iselinv/types.hpp"

namespace iselinv {

/// Matrix Market coordinate format, symmetric qualifier, lower triangle,
/// 1-based indices. Writes the "real" field when every entry has zero
/// imaginary part, "complex" otherwise.
void write_matrix_market(const SparseSymmetric& a, const std::filesystem::path& path);
SparseSymmetric read_matrix_market(const std::filesystem::path& path);

/// Factor serialization: L as a strictly-lower "general" coordinate file
/// (unit diagonal implied), D as an n x 1 array file.
void write_factors(const LdltFactors& f, const std::filesystem::path& l_path,
                   const std::filesystem::path& d_path);
LdltFactors read_factors(const std::filesystem::path& l_path,
                         const std::filesystem::path& d_path);

void write_selected_inverse(const SelectedInverse& b, const std::filesystem::path& path);

/// One 1-based target per line: line i holds the new index of old vertex i.
void write_permutation(const Permutation& p, const std::filesystem::path& path);
Permutation read_permutation(const std::filesystem::path& path);

/// Pattern dump as "i,j,level" CSV, 1-based, lower triangle.
void write_pattern_csv(const FillPattern& p, const std::filesystem::path& path);

}  // namespace iselinv
