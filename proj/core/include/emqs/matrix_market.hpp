#pragma once

#include <string>

#include "emqs/types.hpp"

namespace emqs {

/// Matrix Market coordinate format, 1-based indices.
void write_matrix_market(const SpMat& A, const std::string& path);
void write_matrix_market(const SpMatC& A, const std::string& path);

SpMatC read_matrix_market(const std::string& path);

}  // namespace emqs
