#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "jetstokes/field.hpp"

namespace jetstokes {

/// FieldFile: a JSON header plus a flat little-endian complex128 payload
/// (interleaved re, im) in layout n-major, then m, then r. The header's
/// "payload" entry is the payload path relative to the header's directory.
void write_field_file(const std::filesystem::path& header, const std::vector<const ScalarField*>& components);
void write_field_file(const std::filesystem::path& header, const ScalarField& f);
void write_field_file(const std::filesystem::path& header, const VectorField& v);

/// Reads all components. The domain must match the header's kappa, ell, n_r and n_z.
std::vector<ScalarField> read_field_file(const std::filesystem::path& header, const DomainPtr& domain);

/// Dense matrix export: JSON header {rows, cols, dtype, ...} + payload.
void write_matrix_file(const std::filesystem::path& header, const Eigen::MatrixXcd& m, const std::string& label);
Eigen::MatrixXcd read_matrix_file(const std::filesystem::path& header);

}  // namespace jetstokes
